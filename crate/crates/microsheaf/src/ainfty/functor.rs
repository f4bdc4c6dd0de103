use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};

use super::{
    add_into, apply_table, axpy, compositions, reduced_sign, unit_vec, AInftyStructure, RelationReport, SparseVec,
};
use crate::homalg::Q;
use crate::Error;

/// A non-unital A∞-functor: F^d sends a composable source tuple (first-to-last) to a
/// target vector of degree Σ|a| + 1 − d.
#[derive(Clone, Debug)]
pub struct AInftyFunctorData {
    pub source: Arc<AInftyStructure>,
    pub target: Arc<AInftyStructure>,
    pub object_map: Vec<usize>,
    comps: Vec<BTreeMap<Vec<usize>, SparseVec>>,
    pub max_arity: usize,
}

impl AInftyFunctorData {
    pub fn new(
        source: Arc<AInftyStructure>,
        target: Arc<AInftyStructure>,
        object_map: Vec<usize>,
        max_arity: usize,
    ) -> Result<Self, Error> {
        if object_map.len() != source.objects.len() || object_map.iter().any(|&o| o >= target.objects.len()) {
            return Err(Error::Invalid("object map does not match the structures".into()));
        }
        let max_arity = max_arity.max(1);
        Ok(AInftyFunctorData { source, target, object_map, comps: vec![BTreeMap::new(); max_arity], max_arity })
    }

    pub fn identity(a: Arc<AInftyStructure>) -> Self {
        let n = a.objects.len();
        let mut f = AInftyFunctorData::new(a.clone(), a.clone(), (0..n).collect(), a.max_arity).unwrap();
        for g in 0..a.num_gens() {
            f.comps[0].insert(vec![g], unit_vec(g));
        }
        f
    }

    pub fn component(&self, d: usize) -> &BTreeMap<Vec<usize>, SparseVec> {
        &self.comps[d - 1]
    }

    pub fn get(&self, key: &[usize]) -> Option<&SparseVec> {
        self.comps.get(key.len().checked_sub(1)?)?.get(key)
    }

    pub fn set(&mut self, key: Vec<usize>, value: SparseVec) -> Result<(), Error> {
        let d = key.len();
        if d == 0 || d > self.max_arity || !self.source.composable(&key) {
            return Err(Error::Invalid(format!("{key:?} is not a composable tuple of arity ≤ {}", self.max_arity)));
        }
        let s = &self.source.gens;
        let src = self.object_map[s[key[0]].source];
        let tgt = self.object_map[s[key[d - 1]].target];
        let deg = key.iter().map(|&g| s[g].degree).sum::<i32>() + 1 - d as i32;
        for &o in value.keys() {
            let g = &self.target.gens[o];
            if g.source != src || g.target != tgt || g.degree != deg {
                return Err(Error::Invalid(format!("F^{d}{key:?} has an output of the wrong hom or degree")));
            }
        }
        let value: SparseVec = value.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if value.is_empty() {
            self.comps[d - 1].remove(&key);
        } else {
            self.comps[d - 1].insert(key, value);
        }
        Ok(())
    }

    /// F^d applied to vectors given first-to-last.
    pub fn apply(&self, inputs: &[&SparseVec]) -> SparseVec {
        match self.comps.get(inputs.len().wrapping_sub(1)) {
            Some(t) => apply_table(&self.source.gens, t, inputs),
            None => SparseVec::new(),
        }
    }

    /// Σ_r Σ μ_target^r(F(block₁), …, F(block_r)) over consecutive block splits.
    fn pushed(&self, key: &[usize]) -> SparseVec {
        let d = key.len();
        let mut out = SparseVec::new();
        let top = self.target.top_arity().min(d);
        for r in 1..=top {
            if self.target.op(r).is_empty() {
                continue;
            }
            for comp in compositions(d, r) {
                let mut blocks = Vec::with_capacity(r);
                let mut at = 0;
                let mut zero = false;
                for len in comp {
                    match self.get(&key[at..at + len]) {
                        Some(v) => blocks.push(v),
                        None => {
                            zero = true;
                            break;
                        }
                    }
                    at += len;
                }
                if !zero {
                    let v = self.target.apply(&blocks);
                    axpy(&mut out, &Q::one(), &v);
                }
            }
        }
        out
    }

    /// Σ ± F(a_1, …, a_n, μ^m(a_{n+1}, …), …) with the sign of the A∞ identity.
    fn pulled(&self, key: &[usize]) -> SparseVec {
        let d = key.len();
        let mut out = SparseVec::new();
        for m in 1..=d.min(self.source.top_arity()) {
            for n in 0..=d - m {
                let inner = self.source.apply_basis(&key[n..n + m]);
                if inner.is_empty() {
                    continue;
                }
                let k = d - m + 1;
                if k > self.max_arity {
                    continue;
                }
                let mut vecs: Vec<SparseVec> = key[..n].iter().map(|&g| unit_vec(g)).collect();
                vecs.push(inner);
                vecs.extend(key[n + m..].iter().map(|&g| unit_vec(g)));
                let refs: Vec<&SparseVec> = vecs.iter().collect();
                let v = self.apply(&refs);
                let c = if reduced_sign(&self.source.gens, &key[..n]) { -Q::one() } else { Q::one() };
                axpy(&mut out, &c, &v);
            }
        }
        out
    }
}

/// Checks the functor identity at arity d on every composable source tuple.
pub fn check_functor(f: &AInftyFunctorData, d: usize) -> Result<RelationReport, Error> {
    if d == 0 || d > f.max_arity {
        return Err(Error::Invalid(format!("arity {d} exceeds the stored functor data ({})", f.max_arity)));
    }
    let mut residual = BTreeMap::new();
    for key in f.source.composable_tuples(d) {
        let mut r = f.pushed(&key);
        for (g, c) in f.pulled(&key) {
            add_into(&mut r, g, &-c);
        }
        if !r.is_empty() {
            residual.insert(key, r);
        }
    }
    Ok(RelationReport::from_residual(d, residual))
}

/// G∘F with (G∘F)^d = Σ G^r(F^{s_1}(…), …, F^{s_r}(…)).
pub fn compose_functors(f: &AInftyFunctorData, g: &AInftyFunctorData) -> Result<AInftyFunctorData, Error> {
    if !Arc::ptr_eq(&f.target, &g.source) && !f.target.same_as(&g.source) {
        return Err(Error::Invalid("functors are not composable".into()));
    }
    let bound = f.max_arity.min(g.max_arity);
    let object_map = f.object_map.iter().map(|&o| g.object_map[o]).collect();
    let mut h = AInftyFunctorData::new(f.source.clone(), g.target.clone(), object_map, bound)?;
    for d in 1..=bound {
        for key in f.source.composable_tuples(d) {
            let mut out = SparseVec::new();
            for r in 1..=d.min(g.max_arity) {
                if g.comps[r - 1].is_empty() {
                    continue;
                }
                for comp in compositions(d, r) {
                    let mut blocks = Vec::with_capacity(r);
                    let mut at = 0;
                    for len in comp {
                        match f.get(&key[at..at + len]) {
                            Some(v) => blocks.push(v),
                            None => break,
                        }
                        at += len;
                    }
                    if blocks.len() == r {
                        let v = g.apply(&blocks);
                        axpy(&mut out, &Q::one(), &v);
                    }
                }
            }
            if !out.is_empty() {
                h.comps[d - 1].insert(key, out);
            }
        }
    }
    Ok(h)
}

impl AInftyFunctorData {
    /// Exact equality of components through the smaller arity bound.
    pub fn same_components(&self, other: &AInftyFunctorData) -> bool {
        let n = self.max_arity.min(other.max_arity);
        self.object_map == other.object_map && (0..n).all(|d| self.comps[d] == other.comps[d])
    }

    /// A copy with F^d and higher removed.
    pub fn dropping_from(&self, d: usize) -> Self {
        let mut out = self.clone();
        for k in d.max(2)..=out.max_arity {
            out.comps[k - 1].clear();
        }
        out
    }

    pub(crate) fn insert_raw(&mut self, key: Vec<usize>, value: SparseVec) {
        if !value.is_empty() {
            self.comps[key.len() - 1].insert(key, value);
        }
    }
}
