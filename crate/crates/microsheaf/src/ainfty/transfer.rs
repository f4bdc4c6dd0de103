use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::One;

use super::tensor::{perturbation_series, tensor_homotopy, Tensor};
use super::{
    add_into, apply_linear, axpy, compositions, unit_vec, AInftyFunctorData, AInftyStructure, Generator, SparseVec,
};
use crate::homalg::Q;
use crate::Error;

/// Maps P: A → B, I: B → A and H: A → A of degree −1, given on generators.
///
/// Conventions: P∘I = id and I∘P − id = μ¹H + Hμ¹, with μ¹ the arity-one operation of A.
#[derive(Clone, Debug)]
pub struct TransferData {
    pub target_gens: Vec<Generator>,
    pub p: Vec<SparseVec>,
    pub i: Vec<SparseVec>,
    pub h: Vec<SparseVec>,
}

fn compose(outer: &[SparseVec], inner: &[SparseVec]) -> Vec<SparseVec> {
    inner.iter().map(|v| apply_linear(outer, v)).collect()
}

fn mu1(a: &AInftyStructure) -> Vec<SparseVec> {
    (0..a.num_gens()).map(|g| a.apply_basis(&[g])).collect()
}

fn first_nonzero(maps: &[SparseVec]) -> Option<usize> {
    maps.iter().position(|v| !v.is_empty())
}

impl TransferData {
    /// P = I = id, H = 0.
    pub fn identity(a: &AInftyStructure) -> Self {
        let n = a.num_gens();
        let id: Vec<SparseVec> = (0..n).map(unit_vec).collect();
        TransferData { target_gens: a.gens.clone(), p: id.clone(), i: id, h: vec![SparseVec::new(); n] }
    }

    fn check_shapes(&self, a: &AInftyStructure) -> Result<(), Error> {
        let n = a.num_gens();
        let m = self.target_gens.len();
        if self.p.len() != n || self.h.len() != n || self.i.len() != m {
            return Err(Error::Dimension(format!(
                "transfer data sizes P {} I {} H {} for {n} source and {m} target generators",
                self.p.len(),
                self.i.len(),
                self.h.len()
            )));
        }
        let same_hom = |x: &Generator, y: &Generator| x.source == y.source && x.target == y.target;
        for g in 0..n {
            let x = &a.gens[g];
            for &o in self.p[g].keys() {
                let y = self.target_gens.get(o).ok_or_else(|| Error::Dimension("P leaves B".into()))?;
                if !same_hom(x, y) || y.degree != x.degree {
                    return Err(Error::Invalid(format!("P does not preserve hom and degree at {}", x.label)));
                }
            }
            for &o in self.h[g].keys() {
                let y = a.gens.get(o).ok_or_else(|| Error::Dimension("H leaves A".into()))?;
                if !same_hom(x, y) || y.degree != x.degree - 1 {
                    return Err(Error::Invalid(format!("H is not of degree −1 within a hom at {}", x.label)));
                }
            }
        }
        for (b, v) in self.i.iter().enumerate() {
            let x = &self.target_gens[b];
            for &o in v.keys() {
                let y = a.gens.get(o).ok_or_else(|| Error::Dimension("I leaves A".into()))?;
                if !same_hom(x, y) || y.degree != x.degree {
                    return Err(Error::Invalid(format!("I does not preserve hom and degree at {}", x.label)));
                }
            }
        }
        Ok(())
    }

    /// Checks P∘I = id and the homotopy identity, without side conditions.
    pub fn check_homotopy(&self, a: &AInftyStructure) -> Result<(), Error> {
        self.check_shapes(a)?;
        let pi = compose(&self.p, &self.i);
        for (b, v) in pi.iter().enumerate() {
            if *v != unit_vec(b) {
                return Err(Error::Invalid(format!("P∘I ≠ id at {}", self.target_gens[b].label)));
            }
        }
        let d = mu1(a);
        let ip = compose(&self.i, &self.p);
        let dh = compose(&d, &self.h);
        let hd = compose(&self.h, &d);
        for g in 0..a.num_gens() {
            let mut r = ip[g].clone();
            add_into(&mut r, g, &-Q::one());
            for (k, c) in dh[g].iter().chain(hd[g].iter()) {
                add_into(&mut r, *k, &-c);
            }
            if !r.is_empty() {
                return Err(Error::Invalid(format!("I∘P − id ≠ μ¹H + Hμ¹ at {}", a.gens[g].label)));
            }
        }
        Ok(())
    }

    /// Full validation including H∘I = 0, P∘H = 0 and H∘H = 0.
    pub fn validate(&self, a: &AInftyStructure) -> Result<(), Error> {
        self.check_homotopy(a)?;
        if let Some(b) = first_nonzero(&compose(&self.h, &self.i)) {
            return Err(Error::Invalid(format!("side condition H∘I = 0 fails at {}", self.target_gens[b].label)));
        }
        if let Some(g) = first_nonzero(&compose(&self.p, &self.h)) {
            return Err(Error::Invalid(format!("side condition P∘H = 0 fails at {}", a.gens[g].label)));
        }
        if let Some(g) = first_nonzero(&compose(&self.h, &self.h)) {
            return Err(Error::Invalid(format!("side condition H∘H = 0 fails at {}", a.gens[g].label)));
        }
        Ok(())
    }

    /// Replaces H by a homotopy satisfying the side conditions:
    /// H₁ = E H E with E = id − I∘P, then H₂ = −H₁ μ¹ H₁.
    pub fn repaired(&self, a: &AInftyStructure) -> Result<Self, Error> {
        self.check_homotopy(a)?;
        let n = a.num_gens();
        let ip = compose(&self.i, &self.p);
        let e: Vec<SparseVec> = (0..n)
            .map(|g| {
                let mut v = unit_vec(g);
                for (k, c) in &ip[g] {
                    add_into(&mut v, *k, &-c);
                }
                v
            })
            .collect();
        let h1 = compose(&e, &compose(&self.h, &e));
        let d = mu1(a);
        let h2: Vec<SparseVec> =
            compose(&h1, &compose(&d, &h1)).into_iter().map(|v| v.into_iter().map(|(k, c)| (k, -c)).collect()).collect();
        let out = TransferData { h: h2, ..self.clone() };
        out.validate(a)?;
        Ok(out)
    }

    /// Transfer data of an acyclic matching on generators.
    ///
    /// Each pair (x, y) needs y in μ¹(x) with a nonzero coefficient; unmatched generators
    /// form the target basis, in index order.
    pub fn from_matching(a: &AInftyStructure, pairs: &[(usize, usize)]) -> Result<Self, Error> {
        let n = a.num_gens();
        let d = mu1(a);
        let mut up: Vec<Option<(usize, Q)>> = vec![None; n];
        let mut down: Vec<Option<(usize, Q)>> = vec![None; n];
        for &(x, y) in pairs {
            if x >= n || y >= n || up[x].is_some() || down[x].is_some() || up[y].is_some() || down[y].is_some() {
                return Err(Error::Invalid(format!("matching pair ({x}, {y}) is out of range or reuses a generator")));
            }
            let c = d[x].get(&y).cloned().ok_or_else(|| {
                Error::Invalid(format!("{} does not occur in μ¹({})", a.gens[y].label, a.gens[x].label))
            })?;
            up[x] = Some((y, c.clone()));
            down[y] = Some((x, c));
        }
        let critical: Vec<usize> = (0..n).filter(|&g| up[g].is_none() && down[g].is_none()).collect();
        let crit_pos: HashMap<usize, usize> = critical.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        // δ' = μ¹ without the matched entries, h₀(y) = −x / c
        let dprime: Vec<SparseVec> = (0..n)
            .map(|g| {
                let mut v = d[g].clone();
                if let Some((y, _)) = &up[g] {
                    v.remove(y);
                }
                v
            })
            .collect();
        let h0: Vec<SparseVec> = (0..n)
            .map(|g| match &down[g] {
                Some((x, c)) => [(*x, -Q::one() / c)].into_iter().collect(),
                None => SparseVec::new(),
            })
            .collect();
        let series = |start: SparseVec, step: &dyn Fn(&SparseVec) -> SparseVec| -> Result<SparseVec, Error> {
            let mut acc = start.clone();
            let mut cur = start;
            for _ in 0..=n {
                cur = step(&cur);
                if cur.is_empty() {
                    return Ok(acc);
                }
                axpy(&mut acc, &Q::one(), &cur);
            }
            Err(Error::Invalid("matching is not acyclic".into()))
        };
        let h0d = |v: &SparseVec| apply_linear(&h0, &apply_linear(&dprime, v));
        let dh0 = |v: &SparseVec| apply_linear(&dprime, &apply_linear(&h0, v));
        let mut i = Vec::with_capacity(critical.len());
        for &c in &critical {
            i.push(series(unit_vec(c), &h0d)?);
        }
        let mut p = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        for g in 0..n {
            let s = series(unit_vec(g), &dh0)?;
            p.push(s.iter().filter_map(|(k, c)| crit_pos.get(k).map(|&j| (j, c.clone()))).collect());
            h.push(apply_linear(&h0, &s));
        }
        let target_gens = critical.iter().map(|&g| a.gens[g].clone()).collect();
        let t = TransferData { target_gens, p, i, h };
        t.validate(a)?;
        Ok(t)
    }
}

/// Output of the transfer: the structure B on the image of P, functors F: B → A and
/// G: A → B, and the components K of the homotopy between F∘G and id_A.
#[derive(Clone, Debug)]
pub struct Transfer {
    pub b: Arc<AInftyStructure>,
    pub f: AInftyFunctorData,
    pub g: AInftyFunctorData,
    pub homotopy: Vec<BTreeMap<Vec<usize>, SparseVec>>,
}

struct TreeSum<'a> {
    a: &'a AInftyStructure,
    t: &'a TransferData,
    q: HashMap<Vec<usize>, SparseVec>,
}

impl TreeSum<'_> {
    /// Σ_{k ≥ 2} Σ μ_A^k(q(block₁), …, q(block_k)).
    fn vertex_sum(&mut self, key: &[usize]) -> SparseVec {
        let d = key.len();
        let mut out = SparseVec::new();
        for k in 2..=d.min(self.a.top_arity()) {
            if self.a.op(k).is_empty() {
                continue;
            }
            for comp in compositions(d, k) {
                let mut blocks = Vec::with_capacity(k);
                let mut at = 0;
                for len in comp {
                    blocks.push(self.q(&key[at..at + len]));
                    at += len;
                }
                if blocks.iter().any(SparseVec::is_empty) {
                    continue;
                }
                let refs: Vec<&SparseVec> = blocks.iter().collect();
                axpy(&mut out, &Q::one(), &self.a.apply(&refs));
            }
        }
        out
    }

    /// The A-valued tree sum with H at the root: q(y) = I(y), q(key) = H(vertex_sum(key)).
    fn q(&mut self, key: &[usize]) -> SparseVec {
        if key.len() == 1 {
            return self.t.i[key[0]].clone();
        }
        if let Some(v) = self.q.get(key) {
            return v.clone();
        }
        let s = self.vertex_sum(key);
        let v = apply_linear(&self.t.h, &s);
        self.q.insert(key.to_vec(), v.clone());
        v
    }
}

/// Homological perturbation transfer of `a` along `t`.
///
/// B and F are computed through `bound`; G and the homotopy through `functor_bound`
/// (at most `bound`), since they range over tuples of A.
pub fn hpl_transfer(a: &AInftyStructure, t: &TransferData, bound: usize, functor_bound: usize) -> Result<Transfer, Error> {
    t.validate(a)?;
    let bound = bound.max(1);
    let functor_bound = functor_bound.clamp(1, bound);
    let mut b = AInftyStructure::new(a.objects.clone(), t.target_gens.clone(), bound)?;
    for y in 0..b.num_gens() {
        let v = apply_linear(&t.p, &a.apply(&[&t.i[y]]));
        b.set_op(vec![y], v)?;
    }
    let mut sum = TreeSum { a, t, q: HashMap::new() };
    let mut f_entries = Vec::new();
    for d in 2..=bound {
        for key in b.composable_tuples(d) {
            let s = sum.vertex_sum(&key);
            if s.is_empty() {
                continue;
            }
            b.set_op(key.clone(), apply_linear(&t.p, &s))?;
            let fq = apply_linear(&t.h, &s);
            sum.q.insert(key.clone(), fq.clone());
            f_entries.push((key, fq));
        }
    }
    let b = Arc::new(b);
    let a_arc = Arc::new(a.clone());
    let objs: Vec<usize> = (0..a.objects.len()).collect();
    let mut f = AInftyFunctorData::new(b.clone(), a_arc.clone(), objs.clone(), bound)?;
    for y in 0..b.num_gens() {
        f.insert_raw(vec![y], t.i[y].clone());
    }
    for (key, v) in f_entries {
        f.insert_raw(key, v);
    }
    let mut g = AInftyFunctorData::new(a_arc.clone(), b.clone(), objs, functor_bound)?;
    let mut homotopy = vec![BTreeMap::new(); functor_bound];
    for x in 0..a.num_gens() {
        g.insert_raw(vec![x], t.p[x].clone());
        if !t.h[x].is_empty() {
            homotopy[0].insert(vec![x], t.h[x].clone());
        }
    }
    let hmap = |x: usize| t.h[x].clone();
    let ipmap = |x: usize| apply_linear(&t.i, &t.p[x]);
    for d in 2..=functor_bound {
        for key in a.composable_tuples(d) {
            let ht = tensor_homotopy(a, &hmap, &ipmap, &Tensor::word(key.clone()));
            if ht.is_empty() {
                continue;
            }
            let s = perturbation_series(a, &hmap, &ipmap, &ht);
            if s.is_empty() {
                continue;
            }
            g.insert_raw(key.clone(), apply_linear(&t.p, &s));
            let k = apply_linear(&t.h, &s);
            if !k.is_empty() {
                homotopy[d - 1].insert(key, k);
            }
        }
    }
    Ok(Transfer { b, f, g, homotopy })
}

/// B's operations and F's components recomputed from the tensor-coalgebra series
/// p π₁ Σ (δH)ⁿ δ (I y) and h π₁ Σ (δH)ⁿ δ (I y). Used to cross-check the tree sum.
pub fn series_transfer(
    a: &AInftyStructure,
    t: &TransferData,
    bound: usize,
) -> (BTreeMap<Vec<usize>, SparseVec>, BTreeMap<Vec<usize>, SparseVec>) {
    let mut b_ops = BTreeMap::new();
    let mut f_comps = BTreeMap::new();
    let b = AInftyStructure::new(a.objects.clone(), t.target_gens.clone(), bound).expect("objects checked");
    let hmap = |x: usize| t.h[x].clone();
    let ipmap = |x: usize| apply_linear(&t.i, &t.p[x]);
    for d in 2..=bound {
        for key in b.composable_tuples(d) {
            let iy = Tensor::word(key.clone()).map_each(&|y| t.i[y].clone());
            let s = perturbation_series(a, &hmap, &ipmap, &iy);
            let bv = apply_linear(&t.p, &s);
            let fv = apply_linear(&t.h, &s);
            if !bv.is_empty() {
                b_ops.insert(key.clone(), bv);
            }
            if !fv.is_empty() {
                f_comps.insert(key, fv);
            }
        }
    }
    (b_ops, f_comps)
}

impl Transfer {
    /// G∘F = id_B through the functor bound, compared exactly.
    pub fn g_after_f_is_identity(&self) -> Result<bool, Error> {
        let gf = super::compose_functors(&self.f, &self.g)?;
        let id = AInftyFunctorData::identity(self.b.clone());
        Ok(gf.same_components(&id))
    }

    /// Arity-one homotopy identity F¹G¹ − id = μ¹K¹ + K¹μ¹ on A.
    pub fn homotopy_holds_in_arity_one(&self) -> bool {
        let a = &self.f.target;
        (0..a.num_gens()).all(|x| {
            let mut r = apply_linear_fn(&|y| self.f.get(&[y]).cloned().unwrap_or_default(), &self.g.get(&[x]).cloned().unwrap_or_default());
            add_into(&mut r, x, &-Q::one());
            let k = |z: usize| self.homotopy[0].get(&vec![z]).cloned().unwrap_or_default();
            let dk = apply_linear_fn(&|z| a.apply_basis(&[z]), &k(x));
            let kd = apply_linear_fn(&k, &a.apply_basis(&[x]));
            for (g, c) in dk.iter().chain(kd.iter()) {
                add_into(&mut r, *g, &-c);
            }
            r.is_empty()
        })
    }
}

fn apply_linear_fn(f: &dyn Fn(usize) -> SparseVec, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (g, c) in v {
        axpy(&mut out, c, &f(*g));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::{check_functor, simplicial_cochains};

    fn cochains(simplices: &[Vec<usize>]) -> AInftyStructure {
        AInftyStructure::from_dg(&simplicial_cochains(simplices).unwrap(), 6).unwrap()
    }

    fn gen(a: &AInftyStructure, label: &str) -> usize {
        a.gens.iter().position(|g| g.label == label).unwrap()
    }

    fn triangle() -> (AInftyStructure, TransferData) {
        let a = cochains(&[vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 2]]);
        let pairs = [(gen(&a, "1"), gen(&a, "01")), (gen(&a, "2"), gen(&a, "12"))];
        let t = TransferData::from_matching(&a, &pairs).unwrap();
        (a, t)
    }

    #[test]
    fn circle_minimal_model() {
        let (a, t) = triangle();
        let tr = hpl_transfer(&a, &t, 6, 3).unwrap();
        let b = &tr.b;
        assert_eq!(b.num_gens(), 2);
        assert!(b.op(1).is_empty());
        for d in 1..=6 {
            assert!(b.check_relations(d).unwrap().ok, "arity {d}");
        }
        assert_eq!(b.hom_cohomology(0, 0), vec![(0, 1), (1, 1)]);
        assert!(b.cohomological_units());
    }

    #[test]
    fn tree_sum_matches_series() {
        let (a, t) = triangle();
        let tr = hpl_transfer(&a, &t, 5, 2).unwrap();
        let (b_ops, f_comps) = series_transfer(&a, &t, 5);
        for d in 2..=5 {
            let tree: BTreeMap<_, _> = tr.b.op(d).clone();
            let series: BTreeMap<_, _> = b_ops.iter().filter(|(k, _)| k.len() == d).map(|(k, v)| (k.clone(), v.clone())).collect();
            assert_eq!(tree, series, "μ^{d}");
            let ftree = tr.f.component(d).clone();
            let fseries: BTreeMap<_, _> = f_comps.iter().filter(|(k, _)| k.len() == d).map(|(k, v)| (k.clone(), v.clone())).collect();
            assert_eq!(ftree, fseries, "F^{d}");
        }
    }

    #[test]
    fn functors_and_inverse() {
        let (a, t) = triangle();
        let tr = hpl_transfer(&a, &t, 4, 3).unwrap();
        for d in 1..=4 {
            assert!(check_functor(&tr.f, d).unwrap().ok, "F arity {d}");
        }
        for d in 1..=3 {
            assert!(check_functor(&tr.g, d).unwrap().ok, "G arity {d}");
        }
        assert!(tr.g_after_f_is_identity().unwrap());
        assert!(tr.homotopy_holds_in_arity_one());
    }

    #[test]
    fn identity_transfer_is_verbatim() {
        let (a, _) = triangle();
        let tr = hpl_transfer(&a, &TransferData::identity(&a), 6, 2).unwrap();
        assert!(tr.b.same_as(&a));
    }

    #[test]
    fn acyclic_transfers_to_zero() {
        let a = cochains(&[vec![0], vec![1], vec![0, 1]]);
        let mut x = AInftyStructure::new(a.objects.clone(), a.gens.clone(), 6).unwrap();
        // keep only the differential: 0 ↦ ±01, 1 ↦ ±01; cone-like acyclic piece is {1, 01}
        let (v1, e) = (gen(&a, "1"), gen(&a, "01"));
        x.set_op(vec![v1], a.apply_basis(&[v1])).unwrap();
        let t = TransferData::from_matching(&x, &[(v1, e)]).unwrap();
        let tr = hpl_transfer(&x, &t, 6, 2).unwrap();
        assert_eq!(tr.b.num_gens(), 1);
        assert_eq!(tr.b.top_arity(), 0);
    }

    #[test]
    fn interval_is_formal() {
        let a = cochains(&[vec![0], vec![1], vec![0, 1]]);
        let t = TransferData::from_matching(&a, &[(gen(&a, "1"), gen(&a, "01"))]).unwrap();
        let tr = hpl_transfer(&a, &t, 6, 2).unwrap();
        assert_eq!(tr.b.num_gens(), 1);
        for d in 3..=6 {
            assert!(tr.b.op(d).is_empty());
        }
        assert_eq!(tr.b.op(2).len(), 1);
    }

    #[test]
    fn side_conditions_are_enforced_and_repairable() {
        let (a, t) = triangle();
        // add μ¹-exact noise to H: H' = H + μ¹K + Kμ¹-free piece is awkward, so use H + H μ¹ H μ¹-style term
        let mut bad = t.clone();
        let v0 = gen(&a, "0");
        let e02 = gen(&a, "02");
        // H(e02) += v1-like term keeps the homotopy identity only if compensated; instead break H∘I
        bad.h[e02] = [(v0, Q::one())].into_iter().collect();
        assert!(bad.validate(&a).is_err());
        let fixed = TransferData { h: t.h.clone(), ..bad };
        assert!(fixed.validate(&a).is_ok());
        let rep = t.repaired(&a).unwrap();
        assert!(rep.validate(&a).is_ok());
    }
}
