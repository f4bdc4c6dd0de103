//! A∞-categories as finite tensor data.
//!
//! Operations are stored in first-to-last order: the entry under `[a1, …, ad]` is
//! μ^d(a_d, …, a_1), where a_1 is composable first. The identity
//!
//! Σ (−1)^{†_n} μ(a_d, …, μ(a_{n+m}, …, a_{n+1}), a_n, …, a_1) = 0,
//! †_n = |a_1| + ⋯ + |a_n| − n,
//!
//! is checked exactly over ℚ.

mod functor;
mod json;
mod module;
mod presets;
mod tensor;
mod transfer;

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use crate::homalg::{ChainMap, CochainComplex, Matrix, Q};
use crate::Error;

pub use functor::{check_functor, compose_functors, AInftyFunctorData};
pub use json::{AInftyJson, GeneratorJson, OpEntryJson, TransferJson};
pub use module::{module_transfer, AInftyModuleData, ModuleGenerator, ModuleTransfer, ModuleTransferData, STAR};
pub use presets::{
    cochain_model, cochain_preset, element_matching, random_complex, CochainModel, COCHAIN_PRESETS, RANDOM_MAX_SIMPLICES,
};
pub use tensor::Tensor;
pub use transfer::{hpl_transfer, series_transfer, Transfer, TransferData};

/// A sparse vector: basis index → nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Q>;

/// Arity bound used when none is given.
pub const DEFAULT_MAX_ARITY: usize = 6;

/// A basis element of hom(source, target).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub source: usize,
    pub target: usize,
    pub degree: i32,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct AInftyStructure {
    pub objects: Vec<String>,
    pub gens: Vec<Generator>,
    ops: Vec<BTreeMap<Vec<usize>, SparseVec>>,
    pub max_arity: usize,
}

/// Outcome of an exact identity check; `witness` is a basis tuple where it fails.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub arity: usize,
    pub ok: bool,
    pub witness: Option<(Vec<usize>, SparseVec)>,
}

impl RelationReport {
    fn from_residual(arity: usize, residual: BTreeMap<Vec<usize>, SparseVec>) -> Self {
        let witness = residual.into_iter().find(|(_, v)| !v.is_empty());
        RelationReport { arity, ok: witness.is_none(), witness }
    }
}

pub(crate) fn add_into(acc: &mut SparseVec, k: usize, c: &Q) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(k).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&k);
    }
}

pub(crate) fn axpy(acc: &mut SparseVec, c: &Q, v: &SparseVec) {
    for (k, x) in v {
        add_into(acc, *k, &(c * x));
    }
}

/// Evaluates a multilinear table keyed by composable tuples of `gens` on vectors.
pub(crate) fn apply_table(gens: &[Generator], table: &BTreeMap<Vec<usize>, SparseVec>, inputs: &[&SparseVec]) -> SparseVec {
    let mut out = SparseVec::new();
    if table.is_empty() || inputs.iter().any(|v| v.is_empty()) {
        return out;
    }
    let mut key = Vec::with_capacity(inputs.len());
    apply_rec(gens, table, inputs, &mut key, &Q::one(), &mut out);
    out
}

fn apply_rec(
    gens: &[Generator],
    table: &BTreeMap<Vec<usize>, SparseVec>,
    inputs: &[&SparseVec],
    key: &mut Vec<usize>,
    coeff: &Q,
    out: &mut SparseVec,
) {
    let pos = key.len();
    if pos == inputs.len() {
        if let Some(v) = table.get(key) {
            axpy(out, coeff, v);
        }
        return;
    }
    for (&g, c) in inputs[pos] {
        if let Some(&prev) = key.last() {
            if gens[prev].target != gens[g].source {
                continue;
            }
        }
        key.push(g);
        apply_rec(gens, table, inputs, key, &(coeff * c), out);
        key.pop();
    }
}

/// Applies a linear map given on generators.
pub(crate) fn apply_linear(map: &[SparseVec], v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (g, c) in v {
        axpy(&mut out, c, &map[*g]);
    }
    out
}

pub(crate) fn unit_vec(g: usize) -> SparseVec {
    [(g, Q::one())].into_iter().collect()
}

/// Every split of 0..n into k nonempty consecutive blocks, as block lengths.
pub(crate) fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 1..=n.saturating_sub(k - 1) {
            cur.push(first);
            rec(n - first, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && k <= n {
        rec(n, k, &mut Vec::new(), &mut out);
    }
    out
}

pub(crate) fn reduced_sign(gens: &[Generator], prefix: &[usize]) -> bool {
    prefix.iter().map(|&g| gens[g].degree - 1).sum::<i32>().rem_euclid(2) == 1
}

impl AInftyStructure {
    pub fn new(objects: Vec<String>, gens: Vec<Generator>, max_arity: usize) -> Result<Self, Error> {
        for g in &gens {
            if g.source >= objects.len() || g.target >= objects.len() {
                return Err(Error::Invalid(format!("generator {:?} has an unknown object", g.label)));
            }
        }
        Ok(AInftyStructure { objects, gens, ops: vec![BTreeMap::new(); max_arity.max(1)], max_arity: max_arity.max(1) })
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn degree(&self, g: usize) -> i32 {
        self.gens[g].degree
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    /// Generators of hom(x, y), in index order.
    pub fn hom_gens(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.gens.len()).filter(|&g| self.gens[g].source == x && self.gens[g].target == y).collect()
    }

    /// Graded dimensions of hom(x, y).
    pub fn hom_dims(&self, x: usize, y: usize) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for g in self.hom_gens(x, y) {
            *out.entry(self.gens[g].degree).or_insert(0) += 1;
        }
        out
    }

    pub fn composable(&self, key: &[usize]) -> bool {
        key.windows(2).all(|w| self.gens[w[0]].target == self.gens[w[1]].source)
    }

    /// μ^d as stored: keys are composable tuples in first-to-last order.
    pub fn op(&self, d: usize) -> &BTreeMap<Vec<usize>, SparseVec> {
        static EMPTY: std::sync::OnceLock<BTreeMap<Vec<usize>, SparseVec>> = std::sync::OnceLock::new();
        if d == 0 || d > self.ops.len() {
            return EMPTY.get_or_init(BTreeMap::new);
        }
        &self.ops[d - 1]
    }

    /// Largest arity with a nonzero entry.
    pub fn top_arity(&self) -> usize {
        self.ops.iter().rposition(|m| !m.is_empty()).map_or(0, |i| i + 1)
    }

    pub fn set_op(&mut self, key: Vec<usize>, value: SparseVec) -> Result<(), Error> {
        let d = key.len();
        if d == 0 || d > self.max_arity {
            return Err(Error::Invalid(format!("arity {d} outside 1..={}", self.max_arity)));
        }
        if key.iter().any(|&g| g >= self.gens.len()) || !self.composable(&key) {
            return Err(Error::Invalid(format!("{key:?} is not a composable tuple")));
        }
        let src = self.gens[key[0]].source;
        let tgt = self.gens[key[d - 1]].target;
        let deg: i32 = key.iter().map(|&g| self.gens[g].degree).sum::<i32>() + 2 - d as i32;
        for &o in value.keys() {
            let g = self.gens.get(o).ok_or_else(|| Error::Invalid(format!("unknown output {o}")))?;
            if g.source != src || g.target != tgt || g.degree != deg {
                return Err(Error::Invalid(format!("μ^{d}{key:?} has an output of the wrong hom or degree")));
            }
        }
        let value: SparseVec = value.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if value.is_empty() {
            self.ops[d - 1].remove(&key);
        } else {
            self.ops[d - 1].insert(key, value);
        }
        Ok(())
    }

    /// μ^d applied to vectors given first-to-last.
    pub fn apply(&self, inputs: &[&SparseVec]) -> SparseVec {
        apply_table(&self.gens, self.op(inputs.len()), inputs)
    }

    /// μ^d on basis elements.
    pub fn apply_basis(&self, key: &[usize]) -> SparseVec {
        self.op(key.len()).get(key).cloned().unwrap_or_default()
    }

    /// All composable tuples of length d, in lexicographic order.
    pub fn composable_tuples(&self, d: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(d);
        self.tuples_rec(d, &mut cur, &mut out);
        out
    }

    fn tuples_rec(&self, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for g in 0..self.gens.len() {
            if let Some(&p) = cur.last() {
                if self.gens[p].target != self.gens[g].source {
                    continue;
                }
            }
            cur.push(g);
            self.tuples_rec(d, cur, out);
            cur.pop();
        }
    }

    /// The sum of the A∞ identity at arity d, as a sparse tensor over input tuples.
    fn relation_residual(&self, d: usize) -> BTreeMap<Vec<usize>, SparseVec> {
        let mut residual: BTreeMap<Vec<usize>, SparseVec> = BTreeMap::new();
        for m in 1..=d {
            let k = d + 1 - m;
            let inner = self.op(m);
            let outer = self.op(k);
            if inner.is_empty() || outer.is_empty() {
                continue;
            }
            // outer entries indexed by (slot, generator in that slot)
            let mut by_slot: HashMap<(usize, usize), Vec<&Vec<usize>>> = HashMap::new();
            for key in outer.keys() {
                for (n, &g) in key.iter().enumerate() {
                    by_slot.entry((n, g)).or_default().push(key);
                }
            }
            for (ikey, ival) in inner {
                for (&y, c) in ival {
                    for n in 0..k {
                        let Some(keys) = by_slot.get(&(n, y)) else { continue };
                        for okey in keys {
                            let mut full = Vec::with_capacity(d);
                            full.extend_from_slice(&okey[..n]);
                            full.extend_from_slice(ikey);
                            full.extend_from_slice(&okey[n + 1..]);
                            let coeff = if reduced_sign(&self.gens, &okey[..n]) { -c.clone() } else { c.clone() };
                            let acc = residual.entry(full).or_default();
                            axpy(acc, &coeff, &outer[*okey]);
                        }
                    }
                }
            }
        }
        residual.retain(|_, v| !v.is_empty());
        residual
    }

    /// Checks the A∞ identity at arity d on every basis tuple.
    pub fn check_relations(&self, d: usize) -> Result<RelationReport, Error> {
        if d == 0 || d > self.max_arity {
            return Err(Error::Invalid(format!("arity {d} outside 1..={}", self.max_arity)));
        }
        Ok(RelationReport::from_residual(d, self.relation_residual(d)))
    }

    /// Checks arities 1..=d and returns the first failure, if any.
    pub fn check_relations_through(&self, d: usize) -> Result<RelationReport, Error> {
        let mut last = RelationReport { arity: 0, ok: true, witness: None };
        for k in 1..=d {
            last = self.check_relations(k)?;
            if !last.ok {
                return Ok(last);
            }
        }
        Ok(last)
    }

    pub(crate) fn relation_residual_filtered(
        &self,
        d: usize,
        keep: impl Fn(&[usize]) -> bool,
    ) -> RelationReport {
        let mut r = self.relation_residual(d);
        r.retain(|k, _| keep(k));
        RelationReport::from_residual(d, r)
    }

    /// A copy with every operation above arity d dropped and the bound lowered.
    pub fn truncated(&self, d: usize) -> Self {
        let mut out = self.clone();
        out.ops.truncate(d.max(1));
        out.max_arity = d.max(1);
        out
    }

    /// hom(x, y) with differential μ¹, as a cochain complex, plus the generator order
    /// used for each degree.
    pub fn hom_complex(&self, x: usize, y: usize) -> (CochainComplex, BTreeMap<i32, Vec<usize>>) {
        let mut by_deg: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for g in self.hom_gens(x, y) {
            by_deg.entry(self.gens[g].degree).or_default().push(g);
        }
        let Some((&lo, _)) = by_deg.iter().next() else {
            return (CochainComplex::zero(), by_deg);
        };
        let hi = *by_deg.keys().last().unwrap();
        let dims: Vec<usize> = (lo..=hi).map(|k| by_deg.get(&k).map_or(0, Vec::len)).collect();
        let diffs = (lo..hi)
            .map(|k| {
                let src = by_deg.get(&k).cloned().unwrap_or_default();
                let tgt = by_deg.get(&(k + 1)).cloned().unwrap_or_default();
                self.block_matrix(&src, &tgt, |g| self.apply_basis(&[g]))
            })
            .collect();
        let c = CochainComplex::new(lo, dims, diffs).expect("μ¹ squares to zero after a passing arity-2 check");
        (c, by_deg)
    }

    fn block_matrix(&self, src: &[usize], tgt: &[usize], f: impl Fn(usize) -> SparseVec) -> Matrix {
        let pos: HashMap<usize, usize> = tgt.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut m = Matrix::zeros(tgt.len(), src.len());
        for (j, &g) in src.iter().enumerate() {
            for (o, c) in f(g) {
                if let Some(&i) = pos.get(&o) {
                    m.add_at(i, j, &c);
                }
            }
        }
        m
    }

    /// Cohomology dimensions of hom(x, y) under μ¹.
    pub fn hom_cohomology(&self, x: usize, y: usize) -> Vec<(i32, usize)> {
        self.hom_complex(x, y).0.betti_numbers()
    }

    /// The dg data as an A∞ structure: μ¹(a) = (−1)^{|a|} da, μ²(a2, a1) = (−1)^{|a1|} a2·a1.
    pub fn from_dg(dg: &DgData, max_arity: usize) -> Result<Self, Error> {
        let mut a = AInftyStructure::new(dg.objects.clone(), dg.gens.clone(), max_arity.max(2))?;
        for (g, dv) in dg.differential.iter().enumerate() {
            let s = if a.gens[g].degree.rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
            a.set_op(vec![g], dv.iter().map(|(k, c)| (*k, c * &s)).collect())?;
        }
        for (&(a2, a1), v) in &dg.product {
            let s = if a.gens[a1].degree.rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
            a.set_op(vec![a1, a2], v.iter().map(|(k, c)| (*k, c * &s)).collect())?;
        }
        Ok(a)
    }

    /// The structure with the same generators and no operations.
    pub fn zero_like(&self) -> Self {
        AInftyStructure { objects: self.objects.clone(), gens: self.gens.clone(), ops: vec![BTreeMap::new(); self.max_arity], max_arity: self.max_arity }
    }

    /// Exact equality of objects, generators and operations.
    pub fn same_as(&self, other: &Self) -> bool {
        let n = self.ops.len().max(other.ops.len());
        self.objects == other.objects
            && self.gens == other.gens
            && (1..=n).all(|d| self.op(d) == other.op(d))
    }

    /// Checks that cohomology of each hom(x, x) has a unit for the induced product.
    pub fn cohomological_units(&self) -> bool {
        (0..self.objects.len()).all(|x| self.has_cohomological_unit(x))
    }

    fn has_cohomological_unit(&self, x: usize) -> bool {
        let (c, by_deg) = self.hom_complex(x, x);
        if c.is_zero_object() {
            return true;
        }
        let coh = c.cohomology();
        let Some(h0) = coh.group(0) else { return false };
        if h0.dim() == 0 {
            return c.is_acyclic();
        }
        let g0 = by_deg.get(&0).cloned().unwrap_or_default();
        let to_vec = |col: &[Q], gs: &[usize]| -> SparseVec {
            gs.iter().zip(col).filter(|(_, c)| !c.is_zero()).map(|(&g, c)| (g, c.clone())).collect()
        };
        // candidate unit e = Σ λ_j r_j over H⁰ representatives; solve e·r = ±r on every class
        let reps0: Vec<SparseVec> = (0..h0.dim())
            .map(|j| to_vec(&h0.representatives.column(j), &g0))
            .collect();
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut rhs: Vec<Q> = Vec::new();
        for k in c.degrees() {
            let Some(hk) = coh.group(k) else { continue };
            if hk.dim() == 0 {
                continue;
            }
            let gk = by_deg.get(&k).cloned().unwrap_or_default();
            let fun = hk.class_functional();
            for j in 0..hk.dim() {
                let r = to_vec(&hk.representatives.column(j), &gk);
                // [e][r] = (−1)^{|r|} μ²(e, r) and [r][e] = μ²(r, e) must both equal [r]
                for left in [true, false] {
                    let images: Vec<SparseVec> = reps0
                        .iter()
                        .map(|e| if left { self.apply(&[&r, e]) } else { self.apply(&[e, &r]) })
                        .collect();
                    let sign = if !left || k.rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
                    for t in 0..hk.dim() {
                        let mut row = Vec::with_capacity(reps0.len());
                        for img in &images {
                            let col: Vec<Q> = gk.iter().map(|g| img.get(g).cloned().unwrap_or_else(Q::zero)).collect();
                            let mut v = Q::zero();
                            for (a, b) in fun.row(t).iter().zip(&col) {
                                v += a * b;
                            }
                            row.push(v);
                        }
                        rows.push(row);
                        rhs.push(if t == j { sign.clone() } else { Q::zero() });
                    }
                }
            }
        }
        let m = Matrix::from_rows(&rows);
        let b = Matrix::column_vector(&rhs);
        m.solve(&b).is_some()
    }

    /// The chain map hom_A(x, y) → hom_B(x, y) of a linear map given on generators.
    pub(crate) fn linear_chain_map(
        &self,
        target: &AInftyStructure,
        x: usize,
        y: usize,
        f: impl Fn(usize) -> SparseVec,
    ) -> Result<ChainMap, Error> {
        let (cs, gs) = self.hom_complex(x, y);
        let (ct, gt) = target.hom_complex(x, y);
        let lo = cs.lo().min(ct.lo());
        let hi = cs.hi().max(ct.hi());
        let comps = (lo..=hi)
            .map(|k| {
                let src = gs.get(&k).cloned().unwrap_or_default();
                let tgt = gt.get(&k).cloned().unwrap_or_default();
                self.block_matrix(&src, &tgt, &f)
            })
            .collect();
        ChainMap::new(cs, ct, lo, comps)
    }
}

/// A dg category on a finite basis: the differential per generator and the products
/// `product[(a2, a1)] = a2·a1` (a1 composed first).
#[derive(Clone, Debug, Default)]
pub struct DgData {
    pub objects: Vec<String>,
    pub gens: Vec<Generator>,
    pub differential: Vec<SparseVec>,
    pub product: BTreeMap<(usize, usize), SparseVec>,
}

/// Sorted, deduplicated simplices in generator order: by dimension, then lexicographically.
pub(crate) fn normalized_simplices(simplices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut simplices: Vec<Vec<usize>> = simplices.to_vec();
    for s in &mut simplices {
        s.sort_unstable();
        s.dedup();
    }
    simplices.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    simplices.dedup();
    simplices
}

/// Simplicial cochains of an ordered simplicial complex with the cup product,
/// as a one-object dg algebra. Simplices are increasing vertex lists, closed under faces.
pub fn simplicial_cochains(simplices: &[Vec<usize>]) -> Result<DgData, Error> {
    let simplices = normalized_simplices(simplices);
    let index: HashMap<Vec<usize>, usize> = simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    for s in &simplices {
        if s.len() > 1 {
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                if !index.contains_key(&f) {
                    return Err(Error::Invalid(format!("face {f:?} of {s:?} is missing")));
                }
            }
        }
    }
    let gens: Vec<Generator> = simplices
        .iter()
        .map(|s| Generator {
            source: 0,
            target: 0,
            degree: s.len() as i32 - 1,
            label: s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""),
        })
        .collect();
    let mut differential = vec![SparseVec::new(); simplices.len()];
    for (t, s) in simplices.iter().enumerate() {
        for i in 0..s.len() {
            if s.len() < 2 {
                break;
            }
            let mut f = s.clone();
            f.remove(i);
            let c = crate::homalg::sign(i as i64);
            add_into(&mut differential[index[&f]], t, &c);
        }
    }
    let mut product = BTreeMap::new();
    for (t, s) in simplices.iter().enumerate() {
        for p in 0..s.len() {
            let front = index[&s[..=p].to_vec()];
            let back = index[&s[p..].to_vec()];
            let e: &mut SparseVec = product.entry((front, back)).or_default();
            add_into(e, t, &Q::one());
        }
    }
    Ok(DgData { objects: vec!["pt".into()], gens, differential, product })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn hollow_triangle() -> AInftyStructure {
        let dg = simplicial_cochains(&[vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        AInftyStructure::from_dg(&dg, 6).unwrap()
    }

    #[test]
    fn dg_cochains_satisfy_relations() {
        let a = hollow_triangle();
        for d in 1..=6 {
            assert!(a.check_relations(d).unwrap().ok, "arity {d}");
        }
        assert_eq!(a.hom_cohomology(0, 0), vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn corrupted_sign_fails_at_three() {
        let mut a = hollow_triangle();
        let (key, val) = a.op(2).iter().find(|(k, _)| a.degree(k[0]) == 0 && a.degree(k[1]) == 1).map(|(k, v)| (k.clone(), v.clone())).unwrap();
        let flipped = val.iter().map(|(g, c)| (*g, -c)).collect();
        a.set_op(key, flipped).unwrap();
        assert!(a.check_relations(1).unwrap().ok);
        let r2 = a.check_relations(2).unwrap();
        let r3 = a.check_relations(3).unwrap();
        assert!(!r2.ok || !r3.ok);
        assert!(!r3.ok);
        assert!(r3.witness.is_some());
    }

    #[test]
    fn cochain_unit() {
        assert!(hollow_triangle().cohomological_units());
    }

    #[test]
    fn wrong_degree_rejected() {
        let mut a = hollow_triangle();
        let bad: SparseVec = [(0, Q::one())].into_iter().collect();
        assert!(a.set_op(vec![0, 0], [(3, Q::one())].into_iter().collect()).is_err());
        assert!(a.set_op(vec![0], bad).is_err());
    }
}
