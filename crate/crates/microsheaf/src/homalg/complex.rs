use serde::{Deserialize, Serialize};

use super::matrix::{parse_q, sign, Matrix, Q};
use crate::Error;

/// Bounded cochain complex of finite-dimensional rational vector spaces.
///
/// `diffs[i]` is the differential out of degree `lo + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    lo: i32,
    dims: Vec<usize>,
    diffs: Vec<Matrix>,
}

impl CochainComplex {
    pub fn new(lo: i32, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Self, Error> {
        if diffs.len() != dims.len().saturating_sub(1) {
            return Err(Error::Dimension(format!(
                "{} differentials for {} degrees",
                diffs.len(),
                dims.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.shape() != (dims[i + 1], dims[i]) {
                return Err(Error::Dimension(format!(
                    "d^{} has shape {:?}, expected {:?}",
                    lo + i as i32,
                    d.shape(),
                    (dims[i + 1], dims[i])
                )));
            }
        }
        for i in 1..diffs.len() {
            if !(&diffs[i] * &diffs[i - 1]).is_zero() {
                return Err(Error::NotAComplex(lo + i as i32 - 1));
            }
        }
        Ok(CochainComplex { lo, dims, diffs })
    }

    pub fn zero() -> Self {
        CochainComplex { lo: 0, dims: vec![], diffs: vec![] }
    }

    /// ℚ^dim placed in a single degree.
    pub fn concentrated(degree: i32, dim: usize) -> Self {
        CochainComplex { lo: degree, dims: vec![dim], diffs: vec![] }
    }

    /// Two-term complex `a --f--> b` in degrees `degree`, `degree + 1`.
    pub fn two_term(degree: i32, f: Matrix) -> Self {
        CochainComplex { lo: degree, dims: vec![f.cols(), f.rows()], diffs: vec![f] }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Top degree; `lo - 1` for the empty range.
    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, k: i32) -> usize {
        if k < self.lo || k > self.hi() {
            0
        } else {
            self.dims[(k - self.lo) as usize]
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// d^k : C^k → C^{k+1}, zero outside the stored range.
    pub fn d(&self, k: i32) -> Matrix {
        if k >= self.lo && k < self.hi() {
            self.diffs[(k - self.lo) as usize].clone()
        } else {
            Matrix::zeros(self.dim(k + 1), self.dim(k))
        }
    }

    pub fn d_ref(&self, k: i32) -> Option<&Matrix> {
        if k >= self.lo && k < self.hi() {
            Some(&self.diffs[(k - self.lo) as usize])
        } else {
            None
        }
    }

    pub fn is_zero_object(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Same complex over the degree range `lo..=hi`, which must contain every nonzero degree.
    pub fn extended(&self, lo: i32, hi: i32) -> Self {
        for k in self.degrees() {
            assert!(self.dim(k) == 0 || (lo <= k && k <= hi), "extension drops degree {k}");
        }
        let dims: Vec<usize> = (lo..=hi).map(|k| self.dim(k)).collect();
        let diffs = (lo..hi).map(|k| self.d(k)).collect();
        CochainComplex { lo, dims, diffs }
    }

    /// Drops zero spaces at both ends.
    pub fn trimmed(&self) -> Self {
        let nz: Vec<i32> = self.degrees().filter(|&k| self.dim(k) > 0).collect();
        match (nz.first(), nz.last()) {
            (Some(&a), Some(&b)) => self.extended(a, b),
            _ => Self::zero(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees()
            .map(|k| if k.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(k) as i64)
            .sum()
    }

    pub fn cohomology(&self) -> Cohomology {
        let groups = self.degrees().map(|k| CohomologyGroup::compute(self, k)).collect();
        Cohomology { lo: self.lo, groups }
    }

    /// dim H^k only, without representatives.
    pub fn betti(&self, k: i32) -> usize {
        let n = self.dim(k);
        if n == 0 {
            return 0;
        }
        let rk_out = self.d_ref(k).map_or(0, Matrix::rank);
        let rk_in = self.d_ref(k - 1).map_or(0, Matrix::rank);
        n - rk_out - rk_in
    }

    /// `(degree, dim H)` for every degree in range.
    pub fn betti_numbers(&self) -> Vec<(i32, usize)> {
        let ranks: Vec<usize> = self.diffs.iter().map(Matrix::rank).collect();
        self.degrees()
            .map(|k| {
                let i = (k - self.lo) as usize;
                let out = ranks.get(i).copied().unwrap_or(0);
                let inn = if i > 0 { ranks[i - 1] } else { 0 };
                (k, self.dims[i] - out - inn)
            })
            .filter(|&(_, b)| b > 0)
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.betti_numbers().is_empty()
    }

    /// c[n]^k = c^{k+n}, differential (−1)^n d.
    pub fn shift(&self, n: i32) -> Self {
        let s = sign(n as i64);
        CochainComplex {
            lo: self.lo - n,
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&s)).collect(),
        }
    }

    /// (C^∨)^k = (C^{−k})^* with transposed differentials.
    pub fn dual(&self) -> Self {
        let mut dims = self.dims.clone();
        dims.reverse();
        let diffs = self.diffs.iter().rev().map(Matrix::transpose).collect();
        CochainComplex { lo: -self.hi(), dims, diffs }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        if self.dims.is_empty() {
            return other.clone();
        }
        if other.dims.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let dims = (lo..=hi).map(|k| self.dim(k) + other.dim(k)).collect();
        let diffs = (lo..hi)
            .map(|k| Matrix::direct_sum(&self.d(k), &other.d(k)))
            .collect();
        CochainComplex { lo, dims, diffs }
    }

    /// Smart truncation τ≤k: keeps C^j for j < k and ker d^k in degree k.
    pub fn truncate_leq(&self, k: i32) -> Self {
        if k < self.lo {
            return Self::zero();
        }
        if k >= self.hi() {
            return self.clone();
        }
        let kernel = self.d(k).kernel();
        let mut dims: Vec<usize> = (self.lo..k).map(|j| self.dim(j)).collect();
        dims.push(kernel.cols());
        let mut diffs: Vec<Matrix> = (self.lo..k - 1).map(|j| self.d(j)).collect();
        if k > self.lo {
            let into = kernel.solve(&self.d(k - 1)).expect("image lies in kernel");
            diffs.push(into);
        }
        CochainComplex { lo: self.lo, dims, diffs }
    }

    /// Smart truncation τ≥k: keeps coker d^{k−1} in degree k and C^j for j > k.
    pub fn truncate_geq(&self, k: i32) -> Self {
        if k <= self.lo {
            return self.clone();
        }
        if k > self.hi() {
            return Self::zero();
        }
        let n = self.dim(k);
        let image = self.d(k - 1).image();
        let keep = Matrix::complement_columns(&image, &Matrix::identity(n));
        let section = Matrix::identity(n).select_columns(&keep);
        let mut dims = vec![keep.len()];
        dims.extend((k + 1..=self.hi()).map(|j| self.dim(j)));
        let mut diffs = Vec::new();
        if k < self.hi() {
            diffs.push(&self.d(k) * &section);
        }
        diffs.extend((k + 1..self.hi()).map(|j| self.d(j)));
        CochainComplex { lo: k, dims, diffs }
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            degrees: [self.lo, self.hi()],
            dims: self.dims.clone(),
            diffs: self.diffs.iter().map(Matrix::to_strings).collect(),
        }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Self, Error> {
        let [lo, hi] = j.degrees;
        if (hi - lo + 1).max(0) as usize != j.dims.len() {
            return Err(Error::Dimension(format!(
                "degrees [{lo}, {hi}] but {} dims",
                j.dims.len()
            )));
        }
        if j.diffs.len() != j.dims.len().saturating_sub(1) {
            return Err(Error::Dimension("wrong number of differentials".into()));
        }
        let mut diffs = Vec::new();
        for (i, raw) in j.diffs.iter().enumerate() {
            let data = raw.iter().map(|s| parse_q(s)).collect::<Result<Vec<Q>, _>>()?;
            diffs.push(Matrix::from_vec(j.dims[i + 1], j.dims[i], data)?);
        }
        Self::new(lo, j.dims.clone(), diffs)
    }
}

/// Wire format of a complex.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexJson {
    pub degrees: [i32; 2],
    pub dims: Vec<usize>,
    pub diffs: Vec<Vec<String>>,
}

/// H^k with a basis of representative cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub degree: i32,
    /// Columns are cocycles whose classes form a basis of H^k.
    pub representatives: Matrix,
    boundaries: Matrix,
}

impl CohomologyGroup {
    fn compute(c: &CochainComplex, k: i32) -> Self {
        let n = c.dim(k);
        let cycles = match c.d_ref(k) {
            Some(d) => d.kernel(),
            None => Matrix::identity(n),
        };
        let boundaries = match c.d_ref(k - 1) {
            Some(d) => d.image(),
            None => Matrix::zeros(n, 0),
        };
        let keep = Matrix::complement_columns(&boundaries, &cycles);
        CohomologyGroup { degree: k, representatives: cycles.select_columns(&keep), boundaries }
    }

    pub fn dim(&self) -> usize {
        self.representatives.cols()
    }

    /// Coordinates of the class of the cocycle `z` in the representative basis.
    pub fn class_of(&self, z: &Matrix) -> Option<Matrix> {
        let basis = self.boundaries.hstack(&self.representatives);
        let x = basis.solve(z)?;
        let b = self.boundaries.cols();
        Some(x.submatrix(b, self.dim(), 0, z.cols()))
    }

    /// A matrix L with L·z equal to the class coordinates of every cocycle z.
    pub fn class_functional(&self) -> Matrix {
        let basis = self.boundaries.hstack(&self.representatives);
        let b = self.boundaries.cols();
        let rhs = Matrix::zeros(b, self.dim()).vstack(&Matrix::identity(self.dim()));
        basis.transpose().solve(&rhs).expect("independent columns").transpose()
    }
}

#[derive(Clone, Debug)]
pub struct Cohomology {
    lo: i32,
    groups: Vec<CohomologyGroup>,
}

impl Cohomology {
    pub fn group(&self, k: i32) -> Option<&CohomologyGroup> {
        if k < self.lo {
            return None;
        }
        self.groups.get((k - self.lo) as usize)
    }

    pub fn dim(&self, k: i32) -> usize {
        self.group(k).map_or(0, CohomologyGroup::dim)
    }

    pub fn groups(&self) -> &[CohomologyGroup] {
        &self.groups
    }

    /// Nonzero `(degree, dim)` pairs.
    pub fn dims(&self) -> Vec<(i32, usize)> {
        self.groups
            .iter()
            .filter(|g| g.dim() > 0)
            .map(|g| (g.degree, g.dim()))
            .collect()
    }
}

/// Degree-preserving map of complexes; `comps[i]` acts in degree `lo + i`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: CochainComplex,
    pub target: CochainComplex,
    lo: i32,
    comps: Vec<Matrix>,
}

impl ChainMap {
    /// Components are given for degrees `lo..lo + comps.len()`; other degrees are zero.
    pub fn new(
        source: CochainComplex,
        target: CochainComplex,
        lo: i32,
        comps: Vec<Matrix>,
    ) -> Result<Self, Error> {
        for (i, f) in comps.iter().enumerate() {
            let k = lo + i as i32;
            if f.shape() != (target.dim(k), source.dim(k)) {
                return Err(Error::Dimension(format!(
                    "component in degree {k} has shape {:?}, expected {:?}",
                    f.shape(),
                    (target.dim(k), source.dim(k))
                )));
            }
        }
        let m = ChainMap { source, target, lo, comps };
        let a = m.source.lo().min(m.target.lo()) - 1;
        let b = m.source.hi().max(m.target.hi()) + 1;
        for k in a..=b {
            let lhs = &m.target.d(k) * &m.component(k);
            let rhs = &m.component(k + 1) * &m.source.d(k);
            if lhs != rhs {
                return Err(Error::NotChainMap(k));
            }
        }
        Ok(m)
    }

    pub fn identity(c: &CochainComplex) -> Self {
        let comps = c.degrees().map(|k| Matrix::identity(c.dim(k))).collect();
        ChainMap { source: c.clone(), target: c.clone(), lo: c.lo(), comps }
    }

    pub fn zero(source: &CochainComplex, target: &CochainComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), lo: 0, comps: vec![] }
    }

    pub fn component(&self, k: i32) -> Matrix {
        let i = k - self.lo;
        if i >= 0 && (i as usize) < self.comps.len() {
            self.comps[i as usize].clone()
        } else {
            Matrix::zeros(self.target.dim(k), self.source.dim(k))
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap, Error> {
        let lo = self.source.lo().min(other.target.lo());
        let hi = self.source.hi().max(other.target.hi());
        let comps = (lo..=hi).map(|k| &other.component(k) * &self.component(k)).collect();
        ChainMap::new(self.source.clone(), other.target.clone(), lo, comps)
    }

    /// Matrix of H^k(f) in the representative bases of source and target.
    pub fn on_cohomology(&self, k: i32, hs: &Cohomology, ht: &Cohomology) -> Matrix {
        let (Some(gs), Some(gt)) = (hs.group(k), ht.group(k)) else {
            return Matrix::zeros(ht.dim(k), hs.dim(k));
        };
        let images = &self.component(k) * &gs.representatives;
        gt.class_of(&images).expect("image of a cocycle is a cocycle")
    }

    pub fn is_quasi_isomorphism(&self) -> bool {
        self.cone().is_acyclic()
    }

    /// C(f)^k = src^{k+1} ⊕ tgt^k with differential [[−d_s, 0], [f, d_t]].
    pub fn cone(&self) -> CochainComplex {
        let (s, t) = (&self.source, &self.target);
        if s.dims.is_empty() {
            return t.clone();
        }
        let lo = if t.dims.is_empty() { s.lo() - 1 } else { (s.lo() - 1).min(t.lo()) };
        let hi = if t.dims.is_empty() { s.hi() - 1 } else { (s.hi() - 1).max(t.hi()) };
        let dims = (lo..=hi).map(|k| s.dim(k + 1) + t.dim(k)).collect();
        let diffs = (lo..hi)
            .map(|k| {
                Matrix::block(
                    &-&s.d(k + 1),
                    &Matrix::zeros(s.dim(k + 2), t.dim(k)),
                    &self.component(k + 1),
                    &t.d(k),
                )
            })
            .collect();
        CochainComplex { lo, dims, diffs }
    }

    /// Transpose map dual(target) → dual(source), (f^∨)^k = (f^{−k})^T.
    pub fn dual(&self) -> ChainMap {
        let s = self.target.dual();
        let t = self.source.dual();
        let lo = s.lo().min(t.lo());
        let hi = s.hi().max(t.hi());
        let comps = (lo..=hi).map(|k| self.component(-k).transpose()).collect();
        ChainMap { source: s, target: t, lo, comps }
    }

    /// fib(f) = C(f)[−1].
    pub fn fiber(&self) -> CochainComplex {
        self.cone().shift(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::matrix::q;

    fn hollow_triangle() -> CochainComplex {
        // vertices 0,1,2; edges 01, 02, 12; δ(v)(e) = [e ends at v] − [e starts at v]
        let d0 = Matrix::from_i64(3, 3, &[-1, 1, 0, -1, 0, 1, 0, -1, 1]);
        CochainComplex::new(0, vec![3, 3], vec![d0]).unwrap()
    }

    #[test]
    fn zero_complex_is_acyclic() {
        assert!(CochainComplex::zero().is_acyclic());
        assert!(CochainComplex::concentrated(0, 0).cohomology().dims().is_empty());
    }

    #[test]
    fn identity_two_term_is_acyclic() {
        let c = CochainComplex::two_term(0, Matrix::identity(1));
        assert!(c.is_acyclic());
    }

    #[test]
    fn hollow_triangle_cohomology() {
        let h = hollow_triangle().cohomology();
        assert_eq!(h.dims(), vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn rejects_non_complex() {
        let d = Matrix::identity(1);
        let err = CochainComplex::new(0, vec![1, 1, 1], vec![d.clone(), d]).unwrap_err();
        assert!(matches!(err, Error::NotAComplex(0)));
    }

    #[test]
    fn cone_of_identity_and_zero() {
        let c = hollow_triangle();
        assert!(ChainMap::identity(&c).cone().is_acyclic());
        let q0 = CochainComplex::concentrated(0, 1);
        let z = ChainMap::zero(&q0, &q0);
        assert_eq!(z.cone().betti_numbers(), vec![(-1, 1), (0, 1)]);
    }

    #[test]
    fn truncations() {
        let c = hollow_triangle();
        assert_eq!(c.truncate_leq(0).betti_numbers(), vec![(0, 1)]);
        assert_eq!(c.truncate_geq(1).betti_numbers(), vec![(1, 1)]);
        assert_eq!(c.truncate_geq(1).dims(), &[1]);
    }

    #[test]
    fn shift_and_dual() {
        let c = hollow_triangle();
        assert_eq!(c.shift(1).betti_numbers(), vec![(-1, 1), (0, 1)]);
        assert_eq!(c.shift(3).shift(-3), c);
        assert_eq!(c.dual().betti_numbers(), vec![(-1, 1), (0, 1)]);
        assert_eq!(c.dual().dual(), c);
    }

    #[test]
    fn json_round_trip() {
        let c = hollow_triangle().shift(2);
        let j = serde_json::to_string(&c.to_json()).unwrap();
        let back: ComplexJson = serde_json::from_str(&j).unwrap();
        assert_eq!(CochainComplex::from_json(&back).unwrap(), c);
    }

    #[test]
    fn induced_map_coordinates() {
        let c = hollow_triangle();
        let h = c.cohomology();
        let f = ChainMap::identity(&c);
        assert_eq!(f.on_cohomology(1, &h, &h), Matrix::identity(1));
        let two = ChainMap::new(
            c.clone(),
            c.clone(),
            0,
            vec![Matrix::identity(3).scale(&q(2)), Matrix::identity(3).scale(&q(2))],
        )
        .unwrap();
        assert_eq!(two.on_cohomology(0, &h, &h), Matrix::from_i64(1, 1, &[2]));
    }
}
