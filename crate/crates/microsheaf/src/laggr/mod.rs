//! Linear Lagrangian planes in T*ℂⁿ = ℝ⁴ⁿ, their squared phases, canonical short paths and
//! intersection degrees.
//!
//! Real coordinates are ordered (q_{x1}, q_{y1}, …, q_{xn}, q_{yn}, p_{x1}, p_{y1}, …, p_{yn}).
//! The flat complex structure pairs each q coordinate with its p partner, so a plane spanned by
//! rows [Q | P] is read as the complex 2n×2n matrix Q + iP.

mod path;

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::Error;

pub use path::{
    intersection_degree, pair_report, short_path_angles, subspace_distance, PairReport, ShortPathAngles,
    DEGREE_ANGLE_FACTOR,
};

/// Isotropy tolerance on pairings of orthonormalized rows.
pub const ISOTROPY_TOL: f64 = 1e-10;
/// Tolerance for comparisons between planes.
pub const COMPARE_TOL: f64 = 1e-8;

pub type C64 = Complex<f64>;

/// A Lagrangian plane of ℝ⁴ⁿ given by 2n spanning rows, with an optional grading.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianPlane {
    pub n: usize,
    pub rows: DMatrix<f64>,
    pub theta: Option<f64>,
}

/// Plane JSON: `{n, rows: [[f64; 4n]; 2n], theta}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlaneJson {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl LagrangianPlane {
    /// Checks shape, independence, isotropy and, when a grading is given, that it lifts the
    /// squared phase.
    pub fn new(n: usize, rows: DMatrix<f64>, theta: Option<f64>) -> Result<Self, Error> {
        if n == 0 || rows.nrows() != 2 * n || rows.ncols() != 4 * n {
            return Err(Error::Dimension(format!(
                "a plane in T*C^{n} needs {}×{} rows, got {}×{}",
                2 * n,
                4 * n,
                rows.nrows(),
                rows.ncols()
            )));
        }
        let l = LagrangianPlane { n, rows, theta };
        let residual = l.isotropy_residual()?;
        if residual >= ISOTROPY_TOL {
            return Err(Error::Invalid(format!("plane is not isotropic: pairing {residual:e}")));
        }
        if let Some(t) = theta {
            let want = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * t);
            let got = l.phase_squared()?;
            if (want - got).norm() >= COMPARE_TOL {
                return Err(Error::Invalid(format!("grading {t} does not lift the squared phase {got}")));
            }
        }
        Ok(l)
    }

    /// Orthonormal basis of the plane as the columns of a 4n×2n matrix.
    pub fn orthonormal_basis(&self) -> Result<DMatrix<f64>, Error> {
        let svd = self.rows.transpose().svd(true, false);
        let max = svd.singular_values.max();
        if svd.singular_values.min() <= 1e-10 * max.max(1.0) {
            return Err(Error::Invalid("rows are linearly dependent".into()));
        }
        Ok(svd.u.expect("requested"))
    }

    /// The orthonormal basis read as a 2n×2n complex matrix, one basis vector per column.
    pub fn complex_frame(&self) -> Result<DMatrix<C64>, Error> {
        let b = self.orthonormal_basis()?;
        let m = 2 * self.n;
        Ok(DMatrix::from_fn(m, m, |j, c| C64::new(b[(j, c)], b[(m + j, c)])))
    }

    /// Largest symplectic pairing between orthonormalized rows.
    pub fn isotropy_residual(&self) -> Result<f64, Error> {
        let b = self.orthonormal_basis()?;
        let m = 2 * self.n;
        let q = b.rows(0, m);
        let p = b.rows(m, m);
        let w = q.transpose() * p - p.transpose() * q;
        Ok(w.amax())
    }

    /// Ω(u₁ ∧ … ∧ u_{2n})² normalized to modulus 1, Ω = ∧(dq + i dp).
    pub fn phase_squared(&self) -> Result<C64, Error> {
        let d = self.complex_frame()?.determinant();
        if d.norm() < 1e-12 {
            return Err(Error::Invalid("degenerate span".into()));
        }
        let u = d / d.norm();
        Ok(u * u)
    }

    pub fn with_theta(self, theta: f64) -> Result<Self, Error> {
        LagrangianPlane::new(self.n, self.rows, Some(theta))
    }

    /// The zero section, grading 0.
    pub fn zero_section(n: usize) -> Result<Self, Error> {
        let mut rows = DMatrix::zeros(2 * n, 4 * n);
        for i in 0..2 * n {
            rows[(i, i)] = 1.0;
        }
        LagrangianPlane::new(n, rows, Some(0.0))
    }

    /// The cotangent fibre spanned by the rows [0 | K], K = diag(1, −1, …), grading 0.
    pub fn fiber(n: usize) -> Result<Self, Error> {
        holomorphic_plane(n, &DMatrix::zeros(0, 0), None)
    }

    /// Tangent plane to the graph of df at a critical point with Hessian `hess` (2n×2n,
    /// symmetric), graded by the lift that is 0 on the zero section.
    pub fn graph(hess: &DMatrix<f64>) -> Result<Self, Error> {
        let m = hess.nrows();
        if m == 0 || m % 2 == 1 || hess.ncols() != m {
            return Err(Error::Dimension("the Hessian must be 2n×2n".into()));
        }
        let mut rows = DMatrix::zeros(m, 2 * m);
        rows.view_mut((0, 0), (m, m)).fill_with_identity();
        rows.view_mut((0, m), (m, m)).copy_from(hess);
        let eig = nalgebra::SymmetricEigen::new(hess.clone());
        let theta = eig.eigenvalues.iter().map(|h| h.atan()).sum::<f64>() / std::f64::consts::PI;
        LagrangianPlane::new(m / 2, rows, Some(theta))
    }

    /// This plane moved by the unitary change of coordinates z ↦ g·z on ℂⁿ; g acts on q and p
    /// through the same real 2n×2n matrix.
    pub fn rotated(&self, g: &DMatrix<C64>) -> Result<Self, Error> {
        if g.nrows() != self.n || g.ncols() != self.n {
            return Err(Error::Dimension("the coordinate change must be n×n".into()));
        }
        let r = realify(g);
        let m = 2 * self.n;
        let mut big = DMatrix::zeros(2 * m, 2 * m);
        big.view_mut((0, 0), (m, m)).copy_from(&r);
        big.view_mut((m, m), (m, m)).copy_from(&r);
        LagrangianPlane::new(self.n, &self.rows * big.transpose(), self.theta)
    }

    pub fn to_json(&self) -> PlaneJson {
        PlaneJson {
            n: self.n,
            rows: self.rows.row_iter().map(|r| r.iter().copied().collect()).collect(),
            theta: self.theta,
        }
    }

    pub fn from_json(j: &PlaneJson) -> Result<Self, Error> {
        let m = 2 * j.n;
        if j.rows.len() != m || j.rows.iter().any(|r| r.len() != 2 * m) {
            return Err(Error::Parse(format!("plane rows must be {m} lists of {} numbers", 2 * m)));
        }
        let rows = DMatrix::from_fn(m, 2 * m, |i, c| j.rows[i][c]);
        LagrangianPlane::new(j.n, rows, j.theta)
    }
}

/// Real 2n×2n matrix of a complex n×n matrix in the (x₁, y₁, …, xₙ, yₙ) ordering.
pub fn realify(g: &DMatrix<C64>) -> DMatrix<f64> {
    let n = g.nrows();
    DMatrix::from_fn(2 * n, 2 * g.ncols(), |r, c| {
        let z = g[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// J_k: k diagonal copies of [[0, −1], [1, 0]].
pub fn j_matrix(k: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        j[(2 * i, 2 * i + 1)] = -1.0;
        j[(2 * i + 1, 2 * i)] = 1.0;
    }
    j
}

/// Real 2k×2k block A of the tangent vectors v_i = ∂_{q_{z^i}} + Σ_μ s_{iμ} ∂_{p_{z^μ}}:
/// for s = a + ib the (i, μ) block is [[a, −b], [−b, −a]]. Symmetric when s is, and AJ = −JA.
pub fn holomorphic_block(s: &DMatrix<C64>) -> DMatrix<f64> {
    DMatrix::from_fn(2 * s.nrows(), 2 * s.ncols(), |r, c| {
        let z = s[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => -z.im,
        }
    })
}

/// The block-form holomorphic plane (I_{2k} 0 | A 0 ; 0 0 | 0 K) with A = holomorphic_block(s),
/// k = size of s, graded 0.
pub fn holomorphic_plane(n: usize, s: &DMatrix<C64>, theta: Option<f64>) -> Result<LagrangianPlane, Error> {
    let k = s.nrows();
    if k > n || s.ncols() != k {
        return Err(Error::Dimension(format!("need a square k×k block with k ≤ {n}")));
    }
    if (s - s.transpose()).iter().any(|z| z.norm() > 1e-12) {
        return Err(Error::Invalid("the block must be symmetric".into()));
    }
    let m = 2 * n;
    let a = holomorphic_block(s);
    let mut rows = DMatrix::zeros(m, 2 * m);
    for r in 0..2 * k {
        rows[(r, r)] = 1.0;
        for c in 0..2 * k {
            rows[(r, m + c)] = a[(r, c)];
        }
    }
    for r in 2 * k..m {
        rows[(r, m + r)] = if (r - 2 * k) % 2 == 0 { 1.0 } else { -1.0 };
    }
    LagrangianPlane::new(n, rows, Some(theta.unwrap_or(0.0)))
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Random complex symmetric k×k matrix.
pub fn random_symmetric(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let mut s = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let z = gaussian(rng);
            s[(i, j)] = z;
            s[(j, i)] = z;
        }
    }
    s
}

/// Haar-random n×n unitary matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let z = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(n, n, |i, j| if i == j { r[(i, i)] / r[(i, i)].norm() } else { C64::new(0.0, 0.0) });
    q * phases
}

/// A random holomorphic Lagrangian plane: the block form with random symmetric s of size k,
/// moved by a random unitary change of coordinates. Graded 0. Requires k ≤ n.
pub fn random_holomorphic_plane(n: usize, k: usize, seed: u64) -> Result<LagrangianPlane, Error> {
    if k > n || n == 0 {
        return Err(Error::Invalid(format!("need 0 ≤ k ≤ n and n ≥ 1, got n = {n}, k = {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_symmetric(k, &mut rng);
    let g = random_unitary(n, &mut rng);
    holomorphic_plane(n, &s, None)?.rotated(&g)
}

/// A transverse pair of random holomorphic planes with block sizes k0 + k1 ≥ n, both graded 0.
/// Non-transverse draws (a null set) are redrawn.
pub fn random_holomorphic_pair(n: usize, seed: u64) -> Result<(LagrangianPlane, LagrangianPlane), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let k0 = rand::Rng::gen_range(&mut rng, 0..=n);
        let k1 = rand::Rng::gen_range(&mut rng, n - k0..=n);
        let l0 = random_holomorphic_plane(n, k0, rand::Rng::gen(&mut rng))?;
        let l1 = random_holomorphic_plane(n, k1, rand::Rng::gen(&mut rng))?;
        if short_path_angles(&l0, &l1).is_ok() {
            return Ok((l0, l1));
        }
    }
}

/// A random ungraded Lagrangian plane: the graph of a random real symmetric matrix, moved by a
/// random orthogonal map of the base. Generically not holomorphic.
pub fn random_lagrangian_plane(n: usize, seed: u64) -> Result<LagrangianPlane, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 2 * n;
    let b = DMatrix::from_fn(m, m, |_, _| StandardNormal.sample(&mut rng));
    let sym: DMatrix<f64> = (&b + b.transpose()) * 0.5;
    let o = DMatrix::from_fn(m, m, |_, _| StandardNormal.sample(&mut rng)).qr().q();
    let mut rows = DMatrix::zeros(m, 2 * m);
    rows.view_mut((0, 0), (m, m)).copy_from(&o);
    rows.view_mut((0, m), (m, m)).copy_from(&(&sym * &o));
    LagrangianPlane::new(n, rows, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_block_is_the_zero_section() {
        let l = holomorphic_plane(1, &DMatrix::zeros(1, 1), None).unwrap();
        assert_eq!(l.rows, LagrangianPlane::zero_section(1).unwrap().rows);
        let ph = l.phase_squared().unwrap();
        assert_abs_diff_eq!(ph.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ph.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn fiber_block_is_k_diagonal() {
        let l = random_holomorphic_plane(1, 0, 3).unwrap();
        let f = LagrangianPlane::fiber(1).unwrap();
        assert_eq!(f.rows.view((0, 2), (2, 2)).clone_owned(), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert!(subspace_distance(&l, &f).unwrap() < 1e-12);
        let ph = f.phase_squared().unwrap();
        assert_abs_diff_eq!(ph.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn random_plane_is_isotropic() {
        let l = random_holomorphic_plane(2, 1, 11).unwrap();
        assert!(l.isotropy_residual().unwrap() < 1e-12);
    }

    #[test]
    fn block_anticommutes_with_j() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=4 {
            let a = holomorphic_block(&random_symmetric(k, &mut rng));
            let j = j_matrix(k);
            assert!((&a * &j + &j * &a).amax() < 1e-12);
            assert!((&a - a.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn non_isotropic_rows_rejected() {
        let rows = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(LagrangianPlane::new(1, rows, None).unwrap_err().to_string().contains("isotropic"));
    }

    #[test]
    fn wrong_grading_rejected() {
        assert!(LagrangianPlane::zero_section(1).unwrap().with_theta(0.5).is_err());
        assert!(LagrangianPlane::zero_section(1).unwrap().with_theta(2.0).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let l = random_holomorphic_plane(2, 2, 1).unwrap();
        let text = serde_json::to_string(&l.to_json()).unwrap();
        let back = LagrangianPlane::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, l);
    }
}
