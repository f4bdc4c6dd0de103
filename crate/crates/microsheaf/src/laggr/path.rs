use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{LagrangianPlane, C64, COMPARE_TOL};
use crate::Error;

/// Guard band at the ends of (−1/2, 0).
pub const ANGLE_GUARD: f64 = 1e-10;

/// deg = θ₁ − θ₀ + DEGREE_ANGLE_FACTOR · Σα over all 2n angles.
pub const DEGREE_ANGLE_FACTOR: f64 = -2.0;

/// The canonical short path from L0 to L1: L1 is spanned by e^{2πiα_k} v_k for an orthonormal
/// basis v_k of L0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortPathAngles {
    /// Ascending, each in (−1/2, 0).
    pub angles: Vec<f64>,
    /// v_k in ambient coordinates, one per angle.
    pub directions: Vec<Vec<f64>>,
}

impl ShortPathAngles {
    /// Distinct angles with multiplicities, merged within `tol`.
    pub fn multiplicities(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &a in &self.angles {
            match out.last_mut() {
                Some((b, m)) if (a - *b).abs() <= tol => *m += 1,
                _ => out.push((a, 1)),
            }
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.angles.iter().sum()
    }

    /// Largest |α_k + α_{2n−1−k} + 1/2| over the sorted angles: zero when the angles pair up
    /// as (α, −1/2 − α).
    pub fn pairing_defect(&self) -> f64 {
        let m = self.angles.len();
        (0..m).map(|k| (self.angles[k] + self.angles[m - 1 - k] + 0.5).abs()).fold(0.0, f64::max)
    }

    /// Rows spanning the rotated frame; a 2n×4n matrix.
    pub fn rotated_rows(&self) -> DMatrix<f64> {
        let m = self.angles.len();
        let mut rows = DMatrix::zeros(m, 2 * m);
        for (k, (a, v)) in self.angles.iter().zip(&self.directions).enumerate() {
            let rot = C64::from_polar(1.0, 2.0 * PI * a);
            for j in 0..m {
                let z = rot * C64::new(v[j], v[m + j]);
                rows[(k, j)] = z.re;
                rows[(k, m + j)] = z.im;
            }
        }
        rows
    }
}

fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis * basis.transpose()
}

/// Spectral norm of the difference of the orthogonal projectors onto two planes.
pub fn subspace_distance(a: &LagrangianPlane, b: &LagrangianPlane) -> Result<f64, Error> {
    if a.n != b.n {
        return Err(Error::Dimension("planes live in different spaces".into()));
    }
    let d = projector(&a.orthonormal_basis()?) - projector(&b.orthonormal_basis()?);
    Ok(d.svd(false, false).singular_values.max())
}

/// Smallest singular value of the stacked orthonormal bases; zero iff the planes meet.
fn transversality(a: &LagrangianPlane, b: &LagrangianPlane) -> Result<f64, Error> {
    let (ba, bb) = (a.orthonormal_basis()?, b.orthonormal_basis()?);
    let m = ba.ncols();
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    s.view_mut((0, 0), (2 * m, m)).copy_from(&ba);
    s.view_mut((0, m), (2 * m, m)).copy_from(&bb);
    Ok(s.svd(false, false).singular_values.min())
}

/// Canonical short path angles. In the unitary frame of L0, L1 = (X + iY)ℝ²ⁿ and
/// L1 = (A + iI)ℝ²ⁿ with A = XY⁻¹ symmetric; the eigenvectors of A are the v_k and an
/// eigenvalue a gives e^{2πiα} = −(a + i)/|a + i|.
pub fn short_path_angles(l0: &LagrangianPlane, l1: &LagrangianPlane) -> Result<ShortPathAngles, Error> {
    if l0.n != l1.n {
        return Err(Error::Dimension("planes live in different spaces".into()));
    }
    let t = transversality(l0, l1)?;
    if t < COMPARE_TOL {
        return Err(Error::Invalid(format!("planes are not transverse (smallest singular value {t:e})")));
    }
    let z0 = l0.complex_frame()?;
    let z1 = l1.complex_frame()?;
    let w = z0.adjoint() * z1;
    let x = w.map(|z| z.re);
    let y = w.map(|z| z.im);
    let yinv = y.try_inverse().ok_or_else(|| Error::Invalid("planes are not transverse".into()))?;
    let a = &x * &yinv;
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let m = 2 * l0.n;
    let mut pairs = Vec::with_capacity(m);
    for k in 0..m {
        let ev = eig.eigenvalues[k];
        let alpha = 1f64.atan2(ev) / (2.0 * PI) - 0.5;
        if alpha <= -0.5 + ANGLE_GUARD || alpha >= -ANGLE_GUARD {
            return Err(Error::Invalid(format!("angle {alpha} at the end of (−1/2, 0): planes are not transverse")));
        }
        let v = eig.eigenvectors.column(k);
        let c = &z0 * v.map(|r| C64::new(r, 0.0));
        let mut dir: Vec<f64> = c.iter().map(|z| z.re).collect();
        dir.extend(c.iter().map(|z| z.im));
        pairs.push((alpha, dir));
    }
    pairs.sort_by(|p: &(f64, Vec<f64>), q: &(f64, Vec<f64>)| p.0.total_cmp(&q.0));
    let (angles, directions) = pairs.into_iter().unzip();
    Ok(ShortPathAngles { angles, directions })
}

/// θ₁ − θ₀ − 2Σα over the 2n short path angles from L0 to L1.
pub fn intersection_degree(l0: &LagrangianPlane, l1: &LagrangianPlane) -> Result<f64, Error> {
    let (Some(t0), Some(t1)) = (l0.theta, l1.theta) else {
        return Err(Error::Invalid("intersection degree needs graded planes".into()));
    };
    let sp = short_path_angles(l0, l1)?;
    Ok(t1 - t0 + DEGREE_ANGLE_FACTOR * sp.sum())
}

/// Angle table and degree of one pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub n: usize,
    pub angles: Vec<f64>,
    pub angle_sum: f64,
    pub pairing_defect: f64,
    /// Squared phases of L0 and L1 as (re, im).
    pub phases: [(f64, f64); 2],
    pub degree: Option<f64>,
}

pub fn pair_report(l0: &LagrangianPlane, l1: &LagrangianPlane) -> Result<PairReport, Error> {
    let sp = short_path_angles(l0, l1)?;
    let (p0, p1) = (l0.phase_squared()?, l1.phase_squared()?);
    let degree = match (l0.theta, l1.theta) {
        (Some(t0), Some(t1)) => Some(t1 - t0 + DEGREE_ANGLE_FACTOR * sp.sum()),
        _ => None,
    };
    Ok(PairReport {
        n: l0.n,
        angle_sum: sp.sum(),
        pairing_defect: sp.pairing_defect(),
        angles: sp.angles,
        phases: [(p0.re, p0.im), (p1.re, p1.im)],
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laggr::{random_holomorphic_plane, random_lagrangian_plane};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_section_to_fiber() {
        let l0 = LagrangianPlane::zero_section(1).unwrap();
        let l1 = LagrangianPlane::fiber(1).unwrap();
        let sp = short_path_angles(&l0, &l1).unwrap();
        for a in &sp.angles {
            assert_abs_diff_eq!(*a, -0.25, epsilon = 1e-12);
        }
        assert_eq!(sp.multiplicities(1e-9), vec![(sp.angles[0], 2)]);
        assert_abs_diff_eq!(intersection_degree(&l0, &l1).unwrap(), 1.0, epsilon = 1e-12);
        let l1 = l1.with_theta(2.0).unwrap();
        assert_abs_diff_eq!(intersection_degree(&l0, &l1).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_planes_are_not_transverse() {
        let l = random_holomorphic_plane(1, 1, 2).unwrap();
        assert!(short_path_angles(&l, &l).unwrap_err().to_string().contains("transverse"));
    }

    #[test]
    fn ungraded_rejected() {
        let l0 = LagrangianPlane::zero_section(1).unwrap();
        let l1 = random_lagrangian_plane(1, 4).unwrap();
        assert!(intersection_degree(&l0, &l1).unwrap_err().to_string().contains("graded"));
    }

    // Oracle for the normalization: L0 = graph of df at a nondegenerate critical point, L1 =
    // zero section. Solving Morse index = θ₁ − θ₀ + c·Σα for c on random Hessians.
    #[test]
    fn degree_factor_from_morse_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=3 {
            for _ in 0..20 {
                let m = 2 * n;
                let b = DMatrix::<f64>::from_fn(m, m, |_, _| rng.gen_range(-2.0..2.0));
                let h = (&b + b.transpose()) * 0.5;
                let eig = SymmetricEigen::new(h.clone());
                if eig.eigenvalues.iter().any(|e| e.abs() < 1e-3) {
                    continue;
                }
                let index = eig.eigenvalues.iter().filter(|e| **e < 0.0).count() as f64;
                let l0 = LagrangianPlane::graph(&h).unwrap();
                let l1 = LagrangianPlane::zero_section(n).unwrap();
                let sp = short_path_angles(&l0, &l1).unwrap();
                let c = (index - (l1.theta.unwrap() - l0.theta.unwrap())) / sp.sum();
                assert_abs_diff_eq!(c, DEGREE_ANGLE_FACTOR, epsilon = 1e-9);
                assert_abs_diff_eq!(intersection_degree(&l0, &l1).unwrap(), index, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn short_path_reconstructs_target() {
        for seed in 0..10 {
            let l0 = random_holomorphic_plane(2, 1, seed).unwrap();
            let l1 = random_holomorphic_plane(2, 2, seed + 100).unwrap();
            let sp = short_path_angles(&l0, &l1).unwrap();
            let rot = LagrangianPlane::new(2, sp.rotated_rows(), None).unwrap();
            assert!(subspace_distance(&rot, &l1).unwrap() < 1e-8);
            let start = LagrangianPlane::new(2, DMatrix::from_fn(4, 8, |k, j| sp.directions[k][j]), None).unwrap();
            assert!(subspace_distance(&start, &l0).unwrap() < 1e-8);
        }
    }

    #[test]
    fn holomorphic_pairs_sit_in_degree_n() {
        for n in 1..=4 {
            for seed in 0..25 {
                let (l0, l1) = crate::laggr::random_holomorphic_pair(n, seed).unwrap();
                let r = pair_report(&l0, &l1).unwrap();
                assert!(r.pairing_defect < 1e-8, "{r:?}");
                assert_abs_diff_eq!(r.angle_sum, -(n as f64) / 2.0, epsilon = 1e-8);
                assert_abs_diff_eq!(r.degree.unwrap(), n as f64, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn non_holomorphic_plane_has_complex_phase() {
        let ph = random_lagrangian_plane(2, 9).unwrap().phase_squared().unwrap();
        assert!(ph.im.abs() > 1e-3);
    }
}
