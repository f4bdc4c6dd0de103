use std::collections::HashMap;
use std::sync::Arc;

use num::Zero;

use super::nerve::{compact_inclusion, compact_sections, restriction, sections, Nerve};
use super::{SheafComplex, SheafMap};
use crate::homalg::{sign, ChainMap, CochainComplex, Matrix, Q};
use crate::stratspace::{CellSet, OpenSet, StratifiedComplex};
use crate::Error;

/// i_*ℚ_U realized strictly: F(σ) = nerve cochains of U ∩ star σ, generizations restrict.
pub fn standard_object(space: &Arc<StratifiedComplex>, u: &OpenSet) -> SheafComplex {
    let constant = SheafComplex::constant(space.clone());
    let local: Vec<CellSet> = (0..space.num_cells())
        .map(|c| space.open_star(c).intersect(u).cells().clone())
        .collect();
    let secs: Vec<_> = local.iter().map(|v| sections(&constant, v)).collect();
    let stalks = secs.iter().map(|s| s.complex.clone()).collect();
    let cov = space
        .incidences()
        .iter()
        .map(|&(t, s, _)| ((s, t), restriction(&secs[s], &secs[t])))
        .collect();
    SheafComplex::new(space.clone(), stalks, cov).expect("restrictions compose")
}

/// i_!ℚ_U: ℚ on the cells of U, zero elsewhere.
pub fn costandard_object(space: &Arc<StratifiedComplex>, u: &OpenSet) -> SheafComplex {
    SheafComplex::skyscraper_on(space.clone(), u.cells()).expect("extension by zero")
}

/// F with every stalk outside `keep` replaced by zero. `keep` must be locally closed.
fn cut_to(f: &SheafComplex, keep: &CellSet) -> SheafComplex {
    let space = f.space_arc().clone();
    let stalks: Vec<CochainComplex> = (0..space.num_cells())
        .map(|c| if keep.contains(&c) { f.stalk(c).clone() } else { CochainComplex::zero() })
        .collect();
    let cov = space
        .incidences()
        .iter()
        .map(|&(t, s, _)| {
            let m = if keep.contains(&s) && keep.contains(&t) {
                f.gen(s, t).clone()
            } else {
                ChainMap::zero(&stalks[s], &stalks[t])
            };
            ((s, t), m)
        })
        .collect();
    SheafComplex::new(space, stalks, cov).expect("restriction to a locally closed set")
}

/// Identity on the cells of `keep`, zero elsewhere.
fn identity_on(a: &SheafComplex, b: &SheafComplex, keep: &CellSet) -> SheafMap {
    let comps = (0..a.space().num_cells())
        .map(|c| {
            if keep.contains(&c) {
                ChainMap::identity(a.stalk(c))
            } else {
                ChainMap::zero(a.stalk(c), b.stalk(c))
            }
        })
        .collect();
    SheafMap::new(a.clone(), b.clone(), comps).expect("identity on a subset is natural")
}

/// A ─f→ B ─g→ C, realized strictly.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub first: SheafComplex,
    pub middle: SheafComplex,
    pub third: SheafComplex,
    pub f: SheafMap,
    pub g: SheafMap,
}

/// For closed Y with open complement U, the triangles
/// j_!j^!F → F → i_*i^*F and i_!i^!F → F → j_*j^*F.
pub fn adjunction_triangles(f: &SheafComplex, y: &CellSet) -> Result<(Triangle, Triangle), Error> {
    let space = f.space_arc().clone();
    if !space.is_closed(y) {
        return Err(Error::Invalid(format!("{:?} is not closed", space.names(y))));
    }
    let u = space.complement(y);
    let ju = cut_to(f, &u);
    let iy = cut_to(f, y);
    let first = Triangle {
        f: identity_on(&ju, f, &u),
        g: identity_on(f, &iy, y),
        first: ju,
        middle: f.clone(),
        third: iy,
    };

    // j_*j^*F(σ) = RΓ(U ∩ star σ, F)
    let local: Vec<CellSet> = (0..space.num_cells())
        .map(|c| space.open_star(c).cells().intersection(&u).copied().collect())
        .collect();
    let secs: Vec<_> = local.iter().map(|v| sections(f, v)).collect();
    let stalks = secs.iter().map(|s| s.complex.clone()).collect();
    let cov = space
        .incidences()
        .iter()
        .map(|&(t, s, _)| ((s, t), restriction(&secs[s], &secs[t])))
        .collect();
    let push = SheafComplex::new(space.clone(), stalks, cov)?;
    let unit_comps = (0..space.num_cells())
        .map(|c| unit_component(f, c, &secs[c]))
        .collect();
    let unit = SheafMap::new(f.clone(), push.clone(), unit_comps)?;
    let fib = unit.fiber();
    let proj_comps = (0..space.num_cells())
        .map(|c| {
            let a = fib.stalk(c);
            let b = f.stalk(c);
            let lo = a.lo().min(b.lo());
            let hi = a.hi().max(b.hi());
            let comps = (lo..=hi)
                .map(|k| {
                    let n = b.dim(k);
                    Matrix::identity(n).hstack(&Matrix::zeros(n, a.dim(k) - n))
                })
                .collect();
            ChainMap::new(a.clone(), b.clone(), lo, comps).expect("projection off the fiber")
        })
        .collect();
    let second = Triangle {
        f: SheafMap::new(fib.clone(), f.clone(), proj_comps)?,
        g: unit,
        first: fib,
        middle: f.clone(),
        third: push,
    };
    Ok((first, second))
}

/// F(σ) → RΓ(V, F), x ↦ (generization of x to each cell of V) on the length-zero chains.
pub(crate) fn unit_component(f: &SheafComplex, sigma: usize, secs: &super::Sections) -> ChainMap {
    let src = f.stalk(sigma);
    let tgt = &secs.complex;
    let lo = src.lo().min(tgt.lo());
    let hi = src.hi().max(tgt.hi());
    let mut comps = Vec::new();
    for k in lo..=hi {
        let mut m = Matrix::zeros(tgt.dim(k), src.dim(k));
        if k >= tgt.lo() && k <= tgt.hi() {
            for (b, off, _) in &secs.blocks[(k - tgt.lo()) as usize] {
                if b.chain.len() == 1 {
                    m.paste(*off, 0, &f.gen(sigma, b.chain[0]).component(k));
                }
            }
        }
        comps.push(m);
    }
    ChainMap::new(src.clone(), tgt.clone(), lo, comps).expect("unit is a chain map")
}

/// (𝔻F)(σ) = RΓ_c(star σ, F)^∨, generizations dual to extension by zero.
pub fn verdier_dual(f: &SheafComplex) -> SheafComplex {
    let space = f.space_arc().clone();
    let secs: Vec<_> = (0..space.num_cells())
        .map(|c| compact_sections(f, space.open_star(c).cells()))
        .collect();
    let stalks = secs.iter().map(|s| s.complex.dual()).collect();
    let cov = space
        .incidences()
        .iter()
        .map(|&(t, s, _)| ((s, t), compact_inclusion(&secs[t], &secs[s]).dual()))
        .collect();
    SheafComplex::new(space, stalks, cov).expect("duals of inclusions compose")
}

/// Hom(i_*ℚ_{U0}, i_*ℚ_{U1}) as relative nerve cochains: functions on chains of U1
/// whose top cell lies in U0.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub u0: OpenSet,
    pub u1: OpenSet,
    pub chains: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    pub complex: CochainComplex,
}

impl HomComplex {
    pub fn position(&self, chain: &[usize]) -> Option<usize> {
        self.index.get(chain.len().checked_sub(1)?)?.get(chain).copied()
    }

    pub fn degree_dim(&self, p: usize) -> usize {
        self.chains.get(p).map_or(0, Vec::len)
    }

    /// The cochain that is 1 on every length-zero chain: the identity when U0 = U1.
    pub fn unit(&self) -> Vec<Q> {
        vec![crate::homalg::q(1); self.degree_dim(0)]
    }
}

pub fn hom_standard(space: &StratifiedComplex, u0: &OpenSet, u1: &OpenSet) -> HomComplex {
    let nerve = Nerve::new(space, u1.cells());
    let chains: Vec<Vec<Vec<usize>>> = nerve
        .chains
        .iter()
        .map(|l| l.iter().filter(|c| u0.contains(*c.last().unwrap())).cloned().collect::<Vec<_>>())
        .collect();
    let mut chains = chains;
    while chains.last().is_some_and(Vec::is_empty) {
        chains.pop();
    }
    let index: Vec<HashMap<Vec<usize>, usize>> = chains
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
        .collect();
    let dims: Vec<usize> = chains.iter().map(Vec::len).collect();
    let mut diffs = Vec::new();
    for p in 0..chains.len().saturating_sub(1) {
        let mut d = Matrix::zeros(dims[p + 1], dims[p]);
        for (r, c) in chains[p + 1].iter().enumerate() {
            for i in 0..c.len() {
                let mut face = c.clone();
                face.remove(i);
                if let Some(&j) = index[p].get(&face) {
                    d.add_at(r, j, &sign(i as i64));
                }
            }
        }
        diffs.push(d);
    }
    let complex = if dims.is_empty() {
        CochainComplex::zero()
    } else {
        CochainComplex::new(0, dims, diffs).expect("relative nerve complex")
    };
    HomComplex { u0: u0.clone(), u1: u1.clone(), chains, index, complex }
}

/// ψ ∘ φ for φ ∈ Hom(U0, U1) of degree `a` and ψ ∈ Hom(U1, U2) of degree `b`:
/// (ψ∘φ)(σ₀…σ_n) = Σ_p ψ(σ₀…σ_p)·φ(σ_p…σ_n), a cup product landing in Hom(U0, U2).
pub fn compose_hom(
    target: &HomComplex,
    psi: (&HomComplex, usize, &[Q]),
    phi: (&HomComplex, usize, &[Q]),
) -> Vec<Q> {
    let (hpsi, b, y) = psi;
    let (hphi, a, x) = phi;
    let n = a + b;
    let mut out = vec![Q::zero(); target.degree_dim(n)];
    if n >= target.chains.len() {
        return out;
    }
    for (r, c) in target.chains[n].iter().enumerate() {
        let Some(i) = hpsi.position(&c[..=b]) else { continue };
        let Some(j) = hphi.position(&c[b..]) else { continue };
        if !y[i].is_zero() && !x[j].is_zero() {
            out[r] += &y[i] * &x[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stratspace::preset;

    fn arc(name: &str) -> Arc<StratifiedComplex> {
        Arc::new(preset(name).unwrap())
    }

    #[test]
    fn constant_sections() {
        let s = arc("interval");
        let f = SheafComplex::constant(s.clone());
        assert_eq!(f.sections(&s.whole()).betti_numbers(), vec![(0, 1)]);
        let c = arc("circle");
        let g = SheafComplex::constant(c.clone());
        assert_eq!(g.sections(&c.whole()).betti_numbers(), vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn standard_on_interior() {
        let s = arc("interval");
        let v = s.open_by_names(&["e"]).unwrap();
        let f = standard_object(&s, &v);
        for c in 0..3 {
            assert_eq!(f.stalk_cohomology(c), vec![(0, 1)]);
        }
        let b = s.cell_index("b").unwrap();
        assert_eq!(f.sections(&s.open_star(b)).betti_numbers(), vec![(0, 1)]);
        assert!(f.costalk(b).is_acyclic());
        let cs = costandard_object(&s, &v);
        assert!(cs.stalk(b).is_acyclic());
    }

    #[test]
    fn standard_on_punctured_p1() {
        let s = arc("p1");
        let u = s.open_by_names(&["e0", "e1", "f+", "f-"]).unwrap();
        let f = standard_object(&s, &u);
        let p0 = s.cell_index("p0").unwrap();
        assert_eq!(f.stalk_cohomology(p0), vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn dual_of_constant_circle() {
        let s = arc("circle");
        let d = verdier_dual(&SheafComplex::constant(s.clone()));
        for c in 0..s.num_cells() {
            assert_eq!(d.stalk_cohomology(c), vec![(-1, 1)]);
        }
        let dd = verdier_dual(&d);
        for c in 0..s.num_cells() {
            assert_eq!(dd.stalk_cohomology(c), vec![(0, 1)]);
        }
    }

    #[test]
    fn hom_examples() {
        let s = arc("interval");
        let x = s.whole();
        let e = s.open_by_names(&["e"]).unwrap();
        assert_eq!(hom_standard(&s, &x, &x).complex.betti_numbers(), vec![(0, 1)]);
        assert_eq!(hom_standard(&s, &x, &e).complex.betti_numbers(), vec![(0, 1)]);
        assert_eq!(hom_standard(&s, &e, &x).complex.betti_numbers(), vec![(1, 1)]);
    }

    #[test]
    fn triangles_on_interval() {
        let s = arc("interval");
        let f = SheafComplex::constant(s.clone());
        let b = s.cell_index("b").unwrap();
        let y: CellSet = [b].into_iter().collect();
        let (t1, t2) = adjunction_triangles(&f, &y).unwrap();
        assert!(t1.first.sections(&s.whole()).is_acyclic());
        let cone = t1.f.cone();
        for c in 0..3 {
            assert_eq!(cone.stalk_cohomology(c), t1.third.stalk_cohomology(c));
        }
        // i^! of the constant sheaf at a boundary point vanishes
        assert!(t2.first.stalk(b).is_acyclic());
    }
}
