//! Test sheaves assembled from shifted standard objects.

use std::sync::Arc;

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::decompose::standard_restriction;
use super::{costandard_object, standard_object, verdier_dual, SheafComplex, SheafMap};
use crate::homalg::{ChainMap, Matrix, Q};
use crate::stratspace::{OpenSet, StratifiedComplex};
use crate::Error;

/// ⊕ S_{U_i}[a_i] for the given (open, shift) terms.
pub fn sum_of_standards(space: &Arc<StratifiedComplex>, terms: &[(OpenSet, i32)]) -> SheafComplex {
    terms.iter().fold(SheafComplex::zero(space.clone()), |acc, (u, a)| {
        acc.direct_sum(&standard_object(space, u).shift(*a))
    })
}

/// The map ⊕ S_{U_i}[a_i] → ⊕ S_{V_j}[b_j] whose (j, i) block is `coeffs[j][i]` times restriction.
/// A nonzero coefficient needs V_j ⊂ U_i and a_i = b_j.
pub fn map_of_standards(
    space: &Arc<StratifiedComplex>,
    sources: &[(OpenSet, i32)],
    targets: &[(OpenSet, i32)],
    coeffs: &[Vec<Q>],
) -> Result<SheafMap, Error> {
    let src = sum_of_standards(space, sources);
    let tgt = sum_of_standards(space, targets);
    let n = space.num_cells();
    let mut blocks: Vec<Vec<Option<SheafMap>>> = vec![vec![None; sources.len()]; targets.len()];
    for (j, (v, b)) in targets.iter().enumerate() {
        for (i, (u, a)) in sources.iter().enumerate() {
            let c = coeffs.get(j).and_then(|r| r.get(i)).cloned().unwrap_or_else(Q::zero);
            if c.is_zero() {
                continue;
            }
            if a != b || !v.cells().is_subset(u.cells()) {
                return Err(Error::Invalid(format!(
                    "no restriction from term {i} to term {j}: needs nested opens and equal shifts"
                )));
            }
            blocks[j][i] = Some(standard_restriction(space, u, v).scale(&c));
        }
    }
    let src_terms: Vec<SheafComplex> = sources.iter().map(|(u, a)| standard_object(space, u).shift(*a)).collect();
    let tgt_terms: Vec<SheafComplex> = targets.iter().map(|(v, b)| standard_object(space, v).shift(*b)).collect();
    let mut comps = Vec::with_capacity(n);
    for x in 0..n {
        let (s, t) = (src.stalk(x), tgt.stalk(x));
        let lo = s.lo().min(t.lo());
        let hi = s.hi().max(t.hi());
        let mats = (lo..=hi)
            .map(|k| {
                let mut m = Matrix::zeros(t.dim(k), s.dim(k));
                let mut r0 = 0;
                for (j, tj) in tgt_terms.iter().enumerate() {
                    let mut c0 = 0;
                    for (i, si) in src_terms.iter().enumerate() {
                        if let Some(f) = &blocks[j][i] {
                            let shift = sources[i].1;
                            m.paste(r0, c0, &f.component(x).component(k + shift));
                        }
                        c0 += si.stalk(x).dim(k);
                    }
                    r0 += tj.stalk(x).dim(k);
                }
                m
            })
            .collect();
        comps.push(ChainMap::new(s.clone(), t.clone(), lo, mats)?);
    }
    SheafMap::new(src, tgt, comps)
}

pub fn cone_of_standards(
    space: &Arc<StratifiedComplex>,
    sources: &[(OpenSet, i32)],
    targets: &[(OpenSet, i32)],
    coeffs: &[Vec<Q>],
) -> Result<SheafComplex, Error> {
    Ok(map_of_standards(space, sources, targets, coeffs)?.cone())
}

/// Named test sheaves on a preset; every entry is constructible and generated by standards.
pub fn corpus(space: &Arc<StratifiedComplex>) -> Vec<(String, SheafComplex)> {
    let complex = space.is_complex_stratified();
    let top = if complex {
        (0..space.strata().len()).filter_map(|a| space.stratum_cx_dim(a)).max().unwrap_or(0)
    } else {
        0
    };
    let cover = space.standard_cover();
    let mut out = vec![
        ("zero".to_string(), SheafComplex::zero(space.clone())),
        ("constant".to_string(), SheafComplex::constant(space.clone()).shift(top)),
    ];
    for (name, u) in &cover {
        out.push((format!("std[{name}]"), standard_object(space, u).shift(top)));
    }
    let whole = space.whole();
    for (name, u) in cover.iter().skip(1) {
        let one = vec![vec![crate::homalg::q(1)]];
        if let Ok(f) = cone_of_standards(space, &[(whole.clone(), top)], &[(u.clone(), top)], &one) {
            out.push((format!("cone[X→{name}]"), f));
        }
    }
    if complex {
        for (name, u) in cover.iter().skip(1) {
            out.push((format!("costd[{name}]"), costandard_object(space, u).shift(top)));
        }
        for st in space.strata() {
            let closed = space.closure(&st.cells) == st.cells;
            if closed && st.cells.len() == 1 {
                if let Ok(f) = SheafComplex::skyscraper_on(space.clone(), &st.cells) {
                    out.push((format!("point[{}]", st.label), f));
                }
            }
        }
        let duals: Vec<(String, SheafComplex)> = out
            .iter()
            .filter(|(n, _)| n.starts_with("std["))
            .map(|(n, f)| (format!("dual {n}"), verdier_dual(f)))
            .collect();
        out.extend(duals);
    }
    out
}

/// A seeded random cone ⊕ S_{U_i}[a_i] → ⊕ S_{V_j}[b_j] over the standard cover. Half the draws
/// put every term at the top complex dimension, the rest shift each term by −1, 0 or 1.
/// Coefficients are small integers on admissible blocks.
pub fn random_sheaf(space: &Arc<StratifiedComplex>, seed: u64) -> Result<SheafComplex, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = (0..space.strata().len()).filter_map(|a| space.stratum_cx_dim(a)).max().unwrap_or(0);
    let cover = space.standard_cover();
    let mixed = rng.gen_bool(0.5);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<(OpenSet, i32)> {
        (0..rng.gen_range(1..=3))
            .map(|_| {
                let a = if mixed { rng.gen_range(-1..=1) } else { 0 };
                (cover[rng.gen_range(0..cover.len())].1.clone(), top + a)
            })
            .collect()
    };
    let sources = draw(&mut rng);
    let targets = draw(&mut rng);
    let coeffs: Vec<Vec<Q>> = targets
        .iter()
        .map(|(v, b)| {
            sources
                .iter()
                .map(|(u, a)| {
                    if a == b && v.cells().is_subset(u.cells()) {
                        Q::from_integer(rng.gen_range(-2..=2).into())
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect();
    cone_of_standards(space, &sources, &targets, &coeffs)
}

/// A corpus entry by name, or `random-SEED` for [`random_sheaf`].
pub fn corpus_entry(space: &Arc<StratifiedComplex>, name: &str) -> Result<SheafComplex, Error> {
    if let Some(seed) = name.strip_prefix("random-") {
        let seed = seed.parse().map_err(|_| Error::Parse(format!("bad seed in {name:?}")))?;
        return random_sheaf(space, seed);
    }
    corpus(space)
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, f)| f)
        .ok_or_else(|| Error::Parse(format!("no corpus entry {name:?}")))
}
