use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{normalized_simplices, simplicial_cochains, AInftyStructure, TransferData, DEFAULT_MAX_ARITY};
use crate::Error;

/// Named simplicial models: an edge, the boundary of a triangle, the boundary of a tetrahedron.
pub const COCHAIN_PRESETS: [&str; 3] = ["interval", "circle", "s2"];

/// Cochain algebra of a simplicial complex with its element matching.
#[derive(Clone, Debug)]
pub struct CochainModel {
    pub simplices: Vec<Vec<usize>>,
    pub dg: AInftyStructure,
    pub pairs: Vec<(usize, usize)>,
    pub transfer: TransferData,
}

fn faces_of(top: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for t in top {
        for mask in 1u32..(1 << t.len()) {
            out.push(t.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).collect());
        }
    }
    normalized_simplices(&out)
}

/// Largest random complex, in simplices.
pub const RANDOM_MAX_SIMPLICES: usize = 12;

/// A preset by name, or `random-SEED` for [`random_complex`].
pub fn cochain_preset(name: &str) -> Result<Vec<Vec<usize>>, Error> {
    if let Some(seed) = name.strip_prefix("random-") {
        let seed = seed.parse().map_err(|_| Error::Parse(format!("bad seed in {name:?}")))?;
        return Ok(random_complex(seed));
    }
    let top: Vec<Vec<usize>> = match name {
        "interval" => vec![vec![0, 1]],
        "circle" => vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        "s2" => vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        other => return Err(Error::Invalid(format!("unknown cochain preset {other:?}"))),
    };
    Ok(faces_of(&top))
}

/// A seeded random simplicial complex on three to five vertices with at most
/// [`RANDOM_MAX_SIMPLICES`] simplices: random edges and triangles, closed under faces.
pub fn random_complex(seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = rng.gen_range(3..=5);
    let mut top: Vec<Vec<usize>> = Vec::new();
    let mut faces = faces_of(&[vec![rng.gen_range(0..nv)]]);
    for _ in 0..8 {
        let k = if rng.gen_bool(0.7) { 2 } else { 3 };
        let mut t: Vec<usize> = rand::seq::index::sample(&mut rng, nv, k).into_vec();
        t.sort_unstable();
        let mut next = top.clone();
        next.push(t);
        let f = faces_of(&next);
        if f.len() <= RANDOM_MAX_SIMPLICES {
            top = next;
            faces = f;
        }
    }
    faces
}

/// For each vertex v in increasing order, pairs every still unmatched σ ∌ v with σ ∪ {v}
/// when that simplex exists and is unmatched. Pairs are (σ, σ ∪ {v}) as generator indices.
pub fn element_matching(simplices: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let simplices = normalized_simplices(simplices);
    let index: HashMap<&[usize], usize> = simplices.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut vertices: Vec<usize> = simplices.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    let mut used = vec![false; simplices.len()];
    let mut pairs = Vec::new();
    for v in vertices {
        for (i, s) in simplices.iter().enumerate() {
            if used[i] || s.contains(&v) {
                continue;
            }
            let mut t = s.clone();
            t.push(v);
            t.sort_unstable();
            if let Some(&j) = index.get(t.as_slice()) {
                if !used[j] {
                    used[i] = true;
                    used[j] = true;
                    pairs.push((i, j));
                }
            }
        }
    }
    pairs
}

/// Cochains of `simplices` with the element matching turned into transfer data.
pub fn cochain_model(simplices: &[Vec<usize>]) -> Result<CochainModel, Error> {
    let simplices = normalized_simplices(simplices);
    let dg = AInftyStructure::from_dg(&simplicial_cochains(&simplices)?, DEFAULT_MAX_ARITY)?;
    let pairs = element_matching(&simplices);
    let transfer = TransferData::from_matching(&dg, &pairs)?;
    Ok(CochainModel { simplices, dg, pairs, transfer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::hpl_transfer;

    #[test]
    fn presets_transfer_to_cohomology() {
        let expect = [vec![(0, 1)], vec![(0, 1), (1, 1)], vec![(0, 1), (2, 1)]];
        for (name, want) in COCHAIN_PRESETS.iter().zip(expect) {
            let m = cochain_model(&cochain_preset(name).unwrap()).unwrap();
            let tr = hpl_transfer(&m.dg, &m.transfer, 4, 1).unwrap();
            assert_eq!(tr.b.hom_cohomology(0, 0), want, "{name}");
            assert_eq!(tr.b.num_gens(), want.len(), "{name}");
            assert!(tr.b.check_relations_through(4).unwrap().ok, "{name}");
        }
    }

    #[test]
    fn random_complexes_are_small_and_closed() {
        for seed in 0..50 {
            let c = random_complex(seed);
            assert!(!c.is_empty() && c.len() <= RANDOM_MAX_SIMPLICES, "{c:?}");
            assert_eq!(cochain_preset(&format!("random-{seed}")).unwrap(), c);
            assert!(cochain_model(&c).is_ok(), "{c:?}");
        }
    }

    #[test]
    fn matching_of_an_edge() {
        assert_eq!(element_matching(&cochain_preset("interval").unwrap()), vec![(1, 2)]);
    }
}
