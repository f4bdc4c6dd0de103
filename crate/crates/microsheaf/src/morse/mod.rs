//! Directed piecewise-linear Morse theory on graphs.
//!
//! Homs between objects are cochains on the barycentric nerve (cells ordered by inclusion).
//! For a pair of objects the difference f_target − f_source, evaluated at vertices and at edge
//! midpoints, defines a discrete gradient: each nerve vertex is matched with the nerve edge
//! toward its highest higher neighbour. Unmatched chains are the critical points, and flows
//! along the matching give the Morse differential, the projection P, the inclusion I, the
//! homotopy H and the Morse trees.

mod category;
mod compare;
mod families;
mod function;
mod trees;

use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::homalg::Q;
use crate::microloc::{MorseDatum, MorseDatumJson};
use crate::sheafcat::SpaceRef;
use crate::stratspace::StratifiedComplex;
use crate::Error;

pub use category::{
    morse_complex, CriticalCell, Flow, MorseCategory, MorseComplexResult, MorseObject, ObjectKind, PairGradient,
    CONVENTION,
};
pub use compare::{open_vs_mor, ComparisonReport, HomLine, OperationLine};
pub use families::{family, perturbed_sequence, FAMILIES};
pub use function::{bump, DirectedFunction, Flag, FunctionJson};
pub use trees::{count_morse_trees, morse_operation, morse_operation_on, MorseTree, TreeCount};

pub(crate) fn ser_q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// One object: a standard object on the domain of its function, or a brane when `brane` is set.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ObjectJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brane: Option<MorseDatumJson>,
    pub function: FunctionJson,
}

/// A sequence of objects on one space.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SequenceJson {
    pub space: SpaceRef,
    pub objects: Vec<ObjectJson>,
}

impl SequenceJson {
    pub fn resolve(&self) -> Result<(Arc<StratifiedComplex>, Vec<MorseObject>), Error> {
        let space = Arc::new(self.space.resolve()?);
        let mut out = Vec::new();
        for o in &self.objects {
            if o.function.space != self.space {
                return Err(Error::Parse(format!("function of {} lives on another space", o.name)));
            }
            let f = DirectedFunction::from_json_on(&space, &o.function)?;
            out.push(match &o.brane {
                Some(d) => MorseObject::brane(&space, &o.name, MorseDatum::from_json(&space, d)?, f)?,
                None => MorseObject::standard(&space, &o.name, f)?,
            });
        }
        Ok((space, out))
    }

    pub fn from_objects(space: &StratifiedComplex, space_ref: SpaceRef, objects: &[MorseObject]) -> Self {
        SequenceJson {
            space: space_ref.clone(),
            objects: objects
                .iter()
                .map(|o| ObjectJson {
                    name: o.name.clone(),
                    brane: match &o.kind {
                        ObjectKind::Brane { datum } => Some(datum.to_json(space)),
                        ObjectKind::Standard { .. } => None,
                    },
                    function: o.function.to_json(space, space_ref.clone()),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::hpl_transfer;
    use crate::homalg::q;
    use crate::sheafcat::hom_standard;

    fn cat(name: &str) -> MorseCategory {
        let (s, objects) = family(name).unwrap();
        MorseCategory::new(s, objects, 3).unwrap()
    }

    fn degrees(mc: &MorseComplexResult) -> Vec<i32> {
        mc.critical.iter().map(|c| c.degree).collect()
    }

    #[test]
    fn tent_pair_has_one_peak() {
        let c = cat("interval-nested");
        let mc = c.morse_complex(0, 1).unwrap();
        assert_eq!(degrees(&mc), vec![0]);
        assert_eq!(mc.critical[0].chain, vec!["v4".to_string()]);
        assert_eq!(mc.dims, vec![(0, 1)]);
        assert!(mc.relative_pair.1.is_empty());
    }

    #[test]
    fn reversed_pair_has_one_degree_one_point() {
        let c = cat("interval-reversed");
        let mc = c.morse_complex(0, 1).unwrap();
        assert_eq!(degrees(&mc), vec![1]);
        assert_eq!(mc.dims, vec![(1, 1)]);
        assert_eq!(mc.relative_pair.1, vec!["v0".to_string(), "v8".to_string()]);
    }

    #[test]
    fn circle_pair() {
        let c = cat("circle-endo");
        let mc = c.morse_complex(0, 1).unwrap();
        assert_eq!(degrees(&mc), vec![0, 1]);
        assert!(mc.differential.is_zero());
        assert_eq!(mc.dims, vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn monotone_pair_is_one_point() {
        let c = cat("interval-monotone");
        let mc = c.morse_complex(0, 1).unwrap();
        assert_eq!(mc.critical.len(), 1);
        assert_eq!(mc.critical[0].chain, vec!["v8".to_string()]);
    }

    #[test]
    fn hom_chains_match_the_sheaf_model() {
        let c = cat("interval-nested");
        for (&(i, j), pg) in &c.pairs {
            let (ObjectKind::Standard { open: ui }, ObjectKind::Standard { open: uj }) =
                (&c.objects[i].kind, &c.objects[j].kind)
            else {
                unreachable!()
            };
            let h = hom_standard(&c.space, ui, uj);
            let mut expected: Vec<Vec<usize>> = h.chains.concat();
            expected.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            assert_eq!(pg.chains, expected);
        }
    }

    #[test]
    fn flat_difference_is_named() {
        let (s, mut objects) = family("interval-endo").unwrap();
        objects[1] = objects[0].clone();
        let err = MorseCategory::new(s, objects, 2).unwrap_err().to_string();
        assert!(err.contains("flat along e"), "{err}");
    }

    #[test]
    fn undirected_pair_rejected() {
        let (s, mut objects) = family("interval-reversed").unwrap();
        // a steep function on X makes the gradient point inward at the ends of V
        let steep = objects[1].function.perturbed(&s, &bump(&s, 4), &q(4)).unwrap();
        objects[1] = MorseObject::standard(&s, "X0", steep).unwrap();
        let err = MorseCategory::new(s, objects, 2).unwrap_err().to_string();
        assert!(err.contains("not directed"), "{err}");
    }

    #[test]
    fn dg_category_is_associative() {
        for name in FAMILIES {
            let c = cat(name);
            assert!(c.dg.check_relations_through(3).unwrap().ok, "{name}");
        }
    }

    #[test]
    fn flow_projection_validates() {
        for name in FAMILIES {
            let c = cat(name);
            c.flow_projection().unwrap().validate(&c.dg).unwrap();
        }
    }

    #[test]
    fn nested_product_is_one_tree() {
        let c = cat("interval-nested");
        let crit = |i: usize, j: usize| {
            (0..c.critical.len()).find(|&k| {
                let g = &c.dg.gens[c.critical[k]];
                g.source == i && g.target == j
            }).unwrap()
        };
        let (a1, a2, b) = (crit(0, 1), crit(1, 2), crit(0, 2));
        let tc = count_morse_trees(&c, &[a1, a2], b).unwrap();
        assert_eq!(tc.count, q(1));
        assert_eq!(tc.trees.len(), 1);
        assert_eq!(tc.trees[0].shape, "(0 1)");
        let zero = crate::ainfty::SparseVec::new();
        let one: crate::ainfty::SparseVec = [(a2, q(1))].into_iter().collect();
        assert!(morse_operation_on(&c, &[&zero, &one]).unwrap().is_empty());
    }

    #[test]
    fn transfer_matches_tree_counts() {
        for name in FAMILIES {
            let c = cat(name);
            let t = c.flow_projection().unwrap();
            let tr = hpl_transfer(&c.dg, &t, 3, 1).unwrap();
            for d in 1..=3 {
                for key in tr.b.composable_tuples(d) {
                    assert_eq!(tr.b.apply_basis(&key), morse_operation(&c, &key).unwrap(), "{name} {key:?}");
                }
            }
        }
    }

    #[test]
    fn endpoint_brane_homs_agree() {
        let (s, objects) = family("brane-left").unwrap();
        let r = open_vs_mor(s, objects, 3).unwrap();
        assert!(r.ok, "{r:#?}");
        let v = r.homs.iter().find(|l| l.source == "M_a" && l.target == "V").unwrap();
        assert_eq!(v.morse, vec![(0, 1)]);
        assert!(!r.module.is_empty());
        let (s, objects) = family("brane-right").unwrap();
        let r = open_vs_mor(s, objects, 3).unwrap();
        assert!(r.ok, "{r:#?}");
        let v = r.homs.iter().find(|l| l.source == "M_b" && l.target == "V").unwrap();
        assert!(v.morse.is_empty());
    }

    #[test]
    fn every_family_compares() {
        for name in FAMILIES {
            let (s, objects) = family(name).unwrap();
            let r = open_vs_mor(s, objects, 3).unwrap();
            assert!(r.ok, "{name}");
            assert_eq!(r.convention, CONVENTION);
        }
    }

    #[test]
    fn sequence_json_round_trip() {
        let (s, objects) = family("brane-left").unwrap();
        let j = SequenceJson::from_objects(&s, SpaceRef::Inline(s.to_json()), &objects);
        let text = serde_json::to_string(&j).unwrap();
        let (_, back) = serde_json::from_str::<SequenceJson>(&text).unwrap().resolve().unwrap();
        assert_eq!(back, objects);
    }
}
