use std::collections::BTreeMap;
use std::sync::Arc;

use super::category::MorseObject;
use super::function::{bump, DirectedFunction};
use crate::homalg::{q, q_frac, Q};
use crate::microloc::MorseDatum;
use crate::stratspace::{subdivided_circle, subdivided_interval, CellSet, OpenSet, StratifiedComplex};
use crate::Error;

/// Object families shipped for the Morse comparisons.
pub const FAMILIES: [&str; 8] = [
    "interval-endo",
    "interval-monotone",
    "interval-nested",
    "interval-reversed",
    "brane-left",
    "brane-right",
    "circle-endo",
    "circle-arc",
];

/// f̃_i = f_i + i·ε·ρ, turned into standard objects.
pub fn perturbed_sequence(
    space: &StratifiedComplex,
    objects: Vec<(String, DirectedFunction)>,
    rho: &BTreeMap<usize, Q>,
    eps: &Q,
) -> Result<Vec<MorseObject>, Error> {
    objects
        .into_iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let f = f.perturbed(space, rho, &(eps * Q::from_integer((i as i64).into())))?;
            MorseObject::standard(space, &name, f)
        })
        .collect()
}

fn open(space: &StratifiedComplex, names: &[String]) -> Result<OpenSet, Error> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    space.open_by_names(&refs)
}

/// Interior of the subdivided interval from vertex `lo` to vertex `hi`, both excluded.
fn interval_open(space: &StratifiedComplex, lo: usize, hi: usize) -> Result<OpenSet, Error> {
    let mut names: Vec<String> = (lo + 1..hi).map(|k| format!("v{k}")).collect();
    names.extend((lo..hi).map(|k| format!("e{k}")));
    open(space, &names)
}

fn brane_at(space: &StratifiedComplex, name: &str, vertex: &str, negative: &[&str]) -> Result<MorseObject, Error> {
    let cell = space.cell_index(vertex)?;
    let negative: CellSet = negative.iter().map(|n| space.cell_index(n)).collect::<Result<_, _>>()?;
    let datum = MorseDatum { stratum: vertex.into(), cell, negative, index_shift: 0 };
    MorseObject::default_brane(space, name, datum)
}

fn scaled(rho: &BTreeMap<usize, Q>, c: Q) -> BTreeMap<usize, Q> {
    rho.iter().map(|(k, v)| (*k, v * &c)).collect()
}

/// The space and objects of a shipped family.
pub fn family(name: &str) -> Result<(Arc<StratifiedComplex>, Vec<MorseObject>), Error> {
    let named = |n: &str, f: DirectedFunction| (n.to_string(), f);
    match name {
        "interval-endo" | "interval-monotone" | "interval-nested" | "interval-reversed" | "brane-left"
        | "brane-right" => {
            let s = subdivided_interval(8)?;
            let x = s.whole();
            let v = interval_open(&s, 0, 8)?;
            let rho = bump(&s, s.cell_index("v4")?);
            let lin: BTreeMap<usize, Q> = (0..=8).map(|k| (k, q(k as i64))).collect();
            let on_x = |r: &BTreeMap<usize, Q>| DirectedFunction::new(&s, x.clone(), r.clone());
            let objects = match name {
                "interval-endo" => {
                    let f = on_x(&rho)?;
                    perturbed_sequence(&s, vec![named("X0", f.clone()), named("X1", f)], &rho, &q(1))?
                }
                "interval-monotone" => {
                    let f = on_x(&lin)?;
                    perturbed_sequence(&s, vec![named("X0", f.clone()), named("X1", f)], &lin, &q(1))?
                }
                "interval-nested" => {
                    let list = vec![
                        named("X", on_x(&rho)?),
                        named("V", DirectedFunction::tent(&s, v, q(1))?),
                        named("W", DirectedFunction::tent(&s, interval_open(&s, 1, 7)?, q(3))?),
                    ];
                    perturbed_sequence(&s, list, &rho, &q_frac(1, 16))?
                }
                "interval-reversed" => {
                    let f = on_x(&scaled(&rho, q_frac(1, 8)))?;
                    let list = vec![
                        named("V", DirectedFunction::tent(&s, v, q(1))?),
                        named("X0", f.clone()),
                        named("X1", f),
                    ];
                    perturbed_sequence(&s, list, &rho, &q_frac(1, 8))?
                }
                _ => {
                    let brane = if name == "brane-left" {
                        brane_at(&s, "M_a", "v0", &[])?
                    } else {
                        brane_at(&s, "M_b", "v8", &["e7"])?
                    };
                    vec![
                        brane,
                        MorseObject::standard(&s, "X", on_x(&scaled(&lin, q_frac(1, 100)))?)?,
                        MorseObject::standard(&s, "V", DirectedFunction::tent(&s, v, q(2))?)?,
                    ]
                }
            };
            Ok((Arc::new(s), objects))
        }
        "circle-endo" | "circle-arc" => {
            let s = subdivided_circle(6)?;
            let x = s.whole();
            let rho = bump(&s, s.cell_index("v3")?);
            let objects = if name == "circle-endo" {
                let f = DirectedFunction::new(&s, x, rho.clone())?;
                let list = vec![named("X0", f.clone()), named("X1", f.clone()), named("X2", f)];
                perturbed_sequence(&s, list, &rho, &q(1))?
            } else {
                let a: CellSet = (0..s.num_cells()).filter(|&c| s.name(c) != "v0").collect();
                let f = DirectedFunction::new(&s, x, scaled(&rho, q_frac(1, 8)))?;
                let list = vec![
                    named("X0", f.clone()),
                    named("A", DirectedFunction::tent(&s, s.open_set(a)?, q(1))?),
                    named("X1", f),
                ];
                perturbed_sequence(&s, list, &rho, &q_frac(1, 8))?
            };
            Ok((Arc::new(s), objects))
        }
        other => Err(Error::Invalid(format!("unknown Morse family {other:?}"))),
    }
}
