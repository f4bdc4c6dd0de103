//! Local Morse groups, singular support, perversity and characteristic cycles.

mod data;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::homalg::CochainComplex;
use crate::sheafcat::{verdier_dual, SheafComplex};
use crate::stratspace::{CellSet, StratifiedComplex};
use crate::Error;

pub use data::{curated_data, MorseDataSet, MorseDataSetJson};

/// A combinatorial test triple: base cell, the part of its star where the test function is negative,
/// and an index shift λ so that the group is computed for F[λ].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseDatum {
    pub stratum: String,
    pub cell: usize,
    pub negative: CellSet,
    pub index_shift: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MorseDatumJson {
    pub stratum: String,
    pub cell: String,
    pub negative_cells: Vec<String>,
    #[serde(default)]
    pub shift: i32,
}

impl MorseDatum {
    pub fn validate(&self, space: &StratifiedComplex) -> Result<(), Error> {
        let a = space.stratum_index(&self.stratum)?;
        if !space.strata()[a].cells.contains(&self.cell) {
            return Err(Error::Invalid(format!(
                "cell {} is not in stratum {}",
                space.name(self.cell),
                self.stratum
            )));
        }
        let star = space.open_star(self.cell);
        if self.negative.contains(&self.cell) {
            return Err(Error::Invalid("negative part contains the base cell".into()));
        }
        for &c in &self.negative {
            if !star.contains(c) {
                return Err(Error::Invalid(format!("{} is not in the star of the base cell", space.name(c))));
            }
            for &t in space.cofacets(c) {
                if !self.negative.contains(&t) {
                    return Err(Error::Invalid(format!(
                        "negative part is not upward closed: {} < {}",
                        space.name(c),
                        space.name(t)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self, space: &StratifiedComplex) -> MorseDatumJson {
        MorseDatumJson {
            stratum: self.stratum.clone(),
            cell: space.name(self.cell).to_string(),
            negative_cells: space.names(&self.negative),
            shift: self.index_shift,
        }
    }

    pub fn from_json(space: &StratifiedComplex, j: &MorseDatumJson) -> Result<Self, Error> {
        let negative = j
            .negative_cells
            .iter()
            .map(|n| space.cell_index(n))
            .collect::<Result<CellSet, _>>()?;
        let d = MorseDatum {
            stratum: j.stratum.clone(),
            cell: space.cell_index(&j.cell)?,
            negative,
            index_shift: j.shift,
        };
        d.validate(space)?;
        Ok(d)
    }
}

#[derive(Clone, Debug)]
pub struct MorseGroupResult {
    pub datum: MorseDatum,
    pub complex: CochainComplex,
    /// Nonzero (degree, dim H) pairs.
    pub dims: Vec<(i32, usize)>,
    pub euler: i64,
}

impl MorseGroupResult {
    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn concentrated_in_zero(&self) -> bool {
        self.dims.iter().all(|&(k, _)| k == 0)
    }

    pub fn dim(&self, k: i32) -> usize {
        self.dims.iter().find(|&&(d, _)| d == k).map_or(0, |&(_, n)| n)
    }
}

/// Γ(star σ, negative part; F[λ]) = fib(RΓ(star σ) → RΓ(negative part))[λ].
pub fn local_morse_group(f: &SheafComplex, d: &MorseDatum) -> Result<MorseGroupResult, Error> {
    let space = f.space();
    d.validate(space)?;
    let star = space.open_star(d.cell);
    let neg = space.open_set(d.negative.clone())?;
    let fib = f.restriction(&star, &neg)?.fiber();
    let complex = fib.shift(d.index_shift);
    let dims = complex.betti_numbers();
    let euler = dims.iter().map(|&(k, n)| if k.rem_euclid(2) == 0 { n as i64 } else { -(n as i64) }).sum();
    Ok(MorseGroupResult { datum: d.clone(), complex, dims, euler })
}

/// Costalk in the stratum normalization: the raw costalk at σ shifted by (real stratum dim − dim σ),
/// so that it computes the stalk of i_S^! F on the stratum S.
pub fn normalized_costalk(f: &SheafComplex, sigma: usize) -> CochainComplex {
    let space = f.space();
    let raw = f.costalk(sigma);
    let shift = match space.stratum_of(sigma) {
        Some(a) => space.stratum_real_dim(a) as i32 - space.dim(sigma) as i32,
        None => 0,
    };
    raw.shift(shift)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Stalk,
    Costalk,
    Morse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub stratum: String,
    pub cell: String,
    pub degree: i32,
    pub side: Side,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} cohomology in degree {} at {} (stratum {})", self.side, self.degree, self.cell, self.stratum)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub perverse: bool,
    pub witnesses: Vec<Witness>,
}

impl Verdict {
    fn from_witnesses(witnesses: Vec<Witness>) -> Self {
        Verdict { perverse: witnesses.is_empty(), witnesses }
    }
}

/// Perversity function on strata.
#[derive(Clone, Debug)]
pub enum Perversity {
    /// p(S) = −dim_ℂ S.
    Middle,
    /// Explicit p(S) by stratum label.
    Custom(BTreeMap<String, i32>),
}

impl Perversity {
    fn value(&self, space: &StratifiedComplex, a: usize) -> Result<i32, Error> {
        let st = &space.strata()[a];
        match self {
            Perversity::Middle => {
                if !st.is_complex {
                    return Err(Error::Invalid(format!("stratum {} has no complex dimension", st.label)));
                }
                space
                    .stratum_cx_dim(a)
                    .map(|d| -d)
                    .ok_or_else(|| Error::Invalid(format!("stratum {} has no complex dimension", st.label)))
            }
            Perversity::Custom(m) => m
                .get(&st.label)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("no perversity value for stratum {}", st.label))),
        }
    }
}

/// Stalks vanish above p(S) and normalized costalks vanish below p(S), on every cell of every stratum.
pub fn perversity_by_stalks(f: &SheafComplex, p: &Perversity) -> Result<Verdict, Error> {
    let space = f.space();
    let mut out = Vec::new();
    for (a, st) in space.strata().iter().enumerate() {
        let bound = p.value(space, a)?;
        for &c in &st.cells {
            for (k, _) in f.stalk(c).betti_numbers() {
                if k > bound {
                    out.push(Witness { stratum: st.label.clone(), cell: space.name(c).into(), degree: k, side: Side::Stalk });
                }
            }
            for (k, _) in normalized_costalk(f, c).betti_numbers() {
                if k < bound {
                    out.push(Witness { stratum: st.label.clone(), cell: space.name(c).into(), degree: k, side: Side::Costalk });
                }
            }
        }
    }
    Ok(Verdict::from_witnesses(out))
}

fn check_coverage(space: &StratifiedComplex, data: &[MorseDatum]) -> Result<(), Error> {
    for st in space.strata() {
        if !data.iter().any(|d| d.stratum == st.label) {
            return Err(Error::Invalid(format!("no Morse datum for stratum {}", st.label)));
        }
    }
    Ok(())
}

pub fn morse_groups(f: &SheafComplex, data: &[MorseDatum]) -> Result<Vec<MorseGroupResult>, Error> {
    data.iter().map(|d| local_morse_group(f, d)).collect()
}

/// Perverse iff every local Morse group is concentrated in degree 0.
pub fn perversity_by_morse_groups(f: &SheafComplex, data: &[MorseDatum]) -> Result<Verdict, Error> {
    let space = f.space();
    check_coverage(space, data)?;
    let mut out = Vec::new();
    for r in morse_groups(f, data)? {
        for &(k, _) in &r.dims {
            if k != 0 {
                out.push(Witness {
                    stratum: r.datum.stratum.clone(),
                    cell: space.name(r.datum.cell).into(),
                    degree: k,
                    side: Side::Morse,
                });
            }
        }
    }
    Ok(Verdict::from_witnesses(out))
}

/// Strata carrying a datum with nonzero Morse group, in stratum order.
pub fn singular_support(f: &SheafComplex, data: &[MorseDatum]) -> Result<Vec<String>, Error> {
    let space = f.space();
    check_coverage(space, data)?;
    let results = morse_groups(f, data)?;
    Ok(space
        .strata()
        .iter()
        .filter(|st| results.iter().any(|r| r.datum.stratum == st.label && !r.is_zero()))
        .map(|st| st.label.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicCycle {
    /// (stratum label, multiplicity) in stratum order.
    pub multiplicities: Vec<(String, i64)>,
    /// Multiplicity is χ of the local Morse group, as computed for the first datum of each stratum.
    pub orientation: String,
}

impl CharacteristicCycle {
    pub fn multiplicity(&self, label: &str) -> Option<i64> {
        self.multiplicities.iter().find(|(l, _)| l == label).map(|&(_, m)| m)
    }

    pub fn vector(&self) -> Vec<i64> {
        self.multiplicities.iter().map(|&(_, m)| m).collect()
    }
}

pub fn characteristic_cycle(f: &SheafComplex, data: &[MorseDatum]) -> Result<CharacteristicCycle, Error> {
    let space = f.space();
    check_coverage(space, data)?;
    let results = morse_groups(f, data)?;
    let multiplicities = space
        .strata()
        .iter()
        .map(|st| {
            let r = results.iter().find(|r| r.datum.stratum == st.label).expect("coverage checked");
            (st.label.clone(), r.euler)
        })
        .collect();
    Ok(CharacteristicCycle { multiplicities, orientation: "euler-of-morse-group".into() })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityLine {
    pub stratum: String,
    pub cell: String,
    /// Nonzero dims of M(F) at the datum.
    pub original: Vec<(i32, usize)>,
    /// Nonzero dims of M(𝔻F) at the opposite datum.
    pub dual: Vec<(i32, usize)>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub ok: bool,
    pub lines: Vec<DualityLine>,
}

/// dim H^k M(𝔻F) at the opposite datum = dim H^{−k} M(F), for every datum.
pub fn morse_duality_check(f: &SheafComplex, set: &MorseDataSet) -> Result<DualityReport, Error> {
    let space = f.space();
    if set.opposite.len() != set.data.len() {
        return Err(Error::Invalid("Morse data have no opposite pairing".into()));
    }
    let df = verdier_dual(f);
    let mut lines = Vec::new();
    for (i, d) in set.data.iter().enumerate() {
        let m = local_morse_group(f, d)?;
        let md = local_morse_group(&df, &set.data[set.opposite[i]])?;
        let mut flipped: Vec<(i32, usize)> = m.dims.iter().map(|&(k, n)| (-k, n)).collect();
        flipped.sort();
        let ok = flipped == md.dims;
        lines.push(DualityLine {
            stratum: d.stratum.clone(),
            cell: space.name(d.cell).into(),
            original: m.dims,
            dual: md.dims,
            ok,
        });
    }
    Ok(DualityReport { ok: lines.iter().all(|l| l.ok), lines })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::sheafcat::{adjunction_triangles, standard_object};
    use crate::stratspace::preset;

    fn setup(name: &str) -> (Arc<StratifiedComplex>, MorseDataSet) {
        let x = Arc::new(preset(name).unwrap());
        let d = curated_data(&x, name).unwrap();
        (x, d)
    }

    fn datum(x: &StratifiedComplex, stratum: &str, cell: &str, neg: &[&str]) -> MorseDatum {
        MorseDatum {
            stratum: stratum.into(),
            cell: x.cell_index(cell).unwrap(),
            negative: neg.iter().map(|n| x.cell_index(n).unwrap()).collect(),
            index_shift: 0,
        }
    }

    fn pushforward_cstar(x: &Arc<StratifiedComplex>) -> SheafComplex {
        standard_object(x, &x.open_by_names(&["e0", "e1", "f+", "f-"]).unwrap()).shift(1)
    }

    #[test]
    fn interval_endpoint_groups() {
        let x = Arc::new(preset("interval").unwrap());
        let f = standard_object(&x, &x.open_by_names(&["e"]).unwrap());
        let inward = local_morse_group(&f, &datum(&x, "b", "b", &[])).unwrap();
        assert_eq!(inward.dims, vec![(0, 1)]);
        let outward = local_morse_group(&f, &datum(&x, "b", "b", &["e"])).unwrap();
        assert!(outward.is_zero());
    }

    #[test]
    fn p1_point_group() {
        let (x, _) = setup("p1");
        let f = pushforward_cstar(&x);
        let r = local_morse_group(&f, &datum(&x, "p0", "p0", &["e0", "f+", "f-"])).unwrap();
        assert_eq!(r.dims, vec![(0, 1)]);
        assert_eq!(r.euler, 1);
    }

    #[test]
    fn negative_part_must_be_upward_closed() {
        let (x, _) = setup("p1");
        let f = pushforward_cstar(&x);
        assert!(local_morse_group(&f, &datum(&x, "p0", "p0", &["e0", "f+"])).is_err());
    }

    #[test]
    fn p1_perversity_examples() {
        let (x, data) = setup("p1");
        let c = SheafComplex::constant(x.clone());
        let cases = [(c.shift(1), true), (c.clone(), false), (pushforward_cstar(&x), true)];
        for (f, expected) in cases {
            let a = perversity_by_stalks(&f, &Perversity::Middle).unwrap();
            let b = perversity_by_morse_groups(&f, &data.data).unwrap();
            assert_eq!(a.perverse, expected);
            assert_eq!(b.perverse, expected);
        }
        let v = perversity_by_stalks(&c, &Perversity::Middle).unwrap();
        assert!(v.witnesses.iter().any(|w| w.stratum == "C*" && w.side == Side::Stalk && w.degree == 0));
        let m = perversity_by_morse_groups(&c, &data.data).unwrap();
        assert!(m.witnesses.iter().any(|w| w.stratum == "C*" && w.degree == 1));
    }

    #[test]
    fn p1_characteristic_cycles() {
        let (x, data) = setup("p1");
        let cc = characteristic_cycle(&pushforward_cstar(&x), &data.data).unwrap();
        assert_eq!(cc.vector(), vec![1, 1, 1]);
        let cc = characteristic_cycle(&SheafComplex::constant(x.clone()).shift(1), &data.data).unwrap();
        assert_eq!(cc.vector(), vec![0, 0, 1]);
        let ss = singular_support(&SheafComplex::constant(x.clone()).shift(1), &data.data).unwrap();
        assert_eq!(ss, vec!["C*".to_string()]);
        let z = SheafComplex::zero(x.clone());
        assert!(singular_support(&z, &data.data).unwrap().is_empty());
        assert!(perversity_by_morse_groups(&z, &data.data).unwrap().perverse);
    }

    #[test]
    fn real_presets_reject_middle_perversity() {
        let (x, _) = setup("interval");
        assert!(perversity_by_stalks(&SheafComplex::constant(x), &Perversity::Middle).is_err());
    }

    #[test]
    fn missing_coverage() {
        let (x, data) = setup("p1");
        let partial: Vec<MorseDatum> = data.data.iter().filter(|d| d.stratum != "pinf").cloned().collect();
        assert!(perversity_by_morse_groups(&SheafComplex::constant(x), &partial).is_err());
    }

    #[test]
    fn duality_on_presets() {
        for name in ["interval", "circle", "p1", "c-origin", "s2"] {
            let (x, data) = setup(name);
            let f = SheafComplex::constant(x.clone());
            let rep = morse_duality_check(&f, &data).unwrap();
            assert!(rep.ok, "{name}: {rep:?}");
        }
        let (x, data) = setup("p1");
        assert!(morse_duality_check(&pushforward_cstar(&x), &data).unwrap().ok);
    }

    #[test]
    fn euler_is_additive_on_triangles() {
        let (x, data) = setup("p1");
        let f = pushforward_cstar(&x);
        let y: CellSet = [x.cell_index("p0").unwrap()].into_iter().collect();
        let (t1, t2) = adjunction_triangles(&f, &y).unwrap();
        for t in [t1, t2] {
            for d in &data.data {
                let e = |g: &SheafComplex| local_morse_group(g, d).unwrap().euler;
                assert_eq!(e(&t.middle), e(&t.first) + e(&t.third));
            }
        }
    }
}
