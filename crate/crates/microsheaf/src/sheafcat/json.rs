use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{costandard_object, standard_object, SheafComplex};
use crate::homalg::{parse_q, ChainMap, CochainComplex, ComplexJson, Matrix, Q};
use crate::stratspace::{preset, SpaceJson, StratifiedComplex};
use crate::Error;

/// A preset name or an inline space.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SpaceRef {
    Preset(String),
    Inline(SpaceJson),
}

impl SpaceRef {
    pub fn resolve(&self) -> Result<StratifiedComplex, Error> {
        match self {
            SpaceRef::Preset(name) => preset(name),
            SpaceRef::Inline(j) => StratifiedComplex::from_json(j),
        }
    }
}

/// Components of a chain map over `degrees`, each a row-major matrix.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChainMapJson {
    pub degrees: [i32; 2],
    pub comps: Vec<Vec<String>>,
}

impl ChainMapJson {
    pub fn from_map(f: &ChainMap) -> Self {
        let lo = f.source.lo().min(f.target.lo());
        let hi = f.source.hi().max(f.target.hi());
        ChainMapJson { degrees: [lo, hi], comps: (lo..=hi).map(|k| f.component(k).to_strings()).collect() }
    }

    pub fn to_map(&self, source: &CochainComplex, target: &CochainComplex) -> Result<ChainMap, Error> {
        let [lo, hi] = self.degrees;
        if (hi - lo + 1).max(0) as usize != self.comps.len() {
            return Err(Error::Dimension(format!("degrees [{lo}, {hi}] but {} components", self.comps.len())));
        }
        let lo2 = lo.min(source.lo()).min(target.lo());
        let hi2 = hi.max(source.hi()).max(target.hi());
        let mut comps = Vec::new();
        for k in lo2..=hi2 {
            let (r, c) = (target.dim(k), source.dim(k));
            let m = if k >= lo && k <= hi {
                let raw = &self.comps[(k - lo) as usize];
                if raw.is_empty() {
                    Matrix::zeros(r, c)
                } else {
                    let data = raw.iter().map(|s| parse_q(s)).collect::<Result<Vec<Q>, _>>()?;
                    Matrix::from_vec(r, c, data)?
                }
            } else {
                Matrix::zeros(r, c)
            };
            comps.push(m);
        }
        ChainMap::new(source.clone(), target.clone(), lo2, comps)
    }
}

/// Wire format of a sheaf complex.
///
/// Either explicit stalks and covering generizations `"σ<τ"`, or a recipe:
/// `standard` / `costandard` with a list of cells, or `constant: true`, each with an optional `shift`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SheafJson {
    pub space: SpaceRef,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stalks: BTreeMap<String, ComplexJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gens: BTreeMap<String, ChainMapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costandard: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub constant: bool,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shift: i32,
}

fn is_zero(n: &i32) -> bool {
    *n == 0
}

impl SheafComplex {
    pub fn to_json(&self, space: SpaceRef) -> SheafJson {
        let sp = self.space();
        let stalks = (0..sp.num_cells())
            .filter(|&c| !self.stalk(c).is_zero_object())
            .map(|c| (sp.name(c).to_string(), self.stalk(c).to_json()))
            .collect();
        let gens = sp
            .incidences()
            .iter()
            .filter(|&&(t, s, _)| !self.stalk(s).is_zero_object() && !self.stalk(t).is_zero_object())
            .map(|&(t, s, _)| (format!("{}<{}", sp.name(s), sp.name(t)), ChainMapJson::from_map(self.gen(s, t))))
            .collect();
        SheafJson { space, stalks, gens, standard: None, costandard: None, constant: false, shift: 0 }
    }

    pub fn from_json(j: &SheafJson) -> Result<Self, Error> {
        let space = Arc::new(j.space.resolve()?);
        Self::from_json_on(&space, j)
    }

    /// Reads `j` over an already resolved space.
    pub fn from_json_on(space: &Arc<StratifiedComplex>, j: &SheafJson) -> Result<Self, Error> {
        let recipes = [j.standard.is_some(), j.costandard.is_some(), j.constant, !j.stalks.is_empty()];
        if recipes.iter().filter(|&&b| b).count() > 1 {
            return Err(Error::Parse("give one of stalks, standard, costandard, constant".into()));
        }
        let base = if let Some(cells) = &j.standard {
            let names: Vec<&str> = cells.iter().map(String::as_str).collect();
            standard_object(space, &space.open_by_names(&names)?)
        } else if let Some(cells) = &j.costandard {
            let names: Vec<&str> = cells.iter().map(String::as_str).collect();
            costandard_object(space, &space.open_by_names(&names)?)
        } else if j.constant {
            SheafComplex::constant(space.clone())
        } else {
            explicit(space, j)?
        };
        Ok(base.shift(j.shift))
    }
}

fn explicit(space: &Arc<StratifiedComplex>, j: &SheafJson) -> Result<SheafComplex, Error> {
    let n = space.num_cells();
    let mut stalks = vec![CochainComplex::zero(); n];
    for (name, cj) in &j.stalks {
        let c = space.cell_index(name)?;
        stalks[c] = CochainComplex::from_json(cj)?;
    }
    let mut given: HashMap<(usize, usize), &ChainMapJson> = HashMap::new();
    for (key, m) in &j.gens {
        let (a, b) = key
            .split_once('<')
            .ok_or_else(|| Error::Parse(format!("generization key {key:?} is not \"σ<τ\"")))?;
        let (s, t) = (space.cell_index(a.trim())?, space.cell_index(b.trim())?);
        if space.incidence(t, s) == 0 {
            return Err(Error::Parse(format!("{key:?} is not a covering pair")));
        }
        given.insert((s, t), m);
    }
    let mut cov = HashMap::new();
    for &(t, s, _) in space.incidences() {
        let m = match given.remove(&(s, t)) {
            Some(mj) => mj.to_map(&stalks[s], &stalks[t])?,
            None if stalks[s].is_zero_object() || stalks[t].is_zero_object() => {
                ChainMap::zero(&stalks[s], &stalks[t])
            }
            None => {
                return Err(Error::Parse(format!(
                    "missing generization {}<{}",
                    space.name(s),
                    space.name(t)
                )))
            }
        };
        cov.insert((s, t), m);
    }
    SheafComplex::new(space.clone(), stalks, cov)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_standard() {
        let x = Arc::new(preset("p1").unwrap());
        let u = x.open_by_names(&["e0", "e1", "f+", "f-"]).unwrap();
        let f = standard_object(&x, &u).shift(1);
        let j = f.to_json(SpaceRef::Preset("p1".into()));
        let text = serde_json::to_string(&j).unwrap();
        let back = SheafComplex::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!(back.same_as(&f));
    }

    #[test]
    fn recipe_matches_constructor() {
        let text = r#"{"space": "p1", "standard": ["e0", "e1", "f+", "f-"], "shift": 1}"#;
        let f = SheafComplex::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        let x = f.space_arc().clone();
        let u = x.open_by_names(&["e0", "e1", "f+", "f-"]).unwrap();
        assert!(f.same_as(&standard_object(&x, &u).shift(1)));
    }

    #[test]
    fn explicit_skyscraper() {
        let text = r#"{"space": "interval",
            "stalks": {"b": {"degrees": [0, 0], "dims": [1], "diffs": []}}}"#;
        let f = SheafComplex::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(f.stalk_cohomology(1), vec![(0, 1)]);
        assert!(f.stalk(0).is_zero_object());
    }

    #[test]
    fn missing_generization_is_an_error() {
        let text = r#"{"space": "interval",
            "stalks": {"b": {"degrees": [0, 0], "dims": [1], "diffs": []},
                       "e": {"degrees": [0, 0], "dims": [1], "diffs": []}}}"#;
        assert!(SheafComplex::from_json(&serde_json::from_str(text).unwrap()).is_err());
    }
}
