use serde::{Deserialize, Serialize};

use super::{MorseDatum, MorseDatumJson};
use crate::stratspace::StratifiedComplex;
use crate::Error;

/// Morse data with an involution pairing each datum with its opposite covector.
#[derive(Clone, Debug)]
pub struct MorseDataSet {
    pub data: Vec<MorseDatum>,
    pub opposite: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorseDataSetJson {
    pub data: Vec<MorseDatumJson>,
    #[serde(default)]
    pub opposite: Vec<usize>,
}

impl MorseDataSet {
    pub fn to_json(&self, space: &StratifiedComplex) -> MorseDataSetJson {
        MorseDataSetJson {
            data: self.data.iter().map(|d| d.to_json(space)).collect(),
            opposite: self.opposite.clone(),
        }
    }

    pub fn from_json(space: &StratifiedComplex, j: &MorseDataSetJson) -> Result<Self, Error> {
        let data = j.data.iter().map(|d| MorseDatum::from_json(space, d)).collect::<Result<Vec<_>, _>>()?;
        let set = MorseDataSet { data, opposite: j.opposite.clone() };
        if !set.opposite.is_empty() {
            set.check_pairing()?;
        }
        Ok(set)
    }

    fn check_pairing(&self) -> Result<(), Error> {
        let n = self.data.len();
        if self.opposite.len() != n {
            return Err(Error::Invalid("opposite pairing has the wrong length".into()));
        }
        for (i, &j) in self.opposite.iter().enumerate() {
            if j >= n || self.opposite[j] != i || self.data[j].cell != self.data[i].cell {
                return Err(Error::Invalid(format!("opposite pairing is not an involution at {i}")));
            }
        }
        Ok(())
    }
}

// (stratum, cell, negative cells, index shift, opposite position)
type Row = (&'static str, &'static str, &'static [&'static str], i32, usize);

const P1: &[Row] = &[
    ("p0", "p0", &["e0", "f+", "f-"], 0, 1),
    ("p0", "p0", &["e1", "f+", "f-"], 0, 0),
    ("pinf", "pinf", &["e0", "f+", "f-"], 0, 3),
    ("pinf", "pinf", &["e1", "f+", "f-"], 0, 2),
    ("C*", "e0", &["f+", "f-"], 0, 4),
];

const S2: &[Row] = &[("S2", "m0", &["u", "l"], 0, 0)];

const C_ORIGIN: &[Row] = &[
    ("origin", "o", &["r0", "f0", "f1"], 0, 1),
    ("origin", "o", &["r1", "f0", "f1"], 0, 0),
    ("C*", "r0", &["f0", "f1"], 0, 2),
];

const INTERVAL: &[Row] = &[
    ("a", "a", &[], 0, 1),
    ("a", "a", &["e"], 0, 0),
    ("b", "b", &[], 0, 3),
    ("b", "b", &["e"], 0, 2),
    ("e", "e", &[], 0, 5),
    ("e", "e", &[], -1, 4),
];

const CIRCLE: &[Row] = &[
    ("v0", "v0", &[], 0, 1),
    ("v0", "v0", &["e0", "e1"], 0, 0),
    ("v0", "v0", &["e0"], 0, 3),
    ("v0", "v0", &["e1"], 0, 2),
    ("v1", "v1", &[], 0, 5),
    ("v1", "v1", &["e0", "e1"], 0, 4),
    ("v1", "v1", &["e0"], 0, 7),
    ("v1", "v1", &["e1"], 0, 6),
    ("e0", "e0", &[], 0, 9),
    ("e0", "e0", &[], -1, 8),
    ("e1", "e1", &[], 0, 11),
    ("e1", "e1", &[], -1, 10),
];

const DISC: &[Row] = &[
    ("center", "c", &["r0", "f0", "f1"], 0, 1),
    ("center", "c", &["r1", "f0", "f1"], 0, 0),
    ("center", "c", &[], 0, 3),
    ("center", "c", &["r0", "r1", "f0", "f1"], 0, 2),
    ("interior", "r0", &["f0", "f1"], 0, 4),
    ("boundary", "b0", &[], 0, 6),
    ("boundary", "b0", &["f0"], -1, 5),
];

/// The shipped complete Morse data of a preset.
pub fn curated_data(space: &StratifiedComplex, preset: &str) -> Result<MorseDataSet, Error> {
    let rows = match preset {
        "p1" => P1,
        "s2" => S2,
        "c-origin" => C_ORIGIN,
        "interval" => INTERVAL,
        "circle" => CIRCLE,
        "disc" => DISC,
        other => return Err(Error::Invalid(format!("no curated Morse data for {other:?}"))),
    };
    let mut data = Vec::new();
    for &(stratum, cell, neg, shift, _) in rows {
        let d = MorseDatum {
            stratum: stratum.into(),
            cell: space.cell_index(cell)?,
            negative: neg.iter().map(|n| space.cell_index(n)).collect::<Result<_, _>>()?,
            index_shift: shift,
        };
        d.validate(space)?;
        data.push(d);
    }
    let set = MorseDataSet { data, opposite: rows.iter().map(|r| r.4).collect() };
    set.check_pairing()?;
    Ok(set)
}
