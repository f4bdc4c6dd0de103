use serde::{Deserialize, Serialize};

use super::{AInftyStructure, Generator, SparseVec, TransferData};
use crate::homalg::parse_q;
use crate::Error;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeneratorJson {
    pub source: String,
    pub target: String,
    pub degree: i32,
    #[serde(default)]
    pub label: String,
}

/// One tensor entry: the basis multi-index (first-to-last) and the output as
/// (generator, coefficient) pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OpEntryJson {
    pub inputs: Vec<usize>,
    pub output: Vec<(usize, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AInftyJson {
    pub objects: Vec<String>,
    pub generators: Vec<GeneratorJson>,
    #[serde(default = "default_arity")]
    pub max_arity: usize,
    #[serde(default)]
    pub ops: Vec<OpEntryJson>,
}

fn default_arity() -> usize {
    super::DEFAULT_MAX_ARITY
}

pub(crate) fn vec_to_json(v: &SparseVec) -> Vec<(usize, String)> {
    v.iter().map(|(k, c)| (*k, c.to_string())).collect()
}

pub(crate) fn vec_from_json(v: &[(usize, String)]) -> Result<SparseVec, Error> {
    let mut out = SparseVec::new();
    for (k, s) in v {
        super::add_into(&mut out, *k, &parse_q(s)?);
    }
    Ok(out)
}

pub(crate) fn gens_to_json(objects: &[String], gens: &[Generator]) -> Vec<GeneratorJson> {
    gens.iter()
        .map(|g| GeneratorJson {
            source: objects[g.source].clone(),
            target: objects[g.target].clone(),
            degree: g.degree,
            label: g.label.clone(),
        })
        .collect()
}

pub(crate) fn gens_from_json(objects: &[String], gens: &[GeneratorJson]) -> Result<Vec<Generator>, Error> {
    let idx = |name: &str| {
        objects.iter().position(|o| o == name).ok_or_else(|| Error::Parse(format!("unknown object {name:?}")))
    };
    gens.iter()
        .enumerate()
        .map(|(i, g)| {
            Ok(Generator {
                source: idx(&g.source)?,
                target: idx(&g.target)?,
                degree: g.degree,
                label: if g.label.is_empty() { format!("g{i}") } else { g.label.clone() },
            })
        })
        .collect()
}

impl AInftyStructure {
    pub fn to_json(&self) -> AInftyJson {
        let mut ops = Vec::new();
        for d in 1..=self.max_arity {
            for (k, v) in self.op(d) {
                ops.push(OpEntryJson { inputs: k.clone(), output: vec_to_json(v) });
            }
        }
        AInftyJson {
            objects: self.objects.clone(),
            generators: gens_to_json(&self.objects, &self.gens),
            max_arity: self.max_arity,
            ops,
        }
    }

    pub fn from_json(j: &AInftyJson) -> Result<Self, Error> {
        let gens = gens_from_json(&j.objects, &j.generators)?;
        let arity = j.ops.iter().map(|e| e.inputs.len()).max().unwrap_or(1).max(j.max_arity);
        let mut a = AInftyStructure::new(j.objects.clone(), gens, arity)?;
        for e in &j.ops {
            let v = vec_from_json(&e.output)?;
            if a.op(e.inputs.len()).contains_key(&e.inputs) {
                return Err(Error::Parse(format!("duplicate entry {:?}", e.inputs)));
            }
            a.set_op(e.inputs.clone(), v)?;
        }
        Ok(a)
    }
}

/// P, I, H per generator, with the target basis.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TransferJson {
    pub target_generators: Vec<GeneratorJson>,
    pub p: Vec<Vec<(usize, String)>>,
    pub i: Vec<Vec<(usize, String)>>,
    pub h: Vec<Vec<(usize, String)>>,
}

impl TransferData {
    pub fn to_json(&self, objects: &[String]) -> TransferJson {
        TransferJson {
            target_generators: gens_to_json(objects, &self.target_gens),
            p: self.p.iter().map(vec_to_json).collect(),
            i: self.i.iter().map(vec_to_json).collect(),
            h: self.h.iter().map(vec_to_json).collect(),
        }
    }

    pub fn from_json(objects: &[String], j: &TransferJson) -> Result<Self, Error> {
        let conv = |m: &[Vec<(usize, String)>]| m.iter().map(|v| vec_from_json(v)).collect::<Result<Vec<_>, _>>();
        Ok(TransferData {
            target_gens: gens_from_json(objects, &j.target_generators)?,
            p: conv(&j.p)?,
            i: conv(&j.i)?,
            h: conv(&j.h)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::simplicial_cochains;

    #[test]
    fn round_trip() {
        let dg = simplicial_cochains(&[vec![0], vec![1], vec![0, 1]]).unwrap();
        let a = AInftyStructure::from_dg(&dg, 4).unwrap();
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let b = AInftyStructure::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!(a.same_as(&b));
    }
}
