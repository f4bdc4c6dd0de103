use num::{One, Zero};
use serde::Serialize;

use super::category::{chain_label, Flow, MorseCategory};
use crate::ainfty::SparseVec;
use crate::homalg::Q;
use crate::Error;

/// One rigid Morse tree: a planar binary tree whose leaves follow descending flows out of the
/// inputs, whose interior edges follow homotopy flows, whose root follows the projection flow,
/// and whose vertices are cup products at nerve chains.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorseTree {
    /// Bracketing of the input slots, e.g. `((0 1) 2)`.
    pub shape: String,
    /// Product chains at the interior vertices, in post-order.
    pub vertices: Vec<String>,
    /// Generator paths of every edge in post-order, the root last.
    pub edges: Vec<Vec<String>>,
    #[serde(serialize_with = "crate::morse::ser_q")]
    pub weight: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeCount {
    #[serde(serialize_with = "crate::morse::ser_q")]
    pub count: Q,
    pub trees: Vec<MorseTree>,
}

struct Partial {
    gen: usize,
    weight: Q,
    shape: String,
    vertices: Vec<String>,
    edges: Vec<Vec<String>>,
}

fn path_labels(cat: &MorseCategory, f: &Flow) -> Vec<String> {
    f.path.iter().map(|&g| chain_label(&cat.space, &cat.chains[g])).collect()
}

fn configs(cat: &MorseCategory, inputs: &[usize], lo: usize, hi: usize, root: bool) -> Vec<Partial> {
    if hi - lo == 1 {
        return cat
            .stable_flows(inputs[lo])
            .into_iter()
            .map(|f| Partial {
                gen: f.end,
                edges: vec![path_labels(cat, &f)],
                weight: f.weight,
                shape: lo.to_string(),
                vertices: Vec::new(),
            })
            .collect();
    }
    let mut out = Vec::new();
    for m in lo + 1..hi {
        let left = configs(cat, inputs, lo, m, false);
        if left.is_empty() {
            continue;
        }
        let right = configs(cat, inputs, m, hi, false);
        for l in &left {
            for r in &right {
                // μ² on (l first, r second) is (−1)^{|l|} r·l
                let Some(&p) = cat.product.get(&(r.gen, l.gen)) else { continue };
                let mut w = &l.weight * &r.weight;
                if cat.dg.gens[l.gen].degree.rem_euclid(2) == 1 {
                    w = -w;
                }
                let flows = if root { cat.unstable_flows(p) } else { cat.homotopy_flows(p) };
                for f in flows {
                    let mut vertices = l.vertices.clone();
                    vertices.extend(r.vertices.iter().cloned());
                    vertices.push(chain_label(&cat.space, &cat.chains[p]));
                    let mut edges = l.edges.clone();
                    edges.extend(r.edges.iter().cloned());
                    edges.push(path_labels(cat, &f));
                    out.push(Partial {
                        gen: f.end,
                        weight: &w * &f.weight,
                        shape: format!("({} {})", l.shape, r.shape),
                        vertices,
                        edges,
                    });
                }
            }
        }
    }
    out
}

fn check_inputs(cat: &MorseCategory, inputs: &[usize]) -> Result<Vec<usize>, Error> {
    if inputs.is_empty() {
        return Err(Error::Invalid("no inputs".into()));
    }
    let gens: Vec<usize> = inputs
        .iter()
        .map(|&k| cat.critical.get(k).copied().ok_or_else(|| Error::Invalid(format!("no critical generator {k}"))))
        .collect::<Result<_, _>>()?;
    if !cat.dg.composable(&gens) {
        return Err(Error::Invalid("inputs are not composable".into()));
    }
    Ok(gens)
}

fn trees(cat: &MorseCategory, gens: &[usize]) -> Vec<Partial> {
    if gens.len() == 1 {
        let a = gens[0];
        let sign = if cat.dg.gens[a].degree.rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
        let mut out = Vec::new();
        for (e, c) in &cat.delta[a] {
            for f in cat.unstable_flows(*e) {
                let mut path = vec![chain_label(&cat.space, &cat.chains[a])];
                path.extend(path_labels(cat, &f));
                out.push(Partial {
                    gen: f.end,
                    weight: &sign * c * &f.weight,
                    shape: "0".into(),
                    vertices: Vec::new(),
                    edges: vec![path],
                });
            }
        }
        return out;
    }
    configs(cat, gens, 0, gens.len(), true)
}

/// Signed count of Morse trees with the given critical inputs (first-to-last) and output,
/// all as positions among the critical generators.
pub fn count_morse_trees(cat: &MorseCategory, inputs: &[usize], output: usize) -> Result<TreeCount, Error> {
    let gens = check_inputs(cat, inputs)?;
    let out = *cat.critical.get(output).ok_or_else(|| Error::Invalid(format!("no critical generator {output}")))?;
    let mut count = Q::zero();
    let mut list = Vec::new();
    for p in trees(cat, &gens) {
        if p.gen == out && !p.weight.is_zero() {
            count += &p.weight;
            list.push(MorseTree { shape: p.shape, vertices: p.vertices, edges: p.edges, weight: p.weight });
        }
    }
    Ok(TreeCount { count, trees: list })
}

/// m^k on basis inputs from tree counts, over critical positions.
pub fn morse_operation(cat: &MorseCategory, inputs: &[usize]) -> Result<SparseVec, Error> {
    let gens = check_inputs(cat, inputs)?;
    let mut out = SparseVec::new();
    for p in trees(cat, &gens) {
        let k = cat.critical_index(p.gen).expect("flows end at critical generators");
        *out.entry(k).or_insert_with(Q::zero) += &p.weight;
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// The multilinear extension of [`morse_operation`] to vectors over critical positions.
pub fn morse_operation_on(cat: &MorseCategory, inputs: &[&SparseVec]) -> Result<SparseVec, Error> {
    let mut out = SparseVec::new();
    let mut key = Vec::with_capacity(inputs.len());
    fn rec(
        cat: &MorseCategory,
        inputs: &[&SparseVec],
        key: &mut Vec<usize>,
        coeff: Q,
        out: &mut SparseVec,
    ) -> Result<(), Error> {
        if key.len() == inputs.len() {
            let gens: Vec<usize> = key.iter().map(|&k| cat.critical[k]).collect();
            if cat.dg.composable(&gens) {
                for (k, c) in morse_operation(cat, key)? {
                    *out.entry(k).or_insert_with(Q::zero) += &coeff * c;
                }
            }
            return Ok(());
        }
        for (k, c) in inputs[key.len()] {
            key.push(*k);
            rec(cat, inputs, key, &coeff * c, out)?;
            key.pop();
        }
        Ok(())
    }
    rec(cat, inputs, &mut key, Q::one(), &mut out)?;
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}
