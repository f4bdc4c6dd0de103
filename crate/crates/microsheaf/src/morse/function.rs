use std::collections::{BTreeMap, VecDeque};

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::homalg::{parse_q, Q};
use crate::sheafcat::SpaceRef;
use crate::stratspace::{CellSet, OpenSet, StratifiedComplex};
use crate::Error;

/// Gradient direction at a boundary vertex of the closed domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    /// The function decreases toward the vertex.
    In,
    /// The function increases toward the vertex.
    Out,
}

/// A piecewise-linear function on the closure of an open subset of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectedFunction {
    pub domain: OpenSet,
    /// Values on the vertices of the closed domain.
    pub values: BTreeMap<usize, Q>,
    /// One flag per vertex of cl(domain) ∖ domain.
    pub flags: BTreeMap<usize, Flag>,
}

pub(crate) fn require_graph(space: &StratifiedComplex) -> Result<(), Error> {
    if space.max_dim() > 1 {
        return Err(Error::Invalid(format!("Morse data needs a graph, got a {}-dimensional complex", space.max_dim())));
    }
    Ok(())
}

/// The vertex faces of an edge.
pub(crate) fn endpoints(space: &StratifiedComplex, e: usize) -> Vec<usize> {
    space.facets(e).to_vec()
}

fn closure_vertices(space: &StratifiedComplex, domain: &OpenSet) -> Vec<usize> {
    space.closure(domain.cells()).into_iter().filter(|&c| space.dim(c) == 0).collect()
}

impl DirectedFunction {
    /// Builds the function and derives its boundary flags.
    pub fn new(space: &StratifiedComplex, domain: OpenSet, values: BTreeMap<usize, Q>) -> Result<Self, Error> {
        require_graph(space)?;
        let flags = derive_flags(space, &domain, &values)?;
        let f = DirectedFunction { domain, values, flags };
        f.validate(space)?;
        Ok(f)
    }

    /// Values given by a rule on the vertices of the closed domain.
    pub fn from_fn(space: &StratifiedComplex, domain: OpenSet, rule: impl Fn(usize) -> Q) -> Result<Self, Error> {
        let values = closure_vertices(space, &domain).into_iter().map(|v| (v, rule(v))).collect();
        DirectedFunction::new(space, domain, values)
    }

    pub fn zero(space: &StratifiedComplex, domain: OpenSet) -> Result<Self, Error> {
        DirectedFunction::from_fn(space, domain, |_| Q::zero())
    }

    /// `slope` times the graph distance to the boundary vertices, so that every boundary flag is "in".
    pub fn tent(space: &StratifiedComplex, domain: OpenSet, slope: Q) -> Result<Self, Error> {
        require_graph(space)?;
        let verts = closure_vertices(space, &domain);
        let sources: Vec<usize> = verts.iter().copied().filter(|v| !domain.contains(*v)).collect();
        if sources.is_empty() {
            return Err(Error::Invalid("a tent needs a domain with boundary".into()));
        }
        let dist = distances(space, domain.cells(), &sources);
        DirectedFunction::from_fn(space, domain, |v| &slope * Q::from_integer(dist[&v].into()))
    }

    /// Checks the value keys, the Morse condition along domain edges and the flags.
    pub fn validate(&self, space: &StratifiedComplex) -> Result<(), Error> {
        require_graph(space)?;
        let verts = closure_vertices(space, &self.domain);
        if self.values.keys().copied().ne(verts.iter().copied()) {
            return Err(Error::Invalid("values must be given exactly on the vertices of the closed domain".into()));
        }
        for e in self.domain.iter().filter(|&c| space.dim(c) == 1) {
            let ends = endpoints(space, e);
            if ends.len() == 2 && self.values[&ends[0]] == self.values[&ends[1]] {
                return Err(Error::Invalid(format!("function is flat along {}", space.name(e))));
            }
        }
        let derived = derive_flags(space, &self.domain, &self.values)?;
        if derived != self.flags {
            let v = derived
                .iter()
                .find(|(v, f)| self.flags.get(v) != Some(f))
                .map(|(v, _)| *v)
                .or_else(|| self.flags.keys().find(|v| !derived.contains_key(v)).copied())
                .expect("flag maps differ");
            return Err(Error::Invalid(format!("flag at {} does not match the values", space.name(v))));
        }
        Ok(())
    }

    /// Value at a vertex, or the midpoint value at an edge.
    pub fn value(&self, space: &StratifiedComplex, cell: usize) -> Option<Q> {
        if space.dim(cell) == 0 {
            return self.values.get(&cell).cloned();
        }
        let ends = endpoints(space, cell);
        let mut s = Q::zero();
        for v in &ends {
            s += self.values.get(v)?;
        }
        Some(s / Q::from_integer((ends.len() as i64).into()))
    }

    /// f + ε·ρ on the same domain, with flags recomputed.
    pub fn perturbed(&self, space: &StratifiedComplex, rho: &BTreeMap<usize, Q>, eps: &Q) -> Result<Self, Error> {
        let mut values = self.values.clone();
        for (v, x) in values.iter_mut() {
            let r = rho.get(v).ok_or_else(|| Error::Invalid(format!("perturbation misses {}", space.name(*v))))?;
            *x += eps * r;
        }
        DirectedFunction::new(space, self.domain.clone(), values)
    }

    pub fn to_json(&self, space: &StratifiedComplex, space_ref: SpaceRef) -> FunctionJson {
        FunctionJson {
            space: space_ref,
            domain_cells: space.names(self.domain.cells()),
            vertex_values: self.values.iter().map(|(v, x)| (space.name(*v).to_string(), x.to_string())).collect(),
            flags: self.flags.iter().map(|(v, f)| (space.name(*v).to_string(), *f)).collect(),
        }
    }

    /// Reads a function on an already resolved space; given flags must agree with the values.
    pub fn from_json_on(space: &StratifiedComplex, j: &FunctionJson) -> Result<Self, Error> {
        let cells = j.domain_cells.iter().map(|n| space.cell_index(n)).collect::<Result<CellSet, _>>()?;
        let domain = space.open_set(cells)?;
        let mut values = BTreeMap::new();
        for (n, s) in &j.vertex_values {
            values.insert(space.cell_index(n)?, parse_q(s)?);
        }
        let mut f = DirectedFunction::new(space, domain, values)?;
        if !j.flags.is_empty() {
            let mut flags = BTreeMap::new();
            for (n, fl) in &j.flags {
                flags.insert(space.cell_index(n)?, *fl);
            }
            f.flags = flags;
            f.validate(space)?;
        }
        Ok(f)
    }
}

/// Function JSON: `{space, domain_cells, vertex_values: {v: "p/q"}, flags: {v: "in"/"out"}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FunctionJson {
    pub space: SpaceRef,
    pub domain_cells: Vec<String>,
    pub vertex_values: BTreeMap<String, String>,
    #[serde(default)]
    pub flags: BTreeMap<String, Flag>,
}

fn derive_flags(
    space: &StratifiedComplex,
    domain: &OpenSet,
    values: &BTreeMap<usize, Q>,
) -> Result<BTreeMap<usize, Flag>, Error> {
    let mut flags = BTreeMap::new();
    for v in closure_vertices(space, domain) {
        if domain.contains(v) {
            continue;
        }
        let fv = values.get(&v).ok_or_else(|| Error::Invalid(format!("no value at {}", space.name(v))))?;
        let mut seen: Option<Flag> = None;
        for &e in space.cofacets(v) {
            if !domain.contains(e) {
                continue;
            }
            for w in endpoints(space, e).into_iter().filter(|&w| w != v) {
                let fw = values.get(&w).ok_or_else(|| Error::Invalid(format!("no value at {}", space.name(w))))?;
                let here = match fv.cmp(fw) {
                    std::cmp::Ordering::Greater => Flag::Out,
                    std::cmp::Ordering::Less => Flag::In,
                    std::cmp::Ordering::Equal => {
                        return Err(Error::Invalid(format!("function is flat along {}", space.name(e))))
                    }
                };
                if seen.is_some_and(|s| s != here) {
                    return Err(Error::Invalid(format!("gradient at {} is neither inward nor outward", space.name(v))));
                }
                seen = Some(here);
            }
        }
        if let Some(f) = seen {
            flags.insert(v, f);
        }
    }
    Ok(flags)
}

/// Breadth-first graph distance from `sources` through the edges of `cells`.
pub(crate) fn distances(space: &StratifiedComplex, cells: &CellSet, sources: &[usize]) -> BTreeMap<usize, i64> {
    let mut dist: BTreeMap<usize, i64> = sources.iter().map(|&s| (s, 0)).collect();
    let mut queue: VecDeque<usize> = sources.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for &e in space.cofacets(v) {
            if !cells.contains(&e) {
                continue;
            }
            for w in endpoints(space, e) {
                if !dist.contains_key(&w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

/// ρ = −(graph distance to `center`) on every vertex: a Morse function with a single maximum
/// on a path or an even cycle.
pub fn bump(space: &StratifiedComplex, center: usize) -> BTreeMap<usize, Q> {
    let all: CellSet = (0..space.num_cells()).collect();
    distances(space, &all, &[center]).into_iter().map(|(v, d)| (v, -Q::from_integer(d.into()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homalg::q;
    use crate::stratspace::subdivided_interval;

    #[test]
    fn tent_flags_point_inward() {
        let s = subdivided_interval(8).unwrap();
        let v: CellSet = (1..8).chain(9..17).collect();
        let f = DirectedFunction::tent(&s, s.open_set(v).unwrap(), q(1)).unwrap();
        assert_eq!(f.flags.values().copied().collect::<Vec<_>>(), vec![Flag::In, Flag::In]);
        assert_eq!(f.values[&4], q(4));
        assert_eq!(f.value(&s, 9 + 3).unwrap(), Q::new(7.into(), 2.into()));
    }

    #[test]
    fn flat_edge_is_named() {
        let s = subdivided_interval(2).unwrap();
        let err = DirectedFunction::zero(&s, s.whole()).unwrap_err().to_string();
        assert!(err.contains("flat along e0"), "{err}");
    }

    #[test]
    fn wrong_flag_rejected() {
        let s = subdivided_interval(2).unwrap();
        let dom = s.open_by_names(&["v1", "e0", "e1"]).unwrap();
        let f = DirectedFunction::tent(&s, dom, q(1)).unwrap();
        let mut j = f.to_json(&s, SpaceRef::Preset("interval".into()));
        j.flags.insert("v0".into(), Flag::Out);
        assert!(DirectedFunction::from_json_on(&s, &j).is_err());
        j.flags.insert("v0".into(), Flag::In);
        assert_eq!(DirectedFunction::from_json_on(&s, &j).unwrap(), f);
    }
}
