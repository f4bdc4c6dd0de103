//! Finite regular cell complexes with stratifications.

mod presets;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::homalg::{parse_q, Q};
use crate::Error;

pub use presets::{preset, subdivided_circle, subdivided_interval, PRESETS};

pub type CellSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub label: String,
    pub cells: CellSet,
    /// Declared complex dimension; half the real dimension on real strata.
    pub cx_dim: Q,
    pub is_complex: bool,
}

/// Cell complex given by its face poset and signed incidences, partitioned into strata.
#[derive(Clone, Debug)]
pub struct StratifiedComplex {
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
    incidences: Vec<(usize, usize, i64)>,
    strata: Vec<Stratum>,
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
    below: Vec<CellSet>,
    above: Vec<CellSet>,
}

/// Upward-closed set of cells.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpenSet(CellSet);

impl OpenSet {
    pub fn cells(&self) -> &CellSet {
        &self.0
    }
    pub fn contains(&self, c: usize) -> bool {
        self.0.contains(&c)
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
    pub fn intersect(&self, other: &OpenSet) -> OpenSet {
        OpenSet(self.0.intersection(&other.0).copied().collect())
    }
    pub fn union(&self, other: &OpenSet) -> OpenSet {
        OpenSet(self.0.union(&other.0).copied().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// ∂∂τ has a nonzero coefficient on ρ.
    BoundarySquare { cell: String, face: String, coefficient: i64 },
    Grading { cell: String, face: String },
    Partition { cell: String, strata: Vec<String> },
    Frontier { stratum: String, closure_of: String },
    /// Warning only.
    Disconnected { stratum: String, components: usize },
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        !matches!(self, Diagnostic::Disconnected { .. })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::BoundarySquare { cell, face, coefficient } => {
                write!(f, "∂∂({cell}) has coefficient {coefficient} on {face}")
            }
            Diagnostic::Grading { cell, face } => {
                write!(f, "incidence {cell} > {face} does not drop dimension by one")
            }
            Diagnostic::Partition { cell, strata } => {
                write!(f, "cell {cell} lies in {} strata {:?}", strata.len(), strata)
            }
            Diagnostic::Frontier { stratum, closure_of } => write!(
                f,
                "stratum {stratum} meets the closure of {closure_of} without lying in its frontier"
            ),
            Diagnostic::Disconnected { stratum, components } => {
                write!(f, "warning: stratum {stratum} has {components} components")
            }
        }
    }
}

impl StratifiedComplex {
    /// Builds the complex. Structural problems (unknown ids, duplicate cells, zero signs)
    /// are errors; violated invariants are left to [`StratifiedComplex::validate`].
    pub fn new(
        cells: Vec<Cell>,
        incidences: Vec<(String, String, i64)>,
        strata: Vec<(String, Vec<String>, Q, bool)>,
    ) -> Result<Self, Error> {
        let mut index = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            if index.insert(c.id.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate cell {:?}", c.id)));
            }
        }
        let look = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownCell(s.to_string()));
        let mut inc = Vec::new();
        for (t, s, e) in &incidences {
            if *e == 0 {
                return Err(Error::Invalid(format!("zero incidence {t} > {s}")));
            }
            inc.push((look(t)?, look(s)?, *e));
        }
        let mut st = Vec::new();
        for (label, cs, cx_dim, is_complex) in strata {
            let cells = cs.iter().map(|c| look(c)).collect::<Result<CellSet, _>>()?;
            st.push(Stratum { label, cells, cx_dim, is_complex });
        }
        let n = cells.len();
        let mut facets = vec![Vec::new(); n];
        let mut cofacets = vec![Vec::new(); n];
        for &(t, s, _) in &inc {
            facets[t].push(s);
            cofacets[s].push(t);
        }
        for v in facets.iter_mut().chain(cofacets.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        let mut out = StratifiedComplex {
            cells,
            index,
            incidences: inc,
            strata: st,
            facets,
            cofacets,
            below: vec![],
            above: vec![],
        };
        out.below = (0..n).map(|i| out.reach(i, &out.facets)).collect();
        out.above = (0..n).map(|i| out.reach(i, &out.cofacets)).collect();
        if (0..n).any(|i| out.below[i].iter().any(|&j| j != i && out.below[j].contains(&i))) {
            return Err(Error::Invalid("face relation has a cycle".into()));
        }
        Ok(out)
    }

    fn reach(&self, start: usize, step: &[Vec<usize>]) -> CellSet {
        let mut seen = CellSet::new();
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(step[c].iter().copied());
            }
        }
        seen
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.cells[i].id
    }

    pub fn dim(&self, i: usize) -> usize {
        self.cells[i].dim
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn cell_index(&self, id: &str) -> Result<usize, Error> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    pub fn names(&self, set: &CellSet) -> Vec<String> {
        set.iter().map(|&i| self.name(i).to_string()).collect()
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum_index(&self, label: &str) -> Result<usize, Error> {
        self.strata
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::Invalid(format!("unknown stratum {label:?}")))
    }

    /// Index of the first stratum containing the cell.
    pub fn stratum_of(&self, cell: usize) -> Option<usize> {
        self.strata.iter().position(|s| s.cells.contains(&cell))
    }

    /// Covering pairs as (τ, σ, [τ:σ]) with σ a facet of τ.
    pub fn incidences(&self) -> &[(usize, usize, i64)] {
        &self.incidences
    }

    pub fn incidence(&self, tau: usize, sigma: usize) -> i64 {
        self.incidences
            .iter()
            .filter(|&&(t, s, _)| t == tau && s == sigma)
            .map(|&(_, _, e)| e)
            .sum()
    }

    pub fn facets(&self, i: usize) -> &[usize] {
        &self.facets[i]
    }

    pub fn cofacets(&self, i: usize) -> &[usize] {
        &self.cofacets[i]
    }

    /// σ ≤ τ in the face poset.
    pub fn leq(&self, sigma: usize, tau: usize) -> bool {
        self.below[tau].contains(&sigma)
    }

    /// All faces of σ, including σ.
    pub fn faces(&self, sigma: usize) -> &CellSet {
        &self.below[sigma]
    }

    pub fn whole(&self) -> OpenSet {
        OpenSet((0..self.cells.len()).collect())
    }

    pub fn empty_open(&self) -> OpenSet {
        OpenSet(CellSet::new())
    }

    pub fn is_open(&self, set: &CellSet) -> bool {
        set.iter().all(|&c| self.cofacets[c].iter().all(|t| set.contains(t)))
    }

    pub fn is_closed(&self, set: &CellSet) -> bool {
        set.iter().all(|&c| self.facets[c].iter().all(|t| set.contains(t)))
    }

    pub fn open_set(&self, set: CellSet) -> Result<OpenSet, Error> {
        if let Some(&c) = set.iter().find(|&&c| c >= self.cells.len()) {
            return Err(Error::UnknownCell(format!("#{c}")));
        }
        if !self.is_open(&set) {
            return Err(Error::Invalid(format!(
                "{:?} is not upward-closed",
                self.names(&set)
            )));
        }
        Ok(OpenSet(set))
    }

    pub fn open_by_names(&self, names: &[&str]) -> Result<OpenSet, Error> {
        let set = names.iter().map(|n| self.cell_index(n)).collect::<Result<CellSet, _>>()?;
        self.open_set(set)
    }

    /// {τ : τ ≥ σ}.
    pub fn open_star(&self, sigma: usize) -> OpenSet {
        OpenSet(self.above[sigma].clone())
    }

    /// Smallest open set containing the given cells.
    pub fn open_hull(&self, cells: &CellSet) -> OpenSet {
        OpenSet(cells.iter().flat_map(|&c| self.above[c].iter().copied()).collect())
    }

    pub fn closure(&self, cells: &CellSet) -> CellSet {
        cells.iter().flat_map(|&c| self.below[c].iter().copied()).collect()
    }

    /// closure(star σ) ∖ star σ ∖ faces(σ).
    pub fn link(&self, sigma: usize) -> CellSet {
        let star = &self.above[sigma];
        self.closure(star)
            .into_iter()
            .filter(|c| !star.contains(c) && !self.below[sigma].contains(c))
            .collect()
    }

    pub fn complement(&self, set: &CellSet) -> CellSet {
        (0..self.cells.len()).filter(|c| !set.contains(c)).collect()
    }

    /// The cover {X, X − cl S_α, X − ∂S_α}, deduplicated, empty sets dropped.
    /// Each entry carries a display name.
    pub fn standard_cover(&self) -> Vec<(String, OpenSet)> {
        let mut out: Vec<(String, OpenSet)> = vec![("X".into(), self.whole())];
        let mut push = |name: String, set: CellSet| {
            let o = OpenSet(set);
            if !o.is_empty() && !out.iter().any(|(_, p)| *p == o) {
                out.push((name, o));
            }
        };
        for s in &self.strata {
            let cl = self.closure(&s.cells);
            push(format!("X-cl({})", s.label), self.complement(&cl));
            let frontier: CellSet = cl.difference(&s.cells).copied().collect();
            push(format!("X-fr({})", s.label), self.complement(&frontier));
        }
        out
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        for &(t, s, _) in &self.incidences {
            if self.dim(t) != self.dim(s) + 1 {
                diags.push(Diagnostic::Grading {
                    cell: self.name(t).into(),
                    face: self.name(s).into(),
                });
            }
        }
        for t in 0..self.cells.len() {
            let mut coeff: BTreeMap<usize, i64> = BTreeMap::new();
            for &(tt, s, e) in &self.incidences {
                if tt != t {
                    continue;
                }
                for &(ss, r, f) in &self.incidences {
                    if ss == s {
                        *coeff.entry(r).or_default() += e * f;
                    }
                }
            }
            for (r, c) in coeff {
                if c != 0 {
                    diags.push(Diagnostic::BoundarySquare {
                        cell: self.name(t).into(),
                        face: self.name(r).into(),
                        coefficient: c,
                    });
                }
            }
        }
        for c in 0..self.cells.len() {
            let holders: Vec<String> = self
                .strata
                .iter()
                .filter(|s| s.cells.contains(&c))
                .map(|s| s.label.clone())
                .collect();
            if holders.len() != 1 {
                diags.push(Diagnostic::Partition { cell: self.name(c).into(), strata: holders });
            }
        }
        for (a, sa) in self.strata.iter().enumerate() {
            for (b, sb) in self.strata.iter().enumerate() {
                if a == b {
                    continue;
                }
                let cl = self.closure(&sb.cells);
                let meets = sa.cells.iter().any(|c| cl.contains(c));
                let inside = sa.cells.iter().all(|c| cl.contains(c) && !sb.cells.contains(c));
                if meets && !inside {
                    diags.push(Diagnostic::Frontier {
                        stratum: sa.label.clone(),
                        closure_of: sb.label.clone(),
                    });
                }
            }
        }
        for s in &self.strata {
            let k = self.components(&s.cells);
            if k > 1 {
                diags.push(Diagnostic::Disconnected { stratum: s.label.clone(), components: k });
            }
        }
        diags
    }

    pub fn is_valid(&self) -> bool {
        self.validate().iter().all(|d| !d.is_error())
    }

    fn components(&self, set: &CellSet) -> usize {
        let mut seen = CellSet::new();
        let mut k = 0;
        for &c in set {
            if seen.contains(&c) {
                continue;
            }
            k += 1;
            let mut stack = vec![c];
            while let Some(x) = stack.pop() {
                if !seen.insert(x) {
                    continue;
                }
                for &y in self.facets[x].iter().chain(&self.cofacets[x]) {
                    if set.contains(&y) && !seen.contains(&y) {
                        stack.push(y);
                    }
                }
            }
        }
        k
    }

    /// Real dimension of a stratum: the largest cell dimension in it.
    pub fn stratum_real_dim(&self, a: usize) -> usize {
        self.strata[a].cells.iter().map(|&c| self.dim(c)).max().unwrap_or(0)
    }

    /// Declared complex dimension as an integer, if it is one.
    pub fn stratum_cx_dim(&self, a: usize) -> Option<i32> {
        let d = &self.strata[a].cx_dim;
        d.is_integer().then(|| d.to_integer().try_into().ok()).flatten()
    }

    /// True when every stratum is a complex stratum with integer complex dimension.
    pub fn is_complex_stratified(&self) -> bool {
        (0..self.strata.len()).all(|a| self.strata[a].is_complex && self.stratum_cx_dim(a).is_some())
    }

    pub fn to_json(&self) -> SpaceJson {
        SpaceJson {
            cells: self
                .cells
                .iter()
                .map(|c| CellJson { id: c.id.clone(), dim: c.dim })
                .collect(),
            incidences: self
                .incidences
                .iter()
                .map(|&(t, s, e)| (self.name(t).into(), self.name(s).into(), e))
                .collect(),
            strata: self
                .strata
                .iter()
                .map(|s| StratumJson {
                    label: s.label.clone(),
                    cells: self.names(&s.cells),
                    cx_dim: CxDim::from_q(&s.cx_dim),
                    is_complex: s.is_complex,
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SpaceJson) -> Result<Self, Error> {
        let cells = j.cells.iter().map(|c| Cell { id: c.id.clone(), dim: c.dim }).collect();
        let strata = j
            .strata
            .iter()
            .map(|s| Ok((s.label.clone(), s.cells.clone(), s.cx_dim.to_q()?, s.is_complex)))
            .collect::<Result<Vec<_>, Error>>()?;
        Self::new(cells, j.incidences.clone(), strata)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellJson {
    pub id: String,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StratumJson {
    pub label: String,
    pub cells: Vec<String>,
    pub cx_dim: CxDim,
    #[serde(default)]
    pub is_complex: bool,
}

/// Complex dimension on the wire: an integer or a rational string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CxDim {
    Int(i64),
    Text(String),
}

impl CxDim {
    fn from_q(x: &Q) -> Self {
        if x.is_integer() {
            CxDim::Int(x.to_integer().try_into().unwrap_or(i64::MAX))
        } else {
            CxDim::Text(x.to_string())
        }
    }
    fn to_q(&self) -> Result<Q, Error> {
        match self {
            CxDim::Int(n) => Ok(Q::from_integer((*n).into())),
            CxDim::Text(s) => parse_q(s),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpaceJson {
    pub cells: Vec<CellJson>,
    pub incidences: Vec<(String, String, i64)>,
    pub strata: Vec<StratumJson>,
}

/// Half the real dimension, as declared on real strata.
pub(crate) fn half(n: usize) -> Q {
    Q::new((n as i64).into(), 2.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &StratifiedComplex, names: &[&str]) -> CellSet {
        names.iter().map(|n| s.cell_index(n).unwrap()).collect()
    }

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            let s = preset(name).unwrap();
            let errs: Vec<_> = s.validate().into_iter().filter(Diagnostic::is_error).collect();
            assert!(errs.is_empty(), "{name}: {errs:?}");
        }
    }

    #[test]
    fn interval_stars() {
        let s = preset("interval").unwrap();
        let b = s.cell_index("b").unwrap();
        let e = s.cell_index("e").unwrap();
        assert_eq!(s.open_star(b).cells(), &set(&s, &["b", "e"]));
        assert_eq!(s.open_star(e).cells(), &set(&s, &["e"]));
        assert_eq!(s.link(b), set(&s, &["a"]));
    }

    #[test]
    fn p1_star_of_p0() {
        let s = preset("p1").unwrap();
        let p0 = s.cell_index("p0").unwrap();
        assert_eq!(s.open_star(p0).cells(), &set(&s, &["p0", "e0", "e1", "f+", "f-"]));
    }

    #[test]
    fn broken_sign_is_named() {
        let mut j = preset("disc").unwrap().to_json();
        let k = j.incidences.iter().position(|i| i.0 == "f0" && i.1 == "b0").unwrap();
        j.incidences[k].2 *= -1;
        let s = StratifiedComplex::from_json(&j).unwrap();
        let d = s.validate();
        assert!(d.iter().any(|x| matches!(x,
            Diagnostic::BoundarySquare { cell, .. } if cell == "f0")));
    }

    fn stratum(label: &str, cells: &[&str]) -> StratumJson {
        StratumJson {
            label: label.into(),
            cells: cells.iter().map(|c| c.to_string()).collect(),
            cx_dim: CxDim::Int(0),
            is_complex: false,
        }
    }

    #[test]
    fn frontier_condition() {
        let mut j = preset("interval").unwrap().to_json();
        j.strata = vec![stratum("e", &["e"]), stratum("ab", &["a", "b"])];
        assert!(StratifiedComplex::from_json(&j).unwrap().is_valid());
        let mut c = preset("circle").unwrap().to_json();
        c.strata = vec![stratum("A", &["v0", "e0"]), stratum("B", &["v1", "e1"])];
        let d = StratifiedComplex::from_json(&c).unwrap().validate();
        assert!(d.iter().any(|x| matches!(x, Diagnostic::Frontier { .. })));
    }

    #[test]
    fn cover_sizes() {
        assert_eq!(preset("p1").unwrap().standard_cover().len(), 4);
        assert_eq!(preset("s2").unwrap().standard_cover().len(), 1);
        assert_eq!(preset("interval").unwrap().standard_cover().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        for name in PRESETS {
            let s = preset(name).unwrap();
            let text = serde_json::to_string(&s.to_json()).unwrap();
            let back: SpaceJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back, s.to_json());
        }
    }
}
