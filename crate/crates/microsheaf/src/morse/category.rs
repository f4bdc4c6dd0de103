use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::{One, Zero};

use super::function::{endpoints, require_graph, DirectedFunction};
use crate::ainfty::{AInftyStructure, DgData, Generator, SparseVec, TransferData};
use crate::homalg::{CochainComplex, Matrix, Q};
use crate::microloc::MorseDatum;
use crate::stratspace::{CellSet, OpenSet, StratifiedComplex};
use crate::Error;

/// How an object meets the nerve: a standard object i_*ℚ_U, or a local Morse brane
/// supported on the star of a cell, relative to its negative part.
#[derive(Clone, Debug, PartialEq)]
pub enum ObjectKind {
    Standard { open: OpenSet },
    Brane { datum: MorseDatum },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorseObject {
    pub name: String,
    pub kind: ObjectKind,
    pub function: DirectedFunction,
}

impl MorseObject {
    pub fn standard(space: &StratifiedComplex, name: &str, function: DirectedFunction) -> Result<Self, Error> {
        function.validate(space)?;
        let open = function.domain.clone();
        Ok(MorseObject { name: name.into(), kind: ObjectKind::Standard { open }, function })
    }

    /// A brane with a given function on the closed star of the datum's cell.
    pub fn brane(
        space: &StratifiedComplex,
        name: &str,
        datum: MorseDatum,
        function: DirectedFunction,
    ) -> Result<Self, Error> {
        datum.validate(space)?;
        function.validate(space)?;
        if function.domain != space.open_star(datum.cell) {
            return Err(Error::Invalid(format!("brane {name} needs a function on the star of its cell")));
        }
        Ok(MorseObject { name: name.into(), kind: ObjectKind::Brane { datum }, function })
    }

    /// A brane whose function is 0 at the base vertex, −1 across negative edges and +1 elsewhere.
    pub fn default_brane(space: &StratifiedComplex, name: &str, datum: MorseDatum) -> Result<Self, Error> {
        require_graph(space)?;
        if space.dim(datum.cell) != 0 {
            return Err(Error::Invalid("a brane is based at a vertex".into()));
        }
        let star = space.open_star(datum.cell);
        let mut values = BTreeMap::new();
        values.insert(datum.cell, Q::zero());
        for e in star.iter().filter(|&e| e != datum.cell) {
            let v = if datum.negative.contains(&e) { -Q::one() } else { Q::one() };
            for w in endpoints(space, e).into_iter().filter(|&w| w != datum.cell) {
                values.insert(w, v.clone());
            }
        }
        let f = DirectedFunction::new(space, star, values)?;
        MorseObject::brane(space, name, datum, f)
    }

    pub fn is_brane(&self) -> bool {
        matches!(self.kind, ObjectKind::Brane { .. })
    }

    /// (D, T, N): hom into U is cochains on chains of U ∩ D whose top lies in T and whose
    /// first cell avoids N.
    fn region(&self, space: &StratifiedComplex) -> (CellSet, CellSet, CellSet) {
        match &self.kind {
            ObjectKind::Standard { open } => ((0..space.num_cells()).collect(), open.cells().clone(), CellSet::new()),
            ObjectKind::Brane { datum } => {
                let w = space.open_star(datum.cell).cells().clone();
                (w.clone(), w, datum.negative.clone())
            }
        }
    }
}

pub(crate) fn chain_label(space: &StratifiedComplex, chain: &[usize]) -> String {
    chain.iter().map(|&c| space.name(c)).collect::<Vec<_>>().join("<")
}

/// The discrete gradient of f_t − f_s on the generators of hom(s, t).
#[derive(Clone, Debug)]
pub struct PairGradient {
    pub source: usize,
    pub target: usize,
    /// Generator chains: single cells (degree 0), then vertex < edge pairs (degree 1).
    pub chains: Vec<Vec<usize>>,
    /// f_t − f_s on every nerve vertex that occurs in a chain.
    pub values: BTreeMap<usize, Q>,
    /// Matched (degree-0 chain, degree-1 chain), as local indices.
    pub matching: Vec<(usize, usize)>,
    pub critical: Vec<usize>,
    /// The pair of cell sets whose relative cohomology the hom computes.
    pub relative_pair: (CellSet, CellSet),
}

fn pair_gradient(
    space: &StratifiedComplex,
    objects: &[MorseObject],
    si: usize,
    ti: usize,
) -> Result<PairGradient, Error> {
    let (s, t) = (&objects[si], &objects[ti]);
    let ObjectKind::Standard { open: ut } = &t.kind else {
        return Err(Error::Invalid(format!("{} is a brane and can only come first", t.name)));
    };
    let (d, top, neg) = s.region(space);
    let cells: CellSet = ut.cells().intersection(&d).copied().collect();
    let mut chains: Vec<Vec<usize>> = cells.iter().filter(|c| top.contains(c) && !neg.contains(c)).map(|&c| vec![c]).collect();
    for &e in cells.iter().filter(|&&e| space.dim(e) == 1 && top.contains(&e)) {
        for v in endpoints(space, e) {
            if cells.contains(&v) && !neg.contains(&v) {
                chains.push(vec![v, e]);
            }
        }
    }
    chains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: HashMap<&[usize], usize> = chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let pair_name = format!("{} − {}", t.name, s.name);
    let mut values = BTreeMap::new();
    for &c in chains.iter().flatten() {
        if values.contains_key(&c) {
            continue;
        }
        let ft = t.function.value(space, c);
        let fs = s.function.value(space, c);
        match (ft, fs) {
            (Some(a), Some(b)) => values.insert(c, a - b),
            _ => return Err(Error::Invalid(format!("{pair_name} is undefined at {}", space.name(c)))),
        };
    }
    let is_gen = |c: usize| index.contains_key([c].as_slice());
    for ch in chains.iter().filter(|c| c.len() == 2) {
        let (v, e) = (ch[0], ch[1]);
        if values[&v] == values[&e] {
            return Err(Error::Invalid(format!("{pair_name} is flat along {}", space.name(e))));
        }
        for (x, y) in [(v, e), (e, v)] {
            if !is_gen(x) && values[&x] < values[&y] {
                return Err(Error::Invalid(format!(
                    "{pair_name} is not directed: the gradient must point out at {}",
                    space.name(x)
                )));
            }
        }
    }
    // ends of the hom region that leave U_t need an inward gradient
    for ch in chains.iter().filter(|c| c.len() == 1 && space.dim(c[0]) == 1) {
        let e = ch[0];
        let ends = endpoints(space, e);
        for &v in ends.iter().filter(|&&v| !ut.contains(v)) {
            let w = ends.iter().copied().find(|&w| w != v);
            let (Some(fv), Some(fw)) = (diff_at(space, s, t, v), w.and_then(|w| diff_at(space, s, t, w))) else {
                continue;
            };
            if fv >= fw {
                return Err(Error::Invalid(format!(
                    "{pair_name} is not directed: the gradient must point in at {}",
                    space.name(v)
                )));
            }
        }
    }
    let mut edge_used = vec![false; chains.len()];
    let mut matching = Vec::new();
    let mut matched = vec![false; chains.len()];
    for x in 0..chains.len() {
        if chains[x].len() != 1 {
            continue;
        }
        let c = chains[x][0];
        let mut best: Option<(usize, usize)> = None;
        for (k, ch) in chains.iter().enumerate().filter(|(_, ch)| ch.len() == 2 && ch.contains(&c)) {
            let y = if ch[0] == c { ch[1] } else { ch[0] };
            if values[&y] <= values[&c] {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, b)) => values[&y] > values[&b] || (values[&y] == values[&b] && y < b),
            };
            if better {
                best = Some((k, y));
            }
        }
        if let Some((k, _)) = best {
            debug_assert!(!edge_used[k]);
            edge_used[k] = true;
            matched[x] = true;
            matched[k] = true;
            matching.push((x, k));
        }
    }
    let critical = (0..chains.len()).filter(|&k| !matched[k]).collect();
    let rel: CellSet = cells.iter().copied().filter(|c| !top.contains(c) || neg.contains(c)).collect();
    Ok(PairGradient { source: si, target: ti, chains, values, matching, critical, relative_pair: (cells, rel) })
}

fn diff_at(space: &StratifiedComplex, s: &MorseObject, t: &MorseObject, c: usize) -> Option<Q> {
    Some(t.function.value(space, c)? - s.function.value(space, c)?)
}

/// One gradient trajectory: where it ends, its weight, and the generators it passes.
#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    pub end: usize,
    pub weight: Q,
    pub path: Vec<usize>,
}

/// The directed category of a sequence of objects: hom(i, j) is the nerve cochain model for
/// i < j, ℚ·1 for i = j and zero for i > j, together with the discrete gradients.
#[derive(Clone, Debug)]
pub struct MorseCategory {
    pub space: Arc<StratifiedComplex>,
    pub objects: Vec<MorseObject>,
    /// The chain-level dg category, as an A∞ structure.
    pub dg: Arc<AInftyStructure>,
    /// Nerve chain of each generator; empty for identities.
    pub chains: Vec<Vec<usize>>,
    pub pairs: BTreeMap<(usize, usize), PairGradient>,
    /// Cochain differential δ per generator.
    pub delta: Vec<SparseVec>,
    /// (y, x) ↦ y·x for composable basis elements with a nonzero product.
    pub product: HashMap<(usize, usize), usize>,
    /// Matched pairs on generator indices.
    pub matching: Vec<(usize, usize)>,
    /// Unmatched generators in index order; position k is generator k of the minimal model.
    pub critical: Vec<usize>,
    up: Vec<Option<(usize, Q)>>,
    down: Vec<Option<(usize, Q)>>,
    crit_pos: HashMap<usize, usize>,
}

impl MorseCategory {
    pub fn new(space: Arc<StratifiedComplex>, objects: Vec<MorseObject>, max_arity: usize) -> Result<Self, Error> {
        require_graph(&space)?;
        if objects.is_empty() {
            return Err(Error::Invalid("no objects".into()));
        }
        for (k, o) in objects.iter().enumerate() {
            o.function.validate(&space)?;
            if k > 0 && o.is_brane() {
                return Err(Error::Invalid(format!("brane {} must be the first object", o.name)));
            }
            if let ObjectKind::Standard { open } = &o.kind {
                if *open != o.function.domain {
                    return Err(Error::Invalid(format!("function of {} lives on a different open set", o.name)));
                }
            }
        }
        let n = objects.len();
        let mut gens = Vec::new();
        let mut chains = Vec::new();
        let mut units = Vec::with_capacity(n);
        let mut pairs = BTreeMap::new();
        let mut gen_of: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
        let mut local: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            units.push(gens.len());
            gens.push(Generator { source: i, target: i, degree: 0, label: format!("1_{}", objects[i].name) });
            chains.push(Vec::new());
            for j in i + 1..n {
                let pg = pair_gradient(&space, &objects, i, j)?;
                let mut ids = Vec::with_capacity(pg.chains.len());
                for ch in &pg.chains {
                    ids.push(gens.len());
                    gen_of.insert((i, j, ch.clone()), gens.len());
                    gens.push(Generator {
                        source: i,
                        target: j,
                        degree: ch.len() as i32 - 1,
                        label: format!("{}→{}:{}", objects[i].name, objects[j].name, chain_label(&space, ch)),
                    });
                    chains.push(ch.clone());
                }
                local.insert((i, j), ids);
                pairs.insert((i, j), pg);
            }
        }
        let ng = gens.len();
        let mut delta = vec![SparseVec::new(); ng];
        for (&(i, j), ids) in &local {
            for &g in ids {
                let ch = &chains[g];
                if ch.len() != 2 {
                    continue;
                }
                // faces of [v, e]: dropping v gives +[e], dropping e gives −[v]
                for (face, c) in [(ch[1], Q::one()), (ch[0], -Q::one())] {
                    if let Some(&f) = gen_of.get(&(i, j, vec![face])) {
                        delta[f].insert(g, c);
                    }
                }
            }
        }
        let mut product = HashMap::new();
        for g in 0..ng {
            let (s, t) = (gens[g].source, gens[g].target);
            product.insert((units[t], g), g);
            if s != t {
                product.insert((g, units[s]), g);
            }
        }
        for (&(i, j), a1s) in &local {
            for (&(j2, k), a2s) in local.range((j, j + 1)..(j + 1, 0)) {
                debug_assert_eq!(j, j2);
                for &a1 in a1s {
                    for &a2 in a2s {
                        let (c1, c2) = (&chains[a1], &chains[a2]);
                        if c2.last() != c1.first() {
                            continue;
                        }
                        let mut c = c2.clone();
                        c.extend_from_slice(&c1[1..]);
                        if let Some(&g) = gen_of.get(&(i, k, c)) {
                            product.insert((a2, a1), g);
                        }
                    }
                }
            }
        }
        let dg_data = DgData {
            objects: objects.iter().map(|o| o.name.clone()).collect(),
            gens,
            differential: delta.clone(),
            product: product.iter().map(|(&k, &g)| (k, crate::ainfty::unit_vec(g))).collect(),
        };
        let dg = Arc::new(AInftyStructure::from_dg(&dg_data, max_arity.max(2))?);
        let mut matching = Vec::new();
        for (&(i, j), pg) in &pairs {
            let ids = &local[&(i, j)];
            matching.extend(pg.matching.iter().map(|&(x, y)| (ids[x], ids[y])));
        }
        matching.sort_unstable();
        let mut up = vec![None; ng];
        let mut down = vec![None; ng];
        for &(x, y) in &matching {
            let c = delta[x][&y].clone();
            up[x] = Some((y, c.clone()));
            down[y] = Some((x, c));
        }
        let critical: Vec<usize> = (0..ng).filter(|&g| up[g].is_none() && down[g].is_none()).collect();
        let crit_pos = critical.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        Ok(MorseCategory { space, objects, dg, chains, pairs, delta, product, matching, critical, up, down, crit_pos })
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn label(&self, g: usize) -> &str {
        &self.dg.gens[g].label
    }

    /// Position of a generator among the critical ones.
    pub fn critical_index(&self, g: usize) -> Option<usize> {
        self.crit_pos.get(&g).copied()
    }

    pub fn is_critical(&self, g: usize) -> bool {
        self.crit_pos.contains_key(&g)
    }

    /// P, I, H of the gradient, ready for the homotopy transfer.
    pub fn flow_projection(&self) -> Result<TransferData, Error> {
        TransferData::from_matching(&self.dg, &self.matching)
    }

    fn step_from(&self, z: usize, skip: usize) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.delta[z].iter().filter(move |(e, _)| **e != skip).map(|(e, c)| (*e, c))
    }

    /// Descending trajectories out of a generator: the terms of I(a) = Σ (h₀δ′)ⁿ a.
    pub fn stable_flows(&self, a: usize) -> Vec<Flow> {
        let mut out = Vec::new();
        self.stable_rec(a, Q::one(), vec![a], &mut out);
        out
    }

    fn stable_rec(&self, u: usize, w: Q, path: Vec<usize>, out: &mut Vec<Flow>) {
        out.push(Flow { end: u, weight: w.clone(), path: path.clone() });
        let skip = self.up[u].as_ref().map_or(usize::MAX, |(e, _)| *e);
        for (e, c) in self.step_from(u, skip) {
            if let Some((z, c2)) = &self.down[e] {
                let mut p = path.clone();
                p.extend([e, *z]);
                self.stable_rec(*z, -(&w * c) / c2, p, out);
            }
        }
    }

    /// Trajectories from a generator to critical ones: the terms of P(u) = p₀ Σ (δ′h₀)ⁿ u.
    pub fn unstable_flows(&self, u: usize) -> Vec<Flow> {
        let mut out = Vec::new();
        self.unstable_rec(u, Q::one(), vec![u], &mut out);
        out
    }

    fn unstable_rec(&self, u: usize, w: Q, path: Vec<usize>, out: &mut Vec<Flow>) {
        if self.is_critical(u) {
            out.push(Flow { end: u, weight: w, path });
            return;
        }
        if let Some((z, c2)) = &self.down[u] {
            let w = -w / c2;
            for (e, c) in self.step_from(*z, u) {
                let mut p = path.clone();
                p.extend([*z, e]);
                self.unstable_rec(e, &w * c, p, out);
            }
        }
    }

    /// The terms of H(u) = h₀ Σ (δ′h₀)ⁿ u.
    pub fn homotopy_flows(&self, u: usize) -> Vec<Flow> {
        let mut out = Vec::new();
        self.homotopy_rec(u, Q::one(), vec![u], &mut out);
        out
    }

    fn homotopy_rec(&self, u: usize, w: Q, path: Vec<usize>, out: &mut Vec<Flow>) {
        if let Some((z, c2)) = &self.down[u] {
            let w = -w / c2;
            let mut p = path.clone();
            p.push(*z);
            out.push(Flow { end: *z, weight: w.clone(), path: p.clone() });
            for (e, c) in self.step_from(*z, u) {
                let mut q = p.clone();
                q.push(e);
                self.homotopy_rec(e, &w * c, q, out);
            }
        }
    }

    /// Signed counts of gradient paths from a critical generator to critical generators
    /// one degree up, as a vector over critical positions.
    pub fn morse_differential(&self, a: usize) -> SparseVec {
        let mut out = SparseVec::new();
        for (e, c) in self.delta[a].iter() {
            for f in self.unstable_flows(*e) {
                let k = self.crit_pos[&f.end];
                let v = out.entry(k).or_insert_with(Q::zero);
                *v += c * &f.weight;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// The Morse complex of hom(i, j) for i < j.
    pub fn morse_complex(&self, i: usize, j: usize) -> Result<MorseComplexResult, Error> {
        let pg = self.pairs.get(&(i, j)).ok_or_else(|| Error::Invalid(format!("no hom from {i} to {j}")))?;
        let gens: Vec<usize> = self.critical.iter().copied().filter(|&g| {
            let x = &self.dg.gens[g];
            x.source == i && x.target == j
        }).collect();
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for &g in &gens {
            by_degree.entry(self.dg.gens[g].degree).or_default().push(g);
        }
        for list in by_degree.values_mut() {
            list.sort_by(|a, b| self.chains[*a].cmp(&self.chains[*b]));
        }
        let zero = Vec::new();
        let d0 = by_degree.get(&0).unwrap_or(&zero);
        let d1 = by_degree.get(&1).unwrap_or(&zero);
        let mut differential = Matrix::zeros(d1.len(), d0.len());
        for (col, &a) in d0.iter().enumerate() {
            let v = self.morse_differential(a);
            for (k, c) in v {
                let b = self.critical[k];
                let row = d1.iter().position(|&x| x == b).ok_or_else(|| {
                    Error::Invalid(format!("gradient path from {} leaves the hom", self.label(a)))
                })?;
                differential.set(row, col, c);
            }
        }
        let complex = CochainComplex::new(0, vec![d0.len(), d1.len()], vec![differential.clone()])?;
        let critical = d0
            .iter()
            .chain(d1.iter())
            .map(|&g| CriticalCell {
                generator: g,
                chain: self.chains[g].iter().map(|&c| self.space.name(c).to_string()).collect(),
                degree: self.dg.gens[g].degree,
                value: pg.values[self.chains[g].last().expect("nonempty chain")].clone(),
            })
            .collect();
        Ok(MorseComplexResult {
            source: self.objects[i].name.clone(),
            target: self.objects[j].name.clone(),
            critical,
            dims: complex.betti_numbers(),
            differential,
            complex,
            relative_pair: (self.space.names(&pg.relative_pair.0), self.space.names(&pg.relative_pair.1)),
            convention: CONVENTION.into(),
        })
    }
}

/// The degree convention fixed against the relative-cohomology oracle.
pub const CONVENTION: &str =
    "degree = Morse index of f_source − f_target: local maxima of f_target − f_source sit in degree 0";

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalCell {
    pub generator: usize,
    pub chain: Vec<String>,
    pub degree: i32,
    /// f_target − f_source at the top cell of the chain.
    pub value: Q,
}

#[derive(Clone, Debug)]
pub struct MorseComplexResult {
    pub source: String,
    pub target: String,
    /// Degree 0 first, each degree ordered by chain.
    pub critical: Vec<CriticalCell>,
    /// Rows: degree-1 critical cells; columns: degree-0 critical cells.
    pub differential: Matrix,
    pub complex: CochainComplex,
    pub dims: Vec<(i32, usize)>,
    /// (A, B) with the hom computing H*(A, B), as cell names.
    pub relative_pair: (Vec<String>, Vec<String>),
    pub convention: String,
}

/// The Morse complex of an ordered pair of objects.
pub fn morse_complex(
    space: Arc<StratifiedComplex>,
    source: &MorseObject,
    target: &MorseObject,
) -> Result<MorseComplexResult, Error> {
    let cat = MorseCategory::new(space, vec![source.clone(), target.clone()], 2)?;
    cat.morse_complex(0, 1)
}
