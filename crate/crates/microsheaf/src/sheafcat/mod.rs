//! Constructible sheaf complexes as functors on the face poset.

pub mod corpus;
mod decompose;
mod json;
pub mod nerve;
mod standard;

use std::collections::HashMap;
use std::sync::Arc;

use crate::homalg::{ChainMap, CochainComplex, Matrix};
use crate::stratspace::{CellSet, OpenSet, StratifiedComplex};
use crate::Error;

pub use decompose::{decompose_into_standards, Decomposition, DecompositionTree, SectionsLine};
pub use json::{ChainMapJson, SheafJson, SpaceRef};
pub use nerve::{Nerve, Sections};
pub use standard::{
    adjunction_triangles, compose_hom, costandard_object, hom_standard, standard_object,
    verdier_dual, HomComplex, Triangle,
};

/// F(σ) for every cell and generization maps F(σ) → F(τ) for σ ≤ τ.
#[derive(Clone, Debug)]
pub struct SheafComplex {
    space: Arc<StratifiedComplex>,
    stalks: Vec<CochainComplex>,
    gens: HashMap<(usize, usize), ChainMap>,
}

impl SheafComplex {
    /// `covering` holds a map for every covering pair σ ⋖ τ; composites along longer
    /// chains are computed here and must not depend on the path.
    pub fn new(
        space: Arc<StratifiedComplex>,
        stalks: Vec<CochainComplex>,
        covering: HashMap<(usize, usize), ChainMap>,
    ) -> Result<Self, Error> {
        let n = space.num_cells();
        if stalks.len() != n {
            return Err(Error::Dimension(format!("{} stalks for {n} cells", stalks.len())));
        }
        for &(t, s, _) in space.incidences() {
            let g = covering.get(&(s, t)).ok_or_else(|| {
                Error::Invalid(format!("missing generization {} < {}", space.name(s), space.name(t)))
            })?;
            if g.source != stalks[s] || g.target != stalks[t] {
                return Err(Error::Invalid(format!(
                    "generization {} < {} has wrong endpoints",
                    space.name(s),
                    space.name(t)
                )));
            }
        }
        let mut gens: HashMap<(usize, usize), ChainMap> = HashMap::new();
        for s in 0..n {
            gens.insert((s, s), ChainMap::identity(&stalks[s]));
        }
        // fill pairs in order of increasing dimension gap
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|s| space.open_star(s).iter().filter(move |&t| t != s).map(move |t| (s, t)).collect::<Vec<_>>())
            .collect();
        pairs.sort_by_key(|&(s, t)| (space.dim(t) as i64 - space.dim(s) as i64, s, t));
        for (s, t) in pairs {
            let mut found: Option<ChainMap> = None;
            for &m in space.cofacets(s) {
                if !space.leq(m, t) {
                    continue;
                }
                let first = &covering[&(s, m)];
                let comp = if m == t {
                    first.clone()
                } else {
                    first.then(&gens[&(m, t)])?
                };
                match &found {
                    None => found = Some(comp),
                    Some(prev) => {
                        if !same_map(prev, &comp) {
                            return Err(Error::Invalid(format!(
                                "generizations from {} to {} depend on the path",
                                space.name(s),
                                space.name(t)
                            )));
                        }
                    }
                }
            }
            gens.insert((s, t), found.expect("a chain of covering pairs exists"));
        }
        Ok(SheafComplex { space, stalks, gens })
    }

    pub fn space(&self) -> &StratifiedComplex {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<StratifiedComplex> {
        &self.space
    }

    pub fn stalk(&self, sigma: usize) -> &CochainComplex {
        &self.stalks[sigma]
    }

    pub fn stalks(&self) -> &[CochainComplex] {
        &self.stalks
    }

    /// Generization F(σ) → F(τ) for σ ≤ τ.
    pub fn gen(&self, sigma: usize, tau: usize) -> &ChainMap {
        self.gens
            .get(&(sigma, tau))
            .unwrap_or_else(|| panic!("cells {sigma} and {tau} are not comparable"))
    }

    /// Smallest and largest degree over all stalks.
    pub fn degree_range(&self) -> (i32, i32) {
        let nz: Vec<&CochainComplex> = self.stalks.iter().filter(|c| !c.dims().is_empty()).collect();
        let lo = nz.iter().map(|c| c.lo()).min().unwrap_or(0);
        let hi = nz.iter().map(|c| c.hi()).max().unwrap_or(-1);
        (lo, hi)
    }

    pub fn zero(space: Arc<StratifiedComplex>) -> Self {
        let n = space.num_cells();
        Self::constant_like(space, vec![CochainComplex::zero(); n], |_, _| Matrix::zeros(0, 0))
    }

    /// ℚ in degree 0 on every cell with identity generizations.
    pub fn constant(space: Arc<StratifiedComplex>) -> Self {
        let n = space.num_cells();
        Self::constant_like(space, vec![CochainComplex::concentrated(0, 1); n], |_, _| {
            Matrix::identity(1)
        })
    }

    /// Stalks concentrated in degree 0, with the given degree-0 generization on covering pairs.
    pub fn constant_like(
        space: Arc<StratifiedComplex>,
        stalks: Vec<CochainComplex>,
        map: impl Fn(usize, usize) -> Matrix,
    ) -> Self {
        let mut cov = HashMap::new();
        for &(t, s, _) in space.incidences() {
            let m = ChainMap::new(stalks[s].clone(), stalks[t].clone(), 0, vec![map(s, t)])
                .expect("degree-zero map");
            cov.insert((s, t), m);
        }
        SheafComplex::new(space, stalks, cov).expect("functorial")
    }

    /// ℚ in degree 0 on `support`, zero elsewhere.
    pub fn skyscraper_on(space: Arc<StratifiedComplex>, support: &CellSet) -> Result<Self, Error> {
        let n = space.num_cells();
        let stalks = (0..n)
            .map(|c| CochainComplex::concentrated(0, usize::from(support.contains(&c))))
            .collect();
        let mut cov = HashMap::new();
        for &(t, s, _) in space.incidences() {
            let a = CochainComplex::concentrated(0, usize::from(support.contains(&s)));
            let b = CochainComplex::concentrated(0, usize::from(support.contains(&t)));
            let m = if a.dim(0) == 1 && b.dim(0) == 1 { Matrix::identity(1) } else { Matrix::zeros(b.dim(0), a.dim(0)) };
            cov.insert((s, t), ChainMap::new(a, b, 0, vec![m])?);
        }
        SheafComplex::new(space, stalks, cov)
    }

    pub fn covering_gens(&self) -> HashMap<(usize, usize), ChainMap> {
        self.space
            .incidences()
            .iter()
            .map(|&(t, s, _)| ((s, t), self.gens[&(s, t)].clone()))
            .collect()
    }

    pub fn shift(&self, n: i32) -> Self {
        let stalks: Vec<_> = self.stalks.iter().map(|c| c.shift(n)).collect();
        let cov = self
            .covering_gens()
            .into_iter()
            .map(|((s, t), g)| ((s, t), shift_map(&g, &stalks[s], &stalks[t], n)))
            .collect();
        SheafComplex::new(self.space.clone(), stalks, cov).expect("shift preserves functoriality")
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let zero = SheafMap::zero(&self.shift(-1), other);
        zero.cone()
    }

    pub fn sections(&self, u: &OpenSet) -> CochainComplex {
        nerve::sections(self, u.cells()).complex
    }

    pub fn sections_layout(&self, u: &OpenSet) -> Sections {
        nerve::sections(self, u.cells())
    }

    /// Restriction RΓ(U) → RΓ(V); V must be contained in U.
    pub fn restriction(&self, u: &OpenSet, v: &OpenSet) -> Result<ChainMap, Error> {
        if !v.cells().is_subset(u.cells()) {
            return Err(Error::Invalid("restriction to a set that is not contained".into()));
        }
        Ok(nerve::restriction(&self.sections_layout(u), &self.sections_layout(v)))
    }

    pub fn compact_sections(&self, u: &OpenSet) -> CochainComplex {
        nerve::compact_sections(self, u.cells()).complex
    }

    pub fn stalk_cohomology(&self, sigma: usize) -> Vec<(i32, usize)> {
        self.stalks[sigma].betti_numbers()
    }

    /// fib(RΓ(star σ) → RΓ(star σ ∖ σ)), before any dimension shift.
    pub fn costalk(&self, sigma: usize) -> CochainComplex {
        let star = self.space.open_star(sigma);
        let mut rest = star.cells().clone();
        rest.remove(&sigma);
        let punctured = self.space.open_set(rest).expect("star minus its base is open");
        self.restriction(&star, &punctured).expect("subset").fiber()
    }

    /// Some generization inside a stratum fails to be a quasi-isomorphism.
    pub fn constructibility_defects(&self) -> Vec<(usize, usize)> {
        let sp = &self.space;
        let mut bad = Vec::new();
        for &(t, s, _) in sp.incidences() {
            if sp.stratum_of(s).is_some() && sp.stratum_of(s) == sp.stratum_of(t) && !self.gens[&(s, t)].is_quasi_isomorphism() {
                bad.push((s, t));
            }
        }
        bad
    }

    pub fn is_constructible(&self) -> bool {
        self.constructibility_defects().is_empty()
    }

    /// Literal equality of stalks and generizations.
    pub fn same_as(&self, other: &SheafComplex) -> bool {
        self.stalks == other.stalks
            && self
                .space
                .incidences()
                .iter()
                .all(|&(t, s, _)| same_map(&self.gens[&(s, t)], &other.gens[&(s, t)]))
    }

    pub fn is_zero_object(&self) -> bool {
        self.stalks.iter().all(CochainComplex::is_acyclic)
    }

    /// Sections dims on every open of the standard cover and every open star.
    pub fn fingerprint(&self) -> Vec<(String, Vec<(i32, usize)>)> {
        let sp = &self.space;
        let mut out: Vec<(String, Vec<(i32, usize)>)> = sp
            .standard_cover()
            .into_iter()
            .map(|(name, u)| (name, self.sections(&u).betti_numbers()))
            .collect();
        for c in 0..sp.num_cells() {
            out.push((format!("star({})", sp.name(c)), self.sections(&sp.open_star(c)).betti_numbers()));
        }
        out
    }
}

fn same_map(a: &ChainMap, b: &ChainMap) -> bool {
    let lo = a.source.lo().min(a.target.lo());
    let hi = a.source.hi().max(a.target.hi());
    (lo..=hi).all(|k| a.component(k) == b.component(k))
}

fn shift_map(g: &ChainMap, s: &CochainComplex, t: &CochainComplex, n: i32) -> ChainMap {
    let lo = s.lo().min(t.lo());
    let hi = s.hi().max(t.hi());
    let comps = (lo..=hi).map(|k| g.component(k + n)).collect();
    ChainMap::new(s.clone(), t.clone(), lo, comps).expect("shifted map")
}

/// Natural transformation of sheaf complexes, one chain map per cell.
#[derive(Clone, Debug)]
pub struct SheafMap {
    pub source: SheafComplex,
    pub target: SheafComplex,
    comps: Vec<ChainMap>,
}

impl SheafMap {
    pub fn new(source: SheafComplex, target: SheafComplex, comps: Vec<ChainMap>) -> Result<Self, Error> {
        let sp = source.space.clone();
        if comps.len() != sp.num_cells() {
            return Err(Error::Dimension("one component per cell".into()));
        }
        for &(t, s, _) in sp.incidences() {
            let lhs = comps[s].then(target.gen(s, t))?;
            let rhs = source.gen(s, t).then(&comps[t])?;
            if !same_map(&lhs, &rhs) {
                return Err(Error::Invalid(format!(
                    "map is not natural on {} < {}",
                    sp.name(s),
                    sp.name(t)
                )));
            }
        }
        Ok(SheafMap { source, target, comps })
    }

    pub fn zero(source: &SheafComplex, target: &SheafComplex) -> Self {
        let comps = (0..source.space.num_cells())
            .map(|c| ChainMap::zero(source.stalk(c), target.stalk(c)))
            .collect();
        SheafMap { source: source.clone(), target: target.clone(), comps }
    }

    pub fn identity(f: &SheafComplex) -> Self {
        let comps = f.stalks.iter().map(ChainMap::identity).collect();
        SheafMap { source: f.clone(), target: f.clone(), comps }
    }

    pub fn component(&self, sigma: usize) -> &ChainMap {
        &self.comps[sigma]
    }

    pub fn then(&self, other: &SheafMap) -> Result<SheafMap, Error> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.then(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SheafMap { source: self.source.clone(), target: other.target.clone(), comps })
    }

    pub fn scale(&self, c: &crate::homalg::Q) -> SheafMap {
        let comps = self
            .comps
            .iter()
            .map(|m| {
                let lo = m.source.lo().min(m.target.lo());
                let hi = m.source.hi().max(m.target.hi());
                ChainMap::new(m.source.clone(), m.target.clone(), lo, (lo..=hi).map(|k| m.component(k).scale(c)).collect())
                    .expect("scalar multiple")
            })
            .collect();
        SheafMap { source: self.source.clone(), target: self.target.clone(), comps }
    }

    pub fn add(&self, other: &SheafMap) -> SheafMap {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| {
                let lo = a.source.lo().min(a.target.lo());
                let hi = a.source.hi().max(a.target.hi());
                ChainMap::new(a.source.clone(), a.target.clone(), lo, (lo..=hi).map(|k| &a.component(k) + &b.component(k)).collect())
                    .expect("sum of chain maps")
            })
            .collect();
        SheafMap { source: self.source.clone(), target: self.target.clone(), comps }
    }

    /// Stalkwise mapping cone with block-diagonal generizations.
    pub fn cone(&self) -> SheafComplex {
        let sp = self.source.space.clone();
        let stalks: Vec<CochainComplex> = self.comps.iter().map(ChainMap::cone).collect();
        let mut cov = HashMap::new();
        for &(t, s, _) in sp.incidences() {
            let gs = self.source.gen(s, t);
            let gt = self.target.gen(s, t);
            let (a, b) = (&stalks[s], &stalks[t]);
            let lo = a.lo().min(b.lo());
            let hi = a.hi().max(b.hi());
            let comps = (lo..=hi)
                .map(|k| Matrix::direct_sum(&gs.component(k + 1), &gt.component(k)))
                .collect();
            cov.insert((s, t), ChainMap::new(a.clone(), b.clone(), lo, comps).expect("cone generization"));
        }
        SheafComplex::new(sp, stalks, cov).expect("cone is functorial")
    }

    /// Stalkwise fiber fib(φ) = cone(φ)[−1].
    pub fn fiber(&self) -> SheafComplex {
        self.cone().shift(-1)
    }

    /// Induced map on RΓ(U, −).
    pub fn on_sections(&self, u: &OpenSet) -> ChainMap {
        let s = self.source.sections_layout(u);
        let t = self.target.sections_layout(u);
        let (cs, ct) = (&s.complex, &t.complex);
        let lo = cs.lo().min(ct.lo());
        let hi = cs.hi().max(ct.hi());
        let mut comps = Vec::new();
        for n in lo..=hi {
            let mut m = Matrix::zeros(ct.dim(n), cs.dim(n));
            if n >= cs.lo() && n <= cs.hi() {
                for (b, off, _) in &s.blocks[(n - cs.lo()) as usize] {
                    let top = *b.chain.last().unwrap();
                    let k = self.comps[top].component(b.q);
                    if let Some((_, off2, _)) = t.offset(b) {
                        m.paste(off2, *off, &k);
                    }
                }
            }
            comps.push(m);
        }
        ChainMap::new(cs.clone(), ct.clone(), lo, comps).expect("induced map on sections")
    }

    /// Quasi-isomorphism on every stalk.
    pub fn is_quasi_isomorphism(&self) -> bool {
        self.comps.iter().all(ChainMap::is_quasi_isomorphism)
    }
}

/// The cells of `set` as an open set of `space`, or an error.
pub fn open_of(space: &StratifiedComplex, set: &CellSet) -> Result<OpenSet, Error> {
    space.open_set(set.clone())
}
