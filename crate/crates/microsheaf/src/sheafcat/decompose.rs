//! Writing a constructible sheaf as iterated cones of shifted standard objects.
//!
//! Strata are peeled off one closed stratum S at a time. With U the open rest,
//! F → T_U is a model on U, its cone C is supported on S, and C is matched against
//! copies of fib(i_*ℚ_Y → i_*ℚ_U) by solving for chain maps into the relative nerve
//! complex. Every step carries a strict map F → (tree evaluation), so the result is
//! certified stalkwise.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use super::nerve::{restriction, sections, Nerve};
use super::{standard_object, SheafComplex, SheafMap};
use crate::homalg::{sign, ChainMap, CochainComplex, Matrix, Q};
use crate::stratspace::{CellSet, OpenSet, StratifiedComplex};
use crate::Error;

#[derive(Clone, Debug)]
pub enum DecompositionTree {
    Zero,
    /// i_*ℚ_U[shift].
    Leaf { open: OpenSet, shift: i32 },
    /// cone(map)[shift]; `map` goes between the evaluations of the two subtrees.
    Cone { source: Box<DecompositionTree>, target: Box<DecompositionTree>, map: SheafMap, shift: i32 },
    Sum(Vec<DecompositionTree>),
}

impl DecompositionTree {
    pub fn evaluate(&self, space: &Arc<StratifiedComplex>) -> SheafComplex {
        match self {
            DecompositionTree::Zero => SheafComplex::zero(space.clone()),
            DecompositionTree::Leaf { open, shift } => standard_object(space, open).shift(*shift),
            DecompositionTree::Cone { map, shift, .. } => map.cone().shift(*shift),
            DecompositionTree::Sum(parts) => {
                let mut acc = SheafComplex::zero(space.clone());
                for p in parts {
                    acc = acc.direct_sum(&p.evaluate(space));
                }
                acc
            }
        }
    }

    pub fn leaves(&self) -> Vec<(OpenSet, i32)> {
        match self {
            DecompositionTree::Zero => vec![],
            DecompositionTree::Leaf { open, shift } => vec![(open.clone(), *shift)],
            DecompositionTree::Cone { source, target, shift, .. } => source
                .leaves()
                .into_iter()
                .chain(target.leaves())
                .map(|(o, s)| (o, s + shift))
                .collect(),
            DecompositionTree::Sum(p) => p.iter().flat_map(|t| t.leaves()).collect(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    /// Like Display, with opens named after the standard cover when they belong to it.
    pub fn render(&self, space: &StratifiedComplex) -> String {
        let cover = space.standard_cover();
        self.render_with(space, &cover)
    }

    fn render_with(&self, space: &StratifiedComplex, cover: &[(String, OpenSet)]) -> String {
        match self {
            DecompositionTree::Zero => "0".into(),
            DecompositionTree::Leaf { open, shift } => {
                let name = match cover.iter().find(|(_, u)| u == open) {
                    Some((n, _)) => n.clone(),
                    None => format!("{{{}}}", space.names(open.cells()).join(",")),
                };
                format!("std({name})[{shift}]")
            }
            DecompositionTree::Cone { source, target, shift, .. } => format!(
                "cone({} → {})[{shift}]",
                source.render_with(space, cover),
                target.render_with(space, cover)
            ),
            DecompositionTree::Sum(p) => {
                let s: Vec<String> = p.iter().map(|t| t.render_with(space, cover)).collect();
                format!("({})", s.join(" ⊕ "))
            }
        }
    }

    pub fn to_json(&self, space: &StratifiedComplex) -> Value {
        match self {
            DecompositionTree::Zero => json!({"zero": null}),
            DecompositionTree::Leaf { open, shift } => {
                json!({"leaf": {"open": space.names(open.cells()), "shift": shift}})
            }
            DecompositionTree::Cone { source, target, map, shift } => json!({
                "cone": [source.to_json(space), target.to_json(space), map_json(map)],
                "shift": shift
            }),
            DecompositionTree::Sum(p) => json!({"sum": p.iter().map(|t| t.to_json(space)).collect::<Vec<_>>()}),
        }
    }
}

fn map_json(m: &SheafMap) -> Value {
    let sp = m.source.space();
    let mut out = serde_json::Map::new();
    for c in 0..sp.num_cells() {
        let f = m.component(c);
        let lo = f.source.lo().min(f.target.lo());
        let hi = f.source.hi().max(f.target.hi());
        let comps: Vec<Vec<String>> = (lo..=hi).map(|k| f.component(k).to_strings()).collect();
        out.insert(sp.name(c).to_string(), json!({"degrees": [lo, hi], "comps": comps}));
    }
    Value::Object(out)
}

impl fmt::Display for DecompositionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionTree::Zero => write!(f, "0"),
            DecompositionTree::Leaf { open, shift } => write!(f, "std({} cells)[{shift}]", open.len()),
            DecompositionTree::Cone { source, target, shift, .. } => {
                write!(f, "cone({source} → {target})[{shift}]")
            }
            DecompositionTree::Sum(p) => {
                let s: Vec<String> = p.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", s.join(" ⊕ "))
            }
        }
    }
}

/// The tree, its evaluation, and a stalkwise quasi-isomorphism F → evaluation.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub tree: DecompositionTree,
    pub evaluation: SheafComplex,
    pub certificate: SheafMap,
}

/// RΓ(U, −) of the input and of the re-evaluated tree on one open.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionsLine {
    pub open: String,
    pub sheaf: Vec<(i32, usize)>,
    pub tree: Vec<(i32, usize)>,
    pub ok: bool,
}

impl Decomposition {
    /// Compares section dims of `f` and of the tree, evaluated afresh, on every open of the
    /// standard cover and every open star.
    pub fn sections_check(&self, f: &SheafComplex) -> Vec<SectionsLine> {
        let space = f.space_arc();
        let eval = self.tree.evaluate(space);
        let mut opens = space.standard_cover();
        opens.extend((0..space.num_cells()).map(|c| (format!("star({})", space.name(c)), space.open_star(c))));
        opens
            .into_iter()
            .map(|(open, u)| {
                let sheaf = f.sections(&u).betti_numbers();
                let tree = eval.sections(&u).betti_numbers();
                SectionsLine { ok: sheaf == tree, open, sheaf, tree }
            })
            .collect()
    }
}

pub fn decompose_into_standards(f: &SheafComplex) -> Result<Decomposition, Error> {
    let defects = f.constructibility_defects();
    if let Some(&(s, t)) = defects.first() {
        let sp = f.space();
        return Err(Error::Invalid(format!(
            "not constructible: generization {} < {} inside a stratum is not a quasi-isomorphism",
            sp.name(s),
            sp.name(t)
        )));
    }
    let space = f.space_arc().clone();
    for (_, v) in space.standard_cover() {
        let sv = standard_object(&space, &v);
        let m = sv.degree_range().0 - f.degree_range().0;
        if f.same_as(&sv.shift(m)) {
            return Ok(Decomposition {
                tree: DecompositionTree::Leaf { open: v, shift: m },
                evaluation: f.clone(),
                certificate: SheafMap::identity(f),
            });
        }
    }
    let all: CellSet = (0..space.num_cells()).collect();
    let (tree, evaluation, certificate) = build(f, &all)?;
    debug_assert!(certificate.is_quasi_isomorphism());
    Ok(Decomposition { tree, evaluation, certificate })
}

type Step = (DecompositionTree, SheafComplex, SheafMap);

fn build(f: &SheafComplex, y: &CellSet) -> Result<Step, Error> {
    let space = f.space_arc().clone();
    if y.is_empty() {
        let z = SheafComplex::zero(space.clone());
        return Ok((DecompositionTree::Zero, z.clone(), SheafMap::zero(f, &z)));
    }
    let s = closed_stratum(&space, y);
    let u: CellSet = y.difference(&s).copied().collect();
    let (tree_u, g, psi_u) = build(f, &u)?;
    let c = psi_u.cone();
    if s.iter().all(|&x| c.stalk(x).is_acyclic()) {
        return Ok((tree_u, g, psi_u));
    }
    let base = *s.iter().min_by_key(|&&x| (space.dim(x), x)).unwrap();
    let rel = RelativeNerve::new(&space, y, &s);
    let e = match rel.stalk(base).betti_numbers().as_slice() {
        [(e, 1)] => *e,
        _ => {
            return Err(Error::Invalid(format!(
                "stratum through {} has no one-dimensional local cohomology; it is not generated by standards",
                space.name(base)
            )))
        }
    };
    let yo = space.open_set(y.clone())?;
    let uo = space.open_set(u.clone())?;

    let hc = c.stalk(base).cohomology();
    let mut pieces: Vec<(i32, Vec<Vec<Q>>)> = Vec::new();
    for grp in hc.groups() {
        if grp.dim() == 0 {
            continue;
        }
        let m = e - grp.degree;
        for blocks in rel.matching_maps(&c, base, m, grp, e)? {
            pieces.push((m, blocks));
        }
    }

    // Z[m] = fib(i_*ℚ_Y → i_*ℚ_U)[m] for each selected class
    let (z_tree, z_sheaf, incl) = if u.is_empty() {
        let sy = standard_object(&space, &yo);
        let incl = rel.inclusion_into(&space, y, None);
        (None, sy, incl)
    } else {
        let rho = standard_restriction(&space, &yo, &uo);
        let z = rho.fiber();
        let incl = rel.inclusion_into(&space, y, Some(&u));
        (Some(rho), z, incl)
    };
    let mut parts = Vec::new();
    let mut target = SheafComplex::zero(space.clone());
    for (m, _) in &pieces {
        let node = match &z_tree {
            None => DecompositionTree::Leaf { open: yo.clone(), shift: *m },
            Some(rho) => DecompositionTree::Cone {
                source: Box::new(DecompositionTree::Leaf { open: yo.clone(), shift: 0 }),
                target: Box::new(DecompositionTree::Leaf { open: uo.clone(), shift: 0 }),
                map: rho.clone(),
                shift: m - 1,
            },
        };
        target = target.direct_sum(&z_sheaf.shift(*m));
        parts.push(node);
    }
    let sum_tree = DecompositionTree::Sum(parts);

    // Φ : C → ⊕ Z[m_i], stalk by stalk
    let n = space.num_cells();
    let mut phi_comps = Vec::with_capacity(n);
    for x in 0..n {
        let src = c.stalk(x);
        let tgt = target.stalk(x);
        let lo = src.lo().min(tgt.lo());
        let hi = src.hi().max(tgt.hi());
        let comps = (lo..=hi)
            .map(|k| {
                let mut rows: Option<Matrix> = None;
                for (m, blocks) in &pieces {
                    let r = rel.evaluate(&c, x, k, *m, blocks);
                    let zpart = &incl[x].component(k + m) * &r;
                    rows = Some(match rows {
                        None => zpart,
                        Some(prev) => prev.vstack(&zpart),
                    });
                }
                rows.unwrap_or_else(|| Matrix::zeros(tgt.dim(k), src.dim(k)))
            })
            .collect();
        phi_comps.push(ChainMap::new(src.clone(), tgt.clone(), lo, comps)?);
    }
    let phi = SheafMap::new(c.clone(), target.clone(), phi_comps)?;

    // χ = Φ ∘ (G → C), T_Y = fib(χ), Ψ = (ψ_U, −Φ∘s)
    let mut chi_comps = Vec::with_capacity(n);
    for x in 0..n {
        let gs = g.stalk(x);
        let tgt = target.stalk(x);
        let lo = gs.lo().min(tgt.lo());
        let hi = gs.hi().max(tgt.hi());
        let fx = f.stalk(x);
        let comps = (lo..=hi)
            .map(|k| {
                let full = phi.component(x).component(k);
                full.submatrix(0, full.rows(), fx.dim(k + 1), gs.dim(k))
            })
            .collect();
        chi_comps.push(ChainMap::new(gs.clone(), tgt.clone(), lo, comps)?);
    }
    let chi = SheafMap::new(g.clone(), target.clone(), chi_comps)?;
    let t_y = chi.fiber();
    let mut psi_comps = Vec::with_capacity(n);
    for x in 0..n {
        let fx = f.stalk(x);
        let tx = t_y.stalk(x);
        let lo = fx.lo().min(tx.lo());
        let hi = fx.hi().max(tx.hi());
        let comps = (lo..=hi)
            .map(|k| {
                let top = psi_u.component(x).component(k);
                let full = phi.component(x).component(k - 1);
                let bottom = -&full.submatrix(0, full.rows(), 0, fx.dim(k));
                top.vstack(&bottom)
            })
            .collect();
        psi_comps.push(ChainMap::new(fx.clone(), tx.clone(), lo, comps)?);
    }
    let psi = SheafMap::new(f.clone(), t_y.clone(), psi_comps)?;
    for &x in &s {
        if !psi.component(x).is_quasi_isomorphism() {
            return Err(Error::Invalid(format!(
                "local system along the stratum through {} is not a sum of constant ones",
                space.name(base)
            )));
        }
    }
    let tree = DecompositionTree::Cone {
        source: Box::new(tree_u),
        target: Box::new(sum_tree),
        map: chi,
        shift: -1,
    };
    Ok((tree, t_y, psi))
}

/// A stratum meeting Y whose trace on Y is closed in Y, lowest dimension first.
fn closed_stratum(space: &StratifiedComplex, y: &CellSet) -> CellSet {
    let mut best: Option<(usize, CellSet)> = None;
    for st in space.strata() {
        let s: CellSet = st.cells.intersection(y).copied().collect();
        if s.is_empty() {
            continue;
        }
        let closed = space.closure(&s).intersection(y).all(|c| s.contains(c));
        if !closed {
            continue;
        }
        let d = s.iter().map(|&c| space.dim(c)).max().unwrap_or(0);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, s));
        }
    }
    best.map(|(_, s)| s).unwrap_or_else(|| {
        // cells not covered by any stratum: peel a minimal cell
        let c = *y.iter().min_by_key(|&&c| (space.dim(c), c)).unwrap();
        [c].into_iter().collect()
    })
}

/// Restriction i_*ℚ_Y → i_*ℚ_U as a map of standard objects.
pub(crate) fn standard_restriction(space: &Arc<StratifiedComplex>, y: &OpenSet, u: &OpenSet) -> SheafMap {
    let constant = SheafComplex::constant(space.clone());
    let sy = standard_object(space, y);
    let su = standard_object(space, u);
    let comps = (0..space.num_cells())
        .map(|c| {
            let star = space.open_star(c);
            let a = sections(&constant, star.intersect(y).cells());
            let b = sections(&constant, star.intersect(u).cells());
            restriction(&a, &b)
        })
        .collect();
    SheafMap::new(sy, su, comps).expect("restriction is natural")
}

/// Nerve cochains on chains of Y that start in S: the kernel of i_*ℚ_Y → i_*ℚ_{Y∖S}.
/// Every coordinate is a chain, visible at σ exactly when σ ≤ its first cell.
struct RelativeNerve {
    atoms: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    stalks: Vec<CochainComplex>,
    present: Vec<Vec<Vec<usize>>>,
}

impl RelativeNerve {
    fn new(space: &StratifiedComplex, y: &CellSet, s: &CellSet) -> Self {
        let nerve = Nerve::new(space, y);
        let atoms: Vec<Vec<Vec<usize>>> = nerve
            .chains
            .iter()
            .map(|l| l.iter().filter(|c| s.contains(&c[0])).cloned().collect::<Vec<_>>())
            .collect();
        let index: Vec<HashMap<Vec<usize>, usize>> = atoms
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
            .collect();
        let n = space.num_cells();
        let mut stalks = Vec::with_capacity(n);
        let mut present = Vec::with_capacity(n);
        for x in 0..n {
            let pres: Vec<Vec<usize>> = atoms
                .iter()
                .map(|l| (0..l.len()).filter(|&i| space.leq(x, l[i][0])).collect())
                .collect();
            let dims: Vec<usize> = pres.iter().map(Vec::len).collect();
            let mut diffs = Vec::new();
            for p in 0..dims.len().saturating_sub(1) {
                let pos: HashMap<usize, usize> = pres[p].iter().enumerate().map(|(j, &i)| (i, j)).collect();
                let mut d = Matrix::zeros(dims[p + 1], dims[p]);
                for (r, &ai) in pres[p + 1].iter().enumerate() {
                    let a = &atoms[p + 1][ai];
                    for i in 0..a.len() {
                        let mut face = a.clone();
                        face.remove(i);
                        if let Some(&bi) = index[p].get(&face) {
                            if let Some(&col) = pos.get(&bi) {
                                d.add_at(r, col, &sign(i as i64));
                            }
                        }
                    }
                }
                diffs.push(d);
            }
            let cx = if dims.is_empty() {
                CochainComplex::zero()
            } else {
                CochainComplex::new(0, dims, diffs).expect("relative nerve")
            };
            stalks.push(cx);
            present.push(pres);
        }
        RelativeNerve { atoms, index, stalks, present }
    }

    fn stalk(&self, x: usize) -> &CochainComplex {
        &self.stalks[x]
    }

    /// Inclusion of the stalks into i_*ℚ_Y (U empty) or into fib(i_*ℚ_Y → i_*ℚ_U), per cell.
    fn inclusion_into(&self, space: &Arc<StratifiedComplex>, y: &CellSet, u: Option<&CellSet>) -> Vec<ChainMap> {
        let constant = SheafComplex::constant(space.clone());
        (0..space.num_cells())
            .map(|x| {
                let star = space.open_star(x);
                let sy = sections(&constant, &star.cells().intersection(y).copied().collect());
                let target = match u {
                    None => sy.complex.clone(),
                    Some(u) => {
                        let su = sections(&constant, &star.cells().intersection(u).copied().collect());
                        restriction(&sy, &su).fiber()
                    }
                };
                let src = &self.stalks[x];
                let lo = src.lo().min(target.lo());
                let hi = src.hi().max(target.hi());
                let comps = (lo..=hi)
                    .map(|p| {
                        let mut m = Matrix::zeros(target.dim(p), src.dim(p));
                        if p >= 0 && (p as usize) < self.present[x].len() {
                            for (j, &ai) in self.present[x][p as usize].iter().enumerate() {
                                let chain = &self.atoms[p as usize][ai];
                                let (_, off, _) = sy
                                    .offset(&super::nerve::Block { chain: chain.clone(), q: 0 })
                                    .expect("relative chain lies in Y");
                                m.set(off, j, crate::homalg::q(1));
                            }
                        }
                        m
                    })
                    .collect();
                ChainMap::new(src.clone(), target, lo, comps).expect("inclusion of the relative nerve")
            })
            .collect()
    }

    /// Unknown layout for chain maps C → R[m]: one row block per atom, acting on C(first cell)^{p−m}.
    fn layout(&self, c: &SheafComplex, m: i32) -> (Vec<(usize, usize, usize)>, usize) {
        let mut out = Vec::new();
        let mut off = 0;
        for (p, layer) in self.atoms.iter().enumerate() {
            for (i, a) in layer.iter().enumerate() {
                out.push((p, i, off));
                off += c.stalk(a[0]).dim(p as i32 - m);
            }
        }
        (out, off)
    }

    fn offset_of(&self, layout: &[(usize, usize, usize)], p: usize, i: usize) -> usize {
        let before: usize = self.atoms[..p].iter().map(Vec::len).sum();
        layout[before + i].2
    }

    /// Cocycles C → R[m] whose classes at `base` pair nondegenerately with the group `grp`.
    fn matching_maps(
        &self,
        c: &SheafComplex,
        base: usize,
        m: i32,
        grp: &crate::homalg::CohomologyGroup,
        e: i32,
    ) -> Result<Vec<Vec<Vec<Q>>>, Error> {
        let (layout, nvar) = self.layout(c, m);
        let sgn = sign(m as i64);
        let mut eqs: Vec<Vec<Q>> = Vec::new();
        for (p, layer) in self.atoms.iter().enumerate() {
            let t = p as i32 - m;
            for (i, a) in layer.iter().enumerate() {
                let ca = a[0];
                let cs = c.stalk(ca);
                let nx = cs.dim(t - 1);
                if nx == 0 {
                    continue;
                }
                let dc = cs.d(t - 1);
                let mut rows = vec![vec![Q::zero(); nvar]; nx];
                // − block_a · d_C
                let off_a = self.offset_of(&layout, p, i);
                for (xi, row) in rows.iter_mut().enumerate() {
                    for r in 0..dc.rows() {
                        let v = dc.get(r, xi);
                        if !v.is_zero() {
                            row[off_a + r] -= v;
                        }
                    }
                }
                // + (−1)^m Σ_faces (−1)^j block_b · gen(c_a → c_b)
                if p > 0 {
                    for j in 0..a.len() {
                        let mut face = a.clone();
                        face.remove(j);
                        let Some(&bi) = self.index[p - 1].get(&face) else { continue };
                        let off_b = self.offset_of(&layout, p - 1, bi);
                        let gen = c.gen(ca, face[0]).component(t - 1);
                        let coeff = &sgn * &sign(j as i64);
                        for (xi, row) in rows.iter_mut().enumerate() {
                            for r in 0..gen.rows() {
                                let v = gen.get(r, xi);
                                if !v.is_zero() {
                                    row[off_b + r] += &coeff * v;
                                }
                            }
                        }
                    }
                }
                eqs.extend(rows);
            }
        }
        let kernel = if eqs.is_empty() {
            Matrix::identity(nvar)
        } else {
            Matrix::from_rows(&eqs).kernel()
        };
        // pairing with H^{e−m}(C(base)) through the class map on H^e(R(base))
        let rb = &self.stalks[base];
        let hr = rb.cohomology();
        let g = hr.group(e).expect("local cohomology degree");
        let ell = g.class_functional();
        let reps = &grp.representatives;
        let k = grp.degree;
        let mut pairing = Matrix::zeros(reps.cols(), nvar);
        for (j, &ai) in self.present[base][e as usize].iter().enumerate() {
            let a = &self.atoms[e as usize][ai];
            let off = self.offset_of(&layout, e as usize, ai);
            let w = ell.get(0, j).clone();
            if w.is_zero() {
                continue;
            }
            let pushed = &c.gen(base, a[0]).component(k) * reps;
            for r in 0..reps.cols() {
                for v in 0..pushed.rows() {
                    let x = pushed.get(v, r);
                    if !x.is_zero() {
                        pairing.add_at(r, off + v, &(&w * x));
                    }
                }
            }
        }
        let values = &pairing * &kernel;
        let chosen = values.rref().pivots;
        if chosen.len() < reps.cols() {
            return Err(Error::Invalid(format!(
                "cohomology in degree {k} at the stratum base is not detected by constant coefficients"
            )));
        }
        let mut out = Vec::new();
        for &col in &chosen {
            let v = kernel.column(col);
            let mut blocks = Vec::new();
            for (p, i, off) in &layout {
                let a = &self.atoms[*p][*i];
                let len = c.stalk(a[0]).dim(*p as i32 - m);
                blocks.push(v[*off..*off + len].to_vec());
            }
            out.push(blocks);
        }
        Ok(out)
    }

    /// Stalk matrix at x in degree k of the map C → R[m] given by atom blocks.
    fn evaluate(&self, c: &SheafComplex, x: usize, k: i32, m: i32, blocks: &[Vec<Q>]) -> Matrix {
        let p = k + m;
        let cols = c.stalk(x).dim(k);
        if p < 0 || p as usize >= self.atoms.len() {
            return Matrix::zeros(0, cols);
        }
        let before: usize = self.atoms[..p as usize].iter().map(Vec::len).sum();
        let pres = &self.present[x][p as usize];
        let mut out = Matrix::zeros(pres.len(), cols);
        for (j, &ai) in pres.iter().enumerate() {
            let a = &self.atoms[p as usize][ai];
            let blk = &blocks[before + ai];
            if blk.is_empty() {
                continue;
            }
            let row = Matrix::from_rows(&[blk.clone()]);
            let r = &row * &c.gen(x, a[0]).component(k);
            for col in 0..cols {
                out.set(j, col, r.get(0, col).clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stratspace::preset;

    fn space(name: &str) -> Arc<StratifiedComplex> {
        Arc::new(preset(name).unwrap())
    }

    fn check(f: &SheafComplex) -> Decomposition {
        let d = decompose_into_standards(f).unwrap();
        assert!(d.certificate.is_quasi_isomorphism());
        let ev = d.tree.evaluate(f.space_arc());
        assert_eq!(ev.stalks(), d.evaluation.stalks());
        assert_eq!(ev.fingerprint(), f.fingerprint());
        d
    }

    #[test]
    fn constant_on_p1() {
        check(&SheafComplex::constant(space("p1")));
    }

    #[test]
    fn standard_is_a_single_leaf() {
        let x = space("p1");
        for (_, v) in x.standard_cover() {
            let f = standard_object(&x, &v).shift(2);
            let d = check(&f);
            assert_eq!(d.tree.leaf_count(), 1);
            assert_eq!(d.tree.leaves()[0], (v, 2));
        }
    }

    #[test]
    fn shifted_standard_on_p1() {
        let x = space("p1");
        let u = x.open_by_names(&["e0", "e1", "f+", "f-"]).unwrap();
        let f = standard_object(&x, &u).shift(1);
        let d = check(&f);
        assert!(d.tree.leaf_count() <= 7);
    }

    #[test]
    fn point_skyscraper_on_p1() {
        let x = space("p1");
        let p0 = x.cell_index("p0").unwrap();
        let f = SheafComplex::skyscraper_on(x.clone(), &[p0].into_iter().collect()).unwrap();
        check(&f);
    }

    #[test]
    fn origin_skyscraper_on_plane() {
        let x = space("c-origin");
        let o = x.cell_index("o").unwrap();
        let f = SheafComplex::skyscraper_on(x.clone(), &[o].into_iter().collect()).unwrap();
        check(&f);
    }

    #[test]
    fn circle_constant() {
        check(&SheafComplex::constant(space("circle")));
    }

    #[test]
    fn boundary_skyscraper_is_not_generated() {
        let x = space("interval");
        let b = x.cell_index("b").unwrap();
        let f = SheafComplex::skyscraper_on(x.clone(), &[b].into_iter().collect()).unwrap();
        assert!(decompose_into_standards(&f).is_err());
    }
}
