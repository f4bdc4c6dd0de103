//! Chain enumeration and the total complexes computing RΓ and RΓ_c.

use std::collections::HashMap;

use crate::homalg::{sign, ChainMap, CochainComplex, Matrix};
use crate::stratspace::{CellSet, StratifiedComplex};

use super::SheafComplex;

/// Strictly increasing chains σ₀ < … < σ_p of a cell set, grouped by p.
#[derive(Clone, Debug)]
pub struct Nerve {
    pub chains: Vec<Vec<Vec<usize>>>,
    index: HashMap<Vec<usize>, usize>,
}

impl Nerve {
    pub fn new(space: &StratifiedComplex, cells: &CellSet) -> Self {
        let mut chains: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut layer: Vec<Vec<usize>> = cells.iter().map(|&c| vec![c]).collect();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for ch in &layer {
                let top = *ch.last().unwrap();
                for &c in cells {
                    if c != top && space.leq(top, c) {
                        let mut e = ch.clone();
                        e.push(c);
                        next.push(e);
                    }
                }
            }
            next.sort();
            chains.push(std::mem::replace(&mut layer, next));
        }
        let index = chains
            .iter()
            .flat_map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i)))
            .collect();
        Nerve { chains, index }
    }

    pub fn max_len(&self) -> usize {
        self.chains.len()
    }

    pub fn position(&self, chain: &[usize]) -> Option<usize> {
        self.index.get(chain).copied()
    }

    pub fn count(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }
}

/// One summand F(σ_p)^q of a section complex, indexed by its chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub chain: Vec<usize>,
    pub q: i32,
}

/// RΓ(U, F) with its block layout, so that restrictions and products can be assembled.
#[derive(Clone, Debug)]
pub struct Sections {
    pub complex: CochainComplex,
    pub blocks: Vec<Vec<(Block, usize, usize)>>,
    lookup: HashMap<Block, (i32, usize, usize)>,
}

impl Sections {
    pub fn offset(&self, b: &Block) -> Option<(i32, usize, usize)> {
        self.lookup.get(b).copied()
    }
}

fn layout(
    lo: i32,
    hi: i32,
    items: impl Fn(i32) -> Vec<(Block, usize)>,
) -> (Vec<Vec<(Block, usize, usize)>>, HashMap<Block, (i32, usize, usize)>, Vec<usize>) {
    let mut blocks = Vec::new();
    let mut lookup = HashMap::new();
    let mut dims = Vec::new();
    for n in lo..=hi {
        let mut off = 0;
        let mut row = Vec::new();
        for (b, d) in items(n) {
            if d == 0 {
                continue;
            }
            lookup.insert(b.clone(), (n, off, d));
            row.push((b, off, d));
            off += d;
        }
        dims.push(off);
        blocks.push(row);
    }
    (blocks, lookup, dims)
}

/// Total complex of C^{p,q} = ∏_{σ₀<…<σ_p ⊂ U} F(σ_p)^q with D = δ + (−1)^p d_F.
pub fn sections(f: &SheafComplex, cells: &CellSet) -> Sections {
    let space = f.space();
    let nerve = Nerve::new(space, cells);
    if nerve.max_len() == 0 {
        return Sections {
            complex: CochainComplex::zero(),
            blocks: vec![],
            lookup: HashMap::new(),
        };
    }
    let (flo, fhi) = f.degree_range();
    let lo = flo;
    let hi = fhi + nerve.max_len() as i32 - 1;
    let (blocks, lookup, dims) = layout(lo, hi, |n| {
        let mut v = Vec::new();
        for (p, layer) in nerve.chains.iter().enumerate() {
            let q = n - p as i32;
            for ch in layer {
                let d = f.stalk(*ch.last().unwrap()).dim(q);
                v.push((Block { chain: ch.clone(), q }, d));
            }
        }
        v
    });
    let mut diffs = Vec::new();
    for n in lo..hi {
        let i = (n - lo) as usize;
        let mut d = Matrix::zeros(dims[i + 1], dims[i]);
        for (b, off, _) in &blocks[i] {
            let p = b.chain.len() as i64 - 1;
            let top = *b.chain.last().unwrap();
            // internal differential
            if let Some(&(_, off2, _)) = lookup.get(&Block { chain: b.chain.clone(), q: b.q + 1 }) {
                let m = f.stalk(top).d(b.q).scale(&sign(p));
                d.paste(off2, *off, &m);
            }
            // insertions of a new cell at position i
            for target in cofaces_in_chain(space, cells, &b.chain) {
                let (pos, cell) = target;
                let mut e = b.chain.clone();
                e.insert(pos, cell);
                let Some(&(_, off2, _)) = lookup.get(&Block { chain: e, q: b.q }) else {
                    continue;
                };
                let s = sign(pos as i64);
                let m = if pos == b.chain.len() {
                    f.gen(top, cell).component(b.q).scale(&s)
                } else {
                    Matrix::identity(f.stalk(top).dim(b.q)).scale(&s)
                };
                add_block(&mut d, off2, *off, &m);
            }
        }
        diffs.push(d);
    }
    let complex = CochainComplex::new(lo, dims, diffs).expect("section complex squares to zero");
    Sections { complex, blocks, lookup }
}

/// (position, cell) pairs such that inserting the cell at the position gives a longer chain in `cells`.
fn cofaces_in_chain(
    space: &StratifiedComplex,
    cells: &CellSet,
    chain: &[usize],
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &c in cells {
        if chain.contains(&c) {
            continue;
        }
        let pos = chain.iter().take_while(|&&x| space.leq(x, c)).count();
        let fits_below = pos == chain.len() || space.leq(c, chain[pos]);
        let fits_above = pos == 0 || space.leq(chain[pos - 1], c);
        if fits_below && fits_above {
            out.push((pos, c));
        }
    }
    out
}

fn add_block(d: &mut Matrix, r0: usize, c0: usize, m: &Matrix) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = m.get(i, j);
            if !num::Zero::is_zero(x) {
                d.add_at(r0 + i, c0 + j, x);
            }
        }
    }
}

/// Restriction RΓ(U, F) → RΓ(V, F) for V ⊂ U: projection onto chains inside V.
pub fn restriction(src: &Sections, dst: &Sections) -> ChainMap {
    let (s, t) = (&src.complex, &dst.complex);
    let lo = s.lo().min(t.lo());
    let hi = s.hi().max(t.hi());
    let mut comps = Vec::new();
    for n in lo..=hi {
        let mut m = Matrix::zeros(t.dim(n), s.dim(n));
        if n >= s.lo() && n <= s.hi() {
            for (b, off, d) in &src.blocks[(n - s.lo()) as usize] {
                if let Some((_, off2, _)) = dst.offset(b) {
                    m.paste(off2, *off, &Matrix::identity(*d));
                }
            }
        }
        comps.push(m);
    }
    ChainMap::new(s.clone(), t.clone(), lo, comps).expect("restriction is a chain map")
}

/// Compactly supported sections: ⊕_{τ∈V} F(τ)^{n − dim τ} with the signed cellular coboundary.
pub fn compact_sections(f: &SheafComplex, cells: &CellSet) -> Sections {
    let space = f.space();
    if cells.is_empty() {
        return Sections { complex: CochainComplex::zero(), blocks: vec![], lookup: HashMap::new() };
    }
    let (flo, fhi) = f.degree_range();
    let maxd = cells.iter().map(|&c| space.dim(c)).max().unwrap_or(0) as i32;
    let lo = flo;
    let hi = fhi + maxd;
    let (blocks, lookup, dims) = layout(lo, hi, |n| {
        cells
            .iter()
            .map(|&c| {
                let q = n - space.dim(c) as i32;
                (Block { chain: vec![c], q }, f.stalk(c).dim(q))
            })
            .collect()
    });
    let mut diffs = Vec::new();
    for n in lo..hi {
        let i = (n - lo) as usize;
        let mut d = Matrix::zeros(dims[i + 1], dims[i]);
        for (b, off, _) in &blocks[i] {
            let c = b.chain[0];
            let s = sign(space.dim(c) as i64);
            if let Some(&(_, off2, _)) = lookup.get(&Block { chain: vec![c], q: b.q + 1 }) {
                add_block(&mut d, off2, *off, &f.stalk(c).d(b.q).scale(&s));
            }
            for &t in space.cofacets(c) {
                if !cells.contains(&t) {
                    continue;
                }
                if let Some(&(_, off2, _)) = lookup.get(&Block { chain: vec![t], q: b.q }) {
                    let e = crate::homalg::q(space.incidence(t, c));
                    add_block(&mut d, off2, *off, &f.gen(c, t).component(b.q).scale(&e));
                }
            }
        }
        diffs.push(d);
    }
    let complex = CochainComplex::new(lo, dims, diffs).expect("compact complex squares to zero");
    Sections { complex, blocks, lookup }
}

/// Extension by zero RΓ_c(V) → RΓ_c(W) for V ⊂ W open.
pub fn compact_inclusion(src: &Sections, dst: &Sections) -> ChainMap {
    let (s, t) = (&src.complex, &dst.complex);
    let lo = s.lo().min(t.lo());
    let hi = s.hi().max(t.hi());
    let mut comps = Vec::new();
    for n in lo..=hi {
        let mut m = Matrix::zeros(t.dim(n), s.dim(n));
        if n >= s.lo() && n <= s.hi() {
            for (b, off, d) in &src.blocks[(n - s.lo()) as usize] {
                let (_, off2, _) = dst.offset(b).expect("open subset");
                m.paste(off2, *off, &Matrix::identity(*d));
            }
        }
        comps.push(m);
    }
    ChainMap::new(s.clone(), t.clone(), lo, comps).expect("inclusion is a chain map")
}
