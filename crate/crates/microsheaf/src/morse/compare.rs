use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::category::{MorseCategory, MorseObject, ObjectKind, CONVENTION};
use super::trees::morse_operation;
use crate::ainfty::{
    hpl_transfer, module_transfer, AInftyModuleData, AInftyStructure, Generator, ModuleGenerator, ModuleTransferData,
    SparseVec, TransferData,
};
use crate::microloc::local_morse_group;
use crate::sheafcat::{hom_standard, standard_object};
use crate::stratspace::{OpenSet, StratifiedComplex};
use crate::Error;

/// Cohomology of one hom on both sides.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomLine {
    pub source: String,
    pub target: String,
    pub morse: Vec<(i32, usize)>,
    /// Relative nerve cohomology for standard sources, the local Morse group of the
    /// standard target for branes.
    pub sheaf: Vec<(i32, usize)>,
    pub ok: bool,
}

/// One operation on basis inputs, from the transfer and from tree counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperationLine {
    pub inputs: Vec<String>,
    pub transferred: Vec<(String, String)>,
    pub counted: Vec<(String, String)>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub convention: String,
    pub homs: Vec<HomLine>,
    pub operations: Vec<OperationLine>,
    /// A∞ relations of the transferred structure through the compared arity.
    pub relations_ok: bool,
    /// Module maps of the separately transferred brane module against tree counts.
    pub module: Vec<OperationLine>,
    /// Cohomology of the transferred module at each standard object against the local Morse group.
    pub module_homs: Vec<HomLine>,
    pub ok: bool,
}

fn render(cat: &MorseCategory, v: &SparseVec) -> Vec<(String, String)> {
    v.iter().map(|(k, c)| (cat.label(cat.critical[*k]).to_string(), c.to_string())).collect()
}

fn standard_open(o: &MorseObject) -> Option<&OpenSet> {
    match &o.kind {
        ObjectKind::Standard { open } => Some(open),
        ObjectKind::Brane { .. } => None,
    }
}

fn sheaf_side(space: &Arc<StratifiedComplex>, s: &MorseObject, t: &MorseObject) -> Result<Vec<(i32, usize)>, Error> {
    let ut = standard_open(t).ok_or_else(|| Error::Invalid("target must be a standard object".into()))?;
    match &s.kind {
        ObjectKind::Standard { open } => Ok(hom_standard(space, open, ut).complex.betti_numbers()),
        ObjectKind::Brane { datum } => {
            let mut d = datum.clone();
            d.index_shift = 0;
            Ok(local_morse_group(&standard_object(space, ut), &d)?.dims)
        }
    }
}

/// Builds the directed category, transfers it along the flow projection, and compares the
/// transferred operations through `arity` with the tree counts. With a brane in front, the
/// brane module is also transferred on its own over the standard objects and compared.
pub fn open_vs_mor(
    space: Arc<StratifiedComplex>,
    objects: Vec<MorseObject>,
    arity: usize,
) -> Result<ComparisonReport, Error> {
    let arity = arity.max(1);
    let cat = MorseCategory::new(space.clone(), objects, arity.max(2))?;
    let mut homs = Vec::new();
    for &(i, j) in cat.pairs.keys() {
        let mc = cat.morse_complex(i, j)?;
        let sheaf = sheaf_side(&space, &cat.objects[i], &cat.objects[j])?;
        homs.push(HomLine {
            source: mc.source,
            target: mc.target,
            ok: mc.dims == sheaf,
            morse: mc.dims,
            sheaf,
        });
    }
    let t = cat.flow_projection()?;
    let tr = hpl_transfer(&cat.dg, &t, arity, 1)?;
    let mut operations = Vec::new();
    for d in 1..=arity {
        for key in tr.b.composable_tuples(d) {
            let transferred = tr.b.apply_basis(&key);
            let counted = morse_operation(&cat, &key)?;
            operations.push(OperationLine {
                inputs: key.iter().map(|&k| cat.label(cat.critical[k]).to_string()).collect(),
                ok: transferred == counted,
                transferred: render(&cat, &transferred),
                counted: render(&cat, &counted),
            });
        }
    }
    let relations_ok = tr.b.check_relations_through(arity)?.ok;
    let (module, module_homs) = if cat.objects[0].is_brane() { module_comparison(&cat)? } else { (vec![], vec![]) };
    let ok = relations_ok
        && homs.iter().all(|l| l.ok)
        && operations.iter().all(|l| l.ok)
        && module.iter().all(|l| l.ok)
        && module_homs.iter().all(|l| l.ok);
    Ok(ComparisonReport { convention: CONVENTION.into(), homs, operations, relations_ok, module, module_homs, ok })
}

/// Splits the category into the standard objects and the brane module over them, transfers
/// the module with `module_transfer`, and compares m¹ and m² of the result with tree counts.
fn module_comparison(cat: &MorseCategory) -> Result<(Vec<OperationLine>, Vec<HomLine>), Error> {
    let a = &cat.dg;
    let n = a.num_gens();
    let base_ids: Vec<usize> = (0..n).filter(|&g| a.gens[g].source != 0).collect();
    let mod_ids: Vec<usize> = (0..n).filter(|&g| a.gens[g].source == 0 && a.gens[g].target != 0).collect();
    let base_pos: BTreeMap<usize, usize> = base_ids.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let mod_pos: BTreeMap<usize, usize> = mod_ids.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let gens: Vec<Generator> = base_ids
        .iter()
        .map(|&g| {
            let x = &a.gens[g];
            Generator { source: x.source - 1, target: x.target - 1, degree: x.degree, label: x.label.clone() }
        })
        .collect();
    let mut base = AInftyStructure::new(a.objects[1..].to_vec(), gens, 2)?;
    let remap = |v: &SparseVec, pos: &BTreeMap<usize, usize>| -> SparseVec { v.iter().map(|(k, c)| (pos[k], c.clone())).collect() };
    for d in 1..=2 {
        for (key, v) in a.op(d) {
            if key.iter().all(|g| base_pos.contains_key(g)) {
                base.set_op(key.iter().map(|g| base_pos[g]).collect(), remap(v, &base_pos))?;
            }
        }
    }
    let base = Arc::new(base);
    let mgens = mod_ids
        .iter()
        .map(|&g| {
            let x = &a.gens[g];
            ModuleGenerator { object: x.target - 1, degree: x.degree, label: x.label.clone() }
        })
        .collect();
    let mut m = AInftyModuleData::new(base.clone(), mgens, 2)?;
    for d in 1..=2 {
        for (key, v) in a.op(d) {
            if mod_pos.contains_key(&key[0]) && key[1..].iter().all(|g| base_pos.contains_key(g)) {
                let mut k = vec![mod_pos[&key[0]]];
                k.extend(key[1..].iter().map(|g| base_pos[g]));
                m.set_op(k, remap(v, &mod_pos))?;
            }
        }
    }
    let base_pairs: Vec<(usize, usize)> = cat
        .matching
        .iter()
        .filter(|(x, _)| base_pos.contains_key(x))
        .map(|(x, y)| (base_pos[x], base_pos[y]))
        .collect();
    let mod_pairs: Vec<(usize, usize)> = cat
        .matching
        .iter()
        .filter(|(x, _)| mod_pos.contains_key(x))
        .map(|(x, y)| (mod_pos[x], mod_pos[y]))
        .collect();
    let t = TransferData::from_matching(&base, &base_pairs)?;
    let tm = ModuleTransferData::from_matching(&m, &mod_pairs)?;
    let mt = module_transfer(&m, &t, &tm, 2, 1)?;
    // critical generators keep their relative order on both sides
    let crit_base: Vec<usize> = cat.critical.iter().copied().filter(|g| base_pos.contains_key(g)).collect();
    let crit_mod: Vec<usize> = cat.critical.iter().copied().filter(|g| mod_pos.contains_key(g)).collect();
    let to_cat = |v: &SparseVec| -> SparseVec {
        v.iter().map(|(k, c)| (cat.critical_index(crit_mod[*k]).expect("critical"), c.clone())).collect()
    };
    let mut lines = Vec::new();
    for (k, &g) in crit_mod.iter().enumerate() {
        let ck = cat.critical_index(g).expect("critical");
        let mut keys: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![k], vec![ck])];
        for (b, &h) in crit_base.iter().enumerate() {
            if mt.base.b.gens[b].source == mt.module.gens[k].object {
                keys.push((vec![k, b], vec![ck, cat.critical_index(h).expect("critical")]));
            }
        }
        for (mk, ckey) in keys {
            let transferred = to_cat(mt.module.op(mk.len()).get(&mk).unwrap_or(&SparseVec::new()));
            let counted = morse_operation(cat, &ckey)?;
            lines.push(OperationLine {
                inputs: ckey.iter().map(|&c| cat.label(cat.critical[c]).to_string()).collect(),
                ok: transferred == counted,
                transferred: render(cat, &transferred),
                counted: render(cat, &counted),
            });
        }
    }
    let mut homs = Vec::new();
    for x in 0..base.objects.len() {
        let got = mt.module.cohomology(x);
        let sheaf = sheaf_side(&cat.space, &cat.objects[0], &cat.objects[x + 1])?;
        homs.push(HomLine {
            source: cat.objects[0].name.clone(),
            target: cat.objects[x + 1].name.clone(),
            ok: got == sheaf,
            morse: got,
            sheaf,
        });
    }
    Ok((lines, homs))
}
