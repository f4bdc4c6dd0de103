//! Left A∞-modules, handled as an augmented category with one extra object ★:
//! hom(★, X) = M(X) and nothing maps into ★. The module identities are then the A∞
//! identities on tuples that start at ★.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use super::{hpl_transfer, AInftyFunctorData, AInftyStructure, Generator, RelationReport, SparseVec, Transfer, TransferData};
use crate::Error;

pub const STAR: &str = "★";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleGenerator {
    pub object: usize,
    pub degree: i32,
    pub label: String,
}

/// Structure maps m^d(a_{d−1}, …, a_1, m) keyed as `[m, a_1, …, a_{d−1}]`, with m a module
/// generator index and a_i generators of the base.
#[derive(Clone, Debug)]
pub struct AInftyModuleData {
    pub base: Arc<AInftyStructure>,
    pub gens: Vec<ModuleGenerator>,
    ops: Vec<BTreeMap<Vec<usize>, SparseVec>>,
    pub max_arity: usize,
}

impl AInftyModuleData {
    pub fn new(base: Arc<AInftyStructure>, gens: Vec<ModuleGenerator>, max_arity: usize) -> Result<Self, Error> {
        if gens.iter().any(|g| g.object >= base.objects.len()) {
            return Err(Error::Invalid("module generator over an unknown object".into()));
        }
        let max_arity = max_arity.max(1);
        Ok(AInftyModuleData { base, gens, ops: vec![BTreeMap::new(); max_arity], max_arity })
    }

    pub fn zero(base: Arc<AInftyStructure>) -> Self {
        let d = base.max_arity;
        AInftyModuleData::new(base, Vec::new(), d).unwrap()
    }

    pub fn op(&self, d: usize) -> &BTreeMap<Vec<usize>, SparseVec> {
        &self.ops[d - 1]
    }

    /// Sets m^d on `[m, a_1, …]`; outputs are module generator indices.
    pub fn set_op(&mut self, key: Vec<usize>, value: SparseVec) -> Result<(), Error> {
        let mut aug = self.augmented_shell();
        let n = self.base.num_gens();
        let mut akey = key.clone();
        akey[0] += n;
        let avalue: SparseVec = value.iter().map(|(k, c)| (k + n, c.clone())).collect();
        aug.set_op(akey, avalue)?;
        let value: SparseVec = value.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if value.is_empty() {
            self.ops[key.len() - 1].remove(&key);
        } else {
            self.ops[key.len() - 1].insert(key, value);
        }
        Ok(())
    }

    fn augmented_gens(&self) -> (Vec<String>, Vec<Generator>) {
        let mut objects = self.base.objects.clone();
        objects.push(STAR.into());
        let star = objects.len() - 1;
        let mut gens = self.base.gens.clone();
        gens.extend(self.gens.iter().map(|g| Generator {
            source: star,
            target: g.object,
            degree: g.degree,
            label: g.label.clone(),
        }));
        (objects, gens)
    }

    fn augmented_shell(&self) -> AInftyStructure {
        let (objects, gens) = self.augmented_gens();
        AInftyStructure::new(objects, gens, self.max_arity.max(self.base.max_arity)).expect("objects in range")
    }

    /// The base with ★ adjoined; module generator j becomes generator `base.num_gens() + j`.
    pub fn augmented(&self) -> AInftyStructure {
        let mut aug = self.augmented_shell();
        let n = self.base.num_gens();
        for d in 1..=self.base.max_arity.min(aug.max_arity) {
            for (k, v) in self.base.op(d) {
                aug.set_op(k.clone(), v.clone()).expect("base operation");
            }
        }
        for (d, table) in self.ops.iter().enumerate() {
            if d + 1 > aug.max_arity {
                break;
            }
            for (k, v) in table {
                let mut ak = k.clone();
                ak[0] += n;
                aug.set_op(ak, v.iter().map(|(o, c)| (o + n, c.clone())).collect()).expect("module operation");
            }
        }
        aug
    }

    /// Reads the ★-part of an augmented structure as a module over `base`.
    pub fn from_augmented(base: Arc<AInftyStructure>, aug: &AInftyStructure) -> Result<Self, Error> {
        let n = base.num_gens();
        let star = aug.objects.len() - 1;
        let gens: Vec<ModuleGenerator> = aug.gens[n..]
            .iter()
            .map(|g| {
                if g.source != star {
                    return Err(Error::Invalid("augmented generator not out of ★".into()));
                }
                Ok(ModuleGenerator { object: g.target, degree: g.degree, label: g.label.clone() })
            })
            .collect::<Result<_, _>>()?;
        let mut m = AInftyModuleData::new(base, gens, aug.max_arity)?;
        for d in 1..=aug.max_arity {
            for (k, v) in aug.op(d) {
                if k[0] >= n {
                    let mut mk = k.clone();
                    mk[0] -= n;
                    m.ops[d - 1].insert(mk, v.iter().map(|(o, c)| (o - n, c.clone())).collect());
                }
            }
        }
        Ok(m)
    }

    /// The module identity at arity d on every tuple.
    pub fn check_module(&self, d: usize) -> Result<RelationReport, Error> {
        if d == 0 || d > self.max_arity {
            return Err(Error::Invalid(format!("arity {d} outside 1..={}", self.max_arity)));
        }
        let n = self.base.num_gens();
        Ok(self.augmented().relation_residual_filtered(d, |k| k[0] >= n))
    }

    /// Cohomology dimensions of M(X).
    pub fn cohomology(&self, x: usize) -> Vec<(i32, usize)> {
        let aug = self.augmented();
        aug.hom_cohomology(aug.objects.len() - 1, x)
    }
}

/// Module-level P̃, Ĩ, H̃ on module generators.
#[derive(Clone, Debug)]
pub struct ModuleTransferData {
    pub target_gens: Vec<ModuleGenerator>,
    pub p: Vec<SparseVec>,
    pub i: Vec<SparseVec>,
    pub h: Vec<SparseVec>,
}

impl ModuleTransferData {
    pub fn identity(m: &AInftyModuleData) -> Self {
        let k = m.gens.len();
        let id: Vec<SparseVec> = (0..k).map(super::unit_vec).collect();
        ModuleTransferData { target_gens: m.gens.clone(), p: id.clone(), i: id, h: vec![SparseVec::new(); k] }
    }

    /// Transfer data of an acyclic matching on module generators.
    pub fn from_matching(m: &AInftyModuleData, pairs: &[(usize, usize)]) -> Result<Self, Error> {
        let aug = m.augmented();
        let n = m.base.num_gens();
        let shifted: Vec<(usize, usize)> = pairs.iter().map(|&(x, y)| (x + n, y + n)).collect();
        let t = TransferData::from_matching(&aug, &shifted)?;
        // base generators are all critical and come first in the target
        let target_gens = t.target_gens[n..]
            .iter()
            .map(|g| ModuleGenerator { object: g.target, degree: g.degree, label: g.label.clone() })
            .collect();
        let back = |v: &SparseVec| -> SparseVec { v.iter().map(|(k, c)| (k - n, c.clone())).collect() };
        Ok(ModuleTransferData {
            target_gens,
            p: t.p[n..].iter().map(back).collect(),
            i: t.i[n..].iter().map(back).collect(),
            h: t.h[n..].iter().map(back).collect(),
        })
    }
}

/// The transferred module N over B with t: N → F*M and s: M → G*N, read off the
/// transfer of the augmented category.
#[derive(Clone, Debug)]
pub struct ModuleTransfer {
    pub base: Transfer,
    pub module: AInftyModuleData,
    /// F on the augmented categories, ★-part: N → F*M.
    pub t: AInftyFunctorData,
    /// G on the augmented categories, ★-part: M → G*N.
    pub s: AInftyFunctorData,
}

impl ModuleTransfer {
    /// Whether s¹ = P̃ is a quasi-isomorphism M(X) → N(X) for every object X.
    pub fn s_is_quasi_isomorphism(&self) -> Result<bool, Error> {
        let aug_a = &self.s.source;
        let aug_b = &self.s.target;
        let star = aug_a.objects.len() - 1;
        for x in 0..star {
            let map = aug_a.linear_chain_map(aug_b, star, x, |g| self.s.get(&[g]).cloned().unwrap_or_default())?;
            if !map.is_quasi_isomorphism() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Transfers `m` along the base data `t` and module data `tm`.
pub fn module_transfer(
    m: &AInftyModuleData,
    t: &TransferData,
    tm: &ModuleTransferData,
    bound: usize,
    functor_bound: usize,
) -> Result<ModuleTransfer, Error> {
    let aug = m.augmented();
    let n = m.base.num_gens();
    let nb = t.target_gens.len();
    let star = aug.objects.len() - 1;
    let mut target_gens = t.target_gens.clone();
    target_gens.extend(tm.target_gens.iter().map(|g| Generator {
        source: star,
        target: g.object,
        degree: g.degree,
        label: g.label.clone(),
    }));
    let shift = |v: &SparseVec, s: usize| -> SparseVec { v.iter().map(|(k, c)| (k + s, c.clone())).collect() };
    let mut p = t.p.clone();
    p.extend(tm.p.iter().map(|v| shift(v, nb)));
    let mut i = t.i.clone();
    i.extend(tm.i.iter().map(|v| shift(v, n)));
    let mut h = t.h.clone();
    h.extend(tm.h.iter().map(|v| shift(v, n)));
    let at = TransferData { target_gens, p, i, h };
    let base = hpl_transfer(&m.base, t, bound, functor_bound)?;
    let full = hpl_transfer(&aug, &at, bound, functor_bound)?;
    let module = AInftyModuleData::from_augmented(base.b.clone(), &full.b)?;
    Ok(ModuleTransfer { base, module, t: full.f, s: full.g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::simplicial_cochains;

    fn regular(a: Arc<AInftyStructure>) -> AInftyModuleData {
        let gens = a.gens.iter().map(|g| ModuleGenerator { object: g.target, degree: g.degree, label: g.label.clone() }).collect();
        let mut m = AInftyModuleData::new(a.clone(), gens, a.max_arity).unwrap();
        for d in 1..=a.max_arity {
            for (k, v) in a.op(d) {
                m.set_op(k.clone(), v.clone()).unwrap();
            }
        }
        m
    }

    fn triangle() -> (Arc<AInftyStructure>, TransferData, Vec<(usize, usize)>) {
        let dg = simplicial_cochains(&[vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let a = AInftyStructure::from_dg(&dg, 5).unwrap();
        let g = |l: &str| a.gens.iter().position(|x| x.label == l).unwrap();
        let pairs = vec![(g("1"), g("01")), (g("2"), g("12"))];
        let t = TransferData::from_matching(&a, &pairs).unwrap();
        (Arc::new(a), t, pairs)
    }

    #[test]
    fn regular_module_transfers() {
        let (a, t, pairs) = triangle();
        let m = regular(a.clone());
        for d in 1..=4 {
            assert!(m.check_module(d).unwrap().ok);
        }
        let tm = ModuleTransferData::from_matching(&m, &pairs).unwrap();
        let mt = module_transfer(&m, &t, &tm, 5, 2).unwrap();
        for d in 1..=5 {
            assert!(mt.module.check_module(d).unwrap().ok, "arity {d}");
        }
        assert_eq!(mt.module.cohomology(0), m.cohomology(0));
        assert!(mt.s_is_quasi_isomorphism().unwrap());
    }

    #[test]
    fn zero_module() {
        let (a, t, _) = triangle();
        let m = AInftyModuleData::zero(a);
        let tm = ModuleTransferData::identity(&m);
        let mt = module_transfer(&m, &t, &tm, 4, 2).unwrap();
        assert!(mt.module.gens.is_empty());
    }

    #[test]
    fn minimal_module_is_fixed() {
        let (a, t, pairs) = triangle();
        let m = regular(a);
        let tm = ModuleTransferData::from_matching(&m, &pairs).unwrap();
        let first = module_transfer(&m, &t, &tm, 4, 2).unwrap();
        let n = first.module;
        let b = n.base.clone();
        let again = module_transfer(&n, &TransferData::identity(&b), &ModuleTransferData::identity(&n), 4, 2).unwrap();
        assert!(again.module.augmented().same_as(&n.augmented()));
    }
}
