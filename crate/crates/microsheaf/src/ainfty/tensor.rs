//! Sparse elements of the tensor coalgebra on a basis of generators.

use std::collections::BTreeMap;

use num::{One, Zero};

use super::{AInftyStructure, SparseVec};
use crate::homalg::Q;

/// A finite sum of words with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tensor(pub BTreeMap<Vec<usize>, Q>);

impl Tensor {
    pub fn word(w: Vec<usize>) -> Self {
        Tensor([(w, Q::one())].into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, w: Vec<usize>, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(w.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&w);
        }
    }

    pub fn add(&mut self, other: &Tensor) {
        for (w, c) in &other.0 {
            self.add_term(w.clone(), c.clone());
        }
    }

    /// The length-one part as a vector.
    pub fn linear_part(&self) -> SparseVec {
        let mut out = SparseVec::new();
        for (w, c) in &self.0 {
            if w.len() == 1 {
                super::add_into(&mut out, w[0], c);
            }
        }
        out
    }

    /// f^{⊗n} applied factorwise, for an even linear map f.
    pub fn map_each(&self, f: &dyn Fn(usize) -> SparseVec) -> Tensor {
        let mut out = Tensor::default();
        for (w, c) in &self.0 {
            let parts: Vec<SparseVec> = w.iter().map(|&g| f(g)).collect();
            expand(&parts, Vec::new(), c.clone(), &mut out);
        }
        out
    }
}

fn expand(parts: &[SparseVec], prefix: Vec<usize>, c: Q, out: &mut Tensor) {
    if prefix.len() == parts.len() {
        out.add_term(prefix, c);
        return;
    }
    for (g, x) in &parts[prefix.len()] {
        let mut p = prefix.clone();
        p.push(*g);
        expand(parts, p, &c * x, out);
    }
}

fn odd_prefix(a: &AInftyStructure, w: &[usize]) -> bool {
    w.iter().map(|&g| a.degree(g) - 1).sum::<i32>().rem_euclid(2) == 1
}

/// The coderivation extending μ^{≥2} (arity-one part excluded).
pub(crate) fn coderivation(a: &AInftyStructure, t: &Tensor) -> Tensor {
    let mut out = Tensor::default();
    let top = a.top_arity();
    for (w, c) in &t.0 {
        for j in 0..w.len() {
            let sgn = if odd_prefix(a, &w[..j]) { -c.clone() } else { c.clone() };
            for m in 2..=top.min(w.len() - j) {
                if let Some(v) = a.op(m).get(&w[j..j + m]) {
                    for (g, x) in v {
                        let mut nw = Vec::with_capacity(w.len() + 1 - m);
                        nw.extend_from_slice(&w[..j]);
                        nw.push(*g);
                        nw.extend_from_slice(&w[j + m..]);
                        out.add_term(nw, &sgn * x);
                    }
                }
            }
        }
    }
    out
}

/// Σ_k ± 1^{⊗k−1} ⊗ h ⊗ (ip)^{⊗n−k}, with h odd.
pub(crate) fn tensor_homotopy(
    a: &AInftyStructure,
    h: &dyn Fn(usize) -> SparseVec,
    ip: &dyn Fn(usize) -> SparseVec,
    t: &Tensor,
) -> Tensor {
    let mut out = Tensor::default();
    for (w, c) in &t.0 {
        for k in 0..w.len() {
            let sgn = if odd_prefix(a, &w[..k]) { -c.clone() } else { c.clone() };
            let mut parts: Vec<SparseVec> = w[..k].iter().map(|&g| [(g, Q::one())].into_iter().collect()).collect();
            parts.push(h(w[k]));
            parts.extend(w[k + 1..].iter().map(|&g| ip(g)));
            if parts.iter().any(|p| p.is_empty()) {
                continue;
            }
            expand(&parts, Vec::new(), sgn, &mut out);
        }
    }
    out
}

/// π₁ Σ_n (δ H)^n δ applied to t.
pub(crate) fn perturbation_series(
    a: &AInftyStructure,
    h: &dyn Fn(usize) -> SparseVec,
    ip: &dyn Fn(usize) -> SparseVec,
    t: &Tensor,
) -> SparseVec {
    let mut acc = SparseVec::new();
    let mut cur = coderivation(a, t);
    while !cur.is_empty() {
        for (g, c) in cur.linear_part() {
            super::add_into(&mut acc, g, &c);
        }
        cur.0.retain(|w, _| w.len() > 1);
        cur = coderivation(a, &tensor_homotopy(a, h, ip, &cur));
    }
    acc
}
