//! Constructible sheaves on finite stratified cell complexes, local Morse groups,
//! characteristic cycles, A∞ homotopy transfer and a Lagrangian-Grassmannian calculator.

pub mod ainfty;
pub mod homalg;
pub mod laggr;
pub mod microloc;
pub mod morse;
pub mod sheafcat;
pub mod stratspace;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("d∘d ≠ 0 out of degree {0}")]
    NotAComplex(i32),
    #[error("not a chain map in degree {0}")]
    NotChainMap(i32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown cell {0:?}")]
    UnknownCell(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Book chapters, compiled as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod chapter0 {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    pub mod chapter1 {}
    #[doc = include_str!("../../../book/src/sheaves.md")]
    pub mod chapter2 {}
    #[doc = include_str!("../../../book/src/morse-groups.md")]
    pub mod chapter3 {}
    #[doc = include_str!("../../../book/src/ainfty.md")]
    pub mod chapter4 {}
    #[doc = include_str!("../../../book/src/morse.md")]
    pub mod chapter5 {}
    #[doc = include_str!("../../../book/src/lagrangian.md")]
    pub mod chapter6 {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod chapter7 {}
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
}
