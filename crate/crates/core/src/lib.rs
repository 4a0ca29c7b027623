//! Sobolev-space machinery on the unit interval `[0, 1]`.
//!
//! Functions are represented symbolically as [`Expr`] trees, differentiated
//! exactly, and integrated with an adaptive Gauss–Kronrod scheme. On top of
//! that the crate provides the `W^{k,2}` geometry ([`Sobolev::inner`],
//! [`Sobolev::norm`], [`Sobolev::dist`], ...), the two orthogonal
//! decompositions of `W^{1,2}` (affine part against its complement, and
//! `W₀^{1,2}` against `span{eˣ, e⁻ˣ}`), weak-derivative verification and a
//! Riesz-pairing check.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use sobolev::{Expr, Regularity, Sobolev};
//!
//! let w = Sobolev::default();
//! let f: Expr = "sin(x)".parse().unwrap();
//! let n = w.norm(&f, Regularity::W12).unwrap();
//! assert!((n - 1.0).abs() < 1e-12);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod decomp;
pub mod expr;
pub mod quad;
pub mod space;
pub mod weak;

pub use decomp::{BoundarySplit, Decomposition, DecompositionKind, EtaReport, GramSystem};
pub use error::Error;
pub use expr::{parse, Constant, EvalError, Expr, Func, ParseError, Piece, PiecewiseError};
pub use quad::{ProbeReport, ProbeVerdict, QuadConfig, QuadError, QuadResult};
pub use space::{Continuity, MembershipVerdict, Projection, Regularity};
pub use weak::{TestFunction, WeakCheckReport, WeakResidual};

/// Entry point for every operation that needs numerical integration.
///
/// Holds the quadrature configuration shared by inner products, projections,
/// decompositions and weak-derivative checks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sobolev {
    pub quad: QuadConfig,
}

impl Sobolev {
    pub fn new(quad: QuadConfig) -> Self {
        Self { quad }
    }
}
