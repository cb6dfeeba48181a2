//! Evaluation representations of `U_q(L(sl2))`, their R-operators and qKZ
//! operators, with numerical checks of the identities relating them.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod idsuite;
pub mod linalg;
pub mod qkzengine;
pub mod reduction;
pub mod repkit;
pub mod rsolve;
pub mod scalarlib;
pub mod tensorops;

pub use error::{Error, Result};
pub use linalg::{Mat, C};
pub use scalarlib::QContext;
