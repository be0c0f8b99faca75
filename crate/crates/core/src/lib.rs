//! Lipschitz observables, McShane extension, variable-radius mollification and
//! embeddings of flows into the shift on `Lip_1(R^k, [0,1])`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borel;
pub mod error;
pub mod experiment;
pub mod extension;
pub mod flows;
pub mod genvec;
pub mod lipfun;
pub mod mollify;
pub mod report;
pub mod topo;

pub use error::{Error, Result};
pub use extension::{mcshane_extend, AnchorSet};
pub use lipfun::{GridFunction, GridSpec};
