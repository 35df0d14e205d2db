//! Finite groupoid models of orbifolds: groups, groupoids and their
//! equivalences, inertia, equivariant vector bundles and their characters,
//! and weighted projective space singularities.
//!
//! Combinatorial code works over integer ids. The numerical layer
//! ([`linalg`], [`vbun`]) is generic over the real scalar; the aliases below
//! fix it to `f64` or `f32`.

pub mod error;
pub mod fingrp;
pub mod gmor;
pub mod gpd;
pub mod inertia;
pub mod io;
pub mod linalg;
pub mod orbmodel;
pub mod scalar;
pub mod vbun;

pub use error::{Error, Result};
pub use fingrp::FiniteGroup;
pub use gmor::GroupoidHom;
pub use gpd::{GroupAction, Groupoid};
pub use scalar::Real;

pub type CMatrix64 = linalg::CMatrix<f64>;
pub type CMatrix32 = linalg::CMatrix<f32>;
pub type VectorBundle64 = vbun::VectorBundle<f64>;
pub type VectorBundle32 = vbun::VectorBundle<f32>;
pub type Representation64 = vbun::Representation<f64>;
pub type Representation32 = vbun::Representation<f32>;
pub type Tolerances64 = vbun::Tolerances<f64>;
pub type Tolerances32 = vbun::Tolerances<f32>;
