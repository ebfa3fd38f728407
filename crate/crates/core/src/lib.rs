//! Exact rational toolkit for obstruction questions on flat affine bundles.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`], [`matrix`], [`subspace`]: exact linear algebra over ℚ.
//! * [`affine`]: the affine group of ℚⁿ and block-triangular (fibration-preserving) maps.
//! * [`group`]: words, finite presentations, affine representations, Fox calculus.
//! * [`cohomology`]: H⁰/H¹ of finitely presented groups, radiance classes, gauge actions.
//! * [`fibration`]: validation of affine-bundle holonomy data, the radiance map and
//!   the affinely-locally-trivial test, the induced action on H¹.
//! * [`cech`]: Čech cochains over abstract nerves with flat rational coefficients.
//! * [`ladder`]: level defects, lifted cocycles and the recursive obstruction ladder.
//!
//! Everything is exact. The `parallel` feature (on by default) lets row reduction and
//! the batch entry points fan out over rayon; see [`par::Strategy`].

pub mod affine;
pub mod cech;
pub mod cohomology;
mod error;
pub mod fibration;
pub mod group;
pub mod ladder;
pub mod matrix;
pub mod par;
pub mod rational;
pub mod subspace;

pub use affine::{AffineMap, BlockAffineMap, BlockSplit};
pub use error::{Error, Result};
pub use matrix::{MatrixQ, VectorQ};
pub use par::Strategy;
pub use rational::Rational;
