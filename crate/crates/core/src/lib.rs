//! Numerical machinery for the circle-equivariant sigma orientation.
//!
//! The crate evaluates the Weierstrass sigma function and theta functions on
//! cocharacter lattices of the curve `C = ℂ/Λ`, `Λ = 2πiℤ + 2πiτℤ`, and builds
//! on them the equivariant classes, Euler-class ratios and Thom sections of a
//! circle-equivariant spin bundle restricted to its fixed points. Cohomology of
//! a fixed component is modelled by truncated power series ([`jet::Jet`]) in
//! Chern-root generators.
//!
//! [`verify`] runs randomized suites that check every identity numerically and
//! produces a JSON [`verify::Report`].

// `!(x > tol)` is used on purpose so that NaN takes the failure branch
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classes;
pub mod curve;
pub mod error;
pub mod gen;
pub mod jet;
pub mod lattice;
pub mod theta;
pub mod thom;
pub mod verify;

pub use classes::{EvaluatedClass, ToyBundle};
pub use curve::{lift, weil_pairing, CurveParams, CurvePoint, LiftedPoint};
pub use error::{Error, Result};
pub use jet::{Jet, JetShape, ScaledJet};
pub use lattice::{Cocharacter, LatticeWithForm, SignedPermutation};
pub use theta::{sigma, ThetaFunction};
pub use thom::{SectionData, VirtualPair};
pub use verify::{Report, RunConfig};
