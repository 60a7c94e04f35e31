//! Exact-arithmetic computation of a regular-isotopy invariant of link
//! diagrams: the state sum of the virtual shaded 3-fold crossing expansion,
//! reduced to normal form modulo a Groebner basis of the Reidemeister-move
//! relation ideal. Truncating at M-degree k keeps the state count polynomial
//! in the crossing number.

pub mod diagram;
pub mod groebner;
pub mod invariant;
pub mod poly;
pub mod reference;
pub mod relations;
pub mod statesum;

pub use diagram::{Crossing, CrossingKind, LinkDiagram};
pub use groebner::{BasisLevel, GroebnerBasis};
pub use invariant::{InvariantContext, InvariantResult, Verdict};
pub use poly::{Monomial, Polynomial, Rational, Var};
pub use statesum::{Level, Resolution, State};
