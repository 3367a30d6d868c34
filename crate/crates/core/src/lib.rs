//! Numerical toolkit for complete interpolating sequences of the
//! Paley–Wiener spaces L^p_π.
//!
//! Given a node sequence Λ = {λ_k}, the crate evaluates the generating
//! function S and the weight F(x) = |S(x)|/dist(x, Λ), tests the separation,
//! Carleson, density and Muckenhoupt (A_p) conditions that characterise
//! complete interpolating sequences, probes the discrete Hilbert operator on
//! weighted sequence spaces, and reconstructs functions from their values
//! on Λ with the Lagrange-type series S(z)/(S'(λ_k)(z − λ_k)).

pub mod criteria;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod genfunc;
pub mod hilbert;
pub mod interp;
pub mod nodes;
pub mod special;

pub use error::{Error, Result};
pub use genfunc::{ExponentP, GenFnEvaluator};
pub use nodes::{FamilyKind, FamilySpec, Node, NodeSequence};
