//! Pinning control of coupled dynamical networks.
//!
//! The crate covers the whole pipeline from a network topology to a
//! secured pinning scheme:
//!
//! * [`network`] builds the coupling (Laplacian) matrix of an undirected topology.
//! * [`sync`] decides whether a pinning scheme synchronizes the network, either
//!   through the per-mode stability test or the scalar threshold test for
//!   linear inner coupling.
//! * [`design`] picks pinned nodes and gains at minimum cost (free gains,
//!   identical gains with branch-and-bound, or a cap on the pinned-node count).
//! * [`game`] prices pinning attacks and solves the defender/attacker
//!   Stackelberg game with linear programming.
//! * [`sim`] integrates the controlled (and possibly attacked) network with RK4.
//!
//! [`numerics`] holds the self-contained eigensolvers and the simplex solver.

pub mod design;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod network;
pub mod numerics;
pub mod sim;
pub mod sync;
pub mod tolerances;

pub use error::{PinError, Result};
pub use tolerances::Tolerances;
