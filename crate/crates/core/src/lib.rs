//! Linearization of Poisson-Lie moment maps for `K = U(r)`.
//!
//! The crate provides the map `E: k* → K*` between the Hermitian matrices and
//! the lower-triangular group `K*`, dressing actions, the 1-form `β` relating
//! group-valued and linear symplectic structures, feasibility solvers for the
//! additive and multiplicative singular-value problems, and Monte Carlo
//! Duistermaat-Heckman measures for testing the hyperbolic Duflo identity.

pub mod decomp;
pub mod error;
pub mod forms;
pub mod lie;
pub mod linalg;
pub mod measures;
pub mod rng;
pub mod thompson;

pub use decomp::{
    cholesky_star, dress, dressing_left, dressing_right, e_inverse, e_map, factor_k_star, factor_star_k,
    sigma_real, sigma_twisted, GroupElement, Involution, TriangularPositive, UnitaryElement,
};
pub use error::{Error, Result};
pub use lie::{
    b_flat, b_sharp, duflo_normalization_oracle, hyperbolic_duflo, hyperbolic_duflo_of, killing_form,
    modular_tau, modular_tau_direct, pairing, structure_constants, AntiHermitianElement, ChamberPoint,
    HermitianElement, RootDatum, StructureConstants, TriangularAlgebraElement,
};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
