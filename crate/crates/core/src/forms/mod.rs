//! Differential forms on `k*` and on dressing orbits.

mod beta;
mod dressing;
mod homotopy;
mod identities;
mod pushforward;
mod quadrature;

pub use beta::{beta_eval, d_beta, pulled_back_two_form, FormEvaluator, DEFAULT_NODES, MIN_NODES};
pub use dressing::{dressing_vector, generating_vector, project_g, s_matrix, SMatrix};
pub use homotopy::{exterior_derivative_function, exterior_derivative_one_form, homotopy_one_form, homotopy_two_form};
pub use identities::{
    verify_contraction, verify_lemma1, verify_lemma2, verify_lemma2_divergence, verify_lemma3,
    verify_linearization_on_orbit, verify_prop_hard, verify_volume_theorem, PropHardReport, REGULARITY_TOL,
};
pub use pushforward::{e_differential, Pushforward};
pub use quadrature::GaussLegendre;
