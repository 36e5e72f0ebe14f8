//! Channel generators: i.i.d. Rayleigh, keyhole, finite-scatterer and a
//! simplified cluster-based geometric stochastic model, plus seeded
//! multi-run ensembles.

pub mod ensemble;
pub mod gscm;
pub mod iid;
pub mod scatterer;
pub mod seed;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub use ensemble::{run_ensemble, EnsembleOutcome, GeneratorSpec, RunPlan};
pub use gscm::{
    draw_user_antenna, gen_gscm, gen_gscm_user, gen_gscm_with_users, ClusterConfig, ClusterSpec,
    GscmConfig, LayoutConfig, LosConfig, TrajectoryConfig, VisibilityConfig,
};
pub use iid::{gen_iid_gaussian, gen_keyhole};
pub use scatterer::{gen_finite_scatterer, gen_finite_scatterer_with, ScattererOptions};

/// One CN(0,1) draw.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
