//! Embedding pipeline for flows with fixed points: Gaussian base observable,
//! the perturbation on a cube, and the marker perturbation along orbits.

pub mod base;
pub mod cover;
pub mod main_lemma;
pub mod params;
pub mod perturb;

pub use base::{blend, gaussian_base, min_bwidth, Blend, Ensemble, GaussianBase, OrbitObservable};
pub use cover::CoverData;
pub use main_lemma::{
    line_targets, main_lemma_g, periodic_corruption, shift_rigidity_fuzz, FuzzConfig, FuzzReport, MainLemma,
};
pub use params::{choose_main_lemma_params, MainLemmaParams};
pub use perturb::{
    check_section_separation, g1_equivariance, marker_perturb_g1, verify_ga, verify_gbc, MarkerPerturbation,
};
