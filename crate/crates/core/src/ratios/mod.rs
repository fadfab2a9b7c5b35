//! Scaling ratios of the backward orbit of the flat piece, cross-ratio
//! distortion, and checkers for the inequalities the ratios satisfy.

pub mod arcs;
pub mod cross;
pub mod series;
pub mod verify;

pub use arcs::OrbitSets;
pub use cross::{
    chain_audit, chain_quadruple, cross_cr, cross_po, distortion_audit, DistortionReport, Quadruple,
};
pub use series::{compute_series, orbit_requirements, Exponents, LevelRatios, RatioSeries};
pub use verify::{
    f_sigma_bound, m_factor, nu_series, return_decay, tau_kappa_band, verify_apriori,
    verify_lemma1, verify_lower_bounds, verify_recursion, w_band, w_diagnostic, Check, DecayReport,
    ImpliedConstants, LowerBoundReport, NuRow, VerifyReport, DEFAULT_N0,
};
