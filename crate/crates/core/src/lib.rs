//! Repairability analysis for systems whose spare units are shared in a
//! limited way among functional units.
//!
//! A system is a bipartite graph of functional units and spares
//! ([`SpareNetwork`]). Faults are repaired one at a time by consuming an
//! adjacent spare ([`SystemState`]); a [`Policy`] decides which one. The
//! [`eval`] module estimates repairability curves, [`enhance`] suggests
//! extra edges, and [`experiment`] runs the ensemble studies.

pub mod codec;
pub mod enhance;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod network;
pub mod policy;
pub mod repair;
pub mod rng;
pub mod scalar;
pub mod state;

pub use codec::{parse_network, serialize_network};
pub use enhance::{
    build_spectrum, enhance, rank_spares, rank_units, suggest_edge, EdgeSuggestion,
    EnhancementStrategy,
};
pub use error::{Error, Result};
pub use eval::{
    adversarial_survival, adversarial_survival_from, default_mean_range, estimate_curve_mc,
    exact_curve_offline, exact_curve_policy, first_fault_profile, mc_survival, mean_repairability,
    structural_points, Curve, CurvePoint, Estimator, SurvivalSample,
};
pub use network::{generate_balanced_ring, generate_random, Degree, Node, SpareNetwork};
pub use policy::{
    candidate_spares, select_spare, Decision, EssentialityMode, Policy, PolicyKind, TieBreak,
};
pub use repair::{is_globally_repairable, run_sequence, run_with, FaultSequence, RunOutcome};
pub use rng::Stream;
pub use scalar::{FloatScalar, Rational, Scalar};
pub use state::SystemState;

/// Monte Carlo curve in double precision.
pub type Curve64 = Curve<f64>;
/// Single-precision curve.
pub type Curve32 = Curve<f32>;
/// Exact curve with rational values.
pub type ExactCurve = Curve<Rational>;
