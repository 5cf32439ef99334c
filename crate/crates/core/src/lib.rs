//! Performance-based data minimization for recommender systems.
//!
//! Users reveal only a budget of `n` ratings chosen by a selection
//! [`Strategy`]; the quality loss this incurs is measured per user against a
//! full-profile baseline, for a user-user kNN and a FunkSVD recommender.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, with `F32` variants for the
//! single-precision build.

pub mod analysis;
pub mod dataset;
pub mod error;
pub mod export;
pub mod identifiability;
pub mod ids;
pub mod knn;
pub mod metrics;
pub mod minimizer;
pub mod profile;
pub mod recommender;
pub mod scalar;
pub mod seeding;
pub mod strategies;
pub mod svd;
pub mod synth;

pub use dataset::{ExperimentSplit, Format, GenreMap, Rating, RatingsDataset, Scale, UserPools};
pub use error::{Error, ErrorKind, Result};
pub use identifiability::{Identifiability, IdentifiabilityResult};
pub use ids::{Interner, ItemId, UserId};
pub use knn::{KnnConfig, KnnModel};
pub use metrics::{Gain, ScoredItems};
pub use minimizer::{
    Condition, Definition, EvaluationReport, Experiment, ExperimentSettings, KStar, Metric,
    MinimizationDecision,
};
pub use profile::Profile;
pub use recommender::{Algorithm, Prediction, Recommender};
pub use scalar::Scalar;
pub use strategies::{MinimizedProfile, Strategy, SystemStats};
pub use svd::{SvdConfig, SvdModel};
pub use synth::SynthConfig;

pub type RatingsDatasetF64 = RatingsDataset<f64>;
pub type ExperimentF64 = Experiment<f64>;
pub type KnnModelF64 = KnnModel<f64>;
pub type SvdModelF64 = SvdModel<f64>;
pub type ProfileF64 = Profile<f64>;
pub type EvaluationReportF64 = EvaluationReport<f64>;

pub type RatingsDatasetF32 = RatingsDataset<f32>;
pub type ExperimentF32 = Experiment<f32>;
pub type KnnModelF32 = KnnModel<f32>;
pub type SvdModelF32 = SvdModel<f32>;
pub type ProfileF32 = Profile<f32>;
pub type EvaluationReportF32 = EvaluationReport<f32>;
