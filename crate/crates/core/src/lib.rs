//! Model-averaged Bayesian inference for two nested Gaussian models.
//!
//! M₁ puts a `N(0, g₁)` prior on θ; M₀ is either a narrower `N(0, g₀)` or a
//! point mass at θ₀ (spike-and-slab). Data are `n` unit-variance normal
//! observations summarised by `z = √n·ȳ`.
//!
//! With a point-null M₀ the model-averaged posterior has an atom, its CDF
//! jumps at θ₀, and credible bounds at levels inside the jump do not exist.
//! [`posterior::QuantileResult`] reports that outcome explicitly and
//! [`interval`] offers the randomized bounds that restore the nominal level.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod figures;
pub mod interval;
pub mod kernels;
pub mod model;
pub mod posterior;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod simulation;

pub use error::{Error, Result};
pub use scalar::Real;

pub use asymptotics::{AsymptoticRegime, ExclusionPoint, MonteCarloEstimate};
pub use interval::{
    Boundary, OneSidedCredible, OneSidedInterval, StochasticBound, StochasticTwoSided, TwoSidedCredible,
    TwoSidedInterval,
};
pub use model::{DataSummary, ModelPair, Prior};
pub use posterior::{BayesFactor, IncredibilityInterval, ModelAveragedPosterior, PosteriorModelProbs, QuantileResult};
pub use simulation::CoverageReport;

pub type Prior64 = Prior<f64>;
pub type ModelPair64 = ModelPair<f64>;
pub type DataSummary64 = DataSummary<f64>;
pub type Posterior64 = ModelAveragedPosterior<f64>;
pub type Posterior32 = ModelAveragedPosterior<f32>;
pub type Quantile64 = QuantileResult<f64>;
pub type Incredibility64 = IncredibilityInterval<f64>;
pub type StochasticBound64 = StochasticBound<f64>;
pub type Regime64 = AsymptoticRegime<f64>;
