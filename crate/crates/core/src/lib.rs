//! Signature-based optimal stopping for mean-reverting spreads.
//!
//! The library computes truncated signatures of time-augmented paths, trains
//! linear signature stopping policies against a sigmoid-smoothed expected
//! payoff, solves sequential entry/exit stopping problems for spread
//! trading, and backtests the resulting rule against a moving-band baseline.
//!
//! All numeric code is generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); the `*64` aliases below pin the common choice.

pub mod backtest;
pub mod engine;
pub mod error;
pub mod models;
pub mod policy;
pub mod scalar;
pub mod signature;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Path64 = signature::Path<f64>;
pub type AugmentedPath64 = signature::AugmentedPath<f64>;
pub type Signature64 = signature::TruncatedSignature<f64>;
pub type DualVector64 = signature::DualVector<f64>;
pub type LinearPolicy64 = policy::LinearPolicy<f64>;
pub type TrainingSet64 = policy::TrainingSet<f64>;
pub type OptimizerConfig64 = policy::OptimizerConfig<f64>;
pub type OuParams64 = models::OuParams<f64>;
pub type TimeGrid64 = models::TimeGrid<f64>;
pub type TradeSchedule64 = engine::TradeSchedule<f64>;
pub type StrategyConfig64 = engine::StrategyConfig<f64>;
pub type TradingCosts64 = engine::TradingCosts<f64>;
pub type PerformanceReport64 = backtest::PerformanceReport<f64>;

pub type Path32 = signature::Path<f32>;
pub type Signature32 = signature::TruncatedSignature<f32>;
pub type DualVector32 = signature::DualVector<f32>;
