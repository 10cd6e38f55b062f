//! Numerical property checks: functional inequalities, an independent time
//! stepper and Monte-Carlo moments.

pub mod estimates;
pub mod moments;
pub mod oracle;

pub use estimates::{
    check_calderon_zygmund, check_heat_smoothing, check_multiplier_bounds, check_m_estimate, check_sobolev, EstimateReport,
    HeatSmoothingReport, HeatSmoothingSetup, MultiplierReport,
};
pub use moments::{moments_mc, MomentsReport};
pub use oracle::{exponential_euler, sup_relative_gap};
