//! Picard construction of the mild solution and its monitors.

pub mod calibrate;
pub mod config;
pub mod constants;
pub mod diagnostics;
pub mod duhamel;
pub mod kato;
pub mod picard;
pub mod smallness;

pub use calibrate::{calibrate, Calibration};
pub use config::{graded_grid, Constants, Exponents, SolverConfig};
pub use constants::{beta, beta_constants, BetaConstants};
pub use diagnostics::{velocity_diagnostics, weak_pairing, VelocityReport};
pub use duhamel::{duhamel_f, Integrand};
pub use kato::{KatoPoint, KatoTrajectory};
pub use picard::{picard_solve, Gate, NonConvergence, ProbeVerdict, SolutionRecord};
pub use smallness::{smallness_check, SmallnessReport};
