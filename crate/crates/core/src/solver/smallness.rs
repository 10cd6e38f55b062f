//! The smallness inequalities that admit a run.

use std::fmt::Write as _;

use crate::error::Result;
use crate::field::{lp_norm, to_physical, SpectralVectorField};
use crate::noise::{fmt17, NoiseDiagnostics};
use crate::solver::constants::{beta_constants, BetaConstants};
use crate::solver::{Constants, SolverConfig};

/// `η_∞ |U₀|_{3/2} ≤ threshold`, with both evaluations of `η_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub name: &'static str,
    pub threshold: f64,
    /// Strict inequality required.
    pub strict: bool,
    pub lhs_exact: f64,
    pub lhs_analytic: f64,
}

impl Inequality {
    fn holds(&self, lhs: f64) -> bool {
        if self.strict {
            lhs < self.threshold
        } else {
            lhs <= self.threshold
        }
    }

    pub fn pass_exact(&self) -> bool {
        self.holds(self.lhs_exact)
    }

    pub fn pass_analytic(&self) -> bool {
        self.holds(self.lhs_analytic)
    }

    /// `threshold / lhs`; infinite for zero data.
    pub fn margin_exact(&self) -> f64 {
        margin(self.threshold, self.lhs_exact)
    }

    pub fn margin_analytic(&self) -> f64 {
        margin(self.threshold, self.lhs_analytic)
    }
}

fn margin(threshold: f64, lhs: f64) -> f64 {
    if lhs == 0.0 {
        f64::INFINITY
    } else {
        threshold / lhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallnessReport {
    pub u0_norm32: f64,
    pub eta_inf_exact: f64,
    pub eta_inf_analytic: f64,
    pub constants: Constants,
    /// `R* = 2C₁|U₀|_{3/2}`.
    pub r_star: f64,
    /// Main condition, the contraction-radius condition and the contraction
    /// condition, in that order.
    pub checks: [Inequality; 3],
    pub beta: Option<BetaConstants>,
}

impl SmallnessReport {
    /// Admission rule: the main condition with the analytic `η` bound.
    pub fn admits(&self) -> bool {
        self.checks[0].pass_analytic()
    }

    pub fn summary(&self) -> String {
        let c = &self.checks[0];
        format!(
            "sup η·|U₀|_{{3/2}} = {:.6e} (analytic η) against C* = {:.6e}",
            c.lhs_analytic, c.threshold
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "u0_norm32 = {}", fmt17(self.u0_norm32));
        let _ = writeln!(s, "eta_inf_exact_l2 = {}", fmt17(self.eta_inf_exact));
        let _ = writeln!(s, "eta_inf_analytic = {}", fmt17(self.eta_inf_analytic));
        let _ = writeln!(s, "C1 = {}", fmt17(self.constants.c1));
        let _ = writeln!(s, "C2 = {}", fmt17(self.constants.c2));
        let _ = writeln!(s, "Cstar = {}", fmt17(self.constants.c_star));
        let _ = writeln!(s, "R_star = {}", fmt17(self.r_star));
        match &self.beta {
            Some(b) => {
                let _ = writeln!(s, "beta_first = {}", fmt17(b.first));
                let _ = writeln!(s, "beta_second = {}", fmt17(b.second));
            }
            None => {
                let _ = writeln!(s, "beta_first = divergent");
                let _ = writeln!(s, "beta_second = divergent");
            }
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{}: threshold = {} | exact_l2: lhs = {} margin = {} {} | analytic: lhs = {} margin = {} {}",
                c.name,
                fmt17(c.threshold),
                fmt17(c.lhs_exact),
                fmt17(c.margin_exact()),
                if c.pass_exact() { "PASS" } else { "FAIL" },
                fmt17(c.lhs_analytic),
                fmt17(c.margin_analytic()),
                if c.pass_analytic() { "PASS" } else { "FAIL" },
            );
        }
        let _ = writeln!(s, "admitted = {}", self.admits());
        s
    }
}

/// Evaluates the three smallness inequalities for `U₀`.
pub fn smallness_check(
    u0: &SpectralVectorField,
    diag: &NoiseDiagnostics,
    cfg: &SolverConfig,
    constants: Constants,
) -> Result<SmallnessReport> {
    let u0_norm32 = lp_norm(&to_physical(u0), 1.5)?;
    Ok(report_for_norm(u0_norm32, diag, cfg, constants))
}

/// Same as [`smallness_check`] for a known `|U₀|_{3/2}`.
pub fn report_for_norm(
    u0_norm32: f64,
    diag: &NoiseDiagnostics,
    cfg: &SolverConfig,
    constants: Constants,
) -> SmallnessReport {
    let (ex, an) = (diag.eta_inf_exact, diag.eta_inf_analytic);
    let ineq = |name, threshold, strict| Inequality {
        name,
        threshold,
        strict,
        lhs_exact: ex * u0_norm32,
        lhs_analytic: an * u0_norm32,
    };
    let Constants { c1, c2, c_star } = constants;
    SmallnessReport {
        u0_norm32,
        eta_inf_exact: ex,
        eta_inf_analytic: an,
        constants,
        r_star: 2.0 * c1 * u0_norm32,
        checks: [
            ineq("main", c_star, false),
            ineq("radius", 1.0 / (4.0 * c1 * c1), false),
            ineq("contraction", 1.0 / (2.0 * c1 * c2), true),
        ],
        beta: beta_constants(cfg.exponents.p).ok(),
    }
}
