use crate::error::{Error, Result};

/// Exponents tied to `p`: `1/q = 2/p − 1/3`, `r₁ = 3p/(3−p)`,
/// `q′ = 3p/(4p−6)` (the conjugate of q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub r1: f64,
    pub q_prime: f64,
}

impl Exponents {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.5 && p < 2.0) {
            return Err(Error::InvalidExponent(p));
        }
        let e = Self {
            p,
            q: 1.0 / (2.0 / p - 1.0 / 3.0),
            r1: 3.0 * p / (3.0 - p),
            q_prime: 3.0 * p / (4.0 * p - 6.0),
        };
        e.check()?;
        Ok(e)
    }

    /// Re-derives every exponent and compares to 1e-12.
    pub fn check(&self) -> Result<()> {
        let p = self.p;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        let ok = close(1.0 / self.q, 2.0 / p - 1.0 / 3.0)
            && close(self.r1, 3.0 * p / (3.0 - p))
            && close(self.q_prime, self.q / (self.q - 1.0));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("inconsistent exponents {self:?}")))
        }
    }

    /// `t^{1−3/(2p)}`.
    pub fn value_weight(&self, t: f64) -> f64 {
        t.powf(1.0 - 1.5 / self.p)
    }

    /// `t^{(3/2)(1−1/p)}`.
    pub fn gradient_weight(&self, t: f64) -> f64 {
        t.powf(1.5 * (1.0 - 1.0 / self.p))
    }
}

/// Empirical stand-ins for the proof's constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c_star: f64,
}

impl Constants {
    /// `C* = (2 C₁ C₂)⁻¹`.
    pub fn from_c1_c2(c1: f64, c2: f64) -> Self {
        Self {
            c1,
            c2,
            c_star: 1.0 / (2.0 * c1 * c2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub exponents: Exponents,
    /// Horizon T.
    pub horizon: f64,
    /// Number of time intervals M.
    pub intervals: usize,
    /// Grading exponent of `t_m = T (m/M)^γ`.
    pub grading: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub constants: Option<Constants>,
    /// `false` replaces M by zero (linear test hook).
    pub nonlinear: bool,
    /// Rerun at doubled spatial resolution when the iteration fails.
    pub probe: bool,
}

impl SolverConfig {
    pub fn new(p: f64, horizon: f64, intervals: usize) -> Result<Self> {
        let cfg = Self {
            exponents: Exponents::new(p)?,
            horizon,
            intervals,
            grading: 2.0,
            tol: 1e-8,
            max_iter: 12,
            constants: None,
            nonlinear: true,
            probe: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.exponents.check()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon {} must be positive", self.horizon)));
        }
        if self.intervals == 0 {
            return Err(Error::InvalidArgument("grid needs at least one interval".into()));
        }
        if !(self.grading >= 1.0) {
            return Err(Error::InvalidArgument(format!("grading {} must be ≥ 1", self.grading)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument("Picard tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }

    /// Solver time nodes.
    pub fn time_grid(&self) -> Vec<f64> {
        graded_grid(self.horizon, self.intervals, self.grading)
    }

    /// `R* = 2 C₁ |U₀|_{3/2}`.
    pub fn r_star(&self, u0_norm32: f64) -> Option<f64> {
        self.constants.map(|c| 2.0 * c.c1 * u0_norm32)
    }
}

/// `t_m = T (m/M)^γ`, `m = 0..=M`. For integer `k`, the grid with `kM`
/// intervals contains this one.
pub fn graded_grid(horizon: f64, intervals: usize, grading: f64) -> Vec<f64> {
    (0..=intervals)
        .map(|m| horizon * (m as f64 / intervals as f64).powf(grading))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_at_1_8() {
        let e = Exponents::new(1.8).unwrap();
        assert!((e.q - 9.0 / 7.0).abs() < 1e-14);
        assert!((e.r1 - 4.5).abs() < 1e-14);
        assert!((e.q_prime - 4.5).abs() < 1e-13);
        assert!(Exponents::new(1.5).is_err());
        assert!(Exponents::new(2.0).is_err());
    }

    #[test]
    fn graded_grid_nests() {
        let a = graded_grid(0.3, 16, 2.0);
        let b = graded_grid(0.3, 32, 2.0);
        for (m, t) in a.iter().enumerate() {
            assert_eq!(*t, b[2 * m]);
        }
        assert_eq!(a[0], 0.0);
        assert_eq!(*a.last().unwrap(), 0.3);
        assert!(a.windows(2).all(|w| w[1] > w[0]));
        // Refines near zero.
        assert!(a[1] - a[0] < a[16] - a[15]);
    }
}
