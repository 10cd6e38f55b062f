//! Beta-function constants of the fixed-point estimates.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` for `a, b > 0`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument(format!("beta function diverges at ({a}, {b})")));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaConstants {
    /// `B(3/2 (2/p − 1), 3/2 (1 − 1/p))`.
    pub first: f64,
    /// `B(3 (1/p − 1/2), 1 − 3/(2p))`.
    pub second: f64,
}

/// Arguments of both constants.
pub fn beta_arguments(p: f64) -> [(f64, f64); 2] {
    [
        (1.5 * (2.0 / p - 1.0), 1.5 * (1.0 - 1.0 / p)),
        (3.0 * (1.0 / p - 0.5), 1.0 - 1.5 / p),
    ]
}

/// Both constants; an error names the divergent one when an argument is
/// not positive.
pub fn beta_constants(p: f64) -> Result<BetaConstants> {
    let [a, b] = beta_arguments(p);
    let first = beta(a.0, a.1).map_err(|_| {
        Error::InvalidArgument(format!("first beta constant diverges at p = {p} (arguments {a:?})"))
    })?;
    let second = beta(b.0, b.1).map_err(|_| {
        Error::InvalidArgument(format!("second beta constant diverges at p = {p} (arguments {b:?})"))
    })?;
    Ok(BetaConstants { first, second })
}
