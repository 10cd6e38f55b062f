//! Monte-Carlo moments of the Kato norm over noise paths.

use crate::error::{Error, Result};
use crate::noise::{sample_seed, McEstimate};

/// `E[Z^r]` estimate for one `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub r: f64,
    pub estimate: McEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentsReport {
    pub moments: Vec<Moment>,
    /// Paths whose solve failed; excluded from the moments.
    pub excluded: usize,
    pub attempted: usize,
}

impl MomentsReport {
    pub fn exclusion_rate(&self) -> f64 {
        self.excluded as f64 / self.attempted.max(1) as f64
    }
}

/// Sample mean and standard error of `x^r`.
pub fn moment(samples: &[f64], r: f64) -> McEstimate {
    let n = samples.len();
    let v: Vec<f64> = samples.iter().map(|x| x.powf(r)).collect();
    let mean = v.iter().sum::<f64>() / n.max(1) as f64;
    let var = if n > 1 {
        v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    McEstimate {
        estimate: mean,
        stderr: (var / n.max(1) as f64).sqrt(),
        samples: n,
    }
}

/// Runs `solve_one(path_seed)` for `n_paths` seeds `seed ⊕ index` and
/// estimates `E[Z^r]` for each `r` from the successful runs.
pub fn moments_mc<F>(n_paths: usize, seed: u64, rs: &[f64], solve_one: F) -> Result<MomentsReport>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    if n_paths < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 paths, got {n_paths}")));
    }
    let results = crate::par::map_range(n_paths, |i| solve_one(sample_seed(seed, i as u64)));
    let mut z = Vec::with_capacity(n_paths);
    let mut excluded = 0;
    for r in results {
        match r {
            Ok(v) => z.push(v),
            Err(e) => {
                log::warn!("path excluded: {e}");
                excluded += 1;
            }
        }
    }
    Ok(MomentsReport {
        moments: rs.iter().map(|&r| Moment { r, estimate: moment(&z, r) }).collect(),
        excluded,
        attempted: n_paths,
    })
}
