//! Phonon counting statistics from a Fock distribution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reduced::SteadyState;

/// Below this mean occupation `g²(0)` is reported as undefined.
pub const G2_UNDEFINED_BELOW: f64 = 1e-12;
/// Accepted deviation of the total probability from one.
pub const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhononStats {
    /// `<n> = Σ n P_n`.
    pub mean_n: f64,
    /// `g²(0) = Σ n(n-1) P_n / <n>²`; `None` when `<n>` is below
    /// [`G2_UNDEFINED_BELOW`].
    pub g2: Option<f64>,
    pub tail_mass: f64,
    pub distribution: Vec<f64>,
}

impl PhononStats {
    /// Statistics of a truncated distribution `P_0 … P_{n_max}`.
    pub fn from_distribution(distribution: Vec<f64>) -> Result<Self> {
        let total: f64 = distribution.iter().sum();
        if distribution.is_empty() || !total.is_finite() || (total - 1.0).abs() > NORMALIZATION_TOL
        {
            return Err(Error::Unnormalized { total });
        }
        let (mean_n, factorial2) =
            distribution
                .iter()
                .enumerate()
                .fold((0.0, 0.0), |(m, f), (n, &p)| {
                    let n = n as f64;
                    (m + n * p, f + n * (n - 1.0) * p)
                });
        let g2 = (mean_n >= G2_UNDEFINED_BELOW).then(|| factorial2 / (mean_n * mean_n));
        Ok(Self {
            mean_n,
            g2,
            tail_mass: *distribution.last().unwrap(),
            distribution,
        })
    }
}

pub fn observables(ss: &SteadyState) -> Result<PhononStats> {
    PhononStats::from_distribution(ss.distribution())
}
