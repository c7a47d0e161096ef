//! Physical parameters and the dressed-state transformation.
//!
//! All rates and frequencies share one unit system, normally multiples of
//! the Rabi frequency. In the frame rotating at the laser frequency the
//! driven dot is diagonalized by
//!
//! ```text
//! |+> = sin θ |g> + cos θ |e>,   |-> = cos θ |g> - sin θ |e>,
//! tan 2θ = 2Ω / Δ,               Ω̄ = sqrt(Ω² + Δ²/4).
//! ```
//!
//! In the interaction picture the dot-phonon coupling splits into a slow
//! sideband part, `-g sin(2θ)/2 (b† R⁻ e^{i(ω_ph - 2Ω̄)t} + h.c.)`, and fast
//! parts oscillating at `ω_ph` and `ω_ph + 2Ω̄`. The secular treatment keeps
//! only the slow part. Beyond it, the fast parts are folded in to second
//! order, which leaves a level shift `-Δ̄ R_z` and a dispersive term
//! `β b†b R_z` (a constant energy offset is dropped).

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use crate::error::{Error, Result};

/// Raw inputs of the dot-cavity model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Cavity phonon frequency `ω_ph`.
    pub omega_ph: f64,
    /// Laser detuning `Δ = ω_qd - ω_L`.
    pub delta: f64,
    /// Rabi frequency `Ω`.
    pub rabi: f64,
    /// Dot-phonon coupling `g`.
    pub g: f64,
    /// Spontaneous decay rate `γ`.
    pub gamma: f64,
    /// Pure dephasing rate `γ_c`.
    pub gamma_c: f64,
    /// Cavity damping rate `κ`.
    pub kappa: f64,
    /// Thermal occupation of the phonon bath.
    pub nbar: f64,
}

impl ModelParams {
    /// Checks signs and finiteness.
    ///
    /// `rabi = 0` is accepted here (the undriven dot is a valid lab-frame
    /// model); [`dress`] rejects it only together with `delta = 0`.
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool, &'static str); 8] = [
            (
                "omega_ph",
                self.omega_ph,
                self.omega_ph > 0.0,
                "must be > 0",
            ),
            ("delta", self.delta, true, "must be finite"),
            ("rabi", self.rabi, self.rabi >= 0.0, "must be >= 0"),
            ("g", self.g, self.g >= 0.0, "must be >= 0"),
            ("gamma", self.gamma, self.gamma >= 0.0, "must be >= 0"),
            ("gamma_c", self.gamma_c, self.gamma_c >= 0.0, "must be >= 0"),
            ("kappa", self.kappa, self.kappa > 0.0, "must be > 0"),
            ("nbar", self.nbar, self.nbar >= 0.0, "must be >= 0"),
        ];
        for (name, value, ok, reason) in checks {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
            if !ok {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason,
                });
            }
        }
        Ok(())
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    pub fn with_g(self, g: f64) -> Self {
        Self { g, ..self }
    }

    pub fn with_nbar(self, nbar: f64) -> Self {
        Self { nbar, ..self }
    }
}

/// Conditions under which the dressed-state treatment is strained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ValidityWarning {
    /// `2Ω̄ <= 10γ`: the secular treatment of spontaneous emission needs `2Ω̄ >> γ`.
    DressedSplittingSmall { two_omega_bar: f64, gamma: f64 },
    /// `g >= Ω̄/2`: the second-order treatment of the fast terms needs `g << Ω̄`.
    CouplingStrong { g: f64, omega_bar: f64 },
}

impl fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::DressedSplittingSmall {
                two_omega_bar,
                gamma,
            } => write!(
                f,
                "dressed splitting 2Ω̄={two_omega_bar:.4} not >> γ={gamma:.4}"
            ),
            Self::CouplingStrong { g, omega_bar } => {
                write!(f, "coupling g={g:.4} not << Ω̄={omega_bar:.4}")
            }
        }
    }
}

/// Ratio below which `2Ω̄ / γ` triggers [`ValidityWarning::DressedSplittingSmall`].
pub const SPLITTING_WARN_RATIO: f64 = 10.0;
/// Ratio above which `g / Ω̄` triggers [`ValidityWarning::CouplingStrong`].
pub const COUPLING_WARN_RATIO: f64 = 0.5;

/// Derived quantities of the dressed master equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DressedParams {
    /// Mixing angle, in `(0, π/2)`; `π/4` on resonance.
    pub theta: f64,
    /// Generalized Rabi frequency `Ω̄`.
    pub omega_bar: f64,
    /// Level shift from the fast terms; zero in secular mode.
    pub delta_bar: f64,
    /// Dispersive phonon-number shift from the fast terms; zero in secular mode.
    pub beta: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_0: f64,
    /// `ω_ph - 2Ω̄`, the cavity frequency in the sideband-rotating frame.
    pub effective_detuning: f64,
    /// Sideband coupling `g sin(2θ)/2` of `b† R⁻ + R⁺ b`.
    pub sideband_coupling: f64,
    pub secular: bool,
    pub warnings: Vec<ValidityWarning>,
}

impl DressedParams {
    /// Total damping rate of a dressed coherence from the dot reservoirs.
    pub fn coherence_decay(&self) -> f64 {
        self.gamma_plus + self.gamma_minus + 4.0 * self.gamma_0
    }

    pub fn regime(&self) -> Regime {
        if self.secular {
            Regime::Secular
        } else {
            Regime::BeyondSecular
        }
    }
}

/// Which Hamiltonian the dressed model keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Secular,
    BeyondSecular,
}

impl Regime {
    pub fn is_secular(self) -> bool {
        matches!(self, Regime::Secular)
    }
}

/// Bose-Einstein occupation `1 / (exp(ħω/k_B T) - 1)`.
///
/// `hbar_over_kb` converts `omega_ph / temperature` into the dimensionless
/// exponent, so the function works in whatever unit system the caller uses.
/// Zero temperature gives zero occupation.
pub fn thermal_occupation(omega_ph: f64, temperature: f64, hbar_over_kb: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = hbar_over_kb * omega_ph / temperature;
    1.0 / x.exp_m1()
}

/// Mixing angle on the continuous branch: `θ = atan2(2Ω, Δ) / 2`.
pub fn mixing_angle(rabi: f64, delta: f64) -> f64 {
    (2.0 * rabi).atan2(delta) / 2.0
}

/// Dressed-state transformation of `params`.
///
/// With `secular` set, the fast-term corrections `delta_bar` and `beta` are
/// zero; every other field is identical between the two regimes.
pub fn dress(params: &ModelParams, secular: bool) -> Result<DressedParams> {
    params.validate()?;
    if params.rabi == 0.0 && params.delta == 0.0 {
        return Err(Error::UndefinedMixingAngle);
    }
    let theta = if params.delta == 0.0 {
        FRAC_PI_4
    } else {
        mixing_angle(params.rabi, params.delta)
    };
    let omega_bar = params.rabi.hypot(params.delta / 2.0);

    let (s, c) = theta.sin_cos();
    let s2 = (2.0 * theta).sin().powi(2);
    let c2 = (2.0 * theta).cos();

    let gamma_plus = params.gamma * c.powi(4) + 0.25 * params.gamma_c * s2;
    let gamma_minus = params.gamma * s.powi(4) + 0.25 * params.gamma_c * s2;
    let gamma_0 = 0.25 * (params.gamma * s2 + params.gamma_c * c2 * c2);

    let (delta_bar, beta) = if secular {
        (0.0, 0.0)
    } else {
        let g2 = params.g * params.g;
        let upper = params.omega_ph + 2.0 * omega_bar;
        let beta = g2 * s2 / (4.0 * upper);
        let delta_bar = 0.5 * g2 * (c2 / params.omega_ph - s2 / (4.0 * upper));
        (delta_bar, beta)
    };

    let mut warnings = Vec::new();
    if 2.0 * omega_bar <= SPLITTING_WARN_RATIO * params.gamma {
        warnings.push(ValidityWarning::DressedSplittingSmall {
            two_omega_bar: 2.0 * omega_bar,
            gamma: params.gamma,
        });
    }
    if params.g >= COUPLING_WARN_RATIO * omega_bar {
        warnings.push(ValidityWarning::CouplingStrong {
            g: params.g,
            omega_bar,
        });
    }

    Ok(DressedParams {
        theta,
        omega_bar,
        delta_bar,
        beta,
        gamma_plus,
        gamma_minus,
        gamma_0,
        effective_detuning: params.omega_ph - 2.0 * omega_bar,
        sideband_coupling: 0.5 * params.g * (2.0 * theta).sin(),
        secular,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    fn base() -> ModelParams {
        ModelParams {
            omega_ph: 2.0,
            delta: 0.0,
            rabi: 1.0,
            g: 0.3,
            gamma: 0.05,
            gamma_c: 0.01,
            kappa: 0.5,
            nbar: 1.0,
        }
    }

    /// Bernoulli expansion of `1/(e^x - 1)`, independent of `exp_m1`.
    fn bose_series(x: f64) -> f64 {
        // 1/x - 1/2 + Σ B_2k x^(2k-1) / (2k)!
        let terms = [
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30240.0,
            -1.0 / 1209600.0,
            1.0 / 47900160.0,
        ];
        let mut sum = 1.0 / x - 0.5;
        for (k, t) in terms.iter().enumerate() {
            sum += t * x.powi(2 * k as i32 + 1);
        }
        sum
    }

    #[test]
    fn thermal_occupation_limits() {
        assert_eq!(thermal_occupation(2.0, 0.0, 1.0), 0.0);
        let ln2 = std::f64::consts::LN_2;
        assert_abs_diff_eq!(thermal_occupation(ln2, 1.0, 1.0), 1.0, epsilon = 1e-14);
        let nbar = thermal_occupation(0.1, 1.0, 1.0);
        assert_abs_diff_eq!(nbar, bose_series(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(nbar, 9.5083, epsilon = 5e-5);
        // unit bridge: only the product hbar_over_kb * omega / T matters
        assert_abs_diff_eq!(
            thermal_occupation(1.0, 10.0, 1.0),
            thermal_occupation(0.5, 10.0, 2.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn resonant_dressing() {
        let p = base();
        let d = dress(&p, true).unwrap();
        assert_eq!(d.theta, FRAC_PI_4);
        assert_eq!(d.omega_bar, 1.0);
        assert_abs_diff_eq!(d.gamma_plus, 0.05 / 4.0 + 0.01 / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.gamma_minus, 0.05 / 4.0 + 0.01 / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.gamma_0, 0.05 / 4.0, epsilon = 1e-15);
        assert_eq!((d.delta_bar, d.beta), (0.0, 0.0));

        let b = dress(&p, false).unwrap();
        let g2 = 0.09;
        assert_abs_diff_eq!(b.delta_bar, -g2 / (8.0 * (2.0 + 2.0)), epsilon = 1e-15);
        assert_abs_diff_eq!(b.beta, g2 / (4.0 * (2.0 + 2.0)), epsilon = 1e-15);
    }

    #[test]
    fn detuned_by_twice_rabi() {
        let d = dress(&base().with_delta(2.0), true).unwrap();
        assert_abs_diff_eq!(d.theta, FRAC_PI_8, epsilon = 1e-15);
        assert_abs_diff_eq!(d.omega_bar, 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_undriven_resonance() {
        let p = ModelParams {
            rabi: 0.0,
            ..base()
        };
        assert!(matches!(dress(&p, true), Err(Error::UndefinedMixingAngle)));
        // off resonance an undriven dot is fine: |-> = |g>
        let d = dress(&p.with_delta(1.0), true).unwrap();
        assert_eq!(d.theta, 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let p = ModelParams {
            kappa: 0.0,
            ..base()
        };
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { name: "kappa", .. })
        ));
        let p = ModelParams {
            nbar: f64::NAN,
            ..base()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn warnings_fire_at_thresholds() {
        let d = dress(&base(), false).unwrap();
        assert!(d.warnings.is_empty());
        let d = dress(&ModelParams { g: 0.5, ..base() }, false).unwrap();
        assert!(matches!(
            d.warnings[..],
            [ValidityWarning::CouplingStrong { .. }]
        ));
        let d = dress(
            &ModelParams {
                gamma: 0.2,
                ..base()
            },
            true,
        )
        .unwrap();
        assert!(matches!(
            d.warnings[..],
            [ValidityWarning::DressedSplittingSmall { .. }]
        ));
    }

    #[test]
    fn delta_bar_sign_at_branch_ends() {
        // θ -> 0 for large positive detuning: Δ̄ -> g²/(2ω_ph)
        let far = dress(&base().with_delta(1e7), false).unwrap();
        assert!(far.delta_bar > 0.0);
        assert_abs_diff_eq!(far.delta_bar, 0.09 / 4.0, epsilon = 1e-9);
        let res = dress(&base(), false).unwrap();
        assert!(res.delta_bar < 0.0);
    }

    proptest! {
        #[test]
        fn theta_monotone_and_bounded(d1 in -50.0f64..50.0, step in 1e-3f64..10.0, rabi in 0.01f64..5.0) {
            let t1 = mixing_angle(rabi, d1);
            let t2 = mixing_angle(rabi, d1 + step);
            prop_assert!(t2 < t1);
            prop_assert!(t1 > 0.0 && t1 < FRAC_PI_2);
        }

        #[test]
        fn dressed_invariants(delta in -10.0f64..10.0, rabi in 0.01f64..5.0, g in 0.0f64..2.0,
                              gamma in 0.0f64..1.0, gamma_c in 0.0f64..1.0) {
            let p = ModelParams { delta, rabi, g, gamma, gamma_c, ..base() };
            let s = dress(&p, true).unwrap();
            let b = dress(&p, false).unwrap();
            prop_assert!(s.omega_bar >= rabi);
            prop_assert!(s.gamma_plus >= 0.0 && s.gamma_minus >= 0.0 && s.gamma_0 >= 0.0);
            let (sn, cs) = s.theta.sin_cos();
            prop_assert!(s.gamma_plus + s.gamma_minus >= gamma * (cs.powi(4) + sn.powi(4)) - 1e-15);
            prop_assert!(b.beta >= 0.0);
            prop_assert_eq!((s.delta_bar, s.beta), (0.0, 0.0));
            let b_as_secular = DressedParams { delta_bar: 0.0, beta: 0.0, secular: true, ..b.clone() };
            prop_assert_eq!(&s, &b_as_secular);
            // pure: bit-identical on repeat
            prop_assert_eq!(dress(&p, false).unwrap(), b);
        }
    }
}
