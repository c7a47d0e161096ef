//! Closed equations of motion for the Fock-diagonal projections of the six
//! dressed-state combinations
//!
//! ```text
//! ρ1 = ρ++ + ρ--          ρ2 = ρ++ - ρ--
//! ρ3 = b†ρ+- - ρ-+ b      ρ4 = b†ρ+- + ρ-+ b
//! ρ5 = ρ+- b† - b ρ-+     ρ6 = ρ+- b† + b ρ-+
//! ```
//!
//! with `P_n^(i) = <n|ρi|n>`, under the sideband-frame Hamiltonian
//! `H = δ b†b - Δ̄ R_z + β b†b R_z - G (b†R⁻ + R⁺b)` (`δ = ω_ph - 2Ω̄`,
//! `G = g sin(2θ)/2`) and the dissipators `κ(1+n̄) L(b)`, `κ n̄ L(b†)`,
//! `γ₊ L(R⁻)`, `γ₋ L(R⁺)`, `γ₀ L(R_z)` with `L(O) = 2OρO† - O†Oρ - ρO†O`.
//!
//! The Hamiltonian conserves `b†b + R++` and every dissipator changes it by a
//! definite amount, so populations `<n|ρ±±|n>` only talk to the coherences
//! `x_n = <n|ρ+-|n+1>` and `y_n = <n+1|ρ-+|n>`. In terms of those,
//! `P3_n = √n (x_{n-1} - y_{n-1})` and `P5_n = √(n+1) (x_n - y_n)`, so the
//! same coherence appears twice (`P3_{n+1} = P5_n`, likewise `P4`/`P6`).
//! The population rows read the coherence as the average of both copies,
//! which keeps the `P1` rows trace-conserving column by column; the
//! difference between the copies obeys a damped homogeneous equation and
//! vanishes in the steady state.
//!
//! Truncation follows the truncated ladder operators exactly (`b†|N> = 0`),
//! so the generator equals the projection of the truncated Liouvillian.
//! `P3_0`, `P4_0`, `P5_N`, `P6_N` are identically zero and are pinned by a
//! pure decay row.

use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{DressedParams, ModelParams, ValidityWarning};
use crate::sparse::{max_abs, LuSolver, SparseMatrix, TripletBuilder, C64};

/// Number of projected variables per Fock level.
pub const VARIABLES: usize = 6;
/// Smallest accepted Fock truncation.
pub const MIN_N_MAX: usize = 2;
/// Default hard cap for [`solve_adaptive`].
pub const DEFAULT_N_CAP: usize = 4096;
/// Tail mass above which a solve carries a truncation warning.
pub const TAIL_WARN: f64 = 1e-6;

const ZERO: C64 = Complex64::new(0.0, 0.0);
const I: C64 = Complex64::new(0.0, 1.0);

/// Maps `(variable, n)` to a flat index; the Fock index is major so the
/// generator is block tridiagonal with 6×6 blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub n_max: usize,
}

impl Layout {
    pub fn dim(&self) -> usize {
        VARIABLES * (self.n_max + 1)
    }

    /// `variable` is 1-based, matching `P_n^(1)` … `P_n^(6)`.
    pub fn index(&self, variable: usize, n: usize) -> usize {
        debug_assert!((1..=VARIABLES).contains(&variable) && n <= self.n_max);
        VARIABLES * n + (variable - 1)
    }

    /// Inverse of [`Layout::index`].
    pub fn locate(&self, flat: usize) -> (usize, usize) {
        (flat % VARIABLES + 1, flat / VARIABLES)
    }

    /// Flat indices of the variables that vanish identically.
    pub fn structural_zeros(&self) -> [usize; 4] {
        [
            self.index(3, 0),
            self.index(4, 0),
            self.index(5, self.n_max),
            self.index(6, self.n_max),
        ]
    }
}

/// Sparse generator `dP/dt = M P` of the projected variables.
#[derive(Debug, Clone)]
pub struct ReducedGenerator {
    pub n_max: usize,
    pub layout: Layout,
    pub matrix: SparseMatrix,
    pub dressed: DressedParams,
}

impl ReducedGenerator {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn apply(&self, p: &[C64]) -> Vec<C64> {
        self.matrix.matvec(p)
    }

    /// Largest `|n - m|` between coupled entries.
    pub fn fock_bandwidth(&self) -> usize {
        self.matrix
            .entries()
            .map(|(r, c, _)| self.layout.locate(r).1.abs_diff(self.layout.locate(c).1))
            .max()
            .unwrap_or(0)
    }

    /// Largest `|Σ_n M[(1,n), col]|` over all columns.
    pub fn trace_leak(&self) -> f64 {
        let mut sums = vec![ZERO; self.dim()];
        for (r, c, v) in self.matrix.entries() {
            if self.layout.locate(r).0 == 1 {
                sums[c] += v;
            }
        }
        max_abs(&sums)
    }
}

/// Builds the reduced generator for `params` dressed as `dressed`.
pub fn assemble(
    dressed: &DressedParams,
    params: &ModelParams,
    n_max: usize,
) -> Result<ReducedGenerator> {
    if n_max < MIN_N_MAX {
        return Err(Error::TruncationTooSmall {
            n_max,
            min: MIN_N_MAX,
        });
    }
    params.validate()?;
    let layout = Layout { n_max };
    let at = |v: usize, n: usize| layout.index(v, n);
    let nn = n_max;
    let mut b = TripletBuilder::with_capacity(layout.dim(), layout.dim(), 24 * layout.dim());

    let k1 = params.kappa * (1.0 + params.nbar);
    let k2 = params.kappa * params.nbar;
    let g = dressed.sideband_coupling;
    let coh = dressed.coherence_decay();
    let gp = dressed.gamma_plus;
    let gm = dressed.gamma_minus;
    // bb† in the truncated space
    let upper = |n: usize| if n < nn { (n + 1) as f64 } else { 0.0 };
    // detuning of |+,k> against |-,k+1>
    let omega = |k: usize| {
        -dressed.effective_detuning + dressed.beta * (2 * k + 1) as f64 - 2.0 * dressed.delta_bar
    };
    // damping of the coherence <k|ρ+-|k+1> from the phonon bath
    let phonon_coh = |k: usize| k1 * (2 * k + 1) as f64 + k2 * (upper(k) + upper(k + 1));

    for n in 0..=nn {
        let nf = n as f64;

        // populations: thermal birth-death chain for both P1 and P2
        for v in [1, 2] {
            b.push_real(at(v, n), at(v, n), -(2.0 * k1 * nf + 2.0 * k2 * upper(n)));
            if n < nn {
                b.push_real(at(v, n), at(v, n + 1), 2.0 * k1 * (nf + 1.0));
            }
            if n > 0 {
                b.push_real(at(v, n), at(v, n - 1), 2.0 * k2 * nf);
            }
        }
        // dressed-state relaxation of the population difference
        b.push_real(at(2, n), at(1, n), -2.0 * (gp - gm));
        b.push_real(at(2, n), at(2, n), -2.0 * (gp + gm));

        // sideband exchange |+,n> <-> |-,n+1> through c_n = (P3_{n+1} + P5_n)/2
        if n < nn {
            let h = -0.5 * I * g;
            for col in [at(3, n + 1), at(5, n)] {
                b.push(at(1, n), col, h);
                b.push(at(2, n), col, h);
            }
        }
        if n > 0 {
            let h = 0.5 * I * g;
            for col in [at(3, n), at(5, n - 1)] {
                b.push(at(1, n), col, h);
                b.push(at(2, n), col, -h);
            }
        }

        // coherences P5, P6 carry <n|ρ+-|n+1>
        if n < nn {
            let k = n;
            let diag = -(coh + phonon_coh(k));
            for v in [5, 6] {
                b.push_real(at(v, n), at(v, n), diag);
                if n + 1 < nn {
                    b.push_real(at(v, n), at(v, n + 1), 2.0 * k1 * (nf + 1.0));
                }
                if n > 0 {
                    b.push_real(at(v, n), at(v, n - 1), 2.0 * k2 * (nf + 1.0));
                }
            }
            b.push(at(5, n), at(6, n), -I * omega(k));
            b.push(at(6, n), at(5, n), -I * omega(k));
            // 2iG(n+1)(q_{n+1} - p_n) with p = (P1+P2)/2, q = (P1-P2)/2
            let h = I * g * (nf + 1.0);
            b.push(at(5, n), at(1, n + 1), h);
            b.push(at(5, n), at(2, n + 1), -h);
            b.push(at(5, n), at(1, n), -h);
            b.push(at(5, n), at(2, n), -h);
        }

        // coherences P3, P4 carry <n-1|ρ+-|n>
        if n > 0 {
            let k = n - 1;
            let diag = -(coh + phonon_coh(k));
            for v in [3, 4] {
                b.push_real(at(v, n), at(v, n), diag);
                if n < nn {
                    b.push_real(at(v, n), at(v, n + 1), 2.0 * k1 * nf);
                }
                if n > 1 {
                    b.push_real(at(v, n), at(v, n - 1), 2.0 * k2 * nf);
                }
            }
            b.push(at(3, n), at(4, n), -I * omega(k));
            b.push(at(4, n), at(3, n), -I * omega(k));
            let h = I * g * nf;
            b.push(at(3, n), at(1, n), h);
            b.push(at(3, n), at(2, n), -h);
            b.push(at(3, n), at(1, n - 1), -h);
            b.push(at(3, n), at(2, n - 1), -h);
        }
    }

    let pin = -(coh + params.kappa);
    for idx in layout.structural_zeros() {
        b.push_real(idx, idx, pin);
    }

    let gen = ReducedGenerator {
        n_max,
        layout,
        matrix: b.build(),
        dressed: dressed.clone(),
    };
    check_structure(&gen, params)?;
    Ok(gen)
}

/// Structural closure checks: nearest-neighbour Fock coupling, trace
/// conservation of the `P1` block, and no coupling into the pinned zeros.
fn check_structure(gen: &ReducedGenerator, params: &ModelParams) -> Result<()> {
    let band = gen.fock_bandwidth();
    if band > 1 {
        return Err(Error::NotClosed(format!("Fock bandwidth {band} > 1")));
    }
    let scale = gen.matrix.norm_inf().max(params.kappa);
    let leak = gen.trace_leak();
    if leak > 1e-12 * scale {
        return Err(Error::NotClosed(format!("P1 column sums leak {leak:.3e}")));
    }
    for z in gen.layout.structural_zeros() {
        if gen.matrix.row(z).any(|(c, _)| c != z) {
            return Err(Error::NotClosed(format!(
                "pinned variable {:?} is driven",
                gen.layout.locate(z)
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SolveWarning {
    /// Probability in the top retained Fock level exceeds [`TAIL_WARN`].
    TruncationTail {
        tail_mass: f64,
    },
    Validity(ValidityWarning),
    /// A steady-state invariant is violated beyond its tolerance.
    Invariant {
        what: &'static str,
        value: f64,
    },
}

impl fmt::Display for SolveWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TruncationTail { tail_mass } => write!(f, "truncation tail {tail_mass:.3e}"),
            Self::Validity(w) => write!(f, "{w}"),
            Self::Invariant { what, value } => write!(f, "{what} violated ({value:.3e})"),
        }
    }
}

/// Normalized steady state of the reduced generator.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub n_max: usize,
    pub layout: Layout,
    /// All `P_n^(i)` in [`Layout`] order.
    pub p: Vec<C64>,
    /// `max |M p|`.
    pub residual: f64,
    /// `P_{n_max}^(1)`.
    pub tail_mass: f64,
    pub dressed: DressedParams,
    pub warnings: Vec<SolveWarning>,
}

impl SteadyState {
    pub fn variable(&self, variable: usize, n: usize) -> C64 {
        self.p[self.layout.index(variable, n)]
    }

    /// Phonon number distribution `P_n^(1)`.
    pub fn distribution(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| self.variable(1, n).re).collect()
    }
}

/// Steady state with the `P1_0` row replaced by the normalization.
pub fn solve_steady(gen: &ReducedGenerator) -> Result<SteadyState> {
    solve_steady_replacing(gen, 0)
}

/// Steady state with the `P1_{replaced_level}` row replaced by
/// `Σ_n P1_n = 1`. Any population row is redundant because the `P1` rows sum
/// to zero.
pub fn solve_steady_replacing(
    gen: &ReducedGenerator,
    replaced_level: usize,
) -> Result<SteadyState> {
    assert!(replaced_level <= gen.n_max);
    let layout = gen.layout;
    let row = layout.index(1, replaced_level);
    let constraint: Vec<(usize, C64)> = (0..=gen.n_max)
        .map(|n| (layout.index(1, n), C64::new(1.0, 0.0)))
        .collect();
    let system = gen.matrix.with_row_replaced(row, &constraint);
    let lu = LuSolver::factorize(&system)?;

    let mut p = vec![ZERO; layout.dim()];
    p[row] = C64::new(1.0, 0.0);
    lu.solve_in_place(&mut p);

    let residual = max_abs(&gen.apply(&p));
    let scale = system.norm_inf();
    if p.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) || residual > 1e-6 * scale {
        let sigma = lu.min_singular_value_estimate(20);
        return Err(Error::Singular {
            condition_estimate: scale / sigma,
        });
    }

    let tail_mass = p[layout.index(1, gen.n_max)].re;
    let mut warnings: Vec<SolveWarning> = gen
        .dressed
        .warnings
        .iter()
        .copied()
        .map(SolveWarning::Validity)
        .collect();
    if tail_mass > TAIL_WARN {
        warnings.push(SolveWarning::TruncationTail { tail_mass });
    }
    let ss = SteadyState {
        n_max: gen.n_max,
        layout,
        p,
        residual,
        tail_mass,
        dressed: gen.dressed.clone(),
        warnings,
    };
    Ok(check_invariants(ss))
}

fn check_invariants(mut ss: SteadyState) -> SteadyState {
    let dist = ss.distribution();
    let total: f64 = dist.iter().sum();
    let mut flags = Vec::new();
    if (total - 1.0).abs() > 1e-10 {
        flags.push(SolveWarning::Invariant {
            what: "normalization",
            value: total - 1.0,
        });
    }
    let min = dist.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        flags.push(SolveWarning::Invariant {
            what: "nonnegative populations",
            value: min,
        });
    }
    let excess = (0..=ss.n_max)
        .map(|n| ss.variable(2, n).norm() - dist[n])
        .fold(f64::NEG_INFINITY, f64::max);
    if excess > 1e-10 {
        flags.push(SolveWarning::Invariant {
            what: "|P2| <= P1",
            value: excess,
        });
    }
    ss.warnings.extend(flags);
    ss
}

fn mean_phonons(ss: &SteadyState) -> f64 {
    ss.distribution()
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// Doubles `n_max` from `n_start` until the tail mass is below `tail_tol`
/// and `<n>` moved by less than `tail_tol (1 + <n>)` since the previous
/// truncation. Fails past [`DEFAULT_N_CAP`].
pub fn solve_adaptive(
    dressed: &DressedParams,
    params: &ModelParams,
    tail_tol: f64,
    n_start: usize,
) -> Result<SteadyState> {
    solve_adaptive_capped(dressed, params, tail_tol, n_start, DEFAULT_N_CAP)
}

pub fn solve_adaptive_capped(
    dressed: &DressedParams,
    params: &ModelParams,
    tail_tol: f64,
    n_start: usize,
    n_cap: usize,
) -> Result<SteadyState> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            value: tail_tol,
            reason: "must lie in (0, 1)",
        });
    }
    if n_start < MIN_N_MAX {
        return Err(Error::TruncationTooSmall {
            n_max: n_start,
            min: MIN_N_MAX,
        });
    }
    let mut n_max = n_start;
    let mut previous: Option<f64> = None;
    let mut last_tail = f64::NAN;
    while n_max <= n_cap {
        let ss = solve_steady(&assemble(dressed, params, n_max)?)?;
        let mean = mean_phonons(&ss);
        last_tail = ss.tail_mass;
        if let Some(prev) = previous {
            if ss.tail_mass.abs() < tail_tol && (mean - prev).abs() < tail_tol * (1.0 + mean.abs())
            {
                return Ok(ss);
            }
        }
        previous = Some(mean);
        n_max *= 2;
    }
    Err(Error::TruncationCap {
        cap: n_cap,
        n_max: n_max / 2,
        tail_mass: last_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dress;
    use approx::assert_abs_diff_eq;

    fn fixture(delta: f64, g: f64) -> ModelParams {
        ModelParams {
            omega_ph: 2.0,
            delta,
            rabi: 1.0,
            g,
            gamma: 0.05,
            gamma_c: 0.01,
            kappa: 0.5,
            nbar: 1.0,
        }
    }

    fn thermal(nbar: f64, n: usize) -> f64 {
        nbar.powi(n as i32) / (1.0 + nbar).powi(n as i32 + 1)
    }

    #[test]
    fn rejects_tiny_truncation() {
        let p = fixture(1.0, 0.3);
        let d = dress(&p, false).unwrap();
        assert!(matches!(
            assemble(&d, &p, 1),
            Err(Error::TruncationTooSmall { n_max: 1, .. })
        ));
    }

    #[test]
    fn layout_round_trip() {
        let l = Layout { n_max: 7 };
        for flat in 0..l.dim() {
            let (v, n) = l.locate(flat);
            assert_eq!(l.index(v, n), flat);
        }
    }

    #[test]
    fn nearest_neighbour_structure_and_trace() {
        for secular in [true, false] {
            let p = fixture(1.3, 0.3);
            let gen = assemble(&dress(&p, secular).unwrap(), &p, 5).unwrap();
            assert_eq!(gen.fock_bandwidth(), 1);
            assert!(gen.trace_leak() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_populations_form_thermal_chain() {
        let p = ModelParams {
            nbar: 0.7,
            ..fixture(0.8, 0.0)
        };
        let gen = assemble(&dress(&p, false).unwrap(), &p, 6).unwrap();
        let l = gen.layout;
        let (k1, k2) = (0.5 * 1.7, 0.5 * 0.7);
        for n in 0..=6 {
            let row = l.index(1, n);
            for (c, v) in gen.matrix.row(row) {
                let (var, m) = l.locate(c);
                assert_eq!(var, 1, "P1 couples only to P1 when g = 0");
                let expected = if m + 1 == n {
                    2.0 * k2 * n as f64
                } else if m == n + 1 {
                    2.0 * k1 * m as f64
                } else {
                    let up = if n < 6 {
                        2.0 * k2 * (n + 1) as f64
                    } else {
                        0.0
                    };
                    -(2.0 * k1 * n as f64 + up)
                };
                assert_abs_diff_eq!(v.re, expected, epsilon = 1e-14);
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn thermal_fixed_point_without_coupling() {
        let p = ModelParams {
            nbar: 0.5,
            ..fixture(1.0, 0.0)
        };
        let ss = solve_steady(&assemble(&dress(&p, false).unwrap(), &p, 60).unwrap()).unwrap();
        let norm = 1.0 - thermal(0.5, 61) * 3.0; // 1 - (1/3)^61, i.e. 1 to machine precision
        for n in 0..=60 {
            assert_abs_diff_eq!(
                ss.variable(1, n).re,
                thermal(0.5, n) / norm,
                epsilon = 1e-12
            );
            for v in 3..=6 {
                assert_eq!(ss.variable(v, n), ZERO);
            }
        }
        assert_abs_diff_eq!(mean_phonons(&ss), 0.5, epsilon = 1e-12);
        assert!(ss.residual < 1e-12);
    }

    #[test]
    fn replaced_row_does_not_matter() {
        let p = fixture(1.4, 0.3);
        let gen = assemble(&dress(&p, false).unwrap(), &p, 30).unwrap();
        let a = solve_steady(&gen).unwrap();
        for level in [7, 30] {
            let b = solve_steady_replacing(&gen, level).unwrap();
            for (x, y) in a.p.iter().zip(&b.p) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn duplicate_coherence_copies_agree_in_steady_state() {
        let p = fixture(1.4, 0.3);
        let ss = solve_steady(&assemble(&dress(&p, false).unwrap(), &p, 30).unwrap()).unwrap();
        for n in 0..30 {
            assert!((ss.variable(5, n) - ss.variable(3, n + 1)).norm() < 1e-12);
            assert!((ss.variable(6, n) - ss.variable(4, n + 1)).norm() < 1e-12);
            // ρ3, ρ5 are anti-Hermitian combinations, ρ4, ρ6 Hermitian
            assert!(ss.variable(5, n).re.abs() < 1e-12);
            assert!(ss.variable(6, n).im.abs() < 1e-12);
        }
        assert!(ss
            .warnings
            .iter()
            .all(|w| !matches!(w, SolveWarning::Invariant { .. })));
    }

    #[test]
    fn adaptive_thermal_converges_quickly() {
        let p = ModelParams {
            nbar: 0.5,
            ..fixture(1.0, 0.0)
        };
        let ss = solve_adaptive(&dress(&p, true).unwrap(), &p, 1e-10, 4).unwrap();
        // 4 -> 8 -> 16 -> 32 -> 64: the <n> test needs the half truncation converged too
        assert!(ss.n_max <= 64);
        assert_abs_diff_eq!(mean_phonons(&ss), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn adaptive_independent_of_start() {
        let p = fixture(1.4, 0.3);
        let d = dress(&p, false).unwrap();
        let tol = 1e-10;
        let a = mean_phonons(&solve_adaptive(&d, &p, tol, 4).unwrap());
        let b = mean_phonons(&solve_adaptive(&d, &p, tol, 16).unwrap());
        assert!((a - b).abs() < tol * (1.0 + a));
    }

    #[test]
    fn adaptive_hits_cap_in_runaway_regime() {
        // blue detuning with weak damping: strong phonon generation
        let p = ModelParams {
            kappa: 1e-3,
            nbar: 0.0,
            g: 0.4,
            gamma: 0.05,
            gamma_c: 0.0,
            ..fixture(-1.0, 0.4)
        };
        let d = dress(&p, true).unwrap();
        let err = solve_adaptive_capped(&d, &p, 1e-10, 4, 64).unwrap_err();
        assert!(matches!(err, Error::TruncationCap { cap: 64, .. }), "{err}");
    }

    #[test]
    fn adaptive_rejects_bad_tolerance() {
        let p = fixture(1.0, 0.1);
        let d = dress(&p, true).unwrap();
        assert!(solve_adaptive(&d, &p, 0.0, 4).is_err());
        assert!(solve_adaptive(&d, &p, 1e-8, 1).is_err());
    }
}
