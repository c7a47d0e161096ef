//! Brute-force reference: the full Liouvillian on the joint dot-phonon
//! space, its null space, and time propagation.
//!
//! Density matrices are vectorized column-stacked, `vec(ρ)[i + D j] = ρ[i, j]`
//! with `D = 2 (n_max + 1)`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`. The superoperator
//! is stored sparse; "dense" only refers to the full Hilbert-space basis,
//! which limits the oracle to desk-scale truncations.

mod operators;
mod projection;
mod propagate;

pub use operators::{
    annihilation, dagger, dot_block, kron, on_dot, on_phonon, phonon_distribution, Operator,
};
pub use projection::{projection_mismatch, random_density_matrix, six_variables, SampleKind};
pub use propagate::{propagate, Trajectory};

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DressedParams, ModelParams};
use crate::reduced::MIN_N_MAX;
use crate::sparse::{max_abs, LuSolver, SparseMatrix, TripletBuilder, C64};
use crate::statistics::PhononStats;
use operators::{lowering, pauli_z, re, upper_projector};

/// Largest truncation the oracle accepts.
pub const DENSE_CAP: usize = 64;
/// Extra Fock levels conventionally added on top of the reduced truncation.
pub const GUARD_BAND: usize = 5;
/// Relative null-space gap below which the steady state is rejected.
pub const MIN_GAP: f64 = 1e-10;

/// Which two-level basis the joint space uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `{|+>, |->}` of the dressed master equation.
    Dressed,
    /// `{|e>, |g>}` of the undressed model in the laser frame.
    Bare,
}

/// Superoperator of `dρ/dt` on the joint space.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub n_max: usize,
    pub hilbert_dim: usize,
    pub matrix: SparseMatrix,
    pub basis: Basis,
}

impl Liouvillian {
    pub fn vectorize(&self, rho: &Operator) -> Vec<C64> {
        let d = self.hilbert_dim;
        assert_eq!(rho.dim(), (d, d));
        (0..d * d).map(|k| rho[[k % d, k / d]]).collect()
    }

    pub fn unvectorize(&self, v: &[C64]) -> Operator {
        let d = self.hilbert_dim;
        Operator::from_shape_fn((d, d), |(i, j)| v[i + d * j])
    }

    /// `L(ρ)`.
    pub fn apply(&self, rho: &Operator) -> Operator {
        self.unvectorize(&self.matrix.matvec(&self.vectorize(rho)))
    }

    /// Largest `|L_kk|`, used as the fastest rate of the dynamics.
    pub fn fastest_rate(&self) -> f64 {
        self.matrix.max_abs_diagonal()
    }
}

fn nonzeros(a: &Operator) -> Vec<(usize, usize, C64)> {
    a.indexed_iter()
        .filter(|(_, z)| z.norm() != 0.0)
        .map(|((i, j), &z)| (i, j, z))
        .collect()
}

/// Lindblad generator `-i[H, ρ] + Σ rate (2OρO† - O†Oρ - ρO†O)`.
fn lindblad(h: &Operator, jumps: &[(f64, Operator)], n_max: usize, basis: Basis) -> Liouvillian {
    let d = h.nrows();
    let mut b = TripletBuilder::new(d * d, d * d);
    let minus_i = Complex64::new(0.0, -1.0);

    // A ρ: (i + D j, k + D j) = A[i, k]
    let left = |b: &mut TripletBuilder, a: &Operator, f: C64| {
        let nz = nonzeros(a);
        for j in 0..d {
            for &(i, k, v) in &nz {
                b.push(i + d * j, k + d * j, f * v);
            }
        }
    };
    // ρ A: (i + D j, i + D k) = A[k, j]
    let right = |b: &mut TripletBuilder, a: &Operator, f: C64| {
        let nz = nonzeros(a);
        for i in 0..d {
            for &(k, j, v) in &nz {
                b.push(i + d * j, i + d * k, f * v);
            }
        }
    };

    left(&mut b, h, minus_i);
    right(&mut b, h, -minus_i);
    for (rate, op) in jumps {
        if *rate == 0.0 {
            continue;
        }
        let op_dag = dagger(op);
        let number = op_dag.dot(op);
        // O ρ O†: (i + D j, k + D l) = O[i, k] conj(O[j, l])
        let nz = nonzeros(op);
        for &(i, k, v) in &nz {
            for &(j, l, w) in &nz {
                b.push(i + d * j, k + d * l, re(2.0 * rate) * v * w.conj());
            }
        }
        left(&mut b, &number, re(-rate));
        right(&mut b, &number, re(-rate));
    }
    Liouvillian {
        n_max,
        hilbert_dim: d,
        matrix: b.build(),
        basis,
    }
}

fn check_truncation(n_max: usize) -> Result<()> {
    if n_max < MIN_N_MAX {
        return Err(Error::TruncationTooSmall {
            n_max,
            min: MIN_N_MAX,
        });
    }
    if n_max > DENSE_CAP {
        return Err(Error::OracleTooLarge {
            n_max,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

fn phonon_jumps(params: &ModelParams, b: &Operator) -> [(f64, Operator); 2] {
    [
        (params.kappa * (1.0 + params.nbar), b.clone()),
        (params.kappa * params.nbar, dagger(b)),
    ]
}

/// Dressed master equation in the sideband-rotating frame:
/// `H = (ω_ph - 2Ω̄) b†b - Δ̄ R_z + β b†b R_z - G (b†R⁻ + R⁺b)` with
/// dissipators `κ(1+n̄) L(b)`, `κn̄ L(b†)`, `γ₊ L(R⁻)`, `γ₋ L(R⁺)`, `γ₀ L(R_z)`.
pub fn build_dressed_liouvillian(
    dressed: &DressedParams,
    params: &ModelParams,
    n_max: usize,
) -> Result<Liouvillian> {
    check_truncation(n_max)?;
    params.validate()?;
    let b = on_phonon(&annihilation(n_max));
    let bd = dagger(&b);
    let number = bd.dot(&b);
    let rz = on_dot(&pauli_z(), n_max);
    let rm = on_dot(&lowering(), n_max);
    let rp = dagger(&rm);

    let h = number.mapv(|z| z * dressed.effective_detuning) - rz.mapv(|z| z * dressed.delta_bar)
        + number.dot(&rz).mapv(|z| z * dressed.beta)
        - (bd.dot(&rm) + rp.dot(&b)).mapv(|z| z * dressed.sideband_coupling);

    let [decay, pump] = phonon_jumps(params, &b);
    let jumps = [
        decay,
        pump,
        (dressed.gamma_plus, rm),
        (dressed.gamma_minus, rp),
        (dressed.gamma_0, rz),
    ];
    Ok(lindblad(&h, &jumps, n_max, Basis::Dressed))
}

/// Undressed model in the frame rotating at the laser frequency:
/// `H = Δ S_z + ω_ph b†b + Ω (S⁺ + S⁻) + g S⁺S⁻ (b† + b)` with
/// `κ(1+n̄) L(b)`, `κn̄ L(b†)`, `γ L(S⁻)`, `γ_c L(S_z)`.
///
/// Only the dot is driven, so the phonon operators are unchanged by the
/// frame rotation. No secular approximation is made anywhere.
pub fn build_labframe_rotating_liouvillian(
    params: &ModelParams,
    n_max: usize,
) -> Result<Liouvillian> {
    check_truncation(n_max)?;
    params.validate()?;
    let b = on_phonon(&annihilation(n_max));
    let bd = dagger(&b);
    let sz = on_dot(&pauli_z(), n_max).mapv(|z| z * 0.5);
    let sm = on_dot(&lowering(), n_max);
    let sp = dagger(&sm);
    let excited = on_dot(&upper_projector(), n_max);

    let h = sz.mapv(|z| z * params.delta)
        + bd.dot(&b).mapv(|z| z * params.omega_ph)
        + (&sp + &sm).mapv(|z| z * params.rabi)
        + excited.dot(&(&bd + &b)).mapv(|z| z * params.g);

    let [decay, pump] = phonon_jumps(params, &b);
    let jumps = [decay, pump, (params.gamma, sm), (params.gamma_c, sz)];
    Ok(lindblad(&h, &jumps, n_max, Basis::Bare))
}

/// Null-space steady state of a [`Liouvillian`].
#[derive(Debug, Clone)]
pub struct NullSteadyState {
    pub n_max: usize,
    /// Unit-trace, Hermitian density matrix.
    pub rho: Operator,
    /// `max |L vec(ρ)|`.
    pub residual: f64,
    /// Smallest singular value of the trace-constrained system relative to
    /// its ∞-norm. Zero would mean a degenerate null space.
    pub gap: f64,
    pub min_eigenvalue: f64,
}

impl NullSteadyState {
    pub fn distribution(&self) -> Vec<f64> {
        phonon_distribution(&self.rho, self.n_max)
    }

    pub fn stats(&self) -> Result<PhononStats> {
        PhononStats::from_distribution(self.distribution())
    }
}

/// Solves `L vec(ρ) = 0` with the `(0,0)` row replaced by `tr ρ = 1`.
pub fn steady_state_null(liouv: &Liouvillian) -> Result<NullSteadyState> {
    let d = liouv.hilbert_dim;
    let trace_row: Vec<(usize, C64)> = (0..d).map(|i| (i + d * i, re(1.0))).collect();
    let system = liouv.matrix.with_row_replaced(0, &trace_row);
    let lu = LuSolver::factorize(&system)?;
    let mut x = vec![re(0.0); d * d];
    x[0] = re(1.0);
    lu.solve_in_place(&mut x);

    let gap = lu.min_singular_value_estimate(25) / system.norm_inf();
    if gap.is_nan() || gap < MIN_GAP {
        return Err(Error::DegenerateNullSpace { gap });
    }
    let residual = max_abs(&liouv.matrix.matvec(&x));

    let raw = liouv.unvectorize(&x);
    let rho = (&raw + &dagger(&raw)).mapv(|z| z * 0.5);
    let eigen = Mat::from_fn(d, d, |i, j| rho[[i, j]])
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let min_eigenvalue = eigen.first().copied().unwrap_or(0.0);
    if min_eigenvalue < -1e-8 {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(NullSteadyState {
        n_max: liouv.n_max,
        rho,
        residual,
        gap,
        min_eigenvalue,
    })
}

/// `ρ_dot ⊗ thermal(n̄)` on the joint space.
pub fn product_state(dot: [[C64; 2]; 2], nbar: f64, n_max: usize) -> Operator {
    let r = nbar / (1.0 + nbar);
    let weights: Vec<f64> = (0..=n_max).map(|n| r.powi(n as i32)).collect();
    let z: f64 = weights.iter().sum();
    let mut thermal = Operator::zeros((n_max + 1, n_max + 1));
    for (n, w) in weights.iter().enumerate() {
        thermal[[n, n]] = re(w / z);
    }
    let dot = Operator::from_shape_fn((2, 2), |(i, j)| dot[i][j]);
    kron(&dot, &thermal)
}

pub(crate) fn trace(rho: &Operator) -> C64 {
    rho.diag().sum()
}
