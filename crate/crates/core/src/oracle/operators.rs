//! Hilbert-space operators on `{two-level} ⊗ {|0>…|n_max>}`.
//!
//! Index convention: the two-level index is major, `h = s (n_max+1) + n`,
//! with `s = 0` the upper state (`|+>` or `|e>`) and `s = 1` the lower one.

use ndarray::Array2;
use num_complex::Complex64;

use crate::sparse::C64;

pub type Operator = Array2<C64>;

pub(crate) fn re(x: f64) -> C64 {
    Complex64::new(x, 0.0)
}

/// Truncated annihilation operator on `n_max + 1` Fock levels.
pub fn annihilation(n_max: usize) -> Operator {
    let mut b = Operator::zeros((n_max + 1, n_max + 1));
    for n in 1..=n_max {
        b[[n - 1, n]] = re((n as f64).sqrt());
    }
    b
}

pub fn identity(dim: usize) -> Operator {
    Operator::eye(dim)
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Operator::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == re(0.0) {
            continue;
        }
        for ((k, l), &y) in b.indexed_iter() {
            out[[i * br + k, j * bc + l]] = x * y;
        }
    }
    out
}

pub fn dagger(a: &Operator) -> Operator {
    a.t().mapv(|z| z.conj())
}

/// `|lower><upper|` on the two-level factor.
pub fn lowering() -> Operator {
    let mut m = Operator::zeros((2, 2));
    m[[1, 0]] = re(1.0);
    m
}

/// `|upper><upper| - |lower><lower|`.
pub fn pauli_z() -> Operator {
    let mut m = Operator::zeros((2, 2));
    m[[0, 0]] = re(1.0);
    m[[1, 1]] = re(-1.0);
    m
}

/// `|upper><upper|`.
pub fn upper_projector() -> Operator {
    let mut m = Operator::zeros((2, 2));
    m[[0, 0]] = re(1.0);
    m
}

/// Two-level operator lifted to the joint space.
pub fn on_dot(op: &Operator, n_max: usize) -> Operator {
    kron(op, &identity(n_max + 1))
}

/// Phonon operator lifted to the joint space.
pub fn on_phonon(op: &Operator) -> Operator {
    kron(&identity(2), op)
}

/// Block `<s|ρ|s'>` of a joint-space matrix, as a phonon-space operator.
pub fn dot_block(rho: &Operator, s: usize, s_prime: usize, n_max: usize) -> Operator {
    let d = n_max + 1;
    rho.slice(ndarray::s![
        s * d..(s + 1) * d,
        s_prime * d..(s_prime + 1) * d
    ])
    .to_owned()
}

/// Phonon number distribution `P_n = Σ_s <s,n|ρ|s,n>`.
pub fn phonon_distribution(rho: &Operator, n_max: usize) -> Vec<f64> {
    let d = n_max + 1;
    (0..d)
        .map(|n| rho[[n, n]].re + rho[[d + n, d + n]].re)
        .collect()
}
