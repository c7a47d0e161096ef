//! Projection of a joint-space density matrix onto the six reduced
//! variables, computed with explicit operator products.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{annihilation, dagger, dot_block, Operator};
use super::{build_dressed_liouvillian, trace};
use crate::error::Result;
use crate::model::{DressedParams, ModelParams};
use crate::reduced::{assemble, Layout};
use crate::sparse::C64;

/// `P_n^(i) = <n|ρi|n>` in [`Layout`] order, from the dressed-basis `rho`.
pub fn six_variables(rho: &Operator, n_max: usize) -> Vec<C64> {
    let b = annihilation(n_max);
    let bd = dagger(&b);
    let pp = dot_block(rho, 0, 0, n_max);
    let mm = dot_block(rho, 1, 1, n_max);
    let pm = dot_block(rho, 0, 1, n_max);
    let mp = dot_block(rho, 1, 0, n_max);

    let left = bd.dot(&pm);
    let left_h = mp.dot(&b);
    let right = pm.dot(&bd);
    let right_h = b.dot(&mp);
    let combos: [Array2<C64>; 6] = [
        &pp + &mm,
        &pp - &mm,
        &left - &left_h,
        &left + &left_h,
        &right - &right_h,
        &right + &right_h,
    ];

    let layout = Layout { n_max };
    let mut out = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for (v, op) in combos.iter().enumerate() {
        for n in 0..=n_max {
            out[layout.index(v + 1, n)] = op[[n, n]];
        }
    }
    out
}

/// Family of random states used by the closure check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// `Σ_n σ_n ⊗ |n><n|` with random positive 2×2 blocks `σ_n`.
    FockDiagonal,
    /// `A A† / tr(A A†)` with a complex Gaussian-like `A`.
    General,
}

fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_density_matrix(rng: &mut ChaCha8Rng, n_max: usize, kind: SampleKind) -> Operator {
    let d = 2 * (n_max + 1);
    let a = match kind {
        SampleKind::General => Operator::from_shape_fn((d, d), |_| random_complex(rng)),
        SampleKind::FockDiagonal => {
            let mut a = Operator::zeros((d, d));
            for n in 0..=n_max {
                for (s, t) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    a[[s * (n_max + 1) + n, t * (n_max + 1) + n]] = random_complex(rng);
                }
            }
            a
        }
    };
    let rho = a.dot(&dagger(&a));
    let tr = trace(&rho);
    rho.mapv(|z| z / tr)
}

/// Largest elementwise gap between the six variables of `L(ρ)` and the
/// reduced generator applied to the six variables of `ρ`, over `samples`
/// seeded random states.
pub fn projection_mismatch(
    dressed: &DressedParams,
    params: &ModelParams,
    n_max: usize,
    samples: usize,
    seed: u64,
    kind: SampleKind,
) -> Result<f64> {
    let liouv = build_dressed_liouvillian(dressed, params, n_max)?;
    let gen = assemble(dressed, params, n_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random_density_matrix(&mut rng, n_max, kind);
        let exact = six_variables(&liouv.apply(&rho), n_max);
        let reduced = gen.apply(&six_variables(&rho, n_max));
        for (a, b) in exact.iter().zip(&reduced) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}
