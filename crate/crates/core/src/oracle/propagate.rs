//! Fixed-step fourth-order Runge-Kutta in the vectorized representation.

use super::operators::Operator;
use super::{trace, Liouvillian};
use crate::error::{Error, Result};
use crate::sparse::C64;

/// Trace drift that aborts a propagation.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;
/// Snapshots kept besides the initial and final states.
const SNAPSHOTS: usize = 100;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// States at `times`; the last entry is the state at `t_final`.
    pub states: Vec<Operator>,
    /// Largest `|tr ρ(t) - tr ρ(0)|` seen.
    pub trace_drift: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &Operator {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

/// Integrates `dρ/dt = L ρ` from `rho0` to `t_final`.
///
/// The step is shrunk to `t_final / ceil(t_final / dt)` so the last step
/// lands on `t_final`. `dt` must satisfy `dt <= 0.1 / max |L_kk|`.
pub fn propagate(
    liouv: &Liouvillian,
    rho0: &Operator,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    let max_dt = 0.1 / liouv.fastest_rate();
    if dt.is_nan() || dt <= 0.0 || dt > max_dt {
        return Err(Error::StepTooLarge { dt, max_dt });
    }
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let stride = (steps / SNAPSHOTS).max(1);
    let d = liouv.hilbert_dim;

    let mut x = liouv.vectorize(rho0);
    let tr0 = trace(rho0);
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![zero; x.len()],
        vec![zero; x.len()],
        vec![zero; x.len()],
        vec![zero; x.len()],
        vec![zero; x.len()],
    );
    let axpy = |out: &mut [C64], base: &[C64], k: &[C64], a: f64| {
        for ((o, b), k) in out.iter_mut().zip(base).zip(k) {
            *o = b + k * a;
        }
    };

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut trace_drift: f64 = 0.0;
    for step in 1..=steps {
        let m = &liouv.matrix;
        m.matvec_into(&x, &mut k1);
        axpy(&mut tmp, &x, &k1, 0.5 * h);
        m.matvec_into(&tmp, &mut k2);
        axpy(&mut tmp, &x, &k2, 0.5 * h);
        m.matvec_into(&tmp, &mut k3);
        axpy(&mut tmp, &x, &k3, h);
        m.matvec_into(&tmp, &mut k4);
        for i in 0..x.len() {
            x[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }

        let tr: C64 = (0..d).map(|i| x[i + d * i]).sum();
        let drift = (tr - tr0).norm();
        trace_drift = trace_drift.max(drift);
        let t = step as f64 * h;
        if drift > MAX_TRACE_DRIFT {
            return Err(Error::TraceDrift {
                drift,
                time: t,
                dt_hint: h / 2.0,
            });
        }
        if step % stride == 0 || step == steps {
            times.push(t);
            states.push(liouv.unvectorize(&x));
        }
    }
    Ok(Trajectory {
        times,
        states,
        trace_drift,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_dressed_liouvillian, product_state};
    use super::*;
    use crate::model::{dress, ModelParams};
    use num_complex::Complex64;

    fn params(g: f64) -> ModelParams {
        ModelParams {
            omega_ph: 2.0,
            delta: 1.4,
            rabi: 1.0,
            g,
            gamma: 0.05,
            gamma_c: 0.01,
            kappa: 0.5,
            nbar: 1.0,
        }
    }

    fn max_diff(a: &Operator, b: &Operator) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn thermal_product_is_fixed_without_coupling() {
        let p = params(0.0);
        let d = dress(&p, false).unwrap();
        let l = build_dressed_liouvillian(&d, &p, 8).unwrap();
        let p_plus = d.gamma_minus / (d.gamma_plus + d.gamma_minus);
        let c = |x: f64| Complex64::new(x, 0.0);
        let rho0 = product_state([[c(p_plus), c(0.0)], [c(0.0), c(1.0 - p_plus)]], 1.0, 8);
        let dt = 0.05 / l.fastest_rate();
        let traj = propagate(&l, &rho0, 5.0, dt).unwrap();
        assert!(max_diff(traj.final_state(), &rho0) < 1e-8);
        assert!(traj.trace_drift < 1e-12);
    }

    #[test]
    fn fourth_order_convergence() {
        let p = params(0.3);
        let d = dress(&p, false).unwrap();
        let l = build_dressed_liouvillian(&d, &p, 6).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        let rho0 = product_state([[c(0.5), c(0.5)], [c(0.5), c(0.5)]], 1.0, 6);
        let dt = 0.1 / l.fastest_rate();
        let t = 2.0;
        let coarse = propagate(&l, &rho0, t, dt).unwrap();
        let fine = propagate(&l, &rho0, t, dt / 2.0).unwrap();
        let finest = propagate(&l, &rho0, t, dt / 4.0).unwrap();
        let e1 = max_diff(coarse.final_state(), fine.final_state());
        let e2 = max_diff(fine.final_state(), finest.final_state());
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_coarse_steps() {
        let p = params(0.3);
        let l = build_dressed_liouvillian(&dress(&p, true).unwrap(), &p, 4).unwrap();
        let rho0 = product_state(
            [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0); 2],
            ],
            1.0,
            4,
        );
        let dt = 1.0 / l.fastest_rate();
        assert!(matches!(
            propagate(&l, &rho0, 1.0, dt),
            Err(Error::StepTooLarge { .. })
        ));
    }
}
