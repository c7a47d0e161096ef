#![allow(dead_code)]

use qdphonon::sweep::RunConfig;
use qdphonon::ModelParams;

/// ω_ph = 2, γ = 0.05, γ_c = 0.01, κ = 0.5, n̄ = 1 in units of Ω.
pub fn fixture(delta: f64, g: f64) -> ModelParams {
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

pub const WEAK_G: f64 = 0.05;
pub const MODERATE_G: f64 = 0.3;

/// Detuning sweep over the fixture with extra `key = value` lines.
pub fn sweep_config(g: f64, lo: f64, hi: f64, points: usize, extra: &str) -> RunConfig {
    let text = format!(
        "omega_ph = 2.0\ndelta = 0.0\nrabi = 1.0\ng = {g:?}\ngamma = 0.05\ngamma_c = 0.01\n\
         kappa = 0.5\nnbar = 1.0\nsweep_axis = \"delta\"\nsweep_lo = {lo:?}\nsweep_hi = {hi:?}\n\
         sweep_points = {points}\n{extra}\n"
    );
    RunConfig::parse(&text).expect("fixture config parses")
}
