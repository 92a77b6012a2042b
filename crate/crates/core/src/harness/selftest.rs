//! Fast internal consistency checks for a deployed binary.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::array::{steering_rx_deriv, steering_rx_deriv_norm_sqr, UlaConfig};
use crate::beamform::{mrt_cov, solve_p2, solve_p3, solve_p4, ScaOptions};
use crate::channel::{rician_cu_channel, Scenario};
use crate::estimators::{mle_gaussian, simulate_trial, GridSpec};
use crate::fim::{crb_deterministic, crb_gaussian, crb_min_closed_forms, crb_sinr_gaussian_closed, crb_super, SensingGeometry};
use crate::linalg::{complex_normal_matrix, HermitianCov};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn scene() -> Scenario {
    let ula = UlaConfig::half_wavelength(8, 8).expect("valid array");
    Scenario {
        ula,
        theta: 0.3,
        phi: -0.2,
        alpha: Complex64::new(0.6, -0.3),
        h: rician_cu_channel(&ula, 1.0, 0.5, 1.0, 9),
        p_max: 1.0,
        sigma_c2: 0.1,
        sigma_s2: 0.5,
        t_symbols: 32,
        gamma0: 0.0,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check(name: &'static str, err: f64, tol: f64) -> SelfCheck {
    SelfCheck { name, passed: err <= tol, detail: format!("error {err:.3e} (tolerance {tol:.1e})") }
}

pub fn run_selftest() -> Vec<SelfCheck> {
    let sc = scene();
    let mut out = Vec::new();

    let d = steering_rx_deriv(&sc.ula, sc.theta).norm_squared();
    out.push(check("steering-derivative-norm", rel(d, steering_rx_deriv_norm_sqr(&sc.ula, sc.theta)), 1e-12));

    let mrt = mrt_cov(sc.p_max, &sc.a());
    let mins = crb_min_closed_forms(&sc);
    let err = [
        rel(crb_gaussian(&sc, &mrt).unwrap_or(f64::NAN), mins.gaussian),
        rel(crb_deterministic(&sc, &mrt).unwrap_or(f64::NAN), mins.deterministic),
        rel(crb_super(&sc, &HermitianCov::zeros(8), &mrt).unwrap_or(f64::NAN), mins.superposed),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    out.push(check("mrt-closed-forms", err, 1e-10));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    for _ in 0..50 {
        let g = complex_normal_matrix(&mut rng, 8, 8);
        let total = HermitianCov::new(&g * g.adjoint()).expect("gram matrix");
        let share: f64 = rand::Rng::random(&mut rng);
        let (rc, rs) = (total.scaled(1.0 - share), total.scaled(share));
        let c1 = crb_gaussian(&sc, &total).unwrap_or(f64::NAN);
        let c2 = crb_super(&sc, &rc, &rs).unwrap_or(f64::NAN);
        let cd = crb_deterministic(&sc, &total).unwrap_or(f64::NAN);
        if !(cd <= c2 * (1.0 + 1e-12) && c2 <= c1 * (1.0 + 1e-12)) {
            violations += 1;
        }
    }
    out.push(check("bound-ordering", violations as f64, 0.0));

    let tight = sc.with_gamma0(0.8 * sc.sinr_bound());
    let err = match (solve_p2(&tight), crb_sinr_gaussian_closed(&tight)) {
        (Ok(r), Ok(closed)) => {
            rel(r.quad(&tight.h) / tight.sigma_c2, tight.gamma0).max(rel(crb_gaussian(&tight, &r).unwrap_or(f64::NAN), closed))
        }
        _ => f64::INFINITY,
    };
    out.push(check("sinr-constrained-closed-form", err, 1e-9));

    let err = match solve_p4(&sc, &ScaOptions::default()) {
        Ok((pair, _)) => {
            let g = SensingGeometry::new(&sc);
            let p3 = solve_p3(&sc);
            let best = g.objective_from_q(0.0, g.q(&p3.r_s));
            rel(g.objective_from_q(g.q(&pair.r_c), g.q(&pair.r_s)), best).max(pair.r_c.trace() / sc.p_max)
        }
        Err(_) => f64::INFINITY,
    };
    out.push(check("sca-sensing-only", err, 1e-6));

    let quiet = Scenario { sigma_s2: 1e-6, ..sc.clone() };
    let err = simulate_trial(&quiet, &mrt, &HermitianCov::zeros(8), 1, 0)
        .and_then(|(_, rx)| mle_gaussian(&rx, &quiet, &mrt, &GridSpec::default()))
        .map_or(f64::INFINITY, |e| (e.theta_hat - quiet.theta).abs());
    out.push(check("high-snr-estimate", err, 1e-4));

    out
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
