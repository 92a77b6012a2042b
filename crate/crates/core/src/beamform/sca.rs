//! Successive convex approximation for the superposed SINR-constrained design.
//!
//! The sensing objective is `||b'||^2 (q_s + q_c - q_c / (1 + kappa q_c))`. The
//! last term is concave in `q_c`, so its negative is convex and is replaced by
//! its tangent at the current point. The resulting surrogate is a lower bound
//! that touches the objective at the current iterate, so every accepted step
//! can only increase the objective.

use serde::Serialize;

use super::reduced::{solve_reduced, BarrierParams, Subspace};
use super::{check_feasible, mrt_user, power_splitting, solve_p2, CovPair};
use crate::channel::Scenario;
use crate::error::Result;
use crate::fim::SensingGeometry;
use crate::linalg::HermitianCov;

/// Starting point of the SCA loop.
#[derive(Debug, Clone, Default)]
pub enum ScaInit {
    /// The Gaussian-only optimum with no deterministic power. Its superposed
    /// bound equals the Gaussian-only bound, so the result can never be worse.
    #[default]
    FromP2,
    /// Just enough user-MRT power to meet the SINR target, nothing else.
    MinimalSinr,
    /// The power-splitting benchmark.
    PowerSplitting,
    Custom(CovPair),
}

#[derive(Debug, Clone)]
pub struct ScaOptions {
    pub max_iter: usize,
    pub rel_tol: f64,
    pub init: ScaInit,
}

impl Default for ScaOptions {
    fn default() -> Self {
        Self { max_iter: 100, rel_tol: 1e-8, init: ScaInit::FromP2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaTrace {
    /// Objective of the starting point followed by one entry per accepted iterate.
    pub objectives: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn starting_point(sc: &Scenario, init: &ScaInit) -> Result<CovPair> {
    let m = sc.ula.m_tx();
    Ok(match init {
        ScaInit::FromP2 => CovPair { r_c: solve_p2(sc)?, r_s: HermitianCov::zeros(m) },
        ScaInit::MinimalSinr => {
            let p = (sc.gamma0 * sc.sigma_c2 / sc.h.norm_squared() * (1.0 + 1e-9)).min(sc.p_max);
            CovPair { r_c: mrt_user(p, &sc.h), r_s: HermitianCov::zeros(m) }
        }
        ScaInit::PowerSplitting => power_splitting(sc)?,
        ScaInit::Custom(pair) => pair.clone(),
    })
}

struct Context {
    geom: SensingGeometry,
    sub: Subspace,
    beta: f64,
    params: BarrierParams,
}

impl Context {
    fn new(sc: &Scenario) -> Self {
        let geom = SensingGeometry::new(sc);
        let sub = Subspace::new(&geom.a_conj, &sc.h);
        let beta = sc.gamma0 * sc.sigma_c2 / (sc.p_max * sc.h.norm_squared());
        Self { geom, sub, beta, params: BarrierParams::default() }
    }

    fn objective(&self, pair: &CovPair) -> f64 {
        self.geom.objective_from_q(self.geom.q(&pair.r_c), self.geom.q(&pair.r_s))
    }

    fn step(&self, sc: &Scenario, r_c: &HermitianCov, iteration: usize) -> Result<CovPair> {
        let kq = self.geom.kappa() * self.geom.q(r_c);
        let w = 1.0 - 1.0 / ((1.0 + kq) * (1.0 + kq));
        let (yc, ys, _) = solve_reduced(&self.sub, w, sc.gamma0, self.beta.min(1.0), &self.params, iteration)?;
        Ok(CovPair { r_c: self.sub.lift(&yc, sc.p_max), r_s: self.sub.lift(&ys, sc.p_max) })
    }
}

/// One convex subproblem: maximize the surrogate linearized at `linearization_point` (an `R_c`).
pub fn inner_solve_p4k(sc: &Scenario, linearization_point: &HermitianCov) -> Result<CovPair> {
    check_feasible(sc)?;
    Context::new(sc).step(sc, linearization_point, 0)
}

/// Locally optimal superposed design under the SINR and power constraints.
pub fn solve_p4(sc: &Scenario, opts: &ScaOptions) -> Result<(CovPair, ScaTrace)> {
    check_feasible(sc)?;
    let ctx = Context::new(sc);
    let mut current = starting_point(sc, &opts.init)?;
    let mut f = ctx.objective(&current);
    let mut trace = ScaTrace { objectives: vec![f], iterations: 0, converged: false };
    for k in 1..=opts.max_iter {
        let next = ctx.step(sc, &current.r_c, k)?;
        let f_next = ctx.objective(&next);
        trace.iterations = k;
        if f_next < f {
            // the subproblem was solved only to barrier precision; keep the better point
            trace.converged = true;
            break;
        }
        let change = (f_next - f) / f_next.abs().max(f64::MIN_POSITIVE);
        current = next;
        f = f_next;
        trace.objectives.push(f);
        if change < opts.rel_tol {
            trace.converged = true;
            break;
        }
    }
    Ok((current, trace))
}

/// Runs the loop from the Gaussian-only optimum, the power-splitting point and
/// the minimal-SINR point, and keeps the best result.
pub fn solve_p4_multistart(sc: &Scenario, opts: &ScaOptions) -> Result<(CovPair, ScaTrace)> {
    let ctx = Context::new(sc);
    let mut best: Option<(CovPair, ScaTrace, f64)> = None;
    for init in [ScaInit::FromP2, ScaInit::PowerSplitting, ScaInit::MinimalSinr] {
        let (pair, trace) = solve_p4(sc, &ScaOptions { init, ..opts.clone() })?;
        let f = ctx.objective(&pair);
        if best.as_ref().is_none_or(|b| f > b.2) {
            best = Some((pair, trace, f));
        }
    }
    let (pair, trace, _) = best.expect("at least one start");
    Ok((pair, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::UlaConfig;
    use crate::beamform::solve_p3;
    use crate::fim::{crb_gaussian, crb_super};
    use crate::linalg::{complex_normal, CVec};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scene(seed: u64, alpha: f64) -> Scenario {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ula = UlaConfig::half_wavelength(6, 6).unwrap();
        Scenario {
            ula,
            theta: -0.3,
            phi: 0.5,
            alpha: Complex64::new(alpha, 0.0),
            h: CVec::from_fn(6, |_, _| complex_normal(&mut rng)),
            p_max: 1.0,
            sigma_c2: 0.2,
            sigma_s2: 1.0,
            t_symbols: 32,
            gamma0: 0.0,
        }
    }

    #[test]
    fn zero_threshold_reaches_sensing_optimum() {
        let sc = scene(1, 0.5);
        let (pair, trace) = solve_p4(&sc, &ScaOptions::default()).unwrap();
        let p3 = solve_p3(&sc);
        let g = SensingGeometry::new(&sc);
        let best = g.objective_from_q(0.0, g.q(&p3.r_s));
        assert!(trace.converged);
        assert!(pair.r_c.trace() <= 1e-6 * sc.p_max, "{}", pair.r_c.trace());
        assert!((trace.objectives.last().unwrap() / best - 1.0).abs() < 1e-6);
    }

    #[test]
    fn objectives_never_decrease_and_beat_gaussian_only() {
        for seed in 0..10 {
            let base = scene(seed, 0.3);
            let sc = base.with_gamma0(0.6 * base.sinr_bound());
            let (pair, trace) = solve_p4(&sc, &ScaOptions::default()).unwrap();
            for w in trace.objectives.windows(2) {
                assert!(w[1] >= w[0]);
            }
            let p2 = solve_p2(&sc).unwrap();
            assert!(crb_super(&sc, &pair.r_c, &pair.r_s).unwrap() <= crb_gaussian(&sc, &p2).unwrap());
            assert!(pair.sinr(&sc.h, sc.sigma_c2) >= sc.gamma0 * (1.0 - 1e-9));
            assert!(pair.total_power() <= sc.p_max * (1.0 + 1e-9));
        }
    }

    #[test]
    fn threshold_at_bound_leaves_only_user_beam() {
        let base = scene(3, 0.3);
        let sc = base.with_gamma0(base.sinr_bound());
        let (pair, _) = solve_p4(&sc, &ScaOptions::default()).unwrap();
        assert!(pair.r_s.trace() < 1e-9);
        assert!((pair.sinr(&sc.h, sc.sigma_c2) / sc.gamma0 - 1.0).abs() < 1e-9);
    }
}
