//! Transmit covariance design.
//!
//! Every optimizer here only cares about a covariance through `a^T R a*`,
//! `h^H R h`, the cross term `a^T R h` and the trace. Power outside
//! `span{a*, h}` is wasted, which is what makes the 2x2 reduction in
//! [`reduced`] exact.

mod reduced;
mod sca;

use num_complex::Complex64;

use crate::channel::Scenario;
use crate::error::{IsacError, Result};
use crate::linalg::{conj_vec, CVec, HermitianCov};

pub use reduced::Subspace;
pub use sca::{inner_solve_p4k, solve_p4, solve_p4_multistart, ScaInit, ScaOptions, ScaTrace};

/// Information and sensing covariances sharing one power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct CovPair {
    pub r_c: HermitianCov,
    pub r_s: HermitianCov,
}

impl CovPair {
    pub fn new(r_c: HermitianCov, r_s: HermitianCov) -> Result<Self> {
        if r_c.dim() != r_s.dim() {
            return Err(IsacError::Dimension { expected: r_c.dim(), got: r_s.dim() });
        }
        Ok(Self { r_c, r_s })
    }

    pub fn total_power(&self) -> f64 {
        self.r_c.trace() + self.r_s.trace()
    }

    /// `R_c + R_s`.
    pub fn total(&self) -> HermitianCov {
        self.r_c.add(&self.r_s)
    }

    /// SINR at the user; the deterministic part counts as interference.
    pub fn sinr(&self, h: &CVec, sigma_c2: f64) -> f64 {
        self.r_c.quad(h) / (sigma_c2 + self.r_s.quad(h))
    }
}

/// MRT toward the transmit steering vector: `p a* a^T / ||a||^2`.
pub fn mrt_cov(p: f64, a: &CVec) -> HermitianCov {
    assert!(p >= 0.0, "power must be nonnegative");
    HermitianCov::rank_one(&conj_vec(a), p / a.norm_squared())
}

/// MRT toward the user: `p h h^H / ||h||^2`.
pub fn mrt_user(p: f64, h: &CVec) -> HermitianCov {
    assert!(p >= 0.0, "power must be nonnegative");
    HermitianCov::rank_one(h, p / h.norm_squared())
}

pub(crate) fn check_feasible(sc: &Scenario) -> Result<()> {
    let bound = sc.sinr_bound();
    if sc.gamma0 > bound * (1.0 + 1e-12) {
        return Err(IsacError::Infeasible { gamma0: sc.gamma0, bound });
    }
    Ok(())
}

/// Gaussian-only covariance maximizing `a^T R_c a*` under the SINR and power constraints.
///
/// When MRT toward the target already satisfies the SINR target it is optimal.
/// Otherwise the optimum is rank one inside `span{h, a*}`: exactly
/// `gamma0 sigma_c^2 / ||h||^2` of power along `h` and the rest along the part of
/// `a*` orthogonal to `h`, phased so both contributions add coherently at the target.
pub fn solve_p2(sc: &Scenario) -> Result<HermitianCov> {
    check_feasible(sc)?;
    let m = sc.ula.m_tx() as f64;
    let a_conj = sc.a_conj();
    let h2 = sc.h.norm_squared();
    let ha = sc.h.dotc(&a_conj);
    if sc.p_max * ha.norm_sqr() >= m * sc.gamma0 * sc.sigma_c2 {
        return Ok(mrt_cov(sc.p_max, &sc.a()));
    }
    let u1 = &sc.h / Complex64::from(h2.sqrt());
    let c1 = u1.dotc(&a_conj);
    let perp = &a_conj - &u1 * c1;
    let perp_norm = perp.norm();
    let l1 = (sc.gamma0 * sc.sigma_c2 / h2).min(sc.p_max);
    let l2 = sc.p_max - l1;
    if perp_norm <= 1e-12 * m.sqrt() {
        // h parallel to a*: MRT on h at full power; unreachable for feasible input
        return Ok(mrt_user(sc.p_max, &sc.h));
    }
    let u2 = perp / Complex64::from(perp_norm);
    let phase = if c1.norm() > 0.0 { c1 / c1.norm() } else { Complex64::new(1.0, 0.0) };
    let w = &u1 * Complex64::from(l1.sqrt()) + &u2 * (phase.conj() * l2.sqrt());
    Ok(HermitianCov::rank_one(&w, 1.0))
}

/// Sensing-optimal superposed design: all power on deterministic MRT.
pub fn solve_p3(sc: &Scenario) -> CovPair {
    let m = sc.ula.m_tx();
    CovPair { r_c: HermitianCov::zeros(m), r_s: mrt_cov(sc.p_max, &sc.a()) }
}

/// Two fixed beams, user MRT for the information part and target MRT for the
/// sensing part, with the information power chosen to meet the SINR target
/// including interference from the sensing beam.
pub fn power_splitting(sc: &Scenario) -> Result<CovPair> {
    check_feasible(sc)?;
    let m = sc.ula.m_tx() as f64;
    let h2 = sc.h.norm_squared();
    let leak = sc.h.dotc(&sc.a_conj()).norm_sqr() / m;
    let p_c = (sc.gamma0 * (sc.sigma_c2 + sc.p_max * leak) / (h2 + sc.gamma0 * leak)).min(sc.p_max);
    Ok(CovPair { r_c: mrt_user(p_c, &sc.h), r_s: mrt_cov(sc.p_max - p_c, &sc.a()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::UlaConfig;
    use crate::fim::{crb_gaussian, crb_min_closed_forms, crb_sinr_gaussian_closed, crb_super};
    use crate::linalg::complex_normal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scene(seed: u64) -> Scenario {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ula = UlaConfig::half_wavelength(8, 8).unwrap();
        let h = CVec::from_fn(8, |_, _| complex_normal(&mut rng));
        Scenario {
            ula,
            theta: 0.2,
            phi: 0.4,
            alpha: Complex64::new(0.3, 0.1),
            h,
            p_max: 2.0,
            sigma_c2: 0.5,
            sigma_s2: 1.0,
            t_symbols: 16,
            gamma0: 0.0,
        }
    }

    #[test]
    fn mrt_trace_and_gain() {
        let sc = scene(1);
        let r = mrt_cov(3.0, &sc.a());
        assert!((r.trace() - 3.0).abs() < 1e-14);
        assert!((r.quad(&sc.a_conj()) - 24.0).abs() < 1e-12);
        assert_eq!(r.rank(), 1);
    }

    #[test]
    fn p2_zero_threshold_is_mrt() {
        let sc = scene(2);
        let r = solve_p2(&sc).unwrap();
        assert!((r.matrix() - mrt_cov(sc.p_max, &sc.a()).matrix()).norm() < 1e-12);
    }

    #[test]
    fn p2_constrained_branch_is_tight() {
        let base = scene(3);
        let sc = base.with_gamma0(0.9 * base.sinr_bound());
        let r = solve_p2(&sc).unwrap();
        assert!((r.quad(&sc.h) / sc.sigma_c2 / sc.gamma0 - 1.0).abs() < 1e-10);
        assert!((r.trace() - sc.p_max).abs() < 1e-12);
        assert!(r.min_eigenvalue() > -1e-12);
        let closed = crb_sinr_gaussian_closed(&sc).unwrap();
        assert!((crb_gaussian(&sc, &r).unwrap() / closed - 1.0).abs() < 1e-10);
    }

    #[test]
    fn p2_infeasible_reports_bound() {
        let base = scene(4);
        let sc = base.with_gamma0(1.01 * base.sinr_bound());
        match solve_p2(&sc) {
            Err(IsacError::Infeasible { bound, .. }) => assert!((bound - base.sinr_bound()).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn p2_invariant_to_joint_channel_scaling() {
        let base = scene(5);
        let sc = base.with_gamma0(0.7 * base.sinr_bound());
        let c = Complex64::new(0.0, 3.0);
        let scaled = Scenario { h: &sc.h * c, sigma_c2: sc.sigma_c2 * 9.0, ..sc.clone() };
        let r1 = solve_p2(&sc).unwrap();
        let r2 = solve_p2(&scaled).unwrap();
        assert!((r1.matrix() - r2.matrix()).norm() < 1e-10);
    }

    #[test]
    fn p2_parallel_channel_stays_mrt() {
        let base = scene(6);
        let sc = Scenario { h: base.a_conj() * Complex64::new(0.2, 0.0), ..base };
        let sc = sc.with_gamma0(sc.sinr_bound());
        let r = solve_p2(&sc).unwrap();
        assert!((r.quad(&sc.h) / sc.sigma_c2 / sc.gamma0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn p3_matches_closed_form_and_beats_splits() {
        let sc = scene(7);
        let p3 = solve_p3(&sc);
        let crb = crb_super(&sc, &p3.r_c, &p3.r_s).unwrap();
        assert!((crb / crb_min_closed_forms(&sc).superposed - 1.0).abs() < 1e-10);
        for k in 1..10 {
            let c = k as f64 / 10.0;
            let rc = mrt_cov(c * sc.p_max, &sc.a());
            let rs = mrt_cov((1.0 - c) * sc.p_max, &sc.a());
            assert!(crb_super(&sc, &rc, &rs).unwrap() > crb);
        }
    }

    #[test]
    fn power_splitting_meets_sinr() {
        let base = scene(8);
        let sc = base.with_gamma0(0.5 * base.sinr_bound());
        let ps = power_splitting(&sc).unwrap();
        assert!((ps.sinr(&sc.h, sc.sigma_c2) / sc.gamma0 - 1.0).abs() < 1e-10);
        assert!((ps.total_power() - sc.p_max).abs() < 1e-12);
    }
}
