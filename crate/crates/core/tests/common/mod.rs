//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the closed forms under test: Fisher information is built
//! from explicit `m_rx T x m_rx T` covariances, and optimizer optima come from
//! one-dimensional dual problems over full-dimension eigenvalues.
#![allow(dead_code)]

use bistatic_isac::array::{steering_rx, steering_tx, UlaConfig};
use bistatic_isac::channel::Scenario;
use bistatic_isac::linalg::{complex_normal, max_eigenvalue, CMat, CVec, HermitianCov};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn kron_identity(t: usize, block: &CMat) -> CMat {
    let m = block.nrows();
    let mut out = CMat::zeros(m * t, m * t);
    for k in 0..t {
        out.view_mut((k * m, k * m), (m, m)).copy_from(block);
    }
    out
}

pub fn random_psd(rng: &mut ChaCha8Rng, m: usize, rank: usize, trace: f64) -> HermitianCov {
    let g = CMat::from_fn(m, rank, |_, _| complex_normal(rng));
    let r = &g * g.adjoint();
    let tr = r.trace().re;
    HermitianCov::new(r * c(trace / tr)).unwrap()
}

pub fn random_scene(rng: &mut ChaCha8Rng, m_tx: usize, m_rx: usize, t: usize) -> Scenario {
    let ula = UlaConfig::new(m_tx, m_rx, rng.random_range(0.3..0.6), 1.0).unwrap();
    Scenario {
        ula,
        theta: rng.random_range(-1.2..1.2),
        phi: rng.random_range(-1.2..1.2),
        alpha: Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        h: CVec::from_fn(m_tx, |_, _| complex_normal(rng) * rng.random_range(0.2..2.0)),
        p_max: rng.random_range(0.5..5.0),
        sigma_c2: rng.random_range(0.1..2.0),
        sigma_s2: rng.random_range(0.1..2.0),
        t_symbols: t,
        gamma0: 0.0,
    }
}

/// Receive steering vector and its derivative from the defining sum, by direct evaluation.
fn b_at(cfg: &UlaConfig, theta: f64) -> CVec {
    steering_rx(cfg, theta)
}

fn b_dot_fd(cfg: &UlaConfig, theta: f64) -> CVec {
    let h = 1e-6;
    (b_at(cfg, theta + h) - b_at(cfg, theta - h)) / c(2.0 * h)
}

/// Echo covariance `I_T ⊗ (|alpha|^2 q b b^H + sigma^2 I)` as an explicit matrix.
pub fn echo_cov(sc: &Scenario, theta: f64, alpha: Complex64, q_c: f64) -> CMat {
    let b = b_at(&sc.ula, theta);
    let m = sc.ula.m_rx();
    let blk = &b * b.adjoint() * c(alpha.norm_sqr() * q_c) + CMat::identity(m, m) * c(sc.sigma_s2);
    kron_identity(sc.t_symbols, &blk)
}

/// Stacked mean `vec(alpha b a^T X0)`.
pub fn echo_mean(sc: &Scenario, theta: f64, alpha: Complex64, x0: &CMat) -> CVec {
    let b = b_at(&sc.ula, theta);
    let a = steering_tx(&sc.ula, sc.phi);
    let y = &b * (a.transpose() * x0) * alpha;
    CVec::from_column_slice(y.as_slice())
}

fn trace_term(rinv: &CMat, di: &CMat, dj: &CMat) -> f64 {
    (rinv * di * rinv * dj).trace().re
}

/// Derivatives of the echo covariance in `theta` and `|alpha|`, analytic.
pub fn gaussian_cov_derivs(sc: &Scenario, q_c: f64) -> [CMat; 2] {
    let b = b_at(&sc.ula, sc.theta);
    let bd = steering_rx_deriv_direct(&sc.ula, sc.theta);
    let a2 = sc.alpha.norm_sqr();
    let dt = (&bd * b.adjoint() + &b * bd.adjoint()) * c(a2 * q_c);
    let da = &b * b.adjoint() * c(2.0 * sc.alpha.norm() * q_c);
    [kron_identity(sc.t_symbols, &dt), kron_identity(sc.t_symbols, &da)]
}

/// Same derivatives by central differences.
pub fn gaussian_cov_derivs_fd(sc: &Scenario, q_c: f64) -> [CMat; 2] {
    let h = 1e-6;
    let dt = (echo_cov(sc, sc.theta + h, sc.alpha, q_c) - echo_cov(sc, sc.theta - h, sc.alpha, q_c)) / c(2.0 * h);
    let u = sc.alpha / sc.alpha.norm();
    let da = (echo_cov(sc, sc.theta, sc.alpha + u * h, q_c) - echo_cov(sc, sc.theta, sc.alpha - u * h, q_c))
        / c(2.0 * h);
    [dt, da]
}

/// `b'(theta)` from differentiating each entry's phase by hand.
pub fn steering_rx_deriv_direct(cfg: &UlaConfig, theta: f64) -> CVec {
    let m = cfg.m_rx();
    let k = std::f64::consts::PI * cfg.spacing() / cfg.wavelength();
    CVec::from_fn(m, |i, _| {
        let n = 2.0 * i as f64 - (m as f64 - 1.0);
        let ph = n * k * theta.sin();
        Complex64::new(0.0, n * k * theta.cos()) * Complex64::from_polar(1.0, ph)
    })
}

/// Gaussian-only FIM over `(theta, |alpha|)` from the trace formula.
pub fn fim_gaussian_oracle(sc: &Scenario, r_c: &HermitianCov) -> DMatrix<f64> {
    let q_c = r_c.quad(&bistatic_isac::linalg::conj_vec(&steering_tx(&sc.ula, sc.phi)));
    let r = echo_cov(sc, sc.theta, sc.alpha, q_c);
    let rinv = r.try_inverse().expect("noise keeps the covariance invertible");
    let d = gaussian_cov_derivs(sc, q_c);
    DMatrix::from_fn(2, 2, |i, j| trace_term(&rinv, &d[i], &d[j]))
}

/// Superposed FIM over `(theta, Re alpha, Im alpha)`: trace term plus mean term.
pub fn fim_super_oracle(sc: &Scenario, r_c: &HermitianCov, x0: &CMat) -> DMatrix<f64> {
    let a_conj = bistatic_isac::linalg::conj_vec(&steering_tx(&sc.ula, sc.phi));
    let q_c = r_c.quad(&a_conj);
    let r = echo_cov(sc, sc.theta, sc.alpha, q_c);
    let rinv = r.clone().try_inverse().expect("invertible");
    let b = b_at(&sc.ula, sc.theta);
    let bd = steering_rx_deriv_direct(&sc.ula, sc.theta);
    let a2 = sc.alpha.norm_sqr();
    let t = sc.t_symbols;
    let blk_t = (&bd * b.adjoint() + &b * bd.adjoint()) * c(a2 * q_c);
    let bb = &b * b.adjoint() * c(2.0 * q_c);
    let dr = [
        kron_identity(t, &blk_t),
        kron_identity(t, &(&bb * c(sc.alpha.re))),
        kron_identity(t, &(&bb * c(sc.alpha.im))),
    ];
    let a = steering_tx(&sc.ula, sc.phi);
    let s = a.transpose() * x0;
    let vecm = |m: CMat| CVec::from_column_slice(m.as_slice());
    let dmu = [
        vecm(&bd * &s * sc.alpha),
        vecm(&b * &s),
        vecm(&b * &s * Complex64::new(0.0, 1.0)),
    ];
    DMatrix::from_fn(3, 3, |i, j| {
        trace_term(&rinv, &dr[i], &dr[j]) + 2.0 * (dmu[i].adjoint() * &rinv * &dmu[j])[(0, 0)].re
    })
}

/// Mean derivatives by central differences, for checking the analytic ones.
pub fn mean_derivs_fd(sc: &Scenario, x0: &CMat) -> [CVec; 3] {
    let h = 1e-6;
    let mu = |th: f64, al: Complex64| echo_mean(sc, th, al, x0);
    [
        (mu(sc.theta + h, sc.alpha) - mu(sc.theta - h, sc.alpha)) / c(2.0 * h),
        (mu(sc.theta, sc.alpha + h) - mu(sc.theta, sc.alpha - h)) / c(2.0 * h),
        (mu(sc.theta, sc.alpha + Complex64::new(0.0, h)) - mu(sc.theta, sc.alpha - Complex64::new(0.0, h)))
            / c(2.0 * h),
    ]
}

/// Deterministic sequences with `(1/T) X0 X0^H = G G^H` exactly: `X0 = sqrt(T) G Q`
/// with `Q` having orthonormal rows.
pub fn sequences_for(rng: &mut ChaCha8Rng, g: &CMat, t: usize) -> CMat {
    let k = g.ncols();
    let raw = CMat::from_fn(t, k, |_, _| complex_normal(rng));
    let q = raw.qr().q(); // t x k, orthonormal columns
    g * q.adjoint() * c((t as f64).sqrt())
}

/// Minimizes a convex function on `[lo, hi]` by golden section.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x, fx), (x1, f1), (x2, f2), (0.0, f(0.0))]
        .into_iter()
        .fold((x, fx), |acc, p| if p.1 < acc.1 { p } else { acc })
}

/// Minimizes a convex function of `mu >= 0` after growing the bracket until it turns up.
pub fn dual_min(g: impl Fn(f64) -> f64, scale: f64) -> f64 {
    let mut hi = scale;
    while g(2.0 * hi) < g(hi) && hi < 1e15 * scale {
        hi *= 2.0;
    }
    golden_min(&g, 0.0, 2.0 * hi).1
}

/// Optimal value of `max a^T R a*` over PSD `R` with `tr R <= P`,
/// `h^H R h >= gamma0 sigma_c^2`, via its Lagrange dual over full-dimension matrices.
pub fn p2_dual_value(sc: &Scenario) -> f64 {
    let a_conj = bistatic_isac::linalg::conj_vec(&steering_tx(&sc.ula, sc.phi));
    let a_mat = &a_conj * a_conj.adjoint();
    let h_mat = &sc.h * sc.h.adjoint();
    let g = |mu: f64| sc.p_max * max_eigenvalue(&(&a_mat + &h_mat * c(mu))) - mu * sc.gamma0 * sc.sigma_c2;
    dual_min(g, a_conj.norm_squared() / sc.h.norm_squared())
}

/// Optimal value of the linearized superposed subproblem
/// `max a^T R_s a* + w a^T R_c a*` under the SINR (with interference) and power constraints.
pub fn p4k_dual_value(sc: &Scenario, w: f64) -> f64 {
    let a_conj = bistatic_isac::linalg::conj_vec(&steering_tx(&sc.ula, sc.phi));
    let a_mat = &a_conj * a_conj.adjoint();
    let h_mat = &sc.h * sc.h.adjoint();
    let g = |mu: f64| {
        let l1 = max_eigenvalue(&(&a_mat * c(w) + &h_mat * c(mu)));
        let l2 = max_eigenvalue(&(&a_mat - &h_mat * c(mu * sc.gamma0)));
        sc.p_max * l1.max(l2).max(0.0) - mu * sc.gamma0 * sc.sigma_c2
    };
    dual_min(g, a_conj.norm_squared() / sc.h.norm_squared())
}
