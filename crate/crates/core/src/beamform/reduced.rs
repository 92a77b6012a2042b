//! Convex subproblem of the SCA loop, solved on `span{a*, h}`.
//!
//! With orthonormal `u1 = a*/||a||` and `u2` completing `h`, any covariance
//! restricted to the span is `R = P U Y U^H` for a 2x2 Hermitian `Y`. Writing
//! `Y = [[y1, y3 + j y4], [y3 - j y4, y2]]`, the subproblem for a weight `w` is
//!
//! ```text
//! maximize    ys1 + w yc1
//! subject to  e^H Yc e - gamma0 e^H Ys e >= beta
//!             tr Yc + tr Ys <= 1,  Yc, Ys PSD
//! ```
//!
//! where `e` is the unit-norm user channel in the `(u1, u2)` basis and
//! `beta = gamma0 sigma_c^2 / (P ||h||^2)`. It is solved with a log-det barrier
//! and damped Newton steps on the 8 real parameters.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{IsacError, Result};
use crate::linalg::{CMat, CVec, HermitianCov};

type V8 = SVector<f64, 8>;
type M8 = SMatrix<f64, 8, 8>;

/// Orthonormal basis of `span{a*, h}` and the user channel in that basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub u1: CVec,
    pub u2: CVec,
    /// `U^H h / ||h||`.
    pub e: [Complex64; 2],
    /// True when `h` is parallel to `a*`; `u2` is then an arbitrary orthogonal direction.
    pub degenerate: bool,
}

impl Subspace {
    pub fn new(a_conj: &CVec, h: &CVec) -> Self {
        let m = a_conj.len();
        let u1 = a_conj / Complex64::from(a_conj.norm());
        let hn = h.norm();
        let c1 = u1.dotc(h);
        let perp = h - &u1 * c1;
        let degenerate = perp.norm() <= 1e-12 * hn;
        let u2 = if degenerate {
            // first coordinate axis that is not parallel to u1
            let mut best = CVec::zeros(m);
            for k in 0..m {
                let mut ek = CVec::zeros(m);
                ek[k] = Complex64::new(1.0, 0.0);
                let p = &ek - &u1 * u1.dotc(&ek);
                if p.norm() > 0.5 {
                    best = p;
                    break;
                }
            }
            let n = best.norm();
            best / Complex64::from(n)
        } else {
            let n = perp.norm();
            perp / Complex64::from(n)
        };
        let e = [c1 / hn, u2.dotc(h) / hn];
        Self { u1, u2, e, degenerate }
    }

    /// `scale * U Y U^H` for `Y` given by its four real parameters.
    pub fn lift(&self, y: &[f64], scale: f64) -> HermitianCov {
        let off = Complex64::new(y[2], y[3]);
        let u1 = &self.u1;
        let u2 = &self.u2;
        let m: CMat = u1 * u1.adjoint() * Complex64::from(y[0])
            + u2 * u2.adjoint() * Complex64::from(y[1])
            + u1 * u2.adjoint() * off
            + u2 * u1.adjoint() * off.conj();
        HermitianCov::from_trusted(m * Complex64::from(scale))
    }

    /// Coefficients of `e^H Y e` as a linear function of the four parameters.
    fn user_gain_coeffs(&self) -> [f64; 4] {
        let [e1, e2] = self.e;
        let p = e1.conj() * e2;
        [e1.norm_sqr(), e2.norm_sqr(), 2.0 * p.re, -2.0 * p.im]
    }
}

/// Barrier schedule and stopping rules.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BarrierParams {
    pub t0: f64,
    pub mu: f64,
    pub newton_tol: f64,
    pub gap_tol: f64,
    /// Gap below which a centered point is kept when roundoff stops further progress.
    pub fallback_gap: f64,
    pub max_newton: usize,
}

impl Default for BarrierParams {
    fn default() -> Self {
        Self { t0: 1.0, mu: 10.0, newton_tol: 1e-10, gap_tol: 1e-9, fallback_gap: 1e-6, max_newton: 200 }
    }
}

/// Number of barrier terms: two 2x2 log-dets, the power slack and the SINR slack.
const BARRIER_DEGREE: f64 = 6.0;

struct Problem {
    w: f64,
    gamma0: f64,
    beta: f64,
    g: [f64; 4],
}

impl Problem {
    fn power_slack(z: &V8) -> f64 {
        1.0 - z[0] - z[1] - z[4] - z[5]
    }

    fn sinr_slack(&self, z: &V8) -> f64 {
        let lin = |o: usize| (0..4).map(|i| self.g[i] * z[o + i]).sum::<f64>();
        lin(0) - self.gamma0 * lin(4) - self.beta
    }

    fn det(z: &V8, o: usize) -> f64 {
        z[o] * z[o + 1] - z[o + 2] * z[o + 2] - z[o + 3] * z[o + 3]
    }

    fn inside(&self, z: &V8) -> bool {
        z[0] > 0.0
            && z[4] > 0.0
            && Self::det(z, 0) > 0.0
            && Self::det(z, 4) > 0.0
            && Self::power_slack(z) > 0.0
            && self.sinr_slack(z) > 0.0
    }

    fn grad_hess(&self, z: &V8, t: f64) -> (V8, M8) {
        let mut g = V8::zeros();
        let mut h = M8::zeros();
        g[4] -= t;
        g[0] -= t * self.w;
        for o in [0, 4] {
            let d = Self::det(z, o);
            let mut dd = V8::zeros();
            dd[o] = z[o + 1];
            dd[o + 1] = z[o];
            dd[o + 2] = -2.0 * z[o + 2];
            dd[o + 3] = -2.0 * z[o + 3];
            g -= dd / d;
            h += dd * dd.transpose() / (d * d);
            h[(o, o + 1)] -= 1.0 / d;
            h[(o + 1, o)] -= 1.0 / d;
            h[(o + 2, o + 2)] += 2.0 / d;
            h[(o + 3, o + 3)] += 2.0 / d;
        }
        let mut dp = V8::zeros();
        for i in [0, 1, 4, 5] {
            dp[i] = -1.0;
        }
        let sp = Self::power_slack(z);
        g -= dp / sp;
        h += dp * dp.transpose() / (sp * sp);
        let mut ds = V8::zeros();
        for i in 0..4 {
            ds[i] = self.g[i];
            ds[4 + i] = -self.gamma0 * self.g[i];
        }
        let ss = self.sinr_slack(z);
        g -= ds / ss;
        h += ds * ds.transpose() / (ss * ss);
        (g, h)
    }
}

/// Damped Newton centering at barrier weight `t`; `Err` when roundoff stalls it.
fn center(prob: &Problem, mut z: V8, t: f64, params: &BarrierParams) -> std::result::Result<(V8, usize), ()> {
    let mut n = 0;
    loop {
        let (g, h) = prob.grad_hess(&z, t);
        let ch = h.cholesky().ok_or(())?;
        let dz = -ch.solve(&g);
        let dec = -g.dot(&dz);
        if dec / 2.0 <= params.newton_tol {
            return Ok((z, n));
        }
        if n >= params.max_newton || !dec.is_finite() {
            return Err(());
        }
        n += 1;
        // damped Newton step 1/(1+lambda) keeps a self-concordant barrier in its domain
        let lambda = dec.sqrt();
        let mut s = if lambda < 0.25 { 1.0 } else { 1.0 / (1.0 + lambda) };
        while !prob.inside(&(z + dz * s)) {
            s *= 0.5;
            if s < 1e-16 {
                return Err(());
            }
        }
        z += dz * s;
    }
}

/// Normalized optimum `(Yc, Ys)` of the subproblem plus the Newton step count.
pub(crate) fn solve_reduced(
    sub: &Subspace,
    w: f64,
    gamma0: f64,
    beta: f64,
    params: &BarrierParams,
    iteration: usize,
) -> Result<([f64; 4], [f64; 4], usize)> {
    let slack = 1.0 - beta;
    if slack <= 1e-12 {
        // only user MRT meets the SINR target
        let [e1, e2] = sub.e;
        let off = e1 * e2.conj();
        return Ok(([e1.norm_sqr(), e2.norm_sqr(), off.re, off.im], [0.0; 4], 0));
    }
    let prob = Problem { w, gamma0, beta, g: sub.user_gain_coeffs() };
    let [e1, e2] = sub.e;
    let eps = (slack / 8.0).min(slack / (8.0 * gamma0.max(1.0)));
    let lead = beta + slack / 4.0;
    let off = e1 * e2.conj() * lead;
    let mut z = V8::from_column_slice(&[
        lead * e1.norm_sqr() + eps,
        lead * e2.norm_sqr() + eps,
        off.re,
        off.im,
        eps,
        eps,
        0.0,
        0.0,
    ]);
    debug_assert!(prob.inside(&z));
    let mut t = params.t0;
    let mut steps = 0;
    // last point on the central path and its duality gap
    let mut centered: Option<(V8, f64)> = None;
    let z = loop {
        match center(&prob, z, t, params) {
            Ok((zc, n)) => {
                z = zc;
                steps += n;
            }
            Err(()) => match centered {
                Some((zc, gap)) if gap <= params.fallback_gap => break zc,
                _ => return Err(IsacError::SolverFailure { iteration, gap: BARRIER_DEGREE / t }),
            },
        }
        let gap = BARRIER_DEGREE / t;
        if gap < params.gap_tol {
            break z;
        }
        centered = Some((z, gap));
        t *= params.mu;
    };
    let yc = [z[0], z[1], z[2], z[3]];
    let ys = [z[4], z[5], z[6], z[7]];
    Ok((yc, ys, steps))
}
