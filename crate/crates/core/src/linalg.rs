//! Dense complex helpers and the Hermitian PSD covariance type.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{IsacError, Result};

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Hermitian positive semi-definite covariance matrix.
///
/// Holds transmit covariances (information, sensing, or their sum). The
/// constructor checks Hermitian symmetry to `1e-12` (relative to the largest
/// entry) and that the smallest eigenvalue is at least `-1e-10 * trace`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianCov(CMat);

impl HermitianCov {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(IsacError::NotPsd(format!(
                "non-square {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm())).max(f64::MIN_POSITIVE);
        let asym = (&m - m.adjoint()).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if asym > HERMITIAN_TOL * scale {
            return Err(IsacError::NotPsd(format!("asymmetry {asym:.3e} relative to {scale:.3e}")));
        }
        let sym = hermitian_part(&m);
        let trace = sym.trace().re;
        let min_eig = min_eigenvalue(&sym);
        if trace < -PSD_TOL * scale || min_eig < -PSD_TOL * trace.abs().max(scale) {
            return Err(IsacError::NotPsd(format!(
                "min eigenvalue {min_eig:.3e}, trace {trace:.3e}"
            )));
        }
        Ok(Self(sym))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMat::zeros(dim, dim))
    }

    /// `scale * v v^H`; `scale` must be nonnegative.
    pub fn rank_one(v: &CVec, scale: f64) -> Self {
        assert!(scale >= 0.0, "rank-one scale must be nonnegative");
        Self(v * v.adjoint() * Complex64::from(scale))
    }

    /// Wraps a matrix that is Hermitian PSD by construction; symmetrizes it.
    pub(crate) fn from_trusted(m: CMat) -> Self {
        Self(hermitian_part(&m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Real quadratic form `v^H R v`.
    pub fn quad(&self, v: &CVec) -> f64 {
        quad_form(&self.0, v)
    }

    pub fn scaled(&self, c: f64) -> Self {
        assert!(c >= 0.0);
        Self(&self.0 * Complex64::from(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    /// Eigen-decomposition with eigenvalues sorted in descending order.
    pub fn eigen(&self) -> (Vec<f64>, CMat) {
        sorted_eigen(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    /// Numerical rank: eigenvalues above `1e-12 * trace`.
    pub fn rank(&self) -> usize {
        let tr = self.trace();
        if tr <= 0.0 {
            return 0;
        }
        let (vals, _) = self.eigen();
        vals.iter().filter(|&&l| l > 1e-12 * tr).count()
    }
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::from(0.5)
}

/// Real part of `v^H M v`. The imaginary residue must be negligible for Hermitian `M`.
pub fn quad_form(m: &CMat, v: &CVec) -> f64 {
    let z = v.dotc(&(m * v));
    debug_assert!(
        z.im.abs() <= 1e-9 * z.re.abs().max(m.norm() * v.norm_squared()).max(f64::MIN_POSITIVE),
        "quadratic form has imaginary residue {}",
        z.im
    );
    z.re
}

pub fn sorted_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

/// One circularly-symmetric complex Gaussian draw with unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_normal_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    // column-major fill keeps the draw order stable across nalgebra versions
    let mut m = CMat::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            m[(r, c)] = complex_normal(rng);
        }
    }
    m
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}
