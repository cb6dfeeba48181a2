//! Small dense complex linear-algebra helpers shared by the other modules.

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C;

use crate::error::{Error, Result};

pub type Mat = DMatrix<C>;

pub const ONE: C = C::new(1.0, 0.0);
pub const ZERO: C = C::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(d: usize) -> Mat {
    Mat::identity(d, d)
}

pub fn diag(entries: &[C]) -> Mat {
    let mut m = Mat::zeros(entries.len(), entries.len());
    for (i, e) in entries.iter().enumerate() {
        m[(i, i)] = *e;
    }
    m
}

/// Kronecker product with `a` on the first (slowest) factor.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn fro(a: &Mat) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, or the absolute difference when both vanish.
pub fn rel_diff(a: &Mat, b: &Mat) -> f64 {
    let scale = fro(a).max(fro(b));
    let d = fro(&(a - b));
    if scale == 0.0 {
        d
    } else {
        d / scale
    }
}

/// `‖[a, b]‖ / (‖a‖‖b‖)`.
pub fn rel_commutator(a: &Mat, b: &Mat) -> f64 {
    let scale = fro(a) * fro(b);
    let d = fro(&(a * b - b * a));
    if scale == 0.0 {
        d
    } else {
        d / scale
    }
}

pub fn inverse(a: &Mat) -> Result<Mat> {
    a.clone().try_inverse().ok_or(Error::Singular)
}

/// The flip `P : C^{d1} ⊗ C^{d2} → C^{d2} ⊗ C^{d1}`.
pub fn flip(d1: usize, d2: usize) -> Mat {
    let mut p = Mat::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d2 {
            p[(j * d1 + i, i * d2 + j)] = ONE;
        }
    }
    p
}

/// Ratio of smallest to largest singular value.
pub fn inverse_condition(a: &Mat) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}
