//! Dense complex helpers: matrix exponential, Kronecker products and
//! Hermitian spectral functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Scaled matrices are brought below this 1-norm before the series is summed.
const SCALED_NORM: f64 = 0.5;
/// Taylor order used on the scaled matrix. With ‖A‖₁ ≤ 0.5 the truncated
/// remainder is below 0.5¹⁹/19! ≈ 1.6e-23, well inside the 1e-12 target.
const TAYLOR_ORDER: usize = 18;

/// Matrix exponential by scaling and squaring with a fixed-order Taylor
/// series on the scaled matrix.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }

    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a * C64::new(0.5f64.powi(squarings as i32), 0.0);

    // Horner evaluation: I + A(I + A/2(I + A/3(...)))
    let ident = DMatrix::<C64>::identity(n, n);
    let mut acc = ident.clone();
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = &ident + (&scaled * acc) * C64::new(1.0 / k as f64, 0.0);
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Maximum absolute column sum.
pub fn one_norm(a: &DMatrix<C64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus.
pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub fn kron_vec(a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix in ascending order. The input is
/// symmetrized first so rounding noise in the lower triangle is ignored.
pub fn hermitian_eigenvalues(a: &DMatrix<C64>) -> Vec<f64> {
    let h = hermitize(a);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    vals
}

/// Relative size below which eigenvalues are rounding noise for
/// [`psd_sqrt`]; the square root would otherwise inflate 1e-17 noise to 3e-9.
pub const SPECTRAL_CLIP: f64 = 1e-14;

fn clipped_sqrt(lam: f64, largest: f64) -> f64 {
    if lam <= SPECTRAL_CLIP * largest {
        0.0
    } else {
        lam.sqrt()
    }
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
pub fn psd_sqrt(a: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = hermitize(a).symmetric_eigen();
    let n = a.nrows();
    let largest = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut out = DMatrix::<C64>::zeros(n, n);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let s = clipped_sqrt(lam, largest);
        if s == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        out += (&v * v.adjoint()) * C64::new(s, 0.0);
    }
    out
}

pub fn hermitize(a: &DMatrix<C64>) -> DMatrix<C64> {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

pub fn trace(a: &DMatrix<C64>) -> C64 {
    a.diagonal().iter().sum()
}
