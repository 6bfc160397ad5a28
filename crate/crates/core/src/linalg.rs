//! Small dense Hermitian positive-definite kernels used by the IAA update.
//!
//! Matrices are row-major `n × n` slices. Sizes here are the sector window
//! length (tens), so a straightforward Cholesky beats pulling in LAPACK.

use num_complex::Complex64;

/// In-place Cholesky `A = L·Lᴴ`; on success the lower triangle holds `L`
/// and the strict upper triangle is zeroed. Returns `false` if a pivot is
/// not strictly positive and finite.
pub fn cholesky_in_place(a: &mut [Complex64], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s / d;
        }
        for k in j + 1..n {
            a[j * n + k] = Complex64::new(0.0, 0.0);
        }
    }
    true
}

/// Inverse of a Hermitian positive-definite matrix from its Cholesky factor.
///
/// `l` is the factor produced by [`cholesky_in_place`]; the full Hermitian
/// inverse is written to `out`.
pub fn inverse_from_cholesky(l: &[Complex64], n: usize, out: &mut [Complex64]) {
    // Y = L⁻¹, lower triangular, by forward substitution on the identity.
    let mut y = vec![Complex64::new(0.0, 0.0); n * n];
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for k in c..i {
                s -= l[i * n + k] * y[k * n + c];
            }
            y[i * n + c] = s / l[i * n + i].re;
        }
    }
    // A⁻¹ = Yᴴ·Y
    for i in 0..n {
        for j in 0..=i {
            let mut s = Complex64::new(0.0, 0.0);
            for k in i..n {
                s += y[k * n + i].conj() * y[k * n + j];
            }
            out[i * n + j] = s;
            out[j * n + i] = s.conj();
        }
    }
}

/// `out = A·x` for a row-major `n × n` matrix.
pub fn mat_vec(a: &[Complex64], n: usize, x: &[Complex64], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate().take(n) {
        *o = a[i * n..(i + 1) * n].iter().zip(x).map(|(a, x)| a * x).sum();
    }
}
