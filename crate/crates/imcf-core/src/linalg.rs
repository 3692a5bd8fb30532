//! Minimal dense linear algebra for the small (n x n, n = 2..4) per-node
//! tensors the geometry kernel works with. Matrices are row-major `&[f64]`
//! slices of length `n * n`; nothing here allocates.

/// `out = a * b` for row-major `n x n` matrices. `out` must not alias `a`/`b`.
pub fn matmul(n: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    debug_assert!(a.len() == n * n && b.len() == n * n && out.len() == n * n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a[i * n + k] * b[k * n + j];
            }
            out[i * n + j] = s;
        }
    }
}

/// `out = a * x` for a row-major `n x n` matrix and a length-`n` vector.
pub fn matvec(n: usize, a: &[f64], x: &[f64], out: &mut [f64]) {
    debug_assert!(a.len() == n * n && x.len() == n && out.len() == n);
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..n {
            s += a[i * n + k] * x[k];
        }
        out[i] = s;
    }
}

pub fn trace(n: usize, a: &[f64]) -> f64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max_ij |(a b)_ij - I_ij|`: how far `b` is from being the inverse of `a`.
pub fn identity_residual(n: usize, a: &[f64], b: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += a[i * n + k] * b[k * n + j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

/// Determinant by Gaussian elimination with partial pivoting. Intended for
/// the tiny matrices used in tests and audits, not for large systems.
pub fn det(n: usize, a: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut sign = 1.0;
    let mut d = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        if m[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            sign = -sign;
        }
        let p = m[col * n + col];
        d *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            for j in col..n {
                m[r * n + j] -= f * m[col * n + j];
            }
        }
    }
    sign * d
}

/// Componentwise `max |a - b|`.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
