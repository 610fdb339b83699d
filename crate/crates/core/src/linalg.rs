//! Dense complex linear algebra used by every backend.
//!
//! Hermitian operators are stored as `DMatrix<Complex64>` and exchanged with
//! the rest of the crate as real coordinate vectors over a fixed orthonormal
//! basis (Hilbert-Schmidt inner product):
//!
//! * `d` diagonal units `|k><k|`,
//! * `d(d-1)/2` symmetric units `(|j><k| + |k><j|)/sqrt2` for `j < k`,
//! * `d(d-1)/2` antisymmetric units `i(|k><j| - |j><k|)/sqrt2` for `j < k`.
//!
//! Real symmetric operators use the first two groups only, so a real-backend
//! coordinate vector is a prefix of the complex one.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_real(a: &RMat, b: &RMat) -> RMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = RMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn outer(v: &CMat) -> CMat {
    v * v.adjoint()
}

/// Number of real coordinates of a `d x d` Hermitian (or real symmetric) operator.
pub fn herm_dim(d: usize, real: bool) -> usize {
    if real {
        d * (d + 1) / 2
    } else {
        d * d
    }
}

pub fn herm_to_coords(m: &CMat, real: bool) -> Vec<f64> {
    let d = m.nrows();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(herm_dim(d, real));
    for k in 0..d {
        out.push(m[(k, k)].re);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            // average the two triangles so tiny asymmetries cancel
            out.push(s2 * 0.5 * (m[(j, k)].re + m[(k, j)].re));
        }
    }
    if !real {
        for j in 0..d {
            for k in (j + 1)..d {
                out.push(-s2 * 0.5 * (m[(j, k)].im - m[(k, j)].im));
            }
        }
    }
    out
}

pub fn coords_to_herm(coords: &[f64], d: usize, real: bool) -> CMat {
    debug_assert_eq!(coords.len(), herm_dim(d, real));
    let s2 = std::f64::consts::SQRT_2;
    let mut m = CMat::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = c(coords[k], 0.0);
    }
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let v = coords[idx] / s2;
            m[(j, k)] = c(v, 0.0);
            m[(k, j)] = c(v, 0.0);
            idx += 1;
        }
    }
    if !real {
        for j in 0..d {
            for k in (j + 1)..d {
                let a = coords[idx] / s2;
                m[(j, k)].im = -a;
                m[(k, j)].im = a;
                idx += 1;
            }
        }
    }
    m
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn max_imag(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

pub fn max_real(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.re.abs()))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn to_real(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// With `real = true` the imaginary part is dropped and a real symmetric
/// solver is used, so the eigenvectors come back real.
pub fn eigh(m: &CMat, real: bool) -> (Vec<f64>, CMat) {
    let d = m.nrows();
    let (vals, vecs) = if real {
        let r = to_real(&hermitian_part(m));
        let e = SymmetricEigen::new(r);
        (e.eigenvalues.iter().copied().collect::<Vec<_>>(), to_complex(&e.eigenvectors))
    } else {
        let e = SymmetricEigen::new(hermitian_part(m));
        (e.eigenvalues.iter().copied().collect::<Vec<_>>(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = CMat::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        sorted_vecs.set_column(col, &vecs.column(i));
    }
    (sorted_vals, sorted_vecs)
}

pub fn eigenvalues(m: &CMat) -> Vec<f64> {
    eigh(m, false).0
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Square root of a positive semidefinite matrix; eigenvalues below zero are
/// clamped, which only matters at round-off level for PSD input.
pub fn sqrt_psd(m: &CMat, real: bool) -> CMat {
    let (vals, vecs) = eigh(m, real);
    let d = m.nrows();
    let mut diag = CMat::zeros(d, d);
    for (i, v) in vals.iter().enumerate() {
        diag[(i, i)] = c(v.max(0.0).sqrt(), 0.0);
    }
    &vecs * diag * vecs.adjoint()
}

pub fn trace_norm(m: &CMat) -> f64 {
    eigenvalues(&hermitian_part(m)).iter().map(|v| v.abs()).sum()
}

/// Numerical rank with a singular-value threshold relative to the largest
/// singular value.
pub fn rank(m: &RMat, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Matrix whose columns are the given vectors.
pub fn columns(vectors: &[Vec<f64>], rows: usize) -> RMat {
    let mut m = RMat::zeros(rows, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        assert_eq!(v.len(), rows);
        for (i, x) in v.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    m
}

/// `tr_Y[(I_X (x) E) rho]` for `rho` on `X (x) Y`.
pub fn contract_second(rho: &CMat, dx: usize, dy: usize, effect: &CMat) -> CMat {
    let mut out = CMat::zeros(dx, dx);
    for i in 0..dx {
        for j in 0..dx {
            let mut acc = ZERO;
            for k in 0..dy {
                for l in 0..dy {
                    acc += effect[(l, k)] * rho[(i * dy + k, j * dy + l)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// `tr_X[(E (x) I_Y) rho]` for `rho` on `X (x) Y`.
pub fn contract_first(rho: &CMat, dx: usize, dy: usize, effect: &CMat) -> CMat {
    let mut out = CMat::zeros(dy, dy);
    for i in 0..dy {
        for j in 0..dy {
            let mut acc = ZERO;
            for k in 0..dx {
                for l in 0..dx {
                    acc += effect[(l, k)] * rho[(k * dy + i, l * dy + j)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

pub fn partial_trace_second(rho: &CMat, dx: usize, dy: usize) -> CMat {
    contract_second(rho, dx, dy, &identity(dy))
}

pub fn partial_trace_first(rho: &CMat, dx: usize, dy: usize) -> CMat {
    contract_first(rho, dx, dy, &identity(dx))
}

/// Permutation matrix sending `|x>|y>` to `|y>|x>`.
pub fn swap_operator(dx: usize, dy: usize) -> CMat {
    let n = dx * dy;
    let mut s = CMat::zeros(n, n);
    for x in 0..dx {
        for y in 0..dy {
            s[(y * dx + x, x * dy + y)] = ONE;
        }
    }
    s
}

pub fn pauli_i() -> CMat {
    identity(2)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c(-1.0, 0.0)])
}

/// Normalized column vector `sum_k |k>|k> / sqrt(d)`.
pub fn max_entangled_vector(d: usize) -> CMat {
    let mut v = CMat::zeros(d * d, 1);
    let amp = c(1.0 / (d as f64).sqrt(), 0.0);
    for k in 0..d {
        v[(k * d + k, 0)] = amp;
    }
    v
}

pub fn basis_ket(d: usize, k: usize) -> CMat {
    let mut v = CMat::zeros(d, 1);
    v[(k, 0)] = ONE;
    v
}
