//! Dense complex eigenvalues: balancing, Householder Hessenberg reduction,
//! then single-shift QR with Wilkinson shifts and deflation.

use super::matrix::{DenseMatrix, MAX_DENSE_DIM};
use crate::error::{OpucError, Result};
use num_complex::Complex64;

const EPS: f64 = f64::EPSILON;

/// All eigenvalues of a general complex matrix, with algebraic multiplicity.
///
/// Backward-stable Hessenberg reduction plus shifted QR; dimension capped at
/// 1024. Non-convergence (iteration cap) returns the eigenvalues deflated so
/// far inside the error.
pub fn eig_dense(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n > MAX_DENSE_DIM {
        return Err(OpucError::DimensionCap {
            dim: n,
            cap: MAX_DENSE_DIM,
        });
    }
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    qr_eigenvalues(h)
}

/// Parlett-Reinsch balancing with powers of two (exact in binary floating point).
fn balance(a: &mut DenseMatrix) {
    let n = a.dim();
    let radix = 2.0f64;
    for _ in 0..32 {
        let mut converged = true;
        for i in 0..n {
            let mut row = 0.0;
            let mut col = 0.0;
            for j in 0..n {
                if j != i {
                    row += a[(i, j)].norm();
                    col += a[(j, i)].norm();
                }
            }
            if row == 0.0 || col == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = row + col;
            let mut c = col;
            while c < row / radix {
                f *= radix;
                c *= radix * radix;
            }
            while c > row * radix {
                f /= radix;
                c /= radix * radix;
            }
            if c != col && (col * f + row / f) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    let v = a[(i, j)] / f;
                    a[(i, j)] = v;
                }
                for j in 0..n {
                    let v = a[(j, i)] * f;
                    a[(j, i)] = v;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Reduce to upper Hessenberg form by complex Householder reflections.
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.dim();
    for k in 0..n.saturating_sub(2) {
        // reflector acting on rows k+1..n built from column k
        let m = n - k - 1;
        let mut x: Vec<Complex64> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm <= f64::MIN_POSITIVE {
            continue;
        }
        let alpha = x[0];
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let beta = -phase * norm;
        x[0] -= beta;
        let vnorm_sqr = 2.0 * (norm * norm + norm * alpha.norm());
        if vnorm_sqr <= f64::MIN_POSITIVE {
            continue;
        }
        let scale = (2.0 / vnorm_sqr).sqrt();
        let w: Vec<Complex64> = x.iter().map(|v| v * scale).collect();
        // A <- P A with P = I - w w^H on rows k+1..n
        for col in k..n {
            let dot: Complex64 = (0..m).map(|i| w[i].conj() * a[(k + 1 + i, col)]).sum();
            for i in 0..m {
                let sub = w[i] * dot;
                a[(k + 1 + i, col)] -= sub;
            }
        }
        // A <- A P on columns k+1..n
        for row in 0..n {
            let dot: Complex64 = (0..m).map(|i| a[(row, k + 1 + i)] * w[i]).sum();
            for i in 0..m {
                let sub = dot * w[i].conj();
                a[(row, k + 1 + i)] -= sub;
            }
        }
        // enforce the exact zeros the reflector produced
        a[(k + 1, k)] = beta;
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fn_ == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / fn_) * g.conj() / d;
    (c, s)
}

fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half = Complex64::new(0.5, 0.0);
    let tr = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    (tr + disc, tr - disc)
}

fn qr_eigenvalues(mut h: DenseMatrix) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let hnorm = h.norm_fro().max(f64::MIN_POSITIVE);
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iters_this_block = 0usize;
    let max_block_iters = 60;

    loop {
        // deflate trailing 1x1 / 2x2 blocks as subdiagonals vanish
        loop {
            if hi == 0 {
                eigs.push(h[(0, 0)]);
                let mut out = eigs;
                out.reverse();
                return Ok(out);
            }
            let tiny = {
                let t = EPS * (h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm());
                if t == 0.0 {
                    EPS * hnorm
                } else {
                    t
                }
            };
            if h[(hi, hi - 1)].norm() <= tiny {
                h[(hi, hi - 1)] = Complex64::new(0.0, 0.0);
                eigs.push(h[(hi, hi)]);
                hi -= 1;
                iters_this_block = 0;
                continue;
            }
            break;
        }

        // active window [lo..=hi]
        let mut lo = hi;
        while lo > 0 {
            let tiny = {
                let t = EPS * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm());
                if t == 0.0 {
                    EPS * hnorm
                } else {
                    t
                }
            };
            if h[(lo, lo - 1)].norm() <= tiny {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hi - 1 {
            // 2x2 block: close directly
            let (l1, l2) = eig2x2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(l2);
            eigs.push(l1);
            if lo == 0 {
                let mut out = eigs;
                out.reverse();
                return Ok(out);
            }
            hi = lo - 1;
            iters_this_block = 0;
            continue;
        }

        iters_this_block += 1;
        if iters_this_block > max_block_iters {
            let mut partial = eigs;
            partial.reverse();
            return Err(OpucError::EigNonConvergence { partial });
        }

        // Wilkinson shift from the trailing 2x2, exceptional shift to break cycles
        let mu = if iters_this_block % 10 == 0 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2x2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            if (l1 - h[(hi, hi)]).norm() <= (l2 - h[(hi, hi)]).norm() {
                l1
            } else {
                l2
            }
        };

        // implicit single-shift bulge chase on [lo..=hi]
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let row_start = if k > lo { k - 1 } else { lo };
            for col in row_start..n {
                let hkc = h[(k, col)];
                let hk1c = h[(k + 1, col)];
                h[(k, col)] = c * hkc + s * hk1c;
                h[(k + 1, col)] = -s.conj() * hkc + c * hk1c;
            }
            let row_end = (k + 2).min(hi);
            for row in 0..=row_end {
                let hrk = h[(row, k)];
                let hrk1 = h[(row, k + 1)];
                h[(row, k)] = c * hrk + s.conj() * hrk1;
                h[(row, k + 1)] = -s * hrk + c * hrk1;
            }
            if k > lo {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            if k < hi - 1 {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
}
