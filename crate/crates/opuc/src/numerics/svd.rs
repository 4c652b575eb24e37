//! Singular values by one-sided complex Jacobi; Schatten norms on top.

use super::matrix::DenseMatrix;
use num_complex::Complex64;

/// Singular values in descending order.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    let n = m.dim();
    if n == 0 {
        return vec![];
    }
    // columns of the working copy
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)]).collect())
        .collect();
    let tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let app: f64 = cols[p].iter().map(|v| v.norm_sqr()).sum();
                let aqq: f64 = cols[q].iter().map(|v| v.norm_sqr()).sum();
                let apq: Complex64 = cols[p]
                    .iter()
                    .zip(cols[q].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = apq.norm();
                if g <= tol * (app * aqq).sqrt() + f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phi = apq / g;
                let tau = (aqq - app) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = c * vp - s * phi.conj() * vq;
                    cols[q][i] = s * phi * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Schatten p-norm; pass f64::INFINITY for the operator norm.
pub fn schatten_norm(m: &DenseMatrix, p: f64) -> f64 {
    let sv = singular_values(m);
    if p.is_infinite() {
        return sv.first().copied().unwrap_or(0.0);
    }
    assert!(p >= 1.0, "Schatten index must be >= 1");
    sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_singular_values() {
        let mut m = DenseMatrix::zeros(3).unwrap();
        m[(0, 0)] = Complex64::new(0.0, 3.0);
        m[(1, 1)] = Complex64::new(-2.0, 0.0);
        m[(2, 2)] = Complex64::new(0.5, 0.0);
        let sv = singular_values(&m);
        assert_abs_diff_eq!(sv[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[2], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn schatten_two_equals_frobenius() {
        let m = DenseMatrix::from_fn(5, |i, j| {
            Complex64::new(((i + 2 * j) % 5) as f64 - 2.0, (i as f64) - (j as f64))
        })
        .unwrap();
        assert_abs_diff_eq!(schatten_norm(&m, 2.0), m.norm_fro(), epsilon = 1e-10);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        // 2x2 rotation with phases
        let mut m = DenseMatrix::zeros(2).unwrap();
        let c = 0.6;
        let s = Complex64::new(0.48, 0.64);
        m[(0, 0)] = Complex64::new(c, 0.0);
        m[(0, 1)] = s;
        m[(1, 0)] = -s.conj();
        m[(1, 1)] = Complex64::new(c, 0.0);
        for sv in singular_values(&m) {
            assert_abs_diff_eq!(sv, 1.0, epsilon = 1e-12);
        }
    }
}
