//! Truncated power-series arithmetic used by the Schur and Szego pipelines.
//! A series is a coefficient vector c[0..len]; all operations truncate to the
//! shorter relevant length.

use num_complex::Complex64;

pub fn mul(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai.norm_sqr() == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// a / b with b[0] != 0.
pub fn div(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    assert!(b[0].norm() > 0.0, "series division by zero constant term");
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..len {
        let mut acc = a.get(k).copied().unwrap_or_else(|| Complex64::new(0.0, 0.0));
        for j in 1..=k {
            let bj = b.get(j).copied().unwrap_or_else(|| Complex64::new(0.0, 0.0));
            acc -= bj * out[k - j];
        }
        out[k] = acc / b[0];
    }
    out
}

/// exp(a) via the ODE recurrence f' = a' f.
pub fn exp(a: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return out;
    }
    out[0] = a[0].exp();
    for k in 1..len {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            let aj = a.get(j).copied().unwrap_or_else(|| Complex64::new(0.0, 0.0));
            acc += (j as f64) * aj * out[k - j];
        }
        out[k] = acc / (k as f64);
    }
    out
}

/// Horner evaluation of the truncated series at z.
pub fn eval(a: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in a.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn mul_div_round_trip() {
        let a: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.1 * k as f64))
            .collect();
        let b: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(2.0 - 0.2 * k as f64, -0.05 * k as f64))
            .collect();
        let prod = mul(&a, &b, 8);
        let back = div(&prod, &b, 8);
        assert!(series_close(&a, &back, 1e-12));
    }

    #[test]
    fn exp_matches_geometric_log() {
        // exp(-log(1 - z/2)) = 1/(1 - z/2): log series -sum (z/2)^k/k
        let n = 12;
        let log_series: Vec<Complex64> = (0..n)
            .map(|k| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.5f64.powi(k as i32) / k as f64, 0.0)
                }
            })
            .collect();
        let e = exp(&log_series, n);
        for (k, c) in e.iter().enumerate() {
            assert!((c - Complex64::new(0.5f64.powi(k as i32), 0.0)).norm() < 1e-13);
        }
    }
}
