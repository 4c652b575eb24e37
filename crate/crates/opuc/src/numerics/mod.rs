//! Shared numeric plumbing: circle grids, Fourier analysis on the grid,
//! dense complex linear algebra, and truncated power series.

pub mod eig;
pub mod matrix;
pub mod series;
pub mod svd;

pub use eig::eig_dense;
pub use matrix::DenseMatrix;

use crate::error::{OpucError, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Default quadrature grid size. All quoted quadrature tolerances assume this.
pub const DEFAULT_GRID: usize = 4096;

/// Uniform grid theta_j = 2 pi j / n on [0, 2 pi).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    n_points: usize,
}

impl CircleGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(OpucError::InvalidGrid(n_points));
        }
        Ok(CircleGrid { n_points })
    }

    pub fn default_grid() -> Self {
        CircleGrid {
            n_points: DEFAULT_GRID,
        }
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64) / (self.n_points as f64)
    }

    /// e^{i theta_j}
    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(j))
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|j| self.theta(j))
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n_points).map(|j| self.point(j))
    }

    /// Grid mean (1/N) sum f(theta_j) -- the trapezoid rule for d theta / 2 pi.
    pub fn mean(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.n_points);
        kahan_sum(samples.iter().copied()) / self.n_points as f64
    }

    pub fn mean_complex(&self, samples: &[Complex64]) -> Complex64 {
        assert_eq!(samples.len(), self.n_points);
        kahan_sum_complex(samples.iter().copied()) / self.n_points as f64
    }
}

/// Compensated summation; the quadrature paths accumulate O(N) terms.
pub fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn kahan_sum_complex(values: impl Iterator<Item = Complex64>) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Discrete Fourier coefficients c_k = (1/N) sum_j samples_j e^{-i k theta_j}
/// for k in [k_min, k_max]. Exact for trigonometric polynomials of degree < N/2.
pub fn fourier_coeffs(
    grid: &CircleGrid,
    samples: &[Complex64],
    k_min: i64,
    k_max: i64,
) -> Result<BTreeMap<i64, Complex64>> {
    let n = grid.len();
    if samples.len() != n {
        return Err(OpucError::InvalidParameter(format!(
            "sample count {} does not match grid size {}",
            samples.len(),
            n
        )));
    }
    if k_min > k_max {
        return Err(OpucError::InvalidParameter(
            "k_min exceeds k_max".to_string(),
        ));
    }
    let nyquist = (n / 2) as i64;
    for k in [k_min, k_max] {
        if k.abs() >= nyquist {
            return Err(OpucError::NyquistRange { k, n_points: n });
        }
    }
    let mut out = BTreeMap::new();
    for k in k_min..=k_max {
        let coeff = kahan_sum_complex((0..n).map(|j| {
            let phase = Complex64::from_polar(1.0, -(k as f64) * grid.theta(j));
            samples[j] * phase
        })) / n as f64;
        out.insert(k, coeff);
    }
    Ok(out)
}

/// Inverse synthesis sum_k c_k e^{i k theta_j} at every grid point.
pub fn fourier_synthesis(grid: &CircleGrid, coeffs: &BTreeMap<i64, Complex64>) -> Vec<Complex64> {
    (0..grid.len())
        .map(|j| {
            kahan_sum_complex(
                coeffs
                    .iter()
                    .map(|(&k, &c)| c * Complex64::from_polar(1.0, (k as f64) * grid.theta(j))),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(CircleGrid::new(15).is_err());
        assert!(CircleGrid::new(100).is_err());
        assert!(CircleGrid::new(8).is_err());
        assert!(CircleGrid::new(16).is_ok());
    }

    #[test]
    fn fourier_constant() {
        let grid = CircleGrid::new(64).unwrap();
        let samples = vec![Complex64::new(1.0, 0.0); 64];
        let c = fourier_coeffs(&grid, &samples, -5, 5).unwrap();
        assert_abs_diff_eq!(c[&0].re, 1.0, epsilon = 1e-14);
        for k in 1..=5i64 {
            assert!(c[&k].norm() < 1e-14);
            assert!(c[&-k].norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_pure_harmonic() {
        let grid = CircleGrid::new(64).unwrap();
        let samples: Vec<Complex64> = grid.points().collect();
        let c = fourier_coeffs(&grid, &samples, -3, 3).unwrap();
        assert_abs_diff_eq!(c[&1].re, 1.0, epsilon = 1e-14);
        assert!(c[&1].im.abs() < 1e-14);
        for k in [-3i64, -2, -1, 0, 2, 3] {
            assert!(c[&k].norm() < 1e-13);
        }
    }

    // Oracle: log|1 - c e^{i theta}|^2 = -sum_{n>=1} (c^n e^{in theta} + conj(c)^n e^{-in theta})/n,
    // summed to machine precision.
    #[test]
    fn fourier_log_weight_oracle() {
        let grid = CircleGrid::new(4096).unwrap();
        let c = 0.5;
        let samples: Vec<Complex64> = grid
            .points()
            .map(|z| {
                let v = (Complex64::new(1.0, 0.0) - c * z).norm_sqr().ln();
                Complex64::new(v, 0.0)
            })
            .collect();
        let coeffs = fourier_coeffs(&grid, &samples, -2, 2).unwrap();
        // oracle values: hat c_1 = -c, hat c_0 = 0 (frozen from the series above)
        assert_abs_diff_eq!(coeffs[&1].re, -0.5, epsilon = 1e-12);
        assert!(coeffs[&1].im.abs() < 1e-12);
        assert!(coeffs[&0].norm() < 1e-12);
        assert_abs_diff_eq!(coeffs[&-1].re, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn fourier_nyquist_rejected() {
        let grid = CircleGrid::new(16).unwrap();
        let samples = vec![Complex64::new(0.0, 0.0); 16];
        assert!(matches!(
            fourier_coeffs(&grid, &samples, -8, 0),
            Err(OpucError::NyquistRange { .. })
        ));
    }

    proptest! {
        // Round trip: band-limited samples are reproduced to 1e-12.
        #[test]
        fn fourier_round_trip(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let grid = CircleGrid::new(64).unwrap();
            let mut coeffs = BTreeMap::new();
            for k in -20i64..=20 {
                coeffs.insert(
                    k,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
            let samples = fourier_synthesis(&grid, &coeffs);
            let back = fourier_coeffs(&grid, &samples, -20, 20).unwrap();
            for (k, c) in &coeffs {
                prop_assert!((back[k] - c).norm() < 1e-12);
            }
            let resynth = fourier_synthesis(&grid, &back);
            for (a, b) in samples.iter().zip(resynth.iter()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
