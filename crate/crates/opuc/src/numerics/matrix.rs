//! Dense complex matrices with partial-pivot LU for determinants and solves.

use crate::error::{OpucError, Result};
use num_complex::Complex64;

/// Hard cap on dense dimensions; everything here is desk scale.
pub const MAX_DENSE_DIM: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    a: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n > MAX_DENSE_DIM {
            return Err(OpucError::DimensionCap {
                dim: n,
                cap: MAX_DENSE_DIM,
            });
        }
        Ok(DenseMatrix {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = DenseMatrix {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.a[i * self.n + j] * v[j])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let n = self.n;
        DenseMatrix::from_fn(n, |i, j| self.a[j * n + i].conj()).unwrap()
    }

    pub fn conj_entrywise(&self) -> DenseMatrix {
        let n = self.n;
        DenseMatrix::from_fn(n, |i, j| self.a[i * n + j].conj()).unwrap()
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(other.a.iter()) {
            *x -= y;
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(other.a.iter()) {
            *x += y;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> DenseMatrix {
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x *= s;
        }
        out
    }

    /// Add s to the diagonal.
    pub fn shift(&self, s: Complex64) -> DenseMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.a[i * self.n + i] += s;
        }
        out
    }

    pub fn norm_fro(&self) -> f64 {
        self.a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Determinant via partial-pivot LU.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut lu = self.a.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = lu[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Solve A X = B for several right-hand sides (columns of B).
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut lu = self.a.clone();
        let mut x = rhs.a.clone();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Err(OpucError::NumericFailure(
                    "singular matrix in solve".to_string(),
                ));
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                    x.swap(k * n + j, piv * n + j);
                }
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
                for j in 0..n {
                    let sub = factor * x[k * n + j];
                    x[i * n + j] -= sub;
                }
            }
        }
        // back substitution
        for col in 0..n {
            for i in (0..n).rev() {
                let mut acc = x[i * n + col];
                for j in i + 1..n {
                    acc -= lu[i * n + j] * x[j * n + col];
                }
                x[i * n + col] = acc / lu[i * n + i];
            }
        }
        Ok(DenseMatrix { n, a: x })
    }

    pub fn solve_vec(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let mut b = DenseMatrix::zeros(n)?;
        for i in 0..n {
            b[(i, 0)] = rhs[i];
        }
        let x = self.solve(&b)?;
        Ok((0..n).map(|i| x[(i, 0)]).collect())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn det_of_known_matrix() {
        let mut m = DenseMatrix::zeros(2).unwrap();
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(2.0, 0.0);
        m[(1, 0)] = Complex64::new(3.0, 0.0);
        m[(1, 1)] = Complex64::new(4.0, 0.0);
        assert_abs_diff_eq!(m.det().re, -2.0, epsilon = 1e-14);
    }

    #[test]
    fn solve_round_trip() {
        let n = 8;
        let m = DenseMatrix::from_fn(n, |i, j| {
            Complex64::new(
                ((i * 7 + j * 3) % 11) as f64 - 5.0,
                ((i * 5 + j) % 7) as f64 - 3.0,
            ) + if i == j {
                Complex64::new(20.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let b = DenseMatrix::from_fn(n, |i, j| Complex64::new(i as f64, j as f64)).unwrap();
        let x = m.solve(&b).unwrap();
        let back = m.mul(&x);
        assert!(back.sub(&b).max_abs() < 1e-10);
    }

    #[test]
    fn dimension_cap_enforced() {
        assert!(matches!(
            DenseMatrix::zeros(2000),
            Err(OpucError::DimensionCap { .. })
        ));
    }
}
