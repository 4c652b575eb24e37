//! Szego recursion: monic/orthonormal polynomials, second-kind polynomials,
//! transfer matrices, zeros, and the rotation-number density.

use crate::cmv::{self, CmvVariant};
use crate::error::{OpucError, Result};
use crate::numerics::{eig_dense, CircleGrid};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Margin kept between |alpha| and 1; coefficients at or past it are rejected.
pub const COEFF_MARGIN: f64 = 1e-12;

/// Tail behavior of a coefficient sequence past its stored prefix.
#[derive(Clone)]
pub enum Tail {
    /// alpha_j = 0 for j >= prefix length.
    Zeros,
    /// Repeats the final `period` prefix entries forever.
    Periodic { period: usize },
    /// Model-defined continuation.
    Generator {
        label: String,
        f: Arc<dyn Fn(usize) -> Complex64 + Send + Sync>,
    },
}

impl fmt::Debug for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Zeros => write!(f, "Zeros"),
            Tail::Periodic { period } => write!(f, "Periodic({period})"),
            Tail::Generator { label, .. } => write!(f, "Generator({label})"),
        }
    }
}

/// A Verblunsky coefficient sequence: finite prefix plus tail descriptor.
#[derive(Debug, Clone)]
pub struct VerblunskySeq {
    prefix: Vec<Complex64>,
    tail: Tail,
}

fn check_coeff(index: usize, a: Complex64) -> Result<Complex64> {
    if !a.re.is_finite() || !a.im.is_finite() || a.norm() > 1.0 - COEFF_MARGIN {
        return Err(OpucError::InvalidCoefficient {
            index,
            modulus: a.norm(),
        });
    }
    Ok(a)
}

impl VerblunskySeq {
    /// Finite prefix with zero tail.
    pub fn from_prefix(prefix: Vec<Complex64>) -> Result<Self> {
        for (j, &a) in prefix.iter().enumerate() {
            check_coeff(j, a)?;
        }
        Ok(VerblunskySeq {
            prefix,
            tail: Tail::Zeros,
        })
    }

    pub fn from_real_prefix(prefix: &[f64]) -> Result<Self> {
        Self::from_prefix(prefix.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros() -> Self {
        VerblunskySeq {
            prefix: vec![],
            tail: Tail::Zeros,
        }
    }

    /// Periodic sequence repeating `block` forever.
    pub fn periodic(block: Vec<Complex64>) -> Result<Self> {
        if block.is_empty() {
            return Err(OpucError::InvalidParameter(
                "periodic block must be nonempty".to_string(),
            ));
        }
        for (j, &a) in block.iter().enumerate() {
            check_coeff(j, a)?;
        }
        let period = block.len();
        Ok(VerblunskySeq {
            prefix: block,
            tail: Tail::Periodic { period },
        })
    }

    pub fn with_generator(
        prefix: Vec<Complex64>,
        label: impl Into<String>,
        f: Arc<dyn Fn(usize) -> Complex64 + Send + Sync>,
    ) -> Result<Self> {
        for (j, &a) in prefix.iter().enumerate() {
            check_coeff(j, a)?;
        }
        Ok(VerblunskySeq {
            prefix,
            tail: Tail::Generator {
                label: label.into(),
                f,
            },
        })
    }

    pub fn prefix(&self) -> &[Complex64] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn alpha(&self, j: usize) -> Complex64 {
        if j < self.prefix.len() {
            return self.prefix[j];
        }
        match &self.tail {
            Tail::Zeros => Complex64::new(0.0, 0.0),
            Tail::Periodic { period } => {
                let base = self.prefix.len() - period;
                self.prefix[base + (j - self.prefix.len()) % period]
            }
            Tail::Generator { f, .. } => {
                let a = f(j);
                debug_assert!(a.norm() <= 1.0 - COEFF_MARGIN);
                a
            }
        }
    }

    pub fn rho(&self, j: usize) -> f64 {
        (1.0 - self.alpha(j).norm_sqr()).sqrt()
    }

    pub fn materialize(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|j| self.alpha(j)).collect()
    }

    /// Support length if the tail is identically zero: smallest L with
    /// alpha_j = 0 for all j >= L.
    pub fn finite_support(&self) -> Option<usize> {
        match self.tail {
            Tail::Zeros => {
                let mut l = self.prefix.len();
                while l > 0 && self.prefix[l - 1].norm() == 0.0 {
                    l -= 1;
                }
                Some(l)
            }
            _ => None,
        }
    }

    /// Coefficients shifted by k: alpha_j -> alpha_{j+k} (the measure d mu_k).
    pub fn shifted(&self, k: usize) -> VerblunskySeq {
        match &self.tail {
            Tail::Zeros => VerblunskySeq {
                prefix: self.prefix.iter().skip(k).copied().collect(),
                tail: Tail::Zeros,
            },
            Tail::Periodic { period } => {
                let period = *period;
                let block: Vec<Complex64> = (0..period).map(|j| self.alpha(k + j)).collect();
                VerblunskySeq {
                    prefix: block,
                    tail: Tail::Periodic { period },
                }
            }
            Tail::Generator { label, f } => {
                let f = f.clone();
                VerblunskySeq {
                    prefix: self.prefix.iter().skip(k).copied().collect(),
                    tail: Tail::Generator {
                        label: format!("{label} >> {k}"),
                        f: Arc::new(move |j| f(j + k)),
                    },
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    Monic,
    Orthonormal,
    SecondKind,
    Starred,
}

/// Degree-indexed complex coefficient list in z. Trailing zero coefficients
/// are kept: the degree tag is part of the data (star needs it).
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePolynomial {
    pub coeffs: Vec<Complex64>,
    pub kind: PolyKind,
}

impl CirclePolynomial {
    pub fn new(coeffs: Vec<Complex64>, kind: PolyKind) -> Self {
        assert!(!coeffs.is_empty());
        CirclePolynomial { coeffs, kind }
    }

    pub fn one(kind: PolyKind) -> Self {
        CirclePolynomial::new(vec![Complex64::new(1.0, 0.0)], kind)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> CirclePolynomial {
        CirclePolynomial {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            kind: self.kind,
        }
    }
}

/// P*(z) = z^n conj(P(1/conj(z))): coefficient k of the output is the
/// conjugate of coefficient n-k of the input.
pub fn star(p: &CirclePolynomial) -> CirclePolynomial {
    let n = p.coeffs.len();
    let coeffs = (0..n).map(|k| p.coeffs[n - 1 - k].conj()).collect();
    let kind = match p.kind {
        PolyKind::Starred => PolyKind::Monic,
        _ => PolyKind::Starred,
    };
    CirclePolynomial { coeffs, kind }
}

/// Output of the coupled Szego recursion up to order n.
#[derive(Debug, Clone)]
pub struct SzegoPolynomials {
    /// Monic Phi_0..Phi_n.
    pub monic: Vec<CirclePolynomial>,
    /// Reversed Phi*_0..Phi*_n.
    pub monic_star: Vec<CirclePolynomial>,
    /// Orthonormal phi_k = Phi_k / ||Phi_k||.
    pub orthonormal: Vec<CirclePolynomial>,
    pub orthonormal_star: Vec<CirclePolynomial>,
    /// Second-kind orthonormal psi_k (sign-flipped coefficients).
    pub second_kind: Vec<CirclePolynomial>,
    pub second_kind_star: Vec<CirclePolynomial>,
    /// ||Phi_k||^2 = prod_{j<k} (1 - |alpha_j|^2).
    pub norms_sq: Vec<f64>,
}

fn monic_recursion(alphas: &[Complex64]) -> (Vec<CirclePolynomial>, Vec<CirclePolynomial>) {
    let n = alphas.len();
    let mut phi = Vec::with_capacity(n + 1);
    let mut phi_star = Vec::with_capacity(n + 1);
    phi.push(CirclePolynomial::one(PolyKind::Monic));
    phi_star.push(CirclePolynomial::one(PolyKind::Starred));
    for (k, &a) in alphas.iter().enumerate() {
        let cur = &phi[k];
        let cur_star = &phi_star[k];
        let mut next = vec![Complex64::new(0.0, 0.0); k + 2];
        let mut next_star = vec![Complex64::new(0.0, 0.0); k + 2];
        // Phi_{k+1} = z Phi_k - conj(alpha_k) Phi_k*
        for (i, &c) in cur.coeffs.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in cur_star.coeffs.iter().enumerate() {
            next[i] -= a.conj() * c;
        }
        // Phi*_{k+1} = Phi_k* - alpha_k z Phi_k
        for (i, &c) in cur_star.coeffs.iter().enumerate() {
            next_star[i] += c;
        }
        for (i, &c) in cur.coeffs.iter().enumerate() {
            next_star[i + 1] -= a * c;
        }
        phi.push(CirclePolynomial::new(next, PolyKind::Monic));
        phi_star.push(CirclePolynomial::new(next_star, PolyKind::Starred));
    }
    (phi, phi_star)
}

/// ||Phi_k||^2 for k = 0..=n.
pub fn norms(alphas: &VerblunskySeq, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    let mut acc = 1.0;
    for j in 0..n {
        let a = check_coeff(j, alphas.alpha(j))?;
        acc *= 1.0 - a.norm_sqr();
        out.push(acc);
    }
    Ok(out)
}

/// Run the Szego recursion up to order n for alpha and for -alpha.
pub fn szego_polys(alphas: &VerblunskySeq, n: usize) -> Result<SzegoPolynomials> {
    let coeffs: Vec<Complex64> = (0..n)
        .map(|j| check_coeff(j, alphas.alpha(j)))
        .collect::<Result<_>>()?;
    let flipped: Vec<Complex64> = coeffs.iter().map(|a| -a).collect();
    let (monic, monic_star) = monic_recursion(&coeffs);
    let (second_monic, second_monic_star) = monic_recursion(&flipped);
    let norms_sq = norms(alphas, n)?;
    let orthonormal: Vec<CirclePolynomial> = monic
        .iter()
        .zip(norms_sq.iter())
        .map(|(p, &ns)| {
            let mut q = p.scale(1.0 / ns.sqrt());
            q.kind = PolyKind::Orthonormal;
            q
        })
        .collect();
    let orthonormal_star: Vec<CirclePolynomial> = monic_star
        .iter()
        .zip(norms_sq.iter())
        .map(|(p, &ns)| p.scale(1.0 / ns.sqrt()))
        .collect();
    let second_kind: Vec<CirclePolynomial> = second_monic
        .iter()
        .zip(norms_sq.iter())
        .map(|(p, &ns)| {
            let mut q = p.scale(1.0 / ns.sqrt());
            q.kind = PolyKind::SecondKind;
            q
        })
        .collect();
    let second_kind_star: Vec<CirclePolynomial> = second_monic_star
        .iter()
        .zip(norms_sq.iter())
        .map(|(p, &ns)| p.scale(1.0 / ns.sqrt()))
        .collect();
    Ok(SzegoPolynomials {
        monic,
        monic_star,
        orthonormal,
        orthonormal_star,
        second_kind,
        second_kind_star,
        norms_sq,
    })
}

/// 2x2 transfer matrix T_n(z) with det T_n = z^n.
#[derive(Debug, Clone, Copy)]
pub struct TransferMatrix {
    pub m: [[Complex64; 2]; 2],
    pub steps: usize,
    pub z: Complex64,
}

impl TransferMatrix {
    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// One-step coefficient matrix A(alpha, z) = rho^{-1} [[z, -conj(alpha)], [-alpha z, 1]].
pub fn one_step(alpha: Complex64, z: Complex64) -> [[Complex64; 2]; 2] {
    let rho_inv = 1.0 / (1.0 - alpha.norm_sqr()).sqrt();
    [
        [rho_inv * z, -rho_inv * alpha.conj()],
        [-rho_inv * alpha * z, Complex64::new(rho_inv, 0.0)],
    ]
}

fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// T_n(z) = A(alpha_{n-1}, z) ... A(alpha_0, z); applied to (1,1)^T it yields
/// (phi_n, phi_n*)^T.
pub fn transfer(alphas: &VerblunskySeq, n: usize, z: Complex64) -> Result<TransferMatrix> {
    let mut m = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for j in 0..n {
        let a = check_coeff(j, alphas.alpha(j))?;
        m = mat_mul(one_step(a, z), m);
    }
    Ok(TransferMatrix { m, steps: n, z })
}

/// Evaluate (phi_n(z), phi_n*(z)) for n = 0..=n_max by running the recursion
/// pointwise; cheaper than building coefficient lists when only values matter.
pub fn orthonormal_values(
    alphas: &VerblunskySeq,
    n_max: usize,
    z: Complex64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut phi = Vec::with_capacity(n_max + 1);
    let mut phi_star = Vec::with_capacity(n_max + 1);
    let one = Complex64::new(1.0, 0.0);
    phi.push(one);
    phi_star.push(one);
    for j in 0..n_max {
        let a = check_coeff(j, alphas.alpha(j))?;
        let rho_inv = 1.0 / (1.0 - a.norm_sqr()).sqrt();
        let p = phi[j];
        let q = phi_star[j];
        phi.push(rho_inv * (z * p - a.conj() * q));
        phi_star.push(rho_inv * (q - a * z * p));
    }
    Ok((phi, phi_star))
}

/// Zeros of Phi_n as eigenvalues of the truncated n x n CMV matrix.
pub fn zeros(alphas: &VerblunskySeq, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Ok(vec![]);
    }
    let op = cmv::build_cmv(alphas, n, CmvVariant::HalfLineTruncated)?;
    eig_dense(op.dense())
}

/// Rotation-number report: the sampled density (1/2 pi n) d arg Phi_n / d theta
/// against the exact Poisson-kernel identity evaluated from the zeros.
#[derive(Debug, Clone)]
pub struct RotationReport {
    pub density: Vec<f64>,
    /// Total increase of arg Phi_n around the circle (should be 2 pi n).
    pub total_arg_mass: f64,
    /// Sup over the grid of |density - (P(d nu_n)/2 + 1/4pi)|.
    pub identity_sup_gap: f64,
    /// Smallest sampled phase increment (monotonicity check).
    pub min_increment: f64,
    /// Quadrature of the density over the circle (should be 1).
    pub integral: f64,
}

pub fn rotation_density(
    alphas: &VerblunskySeq,
    n: usize,
    grid: &CircleGrid,
) -> Result<RotationReport> {
    if n == 0 {
        return Err(OpucError::InvalidParameter(
            "rotation density needs n >= 1".to_string(),
        ));
    }
    let n_grid = grid.len();
    if n_grid < 64 * n {
        return Err(OpucError::Resolution {
            required: 64 * n,
            available: n_grid,
        });
    }
    let polys = szego_polys(alphas, n)?;
    let phi_n = &polys.monic[n];
    let values: Vec<Complex64> = grid.points().map(|z| phi_n.eval(z)).collect();
    // phase increments; refuse when a single step moves more than pi/2
    let mut inc = vec![0.0f64; n_grid];
    for j in 0..n_grid {
        let next = values[(j + 1) % n_grid];
        let ratio = next / values[j];
        let d = ratio.arg();
        if d.abs() >= PI / 2.0 {
            return Err(OpucError::Resolution {
                required: 2 * n_grid,
                available: n_grid,
            });
        }
        inc[j] = d;
    }
    let total: f64 = inc.iter().sum();
    let h = 2.0 * PI / n_grid as f64;
    // five-point stencil derivative from increments
    let at = |j: isize| -> f64 {
        let m = n_grid as isize;
        inc[(((j % m) + m) % m) as usize]
    };
    let density: Vec<f64> = (0..n_grid as isize)
        .map(|j| {
            let d =
                (7.0 * at(j) + 7.0 * at(j - 1) - at(j + 1) - at(j - 2)) / (12.0 * h);
            d / (2.0 * PI * n as f64)
        })
        .collect();
    let integral = density.iter().sum::<f64>() * h;

    // identity side from the zeros
    let zs = zeros(alphas, n)?;
    let mut sup_gap = 0.0f64;
    for (j, &d) in density.iter().enumerate() {
        let theta = grid.theta(j);
        let mut poisson = 0.0;
        for z0 in &zs {
            let r = z0.norm();
            let dphi = theta - z0.arg();
            poisson += (1.0 - r * r) / (1.0 + r * r - 2.0 * r * dphi.cos());
        }
        // P(d nu_n)(theta) = (1/2pi) * (1/n) * sum_j poisson kernels
        let ident = 0.5 * poisson / (2.0 * PI * n as f64) + 1.0 / (4.0 * PI);
        sup_gap = sup_gap.max((d - ident).abs());
    }
    let min_increment = inc.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(RotationReport {
        density,
        total_arg_mass: total,
        identity_sup_gap: sup_gap,
        min_increment,
        integral,
    })
}
