//! CMV operators in LM-factored form: truncations, unitary completions,
//! extended windows, and periodized fibers, plus the determinant, trace,
//! Schatten, rank-two, and trial-function identities built on them.

pub mod resolvent;

pub use resolvent::resolvent_entry;

use crate::error::{OpucError, Result};
use crate::numerics::svd::schatten_norm;
use crate::numerics::{eig_dense, DenseMatrix};
use crate::szego::{szego_polys, VerblunskySeq};
use num_complex::Complex64;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CmvVariant {
    /// Top-left n x n corner of the half-line operator (a contraction).
    HalfLineTruncated,
    /// n x n unitary completion: the straddling Theta block is replaced by a
    /// 1 x 1 unimodular entry.
    HalfLineUnitary { boundary: Complex64 },
    /// Rows/columns [offset, offset + n) of the extended operator.
    ExtendedWindow { offset: usize },
    /// p x p Floquet fiber E_p(beta); n is the (even) period.
    Periodized { beta: Complex64 },
}

#[derive(Debug, Clone)]
enum FactorEntry {
    Scalar {
        at: usize,
        value: Complex64,
    },
    /// 2 x 2 block acting on the (possibly wrapped) index pair.
    Block {
        idx: (usize, usize),
        m: [[Complex64; 2]; 2],
    },
}

/// One of the two alternating block factors (L or M).
#[derive(Debug, Clone)]
pub struct BlockFactor {
    dim: usize,
    entries: Vec<FactorEntry>,
}

fn theta(alpha: Complex64) -> [[Complex64; 2]; 2] {
    let rho = (1.0 - alpha.norm_sqr()).sqrt();
    [
        [alpha.conj(), Complex64::new(rho, 0.0)],
        [Complex64::new(rho, 0.0), -alpha],
    ]
}

impl BlockFactor {
    fn identity(dim: usize) -> Self {
        BlockFactor {
            dim,
            entries: vec![],
        }
    }

    fn push_scalar(&mut self, at: usize, value: Complex64) {
        self.entries.push(FactorEntry::Scalar { at, value });
    }

    fn push_block(&mut self, idx: (usize, usize), m: [[Complex64; 2]; 2]) {
        self.entries.push(FactorEntry::Block { idx, m });
    }

    /// Indices not covered by any entry act as identity.
    fn covered(&self) -> Vec<bool> {
        let mut c = vec![false; self.dim];
        for e in &self.entries {
            match e {
                FactorEntry::Scalar { at, .. } => c[*at] = true,
                FactorEntry::Block { idx, .. } => {
                    c[idx.0] = true;
                    c[idx.1] = true;
                }
            }
        }
        c
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = v.to_vec();
        for e in &self.entries {
            match e {
                FactorEntry::Scalar { at, value } => out[*at] = value * v[*at],
                FactorEntry::Block { idx: (i, j), m } => {
                    out[*i] = m[0][0] * v[*i] + m[0][1] * v[*j];
                    out[*j] = m[1][0] * v[*i] + m[1][1] * v[*j];
                }
            }
        }
        out
    }

    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = v.to_vec();
        for e in &self.entries {
            match e {
                FactorEntry::Scalar { at, value } => out[*at] = value.conj() * v[*at],
                FactorEntry::Block { idx: (i, j), m } => {
                    out[*i] = m[0][0].conj() * v[*i] + m[1][0].conj() * v[*j];
                    out[*j] = m[0][1].conj() * v[*i] + m[1][1].conj() * v[*j];
                }
            }
        }
        out
    }

    /// Sparse entry list (row, col, value), identity rows included.
    fn sparse_entries(&self) -> Vec<(usize, usize, Complex64)> {
        let mut out = Vec::new();
        for e in &self.entries {
            match e {
                FactorEntry::Scalar { at, value } => out.push((*at, *at, *value)),
                FactorEntry::Block { idx: (i, j), m } => {
                    out.push((*i, *i, m[0][0]));
                    out.push((*i, *j, m[0][1]));
                    out.push((*j, *i, m[1][0]));
                    out.push((*j, *j, m[1][1]));
                }
            }
        }
        for (i, cov) in self.covered().iter().enumerate() {
            if !cov {
                out.push((i, i, Complex64::new(1.0, 0.0)));
            }
        }
        out
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let mut m = DenseMatrix::zeros(self.dim)?;
        for (i, j, v) in self.sparse_entries() {
            m[(i, j)] += v;
        }
        Ok(m)
    }
}

/// A CMV operator held as its two block factors; dense form on demand.
#[derive(Debug)]
pub struct CmvOperator {
    pub variant: CmvVariant,
    /// Dimension of the exposed dense matrix.
    dim: usize,
    /// Dimension the factors act on (padded for corner slices).
    work_dim: usize,
    /// Row/col of the exposed corner inside the working window.
    slice_at: usize,
    lfac: BlockFactor,
    mfac: BlockFactor,
    dense: OnceLock<DenseMatrix>,
}

impl CmvOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn work_dim(&self) -> usize {
        self.work_dim
    }

    pub fn factors(&self) -> (&BlockFactor, &BlockFactor) {
        (&self.lfac, &self.mfac)
    }

    /// C v = L (M v) at the working dimension.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.lfac.apply(&self.mfac.apply(v))
    }

    /// C^{-1} v = M^H (L^H v); valid when the factors are unitary.
    pub fn matvec_inv(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.mfac.apply_adjoint(&self.lfac.apply_adjoint(v))
    }

    /// Dense materialization (corner slice for truncated/window variants).
    pub fn dense(&self) -> &DenseMatrix {
        self.dense.get_or_init(|| {
            let l = self.lfac.sparse_entries();
            let m = self.mfac.sparse_entries();
            // index M entries by row for the sparse product
            let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![vec![]; self.work_dim];
            for (r, c, v) in m {
                by_row[r].push((c, v));
            }
            let mut full = DenseMatrix::zeros(self.work_dim).expect("work_dim within cap");
            for (i, k, lv) in l {
                for &(j, mv) in &by_row[k] {
                    full[(i, j)] += lv * mv;
                }
            }
            if self.dim == self.work_dim && self.slice_at == 0 {
                full
            } else {
                DenseMatrix::from_fn(self.dim, |i, j| {
                    full[(i + self.slice_at, j + self.slice_at)]
                })
                .expect("dim within cap")
            }
        })
    }
}

/// Build a CMV operator. For `Periodized`, `n` is the even period p.
pub fn build_cmv(alphas: &VerblunskySeq, n: usize, variant: CmvVariant) -> Result<CmvOperator> {
    if n == 0 {
        return Err(OpucError::InvalidParameter("dimension 0".to_string()));
    }
    match variant {
        CmvVariant::HalfLineTruncated => {
            // pad so the corner equals the infinite operator's corner
            let work = (n + 4).next_multiple_of(2);
            let (l, m) = half_line_factors(alphas, work, None)?;
            Ok(CmvOperator {
                variant,
                dim: n,
                work_dim: work,
                slice_at: 0,
                lfac: l,
                mfac: m,
                dense: OnceLock::new(),
            })
        }
        CmvVariant::HalfLineUnitary { boundary } => {
            if (boundary.norm() - 1.0).abs() > 1e-12 {
                return Err(OpucError::InvalidParameter(
                    "boundary entry must be unimodular".to_string(),
                ));
            }
            let (l, m) = half_line_factors(alphas, n, Some(boundary))?;
            Ok(CmvOperator {
                variant,
                dim: n,
                work_dim: n,
                slice_at: 0,
                lfac: l,
                mfac: m,
                dense: OnceLock::new(),
            })
        }
        CmvVariant::ExtendedWindow { offset } => {
            let base = offset.saturating_sub(2) & !1usize;
            let work = (offset - base + n + 4).next_multiple_of(2);
            let (l, m) = window_factors(alphas, base, work)?;
            Ok(CmvOperator {
                variant,
                dim: n,
                work_dim: work,
                slice_at: offset - base,
                lfac: l,
                mfac: m,
                dense: OnceLock::new(),
            })
        }
        CmvVariant::Periodized { beta } => {
            let p = n;
            if p % 2 != 0 {
                return Err(OpucError::InvalidParameter(
                    "periodized CMV needs even period; double odd periods first".to_string(),
                ));
            }
            if (beta.norm() - 1.0).abs() > 1e-12 {
                return Err(OpucError::InvalidParameter(
                    "|beta| must be 1".to_string(),
                ));
            }
            let mut l = BlockFactor::identity(p);
            for j in (0..=p.saturating_sub(2)).step_by(2) {
                l.push_block((j, j + 1), theta(alphas.alpha(j)));
            }
            let mut m = BlockFactor::identity(p);
            for j in (1..p.saturating_sub(2)).step_by(2) {
                m.push_block((j, j + 1), theta(alphas.alpha(j)));
            }
            // wrapped Theta_{p-1} block on the index pair (p-1, 0)
            let a = alphas.alpha(p - 1);
            let rho = (1.0 - a.norm_sqr()).sqrt();
            m.push_block(
                (p - 1, 0),
                [
                    [a.conj(), rho * beta],
                    [rho / beta, -a],
                ],
            );
            Ok(CmvOperator {
                variant,
                dim: p,
                work_dim: p,
                slice_at: 0,
                lfac: l,
                mfac: m,
                dense: OnceLock::new(),
            })
        }
    }
}

/// Half-line factors on dim indices. `boundary` Some(eta) replaces the
/// straddling Theta block by the 1 x 1 unimodular entry conj(eta).
fn half_line_factors(
    alphas: &VerblunskySeq,
    dim: usize,
    boundary: Option<Complex64>,
) -> Result<(BlockFactor, BlockFactor)> {
    let mut l = BlockFactor::identity(dim);
    let mut m = BlockFactor::identity(dim);
    for j in 0.. {
        if j + 1 >= dim {
            break;
        }
        let block = theta(alphas.alpha(j));
        if j % 2 == 0 {
            l.push_block((j, j + 1), block);
        } else {
            m.push_block((j, j + 1), block);
        }
    }
    // the block Theta_{dim-1} straddles the edge
    if let Some(eta) = boundary {
        if (dim - 1) % 2 == 0 {
            l.push_scalar(dim - 1, eta.conj());
        } else {
            m.push_scalar(dim - 1, eta.conj());
        }
    }
    Ok((l, m))
}

fn window_factors(
    alphas: &VerblunskySeq,
    base: usize,
    dim: usize,
) -> Result<(BlockFactor, BlockFactor)> {
    let mut l = BlockFactor::identity(dim);
    let mut m = BlockFactor::identity(dim);
    for j in base.. {
        if j + 1 >= base + dim {
            break;
        }
        let block = theta(alphas.alpha(j));
        if j % 2 == 0 {
            l.push_block((j - base, j - base + 1), block);
        } else {
            m.push_block((j - base, j - base + 1), block);
        }
    }
    if base > 0 {
        // partial block entering from below the window: Theta_{base-1}
        let j = base - 1;
        let a = alphas.alpha(j);
        if j % 2 == 0 {
            l.push_scalar(0, -a);
        } else {
            m.push_scalar(0, -a);
        }
    }
    Ok((l, m))
}

/// sup over samples of |det(z - C^(n)) - Phi_n(z)| / max(1, |z|^n).
#[derive(Debug, Clone)]
pub struct CharPolyReport {
    pub sup_normalized: f64,
    pub per_sample: Vec<(Complex64, f64)>,
}

pub fn char_poly_check(
    alphas: &VerblunskySeq,
    n: usize,
    z_samples: &[Complex64],
) -> Result<CharPolyReport> {
    if n > 256 {
        return Err(OpucError::DimensionCap { dim: n, cap: 256 });
    }
    let op = build_cmv(alphas, n, CmvVariant::HalfLineTruncated)?;
    let polys = szego_polys(alphas, n)?;
    let phi = &polys.monic[n];
    let mut sup = 0.0f64;
    let mut per = Vec::with_capacity(z_samples.len());
    for &z in z_samples {
        let det = op.dense().scale(Complex64::new(-1.0, 0.0)).shift(z).det();
        let gap = (det - phi.eval(z)).norm() / z.norm().powi(n as i32).max(1.0);
        per.push((z, gap));
        sup = sup.max(gap);
    }
    Ok(CharPolyReport {
        sup_normalized: sup,
        per_sample: per,
    })
}

/// Schatten-p distance of two CMV operators against the Lemma bound with C = 6.
#[derive(Debug, Clone)]
pub struct SchattenReport {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn schatten_distance(
    alphas: &VerblunskySeq,
    betas: &VerblunskySeq,
    p: f64,
    truncation: usize,
) -> Result<SchattenReport> {
    if !(p >= 1.0) && !p.is_infinite() {
        return Err(OpucError::InvalidParameter(
            "Schatten index must be in [1, inf]".to_string(),
        ));
    }
    // the truncation must see every differing coefficient
    if let (Some(sa), Some(sb)) = (alphas.finite_support(), betas.finite_support()) {
        let need = sa.max(sb) + 2;
        if truncation < need {
            return Err(OpucError::TruncationTooSmall {
                given: truncation,
                required: need,
            });
        }
    }
    let ca = build_cmv(alphas, truncation, CmvVariant::HalfLineTruncated)?;
    let cb = build_cmv(betas, truncation, CmvVariant::HalfLineTruncated)?;
    let diff = ca.dense().sub(cb.dense());
    let lhs = schatten_norm(&diff, p);
    let rhs = if p.is_infinite() {
        6.0 * (0..truncation)
            .map(|j| {
                let da = (alphas.alpha(j) - betas.alpha(j)).norm();
                let dr = (alphas.rho(j) - betas.rho(j)).abs();
                da.max(dr)
            })
            .fold(0.0, f64::max)
    } else {
        let sum: f64 = (0..truncation)
            .map(|j| {
                (alphas.alpha(j) - betas.alpha(j)).norm().powf(p)
                    + (alphas.rho(j) - betas.rho(j)).abs().powf(p)
            })
            .sum();
        6.0 * sum.powf(1.0 / p)
    };
    Ok(SchattenReport { lhs, rhs })
}

/// Moment tables: zeros of Phi_n vs traces of truncated powers vs Cesaro means.
#[derive(Debug, Clone)]
pub struct CesaroReport {
    /// (1/n) sum of k-th powers of the zeros, k = 0..=k_max.
    pub zero_moments: Vec<Complex64>,
    /// Tr((C^(n))^k)/n.
    pub trace_moments: Vec<Complex64>,
    /// (1/n) sum_{j<n} (C^k)_{jj} for the untruncated operator.
    pub cesaro_moments: Vec<Complex64>,
    pub max_trace_zero_gap: f64,
}

pub fn zeros_vs_cesaro(alphas: &VerblunskySeq, n: usize, k_max: usize) -> Result<CesaroReport> {
    if n > 512 {
        return Err(OpucError::DimensionCap { dim: n, cap: 512 });
    }
    let op = build_cmv(alphas, n, CmvVariant::HalfLineTruncated)?;
    let zs = eig_dense(op.dense())?;
    let mut zero_moments = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let s: Complex64 = zs.iter().map(|z| z.powi(k as i32)).sum();
        zero_moments.push(s / n as f64);
    }
    let mut trace_moments = Vec::with_capacity(k_max + 1);
    let mut pw = DenseMatrix::identity(n)?;
    for k in 0..=k_max {
        if k > 0 {
            pw = pw.mul(op.dense());
        }
        let tr: Complex64 = (0..n).map(|i| pw[(i, i)]).sum();
        trace_moments.push(tr / n as f64);
    }
    // Cesaro means via diagonal entries of the infinite operator: locality
    // makes a truncation of n + 2k_max + 4 exact for the first n diagonals.
    let big = build_cmv(alphas, n + 2 * k_max + 4, CmvVariant::HalfLineTruncated)?;
    let mut cesaro_moments = Vec::with_capacity(k_max + 1);
    let mut pw = DenseMatrix::identity(big.dim())?;
    for k in 0..=k_max {
        if k > 0 {
            pw = pw.mul(big.dense());
        }
        let s: Complex64 = (0..n).map(|i| pw[(i, i)]).sum();
        cesaro_moments.push(s / n as f64);
    }
    let max_gap = zero_moments
        .iter()
        .zip(trace_moments.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(CesaroReport {
        zero_moments,
        trace_moments,
        cesaro_moments,
        max_trace_zero_gap: max_gap,
    })
}

/// Rank-two perturbation identity g = Lambda^{-1} g_0 on a 2-dim range.
#[derive(Debug, Clone)]
pub struct RankTwoReport {
    pub sup_discrepancy: f64,
    pub skipped: Vec<Complex64>,
}

pub fn rank_two_check(
    u: &DenseMatrix,
    p_idx: (usize, usize),
    lambda: [[Complex64; 2]; 2],
    z_samples: &[Complex64],
) -> Result<RankTwoReport> {
    let n = u.dim();
    let unit_defect = u.adjoint().mul(u).shift(Complex64::new(-1.0, 0.0)).max_abs();
    if unit_defect > 1e-10 {
        return Err(OpucError::InvalidParameter(format!(
            "U is not unitary: defect {unit_defect:.3e}"
        )));
    }
    let (i0, i1) = p_idx;
    if i0 >= n || i1 >= n || i0 == i1 {
        return Err(OpucError::InvalidParameter(
            "projection indices out of range".to_string(),
        ));
    }
    // V = U (1 - P) + U Lambda P: mix columns i0, i1 of U by Lambda
    let mut v = u.clone();
    for r in 0..n {
        let c0 = u[(r, i0)];
        let c1 = u[(r, i1)];
        v[(r, i0)] = c0 * lambda[0][0] + c1 * lambda[1][0];
        v[(r, i1)] = c0 * lambda[0][1] + c1 * lambda[1][1];
    }
    let compress = |w: &DenseMatrix, z: Complex64| -> Result<[[Complex64; 2]; 2]> {
        // G = P [(W + z)(W - z)^{-1}] P
        let wz = w.shift(-z);
        let wpz = w.shift(z);
        let x = wz.solve(&wpz)?;
        Ok([
            [x[(i0, i0)], x[(i0, i1)]],
            [x[(i1, i0)], x[(i1, i1)]],
        ])
    };
    let two_inv = |m: [[Complex64; 2]; 2]| -> Option<[[Complex64; 2]; 2]> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() < 1e-13 {
            return None;
        }
        Some([
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ])
    };
    let mul2 = |a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]| {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    };
    let lambda_inv = [
        [lambda[0][0].conj(), lambda[1][0].conj()],
        [lambda[0][1].conj(), lambda[1][1].conj()],
    ];
    let mut sup = 0.0f64;
    let mut skipped = Vec::new();
    for &z in z_samples {
        let g_big = compress(&v, z)?;
        let g0_big = compress(u, z)?;
        // g = z^{-1} (1 + G)^{-1} (G - 1)
        let solve_small = |gm: [[Complex64; 2]; 2]| -> Option<[[Complex64; 2]; 2]> {
            let one = Complex64::new(1.0, 0.0);
            let plus = [[gm[0][0] + one, gm[0][1]], [gm[1][0], gm[1][1] + one]];
            let minus = [[gm[0][0] - one, gm[0][1]], [gm[1][0], gm[1][1] - one]];
            let inv = two_inv(plus)?;
            let mut g = mul2(inv, minus);
            for row in g.iter_mut() {
                for e in row.iter_mut() {
                    *e /= z;
                }
            }
            Some(g)
        };
        match (solve_small(g_big), solve_small(g0_big)) {
            (Some(g), Some(g0)) => {
                let pred = mul2(lambda_inv, g0);
                let mut d = 0.0f64;
                for i in 0..2 {
                    for j in 0..2 {
                        d += (g[i][j] - pred[i][j]).norm_sqr();
                    }
                }
                sup = sup.max(d.sqrt());
            }
            _ => skipped.push(z),
        }
    }
    Ok(RankTwoReport {
        sup_discrepancy: sup,
        skipped,
    })
}

/// Cauchy differences ||C^n C_0^{-n} v - C^{n+gap} C_0^{-(n+gap)} v|| for
/// n = 1..=n_max. A trend diagnostic, not a proof of wave-operator existence.
pub fn wave_operator_diag(
    alphas: &VerblunskySeq,
    n_max: usize,
    gap: usize,
    v: &[Complex64],
    truncation: usize,
) -> Result<Vec<f64>> {
    if truncation < 4 * (n_max + gap) {
        return Err(OpucError::TruncationTooSmall {
            given: truncation,
            required: 4 * (n_max + gap),
        });
    }
    let dim = truncation.next_multiple_of(2);
    let c = build_cmv(alphas, dim - 4, CmvVariant::HalfLineTruncated)?;
    let c0 = build_cmv(&VerblunskySeq::zeros(), dim - 4, CmvVariant::HalfLineTruncated)?;
    let mut padded = v.to_vec();
    padded.resize(dim, Complex64::new(0.0, 0.0));
    let wave_at = |n: usize| -> Vec<Complex64> {
        let mut w = padded.clone();
        for _ in 0..n {
            w = c0.matvec_inv(&w);
        }
        for _ in 0..n {
            w = c.matvec(&w);
        }
        w
    };
    let mut out = Vec::with_capacity(n_max);
    let mut current = wave_at(1);
    for n in 1..=n_max {
        let next = wave_at(n + gap);
        let d: f64 = current
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        out.push(d);
        if n < n_max {
            current = wave_at(n + 1);
        }
    }
    Ok(out)
}

/// One-sided trial-function test: a negative value certifies spectrum inside
/// (theta0 - eps, theta0 + eps); a nonnegative value proves nothing.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub violated: bool,
    pub witness: Option<usize>,
    pub min_value: f64,
    pub values: Vec<f64>,
}

pub fn gap_certificate(
    alphas: &VerblunskySeq,
    theta0: f64,
    eps: f64,
    trials: &[Vec<Complex64>],
) -> Result<GapCertificate> {
    let max_support = trials.iter().map(|v| v.len()).max().unwrap_or(0);
    let dim = (max_support + 8).next_multiple_of(2);
    let c = build_cmv(alphas, dim - 4, CmvVariant::HalfLineTruncated)?;
    let z0 = Complex64::from_polar(1.0, theta0);
    let sin_half = (eps / 2.0).sin();
    let mut values = Vec::with_capacity(trials.len());
    let mut min_value = f64::INFINITY;
    let mut witness = None;
    for (idx, psi) in trials.iter().enumerate() {
        let mut v = psi.clone();
        v.resize(dim, Complex64::new(0.0, 0.0));
        let cv = c.matvec(&v);
        let norm_sq: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let inner: Complex64 = v
            .iter()
            .zip(cv.iter())
            .map(|(a, b)| a.conj() * (z0 * a - b))
            .sum();
        let value = (inner / z0).re - 2.0 * sin_half * sin_half * norm_sq;
        if value < min_value {
            min_value = value;
            if value < 0.0 {
                witness = Some(idx);
            }
        }
        values.push(value);
    }
    Ok(GapCertificate {
        violated: min_value < 0.0,
        witness,
        min_value,
        values,
    })
}
