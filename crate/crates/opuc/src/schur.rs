//! The Schur algorithm and its transforms: Schur <-> Caratheodory, moments,
//! coefficient recovery from moments, and the Geronimus / Khrushchev identities.

use crate::error::{OpucError, Result};
use crate::measures::{measure_from_alphas, CircleMeasure};
use crate::numerics::{series, CircleGrid};
use crate::szego::{szego_polys, VerblunskySeq};
use num_complex::Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Threshold past which f(0) counts as unimodular (finite Blaschke tail).
pub const TERMINAL_TOL: f64 = 1e-12;

/// A Schur function: either exactly rational (finite parameter list, zero
/// tail) or held through Taylor data extracted from a measure.
#[derive(Debug, Clone)]
pub enum SchurFunction {
    Rational { gammas: Vec<Complex64> },
    Taylor { coeffs: Vec<Complex64> },
}

impl SchurFunction {
    pub fn zero() -> Self {
        SchurFunction::Rational { gammas: vec![] }
    }

    pub fn from_gammas(gammas: Vec<Complex64>) -> Self {
        SchurFunction::Rational { gammas }
    }

    pub fn from_taylor(coeffs: Vec<Complex64>) -> Self {
        SchurFunction::Taylor { coeffs }
    }

    /// Taylor coefficient s_0 = f(0).
    pub fn at_zero(&self) -> Complex64 {
        match self {
            SchurFunction::Rational { gammas } => {
                gammas.first().copied().unwrap_or(Complex64::new(0.0, 0.0))
            }
            SchurFunction::Taylor { coeffs } => {
                coeffs.first().copied().unwrap_or(Complex64::new(0.0, 0.0))
            }
        }
    }

    /// Evaluate on the open disk (rational form is exact; Taylor truncates).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            SchurFunction::Rational { gammas } => schur_from_gammas(gammas, z),
            SchurFunction::Taylor { coeffs } => series::eval(coeffs, z),
        }
    }

    pub fn taylor(&self, len: usize) -> Vec<Complex64> {
        match self {
            SchurFunction::Rational { gammas } => taylor_from_gammas(gammas, len),
            SchurFunction::Taylor { coeffs } => {
                let mut c = coeffs.clone();
                c.resize(len, Complex64::new(0.0, 0.0));
                c
            }
        }
    }
}

/// Result of one Schur step.
#[derive(Debug, Clone)]
pub enum SchurStep {
    Continue { gamma: Complex64, next: SchurFunction },
    /// |f(0)| = 1: the algorithm terminates (finite Blaschke case).
    Terminal { gamma: Complex64 },
}

/// gamma_0 = f(0), f_1(z) = (f - gamma_0) / (z (1 - conj(gamma_0) f)).
pub fn schur_step(f: &SchurFunction) -> SchurStep {
    let gamma = f.at_zero();
    if gamma.norm() >= 1.0 - TERMINAL_TOL {
        return SchurStep::Terminal { gamma };
    }
    match f {
        SchurFunction::Rational { gammas } => {
            let next = if gammas.is_empty() {
                vec![]
            } else {
                gammas[1..].to_vec()
            };
            SchurStep::Continue {
                gamma,
                next: SchurFunction::Rational { gammas: next },
            }
        }
        SchurFunction::Taylor { coeffs } => {
            let len = coeffs.len().saturating_sub(1).max(1);
            // numerator (f - gamma)/z, denominator 1 - conj(gamma) f
            let num: Vec<Complex64> = coeffs.iter().skip(1).copied().collect();
            let mut den: Vec<Complex64> = coeffs.iter().map(|c| -gamma.conj() * c).collect();
            if den.is_empty() {
                den.push(Complex64::new(0.0, 0.0));
            }
            den[0] += ONE;
            let next = series::div(&num, &den, len);
            SchurStep::Continue {
                gamma,
                next: SchurFunction::Taylor { coeffs: next },
            }
        }
    }
}

/// First n Schur parameters; stops early on a terminal step.
pub fn schur_params(f: &SchurFunction, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut cur = f.clone();
    for _ in 0..n {
        match schur_step(&cur) {
            SchurStep::Continue { gamma, next } => {
                out.push(gamma);
                cur = next;
            }
            SchurStep::Terminal { gamma } => {
                out.push(gamma);
                break;
            }
        }
    }
    out
}

/// Backward continued-fraction evaluation with zero tail: f_N = 0,
/// f_k = (gamma_k + z f_{k+1}) / (1 + conj(gamma_k) z f_{k+1}).
pub fn schur_from_gammas(gammas: &[Complex64], z: Complex64) -> Complex64 {
    let mut f = Complex64::new(0.0, 0.0);
    for &g in gammas.iter().rev() {
        f = (g + z * f) / (ONE + g.conj() * z * f);
    }
    f
}

/// Taylor coefficients of the rational Schur function with the given
/// parameters and zero tail.
pub fn taylor_from_gammas(gammas: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut f = vec![Complex64::new(0.0, 0.0); len];
    for &g in gammas.iter().rev() {
        // f <- (g + z f) / (1 + conj(g) z f)
        let mut zf = vec![Complex64::new(0.0, 0.0); len];
        for k in 1..len {
            zf[k] = f[k - 1];
        }
        let mut num = zf.clone();
        num[0] += g;
        let mut den: Vec<Complex64> = zf.iter().map(|c| g.conj() * c).collect();
        den[0] += ONE;
        f = series::div(&num, &den, len);
    }
    f
}

/// F = (1 + z f) / (1 - z f).
pub fn caratheodory_from_schur(f: Complex64, z: Complex64) -> Complex64 {
    (ONE + z * f) / (ONE - z * f)
}

/// f = (F - 1) / (z (F + 1)); z = 0 must be handled from Taylor data.
pub fn schur_from_caratheodory(big_f: Complex64, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(OpucError::Domain(
            "z = 0: recover f(0) from Taylor data (f(0) = F'(0)/2)".to_string(),
        ));
    }
    Ok((big_f - ONE) / (z * (big_f + ONE)))
}

/// Taylor data of f from Taylor data of F (F = 1 + 2 sum c_n z^n form).
pub fn schur_taylor_from_caratheodory_taylor(big_f: &[Complex64], len: usize) -> Vec<Complex64> {
    // f = ((F - 1)/z) / (F + 1)
    let num: Vec<Complex64> = big_f.iter().skip(1).copied().collect();
    let mut den = big_f.to_vec();
    den[0] += ONE;
    series::div(&num, &den, len)
}

/// Moment list c_0..c_N with c_n = integral e^{-i n theta} d mu.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentList {
    pub c: Vec<Complex64>,
}

impl MomentList {
    pub fn order(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// Caratheodory Taylor data 1 + 2 sum_{n>=1} c_n z^n.
    pub fn caratheodory_taylor(&self) -> Vec<Complex64> {
        let mut out = vec![ONE];
        out.extend(self.c.iter().skip(1).map(|c| 2.0 * c));
        out
    }
}

/// Grid quadrature plus exact atom contributions.
pub fn moments(measure: &CircleMeasure, n_max: usize) -> Result<MomentList> {
    let mut c = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        c.push(measure.integrate_fn(|z| z.powi(-(n as i32))));
    }
    if (c[0] - ONE).norm() > 1e-12 {
        return Err(OpucError::Unnormalized { total: c[0].re });
    }
    c[0] = ONE;
    Ok(MomentList { c })
}

/// Levinson-style recovery: run the Szego recursion with inner products taken
/// against the moment list, reading alpha_n = -conj(Phi_{n+1}(0)) at each step.
pub fn alphas_from_moments(moments: &MomentList) -> Result<Vec<Complex64>> {
    let n_alphas = moments.order();
    let c = &moments.c;
    let conj_c = |k: i64| -> Complex64 {
        if k >= 0 {
            c[k as usize].conj()
        } else {
            c[(-k) as usize]
        }
    };
    let mut phi = vec![ONE];
    let mut phi_star = vec![ONE];
    let mut norm_sq = 1.0f64;
    let mut alphas = Vec::with_capacity(n_alphas);
    for n in 0..n_alphas {
        // <1, z Phi_n> = sum_k Phi_{n,k} conj(c_{k+1})
        let inner: Complex64 = phi
            .iter()
            .enumerate()
            .map(|(k, &p)| p * conj_c(k as i64 + 1))
            .sum();
        let alpha = inner.conj() / norm_sq;
        let margin = 1.0 - alpha.norm_sqr();
        if margin <= 1e-10 {
            return Err(OpucError::TrivialMeasure { order: n });
        }
        // Phi_{n+1} = z Phi_n - conj(alpha) Phi_n*; Phi*_{n+1} = Phi_n* - alpha z Phi_n
        let mut next = vec![Complex64::new(0.0, 0.0); n + 2];
        let mut next_star = vec![Complex64::new(0.0, 0.0); n + 2];
        for (k, &p) in phi.iter().enumerate() {
            next[k + 1] += p;
            next_star[k + 1] -= alpha * p;
        }
        for (k, &q) in phi_star.iter().enumerate() {
            next[k] -= alpha.conj() * q;
            next_star[k] += q;
        }
        phi = next;
        phi_star = next_star;
        norm_sq *= margin;
        alphas.push(alpha);
    }
    Ok(alphas)
}

/// Geronimus identity harness: Schur parameters of the Schur function built
/// from the measure equal the Verblunsky coefficients.
#[derive(Debug, Clone)]
pub struct GeronimusReport {
    pub gammas: Vec<Complex64>,
    pub max_deviation: f64,
}

pub fn geronimus_report(
    alphas: &VerblunskySeq,
    n: usize,
    grid: CircleGrid,
) -> Result<GeronimusReport> {
    if n > 32 {
        return Err(OpucError::InvalidParameter(format!(
            "Geronimus harness is quadrature-limited to n <= 32, got {n}"
        )));
    }
    let order = n + 2;
    let measure = measure_from_alphas(alphas, order, grid)?;
    let moms = moments(&measure, order)?;
    let f_taylor =
        schur_taylor_from_caratheodory_taylor(&moms.caratheodory_taylor(), order);
    let f = SchurFunction::from_taylor(f_taylor);
    let gammas = schur_params(&f, n);
    let max_deviation = gammas
        .iter()
        .enumerate()
        .map(|(j, g)| (g - alphas.alpha(j)).norm())
        .fold(0.0, f64::max);
    Ok(GeronimusReport {
        gammas,
        max_deviation,
    })
}

/// Khrushchev formula check: the Schur function of |phi_n|^2 d mu against
/// phi_n (phi_n*)^{-1} f(z; shifted coefficients), for finitely supported
/// sequences (both routes then independent: quadrature vs exact rational).
pub fn khrushchev_check(
    alphas: &VerblunskySeq,
    n: usize,
    z_samples: &[Complex64],
    grid: CircleGrid,
) -> Result<f64> {
    if n > 16 {
        return Err(OpucError::InvalidParameter(format!(
            "Khrushchev harness limited to n <= 16, got {n}"
        )));
    }
    let support = alphas.finite_support().ok_or_else(|| {
        OpucError::InvalidParameter("Khrushchev check needs a finitely supported sequence".into())
    })?;
    let order = support.max(n).max(1);
    let mu = measure_from_alphas(alphas, order, grid)?;
    let polys = szego_polys(alphas, order.max(n))?;
    let phi_n = &polys.orthonormal[n];
    // weight of |phi_n|^2 d mu on the grid
    let weight: Vec<f64> = grid
        .points()
        .zip(mu.weight().iter())
        .map(|(z, &w)| phi_n.eval(z).norm_sqr() * w)
        .collect();
    let sigma = CircleMeasure::new(grid, weight, vec![])?;
    let shifted: Vec<Complex64> = alphas.materialize(order).into_iter().skip(n).collect();
    let mut sup = 0.0f64;
    for &z in z_samples {
        if z.norm() >= 0.999 {
            return Err(OpucError::Domain("samples must lie inside the disk".into()));
        }
        let big_f = sigma.integrate_fn(|w| (w + z) / (w - z));
        let lhs = schur_from_caratheodory(big_f, z)?;
        let rhs = phi_n.eval(z) / polys.orthonormal_star[n].eval(z)
            * schur_from_gammas(&shifted, z);
        sup = sup.max((lhs - rhs).norm());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_alphas;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    #[test]
    fn schur_step_trivial_cases() {
        // f = 0
        match schur_step(&SchurFunction::zero()) {
            SchurStep::Continue { gamma, next } => {
                assert_eq!(gamma, Complex64::new(0.0, 0.0));
                assert!(next.at_zero().norm() == 0.0);
            }
            _ => panic!("zero function must not terminate"),
        }
        // constant c: gamma = c, f_1 = 0
        let c = Complex64::new(0.3, -0.2);
        let f = SchurFunction::from_gammas(vec![c]);
        match schur_step(&f) {
            SchurStep::Continue { gamma, next } => {
                assert_eq!(gamma, c);
                assert!(next.eval(Complex64::new(0.4, 0.1)).norm() < 1e-15);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn schur_step_terminal_for_shift() {
        // f = z: gamma_0 = 0, f_1 = 1 terminal
        let f = SchurFunction::from_taylor(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        match schur_step(&f) {
            SchurStep::Continue { gamma, next } => {
                assert_eq!(gamma, Complex64::new(0.0, 0.0));
                match schur_step(&next) {
                    SchurStep::Terminal { gamma } => {
                        assert!((gamma - Complex64::new(1.0, 0.0)).norm() < 1e-14)
                    }
                    _ => panic!("expected terminal step"),
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn gammas_round_trip_through_taylor() {
        let gammas = vec![
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.3, 0.25),
            Complex64::new(0.1, -0.6),
        ];
        let taylor = taylor_from_gammas(&gammas, 12);
        let recovered = schur_params(&SchurFunction::from_taylor(taylor), 3);
        for (a, b) in gammas.iter().zip(recovered.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rational_evaluation_matches_taylor() {
        let gammas = vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0 / 3.0)];
        let taylor = taylor_from_gammas(&gammas, 64);
        for k in 0..6 {
            let z = Complex64::from_polar(0.4, 1.1 * k as f64);
            let exact = schur_from_gammas(&gammas, z);
            let approx = series::eval(&taylor, z);
            assert!((exact - approx).norm() < 1e-12);
            assert!(exact.norm() < 1.0);
        }
    }

    #[test]
    fn caratheodory_round_trip() {
        let f = Complex64::new(0.5, 0.0);
        let z = Complex64::new(0.5, 0.0);
        let big_f = caratheodory_from_schur(f, z);
        assert_abs_diff_eq!(big_f.re, 5.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(big_f.im, 0.0, epsilon = 1e-15);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let z = Complex64::from_polar(rng.gen_range(0.05..0.9), rng.gen_range(0.0..2.0 * PI));
            let f = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..2.0 * PI));
            let big_f = caratheodory_from_schur(f, z);
            assert!(big_f.re > 0.0);
            let back = schur_from_caratheodory(big_f, z).unwrap();
            assert!((back - f).norm() <= 1e-12);
        }
    }

    #[test]
    fn moments_of_lebesgue() {
        let grid = CircleGrid::new(256).unwrap();
        let m = CircleMeasure::lebesgue(grid);
        let c = moments(&m, 5).unwrap();
        assert_eq!(c.c[0], Complex64::new(1.0, 0.0));
        for n in 1..=5 {
            assert!(c.c[n].norm() < 1e-13);
        }
    }

    // Oracle from the inner-product chain at n = 0: c_1 of the order-1
    // Bernstein-Szego measure equals alpha_0 = 1/2.
    #[test]
    fn first_moment_of_bernstein_szego() {
        let grid = CircleGrid::new(4096).unwrap();
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let m = measure_from_alphas(&seq, 1, grid).unwrap();
        let c = moments(&m, 3).unwrap();
        assert_abs_diff_eq!(c.c[1].re, 0.5, epsilon = 1e-12);
        assert!(c.c[1].im.abs() < 1e-12);
    }

    #[test]
    fn alphas_from_trivial_moments() {
        let c = MomentList {
            c: vec![Complex64::new(1.0, 0.0); 1]
                .into_iter()
                .chain(std::iter::repeat(Complex64::new(0.0, 0.0)).take(6))
                .collect(),
        };
        let a = alphas_from_moments(&c).unwrap();
        for x in a {
            assert!(x.norm() < 1e-14);
        }
    }

    #[test]
    fn moment_round_trip_single_coefficient() {
        let grid = CircleGrid::new(4096).unwrap();
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let m = measure_from_alphas(&seq, 3, grid).unwrap();
        let c = moments(&m, 4).unwrap();
        let a = alphas_from_moments(&c).unwrap();
        assert!((a[0] - Complex64::new(0.5, 0.0)).norm() <= 1e-9);
        for x in &a[1..] {
            assert!(x.norm() <= 1e-9);
        }
    }

    #[test]
    fn moment_round_trip_random_length_eight() {
        let grid = CircleGrid::new(4096).unwrap();
        let seq = random_alphas(22, 8, 0.8);
        let m = measure_from_alphas(&seq, 8, grid).unwrap();
        let c = moments(&m, 8).unwrap();
        let a = alphas_from_moments(&c).unwrap();
        let max_err = a
            .iter()
            .enumerate()
            .map(|(j, x)| (x - seq.alpha(j)).norm())
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-8, "round trip error {max_err}");
    }

    #[test]
    fn degenerate_moments_rejected() {
        // single atom at 1: c_n = 1 for all n -> trivial measure detected
        let c = MomentList {
            c: vec![Complex64::new(1.0, 0.0); 5],
        };
        assert!(matches!(
            alphas_from_moments(&c),
            Err(OpucError::TrivialMeasure { .. })
        ));
    }

    #[test]
    fn geronimus_trivial_and_fixed() {
        let grid = CircleGrid::new(4096).unwrap();
        let r = geronimus_report(&VerblunskySeq::zeros(), 4, grid).unwrap();
        assert!(r.max_deviation < 1e-12);

        let seq = VerblunskySeq::from_real_prefix(&[0.5, 1.0 / 3.0, -0.25]).unwrap();
        let r = geronimus_report(&seq, 3, grid).unwrap();
        assert!(r.max_deviation <= 1e-6, "deviation {}", r.max_deviation);
    }

    #[test]
    fn geronimus_random_length_eight() {
        let grid = CircleGrid::new(4096).unwrap();
        let seq = random_alphas(22, 8, 0.8);
        let r = geronimus_report(&seq, 8, grid).unwrap();
        assert!(r.max_deviation <= 1e-6, "deviation {}", r.max_deviation);
    }

    // Structure of the Taylor law: c_n - prod_{j<=n-2}(1-|gamma_j|^2) gamma_{n-1}
    // does not depend on gamma_{n-1}.
    #[test]
    fn taylor_leading_order_independence() {
        let base = vec![Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.3)];
        let n = 3; // c_3 depends on gamma_2 at leading order
        let prefactor: f64 = base.iter().map(|g| 1.0 - g.norm_sqr()).product();
        let c_n_of = |g_last: Complex64| -> Complex64 {
            let mut gammas = base.clone();
            gammas.push(g_last);
            let f = taylor_from_gammas(&gammas, n + 2);
            // F = 1 + 2 sum (z f)^k: c_n = s_{n-1}(f) + polynomial in lower s
            // compute c_n directly from f's Taylor data through F
            let mut big_f = vec![Complex64::new(0.0, 0.0); n + 2];
            big_f[0] = ONE;
            let mut zf = vec![Complex64::new(0.0, 0.0); n + 2];
            for k in 1..n + 2 {
                zf[k] = f[k - 1];
            }
            let mut pow = zf.clone();
            for _ in 0..n + 1 {
                for (k, &p) in pow.iter().enumerate() {
                    big_f[k] += 2.0 * p;
                }
                pow = series::mul(&pow, &zf, n + 2);
            }
            big_f[n] / 2.0
        };
        let g1 = Complex64::new(0.5, 0.0);
        let g2 = Complex64::new(-0.1, 0.35);
        let r1 = c_n_of(g1) - prefactor * g1;
        let r2 = c_n_of(g2) - prefactor * g2;
        assert!(
            (r1 - r2).norm() < 1e-12,
            "residual depends on gamma_{{n-1}}: {r1} vs {r2}"
        );
    }

    #[test]
    fn khrushchev_trivial_case() {
        let grid = CircleGrid::new(4096).unwrap();
        let zs = vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
        let sup = khrushchev_check(&VerblunskySeq::zeros(), 2, &zs, grid).unwrap();
        assert!(sup < 1e-12);
    }

    #[test]
    fn khrushchev_single_and_random() {
        let grid = CircleGrid::new(4096).unwrap();
        let zs: Vec<Complex64> = (0..8)
            .map(|k| Complex64::from_polar(0.5, 2.0 * PI * k as f64 / 8.0))
            .collect();
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let sup = khrushchev_check(&seq, 1, &zs, grid).unwrap();
        assert!(sup <= 1e-6, "discrepancy {sup}");

        let seq = random_alphas(99, 6, 0.7);
        let sup = khrushchev_check(&seq, 2, &zs, grid).unwrap();
        assert!(sup <= 1e-6, "discrepancy {sup}");
    }

    // Quadrature inner product <1, z Phi_n> vs conj(alpha_n) ||Phi_n||^2.
    #[test]
    fn inner_product_identity() {
        let grid = CircleGrid::new(4096).unwrap();
        let seq = random_alphas(7, 6, 0.8);
        let order = 6;
        let mu = measure_from_alphas(&seq, order, grid).unwrap();
        let polys = szego_polys(&seq, order).unwrap();
        for n in 0..order {
            let phi_n = &polys.monic[n];
            let inner = mu.integrate_fn(|z| z * phi_n.eval(z));
            let expect = seq.alpha(n).conj() * polys.norms_sq[n];
            assert!(
                (inner - expect).norm() <= 1e-8,
                "n={n}: {inner} vs {expect}"
            );
        }
    }
}
