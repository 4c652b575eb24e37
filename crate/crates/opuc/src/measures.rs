//! Probability measures on the circle: grid-sampled a.c. weight plus atoms,
//! Bernstein-Szego approximants, the entropy/Gibbs functional, both sum rules,
//! and the relative Szego function.

use crate::error::{OpucError, Result};
use crate::numerics::CircleGrid;
use crate::schur;
use crate::szego::{szego_polys, VerblunskySeq};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const MASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub mass: f64,
}

/// w(theta) sampled on a CircleGrid (density against d theta / 2 pi) plus a
/// finite list of atoms. Total mass must be 1.
#[derive(Debug, Clone)]
pub struct CircleMeasure {
    grid: CircleGrid,
    weight: Vec<f64>,
    atoms: Vec<Atom>,
}

impl CircleMeasure {
    pub fn new(grid: CircleGrid, weight: Vec<f64>, atoms: Vec<Atom>) -> Result<Self> {
        if weight.len() != grid.len() {
            return Err(OpucError::InvalidParameter(format!(
                "weight has {} samples for a {}-point grid",
                weight.len(),
                grid.len()
            )));
        }
        if weight.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(OpucError::InvalidParameter(
                "weight samples must be finite and nonnegative".to_string(),
            ));
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.mass < 0.0 {
                return Err(OpucError::InvalidParameter(
                    "atom masses must be nonnegative".to_string(),
                ));
            }
            for b in atoms.iter().skip(i + 1) {
                if (a.theta - b.theta).abs() < 1e-14 {
                    return Err(OpucError::InvalidParameter(
                        "atom angles must be distinct".to_string(),
                    ));
                }
            }
        }
        let m = CircleMeasure {
            grid,
            weight,
            atoms,
        };
        let total = m.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(OpucError::Unnormalized { total });
        }
        Ok(m)
    }

    /// d theta / 2 pi.
    pub fn lebesgue(grid: CircleGrid) -> Self {
        CircleMeasure {
            weight: vec![1.0; grid.len()],
            grid,
            atoms: vec![],
        }
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.grid.mean(&self.weight) + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// integral of f d mu for grid-sampled f; atoms interpolate f linearly.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.grid.len());
        let ac = self.grid.mean(
            &f.iter()
                .zip(self.weight.iter())
                .map(|(a, w)| a * w)
                .collect::<Vec<_>>(),
        );
        let atom_part: f64 = self
            .atoms
            .iter()
            .map(|a| a.mass * interp_periodic(&self.grid, f, a.theta))
            .sum();
        ac + atom_part
    }

    /// integral of g(e^{i theta}) d mu with g given in closed form (exact on atoms).
    pub fn integrate_fn(&self, mut g: impl FnMut(Complex64) -> Complex64) -> Complex64 {
        let samples: Vec<Complex64> = self
            .grid
            .points()
            .zip(self.weight.iter())
            .map(|(z, &w)| g(z) * w)
            .collect();
        let ac = self.grid.mean_complex(&samples);
        let atom_part: Complex64 = self
            .atoms
            .iter()
            .map(|a| g(Complex64::from_polar(1.0, a.theta)) * a.mass)
            .sum();
        ac + atom_part
    }
}

fn interp_periodic(grid: &CircleGrid, f: &[f64], theta: f64) -> f64 {
    let n = grid.len() as f64;
    let t = theta.rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI) * n;
    let j = t.floor() as usize % grid.len();
    let frac = t - t.floor();
    let j1 = (j + 1) % grid.len();
    f[j] * (1.0 - frac) + f[j1] * frac
}

/// JSON form of the measure schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub grid_size: usize,
    pub weight: Vec<f64>,
    pub atoms: Vec<Atom>,
}

impl CircleMeasure {
    pub fn to_json(&self) -> MeasureJson {
        MeasureJson {
            grid_size: self.grid.len(),
            weight: self.weight.clone(),
            atoms: self.atoms.clone(),
        }
    }

    pub fn from_json(j: MeasureJson) -> Result<Self> {
        let grid = CircleGrid::new(j.grid_size)?;
        CircleMeasure::new(grid, j.weight, j.atoms)
    }
}

/// Bernstein-Szego approximant: w = 1/|phi_n|^2, no atoms. Its Verblunsky
/// coefficients are (alpha_0..alpha_{n-1}, 0, 0, ...).
pub fn measure_from_alphas(
    alphas: &VerblunskySeq,
    n: usize,
    grid: CircleGrid,
) -> Result<CircleMeasure> {
    if n > 64 {
        return Err(OpucError::InvalidParameter(format!(
            "Bernstein-Szego order {n} exceeds 64"
        )));
    }
    let polys = szego_polys(alphas, n)?;
    let phi = &polys.orthonormal[n];
    let weight: Vec<f64> = grid.points().map(|z| 1.0 / phi.eval(z).norm_sqr()).collect();
    CircleMeasure::new(grid, weight, vec![])
}

/// Entropy integral log w d theta / 2 pi; -inf when w vanishes on the grid.
pub fn entropy(measure: &CircleMeasure) -> f64 {
    if measure.weight().iter().any(|&w| w <= 0.0) {
        return f64::NEG_INFINITY;
    }
    let logs: Vec<f64> = measure.weight().iter().map(|&w| w.ln()).collect();
    measure.grid().mean(&logs)
}

/// Gibbs variational functional: integral f d mu - 1 - integral log f d theta/2pi.
/// Its infimum over positive continuous f is the entropy.
pub fn gibbs_functional(measure: &CircleMeasure, f: &[f64]) -> Result<f64> {
    if f.len() != measure.grid().len() {
        return Err(OpucError::InvalidParameter(
            "test function sample count mismatch".to_string(),
        ));
    }
    if f.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(OpucError::InvalidParameter(
            "test function must be strictly positive".to_string(),
        ));
    }
    let first = measure.integrate(f);
    let logs: Vec<f64> = f.iter().map(|&x| x.ln()).collect();
    let second = measure.grid().mean(&logs);
    Ok(first - 1.0 - second)
}

/// Both sides of the finite-order Szego sum rule.
#[derive(Debug, Clone, Serialize)]
pub struct SumRuleReport {
    /// prod_{j<n} (1 - |alpha_j|^2)
    pub coefficient_side: f64,
    /// exp(entropy of the order-n Bernstein-Szego approximant)
    pub entropy_side: f64,
    pub ratio: f64,
}

pub fn sum_rule_report(alphas: &VerblunskySeq, n: usize, grid: CircleGrid) -> Result<SumRuleReport> {
    if n > 64 {
        return Err(OpucError::InvalidParameter(format!("order {n} exceeds 64")));
    }
    let prod: f64 = (0..n).map(|j| 1.0 - alphas.alpha(j).norm_sqr()).product();
    let bs = measure_from_alphas(alphas, n, grid)?;
    let right = entropy(&bs).exp();
    Ok(SumRuleReport {
        coefficient_side: prod,
        entropy_side: right,
        ratio: prod / right,
    })
}

/// Higher-order sum rule report. `printed_left` is the left side exactly as
/// the source formula prints it (with +1/2 sum |alpha_{j+1}-alpha_j|^2 in the
/// exponent); `validated_left` flips that term's sign, which is the form the
/// brute-force quadrature oracle confirms. The two differ by the factor
/// exp(sum |alpha_{j+1}-alpha_j|^2).
#[derive(Debug, Clone, Serialize)]
pub struct HigherSumRuleReport {
    pub printed_left: f64,
    pub validated_left: f64,
    /// exp( integral (1 - cos theta) log w d theta / 2 pi ) by quadrature.
    pub right: f64,
    pub printed_ratio: f64,
    pub validated_ratio: f64,
    pub discrepancy_factor: f64,
    pub sum_sq_differences: f64,
}

pub fn higher_sum_rule_report(
    alphas: &VerblunskySeq,
    n: usize,
    grid: CircleGrid,
) -> Result<HigherSumRuleReport> {
    if n > 64 {
        return Err(OpucError::InvalidParameter(format!("order {n} exceeds 64")));
    }
    let a: Vec<Complex64> = alphas.materialize(n + 1);
    let a0 = a[0];
    let sum_diff_sq: f64 = (0..n).map(|j| (a[j + 1] - a[j]).norm_sqr()).sum();
    let base: f64 = (0..n)
        .map(|j| (1.0 - a[j].norm_sqr()) * a[j].norm_sqr().exp())
        .product();
    let printed_left = (-0.5 * a0.norm_sqr() - a0.re + 0.5 * sum_diff_sq).exp() * base;
    let validated_left = (-0.5 * a0.norm_sqr() - a0.re - 0.5 * sum_diff_sq).exp() * base;
    let bs = measure_from_alphas(alphas, n, grid)?;
    if bs.weight().iter().any(|&w| w <= 0.0) {
        return Err(OpucError::SzegoConditionFailure);
    }
    let integrand: Vec<f64> = grid
        .thetas()
        .zip(bs.weight().iter())
        .map(|(t, &w)| (1.0 - t.cos()) * w.ln())
        .collect();
    let right = grid.mean(&integrand).exp();
    Ok(HigherSumRuleReport {
        printed_left,
        validated_left,
        right,
        printed_ratio: printed_left / right,
        validated_ratio: validated_left / right,
        discrepancy_factor: printed_left / validated_left,
        sum_sq_differences: sum_diff_sq,
    })
}

/// Relative Szego function value and its two checkable characterizations.
#[derive(Debug, Clone)]
pub struct RelativeSzegoReport {
    pub value: Complex64,
    /// sup over the grid of | |delta_0 D(e^{i theta})|^2 - w/w_1 | on {w_1 > 1e-8}.
    pub boundary_sup_gap: f64,
    /// |phi*_{n-1}(z; d mu_1)/phi*_n(z; d mu) - delta_0 D(z)| for n = 1..
    pub tail_deltas: Vec<f64>,
}

/// (delta_0 D)(z) = (1 - conj(alpha_0) f(z))/rho_0 * (1 - z f_1(z))/(1 - z f(z)),
/// with f, f_1 the Schur functions of the sequence and its shift.
pub fn relative_szego_value(alphas: &VerblunskySeq, z: Complex64, order: usize) -> Complex64 {
    let gammas = alphas.materialize(order);
    let shifted: Vec<Complex64> = gammas.iter().skip(1).copied().collect();
    let f = schur::schur_from_gammas(&gammas, z);
    let f1 = schur::schur_from_gammas(&shifted, z);
    let a0 = alphas.alpha(0);
    let rho0 = (1.0 - a0.norm_sqr()).sqrt();
    (Complex64::new(1.0, 0.0) - a0.conj() * f) / rho0 * (Complex64::new(1.0, 0.0) - z * f1)
        / (Complex64::new(1.0, 0.0) - z * f)
}

/// Full relative-Szego report for a finitely supported sequence.
pub fn relative_szego(
    alphas: &VerblunskySeq,
    z: Complex64,
    grid: CircleGrid,
    tail_orders: usize,
) -> Result<RelativeSzegoReport> {
    let support = alphas.finite_support().ok_or_else(|| {
        OpucError::InvalidParameter(
            "relative Szego report needs a finitely supported sequence".to_string(),
        )
    })?;
    let order = support.max(1);
    let value = relative_szego_value(alphas, z, order);

    // boundary: |delta_0 D|^2 = w/w_1 with w, w_1 the Bernstein-Szego weights
    let mu = measure_from_alphas(alphas, order, grid)?;
    let shifted = alphas.shifted(1);
    let mu1 = measure_from_alphas(&shifted, order.saturating_sub(1).max(1), grid)?;
    let mut sup = 0.0f64;
    for (j, zb) in grid.points().enumerate() {
        let w1 = mu1.weight()[j];
        if w1 <= 1e-8 {
            continue;
        }
        let d = relative_szego_value(alphas, zb, order);
        let gap = (d.norm_sqr() - mu.weight()[j] / w1).abs();
        sup = sup.max(gap);
    }

    // tail: phi*_{n-1}(z; d mu_1)/phi*_n(z; d mu) -> delta_0 D(z)
    let n_max = tail_orders.max(2);
    let polys = szego_polys(alphas, n_max)?;
    let polys1 = szego_polys(&shifted, n_max)?;
    let tail_deltas: Vec<f64> = (1..=n_max)
        .map(|n| {
            let ratio = polys1.orthonormal_star[n - 1].eval(z) / polys.orthonormal_star[n].eval(z);
            (ratio - value).norm()
        })
        .collect();
    Ok(RelativeSzegoReport {
        value,
        boundary_sup_gap: sup,
        tail_deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid() -> CircleGrid {
        CircleGrid::new(4096).unwrap()
    }

    #[test]
    fn lebesgue_measure_entropy_zero() {
        let m = CircleMeasure::lebesgue(grid());
        assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(entropy(&m), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn free_bernstein_szego_is_lebesgue() {
        let m = measure_from_alphas(&VerblunskySeq::zeros(), 3, grid()).unwrap();
        for &w in m.weight() {
            assert_abs_diff_eq!(w, 1.0, epsilon = 1e-13);
        }
    }

    // phi_1* closed form: w(theta) = (3/4)/|1 - e^{i theta}/2|^2 for alpha = (1/2).
    #[test]
    fn bernstein_szego_order_one_closed_form() {
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let g = grid();
        let m = measure_from_alphas(&seq, 1, g).unwrap();
        for (j, z) in g.points().enumerate() {
            let expect = 0.75 / (Complex64::new(1.0, 0.0) - z * 0.5).norm_sqr();
            assert_abs_diff_eq!(m.weight()[j], expect, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(m.total_mass(), 1.0, epsilon = 1e-12);
    }

    // mean of log|1 - c e^{i theta}|^2 is 0 for |c| < 1, so the entropy is log(3/4).
    #[test]
    fn entropy_of_bernstein_szego_half() {
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let m = measure_from_alphas(&seq, 1, grid()).unwrap();
        assert_abs_diff_eq!(entropy(&m), 0.75f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn entropy_minus_infinity_on_vanishing_arc() {
        let g = grid();
        let n = g.len();
        let mut w = vec![0.0; n];
        // supported on half the circle, normalized
        for (j, x) in w.iter_mut().enumerate() {
            if j < n / 2 {
                *x = 2.0;
            }
        }
        let m = CircleMeasure::new(g, w, vec![]).unwrap();
        assert!(entropy(&m) == f64::NEG_INFINITY);
    }

    #[test]
    fn gibbs_at_one_is_zero_and_dominates_entropy() {
        let g = grid();
        let seq = VerblunskySeq::from_real_prefix(&[0.5, -0.3]).unwrap();
        let m = measure_from_alphas(&seq, 2, g).unwrap();
        let ones = vec![1.0; g.len()];
        let v = gibbs_functional(&m, &ones).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        assert!(v >= entropy(&m) - 1e-6);
    }

    #[test]
    fn gibbs_exp_cos_positive() {
        let g = grid();
        let m = CircleMeasure::lebesgue(g);
        let f: Vec<f64> = g.thetas().map(|t| t.cos().exp()).collect();
        let v = gibbs_functional(&m, &f).unwrap();
        // integral e^{cos} d theta/2pi - 1 = I_0(1) - 1 > 0
        assert!(v > 0.0);
        assert_abs_diff_eq!(v, 1.2660658777520084 - 1.0, epsilon = 1e-10);
    }

    #[test]
    fn gibbs_infimum_attained_at_inverse_weight() {
        let g = grid();
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let m = measure_from_alphas(&seq, 1, g).unwrap();
        let f: Vec<f64> = m.weight().iter().map(|&w| 1.0 / w).collect();
        let v = gibbs_functional(&m, &f).unwrap();
        assert!((v - entropy(&m)).abs() <= 1e-6);
    }

    #[test]
    fn sum_rule_trivial_and_half() {
        let g = grid();
        let r = sum_rule_report(&VerblunskySeq::zeros(), 4, g).unwrap();
        assert_abs_diff_eq!(r.coefficient_side, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.entropy_side, 1.0, epsilon = 1e-12);

        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        for n in [1usize, 2, 3] {
            let r = sum_rule_report(&seq, n, g).unwrap();
            assert_abs_diff_eq!(r.coefficient_side, 0.75, epsilon = 1e-13);
            assert_abs_diff_eq!(r.entropy_side, 0.75, epsilon = 1e-10);
        }
    }

    #[test]
    fn sum_rule_random_sequences() {
        let g = grid();
        let seq = crate::testutil::random_alphas(77, 8, 0.8);
        let r = sum_rule_report(&seq, 8, g).unwrap();
        assert!(
            (r.ratio - 1.0).abs() <= 1e-8,
            "sum rule ratio off: {}",
            r.ratio
        );
    }

    // Fourier expansion oracle: for alpha = (a, 0, ...),
    // integral (1 - cos) log w = log(1 - a^2) - a.
    #[test]
    fn higher_sum_rule_single_coefficient() {
        let g = CircleGrid::new(8192).unwrap();
        let a = 0.5;
        let seq = VerblunskySeq::from_real_prefix(&[a]).unwrap();
        let r = higher_sum_rule_report(&seq, 4, g).unwrap();
        let expect_right = (1.0 - a * a) * (-a).exp();
        assert_abs_diff_eq!(r.right, expect_right, epsilon = 1e-10);
        // the validated form matches; the printed form misses by e^{a^2}
        assert!((r.validated_ratio - 1.0).abs() <= 1e-10);
        assert_abs_diff_eq!(r.discrepancy_factor, (a * a).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.printed_left, 0.75 * (-0.25f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn relative_szego_free_is_one() {
        let v = relative_szego_value(&VerblunskySeq::zeros(), Complex64::new(0.3, 0.2), 1);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    // alpha = (1/2, 0, ...): delta_0 D = rho_0 / (1 - z/2) since D_1 = 1.
    #[test]
    fn relative_szego_single_coefficient_closed_form() {
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let rho0 = 0.75f64.sqrt();
        for k in 0..10 {
            let z = Complex64::from_polar(0.08 * (k as f64 + 1.0), 0.7 * k as f64);
            let v = relative_szego_value(&seq, z, 1);
            let expect = rho0 / (Complex64::new(1.0, 0.0) - z * 0.5);
            assert!((v - expect).norm() < 1e-13, "z={z} v={v} expect={expect}");
        }
    }

    #[test]
    fn relative_szego_boundary_and_tail() {
        let g = grid();
        let seq = VerblunskySeq::from_real_prefix(&[0.5, -0.25, 0.125]).unwrap();
        let z = Complex64::new(0.35, 0.1);
        let r = relative_szego(&seq, z, g, 12).unwrap();
        assert!(r.boundary_sup_gap <= 1e-9, "gap {}", r.boundary_sup_gap);
        // tail ratios converge: by the end the delta is tiny and decreasing
        assert!(r.tail_deltas[11] < 1e-10);
        assert!(r.tail_deltas[11] <= r.tail_deltas[2]);
        // nonvanishing on the sampled disk
        for k in 0..20 {
            let zz = Complex64::from_polar(0.95 * (k as f64 + 1.0) / 20.0, 0.31 * k as f64);
            assert!(relative_szego_value(&seq, zz, 3).norm() > 1e-6);
        }
    }

    // Corollary check: nu = mu shifted by k = 1, finitely supported; the norm
    // ratio limit equals exp(integral log(w_1/w)).
    #[test]
    fn norm_ratio_corollary() {
        let g = grid();
        let seq = VerblunskySeq::from_real_prefix(&[0.6, 0.3, -0.2]).unwrap();
        let shifted = seq.shifted(1);
        let mu = measure_from_alphas(&seq, 3, g).unwrap();
        let nu = measure_from_alphas(&shifted, 2, g).unwrap();
        // limit of ||Phi_n(d nu)||^2 / ||Phi_{n+1}(d mu)||^2 over n >= support
        let norms_mu = crate::szego::norms(&seq, 9).unwrap();
        let norms_nu = crate::szego::norms(&shifted, 8).unwrap();
        let lhs = norms_nu[8] / norms_mu[9];
        let integrand: Vec<f64> = nu
            .weight()
            .iter()
            .zip(mu.weight().iter())
            .map(|(&x, &w)| (x / w).ln())
            .collect();
        let rhs = g.mean(&integrand).exp();
        assert!((lhs - rhs).abs() <= 1e-6, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn measure_json_round_trip() {
        let g = CircleGrid::new(16).unwrap();
        let m = CircleMeasure::new(
            g,
            vec![0.5; 16],
            vec![Atom {
                theta: 1.0,
                mass: 0.5,
            }],
        )
        .unwrap();
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back = CircleMeasure::from_json(serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back.weight(), m.weight());
        assert_eq!(back.atoms().len(), 1);
    }

    #[test]
    fn unnormalized_rejected() {
        let g = CircleGrid::new(16).unwrap();
        assert!(matches!(
            CircleMeasure::new(g, vec![0.9; 16], vec![]),
            Err(OpucError::Unnormalized { .. })
        ));
    }

    #[test]
    fn atom_moments_exact() {
        // single atom at theta = 0, mass 1: every moment is 1 (degenerate, test only)
        let g = CircleGrid::new(16).unwrap();
        let m = CircleMeasure::new(
            g,
            vec![0.0; 16],
            vec![Atom {
                theta: 0.0,
                mass: 1.0,
            }],
        )
        .unwrap();
        for n in 0..4 {
            let c = m.integrate_fn(|z| z.powi(-n));
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        let _ = PI;
    }
}
