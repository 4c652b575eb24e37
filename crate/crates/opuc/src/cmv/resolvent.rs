//! Closed-form resolvent entries of the half-line CMV operator for z in the
//! disk, built from the CMV and alternate CMV bases of the first- and
//! second-kind polynomials and the Caratheodory function.

use super::{build_cmv, CmvVariant};
use crate::error::{OpucError, Result};
use crate::szego::{orthonormal_values, szego_polys, VerblunskySeq};
use num_complex::Complex64;

/// Everything the entry formula needs at a fixed z.
///
/// chi/x are the CMV and alternate CMV basis values. p and pi are the Weyl
/// combinations y + F x and Upsilon + F chi. Their building blocks
/// u_n = psi_n + F phi_n and v_n = F phi*_n - psi*_n decay while phi, psi
/// grow, so forming them by subtraction loses every digit past the support;
/// instead v_n = 0 and u_n = 2 z^n prod(rho) / Phi_L*(z) hold exactly for
/// n >= L (finite support L), and a backward transfer step recovers n < L.
struct BasisValues {
    chi: Vec<Complex64>,
    x: Vec<Complex64>,
    p: Vec<Complex64>,
    pi: Vec<Complex64>,
}

fn basis_values(alphas: &VerblunskySeq, z: Complex64, len: usize) -> Result<BasisValues> {
    let support = alphas.finite_support().ok_or_else(|| {
        OpucError::InvalidParameter(
            "resolvent formula route needs a finitely supported sequence".to_string(),
        )
    })?;
    let n_max = len + 1;
    let (phi, phi_star) = orthonormal_values(alphas, n_max, z)?;

    // decaying Weyl pair (u_n, v_n), exact past the support
    let polys = szego_polys(alphas, support)?;
    let rho_prod = polys.norms_sq[support].sqrt();
    let phi_l_star = polys.monic_star[support].eval(z);
    let u_tail = |n: usize| 2.0 * z.powi(n as i32) * rho_prod / phi_l_star;
    let mut u = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut v = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for (n, un) in u.iter_mut().enumerate().skip(support) {
        *un = u_tail(n);
    }
    for n in (0..support).rev() {
        // (u_n, v_n) = (z rho_n)^{-1} [[1, conj(a)], [a z, z]] (u_{n+1}, v_{n+1})
        let a = alphas.alpha(n);
        let rho = (1.0 - a.norm_sqr()).sqrt();
        let scale = 1.0 / (z * rho);
        u[n] = scale * (u[n + 1] + a.conj() * v[n + 1]);
        v[n] = scale * (a * z * u[n + 1] + z * v[n + 1]);
    }

    let mut chi = Vec::with_capacity(len);
    let mut x = Vec::with_capacity(len);
    let mut p = Vec::with_capacity(len);
    let mut pi = Vec::with_capacity(len);
    for m in 0..len {
        if m % 2 == 0 {
            let t = (m / 2) as i32;
            let zpow = z.powi(-t);
            chi.push(zpow * phi_star[m]);
            x.push(zpow * phi[m]);
            p.push(zpow * u[m]);
            pi.push(zpow * v[m]);
        } else {
            let t = ((m + 1) / 2) as i32;
            // chi and pi carry z^{-t+1}; x and p carry z^{-t}
            let z_hi = z.powi(1 - t);
            let z_lo = z.powi(-t);
            chi.push(z_hi * phi[m]);
            x.push(z_lo * phi_star[m]);
            p.push(z_lo * v[m]);
            pi.push(z_hi * u[m]);
        }
    }
    Ok(BasisValues { chi, x, p, pi })
}

/// [(C - z)^{-1}]_{k,l} for a finitely supported sequence and 0 < |z| < 1.
pub fn resolvent_entry(
    alphas: &VerblunskySeq,
    z: Complex64,
    k: usize,
    l: usize,
) -> Result<Complex64> {
    let col = resolvent_rows(alphas, z, l, k.max(l) + 1)?;
    Ok(col[k])
}

/// Column l of the resolvent, rows 0..rows.
pub fn resolvent_rows(
    alphas: &VerblunskySeq,
    z: Complex64,
    l: usize,
    rows: usize,
) -> Result<Vec<Complex64>> {
    if z.norm() == 0.0 {
        return Err(OpucError::Domain("resolvent formula excludes z = 0".to_string()));
    }
    if z.norm() >= 1.0 {
        return Err(OpucError::Domain("resolvent formula needs |z| < 1".to_string()));
    }
    if rows.max(l + 1) > 65 {
        return Err(OpucError::InvalidParameter(
            "resolvent indices limited to <= 64".to_string(),
        ));
    }
    let len = rows.max(l + 1);
    let b = basis_values(alphas, z, len)?;
    let half = 1.0 / (2.0 * z);
    let mut out = Vec::with_capacity(rows);
    for k in 0..rows {
        let value = if k > l || (k == l && k % 2 == 1) {
            half * b.chi[l] * b.p[k]
        } else {
            half * b.pi[l] * b.x[k]
        };
        out.push(value);
    }
    Ok(out)
}

/// || ((C - z) G - 1) e_l || over interior rows of a truncation: the oracle
/// that the closed form really inverts the operator.
pub fn resolvent_residual(
    alphas: &VerblunskySeq,
    z: Complex64,
    l: usize,
    truncation: usize,
) -> Result<f64> {
    let rows = truncation.min(64);
    let col = resolvent_rows(alphas, z, l, rows)?;
    let op = build_cmv(alphas, truncation, CmvVariant::HalfLineTruncated)?;
    let mut padded = col.clone();
    padded.resize(op.work_dim(), Complex64::new(0.0, 0.0));
    let applied = op.matvec(&padded);
    let mut err = 0.0f64;
    for k in 0..rows.saturating_sub(2) {
        let mut r = applied[k] - z * padded[k];
        if k == l {
            r -= Complex64::new(1.0, 0.0);
        }
        err += r.norm_sqr();
    }
    Ok(err.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::{caratheodory_from_schur, schur_from_gammas};
    use crate::szego::VerblunskySeq;

    // Contour-integral oracles for the free case:
    // G_00 = 0 (residues at 0 and z cancel), G_01 = 1 (single residue at z).
    #[test]
    fn free_closed_forms() {
        let free = VerblunskySeq::zeros();
        let z = Complex64::new(0.3, 0.2);
        let g00 = resolvent_entry(&free, z, 0, 0).unwrap();
        assert!(g00.norm() <= 1e-12, "G_00 = {g00}");
        let g01 = resolvent_entry(&free, z, 0, 1).unwrap();
        assert!((g01 - Complex64::new(1.0, 0.0)).norm() <= 1e-12, "G_01 = {g01}");
        // permutation-walk values: G_21 = z, G_41 = z^2, G_20 = 1, G_40 = z
        assert!((resolvent_entry(&free, z, 2, 1).unwrap() - z).norm() < 1e-12);
        assert!((resolvent_entry(&free, z, 4, 1).unwrap() - z * z).norm() < 1e-12);
        assert!(
            (resolvent_entry(&free, z, 2, 0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12
        );
        assert!((resolvent_entry(&free, z, 4, 0).unwrap() - z).norm() < 1e-12);
        // odd diagonal vanishes for the free case
        assert!(resolvent_entry(&free, z, 1, 1).unwrap().norm() < 1e-12);
    }

    // The Weyl combinations used internally agree with the direct (unstable)
    // subtraction at small index, where cancellation is mild.
    #[test]
    fn weyl_pair_matches_direct_combination_at_small_index() {
        let seq = VerblunskySeq::from_prefix(vec![
            Complex64::new(0.4, 0.2),
            Complex64::new(-0.1, 0.3),
        ])
        .unwrap();
        let z = Complex64::new(0.45, -0.15);
        let gammas = seq.materialize(2);
        let f = schur_from_gammas(&gammas, z);
        let big_f = caratheodory_from_schur(f, z);
        let (phi, phi_star) = orthonormal_values(&seq, 6, z).unwrap();
        let flipped =
            VerblunskySeq::from_prefix(gammas.iter().map(|a| -a).collect()).unwrap();
        let (psi, psi_star) = orthonormal_values(&flipped, 6, z).unwrap();
        let b = basis_values(&seq, z, 6).unwrap();
        for m in 0..6 {
            let (direct_p, direct_pi) = if m % 2 == 0 {
                let t = (m / 2) as i32;
                (
                    z.powi(-t) * (psi[m] + big_f * phi[m]),
                    z.powi(-t) * (big_f * phi_star[m] - psi_star[m]),
                )
            } else {
                let t = ((m + 1) / 2) as i32;
                (
                    z.powi(-t) * (big_f * phi_star[m] - psi_star[m]),
                    z.powi(1 - t) * (psi[m] + big_f * phi[m]),
                )
            };
            assert!(
                (b.p[m] - direct_p).norm() < 1e-10,
                "p[{m}]: {} vs {}",
                b.p[m],
                direct_p
            );
            assert!(
                (b.pi[m] - direct_pi).norm() < 1e-10,
                "pi[{m}]: {} vs {}",
                b.pi[m],
                direct_pi
            );
        }
    }

    #[test]
    fn residual_free_case_columns() {
        let free = VerblunskySeq::zeros();
        let z = Complex64::new(0.3, 0.2);
        for l in [0usize, 1, 3, 6] {
            let r = resolvent_residual(&free, z, l, 64).unwrap();
            assert!(r <= 1e-10, "column {l}: residual {r}");
        }
    }

    #[test]
    fn residual_single_coefficient() {
        let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
        let z = Complex64::new(0.3, 0.2);
        for l in [0usize, 1, 2, 5] {
            let r = resolvent_residual(&seq, z, l, 256).unwrap();
            assert!(r <= 1e-8, "column {l}: residual {r}");
        }
    }

    #[test]
    fn residual_random_support_three() {
        let seq = VerblunskySeq::from_prefix(vec![
            Complex64::new(0.4, 0.2),
            Complex64::new(-0.1, 0.3),
            Complex64::new(0.2, -0.5),
        ])
        .unwrap();
        let z = Complex64::new(-0.25, 0.35);
        for l in [0usize, 2, 4] {
            let r = resolvent_residual(&seq, z, l, 128).unwrap();
            assert!(r <= 1e-8, "column {l}: residual {r}");
        }
    }

    #[test]
    fn zero_rejected() {
        let free = VerblunskySeq::zeros();
        assert!(matches!(
            resolvent_entry(&free, Complex64::new(0.0, 0.0), 0, 0),
            Err(OpucError::Domain(_))
        ));
    }
}
