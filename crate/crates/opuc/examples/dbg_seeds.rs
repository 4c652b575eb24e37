use num_complex::Complex64;
use opuc::measures::measure_from_alphas;
use opuc::numerics::CircleGrid;
use opuc::szego::{norms, VerblunskySeq};
use opuc::szegofn::szego_d;

fn main() {
    let grid = CircleGrid::new(4096).unwrap();
    let a = 0.5f64;
    let len = 40usize;
    let seq = VerblunskySeq::from_prefix(
        (0..len).map(|j| Complex64::new(a.powi(j as i32 + 1), 0.0)).collect(),
    )
    .unwrap();
    let m = measure_from_alphas(&seq, len.min(64), grid).unwrap();
    let d = szego_d(&m, 512).unwrap();
    let tl = 160usize;
    let d1 = d.d_taylor(tl);
    let dm1 = d.d_inv_taylor(tl);
    let kappa = d.at_zero();
    let ns = norms(&seq, len + 1).unwrap();
    println!("n  alpha_n      v_spec        v_kappa2      v_exact");
    for n in 2..26 {
        let alpha = seq.alpha(n);
        // spec-printed: alpha_n + sum_{j>=n} d_{j,-1} conj(d_{j-n,1})
        let mut t_spec = Complex64::new(0.0, 0.0);
        for j in n..tl {
            t_spec += dm1[j] * d1[j - n].conj();
        }
        // shifted sum T_{n+1}
        let mut t_shift = Complex64::new(0.0, 0.0);
        for j in 0..tl - n - 1 {
            t_shift += dm1[j + n + 1] * d1[j].conj();
        }
        let v_spec = (alpha + t_spec).norm();
        let v_kappa2 = (alpha + kappa * kappa * t_shift).norm();
        let prefac = ns[n + 1].sqrt() / kappa;
        let v_exact = (alpha + prefac * t_shift).norm();
        println!(
            "{n:2} {:.3e}  {:.3e}  {:.3e}  {:.3e}",
            alpha.norm(), v_spec, v_kappa2, v_exact
        );
    }
}
