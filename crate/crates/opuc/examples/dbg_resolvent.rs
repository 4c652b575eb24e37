use num_complex::Complex64;
use opuc::cmv::{build_cmv, resolvent::resolvent_rows, CmvVariant};
use opuc::szego::VerblunskySeq;

fn main() {
    let seq = VerblunskySeq::from_real_prefix(&[0.5]).unwrap();
    let z = Complex64::new(0.3, 0.2);
    let rows = 24;
    let op = build_cmv(&seq, 64, CmvVariant::HalfLineTruncated).unwrap();
    for l in [0usize, 1, 2] {
        let col = resolvent_rows(&seq, z, l, rows).unwrap();
        let mut padded = col.clone();
        padded.resize(op.work_dim(), Complex64::new(0.0, 0.0));
        let applied = op.matvec(&padded);
        println!("column {l}: per-row residual of (C - z) G = I");
        for k in 0..10 {
            let mut r = applied[k] - z * padded[k];
            if k == l {
                r -= Complex64::new(1.0, 0.0);
            }
            if r.norm() > 1e-10 {
                println!("  row {k}: residual {:+.3e} {:+.3e}i", r.re, r.im);
            }
        }
    }
}
