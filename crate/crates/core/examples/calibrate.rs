//! Prints the statistics behind the frozen acceptance bands.
//!
//! cargo run --release --example calibrate

use std::time::Instant;

use ffdist::analysis::{moments, ratio_report, row_pair, tv_scaling_study};
use ffdist::Mode;

fn main() -> ffdist::Result<()> {
    let t = Instant::now();
    for q in [2u64, 3, 5] {
        for n in [100usize, 300, 1000, 3000] {
            let k_max = (1.5 * (n as f64).ln()).floor() as usize;
            let rows = ratio_report(q, n, Some(k_max), None)?;
            let sup = rows.iter().filter_map(|r| r.normalized).fold(0.0, f64::max);
            let k_star = (n as f64).ln().round() as usize + 1;
            let res = rows[k_star - 1].residual.unwrap_or(f64::NAN);
            println!("normalized q={q} n={n} sup={sup:.4} residual(k*={k_star})={res:.4e}");
        }
    }
    eprintln!("ratio grid {:?}", t.elapsed());
    let t = Instant::now();
    let reports = tv_scaling_study(&[2, 3, 5, 7, 9], &[100, 1000, 10_000], Some(Mode::Float))?;
    for r in &reports {
        let s = r.s1 + r.s2 + r.s3;
        println!(
            "tv q={} n={} d_tv={:.4e} scaled={:.4} s1/s={:.4} s2/s1={:.4} s3/s1={:.4}",
            r.q, r.n, r.d_tv, r.scaled, r.s1 / s, r.s2 / r.s1, r.s3 / r.s1
        );
    }
    eprintln!("tv grid {:?}", t.elapsed());
    for q in [2u64, 5] {
        for n in [1000usize, 10_000] {
            let (omega, cycles) = row_pair(q, n, Some(Mode::Float), 1)?.to_f64();
            let (a, b) = (moments(&omega), moments(&cycles));
            let l = (n as f64).ln();
            println!(
                "moments q={q} n={n} omega: mean-L={:.4} var-L={:.4}  cycles: mean-L={:.4} var-L={:.4}",
                a.mean - l, a.variance - l, b.mean - l, b.variance - l
            );
        }
    }
    Ok(())
}
