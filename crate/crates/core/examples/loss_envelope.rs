//! Piecewise-linear outer approximation of quadratic line losses.

use sssc_expansion::losses::{envelope_value, fit_segments};

fn main() -> sssc_expansion::Result<()> {
    let (r, limit) = (0.02, 1.0);
    for segments in [1, 2, 3, 6] {
        let env = fit_segments(r, limit, segments, None)?;
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let f = -limit + 2.0 * limit * i as f64 / 200.0;
            worst = worst.max(envelope_value(&env, f)? - r * f * f);
        }
        println!("{segments} segment(s): max overestimate {worst:.5} pu");
        if segments == 3 {
            for s in &env.segments {
                println!("    [{:+.3}, {:+.3}]  l >= {:+.5} f {:+.5}", s.lo, s.hi, s.alpha, s.beta);
            }
        }
    }
    Ok(())
}
