//! How much more power a three-bus loop delivers as an SSSC on the weak
//! line grows.

use sssc_expansion::fixtures::triangle;
use sssc_expansion::lp::MicroLp;
use sssc_expansion::sssc::{max_transfer_with_sssc, recover_physical};

fn main() -> sssc_expansion::Result<()> {
    let net = triangle();
    let l13 = net.ac_lines.iter().position(|l| l.id == "L13").unwrap();
    println!("   Q [pu]   P max [pu]   q_tilde [pu]   x_eff L13 [pu]");
    for step in 0..=6 {
        let q = 0.05 * step as f64;
        let mut ratings = vec![0.0; net.ac_lines.len()];
        ratings[l13] = q;
        let res = max_transfer_with_sssc(&net, "b1", "b3", &ratings, None, &MicroLp)?;
        let line = &net.ac_lines[l13];
        let op = recover_physical(res.q_tilde_pu[l13], res.flows_pu[l13], line.f0 / line.base_mva, line.x0_pu);
        let x_eff = op.effective_x_pu.map_or("-".to_string(), |x| format!("{x:.3}"));
        println!("   {q:6.2}   {:10.4}   {:12.4}   {x_eff:>14}", res.p_max_pu, res.q_tilde_pu[l13]);
    }
    Ok(())
}
