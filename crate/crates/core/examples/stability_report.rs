//! Rollett K-factor and mu-factor screening of two-port networks.
//!
//! Shows a matched attenuator (unconditionally stable, K > 1) next to an
//! L-match ladder that sits exactly on the K = 1 stability boundary.
//!
//! Run: `cargo run --example stability_report`

use bhdkit::rf::{
    evaluate_chain, sample_match_problem, sample_match_solution, stability_factors,
    FrequencySweep, TwoPortNetwork,
};

fn main() -> bhdkit::Result<()> {
    let sweep = FrequencySweep::linspace(0.5e9, 1.5e9, 11)?;

    // Half-power pad: S11 = S22 = 0, |S21| = 1/sqrt(2).
    let pad = TwoPortNetwork::matched_attenuator(10.0 * 2f64.log10(), sweep.clone(), 50.0)?;
    let report = stability_factors(&pad);
    println!("3 dB matched pad:");
    println!("  {:<12} {:>8} {:>10} {:>10}", "freq", "K", "mu_source", "mu_load");
    for r in report.records.iter().step_by(5) {
        println!(
            "  {:>7.2} GHz {:>8.4} {:>10.4} {:>10.4}",
            r.frequency_hz / 1e9,
            r.k_factor,
            r.mu_source,
            r.mu_load
        );
    }
    println!("  unconditionally stable everywhere: {}\n", report.stable_everywhere);

    // The bundled L-match at its exact solution.
    let (l, c) = sample_match_solution();
    let (topology, _, _) = sample_match_problem(l, c)?;
    let ladder = evaluate_chain(&topology, &sweep, 50.0)?;
    let report = stability_factors(&ladder);
    let k_mid = report.records[5].k_factor;
    println!("L-match ladder at its analytic solution:");
    println!("  K at band center = {k_mid:.6} (boundary value)");
    println!("  unconditionally stable everywhere: {}", report.stable_everywhere);
    println!();
    println!("A lone series impedance has K = 1 identically, and lossless L/C");
    println!("sections cannot move K, so the ladder sits on the boundary and the");
    println!("screen refuses to call it unconditionally stable. The pad clears it");
    println!("because its loss sits between shunt paths at both ports.");
    Ok(())
}
