//! Shot-noise-limited SNR for the candidate photodiodes, then the noise
//! budget after each candidate amplifier cascade (two identical stages).
//!
//! Run: `cargo run --example detector_snr`

use bhdkit::detector::{catalog, cascade_noise_figure, detector_output_snr, shot_noise_limited_snr, Environment};
use bhdkit::Mode;

fn main() -> bhdkit::Result<()> {
    let env = Environment::default();
    println!(
        "Operating point: {:.0} K, {:.2} mW on the diode\n",
        env.temperature,
        env.optical_power * 1e3
    );

    println!("Photodiode shot-noise-limited SNR:");
    let mut best = None::<(String, f64)>;
    for pd in catalog::photodiodes() {
        let snr = shot_noise_limited_snr(&pd, &env)?;
        println!("  {:<10} {:6.2} dB  ({:.2} GHz bandwidth)", pd.label, snr, pd.bandwidth / 1e9);
        if best.as_ref().is_none_or(|(_, s)| snr > *s) {
            best = Some((pd.label.clone(), snr));
        }
    }
    let (pd_label, input_snr) = best.unwrap();
    println!("  -> {pd_label} wins on dark current and shunt resistance\n");

    println!("Two-stage amplifier cascades driven by the {pd_label} front end:");
    println!("  {:<10} {:>8} {:>10} {:>12} {:>12}", "stage", "gain", "stage NF", "cascade NF", "output SNR");
    for amp in catalog::amplifiers() {
        let nf = cascade_noise_figure(&amp, &amp, Mode::Standard)?;
        let out = detector_output_snr(input_snr, nf, Mode::Standard);
        println!(
            "  {:<10} {:>6.1} dB {:>7.2} dB {:>9.2} dB {:>9.2} dB",
            amp.label, amp.gain_db, amp.noise_figure_db, nf, out
        );
    }
    println!("\nFriis: the first stage dominates, so the lowest-NF part wins");
    println!("even though it has the least gain.\n");

    // The same chains under the paper-literal convention, which runs the
    // cascade formula on dB values directly and divides the dB-valued SNR
    // by the linear noise factor. See the detector module docs.
    println!("Paper-literal convention for comparison:");
    let input_rounded = bhdkit::round_db(input_snr);
    for amp in catalog::amplifiers() {
        let nf = bhdkit::round_db(cascade_noise_figure(&amp, &amp, Mode::PaperLiteral)?);
        let out = detector_output_snr(input_rounded, nf, Mode::PaperLiteral);
        println!("  {:<10} cascade NF {:.2} dB -> output SNR {:>5.2} dB", amp.label, nf, out);
    }
    Ok(())
}
