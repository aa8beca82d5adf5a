//! Heterodyne tomography cross-check: calibrate shot noise against LO
//! power, map quadrature pairs onto the phase-space grid, and compare the
//! reconstructed Husimi function with the vacuum-state prediction.
//!
//! Run: `cargo run --example husimi_demo`

use bhdkit::tomography::{
    calibrate_shot_noise, compare_husimi, generate_heterodyne_stream, normalize_quadratures,
    reconstruct_husimi, theoretical_vacuum_husimi, GridSpec, HeterodyneModel,
};

fn main() -> bhdkit::Result<()> {
    // Floor set 1% of the 1 mW shot variance: visible to the calibration
    // fit, small enough to keep the normalized quadratures near vacuum.
    let model = HeterodyneModel {
        shot_variance_per_watt: 2.4,
        electronic_variance: 2.4e-5,
        sample_rate: 1.0e9,
        rng_seed: 5,
    };

    // Variance-vs-power sweep; the slope is the shot-noise gain, the
    // intercept the electronic floor.
    let powers: Vec<f64> = (1..=9).map(|k| k as f64 * 0.2e-3).collect();
    let sweep = powers
        .iter()
        .map(|&p| generate_heterodyne_stream(&model, p, 200_000))
        .collect::<bhdkit::Result<Vec<_>>>()?;
    let cal = calibrate_shot_noise(&sweep)?;
    println!("calibration over {:.1}-{:.1} mW:", powers[0] * 1e3, powers.last().unwrap() * 1e3);
    println!(
        "  p axis: slope {:.4} V^2/W (model {:.4}), r^2 {:.6}",
        cal.p.slope, model.shot_variance_per_watt, cal.p.r_squared
    );
    println!(
        "  q axis: slope {:.4} V^2/W, intercept {:.2e} V^2 (floor {:.2e})\n",
        cal.q.slope, cal.q.intercept, model.electronic_variance
    );

    // Vacuum probe at 1 mW, normalized so pure shot noise has per-axis
    // variance 1/2 in the alpha plane.
    let probe = generate_heterodyne_stream(&model, 1e-3, 1_000_000)?;
    let alpha = normalize_quadratures(&probe, &cal.p, 1e-3)?;
    let var_p = alpha.points.iter().map(|a| a.0 * a.0).sum::<f64>() / alpha.points.len() as f64;
    let var_q = alpha.points.iter().map(|a| a.1 * a.1).sum::<f64>() / alpha.points.len() as f64;
    println!("normalized quadrature variances: ({var_p:.4}, {var_q:.4}), ideal 0.5 each");

    let grid = GridSpec::default();
    let rec = reconstruct_husimi(&alpha.points, &grid)?;
    let theory = theoretical_vacuum_husimi(&grid)?;
    let overlap = compare_husimi(&rec.grid, &theory)?;

    println!("grid: {}x{} cells over [{}, {}]^2", grid.n_re, grid.n_im, grid.re_min, grid.re_max);
    println!("in-grid fraction {:.4}, peak density {:.4} (1/pi = {:.4})", rec.in_grid_fraction, rec.grid.max_density(), 1.0 / std::f64::consts::PI);
    println!("overlap with the vacuum prediction: {overlap:.4}\n");

    // Coarse contour map of the reconstruction, one row per 8 grid rows.
    let peak = rec.grid.max_density();
    for i_im in (0..grid.n_im).step_by(8) {
        let row: String = (0..grid.n_re)
            .step_by(2)
            .map(|i_re| shade(rec.grid.value(i_re, i_im) / peak))
            .collect();
        println!("  {row}");
    }
    println!("\nAn electronic-noise-free vacuum state would reproduce Q(alpha) =");
    println!("exp(-|alpha|^2)/pi; excess area in the blob is classical noise.");
    Ok(())
}

fn shade(x: f64) -> char {
    match x {
        x if x > 0.75 => '#',
        x if x > 0.40 => '+',
        x if x > 0.10 => '.',
        _ => ' ',
    }
}
