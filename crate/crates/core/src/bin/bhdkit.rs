//! Subcommand front end over the library: every operation the examples
//! demonstrate, runnable from scripts. Each subcommand writes a JSON
//! report wrapping its payload in the config digest / mode / seed
//! envelope, CSVs for plottable series, and a `run_meta.json` carrying
//! the only timestamps — report bytes depend on config and seed alone.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use bhdkit::bits::PackedBits;
use bhdkit::config::{load_config, RunConfig};
use bhdkit::detector::{
    cascade_noise_figure, catalog, detector_output_snr, shot_noise_limited_snr, Environment,
};
use bhdkit::entropy::{entropy_report, quantize, EntropyReport, NoisePartition};
use bhdkit::homodyne::{generate_vacuum_components, generate_vacuum_stream, SampleStream};
use bhdkit::io::{
    read_bit_file, read_code_file, write_bit_file, write_code_file, write_csv, write_husimi_csv,
    write_json, write_sample_stream, write_spectrum_csv, write_suite_csv, write_trace_csv,
    BitsSidecar, CodesSidecar,
};
use bhdkit::nist::{run_suite, SuiteReport};
use bhdkit::pipeline::run_pipeline;
use bhdkit::report::{Report, RunMeta};
use bhdkit::rf::{
    optimize_ga, parse_touchstone, sample_match_problem, sample_match_solution,
    sensitivity_analysis, stability_factors, SParam, SensitivityEntry, StabilityReport,
};
use bhdkit::spectrum::estimate_spectrum;
use bhdkit::toeplitz::{extract_stream, ExtractorConfig};
use bhdkit::tomography::{
    calibrate_shot_noise, compare_husimi, generate_heterodyne_stream, reconstruct_husimi,
    theoretical_vacuum_husimi, GridSpec, HeterodyneCalibration, HeterodyneModel, QuadratureStream,
};
use bhdkit::{round_db, Error, Mode, Result};

#[derive(Parser)]
#[command(
    name = "bhdkit",
    version,
    about = "Balanced homodyne detector design and vacuum-noise QRNG workbench"
)]
struct Cli {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override every seed in the configuration (master, detector, GA).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Scale convention: "paper-literal" or "standard".
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Output directory; defaults to the config's out_dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shot-noise-limited SNR for the candidate photodiodes.
    DesignSnr,
    /// Two-stage amplifier cascade noise figures and resulting output SNR.
    DesignCascade,
    /// K-factor / mu-factor stability screening of a two-port network.
    Stability {
        /// Touchstone .s2p file; a half-power matched pad when omitted.
        #[arg(long)]
        touchstone: Option<PathBuf>,
    },
    /// Tolerance sensitivity ranking of the bundled match network.
    Sensitivity,
    /// Genetic search for a matching network meeting the S11 goal.
    Optimize,
    /// Simulate the balanced detector output and estimate its spectrum.
    Simulate,
    /// Quantize a simulated stream and account its min-entropy.
    Entropy,
    /// Toeplitz-extract random bits from a quantizer code file.
    Extract {
        /// Code file written by `entropy` (with its .json sidecar).
        codes: PathBuf,
    },
    /// Reconstruct the vacuum Husimi function from simulated quadratures.
    Husimi,
    /// Run the randomness test battery over packed bit files.
    Test {
        /// Bit files written by `extract` or `pipeline`.
        #[arg(required = true, num_args = 1..)]
        bit_files: Vec<PathBuf>,
    },
    /// Full chain: simulate, quantize, account, size, extract, test.
    Pipeline,
}

fn parse_mode(s: &str) -> Result<Mode> {
    s.parse()
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.rng_seed = seed;
        config.detector.rng_seed = seed;
        config.ga.rng_seed = seed;
    }
    if let Some(mode) = cli.mode {
        config.mode = mode;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.display().to_string();
    }
    config.validate()?;
    let out = PathBuf::from(&config.out_dir);
    std::fs::create_dir_all(&out)?;

    match &cli.command {
        Command::DesignSnr => design_snr(&config, &out),
        Command::DesignCascade => design_cascade(&config, &out),
        Command::Stability { touchstone } => stability(&config, &out, touchstone.as_deref()),
        Command::Sensitivity => sensitivity(&config, &out),
        Command::Optimize => optimize(&config, &out),
        Command::Simulate => simulate(&config, &out),
        Command::Entropy => entropy(&config, &out),
        Command::Extract { codes } => extract(&config, &out, codes),
        Command::Husimi => husimi(&config, &out),
        Command::Test { bit_files } => test_bits(&config, &out, bit_files),
        Command::Pipeline => pipeline(&config, &out),
    }
}

fn finish<T: Serialize>(
    tool: &str,
    config: &RunConfig,
    out: &Path,
    payload: T,
    timer: bhdkit::report::RunMetaTimer,
) -> Result<()> {
    let report = Report::new(tool, config, payload);
    report.write(&out.join(format!("{}_report.json", tool.replace('-', "_"))))?;
    write_json(&out.join("run_meta.json"), &timer.finish())?;
    Ok(())
}

#[derive(Serialize)]
struct SnrRow {
    label: String,
    snr_db: f64,
}

#[derive(Serialize)]
struct SnrSummary {
    optical_power_w: f64,
    temperature_k: f64,
    rows: Vec<SnrRow>,
}

fn design_snr(config: &RunConfig, out: &Path) -> Result<()> {
    let timer = RunMeta::start("design-snr");
    let env = Environment { temperature: 300.0, optical_power: config.simulation.lo_power };
    let mut rows = Vec::new();
    for pd in catalog::photodiodes() {
        rows.push(SnrRow { label: pd.label.clone(), snr_db: shot_noise_limited_snr(&pd, &env)? });
    }
    write_csv(
        &out.join("snr.csv"),
        "label,snr_db",
        rows.iter().map(|r| format!("{},{}", r.label, r.snr_db)),
    )?;
    for r in &rows {
        println!("{:<12} {:.2} dB", r.label, r.snr_db);
    }
    let summary = SnrSummary {
        optical_power_w: env.optical_power,
        temperature_k: env.temperature,
        rows,
    };
    finish("design-snr", config, out, summary, timer)
}

#[derive(Serialize)]
struct CascadeRow {
    label: String,
    gain_db: f64,
    stage_nf_db: f64,
    cascade_nf_db: f64,
    output_snr_db: f64,
}

#[derive(Serialize)]
struct CascadeSummary {
    input_snr_db: f64,
    rows: Vec<CascadeRow>,
}

fn design_cascade(config: &RunConfig, out: &Path) -> Result<()> {
    let timer = RunMeta::start("design-cascade");
    let env = Environment { temperature: 300.0, optical_power: config.simulation.lo_power };
    let input_raw = shot_noise_limited_snr(&catalog::lsipd_ld50(), &env)?;
    // The paper-literal convention quotes rounded dB at each step.
    let input_snr_db = match config.mode {
        Mode::PaperLiteral => round_db(input_raw),
        Mode::Standard => input_raw,
    };
    let mut rows = Vec::new();
    for amp in catalog::amplifiers() {
        let nf_raw = cascade_noise_figure(&amp, &amp, config.mode)?;
        let cascade_nf_db = match config.mode {
            Mode::PaperLiteral => round_db(nf_raw),
            Mode::Standard => nf_raw,
        };
        rows.push(CascadeRow {
            label: amp.label.clone(),
            gain_db: amp.gain_db,
            stage_nf_db: amp.noise_figure_db,
            cascade_nf_db,
            output_snr_db: detector_output_snr(input_snr_db, cascade_nf_db, config.mode),
        });
    }
    write_csv(
        &out.join("cascade.csv"),
        "label,cascade_nf_db,output_snr_db",
        rows.iter().map(|r| format!("{},{},{}", r.label, r.cascade_nf_db, r.output_snr_db)),
    )?;
    for r in &rows {
        println!(
            "{:<12} NF {:.2} dB -> output SNR {:.2} dB",
            r.label, r.cascade_nf_db, r.output_snr_db
        );
    }
    finish("design-cascade", config, out, CascadeSummary { input_snr_db, rows }, timer)
}

fn stability(config: &RunConfig, out: &Path, touchstone: Option<&Path>) -> Result<()> {
    let timer = RunMeta::start("stability");
    let network = match touchstone {
        Some(path) => parse_touchstone(&std::fs::read_to_string(path)?)?,
        // Half-power pad: K = 1.25, mu = 2 exactly — a clean screen demo.
        // (A pure series/shunt ladder sits on the K = 1 boundary and would
        // classify as potentially unstable from rounding alone.)
        None => bhdkit::rf::TwoPortNetwork::matched_attenuator(
            10.0 * 2f64.log10(),
            bhdkit::rf::FrequencySweep::linspace(0.5e9, 3.0e9, 26)?,
            50.0,
        )?,
    };
    let report: StabilityReport = stability_factors(&network);
    write_csv(
        &out.join("stability.csv"),
        "frequency_hz,k_factor,mu_source,mu_load",
        report
            .records
            .iter()
            .map(|r| format!("{},{},{},{}", r.frequency_hz, r.k_factor, r.mu_source, r.mu_load)),
    )?;
    println!(
        "{} points, stable everywhere: {}",
        report.records.len(),
        report.stable_everywhere
    );
    finish("stability", config, out, report, timer)
}

fn sensitivity(config: &RunConfig, out: &Path) -> Result<()> {
    let timer = RunMeta::start("sensitivity");
    let (l, c) = sample_match_solution();
    let (topology, _, sweep) = sample_match_problem(l, c)?;
    let mut entries: Vec<SensitivityEntry> =
        sensitivity_analysis(&topology, &sweep, 50.0, SParam::S11, 0.05)?;
    entries.sort_by(|a, b| b.sensitivity.abs().total_cmp(&a.sensitivity.abs()));
    write_csv(
        &out.join("sensitivity.csv"),
        "label,sensitivity_db_per_ln,tunable,clamped",
        entries
            .iter()
            .map(|e| format!("{},{},{},{}", e.label, e.sensitivity, e.tunable, e.clamped)),
    )?;
    for e in &entries {
        println!("{:<8} {:+.3} dB per ln-unit", e.label, e.sensitivity);
    }
    finish("sensitivity", config, out, entries, timer)
}

#[derive(Serialize)]
struct ElementValue {
    label: String,
    value: Option<f64>,
}

#[derive(Serialize)]
struct OptimizeSummary {
    best_cost: f64,
    generations_run: usize,
    converged: bool,
    elements: Vec<ElementValue>,
}

fn optimize(config: &RunConfig, out: &Path) -> Result<()> {
    let timer = RunMeta::start("optimize");
    // Start far from the analytic solution so the search does real work.
    let (topology, goals, sweep) = sample_match_problem(5e-8, 5e-11)?;
    let result = optimize_ga(&topology, &goals, &config.ga, &sweep, 50.0)?;
    write_trace_csv(&out.join("cost_trace.csv"), &result.trace)?;
    let summary = OptimizeSummary {
        best_cost: result.best_cost,
        generations_run: result.trace.len(),
        converged: result.best_cost == 0.0,
        elements: result
            .topology
            .elements
            .iter()
            .map(|e| ElementValue { label: e.label().to_string(), value: e.value() })
            .collect(),
    };
    println!(
        "best cost {:.6} after {} generations (converged: {})",
        summary.best_cost, summary.generations_run, summary.converged
    );
    finish("optimize", config, out, summary, timer)
}

#[derive(Serialize)]
struct SimulateSummary {
    n_samples: usize,
    sample_rate: f64,
    lo_power: f64,
    variance_v2: f64,
    resolution_bw_hz: f64,
}

fn simulate(config: &RunConfig, out: &Path) -> Result<()> {
    let timer = RunMeta::start("simulate");
    let stream = generate_vacuum_stream(
        &config.detector,
        config.simulation.lo_power,
        config.simulation.n_samples,
    )?;
    write_sample_stream(&out.join("vacuum.f32"), &stream, config.detector.rng_seed)?;
    let spectrum = estimate_spectrum(&stream, config.simulation.segment_len)?;
    write_spectrum_csv(&out.join("spectrum.csv"), &spectrum)?;
    let summary = SimulateSummary {
        n_samples: stream.samples.len(),
        sample_rate: stream.sample_rate,
        lo_power: stream.lo_power,
        variance_v2: stream.variance(),
        resolution_bw_hz: spectrum.resolution_bw,
    };
    println!(
        "{} samples at {:.2} GS/s, variance {:.3e} V^2",
        summary.n_samples,
        summary.sample_rate / 1e9,
        summary.variance_v2
    );
    finish("simulate", config, out, summary, timer)
}

fn std_dev(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    (samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n).sqrt()
}

#[derive(Serialize)]
struct EntropySummary {
    noise: NoisePartition,
    entropy: EntropyReport,
}

fn entropy(config: &RunConfig, out: &Path) -> Result<()> {
    let timer = RunMeta::start("entropy");
    let (shot, elec) = generate_vacuum_components(
        &config.detector,
        config.simulation.lo_power,
        config.simulation.n_samples,
    )?;
    let noise =
        NoisePartition::from_sigmas(std_dev(&shot), std_dev(&elec), config.excursion_factor);
    let stream = SampleStream {
        samples: shot.iter().zip(&elec).map(|(a, b)| a + b).collect(),
        sample_rate: config.detector.sample_rate,
        lo_power: config.simulation.lo_power,
    };
    let quantized = quantize(&stream, &config.adc)?;
    let report = entropy_report(&quantized, &noise, &config.adc)?;
    write_code_file(
        &out.join("codes.bin"),
        &quantized.codes,
        &CodesSidecar {
            adc_bits: config.adc.bits,
            n_codes: quantized.codes.len() as u64,
            sample_rate: config.detector.sample_rate,
            lo_power: config.simulation.lo_power,
        },
    )?;
    println!(
        "h_min conditional {:.3} bits, empirical {:.3} bits, safe: {}",
        report.h_min_conditional, report.h_min_empirical, report.safe
    );
    finish("entropy", config, out, EntropySummary { noise, entropy: report }, timer)
}

#[derive(Serialize)]
struct ExtractSummary {
    extractor: ExtractorConfig,
    blocks_processed: usize,
    discarded_bits: usize,
    warning: Option<String>,
    seed_digests: Vec<String>,
    bits_per_channel: Vec<u64>,
}

fn extract(config: &RunConfig, out: &Path, codes_path: &Path) -> Result<()> {
    let timer = RunMeta::start("extract");
    let (codes, sidecar) = read_code_file(codes_path)?;
    let result = extract_stream(
        &codes,
        sidecar.adc_bits,
        &config.extractor,
        config.rng_seed,
        config.channels,
    )?;
    let mut bits_per_channel = Vec::new();
    for (k, channel) in result.channels.iter().enumerate() {
        write_bit_file(
            &out.join(format!("bits_ch{k}.bits")),
            channel,
            &BitsSidecar {
                n_bits: channel.len() as u64,
                n_in: config.extractor.n_in,
                m_out: config.extractor.m_out,
                seed_digest: result.seed_digests[k].clone(),
                blocks_processed: (channel.len() / config.extractor.m_out) as u64,
            },
        )?;
        bits_per_channel.push(channel.len() as u64);
    }
    println!(
        "{} blocks -> {} bits over {} channels",
        result.blocks_processed,
        bits_per_channel.iter().sum::<u64>(),
        result.channels.len()
    );
    if let Some(w) = &result.warning {
        eprintln!("warning: {w}");
    }
    let summary = ExtractSummary {
        extractor: config.extractor,
        blocks_processed: result.blocks_processed,
        discarded_bits: result.discarded_bits,
        warning: result.warning.clone(),
        seed_digests: result.seed_digests.clone(),
        bits_per_channel,
    };
    finish("extract", config, out, summary, timer)
}

#[derive(Serialize)]
struct HusimiSummary {
    calibration: HeterodyneCalibration,
    probe_power_w: f64,
    variance_p: f64,
    variance_q: f64,
    peak_density: f64,
    theoretical_peak: f64,
    overlap: f64,
    in_grid_fraction: f64,
    coverage_warning: Option<String>,
}

fn husimi(config: &RunConfig, out: &Path) -> Result<()> {
    let timer = RunMeta::start("husimi");
    // Heterodyne bench derived from the detector model: quadrature variance
    // per watt equals the detector's in-band shot variance per watt.
    let det = &config.detector;
    let noise_bw = det.f3db * (det.sample_rate / (2.0 * det.f3db)).atan();
    let model = HeterodyneModel {
        shot_variance_per_watt: det.shot_noise_psd_per_mw * 1e3 * noise_bw,
        electronic_variance: det.elec_noise_psd * det.sample_rate / 2.0,
        sample_rate: det.sample_rate,
        rng_seed: config.rng_seed,
    };
    let streams: Vec<QuadratureStream> = (1..=9)
        .map(|k| generate_heterodyne_stream(&model, 0.2e-3 * f64::from(k), 200_000))
        .collect::<Result<_>>()?;
    let calibration = calibrate_shot_noise(&streams)?;
    let probe_power = config.simulation.lo_power;
    let probe = generate_heterodyne_stream(&model, probe_power, 1_000_000)?;
    let alphas = bhdkit::tomography::normalize_quadratures(&probe, &calibration.p, probe_power)?;
    let spec = GridSpec::default();
    let recon = reconstruct_husimi(&alphas.points, &spec)?;
    let theory = theoretical_vacuum_husimi(&spec)?;
    let overlap = compare_husimi(&recon.grid, &theory)?;
    write_husimi_csv(&out.join("husimi.csv"), &recon.grid)?;
    let var = |axis: fn(&(f64, f64)) -> f64| {
        alphas.points.iter().map(|p| axis(p) * axis(p)).sum::<f64>() / alphas.points.len() as f64
    };
    let summary = HusimiSummary {
        calibration,
        probe_power_w: probe_power,
        variance_p: var(|p| p.0),
        variance_q: var(|p| p.1),
        peak_density: recon.grid.max_density(),
        theoretical_peak: 1.0 / std::f64::consts::PI,
        overlap,
        in_grid_fraction: recon.in_grid_fraction,
        coverage_warning: recon.coverage_warning.clone(),
    };
    println!(
        "overlap {:.4}, peak {:.4} (1/pi = {:.4}), per-axis variance ({:.3}, {:.3})",
        summary.overlap,
        summary.peak_density,
        summary.theoretical_peak,
        summary.variance_p,
        summary.variance_q
    );
    finish("husimi", config, out, summary, timer)
}

fn test_bits(config: &RunConfig, out: &Path, bit_files: &[PathBuf]) -> Result<()> {
    let timer = RunMeta::start("test");
    let mut all = PackedBits::new();
    for path in bit_files {
        let (bits, _) = read_bit_file(path)?;
        all.extend_from(&bits);
    }
    let seq_len = config.suite.sequence_len;
    let n_seq = (all.len() / seq_len).min(config.suite.batch_sequences);
    if n_seq == 0 {
        return Err(Error::domain(format!(
            "need at least one full {seq_len}-bit sequence, got {} bits",
            all.len()
        )));
    }
    let sequences: Vec<PackedBits> =
        (0..n_seq).map(|i| all.slice(i * seq_len, seq_len)).collect();
    let suite: SuiteReport = run_suite(&sequences, config.suite.alpha)?;
    write_suite_csv(&out.join("suite.csv"), &suite)?;
    for t in &suite.tests {
        println!(
            "{:<22} proportion {:.3} {}",
            t.test_name,
            t.proportion_passed,
            if t.within_ci { "ok" } else { "OUTSIDE CI" }
        );
    }
    println!(
        "{} sequences x {} bits, all within CI: {}",
        suite.batch_size, suite.sequence_len, suite.all_within_ci
    );
    finish("test", config, out, suite, timer)
}

fn pipeline(config: &RunConfig, out: &Path) -> Result<()> {
    let outcome = run_pipeline(config, out)?;
    let s = &outcome.report.payload;
    println!(
        "{} blocks -> {} bits over {} channels, m_out {} (h/bit {:.4})",
        s.blocks_processed,
        s.total_output_bits,
        s.bits_per_channel.len(),
        s.extractor.m_out,
        s.extractor.h_min_per_bit
    );
    println!(
        "suite: {} sequences x {} bits, all within CI: {}",
        s.suite.batch_size, s.suite.sequence_len, s.suite.all_within_ci
    );
    println!("report: {}", outcome.report_path.display());
    Ok(())
}
