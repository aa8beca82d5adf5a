//! End-to-end chain: simulate → quantize → entropy → size → extract →
//! test. One master seed pins every stage, so a config digest identifies
//! the output bits exactly.
//!
//! The extractor is sized from the certified conditional min-entropy of a
//! calibration record, never from the config's `m_out` — the config value
//! is only the standalone-tool operating point. The production record is
//! then sized to fill the requested statistical-test batch.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bits::PackedBits;
use crate::config::RunConfig;
use crate::detector::Mode;
use crate::entropy::{
    conditional_min_entropy, entropy_report, quantize, EntropyReport, NoisePartition,
};
use crate::homodyne::{generate_vacuum_components, generate_vacuum_stream};
use crate::io::{write_bit_file, write_json, BitsSidecar};
use crate::nist::{run_suite, SuiteReport};
use crate::report::{Report, RunMeta};
use crate::seeding::derive_seed;
use crate::toeplitz::{extract_stream, size_output, ExtractorConfig};
use crate::{Error, Result};

// Stage tags under the master seed.
const TAG_CALIBRATION: u64 = 41;
const TAG_PRODUCTION: u64 = 42;
const TAG_TOEPLITZ_SEED: u64 = 43;

/// Everything the audit chain records about one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    /// LO power the streams were generated at, W.
    pub lo_power: f64,
    /// Calibration record length used to partition the noise.
    pub calibration_samples: usize,
    /// Production record length, sized to fill the test batch.
    pub production_samples: usize,
    pub noise: NoisePartition,
    pub entropy: EntropyReport,
    /// Extractor geometry actually used, with `m_out` re-sized from the
    /// certified bound.
    pub extractor: ExtractorConfig,
    pub sizing_mode: Mode,
    pub blocks_processed: usize,
    pub discarded_bits: usize,
    pub warning: Option<String>,
    /// Per-channel Toeplitz seed digests.
    pub seed_digests: Vec<String>,
    pub bits_per_channel: Vec<u64>,
    pub total_output_bits: u64,
    pub suite: SuiteReport,
    /// File names written next to the report.
    pub output_files: Vec<String>,
}

/// Result handed back to callers; the same summary is on disk in
/// `pipeline_report.json`.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: Report<PipelineSummary>,
    pub report_path: PathBuf,
    pub bit_files: Vec<PathBuf>,
}

fn std_dev(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    (samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n).sqrt()
}

/// Runs the full chain and writes the bit files, the audit report, and a
/// timing sidecar into `out_dir`. Report and bit files are byte-identical
/// across reruns and across thread counts; wall-clock data goes only to
/// `run_meta.json`.
pub fn run_pipeline(config: &RunConfig, out_dir: &Path) -> Result<PipelineOutcome> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let timer = RunMeta::start("pipeline");

    // Calibration: an independent draw of the same source, split into its
    // quantum and classical components to bound the noise partition.
    let mut calibration_model = config.detector.clone();
    calibration_model.rng_seed = derive_seed(config.rng_seed, TAG_CALIBRATION);
    let (shot, elec) = generate_vacuum_components(
        &calibration_model,
        config.simulation.lo_power,
        config.simulation.n_samples,
    )?;
    let noise =
        NoisePartition::from_sigmas(std_dev(&shot), std_dev(&elec), config.excursion_factor);
    noise.validate()?;
    drop(shot);
    drop(elec);

    // Size the extractor from the certified bound.
    let (h_conditional, c1, c2) = conditional_min_entropy(&noise, &config.adc)?;
    if c1 > c2 {
        return Err(Error::measurement(format!(
            "noise partition fails the safety inequality: c1 {c1:.6e} > c2 {c2:.6e}; \
             lower the classical excursion or widen the ADC range"
        )));
    }
    let h_per_bit = h_conditional / f64::from(config.adc.bits);
    let m_out = size_output(
        config.extractor.n_in,
        h_per_bit,
        config.extractor.epsilon_hash,
        config.mode,
    )?;
    let extractor = ExtractorConfig {
        n_in: config.extractor.n_in,
        m_out,
        epsilon_hash: config.extractor.epsilon_hash,
        h_min_per_bit: h_per_bit,
    };

    // Production record sized so the batch is filled exactly once.
    let required_bits = config.suite.batch_sequences as u64 * config.suite.sequence_len as u64;
    let blocks = required_bits.div_ceil(m_out as u64);
    let input_bits = blocks * extractor.n_in as u64;
    let production_samples = input_bits.div_ceil(u64::from(config.adc.bits)) as usize;
    let mut production_model = config.detector.clone();
    production_model.rng_seed = derive_seed(config.rng_seed, TAG_PRODUCTION);
    let stream =
        generate_vacuum_stream(&production_model, config.simulation.lo_power, production_samples)?;
    let quantized = quantize(&stream, &config.adc)?;
    drop(stream);

    // Empirical entropy of the production record against the calibration
    // partition; `safe` was already enforced above.
    let entropy = entropy_report(&quantized, &noise, &config.adc)?;

    let toeplitz_seed = derive_seed(config.rng_seed, TAG_TOEPLITZ_SEED);
    let extraction = extract_stream(
        &quantized.codes,
        config.adc.bits,
        &extractor,
        toeplitz_seed,
        config.channels,
    )?;
    drop(quantized);

    // Test sequences are carved from the channel outputs in channel order.
    let mut all_bits = PackedBits::new();
    for channel in &extraction.channels {
        all_bits.extend_from(channel);
    }
    if (all_bits.len() as u64) < required_bits {
        return Err(Error::measurement(format!(
            "extraction produced {} bits, short of the {required_bits} the batch needs",
            all_bits.len()
        )));
    }
    let sequences: Vec<PackedBits> = (0..config.suite.batch_sequences)
        .map(|i| all_bits.slice(i * config.suite.sequence_len, config.suite.sequence_len))
        .collect();
    drop(all_bits);
    let suite = run_suite(&sequences, config.suite.alpha)?;
    drop(sequences);

    let mut bit_files = Vec::new();
    let mut bits_per_channel = Vec::new();
    let mut output_files = vec!["pipeline_report.json".to_string()];
    let mut total_output_bits = 0u64;
    for (k, channel) in extraction.channels.iter().enumerate() {
        let name = format!("bits_ch{k}.bits");
        let path = out_dir.join(&name);
        let sidecar = BitsSidecar {
            n_bits: channel.len() as u64,
            n_in: extractor.n_in,
            m_out: extractor.m_out,
            seed_digest: extraction.seed_digests[k].clone(),
            blocks_processed: (channel.len() / extractor.m_out) as u64,
        };
        write_bit_file(&path, channel, &sidecar)?;
        bits_per_channel.push(channel.len() as u64);
        total_output_bits += channel.len() as u64;
        output_files.push(name);
        bit_files.push(path);
    }

    let summary = PipelineSummary {
        lo_power: config.simulation.lo_power,
        calibration_samples: config.simulation.n_samples,
        production_samples,
        noise,
        entropy,
        extractor,
        sizing_mode: config.mode,
        blocks_processed: extraction.blocks_processed,
        discarded_bits: extraction.discarded_bits,
        warning: extraction.warning.clone(),
        seed_digests: extraction.seed_digests.clone(),
        bits_per_channel,
        total_output_bits,
        suite,
        output_files,
    };
    let report = Report::new("pipeline", config, summary);
    let report_path = out_dir.join("pipeline_report.json");
    report.write(&report_path)?;
    write_json(&out_dir.join("run_meta.json"), &timer.finish())?;

    Ok(PipelineOutcome { report, report_path, bit_files })
}
