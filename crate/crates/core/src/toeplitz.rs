//! Seeded binary Toeplitz extraction over GF(2).
//!
//! Output sizing by the leftover-hash budget (in both log conventions — see
//! [`crate::Mode`]), matrix construction from m + n − 1 seed bits, a
//! word-packed multiply (AND + popcount parity), and a streaming
//! multi-channel mode that chops a quantized code stream into blocks and
//! restores per-channel output order regardless of worker count.

use rand_chacha::rand_core::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::PackedBits;
use crate::seeding::{derive_seed2, rng_from_seed};
use crate::{Error, Mode, Result};

const TAG_CHANNEL: u64 = 21;

/// Block geometry and hash budget of the extractor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractorConfig {
    /// Input bits per block (n).
    pub n_in: usize,
    /// Output bits per block (m).
    pub m_out: usize,
    /// Hash security parameter ε.
    pub epsilon_hash: f64,
    /// Certified min-entropy per input bit.
    pub h_min_per_bit: f64,
}

impl Default for ExtractorConfig {
    /// The flagship operating point: 2207-bit blocks hashed to 1729 bits
    /// under 6.63 certified bits per 8-bit sample.
    fn default() -> Self {
        ExtractorConfig {
            n_in: 2207,
            m_out: 1729,
            epsilon_hash: 1.0e-50,
            h_min_per_bit: 6.63 / 8.0,
        }
    }
}

impl ExtractorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_out == 0 || self.m_out > self.n_in {
            return Err(Error::domain(format!(
                "m_out must lie in (0, n_in]; got m_out {} for n_in {}",
                self.m_out, self.n_in
            )));
        }
        if !self.h_min_per_bit.is_finite()
            || self.h_min_per_bit <= 0.0
            || self.h_min_per_bit > 1.0
        {
            return Err(Error::domain(format!(
                "h_min_per_bit must lie in (0, 1], got {}",
                self.h_min_per_bit
            )));
        }
        if !self.epsilon_hash.is_finite() || self.epsilon_hash <= 0.0 || self.epsilon_hash >= 1.0 {
            return Err(Error::domain(format!(
                "epsilon_hash must lie in (0, 1), got {}",
                self.epsilon_hash
            )));
        }
        Ok(())
    }

    /// Seed bits the Toeplitz construction consumes: m + n − 1.
    pub fn seed_len(&self) -> usize {
        self.m_out + self.n_in - 1
    }
}

/// Output block length from the leftover-hash budget:
/// m = floor(n·h − 2·log_b(1/ε)) with b = 10 in paper-literal mode and
/// b = 2 in standard mode. ε = 1 is allowed and zeroes the penalty term.
pub fn size_output(n_in: usize, h_min_per_bit: f64, epsilon_hash: f64, mode: Mode) -> Result<usize> {
    if n_in == 0 {
        return Err(Error::domain("n_in must be positive"));
    }
    if !h_min_per_bit.is_finite() || h_min_per_bit <= 0.0 || h_min_per_bit > 1.0 {
        return Err(Error::domain(format!("h_min_per_bit must lie in (0, 1], got {h_min_per_bit}")));
    }
    if !epsilon_hash.is_finite() || epsilon_hash <= 0.0 || epsilon_hash > 1.0 {
        return Err(Error::domain(format!("epsilon_hash must lie in (0, 1], got {epsilon_hash}")));
    }
    let penalty = match mode {
        Mode::PaperLiteral => 2.0 * (1.0 / epsilon_hash).log10(),
        Mode::Standard => 2.0 * (1.0 / epsilon_hash).log2(),
    };
    let m = (n_in as f64 * h_min_per_bit - penalty).floor();
    if m <= 0.0 {
        return Err(Error::domain(format!(
            "sizing yields a non-positive output length ({m}); the hash budget \
             exceeds the available entropy"
        )));
    }
    Ok(m as usize)
}

/// Output/input block-length ratio in percent.
pub fn extraction_efficiency_percent(m_out: usize, n_in: usize) -> f64 {
    100.0 * m_out as f64 / n_in as f64
}

/// Aggregate extracted-bit rate for `channels` converters running at
/// `sample_rate` with `adc_bits` per sample, scaled by the block ratio.
pub fn effective_bit_rate(
    channels: usize,
    sample_rate: f64,
    adc_bits: u32,
    cfg: &ExtractorConfig,
) -> f64 {
    channels as f64 * sample_rate * adc_bits as f64 * cfg.m_out as f64 / cfg.n_in as f64
}

/// The m + n − 1 bits defining one Toeplitz matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzSeed {
    pub bits: PackedBits,
    /// Generator seed when expanded internally; `None` for external seeds.
    pub rng_seed_used: Option<u64>,
}

impl ToeplitzSeed {
    /// Deterministic expansion of a 64-bit seed into seed bits (ChaCha8
    /// keystream).
    pub fn generate(cfg: &ExtractorConfig, rng_seed: u64) -> Result<Self> {
        cfg.validate()?;
        let len = cfg.seed_len();
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng_from_seed(rng_seed).fill_bytes(&mut bytes);
        Ok(ToeplitzSeed { bits: PackedBits::from_bytes(bytes, len)?, rng_seed_used: Some(rng_seed) })
    }

    /// Wraps externally supplied seed bits.
    pub fn from_bits(bits: PackedBits, cfg: &ExtractorConfig) -> Result<Self> {
        cfg.validate()?;
        if bits.len() != cfg.seed_len() {
            return Err(Error::domain(format!(
                "seed length {} does not match m + n - 1 = {}",
                bits.len(),
                cfg.seed_len()
            )));
        }
        Ok(ToeplitzSeed { bits, rng_seed_used: None })
    }

    /// SHA-256 over the bit length and packed bytes, hex-encoded; identifies
    /// the seed in sidecars and reports.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.bits.len() as u64).to_le_bytes());
        hasher.update(self.bits.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Immutable extractor instance: T[i][j] = seed[i − j + n − 1], rows packed
/// into u64 words for the AND + popcount multiply.
#[derive(Debug, Clone)]
pub struct ToeplitzExtractor {
    n_in: usize,
    m_out: usize,
    stride: usize,
    row_words: Vec<u64>,
}

impl ToeplitzExtractor {
    pub fn build(seed: &ToeplitzSeed, cfg: &ExtractorConfig) -> Result<Self> {
        cfg.validate()?;
        if seed.bits.len() != cfg.seed_len() {
            return Err(Error::domain(format!(
                "seed length {} does not match m + n - 1 = {}",
                seed.bits.len(),
                cfg.seed_len()
            )));
        }
        let (m, n) = (cfg.m_out, cfg.n_in);
        let stride = n.div_ceil(64);
        let mut row_words = vec![0u64; m * stride];
        for i in 0..m {
            let mut row = PackedBits::zeros(n);
            for j in 0..n {
                // Row i reads seed bits [i, i + n) in reverse.
                if seed.bits.get(i + n - 1 - j) {
                    row.set(j, true);
                }
            }
            row_words[i * stride..(i + 1) * stride].copy_from_slice(&row.to_words());
        }
        Ok(ToeplitzExtractor { n_in: n, m_out: m, stride, row_words })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    /// Matrix element T[i][j]; panics out of range.
    pub fn matrix_bit(&self, i: usize, j: usize) -> bool {
        assert!(i < self.m_out && j < self.n_in, "matrix index out of range");
        self.row_words[i * self.stride + j / 64] & (1u64 << (63 - j % 64)) != 0
    }

    /// GF(2) matrix-vector product over one packed input block.
    pub fn extract_block(&self, x: &PackedBits) -> Result<PackedBits> {
        if x.len() != self.n_in {
            return Err(Error::domain(format!(
                "block length {} does not match n_in {}",
                x.len(),
                self.n_in
            )));
        }
        let xw = x.to_words();
        let mut y = PackedBits::zeros(self.m_out);
        for i in 0..self.m_out {
            let row = &self.row_words[i * self.stride..(i + 1) * self.stride];
            let mut parity = 0u32;
            for (r, v) in row.iter().zip(&xw) {
                parity ^= (r & v).count_ones();
            }
            if parity & 1 == 1 {
                y.set(i, true);
            }
        }
        Ok(y)
    }
}

/// Outcome of streaming extraction.
#[derive(Debug, Clone)]
pub struct ExtractionResult {
    /// One output bit stream per channel; blocks assigned round-robin, each
    /// channel's blocks concatenated in input order.
    pub channels: Vec<PackedBits>,
    pub blocks_processed: usize,
    /// Trailing bits that did not fill a block (discarded, never padded).
    pub discarded_bits: usize,
    /// Set when the input was shorter than one block.
    pub warning: Option<String>,
    /// Hex digests of the per-channel seeds actually used.
    pub seed_digests: Vec<String>,
}

/// Serializes quantized codes MSB-first into bits, chops them into
/// n_in-bit blocks, and extracts each block with the matrix of the channel
/// it lands on (block b goes to channel b mod channels, every channel
/// seeded independently from `seed`). Blocks are processed in parallel;
/// output order never depends on the worker count.
pub fn extract_stream(
    codes: &[u16],
    adc_bits: u32,
    cfg: &ExtractorConfig,
    seed: u64,
    channels: usize,
) -> Result<ExtractionResult> {
    cfg.validate()?;
    if channels == 0 {
        return Err(Error::domain("channels must be >= 1"));
    }
    if !(1..=16).contains(&adc_bits) {
        return Err(Error::domain(format!("adc_bits must lie in [1, 16], got {adc_bits}")));
    }
    let limit = 1u32 << adc_bits;
    let mut bits = PackedBits::with_capacity(codes.len() * adc_bits as usize);
    for &c in codes {
        if (c as u32) >= limit {
            return Err(Error::domain(format!("code {c} out of range for {adc_bits} bits")));
        }
        for b in (0..adc_bits).rev() {
            bits.push((c >> b) & 1 == 1);
        }
    }

    let extractors: Vec<ToeplitzExtractor> = (0..channels)
        .map(|c| {
            let s = ToeplitzSeed::generate(cfg, derive_seed2(seed, TAG_CHANNEL, c as u64))?;
            ToeplitzExtractor::build(&s, cfg)
        })
        .collect::<Result<_>>()?;
    let seed_digests = (0..channels)
        .map(|c| {
            ToeplitzSeed::generate(cfg, derive_seed2(seed, TAG_CHANNEL, c as u64))
                .map(|s| s.digest())
        })
        .collect::<Result<_>>()?;

    let n_blocks = bits.len() / cfg.n_in;
    let discarded_bits = bits.len() - n_blocks * cfg.n_in;
    if n_blocks == 0 {
        return Ok(ExtractionResult {
            channels: vec![PackedBits::new(); channels],
            blocks_processed: 0,
            discarded_bits,
            warning: Some(format!(
                "input of {} bits is shorter than one {}-bit block; no output produced",
                bits.len(),
                cfg.n_in
            )),
            seed_digests,
        });
    }

    let blocks: Vec<PackedBits> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let block = bits.slice(b * cfg.n_in, cfg.n_in);
            extractors[b % channels]
                .extract_block(&block)
                .expect("block length matches n_in by construction")
        })
        .collect();

    let mut out = vec![PackedBits::new(); channels];
    for (b, y) in blocks.iter().enumerate() {
        out[b % channels].extend_from(y);
    }
    Ok(ExtractionResult {
        channels: out,
        blocks_processed: n_blocks,
        discarded_bits,
        warning: None,
        seed_digests,
    })
}

/// Wall-clock throughput measurement on synthetic input. Reports rates and
/// scaling for information only; never a correctness gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub input_bits: usize,
    pub output_bits: usize,
    pub single_core_secs: f64,
    pub parallel_secs: f64,
    pub workers: usize,
    /// Output bits per second, single core; 0 when nothing was processed.
    pub single_core_bps: f64,
    pub parallel_bps: f64,
    /// single_core_secs / parallel_secs; 1.0 when nothing was timed.
    pub speedup: f64,
}

pub fn throughput_bench(
    cfg: &ExtractorConfig,
    n_blocks: usize,
    workers: usize,
    rng_seed: u64,
) -> Result<ThroughputReport> {
    cfg.validate()?;
    if workers == 0 {
        return Err(Error::domain("workers must be >= 1"));
    }
    let seed = ToeplitzSeed::generate(cfg, rng_seed)?;
    let ex = ToeplitzExtractor::build(&seed, cfg)?;
    let total_bits = n_blocks * cfg.n_in;
    let mut bytes = vec![0u8; total_bits.div_ceil(8)];
    rng_from_seed(derive_seed2(rng_seed, TAG_CHANNEL, u64::MAX)).fill_bytes(&mut bytes);
    let input = PackedBits::from_bytes(bytes, total_bits)?;
    let blocks: Vec<PackedBits> = (0..n_blocks).map(|b| input.slice(b * cfg.n_in, cfg.n_in)).collect();

    let rate = |secs: f64, bits: usize| if secs > 0.0 { bits as f64 / secs } else { 0.0 };

    let t0 = std::time::Instant::now();
    let mut out_single = 0usize;
    for block in &blocks {
        out_single += ex.extract_block(block)?.len();
    }
    let single_core_secs = t0.elapsed().as_secs_f64();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("worker pool: {e}")))?;
    let t1 = std::time::Instant::now();
    let out_parallel: usize = pool.install(|| {
        blocks
            .par_iter()
            .map(|block| ex.extract_block(block).map(|y| y.len()))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    let parallel_secs = t1.elapsed().as_secs_f64();
    debug_assert_eq!(out_single, out_parallel);

    Ok(ThroughputReport {
        input_bits: total_bits,
        output_bits: out_single,
        single_core_secs,
        parallel_secs,
        workers,
        single_core_bps: rate(single_core_secs, out_single),
        parallel_bps: rate(parallel_secs, out_parallel),
        speedup: if parallel_secs > 0.0 && single_core_secs > 0.0 {
            single_core_secs / parallel_secs
        } else {
            1.0
        },
    })
}
