//! SP 800-22-style randomness health tests.
//!
//! Seven tests — monobit frequency, block frequency, runs, longest run of
//! ones in a block, cumulative sums (forward), serial, and approximate
//! entropy — each producing a P-value from the standard erfc /
//! incomplete-gamma reference formulas, plus a batch suite runner with the
//! pass-proportion confidence interval. A sequence that is too short for a
//! test is an applicability error, never a silent failure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::bits::PackedBits;
use crate::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.01;

/// One test applied to one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_name: String,
    pub p_value: f64,
    /// p_value >= 0.01 (the standard significance level); suite runs with a
    /// different α re-derive pass/fail from the P-value.
    pub passed: bool,
    pub params_echo: String,
}

fn finish(name: &str, p: f64, params: String) -> TestResult {
    let p_value = p.clamp(0.0, 1.0);
    TestResult { test_name: name.to_string(), p_value, passed: p_value >= DEFAULT_ALPHA, params_echo: params }
}

fn require_len(s: &PackedBits, min: usize, test: &str) -> Result<usize> {
    let n = s.len();
    if n < min {
        return Err(Error::domain(format!(
            "{test} needs at least {min} bits, got {n}; test not applicable"
        )));
    }
    Ok(n)
}

/// Standard normal CDF.
fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Regularized upper incomplete gamma Q(a, x).
fn igamc(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(a, x)
}

/// Frequency (monobit): s_obs = |ones − zeros|/√n, p = erfc(s_obs/√2).
pub fn monobit_frequency(s: &PackedBits) -> Result<TestResult> {
    let n = require_len(s, 100, "monobit frequency")?;
    let sum = 2.0 * s.ones() as f64 - n as f64;
    let s_obs = sum.abs() / (n as f64).sqrt();
    let p = erfc(s_obs / std::f64::consts::SQRT_2);
    Ok(finish("monobit-frequency", p, format!("n={n}")))
}

/// Block frequency: χ² = 4M·Σ(π_i − 1/2)² over N = ⌊n/M⌋ blocks,
/// p = Q(N/2, χ²/2).
pub fn block_frequency(s: &PackedBits, block_len: usize) -> Result<TestResult> {
    let n = require_len(s, 100, "block frequency")?;
    if block_len == 0 || block_len > n {
        return Err(Error::domain(format!(
            "block length must lie in [1, {n}], got {block_len}"
        )));
    }
    let n_blocks = n / block_len;
    let mut chi2 = 0.0;
    for b in 0..n_blocks {
        let ones = s.slice(b * block_len, block_len).ones();
        let pi = ones as f64 / block_len as f64;
        chi2 += (pi - 0.5).powi(2);
    }
    chi2 *= 4.0 * block_len as f64;
    let p = igamc(n_blocks as f64 / 2.0, chi2 / 2.0);
    Ok(finish("block-frequency", p, format!("n={n}, M={block_len}, N={n_blocks}")))
}

/// Runs: V_n = total runs; applicable only when the ones fraction is within
/// 2/√n of 1/2 (otherwise p = 0 per the reference convention, since the
/// sequence already failed frequency).
pub fn runs(s: &PackedBits) -> Result<TestResult> {
    let n = require_len(s, 100, "runs")?;
    let pi = s.ones() as f64 / n as f64;
    let tau = 2.0 / (n as f64).sqrt();
    if (pi - 0.5).abs() >= tau {
        return Ok(finish(
            "runs",
            0.0,
            format!("n={n}, pi={pi:.6}; frequency precondition failed"),
        ));
    }
    let mut v = 1u64;
    let mut prev = s.get(0);
    for b in s.iter().skip(1) {
        if b != prev {
            v += 1;
        }
        prev = b;
    }
    let num = (v as f64 - 2.0 * n as f64 * pi * (1.0 - pi)).abs();
    let den = 2.0 * (2.0 * n as f64).sqrt() * pi * (1.0 - pi);
    let p = erfc(num / den);
    Ok(finish("runs", p, format!("n={n}, pi={pi:.6}, runs={v}")))
}

/// Category table for the longest-run test: block length, lowest category,
/// and reference probabilities. A block's category is its longest run of
/// ones clamped into [floor, floor + K].
struct LongestRunTable {
    block_len: usize,
    floor: u64,
    pi: &'static [f64],
}

fn longest_run_table(n: usize) -> Result<LongestRunTable> {
    if n >= 750_000 {
        Ok(LongestRunTable {
            block_len: 10_000,
            floor: 10,
            pi: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        })
    } else if n >= 6272 {
        Ok(LongestRunTable {
            block_len: 128,
            floor: 4,
            pi: &[0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847],
        })
    } else if n >= 128 {
        // Exact rationals (out of 2^8 equally likely blocks).
        Ok(LongestRunTable {
            block_len: 8,
            floor: 1,
            pi: &[0.21484375, 0.3671875, 0.23046875, 0.1875],
        })
    } else {
        Err(Error::domain(format!(
            "longest run needs at least 128 bits, got {n}; test not applicable"
        )))
    }
}

/// Longest run of ones in a block: χ² of the categorized per-block longest
/// runs against the reference probabilities, p = Q(K/2, χ²/2).
pub fn longest_run_in_block(s: &PackedBits) -> Result<TestResult> {
    let n = s.len();
    let table = longest_run_table(n)?;
    let n_blocks = n / table.block_len;
    let k = table.pi.len() - 1;
    let mut counts = vec![0u64; table.pi.len()];
    for b in 0..n_blocks {
        let mut longest = 0u64;
        let mut run = 0u64;
        for bit in s.slice(b * table.block_len, table.block_len).iter() {
            if bit {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 0;
            }
        }
        let cat = longest.saturating_sub(table.floor).min(k as u64) as usize;
        counts[cat] += 1;
    }
    let mut chi2 = 0.0;
    for (i, &pi) in table.pi.iter().enumerate() {
        let expect = n_blocks as f64 * pi;
        chi2 += (counts[i] as f64 - expect).powi(2) / expect;
    }
    let p = igamc(k as f64 / 2.0, chi2 / 2.0);
    Ok(finish(
        "longest-run",
        p,
        format!("n={n}, M={}, N={n_blocks}, counts={counts:?}", table.block_len),
    ))
}

/// Cumulative sums, forward mode: z = max|S_k| of the ±1 partial sums,
/// p from the reflection-principle normal sum.
pub fn cumulative_sums(s: &PackedBits) -> Result<TestResult> {
    let n = require_len(s, 100, "cumulative sums")?;
    let mut sum = 0i64;
    let mut z = 0i64;
    for b in s.iter() {
        sum += if b { 1 } else { -1 };
        z = z.max(sum.abs());
    }
    let (n_f, z_f) = (n as f64, z as f64);
    let sqrt_n = n_f.sqrt();
    let mut p = 1.0;
    let k_hi = ((n_f / z_f - 1.0) / 4.0).floor() as i64;
    let k_lo = ((-n_f / z_f + 1.0) / 4.0).floor() as i64;
    for k in k_lo..=k_hi {
        let kf = k as f64;
        p -= phi((4.0 * kf + 1.0) * z_f / sqrt_n) - phi((4.0 * kf - 1.0) * z_f / sqrt_n);
    }
    let k_lo2 = ((-n_f / z_f - 3.0) / 4.0).floor() as i64;
    for k in k_lo2..=k_hi {
        let kf = k as f64;
        p += phi((4.0 * kf + 3.0) * z_f / sqrt_n) - phi((4.0 * kf + 1.0) * z_f / sqrt_n);
    }
    Ok(finish("cumulative-sums", p, format!("n={n}, z={z}")))
}

/// Overlapping m-bit pattern counts with wraparound.
fn pattern_counts(bits: &[bool], m: usize) -> Vec<u64> {
    if m == 0 {
        return vec![bits.len() as u64];
    }
    let n = bits.len();
    let mask = (1usize << m) - 1;
    let mut counts = vec![0u64; 1 << m];
    let mut w = 0usize;
    for &b in &bits[..m - 1] {
        w = (w << 1) | b as usize;
    }
    for i in 0..n {
        w = ((w << 1) | bits[(i + m - 1) % n] as usize) & mask;
        counts[w] += 1;
    }
    counts
}

/// ψ²_m = (2^m/n)·Σ counts² − n.
fn psi_squared(bits: &[bool], m: usize) -> f64 {
    let n = bits.len() as f64;
    let counts = pattern_counts(bits, m);
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64).powi(2)).sum();
    (counts.len() as f64 / n) * sum_sq - n
}

fn check_pattern_len(n: usize, m: usize, min_m: usize, test: &str) -> Result<()> {
    if m < min_m {
        return Err(Error::domain(format!("{test} needs m >= {min_m}, got {m}")));
    }
    if n < (1usize << (m + 2)) {
        return Err(Error::domain(format!(
            "{test} with m={m} needs at least {} bits, got {n}; test not applicable",
            1usize << (m + 2)
        )));
    }
    Ok(())
}

/// Both serial P-values: first difference ∇ψ²_m against χ²(2^{m−2}) and
/// second difference ∇²ψ²_m against χ²(2^{m−3}).
pub fn serial_p_values(s: &PackedBits, m: usize) -> Result<(f64, f64)> {
    let n = s.len();
    check_pattern_len(n, m, 2, "serial")?;
    let bits: Vec<bool> = s.iter().collect();
    let psi_m = psi_squared(&bits, m);
    let psi_m1 = psi_squared(&bits, m - 1);
    let psi_m2 = psi_squared(&bits, m - 2);
    let d1 = psi_m - psi_m1;
    let d2 = psi_m - 2.0 * psi_m1 + psi_m2;
    let p1 = igamc(2f64.powi(m as i32 - 2), d1 / 2.0);
    let p2 = igamc(2f64.powi(m as i32 - 3), d2 / 2.0);
    Ok((p1, p2))
}

/// Serial: the reported P-value is the first-difference one (each of the
/// two serial P-values is separately uniform under randomness; collapsing
/// to their minimum would mis-calibrate batch pass proportions). The
/// second-difference P-value is echoed and available via
/// [`serial_p_values`].
pub fn serial(s: &PackedBits, m: usize) -> Result<TestResult> {
    let (p1, p2) = serial_p_values(s, m)?;
    Ok(finish("serial", p1, format!("n={}, m={m}, p2={p2:.6e}", s.len())))
}

/// Approximate entropy: χ² = 2n(ln 2 − (φ_m − φ_{m+1})), p = Q(2^{m−1}, χ²/2).
pub fn approximate_entropy(s: &PackedBits, m: usize) -> Result<TestResult> {
    let n = s.len();
    check_pattern_len(n, m + 1, 2, "approximate entropy")?;
    let bits: Vec<bool> = s.iter().collect();
    let phi_of = |mm: usize| -> f64 {
        let n_f = bits.len() as f64;
        pattern_counts(&bits, mm)
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let f = c as f64 / n_f;
                f * f.ln()
            })
            .sum()
    };
    let apen = phi_of(m) - phi_of(m + 1);
    let chi2 = 2.0 * n as f64 * (std::f64::consts::LN_2 - apen);
    let p = igamc(2f64.powi(m as i32 - 1), chi2 / 2.0);
    Ok(finish("approximate-entropy", p, format!("n={n}, m={m}, apen={apen:.6}")))
}

/// Runs all seven tests with length-appropriate default parameters.
pub fn run_all_tests(s: &PackedBits) -> Result<Vec<TestResult>> {
    let n = s.len();
    let log2n = (n as f64).log2().floor() as usize;
    let block_len = (n / 64).max(20);
    let serial_m = 16.min(log2n.saturating_sub(2)).max(2);
    let apen_m = 10.min(log2n.saturating_sub(5)).max(1);
    Ok(vec![
        monobit_frequency(s)?,
        block_frequency(s, block_len)?,
        runs(s)?,
        longest_run_in_block(s)?,
        cumulative_sums(s)?,
        serial(s, serial_m)?,
        approximate_entropy(s, apen_m)?,
    ])
}

/// Pass proportion of one test over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub test_name: String,
    pub proportion_passed: f64,
    pub within_ci: bool,
}

/// Batch verdict: per-test pass proportions against the SP 800-22
/// proportion confidence interval (1 − α) ± 3·√(α(1−α)/k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub alpha: f64,
    pub batch_size: usize,
    pub sequence_len: usize,
    pub ci_low: f64,
    pub ci_high: f64,
    pub tests: Vec<SuiteEntry>,
    pub all_within_ci: bool,
}

pub fn run_suite(sequences: &[PackedBits], alpha: f64) -> Result<SuiteReport> {
    let k = sequences.len();
    if k < 10 {
        return Err(Error::domain(format!("suite needs a batch of at least 10 sequences, got {k}")));
    }
    if alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let per_sequence: Vec<Vec<TestResult>> =
        sequences.par_iter().map(run_all_tests).collect::<Result<_>>()?;

    let names: Vec<String> = per_sequence[0].iter().map(|r| r.test_name.clone()).collect();
    let margin = 3.0 * (alpha * (1.0 - alpha) / k as f64).sqrt();
    let (ci_low, ci_high) = (1.0 - alpha - margin, 1.0 - alpha + margin);
    let tests: Vec<SuiteEntry> = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let passed = per_sequence.iter().filter(|rs| rs[i].p_value >= alpha).count();
            let proportion_passed = passed as f64 / k as f64;
            SuiteEntry {
                test_name: name.clone(),
                proportion_passed,
                within_ci: (ci_low..=ci_high).contains(&proportion_passed),
            }
        })
        .collect();
    let all_within_ci = tests.iter().all(|t| t.within_ci);
    Ok(SuiteReport {
        alpha,
        batch_size: k,
        sequence_len: sequences[0].len(),
        ci_low,
        ci_high,
        tests,
        all_within_ci,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;
    use crate::toeplitz::{extract_stream, ExtractorConfig};
    use rand::Rng;
    use rand_chacha::rand_core::RngCore;

    fn from_pattern(pattern: &[bool], n: usize) -> PackedBits {
        PackedBits::from_bools(&(0..n).map(|i| pattern[i % pattern.len()]).collect::<Vec<_>>())
    }

    fn random_bits(seed: u64, n: usize) -> PackedBits {
        let mut bytes = vec![0u8; n.div_ceil(8)];
        rng_from_seed(seed).fill_bytes(&mut bytes);
        PackedBits::from_bytes(bytes, n).unwrap()
    }

    /// Independent regularized upper incomplete gamma: power series below
    /// a + 1, Lentz continued fraction above.
    fn igamc_oracle(a: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let ln_gamma = statrs::function::gamma::ln_gamma(a);
        let prefactor = (a * x.ln() - x - ln_gamma).exp();
        if x < a + 1.0 {
            let mut term = 1.0 / a;
            let mut sum = term;
            let mut denom = a;
            for _ in 0..10_000 {
                denom += 1.0;
                term *= x / denom;
                sum += term;
                if term < sum * 1e-17 {
                    break;
                }
            }
            1.0 - sum * prefactor
        } else {
            let mut b = x + 1.0 - a;
            let mut c = 1e308;
            let mut d = 1.0 / b;
            let mut h = d;
            for i in 1..10_000 {
                let an = -(i as f64) * (i as f64 - a);
                b += 2.0;
                d = an * d + b;
                if d.abs() < 1e-300 {
                    d = 1e-300;
                }
                c = b + an / c;
                if c.abs() < 1e-300 {
                    c = 1e-300;
                }
                d = 1.0 / d;
                let del = d * c;
                h *= del;
                if (del - 1.0).abs() < 1e-16 {
                    break;
                }
            }
            prefactor * h
        }
    }

    #[test]
    fn igamc_matches_series_and_closed_forms() {
        for &(a, x) in
            &[(0.5, 0.3), (1.0, 2.0), (1.5, 2.44), (2.0, 0.8), (8.0, 10.0), (32.0, 30.0), (512.0, 500.0)]
        {
            let lib = igamc(a, x);
            let oracle = igamc_oracle(a, x);
            assert!(
                (lib - oracle).abs() <= 1e-10 * oracle.max(1e-30),
                "a={a} x={x}: {lib} vs {oracle}"
            );
        }
        // Integer and half-integer shapes have elementary forms.
        assert!((igamc(1.0, 2.0) - (-2.0f64).exp()).abs() < 1e-14);
        assert!((igamc(2.0, 0.8) - 1.8 * (-0.8f64).exp()).abs() < 1e-14);
        // The erfc on the closed-form side is only ~1e-11 accurate.
        let x: f64 = 2.441231;
        let closed = erfc(x.sqrt()) + 2.0 * (x / std::f64::consts::PI).sqrt() * (-x).exp();
        assert!((igamc(1.5, x) - closed).abs() < 1e-10);
    }

    #[test]
    fn monobit_extremes_and_hand_value() {
        let zeros = PackedBits::zeros(1000);
        let r = monobit_frequency(&zeros).unwrap();
        assert!(r.p_value < 1e-100, "p {}", r.p_value);
        assert!(!r.passed);

        let balanced = from_pattern(&[true, false], 1000);
        let r = monobit_frequency(&balanced).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(r.passed);

        // 60 ones in 100 bits: s_obs = 2, p = erfc(√2) = 2Φ(−2).
        let mut bits = vec![true; 60];
        bits.extend(vec![false; 40]);
        let r = monobit_frequency(&PackedBits::from_bools(&bits)).unwrap();
        assert!((r.p_value - 0.04550026389635842).abs() < 1e-10);

        assert!(monobit_frequency(&PackedBits::zeros(99)).is_err());
    }

    #[test]
    fn block_frequency_hand_value() {
        // Blocks of 50 with 30 and 20 ones: χ² = 4, p = e^{−2}.
        let mut bits = vec![true; 30];
        bits.extend(vec![false; 20]);
        bits.extend(vec![true; 20]);
        bits.extend(vec![false; 30]);
        let r = block_frequency(&PackedBits::from_bools(&bits), 50).unwrap();
        assert!((r.p_value - (-2.0f64).exp()).abs() < 1e-12);

        let balanced = from_pattern(&[true, false], 1000);
        let r = block_frequency(&balanced, 100).unwrap();
        assert_eq!(r.p_value, 1.0);

        assert!(block_frequency(&balanced, 0).is_err());
        assert!(block_frequency(&balanced, 1001).is_err());
    }

    #[test]
    fn runs_alternation_fails_and_grouped_patterns_score() {
        let alt = from_pattern(&[false, true], 100);
        let r = runs(&alt).unwrap();
        // V = 100 against expectation 50: erfc(50/(2·√200·0.25)).
        let expect = erfc(50.0 / (2.0 * 200f64.sqrt() * 0.25));
        assert!(r.p_value < 1e-10);
        assert!((r.p_value - expect).abs() < 1e-20);
        assert!(!r.passed);

        // 50 ones then 50 zeros: V = 2, extreme the other way.
        let mut bits = vec![true; 50];
        bits.extend(vec![false; 50]);
        let r = runs(&PackedBits::from_bools(&bits)).unwrap();
        assert!(r.p_value < 1e-10);

        // "1100" repeated: V = 50 exactly matches expectation, p = 1.
        let r = runs(&from_pattern(&[true, true, false, false], 100)).unwrap();
        assert_eq!(r.p_value, 1.0);

        // Heavily biased input skips the test with p = 0.
        let r = runs(&PackedBits::zeros(100)).unwrap();
        assert_eq!(r.p_value, 0.0);
        assert!(r.params_echo.contains("precondition"));
    }

    #[test]
    fn longest_run_reference_case() {
        // 16 blocks of 8 with per-block longest-ones-runs categorized as
        // counts (4, 9, 3, 0); the reference arithmetic gives χ² = 4.882457
        // and p = 0.180609.
        let b1 = [false, true, false, true, false, true, false, true]; // run 1
        let b2 = [false, true, true, false, false, true, true, false]; // run 2
        let b3 = [false, true, true, true, false, false, false, false]; // run 3
        let mut bits = Vec::new();
        for _ in 0..4 {
            bits.extend_from_slice(&b1);
        }
        for _ in 0..9 {
            bits.extend_from_slice(&b2);
        }
        for _ in 0..3 {
            bits.extend_from_slice(&b3);
        }
        let r = longest_run_in_block(&PackedBits::from_bools(&bits)).unwrap();

        // Independent recomputation: exact category probabilities and the
        // half-integer-shape closed form Q(3/2, x) = erfc(√x) + 2√(x/π)e^{−x}.
        let pi = [55.0 / 256.0, 94.0 / 256.0, 59.0 / 256.0, 48.0 / 256.0];
        let counts = [4.0f64, 9.0, 3.0, 0.0];
        let chi2: f64 =
            counts.iter().zip(&pi).map(|(&c, &p)| (c - 16.0 * p).powi(2) / (16.0 * p)).sum();
        assert!((chi2 - 4.882457).abs() < 1e-5);
        let x = chi2 / 2.0;
        let closed = erfc(x.sqrt()) + 2.0 * (x / std::f64::consts::PI).sqrt() * (-x).exp();
        assert!((r.p_value - closed).abs() < 1e-10, "p {}", r.p_value);
        assert!((r.p_value - 0.180609).abs() < 1e-4);

        assert!(longest_run_in_block(&PackedBits::zeros(127)).is_err());
        let r = longest_run_in_block(&PackedBits::zeros(2048)).unwrap();
        assert!(r.p_value < 1e-10); // every block in the lowest category
    }

    #[test]
    fn cusum_matches_random_walk_simulation() {
        let n = 1000;
        let s = random_bits(101, n);
        let r = cumulative_sums(&s).unwrap();
        // z from the same sequence, recomputed naively.
        let mut sum = 0i64;
        let mut z = 0i64;
        for b in s.iter() {
            sum += if b { 1 } else { -1 };
            z = z.max(sum.abs());
        }
        assert!(r.params_echo.contains(&format!("z={z}")));

        // Monte-Carlo estimate of P(max|S_k| >= z) over random walks.
        let mut rng = rng_from_seed(555);
        let trials = 50_000;
        let mut hits = 0u64;
        for _ in 0..trials {
            let mut acc = 0i64;
            let mut peak = 0i64;
            for _ in 0..n {
                acc += if rng.gen_bool(0.5) { 1 } else { -1 };
                peak = peak.max(acc.abs());
            }
            if peak >= z {
                hits += 1;
            }
        }
        let mc = hits as f64 / trials as f64;
        assert!((r.p_value - mc).abs() < 0.015, "formula {} vs mc {mc}", r.p_value);
    }

    #[test]
    fn cusum_extremes() {
        let r = cumulative_sums(&PackedBits::zeros(1000)).unwrap();
        assert!(r.p_value < 1e-100);
        // Alternation never strays past |S| = 1, which every walk reaches.
        let r = cumulative_sums(&from_pattern(&[true, false], 1000)).unwrap();
        assert!(r.p_value > 0.97, "p {}", r.p_value);
    }

    /// Naive ψ² by hashing window strings.
    fn psi_squared_naive(bits: &[bool], m: usize) -> f64 {
        if m == 0 {
            return 0.0;
        }
        let n = bits.len();
        let mut counts = std::collections::HashMap::new();
        for i in 0..n {
            let key: Vec<bool> = (0..m).map(|j| bits[(i + j) % n]).collect();
            *counts.entry(key).or_insert(0u64) += 1;
        }
        let sum_sq: f64 = counts.values().map(|&c| (c as f64).powi(2)).sum();
        (2f64.powi(m as i32) / n as f64) * sum_sq - n as f64
    }

    #[test]
    fn serial_hand_case_and_naive_equivalence() {
        // Cyclic pattern counts for 0011011101 give ψ²_3 = 2.8, ψ²_2 = 1.2,
        // ψ²_1 = 0.4, so P1 = Q(2, 0.8) and P2 = Q(1, 0.4).
        let base = [false, false, true, true, false, true, true, true, false, true];
        let bits: Vec<bool> = base.to_vec();
        assert!((psi_squared(&bits, 3) - 2.8).abs() < 1e-12);
        assert!((psi_squared(&bits, 2) - 1.2).abs() < 1e-12);
        assert!((psi_squared(&bits, 1) - 0.4).abs() < 1e-12);
        assert!((igamc(2.0, 0.8) - 1.8 * (-0.8f64).exp()).abs() < 1e-12);
        assert!((igamc(1.0, 0.4) - (-0.4f64).exp()).abs() < 1e-12);

        for seed in 0..20u64 {
            let s = random_bits(seed, 1000);
            let bits: Vec<bool> = s.iter().collect();
            let m = 3;
            let d1 = psi_squared_naive(&bits, m) - psi_squared_naive(&bits, m - 1);
            let d2 = psi_squared_naive(&bits, m) - 2.0 * psi_squared_naive(&bits, m - 1)
                + psi_squared_naive(&bits, m - 2);
            let (p1, p2) = serial_p_values(&s, m).unwrap();
            assert!((p1 - igamc_oracle(2.0, d1 / 2.0)).abs() < 1e-10, "seed {seed}");
            assert!((p2 - igamc_oracle(1.0, d2 / 2.0)).abs() < 1e-10, "seed {seed}");
            let r = serial(&s, m).unwrap();
            assert_eq!(r.p_value, p1.clamp(0.0, 1.0));
        }
        assert!(serial(&random_bits(0, 1000), 1).is_err());
        assert!(serial(&random_bits(0, 100), 6).is_err()); // needs 256 bits
    }

    #[test]
    fn approximate_entropy_periodic_and_naive_equivalence() {
        // "1100" repeated is perfectly predictable at m = 2: ApEn = 0,
        // χ² = 2n·ln2, p ≈ 0.
        let s = from_pattern(&[true, true, false, false], 100);
        let r = approximate_entropy(&s, 2).unwrap();
        assert!(r.p_value < 1e-20, "p {}", r.p_value);
        assert!(r.params_echo.contains("apen=0.000000"));

        let naive_phi = |bits: &[bool], m: usize| -> f64 {
            let n = bits.len();
            let mut counts = std::collections::HashMap::new();
            for i in 0..n {
                let key: Vec<bool> = (0..m).map(|j| bits[(i + j) % n]).collect();
                *counts.entry(key).or_insert(0u64) += 1;
            }
            counts
                .values()
                .map(|&c| {
                    let f = c as f64 / n as f64;
                    f * f.ln()
                })
                .sum()
        };
        for seed in 0..20u64 {
            let s = random_bits(seed + 100, 1000);
            let bits: Vec<bool> = s.iter().collect();
            let m = 3;
            let apen = naive_phi(&bits, m) - naive_phi(&bits, m + 1);
            let chi2 = 2.0 * 1000.0 * (std::f64::consts::LN_2 - apen);
            let expect = igamc_oracle(4.0, chi2 / 2.0);
            let r = approximate_entropy(&s, m).unwrap();
            assert!((r.p_value - expect).abs() < 1e-10, "seed {seed}");
        }
        assert!(approximate_entropy(&random_bits(0, 100), 5).is_err());
    }

    #[test]
    fn results_are_deterministic() {
        let s = random_bits(7, 10_000);
        let a = run_all_tests(&s).unwrap();
        let b = run_all_tests(&s).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!((0.0..=1.0).contains(&r.p_value), "{}: {}", r.test_name, r.p_value);
        }
        assert_eq!(a.len(), 7);
    }

    #[test]
    fn p_values_are_uniform_on_reference_generator() {
        // Kolmogorov–Smirnov against U(0,1) over 1000 random sequences,
        // 1% critical value 1.628/√1000. Serial contributes both of its
        // P-values. Parameters sit well inside each test's asymptotic
        // regime at this sequence length.
        let n_seq = 1000usize;
        let seq_len = 50_000;
        let names =
            ["monobit", "block", "runs", "longest-run", "cusum", "serial-p1", "serial-p2", "apen"];
        let results: Vec<Vec<f64>> = (0..n_seq as u64)
            .into_par_iter()
            .map(|seed| {
                let s = random_bits(seed * 31 + 7, seq_len);
                let (sp1, sp2) = serial_p_values(&s, 8).unwrap();
                vec![
                    monobit_frequency(&s).unwrap().p_value,
                    block_frequency(&s, 1000).unwrap().p_value,
                    runs(&s).unwrap().p_value,
                    longest_run_in_block(&s).unwrap().p_value,
                    cumulative_sums(&s).unwrap().p_value,
                    sp1,
                    sp2,
                    approximate_entropy(&s, 6).unwrap().p_value,
                ]
            })
            .collect();
        let crit = 1.628 / (n_seq as f64).sqrt();
        for (t, name) in names.iter().enumerate() {
            let mut ps: Vec<f64> = results.iter().map(|r| r[t]).collect();
            ps.sort_by(|a, b| a.total_cmp(b));
            let mut d = 0.0f64;
            for (i, &p) in ps.iter().enumerate() {
                d = d.max(((i + 1) as f64 / n_seq as f64 - p).abs());
                d = d.max((p - i as f64 / n_seq as f64).abs());
            }
            assert!(d < crit, "{name}: KS statistic {d} at crit {crit}");
        }
    }

    #[test]
    fn extraction_fixes_a_biased_source() {
        let n_raw = 1_000_000;
        let mut rng = rng_from_seed(909);
        let biased: Vec<bool> = (0..n_raw).map(|_| rng.gen_bool(0.6)).collect();
        let raw = PackedBits::from_bools(&biased);
        let r = monobit_frequency(&raw).unwrap();
        assert!(r.p_value < 1e-10, "raw bias should fail, p {}", r.p_value);

        // −log2(0.6) ≈ 0.737 bits of min-entropy per raw bit.
        let cfg =
            ExtractorConfig { n_in: 1024, m_out: 700, epsilon_hash: 1e-20, h_min_per_bit: 0.73 };
        let codes: Vec<u16> = biased.iter().map(|&b| b as u16).collect();
        let out = extract_stream(&codes, 1, &cfg, 313, 1).unwrap();
        let extracted = &out.channels[0];
        assert!(extracted.len() > 600_000);
        let r = monobit_frequency(extracted).unwrap();
        assert!(r.passed, "extracted bits should pass, p {}", r.p_value);
    }

    #[test]
    fn suite_ci_matches_the_arithmetic_oracle() {
        let seqs: Vec<PackedBits> = (0..1000u64).map(|s| random_bits(s + 5000, 1000)).collect();
        let report = run_suite(&seqs, 0.01).unwrap();
        assert!((report.ci_low - 0.98056).abs() < 1e-5);
        assert!((report.ci_high - 0.99944).abs() < 1e-5);
        assert!(report.ci_low < report.ci_high);
        assert_eq!(report.batch_size, 1000);
    }

    #[test]
    fn suite_fails_all_zero_batches_and_passes_reference_bits() {
        let zeros: Vec<PackedBits> = (0..12).map(|_| PackedBits::zeros(10_000)).collect();
        let report = run_suite(&zeros, 0.01).unwrap();
        for t in &report.tests {
            assert_eq!(t.proportion_passed, 0.0, "{}", t.test_name);
            assert!(!t.within_ci);
        }
        assert!(!report.all_within_ci);

        let good: Vec<PackedBits> = (0..100u64).map(|s| random_bits(s + 777, 100_000)).collect();
        let report = run_suite(&good, 0.01).unwrap();
        for t in &report.tests {
            assert!(t.within_ci, "{}: proportion {}", t.test_name, t.proportion_passed);
        }
        assert!(report.all_within_ci);

        assert!(run_suite(&zeros[..5], 0.01).is_err());
        assert!(run_suite(&zeros, 0.0).is_err());
    }
}
