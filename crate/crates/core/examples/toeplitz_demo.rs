//! Toeplitz extraction at the flagship operating point: output sizing from
//! the leftover-hash bound, a bit-for-bit check of the word-packed multiply
//! against the definition, and the multi-channel throughput picture.
//!
//! Run: `cargo run --example toeplitz_demo --release`

use bhdkit::bits::PackedBits;
use bhdkit::toeplitz::{
    effective_bit_rate, extraction_efficiency_percent, size_output, throughput_bench,
    ExtractorConfig, ToeplitzExtractor, ToeplitzSeed,
};
use bhdkit::Mode;

fn main() -> bhdkit::Result<()> {
    let cfg = ExtractorConfig::default();
    println!(
        "Block: {} bits in, epsilon {:.0e}, certified {:.5} bits of entropy per input bit",
        cfg.n_in, cfg.epsilon_hash, cfg.h_min_per_bit
    );

    let m = size_output(cfg.n_in, cfg.h_min_per_bit, cfg.epsilon_hash, Mode::PaperLiteral)?;
    println!("output size m = {m} ({:.2}% extraction efficiency)", extraction_efficiency_percent(m, cfg.n_in));
    let m_std = size_output(cfg.n_in, cfg.h_min_per_bit, cfg.epsilon_hash, Mode::Standard)?;
    println!("(the standard log2 security penalty would allow only m = {m_std})\n");

    // The fast path multiplies 64 matrix bits at a time with AND + popcount.
    // Check it against the textbook row-by-row product.
    let seed = ToeplitzSeed::generate(&cfg, 7)?;
    println!("seed digest {}", seed.digest());
    let ex = ToeplitzExtractor::build(&seed, &cfg)?;
    let block = random_block(cfg.n_in, 99);
    let fast = ex.extract_block(&block)?;
    let naive = naive_product(&ex, &block);
    assert_eq!(fast, naive);
    println!("fast path == naive GF(2) product on a random block: true");
    println!("first output bits: {}", preview(&fast, 48));

    // Throughput: one matrix per channel, blocks fanned out round-robin.
    let report = throughput_bench(&cfg, 4096, 4, 7)?;
    println!("\n{} blocks, {} workers:", 4096, report.workers);
    println!("  single core  {:>7.1} Mbit/s out", report.single_core_bps / 1e6);
    println!("  parallel     {:>7.1} Mbit/s out  (x{:.2})", report.parallel_bps / 1e6, report.speedup);
    println!("  (speedup tracks physical cores; the bits never depend on it)");
    println!(
        "  4 digitizer channels, 8 bits at 0.8 GS/s each: {:.3} Gbit/s extracted",
        effective_bit_rate(4, 0.8e9, 8, &cfg) / 1e9
    );
    Ok(())
}

fn random_block(n: usize, seed: u64) -> PackedBits {
    // Tiny xorshift; the block just has to be irregular, not high quality.
    let mut state = seed | 1;
    let mut bits = PackedBits::with_capacity(n);
    for _ in 0..n {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        bits.push(state & 1 == 1);
    }
    bits
}

fn naive_product(ex: &ToeplitzExtractor, x: &PackedBits) -> PackedBits {
    let mut y = PackedBits::zeros(ex.m_out());
    for i in 0..ex.m_out() {
        let mut parity = false;
        for j in 0..ex.n_in() {
            parity ^= ex.matrix_bit(i, j) && x.get(j);
        }
        y.set(i, parity);
    }
    y
}

fn preview(bits: &PackedBits, n: usize) -> String {
    bits.iter().take(n).map(|b| if b { '1' } else { '0' }).collect()
}
