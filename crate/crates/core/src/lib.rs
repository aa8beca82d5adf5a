//! Design and verification toolkit for a GHz-class balanced homodyne
//! detector used as a vacuum-fluctuation randomness source.
//!
//! The crate walks the whole chain at desk scale: photodiode and amplifier
//! noise budgets, two-port S-parameter analysis of the matching network,
//! time-domain simulation of the detector output, min-entropy accounting
//! under ADC quantization, Toeplitz post-processing, Husimi-function state
//! checks, and a statistical test battery for the extracted bits.
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example detector_snr        # photodiode SNR + amplifier cascade budgets
//! cargo run --example stability_report    # K-factor / mu-factor screening of a two-port
//! cargo run --example ga_match            # genetic search for a matching network
//! cargo run --example sensitivity_ranking # which element tolerances matter most
//! cargo run --example homodyne_psd        # simulated output spectra vs LO power
//! cargo run --example cmrr_demo           # common-mode rejection from tone injection
//! cargo run --example entropy_budget      # quantized min-entropy, empirical vs model
//! cargo run --example toeplitz_demo       # seeded extraction, fast path vs naive product
//! cargo run --example husimi_demo         # reconstructed vacuum Q-function overlap
//! cargo run --example nist_demo           # randomness test battery on extracted bits
//! cargo run --example pipeline_demo       # end-to-end source -> bits -> verdict
//! ```
//!
//! The `bhdkit` binary exposes the same operations as subcommands for use
//! from scripts; see `bhdkit --help`.

pub mod bits;
pub mod config;
pub mod detector;
pub mod entropy;
pub mod error;
pub mod homodyne;
pub mod io;
pub mod nist;
pub mod pipeline;
pub mod report;
pub mod rf;
pub mod spectrum;
pub mod toeplitz;
pub mod tomography;

mod db;
mod seeding;

pub use db::{db_to_linear, linear_to_db, power_db, round_db};
pub use detector::Mode;
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
