//! On-disk formats shared by the tools: raw little-endian `f32` sample
//! streams, packed bit files, quantizer code files, and CSV series. Every
//! binary format is paired with a JSON sidecar at `<path>.json` carrying
//! the metadata the raw bytes cannot — without the sidecar a bit file is
//! just bytes, with it the run is reproducible.

use std::fs;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bits::PackedBits;
use crate::{Error, Result};
use crate::homodyne::SampleStream;
use crate::nist::SuiteReport;
use crate::spectrum::SpectrumEstimate;
use crate::tomography::HusimiGrid;

/// Sidecar convention: metadata for `x.bin` lives at `x.bin.json`.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    let mut os = data_path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Metadata for a raw sample stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSidecar {
    /// Sample rate, Hz.
    pub sample_rate: f64,
    /// LO power the stream was generated at, W.
    pub lo_power: f64,
    /// Seed the generator was run with.
    pub rng_seed: u64,
    pub n_samples: u64,
}

/// Writes samples as raw little-endian `f32` plus a `<path>.json` sidecar.
///
/// `f32` keeps files half the size; the ~7-digit precision is far below
/// the noise floor of anything the stream feeds.
pub fn write_sample_stream(path: &Path, stream: &SampleStream, rng_seed: u64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for &v in &stream.samples {
        w.write_all(&(v as f32).to_le_bytes())?;
    }
    w.flush()?;
    let sidecar = StreamSidecar {
        sample_rate: stream.sample_rate,
        lo_power: stream.lo_power,
        rng_seed,
        n_samples: stream.samples.len() as u64,
    };
    write_json(&sidecar_path(path), &sidecar)
}

pub fn read_sample_stream(path: &Path) -> Result<(SampleStream, StreamSidecar)> {
    let sidecar: StreamSidecar = read_json(&sidecar_path(path))?;
    let bytes = fs::read(path)?;
    if bytes.len() % 4 != 0 {
        return Err(Error::domain(format!(
            "sample file {} has {} bytes, not a multiple of 4",
            path.display(),
            bytes.len()
        )));
    }
    let n = bytes.len() / 4;
    if n as u64 != sidecar.n_samples {
        return Err(Error::domain(format!(
            "sample file holds {} samples but sidecar says {}",
            n, sidecar.n_samples
        )));
    }
    let samples = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let stream = SampleStream {
        samples,
        sample_rate: sidecar.sample_rate,
        lo_power: sidecar.lo_power,
    };
    Ok((stream, sidecar))
}

/// Metadata for a packed bit file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitsSidecar {
    /// Exact bit count; the file is padded to a whole byte with zeros.
    pub n_bits: u64,
    /// Extractor input block size.
    pub n_in: usize,
    /// Extractor output block size.
    pub m_out: usize,
    /// SHA-256 of the Toeplitz seed that produced the bits.
    pub seed_digest: String,
    pub blocks_processed: u64,
}

/// Writes bits packed MSB-first plus a `<path>.json` sidecar. The packed
/// format is what Diehard/TestU01-style consumers read directly.
pub fn write_bit_file(path: &Path, bits: &PackedBits, sidecar: &BitsSidecar) -> Result<()> {
    if sidecar.n_bits != bits.len() as u64 {
        return Err(Error::domain(format!(
            "sidecar n_bits {} does not match bit count {}",
            sidecar.n_bits,
            bits.len()
        )));
    }
    fs::write(path, bits.as_bytes())?;
    write_json(&sidecar_path(path), sidecar)
}

pub fn read_bit_file(path: &Path) -> Result<(PackedBits, BitsSidecar)> {
    let sidecar: BitsSidecar = read_json(&sidecar_path(path))?;
    let bytes = fs::read(path)?;
    let expect = (sidecar.n_bits as usize).div_ceil(8);
    if bytes.len() != expect {
        return Err(Error::domain(format!(
            "bit file holds {} bytes but sidecar n_bits {} needs {}",
            bytes.len(),
            sidecar.n_bits,
            expect
        )));
    }
    let bits = PackedBits::from_bytes(bytes, sidecar.n_bits as usize)?;
    Ok((bits, sidecar))
}

/// Metadata for a quantizer code file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodesSidecar {
    pub adc_bits: u32,
    pub n_codes: u64,
    /// Sample rate of the digitized stream, Hz.
    pub sample_rate: f64,
    /// LO power the stream was generated at, W.
    pub lo_power: f64,
}

/// Writes quantizer codes: one byte per code when `adc_bits <= 8`, two
/// little-endian bytes otherwise.
pub fn write_code_file(path: &Path, codes: &[u16], sidecar: &CodesSidecar) -> Result<()> {
    if sidecar.adc_bits == 0 || sidecar.adc_bits > 16 {
        return Err(Error::domain(format!(
            "adc_bits {} outside 1..=16",
            sidecar.adc_bits
        )));
    }
    if sidecar.n_codes != codes.len() as u64 {
        return Err(Error::domain(format!(
            "sidecar n_codes {} does not match code count {}",
            sidecar.n_codes,
            codes.len()
        )));
    }
    let limit = 1u32 << sidecar.adc_bits;
    let mut w = BufWriter::new(File::create(path)?);
    for &c in codes {
        if u32::from(c) >= limit {
            return Err(Error::domain(format!(
                "code {c} does not fit in {} bits",
                sidecar.adc_bits
            )));
        }
        if sidecar.adc_bits <= 8 {
            w.write_all(&[c as u8])?;
        } else {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    w.flush()?;
    write_json(&sidecar_path(path), sidecar)
}

pub fn read_code_file(path: &Path) -> Result<(Vec<u16>, CodesSidecar)> {
    let sidecar: CodesSidecar = read_json(&sidecar_path(path))?;
    if sidecar.adc_bits == 0 || sidecar.adc_bits > 16 {
        return Err(Error::domain(format!(
            "adc_bits {} outside 1..=16",
            sidecar.adc_bits
        )));
    }
    let bytes = fs::read(path)?;
    let width = if sidecar.adc_bits <= 8 { 1 } else { 2 };
    if bytes.len() as u64 != sidecar.n_codes * width as u64 {
        return Err(Error::domain(format!(
            "code file holds {} bytes but sidecar needs {}",
            bytes.len(),
            sidecar.n_codes * width as u64
        )));
    }
    let limit = 1u32 << sidecar.adc_bits;
    let codes: Vec<u16> = if width == 1 {
        bytes.iter().map(|&b| u16::from(b)).collect()
    } else {
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect()
    };
    if let Some(&bad) = codes.iter().find(|&&c| u32::from(c) >= limit) {
        return Err(Error::domain(format!(
            "code {bad} does not fit in {} bits",
            sidecar.adc_bits
        )));
    }
    Ok((codes, sidecar))
}

/// One header line then one line per row; callers format the rows.
pub fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

/// `frequency_hz,psd_db` rows, one per bin.
pub fn write_spectrum_csv(path: &Path, spectrum: &SpectrumEstimate) -> Result<()> {
    let rows = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.psd_db)
        .map(|(f, p)| format!("{f},{p}"));
    write_csv(path, "frequency_hz,psd_db", rows)
}

/// `generation,best_cost` rows from an optimizer trace.
pub fn write_trace_csv(path: &Path, trace: &[f64]) -> Result<()> {
    let rows = trace
        .iter()
        .enumerate()
        .map(|(g, c)| format!("{g},{c}"));
    write_csv(path, "generation,best_cost", rows)
}

/// `re_alpha,im_alpha,density` rows, one per grid cell, row-major.
pub fn write_husimi_csv(path: &Path, grid: &HusimiGrid) -> Result<()> {
    let spec = &grid.spec;
    let mut rows = Vec::with_capacity(spec.n_re * spec.n_im);
    for i_im in 0..spec.n_im {
        for i_re in 0..spec.n_re {
            let (re, im) = spec.cell_center(i_re, i_im);
            rows.push(format!("{re},{im},{}", grid.value(i_re, i_im)));
        }
    }
    write_csv(path, "re_alpha,im_alpha,density", rows)
}

/// `test_name,proportion_passed,within_ci` rows, one per test.
pub fn write_suite_csv(path: &Path, report: &SuiteReport) -> Result<()> {
    let rows = report
        .tests
        .iter()
        .map(|t| format!("{},{},{}", t.test_name, t.proportion_passed, t.within_ci));
    write_csv(path, "test_name,proportion_passed,within_ci", rows)
}
