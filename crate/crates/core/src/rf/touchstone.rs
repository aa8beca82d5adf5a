//! Touchstone v1 two-port (.s2p) reading and writing.
//!
//! Version 1 only; files with v2 keyword blocks are rejected. Two-port data
//! rows use the v1 column order S11 S21 S12 S22. Comments start at `!`,
//! the option line is `# <unit> S <MA|DB|RI> R <z>`, and frequencies must
//! be strictly increasing (trailing noise-parameter blocks, which restart
//! the frequency column, are not supported).

use num_complex::Complex64;

use crate::rf::network::{FrequencySweep, SMatrix, TwoPortNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TouchstoneFormat {
    /// real, imaginary
    Ri,
    /// linear magnitude, angle in degrees
    Ma,
    /// 20 log10 magnitude, angle in degrees
    Db,
}

impl TouchstoneFormat {
    fn keyword(&self) -> &'static str {
        match self {
            TouchstoneFormat::Ri => "RI",
            TouchstoneFormat::Ma => "MA",
            TouchstoneFormat::Db => "DB",
        }
    }

    fn to_complex(self, a: f64, b: f64) -> Complex64 {
        match self {
            TouchstoneFormat::Ri => Complex64::new(a, b),
            TouchstoneFormat::Ma => Complex64::from_polar(a, b.to_radians()),
            TouchstoneFormat::Db => {
                Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians())
            }
        }
    }

    fn from_complex(self, s: Complex64) -> (f64, f64) {
        match self {
            TouchstoneFormat::Ri => (s.re, s.im),
            TouchstoneFormat::Ma => (s.norm(), s.arg().to_degrees()),
            TouchstoneFormat::Db => {
                let mag = s.norm();
                // Floor for exact zeros; -400 dB is far below any physical
                // dynamic range and parses back to a negligible magnitude.
                let db = if mag > 0.0 { 20.0 * mag.log10() } else { -400.0 };
                (db, s.arg().to_degrees())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    Khz,
    Mhz,
    Ghz,
}

impl FreqUnit {
    fn multiplier(&self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::Khz => 1e3,
            FreqUnit::Mhz => 1e6,
            FreqUnit::Ghz => 1e9,
        }
    }

    fn keyword(&self) -> &'static str {
        match self {
            FreqUnit::Hz => "HZ",
            FreqUnit::Khz => "KHZ",
            FreqUnit::Mhz => "MHZ",
            FreqUnit::Ghz => "GHZ",
        }
    }
}

struct Options {
    unit: FreqUnit,
    format: TouchstoneFormat,
    z_ref: f64,
}

fn parse_option_line(line: &str, line_no: usize) -> Result<Options> {
    let mut unit = FreqUnit::Ghz;
    let mut format = TouchstoneFormat::Ma;
    let mut z_ref = 50.0;
    let mut tokens = line[1..].split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => unit = FreqUnit::Hz,
            "KHZ" => unit = FreqUnit::Khz,
            "MHZ" => unit = FreqUnit::Mhz,
            "GHZ" => unit = FreqUnit::Ghz,
            "S" => {}
            "Y" | "Z" | "H" | "G" => {
                return Err(Error::TouchstoneParse {
                    line: line_no,
                    message: format!("only S-parameter files are supported, got {tok}"),
                });
            }
            "RI" => format = TouchstoneFormat::Ri,
            "MA" => format = TouchstoneFormat::Ma,
            "DB" => format = TouchstoneFormat::Db,
            "R" => {
                let val = tokens.next().ok_or_else(|| Error::TouchstoneParse {
                    line: line_no,
                    message: "R keyword without a resistance value".into(),
                })?;
                z_ref = val.parse::<f64>().map_err(|_| Error::TouchstoneParse {
                    line: line_no,
                    message: format!("invalid reference resistance {val:?}"),
                })?;
            }
            other => {
                return Err(Error::TouchstoneParse {
                    line: line_no,
                    message: format!("unknown option token {other:?}"),
                });
            }
        }
    }
    if !(z_ref > 0.0) {
        return Err(Error::TouchstoneParse {
            line: line_no,
            message: format!("reference resistance must be positive, got {z_ref}"),
        });
    }
    Ok(Options { unit, format, z_ref })
}

/// Parses a Touchstone v1 two-port file.
pub fn parse_touchstone(text: &str) -> Result<TwoPortNetwork> {
    let mut options: Option<Options> = None;
    let mut freqs: Vec<f64> = Vec::new();
    let mut matrices: Vec<SMatrix> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('!') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            return Err(Error::TouchstoneParse {
                line: line_no,
                message: format!(
                    "keyword block {line:?} is Touchstone v2 syntax; only v1 is supported"
                ),
            });
        }
        if let Some(stripped) = line.strip_prefix('#') {
            if options.is_some() {
                return Err(Error::TouchstoneParse {
                    line: line_no,
                    message: "multiple option lines".into(),
                });
            }
            options = Some(parse_option_line(&format!("#{stripped}"), line_no)?);
            continue;
        }
        let opts = options.as_ref().ok_or_else(|| Error::TouchstoneParse {
            line: line_no,
            message: "data before option line".into(),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(Error::TouchstoneParse {
                line: line_no,
                message: format!(
                    "expected 9 columns (freq + 4 S-parameter pairs), got {}",
                    fields.len()
                ),
            });
        }
        let mut vals = [0.0f64; 9];
        for (i, f) in fields.iter().enumerate() {
            vals[i] = f.parse::<f64>().map_err(|_| Error::TouchstoneParse {
                line: line_no,
                message: format!("invalid number {f:?}"),
            })?;
        }
        let freq = vals[0] * opts.unit.multiplier();
        if let Some(&last) = freqs.last() {
            if freq <= last {
                return Err(Error::TouchstoneParse {
                    line: line_no,
                    message: format!(
                        "non-monotonic frequency {freq} Hz after {last} Hz"
                    ),
                });
            }
        }
        let fmt = opts.format;
        // v1 two-port column order: S11 S21 S12 S22.
        let s11 = fmt.to_complex(vals[1], vals[2]);
        let s21 = fmt.to_complex(vals[3], vals[4]);
        let s12 = fmt.to_complex(vals[5], vals[6]);
        let s22 = fmt.to_complex(vals[7], vals[8]);
        freqs.push(freq);
        matrices.push(SMatrix { s11, s12, s21, s22 });
    }

    let opts = options.ok_or(Error::TouchstoneParse {
        line: text.lines().count().max(1),
        message: "missing option line".into(),
    })?;
    if matrices.is_empty() {
        return Err(Error::TouchstoneParse {
            line: text.lines().count().max(1),
            message: "no data rows".into(),
        });
    }
    TwoPortNetwork::new(FrequencySweep::new(freqs)?, matrices, opts.z_ref)
}

/// Serializes a network as a Touchstone v1 two-port file.
pub fn write_touchstone(
    network: &TwoPortNetwork,
    unit: FreqUnit,
    format: TouchstoneFormat,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# {} S {} R {}\n",
        unit.keyword(),
        format.keyword(),
        network.z_ref()
    ));
    out.push_str("! freq S11 S21 S12 S22\n");
    for (i, &f) in network.sweep().points().iter().enumerate() {
        let m = network.at(i);
        let mut row = format!("{:.12e}", f / unit.multiplier());
        for s in [m.s11, m.s21, m.s12, m.s22] {
            let (a, b) = format.from_complex(s);
            row.push_str(&format!(" {a:.12e} {b:.12e}"));
        }
        row.push('\n');
        out.push_str(&row);
    }
    out
}
