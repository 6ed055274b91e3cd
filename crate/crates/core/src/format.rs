//! Plain-text spectrum files.
//!
//! ```text
//! d N k
//! w_1 w_2 ... w_d re im      (k lines)
//! ```
//!
//! Coefficients are written with the shortest decimal representation that
//! parses back to the same `f64`, so write/read/write is byte-stable. Lines
//! starting with `#` after the mode block are ignored by the reader; the
//! solver uses them for diagnostics.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::spectrum::{Mode, SparseSpectrum};
use crate::{Error, Result};

pub fn to_string(spectrum: &SparseSpectrum) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} {} {}",
        spectrum.dim(),
        spectrum.bandwidth(),
        spectrum.len()
    )
    .unwrap();
    for (w, a) in spectrum {
        for c in w.components() {
            write!(out, "{c} ").unwrap();
        }
        writeln!(out, "{} {}", a.re, a.im).unwrap();
    }
    out
}

pub fn write_spectrum<W: Write>(mut writer: W, spectrum: &SparseSpectrum) -> Result<()> {
    writer.write_all(to_string(spectrum).as_bytes())?;
    Ok(())
}

pub fn save(path: impl AsRef<Path>, spectrum: &SparseSpectrum) -> Result<()> {
    std::fs::write(path, to_string(spectrum))?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

pub fn read_spectrum<R: BufRead>(reader: R) -> Result<SparseSpectrum> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lineno, header) = loop {
        match lines.next() {
            Some((n, l)) => {
                let l = l?;
                if !l.trim().is_empty() {
                    break (n, l);
                }
            }
            None => return Err(parse_err(1, "empty input: missing 'd N k' header")),
        }
    };
    let mut toks = header.split_whitespace();
    let dim: usize = field(toks.next(), lineno, "dimension d")?;
    let bandwidth: u64 = field(toks.next(), lineno, "bandwidth N")?;
    let k: usize = field(toks.next(), lineno, "mode count k")?;
    if toks.next().is_some() {
        return Err(parse_err(lineno, "header has more than three fields"));
    }
    let mut spectrum =
        SparseSpectrum::new(dim, bandwidth).map_err(|e| parse_err(lineno, e.to_string()))?;

    let mut read = 0;
    while read < k {
        let Some((n, l)) = lines.next() else {
            return Err(parse_err(
                lineno + read + 1,
                format!("expected {k} modes, found {read}"),
            ));
        };
        let l = l?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != dim + 2 {
            return Err(parse_err(
                n,
                format!("expected {} fields, found {}", dim + 2, toks.len()),
            ));
        }
        let mut w = Vec::with_capacity(dim);
        for tok in &toks[..dim] {
            w.push(field::<i64>(Some(tok), n, "frequency component")?);
        }
        let re: f64 = field(Some(toks[dim]), n, "real part")?;
        let im: f64 = field(Some(toks[dim + 1]), n, "imaginary part")?;
        let mode = Mode::new(w, Complex64::new(re, im));
        if spectrum.contains(&mode.frequency) {
            return Err(parse_err(
                n,
                format!("duplicate frequency {}", mode.frequency),
            ));
        }
        spectrum
            .insert(mode)
            .map_err(|e| parse_err(n, e.to_string()))?;
        read += 1;
    }
    for (n, l) in lines {
        let l = l?;
        let trimmed = l.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            return Err(parse_err(n, "unexpected content after the mode block"));
        }
    }
    Ok(spectrum)
}

pub fn from_str(text: &str) -> Result<SparseSpectrum> {
    read_spectrum(text.as_bytes())
}

pub fn load(path: impl AsRef<Path>) -> Result<SparseSpectrum> {
    let file = std::fs::File::open(path)?;
    read_spectrum(std::io::BufReader::new(file))
}
