//! On-disk formats for generated sequences.
//!
//! Binary layout, all integers little-endian `u64`:
//!
//! ```text
//! "ULAMSEQ1" | first | second | count | term_1 ... term_count
//! ```
//!
//! The text export is one decimal term per line; lines starting with `#`
//! carry metadata and are skipped on read.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::sequence::{SequenceError, UlamSequence};

pub const MAGIC: &[u8; 8] = b"ULAMSEQ1";
const HEADER_LEN: usize = 8 + 3 * 8;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("file truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("{extra} unexpected trailing bytes")]
    TrailingBytes { extra: u64 },
    #[error("header declares {0} terms; at least 2 are required")]
    TooFewTerms(u64),
    #[error("header seeds ({first}, {second}) do not match the first two terms")]
    SeedMismatch { first: u64, second: u64 },
    #[error("invalid payload: {0}")]
    Payload(#[from] SequenceError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn write_binary<W: Write>(seq: &UlamSequence, mut out: W) -> io::Result<()> {
    let config = seq.config();
    out.write_all(MAGIC)?;
    for field in [config.first, config.second, seq.len() as u64] {
        out.write_all(&field.to_le_bytes())?;
    }
    for &t in seq.terms() {
        out.write_all(&t.to_le_bytes())?;
    }
    out.flush()
}

pub fn to_bytes(seq: &UlamSequence) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * seq.len());
    write_binary(seq, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn from_bytes(bytes: &[u8]) -> Result<UlamSequence, CacheError> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 8 && &bytes[..8] != MAGIC {
            return Err(CacheError::BadMagic);
        }
        return Err(CacheError::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    if &bytes[..8] != MAGIC {
        return Err(CacheError::BadMagic);
    }
    let field = |k: usize| u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap());
    let (first, second, count) = (field(0), field(1), field(2));
    if count < 2 {
        return Err(CacheError::TooFewTerms(count));
    }
    let payload = &bytes[HEADER_LEN..];
    let expected = count.checked_mul(8).ok_or(CacheError::Truncated {
        expected: u64::MAX,
        found: bytes.len() as u64,
    })?;
    let found = payload.len() as u64;
    if found < expected {
        return Err(CacheError::Truncated {
            expected: HEADER_LEN as u64 + expected,
            found: bytes.len() as u64,
        });
    }
    if found > expected {
        return Err(CacheError::TrailingBytes { extra: found - expected });
    }
    let terms: Vec<u64> = payload
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if terms[0] != first || terms[1] != second {
        return Err(CacheError::SeedMismatch { first, second });
    }
    Ok(UlamSequence::from_terms(terms)?)
}

pub fn read_binary<R: Read>(mut input: R) -> Result<UlamSequence, CacheError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

pub fn save(seq: &UlamSequence, path: impl AsRef<Path>) -> Result<(), CacheError> {
    let file = File::create(path)?;
    write_binary(seq, BufWriter::new(file))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<UlamSequence, CacheError> {
    read_binary(File::open(path)?)
}

pub fn write_text<W: Write>(seq: &UlamSequence, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    let config = seq.config();
    writeln!(out, "# ulam sequence")?;
    writeln!(out, "# first={} second={} count={}", config.first, config.second, seq.len())?;
    for t in seq.terms() {
        writeln!(out, "{t}")?;
    }
    out.flush()
}

pub fn read_text<R: Read>(input: R) -> Result<UlamSequence, CacheError> {
    let mut terms = Vec::new();
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value = line.parse::<u64>().map_err(|e| CacheError::Parse {
            line: k + 1,
            message: e.to_string(),
        })?;
        terms.push(value);
    }
    Ok(UlamSequence::from_terms(terms)?)
}
