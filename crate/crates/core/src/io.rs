//! Sequence and lattice files.
//!
//! Text sequence: a line `alphabet <size>`, then whitespace-separated
//! symbols (conventionally on one line). Binary sequence: `MOL1`, u32 LE
//! alphabet size, u64 LE length, one byte per symbol.
//!
//! Text lattice: a line `lattice <side> <size>`, then `side` rows of `side`
//! symbols. Binary lattice: `MOL2`, u32 LE alphabet size, u64 LE side, the
//! grid row-major at one byte per site.
//!
//! Readers detect the variant from the first bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mrf::LatticeConfiguration;
use crate::seqcore::{Alphabet, Sequence, Symbol};

const SEQ_MAGIC: &[u8; 4] = b"MOL1";
const LAT_MAGIC: &[u8; 4] = b"MOL2";
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Binary,
}

/// Either kind of sample file.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Sequence(Sequence),
    Lattice(LatticeConfiguration),
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn binary_header(bytes: &[u8]) -> Result<(Alphabet, u64, &[u8])> {
    if bytes.len() < HEADER_LEN {
        return Err(parse_err("truncated binary header"));
    }
    let size = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    Ok((Alphabet::new(size as usize)?, len, &bytes[HEADER_LEN..]))
}

fn body_symbols(body: &[u8], expected: u64, alphabet: Alphabet) -> Result<Vec<Symbol>> {
    if body.len() as u64 != expected {
        return Err(parse_err(format!(
            "binary body holds {} symbols, header says {expected}",
            body.len()
        )));
    }
    let data: Vec<Symbol> = body.iter().map(|&b| b as Symbol).collect();
    if let Some(pos) = data.iter().position(|&s| s as usize >= alphabet.size()) {
        return Err(Error::SymbolOutOfRange {
            symbol: data[pos],
            position: pos,
            size: alphabet.size(),
        });
    }
    Ok(data)
}

fn text(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| parse_err(format!("not UTF-8: {e}")))
}

fn number<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(format!("bad {what} '{tok}'")))
}

fn symbols<'a>(tokens: impl Iterator<Item = &'a str>) -> Result<Vec<Symbol>> {
    tokens
        .map(|t| t.parse::<Symbol>().map_err(|_| parse_err(format!("bad symbol '{t}'"))))
        .collect()
}

pub fn parse_sequence(bytes: &[u8]) -> Result<Sequence> {
    if bytes.starts_with(SEQ_MAGIC) {
        let (alphabet, len, body) = binary_header(bytes)?;
        return Sequence::new(alphabet, body_symbols(body, len, alphabet)?);
    }
    let s = text(bytes)?;
    let (header, rest) = s.split_once('\n').unwrap_or((s, ""));
    let mut head = header.split_whitespace();
    if head.next() != Some("alphabet") {
        return Err(parse_err("sequence file must start with 'alphabet <size>'"));
    }
    let size: usize = number(head.next(), "alphabet size")?;
    if head.next().is_some() {
        return Err(parse_err("trailing tokens after alphabet size"));
    }
    Sequence::new(Alphabet::new(size)?, symbols(rest.split_whitespace())?)
}

pub fn encode_sequence(x: &Sequence, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Text => {
            let mut s = String::with_capacity(16 + 2 * x.len());
            writeln!(s, "alphabet {}", x.alphabet().size()).unwrap();
            push_row(&mut s, x.symbols());
            Ok(s.into_bytes())
        }
        Format::Binary => {
            let mut out = binary_prefix(SEQ_MAGIC, x.alphabet(), x.len() as u64)?;
            out.extend(x.symbols().iter().map(|&s| s as u8));
            Ok(out)
        }
    }
}

fn push_row(s: &mut String, row: &[Symbol]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{v}").unwrap();
    }
    s.push('\n');
}

fn binary_prefix(magic: &[u8; 4], alphabet: Alphabet, len: u64) -> Result<Vec<u8>> {
    if alphabet.size() > 256 {
        return Err(Error::Precondition(format!(
            "binary files hold one byte per symbol; alphabet size {} is too large",
            alphabet.size()
        )));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + len as usize);
    out.extend_from_slice(magic);
    out.extend_from_slice(&(alphabet.size() as u32).to_le_bytes());
    out.extend_from_slice(&len.to_le_bytes());
    Ok(out)
}

pub fn parse_lattice(bytes: &[u8]) -> Result<LatticeConfiguration> {
    if bytes.starts_with(LAT_MAGIC) {
        let (alphabet, side, body) = binary_header(bytes)?;
        let side = usize::try_from(side).map_err(|_| parse_err("lattice side too large"))?;
        let cells = side
            .checked_mul(side)
            .ok_or_else(|| parse_err("lattice side too large"))?;
        return LatticeConfiguration::new(alphabet, side, body_symbols(body, cells as u64, alphabet)?);
    }
    let s = text(bytes)?;
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| parse_err("empty lattice file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("lattice") {
        return Err(parse_err("lattice file must start with 'lattice <side> <alphabet>'"));
    }
    let side: usize = number(head.next(), "lattice side")?;
    let size: usize = number(head.next(), "alphabet size")?;
    let mut grid = Vec::with_capacity(side * side);
    let mut rows = 0;
    for line in lines {
        let row = symbols(line.split_whitespace())?;
        if row.len() != side {
            return Err(parse_err(format!(
                "row {} has {} symbols, expected {side}",
                rows + 1,
                row.len()
            )));
        }
        grid.extend(row);
        rows += 1;
    }
    if rows != side {
        return Err(parse_err(format!("found {rows} rows, expected {side}")));
    }
    LatticeConfiguration::new(Alphabet::new(size)?, side, grid)
}

pub fn encode_lattice(x: &LatticeConfiguration, format: Format) -> Result<Vec<u8>> {
    let n = x.side();
    match format {
        Format::Text => {
            let mut s = String::with_capacity(32 + 2 * n * n);
            writeln!(s, "lattice {n} {}", x.alphabet().size()).unwrap();
            for row in x.grid().chunks(n) {
                push_row(&mut s, row);
            }
            Ok(s.into_bytes())
        }
        Format::Binary => {
            let mut out = binary_prefix(LAT_MAGIC, x.alphabet(), n as u64)?;
            out.extend(x.grid().iter().map(|&s| s as u8));
            Ok(out)
        }
    }
}

/// Parses either kind of file, telling them apart by the magic bytes or the
/// header keyword.
pub fn parse_sample(bytes: &[u8]) -> Result<Sample> {
    let lattice = bytes.starts_with(LAT_MAGIC)
        || std::str::from_utf8(&bytes[..bytes.len().min(64)])
            .map(|s| s.trim_start().starts_with("lattice"))
            .unwrap_or(false);
    if lattice {
        parse_lattice(bytes).map(Sample::Lattice)
    } else {
        parse_sequence(bytes).map(Sample::Sequence)
    }
}

pub fn read_sequence(path: impl AsRef<Path>) -> Result<Sequence> {
    parse_sequence(&std::fs::read(path)?)
}

pub fn write_sequence(path: impl AsRef<Path>, x: &Sequence, format: Format) -> Result<()> {
    Ok(std::fs::write(path, encode_sequence(x, format)?)?)
}

pub fn read_lattice(path: impl AsRef<Path>) -> Result<LatticeConfiguration> {
    parse_lattice(&std::fs::read(path)?)
}

pub fn write_lattice(path: impl AsRef<Path>, x: &LatticeConfiguration, format: Format) -> Result<()> {
    Ok(std::fs::write(path, encode_lattice(x, format)?)?)
}

pub fn read_sample(path: impl AsRef<Path>) -> Result<Sample> {
    parse_sample(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq() -> Sequence {
        Sequence::new(Alphabet::new(3).unwrap(), vec![0, 1, 2, 2, 1, 0, 0]).unwrap()
    }

    #[test]
    fn sequence_round_trips() {
        let x = seq();
        let t = encode_sequence(&x, Format::Text).unwrap();
        assert_eq!(std::str::from_utf8(&t).unwrap(), "alphabet 3\n0 1 2 2 1 0 0\n");
        assert_eq!(parse_sequence(&t).unwrap(), x);
        let b = encode_sequence(&x, Format::Binary).unwrap();
        assert_eq!(&b[..4], b"MOL1");
        assert_eq!(b.len(), 16 + 7);
        assert_eq!(parse_sequence(&b).unwrap(), x);
    }

    #[test]
    fn lattice_round_trips() {
        let x = LatticeConfiguration::new(Alphabet::new(2).unwrap(), 3, vec![0, 1, 1, 0, 0, 1, 1, 1, 0]).unwrap();
        let t = encode_lattice(&x, Format::Text).unwrap();
        assert_eq!(std::str::from_utf8(&t).unwrap(), "lattice 3 2\n0 1 1\n0 0 1\n1 1 0\n");
        assert_eq!(parse_lattice(&t).unwrap(), x);
        let b = encode_lattice(&x, Format::Binary).unwrap();
        assert_eq!(parse_sample(&b).unwrap(), Sample::Lattice(x.clone()));
        assert_eq!(parse_sample(&t).unwrap(), Sample::Lattice(x));
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(parse_sequence(b"alphabet two\n0 1"), Err(Error::Parse(_))));
        assert!(matches!(parse_sequence(b"0 1 0"), Err(Error::Parse(_))));
        assert!(matches!(parse_sequence(b"alphabet 2\n0 x"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_sequence(b"alphabet 2\n0 3"),
            Err(Error::SymbolOutOfRange { .. })
        ));
        assert!(matches!(parse_sequence(b"MOL1\x02\0\0\0"), Err(Error::Parse(_))));
        assert!(matches!(parse_lattice(b"lattice 2 2\n0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_lattice(b"lattice 2 2\n0 1\n1\n"), Err(Error::Parse(_))));
        let big = Sequence::new(Alphabet::new(300).unwrap(), vec![299]).unwrap();
        assert!(encode_sequence(&big, Format::Binary).is_err());
    }
}
