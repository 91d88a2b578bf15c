//! Point-set files.
//!
//! Text: a `pbbs_sequencePoint2d` header line, then one `x y` pair per line
//! in shortest round-trip decimal. Binary: `VQH1`, a little-endian `u64`
//! count `n`, then `n` little-endian `f64` x values followed by `n` y values.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;

pub const TEXT_HEADER: &str = "pbbs_sequencePoint2d";
pub const BINARY_MAGIC: &[u8; 4] = b"VQH1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Binary,
}

impl Format {
    /// `.bin` means binary, anything else text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("bin") => Format::Binary,
            _ => Format::Text,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Binary => "binary",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "binary" => Ok(Format::Binary),
            _ => Err(Error::InvalidConfig(format!(
                "unknown format `{s}` (expected text or binary)"
            ))),
        }
    }
}

pub fn write_text<W: Write>(mut w: W, points: &PointSet) -> Result<()> {
    writeln!(w, "{TEXT_HEADER}")?;
    for p in points.iter() {
        writeln!(w, "{} {}", p.x, p.y)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_binary<W: Write>(mut w: W, points: &PointSet) -> Result<()> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(points.len() as u64).to_le_bytes())?;
    for coords in [points.xs(), points.ys()] {
        for chunk in coords.chunks(8192) {
            let bytes: Vec<u8> = chunk.iter().flat_map(|v| v.to_le_bytes()).collect();
            w.write_all(&bytes)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_points(path: &Path, points: &PointSet, format: Format) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match format {
        Format::Text => write_text(w, points),
        Format::Binary => write_binary(w, points),
    }
}

fn finite(set: PointSet) -> Result<PointSet> {
    let bad = set.iter().position(|p| !p.is_finite());
    match bad {
        Some(i) => Err(Error::Load(format!(
            "point {i} has a non-finite coordinate"
        ))),
        None => Ok(set),
    }
}

pub fn read_text<R: BufRead>(r: R) -> Result<PointSet> {
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == TEXT_HEADER => {}
        Some(Ok(h)) => return Err(Error::Load(format!("unexpected header `{}`", h.trim()))),
        Some(Err(e)) => return Err(e.into()),
        None => return Err(Error::Load("missing header".into())),
    }
    let mut set = PointSet::new();
    for (no, line) in lines.enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        let (x, y) = match (it.next(), it.next(), it.next()) {
            (None, _, _) => continue,
            (Some(x), Some(y), None) => (x, y),
            _ => {
                return Err(Error::Load(format!(
                    "line {}: expected two numbers",
                    no + 2
                )))
            }
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Load(format!("line {}: `{s}` is not a number", no + 2)))
        };
        set.push((parse(x)?, parse(y)?).into());
    }
    finite(set)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<PointSet> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Load("truncated header".into()))?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Load("bad magic".into()));
    }
    let mut count = [0u8; 8];
    r.read_exact(&mut count)
        .map_err(|_| Error::Load("truncated header".into()))?;
    let n = usize::try_from(u64::from_le_bytes(count))
        .map_err(|_| Error::Load("count too large".into()))?;
    let mut read_coords = |what: &str| -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let mut buf = vec![0u8; 8 * 8192];
        let mut left = n;
        while left > 0 {
            let k = left.min(8192);
            r.read_exact(&mut buf[..8 * k]).map_err(|_| {
                Error::Load(format!("truncated {what} payload: expected {n} values"))
            })?;
            out.extend(
                buf[..8 * k]
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().unwrap())),
            );
            left -= k;
        }
        Ok(out)
    };
    let xs = read_coords("x")?;
    let ys = read_coords("y")?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Load("trailing bytes after payload".into()));
    }
    finite(PointSet::from_coords(xs, ys)?)
}

/// Reads either format, recognised by its first bytes.
pub fn read_points(path: &Path) -> Result<PointSet> {
    let mut r = BufReader::new(File::open(path)?);
    let head = r.fill_buf()?;
    if head.starts_with(BINARY_MAGIC) {
        read_binary(r)
    } else if head.starts_with(TEXT_HEADER.as_bytes()) {
        read_text(r)
    } else {
        Err(Error::Load(format!(
            "{}: unrecognised point-set format",
            path.display()
        )))
    }
}
