//! PGM (portable graymap) reading and writing.
//!
//! Reads plain (`P2`) and raw (`P5`) graymaps with any maxval up to 65535.
//! Writes raw `P5` with maxval 255 or 65535 depending on the image depth.
//! Samples wider than one byte are big-endian. Values are taken verbatim,
//! never rescaled to the maxval.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{BitDepth, GrayImage};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Plain,
    Raw,
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.buf.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.buf.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token, or `None` at end of input.
    fn next_number(&mut self) -> Option<std::result::Result<u32, String>> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.buf.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self
                .buf
                .get(self.pos)
                .map(|b| Err(format!("unexpected byte {b:#04x}")));
        }
        let text = std::str::from_utf8(&self.buf[start..self.pos]).expect("ascii digits");
        Some(
            text.parse::<u32>()
                .map_err(|e| format!("number {text}: {e}")),
        )
    }

    fn header_number(&mut self, what: &str) -> Result<u32> {
        match self.next_number() {
            Some(Ok(v)) => Ok(v),
            Some(Err(e)) => Err(Error::MalformedHeader(format!("{what}: {e}"))),
            None => Err(Error::MalformedHeader(format!("missing {what}"))),
        }
    }
}

/// Decodes a PGM image held in memory.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let encoding = match bytes.get(..2) {
        Some(b"P2") => Encoding::Plain,
        Some(b"P5") => Encoding::Raw,
        _ => {
            return Err(Error::MalformedHeader(
                "missing P2/P5 magic number".to_string(),
            ))
        }
    };
    let mut cur = Cursor { buf: bytes, pos: 2 };
    if !cur
        .buf
        .get(cur.pos)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::MalformedHeader(
            "magic number must be followed by whitespace".to_string(),
        ));
    }
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    let depth = match maxval {
        0 => return Err(Error::InvalidMaxval(maxval)),
        m => BitDepth::for_max_value(m).ok_or(Error::InvalidMaxval(maxval))?,
    };
    let expected = (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| Error::MalformedHeader(format!("{width}x{height} is too large")))?;

    let data = match encoding {
        Encoding::Plain => {
            let mut data = Vec::with_capacity(expected);
            while data.len() < expected {
                match cur.next_number() {
                    Some(Ok(v)) if v <= maxval => data.push(v as u16),
                    Some(Ok(v)) => {
                        return Err(Error::InvalidImage(format!(
                            "sample {v} exceeds maxval {maxval}"
                        )))
                    }
                    Some(Err(e)) => return Err(Error::InvalidImage(e)),
                    None => {
                        return Err(Error::TruncatedData {
                            expected,
                            actual: data.len(),
                        })
                    }
                }
            }
            data
        }
        Encoding::Raw => {
            // exactly one whitespace byte separates the header from the raster
            match cur.buf.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => {
                    return Err(Error::MalformedHeader(
                        "maxval must be followed by a single whitespace byte".to_string(),
                    ))
                }
            }
            let raster = &cur.buf[cur.pos..];
            let data: Vec<u16> = match depth {
                BitDepth::Eight => raster.iter().take(expected).map(|&b| b as u16).collect(),
                BitDepth::Sixteen => raster
                    .chunks_exact(2)
                    .take(expected)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect(),
            };
            if data.len() < expected {
                return Err(Error::TruncatedData {
                    expected,
                    actual: data.len(),
                });
            }
            if let Some(v) = data.iter().find(|&&v| u32::from(v) > maxval) {
                return Err(Error::InvalidImage(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            data
        }
    };
    GrayImage::new(width, height, depth, data)
}

/// Encodes `img` as raw `P5`.
pub fn write_pgm<W: Write>(img: &GrayImage, mut out: W) -> Result<()> {
    let maxval = img.depth().max_value();
    write!(out, "P5\n{} {}\n{}\n", img.width(), img.height(), maxval)?;
    match img.depth() {
        BitDepth::Eight => {
            let bytes: Vec<u8> = img.data().iter().map(|&v| v as u8).collect();
            out.write_all(&bytes)?;
        }
        BitDepth::Sixteen => {
            let bytes: Vec<u8> = img.data().iter().flat_map(|v| v.to_be_bytes()).collect();
            out.write_all(&bytes)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    read_pgm(&bytes)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    write_pgm(img, BufWriter::new(File::create(path)?))
}
