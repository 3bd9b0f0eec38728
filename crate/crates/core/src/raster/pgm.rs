//! PGM (P2 ASCII / P5 binary) reading and P5 writing.
//!
//! Samples are scaled to `[0, 1]` by dividing by maxval on read. Writes are
//! always P5 with maxval 255.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::GrayImage;

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
    decode_pgm(&bytes)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img)).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    if source.kind() == std::io::ErrorKind::NotFound {
        Error::MissingFile(path.to_path_buf())
    } else {
        Error::IoFailure {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Quantizes a `[0, 1]` intensity to a byte; out-of-range values clamp.
pub fn quantize(p: f64) -> u8 {
    if p.is_nan() {
        return 0;
    }
    (p.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(img.pixels().iter().map(|&p| quantize(p)));
    out
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if b == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token, or `None` at end of input.
    fn next_number(&mut self) -> Option<std::result::Result<u64, String>> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            if self.data[self.pos] == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let token = &self.data[start..self.pos];
        Some(
            std::str::from_utf8(token)
                .ok()
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| format!("invalid number {:?}", String::from_utf8_lossy(token))),
        )
    }

    fn header_number(&mut self, what: &str) -> Result<u64> {
        match self.next_number() {
            Some(Ok(v)) => Ok(v),
            Some(Err(e)) => Err(Error::MalformedHeader(format!("{what}: {e}"))),
            None => Err(Error::MalformedHeader(format!("missing {what}"))),
        }
    }
}

pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    if data.len() < 2 {
        return Err(Error::MalformedHeader("file too short".into()));
    }
    let binary = match &data[..2] {
        b"P2" => false,
        b"P5" => true,
        other => {
            return Err(Error::MalformedHeader(format!(
                "bad magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    let maxval = cur.header_number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    let scale = maxval as f64;

    let mut pixels = Vec::with_capacity(expected);
    if binary {
        // exactly one whitespace byte separates maxval from the raster
        if cur.pos >= data.len() || !data[cur.pos].is_ascii_whitespace() {
            return Err(Error::TruncatedData { expected, found: 0 });
        }
        let raster = &data[cur.pos + 1..];
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let found = raster.len() / bytes_per;
        if found < expected {
            return Err(Error::TruncatedData { expected, found });
        }
        for i in 0..expected {
            let v = if bytes_per == 2 {
                u16::from_be_bytes([raster[2 * i], raster[2 * i + 1]]) as u64
            } else {
                raster[i] as u64
            };
            pixels.push(sample(v, maxval, scale)?);
        }
    } else {
        while pixels.len() < expected {
            match cur.next_number() {
                Some(Ok(v)) => pixels.push(sample(v, maxval, scale)?),
                Some(Err(e)) => return Err(Error::MalformedHeader(e)),
                None => {
                    return Err(Error::TruncatedData {
                        expected,
                        found: pixels.len(),
                    })
                }
            }
        }
    }
    GrayImage::new(width, height, pixels)
}

fn sample(v: u64, maxval: u64, scale: f64) -> Result<f64> {
    if v > maxval {
        return Err(Error::MalformedHeader(format!(
            "sample {v} exceeds maxval {maxval}"
        )));
    }
    Ok(v as f64 / scale)
}
