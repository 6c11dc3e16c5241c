use std::path::Path;

use serde::Deserialize;

use super::codec::parse_json;
use super::{read_file, write_file, IoError};
use crate::error::FormatError;
use crate::lifting::{CameraIntrinsics, DepthMap, InstanceMask};
use crate::scalar::Real;

pub const DEPTH_MAGIC: &[u8; 4] = b"OVD1";
const DEPTH_HEADER: usize = 12;

fn at_byte(offset: usize) -> String {
    format!("byte {offset}")
}

/// Decodes an `OVD1` depth buffer: magic, little-endian `u32` width and
/// height, then `width * height` little-endian `f32` meters, row-major.
pub fn decode_depth<T: Real>(bytes: &[u8]) -> Result<DepthMap<T>, FormatError> {
    if bytes.len() < DEPTH_HEADER {
        return Err(FormatError::new(
            at_byte(bytes.len()),
            format!("depth header needs {DEPTH_HEADER} bytes, file has {}", bytes.len()),
        ));
    }
    if &bytes[..4] != DEPTH_MAGIC {
        return Err(FormatError::new(at_byte(0), "bad magic, expected \"OVD1\""));
    }
    let word = |o: usize| u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize;
    let (width, height) = (word(4), word(8));
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(DEPTH_HEADER));
    if expected != Some(bytes.len()) {
        return Err(FormatError::new(
            at_byte(DEPTH_HEADER),
            format!(
                "{width}x{height} depth needs {} payload bytes, file has {}",
                expected.map_or_else(|| "too many".to_string(), |e| (e - DEPTH_HEADER).to_string()),
                bytes.len() - DEPTH_HEADER
            ),
        ));
    }
    let data = bytes[DEPTH_HEADER..]
        .chunks_exact(4)
        .map(|c| T::lit(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64))
        .collect();
    DepthMap::new(width, height, data).map_err(|e| FormatError::new(at_byte(DEPTH_HEADER), e.to_string()))
}

/// Encodes a depth map as `OVD1`, rounding values to `f32`.
pub fn encode_depth<T: Real>(depth: &DepthMap<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(DEPTH_HEADER + 4 * depth.data().len());
    out.extend_from_slice(DEPTH_MAGIC);
    out.extend_from_slice(&(depth.width() as u32).to_le_bytes());
    out.extend_from_slice(&(depth.height() as u32).to_le_bytes());
    for v in depth.data() {
        out.extend_from_slice(&(v.to_f64_lossy() as f32).to_le_bytes());
    }
    out
}

pub fn load_depth<T: Real>(path: &Path) -> Result<DepthMap<T>, IoError> {
    decode_depth(&read_file(path)?).map_err(|e| e.in_file(path).into())
}

pub fn save_depth<T: Real>(depth: &DepthMap<T>, path: &Path) -> Result<(), IoError> {
    write_file(path, &encode_depth(depth))
}

struct PgmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmHeader<'_> {
    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' && self.bytes[self.pos] != b'\r' {
                        self.pos += 1;
                    }
                }
                b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, FormatError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(FormatError::new(at_byte(start), format!("expected PGM {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| FormatError::new(at_byte(start), format!("PGM {what} out of range")))
    }
}

/// Decodes a binary PGM (`P5`) mask; nonzero samples are foreground.
/// `maxval < 256` uses one byte per sample, otherwise two (big-endian).
pub fn decode_mask(bytes: &[u8]) -> Result<InstanceMask, FormatError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(FormatError::new(at_byte(0), "bad magic, expected binary PGM \"P5\""));
    }
    let mut h = PgmHeader { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(FormatError::new(at_byte(h.pos), format!("PGM maxval {maxval} outside 1..=65535")));
    }
    match bytes.get(h.pos) {
        Some(c) if c.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(FormatError::new(at_byte(h.pos), "expected whitespace after PGM maxval")),
    }
    let sample = if maxval < 256 { 1 } else { 2 };
    let payload = &bytes[h.pos..];
    let expected = width.checked_mul(height).and_then(|n| n.checked_mul(sample));
    if expected != Some(payload.len()) {
        return Err(FormatError::new(
            at_byte(h.pos),
            format!(
                "{width}x{height} PGM with maxval {maxval} needs {} payload bytes, file has {}",
                expected.map_or_else(|| "too many".to_string(), |e| e.to_string()),
                payload.len()
            ),
        ));
    }
    let data = payload.chunks_exact(sample).map(|c| c.iter().any(|&b| b != 0)).collect();
    InstanceMask::new(width, height, data).map_err(|e| FormatError::new(at_byte(h.pos), e.to_string()))
}

/// Encodes a mask as 8-bit PGM with foreground 255.
pub fn encode_mask(mask: &InstanceMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend(mask.data().iter().map(|&m| if m { 255u8 } else { 0 }));
    out
}

pub fn load_mask(path: &Path) -> Result<InstanceMask, IoError> {
    decode_mask(&read_file(path)?).map_err(|e| e.in_file(path).into())
}

pub fn save_mask(mask: &InstanceMask, path: &Path) -> Result<(), IoError> {
    write_file(path, &encode_mask(mask))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntrinsicsJson {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
}

/// Reads `{"fx", "fy", "cx", "cy"}`.
pub fn load_intrinsics(path: &Path) -> Result<CameraIntrinsics<f64>, IoError> {
    let bytes = read_file(path)?;
    let k: IntrinsicsJson = parse_json(&bytes).map_err(|e| e.in_file(path))?;
    CameraIntrinsics::new(k.fx, k.fy, k.cx, k.cy).map_err(|e| FormatError::new("", e.to_string()).in_file(path).into())
}
