//! Grayscale images, PGM (netpbm) reading/writing, and area-average resampling.
//!
//! Pixels are stored as `f64` from load onward; integer quantization only
//! happens where a consumer (like the JPEG step) requires it. Supported file
//! formats are PGM P2 (ASCII) and P5 (binary), maxval up to 65535.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A rectangular grid of real-valued intensities in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    depth: f64,
}

impl GrayImage {
    /// Build an image from row-major pixel data.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>, depth: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel count mismatch: expected {} ({}x{}), got {}",
                width * height,
                width,
                height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            depth,
        })
    }

    /// Constant image, handy for tests and fixtures.
    pub fn constant(width: usize, height: usize, value: f64, depth: f64) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
            depth,
        }
    }

    /// Build from a function of (x, y) with x = column, y = row.
    pub fn from_fn(width: usize, height: usize, depth: f64, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
            depth,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Nominal intensity ceiling of the source format (255 for 8-bit PGM).
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    /// Population standard deviation.
    pub fn std_dev(&self) -> f64 {
        let mean = self.mean();
        let var = self
            .pixels
            .iter()
            .map(|&p| (p - mean) * (p - mean))
            .sum::<f64>()
            / self.pixels.len() as f64;
        var.sqrt()
    }

    /// Apply `f` to every pixel, keeping dimensions and depth.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
            depth: self.depth,
        }
    }
}

/// Load a PGM image (binary P5 or ASCII P2).
pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_pgm(&bytes).map_err(|reason| Error::PgmFormat {
        path: path.to_owned(),
        reason,
    })
}

/// Write an image as binary PGM (P5). Samples are rounded and clamped to
/// [0, maxval] where maxval is the image depth; values above 255 use the
/// two-byte big-endian sample encoding.
pub fn save_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    let maxval = img.depth.round().clamp(1.0, 65535.0) as u32;
    let mut out = Vec::with_capacity(img.pixels.len() * 2 + 32);
    out.extend_from_slice(format!("P5\n{} {}\n{}\n", img.width, img.height, maxval).as_bytes());
    for &p in &img.pixels {
        let v = p.round().clamp(0.0, maxval as f64) as u32;
        if maxval > 255 {
            out.extend_from_slice(&(v as u16).to_be_bytes());
        } else {
            out.push(v as u8);
        }
    }
    let mut file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    file.write_all(&out).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Affine rescale of the pixel range to [0, 255] for visual inspection.
/// A constant image maps to mid-gray.
pub fn rescale_for_display(img: &GrayImage) -> GrayImage {
    let min = img.pixels.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = img.pixels.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max - min <= 0.0 {
        return GrayImage::constant(img.width, img.height, 127.5, 255.0);
    }
    let scale = 255.0 / (max - min);
    let mut out = img.map(|p| (p - min) * scale);
    out.depth = 255.0;
    out
}

/// Area-averaging resample (exact box filter) to `target_w` x `target_h`.
///
/// Each output pixel averages the source rectangle it covers, with
/// fractional-coverage weights at non-integer cell boundaries, so the result
/// is deterministic for every dimension pair and mean-preserving when the
/// cells tile the source exactly.
pub fn downsample(img: &GrayImage, target_w: usize, target_h: usize) -> Result<GrayImage> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::invalid("target dimensions must be positive"));
    }
    if target_w > img.width || target_h > img.height {
        return Err(Error::invalid(format!(
            "target {}x{} exceeds source {}x{}",
            target_w, target_h, img.width, img.height
        )));
    }
    if target_w == img.width && target_h == img.height {
        return Ok(img.clone());
    }

    let sx = img.width as f64 / target_w as f64;
    let sy = img.height as f64 / target_h as f64;
    let cell_area = sx * sy;
    let mut pixels = Vec::with_capacity(target_w * target_h);

    for oy in 0..target_h {
        let y0 = oy as f64 * sy;
        let y1 = (oy + 1) as f64 * sy;
        let iy_end = (y1.ceil() as usize).min(img.height);
        for ox in 0..target_w {
            let x0 = ox as f64 * sx;
            let x1 = (ox + 1) as f64 * sx;
            let ix_end = (x1.ceil() as usize).min(img.width);

            let mut acc = 0.0;
            for iy in y0.floor() as usize..iy_end {
                let wy = (y1.min((iy + 1) as f64) - y0.max(iy as f64)).max(0.0);
                if wy == 0.0 {
                    continue;
                }
                let row = &img.pixels[iy * img.width..(iy + 1) * img.width];
                for (ix, &p) in row.iter().enumerate().take(ix_end).skip(x0.floor() as usize) {
                    let wx = (x1.min((ix + 1) as f64) - x0.max(ix as f64)).max(0.0);
                    acc += wx * wy * p;
                }
            }
            pixels.push(acc / cell_area);
        }
    }

    GrayImage::new(target_w, target_h, pixels, img.depth)
}

fn parse_pgm(bytes: &[u8]) -> std::result::Result<GrayImage, String> {
    if bytes.len() < 2 {
        return Err("file too short for a PGM header".into());
    }
    let magic = &bytes[..2];
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => return Err("not a PGM file (expected P2 or P5 magic)".into()),
    };

    let mut pos = 2;
    let mut header = [0u64; 3];
    for slot in header.iter_mut() {
        *slot = read_header_int(bytes, &mut pos)?;
    }
    let (width, height, maxval) = (header[0] as usize, header[1] as usize, header[2]);
    if width == 0 || height == 0 {
        return Err("image dimensions must be positive".into());
    }
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maxval {maxval} out of range 1..=65535"));
    }
    let count = width * height;
    let mut pixels = Vec::with_capacity(count);

    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err("malformed header: missing raster separator".into());
        }
        pos += 1;
        let sample_len = if maxval > 255 { 2 } else { 1 };
        let raster = &bytes[pos..];
        if raster.len() != count * sample_len {
            return Err(format!(
                "pixel count mismatch: expected {} samples, raster holds {}",
                count,
                raster.len() / sample_len
            ));
        }
        for chunk in raster.chunks_exact(sample_len) {
            let v = if sample_len == 2 {
                u16::from_be_bytes([chunk[0], chunk[1]]) as u64
            } else {
                chunk[0] as u64
            };
            if v > maxval {
                return Err(format!("sample {v} exceeds maxval {maxval}"));
            }
            pixels.push(v as f64);
        }
    } else {
        loop {
            skip_whitespace_and_comments(bytes, &mut pos);
            if pos >= bytes.len() {
                break;
            }
            let v = read_int(bytes, &mut pos)?;
            if v > maxval {
                return Err(format!("sample {v} exceeds maxval {maxval}"));
            }
            pixels.push(v as f64);
        }
        if pixels.len() != count {
            return Err(format!(
                "pixel count mismatch: expected {} values, got {}",
                count,
                pixels.len()
            ));
        }
    }

    GrayImage::new(width, height, pixels, maxval as f64).map_err(|e| e.to_string())
}

fn skip_whitespace_and_comments(bytes: &[u8], pos: &mut usize) {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            return;
        }
    }
}

fn read_int(bytes: &[u8], pos: &mut usize) -> std::result::Result<u64, String> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(format!(
            "malformed header: expected integer, found byte 0x{:02x}",
            bytes.get(start).copied().unwrap_or(0)
        ));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| "malformed header: integer out of range".into())
}

fn read_header_int(bytes: &[u8], pos: &mut usize) -> std::result::Result<u64, String> {
    skip_whitespace_and_comments(bytes, pos);
    if *pos >= bytes.len() {
        return Err("malformed header: truncated".into());
    }
    read_int(bytes, pos)
}
