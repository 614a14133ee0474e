//! Grayscale image ingest: PGM decoding/encoding and flattening to vectors.
//!
//! Only the netpbm grayscale formats are handled — binary `P5` and ASCII
//! `P2`. Intensities are kept exactly as stored (no rescaling toward 255),
//! so decode/encode round-trips are lossless for any `maxval`.

use thiserror::Error;

/// Raster scan order is fixed: row-major, top-left origin. Everything
/// downstream (training, recognition, serialized models) assumes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<u16>,
}

/// A raster image flattened to a real vector, `data[r*width + c] = pixel(r, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceVector {
    data: Vec<f64>,
}

/// Output flavor for [`encode_pgm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P5`, one byte per pixel (two big-endian bytes when maxval > 255).
    Binary,
    /// `P2`, whitespace-separated decimal values.
    Ascii,
}

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("bad magic {found:?}: expected \"P5\" or \"P2\"")]
    BadMagic { found: String },
    #[error("missing header field '{field}'")]
    MissingHeaderField { field: &'static str },
    #[error("invalid header field '{field}': token {token:?}")]
    InvalidHeaderField { field: &'static str, token: String },
    #[error("header field '{field}' must be nonzero")]
    ZeroDimension { field: &'static str },
    #[error("header field 'maxval' is {value}, outside [1, 65535]")]
    MaxvalOutOfRange { value: u64 },
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    TruncatedPixels { expected: usize, found: usize },
    #[error("pixel {index} has value {value}, above maxval {maxval}")]
    PixelOutOfRange { index: usize, value: u32, maxval: u16 },
    #[error("pixel count {found} does not match {width}x{height}")]
    PixelCountMismatch { width: usize, height: usize, found: usize },
    #[error("value at index {index} ({value}) is not an intensity in [0, {maxval}]")]
    NonIntegralValue { index: usize, value: f64, maxval: u16 },
}

impl GrayImage {
    /// Build an image from row-major pixels, validating the invariants.
    pub fn new(
        width: usize,
        height: usize,
        maxval: u16,
        pixels: Vec<u16>,
    ) -> Result<Self, ImageError> {
        if width == 0 {
            return Err(ImageError::ZeroDimension { field: "width" });
        }
        if height == 0 {
            return Err(ImageError::ZeroDimension { field: "height" });
        }
        if maxval == 0 {
            return Err(ImageError::MaxvalOutOfRange { value: 0 });
        }
        if pixels.len() != width * height {
            return Err(ImageError::PixelCountMismatch {
                width,
                height,
                found: pixels.len(),
            });
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &p)| p > maxval) {
            return Err(ImageError::PixelOutOfRange {
                index,
                value: value as u32,
                maxval,
            });
        }
        Ok(GrayImage {
            width,
            height,
            maxval,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> u16 {
        self.pixels[row * self.width + col]
    }
}

impl FaceVector {
    /// Wrap raw values. The vector must be non-empty and finite.
    pub fn new(data: Vec<f64>) -> Self {
        assert!(!data.is_empty(), "face vector must not be empty");
        debug_assert!(data.iter().all(|v| v.is_finite()), "face vector must be finite");
        FaceVector { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Flatten an image to reals in row-major order.
pub fn vectorize(img: &GrayImage) -> FaceVector {
    FaceVector::new(img.pixels.iter().map(|&p| p as f64).collect())
}

/// Inverse of [`vectorize`]: rebuild an image from a flat vector whose
/// entries must already be integral intensities in `[0, maxval]`.
pub fn reshape(
    data: &[f64],
    width: usize,
    height: usize,
    maxval: u16,
) -> Result<GrayImage, ImageError> {
    let mut pixels = Vec::with_capacity(data.len());
    for (index, &value) in data.iter().enumerate() {
        if !value.is_finite() || value.fract() != 0.0 || value < 0.0 || value > maxval as f64 {
            return Err(ImageError::NonIntegralValue {
                index,
                value,
                maxval,
            });
        }
        pixels.push(value as u16);
    }
    GrayImage::new(width, height, maxval, pixels)
}

/// Map arbitrary reals linearly onto `[0, 255]` and build an image, for
/// visual inspection of eigenfaces. Returns the image together with the
/// `(lo, hi)` input range that was mapped, so callers can record the
/// rescaling (e.g. in a filename). A constant input maps to mid-gray.
pub fn rescale_to_gray(
    values: &[f64],
    width: usize,
    height: usize,
) -> Result<(GrayImage, f64, f64), ImageError> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pixels: Vec<u16> = if hi > lo {
        values
            .iter()
            .map(|&v| ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) as u16)
            .collect()
    } else {
        vec![128; values.len()]
    };
    Ok((GrayImage::new(width, height, 255, pixels)?, lo, hi))
}

/// Decode a PGM file (binary `P5` or ASCII `P2`).
///
/// Comment lines starting with `#` are permitted between header tokens.
/// `P5` stores one byte per pixel for maxval <= 255 and two big-endian
/// bytes otherwise. Trailing bytes after the raster are ignored.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    if bytes.len() < 2 {
        return Err(ImageError::BadMagic {
            found: String::from_utf8_lossy(bytes).into_owned(),
        });
    }
    let magic = &bytes[..2];
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => {
            return Err(ImageError::BadMagic {
                found: String::from_utf8_lossy(magic).into_owned(),
            })
        }
    };

    let mut cursor = Cursor {
        bytes,
        pos: 2,
    };
    let width = cursor.read_header_number("width")?;
    let height = cursor.read_header_number("height")?;
    let maxval = cursor.read_header_number("maxval")?;
    if width == 0 {
        return Err(ImageError::ZeroDimension { field: "width" });
    }
    if height == 0 {
        return Err(ImageError::ZeroDimension { field: "height" });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(ImageError::MaxvalOutOfRange { value: maxval });
    }
    let maxval = maxval as u16;
    let count = (width as usize)
        .checked_mul(height as usize)
        .ok_or(ImageError::InvalidHeaderField {
            field: "width",
            token: width.to_string(),
        })?;

    let pixels = if binary {
        // Exactly one whitespace byte separates the maxval token from the
        // raster; anything else would swallow pixel bytes.
        match cursor.bytes.get(cursor.pos) {
            Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
            _ => {
                return Err(ImageError::InvalidHeaderField {
                    field: "raster separator",
                    token: String::from_utf8_lossy(
                        &cursor.bytes[cursor.pos..cursor.bytes.len().min(cursor.pos + 1)],
                    )
                    .into_owned(),
                })
            }
        }
        let raster = &cursor.bytes[cursor.pos..];
        let per_sample = if maxval > 255 { 2 } else { 1 };
        if raster.len() < count * per_sample {
            return Err(ImageError::TruncatedPixels {
                expected: count,
                found: raster.len() / per_sample,
            });
        }
        let mut pixels = Vec::with_capacity(count);
        for i in 0..count {
            let value = if per_sample == 1 {
                raster[i] as u16
            } else {
                u16::from_be_bytes([raster[2 * i], raster[2 * i + 1]])
            };
            if value > maxval {
                return Err(ImageError::PixelOutOfRange {
                    index: i,
                    value: value as u32,
                    maxval,
                });
            }
            pixels.push(value);
        }
        pixels
    } else {
        let mut pixels = Vec::with_capacity(count);
        for i in 0..count {
            cursor.skip_separators();
            let token = cursor.take_token();
            if token.is_empty() {
                return Err(ImageError::TruncatedPixels {
                    expected: count,
                    found: i,
                });
            }
            let value: u32 = std::str::from_utf8(token)
                .ok()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| ImageError::InvalidHeaderField {
                    field: "pixel",
                    token: String::from_utf8_lossy(token).into_owned(),
                })?;
            if value > maxval as u32 {
                return Err(ImageError::PixelOutOfRange {
                    index: i,
                    value,
                    maxval,
                });
            }
            pixels.push(value as u16);
        }
        pixels
    };

    GrayImage::new(width as usize, height as usize, maxval, pixels)
}

/// Encode an image as PGM, bit-exact inverse of [`load_pgm`].
pub fn encode_pgm(img: &GrayImage, format: PgmFormat) -> Vec<u8> {
    let mut out = Vec::new();
    match format {
        PgmFormat::Binary => {
            out.extend_from_slice(
                format!("P5\n{} {}\n{}\n", img.width, img.height, img.maxval).as_bytes(),
            );
            if img.maxval > 255 {
                for &p in &img.pixels {
                    out.extend_from_slice(&p.to_be_bytes());
                }
            } else {
                out.extend(img.pixels.iter().map(|&p| p as u8));
            }
        }
        PgmFormat::Ascii => {
            out.extend_from_slice(
                format!("P2\n{} {}\n{}\n", img.width, img.height, img.maxval).as_bytes(),
            );
            let mut line_len = 0;
            for (i, &p) in img.pixels.iter().enumerate() {
                let token = p.to_string();
                if line_len + token.len() + 1 > 70 && line_len > 0 {
                    out.push(b'\n');
                    line_len = 0;
                } else if i > 0 && line_len > 0 {
                    out.push(b' ');
                    line_len += 1;
                }
                out.extend_from_slice(token.as_bytes());
                line_len += token.len();
            }
            out.push(b'\n');
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Skip whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn take_token(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        &self.bytes[start..self.pos]
    }

    fn read_header_number(&mut self, field: &'static str) -> Result<u64, ImageError> {
        self.skip_separators();
        let token = self.take_token();
        if token.is_empty() {
            return Err(ImageError::MissingHeaderField { field });
        }
        std::str::from_utf8(token)
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ImageError::InvalidHeaderField {
                field,
                token: String::from_utf8_lossy(token).into_owned(),
            })
    }
}
