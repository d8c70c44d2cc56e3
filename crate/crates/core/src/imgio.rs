//! On-disk formats: binary PGM (P5) and 8-bit grayscale PNG for images,
//! and the `ACFZ` container for ciphertexts.
//!
//! Container layout, all integers big-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "ACFZ"
//!      4     1  version (1)
//!      5     4  width
//!      9     4  height
//!     13     4  padded_len (>= width*height, multiple of 64)
//!     17     n  payload, exactly padded_len bytes
//! ```

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::image::{GrayImage, ImageError};

pub const CONTAINER_MAGIC: [u8; 4] = *b"ACFZ";
pub const CONTAINER_VERSION: u8 = 1;
pub const CONTAINER_HEADER_LEN: usize = 17;

/// Padding granularity of the cipher payload.
pub const PAYLOAD_ALIGN: usize = 64;

#[derive(Debug, Error)]
pub enum ImgIoError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("PGM maxval must be 255, got {0}")]
    MaxvalNot255(u32),
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("not an ACFZ container (bad magic)")]
    BadMagic,
    #[error("unknown container version {0}")]
    UnknownVersion(u8),
    #[error("container declares {declared} payload bytes, file holds {actual}")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("invalid container layout: {0}")]
    InvalidLayout(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parses a binary PGM. Header comments (`#` to end of line) are allowed.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, ImgIoError> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(ImgIoError::UnsupportedFormat("not a PNM file".into()));
    }
    if bytes[1] != b'5' {
        return Err(ImgIoError::UnsupportedFormat(format!(
            "PNM variant P{} (only binary graymap P5 is supported)",
            bytes[1] as char
        )));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(ImgIoError::CorruptHeader("expected a decimal number".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| ImgIoError::CorruptHeader("number out of range".into()))?;
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(ImgIoError::CorruptHeader("missing separator after maxval".into()));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(ImgIoError::MaxvalNot255(maxval));
    }
    let expected = (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| ImgIoError::CorruptHeader("dimensions overflow".into()))?;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(ImgIoError::Truncated {
            expected,
            found: raster.len(),
        });
    }
    Ok(GrayImage::new(
        width as usize,
        height as usize,
        raster[..expected].to_vec(),
    )?)
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

fn decode_png(bytes: &[u8]) -> Result<GrayImage, ImgIoError> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| ImgIoError::CorruptHeader(e.to_string()))?;
    match decoded {
        image::DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            Ok(GrayImage::new(w as usize, h as usize, buf.into_raw())?)
        }
        other => Err(ImgIoError::UnsupportedFormat(format!(
            "PNG color type {:?} (only 8-bit grayscale is supported)",
            other.color()
        ))),
    }
}

/// Decodes PGM (P5) or 8-bit grayscale PNG, chosen by the file signature.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage, ImgIoError> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else {
        decode_pgm(bytes)
    }
}

pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage, ImgIoError> {
    decode_gray(&fs::read(path)?)
}

/// Always writes PGM, whatever the extension.
pub fn store_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), ImgIoError> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

/// Ciphertext plus the original image dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherContainer {
    pub width: u32,
    pub height: u32,
    pub payload: Vec<u8>,
}

/// Smallest multiple of [`PAYLOAD_ALIGN`] that holds `len` bytes.
pub fn padded_len(len: usize) -> usize {
    len.div_ceil(PAYLOAD_ALIGN) * PAYLOAD_ALIGN
}

impl CipherContainer {
    pub fn new(width: u32, height: u32, payload: Vec<u8>) -> Result<Self, ContainerError> {
        let c = Self {
            width,
            height,
            payload,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), ContainerError> {
        let pixels = self.width as u64 * self.height as u64;
        let len = self.payload.len() as u64;
        if len < pixels || !len.is_multiple_of(PAYLOAD_ALIGN as u64) || len > u32::MAX as u64 {
            return Err(ContainerError::InvalidLayout(format!(
                "payload of {len} bytes for a {}x{} image",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(CONTAINER_HEADER_LEN + self.payload.len());
        out.extend_from_slice(&CONTAINER_MAGIC);
        out.push(CONTAINER_VERSION);
        out.extend_from_slice(&self.width.to_be_bytes());
        out.extend_from_slice(&self.height.to_be_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Validates every header field before looking at the payload.
    pub fn decode(bytes: &[u8]) -> Result<Self, ContainerError> {
        if bytes.len() < 4 || bytes[..4] != CONTAINER_MAGIC {
            return Err(ContainerError::BadMagic);
        }
        if bytes.len() < CONTAINER_HEADER_LEN {
            return Err(ContainerError::InvalidLayout("header truncated".into()));
        }
        if bytes[4] != CONTAINER_VERSION {
            return Err(ContainerError::UnknownVersion(bytes[4]));
        }
        let be = |at: usize| u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap());
        let (width, height, declared) = (be(5), be(9), be(13) as usize);
        let actual = bytes.len() - CONTAINER_HEADER_LEN;
        if declared != actual {
            return Err(ContainerError::LengthMismatch { declared, actual });
        }
        Self::new(width, height, bytes[CONTAINER_HEADER_LEN..].to_vec())
    }
}

pub fn store_cipher(container: &CipherContainer, path: impl AsRef<Path>) -> Result<(), ContainerError> {
    fs::write(path, container.encode())?;
    Ok(())
}

pub fn load_cipher(path: impl AsRef<Path>) -> Result<CipherContainer, ContainerError> {
    CipherContainer::decode(&fs::read(path)?)
}
