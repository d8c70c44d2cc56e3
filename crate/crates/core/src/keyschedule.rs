//! Seed derivation from the 512-bit master key and the 1029-bit
//! decryption-key record.
//!
//! `K512 = SHA-512(master)` is cut into four big-endian 128-bit slices.
//! The first three become the tent-map seeds for keystream XOR, shuffling
//! and crossover (`slice / 2^128`); the last is the AES key of the second
//! phase, and its own ratio seeds the AES block order.

use thiserror::Error;

use crate::primitives::{sha512, AesKey128, Digest512};

/// Payload size of the decryption key: master ‖ image hash ‖ flag ‖ count.
pub const DECRYPTION_KEY_BITS: usize = 512 + 512 + 1 + 4;

/// Serialized size: version tag, 1029 payload bits, 3 zero pad bits.
pub const KEY_FILE_LEN: usize = 130;

pub const KEY_FILE_VERSION: u8 = 0x01;

/// Largest XOR-by-hash round count the 4-bit field can carry.
pub const MAX_XOR_COUNT: u8 = 15;

/// `log2(2^1029 * 10^14)`, with `log2(10^14)` floored to 46.
pub fn key_space_bits() -> u32 {
    DECRYPTION_KEY_BITS as u32 + 46
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MasterKey(pub [u8; 64]);

impl MasterKey {
    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        bytes.try_into().ok().map(MasterKey)
    }

    pub fn as_bytes(&self) -> &[u8; 64] {
        &self.0
    }

    /// Copy with bit `bit` (0 = MSB of byte 0) inverted.
    pub fn with_bit_flipped(&self, bit: usize) -> Self {
        let mut bytes = self.0;
        bytes[bit / 8] ^= 0x80 >> (bit % 8);
        MasterKey(bytes)
    }
}

impl std::fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MasterKey(..)")
    }
}

/// Everything the cipher derives from one master key.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedSeeds {
    /// The four 128-bit slices of `K512`, in order.
    pub slices: [u128; 4],
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub phase2_key: AesKey128,
    pub x_aes: f64,
}

impl DerivedSeeds {
    /// Replaces the keystream seed by one that also depends on the plain
    /// image: `x0 = (K512[0..128] xor H[0..128]) / 2^128`.
    ///
    /// The image hash travels in the decryption key, so the decryptor can
    /// rebuild the same seed.
    #[must_use]
    pub fn bind_image(&self, image_hash: &Digest512) -> Self {
        let head = u128::from_be_bytes(image_hash.0[..16].try_into().unwrap());
        Self {
            x0: ratio_2_128(self.slices[0] ^ head),
            ..*self
        }
    }
}

/// `value / 2^128` as an `f64`, truncated (never rounded) to 53
/// significant bits so the result stays strictly below 1.
pub fn ratio_2_128(value: u128) -> f64 {
    if value == 0 {
        return 0.0;
    }
    let significant = 128 - value.leading_zeros();
    let (mantissa, exponent) = if significant > 53 {
        let shift = significant - 53;
        (value >> shift, shift as i32 - 128)
    } else {
        (value, -128)
    };
    mantissa as f64 * 2f64.powi(exponent)
}

pub fn derive_seeds(master: &MasterKey) -> DerivedSeeds {
    let k512 = sha512(&master.0);
    let mut slices = [0u128; 4];
    for (slice, chunk) in slices.iter_mut().zip(k512.0.chunks_exact(16)) {
        *slice = u128::from_be_bytes(chunk.try_into().unwrap());
    }
    let phase2_key: AesKey128 = k512.0[48..64].try_into().unwrap();
    DerivedSeeds {
        slices,
        x0: ratio_2_128(slices[0]),
        x1: ratio_2_128(slices[1]),
        x2: ratio_2_128(slices[2]),
        phase2_key,
        x_aes: ratio_2_128(slices[3]),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error("decryption key file must be {KEY_FILE_LEN} bytes, got {0}")]
    WrongLength(usize),
    #[error("unknown decryption key version {0:#04x}")]
    UnknownVersion(u8),
    #[error("decryption key padding bits are not zero")]
    NonzeroPadding,
    #[error("xor round count {0} exceeds {MAX_XOR_COUNT}")]
    XorCountOutOfRange(u8),
}

/// The record a recipient needs to undo one encryption.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecryptionKey {
    pub master: MasterKey,
    pub image_hash: Digest512,
    pub aes_flag: bool,
    xor_count: u8,
}

impl DecryptionKey {
    pub fn new(
        master: MasterKey,
        image_hash: Digest512,
        aes_flag: bool,
        xor_count: u8,
    ) -> Result<Self, KeyError> {
        if xor_count > MAX_XOR_COUNT {
            return Err(KeyError::XorCountOutOfRange(xor_count));
        }
        Ok(Self {
            master,
            image_hash,
            aes_flag,
            xor_count,
        })
    }

    pub fn xor_count(&self) -> u8 {
        self.xor_count
    }

    pub fn pack(&self) -> [u8; KEY_FILE_LEN] {
        pack_decryption_key(&self.master, &self.image_hash, self.aes_flag, self.xor_count)
    }

    pub fn unpack(blob: &[u8]) -> Result<Self, KeyError> {
        let (master, image_hash, aes_flag, xor_count) = unpack_decryption_key(blob)?;
        Ok(Self {
            master,
            image_hash,
            aes_flag,
            xor_count,
        })
    }
}

/// Layout: `[0x01][master: 64][hash: 64][flag:1 count:4 pad:3]`, bits MSB-first.
///
/// # Panics
///
/// Panics if `xor_count > 15`.
pub fn pack_decryption_key(
    master: &MasterKey,
    hash: &Digest512,
    aes_flag: bool,
    xor_count: u8,
) -> [u8; KEY_FILE_LEN] {
    assert!(xor_count <= MAX_XOR_COUNT, "xor_count {xor_count} > 15");
    let mut out = [0u8; KEY_FILE_LEN];
    out[0] = KEY_FILE_VERSION;
    out[1..65].copy_from_slice(&master.0);
    out[65..129].copy_from_slice(&hash.0);
    out[129] = ((aes_flag as u8) << 7) | (xor_count << 3);
    out
}

pub fn unpack_decryption_key(blob: &[u8]) -> Result<(MasterKey, Digest512, bool, u8), KeyError> {
    if blob.len() != KEY_FILE_LEN {
        return Err(KeyError::WrongLength(blob.len()));
    }
    if blob[0] != KEY_FILE_VERSION {
        return Err(KeyError::UnknownVersion(blob[0]));
    }
    let tail = blob[129];
    if tail & 0b111 != 0 {
        return Err(KeyError::NonzeroPadding);
    }
    let master = MasterKey(blob[1..65].try_into().unwrap());
    let hash = Digest512(blob[65..129].try_into().unwrap());
    Ok((master, hash, tail & 0x80 != 0, (tail >> 3) & 0x0f))
}
