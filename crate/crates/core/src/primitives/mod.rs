//! The two standard building blocks the cipher composes: SHA-512
//! (FIPS 180-4) and single-block AES-128 (FIPS 197).

mod aes;
mod sha512;

pub use aes::{aes128_decrypt_block, aes128_encrypt_block, Aes128, AesBlock, AesKey128};
pub use sha512::{sha512, Digest512, Sha512};
