//! End-to-end encryption and decryption.
//!
//! Encryption hashes the plain image, derives the seeds, runs the first
//! phase on the image and on its companion (pixel (0,0) with the LSB
//! flipped), pads both to 64 bytes and hands them to the adaptive phase.
//! The result is an [`CipherContainer`] and a [`DecryptionKey`] recording
//! the hash, the AES-Chaos flag and the XOR round count.
//!
//! Decryption replays the recorded stages in reverse and never evaluates a
//! fuzzy system.

use thiserror::Error;

use crate::chaos::ChaosParams;
use crate::image::{GrayImage, ImageError};
use crate::imgio::{padded_len, CipherContainer, ContainerError};
use crate::keyschedule::{derive_seeds, DecryptionKey, KeyError, MasterKey};
use crate::phase1::{phase1_decrypt, phase1_encrypt};
use crate::phase2::{phase2_decrypt, run_phase2, Phase2Config, Phase2Input, Phase2Outcome};
use crate::primitives::{sha512, Digest512};

pub use crate::phase2::Phase2Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("SEC must lie in [0, 100], got {0}")]
    Sec(f64),
    #[error("mu must lie in (0, 2), got {0}")]
    Mu(f64),
    #[error("threshold {name} must lie in [0, 1], got {value}")]
    Threshold { name: &'static str, value: f64 },
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Phase2(#[from] Phase2Error),
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Every tunable of one encryption run.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RunConfig {
    pub chaos: ChaosParams,
    pub phase2: Phase2Config,
}

impl RunConfig {
    pub fn with_sec(sec: f64) -> Self {
        Self {
            chaos: ChaosParams::default(),
            phase2: Phase2Config::with_sec(sec),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.phase2;
        if !(0.0..=100.0).contains(&p.sec) {
            return Err(ConfigError::Sec(p.sec));
        }
        if !(self.chaos.mu > 0.0 && self.chaos.mu < 2.0) {
            return Err(ConfigError::Mu(self.chaos.mu));
        }
        for (name, value) in [("T1", p.t1), ("T2", p.t2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Threshold { name, value });
            }
        }
        Ok(())
    }
}

/// SHA-512 of the row-major pixel bytes.
pub fn image_hash(img: &GrayImage) -> Digest512 {
    sha512(img.pixels())
}

/// The plain image with the least-significant bit of pixel (0,0) flipped.
pub fn companion_of(img: &GrayImage) -> GrayImage {
    let mut twin = img.clone();
    twin.pixels_mut()[0] ^= 1;
    twin
}

#[derive(Clone, Debug)]
pub struct Encrypted {
    pub container: CipherContainer,
    pub key: DecryptionKey,
    pub outcome: Phase2Outcome,
}

fn padded(mut bytes: Vec<u8>) -> Vec<u8> {
    bytes.resize(padded_len(bytes.len()), 0);
    bytes
}

pub fn encrypt(
    img: &GrayImage,
    master: &MasterKey,
    config: &RunConfig,
) -> Result<Encrypted, PipelineError> {
    config.validate()?;
    let seeds = derive_seeds(master);
    let twin = companion_of(img);
    let (hash, twin_hash) = (image_hash(img), image_hash(&twin));

    let (pre, twin_pre) = std::thread::scope(|s| {
        let worker = s.spawn(|| phase1_encrypt(&twin, &seeds.bind_image(&twin_hash), &config.chaos));
        let pre = phase1_encrypt(img, &seeds.bind_image(&hash), &config.chaos);
        (pre, worker.join().expect("companion worker panicked"))
    });
    let pre = padded(pre.into_pixels());
    let twin_pre = padded(twin_pre.into_pixels());

    let outcome = run_phase2(
        Phase2Input { pre: &pre, hash },
        Phase2Input {
            pre: &twin_pre,
            hash: twin_hash,
        },
        &seeds,
        &config.chaos,
        &config.phase2,
    )?;
    let key = DecryptionKey::new(*master, hash, outcome.aes_flag, outcome.xor_count)?;
    let container = CipherContainer::new(
        img.width() as u32,
        img.height() as u32,
        outcome.cipher.clone(),
    )?;
    Ok(Encrypted {
        container,
        key,
        outcome,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decrypted {
    pub image: GrayImage,
    /// Whether the recovered image hashes to the value stored in the key.
    pub hash_matches: bool,
}

pub fn decrypt(
    container: &CipherContainer,
    key: &DecryptionKey,
    chaos: &ChaosParams,
) -> Result<Decrypted, PipelineError> {
    let seeds = derive_seeds(&key.master).bind_image(&key.image_hash);
    let mut data = phase2_decrypt(
        &container.payload,
        &seeds,
        chaos,
        &key.image_hash,
        key.aes_flag,
        key.xor_count(),
    )?;
    data.truncate(container.pixel_count());
    let pre = GrayImage::new(container.width as usize, container.height as usize, data)?;
    let image = phase1_decrypt(&pre, &seeds, chaos);
    let hash_matches = image_hash(&image) == key.image_hash;
    Ok(Decrypted {
        image,
        hash_matches,
    })
}
