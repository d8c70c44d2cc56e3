//! Adaptive two-phase grayscale image cipher.
//!
//! Phase 1 scrambles the image with a tent-map keystream, a whole-image
//! pixel permutation and chaos-driven bit crossover. Phase 2 is gated by
//! two Mamdani fuzzy systems: one decides whether to run the AES-Chaos block
//! chain, the other how many rounds of hash-seeded XOR chaining to apply.
//! The [`metrics`] module provides the usual cipher-image statistics.
//!
//! ```no_run
//! use acfz::{decrypt, encrypt, imgio, MasterKey, RunConfig};
//!
//! let img = imgio::load_gray("plain.pgm")?;
//! let master = MasterKey([7u8; 64]);
//! let config = RunConfig::default();
//! let enc = encrypt(&img, &master, &config)?;
//! let dec = decrypt(&enc.container, &enc.key, &config.chaos)?;
//! assert_eq!(dec.image, img);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod chaos;
pub mod fis;
pub mod image;
pub mod imgio;
pub mod keyschedule;
pub mod metrics;
pub mod phase1;
pub mod phase2;
pub mod pipeline;
pub mod primitives;

pub use chaos::{ChaosParams, Permutation, TentMapState};
pub use image::GrayImage;
pub use imgio::CipherContainer;
pub use keyschedule::{derive_seeds, DecryptionKey, DerivedSeeds, MasterKey};
pub use metrics::SecurityReport;
pub use pipeline::{decrypt, encrypt, Decrypted, Encrypted, PipelineError, RunConfig};
pub use primitives::Digest512;
