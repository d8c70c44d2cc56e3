//! The adaptive second phase.
//!
//! Two block modules work on the padded pre-encrypted buffer:
//!
//! * **AES-Chaos**: 16-byte blocks are visited in a chaotic order. Each
//!   block is whitened with tent-map bytes and encrypted with AES-128. The
//!   first visited block uses the phase-2 key; every later block is keyed by
//!   the previous ciphertext block, and the whitening orbit is nudged by that
//!   block's byte sum.
//! * **XOR-by-hash**: 64-byte blocks are chained with XOR, starting from the
//!   plain-image hash.
//!
//! Two fuzzy checkpoints decide how much of this to apply. FIS1 looks at
//! the entropy of the pre-encrypted image and gates AES-Chaos once; FIS2
//! looks at NPCR/UACI between the cipher and a companion cipher (the same
//! pipeline run on a one-bit-modified plain image) and repeats XOR-by-hash
//! until it is satisfied or 15 rounds have been applied.

use thiserror::Error;

use crate::chaos::{fill_keystream, sort_index_permutation, ChaosParams};
use crate::fis::{fis1_default, fis2_default, FisConfig, FisError};
use crate::keyschedule::{DerivedSeeds, MAX_XOR_COUNT};
use crate::metrics::{entropy_of, npcr_of, uaci_of};
use crate::primitives::{Aes128, AesBlock, AesKey128, Digest512};

/// AES block size in bytes.
pub const AES_BLOCK: usize = 16;

/// XOR-by-hash block size in bytes (one SHA-512 digest).
pub const HASH_BLOCK: usize = 64;

pub const DEFAULT_T1: f64 = 0.5;
pub const DEFAULT_T2: f64 = 0.5;
pub const DEFAULT_SEC: f64 = 80.0;

#[derive(Debug, Error, PartialEq)]
pub enum Phase2Error {
    #[error("buffer of {len} bytes is not a multiple of the {block}-byte block size")]
    BlockAlignment { len: usize, block: usize },
    #[error("companion buffer has {companion} bytes, cipher has {main}")]
    CompanionMismatch { main: usize, companion: usize },
    #[error(transparent)]
    Fis(#[from] FisError),
}

fn check_alignment(len: usize, block: usize) -> Result<(), Phase2Error> {
    if len == 0 || !len.is_multiple_of(block) {
        Err(Phase2Error::BlockAlignment { len, block })
    } else {
        Ok(())
    }
}

/// Whitening shift derived from a ciphertext block: byte sum / 4096.
fn feedback(block: &AesBlock) -> f64 {
    block.iter().map(|&b| b as u32).sum::<u32>() as f64 / 4096.0
}

/// Visits the blocks in chaotic order and yields, for each one, its index,
/// the whitening bytes and the AES key. `cipher_of` returns the ciphertext
/// of the block just processed, which feeds the next key and whitening.
fn aes_chaos_walk(
    len: usize,
    key: &AesKey128,
    x_aes: f64,
    params: &ChaosParams,
    mut process: impl FnMut(usize, &AesBlock, &Aes128) -> AesBlock,
) {
    let blocks = len / AES_BLOCK;
    let (order, mut state) = sort_index_permutation(params.seeded(x_aes), blocks);
    let mut previous: Option<AesBlock> = None;
    for &b in order.as_slice() {
        let mut whitening = [0u8; AES_BLOCK];
        let cipher_key = match &previous {
            None => *key,
            Some(prev) => {
                state = state.perturbed(feedback(prev));
                *prev
            }
        };
        state = fill_keystream(state, &mut whitening);
        previous = Some(process(b, &whitening, &Aes128::new(&cipher_key)));
    }
}

pub fn aes_chaos_encrypt(
    data: &[u8],
    key: &AesKey128,
    x_aes: f64,
    params: &ChaosParams,
) -> Result<Vec<u8>, Phase2Error> {
    check_alignment(data.len(), AES_BLOCK)?;
    let mut out = vec![0u8; data.len()];
    aes_chaos_walk(data.len(), key, x_aes, params, |b, whitening, aes| {
        let range = b * AES_BLOCK..(b + 1) * AES_BLOCK;
        let mut block: AesBlock = data[range.clone()].try_into().unwrap();
        for (p, w) in block.iter_mut().zip(whitening) {
            *p ^= w;
        }
        let c = aes.encrypt_block(&block);
        out[range].copy_from_slice(&c);
        c
    });
    Ok(out)
}

/// Every key and whitening input is a ciphertext block, so the chain can
/// be replayed from the cipher alone.
pub fn aes_chaos_decrypt(
    data: &[u8],
    key: &AesKey128,
    x_aes: f64,
    params: &ChaosParams,
) -> Result<Vec<u8>, Phase2Error> {
    check_alignment(data.len(), AES_BLOCK)?;
    let mut out = vec![0u8; data.len()];
    aes_chaos_walk(data.len(), key, x_aes, params, |b, whitening, aes| {
        let range = b * AES_BLOCK..(b + 1) * AES_BLOCK;
        let c: AesBlock = data[range.clone()].try_into().unwrap();
        let mut p = aes.decrypt_block(&c);
        for (v, w) in p.iter_mut().zip(whitening) {
            *v ^= w;
        }
        out[range].copy_from_slice(&p);
        c
    });
    Ok(out)
}

/// `c1 = b1 ^ hash`, `ck = bk ^ c(k-1)`.
pub fn xor_by_hash(data: &[u8], hash: &Digest512) -> Result<Vec<u8>, Phase2Error> {
    check_alignment(data.len(), HASH_BLOCK)?;
    let mut out = data.to_vec();
    let mut prev = hash.0;
    for block in out.chunks_exact_mut(HASH_BLOCK) {
        for (b, p) in block.iter_mut().zip(prev.iter()) {
            *b ^= p;
        }
        prev.copy_from_slice(block);
    }
    Ok(out)
}

/// `b1 = c1 ^ hash`, `bk = ck ^ c(k-1)`.
pub fn xor_by_hash_inverse(data: &[u8], hash: &Digest512) -> Result<Vec<u8>, Phase2Error> {
    check_alignment(data.len(), HASH_BLOCK)?;
    let mut out = data.to_vec();
    for (k, block) in out.chunks_exact_mut(HASH_BLOCK).enumerate() {
        let prev = if k == 0 {
            &hash.0[..]
        } else {
            &data[(k - 1) * HASH_BLOCK..k * HASH_BLOCK]
        };
        for (b, p) in block.iter_mut().zip(prev) {
            *b ^= p;
        }
    }
    Ok(out)
}

/// Thresholds, requested security level and the two fuzzy systems.
#[derive(Clone, Debug, PartialEq)]
pub struct Phase2Config {
    pub t1: f64,
    pub t2: f64,
    pub sec: f64,
    pub fis1: FisConfig,
    pub fis2: FisConfig,
}

impl Default for Phase2Config {
    fn default() -> Self {
        Self::with_sec(DEFAULT_SEC)
    }
}

impl Phase2Config {
    pub fn with_sec(sec: f64) -> Self {
        Self {
            t1: DEFAULT_T1,
            t2: DEFAULT_T2,
            sec,
            fis1: fis1_default(),
            fis2: fis2_default(),
        }
    }

    /// Round cap; equals the capacity of the 4-bit key field.
    pub fn max_xor_rounds(&self) -> u8 {
        MAX_XOR_COUNT
    }

    pub fn s_dive(&self, entropy: f64) -> Result<f64, FisError> {
        self.fis1.evaluate(&[("Entropy", entropy), ("SEC", self.sec)])
    }

    pub fn d_dive(&self, uaci: f64, npcr: f64) -> Result<f64, FisError> {
        self.fis2
            .evaluate(&[("UACI", uaci), ("NPCR", npcr), ("SEC", self.sec)])
    }
}

/// A padded pre-encrypted buffer together with the hash of its plain image.
#[derive(Clone, Debug)]
pub struct Phase2Input<'a> {
    pub pre: &'a [u8],
    pub hash: Digest512,
}

/// NPCR/UACI between cipher and companion at one checkpoint-2 visit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiveSample {
    pub npcr: f64,
    pub uaci: f64,
    pub d_dive: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phase2Outcome {
    pub cipher: Vec<u8>,
    pub companion_cipher: Vec<u8>,
    pub aes_flag: bool,
    pub xor_count: u8,
    pub entropy: f64,
    pub s_dive: f64,
    /// Every checkpoint-2 evaluation, including the one that ended the loop;
    /// always `xor_count + 1` entries.
    pub d_dive_history: Vec<DiveSample>,
}

/// Runs `f` on both buffers, the companion on a scoped thread.
fn on_both<T: Send>(
    main: &[u8],
    companion: &[u8],
    f: impl Fn(&[u8]) -> T + Sync,
) -> (T, T) {
    std::thread::scope(|s| {
        let handle = s.spawn(|| f(companion));
        let a = f(main);
        (a, handle.join().expect("companion worker panicked"))
    })
}

/// Both checkpoints, applied to the cipher and its companion in lockstep.
pub fn run_phase2(
    main: Phase2Input<'_>,
    companion: Phase2Input<'_>,
    seeds: &DerivedSeeds,
    params: &ChaosParams,
    config: &Phase2Config,
) -> Result<Phase2Outcome, Phase2Error> {
    if main.pre.len() != companion.pre.len() {
        return Err(Phase2Error::CompanionMismatch {
            main: main.pre.len(),
            companion: companion.pre.len(),
        });
    }
    check_alignment(main.pre.len(), HASH_BLOCK)?;

    let entropy = entropy_of(main.pre);
    let s_dive = config.s_dive(entropy)?;
    let aes_flag = s_dive < config.t1;
    let (mut cipher, mut shadow) = if aes_flag {
        let (a, b) = on_both(main.pre, companion.pre, |buf| {
            aes_chaos_encrypt(buf, &seeds.phase2_key, seeds.x_aes, params)
        });
        (a?, b?)
    } else {
        (main.pre.to_vec(), companion.pre.to_vec())
    };

    let mut history = Vec::new();
    let mut rounds = 0u8;
    loop {
        let npcr = npcr_of(&cipher, &shadow).expect("equal lengths");
        let uaci = uaci_of(&cipher, &shadow).expect("equal lengths");
        let d_dive = config.d_dive(uaci, npcr)?;
        history.push(DiveSample { npcr, uaci, d_dive });
        if d_dive >= config.t2 || rounds >= config.max_xor_rounds() {
            break;
        }
        cipher = xor_by_hash(&cipher, &main.hash)?;
        shadow = xor_by_hash(&shadow, &companion.hash)?;
        rounds += 1;
    }

    Ok(Phase2Outcome {
        cipher,
        companion_cipher: shadow,
        aes_flag,
        xor_count: rounds,
        entropy,
        s_dive,
        d_dive_history: history,
    })
}

/// Undoes `xor_count` XOR-by-hash rounds and, if flagged, AES-Chaos.
/// No fuzzy system is consulted.
pub fn phase2_decrypt(
    cipher: &[u8],
    seeds: &DerivedSeeds,
    params: &ChaosParams,
    hash: &Digest512,
    aes_flag: bool,
    xor_count: u8,
) -> Result<Vec<u8>, Phase2Error> {
    check_alignment(cipher.len(), HASH_BLOCK)?;
    let mut data = cipher.to_vec();
    for _ in 0..xor_count {
        data = xor_by_hash_inverse(&data, hash)?;
    }
    if aes_flag {
        data = aes_chaos_decrypt(&data, &seeds.phase2_key, seeds.x_aes, params)?;
    }
    Ok(data)
}
