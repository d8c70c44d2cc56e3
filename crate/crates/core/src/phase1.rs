//! First-phase transforms: keystream XOR, whole-image pixel shuffling and
//! chaos-driven single-point crossover, each with its exact inverse.
//!
//! All three run on the row-major pixel vector. Their composition turns the
//! plain image into the "pre-encrypted" image handed to the adaptive phase.

use crate::chaos::{fill_keystream, index_draw, sort_index_permutation, ChaosParams, Permutation};
use crate::image::GrayImage;
use crate::keyschedule::DerivedSeeds;

/// XORs every pixel with a tent-map keystream seeded at `seed`.
/// Applying it twice with the same arguments restores the image.
pub fn xor_keystream(img: &GrayImage, seed: f64, params: &ChaosParams) -> GrayImage {
    let mut pixels = img.pixels().to_vec();
    xor_keystream_in_place(&mut pixels, seed, params);
    img.with_pixels(pixels)
}

pub(crate) fn xor_keystream_in_place(pixels: &mut [u8], seed: f64, params: &ChaosParams) {
    let mut stream = vec![0u8; pixels.len()];
    fill_keystream(params.seeded(seed), &mut stream);
    for (p, t) in pixels.iter_mut().zip(stream) {
        *p ^= t;
    }
}

/// Sort-index permutation of the whole pixel vector for `seed`.
pub fn shuffle_permutation(len: usize, seed: f64, params: &ChaosParams) -> Permutation {
    sort_index_permutation(params.seeded(seed), len).0
}

/// Output position `k` receives input pixel `I[k]`.
pub fn shuffle(img: &GrayImage, seed: f64, params: &ChaosParams) -> GrayImage {
    let perm = shuffle_permutation(img.len(), seed, params);
    img.with_pixels(perm.gather(img.pixels()))
}

/// Output position `I[k]` receives input pixel `k`.
pub fn unshuffle(img: &GrayImage, seed: f64, params: &ChaosParams) -> GrayImage {
    let perm = shuffle_permutation(img.len(), seed, params);
    img.with_pixels(perm.scatter(img.pixels()))
}

/// Exchanges the `k` least-significant bits of `a` and `b`.
///
/// # Panics
///
/// Panics unless `1 <= k <= 7`.
pub fn crossover_pixels(a: u8, b: u8, k: u8) -> (u8, u8) {
    assert!((1..=7).contains(&k), "crossover point {k} outside 1..=7");
    let low = (1u8 << k) - 1;
    let diff = (a ^ b) & low;
    (a ^ diff, b ^ diff)
}

/// One crossover event: pixel `i`, its chaotic partner `j`, crossover point `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossoverStep {
    pub i: usize,
    pub j: usize,
    pub k: u8,
}

/// Regenerates the full crossover trace for an image of `len` pixels.
///
/// For every `i` in order the partner is drawn first (redrawn while it
/// equals `i`), then the point `k = 1 + draw mod 7`.
pub fn crossover_trace(len: usize, seed: f64, params: &ChaosParams) -> Vec<CrossoverStep> {
    assert!(len >= 2, "crossover needs at least two pixels");
    let mut state = params.seeded(seed);
    let mut trace = Vec::with_capacity(len);
    for i in 0..len {
        let j = loop {
            let (j, next) = index_draw(state, len);
            state = next;
            if j != i {
                break j;
            }
        };
        let (k, next) = index_draw(state, 7);
        state = next;
        trace.push(CrossoverStep { i, j, k: k as u8 + 1 });
    }
    trace
}

fn apply_step(pixels: &mut [u8], step: &CrossoverStep) {
    let (a, b) = crossover_pixels(pixels[step.i], pixels[step.j], step.k);
    pixels[step.i] = a;
    pixels[step.j] = b;
}

pub fn crossover_diffuse(img: &GrayImage, seed: f64, params: &ChaosParams) -> GrayImage {
    let mut pixels = img.pixels().to_vec();
    for step in &crossover_trace(pixels.len(), seed, params) {
        apply_step(&mut pixels, step);
    }
    img.with_pixels(pixels)
}

/// Replays the trace backwards; every swap is its own inverse.
pub fn crossover_undiffuse(img: &GrayImage, seed: f64, params: &ChaosParams) -> GrayImage {
    let mut pixels = img.pixels().to_vec();
    for step in crossover_trace(pixels.len(), seed, params).iter().rev() {
        apply_step(&mut pixels, step);
    }
    img.with_pixels(pixels)
}

/// Keystream XOR (seed `x0`), shuffle (`x1`), crossover (`x2`).
pub fn phase1_encrypt(img: &GrayImage, seeds: &DerivedSeeds, params: &ChaosParams) -> GrayImage {
    let xored = xor_keystream(img, seeds.x0, params);
    let shuffled = shuffle(&xored, seeds.x1, params);
    crossover_diffuse(&shuffled, seeds.x2, params)
}

pub fn phase1_decrypt(img: &GrayImage, seeds: &DerivedSeeds, params: &ChaosParams) -> GrayImage {
    let restored = crossover_undiffuse(img, seeds.x2, params);
    let unshuffled = unshuffle(&restored, seeds.x1, params);
    xor_keystream(&unshuffled, seeds.x0, params)
}
