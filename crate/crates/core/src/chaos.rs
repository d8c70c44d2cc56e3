//! Tent-map pseudo-random source.
//!
//! Every key-dependent decision in the cipher (keystream bytes, pixel
//! permutations, crossover partners, AES block order) is drawn from the
//! piecewise-linear tent map
//!
//! ```text
//! x' = mu * x        if x < 1/2
//! x' = mu * (1 - x)  if x >= 1/2
//! ```
//!
//! States are plain values: every operation takes a state and hands back
//! the advanced one, so a caller can continue a stream exactly where a
//! previous call stopped.

use std::fmt;

/// Map parameter used by the pipeline unless overridden.
pub const DEFAULT_MU: f64 = 1.9999;

/// Iterations discarded before a pipeline stream emits anything.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Fixed-point scale applied before integer quantization of a map value.
const QUANT_SCALE: f64 = 1e14;

/// Map parameter and warm-up length shared by every stream of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChaosParams {
    pub mu: f64,
    pub burn_in: usize,
}

impl Default for ChaosParams {
    fn default() -> Self {
        Self {
            mu: DEFAULT_MU,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

impl ChaosParams {
    pub fn new(mu: f64, burn_in: usize) -> Self {
        Self { mu, burn_in }
    }

    /// A warmed state seeded at `x`.
    pub fn seeded(&self, x: f64) -> TentMapState {
        TentMapState::warmed(x, self.mu, self.burn_in)
    }
}

/// One point on a tent-map orbit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TentMapState {
    x: f64,
    mu: f64,
    iteration: u64,
}

impl TentMapState {
    pub fn new(x: f64, mu: f64) -> Self {
        Self { x, mu, iteration: 0 }
    }

    /// A state seeded at `x` that has already discarded `burn_in` iterations.
    pub fn warmed(x: f64, mu: f64, burn_in: usize) -> Self {
        let mut state = Self::new(x, mu);
        for _ in 0..burn_in {
            state = state.step();
        }
        state
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Number of steps taken since the seed.
    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// One application of the map.
    ///
    /// A result outside (0, 1) can only come from floating-point edge cases
    /// (a zero seed, `mu` at the boundary); it is replaced by a fixed point
    /// just above 0.4 that depends on the iteration count, so the stream
    /// stays total and reproducible.
    #[must_use]
    pub fn step(self) -> Self {
        let x = if self.x < 0.5 {
            self.mu * self.x
        } else {
            self.mu * (1.0 - self.x)
        };
        let iteration = self.iteration + 1;
        let x = if x > 0.0 && x < 1.0 {
            x
        } else {
            0.400000000000001 + (iteration % 7) as f64 * 1e-15
        };
        Self {
            x,
            mu: self.mu,
            iteration,
        }
    }

    /// Steps in place and returns the new value.
    pub fn next_value(&mut self) -> f64 {
        *self = self.step();
        self.x
    }

    /// Shifts the orbit by `delta` modulo 1, keeping `mu` and the counter.
    #[must_use]
    pub fn perturbed(self, delta: f64) -> Self {
        let shifted = self.x + delta;
        Self {
            x: shifted - shifted.floor(),
            ..self
        }
    }
}

/// `floor(x * 10^14)`, the integer every discrete draw is reduced from.
pub fn quantize(x: f64) -> u64 {
    (x * QUANT_SCALE).floor() as u64
}

/// Byte form of a map value: `floor(x * 10^14) mod 256`.
pub fn quantize_byte(x: f64) -> u8 {
    (quantize(x) % 256) as u8
}

/// Iterates `n` times, emitting one byte per step.
pub fn keystream_bytes(state: TentMapState, n: usize) -> (Vec<u8>, TentMapState) {
    let mut state = state;
    let bytes = (0..n).map(|_| quantize_byte(state.next_value())).collect();
    (bytes, state)
}

/// Fills `out` with keystream bytes, returning the advanced state.
pub fn fill_keystream(state: TentMapState, out: &mut [u8]) -> TentMapState {
    let mut state = state;
    for b in out.iter_mut() {
        *b = quantize_byte(state.next_value());
    }
    state
}

/// Draws `n` map values and returns the indices that sort them ascending.
///
/// Ties keep their original order (stable sort).
pub fn sort_index_permutation(state: TentMapState, n: usize) -> (Permutation, TentMapState) {
    let mut state = state;
    let values: Vec<f64> = (0..n).map(|_| state.next_value()).collect();
    let mut indices: Vec<usize> = (0..n).collect();
    indices.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    (Permutation(indices), state)
}

/// One step, reduced to an index in `0..modulus`.
///
/// # Panics
///
/// Panics if `modulus` is zero.
pub fn index_draw(state: TentMapState, modulus: usize) -> (usize, TentMapState) {
    assert!(modulus > 0, "index_draw modulus must be positive");
    let next = state.step();
    ((quantize(next.x) % modulus as u64) as usize, next)
}

/// A bijection on `0..n`, stored as the image of each position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotAPermutation;

impl fmt::Display for NotAPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("sequence is not a permutation of 0..n")
    }
}

impl std::error::Error for NotAPermutation {}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Validates that `indices` hits every value in `0..len` exactly once.
    pub fn from_indices(indices: Vec<usize>) -> Result<Self, NotAPermutation> {
        let mut seen = vec![false; indices.len()];
        for &i in &indices {
            match seen.get_mut(i) {
                Some(slot) if !*slot => *slot = true,
                _ => return Err(NotAPermutation),
            }
        }
        Ok(Self(indices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// `out[k] = input[self[k]]`.
    pub fn gather<T: Copy>(&self, input: &[T]) -> Vec<T> {
        debug_assert_eq!(input.len(), self.len());
        self.0.iter().map(|&i| input[i]).collect()
    }

    /// `out[self[k]] = input[k]`; undoes [`Permutation::gather`].
    pub fn scatter<T: Copy + Default>(&self, input: &[T]) -> Vec<T> {
        debug_assert_eq!(input.len(), self.len());
        let mut out = vec![T::default(); input.len()];
        for (k, &i) in self.0.iter().enumerate() {
            out[i] = input[k];
        }
        out
    }
}
