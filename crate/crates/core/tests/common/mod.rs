#![allow(dead_code)]

use std::path::PathBuf;

use acfz::fis::FisConfig;
use acfz::{imgio, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// The six 256x256 reference images shipped with the tests.
pub const FIXTURES: [&str; 6] = ["astronaut", "camera", "chelsea", "coffee", "rocket", "moon"];

pub fn fixture(name: &str) -> GrayImage {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", &format!("{name}.pgm")]
        .iter()
        .collect();
    imgio::load_gray(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    let mut px = vec![0u8; w * h];
    rng.fill(&mut px[..]);
    GrayImage::new(w, h, px).unwrap()
}

pub fn random_bytes<const N: usize>(rng: &mut impl Rng) -> [u8; N] {
    let mut out = [0u8; N];
    rng.fill(&mut out[..]);
    out
}

pub fn hex(s: &str) -> Vec<u8> {
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap())
        .collect()
}

/// Fraction of positions (in percent) where the two slices differ.
pub fn percent_differing(a: &[u8], b: &[u8]) -> f64 {
    assert_eq!(a.len(), b.len());
    100.0 * a.iter().zip(b).filter(|(x, y)| x != y).count() as f64 / a.len() as f64
}

/// SHA-512 example messages from FIPS 180-4 and its companion test set.
pub const SHA512_VECTORS: [(&[u8], &str); 4] = [
    (b"", "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e"),
    (b"abc", "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f"),
    (b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq", "204a8fc6dda82f0a0ced7beb8e08a41657c16ef468b228a8279be331a703c33596fd15c13b1b07f9aa1d3bea57789ca031ad85c7a71dd70354ec631238ca3445"),
    (b"abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmnoijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu", "8e959b75dae313da8cf4f72814fc143f8f7779c6eb9f7fa17299aeadb6889018501d289e4900f7e4331b99dec4b5433ac7d329eeb6dd26545e96e55b874be909"),
];

pub const MILLION_A: &str = "e718483d0ce769644e2e42c7bc15b4638e1f98b13b2044285632a803afa973ebde0ff244877ea60a4cb0432ce577c31beb009c5c2c49aa2e4eadb217ad8cc09b";

/// (key, plaintext, ciphertext): FIPS 197 Appendix B and C.1, then the
/// four ECB-AES128 blocks of SP 800-38A F.1.1.
pub const AES_VECTORS: [(&str, &str, &str); 6] = [
    ("2b7e151628aed2a6abf7158809cf4f3c", "3243f6a8885a308d313198a2e0370734", "3925841d02dc09fbdc118597196a0b32"),
    ("000102030405060708090a0b0c0d0e0f", "00112233445566778899aabbccddeeff", "69c4e0d86a7b0430d8cdb78070b4c55a"),
    ("2b7e151628aed2a6abf7158809cf4f3c", "6bc1bee22e409f96e93d7e117393172a", "3ad77bb40d7a3660a89ecaf32466ef97"),
    ("2b7e151628aed2a6abf7158809cf4f3c", "ae2d8a571e03ac9c9eb76fac45af8e51", "f5d3d58503b9699de785895a96fdbaaf"),
    ("2b7e151628aed2a6abf7158809cf4f3c", "30c81c46a35ce411e5fbc1191a0a52ef", "43b1cd7f598ece23881b00e3ed030688"),
    ("2b7e151628aed2a6abf7158809cf4f3c", "f69f2445df4f9b17ad2b417be66c3710", "7b0c785e27e8ad3f8223207104725dd4"),
];

/// Independent Mamdani evaluation on an arbitrary grid: min AND, min
/// implication, max aggregation, discrete centroid.
pub fn dense_oracle(config: &FisConfig, inputs: &[(&str, f64)], points: usize) -> f64 {
    let gauss = |c: f64, s: f64, x: f64| (-(x - c).powi(2) / (2.0 * s * s)).exp();
    let value = |name: &str| {
        let var = config.inputs().iter().find(|v| v.name == name).unwrap();
        let raw = inputs.iter().find(|(n, _)| *n == name).unwrap().1;
        (var, raw.max(var.lo).min(var.hi))
    };
    let mut clipped = Vec::new();
    for rule in config.rules() {
        let mut w: f64 = 1.0;
        for (name, term) in &rule.antecedents {
            let (var, x) = value(name);
            let mf = var.terms.iter().find(|(l, _)| l == term).unwrap().1;
            w = w.min(gauss(mf.center, mf.sigma, x));
        }
        let out = config.output();
        let mf = out.terms.iter().find(|(l, _)| *l == rule.consequent.1).unwrap().1;
        clipped.push((w, mf));
    }
    let out = config.output();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..points {
        let y = out.lo + (out.hi - out.lo) * i as f64 / (points - 1) as f64;
        let m = clipped
            .iter()
            .map(|(w, mf)| w.min(gauss(mf.center, mf.sigma, y)))
            .fold(0.0, f64::max);
        num += m * y;
        den += m;
    }
    if den == 0.0 {
        (out.lo + out.hi) / 2.0
    } else {
        num / den
    }
}
