mod common;

use acfz::metrics::{entropy, histogram};
use acfz::phase1::*;
use acfz::{derive_seeds, ChaosParams, GrayImage, MasterKey};
use common::{fixture, percent_differing, random_image, rng};
use proptest::prelude::*;

const MU: f64 = 1.9999;
const BURN_IN: usize = 1000;

/// Independent straight-line tent orbit after burn-in.
struct Orbit(f64);

impl Orbit {
    fn new(seed: f64) -> Self {
        let mut o = Orbit(seed);
        for _ in 0..BURN_IN {
            o.next();
        }
        o
    }

    fn next(&mut self) -> f64 {
        let x = self.0;
        self.0 = if x < 0.5 { MU * x } else { MU * (1.0 - x) };
        self.0
    }

    fn draw(&mut self, m: u64) -> u64 {
        ((self.next() * 1e14).floor() as u64) % m
    }
}

fn img(w: usize, h: usize, px: &[u8]) -> GrayImage {
    GrayImage::new(w, h, px.to_vec()).unwrap()
}

#[test]
fn xor_example_uses_the_first_keystream_bytes() {
    let plain = img(2, 2, &[10, 20, 30, 40]);
    let out = xor_keystream(&plain, 0.4, &ChaosParams::default());
    let mut o = Orbit::new(0.4);
    let expected: Vec<u8> = plain.pixels().iter().map(|p| p ^ o.draw(256) as u8).collect();
    assert_eq!(out.pixels(), &expected[..]);
}

#[test]
fn crossover_example_matches_trace_replay_oracle() {
    let plain = [178u8, 109, 5, 250];
    let mut o = Orbit::new(0.4);
    let mut triples = Vec::new();
    for i in 0..4u64 {
        let j = loop {
            let j = o.draw(4);
            if j != i {
                break j;
            }
        };
        let k = 1 + o.draw(7);
        triples.push((i as usize, j as usize, k as u32));
    }
    let mut px = plain;
    for &(i, j, k) in &triples {
        let mask = ((1u32 << k) - 1) as u8;
        let (a, b) = (px[i], px[j]);
        px[i] = (a & !mask) | (b & mask);
        px[j] = (b & !mask) | (a & mask);
    }

    let params = ChaosParams::default();
    let trace: Vec<(usize, usize, u32)> = crossover_trace(4, 0.4, &params)
        .iter()
        .map(|s| (s.i, s.j, s.k as u32))
        .collect();
    assert_eq!(trace, triples);
    let diffused = crossover_diffuse(&img(2, 2, &plain), 0.4, &params);
    assert_eq!(diffused.pixels(), &px[..]);

    // reverse replay
    for &(i, j, k) in triples.iter().rev() {
        let mask = ((1u32 << k) - 1) as u8;
        let (a, b) = (px[i], px[j]);
        px[i] = (a & !mask) | (b & mask);
        px[j] = (b & !mask) | (a & mask);
    }
    assert_eq!(px, plain);
    assert_eq!(crossover_undiffuse(&diffused, 0.4, &params).pixels(), &plain[..]);
}

#[test]
fn crossover_bit_example() {
    assert_eq!(crossover_pixels(178, 109, 3), (181, 106));
}

#[test]
fn uniform_image_survives_crossover() {
    let flat = GrayImage::filled(8, 8, 77).unwrap();
    assert_eq!(crossover_diffuse(&flat, 0.3, &ChaosParams::default()), flat);
}

#[test]
fn crossover_inverse_on_many_images() {
    let params = ChaosParams::new(MU, 50);
    let mut r = rng(31);
    for n in 0..1000 {
        let plain = random_image(&mut r, 16, 16);
        let seed = 0.001 + 0.998 * (n as f64 / 1000.0);
        let c = crossover_diffuse(&plain, seed, &params);
        assert_eq!(crossover_undiffuse(&c, seed, &params), plain);
    }
}

#[test]
fn inverse_stage_order_matters() {
    let params = ChaosParams::default();
    let seeds = derive_seeds(&MasterKey([41; 64]));
    let mut r = rng(32);
    for _ in 0..5 {
        let plain = random_image(&mut r, 32, 32);
        let c = phase1_encrypt(&plain, &seeds, &params);
        assert_eq!(phase1_decrypt(&c, &seeds, &params), plain);
        let swapped = crossover_undiffuse(&unshuffle(&c, seeds.x1, &params), seeds.x2, &params);
        let wrong = xor_keystream(&swapped, seeds.x0, &params);
        assert!(percent_differing(wrong.pixels(), plain.pixels()) > 50.0);
    }
}

#[test]
fn phase1_flattens_natural_image_statistics() {
    let plain = fixture("astronaut");
    let seeds = derive_seeds(&MasterKey([42; 64]));
    let params = ChaosParams::default();
    let c = phase1_encrypt(&plain, &seeds, &params);
    assert!(entropy(&c) > 7.9, "entropy {}", entropy(&c));

    let mut other = seeds;
    other.x0 = (seeds.x0 + 0.25) % 1.0;
    let c2 = phase1_encrypt(&plain, &other, &params);
    assert!(percent_differing(c.pixels(), c2.pixels()) > 99.0);

    let wrong = phase1_decrypt(&c, &other, &params);
    assert!(percent_differing(wrong.pixels(), plain.pixels()) >= 99.0);
}

fn small_image() -> impl Strategy<Value = GrayImage> {
    (2usize..20, 2usize..20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<u8>(), w * h)
            .prop_map(move |px| GrayImage::new(w, h, px).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_stage_round_trips(plain in small_image(), seed in 0.01f64..0.99) {
        let p = ChaosParams::new(MU, 64);
        prop_assert_eq!(&xor_keystream(&xor_keystream(&plain, seed, &p), seed, &p), &plain);
        prop_assert_eq!(&unshuffle(&shuffle(&plain, seed, &p), seed, &p), &plain);
        prop_assert_eq!(&shuffle(&unshuffle(&plain, seed, &p), seed, &p), &plain);
        prop_assert_eq!(&crossover_undiffuse(&crossover_diffuse(&plain, seed, &p), seed, &p), &plain);
    }

    #[test]
    fn shuffle_keeps_the_histogram(plain in small_image(), seed in 0.01f64..0.99) {
        let p = ChaosParams::new(MU, 64);
        prop_assert_eq!(histogram(&shuffle(&plain, seed, &p)), histogram(&plain));
    }

    #[test]
    fn crossover_conserves_population(a: u8, b: u8, k in 1u8..=7) {
        let (x, y) = crossover_pixels(a, b, k);
        prop_assert_eq!(x.count_ones() + y.count_ones(), a.count_ones() + b.count_ones());
        prop_assert_eq!(x >> k, a >> k);
        prop_assert_eq!(y >> k, b >> k);
        prop_assert_eq!(crossover_pixels(x, y, k), (a, b));
        prop_assert_eq!(crossover_pixels(a, a, k), (a, a));
    }

    #[test]
    fn phase1_round_trip(plain in small_image(), key in proptest::array::uniform32(any::<u8>())) {
        let mut master = [0u8; 64];
        master[..32].copy_from_slice(&key);
        let seeds = derive_seeds(&MasterKey(master));
        let p = ChaosParams::new(MU, 64);
        prop_assert_eq!(phase1_decrypt(&phase1_encrypt(&plain, &seeds, &p), &seeds, &p), plain);
    }
}
