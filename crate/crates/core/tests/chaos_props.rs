use acfz::chaos::{index_draw, keystream_bytes, quantize_byte, sort_index_permutation};
use acfz::{Permutation, TentMapState};
use num_bigint::BigUint;
use proptest::prelude::*;

/// Exact `floor(x * 10^14) mod m` of the binary value of `x`.
fn exact_residue(x: f64, m: u64) -> u64 {
    assert!(x > 0.0 && x < 1.0);
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (mantissa, shift) = if exp == 0 {
        (bits & ((1 << 52) - 1), 1074)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), 1075 - exp)
    };
    // x = mantissa / 2^shift
    let scaled = BigUint::from(mantissa) * BigUint::from(10u64).pow(14);
    let floor = scaled >> shift as usize;
    (floor % BigUint::from(m)).iter_u64_digits().next().unwrap_or(0)
}

/// Straight-line orbit, independent of the library state type.
fn orbit(x0: f64, mu: f64, n: usize) -> Vec<f64> {
    let mut x = x0;
    (0..n)
        .map(|_| {
            x = if x < 0.5 { mu * x } else { mu * (1.0 - x) };
            x
        })
        .collect()
}

#[test]
fn quantized_example_matches_exact_arithmetic() {
    // the decimal value 12345678901 / 10^11, scaled by 10^14
    let decimal = BigUint::from(12345678901u64) * BigUint::from(1000u32);
    assert_eq!(decimal % BigUint::from(256u32), BigUint::from(8u32));
    // the nearest double lies just below the decimal (floor ...0999, residue 7);
    // the rounded product lands back on ...1000
    assert_eq!(exact_residue(0.12345678901, 256), 7);
    assert_eq!(0.12345678901f64 * 1e14, 12345678901000.0);
    assert_eq!(quantize_byte(0.12345678901), 8);
    assert_eq!(quantize_byte(0.5), 0);
}

#[test]
fn argsort_example_matches_brute_force() {
    let values = orbit(0.4, 1.9, 4);
    let expected = [0.76, 0.456, 0.8664, 0.25384];
    for (v, e) in values.iter().zip(expected) {
        assert!((v - e).abs() < 1e-12);
    }
    // selection-style argsort
    let mut remaining: Vec<usize> = (0..4).collect();
    let mut brute = Vec::new();
    while !remaining.is_empty() {
        let pos = (0..remaining.len())
            .min_by(|&a, &b| values[remaining[a]].partial_cmp(&values[remaining[b]]).unwrap())
            .unwrap();
        brute.push(remaining.remove(pos));
    }
    let (perm, _) = sort_index_permutation(TentMapState::new(0.4, 1.9), 4);
    assert_eq!(perm.as_slice(), &brute[..]);
    assert_eq!(perm.as_slice(), &[3, 1, 0, 2]);
}

#[test]
fn keystream_agrees_with_straight_line_orbit() {
    let (bytes, _) = keystream_bytes(TentMapState::new(0.3141592653, 1.9999), 500);
    let reference: Vec<u8> = orbit(0.3141592653, 1.9999, 500)
        .into_iter()
        .map(|x| ((x * 1e14).floor() as u64 % 256) as u8)
        .collect();
    assert_eq!(bytes, reference);
}

#[test]
fn sensitivity_to_a_tiny_seed_change() {
    let x0 = 0.3;
    let (a, _) = keystream_bytes(TentMapState::new(x0, 1.9), 1000);
    let (b, _) = keystream_bytes(TentMapState::new(x0 + 2f64.powi(-40), 1.9), 1000);
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count();
    assert!(differing >= 900, "only {differing} of 1000 bytes differ");
}

#[test]
fn stream_continuation_is_exact() {
    let start = TentMapState::warmed(0.71, 1.9999, 1000);
    let (whole, end_whole) = keystream_bytes(start, 2000);
    let (first, mid) = keystream_bytes(start, 1000);
    let (second, end_split) = keystream_bytes(mid, 1000);
    assert_eq!(whole, [first, second].concat());
    assert_eq!(end_whole, end_split);

    let mut k_then_k = start;
    for _ in 0..2 {
        for _ in 0..777 {
            k_then_k = k_then_k.step();
        }
    }
    let mut two_k = start;
    for _ in 0..1554 {
        two_k = two_k.step();
    }
    assert_eq!(k_then_k, two_k);
}

#[test]
fn degenerate_seed_stays_in_the_unit_interval() {
    // zero is a fixed point of the map; the guard moves the orbit off it
    let mut s = TentMapState::new(0.0, 1.9999);
    for _ in 0..100 {
        let x = s.next_value();
        assert!(x > 0.0 && x < 1.0);
    }
    // mu = 2 collapses to 0 within ~53 steps in binary floating point
    let mut s = TentMapState::new(0.3, 2.0);
    for _ in 0..500 {
        let x = s.next_value();
        assert!(x > 0.0 && x < 1.0);
    }
}

#[test]
fn index_draw_single_residue() {
    let s = TentMapState::new(0.37, 1.9999);
    assert_eq!(index_draw(s, 1).0, 0);
}

proptest! {
    #[test]
    fn argsort_is_always_a_permutation(n in 1usize..4096, seed in 0.001f64..0.999) {
        let (perm, _) = sort_index_permutation(TentMapState::warmed(seed, 1.9999, 100), n);
        prop_assert!(Permutation::from_indices(perm.into_inner()).is_ok());
    }

    #[test]
    fn quantization_within_one_of_exact(x in 1e-6f64..0.999999) {
        let exact = exact_residue(x, 1 << 20);
        let float = ((x * 1e14).floor() as u64) % (1 << 20);
        let diff = (exact as i64 - float as i64).rem_euclid(1 << 20);
        prop_assert!(diff == 0 || diff == 1 || diff == (1 << 20) - 1);
    }

    #[test]
    fn gather_scatter_inverse(n in 1usize..300, seed in 0.01f64..0.99) {
        let (perm, _) = sort_index_permutation(TentMapState::new(seed, 1.9999), n);
        let data: Vec<u32> = (0..n as u32).map(|v| v.wrapping_mul(2654435761)).collect();
        prop_assert_eq!(perm.scatter(&perm.gather(&data)), data.clone());
        prop_assert_eq!(perm.gather(&perm.scatter(&data)), data);
    }

    #[test]
    fn deterministic(seed in 0.01f64..0.99, n in 1usize..200) {
        let s = TentMapState::new(seed, 1.9999);
        prop_assert_eq!(keystream_bytes(s, n), keystream_bytes(s, n));
    }
}
