mod common;

use acfz::primitives::{aes128_decrypt_block, aes128_encrypt_block, sha512, Aes128, Sha512};
use aes::cipher::{generic_array::GenericArray, BlockDecrypt, BlockEncrypt, KeyInit};
use common::{hex, random_bytes, rng, AES_VECTORS, MILLION_A, SHA512_VECTORS};
use rand::Rng;
use sha2::Digest;

fn arr16(v: &[u8]) -> [u8; 16] {
    v.try_into().unwrap()
}

#[test]
fn sha512_published_vectors() {
    for (msg, digest) in SHA512_VECTORS {
        assert_eq!(sha512(msg).to_hex(), digest, "message of {} bytes", msg.len());
    }
    let mut h = Sha512::new();
    for _ in 0..1000 {
        h.update(&[b'a'; 1000]);
    }
    assert_eq!(h.finalize().to_hex(), MILLION_A);
}

#[test]
fn sha512_matches_reference_crate_on_every_length() {
    let mut r = rng(11);
    // every length across several block boundaries, including 111/112
    for len in 0..=400 {
        let mut msg = vec![0u8; len];
        r.fill(&mut msg[..]);
        let ours = sha512(&msg);
        let theirs = sha2::Sha512::digest(&msg);
        assert_eq!(&ours.0[..], &theirs[..], "length {len}");
    }
}

#[test]
fn sha512_chunking_independent_on_one_mebibyte() {
    let mut r = rng(12);
    let mut msg = vec![0u8; 1 << 20];
    r.fill(&mut msg[..]);
    let whole = sha512(&msg);
    for chunk in [1usize, 63, 127, 128, 129, 4096, 65537] {
        let mut h = Sha512::new();
        for piece in msg.chunks(chunk) {
            h.update(piece);
        }
        assert_eq!(h.finalize(), whole, "chunk size {chunk}");
    }
    assert_eq!(&whole.0[..], &sha2::Sha512::digest(&msg)[..]);
}

#[test]
fn sha512_avalanche() {
    let mut r = rng(13);
    let mut total = 0u32;
    for _ in 0..100 {
        let mut msg: [u8; 64] = random_bytes(&mut r);
        let before = sha512(&msg);
        let bit = r.gen_range(0..512);
        msg[bit / 8] ^= 0x80 >> (bit % 8);
        let after = sha512(&msg);
        total += before.0.iter().zip(&after.0).map(|(a, b)| (a ^ b).count_ones()).sum::<u32>();
    }
    let mean = total as f64 / 100.0;
    assert!(mean >= 200.0, "mean flipped bits {mean}");
}

#[test]
fn aes128_published_vectors() {
    for (k, p, c) in AES_VECTORS {
        let (k, p, c) = (arr16(&hex(k)), arr16(&hex(p)), arr16(&hex(c)));
        assert_eq!(aes128_encrypt_block(&p, &k), c);
        assert_eq!(aes128_decrypt_block(&c, &k), p);
    }
}

#[test]
fn aes128_matches_reference_crate_and_inverts() {
    let mut r = rng(14);
    for _ in 0..10_000 {
        let key: [u8; 16] = random_bytes(&mut r);
        let block: [u8; 16] = random_bytes(&mut r);
        let ours = Aes128::new(&key);
        let c = ours.encrypt_block(&block);
        assert_eq!(ours.decrypt_block(&c), block);

        let reference = aes::Aes128::new(GenericArray::from_slice(&key));
        let mut expect = GenericArray::clone_from_slice(&block);
        reference.encrypt_block(&mut expect);
        assert_eq!(&c[..], &expect[..]);
        reference.decrypt_block(&mut expect);
        assert_eq!(&block[..], &expect[..]);
    }
}

#[test]
fn aes128_zero_block_inverse_and_determinism() {
    let mut r = rng(15);
    for _ in 0..100 {
        let key: [u8; 16] = random_bytes(&mut r);
        let c = aes128_encrypt_block(&[0; 16], &key);
        assert_eq!(aes128_decrypt_block(&c, &key), [0; 16]);
        assert_eq!(aes128_encrypt_block(&[0; 16], &key), c);
    }
}
