use acfz::imgio::{
    decode_gray, decode_pgm, encode_pgm, load_cipher, load_gray, store_cipher, store_gray,
    ContainerError, ImgIoError, CONTAINER_HEADER_LEN,
};
use acfz::{CipherContainer, GrayImage};
use image::{ImageBuffer, ImageFormat, Luma, Rgb};
use proptest::prelude::*;

#[test]
fn tiny_pgm() {
    let img = decode_pgm(b"P5\n2 2\n255\n\x00\x40\x80\xff").unwrap();
    assert_eq!(img, GrayImage::new(2, 2, vec![0, 64, 128, 255]).unwrap());
    assert!(matches!(decode_pgm(b"P6\n2 2\n255\n"), Err(ImgIoError::UnsupportedFormat(_))));
    assert!(matches!(decode_pgm(b"P5\n2 2\n15\n\0\0\0\0"), Err(ImgIoError::MaxvalNot255(15))));
}

#[test]
fn header_layout() {
    let img = GrayImage::filled(256, 256, 3).unwrap();
    let bytes = encode_pgm(&img);
    assert!(bytes.starts_with(b"P5\n256 256\n255\n"));
    assert_eq!(bytes, encode_pgm(&img));
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let img = GrayImage::new(5, 3, (0..15).map(|i| i * 17).collect()).unwrap();
    let path = dir.path().join("a.pgm");
    store_gray(&img, &path).unwrap();
    assert_eq!(load_gray(&path).unwrap(), img);
    let first = std::fs::read(&path).unwrap();
    store_gray(&img, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);

    let c = CipherContainer::new(5, 3, vec![9; 64]).unwrap();
    let cpath = dir.path().join("c.acfz");
    store_cipher(&c, &cpath).unwrap();
    assert_eq!(load_cipher(&cpath).unwrap(), c);
    assert!(matches!(load_cipher(dir.path().join("missing")), Err(ContainerError::Io(_))));
}

#[test]
fn png_gray_accepted_color_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let gray: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_fn(4, 3, |x, y| Luma([(x * 10 + y) as u8]));
    let p = dir.path().join("g.png");
    gray.save_with_format(&p, ImageFormat::Png).unwrap();
    let img = load_gray(&p).unwrap();
    assert_eq!((img.width(), img.height()), (4, 3));
    assert_eq!(img.get(2, 3), 32);

    let color: ImageBuffer<Rgb<u8>, Vec<u8>> = ImageBuffer::from_pixel(4, 3, Rgb([1, 2, 3]));
    let p = dir.path().join("c.png");
    color.save_with_format(&p, ImageFormat::Png).unwrap();
    assert!(matches!(load_gray(&p), Err(ImgIoError::UnsupportedFormat(_))));
    assert!(matches!(decode_gray(b"GIF89a"), Err(ImgIoError::UnsupportedFormat(_))));
}

#[test]
fn container_corruptions() {
    let c = CipherContainer::new(8, 8, vec![1; 64]).unwrap();
    let good = c.encode();
    assert_eq!(good.len(), CONTAINER_HEADER_LEN + 64);
    assert_eq!(&good[..4], b"ACFZ");
    assert_eq!(&good[5..9], &8u32.to_be_bytes());

    let mut bad = good.clone();
    bad[1] ^= 0xff;
    assert!(matches!(CipherContainer::decode(&bad), Err(ContainerError::BadMagic)));
    let mut bad = good.clone();
    bad[4] = 9;
    assert!(matches!(CipherContainer::decode(&bad), Err(ContainerError::UnknownVersion(9))));
    let mut bad = good.clone();
    bad.pop();
    assert!(matches!(CipherContainer::decode(&bad), Err(ContainerError::LengthMismatch { .. })));
    assert!(CipherContainer::new(9, 8, vec![0; 64]).is_err());
    assert!(CipherContainer::new(8, 8, vec![0; 70]).is_err());
}

proptest! {
    #[test]
    fn pgm_codec(w in 1usize..40, h in 1usize..40, seed: u8) {
        prop_assume!(w >= 2 && h >= 2);
        let px: Vec<u8> = (0..w * h).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed)).collect();
        let img = GrayImage::new(w, h, px).unwrap();
        prop_assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn container_codec(w in 1u32..50, h in 1u32..50, fill: u8) {
        let len = ((w * h) as usize).div_ceil(64) * 64;
        let c = CipherContainer::new(w, h, vec![fill; len]).unwrap();
        prop_assert_eq!(CipherContainer::decode(&c.encode()).unwrap(), c);
    }
}
