use std::fs;

use ulam_core::cache::{self, CacheError};
use ulam_core::{generate_fast, GenerationConfig, UlamSequence};

fn ulam(n: usize) -> UlamSequence {
    generate_fast(GenerationConfig::count(n)).unwrap()
}

#[test]
fn binary_and_text_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let seq = generate_fast(GenerationConfig::count(5000).with_seeds(2, 5)).unwrap();

    let bin = dir.path().join("seq.bin");
    cache::save(&seq, &bin).unwrap();
    assert_eq!(cache::load(&bin).unwrap(), seq);
    assert_eq!(fs::metadata(&bin).unwrap().len(), 32 + 8 * 5000);

    let txt = dir.path().join("seq.txt");
    cache::write_text(&seq, fs::File::create(&txt).unwrap()).unwrap();
    let back = cache::read_text(fs::File::open(&txt).unwrap()).unwrap();
    assert_eq!(back.terms(), seq.terms());
    assert_eq!((back.config().first, back.config().second), (2, 5));
}

#[test]
fn damaged_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.bin");
    cache::save(&ulam(1000), &path).unwrap();
    let good = fs::read(&path).unwrap();

    let mut bad = good.clone();
    bad[0] ^= 0x20;
    assert!(matches!(cache::from_bytes(&bad), Err(CacheError::BadMagic)));

    assert!(matches!(cache::from_bytes(&good[..good.len() - 3]), Err(CacheError::Truncated { .. })));

    let mut bad = good.clone();
    bad[32 + 8 * 400 + 6] ^= 0x01; // high byte of a middle term
    assert!(matches!(cache::from_bytes(&bad), Err(CacheError::Payload(_))));

    let mut bad = good.clone();
    bad[8] ^= 0x04; // header seed
    assert!(matches!(cache::from_bytes(&bad), Err(CacheError::SeedMismatch { .. })));

    assert!(matches!(cache::load(dir.path().join("missing.bin")), Err(CacheError::Io(_))));
}

/// About ten minutes on one core: the sieve costs roughly `N * a_N / 128` word operations.
#[test]
#[ignore]
fn million_generated_terms_round_trip() {
    let seq = ulam(1_000_000);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("million.bin");
    cache::save(&seq, &path).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert_eq!(bytes, cache::to_bytes(&seq));
    assert_eq!(cache::from_bytes(&bytes).unwrap(), seq);
}
