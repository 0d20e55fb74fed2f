#![allow(dead_code)]

pub mod chase;
pub mod context_oracle;
pub mod random_ts;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn proptest_config(cases: u32) -> proptest::prelude::ProptestConfig {
    proptest::prelude::ProptestConfig {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn specs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

/// The shipped specifications and property files, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(specs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("ckab" | "mu")))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

/// A random edit of `text`: deletions, insertions of syntax-heavy
/// characters, duplicated slices and truncation.
pub fn mutate(rng: &mut impl rand::Rng, text: &str) -> String {
    const ALPHABET: &[char] = &[
        '{', '}', '(', ')', '[', ']', '?', '!', '&', '|', '-', '>', '<', '~', '@', ':', ',', ';',
        '=', '^', '.', '#', '\n', ' ', 'x', 'Z', '7', 'é', '\u{0}', '"',
    ];
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..rng.random_range(1..=8) {
        if chars.is_empty() {
            chars.push('{');
        }
        let i = rng.random_range(0..chars.len());
        match rng.random_range(0..5) {
            0 => {
                chars.remove(i);
            }
            1 => chars.insert(i, ALPHABET[rng.random_range(0..ALPHABET.len())]),
            2 => {
                let j = (i + rng.random_range(1..40)).min(chars.len());
                let slice: Vec<char> = chars[i..j].to_vec();
                let k = rng.random_range(0..chars.len());
                chars.splice(k..k, slice);
            }
            3 => chars.truncate(i),
            _ => {
                let j = rng.random_range(0..chars.len());
                chars.swap(i, j);
            }
        }
    }
    chars.into_iter().collect()
}
