#![allow(dead_code)]

pub mod oracle;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const CAR_BUS: [&str; 9] = ["Car", "Bus", "Bus", "Car", "Car", "Car", "Car", "Car", "Bus"];

/// `rows` in `rows_range`, each 1–6 lowercase letters.
pub fn random_corpus(rng: &mut ChaCha8Rng, rows_range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    random_corpus_over(rng, rows_range, b'z')
}

/// Same as [`random_corpus`] but drawing letters from `a..=last`; a small
/// alphabet produces many partial matches and therefore more distinct classes.
pub fn random_corpus_over(rng: &mut ChaCha8Rng, rows_range: std::ops::RangeInclusive<usize>, last: u8) -> Vec<String> {
    let rows = rng.gen_range(rows_range);
    (0..rows)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            (0..len).map(|_| char::from(rng.gen_range(b'a'..=last))).collect()
        })
        .collect()
}

pub fn car_bus_text() -> String {
    CAR_BUS.iter().map(|w| format!("{w}\n")).collect()
}
