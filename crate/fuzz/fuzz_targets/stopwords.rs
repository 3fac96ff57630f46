#![no_main]

use hyperex::normalize::{normalize_tokens, StopwordSet};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let stops = StopwordSet::parse(text);
    let _ = stops.fingerprint();
    let words: Vec<String> = text.split_whitespace().map(str::to_owned).collect();
    let norm = normalize_tokens(&words, &stops);
    assert!(norm.len() <= words.len());
});
