#![no_main]

use hyperex::ingest::{segment_sentences, tokenize};
use hyperex::normalize::{normalize_tokens, StopwordSet};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let stops = StopwordSet::smart();
    for s in segment_sentences(text) {
        let tokens = tokenize(&s);
        assert_eq!(tokenize(&tokens.join(" ")), tokens);
        let norm = normalize_tokens(&tokens, &stops);
        assert!(norm.tokens.iter().all(|t| !t.is_empty() && !t.contains(' ')));
    }
});
