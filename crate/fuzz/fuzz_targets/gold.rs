#![no_main]

use hyperex::eval::parse_gold;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok((gold, _)) = parse_gold(text) {
        assert!(!gold.is_empty());
        assert!(gold.pairs().all(|(a, b)| a != b));
    }
});
