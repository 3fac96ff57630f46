#![no_main]

use hyperex::eval::surface_cycles;
use hyperex::select::parse_taxo;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(pairs) = parse_taxo(text) {
        for c in surface_cycles(&pairs) {
            assert!(!c.is_empty());
        }
    }
});
