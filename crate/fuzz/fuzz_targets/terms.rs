#![no_main]

use hyperex::catalog::parse_terms;
use hyperex::normalize::StopwordSet;
use hyperex::rules::{subterm_pairs, SubtermConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(loaded) = parse_terms(text, "fuzz", "root", &StopwordSet::smart()) {
        let c = &loaded.catalog;
        assert!(c.get(c.root_id()).is_some());
        for p in subterm_pairs(c, &SubtermConfig::default()) {
            assert_ne!(p.hypo, p.hyper);
        }
    }
});
