#![no_main]

use hyperex::CorpusStats;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(stats) = CorpusStats::from_tsv(text) {
        let again = stats.to_tsv();
        assert_eq!(CorpusStats::from_tsv(&again).unwrap(), stats);
    }
});
