#![no_main]

use hyperex::ingest::{encoding_for_label, DocumentStream, TokenizedDocument};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for label in ["utf-8", "latin1"] {
        let mut stream = DocumentStream::new(data, encoding_for_label(label).unwrap());
        for doc in stream.by_ref() {
            let Ok(doc) = doc else { break };
            let t = TokenizedDocument::from_raw(&doc);
            assert!(t.sentences.iter().all(|s| !s.is_empty()));
        }
    }
});
