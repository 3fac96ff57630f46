#![no_main]

use hyperex::ingest::SentenceReader;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(reader) = SentenceReader::new(data) {
        for doc in reader {
            let Ok(doc) = doc else { break };
            let _ = doc.normalized();
        }
    }
});
