#![no_main]

use belleff::format::{parse_counts_json, write_counts_json, Header};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_counts_json(text) {
        let h = Header::new(t.seed(), serde_json::Value::Null);
        assert_eq!(parse_counts_json(&write_counts_json(&t, &h)).expect("written counts parse"), t);
    }
});
