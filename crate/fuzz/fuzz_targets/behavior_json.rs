#![no_main]

use belleff::format::{parse_behavior_json, write_behavior_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(b) = parse_behavior_json(text) {
        let back = parse_behavior_json(&write_behavior_json(&b, None)).expect("written behavior parses");
        assert_eq!(back.flatten(), b.flatten());
        assert_eq!(back.model(), b.model());
    }
});
