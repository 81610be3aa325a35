#![no_main]

use belleff::format::Header;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else { return };
    if line.contains('\n') {
        return;
    }
    if let Ok(h) = Header::parse_csv_line(line) {
        let again = Header::parse_csv_line(&h.csv_line()).expect("written header parses");
        assert_eq!(again.seed, h.seed);
    }
});
