#![no_main]

use belleff::format::{parse_check_input, CheckInput};
use belleff::lhv::{is_local, DEFAULT_TOL};
use belleff::simulate::{estimate_behavior, estimate_inequalities};
use libfuzzer_sys::fuzz_target;

// Everything `belleff check` does with an accepted file.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let behavior = match parse_check_input(text) {
        Ok(CheckInput::Behavior(b)) => b,
        Ok(CheckInput::Counts(t)) => {
            let _ = estimate_inequalities(&t);
            match estimate_behavior(&t) {
                Ok((b, _)) => b,
                Err(_) => return,
            }
        }
        Err(_) => return,
    };
    let _ = is_local(&behavior, DEFAULT_TOL);
});
