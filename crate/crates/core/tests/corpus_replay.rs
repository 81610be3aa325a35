//! Replays the fuzz seed corpus through the parsers with the fuzz targets'
//! round-trip checks, so the seeds are exercised on stable toolchains too.

use std::fs;
use std::path::PathBuf;

use belleff::format::{
    parse_behavior_json, parse_check_input, parse_counts_csv, parse_counts_json, write_behavior_json, write_counts_csv,
    write_counts_json, CheckInput, Header,
};
use belleff::lhv::{is_local, DEFAULT_TOL};
use belleff::simulate::estimate_behavior;
use belleff::Error;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn behavior_json_seeds() {
    let mut accepted = 0;
    for (_, text) in seeds("behavior_json") {
        if let Ok(b) = parse_behavior_json(&text) {
            accepted += 1;
            let back = parse_behavior_json(&write_behavior_json(&b, None)).unwrap();
            assert_eq!(back.flatten(), b.flatten());
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn counts_seeds() {
    let h = |seed| Header::new(seed, serde_json::Value::Null);
    for (name, text) in seeds("counts_csv") {
        match parse_counts_csv(&text) {
            Ok(t) => assert_eq!(parse_counts_csv(&write_counts_csv(&t, &h(t.seed()))).unwrap(), t),
            Err(_) => assert!(name.starts_with("duplicate") || name.starts_with("overflow"), "{name} rejected"),
        }
    }
    for (name, text) in seeds("counts_json") {
        match parse_counts_json(&text) {
            Ok(t) => assert_eq!(parse_counts_json(&write_counts_json(&t, &h(t.seed()))).unwrap(), t),
            Err(_) => assert!(name.starts_with("mismatched"), "{name} rejected"),
        }
    }
}

#[test]
fn check_input_seeds() {
    for (name, text) in seeds("check_input") {
        let b = match parse_check_input(&text).unwrap_or_else(|e| panic!("{name}: {e}")) {
            CheckInput::Behavior(b) => b,
            CheckInput::Counts(t) => match estimate_behavior(&t) {
                Ok((b, _)) => b,
                // two of the four setting pairs are empty in this seed
                Err(Error::EmptySetting(_)) if name == "sparse.csv" => continue,
                Err(e) => panic!("{name}: {e}"),
            },
        };
        is_local(&b, DEFAULT_TOL).unwrap();
    }
}

#[test]
fn header_seeds() {
    for (name, line) in seeds("header_line") {
        match Header::parse_csv_line(line.trim_end()) {
            Ok(h) => assert_eq!(Header::parse_csv_line(&h.csv_line()).unwrap(), h),
            Err(_) => assert_eq!(name, "no_seed.txt"),
        }
    }
}
