//! On-disk schemas: behavior JSON, counts CSV and counts JSON.
//!
//! Outcome tables are indexed `[atom][photon]` in the order `+1, -1,
//! no-click`. Outcomes in counts files are written `1`, `-1` and `0`.
//! Every file written here starts with a [`Header`]; readers accept files
//! without one.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::detector::{Behavior, DetectorModel, Outcome, OutcomeMatrix, SettingPair};
use crate::error::{Error, Result};
use crate::qstate::Setting;
use crate::simulate::{Counts, CountsTable};

pub const TOOL: &str = "belleff";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const COUNTS_COLUMNS: [&str; 5] = ["settingAtom", "settingPhoton", "outcomeAtom", "outcomePhoton", "count"];

/// 17 significant digits, `.` separator, independent of locale.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: Value,
}

impl Header {
    pub fn new(seed: u64, config: Value) -> Self {
        Self { tool: TOOL.into(), version: VERSION.into(), seed, config }
    }

    /// `# <tool> <version> seed=<seed> config=<compact json>`
    pub fn csv_line(&self) -> String {
        format!("# {} {} seed={} config={}", self.tool, self.version, self.seed, self.config)
    }

    pub fn parse_csv_line(line: &str) -> Result<Self> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("header line must start with '#'".into()))?
            .trim_start();
        let (head, config) = match body.split_once(" config=") {
            Some((h, c)) => (h, serde_json::from_str(c).map_err(|e| Error::Parse(format!("header config: {e}")))?),
            None => (body, Value::Null),
        };
        let mut parts = head.split_whitespace();
        let tool = parts.next().unwrap_or_default().to_string();
        let version = parts.next().unwrap_or_default().to_string();
        let seed = match parts.next().and_then(|t| t.strip_prefix("seed=")) {
            Some(s) => s.parse().map_err(|_| Error::Parse(format!("header seed '{s}' is not an unsigned integer")))?,
            None => return Err(Error::Parse("header line has no seed".into())),
        };
        Ok(Self { tool, version, seed, config })
    }
}

fn pair_labels(pair: SettingPair) -> (&'static str, &'static str) {
    (pair.atom.atom_label(), pair.photon.photon_label())
}

fn parse_pair(atom: &str, photon: &str) -> Result<SettingPair> {
    let a = Setting::from_atom_label(atom)
        .ok_or_else(|| Error::Parse(format!("atom setting must be 'A' or 'a', got '{atom}'")))?;
    let p = Setting::from_photon_label(photon)
        .ok_or_else(|| Error::Parse(format!("photon setting must be 'B' or 'b', got '{photon}'")))?;
    Ok(SettingPair { atom: a, photon: p })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SettingEntry {
    atom: String,
    photon: String,
    probs: OutcomeMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BehaviorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    header: Option<Header>,
    settings: Vec<SettingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<DetectorModel>,
}

pub fn write_behavior_json(b: &Behavior, header: Option<&Header>) -> String {
    let file = BehaviorFile {
        header: header.cloned(),
        settings: SettingPair::ALL
            .into_iter()
            .map(|pair| {
                let (atom, photon) = pair_labels(pair);
                SettingEntry { atom: atom.into(), photon: photon.into(), probs: *b.table(pair) }
            })
            .collect(),
        model: b.model().copied(),
    };
    serde_json::to_string_pretty(&file).expect("behavior serializes") + "\n"
}

fn tables_from_entries(entries: &[SettingEntry]) -> Result<[OutcomeMatrix; 4]> {
    if entries.len() != 4 {
        return Err(Error::Parse(format!("expected 4 setting entries, got {}", entries.len())));
    }
    let mut tables = [[[0.0; 3]; 3]; 4];
    let mut seen = BTreeSet::new();
    for e in entries {
        let pair = parse_pair(&e.atom, &e.photon)?;
        if !seen.insert(pair) {
            return Err(Error::Parse(format!("setting pair {pair} appears twice")));
        }
        tables[pair.index()] = e.probs;
    }
    Ok(tables)
}

pub fn parse_behavior_json(text: &str) -> Result<Behavior> {
    let file: BehaviorFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("behavior JSON: {e}")))?;
    Behavior::new(tables_from_entries(&file.settings)?, file.model)
}

fn outcome_from_str(s: &str) -> Result<Outcome> {
    s.trim()
        .parse::<i64>()
        .ok()
        .and_then(Outcome::from_value)
        .ok_or_else(|| Error::Parse(format!("outcome must be 1, -1 or 0, got '{s}'")))
}

fn add_count(counts: &mut Counts, pair: SettingPair, a: Outcome, p: Outcome, c: u64, seen: &mut BTreeSet<(usize, usize, usize)>) -> Result<()> {
    if !seen.insert((pair.index(), a.index(), p.index())) {
        return Err(Error::Parse(format!("duplicate row for {pair} outcomes ({}, {})", a.value(), p.value())));
    }
    counts[pair.index()][a.index()][p.index()] = c;
    Ok(())
}

pub fn write_counts_csv(t: &CountsTable, header: &Header) -> String {
    let mut out = header.csv_line();
    out.push('\n');
    out.push_str(&COUNTS_COLUMNS.join(","));
    out.push('\n');
    for pair in SettingPair::ALL {
        let (sa, sp) = pair_labels(pair);
        for a in Outcome::ALL {
            for p in Outcome::ALL {
                out.push_str(&format!("{sa},{sp},{},{},{}\n", a.value(), p.value(), t.count(pair, a, p)));
            }
        }
    }
    out
}

/// Rows not listed count as zero. The seed is read from the header line when
/// present, otherwise it is 0.
pub fn parse_counts_csv(text: &str) -> Result<CountsTable> {
    let mut seed = 0;
    if let Some(first) = text.lines().next() {
        if first.starts_with('#') {
            seed = Header::parse_csv_line(first)?.seed;
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let cols = rdr.headers().map_err(|e| Error::Parse(format!("counts CSV header: {e}")))?;
    if cols.iter().ne(COUNTS_COLUMNS) {
        return Err(Error::Parse(format!("counts CSV columns must be {}", COUNTS_COLUMNS.join(","))));
    }
    let mut counts = [[[0u64; 3]; 3]; 4];
    let mut seen = BTreeSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("counts CSV: {e}")))?;
        let row = i + 1;
        if rec.len() != 5 {
            return Err(Error::Parse(format!("row {row}: expected 5 fields, got {}", rec.len())));
        }
        let pair = parse_pair(&rec[0], &rec[1]).map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
        let a = outcome_from_str(&rec[2])?;
        let p = outcome_from_str(&rec[3])?;
        let c: u64 = rec[4]
            .parse()
            .map_err(|_| Error::Parse(format!("row {row}: count '{}' is not an unsigned integer", &rec[4])))?;
        add_count(&mut counts, pair, a, p, c, &mut seen)?;
    }
    CountsTable::from_counts(counts, seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountRow {
    #[serde(rename = "settingAtom")]
    setting_atom: String,
    #[serde(rename = "settingPhoton")]
    setting_photon: String,
    #[serde(rename = "outcomeAtom")]
    outcome_atom: i64,
    #[serde(rename = "outcomePhoton")]
    outcome_photon: i64,
    count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    header: Option<Header>,
    #[serde(rename = "N")]
    n: u64,
    seed: u64,
    counts: Vec<CountRow>,
}

pub fn write_counts_json(t: &CountsTable, header: &Header) -> String {
    let mut rows = Vec::with_capacity(36);
    for pair in SettingPair::ALL {
        let (sa, sp) = pair_labels(pair);
        for a in Outcome::ALL {
            for p in Outcome::ALL {
                rows.push(CountRow {
                    setting_atom: sa.into(),
                    setting_photon: sp.into(),
                    outcome_atom: a.value().into(),
                    outcome_photon: p.value().into(),
                    count: t.count(pair, a, p),
                });
            }
        }
    }
    let file = CountsFile { header: Some(header.clone()), n: t.n(), seed: t.seed(), counts: rows };
    serde_json::to_string_pretty(&file).expect("counts serialize") + "\n"
}

pub fn parse_counts_json(text: &str) -> Result<CountsTable> {
    let file: CountsFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("counts JSON: {e}")))?;
    let mut counts = [[[0u64; 3]; 3]; 4];
    let mut seen = BTreeSet::new();
    for r in &file.counts {
        let pair = parse_pair(&r.setting_atom, &r.setting_photon)?;
        let bad = |v: i64| Error::Parse(format!("outcome must be 1, -1 or 0, got {v}"));
        let a = Outcome::from_value(r.outcome_atom).ok_or_else(|| bad(r.outcome_atom))?;
        let p = Outcome::from_value(r.outcome_photon).ok_or_else(|| bad(r.outcome_photon))?;
        add_count(&mut counts, pair, a, p, r.count, &mut seen)?;
    }
    let t = CountsTable::from_counts(counts, file.seed)?;
    if t.n() != file.n {
        return Err(Error::Parse(format!("N = {} but counts sum to {}", file.n, t.n())));
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckInput {
    Behavior(Behavior),
    Counts(CountsTable),
}

/// Detects the schema: JSON with a `settings` array is a behavior, JSON with
/// `counts` is a counts table, anything else is read as counts CSV.
pub fn parse_check_input(text: &str) -> Result<CheckInput> {
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("JSON: {e}")))?;
        if v.get("settings").is_some() {
            return parse_behavior_json(text).map(CheckInput::Behavior);
        }
        if v.get("counts").is_some() {
            return parse_counts_json(text).map(CheckInput::Counts);
        }
        return Err(Error::Parse("JSON input has neither 'settings' nor 'counts'".into()));
    }
    parse_counts_csv(text).map(CheckInput::Counts)
}
