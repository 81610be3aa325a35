//! Text, CSV and JSON renderings of command results.

use serde::Serialize;
use serde_json::{json, Value};

use belleff::format::{fmt_f64, Header};
use belleff::lhv::{Certificate, LocalityVerdict};
use belleff::optimizer::{ThresholdPoint, ViolationCertificate};
use belleff::simulate::InequalityEstimate;
use belleff::{Error, InequalityReport};

const CERT_COLUMNS: [&str; 9] =
    ["cert_theta", "cert_angle_A", "cert_angle_a", "cert_angle_B", "cert_angle_b", "amp00", "amp01", "amp10", "amp11"];

fn cert_fields(c: &ViolationCertificate) -> Vec<String> {
    let mut v = vec![fmt_f64(c.state.schmidt_angle())];
    v.extend(c.settings.radians().iter().map(|a| fmt_f64(*a)));
    v.extend(c.state.amplitudes().iter().map(|a| fmt_f64(*a)));
    v
}

fn csv_body(header: &Header, columns: Vec<&str>, rows: Vec<Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&columns)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let body = String::from_utf8(w.into_inner()?)?;
    Ok(format!("{}\n{body}", header.csv_line()))
}

pub fn threshold_csv(header: &Header, p: &ThresholdPoint) -> String {
    let mut cols = vec!["beta", "eta_B", "margin"];
    cols.extend(CERT_COLUMNS);
    cols.extend(["etaA", "etaB"]);
    let c = &p.certificate;
    let mut row = vec![fmt_f64(p.x), fmt_f64(p.threshold), fmt_f64(c.margin)];
    row.extend(cert_fields(c));
    row.extend([fmt_f64(c.model.eta_a()), fmt_f64(c.model.eta_b())]);
    csv_body(header, cols, vec![row]).expect("in-memory CSV")
}

pub fn threshold_json(header: &Header, p: &ThresholdPoint) -> String {
    let v = json!({ "header": header, "beta": p.x, "eta_B": p.threshold, "certificate": p.certificate });
    serde_json::to_string_pretty(&v).expect("threshold serializes") + "\n"
}

/// Failed points are written with `max_beta = 0` and the message in `error`.
pub fn curve_csv(header: &Header, grid: &[f64], points: &[Result<ThresholdPoint, Error>]) -> anyhow::Result<String> {
    let mut cols = vec!["eta_B", "max_beta", "margin"];
    cols.extend(CERT_COLUMNS);
    cols.push("error");
    let rows = grid
        .iter()
        .zip(points)
        .map(|(eta, p)| match p {
            Ok(p) => {
                let mut r = vec![fmt_f64(*eta), fmt_f64(p.threshold), fmt_f64(p.certificate.margin)];
                r.extend(cert_fields(&p.certificate));
                r.push(String::new());
                r
            }
            Err(e) => {
                let mut r = vec![fmt_f64(*eta), fmt_f64(0.0)];
                r.extend(std::iter::repeat(String::new()).take(1 + CERT_COLUMNS.len()));
                r.push(e.to_string());
                r
            }
        })
        .collect();
    csv_body(header, cols, rows)
}

pub fn curve_json(header: &Header, grid: &[f64], points: &[Result<ThresholdPoint, Error>]) -> String {
    let pts: Vec<Value> = grid
        .iter()
        .zip(points)
        .map(|(eta, p)| match p {
            Ok(p) => json!({ "eta_B": eta, "max_beta": p.threshold, "certificate": p.certificate }),
            Err(e) => json!({ "eta_B": eta, "max_beta": 0.0, "error": e.to_string() }),
        })
        .collect();
    serde_json::to_string_pretty(&json!({ "header": header, "points": pts })).expect("curve serializes") + "\n"
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportLine {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    statistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    local_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl ReportLine {
    pub fn exact(r: InequalityReport) -> Self {
        Self {
            kind: r.kind.to_string(),
            statistic: Some(r.statistic),
            local_bound: Some(r.local_bound),
            margin: Some(r.margin),
            std_error: None,
            error: None,
        }
    }

    pub fn estimated(e: InequalityEstimate) -> Self {
        Self { std_error: Some(e.std_error), ..Self::exact(e.report) }
    }

    pub fn failed(kind: &str, e: &Error) -> Self {
        Self { kind: kind.into(), statistic: None, local_bound: None, margin: None, std_error: None, error: Some(e.to_string()) }
    }

    pub fn text(&self) -> String {
        if let Some(e) = &self.error {
            return format!("{}: {e}", self.kind);
        }
        let f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut s = format!(
            "{}: statistic {} bound {} margin {}",
            self.kind,
            f(self.statistic),
            f(self.local_bound),
            f(self.margin)
        );
        if let Some(se) = self.std_error {
            s.push_str(&format!(" std_error {}", fmt_f64(se)));
        }
        s
    }
}

pub struct CheckReport {
    source: &'static str,
    is_local: bool,
    distance: f64,
    certificate: Value,
    summary: String,
    reports: Vec<ReportLine>,
}

impl CheckReport {
    pub fn new(source: &'static str, v: &LocalityVerdict, reports: Vec<ReportLine>) -> Self {
        let (certificate, summary) = match &v.certificate {
            Certificate::Mixture(w) => {
                let support: Vec<Value> = w
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(i, w)| json!({ "strategy": i, "weight": w }))
                    .collect();
                let summary = format!("mixture of {} deterministic strategies", support.len());
                (json!({ "type": "mixture", "support": support }), summary)
            }
            Certificate::Separator { functional, offset, gap } => (
                json!({ "type": "separator", "functional": functional, "offset": offset, "gap": gap }),
                format!("separating functional with local maximum {} and gap {}", fmt_f64(*offset), fmt_f64(*gap)),
            ),
        };
        Self { source, is_local: v.is_local, distance: v.slack, certificate, summary, reports }
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "input: {}\nverdict: {}\ndistance to local set: {}\ncertificate: {}\n",
            self.source,
            if self.is_local { "local" } else { "nonlocal" },
            fmt_f64(self.distance),
            self.summary
        );
        for r in &self.reports {
            s.push_str(&r.text());
            s.push('\n');
        }
        s
    }

    pub fn json(&self, header: &Header) -> String {
        let v = json!({
            "header": header,
            "input": self.source,
            "is_local": self.is_local,
            "distance": self.distance,
            "certificate": self.certificate,
            "reports": self.reports,
        });
        serde_json::to_string_pretty(&v).expect("check report serializes") + "\n"
    }
}
