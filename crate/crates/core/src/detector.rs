//! Per-side detection losses and background clicks.
//!
//! Each side passes its ideal `+1/-1` outcome through two independent stages:
//! loss (kept with probability `eta`, otherwise no-click) and background
//! (with probability `beta` the record is replaced by a uniform random click,
//! whether or not the particle was detected). Both stages act on one side
//! only, so the map on the joint table is a tensor product of side channels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{joint_probs, IdealJoint, PureState, Setting, SettingsPair};

/// Probability tolerance applied when validating externally supplied tables.
pub const BEHAVIOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
    NoClick,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Plus, Outcome::Minus, Outcome::NoClick];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
            Outcome::NoClick => 0,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            0 => Some(Outcome::NoClick),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFields")]
pub struct DetectorModel {
    #[serde(rename = "etaA")]
    eta_a: f64,
    #[serde(rename = "etaB")]
    eta_b: f64,
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFields {
    #[serde(rename = "etaA")]
    eta_a: f64,
    #[serde(rename = "etaB")]
    eta_b: f64,
    beta: f64,
}

impl TryFrom<ModelFields> for DetectorModel {
    type Error = Error;
    fn try_from(m: ModelFields) -> Result<Self> {
        Self::new(m.eta_a, m.eta_b, m.beta)
    }
}

impl DetectorModel {
    pub fn new(eta_a: f64, eta_b: f64, beta: f64) -> Result<Self> {
        let in_eta = |e: f64| e > 0.0 && e <= 1.0;
        if !in_eta(eta_a) || !in_eta(eta_b) {
            return Err(Error::ModelRange(format!(
                "efficiencies must lie in (0, 1], got etaA={eta_a}, etaB={eta_b}"
            )));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::ModelRange(format!("beta must lie in [0, 1), got {beta}")));
        }
        Ok(Self { eta_a, eta_b, beta })
    }

    /// Perfect detectors, no background.
    pub fn ideal() -> Self {
        Self { eta_a: 1.0, eta_b: 1.0, beta: 0.0 }
    }

    pub fn eta_a(&self) -> f64 {
        self.eta_a
    }
    pub fn eta_b(&self) -> f64 {
        self.eta_b
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Click probability per side once background is included:
    /// `1 - (1 - eta)(1 - beta)`.
    pub fn effective_efficiencies(&self) -> (f64, f64) {
        let eff = |eta: f64| 1.0 - (1.0 - eta) * (1.0 - self.beta);
        (eff(self.eta_a), eff(self.eta_b))
    }

    /// Column-stochastic map `out <- in` over `{+1, -1, 0}` for one side.
    pub fn side_channel(eta: f64, beta: f64) -> [[f64; 3]; 3] {
        let keep = 1.0 - beta;
        let half = beta / 2.0;
        // loss: +1 -> eta (+1), (1-eta) (0); 0 -> 0. Background then mixes in
        // a uniform click with weight beta.
        [
            [keep * eta + half, half, half],
            [half, keep * eta + half, half],
            [keep * (1.0 - eta), keep * (1.0 - eta), keep],
        ]
    }

    fn channels(&self) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
        (Self::side_channel(self.eta_a, self.beta), Self::side_channel(self.eta_b, self.beta))
    }
}

impl fmt::Display for DetectorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "etaA={} etaB={} beta={}", self.eta_a, self.eta_b, self.beta)
    }
}

/// One of the four measurement configurations, in the order
/// `(A,B), (A,b), (a,B), (a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SettingPair {
    pub atom: Setting,
    pub photon: Setting,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair { atom: Setting::Primary, photon: Setting::Primary },
        SettingPair { atom: Setting::Primary, photon: Setting::Secondary },
        SettingPair { atom: Setting::Secondary, photon: Setting::Primary },
        SettingPair { atom: Setting::Secondary, photon: Setting::Secondary },
    ];

    pub fn index(self) -> usize {
        2 * self.atom.index() + self.photon.index()
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.atom.atom_label(), self.photon.photon_label())
    }
}

/// 3x3 table indexed `[atom outcome][photon outcome]` in the order
/// `+1, -1, no-click`.
pub type OutcomeMatrix = [[f64; 3]; 3];

/// Applies independent side channels to a 3x3 joint table.
pub fn apply_channels(m: &OutcomeMatrix, atom: &[[f64; 3]; 3], photon: &[[f64; 3]; 3]) -> OutcomeMatrix {
    let mut tmp = [[0.0; 3]; 3];
    for (i, row) in tmp.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|j| atom[i][j] * m[j][k]).sum();
        }
    }
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| tmp[i][k] * photon[l][k]).sum();
        }
    }
    out
}

pub fn apply_detector(ideal: &IdealJoint, model: &DetectorModel) -> OutcomeMatrix {
    let m = ideal.as_matrix();
    let embedded = [[m[0][0], m[0][1], 0.0], [m[1][0], m[1][1], 0.0], [0.0, 0.0, 0.0]];
    let (ca, cb) = model.channels();
    apply_channels(&embedded, &ca, &cb)
}

/// Full observed statistics: one 3x3 table per setting pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    tables: [OutcomeMatrix; 4],
    model: Option<DetectorModel>,
    settings: Option<SettingsPair>,
}

impl Behavior {
    /// Validates every table (finite, non-negative, unit sum within
    /// [`BEHAVIOR_TOL`]).
    pub fn new(tables: [OutcomeMatrix; 4], model: Option<DetectorModel>) -> Result<Self> {
        for (pair, t) in SettingPair::ALL.iter().zip(&tables) {
            let mut sum = 0.0;
            for &p in t.iter().flatten() {
                if !p.is_finite() || p < -BEHAVIOR_TOL {
                    return Err(Error::InvalidBehavior(format!("entry {p} in {pair}")));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > BEHAVIOR_TOL {
                return Err(Error::InvalidBehavior(format!("{pair} sums to {sum}")));
            }
        }
        Ok(Self { tables, model, settings: None })
    }

    pub fn with_settings(mut self, settings: SettingsPair) -> Self {
        self.settings = Some(settings);
        self
    }

    pub fn table(&self, pair: SettingPair) -> &OutcomeMatrix {
        &self.tables[pair.index()]
    }

    pub fn tables(&self) -> &[OutcomeMatrix; 4] {
        &self.tables
    }

    pub fn model(&self) -> Option<&DetectorModel> {
        self.model.as_ref()
    }

    pub fn settings(&self) -> Option<&SettingsPair> {
        self.settings.as_ref()
    }

    pub fn prob(&self, pair: SettingPair, atom: Outcome, photon: Outcome) -> f64 {
        self.tables[pair.index()][atom.index()][photon.index()]
    }

    pub fn atom_marginal(&self, pair: SettingPair, atom: Outcome) -> f64 {
        self.tables[pair.index()][atom.index()].iter().sum()
    }

    pub fn photon_marginal(&self, pair: SettingPair, photon: Outcome) -> f64 {
        self.tables[pair.index()].iter().map(|row| row[photon.index()]).sum()
    }

    /// Mass on trials where both sides clicked.
    pub fn coincidence_mass(&self, pair: SettingPair) -> f64 {
        let t = &self.tables[pair.index()];
        t[0][0] + t[0][1] + t[1][0] + t[1][1]
    }

    /// Click probabilities per side averaged over setting pairs.
    pub fn observed_click_rates(&self) -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for pair in SettingPair::ALL {
            a += 1.0 - self.atom_marginal(pair, Outcome::NoClick);
            b += 1.0 - self.photon_marginal(pair, Outcome::NoClick);
        }
        (a / 4.0, b / 4.0)
    }

    /// All 36 entries, pair-major then row-major.
    pub fn flatten(&self) -> [f64; 36] {
        let mut out = [0.0; 36];
        for (k, v) in self.tables.iter().flatten().flatten().enumerate() {
            out[k] = *v;
        }
        out
    }
}

pub fn make_behavior(state: &PureState, settings: &SettingsPair, model: &DetectorModel) -> Behavior {
    let mut tables = [[[0.0; 3]; 3]; 4];
    for pair in SettingPair::ALL {
        let ideal = joint_probs(state, settings.atom_angle(pair.atom), settings.photon_angle(pair.photon));
        tables[pair.index()] = apply_detector(&ideal, model);
    }
    Behavior { tables, model: Some(*model), settings: Some(*settings) }
}
