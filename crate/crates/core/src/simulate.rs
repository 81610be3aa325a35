//! Event-by-event Monte Carlo of the experiment and the estimators that turn
//! counts back into behaviors and inequality statistics.
//!
//! Trials are generated in fixed chunks of [`CHUNK`]; chunk `k` draws from a
//! ChaCha stream `k` keyed by the seed, so the counts do not depend on the
//! number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{make_behavior, Behavior, DetectorModel, Outcome, OutcomeMatrix, SettingPair};
use crate::error::{Error, Result};
use crate::inequality::{bound_efficiencies, InequalityKind, InequalityReport, CHSH_SIGNS};
use crate::qstate::{PureState, SettingsPair};

pub const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub setting: SettingPair,
    pub atom: Outcome,
    pub photon: Outcome,
}

pub type Counts = [[[u64; 3]; 3]; 4];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    counts: Counts,
    n: u64,
    seed: u64,
}

impl CountsTable {
    /// Fails only if the total overflows `u64`.
    pub fn from_counts(counts: Counts, seed: u64) -> Result<Self> {
        let mut n: u64 = 0;
        for c in counts.iter().flatten().flatten() {
            n = n
                .checked_add(*c)
                .ok_or_else(|| Error::InvalidConfig("total count overflows 64 bits".into()))?;
        }
        Ok(Self { counts, n, seed })
    }

    pub fn counts(&self) -> &Counts {
        &self.counts
    }

    pub fn count(&self, pair: SettingPair, atom: Outcome, photon: Outcome) -> u64 {
        self.counts[pair.index()][atom.index()][photon.index()]
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn setting_total(&self, pair: SettingPair) -> u64 {
        self.counts[pair.index()].iter().flatten().sum()
    }

    fn record(&mut self, t: TrialRecord) {
        self.counts[t.setting.index()][t.atom.index()][t.photon.index()] += 1;
        self.n += 1;
    }

    fn merge(mut self, other: &CountsTable) -> Self {
        for (a, b) in self.counts.iter_mut().flatten().flatten().zip(other.counts.iter().flatten().flatten()) {
            *a += b;
        }
        self.n += other.n;
        self
    }
}

/// Cumulative distribution over the nine outcome cells of each setting pair.
struct Sampler {
    cdf: [[f64; 9]; 4],
    last: [usize; 4],
}

impl Sampler {
    fn new(tables: &[OutcomeMatrix; 4]) -> Self {
        let mut cdf = [[0.0; 9]; 4];
        let mut last = [0; 4];
        for (k, t) in tables.iter().enumerate() {
            let mut acc = 0.0;
            for (j, p) in t.iter().flatten().enumerate() {
                acc += p;
                cdf[k][j] = acc;
                if *p > 0.0 {
                    last[k] = j;
                }
            }
        }
        Self { cdf, last }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> TrialRecord {
        let k = rng.gen_range(0..4usize);
        let u: f64 = rng.gen();
        // Zero-probability cells have an empty interval and are never chosen;
        // rounding slack at the top goes to the last possible cell.
        let j = self.cdf[k].iter().position(|&c| u < c).unwrap_or(self.last[k]).min(self.last[k]);
        TrialRecord { setting: SettingPair::from_index(k), atom: Outcome::ALL[j / 3], photon: Outcome::ALL[j % 3] }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_len(n: u64, chunk: u64) -> u64 {
    (n - chunk * CHUNK).min(CHUNK)
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("number of trials must be at least 1".into()));
    }
    Ok(())
}

/// Trials with uniformly random settings and outcomes drawn from
/// `make_behavior(state, settings, model)`.
pub fn run_trials(state: &PureState, settings: &SettingsPair, model: &DetectorModel, n: u64, seed: u64) -> Result<CountsTable> {
    check_n(n)?;
    let sampler = Sampler::new(make_behavior(state, settings, model).tables());
    let chunks = n.div_ceil(CHUNK);
    let empty = CountsTable { counts: [[[0; 3]; 3]; 4], n: 0, seed };
    let parts: Vec<CountsTable> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut t = empty.clone();
            for _ in 0..chunk_len(n, c) {
                t.record(sampler.draw(&mut rng));
            }
            t
        })
        .collect();
    Ok(parts.iter().fold(empty.clone(), CountsTable::merge))
}

/// The individual trials behind `run_trials` with the same arguments.
pub fn sample_trials(
    state: &PureState,
    settings: &SettingsPair,
    model: &DetectorModel,
    n: u64,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    check_n(n)?;
    let sampler = Sampler::new(make_behavior(state, settings, model).tables());
    let mut out = Vec::with_capacity(n as usize);
    for c in 0..n.div_ceil(CHUNK) {
        let mut rng = chunk_rng(seed, c);
        out.extend((0..chunk_len(n, c)).map(|_| sampler.draw(&mut rng)));
    }
    Ok(out)
}

/// Relative frequencies per setting pair, and their binomial standard errors
/// in `Behavior::flatten` order. The estimate carries no detector model.
pub fn estimate_behavior(counts: &CountsTable) -> Result<(Behavior, [f64; 36])> {
    let mut tables = [[[0.0; 3]; 3]; 4];
    let mut se = [0.0; 36];
    for pair in SettingPair::ALL {
        let k = pair.index();
        let total = counts.setting_total(pair);
        if total == 0 {
            return Err(Error::EmptySetting(pair.to_string()));
        }
        let n = total as f64;
        for i in 0..3 {
            for j in 0..3 {
                let p = counts.counts[k][i][j] as f64 / n;
                tables[k][i][j] = p;
                se[9 * k + 3 * i + j] = (p * (1.0 - p) / n).sqrt();
            }
        }
    }
    Ok((Behavior::new(tables, None)?, se))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityEstimate {
    pub report: InequalityReport,
    /// Standard error of `report.statistic`; the local bound is taken as
    /// known.
    pub std_error: f64,
}

/// Mean and variance of the mean of a per-trial score `w[i][j]` for one
/// setting pair.
fn linear_moments(p: &OutcomeMatrix, w: &[[f64; 3]; 3], n: f64) -> (f64, f64) {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m1 += w[i][j] * p[i][j];
            m2 += w[i][j] * w[i][j] * p[i][j];
        }
    }
    (m1, (m2 - m1 * m1).max(0.0) / n)
}

const CORRELATION: [[f64; 3]; 3] = [[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
const PLUS_PLUS: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
/// `1[++] - 1[atom +1] - 1[photon +1]`.
const CH_FIRST: [[f64; 3]; 3] = [[-1.0, -1.0, -1.0], [-1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]];

/// Plug-in CHSH (conditional and joint) and CH statistics with
/// delta-method standard errors.
pub fn estimate_inequalities(counts: &CountsTable) -> Result<Vec<InequalityEstimate>> {
    let (b, _) = estimate_behavior(counts)?;
    let totals: Vec<f64> = SettingPair::ALL.iter().map(|p| counts.setting_total(*p) as f64).collect();

    // Conditional correlators: E = (n_same - n_diff) / n_cc with variance
    // (1 - E^2) / n_cc given the coincidence count.
    let mut s = 0.0;
    let mut var = 0.0;
    for (pair, sign) in SettingPair::ALL.into_iter().zip(CHSH_SIGNS) {
        let c = &counts.counts[pair.index()];
        let ncc = c[0][0] + c[0][1] + c[1][0] + c[1][1];
        if ncc == 0 {
            return Err(Error::NoCoincidences(pair.to_string()));
        }
        let e = (c[0][0] as f64 + c[1][1] as f64 - c[0][1] as f64 - c[1][0] as f64) / ncc as f64;
        s += sign * e;
        var += (1.0 - e * e).max(0.0) / ncc as f64;
    }
    let (ea, eb) = bound_efficiencies(&b);
    let bound = 2.0 / ea + 2.0 / eb - 2.0;
    let conditional = InequalityEstimate {
        report: report(InequalityKind::ChshConditional, s.abs(), bound),
        std_error: var.sqrt(),
    };

    let mut s = 0.0;
    let mut var = 0.0;
    for ((pair, sign), n) in SettingPair::ALL.into_iter().zip(CHSH_SIGNS).zip(&totals) {
        let (m, v) = linear_moments(b.table(pair), &CORRELATION, *n);
        s += sign * m;
        var += v;
    }
    let p00 = SettingPair::ALL
        .into_iter()
        .map(|p| b.prob(p, Outcome::NoClick, Outcome::NoClick))
        .fold(f64::INFINITY, f64::min);
    let joint = InequalityEstimate {
        report: report(InequalityKind::ChshJoint, s.abs(), 2.0 - 2.0 * p00),
        std_error: var.sqrt(),
    };

    let mut s = 0.0;
    let mut var = 0.0;
    for ((k, pair), n) in SettingPair::ALL.into_iter().enumerate().zip(&totals) {
        let (w, sign) = match k {
            0 => (&CH_FIRST, 1.0),
            3 => (&PLUS_PLUS, -1.0),
            _ => (&PLUS_PLUS, 1.0),
        };
        let (m, v) = linear_moments(b.table(pair), w, *n);
        s += sign * m;
        var += v;
    }
    let ch = InequalityEstimate { report: report(InequalityKind::Ch, s, 0.0), std_error: var.sqrt() };

    Ok(vec![conditional, joint, ch])
}

fn report(kind: InequalityKind, statistic: f64, local_bound: f64) -> InequalityReport {
    InequalityReport { kind, statistic, local_bound, margin: statistic - local_bound, settings: None }
}

/// Largest absolute difference between the estimated and the given
/// behavior.
pub fn max_deviation(counts: &CountsTable, exact: &Behavior) -> Result<f64> {
    let (est, _) = estimate_behavior(counts)?;
    Ok(est.flatten().iter().zip(exact.flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{ch_lhs, chsh_conditional, chsh_joint};
    use crate::qstate::make_state;
    use std::f64::consts::FRAC_PI_3;

    fn bell() -> (PureState, SettingsPair) {
        (make_state(FRAC_PI_3).unwrap(), SettingsPair::chsh_optimal())
    }

    #[test]
    fn counts_sum_to_n_and_repeat() {
        let (s, a) = bell();
        let m = DetectorModel::new(0.8, 0.7, 0.05).unwrap();
        let n = 3 * CHUNK + 17;
        let t = run_trials(&s, &a, &m, n, 5).unwrap();
        assert_eq!(t.n(), n);
        assert_eq!(t.counts().iter().flatten().flatten().sum::<u64>(), n);
        assert_eq!(t, run_trials(&s, &a, &m, n, 5).unwrap());
        assert_ne!(t, run_trials(&s, &a, &m, n, 6).unwrap());
    }

    #[test]
    fn records_match_counts() {
        let (s, a) = bell();
        let m = DetectorModel::new(0.9, 0.6, 0.1).unwrap();
        let n = CHUNK + 1000;
        let recs = sample_trials(&s, &a, &m, n, 9).unwrap();
        let t = run_trials(&s, &a, &m, n, 9).unwrap();
        let mut c = [[[0u64; 3]; 3]; 4];
        for r in recs {
            c[r.setting.index()][r.atom.index()][r.photon.index()] += 1;
        }
        assert_eq!(&c, t.counts());
    }

    #[test]
    fn zero_trials_rejected() {
        let (s, a) = bell();
        assert!(matches!(run_trials(&s, &a, &DetectorModel::ideal(), 0, 1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn single_trial_estimate() {
        let mut c = [[[0u64; 3]; 3]; 4];
        for k in 0..4 {
            c[k][1][2] = 1;
        }
        let (b, se) = estimate_behavior(&CountsTable::from_counts(c, 0).unwrap()).unwrap();
        assert_eq!(b.prob(SettingPair::ALL[2], Outcome::Minus, Outcome::NoClick), 1.0);
        assert_eq!(b.flatten().iter().filter(|p| **p == 0.0).count(), 32);
        assert!(se.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn empty_setting_and_no_coincidences() {
        let mut c = [[[0u64; 3]; 3]; 4];
        c[0][0][0] = 3;
        let t = CountsTable::from_counts(c, 0).unwrap();
        assert!(matches!(estimate_behavior(&t), Err(Error::EmptySetting(_))));
        for k in 1..4 {
            c[k][2][2] = 2;
        }
        let t = CountsTable::from_counts(c, 0).unwrap();
        assert!(matches!(estimate_inequalities(&t), Err(Error::NoCoincidences(_))));
    }

    #[test]
    fn overflow_rejected() {
        let mut c = [[[0u64; 3]; 3]; 4];
        c[0][0][0] = u64::MAX;
        c[1][0][0] = 1;
        assert!(CountsTable::from_counts(c, 0).is_err());
    }

    #[test]
    fn constructed_state_never_fires_in_ab() {
        let theta = 0.4;
        let s = make_state(theta).unwrap();
        let a = SettingsPair::constructed(theta).unwrap();
        let t = run_trials(&s, &a, &DetectorModel::ideal(), 200_000, 2).unwrap();
        assert_eq!(t.count(SettingPair::ALL[3], Outcome::Plus, Outcome::Plus), 0);
        assert!(t.count(SettingPair::ALL[0], Outcome::Plus, Outcome::Plus) > 0);
    }

    #[test]
    fn estimates_track_analytic_reports() {
        let (s, a) = bell();
        let m = DetectorModel::new(0.95, 0.9, 0.01).unwrap();
        let exact = make_behavior(&s, &a, &m);
        let t = run_trials(&s, &a, &m, 400_000, 21).unwrap();
        let est = estimate_inequalities(&t).unwrap();
        let truth = [chsh_conditional(&exact).unwrap().statistic, chsh_joint(&exact).statistic, ch_lhs(&exact).statistic];
        for (e, x) in est.iter().zip(truth) {
            assert!((e.report.statistic - x).abs() < 4.0 * e.std_error, "{:?} vs {x}", e);
        }
    }

    #[test]
    fn uniform_settings() {
        let (s, a) = bell();
        let t = run_trials(&s, &a, &DetectorModel::ideal(), 100_000, 4).unwrap();
        let sd = (100_000.0 * 0.25 * 0.75f64).sqrt();
        for p in SettingPair::ALL {
            assert!((t.setting_total(p) as f64 - 25_000.0).abs() < 3.5 * sd);
        }
    }
}
