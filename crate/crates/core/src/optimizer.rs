//! Violation search over states and measurement angles, efficiency
//! thresholds by bisection, and noise-robustness curves.
//!
//! Every search is a fixed set of Nelder-Mead runs started from a shifted
//! Halton sequence. The shift is drawn from the seed, the runs are
//! independent and are merged in index order, so results do not depend on
//! how rayon schedules them.

pub mod nelder_mead;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{make_behavior, DetectorModel};
use crate::error::{Error, Result};
use crate::inequality::{ch_parts, chsh_conditional, ch_lhs, InequalityKind, InequalityReport};
use crate::qstate::{make_state, PureState, SettingsPair};
use nelder_mead::NelderMead;

/// A search counts as violating only above this score.
pub const VIOLATION_MARGIN: f64 = 1e-7;

/// Singles mass below which the CH relative score is no longer divided by the
/// singles; keeps rounding in vanishing probabilities from looking like a
/// violation.
const CH_SINGLES_FLOOR: f64 = 1e-9;

/// Score given to parameter vectors that do not decode to a valid point.
const INVALID_SCORE: f64 = -1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    #[serde(rename = "CH")]
    Ch,
    #[serde(rename = "CHSH-conditional")]
    ChshConditional,
}

impl Functional {
    pub fn kind(self) -> InequalityKind {
        match self {
            Functional::Ch => InequalityKind::Ch,
            Functional::ChshConditional => InequalityKind::ChshConditional,
        }
    }

    pub fn report(self, state: &PureState, settings: &SettingsPair, model: &DetectorModel) -> Result<InequalityReport> {
        let b = make_behavior(state, settings, model);
        match self {
            Functional::Ch => Ok(ch_lhs(&b)),
            Functional::ChshConditional => chsh_conditional(&b),
        }
    }

    fn score(self, state: &PureState, settings: &SettingsPair, model: &DetectorModel, scale: MarginScale) -> f64 {
        let b = make_behavior(state, settings, model);
        match (self, scale) {
            (Functional::Ch, MarginScale::Absolute) => ch_lhs(&b).margin,
            (Functional::Ch, MarginScale::Relative) => {
                let (joint, singles) = ch_parts(&b);
                (joint - singles) / singles.max(CH_SINGLES_FLOOR)
            }
            (Functional::ChshConditional, scale) => match chsh_conditional(&b) {
                Ok(r) if scale == MarginScale::Absolute => r.margin,
                Ok(r) => r.statistic / r.local_bound - 1.0,
                Err(_) => INVALID_SCORE,
            },
        }
    }
}

impl std::fmt::Display for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.kind().fmt(f)
    }
}

/// How a search ranks candidates. `Absolute` is the report margin.
/// `Relative` divides it by the local bound (CHSH) or by the singles mass
/// (CH); the CH value shrinks like the cube of the distance to threshold, so
/// only the relative score can be compared against a fixed cutoff there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginScale {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateFamily {
    /// Any real two-qubit state: three hyperspherical angles.
    General,
    /// The one-parameter `make_state(theta)` family.
    Constructed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub family: StateFamily,
    pub starts: usize,
    /// Evaluation budget of each Nelder-Mead run.
    pub max_evals: usize,
    /// Extra runs restarted from each local optimum with a smaller simplex.
    pub restarts: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self { family: StateFamily::General, starts: 32, max_evals: 3000, restarts: 2 }
    }
}

impl SearchSpace {
    pub fn constructed() -> Self {
        Self { family: StateFamily::Constructed, ..Self::default() }
    }

    pub fn dim(&self) -> usize {
        match self.family {
            StateFamily::General => 7,
            StateFamily::Constructed => 5,
        }
    }

    /// Box the start points are drawn from. The search itself is unbounded;
    /// every parameter is periodic.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let state = match self.family {
            StateFamily::General => vec![(0.0, PI), (0.0, PI), (0.0, 2.0 * PI)],
            StateFamily::Constructed => vec![(0.0, PI)],
        };
        state.into_iter().chain(std::iter::repeat((0.0, PI)).take(4)).collect()
    }

    pub fn decode(&self, params: &[f64]) -> Result<(PureState, SettingsPair)> {
        if params.len() != self.dim() {
            return Err(Error::InvalidConfig(format!("expected {} parameters, got {}", self.dim(), params.len())));
        }
        let (state, angles) = match self.family {
            StateFamily::General => {
                let (s0, c0) = params[0].sin_cos();
                let (s1, c1) = params[1].sin_cos();
                let (s2, c2) = params[2].sin_cos();
                let state = PureState::from_amplitudes([c0, s0 * c1, s0 * s1 * c2, s0 * s1 * s2])?;
                (state, &params[3..])
            }
            StateFamily::Constructed => (make_state(params[0])?, &params[1..]),
        };
        let settings = SettingsPair::from_radians([angles[0], angles[1], angles[2], angles[3]])?;
        Ok((state, settings))
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_evals == 0 {
            return Err(Error::InvalidConfig("search needs at least one start and one evaluation".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub params: Vec<f64>,
    pub state: PureState,
    pub settings: SettingsPair,
    /// Value of the objective that was maximized.
    pub score: f64,
    /// Absolute margin of the inequality report at the optimum.
    pub margin: f64,
}

const PRIMES: [u32; 7] = [2, 3, 5, 7, 11, 13, 17];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton points `1..=n` in `dim` dimensions, each coordinate rotated by a
/// seed-derived offset modulo 1 and mapped onto `bounds`.
pub fn start_points(bounds: &[(f64, f64)], n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = bounds.iter().map(|_| rng.gen::<f64>()).collect();
    (1..=n as u64)
        .map(|i| {
            bounds
                .iter()
                .zip(&shift)
                .zip(PRIMES)
                .map(|(((lo, hi), u), p)| {
                    let t = (radical_inverse(i, p) + u).fract();
                    lo + t * (hi - lo)
                })
                .collect()
        })
        .collect()
}

fn local_search(
    functional: Functional,
    model: &DetectorModel,
    space: &SearchSpace,
    scale: MarginScale,
    x0: &[f64],
) -> (Vec<f64>, f64) {
    let objective = |x: &[f64]| match space.decode(x) {
        Ok((state, settings)) => -functional.score(&state, &settings, model, scale),
        Err(_) => -INVALID_SCORE,
    };
    let nm = NelderMead { max_evals: space.max_evals, ..NelderMead::default() };
    let mut m = nm.minimize(objective, x0, 0.4);
    let mut step = 0.1;
    for _ in 0..space.restarts {
        let next = nm.minimize(objective, &m.x, step);
        if next.fx <= m.fx {
            m = next;
        }
        step *= 0.2;
    }
    (m.x, -m.fx)
}

/// Best violation found for `functional` under `model`, ranked by absolute
/// margin. Never fails: a non-violating best point is returned as is.
pub fn maximize_violation(functional: Functional, model: &DetectorModel, space: &SearchSpace, seed: u64) -> Optimum {
    maximize_scaled(functional, model, space, seed, MarginScale::Absolute)
}

pub fn maximize_scaled(
    functional: Functional,
    model: &DetectorModel,
    space: &SearchSpace,
    seed: u64,
    scale: MarginScale,
) -> Optimum {
    let starts = start_points(&space.bounds(), space.starts.max(1), seed);
    let runs: Vec<(Vec<f64>, f64)> =
        starts.par_iter().map(|x0| local_search(functional, model, space, scale, x0)).collect();

    let mut best: Option<(Optimum, f64)> = None;
    for (x, score) in runs {
        if best.as_ref().is_some_and(|(_, s)| score <= *s) {
            continue;
        }
        let Ok((state, settings)) = space.decode(&x) else { continue };
        let Ok(report) = functional.report(&state, &settings, model) else { continue };
        best = Some((Optimum { params: x, state, settings, score, margin: report.margin }, score));
    }
    match best {
        Some((opt, _)) => opt,
        // Start points always decode; only reached if every run diverged.
        None => {
            let x = starts[0].clone();
            let (state, settings) = space.decode(&x).expect("start points lie inside the parameter box");
            let margin = functional.report(&state, &settings, model).map(|r| r.margin).unwrap_or(f64::NEG_INFINITY);
            Optimum { params: x, state, settings, score: INVALID_SCORE, margin }
        }
    }
}

/// Relative-score search deciding whether `model` admits a violation.
pub fn violates(functional: Functional, model: &DetectorModel, space: &SearchSpace, seed: u64) -> (bool, Optimum) {
    let opt = maximize_scaled(functional, model, space, seed, MarginScale::Relative);
    (opt.score > VIOLATION_MARGIN && opt.margin > 0.0, opt)
}

/// Which efficiency moves with `eta_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Perfect atom detection, `eta_A = 1`.
    AtomPhoton,
    /// `eta_A = eta_B`.
    Symmetric,
    FixedAtom(f64),
}

impl Scenario {
    pub fn model(&self, eta_b: f64, beta: f64) -> Result<DetectorModel> {
        let eta_a = match *self {
            Scenario::AtomPhoton => 1.0,
            Scenario::Symmetric => eta_b,
            Scenario::FixedAtom(e) => e,
        };
        DetectorModel::new(eta_a, eta_b, beta)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::AtomPhoton => f.write_str("atom-photon"),
            Scenario::Symmetric => f.write_str("symmetric"),
            Scenario::FixedAtom(e) => write!(f, "fixed-atom({e})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub functional: Functional,
    pub beta: f64,
    /// Bisection width in `eta_B`.
    pub tol: f64,
    /// Relative bisection width in `beta` for noise curves.
    pub beta_tol: f64,
    /// Lower end of the `eta_B` bracket.
    pub eta_floor: f64,
    pub seed: u64,
    pub space: SearchSpace,
}

impl SweepConfig {
    pub fn new(scenario: Scenario, functional: Functional, beta: f64) -> Self {
        Self {
            scenario,
            functional,
            beta,
            tol: 1e-4,
            beta_tol: 1e-3,
            eta_floor: 0.25,
            seed: 0,
            space: SearchSpace::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.tol) || !positive(self.beta_tol) || self.beta_tol >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be positive (beta_tol < 1), got tol={} beta_tol={}",
                self.tol, self.beta_tol
            )));
        }
        if !(self.eta_floor > 0.0 && self.eta_floor < 1.0) {
            return Err(Error::InvalidConfig(format!("eta_floor must lie in (0, 1), got {}", self.eta_floor)));
        }
        if let Scenario::FixedAtom(e) = self.scenario {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::InvalidConfig(format!("fixed atom efficiency must lie in (0, 1], got {e}")));
            }
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidConfig(format!("beta must lie in [0, 1), got {}", self.beta)));
        }
        self.space.validate()
    }
}

/// A state, settings and model with the margin they achieve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub functional: Functional,
    pub state: PureState,
    pub settings: SettingsPair,
    pub model: DetectorModel,
    pub margin: f64,
}

impl ViolationCertificate {
    pub fn reevaluate(&self) -> Result<f64> {
        Ok(self.functional.report(&self.state, &self.settings, &self.model)?.margin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    /// `beta` for efficiency thresholds, `eta_B` for noise curves.
    pub x: f64,
    pub threshold: f64,
    pub certificate: ViolationCertificate,
}

struct Probe {
    violates: bool,
    model: DetectorModel,
    optimum: Optimum,
}

fn probe(config: &SweepConfig, model: DetectorModel) -> Probe {
    let (violates, optimum) = violates(config.functional, &model, &config.space, config.seed);
    Probe { violates, model, optimum }
}

/// Certificate for a violating probe: the absolute-margin optimum when it is
/// positive, since it separates further from the local set; otherwise the
/// relative-score optimum that decided the probe.
fn certify(config: &SweepConfig, p: &Probe) -> ViolationCertificate {
    let abs = maximize_violation(config.functional, &p.model, &config.space, config.seed);
    let opt = if abs.margin > 0.0 { &abs } else { &p.optimum };
    ViolationCertificate {
        functional: config.functional,
        state: opt.state,
        settings: opt.settings,
        model: p.model,
        margin: opt.margin,
    }
}

/// Checks that violation is monotone over five interior points of
/// `[lo, hi]` and returns the bracket narrowed to the sampled crossing.
/// `rising` says whether violation is expected at the upper end.
fn spot_check(
    lo: (f64, Probe),
    hi: (f64, Probe),
    rising: bool,
    at: impl Fn(f64) -> Result<Probe> + Sync,
) -> Result<((f64, Probe), (f64, Probe))> {
    let xs: Vec<f64> = (1..=5).map(|k| lo.0 + (hi.0 - lo.0) * k as f64 / 6.0).collect();
    let probes: Vec<Probe> = xs.par_iter().map(|&x| at(x)).collect::<Result<_>>()?;
    let mut pts: Vec<(f64, Probe)> = Vec::with_capacity(7);
    pts.push(lo);
    pts.extend(xs.into_iter().zip(probes));
    pts.push(hi);
    // Expected pattern: the upper-end flag, once reached, holds to the end.
    let flags: Vec<bool> = pts.iter().map(|(_, p)| p.violates == rising).collect();
    let first = flags.iter().position(|&f| f).unwrap_or(flags.len() - 1);
    if let Some(bad) = flags[first..].iter().position(|&f| !f) {
        let x = pts[first + bad].0;
        return Err(Error::NonMonotone(format!("violation pattern flips again at {x} in [{}, {}]", pts[0].0, pts[6].0)));
    }
    let mut pts = pts.into_iter();
    let lo = pts.nth(first - 1).expect("first upper-end flag is never the lower end");
    let hi = pts.next().expect("bracket has an upper end");
    Ok((lo, hi))
}

/// Smallest `eta_B` admitting a violation at `config.beta`, to within
/// `config.tol`. The certificate comes from the upper end of the final
/// bracket, which always violates.
pub fn find_threshold(config: &SweepConfig) -> Result<ThresholdPoint> {
    config.validate()?;
    let at = |eta: f64| -> Result<Probe> { Ok(probe(config, config.scenario.model(eta, config.beta)?)) };

    let top = at(1.0)?;
    if !top.violates {
        return Err(Error::NoViolationInRange(format!(
            "{} shows no violation at etaB = 1 ({}, beta = {})",
            config.functional, config.scenario, config.beta
        )));
    }
    let bottom = at(config.eta_floor)?;
    if bottom.violates {
        return Err(Error::NoThreshold(format!("violation already at etaB = {}", config.eta_floor)));
    }

    let ((mut lo, _), (mut hi, mut hi_probe)) = spot_check((config.eta_floor, bottom), (1.0, top), true, at)?;
    while hi - lo > config.tol {
        let mid = 0.5 * (lo + hi);
        let p = at(mid)?;
        if p.violates {
            hi = mid;
            hi_probe = p;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdPoint { x: config.beta, threshold: hi, certificate: certify(config, &hi_probe) })
}

const BETA_START: f64 = 1e-3;
const BETA_CEILING: f64 = 0.5;
const BETA_FLOOR_WIDTH: f64 = 1e-7;

fn max_beta(config: &SweepConfig, eta_b: f64) -> Result<ThresholdPoint> {
    let at = |beta: f64| -> Result<Probe> { Ok(probe(config, config.scenario.model(eta_b, beta)?)) };
    let clean = at(0.0)?;
    if !clean.violates {
        return Err(Error::NoViolationInRange(format!("no violation at etaB = {eta_b} without noise")));
    }
    let mut lo = (0.0, clean);
    let mut b = BETA_START;
    let hi = loop {
        let p = at(b)?;
        if !p.violates {
            break (b, p);
        }
        if b >= BETA_CEILING {
            return Err(Error::NonMonotone(format!("violation persists at beta = {b} for etaB = {eta_b}")));
        }
        lo = (b, p);
        b = (2.0 * b).min(BETA_CEILING);
    };

    // violation is expected at the lower end here, so spot-check falling.
    let ((mut lo_b, mut lo_probe), (mut hi_b, _)) = spot_check(lo, hi, false, at)?;
    while hi_b - lo_b > (config.beta_tol * hi_b).max(BETA_FLOOR_WIDTH) {
        let mid = 0.5 * (lo_b + hi_b);
        let p = at(mid)?;
        if p.violates {
            lo_b = mid;
            lo_probe = p;
        } else {
            hi_b = mid;
        }
    }
    Ok(ThresholdPoint { x: eta_b, threshold: lo_b, certificate: certify(config, &lo_probe) })
}

/// Largest background probability admitting a violation at each `eta_B` of
/// the grid (`config.beta` is ignored). Points fail individually.
pub fn noise_curve(config: &SweepConfig, eta_grid: &[f64]) -> Result<Vec<Result<ThresholdPoint>>> {
    config.validate()?;
    if eta_grid.is_empty() {
        return Err(Error::InvalidConfig("eta grid is empty".into()));
    }
    if let Some(e) = eta_grid.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(Error::InvalidConfig(format!("grid value {e} outside (0, 1]")));
    }
    Ok(eta_grid.par_iter().map(|&eta| max_beta(config, eta)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{ch_threshold, chsh_threshold};
    use std::f64::consts::SQRT_2;

    fn quick() -> SearchSpace {
        SearchSpace { starts: 12, max_evals: 2000, ..SearchSpace::default() }
    }

    #[test]
    fn halton_starts_cover_the_box() {
        let b = SearchSpace::default().bounds();
        let pts = start_points(&b, 32, 7);
        assert_eq!(pts.len(), 32);
        for p in &pts {
            for (v, (lo, hi)) in p.iter().zip(&b) {
                assert!(*v >= *lo && *v < *hi);
            }
        }
        assert_eq!(pts, start_points(&b, 32, 7));
        assert_ne!(pts, start_points(&b, 32, 8));
    }

    #[test]
    fn decode_gives_unit_states() {
        let s = SearchSpace::default();
        let (state, _) = s.decode(&[0.3, 1.1, 4.0, 0.0, 1.0, 2.0, 3.0]).unwrap();
        let n: f64 = state.amplitudes().iter().map(|a| a * a).sum();
        assert!((n - 1.0).abs() < 1e-14);
        assert!(s.decode(&[0.0; 3]).is_err());
        assert!(SearchSpace::constructed().decode(&[0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn chsh_maximum_is_tsirelson() {
        let opt = maximize_violation(Functional::ChshConditional, &DetectorModel::ideal(), &quick(), 1);
        assert!((opt.margin - (2.0 * SQRT_2 - 2.0)).abs() < 1e-6, "{}", opt.margin);
    }

    #[test]
    fn ch_maximum() {
        let opt = maximize_violation(Functional::Ch, &DetectorModel::ideal(), &quick(), 1);
        assert!((opt.margin - (SQRT_2 - 1.0) / 2.0).abs() < 1e-6, "{}", opt.margin);
    }

    #[test]
    fn ch_threshold_is_strict() {
        let m = DetectorModel::new(1.0, 0.5, 0.0).unwrap();
        let opt = maximize_violation(Functional::Ch, &m, &quick(), 3);
        assert!(opt.margin <= 1e-12, "{}", opt.margin);
        assert!(!violates(Functional::Ch, &m, &quick(), 3).0);
        let m = DetectorModel::new(1.0, 0.52, 0.0).unwrap();
        assert!(violates(Functional::Ch, &m, &quick(), 3).0);
    }

    #[test]
    fn repeat_calls_are_identical() {
        let m = DetectorModel::new(0.9, 0.8, 0.01).unwrap();
        let a = maximize_violation(Functional::Ch, &m, &quick(), 11);
        let b = maximize_violation(Functional::Ch, &m, &quick(), 11);
        assert_eq!(a, b);
    }

    #[test]
    fn atom_photon_thresholds() {
        let mut cfg = SweepConfig::new(Scenario::AtomPhoton, Functional::Ch, 0.0);
        cfg.space = quick();
        let p = find_threshold(&cfg).unwrap();
        assert!((p.threshold - 0.5).abs() < 1e-3, "{}", p.threshold);
        assert!(p.certificate.margin > 0.0);
        assert!((p.certificate.reevaluate().unwrap() - p.certificate.margin).abs() < 1e-9);

        cfg.functional = Functional::ChshConditional;
        let p = find_threshold(&cfg).unwrap();
        assert!((p.threshold - chsh_threshold(1.0).unwrap()).abs() < 1e-3, "{}", p.threshold);
    }

    #[test]
    fn fixed_atom_matches_formula() {
        let mut cfg = SweepConfig::new(Scenario::FixedAtom(0.8), Functional::Ch, 0.0);
        cfg.space = quick();
        let p = find_threshold(&cfg).unwrap();
        assert!((p.threshold - ch_threshold(0.8).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn optimum_tends_to_product_state_near_threshold() {
        let overlaps: Vec<f64> = [0.2, 0.05, 0.01]
            .iter()
            .map(|d| {
                let m = DetectorModel::new(1.0, 0.5 + d, 0.0).unwrap();
                maximize_violation(Functional::Ch, &m, &SearchSpace::default(), 5).state.product_overlap()
            })
            .collect();
        assert!(overlaps.windows(2).all(|w| w[1] > w[0]), "{overlaps:?}");
        assert!(overlaps[2] > 0.98, "{overlaps:?}");
    }

    #[test]
    fn constructed_family_reaches_the_same_threshold() {
        let mut cfg = SweepConfig::new(Scenario::Symmetric, Functional::Ch, 0.0);
        cfg.space = SearchSpace { starts: 12, ..SearchSpace::constructed() };
        let p = find_threshold(&cfg).unwrap();
        assert!((p.threshold - 2.0 / 3.0).abs() < 1e-3, "{}", p.threshold);
    }

    #[test]
    fn no_violation_reported() {
        let mut cfg = SweepConfig::new(Scenario::FixedAtom(0.4), Functional::Ch, 0.0);
        cfg.space = quick();
        assert!(matches!(find_threshold(&cfg), Err(Error::NoViolationInRange(_))));
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = SweepConfig::new(Scenario::Symmetric, Functional::Ch, 0.0);
        cfg.tol = 0.0;
        assert!(matches!(find_threshold(&cfg), Err(Error::InvalidConfig(_))));
        let cfg = SweepConfig::new(Scenario::Symmetric, Functional::Ch, 0.0);
        assert!(matches!(noise_curve(&cfg, &[]), Err(Error::InvalidConfig(_))));
        assert!(matches!(noise_curve(&cfg, &[1.2]), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn noise_curve_rises_with_efficiency() {
        let mut cfg = SweepConfig::new(Scenario::AtomPhoton, Functional::Ch, 0.0);
        cfg.space = quick();
        cfg.beta_tol = 1e-2;
        let pts = noise_curve(&cfg, &[0.45, 0.7, 0.9]).unwrap();
        assert!(matches!(pts[0], Err(Error::NoViolationInRange(_))));
        let b1 = pts[1].as_ref().unwrap().threshold;
        let b2 = pts[2].as_ref().unwrap().threshold;
        assert!(0.0 < b1 && b1 < b2, "{b1} {b2}");
    }
}
