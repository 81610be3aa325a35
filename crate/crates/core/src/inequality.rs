//! CHSH and CH statistics with efficiency-aware local bounds, plus the
//! closed-form threshold curves.

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::detector::{Behavior, DetectorModel, Outcome, SettingPair};
use crate::error::{Error, Result};
use crate::qstate::SettingsPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InequalityKind {
    #[serde(rename = "CHSH-conditional")]
    ChshConditional,
    #[serde(rename = "CHSH-joint")]
    ChshJoint,
    #[serde(rename = "CH")]
    Ch,
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityKind::ChshConditional => "CHSH-conditional",
            InequalityKind::ChshJoint => "CHSH-joint",
            InequalityKind::Ch => "CH",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub kind: InequalityKind,
    pub statistic: f64,
    pub local_bound: f64,
    /// `statistic - local_bound`; positive is a violation.
    pub margin: f64,
    pub settings: Option<SettingsPair>,
}

impl InequalityReport {
    fn new(kind: InequalityKind, statistic: f64, local_bound: f64, b: &Behavior) -> Self {
        Self {
            kind,
            statistic,
            local_bound,
            margin: statistic - local_bound,
            settings: b.settings().copied(),
        }
    }

    pub fn violates(&self) -> bool {
        self.margin > 0.0
    }
}

/// CHSH sign of each setting pair in `(A,B), (A,b), (a,B), (a,b)` order.
pub(crate) const CHSH_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

fn click_correlation(b: &Behavior, pair: SettingPair) -> f64 {
    let t = b.table(pair);
    t[0][0] + t[1][1] - t[0][1] - t[1][0]
}

/// Efficiencies feeding the coincidence-conditioned bound: the model's click
/// probabilities when the behavior carries one, else the observed click rates.
pub fn bound_efficiencies(b: &Behavior) -> (f64, f64) {
    match b.model() {
        Some(m) => m.effective_efficiencies(),
        None => b.observed_click_rates(),
    }
}

/// Correlators conditioned on double clicks against `2/eta_A + 2/eta_B - 2`.
pub fn chsh_conditional(b: &Behavior) -> Result<InequalityReport> {
    let mut s = 0.0;
    for (pair, sign) in SettingPair::ALL.into_iter().zip(CHSH_SIGNS) {
        let coinc = b.coincidence_mass(pair);
        if coinc <= 0.0 {
            return Err(Error::NoCoincidences(pair.to_string()));
        }
        s += sign * click_correlation(b, pair) / coinc;
    }
    let (ea, eb) = bound_efficiencies(b);
    let bound = 2.0 / ea + 2.0 / eb - 2.0;
    Ok(InequalityReport::new(InequalityKind::ChshConditional, s.abs(), bound, b))
}

/// Unconditioned correlators (no-click counts as 0) against
/// `2 - 2 P(A=B=0)`. The no-click coincidence is taken as its smallest value
/// over the four setting pairs, which gives the loosest bound when the data
/// are not exactly setting-independent.
pub fn chsh_joint(b: &Behavior) -> InequalityReport {
    let s: f64 = SettingPair::ALL
        .into_iter()
        .zip(CHSH_SIGNS)
        .map(|(pair, sign)| sign * click_correlation(b, pair))
        .sum();
    let p00 = SettingPair::ALL
        .into_iter()
        .map(|p| b.prob(p, Outcome::NoClick, Outcome::NoClick))
        .fold(f64::INFINITY, f64::min);
    InequalityReport::new(InequalityKind::ChshJoint, s.abs(), 2.0 - 2.0 * p00, b)
}

/// `(three +1/+1 joints minus the (a,b) one, P(A=1) + P(B=1))`, singles read
/// from the `(A,B)` table.
pub(crate) fn ch_parts(b: &Behavior) -> (f64, f64) {
    let pp = |i: usize| b.table(SettingPair::ALL[i])[0][0];
    let joint = pp(0) + pp(1) + pp(2) - pp(3);
    let ab = SettingPair::ALL[0];
    let singles = b.atom_marginal(ab, Outcome::Plus) + b.photon_marginal(ab, Outcome::Plus);
    (joint, singles)
}

/// Clauser-Horne left-hand side on absolute probabilities; local bound 0.
pub fn ch_lhs(b: &Behavior) -> InequalityReport {
    let (joint, singles) = ch_parts(b);
    InequalityReport::new(InequalityKind::Ch, joint - singles, 0.0, b)
}

/// Closed-form CH value for the `make_state(theta)` construction:
/// `K [3 eA eB - eA - eB - tan^2(theta/2) (eA + eB)]` with
/// `K = sin^4(theta) / ((1 - 2cos theta)^2 + 2 sin^2 theta)`.
pub fn ch_lhs_analytic(theta: f64, model: &DetectorModel) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    if !theta.is_finite() || s.abs() < 1e-9 {
        return Err(Error::DegenerateState(s.abs()));
    }
    if model.beta() != 0.0 {
        return Err(Error::NoiseUnsupported(model.beta()));
    }
    let (ea, eb) = (model.eta_a(), model.eta_b());
    let k = s.powi(4) / ((1.0 - 2.0 * c).powi(2) + 2.0 * s * s);
    let eps2 = (theta / 2.0).tan().powi(2);
    Ok(k * (3.0 * ea * eb - ea - eb - eps2 * (ea + eb)))
}

fn check_eta(eta_a: f64) -> Result<()> {
    if !(eta_a > 0.0 && eta_a <= 1.0) {
        return Err(Error::ModelRange(format!("etaA must lie in (0, 1], got {eta_a}")));
    }
    Ok(())
}

/// Smallest `eta_B` above which the conditioned CHSH bound can be beaten by
/// `2*sqrt(2)`: `eta_A / ((sqrt2 + 1) eta_A - 1)` (open interval).
pub fn chsh_threshold(eta_a: f64) -> Result<f64> {
    check_eta(eta_a)?;
    let denom = (SQRT_2 + 1.0) * eta_a - 1.0;
    if denom <= 0.0 {
        return Err(Error::NoThreshold(format!("etaA = {eta_a} <= 1/(sqrt2+1)")));
    }
    let t = eta_a / denom;
    if t > 1.0 {
        return Err(Error::NoThreshold(format!("required etaB = {t} exceeds 1")));
    }
    Ok(t)
}

/// `eta_A / (3 eta_A - 1)`: the CH violation threshold on `eta_B` (open
/// interval).
pub fn ch_threshold(eta_a: f64) -> Result<f64> {
    check_eta(eta_a)?;
    let denom = 3.0 * eta_a - 1.0;
    if denom <= 0.0 {
        return Err(Error::NoThreshold(format!("etaA = {eta_a} <= 1/3")));
    }
    let t = eta_a / denom;
    if t > 1.0 {
        return Err(Error::NoThreshold(format!("required etaB = {t} exceeds 1")));
    }
    Ok(t)
}

/// Upper bound on the CH left-hand side for any model with independent,
/// setting-independent detection: `(3 eA eB - eA - eB) * min_singles_detect`.
pub fn ch_lhv_bound(model: &DetectorModel, min_singles_detect: f64) -> f64 {
    let (ea, eb) = (model.eta_a(), model.eta_b());
    (3.0 * ea * eb - ea - eb) * min_singles_detect
}

/// `min(P(A=1)/eta_A, P(B=1)/eta_B)` read from the `(A,B)` table.
pub fn min_singles_detect(b: &Behavior, model: &DetectorModel) -> f64 {
    let ab = SettingPair::ALL[0];
    let pa = b.atom_marginal(ab, Outcome::Plus) / model.eta_a();
    let pb = b.photon_marginal(ab, Outcome::Plus) / model.eta_b();
    pa.min(pb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::make_behavior;
    use crate::qstate::{make_state, PureState};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_3;

    fn model(ea: f64, eb: f64) -> DetectorModel {
        DetectorModel::new(ea, eb, 0.0).unwrap()
    }

    fn maximal(ea: f64, eb: f64) -> Behavior {
        make_behavior(&make_state(FRAC_PI_3).unwrap(), &SettingsPair::chsh_optimal(), &model(ea, eb))
    }

    #[test]
    fn chsh_conditional_tsirelson() {
        let r = chsh_conditional(&maximal(1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(r.statistic, 2.0 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.local_bound, 2.0, epsilon = 1e-15);
        assert_eq!(r.margin, r.statistic - r.local_bound);
    }

    #[test]
    fn chsh_conditional_equality_points() {
        let eta = 2.0 * (SQRT_2 - 1.0);
        let r = chsh_conditional(&maximal(eta, eta)).unwrap();
        assert_abs_diff_eq!(r.local_bound, 2.0 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.margin, 0.0, epsilon = 1e-12);

        let r = chsh_conditional(&maximal(1.0, 1.0 / SQRT_2)).unwrap();
        assert_abs_diff_eq!(r.local_bound, 2.0 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.margin, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn chsh_conditional_needs_coincidences() {
        let mut t = [[[0.0; 3]; 3]; 4];
        for m in &mut t {
            m[0][2] = 0.5;
            m[2][0] = 0.5;
        }
        let b = Behavior::new(t, None).unwrap();
        assert!(matches!(chsh_conditional(&b), Err(Error::NoCoincidences(_))));
    }

    #[test]
    fn chsh_joint_examples() {
        let b = maximal(1.0, 1.0);
        let j = chsh_joint(&b);
        let c = chsh_conditional(&b).unwrap();
        assert_abs_diff_eq!(j.statistic, c.statistic, epsilon = 1e-12);
        assert_abs_diff_eq!(j.local_bound, c.local_bound, epsilon = 1e-12);

        let j = chsh_joint(&maximal(0.5, 0.5));
        assert_abs_diff_eq!(j.local_bound, 1.5, epsilon = 1e-15);
    }

    /// Eq.-14-style scalar oracle, independent of the behavior pipeline.
    fn ch_scalar_oracle(theta: f64, ea: f64, eb: f64) -> f64 {
        let eps = (theta / 2.0).tan();
        // sin and cos from the half-angle tangent.
        let s = 2.0 * eps / (1.0 + eps * eps);
        let c = (1.0 - eps * eps) / (1.0 + eps * eps);
        let c2 = 1.0 / ((1.0 - 2.0 * c).powi(2) + 2.0 * s * s);
        c2 * s.powi(4) * (3.0 * ea * eb - ea - eb - eps * eps * (ea + eb))
    }

    #[test]
    fn ch_small_theta_example() {
        let theta = 2.0 * 0.1f64.atan();
        let want = ch_scalar_oracle(theta, 1.0, 0.6);
        assert_abs_diff_eq!(want, 2.827e-4, epsilon = 1e-6);
        let m = model(1.0, 0.6);
        let got = ch_lhs_analytic(theta, &m).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        let b = make_behavior(&make_state(theta).unwrap(), &SettingsPair::constructed(theta).unwrap(), &m);
        assert_abs_diff_eq!(ch_lhs(&b).statistic, want, epsilon = 1e-15);
    }

    #[test]
    fn ch_ideal_maximum_is_half_of_sqrt2_minus_1() {
        // For +-1 outcomes CH = (S - 2)/4, so Tsirelson caps it at (sqrt2 - 1)/2.
        let b = maximal(1.0, 1.0);
        let r = ch_lhs(&b);
        let s = chsh_conditional(&b).unwrap().statistic;
        assert_abs_diff_eq!(r.statistic, (s - 2.0) / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.statistic, (SQRT_2 - 1.0) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn ch_at_two_thirds_never_positive() {
        let m = model(2.0 / 3.0, 2.0 / 3.0);
        for i in 1..400 {
            let theta = i as f64 * std::f64::consts::PI / 400.0;
            let v = ch_lhs_analytic(theta, &m).unwrap();
            assert!(v < 1e-15, "theta={theta} v={v}");
            let b = make_behavior(&make_state(theta).unwrap(), &SettingsPair::constructed(theta).unwrap(), &m);
            assert!(ch_lhs(&b).statistic <= 1e-15);
        }
    }

    #[test]
    fn ch_positive_for_small_theta_above_half() {
        let m = model(1.0, 0.51);
        // 3*0.51 - 1.51 = 0.02 > eps^2 * 1.51 needs eps < 0.115.
        let theta = 2.0 * 0.05f64.atan();
        assert!(ch_lhs_analytic(theta, &m).unwrap() > 0.0);
        assert!(ch_lhs_analytic(2.0 * 0.2f64.atan(), &m).unwrap() < 0.0);
    }

    #[test]
    fn ch_analytic_errors() {
        assert!(matches!(ch_lhs_analytic(0.0, &model(1.0, 1.0)), Err(Error::DegenerateState(_))));
        let noisy = DetectorModel::new(1.0, 1.0, 0.01).unwrap();
        assert!(matches!(ch_lhs_analytic(0.5, &noisy), Err(Error::NoiseUnsupported(_))));
    }

    #[test]
    fn threshold_formulas() {
        assert_abs_diff_eq!(chsh_threshold(1.0).unwrap(), 1.0 / SQRT_2, epsilon = 1e-15);
        let fixed = 2.0 * (SQRT_2 - 1.0);
        assert_abs_diff_eq!(chsh_threshold(fixed).unwrap(), fixed, epsilon = 1e-15);
        // 0.9 / (0.9 * 2.41421356 - 1) = 0.9 / 1.17279221
        assert_abs_diff_eq!(chsh_threshold(0.9).unwrap(), 0.767399, epsilon = 1e-6);
        assert!(matches!(chsh_threshold(0.4), Err(Error::NoThreshold(_))));
        assert!(matches!(chsh_threshold(0.7), Err(Error::NoThreshold(_))));

        assert_abs_diff_eq!(ch_threshold(1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ch_threshold(2.0 / 3.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ch_threshold(0.9).unwrap(), 0.9 / 1.7, epsilon = 1e-15);
        assert!(matches!(ch_threshold(0.3), Err(Error::NoThreshold(_))));
        assert!(matches!(ch_threshold(0.45), Err(Error::NoThreshold(_))));
        assert!(ch_threshold(1.5).is_err());
    }

    #[test]
    fn chsh_threshold_is_bound_equality() {
        // Setting 2*sqrt2 = 2/eA + 2/eB - 2 and solving for eB.
        for i in 0..=5 {
            let ea = 0.75 + 0.05 * i as f64;
            let eb = chsh_threshold(ea).unwrap();
            let bound = 2.0 / ea + 2.0 / eb - 2.0;
            assert_abs_diff_eq!(bound, 2.0 * SQRT_2, epsilon = 1e-9);
        }
    }

    #[test]
    fn lhv_bound_examples() {
        assert_abs_diff_eq!(ch_lhv_bound(&model(1.0, 1.0), 0.5), 0.5, epsilon = 1e-15);
        for m in [0.0, 0.3, 1.0] {
            assert_abs_diff_eq!(ch_lhv_bound(&model(2.0 / 3.0, 2.0 / 3.0), m), 0.0, epsilon = 1e-15);
        }
        assert!(ch_lhv_bound(&model(1.0, 0.4), 0.3) < 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn joint_equals_efficiency_product_times_conditional(
            amps in prop::array::uniform4(-1.0f64..1.0),
            ang in prop::array::uniform4(0.0f64..3.14),
            ea in 0.05f64..=1.0,
            eb in 0.05f64..=1.0,
        ) {
            prop_assume!(amps.iter().map(|x| x * x).sum::<f64>() > 1e-3);
            let s = PureState::from_amplitudes(amps).unwrap();
            let b = make_behavior(&s, &SettingsPair::from_radians(ang).unwrap(), &model(ea, eb));
            let c = chsh_conditional(&b).unwrap();
            let j = chsh_joint(&b);
            prop_assert!((j.statistic - ea * eb * c.statistic).abs() <= 1e-12);
            // Both bounds flag violation identically.
            prop_assert!((j.margin - ea * eb * c.margin).abs() <= 1e-12);
            if j.margin.abs() > 1e-12 {
                prop_assert_eq!(j.margin > 0.0, c.margin > 0.0);
            }
        }

        #[test]
        fn ch_analytic_matches_pipeline(theta in 0.01f64..3.13, ea in 0.05f64..=1.0, eb in 0.05f64..=1.0) {
            let m = model(ea, eb);
            let b = make_behavior(&make_state(theta).unwrap(), &SettingsPair::constructed(theta).unwrap(), &m);
            prop_assert!((ch_lhs(&b).statistic - ch_lhs_analytic(theta, &m).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn ch_positive_somewhere_iff_threshold_condition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let ea: f64 = rng.gen_range(0.3..=1.0);
            let eb: f64 = rng.gen_range(0.3..=1.0);
            let gap = 3.0 * ea * eb - ea - eb;
            if gap.abs() < 1e-4 {
                continue;
            }
            let m = model(ea, eb);
            // Log-spaced theta grid reaches the small-epsilon regime.
            let positive = (0..4000).any(|i| {
                let theta = 10f64.powf(-4.0 + 4.5 * i as f64 / 4000.0);
                theta < std::f64::consts::PI && ch_lhs_analytic(theta, &m).unwrap() > 0.0
            });
            assert_eq!(positive, gap > 0.0, "ea={ea} eb={eb}");
        }
    }
}
