//! Exact membership test for the local polytope.
//!
//! A local model is a mixture of the 81 deterministic strategies that assign
//! one of `{+1, -1, no-click}` to each of the four settings. [`is_local`]
//! computes the max-norm distance from a behavior to their convex hull by
//! solving
//!
//! ```text
//! max  c.p - z   s.t.  c.v_i <= z  (all vertices i),  |c|_1 <= 1
//! ```
//!
//! whose optimum equals `min_w |p - V w|_inf`. The optimal `(c, z)` is a
//! separating functional and the multipliers of the vertex rows are mixture
//! weights, so one solve yields either certificate. Both are re-verified by
//! direct arithmetic before being returned.

pub mod simplex;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::detector::{apply_channels, Behavior, DetectorModel, Outcome, OutcomeMatrix, SettingPair};
use crate::error::{Error, Result};
use crate::qstate::Setting;

pub const STRATEGY_COUNT: usize = 81;
pub const ENTRY_COUNT: usize = 36;
/// Tolerance used when re-checking certificates returned by the solver.
pub const CERTIFICATE_TOL: f64 = 1e-8;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    /// Outcomes for `(A, a)`.
    pub atom: [Outcome; 2],
    /// Outcomes for `(B, b)`.
    pub photon: [Outcome; 2],
}

impl DeterministicStrategy {
    pub fn from_index(i: usize) -> Self {
        let o = |k: usize| Outcome::ALL[k % 3];
        Self { atom: [o(i / 27), o(i / 9)], photon: [o(i / 3), o(i)] }
    }

    pub fn index(&self) -> usize {
        27 * self.atom[0].index() + 9 * self.atom[1].index() + 3 * self.photon[0].index() + self.photon[1].index()
    }

    fn outcome_atom(&self, s: Setting) -> Outcome {
        self.atom[s.index()]
    }

    fn outcome_photon(&self, s: Setting) -> Outcome {
        self.photon[s.index()]
    }

    pub fn tables(&self) -> [OutcomeMatrix; 4] {
        let mut t = [[[0.0; 3]; 3]; 4];
        for pair in SettingPair::ALL {
            let x = self.outcome_atom(pair.atom).index();
            let y = self.outcome_photon(pair.photon).index();
            t[pair.index()][x][y] = 1.0;
        }
        t
    }

    pub fn behavior(&self) -> Behavior {
        Behavior::new(self.tables(), Some(DetectorModel::ideal())).expect("0/1 tables are valid")
    }
}

/// All 81 strategies in lexicographic `(atom map, photon map)` order with
/// their induced behaviors.
pub fn enumerate_strategies() -> Vec<(DeterministicStrategy, Behavior)> {
    (0..STRATEGY_COUNT)
        .map(|i| {
            let s = DeterministicStrategy::from_index(i);
            (s, s.behavior())
        })
        .collect()
}

fn vertices() -> &'static [[f64; ENTRY_COUNT]] {
    static V: OnceLock<Vec<[f64; ENTRY_COUNT]>> = OnceLock::new();
    V.get_or_init(|| {
        (0..STRATEGY_COUNT)
            .map(|i| {
                let mut v = [0.0; ENTRY_COUNT];
                for (k, x) in DeterministicStrategy::from_index(i).tables().iter().flatten().flatten().enumerate() {
                    v[k] = *x;
                }
                v
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// Weights over the 81 strategies reproducing the behavior.
    Mixture(Vec<f64>),
    /// `functional . p - offset = gap > 0` while `functional . v <= offset`
    /// for every vertex `v`; `|functional|_1 <= 1`.
    Separator { functional: Vec<f64>, offset: f64, gap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityVerdict {
    pub is_local: bool,
    pub certificate: Certificate,
    /// Max-norm distance to the local polytope; the behavior is local iff
    /// this does not exceed the tolerance.
    pub slack: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_local(behavior: &Behavior, tol: f64) -> Result<LocalityVerdict> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be finite and >= 0, got {tol}")));
    }
    let p = behavior.flatten();
    let verts = vertices();

    // columns: c+ (36), c- (36), z+, z-
    let n = 2 * ENTRY_COUNT + 2;
    let mut obj = vec![0.0; n];
    for k in 0..ENTRY_COUNT {
        obj[k] = p[k];
        obj[ENTRY_COUNT + k] = -p[k];
    }
    obj[n - 2] = -1.0;
    obj[n - 1] = 1.0;
    let mut rows = Vec::with_capacity(STRATEGY_COUNT + 1);
    for v in verts {
        let mut row = vec![0.0; n];
        for k in 0..ENTRY_COUNT {
            row[k] = v[k];
            row[ENTRY_COUNT + k] = -v[k];
        }
        row[n - 2] = -1.0;
        row[n - 1] = 1.0;
        rows.push(row);
    }
    let mut norm_row = vec![1.0; n];
    norm_row[n - 2] = 0.0;
    norm_row[n - 1] = 0.0;
    rows.push(norm_row);
    let mut rhs = vec![0.0; STRATEGY_COUNT + 1];
    rhs[STRATEGY_COUNT] = 1.0;

    let sol = simplex::maximize(&obj, &rows, &rhs, 20_000).map_err(|e| Error::Numerical(e.to_string()))?;
    let distance = sol.value.max(0.0);

    if distance <= tol {
        let mut weights = sol.duals[..STRATEGY_COUNT].to_vec();
        for w in &mut weights {
            if *w < -CERTIFICATE_TOL {
                return Err(Error::Numerical(format!("negative mixture weight {w}")));
            }
            *w = w.max(0.0);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("mixture weights sum to {total}")));
        }
        let recon = reconstruction_error(&weights, &p);
        if recon > tol.max(distance) + CERTIFICATE_TOL {
            return Err(Error::Numerical(format!("mixture reproduces behavior only to {recon:e}")));
        }
        Ok(LocalityVerdict { is_local: true, certificate: Certificate::Mixture(weights), slack: distance })
    } else {
        let functional: Vec<f64> = (0..ENTRY_COUNT).map(|k| sol.x[k] - sol.x[ENTRY_COUNT + k]).collect();
        let l1: f64 = functional.iter().map(|c| c.abs()).sum();
        let offset = verts.iter().map(|v| dot(&functional, v)).fold(f64::NEG_INFINITY, f64::max);
        let gap = dot(&functional, &p) - offset;
        if l1 > 1.0 + 1e-9 || gap <= 0.0 || gap < distance - CERTIFICATE_TOL {
            return Err(Error::Numerical(format!(
                "separating functional does not verify: gap {gap:e}, lp value {distance:e}, |c|_1 {l1}"
            )));
        }
        Ok(LocalityVerdict {
            is_local: false,
            certificate: Certificate::Separator { functional, offset, gap },
            slack: distance,
        })
    }
}

/// `max_k |p_k - sum_i w_i v_ik|`.
pub fn reconstruction_error(weights: &[f64], p: &[f64; ENTRY_COUNT]) -> f64 {
    let mut mix = [0.0; ENTRY_COUNT];
    for (w, v) in weights.iter().zip(vertices()) {
        for k in 0..ENTRY_COUNT {
            mix[k] += w * v[k];
        }
    }
    mix.iter().zip(p).map(|(m, x)| (m - x).abs()).fold(0.0, f64::max)
}

/// Behavior of a local mixture seen through lossy, noisy detectors.
/// Detector losses only act on clicks; a strategy's no-click stays no-click.
pub fn lhv_simulate(weights: &[f64], model: &DetectorModel) -> Result<Behavior> {
    if weights.len() != STRATEGY_COUNT {
        return Err(Error::BadWeights(format!("expected {STRATEGY_COUNT} weights, got {}", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::BadWeights(format!("weight {w} is negative or non-finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let mut mix = [[[0.0; 3]; 3]; 4];
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let t = DeterministicStrategy::from_index(i).tables();
        for (m, tt) in mix.iter_mut().zip(&t) {
            for (r, tr) in m.iter_mut().zip(tt) {
                for (c, x) in r.iter_mut().zip(tr) {
                    *c += w * x;
                }
            }
        }
    }
    let ca = DetectorModel::side_channel(model.eta_a(), model.beta());
    let cb = DetectorModel::side_channel(model.eta_b(), model.beta());
    let tables = mix.map(|m| apply_channels(&m, &ca, &cb));
    Behavior::new(tables, Some(*model))
}
