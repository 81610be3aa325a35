//! Real two-qubit pure states, rotated measurement bases and their lossless
//! outcome statistics.
//!
//! Outcome `+1` on a side means projection onto the rotated `|1'>` vector,
//! `-1` onto `|0'>`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[cfg(test)]
const NORM_TOL: f64 = 1e-12;

/// Normalized real amplitudes in the product basis `|00>, |01>, |10>, |11>`
/// (atom qubit first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amps: [f64; 4],
}

impl PureState {
    /// Normalizes `amps`. Fails on a zero or non-finite vector.
    pub fn from_amplitudes(amps: [f64; 4]) -> Result<Self> {
        if amps.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite amplitude in {amps:?}")));
        }
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-150 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Ok(Self { amps: amps.map(|a| a / norm) })
    }

    pub fn amplitudes(&self) -> [f64; 4] {
        self.amps
    }

    pub fn amp00(&self) -> f64 {
        self.amps[0]
    }
    pub fn amp01(&self) -> f64 {
        self.amps[1]
    }
    pub fn amp10(&self) -> f64 {
        self.amps[2]
    }
    pub fn amp11(&self) -> f64 {
        self.amps[3]
    }

    /// Amplitude `<atom|<photon|psi>` for arbitrary real single-qubit vectors.
    fn project(&self, atom: [f64; 2], photon: [f64; 2]) -> f64 {
        let a = &self.amps;
        atom[0] * (photon[0] * a[0] + photon[1] * a[1])
            + atom[1] * (photon[0] * a[2] + photon[1] * a[3])
    }

    /// Squared Schmidt coefficients `(larger, smaller)`.
    pub fn schmidt_weights(&self) -> (f64, f64) {
        let [a, b, c, d] = self.amps;
        // Eigenvalues of M M^T for M = [[a, b], [c, d]].
        let (p, q, r) = (a * a + b * b, c * c + d * d, a * c + b * d);
        let disc = ((p - q) * (p - q) + 4.0 * r * r).sqrt().min(1.0);
        ((1.0 + disc) / 2.0, (1.0 - disc) / 2.0)
    }

    /// Schmidt angle in `[0, pi/4]`: zero for product states, `pi/4` for
    /// maximally entangled ones.
    pub fn schmidt_angle(&self) -> f64 {
        let (hi, lo) = self.schmidt_weights();
        lo.sqrt().atan2(hi.sqrt())
    }

    /// Largest squared overlap with any product state.
    pub fn product_overlap(&self) -> f64 {
        self.schmidt_weights().0
    }
}

/// Builds `C[(1 - 2cos t)|00> + sin t (|01> + |10>)]`.
///
/// Rejects `|sin t| < 1e-9`, where the state degenerates to a product state.
pub fn make_state(theta: f64) -> Result<PureState> {
    let (s, c) = theta.sin_cos();
    if !theta.is_finite() || s.abs() < 1e-9 {
        return Err(Error::DegenerateState(s.abs()));
    }
    PureState::from_amplitudes([1.0 - 2.0 * c, s, s, 0.0])
}

/// Rotation parameter of one side's measurement basis, kept in `[0, pi)`.
///
/// Adding `pi` to the angle only swaps the outcome labels, so the canonical
/// range loses nothing.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MeasAngle(f64);

impl MeasAngle {
    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::NonFiniteAngle(angle));
        }
        let mut r = angle.rem_euclid(PI);
        if r >= PI {
            r = 0.0;
        }
        Ok(Self(r))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for MeasAngle {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MeasAngle> for f64 {
    fn from(a: MeasAngle) -> f64 {
        a.0
    }
}

/// `(|0'>, |1'>)` with `|0'> = cos|0> - sin|1>` and `|1'> = sin|0> + cos|1>`.
pub fn rotated_basis(angle: MeasAngle) -> ([f64; 2], [f64; 2]) {
    let (s, c) = angle.0.sin_cos();
    ([c, -s], [s, c])
}

/// Which of the two settings a side uses: `A`/`B` are primary, `a`/`b`
/// secondary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    Primary,
    Secondary,
}

impl Setting {
    pub const BOTH: [Setting; 2] = [Setting::Primary, Setting::Secondary];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn atom_label(self) -> &'static str {
        match self {
            Setting::Primary => "A",
            Setting::Secondary => "a",
        }
    }

    pub fn photon_label(self) -> &'static str {
        match self {
            Setting::Primary => "B",
            Setting::Secondary => "b",
        }
    }

    pub fn from_atom_label(s: &str) -> Option<Self> {
        match s {
            "A" => Some(Setting::Primary),
            "a" => Some(Setting::Secondary),
            _ => None,
        }
    }

    pub fn from_photon_label(s: &str) -> Option<Self> {
        match s {
            "B" => Some(Setting::Primary),
            "b" => Some(Setting::Secondary),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingsPair {
    /// `(A, a)`
    pub atom: [MeasAngle; 2],
    /// `(B, b)`
    pub photon: [MeasAngle; 2],
}

impl SettingsPair {
    /// From raw radians in the order `A, a, B, b`.
    pub fn from_radians(angles: [f64; 4]) -> Result<Self> {
        Ok(Self {
            atom: [MeasAngle::new(angles[0])?, MeasAngle::new(angles[1])?],
            photon: [MeasAngle::new(angles[2])?, MeasAngle::new(angles[3])?],
        })
    }

    /// The construction paired with [`make_state`]: `A` and `B` rotated by
    /// `theta`, `a` and `b` in the computational basis.
    pub fn constructed(theta: f64) -> Result<Self> {
        Self::from_radians([theta, 0.0, theta, 0.0])
    }

    /// Angles reaching `S = 2*sqrt(2)` on the maximally entangled state
    /// `make_state(pi/3)`, for which `E(x, y) = -cos(2(x + y))`.
    pub fn chsh_optimal() -> Self {
        let q = PI / 8.0;
        Self::from_radians([0.0, 2.0 * q, 3.0 * q, 5.0 * q]).expect("finite angles")
    }

    pub fn atom_angle(&self, s: Setting) -> MeasAngle {
        self.atom[s.index()]
    }

    pub fn photon_angle(&self, s: Setting) -> MeasAngle {
        self.photon[s.index()]
    }

    /// Angles in the order `A, a, B, b`.
    pub fn radians(&self) -> [f64; 4] {
        [self.atom[0].0, self.atom[1].0, self.photon[0].0, self.photon[1].0]
    }
}

impl fmt::Display for SettingsPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, b0, b1] = self.radians();
        write!(f, "A={a0:.6} a={a1:.6} B={b0:.6} b={b1:.6}")
    }
}

/// Lossless joint distribution for one `(atom angle, photon angle)` pair.
/// `p10` is atom `+1`, photon `-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealJoint {
    pub p11: f64,
    pub p10: f64,
    pub p01: f64,
    pub p00: f64,
}

impl IdealJoint {
    pub fn sum(&self) -> f64 {
        self.p11 + self.p10 + self.p01 + self.p00
    }

    /// As a 2x2 matrix indexed `[atom][photon]` with index 0 = `+1`.
    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.p11, self.p10], [self.p01, self.p00]]
    }
}

pub fn joint_probs(state: &PureState, atom: MeasAngle, photon: MeasAngle) -> IdealJoint {
    let (a0, a1) = rotated_basis(atom);
    let (b0, b1) = rotated_basis(photon);
    let sq = |x: f64| x * x;
    IdealJoint {
        p11: sq(state.project(a1, b1)),
        p10: sq(state.project(a1, b0)),
        p01: sq(state.project(a0, b1)),
        p00: sq(state.project(a0, b0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Atom,
    Photon,
}

/// Probability of `+1` on one side with the partner traced out.
pub fn singles_prob(state: &PureState, angle: MeasAngle, side: Side) -> f64 {
    let (_, one) = rotated_basis(angle);
    let a = &state.amps;
    let (x, y) = match side {
        Side::Atom => (one[0] * a[0] + one[1] * a[2], one[0] * a[1] + one[1] * a[3]),
        Side::Photon => (one[0] * a[0] + one[1] * a[1], one[0] * a[2] + one[1] * a[3]),
    };
    x * x + y * y
}

#[cfg(test)]
fn is_normalized(state: &PureState) -> bool {
    (state.amps.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() <= NORM_TOL
}
