//! Transfer matrices of the elementary optical devices.
//!
//! An MZI is the chain BS1 -> PS1(theta) -> BS2 -> PS2(phi) on a pair of
//! rails, with both beam splitters fixed 50:50 devices:
//!
//! ```text
//! U_BS  = (sqrt(2)/2) [[1, i], [i, 1]]
//! U_PS  = [[e^{i theta}, 0], [0, 1]]
//! U_MZI = (1/2) [[e^{i phi}(e^{i theta} - 1),  i e^{i phi}(1 + e^{i theta})],
//!                [i (e^{i theta} + 1),         1 - e^{i theta}]]
//! ```
//!
//! `theta` is the internal phase (PS1, between the beam splitters) and `phi`
//! the external phase (PS2, after the second beam splitter). The phase
//! shifters act on the upper rail of the pair.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::field::{CMatrix, UnitaryMatrix};

/// Wrap an angle into [0, 2*pi).
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y == TAU {
        0.0
    } else {
        y
    }
}

/// One MZI's two phases plus its mode-pair placement (`top`, `top + 1`).
///
/// Phases are stored wrapped into [0, 2*pi). The identity setting is
/// (theta, phi) = (pi, pi).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MziParams {
    theta: f64,
    phi: f64,
    top: usize,
}

impl MziParams {
    pub fn new(theta: f64, phi: f64, top: usize) -> Self {
        Self { theta: wrap_phase(theta), phi: wrap_phase(phi), top }
    }

    /// The identity MZI on the given pair.
    pub fn identity(top: usize) -> Self {
        Self::new(PI, PI, top)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn set_theta(&mut self, theta: f64) {
        self.theta = wrap_phase(theta);
    }

    pub fn set_phi(&mut self, phi: f64) {
        self.phi = wrap_phase(phi);
    }

    /// The 2x2 transfer matrix for these phases.
    pub fn unitary(&self) -> UnitaryMatrix {
        mzi_unitary(self.theta, self.phi)
    }
}

/// The symmetric 50:50 beam splitter (sqrt(2)/2) [[1, i], [i, 1]].
pub fn beam_splitter() -> UnitaryMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = CMatrix::from_rows(vec![
        vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        vec![Complex64::new(0.0, s), Complex64::new(s, 0.0)],
    ])
    .expect("static 2x2");
    UnitaryMatrix::new_unchecked(m, 1e-12)
}

/// The phase shifter diag(e^{i theta}, 1) acting on the upper rail.
pub fn phase_shifter(theta: f64) -> UnitaryMatrix {
    let m = CMatrix::from_rows(vec![
        vec![Complex64::from_polar(1.0, theta), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ])
    .expect("static 2x2");
    UnitaryMatrix::new_unchecked(m, 1e-12)
}

/// The Hermitian generator G = diag(1, 0) of the phase shifter,
/// `U_PS(theta) = e^{i theta G}`. G is idempotent with eigenvalues {0, 1}.
pub fn phase_shifter_generator() -> CMatrix {
    CMatrix::from_rows(vec![
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
    ])
    .expect("static 2x2")
}

/// Closed-form MZI transfer matrix.
pub fn mzi_unitary(theta: f64, phi: f64) -> UnitaryMatrix {
    let et = Complex64::from_polar(1.0, theta);
    let ep = Complex64::from_polar(1.0, phi);
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let m = CMatrix::from_rows(vec![
        vec![half * ep * (et - one), half * i * ep * (one + et)],
        vec![half * i * (et + one), half * (one - et)],
    ])
    .expect("static 2x2");
    UnitaryMatrix::new_unchecked(m, 1e-12)
}

/// MZI transfer matrix as the explicit component product
/// `U_PS2(theta2) * U_BS * U_PS1(theta1) * U_BS`.
///
/// Identical to [`mzi_unitary`] with theta = theta1, phi = theta2.
pub fn mzi_from_components(theta1: f64, theta2: f64) -> UnitaryMatrix {
    let bs = beam_splitter();
    let prod = phase_shifter(theta2)
        .mul(bs.matrix())
        .and_then(|m| m.mul(phase_shifter(theta1).matrix()))
        .and_then(|m| m.mul(bs.matrix()))
        .expect("2x2 chain");
    UnitaryMatrix::new_unchecked(prod, 1e-12)
}

/// Two-point shift rule constants for a gate generated by a Hermitian
/// operator with two eigenvalues: `r = (a/2)(e1 - e0)`, `s = (e1 + e0)/2`,
/// and shift `pi / (4r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftRuleSpec {
    pub a: f64,
    pub e0: f64,
    pub e1: f64,
    pub r: f64,
    pub s: f64,
    pub shift: f64,
}

impl ShiftRuleSpec {
    pub fn new(a: f64, e0: f64, e1: f64) -> Result<Self> {
        let r = (a / 2.0) * (e1 - e0);
        if r == 0.0 {
            return Err(Error::InvalidArgument("shift rule requires r != 0".into()));
        }
        Ok(Self { a, e0, e1, r, s: (e1 + e0) / 2.0, shift: PI / (4.0 * r) })
    }
}

/// Shift rule constants for the optical phase shifter: `U_PS = e^{-i a theta G}`
/// with a = -1 and G eigenvalues {0, 1}, giving r = -1/2 and |shift| = pi/2.
///
/// The negative r folds into the evaluation order, so the evaluated rule
/// equals (1/2)[f(theta + pi/2) - f(theta - pi/2)].
pub fn phase_shift_rule_spec() -> ShiftRuleSpec {
    ShiftRuleSpec::new(-1.0, 0.0, 1.0).expect("r = -1/2")
}
