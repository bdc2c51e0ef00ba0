//! Polarization qubit kernel.
//!
//! States live in the {H, V} basis. Dichotomic observables are linear
//! polarization analysers, `cos(2θ) Z + sin(2θ) X`, whose +1 eigenstate is
//! the linear polarization at angle θ. Weak values and sequential weak values
//! are computed exactly from 2×2 matrix algebra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transition probabilities at or below this value are treated as orthogonal
/// pre/post pairs.
pub const POSTSELECTION_CUTOFF: f64 = 1e-10;

const NORM_TOL: f64 = 1e-12;

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Normalized pure polarization state `amp_h |H⟩ + amp_v |V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    amp_h: Complex64,
    amp_v: Complex64,
}

impl QubitState {
    /// Builds a state from raw amplitudes, rejecting non-normalized input.
    pub fn new(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        let norm = amp_h.norm_sqr() + amp_v.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(Self { amp_h, amp_v })
    }

    /// Linear polarization `cos θ |H⟩ + sin θ |V⟩`.
    pub fn from_angle(theta: f64) -> Self {
        Self {
            amp_h: c(theta.cos()),
            amp_v: c(theta.sin()),
        }
    }

    pub fn horizontal() -> Self {
        Self::from_angle(0.0)
    }

    pub fn vertical() -> Self {
        Self::from_angle(std::f64::consts::FRAC_PI_2)
    }

    /// The linear polarization orthogonal to `from_angle(theta)`, with the
    /// sign convention `sin θ |H⟩ − cos θ |V⟩`.
    pub fn orthogonal_to_angle(theta: f64) -> Self {
        Self {
            amp_h: c(theta.sin()),
            amp_v: c(-theta.cos()),
        }
    }

    pub fn amp_h(&self) -> Complex64 {
        self.amp_h
    }

    pub fn amp_v(&self) -> Complex64 {
        self.amp_v
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.amp_h, self.amp_v]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.amp_h.conj() * other.amp_h + self.amp_v.conj() * other.amp_v
    }
}

/// Shorthand for [`QubitState::from_angle`].
pub fn state_from_angle(theta: f64) -> QubitState {
    QubitState::from_angle(theta)
}

/// Two-outcome (±1) linear-polarization observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DichotomicObservable {
    axis_angle: f64,
    matrix: Mat2,
}

impl DichotomicObservable {
    pub fn from_angle(theta: f64) -> Self {
        let (s, co) = (2.0 * theta).sin_cos();
        Self {
            axis_angle: theta,
            matrix: [[c(co), c(s)], [c(s), c(-co)]],
        }
    }

    /// `|H⟩⟨H| − |V⟩⟨V|`.
    pub fn z() -> Self {
        Self::from_angle(0.0)
    }

    pub fn axis_angle(&self) -> f64 {
        self.axis_angle
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Eigenstate with eigenvalue `outcome` (±1).
    pub fn eigenstate(&self, outcome: i8) -> QubitState {
        if outcome >= 0 {
            QubitState::from_angle(self.axis_angle)
        } else {
            QubitState::orthogonal_to_angle(self.axis_angle)
        }
    }

    /// Spectral projector `(1 + outcome·O)/2`.
    pub fn projector(&self, outcome: i8) -> Mat2 {
        let s = if outcome >= 0 { 0.5 } else { -0.5 };
        let m = &self.matrix;
        [
            [c(0.5) + m[0][0] * s, m[0][1] * s],
            [m[1][0] * s, c(0.5) + m[1][1] * s],
        ]
    }

    /// `O |ψ⟩` as raw amplitudes.
    pub fn apply(&self, psi: &QubitState) -> [Complex64; 2] {
        apply(&self.matrix, &psi.amplitudes())
    }
}

pub fn observable_from_angle(theta: f64) -> DichotomicObservable {
    DichotomicObservable::from_angle(theta)
}

pub(crate) fn apply(m: &Mat2, v: &[Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub(crate) fn bra_ket(bra: &QubitState, ket: &[Complex64; 2]) -> Complex64 {
    bra.amp_h.conj() * ket[0] + bra.amp_v.conj() * ket[1]
}

/// Complex weak value. Only the real part enters pointer means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub re: f64,
    pub im: f64,
}

impl WeakValue {
    fn from_complex(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }

    /// Real part outside the eigenvalue range [−1, 1].
    pub fn is_anomalous(&self) -> bool {
        self.re.abs() > 1.0
    }
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(obs: &DichotomicObservable, psi: &QubitState) -> f64 {
    bra_ket(psi, &obs.apply(psi)).re
}

/// `|⟨post|pre⟩|²`.
pub fn transition_prob(pre: &QubitState, post: &QubitState) -> f64 {
    post.inner(pre).norm_sqr()
}

fn checked_overlap(pre: &QubitState, post: &QubitState) -> Result<Complex64> {
    let overlap = post.inner(pre);
    let probability = overlap.norm_sqr();
    if probability <= POSTSELECTION_CUTOFF {
        return Err(Error::PostSelectionSingular {
            probability,
            cutoff: POSTSELECTION_CUTOFF,
        });
    }
    Ok(overlap)
}

/// `⟨post|O|pre⟩ / ⟨post|pre⟩`.
pub fn weak_value(
    obs: &DichotomicObservable,
    pre: &QubitState,
    post: &QubitState,
) -> Result<WeakValue> {
    let overlap = checked_overlap(pre, post)?;
    Ok(WeakValue::from_complex(
        bra_ket(post, &obs.apply(pre)) / overlap,
    ))
}

/// `⟨post| late · early |pre⟩ / ⟨post|pre⟩`; `early` acts first.
pub fn sequential_weak_value(
    late: &DichotomicObservable,
    early: &DichotomicObservable,
    pre: &QubitState,
    post: &QubitState,
) -> Result<WeakValue> {
    let overlap = checked_overlap(pre, post)?;
    let after_early = early.apply(pre);
    let after_late = apply(late.matrix(), &after_early);
    Ok(WeakValue::from_complex(
        bra_ket(post, &after_late) / overlap,
    ))
}
