//! Leggett-Garg quantities for three, four and n measurements.
//!
//! The first measurement coincides with state preparation and is fixed to
//! +1, so `⟨I_1 I_m⟩ = ⟨I_m⟩`. For the four-measurement test the correlator
//! `⟨I_C I_D⟩` is never an independent input: it is always rebuilt from the
//! post-selection probabilities and the post-selected weak values of `I_C`.
//!
//! Macrorealist bounds of a linear functional over joint distributions are
//! attained at deterministic ±1 assignments, so enumerating those vertices
//! gives the exact extrema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{
    expectation, observable_from_angle, sequential_weak_value, state_from_angle, transition_prob,
    weak_value, DichotomicObservable, QubitState, POSTSELECTION_CUTOFF,
};

/// Values beyond a bound by more than this count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Largest n accepted by the brute-force enumeration.
pub const MAX_ENUMERATION: usize = 20;

const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "neg")]
    NegativeViolation,
    #[serde(rename = "none")]
    NoViolation,
    #[serde(rename = "pos")]
    PositiveViolation,
}

impl Classification {
    pub fn of(value: f64, lower: f64, upper: f64) -> Self {
        if value > upper + VIOLATION_TOL {
            Classification::PositiveViolation
        } else if value < lower - VIOLATION_TOL {
            Classification::NegativeViolation
        } else {
            Classification::NoViolation
        }
    }

    /// Short label used in CSV tables.
    pub fn label(&self) -> &'static str {
        match self {
            Classification::NegativeViolation => "neg",
            Classification::NoViolation => "none",
            Classification::PositiveViolation => "pos",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "neg" => Some(Classification::NegativeViolation),
            "none" => Some(Classification::NoViolation),
            "pos" => Some(Classification::PositiveViolation),
            _ => None,
        }
    }

    pub fn is_violation(&self) -> bool {
        *self != Classification::NoViolation
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgVerdict {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub classification: Classification,
}

impl LgVerdict {
    pub fn new(value: f64, lower_bound: f64, upper_bound: f64) -> Self {
        Self {
            value,
            lower_bound,
            upper_bound,
            classification: Classification::of(value, lower_bound, upper_bound),
        }
    }
}

/// Every quantity entering the four-measurement test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    /// ⟨I_B⟩
    pub exp_b: f64,
    /// ⟨I_C⟩
    pub exp_c: f64,
    /// ⟨I_B I_C⟩
    pub corr_bc: f64,
    /// ⟨I_D⟩
    pub exp_d: f64,
    /// p_D(+1)
    pub p_d_plus: f64,
    /// p_D(−1)
    pub p_d_minus: f64,
    /// Post-selected value of I_C given I_D = +1.
    pub wv_c_plus: f64,
    /// Post-selected value of I_C given I_D = −1.
    pub wv_c_minus: f64,
}

impl CorrelatorSet {
    /// `⟨I_C I_D⟩ = p_D(1)·₁⟨I_C⟩ − p_D(−1)·₋₁⟨I_C⟩`.
    pub fn corr_cd(&self) -> f64 {
        self.p_d_plus * self.wv_c_plus - self.p_d_minus * self.wv_c_minus
    }

    /// Checks the probability and aggregation identities.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (
                self.p_d_plus + self.p_d_minus - 1.0,
                "p_d_plus + p_d_minus = 1",
            ),
            (
                self.exp_d - (self.p_d_plus - self.p_d_minus),
                "exp_d = p_d_plus - p_d_minus",
            ),
            (
                self.p_d_plus * self.wv_c_plus + self.p_d_minus * self.wv_c_minus - self.exp_c,
                "p_d_plus*wv_c_plus + p_d_minus*wv_c_minus = exp_c",
            ),
        ];
        for (residual, what) in checks {
            if !residual.is_finite() || residual.abs() > IDENTITY_TOL {
                return Err(Error::InvalidInput(format!(
                    "correlator set violates {what} (residual {residual:e})"
                )));
            }
        }
        Ok(())
    }

    pub fn anomalous_plus(&self) -> bool {
        self.wv_c_plus.abs() > 1.0
    }

    pub fn anomalous_minus(&self) -> bool {
        self.wv_c_minus.abs() > 1.0
    }
}

/// Observables and states of the four-measurement arrangement.
#[derive(Debug, Clone, Copy)]
pub struct B4Setup {
    pub psi_a: QubitState,
    pub psi_d: QubitState,
    pub psi_d_perp: QubitState,
    pub obs_b: DichotomicObservable,
    pub obs_c: DichotomicObservable,
    pub obs_d: DichotomicObservable,
}

impl B4Setup {
    /// Angles in radians: preparation `alpha`, `I_B` axis `gamma`, final
    /// post-selection axis `delta`. `I_C` is the H/V observable.
    pub fn new(alpha: f64, gamma: f64, delta: f64) -> Self {
        Self {
            psi_a: state_from_angle(alpha),
            psi_d: state_from_angle(delta),
            psi_d_perp: QubitState::orthogonal_to_angle(delta),
            obs_b: observable_from_angle(gamma),
            obs_c: DichotomicObservable::z(),
            obs_d: observable_from_angle(delta),
        }
    }
}

pub fn correlators_b4(alpha: f64, gamma: f64, delta: f64) -> Result<CorrelatorSet> {
    let s = B4Setup::new(alpha, gamma, delta);
    let wv_plus = weak_value(&s.obs_c, &s.psi_a, &s.psi_d)?;
    let wv_minus = weak_value(&s.obs_c, &s.psi_a, &s.psi_d_perp)?;
    let p_d_plus = transition_prob(&s.psi_a, &s.psi_d);
    let p_d_minus = transition_prob(&s.psi_a, &s.psi_d_perp);
    Ok(CorrelatorSet {
        exp_b: expectation(&s.obs_b, &s.psi_a),
        exp_c: expectation(&s.obs_c, &s.psi_a),
        corr_bc: sequential_weak_value(&s.obs_c, &s.obs_b, &s.psi_a, &s.psi_a)?.re,
        exp_d: p_d_plus - p_d_minus,
        p_d_plus,
        p_d_minus,
        wv_c_plus: wv_plus.re,
        wv_c_minus: wv_minus.re,
    })
}

/// B4 from unconditioned two-time correlators only. Defined for every
/// angle triple, including those where a post-selection branch is empty.
pub fn b4_unconditioned(alpha: f64, gamma: f64, delta: f64) -> f64 {
    let s = B4Setup::new(alpha, gamma, delta);
    let a = &s.psi_a;
    let corr = |late: &DichotomicObservable, early: &DichotomicObservable| {
        sequential_weak_value(late, early, a, a)
            .expect("pre = post is never singular")
            .re
    };
    expectation(&s.obs_b, a) + corr(&s.obs_c, &s.obs_b) + corr(&s.obs_d, &s.obs_c)
        - expectation(&s.obs_d, a)
}

/// `cos2(α−γ) + cos2γ + cos2δ − cos2(δ−α)` for linear polarizations.
pub fn b4_closed_form(alpha: f64, gamma: f64, delta: f64) -> f64 {
    (2.0 * (alpha - gamma)).cos() + (2.0 * gamma).cos() + (2.0 * delta).cos()
        - (2.0 * (delta - alpha)).cos()
}

pub fn b3_value(exp_b: f64, exp_c: f64, corr_bc: f64) -> LgVerdict {
    LgVerdict::new(exp_b + corr_bc - exp_c, -3.0, 1.0)
}

/// `1 + 2 p_C(1) (₁⟨I_B⟩ − 1)`.
pub fn b3_postselected_form(exp_b_ps_plus: f64, p_c_plus: f64) -> f64 {
    1.0 + 2.0 * p_c_plus * (exp_b_ps_plus - 1.0)
}

/// Quantum inputs of the three-measurement test where `I_C` is the final
/// projective measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B3Inputs {
    pub exp_b: f64,
    pub exp_c: f64,
    pub corr_bc: f64,
    pub p_c_plus: f64,
    /// Post-selected value of I_B given I_C = +1.
    pub wv_b_plus: f64,
}

/// Preparation at `alpha`, weak `I_B` along `gamma`, final `I_C` along
/// `c_angle` (radians).
pub fn correlators_b3(alpha: f64, gamma: f64, c_angle: f64) -> Result<B3Inputs> {
    let psi = state_from_angle(alpha);
    let obs_b = observable_from_angle(gamma);
    let obs_c = observable_from_angle(c_angle);
    let c_plus = obs_c.eigenstate(1);
    Ok(B3Inputs {
        exp_b: expectation(&obs_b, &psi),
        exp_c: expectation(&obs_c, &psi),
        corr_bc: sequential_weak_value(&obs_c, &obs_b, &psi, &psi)?.re,
        p_c_plus: transition_prob(&psi, &c_plus),
        wv_b_plus: weak_value(&obs_b, &psi, &c_plus)?.re,
    })
}

pub fn b4_value(set: &CorrelatorSet) -> LgVerdict {
    LgVerdict::new(
        set.exp_b + set.corr_bc + set.corr_cd() - set.exp_d,
        -2.0,
        2.0,
    )
}

/// `⟨I_B⟩ + ⟨I_B I_C⟩ + p_D(1)[₁⟨I_C⟩ − 1] − p_D(−1)[₋₁⟨I_C⟩ − 1]`.
pub fn b4_postselected_form(set: &CorrelatorSet) -> f64 {
    set.exp_b + set.corr_bc + set.p_d_plus * (set.wv_c_plus - 1.0)
        - set.p_d_minus * (set.wv_c_minus - 1.0)
}

fn check_branch_probability(p: f64) -> Result<()> {
    if p <= POSTSELECTION_CUTOFF {
        return Err(Error::PostSelectionSingular {
            probability: p,
            cutoff: POSTSELECTION_CUTOFF,
        });
    }
    Ok(())
}

/// `(3 − M) / (2 p_D(−1))` with `M = ⟨I_B⟩ + ⟨I_B I_C⟩ + ⟨I_C⟩`.
///
/// B4 exceeds +2 exactly when the minus-branch deficit `1 − ₋₁⟨I_C⟩` exceeds
/// this value. A threshold above 2 therefore forces `₋₁⟨I_C⟩ < −1`.
pub fn anomaly_threshold(exp_b: f64, corr_bc: f64, exp_c: f64, p_d_minus: f64) -> Result<f64> {
    check_branch_probability(p_d_minus)?;
    Ok((3.0 - (exp_b + corr_bc + exp_c)) / (2.0 * p_d_minus))
}

/// `1 + (1 + M) / (2 p_D(−1))`: B4 falls below −2 exactly when `₋₁⟨I_C⟩`
/// exceeds this value.
pub fn negative_violation_threshold(
    exp_b: f64,
    corr_bc: f64,
    exp_c: f64,
    p_d_minus: f64,
) -> Result<f64> {
    check_branch_probability(p_d_minus)?;
    Ok(1.0 + (1.0 + exp_b + corr_bc + exp_c) / (2.0 * p_d_minus))
}

/// Post-selected values of `I_B`, `I_B I_C` and `I_C` within one branch of
/// the final measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchValues {
    pub probability: f64,
    pub b: f64,
    pub bc: f64,
    pub c: f64,
}

impl BranchValues {
    /// All three values inside [−1, 1].
    pub fn in_range(&self) -> bool {
        [self.b, self.bc, self.c]
            .iter()
            .all(|v| v.abs() <= 1.0 + VIOLATION_TOL)
    }

    /// The triple is reproducible by a joint distribution of ±1 values for
    /// `I_B` and `I_C`: each vertex weight `(1 + s b + t c + s t bc)/4` is
    /// non-negative.
    pub fn is_macrorealist(&self) -> bool {
        [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .all(|&(s, t)| 1.0 + s * self.b + t * self.c + s * t * self.bc >= -VIOLATION_TOL)
    }
}

/// Both branches of the final `I_D` measurement, `[+1, −1]`. A branch with
/// singular post-selection is `None`.
pub fn postselected_branches(alpha: f64, gamma: f64, delta: f64) -> [Option<BranchValues>; 2] {
    let s = B4Setup::new(alpha, gamma, delta);
    [s.psi_d, s.psi_d_perp].map(|post| {
        let b = weak_value(&s.obs_b, &s.psi_a, &post).ok()?;
        let bc = sequential_weak_value(&s.obs_c, &s.obs_b, &s.psi_a, &post).ok()?;
        let c = weak_value(&s.obs_c, &s.psi_a, &post).ok()?;
        Some(BranchValues {
            probability: transition_prob(&s.psi_a, &post),
            b: b.re,
            bc: bc.re,
            c: c.re,
        })
    })
}

/// Two-time correlators of an n-measurement sequence with `I_1 ≡ +1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorChain {
    nearest: Vec<f64>,
    endpoint: f64,
}

impl CorrelatorChain {
    /// `nearest[m]` is `⟨I_{m+1} I_{m+2}⟩` (zero-based), `endpoint` is
    /// `⟨I_1 I_n⟩`.
    pub fn new(nearest: Vec<f64>, endpoint: f64) -> Result<Self> {
        let n = nearest.len() + 1;
        if n < 3 {
            return Err(Error::ChainTooShort(n));
        }
        if let Some(bad) = nearest
            .iter()
            .chain(std::iter::once(&endpoint))
            .find(|v| v.is_nan() || v.abs() > 1.0 + 1e-12)
        {
            return Err(Error::InvalidInput(format!(
                "correlator {bad} outside [-1, 1]"
            )));
        }
        Ok(Self { nearest, endpoint })
    }

    /// Chain for a linear-polarization sequence: `angles[0]` prepares the
    /// state, `angles[1..]` are the axes of `I_2 … I_n`. Correlators are the
    /// real parts of sequential weak values with pre = post.
    pub fn from_polarization_angles(angles: &[f64]) -> Result<Self> {
        if angles.len() < 3 {
            return Err(Error::ChainTooShort(angles.len()));
        }
        let psi = state_from_angle(angles[0]);
        let obs: Vec<_> = angles.iter().map(|&t| observable_from_angle(t)).collect();
        let corr = |late: usize, early: usize| -> Result<f64> {
            if early == 0 {
                Ok(expectation(&obs[late], &psi))
            } else {
                Ok(sequential_weak_value(&obs[late], &obs[early], &psi, &psi)?.re)
            }
        };
        let nearest = (1..angles.len())
            .map(|m| corr(m, m - 1))
            .collect::<Result<Vec<_>>>()?;
        let endpoint = corr(angles.len() - 1, 0)?;
        Self::new(nearest, endpoint)
    }

    pub fn n(&self) -> usize {
        self.nearest.len() + 1
    }

    pub fn nearest(&self) -> &[f64] {
        &self.nearest
    }

    pub fn endpoint(&self) -> f64 {
        self.endpoint
    }
}

pub fn bn_bounds(n: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::ChainTooShort(n));
    }
    let upper = (n - 2) as f64;
    let lower = if n % 2 == 1 { -(n as f64) } else { -upper };
    Ok((lower, upper))
}

pub fn bn_value(chain: &CorrelatorChain) -> Result<LgVerdict> {
    let (lo, hi) = bn_bounds(chain.n())?;
    let value = chain.nearest.iter().sum::<f64>() - chain.endpoint;
    Ok(LgVerdict::new(value, lo, hi))
}

fn bn_of_assignment(bits: u32, n: usize) -> i64 {
    let spin = |k: usize| if bits >> k & 1 == 0 { 1i64 } else { -1 };
    let nearest: i64 = (0..n - 1).map(|k| spin(k) * spin(k + 1)).sum();
    nearest - spin(0) * spin(n - 1)
}

fn enumerate(n: usize, fix_first: bool) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::ChainTooShort(n));
    }
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    // bit 0 clear means I_1 = +1
    let (step, count) = if fix_first {
        (2u32, 1u32 << (n - 1))
    } else {
        (1, 1u32 << n)
    };
    let (lo, hi) = (0..count)
        .map(|k| bn_of_assignment(k * step, n))
        .fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok((lo as f64, hi as f64))
}

/// Exact extrema of B_n over deterministic assignments with `I_1 = +1`.
pub fn macrorealist_bounds_bruteforce(n: usize) -> Result<(f64, f64)> {
    enumerate(n, true)
}

/// As [`macrorealist_bounds_bruteforce`] but with `I_1` free as well.
pub fn macrorealist_bounds_bruteforce_unfixed(n: usize) -> Result<(f64, f64)> {
    enumerate(n, false)
}

/// `p_+ (Σ ₊⟨I_m I_{m+1}⟩ + ₊⟨I_{n−1}⟩ − 1) + p_− (Σ ₋⟨I_m I_{m+1}⟩ − ₋⟨I_{n−1}⟩ + 1)`.
///
/// Each term list holds the n−2 post-selected nearest-neighbour correlators
/// followed by the post-selected value of `I_{n−1}`.
pub fn bn_postselected_decomposition(
    chain: &CorrelatorChain,
    p_plus: f64,
    ps_terms_plus: &[f64],
    ps_terms_minus: &[f64],
) -> Result<f64> {
    let expected = chain.n() - 1;
    for terms in [ps_terms_plus, ps_terms_minus] {
        if terms.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: terms.len(),
            });
        }
    }
    if !(0.0..=1.0).contains(&p_plus) {
        return Err(Error::InvalidInput(format!(
            "p_plus {p_plus} outside [0, 1]"
        )));
    }
    let split = |terms: &[f64]| {
        let (corrs, last) = terms.split_at(expected - 1);
        (corrs.iter().sum::<f64>(), last[0])
    };
    let (sum_plus, last_plus) = split(ps_terms_plus);
    let (sum_minus, last_minus) = split(ps_terms_minus);
    Ok(p_plus * (sum_plus + last_plus - 1.0) + (1.0 - p_plus) * (sum_minus - last_minus + 1.0))
}
