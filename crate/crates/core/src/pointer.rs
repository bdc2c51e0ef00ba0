//! Gaussian pointer model of the two walk-off couplings.
//!
//! The transverse profile factorizes as `f(x) f(y)` with
//! `f(u) = (2πσ²)^(−1/4) exp(−u²/(4σ²))`, so `|f|²` has standard deviation σ.
//! A coupling `exp(−i g Î ⊗ P̂)` displaces the pointer by `g·a` on the
//! eigenvalue-`a` branch. After post-selection the pointer wavefunction is
//!
//! ```text
//! ψ(x, y) = Σ_{b,c} A_bc f(x − b g_x) f(y − c g_y)
//! ```
//!
//! and every moment or pixel integral reduces to Gaussian overlaps between
//! pairs of branches. Cross terms are kept exactly, no weak-order expansion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detector::{DetectorGrid, PixelProbabilities};
use crate::error::{Error, Result};
use crate::qubit::{apply, bra_ket, DichotomicObservable, QubitState, POSTSELECTION_CUTOFF};

/// Out-of-grid probability above which pixel integration is refused.
pub const MAX_OUTSIDE_MASS: f64 = 1e-4;

const OUTCOMES: [i8; 2] = [1, -1];

/// Which observable's coupling acts on the photon first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingOrder {
    #[default]
    BFirst,
    CFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerConfig {
    pub sigma: f64,
    pub g_x: f64,
    pub g_y: f64,
    #[serde(default)]
    pub order: CouplingOrder,
}

impl PointerConfig {
    pub fn new(sigma: f64, g_x: f64, g_y: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !(g_x >= 0.0 && g_y >= 0.0 && g_x.is_finite() && g_y.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "couplings must be non-negative, got g_x = {g_x}, g_y = {g_y}"
            )));
        }
        Ok(Self {
            sigma,
            g_x,
            g_y,
            order: CouplingOrder::BFirst,
        })
    }

    /// Unit-width pointer with `g_x = g_y = ratio·σ`.
    pub fn with_ratio(ratio: f64) -> Result<Self> {
        Self::new(1.0, ratio, ratio)
    }

    pub fn with_order(mut self, order: CouplingOrder) -> Self {
        self.order = order;
        self
    }

    /// `(g_x/σ, g_y/σ)`.
    pub fn weakness(&self) -> (f64, f64) {
        (self.g_x / self.sigma, self.g_y / self.sigma)
    }
}

/// Post-selected pointer state as a four-term Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureAmplitude {
    /// `coeffs[i][j]` belongs to `b = OUTCOMES[i]`, `c = OUTCOMES[j]`.
    pub coeffs: [[Complex64; 2]; 2],
    pub g_x: f64,
    pub g_y: f64,
    pub sigma: f64,
}

/// Moments of the normalized post-selected intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    /// `E[xy]`, not the central covariance.
    pub mean_xy: f64,
    /// Post-selection probability.
    pub prob: f64,
}

/// `∫ f(u − a) f(u − a') du`.
pub fn gaussian_overlap(a: f64, a2: f64, sigma: f64) -> f64 {
    (-(a - a2).powi(2) / (8.0 * sigma * sigma)).exp()
}

pub fn postselected_amplitude(
    pre: &QubitState,
    obs_b: &DichotomicObservable,
    obs_c: &DichotomicObservable,
    post: &QubitState,
    cfg: &PointerConfig,
) -> Result<MixtureAmplitude> {
    let mut coeffs = [[Complex64::new(0.0, 0.0); 2]; 2];
    let ket = pre.amplitudes();
    for (i, &b) in OUTCOMES.iter().enumerate() {
        for (j, &c) in OUTCOMES.iter().enumerate() {
            let (pb, pc) = (obs_b.projector(b), obs_c.projector(c));
            let out = match cfg.order {
                CouplingOrder::BFirst => apply(&pc, &apply(&pb, &ket)),
                CouplingOrder::CFirst => apply(&pb, &apply(&pc, &ket)),
            };
            coeffs[i][j] = bra_ket(post, &out);
        }
    }
    let amp = MixtureAmplitude {
        coeffs,
        g_x: cfg.g_x,
        g_y: cfg.g_y,
        sigma: cfg.sigma,
    };
    let probability = amp.probability();
    if probability <= POSTSELECTION_CUTOFF {
        return Err(Error::PostSelectionSingular {
            probability,
            cutoff: POSTSELECTION_CUTOFF,
        });
    }
    Ok(amp)
}

impl MixtureAmplitude {
    fn shift_x(&self, i: usize) -> f64 {
        OUTCOMES[i] as f64 * self.g_x
    }

    fn shift_y(&self, j: usize) -> f64 {
        OUTCOMES[j] as f64 * self.g_y
    }

    /// Visits every ordered pair of branches with the real weight
    /// `Re(A_bc conj(A_b'c')) · overlap_x · overlap_y` and the midpoints of the
    /// two displaced Gaussians.
    fn for_each_pair(&self, mut visit: impl FnMut(f64, f64, f64, [usize; 4])) {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let w = (self.coeffs[i][j] * self.coeffs[k][l].conj()).re;
                        if w == 0.0 {
                            continue;
                        }
                        let (xa, xb) = (self.shift_x(i), self.shift_x(k));
                        let (ya, yb) = (self.shift_y(j), self.shift_y(l));
                        let w = w
                            * gaussian_overlap(xa, xb, self.sigma)
                            * gaussian_overlap(ya, yb, self.sigma);
                        visit(w, 0.5 * (xa + xb), 0.5 * (ya + yb), [i, j, k, l]);
                    }
                }
            }
        }
    }

    /// `∫∫ |ψ(x, y)|²`.
    pub fn probability(&self) -> f64 {
        let mut p = 0.0;
        self.for_each_pair(|w, _, _, _| p += w);
        p
    }

    /// `(E[x²], E[y²])` of the normalized intensity.
    pub fn second_moments(&self) -> (f64, f64) {
        let s2 = self.sigma * self.sigma;
        let (mut p, mut xx, mut yy) = (0.0, 0.0, 0.0);
        self.for_each_pair(|w, mx, my, _| {
            p += w;
            xx += w * (s2 + mx * mx);
            yy += w * (s2 + my * my);
        });
        (xx / p, yy / p)
    }

    /// Per-pixel probability of the normalized intensity.
    pub fn pixel_probabilities(&self, grid: &DetectorGrid) -> Result<PixelProbabilities> {
        pixel_probabilities(self, grid)
    }
}

pub fn exact_moments(amp: &MixtureAmplitude) -> PointerMoments {
    let (mut p, mut x, mut y, mut xy) = (0.0, 0.0, 0.0, 0.0);
    amp.for_each_pair(|w, mx, my, _| {
        p += w;
        x += w * mx;
        y += w * my;
        xy += w * mx * my;
    });
    PointerMoments {
        mean_x: x / p,
        mean_y: y / p,
        mean_xy: xy / p,
        prob: p,
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Integrals of a unit-mass Gaussian (std σ, centre `mean`) over each bin.
fn bin_masses(edges: &[f64], mean: f64, sigma: f64) -> Vec<f64> {
    let cdf: Vec<f64> = edges
        .iter()
        .map(|&e| std_normal_cdf((e - mean) / sigma))
        .collect();
    cdf.windows(2).map(|w| w[1] - w[0]).collect()
}

pub fn pixel_probabilities(
    amp: &MixtureAmplitude,
    grid: &DetectorGrid,
) -> Result<PixelProbabilities> {
    let (edges_x, edges_y) = (grid.edges_x(), grid.edges_y());
    let (nx, ny) = (grid.n_x, grid.n_y);
    // each product f(u − a) f(u − a') is the overlap times a normal density
    // of std σ centred at (a + a')/2
    let mut probs = vec![0.0; nx * ny];
    let mut total = 0.0;
    amp.for_each_pair(|w, mx, my, _| {
        total += w;
        let bx = bin_masses(&edges_x, mx, amp.sigma);
        let by = bin_masses(&edges_y, my, amp.sigma);
        for (row, &py) in by.iter().enumerate() {
            for (col, &px) in bx.iter().enumerate() {
                probs[row * nx + col] += w * px * py;
            }
        }
    });
    for p in &mut probs {
        *p = (*p / total).max(0.0);
    }
    let inside: f64 = probs.iter().sum();
    let outside_mass = (1.0 - inside).max(0.0);
    if outside_mass > MAX_OUTSIDE_MASS {
        return Err(Error::GridTooSmall { outside_mass });
    }
    Ok(PixelProbabilities::new(*grid, probs, outside_mass))
}
