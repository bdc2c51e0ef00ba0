//! Recovering weak averages, weak values and B4 from count frames.
//!
//! Moments use pixel centres weighted by counts. Uncertainties are first
//! order (delta method) with the full covariance of the three sample means;
//! [`bootstrap_se`] resamples photons as a cross-check.

use serde::{Deserialize, Serialize};

use crate::detector::{multinomial, rng_from_seed, CountsGrid, DetectorGrid};
use crate::error::{Error, Result};

pub const MIN_COUNTS: u64 = 100;
pub const MIN_RESAMPLES: usize = 50;

/// A value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub se: f64,
}

impl Measured {
    pub fn new(value: f64, se: f64) -> Self {
        Self { value, se }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, se: 0.0 }
    }
}

impl std::fmt::Display for Measured {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.value, self.se)
    }
}

/// Sample means of x, y and xy over detected photons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_xy: f64,
    pub se_x: f64,
    pub se_y: f64,
    pub se_xy: f64,
    pub n_effective: u64,
    /// Covariance matrix of `(mean_x, mean_y, mean_xy)`.
    pub cov: [[f64; 3]; 3],
}

fn check_counts(total: u64) -> Result<()> {
    if total < MIN_COUNTS {
        return Err(Error::InsufficientCounts {
            total,
            required: MIN_COUNTS,
        });
    }
    Ok(())
}

fn moments_from(counts: &[u64], grid: &DetectorGrid) -> MomentEstimate {
    let n_x = grid.n_x;
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    // first pass: means; second pass: central products to avoid cancellation
    let mut mean = [0.0; 3];
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (x, y) = (grid.center_x(k % n_x), grid.center_y(k / n_x));
        let w = c as f64 / nf;
        mean[0] += w * x;
        mean[1] += w * y;
        mean[2] += w * x * y;
    }
    let mut var = [[0.0; 3]; 3];
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (x, y) = (grid.center_x(k % n_x), grid.center_y(k / n_x));
        let d = [x - mean[0], y - mean[1], x * y - mean[2]];
        let w = c as f64 / nf;
        for i in 0..3 {
            for j in 0..3 {
                var[i][j] += w * d[i] * d[j];
            }
        }
    }
    let cov = var.map(|row| row.map(|v| v / nf));
    MomentEstimate {
        mean_x: mean[0],
        mean_y: mean[1],
        mean_xy: mean[2],
        se_x: cov[0][0].sqrt(),
        se_y: cov[1][1].sqrt(),
        se_xy: cov[2][2].sqrt(),
        n_effective: n,
        cov,
    }
}

pub fn grid_moments(counts: &CountsGrid) -> Result<MomentEstimate> {
    check_counts(counts.total())?;
    Ok(moments_from(counts.counts(), counts.grid()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakAverageEstimate {
    pub i_b: Measured,
    pub i_c: Measured,
    pub i_bc: Measured,
    /// Covariance of `(i_b, i_c, i_bc)`.
    pub cov: [[f64; 3]; 3],
}

impl WeakAverageEstimate {
    /// `(g_x⟨I_B⟩, g_y⟨I_C⟩, g_x g_y (⟨I_B I_C⟩ + ⟨I_B⟩⟨I_C⟩)/2)`.
    pub fn forward_moments(&self, g_x: f64, g_y: f64) -> (f64, f64, f64) {
        let (b, c, bc) = (self.i_b.value, self.i_c.value, self.i_bc.value);
        (g_x * b, g_y * c, 0.5 * g_x * g_y * (bc + b * c))
    }
}

fn check_coupling(g: f64) -> Result<()> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::ZeroCoupling);
    }
    Ok(())
}

pub fn weak_averages(m: &MomentEstimate, g_x: f64, g_y: f64) -> Result<WeakAverageEstimate> {
    check_coupling(g_x)?;
    check_coupling(g_y)?;
    let i_b = m.mean_x / g_x;
    let i_c = m.mean_y / g_y;
    let i_bc = 2.0 * m.mean_xy / (g_x * g_y) - i_b * i_c;
    // Jacobian of (i_b, i_c, i_bc) with respect to (mean_x, mean_y, mean_xy)
    let jac = [
        [1.0 / g_x, 0.0, 0.0],
        [0.0, 1.0 / g_y, 0.0],
        [-i_c / g_x, -i_b / g_y, 2.0 / (g_x * g_y)],
    ];
    let mut cov = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    cov[i][j] += jac[i][k] * m.cov[k][l] * jac[j][l];
                }
            }
        }
    }
    let se = |i: usize| cov[i][i].max(0.0).sqrt();
    Ok(WeakAverageEstimate {
        i_b: Measured::new(i_b, se(0)),
        i_c: Measured::new(i_c, se(1)),
        i_bc: Measured::new(i_bc, se(2)),
        cov,
    })
}

/// Post-selected weak value of `I_C` read from the y pointer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostselectedWeakValue {
    pub value: f64,
    pub se: f64,
    /// Outside [−1, 1] by more than two standard errors.
    pub anomalous: bool,
}

impl PostselectedWeakValue {
    pub fn measured(&self) -> Measured {
        Measured::new(self.value, self.se)
    }
}

pub fn postselected_weak_value(counts: &CountsGrid, g_y: f64) -> Result<PostselectedWeakValue> {
    check_coupling(g_y)?;
    let m = grid_moments(counts)?;
    let value = m.mean_y / g_y;
    let se = m.se_y / g_y;
    Ok(PostselectedWeakValue {
        value,
        se,
        anomalous: value.abs() > 1.0 + 2.0 * se,
    })
}

/// `n_d / (n_d + n_dperp)` with its binomial standard error.
pub fn postselection_fraction(n_d: u64, n_dperp: u64) -> Result<Measured> {
    let n = n_d + n_dperp;
    if n == 0 {
        return Err(Error::InsufficientCounts {
            total: 0,
            required: 1,
        });
    }
    let p = n_d as f64 / n as f64;
    Ok(Measured::new(p, (p * (1.0 - p) / n as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B4Estimate {
    pub value: f64,
    pub se: f64,
    pub run_a: WeakAverageEstimate,
    pub wv_plus: Measured,
    pub wv_minus: Measured,
    pub p_plus: Measured,
    pub n_d: u64,
    pub n_dperp: u64,
}

impl B4Estimate {
    /// `⟨I_B⟩ + ⟨I_B I_C⟩ + [p·wv₊ − (1−p)·wv₋] − [p − (1−p)]` from the
    /// stored components.
    pub fn recompute(&self) -> f64 {
        let p = self.p_plus.value;
        self.run_a.i_b.value + self.run_a.i_bc.value + p * self.wv_plus.value
            - (1.0 - p) * self.wv_minus.value
            - (2.0 * p - 1.0)
    }
}

/// Assembles B4 from the unconditioned run and the two post-selected runs,
/// treated as independent experiments.
pub fn compose_b4(
    run_a: &WeakAverageEstimate,
    wv_plus: Measured,
    wv_minus: Measured,
    n_d: u64,
    n_dperp: u64,
) -> Result<B4Estimate> {
    let p_plus = postselection_fraction(n_d, n_dperp)?;
    Ok(compose_b4_with_fraction(
        run_a, wv_plus, wv_minus, p_plus, n_d, n_dperp,
    ))
}

/// As [`compose_b4`] with an externally supplied `p_D(1)`.
pub fn compose_b4_with_fraction(
    run_a: &WeakAverageEstimate,
    wv_plus: Measured,
    wv_minus: Measured,
    p_plus: Measured,
    n_d: u64,
    n_dperp: u64,
) -> B4Estimate {
    let mut est = B4Estimate {
        value: 0.0,
        se: 0.0,
        run_a: *run_a,
        wv_plus,
        wv_minus,
        p_plus,
        n_d,
        n_dperp,
    };
    est.value = est.recompute();
    let p = p_plus.value;
    let var_a = run_a.cov[0][0] + run_a.cov[2][2] + 2.0 * run_a.cov[0][2];
    let dp = wv_plus.value + wv_minus.value - 2.0;
    let var = var_a.max(0.0)
        + (p * wv_plus.se).powi(2)
        + ((1.0 - p) * wv_minus.se).powi(2)
        + (dp * p_plus.se).powi(2);
    est.se = var.sqrt();
    est
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    MeanX,
    MeanY,
    MeanXy,
}

impl Statistic {
    fn of(&self, m: &MomentEstimate) -> f64 {
        match self {
            Statistic::MeanX => m.mean_x,
            Statistic::MeanY => m.mean_y,
            Statistic::MeanXy => m.mean_xy,
        }
    }

    /// The delta-method standard error of the same statistic.
    pub fn plug_in_se(&self, m: &MomentEstimate) -> f64 {
        match self {
            Statistic::MeanX => m.se_x,
            Statistic::MeanY => m.se_y,
            Statistic::MeanXy => m.se_xy,
        }
    }
}

/// Nonparametric bootstrap over photon records: each resample draws
/// `total` photons from the empirical pixel distribution.
pub fn bootstrap_se(
    counts: &CountsGrid,
    statistic: Statistic,
    resamples: usize,
    seed: u64,
) -> Result<f64> {
    check_counts(counts.total())?;
    if resamples < MIN_RESAMPLES {
        return Err(Error::InvalidInput(format!(
            "bootstrap needs at least {MIN_RESAMPLES} resamples, got {resamples}"
        )));
    }
    let weights: Vec<f64> = counts.counts().iter().map(|&c| c as f64).collect();
    let mut rng = rng_from_seed(seed);
    let values: Vec<f64> = (0..resamples)
        .map(|_| {
            let draw = multinomial(&mut rng, counts.total(), &weights);
            statistic.of(&moments_from(&draw, counts.grid()))
        })
        .collect();
    let mean = values.iter().sum::<f64>() / resamples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    Ok(var.sqrt())
}
