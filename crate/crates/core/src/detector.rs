//! Pixel detector geometry, photon-count frames and their file format.
//!
//! A frame is stored as a pair of files sharing a stem: `<stem>.csv` holds
//! `n_y` rows of `n_x` comma-separated integer counts (row = y index, column
//! = x index, both ascending), `<stem>.json` holds a [`FrameHeader`].

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorGrid {
    pub n_x: usize,
    pub n_y: usize,
    pub pitch: f64,
    /// Centre of the array in pointer coordinates.
    pub origin_x: f64,
    pub origin_y: f64,
}

impl DetectorGrid {
    pub const DEFAULT_PIXELS: usize = 32;

    pub fn new(n_x: usize, n_y: usize, pitch: f64) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::InvalidInput(
                "detector needs at least one pixel".into(),
            ));
        }
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pixel pitch must be positive, got {pitch}"
            )));
        }
        Ok(Self {
            n_x,
            n_y,
            pitch,
            origin_x: 0.0,
            origin_y: 0.0,
        })
    }

    /// Square `pixels × pixels` array with pitch `pitch_over_sigma · σ`.
    pub fn square(pixels: usize, pitch_over_sigma: f64, sigma: f64) -> Result<Self> {
        Self::new(pixels, pixels, pitch_over_sigma * sigma)
    }

    /// 32×32 pixels spanning ±6σ.
    pub fn default_for(sigma: f64) -> Self {
        let n = Self::DEFAULT_PIXELS;
        Self {
            n_x: n,
            n_y: n,
            pitch: 12.0 * sigma / n as f64,
            origin_x: 0.0,
            origin_y: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Half-widths of the array along x and y.
    pub fn half_span(&self) -> (f64, f64) {
        (
            0.5 * self.n_x as f64 * self.pitch,
            0.5 * self.n_y as f64 * self.pitch,
        )
    }

    /// Whether the array covers `±guard·σ` around the origin on both axes.
    pub fn covers(&self, sigma: f64, guard: f64) -> bool {
        let (hx, hy) = self.half_span();
        hx.min(hy) >= guard * sigma
    }

    fn edges(n: usize, pitch: f64, origin: f64) -> Vec<f64> {
        let start = origin - 0.5 * n as f64 * pitch;
        (0..=n).map(|k| start + k as f64 * pitch).collect()
    }

    pub fn edges_x(&self) -> Vec<f64> {
        Self::edges(self.n_x, self.pitch, self.origin_x)
    }

    pub fn edges_y(&self) -> Vec<f64> {
        Self::edges(self.n_y, self.pitch, self.origin_y)
    }

    pub fn center_x(&self, col: usize) -> f64 {
        self.origin_x + (col as f64 + 0.5 - 0.5 * self.n_x as f64) * self.pitch
    }

    pub fn center_y(&self, row: usize) -> f64 {
        self.origin_y + (row as f64 + 0.5 - 0.5 * self.n_y as f64) * self.pitch
    }
}

/// Per-pixel detection probabilities, row-major (row = y).
#[derive(Debug, Clone, PartialEq)]
pub struct PixelProbabilities {
    grid: DetectorGrid,
    probs: Vec<f64>,
    outside_mass: f64,
}

impl PixelProbabilities {
    pub fn new(grid: DetectorGrid, probs: Vec<f64>, outside_mass: f64) -> Self {
        assert_eq!(
            probs.len(),
            grid.len(),
            "probability matrix does not match grid"
        );
        Self {
            grid,
            probs,
            outside_mass,
        }
    }

    /// Uniform distribution over the pixels.
    pub fn uniform(grid: DetectorGrid) -> Self {
        let p = 1.0 / grid.len() as f64;
        Self::new(grid, vec![p; grid.len()], 0.0)
    }

    pub fn grid(&self) -> &DetectorGrid {
        &self.grid
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[row * self.grid.n_x + col]
    }

    pub fn outside_mass(&self) -> f64 {
        self.outside_mass
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Midpoint-rule `(E[x], E[y], E[xy])` using pixel centres, conditioned
    /// on the photon landing inside the array.
    pub fn moments(&self) -> (f64, f64, f64) {
        let g = &self.grid;
        let (mut p, mut x, mut y, mut xy) = (0.0, 0.0, 0.0, 0.0);
        for row in 0..g.n_y {
            let cy = g.center_y(row);
            for col in 0..g.n_x {
                let cx = g.center_x(col);
                let w = self.get(row, col);
                p += w;
                x += w * cx;
                y += w * cy;
                xy += w * cx * cy;
            }
        }
        (x / p, y / p, xy / p)
    }

    /// Midpoint-rule `(E[x²], E[y²])`.
    pub fn second_moments(&self) -> (f64, f64) {
        let g = &self.grid;
        let (mut p, mut xx, mut yy) = (0.0, 0.0, 0.0);
        for row in 0..g.n_y {
            let cy = g.center_y(row);
            for col in 0..g.n_x {
                let cx = g.center_x(col);
                let w = self.get(row, col);
                p += w;
                xx += w * cx * cx;
                yy += w * cy * cy;
            }
        }
        (xx / p, yy / p)
    }
}

/// Photon counts recorded on a detector array.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsGrid {
    grid: DetectorGrid,
    counts: Vec<u64>,
    /// Heralded photons detected (excludes dark counts).
    pub photons: u64,
    /// Dark counts included in `counts`.
    pub dark_total: u64,
    pub seed: u64,
}

impl CountsGrid {
    pub fn from_counts(
        grid: DetectorGrid,
        counts: Vec<u64>,
        dark_total: u64,
        seed: u64,
    ) -> Result<Self> {
        if counts.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: counts.len(),
            });
        }
        let sum: u64 = counts.iter().sum();
        let photons = sum.checked_sub(dark_total).ok_or_else(|| {
            Error::InvalidInput(format!("dark total {dark_total} exceeds frame sum {sum}"))
        })?;
        Ok(Self {
            grid,
            counts,
            photons,
            dark_total,
            seed,
        })
    }

    pub fn grid(&self) -> &DetectorGrid {
        &self.grid
    }

    pub fn n_x(&self) -> usize {
        self.grid.n_x
    }

    pub fn n_y(&self) -> usize {
        self.grid.n_y
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.n_x() + col]
    }

    /// All recorded counts, dark counts included.
    pub fn total(&self) -> u64 {
        self.photons + self.dark_total
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for task `index` of a run seeded with `base`:
/// `splitmix64(base + (index + 1) · 0x9E3779B97F4A7C15)`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `n` items over categories with weights `probs` (renormalized) by
/// sequential conditional binomials.
pub fn multinomial<R: rand::Rng + ?Sized>(rng: &mut R, n: u64, probs: &[f64]) -> Vec<u64> {
    let mut remaining_mass: f64 = probs.iter().sum();
    let mut remaining = n;
    let mut out = vec![0u64; probs.len()];
    for (slot, &p) in out.iter_mut().zip(probs) {
        if remaining == 0 {
            break;
        }
        if remaining_mass <= 0.0 {
            break;
        }
        let q = (p / remaining_mass).clamp(0.0, 1.0);
        let k = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .expect("probability clamped to [0, 1]")
                .sample(rng)
        };
        *slot = k;
        remaining -= k;
        remaining_mass -= p;
    }
    // rounding leftovers land in the last non-empty category
    if remaining > 0 {
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            out[last] += remaining;
        }
    }
    out
}

/// Multinomial draw of `n_photons` over the pixels plus independent Poisson
/// dark counts of mean `dark_rate` per pixel.
pub fn sample_frame(
    pixels: &PixelProbabilities,
    n_photons: u64,
    dark_rate: f64,
    seed: u64,
) -> Result<CountsGrid> {
    if !(dark_rate >= 0.0 && dark_rate.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "dark rate must be non-negative, got {dark_rate}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut counts = multinomial(&mut rng, n_photons, pixels.as_slice());
    let mut dark_total = 0;
    if dark_rate > 0.0 {
        let poisson = Poisson::new(dark_rate).expect("positive finite rate");
        for c in &mut counts {
            let d = poisson.sample(&mut rng) as u64;
            *c += d;
            dark_total += d;
        }
    }
    CountsGrid::from_counts(*pixels.grid(), counts, dark_total, seed)
}

/// Sidecar metadata stored next to a counts CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameHeader {
    pub seed: u64,
    /// Heralded photons in the frame, dark counts excluded.
    pub photons: u64,
    #[serde(default)]
    pub dark_total: u64,
    #[serde(default)]
    pub dark_rate: f64,
    pub geometry: DetectorGrid,
    pub sigma: f64,
    pub g_x: f64,
    pub g_y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles_pi: Option<AnglesPi>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postselection: Option<String>,
}

/// Preparation, `I_B` and post-selection angles in units of π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnglesPi {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl AnglesPi {
    pub fn radians(&self) -> (f64, f64, f64) {
        use std::f64::consts::PI;
        (self.alpha * PI, self.gamma * PI, self.delta * PI)
    }
}

fn stem_paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("csv"), stem.with_extension("json"))
}

pub fn counts_to_csv(counts: &CountsGrid) -> String {
    let mut out = String::with_capacity(counts.counts.len() * 4);
    for row in counts.counts.chunks(counts.n_x()) {
        let line: Vec<String> = row.iter().map(u64::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn counts_from_csv(text: &str) -> Result<(usize, usize, Vec<u64>)> {
    let mut n_x = None;
    let mut values = Vec::new();
    let mut n_y = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|v| v.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
        match n_x {
            None => n_x = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Format(format!(
                    "line {}: expected {w} columns, found {}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        values.extend(row);
        n_y += 1;
    }
    let n_x = n_x.ok_or_else(|| Error::Format("empty counts file".into()))?;
    Ok((n_x, n_y, values))
}

/// Writes `<stem>.csv` and `<stem>.json`; returns both paths.
pub fn write_frame(
    stem: &Path,
    counts: &CountsGrid,
    header: &FrameHeader,
) -> Result<(PathBuf, PathBuf)> {
    let (csv, json) = stem_paths(stem);
    fs::write(&csv, counts_to_csv(counts))?;
    fs::write(&json, serde_json::to_string_pretty(header)? + "\n")?;
    Ok((csv, json))
}

/// Reads a frame pair given either file of the pair or the bare stem.
pub fn read_frame(path: &Path) -> Result<(CountsGrid, FrameHeader)> {
    let (csv, json) = stem_paths(path);
    let header: FrameHeader = serde_json::from_str(&fs::read_to_string(&json)?)?;
    let (n_x, n_y, values) = counts_from_csv(&fs::read_to_string(&csv)?)?;
    if (n_x, n_y) != (header.geometry.n_x, header.geometry.n_y) {
        return Err(Error::Format(format!(
            "counts are {n_x}x{n_y} but header declares {}x{}",
            header.geometry.n_x, header.geometry.n_y
        )));
    }
    let counts = CountsGrid::from_counts(header.geometry, values, header.dark_total, header.seed)?;
    if counts.photons != header.photons {
        return Err(Error::Format(format!(
            "header declares {} photons, counts hold {}",
            header.photons, counts.photons
        )));
    }
    Ok((counts, header))
}
