//! (α, δ) violation maps at fixed γ.

use lgweak_core::inequality::b4_unconditioned;
use lgweak_core::Classification;
use serde::Serialize;

use crate::{CliError, Result};

pub const CSV_HEADER: &str = "alpha_pi,delta_pi,b4,class";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub gamma: f64,
    /// `(start, stop, steps)` in π units, endpoints included.
    pub alpha_range: (f64, f64, usize),
    pub delta_range: (f64, f64, usize),
}

impl SweepSpec {
    /// Full period `[0, 1]` in both angles with `steps` nodes each.
    pub fn full(gamma: f64, steps: usize) -> Self {
        Self {
            gamma,
            alpha_range: (0.0, 1.0, steps),
            delta_range: (0.0, 1.0, steps),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() {
            return Err(CliError::Config("gamma must be finite".into()));
        }
        for (name, (start, stop, steps)) in
            [("alpha", self.alpha_range), ("delta", self.delta_range)]
        {
            if steps < 2 {
                return Err(CliError::Config(format!(
                    "{name} range needs at least 2 steps"
                )));
            }
            let ok = |v: f64| (0.0..=1.0).contains(&v);
            if !ok(start) || !ok(stop) || start >= stop {
                return Err(CliError::Config(format!(
                    "{name} range [{start}, {stop}] must be increasing within [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

fn nodes((start, stop, steps): (f64, f64, usize)) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|k| start + (stop - start) * (k as f64 / last))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha_pi: f64,
    pub delta_pi: f64,
    pub b4: f64,
    pub class: Classification,
}

impl SweepRow {
    pub fn evaluate(gamma_pi: f64, alpha_pi: f64, delta_pi: f64) -> Self {
        use std::f64::consts::PI;
        let b4 = b4_unconditioned(alpha_pi * PI, gamma_pi * PI, delta_pi * PI);
        Self {
            alpha_pi,
            delta_pi,
            b4,
            class: Classification::of(b4, -2.0, 2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub max: SweepRow,
    pub min: SweepRow,
    pub positive_cells: usize,
    pub negative_cells: usize,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    /// Row-major in α, then δ.
    pub rows: Vec<SweepRow>,
}

pub fn cmd_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let deltas = nodes(spec.delta_range);
    let rows = nodes(spec.alpha_range)
        .into_iter()
        .flat_map(|a| {
            deltas
                .iter()
                .map(move |&d| SweepRow::evaluate(spec.gamma, a, d))
        })
        .collect();
    Ok(SweepTable { spec: *spec, rows })
}

impl SweepTable {
    pub fn summary(&self) -> SweepSummary {
        let by_b4 = |a: &&SweepRow, b: &&SweepRow| a.b4.total_cmp(&b.b4);
        let count = |c| self.rows.iter().filter(|r| r.class == c).count();
        SweepSummary {
            max: *self.rows.iter().max_by(by_b4).expect("sweep has rows"),
            min: *self.rows.iter().min_by(by_b4).expect("sweep has rows"),
            positive_cells: count(Classification::PositiveViolation),
            negative_cells: count(Classification::NegativeViolation),
            cells: self.rows.len(),
        }
    }

    /// The grid node nearest to `(alpha_pi, delta_pi)`.
    pub fn cell_containing(&self, alpha_pi: f64, delta_pi: f64) -> &SweepRow {
        let dist = |r: &SweepRow| (r.alpha_pi - alpha_pi).powi(2) + (r.delta_pi - delta_pi).powi(2);
        self.rows
            .iter()
            .min_by(|a, b| dist(a).total_cmp(&dist(b)))
            .expect("sweep has rows")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.alpha_pi,
                r.delta_pi,
                r.b4,
                r.class.label()
            ));
        }
        out
    }
}

/// Parses a sweep CSV back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(CliError::Config(format!(
            "sweep CSV must start with {CSV_HEADER:?}"
        )));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = || CliError::Config(format!("sweep CSV line {}: {line:?}", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
            Ok(SweepRow {
                alpha_pi: num(f[0])?,
                delta_pi: num(f[1])?,
                b4: num(f[2])?,
                class: Classification::from_label(f[3].trim()).ok_or_else(bad)?,
            })
        })
        .collect()
}
