//! Subcommand implementations behind the `lgweak` binary. Every command
//! returns a serializable report; the binary only parses flags and prints.
//!
//! All user-facing angles are in units of π.

pub mod config;
pub mod sweep;

use std::path::Path;

use lgweak_core::inequality::{
    anomaly_threshold, b4_postselected_form, b4_value, bn_bounds, correlators_b4,
    macrorealist_bounds_bruteforce, negative_violation_threshold, CorrelatorSet, LgVerdict,
};
use lgweak_core::{
    run_experiment, write_frame, AnglesPi, Classification, ExperimentConfig, Measured,
    PostselectedWeakValue, WeakAverageEstimate,
};
use serde::Serialize;
use thiserror::Error;

pub use config::RunConfig;
pub use sweep::{cmd_sweep, SweepRow, SweepSpec, SweepTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] lgweak_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for invalid configuration, 3 for a tripped numerical guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical_guard() => 3,
            CliError::Core(lgweak_core::Error::InvalidInput(_)) => 2,
            CliError::Core(lgweak_core::Error::ChainTooShort(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct WeakValueReport {
    pub value: f64,
    pub anomalous: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoryReport {
    pub angles_pi: AnglesPi,
    pub correlators: CorrelatorSet,
    pub corr_cd: f64,
    pub b4: LgVerdict,
    pub b4_postselected_form: f64,
    pub wv_c_plus: WeakValueReport,
    pub wv_c_minus: WeakValueReport,
    /// `(3 − M)/(2 p_D(−1))`: B4 > 2 iff `1 − ₋₁⟨I_C⟩` exceeds it.
    pub anomaly_threshold: f64,
    /// B4 < −2 iff `₋₁⟨I_C⟩` exceeds it.
    pub negative_violation_threshold: f64,
}

fn check_angles(angles: &AnglesPi) -> Result<()> {
    if [angles.alpha, angles.gamma, angles.delta]
        .iter()
        .all(|v| v.is_finite())
    {
        Ok(())
    } else {
        Err(CliError::Config("angles must be finite".into()))
    }
}

pub fn cmd_theory(angles: AnglesPi) -> Result<TheoryReport> {
    check_angles(&angles)?;
    let (alpha, gamma, delta) = angles.radians();
    let set = correlators_b4(alpha, gamma, delta)?;
    let m = (set.exp_b, set.corr_bc, set.exp_c, set.p_d_minus);
    Ok(TheoryReport {
        angles_pi: angles,
        corr_cd: set.corr_cd(),
        b4: b4_value(&set),
        b4_postselected_form: b4_postselected_form(&set),
        wv_c_plus: WeakValueReport {
            value: set.wv_c_plus,
            anomalous: set.anomalous_plus(),
        },
        wv_c_minus: WeakValueReport {
            value: set.wv_c_minus,
            anomalous: set.anomalous_minus(),
        },
        anomaly_threshold: anomaly_threshold(m.0, m.1, m.2, m.3)?,
        negative_violation_threshold: negative_violation_threshold(m.0, m.1, m.2, m.3)?,
        correlators: set,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub closed_form: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
}

pub fn cmd_bounds(n: usize, brute: bool) -> Result<BoundsReport> {
    let closed_form = bn_bounds(n)?;
    let brute_force = if brute {
        Some(macrorealist_bounds_bruteforce(n)?)
    } else {
        None
    };
    Ok(BoundsReport {
        n,
        closed_form,
        agreement: brute_force.map(|b| b == closed_form),
        brute_force,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub postselection: &'static str,
    pub probability: f64,
    pub photons: u64,
    pub dark_total: u64,
    pub seed: u64,
    pub files: Option<[String; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub config: RunConfig,
    pub g: f64,
    pub sigma: f64,
    pub runs: Vec<RunReport>,
    pub weak_averages: WeakAverageEstimate,
    pub wv_c_plus: PostselectedWeakValue,
    pub wv_c_minus: PostselectedWeakValue,
    pub p_plus: Measured,
    pub b4: Measured,
    pub bound: (f64, f64),
    pub classification: Classification,
    /// `(|B4| − 2) / se`.
    pub violation_sigmas: f64,
    pub theory_b4: f64,
}

/// Runs the three post-selection experiments and estimates B4. Frames are
/// written as `<out_dir>/<postselection>.{csv,json}` when `out_dir` is set.
pub fn cmd_simulate(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<SimulationReport> {
    cfg.validate()?;
    let exp: ExperimentConfig = cfg.experiment();
    let outcome = run_experiment(&exp)?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut runs = Vec::new();
    for run in &outcome.runs {
        let files = match out_dir {
            Some(dir) => {
                let label = run.kind.label();
                write_frame(&dir.join(label), &run.frame, &run.header)?;
                Some([format!("{label}.csv"), format!("{label}.json")])
            }
            None => None,
        };
        runs.push(RunReport {
            postselection: run.kind.label(),
            probability: run.probability,
            photons: run.frame.photons,
            dark_total: run.frame.dark_total,
            seed: run.header.seed,
            files,
        });
    }
    let b4 = &outcome.b4;
    Ok(SimulationReport {
        config: cfg.clone(),
        g: outcome.runs[0].header.g_x,
        sigma: outcome.runs[0].header.sigma,
        runs,
        weak_averages: outcome.run_a,
        wv_c_plus: outcome.wv_plus,
        wv_c_minus: outcome.wv_minus,
        p_plus: b4.p_plus,
        b4: Measured::new(b4.value, b4.se),
        bound: (outcome.verdict.lower_bound, outcome.verdict.upper_bound),
        classification: outcome.verdict.classification,
        violation_sigmas: (b4.value.abs() - 2.0) / b4.se,
        theory_b4: outcome.theory,
    })
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}
