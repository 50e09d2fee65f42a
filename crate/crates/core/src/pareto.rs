//! Leakage/utility-loss frontiers traced by sweeping the Lagrange multiplier.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::greedy::{Algorithm, LagrangianConfig};
use crate::quantization::{log2, CodewordPolicy, Quantization, UtilityChoice, UtilityKind};
use crate::range::JointRange;

/// Normalized (utility loss, leakage) of the submodularity-based method on
/// the heart-disease data, kept for dominance checks.
pub const SUBMODULAR_REFERENCE: (f64, f64) = (0.1326, 0.8538);

/// Which runs of a sweep contribute candidate points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierMode {
    /// Only the quantization each run returns.
    FinalOnly,
    /// Every accepted iterate of every run.
    #[default]
    WithIterates,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub algorithm: Algorithm,
    pub utility: UtilityChoice,
    pub policy: CodewordPolicy,
    pub mode: FrontierMode,
}

impl SweepConfig {
    pub fn new(algorithm: Algorithm, utility: UtilityChoice) -> Self {
        SweepConfig {
            algorithm,
            utility,
            policy: CodewordPolicy::Centroid,
            mode: FrontierMode::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParetoPoint {
    /// Multiplier of the run that produced the point.
    pub lambda: f64,
    /// Iteration of that run.
    pub t: usize,
    pub leakage_raw: f64,
    pub leakage_norm: f64,
    pub utility_raw: f64,
    pub loss_norm: f64,
    pub quantization: Quantization,
}

#[derive(Clone, Debug, Serialize)]
pub struct Frontier {
    pub algorithm: Algorithm,
    pub utility: UtilityKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub mode: FrontierMode,
    /// A normalizer was zero; the affected axis is in absolute bits.
    pub degenerate: bool,
    /// Leakage of the unquantized release.
    pub leakage_reference: f64,
    /// `H₀(X)` for resolution utility, `Û₂` for distortion utility.
    pub utility_reference: f64,
    /// Sorted by increasing utility loss; leakage strictly decreases.
    pub points: Vec<ParetoPoint>,
}

impl Frontier {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::contract(format!("csv: {e}"));
        w.write_record(["lambda", "leakage_raw", "leakage_norm", "utility_raw", "loss_norm"])
            .map_err(io)?;
        for p in &self.points {
            w.write_record([
                p.lambda.to_string(),
                p.leakage_raw.to_string(),
                p.leakage_norm.to_string(),
                p.utility_raw.to_string(),
                p.loss_norm.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::contract(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// The point with the smallest leakage among those with loss at most `max_loss`.
    pub fn best_within_loss(&self, max_loss: f64) -> Option<&ParetoPoint> {
        self.points
            .iter()
            .filter(|p| p.loss_norm <= max_loss)
            .min_by(|a, b| a.leakage_norm.total_cmp(&b.leakage_norm))
    }
}

/// `λ = 0` followed by 64 points spaced geometrically over `[1e-3, 1e2]`.
pub fn default_grid() -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend(geometric_grid(64, 1e-3, 1e2).expect("valid bounds"));
    grid
}

pub fn geometric_grid(count: usize, min: f64, max: f64) -> Result<Vec<f64>> {
    if count == 0 || !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(Error::config(format!(
            "geometric grid needs count ≥ 1 and 0 < min ≤ max, got {count}, {min}, {max}"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let ratio = (max / min).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| min * (ratio * i as f64).exp()).collect())
}

pub fn linear_grid(count: usize, min: f64, max: f64) -> Result<Vec<f64>> {
    if count == 0 || !(min >= 0.0 && max >= min && max.is_finite()) {
        return Err(Error::config(format!(
            "linear grid needs count ≥ 1 and 0 ≤ min ≤ max, got {count}, {min}, {max}"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|i| min + step * i as f64).collect())
}

struct Candidate {
    lambda: f64,
    t: usize,
    leakage: f64,
    utility: f64,
    quantization: Quantization,
}

/// Runs the configured algorithm for every `λ` in `grid` (in parallel) and
/// keeps the non-dominated (leakage, utility loss) points.
pub fn sweep(jr: &JointRange, cfg: &SweepConfig, grid: &[f64]) -> Result<Frontier> {
    if grid.is_empty() {
        return Err(Error::config("lambda grid is empty"));
    }
    let configs = grid
        .iter()
        .map(|&lambda| LagrangianConfig::new(lambda, cfg.utility).map(|c| c.with_policy(cfg.policy)))
        .collect::<Result<Vec<_>>>()?;

    let runs: Vec<Vec<Candidate>> = configs
        .par_iter()
        .map(|lc| -> Result<Vec<Candidate>> {
            let res = cfg.algorithm.run(jr, lc)?;
            let pick = |e: &crate::greedy::TraceEntry| Candidate {
                lambda: lc.lambda,
                t: e.t,
                leakage: cfg.algorithm.leakage(jr, &e.quantization),
                utility: e.utility,
                quantization: e.quantization.clone(),
            };
            // iterates of the constrained variant are only admissible once connected
            let admissible = |e: &&crate::greedy::TraceEntry| {
                cfg.algorithm != Algorithm::L0ZeroIStar || e.component_count == Some(1)
            };
            Ok(match cfg.mode {
                FrontierMode::WithIterates => res.accepted().filter(admissible).map(pick).collect(),
                FrontierMode::FinalOnly => {
                    let last = res
                        .accepted()
                        .filter(|e| e.quantization == res.quantization)
                        .last()
                        .expect("returned quantization is an accepted iterate");
                    vec![pick(last)]
                }
            })
        })
        .collect::<Result<_>>()?;

    let mut seen = HashSet::new();
    let candidates: Vec<Candidate> = runs
        .into_iter()
        .flatten()
        .filter(|c| seen.insert(c.quantization.blocks()))
        .collect();

    let kept = non_dominated(candidates);
    normalize(jr, cfg, kept)
}

/// Keeps points no other point beats on both leakage and utility.
fn non_dominated(mut c: Vec<Candidate>) -> Vec<Candidate> {
    const EPS: f64 = 1e-12;
    // ascending loss is descending utility
    c.sort_by(|a, b| {
        b.utility
            .total_cmp(&a.utility)
            .then(a.leakage.total_cmp(&b.leakage))
    });
    let mut out: Vec<Candidate> = Vec::new();
    for cand in c {
        match out.last() {
            Some(prev) if cand.leakage >= prev.leakage - EPS => {}
            _ => out.push(cand),
        }
    }
    out
}

fn normalize(jr: &JointRange, cfg: &SweepConfig, kept: Vec<Candidate>) -> Result<Frontier> {
    let singletons = Quantization::singletons(jr, cfg.policy);
    let leakage_reference = cfg.algorithm.leakage(jr, &singletons);
    let utility_reference = match cfg.utility.kind {
        UtilityKind::Resolution => log2(jr.x_len()),
        UtilityKind::MaxDistortion => kept.iter().map(|c| c.utility).fold(0.0, f64::min),
    };
    let leak_degenerate = leakage_reference <= 0.0;
    let util_degenerate = utility_reference == 0.0;

    let points = kept
        .into_iter()
        .map(|c| {
            let leakage_norm = if leak_degenerate {
                c.leakage
            } else {
                c.leakage / leakage_reference
            };
            let loss_norm = match (cfg.utility.kind, util_degenerate) {
                (UtilityKind::Resolution, false) => 1.0 - c.utility / utility_reference,
                (UtilityKind::MaxDistortion, false) => c.utility / utility_reference,
                (UtilityKind::Resolution, true) => -c.utility,
                (UtilityKind::MaxDistortion, true) => -c.utility,
            };
            ParetoPoint {
                lambda: c.lambda,
                t: c.t,
                leakage_raw: c.leakage,
                leakage_norm,
                utility_raw: c.utility,
                loss_norm,
                quantization: c.quantization,
            }
        })
        .collect();

    Ok(Frontier {
        algorithm: cfg.algorithm,
        utility: cfg.utility.kind,
        dataset: None,
        mode: cfg.mode,
        degenerate: leak_degenerate || util_degenerate,
        leakage_reference,
        utility_reference,
        points,
    })
}
