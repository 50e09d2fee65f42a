//! Greedy agglomerative clustering for the three privacy problems.
//!
//! * [`algorithm1_min_l0`]: minimize `L₀(S→X̂) − λU`.
//! * [`algorithm2_min_istar`]: minimize `I*(S;X̂) − λU`.
//! * [`algorithm3_l0_zero_istar`]: minimize `L₀ − λU` while driving the
//!   release to a single confusability component (`I* = 0`).
//!
//! Every run starts from the singleton quantization and records a full
//! trace. Lagrangians are reported as `leakage − λ·utility`.

mod components;
mod min_l0;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{maximin_information, Decomposition};
use crate::measures::l0;
use crate::quantization::{ClusterId, CodewordPolicy, Quantization, UtilityChoice};
use crate::range::JointRange;

pub use components::{algorithm2_min_istar, algorithm3_l0_zero_istar};
pub use min_l0::algorithm1_min_l0;

/// Changes smaller than this are treated as zero, both for descent and for ties.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagrangianConfig {
    pub lambda: f64,
    pub utility: UtilityChoice,
    pub policy: CodewordPolicy,
}

impl LagrangianConfig {
    pub fn new(lambda: f64, utility: UtilityChoice) -> Result<Self> {
        let cfg = LagrangianConfig {
            lambda,
            utility,
            policy: CodewordPolicy::Centroid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_policy(mut self, policy: CodewordPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::config(format!(
                "lambda must be a finite non-negative number, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    fn check(&self, jr: &JointRange) -> Result<()> {
        self.validate()?;
        if self.utility.needs_values() && jr.x_values().is_none() {
            return Err(Error::config(
                "distortion utility needs numeric values for every x-symbol",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "l0")]
    MinL0,
    #[serde(rename = "istar")]
    MinIStar,
    #[serde(rename = "l0-zero-istar")]
    L0ZeroIStar,
}

impl Algorithm {
    pub fn run(self, jr: &JointRange, cfg: &LagrangianConfig) -> Result<GreedyResult> {
        match self {
            Algorithm::MinL0 => algorithm1_min_l0(jr, cfg),
            Algorithm::MinIStar => algorithm2_min_istar(jr, cfg),
            Algorithm::L0ZeroIStar => algorithm3_l0_zero_istar(jr, cfg),
        }
    }

    /// Privacy measure the algorithm minimizes: `L₀` or `I*`.
    pub fn leakage(self, jr: &JointRange, q: &Quantization) -> f64 {
        match self {
            Algorithm::MinIStar => maximin_information(jr, q),
            Algorithm::MinL0 | Algorithm::L0ZeroIStar => l0(jr, q),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MinL0 => "l0",
            Algorithm::MinIStar => "istar",
            Algorithm::L0ZeroIStar => "l0-zero-istar",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The next step would not lower the Lagrangian.
    DeltaLNonNegative,
    /// Only one cluster is left.
    FullyMerged,
    /// The release has a single confusability component.
    SingleComponent,
    /// No cluster has a partner with a different conditional range.
    NoEligibleMerge,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub t: usize,
    pub quantization: Quantization,
    pub lagrangian: f64,
    /// `ℒ⁽ᵗ⁾ − ℒ⁽ᵗ⁻¹⁾`; absent for the starting point.
    pub delta_l: Option<f64>,
    pub merged: Vec<(ClusterId, ClusterId)>,
    pub leakage: f64,
    pub utility: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component_count: Option<usize>,
    /// False for the final candidate that failed the descent test.
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyResult {
    pub algorithm: Algorithm,
    pub quantization: Quantization,
    pub trace: Vec<TraceEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    pub termination: Termination,
}

impl GreedyResult {
    /// Lagrangian values of accepted iterations, in order.
    pub fn lagrangians(&self) -> Vec<f64> {
        self.accepted().map(|e| e.lagrangian).collect()
    }

    pub fn accepted(&self) -> impl Iterator<Item = &TraceEntry> {
        self.trace.iter().filter(|e| e.accepted)
    }
}

/// `L₀(S→X̂) − λU(X;X̂)`.
pub fn lagrangian_l0(jr: &JointRange, q: &Quantization, cfg: &LagrangianConfig) -> Result<f64> {
    Ok(l0(jr, q) - cfg.lambda * q.utility(&cfg.utility)?)
}

/// `I*(S;X̂) − λU(X;X̂)`.
pub fn lagrangian_istar(jr: &JointRange, q: &Quantization, cfg: &LagrangianConfig) -> Result<f64> {
    Ok(maximin_information(jr, q) - cfg.lambda * q.utility(&cfg.utility)?)
}

fn descends(delta: f64) -> bool {
    delta < -TIE_EPS
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{toy, toy_valued, TOY_VALUES};
    use approx::assert_abs_diff_eq;

    #[test]
    fn lagrangian_endpoints() {
        let jr = toy();
        let cfg = LagrangianConfig::new(0.3, UtilityChoice::resolution()).unwrap();
        let p = CodewordPolicy::Centroid;
        assert_abs_diff_eq!(
            lagrangian_l0(&jr, &Quantization::singletons(&jr, p), &cfg).unwrap(),
            1.7428,
            epsilon = 1e-3
        );
        assert_abs_diff_eq!(
            lagrangian_l0(&jr, &Quantization::all_in_one(&jr, p), &cfg).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        let jr = toy_valued(TOY_VALUES);
        let cfg = LagrangianConfig::new(2.5, UtilityChoice::max_distortion()).unwrap();
        assert_abs_diff_eq!(
            lagrangian_l0(&jr, &Quantization::singletons(&jr, p), &cfg).unwrap(),
            2.5850,
            epsilon = 1e-3
        );
    }

    #[test]
    fn config_rejects_bad_lambda() {
        let u = UtilityChoice::resolution();
        assert!(matches!(LagrangianConfig::new(-1.0, u), Err(Error::Config(_))));
        assert!(LagrangianConfig::new(f64::NAN, u).is_err());
        assert!(LagrangianConfig::new(0.0, u).is_ok());
    }

    #[test]
    fn distortion_requires_values() {
        let cfg = LagrangianConfig::new(1.0, UtilityChoice::max_distortion()).unwrap();
        for alg in [Algorithm::MinL0, Algorithm::MinIStar, Algorithm::L0ZeroIStar] {
            assert!(matches!(alg.run(&toy(), &cfg), Err(Error::Config(_))));
        }
    }
}
