//! Exhaustive search over all quantizations of a small public alphabet.
//!
//! Partitions are enumerated as restricted-growth strings in lexicographic
//! order, so the reported optimum is the lexicographically least one.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::LagrangianConfig;
use crate::quantization::{log2, CodewordPolicy, Quantization, UtilityChoice, UtilityKind};
use crate::range::JointRange;

/// Largest alphabet the oracle accepts; Bell(12) = 4 213 597 partitions.
pub const MAX_SYMBOLS: usize = 12;

/// Objective values closer than this count as equal.
pub const OPT_EPS: f64 = 1e-9;

/// Restricted-growth strings of length `n` in lexicographic order.
///
/// `a[0] = 0` and `a[i] ≤ 1 + max(a[..i])`; each string is one set partition.
pub struct Partitions {
    rgs: Vec<usize>,
    // prefix maxima: max[i] = max(a[..=i])
    max: Vec<usize>,
    started: bool,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.rgs.clone());
        }
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.max[i - 1] {
                self.rgs[i] += 1;
                self.max[i] = self.max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.max[j] = self.max[i];
                }
                return Some(self.rgs.clone());
            }
        }
        self.done = true;
        None
    }
}

pub fn enumerate_partitions(n: usize) -> Result<Partitions> {
    if n == 0 {
        return Err(Error::contract("cannot partition an empty alphabet"));
    }
    if n > MAX_SYMBOLS {
        return Err(Error::SizeLimit(format!(
            "exhaustive search supports at most {MAX_SYMBOLS} x-symbols, got {n}"
        )));
    }
    Ok(Partitions {
        rgs: vec![0; n],
        max: vec![0; n],
        started: false,
        done: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    /// Minimize `L₀`.
    #[serde(rename = "l0")]
    MinL0,
    /// Minimize `I*`.
    #[serde(rename = "istar")]
    MinIStar,
    /// Minimize `L₀` over connected releases (`I* = 0`).
    #[serde(rename = "l0-zero-istar")]
    MinL0ZeroIStar,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    /// Minimize `leakage − λU`.
    Lagrangian(LagrangianConfig),
    /// Minimize leakage subject to `U ≥ θ`.
    Constrained {
        theta: f64,
        utility: UtilityChoice,
        policy: CodewordPolicy,
    },
}

impl Objective {
    fn utility(&self) -> &UtilityChoice {
        match self {
            Objective::Lagrangian(cfg) => &cfg.utility,
            Objective::Constrained { utility, .. } => utility,
        }
    }

    fn policy(&self) -> CodewordPolicy {
        match self {
            Objective::Lagrangian(cfg) => cfg.policy,
            Objective::Constrained { policy, .. } => *policy,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    /// Optimal objective: the Lagrangian, or the leakage in the constrained form.
    pub value: f64,
    pub quantization: Quantization,
    pub leakage: f64,
    pub utility: f64,
    /// Number of partitions within [`OPT_EPS`] of the optimum.
    pub optimum_count: usize,
    pub partitions_searched: usize,
}

pub fn oracle_min(jr: &JointRange, problem: Problem, objective: &Objective) -> Result<OracleResult> {
    if let Objective::Lagrangian(cfg) = objective {
        cfg.validate()?;
    }
    let n = jr.x_len();
    let partitions = enumerate_partitions(n)?;
    let utility = *objective.utility();
    let values = match utility.kind {
        UtilityKind::MaxDistortion => Some(jr.x_values().ok_or_else(|| {
            Error::config("distortion utility needs numeric values for every x-symbol")
        })?),
        UtilityKind::Resolution => None,
    };
    let mut eval = Evaluator::new(jr, utility, objective.policy(), values);

    let mut best: Option<(f64, Vec<usize>, f64, f64)> = None;
    let mut count = 0;
    let mut searched = 0;
    let mut max_feasible_utility = f64::NEG_INFINITY;
    for rgs in partitions {
        searched += 1;
        let m = eval.measure(&rgs);
        if problem == Problem::MinL0ZeroIStar && m.components != 1 {
            continue;
        }
        let leakage = match problem {
            Problem::MinIStar => log2(m.components),
            Problem::MinL0 | Problem::MinL0ZeroIStar => m.l0,
        };
        let value = match objective {
            Objective::Lagrangian(cfg) => leakage - cfg.lambda * m.utility,
            Objective::Constrained { theta, .. } => {
                max_feasible_utility = max_feasible_utility.max(m.utility);
                if m.utility < theta - OPT_EPS {
                    continue;
                }
                leakage
            }
        };
        match &best {
            Some((b, ..)) if value > b + OPT_EPS => {}
            Some((b, ..)) if value >= b - OPT_EPS => count += 1,
            _ => {
                best = Some((value, rgs, leakage, m.utility));
                count = 1;
            }
        }
    }

    let Some((value, rgs, leakage, u)) = best else {
        return Err(match objective {
            Objective::Constrained { theta, .. } => Error::Infeasible(format!(
                "no quantization reaches utility {theta}; the maximum achievable is {max_feasible_utility}"
            )),
            Objective::Lagrangian(_) => Error::Infeasible("no admissible quantization".into()),
        });
    };
    Ok(OracleResult {
        value,
        quantization: Quantization::from_labels(jr, &rgs, objective.policy())?,
        leakage,
        utility: u,
        optimum_count: count,
        partitions_searched: searched,
    })
}

struct Measured {
    l0: f64,
    components: usize,
    utility: f64,
}

/// Evaluates partitions given as label vectors, reusing buffers across calls.
struct Evaluator<'a> {
    jr: &'a JointRange,
    utility: UtilityChoice,
    policy: CodewordPolicy,
    values: Option<Vec<f64>>,
    ranges: Vec<FixedBitSet>,
    sizes: Vec<usize>,
    parent: Vec<usize>,
}

impl<'a> Evaluator<'a> {
    fn new(
        jr: &'a JointRange,
        utility: UtilityChoice,
        policy: CodewordPolicy,
        values: Option<Vec<f64>>,
    ) -> Self {
        let n = jr.x_len();
        Evaluator {
            jr,
            utility,
            policy,
            values,
            ranges: vec![FixedBitSet::with_capacity(jr.s_len()); n],
            sizes: vec![0; n],
            parent: vec![0; n],
        }
    }

    fn measure(&mut self, labels: &[usize]) -> Measured {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        for b in 0..k {
            self.ranges[b].clear();
            self.sizes[b] = 0;
            self.parent[b] = b;
        }
        for (x, &b) in labels.iter().enumerate() {
            self.ranges[b].union_with(self.jr.cond_range_x(x).expect("valid x").as_bitset());
            self.sizes[b] += 1;
        }

        let min_range = (0..k).map(|b| self.ranges[b].count_ones(..)).min().unwrap_or(1);
        let l0 = log2(self.jr.s_len()) - log2(min_range);

        let mut components = k;
        for u in 0..k {
            for v in u + 1..k {
                if !self.ranges[u].is_disjoint(&self.ranges[v]) {
                    let (ru, rv) = (find(&mut self.parent, u), find(&mut self.parent, v));
                    if ru != rv {
                        self.parent[ru] = rv;
                        components -= 1;
                    }
                }
            }
        }

        let utility = match self.utility.kind {
            UtilityKind::Resolution => {
                let max = self.sizes[..k].iter().copied().max().unwrap_or(1);
                log2(labels.len()) - log2(max)
            }
            UtilityKind::MaxDistortion => -self.max_distortion(labels, k),
        };
        Measured {
            l0,
            components,
            utility,
        }
    }

    fn max_distortion(&self, labels: &[usize], k: usize) -> f64 {
        let values = self.values.as_deref().expect("values checked");
        let mut worst: f64 = 0.0;
        for b in 0..k {
            let members = labels.iter().enumerate().filter(|&(_, &l)| l == b).map(|(x, _)| x);
            let codeword = match self.policy {
                CodewordPolicy::Centroid => {
                    members.clone().map(|x| values[x]).sum::<f64>() / self.sizes[b] as f64
                }
                CodewordPolicy::Representative => values[members.clone().next().expect("non-empty")],
            };
            for x in members {
                worst = worst.max(self.utility.distance.eval(values[x], codeword));
            }
        }
        worst
    }
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}
