use crate::error::Result;
use crate::measures::l0;
use crate::quantization::{ClusterId, Quantization, UtilityKind};
use crate::range::JointRange;

use super::{
    descends, lagrangian_l0, Algorithm, GreedyResult, LagrangianConfig, Termination, TraceEntry,
    TIE_EPS,
};

/// Greedy minimization of `L₀(S→X̂) − λU`.
///
/// Each outer iteration takes every cluster whose conditional range is
/// smallest and merges it with the partner (a cluster with a different
/// range) that keeps utility highest. The iteration is kept only if it
/// lowers the Lagrangian.
pub fn algorithm1_min_l0(jr: &JointRange, cfg: &LagrangianConfig) -> Result<GreedyResult> {
    cfg.check(jr)?;
    let mut q = Quantization::singletons(jr, cfg.policy);
    let mut current = lagrangian_l0(jr, &q, cfg)?;
    let mut trace = vec![entry(jr, cfg, 0, &q, current, None, Vec::new(), true)?];

    let termination = loop {
        if q.len() == 1 {
            break Termination::FullyMerged;
        }
        let (next, merged) = outer_step(jr, cfg, &q)?;
        if merged.is_empty() {
            break Termination::NoEligibleMerge;
        }
        let value = lagrangian_l0(jr, &next, cfg)?;
        let delta = value - current;
        let t = trace.len();
        if !descends(delta) {
            trace.push(entry(jr, cfg, t, &next, value, Some(delta), merged, false)?);
            break Termination::DeltaLNonNegative;
        }
        trace.push(entry(jr, cfg, t, &next, value, Some(delta), merged, true)?);
        q = next;
        current = value;
    };

    Ok(GreedyResult {
        algorithm: Algorithm::MinL0,
        quantization: q,
        trace,
        decomposition: None,
        termination,
    })
}

/// One pass over the clusters of minimum conditional-range size.
fn outer_step(
    jr: &JointRange,
    cfg: &LagrangianConfig,
    q: &Quantization,
) -> Result<(Quantization, Vec<(ClusterId, ClusterId)>)> {
    let ranges = q.cond_ranges(jr);
    let min = ranges.iter().map(|r| r.len()).min().unwrap_or(0);
    // clusters already share the minimum size, so id order is the canonical order
    let mut pending: Vec<ClusterId> = q
        .ids()
        .zip(&ranges)
        .filter(|(_, r)| r.len() == min)
        .map(|(id, _)| id)
        .collect();

    let mut work = q.clone();
    let mut merged = Vec::new();
    while !pending.is_empty() {
        let x = pending.remove(0);
        let Some(partner) = best_partner(jr, cfg, &work, x)? else {
            continue;
        };
        pending.retain(|&p| p != partner);
        work = work.merge(x, partner)?;
        merged.push((x, partner));
    }
    Ok((work, merged))
}

/// Partner among clusters whose range differs from that of `x`, ranked by
/// utility after the merge, then merged size, then smallest id.
fn best_partner(
    jr: &JointRange,
    cfg: &LagrangianConfig,
    work: &Quantization,
    x: ClusterId,
) -> Result<Option<ClusterId>> {
    let ranges = work.cond_ranges(jr);
    let pos = work.ids().position(|id| id == x).expect("cluster is live");
    let x_size = work.clusters()[pos].len();

    let mut best: Option<(f64, usize, ClusterId)> = None;
    for (i, c) in work.clusters().iter().enumerate() {
        if i == pos || ranges[i] == ranges[pos] {
            continue;
        }
        let size = x_size + c.len();
        let cost = match cfg.utility.kind {
            UtilityKind::Resolution => size as f64,
            UtilityKind::MaxDistortion => work.merged_distortion(x, c.id(), cfg.utility.distance)?,
        };
        let better = match best {
            None => true,
            Some((bc, bs, _)) => cost < bc - TIE_EPS || (cost <= bc + TIE_EPS && size < bs),
        };
        if better {
            best = Some((cost, size, c.id()));
        }
    }
    Ok(best.map(|(_, _, id)| id))
}

#[allow(clippy::too_many_arguments)]
fn entry(
    jr: &JointRange,
    cfg: &LagrangianConfig,
    t: usize,
    q: &Quantization,
    lagrangian: f64,
    delta_l: Option<f64>,
    merged: Vec<(ClusterId, ClusterId)>,
    accepted: bool,
) -> Result<TraceEntry> {
    Ok(TraceEntry {
        t,
        quantization: q.clone(),
        lagrangian,
        delta_l,
        merged,
        leakage: l0(jr, q),
        utility: q.utility(&cfg.utility)?,
        component_count: None,
        accepted,
    })
}
