//! Generalization-and-suppression baseline for k-anonymity.
//!
//! Repeatedly takes the cluster with the smallest conditional range below
//! `k` and merges it into its nearest cluster until every released value is
//! consistent with at least `k` secrets. Utility plays no part.

use crate::error::{Error, Result};
use crate::quantization::{ClusterId, CodewordPolicy, Distance, Quantization};
use crate::range::JointRange;

/// Nearest means closest codeword when the alphabet is numeric, otherwise
/// closest cluster id.
pub fn sweeney_baseline(
    jr: &JointRange,
    k: usize,
    policy: CodewordPolicy,
    distance: Distance,
) -> Result<Quantization> {
    if k == 0 {
        return Err(Error::contract("k-anonymity needs k ≥ 1"));
    }
    if k > jr.s_len() {
        return Err(Error::Infeasible(format!(
            "{k}-anonymity is impossible with only {} secret values",
            jr.s_len()
        )));
    }
    let mut q = Quantization::singletons(jr, policy);
    loop {
        let ranges = q.cond_ranges(jr);
        let offender = q
            .clusters()
            .iter()
            .zip(&ranges)
            .filter(|(_, r)| r.len() < k)
            .min_by_key(|(c, r)| (r.len(), c.id()))
            .map(|(c, _)| c);
        let Some(offender) = offender else {
            return Ok(q);
        };
        let partner = nearest(&q, offender.id(), distance);
        q = q.merge(offender.id(), partner)?;
    }
}

fn nearest(q: &Quantization, id: ClusterId, distance: Distance) -> ClusterId {
    let me = q.cluster(id).expect("live cluster");
    let key = |c: &crate::quantization::Cluster| match (me.codeword(), c.codeword()) {
        (Some(a), Some(b)) => distance.eval(a, b),
        _ => c.id().0.abs_diff(id.0) as f64,
    };
    q.clusters()
        .iter()
        .filter(|c| c.id() != id)
        .min_by(|a, b| key(a).total_cmp(&key(b)).then(a.id().cmp(&b.id())))
        .expect("k ≤ |S| leaves a partner")
        .id()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{b0, is_k_anonymous};
    use crate::quantization::log2;
    use crate::testutil::{arb_instance, toy, toy_valued, TOY_VALUES};
    use proptest::prelude::*;

    const P: CodewordPolicy = CodewordPolicy::Centroid;

    #[test]
    fn toy_extremes() {
        let jr = toy();
        let d = Distance::ABSOLUTE;
        assert_eq!(sweeney_baseline(&jr, 1, P, d).unwrap().len(), 7);
        assert_eq!(sweeney_baseline(&jr, 6, P, d).unwrap().len(), 1);
        assert!(matches!(sweeney_baseline(&jr, 7, P, d), Err(Error::Infeasible(_))));
        assert!(sweeney_baseline(&jr, 0, P, d).is_err());
    }

    #[test]
    fn numeric_partner_is_nearest_codeword() {
        // x2 (0.1) is the first offender; x1 (0.2) is closest
        let jr = toy_valued(TOY_VALUES);
        let q = sweeney_baseline(&jr, 2, P, Distance::ABSOLUTE).unwrap();
        assert!(q.blocks().contains(&vec![0, 1]) || q.blocks().iter().any(|b| b.starts_with(&[0, 1])));
        assert!(is_k_anonymous(&jr, &q, 2).unwrap());
    }

    proptest! {
        #[test]
        fn output_is_k_anonymous((jr, _) in arb_instance(8, 9), k in 1usize..9) {
            prop_assume!(k <= jr.s_len());
            let q = sweeney_baseline(&jr, k, P, Distance::ABSOLUTE).unwrap();
            prop_assert!(is_k_anonymous(&jr, &q, k).unwrap());
            for j in 1..=jr.s_len() {
                prop_assert_eq!(is_k_anonymous(&jr, &q, j).unwrap(), b0(&jr, &q) >= log2(j));
            }
        }
    }
}
