//! Hartley entropy and the worst-case measures built on it.
//!
//! All values are in bits. Cardinality comparisons (k-anonymity, minimum
//! range size) are done on integers, never on logarithms.

use crate::error::{Error, Result};
use crate::quantization::{log2, Quantization};
use crate::range::JointRange;

/// `H₀ = log₂ n`.
pub fn h0(alphabet_size: usize) -> Result<f64> {
    if alphabet_size == 0 {
        return Err(Error::contract("H₀ of an empty range"));
    }
    Ok(log2(alphabet_size))
}

/// Smallest `|⟦S|𝒳⟧|` over the clusters of `q`.
pub fn min_range_size(jr: &JointRange, q: &Quantization) -> usize {
    q.cond_ranges(jr).iter().map(|r| r.len()).min().unwrap_or(0)
}

/// Largest `|⟦S|𝒳⟧|` over the clusters of `q`.
pub fn max_range_size(jr: &JointRange, q: &Quantization) -> usize {
    q.cond_ranges(jr).iter().map(|r| r.len()).max().unwrap_or(0)
}

/// `B₀(S|X̂) = min_𝒳 log₂|⟦S|𝒳⟧|`.
pub fn b0(jr: &JointRange, q: &Quantization) -> f64 {
    log2(min_range_size(jr, q))
}

/// `L₀(S→X̂) = H₀(S) − B₀(S|X̂)`.
pub fn l0(jr: &JointRange, q: &Quantization) -> f64 {
    log2(jr.s_len()) - b0(jr, q)
}

/// `I₀(S→X̂) = H₀(S) − max_𝒳 log₂|⟦S|𝒳⟧|`.
pub fn i0_forward(jr: &JointRange, q: &Quantization) -> f64 {
    log2(jr.s_len()) - log2(max_range_size(jr, q))
}

/// Every released value is consistent with at least `k` secrets.
pub fn is_k_anonymous(jr: &JointRange, q: &Quantization, k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::contract("k-anonymity needs k ≥ 1"));
    }
    Ok(min_range_size(jr, q) >= k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantization::CodewordPolicy;
    use crate::testutil::{arb_instance, toy};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const P: CodewordPolicy = CodewordPolicy::Centroid;

    fn example2_q1(jr: &JointRange) -> Quantization {
        Quantization::from_clusters(jr, vec![vec![0, 1, 6], vec![2, 4], vec![3, 5]], P).unwrap()
    }

    #[test]
    fn hartley_entropy() {
        assert_eq!(h0(1).unwrap(), 0.0);
        assert_abs_diff_eq!(h0(6).unwrap(), 2.584962500721156, epsilon = 1e-9);
        assert_abs_diff_eq!(h0(7).unwrap(), 2.807354922057604, epsilon = 1e-9);
        assert!(h0(0).is_err());
    }

    #[test]
    fn toy_measures() {
        let jr = toy();
        let single = Quantization::singletons(&jr, P);
        let one = Quantization::all_in_one(&jr, P);
        let q1 = example2_q1(&jr);
        let log6 = 6f64.log2();

        assert_eq!(b0(&jr, &single), 0.0);
        assert_abs_diff_eq!(b0(&jr, &one), log6, epsilon = 1e-12);
        assert_abs_diff_eq!(b0(&jr, &q1), 1.0, epsilon = 1e-12);

        assert_abs_diff_eq!(l0(&jr, &single), log6, epsilon = 1e-12);
        assert_eq!(l0(&jr, &one), 0.0);
        assert_abs_diff_eq!(l0(&jr, &q1), log6 - 1.0, epsilon = 1e-12);

        assert_abs_diff_eq!(i0_forward(&jr, &single), log6 - 1.0, epsilon = 1e-12);
        assert_eq!(i0_forward(&jr, &one), 0.0);
        assert_abs_diff_eq!(i0_forward(&jr, &q1), log6 - 3f64.log2(), epsilon = 1e-12);
    }

    #[test]
    fn toy_k_anonymity() {
        let jr = toy();
        let single = Quantization::singletons(&jr, P);
        let one = Quantization::all_in_one(&jr, P);
        assert!(is_k_anonymous(&jr, &single, 1).unwrap());
        assert!(!is_k_anonymous(&jr, &single, 2).unwrap());
        assert!(is_k_anonymous(&jr, &one, 6).unwrap());
        assert!(!is_k_anonymous(&jr, &one, 7).unwrap());
        assert!(is_k_anonymous(&jr, &one, 0).is_err());
    }

    proptest! {
        #[test]
        fn measure_ordering_and_k_anonymity_equivalence((jr, labels) in arb_instance(8, 9)) {
            let q = Quantization::from_labels(&jr, &labels, P).unwrap();
            let i0 = i0_forward(&jr, &q);
            let l = l0(&jr, &q);
            prop_assert!(i0 >= 0.0);
            prop_assert!(i0 <= l + 1e-12);
            prop_assert!(l <= log2(jr.s_len()) + 1e-12);
            for k in 1..=jr.s_len() {
                prop_assert_eq!(is_k_anonymous(&jr, &q, k).unwrap(), b0(&jr, &q) >= log2(k));
            }
        }

        #[test]
        fn cluster_range_is_union((jr, labels) in arb_instance(8, 9)) {
            let a: Vec<usize> = (0..jr.x_len()).filter(|&x| labels[x] % 2 == 0).collect();
            let b: Vec<usize> = (0..jr.x_len()).filter(|&x| labels[x] % 2 == 1).collect();
            prop_assume!(!a.is_empty() && !b.is_empty());
            let mut ab = a.clone();
            ab.extend(&b);
            let mut expect = jr.cond_range_cluster(&a).unwrap();
            expect.union_with(&jr.cond_range_cluster(&b).unwrap());
            prop_assert_eq!(jr.cond_range_cluster(&ab).unwrap(), expect);
        }

        #[test]
        fn coarsening_is_monotone((jr, labels) in arb_instance(8, 9)) {
            let q = Quantization::from_labels(&jr, &labels, P).unwrap();
            prop_assume!(q.len() >= 2);
            let ids: Vec<_> = q.ids().collect();
            let m = q.merge(ids[0], ids[ids.len() - 1]).unwrap();
            prop_assert!(b0(&jr, &m) >= b0(&jr, &q));
            prop_assert!(l0(&jr, &m) <= l0(&jr, &q));
            let one = Quantization::all_in_one(&jr, P);
            prop_assert_eq!(l0(&jr, &one), 0.0);
            prop_assert_eq!(i0_forward(&jr, &one), 0.0);
        }
    }
}
