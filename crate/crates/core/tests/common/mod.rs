#![allow(dead_code)]

use proptest::prelude::*;
use uvpriv::JointRange;

pub const TOY_PAIRS: [(&str, &str); 8] = [
    ("s1", "x1"),
    ("s1", "x2"),
    ("s2", "x1"),
    ("s3", "x3"),
    ("s3", "x4"),
    ("s4", "x5"),
    ("s5", "x6"),
    ("s6", "x7"),
];

pub const TOY_VALUES: [f64; 7] = [0.2, 0.1, 0.4, 0.3, 0.6, 1.5, 1.0];

pub fn toy() -> JointRange {
    JointRange::from_id_pairs(TOY_PAIRS).unwrap()
}

pub fn toy_valued(values: &[f64]) -> JointRange {
    toy().with_x_values(values).unwrap()
}

/// Sets of x-symbol ids, e.g. `[["x1","x3"],["x2"]]`, as index blocks.
pub fn blocks(jr: &JointRange, sets: &[&[&str]]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = sets
        .iter()
        .map(|set| {
            let mut b: Vec<usize> = set.iter().map(|id| jr.x_index_of(id).unwrap()).collect();
            b.sort_unstable();
            b
        })
        .collect();
    out.sort_unstable_by_key(|b| b[0]);
    out
}

/// Random joint range with `|S| ≤ max_s`, `|X| ≤ max_x` and numeric x-values.
pub fn arb_joint_range(max_s: usize, max_x: usize) -> impl Strategy<Value = JointRange> {
    (1..=max_s, 1..=max_x)
        .prop_flat_map(|(ns, nx)| {
            (
                Just((ns, nx)),
                prop::collection::vec(prop::bool::weighted(0.25), ns * nx),
                prop::collection::vec(0..ns, nx),
                prop::collection::vec(0..nx, ns),
                prop::collection::vec(-10.0f64..10.0, nx),
            )
        })
        .prop_map(|((ns, nx), cells, x_hit, s_hit, values)| {
            let mut on = cells;
            for x in 0..nx {
                on[x_hit[x] * nx + x] = true;
            }
            for s in 0..ns {
                on[s * nx + s_hit[s]] = true;
            }
            let mut s_alpha = Vec::new();
            let mut x_alpha = Vec::new();
            let mut pairs = Vec::new();
            for s in 0..ns {
                s_alpha.push(uvpriv::Symbol::new(format!("s{s}")));
                for x in 0..nx {
                    if on[s * nx + x] {
                        pairs.push((s, x));
                    }
                }
            }
            for (x, v) in values.iter().enumerate() {
                x_alpha.push(uvpriv::Symbol::numeric(format!("x{x}"), *v));
            }
            JointRange::new(s_alpha, x_alpha, pairs).unwrap()
        })
}

/// Joint range plus one cluster label per x-symbol.
pub fn arb_instance(max_s: usize, max_x: usize) -> impl Strategy<Value = (JointRange, Vec<usize>)> {
    arb_joint_range(max_s, max_x).prop_flat_map(|jr| {
        let n = jr.x_len();
        (Just(jr), prop::collection::vec(0..n, n))
    })
}
