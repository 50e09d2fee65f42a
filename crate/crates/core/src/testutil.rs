use crate::range::JointRange;

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

pub const TOY_VALUES: &[f64] = &[0.2, 0.1, 0.4, 0.3, 0.6, 1.5, 1.0];
pub const TOY_VALUES_X7_FOUR: &[f64] = &[0.2, 0.1, 0.4, 0.3, 0.6, 1.5, 4.0];

/// Seven public symbols over six secrets; x1 and x2 share s1, x3 and x4 share s3.
pub fn toy() -> JointRange {
    JointRange::from_id_pairs(TOY_PAIRS).unwrap()
}

pub fn toy_valued(values: &[f64]) -> JointRange {
    toy().with_x_values(values).unwrap()
}

/// Random joint range with numeric x-values plus a random cluster labelling.
pub fn arb_instance(
    max_s: usize,
    max_x: usize,
) -> impl proptest::strategy::Strategy<Value = (JointRange, Vec<usize>)> {
    use proptest::prelude::*;
    (1..=max_s, 1..=max_x)
        .prop_flat_map(|(ns, nx)| {
            (
                Just((ns, nx)),
                proptest::collection::vec(proptest::bool::weighted(0.25), ns * nx),
                proptest::collection::vec(0usize..ns, nx),
                proptest::collection::vec(0usize..nx, ns),
                proptest::collection::vec(-10.0f64..10.0, nx),
                proptest::collection::vec(0usize..4, nx),
            )
        })
        .prop_map(|((ns, nx), cells, x_hit, s_hit, values, labels)| {
            // guarantee every symbol appears: seed one pair per x and per s
            let mut on = cells;
            for x in 0..nx {
                on[x_hit[x] * nx + x] = true;
            }
            for s in 0..ns {
                on[s * nx + s_hit[s]] = true;
            }
            let pairs = (0..ns)
                .flat_map(|s| (0..nx).map(move |x| (s, x)))
                .filter(|&(s, x)| on[s * nx + x])
                .map(|(s, x)| (format!("s{s}"), format!("x{x}")));
            let jr = JointRange::from_id_pairs(pairs).unwrap();
            // alphabets are interned by first appearance; keep labels aligned to ids
            let values: Vec<f64> = jr
                .x_alphabet()
                .iter()
                .map(|sym| values[sym.id[1..].parse::<usize>().unwrap()])
                .collect();
            let jr = jr.with_x_values(&values).unwrap();
            (jr, labels)
        })
}
