use serde_json::{json, Value};
use uvpriv::graph::{component_count, maximin_information};
use uvpriv::greedy::TraceEntry;
use uvpriv::measures::{b0, i0_forward, l0, min_range_size};
use uvpriv::{ClusterId, CodewordPolicy, Error, JointRange, Quantization, Result, UtilityChoice};

pub const SCHEMA: u32 = 1;

pub fn quantization(jr: &JointRange, q: &Quantization) -> Value {
    let ids = jr.x_alphabet();
    let clusters: Vec<Value> = q
        .clusters()
        .iter()
        .map(|c| {
            json!({
                "id": ids[c.id().0].id,
                "members": c.members().iter().map(|&x| &ids[x].id).collect::<Vec<_>>(),
                "s_range": jr
                    .cond_range_cluster(c.members())
                    .expect("non-empty cluster")
                    .iter()
                    .map(|s| &jr.s_alphabet()[s].id)
                    .collect::<Vec<_>>(),
                "codeword": c.codeword(),
            })
        })
        .collect();
    json!({ "policy": q.policy(), "clusters": clusters })
}

pub fn measures(jr: &JointRange, q: &Quantization, utility: Option<&UtilityChoice>) -> Result<Value> {
    let mut m = json!({
        "l0": l0(jr, q),
        "b0": b0(jr, q),
        "i0": i0_forward(jr, q),
        "istar": maximin_information(jr, q),
        "components": component_count(jr, q),
        "min_range_size": min_range_size(jr, q),
        "cluster_count": q.len(),
        "u1": q.utility(&UtilityChoice::resolution())?,
    });
    if q.has_values() {
        m["u2"] = json!(q.utility(&UtilityChoice::max_distortion())?);
    }
    if let Some(u) = utility {
        m["utility"] = json!(q.utility(u)?);
    }
    Ok(m)
}

pub fn trace(jr: &JointRange, entries: &[TraceEntry]) -> Value {
    let id = |c: ClusterId| &jr.x_alphabet()[c.0].id;
    Value::Array(
        entries
            .iter()
            .map(|e| {
                json!({
                    "t": e.t,
                    "lagrangian": e.lagrangian,
                    "delta_l": e.delta_l,
                    "leakage": e.leakage,
                    "utility": e.utility,
                    "component_count": e.component_count,
                    "accepted": e.accepted,
                    "merged": e.merged.iter().map(|&(a, b)| [id(a), id(b)]).collect::<Vec<_>>(),
                    "quantization": quantization(jr, &e.quantization),
                })
            })
            .collect(),
    )
}

/// Rebuilds a quantization from the `quantization` object of an earlier output.
pub fn read_quantization(jr: &JointRange, doc: &Value, policy: CodewordPolicy) -> Result<Quantization> {
    let q = doc.get("quantization").unwrap_or(doc);
    let clusters = q
        .get("clusters")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Config("quantization JSON has no clusters array".into()))?;
    let mut blocks = Vec::with_capacity(clusters.len());
    for c in clusters {
        let members = c
            .get("members")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Config("cluster without members".into()))?;
        let block = members
            .iter()
            .map(|m| {
                let id = m
                    .as_str()
                    .ok_or_else(|| Error::Config(format!("member {m} is not a string")))?;
                jr.x_index_of(id)
                    .ok_or_else(|| Error::Config(format!("unknown x-symbol {id:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        blocks.push(block);
    }
    Quantization::from_clusters(jr, blocks, policy).map_err(|e| Error::Config(e.to_string()))
}
