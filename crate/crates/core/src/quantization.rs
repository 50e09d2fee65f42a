//! Quantizations of the public alphabet and the two worst-case utilities.
//!
//! A [`Quantization`] is a partition of the `X` alphabet; each cluster is
//! released as one codeword. Clusters are identified by their smallest
//! member index ([`ClusterId`]), which survives merges and keeps traces
//! reproducible.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::range::{ConditionalRange, JointRange};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodewordPolicy {
    /// Arithmetic mean of the member values.
    #[default]
    Centroid,
    /// Value of the member with the smallest index.
    Representative,
}

/// Smallest `X` index in a cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClusterId(pub usize);

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    members: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    codeword: Option<f64>,
}

impl Cluster {
    pub fn id(&self) -> ClusterId {
        ClusterId(self.members[0])
    }

    /// Member indices, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn codeword(&self) -> Option<f64> {
        self.codeword
    }
}

/// Pairwise dissimilarity between a public value and its codeword.
#[derive(Clone, Copy)]
pub struct Distance {
    name: &'static str,
    f: fn(f64, f64) -> f64,
}

impl Distance {
    pub const ABSOLUTE: Distance = Distance {
        name: "absolute",
        f: |a, b| (a - b).abs(),
    };

    pub const SQUARED: Distance = Distance {
        name: "squared",
        f: |a, b| (a - b) * (a - b),
    };

    /// `f` must be symmetric, non-negative and zero on the diagonal.
    pub const fn custom(name: &'static str, f: fn(f64, f64) -> f64) -> Self {
        Distance { name, f }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn eval(&self, a: f64, b: f64) -> f64 {
        (self.f)(a, b)
    }
}

impl Default for Distance {
    fn default() -> Self {
        Distance::ABSOLUTE
    }
}

impl fmt::Debug for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Distance({})", self.name)
    }
}

impl PartialEq for Distance {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UtilityKind {
    /// `U₁ = I₀(X→X̂)`: worst-case resolution of `X` through the release.
    #[serde(rename = "u1")]
    Resolution,
    /// `U₂ = −max d(x, x̂)`: negated worst-case distortion.
    #[serde(rename = "u2")]
    MaxDistortion,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtilityChoice {
    pub kind: UtilityKind,
    pub distance: Distance,
}

impl UtilityChoice {
    pub fn resolution() -> Self {
        UtilityChoice {
            kind: UtilityKind::Resolution,
            distance: Distance::ABSOLUTE,
        }
    }

    pub fn max_distortion() -> Self {
        UtilityChoice {
            kind: UtilityKind::MaxDistortion,
            distance: Distance::ABSOLUTE,
        }
    }

    pub fn with_distance(mut self, distance: Distance) -> Self {
        self.distance = distance;
        self
    }

    pub fn needs_values(&self) -> bool {
        self.kind == UtilityKind::MaxDistortion
    }
}

/// A partition of the `X` alphabet with one codeword per cluster.
#[derive(Clone, Debug)]
pub struct Quantization {
    alphabet_len: usize,
    clusters: Vec<Cluster>,
    policy: CodewordPolicy,
    values: Option<Arc<[f64]>>,
}

impl Serialize for Quantization {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Quantization", 2)?;
        st.serialize_field("policy", &self.policy)?;
        st.serialize_field("clusters", &self.clusters)?;
        st.end()
    }
}

impl PartialEq for Quantization {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet_len == other.alphabet_len
            && self.policy == other.policy
            && self.clusters == other.clusters
    }
}

impl Quantization {
    /// One cluster per symbol, i.e. the unquantized release.
    pub fn singletons(jr: &JointRange, policy: CodewordPolicy) -> Self {
        let clusters = (0..jr.x_len()).map(|x| vec![x]).collect();
        Quantization::build(jr.x_len(), shared_values(jr), clusters, policy)
    }

    pub fn all_in_one(jr: &JointRange, policy: CodewordPolicy) -> Self {
        let clusters = vec![(0..jr.x_len()).collect()];
        Quantization::build(jr.x_len(), shared_values(jr), clusters, policy)
    }

    pub fn from_clusters(
        jr: &JointRange,
        clusters: Vec<Vec<usize>>,
        policy: CodewordPolicy,
    ) -> Result<Self> {
        let n = jr.x_len();
        let mut seen = vec![false; n];
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(Error::contract("empty cluster"));
            }
            for &x in cluster {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, len: n });
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::contract(format!("x index {x} in two clusters")));
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::contract(format!("x index {x} is not covered")));
        }
        Ok(Quantization::build(n, shared_values(jr), clusters, policy))
    }

    /// Builds a quantization from one block label per `X` symbol.
    pub fn from_labels(jr: &JointRange, labels: &[usize], policy: CodewordPolicy) -> Result<Self> {
        if labels.len() != jr.x_len() {
            return Err(Error::contract(format!(
                "expected {} labels, got {}",
                jr.x_len(),
                labels.len()
            )));
        }
        let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
        for (x, &label) in labels.iter().enumerate() {
            match blocks.iter_mut().find(|(l, _)| *l == label) {
                Some((_, members)) => members.push(x),
                None => blocks.push((label, vec![x])),
            }
        }
        let clusters = blocks.into_iter().map(|(_, m)| m).collect();
        Ok(Quantization::build(jr.x_len(), shared_values(jr), clusters, policy))
    }

    fn build(
        alphabet_len: usize,
        values: Option<Arc<[f64]>>,
        clusters: Vec<Vec<usize>>,
        policy: CodewordPolicy,
    ) -> Self {
        let mut clusters: Vec<Cluster> = clusters
            .into_iter()
            .map(|mut members| {
                members.sort_unstable();
                let codeword = values.as_deref().map(|v| codeword(&members, v, policy));
                Cluster { members, codeword }
            })
            .collect();
        clusters.sort_unstable_by_key(|c| c.members[0]);
        Quantization {
            alphabet_len,
            clusters,
            policy,
            values,
        }
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    pub fn policy(&self) -> CodewordPolicy {
        self.policy
    }

    /// Number of clusters.
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Clusters ordered by [`ClusterId`].
    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, id: ClusterId) -> Option<&Cluster> {
        self.position(id).map(|i| &self.clusters[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = ClusterId> + '_ {
        self.clusters.iter().map(Cluster::id)
    }

    fn position(&self, id: ClusterId) -> Option<usize> {
        self.clusters
            .binary_search_by_key(&id.0, |c| c.members[0])
            .ok()
    }

    fn require(&self, id: ClusterId) -> Result<usize> {
        self.position(id)
            .ok_or_else(|| Error::contract(format!("no cluster with id {id}")))
    }

    /// Member lists, ascending, ordered by cluster id.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }

    /// Cluster position of every `X` symbol.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.alphabet_len];
        for (i, c) in self.clusters.iter().enumerate() {
            for &x in &c.members {
                labels[x] = i;
            }
        }
        labels
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters.iter().map(Cluster::len).max().unwrap_or(0)
    }

    pub fn has_values(&self) -> bool {
        self.values.is_some()
    }

    /// Fuses clusters `a` and `b`; every other cluster is left untouched.
    pub fn merge(&self, a: ClusterId, b: ClusterId) -> Result<Self> {
        if a == b {
            return Err(Error::contract(format!("cannot merge cluster {a} with itself")));
        }
        let (ia, ib) = (self.require(a)?, self.require(b)?);
        let mut members = self.clusters[ia].members.clone();
        members.extend_from_slice(&self.clusters[ib].members);
        members.sort_unstable();
        let codeword = self
            .values
            .as_deref()
            .map(|v| codeword(&members, v, self.policy));

        let mut clusters = Vec::with_capacity(self.clusters.len() - 1);
        let merged = Cluster { members, codeword };
        let mut pending = Some(merged);
        for (i, c) in self.clusters.iter().enumerate() {
            if i == ia || i == ib {
                continue;
            }
            if let Some(m) = pending.as_ref() {
                if m.members[0] < c.members[0] {
                    clusters.push(pending.take().unwrap());
                }
            }
            clusters.push(c.clone());
        }
        clusters.extend(pending);

        Ok(Quantization {
            alphabet_len: self.alphabet_len,
            clusters,
            policy: self.policy,
            values: self.values.clone(),
        })
    }

    /// `d̄(𝒳) = max_{x∈𝒳} d(x, x̂)` for one cluster.
    pub fn cluster_distortion(&self, id: ClusterId, distance: Distance) -> Result<f64> {
        let values = self.values_or_err()?;
        let c = &self.clusters[self.require(id)?];
        Ok(distortion(&c.members, c.codeword.unwrap_or(0.0), values, distance))
    }

    /// `d̄` of the cluster that merging `a` and `b` would create.
    pub fn merged_distortion(&self, a: ClusterId, b: ClusterId, distance: Distance) -> Result<f64> {
        let values = self.values_or_err()?;
        let (ia, ib) = (self.require(a)?, self.require(b)?);
        let mut members = self.clusters[ia].members.clone();
        members.extend_from_slice(&self.clusters[ib].members);
        members.sort_unstable();
        let cw = codeword(&members, values, self.policy);
        Ok(distortion(&members, cw, values, distance))
    }

    pub fn max_distortion(&self, distance: Distance) -> Result<f64> {
        let values = self.values_or_err()?;
        Ok(self
            .clusters
            .iter()
            .map(|c| distortion(&c.members, c.codeword.unwrap_or(0.0), values, distance))
            .fold(0.0, f64::max))
    }

    /// `U₁` or `U₂` of the release.
    pub fn utility(&self, u: &UtilityChoice) -> Result<f64> {
        match u.kind {
            UtilityKind::Resolution => {
                Ok(log2(self.alphabet_len) - log2(self.max_cluster_size()))
            }
            UtilityKind::MaxDistortion => Ok(-self.max_distortion(u.distance)?),
        }
    }

    /// `⟦S|𝒳⟧` for every cluster, in cluster order.
    pub fn cond_ranges(&self, jr: &JointRange) -> Vec<ConditionalRange> {
        self.assert_matches(jr);
        self.clusters
            .iter()
            .map(|c| {
                let mut r = ConditionalRange::empty(jr.s_len());
                for &x in &c.members {
                    r.union_with(jr.range_unchecked(x));
                }
                r
            })
            .collect()
    }

    pub(crate) fn assert_matches(&self, jr: &JointRange) {
        assert_eq!(
            self.alphabet_len,
            jr.x_len(),
            "quantization built for a different X alphabet"
        );
    }

    fn values_or_err(&self) -> Result<&[f64]> {
        self.values
            .as_deref()
            .ok_or_else(|| Error::config("distortion needs numeric x-values"))
    }
}

fn shared_values(jr: &JointRange) -> Option<Arc<[f64]>> {
    jr.x_values().map(Arc::from)
}

fn codeword(members: &[usize], values: &[f64], policy: CodewordPolicy) -> f64 {
    match policy {
        CodewordPolicy::Centroid => {
            members.iter().map(|&x| values[x]).sum::<f64>() / members.len() as f64
        }
        CodewordPolicy::Representative => values[members[0]],
    }
}

fn distortion(members: &[usize], codeword: f64, values: &[f64], distance: Distance) -> f64 {
    members
        .iter()
        .map(|&x| distance.eval(values[x], codeword))
        .fold(0.0, f64::max)
}

pub(crate) fn log2(n: usize) -> f64 {
    (n as f64).log2()
}
