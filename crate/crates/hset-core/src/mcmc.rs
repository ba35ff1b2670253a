//! Metropolis sampler for the beta random-graph model, built on the
//! container and its reference-semantics operations.
//!
//! The model puts an independent edge between vertices `i < j` with
//! probability `exp(b_i + b_j) / (1 + exp(b_i + b_j))`; the degree
//! sequence is sufficient, so a proposal flipping the edge set `F`
//! is accepted with probability
//! `min(exp(sum_{i in I_F} (d~_i - d_i) b_i), 1)` where `I_F` are the
//! incident vertices and `d~` the degrees after the flip.
//!
//! Chain state is carried by two containers that are *edited in
//! place* through `Refer` operations, exactly as an accumulator
//! should be: the edge set `X` (ids of present edges) and the degree
//! frequency multiset `Z` mapping each occurring degree to how many
//! vertices have it. Per accepted single flip both updates are O(1)-ish:
//! `X <- X symmdiff F`, and `Z` trades the flipped vertices' old
//! degree counts for their new ones.
//!
//! Edges are numbered rowwise: `id(i,j) = (i-1)(2n-i)/2 + (j-i)`,
//! a bijection from `1 <= i < j <= n` onto `1..=n(n-1)/2`. Vertices
//! and edge ids are 1-based throughout.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::element::Element;
use crate::hset::HSet;
use crate::operations::{difference, setsum, symmdiff, Semantic};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McmcError {
    #[error("vertex pair ({i},{j}) is not 1 <= i < j <= {n}")]
    InvalidVertexPair { i: usize, j: usize, n: usize },
    #[error("edge id {h} out of range 1..={max}")]
    InvalidEdgeId { h: u64, max: u64 },
    #[error("flip set is empty")]
    EmptyFlips,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
}

/// Edges with first vertex `<= i`, i.e. the id of the last edge in
/// row `i`.
fn row_end(i: u64, n: u64) -> u64 {
    i * n - i * (i + 1) / 2
}

/// Rowwise edge numbering, `1 <= i < j <= n` onto `1..=n(n-1)/2`.
pub fn edge_id(i: usize, j: usize, n: usize) -> Result<u64, McmcError> {
    if !(1 <= i && i < j && j <= n) {
        return Err(McmcError::InvalidVertexPair { i, j, n });
    }
    let (i, j, n) = (i as u64, j as u64, n as u64);
    Ok((i - 1) * (2 * n - i) / 2 + (j - i))
}

/// Inverse of [`edge_id`].
pub fn edge_pair(h: u64, n: usize) -> Result<(usize, usize), McmcError> {
    let nn = n as u64;
    let max = if n < 2 { 0 } else { row_end(nn - 1, nn) };
    if h == 0 || h > max {
        return Err(McmcError::InvalidEdgeId { h, max });
    }
    // Smallest row i with row_end(i) >= h.
    let (mut lo, mut hi) = (1u64, nn - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if row_end(mid, nn) >= h {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let i = lo;
    let j = i + (h - row_end(i - 1, nn));
    Ok((i as usize, j as usize))
}

/// The vertex parameters `b` of a beta model on `n = beta.len()`
/// vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaModel {
    beta: Vec<f64>,
}

impl BetaModel {
    pub fn new(beta: Vec<f64>) -> Result<BetaModel, McmcError> {
        if beta.len() < 2 {
            return Err(McmcError::InvalidModel(format!(
                "need at least 2 vertices, got {}",
                beta.len()
            )));
        }
        if let Some(bad) = beta.iter().find(|b| !b.is_finite()) {
            return Err(McmcError::InvalidModel(format!(
                "non-finite parameter {bad}"
            )));
        }
        Ok(BetaModel { beta })
    }

    /// The reference prior used throughout: `b_i ~ Normal(-1, 1)`.
    pub fn sample_standard(n: usize, rng: &mut impl Rng) -> Result<BetaModel, McmcError> {
        let normal = Normal::new(-1.0, 1.0).expect("valid parameters");
        BetaModel::new((0..n).map(|_| normal.sample(rng)).collect())
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn num_pairs(&self) -> u64 {
        let n = self.n() as u64;
        n * (n - 1) / 2
    }

    /// Stationary probability of the edge `{i,j}`, 1-based.
    pub fn edge_prob(&self, i: usize, j: usize) -> f64 {
        let s = self.beta[i - 1] + self.beta[j - 1];
        // Stable logistic: never overflows whichever sign s has.
        if s >= 0.0 {
            1.0 / (1.0 + (-s).exp())
        } else {
            let e = s.exp();
            e / (1.0 + e)
        }
    }
}

/// Where a chain starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartMode {
    /// An exact draw from the model itself (independent edges).
    Stationary,
    /// The empty graph.
    Sparse,
    /// The complete graph.
    Dense,
}

impl StartMode {
    pub fn label(self) -> &'static str {
        match self {
            StartMode::Stationary => "stationary",
            StartMode::Sparse => "sparse",
            StartMode::Dense => "dense",
        }
    }
}

/// Current graph plus the two derived statistics the sampler tracks.
///
/// `edges` is a set of edge-id elements; `degree_freq` is the multiset
/// `{degree[count], ...}` over all `n` vertices (so its cardinality is
/// always `n`); `degrees` caches the per-vertex degree.
#[derive(Debug)]
pub struct ChainState {
    edges: HSet,
    degree_freq: HSet,
    degrees: Vec<u64>,
    t: u64,
}

impl ChainState {
    /// State holding exactly the given edges, at time 0.
    pub fn from_edge_ids<I>(n: usize, ids: I) -> Result<ChainState, McmcError>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut degrees = vec![0u64; n];
        let edges = HSet::new_set();
        for h in ids {
            let (i, j) = edge_pair(h, n)?;
            if edges.contains(&edge_element(h)) {
                continue;
            }
            edges.insert(edge_element(h));
            degrees[i - 1] += 1;
            degrees[j - 1] += 1;
        }
        let degree_freq = frequency_multiset(&degrees)?;
        Ok(ChainState {
            edges,
            degree_freq,
            degrees,
            t: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn edges(&self) -> &HSet {
        &self.edges
    }

    pub fn degree_freq(&self) -> &HSet {
        &self.degree_freq
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Completed iterations.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Number of edges currently present.
    pub fn tie_count(&self) -> usize {
        self.edges.size_support()
    }

    pub fn contains_edge(&self, h: u64) -> bool {
        self.edges.contains(&edge_element(h))
    }

    /// Degrees recomputed from scratch by decoding the edge set —
    /// the slow path the incremental `degrees` cache must agree with.
    pub fn recompute_degrees(&self) -> Result<Vec<u64>, McmcError> {
        let n = self.n();
        let mut degrees = vec![0u64; n];
        for key in self.edges.members() {
            let e = crate::element::decode(key.as_str()).expect("edge keys are canonical");
            let h = e.as_num().expect("edge keys are numeric") as u64;
            let (i, j) = edge_pair(h, n)?;
            degrees[i - 1] += 1;
            degrees[j - 1] += 1;
        }
        Ok(degrees)
    }

    /// Degree frequencies recomputed from [`recompute_degrees`]
    /// (`ChainState::recompute_degrees`), for consistency checks
    /// against the incrementally maintained multiset.
    pub fn recompute_degree_freq(&self) -> Result<HSet, McmcError> {
        frequency_multiset(&self.recompute_degrees()?)
    }
}

fn edge_element(h: u64) -> Element {
    Element::num(h as f64).expect("edge ids are small integers")
}

fn degree_element(d: u64) -> Element {
    Element::num(d as f64).expect("degrees are small integers")
}

fn frequency_multiset(degrees: &[u64]) -> Result<HSet, McmcError> {
    let mut counts: HashMap<u64, f64> = HashMap::new();
    for &d in degrees {
        *counts.entry(d).or_insert(0.0) += 1.0;
    }
    HSet::multiset_of(counts.into_iter().map(|(d, c)| (degree_element(d), c)))
        .map_err(|e| McmcError::InvalidConfig(format!("degree frequencies: {e}")))
}

/// Draw a starting state.
pub fn sample_start(
    model: &BetaModel,
    mode: StartMode,
    rng: &mut impl Rng,
) -> Result<ChainState, McmcError> {
    let n = model.n();
    let ids: Vec<u64> = match mode {
        StartMode::Sparse => Vec::new(),
        StartMode::Dense => (1..=model.num_pairs()).collect(),
        StartMode::Stationary => {
            let mut ids = Vec::new();
            let mut h = 0u64;
            for i in 1..n {
                for _j in (i + 1)..=n {
                    h += 1;
                    if rng.random::<f64>() < model.edge_prob(i, _j) {
                        ids.push(h);
                    }
                }
            }
            ids
        }
    };
    ChainState::from_edge_ids(n, ids)
}

/// Validated, deduplicated flips with their vertex pairs.
fn check_flips(flips: &[u64], n: usize, max: u64) -> Result<Vec<(u64, usize, usize)>, McmcError> {
    if flips.is_empty() {
        return Err(McmcError::EmptyFlips);
    }
    let mut out: Vec<(u64, usize, usize)> = Vec::with_capacity(flips.len());
    for &h in flips {
        if h == 0 || h > max {
            return Err(McmcError::InvalidEdgeId { h, max });
        }
        if out.iter().any(|&(seen, _, _)| seen == h) {
            continue; // a set of flips: repeats collapse
        }
        let (i, j) = edge_pair(h, n)?;
        out.push((h, i, j));
    }
    Ok(out)
}

/// Per-vertex degree changes a flip set would cause, as
/// `(vertex, old degree, new degree)` for every incident vertex.
fn degree_changes(state: &ChainState, flips: &[(u64, usize, usize)]) -> Vec<(usize, u64, u64)> {
    let mut delta: HashMap<usize, i64> = HashMap::new();
    for &(h, i, j) in flips {
        let sign = if state.contains_edge(h) { -1 } else { 1 };
        *delta.entry(i).or_insert(0) += sign;
        *delta.entry(j).or_insert(0) += sign;
    }
    let mut changes: Vec<(usize, u64, u64)> = delta
        .into_iter()
        .map(|(v, d)| {
            let old = state.degrees[v - 1];
            let new = (old as i64 + d) as u64;
            (v, old, new)
        })
        .collect();
    changes.sort_unstable();
    changes
}

/// Metropolis acceptance probability for flipping the edge set
/// `flips` from the current state.
pub fn acceptance_prob(
    model: &BetaModel,
    state: &ChainState,
    flips: &[u64],
) -> Result<f64, McmcError> {
    let flips = check_flips(flips, model.n(), model.num_pairs())?;
    let log_q: f64 = degree_changes(state, &flips)
        .iter()
        .map(|&(v, old, new)| (new as f64 - old as f64) * model.beta()[v - 1])
        .sum();
    Ok(log_q.exp().min(1.0))
}

/// Apply a flip set to the state through the container operations:
/// `X <- X symmdiff F` with reference semantics, and `Z` trades the
/// incident vertices' old degrees for their new ones.
pub fn apply_flips(state: &mut ChainState, flips: &[u64]) -> Result<(), McmcError> {
    let n = state.n();
    let max = if n < 2 { 0 } else { row_end(n as u64 - 1, n as u64) };
    let flips = check_flips(flips, n, max)?;
    let changes = degree_changes(state, &flips);

    let flip_set = HSet::set_of(flips.iter().map(|&(h, _, _)| edge_element(h)));
    symmdiff(&state.edges, &[&flip_set], Semantic::Refer);

    let mut old_counts: HashMap<u64, f64> = HashMap::new();
    let mut new_counts: HashMap<u64, f64> = HashMap::new();
    for &(_, old, new) in &changes {
        *old_counts.entry(old).or_insert(0.0) += 1.0;
        *new_counts.entry(new).or_insert(0.0) += 1.0;
    }
    let freq = |counts: HashMap<u64, f64>| {
        HSet::multiset_of(counts.into_iter().map(|(d, c)| (degree_element(d), c)))
            .expect("counts are positive")
    };
    difference(&state.degree_freq, &[&freq(old_counts)], Semantic::Refer);
    setsum(&state.degree_freq, &[&freq(new_counts)], Semantic::Refer);

    for &(v, _, new) in &changes {
        state.degrees[v - 1] = new;
    }
    Ok(())
}

/// One Metropolis iteration: propose a uniform single-edge flip,
/// accept or reject, bump the clock either way.
pub fn step(model: &BetaModel, state: &mut ChainState, rng: &mut impl Rng) -> bool {
    let h = rng.random_range(1..=model.num_pairs());
    let q = acceptance_prob(model, state, &[h]).expect("drawn id is valid");
    let accepted = rng.random::<f64>() < q;
    if accepted {
        apply_flips(state, &[h]).expect("drawn id is valid");
    }
    state.t += 1;
    accepted
}

/// A full chain run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n: usize,
    pub iterations: u64,
    pub start: StartMode,
    pub seed: u64,
    /// Centered moving-average window for the acceptance trace.
    pub window: usize,
    /// Degree ECDF snapshots at `t = 1, 1+k, 1+2k, ...`.
    pub snapshot_every: u64,
}

impl ChainConfig {
    pub fn new(n: usize, iterations: u64, start: StartMode, seed: u64) -> ChainConfig {
        ChainConfig {
            n,
            iterations,
            start,
            seed,
            window: 150,
            snapshot_every: 1000,
        }
    }
}

/// Degree ECDF at one point in time: `(degree, cumulative fraction of
/// vertices with at most that degree)`, degrees ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfSnapshot {
    pub t: u64,
    pub points: Vec<(u64, f64)>,
}

/// Everything a chain run records.
#[derive(Debug)]
pub struct Trace {
    pub accepted: Vec<bool>,
    /// Edge count after each iteration.
    pub ties: Vec<usize>,
    /// Centered moving average of the accept flags, window truncated
    /// at both ends.
    pub movavg: Vec<f64>,
    pub snapshots: Vec<EcdfSnapshot>,
    pub final_state: ChainState,
}

impl Trace {
    /// `iter,accepted,movavg,ties` — one row per iteration.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iter,accepted,movavg,ties\n");
        for (idx, (&a, (&m, &ties))) in self
            .accepted
            .iter()
            .zip(self.movavg.iter().zip(self.ties.iter()))
            .enumerate()
        {
            let _ = writeln!(out, "{},{},{:.6},{}", idx + 1, u8::from(a), m, ties);
        }
        out
    }

    /// `snapshot_t,degree,cum_fraction` — snapshots concatenated,
    /// degrees ascending within each.
    pub fn ecdf_csv(&self) -> String {
        let mut out = String::from("snapshot_t,degree,cum_fraction\n");
        for snap in &self.snapshots {
            for &(degree, fraction) in &snap.points {
                let _ = writeln!(out, "{},{},{:.6}", snap.t, degree, fraction);
            }
        }
        out
    }
}

/// Centered moving average with truncated windows: entry `i` averages
/// the flags at indices `[i - (w-1)/2, i + w/2]` clipped to the data.
pub fn moving_average(flags: &[bool], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    let n = flags.len();
    let mut prefix = vec![0u64; n + 1];
    for (i, &f) in flags.iter().enumerate() {
        prefix[i + 1] = prefix[i] + u64::from(f);
    }
    let left = (window - 1) / 2;
    let right = window / 2;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) as f64 / (hi + 1 - lo) as f64
        })
        .collect()
}

fn ecdf_points(state: &ChainState) -> Vec<(u64, f64)> {
    let n = state.n() as f64;
    let mut pairs: Vec<(u64, f64)> = state
        .degree_freq
        .entries()
        .iter()
        .map(|(key, count)| {
            let e = crate::element::decode(key.as_str()).expect("degree keys are canonical");
            (e.as_num().expect("degree keys are numeric") as u64, *count)
        })
        .collect();
    pairs.sort_unstable_by_key(|&(d, _)| d);
    let mut cum = 0.0;
    pairs
        .into_iter()
        .map(|(d, count)| {
            cum += count;
            (d, cum / n)
        })
        .collect()
}

/// Run one chain to completion, deterministically in `config.seed`.
pub fn run_chain(config: &ChainConfig, model: &BetaModel) -> Result<Trace, McmcError> {
    if model.n() != config.n {
        return Err(McmcError::InvalidConfig(format!(
            "model has {} vertices, config asks for {}",
            model.n(),
            config.n
        )));
    }
    if config.n < 2 {
        return Err(McmcError::InvalidConfig("need at least 2 vertices".into()));
    }
    if config.iterations == 0 {
        return Err(McmcError::InvalidConfig("iterations must be >= 1".into()));
    }
    if config.window == 0 {
        return Err(McmcError::InvalidConfig("window must be >= 1".into()));
    }
    if config.snapshot_every == 0 {
        return Err(McmcError::InvalidConfig(
            "snapshot-every must be >= 1".into(),
        ));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut state = sample_start(model, config.start, &mut rng)?;
    let iters = config.iterations as usize;
    let mut accepted = Vec::with_capacity(iters);
    let mut ties = Vec::with_capacity(iters);
    let mut snapshots = Vec::new();
    while state.t < config.iterations {
        accepted.push(step(model, &mut state, &mut rng));
        ties.push(state.tie_count());
        if (state.t - 1) % config.snapshot_every == 0 {
            snapshots.push(EcdfSnapshot {
                t: state.t,
                points: ecdf_points(&state),
            });
        }
    }
    let movavg = moving_average(&accepted, config.window);
    Ok(Trace {
        accepted,
        ties,
        movavg,
        snapshots,
        final_state: state,
    })
}
