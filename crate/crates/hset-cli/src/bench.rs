//! Scaling benchmarks: membership queries against a growing set, and
//! each operation under both copy semantics.
//!
//! Wall time is measured with `Instant` around tight repetition loops
//! and reported as the median over `repeats` samples, one CSV row per
//! case: `kind,op,semantic,size1,size2,batch,median_ns` (nanoseconds
//! per batch for inclusion cases, per operation call otherwise).
//! Operands are disjoint shuffled integer ranges, so hashing load is
//! uniform and nothing collides across operands.

use std::hint::black_box;
use std::time::Instant;

use hset_core::element::{Element, MemberValue};
use hset_core::hset::HSet;
use hset_core::operations::{hset_operation, OpName, OpSpec, Semantic};
use hset_core::relations::inclusion_batch;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKind {
    Inclusion,
    Operation,
}

impl BenchKind {
    pub fn label(self) -> &'static str {
        match self {
            BenchKind::Inclusion => "inclusion",
            BenchKind::Operation => "operation",
        }
    }
}

fn semantic_label(s: Semantic) -> &'static str {
    match s {
        Semantic::Refer => "refer",
        Semantic::Value => "value",
    }
}

#[derive(Debug, Clone)]
pub struct BenchCase {
    pub kind: BenchKind,
    /// Required for operation cases, ignored for inclusion.
    pub op: Option<OpName>,
    pub semantic: Semantic,
    /// Size of the first operand / the queried set.
    pub size1: usize,
    /// Size of the second operand (operation cases).
    pub size2: usize,
    /// Queries per timed batch (inclusion cases).
    pub batch: usize,
    /// Timing samples; the median is reported. At least 3.
    pub repeats: usize,
    /// Use multiset operands instead of sets.
    pub generalized: bool,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub kind: BenchKind,
    pub op: Option<OpName>,
    pub semantic: Semantic,
    pub size1: usize,
    pub size2: usize,
    pub batch: usize,
    pub median_ns: u64,
}

/// Shuffled dense integer operand `offset .. offset+size`; multisets
/// get small mixed multiplicities.
pub fn build_operand(size: usize, offset: i64, generalized: bool, rng: &mut ChaCha12Rng) -> HSet {
    let mut values: Vec<i64> = (offset..offset + size as i64).collect();
    values.shuffle(rng);
    if generalized {
        HSet::multiset_of(
            values
                .iter()
                .map(|&v| (Element::int(v), (v.unsigned_abs() % 7 + 1) as f64)),
        )
        .expect("multiplicities are positive")
    } else {
        HSet::set_of(values.into_iter().map(Element::int))
    }
}

fn median_ns(mut samples: Vec<f64>) -> u64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("timings are finite"));
    samples[samples.len() / 2].round() as u64
}

pub fn run_case(case: &BenchCase) -> BenchRow {
    assert!(case.repeats >= 3, "need at least 3 repeats for a median");
    let mut rng = ChaCha12Rng::seed_from_u64(case.seed);
    let median = match case.kind {
        BenchKind::Inclusion => run_inclusion(case, &mut rng),
        BenchKind::Operation => run_operation(case, &mut rng),
    };
    BenchRow {
        kind: case.kind,
        op: case.op,
        semantic: case.semantic,
        size1: case.size1,
        size2: if case.kind == BenchKind::Operation {
            case.size2
        } else {
            0
        },
        batch: if case.kind == BenchKind::Inclusion {
            case.batch
        } else {
            0
        },
        median_ns: median,
    }
}

/// Time a batch of membership queries (about half hits) against a
/// set of `size1` elements; reports ns per batch.
fn run_inclusion(case: &BenchCase, rng: &mut ChaCha12Rng) -> u64 {
    let x = build_operand(case.size1, 0, case.generalized, rng);
    let upper = 2 * case.size1.max(1) as i64;
    let queries: Vec<MemberValue> = (0..case.batch)
        .map(|_| MemberValue::Num(rng.random_range(0..upper) as f64))
        .collect();
    // Enough inner repetitions that one sample is well above timer
    // resolution, fewer as batches grow.
    let reps = (20_000 / case.batch.max(1)).max(1);
    let mut hits = 0usize;
    hits += inclusion_batch(&queries, &x).iter().filter(|&&b| b).count(); // warm-up
    let mut samples = Vec::with_capacity(case.repeats);
    for _ in 0..case.repeats {
        let t0 = Instant::now();
        for _ in 0..reps {
            hits += inclusion_batch(&queries, &x).iter().filter(|&&b| b).count();
        }
        samples.push(t0.elapsed().as_nanos() as f64 / reps as f64);
    }
    black_box(hits);
    median_ns(samples)
}

/// Time one operation call, h2 disjoint from h1; reports ns per call.
fn run_operation(case: &BenchCase, rng: &mut ChaCha12Rng) -> u64 {
    let op = case.op.expect("operation case requires an op");
    let spec = OpSpec::for_name(op);
    let h1 = build_operand(case.size1, 0, case.generalized, rng);
    let h2 = build_operand(case.size2, case.size1 as i64, case.generalized, rng);

    // Intersection under Refer shrinks h1 to (here) nothing on first
    // application, so repeated in-place timing would measure the wrong
    // thing: rebuild untimed and time single shots instead.
    let destructive = case.semantic == Semantic::Refer && spec.identity_is_universe;
    let mut samples = Vec::with_capacity(case.repeats);
    if destructive {
        for _ in 0..case.repeats {
            let fresh = h1.clone_of(None);
            let t0 = Instant::now();
            let r = hset_operation(&fresh, &[&h2], &spec, Semantic::Refer);
            samples.push(t0.elapsed().as_nanos() as f64);
            black_box(r.size_support());
        }
    } else {
        // Repeated application drifts multiset counts but touches the
        // same keys each round, so the per-call cost stays put.
        let reps = match case.semantic {
            Semantic::Refer => 64,
            Semantic::Value => 4,
        };
        black_box(hset_operation(&h1, &[&h2], &spec, case.semantic).size_support());
        for _ in 0..case.repeats {
            let t0 = Instant::now();
            for _ in 0..reps {
                black_box(hset_operation(&h1, &[&h2], &spec, case.semantic).size_support());
            }
            samples.push(t0.elapsed().as_nanos() as f64 / reps as f64);
        }
    }
    median_ns(samples)
}

pub fn csv_header() -> &'static str {
    "kind,op,semantic,size1,size2,batch,median_ns"
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(csv_header());
    out.push('\n');
    for row in rows {
        let op = row.op.map_or_else(|| "in".to_string(), |o| o.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.kind.label(),
            op,
            semantic_label(row.semantic),
            row.size1,
            row.size2,
            row.batch,
            row.median_ns
        ));
    }
    out
}
