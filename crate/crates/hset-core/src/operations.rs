//! Variadic set/multiset operations over one pluggable engine.
//!
//! Every operation is two combinators: a logical one used when all
//! operands are plain sets (the result is a set), and a numeric one
//! over multiplicities used as soon as any operand is a multiset (the
//! result is a multiset; presence promotes to 1, absence to 0).
//!
//! The engine edits the *first* operand. Under [`Semantic::Refer`] it
//! edits `h1`'s store in place and the returned handle aliases `h1`;
//! under [`Semantic::Value`] it edits a fresh copy. Work is
//! proportional to the keys that can change: for operations whose
//! identity element is the empty set (union, sum, difference,
//! symmetric difference) only the keys of `h2..ha` are visited, so a
//! `Refer` application costs `O(|Y2| + .. + |Ya|)` no matter how big
//! `h1` is. Intersection's identity is the universe — keys absent from
//! the tail must be deleted — so it also walks `h1`. `Value` always
//! pays the extra `O(|Y1|)` for the copy, as does a plain-set `h1`
//! pulled into a numeric operation (its store is rewritten with
//! counts first, even under `Refer`).
//!
//! A combined multiplicity of 0 deletes the key: absence and
//! multiplicity 0 stay the same thing.

use std::collections::HashSet;
use std::fmt;

use crate::element::Key;
use crate::hset::{HSet, Multiplicity};

/// How the result relates to the first operand: `Refer` mutates it in
/// place and returns an aliasing handle, `Value` leaves it untouched
/// and returns an independent copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Semantic {
    #[default]
    Refer,
    Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpName {
    Intersection,
    Union,
    Sum,
    Difference,
    SymmDiff,
}

impl fmt::Display for OpName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpName::Intersection => "intersection",
            OpName::Union => "union",
            OpName::Sum => "sum",
            OpName::Difference => "difference",
            OpName::SymmDiff => "symmdiff",
        })
    }
}

// ----------------------------------------------------------------------
// Combinators. Each takes the per-key values of all operands, first
// operand first, and is well defined for any arity >= 1.

/// Conjunction: intersection keeps a member present everywhere.
pub fn all(v: &[bool]) -> bool {
    v.iter().all(|&b| b)
}

/// Disjunction: union keeps a member present anywhere.
pub fn any(v: &[bool]) -> bool {
    v.iter().any(|&b| b)
}

/// "Not implied": in the difference, a member survives if the first
/// operand has it and no later one does.
pub fn nimp(v: &[bool]) -> bool {
    v[0] && !v[1..].iter().any(|&b| b)
}

/// Parity: the symmetric difference keeps members present an odd
/// number of times, which is exactly the xor fold.
pub fn niff(v: &[bool]) -> bool {
    v.iter().fold(false, |acc, &b| acc ^ b)
}

/// Intersection of multiplicities.
pub fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Union of multiplicities.
pub fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Multiset sum.
pub fn sum_of(v: &[f64]) -> f64 {
    v.iter().sum()
}

/// Proper difference, clamped at zero. For several subtrahends this
/// equals the left fold of the binary form: once the running value
/// hits 0 it stays there, and otherwise the clamp never fires early.
pub fn pdif(v: &[f64]) -> f64 {
    let taken: f64 = v[1..].iter().sum();
    (v[0] - taken).max(0.0)
}

/// Symmetric difference of multiplicities, folded left:
/// `||v1 - v2| - v3| ...`. Not reorderable — unlike the others, the
/// grouping is part of the definition.
pub fn sdif(v: &[f64]) -> f64 {
    v[1..].iter().fold(v[0], |acc, &x| (acc - x).abs())
}

/// One operation = a name, its two combinators, and whether its
/// identity element is the universe (true only for intersection, which
/// therefore must also visit the first operand's own keys).
pub struct OpSpec {
    pub name: OpName,
    pub identity_is_universe: bool,
    logical: fn(&[bool]) -> bool,
    numeric: fn(&[f64]) -> f64,
}

impl OpSpec {
    pub fn for_name(name: OpName) -> OpSpec {
        match name {
            OpName::Intersection => OpSpec {
                name,
                identity_is_universe: true,
                logical: all,
                numeric: min_of,
            },
            OpName::Union => OpSpec {
                name,
                identity_is_universe: false,
                logical: any,
                numeric: max_of,
            },
            OpName::Sum => OpSpec {
                name,
                identity_is_universe: false,
                logical: any,
                numeric: sum_of,
            },
            OpName::Difference => OpSpec {
                name,
                identity_is_universe: false,
                logical: nimp,
                numeric: pdif,
            },
            OpName::SymmDiff => OpSpec {
                name,
                identity_is_universe: false,
                logical: niff,
                numeric: sdif,
            },
        }
    }

    pub fn combine_logical(&self, v: &[bool]) -> bool {
        (self.logical)(v)
    }

    pub fn combine_numeric(&self, v: &[f64]) -> f64 {
        (self.numeric)(v)
    }
}

/// Apply `spec` to `h1, rest[0], rest[1], ..` and store the result in
/// (a copy of) `h1` per `semantic`. Operands may alias each other —
/// every key is read from all operands before it is written.
pub fn hset_operation(h1: &HSet, rest: &[&HSet], spec: &OpSpec, semantic: Semantic) -> HSet {
    let numeric = h1.is_generalized() || rest.iter().any(|h| h.is_generalized());
    let target = match semantic {
        Semantic::Refer => h1.refer_to(None),
        Semantic::Value => h1.clone_of(None),
    };
    if numeric && !target.is_generalized() {
        // A set operand dragged into multiset arithmetic: rewrite its
        // store with counts. Under Refer this converts h1 itself.
        target.as_generalized();
    }

    // Keys that can change. Operands may repeat or alias, so dedup.
    let mut worklist: HashSet<Key> = HashSet::new();
    if spec.identity_is_universe {
        worklist.extend(target.snapshot_keys());
    }
    for h in rest {
        worklist.extend(h.snapshot_keys());
    }

    if numeric {
        let mut values: Vec<f64> = Vec::with_capacity(rest.len() + 1);
        for key in worklist {
            values.clear();
            values.push(target.multiplicity_of_key(&key));
            for h in rest {
                values.push(h.multiplicity_of_key(&key));
            }
            let out = spec.combine_numeric(&values);
            assert!(
                out.is_finite() && out >= 0.0,
                "{} combinator produced invalid multiplicity {out}",
                spec.name
            );
            let mut store = target.store_mut();
            if out == 0.0 {
                store.table.remove(&key);
            } else {
                store.table.insert(key, Multiplicity::Count(out));
            }
        }
    } else {
        let mut values: Vec<bool> = Vec::with_capacity(rest.len() + 1);
        for key in worklist {
            values.clear();
            values.push(target.contains_key(&key));
            for h in rest {
                values.push(h.contains_key(&key));
            }
            let mut store = target.store_mut();
            if spec.combine_logical(&values) {
                store.table.insert(key, Multiplicity::Present);
            } else {
                store.table.remove(&key);
            }
        }
    }
    target
}

pub fn intersection(h1: &HSet, rest: &[&HSet], semantic: Semantic) -> HSet {
    hset_operation(h1, rest, &OpSpec::for_name(OpName::Intersection), semantic)
}

pub fn union(h1: &HSet, rest: &[&HSet], semantic: Semantic) -> HSet {
    hset_operation(h1, rest, &OpSpec::for_name(OpName::Union), semantic)
}

/// Multiset sum (additive union).
pub fn setsum(h1: &HSet, rest: &[&HSet], semantic: Semantic) -> HSet {
    hset_operation(h1, rest, &OpSpec::for_name(OpName::Sum), semantic)
}

/// Difference `h1 \ rest[0] \ rest[1] ..` (left fold).
pub fn difference(h1: &HSet, rest: &[&HSet], semantic: Semantic) -> HSet {
    hset_operation(h1, rest, &OpSpec::for_name(OpName::Difference), semantic)
}

/// Symmetric difference, folded left over the operands.
pub fn symmdiff(h1: &HSet, rest: &[&HSet], semantic: Semantic) -> HSet {
    hset_operation(h1, rest, &OpSpec::for_name(OpName::SymmDiff), semantic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Element;
    use crate::relations::equal;

    fn mset(pairs: &[(i64, f64)]) -> HSet {
        HSet::multiset_of(pairs.iter().map(|&(x, m)| (Element::int(x), m))).unwrap()
    }

    fn set(xs: &[i64]) -> HSet {
        HSet::set_of(xs.iter().map(|&x| Element::int(x)))
    }

    #[test]
    fn union_takes_max_multiplicity() {
        let y1 = mset(&[(7, 1.0)]);
        let y2 = mset(&[(7, 3.0), (8, 2.0)]);
        let r = union(&y1, &[&y2], Semantic::Value);
        assert!(equal(&r, &mset(&[(7, 3.0), (8, 2.0)])));
    }

    #[test]
    fn intersection_takes_min_and_drops_zeroes() {
        let y1 = mset(&[(1, 2.0), (2, 1.0)]);
        let y2 = mset(&[(1, 0.5), (3, 9.0)]);
        let r = intersection(&y1, &[&y2], Semantic::Value);
        assert!(equal(&r, &mset(&[(1, 0.5)])));
        assert_eq!(r.size_support(), 1, "zero multiplicity means deleted");
    }

    #[test]
    fn difference_clamps_at_zero() {
        let y1 = mset(&[(5, 2.0)]);
        let y2 = mset(&[(5, 5.0)]);
        let r = difference(&y1, &[&y2], Semantic::Value);
        assert!(r.is_empty());
        assert!(r.is_generalized());
    }

    #[test]
    fn symmdiff_takes_absolute_difference() {
        let y1 = mset(&[(5, 2.0)]);
        let y2 = mset(&[(5, 5.0)]);
        let r = symmdiff(&y1, &[&y2], Semantic::Value);
        assert!(equal(&r, &mset(&[(5, 3.0)])));
    }

    #[test]
    fn sum_adds() {
        let r = setsum(&mset(&[(1, 2.0)]), &[&mset(&[(1, 0.5), (2, 1.0)])], Semantic::Value);
        assert!(equal(&r, &mset(&[(1, 2.5), (2, 1.0)])));
    }

    #[test]
    fn plain_sets_get_set_results() {
        let r = intersection(&set(&[1, 2, 3]), &[&set(&[2, 3, 4])], Semantic::Value);
        assert!(!r.is_generalized());
        assert!(equal(&r, &set(&[2, 3])));
        let r = symmdiff(&set(&[1, 2]), &[&set(&[2, 3])], Semantic::Value);
        assert!(equal(&r, &set(&[1, 3])));
        let r = difference(&set(&[1, 2]), &[&set(&[2, 3])], Semantic::Value);
        assert!(equal(&r, &set(&[1])));
    }

    #[test]
    fn union_and_sum_agree_on_sets() {
        let a = set(&[1, 2]);
        let b = set(&[2, 3]);
        let u = union(&a, &[&b], Semantic::Value);
        let s = setsum(&a, &[&b], Semantic::Value);
        assert!(!u.is_generalized() && !s.is_generalized());
        assert!(equal(&u, &s));
    }

    #[test]
    fn any_multiset_operand_makes_the_result_a_multiset() {
        let s = set(&[1, 2]);
        let m = mset(&[(2, 3.0)]);
        let r = setsum(&s, &[&m], Semantic::Value);
        assert!(r.is_generalized());
        assert!(equal(&r, &mset(&[(1, 1.0), (2, 4.0)])));
        assert!(!s.is_generalized(), "value semantics left h1 alone");
    }

    #[test]
    fn refer_converts_a_set_h1_in_place() {
        let s = set(&[1, 2]);
        let m = mset(&[(2, 3.0)]);
        let r = union(&s, &[&m], Semantic::Refer);
        assert!(r.aliases(&s));
        assert!(s.is_generalized(), "h1's own store switched to counts");
        assert!(equal(&s, &mset(&[(1, 1.0), (2, 3.0)])));
    }

    #[test]
    fn refer_mutates_h1_value_copies() {
        let h1 = set(&[1, 2, 3]);
        let h2 = set(&[2, 3, 4]);
        let r = intersection(&h1, &[&h2], Semantic::Refer);
        assert!(r.aliases(&h1));
        assert!(equal(&h1, &set(&[2, 3])), "h1 now holds the result");

        let h1 = set(&[1, 2, 3]);
        let r = intersection(&h1, &[&h2], Semantic::Value);
        assert!(!r.aliases(&h1));
        assert!(equal(&h1, &set(&[1, 2, 3])), "h1 untouched");
        assert!(equal(&r, &set(&[2, 3])));
    }

    #[test]
    fn empty_set_is_the_identity_except_for_intersection() {
        let empty = HSet::new_set();
        let y = mset(&[(1, 2.0), (2, 0.5)]);
        for name in [OpName::Union, OpName::Sum, OpName::Difference, OpName::SymmDiff] {
            let r = hset_operation(&y, &[&empty], &OpSpec::for_name(name), Semantic::Value);
            assert!(equal(&r, &y), "{name} with empty rhs is identity");
        }
        let r = intersection(&y, &[&empty], Semantic::Value);
        assert!(r.is_empty(), "intersection with empty annihilates");
    }

    #[test]
    fn intersection_with_a_superset_is_identity() {
        let y = mset(&[(1, 2.0), (2, 0.5)]);
        let sup = mset(&[(1, 2.0), (2, 2.0), (3, 1.0)]);
        let r = intersection(&y, &[&sup], Semantic::Value);
        assert!(equal(&r, &y));
    }

    #[test]
    fn difference_then_intersection_is_empty() {
        let y1 = set(&[1, 2, 3]);
        let y2 = set(&[2, 3]);
        let d = difference(&y1, &[&y2], Semantic::Value);
        let r = intersection(&d, &[&y2], Semantic::Refer);
        assert!(r.is_empty());
    }

    #[test]
    fn variadic_difference_matches_left_fold() {
        let r = difference(
            &mset(&[(7, 5.0)]),
            &[&mset(&[(7, 1.0)]), &mset(&[(7, 2.0)])],
            Semantic::Value,
        );
        assert!(equal(&r, &mset(&[(7, 2.0)])));
        // Folded by hand: (5 - 1) = 4, then (4 - 2) = 2.
        let step1 = difference(&mset(&[(7, 5.0)]), &[&mset(&[(7, 1.0)])], Semantic::Value);
        let step2 = difference(&step1, &[&mset(&[(7, 2.0)])], Semantic::Value);
        assert!(equal(&r, &step2));
    }

    #[test]
    fn variadic_symmdiff_is_grouping_sensitive() {
        let y1 = mset(&[(7, 1.0)]);
        let y2 = mset(&[(7, 2.0)]);
        let y3 = mset(&[(7, 3.0)]);
        // ||1-2|-3| = 2, but ||2-3|-1| = 0: operand order matters.
        let a = symmdiff(&y1, &[&y2, &y3], Semantic::Value);
        assert!(equal(&a, &mset(&[(7, 2.0)])));
        let b = symmdiff(&y2, &[&y3, &y1], Semantic::Value);
        assert!(b.is_empty());
    }

    #[test]
    fn operands_may_alias_the_target() {
        let y = mset(&[(1, 2.0), (2, 1.0)]);
        let alias = y.refer_to(None);
        let r = setsum(&y, &[&alias], Semantic::Refer);
        assert!(equal(&r, &mset(&[(1, 4.0), (2, 2.0)])));

        let s = set(&[1, 2]);
        let alias = s.refer_to(None);
        let r = symmdiff(&s, &[&alias], Semantic::Refer);
        assert!(r.is_empty(), "X symmdiff X is empty");
    }

    #[test]
    fn combinators_have_sane_arity_one_behaviour() {
        assert!(all(&[true]) && !all(&[false]));
        assert!(any(&[true]) && !any(&[false]));
        assert!(nimp(&[true]) && !nimp(&[false]));
        assert!(niff(&[true]) && !niff(&[false]));
        assert_eq!(min_of(&[3.0]), 3.0);
        assert_eq!(max_of(&[3.0]), 3.0);
        assert_eq!(sum_of(&[3.0]), 3.0);
        assert_eq!(pdif(&[3.0]), 3.0);
        assert_eq!(sdif(&[3.0]), 3.0);
    }

    #[test]
    fn nested_set_elements_flow_through_operations() {
        let inner = Element::set(vec![Element::int(1), Element::int(2)]);
        let y1 = HSet::set_of(vec![inner.clone(), Element::empty_set()]);
        let y2 = HSet::set_of(vec![inner.clone()]);
        let r = difference(&y1, &[&y2], Semantic::Value);
        assert!(equal(&r, &HSet::set_of(vec![Element::empty_set()])));
        assert!(r.contains(&Element::empty_set()));
        assert!(!r.contains(&inner));
    }
}
