//! Membership and inclusion relations.
//!
//! Element membership compares a requested multiplicity `m` against the
//! stored one `n` (`m - n ~ 0` for `~` in `<=`, `<`, `==`); on a plain
//! set both `m` and the comparison collapse to "is it there".
//!
//! Set inclusion walks the *left* operand once and probes the right by
//! key, so its cost is `O(|Y1|)` — independent of `|Y2|`. All four
//! inclusion flavours fall out of a single accumulated difference:
//!
//! * any member of `Y1` exceeding its multiplicity in `Y2` refutes all
//!   of them at once;
//! * otherwise `Y1 <= Y2`, and strictness/exactness reduce to how much
//!   total multiplicity `Y2` has to spare and whether it has extra
//!   members.
//!
//! Summing the non-negative per-member differences is exact even in
//! floating point for one crucial case: the sum is zero iff every term
//! is zero, so the "exactly equal multiplicities" checks never suffer
//! rounding.

use crate::element::{validate_member, Element, MemberValue, ValidatedMember};
use crate::hset::HSet;

/// How a requested multiplicity relates to the stored one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    /// `m <= n`: at least `m` copies present (the default membership).
    Le,
    /// `m < n`: strictly more than `m` copies present.
    Lt,
    /// `m == n`: exactly `m` copies present.
    Eq,
}

/// Membership of an already-validated element.
///
/// On a set the multiplicity request degenerates to presence.
pub fn inclusion_element(e: &Element, h: &HSet, multiplicity: f64, kind: RelationKind) -> bool {
    let n = h.multiplicity_of(e);
    if !h.is_generalized() {
        return n >= 1.0;
    }
    match kind {
        RelationKind::Le => multiplicity <= n,
        RelationKind::Lt => multiplicity < n,
        RelationKind::Eq => multiplicity == n,
    }
}

/// Membership of a raw value: anything that does not validate to an
/// element (`Null`, empty lists, non-finite numbers) is simply not a
/// member.
pub fn inclusion_member(
    raw: &MemberValue,
    h: &HSet,
    multiplicity: f64,
    kind: RelationKind,
) -> bool {
    match validate_member(raw) {
        Ok(ValidatedMember::Element(e)) => inclusion_element(&e, h, multiplicity, kind),
        Ok(ValidatedMember::Empty) | Err(_) => false,
    }
}

/// Vectorized default membership (`m = 1`, `<=`) for a batch of raw
/// values; each answer costs one lookup.
pub fn inclusion_batch(raw: &[MemberValue], h: &HSet) -> Vec<bool> {
    raw.iter()
        .map(|v| inclusion_member(v, h, 1.0, RelationKind::Le))
        .collect()
}

/// The inclusion family in one pass over `h1`.
///
/// * `strictly=false, exactly=false`: subset, every multiplicity in
///   `h1` is available in `h2`.
/// * `strictly=true, exactly=false`: proper subset, additionally `h2`
///   holds something `h1` does not (an extra member or extra copies).
/// * `exactly=true`: shared members must match multiplicity exactly;
///   `h2` may (strict) or must not (non-strict) have extra members.
pub fn included(h1: &HSet, h2: &HSet, strictly: bool, exactly: bool) -> bool {
    let store1 = h1.store();
    let store2 = h2.store();
    let mut spare = 0.0f64; // total multiplicity h2 has to spare on shared members
    for (key, m1) in store1.table.iter() {
        let v1 = m1.value();
        let v2 = match store2.table.get(key) {
            Some(m2) => m2.value(),
            None => return false,
        };
        if v2 < v1 {
            return false;
        }
        spare += v2 - v1;
    }
    let n1 = store1.table.len();
    let n2 = store2.table.len();
    match (strictly, exactly) {
        (false, false) => true,
        (true, false) => spare > 0.0 || n1 < n2,
        (false, true) => spare == 0.0 && n1 <= n2,
        (true, true) => spare == 0.0 && n1 < n2,
    }
}

/// Same members with the same multiplicities; a set and a multiset of
/// all-1 counts are equal.
pub fn equal(h1: &HSet, h2: &HSet) -> bool {
    if h1.size_support() != h2.size_support() {
        return false;
    }
    let store1 = h1.store();
    let store2 = h2.store();
    store1.table.iter().all(|(key, m1)| {
        store2
            .table
            .get(key)
            .is_some_and(|m2| m1.value() == m2.value())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Element;

    fn mset(pairs: &[(i64, f64)]) -> HSet {
        HSet::multiset_of(pairs.iter().map(|&(x, m)| (Element::int(x), m))).unwrap()
    }

    fn set(xs: &[i64]) -> HSet {
        HSet::set_of(xs.iter().map(|&x| Element::int(x)))
    }

    #[test]
    fn membership_against_multiset() {
        let y = mset(&[(7, 3.0)]);
        let a = MemberValue::Num(7.0);
        assert!(inclusion_member(&a, &y, 2.0, RelationKind::Le));
        assert!(inclusion_member(&a, &y, 3.0, RelationKind::Le));
        assert!(!inclusion_member(&a, &y, 3.0, RelationKind::Lt));
        assert!(inclusion_member(&a, &y, 2.0, RelationKind::Lt));
        assert!(inclusion_member(&a, &y, 3.0, RelationKind::Eq));
        assert!(!inclusion_member(&a, &y, 2.0, RelationKind::Eq));
        assert!(!inclusion_member(&MemberValue::Num(8.0), &y, 1.0, RelationKind::Le));
    }

    #[test]
    fn membership_against_set_ignores_multiplicity() {
        let y = set(&[7]);
        let a = MemberValue::Num(7.0);
        for kind in [RelationKind::Le, RelationKind::Lt, RelationKind::Eq] {
            assert!(inclusion_element(&Element::int(7), &y, 5.0, kind));
        }
        assert!(inclusion_member(&a, &y, 99.0, RelationKind::Lt));
    }

    #[test]
    fn invalid_members_are_never_members() {
        let y = set(&[1]);
        assert!(!inclusion_member(&MemberValue::Num(f64::NAN), &y, 1.0, RelationKind::Le));
        assert!(!inclusion_member(&MemberValue::Null, &y, 1.0, RelationKind::Le));
        assert!(!inclusion_member(&MemberValue::List(vec![]), &y, 1.0, RelationKind::Le));
    }

    #[test]
    fn empty_set_element_is_a_real_member() {
        let y = HSet::set_of(vec![Element::empty_set(), Element::int(1)]);
        assert!(inclusion_element(&Element::empty_set(), &y, 1.0, RelationKind::Le));
        let without = set(&[1]);
        assert!(!inclusion_element(&Element::empty_set(), &without, 1.0, RelationKind::Le));
    }

    #[test]
    fn batch_membership() {
        let y = mset(&[(1, 2.0), (3, 1.0)]);
        let queries = vec![
            MemberValue::Num(1.0),
            MemberValue::Num(2.0),
            MemberValue::Num(3.0),
            MemberValue::Null,
        ];
        assert_eq!(inclusion_batch(&queries, &y), [true, false, true, false]);
    }

    #[test]
    fn inclusion_flavours() {
        let y1 = mset(&[(1, 1.0), (2, 2.0)]);
        let y2 = mset(&[(1, 2.0), (2, 2.0), (3, 1.0)]);
        assert!(included(&y1, &y2, false, false));
        assert!(included(&y1, &y2, true, false));
        assert!(!included(&y1, &y2, false, true), "multiplicities differ");
        assert!(!included(&y1, &y2, true, true));
    }

    #[test]
    fn exact_inclusion_requires_matching_multiplicities() {
        let y1 = mset(&[(1, 2.0)]);
        let y2 = mset(&[(1, 2.0), (2, 1.0)]);
        assert!(included(&y1, &y2, false, true));
        assert!(included(&y1, &y2, true, true));
        let y3 = mset(&[(1, 2.0)]);
        assert!(included(&y1, &y3, false, true));
        assert!(!included(&y1, &y3, true, true), "nothing extra in y3");
    }

    #[test]
    fn missing_member_refutes_everything() {
        let y1 = set(&[1, 9]);
        let y2 = set(&[1, 2, 3]);
        for strictly in [false, true] {
            for exactly in [false, true] {
                assert!(!included(&y1, &y2, strictly, exactly));
            }
        }
    }

    #[test]
    fn empty_set_is_included_in_everything() {
        let empty = HSet::new_set();
        let y = mset(&[(1, 0.5)]);
        assert!(included(&empty, &y, false, false));
        assert!(included(&empty, &y, true, false));
        assert!(included(&empty, &y, false, true));
        assert!(included(&empty, &y, true, true));
        let empty2 = HSet::new_multiset();
        assert!(included(&empty, &empty2, false, false));
        assert!(!included(&empty, &empty2, true, false));
        assert!(included(&empty, &empty2, false, true));
        assert!(!included(&empty, &empty2, true, true));
    }

    #[test]
    fn set_vs_multiset_mixing() {
        // A set behaves as the all-1 multiset on both sides.
        let s = set(&[1, 2]);
        let m = mset(&[(1, 1.0), (2, 1.0), (3, 2.0)]);
        assert!(included(&s, &m, false, false));
        assert!(included(&s, &m, false, true));
        let m1 = mset(&[(1, 2.0)]);
        assert!(!included(&m1, &s, false, false), "not enough copies of 1");
    }

    #[test]
    fn equality() {
        assert!(equal(&set(&[1, 2]), &set(&[2, 1])));
        assert!(!equal(&set(&[1]), &set(&[1, 2])));
        assert!(equal(&set(&[1, 2]), &mset(&[(1, 1.0), (2, 1.0)])));
        assert!(!equal(&set(&[1, 2]), &mset(&[(1, 1.0), (2, 2.0)])));
        assert!(equal(&mset(&[(5, 2.5)]), &mset(&[(5, 2.5)])));
        assert!(equal(&HSet::new_set(), &HSet::new_multiset()));
    }

    #[test]
    fn equality_matches_exact_mutual_inclusion() {
        let cases = [
            (mset(&[(1, 1.0)]), mset(&[(1, 1.0)])),
            (mset(&[(1, 1.0)]), mset(&[(1, 2.0)])),
            (mset(&[(1, 1.0), (2, 3.0)]), mset(&[(2, 3.0), (1, 1.0)])),
            (set(&[1, 2]), mset(&[(1, 1.0), (2, 1.0)])),
        ];
        for (a, b) in &cases {
            let both = included(a, b, false, true) && included(b, a, false, true);
            assert_eq!(equal(a, b), both);
        }
    }
}
