//! The hash-backed container: a set or multiset of elements behind a
//! shared, mutable store.
//!
//! An [`HSet`] value is a *handle*. Copying a handle with
//! [`HSet::refer_to`] aliases the same store, so mutations through one
//! handle are visible through all of them; [`HSet::clone_of`] is the
//! only way to get an independent copy. This distinction is what the
//! operation engine's `Refer`/`Value` semantics are built on.
//!
//! Sets store a presence marker per key, multisets store a positive
//! numeric count; `generalized` says which mode the store is in.
//! Multiplicity 0 is never stored — an absent key *is* multiplicity 0.

use std::cell::{Ref, RefCell, RefMut};
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::element::{
    validate_member, Element, ElementError, Key, MemberValue, ValidatedMember,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HsetError {
    #[error("{members} members but {multiplicities} multiplicities")]
    LengthMismatch {
        members: usize,
        multiplicities: usize,
    },
    #[error("multiplicity {value} is not a positive finite number")]
    InvalidMultiplicity { value: f64 },
    #[error(transparent)]
    Element(#[from] ElementError),
}

/// What a key maps to: bare presence in a set, a positive count in a
/// multiset. Keeping the two cases distinct makes converting between
/// set and multiset mode a real rewrite of the table, not a flag flip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplicity {
    Present,
    Count(f64),
}

impl Multiplicity {
    /// Numeric view: presence counts as 1.
    pub fn value(self) -> f64 {
        match self {
            Multiplicity::Present => 1.0,
            Multiplicity::Count(m) => m,
        }
    }
}

#[derive(Debug)]
pub(crate) struct Store {
    pub(crate) table: HashMap<Key, Multiplicity>,
    pub(crate) generalized: bool,
}

/// Handle to a shared set/multiset store. See the module docs for the
/// aliasing rules; there is deliberately no `Clone` impl, because both
/// ways of copying ([`refer_to`](HSet::refer_to) and
/// [`clone_of`](HSet::clone_of)) deserve to be visible in the code.
pub struct HSet {
    store: Rc<RefCell<Store>>,
}

impl HSet {
    /// Empty set.
    pub fn new_set() -> HSet {
        HSet::with_store(HashMap::new(), false)
    }

    /// Empty multiset.
    pub fn new_multiset() -> HSet {
        HSet::with_store(HashMap::new(), true)
    }

    fn with_store(table: HashMap<Key, Multiplicity>, generalized: bool) -> HSet {
        HSet {
            store: Rc::new(RefCell::new(Store { table, generalized })),
        }
    }

    /// General constructor from raw member values.
    ///
    /// Invalid members abort construction. Values that denote no
    /// element (`Null`, empty lists) are skipped along with their
    /// multiplicity. Supplying a non-empty `multiplicities` slice
    /// forces a multiset and requires one positive finite multiplicity
    /// per member; duplicates sum in a multiset and collapse in a set.
    pub fn new(
        members: &[MemberValue],
        multiplicities: Option<&[f64]>,
        generalized: bool,
    ) -> Result<HSet, HsetError> {
        let explicit = multiplicities.filter(|m| !m.is_empty());
        if let Some(mults) = explicit {
            if mults.len() != members.len() {
                return Err(HsetError::LengthMismatch {
                    members: members.len(),
                    multiplicities: mults.len(),
                });
            }
            for &m in mults {
                if !m.is_finite() || m <= 0.0 {
                    return Err(HsetError::InvalidMultiplicity { value: m });
                }
            }
        }
        let generalized = generalized || explicit.is_some();
        let mut table: HashMap<Key, Multiplicity> = HashMap::with_capacity(members.len());
        for (i, raw) in members.iter().enumerate() {
            let element = match validate_member(raw)? {
                ValidatedMember::Element(e) => e,
                ValidatedMember::Empty => continue,
            };
            let key = element.key();
            if generalized {
                let add = explicit.map_or(1.0, |m| m[i]);
                let entry = table.entry(key).or_insert(Multiplicity::Count(0.0));
                *entry = Multiplicity::Count(entry.value() + add);
            } else {
                table.insert(key, Multiplicity::Present);
            }
        }
        Ok(HSet::with_store(table, generalized))
    }

    /// Set from ready-made elements.
    pub fn set_of<I: IntoIterator<Item = Element>>(elements: I) -> HSet {
        let table = elements
            .into_iter()
            .map(|e| (e.key(), Multiplicity::Present))
            .collect();
        HSet::with_store(table, false)
    }

    /// Multiset from (element, multiplicity) pairs; duplicates sum.
    pub fn multiset_of<I: IntoIterator<Item = (Element, f64)>>(
        pairs: I,
    ) -> Result<HSet, HsetError> {
        let mut table: HashMap<Key, Multiplicity> = HashMap::new();
        for (e, m) in pairs {
            if !m.is_finite() || m <= 0.0 {
                return Err(HsetError::InvalidMultiplicity { value: m });
            }
            let entry = table.entry(e.key()).or_insert(Multiplicity::Count(0.0));
            *entry = Multiplicity::Count(entry.value() + m);
        }
        Ok(HSet::with_store(table, true))
    }

    // ------------------------------------------------------------------
    // Copying and mode changes

    /// New handle to the *same* store. With `Some(g)` the store is
    /// converted to the requested mode first, which is visible through
    /// every existing handle.
    pub fn refer_to(&self, generalized: Option<bool>) -> HSet {
        if let Some(g) = generalized {
            convert_in_place(&mut self.store.borrow_mut(), g);
        }
        HSet {
            store: Rc::clone(&self.store),
        }
    }

    /// Independent deep copy, optionally converted to the requested
    /// mode. The original is never touched.
    pub fn clone_of(&self, generalized: Option<bool>) -> HSet {
        let src = self.store.borrow();
        let copy = HSet::with_store(src.table.clone(), src.generalized);
        drop(src);
        if let Some(g) = generalized {
            convert_in_place(&mut copy.store.borrow_mut(), g);
        }
        copy
    }

    /// This store as a multiset (every present element at count 1);
    /// converts in place and returns another handle to it.
    pub fn as_generalized(&self) -> HSet {
        self.refer_to(Some(true))
    }

    /// This store as a set (counts collapse to presence); converts in
    /// place and returns another handle to it.
    pub fn as_not_generalized(&self) -> HSet {
        self.refer_to(Some(false))
    }

    pub fn is_generalized(&self) -> bool {
        self.store.borrow().generalized
    }

    /// Do two handles share one store?
    pub fn aliases(&self, other: &HSet) -> bool {
        Rc::ptr_eq(&self.store, &other.store)
    }

    // ------------------------------------------------------------------
    // Reading

    /// Number of distinct elements.
    pub fn size_support(&self) -> usize {
        self.store.borrow().table.len()
    }

    /// Total multiplicity: equals `size_support` for a set, the sum of
    /// counts for a multiset.
    pub fn cardinality(&self) -> f64 {
        self.store
            .borrow()
            .table
            .values()
            .map(|m| m.value())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.store.borrow().table.is_empty()
    }

    /// `(key, multiplicity)` pairs in ascending bytewise key order.
    pub fn entries(&self) -> Vec<(Key, f64)> {
        let store = self.store.borrow();
        let mut out: Vec<(Key, f64)> = store
            .table
            .iter()
            .map(|(k, m)| (k.clone(), m.value()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Member keys in ascending bytewise order.
    pub fn members(&self) -> Vec<Key> {
        self.entries().into_iter().map(|(k, _)| k).collect()
    }

    /// Multiplicities aligned with [`members`](HSet::members); a set
    /// reports 1 for every member.
    pub fn multiplicities(&self) -> Vec<f64> {
        self.entries().into_iter().map(|(_, m)| m).collect()
    }

    /// Multiplicity of an element; 0 means absent.
    pub fn multiplicity_of(&self, e: &Element) -> f64 {
        self.multiplicity_of_key(&e.key())
    }

    pub fn multiplicity_of_key(&self, key: &Key) -> f64 {
        self.store
            .borrow()
            .table
            .get(key)
            .map_or(0.0, |m| m.value())
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.contains_key(&e.key())
    }

    pub fn contains_key(&self, key: &Key) -> bool {
        self.store.borrow().table.contains_key(key)
    }

    // ------------------------------------------------------------------
    // Writing (through any handle)

    /// Add one occurrence: presence in a set, +1 to the count in a
    /// multiset.
    pub fn insert(&self, e: Element) {
        let key = e.key();
        let mut store = self.store.borrow_mut();
        if store.generalized {
            let entry = store.table.entry(key).or_insert(Multiplicity::Count(0.0));
            *entry = Multiplicity::Count(entry.value() + 1.0);
        } else {
            store.table.insert(key, Multiplicity::Present);
        }
    }

    /// Remove an element entirely (all occurrences); reports whether it
    /// was present.
    pub fn remove(&self, e: &Element) -> bool {
        self.store.borrow_mut().table.remove(&e.key()).is_some()
    }

    // ------------------------------------------------------------------
    // Crate plumbing for the relation/operation engines

    pub(crate) fn store(&self) -> Ref<'_, Store> {
        self.store.borrow()
    }

    pub(crate) fn store_mut(&self) -> RefMut<'_, Store> {
        self.store.borrow_mut()
    }

    pub(crate) fn snapshot_keys(&self) -> Vec<Key> {
        self.store.borrow().table.keys().cloned().collect()
    }
}

fn convert_in_place(store: &mut Store, generalized: bool) {
    if store.generalized == generalized {
        return;
    }
    for m in store.table.values_mut() {
        *m = if generalized {
            Multiplicity::Count(m.value())
        } else {
            Multiplicity::Present
        };
    }
    store.generalized = generalized;
}

impl fmt::Display for HSet {
    /// Sets render as their key form, multisets as `{k1[m1],...}` with
    /// members in ascending key order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let generalized = self.is_generalized();
        f.write_str("{")?;
        for (i, (key, mult)) in self.entries().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{key}")?;
            if generalized {
                write!(f, "[{mult}]")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HSet({self}, generalized={})",
            self.is_generalized()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations;

    fn mv(x: f64) -> MemberValue {
        MemberValue::Num(x)
    }

    #[test]
    fn constructor_collapses_duplicates_in_sets() {
        let h = HSet::new(&[mv(1.0), mv(1.0), mv(2.0)], None, false).unwrap();
        assert!(!h.is_generalized());
        assert_eq!(h.size_support(), 2);
        assert_eq!(h.to_string(), "{1,2}");
    }

    #[test]
    fn constructor_sums_duplicates_in_multisets() {
        let h = HSet::new(&[mv(5.0), mv(5.0)], Some(&[2.0, 3.0]), true).unwrap();
        assert!(h.is_generalized());
        assert_eq!(h.to_string(), "{5[5]}");
        // Multiplicities alone force a multiset.
        let h = HSet::new(&[mv(7.0)], Some(&[2.0]), false).unwrap();
        assert!(h.is_generalized());
        assert_eq!(h.multiplicity_of(&Element::int(7)), 2.0);
    }

    #[test]
    fn constructor_without_multiplicities_counts_occurrences() {
        let h = HSet::new(&[mv(5.0), mv(5.0)], None, true).unwrap();
        assert_eq!(h.to_string(), "{5[2]}");
    }

    #[test]
    fn constructor_skips_empty_members_with_their_multiplicities() {
        let h = HSet::new(
            &[mv(1.0), MemberValue::Null, MemberValue::List(vec![])],
            Some(&[2.0, 9.0, 9.0]),
            true,
        )
        .unwrap();
        assert_eq!(h.to_string(), "{1[2]}");
        assert_eq!(h.cardinality(), 2.0);
    }

    #[test]
    fn constructor_errors() {
        let e = HSet::new(&[mv(1.0), mv(2.0)], Some(&[1.0]), true).unwrap_err();
        assert!(matches!(e, HsetError::LengthMismatch { .. }));
        let e = HSet::new(&[mv(1.0)], Some(&[0.0]), true).unwrap_err();
        assert!(matches!(e, HsetError::InvalidMultiplicity { .. }));
        let e = HSet::new(&[mv(1.0)], Some(&[-2.0]), true).unwrap_err();
        assert!(matches!(e, HsetError::InvalidMultiplicity { .. }));
        let e = HSet::new(&[mv(f64::NAN)], None, false).unwrap_err();
        assert!(matches!(e, HsetError::Element(_)));
    }

    #[test]
    fn size_and_cardinality() {
        let h = HSet::new(&[mv(1.0), mv(2.0)], Some(&[2.0, 0.5]), true).unwrap();
        assert_eq!(h.size_support(), 2);
        assert_eq!(h.cardinality(), 2.5);
        let s = HSet::new(&[mv(1.0), mv(2.0), mv(2.0)], None, false).unwrap();
        assert_eq!(s.size_support(), 2);
        assert_eq!(s.cardinality(), 2.0);
        assert_eq!(HSet::new_set().cardinality(), 0.0);
    }

    #[test]
    fn members_and_multiplicities_align() {
        let h = HSet::new(&[mv(2.0), mv(1.0)], Some(&[3.0, 1.0]), true).unwrap();
        let members: Vec<String> = h.members().iter().map(|k| k.to_string()).collect();
        assert_eq!(members, ["1", "2"]);
        assert_eq!(h.multiplicities(), [1.0, 3.0]);
    }

    #[test]
    fn bytewise_member_order() {
        let h = HSet::new(&[mv(2.0), mv(11.0), mv(1.0)], None, false).unwrap();
        let members: Vec<String> = h.members().iter().map(|k| k.to_string()).collect();
        assert_eq!(members, ["1", "11", "2"]);
    }

    #[test]
    fn multiplicity_zero_means_absent() {
        let h = HSet::new(&[mv(1.0)], Some(&[2.0]), true).unwrap();
        assert_eq!(h.multiplicity_of(&Element::int(1)), 2.0);
        assert_eq!(h.multiplicity_of(&Element::int(9)), 0.0);
        assert!(!h.contains(&Element::int(9)));
    }

    #[test]
    fn refer_aliases_clone_copies() {
        let h1 = HSet::new(&[mv(1.0)], None, false).unwrap();
        let alias = h1.refer_to(None);
        let copy = h1.clone_of(None);
        assert!(h1.aliases(&alias));
        assert!(!h1.aliases(&copy));
        alias.insert(Element::int(2));
        assert!(h1.contains(&Element::int(2)), "mutation visible via h1");
        assert!(!copy.contains(&Element::int(2)), "copy is independent");
        copy.insert(Element::int(3));
        assert!(!h1.contains(&Element::int(3)));
    }

    #[test]
    fn refer_with_mode_converts_the_shared_store() {
        let h = HSet::new(&[mv(1.0)], Some(&[7.0]), true).unwrap();
        let as_set = h.refer_to(Some(false));
        assert!(h.aliases(&as_set));
        assert!(!h.is_generalized(), "conversion visible via the original");
        assert_eq!(h.multiplicity_of(&Element::int(1)), 1.0);
    }

    #[test]
    fn clone_with_mode_leaves_original_alone() {
        let h = HSet::new(&[mv(1.0), mv(2.0)], None, false).unwrap();
        let m = h.clone_of(Some(true));
        assert!(!h.is_generalized());
        assert!(m.is_generalized());
        assert_eq!(m.multiplicity_of(&Element::int(1)), 1.0);
        assert_eq!(m.to_string(), "{1[1],2[1]}");
    }

    #[test]
    fn mode_round_trip_loses_counts() {
        let h = HSet::new(&[mv(4.0)], Some(&[7.0]), true).unwrap();
        let s = h.as_not_generalized();
        assert!(h.aliases(&s));
        let back = s.as_generalized();
        assert_eq!(back.multiplicity_of(&Element::int(4)), 1.0);
        assert_eq!(back.to_string(), "{4[1]}");
    }

    #[test]
    fn as_generalized_is_equal_as_a_multiset() {
        let s = HSet::new(&[mv(1.0), mv(2.0)], None, false).unwrap();
        let m = s.clone_of(Some(true));
        assert!(relations::equal(&s, &m));
    }

    #[test]
    fn insert_and_remove() {
        let s = HSet::new_set();
        s.insert(Element::int(1));
        s.insert(Element::int(1));
        assert_eq!(s.size_support(), 1);
        assert!(s.remove(&Element::int(1)));
        assert!(!s.remove(&Element::int(1)));

        let m = HSet::new_multiset();
        m.insert(Element::int(1));
        m.insert(Element::int(1));
        assert_eq!(m.multiplicity_of(&Element::int(1)), 2.0);
        assert!(m.remove(&Element::int(1)), "remove drops all occurrences");
        assert!(m.is_empty());
    }

    #[test]
    fn rendering() {
        assert_eq!(HSet::new_set().to_string(), "{}");
        assert_eq!(HSet::new_multiset().to_string(), "{}");
        let h = HSet::new(&[mv(1.0), mv(2.5)], Some(&[2.0, 0.5]), true).unwrap();
        assert_eq!(h.to_string(), "{1[2],2.5[0.5]}");
        let nested = HSet::set_of(vec![
            Element::empty_set(),
            Element::set(vec![Element::int(1)]),
        ]);
        assert_eq!(nested.to_string(), "{{1},{}}");
    }
}
