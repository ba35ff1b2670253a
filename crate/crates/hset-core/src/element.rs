//! Elements and their canonical key encoding.
//!
//! An element is either a finite number or a (possibly empty) set of
//! elements. Every element has exactly one textual key, and distinct
//! elements have distinct keys, so the key doubles as the hash-table
//! index and as the canonical rendering:
//!
//! * numbers use the shortest decimal that round-trips through `f64`,
//!   with integer values printed without a decimal point and negative
//!   zero collapsed to `0`;
//! * sets wrap the keys of their members in `{`..`}`, comma separated,
//!   in ascending bytewise order, duplicates removed.
//!
//! Multisets are containers, not values: an element can never carry
//! multiplicities, so nothing in this module knows about them.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElementError {
    #[error("number is not finite")]
    NonFinite,
    #[error("malformed key at byte {pos}: {reason}")]
    MalformedKey { pos: usize, reason: &'static str },
}

/// A canonical element: a finite number or a set of elements.
///
/// The representation is kept canonical at all times (numbers finite
/// with `-0` normalized, set members sorted by key and deduplicated),
/// which is why the variants are not exposed directly.
#[derive(Clone)]
pub struct Element(Repr);

#[derive(Clone)]
enum Repr {
    Num(f64),
    Set(Vec<Element>),
}

impl Element {
    /// Numeric element. Rejects NaN and infinities; `-0.0` becomes `0.0`.
    pub fn num(value: f64) -> Result<Element, ElementError> {
        if !value.is_finite() {
            return Err(ElementError::NonFinite);
        }
        // +0.0 == -0.0 but they print differently; keep one of them.
        let value = if value == 0.0 { 0.0 } else { value };
        Ok(Element(Repr::Num(value)))
    }

    /// Numeric element from an integer, which is always finite.
    pub fn int(value: i64) -> Element {
        Element(Repr::Num(value as f64))
    }

    /// Set element. Members are sorted by key and deduplicated, so the
    /// input order and repetitions do not matter.
    pub fn set(members: Vec<Element>) -> Element {
        let mut members = members;
        members.sort_by_cached_key(|m| m.key());
        members.dedup_by(|a, b| a == b);
        Element(Repr::Set(members))
    }

    /// The empty set `{}` — an ordinary element like any other.
    pub fn empty_set() -> Element {
        Element(Repr::Set(Vec::new()))
    }

    pub fn as_num(&self) -> Option<f64> {
        match &self.0 {
            Repr::Num(x) => Some(*x),
            Repr::Set(_) => None,
        }
    }

    pub fn as_set(&self) -> Option<&[Element]> {
        match &self.0 {
            Repr::Num(_) => None,
            Repr::Set(members) => Some(members),
        }
    }

    /// Canonical key of this element.
    pub fn key(&self) -> Key {
        let mut out = String::new();
        render(self, &mut out);
        Key(out)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Element) -> bool {
        match (&self.0, &other.0) {
            (Repr::Num(a), Repr::Num(b)) => a == b,
            (Repr::Set(a), Repr::Set(b)) => a == b,
            _ => false,
        }
    }
}

// No NaN members, so equality is total.
impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Num(x) => {
                state.write_u8(0);
                state.write_u64(x.to_bits());
            }
            Repr::Set(members) => {
                state.write_u8(1);
                state.write_usize(members.len());
                for m in members {
                    m.hash(state);
                }
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self.key())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        render(self, &mut out);
        f.write_str(&out)
    }
}

fn render(e: &Element, out: &mut String) {
    match &e.0 {
        Repr::Num(x) => render_num(*x, out),
        Repr::Set(members) => {
            out.push('{');
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render(m, out);
            }
            out.push('}');
        }
    }
}

/// Shortest round-tripping decimal; integer values have no point,
/// negative zero is already normalized away.
fn render_num(x: f64, out: &mut String) {
    use fmt::Write;
    write!(out, "{}", x).expect("writing to a String cannot fail");
}

/// Canonical key of an element: a valid key parses back to exactly one
/// element, and re-encoding that element reproduces the key byte for
/// byte. Keys order bytewise via the derived `Ord`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key(String);

impl Key {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Validating parse: accepts exactly the strings `encode` can produce.
    pub fn parse(text: &str) -> Result<Key, ElementError> {
        decode(text).map(|e| e.key())
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Key({})", self.0)
    }
}

/// Encode an element as its canonical key.
pub fn encode(e: &Element) -> Key {
    e.key()
}

/// Decode a key back into the element it denotes.
///
/// Rejects anything `encode` cannot produce: non-canonical number
/// spellings (`2.0`, `+2`, `1e3`, `-0`), members out of ascending
/// bytewise order, duplicate members, and structural noise.
pub fn decode(key: &str) -> Result<Element, ElementError> {
    let bytes = key.as_bytes();
    let (element, end) = parse_at(bytes, 0)?;
    if end != bytes.len() {
        return Err(ElementError::MalformedKey {
            pos: end,
            reason: "trailing characters after element",
        });
    }
    Ok(element)
}

fn parse_at(bytes: &[u8], pos: usize) -> Result<(Element, usize), ElementError> {
    match bytes.get(pos) {
        Some(b'{') => parse_set(bytes, pos),
        Some(_) => parse_number(bytes, pos),
        None => Err(ElementError::MalformedKey {
            pos,
            reason: "expected an element",
        }),
    }
}

fn parse_set(bytes: &[u8], open: usize) -> Result<(Element, usize), ElementError> {
    let mut pos = open + 1; // past '{'
    let mut members = Vec::new();
    let mut prev_span: Option<(usize, usize)> = None;

    if bytes.get(pos) == Some(&b'}') {
        return Ok((Element::empty_set(), pos + 1));
    }
    loop {
        let start = pos;
        let (member, end) = parse_at(bytes, pos)?;
        if let Some((ps, pe)) = prev_span {
            if bytes[ps..pe] >= bytes[start..end] {
                return Err(ElementError::MalformedKey {
                    pos: start,
                    reason: "members not in strictly ascending order",
                });
            }
        }
        prev_span = Some((start, end));
        members.push(member);
        pos = end;
        match bytes.get(pos) {
            Some(b',') => pos += 1,
            Some(b'}') => {
                // Members arrived sorted and distinct, so this cannot
                // reorder or drop anything; it just rewraps them.
                return Ok((Element(Repr::Set(members)), pos + 1));
            }
            _ => {
                return Err(ElementError::MalformedKey {
                    pos,
                    reason: "expected ',' or '}'",
                })
            }
        }
    }
}

fn parse_number(bytes: &[u8], start: usize) -> Result<(Element, usize), ElementError> {
    let mut pos = start;
    while pos < bytes.len() && bytes[pos] != b',' && bytes[pos] != b'}' {
        if bytes[pos] == b'{' {
            return Err(ElementError::MalformedKey {
                pos,
                reason: "unexpected '{' inside a number",
            });
        }
        pos += 1;
    }
    let token = std::str::from_utf8(&bytes[start..pos]).map_err(|_| ElementError::MalformedKey {
        pos: start,
        reason: "key is not valid UTF-8",
    })?;
    let value: f64 = token.parse().map_err(|_| ElementError::MalformedKey {
        pos: start,
        reason: "invalid number",
    })?;
    if !value.is_finite() {
        return Err(ElementError::MalformedKey {
            pos: start,
            reason: "number is not finite",
        });
    }
    let element = Element(Repr::Num(if value == 0.0 { 0.0 } else { value }));
    // Only the canonical spelling is a key; "2.0" or "1e3" are not.
    if element.key().as_str() != token {
        return Err(ElementError::MalformedKey {
            pos: start,
            reason: "number is not in canonical form",
        });
    }
    Ok((element, pos))
}

/// A raw value offered for membership, before validation. `Null` and
/// empty lists mean "no element"; everything else becomes an element.
#[derive(Debug, Clone, PartialEq)]
pub enum MemberValue {
    Num(f64),
    List(Vec<MemberValue>),
    Null,
}

impl MemberValue {
    /// Numeric-sequence convention: no values is nothing, one value is
    /// a plain number, several values form a set.
    pub fn from_nums(values: &[f64]) -> MemberValue {
        match values {
            [] => MemberValue::List(Vec::new()),
            [x] => MemberValue::Num(*x),
            _ => MemberValue::List(values.iter().map(|&x| MemberValue::Num(x)).collect()),
        }
    }
}

impl From<f64> for MemberValue {
    fn from(x: f64) -> MemberValue {
        MemberValue::Num(x)
    }
}

impl From<i64> for MemberValue {
    fn from(x: i64) -> MemberValue {
        MemberValue::Num(x as f64)
    }
}

impl From<Vec<MemberValue>> for MemberValue {
    fn from(items: Vec<MemberValue>) -> MemberValue {
        MemberValue::List(items)
    }
}

/// Result of validating a [`MemberValue`].
#[derive(Debug, Clone, PartialEq)]
pub enum ValidatedMember {
    /// A proper element that can be stored or looked up.
    Element(Element),
    /// Nothing to store: the value was `Null` or an empty list.
    Empty,
}

/// Turn a raw value into an element, or decide it denotes no element.
///
/// `Null` and length-0 lists are `Empty`. A non-empty list becomes a
/// set; inside it, `Null`s and empty lists simply contribute nothing
/// (so `[null]` is the element `{}`). Non-finite numbers are rejected
/// at any depth.
pub fn validate_member(raw: &MemberValue) -> Result<ValidatedMember, ElementError> {
    match raw {
        MemberValue::Null => Ok(ValidatedMember::Empty),
        MemberValue::Num(x) => Ok(ValidatedMember::Element(Element::num(*x)?)),
        MemberValue::List(items) => {
            if items.is_empty() {
                return Ok(ValidatedMember::Empty);
            }
            let mut members = Vec::with_capacity(items.len());
            for item in items {
                match validate_member(item)? {
                    ValidatedMember::Element(e) => members.push(e),
                    ValidatedMember::Empty => {}
                }
            }
            Ok(ValidatedMember::Element(Element::set(members)))
        }
    }
}

/// Check that distinct keys in a batch denote distinct elements; used
/// in tests as an independent witness of injectivity.
pub fn keys_injective(elements: &[Element]) -> bool {
    let mut seen: HashSet<Key> = HashSet::new();
    let mut distinct = 0usize;
    for e in elements {
        if seen.insert(e.key()) {
            distinct += 1;
        }
    }
    let mut unique: Vec<&Element> = Vec::new();
    for e in elements {
        if !unique.contains(&e) {
            unique.push(e);
        }
    }
    unique.len() == distinct
}
