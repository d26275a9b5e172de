//! Alternatives, assortments and consumer types.
//!
//! Alternatives are identified by `1..=N`; the id `0` is the no-choice outcome
//! and never appears inside an assortment or a preference sequence.

use std::fmt;

use crate::error::{Error, Result};

/// Identifier of an alternative. `0` is reserved for "choose nothing".
pub type AltId = u32;

/// The no-choice outcome.
pub const NO_CHOICE: AltId = 0;

/// Largest supported universe. Assortments are backed by a 64-bit mask.
pub const MAX_UNIVERSE: usize = 64;

fn bit(id: AltId) -> u64 {
    1u64 << (id - 1)
}

/// An offer set, stored in canonical ascending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assortment {
    // Ordering derives from `members` first, which gives lexicographic order.
    members: Vec<AltId>,
    mask: u64,
}

impl Assortment {
    /// Builds an assortment from ids in any order. Rejects `0`, duplicates and
    /// ids beyond [`MAX_UNIVERSE`].
    pub fn new(ids: impl IntoIterator<Item = AltId>) -> Result<Self> {
        let mut members: Vec<AltId> = ids.into_iter().collect();
        let mut mask = 0u64;
        for &id in &members {
            if id == NO_CHOICE {
                return Err(Error::InvalidAssortment(
                    "alternative 0 is the no-choice option and cannot be offered".into(),
                ));
            }
            if id as usize > MAX_UNIVERSE {
                return Err(Error::InvalidAlternative {
                    id,
                    reason: format!("ids are limited to 1..={MAX_UNIVERSE}"),
                });
            }
            if mask & bit(id) != 0 {
                return Err(Error::InvalidAssortment(format!("duplicate member {id}")));
            }
            mask |= bit(id);
        }
        members.sort_unstable();
        Ok(Self { members, mask })
    }

    /// Assortment encoded by a bit mask (bit `k` set means alternative `k + 1`).
    pub fn from_mask(mask: u64) -> Self {
        let members = (0..64u32)
            .filter(|k| mask & (1u64 << k) != 0)
            .map(|k| k + 1)
            .collect();
        Self { members, mask }
    }

    /// The full universe `{1, ..., n}`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(1..=n as AltId)
    }

    pub fn members(&self) -> &[AltId] {
        &self.members
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, id: AltId) -> bool {
        id != NO_CHOICE && (id as usize) <= MAX_UNIVERSE && self.mask & bit(id) != 0
    }

    /// Largest member, or `0` for the empty set.
    pub fn max_id(&self) -> AltId {
        self.members.last().copied().unwrap_or(0)
    }

    pub fn is_subset_of(&self, other: &Assortment) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_proper_subset_of(&self, other: &Assortment) -> bool {
        self.is_subset_of(other) && self.mask != other.mask
    }

    /// `self ∖ {id}`.
    pub fn without(&self, id: AltId) -> Assortment {
        if !self.contains(id) {
            return self.clone();
        }
        Self::from_mask(self.mask & !bit(id))
    }

    /// Every non-empty subset of `{1, ..., n}`, ordered by cardinality and then
    /// lexicographically.
    pub fn all_nonempty(n: usize) -> Result<Vec<Assortment>> {
        if n == 0 || n > 20 {
            return Err(Error::CapExceeded {
                what: "subset enumeration universe".into(),
                size: n,
                cap: 20,
            });
        }
        let mut all: Vec<Assortment> = (1u64..(1u64 << n)).map(Self::from_mask).collect();
        all.sort_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| a.members.cmp(&b.members))
        });
        Ok(all)
    }
}

impl fmt::Debug for Assortment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Assortment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, id) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("}")
    }
}

/// A behavioural type `(sequence, position)`.
///
/// Offered `S`, the type deletes everything outside `S` from its sequence and
/// picks the entry at `position` (1-indexed). Position `0`, or a restricted
/// sequence shorter than `position`, yields the no-choice outcome.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConsumerType {
    sequence: Vec<AltId>,
    position: usize,
}

impl ConsumerType {
    pub fn new(sequence: Vec<AltId>, position: usize) -> Result<Self> {
        if sequence.is_empty() {
            return Err(Error::InvalidType("sequence must be non-empty".into()));
        }
        if sequence.len() > MAX_UNIVERSE {
            return Err(Error::InvalidType(format!(
                "sequence length {} exceeds {MAX_UNIVERSE}",
                sequence.len()
            )));
        }
        let mut seen = 0u64;
        for &id in &sequence {
            if id == NO_CHOICE || id as usize > MAX_UNIVERSE {
                return Err(Error::InvalidType(format!(
                    "sequence entry {id} is not a valid alternative id"
                )));
            }
            if seen & bit(id) != 0 {
                return Err(Error::InvalidType(format!(
                    "sequence repeats alternative {id}"
                )));
            }
            seen |= bit(id);
        }
        if position > sequence.len() {
            return Err(Error::InvalidType(format!(
                "position {position} exceeds sequence length {}",
                sequence.len()
            )));
        }
        Ok(Self { sequence, position })
    }

    pub fn sequence(&self) -> &[AltId] {
        &self.sequence
    }

    pub fn position(&self) -> usize {
        self.position
    }

    /// Largest alternative id mentioned by the sequence.
    pub fn max_id(&self) -> AltId {
        self.sequence.iter().copied().max().unwrap_or(0)
    }

    /// Rational types pick their top available alternative (`position == 1`)
    /// or always abstain (`position == 0`).
    pub fn is_rational(&self) -> bool {
        self.position <= 1
    }

    /// The alternative chosen from `offer`, or [`NO_CHOICE`].
    #[inline]
    pub fn choose(&self, offer: &Assortment) -> AltId {
        if self.position == 0 {
            return NO_CHOICE;
        }
        let mut seen = 0usize;
        for &id in &self.sequence {
            if offer.contains(id) {
                seen += 1;
                if seen == self.position {
                    return id;
                }
            }
        }
        NO_CHOICE
    }
}

impl fmt::Debug for ConsumerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ConsumerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("((")?;
        for (k, id) in self.sequence.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "),{})", self.position)
    }
}

/// Subsequence of `sequence` made of the entries that belong to `offer`,
/// in their original order.
pub fn restrict(sequence: &[AltId], offer: &Assortment) -> Vec<AltId> {
    sequence
        .iter()
        .copied()
        .filter(|&id| offer.contains(id))
        .collect()
}

/// Free-function form of [`ConsumerType::choose`].
pub fn choose(consumer: &ConsumerType, offer: &Assortment) -> AltId {
    consumer.choose(offer)
}

pub fn is_rational(consumer: &ConsumerType) -> bool {
    consumer.is_rational()
}

/// Every consumer type over `{1, ..., n}` whose sequence has length at most
/// `max_seq_len` (default `n`).
///
/// Sequences are ordered by length, then lexicographically; positions ascend
/// within a sequence.
pub fn enumerate_types(n: usize, max_seq_len: Option<usize>) -> Result<Vec<ConsumerType>> {
    if n < 1 {
        return Err(Error::InvalidConfig(
            "universe size must be at least 1".into(),
        ));
    }
    if n > MAX_UNIVERSE {
        return Err(Error::CapExceeded {
            what: "universe size".into(),
            size: n,
            cap: MAX_UNIVERSE,
        });
    }
    let cap = max_seq_len.unwrap_or(n);
    if cap < 1 || cap > n {
        return Err(Error::InvalidConfig(format!(
            "sequence length cap {cap} must lie in 1..={n}"
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(cap);
    for len in 1..=cap {
        permutations_of_length(n as AltId, len, &mut current, 0, &mut |seq| {
            for position in 0..=len {
                out.push(ConsumerType {
                    sequence: seq.to_vec(),
                    position,
                });
            }
        });
    }
    Ok(out)
}

fn permutations_of_length(
    n: AltId,
    len: usize,
    current: &mut Vec<AltId>,
    used: u64,
    emit: &mut dyn FnMut(&[AltId]),
) {
    if current.len() == len {
        emit(current);
        return;
    }
    for id in 1..=n {
        if used & bit(id) == 0 {
            current.push(id);
            permutations_of_length(n, len, current, used | bit(id), emit);
            current.pop();
        }
    }
}

/// `Σ_{k=1..n} n!/(n−k)! · (k+1)` computed in closed form, without enumerating.
pub fn type_count(n: usize, max_seq_len: Option<usize>) -> u128 {
    let cap = max_seq_len.unwrap_or(n).min(n);
    let mut falling = 1u128;
    let mut total = 0u128;
    for k in 1..=cap {
        falling *= (n - k + 1) as u128;
        total += falling * (k as u128 + 1);
    }
    total
}
