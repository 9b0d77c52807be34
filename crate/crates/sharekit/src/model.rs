//! Players, subsets, welfare functions, and the unanimity-game basis.
//!
//! A welfare function `W: 2^N -> Q` with `W(empty) = 0` has a unique
//! representation `W = sum_{T in support} q_T * W^T` over inclusion functions
//! `W^T(S) = [T subset of S]`. The coefficients are the Moebius transform
//! `q_T = sum_{R subset of T} (-1)^{|T|-|R|} W(R)`; subsets `T` with
//! `q_T != 0` are the *contributing coalitions* of `W`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rational::Rational;
use crate::Error;

/// Ordered set of player labels. A player's canonical index is its position
/// in the list; subsets are bitmasks over those indices.
#[derive(Clone, PartialEq, Eq)]
pub struct PlayerSet {
    labels: Vec<String>,
}

impl PlayerSet {
    /// Exhaustive 2^n tables are the point of this crate, so the player count
    /// is capped.
    pub const MAX_PLAYERS: usize = 16;

    pub fn new(labels: Vec<String>) -> Result<Self, Error> {
        if labels.is_empty() {
            return Err(Error::input("player set must be nonempty"));
        }
        if labels.len() > Self::MAX_PLAYERS {
            return Err(Error::input(format!(
                "at most {} players supported, got {}",
                Self::MAX_PLAYERS,
                labels.len()
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            if a.is_empty() || a.contains(',') || a.contains('|') {
                return Err(Error::input(format!(
                    "player label {a:?} must be nonempty and free of ',' and '|'"
                )));
            }
            if labels[..i].contains(a) {
                return Err(Error::input(format!("duplicate player label {a:?}")));
            }
        }
        Ok(PlayerSet { labels })
    }

    /// Convenience constructor for tests and fixtures.
    pub fn from_labels(labels: &[&str]) -> Result<Self, Error> {
        Self::new(labels.iter().map(|s| s.to_string()).collect())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full(&self) -> Subset {
        Subset(((1u64 << self.n()) - 1) as u32)
    }

    pub fn subset_count(&self) -> usize {
        1usize << self.n()
    }

    /// All subsets in bitmask order (fast iteration order).
    pub fn subsets(&self) -> impl Iterator<Item = Subset> {
        (0..self.subset_count() as u32).map(Subset)
    }

    /// All subsets sorted by (size, lexicographic member sequence); the
    /// canonical scan order for witnesses and golden output.
    pub fn subsets_ordered(&self) -> Vec<Subset> {
        let mut all: Vec<Subset> = self.subsets().collect();
        all.sort();
        all
    }

    pub fn subset_of_indices(&self, indices: &[usize]) -> Subset {
        let mut s = Subset::EMPTY;
        for &i in indices {
            debug_assert!(i < self.n());
            s = s.with(i);
        }
        s
    }
}

impl fmt::Debug for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlayerSet({})", self.labels.join(","))
    }
}

/// Player subset as a bitmask against a fixed [`PlayerSet`] ordering.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_mask(mask: u32) -> Self {
        Subset(mask)
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersect(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn minus(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }

    /// Member indices in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32usize).filter(move |i| mask & (1 << i) != 0)
    }

    /// Position of player `i` within `members()`, if present.
    pub fn position_of(self, i: usize) -> Option<usize> {
        if self.contains(i) {
            Some((self.0 & ((1u32 << i) - 1)).count_ones() as usize)
        } else {
            None
        }
    }
}

/// Order by size, then lexicographically on the ascending member sequence.
/// For equal sizes the set containing the lowest differing index comes first.
impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (1 << diff.trailing_zeros()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// All submasks of `mask`, in descending numeric order, ending with 0.
pub(crate) fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// Total welfare function `W: 2^N -> Q`, normalized so `W(empty) = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct WelfareFunction {
    players: PlayerSet,
    values: Vec<Rational>,
}

impl WelfareFunction {
    /// Builds from a dense table indexed by subset mask. Rejects tables of
    /// the wrong length and `W(empty) != 0`.
    pub fn from_values(players: PlayerSet, values: Vec<Rational>) -> Result<Self, Error> {
        if values.len() != players.subset_count() {
            return Err(Error::input(format!(
                "welfare table has {} entries, expected {}",
                values.len(),
                players.subset_count()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::input("welfare function must have W(empty) = 0"));
        }
        Ok(WelfareFunction { players, values })
    }

    /// Builds from a sparse map; missing subsets are 0.
    pub fn from_map(players: PlayerSet, map: &BTreeMap<Subset, Rational>) -> Result<Self, Error> {
        let mut values = vec![Rational::zero(); players.subset_count()];
        for (s, v) in map {
            if !s.is_subset_of(players.full()) {
                return Err(Error::input("welfare table key outside player set"));
            }
            values[s.mask() as usize] = v.clone();
        }
        Self::from_values(players, values)
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn value(&self, s: Subset) -> &Rational {
        &self.values[s.mask() as usize]
    }

    /// Moebius transform onto the inclusion-function basis. Coefficients are
    /// `q_T = sum_{R subset of T} (-1)^{|T|-|R|} W(R)`, zeros pruned.
    pub fn decompose(&self) -> BasisForm {
        let n = self.players.n();
        let mut f = self.values.clone();
        for bit in 0..n {
            let b = 1usize << bit;
            for mask in 0..f.len() {
                if mask & b != 0 {
                    let lower = f[mask ^ b].clone();
                    f[mask] -= lower;
                }
            }
        }
        let mut coeffs = BTreeMap::new();
        for (mask, q) in f.into_iter().enumerate() {
            if mask != 0 && !q.is_zero() {
                coeffs.insert(Subset(mask as u32), q);
            }
        }
        BasisForm {
            players: self.players.clone(),
            coeffs,
        }
    }
}

impl fmt::Debug for WelfareFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WelfareFunction(n={})", self.players.n())
    }
}

/// Welfare function in basis form: support coalitions with nonzero
/// coefficients. The empty set is never in the support.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BasisForm {
    players: PlayerSet,
    coeffs: BTreeMap<Subset, Rational>,
}

impl BasisForm {
    /// Builds from coefficients; zero entries are pruned, a nonzero entry for
    /// the empty set is rejected.
    pub fn new(players: PlayerSet, coeffs: BTreeMap<Subset, Rational>) -> Result<Self, Error> {
        let mut pruned = BTreeMap::new();
        for (t, q) in coeffs {
            if q.is_zero() {
                continue;
            }
            if t.is_empty() {
                return Err(Error::input(
                    "basis coefficient for the empty set violates W(empty) = 0",
                ));
            }
            if !t.is_subset_of(players.full()) {
                return Err(Error::input("basis coalition outside player set"));
            }
            pruned.insert(t, q);
        }
        Ok(BasisForm {
            players,
            coeffs: pruned,
        })
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn coeffs(&self) -> &BTreeMap<Subset, Rational> {
        &self.coeffs
    }

    /// `q_T`, or 0 when `T` is not in the support.
    pub fn coefficient(&self, t: Subset) -> Rational {
        self.coeffs.get(&t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = Subset> + '_ {
        self.coeffs.keys().copied()
    }

    /// `W(S) = sum over support coalitions contained in S`.
    pub fn evaluate(&self, s: Subset) -> Rational {
        let mut total = Rational::zero();
        for (t, q) in &self.coeffs {
            if t.is_subset_of(s) {
                total += q;
            }
        }
        total
    }

    /// Dense table reconstruction (zeta transform); inverse of
    /// [`WelfareFunction::decompose`].
    pub fn to_welfare(&self) -> WelfareFunction {
        let n = self.players.n();
        let mut values = vec![Rational::zero(); self.players.subset_count()];
        for (t, q) in &self.coeffs {
            values[t.mask() as usize] = q.clone();
        }
        for bit in 0..n {
            let b = 1usize << bit;
            for mask in 0..values.len() {
                if mask & b != 0 {
                    let lower = values[mask ^ b].clone();
                    values[mask] += lower;
                }
            }
        }
        WelfareFunction {
            players: self.players.clone(),
            values,
        }
    }

    /// Contributing coalitions in `S`, sorted (size, lex).
    pub fn coalitions_in(&self, s: Subset) -> Vec<Subset> {
        self.support().filter(|t| t.is_subset_of(s)).collect()
    }

    /// Contributing players in `S`: the union of the coalitions in `S`.
    pub fn contributing_players(&self, s: Subset) -> Subset {
        self.coalitions_in(s)
            .into_iter()
            .fold(Subset::EMPTY, Subset::union)
    }

    /// All support coalitions containing both `i` and `j`, sorted (size, lex).
    pub fn coalitions_with_pair(&self, i: usize, j: usize) -> Vec<Subset> {
        self.support()
            .filter(|t| t.contains(i) && t.contains(j))
            .collect()
    }
}

/// Elements of `family` with no strict subset also in `family`.
pub fn minimal_elements(family: &[Subset]) -> Vec<Subset> {
    let mut out: Vec<Subset> = family
        .iter()
        .copied()
        .filter(|&t| !family.iter().any(|&u| u != t && u.is_subset_of(t)))
        .collect();
    out.sort();
    out
}

/// Ordered partition of `family` obtained by repeatedly removing minimal
/// elements. Each block is the set of minimal elements once earlier blocks
/// are gone; blocks are antichains and their union is the input.
///
/// The input must not contain duplicates.
pub fn min_partition(family: &[Subset]) -> Vec<Vec<Subset>> {
    for (k, t) in family.iter().enumerate() {
        assert!(
            !family[..k].contains(t),
            "min_partition input contains duplicate {t:?}"
        );
    }
    let mut remaining: Vec<Subset> = family.to_vec();
    let mut blocks = Vec::new();
    while !remaining.is_empty() {
        let block = minimal_elements(&remaining);
        remaining.retain(|t| !block.contains(t));
        blocks.push(block);
    }
    blocks
}
