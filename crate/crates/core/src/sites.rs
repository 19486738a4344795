//! Subsets of the site labels {1, ..., n}.
//!
//! Sites are numbered from 1 and site k occupies the k-th character of a
//! printed outcome bitstring (site 1 leftmost). A `SiteSet` is a small
//! bitmask over those labels, used for gate control sets, bipartitions and
//! the subset sums that appear throughout the state expansions.

use crate::error::{Error, Result};

/// Maximum number of sites a statevector may hold (dense representation).
pub const MAX_SITES: usize = 24;

/// A subset of the sites {1, ..., n}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SiteSet {
    mask: u32,
}

impl SiteSet {
    /// The empty set.
    pub fn empty() -> Self {
        SiteSet { mask: 0 }
    }

    /// The full set {1, ..., n}.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_SITES);
        SiteSet {
            mask: if n == 0 { 0 } else { (1u32 << n) - 1 },
        }
    }

    /// The singleton {k}.
    pub fn singleton(k: usize) -> Self {
        SiteSet::empty().with(k)
    }

    /// Builds a set from 1-based site labels.
    pub fn from_sites(sites: &[usize]) -> Self {
        sites.iter().fold(SiteSet::empty(), |s, &k| s.with(k))
    }

    /// Returns this set with site k added.
    pub fn with(self, k: usize) -> Self {
        debug_assert!((1..=MAX_SITES).contains(&k));
        SiteSet {
            mask: self.mask | (1u32 << (k - 1)),
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        (1..=MAX_SITES).contains(&k) && self.mask & (1u32 << (k - 1)) != 0
    }

    /// Cardinality |α|.
    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// The complement within {1, ..., n}.
    pub fn complement(&self, n: usize) -> Self {
        SiteSet {
            mask: !self.mask & SiteSet::full(n).mask,
        }
    }

    pub fn is_subset_of(&self, other: &SiteSet) -> bool {
        self.mask & !other.mask == 0
    }

    /// Set difference self ∖ other.
    pub fn difference(&self, other: &SiteSet) -> SiteSet {
        SiteSet {
            mask: self.mask & !other.mask,
        }
    }

    /// Iterates the member sites in ascending order.
    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=MAX_SITES).filter(move |&k| self.contains(k))
    }

    /// All 2^n subsets of {1, ..., n}, in mask order (∅ first, full set last).
    pub fn all_subsets(n: usize) -> impl Iterator<Item = SiteSet> {
        debug_assert!(n <= MAX_SITES);
        (0u32..(1u32 << n)).map(|mask| SiteSet { mask })
    }

    /// Checks every member lies in {1, ..., n}.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !self.is_subset_of(&SiteSet::full(n)) {
            let site = self.sites().find(|&k| k > n).unwrap_or(0);
            return Err(Error::SiteOutOfRange { site, num_sites: n });
        }
        Ok(())
    }

    /// The statevector basis index whose member-site bits are 1, out of n sites.
    ///
    /// Site 1 maps to the most significant bit, so the printed bitstring of
    /// the returned index has exactly the member sites set to '1'.
    pub fn basis_index(&self, n: usize) -> usize {
        self.sites().map(|k| 1usize << (n - k)).sum()
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn from_basis_index(index: usize, n: usize) -> Self {
        let mut set = SiteSet::empty();
        for k in 1..=n {
            if index >> (n - k) & 1 == 1 {
                set = set.with(k);
            }
        }
        set
    }
}

impl std::fmt::Display for SiteSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.sites().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}
