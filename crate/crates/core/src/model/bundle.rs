use std::fmt;

/// A set of objects, stored as a bitmask over object indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bundle(pub u64);

pub const MAX_OBJECTS: usize = 64;

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn singleton(o: usize) -> Self {
        Bundle(1 << o)
    }

    /// All of the first `m` objects.
    pub fn full(m: usize) -> Self {
        if m >= 64 {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << m) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(Bundle::EMPTY, |b, o| b.with(o))
    }

    pub fn with(self, o: usize) -> Self {
        Bundle(self.0 | (1 << o))
    }

    pub fn without(self, o: usize) -> Self {
        Bundle(self.0 & !(1 << o))
    }

    pub fn contains(self, o: usize) -> bool {
        self.0 >> o & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let o = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(o)
            }
        })
    }

    /// Every subset of `self`, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = Bundle> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Bundle(cur))
        })
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, o) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, "}}")
    }
}

/// A nonempty set of agents, stored as a bitmask over agent indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coalition(pub u32);

pub const MAX_AGENTS: usize = 32;

impl Coalition {
    pub fn singleton(i: usize) -> Self {
        Coalition(1 << i)
    }

    pub fn pair(i: usize, j: usize) -> Self {
        Coalition((1 << i) | (1 << j))
    }

    pub fn grand(n: usize) -> Self {
        if n >= 32 {
            Coalition(u32::MAX)
        } else {
            Coalition((1u32 << n) - 1)
        }
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Coalition(it.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// Position of agent `i` within `members()`.
    pub fn position(self, i: usize) -> Option<usize> {
        if !self.contains(i) {
            return None;
        }
        Some((self.0 & ((1u32 << i) - 1)).count_ones() as usize)
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    pub fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// Every nonempty coalition of `n` agents, ordered by size and then
    /// lexicographically by sorted member list.
    pub fn all_ordered(n: usize) -> Vec<Coalition> {
        let mut all: Vec<Coalition> = (1..(1u32 << n)).map(Coalition).collect();
        all.sort_by_key(|c| (c.len(), c.members()));
        all
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Size first, then lexicographic on sorted members.
impl Ord for Coalition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len(), self.members()).cmp(&(other.len(), other.members()))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
