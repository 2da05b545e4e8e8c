//! Symmetric multi-indices over the base coordinates.
//!
//! A multi-index records how many times each base direction occurs in a
//! repeated total derivative or jet coordinate; the order of occurrences is
//! immaterial, so it is stored as a sorted multiset.

use std::cmp::Ordering;
use std::fmt;

/// A symmetric multi-index, stored as a sorted list of base-coordinate
/// indices (possibly with repetition).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn empty() -> MultiIndex {
        MultiIndex(Vec::new())
    }

    pub fn new(mut entries: Vec<u8>) -> MultiIndex {
        entries.sort_unstable();
        MultiIndex(entries)
    }

    pub fn single(lambda: u8) -> MultiIndex {
        MultiIndex(vec![lambda])
    }

    /// |Lambda|, the total order.
    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of occurrences of the direction `lambda`.
    pub fn count(&self, lambda: u8) -> usize {
        self.0.iter().filter(|&&m| m == lambda).count()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn distinct(&self) -> impl Iterator<Item = u8> + '_ {
        let mut last = None;
        self.0.iter().copied().filter(move |&m| {
            if last == Some(m) {
                false
            } else {
                last = Some(m);
                true
            }
        })
    }

    /// lambda + Lambda: one more occurrence of `lambda`.
    pub fn push(&self, lambda: u8) -> MultiIndex {
        let pos = self.0.partition_point(|&m| m <= lambda);
        let mut v = self.0.clone();
        v.insert(pos, lambda);
        MultiIndex(v)
    }

    /// Removes one occurrence of `lambda`, if present.
    pub fn remove_one(&self, lambda: u8) -> Option<MultiIndex> {
        let pos = self.0.iter().position(|&m| m == lambda)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(MultiIndex(v))
    }

    /// Multiset union Sigma + Lambda.
    pub fn merge(&self, other: &MultiIndex) -> MultiIndex {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        MultiIndex(v)
    }

    /// Multiset difference, defined when `other` is contained in `self`.
    pub fn subtract(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = self.clone();
        for &m in &other.0 {
            out = out.remove_one(m)?;
        }
        Some(out)
    }

    /// Lambda! = prod_mu (Lambda_mu)!, the per-direction factorial.
    pub fn factorial(&self) -> u128 {
        let mut acc: u128 = 1;
        let mut run = 0u128;
        let mut last = None;
        for &m in &self.0 {
            if last == Some(m) {
                run += 1;
            } else {
                run = 1;
                last = Some(m);
            }
            acc *= run;
        }
        acc
    }

    /// All ordered splittings Sigma + Xi = Lambda together with the
    /// per-direction multiplicity prod_mu C(Lambda_mu, Sigma_mu); this is the
    /// Leibniz multiplicity of d_Sigma f · d_Xi g inside d_Lambda(f g).
    pub fn splittings(&self) -> Vec<(MultiIndex, MultiIndex, u128)> {
        let mut out = vec![(MultiIndex::empty(), MultiIndex::empty(), 1u128)];
        let mut groups: Vec<(u8, usize)> = Vec::new();
        for &m in &self.0 {
            match groups.last_mut() {
                Some((g, c)) if *g == m => *c += 1,
                _ => groups.push((m, 1)),
            }
        }
        for (dir, count) in groups {
            let mut next = Vec::new();
            for (sigma, xi, mult) in &out {
                for k in 0..=count {
                    let mut s = sigma.clone();
                    let mut x = xi.clone();
                    for _ in 0..k {
                        s = s.push(dir);
                    }
                    for _ in 0..(count - k) {
                        x = x.push(dir);
                    }
                    next.push((s, x, mult * binomial(count, k)));
                }
            }
            out = next;
        }
        out
    }
}

/// C(n, k) as u128; the orders in play are small.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    num / den
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Enumerates every multi-index over `n` directions with order <= max_order.
pub fn enumerate_indices(n: u8, max_order: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::empty()];
    let mut frontier = vec![MultiIndex::empty()];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for idx in &frontier {
            let floor = idx.entries().last().copied().unwrap_or(0);
            for lambda in floor..n {
                let grown = idx.push(lambda);
                next.push(grown.clone());
                out.push(grown);
            }
        }
        frontier = next;
    }
    out
}

// Graded lexicographic order: lower total order first.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_is_order_insensitive() {
        let a = MultiIndex::new(vec![1, 0]);
        let b = MultiIndex::new(vec![0, 1]);
        assert_eq!(a, b);
        assert_eq!(a.merge(&b).order(), 4);
        assert_eq!(a.merge(&b).count(0), 2);
    }

    #[test]
    fn factorials() {
        // [0 0 1]: 2! * 1! = 2
        assert_eq!(MultiIndex::new(vec![0, 0, 1]).factorial(), 2);
        assert_eq!(MultiIndex::new(vec![2, 2, 2]).factorial(), 6);
        assert_eq!(MultiIndex::empty().factorial(), 1);
    }

    #[test]
    fn splittings_carry_leibniz_multiplicities() {
        // d_{xx}(fg) = f_xx g + 2 f_x g_x + f g_xx
        let xx = MultiIndex::new(vec![0, 0]);
        let splits = xx.splittings();
        assert_eq!(splits.len(), 3);
        let mid = splits
            .iter()
            .find(|(s, x, _)| s.order() == 1 && x.order() == 1)
            .unwrap();
        assert_eq!(mid.2, 2);
    }

    #[test]
    fn enumeration_counts() {
        // n = 2, order <= 2: {}, 0, 1, 00, 01, 11
        assert_eq!(enumerate_indices(2, 2).len(), 6);
    }

    #[test]
    fn subtract_inverts_merge() {
        let a = MultiIndex::new(vec![0, 1, 1]);
        let b = MultiIndex::new(vec![1]);
        assert_eq!(a.subtract(&b).unwrap(), MultiIndex::new(vec![0, 1]));
        assert_eq!(a.subtract(&MultiIndex::new(vec![2])), None);
    }
}
