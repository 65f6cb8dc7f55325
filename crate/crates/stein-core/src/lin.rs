//! Sparse formal linear combinations with rational coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::qlinalg::Q;

/// A finite ℚ-linear combination of keys. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lin<K: Ord> {
    map: BTreeMap<K, Q>,
}

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin { map: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K, c: Q) -> Self {
        let mut out = Self::new();
        out.add_term(key, c);
        out
    }

    pub fn add_term(&mut self, key: K, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.map.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Lin<K>, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.map {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add_assign(&mut self, other: &Lin<K>) {
        self.add_scaled(other, &Q::one());
    }

    pub fn sub_assign(&mut self, other: &Lin<K>) {
        self.add_scaled(other, &-Q::one());
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, key: &K) -> Q {
        self.map.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.map.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.map.keys()
    }

    pub fn pop_first(&mut self) -> Option<(K, Q)> {
        self.map.pop_first()
    }

    pub fn into_map(self) -> BTreeMap<K, Q> {
        self.map
    }

    /// Applies a linear map given on keys.
    pub fn map_linear<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<K2>) -> Lin<K2> {
        let mut out = Lin::new();
        for (k, c) in &self.map {
            out.add_scaled(&f(k), c);
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(iter: I) -> Self {
        let mut out = Lin::new();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

impl<K: Ord + Clone> IntoIterator for Lin<K> {
    type Item = (K, Q);
    type IntoIter = std::collections::btree_map::IntoIter<K, Q>;
    fn into_iter(self) -> Self::IntoIter {
        self.map.into_iter()
    }
}

/// Sorts `v` in place and returns the sign of the sorting permutation,
/// or 0 when two entries coincide.
pub fn sort_with_sign<T: Ord>(v: &mut [T]) -> i32 {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// Sign of a permutation given as images of 0..n.
pub fn perm_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All (p, q) shuffles of two sequences, without signs.
pub fn shuffles<T: Clone>(a: &[T], b: &[T]) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(a.len() + b.len());
    fn rec<T: Clone>(a: &[T], b: &[T], cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if a.is_empty() && b.is_empty() {
            out.push(cur.clone());
            return;
        }
        if let Some((x, rest)) = a.split_first() {
            cur.push(x.clone());
            rec(rest, b, cur, out);
            cur.pop();
        }
        if let Some((y, rest)) = b.split_first() {
            cur.push(y.clone());
            rec(a, rest, cur, out);
            cur.pop();
        }
    }
    rec(a, b, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::qi;

    #[test]
    fn cancellation_removes_keys() {
        let mut x = Lin::single("a", qi(2));
        x.add_term("a", qi(-2));
        assert!(x.is_zero());
    }

    #[test]
    fn sort_sign() {
        let mut v = vec![3, 1, 2];
        assert_eq!(sort_with_sign(&mut v), 1);
        let mut v = vec![2, 1];
        assert_eq!(sort_with_sign(&mut v), -1);
        let mut v = vec![1, 1];
        assert_eq!(sort_with_sign(&mut v), 0);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(&[1, 2], &[3]).len(), 3);
        assert_eq!(shuffles(&[1, 2], &[3, 4]).len(), 6);
        assert_eq!(shuffles::<i32>(&[], &[]).len(), 1);
    }
}
