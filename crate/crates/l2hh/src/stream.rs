//! Stream values: elements, window iteration, frequency vectors.

use std::collections::HashMap;

use crate::{Error, Result};

/// A stream element. Ids live in `[0, U)` for a universe bound `U` that the
/// file loaders and generators enforce; the algorithms themselves only ever
/// hash or compare ids.
pub type Element = u64;

/// Iterator over `(window_index, slice)` pairs of width `w`.
///
/// Windows partition the stream in order; the final window may be shorter
/// when `w` does not divide the stream length.
pub struct Windows<'a> {
    data: &'a [Element],
    w: usize,
    next: u64,
}

impl<'a> Iterator for Windows<'a> {
    type Item = (u64, &'a [Element]);

    fn next(&mut self) -> Option<Self::Item> {
        if self.data.is_empty() {
            return None;
        }
        let take = self.w.min(self.data.len());
        let (head, rest) = self.data.split_at(take);
        let idx = self.next;
        self.data = rest;
        self.next += 1;
        Some((idx, head))
    }
}

/// Split `elements` into consecutive windows of width `w`.
pub fn windowize(elements: &[Element], w: usize) -> Result<Windows<'_>> {
    if w == 0 {
        return Err(Error::config("window width must be positive"));
    }
    Ok(Windows {
        data: elements,
        w,
        next: 0,
    })
}

/// Exact per-element occurrence counts of a stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyVector {
    counts: HashMap<Element, u64>,
    n: u64,
}

impl FrequencyVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build directly from `(element, count)` pairs; duplicate ids accumulate.
    pub fn from_counts(pairs: impl IntoIterator<Item = (Element, u64)>) -> Self {
        let mut fv = Self::new();
        for (x, c) in pairs {
            fv.add(x, c);
        }
        fv
    }

    pub fn add(&mut self, x: Element, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(x).or_insert(0) += count;
        self.n += count;
    }

    /// Occurrence count of `x`; absent elements map to zero.
    pub fn get(&self, x: Element) -> u64 {
        self.counts.get(&x).copied().unwrap_or(0)
    }

    /// Total number of stream positions (sum of all counts).
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of distinct elements.
    pub fn support(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Element, u64)> + '_ {
        self.counts.iter().map(|(&x, &c)| (x, c))
    }

    /// `(element, count)` pairs in ascending element order.
    pub fn sorted(&self) -> Vec<(Element, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable();
        v
    }

    /// Second moment Σ f_x², exact.
    pub fn f2(&self) -> u128 {
        self.counts
            .values()
            .map(|&c| (c as u128) * (c as u128))
            .sum()
    }

    /// Third moment Σ f_x³, exact.
    pub fn f3(&self) -> u128 {
        self.counts
            .values()
            .map(|&c| (c as u128) * (c as u128) * (c as u128))
            .sum()
    }
}

/// Count occurrences of every element of `stream`.
pub fn frequency_vector(stream: &[Element]) -> FrequencyVector {
    let mut fv = FrequencyVector::new();
    for &x in stream {
        fv.add(x, 1);
    }
    fv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_split_evenly() {
        let s = [10, 11, 12, 13];
        let got: Vec<_> = windowize(&s, 2).unwrap().collect();
        assert_eq!(got, vec![(0, &s[0..2]), (1, &s[2..4])]);
    }

    #[test]
    fn windows_ragged_tail() {
        let s = [10, 11, 12];
        let got: Vec<_> = windowize(&s, 2).unwrap().collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[1], (1, &s[2..3]));
    }

    #[test]
    fn windows_empty_stream() {
        assert_eq!(windowize(&[], 3).unwrap().count(), 0);
    }

    #[test]
    fn windows_zero_width_rejected() {
        assert!(windowize(&[1], 0).is_err());
    }

    #[test]
    fn windows_concatenation_is_identity() {
        let s: Vec<Element> = (0..137).map(|i| i * 7 % 13).collect();
        for w in [1usize, 2, 5, 64, 137, 200] {
            let mut cat = Vec::new();
            for (_, win) in windowize(&s, w).unwrap() {
                cat.extend_from_slice(win);
            }
            assert_eq!(cat, s, "width {w}");
        }
    }

    #[test]
    fn frequency_vector_counts() {
        let fv = frequency_vector(&[7, 7, 9]);
        assert_eq!(fv.get(7), 2);
        assert_eq!(fv.get(9), 1);
        assert_eq!(fv.get(8), 0);
        assert_eq!(fv.n(), 3);
    }

    #[test]
    fn frequency_vector_empty() {
        let fv = frequency_vector(&[]);
        assert_eq!(fv.n(), 0);
        assert_eq!(fv.support(), 0);
        assert_eq!(fv.f2(), 0);
    }

    #[test]
    fn moments_exact() {
        let fv = FrequencyVector::from_counts([(1, 2), (2, 1)]);
        assert_eq!(fv.f2(), 5);
        assert_eq!(fv.f3(), 9);
    }

    #[test]
    fn thousand_draws_sum_to_thousand() {
        let stream: Vec<Element> = (0..1000).map(|i| (i * 2654435761) % 10).collect();
        let fv = frequency_vector(&stream);
        assert_eq!(fv.iter().map(|(_, c)| c).sum::<u64>(), 1000);
        assert_eq!(fv.n(), 1000);
    }
}
