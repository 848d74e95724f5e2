//! Exhaustive sweep over assignments of vertices to parts.
//!
//! Each vertex gets a label in `0..=parts` (0 = unused). For every complete
//! assignment the sweep reports how many of the given sets (facets or
//! hyperedges, each of size `parts`) meet every part exactly once, which is
//! the partite count `F(S_0, ..., S_d)` or `e(V_1, ..., V_k)` for disjoint
//! parts. Counts are maintained incrementally: a set is tested once, at the
//! depth of its largest vertex.
//!
//! Labels are assigned in increasing order with vertex 0 most significant,
//! so within one worker leaves arrive in lexicographic order of their label
//! strings. Work is split on the labels of the first two vertices and the
//! per-prefix results are merged in prefix order, which keeps every result
//! independent of the number of workers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{streams, CounterStream};

#[derive(Clone, Debug)]
pub struct PartiteSweep {
    n: usize,
    parts: usize,
    by_max: Vec<Vec<Vec<usize>>>,
    caps: Vec<usize>,
    canonical: bool,
    require_nonempty: bool,
}

/// A complete assignment handed to the visitor.
pub struct Leaf<'a> {
    pub labels: &'a [u8],
    /// `sizes[p]` for part `p` in `1..=parts`; `sizes[0]` counts unused vertices.
    pub sizes: &'a [usize],
    pub count: u64,
}

#[derive(Clone)]
struct State {
    labels: Vec<u8>,
    sizes: Vec<usize>,
    count: u64,
    max_used: u8,
    empty_parts: usize,
}

impl PartiteSweep {
    pub fn new(n: usize, parts: usize, sets: &[Vec<usize>]) -> Self {
        assert!((1..64).contains(&parts), "parts out of range");
        let mut by_max = vec![Vec::new(); n];
        for s in sets {
            debug_assert_eq!(s.len(), parts);
            if let Some(&m) = s.iter().max() {
                by_max[m].push(s.clone());
            }
        }
        Self {
            n,
            parts,
            by_max,
            caps: vec![usize::MAX; parts + 1],
            canonical: false,
            require_nonempty: false,
        }
    }

    /// Only visit label strings in which part `p` first appears before part
    /// `p + 1`. Valid when the visited quantity is invariant under permuting
    /// parts; the lexicographically least maximiser is always canonical.
    pub fn canonical(mut self, yes: bool) -> Self {
        self.canonical = yes;
        self
    }

    pub fn require_nonempty(mut self, yes: bool) -> Self {
        self.require_nonempty = yes;
        self
    }

    /// At most `cap` vertices in part `part` (1-based).
    pub fn cap(mut self, part: usize, cap: usize) -> Self {
        self.caps[part] = cap;
        self
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    /// `(parts + 1)^n`, the size of the unrestricted assignment space.
    pub fn state_space(&self) -> u128 {
        (self.parts as u128 + 1).saturating_pow(self.n as u32)
    }

    fn full_mask(&self) -> u64 {
        ((1u64 << (self.parts + 1)) - 1) & !1
    }

    fn is_partite(&self, set: &[usize], labels: &[u8]) -> bool {
        let mut mask = 0u64;
        for &v in set {
            mask |= 1 << labels[v];
        }
        mask == self.full_mask()
    }

    /// Partite count for an explicit label string.
    pub fn count(&self, labels: &[u8]) -> u64 {
        self.by_max
            .iter()
            .flatten()
            .filter(|s| self.is_partite(s, labels))
            .count() as u64
    }

    fn root(&self) -> State {
        let sizes = vec![0; self.parts + 1];
        State {
            labels: vec![0; self.n],
            sizes,
            count: 0,
            max_used: 0,
            empty_parts: self.parts,
        }
    }

    fn walk<F: FnMut(&State)>(&self, st: &mut State, v: usize, stop: usize, f: &mut F) {
        if v == stop {
            f(st);
            return;
        }
        let hi = if self.canonical {
            (st.max_used as usize + 1).min(self.parts)
        } else {
            self.parts
        };
        let remaining = self.n - v - 1;
        for label in 0..=hi {
            if label > 0 && st.sizes[label] >= self.caps[label] {
                continue;
            }
            let fills = label > 0 && st.sizes[label] == 0;
            let empty_after = st.empty_parts - usize::from(fills);
            if self.require_nonempty && empty_after > remaining {
                continue;
            }
            let prev_max = st.max_used;
            st.labels[v] = label as u8;
            st.sizes[label] += 1;
            st.empty_parts = empty_after;
            st.max_used = prev_max.max(label as u8);
            let added = self.by_max[v].iter().filter(|s| self.is_partite(s, &st.labels)).count() as u64;
            st.count += added;

            self.walk(st, v + 1, stop, f);

            st.count -= added;
            st.max_used = prev_max;
            st.empty_parts += usize::from(fills);
            st.sizes[label] -= 1;
            st.labels[v] = 0;
        }
    }

    /// Folds `visit` over every admitted assignment. `merge` combines
    /// per-prefix accumulators left to right in lexicographic prefix order.
    pub fn fold<T, I, V, M>(&self, init: I, visit: V, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &Leaf<'_>) + Sync,
        M: Fn(T, T) -> T,
    {
        let split = self.n.min(2);
        let mut prefixes = Vec::new();
        self.walk(&mut self.root(), 0, split, &mut |st: &State| prefixes.push(st.clone()));

        let partials: Vec<T> = prefixes
            .into_par_iter()
            .map(|mut st| {
                let mut acc = init();
                self.walk(&mut st, split, self.n, &mut |leaf: &State| {
                    visit(
                        &mut acc,
                        &Leaf { labels: &leaf.labels, sizes: &leaf.sizes, count: leaf.count },
                    )
                });
                acc
            })
            .collect();
        partials.into_iter().fold(init(), merge)
    }
}

/// Cap on enumerated states; `force` lifts it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_states: u128,
    pub force: bool,
}

impl Budget {
    pub const DEFAULT_STATES: u128 = 100_000_000;

    pub fn new(max_states: u128, force: bool) -> Self {
        Self { max_states, force }
    }

    pub fn check(&self, states: u128) -> Result<()> {
        if states > self.max_states && !self.force {
            return Err(Error::BudgetExceeded { states, budget: self.max_states });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_STATES, false)
    }
}

/// Running maximum with lexicographically-least label string on ties.
#[derive(Clone, Debug, Default)]
pub struct Best {
    pub value: f64,
    pub labels: Option<Vec<u8>>,
    pub examined: u64,
}

impl Best {
    pub fn offer(&mut self, value: f64, labels: &[u8]) {
        self.examined += 1;
        let better = match &self.labels {
            None => true,
            Some(cur) => value > self.value || (value == self.value && labels < cur.as_slice()),
        };
        if better {
            self.value = value;
            self.labels = Some(labels.to_vec());
        }
    }

    pub fn merge(mut self, other: Best) -> Best {
        let examined = self.examined + other.examined;
        if let Some(l) = other.labels {
            self.offer(other.value, &l);
        }
        self.examined = examined;
        self
    }
}

/// Label string number `index` of a sampled batch: each vertex independently
/// uniform over `0..=parts`.
pub fn sampled_labels(n: usize, parts: usize, seed: u64, index: u64) -> Vec<u8> {
    let draws = CounterStream::new(seed, streams::SAMPLE_TUPLES);
    let q = (parts + 1) as f64;
    (0..n)
        .map(|v| ((draws.uniform(index * n as u64 + v as u64) * q) as usize).min(parts) as u8)
        .collect()
}

/// Best value of `eval` over `count` sampled label strings; `None` results
/// (inadmissible tuples) are skipped and not counted as examined.
pub fn sample_best<E>(n: usize, parts: usize, count: u64, seed: u64, eval: E) -> Best
where
    E: Fn(&[u8]) -> Option<f64> + Sync,
{
    let scored: Vec<Option<(f64, Vec<u8>)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let labels = sampled_labels(n, parts, seed, i);
            eval(&labels).map(|v| (v, labels))
        })
        .collect();
    let mut best = Best::default();
    for (v, labels) in scored.into_iter().flatten() {
        best.offer(v, &labels);
    }
    best
}

/// Splits a label string into its parts (1-based labels become 0-based parts).
pub fn parts_from_labels(labels: &[u8], parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); parts];
    for (v, &l) in labels.iter().enumerate() {
        if l > 0 {
            out[l as usize - 1].push(v);
        }
    }
    out
}

/// Inverse of [`parts_from_labels`]; parts must be disjoint.
pub fn labels_from_parts(n: usize, parts: &[Vec<usize>]) -> Option<Vec<u8>> {
    let mut labels = vec![0u8; n];
    for (p, part) in parts.iter().enumerate() {
        for &v in part {
            if v >= n || labels[v] != 0 {
                return None;
            }
            labels[v] = p as u8 + 1;
        }
    }
    Some(labels)
}
