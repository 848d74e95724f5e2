//! Simplicial complexes with complete skeleton, uniform hypergraphs,
//! oriented cells and their generators.
//!
//! Vertices are `0..n`. Every cell is stored in ascending vertex order, which
//! is also its canonical (positive) orientation, and cell lists are sorted
//! lexicographically so that matrix rows and columns line up with
//! [`combinations`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{streams, CounterStream};

/// `C(n, k)`, saturating at `u128::MAX` (never reached at desk scale).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All ascending `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Position of an ascending subset of `0..n` in [`combinations`] order.
pub fn lex_rank(cell: &[usize], n: usize) -> usize {
    let m = cell.len();
    let mut rank: u128 = 0;
    let mut next = 0;
    for (i, &c) in cell.iter().enumerate() {
        for skipped in next..c {
            rank += binomial(n - 1 - skipped, m - 1 - i);
        }
        next = c + 1;
    }
    rank as usize
}

/// Sign of a permutation of `0..len` given in one-line notation.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// A cell together with a chosen vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedCell {
    vertices: Vec<usize>,
    canonical: Vec<usize>,
    parity: i8,
}

impl OrientedCell {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        let mut canonical = vertices.clone();
        canonical.sort_unstable();
        if canonical.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("cell {vertices:?} repeats a vertex")));
        }
        let perm: Vec<usize> = vertices
            .iter()
            .map(|v| canonical.binary_search(v).expect("vertex present"))
            .collect();
        let parity = permutation_sign(&perm);
        Ok(Self { vertices, canonical, parity })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn canonical(&self) -> &[usize] {
        &self.canonical
    }

    /// `+1` iff the presented order is an even permutation of the ascending one.
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        if v.len() >= 2 {
            v.swap(0, 1);
        }
        Self::new(v).expect("swap keeps vertices distinct")
    }
}

/// Sign of the permutation `pi` of `0..d` with `sigma[pi(i)] = sigma_prime[i]`
/// whenever `sigma_prime[i]` lies in `sigma`; the one unshared vertex of
/// `sigma_prime` is sent to the position of the unshared vertex of `sigma`.
pub fn orientation_sign(sigma: &[usize], sigma_prime: &[usize]) -> Result<i8> {
    let d = sigma.len();
    if sigma_prime.len() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: sigma_prime.len() });
    }
    let mut perm = vec![usize::MAX; d];
    let mut used = vec![false; d];
    let mut unshared = Vec::new();
    for (i, v) in sigma_prime.iter().enumerate() {
        match sigma.iter().position(|w| w == v) {
            Some(p) => {
                perm[i] = p;
                used[p] = true;
            }
            None => unshared.push(i),
        }
    }
    if unshared.len() > 1 {
        return Err(Error::NotAdjacent(sigma.to_vec(), sigma_prime.to_vec()));
    }
    if let Some(&i) = unshared.first() {
        perm[i] = used.iter().position(|u| !u).expect("one free slot");
    }
    Ok(permutation_sign(&perm))
}

/// A `d`-dimensional complex on vertices `0..n` whose `i`-cells for `i < d`
/// are all present. Only the top cells (facets) are stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawComplex")]
pub struct SimplicialComplex {
    n: usize,
    d: usize,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Validates every invariant; facets must already be ascending and
    /// lexicographically sorted.
    pub fn new(n: usize, d: usize, facets: Vec<Vec<usize>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::validation("d", "dimension must be at least 1"));
        }
        if n == 0 {
            return Err(Error::validation("n", "need at least one vertex"));
        }
        validate_sets(&facets, n, d + 1, "facets")?;
        Ok(Self { n, d, facets })
    }

    /// Sorts each facet and the facet list before validating.
    pub fn from_unsorted(n: usize, d: usize, mut facets: Vec<Vec<usize>>) -> Result<Self> {
        for f in &mut facets {
            f.sort_unstable();
        }
        facets.sort();
        Self::new(n, d, facets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn contains_facet(&self, cell: &[usize]) -> bool {
        self.facets.binary_search_by(|f| f.as_slice().cmp(cell)).is_ok()
    }

    /// Canonical `(d-1)`-cells, the index set of cochains.
    pub fn ridge_cells(&self) -> Vec<Vec<usize>> {
        combinations(self.n, self.d)
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        DegreeProfile::from_sets(self.n, self.d, &self.facets)
    }
}

/// A `k`-uniform hypergraph without loops or repeated edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::validation("k", "uniformity must be at least 2"));
        }
        if n < k {
            return Err(Error::validation("n", format!("need n >= k, got n={n}, k={k}")));
        }
        validate_sets(&edges, n, k, "edges")?;
        Ok(Self { n, k, edges })
    }

    pub fn from_unsorted(n: usize, k: usize, mut edges: Vec<Vec<usize>>) -> Result<Self> {
        for e in &mut edges {
            e.sort_unstable();
        }
        edges.sort();
        Self::new(n, k, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn contains_edge(&self, set: &[usize]) -> bool {
        self.edges.binary_search_by(|e| e.as_slice().cmp(set)).is_ok()
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        DegreeProfile::from_sets(self.n, self.k - 1, &self.edges)
    }

    /// Maximum degree of a `(k-1)`-set; the `r` of every bound formula.
    pub fn max_degree(&self) -> usize {
        self.degree_profile().max
    }

    /// The same edge set viewed as a 1-dimensional complex (`k = 2` only).
    pub fn as_graph_complex(&self) -> Result<SimplicialComplex> {
        if self.k != 2 {
            return Err(Error::invalid("only 2-uniform hypergraphs are graphs"));
        }
        SimplicialComplex::new(self.n, 1, self.edges.clone())
    }
}

fn validate_sets(sets: &[Vec<usize>], n: usize, size: usize, field: &str) -> Result<()> {
    for (i, s) in sets.iter().enumerate() {
        let path = format!("{field}[{i}]");
        if s.len() != size {
            return Err(Error::validation(path, format!("{s:?} has {} vertices, expected {size}", s.len())));
        }
        if let Some(v) = s.iter().find(|&&v| v >= n) {
            return Err(Error::validation(path, format!("{s:?} has vertex {v} outside 0..{n}")));
        }
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation(path, format!("{s:?} is not strictly ascending")));
        }
        if i > 0 {
            match sets[i - 1].cmp(s) {
                std::cmp::Ordering::Equal => {
                    return Err(Error::validation(path, format!("duplicate {s:?}")));
                }
                std::cmp::Ordering::Greater => {
                    return Err(Error::validation(path, format!("{s:?} is out of lexicographic order")));
                }
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Ok(())
}

/// Checks sets given in arbitrary order, reporting positions as given.
fn validate_unsorted(sets: &[Vec<usize>], n: usize, size: usize, field: &str) -> Result<()> {
    let mut seen = std::collections::HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        let path = format!("{field}[{i}]");
        if s.len() != size {
            return Err(Error::validation(path, format!("{s:?} has {} vertices, expected {size}", s.len())));
        }
        if let Some(v) = s.iter().find(|&&v| v >= n) {
            return Err(Error::validation(path, format!("{s:?} has vertex {v} outside 0..{n}")));
        }
        let mut sorted = s.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::validation(path, format!("{s:?} repeats a vertex")));
        }
        if let Some(first) = seen.insert(sorted, i) {
            return Err(Error::validation(path, format!("duplicate {s:?} (first at {field}[{first}])")));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
struct RawComplex {
    n: usize,
    d: usize,
    facets: Vec<Vec<usize>>,
}

impl TryFrom<RawComplex> for SimplicialComplex {
    type Error = Error;

    fn try_from(raw: RawComplex) -> Result<Self> {
        if raw.d == 0 {
            return Err(Error::validation("d", "dimension must be at least 1"));
        }
        validate_unsorted(&raw.facets, raw.n, raw.d + 1, "facets")?;
        Self::from_unsorted(raw.n, raw.d, raw.facets)
    }
}

#[derive(Deserialize)]
struct RawHypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        if raw.k < 2 {
            return Err(Error::validation("k", "uniformity must be at least 2"));
        }
        validate_unsorted(&raw.edges, raw.n, raw.k, "edges")?;
        Self::from_unsorted(raw.n, raw.k, raw.edges)
    }
}

/// Degrees of the codimension-one faces: `(d-1)`-cells of a complex or
/// `(k-1)`-sets of a hypergraph, indexed in [`combinations`] order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub regular: bool,
}

impl DegreeProfile {
    fn from_sets(n: usize, face_size: usize, sets: &[Vec<usize>]) -> Self {
        let mut degrees = vec![0usize; binomial(n, face_size) as usize];
        let mut face = Vec::with_capacity(face_size);
        for s in sets {
            for skip in 0..s.len() {
                face.clear();
                face.extend(s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                degrees[lex_rank(&face, n)] += 1;
            }
        }
        let min = degrees.iter().copied().min().unwrap_or(0);
        let max = degrees.iter().copied().max().unwrap_or(0);
        let total: usize = degrees.iter().sum();
        let mean = if degrees.is_empty() { 0.0 } else { total as f64 / degrees.len() as f64 };
        Self { degrees, min, max, mean, regular: min == max }
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexKind {
    Complete,
    Empty,
    /// Each potential facet kept independently with probability `p`.
    LinialMeshulam { p: f64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypergraphKind {
    Complete,
    Gnp { alpha: f64, seed: u64 },
}

fn check_probability(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Keeps the candidate sets whose counter-stream draw falls below `p`.
fn bernoulli_subsets(candidates: Vec<Vec<usize>>, p: f64, seed: u64, stream: u64) -> Vec<Vec<usize>> {
    let draws = CounterStream::new(seed, stream);
    candidates
        .into_par_iter()
        .enumerate()
        .filter(|(rank, _)| draws.uniform(*rank as u64) < p)
        .map(|(_, c)| c)
        .collect()
}

pub fn gen_complex(kind: ComplexKind, n: usize, d: usize) -> Result<SimplicialComplex> {
    if d == 0 || n <= d {
        return Err(Error::invalid(format!("need n > d >= 1, got n={n}, d={d}")));
    }
    let facets = match kind {
        ComplexKind::Complete => combinations(n, d + 1),
        ComplexKind::Empty => Vec::new(),
        ComplexKind::LinialMeshulam { p, seed } => {
            check_probability(p, "p")?;
            bernoulli_subsets(combinations(n, d + 1), p, seed, streams::COMPLEX_FACETS)
        }
    };
    SimplicialComplex::new(n, d, facets)
}

pub fn gen_hypergraph(kind: HypergraphKind, n: usize, k: usize) -> Result<Hypergraph> {
    if k < 2 || n < k {
        return Err(Error::invalid(format!("need n >= k >= 2, got n={n}, k={k}")));
    }
    let edges = match kind {
        HypergraphKind::Complete => combinations(n, k),
        HypergraphKind::Gnp { alpha, seed } => {
            check_probability(alpha, "alpha")?;
            bernoulli_subsets(combinations(n, k), alpha, seed, streams::HYPERGRAPH_EDGES)
        }
    };
    Hypergraph::new(n, k, edges)
}
