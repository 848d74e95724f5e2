//! k-linear forms on `R^n`: hypergraph adjacency, the complete form `A_K`,
//! the all-ones form `J`, the diagonal gap `D = J - A_K`, and affine
//! combinations of them, with a multi-start estimator for the spectral norm.
//!
//! Adjacency forms are evaluated from the edge list. `A_K` uses inclusion
//! and exclusion over set partitions of the slots, so nothing of size `n^k`
//! is ever materialized.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexes::Hypergraph;
use crate::error::{Error, Result};
use crate::rng::{streams, uniform_in, CounterStream};

#[derive(Clone, Debug)]
pub enum BaseForm {
    Adjacency(Arc<Hypergraph>),
    Complete,
    AllOnes,
    DiagonalGap,
    /// Arbitrary bilinear form `x^T M y`; `k = 2` only.
    Dense2(DMatrix<f64>),
}

#[derive(Clone, Debug)]
pub struct MultilinearForm {
    n: usize,
    k: usize,
    terms: Vec<(f64, BaseForm)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Adjacency,
    Complete,
    AllOnes,
    DiagonalGap,
    /// `A - alpha A_K`.
    DensityShift { alpha: f64 },
    /// `A - (k! |E| / n^k) J`.
    FriedmanWigderson,
    /// `A - (r/n) J` with `r` the maximum `(k-1)`-set degree.
    DegreeShift,
}

/// Builds the form of the given kind over `h` (or over `h`'s `n` and `k`).
pub fn make_form(kind: FormKind, h: &Hypergraph) -> MultilinearForm {
    let (n, k) = (h.n(), h.k());
    let adj = || BaseForm::Adjacency(Arc::new(h.clone()));
    let terms = match kind {
        FormKind::Adjacency => vec![(1.0, adj())],
        FormKind::Complete => vec![(1.0, BaseForm::Complete)],
        FormKind::AllOnes => vec![(1.0, BaseForm::AllOnes)],
        FormKind::DiagonalGap => vec![(1.0, BaseForm::DiagonalGap)],
        FormKind::DensityShift { alpha } => vec![(1.0, adj()), (-alpha, BaseForm::Complete)],
        FormKind::FriedmanWigderson => vec![(1.0, adj()), (-fw_coefficient(h), BaseForm::AllOnes)],
        FormKind::DegreeShift => {
            vec![(1.0, adj()), (-(h.max_degree() as f64) / n as f64, BaseForm::AllOnes)]
        }
    };
    MultilinearForm { n, k, terms }
}

/// `k! |E| / n^k`. For `r`-regular hypergraphs this is
/// `r (n-1)(n-2)...(n-k+2) / n^{k-1}`, which tends to `r/n` only as `n` grows.
pub fn fw_coefficient(h: &Hypergraph) -> f64 {
    let kf: f64 = (1..=h.k()).map(|i| i as f64).product();
    kf * h.edges().len() as f64 / (h.n() as f64).powi(h.k() as i32)
}

impl MultilinearForm {
    pub fn new(n: usize, k: usize, terms: Vec<(f64, BaseForm)>) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("forms need k >= 2, got {k}")));
        }
        for (i, (_, base)) in terms.iter().enumerate() {
            match base {
                BaseForm::Adjacency(h) if h.n() != n || h.k() != k => {
                    return Err(Error::validation(format!("terms[{i}]"), "hypergraph shape differs from the form"));
                }
                BaseForm::Dense2(m) if k != 2 || m.nrows() != n || m.ncols() != n => {
                    return Err(Error::validation(format!("terms[{i}]"), "dense terms need k = 2 and an n x n matrix"));
                }
                _ => {}
            }
        }
        Ok(Self { n, k, terms })
    }

    pub fn base(n: usize, k: usize, base: BaseForm) -> Result<Self> {
        Self::new(n, k, vec![(1.0, base)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[(f64, BaseForm)] {
        &self.terms
    }

    /// `self + c * other`.
    pub fn plus(mut self, c: f64, other: &MultilinearForm) -> Result<Self> {
        if (self.n, self.k) != (other.n, other.k) {
            return Err(Error::invalid("forms of different shapes"));
        }
        self.terms.extend(other.terms.iter().map(|(a, b)| (c * a, b.clone())));
        Ok(self)
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(_, b)| match b {
            BaseForm::Dense2(m) => m == &m.transpose(),
            _ => true,
        })
    }

    /// Upper bound on the absolute value of any coefficient `phi(e_i1, ..., e_ik)`.
    pub fn entry_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, b)| {
                c.abs()
                    * match b {
                        BaseForm::Dense2(m) => m.amax(),
                        _ => 1.0,
                    }
            })
            .sum()
    }

    fn check_len(&self, xs: &[&[f64]], slots: usize) -> Result<()> {
        if xs.len() != slots {
            return Err(Error::DimensionMismatch { expected: slots, actual: xs.len() });
        }
        if let Some(x) = xs.iter().find(|x| x.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, actual: x.len() });
        }
        Ok(())
    }

    /// The vector `phi(x_1, ..., x_{k-1}, .)`.
    pub fn partial(&self, xs: &[&[f64]]) -> Result<Vec<f64>> {
        self.check_len(xs, self.k - 1)?;
        let mut out = vec![0.0; self.n];
        for (c, base) in &self.terms {
            let part = base_partial(base, self.n, self.k, xs);
            for (o, p) in out.iter_mut().zip(part) {
                *o += c * p;
            }
        }
        Ok(out)
    }

    /// `phi(x, ..., x, .)`; faster than [`MultilinearForm::partial`] for
    /// adjacency terms.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let copies: Vec<&[f64]> = vec![x; self.k - 1];
        let mut out = vec![0.0; self.n];
        for (c, base) in &self.terms {
            let part = match base {
                BaseForm::Adjacency(h) => symmetric_adjacency_partial(h, x),
                _ => base_partial(base, self.n, self.k, &copies),
            };
            for (o, p) in out.iter_mut().zip(part) {
                *o += c * p;
            }
        }
        out
    }
}

/// `phi(x_1, ..., x_k)`. Affine combinations accumulate left to right from zero.
pub fn eval_form(phi: &MultilinearForm, xs: &[&[f64]]) -> Result<f64> {
    phi.check_len(xs, phi.k)?;
    let (head, last) = xs.split_at(phi.k - 1);
    Ok(phi.terms.iter().fold(0.0, |acc, (c, base)| {
        let part = base_partial(base, phi.n, phi.k, head);
        acc + c * dot(&part, last[0])
    }))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn base_partial(base: &BaseForm, n: usize, k: usize, xs: &[&[f64]]) -> Vec<f64> {
    match base {
        BaseForm::Adjacency(h) => adjacency_partial(h, xs),
        BaseForm::AllOnes => vec![xs.iter().map(|x| x.iter().sum::<f64>()).product(); n],
        BaseForm::Complete => complete_partial(n, k, xs),
        BaseForm::DiagonalGap => {
            let ones = base_partial(&BaseForm::AllOnes, n, k, xs);
            let complete = complete_partial(n, k, xs);
            ones.iter().zip(complete).map(|(a, b)| a - b).collect()
        }
        BaseForm::Dense2(m) => (m.transpose() * nalgebra::DVector::from_column_slice(xs[0])).as_slice().to_vec(),
    }
}

fn adjacency_partial(h: &Hypergraph, xs: &[&[f64]]) -> Vec<f64> {
    let k = h.k();
    let perms = permutations(k);
    let mut out = vec![0.0; h.n()];
    for e in h.edges() {
        for p in &perms {
            let w: f64 = (0..k - 1).map(|j| xs[j][e[p[j]]]).product();
            out[e[p[k - 1]]] += w;
        }
    }
    out
}

fn symmetric_adjacency_partial(h: &Hypergraph, x: &[f64]) -> Vec<f64> {
    let k = h.k();
    let fact: f64 = (1..k).map(|i| i as f64).product();
    let mut out = vec![0.0; h.n()];
    for e in h.edges() {
        for (i, &v) in e.iter().enumerate() {
            let w: f64 = e.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &u)| x[u]).product();
            out[v] += fact * w;
        }
    }
    out
}

/// `A_K(x_1, ..., x_{k-1}, e_i)` for every `i`: the sum over tuples of
/// distinct indices, by Moebius inversion on the partition lattice.
fn complete_partial(n: usize, k: usize, xs: &[&[f64]]) -> Vec<f64> {
    let last = k - 1;
    let mut out = vec![0.0; n];
    for (blocks, mu) in set_partitions(k) {
        let mut scale = mu;
        let mut own: &[usize] = &[];
        for b in &blocks {
            if b.contains(&last) {
                own = b;
            } else {
                scale *= (0..n).map(|i| b.iter().map(|&j| xs[j][i]).product::<f64>()).sum::<f64>();
            }
        }
        if scale == 0.0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += scale * own.iter().filter(|&&j| j != last).map(|&j| xs[j][i]).product::<f64>();
        }
    }
    out
}

/// All permutations of `0..k`.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Set partitions of `0..k` with their Moebius weights
/// `prod_B (-1)^{|B|-1} (|B|-1)!`.
fn set_partitions(k: usize) -> Vec<(Vec<Vec<usize>>, f64)> {
    fn go(i: usize, k: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == k {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, k, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, k, blocks, out);
        blocks.pop();
    }
    let mut all = Vec::new();
    go(0, k, &mut Vec::new(), &mut all);
    all.into_iter()
        .map(|blocks| {
            let mu = blocks
                .iter()
                .map(|b| {
                    let f: f64 = (1..b.len()).map(|i| i as f64).product();
                    if b.len() % 2 == 0 { -f } else { f }
                })
                .product();
            (blocks, mu)
        })
        .collect()
}

/// `e_H(V_1, ..., V_k)`: ordered tuples in `V_1 x ... x V_k` whose underlying
/// set is an edge. Parts may overlap.
pub fn count_e(h: &Hypergraph, sets: &[Vec<usize>]) -> Result<u64> {
    let (n, k) = (h.n(), h.k());
    if sets.len() != k {
        return Err(Error::DimensionMismatch { expected: k, actual: sets.len() });
    }
    let mut member = vec![vec![false; n]; k];
    for (j, s) in sets.iter().enumerate() {
        for &v in s {
            if v >= n {
                return Err(Error::validation(format!("sets[{j}]"), format!("vertex {v} out of range 0..{n}")));
            }
            member[j][v] = true;
        }
    }
    let perms = permutations(k);
    Ok(h.edges()
        .iter()
        .map(|e| perms.iter().filter(|p| (0..k).all(|j| member[j][e[p[j]]])).count() as u64)
        .sum())
}

/// Indicator vector of `set` in `R^n`.
pub fn indicator(n: usize, set: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for &v in set {
        x[v] = 1.0;
    }
    x
}

/// Closed-form bounds `(lower, upper)` on the norm of `D = J - A_K`:
/// `(n^k - n!/(n-k)!) / n^{k/2}` and `k^2 n^{(k-2)/2}`.
pub fn d_norm_bounds(n: usize, k: usize) -> Result<(f64, f64)> {
    if k < 2 || n < k {
        return Err(Error::invalid(format!("need n >= k >= 2, got n={n}, k={k}")));
    }
    let nf = n as f64;
    let falling: f64 = (0..k).map(|i| (n - i) as f64).product();
    let lower = (nf.powi(k as i32) - falling) / nf.powf(k as f64 / 2.0);
    let upper = (k * k) as f64 * nf.powf((k as f64 - 2.0) / 2.0);
    Ok((lower, upper))
}

/// Dense matrix of a bilinear form.
pub fn dense_matrix(phi: &MultilinearForm) -> Result<DMatrix<f64>> {
    if phi.k != 2 {
        return Err(Error::invalid("dense matrices exist for k = 2 only"));
    }
    let n = phi.n;
    let mut m = DMatrix::zeros(n, n);
    for (c, base) in &phi.terms {
        let b = match base {
            BaseForm::Adjacency(h) => {
                let mut a = DMatrix::zeros(n, n);
                for e in h.edges() {
                    a[(e[0], e[1])] = 1.0;
                    a[(e[1], e[0])] = 1.0;
                }
                a
            }
            BaseForm::Complete => DMatrix::from_element(n, n, 1.0) - DMatrix::identity(n, n),
            BaseForm::AllOnes => DMatrix::from_element(n, n, 1.0),
            BaseForm::DiagonalGap => DMatrix::identity(n, n),
            BaseForm::Dense2(a) => a.clone(),
        };
        m += b * *c;
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self { starts: 32, max_iters: 5000, tol: 1e-9, seed: 0 }
    }
}

/// Where the reported value came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "source")]
pub enum WitnessSource {
    /// Power iteration from start `start` maximizing `sign * phi(x, ..., x)`.
    Iteration { start: usize, sign: i8 },
    /// Full multilinear ratio of caller tuple `index`.
    Tuple { index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    /// A lower bound on the norm: an attained ratio.
    pub value: f64,
    /// Unit vector (symmetric source) or the first vector of the tuple.
    pub witness: Vec<f64>,
    pub source: WitnessSource,
    pub starts: usize,
    pub iterations: usize,
    pub converged: bool,
    pub shift: f64,
    pub trace_len: usize,
}

struct Run {
    value: f64,
    x: Vec<f64>,
    iterations: usize,
    converged: bool,
    shift: f64,
}

fn normalize(mut x: Vec<f64>) -> Option<Vec<f64>> {
    let s = norm(&x);
    if s == 0.0 || !s.is_finite() {
        return None;
    }
    x.iter_mut().for_each(|v| *v /= s);
    Some(x)
}

/// Shifted symmetric power iteration ascending `sign * phi(x, ..., x)` on the
/// unit sphere. A step that fails to ascend doubles the shift and is retried.
fn ascend(phi: &MultilinearForm, x0: Vec<f64>, sign: f64, shift0: f64, opts: &EstimatorOptions) -> Run {
    let k = phi.k as f64;
    let value_at = |x: &[f64], g: &[f64]| sign * dot(g, x);
    let mut x = x0;
    let mut g = phi.gradient(&x);
    let mut f = value_at(&x, &g);
    let mut best = Run { value: f.abs(), x: x.clone(), iterations: 0, converged: false, shift: shift0 };
    let mut shift = shift0;
    let mut iter = 0;
    while iter < opts.max_iters {
        iter += 1;
        let step: Vec<f64> = g.iter().zip(&x).map(|(gi, xi)| sign * gi + shift * xi).collect();
        let Some(next) = normalize(step) else { break };
        let g_next = phi.gradient(&next);
        let f_next = value_at(&next, &g_next);
        if f_next.abs() > best.value {
            best.value = f_next.abs();
            best.x = next.clone();
        }
        if f_next < f - 1e-12 * f.abs().max(1.0) {
            shift *= 2.0;
            if shift > 1e12 * (k + phi.entry_bound()) {
                break;
            }
            continue;
        }
        let change = (f_next - f).abs() / f_next.abs().max(f64::MIN_POSITIVE);
        x = next;
        g = g_next;
        f = f_next;
        if change < opts.tol {
            best.converged = true;
            break;
        }
    }
    best.iterations = iter;
    best.shift = shift;
    best
}

/// `|phi(x_1, ..., x_k)| / (sqrt(prod ||x_j||^2))`.
pub fn tuple_ratio(phi: &MultilinearForm, xs: &[&[f64]]) -> Result<f64> {
    let value = eval_form(phi, xs)?;
    let sq: f64 = xs.iter().map(|x| dot(x, x)).product();
    Ok(if sq == 0.0 { 0.0 } else { value.abs() / sq.sqrt() })
}

/// Multi-start estimate of `sup |phi(x, ..., x)| / ||x||^k` for a symmetric
/// form. Starts are `opts.starts` random vectors, then `witness_seeds`, then
/// the all-ones vector; each runs for both signs. Every tuple in
/// `witness_tuples` is also scored by its full multilinear ratio, so the
/// result is at least the ratio of each supplied tuple.
pub fn spectral_norm_estimate(
    phi: &MultilinearForm,
    opts: &EstimatorOptions,
    witness_seeds: &[Vec<f64>],
    witness_tuples: &[Vec<Vec<f64>>],
) -> Result<SpectralEstimate> {
    if !phi.is_symmetric() {
        return Err(Error::invalid("spectral estimation needs a symmetric form"));
    }
    if opts.starts == 0 {
        return Err(Error::invalid("need at least one start"));
    }
    let n = phi.n;
    let draws = CounterStream::new(opts.seed, streams::ESTIMATOR_STARTS);
    let mut starts: Vec<Vec<f64>> = (0..opts.starts)
        .map(|s| {
            let mut rng = draws.block(s as u64);
            (0..n).map(|_| uniform_in(&mut rng, -1.0, 1.0)).collect()
        })
        .collect();
    for (i, w) in witness_seeds.iter().enumerate() {
        if w.len() != n {
            return Err(Error::validation(format!("witness_seeds[{i}]"), format!("length {} != {n}", w.len())));
        }
        starts.push(w.clone());
    }
    starts.push(vec![1.0; n]);

    let shift0 = phi.k as f64 * phi.entry_bound();
    let jobs: Vec<(usize, i8)> = (0..starts.len()).flat_map(|s| [(s, 1i8), (s, -1i8)]).collect();
    let runs: Vec<Option<Run>> = jobs
        .par_iter()
        .map(|&(s, sign)| normalize(starts[s].clone()).map(|x| ascend(phi, x, f64::from(sign), shift0, opts)))
        .collect();

    let mut best: Option<SpectralEstimate> = None;
    let mut total = 0;
    for (&(start, sign), run) in jobs.iter().zip(runs) {
        let Some(run) = run else { continue };
        total += run.iterations;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(SpectralEstimate {
                value: run.value,
                witness: run.x,
                source: WitnessSource::Iteration { start, sign },
                starts: starts.len(),
                iterations: run.iterations,
                converged: run.converged,
                shift: run.shift,
                trace_len: 0,
            });
        }
    }
    let mut best = best.unwrap_or(SpectralEstimate {
        value: 0.0,
        witness: vec![0.0; n],
        source: WitnessSource::Iteration { start: 0, sign: 1 },
        starts: starts.len(),
        iterations: 0,
        converged: true,
        shift: shift0,
        trace_len: 0,
    });
    best.trace_len = total;

    for (index, tuple) in witness_tuples.iter().enumerate() {
        let xs: Vec<&[f64]> = tuple.iter().map(Vec::as_slice).collect();
        let ratio = tuple_ratio(phi, &xs)?;
        if ratio > best.value {
            best.value = ratio;
            best.witness = tuple[0].clone();
            best.source = WitnessSource::Tuple { index };
            best.converged = true;
        }
    }
    Ok(best)
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn symmetric_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().symmetric_eigenvalues().amax()
}
