//! Constructive steps from the inverse-mixing arguments as standalone
//! routines: sign splitting, dyadic layers, randomized rounding to dyadic
//! values, the partition-averaging identity and a checker for the
//! hypotheses and conclusion of the Bilu-Linial lemma.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use rand::{Rng, RngCore};

use crate::complexes::{gen_hypergraph, Hypergraph, HypergraphKind};
use crate::hypergraph_mixing::{rho_alpha, rho_envelope};
use crate::error::{Error, Result};
use crate::report::{lg_plus, Check, CheckKind, EnumerationMode, VerificationReport, DEGENERATE_RHO, EXACT_TOL};
use crate::rng::{streams, CounterStream};
use crate::sweep::Budget;
use crate::tensor_forms::{count_e, eval_form, make_form, symmetric_norm, FormKind, MultilinearForm};

/// Splits `x` in `{0, +-1}^n` into `x_plus - x_minus` with `x_plus, x_minus`
/// in `{0, 1}^n`.
pub fn sign_split(x: &[i8]) -> Result<(Vec<u8>, Vec<u8>)> {
    let mut plus = vec![0u8; x.len()];
    let mut minus = vec![0u8; x.len()];
    for (i, &v) in x.iter().enumerate() {
        match v {
            1 => plus[i] = 1,
            -1 => minus[i] = 1,
            0 => {}
            _ => return Err(Error::validation(format!("x[{i}]"), format!("{v} is not in {{0, 1, -1}}"))),
        }
    }
    Ok((plus, minus))
}

/// A vector with entries in `{0, +-2^-l}` and its layers: `layers[i]` is
/// `+-1` exactly where `|x| = 2^-i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicVector {
    pub values: Vec<f64>,
    pub layers: Vec<Vec<i8>>,
}

impl DyadicVector {
    /// Support size of every layer.
    pub fn support_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.iter().filter(|&&v| v != 0).count()).collect()
    }

    /// `sum_i 2^-i x^i`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.values.len()];
        for (i, layer) in self.layers.iter().enumerate() {
            let scale = (-(i as f64)).exp2();
            for (o, &v) in out.iter_mut().zip(layer) {
                *o += scale * f64::from(v);
            }
        }
        out
    }

    /// `(sum 2^-i s_i, sum 2^-2i s_i)`, which equal `||x||_1` and `||x||^2`.
    pub fn layer_norms(&self) -> (f64, f64) {
        self.support_sizes().iter().enumerate().fold((0.0, 0.0), |(l1, l2), (i, &s)| {
            let scale = (-(i as f64)).exp2();
            (l1 + scale * s as f64, l2 + scale * scale * s as f64)
        })
    }
}

/// `-log2 |v|` when `|v|` is a power of two at most 1.
fn dyadic_level(v: f64) -> Option<usize> {
    let a = v.abs();
    if !(a > 0.0 && a <= 1.0) {
        return None;
    }
    let bits = a.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        // subnormal: a power of two iff one mantissa bit is set
        (mantissa.count_ones() == 1).then(|| (1074 - mantissa.trailing_zeros() as i64) as usize)
    } else {
        (mantissa == 0).then(|| (1023 - exp) as usize)
    }
}

pub fn dyadic_decompose(x: &[f64]) -> Result<DyadicVector> {
    let mut levels = Vec::with_capacity(x.len());
    for (i, &v) in x.iter().enumerate() {
        if v == 0.0 {
            levels.push(None);
            continue;
        }
        let l = dyadic_level(v)
            .ok_or_else(|| Error::validation(format!("x[{i}]"), format!("{v} is not 0 or +-2^-l with l >= 0")))?;
        levels.push(Some(l));
    }
    let depth = levels.iter().flatten().map(|&l| l + 1).max().unwrap_or(0);
    let mut layers = vec![vec![0i8; x.len()]; depth];
    for (i, l) in levels.iter().enumerate() {
        if let Some(l) = *l {
            layers[l][i] = if x[i] > 0.0 { 1 } else { -1 };
        }
    }
    Ok(DyadicVector { values: x.to_vec(), layers })
}

pub type IndexSet = Vec<Vec<usize>>;

/// `P = {i : max_j i_j - min_j i_j < gamma}` and its complement `Q`.
pub fn dyadic_index_split(indices: &[Vec<usize>], gamma: f64) -> Result<(IndexSet, IndexSet)> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
    }
    Ok(indices.iter().cloned().partition(|idx| {
        let hi = idx.iter().max().copied().unwrap_or(0);
        let lo = idx.iter().min().copied().unwrap_or(0);
        ((hi - lo) as f64) < gamma
    }))
}

/// `gamma = lg(a m n^{(k-2)/2} / b)`.
pub fn split_gamma(a: f64, b: f64, m: f64, n: usize, k: usize) -> f64 {
    (a * m * (n as f64).powf((k as f64 - 2.0) / 2.0) / b).log2()
}

/// `|v| = 2^l (1 + eps)` with `eps` in `[0, 1)`, read off the binary
/// representation.
fn exponent_split(v: f64) -> (i32, f64) {
    let a = v.abs();
    let (scaled, shift) = if a < f64::MIN_POSITIVE { (a * 2f64.powi(64), 64) } else { (a, 0) };
    let bits = scaled.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let low = f64::from_bits(bits & !((1u64 << 52) - 1));
    (exp - shift, scaled / low - 1.0)
}

/// One draw of the rounding: `sign(x_i) 2^l` with probability `1 - eps` and
/// `sign(x_i) 2^{l+1}` with probability `eps`, coordinates independent.
/// Sample `sample` uses positions `sample * n + i` of the rounding stream.
pub fn randomized_round(x: &[f64], seed: u64, sample: u64) -> Result<DyadicVector> {
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| v.is_nan() || v.abs() > 0.5) {
        return Err(Error::validation(format!("x[{i}]"), format!("|{v}| exceeds 1/2")));
    }
    let draws = CounterStream::new(seed, streams::ROUNDING);
    let n = x.len() as u64;
    let z: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == 0.0 {
                return 0.0;
            }
            let (l, eps) = exponent_split(v);
            let up = draws.uniform(sample * n + i as u64) < eps;
            v.signum() * 2f64.powi(if up { l + 1 } else { l })
        })
        .collect();
    dyadic_decompose(&z)
}

/// `count` independent roundings of `x`, computed in parallel.
pub fn round_samples(x: &[f64], seed: u64, count: u64) -> Result<Vec<Vec<f64>>> {
    (0..count)
        .into_par_iter()
        .map(|s| randomized_round(x, seed, s).map(|d| d.values))
        .collect()
}

/// Ordered partitions of `0..n` into `k` nonempty labelled parts, as label
/// strings in `0..k`.
fn ordered_partitions(n: usize, k: usize) -> Vec<Vec<u8>> {
    fn go(v: usize, n: usize, k: usize, used: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let missing = k - used.count_ones() as usize;
        if missing > n - v {
            return;
        }
        if v == n {
            out.push(cur.clone());
            return;
        }
        for p in 0..k {
            cur.push(p as u8);
            go(v + 1, n, k, used | (1 << p), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Checks `k^{n-k} e(V_1..V_k) = sum_P e(P_1 cap V_1, ..., P_k cap V_k)` and
/// `k^{n-k} e_K(V_1..V_k) = sum_P prod |P_i cap V_i|` over ordered partitions
/// `P` of the vertex set into `k` nonempty parts. `V_i` need not be disjoint.
pub fn partition_identity_check(h: &Hypergraph, sets: &[Vec<usize>], budget: Budget) -> Result<VerificationReport> {
    let (n, k) = (h.n(), h.k());
    if sets.len() != k {
        return Err(Error::DimensionMismatch { expected: k, actual: sets.len() });
    }
    budget.check((k as u128).saturating_pow(n as u32))?;
    let direct = count_e(h, sets)? as u128;
    let direct_k = complete_count(n, sets) as u128;
    let partitions = ordered_partitions(n, k);
    let (sum, sum_k) = partitions
        .par_iter()
        .map(|labels| {
            let parts: Vec<Vec<usize>> = (0..k)
                .map(|p| sets[p].iter().copied().filter(|&v| labels[v] as usize == p).collect())
                .collect();
            let e = count_e(h, &parts).expect("validated above") as u128;
            let prod: u128 = parts.iter().map(|p| p.len() as u128).product();
            (e, prod)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mult = (k as u128).pow((n - k) as u32);
    let lhs = mult * direct;
    let lhs_k = mult * direct_k;

    let mut report = VerificationReport::new("partition-averaging-identity")
        .param("n", n)
        .param("k", k)
        .param("multiplicity", mult.to_string());
    let gap = |a: u128, b: u128| -((a as f64) - (b as f64)).abs();
    report.push_check(Check::new("adjacency-identity", CheckKind::TheoremBacked, gap(lhs, sum), 0.0));
    report.push_check(Check::new("complete-identity", CheckKind::TheoremBacked, gap(lhs_k, sum_k), 0.0));
    report.min_margin = Some(gap(lhs, sum).min(gap(lhs_k, sum_k)));
    report.details = json!({
        "partitions": partitions.len(),
        "e": direct.to_string(),
        "partition_sum": sum.to_string(),
        "e_complete": direct_k.to_string(),
        "partition_sum_complete": sum_k.to_string(),
    });
    Ok(report)
}

/// `e_K(V_1..V_k)`: ordered tuples of distinct vertices across the sets.
fn complete_count(n: usize, sets: &[Vec<usize>]) -> u64 {
    fn go(j: usize, sets: &[Vec<usize>], used: &mut [bool]) -> u64 {
        if j == sets.len() {
            return 1;
        }
        let mut total = 0;
        for &v in &sets[j] {
            if !used[v] {
                used[v] = true;
                total += go(j + 1, sets, used);
                used[v] = false;
            }
        }
        total
    }
    go(0, sets, &mut vec![false; n])
}

/// `beta = max |x^T M y| / (||x|| ||y||)` over nonzero `x, y` in `{0, 1}^N`
/// with disjoint supports, by a sweep over `3^N` assignments. Returns the
/// value and a maximizing label string (1 for `x`, 2 for `y`).
pub fn disjoint_pair_beta(m: &DMatrix<f64>, budget: Budget) -> Result<(f64, Vec<u8>)> {
    let size = m.nrows();
    if m.ncols() != size {
        return Err(Error::DimensionMismatch { expected: size, actual: m.ncols() });
    }
    budget.check(3u128.saturating_pow(size as u32))?;

    struct Walk<'a> {
        m: &'a DMatrix<f64>,
        labels: Vec<u8>,
        sizes: [usize; 3],
        value: f64,
        best: f64,
        best_labels: Option<Vec<u8>>,
    }
    impl Walk<'_> {
        fn go(&mut self, v: usize) {
            let size = self.labels.len();
            if v == size {
                if self.sizes[1] > 0 && self.sizes[2] > 0 {
                    let ratio = self.value.abs() / ((self.sizes[1] * self.sizes[2]) as f64).sqrt();
                    if self.best_labels.is_none() || ratio > self.best {
                        self.best = ratio;
                        self.best_labels = Some(self.labels.clone());
                    }
                }
                return;
            }
            for label in 0..3u8 {
                let added: f64 = match label {
                    1 => (0..v).filter(|&u| self.labels[u] == 2).map(|u| self.m[(v, u)]).sum(),
                    2 => (0..v).filter(|&u| self.labels[u] == 1).map(|u| self.m[(u, v)]).sum(),
                    _ => 0.0,
                };
                self.labels[v] = label;
                self.sizes[label as usize] += 1;
                let before = self.value;
                self.value += added;
                self.go(v + 1);
                self.value = before;
                self.sizes[label as usize] -= 1;
                self.labels[v] = 0;
            }
        }
    }

    let split = size.min(2);
    let prefixes: Vec<Vec<u8>> = (0..3usize.pow(split as u32))
        .map(|code| (0..split).map(|i| ((code / 3usize.pow((split - 1 - i) as u32)) % 3) as u8).collect())
        .collect();
    let results: Vec<(f64, Option<Vec<u8>>)> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut w = Walk { m, labels: vec![0; size], sizes: [0; 3], value: 0.0, best: 0.0, best_labels: None };
            for (v, &l) in prefix.iter().enumerate() {
                w.labels[v] = l;
                w.sizes[l as usize] += 1;
            }
            for v in 0..split {
                for u in 0..split {
                    if w.labels[v] == 1 && w.labels[u] == 2 {
                        w.value += m[(v, u)];
                    }
                }
            }
            w.go(split);
            (w.best, w.best_labels)
        })
        .collect();
    let mut best = (0.0, None::<Vec<u8>>);
    for (value, labels) in results {
        if let Some(l) = labels {
            if best.1.is_none() || value > best.0 {
                best = (value, Some(l));
            }
        }
    }
    Ok((best.0, best.1.unwrap_or_else(|| vec![0; size])))
}

/// Hypotheses (symmetric, zero diagonal, row l1 norms at most `m`) and the
/// conclusion shape `||M|| / (beta (lg(m / beta) + 1))` of the Bilu-Linial
/// lemma. `fitted_constant` is omitted unless `report_constant` is set.
pub fn bilu_linial_check(mat: &DMatrix<f64>, m: f64, report_constant: bool, budget: Budget) -> Result<VerificationReport> {
    let size = mat.nrows();
    if mat.ncols() != size {
        return Err(Error::DimensionMismatch { expected: size, actual: mat.ncols() });
    }
    for i in 0..size {
        if mat[(i, i)] != 0.0 {
            return Err(Error::NonzeroDiagonal { index: i, value: mat[(i, i)] });
        }
        for j in 0..i {
            if mat[(i, j)] != mat[(j, i)] {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let max_row = mat.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let (beta, labels) = disjoint_pair_beta(mat, budget)?;
    let norm = symmetric_norm(mat);

    let mut report = VerificationReport::new("bilu-linial").param("size", size).param("m", m);
    report.push_check(Check::new("row-l1-within-m", CheckKind::TheoremBacked, m - max_row, EXACT_TOL));
    report.degenerate = beta < DEGENERATE_RHO;
    if report.degenerate {
        report.notes.push("beta-degenerate: fitted constant omitted".into());
    } else if report_constant {
        report.fitted_constant = Some(norm / (beta * (lg_plus(m / beta) + 1.0)));
    }
    report.min_margin = Some(m - max_row);
    report.details = json!({
        "beta": beta,
        "beta_labels": labels,
        "norm": norm,
        "max_row_l1": max_row,
    });
    Ok(report)
}

/// Random vector in `{0, +-2^-l : 0 <= l <= 24}^n`; the level range keeps
/// both norm identities exact in binary floating point.
fn random_dyadic(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random_bool(0.25) {
                return 0.0;
            }
            let v = (-f64::from(rng.random_range(0..=24u8))).exp2();
            if rng.random_bool(0.5) { v } else { -v }
        })
        .collect()
}

/// Decomposes `count` random dyadic vectors of length `n` and checks exact
/// reconstruction, disjoint layer supports and both norm identities.
pub fn dyadic_battery(count: usize, n: usize, seed: u64) -> Result<VerificationReport> {
    let draws = CounterStream::new(seed, streams::LEMMA_INSTANCES);
    let failures = (0..count)
        .into_par_iter()
        .map(|i| -> Result<[u32; 3]> {
            let x = random_dyadic(&mut draws.block(i as u64), n);
            let d = dyadic_decompose(&x)?;
            let disjoint = (0..n).all(|j| d.layers.iter().filter(|l| l[j] != 0).count() == usize::from(x[j] != 0.0));
            let (l1, l2) = d.layer_norms();
            let norms = l1 == x.iter().map(|v| v.abs()).sum::<f64>() && l2 == x.iter().map(|v| v * v).sum::<f64>();
            Ok([u32::from(d.reconstruct() != x), u32::from(!disjoint), u32::from(!norms)])
        })
        .try_reduce(|| [0; 3], |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]))?;

    let mut report = VerificationReport::new("dyadic-decomposition").param("vectors", count).param("n", n).param("seed", seed);
    for (name, f) in ["reconstruction-exact", "supports-disjoint", "norm-identities"].iter().zip(failures) {
        report.push_check(Check::new(*name, CheckKind::TheoremBacked, -f64::from(f), 0.0));
    }
    report.min_margin = Some(-f64::from(failures.iter().sum::<u32>()));
    Ok(report)
}

/// Randomized rounding of `x` over `samples` draws: every draw must satisfy
/// `||z|| <= 2 ||x||`; coordinate means should sit within three standard
/// errors of `x`, and the mean of `phi(z, ..., z)` within four standard
/// errors of `phi(x, ..., x)`.
pub fn rounding_check(x: &[f64], seed: u64, samples: u64, phi: Option<&MultilinearForm>) -> Result<VerificationReport> {
    if samples < 2 {
        return Err(Error::invalid("rounding check needs at least 2 samples"));
    }
    let zs = round_samples(x, seed, samples)?;
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_margin = zs
        .iter()
        .map(|z| 2.0 * nx - z.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min);

    let s = samples as f64;
    let mean_sd = |vals: &mut dyn Iterator<Item = f64>| {
        let (sum, sq) = vals.fold((0.0, 0.0), |(a, b), v| (a + v, b + v * v));
        let mean = sum / s;
        (mean, ((sq - s * mean * mean) / (s - 1.0)).max(0.0).sqrt())
    };
    let mut coord_margin = f64::INFINITY;
    let mut means = Vec::with_capacity(x.len());
    for (i, &xi) in x.iter().enumerate() {
        let (mean, sd) = mean_sd(&mut zs.iter().map(|z| z[i]));
        coord_margin = coord_margin.min(3.0 * sd / s.sqrt() - (mean - xi).abs());
        means.push(mean);
    }

    let mut report = VerificationReport::new("randomized-rounding").param("n", x.len()).param("samples", samples).param("seed", seed);
    report.push_check(Check::new("norm-at-most-twice", CheckKind::TheoremBacked, norm_margin, EXACT_TOL * nx.max(1.0)));
    report.push_check(Check::new("coordinate-means", CheckKind::Informational, coord_margin, EXACT_TOL));
    let mut form = serde_json::Value::Null;
    if let Some(phi) = phi {
        let at = |v: &[f64]| eval_form(phi, &vec![v; phi.k()]);
        let target = at(x)?;
        let vals = zs.iter().map(|z| at(z)).collect::<Result<Vec<_>>>()?;
        let (mean, sd) = mean_sd(&mut vals.into_iter());
        let margin = 4.0 * sd / s.sqrt() - (mean - target).abs();
        report.push_check(Check::new("form-mean", CheckKind::Informational, margin, EXACT_TOL));
        form = json!({"target": target, "mean": mean, "sd": sd});
    }
    report.min_margin = Some(norm_margin);
    report.details = json!({"x": x, "means": means, "form": form});
    Ok(report)
}

/// `instances` random `(H, V_1, V_2, V_3)` with `3 <= n <= 7`: the partition
/// identity on each, and `rho_alpha <= (r + alpha n) n^{(k-2)/2}` on each
/// hypergraph.
pub fn partition_battery(instances: usize, seed: u64, budget: Budget) -> Result<VerificationReport> {
    const K: usize = 3;
    let draws = CounterStream::new(seed, streams::LEMMA_INSTANCES);
    let mut identity_failures = 0u32;
    let mut sanity_margin = f64::INFINITY;
    let mut rows = Vec::with_capacity(instances);
    for i in 0..instances {
        let mut rng = draws.block(u64::MAX - i as u64);
        let n = rng.random_range(K..=7);
        let alpha = rng.random_range(0.2..0.8);
        let h = gen_hypergraph(HypergraphKind::Gnp { alpha, seed: rng.next_u64() }, n, K)?;
        let sets: Vec<Vec<usize>> = (0..K).map(|_| (0..n).filter(|_| rng.random_bool(0.5)).collect()).collect();
        let rep = partition_identity_check(&h, &sets, budget)?;
        identity_failures += u32::from(!rep.pass);
        let rho = rho_alpha(&h, alpha, &EnumerationMode::Exhaustive, budget)?.rho;
        let upper = rho_envelope(n, K, h.max_degree(), alpha, 0.5)?.sanity_upper;
        sanity_margin = sanity_margin.min(upper - rho);
        rows.push(json!({"n": n, "alpha": alpha, "edges": h.edges().len(), "identity": rep.pass, "rho": rho, "sanity_upper": upper}));
    }
    let mut report = VerificationReport::new("partition-averaging-identity").param("instances", instances).param("k", K).param("seed", seed);
    report.push_check(Check::new("identity-every-instance", CheckKind::TheoremBacked, -f64::from(identity_failures), 0.0));
    report.push_check(Check::new("sanity-bound-every-instance", CheckKind::TheoremBacked, sanity_margin, EXACT_TOL));
    report.min_margin = Some((-f64::from(identity_failures)).min(sanity_margin));
    report.details = json!({"instances": rows});
    Ok(report)
}

/// Sizes for [`lemma_battery`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatterySizes {
    pub dyadic_vectors: usize,
    pub rounding_samples: u64,
    pub partition_instances: usize,
}

impl Default for BatterySizes {
    fn default() -> Self {
        Self { dyadic_vectors: 1000, rounding_samples: 10_000, partition_instances: 50 }
    }
}

/// The dyadic, rounding and partition batteries under one report. Rounding
/// runs on a random `x` in `[-1/2, 1/2]^8` against `A - A_K / 2` of
/// `G(8, 1/2, 3)`.
pub fn lemma_battery(seed: u64, sizes: BatterySizes, budget: Budget) -> Result<VerificationReport> {
    let mut rng = CounterStream::new(seed, streams::LEMMA_INSTANCES).block(1 << 31);
    let x: Vec<f64> = (0..8).map(|_| rng.random_range(-0.5..=0.5)).collect();
    let h = gen_hypergraph(HypergraphKind::Gnp { alpha: 0.5, seed }, 8, 3)?;
    let phi = make_form(FormKind::DensityShift { alpha: 0.5 }, &h);
    let parts = [
        dyadic_battery(sizes.dyadic_vectors, 8, seed)?,
        rounding_check(&x, seed, sizes.rounding_samples, Some(&phi))?,
        partition_battery(sizes.partition_instances, seed, budget)?,
    ];
    let mut report = VerificationReport::new("lemma-lab").param("seed", seed);
    for part in &parts {
        for c in &part.checks {
            let mut c = c.clone();
            c.name = format!("{}/{}", part.statement, c.name);
            report.push_check(c);
        }
    }
    report.min_margin = parts.iter().filter_map(|p| p.min_margin).reduce(f64::min);
    report.details = json!({ "parts": parts });
    Ok(report)
}
