//! Partite discrepancy `rho_alpha` of uniform hypergraphs, its closed-form
//! envelopes, and the hypergraph mixing / inverse-mixing reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::complexes::{combinations, gen_hypergraph, Hypergraph, HypergraphKind};
use crate::error::{Error, Result};
use crate::report::{
    lg_plus, Check, CheckKind, DiscrepancyReport, DisjointTuple, EnumerationMode, Histogram,
    MarginSummary, VerificationReport, DEGENERATE_RHO, EXACT_TOL,
};
use crate::sweep::{parts_from_labels, sample_best, Best, Budget, Leaf, PartiteSweep};
use crate::tensor_forms::{
    d_norm_bounds, dense_matrix, fw_coefficient, indicator, make_form, spectral_norm_estimate,
    symmetric_norm, EstimatorOptions, FormKind, MultilinearForm, SpectralEstimate,
};

/// `|e - alpha P| / sqrt(P)` with `P = prod |V_i|`.
pub fn hypergraph_ratio(count: u64, sizes: &[usize], alpha: f64) -> f64 {
    let prod: f64 = sizes.iter().map(|&s| s as f64).product();
    (count as f64 - alpha * prod).abs() / prod.sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha must be finite and nonnegative, got {alpha}")));
    }
    Ok(())
}

fn finish(best: Best, k: usize, alpha: f64, mode: EnumerationMode) -> DiscrepancyReport {
    let witness = best.labels.as_deref().map(|l| DisjointTuple { parts: parts_from_labels(l, k) });
    DiscrepancyReport {
        rho: if witness.is_some() { best.value } else { 0.0 },
        witness,
        alpha,
        mode,
        tuples_examined: best.examined,
    }
}

/// `rho_alpha(H)`: the maximum of [`hypergraph_ratio`] over disjoint nonempty
/// tuples admitted by `mode`.
pub fn rho_alpha(h: &Hypergraph, alpha: f64, mode: &EnumerationMode, budget: Budget) -> Result<DiscrepancyReport> {
    check_alpha(alpha)?;
    let (n, k) = (h.n(), h.k());
    let best = match mode {
        EnumerationMode::Exhaustive => {
            let sweep = PartiteSweep::new(n, k, h.edges()).canonical(true).require_nonempty(true);
            budget.check(sweep.state_space())?;
            sweep.fold(
                Best::default,
                |b: &mut Best, leaf: &Leaf<'_>| b.offer(hypergraph_ratio(leaf.count, &leaf.sizes[1..], alpha), leaf.labels),
                Best::merge,
            )
        }
        EnumerationMode::SingletonWitness => singleton_witness(h, alpha),
        EnumerationMode::Sample { count, seed } => {
            let sweep = PartiteSweep::new(n, k, h.edges());
            sample_best(n, k, *count, *seed, |labels| {
                let mut sizes = vec![0usize; k];
                for &l in labels.iter().filter(|&&l| l > 0) {
                    sizes[l as usize - 1] += 1;
                }
                if sizes.contains(&0) {
                    return None;
                }
                Some(hypergraph_ratio(sweep.count(labels), &sizes, alpha))
            })
        }
        EnumerationMode::SingletonTail => {
            return Err(Error::invalid("singleton-tail mode applies to simplicial complexes only"))
        }
    };
    Ok(finish(best, k, alpha, mode.clone()))
}

/// `k-1` singletons together with their link or their co-link as the last part.
fn singleton_witness(h: &Hypergraph, alpha: f64) -> Best {
    let (n, k) = (h.n(), h.k());
    let heads = combinations(n, k - 1);
    let partial: Vec<Best> = heads
        .par_iter()
        .map(|head| {
            let mut best = Best::default();
            let mut labels = vec![0u8; n];
            for (i, &v) in head.iter().enumerate() {
                labels[v] = i as u8 + 1;
            }
            let mut link = Vec::new();
            let mut colink = Vec::new();
            let mut edge = Vec::with_capacity(k);
            for v in (0..n).filter(|v| !head.contains(v)) {
                edge.clear();
                edge.extend_from_slice(head);
                edge.push(v);
                edge.sort_unstable();
                if h.contains_edge(&edge) { link.push(v) } else { colink.push(v) }
            }
            for (last, count) in [(&link, link.len() as u64), (&colink, 0)] {
                if last.is_empty() {
                    continue;
                }
                let mut l = labels.clone();
                for &v in last {
                    l[v] = k as u8;
                }
                let mut sizes = vec![1usize; k];
                sizes[k - 1] = last.len();
                best.offer(hypergraph_ratio(count, &sizes, alpha), &l);
            }
            best
        })
        .collect();
    partial.into_iter().fold(Best::default(), Best::merge)
}

/// Closed-form envelopes for `rho_alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoEnvelope {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub alpha: f64,
    pub delta: f64,
    /// `(r + alpha n) n^{(k-2)/2}`.
    pub sanity_upper: f64,
    /// `alpha (1-alpha) / sqrt((1-alpha)^2 + alpha^2) * sqrt(n-k+1)`.
    pub witness_lower: f64,
    /// The same with denominator `sqrt(alpha^2 + (1 - alpha^2))`.
    pub witness_lower_alt_denominator: f64,
    /// `sqrt((n ln(k+1) + ln(2/delta)) / 2)`.
    pub hoeffding_threshold: f64,
}

pub fn rho_envelope(n: usize, k: usize, r: usize, alpha: f64, delta: f64) -> Result<RhoEnvelope> {
    if k < 2 || n < k {
        return Err(Error::invalid(format!("need n >= k >= 2, got n={n}, k={k}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    check_alpha(alpha)?;
    let nf = n as f64;
    let root = ((n - k + 1) as f64).sqrt();
    let num = alpha * (1.0 - alpha);
    Ok(RhoEnvelope {
        n,
        k,
        r,
        alpha,
        delta,
        sanity_upper: (r as f64 + alpha * nf) * nf.powf((k as f64 - 2.0) / 2.0),
        witness_lower: num / ((1.0 - alpha).powi(2) + alpha * alpha).sqrt() * root,
        witness_lower_alt_denominator: num / (alpha * alpha + (1.0 - alpha * alpha)).sqrt() * root,
        hoeffding_threshold: ((nf * ((k + 1) as f64).ln() + (2.0 / delta).ln()) / 2.0).sqrt(),
    })
}

/// `2^{3k/2} k^{k/2} rho (lg^{k-1}((r + alpha n)^2 n^{k-2} / rho^2) + k^2 (2k)^{-k/2})`,
/// an upper bound on `||A - alpha A_K||`. Zero when `rho` is zero.
pub fn inverse_bound(n: usize, k: usize, r: usize, alpha: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let (nf, kf) = (n as f64, k as f64);
    let m = r as f64 + alpha * nf;
    let lg = lg_plus(m * m * nf.powi(k as i32 - 2) / (rho * rho));
    2f64.powf(1.5 * kf) * kf.powf(kf / 2.0) * rho * (lg.powi(k as i32 - 1) + kf * kf * (2.0 * kf).powf(-kf / 2.0))
}

/// `rho (lg^{k-1}((r + alpha n) n^{k-2} / rho) + 1)`, the shape of the
/// inverse-mixing bound without constants.
pub fn inverse_shape(n: usize, k: usize, r: usize, alpha: f64, rho: f64) -> f64 {
    let nf = n as f64;
    let m = r as f64 + alpha * nf;
    rho * (lg_plus(m * nf.powi(k as i32 - 2) / rho).powi(k as i32 - 1) + 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypergraphOptions {
    pub budget: Budget,
    pub estimator: EstimatorOptions,
    /// Also check the mixing inequality over all (not necessarily disjoint)
    /// subset tuples when `2^{n(k-1)}` fits the budget.
    pub all_subsets: bool,
}

impl Default for HypergraphOptions {
    fn default() -> Self {
        Self { budget: Budget::default(), estimator: EstimatorOptions::default(), all_subsets: true }
    }
}

fn tuple_indicators(n: usize, tuple: &DisjointTuple) -> Vec<Vec<f64>> {
    tuple.parts.iter().map(|p| indicator(n, p)).collect()
}

/// Norm estimate of `phi` seeded with the indicator tuple of `witness`: the
/// normalized sum of the indicators as a start, the tuple itself as a
/// multilinear witness.
pub fn seeded_estimate(
    phi: &MultilinearForm,
    witness: Option<&DisjointTuple>,
    opts: &EstimatorOptions,
) -> Result<SpectralEstimate> {
    let n = phi.n();
    let (seeds, tuples) = match witness {
        Some(w) => {
            let tuple = tuple_indicators(n, w);
            let mut sum = vec![0.0; n];
            for x in &tuple {
                sum.iter_mut().zip(x).for_each(|(s, v)| *s += v);
            }
            (vec![sum], vec![tuple])
        }
        None => (Vec::new(), Vec::new()),
    };
    spectral_norm_estimate(phi, opts, &seeds, &tuples)
}

#[derive(Clone, Debug)]
struct MarginPass {
    count: u64,
    min: f64,
    max: f64,
    worst: Best,
}

impl MarginPass {
    fn new() -> Self {
        Self { count: 0, min: f64::INFINITY, max: f64::NEG_INFINITY, worst: Best::default() }
    }

    fn add(&mut self, margin: f64, labels: &[u8]) {
        self.count += 1;
        self.min = self.min.min(margin);
        self.max = self.max.max(margin);
        self.worst.offer(-margin, labels);
    }

    fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        self.worst = self.worst.merge(other.worst);
        self
    }
}

/// `lambda sqrt(P) - |e - c P|` for a disjoint tuple; `P = prod |V_i|`.
fn disjoint_margin(count: u64, sizes: &[usize], c: f64, lambda: f64) -> f64 {
    let prod: f64 = sizes.iter().map(|&s| s as f64).product();
    lambda * prod.sqrt() - (count as f64 - c * prod).abs()
}

fn disjoint_sweep(h: &Hypergraph, c: f64, lambda: f64, budget: Budget) -> Result<MarginSummary> {
    let sweep = PartiteSweep::new(h.n(), h.k(), h.edges());
    budget.check(sweep.state_space())?;
    let margin = |leaf: &Leaf<'_>| disjoint_margin(leaf.count, &leaf.sizes[1..], c, lambda);
    let pass = sweep.fold(MarginPass::new, |acc, leaf| acc.add(margin(leaf), leaf.labels), MarginPass::merge);
    let histogram = sweep.fold(|| Histogram::new(pass.min, pass.max), |hist, leaf| hist.add(margin(leaf)), Histogram::merge);
    Ok(MarginSummary { count: pass.count, min: pass.min, max: pass.max, histogram })
}

/// Minimum over all subset tuples `(V_1, ..., V_k)` of
/// `lambda sqrt(prod |V_i|) - |phi(1_{V_1}, ..., 1_{V_k})|`. For fixed
/// `V_1..V_{k-1}` the worst last part of each size takes the largest or
/// smallest entries of the partial contraction.
fn all_subsets_min_margin(phi: &MultilinearForm, lambda: f64) -> (f64, Vec<Vec<usize>>) {
    let (n, k) = (phi.n(), phi.k());
    let heads: u64 = 1u64 << (n * (k - 1));
    let decode = |code: u64| -> Vec<Vec<usize>> {
        (0..k - 1).map(|j| (0..n).filter(|&v| (code >> (j * n + v)) & 1 == 1).collect()).collect()
    };
    let (margin, code, last) = (0..heads)
        .into_par_iter()
        .map(|code| {
            let sets = decode(code);
            let prod0: f64 = sets.iter().map(|s| s.len() as f64).product();
            if prod0 == 0.0 {
                return (0.0, code, Vec::new());
            }
            let xs: Vec<Vec<f64>> = sets.iter().map(|s| indicator(n, s)).collect();
            let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
            let p = phi.partial(&refs).expect("shapes agree");
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
            let (mut worst, mut worst_last) = (0.0, Vec::new());
            let (mut top, mut bottom) = (0.0, 0.0);
            for s in 1..=n {
                top += p[order[s - 1]];
                bottom += p[order[n - s]];
                let (dev, from_top) = if top.abs() >= bottom.abs() { (top.abs(), true) } else { (bottom.abs(), false) };
                let m = lambda * (prod0 * s as f64).sqrt() - dev;
                if m < worst {
                    worst = m;
                    worst_last = if from_top { order[..s].to_vec() } else { order[n - s..].to_vec() };
                }
            }
            (worst, code, worst_last)
        })
        .reduce(
            || (f64::INFINITY, u64::MAX, Vec::new()),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    let mut tuple = decode(code);
    let mut last = last;
    last.sort_unstable();
    tuple.push(last);
    (margin, tuple)
}

fn all_subsets_states(n: usize, k: usize) -> u128 {
    2u128.saturating_pow((n * (k - 1)) as u32)
}

fn estimate_json(e: &SpectralEstimate) -> serde_json::Value {
    json!({
        "value": e.value,
        "source": e.source,
        "starts": e.starts,
        "iterations": e.iterations,
        "converged": e.converged,
        "shift": e.shift,
        "trace_len": e.trace_len,
        "witness": e.witness,
    })
}

/// Mixing inequality for `lambda_{2,alpha}` (and for the Friedman-Wigderson
/// form) with estimated norms. Shortfalls are estimator gaps.
pub fn verify_mixing_hypergraph(h: &Hypergraph, alpha: f64, opts: &HypergraphOptions) -> Result<VerificationReport> {
    check_alpha(alpha)?;
    let (n, k) = (h.n(), h.k());
    let disc = rho_alpha(h, alpha, &EnumerationMode::Exhaustive, opts.budget)?;
    let phi = make_form(FormKind::DensityShift { alpha }, h);
    let est = seeded_estimate(&phi, disc.witness.as_ref(), &opts.estimator)?;

    let c_fw = fw_coefficient(h);
    let disc_fw = rho_alpha(h, c_fw, &EnumerationMode::Exhaustive, opts.budget)?;
    let phi_fw = make_form(FormKind::FriedmanWigderson, h);
    let est_fw = seeded_estimate(&phi_fw, disc_fw.witness.as_ref(), &opts.estimator)?;

    let mut report = VerificationReport::new("hypergraph-density-mixing")
        .param("n", n)
        .param("k", k)
        .param("alpha", alpha)
        .param("r", h.max_degree())
        .param("edges", h.edges().len());

    report.push_check(Check::new("estimate-dominates-rho", CheckKind::TheoremBacked, est.value - disc.rho, 0.0));
    let disjoint = disjoint_sweep(h, alpha, est.value, opts.budget)?;
    report.push_check(Check::new("disjoint-mixing", CheckKind::EstimatorGap, disjoint.min, EXACT_TOL));
    let disjoint_fw = disjoint_sweep(h, c_fw, est_fw.value, opts.budget)?;
    report.push_check(Check::new("fw-disjoint-mixing", CheckKind::EstimatorGap, disjoint_fw.min, EXACT_TOL));

    let mut worst = serde_json::Value::Null;
    let mut worst_fw = serde_json::Value::Null;
    let states = all_subsets_states(n, k);
    if opts.all_subsets && opts.budget.check(states).is_ok() {
        let (m, t) = all_subsets_min_margin(&phi, est.value);
        report.push_check(Check::new("all-subsets-mixing", CheckKind::EstimatorGap, m, EXACT_TOL));
        worst = json!(t);
        let (m, t) = all_subsets_min_margin(&phi_fw, est_fw.value);
        report.push_check(Check::new("fw-all-subsets-mixing", CheckKind::EstimatorGap, m, EXACT_TOL));
        worst_fw = json!(t);
    } else {
        report.notes.push(format!("all-subsets sweep skipped ({states} prefix states)"));
    }

    report.min_margin = Some(disjoint.min);
    report.margins = Some(disjoint);
    report.details = json!({
        "rho_alpha": disc.rho,
        "rho_witness": disc.witness,
        "lambda_2_alpha": estimate_json(&est),
        "fw_coefficient": c_fw,
        "fw_rho": disc_fw.rho,
        "lambda_2": estimate_json(&est_fw),
        "fw_disjoint_margins": disjoint_fw,
        "all_subsets_worst_tuple": worst,
        "fw_all_subsets_worst_tuple": worst_fw,
    });
    Ok(report)
}

/// Rigorous inverse-mixing check: the estimated `lambda_{2,alpha}` (a lower
/// bound on the true norm) against the explicit upper bound in `rho`.
pub fn verify_inverse_hypergraph(h: &Hypergraph, alpha: f64, opts: &HypergraphOptions) -> Result<VerificationReport> {
    check_alpha(alpha)?;
    let (n, k) = (h.n(), h.k());
    let r = h.max_degree();
    let disc = rho_alpha(h, alpha, &EnumerationMode::Exhaustive, opts.budget)?;
    let rho = disc.rho;
    let phi = make_form(FormKind::DensityShift { alpha }, h);
    let est = seeded_estimate(&phi, disc.witness.as_ref(), &opts.estimator)?;
    let bound = inverse_bound(n, k, r, alpha, rho);
    let env = rho_envelope(n, k, r, alpha, 0.5)?;

    let mut report = VerificationReport::new("hypergraph-inverse-mixing")
        .param("n", n)
        .param("k", k)
        .param("alpha", alpha)
        .param("r", r)
        .param("seed", opts.estimator.seed);
    report.push_check(Check::new("sanity-precondition", CheckKind::TheoremBacked, env.sanity_upper - rho, EXACT_TOL));
    report.push_check(Check::new("estimate-dominates-rho", CheckKind::TheoremBacked, est.value - rho, 0.0));
    report.push_check(Check::new("rigorous-inverse-bound", CheckKind::TheoremBacked, bound - est.value, EXACT_TOL));

    report.degenerate = rho < DEGENERATE_RHO;
    if report.degenerate {
        report.notes.push("rho-degenerate: fitted constant omitted".into());
    } else {
        report.fitted_constant = Some(est.value / inverse_shape(n, k, r, alpha, rho));
    }
    report.min_margin = report.check("rigorous-inverse-bound").map(|c| c.margin);
    report.details = json!({
        "rho_alpha": rho,
        "rho_witness": disc.witness,
        "tuples_examined": disc.tuples_examined,
        "lambda_2_alpha": estimate_json(&est),
        "rigorous_bound": bound,
        "sanity_upper": env.sanity_upper,
    });
    Ok(report)
}

/// Compares the Friedman-Wigderson `lambda_2 = ||A - (r/n) J||` with
/// `lambda_{2,r/n}` through `A - (r/n) J = (A - (r/n) A_K) - (r/n) D`.
pub fn verify_fw_comparison(h: &Hypergraph, opts: &HypergraphOptions) -> Result<VerificationReport> {
    let (n, k) = (h.n(), h.k());
    let r = h.max_degree();
    let alpha = r as f64 / n as f64;
    let disc = rho_alpha(h, alpha, &EnumerationMode::Exhaustive, opts.budget)?;
    let rho = disc.rho;
    let phi_alpha = make_form(FormKind::DensityShift { alpha }, h);
    let phi_fw = make_form(FormKind::DegreeShift, h);
    let est_alpha = seeded_estimate(&phi_alpha, disc.witness.as_ref(), &opts.estimator)?;
    let est_fw = seeded_estimate(&phi_fw, disc.witness.as_ref(), &opts.estimator)?;
    let (d_lo, d_hi) = d_norm_bounds(n, k)?;
    let bound = inverse_bound(n, k, r, alpha, rho);

    let upper = alpha * d_hi + bound;
    let lower_band = alpha * d_lo - bound;
    let mut report = VerificationReport::new("hypergraph-fw-comparison")
        .param("n", n)
        .param("k", k)
        .param("r", r)
        .param("alpha", alpha);
    report.push_check(Check::new("fw-upper-sandwich", CheckKind::TheoremBacked, upper - est_fw.value, 1e-9));
    report.push_check(Check::new("fw-lower-band", CheckKind::Informational, est_fw.value - lower_band, 0.0));

    let mut graph_gap = serde_json::Value::Null;
    if k == 2 && n > 1 {
        let lam = symmetric_norm(&dense_matrix(&phi_fw)?);
        let c = r as f64 / (n - 1) as f64;
        let lam_alpha = symmetric_norm(&dense_matrix(&make_form(FormKind::DensityShift { alpha: c }, h))?);
        let gap = (lam - lam_alpha).abs();
        report.push_check(Check::new("graph-gap-within-r-over-n-minus-1", CheckKind::TheoremBacked, c - gap, EXACT_TOL));
        graph_gap = json!({ "lambda": lam, "lambda_alpha": lam_alpha, "gap": gap, "limit": c });
    }
    report.min_margin = report.check("fw-upper-sandwich").map(|c| c.margin);
    report.details = json!({
        "rho": rho,
        "lambda_2": estimate_json(&est_fw),
        "lambda_2_alpha": estimate_json(&est_alpha),
        "d_norm_bounds": [d_lo, d_hi],
        "inverse_bound": bound,
        "upper": upper,
        "lower_band": lower_band,
        "graph_gap": graph_gap,
    });
    Ok(report)
}

/// One seed of the random-hypergraph experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomRhoRow {
    pub seed: u64,
    pub rho: f64,
    pub lambda_2: f64,
    pub lambda_2_alpha: f64,
    pub hoeffding_threshold: f64,
    pub witness_lower: f64,
    pub below_threshold: bool,
    pub above_lower: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomRhoExperiment {
    pub report: VerificationReport,
    pub rows: Vec<RandomRhoRow>,
}

impl RandomRhoExperiment {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::invalid(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Exact `rho_alpha` of `G(n, alpha, k)` for each seed, against the Hoeffding
/// threshold at `delta = e^{-n}` and the deterministic witness lower bound.
pub fn random_rho_experiment(
    n: usize,
    k: usize,
    alpha: f64,
    seeds: &[u64],
    opts: &HypergraphOptions,
) -> Result<RandomRhoExperiment> {
    let env = rho_envelope(n, k, 0, alpha, (-(n as f64)).exp())?;
    let mut rows = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let h = gen_hypergraph(HypergraphKind::Gnp { alpha, seed }, n, k)?;
        let disc = rho_alpha(&h, alpha, &EnumerationMode::Exhaustive, opts.budget)?;
        let est_alpha = seeded_estimate(&make_form(FormKind::DensityShift { alpha }, &h), disc.witness.as_ref(), &opts.estimator)?;
        let est_fw = seeded_estimate(&make_form(FormKind::FriedmanWigderson, &h), None, &opts.estimator)?;
        rows.push(RandomRhoRow {
            seed,
            rho: disc.rho,
            lambda_2: est_fw.value,
            lambda_2_alpha: est_alpha.value,
            hoeffding_threshold: env.hoeffding_threshold,
            witness_lower: env.witness_lower,
            below_threshold: disc.rho <= env.hoeffding_threshold,
            above_lower: disc.rho >= env.witness_lower - EXACT_TOL,
        });
    }
    let count = rows.len().max(1) as f64;
    let below = rows.iter().filter(|r| r.below_threshold).count() as f64 / count;
    let above = rows.iter().filter(|r| r.above_lower).count() as f64 / count;
    let scaled: Vec<f64> = rows.iter().map(|r| r.rho / (n as f64).sqrt()).collect();
    let lower_margin = rows.iter().map(|r| r.rho - r.witness_lower).fold(f64::INFINITY, f64::min);

    let mut report = VerificationReport::new("random-hypergraph-rho")
        .param("n", n)
        .param("k", k)
        .param("alpha", alpha)
        .param("seeds", seeds.len())
        .param("delta", env.delta);
    if !rows.is_empty() {
        report.push_check(Check::new("witness-lower-bound-every-seed", CheckKind::TheoremBacked, lower_margin, EXACT_TOL));
        report.min_margin = Some(lower_margin);
    }
    report.push_check(Check::new("hoeffding-fraction", CheckKind::Informational, below - (1.0 - env.delta), 0.0));
    report.details = json!({
        "fraction_below_threshold": below,
        "fraction_above_lower": above,
        "hoeffding_threshold": env.hoeffding_threshold,
        "witness_lower": env.witness_lower,
        "witness_lower_alt_denominator": env.witness_lower_alt_denominator,
        "rho_over_sqrt_n": {
            "min": scaled.iter().copied().fold(f64::INFINITY, f64::min),
            "max": scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "mean": scaled.iter().sum::<f64>() / count,
        },
    });
    Ok(RandomRhoExperiment { report, rows })
}
