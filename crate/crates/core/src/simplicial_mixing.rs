//! Partite facet counts, the simplicial discrepancy parameter and the
//! mixing / inverse-mixing verification reports.

use serde_json::json;

use crate::complexes::SimplicialComplex;
use crate::error::{Error, Result};
use crate::lemma_lab::disjoint_pair_beta;
use crate::report::{
    lg_plus, Check, CheckKind, DiscrepancyReport, DisjointTuple, EnumerationMode, Histogram,
    MarginSummary, VerificationReport, DEGENERATE_RHO, EXACT_TOL,
};
use crate::simplicial_ops::{
    kernel_basis, operator_matrix, restricted_norm, row_l1_norms, OperatorKind, DEFAULT_KERNEL_TOL,
};
use crate::sweep::{labels_from_parts, parts_from_labels, sample_best, Best, Budget, PartiteSweep};

/// `F(S_0, ..., S_d)`: ordered tuples across the parts that span a facet.
pub fn count_f(x: &SimplicialComplex, tuple: &DisjointTuple) -> Result<u64> {
    let labels = tuple_labels(x.n(), x.d() + 1, tuple)?;
    Ok(PartiteSweep::new(x.n(), x.d() + 1, x.facets()).count(&labels))
}

fn tuple_labels(n: usize, parts: usize, tuple: &DisjointTuple) -> Result<Vec<u8>> {
    if tuple.parts.len() != parts {
        return Err(Error::DimensionMismatch { expected: parts, actual: tuple.parts.len() });
    }
    for (i, p) in tuple.parts.iter().enumerate() {
        if let Some(&v) = p.iter().find(|&&v| v >= n) {
            return Err(Error::validation(format!("parts[{i}]"), format!("vertex {v} out of range 0..{n}")));
        }
    }
    labels_from_parts(n, &tuple.parts).ok_or_else(|| Error::invalid("parts overlap"))
}

/// Normalized deviation `|F - (alpha/n) prod|S_i|| / (sqrt(|S_0||S_1|) |S_2|...|S_d|)`.
/// Callers guarantee nonempty parts.
pub fn simplicial_ratio(count: u64, sizes: &[usize], alpha: f64, n: usize) -> f64 {
    let prod: f64 = sizes.iter().map(|&s| s as f64).product();
    let tail: f64 = sizes[2..].iter().map(|&s| s as f64).product();
    let dev = (count as f64 - alpha / n as f64 * prod).abs();
    dev / ((sizes[0] as f64 * sizes[1] as f64).sqrt() * tail)
}

fn sizes_of(labels: &[u8], parts: usize) -> Vec<usize> {
    let mut sizes = vec![0usize; parts];
    for &l in labels {
        if l > 0 {
            sizes[l as usize - 1] += 1;
        }
    }
    sizes
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
    }
    Ok(())
}

fn finish(best: Best, parts: usize, alpha: f64, mode: EnumerationMode) -> DiscrepancyReport {
    let witness = best
        .labels
        .as_deref()
        .map(|l| DisjointTuple { parts: parts_from_labels(l, parts) });
    DiscrepancyReport {
        rho: if witness.is_some() { best.value } else { 0.0 },
        witness,
        alpha,
        mode,
        tuples_examined: best.examined,
    }
}

/// Maximum of [`simplicial_ratio`] over disjoint nonempty tuples admitted by
/// `mode`. The witness is the lexicographically least maximizing label string.
pub fn rho_simplicial(
    x: &SimplicialComplex,
    alpha: f64,
    mode: &EnumerationMode,
    budget: Budget,
) -> Result<DiscrepancyReport> {
    check_alpha(alpha)?;
    let (n, d) = (x.n(), x.d());
    let parts = d + 1;
    let visit = |b: &mut Best, leaf: &crate::sweep::Leaf<'_>| {
        b.offer(simplicial_ratio(leaf.count, &leaf.sizes[1..], alpha, n), leaf.labels)
    };
    let best = match mode {
        EnumerationMode::Exhaustive => {
            let sweep = PartiteSweep::new(n, parts, x.facets()).require_nonempty(true);
            budget.check(sweep.state_space())?;
            sweep.fold(Best::default, visit, Best::merge)
        }
        EnumerationMode::SingletonTail => {
            let mut sweep = PartiteSweep::new(n, parts, x.facets()).require_nonempty(true);
            for p in 3..=parts {
                sweep = sweep.cap(p, 1);
            }
            let states = 3u128.saturating_pow(n as u32).saturating_mul((n as u128).saturating_pow(d as u32 - 1));
            budget.check(states)?;
            sweep.fold(Best::default, visit, Best::merge)
        }
        EnumerationMode::Sample { count, seed } => {
            let sweep = PartiteSweep::new(n, parts, x.facets());
            sample_best(n, parts, *count, *seed, |labels| {
                let sizes = sizes_of(labels, parts);
                if sizes.contains(&0) {
                    return None;
                }
                Some(simplicial_ratio(sweep.count(labels), &sizes, alpha, n))
            })
        }
        EnumerationMode::SingletonWitness => {
            return Err(Error::invalid("singleton-witness mode applies to hypergraphs only"))
        }
    };
    Ok(finish(best, parts, alpha, mode.clone()))
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

/// Slack of the mixing inequality on one tuple; zero when a part is empty.
fn mixing_margin(count: u64, sizes: &[usize], alpha: f64, rho_alpha: f64, n: usize) -> f64 {
    let prod: f64 = sizes.iter().map(|&s| s as f64).product();
    let tail: f64 = sizes[2..].iter().map(|&s| s as f64).product();
    let lhs = (count as f64 - alpha / n as f64 * prod).abs();
    let rhs = rho_alpha * (sizes[0] as f64 * sizes[1] as f64).sqrt() * tail;
    rhs - lhs
}

/// Checks the spectral mixing inequality on every disjoint tuple (empty parts
/// included) with `rho_alpha` the norm of `alpha I - upper Laplacian` on cycles.
pub fn verify_mixing_simplicial(x: &SimplicialComplex, alpha: f64, budget: Budget) -> Result<VerificationReport> {
    check_alpha(alpha)?;
    let (n, d) = (x.n(), x.d());
    let parts = d + 1;
    let sweep = PartiteSweep::new(n, parts, x.facets());
    budget.check(sweep.state_space())?;

    let basis = kernel_basis(x, DEFAULT_KERNEL_TOL);
    let rho_alpha = restricted_norm(&operator_matrix(x, OperatorKind::AlphaShift(alpha))?, &basis)?;

    let margin_of = |leaf: &crate::sweep::Leaf<'_>| mixing_margin(leaf.count, &leaf.sizes[1..], alpha, rho_alpha, n);
    let pass = sweep.fold(MarginPass::new, |acc, leaf| acc.add(margin_of(leaf), leaf.labels), MarginPass::merge);
    let histogram = sweep.fold(
        || Histogram::new(pass.min, pass.max),
        |h, leaf| h.add(margin_of(leaf)),
        Histogram::merge,
    );

    let mut report = VerificationReport::new("simplicial-mixing")
        .param("n", n)
        .param("d", d)
        .param("alpha", alpha)
        .param("facets", x.facets().len());
    report.details = json!({
        "rho_alpha": rho_alpha,
        "cycle_dimension": basis.dim(),
        "worst_tuple": pass.worst.labels.as_deref().map(|l| parts_from_labels(l, parts)),
    });
    report.min_margin = Some(pass.min);
    report.margins = Some(MarginSummary { count: pass.count, min: pass.min, max: pass.max, histogram });
    report.push_check(Check::new("mixing-inequality", CheckKind::TheoremBacked, pass.min, EXACT_TOL));
    report.notes.push("empty parts admitted: both sides vanish".into());
    Ok(report)
}

/// Options for [`verify_inverse_simplicial`].
#[derive(Clone, Copy, Debug)]
pub struct InverseOptions {
    pub budget: Budget,
    /// Also sweep disjoint 0/1 pairs against the proof matrix when `3^N`
    /// fits the budget (`N` = number of `(d-1)`-cells).
    pub pair_sweep: bool,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self { budget: Budget::default(), pair_sweep: true }
    }
}

/// Inverse mixing for an `r`-regular complex: exhaustive `rho` at `alpha = r`
/// against the norm of the signed adjacency on cycles.
pub fn verify_inverse_simplicial(x: &SimplicialComplex, opts: InverseOptions) -> Result<VerificationReport> {
    let prof = x.degree_profile();
    if !prof.regular {
        return Err(Error::Irregular(Box::new(prof)));
    }
    let (n, d) = (x.n(), x.d());
    let r = prof.max as f64;
    let disc = rho_simplicial(x, r, &EnumerationMode::Exhaustive, opts.budget)?;
    let rho = disc.rho;

    let basis = kernel_basis(x, DEFAULT_KERNEL_TOL);
    let a_norm = restricted_norm(&operator_matrix(x, OperatorKind::Adjacency)?, &basis)?;
    let j_norm = restricted_norm(&operator_matrix(x, OperatorKind::AllPairs)?, &basis)?;
    let b = operator_matrix(x, OperatorKind::BMatrix(r))?;
    let b_norm = b.spectral_norm();
    let max_row = row_l1_norms(&b)?.into_iter().fold(0.0, f64::max);

    let degenerate = rho < DEGENERATE_RHO;
    let shape = rho * d as f64 * (lg_plus(r / rho) + 1.0);

    let mut report = VerificationReport::new("simplicial-inverse-mixing")
        .param("n", n)
        .param("d", d)
        .param("r", prof.max)
        .param("alpha", r);
    report.degenerate = degenerate;
    report.fitted_constant = if degenerate { None } else { Some(a_norm / shape) };

    report.push_check(Check::new("cycles-annihilate-all-pairs", CheckKind::TheoremBacked, -j_norm, EXACT_TOL));
    report.push_check(Check::new("b-row-l1-bound", CheckKind::TheoremBacked, 2.0 * d as f64 * r - max_row, EXACT_TOL));
    report.push_check(Check::new(
        "adjacency-within-b-norm",
        CheckKind::TheoremBacked,
        b_norm + r * d as f64 / n as f64 - a_norm,
        EXACT_TOL,
    ));

    let cells = b.matrix.nrows();
    let mut beta = None;
    if opts.pair_sweep && opts.budget.check(3u128.saturating_pow(cells as u32)).is_ok() {
        let (value, _) = disjoint_pair_beta(&b.matrix, opts.budget)?;
        beta = Some(value);
        report.push_check(Check::new(
            "b-disjoint-pairs-within-2-rho-d",
            CheckKind::TheoremBacked,
            2.0 * rho * d as f64 - value,
            EXACT_TOL,
        ));
    }
    if degenerate {
        report.notes.push("rho-degenerate: fitted constant omitted".into());
    }
    report.min_margin = report.checks.iter().map(|c| c.margin).reduce(f64::min);
    report.details = json!({
        "rho": rho,
        "witness": disc.witness,
        "tuples_examined": disc.tuples_examined,
        "restricted_adjacency_norm": a_norm,
        "b_norm": b_norm,
        "b_max_row_l1": max_row,
        "b_disjoint_pair_beta": beta,
        "bound_shape": shape,
    });
    Ok(report)
}
