//! Acceptance gate: one PASS/FAIL line per criterion. Runs without the libtest
//! harness so the lines always reach stdout; exits nonzero if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use serde_json::Value;

use specmix::complexes::{binomial, gen_complex, gen_hypergraph, ComplexKind, Hypergraph, HypergraphKind, SimplicialComplex};
use specmix::hypergraph_mixing::{random_rho_experiment, rho_alpha, rho_envelope, verify_fw_comparison, verify_inverse_hypergraph, HypergraphOptions};
use specmix::io::write_object;
use specmix::lemma_lab::{dyadic_battery, partition_battery, rounding_check};
use specmix::report::{EnumerationMode, VerificationReport};
use specmix::run::{config_from_report, execute, execute_with_workers, Command, RunConfig};
use specmix::simplicial_mixing::{count_f, rho_simplicial, verify_mixing_simplicial};
use specmix::simplicial_ops::{kernel_basis, operator_matrix, restricted_norm, OperatorKind, DEFAULT_KERNEL_TOL};
use specmix::sweep::Budget;
use specmix::tensor_forms::{d_norm_bounds, make_form, spectral_norm_estimate, EstimatorOptions, FormKind};

/// Mixing margins must not fall below this.
const MARGIN_TOL: f64 = 1e-8;
/// `J q` entries on cycle vectors.
const KERNEL_TOL: f64 = 1e-8;
/// Restricted norm of `A` on `K_n` against 1.
const GRAPH_NORM_TOL: f64 = 1e-8;
/// Tensor estimator against dense eigenvalues on graphs.
const ESTIMATOR_TOL: f64 = 1e-6;
/// D-norm at `k = 2` against 1.
const D_NORM_TOL: f64 = 1e-8;
/// Floating slack for inequalities that hold exactly in real arithmetic
/// (the graph gap, the D-norm sandwich, the sanity bound).
const FLOAT_SLACK: f64 = 1e-9;
const C1_LIMIT: Duration = Duration::from_secs(120);
const C9_LIMIT: Duration = Duration::from_secs(600);
const C9_MIN_BELOW: usize = 95;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn complete(n: usize, d: usize) -> SimplicialComplex {
    gen_complex(ComplexKind::Complete, n, d).unwrap()
}

fn lm(n: usize, d: usize, p: f64, seed: u64) -> SimplicialComplex {
    gen_complex(ComplexKind::LinialMeshulam { p, seed }, n, d).unwrap()
}

fn gnp(n: usize, k: usize, alpha: f64, seed: u64) -> Hypergraph {
    gen_hypergraph(HypergraphKind::Gnp { alpha, seed }, n, k).unwrap()
}

fn criterion1_family() -> Vec<(String, SimplicialComplex)> {
    let mut out: Vec<(String, SimplicialComplex)> =
        [(6, 2), (8, 2), (7, 3)].iter().map(|&(n, d)| (format!("complete({n},{d})"), complete(n, d))).collect();
    for p in [0.3, 0.6] {
        for seed in 1..=5 {
            out.push((format!("X2(7,{p}) seed {seed}"), lm(7, 2, p, seed)));
        }
    }
    out
}

fn c1_simplicial_mixing() -> Verdict {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut tuples = 0u64;
    for (name, x) in criterion1_family() {
        let alphas = [x.degree_profile().max as f64, 0.0, (x.n() - x.d()) as f64 / 2.0];
        for alpha in alphas {
            let rep = verify_mixing_simplicial(&x, alpha, Budget::default()).map_err(|e| e.to_string())?;
            let m = rep.min_margin.unwrap_or(0.0);
            ensure(m >= -MARGIN_TOL, || format!("{name}, alpha {alpha}: min margin {m}"))?;
            worst = worst.min(m);
            tuples += rep.margins.as_ref().map_or(0, |s| s.count);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < C1_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("{tuples} tuples, min margin {worst:.3e}, {:.1}s", elapsed.as_secs_f64()))
}

fn c2_complete_witness() -> Verdict {
    let mut checked = 0;
    for n in 6..=10usize {
        for d in 1..=2usize {
            let x = complete(n, d);
            let alpha = n - d;
            let rep = rho_simplicial(&x, alpha as f64, &EnumerationMode::SingletonTail, Budget::default()).map_err(|e| e.to_string())?;
            let w = rep.witness.ok_or("no witness")?;
            // Exact integer oracle for rho(w) >= d(n-d)/(2n):
            // 4 (n F - alpha prod)^2 >= d^2 (n-d)^2 |S0||S1| tail^2.
            let f = count_f(&x, &w).map_err(|e| e.to_string())? as i128;
            let sizes: Vec<i128> = w.sizes().iter().map(|&s| s as i128).collect();
            let prod: i128 = sizes.iter().product();
            let tail: i128 = sizes[2..].iter().product();
            let dev = n as i128 * f - alpha as i128 * prod;
            let (d, nd) = (d as i128, (n - d) as i128);
            let lhs = 4 * dev * dev;
            let rhs = d * d * nd * nd * sizes[0] * sizes[1] * tail * tail;
            ensure(lhs >= rhs, || format!("n={n} d={d}: witness {:?} gives {lhs} < {rhs}", w.parts))?;
            let bound = (d * nd) as f64 / (2.0 * n as f64);
            ensure(rep.rho >= bound && bound >= 0.25, || format!("n={n} d={d}: rho {} vs {bound}", rep.rho))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} complexes, integer-exact"))
}

fn test_complexes() -> Vec<(String, SimplicialComplex)> {
    let mut out = criterion1_family();
    for (n, d) in [(5, 1), (8, 1), (6, 3), (9, 2)] {
        out.push((format!("complete({n},{d})"), complete(n, d)));
    }
    for seed in 1..=4 {
        out.push((format!("X1(9,0.5) seed {seed}"), lm(9, 1, 0.5, seed)));
        out.push((format!("X3(7,0.5) seed {seed}"), lm(7, 3, 0.5, seed)));
    }
    out.push(("empty(6,2)".into(), gen_complex(ComplexKind::Empty, 6, 2).unwrap()));
    out
}

fn c3_kernel_identities() -> Verdict {
    let family = test_complexes();
    let mut worst = 0.0f64;
    for (name, x) in &family {
        let basis = kernel_basis(x, DEFAULT_KERNEL_TOL);
        let j = operator_matrix(x, OperatorKind::AllPairs).map_err(|e| e.to_string())?;
        let jq = (&j.matrix * &basis.basis).amax();
        ensure(jq <= KERNEL_TOL, || format!("{name}: |Jq| = {jq}"))?;
        worst = worst.max(jq);
        let a = operator_matrix(x, OperatorKind::Adjacency).map_err(|e| e.to_string())?;
        let deg = operator_matrix(x, OperatorKind::Degree).map_err(|e| e.to_string())?;
        let lap = operator_matrix(x, OperatorKind::Laplacian).map_err(|e| e.to_string())?;
        ensure(lap.matrix == &deg.matrix - &a.matrix, || format!("{name}: laplacian != D - A"))?;
    }
    let empty = gen_complex(ComplexKind::Empty, 6, 2).unwrap();
    let basis = kernel_basis(&empty, DEFAULT_KERNEL_TOL);
    for kind in [OperatorKind::Adjacency, OperatorKind::AlphaShift(0.0)] {
        let norm = restricted_norm(&operator_matrix(&empty, kind).map_err(|e| e.to_string())?, &basis).map_err(|e| e.to_string())?;
        ensure(norm == 0.0, || format!("empty complex restricted norm {norm}"))?;
    }
    Ok(format!("{} complexes, max |Jq| {worst:.2e}", family.len()))
}

fn cycle_graph(n: usize) -> SimplicialComplex {
    SimplicialComplex::from_unsorted(n, 1, (0..n).map(|i| vec![i, (i + 1) % n]).collect()).unwrap()
}

fn c4_b_rows() -> Verdict {
    let mut family: Vec<(String, SimplicialComplex)> = Vec::new();
    for n in 4..=9 {
        for d in 1..=3 {
            if d < n {
                family.push((format!("complete({n},{d})"), complete(n, d)));
            }
        }
    }
    for n in 5..=8 {
        family.push((format!("C{n}"), cycle_graph(n)));
    }
    family.push(("empty(6,2)".into(), gen_complex(ComplexKind::Empty, 6, 2).unwrap()));
    for (name, x) in &family {
        let prof = x.degree_profile();
        ensure(prof.regular, || format!("{name} is not regular"))?;
        let (n, d, r) = (x.n() as i64, x.d() as i64, prof.max as i64);
        let a = operator_matrix(x, OperatorKind::Adjacency).map_err(|e| e.to_string())?.matrix;
        let j = operator_matrix(x, OperatorKind::AllPairs).map_err(|e| e.to_string())?.matrix;
        // n B = n A - r J + r d I has integer entries.
        let size = a.nrows();
        for row in 0..size {
            let l1: i64 = (0..size)
                .map(|c| {
                    let v = n * a[(row, c)] as i64 - r * j[(row, c)] as i64 + if row == c { r * d } else { 0 };
                    v.abs()
                })
                .sum();
            ensure(l1 <= 2 * d * r * n, || format!("{name}: row {row} has n*l1 {l1} > {}", 2 * d * r * n))?;
        }
        let b = operator_matrix(x, OperatorKind::BMatrix(r as f64)).map_err(|e| e.to_string())?.matrix;
        let exact = (&a * n as f64 - &j * r as f64 + DMatrix::identity(size, size) * (r * d) as f64) / n as f64;
        ensure((&b - &exact).amax() <= 1e-12, || format!("{name}: B differs from nA - rJ + rdI over n"))?;
    }
    Ok(format!("{} regular complexes, integer-exact", family.len()))
}

/// Largest singular value of an explicit graph matrix, independent of the
/// form machinery.
fn dense_graph_norm(h: &Hypergraph, alpha_complete: f64, alpha_ones: f64) -> f64 {
    let n = h.n();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let adj = if h.contains_edge(&[i.min(j), i.max(j)]) && i != j { 1.0 } else { 0.0 };
            let off = if i != j { 1.0 } else { 0.0 };
            m[(i, j)] = adj - alpha_complete * off - alpha_ones;
        }
    }
    m.singular_values().max()
}

fn circulant(n: usize, jumps: &[usize]) -> Hypergraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for &s in jumps {
            let j = (i + s) % n;
            let e = vec![i.min(j), i.max(j)];
            if !edges.contains(&e) {
                edges.push(e);
            }
        }
    }
    Hypergraph::from_unsorted(n, 2, edges).unwrap()
}

fn c5_graph_case() -> Verdict {
    for n in 5..=10 {
        let x = complete(n, 1);
        let basis = kernel_basis(&x, DEFAULT_KERNEL_TOL);
        let norm = restricted_norm(&operator_matrix(&x, OperatorKind::Adjacency).map_err(|e| e.to_string())?, &basis).map_err(|e| e.to_string())?;
        ensure((norm - 1.0).abs() <= GRAPH_NORM_TOL, || format!("K{n}: restricted norm {norm}"))?;
    }

    let mut worst_est = 0.0f64;
    for i in 0..20u64 {
        let n = 5 + (i as usize * 3) % 16;
        let h = gnp(n, 2, 0.3 + 0.02 * i as f64, 100 + i);
        let alpha = h.edges().len() as f64 / binomial(n, 2) as f64;
        let phi = make_form(FormKind::DensityShift { alpha }, &h);
        let est = spectral_norm_estimate(&phi, &EstimatorOptions { seed: i, ..EstimatorOptions::default() }, &[], &[]).map_err(|e| e.to_string())?;
        let exact = dense_graph_norm(&h, alpha, 0.0);
        let gap = (est.value - exact).abs();
        ensure(gap <= ESTIMATOR_TOL, || format!("graph {i} (n={n}): estimate {} vs dense {exact}", est.value))?;
        worst_est = worst_est.max(gap);
    }

    let regular: Vec<(String, Hypergraph)> = vec![
        ("C7".into(), circulant(7, &[1])),
        ("C10".into(), circulant(10, &[1])),
        ("K8".into(), gen_hypergraph(HypergraphKind::Complete, 8, 2).unwrap()),
        ("circ(9;1,3)".into(), circulant(9, &[1, 3])),
        ("circ(12;1,4,6)".into(), circulant(12, &[1, 4, 6])),
        ("circ(11;2,5)".into(), circulant(11, &[2, 5])),
        ("Petersen".into(), petersen()),
    ];
    let opts = HypergraphOptions::default();
    for (name, h) in &regular {
        let prof = h.degree_profile();
        ensure(prof.regular, || format!("{name} is not regular"))?;
        let (n, r) = (h.n(), prof.max as f64);
        let limit = r / (n - 1) as f64;
        let fw = dense_graph_norm(h, 0.0, r / n as f64);
        let dens = dense_graph_norm(h, limit, 0.0);
        ensure((fw - dens).abs() <= limit + FLOAT_SLACK, || format!("{name}: |{fw} - {dens}| > {limit}"))?;
        let rep = verify_fw_comparison(h, &opts).map_err(|e| e.to_string())?;
        let check = rep.check("graph-gap-within-r-over-n-minus-1").ok_or("graph gap check missing")?;
        ensure(check.passed, || format!("{name}: library gap check failed, margin {}", check.margin))?;
    }
    Ok(format!("K5..K10 exact; 20 graphs max estimator gap {worst_est:.2e}; {} regular graphs", regular.len()))
}

fn petersen() -> Hypergraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push(vec![i, (i + 1) % 5]);
        edges.push(vec![i, i + 5]);
        edges.push(vec![5 + i, 5 + (i + 2) % 5]);
    }
    Hypergraph::from_unsorted(10, 2, edges).unwrap()
}

fn c6_d_sandwich() -> Verdict {
    let mut parts = Vec::new();
    for (n, k) in [(6, 2), (8, 3), (10, 3), (8, 4)] {
        let (lo, hi) = d_norm_bounds(n, k).map_err(|e| e.to_string())?;
        let h = Hypergraph::new(n, k, Vec::new()).unwrap();
        let est = spectral_norm_estimate(&make_form(FormKind::DiagonalGap, &h), &EstimatorOptions::default(), &[], &[])
            .map_err(|e| e.to_string())?
            .value;
        ensure(lo <= est + FLOAT_SLACK * lo.max(1.0) && est <= hi, || format!("({n},{k}): {lo} <= {est} <= {hi} fails"))?;
        if k == 2 {
            ensure((est - 1.0).abs() <= D_NORM_TOL, || format!("({n},2): estimate {est} != 1"))?;
        }
        parts.push(format!("({n},{k}) {est:.4}"));
    }
    Ok(parts.join(", "))
}

fn criterion7_family() -> Vec<(String, Hypergraph)> {
    let mut out = Vec::new();
    for n in [8, 10] {
        for seed in 1..=10 {
            out.push((format!("G({n},0.5,3) seed {seed}"), gnp(n, 3, 0.5, seed)));
        }
    }
    for seed in 1..=3 {
        out.push((format!("G(10,0.5,4) seed {seed}"), gnp(10, 4, 0.5, seed)));
    }
    out
}

/// `2^{3k/2} k^{k/2} rho (lg^{k-1}((r + alpha n)^2 n^{k-2} / rho^2) + k^2 (2k)^{-k/2})`,
/// restated from scratch for the oracle.
fn oracle_inverse_bound(n: f64, k: f64, r: f64, alpha: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let arg = (r + alpha * n).powi(2) * n.powf(k - 2.0) / (rho * rho);
    let lg = if arg > 1.0 { arg.ln() / std::f64::consts::LN_2 } else { 0.0 };
    2f64.powf(1.5 * k) * k.powf(0.5 * k) * rho * (lg.powf(k - 1.0) + k * k * (2.0 * k).powf(-0.5 * k))
}

fn inverse_reports() -> Result<Vec<(String, Hypergraph, VerificationReport)>, String> {
    criterion7_family()
        .into_iter()
        .map(|(name, h)| {
            let opts = HypergraphOptions { estimator: EstimatorOptions { seed: 7, ..EstimatorOptions::default() }, ..HypergraphOptions::default() };
            let rep = verify_inverse_hypergraph(&h, 0.5, &opts).map_err(|e| format!("{name}: {e}"))?;
            Ok((name, h, rep))
        })
        .collect()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn c7_inverse(reports: &[(String, Hypergraph, VerificationReport)]) -> Verdict {
    let mut failures = Vec::new();
    let mut ratio = 0.0f64;
    for (name, h, rep) in reports {
        let rho = num(&rep.details["rho_alpha"]);
        let lam = num(&rep.details["lambda_2_alpha"]["value"]);
        let bound = oracle_inverse_bound(h.n() as f64, h.k() as f64, h.max_degree() as f64, 0.5, rho);
        let lib = rep.check("rigorous-inverse-bound").ok_or("check missing")?;
        if lam > bound || !lib.passed {
            failures.push(format!("{name}: {lam} > {bound}"));
        }
        ratio = ratio.max(lam / bound);
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} instances, zero failures, max estimate/bound {ratio:.3e}", reports.len()))
}

fn c8_construction(reports: &[(String, Hypergraph, VerificationReport)]) -> Verdict {
    let mut slack = f64::INFINITY;
    for (name, h, rep) in reports {
        let lam = num(&rep.details["lambda_2_alpha"]["value"]);
        let rho = rho_alpha(h, 0.5, &EnumerationMode::Exhaustive, Budget::default()).map_err(|e| e.to_string())?.rho;
        ensure(lam >= rho, || format!("{name}: estimate {lam} < rho {rho}"))?;
        slack = slack.min(lam - rho);
    }
    Ok(format!("{} instances, min estimate - rho {slack:.4}", reports.len()))
}

fn c9_random_rho() -> Verdict {
    let start = Instant::now();
    let (n, k, alpha) = (10usize, 3usize, 0.5);
    let seeds: Vec<u64> = (1..=100).collect();
    let exp = random_rho_experiment(n, k, alpha, &seeds, &HypergraphOptions::default()).map_err(|e| e.to_string())?;
    let nf = n as f64;
    let threshold = ((nf * 4f64.ln() + nf) / 2.0).sqrt();
    let lower = alpha * (1.0 - alpha) / ((1.0 - alpha).powi(2) + alpha * alpha).sqrt() * ((n - k + 1) as f64).sqrt();
    let below = exp.rows.iter().filter(|r| r.rho <= threshold).count();
    let above = exp.rows.iter().filter(|r| r.rho >= lower).count();
    let elapsed = start.elapsed();
    ensure(exp.rows.len() == 100, || format!("{} rows", exp.rows.len()))?;
    ensure(below >= C9_MIN_BELOW, || format!("only {below}/100 at or below {threshold:.4}"))?;
    ensure(above == 100, || format!("only {above}/100 at or above {lower:.4}"))?;
    ensure(elapsed < C9_LIMIT, || format!("took {elapsed:?}"))?;
    let max = exp.rows.iter().map(|r| r.rho).fold(0.0, f64::max);
    let min = exp.rows.iter().map(|r| r.rho).fold(f64::INFINITY, f64::min);
    Ok(format!(
        "{below}/100 <= {threshold:.4}, {above}/100 >= {lower:.4}, rho in [{min:.4}, {max:.4}], {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn c10_lemmas(reports: &[(String, Hypergraph, VerificationReport)]) -> Verdict {
    let dy = dyadic_battery(1000, 8, 2024).map_err(|e| e.to_string())?;
    ensure(dy.checks.iter().all(|c| c.passed && c.margin == 0.0), || format!("dyadic: {:?}", dy.checks))?;

    let x = [0.375, -0.3, 0.01, 0.5, -0.49, 0.0, 0.123, -0.25];
    let h = gnp(8, 3, 0.5, 5);
    let phi = make_form(FormKind::DensityShift { alpha: 0.5 }, &h);
    let round = rounding_check(&x, 9, 10_000, Some(&phi)).map_err(|e| e.to_string())?;
    ensure(round.checks.iter().all(|c| c.passed), || format!("rounding: {:?}", round.checks))?;

    let part = partition_battery(50, 31, Budget::default()).map_err(|e| e.to_string())?;
    ensure(part.pass, || format!("partition: {:?}", part.checks))?;

    let mut sanity = 0;
    let mut hs: Vec<(Hypergraph, f64)> = reports.iter().map(|(_, h, _)| (h.clone(), 0.5)).collect();
    hs.extend((1..=100).map(|s| (gnp(10, 3, 0.5, s), 0.5)));
    hs.extend((1..=20).map(|s| (gnp(7, 3, 0.2 + 0.03 * s as f64, s), 0.2 + 0.03 * s as f64)));
    for (h, alpha) in &hs {
        let rho = rho_alpha(h, *alpha, &EnumerationMode::Exhaustive, Budget::default()).map_err(|e| e.to_string())?.rho;
        let (n, k, r) = (h.n() as f64, h.k() as f64, h.max_degree() as f64);
        let upper = (r + alpha * n) * n.powf((k - 2.0) / 2.0);
        ensure(rho <= upper + FLOAT_SLACK, || format!("sanity bound: rho {rho} > {upper}"))?;
        let env = rho_envelope(h.n(), h.k(), h.max_degree(), *alpha, 0.5).map_err(|e| e.to_string())?;
        ensure((env.sanity_upper - upper).abs() <= FLOAT_SLACK * upper.max(1.0), || "envelope disagrees with oracle".into())?;
        sanity += 1;
    }
    Ok(format!("1000 dyadic vectors exact, 10^4 roundings, 50 partition identities exact, sanity bound on {} hypergraphs", sanity + 50))
}

fn temp_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("specmix-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn c11_determinism() -> Verdict {
    let dir = temp_dir();
    let h_path = dir.join("h.json");
    let x_path = dir.join("x.json");
    write_object(&specmix::io::Object::Hypergraph(gnp(8, 3, 0.5, 3)), &h_path).map_err(|e| e.to_string())?;
    write_object(&specmix::io::Object::Simplicial(lm(7, 2, 0.5, 2)), &x_path).map_err(|e| e.to_string())?;

    let mut configs = Vec::new();
    for (command, path) in [
        (Command::VerifyMixing, &h_path),
        (Command::VerifyInverse, &h_path),
        (Command::VerifyFw, &h_path),
        (Command::Spectrum, &h_path),
        (Command::VerifyMixing, &x_path),
        (Command::Discrepancy, &x_path),
    ] {
        let mut cfg = RunConfig::new(command);
        cfg.input = Some(path.clone());
        cfg.seed = 5;
        configs.push(cfg);
    }
    let mut sampled = RunConfig::new(Command::Discrepancy);
    sampled.input = Some(h_path.clone());
    sampled.mode = Some(EnumerationMode::Sample { count: 5000, seed: 9 });
    configs.push(sampled);
    let mut exp = RunConfig::new(Command::ExperimentRandomRho);
    (exp.n, exp.k, exp.alpha, exp.seeds) = (Some(8), Some(3), Some(0.5), Some(6));
    configs.push(exp);
    configs.push(RunConfig::new(Command::VerifyLemmas));

    for cfg in &configs {
        let original = execute(cfg).map_err(|e| e.to_string())?;
        let embedded = config_from_report(&original.document).map_err(|e| e.to_string())?;
        let one = execute_with_workers(&embedded, Some(1)).map_err(|e| e.to_string())?;
        let eight = execute_with_workers(&embedded, Some(8)).map_err(|e| e.to_string())?;
        let name = cfg.command.name();
        ensure(one.payload() == eight.payload(), || format!("{name}: 1 vs 8 workers differ"))?;
        ensure(one.payload() == original.payload(), || format!("{name}: rerun differs from original"))?;
        ensure(one.csv == eight.csv, || format!("{name}: csv differs"))?;
    }
    let _ = std::fs::remove_dir_all(dir);
    Ok(format!("{} configs identical at 1 and 8 workers", configs.len()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, title: &str, verdict: Verdict| {
        match verdict {
            Ok(detail) => println!("PASS  {id:>2}. {title}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {id:>2}. {title}: {why}");
            }
        }
    };
    report(1, "simplicial mixing, exhaustive", c1_simplicial_mixing());
    report(2, "complete-complex discrepancy witness", c2_complete_witness());
    report(3, "kernel identities", c3_kernel_identities());
    report(4, "B-matrix row bound 2dr", c4_b_rows());
    report(5, "graph-case regression", c5_graph_case());
    report(6, "D-norm sandwich", c6_d_sandwich());
    let reports = inverse_reports();
    match &reports {
        Ok(reports) => {
            report(7, "hypergraph inverse mixing, rigorous bound", c7_inverse(reports));
            report(8, "estimate dominates rho", c8_construction(reports));
        }
        Err(e) => {
            report(7, "hypergraph inverse mixing, rigorous bound", Err(e.clone()));
            report(8, "estimate dominates rho", Err(e.clone()));
        }
    }
    report(9, "random-hypergraph rho", c9_random_rho());
    report(10, "lemma lab", c10_lemmas(reports.as_deref().unwrap_or(&[])));
    report(11, "determinism across worker counts", c11_determinism());
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
