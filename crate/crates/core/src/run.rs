//! Command orchestration: a serializable [`RunConfig`] in, a report envelope
//! out. The envelope embeds the config, so re-executing it reproduces the
//! payload; only `wall_seconds` varies between runs.

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complexes::{binomial, gen_complex, gen_hypergraph, ComplexKind, Hypergraph, HypergraphKind, SimplicialComplex};
use crate::error::{Error, Result};
use crate::hypergraph_mixing::{
    random_rho_experiment, rho_alpha, rho_envelope, seeded_estimate, verify_fw_comparison, verify_inverse_hypergraph,
    verify_mixing_hypergraph, HypergraphOptions,
};
use crate::io::{read_object, report_json, Object};
use crate::lemma_lab::{bilu_linial_check, lemma_battery, BatterySizes};
use crate::report::{EnumerationMode, VerificationReport, SCHEMA};
use crate::simplicial_mixing::{rho_simplicial, verify_inverse_simplicial, verify_mixing_simplicial, InverseOptions};
use crate::simplicial_ops::{kernel_basis, operator_matrix, restricted_norm, OperatorKind, DEFAULT_KERNEL_TOL};
use crate::sweep::Budget;
use crate::tensor_forms::{dense_matrix, make_form, EstimatorOptions, FormKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GenComplex,
    GenHypergraph,
    Spectrum,
    Discrepancy,
    VerifyMixing,
    VerifyInverse,
    VerifyFw,
    VerifyLemmas,
    VerifyBiluLinial,
    ExperimentRandomRho,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GenComplex => "gen complex",
            Command::GenHypergraph => "gen hypergraph",
            Command::Spectrum => "spectrum",
            Command::Discrepancy => "discrepancy",
            Command::VerifyMixing => "verify mixing",
            Command::VerifyInverse => "verify inverse",
            Command::VerifyFw => "verify fw",
            Command::VerifyLemmas => "verify lemmas",
            Command::VerifyBiluLinial => "verify bilu-linial",
            Command::ExperimentRandomRho => "experiment random-rho",
        }
    }
}

/// Generator families accepted by `gen`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Complete,
    Empty,
    LinialMeshulam,
    Gnp,
}

/// Everything that determines a run's payload. Worker count is deliberately
/// absent: payloads do not depend on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub kind: Option<GenKind>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub mode: Option<EnumerationMode>,
    pub seed: u64,
    pub seeds: Option<u64>,
    pub budget: u64,
    pub force: bool,
    pub starts: usize,
    pub iters: usize,
    pub tol: f64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let est = EstimatorOptions::default();
        Self {
            command,
            input: None,
            output: None,
            csv: None,
            kind: None,
            n: None,
            d: None,
            k: None,
            p: None,
            alpha: None,
            delta: None,
            mode: None,
            seed: 0,
            seeds: None,
            budget: Budget::DEFAULT_STATES as u64,
            force: false,
            starts: est.starts,
            iters: est.max_iters,
            tol: est.tol,
        }
    }

    fn budget(&self) -> Budget {
        Budget::new(u128::from(self.budget), self.force)
    }

    fn hypergraph_options(&self) -> HypergraphOptions {
        HypergraphOptions {
            budget: self.budget(),
            estimator: EstimatorOptions { starts: self.starts, max_iters: self.iters, tol: self.tol, seed: self.seed },
            all_subsets: true,
        }
    }

    fn need<T: Copy>(&self, v: Option<T>, flag: &str) -> Result<T> {
        v.ok_or_else(|| Error::invalid(format!("{} needs --{flag}", self.command.name())))
    }

    fn object(&self) -> Result<Object> {
        read_object(self.input.as_deref().ok_or_else(|| Error::invalid(format!("{} needs --in", self.command.name())))?)
    }
}

/// Result of [`execute`]. `document` is the rounded report envelope (or the
/// object file for `gen`); `csv` is set for experiment batches.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub document: Value,
    pub exit_code: i32,
    pub csv: Option<String>,
}

impl RunOutcome {
    /// The envelope without wall-clock fields: the part that must reproduce.
    pub fn payload(&self) -> Value {
        let mut v = self.document.clone();
        if let Value::Object(map) = &mut v {
            map.remove("wall_seconds");
        }
        v
    }
}

/// Interpretation choices every report records.
pub fn resolutions() -> Value {
    json!({
        "log_base": 2,
        "hoeffding_log": "natural",
        "r": "maximum degree of a (k-1)-set (hypergraphs) or of a (d-1)-cell (complexes)",
        "inverse_bound_degree_term": "(r + alpha n)^2",
        "witness_lower_denominator": "sqrt((1 - alpha)^2 + alpha^2); the alternative sqrt(alpha^2 + (1 - alpha^2)) is reported alongside",
        "partition_multiplicity": "k^(n-k)",
        "empty_parts": "admitted in mixing verification, excluded from rho maximization",
        "lg_clamp": "lg arguments below 1 are clamped to 1",
        "default_delta": "e^(-n)",
        "default_alpha": "r for complexes, edge density |E| / C(n, k) for hypergraphs",
        "fw_alpha": "r / n",
    })
}

fn edge_density(h: &Hypergraph) -> f64 {
    h.edges().len() as f64 / binomial(h.n(), h.k()) as f64
}

fn complex_alpha(cfg: &RunConfig, x: &SimplicialComplex) -> f64 {
    cfg.alpha.unwrap_or(x.degree_profile().max as f64)
}

fn hypergraph_alpha(cfg: &RunConfig, h: &Hypergraph) -> f64 {
    cfg.alpha.unwrap_or_else(|| edge_density(h))
}

fn verdict(report: &VerificationReport) -> i32 {
    if report.pass {
        0
    } else {
        1
    }
}

fn generate(cfg: &RunConfig) -> Result<Object> {
    let n = cfg.need(cfg.n, "n")?;
    match cfg.command {
        Command::GenComplex => {
            let kind = match cfg.kind.unwrap_or(GenKind::Complete) {
                GenKind::Complete => ComplexKind::Complete,
                GenKind::Empty => ComplexKind::Empty,
                GenKind::LinialMeshulam => ComplexKind::LinialMeshulam { p: cfg.need(cfg.p, "p")?, seed: cfg.seed },
                GenKind::Gnp => return Err(Error::invalid("gnp is a hypergraph family; use linial-meshulam")),
            };
            Ok(Object::Simplicial(gen_complex(kind, n, cfg.need(cfg.d, "d")?)?))
        }
        _ => {
            let kind = match cfg.kind.unwrap_or(GenKind::Complete) {
                GenKind::Complete => HypergraphKind::Complete,
                GenKind::Empty => HypergraphKind::Gnp { alpha: 0.0, seed: cfg.seed },
                GenKind::Gnp => HypergraphKind::Gnp { alpha: cfg.need(cfg.alpha.or(cfg.p), "alpha")?, seed: cfg.seed },
                GenKind::LinialMeshulam => return Err(Error::invalid("linial-meshulam is a complex family; use gnp")),
            };
            Ok(Object::Hypergraph(gen_hypergraph(kind, n, cfg.need(cfg.k, "k")?)?))
        }
    }
}

fn spectrum(cfg: &RunConfig, object: &Object) -> Result<Value> {
    match object {
        Object::Simplicial(x) => {
            let alpha = complex_alpha(cfg, x);
            let basis = kernel_basis(x, DEFAULT_KERNEL_TOL);
            let adj = operator_matrix(x, OperatorKind::Adjacency)?;
            let shift = operator_matrix(x, OperatorKind::AlphaShift(alpha))?;
            let lap = operator_matrix(x, OperatorKind::Laplacian)?;
            let mut eig: Vec<f64> = lap.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
            eig.sort_by(f64::total_cmp);
            Ok(json!({
                "statement": "simplicial-spectrum",
                "alpha": alpha,
                "cycle_dimension": basis.dim(),
                "adjacency_norm": adj.spectral_norm(),
                "adjacency_norm_on_cycles": restricted_norm(&adj, &basis)?,
                "alpha_shift_norm_on_cycles": restricted_norm(&shift, &basis)?,
                "laplacian_eigenvalues": eig,
            }))
        }
        Object::Hypergraph(h) => {
            let alpha = hypergraph_alpha(cfg, h);
            let opts = cfg.hypergraph_options().estimator;
            let est = |kind| seeded_estimate(&make_form(kind, h), None, &opts);
            Ok(json!({
                "statement": "hypergraph-spectrum",
                "alpha": alpha,
                "adjacency": est(FormKind::Adjacency)?,
                "lambda_2": est(FormKind::FriedmanWigderson)?,
                "lambda_2_alpha": est(FormKind::DensityShift { alpha })?,
            }))
        }
    }
}

fn discrepancy(cfg: &RunConfig, object: &Object) -> Result<Value> {
    let budget = cfg.budget();
    let report = match object {
        Object::Simplicial(x) => {
            let mode = cfg.mode.clone().unwrap_or(EnumerationMode::Exhaustive);
            rho_simplicial(x, complex_alpha(cfg, x), &mode, budget)?
        }
        Object::Hypergraph(h) => {
            let mode = cfg.mode.clone().unwrap_or(EnumerationMode::Exhaustive);
            let alpha = hypergraph_alpha(cfg, h);
            let env = rho_envelope(h.n(), h.k(), h.max_degree(), alpha, cfg.delta.unwrap_or((-(h.n() as f64)).exp()))?;
            let disc = rho_alpha(h, alpha, &mode, budget)?;
            return Ok(json!({"statement": "hypergraph-discrepancy", "discrepancy": disc, "envelope": env}));
        }
    };
    Ok(json!({"statement": "simplicial-discrepancy", "discrepancy": report}))
}

fn bilu_linial(cfg: &RunConfig, object: &Object) -> Result<VerificationReport> {
    let (mat, m): (DMatrix<f64>, f64) = match object {
        Object::Simplicial(x) => {
            let prof = x.degree_profile();
            if !prof.regular {
                return Err(Error::Irregular(Box::new(prof)));
            }
            let r = prof.max as f64;
            (operator_matrix(x, OperatorKind::BMatrix(r))?.matrix, 2.0 * x.d() as f64 * r)
        }
        Object::Hypergraph(h) => {
            if h.k() != 2 {
                return Err(Error::invalid("bilu-linial on hypergraphs needs k = 2"));
            }
            let alpha = hypergraph_alpha(cfg, h);
            let phi = make_form(FormKind::DensityShift { alpha }, h);
            (dense_matrix(&phi)?, h.max_degree() as f64 + alpha * h.n() as f64)
        }
    };
    bilu_linial_check(&mat, m, true, cfg.budget())
}

/// Runs `cfg` on the current rayon pool.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    if matches!(cfg.command, Command::GenComplex | Command::GenHypergraph) {
        return Ok(RunOutcome { document: generate(cfg)?.to_json(), exit_code: 0, csv: None });
    }
    let mut csv = None;
    let (report, exit_code): (Value, i32) = match cfg.command {
        Command::Spectrum => (spectrum(cfg, &cfg.object()?)?, 0),
        Command::Discrepancy => (discrepancy(cfg, &cfg.object()?)?, 0),
        Command::VerifyMixing => {
            let rep = match cfg.object()? {
                Object::Simplicial(x) => verify_mixing_simplicial(&x, complex_alpha(cfg, &x), cfg.budget())?,
                Object::Hypergraph(h) => verify_mixing_hypergraph(&h, hypergraph_alpha(cfg, &h), &cfg.hypergraph_options())?,
            };
            (serde_json::to_value(&rep)?, verdict(&rep))
        }
        Command::VerifyInverse => {
            let rep = match cfg.object()? {
                Object::Simplicial(x) => {
                    verify_inverse_simplicial(&x, InverseOptions { budget: cfg.budget(), pair_sweep: true })?
                }
                Object::Hypergraph(h) => verify_inverse_hypergraph(&h, hypergraph_alpha(cfg, &h), &cfg.hypergraph_options())?,
            };
            (serde_json::to_value(&rep)?, verdict(&rep))
        }
        Command::VerifyFw => {
            let Object::Hypergraph(h) = cfg.object()? else {
                return Err(Error::invalid("verify fw needs a hypergraph"));
            };
            let rep = verify_fw_comparison(&h, &cfg.hypergraph_options())?;
            (serde_json::to_value(&rep)?, verdict(&rep))
        }
        Command::VerifyLemmas => {
            let rep = lemma_battery(cfg.seed, BatterySizes::default(), cfg.budget())?;
            (serde_json::to_value(&rep)?, verdict(&rep))
        }
        Command::VerifyBiluLinial => {
            let rep = bilu_linial(cfg, &cfg.object()?)?;
            (serde_json::to_value(&rep)?, verdict(&rep))
        }
        Command::ExperimentRandomRho => {
            let n = cfg.need(cfg.n, "n")?;
            let k = cfg.need(cfg.k, "k")?;
            let alpha = cfg.need(cfg.alpha, "alpha")?;
            let count = cfg.seeds.unwrap_or(100);
            let seeds: Vec<u64> = (0..count).map(|i| cfg.seed + 1 + i).collect();
            let exp = random_rho_experiment(n, k, alpha, &seeds, &cfg.hypergraph_options())?;
            csv = Some(exp.to_csv()?);
            (json!({"summary": exp.report, "rows": exp.rows}), verdict(&exp.report))
        }
        Command::GenComplex | Command::GenHypergraph => unreachable!(),
    };
    let document = json!({
        "schema": SCHEMA,
        "command": cfg.command.name(),
        "config": cfg,
        "resolutions": resolutions(),
        "report": report_json(&report)?,
        "wall_seconds": start.elapsed().as_secs_f64(),
    });
    Ok(RunOutcome { document, exit_code, csv })
}

/// [`execute`] on a dedicated pool of `workers` threads (rayon's default
/// when `None`).
pub fn execute_with_workers(cfg: &RunConfig, workers: Option<usize>) -> Result<RunOutcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| Error::invalid(e.to_string()))?;
    pool.install(|| execute(cfg))
}

/// The config embedded in a report envelope.
pub fn config_from_report(document: &Value) -> Result<RunConfig> {
    match document.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => {}
        _ => return Err(Error::validation("schema", format!("expected \"{SCHEMA}\""))),
    }
    let cfg = document.get("config").ok_or_else(|| Error::validation("config", "missing"))?;
    serde_json::from_value(cfg.clone()).map_err(|e| Error::validation("config", e.to_string()))
}
