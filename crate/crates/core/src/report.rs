//! Report types shared by the verification routines.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA: &str = "specmix/1";
pub const HISTOGRAM_BINS: usize = 20;

/// Tolerance for exact (linear-algebra backed) inequalities.
pub const EXACT_TOL: f64 = 1e-8;

/// Below this a discrepancy value counts as zero and ratio reports are
/// marked degenerate.
pub const DEGENERATE_RHO: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum EnumerationMode {
    Exhaustive,
    /// Simplicial only: parts `S_2..S_d` are singletons.
    SingletonTail,
    /// Hypergraph only: `k-1` singletons plus the link or co-link of them.
    SingletonWitness,
    Sample { count: u64, seed: u64 },
}

/// Pairwise disjoint vertex sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointTuple {
    pub parts: Vec<Vec<usize>>,
}

impl DisjointTuple {
    pub fn new(parts: Vec<Vec<usize>>) -> Option<Self> {
        let mut seen = std::collections::HashSet::new();
        for p in &parts {
            for &v in p {
                if !seen.insert(v) {
                    return None;
                }
            }
        }
        Some(Self { parts })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub rho: f64,
    pub witness: Option<DisjointTuple>,
    pub alpha: f64,
    pub mode: EnumerationMode,
    pub tuples_examined: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// A failure means a bug: the inequality is a theorem given exact inputs.
    TheoremBacked,
    /// May fail when the norm estimator under-covers the true norm.
    EstimatorGap,
    /// Probabilistic or reported-only.
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    /// Right side minus left side (or the analogous slack).
    pub margin: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, kind: CheckKind, margin: f64, tol: f64) -> Self {
        Self { name: name.into(), kind, passed: margin >= -tol, margin }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub bins: Vec<u64>,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, bins: vec![0; HISTOGRAM_BINS] }
    }

    pub fn add(&mut self, x: f64) {
        let width = self.hi - self.lo;
        let idx = if width > 0.0 {
            (((x - self.lo) / width) * HISTOGRAM_BINS as f64) as usize
        } else {
            0
        };
        self.bins[idx.min(HISTOGRAM_BINS - 1)] += 1;
    }

    pub fn merge(mut self, other: Histogram) -> Histogram {
        for (a, b) in self.bins.iter_mut().zip(other.bins) {
            *a += b;
        }
        self
    }
}

/// Summary of per-instance margins over a tuple sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginSummary {
    pub count: u64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub statement: String,
    pub params: Map<String, Value>,
    pub margins: Option<MarginSummary>,
    pub min_margin: Option<f64>,
    pub fitted_constant: Option<f64>,
    pub degenerate: bool,
    pub checks: Vec<Check>,
    /// True iff every theorem-backed check passed.
    pub pass: bool,
    pub log_base: u32,
    pub notes: Vec<String>,
    pub details: Value,
}

impl VerificationReport {
    pub fn new(statement: &str) -> Self {
        Self {
            statement: statement.to_string(),
            params: Map::new(),
            margins: None,
            min_margin: None,
            fitted_constant: None,
            degenerate: false,
            checks: Vec::new(),
            pass: true,
            log_base: 2,
            notes: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn push_check(&mut self, check: Check) {
        if check.kind == CheckKind::TheoremBacked && !check.passed {
            self.pass = false;
        }
        self.checks.push(check);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Checks of the given kind that failed.
    pub fn failures(&self, kind: CheckKind) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.kind == kind && !c.passed).collect()
    }
}

/// `log2(x)` clamped below at zero, for the `log(...) + 1` factors of
/// inverse-mixing bounds.
pub fn lg_plus(x: f64) -> f64 {
    if x > 1.0 { x.log2() } else { 0.0 }
}
