//! Dense operators on cochains of `(d-1)`-cells.
//!
//! Rows and columns are canonical `(d-1)`-cells in lexicographic order. A
//! cochain stores its value on the ascending orientation only; the reversed
//! orientation carries the negated value implicitly.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::complexes::{binomial, combinations, lex_rank, orientation_sign, SimplicialComplex};
use crate::error::{Error, Result};

pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "alpha")]
pub enum OperatorKind {
    Boundary,
    Adjacency,
    AllPairs,
    Degree,
    Laplacian,
    /// `alpha I - laplacian`
    AlphaShift(f64),
    /// `A - (alpha/n) J + (alpha d / n) I`; with `alpha = r` this is the
    /// zero-diagonal matrix fed to the Bilu-Linial argument.
    BMatrix(f64),
    Custom,
}

/// Real-valued function on `(d-1)`-cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub n: usize,
    pub d: usize,
    pub values: DVector<f64>,
}

impl Cochain {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self { n, d, values: DVector::zeros(binomial(n, d) as usize) }
    }

    /// Value on an arbitrarily ordered cell, honouring skew-symmetry.
    pub fn get(&self, oriented: &[usize]) -> f64 {
        let cell = crate::complexes::OrientedCell::new(oriented.to_vec()).expect("distinct vertices");
        f64::from(cell.parity()) * self.values[lex_rank(cell.canonical(), self.n)]
    }
}

#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub kind: OperatorKind,
    pub matrix: DMatrix<f64>,
    pub n: usize,
    pub d: usize,
}

impl DenseOperator {
    pub fn custom(matrix: DMatrix<f64>, n: usize, d: usize) -> Self {
        Self { kind: OperatorKind::Custom, matrix, n, d }
    }

    pub fn is_square(&self) -> bool {
        self.matrix.is_square()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.matrix.is_empty() {
            return 0.0;
        }
        self.matrix.singular_values().max()
    }

    /// Entries as CSV with cells printed as dash-joined vertex lists.
    pub fn to_csv(&self) -> String {
        let (row_cells, col_cells) = match self.kind {
            OperatorKind::Boundary => (cell_labels(self.n, self.d - 1), cell_labels(self.n, self.d)),
            _ => (cell_labels(self.n, self.d), cell_labels(self.n, self.d)),
        };
        let mut out = String::from("cell");
        for c in &col_cells {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, r) in row_cells.iter().enumerate() {
            out.push_str(r);
            for j in 0..self.matrix.ncols() {
                out.push(',');
                out.push_str(&format!("{}", self.matrix[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}

fn cell_labels(n: usize, size: usize) -> Vec<String> {
    combinations(n, size)
        .into_iter()
        .map(|c| {
            if c.is_empty() {
                "()".to_string()
            } else {
                c.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
            }
        })
        .collect()
}

/// Orthonormal basis of the cycle space `ker(boundary)`, one basis vector per column.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub basis: DMatrix<f64>,
    pub tol: f64,
    pub n: usize,
    pub d: usize,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// `C(n, d-1) x C(n, d)` matrix of the boundary map; the entry at
/// `(tau, sigma)` with `sigma = {v} + tau` is the parity of `(v, tau...)`
/// relative to ascending `sigma`.
pub fn boundary_matrix(x: &SimplicialComplex) -> DenseOperator {
    let (n, d) = (x.n(), x.d());
    let cols = combinations(n, d);
    let mut m = DMatrix::zeros(binomial(n, d - 1) as usize, cols.len());
    let mut tau = Vec::with_capacity(d);
    for (j, sigma) in cols.iter().enumerate() {
        for pos in 0..d {
            tau.clear();
            tau.extend(sigma.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &v)| v));
            // moving v from the front to slot `pos` takes `pos` transpositions
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            m[(lex_rank(&tau, n), j)] = sign;
        }
    }
    DenseOperator { kind: OperatorKind::Boundary, matrix: m, n, d }
}

/// Null space of the boundary matrix through a full singular value
/// decomposition; singular values at or below `tol * max` count as zero.
pub fn kernel_basis(x: &SimplicialComplex, tol: f64) -> KernelBasis {
    let b = boundary_matrix(x).matrix;
    let (rows, cols) = b.shape();
    // pad to at least square so that V^T spans the whole column space
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(&b);
        p
    } else {
        b
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let cutoff = tol * sigma_max;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .collect();
    let mut basis = DMatrix::zeros(cols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &v_t.row(i).transpose());
    }
    KernelBasis { basis, tol, n: x.n(), d: x.d() }
}

/// Visits every unordered pair of distinct `(d-1)`-faces of each set in `sets`.
fn for_face_pairs(n: usize, sets: &[Vec<usize>], mut f: impl FnMut(usize, usize, f64)) {
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for eta in sets {
        faces.clear();
        faces.extend((0..eta.len()).map(|skip| {
            eta.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
        }));
        for a in 0..faces.len() {
            for b in a + 1..faces.len() {
                let sign = orientation_sign(&faces[a], &faces[b]).expect("faces of one cell are adjacent");
                f(lex_rank(&faces[a], n), lex_rank(&faces[b], n), f64::from(sign));
            }
        }
    }
}

fn adjacency(x: &SimplicialComplex) -> DMatrix<f64> {
    let size = binomial(x.n(), x.d()) as usize;
    let mut m = DMatrix::zeros(size, size);
    for_face_pairs(x.n(), x.facets(), |i, j, s| {
        m[(i, j)] = s;
        m[(j, i)] = s;
    });
    m
}

fn all_pairs(n: usize, d: usize) -> DMatrix<f64> {
    let size = binomial(n, d) as usize;
    let mut m = DMatrix::from_diagonal_element(size, size, d as f64);
    for_face_pairs(n, &combinations(n, d + 1), |i, j, s| {
        m[(i, j)] = s;
        m[(j, i)] = s;
    });
    m
}

fn degree(x: &SimplicialComplex) -> DMatrix<f64> {
    let prof = x.degree_profile();
    DMatrix::from_diagonal(&DVector::from_iterator(
        prof.degrees.len(),
        prof.degrees.iter().map(|&d| d as f64),
    ))
}

pub fn operator_matrix(x: &SimplicialComplex, kind: OperatorKind) -> Result<DenseOperator> {
    let (n, d) = (x.n(), x.d());
    let size = binomial(n, d) as usize;
    let matrix = match kind {
        OperatorKind::Boundary => return Ok(boundary_matrix(x)),
        OperatorKind::Adjacency => adjacency(x),
        OperatorKind::AllPairs => all_pairs(n, d),
        OperatorKind::Degree => degree(x),
        OperatorKind::Laplacian => degree(x) - adjacency(x),
        OperatorKind::AlphaShift(alpha) => {
            DMatrix::from_diagonal_element(size, size, alpha) - (degree(x) - adjacency(x))
        }
        OperatorKind::BMatrix(alpha) => {
            let prof = x.degree_profile();
            if !prof.regular {
                return Err(Error::Irregular(Box::new(prof)));
            }
            let scale = alpha / n as f64;
            let mut m = adjacency(x) - all_pairs(n, d) * scale;
            for i in 0..size {
                m[(i, i)] += scale * d as f64;
            }
            m
        }
        OperatorKind::Custom => return Err(Error::invalid("custom operators are built with DenseOperator::custom")),
    };
    Ok(DenseOperator { kind, matrix, n, d })
}

/// Norm of `M` restricted to the span of `basis`: the largest singular value
/// of `M Q`. Zero when the basis is empty.
pub fn restricted_norm(m: &DenseOperator, basis: &KernelBasis) -> Result<f64> {
    if m.matrix.ncols() != basis.basis.nrows() {
        return Err(Error::DimensionMismatch { expected: m.matrix.ncols(), actual: basis.basis.nrows() });
    }
    if basis.dim() == 0 || m.matrix.nrows() == 0 {
        return Ok(0.0);
    }
    let product = &m.matrix * &basis.basis;
    Ok(product.singular_values().max())
}

/// Sum of absolute entries of every row.
pub fn row_l1_norms(m: &DenseOperator) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.matrix.nrows(), actual: m.matrix.ncols() });
    }
    Ok(m.matrix.row_iter().map(|r| r.iter().map(|v| v.abs()).sum()).collect())
}
