//! Mesh differentiation matrices built from sliding stencils.
//!
//! Row `i` of `D_s` holds the stencil weights of the `M` contiguous mesh
//! points chosen for `x_i`. With `M < N` (odd) and `c = (M + 1) / 2`, using
//! 1-based rows:
//!
//! * `i < c`: the first `M` points, evaluated at stencil index `i`;
//! * `c <= i <= N - c + 1`: points `i - c + 1 ..= i + c - 1`, evaluated at the
//!   centre `c`;
//! * `i > N - c + 1`: the last `M` points, evaluated at `i + M - N`.
//!
//! At `i = N - c + 1` the interior and right-boundary rules pick the same
//! window and the same local index. With `M = N` every row uses the whole mesh.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::stencil::{stencil_rows, Stencil, StencilRows};

/// Row-compressed sparse matrix. Column indices are strictly increasing
/// within each row.
///
/// Matrices produced by [`assemble`] store exactly `M` entries per row on a
/// contiguous column window, zeros included, and record the derivative order
/// and stencil width they were built with.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBandMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    order: Option<usize>,
    stencil_width: Option<usize>,
}

impl SparseBandMatrix {
    /// Builds a matrix from `(row, col, value)` triplets (0-based) in any
    /// order. Repeated positions are rejected.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= n_rows || c >= n_cols) {
            return Err(Error::InvalidInput(format!(
                "entry ({}, {}) outside a {n_rows}x{n_cols} matrix",
                r + 1,
                c + 1
            )));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::InvalidInput(format!(
                "entry ({}, {}) given more than once",
                w[0].0 + 1,
                w[0].1 + 1
            )));
        }
        let mut row_ptr = vec![0; n_rows + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let (cols, values) = entries.into_iter().map(|(_, c, v)| (c, v)).unzip();
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            cols,
            values,
            order: None,
            stencil_width: None,
        })
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            values: vec![1.0; n],
            order: None,
            stencil_width: None,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    /// Derivative order, for matrices produced by [`assemble`].
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    /// Stencil width, for matrices produced by [`assemble`].
    pub fn stencil_width(&self) -> Option<usize> {
        self.stencil_width
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[span.clone()], &self.values[span])
    }

    /// Columns from the first to one past the last stored entry of row `i`.
    pub fn column_window(&self, i: usize) -> Range<usize> {
        let (cols, _) = self.row(i);
        match (cols.first(), cols.last()) {
            (Some(&first), Some(&last)) => first..last + 1,
            _ => 0..0,
        }
    }

    /// Stored value at `(i, j)`, or 0 when the position is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, values) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| values[k])
    }

    /// All stored entries as 0-based `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, values) = self.row(i);
            cols.iter().zip(values).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.triplets() {
            dense[i][j] = v;
        }
        dense
    }

    /// Matrix-vector product.
    ///
    /// Each row accumulates its off-diagonal products in column order and adds
    /// the diagonal product last, so a differentiation matrix maps the
    /// all-ones vector to exact zeros.
    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: samples.len(),
            });
        }
        Ok((0..self.n_rows)
            .map(|i| {
                let (cols, values) = self.row(i);
                let mut diag = 0.0;
                let mut acc = 0.0;
                for (&j, &v) in cols.iter().zip(values) {
                    if j == i {
                        diag = v * samples[j];
                    } else {
                        acc += v * samples[j];
                    }
                }
                acc + diag
            })
            .collect())
    }
}

/// Free-function form of [`SparseBandMatrix::apply`].
pub fn apply(matrix: &SparseBandMatrix, samples: &[f64]) -> Result<Vec<f64>> {
    matrix.apply(samples)
}

/// Which of the placement rules chose a row's stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilCase {
    /// Stencil is the whole mesh (`M = N`).
    Full,
    LeftBoundary,
    Interior,
    RightBoundary,
}

/// Where the stencil for one mesh row sits. All indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub case: StencilCase,
    /// First mesh index covered by the stencil.
    pub start: usize,
    /// Position of the row's own mesh point inside the stencil.
    pub eval_index: usize,
}

impl Placement {
    pub fn columns(&self, width: usize) -> Range<usize> {
        self.start..self.start + width
    }
}

fn check_shape(n: usize, width: usize) -> Result<()> {
    if width < 2 {
        return Err(Error::InvalidStencil(format!(
            "a stencil needs at least 2 points, got {width}"
        )));
    }
    if width > n {
        return Err(Error::StencilTooWide { width, n });
    }
    if width < n && width.is_multiple_of(2) {
        return Err(Error::EvenStencil { width, n });
    }
    Ok(())
}

/// Left-boundary rule: the first `width` points, local index `row`.
pub fn left_boundary_placement(row: usize) -> Placement {
    Placement {
        case: StencilCase::LeftBoundary,
        start: 0,
        eval_index: row,
    }
}

/// Interior rule: the window centred on `row`.
pub fn interior_placement(width: usize, row: usize) -> Placement {
    let half = (width - 1) / 2;
    Placement {
        case: StencilCase::Interior,
        start: row - half,
        eval_index: half,
    }
}

/// Right-boundary rule: the last `width` points.
pub fn right_boundary_placement(n: usize, width: usize, row: usize) -> Placement {
    Placement {
        case: StencilCase::RightBoundary,
        start: n - width,
        eval_index: row + width - n,
    }
}

/// Selects the stencil for mesh row `row` (0-based) of an `n`-point mesh.
pub fn placement(n: usize, width: usize, row: usize) -> Result<Placement> {
    check_shape(n, width)?;
    if row >= n {
        return Err(Error::InvalidInput(format!(
            "row {row} out of range for {n} points"
        )));
    }
    if width == n {
        return Ok(Placement {
            case: StencilCase::Full,
            start: 0,
            eval_index: row,
        });
    }
    // 1-based centre c = (M + 1) / 2; interior is c <= i <= N - c + 1.
    let centre = width.div_ceil(2);
    let i = row + 1;
    Ok(if i < centre {
        left_boundary_placement(row)
    } else if i <= n - centre + 1 {
        interior_placement(width, row)
    } else {
        right_boundary_placement(n, width, row)
    })
}

/// Differentiation matrices `D_1 ..= D_S` of one mesh and stencil width.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrixSet {
    matrices: Vec<SparseBandMatrix>,
    mesh: Mesh,
    stencil_width: usize,
    max_order: usize,
}

impl DiffMatrixSet {
    /// `D_order` (1-based). Panics if `order` is 0 or above `max_order`.
    pub fn matrix(&self, order: usize) -> &SparseBandMatrix {
        assert!(
            (1..=self.max_order).contains(&order),
            "derivative order {order} not in 1..={}",
            self.max_order
        );
        &self.matrices[order - 1]
    }

    pub fn matrices(&self) -> &[SparseBandMatrix] {
        &self.matrices
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn stencil_width(&self) -> usize {
        self.stencil_width
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn into_matrices(self) -> Vec<SparseBandMatrix> {
        self.matrices
    }
}

/// Weights of every order for one mesh row, with the stencil placement used.
pub fn row_weights(mesh: &Mesh, width: usize, max_order: usize, row: usize) -> Result<(Placement, StencilRows)> {
    let place = placement(mesh.len(), width, row)?;
    let points = &mesh.points()[place.columns(width)];
    let stencil = Stencil::new(points, place.eval_index)?;
    Ok((place, stencil_rows(&stencil, max_order)?))
}

/// Assembles `D_1 ..= D_max_order` for `mesh` with stencils of `width` points.
///
/// Rows are computed in parallel; each row's arithmetic is independent, so the
/// result is identical to a serial build.
pub fn assemble(mesh: &Mesh, width: usize, max_order: usize) -> Result<DiffMatrixSet> {
    let n = mesh.len();
    check_shape(n, width)?;
    if max_order == 0 {
        return Err(Error::InvalidInput(
            "derivative order must be at least 1".to_string(),
        ));
    }
    if max_order >= width {
        return Err(Error::OrderTooHigh {
            order: max_order,
            width,
        });
    }

    let per_row: Vec<(Placement, StencilRows)> = (0..n)
        .into_par_iter()
        .map(|row| row_weights(mesh, width, max_order, row))
        .collect::<Result<_>>()?;

    let row_ptr: Vec<usize> = (0..=n).map(|i| i * width).collect();
    let cols: Vec<usize> = per_row
        .iter()
        .flat_map(|(place, _)| place.columns(width))
        .collect();
    let matrices = (1..=max_order)
        .map(|order| SparseBandMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: row_ptr.clone(),
            cols: cols.clone(),
            values: per_row
                .iter()
                .flat_map(|(_, rows)| rows.row(order).iter().copied())
                .collect(),
            order: Some(order),
            stencil_width: Some(width),
        })
        .collect();

    Ok(DiffMatrixSet {
        matrices,
        mesh: mesh.clone(),
        stencil_width: width,
        max_order,
    })
}

/// Operand of [`kron_lift`]: a square matrix or an identity of given size.
#[derive(Debug, Clone, Copy)]
pub enum KronOperand<'a> {
    Matrix(&'a SparseBandMatrix),
    Identity(usize),
}

impl KronOperand<'_> {
    fn size(&self) -> Result<usize> {
        match self {
            KronOperand::Identity(n) => Ok(*n),
            KronOperand::Matrix(m) if m.is_square() => Ok(m.n_rows()),
            KronOperand::Matrix(m) => Err(Error::NonSquare {
                rows: m.n_rows(),
                cols: m.n_cols(),
            }),
        }
    }

    fn row(&self, i: usize) -> (Vec<usize>, Vec<f64>) {
        match self {
            KronOperand::Identity(_) => (vec![i], vec![1.0]),
            KronOperand::Matrix(m) => {
                let (c, v) = m.row(i);
                (c.to_vec(), v.to_vec())
            }
        }
    }
}

impl<'a> From<&'a SparseBandMatrix> for KronOperand<'a> {
    fn from(m: &'a SparseBandMatrix) -> Self {
        KronOperand::Matrix(m)
    }
}

/// Kronecker product `left ⊗ right`.
///
/// For samples `f(x_i, y_j)` stored at `j * nx + i`, `I_ny ⊗ D_x` differentiates
/// along x and `D_y ⊗ I_nx` along y.
pub fn kron_lift(left: KronOperand<'_>, right: KronOperand<'_>) -> Result<SparseBandMatrix> {
    let p = left.size()?;
    let q = right.size()?;
    let n = p * q;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for a in 0..p {
        let (lc, lv) = left.row(a);
        for b in 0..q {
            let (rc, rv) = right.row(b);
            for (&c, &x) in lc.iter().zip(&lv) {
                for (&d, &y) in rc.iter().zip(&rv) {
                    cols.push(c * q + d);
                    values.push(x * y);
                }
            }
            row_ptr.push(cols.len());
        }
    }
    Ok(SparseBandMatrix {
        n_rows: n,
        n_cols: n,
        row_ptr,
        cols,
        values,
        order: None,
        stencil_width: None,
    })
}
