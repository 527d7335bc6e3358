//! Independent checks for the floating-point kernels.
//!
//! [`RationalStencilOracle`] recomputes stencil weights in exact rational
//! arithmetic, forming `a_i / a_m` from the plain products. It shares no code
//! with [`crate::stencil`]. [`quotient_comparison`] measures the sorted
//! quotient scheme against the naive one, and [`convergence_order`] fits an
//! observed order of accuracy over a family of meshes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::assembly::assemble;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::stencil::{stable_quotients, Stencil};

/// Default cap on oracle stencil size.
pub const ORACLE_MAX_POINTS: usize = 12;

/// Errors below this are treated as exact reproduction in convergence fits.
pub const CONVERGENCE_FLOOR: f64 = 1e-14;

/// Multiple of `eps * max_i sum_j |D_ij f_j|` below which an error is
/// indistinguishable from the rounding of the matrix-vector product.
pub const ROUNDING_SAFETY: f64 = 16.0;

/// Exact value of a finite double.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Nearest double to an exact rational.
pub fn nearest(x: &BigRational) -> f64 {
    x.to_f64().expect("rational converts to f64")
}

/// Exact-arithmetic Lagrange differentiation on a small stencil.
#[derive(Debug, Clone)]
pub struct RationalStencilOracle {
    points: Vec<BigRational>,
}

impl RationalStencilOracle {
    /// Accepts up to [`ORACLE_MAX_POINTS`] pairwise distinct points.
    pub fn new(points: Vec<BigRational>) -> Result<Self> {
        Self::with_limit(points, ORACLE_MAX_POINTS)
    }

    /// As [`new`](Self::new) with a caller-chosen size cap.
    pub fn with_limit(points: Vec<BigRational>, limit: usize) -> Result<Self> {
        if points.len() > limit {
            return Err(Error::TooLarge {
                width: points.len(),
                limit,
            });
        }
        if points.len() < 2 {
            return Err(Error::InvalidStencil(format!(
                "a stencil needs at least 2 points, got {}",
                points.len()
            )));
        }
        for (j, p) in points.iter().enumerate() {
            if points[..j].contains(p) {
                return Err(Error::InvalidStencil(format!(
                    "point {j} duplicates an earlier point"
                )));
            }
        }
        Ok(Self { points })
    }

    /// Oracle on the exact values of the given doubles.
    pub fn from_f64(points: &[f64], limit: usize) -> Result<Self> {
        if let Some(k) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidStencil(format!("point {k} is not finite")));
        }
        Self::with_limit(points.iter().map(|&x| exact(x)).collect(), limit)
    }

    pub fn points(&self) -> &[BigRational] {
        &self.points
    }

    /// `a_m = Π_{k != m} (x_m - x_k)`.
    pub fn node_product(&self, m: usize) -> BigRational {
        let xm = &self.points[m];
        self.points
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != m)
            .fold(BigRational::one(), |acc, (_, xk)| acc * (xm - xk))
    }

    /// `a_i / a_m` for every `m`.
    pub fn quotients(&self, eval_index: usize) -> Vec<BigRational> {
        let ai = self.node_product(eval_index);
        (0..self.points.len())
            .map(|m| &ai / self.node_product(m))
            .collect()
    }

    /// Exact weight rows of orders `1..=max_order` at `eval_index` (0-based).
    pub fn rows(&self, eval_index: usize, max_order: usize) -> Result<Vec<Vec<BigRational>>> {
        let width = self.points.len();
        if eval_index >= width {
            return Err(Error::InvalidStencil(format!(
                "evaluation index {eval_index} out of range for {width} points"
            )));
        }
        if max_order >= width {
            return Err(Error::OrderTooHigh {
                order: max_order,
                width,
            });
        }
        let i = eval_index;
        let quotients = self.quotients(i);
        let mut previous: Vec<BigRational> = (0..width)
            .map(|m| if m == i { BigRational::one() } else { BigRational::zero() })
            .collect();
        let mut rows = Vec::with_capacity(max_order);
        for order in 1..=max_order {
            let s = BigRational::from_integer(BigInt::from(order));
            let mut row = vec![BigRational::zero(); width];
            let mut sum = BigRational::zero();
            for m in (0..width).filter(|&m| m != i) {
                let gap = &self.points[i] - &self.points[m];
                let w = &s / gap * (&quotients[m] * &previous[i] - &previous[m]);
                sum += &w;
                row[m] = w;
            }
            row[i] = -sum;
            rows.push(row.clone());
            previous = row;
        }
        Ok(rows)
    }
}

/// Exact rows for `points` (at most [`ORACLE_MAX_POINTS`]).
pub fn oracle_rows(
    points: &[BigRational],
    eval_index: usize,
    max_order: usize,
) -> Result<Vec<Vec<BigRational>>> {
    RationalStencilOracle::new(points.to_vec())?.rows(eval_index, max_order)
}

/// Rounds every entry to the nearest double.
pub fn rows_to_f64(rows: &[Vec<BigRational>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| row.iter().map(nearest).collect())
        .collect()
}

/// `a_i / a_m` from two separately accumulated products and one division.
pub fn naive_quotients(points: &[f64], eval_index: usize) -> Vec<f64> {
    let product = |m: usize| {
        points
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != m)
            .fold(1.0, |acc, (_, &xk)| acc * (points[m] - xk))
    };
    let ai = product(eval_index);
    (0..points.len())
        .map(|m| if m == eval_index { 1.0 } else { ai / product(m) })
        .collect()
}

/// Relative errors of the two quotient schemes for one `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientErrors {
    pub m: usize,
    pub exact: f64,
    pub sorted: f64,
    pub naive: f64,
    pub sorted_rel_err: f64,
    pub naive_rel_err: f64,
}

fn relative_error(approx: f64, truth: &BigRational) -> f64 {
    if !approx.is_finite() {
        return f64::INFINITY;
    }
    let diff = (exact(approx) - truth).abs();
    nearest(&(diff / truth.abs()))
}

/// Compares the sorted-factor quotients with naive products against exact
/// values, for every `m != eval_index`.
pub fn quotient_comparison(stencil: &Stencil<'_>, eval_index: usize) -> Result<Vec<QuotientErrors>> {
    let sorted = stable_quotients(stencil, eval_index)?;
    let naive = naive_quotients(stencil.points(), eval_index);
    let oracle = RationalStencilOracle::from_f64(stencil.points(), usize::MAX)?;
    let truth = oracle.quotients(eval_index);
    Ok((0..stencil.width())
        .filter(|&m| m != eval_index)
        .map(|m| QuotientErrors {
            m,
            exact: nearest(&truth[m]),
            sorted: sorted.values()[m],
            naive: naive[m],
            sorted_rel_err: relative_error(sorted.values()[m], &truth[m]),
            naive_rel_err: relative_error(naive[m], &truth[m]),
        })
        .collect())
}

/// Stencil width for a study: fixed, or the whole mesh at every resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilWidth {
    Fixed(usize),
    Full,
}

impl StencilWidth {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            StencilWidth::Fixed(m) => m,
            StencilWidth::Full => n,
        }
    }
}

/// Max-norm derivative errors over a sequence of resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub resolutions: Vec<usize>,
    /// `(b - a) / (N - 1)` for each resolution, also for non-uniform meshes.
    pub spacings: Vec<f64>,
    pub errors: Vec<f64>,
    /// Rounding level of each measurement; errors at or below it are
    /// saturated and excluded from the fit.
    pub rounding_levels: Vec<f64>,
    /// Set when some mesh in the family has unequal gaps, so `h` is only a
    /// nominal scale.
    pub nonuniform: bool,
}

/// An [`ErrorTable`] together with its least-squares order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub table: ErrorTable,
    /// Slope of `ln(error)` against `ln(h)`.
    pub fitted_order: f64,
}

/// Applies `D_order` to samples of `f` on each mesh of the family and records
/// the max-norm error against `exact_derivative`.
pub fn measure_errors(
    f: impl Fn(f64) -> f64,
    exact_derivative: impl Fn(f64) -> f64,
    mesh_family: impl Fn(usize) -> Result<Mesh>,
    width: StencilWidth,
    order: usize,
    resolutions: &[usize],
) -> Result<ErrorTable> {
    if resolutions.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "a convergence study needs at least 2 resolutions, got {}",
            resolutions.len()
        )));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "resolutions must be strictly increasing".to_string(),
        ));
    }
    let mut table = ErrorTable {
        resolutions: resolutions.to_vec(),
        spacings: Vec::with_capacity(resolutions.len()),
        errors: Vec::with_capacity(resolutions.len()),
        rounding_levels: Vec::with_capacity(resolutions.len()),
        nonuniform: false,
    };
    for &n in resolutions {
        let mesh = mesh_family(n)?;
        let set = assemble(&mesh, width.resolve(mesh.len()), order)?;
        let samples: Vec<f64> = mesh.points().iter().map(|&x| f(x)).collect();
        let d = set.matrix(order);
        let approx = d.apply(&samples)?;
        let magnitude = (0..d.n_rows())
            .map(|i| {
                let (cols, vals) = d.row(i);
                cols.iter().zip(vals).map(|(&j, w)| (w * samples[j]).abs()).sum::<f64>()
            })
            .fold(0.0_f64, f64::max);
        let error = mesh
            .points()
            .iter()
            .zip(&approx)
            .map(|(&x, &d)| (d - exact_derivative(x)).abs())
            .fold(0.0_f64, f64::max);
        let (a, b) = mesh.domain();
        let (lo, hi) = mesh.spacing_range();
        table.nonuniform |= hi - lo > 1e-12 * hi;
        table.spacings.push((b - a) / (mesh.len() - 1) as f64);
        table.errors.push(error);
        table.rounding_levels.push(ROUNDING_SAFETY * f64::EPSILON * magnitude);
    }
    Ok(table)
}

impl ErrorTable {
    /// Whether measurement `k` is at the rounding floor: below
    /// [`CONVERGENCE_FLOOR`] or not above its own rounding level.
    pub fn is_saturated(&self, k: usize) -> bool {
        let e = self.errors[k];
        e < CONVERGENCE_FLOOR || self.rounding_levels.get(k).is_some_and(|&r| e <= r)
    }
}

/// Least-squares slope of `ln(error)` against `ln(h)` over the unsaturated
/// measurements.
pub fn fit_order(table: &ErrorTable) -> Result<f64> {
    let pts: Vec<(f64, f64)> = (0..table.errors.len())
        .filter(|&k| !table.is_saturated(k))
        .map(|k| (table.spacings[k].ln(), table.errors[k].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit {
            floor: CONVERGENCE_FLOOR,
        });
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Measures errors over `resolutions` and fits the observed order.
pub fn convergence_order(
    f: impl Fn(f64) -> f64,
    exact_derivative: impl Fn(f64) -> f64,
    mesh_family: impl Fn(usize) -> Result<Mesh>,
    width: StencilWidth,
    order: usize,
    resolutions: &[usize],
) -> Result<ConvergenceReport> {
    let table = measure_errors(f, exact_derivative, mesh_family, width, order, resolutions)?;
    let fitted_order = fit_order(&table)?;
    Ok(ConvergenceReport {
        table,
        fitted_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{uniform, MeshKind};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&k| q(k, 1)).collect()
    }

    #[test]
    fn exact_three_point_rows() {
        let rows = oracle_rows(&ints(&[0, 1, 2]), 1, 2).unwrap();
        assert_eq!(rows[0], vec![q(-1, 2), q(0, 1), q(1, 2)]);
        assert_eq!(rows[1], ints(&[1, -2, 1]));

        let rows = oracle_rows(&ints(&[0, 1]), 0, 1).unwrap();
        assert_eq!(rows[0], ints(&[-1, 1]));

        let rows = oracle_rows(&ints(&[0, 1, 3]), 0, 1).unwrap();
        assert_eq!(rows[0], vec![q(-4, 3), q(3, 2), q(-1, 6)]);
    }

    #[test]
    fn node_products() {
        let o = RationalStencilOracle::new(ints(&[0, 1, 3])).unwrap();
        assert_eq!(o.node_product(0), q(3, 1));
        assert_eq!(o.node_product(1), q(-2, 1));
        assert_eq!(o.node_product(2), q(6, 1));
    }

    #[test]
    fn oracle_guards() {
        let pts: Vec<BigRational> = (0..13).map(|k| q(k, 1)).collect();
        assert_eq!(
            RationalStencilOracle::new(pts.clone()).unwrap_err(),
            Error::TooLarge { width: 13, limit: 12 }
        );
        assert!(RationalStencilOracle::with_limit(pts, 13).is_ok());
        assert!(matches!(
            oracle_rows(&ints(&[0, 1, 1]), 0, 1),
            Err(Error::InvalidStencil(_))
        ));
        assert_eq!(
            oracle_rows(&ints(&[0, 1, 2]), 0, 3).unwrap_err(),
            Error::OrderTooHigh { order: 3, width: 3 }
        );
    }

    /// Monomials of degree below the stencil size are differentiated exactly.
    #[test]
    fn oracle_reproduces_monomials_exactly() {
        let pts = vec![q(-3, 2), q(-1, 3), q(0, 1), q(2, 7), q(5, 4), q(9, 5)];
        let o = RationalStencilOracle::new(pts.clone()).unwrap();
        let width = pts.len();
        for i in 0..width {
            let rows = o.rows(i, width - 1).unwrap();
            for (s_minus, row) in rows.iter().enumerate() {
                let s = s_minus + 1;
                for r in 0..width {
                    let applied = row
                        .iter()
                        .zip(&pts)
                        .fold(BigRational::zero(), |acc, (w, x)| acc + w * num_traits::pow(x.clone(), r));
                    let expected = if r < s {
                        BigRational::zero()
                    } else {
                        let falling: i64 = ((r - s + 1)..=r).map(|k| k as i64).product();
                        q(falling, 1) * num_traits::pow(pts[i].clone(), r - s)
                    };
                    assert_eq!(applied, expected, "i={i} s={s} r={r}");
                }
            }
        }
    }

    #[test]
    fn quotient_comparison_small_integers() {
        let pts = [0.0, 1.0, 2.0];
        for i in 0..3 {
            let st = Stencil::new(&pts, i).unwrap();
            for e in quotient_comparison(&st, i).unwrap() {
                assert_eq!(e.sorted_rel_err, 0.0);
                assert_eq!(e.naive_rel_err, 0.0);
            }
        }
    }

    #[test]
    fn quotient_comparison_near_equal_gaps_is_finite() {
        let pts = [0.0, 1.0, 2.0, 2.0 + 1e-9, 3.0 + 1e-9, 4.0];
        for i in 0..pts.len() {
            let st = Stencil::new(&pts, i).unwrap();
            for e in quotient_comparison(&st, i).unwrap() {
                assert!(e.sorted.is_finite() && e.sorted != 0.0);
                assert!(e.sorted_rel_err < 1e-14, "{e:?}");
            }
        }
    }

    #[test]
    fn degenerate_fit_on_reproduced_polynomials() {
        let err = convergence_order(
            |x| 3.0 * x - 1.0,
            |_| 3.0,
            |n| uniform(n, -1.0, 1.0),
            StencilWidth::Fixed(3),
            1,
            &[17, 33, 65],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateFit { .. }));
    }

    #[test]
    fn fit_recovers_a_power_law() {
        let table = ErrorTable {
            resolutions: vec![11, 21, 41],
            spacings: vec![0.1, 0.05, 0.025],
            errors: vec![3e-3, 3e-3 / 8.0, 3e-3 / 64.0],
            rounding_levels: vec![1e-15; 3],
            nonuniform: false,
        };
        assert!((fit_order(&table).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn study_rejects_bad_resolutions() {
        let run = |res: &[usize]| {
            measure_errors(f64::exp, f64::exp, |n| uniform(n, -1.0, 1.0), StencilWidth::Fixed(3), 1, res)
        };
        assert!(matches!(run(&[17]), Err(Error::InvalidInput(_))));
        assert!(matches!(run(&[33, 17]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn nonuniform_family_is_flagged() {
        let t = measure_errors(
            f64::sin,
            f64::cos,
            |n| MeshKind::Chebyshev.generate(n, -1.0, 1.0),
            StencilWidth::Fixed(5),
            1,
            &[17, 33],
        )
        .unwrap();
        assert!(t.nonuniform);
    }
}
