//! Differentiation weights on a single stencil.
//!
//! For a stencil of `M` points and an evaluation point `x̄_i` of that stencil,
//! the weights `D̄_s(i, m) = L_m^{(s)}(x̄_i)` of the Lagrange basis are built
//! order by order from the identity row `D̄_0(i, m) = δ_im`:
//!
//! ```text
//! D̄_s(i, m) = s / (x̄_i - x̄_m) * ( (a_i / a_m) D̄_{s-1}(i, i) - D̄_{s-1}(i, m) )   m != i
//! D̄_s(i, i) = - Σ_{m != i} D̄_s(i, m)
//! ```
//!
//! where `a_m = Π_{k != m} (x̄_m - x̄_k)`. The ratios `a_i / a_m` are never
//! formed from the two products directly; see [`stable_quotients`].
//!
//! Indices in this module are 0-based.

use crate::error::{Error, Result};

/// Points closer than this many machine epsilons (relative to the largest
/// coordinate magnitude) are rejected as duplicates.
pub const DUPLICATE_TOLERANCE_EPS: f64 = 4.0;

/// A strictly increasing run of points together with the index of the point
/// at which derivatives are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil<'a> {
    points: &'a [f64],
    eval_index: usize,
}

impl<'a> Stencil<'a> {
    /// Validates `points` and `eval_index` (0-based).
    pub fn new(points: &'a [f64], eval_index: usize) -> Result<Self> {
        let width = points.len();
        if width < 2 {
            return Err(Error::InvalidStencil(format!(
                "a stencil needs at least 2 points, got {width}"
            )));
        }
        if eval_index >= width {
            return Err(Error::InvalidStencil(format!(
                "evaluation index {eval_index} out of range for {width} points"
            )));
        }
        if let Some(k) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidStencil(format!("point {k} is not finite")));
        }
        let scale = points.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        let min_gap = DUPLICATE_TOLERANCE_EPS * f64::EPSILON * scale;
        for (k, pair) in points.windows(2).enumerate() {
            let gap = pair[1] - pair[0];
            if gap <= 0.0 {
                return Err(Error::InvalidStencil(format!(
                    "points {k} and {} are not strictly increasing",
                    k + 1
                )));
            }
            if gap <= min_gap {
                return Err(Error::InvalidStencil(format!(
                    "points {k} and {} are numerically coincident (gap {gap:e})",
                    k + 1
                )));
            }
        }
        Ok(Self { points, eval_index })
    }

    pub fn points(&self) -> &'a [f64] {
        self.points
    }

    pub fn width(&self) -> usize {
        self.points.len()
    }

    pub fn eval_index(&self) -> usize {
        self.eval_index
    }
}

/// The factors of `a_index` with the zero self-distance replaced by 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorVector {
    factors: Vec<f64>,
    negative_count: usize,
}

impl FactorVector {
    /// Entry `k` is `x̄_index - x̄_k`, except entry `index` which is exactly 1.
    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    /// Absolute values of the factors in ascending order. Equal magnitudes
    /// keep their original relative order.
    pub fn sorted_magnitudes(&self) -> Vec<f64> {
        let mut mags: Vec<f64> = self.factors.iter().map(|f| f.abs()).collect();
        mags.sort_by(f64::total_cmp);
        mags
    }
}

/// Builds the factor vector of stencil point `index` (0-based).
pub fn build_factor_vector(stencil: &Stencil<'_>, index: usize) -> Result<FactorVector> {
    let points = stencil.points();
    if index >= points.len() {
        return Err(Error::InvalidStencil(format!(
            "factor index {index} out of range for {} points",
            points.len()
        )));
    }
    let anchor = points[index];
    let factors: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(k, &x)| if k == index { 1.0 } else { anchor - x })
        .collect();
    if let Some(k) = factors.iter().position(|&f| f == 0.0) {
        return Err(Error::InvalidStencil(format!(
            "points {index} and {k} coincide"
        )));
    }
    let negative_count = factors.iter().filter(|&&f| f < 0.0).count();
    Ok(FactorVector {
        factors,
        negative_count,
    })
}

/// The ratios `a_i / a_m` for a fixed evaluation index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientVector {
    values: Vec<f64>,
}

impl QuotientVector {
    /// Entry `m` is `a_i / a_m`; entry `i` is exactly 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Computes `a_i / a_m` for every `m`, pairing the factors of `a_i` and `a_m`
/// by rank of magnitude so that each partial quotient is of order one.
///
/// Both factor vectors have their magnitudes sorted ascending, the two sorted
/// vectors are divided elementwise and the quotients multiplied in ascending
/// order. The sign is the parity of the difference in negative counts.
pub fn stable_quotients(stencil: &Stencil<'_>, eval_index: usize) -> Result<QuotientVector> {
    let own = build_factor_vector(stencil, eval_index)?;
    let own_sorted = own.sorted_magnitudes();
    let mut values = vec![1.0; stencil.width()];
    for (m, value) in values.iter_mut().enumerate() {
        if m == eval_index {
            continue;
        }
        let other = build_factor_vector(stencil, m)?;
        let other_sorted = other.sorted_magnitudes();
        let magnitude = own_sorted
            .iter()
            .zip(&other_sorted)
            .fold(1.0, |acc, (num, den)| acc * (num / den));
        let odd = own.negative_count().abs_diff(other.negative_count()) % 2 == 1;
        *value = if odd { -magnitude } else { magnitude };
    }
    Ok(QuotientVector { values })
}

/// Weight rows `D̄_1(i, ·) .. D̄_S(i, ·)` at the stencil's evaluation index.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilRows {
    rows: Vec<Vec<f64>>,
}

impl StencilRows {
    pub fn max_order(&self) -> usize {
        self.rows.len()
    }

    /// Weights of derivative order `order` (1-based). Panics if `order` is 0
    /// or above [`max_order`](Self::max_order).
    pub fn row(&self, order: usize) -> &[f64] {
        assert!(
            (1..=self.rows.len()).contains(&order),
            "derivative order {order} not in 1..={}",
            self.rows.len()
        );
        &self.rows[order - 1]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.iter().map(Vec::as_slice)
    }
}

/// Computes the weight rows of orders `1..=max_order` at the stencil's
/// evaluation index.
pub fn stencil_rows(stencil: &Stencil<'_>, max_order: usize) -> Result<StencilRows> {
    let width = stencil.width();
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

    let i = stencil.eval_index();
    let points = stencil.points();
    let quotients = stable_quotients(stencil, i)?;
    let quotients = quotients.values();

    let mut previous = vec![0.0; width];
    previous[i] = 1.0;
    let mut rows = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let s = order as f64;
        let mut row = vec![0.0; width];
        let prev_diag = previous[i];
        let mut off_sum = 0.0;
        for m in 0..width {
            if m == i {
                continue;
            }
            let w = s / (points[i] - points[m]) * (quotients[m] * prev_diag - previous[m]);
            row[m] = w;
            off_sum += w;
        }
        row[i] = -off_sum;
        rows.push(row.clone());
        previous = row;
    }
    Ok(StencilRows { rows })
}

/// Sum of the off-diagonal entries of `row` in ascending column order,
/// skipping `diag`. The diagonal of every row produced here is exactly the
/// negation of this value.
pub fn off_diagonal_sum(row: &[f64], diag: usize) -> f64 {
    row.iter()
        .enumerate()
        .filter(|&(m, _)| m != diag)
        .fold(0.0, |acc, (_, &w)| acc + w)
}
