//! Invariants of the single-stencil kernel, checked on generated stencils.

use diffmat::stencil::{off_diagonal_sum, stable_quotients, stencil_rows, Stencil};
use diffmat::verify::{naive_quotients, nearest, RationalStencilOracle};
use proptest::prelude::*;

/// Strictly increasing points with gaps in [0.05, 1] starting in [-5, 5].
fn stencil_points(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    gapped_points(max_len, 0.05)
}

/// As [`stencil_points`] with gaps in [min_gap, 1].
fn gapped_points(max_len: usize, min_gap: f64) -> impl Strategy<Value = Vec<f64>> {
    (-5.0..5.0_f64, prop::collection::vec(min_gap..1.0_f64, 1..max_len)).prop_map(|(start, gaps)| {
        let mut pts = vec![start];
        for g in gaps {
            let next = pts[pts.len() - 1] + g;
            pts.push(next);
        }
        pts
    })
}

/// Points on the 1/64 grid in [-4, 4], sorted and distinct.
fn dyadic_points(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(-256_i32..=256, 2..=max_len)
        .prop_map(|set| set.into_iter().map(|k| f64::from(k) / 64.0).collect())
}

fn ulp(x: f64) -> f64 {
    let a = x.abs();
    f64::from_bits(a.to_bits() + 1) - a
}

/// Row 1-norm; the reference scale for relative comparisons of weight rows.
fn row_scale(row: &[f64]) -> f64 {
    row.iter().map(|w| w.abs()).sum()
}

fn falling(r: usize, s: usize) -> f64 {
    ((r - s + 1)..=r).map(|k| k as f64).product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn diagonal_is_exact_negated_sum(pts in stencil_points(10)) {
        let width = pts.len();
        for i in 0..width {
            let rows = stencil_rows(&Stencil::new(&pts, i).unwrap(), width - 1).unwrap();
            for row in rows.rows() {
                prop_assert_eq!(row[i].to_bits(), (-off_diagonal_sum(row, i)).to_bits());
            }
        }
    }

    #[test]
    fn reproduces_polynomials(pts in stencil_points(10)) {
        let width = pts.len();
        let max_abs = pts.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        for i in 0..width {
            let rows = stencil_rows(&Stencil::new(&pts, i).unwrap(), width - 1).unwrap();
            for s in 1..width {
                let row = rows.row(s);
                let norm1: f64 = row.iter().map(|w| w.abs()).sum();
                for r in 0..width - s {
                    let applied: f64 = row.iter().zip(&pts).map(|(w, x)| w * x.powi(r as i32)).sum();
                    let exact = if r < s { 0.0 } else { falling(r, s) * pts[i].powi((r - s) as i32) };
                    let tol = 1e-10 * norm1 * max_abs.powi(r as i32).max(1.0);
                    prop_assert!((applied - exact).abs() <= tol,
                        "i={} s={} r={} applied={} exact={}", i, s, r, applied, exact);
                }
            }
        }
    }

    #[test]
    fn translation_invariance(pts in gapped_points(9, 0.5), shift in -1.0..1.0_f64) {
        let width = pts.len();
        let moved: Vec<f64> = pts.iter().map(|x| x + shift).collect();
        for i in 0..width {
            let order = (width - 1).min(3);
            let a = stencil_rows(&Stencil::new(&pts, i).unwrap(), order).unwrap();
            let b = stencil_rows(&Stencil::new(&moved, i).unwrap(), order).unwrap();
            for (ra, rb) in a.rows().zip(b.rows()) {
                let scale = row_scale(ra);
                for (x, y) in ra.iter().zip(rb) {
                    prop_assert!((x - y).abs() <= 1e-13 * scale, "{} vs {}", x, y);
                }
            }
        }
    }

    #[test]
    fn dyadic_translation_is_bit_exact(pts in dyadic_points(9), shift in -64_i32..64) {
        let shift = f64::from(shift) / 8.0;
        let moved: Vec<f64> = pts.iter().map(|x| x + shift).collect();
        let width = pts.len();
        for i in 0..width {
            let a = stencil_rows(&Stencil::new(&pts, i).unwrap(), width - 1).unwrap();
            let b = stencil_rows(&Stencil::new(&moved, i).unwrap(), width - 1).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn scaling_covariance(pts in gapped_points(9, 0.5), lambda in 0.1..10.0_f64) {
        let width = pts.len();
        let scaled: Vec<f64> = pts.iter().map(|x| lambda * x).collect();
        for i in 0..width {
            let order = (width - 1).min(3);
            let a = stencil_rows(&Stencil::new(&pts, i).unwrap(), order).unwrap();
            let b = stencil_rows(&Stencil::new(&scaled, i).unwrap(), order).unwrap();
            for (s, (ra, rb)) in a.rows().zip(b.rows()).enumerate() {
                let factor = lambda.powi(-(s as i32 + 1));
                let scale = row_scale(ra) * factor;
                for (x, y) in ra.iter().zip(rb) {
                    prop_assert!((x * factor - y).abs() <= 1e-12 * scale, "{} vs {}", x * factor, y);
                }
            }
        }
    }

    #[test]
    fn quotient_signs_match_direct_products(pts in dyadic_points(12)) {
        for i in 0..pts.len() {
            let sorted = stable_quotients(&Stencil::new(&pts, i).unwrap(), i).unwrap();
            let naive = naive_quotients(&pts, i);
            for (a, b) in sorted.values().iter().zip(&naive) {
                prop_assert_eq!(a.is_sign_negative(), b.is_sign_negative());
            }
        }
    }

    #[test]
    fn quotients_within_rounding_of_exact(pts in dyadic_points(12)) {
        let width = pts.len();
        let oracle = RationalStencilOracle::from_f64(&pts, 12).unwrap();
        for i in 0..width {
            let q = stable_quotients(&Stencil::new(&pts, i).unwrap(), i).unwrap();
            prop_assert_eq!(q.values()[i], 1.0);
            for (got, exact) in q.values().iter().zip(oracle.quotients(i)) {
                let exact = nearest(&exact);
                let ulps = (got - exact).abs() / ulp(exact);
                prop_assert!(ulps <= (width - 1) as f64, "{} vs {} ({} ulp)", got, exact, ulps);
            }
        }
    }
}

#[test]
fn quotients_exact_on_small_integer_stencils() {
    let stencils: [&[f64]; 3] = [
        &[0.0, 1.0, 2.0],
        &[0.0, 1.0, 3.0],
        &[-2.0, -1.0, 0.0, 1.0, 2.0],
    ];
    for pts in stencils {
        let oracle = RationalStencilOracle::from_f64(pts, 12).unwrap();
        for i in 0..pts.len() {
            let q = stable_quotients(&Stencil::new(pts, i).unwrap(), i).unwrap();
            let exact: Vec<f64> = oracle.quotients(i).iter().map(nearest).collect();
            assert_eq!(q.values(), exact.as_slice(), "{pts:?} i={i}");
        }
    }
}

/// First-derivative off-diagonal weights carry at most one rounding per
/// quotient factor pair plus the final division.
#[test]
fn first_order_off_diagonals_are_accurate() {
    let pts = [-1.0, -0.8125, -0.25, 0.015625, 0.5, 0.5625, 1.75, 3.0, 3.125];
    let oracle = RationalStencilOracle::from_f64(&pts, 12).unwrap();
    for i in 0..pts.len() {
        let rows = stencil_rows(&Stencil::new(&pts, i).unwrap(), 1).unwrap();
        let exact = oracle.rows(i, 1).unwrap();
        for m in (0..pts.len()).filter(|&m| m != i) {
            let e = nearest(&exact[0][m]);
            let ulps = (rows.row(1)[m] - e).abs() / ulp(e);
            assert!(ulps <= 2.0 * pts.len() as f64, "i={i} m={m}: {ulps} ulp");
        }
    }
}
