//! One-dimensional meshes and the canonical point distributions.
//!
//! All meshes are stored in ascending order. Reference Chebyshev matrices in
//! the literature are usually written for descending nodes; comparing against
//! them requires reversing both rows and columns.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Newton iterations allowed per Legendre-Gauss-Lobatto node.
pub const LGL_MAX_ITERATIONS: usize = 100;

/// Newton step size below which an LGL node is considered converged.
pub const LGL_STEP_TOLERANCE: f64 = 1e-15;

/// A strictly increasing, finite set of at least two coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    points: Vec<f64>,
}

impl Mesh {
    /// Validates `points` without reordering them.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFew(points.len()));
        }
        if let Some(k) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { position: k + 1 });
        }
        if let Some(k) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotIncreasing { position: k + 2 });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; a valid mesh has at least two points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(first, last)` point.
    pub fn domain(&self) -> (f64, f64) {
        (self.points[0], self.points[self.points.len() - 1])
    }

    /// Smallest and largest gap between neighbouring points.
    pub fn spacing_range(&self) -> (f64, f64) {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), h| (lo.min(h), hi.max(h)))
    }

    pub fn into_points(self) -> Vec<f64> {
        self.points
    }
}

impl AsRef<[f64]> for Mesh {
    fn as_ref(&self) -> &[f64] {
        &self.points
    }
}

/// Point distributions the generators know how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeshKind {
    Uniform,
    Chebyshev,
    Legendre,
}

impl MeshKind {
    pub fn generate(self, n: usize, a: f64, b: f64) -> Result<Mesh> {
        match self {
            MeshKind::Uniform => uniform(n, a, b),
            MeshKind::Chebyshev => chebyshev_gauss_lobatto(n, a, b),
            MeshKind::Legendre => legendre_gauss_lobatto(n, a, b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeshKind::Uniform => "uniform",
            MeshKind::Chebyshev => "chebyshev",
            MeshKind::Legendre => "legendre",
        }
    }
}

fn check_request(n: usize, a: f64, b: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFew(n));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "interval bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a >= b {
        return Err(Error::EmptyInterval { a, b });
    }
    Ok(())
}

/// Maps reference coordinates in [-1, 1] onto [a, b] and pins the endpoints.
///
/// The map is `mid + half * t`, so an antisymmetric reference set stays
/// exactly antisymmetric when `a == -b`.
fn map_reference(reference: &[f64], a: f64, b: f64) -> Result<Mesh> {
    let mid = 0.5 * a + 0.5 * b;
    let half = 0.5 * b - 0.5 * a;
    let mut points: Vec<f64> = reference.iter().map(|&t| mid + half * t).collect();
    let last = points.len() - 1;
    points[0] = a;
    points[last] = b;
    Mesh::new(points)
}

/// `n` evenly spaced points from `a` to `b`.
pub fn uniform(n: usize, a: f64, b: f64) -> Result<Mesh> {
    check_request(n, a, b)?;
    let intervals = (n - 1) as f64;
    let reference: Vec<f64> = (0..n)
        .map(|j| (2.0 * j as f64 - intervals) / intervals)
        .collect();
    map_reference(&reference, a, b)
}

/// Chebyshev-Gauss-Lobatto points `cos(π (n - j) / (n - 1))`, `j = 1..n`,
/// mapped onto [a, b] in ascending order.
pub fn chebyshev_gauss_lobatto(n: usize, a: f64, b: f64) -> Result<Mesh> {
    check_request(n, a, b)?;
    map_reference(&chebyshev_reference(n), a, b)
}

/// Ascending CGL points on [-1, 1], evaluated as `sin(π (2j - n + 1) / (2(n - 1)))`
/// for `j = 0..n`, which is odd in `j` and therefore exactly antisymmetric.
fn chebyshev_reference(n: usize) -> Vec<f64> {
    let intervals = (n - 1) as f64;
    (0..n)
        .map(|j| {
            let k = 2.0 * j as f64 - intervals;
            (FRAC_PI_2 * k / intervals).sin()
        })
        .collect()
}

/// `P_k(x)` and `P_{k-1}(x)` by the three-term recurrence. Requires `k >= 1`.
fn legendre_pair(k: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut curr = x;
    for j in 1..k {
        let j = j as f64;
        let next = ((2.0 * j + 1.0) * x * curr - j * prev) / (j + 1.0);
        prev = curr;
        curr = next;
    }
    (curr, prev)
}

/// `P'_k(x)` from `(1 - x²) P'_k(x) = k (P_{k-1}(x) - x P_k(x))`, valid for
/// `|x| < 1`.
pub fn legendre_derivative(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let (p, p_prev) = legendre_pair(k, x);
    k as f64 * (p_prev - x * p) / (1.0 - x * x)
}

/// Legendre-Gauss-Lobatto points: ±1 and the roots of `P'_{n-1}`, mapped onto
/// [a, b] in ascending order.
///
/// Interior roots are found by Newton's method on `P'_{n-1}` started from the
/// Chebyshev-Gauss-Lobatto points, using the Legendre equation for the second
/// derivative. The converged set is symmetrized about the origin.
pub fn legendre_gauss_lobatto(n: usize, a: f64, b: f64) -> Result<Mesh> {
    check_request(n, a, b)?;
    let degree = n - 1;
    let kk1 = (degree * (degree + 1)) as f64;
    let mut nodes = chebyshev_reference(n);

    for (j, node) in nodes.iter_mut().enumerate().take(n - 1).skip(1) {
        let mut x = *node;
        let mut converged = false;
        for _ in 0..LGL_MAX_ITERATIONS {
            let (p, p_prev) = legendre_pair(degree, x);
            let one_minus = 1.0 - x * x;
            let dp = degree as f64 * (p_prev - x * p) / one_minus;
            let d2p = (2.0 * x * dp - kk1 * p) / one_minus;
            let step = dp / d2p;
            x -= step;
            if step.abs() <= LGL_STEP_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                node: j + 1,
                iterations: LGL_MAX_ITERATIONS,
            });
        }
        *node = x;
    }

    for j in 0..n / 2 {
        let mirror = n - 1 - j;
        let sym = 0.5 * (nodes[mirror] - nodes[j]);
        nodes[j] = -sym;
        nodes[mirror] = sym;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    map_reference(&nodes, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate() {
        assert_eq!(Mesh::new(vec![0.0, 0.5, 1.0]).unwrap().len(), 3);
        assert_eq!(
            Mesh::new(vec![0.0, 1.0, 1.0]),
            Err(Error::NotIncreasing { position: 3 })
        );
        assert_eq!(Mesh::new(vec![0.0]), Err(Error::TooFew(1)));
        assert_eq!(
            Mesh::new(vec![0.0, f64::INFINITY]),
            Err(Error::NonFinite { position: 2 })
        );
        assert_eq!(
            Mesh::new(vec![2.0, 1.0, 3.0]),
            Err(Error::NotIncreasing { position: 2 })
        );
    }

    #[test]
    fn uniform_points() {
        assert_eq!(uniform(3, 0.0, 1.0).unwrap().points(), &[0.0, 0.5, 1.0]);
        assert_eq!(uniform(2, -1.0, 1.0).unwrap().points(), &[-1.0, 1.0]);
        assert_eq!(
            uniform(5, 0.0, 2.0).unwrap().points(),
            &[0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!(uniform(1, 0.0, 1.0), Err(Error::TooFew(1)));
        assert!(matches!(
            uniform(3, 1.0, 1.0),
            Err(Error::EmptyInterval { .. })
        ));
    }

    #[test]
    fn chebyshev_points() {
        assert_eq!(
            chebyshev_gauss_lobatto(3, -1.0, 1.0).unwrap().points(),
            &[-1.0, 0.0, 1.0]
        );
        assert_eq!(
            chebyshev_gauss_lobatto(2, -1.0, 1.0).unwrap().points(),
            &[-1.0, 1.0]
        );
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let got = chebyshev_gauss_lobatto(5, -1.0, 1.0).unwrap();
        for (g, e) in got.points().iter().zip([-1.0, -h, 0.0, h, 1.0]) {
            assert!((g - e).abs() <= 1e-15, "{g} vs {e}");
        }
    }

    #[test]
    fn legendre_points() {
        assert_eq!(
            legendre_gauss_lobatto(3, -1.0, 1.0).unwrap().points(),
            &[-1.0, 0.0, 1.0]
        );
        assert_eq!(
            legendre_gauss_lobatto(2, -1.0, 1.0).unwrap().points(),
            &[-1.0, 1.0]
        );
        let r = 1.0 / 5.0_f64.sqrt();
        let got = legendre_gauss_lobatto(4, -1.0, 1.0).unwrap();
        for (g, e) in got.points().iter().zip([-1.0, -r, r, 1.0]) {
            assert!((g - e).abs() <= 1e-15, "{g} vs {e}");
        }
    }

    #[test]
    fn legendre_symmetry() {
        for n in 2..=64 {
            let mesh = legendre_gauss_lobatto(n, -1.0, 1.0).unwrap();
            let pts = mesh.points();
            for (j, &x) in pts.iter().enumerate() {
                assert_eq!(x, -pts[n - 1 - j]);
            }
        }
    }

    // |P'_{n-1}| at the nearest double to an LGL root grows like |P''| * ulp,
    // which passes 1e-12 near the endpoints from n = 32 on. The absolute bound
    // is checked where doubles can meet it; beyond that the node must sit
    // within a couple of ulps of the root.
    #[test]
    fn legendre_residual() {
        for n in 3..=64 {
            let degree = n - 1;
            let mesh = legendre_gauss_lobatto(n, -1.0, 1.0).unwrap();
            for &x in &mesh.points()[1..n - 1] {
                let dp = legendre_derivative(degree, x);
                if n <= 31 {
                    assert!(dp.abs() <= 1e-12, "n={n} x={x} residual={dp:e}");
                }
                let (p, _) = legendre_pair(degree, x);
                let d2p = (2.0 * x * dp - (degree * (degree + 1)) as f64 * p) / (1.0 - x * x);
                let offset = (dp / d2p).abs();
                assert!(offset <= 4.5e-16, "n={n} x={x} root offset={offset:e}");
            }
        }
    }

    #[test]
    fn affine_map_pins_endpoints() {
        for kind in [MeshKind::Uniform, MeshKind::Chebyshev, MeshKind::Legendre] {
            for &(a, b) in &[(0.1, 0.7), (-3.0, 11.0), (1e-3, 1.0)] {
                let m = kind.generate(9, a, b).unwrap();
                assert_eq!(m.domain(), (a, b));
            }
        }
    }
}
