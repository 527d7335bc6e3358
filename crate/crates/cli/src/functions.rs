//! Built-in test functions for convergence studies.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

/// A smooth function with closed-form derivatives of every order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    Exp,
    Sin,
    /// `1 / (1 + 25 x²)`.
    Runge,
    /// `x^d`.
    Poly(u32),
}

impl TestFunction {
    pub fn value(self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// The `order`-th derivative at `x`.
    pub fn derivative(self, order: usize, x: f64) -> f64 {
        match self {
            TestFunction::Exp => x.exp(),
            TestFunction::Sin => match order % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            },
            // 1/(1 + 25x²) = Re 1/(1 + 5ix), whose s-th derivative is
            // (-1)^s s! (5i)^s (1 + 5ix)^-(s+1).
            TestFunction::Runge => {
                let five_i = Complex64::new(0.0, 5.0);
                let base = Complex64::new(1.0, 0.0) + five_i * x;
                let factorial: f64 = (1..=order).map(|k| k as f64).product();
                let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                let exponent = i32::try_from(order + 1).expect("derivative order fits in i32");
                (five_i.powi(order as i32) * base.powi(-exponent) * (sign * factorial)).re
            }
            TestFunction::Poly(degree) => {
                let degree = degree as usize;
                if order > degree {
                    return 0.0;
                }
                let falling: f64 = ((degree - order + 1)..=degree).map(|k| k as f64).product();
                falling * x.powi((degree - order) as i32)
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Exp => f.write_str("exp"),
            TestFunction::Sin => f.write_str("sin"),
            TestFunction::Runge => f.write_str("runge"),
            TestFunction::Poly(d) => write!(f, "poly{d}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp" => Ok(TestFunction::Exp),
            "sin" => Ok(TestFunction::Sin),
            "runge" => Ok(TestFunction::Runge),
            _ => s
                .strip_prefix("poly")
                .and_then(|d| d.parse().ok())
                .map(TestFunction::Poly)
                .ok_or_else(|| format!("unknown function '{s}', expected exp, sin, runge or poly<degree>")),
        }
    }
}
