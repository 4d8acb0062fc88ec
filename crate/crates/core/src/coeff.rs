//! The coefficient ring abstraction shared by matrices, z-series and operators.

use std::fmt;

use crate::scalar::Scalar;
use crate::xseries::XSeries;

/// Location and value of the first nonzero coefficient of a residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub x_degree: usize,
    /// Time monomial as `t11^2*t12`, or `None` for x-only coefficients.
    pub t_monomial: Option<String>,
    pub value: Scalar,
}

/// How far a value is known to be correct: the highest verified x-degree
/// (`-1` when nothing is known) and, for time polynomials, the highest
/// verified total time degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reach {
    pub x: i64,
    pub t: Option<i64>,
}

impl Reach {
    pub fn meet(self, other: Reach) -> Reach {
        Reach {
            x: self.x.min(other.x),
            t: match (self.t, other.t) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        self.x < 0 || self.t.map_or(false, |t| t < 0)
    }
}

/// Ring operations on a coefficient that carries its own truncation context.
///
/// Binary operations assume both operands share that context (same `N_x`,
/// same time truncation); mixing contexts is a programming error and panics.
pub trait Coeff: Clone + fmt::Debug + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, s: &Scalar) -> Self;

    /// Zero with no truncation loss.
    fn is_exact_zero(&self) -> bool;

    /// Whether this is exactly the unit.
    fn is_exact_one(&self) -> bool;

    /// First nonzero coefficient among those that are known.
    fn first_nonzero(&self) -> Option<Term>;

    fn reach(&self) -> Reach;

    /// Applies an x-series map (dilation, q-derivative, ...) to every x-coefficient.
    fn map_x(&self, f: &dyn Fn(&XSeries) -> XSeries) -> Self;

    fn constant_like(&self, s: &Scalar) -> Self {
        self.one_like().scale(s)
    }

    fn is_zero_known(&self) -> bool {
        self.first_nonzero().is_none()
    }
}
