//! The difference structure an operator algebra is built on: the q-shift
//! `D f(x) = f(qx)` with `D_q`, or the classical `q -> 1` case where `D` is
//! the identity and `D_q` becomes `d/dx`.

use num_traits::One;

use crate::coeff::Coeff;
use crate::scalar::{int, QParam, Scalar};
use crate::xseries::XSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum Difference {
    Q(QParam),
    Classical,
}

impl Difference {
    pub fn q(&self) -> Option<&QParam> {
        match self {
            Difference::Q(q) => Some(q),
            Difference::Classical => None,
        }
    }

    /// `q` as a scalar, `1` in the classical case.
    pub fn q_value(&self) -> Scalar {
        match self {
            Difference::Q(q) => q.value().clone(),
            Difference::Classical => Scalar::one(),
        }
    }

    /// The structure of `D_{1/q}`.
    pub fn inverse(&self) -> Difference {
        match self {
            Difference::Q(q) => Difference::Q(q.inverse()),
            Difference::Classical => Difference::Classical,
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, Difference::Classical)
    }

    /// Eigenvalue of `D` on `x^m`.
    pub fn shift_factor(&self, m: usize) -> Scalar {
        match self {
            Difference::Q(q) => q.pow(m as i64),
            Difference::Classical => Scalar::one(),
        }
    }

    /// Eigenvalue factor of the lowering derivation on `x^m`: `[m]_q` or `m`.
    pub fn number(&self, m: usize) -> Scalar {
        match self {
            Difference::Q(q) => q.number(m),
            Difference::Classical => int(m as i64),
        }
    }

    /// `D`.
    pub fn shift(&self, f: &XSeries) -> XSeries {
        match self {
            Difference::Q(q) => f.dilate(q.value()),
            Difference::Classical => f.clone(),
        }
    }

    /// `D^{-1}`.
    pub fn unshift(&self, f: &XSeries) -> XSeries {
        match self {
            Difference::Q(q) => f.dilate(&q.value().recip()),
            Difference::Classical => f.clone(),
        }
    }

    /// `D^k` for any integer `k`.
    pub fn shift_by(&self, f: &XSeries, k: i64) -> XSeries {
        match self {
            Difference::Q(q) => f.dilate(&q.pow(k)),
            Difference::Classical => f.clone(),
        }
    }

    /// `D_q`, or `d/dx`.
    pub fn derive(&self, f: &XSeries) -> XSeries {
        match self {
            Difference::Q(q) => f.q_derive(q),
            Difference::Classical => f.derive(),
        }
    }

    /// Right inverse of [`Difference::derive`] with zero constant term.
    pub fn antiderive(&self, f: &XSeries) -> XSeries {
        match self {
            Difference::Q(q) => f.q_antiderive(q),
            Difference::Classical => f.antiderive(),
        }
    }

    pub fn shift_all<C: Coeff>(&self, c: &C) -> C {
        match self {
            Difference::Q(_) => c.map_x(&|f| self.shift(f)),
            Difference::Classical => c.clone(),
        }
    }

    pub fn shift_all_by<C: Coeff>(&self, c: &C, k: i64) -> C {
        match self {
            Difference::Q(_) if k != 0 => c.map_x(&|f| self.shift_by(f, k)),
            _ => c.clone(),
        }
    }

    pub fn unshift_all<C: Coeff>(&self, c: &C) -> C {
        self.shift_all_by(c, -1)
    }

    pub fn derive_all<C: Coeff>(&self, c: &C) -> C {
        c.map_x(&|f| self.derive(f))
    }

    pub fn antiderive_all<C: Coeff>(&self, c: &C) -> C {
        c.map_x(&|f| self.antiderive(f))
    }
}
