//! Matrix-valued truncated Laurent series in the spectral parameter `z`.
//!
//! A series stores finitely many degrees. Two bounds govern truncation:
//! `floor` is the lowest degree ever stored, and `low` (when present) marks
//! the lowest degree whose coefficient is actually known; everything below
//! it was lost to truncation somewhere upstream. A series with `low = None`
//! is an exact Laurent polynomial.

use std::collections::BTreeMap;

use crate::coeff::{Coeff, Reach, Term};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::xseries::XSeries;

const NEG_INF: i64 = i64::MIN / 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ZSeries<C> {
    n: usize,
    proto: C,
    floor: i64,
    low: Option<i64>,
    terms: BTreeMap<i64, Matrix<C>>,
}

/// Carrier for dressing series, resolvents and flow generators.
pub type MZSeries = ZSeries<XSeries>;

/// A nonzero coefficient of a z-series residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTerm {
    pub z_degree: i64,
    pub row: usize,
    pub col: usize,
    pub term: Term,
}

impl<C: Coeff> ZSeries<C> {
    pub fn zero(proto: &C, n: usize, floor: i64) -> Self {
        ZSeries {
            n,
            proto: proto.zero_like(),
            floor,
            low: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(degree: i64, m: Matrix<C>, floor: i64) -> Self {
        let mut s = Self::zero(m.proto(), m.dim(), floor);
        s.terms.insert(degree, m);
        s.normalize();
        s
    }

    pub fn constant(m: Matrix<C>, floor: i64) -> Self {
        Self::monomial(0, m, floor)
    }

    pub fn identity(proto: &C, n: usize, floor: i64) -> Self {
        Self::constant(Matrix::identity(proto, n), floor)
    }

    /// Builds a series from explicit terms; `low` marks degrees below it unknown.
    pub fn from_terms(
        proto: &C,
        n: usize,
        terms: impl IntoIterator<Item = (i64, Matrix<C>)>,
        floor: i64,
        low: Option<i64>,
    ) -> Self {
        let mut s = Self::zero(proto, n, floor);
        for (d, m) in terms {
            assert_eq!(m.dim(), n, "matrix dimension mismatch");
            s.terms.insert(d, m);
        }
        s.low = low;
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let dropped = self
            .terms
            .range(..self.floor)
            .any(|(_, m)| !m.is_exact_zero());
        if dropped {
            self.low = Some(self.low.map_or(self.floor, |l| l.max(self.floor)));
        }
        if let Some(l) = self.low {
            if l < self.floor {
                self.low = Some(self.floor);
            }
        }
        let cut = self.known_low().max(self.floor);
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .filter(|(d, m)| *d >= cut && !m.is_exact_zero())
            .collect();
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn proto(&self) -> &C {
        &self.proto
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.low.is_none()
    }

    /// Lowest degree whose coefficient is known.
    pub fn known_low(&self) -> i64 {
        self.low.unwrap_or(NEG_INF)
    }

    /// Lowest known degree, or `None` for an exact Laurent polynomial.
    pub fn low(&self) -> Option<i64> {
        self.low
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Matrix<C>)> {
        self.terms.iter().map(|(d, m)| (*d, m))
    }

    pub fn top_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn bottom_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Highest degree that may carry a nonzero coefficient, known or not.
    fn upper(&self) -> Option<i64> {
        match (self.top_degree(), self.low) {
            (Some(t), Some(l)) => Some(t.max(l - 1)),
            (Some(t), None) => Some(t),
            (None, Some(l)) => Some(l - 1),
            (None, None) => None,
        }
    }

    pub fn zero_matrix(&self) -> Matrix<C> {
        Matrix::zeros(&self.proto, self.n)
    }

    /// Coefficient of `z^degree`; fails if that degree was lost to truncation.
    pub fn coeff(&self, degree: i64) -> Result<Matrix<C>> {
        if degree < self.known_low() {
            return Err(Error::InsufficientDepth {
                what: "z-coefficient".into(),
                needed: degree,
                known: self.known_low(),
            });
        }
        Ok(self
            .terms
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| self.zero_matrix()))
    }

    /// Coefficient of `z^degree`, zero when absent; does not check `low`.
    pub fn coeff_or_zero(&self, degree: i64) -> Matrix<C> {
        self.terms
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| self.zero_matrix())
    }

    /// `res_z`: the coefficient of `z^{-1}`.
    pub fn residue(&self) -> Result<Matrix<C>> {
        self.coeff(-1)
    }

    /// `(s)_+`: degrees `>= 0`.
    pub fn plus(&self) -> Self {
        let low = match self.low {
            Some(l) if l > 0 => Some(l),
            _ => None,
        };
        Self::from_terms(
            &self.proto,
            self.n,
            self.terms.range(0..).map(|(d, m)| (*d, m.clone())),
            self.floor,
            low,
        )
    }

    /// `(s)_-`: degrees `< 0`.
    pub fn minus(&self) -> Self {
        Self::from_terms(
            &self.proto,
            self.n,
            self.terms.range(..0).map(|(d, m)| (*d, m.clone())),
            self.floor,
            self.low,
        )
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_terms(
            &self.proto,
            self.n,
            self.terms.iter().map(|(d, m)| (d + k, m.clone())),
            self.floor,
            self.low.map(|l| l + k),
        )
    }

    /// Same series with a different storage floor.
    pub fn with_floor(&self, floor: i64) -> Self {
        let mut s = self.clone();
        s.floor = floor;
        s.normalize();
        s
    }

    /// Drops everything below `degree` and marks it unknown.
    pub fn truncate_below(&self, degree: i64) -> Self {
        let low = Some(self.low.map_or(degree, |l| l.max(degree)));
        Self::from_terms(
            &self.proto,
            self.n,
            self.terms.range(degree..).map(|(d, m)| (*d, m.clone())),
            self.floor,
            low,
        )
    }

    pub fn map_matrices(&self, f: impl Fn(&Matrix<C>) -> Matrix<C>) -> Self {
        Self::from_terms(
            &self.proto,
            self.n,
            self.terms.iter().map(|(d, m)| (*d, f(m))),
            self.floor,
            self.low,
        )
    }

    pub fn transpose(&self) -> Self {
        self.map_matrices(|m| m.transpose())
    }

    /// Degree-wise convolution, truncated below at the smaller floor.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let floor = self.floor.min(other.floor);
        let mut low: Option<i64> = None;
        let raise = |low: &mut Option<i64>, l: i64| *low = Some(low.map_or(l, |cur| cur.max(l)));
        if let (Some(la), Some(ub)) = (self.low, other.upper()) {
            raise(&mut low, la + ub);
        }
        if let (Some(lb), Some(ua)) = (other.low, self.upper()) {
            raise(&mut low, lb + ua);
        }
        let cut = low.unwrap_or(NEG_INF).max(floor);
        let mut dropped = false;
        let mut acc: BTreeMap<i64, Matrix<C>> = BTreeMap::new();
        for (da, ma) in &self.terms {
            for (db, mb) in &other.terms {
                let d = da + db;
                if d < cut {
                    if d < floor {
                        dropped = true;
                    }
                    continue;
                }
                let p = ma.mul(mb);
                match acc.get_mut(&d) {
                    Some(m) => *m = m.add(&p),
                    None => {
                        acc.insert(d, p);
                    }
                }
            }
        }
        if dropped {
            raise(&mut low, floor);
        }
        Ok(Self::from_terms(&self.proto, self.n, acc, floor, low))
    }

    /// Degrees `lo..=hi` of the product; everything outside the window is dropped
    /// and degrees below `lo` are marked unknown.
    pub fn mul_window(&self, other: &Self, lo: i64, hi: i64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let floor = self.floor.min(other.floor).min(lo);
        let mut low = lo;
        if let (Some(la), Some(ub)) = (self.low, other.upper()) {
            low = low.max(la + ub);
        }
        if let (Some(lb), Some(ua)) = (other.low, self.upper()) {
            low = low.max(lb + ua);
        }
        let mut acc: BTreeMap<i64, Matrix<C>> = BTreeMap::new();
        for (da, ma) in self.terms.iter().filter(|_| low <= hi) {
            for (db, mb) in other.terms.range(low - da..=hi - da) {
                let p = ma.mul(mb);
                let d = da + db;
                match acc.get_mut(&d) {
                    Some(m) => *m = m.add(&p),
                    None => {
                        acc.insert(d, p);
                    }
                }
            }
        }
        Ok(Self::from_terms(&self.proto, self.n, acc, floor, Some(low)))
    }

    /// Inverse of a series of the form `I + (strictly negative degrees)`.
    pub fn invert(&self) -> Result<Self> {
        let lead = self.coeff(0)?;
        if !lead.is_exact_one() || self.top_degree().map_or(false, |t| t > 0) {
            return Err(Error::LeadingTermNotIdentity);
        }
        let floor = self.floor;
        let bottom = self.known_low().max(floor);
        let tail: Vec<(i64, &Matrix<C>)> =
            self.terms.range(..0).rev().map(|(d, m)| (-*d, m)).collect();
        let mut inv: Vec<Matrix<C>> = vec![lead];
        for d in 1..=(-bottom) {
            let mut acc = self.zero_matrix();
            for (k, nk) in &tail {
                if *k > d {
                    break;
                }
                acc = acc.add(&nk.mul(&inv[(d - k) as usize]));
            }
            inv.push(acc.neg());
        }
        let low = match self.low {
            Some(l) => Some(l.max(floor)),
            None if self.terms.keys().any(|d| *d < 0) => Some(floor),
            None => None,
        };
        Ok(Self::from_terms(
            &self.proto,
            self.n,
            inv.into_iter().enumerate().map(|(d, m)| (-(d as i64), m)),
            floor,
            low,
        ))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// First nonzero known coefficient, scanning degrees from the top.
    pub fn first_nonzero_term(&self) -> Option<ZTerm> {
        self.terms.iter().rev().find_map(|(d, m)| {
            m.first_nonzero_entry().map(|e| ZTerm {
                z_degree: *d,
                row: e.row,
                col: e.col,
                term: e.term,
            })
        })
    }

    pub fn is_zero_known(&self) -> bool {
        self.first_nonzero_term().is_none()
    }
}

impl<C: Coeff> Coeff for ZSeries<C> {
    fn zero_like(&self) -> Self {
        Self::zero(&self.proto, self.n, self.floor)
    }

    fn one_like(&self) -> Self {
        Self::identity(&self.proto, self.n, self.floor)
    }

    fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "z-series dimension mismatch");
        let low = match (self.low, rhs.low) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut terms = self.terms.clone();
        for (d, m) in &rhs.terms {
            match terms.get_mut(d) {
                Some(x) => *x = x.add(m),
                None => {
                    terms.insert(*d, m.clone());
                }
            }
        }
        Self::from_terms(&self.proto, self.n, terms, self.floor.min(rhs.floor), low)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("z-series dimension mismatch")
    }

    fn neg(&self) -> Self {
        self.map_matrices(|m| m.neg())
    }

    fn scale(&self, s: &Scalar) -> Self {
        self.map_matrices(|m| m.scale(s))
    }

    fn is_exact_zero(&self) -> bool {
        self.low.is_none() && self.terms.is_empty()
    }

    fn is_exact_one(&self) -> bool {
        self.low.is_none()
            && self.terms.len() == 1
            && self.terms.get(&0).map_or(false, |m| m.is_exact_one())
    }

    fn first_nonzero(&self) -> Option<Term> {
        self.first_nonzero_term().map(|t| t.term)
    }

    fn reach(&self) -> Reach {
        let base = Matrix::zeros(&self.proto, self.n).reach();
        self.terms.values().map(|m| m.reach()).fold(base, Reach::meet)
    }

    fn map_x(&self, f: &dyn Fn(&XSeries) -> XSeries) -> Self {
        self.map_matrices(|m| m.map_x(f))
    }
}
