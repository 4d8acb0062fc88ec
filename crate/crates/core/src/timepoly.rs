//! Truncated polynomials in the times `t_{k alpha}` with x-series coefficients.
//!
//! Monomials of total time degree above `N_t` are dropped. Validity is tracked
//! in the combined grading: a term `t^e x^d` is known when `|e| + d < known`.
//! This grading is what survives both time derivatives (which lower `|e|`)
//! and the q-shift `t -> t + c (a x)^k` (which trades `t` for powers of `x`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::coeff::{Coeff, Reach, Term};
use crate::error::{Error, Result};
use crate::hierarchy::FlowIndex;
use crate::scalar::{int, parse_scalar, pow, QParam, Scalar};
use crate::xseries::XSeries;

/// A monomial `prod t_v^{e_v}`, variables sorted, exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono(Vec<(FlowIndex, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: FlowIndex) -> Self {
        Mono(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (FlowIndex, u32)>) -> Self {
        powers
            .into_iter()
            .fold(Mono::one(), |m, (v, e)| m.mul(&Mono(vec![(v, e)])))
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|(_, e)| *e as usize).sum()
    }

    pub fn powers(&self) -> &[(FlowIndex, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: FlowIndex) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out: BTreeMap<FlowIndex, u32> = self.0.iter().copied().collect();
        for (v, e) in &other.0 {
            *out.entry(*v).or_insert(0) += e;
        }
        Mono(out.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    /// `t_v^{e}` removed from the monomial, returning `e`.
    pub fn split(&self, v: FlowIndex) -> (u32, Mono) {
        let e = self.exponent(v);
        (e, Mono(self.0.iter().copied().filter(|(w, _)| *w != v).collect()))
    }

    fn lowered(&self, v: FlowIndex) -> Option<(u32, Mono)> {
        let e = self.exponent(v);
        if e == 0 {
            return None;
        }
        let rest = self
            .0
            .iter()
            .map(|(w, f)| if *w == v { (*w, f - 1) } else { (*w, *f) })
            .filter(|(_, f)| *f > 0)
            .collect();
        Some((e, Mono(rest)))
    }

    /// Parses `"1"`, `"t11"`, `"t11^2*t12"` or `"t10_2"` (k = 10, alpha = 2).
    pub fn parse(text: &str) -> Result<Mono> {
        let t = text.trim();
        if t.is_empty() || t == "1" {
            return Ok(Mono::one());
        }
        let bad = || Error::Parse(format!("time monomial {text:?}"));
        let mut out = Mono::one();
        for factor in t.split('*') {
            let (var, exp) = match factor.trim().split_once('^') {
                Some((v, e)) => (v, e.trim().parse::<u32>().map_err(|_| bad())?),
                None => (factor.trim(), 1),
            };
            let digits = var.strip_prefix('t').ok_or_else(bad)?;
            let (k, alpha) = match digits.split_once('_') {
                Some((k, a)) => (k, a),
                None if digits.len() >= 2 => digits.split_at(digits.len() - 1),
                None => return Err(bad()),
            };
            let k: usize = k.parse().map_err(|_| bad())?;
            let alpha: usize = alpha.parse().map_err(|_| bad())?;
            if k == 0 || alpha == 0 {
                return Err(bad());
            }
            out = out.mul(&Mono(vec![(FlowIndex { k, alpha: alpha - 1 }, exp)]));
        }
        Ok(out)
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if v.k < 10 && v.alpha < 9 {
                write!(f, "t{}{}", v.k, v.alpha + 1)?;
            } else {
                write!(f, "t{}_{}", v.k, v.alpha + 1)?;
            }
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimePoly {
    nx: usize,
    nt: usize,
    known: Option<usize>,
    terms: BTreeMap<Mono, XSeries>,
}

/// Lowest x-degree that may be nonzero, `None` for the exact zero.
fn x_order(c: &XSeries) -> Option<usize> {
    match c.coeffs()[..c.known()].iter().position(|v| !v.is_zero()) {
        Some(v) => Some(v),
        None if c.is_exact() => None,
        None => Some(c.known()),
    }
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

impl TimePoly {
    pub fn zero(nx: usize, nt: usize) -> Self {
        TimePoly {
            nx,
            nt,
            known: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nt: usize, c: XSeries) -> Self {
        let mut p = Self::zero(c.order(), nt);
        p.terms.insert(Mono::one(), c);
        p.normalize(false);
        p
    }

    pub fn scalar(nx: usize, nt: usize, s: Scalar) -> Self {
        Self::constant(nt, XSeries::constant(nx, s))
    }

    pub fn var(nx: usize, nt: usize, v: FlowIndex) -> Self {
        Self::from_terms(nx, nt, [(Mono::var(v), XSeries::one(nx))])
    }

    pub fn from_terms(nx: usize, nt: usize, terms: impl IntoIterator<Item = (Mono, XSeries)>) -> Self {
        let mut p = Self::zero(nx, nt);
        for (m, c) in terms {
            let slot = p.terms.entry(m).or_insert_with(|| XSeries::zero(nx));
            *slot = slot.add(&c);
        }
        p.normalize(false);
        p
    }

    /// Builds a polynomial from `(coefficient, monomial)` strings.
    pub fn parse_terms(nx: usize, nt: usize, terms: &[(String, String)]) -> Result<Self> {
        let mut out = Vec::new();
        for (c, m) in terms {
            let mono = Mono::parse(m)?;
            if mono.degree() > nt {
                return Err(Error::TruncationOverflow(format!(
                    "monomial {mono} exceeds N_t = {nt}"
                )));
            }
            out.push((mono, XSeries::constant(nx, parse_scalar(c)?)));
        }
        Ok(Self::from_terms(nx, nt, out))
    }

    fn normalize(&mut self, dropped: bool) {
        let nt = self.nt;
        let mut lost = dropped;
        self.terms.retain(|m, c| {
            if m.degree() > nt {
                lost |= !c.is_exact_zero();
                return false;
            }
            true
        });
        if lost {
            self.known = min_opt(self.known, Some(nt + 1));
        }
        if let Some(k) = self.known {
            self.terms.retain(|m, _| m.degree() < k);
        }
        self.terms.retain(|_, c| !c.is_exact_zero());
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Combined-degree validity bound, `None` when exact.
    pub fn known(&self) -> Option<usize> {
        self.known
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &XSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> XSeries {
        self.terms.get(m).cloned().unwrap_or_else(|| XSeries::zero(self.nx))
    }

    fn order(&self) -> Option<usize> {
        let from_terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| x_order(c).map(|v| m.degree() + v))
            .min();
        min_opt(from_terms, self.known)
    }

    /// Lowers validity to at most `k`.
    pub fn with_known(&self, k: usize) -> Self {
        let mut p = self.clone();
        p.known = min_opt(p.known, Some(k));
        p.normalize(false);
        p
    }

    fn map_terms(&self, f: impl Fn(&XSeries) -> XSeries, known: Option<usize>) -> Self {
        let mut p = TimePoly {
            nx: self.nx,
            nt: self.nt,
            known,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect(),
        };
        p.normalize(false);
        p
    }

    /// `∂/∂t_v`.
    pub fn derive(&self, v: FlowIndex) -> Self {
        let mut terms: BTreeMap<Mono, XSeries> = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.lowered(v) {
                terms.insert(rest, c.scale(&int(e as i64)));
            }
        }
        let mut p = TimePoly {
            nx: self.nx,
            nt: self.nt,
            known: self.known.map(|k| k.saturating_sub(1)),
            terms,
        };
        p.normalize(false);
        p
    }

    /// Substitutes `t_v -> image(v)` for every variable with an image.
    pub fn substitute(&self, image: &dyn Fn(FlowIndex) -> Option<TimePoly>) -> Self {
        let mut acc = self.zero_like();
        for (m, c) in &self.terms {
            let mut term = Self::constant(self.nt, c.clone());
            for (v, e) in m.powers() {
                let base = image(*v).unwrap_or_else(|| Self::var(self.nx, self.nt, *v));
                for _ in 0..*e {
                    term = term.mul(&base);
                }
            }
            acc = acc.add(&term);
        }
        match self.known {
            Some(k) => acc.with_known(k),
            None => acc,
        }
    }

    /// `t_{k alpha} -> t_{k alpha} + (1-q)^k/(k(1-q^k)) (a_alpha x)^k`.
    pub fn q_shift_times(&self, q: &QParam, a: &[Scalar]) -> Self {
        let (nx, nt) = (self.nx, self.nt);
        self.substitute(&|v: FlowIndex| {
            let amount = q.shift_coefficient(v.k) * pow(&a[v.alpha], v.k as i64);
            let shift = Self::constant(nt, XSeries::monomial(nx, v.k, amount));
            Some(Self::var(nx, nt, v).add(&shift))
        })
    }

    /// Multiplicative inverse; the t-constant part must have nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeff(&Mono::one());
        if self.known == Some(0) || c0.known() == 0 || c0.coeff(0).is_zero() {
            return Err(Error::TauNotInvertible);
        }
        let inv0 = Self::constant(self.nt, c0.inverse()?);
        let rest = self.sub(&Self::constant(self.nt, c0));
        let step = rest.mul(&inv0).neg();
        let mut acc = inv0.clone();
        let mut power = inv0;
        for _ in 0..self.nt {
            power = power.mul(&step);
            acc = acc.add(&power);
        }
        if !rest.is_exact_zero() {
            acc = acc.with_known(self.nt + 1);
        }
        Ok(acc)
    }

    /// Largest absolute coefficient over known terms.
    pub fn max_abs(&self) -> Scalar {
        let mut best = Scalar::zero();
        for (m, c) in &self.terms {
            let limit = c.known().min(self.known.map_or(usize::MAX, |k| k - m.degree()));
            for v in &c.coeffs()[..limit.min(c.coeffs().len())] {
                let a = num_traits::Signed::abs(v);
                if a > best {
                    best = a;
                }
            }
        }
        best
    }
}

impl Coeff for TimePoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.nx, self.nt)
    }

    fn one_like(&self) -> Self {
        Self::scalar(self.nx, self.nt, Scalar::one())
    }

    fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nx, self.nt), (rhs.nx, rhs.nt), "time polynomial context mismatch");
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            match terms.get_mut(m) {
                Some(x) => *x = x.add(c),
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        let mut p = TimePoly {
            nx: self.nx,
            nt: self.nt,
            known: min_opt(self.known, rhs.known),
            terms,
        };
        p.normalize(false);
        p
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        assert_eq!((self.nx, self.nt), (rhs.nx, rhs.nt), "time polynomial context mismatch");
        if self.is_exact_zero() || rhs.is_exact_zero() {
            return self.zero_like();
        }
        let known = min_opt(
            self.known.zip(rhs.order()).map(|(k, o)| k + o),
            rhs.known.zip(self.order()).map(|(k, o)| k + o),
        );
        let cut = known.unwrap_or(usize::MAX);
        let mut dropped = false;
        let mut terms: BTreeMap<Mono, XSeries> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let deg = ma.degree() + mb.degree();
                if deg >= cut {
                    continue;
                }
                if deg > self.nt {
                    dropped = true;
                    continue;
                }
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                match terms.get_mut(&m) {
                    Some(x) => *x = x.add(&c),
                    None => {
                        terms.insert(m, c);
                    }
                }
            }
        }
        let mut p = TimePoly {
            nx: self.nx,
            nt: self.nt,
            known,
            terms,
        };
        p.normalize(dropped);
        p
    }

    fn neg(&self) -> Self {
        self.map_terms(|c| c.neg(), self.known)
    }

    fn scale(&self, s: &Scalar) -> Self {
        self.map_terms(|c| c.scale(s), self.known)
    }

    fn is_exact_zero(&self) -> bool {
        self.known.is_none() && self.terms.is_empty()
    }

    fn is_exact_one(&self) -> bool {
        self.known.is_none()
            && self.terms.len() == 1
            && self.terms.get(&Mono::one()).map_or(false, |c| c.is_exact_one())
    }

    fn first_nonzero(&self) -> Option<Term> {
        for (m, c) in &self.terms {
            let limit = self
                .known
                .map_or(usize::MAX, |k| k.saturating_sub(m.degree()))
                .min(c.known());
            if let Some(d) = c.coeffs()[..limit].iter().position(|v| !v.is_zero()) {
                return Some(Term {
                    x_degree: d,
                    t_monomial: Some(m.to_string()),
                    value: c.coeff(d),
                });
            }
        }
        None
    }

    fn reach(&self) -> Reach {
        let x = self
            .terms
            .values()
            .map(|c| c.known() as i64 - 1)
            .min()
            .unwrap_or(self.nx as i64);
        Reach {
            x,
            t: Some(self.known.map_or(self.nt as i64, |k| k as i64 - 1)),
        }
    }

    fn map_x(&self, f: &dyn Fn(&XSeries) -> XSeries) -> Self {
        // a lowering map (like D_q) costs one level of combined validity
        let probe = f(&XSeries::monomial(self.nx.max(1), 1, Scalar::one()));
        let lowers = probe.coeff(1).is_zero() && !probe.coeff(0).is_zero();
        let known = match (self.known, lowers) {
            (Some(k), true) => Some(k.saturating_sub(1)),
            (k, _) => k,
        };
        self.map_terms(|c| f(c), known)
    }

    fn constant_like(&self, s: &Scalar) -> Self {
        Self::scalar(self.nx, self.nt, s.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn v(k: usize, alpha: usize) -> FlowIndex {
        FlowIndex { k, alpha }
    }

    #[test]
    fn monomial_parse_and_display() {
        let m = Mono::parse("t11^2*t12").unwrap();
        assert_eq!(m.degree(), 3);
        assert_eq!(m.exponent(v(1, 0)), 2);
        assert_eq!(m.to_string(), "t11^2*t12");
        assert_eq!(Mono::parse("t10_2").unwrap(), Mono::var(v(10, 1)));
        assert_eq!(Mono::parse("1").unwrap(), Mono::one());
        assert!(Mono::parse("x1").is_err());
        assert!(Mono::parse("t0").is_err());
    }

    #[test]
    fn product_and_derivative() {
        let t = TimePoly::var(4, 4, v(1, 0));
        let p = t.add(&t.one_like());
        let sq = p.mul(&p);
        assert_eq!(sq.coeff(&Mono::from_powers([(v(1, 0), 2)])), XSeries::one(4));
        assert_eq!(sq.derive(v(1, 0)), p.scale(&int(2)));
        assert!(sq.derive(v(2, 0)).is_exact_zero());
    }

    #[test]
    fn truncation_at_nt() {
        let t = TimePoly::var(4, 2, v(1, 0));
        let cube = t.mul(&t).mul(&t);
        assert!(cube.terms().next().is_none());
        assert_eq!(cube.known(), Some(3));
    }

    #[test]
    fn inverse_round_trip() {
        let t = TimePoly::var(4, 4, v(1, 0));
        let tau = t.one_like().add(&t);
        let inv = tau.inverse().unwrap();
        // oracle: 1/(1+t) = sum (-t)^j
        for j in 0..=4u32 {
            let m = Mono::from_powers([(v(1, 0), j)]);
            let sign = if j % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.coeff(&m), XSeries::constant(4, int(sign)));
        }
        assert!(tau.mul(&inv).sub(&tau.one_like()).is_zero_known());
        assert!(TimePoly::var(4, 4, v(1, 0)).inverse().is_err());
    }

    #[test]
    fn q_shift_amounts() {
        let q = QParam::new(int(2), 8).unwrap();
        let a = [int(1)];
        let p = TimePoly::var(8, 4, v(1, 0)).q_shift_times(&q, &a);
        assert_eq!(p.coeff(&Mono::one()), XSeries::monomial(8, 1, int(1)));
        let p = TimePoly::var(8, 4, v(2, 0)).q_shift_times(&q, &a);
        assert_eq!(p.coeff(&Mono::one()), XSeries::monomial(8, 2, ratio(-1, 6)));
        let one = TimePoly::scalar(8, 4, int(1));
        assert_eq!(one.q_shift_times(&q, &a), one);
    }

    #[test]
    fn q_derivative_lowers_combined_validity() {
        let q = QParam::new(int(2), 8).unwrap();
        let p = TimePoly::var(8, 4, v(1, 0)).with_known(3);
        let d = p.map_x(&|f| f.q_derive(&q));
        assert_eq!(d.known(), Some(2));
        let s = p.map_x(&|f| f.dilate(&int(2)));
        assert_eq!(s.known(), Some(3));
    }
}
