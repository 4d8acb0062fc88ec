//! Truncated power series in `x` with exact rational coefficients.
//!
//! Every series stores `N_x + 1` dense coefficients and tracks how many of
//! them are actually known. A series is *exact* when it is a polynomial whose
//! every coefficient is present; exactness survives ring operations as long as
//! nothing is cut at `N_x`. Operations that lose information (the q-derivative
//! of a truncated series, products whose degree overflows) lower `known`.

use num_traits::{One, Zero};

use crate::coeff::{Coeff, Reach, Term};
use crate::error::{Error, Result};
use crate::scalar::{int, pow, QParam, Scalar};

const UNBOUNDED: usize = usize::MAX / 4;

#[derive(Debug, Clone, PartialEq)]
pub struct XSeries {
    coeffs: Vec<Scalar>,
    known: usize,
    exact: bool,
}

impl XSeries {
    pub fn zero(nx: usize) -> Self {
        XSeries {
            coeffs: vec![Scalar::zero(); nx + 1],
            known: nx + 1,
            exact: true,
        }
    }

    pub fn constant(nx: usize, c: Scalar) -> Self {
        let mut s = Self::zero(nx);
        s.coeffs[0] = c;
        s
    }

    pub fn one(nx: usize) -> Self {
        Self::constant(nx, Scalar::one())
    }

    pub fn monomial(nx: usize, k: usize, c: Scalar) -> Self {
        let mut s = Self::zero(nx);
        if k <= nx {
            s.coeffs[k] = c;
        } else if !c.is_zero() {
            s.exact = false;
        }
        s
    }

    /// The polynomial with the given coefficients; fails if it does not fit in `N_x`.
    pub fn polynomial(nx: usize, coeffs: &[Scalar]) -> Result<Self> {
        let mut s = Self::zero(nx);
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k > nx {
                return Err(Error::TruncationOverflow(format!(
                    "x^{k} does not fit in N_x = {nx}"
                )));
            }
            s.coeffs[k] = c.clone();
        }
        Ok(s)
    }

    /// A series known through `x^N_x` whose tail is not zero in general.
    pub fn truncated(nx: usize, coeffs: &[Scalar]) -> Self {
        let mut s = Self::zero(nx);
        for (k, c) in coeffs.iter().take(nx + 1).enumerate() {
            s.coeffs[k] = c.clone();
        }
        s.exact = false;
        s
    }

    fn with(coeffs: Vec<Scalar>, known: usize, exact: bool) -> Self {
        let mut s = XSeries {
            coeffs,
            known,
            exact,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let len = self.coeffs.len();
        if self.exact {
            self.known = len;
        }
        self.known = self.known.min(len);
        for c in self.coeffs.iter_mut().skip(self.known) {
            c.set_zero();
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Number of leading coefficients that are known.
    pub fn known(&self) -> usize {
        self.known
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Index of the first nonzero known coefficient; `known` when all known
    /// coefficients vanish, and unbounded for the exact zero.
    fn valuation(&self) -> usize {
        match self.coeffs[..self.known].iter().position(|c| !c.is_zero()) {
            Some(v) => v,
            None if self.exact => UNBOUNDED,
            None => self.known,
        }
    }

    fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn known_bound(&self) -> usize {
        if self.exact {
            UNBOUNDED
        } else {
            self.known
        }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::TruncationMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    /// Cauchy product truncated at `N_x`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![Scalar::zero(); n + 1];
        let da = self.degree();
        let db = other.degree();
        if let (Some(da), Some(db)) = (da, db) {
            for i in 0..=da {
                let a = &self.coeffs[i];
                if a.is_zero() {
                    continue;
                }
                for j in 0..=db.min(n - i) {
                    let b = &other.coeffs[j];
                    if !b.is_zero() {
                        out[i + j] += a * b;
                    }
                }
            }
        }
        let overflow = matches!((da, db), (Some(a), Some(b)) if a + b > n);
        let exact = self.exact && other.exact && !overflow;
        let known = (n + 1)
            .min(self.known_bound().saturating_add(other.valuation()))
            .min(other.known_bound().saturating_add(self.valuation()));
        Ok(Self::with(out, known, exact))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let out = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::with(
            out,
            self.known.min(other.known),
            self.exact && other.exact,
        ))
    }

    /// `f(cx)`: coefficient `k` multiplied by `c^k`.
    pub fn dilate(&self, c: &Scalar) -> Self {
        let mut p = Scalar::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &p);
            p *= c;
        }
        Self::with(out, self.known, self.exact)
    }

    /// Coefficient `m` multiplied by `f(m)`; truncation state unchanged.
    pub fn scale_each(&self, f: impl Fn(usize) -> Scalar) -> Self {
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| if c.is_zero() { Scalar::zero() } else { c * f(m) })
            .collect();
        Self::with(out, self.known, self.exact)
    }

    /// Generic lowering derivation: coefficient `m - 1` of the result is
    /// `factor(m) * f_m`. One order of information is lost unless exact.
    pub fn derive_with(&self, factor: impl Fn(usize) -> Scalar) -> Self {
        let n = self.order();
        let mut out = vec![Scalar::zero(); n + 1];
        for m in 1..=n {
            if !self.coeffs[m].is_zero() {
                out[m - 1] = factor(m) * &self.coeffs[m];
            }
        }
        let known = if self.exact {
            n + 1
        } else {
            self.known.saturating_sub(1)
        };
        Self::with(out, known, self.exact)
    }

    /// `D_q f = (f(qx) - f(x)) / (x(q-1))`, valid one order below the input.
    pub fn q_derive(&self, q: &QParam) -> Self {
        self.derive_with(|m| q.number(m))
    }

    pub fn derive(&self) -> Self {
        self.derive_with(|m| int(m as i64))
    }

    /// Right inverse of a lowering derivation with zero constant of integration.
    pub fn antiderive_with(&self, factor: impl Fn(usize) -> Scalar) -> Self {
        let n = self.order();
        let mut out = vec![Scalar::zero(); n + 1];
        for k in 0..n {
            if !self.coeffs[k].is_zero() {
                out[k + 1] = &self.coeffs[k] / factor(k + 1);
            }
        }
        let fits = self.coeffs[n].is_zero();
        let exact = self.exact && fits;
        let known = if exact {
            n + 1
        } else {
            (self.known + 1).min(n + 1)
        };
        Self::with(out, known, exact)
    }

    /// Right inverse of [`XSeries::q_derive`]: `x^k -> x^{k+1}/[k+1]_q`.
    pub fn q_antiderive(&self, q: &QParam) -> Self {
        self.antiderive_with(|m| q.number(m))
    }

    pub fn antiderive(&self) -> Self {
        self.antiderive_with(|m| int(m as i64))
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        if self.known == 0 || self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let n = self.order();
        let inv0 = self.coeffs[0].recip();
        let mut out: Vec<Scalar> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for m in 1..=n {
            let mut acc = Scalar::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[m - k];
                }
            }
            out.push(-acc * &inv0);
        }
        let exact = self.exact && self.degree() == Some(0);
        Ok(Self::with(out, self.known, exact))
    }

    /// Series of `exp_q(c x)`: coefficient `k` is `c^k (1-q)^k / (q;q)_k`.
    pub fn exp_q(nx: usize, q: &QParam, c: &Scalar) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self::one(nx));
        }
        let one_minus_q = Scalar::one() - q.value();
        let mut out = Vec::with_capacity(nx + 1);
        for k in 0..=nx {
            let poch = q.pochhammer(k);
            if poch.is_zero() {
                return Err(Error::VanishingPochhammer(k));
            }
            out.push(pow(c, k as i64) * pow(&one_minus_q, k as i64) / poch);
        }
        Ok(Self::with(out, nx + 1, false))
    }

    /// Series of `exp(sum_k c_k x^k)` for terms of degree `k >= 1`.
    pub fn exp(nx: usize, args: &[(usize, Scalar)]) -> Result<Self> {
        if args.iter().any(|(k, _)| *k == 0) {
            return Err(Error::DegreeZeroExponent);
        }
        // g = sum c_k x^k; f = exp(g) satisfies m f_m = sum_k k c_k f_{m-k}.
        let mut g = vec![Scalar::zero(); nx + 1];
        for (k, c) in args {
            if *k <= nx {
                g[*k] += c;
            }
        }
        if g.iter().all(Zero::is_zero) {
            return Ok(Self::one(nx));
        }
        let mut f: Vec<Scalar> = Vec::with_capacity(nx + 1);
        f.push(Scalar::one());
        for m in 1..=nx {
            let mut acc = Scalar::zero();
            for k in 1..=m {
                if !g[k].is_zero() {
                    acc += int(k as i64) * &g[k] * &f[m - k];
                }
            }
            f.push(acc / int(m as i64));
        }
        Ok(Self::with(f, nx + 1, false))
    }
}

impl Coeff for XSeries {
    fn zero_like(&self) -> Self {
        Self::zero(self.order())
    }

    fn one_like(&self) -> Self {
        Self::one(self.order())
    }

    fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("x-series truncation mismatch")
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("x-series truncation mismatch")
    }

    fn neg(&self) -> Self {
        Self::with(
            self.coeffs.iter().map(|c| -c).collect(),
            self.known,
            self.exact,
        )
    }

    fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return self.zero_like();
        }
        Self::with(
            self.coeffs.iter().map(|c| c * s).collect(),
            self.known,
            self.exact,
        )
    }

    fn is_exact_zero(&self) -> bool {
        self.exact && self.coeffs.iter().all(Zero::is_zero)
    }

    fn is_exact_one(&self) -> bool {
        self.exact && self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn first_nonzero(&self) -> Option<Term> {
        self.coeffs[..self.known]
            .iter()
            .position(|c| !c.is_zero())
            .map(|k| Term {
                x_degree: k,
                t_monomial: None,
                value: self.coeffs[k].clone(),
            })
    }

    fn reach(&self) -> Reach {
        Reach {
            x: self.known as i64 - 1,
            t: None,
        }
    }

    fn map_x(&self, f: &dyn Fn(&XSeries) -> XSeries) -> Self {
        f(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn poly(nx: usize, c: &[i64]) -> XSeries {
        XSeries::polynomial(nx, &c.iter().map(|&v| int(v)).collect::<Vec<_>>()).unwrap()
    }

    fn q2() -> QParam {
        QParam::new(int(2), 8).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let p = poly(4, &[1, 1]).mul(&poly(4, &[1, -1]));
        assert_eq!(p, poly(4, &[1, 0, -1]));
        assert!(p.is_exact());
    }

    #[test]
    fn x_times_x() {
        assert_eq!(poly(3, &[0, 1]).mul(&poly(3, &[0, 1])), poly(3, &[0, 0, 1]));
    }

    #[test]
    fn mismatched_orders_rejected() {
        assert_eq!(
            poly(3, &[1]).try_mul(&poly(4, &[1])),
            Err(Error::TruncationMismatch(3, 4))
        );
    }

    #[test]
    fn overflowing_product_is_not_exact() {
        let p = poly(2, &[0, 1, 1]).mul(&poly(2, &[0, 1]));
        assert!(!p.is_exact());
        assert_eq!(p.known(), 3);
        assert_eq!(p.coeffs(), &[int(0), int(0), int(1)]);
    }

    #[test]
    fn dilate_monomial() {
        let f = poly(4, &[0, 0, 0, 1]);
        assert_eq!(f.dilate(&int(2)), poly(4, &[0, 0, 0, 8]));
        assert_eq!(f.dilate(&int(1)), f);
        let g = XSeries::exp(4, &[(1, int(1))]).unwrap();
        assert_eq!(g.dilate(&int(3)).dilate(&ratio(1, 3)), g);
    }

    #[test]
    fn q_derivative_examples() {
        let q = q2();
        assert_eq!(poly(4, &[0, 0, 1]).q_derive(&q), poly(4, &[0, 3]));
        assert_eq!(poly(4, &[5]).q_derive(&q), XSeries::zero(4));
        assert_eq!(poly(4, &[0, 1]).q_derive(&q), poly(4, &[1]));
    }

    #[test]
    fn q_derivative_of_truncated_series_loses_one_order() {
        let q = q2();
        let e = XSeries::exp(4, &[(1, int(1))]).unwrap();
        let d = e.q_derive(&q);
        assert_eq!(d.known(), 4);
        assert!(d.coeff(4).is_zero());
    }

    #[test]
    fn q_antiderivative_examples() {
        let q = q2();
        assert_eq!(poly(4, &[1]).q_antiderive(&q), poly(4, &[0, 1]));
        let x2 = XSeries::polynomial(4, &[int(0), int(0), ratio(1, 3)]).unwrap();
        assert_eq!(poly(4, &[0, 1]).q_antiderive(&q), x2);
        assert_eq!(XSeries::zero(4).q_antiderive(&q), XSeries::zero(4));
        let g = poly(4, &[2, -1, 7, 3]);
        assert_eq!(g.q_antiderive(&q).q_derive(&q), g);
    }

    #[test]
    fn exp_q_coefficients() {
        let q = q2();
        let e = XSeries::exp_q(8, &q, &int(1)).unwrap();
        assert_eq!(e.coeff(0), int(1));
        assert_eq!(e.coeff(1), int(1));
        assert_eq!(e.coeff(2), ratio(1, 3));
        assert_eq!(e.coeff(3), ratio(1, 21));
        assert_eq!(XSeries::exp_q(8, &q, &int(0)).unwrap(), XSeries::one(8));
    }

    #[test]
    fn formal_exponential() {
        let e = XSeries::exp(6, &[(1, int(1))]).unwrap();
        let mut fact = int(1);
        for k in 0..=6 {
            if k > 0 {
                fact *= int(k);
            }
            assert_eq!(e.coeff(k as usize), fact.recip());
        }
        let f = XSeries::exp(4, &[(1, int(1)), (2, int(1))]).unwrap();
        assert_eq!(f.coeff(2), ratio(3, 2));
        assert_eq!(XSeries::exp(4, &[(0, int(1))]), Err(Error::DegreeZeroExponent));
    }

    #[test]
    fn exp_times_exp_of_negative_is_one() {
        let nx = 8;
        let a = XSeries::exp(nx, &[(1, int(1))]).unwrap();
        let b = XSeries::exp(nx, &[(1, int(-1))]).unwrap();
        // oracle: direct convolution of 1/k! and (-1)^k/k!
        let fact = |k: usize| (1..=k).fold(int(1), |acc, i| acc * int(i as i64));
        for m in 0..=nx {
            let mut s = Scalar::zero();
            for i in 0..=m {
                let sign = if (m - i) % 2 == 0 { int(1) } else { int(-1) };
                s += sign / (fact(i) * fact(m - i));
            }
            assert_eq!(a.mul(&b).coeff(m), s);
        }
        assert_eq!(a.mul(&b).first_nonzero().map(|t| t.x_degree), Some(0));
        assert!(a.mul(&b).sub(&XSeries::one(nx)).is_zero_known());
    }

    #[test]
    fn inverse_round_trip() {
        let f = poly(6, &[2, 1, 0, -3]);
        let g = f.inverse().unwrap();
        assert!(f.mul(&g).sub(&XSeries::one(6)).is_zero_known());
        assert_eq!(poly(6, &[0, 1]).inverse(), Err(Error::NotInvertible));
    }
}
