//! Exact rational scalars and the deformation parameter.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in reduced form.
pub type Scalar = BigRational;

pub fn int(i: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(i))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let t = text.trim();
    let bad = || Error::Parse(text.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Scalar::from_integer(n))
        }
    }
}

/// `"num/den"`, or just `"num"` for integers.
pub fn fmt_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn pow(base: &Scalar, exp: i64) -> Scalar {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

pub fn abs(s: &Scalar) -> Scalar {
    s.abs()
}

/// The deformation parameter, validated against the x-truncation it is used with.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QParam(Scalar);

impl QParam {
    /// `q != 0`, `q != 1` and `q^m != 1` for `1 <= m <= nx + 1`, so that `D - 1`
    /// is invertible off constants at every order the series can hold.
    pub fn new(q: Scalar, nx: usize) -> Result<Self> {
        let reject = |reason: &str| Error::InadmissibleQ {
            q: fmt_scalar(&q),
            reason: reason.to_string(),
        };
        if q.is_zero() {
            return Err(reject("q = 0"));
        }
        if q.is_one() {
            return Err(reject("q = 1"));
        }
        // Over the rationals q^m = 1 with q != 1 only happens for q = -1, m even.
        if q == -Scalar::one() && nx >= 1 {
            return Err(reject("q = -1 is a root of unity"));
        }
        Ok(QParam(q))
    }

    pub fn value(&self) -> &Scalar {
        &self.0
    }

    /// `1/q`, as a parameter in its own right (used by the `D_{1/q}` basis).
    pub fn inverse(&self) -> QParam {
        QParam(self.0.recip())
    }

    pub fn pow(&self, m: i64) -> Scalar {
        pow(&self.0, m)
    }

    /// `[m]_q = (q^m - 1)/(q - 1)`.
    pub fn number(&self, m: usize) -> Scalar {
        let mut acc = Scalar::zero();
        let mut p = Scalar::one();
        for _ in 0..m {
            acc += &p;
            p *= &self.0;
        }
        acc
    }

    /// `(q;q)_k = prod_{s=1}^{k} (1 - q^s)`.
    pub fn pochhammer(&self, k: usize) -> Scalar {
        let mut acc = Scalar::one();
        let mut p = self.0.clone();
        for _ in 0..k {
            acc *= Scalar::one() - &p;
            p *= &self.0;
        }
        acc
    }

    /// `(1-q)^k / (k (1-q^k))`, the k-th coefficient of the q-shift of times.
    pub fn shift_coefficient(&self, k: usize) -> Scalar {
        assert!(k >= 1, "shift coefficient defined for k >= 1");
        let one = Scalar::one();
        pow(&(&one - &self.0), k as i64) / (int(k as i64) * (&one - self.pow(k as i64)))
    }
}
