//! q-pseudo-difference operators `sum_i p_i D_q^i` with z-series coefficients.
//!
//! Operators are kept in normal form, coefficients to the left of powers of
//! `D_q`. Negative powers are expanded down to a floor power `-N_D`; powers
//! below it are dropped and marked unknown the same way [`ZSeries`] tracks
//! lost z-degrees.

use std::collections::BTreeMap;

use crate::coeff::Coeff;
use crate::difference::Difference;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{pow, Scalar};
use crate::xseries::XSeries;
use crate::zseries::MZSeries;

const NEG_INF: i64 = i64::MIN / 4;

/// Which shift the powers refer to: `D_q`, or `D_{1/q}` for adjoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Dq,
    DInvQ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QDOp {
    base: Difference,
    basis: Basis,
    zero: MZSeries,
    floor: i64,
    low: Option<i64>,
    terms: BTreeMap<i64, MZSeries>,
}

/// Both sides of the residue pairing, plus the documented convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    /// Symbol calculus on `exp_q(zAx)`: `sum_{k+l=-1} (-q)^l p_k A^{-1} g_l(x/q)`.
    pub lhs: Matrix<XSeries>,
    /// `res_{D_q}(P A^{-1} Q)` with the full composition law.
    pub rhs_naive: Matrix<XSeries>,
    /// `res_{D_q}` of the principal-symbol product of `P A^{-1}` and `Q#`,
    /// where `Q# = sum_l (-q)^l (D^l g_l) D_q^l`.
    pub rhs_conv: Matrix<XSeries>,
}

impl Pairing {
    pub fn naive_agrees(&self) -> bool {
        self.lhs.sub(&self.rhs_naive).is_zero_known()
    }

    pub fn conv_agrees(&self) -> bool {
        self.lhs.sub(&self.rhs_conv).is_zero_known()
    }
}

impl QDOp {
    /// The zero operator. `zero` fixes the coefficient carrier; `nd` is the
    /// depth of negative powers kept.
    pub fn zero(base: Difference, zero: &MZSeries, nd: usize) -> Self {
        QDOp {
            base,
            basis: Basis::Dq,
            zero: zero.zero_like(),
            floor: -(nd as i64),
            low: None,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        base: Difference,
        zero: &MZSeries,
        nd: usize,
        terms: impl IntoIterator<Item = (i64, MZSeries)>,
    ) -> Self {
        let mut op = Self::zero(base, zero, nd);
        op.terms = terms.into_iter().collect();
        op.normalize();
        op
    }

    pub fn multiplication(base: Difference, g: &MZSeries, nd: usize) -> Self {
        Self::from_terms(base, g, nd, [(0, g.clone())])
    }

    pub fn identity(base: Difference, zero: &MZSeries, nd: usize) -> Self {
        Self::from_terms(base, zero, nd, [(0, zero.one_like())])
    }

    /// `D_q^k`.
    pub fn power(base: Difference, zero: &MZSeries, nd: usize, k: i64) -> Self {
        Self::from_terms(base, zero, nd, [(k, zero.one_like())])
    }

    /// `L_q = D_q + U - zA`.
    pub fn lax(base: Difference, u: &Matrix<XSeries>, a: &[Scalar], zfloor: i64, nd: usize) -> Self {
        let proto = u.proto().zero_like();
        let za = MZSeries::monomial(1, Matrix::diagonal_scalars(&proto, a), zfloor);
        let u0 = MZSeries::constant(u.clone(), zfloor);
        let zero = MZSeries::zero(&proto, u.dim(), zfloor);
        Self::from_terms(base, &zero, nd, [(1, zero.one_like()), (0, u0.sub(&za))])
    }

    fn with_terms(&self, terms: BTreeMap<i64, MZSeries>, low: Option<i64>) -> Self {
        let mut op = QDOp {
            base: self.base.clone(),
            basis: self.basis,
            zero: self.zero.clone(),
            floor: self.floor,
            low,
            terms,
        };
        op.normalize();
        op
    }

    fn normalize(&mut self) {
        let dropped = self
            .terms
            .range(..self.floor)
            .any(|(_, c)| !c.is_exact_zero());
        if dropped {
            self.low = Some(self.low.map_or(self.floor, |l| l.max(self.floor)));
        }
        let cut = self.low.unwrap_or(NEG_INF).max(self.floor);
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .filter(|(p, c)| *p >= cut && !c.is_exact_zero())
            .collect();
    }

    pub fn base(&self) -> &Difference {
        &self.base
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// The structure the powers actually obey.
    fn structure(&self) -> Difference {
        match self.basis {
            Basis::Dq => self.base.clone(),
            Basis::DInvQ => self.base.inverse(),
        }
    }

    pub fn depth(&self) -> usize {
        (-self.floor) as usize
    }

    pub fn low(&self) -> Option<i64> {
        self.low
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &MZSeries)> {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    pub fn top_power(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn bottom_power(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    fn upper(&self) -> Option<i64> {
        match (self.top_power(), self.low) {
            (Some(t), Some(l)) => Some(t.max(l - 1)),
            (Some(t), None) => Some(t),
            (None, Some(l)) => Some(l - 1),
            (None, None) => None,
        }
    }

    /// Coefficient of `D_q^power`; fails if that power was lost to truncation.
    pub fn coeff(&self, power: i64) -> Result<MZSeries> {
        if let Some(l) = self.low {
            if power < l {
                return Err(Error::InsufficientDepth {
                    what: "D_q power".into(),
                    needed: power,
                    known: l,
                });
            }
        }
        Ok(self.terms.get(&power).cloned().unwrap_or_else(|| self.zero.clone()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis || self.base != other.base {
            return Err(Error::BasisMismatch);
        }
        if self.zero.dim() != other.zero.dim() {
            return Err(Error::DimensionMismatch(self.zero.dim(), other.zero.dim()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        for (p, c) in &other.terms {
            match terms.get_mut(p) {
                Some(x) => *x = x.add(c),
                None => {
                    terms.insert(*p, c.clone());
                }
            }
        }
        let low = match (self.low, other.low) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut out = self.with_terms(terms, low);
        out.floor = self.floor.min(other.floor);
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(&MZSeries) -> MZSeries) -> Self {
        let terms = self.terms.iter().map(|(p, c)| (*p, f(c))).collect();
        self.with_terms(terms, self.low)
    }

    /// `D^k ∘ g` in normal form, keeping powers `>= cut`. The flag reports
    /// whether nonzero terms below `cut` were discarded.
    fn power_times(&self, k: i64, g: &MZSeries, cut: i64) -> (BTreeMap<i64, MZSeries>, bool) {
        let s = self.structure();
        let mut cur: BTreeMap<i64, MZSeries> = BTreeMap::new();
        cur.insert(0, g.clone());
        let mut dropped = false;
        let push = |m: &mut BTreeMap<i64, MZSeries>, p: i64, c: MZSeries| {
            if c.is_exact_zero() {
                return;
            }
            match m.get_mut(&p) {
                Some(x) => *x = x.add(&c),
                None => {
                    m.insert(p, c);
                }
            }
        };
        for _ in 0..k.max(0) {
            let mut next = BTreeMap::new();
            for (p, h) in &cur {
                push(&mut next, p + 1, s.shift_all(h));
                push(&mut next, *p, s.derive_all(h));
            }
            cur = next;
        }
        for _ in 0..(-k).max(0) {
            // D_q^{-1} ∘ h = sum_m (-1)^m (D^{-1} T^m h) D_q^{-1-m}, T = D_q ∘ D^{-1}
            let mut next = BTreeMap::new();
            for (p, h) in &cur {
                let mut t = h.clone();
                let mut m = 0i64;
                loop {
                    if t.is_exact_zero() {
                        break;
                    }
                    let power = p - 1 - m;
                    if power < cut {
                        dropped = true;
                        break;
                    }
                    let term = s.unshift_all(&t);
                    push(&mut next, power, if m % 2 == 0 { term.clone() } else { term.neg() });
                    t = s.derive_all(&term);
                    m += 1;
                }
            }
            cur = next;
        }
        let tail = cur.range(..cut).any(|(_, c)| !c.is_exact_zero());
        cur.retain(|p, _| *p >= cut);
        (cur, dropped || tail)
    }

    /// Composition `self ∘ other` via the q-Leibniz law.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let floor = self.floor.min(other.floor);
        let mut low: Option<i64> = None;
        let raise = |low: &mut Option<i64>, l: i64| *low = Some(low.map_or(l, |c| c.max(l)));
        if let (Some(la), Some(ub)) = (self.low, other.upper()) {
            raise(&mut low, la + ub);
        }
        if let (Some(lb), Some(ua)) = (other.low, self.upper()) {
            raise(&mut low, lb + ua);
        }
        let cut = low.unwrap_or(NEG_INF).max(floor);
        let mut acc: BTreeMap<i64, MZSeries> = BTreeMap::new();
        let mut dropped = false;
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let (expansion, lost) = self.power_times(*i, b, cut - j);
                dropped |= lost;
                for (p, h) in expansion {
                    let c = a.mul(&h);
                    match acc.get_mut(&(p + j)) {
                        Some(x) => *x = x.add(&c),
                        None => {
                            acc.insert(p + j, c);
                        }
                    }
                }
            }
        }
        if dropped {
            raise(&mut low, cut);
        }
        let mut out = self.with_terms(acc, low);
        out.floor = floor;
        out.normalize();
        Ok(out)
    }

    /// `sum_i p_i (D_q^i f)` for an operator without negative powers.
    pub fn apply(&self, f: &MZSeries) -> Result<MZSeries> {
        if self.low.is_some() || self.bottom_power().map_or(false, |b| b < 0) {
            return Err(Error::NegativePowers);
        }
        let s = self.structure();
        let mut acc = f.zero_like();
        let mut deriv = f.clone();
        let mut at = 0i64;
        for (p, c) in &self.terms {
            while at < *p {
                deriv = s.derive_all(&deriv);
                at += 1;
            }
            acc = acc.add(&c.mul(&deriv));
        }
        Ok(acc)
    }

    /// `D` applied to every coefficient.
    pub fn shift_coeffs(&self) -> Self {
        let s = self.base.clone();
        self.map_coeffs(|c| s.shift_all(c))
    }

    /// Formal adjoint: `(g D_q^j)* = (-1/q)^j D_{1/q}^j ∘ g^T`, in the `D_{1/q}` basis.
    /// Applied to an operator already in that basis it returns to the `D_q` basis.
    pub fn adjoint(&self) -> Result<Self> {
        let (target, factor) = match self.basis {
            Basis::Dq => (Basis::DInvQ, -self.base.q_value().recip()),
            Basis::DInvQ => (Basis::Dq, -self.base.q_value()),
        };
        let mut shell = self.with_terms(BTreeMap::new(), None);
        shell.basis = target;
        let mut acc = shell.clone();
        for (j, g) in &self.terms {
            let power = Self::from_terms(self.base.clone(), &self.zero, self.depth(), [(*j, self.zero.one_like())]);
            let mut power = power;
            power.basis = target;
            let mult = {
                let mut m = Self::multiplication(self.base.clone(), &g.transpose(), self.depth());
                m.basis = target;
                m
            };
            let term = power.compose(&mult)?.scale(&pow(&factor, *j));
            acc = acc.try_add(&term)?;
        }
        if let Some(l) = self.low {
            acc.low = Some(acc.low.map_or(l, |c| c.max(l)));
            acc.normalize();
        }
        Ok(acc)
    }

    /// `P|_{x/q}`: coefficient of `D_q^j` becomes `q^j g_j(x/q)`.
    pub fn shift_x_over_q(&self) -> Result<Self> {
        if self.basis != Basis::Dq {
            return Err(Error::BasisMismatch);
        }
        let q = self.base.q_value();
        let s = self.base.clone();
        let terms = self
            .terms
            .iter()
            .map(|(j, g)| (*j, s.unshift_all(g).scale(&pow(&q, *j))))
            .collect();
        Ok(self.with_terms(terms, self.low))
    }

    /// `res_{D_q}`: the coefficient of `D_q^{-1}`.
    pub fn res_dq(&self) -> Result<MZSeries> {
        self.coeff(-1)
    }

    fn check_band(&self) -> Result<()> {
        let limit = self.depth() as i64;
        for p in self.terms.keys() {
            if p.abs() > limit {
                return Err(Error::BandOverflow { power: *p, limit });
            }
        }
        Ok(())
    }

    fn z_free(&self) -> Result<BTreeMap<i64, Matrix<XSeries>>> {
        let mut out = BTreeMap::new();
        for (p, c) in &self.terms {
            if !c.is_exact() || c.terms().any(|(d, _)| d != 0) {
                return Err(Error::ZDependentCoefficient);
            }
            out.insert(*p, c.coeff_or_zero(0));
        }
        Ok(out)
    }

    /// Both sides of `res_{D_q}(P A^{-1} Q)` for z-free operators and diagonal `A`.
    pub fn residue_pairing(p: &QDOp, q_op: &QDOp, a: &[Scalar]) -> Result<Pairing> {
        p.check_compatible(q_op)?;
        if p.basis != Basis::Dq {
            return Err(Error::BasisMismatch);
        }
        p.check_band()?;
        q_op.check_band()?;
        let ps = p.z_free()?;
        let gs = q_op.z_free()?;
        let s = p.base.clone();
        let proto = p.zero.proto().clone();
        let n = p.zero.dim();
        let a_inv: Vec<Scalar> = a.iter().map(|x| x.recip()).collect();
        let a_inv = Matrix::diagonal_scalars(&proto, &a_inv);
        let minus_q = -s.q_value();

        let mut lhs = Matrix::zeros(&proto, n);
        for (k, pk) in &ps {
            if let Some(gl) = gs.get(&(-1 - k)) {
                let l = -1 - k;
                let term = pk.mul(&a_inv).mul(&s.unshift_all(gl)).scale(&pow(&minus_q, l));
                lhs = lhs.add(&term);
            }
        }

        let zfloor = p.zero.floor();
        let a_op = QDOp::multiplication(s.clone(), &MZSeries::constant(a_inv.clone(), zfloor), p.depth());
        let chain = p.compose(&a_op)?.compose(q_op)?;
        let rhs_naive = chain.res_dq()?.coeff(0)?;

        // principal-symbol product: p D_q^k ⋆ h D_q^l = p (D^k h) D_q^{k+l}
        let mut rhs_conv = Matrix::zeros(&proto, n);
        for (k, pk) in &ps {
            for (l, gl) in &gs {
                if k + l != -1 {
                    continue;
                }
                let sharp = s.shift_all_by(gl, *l).scale(&pow(&minus_q, *l));
                let term = pk.mul(&a_inv).mul(&s.shift_all_by(&sharp, *k));
                rhs_conv = rhs_conv.add(&term);
            }
        }
        Ok(Pairing {
            lhs,
            rhs_naive,
            rhs_conv,
        })
    }

    /// `[A, B]_q = (DA) ∘ B - B ∘ A`.
    pub fn q_commutator(a: &QDOp, b: &QDOp) -> Result<QDOp> {
        a.shift_coeffs().compose(b)?.try_sub(&b.compose(a)?)
    }

    /// First nonzero known coefficient, with its D_q power.
    pub fn first_nonzero(&self) -> Option<(i64, crate::zseries::ZTerm)> {
        self.terms
            .iter()
            .rev()
            .find_map(|(p, c)| c.first_nonzero_term().map(|t| (*p, t)))
    }

    pub fn is_zero_known(&self) -> bool {
        self.first_nonzero().is_none()
    }

    pub fn reach(&self) -> crate::coeff::Reach {
        let base = self.zero.reach();
        self.terms.values().map(|c| c.reach()).fold(base, crate::coeff::Reach::meet)
    }
}
