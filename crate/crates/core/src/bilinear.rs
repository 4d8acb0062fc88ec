//! Baker-function identities at the level of the dressing series.
//!
//! The exponential factors `exp_q(zAx)` and `exp(sum z^k E_alpha t_{k alpha})`
//! are never expanded: every identity is first reduced to an expression in
//! `ŵ`, its flow derivatives and `ŵ^{-1}`.

use std::collections::HashMap;

use crate::coeff::Coeff;
use crate::difference::Difference;
use crate::error::{Error, Result};
use crate::hierarchy::{b_split, FlowIndex, LaxData, Resolvent, XMatrix};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::zseries::{MZSeries, ZSeries};

/// An ordered list of flows `[lambda]`; flows commute, so order only matters for display.
pub type MultiIndex = Vec<FlowIndex>;

pub fn format_multi_index(lambda: &[FlowIndex]) -> String {
    let parts: Vec<String> = lambda.iter().map(|f| f.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn sorted(mu: &[FlowIndex]) -> Vec<FlowIndex> {
    let mut v = mu.to_vec();
    v.sort();
    v
}

/// All sub-multisets of `mu` taken by position, paired with their complements.
fn splits(mu: &[FlowIndex]) -> Vec<(Vec<FlowIndex>, Vec<FlowIndex>)> {
    let n = mu.len();
    (0..(1u32 << n))
        .map(|mask| {
            let (mut inside, mut outside) = (Vec::new(), Vec::new());
            for (i, f) in mu.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    inside.push(*f);
                } else {
                    outside.push(*f);
                }
            }
            (inside, outside)
        })
        .collect()
}

/// Flow derivatives of resolvents and of the `B` generators, memoized.
///
/// `∂_a R_b = [B_a, R_b]`, extended to higher derivatives by Leibniz, and
/// `∂^nu B_{k alpha} = (z^k ∂^nu R_alpha)_+`.
pub struct FlowCalculus<'a> {
    resolvents: &'a [Resolvent],
    cache: HashMap<(Vec<FlowIndex>, usize), MZSeries>,
}

impl<'a> FlowCalculus<'a> {
    pub fn new(resolvents: &'a [Resolvent]) -> Self {
        FlowCalculus {
            resolvents,
            cache: HashMap::new(),
        }
    }

    pub fn d_resolvent(&mut self, mu: &[FlowIndex], beta: usize) -> MZSeries {
        let key = (sorted(mu), beta);
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let value = match key.0.split_last() {
            None => self.resolvents[beta].r.clone(),
            Some((a, rest)) => {
                let mut acc = self.resolvents[beta].r.zero_like();
                for (nu, other) in splits(rest) {
                    let b = self.d_b(&nu, *a);
                    let r = self.d_resolvent(&other, beta);
                    acc = acc.add(&b.commutator(&r));
                }
                acc
            }
        };
        self.cache.insert(key, value.clone());
        value
    }

    fn shifted(&mut self, nu: &[FlowIndex], a: FlowIndex) -> MZSeries {
        self.d_resolvent(nu, a.alpha).shift(a.k as i64)
    }

    /// `∂^nu B_a`.
    pub fn d_b(&mut self, nu: &[FlowIndex], a: FlowIndex) -> MZSeries {
        self.shifted(nu, a).plus()
    }

    /// `∂^nu B̄_a`.
    pub fn d_bbar(&mut self, nu: &[FlowIndex], a: FlowIndex) -> MZSeries {
        self.shifted(nu, a).minus()
    }
}

/// `f(B)` with `∂^[lambda] w = f(B) w`, built from
/// `f(lambda a) = ∂_a f(lambda) + f(lambda) B_a`.
pub fn flow_polynomial(lambda: &[FlowIndex], calc: &mut FlowCalculus<'_>, identity: &MZSeries) -> Result<MZSeries> {
    // a word is a product of factors ∂^nu B_a
    type Word = Vec<(Vec<FlowIndex>, FlowIndex)>;
    let mut words: Vec<Word> = vec![Vec::new()];
    for a in lambda {
        let mut next = Vec::new();
        for w in &words {
            for p in 0..w.len() {
                let mut d = w.clone();
                d[p].0.push(*a);
                next.push(d);
            }
            let mut e = w.clone();
            e.push((Vec::new(), *a));
            next.push(e);
        }
        words = next;
    }
    let mut acc = identity.zero_like();
    for w in &words {
        let mut prod = identity.clone();
        for (nu, a) in w {
            let b = calc.d_b(nu, *a);
            if !b.is_exact() {
                return Err(Error::InsufficientDepth {
                    what: format!("flow polynomial {}", format_multi_index(lambda)),
                    needed: 0,
                    known: b.known_low(),
                });
            }
            prod = prod.mul(&b);
        }
        acc = acc.add(&prod);
    }
    Ok(acc)
}

/// Degrees `-1 - l_max ..= -1` of `g`: the residues `res_z(z^l g)` for `l <= l_max`.
pub fn residue_window<C: Coeff>(g: &ZSeries<C>, l_max: usize) -> ZSeries<C> {
    let bottom = -1 - l_max as i64;
    let low = g.known_low().max(bottom);
    ZSeries::from_terms(
        g.proto(),
        g.dim(),
        g.terms()
            .filter(|(d, _)| (bottom..=-1).contains(d))
            .map(|(d, m)| (d, m.clone())),
        g.floor().min(bottom),
        Some(low),
    )
}

/// Reduced form: `res_z(z^l f)` (m = 0) or `res_z(z^l (D_q f + (Df)(zA - U)))` (m = 1).
pub fn reduced_bilinear(l: &LaxData, f: &MZSeries, m: u8, l_max: usize) -> MZSeries {
    let g = match m {
        0 => f.clone(),
        _ => {
            let s = l.diff();
            s.derive_all(f).add(&s.shift_all(f).mul(&l.potential().neg()))
        }
    };
    residue_window(&g, l_max)
}

/// `z^k E_alpha` over the carrier of `proto`.
pub fn flow_factor<C: Coeff>(proto: &C, n: usize, a: FlowIndex, floor: i64) -> ZSeries<C> {
    ZSeries::monomial(a.k as i64, Matrix::unit(proto, n, a.alpha), floor)
}

/// `F_lambda = sum_{nu ⊆ lambda} (∂^{lambda \ nu} ŵ) prod_{b in nu} z^{k_b} E_{alpha_b}`,
/// so that `∂^[lambda] w = F_lambda exp(...)`.
pub fn baker_derivative<C: Coeff>(
    lambda: &[FlowIndex],
    d_w: &mut dyn FnMut(&[FlowIndex]) -> Result<ZSeries<C>>,
) -> Result<ZSeries<C>> {
    let mut acc: Option<ZSeries<C>> = None;
    for (nu, rest) in splits(lambda) {
        let mut term = d_w(&rest)?;
        for b in &nu {
            term = term.mul(&flow_factor(term.proto(), term.dim(), *b, term.floor()));
        }
        acc = Some(match acc {
            Some(a) => a.add(&term),
            None => term,
        });
    }
    Ok(acc.expect("the empty split always exists"))
}

/// `F` (m = 0) or `(DF) zA + D_q F` (m = 1): `∂^[lambda] w` after one `D_q`, stripped of
/// the exponential factors.
pub fn integrand_lhs<C: Coeff>(diff: &Difference, a: &[Scalar], f: &ZSeries<C>, m: u8) -> ZSeries<C> {
    match m {
        0 => f.clone(),
        _ => {
            let za = ZSeries::monomial(1, Matrix::diagonal_scalars(f.proto(), a), f.floor());
            diff.shift_all(f).mul(&za).add(&diff.derive_all(f))
        }
    }
}

/// The direct q-bilinear expression before taking residues:
/// `F ŵ^{-1}` (m = 0) or `((DF) zA + D_q F) ŵ^{-1}` (m = 1).
pub fn bilinear_integrand<C: Coeff>(
    diff: &Difference,
    a: &[Scalar],
    f: &ZSeries<C>,
    w_inv: &ZSeries<C>,
    m: u8,
) -> ZSeries<C> {
    integrand_lhs(diff, a, f, m).mul(w_inv)
}

/// Flow derivatives of a solved dressing, `∂_a ŵ = -B̄_a ŵ`, memoized.
pub struct DressingFlows<'a> {
    w: &'a MZSeries,
    calc: FlowCalculus<'a>,
    cache: HashMap<Vec<FlowIndex>, MZSeries>,
}

impl<'a> DressingFlows<'a> {
    /// `resolvents` must be the conjugates `ŵ E_alpha ŵ^{-1}` of the same `ŵ`.
    pub fn new(w: &'a MZSeries, resolvents: &'a [Resolvent]) -> Self {
        DressingFlows {
            w,
            calc: FlowCalculus::new(resolvents),
            cache: HashMap::new(),
        }
    }

    pub fn d_w(&mut self, mu: &[FlowIndex]) -> MZSeries {
        let key = sorted(mu);
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let value = match key.split_last() {
            None => self.w.clone(),
            Some((a, rest)) => {
                let mut acc = self.w.zero_like();
                for (nu, other) in splits(rest) {
                    let bbar = self.calc.d_bbar(&nu, *a);
                    acc = acc.sub(&bbar.mul(&self.d_w(&other)));
                }
                acc
            }
        };
        self.cache.insert(key, value.clone());
        value
    }
}

/// Residue window of the direct q-bilinear identity for one `(m, lambda)`.
pub fn direct_bilinear(
    l: &LaxData,
    flows: &mut DressingFlows<'_>,
    w_inv: &MZSeries,
    lambda: &[FlowIndex],
    m: u8,
    l_max: usize,
) -> Result<MZSeries> {
    let f = baker_derivative(lambda, &mut |mu: &[FlowIndex]| Ok(flows.d_w(mu)))?;
    Ok(residue_window(
        &bilinear_integrand(l.diff(), l.a(), &f, w_inv, m),
        l_max,
    ))
}

/// `ŵ* = (ŵ^{-1})^T`.
pub fn adjoint_baker(w: &MZSeries) -> Result<MZSeries> {
    Ok(w.invert()?.transpose())
}

/// `ŵ (ŵ*)^T - I`.
pub fn inverse_transpose_residual(w: &MZSeries, w_star: &MZSeries) -> MZSeries {
    w.mul(&w_star.transpose()).sub(&w.one_like())
}

/// `(D_q w) w^{-1} = (Dŵ) zA ŵ^{-1} + (D_q ŵ) ŵ^{-1}`.
pub fn log_derivative(diff: &Difference, a: &[Scalar], w: &MZSeries) -> Result<MZSeries> {
    Ok(bilinear_integrand(diff, a, w, &w.invert()?, 1))
}

/// Recovers `(A, U)` from `(D_q w) w^{-1} = zA - U`.
pub fn reconstruct_from_bilinear(
    diff: &Difference,
    a: &[Scalar],
    w: &MZSeries,
    nz: usize,
) -> Result<LaxData> {
    let m = log_derivative(diff, a, w)?;
    if let Some(t) = m.top_degree() {
        if t > 1 {
            return Err(Error::InvalidLax(format!("z-degree {t} in D_q w * w^-1")));
        }
    }
    for (d, c) in m.terms() {
        if d < 0 && !c.is_zero_known() {
            return Err(Error::NegativeDegrees { degree: d });
        }
    }
    let top = m.coeff(1)?;
    let n = top.dim();
    let mut a_rec = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            let e = top.get(i, j);
            let off = if i == j { e.sub(&e.constant_like(&e.coeff(0))) } else { e.clone() };
            if !off.is_zero_known() {
                return Err(Error::InvalidLax("top symbol is not a constant diagonal".into()));
            }
        }
        a_rec.push(top.get(i, i).coeff(0));
    }
    let u: XMatrix = m.coeff(0)?.neg();
    LaxData::new(diff.clone(), a_rec, u, nz)
}

/// Adds a constant to the `(1,1)` entry of `w_1`: a deliberately broken dressing.
pub fn corrupt_dressing(w: &MZSeries) -> MZSeries {
    let n = w.dim();
    let e = Matrix::unit(w.proto(), n, 0);
    w.add(&MZSeries::monomial(-1, e, w.floor()))
}

/// Splits every `B_{k alpha}` needed by a set of flows; fails on insufficient depth.
pub fn check_depth(resolvents: &[Resolvent], flows: &[FlowIndex]) -> Result<()> {
    for f in flows {
        b_split(&resolvents[f.alpha], f.k)?;
    }
    Ok(())
}
