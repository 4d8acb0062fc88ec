//! τ-functions: Miwa shifts, Baker series from τ data, the q-shift of times
//! and the checks that a classical τ yields a q-deformed one.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::bilinear::{integrand_lhs, residue_window, MultiIndex};
use crate::coeff::Coeff;
use crate::difference::Difference;
use crate::error::{Error, Result};
use crate::hierarchy::FlowIndex;
use crate::matrix::Matrix;
use crate::scalar::{int, pow, QParam, Scalar};
use crate::timepoly::TimePoly;
use crate::xseries::XSeries;
use crate::zseries::ZSeries;

pub type TZSeries = ZSeries<TimePoly>;

/// A τ-function with its off-diagonal companions `τ_{αβ}` (0-based keys).
#[derive(Debug, Clone, PartialEq)]
pub struct TauData {
    a: Vec<Scalar>,
    tau: TimePoly,
    companions: BTreeMap<(usize, usize), TimePoly>,
}

impl TauData {
    pub fn new(
        a: Vec<Scalar>,
        tau: TimePoly,
        companions: BTreeMap<(usize, usize), TimePoly>,
    ) -> Result<Self> {
        let n = a.len();
        for (&(i, j), p) in &companions {
            if i >= n || j >= n || i == j {
                return Err(Error::Config(format!(
                    "companion tau_({},{}) out of range",
                    i + 1,
                    j + 1
                )));
            }
            if p.nx() != tau.nx() || p.nt() != tau.nt() {
                return Err(Error::TruncationMismatch(p.nx(), tau.nx()));
            }
        }
        tau.inverse()?;
        Ok(TauData { a, tau, companions })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Scalar] {
        &self.a
    }

    pub fn tau(&self) -> &TimePoly {
        &self.tau
    }

    pub fn companions(&self) -> &BTreeMap<(usize, usize), TimePoly> {
        &self.companions
    }

    /// `t -> t + [Ax]_q` on τ and every companion.
    pub fn q_shift(&self, q: &QParam) -> TauData {
        let f = |p: &TimePoly| p.q_shift_times(q, &self.a);
        TauData {
            a: self.a.clone(),
            tau: f(&self.tau),
            companions: self.companions.iter().map(|(k, p)| (*k, f(p))).collect(),
        }
    }

    /// τ followed by the companions, labelled.
    pub fn labelled(&self) -> Vec<(String, &TimePoly)> {
        let mut out = vec![("tau".to_string(), &self.tau)];
        for ((i, j), p) in &self.companions {
            out.push((format!("tau_{}{}", i + 1, j + 1), p));
        }
        out
    }
}

fn one_by_one(p: TimePoly, degree: i64, floor: i64) -> TZSeries {
    ZSeries::monomial(degree, Matrix::from_fn(1, |_, _| p.clone()), floor)
}

/// `t_{kβ} -> t_{kβ} - z^{-k}/k` for every variable of channel `beta`, as a 1×1 z-series.
pub fn miwa_shift(p: &TimePoly, beta: usize, floor: i64) -> TZSeries {
    let (nx, nt) = (p.nx(), p.nt());
    let proto = TimePoly::zero(nx, nt);
    let mut acc = TZSeries::zero(&proto, 1, floor);
    for (mono, c) in p.terms() {
        let mut term = one_by_one(TimePoly::constant(nt, c.clone()), 0, floor);
        for (v, e) in mono.powers() {
            let mut base = one_by_one(TimePoly::var(nx, nt, *v), 0, floor);
            if v.alpha == beta {
                let step = Scalar::new((-1).into(), (v.k as i64).into());
                base = base.add(&one_by_one(
                    TimePoly::scalar(nx, nt, step),
                    -(v.k as i64),
                    floor,
                ));
            }
            for _ in 0..*e {
                term = term.mul(&base);
            }
        }
        acc = acc.add(&term);
    }
    match p.known() {
        // the z^{-j} coefficient of a term of t-degree e has t-degree e - j
        Some(k) => ZSeries::from_terms(
            &proto,
            1,
            acc.terms().map(|(d, m)| {
                let j = (-d).max(0) as usize;
                (d, m.map(|c| c.with_known(k.saturating_sub(j))))
            }),
            acc.floor(),
            acc.low(),
        ),
        None => acc,
    }
}

/// `ŵ_{αα} = τ(t - [z^{-1}]_α)/τ`, `ŵ_{αβ} = z^{-1} τ_{αβ}(t - [z^{-1}]_β)/τ`.
pub fn baker_from_tau(data: &TauData, floor: i64) -> Result<TZSeries> {
    let n = data.n();
    let tau = &data.tau;
    let inv = tau.inverse()?;
    let proto = tau.zero_like();
    let mut coeffs: BTreeMap<i64, Matrix<TimePoly>> = BTreeMap::new();
    let mut low: Option<i64> = None;
    let mut put = |shifted: TZSeries, row: usize, col: usize, offset: i64| {
        if let Some(l) = shifted.low() {
            let l = l + offset;
            low = Some(low.map_or(l, |cur: i64| cur.max(l)));
        }
        for (d, m) in shifted.terms() {
            let slot = coeffs
                .entry(d + offset)
                .or_insert_with(|| Matrix::zeros(&proto, n));
            let value = if d + offset == 0 && row == col {
                proto.one_like()
            } else {
                m.get(0, 0).mul(&inv)
            };
            slot.set(row, col, value);
        }
    };
    for alpha in 0..n {
        put(miwa_shift(tau, alpha, floor), alpha, alpha, 0);
    }
    for (&(i, j), p) in &data.companions {
        put(miwa_shift(p, j, floor + 1), i, j, -1);
    }
    Ok(ZSeries::from_terms(&proto, n, coeffs, floor, low))
}

/// `∂/∂t_v` on every coefficient.
pub fn derive_t(w: &TZSeries, v: FlowIndex) -> TZSeries {
    w.map_matrices(|m| m.map(|p| p.derive(v)))
}

/// `t -> t + [Ax]_q` on every coefficient.
pub fn q_shift_series(w: &TZSeries, q: &QParam, a: &[Scalar]) -> TZSeries {
    w.map_matrices(|m| m.map(|p| p.q_shift_times(q, a)))
}

fn sorted(mu: &[FlowIndex]) -> Vec<FlowIndex> {
    let mut v = mu.to_vec();
    v.sort();
    v
}

/// `F_mu` with `∂^[mu] w = F_mu exp(sum z^k E_alpha t_{k alpha})`, memoized:
/// `F_{mu a} = ∂_a F_mu + F_mu z^k E_alpha`.
pub struct BakerFlows {
    w: TZSeries,
    cache: HashMap<Vec<FlowIndex>, TZSeries>,
}

impl BakerFlows {
    pub fn new(w: TZSeries) -> Self {
        BakerFlows {
            w,
            cache: HashMap::new(),
        }
    }

    pub fn w(&self) -> &TZSeries {
        &self.w
    }

    pub fn f(&mut self, mu: &[FlowIndex]) -> TZSeries {
        let key = sorted(mu);
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let value = match key.split_last() {
            None => self.w.clone(),
            Some((a, rest)) => {
                let prev = self.f(rest);
                let unit = Matrix::unit(prev.proto(), prev.dim(), a.alpha);
                let factor = ZSeries::monomial(a.k as i64, unit, prev.floor());
                derive_t(&prev, *a).add(&prev.mul(&factor))
            }
        };
        self.cache.insert(key, value.clone());
        value
    }
}

fn window(lhs: &TZSeries, w_inv: &TZSeries, l_max: usize) -> Result<TZSeries> {
    lhs.mul_window(w_inv, -1 - l_max as i64, -1)
}

/// Residues `res_z(z^l F_lambda ŵ^{-1})`, `l <= l_max`, of a classical (x-free) Baker series.
pub fn classical_residues(
    flows: &mut BakerFlows,
    w_inv: &TZSeries,
    lambda: &[FlowIndex],
    l_max: usize,
) -> Result<TZSeries> {
    window(&flows.f(lambda), w_inv, l_max)
}

/// Fails unless every classical residue vanishes on its known range.
pub fn classical_precheck(w: &TZSeries, lambdas: &[MultiIndex], l_max: usize) -> Result<()> {
    let w_inv = w.invert()?;
    let mut flows = BakerFlows::new(w.clone());
    for lambda in lambdas {
        let r = classical_residues(&mut flows, &w_inv, lambda, l_max)?;
        if let Some(t) = r.first_nonzero_term() {
            return Err(Error::ClassicalPrecheck(format!(
                "lambda {}: z^{} entry ({},{}) = {}",
                crate::bilinear::format_multi_index(lambda),
                t.z_degree,
                t.row + 1,
                t.col + 1,
                crate::scalar::fmt_scalar(&t.term.value)
            )));
        }
    }
    Ok(())
}

/// Direct residues of the q-bilinear identity on a q-shifted Baker series.
pub fn q_bilinear_direct(
    q: &QParam,
    a: &[Scalar],
    flows: &mut BakerFlows,
    w_inv: &TZSeries,
    lambda: &[FlowIndex],
    m: u8,
    l_max: usize,
) -> Result<TZSeries> {
    let diff = Difference::Q(q.clone());
    window(&integrand_lhs(&diff, a, &flows.f(lambda), m), w_inv, l_max)
}

/// Multisets of flows `(k, beta)`, `beta < n`, of total weight `1..=max_weight`, sorted.
pub fn weighted_multisets(n: usize, max_weight: usize) -> Vec<Vec<FlowIndex>> {
    fn go(
        n: usize,
        left: usize,
        start: FlowIndex,
        cur: &mut Vec<FlowIndex>,
        out: &mut Vec<Vec<FlowIndex>>,
    ) {
        for k in start.k..=left {
            let first = if k == start.k { start.alpha } else { 0 };
            for alpha in first..n {
                let v = FlowIndex { k, alpha };
                cur.push(v);
                out.push(cur.clone());
                go(n, left - k, v, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, max_weight, FlowIndex { k: 1, alpha: 0 }, &mut Vec::new(), &mut out);
    out
}

/// Combined validity of a residue window: the smallest `known` bound, `None` if exact.
fn window_validity(r: &TZSeries) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (_, m) in r.terms() {
        for (_, _, p) in m.entries() {
            if let Some(k) = p.known() {
                best = Some(best.map_or(k, |b| b.min(k)));
            }
        }
    }
    best
}

/// The Taylor-extension evaluation of the m = 1 residues:
/// `sum_{eta != 0} delta^eta/eta! / (x(q-1)) * res_z(z^l F_{lambda+eta} ŵ_q^{-1})`
/// with `delta_{k beta} = -(1-q)^k (a_beta x)^k / k`.
pub fn q_bilinear_taylor(
    q: &QParam,
    a: &[Scalar],
    flows: &mut BakerFlows,
    w_inv: &TZSeries,
    lambda: &[FlowIndex],
    l_max: usize,
    max_weight: usize,
) -> Result<TZSeries> {
    let proto = w_inv.proto().clone();
    let nx = proto.nx();
    let one = Scalar::one();
    let one_minus_q = &one - q.value();
    let q_minus_one = q.value() - &one;
    let mut acc = TZSeries::zero(&proto, w_inv.dim(), w_inv.floor()).mul_window(
        w_inv,
        -1 - l_max as i64,
        -1,
    )?;
    for eta in weighted_multisets(a.len(), max_weight) {
        let mut coef = Scalar::one() / &q_minus_one;
        let mut weight = 0usize;
        let mut run = 0u32;
        for (i, v) in eta.iter().enumerate() {
            run = if i > 0 && eta[i - 1] == *v { run + 1 } else { 1 };
            let delta = -pow(&one_minus_q, v.k as i64) * pow(&a[v.alpha], v.k as i64)
                / int(v.k as i64);
            coef = coef * delta / int(run as i64);
            weight += v.k;
        }
        if coef.is_zero() {
            continue;
        }
        let mut mu = lambda.to_vec();
        mu.extend(eta.iter().copied());
        let g = window(&flows.f(&mu), w_inv, l_max)?;
        let factor = XSeries::monomial(nx, weight - 1, coef);
        acc = acc.add(&g.map_matrices(|m| m.map(|p| p.map_x(&|c| c.mul(&factor)))));
    }
    Ok(acc)
}

/// Largest η weight whose terms can reach the known part of a direct residue window.
pub fn taylor_weight(direct: &TZSeries, nx: usize) -> usize {
    match window_validity(direct) {
        Some(k) => k.min(nx + 1),
        None => nx + 1,
    }
}

fn weight(lambda: &[FlowIndex]) -> usize {
    lambda.iter().map(|v| v.k).sum()
}

/// Storage floor at which every Taylor term up to weight `nx + 1` still reaches `z^{-1-l_max}`.
pub fn taylor_floor(l_max: usize, lambda_weight: usize, nx: usize) -> i64 {
    -((l_max + lambda_weight + nx + 2) as i64)
}

/// Channel-wise `exp_q(z a x) exp(sum z^k t_k) - exp(sum z^k t'_k)` through `z^{z_max}`,
/// stored as a diagonal series of positive degrees.
pub fn verify_exp_shift(q: &QParam, a: &[Scalar], nx: usize, nt: usize, z_max: usize) -> Result<TZSeries> {
    let n = a.len();
    let proto = TimePoly::zero(nx, nt);
    let exp_series = |y: &[TimePoly]| -> Vec<TimePoly> {
        // j h_j = sum_k k y_k h_{j-k}
        let mut h = vec![proto.one_like()];
        for j in 1..=z_max {
            let mut s = proto.zero_like();
            for k in 1..=j {
                s = s.add(&y[k].mul(&h[j - k]).scale(&int(k as i64)));
            }
            h.push(s.scale(&Scalar::new(1.into(), (j as i64).into())));
        }
        h
    };
    let one_minus_q = Scalar::one() - q.value();
    let mut coeffs: BTreeMap<i64, Matrix<TimePoly>> = BTreeMap::new();
    for (alpha, a_alpha) in a.iter().enumerate() {
        let mut y = vec![proto.zero_like()];
        let mut y_shift = vec![proto.zero_like()];
        let mut e = vec![proto.one_like()];
        for k in 1..=z_max {
            let t = TimePoly::var(nx, nt, FlowIndex { k, alpha });
            let amount = q.shift_coefficient(k) * pow(a_alpha, k as i64);
            y_shift.push(t.add(&TimePoly::constant(nt, XSeries::monomial(nx, k, amount))));
            y.push(t);
            let c = pow(a_alpha, k as i64) * pow(&one_minus_q, k as i64) / q.pochhammer(k);
            e.push(TimePoly::constant(nt, XSeries::monomial(nx, k, c)));
        }
        let h = exp_series(&y);
        let rhs = exp_series(&y_shift);
        for j in 0..=z_max {
            let mut lhs = proto.zero_like();
            for i in 0..=j {
                lhs = lhs.add(&e[i].mul(&h[j - i]));
            }
            coeffs
                .entry(j as i64)
                .or_insert_with(|| Matrix::zeros(&proto, n))
                .set(alpha, alpha, lhs.sub(&rhs[j]));
        }
    }
    Ok(ZSeries::from_terms(&proto, n, coeffs, 0, None))
}

/// Everything `verify_tau_identities` evaluates, as named residuals.
#[derive(Debug, Clone)]
pub struct TauOutcome {
    pub commutation: TZSeries,
    pub exp_shift: TZSeries,
    pub direct: Vec<(MultiIndex, u8, TZSeries)>,
    pub taylor: Vec<(MultiIndex, TZSeries)>,
}

/// Classical precheck, then the q-side checks on `ŵ_q = ŵ(t + [Ax]_q)`.
pub fn verify_tau_identities(
    data: &TauData,
    q: &QParam,
    lambdas: &[MultiIndex],
    l_max: usize,
    floor: i64,
    z_max: usize,
) -> Result<TauOutcome> {
    let nx = data.tau.nx();
    let heaviest = lambdas.iter().map(|l| weight(l)).max().unwrap_or(0);
    let floor = floor.min(taylor_floor(l_max, heaviest, nx));
    let w = baker_from_tau(data, floor)?;
    classical_precheck(&w, lambdas, l_max)?;
    let shifted = data.q_shift(q);
    let wq = baker_from_tau(&shifted, floor)?;
    let commutation = wq.sub(&q_shift_series(&w, q, &data.a));
    let exp_shift = verify_exp_shift(q, &data.a, nx, data.tau.nt(), z_max)?;
    let wq_inv = wq.invert()?;
    let mut flows = BakerFlows::new(wq);
    let mut direct = Vec::new();
    let mut taylor = Vec::new();
    for lambda in lambdas {
        for m in 0..2u8 {
            let r = q_bilinear_direct(q, &data.a, &mut flows, &wq_inv, lambda, m, l_max)?;
            if m == 1 {
                let weight = taylor_weight(&r, nx);
                let t = q_bilinear_taylor(q, &data.a, &mut flows, &wq_inv, lambda, l_max, weight)?;
                taylor.push((lambda.clone(), residue_window(&t.sub(&r), l_max)));
            }
            direct.push((lambda.clone(), m, r));
        }
    }
    Ok(TauOutcome {
        commutation,
        exp_shift,
        direct,
        taylor,
    })
}

/// Residual of `D_q p_q = sum_beta a_beta ∂_{1 beta} p_q` at one `q`.
pub fn limit_residual(p: &TimePoly, a: &[Scalar], q: &QParam) -> TimePoly {
    let shifted = p.q_shift_times(q, a);
    let mut r = shifted.map_x(&|f| f.q_derive(q));
    for (beta, a_beta) in a.iter().enumerate() {
        r = r.sub(&shifted.derive(FlowIndex { k: 1, alpha: beta }).scale(a_beta));
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub qs: Vec<Scalar>,
    pub sizes: Vec<Scalar>,
    pub ratios: Vec<Scalar>,
}

impl LimitReport {
    /// Every successive ratio lies in `[lo, hi]`, or every residual vanishes.
    pub fn passes(&self, lo: &Scalar, hi: &Scalar) -> bool {
        if self.sizes.iter().all(Zero::is_zero) {
            return true;
        }
        self.ratios.len() + 1 == self.sizes.len() && self.ratios.iter().all(|r| r >= lo && r <= hi)
    }
}

/// Residual sizes along `q = 1 + 2^{-m}` and their successive ratios.
pub fn classical_limit_check(p: &TimePoly, a: &[Scalar], ms: &[u32]) -> Result<LimitReport> {
    let mut qs = Vec::new();
    let mut sizes = Vec::new();
    for m in ms {
        let q = QParam::new(
            Scalar::one() + Scalar::new(1.into(), num_bigint::BigInt::from(2).pow(*m)),
            p.nx(),
        )?;
        sizes.push(limit_residual(p, a, &q).max_abs());
        qs.push(q.value().clone());
    }
    let ratios = sizes
        .windows(2)
        .filter(|w| !w[0].is_zero())
        .map(|w| &w[1] / &w[0])
        .collect();
    Ok(LimitReport { qs, sizes, ratios })
}

/// Like [`classical_limit_check`] but fails when the ratios leave `[lo, hi]`.
pub fn require_linear_limit(
    p: &TimePoly,
    a: &[Scalar],
    ms: &[u32],
    lo: &Scalar,
    hi: &Scalar,
) -> Result<LimitReport> {
    let report = classical_limit_check(p, a, ms)?;
    if !report.passes(lo, hi) {
        let shown: Vec<String> = report.ratios.iter().map(crate::scalar::fmt_scalar).collect();
        return Err(Error::NonShrinking(format!("ratios [{}]", shown.join(", "))));
    }
    Ok(report)
}
