//! The verification suite: every identity as a named, independently runnable check.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::bilinear::{
    adjoint_baker, corrupt_dressing, direct_bilinear, flow_polynomial, format_multi_index,
    inverse_transpose_residual, reconstruct_from_bilinear, reduced_bilinear, DressingFlows,
    FlowCalculus, MultiIndex,
};
use crate::coeff::Coeff;
use crate::config::{RunConfig, Setup};
use crate::difference::Difference;
use crate::error::{Error, Result};
use crate::hierarchy::{
    b_split, dressing_residual, flow_operator, multiplication_part, orthogonality_residual,
    partition_residual, resolvent_from_dressing, resolvent_residual, solve_dressing,
    solve_resolvent_direct, zero_curvature_residual, Dressing, LaxData, Normalization,
    Resolvent,
};
use crate::matrix::Matrix;
use crate::qop::QDOp;
use crate::report::{CheckRecord, Evidence, Report, Residual};
use crate::scalar::{fmt_scalar, int, pow, QParam, Scalar};
use crate::tau::{require_linear_limit, verify_tau_identities, TauOutcome};
use crate::xseries::XSeries;
use crate::zseries::MZSeries;

/// Deliberate defects, used to show that the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Injection {
    /// Adds a constant to the `(1,1)` entry of `w_1` in every solved dressing.
    CorruptDressing,
}

impl std::str::FromStr for Injection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrupt_dressing" => Ok(Injection::CorruptDressing),
            other => Err(Error::Config(format!("unknown injection {other:?}"))),
        }
    }
}

/// Solver outputs for one difference structure, computed on first use.
struct Solved {
    lax: LaxData,
    depth_j: usize,
    depth_k: usize,
    inject: bool,
    resolvents: OnceLock<Result<Vec<Resolvent>>>,
    idempotent: OnceLock<Result<Vec<Resolvent>>>,
    dressing: OnceLock<Result<Dressing>>,
    shallow: OnceLock<Result<Dressing>>,
    dressed: OnceLock<Result<Vec<Resolvent>>>,
}

impl Solved {
    fn new(lax: LaxData, depth_j: usize, depth_k: usize, inject: bool) -> Self {
        Solved {
            lax,
            depth_j,
            depth_k,
            inject,
            resolvents: OnceLock::new(),
            idempotent: OnceLock::new(),
            dressing: OnceLock::new(),
            shallow: OnceLock::new(),
            dressed: OnceLock::new(),
        }
    }

    fn resolve(&self, norm: Normalization) -> Result<Vec<Resolvent>> {
        (0..self.lax.n())
            .map(|a| solve_resolvent_direct(&self.lax, a, self.depth_j, norm))
            .collect()
    }

    fn resolvents(&self) -> Result<&[Resolvent]> {
        let r = self.resolvents.get_or_init(|| self.resolve(Normalization::ZeroConstant));
        r.as_deref().map_err(Clone::clone)
    }

    fn idempotent(&self) -> Result<&[Resolvent]> {
        let r = self.idempotent.get_or_init(|| self.resolve(Normalization::Idempotent));
        r.as_deref().map_err(Clone::clone)
    }

    fn dress(&self, depth: usize) -> Result<Dressing> {
        let mut d = solve_dressing(&self.lax, depth)?;
        if self.inject {
            d.w = corrupt_dressing(&d.w);
        }
        Ok(d)
    }

    fn dressing(&self) -> Result<&Dressing> {
        self.dressing
            .get_or_init(|| self.dress(self.depth_k))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// The first-order dressing, enough for `R^(1)`.
    fn shallow(&self) -> Result<&Dressing> {
        self.shallow
            .get_or_init(|| self.dress(1))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn dressed(&self) -> Result<&[Resolvent]> {
        let r = self.dressed.get_or_init(|| {
            let d = self.dressing()?;
            (0..self.lax.n())
                .map(|a| resolvent_from_dressing(&self.lax, d, a))
                .collect()
        });
        r.as_deref().map_err(Clone::clone)
    }
}

struct Shared {
    setup: Setup,
    q: Solved,
    classical: Option<Solved>,
    tau: OnceLock<Result<TauOutcome>>,
}

impl Shared {
    fn solved(&self, classical: bool) -> Result<&Solved> {
        if classical {
            self.classical
                .as_ref()
                .ok_or_else(|| Error::Config("classical structure disabled".into()))
        } else {
            Ok(&self.q)
        }
    }

    fn tau(&self) -> Result<&TauOutcome> {
        let s = &self.setup;
        self.tau
            .get_or_init(|| {
                let t = s.tau.as_ref().ok_or_else(|| Error::Config("no tau configured".into()))?;
                verify_tau_identities(
                    &t.data,
                    &s.q,
                    &s.lambdas,
                    s.config.l_max,
                    -(s.config.nz as i64),
                    exp_shift_depth(&s.config),
                )
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

type Runner = Box<dyn Fn(&Shared) -> Result<Evidence> + Send + Sync>;

struct Check {
    name: &'static str,
    params: BTreeMap<String, String>,
    run: Runner,
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn check(
    name: &'static str,
    p: &[(&str, String)],
    run: impl Fn(&Shared) -> Result<Evidence> + Send + Sync + 'static,
) -> Check {
    Check {
        name,
        params: params(p),
        run: Box::new(run),
    }
}

fn x_ev(f: &XSeries) -> Evidence {
    Matrix::from_fn(1, |_, _| f.clone()).evidence()
}

fn all(items: impl IntoIterator<Item = Evidence>) -> Evidence {
    items
        .into_iter()
        .reduce(Evidence::and)
        .unwrap_or_else(|| Evidence::condition(true, ""))
}

/// A fixed generic test function: coefficients `(k+1)/(k+2)` with alternating sign.
fn test_function(nx: usize, shift: i64) -> XSeries {
    let c: Vec<Scalar> = (0..=nx as i64)
        .map(|k| Scalar::new((k + 1 + shift).into(), (k + 2).into()) * int(if k % 2 == 0 { 1 } else { -1 }))
        .collect();
    XSeries::polynomial(nx, &c).expect("fits N_x")
}

fn q_calculus_checks(qs: &[QParam], nx: usize) -> Vec<Check> {
    let mut out = Vec::new();
    for q in qs {
        let qv = || vec![("q", fmt_scalar(q.value()))];
        let qc = q.clone();
        out.push(check("core.power_additivity", &qv(), move |_| {
            let f = test_function(nx, 0);
            let mut powers = vec![f.clone()];
            for _ in 0..nx {
                let next = powers.last().unwrap().q_derive(&qc);
                powers.push(next);
            }
            let mut ev = Vec::new();
            for m in 0..=nx {
                for n in 0..=(nx - m) {
                    let mut g = powers[m].clone();
                    for _ in 0..n {
                        g = g.q_derive(&qc);
                    }
                    ev.push(x_ev(&g.sub(&powers[m + n])));
                }
            }
            Ok(all(ev))
        }));
        let qc = q.clone();
        out.push(check("core.q_leibniz", &qv(), move |_| {
            let d = Difference::Q(qc.clone());
            let f = test_function(nx, 0);
            let g = test_function(nx, 3);
            let lhs = d.derive(&f.mul(&g));
            let first = d.shift(&f).mul(&d.derive(&g)).add(&d.derive(&f).mul(&g));
            let second = f.mul(&d.derive(&g)).add(&d.derive(&f).mul(&d.shift(&g)));
            Ok(x_ev(&lhs.sub(&first)).and(x_ev(&lhs.sub(&second))))
        }));
        let qc = q.clone();
        out.push(check("core.exp_q_eigen", &qv(), move |_| {
            let mut ev = Vec::new();
            for c in [int(1), Scalar::new((-3).into(), 2.into())] {
                let e = XSeries::exp_q(nx, &qc, &c)?;
                ev.push(x_ev(&e.q_derive(&qc).sub(&e.scale(&c))));
            }
            Ok(all(ev))
        }));
        let qc = q.clone();
        out.push(check("core.exp_q_log", &qv(), move |_| {
            let e = XSeries::exp_q(nx, &qc, &Scalar::one())?;
            let args: Vec<(usize, Scalar)> = (1..=nx).map(|k| (k, qc.shift_coefficient(k))).collect();
            Ok(x_ev(&e.sub(&XSeries::exp(nx, &args)?)))
        }));
        let qc = q.clone();
        out.push(check("core.exp_q_inverse", &qv(), move |_| {
            let e = XSeries::exp_q(nx, &qc, &Scalar::one())?;
            let f = XSeries::exp_q(nx, &qc.inverse(), &int(-1))?;
            Ok(x_ev(&e.mul(&f).sub(&XSeries::one(nx))))
        }));
    }
    out.push(check("core.z_invert", &[], move |_| {
        let proto = XSeries::zero(nx);
        let m = |s: i64| Matrix::from_fn(2, |i, j| test_function(nx, s + (2 * i + j) as i64));
        let s = MZSeries::from_terms(
            &proto,
            2,
            [(0, Matrix::identity(&proto, 2)), (-1, m(0)), (-2, m(5))],
            -6,
            None,
        );
        let inv = s.invert()?;
        Ok(s.mul(&inv).sub(&s.one_like()).evidence().and(inv.invert()?.sub(&s).evidence()))
    }));
    out
}

/// A random z-free operator with powers in `-2..=2` and small integer coefficients.
pub fn random_operator(rng: &mut StdRng, diff: &Difference, n: usize, nx: usize, nd: usize) -> QDOp {
    let proto = XSeries::zero(nx);
    let zero = MZSeries::zero(&proto, n, -1);
    let mut terms = Vec::new();
    for p in -2..=2i64 {
        if rng.gen_bool(0.35) {
            continue;
        }
        let m = Matrix::from_fn(n, |_, _| {
            let c: Vec<Scalar> = (0..3).map(|_| int(rng.gen_range(-3..=3))).collect();
            XSeries::polynomial(nx, &c).expect("fits N_x")
        });
        terms.push((p, MZSeries::constant(m, -1)));
    }
    QDOp::from_terms(diff.clone(), &zero, nd, terms)
}

fn qop_checks(s: &Setup) -> Vec<Check> {
    let c = &s.config;
    let (n, nx, nd, pairs, seed) = (c.n, c.nx, c.nd.max(2), c.pairs, c.seed);
    let diff = Difference::Q(s.q.clone());
    let a = s.lax.a().to_vec();
    let mut out = Vec::new();
    let (d, aa) = (diff.clone(), a.clone());
    out.push(check(
        "qop.residue_pairing",
        &[("pairs", pairs.to_string()), ("seed", seed.to_string())],
        move |_| {
            let mut rng = StdRng::seed_from_u64(seed);
            let mut ev = Vec::new();
            for _ in 0..pairs {
                let p = random_operator(&mut rng, &d, n, nx, nd);
                let q = random_operator(&mut rng, &d, n, nx, nd);
                let pr = QDOp::residue_pairing(&p, &q, &aa)?;
                ev.push(pr.lhs.sub(&pr.rhs_conv).evidence());
            }
            Ok(all(ev))
        },
    ));
    let d = diff.clone();
    out.push(check("qop.pairing_example", &[], move |_| {
        // P = D_q, Q = g D_q^{-2}, n = 1, A = (1): the pairing is q^{-2} g(x/q)
        let q = d.q_value();
        let proto = XSeries::zero(nx);
        let zero = MZSeries::zero(&proto, 1, -1);
        let g = test_function(nx, 1);
        let gm = MZSeries::constant(Matrix::from_fn(1, |_, _| g.clone()), -1);
        let p = QDOp::power(d.clone(), &zero, nd, 1);
        let qo = QDOp::from_terms(d.clone(), &zero, nd, [(-2, gm)]);
        let pr = QDOp::residue_pairing(&p, &qo, &[int(1)])?;
        let expect = g.scale_each(|k| pow(&q, -(k as i64) - 2));
        Ok(x_ev(&pr.lhs.get(0, 0).sub(&expect)).and(pr.lhs.sub(&pr.rhs_conv).evidence()))
    }));
    let d = diff.clone();
    out.push(check(
        "qop.compose_associativity",
        &[("seed", seed.to_string())],
        move |_| {
            let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
            let mut ev = Vec::new();
            for _ in 0..8 {
                let x = random_operator(&mut rng, &d, n, nx, nd);
                let y = random_operator(&mut rng, &d, n, nx, nd);
                let z = random_operator(&mut rng, &d, n, nx, nd);
                let l = x.compose(&y)?.compose(&z)?;
                let r = x.compose(&y.compose(&z)?)?;
                ev.push(l.try_sub(&r)?.evidence());
            }
            Ok(all(ev))
        },
    ));
    let d = diff;
    out.push(check(
        "qop.adjoint_contravariance",
        &[("seed", seed.to_string())],
        move |_| {
            let mut rng = StdRng::seed_from_u64(seed ^ 0xad);
            let mut ev = Vec::new();
            for _ in 0..8 {
                let x = random_operator(&mut rng, &d, n, nx, nd);
                let y = random_operator(&mut rng, &d, n, nx, nd);
                let l = x.compose(&y)?.adjoint()?;
                let r = y.adjoint()?.compose(&x.adjoint()?)?;
                ev.push(l.try_sub(&r)?.evidence());
            }
            Ok(all(ev))
        },
    ));
    out
}

fn alpha_param(alpha: usize) -> (&'static str, String) {
    ("alpha", (alpha + 1).to_string())
}

fn hierarchy_checks(s: &Setup) -> Vec<Check> {
    let n = s.config.n;
    let j = s.depth_j as i64;
    let nd = s.config.nd;
    let mut out = Vec::new();
    for alpha in 0..n {
        out.push(check("hierarchy.resolvent_residual", &[alpha_param(alpha)], move |sh| {
            let r = &sh.q.resolvents()?[alpha];
            Ok(resolvent_residual(&sh.q.lax, r).evidence().z_at_most(1 - j))
        }));
        out.push(check("hierarchy.resolvent_routes", &[alpha_param(alpha)], move |sh| {
            let direct = &sh.q.resolvents()?[alpha];
            let via = resolvent_from_dressing(&sh.q.lax, sh.q.shallow()?, alpha)?;
            let diff = direct.r.truncate_below(-1).sub(&via.r.truncate_below(-1));
            Ok(diff.evidence().z_at_most(-1))
        }));
    }
    for alpha in 0..n {
        for beta in 0..n {
            out.push(check(
                "hierarchy.orthogonality",
                &[alpha_param(alpha), ("beta", (beta + 1).to_string())],
                move |sh| {
                    let rs = sh.q.idempotent()?;
                    Ok(orthogonality_residual(&rs[alpha], &rs[beta]).evidence().z_at_most(1 - j))
                },
            ));
        }
    }
    out.push(check("hierarchy.partition", &[], move |sh| {
        Ok(partition_residual(sh.q.idempotent()?).evidence().z_at_most(1 - j))
    }));
    for f in s.flows.clone() {
        out.push(check("hierarchy.u_flow", &[("flow", f.to_string())], move |sh| {
            let r = &sh.q.resolvents()?[f.alpha];
            let (b, _) = b_split(r, f.k)?;
            let flow = multiplication_part(&flow_operator(&sh.q.lax, &b, nd)?)?;
            Ok(flow.diagonal_part().evidence())
        }));
    }
    for (i, f) in s.flows.iter().enumerate() {
        for g in &s.flows[i..] {
            let (f, g) = (*f, *g);
            out.push(check(
                "hierarchy.zero_curvature",
                &[("flows", format!("{f},{g}"))],
                move |sh| Ok(zero_curvature_residual(f, g, sh.q.resolvents()?)?.evidence()),
            ));
        }
    }
    out.push(check(
        "hierarchy.dressing",
        &[("K", s.config.k.to_string())],
        move |sh| {
            let d = sh.q.dressing()?;
            Ok(dressing_residual(&sh.q.lax, d).evidence().z_at_most(0))
        },
    ));
    out
}

fn lambda_params(lambda: &MultiIndex, m: Option<u8>) -> Vec<(&'static str, String)> {
    let mut p = vec![("lambda", format_multi_index(lambda))];
    if let Some(m) = m {
        p.push(("m", m.to_string()));
    }
    p
}

/// Residues of the bilinear identity from the dressing of one structure.
fn dressing_bilinear_checks(s: &Setup, classical: bool) -> Vec<Check> {
    let l_max = s.config.l_max;
    let mut out = Vec::new();
    for lambda in s.lambdas.clone() {
        for m in 0..2u8 {
            let lam = lambda.clone();
            let name = if classical { "classical.bilinear" } else { "bilinear.direct" };
            out.push(check(name, &lambda_params(&lambda, Some(m)), move |sh| {
                let sv = sh.solved(classical)?;
                let d = sv.dressing()?;
                let rs = sv.dressed()?;
                let w_inv = d.w.invert()?;
                let mut flows = DressingFlows::new(&d.w, rs);
                Ok(direct_bilinear(&sv.lax, &mut flows, &w_inv, &lam, m, l_max)?
                    .evidence()
                    .z_at_most(-1))
            }));
        }
    }
    let reconstruct = if classical { "classical.reconstruct" } else { "bilinear.reconstruct" };
    out.push(check(reconstruct, &[], move |sh| {
        let sv = sh.solved(classical)?;
        let d = sv.dressing()?;
        let l = &sv.lax;
        match reconstruct_from_bilinear(l.diff(), l.a(), &d.w, l.nz()) {
            Ok(rec) => Ok(rec
                .u()
                .sub(l.u())
                .evidence()
                .and(Evidence::condition(rec.a() == l.a(), "top symbol differs from A"))),
            Err(e @ (Error::NegativeDegrees { .. } | Error::InvalidLax(_))) => {
                Ok(Evidence::condition(false, e.to_string()))
            }
            Err(e) => Err(e),
        }
    }));
    out
}

fn bilinear_checks(s: &Setup) -> Vec<Check> {
    let l_max = s.config.l_max;
    let mut out = Vec::new();
    for lambda in s.lambdas.clone() {
        for m in 0..2u8 {
            let lam = lambda.clone();
            out.push(check("bilinear.reduced", &lambda_params(&lambda, Some(m)), move |sh| {
                let rs = sh.q.resolvents()?;
                let l = &sh.q.lax;
                let id = MZSeries::identity(&l.proto(), l.n(), l.zfloor().min(-(sh.q.depth_j as i64)));
                let mut calc = FlowCalculus::new(rs);
                let f = flow_polynomial(&lam, &mut calc, &id)?;
                Ok(reduced_bilinear(l, &f, m, l_max).evidence().z_at_most(-1))
            }));
        }
    }
    out.extend(dressing_bilinear_checks(s, false));
    out.push(check("bilinear.inverse_transpose", &[], |sh| {
        let d = sh.q.dressing()?;
        let star = adjoint_baker(&d.w)?;
        Ok(inverse_transpose_residual(&d.w, &star).evidence())
    }));
    out
}

/// Highest positive z-degree of the exp_q shift identity.
fn exp_shift_depth(c: &RunConfig) -> usize {
    4.min(c.nx).min(c.nt)
}

fn tau_checks(s: &Setup) -> Vec<Check> {
    let Some(t) = &s.tau else { return Vec::new() };
    let q = fmt_scalar(s.q.value());
    let mut out = Vec::new();
    out.push(check("tau.exp_shift", &[("q", q.clone())], |sh| {
        let mut ev = sh.tau()?.exp_shift.evidence();
        ev.extent.z = Some(exp_shift_depth(&sh.setup.config) as i64);
        Ok(ev)
    }));
    out.push(check("tau.precheck", &[], |sh| {
        sh.tau()?;
        Ok(Evidence::condition(true, ""))
    }));
    out.push(check("tau.commutation", &[("q", q.clone())], |sh| {
        Ok(sh.tau()?.commutation.evidence())
    }));
    for (i, lambda) in s.lambdas.iter().enumerate() {
        for m in 0..2u8 {
            out.push(check("tau.direct", &lambda_params(lambda, Some(m)), move |sh| {
                let (_, _, r) = &sh.tau()?.direct[2 * i + m as usize];
                Ok(r.evidence().z_at_most(-1))
            }));
        }
        out.push(check("tau.taylor", &lambda_params(lambda, None), move |sh| {
            let (_, r) = &sh.tau()?.taylor[i];
            Ok(r.evidence().z_at_most(-1))
        }));
    }
    let ms = s.config.limit_ms.clone();
    let a = t.data.a().to_vec();
    let mut polys: Vec<(String, crate::timepoly::TimePoly)> = t
        .data
        .labelled()
        .into_iter()
        .map(|(name, p)| (name, p.clone()))
        .collect();
    for (i, p) in t.limit_extra.iter().enumerate() {
        polys.push((format!("extra_{}", i + 1), p.clone()));
    }
    for (name, p) in polys {
        let (ms, a) = (ms.clone(), a.clone());
        out.push(check("tau.classical_limit", &[("poly", name)], move |sh| {
            let (lo, hi) = &sh.setup.window;
            match require_linear_limit(&p, &a, &ms, lo, hi) {
                Ok(_) => Ok(Evidence::condition(true, "")),
                Err(e @ Error::NonShrinking(_)) => Ok(Evidence::condition(false, e.to_string())),
                Err(e) => Err(e),
            }
        }));
    }
    out
}

fn classical_checks(s: &Setup) -> Vec<Check> {
    if s.classical.is_none() {
        return Vec::new();
    }
    let n = s.config.n;
    let j = s.depth_j as i64;
    let mut out = Vec::new();
    for alpha in 0..n {
        out.push(check("classical.resolvent_residual", &[alpha_param(alpha)], move |sh| {
            let sv = sh.solved(true)?;
            Ok(resolvent_residual(&sv.lax, &sv.resolvents()?[alpha]).evidence().z_at_most(1 - j))
        }));
    }
    out.push(check("classical.dressing", &[("K", s.config.k.to_string())], |sh| {
        let sv = sh.solved(true)?;
        Ok(dressing_residual(&sv.lax, sv.dressing()?).evidence().z_at_most(0))
    }));
    out.extend(dressing_bilinear_checks(s, true));
    out
}

fn all_checks(s: &Setup) -> Vec<Check> {
    let mut out = q_calculus_checks(&s.qs, s.config.nx);
    out.extend(qop_checks(s));
    out.extend(hierarchy_checks(s));
    out.extend(bilinear_checks(s));
    out.extend(tau_checks(s));
    out.extend(classical_checks(s));
    out
}

fn selected(name: &str, prefixes: &[String]) -> bool {
    prefixes
        .iter()
        .any(|p| name == p || name.starts_with(&format!("{p}.")))
}

/// Names of every check the setup would run, in report order.
pub fn check_names(s: &Setup) -> Vec<String> {
    let mut v: Vec<String> = all_checks(s).iter().map(|c| c.name.to_string()).collect();
    v.dedup();
    v
}

/// Runs the selected checks in parallel; the report keeps the fixed check order.
pub fn run_suite(s: &Setup, only: Option<&[String]>, inject: Option<Injection>) -> Report {
    let inject = inject == Some(Injection::CorruptDressing);
    let shared = Shared {
        setup: s.clone(),
        q: Solved::new(s.lax.clone(), s.depth_j, s.config.k, inject),
        classical: s
            .classical
            .clone()
            .map(|l| Solved::new(l, s.depth_j, s.config.k, inject)),
        tau: OnceLock::new(),
    };
    let prefixes: Option<Vec<String>> = match only {
        Some(v) => Some(v.to_vec()),
        None => s.config.checks.clone(),
    };
    let checks: Vec<Check> = all_checks(s)
        .into_iter()
        .filter(|c| prefixes.as_ref().map_or(true, |p| selected(c.name, p)))
        .collect();
    let records = checks
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)(&shared);
            let ms = start.elapsed().as_millis() as u64;
            CheckRecord::from_outcome(c.name.to_string(), c.params.clone(), outcome, ms)
        })
        .collect();
    Report {
        config_hash: s.config.hash(),
        checks: records,
    }
}
