//! One line per acceptance criterion. Failures are printed, never panicked on.

mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

use qakns::config::{load_config, RunConfig, Setup};
use qakns::difference::Difference;
use qakns::hierarchy::{resolvent_from_dressing, solve_dressing, solve_resolvent_direct, Normalization};
use qakns::matrix::Matrix;
use qakns::qop::QDOp;
use qakns::report::{CheckRecord, Status};
use qakns::scalar::{ratio, Scalar};
use qakns::suite::{random_operator, run_suite, Injection};
use qakns::xseries::XSeries;

use common::*;

fn load(name: &str) -> Setup {
    load_config(&configs_dir().join(name)).expect("shipped config loads")
}

/// Outcome of one criterion: pass flag plus the notes explaining it.
struct Verdict {
    ok: bool,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { ok: true, notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.ok = false;
            self.notes.push(note.into());
        }
    }

    /// Runs the selected checks and requires every record to pass.
    fn suite(&mut self, label: &str, s: &Setup, prefixes: &[&str], inject: Option<Injection>) -> Vec<CheckRecord> {
        let only: Vec<String> = prefixes.iter().map(|p| p.to_string()).collect();
        let r = run_suite(s, Some(&only), inject);
        let bad: Vec<&CheckRecord> = r.checks.iter().filter(|c| c.status != Status::Pass).collect();
        let total = r.checks.len();
        self.require(total > 0, format!("{label}: no checks selected"));
        if let Some(first) = bad.first() {
            let why = first
                .error
                .clone()
                .or_else(|| first.first_failure.as_ref().map(|f| format!("residual {} at ({},{})", f.value, f.row, f.col)))
                .unwrap_or_default();
            self.require(
                false,
                format!("{label}: {}/{total} not passing, first {} {:?}: {why}", bad.len(), first.name, first.params),
            );
        }
        r.checks
    }

    fn print(&self, n: usize, title: &str) {
        let status = if self.ok { "PASS" } else { "FAIL" };
        println!("criterion {n} {status} {title}");
        for note in &self.notes {
            println!("    {note}");
        }
    }
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let s = RunConfig::default().validate().unwrap();
    let recs = v.suite("q-calculus", &s, &["core"], None);
    let qs = recs.iter().filter(|c| c.name == "core.exp_q_inverse").count();
    v.require(qs == 3, format!("expected three q values, got {qs}"));
    v
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::new();
    let s = RunConfig::default().validate().unwrap();
    v.suite("pairing", &s, &["qop"], None);
    let nx = s.config.nx;
    let a = s.lax.a().to_vec();
    let mut agree = 0;
    for q in [Scalar::from_integer(2.into()), ratio(1, 2), ratio(3, 5)] {
        let diff = Difference::Q(qakns::scalar::QParam::new(q.clone(), nx).unwrap());
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..20 {
            let p = random_operator(&mut rng, &diff, 2, nx, 2);
            let g = random_operator(&mut rng, &diff, 2, nx, 2);
            match QDOp::residue_pairing(&p, &g, &a) {
                Ok(pr) => {
                    let oracle = pairing_oracle(&p, &g, &a, &q, nx);
                    if from_matrix(&pr.lhs, nx) == oracle && from_matrix(&pr.rhs_conv, nx) == oracle {
                        agree += 1;
                    }
                }
                Err(e) => v.require(false, format!("pairing error: {e}")),
            }
        }
    }
    v.require(agree == 60, format!("oracle agreement on {agree}/60 random pairs"));
    v
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new();
    let prefixes = [
        "hierarchy.resolvent_residual",
        "hierarchy.resolvent_routes",
        "hierarchy.orthogonality",
        "hierarchy.partition",
        "hierarchy.u_flow",
        "hierarchy.zero_curvature",
    ];
    let literal = Matrix::from_fn(2, |i, j| {
        XSeries::constant(8, if i == j { Scalar::from_integer(0.into()) } else { ratio(-1, 2) })
    });
    for name in ["constant_potential.json", "linear_potential.json"] {
        let s = load(name);
        let recs = v.suite(name, &s, &prefixes, None);
        for c in recs.iter().filter(|c| c.name == "hierarchy.resolvent_residual") {
            v.require(
                c.max_degree_verified.z.map_or(false, |z| z <= -6),
                format!("{name}: resolvent residual verified only to z^{:?}", c.max_degree_verified.z),
            );
        }
        if name == "constant_potential.json" {
            let direct = solve_resolvent_direct(&s.lax, 0, s.depth_j, Normalization::ZeroConstant)
                .and_then(|r| r.r.coeff(-1));
            let routed = solve_dressing(&s.lax, 1)
                .and_then(|d| resolvent_from_dressing(&s.lax, &d, 0))
                .and_then(|r| r.r.coeff(-1));
            v.require(direct.as_ref().ok() == Some(&literal), "direct route misses R_1^(1)");
            v.require(routed.as_ref().ok() == Some(&literal), "dressing route misses R_1^(1)");
        }
    }
    v
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::new();
    for name in ["constant_potential.json", "linear_potential.json"] {
        v.suite(name, &load(name), &["bilinear"], None);
    }
    let s = load("constant_potential.json");
    let only = ["classical.dressing".to_string(), "classical.bilinear".to_string()];
    let r = run_suite(&s, Some(&only), Some(Injection::CorruptDressing));
    v.require(
        r.checks.iter().any(|c| c.status == Status::Fail),
        "injected corruption went undetected",
    );
    v
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::new();
    for name in ["vacuum_tau.json", "triangular.json"] {
        let recs = v.suite(name, &load(name), &["tau"], None);
        for c in recs.iter().filter(|c| c.name == "tau.exp_shift") {
            let e = &c.max_degree_verified;
            v.require(e.z >= Some(4) && e.x >= Some(8), format!("{name}: exp_shift verified only to z^{:?} x^{:?}", e.z, e.x));
        }
        for part in ["tau.precheck", "tau.direct", "tau.taylor", "tau.classical_limit"] {
            v.require(recs.iter().any(|c| c.name == part), format!("{name}: {part} missing"));
        }
    }
    v
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    for name in ["constant_potential.json", "linear_potential.json"] {
        v.suite(name, &load(name), &["classical"], None);
    }
    v
}

fn main() {
    criterion_1().print(1, "q-calculus identities");
    criterion_2().print(2, "residue pairing");
    criterion_3().print(3, "hierarchy");
    criterion_4().print(4, "bilinear identity");
    criterion_5().print(5, "tau functions");
    criterion_6().print(6, "classical cross-check");
}
