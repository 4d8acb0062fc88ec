//! Check records, residual summaries and report output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::coeff::{Coeff, Reach, Term};
use crate::matrix::Matrix;
use crate::qop::QDOp;
use crate::scalar::fmt_scalar;
use crate::zseries::ZSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Deepest z-degree and highest x / time degree up to which a residual is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct Extent {
    pub z: Option<i64>,
    pub x: Option<i64>,
    pub t: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub z_degree: Option<i64>,
    pub x_degree: usize,
    pub t_monomial: Option<String>,
    /// 1-based.
    pub row: usize,
    pub col: usize,
    pub value: String,
}

impl Failure {
    fn from_term(z_degree: Option<i64>, row: usize, col: usize, term: Term) -> Self {
        Failure {
            z_degree,
            x_degree: term.x_degree,
            t_monomial: term.t_monomial,
            row: row + 1,
            col: col + 1,
            value: fmt_scalar(&term.value),
        }
    }
}

/// What a check found: how far it looked and the first nonzero residual term.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub extent: Extent,
    pub failure: Option<Failure>,
    /// Set when the verified range is empty or a condition failed without a term.
    pub problem: Option<String>,
}

impl Evidence {
    /// A yes/no condition with no residual term to show.
    pub fn condition(ok: bool, what: impl Into<String>) -> Self {
        Evidence {
            extent: Extent::default(),
            failure: if ok {
                None
            } else {
                Some(Failure {
                    z_degree: None,
                    x_degree: 0,
                    t_monomial: None,
                    row: 0,
                    col: 0,
                    value: what.into(),
                })
            },
            problem: None,
        }
    }

    /// Requires the verified z-range to reach at least down to `degree`.
    pub fn z_at_most(mut self, degree: i64) -> Self {
        if let Some(z) = self.extent.z {
            if z > degree && self.problem.is_none() {
                self.problem = Some(format!("nothing verified: z known only from degree {z}"));
            }
        }
        self
    }

    /// Combines two pieces of evidence: the narrower extent and the first failure.
    pub fn and(self, other: Evidence) -> Evidence {
        let meet = |a: Option<i64>, b: Option<i64>, pick: fn(i64, i64) -> i64| match (a, b) {
            (Some(x), Some(y)) => Some(pick(x, y)),
            (x, y) => x.or(y),
        };
        Evidence {
            extent: Extent {
                z: meet(self.extent.z, other.extent.z, i64::max),
                x: meet(self.extent.x, other.extent.x, i64::min),
                t: meet(self.extent.t, other.extent.t, i64::min),
            },
            failure: self.failure.or(other.failure),
            problem: self.problem.or(other.problem),
        }
    }
}

fn reach_extent(z: Option<i64>, r: Reach) -> (Extent, Option<String>) {
    let problem = r.is_empty().then(|| "nothing verified: empty x/t range".to_string());
    (Extent { z, x: Some(r.x), t: r.t }, problem)
}

/// Anything that can be summarized as a residual.
pub trait Residual {
    fn evidence(&self) -> Evidence;
}

impl<C: Coeff> Residual for Matrix<C> {
    fn evidence(&self) -> Evidence {
        let (extent, problem) = reach_extent(None, self.reach());
        Evidence {
            extent,
            failure: self
                .first_nonzero_entry()
                .map(|e| Failure::from_term(None, e.row, e.col, e.term)),
            problem,
        }
    }
}

impl<C: Coeff> Residual for ZSeries<C> {
    fn evidence(&self) -> Evidence {
        let z = self.low().unwrap_or(self.floor());
        let reach = self
            .terms()
            .map(|(_, m)| m.reach())
            .fold(self.proto().reach(), Reach::meet);
        let (extent, problem) = reach_extent(Some(z), reach);
        Evidence {
            extent,
            failure: self
                .first_nonzero_term()
                .map(|t| Failure::from_term(Some(t.z_degree), t.row, t.col, t.term)),
            problem,
        }
    }
}

impl Residual for QDOp {
    fn evidence(&self) -> Evidence {
        let z = self.terms().filter_map(|(_, c)| c.low()).max();
        let (extent, problem) = reach_extent(z, self.reach());
        Evidence {
            extent,
            failure: self
                .first_nonzero()
                .map(|(_, t)| Failure::from_term(Some(t.z_degree), t.row, t.col, t.term)),
            problem,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub max_degree_verified: Extent,
    pub first_failure: Option<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub ms: u64,
}

impl CheckRecord {
    pub fn from_outcome(
        name: String,
        params: BTreeMap<String, String>,
        outcome: crate::error::Result<Evidence>,
        ms: u64,
    ) -> Self {
        let (status, extent, failure, error) = match outcome {
            Err(e) => (Status::Error, Extent::default(), None, Some(e.to_string())),
            Ok(ev) => match (ev.failure, ev.problem) {
                (Some(f), _) => (Status::Fail, ev.extent, Some(f), None),
                (None, Some(p)) => (Status::Error, ev.extent, None, Some(p)),
                (None, None) => (Status::Pass, ev.extent, None, None),
            },
        };
        CheckRecord {
            name,
            params,
            status,
            max_degree_verified: extent,
            first_failure: failure,
            error,
            ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config_hash: String,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "config {}", self.config_hash);
        let _ = writeln!(out, "{:<6} {:<34} {:<28} {:<16} {:>7}  detail", "status", "check", "params", "verified z/x/t", "ms");
        for c in &self.checks {
            let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let e = &c.max_degree_verified;
            let show = |v: Option<i64>| v.map_or("-".to_string(), |v| v.to_string());
            let detail = match (&c.first_failure, &c.error) {
                (Some(f), _) => format!(
                    "z^{} x^{}{} ({},{}) = {}",
                    show(f.z_degree),
                    f.x_degree,
                    f.t_monomial.as_ref().map(|m| format!(" {m}")).unwrap_or_default(),
                    f.row,
                    f.col,
                    f.value
                ),
                (None, Some(e)) => e.clone(),
                (None, None) => String::new(),
            };
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let _ = writeln!(
                out,
                "{:<6} {:<34} {:<28} {:<16} {:>7}  {}",
                status,
                c.name,
                params.join(" "),
                format!("{}/{}/{}", show(e.z), show(e.x), show(e.t)),
                c.ms,
                detail
            );
        }
        let passed = self.checks.iter().filter(|c| c.status == Status::Pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::xseries::XSeries;
    use crate::zseries::MZSeries;

    #[test]
    fn failure_carries_position() {
        let proto = XSeries::zero(4);
        let mut m = Matrix::zeros(&proto, 2);
        m.set(1, 0, XSeries::monomial(4, 2, int(5)));
        let s = MZSeries::monomial(-3, m, -6);
        let rec = CheckRecord::from_outcome("x".into(), BTreeMap::new(), Ok(s.evidence()), 0);
        assert_eq!(rec.status, Status::Fail);
        let f = rec.first_failure.unwrap();
        assert_eq!((f.z_degree, f.x_degree, f.row, f.col, f.value.as_str()), (Some(-3), 2, 2, 1, "5"));
        let json = serde_json::to_string(&Report { config_hash: "h".into(), checks: vec![] }).unwrap();
        assert_eq!(json, r#"{"config_hash":"h","checks":[]}"#);
    }

    #[test]
    fn empty_window_is_an_error() {
        let proto = XSeries::zero(4);
        let s = MZSeries::from_terms(&proto, 2, [], -6, Some(0));
        let rec = CheckRecord::from_outcome("x".into(), BTreeMap::new(), Ok(s.evidence().z_at_most(-1)), 0);
        assert_eq!(rec.status, Status::Error);
        let ok = MZSeries::zero(&proto, 2, -6);
        let rec = CheckRecord::from_outcome("x".into(), BTreeMap::new(), Ok(ok.evidence()), 0);
        assert_eq!(rec.status, Status::Pass);
        assert!(serde_json::to_string(&rec).unwrap().contains(r#""status":"pass""#));
    }
}
