//! Run configuration: JSON in, validated hierarchy data out.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::difference::Difference;
use crate::error::{Error, Result};
use crate::hierarchy::{FlowIndex, LaxData, XMatrix};
use crate::matrix::Matrix;
use crate::scalar::{parse_scalar, QParam, Scalar};
use crate::tau::TauData;
use crate::timepoly::TimePoly;
use crate::xseries::XSeries;

/// A polynomial in the times as `[coefficient, monomial]` pairs, e.g. `["-1", "t11"]`.
pub type PolySpec = Vec<[String; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanionSpec {
    /// 1-based.
    pub row: usize,
    pub col: usize,
    pub terms: PolySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct TauSpec {
    /// Eigenvalues for the τ stage; the hierarchy's `a` when absent.
    pub a: Option<Vec<String>>,
    pub tau: PolySpec,
    pub companions: Vec<CompanionSpec>,
    /// Extra polynomials fed only to the classical-limit check.
    pub limit_extra: Vec<PolySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: usize,
    pub a: Vec<String>,
    pub q: String,
    /// `u[i][j]` lists x-polynomial coefficients from degree 0.
    pub u: Vec<Vec<Vec<String>>>,
    pub nx: usize,
    pub nz: usize,
    pub nd: usize,
    pub nt: usize,
    /// Dressing depth.
    pub k: usize,
    /// Resolvent depth; `nz + 1` when absent.
    pub j: Option<usize>,
    /// Flows as `[k, alpha]`, alpha 1-based.
    pub flows: Vec<[usize; 2]>,
    /// Multi-indices; every `|lambda| <= 2` combination of `flows` when absent.
    pub lambdas: Option<Vec<Vec<[usize; 2]>>>,
    pub l_max: usize,
    /// q values for the q-calculus identities.
    pub qs: Vec<String>,
    /// Random operator pairs for the residue pairing.
    pub pairs: usize,
    pub seed: u64,
    pub tau: Option<TauSpec>,
    pub limit_ms: Vec<u32>,
    pub limit_window: [String; 2],
    /// Also run the solvers under the classical structure.
    pub classical: bool,
    /// Check-name prefixes to run; everything when absent.
    pub checks: Option<Vec<String>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = |v: &str| v.to_string();
        RunConfig {
            n: 2,
            a: vec![s("1"), s("-1")],
            q: s("2"),
            u: vec![vec![vec![], vec![s("1")]], vec![vec![s("1")], vec![]]],
            nx: 8,
            nz: 6,
            nd: 4,
            nt: 4,
            k: 6,
            j: None,
            flows: vec![[1, 1], [1, 2], [2, 1]],
            lambdas: None,
            l_max: 4,
            qs: vec![s("2"), s("1/2"), s("3/5")],
            pairs: 24,
            seed: 7,
            tau: None,
            limit_ms: vec![3, 4, 5, 6],
            limit_window: [s("9/20"), s("11/20")],
            classical: true,
            checks: None,
        }
    }
}

/// Parsed and validated configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: RunConfig,
    pub q: QParam,
    pub lax: LaxData,
    pub classical: Option<LaxData>,
    pub depth_j: usize,
    pub flows: Vec<FlowIndex>,
    pub lambdas: Vec<Vec<FlowIndex>>,
    pub qs: Vec<QParam>,
    pub tau: Option<TauSetup>,
    pub window: (Scalar, Scalar),
}

#[derive(Debug, Clone)]
pub struct TauSetup {
    pub data: TauData,
    pub limit_extra: Vec<TimePoly>,
}

fn scalars(v: &[String]) -> Result<Vec<Scalar>> {
    v.iter().map(|s| parse_scalar(s)).collect()
}

fn flow(pair: &[usize; 2], n: usize) -> Result<FlowIndex> {
    let [k, alpha] = *pair;
    if k == 0 || alpha == 0 || alpha > n {
        return Err(Error::Config(format!("flow ({k},{alpha}) out of range")));
    }
    Ok(FlowIndex { k, alpha: alpha - 1 })
}

fn poly(spec: &PolySpec, nx: usize, nt: usize) -> Result<TimePoly> {
    let terms: Vec<(String, String)> = spec.iter().map(|[c, m]| (c.clone(), m.clone())).collect();
    let p = TimePoly::parse_terms(nx, nt, &terms)?;
    for (m, _) in p.terms() {
        if m.powers().iter().any(|(v, _)| v.k > nx) {
            return Err(Error::TruncationOverflow(format!("time {m} shifts beyond N_x = {nx}")));
        }
    }
    Ok(p)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical serialization: every field present, fixed order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Hex sha256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn u_matrix(&self) -> Result<XMatrix> {
        if self.u.len() != self.n || self.u.iter().any(|r| r.len() != self.n) {
            return Err(Error::Config(format!("U must be {0}x{0}", self.n)));
        }
        let mut m = Matrix::zeros(&XSeries::zero(self.nx), self.n);
        for (i, row) in self.u.iter().enumerate() {
            for (j, coeffs) in row.iter().enumerate() {
                m.set(i, j, XSeries::polynomial(self.nx, &scalars(coeffs)?)?);
            }
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<Setup> {
        if self.a.len() != self.n {
            return Err(Error::Config(format!("{} eigenvalues for n = {}", self.a.len(), self.n)));
        }
        if self.nx == 0 || self.nz == 0 || self.nd == 0 {
            return Err(Error::Config("truncations must be positive".into()));
        }
        let a = scalars(&self.a)?;
        let q = QParam::new(parse_scalar(&self.q)?, self.nx)?;
        let u = self.u_matrix()?;
        let lax = LaxData::new(Difference::Q(q.clone()), a.clone(), u.clone(), self.nz)?;
        let classical = if self.classical {
            Some(LaxData::new(Difference::Classical, a.clone(), u, self.nz)?)
        } else {
            None
        };
        let depth_j = self.j.unwrap_or(self.nz + 1);
        if self.k > self.nz || depth_j > self.nz + 1 {
            return Err(Error::Config(format!(
                "depths K = {}, J = {depth_j} exceed N_z = {}",
                self.k, self.nz
            )));
        }
        let flows = self
            .flows
            .iter()
            .map(|f| flow(f, self.n))
            .collect::<Result<Vec<_>>>()?;
        let lambdas = match &self.lambdas {
            Some(ls) => ls
                .iter()
                .map(|l| l.iter().map(|f| flow(f, self.n)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
            None => default_lambdas(&flows),
        };
        let qs = self
            .qs
            .iter()
            .map(|s| QParam::new(parse_scalar(s)?, self.nx))
            .collect::<Result<Vec<_>>>()?;
        let window = (parse_scalar(&self.limit_window[0])?, parse_scalar(&self.limit_window[1])?);
        let tau = match &self.tau {
            None => None,
            Some(spec) => Some(self.tau_setup(spec, &a)?),
        };
        Ok(Setup {
            config: self.clone(),
            q,
            lax,
            classical,
            depth_j,
            flows,
            lambdas,
            qs,
            tau,
            window,
        })
    }

    fn tau_setup(&self, spec: &TauSpec, a: &[Scalar]) -> Result<TauSetup> {
        let a = match &spec.a {
            Some(v) => scalars(v)?,
            None => a.to_vec(),
        };
        let tau = poly(&spec.tau, self.nx, self.nt)?;
        let mut companions = BTreeMap::new();
        for c in &spec.companions {
            if c.row == 0 || c.col == 0 {
                return Err(Error::Config("companion indices are 1-based".into()));
            }
            companions.insert((c.row - 1, c.col - 1), poly(&c.terms, self.nx, self.nt)?);
        }
        let limit_extra = spec
            .limit_extra
            .iter()
            .map(|p| poly(p, self.nx, self.nt))
            .collect::<Result<Vec<_>>>()?;
        Ok(TauSetup {
            data: TauData::new(a, tau, companions)?,
            limit_extra,
        })
    }
}

/// `[]`, every single flow and every unordered pair (with repetition).
pub fn default_lambdas(flows: &[FlowIndex]) -> Vec<Vec<FlowIndex>> {
    let mut out = vec![Vec::new()];
    for (i, f) in flows.iter().enumerate() {
        out.push(vec![*f]);
        for g in &flows[i..] {
            out.push(vec![*f, *g]);
        }
    }
    out
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<Setup> {
    RunConfig::load(path)?.validate()
}
