//! Demand uncertainty sets and closed-form worst-case load evaluation.
//!
//! Five set families are supported: budget sets, factor models, ellipsoids
//! (axis-parallel and general), cardinality-constrained ("gamma") sets and
//! discrete scenario sets, plus the degenerate singleton `{q0}` used for
//! deterministic runs. For every family the worst-case load of a customer
//! set, `max_{q in Q} sum_{i in S} q_i`, is available in closed form and can
//! be maintained incrementally under single-customer insertions and removals
//! via [`LoadTracker`].
//!
//! Demand vectors are customer-indexed with length `n + 1` (entry 0 unused),
//! matching [`crate::instance`]. Matrices (factor loadings, square-root
//! covariance, scenarios) are stored row-major over customers `1..=n`, so row
//! `i - 1` belongs to customer `i`.

mod build;
mod tracker;

pub use build::{build_set, Family};
pub use tracker::LoadTracker;

use crate::instance::CustomerId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum UncertaintyError {
    #[error("customer id {0} out of range")]
    IdOutOfRange(CustomerId),
    #[error("duplicate customer id {0}")]
    DuplicateId(CustomerId),
    #[error("customer {0} already tracked")]
    DuplicateAdd(CustomerId),
    #[error("customer {0} not tracked")]
    RemoveAbsent(CustomerId),
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamRange { name: &'static str, value: f64 },
    #[error("invalid set data: {0}")]
    InvalidData(String),
    #[error("set file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Budget set: hyperrectangle `[lower, upper]` intersected with cumulative
/// bounds over pairwise-disjoint customer subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetSet {
    /// Length `n + 1`, entry 0 unused.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// `(members, bound)` per budget; members are disjoint across budgets.
    pub budgets: Vec<(Vec<CustomerId>, f64)>,
    /// Customer -> budget index, length `n + 1`.
    member_of: Vec<Option<usize>>,
}

impl BudgetSet {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        budgets: Vec<(Vec<CustomerId>, f64)>,
    ) -> Result<Self, UncertaintyError> {
        let n = lower.len().saturating_sub(1);
        if upper.len() != lower.len() {
            return Err(UncertaintyError::InvalidData(
                "lower/upper length mismatch".into(),
            ));
        }
        for i in 1..=n {
            if lower[i] > upper[i] + 1e-12 {
                return Err(UncertaintyError::InvalidData(format!(
                    "lower > upper for customer {i}"
                )));
            }
            if lower[i] < 0.0 {
                return Err(UncertaintyError::InvalidData(format!(
                    "negative lower bound for customer {i}"
                )));
            }
        }
        let mut member_of = vec![None; n + 1];
        for (l, (members, bound)) in budgets.iter().enumerate() {
            let mut base = 0.0;
            for &i in members {
                if i == 0 || i > n {
                    return Err(UncertaintyError::IdOutOfRange(i));
                }
                if member_of[i].is_some() {
                    return Err(UncertaintyError::InvalidData(format!(
                        "customer {i} appears in two budgets"
                    )));
                }
                member_of[i] = Some(l);
                base += lower[i];
            }
            if base > *bound + 1e-9 {
                return Err(UncertaintyError::InvalidData(format!(
                    "budget {l} bound below the sum of lower bounds"
                )));
            }
        }
        Ok(BudgetSet {
            lower,
            upper,
            budgets,
            member_of,
        })
    }

    pub fn budget_of(&self, i: CustomerId) -> Option<usize> {
        self.member_of[i]
    }

    /// Slack of budget `l` at the lower corner: `b_l - sum_{i in B_l} lower_i`.
    pub fn base_slack(&self, l: usize) -> f64 {
        let (members, bound) = &self.budgets[l];
        bound - members.iter().map(|&i| self.lower[i]).sum::<f64>()
    }
}

/// Factor model: `q = q0 + Psi xi` with `xi` in the hypercube `[-1, 1]^F`
/// intersected with `|e^T xi| <= beta F`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModelSet {
    pub q0: Vec<f64>,
    /// Row-major `n x F`; row `i - 1` holds the loadings of customer `i`.
    pub psi: Vec<f64>,
    pub factors: usize,
    pub beta: f64,
}

impl FactorModelSet {
    pub fn new(
        q0: Vec<f64>,
        psi: Vec<f64>,
        factors: usize,
        beta: f64,
    ) -> Result<Self, UncertaintyError> {
        if factors == 0 {
            return Err(UncertaintyError::InvalidData("factor count 0".into()));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(UncertaintyError::ParamRange {
                name: "beta",
                value: beta,
            });
        }
        let n = q0.len().saturating_sub(1);
        if psi.len() != n * factors {
            return Err(UncertaintyError::InvalidData(
                "loading matrix dimension mismatch".into(),
            ));
        }
        Ok(FactorModelSet {
            q0,
            psi,
            factors,
            beta,
        })
    }

    #[inline]
    pub fn loading(&self, i: CustomerId, f: usize) -> f64 {
        self.psi[(i - 1) * self.factors + f]
    }
}

/// Square-root of the covariance matrix parameterizing an ellipsoid.
#[derive(Debug, Clone, PartialEq)]
pub enum SqrtSigma {
    /// Diagonal case: per-customer semi-axis lengths, length `n + 1`.
    Axis(Vec<f64>),
    /// Symmetric PSD square root, row-major `n x n` (row `i - 1` is customer `i`).
    General(Vec<f64>),
}

/// Ellipsoid `q = q0 + Sigma^{1/2} xi`, `xi^T xi <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSet {
    pub q0: Vec<f64>,
    pub sqrt: SqrtSigma,
}

impl EllipsoidSet {
    pub fn new(q0: Vec<f64>, sqrt: SqrtSigma) -> Result<Self, UncertaintyError> {
        let n = q0.len().saturating_sub(1);
        match &sqrt {
            SqrtSigma::Axis(s) => {
                if s.len() != n + 1 {
                    return Err(UncertaintyError::InvalidData(
                        "sigma vector length mismatch".into(),
                    ));
                }
                if s[1..].iter().any(|&v| v < 0.0) {
                    return Err(UncertaintyError::InvalidData(
                        "negative axis-parallel sigma".into(),
                    ));
                }
            }
            SqrtSigma::General(m) => {
                if m.len() != n * n {
                    return Err(UncertaintyError::InvalidData(
                        "sqrt matrix dimension mismatch".into(),
                    ));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        if (m[i * n + j] - m[j * n + i]).abs() > 1e-7 {
                            return Err(UncertaintyError::InvalidData(
                                "sqrt matrix not symmetric".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(EllipsoidSet { q0, sqrt })
    }

    pub fn is_axis_parallel(&self) -> bool {
        matches!(self.sqrt, SqrtSigma::Axis(_))
    }
}

/// Cardinality-constrained ("gamma") set: each demand may deviate upward by
/// `dev_i`, at most `gamma` deviations in total (one possibly fractional).
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalitySet {
    pub q0: Vec<f64>,
    pub dev: Vec<f64>,
    pub gamma: f64,
}

impl CardinalitySet {
    pub fn new(q0: Vec<f64>, dev: Vec<f64>, gamma: f64) -> Result<Self, UncertaintyError> {
        let n = q0.len().saturating_sub(1);
        if dev.len() != n + 1 {
            return Err(UncertaintyError::InvalidData(
                "deviation vector length mismatch".into(),
            ));
        }
        if dev[1..].iter().any(|&v| v < 0.0) {
            return Err(UncertaintyError::InvalidData("negative deviation".into()));
        }
        if !(0.0..=n as f64).contains(&gamma) {
            return Err(UncertaintyError::InvalidData(format!(
                "gamma {gamma} outside [0, n]"
            )));
        }
        Ok(CardinalitySet { q0, dev, gamma })
    }
}

/// Convex hull of a finite set of demand scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSet {
    /// Each scenario has length `n + 1`, entry 0 unused.
    pub scenarios: Vec<Vec<f64>>,
}

impl DiscreteSet {
    pub fn new(scenarios: Vec<Vec<f64>>) -> Result<Self, UncertaintyError> {
        if scenarios.is_empty() {
            return Err(UncertaintyError::InvalidData("no scenarios".into()));
        }
        let len = scenarios[0].len();
        for s in &scenarios {
            if s.len() != len {
                return Err(UncertaintyError::InvalidData(
                    "scenario length mismatch".into(),
                ));
            }
            if s[1..].iter().any(|&v| v < 0.0) {
                return Err(UncertaintyError::InvalidData(
                    "negative scenario demand".into(),
                ));
            }
        }
        Ok(DiscreteSet { scenarios })
    }
}

/// Tagged union over the supported uncertainty-set families.
#[derive(Debug, Clone, PartialEq)]
pub enum UncertaintySet {
    /// The deterministic singleton `{q0}`.
    Singleton { q0: Vec<f64> },
    Budget(BudgetSet),
    Factor(FactorModelSet),
    Ellipsoid(EllipsoidSet),
    Gamma(CardinalitySet),
    Discrete(DiscreteSet),
}

impl UncertaintySet {
    pub fn singleton(q0: Vec<f64>) -> Self {
        UncertaintySet::Singleton { q0 }
    }

    /// Number of customers covered by the set.
    pub fn n(&self) -> usize {
        match self {
            UncertaintySet::Singleton { q0 } => q0.len().saturating_sub(1),
            UncertaintySet::Budget(b) => b.lower.len().saturating_sub(1),
            UncertaintySet::Factor(f) => f.q0.len().saturating_sub(1),
            UncertaintySet::Ellipsoid(e) => e.q0.len().saturating_sub(1),
            UncertaintySet::Gamma(g) => g.q0.len().saturating_sub(1),
            UncertaintySet::Discrete(d) => d.scenarios[0].len().saturating_sub(1),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            UncertaintySet::Singleton { .. } => Family::Singleton,
            UncertaintySet::Budget(_) => Family::Budget,
            UncertaintySet::Factor(_) => Family::Factor,
            UncertaintySet::Ellipsoid(e) if e.is_axis_parallel() => Family::EllipsoidAx,
            UncertaintySet::Ellipsoid(_) => Family::EllipsoidGen,
            UncertaintySet::Gamma(_) => Family::Gamma,
            UncertaintySet::Discrete(_) => Family::Discrete,
        }
    }

    /// `max_{q in Q} q_i`, the worst-case demand of a single customer.
    pub fn max_single_demand(&self, i: CustomerId) -> Result<f64, UncertaintyError> {
        self.worst_case_load(&[i])
    }

    /// Closed-form worst-case load `max_{q in Q} sum_{i in S} q_i` of a
    /// customer set. The empty set yields 0 for every family.
    pub fn worst_case_load(&self, s: &[CustomerId]) -> Result<f64, UncertaintyError> {
        self.check_ids(s)?;
        Ok(match self {
            UncertaintySet::Singleton { q0 } => s.iter().map(|&i| q0[i]).sum(),
            UncertaintySet::Budget(b) => {
                let mut total: f64 = s.iter().map(|&i| b.upper[i]).sum();
                for l in 0..b.budgets.len() {
                    let spread: f64 = s
                        .iter()
                        .filter(|&&i| b.member_of[i] == Some(l))
                        .map(|&i| b.upper[i] - b.lower[i])
                        .sum();
                    let excess = spread - b.base_slack(l);
                    if excess > 0.0 {
                        total -= excess;
                    }
                }
                total
            }
            UncertaintySet::Factor(fm) => {
                let mut rho = vec![0.0; fm.factors];
                let mut base = 0.0;
                for &i in s {
                    base += fm.q0[i];
                    for f in 0..fm.factors {
                        rho[f] += fm.loading(i, f);
                    }
                }
                base + factor_worst_disturbance(&rho, fm.beta)
            }
            UncertaintySet::Ellipsoid(e) => {
                let base: f64 = s.iter().map(|&i| e.q0[i]).sum();
                match &e.sqrt {
                    SqrtSigma::Axis(sig) => {
                        let ss: f64 = s.iter().map(|&i| sig[i] * sig[i]).sum();
                        base + ss.max(0.0).sqrt()
                    }
                    SqrtSigma::General(m) => {
                        let n = self.n();
                        let mut acc = vec![0.0; n];
                        for &i in s {
                            for (l, a) in acc.iter_mut().enumerate() {
                                *a += m[(i - 1) * n + l];
                            }
                        }
                        base + acc.iter().map(|v| v * v).sum::<f64>().sqrt()
                    }
                }
            }
            UncertaintySet::Gamma(g) => {
                let base: f64 = s.iter().map(|&i| g.q0[i]).sum();
                base + gamma_worst_deviation(g, s)
            }
            UncertaintySet::Discrete(d) => {
                if s.is_empty() {
                    0.0
                } else {
                    d.scenarios
                        .iter()
                        .map(|q| s.iter().map(|&i| q[i]).sum::<f64>())
                        .fold(f64::NEG_INFINITY, f64::max)
                }
            }
        })
    }

    /// A new incremental tracker over the empty customer set.
    pub fn tracker(&self) -> LoadTracker<'_> {
        LoadTracker::new(self)
    }

    fn check_ids(&self, s: &[CustomerId]) -> Result<(), UncertaintyError> {
        let n = self.n();
        let mut seen = vec![false; n + 1];
        for &i in s {
            if i == 0 || i > n {
                return Err(UncertaintyError::IdOutOfRange(i));
            }
            if seen[i] {
                return Err(UncertaintyError::DuplicateId(i));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Worst-case disturbance `max { rho^T xi : xi in [-1,1]^F, |e^T xi| <= beta F }`
/// via the dual closed form: the minimum of
/// `sum_f |rho_f - lambda| + beta F |lambda|` over the three candidate
/// breakpoints `{0, rho_(l+), rho_(l-)}` of the descending ordering, with
/// `l+ = ceil((1+beta)F/2)` and `l- = max(1, ceil((1-beta)F/2))`.
pub(crate) fn factor_worst_disturbance(rho: &[f64], beta: f64) -> f64 {
    let f = rho.len();
    let mut sorted = rho.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let fp = f as f64;
    let lp = (((1.0 + beta) * fp / 2.0).ceil() as usize).clamp(1, f);
    let lm = ((((1.0 - beta) * fp / 2.0).ceil()) as usize).clamp(1, f);
    let mut best = f64::INFINITY;
    for lam in [0.0, sorted[lp - 1], sorted[lm - 1]] {
        let v: f64 = sorted.iter().map(|r| (r - lam).abs()).sum::<f64>() + beta * fp * lam.abs();
        best = best.min(v);
    }
    best
}

/// Greedy fractional-knapsack value of the gamma set over `s`: the
/// `min(|S|, floor(gamma))` largest deviations plus the fractional remainder
/// on the next one. Ties are broken by ascending customer id.
fn gamma_worst_deviation(g: &CardinalitySet, s: &[CustomerId]) -> f64 {
    let floor_g = g.gamma.floor();
    let frac = g.gamma - floor_g;
    let cap = floor_g as usize;
    let mut devs: Vec<(f64, CustomerId)> = s.iter().map(|&i| (g.dev[i], i)).collect();
    devs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let take = devs.len().min(cap);
    let mut total: f64 = devs[..take].iter().map(|d| d.0).sum();
    if devs.len() >= cap + 1 {
        total += frac * devs[cap].0;
    }
    total
}

// ---------------------------------------------------------------------------
// Plain-text sidecar serialization
// ---------------------------------------------------------------------------

fn push_vec(out: &mut String, tag: &str, v: &[f64]) {
    out.push_str(tag);
    for x in &v[1..] {
        out.push(' ');
        out.push_str(&format!("{x}"));
    }
    out.push('\n');
}

impl UncertaintySet {
    /// Serializes the set to the plain-text sidecar format. Floats use the
    /// shortest round-trip representation, so re-parsing reproduces the set
    /// bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::from("rhvrp-set v1\n");
        out.push_str(&format!("family {}\n", self.family().tag()));
        out.push_str(&format!("n {}\n", self.n()));
        match self {
            UncertaintySet::Singleton { q0 } => push_vec(&mut out, "q0", q0),
            UncertaintySet::Budget(b) => {
                push_vec(&mut out, "lower", &b.lower);
                push_vec(&mut out, "upper", &b.upper);
                out.push_str(&format!("budgets {}\n", b.budgets.len()));
                for (members, bound) in &b.budgets {
                    out.push_str(&format!("budget {bound}"));
                    for i in members {
                        out.push_str(&format!(" {i}"));
                    }
                    out.push('\n');
                }
            }
            UncertaintySet::Factor(f) => {
                push_vec(&mut out, "q0", &f.q0);
                out.push_str(&format!("beta {}\n", f.beta));
                out.push_str(&format!("factors {}\n", f.factors));
                for i in 0..self.n() {
                    out.push_str("psi");
                    for f_ix in 0..f.factors {
                        out.push_str(&format!(" {}", f.psi[i * f.factors + f_ix]));
                    }
                    out.push('\n');
                }
            }
            UncertaintySet::Ellipsoid(e) => {
                push_vec(&mut out, "q0", &e.q0);
                match &e.sqrt {
                    SqrtSigma::Axis(sig) => push_vec(&mut out, "axis", sig),
                    SqrtSigma::General(mat) => {
                        let n = self.n();
                        out.push_str("general\n");
                        for i in 0..n {
                            out.push_str("row");
                            for j in 0..n {
                                out.push_str(&format!(" {}", mat[i * n + j]));
                            }
                            out.push('\n');
                        }
                    }
                }
            }
            UncertaintySet::Gamma(g) => {
                push_vec(&mut out, "q0", &g.q0);
                push_vec(&mut out, "dev", &g.dev);
                out.push_str(&format!("gamma {}\n", g.gamma));
            }
            UncertaintySet::Discrete(d) => {
                out.push_str(&format!("scenarios {}\n", d.scenarios.len()));
                for s in &d.scenarios {
                    out.push_str("scenario");
                    for x in &s[1..] {
                        out.push_str(&format!(" {x}"));
                    }
                    out.push('\n');
                }
            }
        }
        out.push_str("end\n");
        out
    }

    /// Parses the sidecar format produced by [`UncertaintySet::to_text`].
    pub fn from_text(text: &str) -> Result<Self, UncertaintyError> {
        let mut lines = text.lines().enumerate();
        let mut next = || -> Result<(usize, &str), UncertaintyError> {
            for (ix, raw) in lines.by_ref() {
                let t = raw.trim();
                if !t.is_empty() {
                    return Ok((ix + 1, t));
                }
            }
            Err(UncertaintyError::Parse {
                line: 0,
                msg: "unexpected end of file".into(),
            })
        };
        let perr = |line: usize, msg: &str| UncertaintyError::Parse {
            line,
            msg: msg.into(),
        };

        let (l, header) = next()?;
        if header != "rhvrp-set v1" {
            return Err(perr(l, "expected header 'rhvrp-set v1'"));
        }
        let (l, fam_line) = next()?;
        let family = fam_line
            .strip_prefix("family ")
            .and_then(Family::parse)
            .ok_or_else(|| perr(l, "expected 'family <tag>'"))?;
        let (l, n_line) = next()?;
        let n: usize = n_line
            .strip_prefix("n ")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| perr(l, "expected 'n <count>'"))?;

        fn parse_vec(line: usize, s: &str, tag: &str, n: usize) -> Result<Vec<f64>, UncertaintyError> {
            let body = s.strip_prefix(tag).ok_or(UncertaintyError::Parse {
                line,
                msg: format!("expected '{tag} ...'"),
            })?;
            let mut v = vec![0.0];
            for tok in body.split_whitespace() {
                v.push(tok.parse().map_err(|_| UncertaintyError::Parse {
                    line,
                    msg: format!("bad float '{tok}'"),
                })?);
            }
            if v.len() != n + 1 {
                return Err(UncertaintyError::Parse {
                    line,
                    msg: format!("expected {n} values after '{tag}'"),
                });
            }
            Ok(v)
        }

        let set = match family {
            Family::Singleton => {
                let (l, s) = next()?;
                UncertaintySet::Singleton {
                    q0: parse_vec(l, s, "q0", n)?,
                }
            }
            Family::Budget => {
                let (l1, s1) = next()?;
                let lower = parse_vec(l1, s1, "lower", n)?;
                let (l2, s2) = next()?;
                let upper = parse_vec(l2, s2, "upper", n)?;
                let (l3, s3) = next()?;
                let count: usize = s3
                    .strip_prefix("budgets ")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(l3, "expected 'budgets <count>'"))?;
                let mut budgets = Vec::with_capacity(count);
                for _ in 0..count {
                    let (lb, sb) = next()?;
                    let body = sb
                        .strip_prefix("budget ")
                        .ok_or_else(|| perr(lb, "expected 'budget <bound> <ids...>'"))?;
                    let mut toks = body.split_whitespace();
                    let bound: f64 = toks
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr(lb, "missing budget bound"))?;
                    let mut members = Vec::new();
                    for t in toks {
                        members.push(t.parse().map_err(|_| perr(lb, "bad customer id"))?);
                    }
                    budgets.push((members, bound));
                }
                UncertaintySet::Budget(BudgetSet::new(lower, upper, budgets)?)
            }
            Family::Factor => {
                let (l1, s1) = next()?;
                let q0 = parse_vec(l1, s1, "q0", n)?;
                let (l2, s2) = next()?;
                let beta: f64 = s2
                    .strip_prefix("beta ")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(l2, "expected 'beta <value>'"))?;
                let (l3, s3) = next()?;
                let factors: usize = s3
                    .strip_prefix("factors ")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(l3, "expected 'factors <count>'"))?;
                let mut psi = Vec::with_capacity(n * factors);
                for _ in 0..n {
                    let (lr, sr) = next()?;
                    let row = parse_vec(lr, sr, "psi", factors)?;
                    psi.extend_from_slice(&row[1..]);
                }
                UncertaintySet::Factor(FactorModelSet::new(q0, psi, factors, beta)?)
            }
            Family::EllipsoidAx | Family::EllipsoidGen => {
                let (l1, s1) = next()?;
                let q0 = parse_vec(l1, s1, "q0", n)?;
                let (l2, s2) = next()?;
                let sqrt = if let Ok(sig) = parse_vec(l2, s2, "axis", n) {
                    SqrtSigma::Axis(sig)
                } else if s2 == "general" {
                    let mut mat = Vec::with_capacity(n * n);
                    for _ in 0..n {
                        let (lr, sr) = next()?;
                        let row = parse_vec(lr, sr, "row", n)?;
                        mat.extend_from_slice(&row[1..]);
                    }
                    SqrtSigma::General(mat)
                } else {
                    return Err(perr(l2, "expected 'axis ...' or 'general'"));
                };
                UncertaintySet::Ellipsoid(EllipsoidSet::new(q0, sqrt)?)
            }
            Family::Gamma => {
                let (l1, s1) = next()?;
                let q0 = parse_vec(l1, s1, "q0", n)?;
                let (l2, s2) = next()?;
                let dev = parse_vec(l2, s2, "dev", n)?;
                let (l3, s3) = next()?;
                let gamma: f64 = s3
                    .strip_prefix("gamma ")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(l3, "expected 'gamma <value>'"))?;
                UncertaintySet::Gamma(CardinalitySet::new(q0, dev, gamma)?)
            }
            Family::Discrete => {
                let (l1, s1) = next()?;
                let count: usize = s1
                    .strip_prefix("scenarios ")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| perr(l1, "expected 'scenarios <count>'"))?;
                let mut scenarios = Vec::with_capacity(count);
                for _ in 0..count {
                    let (lr, sr) = next()?;
                    scenarios.push(parse_vec(lr, sr, "scenario", n)?);
                }
                UncertaintySet::Discrete(DiscreteSet::new(scenarios)?)
            }
        };
        let (l, end) = next()?;
        if end != "end" {
            return Err(perr(l, "expected 'end'"));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget_2(b1: f64) -> UncertaintySet {
        UncertaintySet::Budget(
            BudgetSet::new(
                vec![0.0, 2.0, 2.0],
                vec![0.0, 5.0, 5.0],
                vec![(vec![1, 2], b1)],
            )
            .unwrap(),
        )
    }

    #[test]
    fn budget_non_binding_equals_upper_sum() {
        let set = budget_2(10.0);
        assert_eq!(set.worst_case_load(&[1, 2]).unwrap(), 10.0);
    }

    #[test]
    fn budget_binding_caps_the_total() {
        // Polytope vertices: intersect box bounds with the budget plane; the
        // maximum of q1 + q2 subject to q in [2,5]^2, q1 + q2 <= 7 is 7.
        let set = budget_2(7.0);
        assert!((set.worst_case_load(&[1, 2]).unwrap() - 7.0).abs() < 1e-12);
        assert!((set.worst_case_load(&[1]).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_fractional_budget() {
        let set = UncertaintySet::Gamma(
            CardinalitySet::new(
                vec![0.0, 10.0, 10.0, 10.0],
                vec![0.0, 1.0, 2.0, 3.0],
                1.5,
            )
            .unwrap(),
        );
        // Largest deviation fully (3), next one half (0.5 * 2).
        let wc = set.worst_case_load(&[1, 2, 3]).unwrap();
        assert!((wc - 34.0).abs() < 1e-12, "got {wc}");
    }

    #[test]
    fn gamma_zero_collapses_to_nominal() {
        let set = UncertaintySet::Gamma(
            CardinalitySet::new(vec![0.0, 4.0, 5.0], vec![0.0, 1.0, 1.0], 0.0).unwrap(),
        );
        assert_eq!(set.worst_case_load(&[1, 2]).unwrap(), 9.0);
    }

    #[test]
    fn gamma_integer_case_has_no_fractional_term() {
        let set = UncertaintySet::Gamma(
            CardinalitySet::new(
                vec![0.0, 1.0, 1.0, 1.0, 1.0],
                vec![0.0, 5.0, 4.0, 3.0, 2.0],
                2.0,
            )
            .unwrap(),
        );
        // Two largest deviations in S = {2,3,4}: 4 + 3.
        let wc = set.worst_case_load(&[2, 3, 4]).unwrap();
        assert!((wc - (3.0 + 7.0)).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_axis_parallel_norm() {
        let set = UncertaintySet::Ellipsoid(
            EllipsoidSet::new(
                vec![0.0, 3.0, 4.0],
                SqrtSigma::Axis(vec![0.0, 3.0, 4.0]),
            )
            .unwrap(),
        );
        let wc = set.worst_case_load(&[1, 2]).unwrap();
        assert!((wc - 12.0).abs() < 1e-12, "got {wc}");
    }

    #[test]
    fn factor_zero_net_alpha_symmetry() {
        // Psi = I2, beta = 0 forces xi1 + xi2 = 0: no net disturbance.
        let set = UncertaintySet::Factor(
            FactorModelSet::new(vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 0.0, 1.0], 2, 0.0).unwrap(),
        );
        let wc = set.worst_case_load(&[1, 2]).unwrap();
        assert!((wc - 2.0).abs() < 1e-12, "got {wc}");
    }

    #[test]
    fn factor_full_budget_reaches_box_corner() {
        let set = UncertaintySet::Factor(
            FactorModelSet::new(vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 0.0, 1.0], 2, 1.0).unwrap(),
        );
        let wc = set.worst_case_load(&[1, 2]).unwrap();
        assert!((wc - 4.0).abs() < 1e-12, "got {wc}");
    }

    #[test]
    fn discrete_max_over_scenarios() {
        let set = UncertaintySet::Discrete(
            DiscreteSet::new(vec![
                vec![0.0, 1.0, 2.0],
                vec![0.0, 2.0, 1.0],
                vec![0.0, 3.0, 0.0],
            ])
            .unwrap(),
        );
        assert_eq!(set.worst_case_load(&[1]).unwrap(), 3.0);
        assert_eq!(set.worst_case_load(&[1, 2]).unwrap(), 3.0);
    }

    #[test]
    fn empty_set_loads_are_zero() {
        let sets = vec![
            budget_2(7.0),
            UncertaintySet::Gamma(
                CardinalitySet::new(vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 1.0], 1.0).unwrap(),
            ),
            UncertaintySet::Ellipsoid(
                EllipsoidSet::new(vec![0.0, 1.0, 1.0], SqrtSigma::Axis(vec![0.0, 1.0, 1.0]))
                    .unwrap(),
            ),
            UncertaintySet::Discrete(DiscreteSet::new(vec![vec![0.0, 1.0, 2.0]]).unwrap()),
            UncertaintySet::Factor(
                FactorModelSet::new(vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 0.0, 1.0], 2, 0.5)
                    .unwrap(),
            ),
        ];
        for s in sets {
            assert_eq!(s.worst_case_load(&[]).unwrap(), 0.0);
        }
    }

    #[test]
    fn max_single_demand_matches_definitions() {
        let set = UncertaintySet::Gamma(
            CardinalitySet::new(vec![0.0, 4.0, 5.0], vec![0.0, 2.0, 3.0], 1.0).unwrap(),
        );
        assert_eq!(set.max_single_demand(1).unwrap(), 6.0);
        let b = budget_2(10.0);
        assert_eq!(b.max_single_demand(2).unwrap(), 5.0);
        let d = UncertaintySet::Discrete(
            DiscreteSet::new(vec![vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 1.0]]).unwrap(),
        );
        assert_eq!(d.max_single_demand(1).unwrap(), 2.0);
    }

    #[test]
    fn out_of_range_and_duplicate_ids_are_errors() {
        let set = budget_2(7.0);
        assert!(set.worst_case_load(&[0]).is_err());
        assert!(set.worst_case_load(&[3]).is_err());
        assert!(set.worst_case_load(&[1, 1]).is_err());
    }

    #[test]
    fn sidecar_round_trip_is_exact() {
        let sets = vec![
            UncertaintySet::singleton(vec![0.0, 1.25, 2.5]),
            budget_2(7.0),
            UncertaintySet::Factor(
                FactorModelSet::new(
                    vec![0.0, 1.0, 2.0],
                    vec![0.1, -0.2, 0.3, 0.4],
                    2,
                    0.37,
                )
                .unwrap(),
            ),
            UncertaintySet::Ellipsoid(
                EllipsoidSet::new(
                    vec![0.0, 1.0, 1.0],
                    SqrtSigma::General(vec![1.0, 0.5, 0.5, 2.0]),
                )
                .unwrap(),
            ),
            UncertaintySet::Ellipsoid(
                EllipsoidSet::new(vec![0.0, 1.0, 1.0], SqrtSigma::Axis(vec![0.0, 0.3, 0.7]))
                    .unwrap(),
            ),
            UncertaintySet::Gamma(
                CardinalitySet::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.1, 0.2], 1.5).unwrap(),
            ),
            UncertaintySet::Discrete(
                DiscreteSet::new(vec![vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 1.0]]).unwrap(),
            ),
        ];
        for s in sets {
            let text = s.to_text();
            let back = UncertaintySet::from_text(&text).unwrap();
            assert_eq!(s, back, "round trip failed for {}", s.family().tag());
        }
    }

    #[test]
    fn corrupted_sidecar_is_a_parse_error() {
        let set = budget_2(7.0);
        let mut text = set.to_text();
        text = text.replace("budgets 1", "budgets 2");
        assert!(UncertaintySet::from_text(&text).is_err());
        assert!(UncertaintySet::from_text("garbage\n").is_err());
    }
}
