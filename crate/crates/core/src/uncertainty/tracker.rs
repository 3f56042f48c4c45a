//! Incremental worst-case load maintenance under single-customer insertions
//! and removals.
//!
//! Each tracker variant keeps the per-family aggregates needed to update the
//! worst-case load without a from-scratch evaluation: running sums for budget
//! and ellipsoid sets, per-factor loadings for factor models, per-scenario
//! sums for discrete sets, and for gamma sets the top-`floor(gamma)`
//! deviations in an ordered set (`plus`), the next-largest deviation (`mid`,
//! feeding the fractional term) and the remainder (`minus`, consulted only on
//! removals).

use super::{SqrtSigma, UncertaintyError, UncertaintySet};
use crate::instance::CustomerId;
use std::collections::BTreeSet;

/// Deviation key ordered by value, ties broken by ascending customer id
/// (larger value ranks higher; for equal values the smaller id ranks higher).
#[derive(Debug, Clone, Copy, PartialEq)]
struct DevKey {
    v: f64,
    id: CustomerId,
}

impl Eq for DevKey {}

impl Ord for DevKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.v.total_cmp(&other.v).then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for DevKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
enum State {
    Singleton,
    Budget {
        rho: Vec<f64>,
    },
    Factor {
        rho: Vec<f64>,
    },
    EllipsoidAxis {
        rho: f64,
    },
    EllipsoidGeneral {
        rho: Vec<f64>,
    },
    Gamma {
        plus: BTreeSet<DevKey>,
        mid: Option<DevKey>,
        minus: BTreeSet<DevKey>,
        rho_plus: f64,
    },
    Discrete {
        rho: Vec<f64>,
    },
}

/// Incremental tracker of the worst-case load of a growing and shrinking
/// customer set. One tracker per route; `add`/`remove` return the updated
/// load in the per-family update complexity (constant for budget and
/// axis-parallel ellipsoid sets, `O(F log F)` for factor models, `O(n)` for
/// general ellipsoids, `O(log |S|)` for gamma sets, `O(D)` for discrete
/// sets).
#[derive(Debug, Clone)]
pub struct LoadTracker<'a> {
    set: &'a UncertaintySet,
    members: Vec<bool>,
    count: usize,
    /// Sum of nominal (budget: upper-bound) demands over the members.
    pi: f64,
    z: f64,
    state: State,
}

impl<'a> LoadTracker<'a> {
    pub fn new(set: &'a UncertaintySet) -> Self {
        let n = set.n();
        let state = match set {
            UncertaintySet::Singleton { .. } => State::Singleton,
            UncertaintySet::Budget(b) => State::Budget {
                // rho_l starts at minus the lower-corner slack of budget l.
                rho: (0..b.budgets.len()).map(|l| -b.base_slack(l)).collect(),
            },
            UncertaintySet::Factor(f) => State::Factor {
                rho: vec![0.0; f.factors],
            },
            UncertaintySet::Ellipsoid(e) => match &e.sqrt {
                SqrtSigma::Axis(_) => State::EllipsoidAxis { rho: 0.0 },
                SqrtSigma::General(_) => State::EllipsoidGeneral { rho: vec![0.0; n] },
            },
            UncertaintySet::Gamma(_) => State::Gamma {
                plus: BTreeSet::new(),
                mid: None,
                minus: BTreeSet::new(),
                rho_plus: 0.0,
            },
            UncertaintySet::Discrete(d) => State::Discrete {
                rho: vec![0.0; d.scenarios.len()],
            },
        };
        LoadTracker {
            set,
            members: vec![false; n + 1],
            count: 0,
            pi: 0.0,
            z: 0.0,
            state,
        }
    }

    /// The set this tracker evaluates against.
    pub fn set(&self) -> &'a UncertaintySet {
        self.set
    }

    /// Current worst-case load of the tracked customer set.
    pub fn load(&self) -> f64 {
        self.z
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, j: CustomerId) -> bool {
        j < self.members.len() && self.members[j]
    }

    /// Members in ascending id order (diagnostic; linear in `n`).
    pub fn members(&self) -> Vec<CustomerId> {
        (1..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    /// Rebuilds a tracker over `s` by repeated insertion.
    pub fn from_members(set: &'a UncertaintySet, s: &[CustomerId]) -> Result<Self, UncertaintyError> {
        let mut t = LoadTracker::new(set);
        for &i in s {
            t.add(i)?;
        }
        Ok(t)
    }

    /// Adds customer `j` and returns the updated worst-case load.
    pub fn add(&mut self, j: CustomerId) -> Result<f64, UncertaintyError> {
        if j == 0 || j >= self.members.len() {
            return Err(UncertaintyError::IdOutOfRange(j));
        }
        if self.members[j] {
            return Err(UncertaintyError::DuplicateAdd(j));
        }
        self.members[j] = true;
        self.count += 1;
        match (&mut self.state, self.set) {
            (State::Singleton, UncertaintySet::Singleton { q0 }) => {
                self.pi += q0[j];
                self.z = self.pi;
            }
            (State::Budget { rho }, UncertaintySet::Budget(b)) => {
                self.pi += b.upper[j];
                let mut delta = b.upper[j];
                if let Some(l) = b.budget_of(j) {
                    let old = rho[l];
                    rho[l] += b.upper[j] - b.lower[j];
                    delta -= rho[l].max(0.0) - old.max(0.0);
                }
                self.z += delta;
            }
            (State::Factor { rho }, UncertaintySet::Factor(f)) => {
                self.pi += f.q0[j];
                for (ix, r) in rho.iter_mut().enumerate() {
                    *r += f.loading(j, ix);
                }
                self.z = self.pi + super::factor_worst_disturbance(rho, f.beta);
            }
            (State::EllipsoidAxis { rho }, UncertaintySet::Ellipsoid(e)) => {
                let SqrtSigma::Axis(sig) = &e.sqrt else { unreachable!() };
                self.pi += e.q0[j];
                *rho += sig[j] * sig[j];
                self.z = self.pi + rho.max(0.0).sqrt();
            }
            (State::EllipsoidGeneral { rho }, UncertaintySet::Ellipsoid(e)) => {
                let SqrtSigma::General(m) = &e.sqrt else { unreachable!() };
                let n = rho.len();
                self.pi += e.q0[j];
                for (l, r) in rho.iter_mut().enumerate() {
                    *r += m[(j - 1) * n + l];
                }
                self.z = self.pi + rho.iter().map(|v| v * v).sum::<f64>().sqrt();
            }
            (
                State::Gamma {
                    plus,
                    mid,
                    minus,
                    rho_plus,
                },
                UncertaintySet::Gamma(g),
            ) => {
                self.pi += g.q0[j];
                let cap = g.gamma.floor() as usize;
                let key = DevKey { v: g.dev[j], id: j };
                if plus.len() < cap {
                    debug_assert!(mid.is_none() && minus.is_empty());
                    plus.insert(key);
                    *rho_plus += key.v;
                } else {
                    match *mid {
                        None => {
                            debug_assert!(minus.is_empty());
                            if cap > 0 && key > *plus.first().unwrap() {
                                let low = *plus.first().unwrap();
                                plus.remove(&low);
                                plus.insert(key);
                                *rho_plus += key.v - low.v;
                                *mid = Some(low);
                            } else {
                                *mid = Some(key);
                            }
                        }
                        Some(md) => {
                            if cap > 0 && key > *plus.first().unwrap() {
                                let low = *plus.first().unwrap();
                                plus.remove(&low);
                                plus.insert(key);
                                *rho_plus += key.v - low.v;
                                minus.insert(md);
                                *mid = Some(low);
                            } else if key > md {
                                minus.insert(md);
                                *mid = Some(key);
                            } else {
                                minus.insert(key);
                            }
                        }
                    }
                }
                let frac = g.gamma - g.gamma.floor();
                self.z = self.pi + *rho_plus + frac * mid.map_or(0.0, |k| k.v);
            }
            (State::Discrete { rho }, UncertaintySet::Discrete(d)) => {
                for (ix, r) in rho.iter_mut().enumerate() {
                    *r += d.scenarios[ix][j];
                }
                self.z = rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            }
            _ => unreachable!("tracker state matches its set family"),
        }
        Ok(self.z)
    }

    /// Removes customer `j` and returns the updated worst-case load.
    pub fn remove(&mut self, j: CustomerId) -> Result<f64, UncertaintyError> {
        if j == 0 || j >= self.members.len() {
            return Err(UncertaintyError::IdOutOfRange(j));
        }
        if !self.members[j] {
            return Err(UncertaintyError::RemoveAbsent(j));
        }
        self.members[j] = false;
        self.count -= 1;
        match (&mut self.state, self.set) {
            (State::Singleton, UncertaintySet::Singleton { q0 }) => {
                self.pi -= q0[j];
                self.z = self.pi;
            }
            (State::Budget { rho }, UncertaintySet::Budget(b)) => {
                self.pi -= b.upper[j];
                let mut delta = -b.upper[j];
                if let Some(l) = b.budget_of(j) {
                    let old = rho[l];
                    rho[l] -= b.upper[j] - b.lower[j];
                    delta -= rho[l].max(0.0) - old.max(0.0);
                }
                self.z += delta;
            }
            (State::Factor { rho }, UncertaintySet::Factor(f)) => {
                self.pi -= f.q0[j];
                for (ix, r) in rho.iter_mut().enumerate() {
                    *r -= f.loading(j, ix);
                }
                self.z = self.pi + super::factor_worst_disturbance(rho, f.beta);
            }
            (State::EllipsoidAxis { rho }, UncertaintySet::Ellipsoid(e)) => {
                let SqrtSigma::Axis(sig) = &e.sqrt else { unreachable!() };
                self.pi -= e.q0[j];
                *rho -= sig[j] * sig[j];
                self.z = self.pi + rho.max(0.0).sqrt();
            }
            (State::EllipsoidGeneral { rho }, UncertaintySet::Ellipsoid(e)) => {
                let SqrtSigma::General(m) = &e.sqrt else { unreachable!() };
                let n = rho.len();
                self.pi -= e.q0[j];
                for (l, r) in rho.iter_mut().enumerate() {
                    *r -= m[(j - 1) * n + l];
                }
                self.z = self.pi + rho.iter().map(|v| v * v).sum::<f64>().sqrt();
            }
            (
                State::Gamma {
                    plus,
                    mid,
                    minus,
                    rho_plus,
                },
                UncertaintySet::Gamma(g),
            ) => {
                self.pi -= g.q0[j];
                let key = DevKey { v: g.dev[j], id: j };
                if plus.contains(&key) {
                    plus.remove(&key);
                    *rho_plus -= key.v;
                    if let Some(md) = mid.take() {
                        plus.insert(md);
                        *rho_plus += md.v;
                        *mid = minus.pop_last();
                    }
                } else if *mid == Some(key) {
                    *mid = minus.pop_last();
                } else {
                    debug_assert!(minus.contains(&key));
                    minus.remove(&key);
                }
                let frac = g.gamma - g.gamma.floor();
                self.z = self.pi + *rho_plus + frac * mid.map_or(0.0, |k| k.v);
            }
            (State::Discrete { rho }, UncertaintySet::Discrete(d)) => {
                for (ix, r) in rho.iter_mut().enumerate() {
                    *r -= d.scenarios[ix][j];
                }
                self.z = if self.count == 0 {
                    0.0
                } else {
                    rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                };
            }
            _ => unreachable!("tracker state matches its set family"),
        }
        Ok(self.z)
    }

    /// Structural invariants of the gamma state: `|plus| = min(|S|,
    /// floor(gamma))`, `mid` present iff more members exist, and every
    /// element of `plus` ranks at least `mid`, which ranks at least every
    /// element of `minus`. Always true for the other families.
    pub fn gamma_invariants_ok(&self) -> bool {
        let State::Gamma {
            plus,
            mid,
            minus,
            rho_plus,
        } = &self.state
        else {
            return true;
        };
        let UncertaintySet::Gamma(g) = self.set else {
            return false;
        };
        let cap = g.gamma.floor() as usize;
        if plus.len() != self.count.min(cap) {
            return false;
        }
        let rest = self.count - plus.len();
        match (rest, mid) {
            (0, Some(_)) => return false,
            (0, None) => {}
            (_, None) => return false,
            (r, Some(md)) => {
                if minus.len() != r - 1 {
                    return false;
                }
                if let Some(lowest_plus) = plus.first() {
                    if md > lowest_plus {
                        return false;
                    }
                }
                if let Some(highest_minus) = minus.last() {
                    if highest_minus > md {
                        return false;
                    }
                }
            }
        }
        let sum: f64 = plus.iter().map(|k| k.v).sum();
        (sum - *rho_plus).abs() <= 1e-9 * sum.abs().max(1.0)
    }
}
