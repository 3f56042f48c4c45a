//! Benchmark-parameterized construction of uncertainty sets.
//!
//! All builders are driven by two scalars `alpha, beta in [0, 1]`: `alpha`
//! scales the per-customer deviation range `[(1-alpha) q0, (1+alpha) q0]`,
//! `beta` the correlation budget. Customers are partitioned into four
//! geographic quadrants around the centroid of the customer coordinates
//! (depot excluded); boundary customers go by the half-open rule
//! `(x >= cx, y >= cy)`.

use super::{
    BudgetSet, CardinalitySet, DiscreteSet, EllipsoidSet, FactorModelSet, SqrtSigma,
    UncertaintyError, UncertaintySet,
};
use crate::instance::Instance;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uncertainty-set family selector, as exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Singleton,
    Budget,
    Factor,
    EllipsoidAx,
    EllipsoidGen,
    Gamma,
    Discrete,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Singleton => "singleton",
            Family::Budget => "budget",
            Family::Factor => "factor",
            Family::EllipsoidAx => "ellipsoid-ax",
            Family::EllipsoidGen => "ellipsoid-gen",
            Family::Gamma => "gamma",
            Family::Discrete => "discrete",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "singleton" => Family::Singleton,
            "budget" => Family::Budget,
            "factor" => Family::Factor,
            "ellipsoid-ax" => Family::EllipsoidAx,
            "ellipsoid-gen" => Family::EllipsoidGen,
            "gamma" => Family::Gamma,
            "discrete" => Family::Discrete,
            _ => return None,
        })
    }

    pub fn all() -> [Family; 7] {
        [
            Family::Singleton,
            Family::Budget,
            Family::Factor,
            Family::EllipsoidAx,
            Family::EllipsoidGen,
            Family::Gamma,
            Family::Discrete,
        ]
    }
}

/// Quadrant index of a customer relative to the origin: NE=0, NW=1, SW=2,
/// SE=3.
fn quadrant(p: (f64, f64), origin: (f64, f64)) -> usize {
    match (p.0 >= origin.0, p.1 >= origin.1) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}

fn customer_centroid(instance: &Instance) -> (f64, f64) {
    let coords = instance.coords();
    let n = instance.customer_count() as f64;
    let sx: f64 = coords[1..].iter().map(|p| p.0).sum();
    let sy: f64 = coords[1..].iter().map(|p| p.1).sum();
    (sx / n, sy / n)
}

/// Factor loading matrix: row `i - 1` distributes `alpha * q0_i` over the
/// four quadrant factors proportionally to the inverse distance of customer
/// `i` to each quadrant centroid. Empty quadrants use the global customer
/// centroid as their representative point.
fn factor_loadings(instance: &Instance, alpha: f64) -> Vec<f64> {
    let n = instance.customer_count();
    let coords = instance.coords();
    let origin = customer_centroid(instance);
    let mut sums = [(0.0f64, 0.0f64, 0usize); 4];
    for i in 1..=n {
        let q = quadrant(coords[i], origin);
        sums[q].0 += coords[i].0;
        sums[q].1 += coords[i].1;
        sums[q].2 += 1;
    }
    let centroids: Vec<(f64, f64)> = sums
        .iter()
        .map(|&(sx, sy, c)| {
            if c == 0 {
                origin
            } else {
                (sx / c as f64, sy / c as f64)
            }
        })
        .collect();
    let mut psi = vec![0.0; n * 4];
    for i in 1..=n {
        let mut w = [0.0f64; 4];
        let mut total = 0.0;
        for f in 0..4 {
            let d = ((coords[i].0 - centroids[f].0).powi(2)
                + (coords[i].1 - centroids[f].1).powi(2))
            .sqrt();
            w[f] = 1.0 / d.max(1e-9);
            total += w[f];
        }
        for f in 0..4 {
            psi[(i - 1) * 4 + f] = alpha * instance.demand(i) * w[f] / total;
        }
    }
    psi
}

/// Symmetric PSD square root by eigendecomposition; eigenvalues below zero
/// (floating-point noise on a PSD matrix) are clamped to zero.
fn symmetric_sqrt(sigma: DMatrix<f64>) -> DMatrix<f64> {
    let eig = sigma.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let mut scaled = eig.eigenvectors.clone();
    for (c, s) in sqrt_vals.iter().enumerate() {
        scaled.column_mut(c).scale_mut(*s);
    }
    let root = &scaled * eig.eigenvectors.transpose();
    // Exact symmetry despite rounding.
    let rt = root.transpose();
    (&root + rt) * 0.5
}

fn check_param(name: &'static str, v: f64) -> Result<(), UncertaintyError> {
    if !(0.0..=1.0).contains(&v) || !v.is_finite() {
        return Err(UncertaintyError::ParamRange { name, value: v });
    }
    Ok(())
}

/// Builds an uncertainty set of the requested family from the benchmark
/// instance, with the nominal demands taken from the instance data.
///
/// - budget: bounds `(1 +- alpha) q0`, one budget per nonempty quadrant with
///   bound `(1 + alpha beta)` times the quadrant's nominal demand;
/// - factor: four quadrant factors with inverse-distance loadings and
///   symmetry budget `beta`;
/// - ellipsoid: `Sigma = (1-beta) Psi Psi^T + beta diag(alpha q0)^2`
///   (axis-parallel for the `ellipsoid-ax` family, which behaves like
///   `beta = 1`);
/// - gamma: deviations `alpha q0`, budget `Gamma = beta n`;
/// - discrete: `q0` plus `nint(beta n)` scenarios sampled coordinatewise
///   uniformly from the hyperrectangle, driven by `seed`.
pub fn build_set(
    instance: &Instance,
    family: Family,
    alpha: f64,
    beta: f64,
    seed: u64,
) -> Result<UncertaintySet, UncertaintyError> {
    check_param("alpha", alpha)?;
    check_param("beta", beta)?;
    let n = instance.customer_count();
    let q0 = instance.demands().to_vec();

    Ok(match family {
        Family::Singleton => UncertaintySet::Singleton { q0 },
        Family::Budget => {
            let lower: Vec<f64> = q0.iter().map(|q| (1.0 - alpha) * q).collect();
            let upper: Vec<f64> = q0.iter().map(|q| (1.0 + alpha) * q).collect();
            let origin = customer_centroid(instance);
            let coords = instance.coords();
            let mut groups: [Vec<usize>; 4] = Default::default();
            for i in 1..=n {
                groups[quadrant(coords[i], origin)].push(i);
            }
            let mut budgets = Vec::new();
            for members in groups.into_iter() {
                if members.is_empty() {
                    continue;
                }
                let nominal: f64 = members.iter().map(|&i| q0[i]).sum();
                budgets.push((members, (1.0 + alpha * beta) * nominal));
            }
            UncertaintySet::Budget(BudgetSet::new(lower, upper, budgets)?)
        }
        Family::Factor => {
            let psi = factor_loadings(instance, alpha);
            UncertaintySet::Factor(FactorModelSet::new(q0, psi, 4, beta)?)
        }
        Family::EllipsoidAx => {
            let sig: Vec<f64> = q0.iter().map(|q| alpha * q).collect();
            UncertaintySet::Ellipsoid(EllipsoidSet::new(q0, SqrtSigma::Axis(sig))?)
        }
        Family::EllipsoidGen => {
            if beta == 1.0 {
                let sig: Vec<f64> = q0.iter().map(|q| alpha * q).collect();
                return Ok(UncertaintySet::Ellipsoid(EllipsoidSet::new(
                    q0,
                    SqrtSigma::Axis(sig),
                )?));
            }
            let psi = factor_loadings(instance, alpha);
            let psi_m = DMatrix::from_fn(n, 4, |r, c| psi[r * 4 + c]);
            let mut sigma = &psi_m * psi_m.transpose() * (1.0 - beta);
            for i in 0..n {
                let d = alpha * q0[i + 1];
                sigma[(i, i)] += beta * d * d;
            }
            let root = symmetric_sqrt(sigma);
            let mut flat = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    flat[i * n + j] = root[(i, j)];
                }
            }
            UncertaintySet::Ellipsoid(EllipsoidSet::new(q0, SqrtSigma::General(flat))?)
        }
        Family::Gamma => {
            let dev: Vec<f64> = q0.iter().map(|q| alpha * q).collect();
            let raw = beta * n as f64;
            // Snap near-integer budgets so beta = 1 yields exactly Gamma = n.
            let gamma = if (raw - raw.round()).abs() < 1e-9 {
                raw.round()
            } else {
                raw
            };
            UncertaintySet::Gamma(CardinalitySet::new(q0, dev, gamma)?)
        }
        Family::Discrete => {
            let count = (beta * n as f64).round() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut scenarios = vec![q0.clone()];
            for _ in 0..count {
                let mut s = vec![0.0; n + 1];
                for i in 1..=n {
                    let lo = (1.0 - alpha) * q0[i];
                    let hi = (1.0 + alpha) * q0[i];
                    s[i] = if hi > lo { rng.random_range(lo..=hi) } else { lo };
                }
                scenarios.push(s);
            }
            UncertaintySet::Discrete(DiscreteSet::new(scenarios)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{DistanceRounding, InstanceData, Variant, VehicleType};

    fn grid_instance(n: usize) -> Instance {
        // Customers on a ring around the depot so all four quadrants are
        // populated for n >= 4.
        let mut coords = vec![(0.0, 0.0)];
        let mut demand = vec![0.0];
        for i in 0..n {
            let a = 2.0 * std::f64::consts::PI * (i as f64 + 0.3) / n as f64;
            coords.push((10.0 * a.cos(), 10.0 * a.sin()));
            demand.push(5.0 + (i % 4) as f64);
        }
        Instance::build(InstanceData {
            coords,
            demand,
            vehicle_types: vec![VehicleType {
                capacity: 100.0,
                fixed_cost: 0.0,
                multiplier: 1.0,
                count: n,
            }],
            variant: Variant::Cvrp,
            allowed: None,
            depots: None,
            rounding: DistanceRounding::None,
        })
        .unwrap()
    }

    #[test]
    fn zero_radius_sets_collapse_to_singleton_behavior() {
        let inst = grid_instance(6);
        let s: Vec<usize> = vec![1, 3, 5];
        let nominal: f64 = s.iter().map(|&i| inst.demand(i)).sum();
        for fam in Family::all() {
            let set = build_set(&inst, fam, 0.0, 0.0, 7).unwrap();
            let wc = set.worst_case_load(&s).unwrap();
            assert!(
                (wc - nominal).abs() < 1e-9,
                "family {} gave {wc} instead of {nominal}",
                fam.tag()
            );
        }
    }

    #[test]
    fn gamma_full_budget_reaches_the_upper_corner() {
        let inst = grid_instance(5);
        let set = build_set(&inst, Family::Gamma, 0.25, 1.0, 0).unwrap();
        let UncertaintySet::Gamma(g) = &set else { panic!() };
        assert_eq!(g.gamma, 5.0);
        let s: Vec<usize> = (1..=5).collect();
        let upper: f64 = s.iter().map(|&i| 1.25 * inst.demand(i)).sum();
        assert!((set.worst_case_load(&s).unwrap() - upper).abs() < 1e-9);
    }

    #[test]
    fn ellipsoid_beta_one_is_axis_parallel() {
        let inst = grid_instance(5);
        let set = build_set(&inst, Family::EllipsoidGen, 0.1, 1.0, 0).unwrap();
        let UncertaintySet::Ellipsoid(e) = &set else { panic!() };
        assert!(e.is_axis_parallel());
        let SqrtSigma::Axis(sig) = &e.sqrt else { panic!() };
        for i in 1..=5 {
            assert!((sig[i] - 0.1 * inst.demand(i)).abs() < 1e-12);
        }
    }

    #[test]
    fn general_ellipsoid_root_squares_back_to_sigma() {
        let inst = grid_instance(8);
        let alpha = 0.2;
        let beta = 0.4;
        let set = build_set(&inst, Family::EllipsoidGen, alpha, beta, 0).unwrap();
        let UncertaintySet::Ellipsoid(e) = &set else { panic!() };
        let SqrtSigma::General(m) = &e.sqrt else { panic!() };
        let n = 8;
        let psi = factor_loadings(&inst, alpha);
        let psi_m = DMatrix::from_fn(n, 4, |r, c| psi[r * 4 + c]);
        let mut sigma = &psi_m * psi_m.transpose() * (1.0 - beta);
        for i in 0..n {
            let d = alpha * inst.demand(i + 1);
            sigma[(i, i)] += beta * d * d;
        }
        let root = DMatrix::from_fn(n, n, |r, c| m[r * n + c]);
        let sq = &root * &root;
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (sq[(i, j)] - sigma[(i, j)]).abs() < 1e-8,
                    "square mismatch at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn discrete_builder_injects_the_nominal_scenario() {
        let inst = grid_instance(5);
        let set = build_set(&inst, Family::Discrete, 0.3, 0.5, 99).unwrap();
        let UncertaintySet::Discrete(d) = &set else { panic!() };
        // nint(0.5 * 5) = 3 sampled scenarios plus the nominal one.
        assert_eq!(d.scenarios.len(), 4);
        for i in 1..=5 {
            assert_eq!(d.scenarios[0][i], inst.demand(i));
        }
        // Deterministic under the same seed.
        let again = build_set(&inst, Family::Discrete, 0.3, 0.5, 99).unwrap();
        assert_eq!(set, again);
    }

    #[test]
    fn budget_builder_uses_quadrant_bounds() {
        let inst = grid_instance(8);
        let alpha = 0.2;
        let beta = 0.5;
        let set = build_set(&inst, Family::Budget, alpha, beta, 0).unwrap();
        let UncertaintySet::Budget(b) = &set else { panic!() };
        assert!(!b.budgets.is_empty());
        let n_covered: usize = b.budgets.iter().map(|(m, _)| m.len()).sum();
        assert_eq!(n_covered, 8, "every customer sits in exactly one quadrant");
        for (members, bound) in &b.budgets {
            let nominal: f64 = members.iter().map(|&i| inst.demand(i)).sum();
            assert!((bound - (1.0 + alpha * beta) * nominal).abs() < 1e-9);
        }
    }

    #[test]
    fn alpha_beta_out_of_range_is_an_error() {
        let inst = grid_instance(4);
        assert!(build_set(&inst, Family::Gamma, -0.1, 0.0, 0).is_err());
        assert!(build_set(&inst, Family::Gamma, 0.1, 1.5, 0).is_err());
    }
}
