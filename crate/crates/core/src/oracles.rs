//! Brute-force maximizers used as independent oracles in tests.
//!
//! Everything here maximizes `sum_{i in S} q_i` over an uncertainty set by
//! exhaustive enumeration of candidate optima (polytope vertices, deviation
//! subsets, scenario lists), deliberately avoiding the closed-form code
//! paths under test. Only suitable for small `n`.

use crate::instance::CustomerId;
use crate::uncertainty::{
    BudgetSet, CardinalitySet, DiscreteSet, EllipsoidSet, FactorModelSet, SqrtSigma,
    UncertaintySet,
};

/// Dispatches to the family-specific brute-force maximizer.
pub fn worst_case_load(set: &UncertaintySet, s: &[CustomerId]) -> f64 {
    match set {
        UncertaintySet::Singleton { q0 } => s.iter().map(|&i| q0[i]).sum(),
        UncertaintySet::Budget(b) => budget(b, s),
        UncertaintySet::Factor(f) => factor(f, s),
        UncertaintySet::Ellipsoid(e) => ellipsoid(e, s),
        UncertaintySet::Gamma(g) => gamma(g, s),
        UncertaintySet::Discrete(d) => discrete(d, s),
    }
}

/// Budget sets: the budgets are disjoint, so each budget group (and each
/// unconstrained customer) can be maximized independently. For a group the
/// optimum sits at a vertex of `[lower, upper] ∩ {sum <= b}`; enumerate all
/// assignments of members to {lower, upper, slack-filling} with at most one
/// slack coordinate and keep the best feasible value.
pub fn budget(b: &BudgetSet, s: &[CustomerId]) -> f64 {
    let in_s = |i: CustomerId| s.contains(&i);
    let mut total = 0.0;
    let mut grouped = vec![false; b.lower.len()];
    for (members, bound) in &b.budgets {
        for &i in members {
            grouped[i] = true;
        }
        total += budget_group(b, members, *bound, &in_s);
    }
    for &i in s {
        if !grouped[i] {
            total += b.upper[i];
        }
    }
    total
}

fn budget_group(
    b: &BudgetSet,
    members: &[CustomerId],
    bound: f64,
    in_s: &dyn Fn(CustomerId) -> bool,
) -> f64 {
    let g = members.len();
    assert!(g <= 12, "budget group too large for enumeration");
    let mut best = f64::NEG_INFINITY;
    // Assignment code per member: 0 = lower, 1 = upper, 2 = slack coordinate.
    let mut code = vec![0u8; g];
    loop {
        let slack_count = code.iter().filter(|&&c| c == 2).count();
        if slack_count <= 1 {
            let mut sum = 0.0;
            let mut value = 0.0;
            let mut slack_ix = None;
            for (ix, &i) in members.iter().enumerate() {
                match code[ix] {
                    0 => {
                        sum += b.lower[i];
                        if in_s(i) {
                            value += b.lower[i];
                        }
                    }
                    1 => {
                        sum += b.upper[i];
                        if in_s(i) {
                            value += b.upper[i];
                        }
                    }
                    _ => slack_ix = Some(i),
                }
            }
            let feasible = match slack_ix {
                None => sum <= bound + 1e-9,
                Some(i) => {
                    let q = (bound - sum).clamp(b.lower[i], b.upper[i]);
                    let ok = sum + q <= bound + 1e-9;
                    if ok && in_s(i) {
                        value += q;
                    }
                    ok
                }
            };
            if feasible {
                best = best.max(value);
            }
        }
        // Next assignment in base 3.
        let mut pos = 0;
        loop {
            if pos == g {
                return best;
            }
            code[pos] += 1;
            if code[pos] == 3 {
                code[pos] = 0;
                pos += 1;
            } else {
                break;
            }
        }
    }
}

/// Factor models: enumerate the vertices of the box `[-1, 1]^F` intersected
/// with `|e^T xi| <= beta F` (each coordinate at -1, +1 or determined by one
/// of the two coupling hyperplanes), then evaluate the disturbance.
pub fn factor(fm: &FactorModelSet, s: &[CustomerId]) -> f64 {
    let f = fm.factors;
    assert!(f <= 8, "factor count too large for enumeration");
    let base: f64 = s.iter().map(|&i| fm.q0[i]).sum();
    let mut rho = vec![0.0; f];
    for &i in s {
        for (ix, r) in rho.iter_mut().enumerate() {
            *r += fm.loading(i, ix);
        }
    }
    let cap = fm.beta * f as f64;
    let mut best = f64::NEG_INFINITY;
    let mut code = vec![0u8; f];
    loop {
        let free_count = code.iter().filter(|&&c| c == 2).count();
        if free_count <= 1 {
            let mut fixed = 0.0f64;
            let mut value = 0.0f64;
            let mut free_ix = None;
            for ix in 0..f {
                match code[ix] {
                    0 => {
                        fixed -= 1.0;
                        value -= rho[ix];
                    }
                    1 => {
                        fixed += 1.0;
                        value += rho[ix];
                    }
                    _ => free_ix = Some(ix),
                }
            }
            match free_ix {
                None => {
                    if fixed.abs() <= cap + 1e-9 {
                        best = best.max(value);
                    }
                }
                Some(ix) => {
                    // Both coupling planes; the box face is covered by the
                    // corner enumeration.
                    for target in [cap, -cap] {
                        let xi = (target - fixed).clamp(-1.0, 1.0);
                        if (fixed + xi).abs() <= cap + 1e-9 {
                            best = best.max(value + xi * rho[ix]);
                        }
                    }
                }
            }
        }
        let mut pos = 0;
        loop {
            if pos == f {
                return base + best;
            }
            code[pos] += 1;
            if code[pos] == 3 {
                code[pos] = 0;
                pos += 1;
            } else {
                break;
            }
        }
    }
}

/// Ellipsoids: the KKT maximizer is `xi* = v / ||v||` with `v` the summed
/// square-root columns; the oracle confirms feasibility, evaluates the
/// objective there and checks that random unit-sphere samples never beat it.
pub fn ellipsoid(e: &EllipsoidSet, s: &[CustomerId]) -> f64 {
    use rand::Rng;
    use rand::SeedableRng;
    let n = e.q0.len() - 1;
    let base: f64 = s.iter().map(|&i| e.q0[i]).sum();
    let col = |i: CustomerId, l: usize| -> f64 {
        match &e.sqrt {
            SqrtSigma::Axis(sig) => {
                if l == i - 1 {
                    sig[i]
                } else {
                    0.0
                }
            }
            SqrtSigma::General(m) => m[(i - 1) * n + l],
        }
    };
    let mut v = vec![0.0; n];
    for &i in s {
        for (l, vl) in v.iter_mut().enumerate() {
            *vl += col(i, l);
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let attained = base + norm;
    if norm > 0.0 {
        let feas: f64 = v.iter().map(|x| (x / norm) * (x / norm)).sum();
        assert!((feas - 1.0).abs() < 1e-9, "maximizer must sit on the sphere");
    }
    // Random feasible directions never exceed the candidate optimum.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_sample = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let dn = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if dn == 0.0 {
            continue;
        }
        let val: f64 = dir
            .iter()
            .zip(v.iter())
            .map(|(d, vl)| d / dn * vl)
            .sum();
        worst_sample = worst_sample.max(base + val);
    }
    assert!(
        worst_sample <= attained + 1e-9 * attained.abs().max(1.0),
        "a sampled direction beat the KKT point"
    );
    attained
}

/// Gamma sets: brute force over all subsets of fully deviating customers
/// within the integer budget, plus one fractional coordinate on the
/// remaining budget.
pub fn gamma(g: &CardinalitySet, s: &[CustomerId]) -> f64 {
    assert!(s.len() <= 20, "set too large for subset enumeration");
    let base: f64 = s.iter().map(|&i| g.q0[i]).sum();
    let cap = g.gamma.floor() as usize;
    let mut best = 0.0f64;
    for mask in 0u32..(1 << s.len()) {
        let chosen: Vec<CustomerId> = s
            .iter()
            .enumerate()
            .filter(|(ix, _)| mask & (1 << ix) != 0)
            .map(|(_, &i)| i)
            .collect();
        if chosen.len() > cap {
            continue;
        }
        let mut value: f64 = chosen.iter().map(|&i| g.dev[i]).sum();
        let left = (g.gamma - chosen.len() as f64).min(1.0);
        if left > 0.0 {
            let extra = s
                .iter()
                .filter(|i| !chosen.contains(i))
                .map(|&i| g.dev[i])
                .fold(0.0, f64::max);
            value += left * extra;
        }
        best = best.max(value);
    }
    base + best
}

/// Discrete sets: evaluate every scenario with independent code and check
/// that random convex combinations interpolate below the best vertex.
pub fn discrete(d: &DiscreteSet, s: &[CustomerId]) -> f64 {
    use rand::Rng;
    use rand::SeedableRng;
    if s.is_empty() {
        return 0.0;
    }
    let per_scenario: Vec<f64> = d
        .scenarios
        .iter()
        .map(|q| s.iter().map(|&i| q[i]).sum())
        .collect();
    let best = per_scenario.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xd15c);
    for _ in 0..1000 {
        let mut w: Vec<f64> = (0..per_scenario.len())
            .map(|_| rng.random_range(0.0..1.0))
            .collect();
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            continue;
        }
        for x in &mut w {
            *x /= total;
        }
        let mixed: f64 = w
            .iter()
            .zip(per_scenario.iter())
            .map(|(wi, vi)| wi * vi)
            .sum();
        assert!(mixed <= best + 1e-9 * best.abs().max(1.0));
    }
    best
}
