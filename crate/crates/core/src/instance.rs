//! Problem data for the heterogeneous VRP: nodes, demands, fleet, variant
//! transforms, routes, solutions and feasibility validation.
//!
//! Customers are numbered `1..=n`; node `0` is the depot. Demand vectors are
//! stored with length `n + 1` so that `demand[i]` is the demand of customer
//! `i` (entry 0 is unused and zero).

use crate::uncertainty::UncertaintySet;
use thiserror::Error;

/// Customer identifier, `1..=n`. `0` denotes the depot.
pub type CustomerId = usize;
/// Index into [`Instance::vehicle_types`].
pub type TypeIndex = usize;

/// Relative tolerance for capacity checks: a route is capacity-feasible if
/// its worst-case load does not exceed `Q * (1 + CAPACITY_EPS)`.
pub const CAPACITY_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance must have at least one customer")]
    NoCustomers,
    #[error("instance must have at least one vehicle type")]
    NoVehicleTypes,
    #[error("customer {0} has negative demand")]
    NegativeDemand(CustomerId),
    #[error("vehicle type {0} has non-positive capacity")]
    BadCapacity(TypeIndex),
    #[error("vehicle type {0} has negative fixed cost")]
    NegativeFixedCost(TypeIndex),
    #[error("vehicle type {0} has zero availability")]
    ZeroCount(TypeIndex),
    #[error("customer {0} has an empty allowed-type set")]
    EmptyAllowedSet(CustomerId),
    #[error("invalid customer id {0}")]
    InvalidCustomer(CustomerId),
    #[error("invalid vehicle type index {0}")]
    InvalidType(TypeIndex),
    #[error("variant {variant:?} requires {missing}")]
    VariantDataMismatch {
        variant: Variant,
        missing: &'static str,
    },
    #[error("coordinate table must have n + 1 = {expected} rows, got {got}")]
    BadCoordCount { expected: usize, got: usize },
    #[error("demand vector must have n + 1 = {expected} entries, got {got}")]
    BadDemandCount { expected: usize, got: usize },
}

/// The HVRP variants distinguished by fleet-size limits, fixed costs and
/// routing-cost structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Cvrp,
    HvrpFd,
    HvrpD,
    FsmFd,
    FsmD,
    FsmF,
    Sdvrp,
    Mdvrp,
}

impl Variant {
    pub fn tag(self) -> &'static str {
        match self {
            Variant::Cvrp => "cvrp",
            Variant::HvrpFd => "hvrpfd",
            Variant::HvrpD => "hvrpd",
            Variant::FsmFd => "fsmfd",
            Variant::FsmD => "fsmd",
            Variant::FsmF => "fsmf",
            Variant::Sdvrp => "sdvrp",
            Variant::Mdvrp => "mdvrp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "cvrp" => Variant::Cvrp,
            "hvrpfd" => Variant::HvrpFd,
            "hvrpd" => Variant::HvrpD,
            "fsmfd" => Variant::FsmFd,
            "fsmd" => Variant::FsmD,
            "fsmf" => Variant::FsmF,
            "sdvrp" => Variant::Sdvrp,
            "mdvrp" => Variant::Mdvrp,
            _ => return None,
        })
    }

    /// Whether the fleet is unlimited (`m_k = n` for every type).
    pub fn unlimited_fleet(self) -> bool {
        matches!(
            self,
            Variant::FsmFd | Variant::FsmD | Variant::FsmF | Variant::Mdvrp
        )
    }
}

/// Distance rounding convention applied to Euclidean distances before the
/// per-type cost multiplier. Benchmark conventions differ; `None` keeps full
/// double precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceRounding {
    #[default]
    None,
    OneDecimal,
    Integer,
}

impl DistanceRounding {
    pub fn tag(self) -> &'static str {
        match self {
            DistanceRounding::None => "none",
            DistanceRounding::OneDecimal => "one-decimal",
            DistanceRounding::Integer => "integer",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "none" => DistanceRounding::None,
            "one-decimal" => DistanceRounding::OneDecimal,
            "integer" => DistanceRounding::Integer,
            _ => return None,
        })
    }

    fn apply(self, d: f64) -> f64 {
        match self {
            DistanceRounding::None => d,
            DistanceRounding::OneDecimal => (d * 10.0).round() / 10.0,
            DistanceRounding::Integer => d.round(),
        }
    }
}

/// A vehicle type: capacity, fixed cost, routing-cost multiplier and the
/// number of available vehicles (`count == n` encodes an unlimited fleet).
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleType {
    pub capacity: f64,
    pub fixed_cost: f64,
    pub multiplier: f64,
    pub count: usize,
}

/// Raw instance data as produced by the format importers. [`Instance::build`]
/// validates it and precomputes the routing-cost tables.
#[derive(Debug, Clone)]
pub struct InstanceData {
    /// Node coordinates; row 0 is the depot, rows `1..=n` the customers.
    pub coords: Vec<(f64, f64)>,
    /// Nominal demands, length `n + 1`, entry 0 unused.
    pub demand: Vec<f64>,
    pub vehicle_types: Vec<VehicleType>,
    pub variant: Variant,
    /// Per-customer allowed vehicle types as bitmasks (bit `k` set = type `k`
    /// allowed), length `n + 1`. `None` when the data carries no site
    /// information (all types allowed everywhere).
    pub allowed: Option<Vec<u32>>,
    /// Per-type depot coordinates (multi-depot data); `None` otherwise.
    pub depots: Option<Vec<(f64, f64)>>,
    pub rounding: DistanceRounding,
}

/// The immutable problem datum. Construct via [`Instance::build`]; the
/// routing-cost function is materialized per vehicle type at construction.
#[derive(Debug, Clone)]
pub struct Instance {
    data: InstanceData,
    n: usize,
    /// Per-type (n+1)x(n+1) routing-cost tables, row-major.
    cost: Vec<Vec<f64>>,
    /// Sentinel standing in for +inf: larger than any achievable tour cost so
    /// that arithmetic on it stays finite.
    sentinel: f64,
}

impl Instance {
    pub fn build(data: InstanceData) -> Result<Self, InstanceError> {
        let n = data.coords.len().saturating_sub(1);
        if n == 0 {
            return Err(InstanceError::NoCustomers);
        }
        if data.demand.len() != n + 1 {
            return Err(InstanceError::BadDemandCount {
                expected: n + 1,
                got: data.demand.len(),
            });
        }
        if data.vehicle_types.is_empty() {
            return Err(InstanceError::NoVehicleTypes);
        }
        for (i, q) in data.demand.iter().enumerate().skip(1) {
            if *q < 0.0 {
                return Err(InstanceError::NegativeDemand(i));
            }
        }
        let m = data.vehicle_types.len();
        let mut data = data;
        for (k, vt) in data.vehicle_types.iter_mut().enumerate() {
            if vt.capacity <= 0.0 {
                return Err(InstanceError::BadCapacity(k));
            }
            if vt.fixed_cost < 0.0 {
                return Err(InstanceError::NegativeFixedCost(k));
            }
            if vt.count == 0 {
                return Err(InstanceError::ZeroCount(k));
            }
            vt.count = vt.count.min(n);
        }
        if let Some(allowed) = &data.allowed {
            let full: u32 = mask_all(m);
            for (i, &a) in allowed.iter().enumerate().skip(1) {
                if a & full == 0 {
                    return Err(InstanceError::EmptyAllowedSet(i));
                }
            }
        }
        match data.variant {
            Variant::Sdvrp if data.allowed.is_none() => {
                return Err(InstanceError::VariantDataMismatch {
                    variant: Variant::Sdvrp,
                    missing: "per-customer allowed vehicle types",
                });
            }
            Variant::Mdvrp if data.depots.as_ref().map_or(true, |d| d.len() != m) => {
                return Err(InstanceError::VariantDataMismatch {
                    variant: Variant::Mdvrp,
                    missing: "one depot coordinate per vehicle type",
                });
            }
            _ => {}
        }

        let (cost, sentinel) = build_cost_tables(&data, n);
        Ok(Instance {
            data,
            n,
            cost,
            sentinel,
        })
    }

    pub fn customer_count(&self) -> usize {
        self.n
    }

    pub fn type_count(&self) -> usize {
        self.data.vehicle_types.len()
    }

    pub fn vehicle_types(&self) -> &[VehicleType] {
        &self.data.vehicle_types
    }

    pub fn vehicle_type(&self, k: TypeIndex) -> &VehicleType {
        &self.data.vehicle_types[k]
    }

    pub fn variant(&self) -> Variant {
        self.data.variant
    }

    pub fn rounding(&self) -> DistanceRounding {
        self.data.rounding
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.data.coords
    }

    pub fn depots(&self) -> Option<&[(f64, f64)]> {
        self.data.depots.as_deref()
    }

    /// Nominal demand of customer `i`.
    pub fn demand(&self, i: CustomerId) -> f64 {
        self.data.demand[i]
    }

    /// Nominal demand vector, length `n + 1`, entry 0 zero.
    pub fn demands(&self) -> &[f64] {
        &self.data.demand
    }

    /// Whether vehicle type `k` may visit customer `i`.
    pub fn type_allowed(&self, i: CustomerId, k: TypeIndex) -> bool {
        match &self.data.allowed {
            Some(a) => a[i] & (1 << k) != 0,
            None => true,
        }
    }

    pub fn has_site_data(&self) -> bool {
        self.data.allowed.is_some()
    }

    /// Routing cost `c_ijk`. Incompatibilities are encoded by a finite
    /// sentinel; see [`Instance::is_infinite`].
    #[inline]
    pub fn routing_cost(&self, i: usize, j: usize, k: TypeIndex) -> f64 {
        self.cost[k][i * (self.n + 1) + j]
    }

    /// The sentinel standing in for +inf in routing costs.
    pub fn cost_sentinel(&self) -> f64 {
        self.sentinel
    }

    /// True when `c` contains at least one sentinel (incompatible) edge.
    pub fn is_infinite(&self, c: f64) -> bool {
        c >= self.sentinel
    }

    /// `min_k c_ijk`, the type-independent proximity measure used by the
    /// perturbation mechanism and the default penalty weights.
    pub fn min_cost(&self, i: usize, j: usize) -> f64 {
        (0..self.type_count())
            .map(|k| self.routing_cost(i, j, k))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_{(i,j) in V_C x V_C} min_k c_ijk`, ignoring sentinel values.
    /// Falls back to depot edges, then to 1.0, for degenerate instances.
    pub fn max_min_cost(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                let c = self.min_cost(i, j);
                if !self.is_infinite(c) {
                    best = best.max(c);
                }
            }
        }
        if best == 0.0 {
            for j in 1..=self.n {
                let c = self.min_cost(0, j);
                if !self.is_infinite(c) {
                    best = best.max(c);
                }
            }
        }
        if best == 0.0 {
            best = 1.0;
        }
        best
    }

    /// Largest vehicle capacity.
    pub fn max_capacity(&self) -> f64 {
        self.data
            .vehicle_types
            .iter()
            .map(|t| t.capacity)
            .fold(0.0, f64::max)
    }

    /// A copy of the raw data, e.g. for variant transforms or serialization.
    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    /// Scales every vehicle capacity by `factor` (robust experiments inflate
    /// capacities to keep tight benchmarks feasible).
    pub fn inflate_capacities(&self, factor: f64) -> Result<Instance, InstanceError> {
        let mut data = self.data.clone();
        for vt in &mut data.vehicle_types {
            vt.capacity *= factor;
        }
        Instance::build(data)
    }
}

fn mask_all(m: usize) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

fn build_cost_tables(data: &InstanceData, n: usize) -> (Vec<Vec<f64>>, f64) {
    let m = data.vehicle_types.len();
    let dim = n + 1;
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();

    let mut tables = vec![vec![0.0; dim * dim]; m];
    let mut finite_sum = 0.0f64;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut edge_max = 0.0f64;
            for (k, vt) in data.vehicle_types.iter().enumerate() {
                let from = if i == 0 {
                    match &data.depots {
                        Some(d) => d[k],
                        None => data.coords[0],
                    }
                } else {
                    data.coords[i]
                };
                let d = data.rounding.apply(dist(from, data.coords[j]));
                let c = vt.multiplier * d;
                tables[k][i * dim + j] = c;
                tables[k][j * dim + i] = c;
                edge_max = edge_max.max(c);
            }
            finite_sum += edge_max;
        }
    }
    let fixed_sum: f64 = data
        .vehicle_types
        .iter()
        .map(|t| t.fixed_cost)
        .sum::<f64>()
        * n as f64;
    let sentinel = 10.0 * (finite_sum + fixed_sum + 1.0);

    // Site incompatibilities: c_ijk = +inf whenever type k may not visit i or
    // j (the depot is compatible with every type).
    if let Some(allowed) = &data.allowed {
        for k in 0..m {
            for i in 0..dim {
                for j in 0..dim {
                    if i == j {
                        continue;
                    }
                    let i_bad = i > 0 && allowed[i] & (1 << k) == 0;
                    let j_bad = j > 0 && allowed[j] & (1 << k) == 0;
                    if i_bad || j_bad {
                        tables[k][i * dim + j] = sentinel;
                    }
                }
            }
        }
    }
    (tables, sentinel)
}

/// Transforms raw benchmark data into the requested variant.
///
/// The transforms zero fixed costs (HVRPD, FSMD, SDVRP, MDVRP), saturate
/// fleet counts (FSM variants, MDVRP), flatten routing costs to plain
/// Euclidean distances (FSMF, and vehicle-independent distances for SDVRP/
/// MDVRP) and keep everything else intact.
pub fn apply_variant(base: &Instance, variant: Variant) -> Result<Instance, InstanceError> {
    let mut data = base.data().clone();
    let n = base.customer_count();
    match variant {
        Variant::Cvrp => {
            if data.vehicle_types.len() != 1 {
                return Err(InstanceError::VariantDataMismatch {
                    variant,
                    missing: "a single vehicle type",
                });
            }
            data.vehicle_types[0].fixed_cost = 0.0;
            data.vehicle_types[0].multiplier = 1.0;
        }
        Variant::HvrpFd => {}
        Variant::HvrpD => {
            for vt in &mut data.vehicle_types {
                vt.fixed_cost = 0.0;
            }
        }
        Variant::FsmFd => {
            for vt in &mut data.vehicle_types {
                vt.count = n;
            }
        }
        Variant::FsmD => {
            for vt in &mut data.vehicle_types {
                vt.fixed_cost = 0.0;
                vt.count = n;
            }
        }
        Variant::FsmF => {
            for vt in &mut data.vehicle_types {
                vt.count = n;
                vt.multiplier = 1.0;
            }
        }
        Variant::Sdvrp => {
            if data.allowed.is_none() {
                return Err(InstanceError::VariantDataMismatch {
                    variant,
                    missing: "per-customer allowed vehicle types",
                });
            }
            for vt in &mut data.vehicle_types {
                vt.fixed_cost = 0.0;
                vt.multiplier = 1.0;
            }
        }
        Variant::Mdvrp => {
            if data
                .depots
                .as_ref()
                .map_or(true, |d| d.len() != data.vehicle_types.len())
            {
                return Err(InstanceError::VariantDataMismatch {
                    variant,
                    missing: "one depot coordinate per vehicle type",
                });
            }
            for vt in &mut data.vehicle_types {
                vt.fixed_cost = 0.0;
                vt.multiplier = 1.0;
                vt.count = n;
            }
        }
    }
    data.variant = variant;
    Instance::build(data)
}

/// An ordered customer sequence served by one vehicle. The depot endpoints
/// are implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub customers: Vec<CustomerId>,
    pub vtype: TypeIndex,
}

impl Route {
    pub fn new(customers: Vec<CustomerId>, vtype: TypeIndex) -> Self {
        Route { customers, vtype }
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.customers.len()
    }
}

/// Transportation cost of a route: fixed cost plus edge costs over the closed
/// cycle including both depot legs. An empty route costs its fixed cost.
pub fn route_cost(route: &Route, instance: &Instance) -> Result<f64, InstanceError> {
    let n = instance.customer_count();
    if route.vtype >= instance.type_count() {
        return Err(InstanceError::InvalidType(route.vtype));
    }
    for &c in &route.customers {
        if c == 0 || c > n {
            return Err(InstanceError::InvalidCustomer(c));
        }
    }
    let k = route.vtype;
    let mut cost = instance.vehicle_type(k).fixed_cost;
    let mut prev = 0usize;
    for &c in &route.customers {
        cost += instance.routing_cost(prev, c, k);
        prev = c;
    }
    if prev != 0 {
        cost += instance.routing_cost(prev, 0, k);
    }
    Ok(cost)
}

/// A set of routes with a fleet composition, plus cached cost and violation
/// aggregates. Empty routes are stripped at construction.
#[derive(Debug, Clone)]
pub struct Solution {
    routes: Vec<Route>,
    cost: f64,
    cap_violation: f64,
    site_violation: f64,
}

impl Solution {
    /// Builds a solution from routes, dropping empty ones, and computes the
    /// cached aggregates from scratch.
    pub fn new(
        routes: Vec<Route>,
        instance: &Instance,
        set: &UncertaintySet,
    ) -> Result<Self, InstanceError> {
        let routes: Vec<Route> = routes.into_iter().filter(|r| !r.is_empty()).collect();
        let mut cost = 0.0;
        let mut cap = 0.0;
        let mut site = 0.0;
        for r in &routes {
            cost += route_cost(r, instance)?;
            let wc = set
                .worst_case_load(&r.customers)
                .map_err(|_| InstanceError::InvalidCustomer(0))?;
            cap += (wc - instance.vehicle_type(r.vtype).capacity).max(0.0);
            site += r
                .customers
                .iter()
                .filter(|&&i| !instance.type_allowed(i, r.vtype))
                .count() as f64;
        }
        Ok(Solution {
            routes,
            cost,
            cap_violation: cap,
            site_violation: site,
        })
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    /// Cached transportation cost (fixed plus routing).
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Cached total worst-case capacity violation.
    pub fn capacity_violation(&self) -> f64 {
        self.cap_violation
    }

    /// Cached site-violation count (SDVRP; zero elsewhere).
    pub fn site_violation(&self) -> f64 {
        self.site_violation
    }
}

/// Sum of the costs of the individual routes.
pub fn solution_cost(sol: &Solution, instance: &Instance) -> Result<f64, InstanceError> {
    let mut total = 0.0;
    for r in sol.routes() {
        total += route_cost(r, instance)?;
    }
    Ok(total)
}

/// Per-route capacity report entry.
#[derive(Debug, Clone)]
pub struct RouteCapacity {
    pub worst_case_load: f64,
    pub capacity: f64,
    pub ok: bool,
    /// `worst_case_load - capacity` when violated, else the unused headroom
    /// as a non-positive number... positive means violation.
    pub slack: f64,
}

/// Feasibility report: partition (C1), fleet availability (C2), worst-case
/// capacity per route (C3r) and site compatibility per route (SDVRP).
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub partition_ok: bool,
    pub fleet_ok: bool,
    pub capacity: Vec<RouteCapacity>,
    pub site_ok: Vec<bool>,
}

impl FeasibilityReport {
    pub fn capacity_ok(&self) -> bool {
        self.capacity.iter().all(|c| c.ok)
    }

    pub fn site_all_ok(&self) -> bool {
        self.site_ok.iter().all(|&s| s)
    }

    pub fn is_feasible(&self) -> bool {
        self.partition_ok && self.fleet_ok && self.capacity_ok() && self.site_all_ok()
    }
}

/// Checks conditions C1 (each customer visited exactly once), C2 (fleet
/// availability) and C3r (capacity under the worst-case demand realization),
/// plus site compatibility for SDVRP. Infeasibility is reported, not an
/// error.
pub fn validate(sol: &Solution, instance: &Instance, set: &UncertaintySet) -> FeasibilityReport {
    let n = instance.customer_count();
    let mut visits = vec![0usize; n + 1];
    let mut ids_ok = true;
    for r in sol.routes() {
        for &c in &r.customers {
            if c == 0 || c > n {
                ids_ok = false;
            } else {
                visits[c] += 1;
            }
        }
    }
    let partition_ok = ids_ok && visits[1..].iter().all(|&v| v == 1);

    let mut used = vec![0usize; instance.type_count()];
    let mut types_ok = true;
    for r in sol.routes() {
        if r.vtype < instance.type_count() {
            used[r.vtype] += 1;
        } else {
            types_ok = false;
        }
    }
    let fleet_ok = types_ok
        && used
            .iter()
            .enumerate()
            .all(|(k, &u)| u <= instance.vehicle_type(k).count);

    let mut capacity = Vec::with_capacity(sol.routes().len());
    let mut site_ok = Vec::with_capacity(sol.routes().len());
    for r in sol.routes() {
        let wc = set.worst_case_load(&r.customers).unwrap_or(f64::INFINITY);
        let q = instance.vehicle_type(r.vtype.min(instance.type_count() - 1)).capacity;
        capacity.push(RouteCapacity {
            worst_case_load: wc,
            capacity: q,
            ok: wc <= q + CAPACITY_EPS * q,
            slack: wc - q,
        });
        site_ok.push(
            r.customers
                .iter()
                .all(|&i| instance.type_allowed(i, r.vtype)),
        );
    }
    FeasibilityReport {
        partition_ok,
        fleet_ok,
        capacity,
        site_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uncertainty::UncertaintySet;

    fn two_customer_instance() -> Instance {
        Instance::build(InstanceData {
            coords: vec![(0.0, 0.0), (3.0, 4.0), (6.0, 8.0)],
            demand: vec![0.0, 2.0, 3.0],
            vehicle_types: vec![VehicleType {
                capacity: 10.0,
                fixed_cost: 100.0,
                multiplier: 1.0,
                count: 2,
            }],
            variant: Variant::HvrpFd,
            allowed: None,
            depots: None,
            rounding: DistanceRounding::None,
        })
        .unwrap()
    }

    #[test]
    fn single_customer_out_and_back() {
        let inst = two_customer_instance();
        let r = Route::new(vec![1], 0);
        let c = route_cost(&r, &inst).unwrap();
        assert!((c - 110.0).abs() < 1e-12, "got {c}");
    }

    #[test]
    fn empty_route_costs_fixed_cost_only() {
        let inst = two_customer_instance();
        let r = Route::new(vec![], 0);
        assert_eq!(route_cost(&r, &inst).unwrap(), 100.0);
    }

    #[test]
    fn invalid_customer_id_is_an_error() {
        let inst = two_customer_instance();
        let r = Route::new(vec![7], 0);
        assert!(route_cost(&r, &inst).is_err());
    }

    #[test]
    fn route_cost_invariant_under_reversal() {
        let inst = two_customer_instance();
        let a = route_cost(&Route::new(vec![1, 2], 0), &inst).unwrap();
        let b = route_cost(&Route::new(vec![2, 1], 0), &inst).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sdvrp_incompatible_route_is_infinite() {
        let inst = Instance::build(InstanceData {
            coords: vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
            demand: vec![0.0, 1.0, 1.0],
            vehicle_types: vec![
                VehicleType {
                    capacity: 10.0,
                    fixed_cost: 0.0,
                    multiplier: 1.0,
                    count: 2,
                },
                VehicleType {
                    capacity: 10.0,
                    fixed_cost: 0.0,
                    multiplier: 1.0,
                    count: 2,
                },
            ],
            variant: Variant::Sdvrp,
            allowed: Some(vec![0, 0b01, 0b11]),
            depots: None,
            rounding: DistanceRounding::None,
        })
        .unwrap();
        // Customer 1 only allows type 0; a type-1 route through it is infinite.
        let c = route_cost(&Route::new(vec![1], 1), &inst).unwrap();
        assert!(inst.is_infinite(c));
        let ok = route_cost(&Route::new(vec![1], 0), &inst).unwrap();
        assert!(!inst.is_infinite(ok));
    }

    #[test]
    fn solution_cost_is_additive_and_empty_is_zero() {
        let inst = two_customer_instance();
        let set = UncertaintySet::singleton(inst.demands().to_vec());
        let empty = Solution::new(vec![], &inst, &set).unwrap();
        assert_eq!(solution_cost(&empty, &inst).unwrap(), 0.0);
        let sol = Solution::new(
            vec![Route::new(vec![1], 0), Route::new(vec![2], 0)],
            &inst,
            &set,
        )
        .unwrap();
        let direct = solution_cost(&sol, &inst).unwrap();
        let sum = route_cost(&sol.routes()[0], &inst).unwrap()
            + route_cost(&sol.routes()[1], &inst).unwrap();
        assert!((direct - sum).abs() < 1e-12);
    }

    #[test]
    fn validate_counts_duplicate_visits() {
        let inst = two_customer_instance();
        let set = UncertaintySet::singleton(inst.demands().to_vec());
        let sol = Solution::new(
            vec![Route::new(vec![1, 2], 0), Route::new(vec![1], 0)],
            &inst,
            &set,
        )
        .unwrap();
        let rep = validate(&sol, &inst, &set);
        assert!(!rep.partition_ok);
    }

    #[test]
    fn boundary_load_is_feasible_under_singleton_set() {
        let inst = Instance::build(InstanceData {
            coords: vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
            demand: vec![0.0, 4.0, 6.0],
            vehicle_types: vec![VehicleType {
                capacity: 10.0,
                fixed_cost: 0.0,
                multiplier: 1.0,
                count: 1,
            }],
            variant: Variant::Cvrp,
            allowed: None,
            depots: None,
            rounding: DistanceRounding::None,
        })
        .unwrap();
        let set = UncertaintySet::singleton(inst.demands().to_vec());
        let sol = Solution::new(vec![Route::new(vec![1, 2], 0)], &inst, &set).unwrap();
        let rep = validate(&sol, &inst, &set);
        assert!(rep.capacity_ok());
        assert!(rep.is_feasible());
    }

    #[test]
    fn fleet_overuse_is_reported() {
        let inst = two_customer_instance();
        let mut data = inst.data().clone();
        data.vehicle_types[0].count = 1;
        let inst = Instance::build(data).unwrap();
        let set = UncertaintySet::singleton(inst.demands().to_vec());
        let sol = Solution::new(
            vec![Route::new(vec![1], 0), Route::new(vec![2], 0)],
            &inst,
            &set,
        )
        .unwrap();
        let rep = validate(&sol, &inst, &set);
        assert!(!rep.fleet_ok);
        assert!(rep.partition_ok);
    }

    #[test]
    fn variant_transforms_zero_and_saturate() {
        let base = Instance::build(InstanceData {
            coords: vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
            demand: vec![0.0, 1.0, 2.0],
            vehicle_types: vec![
                VehicleType {
                    capacity: 10.0,
                    fixed_cost: 5.0,
                    multiplier: 1.0,
                    count: 1,
                },
                VehicleType {
                    capacity: 20.0,
                    fixed_cost: 9.0,
                    multiplier: 1.5,
                    count: 1,
                },
            ],
            variant: Variant::HvrpFd,
            allowed: None,
            depots: None,
            rounding: DistanceRounding::None,
        })
        .unwrap();

        let hd = apply_variant(&base, Variant::HvrpD).unwrap();
        assert!(hd.vehicle_types().iter().all(|t| t.fixed_cost == 0.0));
        assert_eq!(hd.vehicle_type(1).multiplier, 1.5);
        assert_eq!(hd.vehicle_type(0).count, 1);

        let fsmfd = apply_variant(&base, Variant::FsmFd).unwrap();
        assert!(fsmfd.vehicle_types().iter().all(|t| t.count == 2));
        assert_eq!(fsmfd.vehicle_type(1).fixed_cost, 9.0);

        let fsmf = apply_variant(&base, Variant::FsmF).unwrap();
        assert!(fsmf.vehicle_types().iter().all(|t| t.multiplier == 1.0));
        assert_eq!(fsmf.vehicle_type(0).fixed_cost, 5.0);

        // Idempotence for zero/saturate transforms.
        let twice = apply_variant(&hd, Variant::HvrpD).unwrap();
        assert_eq!(twice.vehicle_types(), hd.vehicle_types());
    }

    #[test]
    fn mdvrp_uses_type_indexed_depot_legs() {
        let base = Instance::build(InstanceData {
            coords: vec![(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)],
            demand: vec![0.0, 1.0, 1.0],
            vehicle_types: vec![
                VehicleType {
                    capacity: 5.0,
                    fixed_cost: 0.0,
                    multiplier: 1.0,
                    count: 2,
                },
                VehicleType {
                    capacity: 5.0,
                    fixed_cost: 0.0,
                    multiplier: 1.0,
                    count: 2,
                },
            ],
            variant: Variant::HvrpFd,
            allowed: None,
            depots: Some(vec![(0.0, 0.0), (5.0, 5.0)]),
            rounding: DistanceRounding::None,
        })
        .unwrap();
        let md = apply_variant(&base, Variant::Mdvrp).unwrap();
        // Depot legs are indexed by vehicle type: depot 0 at the origin,
        // depot 1 at (5, 5).
        assert!((md.routing_cost(0, 1, 0) - 10.0).abs() < 1e-12);
        assert!((md.routing_cost(0, 1, 1) - 50.0f64.sqrt()).abs() < 1e-12);
        assert!((md.routing_cost(0, 2, 0) - 10.0).abs() < 1e-12);
        assert!((md.routing_cost(0, 2, 1) - 50.0f64.sqrt()).abs() < 1e-12);
        // Customer-customer legs are type-independent.
        assert_eq!(md.routing_cost(1, 2, 0), md.routing_cost(1, 2, 1));
    }
}
