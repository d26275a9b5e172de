//! Structural diagnostics on choice tables.
//!
//! * regularity: `P(x, S) ≥ P(x, S')` whenever `S ⊂ S'`;
//! * demand monotonicity: total purchase probability never drops when the
//!   offer set grows (every GSP model satisfies it);
//! * random-attention representability through the precedence relation `≺`;
//! * exact GSP membership via a linear feasibility problem, with a Farkas
//!   certificate when the table is not a GSP.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::choice::{enumerate_types, AltId, Assortment, ConsumerType, NO_CHOICE};
use crate::error::{Error, Result};
use crate::model::GspModel;
use crate::scalar::Scalar;
use crate::solver::{
    dot, solve_feasibility, DenseMatrix, FeasibilityStatus, LinearFeasibilityProblem, SolverConfig,
};
use crate::table::ChoiceTable;

/// Absolute tolerance for "strictly larger" comparisons between table entries.
pub const STRICT_TOL: f64 = 1e-9;
/// Largest universe for exact membership.
pub const DEFAULT_MEMBERSHIP_CAP: usize = 5;
/// A membership witness must reproduce every entry within this bound.
pub const WITNESS_TOL: f64 = 1e-7;
/// Step budget for enumerating cycles of the precedence relation.
pub const CYCLE_SEARCH_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityViolation<T> {
    pub alternative: AltId,
    pub smaller_set: Assortment,
    pub larger_set: Assortment,
    pub p_small: T,
    pub p_large: T,
}

/// Every `(x, S, S')` with `S ⊂ S'` among the table's rows and
/// `P(x, S') > P(x, S) + tol`.
pub fn check_regularity<T: Scalar>(table: &ChoiceTable<T>) -> Vec<RegularityViolation<T>> {
    check_regularity_with(table, T::lit(STRICT_TOL))
}

pub fn check_regularity_with<T: Scalar>(
    table: &ChoiceTable<T>,
    tol: T,
) -> Vec<RegularityViolation<T>> {
    let mut out = Vec::new();
    for small in table.rows() {
        for large in table.rows() {
            if !small.assortment().is_proper_subset_of(large.assortment()) {
                continue;
            }
            for &x in small.assortment().members() {
                let (p_small, p_large) = (small.prob(x), large.prob(x));
                if p_large > p_small + tol {
                    out.push(RegularityViolation {
                        alternative: x,
                        smaller_set: small.assortment().clone(),
                        larger_set: large.assortment().clone(),
                        p_small,
                        p_large,
                    });
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityViolation<T> {
    pub smaller_set: Assortment,
    pub larger_set: Assortment,
    pub mass_small: T,
    pub mass_large: T,
}

/// Pairs `S ⊂ S'` with `Σ_{i∈S} P(i,S) > Σ_{i∈S'} P(i,S') + tol`.
pub fn check_demand_monotonicity<T: Scalar>(
    table: &ChoiceTable<T>,
) -> Vec<MonotonicityViolation<T>> {
    check_demand_monotonicity_with(table, T::lit(STRICT_TOL))
}

pub fn check_demand_monotonicity_with<T: Scalar>(
    table: &ChoiceTable<T>,
    tol: T,
) -> Vec<MonotonicityViolation<T>> {
    let mut out = Vec::new();
    for small in table.rows() {
        let mass_small = small.purchase_mass();
        for large in table.rows() {
            if !small.assortment().is_proper_subset_of(large.assortment()) {
                continue;
            }
            let mass_large = large.purchase_mass();
            if mass_small > mass_large + tol {
                out.push(MonotonicityViolation {
                    smaller_set: small.assortment().clone(),
                    larger_set: large.assortment().clone(),
                    mass_small,
                    mass_large,
                });
            }
        }
    }
    out
}

/// The relation `x ≺ y`: removing `y` from some `S ∋ x, y` strictly lowers
/// the probability of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PrecedenceRelation {
    /// Edge `(x, y)` with the first witness `S` found in table order.
    pub edges: BTreeMap<(AltId, AltId), Assortment>,
    /// Rows `S ∖ {y}` that were needed but absent from the table.
    pub missing_rows: Vec<Assortment>,
}

impl PrecedenceRelation {
    pub fn contains(&self, x: AltId, y: AltId) -> bool {
        self.edges.contains_key(&(x, y))
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn adjacency(&self) -> BTreeMap<AltId, Vec<AltId>> {
        let mut adjacency: BTreeMap<AltId, Vec<AltId>> = BTreeMap::new();
        for &(x, y) in self.edges.keys() {
            adjacency.entry(x).or_default().push(y);
        }
        adjacency
    }

    /// Elementary cycles, each rotated to start at its smallest element, in
    /// discovery order (smallest start first, neighbours ascending). The
    /// boolean is true when `max_steps` cut the search short.
    pub fn elementary_cycles(&self, max_steps: usize) -> (Vec<Vec<AltId>>, bool) {
        let adjacency = self.adjacency();
        let mut cycles = Vec::new();
        let mut steps = 0usize;
        for &start in adjacency.keys() {
            let mut path = vec![start];
            // stack of (vertex, index of the next neighbour to try)
            let mut stack = vec![(start, 0usize)];
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                steps += 1;
                if steps > max_steps {
                    return (cycles, true);
                }
                let neighbours = adjacency.get(&u).map(Vec::as_slice).unwrap_or(&[]);
                if let Some(&v) = neighbours.get(*next) {
                    *next += 1;
                    if v == start {
                        cycles.push(path.clone());
                    } else if v > start && !path.contains(&v) {
                        path.push(v);
                        stack.push((v, 0));
                    }
                } else {
                    stack.pop();
                    path.pop();
                }
            }
        }
        (cycles, false)
    }

    /// Shortest cycle (ties broken lexicographically), rotated to start at its
    /// smallest element.
    pub fn shortest_cycle(&self) -> Option<Vec<AltId>> {
        let adjacency = self.adjacency();
        let mut best: Option<Vec<AltId>> = None;
        for &start in adjacency.keys() {
            // BFS restricted to vertices above start so each cycle is found
            // from its minimum element
            let mut parent: HashMap<AltId, AltId> = HashMap::new();
            let mut queue = VecDeque::from([start]);
            let mut found: Option<AltId> = None;
            'bfs: while let Some(u) = queue.pop_front() {
                for &v in adjacency.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                    if v == start {
                        found = Some(u);
                        break 'bfs;
                    }
                    if v > start && !parent.contains_key(&v) {
                        parent.insert(v, u);
                        queue.push_back(v);
                    }
                }
            }
            if let Some(mut u) = found {
                let mut path = vec![u];
                while u != start {
                    u = parent[&u];
                    path.push(u);
                }
                path.reverse();
                if best
                    .as_ref()
                    .is_none_or(|b| (path.len(), &path) < (b.len(), b))
                {
                    best = Some(path);
                }
            }
        }
        best
    }

    /// The witness cycle reported by [`ram_membership`]: the longest
    /// elementary cycle (it involves the most alternatives), ties broken
    /// lexicographically. Falls back to the shortest cycle when the
    /// enumeration budget runs out.
    pub fn find_cycle(&self) -> Option<Vec<AltId>> {
        let (cycles, truncated) = self.elementary_cycles(CYCLE_SEARCH_STEPS);
        let longest = cycles
            .into_iter()
            .min_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        match longest {
            Some(c) if !truncated => Some(c),
            other => other.or_else(|| self.shortest_cycle()),
        }
    }
}

/// Computes `≺` from the rows available in the table.
pub fn ram_relation<T: Scalar>(table: &ChoiceTable<T>) -> PrecedenceRelation {
    let tol = T::lit(STRICT_TOL);
    let mut relation = PrecedenceRelation::default();
    for row in table.rows() {
        let offer = row.assortment();
        if offer.len() < 2 {
            continue;
        }
        for &y in offer.members() {
            let reduced = offer.without(y);
            let Some(smaller) = table.row(&reduced) else {
                if !relation.missing_rows.contains(&reduced) {
                    relation.missing_rows.push(reduced);
                }
                continue;
            };
            for &x in offer.members() {
                if x != y && smaller.prob(x) + tol < row.prob(x) {
                    relation
                        .edges
                        .entry((x, y))
                        .or_insert_with(|| offer.clone());
                }
            }
        }
    }
    relation
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RamVerdict {
    /// `≺` is acyclic on a complete table.
    Representable,
    NotRepresentable {
        cycle: Vec<AltId>,
    },
    /// The table lacks rows, so acyclicity cannot decide representability.
    Undetermined {
        missing: Vec<Assortment>,
    },
}

impl RamVerdict {
    pub fn is_ram(&self) -> Option<bool> {
        match self {
            RamVerdict::Representable => Some(true),
            RamVerdict::NotRepresentable { .. } => Some(false),
            RamVerdict::Undetermined { .. } => None,
        }
    }

    pub fn cycle(&self) -> Option<&[AltId]> {
        match self {
            RamVerdict::NotRepresentable { cycle } => Some(cycle),
            _ => None,
        }
    }
}

/// Random-attention representability: a complete table is representable iff
/// `≺` has no cycle.
pub fn ram_membership<T: Scalar>(table: &ChoiceTable<T>) -> RamVerdict {
    if !table.is_complete() {
        return RamVerdict::Undetermined {
            missing: table.missing_assortments().unwrap_or_default(),
        };
    }
    match ram_relation(table).find_cycle() {
        Some(cycle) => RamVerdict::NotRepresentable { cycle },
        None => RamVerdict::Representable,
    }
}

/// Label of one equality in the membership system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintLabel {
    /// `Σ_j λ_j [type j picks alternative from assortment] = P(alternative, assortment)`.
    Choice {
        alternative: AltId,
        assortment: Assortment,
    },
    /// `Σ_j λ_j = 1`.
    TotalMass,
}

impl std::fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintLabel::Choice {
                alternative,
                assortment,
            } => write!(f, "P({alternative},{assortment})"),
            ConstraintLabel::TotalMass => f.write_str("total mass"),
        }
    }
}

/// Proof that no GSP model reproduces a table.
#[derive(Clone, Debug, PartialEq)]
pub struct GspCertificate<T> {
    pub labels: Vec<ConstraintLabel>,
    /// Multiplier per constraint, aligned with `labels`.
    pub multipliers: Vec<T>,
    /// `bᵀy`, strictly negative.
    pub rhs_value: T,
    /// `min_j (Aᵀy)_j` over the behaviour classes, non-negative up to `1e-9`.
    pub min_column_value: T,
    pub derivation: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MembershipVerdict<T> {
    InGsp { model: GspModel<T>, max_error: T },
    NotInGsp(GspCertificate<T>),
    Unknown(String),
}

impl<T> MembershipVerdict<T> {
    pub fn label(&self) -> &'static str {
        match self {
            MembershipVerdict::InGsp { .. } => "InGSP",
            MembershipVerdict::NotInGsp(_) => "NotInGSP",
            MembershipVerdict::Unknown(_) => "Unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MembershipConfig {
    pub universe_cap: usize,
    pub solver: SolverConfig,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        Self {
            universe_cap: DEFAULT_MEMBERSHIP_CAP,
            solver: SolverConfig::default(),
        }
    }
}

/// The exact-fit system for a complete table: one equality per `(x, S)` with
/// `x ∈ S ∪ {0}`, plus total mass; one column per behaviour class of types.
pub struct MembershipSystem<T> {
    pub problem: LinearFeasibilityProblem<T>,
    pub labels: Vec<ConstraintLabel>,
    /// Representative type of each column (first in enumeration order).
    pub types: Vec<ConsumerType>,
}

pub fn membership_system<T: Scalar>(
    table: &ChoiceTable<T>,
    universe_size: usize,
) -> Result<MembershipSystem<T>> {
    let mut labels = Vec::new();
    let mut rhs = Vec::new();
    for row in table.rows() {
        for (x, p) in row.entries() {
            labels.push(ConstraintLabel::Choice {
                alternative: x,
                assortment: row.assortment().clone(),
            });
            rhs.push(p);
        }
    }
    labels.push(ConstraintLabel::TotalMass);
    rhs.push(T::one());

    let mut seen: HashMap<Vec<AltId>, ()> = HashMap::new();
    let mut types = Vec::new();
    let mut columns: Vec<Vec<T>> = Vec::new();
    for ty in enumerate_types(universe_size, None)? {
        let behaviour: Vec<AltId> = table
            .rows()
            .iter()
            .map(|r| ty.choose(r.assortment()))
            .collect();
        if seen.insert(behaviour.clone(), ()).is_some() {
            continue;
        }
        let mut col = Vec::with_capacity(rhs.len());
        for (row, &pick) in table.rows().iter().zip(&behaviour) {
            for &x in row.assortment().members() {
                col.push(if pick == x { T::one() } else { T::zero() });
            }
            col.push(if pick == NO_CHOICE {
                T::one()
            } else {
                T::zero()
            });
        }
        col.push(T::one());
        columns.push(col);
        types.push(ty);
    }
    let matrix = DenseMatrix::from_columns(rhs.len(), &columns)?;
    Ok(MembershipSystem {
        problem: LinearFeasibilityProblem::new(matrix, rhs)?,
        labels,
        types,
    })
}

/// Decides whether a complete table is reproduced exactly by some GSP model.
pub fn gsp_membership<T: Scalar>(
    table: &ChoiceTable<T>,
    universe_size: usize,
) -> MembershipVerdict<T> {
    gsp_membership_with(table, universe_size, &MembershipConfig::default())
}

pub fn gsp_membership_with<T: Scalar>(
    table: &ChoiceTable<T>,
    universe_size: usize,
    config: &MembershipConfig,
) -> MembershipVerdict<T> {
    if universe_size != table.universe_size() {
        return MembershipVerdict::Unknown(format!(
            "table universe {} differs from requested universe {universe_size}",
            table.universe_size()
        ));
    }
    if universe_size > config.universe_cap {
        return MembershipVerdict::Unknown("universe too large for exact membership".into());
    }
    if !table.is_complete() {
        return MembershipVerdict::Unknown(
            "undetermined: membership requires every non-empty assortment".into(),
        );
    }
    match decide(table, universe_size, config) {
        Ok(v) => v,
        Err(e) => MembershipVerdict::Unknown(e.to_string()),
    }
}

fn decide<T: Scalar>(
    table: &ChoiceTable<T>,
    universe_size: usize,
    config: &MembershipConfig,
) -> Result<MembershipVerdict<T>> {
    let system = membership_system(table, universe_size)?;
    let result = solve_feasibility(&system.problem, &config.solver)?;
    match result.status {
        FeasibilityStatus::Feasible => {
            let x = result.solution.expect("feasible result carries a solution");
            let atoms = system
                .types
                .iter()
                .zip(&x)
                .filter(|(_, &w)| w > T::zero())
                .map(|(t, &w)| (t.clone(), w));
            let model = GspModel::new(universe_size, atoms)?;
            let rebuilt = model.choice_table(
                &table
                    .rows()
                    .iter()
                    .map(|r| r.assortment().clone())
                    .collect::<Vec<_>>(),
            )?;
            let max_error = rebuilt
                .max_abs_diff(table)
                .ok_or_else(|| Error::Numerical("witness table has different rows".into()))?;
            if max_error > T::lit(WITNESS_TOL) {
                return Err(Error::Numerical(format!(
                    "witness model misses the table by {max_error}"
                )));
            }
            Ok(MembershipVerdict::InGsp { model, max_error })
        }
        FeasibilityStatus::Infeasible => {
            let y = result
                .certificate
                .expect("infeasible result carries a certificate");
            let a = system.problem.matrix();
            let min_column_value = (0..a.ncols())
                .map(|j| dot(a.col(j), &y))
                .fold(T::infinity(), T::min);
            let rhs_value = dot(system.problem.rhs(), &y);
            let derivation = describe_certificate(&system.labels, &y, rhs_value, min_column_value);
            Ok(MembershipVerdict::NotInGsp(GspCertificate {
                labels: system.labels,
                multipliers: y,
                rhs_value,
                min_column_value,
                derivation,
            }))
        }
    }
}

fn describe_certificate<T: Scalar>(
    labels: &[ConstraintLabel],
    y: &[T],
    rhs_value: T,
    min_column_value: T,
) -> String {
    let mut text = String::from("Multiply each constraint by its weight and add them up:\n");
    for (label, &w) in labels.iter().zip(y) {
        if w.abs() > T::lit(1e-12) {
            let _ = writeln!(text, "  {:>+.6} x [{label}]", w.as_f64());
        }
    }
    let _ = writeln!(
        text,
        "Every consumer type receives a combined coefficient of at least {:.3e} (>= 0),",
        min_column_value.as_f64()
    );
    let _ = writeln!(
        text,
        "so any distribution over types yields a non-negative total, but the table's \
         right-hand sides total {:.6} < 0. No GSP model reproduces this table.",
        rhs_value.as_f64()
    );
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::ChoiceRow;

    fn s(ids: &[AltId]) -> Assortment {
        Assortment::new(ids.iter().copied()).unwrap()
    }

    fn t(seq: &[AltId], pos: usize) -> ConsumerType {
        ConsumerType::new(seq.to_vec(), pos).unwrap()
    }

    fn row(ids: &[AltId], probs: &[f64]) -> ChoiceRow<f64> {
        ChoiceRow::from_member_probs(s(ids), probs.to_vec()).unwrap()
    }

    fn counterexample() -> ChoiceTable<f64> {
        ChoiceTable::new(
            3,
            vec![
                row(&[1], &[1.0]),
                row(&[2], &[1.0]),
                row(&[3], &[1.0]),
                row(&[1, 2], &[1.0, 0.0]),
                row(&[1, 3], &[0.0, 1.0]),
                row(&[2, 3], &[1.0, 0.0]),
                row(&[1, 2, 3], &[1.0, 0.0, 0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn camera_regularity_violation() {
        let m = GspModel::new(
            3,
            [
                (t(&[1, 3, 2], 1), 0.22),
                (t(&[2, 3, 1], 1), 0.29),
                (t(&[3, 2, 1], 1), 0.21),
                (t(&[3, 2, 1], 2), 0.28),
            ],
        )
        .unwrap();
        let table = m.choice_table(&[s(&[1, 2]), s(&[1, 2, 3])]).unwrap();
        let v = check_regularity(&table);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].alternative, 2);
        assert!((v[0].p_small - 0.50_f64).abs() < 1e-12 && (v[0].p_large - 0.57_f64).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_violation_is_reported() {
        let table = ChoiceTable::new(
            3,
            vec![row(&[1, 2], &[0.5, 0.4]), row(&[1, 2, 3], &[0.3, 0.3, 0.2])],
        )
        .unwrap();
        let v = check_demand_monotonicity(&table);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].smaller_set, s(&[1, 2]));
        assert!(check_demand_monotonicity(&counterexample()).is_empty());
    }

    #[test]
    fn counterexample_relation() {
        let rel = ram_relation(&counterexample());
        assert!(rel.edges.keys().all(|&(x, _)| x == 1));
        assert!(!rel.is_empty());
        assert!(rel.missing_rows.is_empty());
        assert_eq!(ram_membership(&counterexample()), RamVerdict::Representable);
    }

    #[test]
    fn cycle_detection() {
        let mut rel = PrecedenceRelation::default();
        for (x, y) in [(1, 2), (2, 3), (3, 1), (2, 4), (4, 2)] {
            rel.edges.insert((x, y), s(&[x, y]));
        }
        assert_eq!(rel.find_cycle(), Some(vec![1, 2, 3]));
        assert_eq!(rel.shortest_cycle(), Some(vec![2, 4]));
        let (all, truncated) = rel.elementary_cycles(1000);
        assert_eq!((all, truncated), (vec![vec![1, 2, 3], vec![2, 4]], false));
        rel.edges.remove(&(4, 2));
        assert_eq!(rel.find_cycle(), Some(vec![1, 2, 3]));
        rel.edges.remove(&(3, 1));
        assert_eq!(rel.find_cycle(), None);
    }

    #[test]
    fn partial_tables_are_undetermined() {
        let table = ChoiceTable::new(3, vec![row(&[1, 2], &[0.5, 0.5])]).unwrap();
        assert!(matches!(
            ram_membership(&table),
            RamVerdict::Undetermined { .. }
        ));
        assert!(matches!(
            gsp_membership(&table, 3),
            MembershipVerdict::Unknown(_)
        ));
        let rel = ram_relation(&table);
        assert_eq!(rel.missing_rows, vec![s(&[2]), s(&[1])]);
    }

    #[test]
    fn counterexample_is_not_gsp() {
        match gsp_membership(&counterexample(), 3) {
            MembershipVerdict::NotInGsp(cert) => {
                assert!(cert.rhs_value < -1e-7);
                assert!(cert.min_column_value >= -1e-9);
                assert_eq!(cert.labels.len(), cert.multipliers.len());
            }
            other => panic!("expected NotInGsp, got {}", other.label()),
        }
    }

    #[test]
    fn generated_table_is_gsp() {
        let m = GspModel::new(
            3,
            [
                (t(&[2, 1, 3], 2), 0.4),
                (t(&[3], 1), 0.35),
                (t(&[1, 2], 0), 0.25),
            ],
        )
        .unwrap();
        let table = m.full_table().unwrap();
        match gsp_membership(&table, 3) {
            MembershipVerdict::InGsp { model, max_error } => {
                assert!(max_error <= 1e-7);
                assert!(model.full_table().unwrap().max_abs_diff(&table).unwrap() <= 1e-7);
            }
            other => panic!("expected InGsp, got {}", other.label()),
        }
    }

    #[test]
    fn universe_cap() {
        let cfg = MembershipConfig {
            universe_cap: 2,
            ..MembershipConfig::default()
        };
        assert!(matches!(
            gsp_membership_with(&counterexample(), 3, &cfg),
            MembershipVerdict::Unknown(reason) if reason.contains("too large")
        ));
    }
}
