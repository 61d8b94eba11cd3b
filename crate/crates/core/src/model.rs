//! Game data model: strategy systems, delay tables, instances and states,
//! plus the potential, social delay and the delay transforms built on them.

use serde::{Deserialize, Serialize};

use crate::error::{malformed, precondition, Error, Result};
use crate::lp::LinearProgram;
use crate::numeric::{ExactField, IntMatrix, IntVector};
use crate::polymatroid::{PolymatroidMode, PolymatroidOracle};

/// A player's strategy polytope `{x ∈ {0,1}^n : row_lo ≤ A x ≤ row_hi}`.
///
/// `None` row bounds are infinite; equality rows use `row_lo == row_hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TuSystem {
    matrix: IntMatrix,
    row_lower: Vec<Option<i64>>,
    row_upper: Vec<Option<i64>>,
}

impl TuSystem {
    pub fn new(matrix: IntMatrix, row_lower: Vec<Option<i64>>, row_upper: Vec<Option<i64>>) -> Result<Self> {
        let m = matrix.rows();
        if row_lower.len() != m || row_upper.len() != m {
            return malformed(format!("TU system with {m} rows needs {m} lower and upper bounds"));
        }
        for r in 0..m {
            if let (Some(l), Some(u)) = (row_lower[r], row_upper[r]) {
                if l > u {
                    return malformed(format!("row {r}: lower bound {l} exceeds upper bound {u}"));
                }
            }
            if matrix.row(r).iter().any(|v| v.abs() > 1) {
                return malformed(format!("row {r} has an entry outside {{-1, 0, 1}}"));
            }
        }
        Ok(TuSystem {
            matrix,
            row_lower,
            row_upper,
        })
    }

    /// No rows: every 0/1 vector of length `n` is a strategy.
    pub fn unconstrained(n: usize) -> Self {
        TuSystem {
            matrix: IntMatrix::zeros(0, n),
            row_lower: Vec::new(),
            row_upper: Vec::new(),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn row_lower(&self) -> &[Option<i64>] {
        &self.row_lower
    }

    pub fn row_upper(&self) -> &[Option<i64>] {
        &self.row_upper
    }

    pub fn num_vars(&self) -> usize {
        self.matrix.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.rows()
    }

    /// Whether a row-activity vector satisfies all row bounds.
    pub fn rows_satisfied(&self, activity: &[i64]) -> bool {
        activity.iter().enumerate().all(|(r, &a)| {
            self.row_lower[r].is_none_or(|l| a >= l) && self.row_upper[r].is_none_or(|u| a <= u)
        })
    }

    /// Membership of a 0/1 vector.
    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.num_vars() && x.iter().all(|&v| v == 0 || v == 1) && self.rows_satisfied(&self.matrix.mul_vec(x))
    }

    /// The linear relaxation over `[0,1]^n` with the given costs.
    pub fn relaxation<F: ExactField>(&self, objective: Vec<F>) -> LinearProgram<F> {
        let n = self.num_vars();
        LinearProgram::new(objective, self.matrix.clone())
            .with_row_bounds(self.row_lower.clone(), self.row_upper.clone())
            .with_var_bounds(vec![0; n], vec![Some(1); n])
    }
}

/// Per-resource delays `d_j(1..=L)`, nondecreasing in the load.
///
/// `L` is the largest load the table covers: the player count for 0/1 games,
/// possibly more for polymatroid games. `d_j(0)` is taken to be zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DelayTable {
    rows: Vec<Vec<i64>>,
}

impl DelayTable {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let len = rows.first().map_or(0, Vec::len);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != len {
                return malformed(format!("resource {j} has {} delay values, expected {len}", row.len()));
            }
            if row.windows(2).any(|w| w[0] > w[1]) {
                return malformed(format!("delays of resource {j} are not nondecreasing"));
            }
        }
        Ok(DelayTable { rows })
    }

    /// Same delay function on every one of `n` resources.
    pub fn uniform(n: usize, delays: &[i64]) -> Result<Self> {
        Self::new(vec![delays.to_vec(); n])
    }

    pub fn num_resources(&self) -> usize {
        self.rows.len()
    }

    /// Largest load with a defined delay.
    pub fn max_load(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn resource(&self, j: usize) -> &[i64] {
        &self.rows[j]
    }

    /// `d_j(load)`, with `d_j(0) = 0`.
    pub fn delay(&self, j: usize, load: usize) -> i64 {
        if load == 0 {
            0
        } else {
            self.rows[j][load - 1]
        }
    }

    /// Rosenthal term `Σ_{i=1}^{load} d_j(i)`.
    pub fn cumulative(&self, j: usize, load: usize) -> i64 {
        self.rows[j][..load].iter().sum()
    }

    /// Largest absolute delay value.
    pub fn max_abs(&self) -> i64 {
        self.rows.iter().flatten().map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// How one player's strategies are described.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpace {
    Tu(TuSystem),
    Polymatroid {
        oracle: PolymatroidOracle,
        mode: PolymatroidMode,
    },
}

impl StrategySpace {
    pub fn num_resources(&self) -> usize {
        match self {
            StrategySpace::Tu(sys) => sys.num_vars(),
            StrategySpace::Polymatroid { oracle, .. } => oracle.ground_size(),
        }
    }

    pub fn as_tu(&self) -> Option<&TuSystem> {
        match self {
            StrategySpace::Tu(sys) => Some(sys),
            StrategySpace::Polymatroid { .. } => None,
        }
    }

    /// Membership of an integer strategy vector.
    pub fn contains(&self, x: &[i64]) -> bool {
        match self {
            StrategySpace::Tu(sys) => sys.contains(x),
            StrategySpace::Polymatroid { oracle, mode } => oracle.is_strategy(x, *mode),
        }
    }

    /// Largest amount of one resource a single strategy can use.
    pub fn max_usage(&self, j: usize) -> i64 {
        match self {
            StrategySpace::Tu(_) => 1,
            StrategySpace::Polymatroid { oracle, .. } => oracle.value(1 << j),
        }
    }
}

/// A congestion game: players, resources, strategy spaces and delays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameInstance {
    resources: usize,
    strategies: Vec<StrategySpace>,
    delays: DelayTable,
    symmetric: bool,
}

impl GameInstance {
    pub fn new(resources: usize, strategies: Vec<StrategySpace>, delays: DelayTable) -> Result<Self> {
        if delays.num_resources() != resources {
            return malformed(format!(
                "delay table covers {} resources, instance has {resources}",
                delays.num_resources()
            ));
        }
        for (i, s) in strategies.iter().enumerate() {
            if s.num_resources() != resources {
                return malformed(format!(
                    "player {i} strategy space has {} resources, expected {resources}",
                    s.num_resources()
                ));
            }
        }
        if resources > 0 && delays.max_load() < strategies.len() {
            return malformed(format!(
                "delays cover loads up to {}, but there are {} players",
                delays.max_load(),
                strategies.len()
            ));
        }
        for j in 0..resources {
            let peak: i64 = strategies.iter().map(|s| s.max_usage(j)).sum();
            if peak > delays.max_load() as i64 {
                return malformed(format!(
                    "resource {j} can reach load {peak}, beyond the delay table ({})",
                    delays.max_load()
                ));
            }
        }
        let symmetric = strategies.windows(2).all(|w| w[0] == w[1]);
        Ok(GameInstance {
            resources,
            strategies,
            delays,
            symmetric,
        })
    }

    /// `players` copies of one strategy space.
    pub fn symmetric(players: usize, space: StrategySpace, delays: DelayTable) -> Result<Self> {
        let n = space.num_resources();
        Self::new(n, vec![space; players], delays)
    }

    pub fn players(&self) -> usize {
        self.strategies.len()
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn strategies(&self) -> &[StrategySpace] {
        &self.strategies
    }

    pub fn strategy(&self, i: usize) -> &StrategySpace {
        &self.strategies[i]
    }

    pub fn delays(&self) -> &DelayTable {
        &self.delays
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// True iff every player has a TU strategy system.
    pub fn is_tu(&self) -> bool {
        self.strategies.iter().all(|s| matches!(s, StrategySpace::Tu(_)))
    }

    /// Same strategy spaces, different delays.
    pub fn with_delays(&self, delays: DelayTable) -> Result<Self> {
        Self::new(self.resources, self.strategies.clone(), delays)
    }
}

/// A joint strategy profile with its cached load vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    strategies: Vec<IntVector>,
    loads: IntVector,
}

impl GameState {
    /// Builds a state from per-player vectors over `n` resources.
    pub fn new(n: usize, strategies: Vec<IntVector>) -> Result<Self> {
        let mut loads = vec![0i64; n];
        for (i, x) in strategies.iter().enumerate() {
            if x.len() != n {
                return malformed(format!("strategy of player {i} has length {}, expected {n}", x.len()));
            }
            if x.iter().any(|&v| v < 0) {
                return malformed(format!("strategy of player {i} has a negative entry"));
            }
            for (t, v) in loads.iter_mut().zip(x) {
                *t += v;
            }
        }
        Ok(GameState { strategies, loads })
    }

    /// Every player picks the empty strategy.
    pub fn empty(players: usize, n: usize) -> Self {
        GameState {
            strategies: vec![vec![0; n]; players],
            loads: vec![0; n],
        }
    }

    pub fn strategies(&self) -> &[IntVector] {
        &self.strategies
    }

    pub fn strategy(&self, i: usize) -> &[i64] {
        &self.strategies[i]
    }

    pub fn loads(&self) -> &[i64] {
        &self.loads
    }

    /// Replaces player `i`'s strategy, keeping loads consistent.
    pub fn with_strategy(&self, i: usize, x: IntVector) -> Self {
        let mut next = self.clone();
        for (j, v) in x.iter().enumerate() {
            next.loads[j] += v - self.strategies[i][j];
        }
        next.strategies[i] = x;
        next
    }

    /// Loads of everybody except player `i`.
    pub fn loads_without(&self, i: usize) -> IntVector {
        self.loads.iter().zip(&self.strategies[i]).map(|(t, x)| t - x).collect()
    }

    /// Checks feasibility of every strategy against the instance.
    pub fn validate(&self, inst: &GameInstance) -> Result<()> {
        if self.strategies.len() != inst.players() {
            return precondition(format!(
                "state has {} players, instance has {}",
                self.strategies.len(),
                inst.players()
            ));
        }
        if self.loads.len() != inst.resources() {
            return precondition("state resource count does not match the instance");
        }
        for (i, x) in self.strategies.iter().enumerate() {
            if !inst.strategy(i).contains(x) {
                return Err(Error::Precondition(format!("strategy of player {i} is infeasible")));
            }
        }
        Ok(())
    }
}

/// Rosenthal potential of a load vector.
pub fn potential_of_loads(delays: &DelayTable, loads: &[i64]) -> i64 {
    loads
        .iter()
        .enumerate()
        .map(|(j, &t)| delays.cumulative(j, t as usize))
        .sum()
}

/// Social delay `Σ_j t_j·d_j(t_j)` of a load vector.
pub fn social_delay_of_loads(delays: &DelayTable, loads: &[i64]) -> i64 {
    loads
        .iter()
        .enumerate()
        .map(|(j, &t)| t * delays.delay(j, t as usize))
        .sum()
}

/// `Σ_j φ_j(t_j)` where each `φ_j(t) = Σ_{i ≤ t} d_j(i)`.
pub fn potential(inst: &GameInstance, s: &GameState) -> Result<i64> {
    s.validate(inst)?;
    Ok(potential_of_loads(inst.delays(), s.loads()))
}

pub fn social_delay(inst: &GameInstance, s: &GameState) -> Result<i64> {
    s.validate(inst)?;
    Ok(social_delay_of_loads(inst.delays(), s.loads()))
}

/// Cost of player `i`: `Σ_j x^i_j · d_j(t_j)`.
pub fn player_cost(inst: &GameInstance, s: &GameState, i: usize) -> Result<i64> {
    if i >= inst.players() {
        return precondition(format!("player index {i} out of range"));
    }
    s.validate(inst)?;
    Ok(cost_in_state(inst.delays(), s, i))
}

pub(crate) fn cost_in_state(delays: &DelayTable, s: &GameState, i: usize) -> i64 {
    s.strategy(i)
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(j, &x)| x * delays.delay(j, s.loads()[j] as usize))
        .sum()
}

/// Weak convexity of a single delay function `d(1..=L)`.
pub fn is_weakly_convex_fn(d: &[i64]) -> bool {
    // i·d(i) - (i-1)·d(i-1) ≤ (i+1)·d(i+1) - i·d(i) for 1 < i < L (1-based).
    (2..d.len()).all(|i| {
        let at = |k: usize| k as i64 * d[k - 1];
        at(i) - at(i - 1) <= at(i + 1) - at(i)
    })
}

pub fn is_weakly_convex(d: &DelayTable) -> bool {
    d.rows().iter().all(|row| is_weakly_convex_fn(row))
}

/// `d'_j(i) = i·d_j(i) - (i-1)·d_j(i-1)`, with `d_j(0) = 0`.
///
/// The potential under `d'` equals the social delay under `d`.
pub fn transform_social(d: &DelayTable) -> Result<DelayTable> {
    if !is_weakly_convex(d) {
        return precondition("delays are not weakly convex");
    }
    let rows = d
        .rows()
        .iter()
        .map(|row| {
            (1..=row.len())
                .map(|i| i as i64 * row[i - 1] - (i as i64 - 1) * if i > 1 { row[i - 2] } else { 0 })
                .collect()
        })
        .collect();
    DelayTable::new(rows)
}

/// Which optimality notion a uniform delay shift must preserve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMode {
    Nash,
    Social,
}

/// Constant subtracted from every delay so that maximum-cardinality
/// strategies dominate: `2·K·Δ + 1` (nash) or `2·N·K·Δ + 1` (social), where
/// `Δ = max |d_j(i)|` and `K` bounds the cardinality of a strategy (the
/// resource count for set games).
pub fn shift_constant(d: &DelayTable, mode: ShiftMode, cardinality_bound: usize, players: usize) -> Result<i64> {
    let delta = i128::from(d.max_abs());
    let k = cardinality_bound as i128;
    let c = match mode {
        ShiftMode::Nash => 2 * k * delta + 1,
        ShiftMode::Social => 2 * players as i128 * k * delta + 1,
    };
    i64::try_from(c).map_err(|_| Error::Precondition("delay shift overflows 64-bit delays".into()))
}

/// Subtracts [`shift_constant`] from every entry.
pub fn shift_delays(d: &DelayTable, mode: ShiftMode, cardinality_bound: usize, players: usize) -> Result<DelayTable> {
    let c = shift_constant(d, mode, cardinality_bound, players)?;
    let rows = d
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| v.checked_sub(c).ok_or_else(|| Error::Precondition("delay shift overflows".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DelayTable::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single_edge_vc() -> GameInstance {
        let sys = TuSystem::new(IntMatrix::from_rows(2, &[vec![1, 1]]).unwrap(), vec![Some(1)], vec![None]).unwrap();
        GameInstance::symmetric(2, StrategySpace::Tu(sys), DelayTable::uniform(2, &[1, 3]).unwrap()).unwrap()
    }

    fn state(n: usize, xs: &[&[i64]]) -> GameState {
        GameState::new(n, xs.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn potential_examples() {
        let free = GameInstance::symmetric(
            2,
            StrategySpace::Tu(TuSystem::unconstrained(1)),
            DelayTable::uniform(1, &[1, 3]).unwrap(),
        )
        .unwrap();
        assert_eq!(potential(&free, &GameState::empty(2, 1)).unwrap(), 0);
        assert_eq!(potential(&free, &state(1, &[&[1], &[1]])).unwrap(), 4);
        assert_eq!(social_delay(&free, &state(1, &[&[1], &[1]])).unwrap(), 6);
        assert_eq!(social_delay(&free, &GameState::empty(2, 1)).unwrap(), 0);
        let vc = single_edge_vc();
        assert_eq!(potential(&vc, &state(2, &[&[1, 0], &[0, 1]])).unwrap(), 2);
    }

    #[test]
    fn player_costs() {
        let free = GameInstance::symmetric(
            2,
            StrategySpace::Tu(TuSystem::unconstrained(1)),
            DelayTable::uniform(1, &[1, 3]).unwrap(),
        )
        .unwrap();
        let both = state(1, &[&[1], &[1]]);
        assert_eq!(player_cost(&free, &both, 0).unwrap(), 3);
        assert_eq!(player_cost(&free, &both, 1).unwrap(), 3);
        assert_eq!(player_cost(&free, &state(1, &[&[0], &[1]]), 0).unwrap(), 0);
        assert!(player_cost(&free, &both, 2).is_err());
    }

    #[test]
    fn infeasible_state_rejected() {
        let vc = single_edge_vc();
        let bad = state(2, &[&[0, 0], &[1, 1]]);
        assert!(matches!(potential(&vc, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn weak_convexity_examples() {
        assert!(is_weakly_convex_fn(&[1, 2, 4]));
        assert!(!is_weakly_convex_fn(&[0, 1, 1]));
        assert!(is_weakly_convex_fn(&[0, 0, 1, 2]));
    }

    #[test]
    fn social_transform_examples() {
        let t = transform_social(&DelayTable::uniform(1, &[1, 2, 4]).unwrap()).unwrap();
        assert_eq!(t.resource(0), &[1, 3, 8]);
        let t = transform_social(&DelayTable::uniform(1, &[5, 5, 5, 5]).unwrap()).unwrap();
        assert_eq!(t.resource(0), &[5, 5, 5, 5]);
        let t = transform_social(&DelayTable::uniform(1, &[0, 1, 3]).unwrap()).unwrap();
        assert_eq!(t.resource(0), &[0, 2, 7]);
        assert!(transform_social(&DelayTable::uniform(1, &[0, 1, 1]).unwrap()).is_err());
    }

    #[test]
    fn shift_examples() {
        let d = DelayTable::uniform(1, &[2, 5]).unwrap();
        assert_eq!(shift_delays(&d, ShiftMode::Nash, 1, 2).unwrap().resource(0), &[-9, -6]);
        assert_eq!(shift_delays(&d, ShiftMode::Social, 1, 2).unwrap().resource(0), &[-19, -16]);
        let z = DelayTable::uniform(2, &[0, 0]).unwrap();
        let shifted = shift_delays(&z, ShiftMode::Nash, 2, 2).unwrap();
        assert_eq!(shifted.resource(0), &[-1, -1]);
        assert_eq!(shift_delays(&z, ShiftMode::Social, 2, 2).unwrap().resource(1), &[-1, -1]);
    }

    #[test]
    fn non_monotone_delays_rejected() {
        assert!(DelayTable::new(vec![vec![3, 1]]).is_err());
    }

    #[test]
    fn symmetric_flag_tracks_descriptors() {
        let vc = single_edge_vc();
        assert!(vc.is_symmetric());
        let other = TuSystem::new(IntMatrix::from_rows(2, &[vec![1, 1]]).unwrap(), vec![None], vec![Some(1)]).unwrap();
        let asym = GameInstance::new(
            2,
            vec![vc.strategy(0).clone(), StrategySpace::Tu(other)],
            vc.delays().clone(),
        )
        .unwrap();
        assert!(!asym.is_symmetric());
    }

    fn delay_row(len: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(0i64..4, len).prop_map(|steps| {
            let mut acc = -5;
            steps
                .into_iter()
                .map(|s| {
                    acc += s;
                    acc
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn transformed_potential_equals_social_delay(
            rows in proptest::collection::vec(delay_row(4), 1..4),
            loads in proptest::collection::vec(0i64..=4, 3),
        ) {
            let d = DelayTable::new(rows).unwrap();
            prop_assume!(is_weakly_convex(&d));
            let t = transform_social(&d).unwrap();
            prop_assert!(t.rows().iter().all(|r| r.windows(2).all(|w| w[0] <= w[1])));
            let loads = &loads[..d.num_resources()];
            prop_assert_eq!(potential_of_loads(&t, loads), social_delay_of_loads(&d, loads));
        }

        #[test]
        fn exact_potential_identity(
            rows in proptest::collection::vec(delay_row(3), 3),
            xs in proptest::collection::vec(proptest::collection::vec(0i64..2, 3), 3),
            dev in proptest::collection::vec(0i64..2, 3),
            who in 0usize..3,
        ) {
            let d = DelayTable::new(rows).unwrap();
            let inst = GameInstance::symmetric(3, StrategySpace::Tu(TuSystem::unconstrained(3)), d).unwrap();
            let s = GameState::new(3, xs).unwrap();
            let t = s.with_strategy(who, dev);
            let dphi = potential(&inst, &s).unwrap() - potential(&inst, &t).unwrap();
            let dcost = player_cost(&inst, &s, who).unwrap() - player_cost(&inst, &t, who).unwrap();
            prop_assert_eq!(dphi, dcost);
            let recomputed = GameState::new(3, t.strategies().to_vec()).unwrap();
            prop_assert_eq!(recomputed.loads(), t.loads());
        }

        #[test]
        fn shift_cancels_between_equal_cardinality_strategies(
            rows in proptest::collection::vec(delay_row(2), 4),
            a in proptest::sample::subsequence(vec![0usize, 1, 2, 3], 2),
            b in proptest::sample::subsequence(vec![0usize, 1, 2, 3], 2),
            other in proptest::collection::vec(0i64..2, 4),
        ) {
            let d = DelayTable::new(rows).unwrap();
            let inst = GameInstance::symmetric(2, StrategySpace::Tu(TuSystem::unconstrained(4)), d.clone()).unwrap();
            let shifted = inst.with_delays(shift_delays(&d, ShiftMode::Nash, 4, 2).unwrap()).unwrap();
            let vec_of = |idx: &[usize]| (0..4).map(|j| i64::from(idx.contains(&j))).collect::<Vec<_>>();
            let sa = GameState::new(4, vec![vec_of(&a), other.clone()]).unwrap();
            let sb = GameState::new(4, vec![vec_of(&b), other]).unwrap();
            let plain = player_cost(&inst, &sa, 0).unwrap() - player_cost(&inst, &sb, 0).unwrap();
            let moved = player_cost(&shifted, &sa, 0).unwrap() - player_cost(&shifted, &sb, 0).unwrap();
            prop_assert_eq!(plain, moved);
        }
    }
}
