//! Symmetric TU games: solve the aggregated LP for the load vector `z`, then
//! split `z` into `N` feasible 0/1 strategies one vertex at a time.

use crate::error::{invariant, precondition, Error, Result};
use crate::lp::{find_vertex, solve_lp, LinearProgram, LpOutcome};
use crate::model::{
    is_weakly_convex, potential_of_loads, transform_social, DelayTable, GameInstance, GameState, StrategySpace,
    TuSystem,
};
use crate::numeric::{is_integral, to_int_vector, ExactField, IntMatrix, IntVector, Rational};

fn scale(bound: Option<i64>, k: usize) -> Result<Option<i64>> {
    bound
        .map(|b| {
            b.checked_mul(k as i64)
                .ok_or_else(|| Error::Precondition("row bound overflows when aggregated".into()))
        })
        .transpose()
}

/// The LP over `y^1..y^N ∈ [0,1]^n` (variable `i·n + j` is `y^{i+1}_j`) with
/// rows `N·b_lo ≤ Σ_i A y^i ≤ N·b_hi` and objective `Σ_i Σ_j d_j(i) y^i_j`.
pub fn build_aggregated_lp(sys: &TuSystem, d: &DelayTable, players: usize) -> Result<LinearProgram<Rational>> {
    let n = sys.num_vars();
    if d.num_resources() != n {
        return precondition("delay table and strategy system disagree on the resource count");
    }
    if n > 0 && d.max_load() < players {
        return precondition("delay table does not cover every load level");
    }
    let a = sys.matrix();
    let mut block = IntMatrix::zeros(a.rows(), n * players);
    for r in 0..a.rows() {
        for i in 0..players {
            for j in 0..n {
                block.set(r, i * n + j, a.get(r, j));
            }
        }
    }
    let objective = (0..players)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| Rational::from_int(d.delay(j, i + 1)))
        .collect();
    let lower = sys.row_lower().iter().map(|&b| scale(b, players)).collect::<Result<_>>()?;
    let upper = sys.row_upper().iter().map(|&b| scale(b, players)).collect::<Result<_>>()?;
    Ok(LinearProgram::new(objective, block)
        .with_row_bounds(lower, upper)
        .with_var_bounds(vec![0; n * players], vec![Some(1); n * players]))
}

/// Optimal aggregated load `z = Σ_i y^i` minimizing `Σ_j φ_j(z_j)` subject to
/// `N·b_lo ≤ A z ≤ N·b_hi`.
pub fn solve_aggregated(sys: &TuSystem, d: &DelayTable, players: usize) -> Result<IntVector> {
    let n = sys.num_vars();
    let lp = build_aggregated_lp(sys, d, players)?;
    let (y, value) = match solve_lp(&lp)? {
        LpOutcome::Optimal { solution, value } => (solution, value),
        LpOutcome::Infeasible => return Err(Error::Infeasible("no feasible state: aggregated LP is empty".into())),
        LpOutcome::Unbounded => return invariant("aggregated LP over a bounded box reported unbounded"),
    };
    if !is_integral(&y) {
        return invariant("aggregated LP vertex is not integral; the system is not totally unimodular");
    }
    let y = to_int_vector(&y).ok_or_else(|| Error::Invariant("aggregated vertex out of range".into()))?;
    let z: IntVector = (0..n).map(|j| (0..players).map(|i| y[i * n + j]).sum()).collect();
    // The LP optimum is attained by the staircase y of z, so both values agree.
    if Rational::from_int(potential_of_loads(d, &z)) != value {
        return invariant("aggregated LP value differs from the potential of its load");
    }
    Ok(z)
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) | (None, x) => x,
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

/// Whether `z` is feasible for the aggregated constraints with multiplier `k`.
fn aggregated_feasible(sys: &TuSystem, z: &[i64], k: usize) -> bool {
    let k = k as i64;
    z.len() == sys.num_vars()
        && z.iter().all(|&v| (0..=k).contains(&v))
        && sys.matrix().mul_vec(z).iter().enumerate().all(|(r, &az)| {
            sys.row_lower()[r].is_none_or(|l| az >= k * l) && sys.row_upper()[r].is_none_or(|u| az <= k * u)
        })
}

/// Splits an aggregated load into `N` strategies of `sys` summing to `z`.
///
/// At each stage with `m` players left, the next strategy is a vertex of
/// `{x ∈ [0,1]^n : max(0, z - (m-1)) ≤ x ≤ min(1, z),
///   max(b_lo, Az - (m-1)·b_hi) ≤ Ax ≤ min(b_hi, Az - (m-1)·b_lo)}`,
/// which keeps the residual feasible for `m - 1` players.
pub fn decompose(sys: &TuSystem, players: usize, z: &[i64]) -> Result<Vec<IntVector>> {
    if !aggregated_feasible(sys, z, players) {
        return precondition("load vector is not feasible for the aggregated system");
    }
    let n = sys.num_vars();
    let mut residual = z.to_vec();
    let mut parts = Vec::with_capacity(players);
    for stage in 0..players {
        let rest = (players - stage - 1) as i64;
        let az = sys.matrix().mul_vec(&residual);
        let mut lower = Vec::with_capacity(az.len());
        let mut upper = Vec::with_capacity(az.len());
        for (r, &a) in az.iter().enumerate() {
            let lo = max_opt(sys.row_lower()[r], sys.row_upper()[r].map(|u| a - rest * u));
            let hi = min_opt(sys.row_upper()[r], sys.row_lower()[r].map(|l| a - rest * l));
            if let (Some(l), Some(h)) = (lo, hi) {
                if l > h {
                    return invariant(format!("decomposition stage {stage} has an empty row range"));
                }
            }
            lower.push(lo);
            upper.push(hi);
        }
        let var_lo: Vec<i64> = residual.iter().map(|&zj| (zj - rest).max(0)).collect();
        let var_hi: Vec<i64> = residual.iter().map(|&zj| zj.min(1)).collect();
        if var_lo.iter().zip(&var_hi).any(|(l, h)| l > h) {
            return invariant(format!("decomposition stage {stage} has an empty variable range"));
        }
        let lp = LinearProgram::<Rational>::feasibility(sys.matrix().clone())
            .with_row_bounds(lower, upper)
            .with_var_bounds(var_lo, var_hi.into_iter().map(Some).collect());
        let x = match find_vertex(&lp)? {
            LpOutcome::Optimal { solution, .. } => solution,
            _ => return invariant(format!("decomposition stage {stage} is infeasible")),
        };
        let x = to_int_vector(&x)
            .filter(|_| is_integral(&x))
            .ok_or_else(|| Error::Invariant(format!("decomposition stage {stage} returned a fractional vertex")))?;
        if !sys.contains(&x) {
            return invariant(format!("decomposition stage {stage} produced an infeasible strategy"));
        }
        for (rj, xj) in residual.iter_mut().zip(&x) {
            *rj -= xj;
        }
        parts.push(x);
    }
    debug_assert_eq!(parts.len(), players);
    if residual.iter().any(|&v| v != 0) || n != z.len() {
        return invariant("decomposition does not sum to the aggregated load");
    }
    Ok(parts)
}

fn shared_system(inst: &GameInstance) -> Result<Option<&TuSystem>> {
    if !inst.is_symmetric() {
        return precondition("asymmetric TU instance: the symmetric solver does not apply; use dynamics or brute force");
    }
    match inst.strategies().first() {
        None => Ok(None),
        Some(StrategySpace::Tu(sys)) => Ok(Some(sys)),
        Some(StrategySpace::Polymatroid { .. }) => {
            precondition("polymatroid players are solved by the polymatroid solver")
        }
    }
}

/// Checks that a single player's strategy set is nonempty.
pub fn player_feasible(sys: &TuSystem) -> Result<bool> {
    let lp = sys.relaxation::<Rational>(vec![Rational::from_int(0); sys.num_vars()]);
    Ok(matches!(find_vertex(&lp)?, LpOutcome::Optimal { .. }))
}

/// A global potential minimizer, hence a pure Nash equilibrium, of a
/// symmetric TU game.
pub fn solve_symmetric_nash(inst: &GameInstance) -> Result<GameState> {
    let Some(sys) = shared_system(inst)? else {
        return Ok(GameState::empty(0, inst.resources()));
    };
    if !player_feasible(sys)? {
        return Err(Error::Infeasible("the players' strategy set is empty".into()));
    }
    let z = solve_aggregated(sys, inst.delays(), inst.players())?;
    let parts = decompose(sys, inst.players(), &z)?;
    let state = GameState::new(inst.resources(), parts)?;
    if state.loads() != z.as_slice() {
        return invariant("decomposed state loads differ from the aggregated load");
    }
    state.validate(inst).map_err(|e| Error::Invariant(format!("solver produced an invalid state: {e}")))?;
    Ok(state)
}

/// A socially optimal state of a symmetric TU game with weakly convex
/// delays: the potential minimizer under the transformed delays.
pub fn solve_symmetric_social(inst: &GameInstance) -> Result<GameState> {
    shared_system(inst)?;
    if !is_weakly_convex(inst.delays()) {
        return precondition("delays are not weakly convex; computing a social optimum is NP-hard in general");
    }
    let transformed = inst.with_delays(transform_social(inst.delays())?)?;
    solve_symmetric_nash(&transformed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{potential, social_delay};
    use crate::numeric::rational;

    fn vc_edge() -> TuSystem {
        TuSystem::new(IntMatrix::from_rows(2, &[vec![1, 1]]).unwrap(), vec![Some(1)], vec![None]).unwrap()
    }

    fn vc_game(d: &[i64]) -> GameInstance {
        GameInstance::symmetric(2, StrategySpace::Tu(vc_edge()), DelayTable::uniform(2, d).unwrap()).unwrap()
    }

    fn free_game(n: usize, players: usize, d: &[i64]) -> GameInstance {
        GameInstance::symmetric(
            players,
            StrategySpace::Tu(TuSystem::unconstrained(n)),
            DelayTable::uniform(n, d).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn aggregated_lp_shape() {
        let d = DelayTable::uniform(2, &[1, 3]).unwrap();
        let lp = build_aggregated_lp(&vc_edge(), &d, 2).unwrap();
        assert_eq!(lp.num_vars(), 4);
        assert_eq!(lp.num_rows(), 1);
        assert_eq!(lp.objective, vec![rational(1, 1), rational(1, 1), rational(3, 1), rational(3, 1)]);
        let out = solve_lp(&lp).unwrap();
        assert_eq!(out.value(), Some(&rational(2, 1)));
        assert!(is_integral(out.solution().unwrap()));

        let single = build_aggregated_lp(&vc_edge(), &DelayTable::uniform(2, &[4, 9]).unwrap(), 1).unwrap();
        assert_eq!(single.objective, vec![rational(4, 1), rational(4, 1)]);

        let empty = build_aggregated_lp(&TuSystem::unconstrained(0), &DelayTable::new(vec![]).unwrap(), 2).unwrap();
        assert_eq!(solve_lp(&empty).unwrap().value(), Some(&rational(0, 1)));
    }

    #[test]
    fn aggregated_loads() {
        let d = DelayTable::uniform(2, &[1, 3]).unwrap();
        assert_eq!(solve_aggregated(&vc_edge(), &d, 2).unwrap(), vec![1, 1]);
        let free = TuSystem::unconstrained(1);
        assert_eq!(solve_aggregated(&free, &DelayTable::uniform(1, &[-3, -1]).unwrap(), 2).unwrap(), vec![2]);
        assert_eq!(solve_aggregated(&free, &DelayTable::uniform(1, &[1, 3]).unwrap(), 2).unwrap(), vec![0]);
    }

    #[test]
    fn decomposition_examples() {
        let parts = decompose(&vc_edge(), 2, &[1, 1]).unwrap();
        let mut sorted = parts.clone();
        sorted.sort();
        assert_eq!(sorted, vec![vec![0, 1], vec![1, 0]]);
        let parts = decompose(&vc_edge(), 3, &[3, 0]).unwrap();
        assert_eq!(parts, vec![vec![1, 0]; 3]);
        let free = TuSystem::unconstrained(2);
        assert_eq!(decompose(&free, 2, &[0, 0]).unwrap(), vec![vec![0, 0]; 2]);
        assert!(decompose(&vc_edge(), 2, &[1, 0]).is_err());
    }

    #[test]
    fn symmetric_nash_examples() {
        let vc = vc_game(&[1, 3]);
        let s = solve_symmetric_nash(&vc).unwrap();
        assert_eq!(s.loads(), &[1, 1]);
        assert_eq!(potential(&vc, &s).unwrap(), 2);

        // One edge between two nodes, matching rows x_e ≤ 1 at each endpoint.
        let m = TuSystem::new(IntMatrix::from_rows(1, &[vec![1], vec![1]]).unwrap(), vec![None; 2], vec![Some(1); 2])
            .unwrap();
        let matching =
            GameInstance::symmetric(2, StrategySpace::Tu(m), DelayTable::uniform(1, &[-3, -1]).unwrap()).unwrap();
        let s = solve_symmetric_nash(&matching).unwrap();
        assert_eq!(s.loads(), &[2]);
        assert_eq!(potential(&matching, &s).unwrap(), -4);

        let positive = free_game(3, 3, &[1, 2, 2]);
        assert_eq!(potential(&positive, &solve_symmetric_nash(&positive).unwrap()).unwrap(), 0);
    }

    #[test]
    fn symmetric_social_examples() {
        let free = free_game(1, 2, &[1, 2]);
        let s = solve_symmetric_social(&free).unwrap();
        assert_eq!(s.loads(), &[0]);
        let vc = vc_game(&[1, 3]);
        let s = solve_symmetric_social(&vc).unwrap();
        assert_eq!(s.loads(), &[1, 1]);
        assert_eq!(social_delay(&vc, &s).unwrap(), 2);
        let concave = GameInstance::symmetric(
            3,
            StrategySpace::Tu(TuSystem::unconstrained(1)),
            DelayTable::uniform(1, &[0, 1, 1]).unwrap(),
        )
        .unwrap();
        assert!(matches!(solve_symmetric_social(&concave), Err(Error::Precondition(_))));
    }

    #[test]
    fn infeasible_player_reported() {
        let sys = TuSystem::new(IntMatrix::from_rows(1, &[vec![1]]).unwrap(), vec![Some(2)], vec![None]).unwrap();
        let inst = GameInstance::symmetric(2, StrategySpace::Tu(sys), DelayTable::uniform(1, &[1, 1]).unwrap()).unwrap();
        assert!(matches!(solve_symmetric_nash(&inst), Err(Error::Infeasible(_))));
    }

    #[test]
    fn asymmetric_rejected() {
        let other =
            TuSystem::new(IntMatrix::from_rows(2, &[vec![1, 0]]).unwrap(), vec![Some(1)], vec![None]).unwrap();
        let inst = GameInstance::new(
            2,
            vec![StrategySpace::Tu(vc_edge()), StrategySpace::Tu(other)],
            DelayTable::uniform(2, &[1, 3]).unwrap(),
        )
        .unwrap();
        assert!(matches!(solve_symmetric_nash(&inst), Err(Error::Precondition(_))));
    }
}
