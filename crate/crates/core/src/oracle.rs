//! Exhaustive ground truth: explicit strategy lists, joint-state scans and
//! definition-level Nash checks. Every cap raises an error rather than
//! truncating.

use crate::error::{malformed, Error, Result};
use crate::model::{
    potential_of_loads, social_delay_of_loads, DelayTable, GameInstance, GameState, StrategySpace, TuSystem,
};
use crate::numeric::IntVector;
use crate::polymatroid::{membership, PolymatroidMode, PolymatroidOracle};

/// Largest number of free 0/1 variables in [`enumerate_strategies`].
pub const STRATEGY_VAR_CAP: usize = 20;
/// Largest number of joint states scanned by the brute-force solvers.
pub const JOINT_STATE_CAP: u64 = 1_000_000;
/// Caps for [`enumerate_polymatroid_points`].
pub const POINTS_GROUND_CAP: usize = 5;
pub const POINTS_TOTAL_CAP: i64 = 6;

/// Variables pinned to zero by a unit row with bounds `[0, 0]`.
fn pinned_to_zero(sys: &TuSystem) -> Vec<bool> {
    let a = sys.matrix();
    let mut pinned = vec![false; sys.num_vars()];
    for r in 0..a.rows() {
        let nz: Vec<usize> = (0..a.cols()).filter(|&c| a.get(r, c) != 0).collect();
        if let [c] = nz[..] {
            // Setting x_c = 1 gives activity a_rc; if that is out of range, x_c = 0.
            let s = a.get(r, c);
            if sys.row_lower()[r].is_some_and(|l| s < l) || sys.row_upper()[r].is_some_and(|u| s > u) {
                pinned[c] = true;
            }
        }
    }
    pinned
}

/// All 0/1 vectors with `b_lo ≤ A x ≤ b_hi`, in lexicographic order.
///
/// The cap counts variables that are not pinned to zero by a unit row, so
/// players confined to a small part of a large resource set stay in range.
pub fn enumerate_strategies(sys: &TuSystem) -> Result<Vec<IntVector>> {
    let n = sys.num_vars();
    let pinned = pinned_to_zero(sys);
    let free = pinned.iter().filter(|p| !**p).count();
    if free > STRATEGY_VAR_CAP {
        return Err(Error::SizeCap(format!(
            "strategy enumeration over {free} free variables exceeds {STRATEGY_VAR_CAP}"
        )));
    }
    let a = sys.matrix().to_rows();
    // reach_lo[k][r] / reach_hi[k][r]: extreme contributions of variables k.. to row r.
    let mut reach_lo = vec![vec![0i64; a.len()]; n + 1];
    let mut reach_hi = vec![vec![0i64; a.len()]; n + 1];
    for k in (0..n).rev() {
        for r in 0..a.len() {
            let c = if pinned[k] { 0 } else { a[r][k] };
            reach_lo[k][r] = reach_lo[k + 1][r] + c.min(0);
            reach_hi[k][r] = reach_hi[k + 1][r] + c.max(0);
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut act = vec![0i64; a.len()];
    search(sys, &a, &pinned, &reach_lo, &reach_hi, 0, &mut x, &mut act, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    sys: &TuSystem,
    a: &[Vec<i64>],
    pinned: &[bool],
    reach_lo: &[Vec<i64>],
    reach_hi: &[Vec<i64>],
    k: usize,
    x: &mut Vec<i64>,
    act: &mut Vec<i64>,
    out: &mut Vec<IntVector>,
) {
    for r in 0..a.len() {
        if sys.row_lower()[r].is_some_and(|l| act[r] + reach_hi[k][r] < l)
            || sys.row_upper()[r].is_some_and(|u| act[r] + reach_lo[k][r] > u)
        {
            return;
        }
    }
    if k == x.len() {
        out.push(x.clone());
        return;
    }
    search(sys, a, pinned, reach_lo, reach_hi, k + 1, x, act, out);
    if !pinned[k] {
        x[k] = 1;
        for r in 0..a.len() {
            act[r] += a[r][k];
        }
        search(sys, a, pinned, reach_lo, reach_hi, k + 1, x, act, out);
        for r in 0..a.len() {
            act[r] -= a[r][k];
        }
        x[k] = 0;
    }
}

/// Integer points of one polymatroid (bases only in base mode), lexicographic.
pub fn enumerate_player_points(oracle: &PolymatroidOracle, mode: PolymatroidMode) -> Result<Vec<IntVector>> {
    let n = oracle.ground_size();
    let caps: Vec<i64> = (0..n).map(|j| oracle.value(1 << j)).collect();
    let count: u64 = caps.iter().map(|&c| c as u64 + 1).product();
    if count > JOINT_STATE_CAP {
        return Err(Error::SizeCap(format!("polymatroid box has {count} points, cap {JOINT_STATE_CAP}")));
    }
    Ok(boxed_points(&caps)
        .into_iter()
        .filter(|x| oracle.is_strategy(x, mode))
        .collect())
}

fn boxed_points(caps: &[i64]) -> Vec<IntVector> {
    let mut out = vec![Vec::new()];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|p: IntVector| {
                (0..=c).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Every integer vector of the sum polymatroid `P(g_1) + ... + P(g_N)`.
pub fn enumerate_polymatroid_points(oracles: &[PolymatroidOracle]) -> Result<Vec<IntVector>> {
    let Some(first) = oracles.first() else {
        return malformed("at least one polymatroid is required");
    };
    let n = first.ground_size();
    let total: i64 = oracles.iter().map(PolymatroidOracle::total).sum();
    if n > POINTS_GROUND_CAP || total > POINTS_TOTAL_CAP {
        return Err(Error::SizeCap(format!(
            "point enumeration needs |R| <= {POINTS_GROUND_CAP} and total rank <= {POINTS_TOTAL_CAP}"
        )));
    }
    let caps: Vec<i64> = (0..n).map(|j| oracles.iter().map(|o| o.value(1 << j)).sum()).collect();
    let mut out = Vec::new();
    for p in boxed_points(&caps) {
        if membership(oracles, &p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Explicit strategy list of one player.
pub fn player_strategies(space: &StrategySpace) -> Result<Vec<IntVector>> {
    match space {
        StrategySpace::Tu(sys) => enumerate_strategies(sys),
        StrategySpace::Polymatroid { oracle, mode } => enumerate_player_points(oracle, *mode),
    }
}

/// Strategy lists of all players, with the joint-state cap enforced.
pub fn all_strategies(inst: &GameInstance) -> Result<Vec<Vec<IntVector>>> {
    let lists = inst.strategies().iter().map(player_strategies).collect::<Result<Vec<_>>>()?;
    let mut count: u64 = 1;
    for l in &lists {
        count = count.saturating_mul(l.len() as u64);
        if count > JOINT_STATE_CAP {
            return Err(Error::SizeCap(format!("more than {JOINT_STATE_CAP} joint states")));
        }
    }
    Ok(lists)
}

/// Calls `visit` on every joint state, in lexicographic order of the
/// per-player strategy indices.
fn for_each_state(n: usize, lists: &[Vec<IntVector>], mut visit: impl FnMut(&[usize], &[i64])) {
    if lists.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut loads = vec![0i64; n];
    for (l, &k) in lists.iter().zip(&idx) {
        add(&mut loads, &l[k], 1);
    }
    loop {
        visit(&idx, &loads);
        let mut p = lists.len();
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            add(&mut loads, &lists[p][idx[p]], -1);
            idx[p] += 1;
            if idx[p] < lists[p].len() {
                add(&mut loads, &lists[p][idx[p]], 1);
                break;
            }
            idx[p] = 0;
            add(&mut loads, &lists[p][0], 1);
        }
    }
}

fn add(loads: &mut [i64], x: &[i64], sign: i64) {
    for (t, v) in loads.iter_mut().zip(x) {
        *t += sign * v;
    }
}

fn state_at(n: usize, lists: &[Vec<IntVector>], idx: &[usize]) -> Result<GameState> {
    GameState::new(n, lists.iter().zip(idx).map(|(l, &k)| l[k].clone()).collect())
}

fn brute_min(inst: &GameInstance, value: impl Fn(&DelayTable, &[i64]) -> i64) -> Result<(GameState, i64)> {
    let lists = all_strategies(inst)?;
    let mut best: Option<(Vec<usize>, i64)> = None;
    for_each_state(inst.resources(), &lists, |idx, loads| {
        let v = value(inst.delays(), loads);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((idx.to_vec(), v));
        }
    });
    match best {
        Some((idx, v)) => Ok((state_at(inst.resources(), &lists, &idx)?, v)),
        None => Err(Error::Infeasible("some player has no strategy".into())),
    }
}

/// A state of minimum potential, and that minimum.
pub fn brute_force_min_potential(inst: &GameInstance) -> Result<(GameState, i64)> {
    brute_min(inst, potential_of_loads)
}

/// A state of minimum social delay, and that minimum.
pub fn brute_force_min_social(inst: &GameInstance) -> Result<(GameState, i64)> {
    brute_min(inst, social_delay_of_loads)
}

/// Cost of playing `y` when the other players produce `others`.
pub fn deviation_cost(d: &DelayTable, others: &[i64], y: &[i64]) -> i64 {
    y.iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(j, &v)| v * d.delay(j, (others[j] + v) as usize))
        .sum()
}

/// Every pure Nash equilibrium, found by trying each player's every
/// alternative strategy in each joint state.
pub fn brute_force_all_nash(inst: &GameInstance) -> Result<Vec<GameState>> {
    let lists = all_strategies(inst)?;
    let n = inst.resources();
    let d = inst.delays();
    let mut nash = Vec::new();
    let mut others = vec![0i64; n];
    for_each_state(n, &lists, |idx, loads| {
        let stable = lists.iter().zip(idx).all(|(l, &k)| {
            for (o, (t, x)) in others.iter_mut().zip(loads.iter().zip(&l[k])) {
                *o = t - x;
            }
            let current = deviation_cost(d, &others, &l[k]);
            l.iter().all(|y| deviation_cost(d, &others, y) >= current)
        });
        if stable {
            nash.push(idx.to_vec());
        }
    });
    nash.into_iter().map(|idx| state_at(n, &lists, &idx)).collect()
}
