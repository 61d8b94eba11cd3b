//! Integer polymatroids given by value tables, greedy minimization of
//! separable convex functions over their sum, and stepwise decomposition of
//! an aggregated load into per-player points.

use serde::{Deserialize, Serialize};

use crate::error::{invariant, malformed, precondition, Error, Result};
use crate::model::{
    is_weakly_convex, shift_constant, transform_social, DelayTable, GameInstance, GameState, ShiftMode,
    StrategySpace,
};
use crate::numeric::IntVector;

/// Largest ground set handled by exhaustive subset enumeration.
pub const POLYMATROID_SIZE_CAP: usize = 20;

/// Whether a player may pick any point of the polymatroid or only bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolymatroidMode {
    Independent,
    Base,
}

/// A normalized, nondecreasing, submodular integer set function, stored as
/// a table indexed by subset bitmask (bit `j` set iff resource `j` is in).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolymatroidOracle {
    n: usize,
    table: Vec<i64>,
}

fn check_size(n: usize) -> Result<()> {
    if n > POLYMATROID_SIZE_CAP {
        return Err(Error::SizeCap(format!(
            "polymatroid ground set of size {n} exceeds {POLYMATROID_SIZE_CAP}"
        )));
    }
    Ok(())
}

/// Axiom check on a raw table: normalized, nondecreasing and submodular.
pub fn validate_table(n: usize, table: &[i64]) -> Result<bool> {
    check_size(n)?;
    if table.len() != 1 << n {
        return malformed(format!("polymatroid table over {n} elements needs {} values", 1usize << n));
    }
    if table[0] != 0 {
        return Ok(false);
    }
    for s in 0..table.len() {
        for a in 0..n {
            if s >> a & 1 == 1 {
                continue;
            }
            let sa = s | 1 << a;
            if table[sa] < table[s] {
                return Ok(false);
            }
            // Local form of submodularity: diminishing marginal returns.
            for b in a + 1..n {
                if s >> b & 1 == 0 && table[sa] + table[s | 1 << b] < table[sa | 1 << b] + table[s] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

impl PolymatroidOracle {
    /// Builds an oracle from a table of `2^n` values; the axioms are checked.
    pub fn from_table(n: usize, table: Vec<i64>) -> Result<Self> {
        if !validate_table(n, &table)? {
            return malformed("set function is not a polymatroid (normalized, nondecreasing, submodular)");
        }
        Ok(PolymatroidOracle { n, table })
    }

    /// Tabulates a set function given as a callback on bitmasks.
    pub fn from_fn(n: usize, g: impl Fn(usize) -> i64) -> Result<Self> {
        check_size(n)?;
        Self::from_table(n, (0..1usize << n).map(g).collect())
    }

    /// Rank function of the uniform matroid `U_{k,n}`.
    pub fn uniform_matroid(n: usize, k: usize) -> Result<Self> {
        Self::from_fn(n, |s| s.count_ones().min(k as u32) as i64)
    }

    /// Rank function of the free matroid (every subset independent).
    pub fn free_matroid(n: usize) -> Result<Self> {
        Self::uniform_matroid(n, n)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[i64] {
        &self.table
    }

    pub fn value(&self, mask: usize) -> i64 {
        self.table[mask]
    }

    /// `g(R)`.
    pub fn total(&self) -> i64 {
        self.table[self.table.len() - 1]
    }

    /// True iff every marginal is 0 or 1, i.e. `g` is a matroid rank function.
    pub fn is_matroid(&self) -> bool {
        (0..self.table.len()).all(|s| {
            (0..self.n)
                .filter(|&a| s >> a & 1 == 0)
                .all(|a| self.table[s | 1 << a] - self.table[s] <= 1)
        })
    }

    /// `x ≥ 0` and `x(U) ≤ g(U)` for every `U`.
    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.n && x.iter().all(|&v| v >= 0) && within(&self.table, x)
    }

    pub fn is_strategy(&self, x: &[i64], mode: PolymatroidMode) -> bool {
        self.contains(x) && (mode == PolymatroidMode::Independent || x.iter().sum::<i64>() == self.total())
    }
}

fn subset_sum(x: &[i64], mask: usize) -> i64 {
    x.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, v)| v).sum()
}

fn within(table: &[i64], x: &[i64]) -> bool {
    (0..table.len()).all(|m| subset_sum(x, m) <= table[m])
}

fn ground_of(oracles: &[PolymatroidOracle]) -> Result<usize> {
    let Some(first) = oracles.first() else {
        return precondition("at least one polymatroid is required");
    };
    if oracles.iter().any(|o| o.n != first.n) {
        return malformed("polymatroids over different ground sets");
    }
    Ok(first.n)
}

fn sum_table<'a>(n: usize, oracles: impl IntoIterator<Item = &'a PolymatroidOracle>) -> Vec<i64> {
    let mut t = vec![0i64; 1 << n];
    for o in oracles {
        for (acc, v) in t.iter_mut().zip(&o.table) {
            *acc += v;
        }
    }
    t
}

/// Membership in the sum polymatroid `P(g_1) + ... + P(g_N) = P(Σ g_i)`.
pub fn membership(oracles: &[PolymatroidOracle], v: &[i64]) -> Result<bool> {
    let n = ground_of(oracles)?;
    if v.len() != n {
        return malformed(format!("vector has length {}, ground set has {n} elements", v.len()));
    }
    Ok(v.iter().all(|&x| x >= 0) && within(&sum_table(n, oracles), v))
}

/// Discrete convexity of `f(0), f(1), ...`: nondecreasing first differences.
pub fn is_discrete_convex(f: &[i64]) -> bool {
    f.windows(3).all(|w| w[1] - w[0] <= w[2] - w[1])
}

/// Minimizes `Σ_j f_j(z_j)` over the integer points of the sum polymatroid.
///
/// `f[j][k]` is `f_j(k)` and must be defined up to `Σ_i g_i({j})`. Each step
/// adds one unit to the lowest-index resource with the most negative
/// marginal among those that stay inside the polymatroid, stopping when no
/// marginal is negative.
pub fn greedy_min_separable(oracles: &[PolymatroidOracle], f: &[Vec<i64>]) -> Result<IntVector> {
    let n = ground_of(oracles)?;
    if f.len() != n {
        return malformed(format!("{} objective functions for {n} resources", f.len()));
    }
    let total = sum_table(n, oracles);
    for (j, fj) in f.iter().enumerate() {
        if (fj.len() as i64) <= total[1 << j] {
            return malformed(format!(
                "objective of resource {j} is defined up to {} but the load can reach {}",
                fj.len() as i64 - 1,
                total[1 << j]
            ));
        }
        if !is_discrete_convex(fj) {
            return precondition(format!("objective of resource {j} is not convex"));
        }
    }
    // slack[U] = G(U) - z(U); resource j can grow iff every U ∋ j has slack ≥ 1.
    let mut slack = total;
    let mut z = vec![0i64; n];
    let mut saturated = vec![false; n];
    loop {
        let mut best: Option<(i64, usize)> = None;
        for j in 0..n {
            if saturated[j] {
                continue;
            }
            if (0..slack.len()).any(|m| m >> j & 1 == 1 && slack[m] < 1) {
                // Slack never increases, so j stays blocked.
                saturated[j] = true;
                continue;
            }
            let k = z[j] as usize;
            let marginal = f[j][k + 1] - f[j][k];
            if best.is_none_or(|(b, _)| marginal < b) {
                best = Some((marginal, j));
            }
        }
        match best {
            Some((marginal, j)) if marginal < 0 => {
                z[j] += 1;
                for (m, s) in slack.iter_mut().enumerate() {
                    if m >> j & 1 == 1 {
                        *s -= 1;
                    }
                }
            }
            _ => return Ok(z),
        }
    }
}

/// `h'(W) = min_{S ⊇ W, S ⊆ free} min_{T ⊆ fixed} h(S ∪ T) - a(T)`, indexed by
/// compressed masks over the free coordinates.
///
/// This is the monotone hull of the restriction of `P(h)` to the free
/// coordinates once the fixed coordinates take the values `a`.
fn contract(h: &[i64], n: usize, fixed: &[Option<i64>]) -> (Vec<i64>, bool) {
    let free: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
    let k = free.len();
    let mut out = vec![i64::MAX; 1 << k];
    let mut fixed_ok = true;
    for full in 0..1usize << n {
        let mut w = 0usize;
        let mut used = 0i64;
        for (bit, &j) in free.iter().enumerate() {
            if full >> j & 1 == 1 {
                w |= 1 << bit;
            }
        }
        for (j, a) in fixed.iter().enumerate() {
            if let Some(a) = a {
                if full >> j & 1 == 1 {
                    used += a;
                }
            }
        }
        let v = h[full] - used;
        if w == 0 && v < 0 {
            fixed_ok = false;
        }
        out[w] = out[w].min(v);
    }
    // Superset minimum, so the constraint family is closed under x ≥ 0.
    for bit in 0..k {
        for w in 0..1usize << k {
            if w >> bit & 1 == 0 {
                out[w] = out[w].min(out[w | 1 << bit]);
            }
        }
    }
    (out, fixed_ok)
}

/// Whether some `x ∈ P(g)` agreeing with `fixed` leaves `z - x ∈ P(rest)`.
fn extendable(g: &[i64], rest: &[i64], n: usize, z: &[i64], fixed: &[Option<i64>]) -> bool {
    if fixed.iter().zip(z).any(|(a, &zj)| a.is_some_and(|a| a < 0 || a > zj)) {
        return false;
    }
    let (gc, g_ok) = contract(g, n, fixed);
    let residual: Vec<Option<i64>> = fixed.iter().zip(z).map(|(a, &zj)| a.map(|a| zj - a)).collect();
    let (rc, r_ok) = contract(rest, n, &residual);
    if !g_ok || !r_ok {
        return false;
    }
    let free: Vec<usize> = (0..n).filter(|&j| fixed[j].is_none()).collect();
    (0..1usize << free.len()).all(|w| {
        let zw: i64 = free.iter().enumerate().filter(|(b, _)| w >> b & 1 == 1).map(|(_, &j)| z[j]).sum();
        zw <= gc[w] + rc[w]
    })
}

/// Splits an integer point of the sum polymatroid into one integer point
/// per oracle, in order. Player `i` takes, resource by resource, the largest
/// value that still lets the remainder be completed by players `i+1..N`.
pub fn decompose_polymatroid(oracles: &[PolymatroidOracle], z: &[i64]) -> Result<Vec<IntVector>> {
    let n = ground_of(oracles)?;
    if !membership(oracles, z)? {
        return precondition("aggregated load is not in the sum polymatroid");
    }
    let mut residual = z.to_vec();
    let mut parts = Vec::with_capacity(oracles.len());
    for (i, o) in oracles.iter().enumerate() {
        let rest = sum_table(n, &oracles[i + 1..]);
        let mut fixed: Vec<Option<i64>> = vec![None; n];
        for r in 0..n {
            let top = residual[r].min(o.value(1 << r));
            let mut chosen = None;
            for v in (0..=top).rev() {
                fixed[r] = Some(v);
                if extendable(&o.table, &rest, n, &residual, &fixed) {
                    chosen = Some(v);
                    break;
                }
            }
            if chosen.is_none() {
                return invariant(format!("no extendable value for player {i}, resource {r}"));
            }
        }
        let x: IntVector = fixed.into_iter().map(|v| v.unwrap_or(0)).collect();
        if !o.contains(&x) {
            return invariant(format!("decomposed part of player {i} leaves its polymatroid"));
        }
        for (rj, xj) in residual.iter_mut().zip(&x) {
            *rj -= xj;
        }
        parts.push(x);
    }
    if residual.iter().any(|&v| v != 0) {
        return invariant("decomposition does not sum to the aggregated load");
    }
    Ok(parts)
}

/// Result of the polymatroid Nash pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolymatroidSolution {
    pub state: GameState,
    /// False when some oracle is not a matroid rank function: the potential
    /// minimizer is then not known to be an equilibrium.
    pub within_guarantees: bool,
}

fn polymatroid_players(inst: &GameInstance) -> Result<(Vec<PolymatroidOracle>, PolymatroidMode)> {
    let mut oracles = Vec::with_capacity(inst.players());
    let mut mode = None;
    for (i, s) in inst.strategies().iter().enumerate() {
        match s {
            StrategySpace::Polymatroid { oracle, mode: m } => {
                if mode.is_some_and(|prev| prev != *m) {
                    return precondition("players mix independent-set and base modes");
                }
                mode = Some(*m);
                oracles.push(oracle.clone());
            }
            StrategySpace::Tu(_) => {
                return precondition(format!("player {i} is not a polymatroid player"));
            }
        }
    }
    match mode {
        Some(m) => Ok((oracles, m)),
        None => precondition("instance has no players"),
    }
}

/// `K = max(|R|, max_i g_i(R))`: a bound on the size of any strategy multiset.
fn cardinality_bound(oracles: &[PolymatroidOracle], n: usize) -> usize {
    oracles.iter().map(|o| o.total().max(0) as usize).max().unwrap_or(0).max(n)
}

fn shifted(d: &DelayTable, c: i64) -> Result<DelayTable> {
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

fn state_from_parts(n: usize, parts: Vec<IntVector>) -> Result<GameState> {
    GameState::new(n, parts)
}

/// Pure Nash equilibrium of a matroid game as a global potential minimizer.
///
/// Base mode first shifts every delay down by `2·K·Δ + 1`, making every
/// unit of load profitable so the minimizer uses bases only. Polymatroid
/// oracles run through the same pipeline but are flagged.
pub fn solve_matroid_nash(inst: &GameInstance) -> Result<PolymatroidSolution> {
    let (oracles, mode) = polymatroid_players(inst)?;
    let n = inst.resources();
    let mut d = inst.delays().clone();
    if mode == PolymatroidMode::Base {
        let c = shift_constant(&d, ShiftMode::Nash, cardinality_bound(&oracles, n), inst.players())?;
        d = shifted(&d, c)?;
    }
    let f: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..=d.max_load()).map(|k| d.cumulative(j, k)).collect())
        .collect();
    let z = greedy_min_separable(&oracles, &f)?;
    let parts = decompose_polymatroid(&oracles, &z)?;
    let state = state_from_parts(n, parts)?;
    state.validate(inst).map_err(|e| Error::Invariant(format!("solver produced an invalid state: {e}")))?;
    Ok(PolymatroidSolution {
        state,
        within_guarantees: oracles.iter().all(PolymatroidOracle::is_matroid),
    })
}

/// Social optimum of a (base) polymatroid game with weakly convex delays:
/// greedy over `γ_j(z) = z·d_j(z)`, then decomposition.
pub fn solve_polymatroid_social(inst: &GameInstance) -> Result<GameState> {
    let (oracles, mode) = polymatroid_players(inst)?;
    let n = inst.resources();
    let mut d = inst.delays().clone();
    if !is_weakly_convex(&d) {
        return precondition("delays are not weakly convex; the social optimum is not computed");
    }
    if mode == PolymatroidMode::Base {
        let c = shift_constant(&d, ShiftMode::Social, cardinality_bound(&oracles, n), inst.players())?;
        d = shifted(&d, c)?;
    }
    // γ_j has first differences d'_j, so convexity of γ_j is weak convexity of d_j.
    transform_social(&d)?;
    let f: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..=d.max_load()).map(|k| k as i64 * d.delay(j, k)).collect())
        .collect();
    let z = greedy_min_separable(&oracles, &f)?;
    let parts = decompose_polymatroid(&oracles, &z)?;
    let state = state_from_parts(n, parts)?;
    state.validate(inst).map_err(|e| Error::Invariant(format!("solver produced an invalid state: {e}")))?;
    Ok(state)
}
