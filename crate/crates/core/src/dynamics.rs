//! Exact best responses, round-robin best-response dynamics and Nash
//! verification.

use serde::Serialize;

use crate::error::{invariant, precondition, Error, Result};
use crate::lp::{find_vertex, solve_lp, LpOutcome};
use crate::model::{potential_of_loads, GameInstance, GameState, StrategySpace};
use crate::numeric::{is_integral, to_int_vector, ExactField, IntVector, Rational};
use crate::oracle::{deviation_cost, enumerate_player_points};
use crate::polymatroid::{greedy_min_separable, PolymatroidMode};

/// A cheapest strategy for player `i` against the others' loads, with its cost.
///
/// For TU players this is a vertex of the LP with costs `d_j(t_j^{-i} + 1)`;
/// polymatroid players are enumerated.
pub fn cheapest_response(inst: &GameInstance, s: &GameState, i: usize) -> Result<(IntVector, i64)> {
    let others = s.loads_without(i);
    let d = inst.delays();
    match inst.strategy(i) {
        StrategySpace::Tu(sys) => {
            let costs: Vec<Rational> = (0..inst.resources())
                .map(|j| Rational::from_int(d.delay(j, (others[j] + 1) as usize)))
                .collect();
            match solve_lp(&sys.relaxation(costs))? {
                LpOutcome::Optimal { solution, .. } => {
                    if !is_integral(&solution) {
                        return invariant(format!(
                            "best-response LP of player {i} has a fractional vertex; its system is not TU"
                        ));
                    }
                    let y = to_int_vector(&solution)
                        .ok_or_else(|| Error::Invariant("best-response vertex out of range".into()))?;
                    let c = deviation_cost(d, &others, &y);
                    Ok((y, c))
                }
                LpOutcome::Infeasible => Err(Error::Infeasible(format!("player {i} has no strategy"))),
                LpOutcome::Unbounded => invariant("best-response LP over the unit box reported unbounded"),
            }
        }
        StrategySpace::Polymatroid { oracle, mode } => {
            let mut best: Option<(IntVector, i64)> = None;
            for y in enumerate_player_points(oracle, *mode)? {
                let c = deviation_cost(d, &others, &y);
                if best.as_ref().is_none_or(|(_, b)| c < *b) {
                    best = Some((y, c));
                }
            }
            best.ok_or_else(|| Error::Infeasible(format!("player {i} has no strategy")))
        }
    }
}

/// A strictly improving best response of player `i`, or `None` if the
/// current strategy is already a best response.
pub fn best_response(inst: &GameInstance, s: &GameState, i: usize) -> Result<Option<IntVector>> {
    if i >= inst.players() {
        return precondition(format!("player index {i} out of range"));
    }
    s.validate(inst)?;
    let current = deviation_cost(inst.delays(), &s.loads_without(i), s.strategy(i));
    let (y, c) = cheapest_response(inst, s, i)?;
    Ok((c < current).then_some(y))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamicsStep {
    pub player: usize,
    pub old_cost: i64,
    pub new_cost: i64,
    pub potential: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    NashReached,
    IterationCap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamicsTrace {
    pub initial_potential: i64,
    pub steps: Vec<DynamicsStep>,
    pub termination: Termination,
}

impl DynamicsTrace {
    /// One line per step, for display.
    pub fn render(&self) -> String {
        let mut out = format!("start potential {}\n", self.initial_potential);
        for (k, st) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "step {}: player {} cost {} -> {}, potential {}\n",
                k + 1,
                st.player,
                st.old_cost,
                st.new_cost,
                st.potential
            ));
        }
        out.push_str(match self.termination {
            Termination::NashReached => "nash reached\n",
            Termination::IterationCap => "iteration cap reached\n",
        });
        out
    }
}

/// A feasible starting state: a vertex of each TU polytope, the empty set
/// for independent-set polymatroid players and a greedy base otherwise.
pub fn initial_state(inst: &GameInstance) -> Result<GameState> {
    let n = inst.resources();
    let mut xs = Vec::with_capacity(inst.players());
    for (i, space) in inst.strategies().iter().enumerate() {
        let x = match space {
            StrategySpace::Tu(sys) => match find_vertex(&sys.relaxation::<Rational>(vec![Rational::from_int(0); n]))? {
                LpOutcome::Optimal { solution, .. } if is_integral(&solution) => to_int_vector(&solution)
                    .ok_or_else(|| Error::Invariant("starting vertex out of range".into()))?,
                LpOutcome::Optimal { .. } => {
                    return invariant(format!("starting vertex of player {i} is fractional"));
                }
                _ => return Err(Error::Infeasible(format!("player {i} has no strategy"))),
            },
            StrategySpace::Polymatroid { oracle, mode } => match mode {
                PolymatroidMode::Independent => vec![0; n],
                PolymatroidMode::Base => {
                    let f: Vec<Vec<i64>> = (0..n)
                        .map(|j| (0..=oracle.value(1 << j)).map(|k| -k).collect())
                        .collect();
                    greedy_min_separable(std::slice::from_ref(oracle), &f)?
                }
            },
        };
        xs.push(x);
    }
    GameState::new(n, xs)
}

/// Whether every strategy in play is a 0/1 vector, in which case the
/// potential is exact and each step must lower it by the cost improvement.
fn exact_potential(inst: &GameInstance) -> bool {
    inst.strategies().iter().all(|s| match s {
        StrategySpace::Tu(_) => true,
        StrategySpace::Polymatroid { oracle, .. } => oracle.is_matroid(),
    })
}

/// Round-robin best-response dynamics. After a move by player `p`, the scan
/// resumes at `p + 1`; the run ends when a full sweep finds no improving
/// player, or after `cap` moves.
pub fn run_dynamics(
    inst: &GameInstance,
    initial: Option<GameState>,
    cap: Option<usize>,
) -> Result<(GameState, DynamicsTrace)> {
    let mut s = match initial {
        Some(s) => {
            s.validate(inst)?;
            s
        }
        None => initial_state(inst)?,
    };
    let d = inst.delays();
    let exact = exact_potential(inst);
    let mut phi = potential_of_loads(d, s.loads());
    let initial_potential = phi;
    let mut steps = Vec::new();
    let players = inst.players();
    let mut start = 0;
    loop {
        let mut mover = None;
        for k in 0..players {
            let p = (start + k) % players;
            let current = deviation_cost(d, &s.loads_without(p), s.strategy(p));
            let (y, c) = cheapest_response(inst, &s, p)?;
            if c < current {
                mover = Some((p, y, current, c));
                break;
            }
        }
        let Some((p, y, old_cost, new_cost)) = mover else {
            return Ok((
                s,
                DynamicsTrace {
                    initial_potential,
                    steps,
                    termination: Termination::NashReached,
                },
            ));
        };
        if cap.is_some_and(|c| steps.len() >= c) {
            return Ok((
                s,
                DynamicsTrace {
                    initial_potential,
                    steps,
                    termination: Termination::IterationCap,
                },
            ));
        }
        s = s.with_strategy(p, y);
        let next = potential_of_loads(d, s.loads());
        if exact && phi - next != old_cost - new_cost {
            return invariant("potential drop differs from the deviator's cost improvement");
        }
        phi = next;
        steps.push(DynamicsStep {
            player: p,
            old_cost,
            new_cost,
            potential: phi,
        });
        start = (p + 1) % players;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NashVerdict {
    Nash,
    NotNash {
        player: usize,
        better: IntVector,
        current_cost: i64,
        better_cost: i64,
    },
}

impl NashVerdict {
    pub fn is_nash(&self) -> bool {
        matches!(self, NashVerdict::Nash)
    }
}

/// Checks every player for an improving deviation; the first one found is
/// returned as a witness.
pub fn verify_nash(inst: &GameInstance, s: &GameState) -> Result<NashVerdict> {
    s.validate(inst)?;
    for i in 0..inst.players() {
        let others = s.loads_without(i);
        let current = deviation_cost(inst.delays(), &others, s.strategy(i));
        let (y, c) = cheapest_response(inst, s, i)?;
        if c < current {
            return Ok(NashVerdict::NotNash {
                player: i,
                better: y,
                current_cost: current,
                better_cost: c,
            });
        }
    }
    Ok(NashVerdict::Nash)
}
