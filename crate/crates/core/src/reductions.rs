//! Hard instances built from positive not-all-equal SAT formulas: clause
//! gadgets glued into a ring, one player per variable, and the bijection
//! between the players' two strategies and truth values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{malformed, precondition, Error, Result};
use crate::frontends::{bipartite_game, GraphGameKind, GraphSpec};
use crate::model::{DelayTable, GameInstance, GameState};
use crate::numeric::IntVector;

/// One weighted clause: distinct variables (0-based) plus optional constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SatClause {
    pub weight: i64,
    pub vars: Vec<usize>,
    #[serde(default)]
    pub has_true: bool,
    #[serde(default)]
    pub has_false: bool,
}

impl SatClause {
    /// Not-all-equal over the variables' values and any constants.
    pub fn satisfied(&self, x: &[bool]) -> bool {
        let mut seen_true = self.has_true;
        let mut seen_false = self.has_false;
        for &v in &self.vars {
            if x[v] {
                seen_true = true;
            } else {
                seen_false = true;
            }
        }
        seen_true && seen_false
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SatInstance {
    pub num_vars: usize,
    pub clauses: Vec<SatClause>,
}

impl SatInstance {
    pub fn new(num_vars: usize, clauses: Vec<SatClause>) -> Result<Self> {
        for (k, c) in clauses.iter().enumerate() {
            if c.weight < 1 {
                return malformed(format!("clause {} has weight {} < 1", k + 1, c.weight));
            }
            if c.vars.is_empty() {
                return malformed(format!("clause {} has no variable", k + 1));
            }
            if let Some(&v) = c.vars.iter().find(|&&v| v >= num_vars) {
                return malformed(format!("clause {} uses variable {} of {num_vars}", k + 1, v + 1));
            }
            let mut sorted = c.vars.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return malformed(format!("clause {} repeats a variable", k + 1));
            }
            let constituents = c.vars.len() + usize::from(c.has_true) + usize::from(c.has_false);
            if constituents > 3 {
                return malformed(format!("clause {} has more than three constituents", k + 1));
            }
        }
        Ok(SatInstance { num_vars, clauses })
    }

    /// Clauses containing variable `i`.
    pub fn clauses_of(&self, i: usize) -> Vec<bool> {
        self.clauses.iter().map(|c| c.vars.contains(&i)).collect()
    }
}

impl FromStr for SatInstance {
    type Err = Error;

    /// One clause per line, `w : lit [lit [lit]]`, literals being 1-based
    /// variable indices or `T` / `F`. Blank lines and `#` comments are
    /// skipped; an optional `vars: N` line fixes the variable count.
    fn from_str(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut clauses = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Malformed(format!("line {}: {msg}", ln + 1));
            let (head, body) = line.split_once(':').ok_or_else(|| bad("expected `weight : literals`"))?;
            if head.trim().eq_ignore_ascii_case("vars") {
                declared = Some(body.trim().parse::<usize>().map_err(|_| bad("bad variable count"))?);
                continue;
            }
            let weight = head.trim().parse::<i64>().map_err(|_| bad("bad clause weight"))?;
            let mut clause = SatClause {
                weight,
                vars: Vec::new(),
                has_true: false,
                has_false: false,
            };
            let lits: Vec<&str> = body.split_whitespace().collect();
            if lits.is_empty() || lits.len() > 3 {
                return Err(bad("a clause has one to three literals"));
            }
            for lit in lits {
                match lit {
                    "T" | "t" => clause.has_true = true,
                    "F" | "f" => clause.has_false = true,
                    _ => {
                        let v = lit.parse::<usize>().map_err(|_| bad("bad literal"))?;
                        if v == 0 {
                            return Err(bad("variables are numbered from 1"));
                        }
                        clause.vars.push(v - 1);
                    }
                }
            }
            clauses.push(clause);
        }
        let used = clauses.iter().flat_map(|c| c.vars.iter()).map(|&v| v + 1).max().unwrap_or(0);
        let num_vars = declared.unwrap_or(used);
        SatInstance::new(num_vars, clauses)
    }
}

impl fmt::Display for SatInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.num_vars)?;
        for c in &self.clauses {
            write!(f, "{} :", c.weight)?;
            for v in &c.vars {
                write!(f, " {}", v + 1)?;
            }
            if c.has_true {
                write!(f, " T")?;
            }
            if c.has_false {
                write!(f, " F")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Total weight of the not-all-equal satisfied clauses.
pub fn sat_value(sat: &SatInstance, x: &[bool]) -> Result<i64> {
    if x.len() != sat.num_vars {
        return precondition(format!("assignment has {} values, formula has {} variables", x.len(), sat.num_vars));
    }
    Ok(sat.clauses.iter().filter(|c| c.satisfied(x)).map(|c| c.weight).sum())
}

/// Exhaustive NAE-satisfiability check, for small formulas.
pub fn nae_satisfiable(sat: &SatInstance) -> bool {
    (0..1u64 << sat.num_vars).any(|bits| {
        let x = bits_to_assignment(bits, sat.num_vars);
        sat.clauses.iter().all(|c| c.satisfied(&x))
    })
}

pub fn bits_to_assignment(bits: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    PmNae2sat,
    PvcNae2sat,
    PmNae3satSocial,
}

/// A generated game with its gadget graph and the two labeled strategies of
/// each player: `labels[i][b]` is the strategy mapped to `x_i = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionArtifact {
    pub kind: ReductionKind,
    pub instance: GameInstance,
    pub graph: GraphSpec,
    pub node_names: Vec<String>,
    pub labels: Vec<[IntVector; 2]>,
    pub warnings: Vec<String>,
}

fn check_2sat(sat: &SatInstance) -> Result<()> {
    for (k, c) in sat.clauses.iter().enumerate() {
        if c.vars.len() > 2 {
            return malformed(format!("clause {} has {} variables; this gadget takes one or two", k + 1, c.vars.len()));
        }
        if c.vars.len() == 2 && (c.has_true || c.has_false) {
            return malformed(format!("clause {} mixes two variables and a constant", k + 1));
        }
    }
    if sat.clauses.is_empty() {
        return malformed("formula has no clauses");
    }
    Ok(())
}

/// Delay of a weighted gadget resource: zero when the clause holds the
/// neutralizing constant, else `w` for one variable and `w·(i-1)` for two.
fn weighted_delay(c: &SatClause, zeroed: bool, players: usize) -> Vec<i64> {
    (1..=players as i64)
        .map(|i| {
            if zeroed {
                0
            } else if c.vars.len() == 1 {
                c.weight
            } else {
                c.weight * (i - 1)
            }
        })
        .collect()
}

/// Ring of 4-cycles `u_j, v_j, z_j, v̄_j` with `z_j = u_{j+1}` and
/// `z_n = u_1`. Node ids: `u_j = j`, `v_j = n + j`, `v̄_j = 2n + j`.
/// Edges `4j..4j+4` are `v_j u_j`, `v_j z_j`, `v̄_j u_j`, `v̄_j z_j`.
fn matching_ring(n: usize) -> (GraphSpec, Vec<String>) {
    let mut edges = Vec::with_capacity(4 * n);
    for j in 0..n {
        let (u, z, v, vb) = (j, (j + 1) % n, n + j, 2 * n + j);
        edges.extend([(v, u), (v, z), (vb, u), (vb, z)]);
    }
    let names = (0..n)
        .map(|j| format!("u{}", j + 1))
        .chain((0..n).map(|j| format!("v{}", j + 1)))
        .chain((0..n).map(|j| format!("vbar{}", j + 1)))
        .collect();
    (
        GraphSpec {
            nodes: 3 * n,
            edges,
            directed: false,
        },
        names,
    )
}

fn matching_players(sat: &SatInstance, g: &GraphSpec) -> (Vec<(Vec<usize>, Vec<usize>)>, Vec<[IntVector; 2]>) {
    let n = sat.clauses.len();
    let mut players = Vec::new();
    let mut labels = Vec::new();
    for i in 0..sat.num_vars {
        let member = sat.clauses_of(i);
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.extend((0..n).map(|j| if member[j] { n + j } else { 2 * n + j }));
        let edges = g.induced_edges(&nodes);
        let mut m0 = vec![0; 4 * n];
        let mut m1 = vec![0; 4 * n];
        for j in 0..n {
            let base = 4 * j + if member[j] { 0 } else { 2 };
            m0[base] = 1;
            m1[base + 1] = 1;
        }
        players.push((nodes, edges));
        labels.push([m0, m1]);
    }
    (players, labels)
}

/// Perfect matching game of a positive NAE 2SAT formula. Flipping `x_i`
/// changes the formula value by exactly minus player `i`'s cost change.
pub fn nae2sat_to_pm(sat: &SatInstance) -> Result<ReductionArtifact> {
    check_2sat(sat)?;
    let n = sat.clauses.len();
    let players = sat.num_vars;
    let (g, names) = matching_ring(n);
    let mut delays = Vec::with_capacity(4 * n);
    for c in &sat.clauses {
        delays.push(weighted_delay(c, c.has_true, players));
        delays.push(weighted_delay(c, c.has_false, players));
        delays.push(vec![0; players]);
        delays.push(vec![0; players]);
    }
    let (specs, labels) = matching_players(sat, &g);
    let compiled = bipartite_game(GraphGameKind::PerfectMatching, &g, &specs, DelayTable::new(delays)?)?;
    Ok(ReductionArtifact {
        kind: ReductionKind::PmNae2sat,
        instance: compiled.instance,
        graph: g,
        node_names: names,
        labels,
        warnings: compiled.warnings,
    })
}

/// Perfect vertex cover game of a positive NAE 2SAT formula: a ring of
/// 8-cycles `u_j, s_j, v_j, t_j, z_j, t̄_j, v̄_j, s̄_j` with `z_j = u_{j+1}`.
pub fn nae2sat_to_pvc(sat: &SatInstance) -> Result<ReductionArtifact> {
    check_2sat(sat)?;
    let n = sat.clauses.len();
    let players = sat.num_vars;
    // Node ids: u_j = j, then per clause s, v, t, s̄, v̄, t̄ at n + 6j + k.
    let id = |j: usize, k: usize| n + 6 * j + k;
    let (s, v, t, sb, vb, tb) = (0, 1, 2, 3, 4, 5);
    let mut edges = Vec::with_capacity(8 * n);
    for j in 0..n {
        let (u, z) = (j, (j + 1) % n);
        edges.extend([
            (u, id(j, s)),
            (id(j, s), id(j, v)),
            (id(j, v), id(j, t)),
            (id(j, t), z),
            (z, id(j, tb)),
            (id(j, tb), id(j, vb)),
            (id(j, vb), id(j, sb)),
            (id(j, sb), u),
        ]);
    }
    let g = GraphSpec {
        nodes: 7 * n,
        edges,
        directed: false,
    };
    let mut names: Vec<String> = (0..n).map(|j| format!("u{}", j + 1)).collect();
    for j in 0..n {
        for tag in ["s", "v", "t", "sbar", "vbar", "tbar"] {
            names.push(format!("{tag}{}", j + 1));
        }
    }
    let mut delays = vec![vec![0; players]; 7 * n];
    for (j, c) in sat.clauses.iter().enumerate() {
        delays[id(j, s)] = weighted_delay(c, c.has_true, players);
        delays[id(j, v)] = weighted_delay(c, c.has_false, players);
    }
    let mut specs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..players {
        let member = sat.clauses_of(i);
        let mut nodes: Vec<usize> = (0..n).collect();
        let mut w0 = vec![0; 7 * n];
        let mut w1 = vec![0; 7 * n];
        for j in 0..n {
            let (a, b, c) = if member[j] { (s, v, t) } else { (sb, vb, tb) };
            nodes.extend([id(j, a), id(j, b), id(j, c)]);
            w0[id(j, a)] = 1;
            w0[id(j, c)] = 1;
            w1[j] = 1;
            w1[id(j, b)] = 1;
        }
        let edges = g.induced_edges(&nodes);
        specs.push((nodes, edges));
        labels.push([w0, w1]);
    }
    let compiled = bipartite_game(GraphGameKind::PerfectVertexCover, &g, &specs, DelayTable::new(delays)?)?;
    Ok(ReductionArtifact {
        kind: ReductionKind::PvcNae2sat,
        instance: compiled.instance,
        graph: g,
        node_names: names,
        labels,
        warnings: compiled.warnings,
    })
}

/// Perfect matching game of a positive NAE 3SAT formula whose minimum
/// social delay is zero iff the formula is NAE-satisfiable. The weighted
/// edges get `d(1) = 0`, `d(i) = i - 2`, which is weakly convex.
pub fn nae3sat_to_pm_social(sat: &SatInstance) -> Result<ReductionArtifact> {
    if sat.clauses.is_empty() {
        return malformed("formula has no clauses");
    }
    for (k, c) in sat.clauses.iter().enumerate() {
        if c.vars.len() != 3 || c.has_true || c.has_false {
            return malformed(format!("clause {} must have exactly three distinct variables and no constant", k + 1));
        }
    }
    let n = sat.clauses.len();
    let players = sat.num_vars;
    let (g, names) = matching_ring(n);
    let weighted: Vec<i64> = (1..=players as i64).map(|i| if i == 1 { 0 } else { i - 2 }).collect();
    let mut delays = Vec::with_capacity(4 * n);
    for _ in 0..n {
        delays.push(weighted.clone());
        delays.push(weighted.clone());
        delays.push(vec![0; players]);
        delays.push(vec![0; players]);
    }
    let (specs, labels) = matching_players(sat, &g);
    let compiled = bipartite_game(GraphGameKind::PerfectMatching, &g, &specs, DelayTable::new(delays)?)?;
    let mut warnings = compiled.warnings;
    if sat.clauses.iter().any(|c| c.weight != 1) {
        warnings.push("clause weights are ignored by this construction".to_string());
    }
    Ok(ReductionArtifact {
        kind: ReductionKind::PmNae3satSocial,
        instance: compiled.instance,
        graph: g,
        node_names: names,
        labels,
        warnings,
    })
}

pub fn generate(kind: ReductionKind, sat: &SatInstance) -> Result<ReductionArtifact> {
    match kind {
        ReductionKind::PmNae2sat => nae2sat_to_pm(sat),
        ReductionKind::PvcNae2sat => nae2sat_to_pvc(sat),
        ReductionKind::PmNae3satSocial => nae3sat_to_pm_social(sat),
    }
}

/// The assignment a state encodes; fails on strategies outside the labels.
pub fn map_state_assignment(art: &ReductionArtifact, s: &GameState) -> Result<Vec<bool>> {
    if s.strategies().len() != art.labels.len() {
        return precondition("state and reduction disagree on the player count");
    }
    s.strategies()
        .iter()
        .zip(&art.labels)
        .enumerate()
        .map(|(i, (x, [l0, l1]))| {
            if x == l0 {
                Ok(false)
            } else if x == l1 {
                Ok(true)
            } else {
                precondition(format!("player {} plays an unlabeled strategy", i + 1))
            }
        })
        .collect()
}

/// The state encoding an assignment.
pub fn assignment_to_state(art: &ReductionArtifact, x: &[bool]) -> Result<GameState> {
    if x.len() != art.labels.len() {
        return precondition("assignment and reduction disagree on the variable count");
    }
    let strategies = x.iter().zip(&art.labels).map(|(&b, l)| l[usize::from(b)].clone()).collect();
    GameState::new(art.instance.resources(), strategies)
}
