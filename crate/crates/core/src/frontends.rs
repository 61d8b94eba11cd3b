//! Compile graph games into TU strategy systems: network (flow) games on
//! digraphs, and matching, edge cover, stable set and vertex cover games
//! (plus their perfect variants) on bipartite graphs.

use serde::{Deserialize, Serialize};

use crate::error::{malformed, precondition, Result};
use crate::model::{shift_constant, shift_delays, DelayTable, GameInstance, ShiftMode, StrategySpace, TuSystem};
use crate::numeric::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphGameKind {
    Network,
    Matching,
    EdgeCover,
    StableSet,
    VertexCover,
    PerfectMatching,
    PerfectVertexCover,
}

impl GraphGameKind {
    /// True when the resources are edges (false: nodes).
    pub fn edge_resources(self) -> bool {
        matches!(
            self,
            GraphGameKind::Network | GraphGameKind::Matching | GraphGameKind::EdgeCover | GraphGameKind::PerfectMatching
        )
    }
}

/// A graph with `nodes` vertices and an edge list; parallel edges allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphSpec {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub directed: bool,
}

/// The part of the graph a player may use, or a network player's terminals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlayerSpec {
    Terminals { source: usize, sink: usize },
    Subgraph { subgraph_nodes: Vec<usize>, subgraph_edges: Vec<usize> },
}

impl GraphSpec {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>, directed: bool) -> Result<Self> {
        let g = GraphSpec { nodes, edges, directed };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if a >= self.nodes || b >= self.nodes {
                return malformed(format!("edge {e} has an endpoint outside 0..{}", self.nodes));
            }
        }
        Ok(())
    }

    /// A 2-coloring of the nodes, or `None` if the graph has an odd cycle.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut color: Vec<Option<u8>> = vec![None; self.nodes];
        for root in 0..self.nodes {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(0);
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                let c = color[v].unwrap_or(0);
                for &w in &adj[v] {
                    match color[w] {
                        None => {
                            color[w] = Some(1 - c);
                            stack.push(w);
                        }
                        Some(cw) if cw == c => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap_or(0)).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Edges with both endpoints in `nodes`.
    pub fn induced_edges(&self, nodes: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.nodes];
        for &v in nodes {
            inside[v] = true;
        }
        (0..self.edges.len())
            .filter(|&e| inside[self.edges[e].0] && inside[self.edges[e].1])
            .collect()
    }
}

/// A compiled game plus advisory messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub instance: GameInstance,
    pub warnings: Vec<String>,
}

fn pin_outside(m: &mut IntMatrix, lo: &mut Vec<Option<i64>>, hi: &mut Vec<Option<i64>>, allowed: &[bool]) {
    for (j, &ok) in allowed.iter().enumerate() {
        if !ok {
            let mut row = vec![0; allowed.len()];
            row[j] = 1;
            m.push_row(&row);
            lo.push(Some(0));
            hi.push(Some(0));
        }
    }
}

fn row_bounds(kind: GraphGameKind) -> (Option<i64>, Option<i64>) {
    match kind {
        GraphGameKind::Matching | GraphGameKind::StableSet => (None, Some(1)),
        GraphGameKind::EdgeCover | GraphGameKind::VertexCover => (Some(1), None),
        GraphGameKind::PerfectMatching | GraphGameKind::PerfectVertexCover => (Some(1), Some(1)),
        GraphGameKind::Network => (Some(0), Some(0)),
    }
}

fn subgraph_system(g: &GraphSpec, kind: GraphGameKind, nodes: &[usize], edges: &[usize]) -> Result<TuSystem> {
    let mut node_in = vec![false; g.nodes];
    for &v in nodes {
        if v >= g.nodes {
            return malformed(format!("subgraph node {v} does not exist"));
        }
        node_in[v] = true;
    }
    let mut edge_in = vec![false; g.edges.len()];
    for &e in edges {
        let Some(&(a, b)) = g.edges.get(e) else {
            return malformed(format!("subgraph edge {e} does not exist"));
        };
        if !node_in[a] || !node_in[b] {
            return malformed(format!("subgraph edge {e} has an endpoint outside the subgraph"));
        }
        edge_in[e] = true;
    }
    let (lo, hi) = row_bounds(kind);
    let n = if kind.edge_resources() { g.edges.len() } else { g.nodes };
    let mut m = IntMatrix::zeros(0, n);
    let mut row_lo = Vec::new();
    let mut row_hi = Vec::new();
    if kind.edge_resources() {
        // One row per subgraph node over its incident subgraph edges.
        for v in (0..g.nodes).filter(|&v| node_in[v]) {
            let mut row = vec![0; n];
            for (e, &(a, b)) in g.edges.iter().enumerate() {
                if edge_in[e] && (a == v || b == v) {
                    row[e] = 1;
                }
            }
            m.push_row(&row);
            row_lo.push(lo);
            row_hi.push(hi);
        }
        pin_outside(&mut m, &mut row_lo, &mut row_hi, &edge_in);
    } else {
        // One row per subgraph edge over its two endpoints.
        for (e, &(a, b)) in g.edges.iter().enumerate() {
            if edge_in[e] {
                let mut row = vec![0; n];
                row[a] = 1;
                row[b] = 1;
                m.push_row(&row);
                row_lo.push(lo);
                row_hi.push(hi);
            }
        }
        pin_outside(&mut m, &mut row_lo, &mut row_hi, &node_in);
    }
    TuSystem::new(m, row_lo, row_hi)
}

/// Node-arc incidence system `A x = b` with `b = -1` at the source and `+1`
/// at the sink; `A` has `+1` where an arc enters a node and `-1` where it
/// leaves.
pub fn network_system(g: &GraphSpec, source: usize, sink: usize) -> Result<TuSystem> {
    if source >= g.nodes || sink >= g.nodes {
        return malformed(format!("terminal pair ({source}, {sink}) refers to a missing node"));
    }
    let mut m = IntMatrix::zeros(g.nodes, g.edges.len());
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if a != b {
            m.set(a, e, -1);
            m.set(b, e, 1);
        }
    }
    let mut rhs = vec![0i64; g.nodes];
    if source != sink {
        rhs[source] = -1;
        rhs[sink] = 1;
    }
    let bounds: Vec<Option<i64>> = rhs.into_iter().map(Some).collect();
    TuSystem::new(m, bounds.clone(), bounds)
}

/// Network game on a digraph; players route from their source to their sink.
pub fn network_game(g: &GraphSpec, pairs: &[(usize, usize)], d: DelayTable) -> Result<Compiled> {
    g.validate()?;
    if !g.directed {
        return precondition("network games need a directed graph");
    }
    if g.edges.iter().any(|&(a, b)| a == b) {
        return malformed("network graph has a self-loop");
    }
    let strategies = pairs
        .iter()
        .map(|&(r, s)| network_system(g, r, s).map(StrategySpace::Tu))
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    if d.rows().iter().flatten().any(|&v| v < 0) {
        warnings.push(
            "negative arc delays: optimal flows may contain circuits that are not part of any source-sink path"
                .to_string(),
        );
    }
    Ok(Compiled {
        instance: GameInstance::new(g.edges.len(), strategies, d)?,
        warnings,
    })
}

/// Any of the bipartite graph games, one subgraph per player.
pub fn bipartite_game(
    kind: GraphGameKind,
    g: &GraphSpec,
    players: &[(Vec<usize>, Vec<usize>)],
    d: DelayTable,
) -> Result<Compiled> {
    g.validate()?;
    if kind == GraphGameKind::Network {
        return precondition("use network_game for network games");
    }
    if !g.is_bipartite() {
        return precondition("graph is not bipartite; the game would not be totally unimodular");
    }
    let strategies = players
        .iter()
        .map(|(nodes, edges)| subgraph_system(g, kind, nodes, edges).map(StrategySpace::Tu))
        .collect::<Result<Vec<_>>>()?;
    let n = if kind.edge_resources() { g.edges.len() } else { g.nodes };
    Ok(Compiled {
        instance: GameInstance::new(n, strategies, d)?,
        warnings: Vec::new(),
    })
}

fn whole_graph(g: &GraphSpec, players: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    vec![((0..g.nodes).collect(), (0..g.edges.len()).collect()); players]
}

/// Symmetric game with every player on the whole graph.
pub fn symmetric_bipartite_game(kind: GraphGameKind, g: &GraphSpec, players: usize, d: DelayTable) -> Result<Compiled> {
    bipartite_game(kind, g, &whole_graph(g, players), d)
}

pub fn matching_game(g: &GraphSpec, players: &[(Vec<usize>, Vec<usize>)], d: DelayTable) -> Result<Compiled> {
    bipartite_game(GraphGameKind::Matching, g, players, d)
}

pub fn edge_cover_game(g: &GraphSpec, players: &[(Vec<usize>, Vec<usize>)], d: DelayTable) -> Result<Compiled> {
    bipartite_game(GraphGameKind::EdgeCover, g, players, d)
}

pub fn stable_set_game(g: &GraphSpec, players: &[(Vec<usize>, Vec<usize>)], d: DelayTable) -> Result<Compiled> {
    bipartite_game(GraphGameKind::StableSet, g, players, d)
}

pub fn vertex_cover_game(g: &GraphSpec, players: &[(Vec<usize>, Vec<usize>)], d: DelayTable) -> Result<Compiled> {
    bipartite_game(GraphGameKind::VertexCover, g, players, d)
}

pub fn perfect_matching_game(g: &GraphSpec, players: &[(Vec<usize>, Vec<usize>)], d: DelayTable) -> Result<Compiled> {
    bipartite_game(GraphGameKind::PerfectMatching, g, players, d)
}

pub fn perfect_vertex_cover_game(
    g: &GraphSpec,
    players: &[(Vec<usize>, Vec<usize>)],
    d: DelayTable,
) -> Result<Compiled> {
    bipartite_game(GraphGameKind::PerfectVertexCover, g, players, d)
}

/// Maximum-cardinality variant: same strategy systems, delays shifted down
/// so that every maximum-cardinality strategy beats every smaller one.
pub fn cardinality_variant(inst: &GameInstance, mode: ShiftMode) -> Result<Compiled> {
    let r = inst.resources();
    let c = shift_constant(inst.delays(), mode, r, inst.players())?;
    let shifted = inst.with_delays(shift_delays(inst.delays(), mode, r, inst.players())?)?;
    let note = match mode {
        ShiftMode::Nash => format!(
            "delays shifted by -{c}; equilibria of this game are equilibria of the maximum-cardinality game"
        ),
        ShiftMode::Social => format!(
            "delays shifted by -{c}; social optima of this game are social optima of the maximum-cardinality game"
        ),
    };
    Ok(Compiled {
        instance: shifted,
        warnings: vec![note],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_strategies;
    use crate::symmetric::solve_symmetric_nash;
    use crate::model::potential;
    use crate::tu::is_totally_unimodular;

    fn strategies(c: &Compiled, i: usize) -> Vec<Vec<i64>> {
        enumerate_strategies(c.instance.strategy(i).as_tu().unwrap()).unwrap()
    }

    fn edge() -> GraphSpec {
        GraphSpec::new(2, vec![(0, 1)], false).unwrap()
    }

    #[test]
    fn network_examples() {
        let arc = GraphSpec::new(2, vec![(0, 1)], true).unwrap();
        let c = network_game(&arc, &[(0, 1)], DelayTable::uniform(1, &[1]).unwrap()).unwrap();
        assert_eq!(strategies(&c, 0), vec![vec![1]]);

        // r=0, m=1, m'=2, s=3: arcs r->m, m->s, r->m', m'->s.
        let g = GraphSpec::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3)], true).unwrap();
        let c = network_game(&g, &[(0, 3), (0, 3)], DelayTable::uniform(4, &[1, 3]).unwrap()).unwrap();
        assert!(c.instance.is_symmetric());
        let s = solve_symmetric_nash(&c.instance).unwrap();
        assert_eq!(s.loads(), &[1, 1, 1, 1]);
        assert_eq!(potential(&c.instance, &s).unwrap(), 4);

        let c = network_game(&g, &[(2, 2)], DelayTable::uniform(4, &[1]).unwrap()).unwrap();
        assert!(strategies(&c, 0).contains(&vec![0, 0, 0, 0]));

        assert!(network_game(&edge(), &[(0, 1)], DelayTable::uniform(1, &[1]).unwrap()).is_err());
        let neg = network_game(&g, &[(0, 3)], DelayTable::uniform(4, &[-1]).unwrap()).unwrap();
        assert_eq!(neg.warnings.len(), 1);
    }

    #[test]
    fn matching_and_cover_examples() {
        let d = DelayTable::uniform(1, &[1]).unwrap();
        let m = symmetric_bipartite_game(GraphGameKind::Matching, &edge(), 1, d.clone()).unwrap();
        assert_eq!(strategies(&m, 0), vec![vec![0], vec![1]]);
        let ec = symmetric_bipartite_game(GraphGameKind::EdgeCover, &edge(), 1, d).unwrap();
        assert_eq!(strategies(&ec, 0), vec![vec![1]]);

        let path = GraphSpec::new(3, vec![(0, 1), (1, 2)], false).unwrap();
        let c = symmetric_bipartite_game(GraphGameKind::Matching, &path, 2, DelayTable::uniform(2, &[-3, -1]).unwrap())
            .unwrap();
        assert_eq!(strategies(&c, 0), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        let s = solve_symmetric_nash(&c.instance).unwrap();
        assert_eq!(potential(&c.instance, &s).unwrap(), -6);
    }

    #[test]
    fn node_games() {
        let vc = symmetric_bipartite_game(GraphGameKind::VertexCover, &edge(), 2, DelayTable::uniform(2, &[1, 3]).unwrap())
            .unwrap();
        assert_eq!(solve_symmetric_nash(&vc.instance).unwrap().loads(), &[1, 1]);
        let lone = GraphSpec::new(1, vec![], false).unwrap();
        let ss = symmetric_bipartite_game(GraphGameKind::StableSet, &lone, 1, DelayTable::uniform(1, &[1]).unwrap())
            .unwrap();
        assert_eq!(strategies(&ss, 0), vec![vec![0], vec![1]]);
        let tri = GraphSpec::new(3, vec![(0, 1), (1, 2), (2, 0)], false).unwrap();
        let err = symmetric_bipartite_game(GraphGameKind::StableSet, &tri, 1, DelayTable::uniform(3, &[1]).unwrap());
        assert!(err.is_err());
    }

    #[test]
    fn subgraphs_pin_other_resources() {
        let path = GraphSpec::new(3, vec![(0, 1), (1, 2)], false).unwrap();
        let c = matching_game(&path, &[(vec![0, 1], vec![0])], DelayTable::uniform(2, &[1]).unwrap()).unwrap();
        assert_eq!(strategies(&c, 0), vec![vec![0, 0], vec![1, 0]]);
        assert!(matching_game(&path, &[(vec![0], vec![0])], DelayTable::uniform(2, &[1]).unwrap()).is_err());
    }

    #[test]
    fn compiled_systems_are_tu() {
        let g = GraphSpec::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (0, 1)], false).unwrap();
        for kind in [
            GraphGameKind::Matching,
            GraphGameKind::EdgeCover,
            GraphGameKind::StableSet,
            GraphGameKind::VertexCover,
            GraphGameKind::PerfectMatching,
            GraphGameKind::PerfectVertexCover,
        ] {
            let n = if kind.edge_resources() { 6 } else { 5 };
            let c = symmetric_bipartite_game(kind, &g, 1, DelayTable::uniform(n, &[0]).unwrap()).unwrap();
            assert!(is_totally_unimodular(c.instance.strategy(0).as_tu().unwrap().matrix()).unwrap());
        }
    }

    #[test]
    fn cardinality_shift() {
        let m = symmetric_bipartite_game(GraphGameKind::Matching, &edge(), 2, DelayTable::uniform(1, &[2, 5]).unwrap())
            .unwrap();
        let nash = cardinality_variant(&m.instance, ShiftMode::Nash).unwrap();
        assert_eq!(nash.instance.delays().resource(0), &[-9, -6]);
        let social = cardinality_variant(&m.instance, ShiftMode::Social).unwrap();
        assert_eq!(social.instance.delays().resource(0), &[-19, -16]);

        let one = symmetric_bipartite_game(GraphGameKind::Matching, &edge(), 1, DelayTable::uniform(1, &[1, 3]).unwrap())
            .unwrap();
        let shifted = cardinality_variant(&one.instance, ShiftMode::Nash).unwrap();
        assert_eq!(shifted.instance.delays().resource(0), &[-6, -4]);
        assert_eq!(solve_symmetric_nash(&shifted.instance).unwrap().loads(), &[1]);
    }
}
