//! JSON instance and state documents.
//!
//! An instance document has `players`, `resources`, `delays` (one array per
//! resource) and `strategy`: a descriptor shared by all players or a list
//! with one descriptor per player. Descriptors are tagged by `kind`:
//! `tu` (`matrix`, `row_lo`, `row_hi`, `null` meaning infinite),
//! `polymatroid` (`table` indexed by subset bitmask, optional `mode`), or a
//! graph game (`network`, `matching`, `edge_cover`, `stable_set`,
//! `vertex_cover`, `perfect_matching`, `perfect_vertex_cover`) with `nodes`,
//! `edges` and optional per-player `players`.

use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};
use crate::frontends::{bipartite_game, network_game, GraphGameKind, GraphSpec, PlayerSpec};
use crate::model::{DelayTable, GameInstance, GameState, StrategySpace, TuSystem};
use crate::numeric::{IntMatrix, IntVector};
use crate::polymatroid::{PolymatroidMode, PolymatroidOracle};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub players: usize,
    pub resources: usize,
    pub delays: Vec<Vec<i64>>,
    pub strategy: StrategyDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategyDoc {
    Shared(Descriptor),
    PerPlayer(Vec<Descriptor>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodesDoc {
    Count(usize),
    Labels(Vec<String>),
}

impl NodesDoc {
    fn count(&self) -> usize {
        match self {
            NodesDoc::Count(n) => *n,
            NodesDoc::Labels(l) => l.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub nodes: NodesDoc,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub players: Option<Vec<PlayerSpec>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    Tu {
        matrix: Vec<Vec<i64>>,
        row_lo: Vec<Option<i64>>,
        row_hi: Vec<Option<i64>>,
    },
    Polymatroid {
        table: Vec<i64>,
        #[serde(default = "independent")]
        mode: PolymatroidMode,
    },
    Network(GraphDoc),
    Matching(GraphDoc),
    EdgeCover(GraphDoc),
    StableSet(GraphDoc),
    VertexCover(GraphDoc),
    PerfectMatching(GraphDoc),
    PerfectVertexCover(GraphDoc),
}

fn independent() -> PolymatroidMode {
    PolymatroidMode::Independent
}

/// A parsed instance plus advisory messages from graph compilation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedInstance {
    pub instance: GameInstance,
    pub warnings: Vec<String>,
    /// True when the strategies came from a graph descriptor.
    pub from_graph: bool,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Malformed(format!("instance document: {e}"))
}

fn space_from(desc: &Descriptor, resources: usize) -> Result<StrategySpace> {
    match desc {
        Descriptor::Tu { matrix, row_lo, row_hi } => {
            let m = IntMatrix::from_rows(resources, matrix)
                .ok_or_else(|| Error::Malformed(format!("every matrix row needs {resources} entries")))?;
            Ok(StrategySpace::Tu(TuSystem::new(m, row_lo.clone(), row_hi.clone())?))
        }
        Descriptor::Polymatroid { table, mode } => Ok(StrategySpace::Polymatroid {
            oracle: PolymatroidOracle::from_table(resources, table.clone())?,
            mode: *mode,
        }),
        _ => malformed("graph descriptors must be shared by all players"),
    }
}

fn graph_kind(desc: &Descriptor) -> Option<(GraphGameKind, &GraphDoc)> {
    Some(match desc {
        Descriptor::Network(g) => (GraphGameKind::Network, g),
        Descriptor::Matching(g) => (GraphGameKind::Matching, g),
        Descriptor::EdgeCover(g) => (GraphGameKind::EdgeCover, g),
        Descriptor::StableSet(g) => (GraphGameKind::StableSet, g),
        Descriptor::VertexCover(g) => (GraphGameKind::VertexCover, g),
        Descriptor::PerfectMatching(g) => (GraphGameKind::PerfectMatching, g),
        Descriptor::PerfectVertexCover(g) => (GraphGameKind::PerfectVertexCover, g),
        _ => return None,
    })
}

fn compile_graph(kind: GraphGameKind, doc: &GraphDoc, players: usize, d: DelayTable) -> Result<ParsedInstance> {
    let g = GraphSpec::new(doc.nodes.count(), doc.edges.clone(), kind == GraphGameKind::Network)?;
    let specs = match &doc.players {
        Some(p) if p.len() != players => {
            return malformed(format!("graph lists {} players, document has {players}", p.len()));
        }
        Some(p) => p.clone(),
        None if kind == GraphGameKind::Network => return malformed("network players need source and sink"),
        None => vec![
            PlayerSpec::Subgraph {
                subgraph_nodes: (0..g.nodes).collect(),
                subgraph_edges: (0..g.edges.len()).collect(),
            };
            players
        ],
    };
    let compiled = if kind == GraphGameKind::Network {
        let pairs = specs
            .iter()
            .map(|p| match p {
                PlayerSpec::Terminals { source, sink } => Ok((*source, *sink)),
                PlayerSpec::Subgraph { .. } => malformed("network players need source and sink"),
            })
            .collect::<Result<Vec<_>>>()?;
        network_game(&g, &pairs, d)?
    } else {
        let subs = specs
            .iter()
            .map(|p| match p {
                PlayerSpec::Subgraph {
                    subgraph_nodes,
                    subgraph_edges,
                } => Ok((subgraph_nodes.clone(), subgraph_edges.clone())),
                PlayerSpec::Terminals { .. } => malformed("only network players have terminals"),
            })
            .collect::<Result<Vec<_>>>()?;
        bipartite_game(kind, &g, &subs, d)?
    };
    Ok(ParsedInstance {
        instance: compiled.instance,
        warnings: compiled.warnings,
        from_graph: true,
    })
}

pub fn instance_from_doc(doc: &InstanceDoc) -> Result<ParsedInstance> {
    if doc.delays.len() != doc.resources {
        return malformed(format!("{} delay arrays for {} resources", doc.delays.len(), doc.resources));
    }
    let d = DelayTable::new(doc.delays.clone())?;
    let spaces = match &doc.strategy {
        StrategyDoc::Shared(desc) => {
            if let Some((kind, g)) = graph_kind(desc) {
                let parsed = compile_graph(kind, g, doc.players, d)?;
                if parsed.instance.resources() != doc.resources {
                    return malformed(format!(
                        "graph game has {} resources, document declares {}",
                        parsed.instance.resources(),
                        doc.resources
                    ));
                }
                return Ok(parsed);
            }
            vec![space_from(desc, doc.resources)?; doc.players]
        }
        StrategyDoc::PerPlayer(list) => {
            if list.len() != doc.players {
                return malformed(format!("{} descriptors for {} players", list.len(), doc.players));
            }
            list.iter().map(|desc| space_from(desc, doc.resources)).collect::<Result<_>>()?
        }
    };
    Ok(ParsedInstance {
        instance: GameInstance::new(doc.resources, spaces, d)?,
        warnings: Vec::new(),
        from_graph: false,
    })
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    instance_from_doc(&serde_json::from_str(text).map_err(json_error)?)
}

fn descriptor_of(space: &StrategySpace) -> Descriptor {
    match space {
        StrategySpace::Tu(sys) => Descriptor::Tu {
            matrix: sys.matrix().to_rows(),
            row_lo: sys.row_lower().to_vec(),
            row_hi: sys.row_upper().to_vec(),
        },
        StrategySpace::Polymatroid { oracle, mode } => Descriptor::Polymatroid {
            table: oracle.table().to_vec(),
            mode: *mode,
        },
    }
}

pub fn doc_from_instance(inst: &GameInstance) -> InstanceDoc {
    let strategy = if inst.is_symmetric() && inst.players() > 0 {
        StrategyDoc::Shared(descriptor_of(inst.strategy(0)))
    } else {
        StrategyDoc::PerPlayer(inst.strategies().iter().map(descriptor_of).collect())
    };
    InstanceDoc {
        players: inst.players(),
        resources: inst.resources(),
        delays: inst.delays().rows().to_vec(),
        strategy,
    }
}

pub fn render_instance(inst: &GameInstance) -> String {
    serde_json::to_string_pretty(&doc_from_instance(inst)).expect("instance documents always serialize")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub strategies: Vec<IntVector>,
}

pub fn parse_state(text: &str, resources: usize) -> Result<GameState> {
    let doc: StateDoc =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("state document: {e}")))?;
    GameState::new(resources, doc.strategies)
}

pub fn render_state(s: &GameState) -> String {
    serde_json::to_string(&StateDoc {
        strategies: s.strategies().to_vec(),
    })
    .expect("state documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const VC: &str = r#"{
        "players": 2, "resources": 2, "delays": [[1, 3], [1, 3]],
        "strategy": {"kind": "tu", "matrix": [[1, 1]], "row_lo": [1], "row_hi": [null]}
    }"#;

    #[test]
    fn parses_shared_tu() {
        let p = parse_instance(VC).unwrap();
        assert!(p.instance.is_symmetric());
        assert_eq!(p.instance.players(), 2);
        assert_eq!(parse_instance(&render_instance(&p.instance)).unwrap().instance, p.instance);
    }

    #[test]
    fn parses_graph_games() {
        let text = r#"{"players": 2, "resources": 2, "delays": [[1, 3], [1, 3]],
            "strategy": {"kind": "vertex_cover", "nodes": 2, "edges": [[0, 1]]}}"#;
        let p = parse_instance(text).unwrap();
        assert!(p.from_graph);
        assert_eq!(p.instance, parse_instance(VC).unwrap().instance.with_delays(p.instance.delays().clone()).unwrap());

        let net = r#"{"players": 1, "resources": 2, "delays": [[-1], [1]],
            "strategy": {"kind": "network", "nodes": ["r", "m", "s"], "edges": [[0, 1], [1, 2]],
                         "players": [{"source": 0, "sink": 2}]}}"#;
        let p = parse_instance(net).unwrap();
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn parses_polymatroid_players() {
        let text = r#"{"players": 2, "resources": 2, "delays": [[-3, -1], [-2, -2]],
            "strategy": [{"kind": "polymatroid", "table": [0, 1, 1, 1]},
                         {"kind": "polymatroid", "table": [0, 1, 1, 1], "mode": "independent"}]}"#;
        let p = parse_instance(text).unwrap();
        assert!(p.instance.is_symmetric());
        assert_eq!(parse_instance(&render_instance(&p.instance)).unwrap().instance, p.instance);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse_instance("{"), Err(Error::Malformed(_))));
        let frac = VC.replace("[1, 3], [1, 3]", "[1, 3.5], [1, 3]");
        assert!(parse_instance(&frac).is_err());
        let decreasing = VC.replace("[1, 3], [1, 3]", "[3, 1], [1, 3]");
        assert!(parse_instance(&decreasing).is_err());
        let extra = VC.replace("\"players\": 2", "\"players\": 2, \"colour\": 1");
        assert!(parse_instance(&extra).is_err());
    }

    #[test]
    fn states() {
        let s = parse_state(r#"{"strategies": [[1, 0], [0, 1]]}"#, 2).unwrap();
        assert_eq!(s.loads(), &[1, 1]);
        assert_eq!(parse_state(&render_state(&s), 2).unwrap(), s);
        assert!(parse_state(r#"{"strategies": [[1]]}"#, 2).is_err());
    }

    fn tu_space(n: usize) -> impl Strategy<Value = StrategySpace> {
        (0usize..3).prop_flat_map(move |m| {
            (
                proptest::collection::vec(proptest::collection::vec(-1i64..=1, n), m),
                proptest::collection::vec(proptest::option::of(-2i64..=0), m),
                proptest::collection::vec(proptest::option::of(0i64..=2), m),
            )
                .prop_map(move |(rows, lo, hi)| {
                    let matrix = IntMatrix::from_rows(n, &rows).unwrap();
                    StrategySpace::Tu(TuSystem::new(matrix, lo, hi).unwrap())
                })
        })
    }

    fn poly_space(n: usize) -> impl Strategy<Value = StrategySpace> {
        (proptest::collection::vec(0i64..2, n), 0i64..3, any::<bool>()).prop_map(move |(w, cap, base)| {
            let oracle = PolymatroidOracle::from_fn(n, |s| {
                (0..n).filter(|j| s >> j & 1 == 1).map(|j| w[j]).sum::<i64>().min(cap)
            })
            .unwrap();
            let mode = if base { PolymatroidMode::Base } else { PolymatroidMode::Independent };
            StrategySpace::Polymatroid { oracle, mode }
        })
    }

    fn instance() -> impl Strategy<Value = GameInstance> {
        (1usize..4, 1usize..4, any::<bool>(), any::<bool>()).prop_flat_map(|(n, players, poly, shared)| {
            let space = if poly { poly_space(n).boxed() } else { tu_space(n).boxed() };
            let spaces = if shared {
                space.prop_map(move |s| vec![s; players]).boxed()
            } else {
                proptest::collection::vec(space, players).boxed()
            };
            let steps = proptest::collection::vec((-5i64..5, proptest::collection::vec(0i64..3, 2 * players - 1)), n);
            (spaces, steps).prop_map(move |(spaces, steps)| {
                let delays = steps
                    .into_iter()
                    .map(|(first, incs)| {
                        let mut acc = first;
                        std::iter::once(first).chain(incs.into_iter().map(|k| { acc += k; acc })).collect()
                    })
                    .collect();
                GameInstance::new(n, spaces, DelayTable::new(delays).unwrap()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(inst in instance()) {
            prop_assert_eq!(parse_instance(&render_instance(&inst)).unwrap().instance, inst);
        }
    }
}
