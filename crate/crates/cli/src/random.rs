//! Seeded random instance documents for test corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tucg::document::render_instance;
use tucg::frontends::{matching_game, network_game, GraphSpec};
use tucg::{DelayTable, Error, GameInstance, IntMatrix, PolymatroidMode, PolymatroidOracle, StrategySpace, TuSystem};

use crate::Family;

fn delays(rng: &mut ChaCha8Rng, n: usize, len: usize) -> tucg::Result<DelayTable> {
    let rows = (0..n)
        .map(|_| {
            let mut v: Vec<i64> = (0..len).map(|_| rng.gen_range(-5..=5)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    DelayTable::new(rows)
}

fn interval_space(rng: &mut ChaCha8Rng, n: usize) -> tucg::Result<StrategySpace> {
    let m = rng.gen_range(1..=3);
    let mut rows = Vec::with_capacity(m);
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for _ in 0..m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(a..n);
        rows.push((0..n).map(|j| i64::from(j >= a && j <= b)).collect());
        let l = rng.gen_range(0..=1);
        lo.push(Some(l));
        hi.push(if rng.gen_bool(0.5) { None } else { Some(l + rng.gen_range(0..=1)) });
    }
    let matrix = IntMatrix::from_rows(n, &rows).ok_or_else(|| Error::Invariant("row width".into()))?;
    Ok(StrategySpace::Tu(TuSystem::new(matrix, lo, hi)?))
}

/// A DAG with a spanning chain from node 0 so every sink is reachable.
fn random_dag(rng: &mut ChaCha8Rng, edges: usize) -> tucg::Result<GraphSpec> {
    let nodes = (edges / 2 + 1).clamp(2, edges + 1);
    let mut list: Vec<(usize, usize)> = (0..nodes - 1).map(|k| (k, k + 1)).collect();
    while list.len() < edges {
        let a = rng.gen_range(0..nodes - 1);
        let b = rng.gen_range(a + 1..nodes);
        list.push((a, b));
    }
    GraphSpec::new(nodes, list, true)
}

fn random_bipartite(rng: &mut ChaCha8Rng, edges: usize) -> tucg::Result<GraphSpec> {
    let left = edges.div_ceil(2);
    let right = edges / 2 + 1;
    let list = (0..edges)
        .map(|_| (rng.gen_range(0..left), left + rng.gen_range(0..right)))
        .collect();
    GraphSpec::new(left + right, list, false)
}

pub fn generate(seed: u64, family: Family, players: usize, n: usize, asymmetric: bool) -> tucg::Result<String> {
    if n == 0 {
        return Err(Error::Precondition("at least one resource is needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spaces = if asymmetric { players } else { players.min(1) };
    let inst = match family {
        Family::Interval => {
            let list = (0..spaces).map(|_| interval_space(&mut rng, n)).collect::<tucg::Result<Vec<_>>>()?;
            let d = delays(&mut rng, n, players.max(1))?;
            GameInstance::new(n, (0..players).map(|i| list[i.min(spaces - 1)].clone()).collect(), d)?
        }
        Family::Digraph => {
            let g = random_dag(&mut rng, n)?;
            let shared = (0, rng.gen_range(1..g.nodes));
            let pairs: Vec<(usize, usize)> = (0..players)
                .map(|_| if asymmetric { (0, rng.gen_range(1..g.nodes)) } else { shared })
                .collect();
            let d = delays(&mut rng, n, players.max(1))?;
            network_game(&g, &pairs, d)?.instance
        }
        Family::Bipartite => {
            let g = random_bipartite(&mut rng, n)?;
            let all = ((0..g.nodes).collect::<Vec<_>>(), (0..n).collect::<Vec<_>>());
            let d = delays(&mut rng, n, players.max(1))?;
            matching_game(&g, &vec![all; players], d)?.instance
        }
        Family::Matroid => {
            let ks: Vec<usize> = (0..spaces).map(|_| rng.gen_range(1..=n)).collect();
            let list = ks
                .iter()
                .map(|&k| {
                    Ok(StrategySpace::Polymatroid {
                        oracle: PolymatroidOracle::uniform_matroid(n, k)?,
                        mode: PolymatroidMode::Independent,
                    })
                })
                .collect::<tucg::Result<Vec<_>>>()?;
            let d = delays(&mut rng, n, players.max(1))?;
            GameInstance::new(n, (0..players).map(|i| list[i.min(spaces - 1)].clone()).collect(), d)?
        }
    };
    Ok(render_instance(&inst))
}
