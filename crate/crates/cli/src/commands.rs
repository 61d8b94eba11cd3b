use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};
use tucg::document::{parse_instance, parse_state, render_instance, ParsedInstance};
use tucg::dynamics::{run_dynamics, verify_nash, NashVerdict, Termination};
use tucg::frontends::cardinality_variant;
use tucg::model::{player_cost, potential, social_delay};
use tucg::oracle::{brute_force_all_nash, brute_force_min_potential, brute_force_min_social};
use tucg::polymatroid::{solve_matroid_nash, solve_polymatroid_social};
use tucg::reductions::{generate, ReductionKind, SatInstance};
use tucg::symmetric::{solve_symmetric_nash, solve_symmetric_social};
use tucg::tu::check_instance_tu;
use tucg::{Error, GameInstance, GameState, PolymatroidMode, ShiftMode, StrategySpace};

use crate::Failure;

pub struct Context {
    pub argv: Vec<String>,
    pub quiet: bool,
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ParsedInstance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn load_state(path: &Path, inst: &GameInstance) -> Result<GameState, Failure> {
    let s = parse_state(&read(path)?, inst.resources())?;
    s.validate(inst)?;
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => write(p, &format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn descriptor_name(s: &StrategySpace) -> &'static str {
    match s {
        StrategySpace::Tu(_) => "tu",
        StrategySpace::Polymatroid {
            mode: PolymatroidMode::Independent,
            ..
        } => "polymatroid",
        StrategySpace::Polymatroid {
            mode: PolymatroidMode::Base,
            ..
        } => "polymatroid-base",
    }
}

fn summary(inst: &GameInstance, from_graph: bool) -> Value {
    let mut kinds: Vec<&str> = inst.strategies().iter().map(descriptor_name).collect();
    kinds.dedup();
    json!({
        "players": inst.players(),
        "resources": inst.resources(),
        "symmetric": inst.is_symmetric(),
        "descriptors": kinds,
        "from_graph": from_graph,
    })
}

struct Report {
    fields: Map<String, Value>,
    started: Instant,
}

impl Report {
    fn new(ctx: &Context) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(ctx.argv));
        Report {
            fields,
            started: Instant::now(),
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.fields.insert(key.into(), v);
    }

    fn state(&mut self, inst: &GameInstance, s: &GameState) -> Result<(), Failure> {
        self.set("state", json!(s.strategies()));
        self.set("loads", json!(s.loads()));
        self.set("potential", json!(potential(inst, s)?));
        self.set("social_delay", json!(social_delay(inst, s)?));
        Ok(())
    }

    fn print(mut self, ctx: &Context, headline: impl std::fmt::Display) -> Outcome {
        if ctx.quiet {
            println!("{headline}");
        } else {
            self.set("elapsed_ms", json!(self.started.elapsed().as_millis() as u64));
            println!("{}", serde_json::to_string_pretty(&Value::Object(self.fields)).expect("json values serialize"));
        }
        Ok(())
    }
}

fn verdict_json(v: &NashVerdict) -> Value {
    match v {
        NashVerdict::Nash => json!({"nash": true}),
        NashVerdict::NotNash {
            player,
            better,
            current_cost,
            better_cost,
        } => json!({
            "nash": false,
            "witness": {"player": player, "deviation": better, "current_cost": current_cost, "deviation_cost": better_cost},
        }),
    }
}

fn tu_gate(inst: &GameInstance) -> Outcome {
    for r in check_instance_tu(inst)? {
        if r.totally_unimodular == Some(false) {
            let detail = r
                .violation
                .map(|v| format!(" (rows {:?}, columns {:?}, determinant {})", v.rows, v.cols, v.determinant))
                .unwrap_or_default();
            return Err(Error::Precondition(format!(
                "constraint matrix of player {} is not totally unimodular{detail}",
                r.player
            ))
            .into());
        }
    }
    Ok(())
}

/// `solve-nash` and `solve-social`.
pub fn solve(ctx: &Context, path: &Path, social: bool, mode: Option<ShiftMode>, verify_tu: bool) -> Outcome {
    let mut report = Report::new(ctx);
    let parsed = load(path)?;
    let mut warnings = parsed.warnings;
    let mut inst = parsed.instance;
    if verify_tu {
        tu_gate(&inst)?;
    }
    if let Some(m) = mode {
        let c = cardinality_variant(&inst, m)?;
        warnings.extend(c.warnings);
        inst = c.instance;
    }
    report.set("instance", summary(&inst, parsed.from_graph));

    let all_tu = inst.strategies().iter().all(|s| s.as_tu().is_some());
    let all_poly = inst.strategies().iter().all(|s| s.as_tu().is_none());
    if !all_tu && !all_poly {
        return Err(Error::Precondition("instance mixes TU and polymatroid players".into()).into());
    }
    let (state, guaranteed) = match (social, all_tu) {
        (false, true) => (solve_symmetric_nash(&inst)?, true),
        (false, false) => {
            let sol = solve_matroid_nash(&inst)?;
            if !sol.within_guarantees {
                warnings.push("some oracle is not a matroid rank function: the result is a potential minimizer, not guaranteed to be an equilibrium".into());
            }
            (sol.state, sol.within_guarantees)
        }
        (true, true) => (solve_symmetric_social(&inst)?, true),
        (true, false) => (solve_polymatroid_social(&inst)?, true),
    };
    report.state(&inst, &state)?;

    // Independent checks: a fresh Nash verification or a social re-evaluation.
    let verification = if social {
        let recomputed = GameState::new(inst.resources(), state.strategies().to_vec())?;
        recomputed.validate(&inst)?;
        let value = social_delay(&inst, &recomputed)?;
        let mut v = json!({"check": "social re-evaluation", "feasible": true, "social_delay": value});
        match brute_force_min_social(&inst) {
            Ok((_, best)) => {
                if best != value {
                    return Err(Error::Invariant(format!(
                        "solver social delay {value} differs from the exhaustive minimum {best}"
                    ))
                    .into());
                }
                v["exhaustive_minimum"] = json!(best);
            }
            Err(Error::SizeCap(m)) => v["exhaustive_minimum"] = json!(format!("skipped: {m}")),
            Err(e) => return Err(e.into()),
        }
        v
    } else {
        match verify_nash(&inst, &state) {
            Ok(NashVerdict::NotNash { .. }) if guaranteed => {
                return Err(Error::Invariant("solver output failed Nash verification".into()).into());
            }
            Ok(v) => {
                let mut out = verdict_json(&v);
                out["check"] = json!("verify_nash");
                out
            }
            Err(Error::SizeCap(m)) => json!({"check": "verify_nash", "skipped": m}),
            Err(e) => return Err(e.into()),
        }
    };
    report.set("verification", verification);
    report.set("within_guarantees", json!(guaranteed));
    report.set("warnings", json!(warnings));
    let headline = if social { social_delay(&inst, &state)? } else { potential(&inst, &state)? };
    report.print(ctx, headline)
}

pub fn dynamics(ctx: &Context, path: &Path, state: Option<&Path>, cap: Option<usize>) -> Outcome {
    let mut report = Report::new(ctx);
    let parsed = load(path)?;
    let inst = parsed.instance;
    report.set("instance", summary(&inst, parsed.from_graph));
    let start = state.map(|p| load_state(p, &inst)).transpose()?;
    let (s, trace) = run_dynamics(&inst, start, cap)?;
    report.state(&inst, &s)?;
    report.set("initial_potential", json!(trace.initial_potential));
    report.set("steps", json!(trace.steps.iter().map(|st| json!({
        "player": st.player, "old_cost": st.old_cost, "new_cost": st.new_cost, "potential": st.potential,
    })).collect::<Vec<_>>()));
    report.set(
        "termination",
        json!(match trace.termination {
            Termination::NashReached => "nash",
            Termination::IterationCap => "iteration-cap",
        }),
    );
    let verdict = verify_nash(&inst, &s)?;
    if trace.termination == Termination::NashReached && !verdict.is_nash() {
        return Err(Error::Invariant("dynamics stopped at a state that fails verification".into()).into());
    }
    let mut v = verdict_json(&verdict);
    v["check"] = json!("verify_nash");
    report.set("verification", v);
    report.set("warnings", json!(parsed.warnings));
    let headline = potential(&inst, &s)?;
    report.print(ctx, headline)
}

pub fn verify(ctx: &Context, path: &Path, state: &Path) -> Outcome {
    let mut report = Report::new(ctx);
    let parsed = load(path)?;
    let inst = parsed.instance;
    report.set("instance", summary(&inst, parsed.from_graph));
    let s = load_state(state, &inst)?;
    report.state(&inst, &s)?;
    let costs = (0..inst.players()).map(|i| player_cost(&inst, &s, i)).collect::<tucg::Result<Vec<_>>>()?;
    report.set("player_costs", json!(costs));
    let verdict = verify_nash(&inst, &s)?;
    report.set("verification", verdict_json(&verdict));
    report.print(ctx, if verdict.is_nash() { "yes" } else { "no" })
}

pub fn brute(ctx: &Context, path: &Path, all_nash: bool) -> Outcome {
    let mut report = Report::new(ctx);
    let parsed = load(path)?;
    let inst = parsed.instance;
    report.set("instance", summary(&inst, parsed.from_graph));
    let (sp, vp) = brute_force_min_potential(&inst)?;
    let (ss, vs) = brute_force_min_social(&inst)?;
    report.set("min_potential", json!({"value": vp, "state": sp.strategies()}));
    report.set("min_social_delay", json!({"value": vs, "state": ss.strategies()}));
    if all_nash {
        let eq = brute_force_all_nash(&inst)?;
        report.set(
            "nash_equilibria",
            json!(eq.iter().map(|s| s.strategies().to_vec()).collect::<Vec<_>>()),
        );
    }
    report.print(ctx, format!("{vp} {vs}"))
}

pub fn gen_reduction(
    ctx: &Context,
    formula: &Path,
    kind: ReductionKind,
    out: Option<&Path>,
    map: Option<&Path>,
) -> Outcome {
    let sat: SatInstance = read(formula)?.parse()?;
    let art = generate(kind, &sat)?;
    for w in &art.warnings {
        eprintln!("tucg: warning: {w}");
    }
    let doc = render_instance(&art.instance);
    if let Some(p) = map {
        let players: Vec<Value> = art
            .labels
            .iter()
            .enumerate()
            .map(|(i, [f, t])| json!({"player": i, "variable": i + 1, "false": f, "true": t}))
            .collect();
        let mapping = json!({
            "kind": kind,
            "variables": sat.num_vars,
            "clauses": sat.clauses.len(),
            "nodes": art.node_names,
            "edges": art.graph.edges,
            "players": players,
        });
        write(p, &format!("{}\n", serde_json::to_string_pretty(&mapping).expect("json values serialize")))?;
    }
    match out {
        None => emit(&doc, None),
        Some(p) => {
            emit(&doc, Some(p))?;
            let mut report = Report::new(ctx);
            report.set("instance", summary(&art.instance, true));
            report.set("warnings", json!(art.warnings));
            report.print(ctx, p.display())
        }
    }
}

pub fn check_tu(ctx: &Context, path: &Path) -> Outcome {
    let mut report = Report::new(ctx);
    let parsed = load(path)?;
    let inst = parsed.instance;
    report.set("instance", summary(&inst, parsed.from_graph));
    let players = check_instance_tu(&inst)?;
    let all = players.iter().all(|r| r.totally_unimodular != Some(false));
    report.set("players", serde_json::to_value(&players).expect("reports serialize"));
    report.set("totally_unimodular", json!(all));
    report.print(ctx, if all { "yes" } else { "no" })
}
