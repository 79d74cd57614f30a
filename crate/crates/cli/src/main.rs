//! normlab: spinor-norm obstruction and norm-principle experiments with
//! machine-readable JSON reports.

use clap::{Args, Parser, Subcommand};
use normlab_core::brauer::{hilbert_symbol_int, ramified_places, Place};
use normlab_core::clifford::lift_similitude_to_omega;
use normlab_core::config::{element_repr, z_repr, RunConfig, SCHEMA_VERSION};
use normlab_core::field::SquareClass;
use normlab_core::linalg::Matrix;
use normlab_core::npharness::{NPDecision, NormHarness, ThetaPoint};
use normlab_core::obstruction::{
    h1_mu4z_finite_field, u_quotient_order, NoWitness, ObstructionContext, SpecialResult,
    SpinorNormDecision,
};
use normlab_core::quadext::QuadExt;
use normlab_core::quadform::Isometry;
use normlab_core::similitude::{random_proper_similitude, PGOPlusClass, Similitude};
use normlab_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "normlab", version, about = "exact spinor-norm workbench")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spinor norm of an isometry, or decide membership of a scalar
    SpinorNorm(CommonArgs),
    /// Lift a proper similitude to the extended Clifford group
    Lift(CommonArgs),
    /// Sample special elements and compute their scalar obstructions
    Obstruction(CommonArgs),
    /// Weak norm principle experiment over an extension
    NpCheck(CommonArgs),
    /// Hilbert symbols and ramified places for integer pairs
    Hilbert(CommonArgs),
    /// H^1(k, mu_4[Z]) with the two-sided enumeration evidence
    H1(CommonArgs),
    /// Stream counterexample candidates of a weak-NP run
    Search(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration file
    #[arg(long)]
    config: PathBuf,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// override the config height bound
    #[arg(long)]
    bound: Option<i64>,
    /// override the config sample count
    #[arg(long)]
    samples: Option<usize>,
    /// include wall-clock timing (breaks byte-identical determinism)
    #[arg(long)]
    timing: bool,
    /// replay: recompute and compare against a previous report
    #[arg(long)]
    verify: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    Invariant(String),
}

/// Core errors raised while interpreting user input are validation
/// failures; the same errors raised mid-computation are bug traps.
fn validation(e: Error) -> Failure {
    Failure::Validation(e.to_string())
}

fn invariant(e: Error) -> Failure {
    Failure::Invariant(e.to_string())
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, args): (&str, &CommonArgs) = match &cli.command {
        Cmd::SpinorNorm(a) => ("spinor-norm", a),
        Cmd::Lift(a) => ("lift", a),
        Cmd::Obstruction(a) => ("obstruction", a),
        Cmd::NpCheck(a) => ("np-check", a),
        Cmd::Hilbert(a) => ("hilbert", a),
        Cmd::H1(a) => ("h1", a),
        Cmd::Search(a) => ("search", a),
    };
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::Validation(format!("cannot read config: {e}")))?;
    let mut cfg = RunConfig::parse(&text).map_err(validation)?;
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(b) = args.bound {
        cfg.bound = Some(b);
    }
    if let Some(n) = args.samples {
        cfg.samples = Some(n);
    }

    let started = Instant::now();
    let results = match name {
        "spinor-norm" => cmd_spinor_norm(&cfg)?,
        "lift" => cmd_lift(&cfg)?,
        "obstruction" => cmd_obstruction(&cfg)?,
        "np-check" => cmd_np_check(&cfg)?,
        "hilbert" => cmd_hilbert(&cfg)?,
        "h1" => cmd_h1(&cfg)?,
        "search" => cmd_search(&cfg)?,
        _ => unreachable!(),
    };

    let mut report = json!({
        "schema": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "command": name,
        "seed": cfg.seed,
        "config": serde_json::to_value(&cfg).unwrap(),
        "results": results,
    });
    if args.timing {
        report["timing_ms"] = json!(started.elapsed().as_millis() as u64);
    }

    if let Some(prev_path) = &args.verify {
        let prev_text = std::fs::read_to_string(prev_path)
            .map_err(|e| Failure::Validation(format!("cannot read report: {e}")))?;
        let prev: Value = serde_json::from_str(&prev_text)
            .map_err(|e| Failure::Validation(format!("report parse error: {e}")))?;
        if prev.get("results") != Some(&report["results"]) {
            return Err(Failure::Invariant(
                "replayed results differ from the recorded report".into(),
            ));
        }
        report["verified"] = json!(true);
    }

    let rendered = serde_json::to_string_pretty(&report).unwrap() + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Failure::Validation(format!("cannot write report: {e}")))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn matrix_repr(m: &Matrix) -> Value {
    let rows: Vec<Value> = (0..m.rows)
        .map(|i| Value::Array((0..m.cols).map(|j| element_repr(m.at(i, j))).collect()))
        .collect();
    Value::Array(rows)
}

fn verdict_repr(v: &SpinorNormDecision) -> Value {
    match v {
        SpinorNormDecision::Yes(certs) => json!({
            "decision": "yes",
            "certificate_vectors": certs
                .iter()
                .map(|v| Value::Array(v.iter().map(element_repr).collect()))
                .collect::<Vec<_>>(),
        }),
        SpinorNormDecision::No(w) => json!({
            "decision": "no",
            "reason": match w {
                NoWitness::DefiniteSign => "definite sign".to_string(),
                NoWitness::LocalPlace(p) => format!("local obstruction at {p}"),
                NoWitness::FiniteExhaustion => "exhausted finite square classes".to_string(),
            },
        }),
        SpinorNormDecision::Unknown => json!({ "decision": "unknown" }),
    }
}

fn default_bound(cfg: &RunConfig) -> i64 {
    cfg.bound.unwrap_or(8)
}

fn cmd_spinor_norm(cfg: &RunConfig) -> Result<Value, Failure> {
    let space = cfg.require_form().map_err(validation)?;
    if let Some(a) = cfg.alpha {
        if a == 0 {
            return Err(Failure::Validation("alpha must be nonzero".into()));
        }
        let alpha = SquareClass::new(&space.field().from_int(a)).map_err(validation)?;
        let verdict =
            normlab_core::obstruction::is_spinor_norm(&space, &alpha, default_bound(cfg))
                .map_err(invariant)?;
        return Ok(json!({
            "alpha": element_repr(alpha.representative()),
            "verdict": verdict_repr(&verdict),
        }));
    }
    let matrix = cfg.require_matrix(&space).map_err(validation)?;
    let g = Isometry::new(space.clone(), matrix).map_err(validation)?;
    let class = g.spinor_norm().map_err(validation)?;
    let vectors = g.cartan_dieudonne();
    Ok(json!({
        "reflections": vectors
            .iter()
            .map(|v| Value::Array(v.iter().map(element_repr).collect()))
            .collect::<Vec<_>>(),
        "spinor_norm": element_repr(class.representative()),
        "trivial": class.is_trivial(),
    }))
}

fn cmd_lift(cfg: &RunConfig) -> Result<Value, Failure> {
    let space = cfg.require_form().map_err(validation)?;
    let matrix = cfg.require_matrix(&space).map_err(validation)?;
    let g = Similitude::new(space.clone(), matrix).map_err(validation)?;
    let g = if g.is_proper().map_err(validation)? {
        g
    } else {
        return Err(Failure::Validation("similitude is improper".into()));
    };
    let omega = lift_similitude_to_omega(&g).map_err(invariant)?;
    let coords = omega.value().z_coordinates().map_err(invariant)?;
    let map_value = if space.dim() % 4 == 2 {
        let (f, z) = omega.mu_star().map_err(invariant)?;
        json!({ "name": "mu_star", "f": element_repr(&f), "z": z_repr(&z) })
    } else {
        let z = omega.mu_bar().map_err(invariant)?;
        json!({ "name": "mu_bar", "z": z_repr(&z) })
    };
    Ok(json!({
        "multiplier": element_repr(g.multiplier()),
        "z_coordinates": coords
            .iter()
            .map(|(mask, z)| json!({ "blade": mask, "value": z_repr(z) }))
            .collect::<Vec<_>>(),
        "map": map_value,
    }))
}

fn cmd_obstruction(cfg: &RunConfig) -> Result<Value, Failure> {
    let space = cfg.require_form().map_err(validation)?;
    let ctx = ObstructionContext::new(space.clone()).map_err(validation)?;
    let bound = default_bound(cfg);
    let mut rows = vec![];
    if cfg.exhaustive.unwrap_or(false) {
        let classes =
            normlab_core::similitude::enumerate_pgo_plus_classes(&space).map_err(validation)?;
        for (idx, class) in classes.iter().enumerate() {
            let theta = ctx.s_of(class).map_err(invariant)?;
            let res = ctx
                .obstruction_alpha(&theta, class.representative(), bound)
                .map_err(invariant)?;
            rows.push(json!({
                "index": idx,
                "alpha": element_repr(res.alpha.representative()),
                "verdict": verdict_repr(&res.verdict),
            }));
        }
    } else {
        let samples = cfg.samples.unwrap_or(20);
        let seed = cfg.seed.unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // twist scalars cycle through small values so alpha varies
        let twists: Vec<i64> = (1..=7).collect();
        for idx in 0..samples {
            let g = random_proper_similitude(&space, &mut rng);
            let class = PGOPlusClass::new(&g).map_err(invariant)?;
            let base = ctx.s_of(&class).map_err(invariant)?;
            let c = space.field().from_int(twists[idx % twists.len()]);
            let c = if c.is_zero() { space.field().one() } else { c };
            let twist = SquareClass::new(&c).map_err(invariant)?;
            let theta = base.mul(&ctx.i_map(&twist).map_err(invariant)?);
            let special = ctx.is_special(&theta, bound).map_err(invariant)?;
            let witness = match special {
                SpecialResult::Special(w) => w,
                SpecialResult::NotSpecial => {
                    return Err(Failure::Invariant(
                        "constructed theta is not special".into(),
                    ))
                }
                SpecialResult::Unknown => {
                    rows.push(json!({ "index": idx, "status": "special-test exhausted" }));
                    continue;
                }
            };
            let res = ctx
                .obstruction_alpha(&theta, &witness, bound)
                .map_err(invariant)?;
            rows.push(json!({
                "index": idx,
                "twist": element_repr(&c),
                "alpha": element_repr(res.alpha.representative()),
                "verdict": verdict_repr(&res.verdict),
            }));
        }
    }
    Ok(Value::Array(rows))
}

fn np_outcome_repr(o: &normlab_core::npharness::SampleOutcome) -> Value {
    let theta = match &o.normed_theta {
        ThetaPoint::Odd(p) => json!({ "f": element_repr(p.f()), "z": z_repr(p.z()) }),
        ThetaPoint::Even(z) => json!({ "z": z_repr(z) }),
    };
    let decision = match &o.decision {
        NPDecision::Yes(cert) => json!({
            "kind": "yes",
            "witness": matrix_repr(cert.witness.matrix()),
            "z_scale": z_repr(&cert.z_scale),
        }),
        NPDecision::No(res) => json!({
            "kind": "no",
            "alpha": element_repr(res.alpha.representative()),
            "verdict": verdict_repr(&res.verdict),
        }),
        NPDecision::Unknown(reason) => json!({ "kind": "unknown", "reason": reason }),
    };
    json!({
        "index": o.index,
        "normed_theta": theta,
        "alpha": o.alpha.as_ref().map(|a| element_repr(a.representative())),
        "decision": decision,
    })
}

fn build_harness(cfg: &RunConfig) -> Result<NormHarness, Failure> {
    let space = cfg.require_form().map_err(validation)?;
    let ext_cfg = cfg
        .extension
        .as_ref()
        .ok_or_else(|| Failure::Validation("missing \"extension\"".into()))?;
    let ext = ext_cfg.build(space.field()).map_err(validation)?;
    NormHarness::new(space, ext).map_err(validation)
}

fn cmd_np_check(cfg: &RunConfig) -> Result<Value, Failure> {
    let harness = build_harness(cfg)?;
    let report = harness
        .weak_np_experiment(
            cfg.samples.unwrap_or(10),
            cfg.seed.unwrap_or(0),
            default_bound(cfg),
        )
        .map_err(invariant)?;
    Ok(json!({
        "map": report.map_name,
        "extension": report.extension,
        "samples": report.samples,
        "yes": report.yes,
        "no": report.no,
        "unknown": report.unknown,
        "outcomes": report.outcomes.iter().map(np_outcome_repr).collect::<Vec<_>>(),
    }))
}

fn cmd_search(cfg: &RunConfig) -> Result<Value, Failure> {
    let harness = build_harness(cfg)?;
    let hits = harness
        .counterexample_search(
            cfg.samples.unwrap_or(10),
            cfg.seed.unwrap_or(0),
            default_bound(cfg),
        )
        .map_err(invariant)?;
    Ok(json!({
        "candidates": hits.iter().map(np_outcome_repr).collect::<Vec<_>>(),
        "count": hits.len(),
    }))
}

fn place_repr(p: &Place) -> Value {
    match p {
        Place::Prime(q) => json!(q),
        Place::Real => json!("real"),
    }
}

fn cmd_hilbert(cfg: &RunConfig) -> Result<Value, Failure> {
    let pairs = cfg
        .pairs
        .as_ref()
        .ok_or_else(|| Failure::Validation("missing \"pairs\"".into()))?;
    let mut rows = vec![];
    for &[a, b] in pairs {
        if a == 0 || b == 0 {
            return Err(Failure::Validation("hilbert pairs must be nonzero".into()));
        }
        let ram = ramified_places(
            &normlab_core::brauer::rat(a),
            &normlab_core::brauer::rat(b),
        )
        .map_err(invariant)?;
        let mut symbols = serde_json::Map::new();
        for place in &ram {
            let s = hilbert_symbol_int(a, b, *place).map_err(invariant)?;
            symbols.insert(place.to_string(), json!(s));
        }
        rows.push(json!({
            "a": a,
            "b": b,
            "split": ram.is_empty(),
            "ramified": ram.iter().map(place_repr).collect::<Vec<_>>(),
            "symbols": symbols,
        }));
    }
    Ok(Value::Array(rows))
}

fn cmd_h1(cfg: &RunConfig) -> Result<Value, Failure> {
    let space = cfg.require_form().map_err(validation)?;
    let h1 = h1_mu4z_finite_field(&space).map_err(validation)?;
    let ext = QuadExt::new(space.field(), &space.disc_scalar()).map_err(validation)?;
    let u_order = u_quotient_order(&ext);
    if h1.order != u_order as u64 {
        return Err(Failure::Invariant(
            "coinvariant order disagrees with |U/U0|".into(),
        ));
    }
    Ok(json!({
        "h1_order": h1.order,
        "invariant_factors": h1.invariant_factors,
        "u_quotient_order": u_order,
        "enumerations_agree": true,
    }))
}
