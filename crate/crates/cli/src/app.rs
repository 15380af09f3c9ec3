use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use turan_core::constructions::{
    certify, lower_bound_edges, verify_witness, BipartiteHost, WitnessCase, WitnessKind,
};
use turan_core::containment::LinearForestSpec;
use turan_core::family::ForbiddenFamily;
use turan_core::graph6;
use turan_core::invariants::{
    derived_profile, edge_control_number, family_g, family_g_unreduced, family_h,
    family_h_unreduced, Budget, GVariant,
};
use turan_core::oracle::{
    max_edges_free, ExStore, MemoryStore, OracleOptions, DEFAULT_WITNESS_CAP,
};
use turan_core::predictor::{
    classical_formulas, crosscheck_corollaries, predict_kp3, predict_kpl, predict_linear_forest,
    Classical, CrossTarget,
};
use turan_core::{Graph, NamedGraph};

use crate::cache::{resolve_path, JsonlStore};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DOMAIN: u8 = 1;
pub const EXIT_RANGE: u8 = 2;
pub const EXIT_CERTIFICATE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "turan",
    version,
    about = "Turán numbers of a graph together with a linear forest"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cache file; defaults to $TURAN_CACHE, then ./turan-cache.jsonl.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Keep oracle values in memory only.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived invariants of F.
    Invariants {
        /// graph6 code or shorthand such as K4, B2, C5.
        #[arg(long)]
        f: String,
    },
    /// Vertex-deletion families of F.
    Families {
        #[arg(long)]
        f: String,
        /// Also list the families before reduction.
        #[arg(long)]
        unreduced: bool,
    },
    /// Evaluate a closed-form value.
    Predict(PredictArgs),
    /// Build and certify a lower-bound construction.
    Witness(WitnessArgs),
    /// Exhaustive ex(m, family).
    Oracle(OracleArgs),
    /// Check a graph against a family and a claimed edge count.
    Verify(VerifyArgs),
    /// Compare the general formulas with the clique closed forms.
    Crosscheck(CrossArgs),
}

/// Target graph `H`: `--k/--ell` for kP_l or `--forest` for a linear forest.
#[derive(Debug, Clone, Args)]
pub struct TargetArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
    /// Comma-separated path orders, e.g. 4,5 for P4 ∪ P5.
    #[arg(long)]
    pub forest: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassicalArg {
    Eg,
    Kpl,
    Kp3,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long)]
    pub n: u64,
    /// Evaluate a formula without F.
    #[arg(long, value_enum)]
    pub classical: Option<ClassicalArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    H1,
    H2,
    G0,
    Kab,
    Im,
    Km,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub f: Option<String>,
    #[command(flatten)]
    pub target: TargetArgs,
    /// Matching size for `im`; omitted means the largest matching.
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long)]
    pub n: u64,
    /// Only compute the edge count, which allows n above 64.
    #[arg(long)]
    pub count_only: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub m: usize,
    /// Comma-separated members (graph6 or shorthand); empty for no restriction.
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_WITNESS_CAP)]
    pub witness_cap: usize,
    /// Stop after this many search nodes; the result is then partial.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Allow m = 11.
    #[arg(long)]
    pub long_run: bool,
    /// Resumable progress file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// graph6 of the graph to check.
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// Add this linear forest to the family.
    #[arg(long)]
    pub forest: Option<String>,
    #[arg(long)]
    pub claimed: u128,
}

#[derive(Debug, Args)]
pub struct CrossArgs {
    #[arg(long)]
    pub r: Option<usize>,
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    /// Run r = 3..6 against 2P4, 2P5, 3P4, 3P5, 2P3, 3P3, P4∪P5 and P5∪P7.
    #[arg(long)]
    pub grid: bool,
}

/// A finished command: the JSON report and the exit status.
pub struct Outcome {
    pub report: String,
    pub exit: u8,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    command: &'a str,
    tool_version: &'a str,
    inputs: Value,
    ok: bool,
    result: T,
}

fn report<T: Serialize>(
    command: &str,
    inputs: Value,
    ok: bool,
    result: &T,
) -> anyhow::Result<String> {
    let r = Report {
        command,
        tool_version: env!("CARGO_PKG_VERSION"),
        inputs,
        ok,
        result,
    };
    Ok(serde_json::to_string_pretty(&r)?)
}

/// graph6 code or a shorthand name.
pub fn parse_graph(s: &str) -> anyhow::Result<Graph> {
    if let Ok(named) = NamedGraph::parse(s) {
        return Ok(named.build()?);
    }
    graph6::decode_str(s).map_err(|e| anyhow!(e).context(format!("cannot read graph {s:?}")))
}

fn parse_forest(s: &str) -> anyhow::Result<LinearForestSpec> {
    s.parse::<LinearForestSpec>()
        .map_err(|e| anyhow!(e).context(format!("bad forest spec {s:?}")))
}

fn required<T: Copy>(v: Option<T>, name: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| {
        anyhow!(turan_core::Error::InvalidParameters(format!(
            "--{name} is required here"
        )))
    })
}

fn domain(msg: String) -> anyhow::Error {
    anyhow!(turan_core::Error::InvalidParameters(msg))
}

fn host_from(target: &TargetArgs) -> anyhow::Result<BipartiteHost> {
    match &target.forest {
        Some(s) => Ok(BipartiteHost::Forest {
            spec: parse_forest(s)?,
        }),
        None => Ok(BipartiteHost::PathPacking {
            k: required(target.k, "k")?,
            ell: required(target.ell, "ell")?,
        }),
    }
}

fn open_store(cli: &Cli) -> Box<dyn ExStore> {
    if cli.no_cache {
        Box::new(MemoryStore::new())
    } else {
        Box::new(JsonlStore::new(resolve_path(cli.cache.as_deref())))
    }
}

pub fn execute(cli: &Cli) -> anyhow::Result<Outcome> {
    let store = open_store(cli);
    let store = store.as_ref();
    let ok = |report: String| Outcome {
        report,
        exit: EXIT_OK,
    };
    match &cli.command {
        Command::Invariants { f } => {
            let g = parse_graph(f)?;
            let profile = derived_profile(&g)?;
            let control = edge_control_number(&g);
            let result = json!({
                "graph6": graph6::encode(&g),
                "profile": profile,
                "edge_control_sets": control.witnesses,
            });
            Ok(ok(report("invariants", json!({ "f": f }), true, &result)?))
        }
        Command::Families { f, unreduced } => {
            let g = parse_graph(f)?;
            let half = g.order() / 2;
            let mut result = serde_json::Map::new();
            result.insert("g1".into(), json!(family_g(&g, GVariant::One)));
            result.insert("g2".into(), json!(family_g(&g, GVariant::Two)));
            for i in 0..=half {
                result.insert(format!("h{i}"), json!(family_h(&g, Budget::Finite(i))));
            }
            result.insert("h".into(), json!(family_h(&g, Budget::Unbounded)));
            if *unreduced {
                result.insert(
                    "g1_unreduced".into(),
                    json!(family_g_unreduced(&g, GVariant::One)),
                );
                result.insert(
                    "g2_unreduced".into(),
                    json!(family_g_unreduced(&g, GVariant::Two)),
                );
                result.insert(
                    "h_unreduced".into(),
                    json!(family_h_unreduced(&g, Budget::Unbounded)),
                );
            }
            Ok(ok(report(
                "families",
                json!({ "f": f, "unreduced": unreduced }),
                true,
                &result,
            )?))
        }
        Command::Predict(args) => predict(args, store),
        Command::Witness(args) => witness(args, store),
        Command::Oracle(args) => oracle(args, store),
        Command::Verify(args) => {
            let g = parse_graph(&args.graph)?;
            let mut members = args
                .family
                .iter()
                .map(|s| parse_graph(s))
                .collect::<anyhow::Result<Vec<_>>>()?;
            if let Some(spec) = &args.forest {
                members.push(parse_forest(spec)?.graph()?);
            }
            let cert = verify_witness(&g, &ForbiddenFamily::new(members), args.claimed, None);
            let inputs = json!({
                "graph": args.graph, "family": args.family, "forest": args.forest,
                "claimed": args.claimed.to_string(),
            });
            Ok(Outcome {
                report: report("verify", inputs, cert.ok, &cert)?,
                exit: if cert.ok { EXIT_OK } else { EXIT_CERTIFICATE },
            })
        }
        Command::Crosscheck(args) => crosscheck(args, store),
    }
}

fn predict(args: &PredictArgs, store: &dyn ExStore) -> anyhow::Result<Outcome> {
    let t = &args.target;
    let inputs = json!({
        "f": args.f, "k": t.k, "ell": t.ell, "forest": t.forest, "n": args.n,
        "classical": args.classical.map(|c| format!("{c:?}").to_lowercase()),
    });
    let prediction = if let Some(which) = args.classical {
        let which = match which {
            ClassicalArg::Eg => Classical::ErdosGallai {
                ell: required(t.ell, "ell")?,
            },
            ClassicalArg::Kpl => Classical::PathPacking {
                k: required(t.k, "k")?,
                ell: required(t.ell, "ell")?,
            },
            ClassicalArg::Kp3 => Classical::P3Packing {
                k: required(t.k, "k")?,
            },
        };
        classical_formulas(which, args.n)?
    } else {
        let f = parse_graph(
            args.f
                .as_deref()
                .ok_or_else(|| domain("--f is required without --classical".into()))?,
        )?;
        match &t.forest {
            Some(spec) => {
                let spec = parse_forest(spec)?;
                if spec.is_all_p3() && spec.components() >= 2 {
                    predict_kp3(&f, spec.components(), args.n, store)?
                } else {
                    predict_linear_forest(&f, &spec, args.n, store)?
                }
            }
            None => {
                let (k, ell) = (required(t.k, "k")?, required(t.ell, "ell")?);
                if ell == 3 {
                    predict_kp3(&f, k, args.n, store)?
                } else {
                    predict_kpl(&f, k, ell, args.n, store)?
                }
            }
        }
    };
    Ok(Outcome {
        report: report("predict", inputs, true, &prediction)?,
        exit: EXIT_OK,
    })
}

fn witness(args: &WitnessArgs, store: &dyn ExStore) -> anyhow::Result<Outcome> {
    let t = &args.target;
    let kind = match args.kind {
        KindArg::H1 => WitnessKind::H1 {
            host: host_from(t)?,
        },
        KindArg::H2 => WitnessKind::H2 {
            host: host_from(t)?,
        },
        KindArg::G0 => WitnessKind::G0 {
            host: host_from(t)?,
        },
        KindArg::Kab => WitnessKind::CompleteBipartite {
            host: host_from(t)?,
        },
        KindArg::Im => WitnessKind::IndependentMatching {
            k: required(t.k, "k")?,
            i: args.i,
        },
        KindArg::Km => WitnessKind::CliqueMatching {
            k: required(t.k, "k")?,
        },
    };
    let forbidden = args.f.as_deref().map(parse_graph).transpose()?;
    let case = WitnessCase {
        kind,
        forbidden,
        n: args.n,
    };
    let inputs = json!({
        "kind": format!("{:?}", args.kind).to_lowercase(), "f": args.f, "k": t.k, "ell": t.ell,
        "forest": t.forest, "i": args.i, "n": args.n, "count_only": args.count_only,
    });
    if args.count_only {
        let edges = lower_bound_edges(&case, store)?;
        #[derive(Serialize)]
        struct Count<'a> {
            construction: &'a WitnessKind,
            edges: u128,
        }
        let result = Count {
            construction: &case.kind,
            edges,
        };
        return Ok(Outcome {
            report: report("witness", inputs, true, &result)?,
            exit: EXIT_OK,
        });
    }
    let cert = certify(&case, store)?;
    Ok(Outcome {
        report: report("witness", inputs, cert.ok, &cert)?,
        exit: if cert.ok { EXIT_OK } else { EXIT_CERTIFICATE },
    })
}

fn oracle(args: &OracleArgs, store: &dyn ExStore) -> anyhow::Result<Outcome> {
    let members = args
        .family
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| parse_graph(s))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let family = ForbiddenFamily::reduced_from(members);
    let opts = OracleOptions {
        witness_cap: args.witness_cap,
        node_budget: args.budget,
        long_run: args.long_run,
        checkpoint: args.checkpoint.clone(),
    };
    let res = max_edges_free(args.m, &family, &opts)?;
    let inputs = json!({
        "m": args.m, "family": args.family, "witness_cap": args.witness_cap,
        "budget": args.budget, "long_run": args.long_run,
    });
    if res.partial {
        let text = report("oracle", inputs, false, &res)?;
        return Ok(Outcome {
            report: text,
            exit: EXIT_RANGE,
        });
    }
    store
        .put(args.m, &res.family_key, res.ex_value, res.witness_count)
        .context("recording the oracle value")?;
    Ok(Outcome {
        report: report("oracle", inputs, true, &res)?,
        exit: EXIT_OK,
    })
}

fn cross_target(t: &TargetArgs) -> anyhow::Result<CrossTarget> {
    if let Some(spec) = &t.forest {
        return Ok(CrossTarget::Forest {
            spec: parse_forest(spec)?,
        });
    }
    let k = required(t.k, "k")?;
    match required(t.ell, "ell")? {
        3 => Ok(CrossTarget::P3Packing { k }),
        ell => Ok(CrossTarget::PathPacking { k, ell }),
    }
}

fn crosscheck(args: &CrossArgs, store: &dyn ExStore) -> anyhow::Result<Outcome> {
    let mut runs = Vec::new();
    if args.grid {
        let mut targets = Vec::new();
        for k in [2, 3] {
            for ell in [4, 5] {
                targets.push(CrossTarget::PathPacking { k, ell });
            }
            targets.push(CrossTarget::P3Packing { k });
        }
        for spec in ["4,5", "5,7"] {
            targets.push(CrossTarget::Forest {
                spec: parse_forest(spec)?,
            });
        }
        for target in targets {
            for r in 3..=6 {
                runs.push((r, target.clone()));
            }
        }
    } else {
        runs.push((required(args.r, "r")?, cross_target(&args.target)?));
    }
    let reports = runs
        .iter()
        .map(|(r, target)| crosscheck_corollaries(*r, target, args.n, store))
        .collect::<turan_core::Result<Vec<_>>>()?;
    let all_agree = reports.iter().all(|r| r.agree);
    let t = &args.target;
    let inputs = json!({
        "r": args.r, "k": t.k, "ell": t.ell, "forest": t.forest, "n": args.n, "grid": args.grid,
    });
    Ok(Outcome {
        report: report("crosscheck", inputs, all_agree, &reports)?,
        exit: if all_agree { EXIT_OK } else { EXIT_CERTIFICATE },
    })
}

/// Exit status for a failed command.
pub fn error_exit(err: &anyhow::Error) -> u8 {
    match err
        .chain()
        .find_map(|e| e.downcast_ref::<turan_core::Error>())
    {
        Some(e) if e.is_range() => EXIT_RANGE,
        _ => EXIT_DOMAIN,
    }
}

/// Flattens a JSON report into `path: value` lines.
fn table(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, v, out);
                }
            }
            Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), v, out);
                }
            }
            other => out.push_str(&format!("{prefix:<40} {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

fn emit(cli: &Cli, report: &str) -> anyhow::Result<()> {
    let text = match cli.format {
        Format::Json => format!("{report}\n"),
        Format::Table => table(&serde_json::from_str(report)?),
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
        }
    };
    let result = execute(&cli).and_then(|outcome| {
        emit(&cli, &outcome.report)?;
        Ok(outcome.exit)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            error_exit(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_inputs() {
        assert_eq!(parse_graph("K3").unwrap(), Graph::complete(3).unwrap());
        assert_eq!(parse_graph("Bw").unwrap(), Graph::complete(3).unwrap());
        assert!(parse_graph("!!").is_err());
        assert_eq!(error_exit(&parse_graph("~?@@").unwrap_err()), EXIT_RANGE);
        assert_eq!(error_exit(&parse_graph("Bx").unwrap_err()), EXIT_DOMAIN);
        assert_eq!(error_exit(&parse_forest("2,5").unwrap_err()), EXIT_DOMAIN);
    }

    #[test]
    fn table_flattening() {
        let text = table(&json!({"a": {"b": 1}, "c": [{"d": "x"}]}));
        assert!(text.contains("a.b"));
        assert!(text.contains("c[0].d"));
    }
}
