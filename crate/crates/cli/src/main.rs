use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use degenform::exactcones::{ConeError, IntVec};
use degenform::formula::{self, FormulaError, Insertion, InvariantProvider, Synthetic, TableProvider};
use degenform::graphs::{
    automorphism_count, edge_orderings, enumerate_graphs, inverse_aut_sum, multiplicity_data, DecoratedGraph,
    GraphError, OrderedGraph,
};
use degenform::rational::{self, Rat};
use degenform::target::{TargetError, TargetModel};
use degenform::tropical::{
    basic_dual_cone, gluing_degree, glue_halves, split_cones, splitting_rays, verify_split_facet, CurveGraph,
    TropicalError,
};
use degenform::verify;

#[derive(Parser)]
#[command(name = "degenform", version, about = "Exact degeneration-formula combinatorics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(clap::Args)]
struct GraphType {
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 0)]
    genus: u32,
    #[arg(long, default_value_t = 0)]
    markings: u32,
    /// Curve class as comma-separated coordinates, e.g. `1,1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Vec<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// List the bipartite graphs of a type with their edge orderings.
    Enumerate(GraphType),
    /// Report splitting rays and facet witnesses of a curve graph.
    Split { curve: PathBuf },
    /// Glue a side-1 and a side-2 half along their half-edges.
    Glue { half1: PathBuf, half2: PathBuf },
    /// Evaluate the degeneration formula.
    Evaluate {
        #[command(flatten)]
        ty: GraphType,
        /// Invariant table.
        #[arg(long, conflicts_with = "synthetic")]
        table: Option<PathBuf>,
        /// Closed-form provider: `constant:P/Q`, `multiplicative` or `random:SEED`.
        #[arg(long)]
        synthetic: Option<String>,
        /// `M:CLASS` for an insertion `τ_M(CLASS)`; repeat once per marking.
        #[arg(long = "insertion")]
        insertions: Vec<String>,
        /// Table of known left-hand-side values to compare against.
        #[arg(long)]
        both_sides: Option<PathBuf>,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        size: usize,
    },
}

enum Failure {
    Check(String),
    Input(String),
    Cap(String),
    Unresolved(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Unresolved(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Input(m) | Failure::Cap(m) | Failure::Unresolved(m) => m,
        }
    }
}

impl From<TargetError> for Failure {
    fn from(e: TargetError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::TooLarge(m) => Failure::Cap(m),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<TropicalError> for Failure {
    fn from(e: TropicalError) -> Self {
        match e {
            TropicalError::Cone(ConeError::InstanceTooLarge(m)) => Failure::Cap(m),
            TropicalError::Graph(g) => g.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<FormulaError> for Failure {
    fn from(e: FormulaError) -> Self {
        match e {
            FormulaError::Unresolved(_) => Failure::Unresolved(e.to_string()),
            FormulaError::Graph(g) => g.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

type Out = Result<String, (String, Failure)>;

fn r(x: &Rat) -> String {
    rational::format(x)
}

fn ints(v: &[num_bigint::BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_target(path: &Path) -> Result<TargetModel, Failure> {
    let t = TargetModel::from_json(&read(path)?)?;
    Ok(t)
}

/// Compact rendering of nested JSON arrays without string quotes.
fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(plain).collect::<Vec<_>>().join(", ")),
        v => v.to_string(),
    }
}

fn records(lines: &[Value]) -> String {
    lines.iter().map(|v| format!("{v}\n")).collect()
}

fn check_type(t: &TargetModel, ty: &GraphType) -> Result<(), Failure> {
    if ty.beta.len() != t.class_rank {
        return Err(Failure::Input(format!(
            "--beta needs {} coordinates, got {}",
            t.class_rank,
            ty.beta.len()
        )));
    }
    Ok(())
}

fn ordered_record(og: &OrderedGraph) -> Value {
    let m = multiplicity_data(og);
    json!({
        "edges": og.graph.edges.iter().map(|e| json!([e.ends[0], e.ends[1], e.weight])).collect::<Vec<_>>(),
        "l": m.l.to_string(),
        "cycle_coeff": r(&m.cycle_coeff),
        "numeric_coeff": r(&m.numeric_coeff),
        "deg_phi": r(&m.deg_phi),
        "deg_f": r(&m.deg_f),
    })
}

fn enumerate(ty: &GraphType, format: Format) -> Result<String, Failure> {
    let t = load_target(&ty.target)?;
    check_type(&t, ty)?;
    let graphs: Vec<DecoratedGraph> = enumerate_graphs(&t, ty.genus, ty.markings, &ty.beta)?;
    let mut ordered = Vec::with_capacity(graphs.len());
    for g in &graphs {
        ordered.push(edge_orderings(g)?);
    }
    let total: usize = ordered.iter().map(Vec::len).sum();
    let aut_sum = inverse_aut_sum(&graphs);
    let mut out = String::new();
    match format {
        Format::Human => {
            writeln!(
                out,
                "type g={} n={} beta={:?}: {} graphs, {} edge-ordered graphs, sum 1/|Aut| = {}",
                ty.genus,
                ty.markings,
                ty.beta,
                graphs.len(),
                total,
                r(&aut_sum)
            )
            .unwrap();
            for (i, (g, os)) in graphs.iter().zip(&ordered).enumerate() {
                let m = multiplicity_data(&os[0]);
                writeln!(
                    out,
                    "[{}] {g}\n    |Aut| = {}, l = {}, orderings = {}",
                    i + 1,
                    automorphism_count(g),
                    m.l,
                    os.len()
                )
                .unwrap();
                for (j, og) in os.iter().enumerate() {
                    let m = multiplicity_data(og);
                    writeln!(
                        out,
                        "    ({}.{}) {}\n          coeff {}  cycle {}  deg_phi {}  deg_F {}",
                        i + 1,
                        j + 1,
                        og.graph,
                        r(&m.numeric_coeff),
                        r(&m.cycle_coeff),
                        r(&m.deg_phi),
                        r(&m.deg_f)
                    )
                    .unwrap();
                }
            }
        }
        Format::Records => {
            let mut lines = Vec::new();
            for (i, (g, os)) in graphs.iter().zip(&ordered).enumerate() {
                lines.push(json!({
                    "kind": "graph",
                    "index": i + 1,
                    "graph": serde_json::from_str::<Value>(&g.to_json()).expect("json"),
                    "aut": automorphism_count(g).to_string(),
                    "orderings": os.iter().map(ordered_record).collect::<Vec<_>>(),
                }));
            }
            lines.push(json!({
                "kind": "summary",
                "graphs": graphs.len(),
                "ordered_graphs": total,
                "inverse_aut_sum": r(&aut_sum),
            }));
            out = records(&lines);
        }
    }
    Ok(out)
}

fn load_curve(path: &Path) -> Result<CurveGraph, Failure> {
    Ok(CurveGraph::from_json(&read(path)?)?)
}

fn matrix(m: &[IntVec]) -> Vec<Vec<String>> {
    m.iter().map(|row| ints(row)).collect()
}

fn split(path: &Path, format: Format) -> Out {
    let cg = load_curve(path).map_err(|f| (String::new(), f))?;
    let run = || -> Result<(Vec<Value>, Option<String>), Failure> {
        let b = basic_dual_cone(&cg);
        let mut reports = Vec::new();
        let mut missing = None;
        for (i, ray) in splitting_rays(&b)?.into_iter().enumerate() {
            let s = split_cones(&cg, &ray.ray)?;
            let w = verify_split_facet(&cg, &ray.ray)?;
            if !w.found() && missing.is_none() {
                missing = Some(format!("no facet witness for ray {}", i + 1));
            }
            let sides: Vec<Value> = s
                .sides
                .iter()
                .map(|sc| {
                    json!({
                        "side": sc.side.number(),
                        "vertices": sc.vertices,
                        "rank": sc.cone.ambient_rank(),
                        "dim": sc.cone.dim(),
                        "generators": matrix(&sc.cone.generators()),
                    })
                })
                .collect();
            reports.push(json!({
                "ray": ints(&ray.ray),
                "l": ray.l.to_string(),
                "lengths": ints(&ray.lengths),
                "positions": ints(&s.curve.positions),
                "splitting_nodes": ray.splitting_nodes,
                "sides": sides,
                "witness": w.matrix.as_ref().map(|m| matrix(m)),
            }));
        }
        Ok((reports, missing))
    };
    let (reports, missing) = run().map_err(|f| (String::new(), f))?;
    let out = match format {
        Format::Records => records(&reports),
        Format::Human => {
            let mut out = format!("{} splitting rays\n", reports.len());
            for (i, rep) in reports.iter().enumerate() {
                writeln!(
                    out,
                    "ray {}: {} (l = {})\n  edge lengths {}\n  positions {}\n  splitting nodes {}",
                    i + 1,
                    plain(&rep["ray"]),
                    plain(&rep["l"]),
                    plain(&rep["lengths"]),
                    plain(&rep["positions"]),
                    plain(&rep["splitting_nodes"])
                )
                .unwrap();
                for s in rep["sides"].as_array().into_iter().flatten() {
                    writeln!(
                        out,
                        "  side {}: vertices {}, cone of dim {} in rank {}, generators {}",
                        s["side"],
                        plain(&s["vertices"]),
                        s["dim"],
                        s["rank"],
                        plain(&s["generators"])
                    )
                    .unwrap();
                }
                match &rep["witness"] {
                    Value::Null => writeln!(out, "  facet witness: none").unwrap(),
                    m => writeln!(out, "  facet witness: {}", plain(m)).unwrap(),
                }
            }
            out
        }
    };
    match missing {
        Some(m) => Err((out, Failure::Cap(m))),
        None => Ok(out),
    }
}

fn glue(p1: &Path, p2: &Path, format: Format) -> Result<String, Failure> {
    let h1 = load_curve(p1)?;
    let h2 = load_curve(p2)?;
    let g = glue_halves(&h1, &h2)?;
    let mut weights: Vec<(usize, u32)> = h1.half_edges.iter().map(|h| (h.label, h.weight)).collect();
    weights.sort_unstable();
    let ws: Vec<u32> = weights.iter().map(|&(_, w)| w).collect();
    let degree = gluing_degree(&ws);
    Ok(match format {
        Format::Records => records(&[json!({
            "curve": serde_json::from_str::<Value>(&g.curve.to_json()).expect("json"),
            "rho": ints(&g.rho),
            "l": g.l.to_string(),
            "gluing_degree": r(&degree),
        })]),
        Format::Human => format!(
            "glued curve: {}\nrho: [{}]\nl: {}\ngluing degree: {}\n",
            g.curve.to_json(),
            ints(&g.rho).join(", "),
            g.l,
            r(&degree)
        ),
    })
}

fn provider(
    t: &TargetModel,
    table: Option<&Path>,
    synthetic: Option<&str>,
) -> Result<Box<dyn InvariantProvider>, Failure> {
    match (table, synthetic) {
        (Some(p), _) => Ok(Box::new(TableProvider::load(p, t)?)),
        (None, Some(s)) => {
            let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
            let bad = |m: String| Failure::Input(format!("--synthetic {s:?}: {m}"));
            Ok(Box::new(match kind {
                "constant" => Synthetic::Constant(rational::parse(arg).map_err(bad)?),
                "multiplicative" => Synthetic::Multiplicative,
                "random" => Synthetic::RandomMultilinear {
                    seed: arg.parse().map_err(|e| bad(format!("{e}")))?,
                    reference: None,
                },
                _ => return Err(bad("unknown kind".into())),
            }))
        }
        (None, None) => Err(Failure::Input("evaluate needs --table or --synthetic".into())),
    }
}

fn parse_insertion(t: &TargetModel, text: &str) -> Result<Insertion, Failure> {
    let (psi, class) = match text.split_once(':') {
        Some((m, c)) => (
            m.trim()
                .parse()
                .map_err(|e| Failure::Input(format!("insertion {text:?}: {e}")))?,
            c,
        ),
        None => (0, text),
    };
    Ok(Insertion {
        psi,
        class: TargetModel::parse_class(&t.x_cohomology, class)?,
    })
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct LhsDoc {
    schema: String,
    records: Vec<LhsRecord>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct LhsRecord {
    genus: u32,
    beta: Vec<i64>,
    #[serde(default)]
    insertions: Vec<String>,
    value: String,
}

const LHS_SCHEMA: &str = "degenform/lhs/v1";

fn lookup_lhs(path: &Path, t: &TargetModel, ty: &GraphType, ins: &[Insertion]) -> Result<Option<Rat>, Failure> {
    let doc: LhsDoc = serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if doc.schema != LHS_SCHEMA {
        return Err(Failure::Input(format!("unsupported schema {:?}, expected {LHS_SCHEMA:?}", doc.schema)));
    }
    for rec in doc.records {
        if rec.genus != ty.genus || rec.beta != ty.beta || rec.insertions.len() != ins.len() {
            continue;
        }
        let parsed = rec
            .insertions
            .iter()
            .map(|s| parse_insertion(t, s))
            .collect::<Result<Vec<_>, _>>()?;
        if parsed == ins {
            return Ok(Some(rational::parse(&rec.value).map_err(Failure::Input)?));
        }
    }
    Ok(None)
}

fn evaluate(
    ty: &GraphType,
    table: Option<&Path>,
    synthetic: Option<&str>,
    insertion_text: &[String],
    both_sides: Option<&Path>,
    format: Format,
) -> Out {
    let plain = |f: Failure| (String::new(), f);
    let t = load_target(&ty.target).map_err(plain)?;
    check_type(&t, ty).map_err(plain)?;
    let p = provider(&t, table, synthetic).map_err(plain)?;
    let ins = insertion_text
        .iter()
        .map(|s| parse_insertion(&t, s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(plain)?;
    let e = formula::evaluate(&t, ty.genus, ty.markings, &ty.beta, &ins, p.as_ref()).map_err(|e| plain(e.into()))?;
    let lhs = match both_sides {
        Some(path) => Some(lookup_lhs(path, &t, ty, &ins).map_err(plain)?),
        None => None,
    };
    let mut out = String::new();
    match format {
        Format::Human => {
            writeln!(out, "total: {}", r(&e.total)).unwrap();
            for (i, term) in e.terms.iter().enumerate() {
                writeln!(
                    out,
                    "  [{}] {}  coeff {}  term {}",
                    i + 1,
                    term.graph.graph,
                    r(&term.coefficient),
                    r(&term.value)
                )
                .unwrap();
            }
        }
        Format::Records => {
            let mut lines: Vec<Value> = e
                .terms
                .iter()
                .map(|term| {
                    json!({
                        "kind": "term",
                        "graph": serde_json::from_str::<Value>(&term.graph.graph.to_json()).expect("json"),
                        "coefficient": r(&term.coefficient),
                        "value": r(&term.value),
                    })
                })
                .collect();
            lines.push(json!({"kind": "total", "value": r(&e.total)}));
            out = records(&lines);
        }
    }
    if let Some(lhs) = lhs {
        let verdict = match &lhs {
            None => "lhs: not in table".to_string(),
            Some(v) if *v == e.total => format!("lhs: {} (agrees)", r(v)),
            Some(v) => format!("lhs: {} (DISAGREES)", r(v)),
        };
        match format {
            Format::Human => writeln!(out, "{verdict}").unwrap(),
            Format::Records => {
                out.push_str(&records(&[json!({
                    "kind": "lhs",
                    "value": lhs.as_ref().map(r),
                    "agrees": lhs.as_ref().map(|v| *v == e.total),
                })]));
            }
        }
        if matches!(&lhs, Some(v) if *v != e.total) {
            return Err((out, Failure::Check("left- and right-hand sides disagree".into())));
        }
    }
    Ok(out)
}

fn verify_cmd(suite: &str, seed: u64, size: usize, format: Format) -> Out {
    let Some(rep) = verify::run_suite(suite, seed, size) else {
        return Err((
            String::new(),
            Failure::Input(format!("unknown suite {suite:?}; known: {}", verify::SUITES.join(", "))),
        ));
    };
    let out = match format {
        Format::Human => format!("{rep}\n"),
        Format::Records => records(&[json!({
            "suite": rep.suite,
            "seed": rep.seed,
            "checked": rep.checked,
            "passed": rep.passed(),
            "failures": rep.failures,
            "capped": rep.capped,
        })]),
    };
    if !rep.failures.is_empty() {
        Err((out, Failure::Check(format!("suite {suite} failed"))))
    } else if !rep.capped.is_empty() {
        Err((out, Failure::Cap(format!("suite {suite} hit a search cap"))))
    } else {
        Ok(out)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let f = cli.format;
    let plain = |res: Result<String, Failure>| res.map_err(|e| (String::new(), e));
    let result = match &cli.command {
        Command::Enumerate(ty) => plain(enumerate(ty, f)),
        Command::Split { curve } => split(curve, f),
        Command::Glue { half1, half2 } => plain(glue(half1, half2, f)),
        Command::Evaluate {
            ty,
            table,
            synthetic,
            insertions,
            both_sides,
        } => evaluate(
            ty,
            table.as_deref(),
            synthetic.as_deref(),
            insertions,
            both_sides.as_deref(),
            f,
        ),
        Command::Verify { suite, seed, size } => verify_cmd(suite, *seed, *size, f),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, failure)) => {
            print!("{out}");
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
