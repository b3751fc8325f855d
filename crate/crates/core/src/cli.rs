//! Command-line interface.
//!
//! Exit codes: 0 success or valid, 1 invalid or infeasible, 2 usage or
//! parse error, 3 research-grade event.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::constructor::{construct_with, ConstructError, ConstructOptions};
use crate::corpus::{build_corpus, manifest, standard_families, Family};
use crate::cycles::in_class;
use crate::discharging::{audit, Element};
use crate::embedding::Embedding;
use crate::graph::Graph;
use crate::io::{read_file, read_partition, read_pge_file, read_pge_graph_file, write_file, write_partition, write_pge, IoError};
use crate::partition::{verify, ClassSpec, Partition, Witness};
use crate::solver::{solve, Outcome, SolveOptions};
use crate::structure::{find_reducible, poor_faces, terrible_incidences, vertex_profile};
use crate::suite;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESEARCH: u8 = 3;

/// A parsed `--classes` value, e.g. `F2,F` or `D2,I,I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classes(pub Vec<ClassSpec>);

/// Parses a comma list of `F<d>`, `D<d>`, `I` and `F`.
pub fn parse_classes(s: &str) -> Result<Classes, String> {
    let specs = s
        .split(',')
        .map(|item| {
            let item = item.trim();
            let cap = |rest: &str| rest.parse::<usize>().map_err(|_| format!("bad degree in class '{item}'"));
            match item.as_bytes().first() {
                Some(b'I') if item.len() == 1 => Ok(ClassSpec::independent()),
                Some(b'F') if item.len() == 1 => Ok(ClassSpec::any_forest()),
                Some(b'F') => cap(&item[1..]).map(ClassSpec::forest),
                Some(b'D') => cap(&item[1..]).map(ClassSpec::max_degree),
                _ => Err(format!("unknown class '{item}', expected F<d>, D<d>, I or F")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Classes(specs))
}

#[derive(Debug, Parser)]
#[command(name = "pathforest", version, about = "(F2, F)-partitions of planar graphs without 4- and 6-cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Order {
    Standard,
    LargestFirst,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a partition file against class specifications.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long, default_value = "F2,F", value_parser = parse_classes)]
        classes: Classes,
        #[arg(long)]
        json: bool,
    },
    /// Find a partition with the exact solver.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "F2,F", value_parser = parse_classes)]
        classes: Classes,
        /// Search-node budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Write the partition file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Build an (F2, F)-partition by peeling reducible configurations.
    Construct {
        #[arg(long)]
        graph: PathBuf,
        /// Search-node budget for exact-solver fallbacks.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "standard")]
        order: Order,
        /// Write the partition file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the JSON trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the discharging rules and report final charges.
    Audit {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Per-vertex and per-face incidence statistics.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Generate graphs: one PGE on stdout, or a directory with a manifest.
    Gen {
        /// Family such as cycle:7, tree:12:3, dodecahedron, dsub:k4,
        /// random:15:9 or grown:30:2. Repeatable. Defaults to the standard
        /// corpus for --seed.
        #[arg(long)]
        family: Vec<Family>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the acceptance battery over the generated corpus.
    Suite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

/// An error that maps to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl From<IoError> for Usage {
    fn from(e: IoError) -> Self {
        Usage(e.to_string())
    }
}

impl From<std::io::Error> for Usage {
    fn from(e: std::io::Error) -> Self {
        Usage(e.to_string())
    }
}

type CmdResult = Result<u8, Usage>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Verify { graph, partition, classes, json } => cmd_verify(&graph, &partition, &classes.0, json, out),
        Command::Solve { graph, classes, budget, out: path, json } => {
            cmd_solve(&graph, &classes.0, budget, path.as_deref(), json, out)
        }
        Command::Construct { graph, budget, order, out: path, trace, json } => {
            cmd_construct(&graph, budget, order, path.as_deref(), trace.as_deref(), json, out)
        }
        Command::Audit { graph, json } => cmd_audit(&graph, json, out),
        Command::Stats { graph, json } => cmd_stats(&graph, json, out),
        Command::Gen { family, seed, out: dir, json } => cmd_gen(&family, seed, dir.as_deref(), json, out),
        Command::Suite { seed, json } => cmd_suite(seed, json, out),
    }
}

fn load(path: &Path) -> Result<(Graph, Embedding), Usage> {
    Ok(read_pge_file(path)?)
}

/// Loads only the graph; verify and solve accept non-planar rotations.
fn load_graph(path: &Path) -> Result<Graph, Usage> {
    Ok(read_pge_graph_file(path)?)
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Usage> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn spec_names(specs: &[ClassSpec]) -> Vec<String> {
    specs.iter().map(ToString::to_string).collect()
}

fn describe_witness(w: &Witness) -> String {
    match w {
        Witness::Cycle { part, cycle } => {
            let vs: Vec<String> = cycle.iter().map(ToString::to_string).collect();
            format!("cycle in part {part}: {}", vs.join(" "))
        }
        Witness::Degree { part, vertex, degree, cap } => {
            format!("vertex {vertex} has degree {degree} in part {part}, cap {cap}")
        }
    }
}

fn cmd_verify(graph: &Path, partition: &Path, specs: &[ClassSpec], json: bool, out: &mut dyn Write) -> CmdResult {
    let g = load_graph(graph)?;
    let text = read_file(partition)?;
    let parts = read_partition(&text, g.n(), specs.len()).map_err(|e| Usage(format!("{}: {e}", partition.display())))?;
    let p = Partition::new(parts, specs.to_vec()).map_err(|e| Usage(e.to_string()))?;
    let verdict = verify(&g, &p).map_err(|e| Usage(e.to_string()))?;
    if json {
        print_json(out, &json!({ "classes": spec_names(specs), "valid": verdict.valid, "witness": verdict.witness }))?;
    } else if let Some(w) = &verdict.witness {
        writeln!(out, "invalid: {}", describe_witness(w))?;
    } else {
        writeln!(out, "valid")?;
    }
    Ok(if verdict.valid { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_solve(
    graph: &Path,
    specs: &[ClassSpec],
    budget: Option<u64>,
    path: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let g = load_graph(graph)?;
    let options = budget.map_or_else(SolveOptions::default, SolveOptions::with_budget);
    let r = solve(&g, specs, options);
    let parts = r.outcome.partition().map(|p| p.parts().to_vec());
    if let (Some(path), Some(parts)) = (path, &parts) {
        write_file(path, &write_partition(parts))?;
    }
    if json {
        print_json(
            out,
            &json!({
                "classes": spec_names(specs),
                "outcome": r.outcome.label(),
                "partition": parts,
                "nodes": r.stats.nodes,
                "millis": r.stats.millis,
            }),
        )?;
    } else {
        match &parts {
            Some(parts) => write!(out, "# feasible, {} nodes\n{}", r.stats.nodes, write_partition(parts))?,
            None => writeln!(out, "{}", r.outcome.label())?,
        }
    }
    Ok(if matches!(r.outcome, Outcome::Feasible(_)) { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_construct(
    graph: &Path,
    budget: Option<u64>,
    order: Order,
    path: Option<&Path>,
    trace_path: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let (g, e) = load(graph)?;
    let mut options = match order {
        Order::Standard => ConstructOptions::default(),
        Order::LargestFirst => ConstructOptions::largest_first(),
    };
    if let Some(b) = budget {
        options.fallback = SolveOptions::with_budget(b);
    }
    let built = match construct_with(&g, &e, options) {
        Ok(b) => b,
        Err(err) => {
            let label = match err {
                ConstructError::Unpartitionable { .. } => "infeasible",
                ConstructError::BudgetExceeded { .. } => "budget_exceeded",
            };
            if json {
                print_json(out, &json!({ "outcome": label, "error": err.to_string() }))?;
            } else {
                writeln!(out, "{label}: {err}")?;
            }
            return Ok(EXIT_NEGATIVE);
        }
    };
    let t = &built.trace;
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for s in &t.steps {
        *kinds.entry(s.kind.map_or("solver".into(), |k| format!("{k:?}"))).or_default() += 1;
    }
    let trace = json!({
        "outcome": "feasible",
        "in_class": in_class(&g),
        "partition": t.partition,
        "kinds": kinds,
        "fallbacks": t.fallbacks,
        "research_grade": t.research_grade(),
        "telemetry": t.telemetry,
        "steps": t.steps,
    });
    if let Some(p) = path {
        write_file(p, &write_partition(&t.partition))?;
    }
    if let Some(p) = trace_path {
        let text = serde_json::to_string_pretty(&trace).map_err(|e| Usage(e.to_string()))?;
        write_file(p, &(text + "\n"))?;
    }
    if json {
        print_json(out, &trace)?;
    } else {
        let summary: Vec<String> = kinds.iter().map(|(k, c)| format!("{k} {c}")).collect();
        write!(
            out,
            "# constructed: {} steps ({}), {} fallbacks, {} telemetry events\n{}",
            t.steps.len(),
            summary.join(", "),
            t.fallbacks,
            t.telemetry.len(),
            write_partition(&t.partition)
        )?;
    }
    Ok(if t.research_grade() { EXIT_RESEARCH } else { EXIT_OK })
}

fn fmt_charge_sum(c: crate::charge::Charge) -> String {
    c.as_whole().map_or_else(|| c.to_string(), |w| w.to_string())
}

fn cmd_audit(graph: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
    let (g, e) = load(graph)?;
    let report = audit(&g, &e);
    let s = &report.summary;
    if json {
        print_json(out, &report)?;
    } else {
        let mut text = report.to_tsv();
        writeln!(text).unwrap();
        writeln!(text, "components = {}", s.components).unwrap();
        writeln!(text, "in_class = {}", s.in_class).unwrap();
        writeln!(text, "sum_initial = {}", fmt_charge_sum(s.sum_initial)).unwrap();
        writeln!(text, "sum = {}", fmt_charge_sum(s.sum_final)).unwrap();
        writeln!(text, "conservation = {}", if s.conservation { "ok" } else { "FAILED" }).unwrap();
        match &s.cross_check {
            Ok(()) => writeln!(text, "cross_check = ok").unwrap(),
            Err(m) => writeln!(text, "cross_check = FAILED: {m}").unwrap(),
        }
        writeln!(text, "negatives = {}", s.negatives.len()).unwrap();
        for n in &s.negatives {
            let what = match n.element {
                Element::Vertex(v) => format!("vertex {v}"),
                Element::Face(f) => format!("face {f}"),
            };
            let near = n.nearest.as_ref().map_or("no configuration".into(), |c| {
                format!("nearest {:?} at {} (distance {})", c.kind, c.anchor, c.distance)
            });
            writeln!(text, "negative {what}: {}, {near}", n.mu_star).unwrap();
        }
        out.write_all(text.as_bytes())?;
    }
    Ok(if s.conservation && s.cross_check.is_ok() { EXIT_OK } else { EXIT_RESEARCH })
}

#[derive(Serialize)]
struct VertexStats {
    id: usize,
    degree: usize,
    n3: usize,
    n5: usize,
    m3: usize,
    m5: usize,
    terrible: usize,
}

#[derive(Serialize)]
struct FaceStats {
    id: usize,
    degree: usize,
    poor: bool,
}

fn cmd_stats(graph: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
    let (g, e) = load(graph)?;
    let vertices: Vec<VertexStats> = (0..g.n())
        .map(|v| {
            let p = vertex_profile(&g, &e, v);
            let terrible = terrible_incidences(&g, &e, v);
            VertexStats { id: v, degree: g.degree(v), n3: p.n3, n5: p.n5, m3: p.m3, m5: p.m5, terrible }
        })
        .collect();
    let poor = poor_faces(&g, &e);
    let faces: Vec<FaceStats> =
        e.faces().iter().map(|f| FaceStats { id: f.id, degree: f.degree, poor: poor[f.id] }).collect();
    if json {
        print_json(
            out,
            &json!({
                "n": g.n(),
                "m": g.m(),
                "in_class": in_class(&g),
                "configuration": find_reducible(&g, &e),
                "vertices": vertices,
                "faces": faces,
            }),
        )?;
    } else {
        let mut text = String::from("element\tkind\tdegree\tn3\tn5\tm3\tm5\tterrible\tpoor\n");
        for v in &vertices {
            writeln!(text, "{}\tvertex\t{}\t{}\t{}\t{}\t{}\t{}\t-", v.id, v.degree, v.n3, v.n5, v.m3, v.m5, v.terrible)
                .unwrap();
        }
        for f in &faces {
            writeln!(text, "{}\tface\t{}\t-\t-\t-\t-\t-\t{}", f.id, f.degree, u8::from(f.poor)).unwrap();
        }
        out.write_all(text.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn cmd_gen(families: &[Family], seed: u64, dir: Option<&Path>, json: bool, out: &mut dyn Write) -> CmdResult {
    let families = if families.is_empty() { standard_families(seed) } else { families.to_vec() };
    let corpus = build_corpus(&families).map_err(|e| Usage(e.to_string()))?;
    let Some(dir) = dir else {
        let [entry] = corpus.as_slice() else {
            return Err(Usage("--out is required unless exactly one --family is given".into()));
        };
        let pge = write_pge(&entry.graph, &entry.embedding);
        if json {
            print_json(out, &json!({ "family": entry.family, "n": entry.graph.n(), "m": entry.graph.m(), "pge": pge }))?;
        } else {
            out.write_all(pge.as_bytes())?;
        }
        return Ok(EXIT_OK);
    };
    std::fs::create_dir_all(dir).map_err(|e| Usage(format!("{}: {e}", dir.display())))?;
    let m = manifest(seed, &corpus);
    for (entry, c) in m.entries.iter().zip(&corpus) {
        write_file(&dir.join(&entry.file), &write_pge(&c.graph, &c.embedding))?;
    }
    let text = serde_json::to_string_pretty(&m).map_err(|e| Usage(e.to_string()))?;
    write_file(&dir.join("manifest.json"), &(text + "\n"))?;
    if json {
        print_json(out, &m)?;
    } else {
        writeln!(out, "wrote {} graphs and manifest.json to {}", corpus.len(), dir.display())?;
    }
    Ok(EXIT_OK)
}

fn cmd_suite(seed: u64, json: bool, out: &mut dyn Write) -> CmdResult {
    let results = suite::run(seed).map_err(|e| Usage(e.to_string()))?;
    let failed = results.iter().filter(|r| !r.passed).count();
    if json {
        print_json(out, &json!({ "seed": seed, "passed": results.len() - failed, "failed": failed, "criteria": results }))?;
    } else {
        for r in &results {
            writeln!(out, "{}", r.line())?;
        }
        writeln!(out, "{} passed, {failed} failed", results.len() - failed)?;
    }
    Ok(if results.iter().any(|r| !r.passed && r.research_grade) {
        EXIT_RESEARCH
    } else if failed > 0 {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    })
}
