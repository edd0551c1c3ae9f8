//! Command-line front end. Every command prints one JSON report on
//! standard output and a short summary on standard error.
//!
//! Exit codes: 0 when the property holds or a witness is found, 1 when it
//! is refuted or the search is exhausted, 2 on malformed input.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::amalgamation::{amalgamate, free_amalgam, ordered_amalgam};
use crate::classes::{check_amalgamation, check_hereditary, check_jep, check_reasonable, ClassCheck, ClassSpec};
use crate::doc::read_structure;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::flows::{
    check_torder_equivalence, fixed_points_of_order_stabilizer, is_minimal, orbit_closure, orbits, FiniteFlow,
    OrderPoint,
};
use crate::limit::{check_extension_property, ConstructionState, DEFAULT_STAGE_CAP, DEFAULT_WINDOW};
use crate::ramsey::{arrows, arrows_exhaustive, check_ordering_property, find_ramsey_witness};
use crate::structure::FinStructure;

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "RAMFLOW_JOBS";

#[derive(Parser, Debug)]
#[command(name = "ramflow", version, about = "Amalgamation, Ramsey, homogenization and flow checks on finite structures")]
pub struct Cli {
    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = JOBS_ENV)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ClassArgs {
    /// graph, kn-free:N, hypergraph:ARITY|FILE, a-free:FILE or poset.
    #[arg(long, default_value = "graph")]
    pub class: String,

    /// Members carry a linear order.
    #[arg(long)]
    pub ordered: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Amalgamate B and C over A along two embeddings.
    Amalgamate {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long = "C")]
        c: PathBuf,
        /// Embedding A → B: JSON list of pairs or images, inline or a file.
        #[arg(long)]
        i: String,
        /// Embedding A → C.
        #[arg(long)]
        j: String,
        /// Class to amalgamate in; without it the free amalgam is formed.
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        ordered: bool,
    },
    /// Decide C → (B)^A_k, or search a witness C up to a size bound.
    CheckRamsey {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long = "C", conflicts_with = "search_bound", required_unless_present = "search_bound")]
        c: Option<PathBuf>,
        #[arg(long)]
        search_bound: Option<usize>,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        /// Enumerate every colouring instead of the pruned search.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Search a structure all of whose orders contain every order of B.
    CheckOrderingProperty {
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long, default_value = "graph")]
        class: String,
        #[arg(long, default_value_t = 5)]
        bound: usize,
    },
    /// Bounded checks of the class axioms.
    CheckClass {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = Axiom::All)]
        check: Axiom,
    },
    /// Run scheduled homogenization steps from a seed.
    BuildLimit {
        #[arg(long)]
        seed: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 10)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = DEFAULT_STAGE_CAP)]
        stage_cap: usize,
        /// Directory receiving stage documents and the map ledger.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check the extension property of a structure against its age.
    CheckEp {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Orders of a structure under its automorphism group.
    Flow {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value = "graph")]
        class: String,
        /// Order as a JSON list, e.g. [2,0,1].
        #[arg(long)]
        orbit_of: Option<String>,
        #[arg(long)]
        check_torder: bool,
        /// Size bound for the age criterion; defaults to the structure size.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        minimal: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    All,
    Hereditary,
    Jep,
    Amalgamation,
    Reasonable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Witness,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Witness => "witness",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Fail => 1,
            _ => 0,
        }
    }
}

/// Outcome of one command.
#[derive(Clone, Debug)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Value,
    pub verdict: Verdict,
    pub witness: Value,
    pub summary: String,
    pub timing_ms: u128,
}

impl CommandReport {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict.as_str(),
            "witness": self.witness,
            "timing_ms": self.timing_ms,
        })
    }
}

struct Outcome {
    inputs: Value,
    verdict: Verdict,
    witness: Value,
    summary: String,
}

/// Parses `args` (program name first), runs the command, prints the report
/// and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(jobs) = cli.jobs.filter(|&j| j > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let name = command_name(&cli.command);
    match dispatch(&cli.command) {
        Ok(report) => {
            emit(&report.to_json());
            eprintln!("{}: {} ({})", report.command, report.verdict.as_str(), report.summary);
            report.verdict.exit_code()
        }
        Err(e) => {
            let doc = json!({"command": name, "verdict": "error", "error": e.to_string()});
            emit(&doc);
            eprintln!("{name}: error: {e}");
            2
        }
    }
}

fn emit(doc: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(doc).expect("report serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Amalgamate { .. } => "amalgamate",
        Command::CheckRamsey { .. } => "check-ramsey",
        Command::CheckOrderingProperty { .. } => "check-ordering-property",
        Command::CheckClass { .. } => "check-class",
        Command::BuildLimit { .. } => "build-limit",
        Command::CheckEp { .. } => "check-ep",
        Command::Flow { .. } => "flow",
    }
}

/// Runs a parsed command.
pub fn dispatch(command: &Command) -> Result<CommandReport> {
    let start = Instant::now();
    let out = match command {
        Command::Amalgamate {
            a,
            b,
            c,
            i,
            j,
            class,
            ordered,
        } => run_amalgamate(a, b, c, i, j, class.as_deref(), *ordered),
        Command::CheckRamsey {
            a,
            b,
            c,
            search_bound,
            colors,
            exhaustive,
            class,
        } => run_ramsey(a, b, c.as_deref(), *search_bound, *colors, *exhaustive, class),
        Command::CheckOrderingProperty { b, class, bound } => run_ordering(b, class, *bound),
        Command::CheckClass { class, bound, check } => run_check_class(class, *bound, *check),
        Command::BuildLimit {
            seed,
            class,
            budget,
            window,
            stage_cap,
            trace,
        } => run_build_limit(seed, class, *budget, *window, *stage_cap, trace.as_deref()),
        Command::CheckEp { structure, class, bound } => run_check_ep(structure, class, *bound),
        Command::Flow {
            structure,
            class,
            orbit_of,
            check_torder,
            bound,
            minimal,
        } => run_flow(structure, class, orbit_of.as_deref(), *check_torder, *bound, *minimal),
    }?;
    Ok(CommandReport {
        command: command_name(command).to_string(),
        inputs: out.inputs,
        verdict: out.verdict,
        witness: out.witness,
        summary: out.summary,
        timing_ms: start.elapsed().as_millis(),
    })
}

fn class_of(args: &ClassArgs) -> Result<ClassSpec> {
    ClassSpec::parse(&args.class, args.ordered)
}

/// Reads a structure; ordered classes give an unordered input its natural
/// order.
fn load(path: &Path, ordered: bool) -> Result<FinStructure> {
    let s = read_structure(path)?;
    if ordered && !s.has_linear_order() {
        s.with_natural_order()
    } else {
        Ok(s)
    }
}

fn parse_map(text: &str, source_size: usize) -> Result<Embedding> {
    let body = if Path::new(text).is_file() {
        std::fs::read_to_string(text).map_err(|e| Error::Document(format!("{text}: {e}")))?
    } else {
        text.to_string()
    };
    let value: Value = serde_json::from_str(&body)
        .map_err(|e| Error::MalformedEmbedding(format!("embedding `{text}` is not JSON: {e}")))?;
    let malformed = || Error::MalformedEmbedding(format!("embedding `{text}` is neither a list of pairs nor of images"));
    let items = value.as_array().ok_or_else(malformed)?;
    if items.iter().all(Value::is_u64) {
        return Ok(Embedding::new(items.iter().map(|v| v.as_u64().unwrap() as usize).collect()));
    }
    let mut map = vec![None; source_size];
    for item in items {
        let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(malformed)?;
        let (x, y) = match (pair[0].as_u64(), pair[1].as_u64()) {
            (Some(x), Some(y)) => (x as usize, y as usize),
            _ => return Err(malformed()),
        };
        if x >= source_size {
            return Err(Error::MalformedEmbedding(format!("{x} is outside the source of size {source_size}")));
        }
        if map[x].is_some_and(|old| old != y) {
            return Err(Error::MalformedEmbedding(format!("{x} has two images")));
        }
        map[x] = Some(y);
    }
    let map: Option<Vec<usize>> = map.into_iter().collect();
    map.map(Embedding::new)
        .ok_or_else(|| Error::MalformedEmbedding(format!("embedding `{text}` is not total on the source")))
}

fn run_amalgamate(
    a: &Path,
    b: &Path,
    c: &Path,
    i: &str,
    j: &str,
    class: Option<&str>,
    ordered: bool,
) -> Result<Outcome> {
    let (sa, sb, sc) = (load(a, ordered)?, load(b, ordered)?, load(c, ordered)?);
    let (ei, ej) = (parse_map(i, sa.size())?, parse_map(j, sa.size())?);
    let res = match class {
        Some(text) => amalgamate(&sa, &sb, &sc, &ei, &ej, &ClassSpec::parse(text, ordered)?)?,
        None if [&sa, &sb, &sc].iter().all(|s| s.has_linear_order()) => ordered_amalgam(&sa, &sb, &sc, &ei, &ej)?,
        None => free_amalgam(&sa, &sb, &sc, &ei, &ej)?,
    };
    Ok(Outcome {
        inputs: json!({"A": a, "B": b, "C": c, "i": ei.map(), "j": ej.map(), "class": class, "ordered": ordered}),
        verdict: Verdict::Witness,
        summary: format!("amalgam of size {}", res.d.size()),
        witness: json!({"D": res.d.to_value(), "k": res.k.map(), "l": res.l.map()}),
    })
}

fn run_ramsey(
    a: &Path,
    b: &Path,
    c: Option<&Path>,
    search_bound: Option<usize>,
    colors: usize,
    exhaustive: bool,
    class_args: &ClassArgs,
) -> Result<Outcome> {
    let class = class_of(class_args)?;
    let ordered = class.ordered();
    let (sa, sb) = (load(a, ordered)?, load(b, ordered)?);
    let strip = |s: FinStructure| if ordered { s } else { s.without_linear_order() };
    let (sa, sb) = (strip(sa), strip(sb));
    let mut inputs = json!({"A": a, "B": b, "colors": colors, "class": class.to_string()});
    match (c, search_bound) {
        (Some(c), _) => {
            let sc = strip(load(c, ordered)?);
            inputs["C"] = json!(c);
            let r = if exhaustive {
                arrows_exhaustive(&sc, &sb, &sa, colors)?
            } else {
                arrows(&sc, &sb, &sa, colors)?
            };
            let witness = match &r.bad_coloring {
                Some(col) => json!({"bad_coloring": col}),
                None => Value::Null,
            };
            Ok(Outcome {
                inputs,
                verdict: if r.arrows { Verdict::Pass } else { Verdict::Fail },
                summary: format!(
                    "{} copies of A, {} copies of B, {} search nodes",
                    r.a_copies, r.b_copies, r.nodes
                ),
                witness,
            })
        }
        (None, Some(bound)) => {
            inputs["search_bound"] = json!(bound);
            let found = find_ramsey_witness(&sa, &sb, colors, &class, bound)?;
            Ok(match found {
                Some(w) => Outcome {
                    inputs,
                    verdict: Verdict::Witness,
                    summary: format!("witness of size {}", w.size()),
                    witness: w.to_value(),
                },
                None => Outcome {
                    inputs,
                    verdict: Verdict::Fail,
                    summary: format!("no witness up to size {bound}"),
                    witness: Value::Null,
                },
            })
        }
        (None, None) => Err(Error::InvalidArgument("either --C or --search-bound is required".into())),
    }
}

fn run_ordering(b: &Path, class: &str, bound: usize) -> Result<Outcome> {
    let class = ClassSpec::parse(class, true)?;
    let sb = read_structure(b)?;
    let inputs = json!({"B": b, "class": class.to_string(), "bound": bound});
    Ok(match check_ordering_property(&sb, &class, bound)? {
        Some(w) => Outcome {
            inputs,
            verdict: Verdict::Witness,
            summary: format!("witness of size {}", w.size()),
            witness: w.to_value(),
        },
        None => Outcome {
            inputs,
            verdict: Verdict::Fail,
            summary: format!("no witness up to size {bound}"),
            witness: Value::Null,
        },
    })
}

fn run_check_class(args: &ClassArgs, bound: usize, check: Axiom) -> Result<Outcome> {
    let class = class_of(args)?;
    let axioms: Vec<Axiom> = match check {
        Axiom::All if class.ordered() => vec![Axiom::Hereditary, Axiom::Jep, Axiom::Amalgamation, Axiom::Reasonable],
        Axiom::All => vec![Axiom::Hereditary, Axiom::Jep, Axiom::Amalgamation],
        one => vec![one],
    };
    let mut results = serde_json::Map::new();
    let mut failed = None;
    for axiom in axioms {
        let r: ClassCheck = match axiom {
            Axiom::Hereditary => check_hereditary(&class, bound)?,
            Axiom::Jep => check_jep(&class, bound)?,
            Axiom::Amalgamation => check_amalgamation(&class, bound)?,
            Axiom::Reasonable => check_reasonable(&class, bound)?,
            Axiom::All => unreachable!(),
        };
        let name = format!("{axiom:?}").to_lowercase();
        results.insert(name.clone(), json!({"holds": r.holds(), "examined": r.examined}));
        if failed.is_none() {
            if let Some(ce) = &r.counterexample {
                failed = Some((name, ce.to_json()));
            }
        }
    }
    let inputs = json!({"class": class.to_string(), "bound": bound, "checks": results});
    Ok(match failed {
        None => Outcome {
            inputs,
            verdict: Verdict::Pass,
            summary: format!("all checks hold up to size {bound}"),
            witness: Value::Null,
        },
        Some((name, ce)) => Outcome {
            inputs,
            verdict: Verdict::Fail,
            summary: format!("{name} fails"),
            witness: ce,
        },
    })
}

fn run_build_limit(
    seed: &Path,
    args: &ClassArgs,
    budget: usize,
    window: usize,
    stage_cap: usize,
    trace: Option<&Path>,
) -> Result<Outcome> {
    let class = class_of(args)?;
    let s = read_structure(seed)?;
    let mut state = ConstructionState::new(&s, &class, window)?.with_stage_cap(stage_cap);
    let mut violations = Vec::new();
    for _ in 0..budget {
        state.step()?;
        for v in state.audit() {
            violations.push(json!({"step": state.steps().len() - 1, "violation": v}));
        }
    }
    if let Some(dir) = trace {
        state.write_trace(dir)?;
    }
    let mut witness = state.report();
    witness["ledger"] = state.ledger_doc();
    witness["violations"] = Value::Array(violations.clone());
    Ok(Outcome {
        inputs: json!({
            "seed": seed, "class": class.to_string(), "budget": budget,
            "window": window, "stage_cap": stage_cap, "trace": trace,
        }),
        verdict: if violations.is_empty() { Verdict::Pass } else { Verdict::Fail },
        summary: format!(
            "{} steps, final stage size {}, {} violations",
            state.steps().len(),
            state.current().size(),
            violations.len()
        ),
        witness,
    })
}

fn run_check_ep(structure: &Path, args: &ClassArgs, bound: usize) -> Result<Outcome> {
    let class = class_of(args)?;
    let s = load(structure, class.ordered())?;
    let r = check_extension_property(&s, &class, bound)?;
    Ok(Outcome {
        inputs: json!({"structure": structure, "class": class.to_string(), "bound": bound}),
        verdict: if r.holds() { Verdict::Pass } else { Verdict::Fail },
        summary: format!("{} instances pass, {} fail", r.passed, r.failed),
        witness: serde_json::to_value(&r)?,
    })
}

fn run_flow(
    structure: &Path,
    class: &str,
    orbit_of: Option<&str>,
    check_torder: bool,
    bound: Option<usize>,
    minimal: bool,
) -> Result<Outcome> {
    let class = ClassSpec::parse(class, false)?;
    let s = read_structure(structure)?.without_linear_order();
    let flow = FiniteFlow::new(&s, &class)?;
    let mut witness = json!({
        "points": flow.points(),
        "group_size": flow.group().len(),
        "orbits": orbits(&flow).len(),
    });
    let mut verdict = Verdict::Pass;
    let mut notes = vec![format!("{} points", flow.points().len())];
    if let Some(text) = orbit_of {
        let seq: Vec<usize> = serde_json::from_str(text)
            .map_err(|e| Error::InadmissibleOrder(format!("order `{text}` is not a JSON list: {e}")))?;
        let p = OrderPoint::new(seq)?;
        let orbit = orbit_closure(&flow, &p)?;
        notes.push(format!("orbit of size {}", orbit.len()));
        witness["orbit"] = json!(orbit);
        witness["stabilizer_fixed_points"] = json!(fixed_points_of_order_stabilizer(&flow, &p)?);
    }
    if check_torder {
        let r = check_torder_equivalence(&s, &class, bound)?;
        notes.push(format!("age criterion agrees on {}/{} pairs", r.agreements, r.pairs));
        if !r.forward_sound() {
            verdict = Verdict::Fail;
        }
        witness["torder"] = json!({
            "pairs": r.pairs,
            "agreements": r.agreements,
            "full_agreement": r.full_agreement(),
            "forward_sound": r.forward_sound(),
            "forward_violations": r.forward_violations,
            "converse_gaps": r.converse_gaps,
        });
    }
    if minimal {
        let m = is_minimal(&flow)?;
        notes.push(if m { "minimal".into() } else { "not minimal".into() });
        witness["minimal"] = json!(m);
        if !m {
            verdict = Verdict::Fail;
        }
    }
    Ok(Outcome {
        inputs: json!({
            "structure": structure, "class": class.to_string(), "orbit_of": orbit_of,
            "check_torder": check_torder, "bound": bound, "minimal": minimal,
        }),
        verdict,
        summary: notes.join(", "),
        witness,
    })
}
