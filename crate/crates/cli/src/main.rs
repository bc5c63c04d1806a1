//! `dsw`: enumerate shortest matching walks from the command line.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dsw_core::bench::{measure, padded_chain, preprocessing_family, BenchRow};
use dsw_core::{
    compile_regex, load_database, parse_nfa, parse_walk, run_query, run_query_cheapest, Automaton, Database,
    MemorylessQuery, MultiTargetQuery, PreprocessingSteps, QueryError, QueryStatus, VertexId, Walk,
    WalkFormat,
};

const EXIT_NO_MATCH: u8 = 3;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "dsw",
    version,
    about = "Distinct shortest walk enumeration over edge-labeled graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the answers of one query.
    Query(QueryArgs),
    /// Print step counters over generated graph families.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Shortest,
    Cheapest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Edges,
    Full,
}

impl From<Format> for WalkFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Edges => WalkFormat::Edges,
            Format::Full => WalkFormat::Full,
        }
    }
}

#[derive(Args)]
struct QueryArgs {
    /// Database file.
    #[arg(long)]
    graph: PathBuf,
    /// Query as a regular expression over edge labels.
    #[arg(long, conflicts_with = "nfa", required_unless_present = "nfa")]
    regex: Option<String>,
    /// Query as an NFA file.
    #[arg(long)]
    nfa: Option<PathBuf>,
    #[arg(long)]
    source: String,
    #[arg(long, conflicts_with = "all_targets", required_unless_present = "all_targets")]
    target: Option<String>,
    /// Answer for every vertex at once; lines are `<target>\t<walk>`.
    #[arg(long, conflicts_with = "resume_from")]
    all_targets: bool,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Use the optional fifth edge column as edge cost (cheapest mode).
    #[arg(long)]
    cost_field: bool,
    /// Stop after this many answers (per target with --all-targets).
    #[arg(long)]
    limit: Option<usize>,
    /// Print only the answers after this one, without enumerator state.
    #[arg(long, value_name = "WALK")]
    resume_from: Option<String>,
    /// Append ` x<count>` with the number of accepting runs.
    #[arg(long)]
    multiplicity: bool,
    #[arg(long, value_enum, default_value = "edges")]
    format: Format,
    /// Report step counters and wall times on stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Edge counts for the fixed-λ family.
    #[arg(long, value_delimiter = ',', default_value = "20,200,2000")]
    sizes: Vec<usize>,
    /// λ for the fixed-λ family.
    #[arg(long, default_value_t = 3)]
    lambda: usize,
    /// λ values for the growing-λ family.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    lambdas: Vec<usize>,
    /// Edge count for the growing-λ family.
    #[arg(long, default_value_t = 2000)]
    padded_size: usize,
    /// Edge counts for the preprocessing family.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    prep_sizes: Vec<usize>,
}

enum Failure {
    Input(anyhow::Error),
    NoMatch,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Query(args) => cmd_query(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoMatch) => {
            eprintln!("no matching walk");
            ExitCode::from(EXIT_NO_MATCH)
        }
        Err(Failure::Input(e)) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<io::Error>()
        .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn vertex(db: &Database, name: &str) -> anyhow::Result<VertexId> {
    db.vertex_by_name(name)
        .ok_or_else(|| anyhow!("unknown vertex `{name}`"))
}

fn load_query(args: &QueryArgs, db: &Database) -> anyhow::Result<Automaton> {
    match (&args.regex, &args.nfa) {
        (Some(re), None) => compile_regex(re, db.alphabet()).context("invalid regex"),
        (None, Some(path)) => parse_nfa(&read(path)?, db.alphabet()).context("invalid NFA"),
        _ => bail!("exactly one of --regex and --nfa is required"),
    }
}

/// Edge costs for cheapest mode: the fifth column, or 1 everywhere.
fn edge_costs(args: &QueryArgs, db: &Database) -> anyhow::Result<Vec<u64>> {
    if !args.cost_field {
        return Ok(vec![1; db.num_edges()]);
    }
    db.edges()
        .iter()
        .map(|e| {
            e.cost
                .ok_or_else(|| QueryError::MissingCost(db.edge_name(e.id).to_owned()).into())
        })
        .collect()
}

struct Printer<'a> {
    db: &'a Database,
    format: WalkFormat,
    counter: Option<Automaton>,
    out: BufWriter<io::StdoutLock<'static>>,
}

impl Printer<'_> {
    fn print(&mut self, prefix: Option<&str>, walk: &Walk) -> io::Result<()> {
        if let Some(p) = prefix {
            write!(self.out, "{p}\t")?;
        }
        write!(self.out, "{}", walk.display(self.db, self.format))?;
        if let Some(aut) = &self.counter {
            write!(self.out, " x{}", aut.count_runs(self.db, walk))?;
        }
        writeln!(self.out)
    }
}

struct Stats {
    lambda: Option<u64>,
    preprocessing: PreprocessingSteps,
    per_output: Vec<u64>,
    preprocessing_time: Duration,
    enumeration_time: Duration,
}

impl Stats {
    fn report(&self) {
        let p = &self.preprocessing;
        let lambda = self.lambda.map_or("none".to_owned(), |l| l.to_string());
        let max = self.per_output.iter().max().copied().unwrap_or(0);
        let list: Vec<String> = self.per_output.iter().map(u64::to_string).collect();
        eprintln!("lambda: {lambda}");
        eprintln!(
            "preprocessing_steps: {} (init {}, expansions {}, inner {}, trim {})",
            p.total(),
            p.init,
            p.expansions,
            p.inner,
            p.trim
        );
        eprintln!("answers: {}", self.per_output.len());
        eprintln!("max_output_steps: {max}");
        eprintln!("per_output_steps: {}", list.join(","));
        eprintln!("preprocessing_time_us: {}", self.preprocessing_time.as_micros());
        eprintln!("enumeration_time_us: {}", self.enumeration_time.as_micros());
    }
}

fn cmd_query(args: &QueryArgs) -> Result<(), Failure> {
    let db = load_database(&read(&args.graph)?).context("invalid graph")?;
    let aut = load_query(args, &db)?;
    let source = vertex(&db, &args.source)?;
    let limit = args.limit.unwrap_or(usize::MAX);
    let mut printer = Printer {
        db: &db,
        format: args.format.into(),
        counter: args
            .multiplicity
            .then(|| aut.rebind(db.alphabet()).eliminate_eps()),
        out: BufWriter::new(io::stdout().lock()),
    };
    let cheapest = matches!(args.mode, Some(Mode::Cheapest));
    if args.cost_field && !cheapest {
        return Err(anyhow!("--cost-field requires --mode cheapest").into());
    }

    if args.all_targets {
        if cheapest {
            return Err(anyhow!("--all-targets supports shortest mode only").into());
        }
        return all_targets(args, &db, &aut, source, limit, &mut printer);
    }
    let target = vertex(&db, args.target.as_deref().expect("clap enforces a target"))?;

    let start = Instant::now();
    let (stats, answered) = if let Some(prev) = &args.resume_from {
        let previous = parse_walk(&db, prev).context("invalid --resume-from walk")?;
        let built = if cheapest {
            MemorylessQuery::cheapest(&db, &aut, source, target, &edge_costs(args, &db)?)
        } else {
            MemorylessQuery::new(&db, &aut, source, target)
        };
        let q = match built {
            Ok(q) => q,
            Err(QueryError::NoMatchingWalk) => return Err(Failure::NoMatch),
            Err(e) => return Err(anyhow::Error::from(e).into()),
        };
        let preprocessing_time = start.elapsed();
        let start = Instant::now();
        let en = q.enumerator();
        let mut per_output = Vec::new();
        let mut current = previous;
        while per_output.len() < limit {
            let (next, steps) = en
                .next_output_counted(&current)
                .context("invalid --resume-from walk")?;
            let Some(w) = next else { break };
            per_output.push(steps);
            printer.print(None, &w)?;
            current = w;
        }
        let stats = Stats {
            lambda: Some(en.lambda()),
            preprocessing: q.annotation().steps,
            per_output,
            preprocessing_time,
            enumeration_time: start.elapsed(),
        };
        (stats, true)
    } else {
        let q = if cheapest {
            run_query_cheapest(&db, &aut, source, target, &edge_costs(args, &db)?)
                .map_err(anyhow::Error::from)?
        } else {
            run_query(&db, &aut, source, target)
        };
        let mut q = if args.stats { q.record_delays() } else { q };
        let preprocessing_time = start.elapsed();
        let start = Instant::now();
        let answered = q.status() == QueryStatus::Answered;
        for o in q.by_ref().take(limit) {
            printer.print(None, &o.walk)?;
        }
        let stats = Stats {
            lambda: q.lambda(),
            preprocessing: q.preprocessing_steps(),
            per_output: q.per_output_steps().to_vec(),
            preprocessing_time,
            enumeration_time: start.elapsed(),
        };
        (stats, answered)
    };
    printer.out.flush()?;
    if args.stats {
        stats.report();
    }
    if answered {
        Ok(())
    } else {
        Err(Failure::NoMatch)
    }
}

fn all_targets(
    args: &QueryArgs,
    db: &Database,
    aut: &Automaton,
    source: VertexId,
    limit: usize,
    printer: &mut Printer<'_>,
) -> Result<(), Failure> {
    let start = Instant::now();
    let targets: Vec<VertexId> = db.vertices().collect();
    let mut q = MultiTargetQuery::new(db, aut, source, &targets);
    let preprocessing_time = start.elapsed();
    let start = Instant::now();
    let mut per_output = Vec::new();
    let mut any = false;
    for &t in &targets {
        if q.lambda(t).is_none() {
            continue;
        }
        any = true;
        let name = db.vertex_name(t).to_owned();
        let mut en = q.answers(t).record_delays();
        for w in en.by_ref().take(limit) {
            printer.print(Some(&name), &w)?;
        }
        per_output.extend_from_slice(en.per_output_steps());
    }
    printer.out.flush()?;
    if args.stats {
        Stats {
            lambda: None,
            preprocessing: q.annotation().steps,
            per_output,
            preprocessing_time,
            enumeration_time: start.elapsed(),
        }
        .report();
    }
    if any {
        Ok(())
    } else {
        Err(Failure::NoMatch)
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(
        out,
        "{:<14} {:>6} {:>6} {:>8} {:>10} {:>9} {:>10} {:>10} {:>10}",
        "family", "edges", "lambda", "answers", "prep_steps", "max_delay", "mean_delay", "prep_us", "enum_us"
    )?;
    let mut row = |family: &str, r: BenchRow| -> io::Result<()> {
        writeln!(
            out,
            "{:<14} {:>6} {:>6} {:>8} {:>10} {:>9} {:>10.2} {:>10} {:>10}",
            family,
            r.edges,
            r.lambda.map_or("-".to_owned(), |l| l.to_string()),
            r.answers,
            r.preprocessing_steps,
            r.max_delay_steps,
            r.mean_delay_steps,
            r.preprocessing_time.as_micros(),
            r.enumeration_time.as_micros()
        )
    };
    for &m in &args.sizes {
        row("fixed-lambda", measure(&padded_chain(args.lambda, m, args.seed)))?;
    }
    for &l in &args.lambdas {
        row(
            "growing-lambda",
            measure(&padded_chain(l, args.padded_size, args.seed)),
        )?;
    }
    for &m in &args.prep_sizes {
        row("preprocessing", measure(&preprocessing_family(m, args.seed)))?;
    }
    out.flush()?;
    Ok(())
}
