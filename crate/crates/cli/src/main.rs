//! `qmat`: build, inspect, combine and decide q-matroids from the command line.

mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qmatroid::directsum::{direct_sum, DirectSumError, SplitContext};
use qmatroid::io::{rank_table_json, rank_table_string, structure_json, write_lattice, IoError};
use qmatroid::lattice::{Lattice, LatticeError, DEFAULT_LATTICE_CAP};
use qmatroid::qmatroid::{AxiomOptions, QMatroid, QMatroidError};
use qmatroid::repr::{
    block_diag_test_against, extension_field, search_representations, Certificate, ReprError, SearchOptions,
    Verdict, DEFAULT_CANDIDATE_CAP,
};
use qmatroid::scenarios::{run_scenario, Scenario, ScenarioError, ScenarioOptions, ScenarioResult};
use qmatroid::spec::{QSpec, SpecError};

use output::Sink;

#[derive(Parser)]
#[command(name = "qmat", version, about = "Exact q-matroid toolkit")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0xC0FFEE)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Largest subspace lattice that may be built.
    #[arg(long, global = true, default_value_t = DEFAULT_LATTICE_CAP)]
    cap_lattice: u64,
    /// Largest candidate space a representation search may scan.
    #[arg(long, global = true, default_value_t = DEFAULT_CANDIDATE_CAP)]
    cap_candidates: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write artifacts and a manifest here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record elapsed times (artifacts are then no longer reproducible byte for byte).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of every subspace.
    RankTable {
        /// A q-matroid spec; alternatively give --field, --n and --matrix.
        spec: Option<String>,
        #[arg(long, conflicts_with = "spec", requires_all = ["n", "matrix"])]
        field: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Direct sum of two q-matroids: the rank table plus a summary.
    DirectSum { left: String, right: String },
    /// Every representation over GF(q^m), as a certificate.
    ReprSearch {
        spec: String,
        #[arg(long, short = 'm')]
        degree: u32,
    },
    /// Block-diagonal representability of a direct sum over GF(q^m).
    BlockDiag {
        left: String,
        right: String,
        #[arg(long, short = 'm')]
        degree: u32,
    },
    /// Loops, independent spaces, circuits, flats, open spaces, cyclic flats.
    Structures { spec: String },
    /// Every subspace of F_q^n in index order.
    LatticeDump { q: u32, n: usize },
    /// Re-check a certificate against the q-matroids it names.
    Revalidate {
        certificate: PathBuf,
        #[arg(long = "target", required = false)]
        targets: Vec<String>,
    },
    /// Run the worked examples end to end ("all" runs every one).
    #[command(alias = "verify")]
    VerifyPaper { scenario: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Repr(#[from] ReprError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    DirectSum(#[from] DirectSumError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    QMatroid(#[from] QMatroidError),
    #[error(transparent)]
    Output(#[from] IoError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad certificate: {0}")]
    Certificate(serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

fn lattice_cap(e: &LatticeError) -> bool {
    matches!(e, LatticeError::CapExceeded { .. })
}

fn qmatroid_cap(e: &QMatroidError) -> bool {
    matches!(e, QMatroidError::Lattice(l) if lattice_cap(l))
}

fn direct_sum_cap(e: &DirectSumError) -> bool {
    matches!(e, DirectSumError::Lattice(l) if lattice_cap(l))
}

fn repr_cap(e: &ReprError) -> bool {
    match e {
        ReprError::CapExceeded { .. } => true,
        ReprError::Lattice(l) => lattice_cap(l),
        ReprError::QMatroid(q) => qmatroid_cap(q),
        ReprError::DirectSum(d) => direct_sum_cap(d),
        _ => false,
    }
}

fn spec_cap(e: &SpecError) -> bool {
    match e {
        SpecError::Lattice(l) => lattice_cap(l),
        SpecError::QMatroid(q) => qmatroid_cap(q),
        SpecError::DirectSum(d) => direct_sum_cap(d),
        _ => false,
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let cap = match self {
            CliError::Spec(e) => spec_cap(e),
            CliError::Repr(ReprError::Revalidation(_)) => return 1,
            CliError::Repr(e) => repr_cap(e),
            CliError::Scenario(ScenarioError::Repr(e)) => repr_cap(e),
            CliError::Scenario(ScenarioError::Lattice(e)) | CliError::Lattice(e) => lattice_cap(e),
            CliError::Scenario(ScenarioError::DirectSum(e)) | CliError::DirectSum(e) => direct_sum_cap(e),
            CliError::Scenario(ScenarioError::QMatroid(e)) | CliError::QMatroid(e) => qmatroid_cap(e),
            CliError::Io(_) => return 2,
            _ => false,
        };
        if cap {
            3
        } else {
            2
        }
    }
}

struct Ctx {
    seed: u64,
    cap_lattice: u64,
    format: Format,
    timings: bool,
    search: SearchOptions,
}

impl Ctx {
    fn build(&self, spec: &str) -> Result<QMatroid, CliError> {
        Ok(spec.parse::<QSpec>()?.build_with_cap(self.cap_lattice)?)
    }

    fn stamp(&self, cert: &mut Certificate, start: Instant) {
        if self.timings {
            cert.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
    }

    fn split(&self, m1: &QMatroid, m2: &QMatroid) -> Result<SplitContext, CliError> {
        let l1 = m1.lattice();
        if l1.q() != m2.lattice().q() {
            return Err(CliError::Usage(format!(
                "summands over different fields (q = {} and q = {})",
                l1.q(),
                m2.lattice().q()
            )));
        }
        let total = Lattice::build_with_cap(l1.q(), l1.n() + m2.lattice().n(), self.cap_lattice)?;
        Ok(SplitContext::from_lattices(l1.clone(), m2.lattice().clone(), total)?)
    }

    fn table(&self, m: &QMatroid) -> (String, &'static str) {
        match self.format {
            Format::Csv => (rank_table_string(m), "csv"),
            Format::Json => (rank_table_json(m), "json"),
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

fn verdict_code(v: Verdict) -> i32 {
    if v == Verdict::Inconclusive {
        3
    } else {
        0
    }
}

fn structures_csv(m: &QMatroid) -> String {
    let l = m.lattice();
    let r = m.structure_report();
    let mut out = String::from("kind,index,dim,rows\n");
    for (kind, ids) in [
        ("loop", &r.loops),
        ("circuit", &r.circuits),
        ("flat", &r.flats),
        ("open", &r.open),
        ("cyclic_flat", &r.cyclic_flats),
    ] {
        for &v in ids {
            writeln!(out, "{kind},{},{},{}", v.0, l.dim(v), l.space_text(v)).expect("string write");
        }
    }
    out
}

fn scenario_csv(results: &[ScenarioResult]) -> String {
    let mut out = String::from("scenario,check,passed,detail\n");
    for r in results {
        for c in &r.checks {
            let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
            writeln!(out, "{},{},{},{}", r.scenario, quote(&c.name), c.passed, quote(&c.detail)).expect("string write");
        }
    }
    out
}

fn run(cli: Cli, sink: &mut Sink) -> Result<i32, CliError> {
    let ctx = Ctx {
        seed: cli.seed,
        cap_lattice: cli.cap_lattice,
        format: cli.format,
        timings: cli.timings,
        search: SearchOptions {
            candidate_cap: cli.cap_candidates,
            seed: cli.seed,
            ..SearchOptions::default()
        },
    };
    match cli.command {
        Command::RankTable { spec, field, n, matrix } => {
            let spec = match (spec, field, n, matrix) {
                (Some(s), None, None, None) => s,
                (None, Some(f), Some(n), Some(m)) => format!("matrix:{f}:{n}:{m}"),
                _ => return Err(CliError::Usage("give a spec or all of --field, --n and --matrix".into())),
            };
            let m = ctx.build(&spec)?;
            let (text, ext) = ctx.table(&m);
            sink.emit(&format!("rank_table.{ext}"), &text, true)?;
            let violations = m.check_axioms(&AxiomOptions {
                seed: ctx.seed,
                ..AxiomOptions::default()
            });
            if let Some(v) = violations.first() {
                eprintln!("axiom violation: {v}");
                return Ok(1);
            }
            Ok(0)
        }
        Command::DirectSum { left, right } => {
            let m1 = ctx.build(&left)?;
            let m2 = ctx.build(&right)?;
            let split = ctx.split(&m1, &m2)?;
            let sum = direct_sum(&m1, &m2, &split)?;
            let summary = sum.summary(&m1, &m2);
            let (text, ext) = ctx.table(sum.matroid());
            sink.emit(&format!("direct_sum.{ext}"), &text, true)?;
            sink.emit("direct_sum_summary.json", &pretty(&summary), false)?;
            Ok(if summary.rank_additive { 0 } else { 1 })
        }
        Command::ReprSearch { spec, degree } => {
            let m = ctx.build(&spec)?;
            let field = extension_field(m.lattice().q(), degree)?;
            let start = Instant::now();
            let mut out = search_representations(&m, &field, &ctx.search)?;
            ctx.stamp(&mut out.certificate, start);
            sink.emit("certificate.json", &out.certificate.to_json(), true)?;
            Ok(verdict_code(out.certificate.verdict))
        }
        Command::BlockDiag { left, right, degree } => {
            let m1 = ctx.build(&left)?;
            let m2 = ctx.build(&right)?;
            let split = ctx.split(&m1, &m2)?;
            let sum = direct_sum(&m1, &m2, &split)?;
            let field = extension_field(m1.lattice().q(), degree)?;
            let start = Instant::now();
            let mut out = block_diag_test_against(&m1, &m2, sum.matroid(), &field, &ctx.search)?;
            ctx.stamp(&mut out.certificate, start);
            sink.emit("block_certificate.json", &out.certificate.to_json(), true)?;
            sink.emit("left_certificate.json", &out.left.certificate.to_json(), false)?;
            sink.emit("right_certificate.json", &out.right.certificate.to_json(), false)?;
            Ok(verdict_code(out.certificate.verdict))
        }
        Command::Structures { spec } => {
            let m = ctx.build(&spec)?;
            match ctx.format {
                Format::Csv => sink.emit("structures.csv", &structures_csv(&m), true)?,
                Format::Json => sink.emit("structures.json", &structure_json(&m.structure_report()), true)?,
            }
            Ok(0)
        }
        Command::LatticeDump { q, n } => {
            let l = Lattice::build_with_cap(q, n, ctx.cap_lattice)?;
            match ctx.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_lattice(&l, &mut buf)?;
                    sink.emit("lattice.csv", &String::from_utf8(buf).expect("csv is utf-8"), true)?;
                }
                Format::Json => {
                    let rows: Vec<_> = l
                        .ids()
                        .map(|v| serde_json::json!({"index": v.0, "dim": l.dim(v), "rows": l.space_text(v)}))
                        .collect();
                    sink.emit("lattice.json", &pretty(&rows), true)?;
                }
            }
            Ok(0)
        }
        Command::Revalidate { certificate, targets } => {
            let text = std::fs::read_to_string(&certificate)?;
            let cert = Certificate::from_json(&text).map_err(CliError::Certificate)?;
            let built = targets.iter().map(|t| ctx.build(t)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&QMatroid> = built.iter().collect();
            cert.revalidate(&refs, &ctx.search)?;
            eprintln!("certificate revalidates ({:?})", cert.verdict);
            Ok(0)
        }
        Command::VerifyPaper { scenario } => {
            let chosen: Vec<Scenario> = if scenario == "all" {
                Scenario::ALL.to_vec()
            } else {
                vec![scenario.parse()?]
            };
            let opts = ScenarioOptions {
                seed: ctx.seed,
                search: ctx.search.clone(),
                timings: ctx.timings,
            };
            let mut results = Vec::new();
            for s in chosen {
                let r = run_scenario(s, &opts)?;
                eprintln!(
                    "{}: {} ({} checks)",
                    r.scenario,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.checks.len()
                );
                for c in r.checks.iter().filter(|c| !c.passed) {
                    eprintln!("  failed: {} {}", c.name, c.detail);
                }
                if sink.to_dir() {
                    for a in &r.artifacts {
                        sink.emit(&format!("{}/{}", r.scenario, a.name), &a.contents, false)?;
                    }
                }
                results.push(r);
            }
            match ctx.format {
                Format::Csv => sink.emit("scenarios.csv", &scenario_csv(&results), true)?,
                Format::Json => sink.emit("scenarios.json", &pretty(&results), true)?,
            }
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 1 })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::RankTable { .. } => "rank-table",
        Command::DirectSum { .. } => "direct-sum",
        Command::ReprSearch { .. } => "repr-search",
        Command::BlockDiag { .. } => "block-diag",
        Command::Structures { .. } => "structures",
        Command::LatticeDump { .. } => "lattice-dump",
        Command::Revalidate { .. } => "revalidate",
        Command::VerifyPaper { .. } => "verify-paper",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let name = command_name(&cli.command);
    let seed = cli.seed;
    let mut sink = match Sink::new(cli.out.clone()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let code = match run(cli, &mut sink) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            i32::from(e.exit_code())
        }
    };
    if let Err(e) = sink.finish(name, seed, code) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
