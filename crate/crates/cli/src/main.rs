//! `gcs`: build, verify and export complementary sets and Hadamard matrices.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcs_core::codec::{
    parse_gcs_records, parse_matrix_text, parse_spseq, read_gls, read_hmat, write_density_csv, write_gcs_records,
    write_hmat, write_matrix_text, write_spseq, CodecError,
};
use gcs_core::constructions::{
    execute_plan, golay_pair_plan, load_base_corpus, ArbitraryConfig, BaseCorpus, Certification,
    ConstructionError, ConstructionPlan, GcsSet, Planner,
};
use gcs_core::golay::{
    build_sk, coverage_report, density_rows, log_samples, BaseSupply, GolayError, MemoryBudget,
};
use gcs_core::hadamard::{
    asymptotic_plan_with, block_circulant_from_perfect, goethals_seidel_8n, realize_plan, sylvester,
    verify_hadamard, verify_hadamard_full, AsymptoticConfig, HadamardError, HadamardReport, PMMatrix, PlanError,
};
use gcs_core::signed_perm::{check_perfect, perfect_from_inputs, thm4_sequences, SpError};

use output::{write_output, Stamp};

#[derive(Parser, Debug)]
#[command(name = "gcs", version, about = "Golay complementary sets, base sequences and Hadamard matrices")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Add a provenance comment to sequence files.
    #[arg(long, global = true)]
    stamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct BuildOpts {
    /// Base-sequence corpus file.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Radix override for arbitrary lengths.
    #[arg(long)]
    p: Option<u64>,
    /// Range over which digit coverage is enumerated.
    #[arg(long, default_value_t = 100_000)]
    bound: u64,
    /// Output file (standard output when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Level {
    Full,
    Structural,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complementary pair of a Golay-number length.
    Pair {
        n: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Complementary quad of length n.
    Quad {
        n: u64,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Complementary set of any length n.
    Set {
        n: u64,
        #[command(flatten)]
        opts: BuildOpts,
        /// Write the construction plan as JSON.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Complex base sequences CBS(s1, s2).
    Cbs {
        s1: u64,
        s2: u64,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Hadamard matrices.
    Hadamard {
        #[command(subcommand)]
        command: HadamardCommand,
    },
    /// Density CSV of a length set.
    Density {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// First gap and counts of a length set.
    Coverage {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        dense: bool,
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Re-verify a sequence, matrix, plan or set file.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Level::Full)]
        level: Level,
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Base-sequence corpus tools.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand, Debug)]
enum HadamardCommand {
    /// Order 8n from a quad of length n.
    Gs {
        n: u64,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Block-circulant matrix from pairs and CBS through a perfect sequence.
    Sp {
        /// Pair term `l:m` (pair of length l, multiplier pair of length m).
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
        /// CBS term `s1:s2`.
        #[arg(long, value_delimiter = ',')]
        cbs: Vec<String>,
        /// Multiplier length for each CBS term.
        #[arg(long, value_delimiter = ',')]
        mult: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Level::Structural)]
        level: Level,
        /// Also write the perfect sequence.
        #[arg(long)]
        spseq: Option<PathBuf>,
        #[command(flatten)]
        opts: BuildOpts,
    },
    /// Exponent plan for order 2^t·m.
    Plan {
        m: u128,
        /// Build the matrix when the plan is small enough.
        #[arg(long)]
        build: bool,
        #[arg(long, default_value_t = 1 << 16)]
        witness_bound: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusCommand {
    /// Parse and verify every record.
    Load { path: PathBuf },
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

const VERIFY: u8 = 1;
const INPUT: u8 = 2;
const UNSUPPORTED: u8 = 3;
const BUDGET: u8 = 4;

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into() }
    }
}

impl From<GolayError> for Failure {
    fn from(e: GolayError) -> Self {
        let code = match e {
            GolayError::BudgetExceeded { .. } => BUDGET,
            GolayError::CorpusRequired => UNSUPPORTED,
            GolayError::InvalidArgument(_) => INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        use ConstructionError::*;
        let code = match &e {
            Golay(g) => return g.clone().into(),
            UnsupportedSeedLength(_) | DigitNotCovered { .. } | Uncovered(_) | MissingCorpusRecord { .. } => UNSUPPORTED,
            VerificationFailed(_) | CorpusVerificationFailed { .. } | PlanArithmeticMismatch { .. } => VERIFY,
            _ => INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<HadamardError> for Failure {
    fn from(e: HadamardError) -> Self {
        let code = match e {
            HadamardError::VerificationFailed(_) | HadamardError::NotPerfect(_) => VERIFY,
            _ => INPUT,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SpError> for Failure {
    fn from(e: SpError) -> Self {
        let code = if matches!(e, SpError::PerfectionFailed { .. } | SpError::ZeroEntry { .. }) { VERIFY } else { INPUT };
        Failure::new(code, e.to_string())
    }
}

impl From<PlanError> for Failure {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Golay(g) => g.into(),
            PlanError::Construction(c) => c.into(),
            PlanError::Hadamard(h) => h.into(),
            PlanError::SignedPerm(s) => s.into(),
            PlanError::ThresholdUnavailable { .. } | PlanError::WitnessMissing { .. } | PlanError::NotRealizable(_) => {
                Failure::new(UNSUPPORTED, e.to_string())
            }
            PlanError::CheckFailed(_) => Failure::new(VERIFY, e.to_string()),
            _ => Failure::new(INPUT, e.to_string()),
        }
    }
}

fn codec_failure(path: &Path, e: CodecError) -> Failure {
    Failure::new(INPUT, format!("{}: {e}", path.display()))
}

type Result<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(INPUT);
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().expect("thread pool set once");
    }
    let stamp = Stamp(cli.stamp);
    match run(cli.command, stamp) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}

fn load_corpus(path: &Option<PathBuf>) -> Result<Option<BaseCorpus>> {
    path.as_ref().map(|p| load_base_corpus(p).map_err(Failure::from)).transpose()
}

fn planner(opts: &BuildOpts) -> Result<Planner> {
    if opts.bound == 0 {
        return Err(Failure::new(INPUT, "--bound must be positive"));
    }
    let corpus = load_corpus(&opts.corpus)?;
    Ok(Planner::new(ArbitraryConfig { p: opts.p, verified_bound: opts.bound }, corpus)?)
}

fn level_comment(set: &GcsSet) -> String {
    match set.certification() {
        Certification::Verified => "verification: full".into(),
        Certification::Derived => "verification: structural (derived from verified parts above the budget)".into(),
        Certification::Unchecked => "verification: none".into(),
    }
}

fn write_set(set: &GcsSet, out: &Option<PathBuf>, stamp: Stamp, what: String) -> Result<()> {
    let mut comments = vec![what, level_comment(set)];
    comments.extend(stamp.comment());
    let text = write_gcs_records(&comments, &[set.seqs().to_vec()]);
    write_output(out.as_deref(), text.as_bytes())
}

fn write_matrix(h: &PMMatrix, out: &Option<PathBuf>) -> Result<()> {
    let binary = out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "hmat"));
    if binary {
        write_output(out.as_deref(), &write_hmat(h))
    } else {
        write_output(out.as_deref(), write_matrix_text(h).as_bytes())
    }
}

fn report_line(rep: &HadamardReport) -> String {
    format!("order {} {} ({:?})", rep.order, if rep.ok { "verified" } else { "FAILED" }, rep.method)
}

fn check_level(h: &PMMatrix, level: Level) -> Result<()> {
    let rep = match level {
        Level::Full => verify_hadamard_full(h),
        Level::Structural => verify_hadamard(h),
    };
    eprintln!("{}", report_line(&rep));
    if rep.ok {
        Ok(())
    } else {
        Err(Failure::new(VERIFY, format!("matrix failed verification: {:?}", rep.failure)))
    }
}

fn parse_term(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Failure::new(INPUT, format!("expected `x:y`, got `{s}`")))?;
    let num = |x: &str| x.trim().parse::<u64>().map_err(|_| Failure::new(INPUT, format!("bad number `{x}`")));
    Ok((num(a)?, num(b)?))
}

fn pair_set(len: u64) -> Result<GcsSet> {
    let plan = golay_pair_plan(len).ok_or_else(|| Failure::new(UNSUPPORTED, format!("{len} is not a 4-phase Golay number")))?;
    Ok(execute_plan(&plan, None)?)
}

fn run(cmd: Command, stamp: Stamp) -> Result<()> {
    match cmd {
        Command::Pair { n, output } => {
            if n == 0 {
                return Err(Failure::new(INPUT, "length must be positive"));
            }
            let set = pair_set(n)?;
            write_set(&set, &output, stamp, format!("pair of length {n}"))
        }
        Command::Quad { n, opts } => {
            let pl = planner(&opts)?;
            let plan = pl.quad_plan(n).ok_or_else(|| Failure::new(UNSUPPORTED, format!("no quad recipe for length {n}")))?;
            let set = execute_plan(&plan, Some(pl.corpus()))?;
            write_set(&set, &opts.output, stamp, format!("quad of length {n}"))
        }
        Command::Set { n, opts, plan } => {
            let pl = planner(&opts)?;
            let recipe = pl.plan(n)?;
            let set = execute_plan(&recipe, Some(pl.corpus()))?;
            if let Some(path) = &plan {
                write_output(Some(path), recipe.to_json().as_bytes())?;
            }
            write_set(&set, &opts.output, stamp, format!("set of length {n}, cardinality {}", set.cardinality()))
        }
        Command::Cbs { s1, s2, opts } => {
            let pl = planner(&opts)?;
            let plan = pl
                .cbs_plan(s1, s2)
                .ok_or_else(|| Failure::new(UNSUPPORTED, format!("no recipe for CBS({s1}, {s2})")))?;
            let set = execute_plan(&plan, Some(pl.corpus()))?;
            write_set(&set, &opts.output, stamp, format!("CBS({s1}, {s2})"))
        }
        Command::Hadamard { command } => run_hadamard(command),
        Command::Density { k, dense, limit, corpus, output } => {
            let set = length_set(k, dense, limit, &corpus)?;
            let rows = density_rows(&set, &log_samples(limit));
            write_output(output.as_deref(), write_density_csv(&rows).as_bytes())
        }
        Command::Coverage { k, dense, limit, corpus } => {
            let set = length_set(k, dense, limit, &corpus)?;
            let rep = coverage_report(&set);
            let gap = rep.first_gap.map_or("none".to_string(), |g| g.to_string());
            println!("kind={} bound={} first_gap={gap} members={} gaps={}", rep.kind, rep.bound, rep.members, rep.gaps);
            Ok(())
        }
        Command::Verify { file, level, corpus } => verify_file(&file, level, &corpus),
        Command::Corpus { command: CorpusCommand::Load { path } } => {
            let c = load_base_corpus(&path)?;
            let bs: Vec<String> = c.bs().map(|b| b.to_string()).collect();
            println!("records={} b=[{}] supply={}", c.len(), bs.join(","), c.supply().label());
            Ok(())
        }
    }
}

fn length_set(k: u32, dense: bool, limit: u64, corpus: &Option<PathBuf>) -> Result<gcs_core::golay::LengthSet> {
    if k == 0 || limit == 0 {
        return Err(Failure::new(INPUT, "--k and --limit must be positive"));
    }
    if dense && k < 2 {
        return Err(Failure::new(INPUT, "--dense needs --k 2 or more"));
    }
    let supply = match load_corpus(corpus)? {
        Some(c) => c.supply(),
        None => BaseSupply::restricted(),
    };
    Ok(build_sk(limit, k, dense, &supply, &MemoryBudget::from_env())?)
}

fn run_hadamard(cmd: HadamardCommand) -> Result<()> {
    match cmd {
        HadamardCommand::Gs { n, opts } => {
            let pl = planner(&opts)?;
            let plan = pl.quad_plan(n).ok_or_else(|| Failure::new(UNSUPPORTED, format!("no quad recipe for length {n}")))?;
            let quad = execute_plan(&plan, Some(pl.corpus()))?;
            let h = goethals_seidel_8n(&quad)?;
            eprintln!("{}", report_line(&verify_hadamard(&h)));
            write_matrix(&h, &opts.output)
        }
        HadamardCommand::Sp { pairs, cbs, mult, level, spseq, opts } => {
            if cbs.len() != mult.len() {
                return Err(Failure::new(INPUT, format!("{} CBS terms but {} multipliers", cbs.len(), mult.len())));
            }
            if pairs.is_empty() && cbs.is_empty() {
                return Err(Failure::new(INPUT, "give at least one --pairs or --cbs term"));
            }
            let pl = planner(&opts)?;
            let mut pair_inputs = Vec::new();
            for t in &pairs {
                let (l, m) = parse_term(t)?;
                pair_inputs.push((pair_set(l)?, pair_set(m)?));
            }
            let mut cbs_inputs = Vec::new();
            for (t, &m) in cbs.iter().zip(&mult) {
                let (s1, s2) = parse_term(t)?;
                let plan = pl
                    .cbs_plan(s1, s2)
                    .ok_or_else(|| Failure::new(UNSUPPORTED, format!("no recipe for CBS({s1}, {s2})")))?;
                let c = execute_plan(&plan, Some(pl.corpus()))?;
                let mp = pair_set(m)?;
                cbs_inputs.push((c, mp.clone(), mp));
            }
            let out = thm4_sequences(&pair_inputs, &cbs_inputs)?;
            let c = perfect_from_inputs(&out)?;
            if let Some(path) = &spseq {
                write_output(Some(path), write_spseq(&c).as_bytes())?;
            }
            let v = c.order().trailing_zeros();
            let h = block_circulant_from_perfect(&c, &sylvester(v))?;
            check_level(&h, level)?;
            write_matrix(&h, &opts.output)
        }
        HadamardCommand::Plan { m, build, witness_bound, output } => {
            let config = AsymptoticConfig { witness_bound, ..Default::default() };
            let plan = asymptotic_plan_with(m, &config)?;
            if build {
                let h = realize_plan(&plan, None)?;
                eprintln!("{}", report_line(&verify_hadamard(&h)));
                write_matrix(&h, &output)
            } else {
                let json = serde_json::to_string_pretty(&plan).expect("plans serialize");
                write_output(output.as_deref(), format!("{json}\n").as_bytes())
            }
        }
    }
}

fn verify_file(path: &Path, level: Level, corpus: &Option<PathBuf>) -> Result<()> {
    let bytes = std::fs::read(path).map_err(|e| Failure::new(INPUT, format!("{}: {e}", path.display())))?;
    if bytes.starts_with(b"HMAT") {
        let h = read_hmat(&bytes).map_err(|e| codec_failure(path, e))?;
        return check_level(&h, level);
    }
    if bytes.starts_with(b"GLS1") {
        let s = read_gls(&bytes).map_err(|e| codec_failure(path, e))?;
        println!("{} bound={} members={} first_gap={:?}", s.kind(), s.bound(), s.count(), s.first_gap());
        return Ok(());
    }
    let text = String::from_utf8(bytes).map_err(|_| Failure::new(INPUT, format!("{}: not UTF-8", path.display())))?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    if first.starts_with("order") {
        let h = parse_matrix_text(&text).map_err(|e| codec_failure(path, e))?;
        return check_level(&h, level);
    }
    if first.starts_with("#spseq") {
        let c = parse_spseq(&text).map_err(|e| codec_failure(path, e))?;
        check_perfect(&c)?;
        println!("perfect sequence over SP_{} of length {}", c.order(), c.len());
        return Ok(());
    }
    if first.starts_with('{') {
        let plan = ConstructionPlan::from_json(&text).map_err(|e| Failure::new(INPUT, e.to_string()))?;
        plan.check()?;
        let corpus = load_corpus(corpus)?;
        let set = execute_plan(&plan, corpus.as_ref())?;
        println!("plan builds length {} cardinality {}", plan.length, set.cardinality());
        return Ok(());
    }
    let records = parse_gcs_records(&text).map_err(|e| codec_failure(path, e))?;
    if records.is_empty() {
        return Err(Failure::new(INPUT, format!("{}: no records", path.display())));
    }
    for (k, seqs) in records.into_iter().enumerate() {
        let set = GcsSet::certify(seqs).map_err(|e| Failure::new(VERIFY, format!("record {}: {e}", k + 1)))?;
        let shape = if set.cbs_shape().is_some() { " (base sequences)" } else { "" };
        println!("record {}: cardinality {} length {} ok{shape}", k + 1, set.cardinality(), set.max_len());
    }
    Ok(())
}
