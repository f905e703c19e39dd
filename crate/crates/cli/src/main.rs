use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use nilfill::bench::{bench_compression, bench_fill, write_csv};
use nilfill::format::{parse_presentation, validate_trace, write_presentation, write_trace};
use nilfill_core::compression::{ChainContext, CommutatorSpec};
use nilfill_core::filler::{build_filler, corpus_generate, fill};
use nilfill_core::oracle::{Oracle, TruncatedSeries};
use nilfill_core::sequence::replay;
use nilfill_core::{build_chain_presentation, Generator, Presentation, Word};

#[derive(Parser)]
#[command(name = "nilfill", version, about = "Null-sequences, compression and fillings for free nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a chain or filler presentation.
    Present {
        #[arg(long)]
        class: u32,
        #[arg(long, conflicts_with = "gens")]
        chain: Option<u32>,
        #[arg(long)]
        gens: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Power compression z_1^(n^c) -> z~^(n^c).
    Compress {
        #[arg(long)]
        class: u32,
        #[arg(long)]
        n: u64,
        /// Commutator letters, e.g. "x1,x1,x2"; defaults to x1..xc.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Fill a null-homotopic word in the filler presentation.
    Fill {
        #[arg(long)]
        class: u32,
        #[arg(long)]
        gens: u32,
        /// A file holding the word, or the word itself.
        #[arg(long)]
        word: String,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Replay a trace; the final word must be empty unless --final is given.
    Validate {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long = "final")]
        final_word: Option<String>,
    },
    /// Deterministic null-homotopic words, one per line.
    Corpus {
        #[arg(long)]
        class: u32,
        #[arg(long)]
        gens: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    #[command(subcommand)]
    Oracle(OracleCommand),
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    class: u32,
    #[arg(long, default_value_t = 2)]
    gens: u32,
    word: String,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Nonzero coefficients of the truncated series, `MONOMIAL COEFF`.
    Eval(OracleArgs),
    /// Exit 0 iff the word is trivial.
    Check(OracleArgs),
}

#[derive(Args)]
struct BenchOut {
    #[arg(long)]
    csv: PathBuf,
    /// Where traces are written and re-read.
    #[arg(long)]
    trace_dir: Option<PathBuf>,
    /// Write 0 in the seconds column.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum BenchCommand {
    Compression {
        #[arg(long)]
        class: u32,
        #[arg(long, default_value_t = 2)]
        n_min: u64,
        #[arg(long)]
        n_max: Option<u64>,
        #[command(flatten)]
        out: BenchOut,
    },
    Fill {
        #[arg(long)]
        class: u32,
        #[arg(long, default_value_t = 2)]
        gens: u32,
        /// Word length budgets, e.g. 8,16,24.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: BenchOut,
    },
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Rejected(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected(e)) => {
            eprintln!("{e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn sibling_presentation(trace: &Path) -> PathBuf {
    let mut name = trace.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".pres");
    trace.with_file_name(name)
}

fn write_with_presentation(p: &Presentation, t: &nilfill_core::PSequence, trace: &Path) -> anyhow::Result<()> {
    let pres = sibling_presentation(trace);
    fs::write(&pres, write_presentation(p)).with_context(|| format!("writing {}", pres.display()))?;
    let label = pres.file_name().unwrap().to_string_lossy().into_owned();
    fs::write(trace, write_trace(p, t, &label)).with_context(|| format!("writing {}", trace.display()))?;
    Ok(())
}

fn read_word(p: &Presentation, arg: &str) -> anyhow::Result<Word> {
    let text = if Path::new(arg).is_file() { fs::read_to_string(arg)? } else { arg.to_string() };
    p.parse_word(text.trim()).map_err(|e| anyhow!("bad word: {e}"))
}

fn print_metrics(m: &nilfill_core::Metrics) {
    println!("ok area={} fl={} height={}", m.area, m.fl, m.height);
}

fn format_monomial(monomial: &[usize], names: &[String]) -> String {
    if monomial.is_empty() {
        return String::from("1");
    }
    monomial.iter().map(|&s| names[s].as_str()).collect::<Vec<_>>().join("*")
}

fn series_lines(s: &TruncatedSeries, names: &[String]) -> Vec<String> {
    let m = s.symbols();
    let mut out = Vec::new();
    for d in 0..=s.degree_cap() {
        for (i, coeff) in s.degree_part(d).iter().enumerate() {
            if coeff.bits() == 0 {
                continue;
            }
            let mut monomial = vec![0; d];
            let mut rest = i;
            for slot in monomial.iter_mut().rev() {
                *slot = rest % m;
                rest /= m;
            }
            out.push(format!("{} {}", format_monomial(&monomial, names), coeff));
        }
    }
    out
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Present { class, chain, gens, out } => {
            let p = match (chain, gens) {
                (Some(k), None) => build_chain_presentation(class, k),
                (None, Some(m)) => build_filler(class, m).map_err(|e| anyhow!("{e}"))?.presentation,
                _ => return Err(anyhow!("give exactly one of --chain or --gens").into()),
            };
            fs::write(&out, write_presentation(&p)).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Compress { class, n, spec, trace } => {
            let ctx = match spec {
                None => ChainContext::standard(class as usize),
                Some(text) => {
                    let names: Vec<&str> = text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
                    if names.len() != class as usize {
                        return Err(anyhow!("--spec has {} letters, expected {class}", names.len()).into());
                    }
                    let mut ids = Vec::new();
                    for name in &names {
                        let i: u32 = name
                            .strip_prefix('x')
                            .and_then(|d| d.parse().ok())
                            .filter(|&i| i >= 1)
                            .ok_or_else(|| anyhow!("spec letters must be x1, x2, ...: {name}"))?;
                        ids.push(i - 1);
                    }
                    let m = ids.iter().max().unwrap() + 1;
                    let generators =
                        (1..=m).map(|i| Generator { name: format!("x{i}"), weight: 1, definition: None }).collect();
                    let host = Presentation::new(generators, Vec::new(), class);
                    let spec = CommutatorSpec::new(ids.into_iter().map(nilfill_core::Letter::pos).collect())
                        .map_err(|e| anyhow!("{e}"))?;
                    ChainContext::new(&host, spec).map_err(|e| anyhow!("{e}"))?
                }
            };
            let pc = ctx.power_compression(n).map_err(|e| anyhow!("{e}"))?;
            let p = ctx.level_presentation(1);
            write_with_presentation(p, &pc.sequence, &trace)?;
            let (m, _) = replay(p, &pc.sequence).map_err(|e| Failure::Rejected(anyhow!("{e}")))?;
            println!("ok area={} fl={} height={} working_fl={}", m.area, m.fl, m.height, pc.working_fl);
        }
        Command::Fill { class, gens, word, trace } => {
            let fp = build_filler(class, gens).map_err(|e| anyhow!("{e}"))?;
            let w = read_word(&fp.presentation, &word)?;
            let seq = fill(&w, &fp).map_err(|e| Failure::Rejected(anyhow!("{e}")))?;
            write_with_presentation(&fp.presentation, &seq, &trace)?;
            let (m, _) = replay(&fp.presentation, &seq).map_err(|e| Failure::Rejected(anyhow!("{e}")))?;
            print_metrics(&m);
        }
        Command::Validate { trace, presentation, final_word } => {
            let pres_text = fs::read_to_string(&presentation).with_context(|| format!("reading {}", presentation.display()))?;
            let p = parse_presentation(&pres_text).map_err(|e| anyhow!("{}: {e}", presentation.display()))?;
            let trace_text = fs::read_to_string(&trace).with_context(|| format!("reading {}", trace.display()))?;
            let target = final_word.map(|w| p.parse_word(&w).map_err(|e| anyhow!("bad --final word: {e}"))).transpose()?;
            let verdict = validate_trace(&trace_text, &p, target.as_ref());
            println!("{verdict}");
            if !verdict.is_ok() {
                return Err(Failure::Rejected(anyhow!("validation failed")));
            }
        }
        Command::Corpus { class, gens, n, count, seed } => {
            let fp = build_filler(class, gens).map_err(|e| anyhow!("{e}"))?;
            for w in corpus_generate(&fp, n, count, seed) {
                println!("{}", fp.presentation.format_word(&w));
            }
        }
        Command::Oracle(cmd) => {
            let (args, check) = match cmd {
                OracleCommand::Eval(a) => (a, false),
                OracleCommand::Check(a) => (a, true),
            };
            let fp = build_filler(args.class, args.gens).map_err(|e| anyhow!("{e}"))?;
            let p = &fp.presentation;
            let w = p.parse_word(&args.word).map_err(|e| anyhow!("bad word: {e}"))?;
            let oracle = Oracle::new(p, args.class);
            if check {
                if !oracle.is_identity(&w) {
                    return Err(Failure::Rejected(anyhow!("not the identity in class {}", args.class)));
                }
            } else {
                let names: Vec<String> =
                    p.generators.iter().filter(|g| g.weight == 1).map(|g| g.name.to_uppercase()).collect();
                for line in series_lines(&oracle.eval(&w), &names) {
                    println!("{line}");
                }
            }
        }
        Command::Bench(BenchCommand::Compression { class, n_min, n_max, out }) => {
            let n_max = n_max.unwrap_or(match class {
                1 | 2 => 10,
                _ => 5,
            });
            let ns: Vec<u64> = (n_min.max(2)..=n_max).collect();
            let dir = out.trace_dir.clone().unwrap_or_else(|| std::env::temp_dir().join("nilfill-bench"));
            let result = bench_compression(class, &ns, &dir).map_err(|e| Failure::Rejected(anyhow!("{e}")))?;
            let file = fs::File::create(&out.csv).with_context(|| format!("creating {}", out.csv.display()))?;
            write_csv(&result.records, file, !out.no_timing).map_err(|e| anyhow!("{e}"))?;
            match result.fit {
                Some(f) => println!("slope={:.4} intercept={:.4} residual={:.4}", f.slope, f.intercept, f.residual),
                None => println!("slope=n/a"),
            }
            println!("max_fl_over_n={:.3} max_working_fl_over_n={:.3}", result.max_fl_ratio, result.max_working_fl_ratio);
        }
        Command::Bench(BenchCommand::Fill { class, gens, n, count, seed, out }) => {
            if n.is_empty() {
                return Err(anyhow!("give at least one --n").into());
            }
            let dir = out.trace_dir.clone().unwrap_or_else(|| std::env::temp_dir().join("nilfill-bench"));
            let result = bench_fill(class, gens, &n, count, seed, &dir).map_err(|e| Failure::Rejected(anyhow!("{e}")))?;
            let file = fs::File::create(&out.csv).with_context(|| format!("creating {}", out.csv.display()))?;
            write_csv(&result.records, file, !out.no_timing).map_err(|e| anyhow!("{e}"))?;
            let c = result.certificate;
            println!(
                "lambda={:.4} area_lambda={:.4} fl_lambda={:.4} max_register_ratio={:.4}",
                c.lambda, c.area_lambda, c.fl_lambda, result.max_register_ratio
            );
        }
    }
    Ok(())
}
