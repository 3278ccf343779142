//! `lnde` — run the distributed adder, search classical strategies, inspect
//! ANFs, and drive the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
//! limit.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lnde::verify::DEFAULT_SEED;
use lnde::{
    bit_string, channel_count, parse_bit_string, run_adder_statevector, run_quantum_adder,
    run_verification, search_realizable, sum_digit_function, AdderTranscript, BooleanFunction,
    Error, SearchResult, VerifyOptions,
};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lnde",
    version,
    about = "Locally nonlinear distributed evaluation simulator",
    after_help = "The default seed is 0xA11CE; override per run with --seed or globally with \
                  the LNDE_SEED environment variable."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the entanglement-assisted adder and emit transcripts
    Add(AddArgs),
    /// Exhaustively search classical strategies for a target digit
    Search(SearchArgs),
    /// Print the algebraic normal form and degree of a function
    Anf(AnfArgs),
    /// Run the invariant suite and exit nonzero on any failure
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Ledger,
    Statevector,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Table,
}

#[derive(Args)]
struct AddArgs {
    /// Input bits as a 0/1 string, x0 first
    #[arg(long)]
    inputs: Option<String>,
    /// Sender count; required with --random, checked against --inputs
    #[arg(long)]
    n: Option<usize>,
    /// Run this many random input vectors instead of one explicit vector
    #[arg(long, conflicts_with = "inputs")]
    random: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Backend::Ledger)]
    backend: Backend,
    /// Directory to write transcript files into
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Args)]
struct SearchArgs {
    /// Sender count N
    #[arg(long)]
    n: usize,
    /// Channel count; defaults to floor(log2 N) + 1
    #[arg(long)]
    m: Option<usize>,
    /// Target digit function, e.g. s1
    #[arg(long)]
    target: String,
    /// Cap on the number of strategies to enumerate
    #[arg(long)]
    budget: Option<u128>,
    /// Directory to write the search report into
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the sweep
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct AnfArgs {
    /// Digit function selector N:q (e.g. 4:2 for s_2 of four senders)
    #[arg(long, conflicts_with = "tt")]
    digit: Option<String>,
    /// Truth table literal `k=<arity>:<hex>`, most significant index first
    #[arg(long)]
    tt: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict sweeps to small N (the default)
    #[arg(long)]
    quick: bool,
    /// Extend to N <= 12 exhaustive, N = 16 sampled, and the 8.4M-strategy sweep
    #[arg(long, conflicts_with = "quick")]
    full: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the sweeps
    #[arg(long)]
    jobs: Option<usize>,
    /// Negative control: invert the senders' rotation direction
    #[arg(long, hide = true)]
    flip_rotation_sign: bool,
    /// Directory to write the report into
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Add(args) => cmd_add(args),
        Command::Search(args) => cmd_search(args),
        Command::Anf(args) => cmd_anf(args),
        Command::Verify(args) => cmd_verify(args),
    };
    ExitCode::from(code)
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("LNDE_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_SEED)
}

fn usage_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn error_exit(err: &Error) -> u8 {
    eprintln!("error: {err}");
    match err {
        Error::InvalidInput(_) => EXIT_USAGE,
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        _ => EXIT_FAILED,
    }
}

fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), u8> {
    if let Err(err) = fs::create_dir_all(dir) {
        eprintln!("error: cannot create {}: {err}", dir.display());
        return Err(EXIT_FAILED);
    }
    let path = dir.join(name);
    if let Err(err) = fs::write(&path, contents) {
        eprintln!("error: cannot write {}: {err}", path.display());
        return Err(EXIT_FAILED);
    }
    Ok(())
}

fn cmd_add(args: AddArgs) -> u8 {
    let seed = resolve_seed(args.seed);
    let vectors: Vec<Vec<bool>> = if let Some(text) = &args.inputs {
        let bits = match parse_bit_string(text) {
            Ok(bits) => bits,
            Err(err) => return usage_error(&err.to_string()),
        };
        if let Some(n) = args.n {
            if n != bits.len() {
                return usage_error(&format!(
                    "--inputs has {} bits but --n is {n}",
                    bits.len()
                ));
            }
        }
        vec![bits]
    } else if let Some(count) = args.random {
        let Some(n) = args.n else {
            return usage_error("--random needs --n");
        };
        if n < 2 {
            return usage_error("the adder needs at least two senders");
        }
        // Input sampling uses its own generator so protocol draws stay
        // seed-aligned across runs.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
        (0..count)
            .map(|_| (0..n).map(|_| rng.random()).collect())
            .collect()
    } else {
        return usage_error("provide --inputs <bits> or --random <count> with --n");
    };

    if vectors.iter().any(|v| v.len() < 2) {
        return usage_error("the adder needs at least two senders");
    }

    if args.format == OutputFormat::Table {
        println!("run\tN\tm\tseed\tinputs\toutputs\tS\tghz_consumed\tbackend");
    }

    let backend_name = match args.backend {
        Backend::Ledger => "ledger",
        Backend::Statevector => "statevector",
        Backend::Both => "both",
    };
    let mut verified = 0usize;
    for (index, inputs) in vectors.iter().enumerate() {
        let run_seed = seed.wrapping_add(index as u64);
        let transcript: AdderTranscript = match args.backend {
            Backend::Ledger => match run_quantum_adder(inputs, run_seed) {
                Ok(t) => t,
                Err(err) => return error_exit(&err),
            },
            Backend::Statevector => match run_adder_statevector(inputs, run_seed) {
                Ok(t) => t,
                Err(err) => return error_exit(&err),
            },
            Backend::Both => {
                let ledger = match run_quantum_adder(inputs, run_seed) {
                    Ok(t) => t,
                    Err(err) => return error_exit(&err),
                };
                let dense = match run_adder_statevector(inputs, run_seed) {
                    Ok(t) => t,
                    Err(err) => return error_exit(&err),
                };
                if ledger != dense {
                    eprintln!("error: backends disagree on run {index}");
                    return EXIT_FAILED;
                }
                ledger
            }
        };

        if transcript.output_value() != transcript.sum() {
            eprintln!(
                "error: run {index} produced outputs {} for S={}",
                bit_string(&transcript.outputs),
                transcript.sum()
            );
            return EXIT_FAILED;
        }
        verified += 1;

        match args.format {
            OutputFormat::Text => println!(
                "run={index} inputs={} outputs={} S={} m={} ghz_consumed={} seed={run_seed} backend={backend_name}",
                bit_string(&transcript.inputs),
                bit_string(&transcript.outputs),
                transcript.sum(),
                transcript.channels,
                transcript.ghz_consumed,
            ),
            OutputFormat::Table => println!(
                "{index}\t{}\t{}\t{run_seed}\t{}\t{}\t{}\t{}\t{backend_name}",
                transcript.n_senders,
                transcript.channels,
                bit_string(&transcript.inputs),
                bit_string(&transcript.outputs),
                transcript.sum(),
                transcript.ghz_consumed,
            ),
        }

        if let Some(dir) = &args.out {
            if let Err(code) = write_file(
                dir,
                &format!("transcript_{index:04}.txt"),
                &transcript.to_text(),
            ) {
                return code;
            }
        }
    }
    println!("verified={verified}/{}", vectors.len());
    0
}

fn search_report(result: &SearchResult, target: &str, n: usize, m: usize) -> String {
    let mut out = format!(
        "target={target}\nN={n}\nm={m}\nfeasible={}\nstrategies_examined={}\n",
        result.feasible, result.strategies_examined
    );
    if let Some(witness) = &result.witness {
        for (j, &row) in witness.taps().iter().enumerate() {
            let bits: Vec<bool> = (0..n).map(|i| row >> i & 1 == 1).collect();
            out.push_str(&format!("witness.C[{j}]={}\n", bit_string(&bits)));
        }
        out.push_str(&format!("witness.B={}\n", bit_string(witness.offsets())));
        for (q, receiver) in witness.receivers().iter().enumerate() {
            out.push_str(&format!(
                "witness.H[{q}]={}\n",
                receiver.truth_table().to_hex()
            ));
        }
    }
    out
}

fn cmd_search(args: SearchArgs) -> u8 {
    configure_jobs(args.jobs);
    if args.n == 0 {
        return usage_error("--n must be at least 1");
    }
    let Some(digit) = args
        .target
        .strip_prefix('s')
        .and_then(|q| q.parse::<u32>().ok())
    else {
        return usage_error("--target must name a digit function like s1");
    };
    let target = match sum_digit_function(args.n, digit) {
        Ok(f) => f,
        Err(err) => return error_exit(&err),
    };
    let m = args.m.unwrap_or_else(|| channel_count(args.n));
    if m == 0 {
        return usage_error("--m must be at least 1");
    }

    let started = Instant::now();
    let result = match search_realizable(&target, m, args.budget) {
        Ok(result) => result,
        Err(err) => return error_exit(&err),
    };
    let report = search_report(&result, &args.target, args.n, m);
    print!("{report}");
    println!("wall_time_ms={}", started.elapsed().as_millis());

    if let Some(dir) = &args.out {
        let name = format!("search_{}_n{}_m{}.txt", args.target, args.n, m);
        if let Err(code) = write_file(dir, &name, &report) {
            return code;
        }
    }
    0
}

fn cmd_anf(args: AnfArgs) -> u8 {
    let function: BooleanFunction = if let Some(selector) = &args.digit {
        let Some((n, q)) = selector
            .split_once(':')
            .and_then(|(n, q)| Some((n.parse::<usize>().ok()?, q.parse::<u32>().ok()?)))
        else {
            return usage_error("--digit expects N:q, e.g. 4:2");
        };
        match sum_digit_function(n, q) {
            Ok(f) => f,
            Err(err) => return error_exit(&err),
        }
    } else if let Some(literal) = &args.tt {
        let parsed = literal
            .split_once(':')
            .and_then(|(head, hex)| Some((head.strip_prefix("k=")?.parse::<usize>().ok()?, hex)));
        let Some((arity, hex)) = parsed else {
            return usage_error("--tt expects k=<arity>:<hex>");
        };
        match BooleanFunction::from_text(&format!("k={arity}\n{hex}\n")) {
            Ok(f) => f,
            Err(err) => return error_exit(&err),
        }
    } else {
        return usage_error("provide --digit N:q or --tt k=<arity>:<hex>");
    };

    println!("anf={}", function.anf_string());
    println!("degree={}", function.algebraic_degree());
    0
}

fn cmd_verify(args: VerifyArgs) -> u8 {
    configure_jobs(args.jobs);
    let options = VerifyOptions {
        full: args.full,
        seed: resolve_seed(args.seed),
        flip_rotation_sign: args.flip_rotation_sign,
    };
    let report = run_verification(&options);
    print!("{}", report.to_text());
    if let Some(dir) = &args.out {
        if let Err(code) = write_file(dir, "verify_report.txt", &report.to_text()) {
            return code;
        }
    }
    if report.all_passed() {
        0
    } else {
        EXIT_FAILED
    }
}
