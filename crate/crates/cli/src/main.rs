//! `treedeck` command-line front end.
//!
//! Every report is a `#` header (version, configuration, wall time) followed
//! by tab-separated records. Exit codes: 0 ok, 1 verification failure,
//! 2 usage error, 3 request above the feasibility ceiling.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use treedeck::deck::{self, MultiEngine, SetEngine};
use treedeck::enumerate::{all_shapes, wedderburn};
use treedeck::extremal;
use treedeck::reconstruct::{self, DeckMode, DEFAULT_SHAPE_CEILING};
use treedeck::universal::{self, SearchBudget, CACHE_ENV};
use treedeck::verify::{self, Level};
use treedeck::{Error, TreeShape};

#[derive(Debug, Parser)]
#[command(name = "treedeck", version, about = "Decks, reconstruction and universal trees for binary tree shapes")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// `records` prefixes the body with a `#` header; `plain` prints the body only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Records)]
    format: Format,

    /// Largest number of shapes an exhaustive sweep may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_SHAPE_CEILING)]
    ceiling: u128,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Records,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuantityArg {
    MaxDeck,
    MinSubtrees,
    Singleton,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List all shapes with N leaves in canonical order.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Print canonical codes next to the text form.
        #[arg(long)]
        codes: bool,
    },
    /// Size-J deck of a tree.
    Deck {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        j: usize,
    },
    /// Size-J multideck of a tree.
    Multideck {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        j: usize,
        /// Count leaf subsets directly instead of the dynamic program.
        #[arg(long)]
        bruteforce: bool,
    },
    /// Whether size-J (multi)decks determine the size-N trees; without --j,
    /// the reconstruction number.
    Reconstruct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        multideck: bool,
    },
    /// Two size-N trees with equal size-2k decks, verified.
    Counterexample {
        #[arg(long)]
        n: usize,
    },
    /// Extremal deck sizes and subtree counts over all size-N shapes.
    Extremal {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        quantity: QuantityArg,
    },
    /// Smallest K-universal trees.
    Universal {
        #[arg(long)]
        k: usize,
        /// Largest tree size to scan.
        #[arg(long)]
        max_size: Option<usize>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
        /// Resume log for finished ranges.
        #[arg(long, env = CACHE_ENV)]
        cache: Option<PathBuf>,
    },
    /// Partial sums of ordered factorization counts.
    Kalmar {
        #[arg(long)]
        upto: usize,
    },
    /// u(k) beside the Kalmar sequence for k = 1..=MAX_K.
    Table1 {
        #[arg(long)]
        max_k: usize,
        #[arg(long)]
        max_size: Option<usize>,
        /// Wall-clock budget in seconds per k.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, env = CACHE_ENV)]
        cache: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

struct Report {
    body: String,
    /// Names of failed checks; empty when everything verified.
    failed: Vec<String>,
}

impl Report {
    fn ok(body: String) -> Report {
        Report { body, failed: Vec::new() }
    }

    fn checked(body: String, ok: bool, what: &str) -> Report {
        Report {
            body,
            failed: if ok { Vec::new() } else { vec![what.to_string()] },
        }
    }
}

fn parse_tree(s: &str) -> treedeck::Result<TreeShape> {
    TreeShape::parse_text(s)
}

fn search_budget(
    k: usize,
    max_size: Option<usize>,
    budget: Option<f64>,
    cache: Option<PathBuf>,
) -> treedeck::Result<SearchBudget> {
    let mut b = SearchBudget::default_for(k);
    if max_size.is_some() || budget.is_some() {
        b.max_size = max_size;
    }
    b.deadline = budget
        .map(|s| {
            Duration::try_from_secs_f64(s).map_err(|_| Error::InvalidParameter {
                what: "--budget",
                detail: format!("{s} is not a valid number of seconds"),
            })
        })
        .transpose()?;
    b.cache = cache;
    Ok(b)
}

fn run(cli: &Cli) -> treedeck::Result<Report> {
    let ceiling = cli.ceiling;
    Ok(match &cli.command {
        Command::Enumerate { n, codes } => {
            if *n == 0 {
                return Err(Error::InvalidParameter {
                    what: "--n",
                    detail: "must be positive".into(),
                });
            }
            let count = wedderburn(*n);
            if count > ceiling {
                return Err(Error::Infeasible {
                    what: format!("enumerating the {n}-leaf shapes"),
                    estimate: count,
                    limit: ceiling,
                });
            }
            let mut body = String::new();
            for t in all_shapes(*n) {
                if *codes {
                    body.push_str(&format!("{t}\t{}\n", t.code()));
                } else {
                    body.push_str(&format!("{t}\n"));
                }
            }
            Report::ok(body)
        }
        Command::Deck { tree, j } => {
            let t = parse_tree(tree)?;
            Report::ok(SetEngine::new().deck(&t, *j)?.to_records())
        }
        Command::Multideck { tree, j, bruteforce } => {
            let t = parse_tree(tree)?;
            let d = if *bruteforce {
                deck::multideck_bruteforce(&t, *j)?
            } else {
                MultiEngine::new().multideck(&t, *j)?
            };
            Report::ok(d.to_records())
        }
        Command::Reconstruct { n, j, multideck } => {
            let mode = if *multideck { DeckMode::MultiDeck } else { DeckMode::Deck };
            match j {
                Some(j) => Report::ok(
                    reconstruct::decks_determine_with(*n, *j, mode, ceiling)?.to_records(),
                ),
                None => {
                    let r = reconstruct::reconstruction_number_with(*n, mode, ceiling)?;
                    Report::ok(format!("reconstruction_number\tn={}\tmode={}\tvalue={}\n", r.n, r.mode, r.value))
                }
            }
        }
        Command::Counterexample { n } => {
            let f = reconstruct::counterexample_family(*n)?;
            let v = reconstruct::verify_counterexample(&f);
            let mut body = format!(
                "family\tn={}\tresidue={}\tk={}\tdeck_size={}\tverified={}\tmultidecks_differ={}\n",
                f.n,
                f.residue(),
                f.k,
                f.deck_size(),
                v.holds,
                v.multidecks_differ
            );
            body.push_str(&format!("T1\t{}\nT2\t{}\n", f.t1, f.t2));
            match &f.s {
                Some(s) => body.push_str(&format!("S\t{s}\n")),
                None => body.push_str("S\t-\n"),
            }
            if let Some(d) = &v.difference {
                body.push_str(&format!("difference\t{}\tin={}\tmissing_from={}\n", d.element, d.present_in, d.missing_from));
            }
            if let Some(name) = v.subtree_failure {
                body.push_str(&format!("not_induced\tS\tin={name}\n"));
            }
            Report::checked(body, v.holds, "equal-deck family")
        }
        Command::Extremal { n, quantity } => match quantity {
            QuantityArg::MaxDeck | QuantityArg::MinSubtrees => {
                let r = match quantity {
                    QuantityArg::MaxDeck => extremal::max_deck_bruteforce_with(*n, ceiling)?,
                    _ => extremal::min_subtrees_bruteforce_with(*n, ceiling)?,
                };
                let name = match quantity {
                    QuantityArg::MaxDeck => "max-deck",
                    _ => "min-subtrees",
                };
                let mut body = format!(
                    "extremal\tn={}\tquantity={name}\tvalue={}\tachievers={}\tconsistent={}\n",
                    r.n,
                    r.value,
                    r.achievers.len(),
                    r.consistent
                );
                for t in &r.achievers {
                    body.push_str(&format!("achiever\t{t}\n"));
                }
                Report::checked(body, r.consistent, name)
            }
            QuantityArg::Singleton => {
                let r = extremal::singleton_deck_shapes_with(*n, ceiling)?;
                let mut body = format!(
                    "extremal\tn={}\tquantity=singleton\tvalue=1\tachievers={}\tconsistent={}\n",
                    r.n,
                    r.shapes.len(),
                    r.consistent
                );
                for t in &r.shapes {
                    body.push_str(&format!("achiever\t{t}\n"));
                }
                Report::checked(body, r.consistent, "singleton")
            }
        },
        Command::Universal {
            k,
            max_size,
            budget,
            cache,
        } => {
            let b = search_budget(*k, *max_size, *budget, cache.clone())?;
            Report::ok(universal::min_universal_size(*k, &b)?.to_records())
        }
        Command::Kalmar { upto } => {
            if *upto == 0 {
                return Err(Error::InvalidParameter {
                    what: "--upto",
                    detail: "must be positive".into(),
                });
            }
            let seq = universal::KalmarSequence::new(*upto);
            let mut body = String::from("n\tfactorizations\tpartial_sum\n");
            for (i, (a, s)) in seq.factorizations.iter().zip(&seq.partial_sums).enumerate() {
                body.push_str(&format!("{}\t{a}\t{s}\n", i + 1));
            }
            Report::ok(body)
        }
        Command::Table1 {
            max_k,
            max_size,
            budget,
            cache,
        } => {
            let budgets = (1..=*max_k)
                .map(|k| search_budget(k, *max_size, *budget, cache.clone()))
                .collect::<treedeck::Result<Vec<_>>>()?;
            let rows = universal::table1(*max_k, |k| budgets[k - 1].clone())?;
            Report::ok(universal::table1_records(&rows))
        }
        Command::VerifyAll { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let mut report = Report::ok(String::new());
            for id in 1..=13 {
                let o = verify::run_criterion(id, level);
                if !o.passed {
                    report.failed.push(format!("criterion {} ({})", o.id, o.name));
                }
                report.body.push_str(&o.line());
                report.body.push('\n');
            }
            report
        }
    })
}

fn header(cli: &Cli, elapsed: Duration) -> String {
    let threads = cli
        .threads
        .map_or_else(|| "auto".to_string(), |t| t.to_string());
    format!(
        "# treedeck {}\n# config\tthreads={threads}\tformat={:?}\tceiling={}\tcommand={:?}\n# wall_time_ms\t{}\n",
        env!("CARGO_PKG_VERSION"),
        cli.format,
        cli.ceiling,
        cli.command,
        elapsed.as_millis()
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let started = Instant::now();
    match run(&cli) {
        Ok(report) => {
            if cli.format == Format::Records {
                print!("{}", header(&cli, started.elapsed()));
            }
            print!("{}", report.body);
            if report.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification failed: {}", report.failed.join(", "));
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Infeasible { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e @ (Error::Io(_) | Error::CacheFormat { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
