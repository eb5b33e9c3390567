use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lexboot::bootstrap::{explain, run_passes, run_until_converged, RunConfig, RunOutcome};
use lexboot::corpus::{load_corpus, Corpus, DictEntry, Pos};
use lexboot::lkb::{dump_line, LkbSnapshot};
use lexboot::patterns::{PatternLists, RelationLabel};

#[derive(Parser)]
#[command(
    name = "lexboot",
    version,
    about = "Acquire semantic relations from dictionary definitions in several passes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run passes over a dictionary and write the resulting LKB dump
    Run(RunArgs),
    /// Print the triples whose source is LEMMA
    Query {
        lkb: PathBuf,
        lemma: String,
        #[arg(long)]
        label: Option<RelationLabel>,
    },
    /// Show sketches, reattachments and fired patterns for one sense
    Explain {
        dict: PathBuf,
        lkb: PathBuf,
        /// lemma/pos or lemma/pos/sense-label, e.g. plantain/n
        sense: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print a dump, optionally as it stood after pass K
    Dump {
        lkb: PathBuf,
        #[arg(long, value_name = "K")]
        pass: Option<u32>,
    },
    /// Triple counts per label and pass
    Stats { lkb: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    dict: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    /// Run exactly N passes
    #[arg(long, value_name = "N", conflicts_with = "until_converged", value_parser = clap::value_parser!(u32).range(1..))]
    passes: Option<u32>,
    /// Run until a pass adds nothing (the default)
    #[arg(long)]
    until_converged: bool,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    max_passes: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Leave unresolved sites out of the reports
    #[arg(long)]
    no_unresolved: bool,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct Overrides {
    /// Comma-separated transparent genus heads
    #[arg(long, value_delimiter = ',')]
    transparent_heads: Option<Vec<String>>,
    /// Comma-separated portion heads for MATERIAL
    #[arg(long, value_delimiter = ',')]
    portion_heads: Option<Vec<String>>,
    /// Comma-separated substance seeds for MATERIAL
    #[arg(long, value_delimiter = ',')]
    substances: Option<Vec<String>>,
    /// Similarity weights as PAIR,TEXT
    #[arg(long, value_parser = parse_weights)]
    weights: Option<(u64, u64)>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

fn parse_weights(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or("expected two comma-separated integers")?;
    let p = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

impl Overrides {
    fn apply(&self, mut config: RunConfig) -> RunConfig {
        let lower = |v: &Vec<String>| v.iter().map(|s| s.trim().to_lowercase()).collect();
        let PatternLists {
            transparent_heads,
            portion_heads,
            substance_seeds,
        } = &mut config.lists;
        if let Some(v) = &self.transparent_heads {
            *transparent_heads = lower(v);
        }
        if let Some(v) = &self.portion_heads {
            *portion_heads = lower(v);
        }
        if let Some(v) = &self.substances {
            *substance_seeds = lower(v);
        }
        if let Some(w) = self.weights {
            config.similarity_weights = w;
        }
        config
    }
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_corpus(BufReader::new(file)).with_context(|| format!("{}", path.display()))
}

fn read_lkb(path: &Path) -> Result<LkbSnapshot> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    LkbSnapshot::deserialize(&text).with_context(|| format!("{}", path.display()))
}

fn cmd_run(args: &RunArgs, out: &mut impl Write) -> Result<()> {
    let corpus = read_corpus(&args.dict)?;
    let mut config = args.overrides.apply(RunConfig {
        max_passes: args.max_passes,
        ..RunConfig::default()
    });
    config.emit_unresolved = !args.no_unresolved;
    let outcome: RunOutcome = match args.passes {
        Some(n) => run_passes(&corpus, &config, n)?,
        None => run_until_converged(&corpus, &config)?,
    };
    fs::write(&args.out, outcome.snapshot.serialize())
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    for r in &outcome.reports {
        match args.format {
            Format::Text => write!(out, "{}", r.render_text())?,
            Format::Tsv => write!(out, "{}", r.render_tsv())?,
        }
    }
    if args.passes.is_none() {
        let status = if outcome.converged {
            "converged"
        } else {
            "max-passes-exceeded"
        };
        match args.format {
            Format::Text => writeln!(
                out,
                "status: {status} after {} passes",
                outcome.reports.len()
            )?,
            Format::Tsv => writeln!(out, "status\t{status}\t{}", outcome.reports.len())?,
        }
    }
    Ok(())
}

fn cmd_query(
    lkb: &Path,
    lemma: &str,
    label: Option<RelationLabel>,
    out: &mut impl Write,
) -> Result<()> {
    let snapshot = read_lkb(lkb)?;
    for t in snapshot.by_lemma(&lemma.to_lowercase()) {
        if label.is_none_or(|l| l == t.label) {
            writeln!(out, "{}", dump_line(t))?;
        }
    }
    Ok(())
}

fn select_senses<'a>(corpus: &'a Corpus, selector: &str) -> Result<Vec<&'a DictEntry>> {
    let mut parts = selector.splitn(3, '/');
    let lemma = parts.next().unwrap_or_default().to_lowercase();
    let pos = match parts.next() {
        Some(code) => Some(
            Pos::from_code(code)
                .with_context(|| format!("unknown pos {code:?} in {selector:?}"))?,
        ),
        None => None,
    };
    let label = parts.next();
    let found: Vec<&DictEntry> = corpus
        .lookup(&lemma)
        .into_iter()
        .filter(|e| pos.is_none_or(|p| p == e.id.pos))
        .filter(|e| label.is_none_or(|l| l == e.id.sense_label))
        .collect();
    if found.is_empty() {
        bail!("unknown sense {selector:?}");
    }
    Ok(found)
}

fn cmd_explain(
    dict: &Path,
    lkb: &Path,
    sense: &str,
    overrides: &Overrides,
    out: &mut impl Write,
) -> Result<()> {
    let corpus = read_corpus(dict)?;
    let snapshot = read_lkb(lkb)?;
    let config = overrides.apply(RunConfig::default());
    for (i, entry) in select_senses(&corpus, sense)?.into_iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        write!(out, "{}", explain(entry, &corpus, &snapshot, &config))?;
    }
    Ok(())
}

fn cmd_dump(lkb: &Path, pass: Option<u32>, out: &mut impl Write) -> Result<()> {
    let snapshot = read_lkb(lkb)?;
    let snapshot = match pass {
        Some(k) if k > snapshot.pass_completed() => {
            bail!(
                "dump has {} passes, asked for pass {k}",
                snapshot.pass_completed()
            )
        }
        Some(k) => snapshot.at_pass(k),
        None => snapshot,
    };
    write!(out, "{}", snapshot.serialize())?;
    Ok(())
}

fn cmd_stats(lkb: &Path, out: &mut impl Write) -> Result<()> {
    let snapshot = read_lkb(lkb)?;
    let passes = snapshot.pass_completed();
    write!(out, "label")?;
    for k in 1..=passes {
        write!(out, "\tpass {k}")?;
    }
    writeln!(out, "\ttotal")?;
    let mut column_totals = vec![0usize; passes as usize];
    for label in RelationLabel::ALL {
        write!(out, "{label}")?;
        let mut total = 0;
        for k in 1..=passes {
            let n = snapshot
                .triples()
                .iter()
                .filter(|t| t.label == label && t.pass == k)
                .count();
            column_totals[k as usize - 1] += n;
            total += n;
            write!(out, "\t{n}")?;
        }
        writeln!(out, "\t{total}")?;
    }
    write!(out, "all")?;
    for n in &column_totals {
        write!(out, "\t{n}")?;
    }
    writeln!(out, "\t{}", snapshot.len())?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run(args) => cmd_run(&args, &mut out),
        Command::Query { lkb, lemma, label } => cmd_query(&lkb, &lemma, label, &mut out),
        Command::Explain {
            dict,
            lkb,
            sense,
            overrides,
        } => cmd_explain(&dict, &lkb, &sense, &overrides, &mut out),
        Command::Dump { lkb, pass } => cmd_dump(&lkb, pass, &mut out),
        Command::Stats { lkb } => cmd_stats(&lkb, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
