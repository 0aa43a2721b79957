use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use mapbench::generators::{gen_composite, gen_planted, gen_random, load_cs, read_cs_text};
use mapbench::heuristics::{GreedyConfig, RunMetrics};
use mapbench::report::{
    check_memory, emit_details, emit_report, make_label, parse_heuristics, run_experiment,
    scaling_probe, ExperimentSpec, Family, HeuristicKind, ReportFormat,
    DEFAULT_MAX_WEIGHT_BYTES,
};
use mapbench::{Error, Instance, Result};

/// Construction heuristics benchmark for the multidimensional assignment
/// problem.
#[derive(Parser)]
#[command(name = "mapbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded instance files.
    Gen {
        /// Instance family: random | composite | planted
        #[arg(long)]
        family: String,
        /// Dimension count.
        #[arg(long)]
        s: usize,
        /// Per-dimension size.
        #[arg(long)]
        n: usize,
        /// Instances to generate; indices 1..=count drive the seeds.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Write the binary format instead of text.
        #[arg(long)]
        binary: bool,
        /// Weight-tensor byte budget.
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT_BYTES)]
        max_bytes: u64,
    },
    /// Run a timed experiment and print the report table.
    Run {
        /// Instance family: random | composite | planted | cs
        #[arg(long)]
        family: String,
        /// Dimension count (ignored for cs: the file fixes it).
        #[arg(long, default_value_t = 3)]
        s: usize,
        /// Per-dimension size (ignored for cs).
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Instances per experiment.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Comma-separated heuristics to time.
        #[arg(long, default_value = "greedy,maxregret,rom,shiftrom")]
        heuristics: String,
        /// Solve each instance exactly for the reference value.
        #[arg(long)]
        exact: bool,
        /// Output format: csv | md
        #[arg(long, default_value = "md")]
        format: String,
        /// Greedy candidate buffer capacity.
        #[arg(long, default_value_t = 64)]
        buffer_size: usize,
        /// Worker threads for instance preparation.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Data file for the cs family.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Timed repetitions per (heuristic, instance).
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Also print per-instance rows.
        #[arg(long)]
        details: bool,
        /// Weight-tensor byte budget.
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT_BYTES)]
        max_bytes: u64,
    },
    /// Time one heuristic across sizes and fit the growth exponent.
    Scale {
        /// Heuristic to probe.
        #[arg(long)]
        heuristic: String,
        /// Dimension count.
        #[arg(long, default_value_t = 3)]
        s: usize,
        /// Comma-separated sizes, at least 3, strictly increasing.
        #[arg(long)]
        n: String,
        /// Timed repetitions per size (best is kept).
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Family supplying the probe instances.
        #[arg(long, default_value = "random")]
        family: String,
        /// Weight-tensor byte budget.
        #[arg(long, default_value_t = DEFAULT_MAX_WEIGHT_BYTES)]
        max_bytes: u64,
    },
    /// Run one heuristic on an instance file and print the solution.
    Solve {
        /// Instance file: text, binary, or CS data.
        #[arg(long = "in")]
        input: PathBuf,
        /// Heuristic to run.
        #[arg(long)]
        heuristic: String,
        /// Print the weight-read counter.
        #[arg(long)]
        metrics: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Gen {
            family,
            s,
            n,
            count,
            out,
            binary,
            max_bytes,
        } => cmd_gen(&family, s, n, count, &out, binary, max_bytes),
        Command::Run {
            family,
            s,
            n,
            count,
            heuristics,
            exact,
            format,
            buffer_size,
            threads,
            input,
            reps,
            details,
            max_bytes,
        } => {
            let mut spec = ExperimentSpec::new(family.parse()?, s, n);
            spec.cs_path = input;
            spec.count = count;
            spec.heuristics = parse_heuristics(&heuristics)?;
            spec.use_exact = exact;
            spec.buffer_capacity = buffer_size;
            spec.threads = threads;
            spec.repetitions = reps;
            spec.max_weight_bytes = max_bytes;
            let format: ReportFormat = format.parse()?;
            let report = run_experiment(&spec)?;
            print!(
                "{}",
                emit_report(&report.heuristics, std::slice::from_ref(&report.row), format)
            );
            if details {
                println!();
                print!(
                    "{}",
                    emit_details(&report.heuristics, &report.row.label, &report.instances, format)
                );
            }
            Ok(())
        }
        Command::Scale {
            heuristic,
            s,
            n,
            reps,
            family,
            max_bytes,
        } => cmd_scale(&heuristic, s, &n, reps, &family, max_bytes),
        Command::Solve {
            input,
            heuristic,
            metrics,
        } => cmd_solve(&input, &heuristic, metrics),
    }
}

fn cmd_gen(
    family: &str,
    s: usize,
    n: usize,
    count: usize,
    out: &Path,
    binary: bool,
    max_bytes: u64,
) -> Result<()> {
    let family: Family = family.parse()?;
    if family == Family::Cs {
        return Err(Error::Format(
            "cs instances are loaded from files, not generated; use --family random|composite|planted".into(),
        ));
    }
    check_memory(s, n, max_bytes)?;
    fs::create_dir_all(out)?;
    let label = make_label(s, family, n);
    for i in 1..=count {
        let instance = match family {
            Family::Random => gen_random(s, n, i)?,
            Family::Composite => gen_composite(s, n, i)?.0,
            Family::Planted => {
                let planted = gen_planted(s, n, i)?;
                println!("{label}_{i}: optimum {}", planted.optimum);
                planted.instance
            }
            Family::Cs => unreachable!(),
        };
        let path = out.join(format!("{label}_{i}.{}", if binary { "mapbin" } else { "map" }));
        if binary {
            instance.write_binary_file(&path)?;
        } else {
            instance.write_text_file(&path)?;
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_scale(
    heuristic: &str,
    s: usize,
    n_list: &str,
    reps: usize,
    family: &str,
    max_bytes: u64,
) -> Result<()> {
    let kind: HeuristicKind = heuristic.parse()?;
    let family: Family = family.parse()?;
    let ns: Vec<usize> = n_list
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Format(format!("invalid size {t:?}")))
        })
        .collect::<Result<_>>()?;
    let cfg = GreedyConfig::default();
    let report = scaling_probe(
        &ns,
        reps,
        |n| {
            check_memory(s, n, max_bytes)?;
            match family {
                Family::Random => gen_random(s, n, 1),
                Family::Composite => Ok(gen_composite(s, n, 1)?.0),
                Family::Planted => Ok(gen_planted(s, n, 1)?.instance),
                Family::Cs => Err(Error::Format("cs family has fixed sizes".into())),
            }
        },
        |inst| {
            kind.run(inst, &cfg, &mut RunMetrics::new());
        },
    )?;
    println!("heuristic {} at s={s} on {}", kind.name(), family);
    for point in &report.points {
        println!("n={} time_ms={}", point.n, point.millis.round() as i64);
    }
    println!("fitted exponent: {:.2}", report.exponent);
    Ok(())
}

fn cmd_solve(input: &Path, heuristic: &str, metrics: bool) -> Result<()> {
    let kind: HeuristicKind = heuristic.parse()?;
    let instance = read_any_instance(input)?;
    let cfg = GreedyConfig::default();
    let mut run_metrics = RunMetrics::new();
    kind.run(&instance, &cfg, &mut RunMetrics::new()); // warm-up
    let start = Instant::now();
    let assignment = kind.run(&instance, &cfg, &mut run_metrics);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let objective = assignment.objective(&instance)?;
    println!(
        "instance s={} n={} ({} weights)",
        instance.s(),
        instance.n(),
        instance.num_vectors()
    );
    println!("heuristic {}", kind.name());
    println!("objective {objective}");
    println!("time_ms {}", elapsed_ms.round() as i64);
    if metrics {
        println!("weight_reads {}", run_metrics.weight_reads);
    }
    for row in assignment.rows() {
        println!("{row}");
    }
    Ok(())
}

/// Reads an instance in any supported format: MAPBIN01 binary, MAP text, or
/// CS decomposed 3-AP data.
fn read_any_instance(path: &Path) -> Result<Instance> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"MAPBIN01") {
        return Instance::from_binary(&bytes);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Format("instance file is neither MAPBIN01 nor text".into()))?;
    match text.split_whitespace().next() {
        Some("CS") => load_cs(&read_cs_text(&text)?),
        _ => Instance::from_text(&text),
    }
}
