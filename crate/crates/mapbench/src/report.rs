//! The benchmark harness behind the CLI: runs batches of seeded instances
//! through timed heuristic calls and renders error/time tables.
//!
//! Timings wrap the heuristic call only (generation, exact solving and I/O
//! are excluded), with one discarded warm-up run per (heuristic, instance).
//! Instances may be prepared concurrently, but every timed run executes
//! alone.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use crate::exact::{brute_force, error_percent};
use crate::generators::{gen_composite, gen_planted, gen_random, load_cs, read_cs_file};
use crate::heuristics::{
    greedy_with, max_regret_with, rom_with, shift_rom_with, DimensionRotation, GreedyConfig,
    RunMetrics, DEFAULT_BUFFER_CAPACITY,
};
use crate::instance::{Assignment, Instance};
use crate::{Error, Result};

/// Default weight-tensor memory budget: 2 GiB of 4-byte weights.
pub const DEFAULT_MAX_WEIGHT_BYTES: u64 = 2 * 1024 * 1024 * 1024;

/// Instance family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Random,
    Composite,
    Planted,
    /// Decomposed 3-AP data loaded from a file.
    Cs,
}

impl Family {
    /// Letter used in instance labels like `3r100`.
    pub fn letter(&self) -> &'static str {
        match self {
            Family::Random => "r",
            Family::Composite => "c",
            Family::Planted => "p",
            Family::Cs => "cs",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s {
            "random" => Ok(Family::Random),
            "composite" => Ok(Family::Composite),
            "planted" => Ok(Family::Planted),
            "cs" => Ok(Family::Cs),
            other => Err(Error::Format(format!(
                "unknown family {other:?}, expected random|composite|planted|cs"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Random => "random",
            Family::Composite => "composite",
            Family::Planted => "planted",
            Family::Cs => "cs",
        };
        write!(f, "{name}")
    }
}

/// The heuristics the harness can time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeuristicKind {
    Greedy,
    MaxRegret,
    Rom,
    ShiftRom,
}

impl HeuristicKind {
    pub const ALL: [HeuristicKind; 4] = [
        HeuristicKind::Greedy,
        HeuristicKind::MaxRegret,
        HeuristicKind::Rom,
        HeuristicKind::ShiftRom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            HeuristicKind::Greedy => "greedy",
            HeuristicKind::MaxRegret => "maxregret",
            HeuristicKind::Rom => "rom",
            HeuristicKind::ShiftRom => "shiftrom",
        }
    }

    /// Runs the heuristic on `inst`, recording weight reads into `metrics`.
    pub fn run(&self, inst: &Instance, cfg: &GreedyConfig, metrics: &mut RunMetrics) -> Assignment {
        match self {
            HeuristicKind::Greedy => greedy_with(inst, cfg, metrics),
            HeuristicKind::MaxRegret => max_regret_with(inst, metrics),
            HeuristicKind::Rom => rom_with(inst, DimensionRotation::identity(), metrics),
            HeuristicKind::ShiftRom => shift_rom_with(inst, metrics),
        }
    }
}

impl FromStr for HeuristicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<HeuristicKind> {
        match s {
            "greedy" => Ok(HeuristicKind::Greedy),
            "maxregret" => Ok(HeuristicKind::MaxRegret),
            "rom" => Ok(HeuristicKind::Rom),
            "shiftrom" => Ok(HeuristicKind::ShiftRom),
            other => Err(Error::Format(format!(
                "unknown heuristic {other:?}, expected greedy|maxregret|rom|shiftrom"
            ))),
        }
    }
}

/// Parses a comma-separated heuristic list, keeping the given order.
pub fn parse_heuristics(list: &str) -> Result<Vec<HeuristicKind>> {
    let mut kinds = Vec::new();
    for part in list.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let kind: HeuristicKind = part.parse()?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    if kinds.is_empty() {
        return Err(Error::Format("empty heuristic list".into()));
    }
    Ok(kinds)
}

/// What the reference value in a row means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefKind {
    /// A known exact optimum.
    Optimum,
    /// A provable lower bound (the random family's minimum objective n).
    LowerBound,
    /// Best objective among the executed heuristics; not an optimum.
    BestOfRun,
}

impl RefKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RefKind::Optimum => "opt",
            RefKind::LowerBound => "lb",
            RefKind::BestOfRun => "best",
        }
    }
}

/// One benchmark: `count` seeded instances of a family at fixed (s, n),
/// every selected heuristic timed once per instance.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub family: Family,
    /// Data file for the cs family.
    pub cs_path: Option<PathBuf>,
    pub s: usize,
    pub n: usize,
    /// Instances per experiment; indices 1..=count drive the seeds.
    pub count: usize,
    pub heuristics: Vec<HeuristicKind>,
    /// Timed repetitions per (heuristic, instance); the mean is reported.
    pub repetitions: usize,
    /// Solve each instance exactly for the reference value.
    pub use_exact: bool,
    pub buffer_capacity: usize,
    /// Worker threads for instance preparation; timed runs stay serial.
    pub threads: usize,
    pub max_weight_bytes: u64,
}

impl ExperimentSpec {
    pub fn new(family: Family, s: usize, n: usize) -> ExperimentSpec {
        ExperimentSpec {
            family,
            cs_path: None,
            s,
            n,
            count: 10,
            heuristics: HeuristicKind::ALL.to_vec(),
            repetitions: 1,
            use_exact: false,
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            threads: 1,
            max_weight_bytes: DEFAULT_MAX_WEIGHT_BYTES,
        }
    }
}

/// Refuses instances whose weight tensor would not fit the byte budget.
pub fn check_memory(s: usize, n: usize, limit: u64) -> Result<()> {
    let bytes = (n as u128).saturating_pow(s as u32).saturating_mul(4);
    if bytes > limit as u128 {
        return Err(Error::MemoryLimit { bytes, limit });
    }
    Ok(())
}

/// Averaged table row, one per experiment: label, reference value and
/// per-heuristic error % / time columns aligned with the heuristic list.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub label: String,
    pub s: usize,
    pub reference: f64,
    pub ref_kind: RefKind,
    pub errors: Vec<f64>,
    pub times_ms: Vec<f64>,
}

/// Per-instance detail row.
#[derive(Debug, Clone)]
pub struct InstanceRow {
    pub index: usize,
    pub reference: f64,
    pub ref_kind: RefKind,
    pub objectives: Vec<u64>,
    pub errors: Vec<f64>,
    pub times_ms: Vec<f64>,
    pub weight_reads: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub heuristics: Vec<HeuristicKind>,
    pub row: ReportRow,
    pub instances: Vec<InstanceRow>,
}

struct Prepared {
    index: usize,
    instance: Instance,
    known_reference: Option<(f64, RefKind)>,
}

fn prepare_one(spec: &ExperimentSpec, index: usize) -> Result<Prepared> {
    let instance = match spec.family {
        Family::Random => gen_random(spec.s, spec.n, index)?,
        Family::Composite => gen_composite(spec.s, spec.n, index)?.0,
        Family::Planted => gen_planted(spec.s, spec.n, index)?.instance,
        Family::Cs => {
            let path = spec
                .cs_path
                .as_ref()
                .ok_or_else(|| Error::Format("cs family needs a data file".into()))?;
            load_cs(&read_cs_file(path)?)?
        }
    };
    let known_reference = if spec.use_exact {
        let (_, opt) = brute_force(&instance)?;
        Some((opt as f64, RefKind::Optimum))
    } else {
        match spec.family {
            Family::Planted => Some((spec.n as f64, RefKind::Optimum)),
            Family::Random => Some((spec.n as f64, RefKind::LowerBound)),
            Family::Composite | Family::Cs => None, // best-of-run, filled later
        }
    };
    Ok(Prepared {
        index,
        instance,
        known_reference,
    })
}

fn prepare_all(spec: &ExperimentSpec) -> Result<Vec<Prepared>> {
    let indices: Vec<usize> = (1..=spec.count).collect();
    if spec.threads <= 1 || indices.len() <= 1 {
        return indices.iter().map(|&i| prepare_one(spec, i)).collect();
    }
    let collected: Mutex<Vec<(usize, Result<Prepared>)>> = Mutex::new(Vec::new());
    let chunk_size = indices.len().div_ceil(spec.threads);
    std::thread::scope(|scope| {
        for chunk in indices.chunks(chunk_size) {
            let collected = &collected;
            scope.spawn(move || {
                for &i in chunk {
                    let prepared = prepare_one(spec, i);
                    collected.lock().unwrap().push((i, prepared));
                }
            });
        }
    });
    let mut rows = collected.into_inner().unwrap();
    rows.sort_by_key(|(i, _)| *i);
    rows.into_iter().map(|(_, r)| r).collect()
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if spec.count == 0 {
        return Err(Error::Format("instance count must be at least 1".into()));
    }
    if spec.heuristics.is_empty() {
        return Err(Error::Format("empty heuristic list".into()));
    }
    if spec.family != Family::Cs {
        check_memory(spec.s, spec.n, spec.max_weight_bytes)?;
    }

    let mut spec = spec.clone();
    if spec.family == Family::Cs {
        // one data file, one instance
        spec.count = 1;
    }
    let prepared = prepare_all(&spec)?;
    if let Some(first) = prepared.first() {
        if spec.family == Family::Cs {
            check_memory(first.instance.s(), first.instance.n(), spec.max_weight_bytes)?;
        }
    }

    let cfg = GreedyConfig {
        buffer_capacity: spec.buffer_capacity,
        min_weight_hint: None,
    };
    let reps = spec.repetitions.max(1);
    let mut instances = Vec::with_capacity(prepared.len());
    let mut label_s = spec.s;
    let mut label_n = spec.n;
    for p in &prepared {
        label_s = p.instance.s();
        label_n = p.instance.n();
        let mut objectives = Vec::with_capacity(spec.heuristics.len());
        let mut times_ms = Vec::with_capacity(spec.heuristics.len());
        let mut weight_reads = Vec::with_capacity(spec.heuristics.len());
        for kind in &spec.heuristics {
            // warm-up run, discarded: first-touch page faults would otherwise
            // land in the first timed scan
            kind.run(&p.instance, &cfg, &mut RunMetrics::new());
            let mut elapsed = 0.0f64;
            let mut objective = 0u64;
            let mut reads = 0u64;
            for _ in 0..reps {
                let mut metrics = RunMetrics::new();
                let start = Instant::now();
                let assignment = kind.run(&p.instance, &cfg, &mut metrics);
                elapsed += start.elapsed().as_secs_f64() * 1e3;
                objective = assignment.objective(&p.instance)?;
                reads = metrics.weight_reads;
            }
            objectives.push(objective);
            times_ms.push(elapsed / reps as f64);
            weight_reads.push(reads);
        }
        let (reference, ref_kind) = match p.known_reference {
            Some(known) => known,
            None => (
                *objectives.iter().min().expect("non-empty") as f64,
                RefKind::BestOfRun,
            ),
        };
        let errors = objectives
            .iter()
            .map(|&o| error_percent(o as f64, reference))
            .collect::<Result<Vec<f64>>>()?;
        instances.push(InstanceRow {
            index: p.index,
            reference,
            ref_kind,
            objectives,
            errors,
            times_ms,
            weight_reads,
        });
    }

    let h = spec.heuristics.len();
    let count = instances.len() as f64;
    let mean = |get: &dyn Fn(&InstanceRow, usize) -> f64, col: usize| {
        instances.iter().map(|r| get(r, col)).sum::<f64>() / count
    };
    let row = ReportRow {
        label: make_label(label_s, spec.family, label_n),
        s: label_s,
        reference: instances.iter().map(|r| r.reference).sum::<f64>() / count,
        ref_kind: instances[0].ref_kind,
        errors: (0..h).map(|c| mean(&|r, c| r.errors[c], c)).collect(),
        times_ms: (0..h).map(|c| mean(&|r, c| r.times_ms[c], c)).collect(),
    };
    Ok(ExperimentReport {
        heuristics: spec.heuristics.clone(),
        row,
        instances,
    })
}

/// Instance label in the `<s><family-letter><n>` form, e.g. `3r100`.
pub fn make_label(s: usize, family: Family, n: usize) -> String {
    format!("{s}{}{n}", family.letter())
}

/// Inverse of [`make_label`].
pub fn parse_label(label: &str) -> Result<(usize, Family, usize)> {
    let bad = || Error::Format(format!("malformed instance label {label:?}"));
    let letter_start = label.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(bad)?;
    let letter_end = label[letter_start..]
        .find(|c: char| c.is_ascii_digit())
        .map(|o| letter_start + o)
        .ok_or_else(bad)?;
    let s: usize = label[..letter_start].parse().map_err(|_| bad())?;
    let n: usize = label[letter_end..].parse().map_err(|_| bad())?;
    let family = match &label[letter_start..letter_end] {
        "r" => Family::Random,
        "c" => Family::Composite,
        "p" => Family::Planted,
        "cs" => Family::Cs,
        _ => return Err(bad()),
    };
    Ok((s, family, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Format(format!(
                "unknown format {other:?}, expected csv|md"
            ))),
        }
    }
}

fn fmt_error(e: f64) -> String {
    format!("{e:.1}")
}

fn fmt_ms(ms: f64) -> String {
    format!("{}", ms.round() as i64)
}

fn header_cells(heuristics: &[HeuristicKind]) -> Vec<String> {
    let mut cells = vec!["instance".into(), "ref_kind".into(), "reference".into()];
    for h in heuristics {
        cells.push(format!("err_{}", h.name()));
    }
    for h in heuristics {
        cells.push(format!("ms_{}", h.name()));
    }
    cells
}

fn row_cells(row: &ReportRow) -> Vec<String> {
    let mut cells = vec![
        row.label.clone(),
        row.ref_kind.as_str().into(),
        format!("{:.1}", row.reference),
    ];
    cells.extend(row.errors.iter().map(|&e| fmt_error(e)));
    cells.extend(row.times_ms.iter().map(|&t| fmt_ms(t)));
    cells
}

fn average_cells(label: &str, rows: &[&ReportRow], columns: usize) -> Vec<String> {
    let mut cells = vec![label.to_string(), String::new(), String::new()];
    let count = rows.len() as f64;
    for c in 0..columns {
        let mean = rows.iter().map(|r| r.errors[c]).sum::<f64>() / count;
        cells.push(fmt_error(mean));
    }
    for c in 0..columns {
        let mean = rows.iter().map(|r| r.times_ms[c]).sum::<f64>() / count;
        cells.push(fmt_ms(mean));
    }
    cells
}

/// Renders averaged rows plus an averages section: one line per distinct s
/// (in first-appearance order) and one overall line.
pub fn emit_report(heuristics: &[HeuristicKind], rows: &[ReportRow], format: ReportFormat) -> String {
    let columns = heuristics.len();
    let mut table = vec![header_cells(heuristics)];
    table.extend(rows.iter().map(row_cells));
    let mut groups: Vec<usize> = Vec::new();
    for row in rows {
        if !groups.contains(&row.s) {
            groups.push(row.s);
        }
    }
    for s in groups {
        let group: Vec<&ReportRow> = rows.iter().filter(|r| r.s == s).collect();
        table.push(average_cells(&format!("{s}-AP avg."), &group, columns));
    }
    let all: Vec<&ReportRow> = rows.iter().collect();
    table.push(average_cells("All avg.", &all, columns));
    render(&table, format)
}

/// Renders per-instance detail rows for one experiment.
pub fn emit_details(
    heuristics: &[HeuristicKind],
    label: &str,
    instances: &[InstanceRow],
    format: ReportFormat,
) -> String {
    let mut table = vec![header_cells(heuristics)];
    table[0].splice(3..3, heuristics.iter().map(|h| format!("obj_{}", h.name())));
    for inst in instances {
        let mut cells = vec![
            format!("{label}#{}", inst.index),
            inst.ref_kind.as_str().into(),
            format!("{:.1}", inst.reference),
        ];
        cells.extend(inst.objectives.iter().map(|o| o.to_string()));
        cells.extend(inst.errors.iter().map(|&e| fmt_error(e)));
        cells.extend(inst.times_ms.iter().map(|&t| fmt_ms(t)));
        table.push(cells);
    }
    render(&table, format)
}

fn render(table: &[Vec<String>], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut out = String::new();
            for row in table {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        ReportFormat::Markdown => {
            let columns = table[0].len();
            let mut widths = vec![0usize; columns];
            for row in table {
                for (c, cell) in row.iter().enumerate() {
                    widths[c] = widths[c].max(cell.len());
                }
            }
            let mut out = String::new();
            for (r, row) in table.iter().enumerate() {
                out.push('|');
                for (c, cell) in row.iter().enumerate() {
                    out.push(' ');
                    out.push_str(cell);
                    out.push_str(&" ".repeat(widths[c] - cell.len() + 1));
                    out.push('|');
                }
                out.push('\n');
                if r == 0 {
                    out.push('|');
                    for width in &widths {
                        out.push_str(&"-".repeat(width + 2));
                        out.push('|');
                    }
                    out.push('\n');
                }
            }
            out
        }
    }
}

/// One timed point of a scaling probe.
#[derive(Debug, Clone, Copy)]
pub struct ScalingPoint {
    pub n: usize,
    pub millis: f64,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of log(time) against log(n).
    pub exponent: f64,
}

/// Least-squares slope of ln(millis) over ln(n).
pub fn fit_log_slope(points: &[ScalingPoint]) -> f64 {
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.millis.max(1e-6).ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if var == 0.0 {
        return 0.0;
    }
    cov / var
}

/// Measures wall-clock time of `run` on one instance per size (built by
/// `make`), taking the best of `reps` timed runs after one warm-up, and fits
/// the log-log growth exponent. Needs at least 3 strictly increasing sizes.
pub fn scaling_probe<G, F>(ns: &[usize], reps: usize, mut make: G, mut run: F) -> Result<ScalingReport>
where
    G: FnMut(usize) -> Result<Instance>,
    F: FnMut(&Instance),
{
    if ns.len() < 3 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Format(
            "scaling probe needs at least 3 strictly increasing sizes".into(),
        ));
    }
    let reps = reps.max(1);
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        let inst = make(n)?;
        run(&inst); // warm-up
        let mut best = f64::INFINITY;
        for _ in 0..reps {
            let start = Instant::now();
            run(&inst);
            best = best.min(start.elapsed().as_secs_f64() * 1e3);
        }
        points.push(ScalingPoint { n, millis: best });
    }
    let exponent = fit_log_slope(&points);
    Ok(ScalingReport { points, exponent })
}
