//! Command-line surface. Every subcommand prints one JSON document to
//! stdout with exact values first-class; heavyweight listings can go to CSV
//! or binary cache files on the side. Handlers are plain functions over core
//! types so the suite runner can call them with pinned configurations.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use aitlab_core::algstats::{avoider_witness, deficiency, stochasticity, Convention};
use aitlab_core::birthday::{run_birthday, BirthdayConfig, BirthdayReport};
use aitlab_core::bits::Bits;
use aitlab_core::bunchgraph::{
    build_graph, derandomize, is_bunch, pair_witness_pipeline, PipelineConfig,
};
use aitlab_core::codec::graph_to_bits;
use aitlab_core::complexity::{InfoScore, Score, TableStore};
use aitlab_core::conservation::{
    verify_function_conservation, verify_prob_conservation, SampleSpec,
};
use aitlab_core::enumeration::{
    enumerate, enumerate_from, merge_shards, shard_plan, EnumCaps, EnumLimits, HaltRecord,
    HaltingTable,
};
use aitlab_core::exact::{ceil_log2, Rat};
use aitlab_core::graph::DerandParams;
use aitlab_core::lefttotal::IntervalAssignment;
use aitlab_core::machine::{InvalidReason, RunOutcome};
use aitlab_core::measure::ElementaryMeasure;

use crate::cache;
use crate::report::{csv, opt_rat_json, rat_json, to_json_bytes};
use crate::suite;

#[derive(Parser)]
#[command(
    name = "aitlab",
    version,
    about = "Desk-scale laboratory for exact algorithmic information measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every halting program within the caps, with Kraft mass and
    /// prefix-freeness checks.
    Enumerate(EnumerateArgs),
    /// Capped description cost and algorithmic probability of one string.
    K(KArgs),
    /// Digits of the halting probability: the border separating totally
    /// covered strings from the rest.
    Border(BorderArgs),
    /// Totally covered strings up to a length, each with its busy-beaver
    /// output bound.
    Totals(TotalsArgs),
    /// Run the interval-reindexed machine on one string.
    Prime(PrimeArgs),
    /// Similarity graph: edges where one string prints the other within a
    /// cost threshold.
    Graph(GraphArgs),
    /// Check that a set is large and pairwise similar (a bunch).
    BunchCheck(BunchCheckArgs),
    /// Replace random per-vertex index lists by the first deterministic
    /// candidate passing the exact expectation test.
    Derandomize(DerandomizeArgs),
    /// Full pipeline from a candidate set to a verified minimal pair
    /// witness with its length bound.
    PairWitness(PairWitnessArgs),
    /// Randomness deficiency of a string inside an explicit measure.
    Deficiency(DeficiencyArgs),
    /// Cheapest enumerable-measure explanation of a string.
    Stochasticity(StochasticityArgs),
    /// Small blocking set: strings intersecting every subset the reference
    /// measure makes likely.
    Avoider(AvoiderArgs),
    /// Information conservation under randomized processing, with exact
    /// tail rows.
    ConserveProb(ConserveProbArgs),
    /// Information conservation under deterministic processing.
    ConserveFn(ConserveFnArgs),
    /// Seeded repeat experiment: classical collision law against pairwise
    /// description costs.
    Birthday(BirthdayArgs),
    /// Run the pinned experiment suite into a directory and print its
    /// manifest.
    Suite(SuiteArgs),
}

#[derive(Args, Clone)]
struct CapsArgs {
    /// Program length cap in bits.
    #[arg(long)]
    len: u32,
    /// Instruction budget per run.
    #[arg(long)]
    fuel: u64,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    caps: CapsArgs,
    /// Auxiliary tape ("_" is the empty string).
    #[arg(long, default_value = "_", value_parser = parse_bits)]
    aux: Bits,
    /// Worker threads for the prefix-tree walk.
    #[arg(long, default_value_t = 1)]
    shards: usize,
    /// Write the table to this binary cache file.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Write one CSV row per halting record.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct KArgs {
    #[command(flatten)]
    caps: CapsArgs,
    #[arg(long, value_parser = parse_bits)]
    x: Bits,
    #[arg(long, default_value = "_", value_parser = parse_bits)]
    aux: Bits,
    /// Load this table cache before computing.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct BorderArgs {
    #[command(flatten)]
    caps: CapsArgs,
    /// How many border digits to print.
    #[arg(long, default_value_t = 16)]
    digits: usize,
}

#[derive(Args)]
struct TotalsArgs {
    #[command(flatten)]
    caps: CapsArgs,
    /// Report totally covered strings up to this length.
    #[arg(long, default_value_t = 6)]
    max_len: usize,
}

#[derive(Args)]
struct PrimeArgs {
    #[command(flatten)]
    caps: CapsArgs,
    /// The string to run on the interval machine.
    #[arg(long, value_parser = parse_bits)]
    p: Bits,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    caps: CapsArgs,
    /// Comma-separated vertex strings ("_" is the empty string).
    #[arg(long, value_parser = parse_set)]
    set: std::vec::Vec<Bits>,
    /// Edge threshold: x -> y needs K(y | x) below this.
    #[arg(long)]
    l: u32,
}

#[derive(Args)]
struct BunchCheckArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Size exponent: a bunch needs more than 2^k members.
    #[arg(long)]
    k: u32,
}

#[derive(Args)]
struct DerandomizeArgs {
    #[command(flatten)]
    bunch: BunchCheckArgs,
    /// Confidence factor in the list length c * d * 2^(l - 2k).
    #[arg(long, default_value_t = 1)]
    c: u32,
    /// Deficiency factor in the list length.
    #[arg(long, default_value_t = 1)]
    d: u32,
}

#[derive(Args)]
struct PairWitnessArgs {
    #[command(flatten)]
    caps: CapsArgs,
    #[arg(long, value_parser = parse_set)]
    set: std::vec::Vec<Bits>,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
    #[arg(long, default_value_t = 1)]
    c: u32,
    /// Longest border string to try when hunting a totally covered one.
    #[arg(long, default_value_t = 16)]
    max_border_len: usize,
}

#[derive(Args)]
struct DeficiencyArgs {
    #[command(flatten)]
    caps: CapsArgs,
    #[arg(long, value_parser = parse_bits)]
    x: Bits,
    /// Measure as atom:mass pairs, e.g. "0:1/2,1:1/4".
    #[arg(long, value_parser = parse_measure)]
    measure: ElementaryMeasure,
    /// Side information string.
    #[arg(long, default_value = "_", value_parser = parse_bits)]
    cond: Bits,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// Charge the length of the shortest enumerated printer.
    WitnessLength,
    /// Charge the capped complexity of the measure encoding.
    EncodingComplexity,
}

#[derive(Args)]
struct StochasticityArgs {
    #[command(flatten)]
    caps: CapsArgs,
    #[arg(long, value_parser = parse_bits)]
    x: Bits,
    #[arg(long, default_value = "_", value_parser = parse_bits)]
    cond: Bits,
    /// Use this measure's encoding as the conditioning string instead of
    /// raw --cond bits.
    #[arg(long, value_parser = parse_measure, conflicts_with = "cond")]
    cond_measure: Option<ElementaryMeasure>,
    /// Length cap for candidate measure printers.
    #[arg(long)]
    search_len: u32,
    #[arg(long, value_enum, default_value_t = ConventionArg::WitnessLength)]
    convention: ConventionArg,
}

#[derive(Args)]
struct AvoiderArgs {
    /// The observed subset, comma-separated n-bit strings.
    #[arg(long, value_parser = parse_set)]
    d_set: std::vec::Vec<Bits>,
    /// Universe string length.
    #[arg(long)]
    n: usize,
    /// Subset size exponent: qualifying sets have 2^s members.
    #[arg(long)]
    s: u32,
    #[arg(long, default_value_t = 2)]
    c: u32,
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Reference measure over encoded subsets; defaults to a point mass on
    /// the observed subset's encoding.
    #[arg(long, value_parser = parse_measure)]
    q: Option<ElementaryMeasure>,
    #[arg(long, default_value_t = 1 << 20)]
    budget: u64,
}

#[derive(Args)]
struct ConserveProbArgs {
    #[command(flatten)]
    caps: CapsArgs,
    /// Program whose run prints a measure encoding.
    #[arg(long, value_parser = parse_bits)]
    q: Bits,
    #[arg(long, default_value = "_", value_parser = parse_bits)]
    aux: Bits,
    /// Put this measure's encoding on the tape instead of raw --aux bits.
    #[arg(long, value_parser = parse_measure, conflicts_with = "aux")]
    aux_measure: Option<ElementaryMeasure>,
    #[arg(long, default_value_t = 10_000)]
    run_fuel: u64,
    /// Markov tail offsets, comma-separated.
    #[arg(long, default_value = "0,1,2", value_delimiter = ',')]
    offsets: Vec<u32>,
    /// Draw this many samples for the empirical tail.
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct ConserveFnArgs {
    #[command(flatten)]
    caps: CapsArgs,
    /// The processing program, run with the input on its tape.
    #[arg(long, value_parser = parse_bits)]
    f: Bits,
    #[arg(long, value_parser = parse_bits)]
    input: Bits,
    #[arg(long, default_value_t = 10_000)]
    run_fuel: u64,
}

#[derive(Args)]
struct BirthdayArgs {
    /// Length of each drawn string.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    draws: u32,
    #[arg(long, default_value_t = 200)]
    trials: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    len: u32,
    #[arg(long, default_value_t = 10_000)]
    fuel: u64,
    /// Redraw until each trial's strings are pairwise distinct.
    #[arg(long)]
    distinct: bool,
    /// Draw from this measure instead of uniform n-bit strings.
    #[arg(long, value_parser = parse_measure)]
    distribution: Option<ElementaryMeasure>,
    /// Write one CSV row per trial.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

pub fn run() -> Result<()> {
    let cli = Cli::parse();
    let value = dispatch(&cli.command)?;
    std::io::stdout().write_all(&to_json_bytes(&value))?;
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<Value> {
    let limits = EnumLimits::default();
    match cmd {
        Command::Enumerate(a) => {
            let caps = EnumCaps::new(a.caps.len, a.caps.fuel, a.aux.clone());
            let table = build_table(&caps, &limits, a.shards)?;
            if let Some(path) = &a.cache {
                cache::write_table(path, &table)?;
            }
            if let Some(path) = &a.csv {
                fs::write(path, records_csv(&table))?;
            }
            Ok(table_summary(&table, a.shards))
        }
        Command::K(a) => {
            let mut store = TableStore::new(limits);
            if let Some(path) = &a.cache {
                store.insert_table(cache::read_table(path)?);
            }
            k_report(&mut store, &a.x, &a.aux, a.caps.len, a.caps.fuel)
        }
        Command::Border(a) => {
            border_report(&mut TableStore::new(limits), a.caps.len, a.caps.fuel, a.digits)
        }
        Command::Totals(a) => {
            totals_report(&mut TableStore::new(limits), a.caps.len, a.caps.fuel, a.max_len)
        }
        Command::Prime(a) => {
            prime_report(&mut TableStore::new(limits), &a.p, a.caps.len, a.caps.fuel)
        }
        Command::Graph(a) => Ok(graph_report(
            &mut TableStore::new(limits),
            &a.set,
            a.l,
            a.caps.len,
            a.caps.fuel,
        )?
        .1),
        Command::BunchCheck(a) => bunch_report(
            &mut TableStore::new(limits),
            &a.graph.set,
            a.k,
            a.graph.l,
            a.graph.caps.len,
            a.graph.caps.fuel,
        ),
        Command::Derandomize(a) => derand_report(
            &mut TableStore::new(limits),
            &a.bunch.graph.set,
            a.bunch.k,
            a.bunch.graph.l,
            a.c,
            a.d,
            a.bunch.graph.caps.len,
            a.bunch.graph.caps.fuel,
        ),
        Command::PairWitness(a) => {
            let cfg = PipelineConfig {
                set: a.set.clone(),
                k: a.k,
                l: a.l,
                c: a.c,
                caps: EnumCaps::new(a.caps.len, a.caps.fuel, Bits::new()),
                max_border_len: a.max_border_len,
                measure: None,
            };
            pair_witness_report(&mut TableStore::new(limits), &cfg)
        }
        Command::Deficiency(a) => deficiency_report(
            &mut TableStore::new(limits),
            &a.x,
            &a.measure,
            &a.cond,
            a.caps.len,
            a.caps.fuel,
        ),
        Command::Stochasticity(a) => {
            let conv = match a.convention {
                ConventionArg::WitnessLength => Convention::WitnessLength,
                ConventionArg::EncodingComplexity => Convention::EncodingComplexity,
            };
            let cond = match &a.cond_measure {
                Some(m) => aitlab_core::codec::measure_to_bits(m),
                None => a.cond.clone(),
            };
            stochasticity_report(
                &mut TableStore::new(limits),
                &a.x,
                &cond,
                a.caps.len,
                a.caps.fuel,
                a.search_len,
                conv,
            )
        }
        Command::Avoider(a) => {
            let q = a.q.clone().unwrap_or_else(|| {
                let mut sorted = a.d_set.clone();
                sorted.sort();
                sorted.dedup();
                let mut enc = Bits::new();
                aitlab_core::codec::enc_set(&mut enc, &sorted);
                ElementaryMeasure::point_mass(enc)
            });
            avoider_report(&a.d_set, a.n, a.s, &q, a.c, a.d, a.budget)
        }
        Command::ConserveProb(a) => {
            let sample = a
                .samples
                .map(|draws| SampleSpec { seed: a.seed, stream: 0, draws });
            let aux = match &a.aux_measure {
                Some(m) => aitlab_core::codec::measure_to_bits(m),
                None => a.aux.clone(),
            };
            conserve_prob_report(
                &mut TableStore::new(limits),
                &a.q,
                &aux,
                a.run_fuel,
                a.caps.len,
                a.caps.fuel,
                &a.offsets,
                sample,
            )
        }
        Command::ConserveFn(a) => conserve_fn_report(
            &mut TableStore::new(limits),
            &a.f,
            &a.input,
            a.run_fuel,
            a.caps.len,
            a.caps.fuel,
        ),
        Command::Birthday(a) => {
            let config = BirthdayConfig {
                n: a.n,
                draws: a.draws,
                trials: a.trials,
                seed: a.seed,
                len: a.len,
                fuel: a.fuel,
                distinct: a.distinct,
                distribution: a.distribution.clone(),
            };
            let (report, value) = birthday_report(&mut TableStore::new(limits), &config)?;
            if let Some(path) = &a.csv {
                fs::write(path, birthday_trials_csv(&report))?;
            }
            Ok(value)
        }
        Command::Suite(a) => suite::run_suite(&a.out),
    }
}

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

/// "0"/"1" strings; "_" denotes the empty string so it survives in
/// comma-separated lists.
pub fn parse_bits(s: &str) -> Result<Bits> {
    let body = if s == "_" { "" } else { s };
    let mut b = Bits::with_capacity(body.len());
    for ch in body.chars() {
        match ch {
            '0' => b.push(false),
            '1' => b.push(true),
            _ => bail!("bit strings use only 0 and 1 (got {ch:?}); \"_\" is empty"),
        }
    }
    Ok(b)
}

pub fn parse_set(s: &str) -> Result<Vec<Bits>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_bits).collect()
}

/// "num/den" or a bare integer, exact.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: i64 = num.trim().parse().map_err(|_| anyhow!("bad numerator {num:?}"))?;
    let den: i64 = den.trim().parse().map_err(|_| anyhow!("bad denominator {den:?}"))?;
    if den <= 0 {
        bail!("denominator must be positive");
    }
    Ok(aitlab_core::exact::rat(num, den))
}

/// "atom:mass,atom:mass" with exact rational masses.
pub fn parse_measure(s: &str) -> Result<ElementaryMeasure> {
    let mut atoms = Vec::new();
    for part in s.split(',') {
        let (atom, mass) = part
            .split_once(':')
            .ok_or_else(|| anyhow!("measure atoms look like bits:num/den, got {part:?}"))?;
        atoms.push((parse_bits(atom)?, parse_rat(mass)?));
    }
    ElementaryMeasure::new(atoms).map_err(|e| anyhow!("bad measure: {e}"))
}

pub(crate) fn err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow!("{e:?}")
}

// ---------------------------------------------------------------------------
// Shared handlers
// ---------------------------------------------------------------------------

/// Enumerates with optional sharding across threads. Shards split the walk
/// at a fixed prefix depth; the merged table is identical to a single-thread
/// run.
pub fn build_table(
    caps: &EnumCaps,
    limits: &EnumLimits,
    shards: usize,
) -> Result<HaltingTable> {
    if shards <= 1 {
        return enumerate(caps, limits).map_err(err);
    }
    let depth = (ceil_log2(shards.max(1)) + 2).min(caps.max_prog_len);
    let plan = shard_plan(caps, limits, depth).map_err(err)?;
    let mut buckets: Vec<Vec<Bits>> = vec![Vec::new(); shards];
    for (i, root) in plan.roots.iter().enumerate() {
        buckets[i % shards].push(root.clone());
    }
    let parts = std::thread::scope(|scope| {
        let handles: Vec<_> = buckets
            .iter()
            .map(|bucket| {
                scope.spawn(move || {
                    let mut records: Vec<HaltRecord> = Vec::new();
                    for root in bucket {
                        records.extend(enumerate_from(caps, limits, root)?);
                    }
                    Ok::<_, aitlab_core::enumeration::EnumError>(records)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("shard worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(err)?;
    let mut all = vec![plan.short_records];
    all.extend(parts);
    Ok(merge_shards(caps, all))
}

pub fn table_summary(table: &HaltingTable, shards: usize) -> Value {
    let kraft = table.kraft_sum();
    json!({
        "machine_version": table.machine_version,
        "len": table.caps.max_prog_len,
        "fuel": table.caps.fuel,
        "aux": table.caps.aux.to_string(),
        "records": table.len(),
        "kraft": rat_json(&kraft),
        "prefix_free": table.is_prefix_free(),
        "shards": shards,
    })
}

pub fn records_csv(table: &HaltingTable) -> String {
    let rows: Vec<Vec<String>> = table
        .records()
        .iter()
        .map(|r| vec![r.program.to_string(), r.output.to_string(), r.steps.to_string()])
        .collect();
    csv(&["program", "output", "steps"], &rows)
}

pub fn k_report(
    store: &mut TableStore,
    x: &Bits,
    aux: &Bits,
    len: u32,
    fuel: u64,
) -> Result<Value> {
    let k = store.k_bounded(x, aux, len, fuel).map_err(err)?;
    let m = store.m_bounded(x, aux, len, fuel).map_err(err)?;
    let witness = match k {
        Some(_) => {
            let caps = EnumCaps::new(len, fuel, aux.clone());
            store
                .table(&caps)
                .map_err(err)?
                .records()
                .iter()
                .filter(|r| &r.output == x)
                .map(|r| r.program.clone())
                .min()
                .map(|p| p.to_string())
        }
        None => None,
    };
    Ok(json!({
        "x": x.to_string(),
        "aux": aux.to_string(),
        "len": len,
        "fuel": fuel,
        "k": k,
        "m": rat_json(&m),
        "witness": witness,
    }))
}

pub fn border_report(
    store: &mut TableStore,
    len: u32,
    fuel: u64,
    digits: usize,
) -> Result<Value> {
    let caps = EnumCaps::new(len, fuel, Bits::new());
    let assignment = IntervalAssignment::from_table(store.table(&caps).map_err(err)?);
    let omega = assignment.omega().clone();
    if omega >= Rat::from_integer(1.into()) {
        bail!("halting probability reached 1 at these caps; no border to print");
    }
    Ok(json!({
        "len": len,
        "fuel": fuel,
        "omega": rat_json(&omega),
        "digits": digits,
        "border": assignment.border_prefix(digits).to_string(),
    }))
}

pub fn totals_report(
    store: &mut TableStore,
    len: u32,
    fuel: u64,
    max_len: usize,
) -> Result<Value> {
    let caps = EnumCaps::new(len, fuel, Bits::new());
    let pd = IntervalAssignment::from_table(store.table(&caps).map_err(err)?).prime_domain();
    let mut rows = Vec::new();
    for n in 1..=max_len {
        for b in Bits::all_of_len(n) {
            if pd.is_total(&b) {
                rows.push(json!({
                    "b": b.to_string(),
                    "busy_beaver": pd.busy_beaver(&b),
                }));
            }
        }
    }
    Ok(json!({
        "len": len,
        "fuel": fuel,
        "omega": rat_json(&pd.omega),
        "cells": pd.records().len(),
        "totals": rows,
    }))
}

fn run_outcome_json(outcome: &RunOutcome) -> Value {
    match outcome {
        RunOutcome::Halted { output, steps, bits_consumed } => json!({
            "status": "halted",
            "output": output.to_string(),
            "steps": steps,
            "bits_consumed": bits_consumed,
        }),
        RunOutcome::OutOfFuel { steps, bits_consumed } => json!({
            "status": "out_of_fuel",
            "steps": steps,
            "bits_consumed": bits_consumed,
        }),
        RunOutcome::Invalid { reason, steps, bits_consumed } => json!({
            "status": "invalid",
            "reason": format!("{reason:?}"),
            "steps": steps,
            "bits_consumed": bits_consumed,
        }),
    }
}

pub fn prime_report(store: &mut TableStore, p: &Bits, len: u32, fuel: u64) -> Result<Value> {
    let caps = EnumCaps::new(len, fuel, Bits::new());
    let assignment = IntervalAssignment::from_table(store.table(&caps).map_err(err)?);
    let outcome = assignment.run_prime(p);
    let in_domain = !matches!(
        outcome,
        RunOutcome::Invalid { reason: InvalidReason::NotInPrimeDomain, .. }
    );
    Ok(json!({
        "p": p.to_string(),
        "len": len,
        "fuel": fuel,
        "in_domain": in_domain,
        "outcome": run_outcome_json(&outcome),
    }))
}

pub fn graph_report(
    store: &mut TableStore,
    set: &[Bits],
    l: u32,
    len: u32,
    fuel: u64,
) -> Result<(aitlab_core::graph::LabeledGraph, Value)> {
    let g = build_graph(store, set, l, len, fuel).map_err(err)?;
    let edges: Vec<Value> = g
        .edges()
        .map(|(a, b)| json!([a.to_string(), b.to_string()]))
        .collect();
    let value = json!({
        "set": set.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "l": l,
        "len": len,
        "fuel": fuel,
        "vertices": g.vertex_count(),
        "edges": edges,
        "max_out_degree": g.max_out_degree(),
    });
    Ok((g, value))
}

pub fn bunch_report(
    store: &mut TableStore,
    set: &[Bits],
    k: u32,
    l: u32,
    len: u32,
    fuel: u64,
) -> Result<Value> {
    let (g, mut value) = graph_report(store, set, l, len, fuel)?;
    let obj = value.as_object_mut().expect("graph report is an object");
    obj.insert("k".into(), json!(k));
    obj.insert("bunch".into(), json!(is_bunch(&g, set, k)));
    Ok(value)
}

/// Lists are mostly empty slots at desk scale; emit only the filled ones,
/// keyed by slot index (the length is carried separately).
fn lists_json(lists: &aitlab_core::graph::IndexedLists) -> Value {
    let mut obj = serde_json::Map::new();
    for (v, slots) in &lists.lists {
        let mut filled = serde_json::Map::new();
        for (i, s) in slots.iter().enumerate() {
            if let Some(y) = s {
                filled.insert(i.to_string(), json!(y.to_string()));
            }
        }
        obj.insert(v.to_string(), Value::Object(filled));
    }
    Value::Object(obj)
}

#[allow(clippy::too_many_arguments)]
pub fn derand_report(
    store: &mut TableStore,
    set: &[Bits],
    k: u32,
    l: u32,
    c: u32,
    d: u32,
    len: u32,
    fuel: u64,
) -> Result<Value> {
    let g = build_graph(store, set, l, len, fuel).map_err(err)?;
    let clique = aitlab_core::graph::LabeledGraph::complete(set.iter().cloned()).map_err(err)?;
    let measure = ElementaryMeasure::point_mass(graph_to_bits(&clique));
    let params = DerandParams { graph: g, k, l, c, d, measure };
    let res = derandomize(&params).map_err(err)?;
    Ok(json!({
        "set": set.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "k": k, "l": l, "c": c, "d": d,
        "list_len": res.lists.list_len,
        "lists": lists_json(&res.lists),
        "miss_expectation": rat_json(&res.expectation),
        "candidates_scanned": res.candidates_scanned,
        "test_scale": rat_json(&res.test.scale),
        "test_expectation": rat_json(&res.test.expectation()),
        "test_valid": res.test.is_valid(),
    }))
}

pub fn pair_witness_report(store: &mut TableStore, cfg: &PipelineConfig) -> Result<Value> {
    let rep = pair_witness_pipeline(store, cfg).map_err(err)?;
    Ok(json!({
        "set": cfg.set.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "k": cfg.k, "l": cfg.l, "c": cfg.c,
        "len": cfg.caps.max_prog_len,
        "fuel": cfg.caps.fuel,
        "b": rep.b.to_string(),
        "busy_beaver_fuel": rep.bb_fuel,
        "bunch": rep.bunch,
        "deficiency": rep.deficiency,
        "d": rep.d,
        "list_len": rep.derand.lists.list_len,
        "miss_expectation": rat_json(&rep.derand.expectation),
        "candidates_scanned": rep.derand.candidates_scanned,
        "test_valid": rep.derand.test.is_valid(),
        "witness": {
            "x": rep.witness.x.to_string(),
            "y": rep.witness.y.to_string(),
            "index": rep.witness.index,
            "program_bits": rep.witness.program.len(),
            "decoder_cost": rep.witness.decoder_cost,
            "steps": rep.witness.steps,
        },
        "bound_bits": rep.bound_bits,
        "length_bound_ok": rep.length_bound_ok,
    }))
}

pub fn deficiency_report(
    store: &mut TableStore,
    x: &Bits,
    p: &ElementaryMeasure,
    cond: &Bits,
    len: u32,
    fuel: u64,
) -> Result<Value> {
    let rep = deficiency(store, x, p, cond, len, fuel).map_err(err)?;
    Ok(json!({
        "x": x.to_string(),
        "cond": cond.to_string(),
        "len": len,
        "fuel": fuel,
        "mass": rat_json(&p.mass(x)),
        "log_term": rep.log_term,
        "k": rep.k,
        "value": rep.value,
        "minus_infinity": rep.value.is_none(),
    }))
}

#[allow(clippy::too_many_arguments)]
pub fn stochasticity_report(
    store: &mut TableStore,
    x: &Bits,
    cond: &Bits,
    len: u32,
    fuel: u64,
    search_len: u32,
    convention: Convention,
) -> Result<Value> {
    let rep = stochasticity(store, x, cond, len, fuel, search_len, convention)
        .map_err(err)
        .context("no measure printed within the search caps explains the string")?;
    Ok(json!({
        "x": x.to_string(),
        "cond": cond.to_string(),
        "len": len,
        "fuel": fuel,
        "search_len": search_len,
        "convention": match convention {
            Convention::WitnessLength => "witness_length",
            Convention::EncodingComplexity => "encoding_complexity",
        },
        "candidates": rep.candidates,
        "best": {
            "encoding": rep.best.encoding.to_string(),
            "atoms": rep.best.measure.len(),
            "k_measure": rep.best.k_measure,
            "deficiency": rep.best.deficiency,
            "score": rep.best.score,
        },
    }))
}

pub fn avoider_report(
    d_set: &[Bits],
    n: usize,
    s: u32,
    q: &ElementaryMeasure,
    c: u32,
    d: u32,
    budget: u64,
) -> Result<Value> {
    let rep = avoider_witness(d_set, n, s, q, c, d, budget).map_err(err)?;
    Ok(json!({
        "n": n, "s": s, "c": c, "d": d,
        "d_set": d_set.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "w": rep.w.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "w_mass": rat_json(&rep.w_mass),
        "w_bound": rat_json(&rep.w_bound),
        "avoid_mass": rat_json(&rep.avoid_mass),
        "avoid_bound": rat_json(&rep.avoid_bound),
        "q_sum": rat_json(&rep.q_sum),
        "q_sum_ok": rep.q_sum_ok,
        "candidates_scanned": rep.candidates_scanned,
        "test_expectation": rat_json(&rep.test.expectation()),
        "test_valid": rep.test.is_valid(),
    }))
}

fn score_json(s: &Score) -> Value {
    match s {
        Score::Finite(v) => json!({ "kind": "finite", "value": v }),
        Score::PlusInfinity => json!({ "kind": "plus_infinity" }),
        Score::MinusInfinity => json!({ "kind": "minus_infinity" }),
        Score::Unresolved => json!({ "kind": "unresolved" }),
    }
}

fn info_json(i: &InfoScore) -> Value {
    json!({
        "k_plain": i.k_plain,
        "k_oracle": i.k_oracle,
        "score": score_json(&i.score),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn conserve_prob_report(
    store: &mut TableStore,
    q: &Bits,
    aux: &Bits,
    run_fuel: u64,
    len: u32,
    fuel: u64,
    offsets: &[u32],
    sample: Option<SampleSpec>,
) -> Result<Value> {
    let rep =
        verify_prob_conservation(store, q, aux, run_fuel, len, fuel, offsets, sample)
            .map_err(err)?;
    let atoms: Vec<Value> = rep
        .atoms
        .iter()
        .map(|a| {
            json!({
                "atom": a.atom.to_string(),
                "mass": rat_json(&a.mass),
                "info": info_json(&a.info),
                "pair_info": info_json(&a.pair_info),
            })
        })
        .collect();
    let tails: Vec<Value> = rep
        .tails
        .iter()
        .map(|t| {
            json!({
                "offset": t.offset,
                "tail_mass": rat_json(&t.tail_mass),
                "bound": rat_json(&t.bound),
                "ok": t.ok,
            })
        })
        .collect();
    let sampled: Vec<Value> = rep
        .sampled
        .iter()
        .map(|s| json!({ "offset": s.offset, "hits": s.hits, "draws": s.draws }))
        .collect();
    Ok(json!({
        "program": q.to_string(),
        "aux_bits": aux.len(),
        "encoding_bits": rep.encoding.len(),
        "len": len,
        "fuel": fuel,
        "program_info": info_json(&rep.program_info),
        "atoms": atoms,
        "unresolved": rep.unresolved,
        "atom_ratio": opt_rat_json(&rep.atom_ratio),
        "tails": tails,
        "sampled": sampled,
    }))
}

pub fn conserve_fn_report(
    store: &mut TableStore,
    f: &Bits,
    input: &Bits,
    run_fuel: u64,
    len: u32,
    fuel: u64,
) -> Result<Value> {
    let rep = verify_function_conservation(store, f, input, run_fuel, len, fuel).map_err(err)?;
    Ok(json!({
        "f": f.to_string(),
        "input": input.to_string(),
        "output": rep.output.to_string(),
        "len": len,
        "fuel": fuel,
        "info_input": info_json(&rep.info_input),
        "info_output": info_json(&rep.info_output),
        "k_f": rep.k_f,
        "gap": rep.gap,
    }))
}

pub fn birthday_report(
    store: &mut TableStore,
    config: &BirthdayConfig,
) -> Result<(BirthdayReport, Value)> {
    let rep = run_birthday(store, config).map_err(err)?;
    let histogram: Vec<Value> = rep
        .histogram
        .iter()
        .map(|(k, count)| json!({ "min_pair_k": k, "trials": count }))
        .collect();
    let classical = rep.classical.as_ref().map(|c| {
        json!({
            "expected": rat_json(&c.expected),
            "observed": rat_json(&c.observed),
            "within_3_sigma": c.within,
        })
    });
    let value = json!({
        "n": config.n,
        "draws": config.draws,
        "trials": config.trials,
        "seed": config.seed,
        "len": config.len,
        "fuel": config.fuel,
        "distinct": config.distinct,
        "duplicate_trials": rep.duplicate_trials,
        "classical": classical,
        "histogram": histogram,
    });
    Ok((rep, value))
}

pub fn birthday_trials_csv(rep: &BirthdayReport) -> String {
    let rows: Vec<Vec<String>> = rep
        .trials
        .iter()
        .map(|t| {
            let draws =
                t.draws.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
            let (k, x, y) = match &t.min_pair {
                Some(p) => (p.k.to_string(), p.x.to_string(), p.y.to_string()),
                None => (String::new(), String::new(), String::new()),
            };
            vec![
                t.trial.to_string(),
                draws,
                t.has_duplicate.to_string(),
                k,
                x,
                y,
            ]
        })
        .collect();
    csv(&["trial", "draws", "duplicate", "min_pair_k", "x", "y"], &rows)
}
