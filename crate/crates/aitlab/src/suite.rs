//! Pinned experiment suite. One call runs a fixed battery of desk-scale
//! measurements and writes every artifact under a single directory, plus a
//! manifest with SHA-256 digests. Everything is exact arithmetic or runs
//! from a pinned seed, and no timestamps or machine-local paths enter the
//! output, so a rerun is byte-identical.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use aitlab_core::birthday::BirthdayConfig;
use aitlab_core::bits::bits;
use aitlab_core::bits::Bits;
use aitlab_core::bunchgraph::PipelineConfig;
use aitlab_core::codec::{enc_set, measure_to_bits};
use aitlab_core::complexity::TableStore;
use aitlab_core::conservation::SampleSpec;
use aitlab_core::enumeration::{EnumCaps, EnumLimits};
use aitlab_core::machine::{copy_program, MACHINE_VERSION};
use aitlab_core::measure::ElementaryMeasure;

use crate::cache;
use crate::cli;
use crate::report::{sha256_hex, to_json_bytes};

/// Artifacts are produced fully in memory so the bytes that get hashed are
/// the bytes that get written.
struct Artifact {
    path: &'static str,
    bytes: Vec<u8>,
}

fn json_artifact(path: &'static str, value: &Value) -> Artifact {
    Artifact { path, bytes: to_json_bytes(value) }
}

/// Every tunable the suite uses, echoed into the manifest so the artifact
/// set is self-describing.
fn suite_config() -> Value {
    json!({
        "enumeration": { "len": 12, "fuel": 10_000, "shards": 1 },
        "border": { "len": 10, "fuel": 200, "digits": 16, "max_total_len": 8 },
        "pair_witness": {
            "set": ["_", "0", "1"], "k": 1, "l": 9, "c": 1,
            "len": 10, "fuel": 200, "max_border_len": 8,
        },
        "deficiency": { "x": "0", "measure": "0:1/2,1:1/2", "len": 10, "fuel": 1_000 },
        "stochasticity": {
            "x": "0", "cond": "point mass encoding of 0",
            "len": 16, "fuel": 4_000, "search_len": 8,
        },
        "avoider": { "d_set": ["00", "01"], "n": 2, "s": 1, "c": 2, "d": 2, "budget": 1 << 20 },
        "conservation": {
            "len": 15, "fuel": 1 << 16, "run_fuel": 100,
            "fn_input": "0",
            "prob_measure": "0:1/2,1:1/4", "offsets": [0, 1, 3],
            "sample": { "seed": 7, "stream": 0, "draws": 64 },
        },
        "birthday": {
            "n": 8, "draws": 16, "trials": 200, "seed": 42,
            "len": 12, "fuel": 10_000, "distinct": false,
        },
    })
}

pub fn run_suite(out: &Path) -> Result<Value> {
    fs::create_dir_all(out)
        .with_context(|| format!("creating suite directory {}", out.display()))?;
    let mut store = TableStore::new(EnumLimits::default());
    let mut artifacts: Vec<Artifact> = Vec::new();

    // Halting table at the workhorse caps, in all three formats.
    let caps = EnumCaps::new(12, 10_000, Bits::new());
    let table = store.table(&caps).map_err(cli::err)?.clone();
    artifacts.push(json_artifact(
        "enumeration/summary.json",
        &cli::table_summary(&table, 1),
    ));
    artifacts.push(Artifact {
        path: "enumeration/records.csv",
        bytes: cli::records_csv(&table).into_bytes(),
    });
    artifacts.push(Artifact {
        path: "enumeration/table.bin",
        bytes: cache::table_bytes(&table),
    });

    // Halting probability border and the totally covered strings below it.
    artifacts.push(json_artifact(
        "border/border.json",
        &cli::border_report(&mut store, 10, 200, 16)?,
    ));
    artifacts.push(json_artifact(
        "border/totals.json",
        &cli::totals_report(&mut store, 10, 200, 8)?,
    ));

    // Full pair-witness pipeline on the desk fixture.
    let cfg = PipelineConfig {
        set: vec![bits(""), bits("0"), bits("1")],
        k: 1,
        l: 9,
        c: 1,
        caps: EnumCaps::new(10, 200, Bits::new()),
        max_border_len: 8,
        measure: None,
    };
    artifacts.push(json_artifact(
        "pair_witness/report.json",
        &cli::pair_witness_report(&mut store, &cfg)?,
    ));

    // Randomness deficiency of one bit under the fair-coin measure.
    let coin = ElementaryMeasure::uniform([bits("0"), bits("1")]).map_err(cli::err)?;
    artifacts.push(json_artifact(
        "deficiency/report.json",
        &cli::deficiency_report(&mut store, &bits("0"), &coin, &bits(""), 10, 1_000)?,
    ));

    // Cheapest printed explanation of "0" given its point-mass encoding.
    let point = ElementaryMeasure::point_mass(bits("0"));
    artifacts.push(json_artifact(
        "stochasticity/report.json",
        &cli::stochasticity_report(
            &mut store,
            &bits("0"),
            &measure_to_bits(&point),
            16,
            4_000,
            8,
            aitlab_core::algstats::Convention::WitnessLength,
        )?,
    ));

    // Blocking-set witness over two-bit strings.
    let d_set = vec![bits("00"), bits("01")];
    let mut enc = Bits::new();
    enc_set(&mut enc, &d_set);
    let q = ElementaryMeasure::point_mass(enc);
    artifacts.push(json_artifact(
        "avoider/report.json",
        &cli::avoider_report(&d_set, 2, 1, &q, 2, 2, 1 << 20)?,
    ));

    // Conservation of information: deterministic and randomized processing.
    artifacts.push(json_artifact(
        "conservation/function.json",
        &cli::conserve_fn_report(&mut store, &copy_program(), &bits("0"), 100, 15, 1 << 16)?,
    ));
    let p = ElementaryMeasure::new([(bits("0"), aitlab_core::exact::rat(1, 2)), (
        bits("1"),
        aitlab_core::exact::rat(1, 4),
    )])
    .map_err(cli::err)?;
    artifacts.push(json_artifact(
        "conservation/probabilistic.json",
        &cli::conserve_prob_report(
            &mut store,
            &copy_program(),
            &measure_to_bits(&p),
            100,
            15,
            1 << 16,
            &[0, 1, 3],
            Some(SampleSpec { seed: 7, stream: 0, draws: 64 }),
        )?,
    ));

    // Seeded repeat experiment with pairwise description costs.
    let (report, value) = cli::birthday_report(&mut store, &BirthdayConfig::desk())?;
    artifacts.push(json_artifact("birthday/report.json", &value));
    artifacts.push(Artifact {
        path: "birthday/trials.csv",
        bytes: cli::birthday_trials_csv(&report).into_bytes(),
    });

    // Write artifacts, then the manifest over their exact bytes.
    for a in &artifacts {
        let path = out.join(a.path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, &a.bytes)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let config = suite_config();
    let rows: Vec<Value> = artifacts
        .iter()
        .map(|a| {
            json!({
                "path": a.path,
                "bytes": a.bytes.len(),
                "sha256": sha256_hex(&a.bytes),
            })
        })
        .collect();
    let manifest = json!({
        "format": "aitlab-suite-v1",
        "machine_version": MACHINE_VERSION,
        "config_sha256": sha256_hex(&to_json_bytes(&config)),
        "config": config,
        "artifacts": rows,
    });
    fs::write(out.join("manifest.json"), to_json_bytes(&manifest))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The suite exists to be reproducible; this is the cheap in-crate
    /// check (the acceptance test compares full reruns byte for byte).
    #[test]
    fn config_is_pinned() {
        let a = to_json_bytes(&suite_config());
        let b = to_json_bytes(&suite_config());
        assert_eq!(a, b);
        assert_eq!(sha256_hex(&a), sha256_hex(&b));
    }
}
