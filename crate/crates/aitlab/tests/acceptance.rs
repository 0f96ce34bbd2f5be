//! Acceptance battery: eleven exact, property-based criteria the workspace
//! must keep passing. Each test prints one `acceptance N: PASS/FAIL` line
//! (visible with `--nocapture`) and fails loudly on any violation. Measured
//! machine constants (Kraft sums, witness lengths, calibrated factors) are
//! pinned here as regression fixtures with zero tolerance.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use aitlab_core::algstats::avoider_witness;
use aitlab_core::birthday::{run_birthday, BirthdayConfig};
use aitlab_core::bits::{bits, Bits};
use aitlab_core::bunchgraph::{
    derandomize, min_pair_witness, pair_witness_pipeline, PipelineConfig,
};
use aitlab_core::codec::{enc_set, graph_to_bits};
use aitlab_core::complexity::TableStore;
use aitlab_core::conservation::{
    verify_function_conservation, verify_prob_conservation, SampleSpec,
};
use aitlab_core::enumeration::{enumerate, EnumCaps, EnumLimits, HaltingTable};
use aitlab_core::exact::{ceil_log2, e_pow_hi, e_pow_lo, pow2, pow2_neg, rat, Rat};
use aitlab_core::graph::{miss_probability_exact, DerandParams, LabeledGraph};
use aitlab_core::lefttotal::IntervalAssignment;
use aitlab_core::machine::{copy_program, run};
use aitlab_core::measure::ElementaryMeasure;
use aitlab_core::sampler::{seeded_rng, BitSource};
use num_traits::{One, Zero};

fn criterion(n: usize, what: &str, body: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match outcome {
        Ok(()) => println!("acceptance {n:>2}: PASS - {what}"),
        Err(e) => {
            println!("acceptance {n:>2}: FAIL - {what}");
            std::panic::resume_unwind(e);
        }
    }
}

fn limits() -> EnumLimits {
    EnumLimits::default()
}

/// The large table (len 20, fuel 1e5) is shared across criteria 1 and 2.
fn table20() -> &'static HaltingTable {
    static TABLE: OnceLock<HaltingTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        enumerate(&EnumCaps::new(20, 100_000, Bits::new()), &limits()).expect("enumerate caps 20")
    })
}

// ---------------------------------------------------------------------------
// 1. Prefix-freeness and exact Kraft mass at the large caps.
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_prefix_free_and_kraft() {
    criterion(1, "prefix-free table with exact Kraft sum <= 1 at (20, 1e5)", || {
        let started = Instant::now();
        let table = table20();
        assert!(table.is_prefix_free(), "two halting programs are prefix-related");
        let kraft = table.kraft_sum();
        assert!(kraft <= Rat::one());
        // Measured once at these caps and pinned; any drift means the
        // machine semantics changed.
        assert_eq!(kraft, rat(175_805, 1_048_576));
        assert_eq!(table.len(), 13_817);
        assert!(started.elapsed().as_secs() < 300, "runtime budget exceeded");
    });
}

// ---------------------------------------------------------------------------
// 2. Semimeasure laws: total mass <= 1 and m(x) >= 2^-K(x) for every output.
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_semimeasure_dominates_complexity() {
    criterion(2, "sum m(x) <= 1 and m(x) >= 2^-K(x) for every enumerated output", || {
        let table = table20();
        let mut per_output: std::collections::BTreeMap<&Bits, (u32, Rat)> =
            std::collections::BTreeMap::new();
        for r in table.records() {
            let entry = per_output
                .entry(&r.output)
                .or_insert_with(|| (u32::MAX, Rat::zero()));
            entry.0 = entry.0.min(r.program.len() as u32);
            entry.1 += pow2_neg(r.program.len());
        }
        assert!(!per_output.is_empty());
        let total: Rat = per_output.values().map(|(_, m)| m.clone()).sum();
        assert!(total <= Rat::one());
        assert_eq!(total, table.kraft_sum());
        for (x, (k, m)) in &per_output {
            assert!(
                *m >= pow2_neg(*k as usize),
                "m({x}) = {m} below 2^-{k}",
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 3. Interval laws, reindexing overhead, and border stability.
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_interval_laws_and_border_stability() {
    criterion(3, "contiguous intervals, +2-bit reindexing, stable border bits", || {
        let mut store = TableStore::new(limits());
        let base_caps = EnumCaps::new(10, 200, Bits::new());
        let assignment =
            IntervalAssignment::from_table(store.table(&base_caps).unwrap());

        // Intervals tile [0, omega) contiguously and disjointly.
        let entries = assignment.entries();
        assert!(!entries.is_empty());
        assert_eq!(entries[0].lo, Rat::zero());
        for w in entries.windows(2) {
            assert!(w[0].lo < w[0].hi);
            assert_eq!(w[0].hi, w[1].lo, "gap or overlap between intervals");
        }
        assert_eq!(&entries.last().unwrap().hi, assignment.omega());

        // Reindexed machine pays at most two extra bits on every output.
        let pd = assignment.prime_domain();
        let mut k_prime: std::collections::BTreeMap<&Bits, usize> =
            std::collections::BTreeMap::new();
        for r in pd.records() {
            let e = k_prime.entry(&r.output).or_insert(usize::MAX);
            *e = (*e).min(r.program.len());
        }
        for e in entries {
            let base = e.program.len();
            let prime = *k_prime.get(&e.output).expect("output missing from reindexed table");
            assert!(prime <= base + 2, "{}: {prime} > {base} + 2", e.output);
        }

        // Total-coverage is left-monotone at every length.
        for n in 1..=8usize {
            let mut seen_nontotal = false;
            for b in Bits::all_of_len(n) {
                let t = assignment.is_total(&b);
                assert!(
                    !(t && seen_nontotal),
                    "total string {b} right of a nontotal one",
                );
                seen_nontotal |= !t;
            }
        }

        // Border digits flagged stable at one fuel rung never change later.
        let fuels: Vec<u64> = (0..7).map(|i| 200u64 << i).collect();
        let mut borders = Vec::new();
        let mut omegas = Vec::new();
        for &fuel in &fuels {
            let caps = EnumCaps::new(10, fuel, Bits::new());
            let a = IntervalAssignment::from_table(store.table(&caps).unwrap());
            borders.push(a.border_prefix(16));
            omegas.push(a.omega().clone());
        }
        for w in omegas.windows(2) {
            assert!(w[0] <= w[1], "halting mass shrank when fuel doubled");
        }
        for i in 0..borders.len() - 1 {
            let a = &borders[i];
            let b = &borders[i + 1];
            let stable = (0..a.len().min(b.len()))
                .take_while(|&j| a.get(j) == b.get(j))
                .count();
            for later in &borders[i + 1..] {
                for j in 0..stable {
                    assert_eq!(
                        a.get(j),
                        later.get(j),
                        "border bit {j} flagged stable at fuel {} changed",
                        fuels[i],
                    );
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 4. Description cost is monotone along totally covered strings.
// ---------------------------------------------------------------------------

fn opt_ge(a: Option<u32>, b: Option<u32>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x >= y,
    }
}

#[test]
fn criterion_04_total_string_monotonicity() {
    criterion(4, "K_b(x|y) never increases along totally covered strings (64-pair grid)", || {
        let mut store = TableStore::new(limits());
        let caps = EnumCaps::new(10, 200, Bits::new());
        let pd = IntervalAssignment::from_table(store.table(&caps).unwrap()).prime_domain();

        let mut totals: Vec<Bits> = Vec::new();
        for n in 1..=6usize {
            totals.extend(Bits::all_of_len(n).into_iter().filter(|b| pd.is_total(b)));
        }
        assert!(totals.len() >= 2, "need at least two totally covered strings");
        totals.sort_by_key(|b| pd.busy_beaver(b));

        let grid: Vec<Bits> = ["", "0", "1", "00", "01", "10", "11", "000"]
            .iter()
            .map(|s| bits(s))
            .collect();
        let mut pairs_checked = 0usize;
        let mut prev: Option<Vec<Option<u32>>> = None;
        for b in &totals {
            let mut row = Vec::with_capacity(64);
            for x in &grid {
                for y in &grid {
                    row.push(pd.k_total(&mut store, x, y, b).unwrap());
                }
            }
            if let Some(p) = prev {
                for (a, c) in p.iter().zip(row.iter()) {
                    assert!(opt_ge(*a, *c), "cost increased along the total order");
                    pairs_checked += 1;
                }
            }
            prev = Some(row);
        }
        assert!(pairs_checked >= 64, "grid smaller than 64 pairs");
    });
}

// ---------------------------------------------------------------------------
// 5. Miss-probability oracle equivalence, e-bracket chain, and Monte Carlo.
// ---------------------------------------------------------------------------

struct MissInstance {
    name: &'static str,
    g: LabeledGraph,
    j: LabeledGraph,
    l: u32,
    t: usize,
    /// Floor of the union-bound exponent t * 2^-l * sum_x m_x.
    floor_b: i64,
}

fn labels(n: usize) -> Vec<Bits> {
    Bits::all_of_len(3).into_iter().take(n).collect()
}

fn complete_on(vs: &[Bits]) -> LabeledGraph {
    LabeledGraph::complete(vs.iter().cloned()).unwrap()
}

fn cycle_on(vs: &[Bits]) -> LabeledGraph {
    let mut edges = Vec::new();
    for i in 0..vs.len() {
        let a = vs[i].clone();
        let b = vs[(i + 1) % vs.len()].clone();
        edges.push((a.clone(), b.clone()));
        edges.push((b, a));
    }
    LabeledGraph::new(vs.iter().cloned(), edges).unwrap()
}

fn miss_instances() -> Vec<MissInstance> {
    let v = labels(8);
    let pair = |i: usize, j: usize| complete_on(&[v[i].clone(), v[j].clone()]);
    let triple =
        |i: usize, j: usize, k: usize| complete_on(&[v[i].clone(), v[j].clone(), v[k].clone()]);
    vec![
        MissInstance { name: "pair-in-K3", g: complete_on(&v[..3]), j: pair(0, 1), l: 2, t: 2, floor_b: 1 },
        MissInstance { name: "K3-in-K3", g: complete_on(&v[..3]), j: triple(0, 1, 2), l: 2, t: 2, floor_b: 3 },
        MissInstance { name: "triple-in-K4", g: complete_on(&v[..4]), j: triple(0, 1, 2), l: 2, t: 2, floor_b: 3 },
        MissInstance { name: "pair-in-K4", g: complete_on(&v[..4]), j: pair(1, 2), l: 2, t: 4, floor_b: 2 },
        MissInstance { name: "pair-in-C4", g: cycle_on(&v[..4]), j: pair(0, 1), l: 1, t: 4, floor_b: 4 },
        MissInstance { name: "pair-in-C5", g: cycle_on(&v[..5]), j: pair(2, 3), l: 1, t: 2, floor_b: 2 },
        MissInstance { name: "pair-in-K5", g: complete_on(&v[..5]), j: pair(0, 4), l: 2, t: 2, floor_b: 1 },
        MissInstance { name: "triple-in-K5", g: complete_on(&v[..5]), j: triple(0, 2, 4), l: 2, t: 3, floor_b: 4 },
        MissInstance { name: "K4-in-K4", g: complete_on(&v[..4]), j: complete_on(&v[..4]), l: 2, t: 1, floor_b: 3 },
        MissInstance { name: "pair-in-C6", g: cycle_on(&v[..6]), j: pair(0, 1), l: 1, t: 3, floor_b: 3 },
        // Degenerate: the two vertices are not adjacent, so no list can
        // catch them and the miss probability is exactly one.
        MissInstance { name: "far-pair-in-C4", g: cycle_on(&v[..4]), j: pair(0, 2), l: 2, t: 2, floor_b: 0 },
    ]
}

/// Marginalizes over every joint list outcome by raw enumeration — no
/// independence or product structure assumed.
fn brute_force_miss(inst: &MissInstance) -> Rat {
    let verts = inst.j.vertices();
    let slots = verts.len() * inst.t;
    let outcome_bits = inst.l as usize * slots;
    assert!(outcome_bits <= 19, "outcome space larger than 10^6");
    let neighbours: Vec<Vec<Bits>> =
        verts.iter().map(|x| inst.g.out_neighbors(x)).collect();
    for n in &neighbours {
        assert!(n.len() <= 1 << inst.l, "degree exceeds the draw range");
    }
    let total = 1u64 << outcome_bits;
    let mask = (1u64 << inst.l) - 1;
    let mut misses = 0u64;
    for code in 0..total {
        let mut c = code;
        let mut missed = true;
        'vertex: for (vi, x) in verts.iter().enumerate() {
            for _ in 0..inst.t {
                let draw = (c & mask) as usize;
                c >>= inst.l;
                if draw < neighbours[vi].len() && inst.j.has_edge(x, &neighbours[vi][draw]) {
                    missed = false;
                    break 'vertex;
                }
            }
        }
        if missed {
            misses += 1;
        }
    }
    rat(misses as i64, 1) / pow2(outcome_bits)
}

#[test]
fn criterion_05_miss_probability_oracle() {
    criterion(5, "exact miss probability = brute force, <= e-bracket, 3-sigma Monte Carlo", || {
        let instances = miss_instances();
        assert!(instances.len() >= 10);
        for (i, inst) in instances.iter().enumerate() {
            let exact = miss_probability_exact(&inst.j, &inst.g, inst.l, inst.t);
            // Zero-tolerance equality against the raw marginalization.
            assert_eq!(exact, brute_force_miss(inst), "{}: oracle mismatch", inst.name);
            // Union-bound chain: product <= e^-b <= upper-bracket(e^-floor(b)).
            assert!(
                exact <= e_pow_hi(-inst.floor_b),
                "{}: {exact} above the e-bracket",
                inst.name,
            );

            // Monte Carlo from a pinned seed, within the 3-sigma band.
            let draws = 10_000u32;
            let mut src = BitSource::new(seeded_rng(0xACCE97, i as u64));
            let verts = inst.j.vertices();
            let neighbours: Vec<Vec<Bits>> =
                verts.iter().map(|x| inst.g.out_neighbors(x)).collect();
            let mut hits = 0u32;
            for _ in 0..draws {
                let mut missed = true;
                'vertex: for (vi, x) in verts.iter().enumerate() {
                    for _ in 0..inst.t {
                        let mut draw = 0usize;
                        for _ in 0..inst.l {
                            draw = draw << 1 | src.bit() as usize;
                        }
                        if draw < neighbours[vi].len()
                            && inst.j.has_edge(x, &neighbours[vi][draw])
                        {
                            missed = false;
                            break 'vertex;
                        }
                    }
                }
                if missed {
                    hits += 1;
                }
            }
            let n = rat(draws as i64, 1);
            let observed = rat(hits as i64, 1);
            let mean = &n * &exact;
            let var = &mean * (Rat::one() - &exact);
            let diff = observed - &mean;
            assert!(
                &diff * &diff <= rat(9, 1) * var,
                "{}: Monte Carlo outside 3 sigma ({hits}/{draws} vs {exact})",
                inst.name,
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 6 + 7. Derandomization contract, witness soundness, pinned lengths.
// ---------------------------------------------------------------------------

/// Factor calibrated once against this fixture family: the smallest c for
/// which every instance derandomizes (the failure branch never fires).
const CALIBRATED_C: u32 = 1;

/// (name, expected list_len, expected witness program bits). Measured once
/// at CALIBRATED_C and pinned; zero drift tolerated.
const WITNESS_PINS: &[(&str, usize, usize)] = &[
    ("two-triples-in-K4", 4, 1260),
    ("three-pairs-in-C5", 4, 869),
    ("four-triples-in-K6", 4, 2648),
    ("five-quints-in-K8", 4, 8092),
    ("mixed-sizes-in-K5", 8, 1869),
    ("desk-pipeline", 128, 279),
];

struct DerandInstance {
    name: &'static str,
    params: DerandParams,
}

fn derand_family(c: u32) -> Vec<DerandInstance> {
    let v = labels(8);
    let sub = |ix: &[usize]| complete_on(&ix.iter().map(|&i| v[i].clone()).collect::<Vec<_>>());
    let measure = |hs: &[(LabeledGraph, Rat)]| {
        ElementaryMeasure::new(
            hs.iter().map(|(h, m)| (graph_to_bits(h), m.clone())).collect::<Vec<_>>(),
        )
        .unwrap()
    };
    vec![
        DerandInstance {
            name: "two-triples-in-K4",
            params: DerandParams {
                graph: complete_on(&v[..4]),
                k: 1,
                l: 4,
                c,
                d: 1,
                measure: measure(&[
                    (sub(&[0, 1, 2]), rat(1, 2)),
                    (sub(&[1, 2, 3]), rat(1, 2)),
                ]),
            },
        },
        DerandInstance {
            name: "three-pairs-in-C5",
            params: DerandParams {
                graph: cycle_on(&v[..5]),
                k: 0,
                l: 2,
                c,
                d: 1,
                measure: measure(&[
                    (sub(&[0, 1]), rat(1, 4)),
                    (sub(&[1, 2]), rat(1, 4)),
                    (sub(&[3, 4]), rat(1, 4)),
                ]),
            },
        },
        // With c*d = 2 the bracket forces catching every support, so the
        // supports overlap on edges of the first vertices, where the
        // fixed-order search actually looks within its budget.
        DerandInstance {
            name: "four-triples-in-K6",
            params: DerandParams {
                graph: complete_on(&v[..6]),
                k: 1,
                l: 3,
                c,
                d: 2,
                measure: measure(&[
                    (sub(&[0, 1, 2]), rat(1, 4)),
                    (sub(&[0, 2, 3]), rat(1, 4)),
                    (sub(&[0, 2, 4]), rat(1, 4)),
                    (sub(&[0, 4, 5]), rat(1, 4)),
                ]),
            },
        },
        DerandInstance {
            name: "five-quints-in-K8",
            params: DerandParams {
                graph: complete_on(&v[..8]),
                k: 2,
                l: 5,
                c,
                d: 2,
                measure: measure(&[
                    (sub(&[0, 1, 2, 3, 4]), rat(1, 8)),
                    (sub(&[0, 1, 2, 3, 5]), rat(1, 8)),
                    (sub(&[0, 1, 4, 5, 6]), rat(1, 8)),
                    (sub(&[0, 1, 3, 6, 7]), rat(1, 8)),
                    (sub(&[0, 1, 2, 6, 7]), rat(1, 8)),
                ]),
            },
        },
        DerandInstance {
            name: "mixed-sizes-in-K5",
            params: DerandParams {
                graph: complete_on(&v[..5]),
                k: 1,
                l: 4,
                c,
                d: 2,
                measure: measure(&[
                    (sub(&[0, 1, 2]), rat(1, 2)),
                    (sub(&[0, 1, 2, 3]), rat(1, 4)),
                ]),
            },
        },
    ]
}

#[test]
fn criterion_06_derandomization_contract() {
    criterion(6, "derandomize beats the e-bracket and packages a valid test at pinned c", || {
        for inst in derand_family(CALIBRATED_C) {
            let cd = (inst.params.c * inst.params.d) as i64;
            // The failure branch must not fire at the calibrated factor.
            let res = derandomize(&inst.params)
                .unwrap_or_else(|e| panic!("{}: contradiction branch fired: {e:?}", inst.name));
            assert!(
                res.expectation < e_pow_lo(-cd),
                "{}: expectation {} not below the bracket",
                inst.name,
                res.expectation,
            );
            assert!(res.test.is_valid(), "{}: packaged test exceeds total mass one", inst.name);
            // is_valid certifies sum P * t <= 1; recompute it here exactly.
            assert!(res.test.expectation() <= Rat::one());
        }
    });
}

#[test]
fn criterion_07_witness_soundness_and_pinned_lengths() {
    criterion(7, "pair witnesses replay exactly and match pinned lengths", || {
        let mut measured: Vec<(&str, usize, usize)> = Vec::new();

        for inst in derand_family(CALIBRATED_C) {
            let res = derandomize(&inst.params).unwrap();
            let w = min_pair_witness(&inst.params, &res.lists, 1_000).unwrap();
            let replay = run(&w.program, &w.x, 1_000);
            assert_eq!(replay.output(), Some(&w.y), "{}: witness does not replay", inst.name);
            assert_ne!(w.x, w.y);
            measured.push((inst.name, res.lists.list_len, w.program.len()));
        }

        // The full pipeline witness on the desk fixture.
        let mut store = TableStore::new(limits());
        let cfg = PipelineConfig {
            set: vec![bits(""), bits("0"), bits("1")],
            k: 1,
            l: 9,
            c: 1,
            caps: EnumCaps::new(10, 200, Bits::new()),
            max_border_len: 8,
            measure: None,
        };
        let rep = pair_witness_pipeline(&mut store, &cfg).unwrap();
        let replay = run(&rep.witness.program, &rep.witness.x, 1_000);
        assert_eq!(replay.output(), Some(&rep.witness.y));
        measured.push(("desk-pipeline", rep.derand.lists.list_len, rep.witness.program.len()));

        assert_eq!(
            measured, WITNESS_PINS,
            "measured witness table drifted from the pins",
        );
        // Length-bound form: every witness fits in ceil(log2 list_len) +
        // OVERHEAD bits, with OVERHEAD fixed by the pins themselves.
        let overhead = WITNESS_PINS
            .iter()
            .map(|(_, ll, len)| len - ceil_log2(*ll) as usize)
            .max()
            .unwrap();
        for (name, ll, len) in &measured {
            assert!(
                *len <= ceil_log2(*ll) as usize + overhead,
                "{name}: witness length above the pinned bound",
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 8. Seeded repeat-collision demonstration.
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_birthday_demonstration() {
    criterion(8, "duplicate rate within 3 sigma of the closed form; pairs cost <= copying", || {
        let started = Instant::now();
        let mut store = TableStore::new(limits());
        let config = BirthdayConfig::desk();
        assert_eq!((config.n, config.draws, config.trials, config.seed), (8, 16, 200, 42));
        let rep = run_birthday(&mut store, &config).unwrap();

        // Closed-form oracle recomputed here: 1 - prod (256 - i) / 256.
        let mut all_distinct = Rat::one();
        for i in 0..config.draws as i64 {
            all_distinct *= rat(256 - i, 256);
        }
        let classical = rep.classical.expect("uniform draws have a classical law");
        assert_eq!(classical.expected, Rat::one() - all_distinct);
        assert!(classical.within, "duplicate frequency outside 3 sigma");

        // Any trial with a repeat admits a pair no costlier than copying.
        let copy_len = copy_program().len() as u32;
        let mut dup_trials = 0;
        for trial in &rep.trials {
            if trial.has_duplicate {
                dup_trials += 1;
                let pair = trial.min_pair.as_ref().expect("duplicate trial without a pair");
                assert!(
                    pair.k <= copy_len,
                    "trial {}: cheapest pair costs {} > copying",
                    trial.trial,
                    pair.k,
                );
            }
        }
        assert!(dup_trials > 0, "no duplicates in 200 trials is itself a 3-sigma event");
        assert!(started.elapsed().as_secs() < 600, "runtime budget exceeded");
    });
}

// ---------------------------------------------------------------------------
// 9. Conservation exactness.
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_conservation_exactness() {
    criterion(9, "exact conservation rows and identity gap = -K(copy) <= 0", || {
        let mut store = TableStore::new(limits());
        let (len, fuel) = (15u32, 1u64 << 16);

        // Identity processing: the gap resolves to exactly minus the
        // description cost of the copying program.
        let f = copy_program();
        let rep = verify_function_conservation(&mut store, &f, &bits("0"), 100, len, fuel)
            .unwrap();
        let k_f = rep.k_f.expect("copy program unreachable as data");
        assert_eq!(rep.gap, Some(-(k_f as i64)));
        assert!(rep.gap.unwrap() <= 0);

        // Randomized processing: expectation over the support is exact and
        // every tail row holds with its bound recomputed here.
        let p = ElementaryMeasure::new([(bits("0"), rat(1, 2)), (bits("1"), rat(1, 4))])
            .unwrap();
        let aux = aitlab_core::codec::measure_to_bits(&p);
        let rep = verify_prob_conservation(
            &mut store,
            &copy_program(),
            &aux,
            100,
            len,
            fuel,
            &[0, 1, 2, 3],
            Some(SampleSpec { seed: 7, stream: 0, draws: 128 }),
        )
        .unwrap();
        assert_eq!(rep.unresolved, 0, "an atom score failed to resolve at these caps");
        let ratio = rep.atom_ratio.clone().expect("resolved atoms give an exact ratio");
        assert!(ratio <= Rat::one());
        for row in &rep.tails {
            assert!(row.ok, "tail at offset {} exceeds its bound", row.offset);
            assert_eq!(row.bound, &ratio * pow2_neg(row.offset as usize));
            assert!(row.tail_mass <= row.bound);
        }
        for s in &rep.sampled {
            assert!(s.hits <= s.draws);
        }
    });
}

// ---------------------------------------------------------------------------
// 10. Blocking-set construction bounds.
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_blocking_set_bounds() {
    criterion(10, "blocking set is small, blocks likely subsets, and q sums <= 1", || {
        let (n, s, c, d) = (4usize, 2u32, 2u32, 2u32);
        let d_set: Vec<Bits> = ["0000", "0001", "0010", "0011"].iter().map(|x| bits(x)).collect();
        let mut enc = Bits::new();
        enc_set(&mut enc, &d_set);
        let q = ElementaryMeasure::point_mass(enc);

        let rep = avoider_witness(&d_set, n, s, &q, c, d, 1 << 20).unwrap();

        // Size bound, recomputed from raw parts: |W| 2^-n <= 2cd 2^-s.
        let lhs = rat(rep.w.len() as i64, 1) * pow2_neg(n);
        let rhs = rat(2 * (c * d) as i64, 1) * pow2_neg(s as usize);
        assert!(lhs <= rhs, "blocking set too large: {lhs} > {rhs}");
        assert_eq!(lhs, rep.w_mass);
        assert_eq!(rhs, rep.w_bound);

        // Mass of likely subsets that avoid W, against the upper bracket.
        let cd = (c * d) as i64;
        assert_eq!(rep.avoid_bound, e_pow_hi(1 - cd));
        assert!(rep.avoid_mass <= rep.avoid_bound);

        // The induced semimeasure stays below total mass one.
        assert!(rep.q_sum <= Rat::one());
        assert!(rep.q_sum_ok);
        assert!(rep.test.is_valid());
        assert!(rep.test.expectation() <= Rat::one());
    });
}

// ---------------------------------------------------------------------------
// 11. Byte-identical reruns of the pinned suite.
// ---------------------------------------------------------------------------

fn collect_files(root: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut stack = vec![root.to_path_buf()];
    let mut out = Vec::new();
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_11_byte_identical_reruns() {
    criterion(11, "two suite runs with the same config produce identical bytes", || {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let manifest_a = aitlab::suite::run_suite(dir_a.path()).unwrap();
        let manifest_b = aitlab::suite::run_suite(dir_b.path()).unwrap();
        assert_eq!(manifest_a, manifest_b);

        let files_a = collect_files(dir_a.path());
        let files_b = collect_files(dir_b.path());
        assert!(!files_a.is_empty());
        assert_eq!(
            files_a.iter().map(|(p, _)| p).collect::<Vec<_>>(),
            files_b.iter().map(|(p, _)| p).collect::<Vec<_>>(),
            "artifact sets differ",
        );
        for ((pa, ba), (_, bb)) in files_a.iter().zip(files_b.iter()) {
            assert_eq!(ba, bb, "artifact {pa} differs between runs");
        }
    });
}
