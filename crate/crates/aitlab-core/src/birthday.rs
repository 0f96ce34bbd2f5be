//! The birthday experiment: draw a handful of random strings per trial,
//! detect exact repeats against the classical closed form, and measure the
//! smallest capped conditional complexity over ordered pairs of draws — a
//! repeat certifies a six-bit description, near-misses show up as longer
//! witnesses. Every random choice is seeded and per-trial streamed, so runs
//! are reproducible bit for bit.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::bits::Bits;
use crate::complexity::TableStore;
use crate::enumeration::{EnumCaps, EnumError};
use crate::exact::{pow2, rat, Rat};
use crate::measure::ElementaryMeasure;
use crate::sampler::{sample, seeded_rng, BitSource};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BirthdayError {
    Enumeration(EnumError),
    /// A supplied distribution must cover the whole unit of mass, otherwise
    /// draws can fall into the missing tail.
    NotProbability,
    /// Rejection sampling for distinct draws gave up.
    DistinctExhausted { trial: u32 },
}

impl From<EnumError> for BirthdayError {
    fn from(e: EnumError) -> Self {
        BirthdayError::Enumeration(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirthdayConfig {
    /// Length of each drawn string.
    pub n: usize,
    /// Draws per trial.
    pub draws: u32,
    pub trials: u32,
    pub seed: u64,
    /// Caps for the pairwise conditional complexity.
    pub len: u32,
    pub fuel: u64,
    /// Redraw until the trial's strings are pairwise distinct.
    pub distinct: bool,
    /// Draw from this measure instead of the uniform n-bit distribution.
    pub distribution: Option<ElementaryMeasure>,
}

impl BirthdayConfig {
    /// The desk default: sixteen 8-bit draws, the square-root-of-universe
    /// regime where repeats are likely but not certain.
    pub fn desk() -> Self {
        BirthdayConfig {
            n: 8,
            draws: 16,
            trials: 200,
            seed: 42,
            len: 12,
            fuel: 10_000,
            distinct: false,
            distribution: None,
        }
    }
}

/// The best ordered pair of one trial: running the witness with `x` on the
/// auxiliary tape prints `y` in `k` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairScore {
    pub x: Bits,
    pub y: Bits,
    pub k: u32,
    pub witness: Bits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    pub trial: u32,
    pub draws: Vec<Bits>,
    pub has_duplicate: bool,
    /// Smallest K(y | x) over ordered pairs of distinct draw positions;
    /// None when no pair resolves at the caps.
    pub min_pair: Option<PairScore>,
}

/// Exact probability that `draws` uniform samples from a universe of 2^n
/// elements contain a repeat.
pub fn classical_duplicate_probability(n: usize, draws: u32) -> Rat {
    let universe = pow2(n);
    let mut none = Rat::one();
    for i in 0..draws {
        let left = &universe - rat(i as i64, 1);
        if left <= Rat::zero() {
            return Rat::one();
        }
        none *= left / &universe;
    }
    Rat::one() - none
}

/// Empirical frequency against an exact null, compared in squared form:
/// (observed - expected)^2 <= 9 * expected * (1 - expected) / trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaCheck {
    pub expected: Rat,
    pub observed: Rat,
    pub within: bool,
}

impl SigmaCheck {
    fn new(expected: Rat, hits: u32, trials: u32) -> Self {
        let observed = rat(hits as i64, trials as i64);
        let diff = &observed - &expected;
        let var = &expected * (Rat::one() - &expected) / rat(trials as i64, 1);
        let within = &diff * &diff <= var * rat(9, 1);
        SigmaCheck { expected, observed, within }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BirthdayReport {
    pub config: BirthdayConfig,
    pub trials: Vec<TrialResult>,
    pub duplicate_trials: u32,
    /// Duplicate frequency against the exact classical law; absent when the
    /// draws are forced distinct or come from a custom distribution.
    pub classical: Option<SigmaCheck>,
    /// Count of trials per best pair score.
    pub histogram: BTreeMap<Option<u32>, u32>,
}

/// Runs the experiment. Trial t draws from stream t of the seed, so any
/// single trial can be replayed in isolation.
pub fn run_birthday(
    store: &mut TableStore,
    config: &BirthdayConfig,
) -> Result<BirthdayReport, BirthdayError> {
    if let Some(p) = &config.distribution {
        if !p.is_probability() {
            return Err(BirthdayError::NotProbability);
        }
    }

    let mut trials = Vec::with_capacity(config.trials as usize);
    let mut histogram: BTreeMap<Option<u32>, u32> = BTreeMap::new();
    let mut duplicate_trials = 0u32;

    for trial in 0..config.trials {
        let draws = draw_trial(config, trial)?;
        let mut sorted = draws.clone();
        sorted.sort();
        let has_duplicate = sorted.windows(2).any(|w| w[0] == w[1]);
        if has_duplicate {
            duplicate_trials += 1;
        }
        let min_pair = best_pair(store, &draws, config.len, config.fuel)?;
        *histogram.entry(min_pair.as_ref().map(|p| p.k)).or_insert(0) += 1;
        trials.push(TrialResult { trial, draws, has_duplicate, min_pair });
    }

    let classical = (!config.distinct && config.distribution.is_none()).then(|| {
        SigmaCheck::new(
            classical_duplicate_probability(config.n, config.draws),
            duplicate_trials,
            config.trials,
        )
    });

    Ok(BirthdayReport {
        config: config.clone(),
        trials,
        duplicate_trials,
        classical,
        histogram,
    })
}

fn draw_trial(config: &BirthdayConfig, trial: u32) -> Result<Vec<Bits>, BirthdayError> {
    let mut src = BitSource::new(seeded_rng(config.seed, trial as u64));
    let mut draws: Vec<Bits> = Vec::with_capacity(config.draws as usize);
    let mut attempts = 0u64;
    let budget = (config.draws as u64).saturating_mul(64).max(1024);
    while draws.len() < config.draws as usize {
        attempts += 1;
        if attempts > budget {
            return Err(BirthdayError::DistinctExhausted { trial });
        }
        let x = match &config.distribution {
            Some(p) => sample(p, &mut src).expect("probability measures have no tail"),
            None => src.uniform_bits(config.n),
        };
        if config.distinct && draws.contains(&x) {
            continue;
        }
        draws.push(x);
    }
    Ok(draws)
}

/// Smallest capped conditional complexity over ordered pairs of distinct
/// draw positions (equal strings at different positions count — that is the
/// whole point of a repeat). Scan order fixes ties: earlier (i, j) wins.
fn best_pair(
    store: &mut TableStore,
    draws: &[Bits],
    len: u32,
    fuel: u64,
) -> Result<Option<PairScore>, BirthdayError> {
    let mut best: Option<PairScore> = None;
    for (i, x) in draws.iter().enumerate() {
        for (j, y) in draws.iter().enumerate() {
            if i == j {
                continue;
            }
            let Some(k) = store.k_bounded(y, x, len, fuel)? else { continue };
            if best.as_ref().is_some_and(|b| b.k <= k) {
                continue;
            }
            let witness = shortest_witness(store, x, y, len, fuel)?;
            best = Some(PairScore { x: x.clone(), y: y.clone(), k, witness });
        }
    }
    Ok(best)
}

/// The canonically first shortest recorded program printing `y` with `x` on
/// the auxiliary tape.
fn shortest_witness(
    store: &mut TableStore,
    x: &Bits,
    y: &Bits,
    len: u32,
    fuel: u64,
) -> Result<Bits, BirthdayError> {
    let caps = EnumCaps::new(len, fuel, x.clone());
    let table = store.table(&caps)?;
    let witness = table
        .records()
        .iter()
        .filter(|r| &r.output == y)
        .map(|r| r.program.clone())
        .min()
        .expect("a finite score always has a recorded witness");
    Ok(witness)
}
