//! Conservation-of-information checks: processing a string by a fixed
//! program, or pushing it through a computed measure, cannot raise its
//! oracle-information score by more than the processor's own description
//! length. Everything assertable is asserted in exact arithmetic; scores the
//! caps cannot resolve are flagged, never guessed.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::bits::Bits;
use crate::codec::{measure_from_bits, pair_to_bits, CodecError};
use crate::complexity::{info_score, InfoScore, TableStore};
use crate::enumeration::EnumError;
use crate::exact::{pow2_neg, pow2_signed, Rat};
use crate::machine::{run, RunOutcome};
use crate::measure::ElementaryMeasure;
use crate::sampler::{sample, seeded_rng, BitSource};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsError {
    /// The processor did not halt on its input.
    ReplayFailed { program: Bits },
    /// The processor's output is not a measure encoding.
    BadEncoding(CodecError),
    Enumeration(EnumError),
}

impl From<EnumError> for ConsError {
    fn from(e: EnumError) -> Self {
        ConsError::Enumeration(e)
    }
}

/// One atom of the output measure with its information accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomRow {
    pub atom: Bits,
    pub mass: Rat,
    pub info: InfoScore,
    /// Score of the joint encoding <q, atom>; reported, not asserted.
    pub pair_info: InfoScore,
}

/// One Markov-inequality row: mass of atoms whose score exceeds the
/// program's by at least `offset`, against the exact bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailRow {
    pub offset: u32,
    pub tail_mass: Rat,
    pub bound: Rat,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpec {
    pub seed: u64,
    pub stream: u64,
    pub draws: u32,
}

/// Empirical counterpart of one tail row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledTail {
    pub offset: u32,
    pub hits: u32,
    pub draws: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbConservationReport {
    pub program: Bits,
    pub encoding: Bits,
    pub measure: ElementaryMeasure,
    pub program_info: InfoScore,
    pub atoms: Vec<AtomRow>,
    /// Atoms whose score did not resolve at the caps.
    pub unresolved: usize,
    /// sum of mass * 2^score over resolved atoms, divided by 2^(program
    /// score); None when the program's own score is unresolved.
    pub atom_ratio: Option<Rat>,
    pub tails: Vec<TailRow>,
    pub sampled: Vec<SampledTail>,
}

/// Checks information conservation for randomized processing at desk scale.
/// `q` is a program that, run with `aux` on the tape, prints a measure
/// encoding. Every resolved atom enters an exact Markov table: the mass of
/// atoms scoring `m` above the program is at most (atom ratio) * 2^-m.
#[allow(clippy::too_many_arguments)]
pub fn verify_prob_conservation(
    store: &mut TableStore,
    q: &Bits,
    aux: &Bits,
    run_fuel: u64,
    len: u32,
    fuel: u64,
    offsets: &[u32],
    sample_spec: Option<SampleSpec>,
) -> Result<ProbConservationReport, ConsError> {
    let encoding = match run(q, aux, run_fuel) {
        RunOutcome::Halted { output, .. } => output,
        _ => return Err(ConsError::ReplayFailed { program: q.clone() }),
    };
    let measure = measure_from_bits(&encoding).map_err(ConsError::BadEncoding)?;

    let program_info = info_score(store, q, len, fuel)?;
    let mut atoms = Vec::with_capacity(measure.len());
    for (a, mass) in measure.support() {
        atoms.push(AtomRow {
            atom: a.clone(),
            mass: mass.clone(),
            info: info_score(store, a, len, fuel)?,
            pair_info: info_score(store, &pair_to_bits(q, a), len, fuel)?,
        });
    }

    let unresolved = atoms.iter().filter(|r| r.info.score.finite().is_none()).count();
    let q_score = program_info.score.finite();
    let atom_ratio = q_score.map(|qs| {
        let mut sum = Rat::zero();
        for r in &atoms {
            if let Some(s) = r.info.score.finite() {
                sum += &r.mass * pow2_signed(s);
            }
        }
        sum / pow2_signed(qs)
    });

    let mut tails = Vec::with_capacity(offsets.len());
    if let (Some(qs), Some(ratio)) = (q_score, atom_ratio.as_ref()) {
        for &m in offsets {
            let mut tail_mass = Rat::zero();
            for r in &atoms {
                if let Some(s) = r.info.score.finite() {
                    if s >= qs + m as i64 {
                        tail_mass += &r.mass;
                    }
                }
            }
            let bound = ratio * pow2_neg(m as usize);
            let ok = tail_mass <= bound;
            tails.push(TailRow { offset: m, tail_mass, bound, ok });
        }
    }

    let mut sampled = Vec::new();
    if let (Some(spec), Some(qs)) = (sample_spec, q_score) {
        let mut src = BitSource::new(seeded_rng(spec.seed, spec.stream));
        let scores: alloc::collections::BTreeMap<&Bits, Option<i64>> = atoms
            .iter()
            .map(|r| (&r.atom, r.info.score.finite()))
            .collect();
        let mut hit_counts = alloc::vec![0u32; offsets.len()];
        for _ in 0..spec.draws {
            let Some(a) = sample(&measure, &mut src) else { continue };
            if let Some(Some(s)) = scores.get(&a) {
                for (row, &m) in hit_counts.iter_mut().zip(offsets) {
                    if *s >= qs + m as i64 {
                        *row += 1;
                    }
                }
            }
        }
        for (&m, hits) in offsets.iter().zip(hit_counts) {
            sampled.push(SampledTail { offset: m, hits, draws: spec.draws });
        }
    }

    Ok(ProbConservationReport {
        program: q.clone(),
        encoding,
        measure,
        program_info,
        atoms,
        unresolved,
        atom_ratio,
        tails,
        sampled,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FnConservationReport {
    pub f: Bits,
    pub input: Bits,
    pub output: Bits,
    pub info_input: InfoScore,
    pub info_output: InfoScore,
    /// Complexity of the program string itself, as data.
    pub k_f: Option<u32>,
    /// score(output) - score(input) - K(f); nonpositive when conservation
    /// holds with a zero constant. None when any part is unresolved.
    pub gap: Option<i64>,
}

/// Checks information conservation for deterministic processing: running
/// `f` on `input` (as auxiliary tape) and comparing scores before and after.
pub fn verify_function_conservation(
    store: &mut TableStore,
    f: &Bits,
    input: &Bits,
    run_fuel: u64,
    len: u32,
    fuel: u64,
) -> Result<FnConservationReport, ConsError> {
    let output = match run(f, input, run_fuel) {
        RunOutcome::Halted { output, .. } => output,
        _ => return Err(ConsError::ReplayFailed { program: f.clone() }),
    };
    let info_input = info_score(store, input, len, fuel)?;
    let info_output = info_score(store, &output, len, fuel)?;
    let k_f = store.k_bounded(f, &Bits::new(), len, fuel)?;
    let gap = match (info_output.score.finite(), info_input.score.finite(), k_f) {
        (Some(io), Some(ii), Some(kf)) => Some(io - ii - kf as i64),
        _ => None,
    };
    Ok(FnConservationReport {
        f: f.clone(),
        input: input.clone(),
        output,
        info_input,
        info_output,
        k_f,
        gap,
    })
}
