//! Algorithmic statistics at desk scale: randomness deficiency against an
//! explicit measure, a stochasticity score minimized over enumerable measure
//! explanations, probability-bounded tests with exact expectation budgets,
//! and a deterministic small-avoider witness search.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::Bits;
use crate::codec::{self, measure_from_bits, measure_to_bits, pair_to_bits};
use crate::complexity::TableStore;
use crate::enumeration::{EnumCaps, EnumError};
use crate::exact::{ceil_log2_uint, e_pow_hi, e_pow_lo, floor_log2, pow2, pow2_neg, Rat};
use crate::graph::{miss_indicator, IndexedLists, LabeledGraph};
use crate::measure::ElementaryMeasure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgError {
    NotInSupport(Bits),
    NoCandidate,
    MalformedSupport(Bits),
    WrongSetSize { got: usize, want: usize },
    NotOverUniverse(Bits),
    SearchExhausted { scanned: u64 },
    NoWitness,
    Enumeration(EnumError),
}

impl From<EnumError> for AlgError {
    fn from(e: EnumError) -> Self {
        AlgError::Enumeration(e)
    }
}

// ---------------------------------------------------------------------------
// Randomness deficiency
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeficiencyReport {
    pub x: Bits,
    /// floor(-log2 P(x)).
    pub log_term: i64,
    /// K(x | <P>, y) at the caps, None when infinite.
    pub k: Option<u32>,
    /// log_term - k; None means minus infinity (x unreachable at the caps).
    pub value: Option<i64>,
}

/// Randomness deficiency of `x` in `p` given side information `y`:
/// floor(-log2 P(x)) - K(x | <P>, y). Requires x in the support of p.
pub fn deficiency(
    store: &mut TableStore,
    x: &Bits,
    p: &ElementaryMeasure,
    y: &Bits,
    len: u32,
    fuel: u64,
) -> Result<DeficiencyReport, AlgError> {
    if !p.contains(x) {
        return Err(AlgError::NotInSupport(x.clone()));
    }
    let log_term = floor_log2(&p.mass(x).recip());
    let aux = pair_to_bits(&measure_to_bits(p), y);
    let k = store.k_bounded(x, &aux, len, fuel)?;
    let value = k.map(|k| log_term - k as i64);
    Ok(DeficiencyReport { x: x.clone(), log_term, k, value })
}

/// max(d, 1) as used in sophistication-style penalties; minus infinity maps
/// to 1.
pub fn deficiency_floor(value: Option<i64>) -> u64 {
    match value {
        Some(d) if d > 1 => d as u64,
        _ => 1,
    }
}

/// ceil(3 * log2(max(d, 1))) computed exactly in integers as
/// ceil(log2(max(d,1)^3)).
pub fn penalty_bits(value: Option<i64>) -> u64 {
    let d = deficiency_floor(value);
    if d <= 1 {
        return 0;
    }
    let cube = BigUint::from(d).pow(3);
    ceil_log2_uint(&cube)
}

// ---------------------------------------------------------------------------
// Stochasticity
// ---------------------------------------------------------------------------

/// How the complexity of a candidate measure is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Length of the shortest enumerated program (given y) printing <P>.
    WitnessLength,
    /// Capped conditional complexity of the encoding string itself,
    /// K(<P> | y).
    EncodingComplexity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochCandidate {
    pub measure: ElementaryMeasure,
    pub encoding: Bits,
    pub k_measure: u32,
    pub deficiency: Option<i64>,
    pub score: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochReport {
    pub x: Bits,
    pub y: Bits,
    pub convention: Convention,
    pub best: StochCandidate,
    pub candidates: usize,
}

/// Stochasticity of `x` given `y`: the minimum over enumerable measure
/// explanations P (programs at most `search_len` bits that, run with y on the
/// auxiliary tape, print a measure encoding whose support contains x) of
/// K(P | y) + ceil(3 log2 max(d(x|P,y), 1)). Ties break toward the
/// canonically smallest encoding.
pub fn stochasticity(
    store: &mut TableStore,
    x: &Bits,
    y: &Bits,
    len: u32,
    fuel: u64,
    search_len: u32,
    convention: Convention,
) -> Result<StochReport, AlgError> {
    // Collect candidate measures and the shortest printer for each encoding.
    let caps = EnumCaps::new(search_len, fuel, y.clone());
    let mut printers: alloc::collections::BTreeMap<Bits, u32> = alloc::collections::BTreeMap::new();
    for r in store.table(&caps)?.records() {
        let Ok(p) = measure_from_bits(&r.output) else { continue };
        if !p.contains(x) {
            continue;
        }
        let len_bits = r.program.len() as u32;
        printers
            .entry(r.output.clone())
            .and_modify(|l| *l = (*l).min(len_bits))
            .or_insert(len_bits);
    }

    let mut best: Option<StochCandidate> = None;
    let candidates = printers.len();
    for (encoding, printer_len) in printers {
        let p = measure_from_bits(&encoding).expect("candidate encodings decode");
        let k_measure = match convention {
            Convention::WitnessLength => Some(printer_len),
            Convention::EncodingComplexity => store.k_bounded(&encoding, y, len, fuel)?,
        };
        let Some(k_measure) = k_measure else { continue };
        let d = deficiency(store, x, &p, y, len, fuel)?;
        let score = k_measure as u64 + penalty_bits(d.value);
        let cand = StochCandidate {
            measure: p,
            encoding,
            k_measure,
            deficiency: d.value,
            score,
        };
        let better = match &best {
            None => true,
            Some(b) => {
                cand.score < b.score || (cand.score == b.score && cand.encoding < b.encoding)
            }
        };
        if better {
            best = Some(cand);
        }
    }
    let best = best.ok_or(AlgError::NoCandidate)?;
    Ok(StochReport { x: x.clone(), y: y.clone(), convention, best, candidates })
}

// ---------------------------------------------------------------------------
// Probability-bounded tests
// ---------------------------------------------------------------------------

/// A nonnegative test with expectation at most 1 under its reference measure,
/// certified by exact rational arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PTest {
    pub measure: ElementaryMeasure,
    /// Value taken on accepted inputs (rejected inputs score 0).
    pub scale: Rat,
    pub kind: PTestKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PTestKind {
    /// Accepts encoded graphs h that are large complete subgraphs missed by
    /// the lists.
    MissLists { lists: IndexedLists, graph: LabeledGraph, k: u32 },
    /// Accepts encoded 2^s-element subsets of the n-bit universe that avoid
    /// the set w.
    AvoidSet { w: Vec<Bits>, n: usize, s: u32 },
}

impl PTest {
    pub fn eval(&self, input: &Bits) -> Rat {
        let accepted = match &self.kind {
            PTestKind::MissLists { lists, graph, k } => match codec::graph_from_bits(input) {
                Ok(h) => miss_indicator(lists, &h, graph, *k),
                Err(_) => false,
            },
            PTestKind::AvoidSet { w, n, s } => match decode_subset(input, *n, *s) {
                Ok(set) => set.iter().all(|a| w.binary_search(a).is_err()),
                Err(_) => false,
            },
        };
        if accepted {
            self.scale.clone()
        } else {
            Rat::zero()
        }
    }

    /// Exact expectation over the reference measure's support.
    pub fn expectation(&self) -> Rat {
        let mut e = Rat::zero();
        for (s, mass) in self.measure.support() {
            e += mass * self.eval(s);
        }
        e
    }

    pub fn is_valid(&self) -> bool {
        self.expectation() <= Rat::one()
    }
}

/// Decodes a canonical set and checks it is a size-2^s subset of the n-bit
/// universe.
fn decode_subset(input: &Bits, n: usize, s: u32) -> Result<Vec<Bits>, AlgError> {
    let mut pos = 0usize;
    let set = codec::dec_set(input, &mut pos)
        .map_err(|_| AlgError::MalformedSupport(input.clone()))?;
    if pos != input.len() {
        return Err(AlgError::MalformedSupport(input.clone()));
    }
    let want = 1usize << s;
    if set.len() != want {
        return Err(AlgError::WrongSetSize { got: set.len(), want });
    }
    for a in &set {
        if a.len() != n {
            return Err(AlgError::NotOverUniverse(a.clone()));
        }
    }
    Ok(set)
}

// ---------------------------------------------------------------------------
// Small-avoider witness (deterministic)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvoiderReport {
    /// The witness set W, canonically sorted.
    pub w: Vec<Bits>,
    /// |W| * 2^-n and its allowance 2cd * 2^-s.
    pub w_mass: Rat,
    pub w_bound: Rat,
    /// Q-mass of qualifying sets avoiding W and its allowance (upper bracket
    /// of e^(1-cd)).
    pub avoid_mass: Rat,
    pub avoid_bound: Rat,
    /// Sum of the induced semimeasure q(a) = [a in W] (2^s / cd) 2^-n and
    /// whether it stays within 1.
    pub q_sum: Rat,
    pub q_sum_ok: bool,
    pub candidates_scanned: u64,
    /// The avoid-set test certified by this witness.
    pub test: PTest,
}

/// Deterministically finds the first (smallest, then lexicographically
/// earliest) set W of n-bit strings such that W is small (|W| 2^-n <= 2cd
/// 2^-s) and the Q-mass of qualifying 2^s-subsets avoiding W is at most the
/// upper bracket of e^(1-cd). `d_set` must be one of Q's decoded support
/// sets.
pub fn avoider_witness(
    d_set: &[Bits],
    n: usize,
    s: u32,
    q: &ElementaryMeasure,
    c: u32,
    d: u32,
    budget: u64,
) -> Result<AvoiderReport, AlgError> {
    assert!(n <= 16, "universe of 2^n strings must stay desk-sized");
    assert!((s as usize) <= n);
    let want = 1usize << s;
    if d_set.len() != want {
        return Err(AlgError::WrongSetSize { got: d_set.len(), want });
    }
    for a in d_set {
        if a.len() != n {
            return Err(AlgError::NotOverUniverse(a.clone()));
        }
    }

    // Decode every support set once; all must qualify structurally.
    let mut supports: Vec<(Vec<Bits>, Rat)> = Vec::with_capacity(q.len());
    for (enc, mass) in q.support() {
        supports.push((decode_subset(enc, n, s)?, mass.clone()));
    }
    let d_sorted: Vec<Bits> = {
        let mut v = d_set.to_vec();
        v.sort();
        v
    };
    if !supports.iter().any(|(set, _)| *set == d_sorted) {
        return Err(AlgError::NotInSupport(d_sorted[0].clone()));
    }

    let cd = (c as i64) * (d as i64);
    let universe = Bits::all_of_len(n);
    let w_bound = Rat::from_integer((2 * cd).into()) * pow2_neg(s as usize);
    let avoid_bound = e_pow_hi(1 - cd);

    // Only sizes with t * 2^-n <= w_bound can ever pass the size check.
    let mut max_t = universe.len();
    while max_t > 0
        && Rat::from_integer((max_t as i64).into()) * pow2_neg(n) > w_bound
    {
        max_t -= 1;
    }

    let mut scanned = 0u64;
    for t in 0..=max_t {
        let mut combo = FirstCombination::new(universe.len(), t);
        while let Some(idx) = combo.next() {
            scanned += 1;
            if scanned > budget {
                return Err(AlgError::SearchExhausted { scanned });
            }
            let w: Vec<Bits> = idx.iter().map(|&i| universe[i].clone()).collect();
            let mut avoid_mass = Rat::zero();
            for (set, mass) in &supports {
                if set.iter().all(|a| w.binary_search(a).is_err()) {
                    avoid_mass += mass;
                }
            }
            if avoid_mass <= avoid_bound {
                let w_mass = Rat::from_integer((t as i64).into()) * pow2_neg(n);
                let q_sum = &w_mass * pow2(s as usize)
                    / Rat::from_integer(cd.into());
                let q_sum_ok = q_sum <= Rat::one();
                let test = PTest {
                    measure: q.clone(),
                    scale: e_pow_lo(cd - 1),
                    kind: PTestKind::AvoidSet { w: w.clone(), n, s },
                };
                return Ok(AvoiderReport {
                    w,
                    w_mass,
                    w_bound,
                    avoid_mass,
                    avoid_bound,
                    q_sum,
                    q_sum_ok,
                    candidates_scanned: scanned,
                    test,
                });
            }
        }
    }
    Err(AlgError::NoWitness)
}

/// Lexicographic k-combinations of 0..n, emitted smallest index set first.
struct FirstCombination {
    n: usize,
    k: usize,
    state: Option<Vec<usize>>,
}

impl FirstCombination {
    fn new(n: usize, k: usize) -> Self {
        let state = (k <= n).then(|| (0..k).collect());
        FirstCombination { n, k, state }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.clone()?;
        // Advance to the lexicographic successor.
        let mut next = current.clone();
        let mut i = self.k;
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            if next[i] + 1 <= self.n - (self.k - i) {
                next[i] += 1;
                for j in i + 1..self.k {
                    next[j] = next[j - 1] + 1;
                }
                self.state = Some(next);
                break;
            }
        }
        Some(current)
    }
}
