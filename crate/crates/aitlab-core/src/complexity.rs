//! Capped complexity and algorithmic probability, computed from exhaustive
//! halting tables: K as the shortest recorded program for an output, m as the
//! exact rational mass 2^-|p| summed over recorded programs, plus a halting
//! oracle tape and the information score it induces.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::bits::Bits;
use crate::codec::pair_to_bits;
use crate::enumeration::{enumerate, EnumCaps, EnumError, EnumLimits, HaltingTable};
use crate::exact::{pow2_neg, Rat};

/// Per-output view of a halting table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OutputStats {
    pub min_len: u32,
    pub programs: u64,
    pub mass: Rat,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexityTable {
    pub caps: EnumCaps,
    pub machine_version: u32,
    omega: Rat,
    by_output: BTreeMap<Bits, OutputStats>,
}

impl ComplexityTable {
    pub fn from_table(table: &HaltingTable) -> Self {
        let mut by_output: BTreeMap<Bits, OutputStats> = BTreeMap::new();
        for r in table.records() {
            let len = r.program.len() as u32;
            let mass = pow2_neg(r.program.len());
            by_output
                .entry(r.output.clone())
                .and_modify(|s| {
                    s.min_len = s.min_len.min(len);
                    s.programs += 1;
                    s.mass += &mass;
                })
                .or_insert(OutputStats { min_len: len, programs: 1, mass });
        }
        ComplexityTable {
            caps: table.caps.clone(),
            machine_version: table.machine_version,
            omega: table.kraft_sum(),
            by_output,
        }
    }

    /// Capped prefix complexity of `x`: length of the shortest program that
    /// halts with output `x` within the caps, or None when no recorded
    /// program produces it (infinite at these caps).
    pub fn k_of(&self, x: &Bits) -> Option<u32> {
        self.by_output.get(x).map(|s| s.min_len)
    }

    /// Capped algorithmic probability of `x`: the exact sum of 2^-|p| over
    /// recorded programs with output `x`.
    pub fn m_of(&self, x: &Bits) -> Rat {
        self.by_output.get(x).map(|s| s.mass.clone()).unwrap_or_else(Rat::zero)
    }

    /// Halting probability at these caps (total mass over all outputs).
    pub fn omega(&self) -> &Rat {
        &self.omega
    }

    pub fn outputs(&self) -> impl Iterator<Item = (&Bits, &OutputStats)> {
        self.by_output.iter()
    }

    pub fn output_count(&self) -> usize {
        self.by_output.len()
    }
}

/// Builds and caches halting tables keyed by their full caps (auxiliary tape
/// included), so repeated conditional-complexity queries against the same
/// tape enumerate only once.
pub struct TableStore {
    limits: EnumLimits,
    tables: BTreeMap<EnumCaps, HaltingTable>,
}

impl TableStore {
    pub fn new(limits: EnumLimits) -> Self {
        TableStore { limits, tables: BTreeMap::new() }
    }

    pub fn limits(&self) -> &EnumLimits {
        &self.limits
    }

    pub fn cached_tables(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&mut self, caps: &EnumCaps) -> Result<&HaltingTable, EnumError> {
        if !self.tables.contains_key(caps) {
            let table = enumerate(caps, &self.limits)?;
            self.tables.insert(caps.clone(), table);
        }
        Ok(&self.tables[caps])
    }

    /// Adopts an externally built table (for instance one loaded from disk),
    /// replacing any cached table with the same caps.
    pub fn insert_table(&mut self, table: HaltingTable) {
        self.tables.insert(table.caps.clone(), table);
    }

    /// Conditional capped complexity K(x | aux) under the caps. Defined as
    /// infinite (None) when the conditioning string is longer than the fuel
    /// budget: strings the run could never have processed are out of scope.
    pub fn k_bounded(&mut self, x: &Bits, aux: &Bits, len: u32, fuel: u64) -> Result<Option<u32>, EnumError> {
        if aux.len() as u64 > fuel {
            return Ok(None);
        }
        let caps = EnumCaps::new(len, fuel, aux.clone());
        let table = self.table(&caps)?;
        Ok(table.min_program_len_for(x))
    }

    /// Conditional capped algorithmic probability m(x | aux).
    pub fn m_bounded(&mut self, x: &Bits, aux: &Bits, len: u32, fuel: u64) -> Result<Rat, EnumError> {
        if aux.len() as u64 > fuel {
            return Ok(Rat::zero());
        }
        let caps = EnumCaps::new(len, fuel, aux.clone());
        let table = self.table(&caps)?;
        let mut mass = Rat::zero();
        for r in table.records() {
            if r.output == *x {
                mass += pow2_neg(r.program.len());
            }
        }
        Ok(mass)
    }
}

/// The halting oracle as a tape: one bit per string of length at most the
/// program cap, in canonical order, set exactly when that string is a
/// recorded halting program. Length 2^(cap+1) - 1.
pub fn halt_oracle_tape(table: &HaltingTable) -> Bits {
    let n = (1usize << (table.caps.max_prog_len + 1)) - 1;
    let mut flags = alloc::vec![false; n];
    for r in table.records() {
        let rank: usize = r
            .program
            .rank()
            .try_into()
            .expect("rank of a capped program fits usize");
        flags[rank] = true;
    }
    flags.into_iter().collect()
}

/// Difference of two possibly-infinite complexities.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Score {
    Finite(i64),
    PlusInfinity,
    MinusInfinity,
    /// Both sides infinite at these caps; the difference carries no
    /// information.
    Unresolved,
}

impl Score {
    pub fn from_parts(a: Option<u32>, b: Option<u32>) -> Score {
        match (a, b) {
            (Some(a), Some(b)) => Score::Finite(a as i64 - b as i64),
            (None, Some(_)) => Score::PlusInfinity,
            (Some(_), None) => Score::MinusInfinity,
            (None, None) => Score::Unresolved,
        }
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            Score::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InfoScore {
    pub k_plain: Option<u32>,
    pub k_oracle: Option<u32>,
    pub score: Score,
}

/// Information in the halting problem about `x` at these caps:
/// K(x) - K(x | oracle tape). The caller picks caps with
/// 2^(len+1) - 1 <= fuel so the oracle tape itself is admissible as a
/// conditioning string.
pub fn info_score(
    store: &mut TableStore,
    x: &Bits,
    len: u32,
    fuel: u64,
) -> Result<InfoScore, EnumError> {
    let k_plain = store.k_bounded(x, &Bits::new(), len, fuel)?;
    let plain_caps = EnumCaps::new(len, fuel, Bits::new());
    let oracle = halt_oracle_tape(store.table(&plain_caps)?);
    let k_oracle = store.k_bounded(x, &oracle, len, fuel)?;
    Ok(InfoScore { k_plain, k_oracle, score: Score::from_parts(k_plain, k_oracle) })
}

/// One row of the chain-rule report: complexities of the pair, the first
/// coordinate, and the second given the first. Reported, not asserted; at
/// desk caps the pair encoding is often out of reach.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainRow {
    pub x: Bits,
    pub y: Bits,
    pub k_pair: Option<u32>,
    pub k_x: Option<u32>,
    pub k_y_given_x: Option<u32>,
}

pub fn chain_rule_probe(
    store: &mut TableStore,
    pairs: &[(Bits, Bits)],
    len: u32,
    fuel: u64,
) -> Result<Vec<ChainRow>, EnumError> {
    let mut rows = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        rows.push(ChainRow {
            x: x.clone(),
            y: y.clone(),
            k_pair: store.k_bounded(&pair_to_bits(x, y), &Bits::new(), len, fuel)?,
            k_x: store.k_bounded(x, &Bits::new(), len, fuel)?,
            k_y_given_x: store.k_bounded(y, x, len, fuel)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::exact::pow2_neg;
    use crate::machine::{copy_program, lit_program};

    fn store() -> TableStore {
        TableStore::new(EnumLimits::default())
    }

    #[test]
    fn k_matches_shortest_literal_for_simple_strings() {
        let mut st = store();
        // No program below five bits halts, and the empty-string literal is
        // exactly five bits.
        assert_eq!(st.k_bounded(&bits(""), &bits(""), 12, 1_000).unwrap(), Some(5));
        for x in ["0", "1", "01", "110"] {
            let x = bits(x);
            let k = st.k_bounded(&x, &bits(""), 14, 1_000).unwrap().unwrap();
            assert!(k <= lit_program(&x).len() as u32);
            assert!(k >= 5);
        }
        // Conditioning on x makes the copy program available.
        let x = bits("0110");
        assert!(st.k_bounded(&x, &x, 12, 1_000).unwrap().unwrap() <= copy_program().len() as u32);
    }

    #[test]
    fn mass_decomposes_omega_and_dominates_min_program() {
        let mut st = store();
        let caps = EnumCaps::new(12, 500, Bits::new());
        let table = st.table(&caps).unwrap().clone();
        let ct = ComplexityTable::from_table(&table);
        let mut total = Rat::zero();
        for (_, stats) in ct.outputs() {
            total += &stats.mass;
        }
        assert_eq!(&total, ct.omega());
        // Coding-theorem direction that holds capped: m(x) >= 2^-K(x).
        for (x, stats) in ct.outputs() {
            assert!(stats.mass >= pow2_neg(stats.min_len as usize), "mass below floor for {x:?}");
        }
    }

    #[test]
    fn infinite_when_conditioning_exceeds_fuel() {
        let mut st = store();
        let y: Bits = core::iter::repeat(true).take(64).collect();
        assert_eq!(st.k_bounded(&bits("0"), &y, 10, 60).unwrap(), None);
        assert!(st.m_bounded(&bits("0"), &y, 10, 60).unwrap().is_zero());
    }

    #[test]
    fn oracle_tape_marks_exactly_the_halting_programs() {
        let mut st = store();
        let caps = EnumCaps::new(8, 200, Bits::new());
        let table = st.table(&caps).unwrap();
        let tape = halt_oracle_tape(table);
        assert_eq!(tape.len(), (1 << 9) - 1);
        let copy_rank: usize = copy_program().rank().try_into().unwrap();
        assert!(tape.at(copy_rank));
        let nonprog_rank: usize = bits("1").rank().try_into().unwrap();
        assert!(!tape.at(nonprog_rank));
        // Bit count equals the table size.
        let ones = tape.iter().filter(|b| *b).count();
        assert_eq!(ones, table.len());
    }

    #[test]
    fn info_score_is_finite_for_reachable_strings() {
        let mut st = store();
        // len 10, fuel 2^11 - 1 = admissible oracle tape length.
        let s = info_score(&mut st, &bits(""), 10, 1 << 11).unwrap();
        assert!(s.k_plain.is_some());
        assert!(s.k_oracle.is_some());
        match s.score {
            Score::Finite(v) => assert!(v.abs() <= 10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chain_rows_report_options() {
        let mut st = store();
        let rows =
            chain_rule_probe(&mut st, &[(bits("0"), bits("1"))], 12, 500).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].k_x.is_some());
        assert!(rows[0].k_y_given_x.is_some());
    }
}
