//! Exhaustive enumeration of the halting set under resource caps.
//!
//! The machine's input-exhaustion semantics make the halting set prefix-free,
//! which in turn makes depth-first search over the binary prefix tree
//! complete: a node is explored further only when the machine ran out of
//! program bits exactly at the node's end, every halting program is recorded
//! exactly once, and every other outcome prunes its whole subtree.

use alloc::vec::Vec;

use crate::bits::Bits;
use crate::exact::{pow2_neg, Rat};
use crate::machine::{run_classify, Classified, RunOutcome, MACHINE_VERSION};

use num_traits::Zero;

/// Resource caps identifying one halting table: maximum program length, fuel,
/// and the auxiliary tape contents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct EnumCaps {
    pub max_prog_len: u32,
    pub fuel: u64,
    pub aux: Bits,
}

impl EnumCaps {
    pub fn new(max_prog_len: u32, fuel: u64, aux: Bits) -> Self {
        EnumCaps { max_prog_len, fuel, aux }
    }

    pub fn with_aux(&self, aux: Bits) -> Self {
        EnumCaps { aux, ..self.clone() }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HaltRecord {
    pub program: Bits,
    pub output: Bits,
    pub steps: u64,
}

/// All programs of length at most the cap that halt within the fuel budget on
/// the given auxiliary tape, sorted in canonical program order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HaltingTable {
    pub caps: EnumCaps,
    pub machine_version: u32,
    records: Vec<HaltRecord>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EnumLimits {
    pub max_records: usize,
    pub max_nodes: u64,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_records: 2_000_000, max_nodes: 200_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnumError {
    RecordBudget { limit: usize },
    NodeBudget { limit: u64 },
}

impl HaltingTable {
    pub fn records(&self) -> &[HaltRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Exact sum of 2^-|p| over recorded programs: the halting probability of
    /// the capped machine, and a lower approximant of the machine's halting
    /// probability as caps grow.
    pub fn kraft_sum(&self) -> Rat {
        let mut count_by_len = alloc::collections::BTreeMap::new();
        for r in &self.records {
            *count_by_len.entry(r.program.len()).or_insert(0u64) += 1;
        }
        let mut sum = Rat::zero();
        for (len, count) in count_by_len {
            sum += pow2_neg(len) * Rat::from_integer(count.into());
        }
        sum
    }

    /// True when no recorded program is a prefix of another. Checked by
    /// sorting prefix-first lexicographically, which makes any violation an
    /// adjacent pair.
    pub fn is_prefix_free(&self) -> bool {
        let mut as_bools: Vec<Vec<bool>> =
            self.records.iter().map(|r| r.program.iter().collect()).collect();
        as_bools.sort();
        as_bools
            .windows(2)
            .all(|w| !(w[1].len() >= w[0].len() && w[1][..w[0].len()] == w[0][..]))
    }

    pub fn min_program_len_for(&self, output: &Bits) -> Option<u32> {
        self.records
            .iter()
            .filter(|r| &r.output == output)
            .map(|r| r.program.len() as u32)
            .min()
    }
}

/// Depth-first walk from `root`, appending halting records. Returns the
/// number of nodes visited.
fn walk(
    caps: &EnumCaps,
    limits: &EnumLimits,
    root: Bits,
    stop_depth: Option<u32>,
    roots_out: Option<&mut Vec<Bits>>,
    records: &mut Vec<HaltRecord>,
) -> Result<u64, EnumError> {
    let mut stack = alloc::vec![root];
    let mut nodes = 0u64;
    let mut roots_out = roots_out;
    while let Some(p) = stack.pop() {
        if let (Some(depth), Some(roots)) = (stop_depth, roots_out.as_mut()) {
            if p.len() as u32 == depth {
                roots.push(p);
                continue;
            }
        }
        nodes += 1;
        if nodes > limits.max_nodes {
            return Err(EnumError::NodeBudget { limit: limits.max_nodes });
        }
        match run_classify(&p, &caps.aux, caps.fuel) {
            Classified::NeedsBit => {
                if (p.len() as u32) < caps.max_prog_len {
                    let mut one = p.clone();
                    one.push(true);
                    let mut zero = p;
                    zero.push(false);
                    stack.push(one);
                    stack.push(zero);
                }
            }
            Classified::Done(RunOutcome::Halted { output, steps, .. }) => {
                if records.len() >= limits.max_records {
                    return Err(EnumError::RecordBudget { limit: limits.max_records });
                }
                records.push(HaltRecord { program: p, output, steps });
            }
            Classified::Done(_) => {}
        }
    }
    Ok(nodes)
}

/// Enumerates the full halting table under `caps`.
pub fn enumerate(caps: &EnumCaps, limits: &EnumLimits) -> Result<HaltingTable, EnumError> {
    let mut records = Vec::new();
    walk(caps, limits, Bits::new(), None, None, &mut records)?;
    records.sort_by(|a, b| a.program.cmp(&b.program));
    Ok(HaltingTable { caps: caps.clone(), machine_version: MACHINE_VERSION, records })
}

/// Work splitting: the records of all programs shorter than `depth`, plus the
/// still-viable prefixes of exactly `depth` bits, each of which can be
/// enumerated independently with `enumerate_from` and merged.
pub struct ShardPlan {
    pub short_records: Vec<HaltRecord>,
    pub roots: Vec<Bits>,
}

pub fn shard_plan(caps: &EnumCaps, limits: &EnumLimits, depth: u32) -> Result<ShardPlan, EnumError> {
    assert!(depth <= caps.max_prog_len, "shard depth beyond program cap");
    let mut records = Vec::new();
    let mut roots = Vec::new();
    walk(caps, limits, Bits::new(), Some(depth), Some(&mut roots), &mut records)?;
    roots.sort();
    Ok(ShardPlan { short_records: records, roots })
}

/// Enumerates the subtree rooted at one shard prefix.
pub fn enumerate_from(
    caps: &EnumCaps,
    limits: &EnumLimits,
    root: &Bits,
) -> Result<Vec<HaltRecord>, EnumError> {
    let mut records = Vec::new();
    walk(caps, limits, root.clone(), None, None, &mut records)?;
    Ok(records)
}

/// Recombines shard outputs (plus the short-program pre-pass) into the same
/// table `enumerate` would have produced.
pub fn merge_shards(
    caps: &EnumCaps,
    parts: impl IntoIterator<Item = Vec<HaltRecord>>,
) -> HaltingTable {
    let mut records: Vec<HaltRecord> = parts.into_iter().flatten().collect();
    records.sort_by(|a, b| a.program.cmp(&b.program));
    debug_assert!(records.windows(2).all(|w| w[0].program != w[1].program));
    HaltingTable { caps: caps.clone(), machine_version: MACHINE_VERSION, records }
}
