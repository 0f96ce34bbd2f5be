//! A prefix-free universal stack machine over bit strings.
//!
//! A program is a bit string executed left to right; instructions and their
//! immediates are self-delimiting, and the machine halts successfully only
//! when a HALT instruction fires with every program bit consumed. Reading past
//! the end of the program is invalid, so the set of halting programs (for any
//! fixed auxiliary tape and fuel) is prefix-free by construction: a proper
//! prefix of a halting program ends mid-instruction and a proper extension
//! dies with unread bits.
//!
//! Opcode prefix code (complete: lengths sum to 1 under 2^-len):
//!
//! ```text
//! 0          LIT  s   push the literal string s (logarithmic length frame)
//! 100        AUX      push the whole auxiliary tape
//! 101        HALT     pop the output; every program bit must be consumed
//! 1100       CAT      pop b, pop a, push a ++ b
//! 1101       REP  n   pop x, push x repeated n times
//! 11100      EVAL     pop q, pop a, push the output of running q on aux a
//! 11101      ITER n   pop q, pop a, push q iterated n times starting from a
//! 111100     NOT      pop x, push x with every bit flipped
//! 111101     TAKE n   pop x, push the first n bits of x (saturating)
//! 111110     DROP n   pop x, push x without its first n bits (saturating)
//! 1111110    EVALAUX  parse aux as framed q followed by z; push run of q on z
//! 11111110   LOOP     consume all remaining fuel (never halts)
//! 111111110  DERAND params i  deterministic-list lookup, see below
//! 111111111  reserved (invalid)
//! ```
//!
//! DERAND embeds a full parameter block (graph, k, l, c, d, measure over
//! encoded subgraphs), recomputes the deterministic indexed lists exactly as
//! the library search does, treats the auxiliary tape as a vertex x, and
//! pushes entry i of the list at x. Witness programs produced by the pair
//! search replay through this opcode.
//!
//! Fuel meters decoded instructions (immediates ride along free), is checked
//! before each decode, and is shared with nested EVAL/ITER/EVALAUX runs, so
//! raising fuel never turns a halting run into anything else.
//!
//! HALT pops the output and ignores anything left below it on the stack;
//! only input exhaustion is load-bearing for prefix-freeness.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::bits::Bits;
use crate::codec::{self, CodecError};
use crate::exact::e_pow_lo;
use crate::graph::{derand_search, DerandError, DerandParams};

/// Bumped whenever observable machine behaviour changes; embedded in every
/// persisted artifact so stale caches are never silently reused.
pub const MACHINE_VERSION: u32 = 1;

/// Hard ceiling on the length of any value on the stack or produced as
/// output. Exceeding it makes the run invalid.
pub const MAX_VALUE_BITS: usize = 1 << 20;

/// Maximum EVAL/ITER/EVALAUX nesting depth.
pub const MAX_NEST: usize = 64;

/// Fixed machine constants for the DERAND instruction: the candidate scan
/// gives up (invalidating the run) after this many candidates, and refuses
/// parameter blocks needing more than this many list slots.
pub const DERAND_CANDIDATE_BUDGET: usize = 1 << 22;
pub const DERAND_SLOT_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// The reserved all-ones opcode was decoded.
    ReservedOpcode,
    /// The outer program ran out of bits mid-instruction.
    NeedsInput,
    /// A nested program (EVAL/ITER/EVALAUX) ran out of bits.
    InnerExhausted,
    /// A pop on an empty stack.
    StackUnderflow,
    /// HALT fired with program bits still unread.
    LeftoverInput,
    /// A value exceeded MAX_VALUE_BITS.
    ValueTooLarge,
    /// Nesting exceeded MAX_NEST.
    NestTooDeep,
    /// EVALAUX could not parse the auxiliary tape.
    MalformedAux,
    /// DERAND parameters failed to decode or validate.
    DerandParams,
    /// DERAND decoded fine but the lookup failed (aux not a vertex, empty
    /// slot, or index out of range).
    DerandMiss,
    /// DERAND's candidate scan exhausted its fixed budget.
    DerandExhausted,
    /// Produced by the interval machine in the layer above, never by `run`:
    /// the queried string selects no interval.
    NotInPrimeDomain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { output: Bits, steps: u64, bits_consumed: usize },
    OutOfFuel { steps: u64, bits_consumed: usize },
    Invalid { reason: InvalidReason, steps: u64, bits_consumed: usize },
}

impl RunOutcome {
    pub fn output(&self) -> Option<&Bits> {
        match self {
            RunOutcome::Halted { output, .. } => Some(output),
            _ => None,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            RunOutcome::Halted { steps, .. }
            | RunOutcome::OutOfFuel { steps, .. }
            | RunOutcome::Invalid { steps, .. } => *steps,
        }
    }
}

/// `run` outcome refined for enumeration: a program whose next read falls
/// exactly at its end is a viable node whose children deserve a visit, while
/// every other non-halting outcome prunes the whole subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classified {
    Done(RunOutcome),
    NeedsBit,
}

enum Stop {
    NeedBit,
    OutOfFuel,
    Invalid(InvalidReason),
}

enum Op {
    Lit,
    Aux,
    Halt,
    Cat,
    Rep,
    Eval,
    Iter,
    Not,
    Take,
    Drop,
    EvalAux,
    Loop,
    Derand,
}

struct Machine {
    fuel: u64,
    steps: u64,
    /// High-water mark of the outer program cursor, for reporting.
    consumed: usize,
}

impl Machine {
    fn read(&mut self, program: &Bits, pos: &mut usize, outer: bool) -> Result<bool, Stop> {
        match program.get(*pos) {
            Some(b) => {
                *pos += 1;
                if outer {
                    self.consumed = (*pos).max(self.consumed);
                }
                Ok(b)
            }
            None => Err(if outer { Stop::NeedBit } else { Stop::Invalid(InvalidReason::InnerExhausted) }),
        }
    }

    fn map_codec(&self, e: CodecError, outer: bool) -> Stop {
        match e {
            CodecError::OutOfBits { .. } => {
                if outer {
                    Stop::NeedBit
                } else {
                    Stop::Invalid(InvalidReason::InnerExhausted)
                }
            }
            CodecError::Malformed(_) => Stop::Invalid(InvalidReason::DerandParams),
        }
    }

    fn decode_op(&mut self, program: &Bits, pos: &mut usize, outer: bool) -> Result<Op, Stop> {
        if !self.read(program, pos, outer)? {
            return Ok(Op::Lit);
        }
        if !self.read(program, pos, outer)? {
            return Ok(if !self.read(program, pos, outer)? { Op::Aux } else { Op::Halt });
        }
        if !self.read(program, pos, outer)? {
            return Ok(if !self.read(program, pos, outer)? { Op::Cat } else { Op::Rep });
        }
        if !self.read(program, pos, outer)? {
            return Ok(if !self.read(program, pos, outer)? { Op::Eval } else { Op::Iter });
        }
        if !self.read(program, pos, outer)? {
            return Ok(if !self.read(program, pos, outer)? { Op::Not } else { Op::Take });
        }
        if !self.read(program, pos, outer)? {
            return Ok(Op::Drop);
        }
        if !self.read(program, pos, outer)? {
            return Ok(Op::EvalAux);
        }
        if !self.read(program, pos, outer)? {
            return Ok(Op::Loop);
        }
        if !self.read(program, pos, outer)? {
            return Ok(Op::Derand);
        }
        Err(Stop::Invalid(InvalidReason::ReservedOpcode))
    }

    /// Reads a number immediate. The unary length frame always decodes or
    /// wants more bits; it is never malformed.
    fn read_nat(&mut self, program: &Bits, pos: &mut usize, outer: bool) -> Result<BigUint, Stop> {
        let r = codec::dec_nat_big(program, pos);
        if outer {
            self.consumed = (*pos).max(self.consumed);
        }
        r.map_err(|e| self.map_codec(e, outer))
    }

    fn check_len(&self, len: usize) -> Result<(), Stop> {
        if len > MAX_VALUE_BITS {
            Err(Stop::Invalid(InvalidReason::ValueTooLarge))
        } else {
            Ok(())
        }
    }

    fn exec(&mut self, program: &Bits, aux: &Bits, depth: usize) -> Result<Bits, Stop> {
        if depth > MAX_NEST {
            return Err(Stop::Invalid(InvalidReason::NestTooDeep));
        }
        let outer = depth == 0;
        let mut pos = 0usize;
        let mut stack: Vec<Bits> = Vec::new();

        macro_rules! pop {
            () => {
                stack.pop().ok_or(Stop::Invalid(InvalidReason::StackUnderflow))?
            };
        }

        loop {
            if self.steps >= self.fuel {
                return Err(Stop::OutOfFuel);
            }
            let op = self.decode_op(program, &mut pos, outer)?;
            self.steps += 1;
            match op {
                Op::Lit => {
                    let n = self.read_nat(program, &mut pos, outer)?;
                    let n = match n.to_usize() {
                        Some(n) if n <= MAX_VALUE_BITS => n,
                        _ => return Err(Stop::Invalid(InvalidReason::ValueTooLarge)),
                    };
                    let mut x = Bits::with_capacity(n);
                    for _ in 0..n {
                        x.push(self.read(program, &mut pos, outer)?);
                    }
                    stack.push(x);
                }
                Op::Aux => {
                    self.check_len(aux.len())?;
                    stack.push(aux.clone());
                }
                Op::Halt => {
                    let out = pop!();
                    if pos != program.len() {
                        return Err(Stop::Invalid(InvalidReason::LeftoverInput));
                    }
                    return Ok(out);
                }
                Op::Cat => {
                    let b = pop!();
                    let a = pop!();
                    self.check_len(a.len() + b.len())?;
                    stack.push(a.concat(&b));
                }
                Op::Rep => {
                    let n = self.read_nat(program, &mut pos, outer)?;
                    let x = pop!();
                    if x.is_empty() {
                        stack.push(Bits::new());
                    } else {
                        let total = &n * BigUint::from(x.len());
                        if total > BigUint::from(MAX_VALUE_BITS) {
                            return Err(Stop::Invalid(InvalidReason::ValueTooLarge));
                        }
                        stack.push(x.repeat(n.to_usize().expect("bounded by MAX_VALUE_BITS")));
                    }
                }
                Op::Eval => {
                    let q = pop!();
                    let a = pop!();
                    let out = self.exec(&q, &a, depth + 1)?;
                    stack.push(out);
                }
                Op::Iter => {
                    let n = self.read_nat(program, &mut pos, outer)?;
                    let q = pop!();
                    let mut a = pop!();
                    let mut left = n;
                    while !left.is_zero() {
                        a = self.exec(&q, &a, depth + 1)?;
                        left -= BigUint::one();
                    }
                    stack.push(a);
                }
                Op::Not => {
                    let x = pop!();
                    stack.push(x.flipped());
                }
                Op::Take => {
                    let n = self.read_nat(program, &mut pos, outer)?;
                    let x = pop!();
                    let k = n.to_usize().map_or(x.len(), |n| n.min(x.len()));
                    stack.push(x.take(k));
                }
                Op::Drop => {
                    let n = self.read_nat(program, &mut pos, outer)?;
                    let x = pop!();
                    let k = n.to_usize().map_or(x.len(), |n| n.min(x.len()));
                    stack.push(x.drop_front(k));
                }
                Op::EvalAux => {
                    let mut apos = 0usize;
                    let q = codec::dec_len_prefixed(aux, &mut apos)
                        .map_err(|_| Stop::Invalid(InvalidReason::MalformedAux))?;
                    let mut z = Bits::with_capacity(aux.len() - apos);
                    for i in apos..aux.len() {
                        z.push(aux.at(i));
                    }
                    let out = self.exec(&q, &z, depth + 1)?;
                    stack.push(out);
                }
                Op::Loop => {
                    self.steps = self.fuel;
                    return Err(Stop::OutOfFuel);
                }
                Op::Derand => {
                    let r = codec::dec_derand_params(program, &mut pos);
                    if outer {
                        self.consumed = pos.max(self.consumed);
                    }
                    let params = r.map_err(|e| self.map_codec(e, outer))?;
                    let index = self.read_nat(program, &mut pos, outer)?;
                    let y = derand_lookup(&params, aux, &index)?;
                    self.check_len(y.len())?;
                    stack.push(y);
                }
            }
        }
    }
}

/// Recomputes the deterministic lists for a decoded parameter block and reads
/// one slot. Shared by the DERAND instruction; the library-level search in the
/// layer above goes through `derand_search` directly with the same constants,
/// so witnesses replay bit for bit.
fn derand_lookup(params: &DerandParams, aux: &Bits, index: &BigUint) -> Result<Bits, Stop> {
    let bad = Stop::Invalid(InvalidReason::DerandParams);
    let list_len = params.list_len().ok_or(bad)?;
    let supports = codec::decode_support_graphs(&params.measure)
        .map_err(|_| Stop::Invalid(InvalidReason::DerandParams))?;
    for (h, _) in &supports {
        if !h.is_subgraph_of(&params.graph) {
            return Err(Stop::Invalid(InvalidReason::DerandParams));
        }
    }
    let threshold = e_pow_lo(-((params.c as i64) * (params.d as i64)));
    let found = derand_search(
        &params.graph,
        params.k,
        list_len,
        &supports,
        &threshold,
        DERAND_SLOT_LIMIT,
        DERAND_CANDIDATE_BUDGET,
    )
    .map_err(|e| match e {
        DerandError::SearchExhausted { .. } => Stop::Invalid(InvalidReason::DerandExhausted),
        _ => Stop::Invalid(InvalidReason::DerandParams),
    })?;
    let index = match index.to_usize() {
        Some(i) if i < list_len => i,
        _ => return Err(Stop::Invalid(InvalidReason::DerandMiss)),
    };
    found
        .lists
        .slot(aux, index)
        .cloned()
        .ok_or(Stop::Invalid(InvalidReason::DerandMiss))
}

/// Runs `program` on the auxiliary tape `aux` with the given fuel.
pub fn run(program: &Bits, aux: &Bits, fuel: u64) -> RunOutcome {
    let mut m = Machine { fuel, steps: 0, consumed: 0 };
    match m.exec(program, aux, 0) {
        Ok(output) => {
            RunOutcome::Halted { output, steps: m.steps, bits_consumed: m.consumed }
        }
        Err(Stop::NeedBit) => RunOutcome::Invalid {
            reason: InvalidReason::NeedsInput,
            steps: m.steps,
            bits_consumed: m.consumed,
        },
        Err(Stop::OutOfFuel) => {
            RunOutcome::OutOfFuel { steps: m.steps, bits_consumed: m.consumed }
        }
        Err(Stop::Invalid(reason)) => {
            RunOutcome::Invalid { reason, steps: m.steps, bits_consumed: m.consumed }
        }
    }
}

/// Like `run`, but reports "the program ended mid-instruction" separately so
/// the enumerator knows which prefixes to extend.
pub fn run_classify(program: &Bits, aux: &Bits, fuel: u64) -> Classified {
    let mut m = Machine { fuel, steps: 0, consumed: 0 };
    match m.exec(program, aux, 0) {
        Ok(output) => Classified::Done(RunOutcome::Halted {
            output,
            steps: m.steps,
            bits_consumed: m.consumed,
        }),
        Err(Stop::NeedBit) => Classified::NeedsBit,
        Err(Stop::OutOfFuel) => Classified::Done(RunOutcome::OutOfFuel {
            steps: m.steps,
            bits_consumed: m.consumed,
        }),
        Err(Stop::Invalid(reason)) => Classified::Done(RunOutcome::Invalid {
            reason,
            steps: m.steps,
            bits_consumed: m.consumed,
        }),
    }
}

// ---------------------------------------------------------------------------
// Program builders
// ---------------------------------------------------------------------------

fn op_bits(code: &str) -> Bits {
    code.parse().expect("opcode literals are valid")
}

pub fn op_lit() -> Bits {
    op_bits("0")
}
pub fn op_aux() -> Bits {
    op_bits("100")
}
pub fn op_halt() -> Bits {
    op_bits("101")
}
pub fn op_cat() -> Bits {
    op_bits("1100")
}
pub fn op_rep() -> Bits {
    op_bits("1101")
}
pub fn op_eval() -> Bits {
    op_bits("11100")
}
pub fn op_iter() -> Bits {
    op_bits("11101")
}
pub fn op_not() -> Bits {
    op_bits("111100")
}
pub fn op_take() -> Bits {
    op_bits("111101")
}
pub fn op_drop() -> Bits {
    op_bits("111110")
}
pub fn op_evalaux() -> Bits {
    op_bits("1111110")
}
pub fn op_loop() -> Bits {
    op_bits("11111110")
}
pub fn op_derand() -> Bits {
    op_bits("111111110")
}

/// Instruction builder: LIT with its immediate.
pub fn instr_lit(x: &Bits) -> Bits {
    let mut p = op_lit();
    codec::enc_len_prefixed(&mut p, x);
    p
}

/// Instruction builder: a number-carrying opcode with its immediate.
pub fn instr_with_nat(op: Bits, n: u64) -> Bits {
    let mut p = op;
    codec::enc_nat(&mut p, n);
    p
}

/// The literal program: push x, halt. Its length is
/// |x| + 2*floor(log2(|x|+1)) + 5, which is bounded by
/// |x| + 2*ceil(log2(|x|+2)) + C_LIT.
pub fn lit_program(x: &Bits) -> Bits {
    let mut p = instr_lit(x);
    p.extend(&op_halt());
    p
}

/// Additive constant in the literal-program length bound.
pub const C_LIT: usize = 5;

/// The copy program: push the auxiliary tape, halt. Six bits.
pub fn copy_program() -> Bits {
    let mut p = op_aux();
    p.extend(&op_halt());
    p
}

/// The constant-size evaluation facility: a fixed 10-bit program that parses
/// its auxiliary tape as a framed program followed by that program's own
/// auxiliary input, and runs it.
pub fn eval_aux_program() -> Bits {
    let mut p = op_evalaux();
    p.extend(&op_halt());
    p
}

/// Replayable witness: DERAND with the given parameter block and list index,
/// then HALT. Run it with the source vertex on the auxiliary tape.
pub fn witness_program(params: &DerandParams, index: u64) -> Bits {
    let mut p = op_derand();
    codec::enc_derand_params(&mut p, params);
    codec::enc_nat(&mut p, index);
    p.extend(&op_halt());
    p
}

/// Bits of a witness program that are not the list index: opcode, parameter
/// block, and HALT.
pub fn witness_decoder_cost(params: &DerandParams) -> usize {
    let mut block = Bits::new();
    codec::enc_derand_params(&mut block, params);
    op_derand().len() + block.len() + op_halt().len()
}
