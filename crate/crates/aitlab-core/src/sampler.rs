//! Seeded, exactly-distributed sampling. Random bits come from a ChaCha
//! stream (seed and stream number fully determine every draw); measures are
//! sampled by lazy inverse-CDF refinement with exact rational comparisons, so
//! the sampled distribution is the measure itself, not a float approximation.

use num_bigint::BigUint;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bits::Bits;
use crate::exact::{pow2_neg, Rat};
use crate::measure::ElementaryMeasure;

use alloc::vec::Vec;
use num_traits::{One, Zero};

/// One generator per (seed, stream) pair; distinct streams are independent,
/// which gives each trial of an experiment its own reproducible tape.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Adapts a word RNG to single bits, most significant bit of each 64-bit word
/// first.
pub struct BitSource<R: RngCore> {
    rng: R,
    word: u64,
    left: u32,
}

impl<R: RngCore> BitSource<R> {
    pub fn new(rng: R) -> Self {
        BitSource { rng, word: 0, left: 0 }
    }

    pub fn bit(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        self.left -= 1;
        (self.word >> self.left) & 1 == 1
    }

    pub fn uniform_bits(&mut self, n: usize) -> Bits {
        let mut out = Bits::with_capacity(n);
        for _ in 0..n {
            out.push(self.bit());
        }
        out
    }
}

/// Hard cap on refinement draws; hitting it would mean the bit stream tracked
/// a CDF boundary's binary expansion for a thousand bits.
const MAX_REFINE: usize = 1024;

/// Samples an atom of `p` (None falls in the missing-mass tail when `p` is a
/// semimeasure). The drawn dyadic interval [v/2^t, (v+1)/2^t) is refined one
/// bit at a time until it fits inside one atom's CDF segment, so each atom is
/// hit with exactly its mass.
pub fn sample<R: RngCore>(p: &ElementaryMeasure, src: &mut BitSource<R>) -> Option<Bits> {
    // Segment boundaries: [c_0, c_1), [c_1, c_2), ..., then the tail up to 1.
    let mut bounds: Vec<(Rat, Option<&Bits>)> = Vec::with_capacity(p.len() + 1);
    let mut acc = Rat::zero();
    for (x, q) in p.support() {
        acc += q;
        bounds.push((acc.clone(), Some(x)));
    }
    if acc < Rat::one() {
        bounds.push((Rat::one(), None));
    }

    let mut v = BigUint::zero();
    let mut t = 0usize;
    for _ in 0..MAX_REFINE {
        let draw_lo = Rat::from_integer(v.clone().into()) * pow2_neg(t);
        let draw_hi = Rat::from_integer((&v + BigUint::one()).into()) * pow2_neg(t);
        let mut seg_lo = Rat::zero();
        for (seg_hi, atom) in &bounds {
            if draw_lo >= seg_lo && draw_hi <= *seg_hi {
                return atom.cloned();
            }
            seg_lo = seg_hi.clone();
        }
        v = (v << 1u8) + BigUint::from(src.bit() as u8);
        t += 1;
    }
    unreachable!("sampler failed to separate CDF boundaries after {MAX_REFINE} bits");
}
