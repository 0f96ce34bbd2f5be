//! Exact arithmetic helpers.
//!
//! Every inequality this crate asserts is decided over the rationals; no
//! floating point participates in any verdict. Comparisons against the
//! transcendental constant e go through a fixed rational bracket
//! `E_LO < e < E_HI`, built from a Taylor partial sum and its tail bound:
//! with S_n = sum_{k<=n} 1/k!, the remainder satisfies
//! 0 < e - S_n < 1/(n!·n), so S_n and S_n + 1/(n!·n) bracket e exactly.
//! Callers pick the bracket side that makes their assertion conservative.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_u(n: BigUint, d: BigUint) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// 2^-k as an exact rational.
pub fn pow2_neg(k: usize) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(BigUint::one() << k))
}

/// 2^k as an exact rational.
pub fn pow2(k: usize) -> Rat {
    Rat::from_integer(BigInt::from(BigUint::one() << k))
}

/// 2^i for a signed exponent.
pub fn pow2_signed(i: i64) -> Rat {
    if i >= 0 {
        pow2(i as usize)
    } else {
        pow2_neg(i.unsigned_abs() as usize)
    }
}

/// Integer power of a rational, exponent may be negative.
pub fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp == 0 {
        return Rat::one();
    }
    let mag = base.pow(i32::try_from(exp.unsigned_abs()).expect("exponent fits i32"));
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

const E_TERMS: u32 = 15;

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Rational lower bound on e: the Taylor partial sum S_15.
pub fn e_lo() -> Rat {
    let mut s = Rat::zero();
    for k in 0..=E_TERMS {
        s += Rat::new(BigInt::one(), BigInt::from(factorial(k)));
    }
    s
}

/// Rational upper bound on e: S_15 + 1/(15!·15).
pub fn e_hi() -> Rat {
    e_lo()
        + Rat::new(
            BigInt::one(),
            BigInt::from(factorial(E_TERMS) * BigUint::from(E_TERMS)),
        )
}

/// Rational lower bound on e^n (n may be negative).
pub fn e_pow_lo(n: i64) -> Rat {
    // Underestimate: shrink the magnitude in the direction of the exponent.
    if n >= 0 {
        rat_pow(&e_lo(), n)
    } else {
        rat_pow(&e_hi(), n)
    }
}

/// Rational upper bound on e^n (n may be negative).
pub fn e_pow_hi(n: i64) -> Rat {
    if n >= 0 {
        rat_pow(&e_hi(), n)
    } else {
        rat_pow(&e_lo(), n)
    }
}

/// floor(log2 q) for a positive rational q.
pub fn floor_log2(q: &Rat) -> i64 {
    assert!(q.is_positive(), "floor_log2 of non-positive rational");
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // Candidate e satisfies 2^(e-1) < q < 2^(e+1); fix up by one comparison.
    let holds = |e: i64| -> bool {
        // 2^e <= n/d
        if e >= 0 {
            d.clone() << (e as usize) <= n.clone()
        } else {
            d.clone() <= n.clone() << ((-e) as usize)
        }
    };
    if !holds(e) {
        e -= 1;
    }
    debug_assert!(holds(e) && !holds(e + 1));
    e
}

/// ceil(log2 n) for a positive integer.
pub fn ceil_log2_uint(n: &BigUint) -> u64 {
    assert!(!n.is_zero());
    if n.is_one() {
        0
    } else {
        (n - 1u8).bits()
    }
}

/// ceil(log2 n) for usize, n >= 1.
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Exact binary expansion of q in [0,1): the first `n` bits after the point.
/// Terminating (dyadic) values use the all-zeros tail.
pub fn binary_expansion(q: &Rat, n: usize) -> Vec<bool> {
    assert!(!q.is_negative() && q < &Rat::one(), "expansion needs q in [0,1)");
    let mut bits = Vec::with_capacity(n);
    let mut x = q.clone();
    for _ in 0..n {
        x *= Rat::from_integer(BigInt::from(2));
        if x >= Rat::one() {
            bits.push(true);
            x -= Rat::one();
        } else {
            bits.push(false);
        }
    }
    bits
}

/// Render a rational as "num/den" (reduced).
#[cfg(feature = "std")]
pub fn display(q: &Rat) -> alloc::string::String {
    use alloc::format;
    format!("{}/{}", q.numer(), q.denom())
}

/// f64 view for reports only; never used in a verdict.
pub fn approx_f64(q: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
