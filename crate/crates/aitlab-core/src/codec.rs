//! Self-delimiting binary codes for the data the laboratory passes around:
//! numbers, strings, sets, rationals, measures, graphs, and search parameter
//! blocks.
//!
//! Two string framings are used throughout:
//!
//! * the unary frame `1^|x| 0 x`, e.g. "01" -> "11001" and the empty string
//!   -> "0"; cheap to reason about, linear overhead;
//! * the logarithmic frame `nat(|x|) ++ x` used for machine literals, where
//!   `nat(n)` is the unary frame applied to the n-th string of the canonical
//!   (length-then-lex) bijection, costing 2*floor(log2(n+1)) + 1 bits.
//!
//! Every decoder is the exact inverse of its encoder and rejects non-canonical
//! input, so encoded artifacts are unique and byte-stable.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::bits::Bits;
use crate::exact::Rat;
use crate::graph::{DerandParams, LabeledGraph};
use crate::measure::ElementaryMeasure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodecError {
    /// A read ran past the end of the input; `at` is the index of the first
    /// missing bit.
    OutOfBits { at: usize },
    Malformed(&'static str),
}

pub type CodecResult<T> = Result<T, CodecError>;

pub fn read_bit(bits: &Bits, pos: &mut usize) -> CodecResult<bool> {
    match bits.get(*pos) {
        Some(b) => {
            *pos += 1;
            Ok(b)
        }
        None => Err(CodecError::OutOfBits { at: *pos }),
    }
}

// ---------------------------------------------------------------------------
// String framings and numbers
// ---------------------------------------------------------------------------

/// Unary frame: `1^|x| 0 x`.
pub fn enc_string(out: &mut Bits, x: &Bits) {
    for _ in 0..x.len() {
        out.push(true);
    }
    out.push(false);
    out.extend(x);
}

pub fn dec_string(bits: &Bits, pos: &mut usize) -> CodecResult<Bits> {
    let mut n = 0usize;
    while read_bit(bits, pos)? {
        n += 1;
        if n > bits.len() {
            return Err(CodecError::Malformed("unary length frame overruns input"));
        }
    }
    let mut x = Bits::with_capacity(n);
    for _ in 0..n {
        x.push(read_bit(bits, pos)?);
    }
    Ok(x)
}

/// Number code: the unary frame applied to the canonical-bijection image of
/// n, i.e. `1^|b| 0 b` with `b` the n-th binary string in length-then-lex
/// order. Total length 2*floor(log2(n+1)) + 1.
pub fn enc_nat_big(out: &mut Bits, n: &BigUint) {
    enc_string(out, &Bits::from_rank(n));
}

pub fn enc_nat(out: &mut Bits, n: u64) {
    enc_nat_big(out, &BigUint::from(n));
}

pub fn dec_nat_big(bits: &Bits, pos: &mut usize) -> CodecResult<BigUint> {
    Ok(dec_string(bits, pos)?.rank())
}

pub fn dec_nat(bits: &Bits, pos: &mut usize) -> CodecResult<u64> {
    dec_nat_big(bits, pos)?
        .to_u64()
        .ok_or(CodecError::Malformed("number exceeds 64 bits"))
}

/// Logarithmic frame for machine literals: `nat(|x|) ++ x`.
pub fn enc_len_prefixed(out: &mut Bits, x: &Bits) {
    enc_nat(out, x.len() as u64);
    out.extend(x);
}

pub fn dec_len_prefixed(bits: &Bits, pos: &mut usize) -> CodecResult<Bits> {
    let n = dec_nat(bits, pos)?;
    let n = usize::try_from(n).map_err(|_| CodecError::Malformed("length exceeds usize"))?;
    let mut x = Bits::with_capacity(n);
    for _ in 0..n {
        x.push(read_bit(bits, pos)?);
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Sequences in set framing
// ---------------------------------------------------------------------------

/// `nat(m)` followed by the m members, each in the unary frame. Callers that
/// encode sets pass the members in strictly increasing canonical order; the
/// matching decoders enforce whatever order their type requires.
pub fn enc_seq(out: &mut Bits, members: &[Bits]) {
    enc_nat(out, members.len() as u64);
    for m in members {
        enc_string(out, m);
    }
}

pub fn dec_seq(bits: &Bits, pos: &mut usize) -> CodecResult<Vec<Bits>> {
    let m = dec_nat(bits, pos)?;
    let m = usize::try_from(m).map_err(|_| CodecError::Malformed("set size exceeds usize"))?;
    if m > bits.len() {
        // Each member costs at least one frame bit, so this cannot decode.
        return Err(CodecError::Malformed("set size overruns input"));
    }
    let mut members = Vec::with_capacity(m);
    for _ in 0..m {
        members.push(dec_string(bits, pos)?);
    }
    Ok(members)
}

/// A set: a sequence whose members are strictly increasing in canonical order.
pub fn enc_set(out: &mut Bits, members: &[Bits]) {
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]), "set members must be sorted");
    enc_seq(out, members);
}

pub fn dec_set(bits: &Bits, pos: &mut usize) -> CodecResult<Vec<Bits>> {
    let members = dec_seq(bits, pos)?;
    if !members.windows(2).all(|w| w[0] < w[1]) {
        return Err(CodecError::Malformed("set members not in canonical order"));
    }
    Ok(members)
}

// ---------------------------------------------------------------------------
// Pairs
// ---------------------------------------------------------------------------

pub fn enc_pair(out: &mut Bits, a: &Bits, b: &Bits) {
    enc_string(out, a);
    enc_string(out, b);
}

pub fn dec_pair(bits: &Bits, pos: &mut usize) -> CodecResult<(Bits, Bits)> {
    let a = dec_string(bits, pos)?;
    let b = dec_string(bits, pos)?;
    Ok((a, b))
}

pub fn pair_to_bits(a: &Bits, b: &Bits) -> Bits {
    let mut out = Bits::new();
    enc_pair(&mut out, a, b);
    out
}

// ---------------------------------------------------------------------------
// Rationals (as standalone strings, for embedding in sequences)
// ---------------------------------------------------------------------------

/// A positive rational a/b in lowest terms with 0 < a/b <= 1 becomes the
/// unary-framed bijection image of a followed by the bare bijection image of
/// b (the remainder of the string determines b, so no second frame is
/// needed).
pub fn rat_to_bits(q: &Rat) -> Bits {
    let a = q.numer().to_biguint().expect("measure masses are positive");
    let b = q.denom().to_biguint().expect("denominators are positive");
    let mut out = Bits::new();
    enc_string(&mut out, &Bits::from_rank(&a));
    out.extend(&Bits::from_rank(&b));
    out
}

pub fn rat_from_bits(s: &Bits) -> CodecResult<Rat> {
    let mut pos = 0usize;
    let a_bits = dec_string(s, &mut pos)?;
    let mut b_bits = Bits::with_capacity(s.len() - pos);
    for i in pos..s.len() {
        b_bits.push(s.at(i));
    }
    let a = a_bits.rank();
    let b = b_bits.rank();
    if b.is_zero() || a.is_zero() {
        return Err(CodecError::Malformed("rational parts must be positive"));
    }
    if a > b {
        return Err(CodecError::Malformed("mass exceeds 1"));
    }
    let q = Rat::new(a.into(), b.into());
    // BigRational::new reduces; a non-reduced encoding is non-canonical.
    if rat_to_bits(&q) != *s {
        return Err(CodecError::Malformed("rational not in lowest terms"));
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

/// Atoms in canonical order of their support string, interleaved as
/// x1, mass1, x2, mass2, ... inside one sequence frame.
pub fn enc_measure(out: &mut Bits, p: &ElementaryMeasure) {
    let mut members = Vec::with_capacity(2 * p.len());
    for (x, q) in p.support() {
        members.push(x.clone());
        members.push(rat_to_bits(q));
    }
    enc_seq(out, &members);
}

pub fn measure_to_bits(p: &ElementaryMeasure) -> Bits {
    let mut out = Bits::new();
    enc_measure(&mut out, p);
    out
}

pub fn dec_measure(bits: &Bits, pos: &mut usize) -> CodecResult<ElementaryMeasure> {
    let members = dec_seq(bits, pos)?;
    if members.len() % 2 != 0 {
        return Err(CodecError::Malformed("measure needs an even member count"));
    }
    let mut pairs = Vec::with_capacity(members.len() / 2);
    let mut last: Option<&Bits> = None;
    for chunk in members.chunks(2) {
        let x = &chunk[0];
        if let Some(prev) = last {
            if prev >= x {
                return Err(CodecError::Malformed("measure atoms not in canonical order"));
            }
        }
        last = Some(x);
        pairs.push((x.clone(), rat_from_bits(&chunk[1])?));
    }
    ElementaryMeasure::new(pairs).map_err(|_| CodecError::Malformed("mass data not a measure"))
}

pub fn measure_from_bits(s: &Bits) -> CodecResult<ElementaryMeasure> {
    let mut pos = 0usize;
    let p = dec_measure(s, &mut pos)?;
    if pos != s.len() {
        return Err(CodecError::Malformed("trailing bits after measure"));
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

/// Vertex set followed by the edge set; each edge is the pair encoding of its
/// endpoints, and both lists ride in set framing in canonical order.
pub fn enc_graph(out: &mut Bits, g: &LabeledGraph) {
    enc_set(out, g.vertices());
    let edge_strings: Vec<Bits> = g.edges().map(|(a, b)| pair_to_bits(a, b)).collect();
    // Edge pairs are stored sorted by (source, target); their pair encodings
    // are emitted in that order rather than re-sorted as raw strings, so the
    // decoder checks the same order.
    enc_seq(out, &edge_strings);
}

pub fn graph_to_bits(g: &LabeledGraph) -> Bits {
    let mut out = Bits::new();
    enc_graph(&mut out, g);
    out
}

pub fn dec_graph(bits: &Bits, pos: &mut usize) -> CodecResult<LabeledGraph> {
    let vertices = dec_set(bits, pos)?;
    let edge_strings = dec_seq(bits, pos)?;
    let mut edges = Vec::with_capacity(edge_strings.len());
    for es in &edge_strings {
        let mut epos = 0usize;
        let (a, b) = dec_pair(es, &mut epos)?;
        if epos != es.len() {
            return Err(CodecError::Malformed("trailing bits inside edge pair"));
        }
        edges.push((a, b));
    }
    if !edges.windows(2).all(|w| w[0] < w[1]) {
        return Err(CodecError::Malformed("edges not in canonical order"));
    }
    LabeledGraph::new(vertices, edges).map_err(|_| CodecError::Malformed("edge endpoints missing"))
}

pub fn graph_from_bits(s: &Bits) -> CodecResult<LabeledGraph> {
    let mut pos = 0usize;
    let g = dec_graph(s, &mut pos)?;
    if pos != s.len() {
        return Err(CodecError::Malformed("trailing bits after graph"));
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Derandomization parameter blocks
// ---------------------------------------------------------------------------

pub fn enc_derand_params(out: &mut Bits, p: &DerandParams) {
    enc_graph(out, &p.graph);
    enc_nat(out, p.k as u64);
    enc_nat(out, p.l as u64);
    enc_nat(out, p.c as u64);
    enc_nat(out, p.d as u64);
    enc_measure(out, &p.measure);
}

pub fn dec_derand_params(bits: &Bits, pos: &mut usize) -> CodecResult<DerandParams> {
    let graph = dec_graph(bits, pos)?;
    let k = dec_small(bits, pos)?;
    let l = dec_small(bits, pos)?;
    let c = dec_small(bits, pos)?;
    let d = dec_small(bits, pos)?;
    let measure = dec_measure(bits, pos)?;
    Ok(DerandParams { graph, k, l, c, d, measure })
}

fn dec_small(bits: &Bits, pos: &mut usize) -> CodecResult<u32> {
    u32::try_from(dec_nat(bits, pos)?).map_err(|_| CodecError::Malformed("parameter exceeds u32"))
}

/// Decodes every support string of `p` as a graph, pairing it with its mass.
pub fn decode_support_graphs(
    p: &ElementaryMeasure,
) -> Result<Vec<(LabeledGraph, Rat)>, CodecError> {
    p.support()
        .map(|(s, q)| graph_from_bits(s).map(|g| (g, q.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::exact::rat;

    fn string_to_bits_roundtrip(x: &Bits) -> Bits {
        let mut out = Bits::new();
        enc_string(&mut out, x);
        out
    }

    #[test]
    fn unary_frame_examples() {
        assert_eq!(string_to_bits_roundtrip(&bits("01")), bits("11001"));
        assert_eq!(string_to_bits_roundtrip(&bits("")), bits("0"));
        let mut pos = 0;
        assert_eq!(dec_string(&bits("11001"), &mut pos).unwrap(), bits("01"));
        assert_eq!(pos, 5);
    }

    #[test]
    fn nat_code_lengths_and_roundtrip() {
        for n in 0u64..200 {
            let mut out = Bits::new();
            enc_nat(&mut out, n);
            let expected = 2 * (64 - (n + 1).leading_zeros() as u64 - 1) + 1;
            assert_eq!(out.len() as u64, expected, "length of nat({n})");
            let mut pos = 0;
            assert_eq!(dec_nat(&out, &mut pos).unwrap(), n);
            assert_eq!(pos, out.len());
        }
    }

    #[test]
    fn out_of_bits_reports_first_missing_index() {
        let mut pos = 0;
        match dec_string(&bits("11"), &mut pos) {
            Err(CodecError::OutOfBits { at }) => assert_eq!(at, 2),
            other => panic!("expected OutOfBits, got {other:?}"),
        }
    }

    #[test]
    fn set_roundtrip_and_canonicity() {
        let members = [bits(""), bits("1"), bits("00")];
        let mut out = Bits::new();
        enc_set(&mut out, &members);
        let mut pos = 0;
        assert_eq!(dec_set(&out, &mut pos).unwrap(), members.to_vec());
        assert_eq!(pos, out.len());

        // Swapped members decode as a sequence but are rejected as a set.
        let mut bad = Bits::new();
        enc_seq(&mut bad, &[bits("1"), bits("")]);
        let mut pos = 0;
        assert!(matches!(dec_set(&bad, &mut pos), Err(CodecError::Malformed(_))));
    }

    #[test]
    fn rational_roundtrip_rejects_non_reduced() {
        for (a, b) in [(1i64, 1i64), (1, 2), (1, 3), (2, 3), (7, 8), (5, 7)] {
            let q = rat(a, b);
            let s = rat_to_bits(&q);
            assert_eq!(rat_from_bits(&s).unwrap(), q);
        }
        // Hand-build 2/4: bij(2) = "1", bij(4) = "01".
        let mut bad = Bits::new();
        enc_string(&mut bad, &bits("1"));
        bad.extend(&bits("01"));
        assert!(matches!(rat_from_bits(&bad), Err(CodecError::Malformed(_))));
    }

    #[test]
    fn measure_roundtrip() {
        let p = ElementaryMeasure::new([
            (bits("0"), rat(1, 4)),
            (bits("11"), rat(1, 2)),
            (bits(""), rat(1, 8)),
        ])
        .unwrap();
        let s = measure_to_bits(&p);
        assert_eq!(measure_from_bits(&s).unwrap(), p);
    }

    #[test]
    fn graph_roundtrip() {
        let g = LabeledGraph::new(
            [bits("0"), bits("1"), bits("")],
            [(bits(""), bits("0")), (bits("0"), bits("1")), (bits("0"), bits(""))],
        )
        .unwrap();
        let s = graph_to_bits(&g);
        assert_eq!(graph_from_bits(&s).unwrap(), g);
    }

    #[test]
    fn params_roundtrip() {
        let g = LabeledGraph::complete([bits("0"), bits("1")]).unwrap();
        let p = ElementaryMeasure::point_mass(graph_to_bits(&g));
        let params =
            DerandParams { graph: g.clone(), k: 1, l: 4, c: 2, d: 3, measure: p };
        let mut out = Bits::new();
        enc_derand_params(&mut out, &params);
        let mut pos = 0;
        let back = dec_derand_params(&out, &mut pos).unwrap();
        assert_eq!(pos, out.len());
        assert_eq!(back, params);
        let supports = decode_support_graphs(&back.measure).unwrap();
        assert_eq!(supports.len(), 1);
        assert_eq!(supports[0].0, g);
    }
}
