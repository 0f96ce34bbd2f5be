//! Directed labeled graphs over bit strings, indexed neighbour lists, and the
//! deterministic search that replaces a random choice of lists by the first
//! candidate whose miss-test expectation is small enough.
//!
//! Everything here is exact: expectations are rational numbers and the
//! acceptance threshold is a rational lower bracket of e^{-cd}, so an accepted
//! candidate provably satisfies the real-number inequality.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::Zero;

use crate::bits::Bits;
use crate::exact::{pow2_neg, Rat};
use crate::measure::ElementaryMeasure;

/// A directed graph whose vertices are bit strings. Vertices are kept sorted
/// in canonical order; edges are ordered pairs over the vertex set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct LabeledGraph {
    vertices: Vec<Bits>,
    edges: BTreeSet<(Bits, Bits)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    DuplicateVertex(Bits),
    EdgeEndpointMissing(Bits),
}

impl LabeledGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = Bits>,
        edges: impl IntoIterator<Item = (Bits, Bits)>,
    ) -> Result<Self, GraphError> {
        let mut vs: Vec<Bits> = vertices.into_iter().collect();
        vs.sort();
        for w in vs.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0].clone()));
            }
        }
        let mut es = BTreeSet::new();
        for (a, b) in edges {
            if vs.binary_search(&a).is_err() {
                return Err(GraphError::EdgeEndpointMissing(a));
            }
            if vs.binary_search(&b).is_err() {
                return Err(GraphError::EdgeEndpointMissing(b));
            }
            es.insert((a, b));
        }
        Ok(LabeledGraph { vertices: vs, edges: es })
    }

    /// Complete directed graph (all ordered pairs of distinct vertices) on
    /// the given vertex set.
    pub fn complete(vertices: impl IntoIterator<Item = Bits>) -> Result<Self, GraphError> {
        let vs: Vec<Bits> = vertices.into_iter().collect();
        let mut es = Vec::new();
        for a in &vs {
            for b in &vs {
                if a != b {
                    es.push((a.clone(), b.clone()));
                }
            }
        }
        LabeledGraph::new(vs, es)
    }

    pub fn vertices(&self) -> &[Bits] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = &(Bits, Bits)> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_vertex(&self, v: &Bits) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    pub fn has_edge(&self, a: &Bits, b: &Bits) -> bool {
        self.edges.contains(&(a.clone(), b.clone()))
    }

    /// Out-neighbours of `v` in canonical order.
    pub fn out_neighbors(&self, v: &Bits) -> Vec<Bits> {
        self.edges
            .range((v.clone(), Bits::new())..)
            .take_while(|(a, _)| a == v)
            .map(|(_, b)| b.clone())
            .collect()
    }

    pub fn max_out_degree(&self) -> usize {
        self.vertices
            .iter()
            .map(|v| self.out_neighbors(v).len())
            .max()
            .unwrap_or(0)
    }

    /// True when `self` is a subgraph of `g`: every vertex and every edge of
    /// `self` also appears in `g`.
    pub fn is_subgraph_of(&self, g: &LabeledGraph) -> bool {
        self.vertices.iter().all(|v| g.has_vertex(v))
            && self.edges.iter().all(|e| g.edges.contains(e))
    }

    /// True when every ordered pair of distinct vertices of `self` is an
    /// edge of `g` (self-pairs carry no information and are not required).
    pub fn is_complete_in(&self, g: &LabeledGraph) -> bool {
        for a in &self.vertices {
            for b in &self.vertices {
                if a != b && !g.edges.contains(&(a.clone(), b.clone())) {
                    return false;
                }
            }
        }
        true
    }
}

/// Per-vertex lists of fixed length whose slots hold either a neighbour of the
/// vertex or nothing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexedLists {
    pub list_len: usize,
    pub lists: BTreeMap<Bits, Vec<Option<Bits>>>,
}

impl IndexedLists {
    pub fn slot(&self, x: &Bits, i: usize) -> Option<&Bits> {
        self.lists.get(x).and_then(|l| l.get(i)).and_then(|s| s.as_ref())
    }

    pub fn list_contains(&self, x: &Bits, y: &Bits) -> bool {
        self.lists
            .get(x)
            .map(|l| l.iter().any(|s| s.as_ref() == Some(y)))
            .unwrap_or(false)
    }
}

/// The miss indicator: 1 exactly when `h` is a complete subgraph of `g` with
/// more than 2^k vertices and no edge of `h` is caught by the lists (for every
/// edge (x, y) of `h`, y is absent from the list at x).
pub fn miss_indicator(lists: &IndexedLists, h: &LabeledGraph, g: &LabeledGraph, k: u32) -> bool {
    if !h.is_subgraph_of(g) || !h.is_complete_in(g) {
        return false;
    }
    let threshold = 1usize.checked_shl(k).unwrap_or(usize::MAX);
    if h.vertex_count() <= threshold {
        return false;
    }
    for (x, y) in h.edges() {
        if lists.list_contains(x, y) {
            return false;
        }
    }
    true
}

/// Parameter block consumed by the derandomized search (and embedded verbatim
/// in replayable witness programs).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerandParams {
    pub graph: LabeledGraph,
    pub k: u32,
    pub l: u32,
    pub c: u32,
    pub d: u32,
    pub measure: ElementaryMeasure,
}

impl DerandParams {
    /// List length c·d·2^{l-2k}, defined only when l >= 2k so the length is an
    /// integer.
    pub fn list_len(&self) -> Option<usize> {
        let shift = self.l.checked_sub(2 * self.k)?;
        if shift >= usize::BITS {
            return None;
        }
        (self.c as usize)
            .checked_mul(self.d as usize)?
            .checked_mul(1usize << shift)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerandError {
    ListLenUndefined,
    TooManySlots { slots: usize, max: usize },
    TooManySupports { count: usize },
    SupportNotSubgraph(Bits),
    SupportUndecodable(Bits),
    SearchExhausted { scanned: usize },
}

#[derive(Debug, Clone)]
pub struct DerandFound {
    pub lists: IndexedLists,
    pub expectation: Rat,
    pub candidates_scanned: usize,
}

/// Runs the deterministic candidate scan. `supports` pairs each decoded
/// support graph with its mass under the parameter measure; decoding from the
/// measure's string support happens in the codec layer above.
///
/// Candidates are all assignments of each list slot to one of: no entry, or an
/// out-neighbour of the slot's vertex (in canonical order). They are scanned
/// as a mixed-radix counter in which the first slot of the canonically first
/// vertex is the fastest-moving digit. The first candidate whose expected miss
/// indicator is strictly below `threshold` wins.
pub fn derand_search(
    graph: &LabeledGraph,
    k: u32,
    list_len: usize,
    supports: &[(LabeledGraph, Rat)],
    threshold: &Rat,
    max_slots: usize,
    candidate_budget: usize,
) -> Result<DerandFound, DerandError> {
    let verts = graph.vertices();
    let slots_total = verts.len().checked_mul(list_len).ok_or(DerandError::ListLenUndefined)?;
    if slots_total > max_slots {
        return Err(DerandError::TooManySlots { slots: slots_total, max: max_slots });
    }

    // Per-vertex symbol alphabets: symbol 0 is "no entry", symbol s >= 1 is
    // the s-th out-neighbour in canonical order.
    let nbrs: Vec<Vec<Bits>> = verts.iter().map(|v| graph.out_neighbors(v)).collect();

    // For each slot vertex and symbol, the set of supports (as a bitmask)
    // whose edge set contains (vertex, symbol) -- i.e. placing that symbol in
    // any slot of that vertex spoils those supports' miss indicators.
    if supports.len() > 64 {
        return Err(DerandError::TooManySupports { count: supports.len() });
    }
    let mut sym_hits: Vec<Vec<u64>> = Vec::with_capacity(verts.len());
    for (vi, v) in verts.iter().enumerate() {
        let mut per_sym = Vec::with_capacity(nbrs[vi].len() + 1);
        per_sym.push(0u64); // the empty slot hits nothing
        for y in &nbrs[vi] {
            let mut mask = 0u64;
            for (hi, (h, _)) in supports.iter().enumerate() {
                if h.edges.contains(&(v.clone(), y.clone())) {
                    mask |= 1 << hi;
                }
            }
            per_sym.push(mask);
        }
        sym_hits.push(per_sym);
    }

    // Supports that can ever be missed: complete in g with more than 2^k
    // vertices. Others contribute 0 regardless of the lists.
    let threshold_count = 1usize.checked_shl(k).unwrap_or(usize::MAX);
    let alive: Vec<bool> = supports
        .iter()
        .map(|(h, _)| {
            h.is_subgraph_of(graph) && h.is_complete_in(graph) && h.vertex_count() > threshold_count
        })
        .collect();

    // Incremental state: per-support count of slots currently hitting one of
    // its edges, and the expectation over alive supports with zero hits.
    let mut hit_count: Vec<u32> = alloc::vec![0; supports.len()];
    let mut expectation = Rat::zero();
    for (hi, (_, mass)) in supports.iter().enumerate() {
        if alive[hi] {
            expectation += mass;
        }
    }

    let mut digits: Vec<u32> = alloc::vec![0; slots_total];
    let vertex_of_slot = |slot: usize| slot / list_len;

    let mut scanned = 0usize;
    loop {
        scanned += 1;
        if expectation < *threshold {
            let mut lists = BTreeMap::new();
            for (vi, v) in verts.iter().enumerate() {
                let mut l = Vec::with_capacity(list_len);
                for j in 0..list_len {
                    let d = digits[vi * list_len + j] as usize;
                    l.push(if d == 0 { None } else { Some(nbrs[vi][d - 1].clone()) });
                }
                lists.insert(v.clone(), l);
            }
            return Ok(DerandFound {
                lists: IndexedLists { list_len, lists },
                expectation,
                candidates_scanned: scanned,
            });
        }
        if scanned >= candidate_budget {
            return Err(DerandError::SearchExhausted { scanned });
        }

        // Advance the counter by one, keeping the expectation in sync with
        // every digit that changes.
        let mut pos = 0usize;
        loop {
            if pos == slots_total {
                // Wrapped all the way around: candidate space exhausted.
                return Err(DerandError::SearchExhausted { scanned });
            }
            let vi = vertex_of_slot(pos);
            let old = digits[pos] as usize;
            let radix = nbrs[vi].len() + 1;
            let new = (old + 1) % radix;
            digits[pos] = new as u32;

            let removed = sym_hits[vi][old];
            let added = sym_hits[vi][new];
            let mut changed = removed | added;
            while changed != 0 {
                let hi = changed.trailing_zeros() as usize;
                changed &= changed - 1;
                let was_zero = hit_count[hi] == 0;
                if removed >> hi & 1 == 1 {
                    hit_count[hi] -= 1;
                }
                if added >> hi & 1 == 1 {
                    hit_count[hi] += 1;
                }
                if alive[hi] {
                    let now_zero = hit_count[hi] == 0;
                    if was_zero && !now_zero {
                        expectation -= &supports[hi].1;
                    } else if !was_zero && now_zero {
                        expectation += &supports[hi].1;
                    }
                }
            }

            if new != 0 {
                break;
            }
            pos += 1; // carry
        }
    }
}

/// Exact probability that uniformly random lists of length `list_len` (each
/// slot independently a uniform l-bit draw, mapped to the slot vertex's
/// neighbour of that index when the draw is small enough and to "no entry"
/// otherwise) miss every edge of the complete subgraph `j` of `g`.
pub fn miss_probability_exact(
    j: &LabeledGraph,
    g: &LabeledGraph,
    l: u32,
    list_len: usize,
) -> Rat {
    let mut prob = Rat::from_integer(1.into());
    let cell = pow2_neg(l as usize);
    for x in j.vertices() {
        // m_x = number of j-vertices among x's out-neighbours in g that are
        // edge targets of x within j.
        let mut m_x = 0usize;
        for y in j.vertices() {
            if j.has_edge(x, y) && g.has_edge(x, y) {
                m_x += 1;
            }
        }
        let per_slot = Rat::from_integer(1.into()) - Rat::from_integer((m_x as i64).into()) * &cell;
        let mut slot_pow = Rat::from_integer(1.into());
        for _ in 0..list_len {
            slot_pow *= &per_slot;
        }
        prob *= slot_pow;
    }
    prob
}
