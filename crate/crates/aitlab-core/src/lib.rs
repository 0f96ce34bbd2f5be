//! Exact, reproducible desk-scale laboratory for algorithmic information
//! theory: a prefix-free stack machine, exhaustive halting-set enumeration
//! under resource caps, capped complexity and algorithmic-probability tables,
//! interval semantics for a left-total machine extension, randomness
//! deficiency and stochasticity scores, derandomized neighbour lists with
//! replayable witness programs, conservation-of-information checks, and a
//! birthday-collision experiment.
//!
//! Everything numerical is exact rational arithmetic; floating point appears
//! only in display helpers. The crate is `no_std` (with `alloc`); anything
//! involving files, threads, or a CLI lives in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algstats;
pub mod birthday;
pub mod bits;
pub mod bunchgraph;
pub mod codec;
pub mod complexity;
pub mod conservation;
pub mod enumeration;
pub mod exact;
pub mod graph;
pub mod lefttotal;
pub mod machine;
pub mod measure;
pub mod sampler;
