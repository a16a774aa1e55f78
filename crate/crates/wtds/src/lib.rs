//! Polynomial kernelization for Weighted Tree Deletion Set (wTDS).
//!
//! An instance is an undirected multigraph (edge multiplicities 1 or 2, no
//! self-loops) with positive integer vertex weights and a budget `k`. The
//! question: is there a vertex set of total weight at most `k` whose removal
//! leaves a tree (connected and acyclic)?
//!
//! [`kernel::kernelize`] shrinks any instance to an equivalent one with
//! O(k^4) vertices without changing `k`, via:
//!
//! 1. exhaustive weight-aware reduction rules ([`reductions`]),
//! 2. a 2-approximate feedback vertex set ([`fvs_approx`]),
//! 3. a flower/cycle-cover dichotomy per FVS vertex ([`flower`]),
//! 4. an LCA-closed scaffold that classifies the remaining tree components
//!    and contracts the uninteresting ones ([`decomposition`]),
//! 5. exact linear-algebraic pruning of the contracted vertices ([`lineq`]).
//!
//! Everything is deterministic: graphs iterate in sorted vertex order, the
//! only randomness lives in the seeded instance generators, and all
//! arithmetic is exact (integers and rationals, no floats).
//!
//! Brute-force reference solvers live in [`oracle`]; [`verify`] runs the
//! randomized cross-check campaign the `wtds verify` subcommand exposes.

pub mod cli;
pub mod decomposition;
pub mod flower;
pub mod fvs_approx;
pub mod generate;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod lineq;
pub mod matching;
pub mod oracle;
pub mod reductions;
pub mod verify;
