//! Front end for the set library: an expression language over set and
//! multiset literals, scaling benchmarks, and the random-graph
//! simulation driver. The `hset` binary wires these to subcommands.

pub mod bench;
pub mod eval;
pub mod mcmc_cmd;
pub mod parser;
