//! Criterion benchmarks for the set library live in `benches/`; this
//! crate has no library code of its own. Quick one-off measurements
//! are also available through `hset bench`, which shares operand
//! construction with these benchmarks.
