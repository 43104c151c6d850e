//! Criterion benchmarks for the spectral kernels. The benches live in
//! `benches/`; this library is empty.
