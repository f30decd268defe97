//! Exact computation of higher-degree Davenport constants `D_m(A)` for
//! finite commutative rings `A = Z_{n1} x ... x Z_{nb}`.
//!
//! `D_m(A)` is the smallest `t` such that every sequence of `t` ring elements
//! contains a sub-multiset of size at least `m` whose degree-m elementary
//! symmetric function vanishes. The crate combines a certified exhaustive
//! search with the full family of theorem-backed lower/upper/exact bounds,
//! extremal witness constructions, and a Girard-Newton toolkit for expressing
//! elementary symmetric functions in power sums.

pub mod bounds;
pub mod cli;
pub mod ring;
pub mod search;
pub mod symfun;
