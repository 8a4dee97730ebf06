//! Partitions into exactly `j` positive k-th powers and generalized taxicab
//! numbers.
//!
//! Taxicab(k, j, m) is the smallest positive integer that is a sum of exactly
//! `j` positive k-th powers in exactly `m` ways. This crate counts those
//! representations, searches for Taxicab values, certifies existence and
//! nonexistence for squares, classifies the end behavior of each `m` as `j`
//! grows, and renders existence grids.
//!
//! Counting is generic over the cell type ([`CountCell`]: `u8` through
//! `u128`); curve fitting is generic over [`num_traits::Float`]. The aliases
//! below name the combinations used in practice.

pub mod cachefile;
pub mod cell;
pub mod certificate;
pub mod classify;
pub mod error;
pub mod fit;
pub mod grid;
pub mod partition;
pub mod powers;
pub mod provenance;
pub mod series;
pub mod solver;
pub mod squares;
pub mod table;

pub use cell::{Count, CountCell, CountMode};
pub use certificate::{Check, Relation, SearchedColumn, TailCertificate, TailKind};
pub use classify::{Certification, ColumnClassification, MiSequence, Refusal, Verdict};
pub use error::{Error, Result};
pub use fit::{fit, FitFamily, FitResult};
pub use grid::{
    build_grid, extract_boundary, parse_pbm, Bitmap, BoundaryFunction, BoundaryPoint, CellStatus,
    ExistenceGrid, GridCell, UndeterminedRender,
};

pub use partition::{brute_force, count, Counter, PartitionQuery, RepresentationList};
pub use provenance::Provenance;
pub use series::series_counts;
pub use solver::{BoundPolicy, Solver, Status, TaxicabOutcome};
pub use squares::{
    five_square_tail_threshold, is_sum_of_j_squares, pigeonhole_lower_bound, search_bound_squares,
};
pub use table::{count_row, Budget, CountTable, SearchTable, TableCache};

/// Exact 64-bit counts.
pub type ExactTable = CountTable<u64>;
/// Saturating table for caps up to 255.
pub type NarrowTable = CountTable<u8>;
/// Saturating table for caps up to 65535.
pub type WideTable = CountTable<u16>;
/// Exact memoized counter.
pub type ExactCounter = Counter<u64>;


/// Double-precision fit.
pub type Fit = FitResult<f64>;
/// Single-precision fit.
pub type Fit32 = FitResult<f32>;
