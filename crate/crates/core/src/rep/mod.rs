//! Partitions, symmetric group characters, Kronecker coefficients, Weyl
//! dimensions, column groupings and zero patterns.

pub mod characters;
pub mod grouping;
pub mod partition;
pub mod permutation;

pub use characters::{kronecker, kronecker_with, weyl_dim, CharacterTable, Characters};
pub use grouping::{
    column_grouping, has_zero_pattern, random_pair_avoiding_zero_pattern, relocated_groupings, ColumnGrouping,
    DEFAULT_PAIR_BUDGET,
};
pub use partition::Partition;
pub use permutation::Permutation;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RepError {
    #[error("not a partition: {0:?}")]
    InvalidPartition(Vec<u32>),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("not a permutation in one-line notation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("permutation of length {got}, expected {expected}")]
    PermutationLength { expected: usize, got: usize },
    #[error("weights differ: {0:?}")]
    WeightMismatch(Vec<usize>),
    #[error("partition has {parts} parts but the space has dimension {n}")]
    TooManyParts { parts: usize, n: usize },
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("no pair without a zero pattern after {0} draws")]
    BudgetExhausted(usize),
}
