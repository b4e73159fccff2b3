use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("identity axiom violated at point {0}")]
    IdentityAxiomViolated(usize),
    #[error("associativity violated: {a}·({b}·{s}) != ({a}{b})·{s}")]
    AssociativityViolated { a: u64, b: u64, s: usize },
    #[error("malformed action table: {0}")]
    MalformedTable(String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("map is not equivariant: residue {a} at point {s}")]
    NotEquivariant { a: u64, s: usize },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("inconsistent presentation: {0}")]
    InconsistentPresentation(String),
    #[error("{u} is not a unit modulo {m}")]
    NotAUnit { u: u64, m: u64 },
    #[error("invalid subgroup: {0}")]
    SubgroupInvalid(String),
    #[error("lattice is not contained in the other")]
    NotContained,
    #[error("rank {rank} exceeds the enumeration limit {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("algebra is not étale: {0}")]
    NotEtale(String),
    #[error("solution set is not a lattice: constraint map has a kernel of dimension {0}")]
    NotDiscrete(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
