use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("relations contain a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("empty subset")]
    EmptySubset,
    #[error("subset is not an interval")]
    NotAnInterval,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("maps do not commute: {a}->{x}->{b} differs from {a}->{y}->{b}")]
    CommutativityViolation {
        a: String,
        x: String,
        y: String,
        b: String,
    },
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("poset is not connected")]
    NotConnected,
    #[error("modules or maps live over different posets")]
    PosetMismatch,
    #[error("modules live over different fields")]
    FieldMismatch,
    #[error("not an order-embedding: {0}")]
    NotAnEmbedding(String),
    #[error("unknown catalog `{0}`")]
    UnknownCatalog(String),
    #[error("negative multiplicity {value} for `{member}`")]
    NegativeMultiplicity { member: String, value: i64 },
    #[error("`{0}` is not a brick")]
    NotBrick(String),
    #[error("`{0}` and `{1}` are isomorphic")]
    DuplicateModule(String, String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("sequence not exact at `{0}`")]
    NotExact(String),
    #[error("embeddings do not cover the poset: {0}")]
    CoverageError(String),
    #[error("template `{0}` contains a chain of length at least 3")]
    ChainLengthError(String),
    #[error("evaluation matrix is not unitriangular: {0}")]
    TriangularityError(String),
    #[error("target is not in the span of the basis (remainder at `{0}`)")]
    NotInSpan(String),
    #[error("map is not natural at {0}")]
    NotNatural(String),
    #[error("poset too large for enumeration ({0} elements)")]
    TooLarge(usize),
    #[error("invariant keys differ")]
    KeyMismatch,
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Module-qualified code, printed by the CLI.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            Cycle(..) => "poset.cycle",
            UnknownElement(_) => "poset.unknown_element",
            DuplicateElement(_) => "poset.duplicate_element",
            EmptySubset => "poset.empty_subset",
            NotAnInterval => "pmod.not_an_interval",
            ShapeMismatch(_) => "linalg.shape_mismatch",
            CommutativityViolation { .. } => "pmod.commutativity",
            OrderViolation(_) => "pmod.order_violation",
            NotConnected => "pmod.not_connected",
            PosetMismatch => "pmod.poset_mismatch",
            FieldMismatch => "pmod.field_mismatch",
            NotAnEmbedding(_) => "poset.not_an_embedding",
            UnknownCatalog(_) => "decomp.unknown_catalog",
            NegativeMultiplicity { .. } => "decomp.negative_multiplicity",
            NotBrick(_) => "decomp.not_brick",
            DuplicateModule(..) => "decomp.duplicate_module",
            NoSolution(_) => "kan.no_solution",
            NotExact(_) => "relexact.not_exact",
            CoverageError(_) => "relexact.coverage",
            ChainLengthError(_) => "signed.chain_length",
            TriangularityError(_) => "signed.triangularity",
            NotInSpan(_) => "signed.not_in_span",
            NotNatural(_) => "pmod.not_natural",
            TooLarge(_) => "invariants.too_large",
            KeyMismatch => "invariants.key_mismatch",
            Format(_) => "io.format",
        }
    }

    pub fn is_format(&self) -> bool {
        matches!(self, Error::Format(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
