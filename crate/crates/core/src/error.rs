use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // groups
    #[error("multiplication table is malformed: {0}")]
    MalformedTable(String),
    #[error("multiplication is not associative on ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("multiplication table has no identity element")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    BadInverse(usize),
    #[error("group of order {order} exceeds the configured bound {bound}")]
    GroupTooLarge { order: usize, bound: usize },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("section product s({0})s({1})s({0}{1})^-1 falls outside the subgroup")]
    SectionMismatch(usize, usize),
    #[error("character error: {0}")]
    InvalidCharacter(String),
    // dynamics
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    // algebra
    #[error("elements belong to different systems")]
    SystemMismatch,
    #[error("functional is not Hermitian: worst pair (x={x}, g={g}) off by {residual:e}")]
    HermitianViolation { x: usize, g: usize, residual: f64 },
    // states
    #[error("function is not Hermitian: ψ({0}^-1) != conj ψ({0})")]
    SymmetryViolation(usize),
    #[error("not positive definite: min eigenvalue {0:e}")]
    NotPositiveDefinite(f64),
    #[error("dual measure has negative weight {weight:e} at character {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("invalid moment sequence: {0}")]
    InvalidMoments(String),
    #[error("atom at angle {0} has no rotated partner of equal weight")]
    NotRotationInvariant(String),
    // tracebuild
    #[error("field entry at point {0} is not defined on its stabilizer")]
    FieldDomainMismatch(usize),
    #[error("no field entry at point {0} although it carries positive mass")]
    MissingFieldEntry(usize),
    #[error("field entry at point {0} is not invariant under conjugation by its stabilizer")]
    NotConjugationInvariant(usize),
    #[error("subgroup is not the stabilizer of point {0}")]
    StabilizerMismatch(usize),
    #[error("invariance violated ({condition}): {detail}")]
    InvarianceViolation { condition: String, detail: String },
    #[error("monomial exponent {0} lies outside the window {1}")]
    WindowExceeded(i64, usize),
    #[error("mass error: {0}")]
    MassError(String),
    // analyze
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("functional does not centralize C(X): residual {0:e}")]
    CentralizerViolation(f64),
    #[error("functional is not positive: min Gram eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("commuting-representation identity fails: residual {0:e}")]
    IdentityFailure(f64),
    #[error("algebra is not a single matrix block ({0} blocks)")]
    NotSingleBlock(usize),
    #[error("generic central element has degenerate spectrum after {0} attempts")]
    DegenerateGeneric(usize),
    #[error("convex decomposition infeasible: {0}")]
    Infeasible(String),
    // zsystems
    #[error("trace is not constant along orbit of {rep} at exponent {m}")]
    OrbitInconsistency { rep: usize, m: i64 },
    #[error("moment c_{m} of orbit {rep} is {value:e} although period {period} does not divide {m}")]
    RotationViolation { rep: usize, m: i64, period: usize, value: f64 },
    #[error("moment sequence is not positive definite: min Toeplitz eigenvalue {0:e}")]
    MomentNotPSD(f64),
    #[error("rotation order {got} does not match orbit period {expected} at representative {rep}")]
    PeriodMismatch { rep: usize, expected: usize, got: usize },
    // io
    #[error("input error: {0}")]
    Input(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            MalformedTable(_) => "MalformedTable",
            NonAssociative(..) => "NonAssociative",
            NoIdentity => "NoIdentity",
            BadInverse(_) => "BadInverse",
            GroupTooLarge { .. } => "GroupTooLarge",
            NotAbelian => "NotAbelian",
            NotSubgroup(_) => "NotSubgroup",
            InvalidSection(_) => "InvalidSection",
            SectionMismatch(..) => "SectionMismatch",
            InvalidCharacter(_) => "InvalidCharacter",
            InvalidAction(_) => "InvalidAction",
            InvalidMeasure(_) => "InvalidMeasure",
            SystemMismatch => "SystemMismatch",
            HermitianViolation { .. } => "HermitianViolation",
            SymmetryViolation(_) => "SymmetryViolation",
            NotPositiveDefinite(_) => "NotPositiveDefinite",
            NegativeWeight { .. } => "NegativeWeight",
            InvalidMoments(_) => "InvalidMoments",
            NotRotationInvariant(_) => "NotRotationInvariant",
            FieldDomainMismatch(_) => "FieldDomainMismatch",
            MissingFieldEntry(_) => "MissingFieldEntry",
            NotConjugationInvariant(_) => "NotConjugationInvariant",
            StabilizerMismatch(_) => "StabilizerMismatch",
            InvarianceViolation { .. } => "InvarianceViolation",
            WindowExceeded(..) => "WindowExceeded",
            MassError(_) => "MassError",
            NotAState(_) => "NotAState",
            CentralizerViolation(_) => "CentralizerViolation",
            NotPositive(_) => "NotPositive",
            IdentityFailure(_) => "IdentityFailure",
            NotSingleBlock(_) => "NotSingleBlock",
            DegenerateGeneric(_) => "DegenerateGeneric",
            Infeasible(_) => "Infeasible",
            OrbitInconsistency { .. } => "OrbitInconsistency",
            RotationViolation { .. } => "RotationViolation",
            MomentNotPSD(_) => "MomentNotPSD",
            PeriodMismatch { .. } => "PeriodMismatch",
            Input(_) => "Input",
        }
    }

    /// Malformed or inconsistent input, as opposed to a failed mathematical condition.
    pub fn is_input_error(&self) -> bool {
        use Error::*;
        matches!(
            self,
            MalformedTable(_)
                | NonAssociative(..)
                | NoIdentity
                | BadInverse(_)
                | GroupTooLarge { .. }
                | NotAbelian
                | NotSubgroup(_)
                | InvalidSection(_)
                | InvalidCharacter(_)
                | InvalidAction(_)
                | InvalidMeasure(_)
                | SystemMismatch
                | InvalidMoments(_)
                | FieldDomainMismatch(_)
                | MissingFieldEntry(_)
                | StabilizerMismatch(_)
                | WindowExceeded(..)
                | PeriodMismatch { .. }
                | Input(_)
        )
    }
}
