use thiserror::Error;

/// Reasons a raw category description is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("duplicate morphism `{0}`")]
    DuplicateMorphism(String),
    #[error("{context} references unknown {kind} `{name}`")]
    DanglingReference {
        context: String,
        kind: &'static str,
        name: String,
    },
    #[error("object `{0}` has no identity morphism")]
    MissingIdentity(String),
    #[error("composition `{g} after {f}` is not closed: {problem}")]
    NonClosedComposition {
        g: String,
        f: String,
        problem: String,
    },
    #[error("identity law fails: `{identity}` composed with `{morphism}` gives `{got}`")]
    IdentityLawViolation {
        identity: String,
        morphism: String,
        got: String,
    },
    #[error("associativity fails for ({h}, {g}, {f}): `{left}` vs `{right}`")]
    AssociativityViolation {
        h: String,
        g: String,
        f: String,
        left: String,
        right: String,
    },
}

/// Reasons a functor description is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("{context} references unknown {kind} `{name}`")]
    DanglingReference {
        context: String,
        kind: &'static str,
        name: String,
    },
    #[error("no image given for object `{0}`")]
    MissingObjectImage(String),
    #[error("no image given for morphism `{0}`")]
    MissingMorphismImage(String),
    #[error("morphism `{morphism}` maps to `{image}` with wrong {end}")]
    EndpointMismatch {
        morphism: String,
        image: String,
        end: &'static str,
    },
    #[error("identity `{identity}` maps to non-identity `{image}`")]
    IdentityNotPreserved { identity: String, image: String },
    #[error("composite `{g} after {f}` maps to `{image}` but images compose to `{expected}`")]
    CompositionNotPreserved {
        g: String,
        f: String,
        image: String,
        expected: String,
    },
    #[error("codomain of the first functor differs from domain of the second")]
    DomainMismatch,
    #[error("functors do not share a codomain")]
    CodomainMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("{context} references unknown {kind} `{name}`")]
    DanglingReference {
        context: String,
        kind: &'static str,
        name: String,
    },
    #[error("path in {context} is not composable at position {position}")]
    BrokenPath { context: String, position: usize },
    #[error("relation {index} relates non-parallel paths")]
    NonParallelRelation { index: usize },
    #[error("generator `{generator}` maps to a morphism with wrong {end}")]
    GeneratorImage {
        generator: String,
        end: &'static str,
    },
    #[error("relation {index} is not respected: sides evaluate to `{left}` and `{right}`")]
    RelationNotRespected {
        index: usize,
        left: String,
        right: String,
    },
}

/// Top-level error for the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("rewriting system is incomplete ({0})")]
    IncompleteSystem(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("resource cap exceeded: {0}")]
    ResourceExceeded(String),
    #[error("internal consistency violation: {0}")]
    ConsistencyViolation(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
