//! Tri-state outcomes with witnesses and exhausted bounds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fincat::HomFailure;

/// Outcome of a bounded decision procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "snake_case")]
pub enum Verdict<T> {
    Yes(T),
    No(Witness),
    Undecided(Bound),
}

impl<T> Verdict<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::Undecided(_))
    }

    pub fn as_ref(&self) -> Verdict<&T> {
        match self {
            Verdict::Yes(t) => Verdict::Yes(t),
            Verdict::No(w) => Verdict::No(w.clone()),
            Verdict::Undecided(b) => Verdict::Undecided(*b),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Verdict<U> {
        match self {
            Verdict::Yes(t) => Verdict::Yes(f(t)),
            Verdict::No(w) => Verdict::No(w),
            Verdict::Undecided(b) => Verdict::Undecided(b),
        }
    }

    pub fn yes(self) -> Option<T> {
        match self {
            Verdict::Yes(t) => Some(t),
            _ => None,
        }
    }

    /// Short label: `yes`, `no` or `undecided`.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Undecided(_) => "undecided",
        }
    }
}

impl Verdict<bool> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Yes(true))
    }

    pub fn from_check(failure: Option<Witness>) -> Self {
        match failure {
            None => Verdict::Yes(true),
            Some(w) => Verdict::No(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    MaxRules,
    MaxWordLength,
    MaxStates,
    EnumerationCap,
}

/// The resource bound that was exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub resource: Resource,
    pub limit: usize,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.resource {
            Resource::MaxRules => "max rules",
            Resource::MaxWordLength => "max word length",
            Resource::MaxStates => "max automaton states",
            Resource::EnumerationCap => "enumeration cap",
        };
        write!(f, "{name} = {}", self.limit)
    }
}

/// One element `(a, u, v)` of a coend, with `u: x → p a` and `v: p a → y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoendElement {
    pub via: String,
    pub first: String,
    pub second: String,
}

/// Evidence attached to a negative verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A hom-set on which a functor is not bijective.
    NotFullyFaithful(HomFailure),
    NotEssentiallySurjective {
        object: String,
    },
    /// Two distinct coend classes with the same composite in `b(x, y)`.
    CoendNotInjective {
        x: String,
        y: String,
        morphism: String,
        first: CoendElement,
        second: CoendElement,
    },
    /// A morphism of `b(x, y)` that is not a composite through the image.
    CoendNotSurjective {
        x: String,
        y: String,
        morphism: String,
    },
    /// Normal forms `prefix · cycleⁿ · suffix` for every `n`.
    InfiniteHom {
        from: String,
        to: String,
        prefix: Vec<String>,
        cycle: Vec<String>,
        suffix: Vec<String>,
    },
    /// Left Kan extension fails to be bijective on transformations.
    LanNotFullyFaithful {
        source: serde_json::Value,
        target: serde_json::Value,
        detail: String,
    },
    /// The bounded descent comparison is not bijective on morphisms.
    ComparisonNotFullyFaithful {
        source: serde_json::Value,
        target: serde_json::Value,
        detail: String,
    },
    /// A bounded descent datum outside the essential image of the comparison.
    UnmatchedDescentDatum {
        datum: serde_json::Value,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::NotFullyFaithful(h) => {
                write!(f, "hom({}, {}) → hom({}, {}) ", h.x, h.y, h.image_x, h.image_y)?;
                match (&h.collapsed, &h.missed) {
                    (Some((a, b)), _) => write!(f, "identifies {a} and {b}"),
                    (_, Some(m)) => write!(f, "misses {m}"),
                    _ => write!(f, "is not bijective"),
                }
            }
            Witness::NotEssentiallySurjective { object } => {
                write!(f, "{object} is not isomorphic to any image object")
            }
            Witness::CoendNotInjective {
                x,
                y,
                morphism,
                first,
                second,
            } => write!(
                f,
                "coend at ({x}, {y}): classes of ({}, {}, {}) and ({}, {}, {}) both compose to {morphism}",
                first.via, first.first, first.second, second.via, second.first, second.second
            ),
            Witness::CoendNotSurjective { x, y, morphism } => {
                write!(f, "coend at ({x}, {y}): {morphism} does not factor through the image")
            }
            Witness::InfiniteHom {
                from,
                to,
                prefix,
                cycle,
                suffix,
            } => write!(
                f,
                "hom({from}, {to}) is infinite: [{}] ([{}])^n [{}] is normal for all n",
                prefix.join(";"),
                cycle.join(";"),
                suffix.join(";")
            ),
            Witness::LanNotFullyFaithful { detail, .. } => write!(f, "left Kan extension: {detail}"),
            Witness::ComparisonNotFullyFaithful { detail, .. } => {
                write!(f, "descent comparison: {detail}")
            }
            Witness::UnmatchedDescentDatum { datum } => {
                write!(f, "descent datum not in the essential image: {datum}")
            }
        }
    }
}
