//! Small named categories and functors.
//!
//! | name | objects | non-identity morphisms |
//! |------|---------|------------------------|
//! | `terminal` (𝟙) | `*` | none |
//! | `arrow` (𝟚) | `0`, `1` | `f: 0 → 1` |
//! | `discrete2` (D2) | `a`, `b` | none |
//! | `iso_pair` (I) | `x`, `y` | `f: x → y`, `g: y → x`, inverse to each other |
//! | `idempotent` (E) | `x` | `e` with `e∘e = e` |

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::fincat::{validate_category, FinCategory, FinFunctor, RawCategory, RawFunctor, RawMorphism};

/// Build a category from its non-identity composites `(g, f, g∘f)`;
/// composites with identities are filled in. Panics on invalid input.
pub fn category(
    objects: &[&str],
    identities: &[&str],
    morphisms: &[(&str, &str, &str)],
    composites: &[(&str, &str, &str)],
) -> FinCategory {
    let mut raw = RawCategory {
        objects: objects.iter().map(|s| s.to_string()).collect(),
        ..RawCategory::default()
    };
    let mut ends = BTreeMap::new();
    for (obj, id) in objects.iter().zip(identities) {
        raw.identities.insert(obj.to_string(), id.to_string());
        raw.morphisms.push(RawMorphism {
            id: id.to_string(),
            src: obj.to_string(),
            tgt: obj.to_string(),
        });
        ends.insert(*id, (*obj, *obj));
    }
    for &(id, src, tgt) in morphisms {
        raw.morphisms.push(RawMorphism {
            id: id.to_string(),
            src: src.to_string(),
            tgt: tgt.to_string(),
        });
        ends.insert(id, (src, tgt));
    }
    let id_of: BTreeMap<&str, &str> = objects.iter().copied().zip(identities.iter().copied()).collect();
    for (&m, &(src, tgt)) in &ends {
        raw.composition
            .push([id_of[tgt].to_string(), m.to_string(), m.to_string()]);
        if !identities.contains(&m) {
            raw.composition
                .push([m.to_string(), id_of[src].to_string(), m.to_string()]);
        }
    }
    for &(g, f, h) in composites {
        raw.composition.push([g.to_string(), f.to_string(), h.to_string()]);
    }
    validate_category(&raw).unwrap_or_else(|e| panic!("catalog category is invalid: {e}"))
}

/// Functor from name-level maps; identities may be omitted.
pub fn functor(
    domain: Arc<FinCategory>,
    codomain: Arc<FinCategory>,
    objects: &[(&str, &str)],
    morphisms: &[(&str, &str)],
) -> FinFunctor {
    let raw = RawFunctor {
        object_map: objects
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        morphism_map: morphisms
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    };
    FinFunctor::from_raw(domain, codomain, &raw)
        .unwrap_or_else(|e| panic!("catalog functor is invalid: {e}"))
}

pub fn terminal() -> FinCategory {
    category(&["*"], &["id"], &[], &[])
}

pub fn arrow() -> FinCategory {
    category(&["0", "1"], &["id0", "id1"], &[("f", "0", "1")], &[])
}

pub fn discrete2() -> FinCategory {
    category(&["a", "b"], &["ida", "idb"], &[], &[])
}

pub fn iso_pair() -> FinCategory {
    category(
        &["x", "y"],
        &["idx", "idy"],
        &[("f", "x", "y"), ("g", "y", "x")],
        &[("g", "f", "idx"), ("f", "g", "idy")],
    )
}

pub fn idempotent() -> FinCategory {
    category(&["x"], &["id"], &[("e", "x", "x")], &[("e", "e", "e")])
}

/// 𝟚 → 𝟙.
pub fn arrow_to_terminal() -> FinFunctor {
    functor(
        Arc::new(arrow()),
        Arc::new(terminal()),
        &[("0", "*"), ("1", "*")],
        &[("f", "id")],
    )
}

/// 𝟙 → 𝟚, `* ↦ 0`.
pub fn point_to_arrow_source() -> FinFunctor {
    functor(Arc::new(terminal()), Arc::new(arrow()), &[("*", "0")], &[])
}

/// 𝟙 → I, `* ↦ x`.
pub fn point_into_iso() -> FinFunctor {
    functor(Arc::new(terminal()), Arc::new(iso_pair()), &[("*", "x")], &[])
}

/// 𝟙 → D2, `* ↦ a`.
pub fn point_into_discrete() -> FinFunctor {
    functor(Arc::new(terminal()), Arc::new(discrete2()), &[("*", "a")], &[])
}

/// D2 → 𝟙.
pub fn discrete_to_terminal() -> FinFunctor {
    functor(
        Arc::new(discrete2()),
        Arc::new(terminal()),
        &[("a", "*"), ("b", "*")],
        &[],
    )
}

/// 𝟙 → E.
pub fn point_into_idempotent() -> FinFunctor {
    functor(Arc::new(terminal()), Arc::new(idempotent()), &[("*", "x")], &[])
}

pub fn identity_on_arrow() -> FinFunctor {
    FinFunctor::identity(Arc::new(arrow()))
}

/// The curated functors, with their display names.
pub fn curated() -> Vec<(&'static str, FinFunctor)> {
    vec![
        ("id on 2", identity_on_arrow()),
        ("1 -> I", point_into_iso()),
        ("D2 -> 1", discrete_to_terminal()),
        ("2 -> 1", arrow_to_terminal()),
        ("1 -> D2", point_into_discrete()),
        ("1 -> E", point_into_idempotent()),
    ]
}

/// The linear order `0 < 1 < … < n` with morphisms named `ij` for `i < j`.
pub fn linear_order(n: usize) -> FinCategory {
    let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let ids: Vec<String> = (0..=n).map(|i| format!("id{i}")).collect();
    let arrow_name = |i: usize, j: usize| format!("{i}{j}");
    let mut arrows = Vec::new();
    let mut composites = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            arrows.push((arrow_name(i, j), names[i].clone(), names[j].clone()));
            for k in j + 1..=n {
                composites.push((arrow_name(j, k), arrow_name(i, j), arrow_name(i, k)));
            }
        }
    }
    category(
        &names.iter().map(String::as_str).collect::<Vec<_>>(),
        &ids.iter().map(String::as_str).collect::<Vec<_>>(),
        &arrows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect::<Vec<_>>(),
        &composites.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect::<Vec<_>>(),
    )
}

/// Three disjoint arrows laid end to end along `0 < 1 < 2 < 3`. Its
/// codescent category glues them into a chain, so the longest normal form
/// alternates three arrows with two gluing isomorphisms.
pub fn arrows_into_chain() -> FinFunctor {
    let arrows = category(
        &["a0", "a1", "b0", "b1", "c0", "c1"],
        &["ida0", "ida1", "idb0", "idb1", "idc0", "idc1"],
        &[("f", "a0", "a1"), ("g", "b0", "b1"), ("h", "c0", "c1")],
        &[],
    );
    functor(
        Arc::new(arrows),
        Arc::new(linear_order(3)),
        &[("a0", "0"), ("a1", "1"), ("b0", "1"), ("b1", "2"), ("c0", "2"), ("c1", "3")],
        &[("f", "01"), ("g", "12"), ("h", "23")],
    )
}
