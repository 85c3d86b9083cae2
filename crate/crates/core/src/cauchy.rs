//! Cauchy completion over `Set`, as the Karoubi envelope.
//!
//! Objects of the envelope are pairs `(x;m)` with `m: x → x` idempotent; a
//! morphism `(x;m) → (y;n)` is some `f: x → y` with `n∘f = f = f∘m`, and
//! the identity on `(x;m)` is `m` itself.

use std::sync::Arc;

use crate::fincat::{FinCategory, FinFunctor, MorId, ObjId};

#[derive(Debug, Clone)]
pub struct KaroubiEnvelope {
    pub base: Arc<FinCategory>,
    pub completion: Arc<FinCategory>,
    /// `x ↦ (x;id)`, `f ↦ f`.
    pub unit: FinFunctor,
    /// The idempotent of each completion object.
    pub idempotents: Vec<MorId>,
    /// The base morphism underlying each completion morphism.
    pub underlying: Vec<MorId>,
    /// Completion object `(x;m)`, indexed by the base morphism `m`.
    object_of_idempotent: Vec<Option<ObjId>>,
}

impl KaroubiEnvelope {
    pub fn object_of(&self, idempotent: MorId) -> Option<ObjId> {
        self.object_of_idempotent[idempotent.0]
    }

    /// The completion morphism `f: (x;m) → (y;n)`, if `f` is one.
    pub fn morphism_of(&self, src: ObjId, tgt: ObjId, f: MorId) -> Option<MorId> {
        self.completion
            .hom(src, tgt)
            .iter()
            .copied()
            .find(|&g| self.underlying[g.0] == f)
    }
}

pub fn karoubi_envelope(c: Arc<FinCategory>) -> KaroubiEnvelope {
    let mut idempotents = Vec::new();
    let mut object_names = Vec::new();
    let mut object_of_idempotent = vec![None; c.morphism_count()];
    for x in c.objects() {
        // the identity first, so that the unit lands on `(x;id)`
        let id = c.identity(x);
        let hom = c.hom(x, x);
        for &m in std::iter::once(&id).chain(hom.iter().filter(|&&m| m != id)) {
            if c.is_idempotent(m) {
                object_of_idempotent[m.0] = Some(ObjId(idempotents.len()));
                idempotents.push(m);
                object_names.push(format!("({};{})", c.object_name(x), c.morphism_name(m)));
            }
        }
    }
    let mut morphisms = Vec::new();
    let mut underlying = Vec::new();
    let mut identities = vec![MorId(0); idempotents.len()];
    for (i, &m) in idempotents.iter().enumerate() {
        for (j, &n) in idempotents.iter().enumerate() {
            for &f in c.hom(c.src(m), c.src(n)) {
                if c.compose(n, f) == Some(f) && c.compose(f, m) == Some(f) {
                    if f == m && i == j {
                        identities[i] = MorId(morphisms.len());
                    }
                    morphisms.push((
                        format!("{}:{}→{}", c.morphism_name(f), object_names[i], object_names[j]),
                        ObjId(i),
                        ObjId(j),
                    ));
                    underlying.push(f);
                }
            }
        }
    }
    let k = morphisms.len();
    let mut table = vec![None; k * k];
    let mut by_hom: Vec<Vec<usize>> = vec![Vec::new(); idempotents.len() * idempotents.len()];
    for (g, (_, src, tgt)) in morphisms.iter().enumerate() {
        by_hom[src.0 * idempotents.len() + tgt.0].push(g);
    }
    for (g, (_, gsrc, gtgt)) in morphisms.iter().enumerate() {
        for (f, (_, fsrc, ftgt)) in morphisms.iter().enumerate() {
            if ftgt == gsrc {
                let h = c.compose(underlying[g], underlying[f]).expect("composable in the base");
                let hom = &by_hom[fsrc.0 * idempotents.len() + gtgt.0];
                let found = hom.iter().copied().find(|&i| underlying[i] == h);
                table[g * k + f] = Some(MorId(found.expect("composite absorbs both idempotents")));
            }
        }
    }
    let completion = Arc::new(
        FinCategory::from_parts(object_names, morphisms, identities, table)
            .expect("the Karoubi envelope is a category"),
    );
    let unit_objects: Vec<ObjId> = c
        .objects()
        .map(|x| object_of_idempotent[c.identity(x).0].unwrap())
        .collect();
    let unit_morphisms = c
        .morphisms()
        .map(|f| {
            let (i, j) = (unit_objects[c.src(f).0], unit_objects[c.tgt(f).0]);
            completion
                .hom(i, j)
                .iter()
                .copied()
                .find(|&g| underlying[g.0] == f)
                .unwrap()
        })
        .collect();
    let unit = FinFunctor::new_unchecked(c.clone(), completion.clone(), unit_objects, unit_morphisms);
    KaroubiEnvelope {
        base: c,
        completion,
        unit,
        idempotents,
        underlying,
        object_of_idempotent,
    }
}

/// `(x;m) ↦ (px;pm)`, `f ↦ pf`, between given envelopes of the domain and
/// codomain of `p`.
pub fn cauchy_map_between(p: &FinFunctor, source: &KaroubiEnvelope, target: &KaroubiEnvelope) -> FinFunctor {
    let objects: Vec<ObjId> = source
        .idempotents
        .iter()
        .map(|&m| target.object_of(p.on_morphism(m)).expect("functors preserve idempotents"))
        .collect();
    let cs = &source.completion;
    let morphisms = cs
        .morphisms()
        .map(|f| {
            let (i, j) = (objects[cs.src(f).0], objects[cs.tgt(f).0]);
            target
                .morphism_of(i, j, p.on_morphism(source.underlying[f.0]))
                .expect("functors preserve the absorption equations")
        })
        .collect();
    FinFunctor::new_unchecked(source.completion.clone(), target.completion.clone(), objects, morphisms)
}

pub fn cauchy_map(p: &FinFunctor) -> FinFunctor {
    let source = karoubi_envelope(p.domain().clone());
    let target = karoubi_envelope(p.codomain().clone());
    cauchy_map_between(p, &source, &target)
}

/// An idempotent `e: x → x` with no `r: x → y`, `s: y → x` such that
/// `s∘r = e` and `r∘s = id`.
pub fn non_split_idempotent(c: &FinCategory) -> Option<MorId> {
    c.morphisms().filter(|&e| c.is_idempotent(e)).find(|&e| {
        let x = c.src(e);
        !c.objects().any(|y| {
            c.hom(x, y).iter().any(|&r| {
                c.hom(y, x)
                    .iter()
                    .any(|&s| c.compose(s, r) == Some(e) && c.compose(r, s) == Some(c.identity(y)))
            })
        })
    })
}

/// Whether the unit into the Karoubi envelope is an equivalence.
pub fn is_cauchy_complete(c: &FinCategory) -> bool {
    karoubi_envelope(Arc::new(c.clone())).unit.is_equivalence()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::enumerate::find_isomorphism;
    use crate::fincat::compose_functors;

    #[test]
    fn envelopes_of_small_categories() {
        for c in [catalog::terminal(), catalog::arrow(), catalog::iso_pair()] {
            let c = Arc::new(c);
            let k = karoubi_envelope(c.clone());
            assert!(find_isomorphism(&k.completion, &c).is_some());
            assert!(k.unit.is_equivalence());
        }
    }

    #[test]
    fn envelope_of_idempotent() {
        let k = karoubi_envelope(Arc::new(catalog::idempotent()));
        let c = &k.completion;
        assert_eq!(c.object_names(), ["(x;id)", "(x;e)"]);
        assert_eq!(c.morphism_count(), 5);
        let (i, e) = (ObjId(0), ObjId(1));
        assert_eq!(c.hom(i, i).len(), 2);
        for (a, b) in [(i, e), (e, i), (e, e)] {
            let hom = c.hom(a, b);
            assert_eq!(hom.len(), 1);
            assert_eq!(k.underlying[hom[0].0], catalog::idempotent().morphism_id("e").unwrap());
        }
        assert_eq!(c.identity(e), c.hom(e, e)[0]);
        assert!(k.unit.is_fully_faithful());
        assert!(!k.unit.is_essentially_surjective());
    }

    #[test]
    fn envelope_splits_every_idempotent() {
        for (_, p) in catalog::curated() {
            for c in [p.domain(), p.codomain()] {
                let k = karoubi_envelope(c.clone());
                assert_eq!(non_split_idempotent(&k.completion), None);
                assert!(is_cauchy_complete(&k.completion));
            }
        }
    }

    #[test]
    fn cauchy_completeness() {
        assert!(is_cauchy_complete(&catalog::arrow()));
        assert!(!is_cauchy_complete(&catalog::idempotent()));
        let e = catalog::idempotent();
        assert_eq!(non_split_idempotent(&e), e.morphism_id("e"));
    }

    #[test]
    fn cauchy_map_examples() {
        let id = catalog::identity_on_arrow();
        let cid = cauchy_map(&id);
        assert_eq!(cid.object_map(), [ObjId(0), ObjId(1)]);
        assert!(cid.morphism_map().iter().enumerate().all(|(i, m)| m.0 == i));

        assert!(cauchy_map(&catalog::point_into_iso()).is_equivalence());

        let q = cauchy_map(&catalog::point_into_idempotent());
        assert!(!q.is_equivalence());
        assert!(!q.is_essentially_surjective());
        assert!(!q.is_fully_faithful());
    }

    #[test]
    fn cauchy_map_is_functorial() {
        let f = catalog::point_to_arrow_source();
        let g = catalog::arrow_to_terminal();
        let gf = compose_functors(&g, &f).unwrap();
        let (k1, k2, k3) = (
            karoubi_envelope(f.domain().clone()),
            karoubi_envelope(f.codomain().clone()),
            karoubi_envelope(g.codomain().clone()),
        );
        let composite = compose_functors(&cauchy_map_between(&g, &k2, &k3), &cauchy_map_between(&f, &k1, &k2)).unwrap();
        let direct = cauchy_map_between(&gf, &k1, &k3);
        assert_eq!(composite.object_map(), direct.object_map());
        assert_eq!(composite.morphism_map(), direct.morphism_map());
    }
}
