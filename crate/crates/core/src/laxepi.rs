//! Lax epimorphisms, decided by a finite coend.
//!
//! `p: e → b` is a lax epimorphism exactly when, for all objects `x`, `y` of
//! `b`, composition
//!
//! ```text
//! ∫^a b(x, pa) × b(pa, y) → b(x, y)
//! ```
//!
//! is a bijection. The coend is the set of triples `(a, u, v)` modulo
//! `(a, u, v∘pw) ~ (a', pw∘u, v)` for `w: a → a'`. Identifications along
//! generating morphisms suffice, so the same computation works for a
//! functor out of a presented category without solving its word problem.

use serde::{Deserialize, Serialize};

use crate::codescent::PresentedFunctor;
use crate::fincat::{FinCategory, FinFunctor, MorId, ObjId};
use crate::present::GenId;
use crate::verdict::{CoendElement, Verdict, Witness};

/// Union-find keeping the least index of each class as its root.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        true
    }
}

/// A functor into a finite category seen only through the images of its
/// objects and of a generating set of morphisms.
struct Generated<'a> {
    codomain: &'a FinCategory,
    object_names: Vec<&'a str>,
    images: Vec<ObjId>,
    /// `(a, a', pw)` for each generator `w: a → a'`.
    generators: Vec<(usize, usize, MorId)>,
}

impl<'a> Generated<'a> {
    fn of_functor(p: &'a FinFunctor) -> Self {
        let e = p.domain();
        Generated {
            codomain: p.codomain(),
            object_names: e.object_names().iter().map(String::as_str).collect(),
            images: p.object_map().to_vec(),
            generators: e
                .morphisms()
                .filter(|&w| !e.is_identity(w))
                .map(|w| (e.src(w).0, e.tgt(w).0, p.on_morphism(w)))
                .collect(),
        }
    }

    fn of_presented(k: &'a PresentedFunctor) -> Self {
        let p = k.domain();
        Generated {
            codomain: k.codomain(),
            object_names: p.nodes().iter().map(String::as_str).collect(),
            images: (0..p.nodes().len())
                .map(|x| k.on_node(crate::present::NodeId(x)))
                .collect(),
            generators: p
                .generators()
                .iter()
                .enumerate()
                .map(|(i, g)| (g.src.0, g.tgt.0, k.on_generator(GenId(i))))
                .collect(),
        }
    }

    fn pair(&self, x: ObjId, y: ObjId) -> CoendPair {
        let b = self.codomain;
        let mut elements = Vec::new();
        let mut offsets = Vec::with_capacity(self.images.len());
        for (a, &pa) in self.images.iter().enumerate() {
            offsets.push(elements.len());
            for &u in b.hom(x, pa) {
                for &v in b.hom(pa, y) {
                    elements.push((a, u, v));
                }
            }
        }
        // element index of (a, u, v) from hom positions
        let index = |a: usize, u: MorId, v: MorId| {
            let width = b.hom(self.images[a], y).len();
            offsets[a] + b.hom_position(u) * width + b.hom_position(v)
        };
        let mut classes = DisjointSet::new(elements.len());
        for &(a, a2, w) in &self.generators {
            let (pa, pa2) = (self.images[a], self.images[a2]);
            for &u in b.hom(x, pa) {
                let wu = b.compose(w, u).expect("composable");
                for &v in b.hom(pa2, y) {
                    let vw = b.compose(v, w).expect("composable");
                    classes.union(index(a, u, vw), index(a2, wu, v));
                }
            }
        }
        let class: Vec<usize> = (0..elements.len()).map(|i| classes.find(i)).collect();
        let composite = elements
            .iter()
            .map(|&(_, u, v)| b.compose(v, u).expect("composable"))
            .collect();
        CoendPair {
            x,
            y,
            elements,
            class,
            composite,
        }
    }

    fn element(&self, &(a, u, v): &(usize, MorId, MorId)) -> CoendElement {
        CoendElement {
            via: self.object_names[a].to_string(),
            first: self.codomain.morphism_name(u).to_string(),
            second: self.codomain.morphism_name(v).to_string(),
        }
    }

    fn pair_failure(&self, pair: &CoendPair) -> Option<Witness> {
        let b = self.codomain;
        let mut hit: Vec<Option<usize>> = vec![None; b.morphism_count()];
        let (x, y) = (
            b.object_name(pair.x).to_string(),
            b.object_name(pair.y).to_string(),
        );
        for (i, &c) in pair.class.iter().enumerate() {
            if c != i {
                continue;
            }
            let m = pair.composite[i];
            if let Some(prev) = hit[m.0] {
                return Some(Witness::CoendNotInjective {
                    x,
                    y,
                    morphism: b.morphism_name(m).to_string(),
                    first: self.element(&pair.elements[prev]),
                    second: self.element(&pair.elements[i]),
                });
            }
            hit[m.0] = Some(i);
        }
        b.hom(pair.x, pair.y)
            .iter()
            .find(|m| hit[m.0].is_none())
            .map(|&m| Witness::CoendNotSurjective {
                x,
                y,
                morphism: b.morphism_name(m).to_string(),
            })
    }

    fn failure(&self) -> Option<Witness> {
        let b = self.codomain;
        b.objects()
            .flat_map(|x| b.objects().map(move |y| (x, y)))
            .find_map(|(x, y)| self.pair_failure(&self.pair(x, y)))
    }

    fn table(&self) -> CoendTable {
        let b = self.codomain;
        let mut pairs = Vec::new();
        let mut failure = None;
        for x in b.objects() {
            for y in b.objects() {
                let pair = self.pair(x, y);
                if failure.is_none() {
                    failure = self.pair_failure(&pair);
                }
                pairs.push(pair);
            }
        }
        CoendTable { pairs, failure }
    }
}

/// The coend at one pair `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoendPair {
    pub x: ObjId,
    pub y: ObjId,
    /// Triples `(a, u, v)` ordered by `a`, then `u`, then `v`.
    pub elements: Vec<(usize, MorId, MorId)>,
    /// Least element index in the class of each element.
    pub class: Vec<usize>,
    /// `v ∘ u` for each element.
    pub composite: Vec<MorId>,
}

impl CoendPair {
    pub fn class_count(&self) -> usize {
        self.class.iter().enumerate().filter(|&(i, &c)| c == i).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoendTable {
    /// One entry per pair of codomain objects, `x` major.
    pub pairs: Vec<CoendPair>,
    /// First pair at which composition is not bijective.
    pub failure: Option<Witness>,
}

impl CoendTable {
    pub fn is_bijective(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn coend_table(p: &FinFunctor) -> CoendTable {
    Generated::of_functor(p).table()
}

pub fn coend_table_presented(k: &PresentedFunctor) -> CoendTable {
    Generated::of_presented(k).table()
}

pub fn lax_epimorphism_failure(p: &FinFunctor) -> Option<Witness> {
    Generated::of_functor(p).failure()
}

pub fn is_lax_epimorphism(p: &FinFunctor) -> bool {
    lax_epimorphism_failure(p).is_none()
}

pub fn lax_epimorphism_verdict(p: &FinFunctor) -> Verdict<bool> {
    Verdict::from_check(lax_epimorphism_failure(p))
}

/// The coend criterion for `K`, identifying only along generators.
pub fn lax_epimorphism_failure_presented(k: &PresentedFunctor) -> Option<Witness> {
    Generated::of_presented(k).failure()
}

pub fn is_lax_epimorphism_presented(k: &PresentedFunctor) -> bool {
    lax_epimorphism_failure_presented(k).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::codescent::codescent_presentation;
    use crate::kernel::higher_kernel;

    fn presented_k(p: &FinFunctor) -> PresentedFunctor {
        codescent_presentation(&higher_kernel(p).unwrap()).unwrap().comparison
    }

    #[test]
    fn identity_is_lax_epi() {
        let p = catalog::identity_on_arrow();
        let t = coend_table(&p);
        assert!(t.is_bijective());
        for pair in &t.pairs {
            let hom = p.codomain().hom(pair.x, pair.y).len();
            assert_eq!(pair.class_count(), hom);
        }
        assert!(is_lax_epimorphism_presented(&presented_k(&p)));
    }

    #[test]
    fn point_into_idempotent_is_not_injective() {
        let p = catalog::point_into_idempotent();
        let t = coend_table(&p);
        assert_eq!(t.pairs.len(), 1);
        assert_eq!(t.pairs[0].elements.len(), 4);
        assert_eq!(t.pairs[0].class_count(), 4);
        match t.failure {
            Some(Witness::CoendNotInjective { morphism, .. }) => assert_eq!(morphism, "e"),
            other => panic!("expected non-injective coend, got {other:?}"),
        }
        assert!(!is_lax_epimorphism(&p));
    }

    #[test]
    fn point_into_discrete_misses_an_object() {
        let p = catalog::point_into_discrete();
        assert_eq!(
            lax_epimorphism_failure(&p),
            Some(Witness::CoendNotSurjective {
                x: "b".into(),
                y: "b".into(),
                morphism: "idb".into()
            })
        );
        let k = presented_k(&p);
        assert!(matches!(
            lax_epimorphism_failure_presented(&k),
            Some(Witness::CoendNotSurjective { .. })
        ));
    }

    #[test]
    fn lax_epis_from_the_catalog() {
        let p = catalog::arrow_to_terminal();
        let t = coend_table(&p);
        assert_eq!(t.pairs[0].elements.len(), 2);
        assert_eq!(t.pairs[0].class_count(), 1);
        assert!(t.is_bijective());
        assert!(is_lax_epimorphism(&catalog::point_into_iso()));
        assert!(!is_lax_epimorphism(&catalog::discrete_to_terminal()));
        assert!(is_lax_epimorphism_presented(&presented_k(&catalog::discrete_to_terminal())));
    }

    #[test]
    fn disjoint_set_keeps_least_root() {
        let mut d = DisjointSet::new(5);
        assert!(d.union(4, 2));
        assert!(d.union(3, 4));
        assert!(!d.union(2, 3));
        assert_eq!(d.find(3), 2);
        assert_eq!(d.find(0), 0);
    }
}
