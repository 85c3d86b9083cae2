//! The lax codescent category of a kernel diagram and the factorization
//! `p = K ∘ Φ` through it.
//!
//! `CoDesc(p)` is presented on the objects of `e`, with one generator per
//! non-identity morphism of `e` and one generator `θ(u,v): u → v` per object
//! of `e ×_b e`. The relations are
//!
//! * the composition table of `e`, identities becoming empty paths;
//! * naturality: `θβ ∘ f = g ∘ θα` for each morphism `(f, g): α → β` of
//!   `e ×_b e`;
//! * unit: `θ(x,x)` is the empty path at `x`;
//! * cocycle: `θ(u,w) = θ(v,w) ∘ θ(u,v)` for each `(u,v,w)`.
//!
//! `Φ` sends a morphism of `e` to its generator and `K` sends every
//! generator of `e` to its image under `p`, every `θ` to an identity.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, PresentationError};
use crate::fincat::{FinCategory, FinFunctor, HomFailure, MorId, ObjId};
use crate::kernel::KernelPairDiagram;
use crate::present::{
    complete_rewriting, hom_set_in, Finitization, GenId, Generator, Limits, NodeId, Path, Presentation,
    RewriteSystem,
};
use crate::verdict::{Verdict, Witness};

/// A functor out of a presented category, given on generators.
#[derive(Debug, Clone)]
pub struct PresentedFunctor {
    domain: Presentation,
    codomain: Arc<FinCategory>,
    object_map: Vec<ObjId>,
    generator_map: Vec<MorId>,
}

impl PresentedFunctor {
    /// Checks generator endpoints and that every relation holds in the
    /// codomain.
    pub fn new(
        domain: Presentation,
        codomain: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        generator_map: Vec<MorId>,
    ) -> Result<Self, PresentationError> {
        let k = PresentedFunctor::new_unchecked(domain, codomain, object_map, generator_map);
        k.endpoint_failure().map_or(Ok(()), Err)?;
        k.relation_failure().map_or(Ok(()), Err)?;
        Ok(k)
    }

    /// No relation check; see [`PresentedFunctor::relation_failure`].
    pub fn new_unchecked(
        domain: Presentation,
        codomain: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        generator_map: Vec<MorId>,
    ) -> Self {
        assert_eq!(object_map.len(), domain.nodes().len());
        assert_eq!(generator_map.len(), domain.generators().len());
        PresentedFunctor {
            domain,
            codomain,
            object_map,
            generator_map,
        }
    }

    pub fn domain(&self) -> &Presentation {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FinCategory> {
        &self.codomain
    }

    pub fn on_node(&self, x: NodeId) -> ObjId {
        self.object_map[x.0]
    }

    pub fn on_generator(&self, g: GenId) -> MorId {
        self.generator_map[g.0]
    }

    /// The composite in the codomain of the images along `path`.
    pub fn evaluate(&self, path: &Path) -> MorId {
        let b = &self.codomain;
        path.edges.iter().fold(b.identity(self.on_node(path.src)), |acc, &g| {
            b.compose(self.on_generator(g), acc)
                .expect("generator images compose along a path")
        })
    }

    fn endpoint_failure(&self) -> Option<PresentationError> {
        let b = &self.codomain;
        self.domain.generators().iter().enumerate().find_map(|(i, g)| {
            let image = self.generator_map[i];
            if image.0 >= b.morphism_count() {
                Some(PresentationError::DanglingReference {
                    context: format!("image of `{}`", g.name),
                    kind: "morphism",
                    name: image.0.to_string(),
                })
            } else if b.src(image) != self.on_node(g.src) {
                Some(PresentationError::GeneratorImage {
                    generator: g.name.clone(),
                    end: "source",
                })
            } else if b.tgt(image) != self.on_node(g.tgt) {
                Some(PresentationError::GeneratorImage {
                    generator: g.name.clone(),
                    end: "target",
                })
            } else {
                None
            }
        })
    }

    /// First relation whose sides evaluate differently.
    pub fn relation_failure(&self) -> Option<PresentationError> {
        self.domain
            .relations()
            .iter()
            .enumerate()
            .find_map(|(index, (l, r))| {
                let (a, b) = (self.evaluate(l), self.evaluate(r));
                (a != b).then(|| PresentationError::RelationNotRespected {
                    index,
                    left: self.codomain.morphism_name(a).to_string(),
                    right: self.codomain.morphism_name(b).to_string(),
                })
            })
    }

    /// The induced functor out of a finitization of the domain.
    pub fn on_finitization(&self, fin: &Finitization) -> FinFunctor {
        let objects = (0..self.domain.nodes().len()).map(|x| self.object_map[x]).collect();
        let morphisms = fin.normal_forms.iter().map(|nf| self.evaluate(nf)).collect();
        FinFunctor::new(Arc::new(fin.category.clone()), self.codomain.clone(), objects, morphisms)
            .expect("a relation-respecting functor descends to the finitization")
    }
}

/// Which relation family a relation of the codescent presentation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Composition,
    Naturality,
    Unit,
    Cocycle,
}

#[derive(Debug, Clone)]
pub struct CodescentFactorization {
    pub diagram: KernelPairDiagram,
    pub presentation: Presentation,
    /// `Φ` on morphisms of `e`: empty path for identities, a single
    /// generator otherwise.
    pub phi: Vec<Path>,
    pub comparison: PresentedFunctor,
    /// Generator `θα` for each object `α` of `e ×_b e`.
    pub theta: Vec<GenId>,
    /// Family of each relation, parallel to the presentation's relations.
    pub relation_kinds: Vec<RelationKind>,
}

/// Why a codescent factorization fails to factor `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorizationFailure {
    /// `K` does not respect a relation.
    RelationNotRespected {
        index: usize,
        family: RelationKind,
        left: String,
        right: String,
    },
    /// `Φ` is not functorial: no relation identifies `Φ(g) ∘ Φ(f)` with
    /// `Φ(g ∘ f)`.
    PhiNotFunctorial { first: String, then: String },
    /// `K ∘ Φ` differs from `p` on a morphism.
    NotFactorization {
        morphism: String,
        expected: String,
        got: String,
    },
}

/// Build `CoDesc(p)` with `Φ` and `K` from a kernel diagram.
pub fn codescent_presentation(d: &KernelPairDiagram) -> Result<CodescentFactorization, Error> {
    let e = d.x0().clone();
    let b = d.p.codomain().clone();
    let x1 = &d.x1.category;
    let x2 = &d.x2.category;

    let mut generators = Vec::new();
    let mut phi = Vec::with_capacity(e.morphism_count());
    for f in e.morphisms() {
        let (src, tgt) = (NodeId(e.src(f).0), NodeId(e.tgt(f).0));
        if e.is_identity(f) {
            phi.push(Path::empty(src));
        } else {
            phi.push(Path {
                src,
                tgt,
                edges: vec![GenId(generators.len())],
            });
            generators.push(Generator {
                name: e.morphism_name(f).to_string(),
                src,
                tgt,
            });
        }
    }
    let mut taken: HashSet<String> = generators.iter().map(|g| g.name.clone()).collect();
    let mut theta = Vec::with_capacity(x1.object_count());
    for alpha in x1.objects() {
        let mut name = format!("θ{}", x1.object_name(alpha));
        while !taken.insert(name.clone()) {
            name.push('\'');
        }
        theta.push(GenId(generators.len()));
        generators.push(Generator {
            name,
            src: NodeId(d.d1.on_object(alpha).0),
            tgt: NodeId(d.d0.on_object(alpha).0),
        });
    }
    let theta_path = |alpha: ObjId| Path {
        src: NodeId(d.d1.on_object(alpha).0),
        tgt: NodeId(d.d0.on_object(alpha).0),
        edges: vec![theta[alpha.0]],
    };
    let concat = |a: &Path, b: &Path| {
        let mut edges = a.edges.clone();
        edges.extend_from_slice(&b.edges);
        Path {
            src: a.src,
            tgt: b.tgt,
            edges,
        }
    };

    let mut relations = Vec::new();
    let mut kinds = Vec::new();
    for f in e.morphisms().filter(|&f| !e.is_identity(f)) {
        for &g in e.out_of(e.tgt(f)) {
            if !e.is_identity(g) {
                relations.push((concat(&phi[f.0], &phi[g.0]), phi[e.then(f, g).0].clone()));
                kinds.push(RelationKind::Composition);
            }
        }
    }
    for m in x1.morphisms() {
        let (alpha, beta) = (x1.src(m), x1.tgt(m));
        let (f, g) = (d.d1.on_morphism(m), d.d0.on_morphism(m));
        relations.push((
            concat(&phi[f.0], &theta_path(beta)),
            concat(&theta_path(alpha), &phi[g.0]),
        ));
        kinds.push(RelationKind::Naturality);
    }
    for x in e.objects() {
        let alpha = d.s0.on_object(x);
        relations.push((theta_path(alpha), Path::empty(NodeId(x.0))));
        kinds.push(RelationKind::Unit);
    }
    for gamma in x2.objects() {
        let [f0, f1, f2] = &d.faces;
        relations.push((
            theta_path(f1.on_object(gamma)),
            concat(&theta_path(f2.on_object(gamma)), &theta_path(f0.on_object(gamma))),
        ));
        kinds.push(RelationKind::Cocycle);
    }

    let presentation = Presentation::new(e.object_names().to_vec(), generators, relations)?;
    let mut generator_map = Vec::with_capacity(presentation.generators().len());
    for f in e.morphisms().filter(|&f| !e.is_identity(f)) {
        generator_map.push(d.p.on_morphism(f));
    }
    for alpha in x1.objects() {
        generator_map.push(b.identity(d.p.on_object(d.d0.on_object(alpha))));
    }
    let comparison = PresentedFunctor::new(
        presentation.clone(),
        b,
        d.p.object_map().to_vec(),
        generator_map,
    )?;
    Ok(CodescentFactorization {
        diagram: d.clone(),
        presentation,
        phi,
        comparison,
        theta,
        relation_kinds: kinds,
    })
}

impl CodescentFactorization {
    /// First way in which `K ∘ Φ = p` fails to be a factorization.
    pub fn factorization_failure(&self) -> Option<FactorizationFailure> {
        let k = &self.comparison;
        if let Some(PresentationError::RelationNotRespected { index, left, right }) = k.relation_failure() {
            return Some(FactorizationFailure::RelationNotRespected {
                index,
                family: self.relation_kinds.get(index).copied().unwrap_or(RelationKind::Composition),
                left,
                right,
            });
        }
        let e = self.diagram.x0();
        let p = &self.diagram.p;
        let b = p.codomain();
        for f in e.morphisms() {
            let got = k.evaluate(&self.phi[f.0]);
            if got != p.on_morphism(f) {
                return Some(FactorizationFailure::NotFactorization {
                    morphism: e.morphism_name(f).to_string(),
                    expected: b.morphism_name(p.on_morphism(f)).to_string(),
                    got: b.morphism_name(got).to_string(),
                });
            }
        }
        let related: HashSet<(&[GenId], &[GenId])> = self
            .presentation
            .relations()
            .iter()
            .flat_map(|(l, r)| [(&l.edges[..], &r.edges[..]), (&r.edges[..], &l.edges[..])])
            .collect();
        for f in e.morphisms() {
            for &g in e.out_of(e.tgt(f)) {
                let mut joined = self.phi[f.0].edges.clone();
                joined.extend_from_slice(&self.phi[g.0].edges);
                let composite = &self.phi[e.then(f, g).0].edges;
                if joined != *composite && !related.contains(&(&joined[..], &composite[..])) {
                    return Some(FactorizationFailure::PhiNotFunctorial {
                        first: e.morphism_name(f).to_string(),
                        then: e.morphism_name(g).to_string(),
                    });
                }
            }
        }
        None
    }

    pub fn check_factorization(&self) -> bool {
        self.factorization_failure().is_none()
    }

    /// Whether `K` is bijective on every hom-set of `CoDesc(p)`.
    pub fn comparison_ff(&self, limits: &Limits) -> Verdict<bool> {
        let system = complete_rewriting(&self.presentation, limits);
        comparison_ff_with(&self.comparison, &system, limits)
    }
}

/// Whether `k` is bijective on every hom-set of its domain, using a
/// completed system for that domain.
///
/// An infinite hom-set is a definite `No`: the codomain is finite, so `k`
/// cannot be injective there.
pub fn comparison_ff_with(k: &PresentedFunctor, system: &RewriteSystem, limits: &Limits) -> Verdict<bool> {
    let p = k.domain();
    let b = k.codomain();
    let mut undecided = None;
    for x in 0..p.nodes().len() {
        for y in 0..p.nodes().len() {
            let (x, y) = (NodeId(x), NodeId(y));
            let hom = match hom_set_in(p, system, x, y, limits) {
                Verdict::Yes(hom) => hom,
                Verdict::No(w) => return Verdict::No(w),
                Verdict::Undecided(bound) => {
                    undecided.get_or_insert(bound);
                    continue;
                }
            };
            let (kx, ky) = (k.on_node(x), k.on_node(y));
            let failure = |collapsed, missed| {
                Verdict::No(Witness::NotFullyFaithful(HomFailure {
                    x: p.nodes()[x.0].clone(),
                    y: p.nodes()[y.0].clone(),
                    image_x: b.object_name(kx).to_string(),
                    image_y: b.object_name(ky).to_string(),
                    collapsed,
                    missed,
                }))
            };
            let mut seen: Vec<Option<&Path>> = vec![None; b.morphism_count()];
            for path in &hom {
                let image = k.evaluate(path);
                if let Some(prev) = seen[image.0] {
                    return failure(Some((p.path_name(prev), p.path_name(path))), None);
                }
                seen[image.0] = Some(path);
            }
            if let Some(&m) = b.hom(kx, ky).iter().find(|m| seen[m.0].is_none()) {
                return failure(None, Some(b.morphism_name(m).to_string()));
            }
        }
    }
    match undecided {
        Some(bound) => Verdict::Undecided(bound),
        None => Verdict::Yes(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::enumerate::find_isomorphism;
    use crate::kernel::higher_kernel;
    use crate::present::try_finitize;

    fn factor(p: &FinFunctor) -> CodescentFactorization {
        codescent_presentation(&higher_kernel(p).unwrap()).unwrap()
    }

    fn finitized(c: &CodescentFactorization) -> Finitization {
        try_finitize(&c.presentation, &Limits::default()).unwrap().yes().unwrap()
    }

    #[test]
    fn identity_on_arrow_gives_back_the_arrow() {
        let c = factor(&catalog::identity_on_arrow());
        assert!(c.check_factorization());
        let fin = finitized(&c);
        assert!(find_isomorphism(&Arc::new(fin.category.clone()), &Arc::new(catalog::arrow())).is_some());
        let k = c.comparison.on_finitization(&fin);
        assert!(k.is_equivalence());
        assert!(c.comparison_ff(&Limits::default()).holds());
    }

    #[test]
    fn discrete_to_point_is_chaotic() {
        let c = factor(&catalog::discrete_to_terminal());
        assert_eq!(c.presentation.nodes().len(), 2);
        assert_eq!(c.theta.len(), 4);
        let fin = finitized(&c);
        assert_eq!(fin.category.morphism_count(), 4);
        for x in fin.category.objects() {
            for y in fin.category.objects() {
                assert_eq!(fin.category.hom(x, y).len(), 1);
            }
        }
        assert!(c.comparison.on_finitization(&fin).is_equivalence());
        assert!(c.comparison_ff(&Limits::default()).holds());
    }

    #[test]
    fn arrow_to_point_inverts_the_arrow() {
        let c = factor(&catalog::arrow_to_terminal());
        let fin = finitized(&c);
        assert!(find_isomorphism(&Arc::new(fin.category.clone()), &Arc::new(catalog::iso_pair())).is_some());
        assert!(c.comparison.on_finitization(&fin).is_equivalence());
        // θ(0,1) = f in normal form
        let system = complete_rewriting(&c.presentation, &Limits::default());
        let theta01 = c.presentation.path("0", &["θ(0,1)"]);
        assert_eq!(system.normal_form(&theta01).unwrap(), c.presentation.path("0", &["f"]));
    }

    #[test]
    fn point_into_discrete_is_the_inclusion() {
        let c = factor(&catalog::point_into_discrete());
        let fin = finitized(&c);
        assert_eq!(fin.category.morphism_count(), 1);
        assert!(c.comparison_ff(&Limits::default()).holds());
    }

    #[test]
    fn thetas_are_invertible() {
        for (_, p) in catalog::curated() {
            let c = factor(&p);
            let system = complete_rewriting(&c.presentation, &Limits::default());
            let d = &c.diagram;
            for alpha in d.x1.category.objects() {
                let tuple = &d.x1.object_tuples[alpha.0];
                let reverse = d.x1.object_of(&[tuple[1], tuple[0]]).unwrap();
                let there_and_back = Path {
                    src: NodeId(tuple[0].0),
                    tgt: NodeId(tuple[0].0),
                    edges: vec![c.theta[alpha.0], c.theta[reverse.0]],
                };
                assert!(system.normal_form(&there_and_back).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn corrupted_comparison_is_caught() {
        let e = Arc::new(catalog::idempotent());
        let c = factor(&FinFunctor::identity(e.clone()));
        assert!(c.check_factorization());
        let mut images: Vec<MorId> = (0..c.presentation.generators().len())
            .map(|i| c.comparison.on_generator(GenId(i)))
            .collect();
        images[c.theta[0].0] = e.morphism_id("e").unwrap();
        let corrupted = CodescentFactorization {
            comparison: PresentedFunctor::new_unchecked(
                c.presentation.clone(),
                e.clone(),
                c.comparison.object_map.clone(),
                images,
            ),
            ..c.clone()
        };
        match corrupted.factorization_failure() {
            Some(FactorizationFailure::RelationNotRespected { family, left, right, .. }) => {
                assert_eq!(family, RelationKind::Unit);
                assert_eq!((left.as_str(), right.as_str()), ("e", "id"));
            }
            other => panic!("expected a violated unit relation, got {other:?}"),
        }
    }

    #[test]
    fn dropped_composite_relation_is_caught() {
        let p = FinFunctor::identity(Arc::new(catalog::idempotent()));
        let c = factor(&p);
        let kept: Vec<(Path, Path)> = c
            .presentation
            .relations()
            .iter()
            .zip(&c.relation_kinds)
            .filter(|(_, k)| **k != RelationKind::Composition)
            .map(|(r, _)| r.clone())
            .collect();
        let presentation = Presentation::new(
            c.presentation.nodes().to_vec(),
            c.presentation.generators().to_vec(),
            kept,
        )
        .unwrap();
        let corrupted = CodescentFactorization {
            comparison: PresentedFunctor::new_unchecked(
                presentation.clone(),
                c.comparison.codomain().clone(),
                c.comparison.object_map.clone(),
                c.comparison.generator_map.clone(),
            ),
            presentation,
            relation_kinds: vec![],
            ..c
        };
        assert_eq!(
            corrupted.factorization_failure(),
            Some(FactorizationFailure::PhiNotFunctorial {
                first: "e".into(),
                then: "e".into()
            })
        );
    }
}
