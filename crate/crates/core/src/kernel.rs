//! Strict pullbacks and the truncated simplicial kernel of a functor.
//!
//! For `p: e → b`, the kernel diagram has `X0 = e`, `X1 = e ×_b e` and
//! `X2 = e ×_b e ×_b e`. Faces drop one component:
//! `d0(u,v) = v`, `d1(u,v) = u`, and `∂i` drops the `i`-th entry of a triple.
//! Degeneracies repeat one: `s0(u) = (u,u)`, `σ0(u,v) = (u,u,v)`,
//! `σ1(u,v) = (u,v,v)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FunctorError};
use crate::fincat::{compose_functors, same_category, FinCategory, FinFunctor, MorId, ObjId};

/// Strict limit of a cospan of functors into a common codomain: tuples of
/// objects (resp. morphisms) with equal images, composed componentwise.
#[derive(Debug, Clone)]
pub struct FiberProduct {
    pub category: Arc<FinCategory>,
    pub object_tuples: Vec<Vec<ObjId>>,
    pub morphism_tuples: Vec<Vec<MorId>>,
    /// Projection onto each factor.
    pub projections: Vec<FinFunctor>,
    object_lookup: HashMap<Vec<ObjId>, ObjId>,
    morphism_lookup: HashMap<Vec<MorId>, MorId>,
}

impl FiberProduct {
    pub fn object_of(&self, tuple: &[ObjId]) -> Option<ObjId> {
        self.object_lookup.get(tuple).copied()
    }

    pub fn morphism_of(&self, tuple: &[MorId]) -> Option<MorId> {
        self.morphism_lookup.get(tuple).copied()
    }
}

/// Tuples `(t_1, …, t_k)` with `t_i` drawn from `fibers[i][c]`, for every
/// key `c` of the first factor, in lexicographic order.
fn tuples<T: Copy>(first: &[(T, usize)], fibers: &[Vec<Vec<T>>]) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for &(t, key) in first {
        let mut acc = vec![vec![t]];
        for fiber in fibers {
            let options = &fiber[key];
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |&o| {
                        let mut next = prefix.clone();
                        next.push(o);
                        next
                    })
                })
                .collect();
        }
        out.extend(acc);
    }
    out
}

fn tuple_name(parts: impl Iterator<Item = String>) -> String {
    format!("({})", parts.collect::<Vec<_>>().join(","))
}

/// Strict fiber product of functors sharing a codomain.
pub fn fiber_product(factors: &[&FinFunctor]) -> Result<FiberProduct, Error> {
    assert!(!factors.is_empty());
    let base = factors[0].codomain();
    if factors.iter().any(|f| !same_category(f.codomain(), base)) {
        return Err(FunctorError::CodomainMismatch.into());
    }
    let (bn, bm) = (base.object_count(), base.morphism_count());
    let obj_fibers: Vec<Vec<Vec<ObjId>>> = factors[1..]
        .iter()
        .map(|f| {
            let mut fib = vec![Vec::new(); bn];
            for x in f.domain().objects() {
                fib[f.on_object(x).0].push(x);
            }
            fib
        })
        .collect();
    let mor_fibers: Vec<Vec<Vec<MorId>>> = factors[1..]
        .iter()
        .map(|f| {
            let mut fib = vec![Vec::new(); bm];
            for m in f.domain().morphisms() {
                fib[f.on_morphism(m).0].push(m);
            }
            fib
        })
        .collect();
    let first = factors[0];
    let object_tuples = tuples(
        &first
            .domain()
            .objects()
            .map(|x| (x, first.on_object(x).0))
            .collect::<Vec<_>>(),
        &obj_fibers,
    );
    let morphism_tuples = tuples(
        &first
            .domain()
            .morphisms()
            .map(|m| (m, first.on_morphism(m).0))
            .collect::<Vec<_>>(),
        &mor_fibers,
    );
    let object_lookup: HashMap<Vec<ObjId>, ObjId> = object_tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), ObjId(i)))
        .collect();
    let morphism_lookup: HashMap<Vec<MorId>, MorId> = morphism_tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), MorId(i)))
        .collect();

    let objects = object_tuples
        .iter()
        .map(|t| {
            tuple_name(
                t.iter()
                    .zip(factors)
                    .map(|(&x, f)| f.domain().object_name(x).to_string()),
            )
        })
        .collect();
    let morphisms = morphism_tuples
        .iter()
        .map(|t| {
            let src: Vec<ObjId> = t.iter().zip(factors).map(|(&m, f)| f.domain().src(m)).collect();
            let tgt: Vec<ObjId> = t.iter().zip(factors).map(|(&m, f)| f.domain().tgt(m)).collect();
            (
                tuple_name(
                    t.iter()
                        .zip(factors)
                        .map(|(&m, f)| f.domain().morphism_name(m).to_string()),
                ),
                object_lookup[&src],
                object_lookup[&tgt],
            )
        })
        .collect();
    let identities = object_tuples
        .iter()
        .map(|t| {
            let ids: Vec<MorId> = t.iter().zip(factors).map(|(&x, f)| f.domain().identity(x)).collect();
            morphism_lookup[&ids]
        })
        .collect();
    let m = morphism_tuples.len();
    let mut table = vec![None; m * m];
    for (gi, g) in morphism_tuples.iter().enumerate() {
        for (fi, f) in morphism_tuples.iter().enumerate() {
            let composite: Option<Vec<MorId>> = g
                .iter()
                .zip(f)
                .zip(factors)
                .map(|((&gc, &fc), factor)| factor.domain().compose(gc, fc))
                .collect();
            if let Some(c) = composite {
                table[gi * m + fi] = Some(morphism_lookup[&c]);
            }
        }
    }
    let category = Arc::new(FinCategory::from_parts(objects, morphisms, identities, table)?);
    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            FinFunctor::new(
                category.clone(),
                f.domain().clone(),
                object_tuples.iter().map(|t| t[i]).collect(),
                morphism_tuples.iter().map(|t| t[i]).collect(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FiberProduct {
        category,
        object_tuples,
        morphism_tuples,
        projections,
        object_lookup,
        morphism_lookup,
    })
}

/// Strict pullback of `f` and `g`; the projections are `projections[0]`
/// and `projections[1]`.
pub fn pullback(f: &FinFunctor, g: &FinFunctor) -> Result<FiberProduct, Error> {
    fiber_product(&[f, g])
}

/// The truncated simplicial kernel of `p`.
#[derive(Debug, Clone)]
pub struct KernelPairDiagram {
    pub p: FinFunctor,
    pub x1: FiberProduct,
    pub x2: FiberProduct,
    /// `d0(u,v) = v`.
    pub d0: FinFunctor,
    /// `d1(u,v) = u`.
    pub d1: FinFunctor,
    pub s0: FinFunctor,
    /// `[∂0, ∂1, ∂2]`.
    pub faces: [FinFunctor; 3],
    /// `[σ0, σ1]`.
    pub degeneracies: [FinFunctor; 2],
}

impl KernelPairDiagram {
    pub fn x0(&self) -> &Arc<FinCategory> {
        self.p.domain()
    }
}

/// Map every tuple of `source` through `reindex` into a tuple of `target`.
fn reindexing(
    source: &FiberProduct,
    target: &FiberProduct,
    reindex: &dyn Fn(&[usize]) -> Vec<usize>,
) -> Result<FinFunctor, Error> {
    let objects = source
        .object_tuples
        .iter()
        .map(|t| {
            let picked: Vec<ObjId> = reindex(&t.iter().map(|x| x.0).collect::<Vec<_>>())
                .into_iter()
                .map(ObjId)
                .collect();
            target.object_of(&picked).expect("reindexed tuple lies in the fiber product")
        })
        .collect();
    let morphisms = source
        .morphism_tuples
        .iter()
        .map(|t| {
            let picked: Vec<MorId> = reindex(&t.iter().map(|x| x.0).collect::<Vec<_>>())
                .into_iter()
                .map(MorId)
                .collect();
            target.morphism_of(&picked).expect("reindexed tuple lies in the fiber product")
        })
        .collect();
    Ok(FinFunctor::new(
        source.category.clone(),
        target.category.clone(),
        objects,
        morphisms,
    )?)
}

/// Build the kernel diagram of `p` and verify the simplicial identities.
pub fn higher_kernel(p: &FinFunctor) -> Result<KernelPairDiagram, Error> {
    let x1 = fiber_product(&[p, p])?;
    let x2 = fiber_product(&[p, p, p])?;
    let d1 = x1.projections[0].clone();
    let d0 = x1.projections[1].clone();
    let x0 = p.domain();
    let s0 = FinFunctor::new(
        x0.clone(),
        x1.category.clone(),
        x0.objects().map(|x| x1.object_of(&[x, x]).unwrap()).collect(),
        x0.morphisms().map(|f| x1.morphism_of(&[f, f]).unwrap()).collect(),
    )?;
    let faces = [
        reindexing(&x2, &x1, &|t| vec![t[1], t[2]])?,
        reindexing(&x2, &x1, &|t| vec![t[0], t[2]])?,
        reindexing(&x2, &x1, &|t| vec![t[0], t[1]])?,
    ];
    let degeneracies = [
        reindexing(&x1, &x2, &|t| vec![t[0], t[0], t[1]])?,
        reindexing(&x1, &x2, &|t| vec![t[0], t[1], t[1]])?,
    ];
    let diagram = KernelPairDiagram {
        p: p.clone(),
        x1,
        x2,
        d0,
        d1,
        s0,
        faces,
        degeneracies,
    };
    if let Err(v) = validate_simplicial(&diagram) {
        return Err(Error::ConsistencyViolation(format!(
            "kernel diagram fails {}: {}",
            v.identity, v.at
        )));
    }
    Ok(diagram)
}

/// A failed simplicial identity with the first point where it fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialViolation {
    pub identity: String,
    pub at: String,
}

fn first_difference(a: &FinFunctor, b: &FinFunctor) -> Option<String> {
    let dom = a.domain();
    if let Some(x) = dom.objects().find(|&x| a.on_object(x) != b.on_object(x)) {
        return Some(format!("object {}", dom.object_name(x)));
    }
    dom.morphisms()
        .find(|&f| a.on_morphism(f) != b.on_morphism(f))
        .map(|f| format!("morphism {}", dom.morphism_name(f)))
}

/// Check every truncated simplicial identity, pointwise.
pub fn validate_simplicial(d: &KernelPairDiagram) -> Result<(), SimplicialViolation> {
    let compose = |g: &FinFunctor, f: &FinFunctor| {
        compose_functors(g, f).map_err(|e| SimplicialViolation {
            identity: "composability".into(),
            at: e.to_string(),
        })
    };
    let id0 = FinFunctor::identity(d.x0().clone());
    let id1 = FinFunctor::identity(d.x1.category.clone());
    let [f0, f1, f2] = &d.faces;
    let [g0, g1] = &d.degeneracies;
    let checks: Vec<(&str, FinFunctor, FinFunctor)> = vec![
        ("d0∘s0 = id", compose(&d.d0, &d.s0)?, id0.clone()),
        ("d1∘s0 = id", compose(&d.d1, &d.s0)?, id0),
        ("d0∘∂1 = d0∘∂0", compose(&d.d0, f1)?, compose(&d.d0, f0)?),
        ("d0∘∂2 = d1∘∂0", compose(&d.d0, f2)?, compose(&d.d1, f0)?),
        ("d1∘∂2 = d1∘∂1", compose(&d.d1, f2)?, compose(&d.d1, f1)?),
        ("∂0∘σ0 = id", compose(f0, g0)?, id1.clone()),
        ("∂1∘σ0 = id", compose(f1, g0)?, id1.clone()),
        ("∂1∘σ1 = id", compose(f1, g1)?, id1.clone()),
        ("∂2∘σ1 = id", compose(f2, g1)?, id1),
        ("∂0∘σ1 = s0∘d0", compose(f0, g1)?, compose(&d.s0, &d.d0)?),
        ("∂2∘σ0 = s0∘d1", compose(f2, g0)?, compose(&d.s0, &d.d1)?),
        ("σ0∘s0 = σ1∘s0", compose(g0, &d.s0)?, compose(g1, &d.s0)?),
        ("p∘d0 = p∘d1", compose(&d.p, &d.d0)?, compose(&d.p, &d.d1)?),
    ];
    for (identity, left, right) in checks {
        if let Some(at) = first_difference(&left, &right) {
            return Err(SimplicialViolation {
                identity: identity.to_string(),
                at,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::enumerate::find_isomorphism;

    #[test]
    fn pullback_of_identities_is_diagonal() {
        let c = Arc::new(catalog::iso_pair());
        let id = FinFunctor::identity(c.clone());
        let pb = pullback(&id, &id).unwrap();
        assert!(find_isomorphism(&pb.category, &c).is_some());
        assert!(pb.projections[0].is_equivalence());
    }

    #[test]
    fn pullback_counts() {
        let p = catalog::discrete_to_terminal();
        let pb = pullback(&p, &p).unwrap();
        assert_eq!((pb.category.object_count(), pb.category.morphism_count()), (4, 4));
        let p = catalog::arrow_to_terminal();
        let pb = pullback(&p, &p).unwrap();
        assert_eq!((pb.category.object_count(), pb.category.morphism_count()), (4, 9));
        // 𝟚 × 𝟚 is not discrete: (f, f) is a morphism (0,0) → (1,1)
        let ff = pb.category.morphism_id("(f,f)").unwrap();
        assert_eq!(pb.category.object_name(pb.category.tgt(ff)), "(1,1)");
    }

    #[test]
    fn pullback_rejects_different_codomains() {
        let err = pullback(&catalog::arrow_to_terminal(), &catalog::point_into_iso()).unwrap_err();
        assert!(matches!(err, Error::Functor(FunctorError::CodomainMismatch)));
    }

    #[test]
    fn kernel_of_identity() {
        let d = higher_kernel(&catalog::identity_on_arrow()).unwrap();
        assert!(d.s0.is_equivalence());
        assert_eq!(d.x1.category.morphism_count(), 3);
    }

    #[test]
    fn kernel_of_discrete_collapse() {
        let d = higher_kernel(&catalog::discrete_to_terminal()).unwrap();
        assert_eq!(d.x1.category.object_count(), 4);
        assert_eq!(d.x2.category.object_count(), 8);
        assert_eq!(d.x2.category.morphism_count(), 8);
    }

    #[test]
    fn kernel_of_injective_functor() {
        let d = higher_kernel(&catalog::point_into_discrete()).unwrap();
        assert_eq!(d.x1.category.object_count(), 1);
        assert_eq!(d.x2.category.morphism_count(), 1);
        assert!(d.s0.is_equivalence());
    }

    #[test]
    fn face_conventions() {
        let d = higher_kernel(&catalog::discrete_to_terminal()).unwrap();
        let x1 = &d.x1.category;
        let ab = x1.object_id("(a,b)").unwrap();
        assert_eq!(d.x0().object_name(d.d0.on_object(ab)), "b");
        assert_eq!(d.x0().object_name(d.d1.on_object(ab)), "a");
        let x2 = &d.x2.category;
        let abb = x2.object_id("(a,b,b)").unwrap();
        let names: Vec<&str> = d.faces.iter().map(|f| x1.object_name(f.on_object(abb))).collect();
        assert_eq!(names, ["(b,b)", "(a,b)", "(a,b)"]);
    }

    #[test]
    fn corrupted_degeneracy_is_caught() {
        let mut d = higher_kernel(&catalog::discrete_to_terminal()).unwrap();
        assert!(validate_simplicial(&d).is_ok());
        let x1 = d.x1.category.clone();
        let (ab, bb) = (x1.object_id("(a,b)").unwrap(), x1.object_id("(b,b)").unwrap());
        d.s0 = FinFunctor::new(
            d.x0().clone(),
            x1.clone(),
            vec![ab, bb],
            vec![x1.identity(ab), x1.identity(bb)],
        )
        .unwrap();
        let v = validate_simplicial(&d).unwrap_err();
        assert_eq!(v.identity, "d0∘s0 = id");
        assert_eq!(v.at, "object a");
    }
}
