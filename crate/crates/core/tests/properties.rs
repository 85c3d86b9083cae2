//! Randomized invariants over small seeded categories and functors.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use descent_core::cauchy::{cauchy_map, karoubi_envelope, cauchy_map_between};
use descent_core::codescent::codescent_presentation;
use descent_core::corpus::random_functor;
use descent_core::descent::DescentEngine;
use descent_core::enumerate::{all_functors, random_category};
use descent_core::fincat::{RawCategory, RawFunctor, RawMorphism};
use descent_core::format::{category_to_json, emit, functor_to_json, parse_category, parse_functor, CategorySource};
use descent_core::kernel::{higher_kernel, validate_simplicial};
use descent_core::laxepi::is_lax_epimorphism;
use descent_core::present::{complete_rewriting, GenId, Limits, NodeId, Path, Presentation};
use descent_core::{compose_functors, validate_category, FinCategory, FinFunctor};

fn category(seed: u64, objects: usize, morphisms: usize) -> Arc<FinCategory> {
    Arc::new(random_category(&mut ChaCha8Rng::seed_from_u64(seed), objects, morphisms))
}

fn functor(seed: u64) -> FinFunctor {
    random_functor(&mut ChaCha8Rng::seed_from_u64(seed), 3, 6)
}

/// Same category with renamed, reordered objects and morphisms.
fn relabel_raw(raw: &RawCategory) -> RawCategory {
    let r = |s: &String| format!("r.{s}");
    RawCategory {
        objects: raw.objects.iter().rev().map(r).collect(),
        morphisms: raw
            .morphisms
            .iter()
            .rev()
            .map(|m| RawMorphism {
                id: r(&m.id),
                src: r(&m.src),
                tgt: r(&m.tgt),
            })
            .collect(),
        identities: raw.identities.iter().map(|(k, v)| (r(k), r(v))).collect(),
        composition: raw.composition.iter().rev().map(|t| t.clone().map(|s| r(&s))).collect(),
    }
}

fn relabel(p: &FinFunctor) -> FinFunctor {
    let dom = Arc::new(validate_category(&relabel_raw(&p.domain().to_raw())).unwrap());
    let cod = Arc::new(validate_category(&relabel_raw(&p.codomain().to_raw())).unwrap());
    let raw = p.to_raw();
    let r = |m: &BTreeMap<String, String>| m.iter().map(|(k, v)| (format!("r.{k}"), format!("r.{v}"))).collect();
    let maps = RawFunctor {
        object_map: r(&raw.object_map),
        morphism_map: r(&raw.morphism_map),
    };
    FinFunctor::from_raw(dom, cod, &maps).unwrap()
}

/// A random composable path of generators of `Presentation::from_category`.
fn random_path(c: &FinCategory, rng: &mut impl Rng, len: usize) -> Path {
    let start = c.objects().nth(rng.gen_range(0..c.object_count())).unwrap();
    let mut at = start;
    let mut edges = Vec::new();
    for _ in 0..len {
        let out: Vec<_> = c.out_of(at).copied().collect();
        let f = out[rng.gen_range(0..out.len())];
        edges.push(GenId(f.0));
        at = c.tgt(f);
    }
    Path {
        src: NodeId(start.0),
        tgt: NodeId(at.0),
        edges,
    }
}

fn evaluate(c: &FinCategory, path: &Path) -> descent_core::MorId {
    path.edges
        .iter()
        .fold(c.identity(descent_core::ObjId(path.src.0)), |acc, g| c.then(acc, descent_core::MorId(g.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn category_documents_round_trip(seed in any::<u64>()) {
        let c = category(seed, 3, 7);
        let text = emit(&category_to_json(&c));
        let raw = parse_category(&text).unwrap();
        prop_assert_eq!(&raw, &c.to_raw());
        prop_assert_eq!(validate_category(&raw).unwrap().to_raw(), raw);
    }

    #[test]
    fn functor_documents_round_trip(seed in any::<u64>()) {
        let p = functor(seed);
        let file = parse_functor(&emit(&functor_to_json(&p))).unwrap();
        let (CategorySource::Inline(d), CategorySource::Inline(c)) = (&file.domain, &file.codomain) else {
            panic!("emitted functors embed their categories");
        };
        let q = FinFunctor::from_raw(
            Arc::new(validate_category(d).unwrap()),
            Arc::new(validate_category(c).unwrap()),
            &file.maps,
        ).unwrap();
        prop_assert_eq!(q.object_map(), p.object_map());
        prop_assert_eq!(q.morphism_map(), p.morphism_map());
    }

    #[test]
    fn verdicts_ignore_names_and_order(seed in any::<u64>()) {
        let p = functor(seed);
        let q = relabel(&p);
        prop_assert_eq!(p.is_fully_faithful(), q.is_fully_faithful());
        prop_assert_eq!(is_lax_epimorphism(&p), is_lax_epimorphism(&q));
        prop_assert_eq!(cauchy_map(&p).is_equivalence(), cauchy_map(&q).is_equivalence());
        let limits = Limits::default();
        let (a, b) = (
            DescentEngine::new(limits).report(&p).unwrap(),
            DescentEngine::new(limits).report(&q).unwrap(),
        );
        prop_assert_eq!(a.descent_set, b.descent_set);
        prop_assert_eq!(a.effective_descent_set.label(), b.effective_descent_set.label());
        prop_assert_eq!(a.codescent.finitization.label(), b.codescent.finitization.label());
    }

    #[test]
    fn normal_forms_decide_the_word_problem(seed in any::<u64>()) {
        let c = category(seed, 3, 7);
        let pres = Presentation::from_category(&c);
        let system = complete_rewriting(&pres, &Limits::default());
        prop_assert!(system.is_complete());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let paths: Vec<Path> = (0..12).map(|i| random_path(&c, &mut rng, i % 5)).collect();
        for u in &paths {
            let nu = system.normal_form(u).unwrap();
            prop_assert_eq!(&system.normal_form(&nu).unwrap(), &nu);
            prop_assert!(nu.len() <= 1);
            prop_assert_eq!(evaluate(&c, &nu), evaluate(&c, u));
            for v in &paths {
                let same = (u.src, u.tgt) == (v.src, v.tgt) && evaluate(&c, u) == evaluate(&c, v);
                prop_assert_eq!(same, nu == system.normal_form(v).unwrap());
            }
        }
    }

    #[test]
    fn cauchy_completion_is_functorial(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Arc::new(random_category(&mut rng, 2, 4));
        let b = Arc::new(random_category(&mut rng, 2, 4));
        let c = Arc::new(random_category(&mut rng, 2, 4));
        let fs = all_functors(&a, &b);
        let gs = all_functors(&b, &c);
        let f = &fs[rng.gen_range(0..fs.len())];
        let g = &gs[rng.gen_range(0..gs.len())];
        let (ka, kb, kc) = (karoubi_envelope(a), karoubi_envelope(b), karoubi_envelope(c));
        let composite = cauchy_map_between(&compose_functors(g, f).unwrap(), &ka, &kc);
        let (cf, cg) = (cauchy_map_between(f, &ka, &kb), cauchy_map_between(g, &kb, &kc));
        let separate = compose_functors(&cg, &cf).unwrap();
        prop_assert_eq!(composite.object_map(), separate.object_map());
        prop_assert_eq!(composite.morphism_map(), separate.morphism_map());
    }

    #[test]
    fn lax_epimorphisms_compose(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Arc::new(random_category(&mut rng, 2, 4));
        let b = Arc::new(random_category(&mut rng, 2, 4));
        let c = Arc::new(random_category(&mut rng, 2, 4));
        for f in all_functors(&a, &b).iter().filter(|f| is_lax_epimorphism(f)) {
            for g in all_functors(&b, &c).iter().filter(|g| is_lax_epimorphism(g)) {
                prop_assert!(is_lax_epimorphism(&compose_functors(g, f).unwrap()));
            }
        }
    }

    #[test]
    fn kernels_are_simplicial_and_factor(seed in any::<u64>()) {
        let p = functor(seed);
        let d = higher_kernel(&p).unwrap();
        prop_assert!(validate_simplicial(&d).is_ok());
        let factorization = codescent_presentation(&d).unwrap();
        prop_assert!(factorization.factorization_failure().is_none());
    }

    #[test]
    fn cauchy_and_descent_routes_agree(seed in any::<u64>()) {
        let p = functor(seed);
        let cp = cauchy_map(&p);
        let (ff, lax) = (p.is_fully_faithful(), is_lax_epimorphism(&p));
        prop_assert_eq!(cp.is_equivalence(), ff && lax);
        prop_assert_eq!(cp.is_fully_faithful(), ff);
        prop_assert_eq!(is_lax_epimorphism(&cp), lax);
        let r = DescentEngine::new(Limits::default()).report(&p).unwrap();
        // effective descent implies descent
        prop_assert!(!r.effective_descent_set.holds() || r.descent_set);
        // equivalences are of effective descent
        if ff && lax {
            prop_assert!(r.effective_descent_set.holds());
        }
    }
}
