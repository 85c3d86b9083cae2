//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails the
//! run if any criterion fails.

use std::ops::ControlFlow;
use std::sync::Arc;
use std::time::{Duration, Instant};

use descent_core::catalog;
use descent_core::cauchy::{cauchy_map_between, karoubi_envelope};
use descent_core::corpus::{random_functors, run_corpus, CorpusOptions, CorpusSummary};
use descent_core::descent::oracle::{oracle_consistency, oracle_lan_ff_probe, OracleOptions};
use descent_core::descent::DescentEngine;
use descent_core::enumerate::{enumerate_categories, find_isomorphism, for_each_functor};
use descent_core::kernel::higher_kernel;
use descent_core::laxepi::is_lax_epimorphism;
use descent_core::present::{complete_rewriting, try_finitize, Limits, Presentation};
use descent_core::verdict::Verdict;
use descent_core::{FinCategory, FinFunctor};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// Tallies of the Cauchy routes for `p`.
#[derive(Default)]
struct CauchyTally {
    functors: usize,
    equivalence_failures: usize,
    lax_failures: usize,
    ff_failures: usize,
}

impl CauchyTally {
    fn visit(&mut self, p: &FinFunctor, dom: &descent_core::cauchy::KaroubiEnvelope, cod: &descent_core::cauchy::KaroubiEnvelope) {
        let cp = cauchy_map_between(p, dom, cod);
        let (ff, lax) = (p.is_fully_faithful(), is_lax_epimorphism(p));
        self.functors += 1;
        self.equivalence_failures += (cp.is_equivalence() != (ff && lax)) as usize;
        self.lax_failures += (is_lax_epimorphism(&cp) != lax) as usize;
        self.ff_failures += (cp.is_fully_faithful() != ff) as usize;
    }
}

/// Criteria 1 and 2 over the exhaustive and random corpus.
fn cauchy_routes() -> (CauchyTally, Duration) {
    let start = Instant::now();
    let mut tally = CauchyTally::default();
    let cats: Vec<Arc<FinCategory>> = enumerate_categories(2, 5).into_iter().map(Arc::new).collect();
    let envelopes: Vec<_> = cats.iter().map(|c| karoubi_envelope(c.clone())).collect();
    for (a, ka) in cats.iter().zip(&envelopes) {
        for (b, kb) in cats.iter().zip(&envelopes) {
            let _ = for_each_functor(a, b, |p| {
                tally.visit(&p, ka, kb);
                ControlFlow::Continue(())
            });
        }
    }
    for p in random_functors(0, 500, 3, 8) {
        let (ka, kb) = (karoubi_envelope(p.domain().clone()), karoubi_envelope(p.codomain().clone()));
        tally.visit(&p, &ka, &kb);
    }
    (tally, start.elapsed())
}

fn criterion_1(t: &CauchyTally, elapsed: Duration) -> Outcome {
    outcome(
        t.equivalence_failures == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{} functors, {} disagreements on ff and lax epi vs Cauchy(p) equivalence, {}",
            t.functors,
            t.equivalence_failures,
            secs(elapsed)
        ),
    )
}

fn criterion_2(t: &CauchyTally) -> Outcome {
    outcome(
        t.lax_failures == 0 && t.ff_failures == 0,
        format!(
            "{} functors, {} lax epi and {} ff disagreements with Cauchy(p)",
            t.functors, t.lax_failures, t.ff_failures
        ),
    )
}

fn criterion_3(s: &CorpusSummary) -> Outcome {
    let k = s.invariant("K ff and lax epi iff Cauchy(K) equivalence").unwrap();
    let r = s.invariant("report cross-checks").unwrap();
    let f = &s.finitization;
    outcome(
        k.failed == 0 && r.failed == 0 && f.undecided_fraction < 0.2,
        format!(
            "{} finitized cases, {} disagreements, {} infinite, undecided fraction {:.4}",
            k.checked, k.failed, f.infinite, f.undecided_fraction
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut engine = DescentEngine::new(Limits::default());
    let mut wrong = Vec::new();
    for (name, p) in catalog::curated() {
        let r = match engine.report(&p) {
            Ok(r) => r,
            Err(e) => {
                wrong.push(format!("{name}: {e}"));
                continue;
            }
        };
        let ok = match name {
            "1 -> D2" => !r.descent_set,
            "1 -> E" => !r.lax_epi.holds() && !r.cauchy_equiv,
            _ => r.effective_descent_set == Verdict::Yes(true),
        };
        if !ok {
            wrong.push(name.to_string());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        wrong.is_empty() && elapsed < Duration::from_secs(5),
        format!("6 curated functors, wrong: {:?}, {}", wrong, secs(elapsed)),
    )
}

fn criterion_5(s: &CorpusSummary) -> Outcome {
    let names = [
        "Karoubi unit fully faithful",
        "Karoubi completion splits idempotents",
        "double completion unit equivalence",
    ];
    let failed: usize = names.iter().map(|n| s.invariant(n).unwrap().failed).sum();
    let k = karoubi_envelope(Arc::new(catalog::idempotent()));
    let c = &k.completion;
    let x_id = c.object_id("(x;id)").unwrap();
    let e_ok = c.object_count() == 2 && c.morphism_count() == 5 && c.hom(x_id, x_id).len() == 2;
    outcome(
        failed == 0 && e_ok,
        format!(
            "{} categories, {} failures; Karoubi(E): {} objects, {} morphisms, |hom((x;id),(x;id))| = {}",
            s.categories,
            failed,
            c.object_count(),
            c.morphism_count(),
            c.hom(x_id, x_id).len()
        ),
    )
}

fn criterion_6(s: &CorpusSummary) -> Outcome {
    let e = Arc::new(catalog::idempotent());
    let pres = Presentation::from_category(&e);
    let limits = Limits::default();
    let system = complete_rewriting(&pres, &limits);
    let mut forms: Vec<String> = match try_finitize(&pres, &limits) {
        Ok(Verdict::Yes(fin)) => {
            let iso = find_isomorphism(&Arc::new(fin.category.clone()), &e).is_some();
            let mut names: Vec<String> = fin.normal_forms.iter().map(|nf| pres.path_name(nf)).collect();
            if !iso {
                names.push("not isomorphic to E".into());
            }
            names
        }
        other => vec![format!("finitization failed: {}", other.map(|v| v.label()).unwrap_or("error"))],
    };
    forms.sort();
    let round_trip = s.invariant("finitization round trip").unwrap();
    let e_ok = system.is_complete() && forms == ["e", "id[x]"];
    outcome(
        e_ok && round_trip.failed == 0,
        format!(
            "E normal forms {:?}; round trip on {} categories, {} failures",
            forms, round_trip.checked, round_trip.failed
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let options = OracleOptions::default();
    let mut problems = Vec::new();
    for (name, p) in catalog::curated() {
        let expected_ff = matches!(name, "id on 2" | "1 -> I" | "1 -> D2");
        if p.is_fully_faithful() != expected_ff {
            problems.push(format!("{name}: unexpected ff classification"));
        }
        match oracle_lan_ff_probe(&p, 2, options.cap) {
            Verdict::Yes(true) if expected_ff => {}
            Verdict::No(_) if !expected_ff => {}
            v => problems.push(format!("{name}: Lan probe {}", v.label())),
        }
        let report = DescentEngine::new(Limits::default()).report(&p);
        let consistency = report.and_then(|r| oracle_consistency(&higher_kernel(&p)?, &r, &options));
        match consistency {
            Ok(Verdict::Yes(true)) => {}
            Ok(v) => problems.push(format!("{name}: consistency {}", v.label())),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        problems.is_empty() && elapsed < Duration::from_secs(120),
        format!("bound 2, problems: {:?}, {}", problems, secs(elapsed)),
    )
}

fn criterion_8() -> Outcome {
    let options = CorpusOptions::default();
    let a = serde_json::to_string_pretty(&run_corpus(&options)).unwrap();
    let b = serde_json::to_string_pretty(&run_corpus(&options)).unwrap();
    outcome(a == b, format!("default corpus twice, {} bytes each, identical: {}", a.len(), a == b))
}

fn main() {
    let (tally, elapsed) = cauchy_routes();
    let summary = run_corpus(&CorpusOptions {
        exhaustive: Some((2, 5)),
        ..CorpusOptions::default()
    });
    let results = [
        criterion_1(&tally, elapsed),
        criterion_2(&tally),
        criterion_3(&summary),
        criterion_4(),
        criterion_5(&summary),
        criterion_6(&summary),
        criterion_7(),
        criterion_8(),
    ];
    let mut all = true;
    for (i, r) in results.iter().enumerate() {
        println!("criterion {}: {} ({})", i + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
        all &= r.pass;
    }
    if !all {
        std::process::exit(1);
    }
}
