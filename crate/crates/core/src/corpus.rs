//! Corpus runs: every cross-route invariant over curated, exhaustive and
//! random functors, summarized deterministically.

use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::cauchy::{karoubi_envelope, non_split_idempotent};
use crate::descent::DescentEngine;
use crate::enumerate::{enumerate_categories, find_isomorphism, for_each_functor, full_subcategory, random_category};
use crate::fincat::{FinCategory, FinFunctor, ObjId};
use crate::format::{category_to_json, functor_to_json};
use crate::laxepi::is_lax_epimorphism;
use crate::present::{try_finitize, Limits, Presentation};
use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Functors of descent whose effective descent is not established.
    DescentNotEffective,
}

impl FromStr for SearchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "descent-not-effective" => Ok(SearchMode::DescentNotEffective),
            other => Err(format!("unknown search mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusOptions {
    pub curated: bool,
    /// `(max objects, max morphisms)` of the exhaustive sweep.
    pub exhaustive: Option<(usize, usize)>,
    pub random: usize,
    pub random_max_objects: usize,
    pub random_max_morphisms: usize,
    pub seed: u64,
    pub limits: Limits,
    pub search: Option<SearchMode>,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            curated: true,
            exhaustive: None,
            random: 500,
            random_max_objects: 3,
            random_max_morphisms: 8,
            seed: 0,
            limits: Limits::default(),
            search: None,
        }
    }
}

/// Names of the checked invariants, in report order.
pub const INVARIANTS: [&str; 11] = [
    "ff and lax epi iff Cauchy(p) equivalence",
    "lax epi iff Cauchy(p) lax epi",
    "ff iff Cauchy(p) ff",
    "report cross-checks",
    "descent iff K lax epi",
    "K ff and lax epi iff Cauchy(K) equivalence",
    "Karoubi unit fully faithful",
    "Karoubi completion splits idempotents",
    "double completion unit equivalence",
    "finitization round trip",
    "Cauchy completion functorial on identities",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantTally {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorCounts {
    pub curated: usize,
    pub exhaustive: usize,
    pub random: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FinitizationTally {
    pub finite: usize,
    pub infinite: usize,
    pub undecided: usize,
    pub undecided_fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictTally {
    pub fully_faithful: usize,
    pub lax_epi: usize,
    pub descent: usize,
    pub effective_yes: usize,
    pub effective_no: usize,
    pub effective_undecided: usize,
}

/// A functor that broke an invariant, the smallest one seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub invariant: String,
    pub detail: String,
    pub subject: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub source: String,
    pub effective: String,
    pub functor: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub options: CorpusOptions,
    pub categories: usize,
    pub functors: FunctorCounts,
    pub invariants: Vec<InvariantTally>,
    pub finitization: FinitizationTally,
    pub verdicts: VerdictTally,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub findings: Option<Vec<Finding>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl CorpusSummary {
    pub fn passed(&self) -> bool {
        self.invariants.iter().all(|t| t.failed == 0)
    }

    pub fn invariant(&self, name: &str) -> Option<&InvariantTally> {
        self.invariants.iter().find(|t| t.name == name)
    }
}

/// Findings beyond this many are counted but not listed.
const MAX_FINDINGS: usize = 25;

struct Runner {
    engine: DescentEngine,
    tallies: Vec<InvariantTally>,
    counterexample: Option<(usize, Counterexample)>,
    finitization: FinitizationTally,
    verdicts: VerdictTally,
    search: Option<SearchMode>,
    findings: Vec<Finding>,
}

impl Runner {
    fn record(&mut self, invariant: usize, ok: bool, size: usize, detail: impl FnOnce() -> (String, serde_json::Value)) {
        let tally = &mut self.tallies[invariant];
        tally.checked += 1;
        if ok {
            return;
        }
        tally.failed += 1;
        if self.counterexample.as_ref().is_none_or(|(s, _)| size < *s) {
            let (detail, subject) = detail();
            self.counterexample = Some((
                size,
                Counterexample {
                    invariant: INVARIANTS[invariant].to_string(),
                    detail,
                    subject,
                },
            ));
        }
    }

    fn functor(&mut self, p: &FinFunctor, source: &str) {
        let size = p.domain().morphism_count() + p.codomain().morphism_count();
        let subject = || functor_to_json(p);
        let ff = p.is_fully_faithful();
        let lax = is_lax_epimorphism(p);
        let cp = self.engine.cauchy_map(p);
        let equiv = cp.is_equivalence();
        self.record(0, equiv == (ff && lax), size, || {
            (format!("ff = {ff}, lax epi = {lax}, Cauchy(p) equivalence = {equiv}"), subject())
        });
        let cp_lax = is_lax_epimorphism(&cp);
        self.record(1, cp_lax == lax, size, || {
            (format!("lax epi = {lax}, Cauchy(p) lax epi = {cp_lax}"), subject())
        });
        let cp_ff = cp.is_fully_faithful();
        self.record(2, cp_ff == ff, size, || (format!("ff = {ff}, Cauchy(p) ff = {cp_ff}"), subject()));
        self.verdicts.fully_faithful += ff as usize;
        self.verdicts.lax_epi += lax as usize;

        let report = self.engine.report(p);
        let message = report.as_ref().err().map(|e| e.to_string());
        self.record(3, report.is_ok(), size, || (message.unwrap_or_default(), subject()));
        let Ok(r) = report else { return };
        self.record(4, r.descent_set == r.comparison_lax_epi.holds(), size, || {
            ("descent verdict differs from the lax epi verdict for K".into(), subject())
        });
        match &r.codescent.finitization {
            Verdict::Yes(_) => {
                self.finitization.finite += 1;
                let k_route = r.comparison_lax_epi.holds() && r.comparison_ff.holds();
                let cauchy = r.comparison_cauchy_equiv;
                self.record(5, cauchy == Some(k_route), size, || {
                    (format!("K ff and lax epi = {k_route}, Cauchy(K) equivalence = {cauchy:?}"), subject())
                });
            }
            Verdict::No(_) => self.finitization.infinite += 1,
            Verdict::Undecided(_) => self.finitization.undecided += 1,
        }
        self.verdicts.descent += r.descent_set as usize;
        match &r.effective_descent_set {
            Verdict::Yes(_) => self.verdicts.effective_yes += 1,
            Verdict::No(_) => self.verdicts.effective_no += 1,
            Verdict::Undecided(_) => self.verdicts.effective_undecided += 1,
        }
        if self.search == Some(SearchMode::DescentNotEffective)
            && r.descent_set
            && !r.effective_descent_set.holds()
            && self.findings.len() < MAX_FINDINGS
        {
            self.findings.push(Finding {
                source: source.to_string(),
                effective: r.effective_descent_set.label().to_string(),
                functor: subject(),
            });
        }
    }

    fn category(&mut self, c: &Arc<FinCategory>) {
        let size = c.morphism_count();
        let subject = || category_to_json(c);
        let k = self.engine.karoubi(c);
        self.record(6, k.unit.is_fully_faithful(), size, || ("unit is not fully faithful".into(), subject()));
        let split = non_split_idempotent(&k.completion);
        self.record(7, split.is_none(), size, || {
            (format!("idempotent {:?} of the completion does not split", split), subject())
        });
        let double = karoubi_envelope(k.completion.clone());
        self.record(8, double.unit.is_equivalence(), size, || {
            ("unit of the double completion is not an equivalence".into(), subject())
        });
        let round_trip = match try_finitize(&Presentation::from_category(c), self.engine.limits()) {
            Ok(Verdict::Yes(fin)) => find_isomorphism(&Arc::new(fin.category), c).is_some(),
            _ => false,
        };
        self.record(9, round_trip, size, || ("finitized presentation is not isomorphic".into(), subject()));
        let id = FinFunctor::identity(c.clone());
        let cid = self.engine.cauchy_map(&id);
        let is_identity = cid.object_map().iter().enumerate().all(|(i, x)| x.0 == i)
            && cid.morphism_map().iter().enumerate().all(|(i, m)| m.0 == i);
        self.record(10, is_identity, size, || ("Cauchy(id) is not the identity".into(), subject()));
    }
}

/// A random functor between random categories; a third of the samples are
/// inclusions of full subcategories.
pub fn random_functor(rng: &mut impl Rng, max_objects: usize, max_morphisms: usize) -> FinFunctor {
    let cod = Arc::new(random_category(rng, max_objects, max_morphisms));
    if rng.gen_range(0..3) == 0 {
        let mut keep: Vec<ObjId> = cod.objects().filter(|_| rng.gen_bool(0.5)).collect();
        if keep.is_empty() {
            keep.push(ObjId(rng.gen_range(0..cod.object_count())));
        }
        return full_subcategory(&cod, &keep);
    }
    let dom = Arc::new(random_category(rng, max_objects, max_morphisms));
    // sample from the first few thousand functors in enumeration order
    let mut pool = Vec::new();
    let _ = for_each_functor(&dom, &cod, |f| {
        pool.push(f);
        if pool.len() >= 4096 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    pool.choose(rng).expect("constant functors always exist").clone()
}

/// Seeded random functors, reproducible from `seed`.
pub fn random_functors(seed: u64, count: usize, max_objects: usize, max_morphisms: usize) -> Vec<FinFunctor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_functor(&mut rng, max_objects, max_morphisms))
        .collect()
}

pub fn run_corpus(options: &CorpusOptions) -> CorpusSummary {
    let mut runner = Runner {
        engine: DescentEngine::new(options.limits),
        tallies: INVARIANTS
            .iter()
            .map(|name| InvariantTally {
                name: name.to_string(),
                checked: 0,
                failed: 0,
            })
            .collect(),
        counterexample: None,
        finitization: FinitizationTally::default(),
        verdicts: VerdictTally::default(),
        search: options.search,
        findings: Vec::new(),
    };
    let mut counts = FunctorCounts::default();
    let mut categories = 0;

    if options.curated {
        for (name, p) in catalog::curated() {
            runner.functor(&p, name);
            counts.curated += 1;
        }
    }
    if let Some((max_objects, max_morphisms)) = options.exhaustive {
        let cats: Vec<Arc<FinCategory>> = enumerate_categories(max_objects, max_morphisms)
            .into_iter()
            .map(Arc::new)
            .collect();
        for c in &cats {
            runner.category(c);
        }
        categories += cats.len();
        for a in &cats {
            for b in &cats {
                let _ = for_each_functor(a, b, |p| {
                    runner.functor(&p, "exhaustive");
                    counts.exhaustive += 1;
                    ControlFlow::Continue(())
                });
            }
        }
    }
    for p in random_functors(
        options.seed,
        options.random,
        options.random_max_objects,
        options.random_max_morphisms,
    ) {
        runner.category(p.domain());
        runner.category(p.codomain());
        categories += 2;
        runner.functor(&p, "random");
        counts.random += 1;
    }
    counts.total = counts.curated + counts.exhaustive + counts.random;

    let examined = runner.finitization.finite + runner.finitization.infinite + runner.finitization.undecided;
    runner.finitization.undecided_fraction = if examined == 0 {
        0.0
    } else {
        runner.finitization.undecided as f64 / examined as f64
    };
    CorpusSummary {
        options: options.clone(),
        categories,
        functors: counts,
        invariants: runner.tallies,
        finitization: runner.finitization,
        verdicts: runner.verdicts,
        findings: options.search.map(|_| runner.findings),
        counterexample: runner.counterexample.map(|(_, c)| c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_functors_are_reproducible() {
        let a = random_functors(7, 20, 3, 8);
        let b = random_functors(7, 20, 3, 8);
        for (f, g) in a.iter().zip(&b) {
            assert_eq!(functor_to_json(f), functor_to_json(g));
            assert!(f.domain().object_count() <= 3 && f.codomain().morphism_count() <= 8);
        }
    }

    #[test]
    fn small_run_passes() {
        let summary = run_corpus(&CorpusOptions {
            random: 30,
            exhaustive: Some((1, 3)),
            search: Some(SearchMode::DescentNotEffective),
            ..CorpusOptions::default()
        });
        assert!(summary.passed(), "{:?}", summary.counterexample);
        assert_eq!(summary.functors.curated, 6);
        assert_eq!(summary.functors.random, 30);
        assert!(summary.findings.is_some());
    }

    #[test]
    fn search_mode_parses() {
        assert_eq!("descent-not-effective".parse(), Ok(SearchMode::DescentNotEffective));
        assert!("other".parse::<SearchMode>().is_err());
    }
}
