//! Descent verdicts for a functor `p: e → b`.
//!
//! `p` is of `CAT(−,Set)`-descent exactly when the comparison
//! `K: CoDesc(p) → b` is a lax epimorphism, and of effective descent when
//! `K` is moreover fully faithful. The report carries both, the direct
//! properties of `p`, and several redundant routes to the same answers; any
//! disagreement between routes is reported as
//! [`Error::ConsistencyViolation`].

pub mod oracle;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cauchy::{cauchy_map_between, karoubi_envelope, KaroubiEnvelope};
use crate::codescent::{codescent_presentation, comparison_ff_with, PresentedFunctor};
use crate::error::Error;
use crate::fincat::{FinCategory, FinFunctor, MorId};
use crate::kernel::higher_kernel;
use crate::laxepi::{lax_epimorphism_failure, lax_epimorphism_failure_presented};
use crate::present::{try_finitize_with, complete_rewriting, CompletionStatus, Finitization, Limits, Presentation, RewriteSystem};
use crate::verdict::{Verdict, Witness};

use oracle::{oracle_descent_category, oracle_lan_ff_probe, consistency_of, OracleOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub objects: usize,
    pub morphisms: usize,
}

impl SizeSummary {
    fn of(c: &FinCategory) -> Self {
        SizeSummary {
            objects: c.object_count(),
            morphisms: c.morphism_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodescentSummary {
    pub nodes: usize,
    pub generators: usize,
    pub relations: usize,
    /// Rules of the completed (or abandoned) rewriting system.
    pub rules: usize,
    pub completion: CompletionStatus,
    /// Size of `CoDesc(p)` when every hom-set is finite.
    pub finitization: Verdict<SizeSummary>,
    /// Direction of the adjoined 2-cells.
    pub orientation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub bound: usize,
    pub invertible_gluing: bool,
    /// Left Kan extension along `p` probed for full faithfulness.
    pub lan_ff: Verdict<bool>,
    pub descent_data: usize,
    pub presheaves_on_codomain: usize,
    /// Comparison `H ↦ (H∘p, id)` probed for full faithfulness.
    pub comparison_ff: Verdict<bool>,
    /// Bounded data outside the image of the comparison.
    pub unmatched_data: usize,
    pub consistency: Verdict<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentReport {
    pub domain: SizeSummary,
    pub codomain: SizeSummary,
    pub ff: Verdict<bool>,
    pub lax_epi: Verdict<bool>,
    /// Whether the induced functor on Karoubi envelopes is an equivalence.
    pub cauchy_equiv: bool,
    pub codescent: CodescentSummary,
    pub comparison_lax_epi: Verdict<bool>,
    pub comparison_ff: Verdict<bool>,
    /// The Karoubi route for `K`, available when `CoDesc(p)` is finite.
    pub comparison_cauchy_equiv: Option<bool>,
    pub descent_set: bool,
    pub effective_descent_set: Verdict<bool>,
    /// `CAT(−,Cat)` verdicts agree with the `Set` ones.
    pub cat_coincidence: String,
    /// Consequences for `CAT(−,D)` with `D` Cauchy complete.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

const ORIENTATION: &str = "θ(u,v): u → v, cocycle θ(u,w) = θ(v,w) ∘ θ(u,v)";

/// Finitized `CoDesc(p)` with its Karoubi envelope.
#[derive(Debug)]
struct FiniteCodescent {
    fin: Finitization,
    category: Arc<FinCategory>,
    karoubi: KaroubiEnvelope,
}

/// What `CoDesc(p)` depends on: the domain and the kernel of `p`.
#[derive(Debug)]
struct CodescentEntry {
    presentation: Presentation,
    /// The morphism of `e` behind each of the first generators; the rest
    /// are 2-cells.
    e_generators: Vec<MorId>,
    system: RewriteSystem,
    finite: Verdict<Arc<FiniteCodescent>>,
}

/// Computes descent reports, sharing work between functors with the same
/// domain and kernel and between functors with the same codomain.
///
/// Categories are cached by address; keep them alive in `Arc`s for the
/// lifetime of the engine.
#[derive(Debug)]
pub struct DescentEngine {
    limits: Limits,
    karoubi: HashMap<usize, (Arc<FinCategory>, Arc<KaroubiEnvelope>)>,
    codescent: HashMap<(usize, Vec<u32>), Arc<CodescentEntry>>,
}

/// Morphism map relabelled by first occurrence: equal for functors with the
/// same kernel on morphisms (and hence on objects).
fn kernel_signature(p: &FinFunctor) -> Vec<u32> {
    let mut label: HashMap<MorId, u32> = HashMap::new();
    p.morphism_map()
        .iter()
        .map(|m| {
            let next = label.len() as u32;
            *label.entry(*m).or_insert(next)
        })
        .collect()
}

impl DescentEngine {
    pub fn new(limits: Limits) -> Self {
        DescentEngine {
            limits,
            karoubi: HashMap::new(),
            codescent: HashMap::new(),
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn karoubi(&mut self, c: &Arc<FinCategory>) -> Arc<KaroubiEnvelope> {
        let key = Arc::as_ptr(c) as usize;
        self.karoubi
            .entry(key)
            .or_insert_with(|| (c.clone(), Arc::new(karoubi_envelope(c.clone()))))
            .1
            .clone()
    }

    /// `Cauchy(p)` through cached envelopes.
    pub fn cauchy_map(&mut self, p: &FinFunctor) -> FinFunctor {
        let source = self.karoubi(p.domain());
        let target = self.karoubi(p.codomain());
        cauchy_map_between(p, &source, &target)
    }

    fn entry(&mut self, p: &FinFunctor) -> Result<Arc<CodescentEntry>, Error> {
        let key = (Arc::as_ptr(p.domain()) as usize, kernel_signature(p));
        if let Some(entry) = self.codescent.get(&key) {
            return Ok(entry.clone());
        }
        let e = p.domain();
        let factorization = codescent_presentation(&higher_kernel(p)?)?;
        if let Some(failure) = factorization.factorization_failure() {
            return Err(Error::ConsistencyViolation(format!(
                "codescent factorization is broken: {}",
                serde_json::to_string(&failure).unwrap_or_default()
            )));
        }
        let presentation = factorization.presentation;
        let system = complete_rewriting(&presentation, &self.limits);
        let finite = try_finitize_with(&presentation, &system, &self.limits)?.map(|fin| {
            let category = Arc::new(fin.category.clone());
            let karoubi = karoubi_envelope(category.clone());
            Arc::new(FiniteCodescent { fin, category, karoubi })
        });
        let entry = Arc::new(CodescentEntry {
            presentation,
            e_generators: e.morphisms().filter(|&f| !e.is_identity(f)).collect(),
            system,
            finite,
        });
        // keep the domain alive so its address stays unique
        self.karoubi(e);
        self.codescent.insert(key, entry.clone());
        Ok(entry)
    }

    /// The comparison `K` for `p` on a cached presentation.
    fn comparison(&self, entry: &CodescentEntry, p: &FinFunctor) -> Result<PresentedFunctor, Error> {
        let b = p.codomain();
        let gens = entry.presentation.generators();
        let generator_map = (0..gens.len())
            .map(|i| match entry.e_generators.get(i) {
                Some(&f) => p.on_morphism(f),
                None => b.identity(p.on_object(crate::fincat::ObjId(gens[i].src.0))),
            })
            .collect();
        let k = PresentedFunctor::new_unchecked(
            entry.presentation.clone(),
            b.clone(),
            p.object_map().to_vec(),
            generator_map,
        );
        if let Some(failure) = k.relation_failure() {
            return Err(Error::ConsistencyViolation(format!("comparison functor: {failure}")));
        }
        Ok(k)
    }

    /// Full descent report for `p`.
    pub fn report(&mut self, p: &FinFunctor) -> Result<DescentReport, Error> {
        let (e, b) = (p.domain(), p.codomain());
        let ff = Verdict::from_check(p.fully_faithful_failure().map(Witness::NotFullyFaithful));
        let lax_epi = Verdict::from_check(lax_epimorphism_failure(p));
        let cauchy_equiv = self.cauchy_map(p).is_equivalence();
        if cauchy_equiv != (ff.holds() && lax_epi.holds()) {
            return Err(Error::ConsistencyViolation(format!(
                "Cauchy(p) equivalence is {cauchy_equiv} but ff = {}, lax epi = {}",
                ff.holds(),
                lax_epi.holds()
            )));
        }

        let entry = self.entry(p)?;
        let k = self.comparison(&entry, p)?;
        let comparison_lax_epi = Verdict::from_check(lax_epimorphism_failure_presented(&k));
        let mut comparison_cauchy_equiv = None;
        let comparison_ff = match &entry.finite {
            Verdict::Yes(finite) => {
                let morphisms = finite.fin.normal_forms.iter().map(|nf| k.evaluate(nf)).collect();
                let k_fin = FinFunctor::new(finite.category.clone(), b.clone(), p.object_map().to_vec(), morphisms)?;
                let target = self.karoubi(b);
                let equiv = cauchy_map_between(&k_fin, &finite.karoubi, &target).is_equivalence();
                let k_ff = k_fin.fully_faithful_failure();
                let k_lax = lax_epimorphism_failure(&k_fin).is_none();
                if k_lax != comparison_lax_epi.holds() {
                    return Err(Error::ConsistencyViolation(format!(
                        "K is lax epi on generators: {}, on the finitization: {k_lax}",
                        comparison_lax_epi.holds()
                    )));
                }
                if equiv != (k_lax && k_ff.is_none()) {
                    return Err(Error::ConsistencyViolation(format!(
                        "Cauchy(K) equivalence is {equiv} but K ff = {}, lax epi = {k_lax}",
                        k_ff.is_none()
                    )));
                }
                comparison_cauchy_equiv = Some(equiv);
                Verdict::from_check(k_ff.map(Witness::NotFullyFaithful))
            }
            Verdict::No(w) => Verdict::No(w.clone()),
            Verdict::Undecided(_) => comparison_ff_with(&k, &entry.system, &self.limits),
        };
        let descent_set = comparison_lax_epi.holds();
        let effective_descent_set = match (&comparison_lax_epi, &comparison_ff) {
            (Verdict::No(w), _) => Verdict::No(w.clone()),
            (_, v) => v.clone(),
        };
        let codescent = CodescentSummary {
            nodes: entry.presentation.nodes().len(),
            generators: entry.presentation.generators().len(),
            relations: entry.presentation.relations().len(),
            rules: entry.system.rules().len(),
            completion: entry.system.status(),
            finitization: entry.finite.as_ref().map(|f| SizeSummary::of(&f.category)),
            orientation: ORIENTATION.to_string(),
        };
        Ok(DescentReport {
            domain: SizeSummary::of(e),
            codomain: SizeSummary::of(b),
            ff,
            lax_epi,
            cauchy_equiv,
            codescent,
            comparison_lax_epi,
            comparison_ff,
            comparison_cauchy_equiv,
            descent_set,
            cat_coincidence: format!(
                "CAT(-,Cat)-descent coincides with CAT(-,Set)-descent: {}",
                if descent_set { "holds" } else { "fails" }
            ),
            effective_descent_set,
            transfer: None,
            oracle: None,
        })
    }
}

/// Run the full pipeline for a single functor.
pub fn descent_verdict(p: &FinFunctor, limits: &Limits) -> Result<DescentReport, Error> {
    DescentEngine::new(*limits).report(p)
}

/// Annotate a report with what the effective-descent verdict says about
/// other coefficient categories.
pub fn transfer_report(mut r: DescentReport) -> DescentReport {
    let clause = "for every Cauchy-complete D admitting a fully faithful functor from Set";
    r.transfer = Some(match &r.effective_descent_set {
        Verdict::Yes(true) => format!("effective CAT(-,D)-descent holds {clause}"),
        Verdict::Undecided(bound) => format!("effective CAT(-,D)-descent is undecided {clause} ({bound})"),
        _ => format!("effective CAT(-,D)-descent fails {clause}"),
    });
    r
}

/// Attach bounded oracle evidence. A refutation of a positive verdict is an
/// internal error, never a result.
pub fn attach_oracle(p: &FinFunctor, mut r: DescentReport, options: &OracleOptions) -> Result<DescentReport, Error> {
    let d = higher_kernel(p)?;
    let lan_ff = oracle_lan_ff_probe(p, options.bound, options.cap);
    if r.ff.holds() && lan_ff.is_no() {
        return Err(Error::ConsistencyViolation(format!(
            "p is fully faithful but the Kan extension probe refutes it: {}",
            serde_json::to_string(&lan_ff).unwrap_or_default()
        )));
    }
    let summary = match oracle_descent_category(&d, options) {
        Ok(o) => {
            let consistency = consistency_of(&d, &r, &o);
            if let Verdict::No(w) = &consistency {
                return Err(Error::ConsistencyViolation(format!("bounded descent oracle: {w}")));
            }
            OracleSummary {
                bound: options.bound,
                invertible_gluing: options.invertible,
                lan_ff,
                descent_data: o.data.len(),
                presheaves_on_codomain: o.presheaves.len(),
                comparison_ff: o.comparison_ff,
                unmatched_data: o.unmatched.len(),
                consistency,
            }
        }
        Err(Error::ResourceExceeded(_)) => {
            let bound = crate::verdict::Bound {
                resource: crate::verdict::Resource::EnumerationCap,
                limit: options.cap,
            };
            OracleSummary {
                bound: options.bound,
                invertible_gluing: options.invertible,
                lan_ff,
                descent_data: 0,
                presheaves_on_codomain: 0,
                comparison_ff: Verdict::Undecided(bound),
                unmatched_data: 0,
                consistency: Verdict::Undecided(bound),
            }
        }
        Err(e) => return Err(e),
    };
    r.oracle = Some(summary);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use oracle::oracle_consistency;

    fn report(p: &FinFunctor) -> DescentReport {
        descent_verdict(p, &Limits::default()).unwrap()
    }

    #[test]
    fn identity_is_effective() {
        let r = report(&catalog::identity_on_arrow());
        assert!(r.descent_set);
        assert_eq!(r.effective_descent_set, Verdict::Yes(true));
        assert_eq!(r.comparison_cauchy_equiv, Some(true));
    }

    #[test]
    fn discrete_to_point_is_effective() {
        let r = report(&catalog::discrete_to_terminal());
        assert!(r.descent_set);
        assert_eq!(r.effective_descent_set, Verdict::Yes(true));
        assert!(!r.lax_epi.holds());
        assert_eq!(r.codescent.finitization, Verdict::Yes(SizeSummary { objects: 2, morphisms: 4 }));
    }

    #[test]
    fn point_into_discrete_is_not_descent() {
        let r = report(&catalog::point_into_discrete());
        assert!(!r.descent_set);
        assert!(matches!(
            r.effective_descent_set,
            Verdict::No(Witness::CoendNotSurjective { .. })
        ));
    }

    #[test]
    fn curated_verdicts() {
        for (name, p) in catalog::curated() {
            let r = report(&p);
            assert_eq!(r.descent_set, r.comparison_lax_epi.holds(), "{name}");
            let effective = r.comparison_lax_epi.holds() && r.comparison_ff.holds();
            assert_eq!(r.effective_descent_set.holds(), effective, "{name}");
            let expected = !matches!(name, "1 -> D2" | "1 -> E");
            assert_eq!(r.effective_descent_set.holds(), expected, "{name}");
        }
    }

    #[test]
    fn transfer_notes() {
        let r = transfer_report(report(&catalog::identity_on_arrow()));
        assert!(r.transfer.unwrap().contains("holds"));
        let r = transfer_report(report(&catalog::point_into_discrete()));
        assert!(r.transfer.unwrap().contains("fails"));
    }

    #[test]
    fn oracle_agrees_on_curated() {
        for (name, p) in catalog::curated() {
            let r = report(&p);
            let d = higher_kernel(&p).unwrap();
            let v = oracle_consistency(&d, &r, &OracleOptions::default()).unwrap();
            assert_eq!(v, Verdict::Yes(true), "{name}");
            attach_oracle(&p, r, &OracleOptions::default()).unwrap();
        }
    }

    #[test]
    fn engine_cache_matches_fresh_runs() {
        let mut engine = DescentEngine::new(Limits::default());
        for (_, p) in catalog::curated() {
            let cached = engine.report(&p).unwrap();
            let cached_again = engine.report(&p).unwrap();
            assert_eq!(cached, cached_again);
            assert_eq!(cached, report(&p));
        }
    }
}
