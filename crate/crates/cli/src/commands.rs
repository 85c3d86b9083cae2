//! Command pipelines. Each produces a JSON report, a short human summary
//! and an exit code.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use descent_core::cauchy::{karoubi_envelope, non_split_idempotent};
use descent_core::codescent::codescent_presentation;
use descent_core::corpus::{run_corpus, CorpusOptions, CorpusSummary};
use descent_core::descent::oracle::OracleOptions;
use descent_core::descent::{attach_oracle, transfer_report, DescentEngine, DescentReport};
use descent_core::format::{
    category_to_json, emit, functor_to_json, load_category, load_functor, load_presentation, parse_category,
    presentation_to_json,
};
use descent_core::kernel::higher_kernel;
use descent_core::laxepi::lax_epimorphism_verdict;
use descent_core::present::{complete_rewriting, try_finitize_with, CompletionStatus, Limits};
use descent_core::verdict::{Verdict, Witness};
use descent_core::{Error, FinFunctor};

use crate::{Command, CorpusArgs, Output, Property};

const YES: u8 = 0;
const NO: u8 = 1;
const UNDECIDED: u8 = 2;
const INVALID: u8 = 3;
const VIOLATION: u8 = 4;

struct Report {
    json: Value,
    text: String,
    code: u8,
}

fn exit_code<T>(v: &Verdict<T>) -> u8 {
    match v {
        Verdict::Yes(_) => YES,
        Verdict::No(_) => NO,
        Verdict::Undecided(_) => UNDECIDED,
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::ConsistencyViolation(_) => VIOLATION,
        Error::IncompleteSystem(_) | Error::ResourceExceeded(_) => UNDECIDED,
        _ => INVALID,
    }
}

fn show(v: &Verdict<bool>) -> String {
    match v {
        Verdict::Yes(true) => "yes".into(),
        Verdict::Yes(false) => "no".into(),
        Verdict::No(w) => format!("no ({w})"),
        Verdict::Undecided(b) => format!("undecided ({b})"),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn run(command: Command) -> u8 {
    let (output, result) = match command {
        Command::Validate { file, output } => (output, validate(&file)),
        Command::Check {
            property,
            functor,
            output,
        } => (output, check(property, &functor)),
        Command::Karoubi { category, output } => (output, karoubi(&category)),
        Command::Codescent {
            functor,
            limits,
            output,
        } => (output, codescent(&functor, &limits.limits())),
        Command::Descent {
            functor,
            limits,
            output,
        } => (output, descent(&functor, &limits.limits())),
        Command::Oracle {
            functor,
            bound,
            invertible,
            cap,
            limits,
            output,
        } => {
            let options = OracleOptions { bound, cap, invertible };
            (output, oracle(&functor, &limits.limits(), &options))
        }
        Command::Corpus(args) => {
            let result = corpus(&args);
            (args.output, result)
        }
    };
    match result {
        Ok(report) => match deliver(&output, &report) {
            Ok(()) => report.code,
            Err(e) => {
                eprintln!("error: {e}");
                INVALID
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

fn deliver(output: &Output, report: &Report) -> Result<(), Error> {
    match output.json_out.as_deref() {
        Some(p) if p == Path::new("-") => print!("{}", emit(&report.json)),
        Some(p) => {
            print!("{}", report.text);
            std::fs::write(p, emit(&report.json)).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })?;
        }
        None => print!("{}", report.text),
    }
    Ok(())
}

fn validate(file: &Path) -> Result<Report, Error> {
    let text = std::fs::read_to_string(file).map_err(|source| Error::Io {
        path: file.display().to_string(),
        source,
    })?;
    let Ok(Value::Object(root)) = serde_json::from_str::<Value>(&text) else {
        // not a JSON object: let the category parser locate the problem
        parse_category(&text)?;
        unreachable!("category documents are JSON objects")
    };
    let (kind, json, text) = if root.contains_key("domain") {
        let p = load_functor(file)?;
        let text = format!(
            "valid functor: {} objects, {} morphisms -> {} objects, {} morphisms\n",
            p.domain().object_count(),
            p.domain().morphism_count(),
            p.codomain().object_count(),
            p.codomain().morphism_count()
        );
        ("functor", functor_to_json(&p), text)
    } else if root.contains_key("nodes") {
        let p = load_presentation(file)?;
        let text = format!(
            "valid presentation: {} nodes, {} generators, {} relations\n",
            p.nodes().len(),
            p.generators().len(),
            p.relations().len()
        );
        ("presentation", presentation_to_json(&p), text)
    } else {
        let c = load_category(file)?;
        let text = format!(
            "valid category: {} objects, {} morphisms\n",
            c.object_count(),
            c.morphism_count()
        );
        ("category", category_to_json(&c), text)
    };
    Ok(Report {
        json: json!({ "valid": true, "kind": kind, "document": json }),
        text,
        code: YES,
    })
}

fn equivalence_verdict(p: &FinFunctor) -> Verdict<bool> {
    if let Some(h) = p.fully_faithful_failure() {
        return Verdict::No(Witness::NotFullyFaithful(h));
    }
    match p.essential_surjectivity_failure() {
        Some(y) => Verdict::No(Witness::NotEssentiallySurjective {
            object: p.codomain().object_name(y).to_string(),
        }),
        None => Verdict::Yes(true),
    }
}

fn check(property: Property, file: &Path) -> Result<Report, Error> {
    let p = load_functor(file)?;
    let (name, verdict) = match property {
        Property::Ff => (
            "fully_faithful",
            Verdict::from_check(p.fully_faithful_failure().map(Witness::NotFullyFaithful)),
        ),
        Property::Laxepi => ("lax_epimorphism", lax_epimorphism_verdict(&p)),
        Property::Equiv => ("equivalence", equivalence_verdict(&p)),
    };
    Ok(Report {
        text: format!("{}: {}\n", name.replace('_', " "), show(&verdict)),
        code: exit_code(&verdict),
        json: json!({ "property": name, "result": verdict }),
    })
}

fn karoubi(file: &Path) -> Result<Report, Error> {
    let c = load_category(file)?;
    let k = karoubi_envelope(c.clone());
    let split = non_split_idempotent(&c).map(|m| c.morphism_name(m).to_string());
    let mut text = format!(
        "Karoubi envelope: {} objects, {} morphisms\n",
        k.completion.object_count(),
        k.completion.morphism_count()
    );
    for x in k.completion.objects() {
        let _ = writeln!(text, "  {}", k.completion.object_name(x));
    }
    let _ = writeln!(
        text,
        "Cauchy complete: {}",
        match &split {
            None => "yes".to_string(),
            Some(m) => format!("no ({m} does not split)"),
        }
    );
    Ok(Report {
        json: json!({
            "completion": category_to_json(&k.completion),
            "idempotents": k.idempotents.iter().map(|&m| c.morphism_name(m)).collect::<Vec<_>>(),
            "cauchy_complete": split.is_none(),
            "non_split_idempotent": split,
        }),
        text,
        code: YES,
    })
}

fn completion_text(status: &CompletionStatus) -> String {
    match status {
        CompletionStatus::Complete => "complete".into(),
        CompletionStatus::Incomplete(b) => format!("incomplete ({b})"),
    }
}

fn codescent(file: &Path, limits: &Limits) -> Result<Report, Error> {
    let p = load_functor(file)?;
    let factorization = codescent_presentation(&higher_kernel(&p)?)?;
    if let Some(failure) = factorization.factorization_failure() {
        return Err(Error::ConsistencyViolation(format!(
            "codescent factorization is broken: {}",
            serde_json::to_string(&failure).unwrap_or_default()
        )));
    }
    let presentation = &factorization.presentation;
    let system = complete_rewriting(presentation, limits);
    let finite = try_finitize_with(presentation, &system, limits)?;
    let mut text = format!(
        "CoDesc(p): {} nodes, {} generators, {} relations\nrewriting: {} rules, {}\n",
        presentation.nodes().len(),
        presentation.generators().len(),
        presentation.relations().len(),
        system.rules().len(),
        completion_text(&system.status())
    );
    let finitization = match &finite {
        Verdict::Yes(fin) => {
            let _ = writeln!(
                text,
                "finite: {} objects, {} morphisms",
                fin.category.object_count(),
                fin.category.morphism_count()
            );
            let forms: Vec<String> = fin.normal_forms.iter().map(|nf| presentation.path_name(nf)).collect();
            Verdict::Yes(json!({
                "category": category_to_json(&fin.category),
                "normal_forms": forms,
            }))
        }
        Verdict::No(w) => {
            let _ = writeln!(text, "infinite ({w})");
            Verdict::No(w.clone())
        }
        Verdict::Undecided(b) => {
            let _ = writeln!(text, "finitization undecided ({b})");
            Verdict::Undecided(*b)
        }
    };
    Ok(Report {
        code: exit_code(&finitization),
        json: json!({
            "presentation": presentation_to_json(presentation),
            "relation_kinds": factorization.relation_kinds,
            "completion": system.status(),
            "rules": system.rules().len(),
            "finitization": finitization,
        }),
        text,
    })
}

fn report_text(r: &DescentReport) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "p: {} objects, {} morphisms -> {} objects, {} morphisms",
        r.domain.objects, r.domain.morphisms, r.codomain.objects, r.codomain.morphisms
    );
    let _ = writeln!(t, "fully faithful: {}", show(&r.ff));
    let _ = writeln!(t, "lax epimorphism: {}", show(&r.lax_epi));
    let _ = writeln!(t, "Cauchy(p) equivalence: {}", yes_no(r.cauchy_equiv));
    let c = &r.codescent;
    let _ = writeln!(
        t,
        "CoDesc(p): {} nodes, {} generators, {} relations, {} rules, {}",
        c.nodes,
        c.generators,
        c.relations,
        c.rules,
        completion_text(&c.completion)
    );
    let size = match &c.finitization {
        Verdict::Yes(s) => format!("{} objects, {} morphisms", s.objects, s.morphisms),
        Verdict::No(w) => format!("infinite ({w})"),
        Verdict::Undecided(b) => format!("undecided ({b})"),
    };
    let _ = writeln!(t, "CoDesc(p) size: {size}");
    let _ = writeln!(t, "K lax epimorphism: {}", show(&r.comparison_lax_epi));
    let _ = writeln!(t, "K fully faithful: {}", show(&r.comparison_ff));
    let _ = writeln!(t, "descent: {}", yes_no(r.descent_set));
    let _ = writeln!(t, "effective descent: {}", show(&r.effective_descent_set));
    if let Some(transfer) = &r.transfer {
        let _ = writeln!(t, "{transfer}");
    }
    t
}

fn descent(file: &Path, limits: &Limits) -> Result<Report, Error> {
    let p = load_functor(file)?;
    let r = transfer_report(DescentEngine::new(*limits).report(&p)?);
    Ok(Report {
        text: report_text(&r),
        code: exit_code(&r.effective_descent_set),
        json: serde_json::to_value(&r).expect("reports serialize"),
    })
}

fn oracle(file: &Path, limits: &Limits, options: &OracleOptions) -> Result<Report, Error> {
    let p = load_functor(file)?;
    let r = DescentEngine::new(*limits).report(&p)?;
    let r = attach_oracle(&p, r, options)?;
    let o = r.oracle.as_ref().expect("oracle attached");
    let mut text = report_text(&r);
    let _ = writeln!(
        text,
        "oracle (sets of size at most {}{}): {} descent data, {} functors on the codomain, {} unmatched",
        o.bound,
        if o.invertible_gluing { ", invertible gluing" } else { "" },
        o.descent_data,
        o.presheaves_on_codomain,
        o.unmatched_data
    );
    let _ = writeln!(text, "oracle Lan fully faithful: {}", show(&o.lan_ff));
    let _ = writeln!(text, "oracle comparison fully faithful: {}", show(&o.comparison_ff));
    let _ = writeln!(text, "oracle consistency: {}", show(&o.consistency));
    Ok(Report {
        code: exit_code(&o.consistency),
        json: serde_json::to_value(&r).expect("reports serialize"),
        text,
    })
}

fn corpus_text(s: &CorpusSummary) -> String {
    let mut t = format!(
        "functors: {} curated, {} exhaustive, {} random; categories: {}\n",
        s.functors.curated, s.functors.exhaustive, s.functors.random, s.categories
    );
    for inv in &s.invariants {
        let status = if inv.failed == 0 { "ok" } else { "FAILED" };
        let _ = writeln!(t, "{status:>6}  {} ({} checked, {} failed)", inv.name, inv.checked, inv.failed);
    }
    let f = &s.finitization;
    let _ = writeln!(
        t,
        "CoDesc finitization: {} finite, {} infinite, {} undecided ({:.2}% undecided)",
        f.finite,
        f.infinite,
        f.undecided,
        100.0 * f.undecided_fraction
    );
    let v = &s.verdicts;
    let _ = writeln!(
        t,
        "verdicts: {} ff, {} lax epi, {} descent, effective {} yes / {} no / {} undecided",
        v.fully_faithful, v.lax_epi, v.descent, v.effective_yes, v.effective_no, v.effective_undecided
    );
    if let Some(findings) = &s.findings {
        let _ = writeln!(t, "findings (exploratory): {} descent functors not shown effective", findings.len());
    }
    if let Some(c) = &s.counterexample {
        let _ = writeln!(t, "counterexample to `{}`: {}", c.invariant, c.detail);
        t.push_str(&emit(&c.subject));
    }
    t
}

fn corpus(args: &CorpusArgs) -> Result<Report, Error> {
    let options = CorpusOptions {
        curated: !args.no_curated,
        exhaustive: args.exhaustive.then_some((args.max_objects, args.max_morphisms)),
        random: args.random,
        random_max_objects: args.random_max_objects,
        random_max_morphisms: args.random_max_morphisms,
        seed: args.seed,
        limits: args.limits.limits(),
        search: args.search,
    };
    if options.random > 0 && (options.random_max_objects == 0 || options.random_max_morphisms < options.random_max_objects) {
        return Err(Error::Schema {
            field: "random-max-morphisms".into(),
            message: "random categories need at least one object and a morphism per object".into(),
        });
    }
    let summary = run_corpus(&options);
    Ok(Report {
        text: corpus_text(&summary),
        code: if summary.passed() { YES } else { VIOLATION },
        json: serde_json::to_value(&summary).expect("summaries serialize"),
    })
}
