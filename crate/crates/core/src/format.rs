//! JSON file formats for categories, functors and presentations.
//!
//! Documents are first parsed as plain JSON, so syntax errors carry a line
//! and column; the schema is then checked field by field, so a malformed
//! document names the offending field.
//!
//! ```json
//! {
//!   "objects": ["0", "1"],
//!   "morphisms": [{"id": "id0", "src": "0", "tgt": "0"},
//!                 {"id": "id1", "src": "1", "tgt": "1"},
//!                 {"id": "f", "src": "0", "tgt": "1"}],
//!   "identities": {"0": "id0", "1": "id1"},
//!   "composition": [["id0", "id0", "id0"], ["id1", "id1", "id1"],
//!                   ["f", "id0", "f"], ["id1", "f", "f"]]
//! }
//! ```
//!
//! A functor file names its categories by path (relative to the functor
//! file) or embeds them:
//!
//! ```json
//! {"domain": "two.json", "codomain": "one.json",
//!  "object_map": {"0": "*", "1": "*"}, "morphism_map": {"f": "id"}}
//! ```

use std::collections::BTreeMap;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fincat::{validate_category, FinCategory, FinFunctor, RawCategory, RawFunctor, RawMorphism};
use crate::present::{Presentation, RawGenerator, RawPresentation, RawRelation};

/// Where a functor file gets one of its categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategorySource {
    Path(String),
    Inline(RawCategory),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorFile {
    pub domain: CategorySource,
    pub codomain: CategorySource,
    pub maps: RawFunctor,
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

fn as_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(field, "expected an object"))
}

fn as_array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(field, "expected an array"))
}

fn as_string(v: &Value, field: &str) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| schema(field, "expected a string"))
}

fn required<'a>(obj: &'a Map<String, Value>, prefix: &str, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| schema(join(prefix, name), "missing field"))
}

fn string_array(v: &Value, field: &str) -> Result<Vec<String>> {
    as_array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, s)| as_string(s, &format!("{field}[{i}]")))
        .collect()
}

fn string_map(v: &Value, field: &str) -> Result<BTreeMap<String, String>> {
    as_object(v, field)?
        .iter()
        .map(|(k, s)| Ok((k.clone(), as_string(s, &format!("{field}.{k}"))?)))
        .collect()
}

/// Reject repeated names, pointing at both occurrences.
fn no_duplicates<'a>(names: impl Iterator<Item = &'a String>, field: &str) -> Result<()> {
    let mut first: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, name) in names.enumerate() {
        if let Some(j) = first.insert(name, i) {
            return Err(schema(
                field,
                format!("duplicate id `{name}` at {field}[{j}] and {field}[{i}]"),
            ));
        }
    }
    Ok(())
}

/// `{id, src, tgt}` records.
fn edges(v: &Value, field: &str) -> Result<Vec<(String, String, String)>> {
    as_array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let at = format!("{field}[{i}]");
            let m = as_object(m, &at)?;
            Ok((
                as_string(required(m, &at, "id")?, &join(&at, "id"))?,
                as_string(required(m, &at, "src")?, &join(&at, "src"))?,
                as_string(required(m, &at, "tgt")?, &join(&at, "tgt"))?,
            ))
        })
        .collect()
}

fn category_from_value(v: &Value, prefix: &str) -> Result<RawCategory> {
    let root = as_object(v, if prefix.is_empty() { "<root>" } else { prefix })?;
    let objects_field = join(prefix, "objects");
    let objects = string_array(required(root, prefix, "objects")?, &objects_field)?;
    no_duplicates(objects.iter(), &objects_field)?;
    let morphisms_field = join(prefix, "morphisms");
    let morphisms: Vec<RawMorphism> = edges(required(root, prefix, "morphisms")?, &morphisms_field)?
        .into_iter()
        .map(|(id, src, tgt)| RawMorphism { id, src, tgt })
        .collect();
    no_duplicates(morphisms.iter().map(|m| &m.id), &morphisms_field)?;
    let identities = string_map(required(root, prefix, "identities")?, &join(prefix, "identities"))?;
    let composition_field = join(prefix, "composition");
    let composition = as_array(required(root, prefix, "composition")?, &composition_field)?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let at = format!("{composition_field}[{i}]");
            let parts = string_array(t, &at)?;
            <[String; 3]>::try_from(parts).map_err(|_| schema(at, "expected [g, f, g∘f]"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RawCategory {
        objects,
        morphisms,
        identities,
        composition,
    })
}

pub fn parse_category(text: &str) -> Result<RawCategory> {
    category_from_value(&parse_json(text)?, "")
}

pub fn parse_functor(text: &str) -> Result<FunctorFile> {
    let v = parse_json(text)?;
    let root = as_object(&v, "<root>")?;
    let source = |name: &str| -> Result<CategorySource> {
        match required(root, "", name)? {
            Value::String(path) => Ok(CategorySource::Path(path.clone())),
            inline @ Value::Object(_) => Ok(CategorySource::Inline(category_from_value(inline, name)?)),
            _ => Err(schema(name, "expected a file path or an inline category")),
        }
    };
    let morphism_map = match root.get("morphism_map") {
        Some(m) => string_map(m, "morphism_map")?,
        None => BTreeMap::new(),
    };
    Ok(FunctorFile {
        domain: source("domain")?,
        codomain: source("codomain")?,
        maps: RawFunctor {
            object_map: string_map(required(root, "", "object_map")?, "object_map")?,
            morphism_map,
        },
    })
}

pub fn parse_presentation(text: &str) -> Result<RawPresentation> {
    let v = parse_json(text)?;
    let root = as_object(&v, "<root>")?;
    let nodes = string_array(required(root, "", "nodes")?, "nodes")?;
    no_duplicates(nodes.iter(), "nodes")?;
    let generators: Vec<RawGenerator> = edges(required(root, "", "generators")?, "generators")?
        .into_iter()
        .map(|(id, src, tgt)| RawGenerator { id, src, tgt })
        .collect();
    no_duplicates(generators.iter().map(|g| &g.id), "generators")?;
    let relations = match root.get("relations") {
        None => Vec::new(),
        Some(rels) => as_array(rels, "relations")?
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let at = format!("relations[{i}]");
                let r = as_object(r, &at)?;
                Ok(RawRelation {
                    lhs: string_array(required(r, &at, "lhs")?, &join(&at, "lhs"))?,
                    rhs: string_array(required(r, &at, "rhs")?, &join(&at, "rhs"))?,
                    at: r.get("at").map(|a| as_string(a, &join(&at, "at"))).transpose()?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(RawPresentation {
        nodes,
        generators,
        relations,
    })
}

fn read(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Prefix parse locations with the file name.
fn in_file<T>(path: &FsPath, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn load_category(path: &FsPath) -> Result<Arc<FinCategory>> {
    let raw = in_file(path, parse_category(&read(path)?))?;
    Ok(Arc::new(validate_category(&raw)?))
}

fn resolve(source: &CategorySource, base: &FsPath) -> Result<Arc<FinCategory>> {
    match source {
        CategorySource::Path(p) => {
            let path: PathBuf = base.join(p);
            load_category(&path)
        }
        CategorySource::Inline(raw) => Ok(Arc::new(validate_category(raw)?)),
    }
}

pub fn load_functor(path: &FsPath) -> Result<FinFunctor> {
    let file = in_file(path, parse_functor(&read(path)?))?;
    let base = path.parent().unwrap_or(FsPath::new("."));
    let domain = resolve(&file.domain, base)?;
    let codomain = if file.codomain == file.domain {
        domain.clone()
    } else {
        resolve(&file.codomain, base)?
    };
    Ok(FinFunctor::from_raw(domain, codomain, &file.maps)?)
}

pub fn load_presentation(path: &FsPath) -> Result<Presentation> {
    let raw = in_file(path, parse_presentation(&read(path)?))?;
    Ok(Presentation::from_raw(&raw)?)
}

pub fn category_to_json(c: &FinCategory) -> Value {
    serde_json::to_value(c.to_raw()).expect("raw categories serialize")
}

/// A self-contained functor document with both categories inline.
pub fn functor_to_json(p: &FinFunctor) -> Value {
    let raw = p.to_raw();
    json!({
        "domain": category_to_json(p.domain()),
        "codomain": category_to_json(p.codomain()),
        "object_map": raw.object_map,
        "morphism_map": raw.morphism_map,
    })
}

pub fn presentation_to_json(p: &Presentation) -> Value {
    serde_json::to_value(p.to_raw()).expect("raw presentations serialize")
}

/// Pretty JSON with a trailing newline.
pub fn emit(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
