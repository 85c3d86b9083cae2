//! Finite categories and functors between them.
//!
//! A [`FinCategory`] is stored as dense index tables: objects and morphisms
//! are addressed by [`ObjId`] / [`MorId`], and composition is a total table
//! over composable pairs. Identifiers are opaque strings kept only for
//! reporting and file round-trips.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{CategoryError, FunctorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MorId(pub usize);

impl ObjId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl MorId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Unvalidated category description, as read from a file.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    pub identities: BTreeMap<String, String>,
    /// Triples `[g, f, g∘f]`.
    pub composition: Vec<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMorphism {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Unvalidated functor description: name-level object and morphism maps.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RawFunctor {
    pub object_map: BTreeMap<String, String>,
    pub morphism_map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
}

/// A validated finite category.
#[derive(Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    identity_of: Vec<Option<ObjId>>,
    // table[g * m + f] = g ∘ f
    table: Vec<Option<MorId>>,
    homs: Vec<Vec<MorId>>,
    hom_pos: Vec<usize>,
    obj_index: HashMap<String, ObjId>,
    mor_index: HashMap<String, MorId>,
    iso_class: OnceLock<Vec<usize>>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.table == other.table
    }
}

impl Eq for FinCategory {}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.len())
            .finish()
    }
}

/// Validate a raw description, checking every category law exhaustively.
pub fn validate_category(raw: &RawCategory) -> Result<FinCategory, CategoryError> {
    let mut obj_index = HashMap::new();
    for (i, name) in raw.objects.iter().enumerate() {
        if obj_index.insert(name.clone(), ObjId(i)).is_some() {
            return Err(CategoryError::DuplicateObject(name.clone()));
        }
    }
    let lookup_obj = |context: &str, name: &str| {
        obj_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::DanglingReference {
                context: context.to_string(),
                kind: "object",
                name: name.to_string(),
            })
    };
    let mut mor_index = HashMap::new();
    let mut morphisms = Vec::with_capacity(raw.morphisms.len());
    for (i, m) in raw.morphisms.iter().enumerate() {
        if mor_index.insert(m.id.clone(), MorId(i)).is_some() {
            return Err(CategoryError::DuplicateMorphism(m.id.clone()));
        }
        let context = format!("morphism `{}`", m.id);
        morphisms.push((
            m.id.clone(),
            lookup_obj(&context, &m.src)?,
            lookup_obj(&context, &m.tgt)?,
        ));
    }
    let lookup_mor = |context: &str, name: &str| {
        mor_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::DanglingReference {
                context: context.to_string(),
                kind: "morphism",
                name: name.to_string(),
            })
    };
    for key in raw.identities.keys() {
        lookup_obj("identities", key)?;
    }
    let mut identities = Vec::with_capacity(raw.objects.len());
    for name in &raw.objects {
        let id = raw
            .identities
            .get(name)
            .ok_or_else(|| CategoryError::MissingIdentity(name.clone()))?;
        identities.push(lookup_mor(&format!("identity of `{name}`"), id)?);
    }

    let m = morphisms.len();
    let mut table: Vec<Option<MorId>> = vec![None; m * m];
    for [g, f, gf] in &raw.composition {
        let context = format!("composition [{g}, {f}, {gf}]");
        let (gi, fi, hi) = (
            lookup_mor(&context, g)?,
            lookup_mor(&context, f)?,
            lookup_mor(&context, gf)?,
        );
        let closure = |problem: String| CategoryError::NonClosedComposition {
            g: g.clone(),
            f: f.clone(),
            problem,
        };
        if morphisms[gi.0].1 != morphisms[fi.0].2 {
            return Err(closure("pair is not composable".into()));
        }
        let slot = &mut table[gi.0 * m + fi.0];
        match slot {
            Some(prev) if *prev != hi => {
                return Err(closure(format!(
                    "defined twice, as `{}` and `{gf}`",
                    morphisms[prev.0].0
                )))
            }
            _ => *slot = Some(hi),
        }
    }
    FinCategory::from_parts(raw.objects.clone(), morphisms, identities, table)
}

impl FinCategory {
    /// Build and validate from index-level data. `table[g * m + f]` holds
    /// `g ∘ f` for every composable pair and `None` elsewhere.
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<(String, ObjId, ObjId)>,
        identities: Vec<MorId>,
        table: Vec<Option<MorId>>,
    ) -> Result<Self, CategoryError> {
        let n = objects.len();
        let m = morphisms.len();
        assert_eq!(identities.len(), n, "one identity per object");
        assert_eq!(table.len(), m * m, "table must be m×m");
        let morphisms: Vec<Morphism> = morphisms
            .into_iter()
            .map(|(name, src, tgt)| Morphism { name, src, tgt })
            .collect();
        let mut obj_index = HashMap::with_capacity(n);
        for (i, name) in objects.iter().enumerate() {
            if obj_index.insert(name.clone(), ObjId(i)).is_some() {
                return Err(CategoryError::DuplicateObject(name.clone()));
            }
        }
        let mut mor_index = HashMap::with_capacity(m);
        for (i, mor) in morphisms.iter().enumerate() {
            if mor_index.insert(mor.name.clone(), MorId(i)).is_some() {
                return Err(CategoryError::DuplicateMorphism(mor.name.clone()));
            }
        }
        let mut identity_of = vec![None; m];
        for (x, &id) in identities.iter().enumerate() {
            let mor = &morphisms[id.0];
            if mor.src != ObjId(x) || mor.tgt != ObjId(x) {
                return Err(CategoryError::IdentityLawViolation {
                    identity: mor.name.clone(),
                    morphism: mor.name.clone(),
                    got: format!("not an endomorphism of `{}`", objects[x]),
                });
            }
            identity_of[id.0] = Some(ObjId(x));
        }
        let mut homs = vec![Vec::new(); n * n];
        let mut hom_pos = vec![0; m];
        for (i, mor) in morphisms.iter().enumerate() {
            let hom = &mut homs[mor.src.0 * n + mor.tgt.0];
            hom_pos[i] = hom.len();
            hom.push(MorId(i));
        }
        let cat = FinCategory {
            objects,
            morphisms,
            identities,
            identity_of,
            table,
            homs,
            hom_pos,
            obj_index,
            mor_index,
            iso_class: OnceLock::new(),
        };
        cat.check_laws()?;
        Ok(cat)
    }

    fn check_laws(&self) -> Result<(), CategoryError> {
        let m = self.morphisms.len();
        // Closure: defined exactly on composable pairs, with the right endpoints.
        for g in 0..m {
            for f in 0..m {
                let (gm, fm) = (&self.morphisms[g], &self.morphisms[f]);
                let entry = self.table[g * m + f];
                let composable = gm.src == fm.tgt;
                let problem = match (composable, entry) {
                    (true, None) => Some("missing entry".to_string()),
                    (false, Some(_)) => Some("pair is not composable".to_string()),
                    (true, Some(h)) => {
                        let hm = &self.morphisms[h.0];
                        (hm.src != fm.src || hm.tgt != gm.tgt).then(|| {
                            format!(
                                "result `{}` has endpoints {} → {}, expected {} → {}",
                                hm.name,
                                self.objects[hm.src.0],
                                self.objects[hm.tgt.0],
                                self.objects[fm.src.0],
                                self.objects[gm.tgt.0]
                            )
                        })
                    }
                    (false, None) => None,
                };
                if let Some(problem) = problem {
                    return Err(CategoryError::NonClosedComposition {
                        g: gm.name.clone(),
                        f: fm.name.clone(),
                        problem,
                    });
                }
            }
        }
        for (i, mor) in self.morphisms.iter().enumerate() {
            let f = MorId(i);
            let left = self.identities[mor.tgt.0];
            let right = self.identities[mor.src.0];
            for (id, got) in [(left, self.compose(left, f)), (right, self.compose(f, right))] {
                if got != Some(f) {
                    return Err(CategoryError::IdentityLawViolation {
                        identity: self.morphisms[id.0].name.clone(),
                        morphism: mor.name.clone(),
                        got: got.map_or("nothing".into(), |g| self.morphisms[g.0].name.clone()),
                    });
                }
            }
        }
        for f in 0..m {
            let fm = &self.morphisms[f];
            for &g in self.out_of(fm.tgt) {
                let gf = self.then(MorId(f), g);
                for &h in self.out_of(self.morphisms[g.0].tgt) {
                    let left = self.then(gf, h);
                    let right = self.then(MorId(f), self.then(g, h));
                    if left != right {
                        return Err(CategoryError::AssociativityViolation {
                            h: self.morphisms[h.0].name.clone(),
                            g: self.morphisms[g.0].name.clone(),
                            f: fm.name.clone(),
                            left: self.morphisms[left.0].name.clone(),
                            right: self.morphisms[right.0].name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> + '_ {
        (0..self.morphisms.len()).map(MorId)
    }

    pub fn object_name(&self, x: ObjId) -> &str {
        &self.objects[x.0]
    }

    pub fn morphism_name(&self, f: MorId) -> &str {
        &self.morphisms[f.0].name
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.obj_index.get(name).copied()
    }

    pub fn morphism_id(&self, name: &str) -> Option<MorId> {
        self.mor_index.get(name).copied()
    }

    pub fn src(&self, f: MorId) -> ObjId {
        self.morphisms[f.0].src
    }

    pub fn tgt(&self, f: MorId) -> ObjId {
        self.morphisms[f.0].tgt
    }

    pub fn identity(&self, x: ObjId) -> MorId {
        self.identities[x.0]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.identity_of[f.0].is_some()
    }

    /// `g ∘ f`, if composable.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.table[g.0 * self.morphisms.len() + f.0]
    }

    /// Diagrammatic composite `f ; g = g ∘ f`. Panics if not composable.
    pub fn then(&self, f: MorId, g: MorId) -> MorId {
        self.compose(g, f).unwrap_or_else(|| {
            panic!(
                "`{}` and `{}` are not composable",
                self.morphisms[f.0].name, self.morphisms[g.0].name
            )
        })
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &[MorId] {
        &self.homs[x.0 * self.objects.len() + y.0]
    }

    /// Position of `f` inside `hom(src f, tgt f)`.
    pub fn hom_position(&self, f: MorId) -> usize {
        self.hom_pos[f.0]
    }

    /// Morphisms with source `x`.
    pub fn out_of(&self, x: ObjId) -> impl Iterator<Item = &MorId> + '_ {
        let n = self.objects.len();
        self.homs[x.0 * n..(x.0 + 1) * n].iter().flatten()
    }

    pub fn is_idempotent(&self, f: MorId) -> bool {
        self.compose(f, f) == Some(f)
    }

    /// Some inverse of `f`, if `f` is an isomorphism.
    pub fn inverse(&self, f: MorId) -> Option<MorId> {
        let (x, y) = (self.src(f), self.tgt(f));
        self.hom(y, x).iter().copied().find(|&g| {
            self.compose(g, f) == Some(self.identity(x)) && self.compose(f, g) == Some(self.identity(y))
        })
    }

    /// Isomorphism class index of each object, classes numbered in order of
    /// their first member. Computed once per category.
    pub fn iso_class_index(&self) -> &[usize] {
        self.iso_class.get_or_init(|| {
            let n = self.objects.len();
            let mut class = vec![usize::MAX; n];
            let mut next = 0;
            for x in 0..n {
                if class[x] != usize::MAX {
                    continue;
                }
                class[x] = next;
                for y in x + 1..n {
                    if class[y] == usize::MAX && self.isomorphic(ObjId(x), ObjId(y)) {
                        class[y] = next;
                    }
                }
                next += 1;
            }
            class
        })
    }

    /// Whether two objects are isomorphic, by search over morphism pairs.
    pub fn isomorphic(&self, x: ObjId, y: ObjId) -> bool {
        x == y || self.hom(x, y).iter().any(|&f| self.inverse(f).is_some())
    }

    /// Partition of the objects into isomorphism classes.
    pub fn iso_classes(&self) -> Vec<Vec<ObjId>> {
        let index = self.iso_class_index();
        let count = index.iter().copied().max().map_or(0, |c| c + 1);
        let mut classes = vec![Vec::new(); count];
        for (x, &c) in index.iter().enumerate() {
            classes[c].push(ObjId(x));
        }
        classes
    }

    /// Name-level description, suitable for serialization.
    pub fn to_raw(&self) -> RawCategory {
        let mut composition = Vec::new();
        for g in self.morphisms() {
            for f in self.morphisms() {
                if let Some(h) = self.compose(g, f) {
                    composition.push([
                        self.morphism_name(g).to_string(),
                        self.morphism_name(f).to_string(),
                        self.morphism_name(h).to_string(),
                    ]);
                }
            }
        }
        RawCategory {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| RawMorphism {
                    id: m.name.clone(),
                    src: self.objects[m.src.0].clone(),
                    tgt: self.objects[m.tgt.0].clone(),
                })
                .collect(),
            identities: self
                .objects()
                .map(|x| {
                    (
                        self.object_name(x).to_string(),
                        self.morphism_name(self.identity(x)).to_string(),
                    )
                })
                .collect(),
            composition,
        }
    }
}

/// A validated functor between finite categories.
#[derive(Clone)]
pub struct FinFunctor {
    domain: Arc<FinCategory>,
    codomain: Arc<FinCategory>,
    object_map: Vec<ObjId>,
    morphism_map: Vec<MorId>,
}

impl PartialEq for FinFunctor {
    fn eq(&self, other: &Self) -> bool {
        same_category(&self.domain, &other.domain)
            && same_category(&self.codomain, &other.codomain)
            && self.object_map == other.object_map
            && self.morphism_map == other.morphism_map
    }
}

impl fmt::Debug for FinFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinFunctor")
            .field("object_map", &self.object_map)
            .field("morphism_map", &self.morphism_map)
            .finish()
    }
}

pub(crate) fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Which part of a hom-set comparison failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomFailure {
    pub x: String,
    pub y: String,
    pub image_x: String,
    pub image_y: String,
    /// Two distinct morphisms with the same image, if injectivity fails.
    pub collapsed: Option<(String, String)>,
    /// A morphism outside the image, if surjectivity fails.
    pub missed: Option<String>,
}

impl FinFunctor {
    pub fn new(
        domain: Arc<FinCategory>,
        codomain: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        morphism_map: Vec<MorId>,
    ) -> Result<Self, FunctorError> {
        assert_eq!(object_map.len(), domain.object_count());
        assert_eq!(morphism_map.len(), domain.morphism_count());
        let functor = FinFunctor {
            domain,
            codomain,
            object_map,
            morphism_map,
        };
        functor.check()?;
        Ok(functor)
    }

    /// Skips the law checks; callers guarantee a valid functor.
    pub(crate) fn new_unchecked(
        domain: Arc<FinCategory>,
        codomain: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        morphism_map: Vec<MorId>,
    ) -> Self {
        debug_assert!(FinFunctor {
            domain: domain.clone(),
            codomain: codomain.clone(),
            object_map: object_map.clone(),
            morphism_map: morphism_map.clone(),
        }
        .check()
        .is_ok());
        FinFunctor {
            domain,
            codomain,
            object_map,
            morphism_map,
        }
    }

    pub fn from_raw(
        domain: Arc<FinCategory>,
        codomain: Arc<FinCategory>,
        raw: &RawFunctor,
    ) -> Result<Self, FunctorError> {
        for (key, value) in &raw.object_map {
            if domain.object_id(key).is_none() {
                return Err(dangling("object_map", "domain object", key));
            }
            if codomain.object_id(value).is_none() {
                return Err(dangling(&format!("object_map[{key}]"), "codomain object", value));
            }
        }
        for (key, value) in &raw.morphism_map {
            if domain.morphism_id(key).is_none() {
                return Err(dangling("morphism_map", "domain morphism", key));
            }
            if codomain.morphism_id(value).is_none() {
                return Err(dangling(
                    &format!("morphism_map[{key}]"),
                    "codomain morphism",
                    value,
                ));
            }
        }
        let object_map = domain
            .objects()
            .map(|x| {
                let name = domain.object_name(x);
                raw.object_map
                    .get(name)
                    .and_then(|y| codomain.object_id(y))
                    .ok_or_else(|| FunctorError::MissingObjectImage(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let morphism_map = domain
            .morphisms()
            .map(|f| {
                let name = domain.morphism_name(f);
                match raw.morphism_map.get(name) {
                    Some(g) => Ok(codomain.morphism_id(g).expect("checked above")),
                    // identities may be left implicit
                    None if domain.is_identity(f) => {
                        Ok(codomain.identity(object_map[domain.src(f).0]))
                    }
                    None => Err(FunctorError::MissingMorphismImage(name.to_string())),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        FinFunctor::new(domain, codomain, object_map, morphism_map)
    }

    pub fn identity(cat: Arc<FinCategory>) -> Self {
        FinFunctor {
            object_map: cat.objects().collect(),
            morphism_map: cat.morphisms().collect(),
            domain: cat.clone(),
            codomain: cat,
        }
    }

    fn check(&self) -> Result<(), FunctorError> {
        let (dom, cod) = (&*self.domain, &*self.codomain);
        for f in dom.morphisms() {
            let image = self.morphism_map[f.0];
            let mismatch = |end| FunctorError::EndpointMismatch {
                morphism: dom.morphism_name(f).to_string(),
                image: cod.morphism_name(image).to_string(),
                end,
            };
            if cod.src(image) != self.object_map[dom.src(f).0] {
                return Err(mismatch("source"));
            }
            if cod.tgt(image) != self.object_map[dom.tgt(f).0] {
                return Err(mismatch("target"));
            }
        }
        for x in dom.objects() {
            let image = self.morphism_map[dom.identity(x).0];
            if image != cod.identity(self.object_map[x.0]) {
                return Err(FunctorError::IdentityNotPreserved {
                    identity: dom.morphism_name(dom.identity(x)).to_string(),
                    image: cod.morphism_name(image).to_string(),
                });
            }
        }
        for f in dom.morphisms() {
            for &g in dom.out_of(dom.tgt(f)) {
                let gf = dom.then(f, g);
                let expected = cod.then(self.morphism_map[f.0], self.morphism_map[g.0]);
                if self.morphism_map[gf.0] != expected {
                    return Err(FunctorError::CompositionNotPreserved {
                        g: dom.morphism_name(g).to_string(),
                        f: dom.morphism_name(f).to_string(),
                        image: cod.morphism_name(self.morphism_map[gf.0]).to_string(),
                        expected: cod.morphism_name(expected).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &Arc<FinCategory> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FinCategory> {
        &self.codomain
    }

    pub fn object_map(&self) -> &[ObjId] {
        &self.object_map
    }

    pub fn morphism_map(&self) -> &[MorId] {
        &self.morphism_map
    }

    pub fn on_object(&self, x: ObjId) -> ObjId {
        self.object_map[x.0]
    }

    pub fn on_morphism(&self, f: MorId) -> MorId {
        self.morphism_map[f.0]
    }

    pub fn to_raw(&self) -> RawFunctor {
        let (dom, cod) = (&self.domain, &self.codomain);
        RawFunctor {
            object_map: dom
                .objects()
                .map(|x| {
                    (
                        dom.object_name(x).to_string(),
                        cod.object_name(self.on_object(x)).to_string(),
                    )
                })
                .collect(),
            morphism_map: dom
                .morphisms()
                .map(|f| {
                    (
                        dom.morphism_name(f).to_string(),
                        cod.morphism_name(self.on_morphism(f)).to_string(),
                    )
                })
                .collect(),
        }
    }

    /// First hom-set on which the functor is not bijective.
    pub fn fully_faithful_failure(&self) -> Option<HomFailure> {
        let (dom, cod) = (&*self.domain, &*self.codomain);
        let mut seen: Vec<Option<MorId>> = Vec::new();
        for x in dom.objects() {
            for y in dom.objects() {
                let (fx, fy) = (self.on_object(x), self.on_object(y));
                let target = cod.hom(fx, fy);
                seen.clear();
                seen.resize(target.len(), None);
                let failure = |collapsed, missed| HomFailure {
                    x: dom.object_name(x).to_string(),
                    y: dom.object_name(y).to_string(),
                    image_x: cod.object_name(fx).to_string(),
                    image_y: cod.object_name(fy).to_string(),
                    collapsed,
                    missed,
                };
                for &f in dom.hom(x, y) {
                    let slot = &mut seen[cod.hom_position(self.on_morphism(f))];
                    if let Some(prev) = *slot {
                        return Some(failure(
                            Some((
                                dom.morphism_name(prev).to_string(),
                                dom.morphism_name(f).to_string(),
                            )),
                            None,
                        ));
                    }
                    *slot = Some(f);
                }
                if let Some(pos) = seen.iter().position(Option::is_none) {
                    return Some(failure(None, Some(cod.morphism_name(target[pos]).to_string())));
                }
            }
        }
        None
    }

    pub fn is_fully_faithful(&self) -> bool {
        self.fully_faithful_failure().is_none()
    }

    /// A codomain object not isomorphic to any image object.
    pub fn essential_surjectivity_failure(&self) -> Option<ObjId> {
        let cod = &*self.codomain;
        let class = cod.iso_class_index();
        let mut hit = vec![false; cod.object_count()];
        for &y in &self.object_map {
            hit[class[y.0]] = true;
        }
        cod.objects().find(|y| !hit[class[y.0]])
    }

    pub fn is_essentially_surjective(&self) -> bool {
        self.essential_surjectivity_failure().is_none()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_fully_faithful() && self.is_essentially_surjective()
    }

    pub fn is_injective_on_morphisms(&self) -> bool {
        let mut seen = vec![false; self.codomain.morphism_count()];
        self.morphism_map
            .iter()
            .all(|g| !std::mem::replace(&mut seen[g.0], true))
    }
}

fn dangling(context: &str, kind: &'static str, name: &str) -> FunctorError {
    FunctorError::DanglingReference {
        context: context.to_string(),
        kind,
        name: name.to_string(),
    }
}

/// `g ∘ f`.
pub fn compose_functors(g: &FinFunctor, f: &FinFunctor) -> Result<FinFunctor, FunctorError> {
    if !same_category(&f.codomain, &g.domain) {
        return Err(FunctorError::DomainMismatch);
    }
    FinFunctor::new(
        f.domain.clone(),
        g.codomain.clone(),
        f.object_map.iter().map(|&x| g.on_object(x)).collect(),
        f.morphism_map.iter().map(|&m| g.on_morphism(m)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn raw_two_missing_id_after_f() -> RawCategory {
        let mut raw = catalog::arrow().to_raw();
        raw.composition.retain(|[g, f, _]| !(g == "id1" && f == "f"));
        raw
    }

    #[test]
    fn terminal_category_is_valid() {
        let c = catalog::terminal();
        assert_eq!(c.object_count(), 1);
        assert_eq!(c.morphism_count(), 1);
    }

    #[test]
    fn omitted_composite_is_rejected() {
        let err = validate_category(&raw_two_missing_id_after_f()).unwrap_err();
        assert!(matches!(err, CategoryError::NonClosedComposition { .. }), "{err}");
    }

    #[test]
    fn composite_with_wrong_target_is_rejected() {
        // 0 → 1 → 2 where the composite is declared as a second morphism 0 → 1
        let raw: RawCategory = serde_json::from_value(serde_json::json!({
            "objects": ["0", "1", "2"],
            "morphisms": [
                {"id": "i0", "src": "0", "tgt": "0"},
                {"id": "i1", "src": "1", "tgt": "1"},
                {"id": "i2", "src": "2", "tgt": "2"},
                {"id": "a", "src": "0", "tgt": "1"},
                {"id": "b", "src": "1", "tgt": "2"},
                {"id": "ba", "src": "0", "tgt": "1"}
            ],
            "identities": {"0": "i0", "1": "i1", "2": "i2"},
            "composition": [
                ["i0", "i0", "i0"], ["i1", "i1", "i1"], ["i2", "i2", "i2"],
                ["a", "i0", "a"], ["i1", "a", "a"], ["b", "i1", "b"], ["i2", "b", "b"],
                ["ba", "i0", "ba"], ["i1", "ba", "ba"], ["b", "a", "ba"], ["b", "ba", "ba"]
            ]
        }))
        .unwrap();
        let err = validate_category(&raw).unwrap_err();
        assert!(matches!(err, CategoryError::NonClosedComposition { .. }), "{err}");
    }

    #[test]
    fn missing_identity_and_dangling_reference() {
        let mut raw = catalog::arrow().to_raw();
        raw.identities.remove("1");
        assert_eq!(
            validate_category(&raw).unwrap_err(),
            CategoryError::MissingIdentity("1".into())
        );
        let mut raw = catalog::arrow().to_raw();
        raw.morphisms[2].tgt = "7".into();
        assert!(matches!(
            validate_category(&raw).unwrap_err(),
            CategoryError::DanglingReference { .. }
        ));
    }

    #[test]
    fn identity_law_violation_has_witness() {
        // one object, {id, e}, but id ∘ e declared as id
        let raw: RawCategory = serde_json::from_value(serde_json::json!({
            "objects": ["x"],
            "morphisms": [{"id": "id", "src": "x", "tgt": "x"}, {"id": "e", "src": "x", "tgt": "x"}],
            "identities": {"x": "id"},
            "composition": [["id", "id", "id"], ["id", "e", "id"], ["e", "id", "e"], ["e", "e", "e"]]
        }))
        .unwrap();
        let err = validate_category(&raw).unwrap_err();
        assert!(matches!(err, CategoryError::IdentityLawViolation { ref morphism, .. } if morphism == "e"));
    }

    #[test]
    fn associativity_violation_has_witness() {
        // {id, a, b} with a∘a = b, a∘b = a, b∘a = a, b∘b = b: (a∘a)∘a = b∘a = a, a∘(a∘a) = a∘b = a ok;
        // pick a table that breaks: a∘a = a, a∘b = b, b∘a = a, b∘b = a
        let raw: RawCategory = serde_json::from_value(serde_json::json!({
            "objects": ["x"],
            "morphisms": [
                {"id": "id", "src": "x", "tgt": "x"},
                {"id": "a", "src": "x", "tgt": "x"},
                {"id": "b", "src": "x", "tgt": "x"}
            ],
            "identities": {"x": "id"},
            "composition": [
                ["id", "id", "id"], ["id", "a", "a"], ["a", "id", "a"], ["id", "b", "b"], ["b", "id", "b"],
                ["a", "a", "a"], ["a", "b", "b"], ["b", "a", "a"], ["b", "b", "a"]
            ]
        }))
        .unwrap();
        assert!(matches!(
            validate_category(&raw).unwrap_err(),
            CategoryError::AssociativityViolation { .. }
        ));
    }

    #[test]
    fn fully_faithful_examples() {
        let two = Arc::new(catalog::arrow());
        assert!(FinFunctor::identity(two.clone()).is_fully_faithful());
        let collapse = catalog::arrow_to_terminal();
        // hom(1, 0) is empty while hom(*, *) is not
        let failure = collapse.fully_faithful_failure().unwrap();
        assert_eq!((failure.x.as_str(), failure.y.as_str()), ("1", "0"));
        assert_eq!(failure.missed.as_deref(), Some("id"));
        assert!(catalog::point_into_iso().is_fully_faithful());
    }

    #[test]
    fn essential_surjectivity_examples() {
        assert!(FinFunctor::identity(Arc::new(catalog::arrow())).is_essentially_surjective());
        let into_discrete = catalog::point_into_discrete();
        assert!(!into_discrete.is_essentially_surjective());
        assert_eq!(
            into_discrete
                .codomain()
                .object_name(into_discrete.essential_surjectivity_failure().unwrap()),
            "b"
        );
        assert!(catalog::point_into_iso().is_essentially_surjective());
    }

    #[test]
    fn equivalence_examples() {
        assert!(FinFunctor::identity(Arc::new(catalog::arrow())).is_equivalence());
        assert!(catalog::point_into_iso().is_equivalence());
        assert!(!catalog::arrow_to_terminal().is_equivalence());
    }

    #[test]
    fn iso_class_examples() {
        assert_eq!(catalog::discrete2().iso_classes().len(), 2);
        let iso = catalog::iso_pair();
        assert_eq!(iso.iso_classes(), vec![vec![ObjId(0), ObjId(1)]]);
        assert_eq!(catalog::idempotent().iso_classes(), vec![vec![ObjId(0)]]);
    }

    #[test]
    fn composition_examples() {
        let f = catalog::arrow_to_terminal();
        let id_dom = FinFunctor::identity(f.domain().clone());
        let id_cod = FinFunctor::identity(f.codomain().clone());
        assert_eq!(compose_functors(&id_cod, &f).unwrap(), f);
        assert_eq!(compose_functors(&f, &id_dom).unwrap(), f);
        let section = catalog::point_to_arrow_source();
        let composite = compose_functors(&f, &section).unwrap();
        assert_eq!(composite, FinFunctor::identity(section.domain().clone()));
        assert_eq!(
            compose_functors(&section, &section).unwrap_err(),
            FunctorError::DomainMismatch
        );
    }

    #[test]
    fn empty_category_is_legal() {
        let empty = Arc::new(validate_category(&RawCategory::default()).unwrap());
        let id = FinFunctor::identity(empty);
        assert!(id.is_equivalence());
        assert!(id.domain().iso_classes().is_empty());
    }

    #[test]
    fn functor_that_breaks_composition_is_rejected() {
        // E → E sending e to id is fine; E → idempotent sending id to e is not
        let e = Arc::new(catalog::idempotent());
        let eid = e.morphism_id("e").unwrap();
        let err = FinFunctor::new(e.clone(), e.clone(), vec![ObjId(0)], vec![eid, eid]).unwrap_err();
        assert!(matches!(err, FunctorError::IdentityNotPreserved { .. }));
    }
}
