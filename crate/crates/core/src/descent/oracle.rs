//! Bounded brute-force oracles over finite-set-valued functors.
//!
//! Everything here enumerates functors into the skeletal finite sets
//! `{0, …, k-1}` with `k ≤ n`. Results are evidence at the bound: a failure
//! is a genuine counterexample, a pass says nothing beyond the bound.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::Error;
use crate::fincat::{FinCategory, FinFunctor, MorId, ObjId};
use crate::kernel::KernelPairDiagram;
use crate::laxepi::DisjointSet;
use crate::verdict::{Bound, Resource, Verdict, Witness};

use super::DescentReport;

/// A function between skeletal finite sets, as its table.
pub type Map = Vec<usize>;

/// A functor into skeletal finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundedPresheaf {
    pub sizes: Vec<usize>,
    /// Function table of every morphism, identities included.
    pub maps: Vec<Map>,
}

impl BoundedPresheaf {
    /// Name-level rendering, identities omitted.
    pub fn to_json(&self, c: &FinCategory) -> serde_json::Value {
        let sets: serde_json::Map<String, serde_json::Value> = c
            .objects()
            .map(|x| (c.object_name(x).to_string(), json!(self.sizes[x.0])))
            .collect();
        let maps: serde_json::Map<String, serde_json::Value> = c
            .morphisms()
            .filter(|&f| !c.is_identity(f))
            .map(|f| (c.morphism_name(f).to_string(), json!(self.maps[f.0])))
            .collect();
        json!({ "sets": sets, "maps": maps })
    }

    /// Precomposition with `p`.
    pub fn restrict(&self, p: &FinFunctor) -> BoundedPresheaf {
        BoundedPresheaf {
            sizes: p.object_map().iter().map(|y| self.sizes[y.0]).collect(),
            maps: p.morphism_map().iter().map(|g| self.maps[g.0].clone()).collect(),
        }
    }

    /// Whether identities act trivially and composites compose.
    pub fn is_functor(&self, c: &FinCategory) -> bool {
        c.objects().all(|x| self.maps[c.identity(x).0] == identity_map(self.sizes[x.0]))
            && c.morphisms().all(|f| {
                c.out_of(c.tgt(f))
                    .all(|&g| self.maps[c.then(f, g).0] == compose(&self.maps[g.0], &self.maps[f.0]))
            })
    }
}

/// Components of a transformation, one map per object.
pub type Transformation = Vec<Map>;

/// `g ∘ f` on tables.
fn compose(g: &[usize], f: &[usize]) -> Map {
    f.iter().map(|&i| g[i]).collect()
}

fn identity_map(n: usize) -> Map {
    (0..n).collect()
}

fn is_bijection(f: &[usize], target: usize) -> bool {
    f.len() == target && {
        let mut hit = vec![false; target];
        f.iter().all(|&i| !std::mem::replace(&mut hit[i], true))
    }
}

/// Every function `{0..from} → {0..to}` in lexicographic order.
fn all_maps(from: usize, to: usize) -> Vec<Map> {
    if from > 0 && to == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut f = vec![0; from];
    loop {
        out.push(f.clone());
        let mut i = from;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            f[i] += 1;
            if f[i] < to {
                break;
            }
            f[i] = 0;
        }
    }
}

/// Counts enumerated structures against a cap.
#[derive(Debug)]
pub struct Budget {
    cap: usize,
    used: usize,
}

impl Budget {
    pub fn new(cap: usize) -> Self {
        Budget { cap, used: 0 }
    }

    fn spend(&mut self) -> Result<(), Bound> {
        self.used += 1;
        if self.used > self.cap {
            Err(Bound {
                resource: Resource::EnumerationCap,
                limit: self.cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> usize {
        self.used
    }
}

/// All functors `c → FinSet` with every set of size at most `n`, ordered by
/// size vector and then by function tables.
pub fn enumerate_presheaves(c: &FinCategory, n: usize, budget: &mut Budget) -> Result<Vec<BoundedPresheaf>, Bound> {
    let free: Vec<MorId> = c.morphisms().filter(|&f| !c.is_identity(f)).collect();
    let mut out = Vec::new();
    let mut sizes = vec![0; c.object_count()];
    loop {
        let mut maps: Vec<Option<Map>> = vec![None; c.morphism_count()];
        for x in c.objects() {
            maps[c.identity(x).0] = Some(identity_map(sizes[x.0]));
        }
        let options: Vec<Vec<Map>> = free
            .iter()
            .map(|&f| all_maps(sizes[c.src(f).0], sizes[c.tgt(f).0]))
            .collect();
        let mut result = Ok(());
        let _ = assign_presheaf(c, &free, &options, 0, &mut maps, &mut |maps| {
            if let Err(b) = budget.spend() {
                result = Err(b);
                return ControlFlow::Break(());
            }
            out.push(BoundedPresheaf {
                sizes: sizes.clone(),
                maps: maps.iter().map(|m| m.clone().unwrap()).collect(),
            });
            ControlFlow::Continue(())
        });
        result?;
        // next size vector
        let mut i = sizes.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            sizes[i] += 1;
            if sizes[i] <= n {
                break;
            }
            sizes[i] = 0;
        }
    }
}

fn assign_presheaf(
    c: &FinCategory,
    free: &[MorId],
    options: &[Vec<Map>],
    depth: usize,
    maps: &mut Vec<Option<Map>>,
    visit: &mut dyn FnMut(&[Option<Map>]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let Some(&f) = free.get(depth) else {
        return visit(maps);
    };
    for option in &options[depth] {
        maps[f.0] = Some(option.clone());
        if consistent_at(c, maps, f) {
            assign_presheaf(c, free, options, depth + 1, maps, visit)?;
        }
    }
    maps[f.0] = None;
    ControlFlow::Continue(())
}

/// Functoriality on every fully assigned triple involving `f`.
fn consistent_at(c: &FinCategory, maps: &[Option<Map>], f: MorId) -> bool {
    c.morphisms().all(|h| {
        c.out_of(c.tgt(h)).all(|&g| {
            let gh = c.then(h, g);
            if g != f && h != f && gh != f {
                return true;
            }
            match (&maps[g.0], &maps[h.0], &maps[gh.0]) {
                (Some(mg), Some(mh), Some(mgh)) => compose(mg, mh) == *mgh,
                _ => true,
            }
        })
    })
}

/// `φ_tgt ∘ left = right ∘ φ_src` for maps between the sets indexed by
/// `src` and `tgt`.
struct Square<'a> {
    src: usize,
    tgt: usize,
    left: &'a [usize],
    right: &'a [usize],
}

/// Backtracking over component maps `F(x) → G(x)` subject to squares.
fn solve_components(
    from: &[usize],
    to: &[usize],
    squares: &[Square<'_>],
    bijective: bool,
    visit: &mut dyn FnMut(&[Map]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = from.len();
    let options: Vec<Vec<Map>> = (0..n)
        .map(|x| {
            all_maps(from[x], to[x])
                .into_iter()
                .filter(|m| !bijective || is_bijection(m, to[x]))
                .collect()
        })
        .collect();
    // squares checked once both ends are assigned
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, s) in squares.iter().enumerate() {
        due[s.src.max(s.tgt)].push(i);
    }
    let mut chosen: Vec<Map> = Vec::with_capacity(n);
    fn go(
        x: usize,
        options: &[Vec<Map>],
        squares: &[Square<'_>],
        due: &[Vec<usize>],
        chosen: &mut Vec<Map>,
        visit: &mut dyn FnMut(&[Map]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if x == options.len() {
            return visit(chosen);
        }
        for option in &options[x] {
            chosen.push(option.clone());
            let ok = due[x].iter().all(|&i| {
                let s = &squares[i];
                compose(&chosen[s.tgt], s.left) == compose(s.right, &chosen[s.src])
            });
            if ok {
                go(x + 1, options, squares, due, chosen, visit)?;
            }
            chosen.pop();
        }
        ControlFlow::Continue(())
    }
    go(0, &options, squares, &due, &mut chosen, visit)
}

fn naturality_squares<'a>(c: &FinCategory, f: &'a BoundedPresheaf, g: &'a BoundedPresheaf) -> Vec<Square<'a>> {
    c.morphisms()
        .filter(|&m| !c.is_identity(m))
        .map(|m| Square {
            src: c.src(m).0,
            tgt: c.tgt(m).0,
            left: &f.maps[m.0],
            right: &g.maps[m.0],
        })
        .collect()
}

/// All natural transformations `f → g`.
pub fn transformations(c: &FinCategory, f: &BoundedPresheaf, g: &BoundedPresheaf) -> Vec<Transformation> {
    let mut out = Vec::new();
    let _ = solve_components(&f.sizes, &g.sizes, &naturality_squares(c, f, g), false, &mut |t| {
        out.push(t.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Pointwise left Kan extension along `p`, with the unit `F → (Lan F)∘p`.
#[derive(Debug, Clone)]
pub struct LeftKanExtension {
    pub presheaf: BoundedPresheaf,
    /// For each target object `y`, the triples `(a, u: pa → y, s ∈ F a)` in
    /// enumeration order and the class of each.
    elements: Vec<Vec<(usize, MorId, usize)>>,
    class: Vec<Vec<usize>>,
}

impl LeftKanExtension {
    fn class_of(&self, y: ObjId, a: usize, u: MorId, s: usize) -> usize {
        let i = self.elements[y.0]
            .iter()
            .position(|&t| t == (a, u, s))
            .expect("element of the comma colimit");
        self.class[y.0][i]
    }
}

/// `(Lan_p F)(y)` is the colimit of `F` over the comma category `p ↓ y`.
pub fn oracle_lan(p: &FinFunctor, f: &BoundedPresheaf) -> BoundedPresheaf {
    lan(p, f).presheaf
}

fn lan(p: &FinFunctor, f: &BoundedPresheaf) -> LeftKanExtension {
    let (e, b) = (p.domain(), p.codomain());
    let mut elements = Vec::with_capacity(b.object_count());
    let mut classes = Vec::with_capacity(b.object_count());
    let mut sizes = Vec::with_capacity(b.object_count());
    for y in b.objects() {
        let mut elems = Vec::new();
        for a in e.objects() {
            for &u in b.hom(p.on_object(a), y) {
                for s in 0..f.sizes[a.0] {
                    elems.push((a.0, u, s));
                }
            }
        }
        let position = |t: (usize, MorId, usize)| elems.iter().position(|&x| x == t).unwrap();
        let mut dsu = DisjointSet::new(elems.len());
        // (a, u∘pw, s) ~ (a', u, F(w) s) for w: a → a'
        for w in e.morphisms().filter(|&w| !e.is_identity(w)) {
            let (a, a2) = (e.src(w), e.tgt(w));
            for &u in b.hom(p.on_object(a2), y) {
                let upw = b.compose(u, p.on_morphism(w)).unwrap();
                for s in 0..f.sizes[a.0] {
                    dsu.union(position((a.0, upw, s)), position((a2.0, u, f.maps[w.0][s])));
                }
            }
        }
        let roots: Vec<usize> = (0..elems.len()).map(|i| dsu.find(i)).collect();
        let mut numbering = vec![usize::MAX; elems.len()];
        let mut count = 0;
        let class: Vec<usize> = roots
            .iter()
            .map(|&r| {
                if numbering[r] == usize::MAX {
                    numbering[r] = count;
                    count += 1;
                }
                numbering[r]
            })
            .collect();
        elements.push(elems);
        classes.push(class);
        sizes.push(count);
    }
    let mut ext = LeftKanExtension {
        presheaf: BoundedPresheaf {
            sizes,
            maps: Vec::new(),
        },
        elements,
        class: classes,
    };
    let maps = b
        .morphisms()
        .map(|g| {
            let (y, y2) = (b.src(g), b.tgt(g));
            let mut table = vec![usize::MAX; ext.presheaf.sizes[y.0]];
            for (i, &(a, u, s)) in ext.elements[y.0].iter().enumerate() {
                let gu = b.compose(g, u).unwrap();
                table[ext.class[y.0][i]] = ext.class_of(y2, a, gu, s);
            }
            table
        })
        .collect();
    ext.presheaf.maps = maps;
    debug_assert!(ext.presheaf.is_functor(b));
    ext
}

/// `Lan_p α` on components.
fn lan_transformation(p: &FinFunctor, source: &LeftKanExtension, target: &LeftKanExtension, alpha: &Transformation) -> Transformation {
    p.codomain()
        .objects()
        .map(|y| {
            let mut table = vec![usize::MAX; source.presheaf.sizes[y.0]];
            for (i, &(a, u, s)) in source.elements[y.0].iter().enumerate() {
                table[source.class[y.0][i]] = target.class_of(y, a, u, alpha[a][s]);
            }
            table
        })
        .collect()
}

/// Whether `Lan_p` is bijective on transformations between all functors of
/// size at most `n`.
pub fn oracle_lan_ff_probe(p: &FinFunctor, n: usize, cap: usize) -> Verdict<bool> {
    let (e, b) = (p.domain(), p.codomain());
    let mut budget = Budget::new(cap);
    let presheaves = match enumerate_presheaves(e, n, &mut budget) {
        Ok(ps) => ps,
        Err(bound) => return Verdict::Undecided(bound),
    };
    let extensions: Vec<LeftKanExtension> = presheaves.iter().map(|f| lan(p, f)).collect();
    for (fi, f) in presheaves.iter().enumerate() {
        for (gi, g) in presheaves.iter().enumerate() {
            let (lf, lg) = (&extensions[fi], &extensions[gi]);
            let witness = |detail: String| {
                Verdict::No(Witness::LanNotFullyFaithful {
                    source: f.to_json(e),
                    target: g.to_json(e),
                    detail,
                })
            };
            let mut images: Vec<(Transformation, Transformation)> = Vec::new();
            for alpha in transformations(e, f, g) {
                let image = lan_transformation(p, lf, lg, &alpha);
                if let Some((prev, _)) = images.iter().find(|(_, im)| *im == image) {
                    return witness(format!(
                        "transformations {prev:?} and {alpha:?} have the same extension {image:?}"
                    ));
                }
                images.push((alpha, image));
            }
            let targets = transformations(b, &lf.presheaf, &lg.presheaf);
            if let Some(missed) = targets.iter().find(|t| !images.iter().any(|(_, im)| im == *t)) {
                return witness(format!("transformation {missed:?} between the extensions is not an extension"));
            }
        }
    }
    Verdict::Yes(true)
}

/// A functor on `e` with gluing maps `σ(u,v): F u → F v` over `e ×_b e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedDescentDatum {
    pub presheaf: BoundedPresheaf,
    /// One map per object of `e ×_b e`.
    pub sigma: Vec<Map>,
}

impl BoundedDescentDatum {
    pub fn to_json(&self, d: &KernelPairDiagram) -> serde_json::Value {
        let x1 = &d.x1.category;
        let sigma: serde_json::Map<String, serde_json::Value> = x1
            .objects()
            .map(|a| (x1.object_name(a).to_string(), json!(self.sigma[a.0])))
            .collect();
        json!({ "presheaf": self.presheaf.to_json(d.x0()), "sigma": sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Largest set size.
    pub bound: usize,
    /// Most presheaves and data enumerated in one run.
    pub cap: usize,
    /// Require every gluing map to be a bijection.
    pub invertible: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            bound: 2,
            cap: 1_000_000,
            invertible: false,
        }
    }
}

/// Gluing squares for data `(F, σ)` and `(G, τ)`: `φ_v ∘ σ = τ ∘ φ_u`.
fn gluing_squares<'a>(d: &KernelPairDiagram, sigma: &'a [Map], tau: &'a [Map]) -> Vec<Square<'a>> {
    d.x1.category
        .objects()
        .map(|a| Square {
            src: d.d1.on_object(a).0,
            tgt: d.d0.on_object(a).0,
            left: &sigma[a.0],
            right: &tau[a.0],
        })
        .collect()
}

/// Every bounded descent datum on the kernel of `p`.
pub fn enumerate_descent_data(
    d: &KernelPairDiagram,
    options: &OracleOptions,
    budget: &mut Budget,
) -> Result<Vec<BoundedDescentDatum>, Bound> {
    let e = d.x0();
    let x1 = &d.x1.category;
    let x2 = &d.x2.category;
    let mut out = Vec::new();
    for f in enumerate_presheaves(e, options.bound, budget)? {
        let ends: Vec<(usize, usize)> = x1
            .objects()
            .map(|a| (d.d1.on_object(a).0, d.d0.on_object(a).0))
            .collect();
        let choices: Vec<Vec<Map>> = x1
            .objects()
            .map(|a| {
                let (u, v) = ends[a.0];
                if u == v && d.s0.on_object(ObjId(u)) == a {
                    vec![identity_map(f.sizes[u])]
                } else {
                    all_maps(f.sizes[u], f.sizes[v])
                        .into_iter()
                        .filter(|m| !options.invertible || is_bijection(m, f.sizes[v]))
                        .collect()
                }
            })
            .collect();
        // constraints due when their last X1 object is assigned
        let mut due_nat: Vec<Vec<MorId>> = vec![Vec::new(); x1.object_count()];
        for m in x1.morphisms().filter(|&m| !x1.is_identity(m)) {
            due_nat[x1.src(m).0.max(x1.tgt(m).0)].push(m);
        }
        let mut due_cocycle: Vec<Vec<[ObjId; 3]>> = vec![Vec::new(); x1.object_count()];
        for g in x2.objects() {
            let faces = [
                d.faces[0].on_object(g),
                d.faces[1].on_object(g),
                d.faces[2].on_object(g),
            ];
            let last = faces.iter().map(|a| a.0).max().unwrap();
            due_cocycle[last].push(faces);
        }
        let mut sigma: Vec<Map> = Vec::with_capacity(x1.object_count());
        let mut result = Ok(());
        let _ = assign_sigma(
            0,
            &choices,
            &due_nat,
            &due_cocycle,
            d,
            &f,
            &mut sigma,
            &mut |sigma| {
                if let Err(b) = budget.spend() {
                    result = Err(b);
                    return ControlFlow::Break(());
                }
                out.push(BoundedDescentDatum {
                    presheaf: f.clone(),
                    sigma: sigma.to_vec(),
                });
                ControlFlow::Continue(())
            },
        );
        result?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn assign_sigma(
    a: usize,
    choices: &[Vec<Map>],
    due_nat: &[Vec<MorId>],
    due_cocycle: &[Vec<[ObjId; 3]>],
    d: &KernelPairDiagram,
    f: &BoundedPresheaf,
    sigma: &mut Vec<Map>,
    visit: &mut dyn FnMut(&[Map]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if a == choices.len() {
        return visit(sigma);
    }
    let x1 = &d.x1.category;
    for option in &choices[a] {
        sigma.push(option.clone());
        // σβ ∘ F(f) = F(g) ∘ σα for (f, g): α → β
        let natural = due_nat[a].iter().all(|&m| {
            let (alpha, beta) = (x1.src(m), x1.tgt(m));
            let (fm, gm) = (d.d1.on_morphism(m), d.d0.on_morphism(m));
            compose(&sigma[beta.0], &f.maps[fm.0]) == compose(&f.maps[gm.0], &sigma[alpha.0])
        });
        // σ∂1 = σ∂0 ∘ σ∂2
        let cocycle = natural
            && due_cocycle[a]
                .iter()
                .all(|[d0, d1, d2]| sigma[d1.0] == compose(&sigma[d0.0], &sigma[d2.0]));
        if cocycle {
            assign_sigma(a + 1, choices, due_nat, due_cocycle, d, f, sigma, visit)?;
        }
        sigma.pop();
    }
    ControlFlow::Continue(())
}

/// The bounded descent category of `p` and the comparison `H ↦ (H∘p, id)`.
#[derive(Debug, Clone)]
pub struct DescentOracle {
    pub options: OracleOptions,
    pub data: Vec<BoundedDescentDatum>,
    pub presheaves: Vec<BoundedPresheaf>,
    /// Whether the comparison is bijective on morphisms between the
    /// bounded functors on `b`.
    pub comparison_ff: Verdict<bool>,
    /// Indices into `data` of the data not isomorphic to a comparison image.
    pub unmatched: Vec<usize>,
}

pub fn oracle_descent_category(d: &KernelPairDiagram, options: &OracleOptions) -> Result<DescentOracle, Error> {
    let p = &d.p;
    let (e, b) = (p.domain(), p.codomain());
    let mut budget = Budget::new(options.cap);
    let exceeded = |bound: Bound| Error::ResourceExceeded(bound.to_string());
    let data = enumerate_descent_data(d, options, &mut budget).map_err(exceeded)?;
    let presheaves = enumerate_presheaves(b, options.bound, &mut budget).map_err(exceeded)?;
    let restricted: Vec<BoundedPresheaf> = presheaves.iter().map(|h| h.restrict(p)).collect();
    let identity_sigma = |f: &BoundedPresheaf| -> Vec<Map> {
        d.x1.category
            .objects()
            .map(|a| identity_map(f.sizes[d.d1.on_object(a).0]))
            .collect()
    };
    let sigmas: Vec<Vec<Map>> = restricted.iter().map(identity_sigma).collect();

    let mut comparison_ff = Verdict::Yes(true);
    'pairs: for (hi, h) in presheaves.iter().enumerate() {
        for (ki, k) in presheaves.iter().enumerate() {
            let (hp, kp) = (&restricted[hi], &restricted[ki]);
            let mut squares = naturality_squares(e, hp, kp);
            squares.extend(gluing_squares(d, &sigmas[hi], &sigmas[ki]));
            let mut targets: Vec<Transformation> = Vec::new();
            let _ = solve_components(&hp.sizes, &kp.sizes, &squares, false, &mut |t| {
                targets.push(t.to_vec());
                ControlFlow::Continue(())
            });
            let mut images: Vec<(Transformation, Transformation)> = Vec::new();
            let witness = |detail: String| {
                Verdict::No(Witness::ComparisonNotFullyFaithful {
                    source: h.to_json(b),
                    target: k.to_json(b),
                    detail,
                })
            };
            for alpha in transformations(b, h, k) {
                let image: Transformation = p.object_map().iter().map(|y| alpha[y.0].clone()).collect();
                if let Some((prev, _)) = images.iter().find(|(_, im)| *im == image) {
                    comparison_ff = witness(format!(
                        "transformations {prev:?} and {alpha:?} restrict to the same morphism of data"
                    ));
                    break 'pairs;
                }
                images.push((alpha, image));
            }
            if let Some(missed) = targets.iter().find(|t| !images.iter().any(|(_, im)| im == *t)) {
                comparison_ff = witness(format!("morphism of data {missed:?} is not a restriction"));
                break 'pairs;
            }
        }
    }

    let mut unmatched = Vec::new();
    for (i, datum) in data.iter().enumerate() {
        let matched = restricted.iter().enumerate().any(|(hi, hp)| {
            if hp.sizes != datum.presheaf.sizes {
                return false;
            }
            let mut squares = naturality_squares(e, &datum.presheaf, hp);
            squares.extend(gluing_squares(d, &datum.sigma, &sigmas[hi]));
            solve_components(&datum.presheaf.sizes, &hp.sizes, &squares, true, &mut |_| ControlFlow::Break(()))
                .is_break()
        });
        if !matched {
            unmatched.push(i);
        }
    }
    Ok(DescentOracle {
        options: *options,
        data,
        presheaves,
        comparison_ff,
        unmatched,
    })
}

/// Check a report against the bounded oracle: descent forces a fully
/// faithful bounded comparison, and effective descent forces every bounded
/// datum to come from a bounded functor on `b`.
///
/// The second check is sound at the bound because, under effective descent,
/// every object of `b` is a retract of an object in the image of `p`, so the
/// functor a datum descends to has sets no larger than the datum's.
pub fn oracle_consistency(d: &KernelPairDiagram, report: &DescentReport, options: &OracleOptions) -> Result<Verdict<bool>, Error> {
    let oracle = match oracle_descent_category(d, options) {
        Ok(o) => o,
        Err(Error::ResourceExceeded(_)) => {
            return Ok(Verdict::Undecided(Bound {
                resource: Resource::EnumerationCap,
                limit: options.cap,
            }))
        }
        Err(e) => return Err(e),
    };
    Ok(consistency_of(d, report, &oracle))
}

pub fn consistency_of(d: &KernelPairDiagram, report: &DescentReport, oracle: &DescentOracle) -> Verdict<bool> {
    if report.descent_set {
        if let Verdict::No(w) = &oracle.comparison_ff {
            return Verdict::No(w.clone());
        }
    }
    if report.effective_descent_set.holds() {
        if let Some(&i) = oracle.unmatched.first() {
            return Verdict::No(Witness::UnmatchedDescentDatum {
                datum: oracle.data[i].to_json(d),
            });
        }
    }
    Verdict::Yes(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::kernel::higher_kernel;
    use std::sync::Arc;

    #[test]
    fn all_maps_counts() {
        assert_eq!(all_maps(2, 3).len(), 9);
        assert_eq!(all_maps(0, 0), vec![Vec::<usize>::new()]);
        assert!(all_maps(1, 0).is_empty());
    }

    #[test]
    fn presheaves_on_the_arrow() {
        let mut budget = Budget::new(1000);
        let ps = enumerate_presheaves(&catalog::arrow(), 2, &mut budget).unwrap();
        assert_eq!(ps.len(), 11);
        assert!(ps.iter().all(|f| f.is_functor(&catalog::arrow())));
        let ps = enumerate_presheaves(&catalog::idempotent(), 2, &mut budget).unwrap();
        // idempotent self-maps of sets of size 0, 1, 2
        assert_eq!(ps.len(), 1 + 1 + 3);
    }

    #[test]
    fn presheaf_cap_is_enforced() {
        let mut budget = Budget::new(5);
        assert_eq!(
            enumerate_presheaves(&catalog::arrow(), 2, &mut budget),
            Err(Bound {
                resource: Resource::EnumerationCap,
                limit: 5
            })
        );
    }

    #[test]
    fn lan_examples() {
        let f = BoundedPresheaf {
            sizes: vec![3],
            maps: vec![vec![0, 1, 2]],
        };
        let lan = oracle_lan(&catalog::point_to_arrow_source(), &f);
        assert_eq!(lan.sizes, vec![3, 3]);
        let arrow = catalog::arrow();
        assert!(is_bijection(&lan.maps[arrow.morphism_id("f").unwrap().0], 3));

        let lan = oracle_lan(&catalog::point_into_discrete(), &f);
        assert_eq!(lan.sizes, vec![3, 0]);

        let id = catalog::identity_on_arrow();
        let mut budget = Budget::new(1000);
        for g in enumerate_presheaves(&arrow, 2, &mut budget).unwrap() {
            assert_eq!(oracle_lan(&id, &g).sizes, g.sizes);
        }
    }

    #[test]
    fn lan_probe() {
        assert!(oracle_lan_ff_probe(&catalog::point_into_iso(), 2, 1_000_000).holds());
        assert!(matches!(
            oracle_lan_ff_probe(&catalog::arrow_to_terminal(), 2, 1_000_000),
            Verdict::No(Witness::LanNotFullyFaithful { .. })
        ));
        let empty = Arc::new(crate::enumerate::enumerate_categories(0, 0).remove(0));
        let p = FinFunctor::new(empty, Arc::new(catalog::arrow()), vec![], vec![]).unwrap();
        assert!(oracle_lan_ff_probe(&p, 2, 1_000_000).holds());
    }

    #[test]
    fn descent_category_of_identity() {
        let d = higher_kernel(&catalog::identity_on_arrow()).unwrap();
        let o = oracle_descent_category(&d, &OracleOptions { bound: 1, ..Default::default() }).unwrap();
        assert!(o.unmatched.is_empty());
        assert!(o.comparison_ff.holds());
        assert_eq!(o.data.len(), o.presheaves.len());
    }

    #[test]
    fn descent_category_of_discrete_to_point() {
        let d = higher_kernel(&catalog::discrete_to_terminal()).unwrap();
        let o = oracle_descent_category(&d, &OracleOptions { bound: 1, ..Default::default() }).unwrap();
        // (0,0) and (1,1) with σ forced; (0,1), (1,0) admit no σ
        assert_eq!(o.data.len(), 2);
        assert!(o.unmatched.is_empty());
        assert!(o.comparison_ff.holds());
    }

    #[test]
    fn descent_category_of_point_into_discrete() {
        let d = higher_kernel(&catalog::point_into_discrete()).unwrap();
        let o = oracle_descent_category(&d, &OracleOptions::default()).unwrap();
        assert!(o.unmatched.is_empty());
        assert!(matches!(o.comparison_ff, Verdict::No(Witness::ComparisonNotFullyFaithful { .. })));
    }

    #[test]
    fn invertible_variant_agrees_on_kernels() {
        for (_, p) in catalog::curated() {
            let d = higher_kernel(&p).unwrap();
            let lax = oracle_descent_category(&d, &OracleOptions::default()).unwrap();
            let strict = oracle_descent_category(
                &d,
                &OracleOptions {
                    invertible: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(lax.data, strict.data);
        }
    }
}
