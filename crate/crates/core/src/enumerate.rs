//! Exhaustive and random generation of finite categories and functors.
//!
//! Categories are enumerated up to isomorphism by filling composition
//! tables with associativity pruning and keeping one table per canonical
//! form. Functors are found by backtracking over morphism images with the
//! composition constraints checked as soon as they become decidable.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::fincat::{FinCategory, FinFunctor, MorId, ObjId};

/// Call `visit` on every functor `dom → cod`, in a deterministic order.
pub fn for_each_functor(
    dom: &Arc<FinCategory>,
    cod: &Arc<FinCategory>,
    visit: impl FnMut(FinFunctor) -> ControlFlow<()>,
) -> ControlFlow<()> {
    FunctorSearch::new(dom, cod, false).run(visit)
}

pub fn all_functors(dom: &Arc<FinCategory>, cod: &Arc<FinCategory>) -> Vec<FinFunctor> {
    let mut out = Vec::new();
    let _ = for_each_functor(dom, cod, |f| {
        out.push(f);
        ControlFlow::Continue(())
    });
    out
}

/// An isomorphism of categories `a → b`, if one exists.
pub fn find_isomorphism(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> Option<FinFunctor> {
    if a.object_count() != b.object_count() || a.morphism_count() != b.morphism_count() {
        return None;
    }
    let mut found = None;
    let _ = FunctorSearch::new(a, b, true).run(|f| {
        found = Some(f);
        ControlFlow::Break(())
    });
    found
}

struct FunctorSearch<'a> {
    dom: &'a Arc<FinCategory>,
    cod: &'a Arc<FinCategory>,
    bijective: bool,
    /// Non-identity morphisms of the domain, in assignment order.
    order: Vec<MorId>,
    /// Constraints `(f, g, g∘f)` to check once step `i` is assigned.
    checks: Vec<Vec<(MorId, MorId, MorId)>>,
}

impl<'a> FunctorSearch<'a> {
    fn new(dom: &'a Arc<FinCategory>, cod: &'a Arc<FinCategory>, bijective: bool) -> Self {
        let order: Vec<MorId> = dom.morphisms().filter(|&f| !dom.is_identity(f)).collect();
        let mut step = vec![None; dom.morphism_count()];
        for (i, &f) in order.iter().enumerate() {
            step[f.0] = Some(i);
        }
        let mut checks = vec![Vec::new(); order.len()];
        for f in dom.morphisms() {
            for &g in dom.out_of(dom.tgt(f)) {
                let h = dom.then(f, g);
                if let Some(last) = [step[f.0], step[g.0], step[h.0]].into_iter().flatten().max() {
                    checks[last].push((f, g, h));
                }
            }
        }
        FunctorSearch {
            dom,
            cod,
            bijective,
            order,
            checks,
        }
    }

    fn run(&self, mut visit: impl FnMut(FinFunctor) -> ControlFlow<()>) -> ControlFlow<()> {
        let (n, cn) = (self.dom.object_count(), self.cod.object_count());
        if n > 0 && cn == 0 {
            return ControlFlow::Continue(());
        }
        let mut objects = vec![ObjId(0); n];
        loop {
            if !self.bijective || is_permutation(&objects, cn) {
                let mut morphisms = vec![MorId(usize::MAX); self.dom.morphism_count()];
                let mut used = vec![false; self.cod.morphism_count()];
                for x in self.dom.objects() {
                    let id = self.cod.identity(objects[x.0]);
                    morphisms[self.dom.identity(x).0] = id;
                    used[id.0] = true;
                }
                self.assign(0, &objects, &mut morphisms, &mut used, &mut visit)?;
            }
            // odometer over object maps
            let mut i = 0;
            loop {
                if i == n {
                    return ControlFlow::Continue(());
                }
                objects[i].0 += 1;
                if objects[i].0 < cn {
                    break;
                }
                objects[i] = ObjId(0);
                i += 1;
            }
        }
    }

    fn assign(
        &self,
        step: usize,
        objects: &[ObjId],
        morphisms: &mut Vec<MorId>,
        used: &mut Vec<bool>,
        visit: &mut impl FnMut(FinFunctor) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if step == self.order.len() {
            return visit(FinFunctor::new_unchecked(
                self.dom.clone(),
                self.cod.clone(),
                objects.to_vec(),
                morphisms.clone(),
            ));
        }
        let f = self.order[step];
        let (x, y) = (objects[self.dom.src(f).0], objects[self.dom.tgt(f).0]);
        for &candidate in self.cod.hom(x, y) {
            if self.bijective && used[candidate.0] {
                continue;
            }
            morphisms[f.0] = candidate;
            let consistent = self.checks[step].iter().all(|&(a, b, ab)| {
                self.cod.compose(morphisms[b.0], morphisms[a.0]) == Some(morphisms[ab.0])
            });
            if consistent {
                used[candidate.0] = true;
                let flow = self.assign(step + 1, objects, morphisms, used, visit);
                used[candidate.0] = false;
                flow?;
            }
        }
        morphisms[f.0] = MorId(usize::MAX);
        ControlFlow::Continue(())
    }
}

fn is_permutation(map: &[ObjId], n: usize) -> bool {
    let mut seen = vec![false; n];
    map.iter().all(|x| !std::mem::replace(&mut seen[x.0], true))
}

/// Full subcategory on the given objects, with its inclusion functor.
pub fn full_subcategory(cat: &Arc<FinCategory>, keep: &[ObjId]) -> FinFunctor {
    let mut new_obj = vec![None; cat.object_count()];
    for (i, &x) in keep.iter().enumerate() {
        new_obj[x.0] = Some(ObjId(i));
    }
    let kept: Vec<MorId> = cat
        .morphisms()
        .filter(|&f| new_obj[cat.src(f).0].is_some() && new_obj[cat.tgt(f).0].is_some())
        .collect();
    let mut new_mor = vec![None; cat.morphism_count()];
    for (i, &f) in kept.iter().enumerate() {
        new_mor[f.0] = Some(MorId(i));
    }
    let m = kept.len();
    let mut table = vec![None; m * m];
    for (gi, &g) in kept.iter().enumerate() {
        for (fi, &f) in kept.iter().enumerate() {
            if let Some(h) = cat.compose(g, f) {
                table[gi * m + fi] = new_mor[h.0];
            }
        }
    }
    let sub = FinCategory::from_parts(
        keep.iter().map(|&x| cat.object_name(x).to_string()).collect(),
        kept.iter()
            .map(|&f| {
                (
                    cat.morphism_name(f).to_string(),
                    new_obj[cat.src(f).0].unwrap(),
                    new_obj[cat.tgt(f).0].unwrap(),
                )
            })
            .collect(),
        keep.iter().map(|&x| new_mor[cat.identity(x).0].unwrap()).collect(),
        table,
    )
    .expect("full subcategory of a valid category");
    FinFunctor::new_unchecked(Arc::new(sub), cat.clone(), keep.to_vec(), kept)
}

/// Shape of a category under construction: `k` objects with identities
/// `0..k`, then non-identity morphisms with the given `(src, tgt)`.
struct TableSearch {
    k: usize,
    ends: Vec<(usize, usize)>,
    /// Unknown entries `(g, f)`, both non-identity and composable.
    slots: Vec<(usize, usize)>,
    /// Candidate results per slot.
    candidates: Vec<Vec<usize>>,
    table: Vec<Option<usize>>,
}

impl TableSearch {
    fn new(k: usize, types: &[(usize, usize)]) -> Self {
        let mut ends: Vec<(usize, usize)> = (0..k).map(|x| (x, x)).collect();
        ends.extend_from_slice(types);
        let m = ends.len();
        let mut table = vec![None; m * m];
        let mut slots = Vec::new();
        let mut candidates = Vec::new();
        for g in 0..m {
            for f in 0..m {
                if ends[g].0 != ends[f].1 {
                    continue;
                }
                if g < k {
                    table[g * m + f] = Some(f);
                } else if f < k {
                    table[g * m + f] = Some(g);
                } else {
                    slots.push((g, f));
                    let want = (ends[f].0, ends[g].1);
                    candidates.push((0..m).filter(|&h| ends[h] == want).collect());
                }
            }
        }
        TableSearch {
            k,
            ends,
            slots,
            candidates,
            table,
        }
    }

    fn m(&self) -> usize {
        self.ends.len()
    }

    fn comp(&self, g: usize, f: usize) -> Option<usize> {
        self.table[g * self.m() + f]
    }

    fn associative_so_far(&self) -> bool {
        let m = self.m();
        for f in self.k..m {
            for g in self.k..m {
                if self.ends[g].0 != self.ends[f].1 {
                    continue;
                }
                for h in self.k..m {
                    if self.ends[h].0 != self.ends[g].1 {
                        continue;
                    }
                    let left = self.comp(h, g).and_then(|hg| self.comp(hg, f));
                    let right = self.comp(g, f).and_then(|gf| self.comp(h, gf));
                    if let (Some(l), Some(r)) = (left, right) {
                        if l != r {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Fill remaining slots; `order` permutes candidates (for random search).
    /// Returns false once `budget` nodes are spent or `visit` asks to stop.
    fn fill(
        &mut self,
        slot: usize,
        budget: &mut usize,
        order: &mut dyn FnMut(&mut Vec<usize>),
        visit: &mut dyn FnMut(&TableSearch) -> bool,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if slot == self.slots.len() {
            return visit(self);
        }
        let (g, f) = self.slots[slot];
        let mut options = self.candidates[slot].clone();
        order(&mut options);
        let m = self.m();
        for h in options {
            self.table[g * m + f] = Some(h);
            if self.associative_so_far() && !self.fill(slot + 1, budget, order, visit) {
                self.table[g * m + f] = None;
                return false;
            }
        }
        self.table[g * m + f] = None;
        true
    }

    fn canonical_code(&self) -> Vec<usize> {
        let (k, m) = (self.k, self.m());
        let mut best: Option<Vec<usize>> = None;
        for perm in permutations(k) {
            let new_type = |i: usize| {
                let (s, t) = self.ends[i];
                perm[s] * k + perm[t]
            };
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for i in k..m {
                groups.entry(new_type(i)).or_default().push(i);
            }
            let group_list: Vec<Vec<usize>> = groups.into_values().collect();
            for_each_group_order(&group_list, &mut |labels: &[usize]| {
                // labels[j] = old index placed at new position k + j
                let mut relabel = vec![0; m];
                for x in 0..k {
                    relabel[x] = perm[x];
                }
                for (j, &old) in labels.iter().enumerate() {
                    relabel[old] = k + j;
                }
                let mut code: Vec<usize> = labels.iter().map(|&old| new_type(old)).collect();
                for &g in labels {
                    for &f in labels {
                        code.push(self.comp(g, f).map_or(usize::MAX, |h| relabel[h]));
                    }
                }
                if best.as_ref().is_none_or(|b| code < *b) {
                    best = Some(code);
                }
            });
        }
        best.unwrap_or_default()
    }

    fn build(&self) -> FinCategory {
        let (k, m) = (self.k, self.m());
        let objects = (0..k).map(|x| x.to_string()).collect();
        let morphisms = (0..m)
            .map(|i| {
                let name = if i < k { format!("id{i}") } else { format!("m{}", i - k) };
                (name, ObjId(self.ends[i].0), ObjId(self.ends[i].1))
            })
            .collect();
        let identities = (0..k).map(MorId).collect();
        let table = self.table.iter().map(|e| e.map(MorId)).collect();
        FinCategory::from_parts(objects, morphisms, identities, table)
            .expect("search only emits associative total tables")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn for_each_group_order(groups: &[Vec<usize>], visit: &mut dyn FnMut(&[usize])) {
    fn go(groups: &[Vec<usize>], acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        match groups.split_first() {
            None => visit(acc),
            Some((first, rest)) => {
                for perm in permutations(first.len()) {
                    let len = acc.len();
                    acc.extend(perm.iter().map(|&i| first[i]));
                    go(rest, acc, visit);
                    acc.truncate(len);
                }
            }
        }
    }
    go(groups, &mut Vec::new(), visit);
}

/// Nondecreasing sequences of length `len` over `0..bound`.
fn multisets(len: usize, bound: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, from: usize, bound: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == len {
            out.push(acc.clone());
            return;
        }
        for t in from..bound {
            acc.push(t);
            go(len, t, bound, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(len, 0, bound, &mut Vec::new(), &mut out);
    out
}

/// Every category with at most `max_objects` objects and `max_morphisms`
/// morphisms (identities included), one per isomorphism class, in a
/// deterministic order. The empty category is included.
pub fn enumerate_categories(max_objects: usize, max_morphisms: usize) -> Vec<FinCategory> {
    let mut out = Vec::new();
    for k in 0..=max_objects.min(max_morphisms) {
        for r in 0..=(max_morphisms - k) {
            if k == 0 && r > 0 {
                break;
            }
            let mut seen: BTreeMap<Vec<usize>, FinCategory> = BTreeMap::new();
            for types in multisets(r, k * k) {
                let ends: Vec<(usize, usize)> = types.iter().map(|t| (t / k, t % k)).collect();
                let mut search = TableSearch::new(k, &ends);
                let mut budget = usize::MAX;
                search.fill(0, &mut budget, &mut |_| {}, &mut |s| {
                    let code = s.canonical_code();
                    seen.entry(code).or_insert_with(|| s.build());
                    true
                });
            }
            out.extend(seen.into_values());
        }
    }
    out
}

/// A random category with `1..=max_objects` objects and at most
/// `max_morphisms` morphisms.
pub fn random_category(rng: &mut impl Rng, max_objects: usize, max_morphisms: usize) -> FinCategory {
    assert!(max_objects >= 1 && max_morphisms >= max_objects);
    loop {
        let k = rng.gen_range(1..=max_objects);
        let r = rng.gen_range(0..=max_morphisms - k);
        let mut types: Vec<usize> = (0..r).map(|_| rng.gen_range(0..k * k)).collect();
        types.sort_unstable();
        let ends: Vec<(usize, usize)> = types.iter().map(|t| (t / k, t % k)).collect();
        let mut search = TableSearch::new(k, &ends);
        let mut budget = 20_000;
        let mut found = None;
        let mut shuffle_rng = rand_chacha::ChaCha8Rng::from_rng(&mut *rng).expect("seeding");
        search.fill(
            0,
            &mut budget,
            &mut |options: &mut Vec<usize>| options.shuffle(&mut shuffle_rng),
            &mut |s| {
                found = Some(s.build());
                false
            },
        );
        if let Some(cat) = found {
            return cat;
        }
    }
}
