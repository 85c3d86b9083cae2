//! Finitely presented categories and their word problem.
//!
//! A [`Presentation`] is a finite graph with relations between parallel
//! paths. Paths are stored in diagrammatic order: `[f, g]` is "first `f`,
//! then `g`", i.e. the composite `g ∘ f`. The empty path at a node is its
//! identity.
//!
//! Equality of paths is decided by Knuth–Bendix completion under the
//! length-lexicographic order, generators compared by declaration index.
//! Once a system is complete, the normal forms from a node are exactly the
//! paths avoiding every left-hand side; they are explored with a suffix
//! automaton whose states remember the last `L - 1` generators (`L` the
//! longest left-hand side), so a reachable cycle is a pumpable family of
//! normal forms and proves a hom-set infinite.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, PresentationError};
use crate::fincat::{FinCategory, MorId, ObjId};
use crate::verdict::{Bound, Resource, Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GenId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub src: NodeId,
    pub tgt: NodeId,
}

/// A path in the generating graph, in diagrammatic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub src: NodeId,
    pub tgt: NodeId,
    pub edges: Vec<GenId>,
}

impl Path {
    pub fn empty(at: NodeId) -> Self {
        Path {
            src: at,
            tgt: at,
            edges: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }
}

/// Length-lexicographic comparison of generator words.
pub fn shortlex(a: &[GenId], b: &[GenId]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    nodes: Vec<String>,
    generators: Vec<Generator>,
    relations: Vec<(Path, Path)>,
}

/// Serialized presentation. Relation sides list generator names in
/// diagrammatic order; `at` names the node when a side is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RawPresentation {
    pub nodes: Vec<String>,
    pub generators: Vec<RawGenerator>,
    pub relations: Vec<RawRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGenerator {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRelation {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
}

impl Presentation {
    pub fn new(
        nodes: Vec<String>,
        generators: Vec<Generator>,
        relations: Vec<(Path, Path)>,
    ) -> Result<Self, PresentationError> {
        let mut seen = HashMap::new();
        for name in &nodes {
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(PresentationError::DuplicateNode(name.clone()));
            }
        }
        let mut seen = HashMap::new();
        for g in &generators {
            if seen.insert(g.name.as_str(), ()).is_some() {
                return Err(PresentationError::DuplicateGenerator(g.name.clone()));
            }
            for end in [g.src, g.tgt] {
                if end.0 >= nodes.len() {
                    return Err(PresentationError::DanglingReference {
                        context: format!("generator `{}`", g.name),
                        kind: "node",
                        name: end.0.to_string(),
                    });
                }
            }
        }
        let p = Presentation {
            nodes,
            generators,
            relations,
        };
        for (i, (l, r)) in p.relations.iter().enumerate() {
            p.check_path(l, &format!("relation {i}"))?;
            p.check_path(r, &format!("relation {i}"))?;
            if l.src != r.src || l.tgt != r.tgt {
                return Err(PresentationError::NonParallelRelation { index: i });
            }
        }
        Ok(p)
    }

    fn check_path(&self, path: &Path, context: &str) -> Result<(), PresentationError> {
        let broken = |position| PresentationError::BrokenPath {
            context: context.to_string(),
            position,
        };
        let mut at = path.src;
        if at.0 >= self.nodes.len() || path.tgt.0 >= self.nodes.len() {
            return Err(broken(0));
        }
        for (i, g) in path.edges.iter().enumerate() {
            let gen = self.generators.get(g.0).ok_or_else(|| broken(i))?;
            if gen.src != at {
                return Err(broken(i));
            }
            at = gen.tgt;
        }
        if at != path.tgt {
            return Err(broken(path.edges.len()));
        }
        Ok(())
    }

    /// Presentation with every morphism of `cat` as a generator, identities
    /// related to empty paths and the full composition table as relations.
    pub fn from_category(cat: &FinCategory) -> Self {
        let nodes = cat.object_names().to_vec();
        let generators: Vec<Generator> = cat
            .morphisms()
            .map(|f| Generator {
                name: cat.morphism_name(f).to_string(),
                src: NodeId(cat.src(f).0),
                tgt: NodeId(cat.tgt(f).0),
            })
            .collect();
        let single = |f: MorId| Path {
            src: NodeId(cat.src(f).0),
            tgt: NodeId(cat.tgt(f).0),
            edges: vec![GenId(f.0)],
        };
        let mut relations = Vec::new();
        for x in cat.objects() {
            relations.push((single(cat.identity(x)), Path::empty(NodeId(x.0))));
        }
        for f in cat.morphisms() {
            for &g in cat.out_of(cat.tgt(f)) {
                let h = cat.then(f, g);
                relations.push((
                    Path {
                        src: NodeId(cat.src(f).0),
                        tgt: NodeId(cat.tgt(g).0),
                        edges: vec![GenId(f.0), GenId(g.0)],
                    },
                    single(h),
                ));
            }
        }
        Presentation::new(nodes, generators, relations).expect("category presentation is well formed")
    }

    pub fn from_raw(raw: &RawPresentation) -> Result<Self, PresentationError> {
        let node_index: HashMap<&str, NodeId> = raw
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), NodeId(i)))
            .collect();
        let node = |context: &str, name: &str| {
            node_index
                .get(name)
                .copied()
                .ok_or_else(|| PresentationError::DanglingReference {
                    context: context.to_string(),
                    kind: "node",
                    name: name.to_string(),
                })
        };
        let generators = raw
            .generators
            .iter()
            .map(|g| {
                let context = format!("generator `{}`", g.id);
                Ok(Generator {
                    name: g.id.clone(),
                    src: node(&context, &g.src)?,
                    tgt: node(&context, &g.tgt)?,
                })
            })
            .collect::<Result<Vec<_>, PresentationError>>()?;
        let gen_index: HashMap<&str, GenId> = raw
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.id.as_str(), GenId(i)))
            .collect();
        let mut relations = Vec::new();
        for (i, rel) in raw.relations.iter().enumerate() {
            let context = format!("relation {i}");
            let word = |names: &[String]| {
                names
                    .iter()
                    .map(|n| {
                        gen_index
                            .get(n.as_str())
                            .copied()
                            .ok_or_else(|| PresentationError::DanglingReference {
                                context: context.clone(),
                                kind: "generator",
                                name: n.clone(),
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()
            };
            let (lhs, rhs) = (word(&rel.lhs)?, word(&rel.rhs)?);
            let at = rel.at.as_deref().map(|a| node(&context, a)).transpose()?;
            let ends = |w: &[GenId]| match (w.first(), w.last()) {
                (Some(f), Some(l)) => Some((generators[f.0].src, generators[l.0].tgt)),
                _ => None,
            };
            let (src, tgt) = ends(&lhs)
                .or_else(|| ends(&rhs))
                .or_else(|| at.map(|a| (a, a)))
                .ok_or_else(|| PresentationError::DanglingReference {
                    context: context.clone(),
                    kind: "node",
                    name: "<at>".into(),
                })?;
            relations.push((
                Path { src, tgt, edges: lhs },
                Path { src, tgt, edges: rhs },
            ));
        }
        Presentation::new(raw.nodes.clone(), generators, relations)
    }

    pub fn to_raw(&self) -> RawPresentation {
        let names = |p: &Path| p.edges.iter().map(|g| self.generators[g.0].name.clone()).collect();
        RawPresentation {
            nodes: self.nodes.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| RawGenerator {
                    id: g.name.clone(),
                    src: self.nodes[g.src.0].clone(),
                    tgt: self.nodes[g.tgt.0].clone(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|(l, r)| RawRelation {
                    lhs: names(l),
                    rhs: names(r),
                    at: (l.is_empty() || r.is_empty()).then(|| self.nodes[l.src.0].clone()),
                })
                .collect(),
        }
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[(Path, Path)] {
        &self.relations
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n == name).map(NodeId)
    }

    pub fn generator_id(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.name == name).map(GenId)
    }

    /// Path from generator names; panics on unknown names or broken paths.
    pub fn path(&self, at: &str, names: &[&str]) -> Path {
        let src = self.node_id(at).expect("known node");
        let edges: Vec<GenId> = names
            .iter()
            .map(|n| self.generator_id(n).expect("known generator"))
            .collect();
        let tgt = edges.last().map_or(src, |g| self.generators[g.0].tgt);
        let path = Path { src, tgt, edges };
        self.check_path(&path, "path").expect("composable path");
        path
    }

    /// `f;g;h`, or `id[x]` for the empty path at `x`.
    pub fn path_name(&self, path: &Path) -> String {
        if path.is_empty() {
            format!("id[{}]", self.nodes[path.src.0])
        } else {
            path.edges
                .iter()
                .map(|g| self.generators[g.0].name.as_str())
                .collect::<Vec<_>>()
                .join(";")
        }
    }

    fn generator_names(&self, word: &[GenId]) -> Vec<String> {
        word.iter().map(|g| self.generators[g.0].name.clone()).collect()
    }
}

/// Resource limits for completion and normal-form enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Total rules the completion may create.
    pub max_rules: usize,
    /// Longest rule left-hand side and longest enumerated normal form.
    pub max_word_len: usize,
    /// Automaton states explored per start node.
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_rules: 10_000,
            max_word_len: 16,
            max_states: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Vec<GenId>,
    pub rhs: Vec<GenId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "bound", rename_all = "snake_case")]
pub enum CompletionStatus {
    Complete,
    Incomplete(Bound),
}

/// Rules oriented by [`shortlex`], with their completion status.
#[derive(Debug, Clone)]
pub struct RewriteSystem {
    rules: Vec<Rule>,
    status: CompletionStatus,
    /// Rules not obtained by orienting a declared relation.
    derived: usize,
    generator_ends: Vec<(NodeId, NodeId)>,
    by_first: Vec<Vec<usize>>,
    by_last: Vec<Vec<usize>>,
    window: usize,
}

/// Working rule set during completion; removed rules leave a hole.
struct RuleSet {
    rules: Vec<Option<Rule>>,
    by_first: Vec<Vec<usize>>,
}

impl RuleSet {
    fn new(generators: usize) -> Self {
        RuleSet {
            rules: Vec::new(),
            by_first: vec![Vec::new(); generators],
        }
    }

    fn alive(&self) -> impl Iterator<Item = (usize, &Rule)> + '_ {
        self.rules
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|r| (i, r)))
    }

    fn add(&mut self, rule: Rule) -> usize {
        let i = self.rules.len();
        self.by_first[rule.lhs[0].0].push(i);
        self.rules.push(Some(rule));
        i
    }

    fn remove(&mut self, i: usize) -> Rule {
        let rule = self.rules[i].take().expect("alive rule");
        self.by_first[rule.lhs[0].0].retain(|&j| j != i);
        rule
    }

    fn normalize(&self, word: Vec<GenId>) -> Vec<GenId> {
        normalize_with(&self.rules, &self.by_first, word)
    }
}

/// Leftmost-innermost rewriting to normal form.
fn normalize_with(rules: &[Option<Rule>], by_first: &[Vec<usize>], mut word: Vec<GenId>) -> Vec<GenId> {
    'outer: loop {
        for i in 0..word.len() {
            for &r in &by_first[word[i].0] {
                let rule = rules[r].as_ref().expect("indexed rules are alive");
                if word[i..].starts_with(&rule.lhs) {
                    word.splice(i..i + rule.lhs.len(), rule.rhs.iter().copied());
                    continue 'outer;
                }
            }
        }
        return word;
    }
}

fn contains_factor(word: &[GenId], factor: &[GenId]) -> bool {
    factor.len() <= word.len() && word.windows(factor.len()).any(|w| w == factor)
}

fn critical_pairs(a: &Rule, b: &Rule, same: bool) -> Vec<(Vec<GenId>, Vec<GenId>)> {
    let (l1, l2) = (&a.lhs, &b.lhs);
    let mut out = Vec::new();
    // suffix of l1 overlaps prefix of l2
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            let mut left = a.rhs.clone();
            left.extend_from_slice(&l2[k..]);
            let mut right = l1[..l1.len() - k].to_vec();
            right.extend_from_slice(&b.rhs);
            out.push((left, right));
        }
    }
    // l2 inside l1
    if !same && l2.len() <= l1.len() {
        for i in 0..=l1.len() - l2.len() {
            if l1[i..i + l2.len()] == l2[..] {
                let mut inner = l1[..i].to_vec();
                inner.extend_from_slice(&b.rhs);
                inner.extend_from_slice(&l1[i + l2.len()..]);
                out.push((a.rhs.clone(), inner));
            }
        }
    }
    out
}

/// Knuth–Bendix completion of the presentation's relations.
pub fn complete_rewriting(p: &Presentation, limits: &Limits) -> RewriteSystem {
    let mut set = RuleSet::new(p.generators.len());
    let mut pending: VecDeque<(Vec<GenId>, Vec<GenId>)> = p
        .relations
        .iter()
        .map(|(l, r)| (l.edges.clone(), r.edges.clone()))
        .collect();
    let declared = pending.len();
    let mut processed = 0usize;
    let mut derived = 0usize;
    let mut created = 0usize;
    let status = 'complete: loop {
        while let Some((a, b)) = pending.pop_front() {
            processed += 1;
            let from_relation = processed <= declared;
            let (a, b) = (set.normalize(a), set.normalize(b));
            if a == b {
                continue;
            }
            let (lhs, rhs) = if shortlex(&a, &b) == Ordering::Greater { (a, b) } else { (b, a) };
            if lhs.len() > limits.max_word_len {
                break 'complete CompletionStatus::Incomplete(Bound {
                    resource: Resource::MaxWordLength,
                    limit: limits.max_word_len,
                });
            }
            created += 1;
            if created > limits.max_rules {
                break 'complete CompletionStatus::Incomplete(Bound {
                    resource: Resource::MaxRules,
                    limit: limits.max_rules,
                });
            }
            if !from_relation {
                derived += 1;
            }
            let reducible: Vec<usize> = set
                .alive()
                .filter(|(_, r)| contains_factor(&r.lhs, &lhs))
                .map(|(i, _)| i)
                .collect();
            for i in reducible {
                let old = set.remove(i);
                pending.push_back((old.lhs, old.rhs));
            }
            let new = set.add(Rule { lhs, rhs });
            let stale: Vec<usize> = set
                .alive()
                .filter(|&(i, r)| i != new && contains_factor(&r.rhs, &set.rules[new].as_ref().unwrap().lhs))
                .map(|(i, _)| i)
                .collect();
            for i in stale {
                let rhs = set.rules[i].as_ref().unwrap().rhs.clone();
                let rhs = set.normalize(rhs);
                set.rules[i].as_mut().unwrap().rhs = rhs;
            }
            let new_rule = set.rules[new].clone().unwrap();
            let others: Vec<Rule> = set.alive().map(|(_, r)| r.clone()).collect();
            for other in &others {
                let same = *other == new_rule;
                pending.extend(critical_pairs(&new_rule, other, same));
                if !same {
                    pending.extend(critical_pairs(other, &new_rule, false));
                }
            }
        }
        // certify local confluence over the surviving rules
        let rules: Vec<Rule> = set.alive().map(|(_, r)| r.clone()).collect();
        for (i, a) in rules.iter().enumerate() {
            for (j, b) in rules.iter().enumerate() {
                for (x, y) in critical_pairs(a, b, i == j) {
                    if set.normalize(x.clone()) != set.normalize(y.clone()) {
                        pending.push_back((x, y));
                    }
                }
            }
        }
        if pending.is_empty() {
            break CompletionStatus::Complete;
        }
    };
    RewriteSystem::new(
        set.rules.into_iter().flatten().collect(),
        status,
        derived,
        p.generators.iter().map(|g| (g.src, g.tgt)).collect(),
    )
}

impl RewriteSystem {
    fn new(
        mut rules: Vec<Rule>,
        status: CompletionStatus,
        derived: usize,
        generator_ends: Vec<(NodeId, NodeId)>,
    ) -> Self {
        rules.sort_by(|a, b| shortlex(&a.lhs, &b.lhs).then_with(|| shortlex(&a.rhs, &b.rhs)));
        let mut by_first = vec![Vec::new(); generator_ends.len()];
        let mut by_last = vec![Vec::new(); generator_ends.len()];
        for (i, r) in rules.iter().enumerate() {
            by_first[r.lhs[0].0].push(i);
            by_last[r.lhs[r.lhs.len() - 1].0].push(i);
        }
        let window = rules.iter().map(|r| r.lhs.len()).max().unwrap_or(1) - 1;
        RewriteSystem {
            rules,
            status,
            derived,
            generator_ends,
            by_first,
            by_last,
            window,
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn status(&self) -> CompletionStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == CompletionStatus::Complete
    }

    pub fn derived_rule_count(&self) -> usize {
        self.derived
    }

    fn rewrite(&self, word: Vec<GenId>) -> Vec<GenId> {
        let mut word = word;
        'outer: loop {
            for i in 0..word.len() {
                for &r in &self.by_first[word[i].0] {
                    let rule = &self.rules[r];
                    if word[i..].starts_with(&rule.lhs) {
                        word.splice(i..i + rule.lhs.len(), rule.rhs.iter().copied());
                        continue 'outer;
                    }
                }
            }
            return word;
        }
    }

    /// The unique normal form of `path`.
    pub fn normal_form(&self, path: &Path) -> Result<Path, Error> {
        if let CompletionStatus::Incomplete(bound) = self.status {
            return Err(Error::IncompleteSystem(bound.to_string()));
        }
        Ok(Path {
            src: path.src,
            tgt: path.tgt,
            edges: self.rewrite(path.edges.clone()),
        })
    }

    /// Normal form of `a` followed by `b`.
    pub fn concat(&self, a: &Path, b: &Path) -> Result<Path, Error> {
        debug_assert_eq!(a.tgt, b.src);
        let mut edges = a.edges.clone();
        edges.extend_from_slice(&b.edges);
        self.normal_form(&Path {
            src: a.src,
            tgt: b.tgt,
            edges,
        })
    }

    /// Whether `word ++ [g]` has no left-hand side as a suffix.
    fn extension_is_normal(&self, suffix: &[GenId], g: GenId) -> bool {
        self.by_last[g.0].iter().all(|&r| {
            let lhs = &self.rules[r].lhs;
            let head = &lhs[..lhs.len() - 1];
            !(head.len() <= suffix.len() && suffix.ends_with(head))
        })
    }

    fn explore(&self, start: NodeId, limits: &Limits) -> Result<StateGraph, Bound> {
        let mut graph = StateGraph::default();
        let mut index: HashMap<(NodeId, Vec<GenId>), usize> = HashMap::new();
        index.insert((start, Vec::new()), 0);
        graph.states.push((start, Vec::new()));
        graph.edges.push(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let (node, suffix) = graph.states[s].clone();
            for (gi, &(src, tgt)) in self.generator_ends.iter().enumerate() {
                let g = GenId(gi);
                if src != node || !self.extension_is_normal(&suffix, g) {
                    continue;
                }
                let mut next = suffix.clone();
                next.push(g);
                if next.len() > self.window {
                    next.remove(0);
                }
                let key = (tgt, next);
                let t = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        if graph.states.len() >= limits.max_states {
                            return Err(Bound {
                                resource: Resource::MaxStates,
                                limit: limits.max_states,
                            });
                        }
                        let t = graph.states.len();
                        index.insert(key.clone(), t);
                        graph.states.push(key);
                        graph.edges.push(Vec::new());
                        queue.push_back(t);
                        t
                    }
                };
                graph.edges[s].push((g, t));
            }
        }
        Ok(graph)
    }
}

#[derive(Default)]
struct StateGraph {
    states: Vec<(NodeId, Vec<GenId>)>,
    edges: Vec<Vec<(GenId, usize)>>,
}

impl StateGraph {
    /// States from which some state in `targets` is reachable.
    fn coreachable(&self, targets: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.states.len();
        let mut reverse = vec![Vec::new(); n];
        for (s, out) in self.edges.iter().enumerate() {
            for &(_, t) in out {
                reverse[t].push(s);
            }
        }
        let mut mark: Vec<bool> = (0..n).map(&targets).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&s| mark[s]).collect();
        while let Some(t) = stack.pop() {
            for &s in &reverse[t] {
                if !mark[s] {
                    mark[s] = true;
                    stack.push(s);
                }
            }
        }
        mark
    }

    /// A cycle through allowed states reachable from state 0, as
    /// `(prefix, cycle)` generator words.
    fn find_cycle(&self, allowed: &[bool]) -> Option<(Vec<GenId>, Vec<GenId>, usize)> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Grey,
            Black,
        }
        if !allowed.first().copied().unwrap_or(false) {
            return None;
        }
        let mut color = vec![Color::White; self.states.len()];
        // iterative DFS keeping the current path
        let mut path: Vec<(usize, usize)> = vec![(0, 0)];
        let mut word: Vec<GenId> = Vec::new();
        color[0] = Color::Grey;
        while let Some(&mut (s, ref mut next)) = path.last_mut() {
            if *next < self.edges[s].len() {
                let (g, t) = self.edges[s][*next];
                *next += 1;
                if !allowed[t] {
                    continue;
                }
                match color[t] {
                    Color::Grey => {
                        let pos = path.iter().position(|&(u, _)| u == t).unwrap();
                        let mut cycle = word[pos..].to_vec();
                        cycle.push(g);
                        return Some((word[..pos].to_vec(), cycle, t));
                    }
                    Color::White => {
                        color[t] = Color::Grey;
                        path.push((t, 0));
                        word.push(g);
                    }
                    Color::Black => {}
                }
            } else {
                color[s] = Color::Black;
                path.pop();
                word.pop();
            }
        }
        None
    }

    /// Shortest word from state `from` to any state satisfying `target`.
    fn word_to(&self, from: usize, target: impl Fn(usize) -> bool) -> Option<Vec<GenId>> {
        let mut parent: Vec<Option<(usize, GenId)>> = vec![None; self.states.len()];
        let mut seen = vec![false; self.states.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            if target(s) {
                let mut word = Vec::new();
                let mut at = s;
                while let Some((p, g)) = parent[at] {
                    word.push(g);
                    at = p;
                }
                word.reverse();
                return Some(word);
            }
            for &(g, t) in &self.edges[s] {
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, g));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Every word from state 0 ending in a state satisfying `accept`,
    /// walking only through `allowed` states. Requires the allowed part to
    /// be acyclic.
    fn words(
        &self,
        allowed: &[bool],
        accept: impl Fn(usize) -> bool,
        limits: &Limits,
    ) -> Result<Vec<Vec<GenId>>, Bound> {
        let mut out = Vec::new();
        if !allowed.first().copied().unwrap_or(false) {
            return Ok(out);
        }
        let mut stack: Vec<(usize, Vec<GenId>)> = vec![(0, Vec::new())];
        while let Some((s, word)) = stack.pop() {
            if word.len() > limits.max_word_len {
                return Err(Bound {
                    resource: Resource::MaxWordLength,
                    limit: limits.max_word_len,
                });
            }
            if accept(s) {
                out.push(word.clone());
                if out.len() > limits.max_states {
                    return Err(Bound {
                        resource: Resource::MaxStates,
                        limit: limits.max_states,
                    });
                }
            }
            for &(g, t) in &self.edges[s] {
                if allowed[t] {
                    let mut next = word.clone();
                    next.push(g);
                    stack.push((t, next));
                }
            }
        }
        out.sort_by(|a, b| shortlex(a, b));
        Ok(out)
    }
}

fn infinite_witness(
    p: &Presentation,
    graph: &StateGraph,
    prefix: Vec<GenId>,
    cycle: Vec<GenId>,
    at: usize,
    target: Option<NodeId>,
) -> Witness {
    let suffix = graph
        .word_to(at, |s| target.is_none_or(|y| graph.states[s].0 == y))
        .unwrap_or_default();
    let mut end = graph.states[at].0;
    for g in &suffix {
        end = p.generators[g.0].tgt;
    }
    let from = p.generators.get(prefix.first().or(cycle.first()).map_or(usize::MAX, |g| g.0));
    Witness::InfiniteHom {
        from: from.map_or_else(|| p.nodes[graph.states[0].0 .0].clone(), |g| p.nodes[g.src.0].clone()),
        to: p.nodes[end.0].clone(),
        prefix: p.generator_names(&prefix),
        cycle: p.generator_names(&cycle),
        suffix: p.generator_names(&suffix),
    }
}

/// Normal forms of all paths `x → y`, in length-lex order.
pub fn hom_set(p: &Presentation, x: NodeId, y: NodeId, limits: &Limits) -> Verdict<Vec<Path>> {
    let system = complete_rewriting(p, limits);
    hom_set_in(p, &system, x, y, limits)
}

/// As [`hom_set`], reusing a completed system.
pub fn hom_set_in(
    p: &Presentation,
    system: &RewriteSystem,
    x: NodeId,
    y: NodeId,
    limits: &Limits,
) -> Verdict<Vec<Path>> {
    if let CompletionStatus::Incomplete(bound) = system.status {
        return Verdict::Undecided(bound);
    }
    let graph = match system.explore(x, limits) {
        Ok(g) => g,
        Err(bound) => return Verdict::Undecided(bound),
    };
    let useful = graph.coreachable(|s| graph.states[s].0 == y);
    if let Some((prefix, cycle, at)) = graph.find_cycle(&useful) {
        return Verdict::No(infinite_witness(p, &graph, prefix, cycle, at, Some(y)));
    }
    match graph.words(&useful, |s| graph.states[s].0 == y, limits) {
        Ok(words) => Verdict::Yes(
            words
                .into_iter()
                .map(|edges| Path { src: x, tgt: y, edges })
                .collect(),
        ),
        Err(bound) => Verdict::Undecided(bound),
    }
}

/// A presented category realized as a finite category: morphism `i` of
/// `category` is the normal form `normal_forms[i]`.
#[derive(Debug, Clone)]
pub struct Finitization {
    pub category: FinCategory,
    pub normal_forms: Vec<Path>,
    lookup: HashMap<Path, MorId>,
}

impl Finitization {
    /// The morphism whose normal form is `path` (already normalized).
    pub fn morphism_of(&self, normal: &Path) -> Option<MorId> {
        self.lookup.get(normal).copied()
    }
}

/// Enumerate every hom-set and assemble the finite category, if all are
/// finite.
pub fn try_finitize(p: &Presentation, limits: &Limits) -> Result<Verdict<Finitization>, Error> {
    let system = complete_rewriting(p, limits);
    try_finitize_with(p, &system, limits)
}

pub fn try_finitize_with(
    p: &Presentation,
    system: &RewriteSystem,
    limits: &Limits,
) -> Result<Verdict<Finitization>, Error> {
    if let CompletionStatus::Incomplete(bound) = system.status {
        return Ok(Verdict::Undecided(bound));
    }
    let n = p.nodes.len();
    let mut normal_forms = Vec::new();
    for x in 0..n {
        let graph = match system.explore(NodeId(x), limits) {
            Ok(g) => g,
            Err(bound) => return Ok(Verdict::Undecided(bound)),
        };
        let all = vec![true; graph.states.len()];
        if let Some((prefix, cycle, at)) = graph.find_cycle(&all) {
            return Ok(Verdict::No(infinite_witness(p, &graph, prefix, cycle, at, None)));
        }
        let words = match graph.words(&all, |_| true, limits) {
            Ok(w) => w,
            Err(bound) => return Ok(Verdict::Undecided(bound)),
        };
        let mut from_x: Vec<Path> = words
            .into_iter()
            .map(|edges| {
                let tgt = edges.last().map_or(NodeId(x), |g| p.generators[g.0].tgt);
                Path {
                    src: NodeId(x),
                    tgt,
                    edges,
                }
            })
            .collect();
        from_x.sort_by(|a, b| a.tgt.cmp(&b.tgt).then_with(|| shortlex(&a.edges, &b.edges)));
        normal_forms.extend(from_x);
    }
    let lookup: HashMap<Path, MorId> = normal_forms
        .iter()
        .enumerate()
        .map(|(i, nf)| (nf.clone(), MorId(i)))
        .collect();
    let m = normal_forms.len();
    let mut table = vec![None; m * m];
    for (gi, g) in normal_forms.iter().enumerate() {
        for (fi, f) in normal_forms.iter().enumerate() {
            if f.tgt == g.src {
                let composite = system.concat(f, g)?;
                let h = lookup.get(&composite).copied().ok_or_else(|| {
                    Error::ConsistencyViolation(format!(
                        "composite {} is not an enumerated normal form",
                        p.path_name(&composite)
                    ))
                })?;
                table[gi * m + fi] = Some(h);
            }
        }
    }
    let category = FinCategory::from_parts(
        p.nodes.clone(),
        normal_forms
            .iter()
            .map(|nf| (p.path_name(nf), ObjId(nf.src.0), ObjId(nf.tgt.0)))
            .collect(),
        (0..n).map(|x| lookup[&Path::empty(NodeId(x))]).collect(),
        table,
    )
    .map_err(|e| Error::ConsistencyViolation(format!("finitized category is invalid: {e}")))?;
    Ok(Verdict::Yes(Finitization {
        category,
        normal_forms,
        lookup,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::enumerate::find_isomorphism;
    use std::sync::Arc;

    fn graph(nodes: &[&str], edges: &[(&str, &str, &str)]) -> (Vec<String>, Vec<Generator>) {
        let nodes: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
        let idx = |n: &str| NodeId(nodes.iter().position(|m| m == n).unwrap());
        let gens = edges
            .iter()
            .map(|&(g, s, t)| Generator {
                name: g.into(),
                src: idx(s),
                tgt: idx(t),
            })
            .collect();
        (nodes, gens)
    }

    fn arrow_presentation() -> Presentation {
        let (n, g) = graph(&["0", "1"], &[("f", "0", "1")]);
        Presentation::new(n, g, vec![]).unwrap()
    }

    fn idempotent_presentation() -> Presentation {
        let (n, g) = graph(&["x"], &[("e", "x", "x")]);
        let p = Presentation::new(n.clone(), g.clone(), vec![]).unwrap();
        let rel = (p.path("x", &["e", "e"]), p.path("x", &["e"]));
        Presentation::new(n, g, vec![rel]).unwrap()
    }

    fn iso_presentation() -> Presentation {
        let (n, g) = graph(&["x", "y"], &[("f", "x", "y"), ("g", "y", "x")]);
        let p = Presentation::new(n.clone(), g.clone(), vec![]).unwrap();
        let rels = vec![
            (p.path("x", &["f", "g"]), p.path("x", &[])),
            (p.path("y", &["g", "f"]), p.path("y", &[])),
        ];
        Presentation::new(n, g, rels).unwrap()
    }

    fn loop_presentation() -> Presentation {
        let (n, g) = graph(&["x"], &[("t", "x", "x")]);
        Presentation::new(n, g, vec![]).unwrap()
    }

    #[test]
    fn free_arrow_needs_no_rules() {
        let r = complete_rewriting(&arrow_presentation(), &Limits::default());
        assert!(r.is_complete());
        assert!(r.rules().is_empty());
        assert_eq!(r.derived_rule_count(), 0);
    }

    #[test]
    fn idempotent_completes_with_one_rule() {
        let p = idempotent_presentation();
        let r = complete_rewriting(&p, &Limits::default());
        assert!(r.is_complete());
        let e = p.generator_id("e").unwrap();
        assert_eq!(r.rules(), &[Rule { lhs: vec![e, e], rhs: vec![e] }]);
        let eee = p.path("x", &["e", "e", "e"]);
        assert_eq!(r.normal_form(&eee).unwrap(), p.path("x", &["e"]));
        let empty = p.path("x", &[]);
        assert_eq!(r.normal_form(&empty).unwrap(), empty);
    }

    #[test]
    fn iso_pair_normal_forms_are_short() {
        let p = iso_presentation();
        let r = complete_rewriting(&p, &Limits::default());
        assert!(r.is_complete());
        assert_eq!(r.derived_rule_count(), 0);
        let fgf = p.path("x", &["f", "g", "f"]);
        assert_eq!(r.normal_form(&fgf).unwrap(), p.path("x", &["f"]));
        let (x, y) = (p.node_id("x").unwrap(), p.node_id("y").unwrap());
        for (a, b) in [(x, x), (x, y), (y, x), (y, y)] {
            let hom = hom_set(&p, a, b, &Limits::default()).yes().unwrap();
            assert_eq!(hom.len(), 1);
            assert!(hom[0].len() <= 1);
        }
    }

    #[test]
    fn hom_set_examples() {
        let p = arrow_presentation();
        let (a, b) = (p.node_id("0").unwrap(), p.node_id("1").unwrap());
        let hom = hom_set(&p, a, b, &Limits::default()).yes().unwrap();
        assert_eq!(hom, vec![p.path("0", &["f"])]);
        assert_eq!(hom_set(&p, b, a, &Limits::default()).yes().unwrap(), vec![]);

        let p = idempotent_presentation();
        let x = p.node_id("x").unwrap();
        let hom = hom_set(&p, x, x, &Limits::default()).yes().unwrap();
        assert_eq!(hom, vec![p.path("x", &[]), p.path("x", &["e"])]);
    }

    #[test]
    fn free_loop_is_infinite() {
        let p = loop_presentation();
        let x = p.node_id("x").unwrap();
        match hom_set(&p, x, x, &Limits::default()) {
            Verdict::No(Witness::InfiniteHom { cycle, .. }) => assert_eq!(cycle, vec!["t".to_string()]),
            other => panic!("expected infinite hom, got {other:?}"),
        }
        assert!(try_finitize(&p, &Limits::default()).unwrap().is_no());
    }

    #[test]
    fn normal_form_requires_complete_system() {
        let p = idempotent_presentation();
        let limits = Limits {
            max_word_len: 1,
            ..Limits::default()
        };
        let r = complete_rewriting(&p, &limits);
        assert!(!r.is_complete());
        assert!(matches!(
            r.normal_form(&p.path("x", &["e"])),
            Err(Error::IncompleteSystem(_))
        ));
        assert!(hom_set_in(&p, &r, NodeId(0), NodeId(0), &limits).is_undecided());
    }

    #[test]
    fn finitize_examples() {
        let fin = try_finitize(&idempotent_presentation(), &Limits::default())
            .unwrap()
            .yes()
            .unwrap();
        assert_eq!(fin.category.morphism_count(), 2);
        assert!(find_isomorphism(&Arc::new(fin.category), &Arc::new(catalog::idempotent())).is_some());

        let fin = try_finitize(&arrow_presentation(), &Limits::default())
            .unwrap()
            .yes()
            .unwrap();
        assert!(find_isomorphism(&Arc::new(fin.category), &Arc::new(catalog::arrow())).is_some());
    }

    #[test]
    fn category_round_trip() {
        for cat in [catalog::iso_pair(), catalog::idempotent(), catalog::arrow(), catalog::discrete2()] {
            let p = Presentation::from_category(&cat);
            let fin = try_finitize(&p, &Limits::default()).unwrap().yes().unwrap();
            assert!(find_isomorphism(&Arc::new(fin.category), &Arc::new(cat)).is_some());
        }
    }

    #[test]
    fn two_loops_with_commutation_stay_infinite() {
        // ab = ba on one node: normal forms a^i b^j
        let (n, g) = graph(&["x"], &[("a", "x", "x"), ("b", "x", "x")]);
        let p = Presentation::new(n.clone(), g.clone(), vec![]).unwrap();
        let rel = (p.path("x", &["b", "a"]), p.path("x", &["a", "b"]));
        let p = Presentation::new(n, g, vec![rel]).unwrap();
        let r = complete_rewriting(&p, &Limits::default());
        assert!(r.is_complete());
        assert!(hom_set_in(&p, &r, NodeId(0), NodeId(0), &Limits::default()).is_no());
    }

    #[test]
    fn raw_round_trip() {
        let p = iso_presentation();
        assert_eq!(Presentation::from_raw(&p.to_raw()).unwrap(), p);
    }

    #[test]
    fn non_parallel_relation_is_rejected() {
        let (n, g) = graph(&["0", "1"], &[("f", "0", "1")]);
        let p = Presentation::new(n.clone(), g.clone(), vec![]).unwrap();
        let rel = (p.path("0", &["f"]), p.path("0", &[]));
        assert_eq!(
            Presentation::new(n, g, vec![rel]).unwrap_err(),
            PresentationError::NonParallelRelation { index: 0 }
        );
    }
}
