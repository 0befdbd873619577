//! The marked branching tree behind the mean-field semigroup.
//!
//! Every individual lives for an exponential time with rate `|r|`, then picks
//! a map with probability `rate/|r|` and is replaced by as many children as
//! the map has arguments. Truncating at a horizon `t` gives the internal nodes
//! `S_t` (dead by `t`) and the boundary `∇S_t` (alive at `t`). The root value
//! `G_t((x_i)_{i ∈ ∇S_t})` of i.i.d. boundary values with law `μ` has law
//! `T_t(μ)`.
//!
//! Random marks of a node are drawn from a stream keyed by the node's word
//! (the path of child slots from the root), so a tree is the same object
//! whatever order it is explored in, and truncations at different horizons
//! are truncations of one infinite tree.

mod analysis;
mod estimate;
mod lazy;
mod open;

use std::io::Write;

use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::model::{Dist, MapFamily, State};
use crate::rng::{derive, key_of, CounterRng};

pub use analysis::{
    find_minimal_root_determining, is_root_determining, is_root_determining_subtree, satisfies_cob_minimality,
    Strategy, ENUMERATION_LIMIT,
};
pub use estimate::{
    boundary_growth, duality_estimate, duality_scan, mc_estimate_tt, mc_estimate_tt_with, uniqueness_scan,
    uniqueness_scan_with,
    DualityEstimate, Estimate, GrowthEstimate, ScanPoint,
};
pub use open::{find_open_subtree, minimal_one_set, open_subtrees, OpenSubtrees, MAX_ONE_SETS};

/// Default cap on sampled nodes per tree.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

pub type NodeId = u32;

const TREE_STREAM: u64 = 0x7472_6565;
const LEAF_STREAM: u64 = 0x6c65_6166;

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub parent: Option<NodeId>,
    /// Position among the parent's children, 0-based.
    pub slot: u32,
    pub depth: u32,
    pub key: u64,
    /// `τ*`.
    pub birth: f64,
    /// `τ† = τ* + σ`.
    pub death: f64,
    /// Entry index of the attached map; `None` on the boundary.
    pub map: Option<usize>,
    first_child: NodeId,
    n_children: u32,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.map.is_none()
    }
}

/// Tree truncated at a horizon, stored breadth-first in an arena.
///
/// Children of a node occupy consecutive ids, and every child has a larger id
/// than its parent.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedTree {
    nodes: Vec<Node>,
    leaves: Vec<NodeId>,
    horizon: f64,
}

/// Boundary values, aligned with [`MarkedTree::leaves`].
#[derive(Clone, Debug, PartialEq)]
pub struct LeafAssignment {
    pub values: Vec<State>,
}

impl LeafAssignment {
    pub fn constant(tree: &MarkedTree, v: State) -> Self {
        Self { values: vec![v; tree.leaves.len()] }
    }

    /// I.i.d. values with law `mu`, keyed by each leaf's stream.
    pub fn iid(tree: &MarkedTree, mu: &Dist) -> Self {
        Self { values: tree.leaves.iter().map(|&l| leaf_draw(tree.node(l).key, mu)).collect() }
    }
}

pub(crate) fn leaf_draw(key: u64, mu: &Dist) -> State {
    mu.sample_with(CounterRng::new(derive(key, LEAF_STREAM)).open01())
}

/// Hand-written tree shape, for tests and worked examples.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Leaf,
    Node(String, Vec<Shape>),
}

impl Shape {
    pub fn map(name: &str, children: Vec<Shape>) -> Self {
        Shape::Node(name.to_string(), children)
    }
}

/// Lazily drawn marks of the infinite tree for one replica.
#[derive(Clone, Debug)]
pub(crate) struct Marks<'a> {
    pub family: &'a MapFamily,
    pub root_key: u64,
}

impl<'a> Marks<'a> {
    pub fn new(family: &'a MapFamily, seed: u64, replica: u64) -> Self {
        Self { family, root_key: key_of(seed, &[TREE_STREAM, replica]) }
    }

    /// `(lifetime, entry index)` of the node with this key.
    #[inline]
    pub fn draw(&self, key: u64) -> (f64, usize) {
        let mut rng = CounterRng::new(key);
        let life = rng.exp(self.family.total_rate());
        let entry = self.family.choose(rng.open01());
        (life, entry)
    }

    #[inline]
    pub fn child_key(key: u64, slot: usize) -> u64 {
        derive(key, slot as u64)
    }
}

impl MarkedTree {
    /// Samples replica 0 of the tree for `seed`, truncated at `t`.
    pub fn sample(family: &MapFamily, t: f64, seed: u64) -> Result<Self> {
        Self::sample_replica(family, t, seed, 0, DEFAULT_NODE_BUDGET)
    }

    /// Breadth-first sampling of one replica with a node budget.
    pub fn sample_replica(family: &MapFamily, t: f64, seed: u64, replica: u64, budget: usize) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("horizon must be >= 0, got {t}")));
        }
        let marks = Marks::new(family, seed, replica);
        let mut nodes = vec![Node {
            parent: None,
            slot: 0,
            depth: 0,
            key: marks.root_key,
            birth: 0.0,
            death: 0.0,
            map: None,
            first_child: 0,
            n_children: 0,
        }];
        let mut leaves = Vec::new();
        let mut next = 0usize;
        while next < nodes.len() {
            let (life, entry) = marks.draw(nodes[next].key);
            let death = nodes[next].birth + life;
            nodes[next].death = death;
            if death <= t {
                let k = family.entries()[entry].map.arity();
                if nodes.len() + k > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                let first = nodes.len() as NodeId;
                let (key, depth) = (nodes[next].key, nodes[next].depth);
                for slot in 0..k {
                    nodes.push(Node {
                        parent: Some(next as NodeId),
                        slot: slot as u32,
                        depth: depth + 1,
                        key: Marks::child_key(key, slot),
                        birth: death,
                        death: 0.0,
                        map: None,
                        first_child: 0,
                        n_children: 0,
                    });
                }
                let node = &mut nodes[next];
                node.map = Some(entry);
                node.first_child = first;
                node.n_children = k as u32;
            } else {
                leaves.push(next as NodeId);
            }
            next += 1;
        }
        Ok(Self { nodes, leaves, horizon: t })
    }

    /// Builds a tree from a shape; map names are resolved against `family`.
    ///
    /// Internal nodes at depth `d` get lifetime `[d, d+1)`, boundary nodes
    /// never die, and the horizon is one past the deepest internal node.
    pub fn from_shape(family: &MapFamily, shape: &Shape) -> Result<Self> {
        let mut nodes: Vec<Node> = Vec::new();
        let mut pending: Vec<&Shape> = vec![shape];
        let root_key = key_of(0, &[TREE_STREAM, 0]);
        nodes.push(Node {
            parent: None,
            slot: 0,
            depth: 0,
            key: root_key,
            birth: 0.0,
            death: f64::INFINITY,
            map: None,
            first_child: 0,
            n_children: 0,
        });
        let mut leaves = Vec::new();
        let mut horizon: f64 = 0.0;
        let mut next = 0;
        while next < nodes.len() {
            match pending[next] {
                Shape::Leaf => leaves.push(next as NodeId),
                Shape::Node(name, children) => {
                    let entry = family
                        .entries()
                        .iter()
                        .position(|e| e.map.name() == name)
                        .ok_or_else(|| Error::InvalidParameter(format!("family has no map `{name}`")))?;
                    let arity = family.entries()[entry].map.arity();
                    if arity != children.len() {
                        return Err(Error::InvalidParameter(format!(
                            "`{name}` takes {arity} children, shape gives {}",
                            children.len()
                        )));
                    }
                    let first = nodes.len() as NodeId;
                    let (key, depth) = (nodes[next].key, nodes[next].depth);
                    let death = depth as f64 + 1.0;
                    horizon = horizon.max(death);
                    for (slot, child) in children.iter().enumerate() {
                        nodes.push(Node {
                            parent: Some(next as NodeId),
                            slot: slot as u32,
                            depth: depth + 1,
                            key: Marks::child_key(key, slot),
                            birth: death,
                            death: f64::INFINITY,
                            map: None,
                            first_child: 0,
                            n_children: 0,
                        });
                        pending.push(child);
                    }
                    let node = &mut nodes[next];
                    node.map = Some(entry);
                    node.birth = depth as f64;
                    node.death = death;
                    node.first_child = first;
                    node.n_children = arity as u32;
                }
            }
            next += 1;
        }
        Ok(Self { nodes, leaves, horizon })
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, id: NodeId) -> std::ops::Range<NodeId> {
        let n = self.node(id);
        n.first_child..n.first_child + n.n_children
    }

    /// Boundary nodes `∇S_t` in id order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len() - self.leaves.len()
    }

    /// Child slots (1-based) from the root down to `id`.
    pub fn word(&self, id: NodeId) -> Vec<u32> {
        let mut w = Vec::new();
        let mut cur = id;
        while let Some(p) = self.node(cur).parent {
            w.push(self.node(cur).slot + 1);
            cur = p;
        }
        w.reverse();
        w
    }

    /// Word as a string (`""` for the root, `"312"` for child 2 of child 1 of child 3).
    /// Slots above 9 are separated by dots.
    pub fn word_string(&self, id: NodeId) -> String {
        let w = self.word(id);
        if w.iter().all(|&s| s <= 9) {
            w.iter().map(|s| s.to_string()).collect()
        } else {
            w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn find_word(&self, word: &str) -> Option<NodeId> {
        let mut cur = self.root();
        for c in word.chars() {
            let slot = c.to_digit(10)?;
            let range = self.children(cur);
            if slot == 0 || slot > range.end - range.start {
                return None;
            }
            cur = range.start + slot - 1;
        }
        Some(cur)
    }

    /// Debug dump, one node per line: `id,parent,map_name,tau_birth,tau_death,is_leaf`.
    pub fn write_dump<W: Write>(&self, family: &MapFamily, mut w: W) -> Result<()> {
        writeln!(w, "id,parent,map_name,tau_birth,tau_death,is_leaf")?;
        for (id, n) in self.nodes.iter().enumerate() {
            let parent = n.parent.map_or("-1".to_string(), |p| p.to_string());
            let name = n.map.map_or("-", |e| family.entries()[e].map.name());
            writeln!(
                w,
                "{id},{parent},{name},{},{},{}",
                fmt17(n.birth),
                fmt17(n.death),
                u8::from(n.is_leaf())
            )?;
        }
        Ok(())
    }
}

/// Root value `G_t(x)` by post-order evaluation.
pub fn evaluate(tree: &MarkedTree, family: &MapFamily, assignment: &LeafAssignment) -> State {
    assert_eq!(assignment.values.len(), tree.leaves.len(), "assignment must cover the boundary");
    let mut values = vec![0 as State; tree.nodes.len()];
    for (&leaf, &v) in tree.leaves.iter().zip(&assignment.values) {
        values[leaf as usize] = v;
    }
    let mut args: Vec<State> = Vec::with_capacity(family.max_arity());
    for id in (0..tree.nodes.len()).rev() {
        let node = &tree.nodes[id];
        if let Some(e) = node.map {
            args.clear();
            args.extend(tree.children(id as NodeId).map(|c| values[c as usize]));
            values[id] = family.entries()[e].map.apply(&args);
        }
    }
    values[0]
}

/// Set of internal nodes containing the root and closed under taking parents.
#[derive(Clone, Debug, PartialEq)]
pub struct Subtree {
    members: Vec<bool>,
}

impl Subtree {
    /// All internal nodes `S_t`.
    pub fn full(tree: &MarkedTree) -> Self {
        Self { members: tree.nodes.iter().map(|n| !n.is_leaf()).collect() }
    }

    /// Builds from words; fails on boundary nodes or a set not closed under parents.
    pub fn from_words(tree: &MarkedTree, words: &[&str]) -> Result<Self> {
        let mut members = vec![false; tree.len()];
        for w in words {
            let id = tree
                .find_word(w)
                .ok_or_else(|| Error::InvalidParameter(format!("no node `{w}`")))?;
            if tree.node(id).is_leaf() {
                return Err(Error::InvalidParameter(format!("node `{w}` is on the boundary")));
            }
            members[id as usize] = true;
        }
        let sub = Self { members };
        if !sub.is_parent_closed(tree) {
            return Err(Error::InvalidParameter("subtree must be closed under parents".into()));
        }
        Ok(sub)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.members[id as usize]
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<NodeId> {
        (0..self.members.len() as NodeId).filter(|&i| self.contains(i)).collect()
    }

    pub fn words(&self, tree: &MarkedTree) -> Vec<String> {
        self.ids().into_iter().map(|i| tree.word_string(i)).collect()
    }

    pub(crate) fn remove(&mut self, id: NodeId) {
        self.members[id as usize] = false;
    }

    fn is_parent_closed(&self, tree: &MarkedTree) -> bool {
        self.ids()
            .into_iter()
            .all(|i| tree.node(i).parent.is_none_or(|p| self.contains(p)))
    }

    /// `∇U`: children of members that are not members; `{root}` when empty.
    pub fn boundary(&self, tree: &MarkedTree) -> Vec<NodeId> {
        if self.is_empty() {
            return vec![tree.root()];
        }
        self.ids()
            .into_iter()
            .flat_map(|i| tree.children(i))
            .filter(|&c| !self.contains(c))
            .collect()
    }
}

/// `G_U` evaluated on boundary values aligned with [`Subtree::boundary`].
pub fn evaluate_subtree(tree: &MarkedTree, family: &MapFamily, sub: &Subtree, boundary: &[NodeId], x: &[State]) -> State {
    let mut values = vec![0 as State; tree.len()];
    for (&b, &v) in boundary.iter().zip(x) {
        values[b as usize] = v;
    }
    let mut args: Vec<State> = Vec::with_capacity(family.max_arity());
    for id in (0..tree.len() as NodeId).rev() {
        if sub.contains(id) {
            let e = tree.node(id).map.expect("members are internal");
            args.clear();
            args.extend(tree.children(id).map(|c| values[c as usize]));
            values[id as usize] = family.entries()[e].map.apply(&args);
        }
    }
    values[0]
}
