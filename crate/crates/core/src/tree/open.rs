use super::{evaluate, LeafAssignment, MarkedTree, NodeId};
use crate::error::{Error, Result};
use crate::model::{decode_into, LocalMap, MapFamily, State};

/// Cap on the number of minimal one-sets kept at any node.
pub const MAX_ONE_SETS: usize = 10_000;

/// Minimal elements of `g^{-1}(1)` for a map on `{0, 1}`, fewest ones first.
pub fn minimal_one_set(g: &LocalMap) -> Result<Vec<Vec<State>>> {
    if g.n_states() != 2 {
        return Err(Error::Unsupported(format!("`{}` is not a map on {{0, 1}}", g.name())));
    }
    let k = g.arity();
    let ones: Vec<Vec<State>> = g
        .table()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == 1)
        .map(|(i, _)| {
            let mut x = vec![0; k];
            decode_into(i, 2, &mut x);
            x
        })
        .collect();
    let below = |a: &[State], b: &[State]| a.iter().zip(b).all(|(x, y)| x <= y);
    let mut minimal: Vec<Vec<State>> = ones
        .iter()
        .filter(|y| !ones.iter().any(|z| z != *y && below(z, y)))
        .cloned()
        .collect();
    minimal.sort_by_key(|y| y.iter().filter(|&&v| v == 1).count());
    Ok(minimal)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpenSubtrees {
    /// Some open subtree exists, i.e. `G_t(1, …, 1) = 1`.
    pub exists: bool,
    /// Some open subtree avoids the boundary, i.e. `G_t(0, …, 0) = 1`.
    pub exists_finite: bool,
    /// Minimal `y` with `G_t(x) = 1` iff `x ≥ y` for one of them; aligned with the leaves.
    pub minimal_one_sets: Vec<Vec<bool>>,
}

fn check_binary_monotone(family: &MapFamily) -> Result<()> {
    if family.space().size() != 2 || !family.space().is_bounded() || !family.is_monotone() {
        return Err(Error::Unsupported("open subtrees need a monotone family on ordered {0, 1}".into()));
    }
    Ok(())
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.by_ref().any(|y| y == x))
}

fn minimize(mut sets: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut kept: Vec<Vec<u32>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| is_subset(k, &s)) {
            kept.push(s);
        }
    }
    kept
}

fn union_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn open_subtrees(tree: &MarkedTree, family: &MapFamily) -> Result<OpenSubtrees> {
    check_binary_monotone(family)?;
    let exists = evaluate(tree, family, &LeafAssignment::constant(tree, 1)) == 1;
    let exists_finite = evaluate(tree, family, &LeafAssignment::constant(tree, 0)) == 1;

    let ys = family
        .entries()
        .iter()
        .map(|e| minimal_one_set(&e.map))
        .collect::<Result<Vec<_>>>()?;
    let mut sets: Vec<Vec<Vec<u32>>> = vec![Vec::new(); tree.len()];
    for (pos, &leaf) in tree.leaves().iter().enumerate() {
        sets[leaf as usize] = vec![vec![pos as u32]];
    }
    for id in (0..tree.len() as NodeId).rev() {
        let Some(e) = tree.node(id).map else { continue };
        let children: Vec<NodeId> = tree.children(id).collect();
        let mut here: Vec<Vec<u32>> = Vec::new();
        for y in &ys[e] {
            let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
            for (j, &c) in children.iter().enumerate() {
                if y[j] == 0 {
                    continue;
                }
                let mut next = Vec::new();
                for a in &acc {
                    for b in &sets[c as usize] {
                        next.push(union_sorted(a, b));
                    }
                }
                acc = minimize(next);
                if acc.len() > MAX_ONE_SETS {
                    return Err(Error::EnumerationCap(format!("more than {MAX_ONE_SETS} minimal one-sets")));
                }
            }
            here.extend(acc);
        }
        here = minimize(here);
        if here.len() > MAX_ONE_SETS {
            return Err(Error::EnumerationCap(format!("more than {MAX_ONE_SETS} minimal one-sets")));
        }
        sets[id as usize] = here;
        for c in children {
            sets[c as usize] = Vec::new();
        }
    }
    let n_leaves = tree.leaves().len();
    let minimal_one_sets = sets[0]
        .iter()
        .map(|s| {
            let mut v = vec![false; n_leaves];
            for &p in s {
                v[p as usize] = true;
            }
            v
        })
        .collect();
    Ok(OpenSubtrees { exists, exists_finite, minimal_one_sets })
}

/// One open subtree as a sorted list of node ids, if any exists.
///
/// With `finite`, boundary nodes are not allowed in the subtree. At each
/// node the minimal one-sets of its map are tried in order of fewest ones.
pub fn find_open_subtree(tree: &MarkedTree, family: &MapFamily, finite: bool) -> Result<Option<Vec<NodeId>>> {
    check_binary_monotone(family)?;
    let ys = family
        .entries()
        .iter()
        .map(|e| minimal_one_set(&e.map))
        .collect::<Result<Vec<_>>>()?;
    // choice[id] = index into ys of the first working one-set, or usize::MAX for a boundary node
    let mut choice: Vec<Option<usize>> = vec![None; tree.len()];
    for id in (0..tree.len() as NodeId).rev() {
        let node = tree.node(id);
        choice[id as usize] = match node.map {
            None if finite => None,
            None => Some(usize::MAX),
            Some(e) => ys[e].iter().position(|y| {
                tree.children(id)
                    .zip(y)
                    .all(|(c, &bit)| bit == 0 || choice[c as usize].is_some())
            }),
        };
    }
    if choice[0].is_none() {
        return Ok(None);
    }
    let mut members = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(id) = stack.pop() {
        members.push(id);
        if let Some(e) = tree.node(id).map {
            let y = &ys[e][choice[id as usize].expect("reachable nodes succeed")];
            stack.extend(tree.children(id).zip(y).filter(|(_, &b)| b == 1).map(|(c, _)| c));
        }
    }
    members.sort_unstable();
    Ok(Some(members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;
    use crate::tree::{Shape, DEFAULT_NODE_BUDGET};
    use crate::rng::CounterRng;

    fn l() -> Shape {
        Shape::Leaf
    }
    fn d() -> Shape {
        Shape::map("dth", vec![])
    }
    fn b() -> Shape {
        Shape::map("bth", vec![])
    }
    fn cob(x: Shape, y: Shape, z: Shape) -> Shape {
        Shape::map("cob", vec![x, y, z])
    }

    fn cob_birth_tree() -> Shape {
        cob(
            d(),
            cob(cob(d(), b(), d()), l(), l()),
            cob(cob(d(), b(), l()), cob(d(), l(), l()), cob(d(), l(), b())),
        )
    }

    #[test]
    fn one_sets_of_builtins() {
        assert_eq!(minimal_one_set(&LocalMap::cob()).unwrap(), vec![vec![1, 0, 0], vec![0, 1, 1]]);
        assert!(minimal_one_set(&LocalMap::dth()).unwrap().is_empty());
        assert_eq!(minimal_one_set(&LocalMap::bth()).unwrap(), vec![Vec::<State>::new()]);
    }

    #[test]
    fn open_subtree_of_cob_birth_tree() {
        let fam = MapFamily::preset(Preset::CoopBirth { alpha: 1.0, beta: 1.0 }).unwrap();
        let tree = MarkedTree::from_shape(&fam, &cob_birth_tree()).unwrap();
        let o = open_subtrees(&tree, &fam).unwrap();
        assert!(o.exists);
        let witness = find_open_subtree(&tree, &fam, false).unwrap().unwrap();
        let mut words: Vec<String> = witness.iter().map(|&i| tree.word_string(i)).collect();
        words.sort();
        assert_eq!(words, vec!["", "2", "22", "23", "3", "31", "312", "313"]);
    }

    #[test]
    fn dead_root_has_no_open_subtree() {
        let fam = MapFamily::preset(Preset::Coop { alpha: 1.0 }).unwrap();
        let tree = MarkedTree::from_shape(&fam, &d()).unwrap();
        let o = open_subtrees(&tree, &fam).unwrap();
        assert!(!o.exists && !o.exists_finite && o.minimal_one_sets.is_empty());
        assert!(find_open_subtree(&tree, &fam, false).unwrap().is_none());
    }

    #[test]
    fn finite_open_subtree_through_births() {
        let fam = MapFamily::preset(Preset::CoopBirth { alpha: 1.0, beta: 1.0 }).unwrap();
        let tree = MarkedTree::from_shape(&fam, &cob(b(), l(), d())).unwrap();
        let o = open_subtrees(&tree, &fam).unwrap();
        assert!(o.exists_finite);
        assert_eq!(o.minimal_one_sets, vec![vec![false]]);
        let w = find_open_subtree(&tree, &fam, true).unwrap().unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn one_sets_characterize_evaluation() {
        for (alpha, beta) in [(2.0, 0.0), (3.0, 0.4)] {
            let fam = if beta == 0.0 {
                MapFamily::preset(Preset::Coop { alpha }).unwrap()
            } else {
                MapFamily::preset(Preset::CoopBirth { alpha, beta }).unwrap()
            };
            let mut checked = 0;
            for seed in 0..300u64 {
                let tree = MarkedTree::sample_replica(&fam, 0.6, seed, 0, DEFAULT_NODE_BUDGET).unwrap();
                if tree.leaves().len() > 40 {
                    continue;
                }
                let Ok(o) = open_subtrees(&tree, &fam) else { continue };
                checked += 1;
                let mut rng = CounterRng::from_coords(seed, &[77]);
                for _ in 0..50 {
                    let values: Vec<State> = tree.leaves().iter().map(|_| rng.index(2) as State).collect();
                    let v = evaluate(&tree, &fam, &LeafAssignment { values: values.clone() });
                    let dominated = o
                        .minimal_one_sets
                        .iter()
                        .any(|y| y.iter().zip(&values).all(|(&yi, &xi)| !yi || xi == 1));
                    assert_eq!(v == 1, dominated);
                }
                assert_eq!(o.exists, find_open_subtree(&tree, &fam, false).unwrap().is_some());
                assert_eq!(o.exists_finite, find_open_subtree(&tree, &fam, true).unwrap().is_some());
            }
            assert!(checked > 150);
        }
    }
}
