use super::{evaluate_subtree, MarkedTree, NodeId, Subtree};
use crate::error::{Error, Result};
use crate::model::{decode_into, MapFamily, State};

/// Largest number of boundary assignments enumerated by brute force.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

/// How constancy of `G_U` is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Monotone comparison when the family allows it, brute force otherwise.
    Auto,
    /// Compare `G_U(min, …, min)` with `G_U(max, …, max)`; needs a monotone family on a bounded order.
    Monotone,
    /// Enumerate all `n^{|∇U|}` boundary assignments.
    BruteForce,
}

/// Whether `G_t` is constant on the whole truncated tree.
pub fn is_root_determining(tree: &MarkedTree, family: &MapFamily) -> Result<bool> {
    is_root_determining_subtree(tree, family, &Subtree::full(tree), Strategy::Auto)
}

pub fn is_root_determining_subtree(
    tree: &MarkedTree,
    family: &MapFamily,
    sub: &Subtree,
    strategy: Strategy,
) -> Result<bool> {
    let boundary = sub.boundary(tree);
    let monotone_ok = family.space().is_bounded() && family.is_monotone();
    let use_monotone = match strategy {
        Strategy::Auto => monotone_ok,
        Strategy::Monotone if !monotone_ok => {
            return Err(Error::Unsupported(
                "monotone shortcut needs a monotone family on a bounded order".into(),
            ))
        }
        Strategy::Monotone => true,
        Strategy::BruteForce => false,
    };
    if use_monotone {
        let top = (family.space().size() - 1) as State;
        let lo = evaluate_subtree(tree, family, sub, &boundary, &vec![0; boundary.len()]);
        let hi = evaluate_subtree(tree, family, sub, &boundary, &vec![top; boundary.len()]);
        return Ok(lo == hi);
    }
    let n = family.space().size();
    let count = (n as u128)
        .checked_pow(boundary.len() as u32)
        .filter(|&c| c <= ENUMERATION_LIMIT)
        .ok_or_else(|| {
            Error::EnumerationCap(format!("{n}^{} boundary assignments exceed 2^20", boundary.len()))
        })?;
    let mut x = vec![0 as State; boundary.len()];
    let mut first = None;
    for i in 0..count as usize {
        decode_into(i, n, &mut x);
        let v = evaluate_subtree(tree, family, sub, &boundary, &x);
        match first {
            None => first = Some(v),
            Some(f) if f != v => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

/// Greedy search for a minimal root determining subtree.
///
/// Starting from `S_t`, repeatedly removes the deepest (then lowest id) member
/// without member children whose removal keeps `G_U` constant.
pub fn find_minimal_root_determining(tree: &MarkedTree, family: &MapFamily) -> Result<Option<Subtree>> {
    let mut sub = Subtree::full(tree);
    if !is_root_determining_subtree(tree, family, &sub, Strategy::Auto)? {
        return Ok(None);
    }
    'outer: loop {
        let mut frontier: Vec<NodeId> = sub
            .ids()
            .into_iter()
            .filter(|&i| tree.children(i).all(|c| !sub.contains(c)))
            .collect();
        frontier.sort_by_key(|&i| (std::cmp::Reverse(tree.node(i).depth), i));
        for id in frontier {
            let mut smaller = sub.clone();
            smaller.remove(id);
            if is_root_determining_subtree(tree, family, &smaller, Strategy::Auto)? {
                sub = smaller;
                continue 'outer;
            }
        }
        break;
    }
    Ok(Some(sub))
}

/// At every `cob` node of `sub`: the first child is in `sub` and exactly one
/// of the other two is.
pub fn satisfies_cob_minimality(tree: &MarkedTree, family: &MapFamily, sub: &Subtree) -> bool {
    sub.ids().into_iter().all(|i| {
        let e = tree.node(i).map.expect("members are internal");
        if family.entries()[e].map.name() != "cob" {
            return true;
        }
        let c: Vec<bool> = tree.children(i).map(|c| sub.contains(c)).collect();
        c[0] && (c[1] != c[2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LocalMap, Preset, StateSpace};
    use crate::tree::{Shape, DEFAULT_NODE_BUDGET};

    fn coop() -> MapFamily {
        MapFamily::preset(Preset::Coop { alpha: 1.0 }).unwrap()
    }

    fn d() -> Shape {
        Shape::map("dth", vec![])
    }

    fn l() -> Shape {
        Shape::Leaf
    }

    fn cob(a: Shape, b: Shape, c: Shape) -> Shape {
        Shape::map("cob", vec![a, b, c])
    }

    pub(crate) fn cob_death_tree() -> Shape {
        cob(
            d(),
            cob(cob(d(), d(), d()), l(), l()),
            cob(cob(d(), d(), l()), cob(d(), l(), l()), cob(d(), l(), d())),
        )
    }

    #[test]
    fn minimal_subtree_of_cob_death_tree() {
        let fam = coop();
        let tree = MarkedTree::from_shape(&fam, &cob_death_tree()).unwrap();
        assert!(is_root_determining(&tree, &fam).unwrap());
        let sub = find_minimal_root_determining(&tree, &fam).unwrap().unwrap();
        let mut words = sub.words(&tree);
        words.sort();
        let mut expected = vec!["", "1", "3", "31", "33", "311", "312", "331", "333"];
        expected.sort();
        assert_eq!(words, expected);
        assert!(satisfies_cob_minimality(&tree, &fam, &sub));
    }

    #[test]
    fn small_cases() {
        let fam = coop();
        let t = MarkedTree::from_shape(&fam, &cob(d(), d(), l())).unwrap();
        assert!(is_root_determining(&t, &fam).unwrap());
        let leaf = MarkedTree::from_shape(&fam, &l()).unwrap();
        assert!(!is_root_determining(&leaf, &fam).unwrap());
        assert!(find_minimal_root_determining(&leaf, &fam).unwrap().is_none());
        let open = MarkedTree::from_shape(&fam, &cob(l(), l(), l())).unwrap();
        assert!(!is_root_determining(&open, &fam).unwrap());
        let single = MarkedTree::from_shape(&fam, &d()).unwrap();
        let sub = find_minimal_root_determining(&single, &fam).unwrap().unwrap();
        assert_eq!(sub.words(&single), vec![""]);
    }

    #[test]
    fn empty_subtree_is_identity() {
        let fam = coop();
        let t = MarkedTree::from_shape(&fam, &cob(d(), d(), l())).unwrap();
        let empty = Subtree::from_words(&t, &[]).unwrap();
        assert_eq!(empty.boundary(&t), vec![0]);
        assert!(!is_root_determining_subtree(&t, &fam, &empty, Strategy::BruteForce).unwrap());
    }

    #[test]
    fn monotone_shortcut_agrees_with_enumeration() {
        for (i, alpha) in [0.5, 1.0, 2.0, 4.5].into_iter().enumerate() {
            let fam = MapFamily::preset(Preset::Coop { alpha }).unwrap();
            let mut checked = 0;
            let mut seed = 0u64;
            while checked < 125 {
                seed += 1;
                let tree = MarkedTree::sample_replica(&fam, 0.6, 1000 * i as u64 + seed, 0, DEFAULT_NODE_BUDGET).unwrap();
                if tree.leaves().len() > 16 {
                    continue;
                }
                let full = Subtree::full(&tree);
                let a = is_root_determining_subtree(&tree, &fam, &full, Strategy::Monotone).unwrap();
                let b = is_root_determining_subtree(&tree, &fam, &full, Strategy::BruteForce).unwrap();
                assert_eq!(a, b, "alpha {alpha} seed {seed}");
                checked += 1;
            }
        }
    }

    #[test]
    fn greedy_result_is_minimal_on_random_trees() {
        let fam = MapFamily::preset(Preset::Coop { alpha: 1.5 }).unwrap();
        let mut found = 0;
        for seed in 0..400 {
            let tree = MarkedTree::sample(&fam, 1.0, seed).unwrap();
            if tree.len() > 200 {
                continue;
            }
            if let Some(sub) = find_minimal_root_determining(&tree, &fam).unwrap() {
                found += 1;
                assert!(satisfies_cob_minimality(&tree, &fam, &sub), "seed {seed}");
                for id in sub.ids() {
                    if tree.children(id).all(|c| !sub.contains(c)) {
                        let mut smaller = sub.clone();
                        smaller.remove(id);
                        assert!(!is_root_determining_subtree(&tree, &fam, &smaller, Strategy::Auto).unwrap());
                    }
                }
            }
        }
        assert!(found > 50);
    }

    #[test]
    fn brute_force_cap_and_unordered_spaces() {
        let xor = LocalMap::from_fn("xor", 2, 2, |x| x[0] ^ x[1]).unwrap();
        let fam = MapFamily::new(StateSpace::new(2).unwrap(), vec![(xor, 1.0)]).unwrap();
        let t = MarkedTree::from_shape(&fam, &Shape::map("xor", vec![l(), l()])).unwrap();
        assert!(!is_root_determining(&t, &fam).unwrap());
        let full = Subtree::full(&t);
        assert!(matches!(
            is_root_determining_subtree(&t, &fam, &full, Strategy::Monotone),
            Err(Error::Unsupported(_))
        ));
        let big = MarkedTree::sample(&fam, 4.0, 3).unwrap();
        if big.leaves().len() > 20 {
            assert!(matches!(is_root_determining(&big, &fam), Err(Error::EnumerationCap(_))));
        }
    }
}
