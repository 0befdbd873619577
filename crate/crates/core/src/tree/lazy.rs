//! Root values of the infinite tree truncated at `t`, computed without
//! building the truncation.
//!
//! Children are explored left to right and the evaluation of a node stops as
//! soon as the remaining block of its table is constant, so only the part of
//! the tree that actually influences the root is ever drawn.

use super::Marks;
use crate::error::{Error, Result};
use crate::model::{MapFamily, State};

pub(crate) struct LazyEval<'a> {
    marks: Marks<'a>,
    horizon: f64,
    budget: usize,
    visited: usize,
    // blocks[e][j][p]: value of map e when its first j arguments encode to p,
    // if that no longer depends on the rest
    blocks: &'a [Vec<Vec<Option<State>>>],
    preserved: Vec<bool>,
}

/// Constant-block tables for every map of the family.
pub(crate) fn block_tables(family: &MapFamily) -> Vec<Vec<Vec<Option<State>>>> {
    let n = family.space().size();
    family
        .entries()
        .iter()
        .map(|entry| {
            let table = entry.map.table();
            let k = entry.map.arity();
            (0..=k)
                .map(|j| {
                    let width = n.pow((k - j) as u32);
                    (0..n.pow(j as u32))
                        .map(|p| {
                            let block = &table[p * width..(p + 1) * width];
                            block.iter().all(|&v| v == block[0]).then_some(block[0])
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

impl<'a> LazyEval<'a> {
    pub fn new(
        family: &'a MapFamily,
        blocks: &'a [Vec<Vec<Option<State>>>],
        seed: u64,
        replica: u64,
        horizon: f64,
        budget: usize,
    ) -> Self {
        let preserved = (0..family.space().size() as State).map(|v| family.preserves(v)).collect();
        Self { marks: Marks::new(family, seed, replica), horizon, budget, visited: 0, blocks, preserved }
    }

    /// Root value when every boundary node carries `v`.
    pub fn root_value(&mut self, v: State) -> Result<State> {
        self.visited = 0;
        self.value(self.marks.root_key, 0.0, v)
    }

    fn value(&mut self, key: u64, birth: f64, v: State) -> Result<State> {
        if self.preserved[v as usize] {
            return Ok(v);
        }
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let (life, e) = self.marks.draw(key);
        let death = birth + life;
        if death > self.horizon {
            return Ok(v);
        }
        let family = self.marks.family;
        let n = family.space().size();
        let map = &family.entries()[e].map;
        let mut prefix = 0usize;
        for j in 0..map.arity() {
            if let Some(v) = self.blocks[e][j][prefix] {
                return Ok(v);
            }
            let x = self.value(Marks::child_key(key, j), death, v)?;
            prefix = prefix * n + x as usize;
        }
        Ok(map.table()[prefix])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;
    use crate::tree::{evaluate, is_root_determining, LeafAssignment, MarkedTree, DEFAULT_NODE_BUDGET};

    #[test]
    fn lazy_matches_full_tree() {
        let fam = MapFamily::preset(Preset::CoopBirth { alpha: 3.0, beta: 0.3 }).unwrap();
        let blocks = block_tables(&fam);
        for replica in 0..300 {
            let tree = MarkedTree::sample_replica(&fam, 0.9, 5, replica, DEFAULT_NODE_BUDGET).unwrap();
            let mut lazy = LazyEval::new(&fam, &blocks, 5, replica, 0.9, DEFAULT_NODE_BUDGET);
            for v in [0, 1] {
                let full = evaluate(&tree, &fam, &LeafAssignment::constant(&tree, v));
                assert_eq!(lazy.root_value(v).unwrap(), full);
            }
        }
    }

    #[test]
    fn lazy_constancy_matches_root_determining() {
        let fam = MapFamily::preset(Preset::Coop { alpha: 2.0 }).unwrap();
        let blocks = block_tables(&fam);
        for replica in 0..300 {
            let tree = MarkedTree::sample_replica(&fam, 1.5, 11, replica, DEFAULT_NODE_BUDGET).unwrap();
            let mut lazy = LazyEval::new(&fam, &blocks, 11, replica, 1.5, DEFAULT_NODE_BUDGET);
            let lo = lazy.root_value(0).unwrap();
            let hi = lazy.root_value(1).unwrap();
            assert_eq!(lo == hi, is_root_determining(&tree, &fam).unwrap());
        }
    }

    #[test]
    fn block_tables_for_cob() {
        let fam = MapFamily::preset(Preset::Coop { alpha: 1.0 }).unwrap();
        let blocks = block_tables(&fam);
        let cob = fam.entries().iter().position(|e| e.map.name() == "cob").unwrap();
        assert_eq!(blocks[cob][0], vec![None]);
        assert_eq!(blocks[cob][1], vec![None, Some(1)]);
        assert_eq!(blocks[cob][2], vec![Some(0), None, Some(1), Some(1)]);
    }
}
