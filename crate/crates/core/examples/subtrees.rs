//! Root-determining and open subtrees of a fixed marked tree.
//!
//! Nodes are named by words: `""` is the root and `"31"` is the first child
//! of its third child. The first tree has its root fixed by deaths, and the
//! search returns a minimal subtree that does so. The second tree, with
//! births, has an open subtree certifying root value 1.

use rtp_meanfield::tree::{
    find_minimal_root_determining, find_open_subtree, is_root_determining, open_subtrees, MarkedTree, Shape,
};
use rtp_meanfield::{MapFamily, Preset};

fn cob(a: Shape, b: Shape, c: Shape) -> Shape {
    Shape::map("cob", vec![a, b, c])
}

fn dth() -> Shape {
    Shape::map("dth", vec![])
}

fn bth() -> Shape {
    Shape::map("bth", vec![])
}

pub fn run_example() -> rtp_meanfield::Result<()> {
    let leaf = || Shape::Leaf;
    let coop = MapFamily::preset(Preset::Coop { alpha: 1.0 })?;
    let shape = cob(
        dth(),
        cob(cob(dth(), dth(), dth()), leaf(), leaf()),
        cob(cob(dth(), dth(), leaf()), cob(dth(), leaf(), leaf()), cob(dth(), leaf(), dth())),
    );
    let tree = MarkedTree::from_shape(&coop, &shape)?;
    println!("root determined: {}", is_root_determining(&tree, &coop)?);
    if let Some(sub) = find_minimal_root_determining(&tree, &coop)? {
        let mut words = sub.words(&tree);
        words.sort();
        println!("minimal root-determining subtree: {words:?}");
    }

    let with_births = MapFamily::preset(Preset::CoopBirth { alpha: 1.0, beta: 1.0 })?;
    let shape = cob(
        dth(),
        cob(cob(dth(), bth(), dth()), leaf(), leaf()),
        cob(cob(dth(), bth(), leaf()), cob(dth(), leaf(), leaf()), cob(dth(), leaf(), bth())),
    );
    let tree = MarkedTree::from_shape(&with_births, &shape)?;
    let open = open_subtrees(&tree, &with_births)?;
    println!("open subtree exists: {}, finite one exists: {}", open.exists, open.exists_finite);
    if let Some(ids) = find_open_subtree(&tree, &with_births, false)? {
        let mut words: Vec<String> = ids.iter().map(|&i| tree.word_string(i)).collect();
        words.sort();
        println!("open subtree: {words:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> rtp_meanfield::Result<()> {
    run_example()
}
