use crate::netlist::{Netlist, Wire};

/// A fanout-free part of a netlist. Every gate except the root has exactly
/// one reader, which lies in the same tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub root: usize,
    /// Member gates in topological order; the root is last.
    pub gates: Vec<usize>,
    /// Distinct signals read by the tree from outside it, in first-use order.
    pub leaves: Vec<Wire>,
}

/// Roots are gates read by more (or fewer) than one gate pin, and gates
/// that drive an output.
pub fn tree_roots(net: &Netlist) -> Vec<bool> {
    let fanouts = net.gate_fanouts();
    let mut root: Vec<bool> = fanouts.iter().map(|&f| f != 1).collect();
    for (_, w) in net.outputs() {
        if let Wire::Gate(g) = *w {
            root[g] = true;
        }
    }
    root
}

/// Owning tree root of every gate.
pub(crate) fn owners(net: &Netlist, root: &[bool]) -> Vec<usize> {
    let n = net.gates().len();
    let mut reader = vec![usize::MAX; n];
    for (i, g) in net.gates().iter().enumerate() {
        for w in &g.fanins {
            if let Wire::Gate(j) = *w {
                reader[j] = i;
            }
        }
    }
    let mut owner = vec![0; n];
    for g in (0..n).rev() {
        owner[g] = if root[g] { g } else { owner[reader[g]] };
    }
    owner
}

/// Splits a netlist at every multi-fanout net. Trees come ordered by root,
/// so each tree's leaf trees precede it.
pub fn split_into_trees(net: &Netlist) -> Vec<Tree> {
    let root = tree_roots(net);
    let owner = owners(net, &root);
    let mut trees: Vec<Tree> = Vec::new();
    let mut index_of = vec![usize::MAX; net.gates().len()];
    for (g, &is_root) in root.iter().enumerate() {
        if is_root {
            index_of[g] = trees.len();
            trees.push(Tree {
                root: g,
                gates: Vec::new(),
                leaves: Vec::new(),
            });
        }
    }
    for g in 0..net.gates().len() {
        let t = &mut trees[index_of[owner[g]]];
        t.gates.push(g);
        for &w in &net.gate(g).fanins {
            let inside = matches!(w, Wire::Gate(j) if owner[j] == owner[g] && !root[j]);
            if !inside && !t.leaves.contains(&w) {
                t.leaves.push(w);
            }
        }
    }
    trees
}
