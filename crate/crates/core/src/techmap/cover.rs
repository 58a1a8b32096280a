use std::collections::HashSet;

use crate::celllib::{Area, CellLibrary};
use crate::netlist::{GateKind, Netlist, Wire};

use super::tree::Tree;
use super::{SelectInfo, TechmapError};

/// Packed tables of the four variables of a cell-sized function.
const VAR_BITS: [u16; 4] = [0xAAAA, 0xCCCC, 0xF0F0, 0xFF00];

pub(crate) fn table_mask(k: usize) -> u16 {
    if k >= 4 {
        0xFFFF
    } else {
        ((1u32 << (1 << k)) - 1) as u16
    }
}

pub(crate) fn eval_kind(kind: GateKind, ins: &[u16]) -> u16 {
    let and = || ins.iter().fold(0xFFFF, |a, &b| a & b);
    let or = || ins.iter().fold(0, |a, &b| a | b);
    match kind {
        GateKind::Inv => !ins[0],
        GateKind::Buf => ins[0],
        GateKind::And => and(),
        GateKind::Nand => !and(),
        GateKind::Or => or(),
        GateKind::Nor => !or(),
        GateKind::Mux2 => (ins[1] & ins[2]) | (ins[0] & !ins[2]),
        GateKind::Const0 => 0,
        GateKind::Const1 => 0xFFFF,
    }
}

/// A connected group of gates with a single output, `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subtree {
    pub root: usize,
    /// Member gates, root included.
    pub gates: Vec<usize>,
}

impl Subtree {
    /// Signals read from outside the subtree, in depth-first pin order.
    pub fn leaves(&self, net: &Netlist) -> Vec<Wire> {
        let mut out = Vec::new();
        self.collect(net, self.root, &mut out);
        out
    }

    fn collect(&self, net: &Netlist, g: usize, out: &mut Vec<Wire>) {
        for &w in &net.gate(g).fanins {
            match w {
                Wire::Gate(c) if self.gates.contains(&c) => self.collect(net, c, out),
                _ if out.contains(&w) => {}
                _ => out.push(w),
            }
        }
    }

    /// Evaluates the subtree given a packed value for every leaf.
    pub fn eval(&self, net: &Netlist, leaf: &dyn Fn(Wire) -> u16) -> u16 {
        self.eval_at(net, self.root, leaf)
    }

    fn eval_at(&self, net: &Netlist, g: usize, leaf: &dyn Fn(Wire) -> u16) -> u16 {
        let gate = net.gate(g);
        let ins: Vec<u16> = gate
            .fanins
            .iter()
            .map(|&w| match w {
                Wire::Gate(c) if self.gates.contains(&c) => self.eval_at(net, c, leaf),
                _ => leaf(w),
            })
            .collect();
        eval_kind(gate.kind, &ins)
    }
}

/// The functions a subtree realizes over its non-select leaves, one per
/// assignment of its select leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequiredFunctions {
    /// Non-select leaves; variable `i` of every table.
    pub vars: Vec<Wire>,
    pub select_leaves: Vec<Wire>,
    /// Indexed by assignment; bit `j` of the index drives `select_leaves[j]`.
    pub table: Vec<u16>,
}

impl RequiredFunctions {
    /// Distinct functions in the table, ascending.
    pub fn range(&self) -> Vec<u16> {
        let mut r = self.table.clone();
        r.sort_unstable();
        r.dedup();
        r
    }
}

/// Abstracts the select leaves of `sub` away: every assignment to them
/// yields one function of the remaining leaves.
pub fn absfunc(
    net: &Netlist,
    sub: &Subtree,
    is_select: &dyn Fn(Wire) -> bool,
) -> Result<RequiredFunctions, TechmapError> {
    let leaves = sub.leaves(net);
    let (select_leaves, vars): (Vec<Wire>, Vec<Wire>) = leaves.into_iter().partition(|&w| is_select(w));
    if vars.len() > 4 {
        return Err(TechmapError::TooManyLeaves { gate: sub.root, leaves: vars.len() });
    }
    let mask = table_mask(vars.len());
    let table = (0..1usize << select_leaves.len())
        .map(|a| {
            let value = |w: Wire| {
                if let Some(j) = select_leaves.iter().position(|&s| s == w) {
                    if (a >> j) & 1 == 1 {
                        0xFFFF
                    } else {
                        0
                    }
                } else {
                    VAR_BITS[vars.iter().position(|&v| v == w).unwrap()]
                }
            };
            sub.eval(net, &value) & mask
        })
        .collect();
    Ok(RequiredFunctions {
        vars,
        select_leaves,
        table,
    })
}

/// The selected cell for one candidate subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub subtree: Subtree,
    /// Non-select leaves, wired to cell pins through `pin_map`.
    pub data_leaves: Vec<Wire>,
    pub cell: usize,
    pub pin_map: Vec<usize>,
    /// Function over `data_leaves` for each viable select code.
    pub per_code: Vec<u16>,
    /// Cell area plus the cost of the covered gates below the leaves.
    pub cost: Area,
}

/// Best candidate for every coverable gate of a tree.
#[derive(Clone, Debug)]
pub struct TreeCover {
    /// Parallel to `Tree::gates`; `None` for select-derived gates.
    pub best: Vec<Option<Choice>>,
    /// Cost of covering the root; zero when it is select-derived.
    pub cost: Area,
}

/// Covers one tree by dynamic programming over its gates. Candidates at a
/// gate are the gate plus any subset of its expandable children, i.e. one
/// or two gate levels, with at most four non-select leaves. A candidate is
/// accepted when one cell's plausible set contains its function under
/// every viable select code.
pub fn tree_cover(
    net: &Netlist,
    tree: &Tree,
    lib: &CellLibrary,
    sel: &SelectInfo,
) -> Result<TreeCover, TechmapError> {
    let members: HashSet<usize> = tree.gates.iter().copied().collect();
    let mut best: Vec<Option<Choice>> = vec![None; tree.gates.len()];
    for (idx, &g) in tree.gates.iter().enumerate() {
        if sel.constant(Wire::Gate(g)).is_some() {
            continue;
        }
        let gate = net.gate(g);
        if gate.kind == GateKind::Mux2 {
            return Err(TechmapError::Mux2(g));
        }
        if gate.fanins.len() > 4 {
            return Err(TechmapError::WideGate { gate: g, fanins: gate.fanins.len() });
        }
        let expandable: Vec<usize> = gate
            .fanins
            .iter()
            .filter_map(|&w| match w {
                Wire::Gate(c) if c != tree.root && members.contains(&c) && sel.constant(w).is_none() => Some(c),
                _ => None,
            })
            .collect();
        let mut winner: Option<Choice> = None;
        for subset in 0..1usize << expandable.len() {
            let mut gates = vec![g];
            gates.extend((0..expandable.len()).filter(|b| (subset >> b) & 1 == 1).map(|b| expandable[b]));
            let sub = Subtree { root: g, gates };
            let Some(cand) = candidate(net, sub, lib, sel, |c| {
                let i = tree.gates.iter().position(|&x| x == c)?;
                best[i].as_ref().map(|ch| ch.cost)
            }) else {
                continue;
            };
            let better = match &winner {
                None => true,
                Some(w) => {
                    (cand.cost, cand.data_leaves.len(), lib.cell(cand.cell).name())
                        < (w.cost, w.data_leaves.len(), lib.cell(w.cell).name())
                }
            };
            if better {
                winner = Some(cand);
            }
        }
        match winner {
            Some(w) => best[idx] = Some(w),
            None => return Err(TechmapError::Uncoverable(g)),
        }
    }
    let cost = best.last().and_then(|b| b.as_ref()).map_or(Area::ZERO, |c| c.cost);
    Ok(TreeCover { best, cost })
}

fn candidate(
    net: &Netlist,
    sub: Subtree,
    lib: &CellLibrary,
    sel: &SelectInfo,
    inner_cost: impl Fn(usize) -> Option<Area>,
) -> Option<Choice> {
    let leaves = sub.leaves(net);
    let data_leaves: Vec<Wire> = leaves.iter().copied().filter(|&w| sel.constant(w).is_none()).collect();
    let k = data_leaves.len();
    if k > 4 {
        return None;
    }
    let mask = table_mask(k);
    let per_code: Vec<u16> = (0..sel.codes())
        .map(|code| {
            let value = |w: Wire| match sel.constant(w) {
                Some(m) if (m >> code) & 1 == 1 => 0xFFFF,
                Some(_) => 0,
                None => VAR_BITS[data_leaves.iter().position(|&v| v == w).unwrap()],
            };
            sub.eval(net, &value) & mask
        })
        .collect();
    let mut range = per_code.clone();
    range.sort_unstable();
    range.dedup();
    let m = lib.match_bits(k, &range)?;
    let mut cost = lib.cell(m.cell).area();
    for &w in &data_leaves {
        if let Wire::Gate(c) = w {
            // leaves owned by the tree carry their own cover cost; other
            // tree roots are paid for by their own tree
            if let Some(c) = inner_cost(c) {
                cost += c;
            }
        }
    }
    Some(Choice {
        subtree: sub,
        data_leaves,
        cell: m.cell,
        pin_map: m.pin_map,
        per_code,
        cost,
    })
}
