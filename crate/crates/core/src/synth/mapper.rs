//! Covering an AIG with INV and 2-4 input AND/NAND/OR/NOR gates.
//!
//! Each node gets two costs, one per output polarity. Candidate gates are
//! formed from AND trees that pass only through single-fanout,
//! non-complemented edges (at most four leaves); a positive node can be an
//! AND of its leaves or a NOR of their complements, a negative one a NAND
//! or an OR. Multi-fanout nodes are built once in their cheaper polarity
//! and shared; the other polarity costs an inverter.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::aig::{Aig, Lit};
use crate::celllib::{Area, CellLibrary};
use crate::netlist::{GateKind, Netlist, Wire};

const KINDS: [GateKind; 4] = [GateKind::And, GateKind::Nor, GateKind::Nand, GateKind::Or];

fn fallback() -> &'static CellLibrary {
    static LIB: OnceLock<CellLibrary> = OnceLock::new();
    LIB.get_or_init(CellLibrary::default_library)
}

struct Prices {
    inv: u32,
    /// `[kind][arity]` with kinds in [`KINDS`] order.
    nary: [[Option<u32>; 5]; 4],
}

impl Prices {
    fn new(lib: &CellLibrary) -> Prices {
        let fallback = fallback();
        let price = |name: &str| {
            lib.find(name)
                .map(|i| lib.cell(i).area().0)
                .or_else(|| fallback.find(name).map(|i| fallback.cell(i).area().0))
        };
        let mut nary = [[None; 5]; 4];
        for (k, kind) in KINDS.iter().enumerate() {
            for (a, slot) in nary[k].iter_mut().enumerate().skip(2) {
                if lib.find(&kind.cell_name(a)).is_some() {
                    *slot = price(&kind.cell_name(a));
                }
            }
        }
        Prices {
            inv: price("INV").expect("default library has INV"),
            nary,
        }
    }
}

pub(crate) fn gate_area(kind: GateKind, arity: usize, lib: &CellLibrary) -> Area {
    match kind {
        GateKind::Const0 | GateKind::Const1 => Area::ZERO,
        _ => {
            let name = kind.cell_name(arity);
            lib.find(&name)
                .map(|i| lib.cell(i).area())
                .or_else(|| fallback().find(&name).map(|i| fallback().cell(i).area()))
                .unwrap_or_else(|| panic!("no area for {name}"))
        }
    }
}

/// Sum of cell areas of a gate-level netlist (constants are free).
pub fn netlist_area(net: &Netlist, lib: &CellLibrary) -> Area {
    net.gates()
        .iter()
        .map(|g| gate_area(g.kind, g.fanins.len(), lib))
        .sum()
}

#[derive(Clone, Debug)]
enum Choice {
    Unset,
    Gate { kind: GateKind, ins: Vec<Lit> },
    Invert,
}

struct Mapper<'a> {
    aig: &'a Aig,
    refs: Vec<u32>,
    prices: Prices,
    cost: Vec<[u32; 2]>,
    choice: Vec<[Choice; 2]>,
    primary_neg: Vec<bool>,
}

impl Mapper<'_> {
    fn shared(&self, v: usize) -> bool {
        self.refs[v] > 1
    }

    fn expandable(&self, l: Lit) -> bool {
        !l.is_negated() && self.aig.is_and(l.var()) && !self.shared(l.var())
    }

    fn leaf_sets(&self, l: Lit, out: &mut Vec<Vec<Lit>>) {
        out.push(vec![l]);
        if self.expandable(l) {
            let [a, b] = self.aig.fanins(l.var());
            let (mut sa, mut sb) = (Vec::new(), Vec::new());
            self.leaf_sets(a, &mut sa);
            self.leaf_sets(b, &mut sb);
            for x in &sa {
                for y in &sb {
                    if x.len() + y.len() <= 4 {
                        out.push(x.iter().chain(y).copied().collect());
                    }
                }
            }
        }
    }

    fn node_sets(&self, v: usize) -> Vec<Vec<Lit>> {
        let [a, b] = self.aig.fanins(v);
        let (mut sa, mut sb) = (Vec::new(), Vec::new());
        self.leaf_sets(a, &mut sa);
        self.leaf_sets(b, &mut sb);
        let mut sets = Vec::new();
        for x in &sa {
            for y in &sb {
                if x.len() + y.len() > 4 {
                    continue;
                }
                let mut s: Vec<Lit> = x.iter().chain(y).copied().collect();
                s.sort_unstable();
                s.dedup();
                if s.len() >= 2 && !s.windows(2).any(|w| w[0] == !w[1]) {
                    sets.push(s);
                }
            }
        }
        sets
    }

    /// Cost of providing signal `l`, given the node costs so far.
    fn signal_cost(&self, l: Lit) -> u32 {
        let v = l.var();
        if !self.aig.is_and(v) {
            if l.is_negated() {
                self.prices.inv
            } else {
                0
            }
        } else if self.shared(v) {
            if l.is_negated() == self.primary_neg[v] {
                0
            } else {
                self.prices.inv
            }
        } else {
            self.cost[v][l.is_negated() as usize]
        }
    }

    fn run(&mut self) {
        for v in self.aig.and_vars() {
            let mut best = [(u32::MAX, Choice::Unset), (u32::MAX, Choice::Unset)];
            for set in self.node_sets(v) {
                let direct: u32 = set.iter().map(|&l| self.signal_cost(l)).sum();
                let flipped: u32 = set.iter().map(|&l| self.signal_cost(!l)).sum();
                for (k, &kind) in KINDS.iter().enumerate() {
                    let Some(area) = self.prices.nary[k][set.len()] else { continue };
                    // AND, NAND read the leaves; NOR, OR read their complements
                    let reads_flipped = matches!(kind, GateKind::Nor | GateKind::Or);
                    let pol = matches!(kind, GateKind::Nand | GateKind::Or) as usize;
                    let c = area + if reads_flipped { flipped } else { direct };
                    if c < best[pol].0 {
                        let ins = set.iter().map(|&l| l.negate_if(reads_flipped)).collect();
                        best[pol] = (c, Choice::Gate { kind, ins });
                    }
                }
            }
            let inv = self.prices.inv;
            let (c0, c1) = (best[0].0, best[1].0);
            if c1.saturating_add(inv) < c0 {
                best[0] = (c1 + inv, Choice::Invert);
            } else if c0.saturating_add(inv) < c1 {
                best[1] = (c0 + inv, Choice::Invert);
            }
            assert!(best[0].0 < u32::MAX && best[1].0 < u32::MAX, "library lacks 2-input gates");
            self.cost[v] = [best[0].0, best[1].0];
            self.primary_neg[v] = best[1].0 < best[0].0;
            let [b0, b1] = best;
            self.choice[v] = [b0.1, b1.1];
        }
    }
}

struct Emitter<'a, 'm> {
    m: &'m Mapper<'a>,
    net: Netlist,
    signals: HashMap<Lit, Wire>,
    nodes: HashMap<Lit, Wire>,
}

impl Emitter<'_, '_> {
    fn inv(&mut self, w: Wire) -> Wire {
        self.net.add_gate(GateKind::Inv, vec![w]).unwrap()
    }

    fn signal(&mut self, l: Lit) -> Wire {
        if let Some(&w) = self.signals.get(&l) {
            return w;
        }
        let v = l.var();
        let aig = self.m.aig;
        let w = if !aig.is_and(v) {
            let nd = aig.num_data();
            let base = if v - 1 < nd { Wire::Data(v - 1) } else { Wire::Select(v - 1 - nd) };
            if l.is_negated() {
                self.inv(base)
            } else {
                base
            }
        } else if self.m.shared(v) && l.is_negated() != self.m.primary_neg[v] {
            let p = self.node(Lit::new(v, self.m.primary_neg[v]));
            self.inv(p)
        } else {
            self.node(l)
        };
        self.signals.insert(l, w);
        w
    }

    fn node(&mut self, l: Lit) -> Wire {
        if let Some(&w) = self.nodes.get(&l) {
            return w;
        }
        let choice = self.m.choice[l.var()][l.is_negated() as usize].clone();
        let w = match choice {
            Choice::Gate { kind, ins } => {
                let wires: Vec<Wire> = ins.iter().map(|&i| self.signal(i)).collect();
                self.net.add_gate(kind, wires).unwrap()
            }
            Choice::Invert => {
                let other = self.node(!l);
                self.inv(other)
            }
            Choice::Unset => unreachable!("every node has a cover"),
        };
        self.nodes.insert(l, w);
        w
    }
}

/// Maps `aig` onto library gates. Outputs may share a wire or read an
/// input directly; constant outputs use CONST0/CONST1.
pub fn aig_to_gates(aig: &Aig, lib: &CellLibrary) -> Netlist {
    let n = aig.num_vars();
    let mut m = Mapper {
        aig,
        refs: aig.refs(),
        prices: Prices::new(lib),
        cost: vec![[0, 0]; n],
        choice: vec![[Choice::Unset, Choice::Unset]; n],
        primary_neg: vec![false; n],
    };
    m.run();
    let mut e = Emitter {
        m: &m,
        net: Netlist::new(aig.data_names().to_vec(), aig.select_names().to_vec())
            .expect("aig interface names are distinct"),
        signals: HashMap::new(),
        nodes: HashMap::new(),
    };
    let mut consts: [Option<Wire>; 2] = [None, None];
    for (name, l) in aig.outputs() {
        let w = if l.is_const() {
            let idx = l.is_negated() as usize;
            *consts[idx].get_or_insert_with(|| {
                let kind = if idx == 1 { GateKind::Const1 } else { GateKind::Const0 };
                e.net.add_gate(kind, vec![]).unwrap()
            })
        } else {
            e.signal(*l)
        };
        e.net.add_output(name, w).unwrap();
    }
    e.net
}
