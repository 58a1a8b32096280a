#![allow(dead_code)]

use camomap::celllib::{Area, CellLibrary};
use camomap::netlist::{GateKind, Netlist, Wire};
use rand::Rng;

const KINDS: [GateKind; 6] = [
    GateKind::Inv,
    GateKind::Buf,
    GateKind::And,
    GateKind::Nand,
    GateKind::Or,
    GateKind::Nor,
];

fn random_kind<R: Rng>(rng: &mut R) -> (GateKind, usize) {
    let kind = KINDS[rng.gen_range(0..KINDS.len())];
    let arity = match kind {
        GateKind::Inv | GateKind::Buf => 1,
        _ => rng.gen_range(2..=4),
    };
    (kind, arity)
}

fn random_input<R: Rng>(rng: &mut R, nd: usize, ns: usize) -> Wire {
    if ns > 0 && rng.gen_bool(0.35) {
        Wire::Select(rng.gen_range(0..ns))
    } else {
        Wire::Data(rng.gen_range(0..nd))
    }
}

/// Random DAG of library-sized gates; selects are wired anywhere.
pub fn random_netlist<R: Rng>(rng: &mut R, nd: usize, ns: usize, gates: usize) -> Netlist {
    let mut n = Netlist::with_default_names(nd, ns);
    for _ in 0..gates {
        let (kind, arity) = random_kind(rng);
        let existing = n.gates().len();
        let fanins = (0..arity)
            .map(|_| {
                if existing > 0 && rng.gen_bool(0.5) {
                    Wire::Gate(rng.gen_range(0..existing))
                } else {
                    random_input(rng, nd, ns)
                }
            })
            .collect();
        n.add_gate(kind, fanins).unwrap();
    }
    let outs = rng.gen_range(1..=3);
    for j in 0..outs {
        let w = match rng.gen_range(0..10) {
            0 => random_input(rng, nd, ns),
            _ => Wire::Gate(rng.gen_range(0..gates)),
        };
        n.add_output(&format!("y{j}"), w).unwrap();
    }
    n
}

/// A fanout-free netlist of at most `max_gates` gates whose single output
/// is the root. Primary inputs may be read several times.
pub fn random_tree<R: Rng>(rng: &mut R, nd: usize, ns: usize, max_gates: usize) -> Netlist {
    // grow a shape top-down, then add gates bottom-up
    struct Node {
        kind: GateKind,
        fanins: Vec<Option<usize>>,
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut open: Vec<(usize, usize)> = Vec::new();
    let (k, a) = random_kind(rng);
    nodes.push(Node {
        kind: k,
        fanins: vec![None; a],
    });
    open.extend((0..a).map(|p| (0, p)));
    while let Some((parent, pin)) = open.pop() {
        if nodes.len() < max_gates && rng.gen_bool(0.55) {
            let (k, a) = random_kind(rng);
            let id = nodes.len();
            nodes.push(Node {
                kind: k,
                fanins: vec![None; a],
            });
            nodes[parent].fanins[pin] = Some(id);
            open.extend((0..a).map(|p| (id, p)));
        }
    }
    let mut n = Netlist::with_default_names(nd, ns);
    let mut wire_of = vec![None; nodes.len()];
    fn emit<R: Rng>(
        i: usize,
        nodes: &[Node],
        n: &mut Netlist,
        wire_of: &mut Vec<Option<Wire>>,
        rng: &mut R,
        nd: usize,
        ns: usize,
    ) -> Wire {
        let fanins: Vec<Wire> = nodes[i]
            .fanins
            .iter()
            .map(|f| match f {
                Some(c) => emit(*c, nodes, n, wire_of, rng, nd, ns),
                None => random_input(rng, nd, ns),
            })
            .collect();
        let w = n.add_gate(nodes[i].kind, fanins).unwrap();
        wire_of[i] = Some(w);
        w
    }
    let root = emit(0, &nodes, &mut n, &mut wire_of, rng, nd, ns);
    n.add_output("y", root).unwrap();
    n
}

fn eval_wire(net: &Netlist, w: Wire, data: usize, code: usize) -> bool {
    match w {
        Wire::Data(i) => (data >> i) & 1 == 1,
        Wire::Select(b) => (code >> b) & 1 == 1,
        Wire::Gate(g) => {
            let gate = net.gate(g);
            let ins: Vec<bool> = gate.fanins.iter().map(|&f| eval_wire(net, f, data, code)).collect();
            gate.kind.eval(&ins)
        }
    }
}

/// Per-code constant value of a wire if it ignores the data inputs.
pub fn select_constant(net: &Netlist, w: Wire, codes: usize) -> Option<Vec<bool>> {
    let rows = 1usize << net.num_data();
    (0..codes)
        .map(|c| {
            let v0 = eval_wire(net, w, 0, c);
            (0..rows).all(|d| eval_wire(net, w, d, c) == v0).then_some(v0)
        })
        .collect()
}

fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in injections(k - 1, n) {
        for p in 0..n {
            if !rest.contains(&p) {
                let mut v = rest.clone();
                v.push(p);
                out.push(v);
            }
        }
    }
    out
}

/// Cheapest cell that can realize every function in `funcs`, each given as
/// a row-indexed list of values over `k` variables.
pub fn cheapest_cell(lib: &CellLibrary, k: usize, funcs: &[Vec<bool>]) -> Option<Area> {
    let mut best: Option<Area> = None;
    for cell in lib.cells() {
        let n = cell.arity();
        if n < k {
            continue;
        }
        let fits = injections(k, n).iter().any(|map| {
            funcs.iter().all(|f| {
                cell.plausible().iter().any(|p| {
                    (0..1usize << n).all(|row| {
                        let var_row = map.iter().enumerate().fold(0, |a, (i, &pin)| a | ((row >> pin) & 1) << i);
                        p.eval(row) == f[var_row] as u64
                    })
                })
            })
        });
        if fits && best.is_none_or(|b| cell.area() < b) {
            best = Some(cell.area());
        }
    }
    best
}

/// All total costs of covering the cone rooted at gate `g`, enumerating
/// every choice of candidate at every covered gate.
fn all_cover_costs(net: &Netlist, lib: &CellLibrary, codes: usize, g: usize) -> Vec<Area> {
    let is_sel = |w: Wire| match w {
        Wire::Data(_) => false,
        Wire::Select(_) => true,
        Wire::Gate(_) => select_constant(net, w, codes).is_some(),
    };
    let children: Vec<usize> = net
        .gate(g)
        .fanins
        .iter()
        .filter_map(|&w| match w {
            Wire::Gate(c) if !is_sel(w) => Some(c),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for subset in 0..1usize << children.len() {
        let inside: Vec<usize> = (0..children.len())
            .filter(|b| (subset >> b) & 1 == 1)
            .map(|b| children[b])
            .collect();
        // leaves in first-use order
        let mut leaves: Vec<Wire> = Vec::new();
        let mut stack = vec![g];
        let mut order = Vec::new();
        while let Some(x) = stack.pop() {
            order.push(x);
            for &w in net.gate(x).fanins.iter().rev() {
                match w {
                    Wire::Gate(c) if c != g && inside.contains(&c) => stack.push(c),
                    _ => {}
                }
            }
        }
        let walk = |x: usize, leaves: &mut Vec<Wire>| {
            for &w in &net.gate(x).fanins {
                let inner = matches!(w, Wire::Gate(c) if inside.contains(&c));
                if !inner && !leaves.contains(&w) {
                    leaves.push(w);
                }
            }
        };
        for &x in &order {
            walk(x, &mut leaves);
        }
        let data: Vec<Wire> = leaves.iter().copied().filter(|&w| !is_sel(w)).collect();
        if data.len() > 4 {
            continue;
        }
        let consts: Vec<(Wire, Vec<bool>)> = leaves
            .iter()
            .filter(|&&w| is_sel(w))
            .map(|&w| {
                let v = match w {
                    Wire::Select(b) => (0..codes).map(|c| (c >> b) & 1 == 1).collect(),
                    _ => select_constant(net, w, codes).unwrap(),
                };
                (w, v)
            })
            .collect();
        let funcs: Vec<Vec<bool>> = (0..codes)
            .map(|code| {
                (0..1usize << data.len())
                    .map(|row| {
                        fn ev(
                            net: &Netlist,
                            x: usize,
                            inside: &[usize],
                            leaf: &dyn Fn(Wire) -> bool,
                        ) -> bool {
                            let ins: Vec<bool> = net
                                .gate(x)
                                .fanins
                                .iter()
                                .map(|&w| match w {
                                    Wire::Gate(c) if inside.contains(&c) => ev(net, c, inside, leaf),
                                    _ => leaf(w),
                                })
                                .collect();
                            net.gate(x).kind.eval(&ins)
                        }
                        let leaf = |w: Wire| {
                            if let Some(i) = data.iter().position(|&d| d == w) {
                                (row >> i) & 1 == 1
                            } else {
                                consts.iter().find(|(c, _)| *c == w).unwrap().1[code]
                            }
                        };
                        ev(net, g, &inside, &leaf)
                    })
                    .collect()
            })
            .collect();
        let Some(area) = cheapest_cell(lib, data.len(), &funcs) else {
            continue;
        };
        // every combination of covers of the gate leaves
        let mut totals = vec![area];
        for &w in &data {
            if let Wire::Gate(c) = w {
                let sub = all_cover_costs(net, lib, codes, c);
                totals = totals.iter().flat_map(|&t| sub.iter().map(move |&s| t + s)).collect();
            }
        }
        out.extend(totals);
    }
    out
}

/// Brute-force minimum cover cost of a single-tree netlist.
pub fn brute_force_tree_cost(net: &Netlist, lib: &CellLibrary, codes: usize) -> Option<Area> {
    let Wire::Gate(root) = net.outputs()[0].1 else {
        return Some(Area::ZERO);
    };
    if select_constant(net, Wire::Gate(root), codes).is_some() {
        return Some(Area::ZERO);
    }
    all_cover_costs(net, lib, codes, root).into_iter().min()
}

/// Cofactor closure of a pin-level function by breadth-first search.
pub fn closure_bits(nominal: u16, arity: usize) -> Vec<u16> {
    let rows = 1usize << arity;
    let mask = if rows == 16 { 0xFFFF } else { (1u16 << rows) - 1 };
    let mut seen = vec![nominal & mask];
    let mut i = 0;
    while i < seen.len() {
        let f = seen[i];
        for var in 0..arity {
            for value in [0, 1] {
                let mut g = 0u16;
                for row in 0..rows {
                    let src = (row & !(1 << var)) | (value << var);
                    g |= ((f >> src) & 1) << row;
                }
                if !seen.contains(&g) {
                    seen.push(g);
                }
            }
        }
        i += 1;
    }
    seen
}
