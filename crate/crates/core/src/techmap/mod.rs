//! Camouflage-aware technology mapping.
//!
//! The synthesized merged netlist is split into fanout-free trees and each
//! tree is covered by camouflaged cells. Select inputs never reach the
//! mapped circuit: signals that depend only on the selects become
//! per-function constants, and each covering cell must be able to realize
//! its subtree's function under every viable select code. The
//! configuration per viable function is returned as a [`Certificate`].

mod cover;
mod mapped;
mod tree;

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::boolfunc::Bits;
use crate::celllib::{lift_to_pins, Area, CellLibrary};
use crate::merge::MergedSpec;
use crate::netlist::{Netlist, Wire};

pub use cover::{absfunc, tree_cover, Choice, RequiredFunctions, Subtree, TreeCover};
pub use mapped::{Certificate, Instance, Manifest, MappedError, MappedNetlist};
pub use tree::{split_into_trees, tree_roots, Tree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TechmapError {
    #[error("gate {0} is a MUX2; map a gate-level netlist")]
    Mux2(usize),
    #[error("gate {gate} has {fanins} fanins, more than any cell")]
    WideGate { gate: usize, fanins: usize },
    #[error("subtree at gate {gate} has {leaves} non-select leaves")]
    TooManyLeaves { gate: usize, leaves: usize },
    #[error("no library cell covers gate {0}")]
    Uncoverable(usize),
    #[error("no library cell can produce the constant outputs")]
    NoConstantCell,
    #[error("netlist has {netlist} selects, the spec needs {spec}")]
    SelectMismatch { netlist: usize, spec: usize },
    #[error("netlist has {netlist} data inputs, the spec needs {spec}")]
    InputMismatch { netlist: usize, spec: usize },
    #[error("{0} viable functions exceed the supported 64")]
    TooManyCodes(usize),
}

/// Signals whose value is fixed by the select code alone.
#[derive(Clone, Debug)]
pub struct SelectInfo {
    codes: usize,
    /// Per gate: bit `i` is the value under code `i`, if constant for all codes.
    gates: Vec<Option<u64>>,
}

impl SelectInfo {
    /// Simulates the netlist under every code `0..codes` to find the
    /// gates that do not depend on the data inputs.
    pub fn new(net: &Netlist, codes: usize) -> Result<SelectInfo, TechmapError> {
        if codes > 64 {
            return Err(TechmapError::TooManyCodes(codes));
        }
        let nd = net.num_data();
        let rows = 1usize << nd;
        let data: Vec<Bits> = (0..nd).map(|i| Bits::var(nd, i)).collect();
        let mut gates: Vec<Option<u64>> = vec![Some(0); net.gates().len()];
        for code in 0..codes {
            let sel: Vec<Bits> = (0..net.num_selects())
                .map(|b| if (code >> b) & 1 == 1 { Bits::ones(rows) } else { Bits::zeros(rows) })
                .collect();
            let values = net.simulate_bits(&data, &sel);
            for (g, v) in values.iter().enumerate() {
                if let Some(m) = gates[g] {
                    gates[g] = if v.is_ones() {
                        Some(m | 1 << code)
                    } else if v.is_zero() {
                        Some(m)
                    } else {
                        None
                    };
                }
            }
        }
        Ok(SelectInfo { codes, gates })
    }

    pub fn codes(&self) -> usize {
        self.codes
    }

    /// Per-code value mask of a select-derived wire, `None` for data signals.
    pub fn constant(&self, w: Wire) -> Option<u64> {
        match w {
            Wire::Data(_) => None,
            Wire::Select(b) => Some((0..self.codes).filter(|c| (c >> b) & 1 == 1).fold(0, |m, c| m | 1 << c)),
            Wire::Gate(g) => self.gates[g],
        }
    }
}

/// Where pins that the configuration ignores are connected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DummyPolicy {
    /// The instance's first active fanin, or data input 0 without one.
    #[default]
    FirstActive,
    /// Always the given data input.
    Input(usize),
}

#[derive(Clone, Debug)]
pub struct Mapping {
    pub netlist: MappedNetlist,
    pub manifest: Manifest,
    pub area: Area,
}

/// Maps a merged netlist onto camouflaged cells and derives one
/// certificate per viable function of `spec`.
pub fn map_circuit(net: &Netlist, lib: &CellLibrary, spec: &MergedSpec) -> Result<Mapping, TechmapError> {
    if net.num_data() != spec.num_inputs() {
        return Err(TechmapError::InputMismatch {
            netlist: net.num_data(),
            spec: spec.num_inputs(),
        });
    }
    let names = (0..spec.num_functions()).map(|i| format!("f{i}")).collect();
    map_circuit_with(net, lib, spec.num_functions(), names, DummyPolicy::default())
}

/// [`map_circuit`] for `codes` viable select codes with explicit function
/// names and dummy policy.
pub fn map_circuit_with(
    net: &Netlist,
    lib: &CellLibrary,
    codes: usize,
    function_names: Vec<String>,
    policy: DummyPolicy,
) -> Result<Mapping, TechmapError> {
    let needed = crate::merge::select_count(codes);
    if net.num_selects() != needed {
        return Err(TechmapError::SelectMismatch {
            netlist: net.num_selects(),
            spec: needed,
        });
    }
    let sel = SelectInfo::new(net, codes)?;
    let forest = split_into_trees(net);
    let covers: Vec<TreeCover> = forest
        .par_iter()
        .map(|t| tree_cover(net, t, lib, &sel))
        .collect::<Result<_, _>>()?;
    let mut choice_of: HashMap<usize, &Choice> = HashMap::new();
    for (t, c) in forest.iter().zip(&covers) {
        for (&g, b) in t.gates.iter().zip(&c.best) {
            if let Some(b) = b {
                choice_of.insert(g, b);
            }
        }
    }

    let mut b = Builder {
        lib,
        sel: &sel,
        policy,
        choice_of,
        built: HashMap::new(),
        constants: HashMap::new(),
        cells: Vec::new(),
    };
    let mut outputs = Vec::new();
    for (name, w) in net.outputs() {
        let mw = match (*w, sel.constant(*w)) {
            (_, Some(mask)) => b.constant(mask)?,
            (Wire::Data(i), None) => Wire::Data(i),
            (Wire::Gate(g), None) => b.build(g),
            (Wire::Select(_), None) => unreachable!(),
        };
        outputs.push((name.clone(), mw));
    }

    let names = mapped::name_instances(net.data_inputs(), b.cells.len(), &outputs);
    let instances = b
        .cells
        .iter()
        .zip(names)
        .map(|(c, name)| Instance {
            name,
            cell: lib.cell(c.cell).name().to_string(),
            fanins: c.fanins.clone(),
        })
        .collect();
    let certificates = (0..codes)
        .map(|i| Certificate {
            function: i,
            config: b
                .cells
                .iter()
                .map(|c| {
                    let cell = lib.cell(c.cell);
                    let bits = lift_to_pins(c.per_code[i], &c.pin_map, cell.arity());
                    cell.plausible_index(bits).expect("matched cell realizes every code")
                })
                .collect(),
        })
        .collect();
    let area = b.cells.iter().map(|c| lib.cell(c.cell).area()).sum();
    Ok(Mapping {
        netlist: MappedNetlist {
            data_inputs: net.data_inputs().to_vec(),
            instances,
            outputs,
        },
        manifest: Manifest {
            function_names,
            pin_maps: b.cells.iter().map(|c| c.pin_map.clone()).collect(),
            certificates,
        },
        area,
    })
}

struct Placed {
    cell: usize,
    fanins: Vec<Wire>,
    pin_map: Vec<usize>,
    per_code: Vec<u16>,
}

struct Builder<'a> {
    lib: &'a CellLibrary,
    sel: &'a SelectInfo,
    policy: DummyPolicy,
    choice_of: HashMap<usize, &'a Choice>,
    built: HashMap<usize, Wire>,
    constants: HashMap<u64, Wire>,
    cells: Vec<Placed>,
}

impl Builder<'_> {
    fn place(&mut self, cell: usize, leaves: &[Wire], pin_map: Vec<usize>, per_code: Vec<u16>) -> Wire {
        let arity = self.lib.cell(cell).arity();
        let dummy = match self.policy {
            DummyPolicy::FirstActive => leaves.first().copied().unwrap_or(Wire::Data(0)),
            DummyPolicy::Input(i) => Wire::Data(i),
        };
        let mut fanins = vec![dummy; arity];
        for (&w, &p) in leaves.iter().zip(&pin_map) {
            fanins[p] = w;
        }
        self.cells.push(Placed {
            cell,
            fanins,
            pin_map,
            per_code,
        });
        Wire::Gate(self.cells.len() - 1)
    }

    fn build(&mut self, g: usize) -> Wire {
        if let Some(&w) = self.built.get(&g) {
            return w;
        }
        let choice = self.choice_of[&g];
        let leaves: Vec<Wire> = choice
            .data_leaves
            .iter()
            .map(|&w| match w {
                Wire::Gate(c) => self.build(c),
                other => other,
            })
            .collect();
        let w = self.place(choice.cell, &leaves, choice.pin_map.clone(), choice.per_code.clone());
        self.built.insert(g, w);
        w
    }

    /// A cell configured as the constant `mask` bit `i` under code `i`.
    fn constant(&mut self, mask: u64) -> Result<Wire, TechmapError> {
        if let Some(&w) = self.constants.get(&mask) {
            return Ok(w);
        }
        let per_code: Vec<u16> = (0..self.sel.codes()).map(|i| ((mask >> i) & 1) as u16).collect();
        let mut range = per_code.clone();
        range.sort_unstable();
        range.dedup();
        let m = self.lib.match_bits(0, &range).ok_or(TechmapError::NoConstantCell)?;
        let w = self.place(m.cell, &[], m.pin_map, per_code);
        self.constants.insert(mask, w);
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::GateKind;

    fn map1(net: &Netlist, codes: usize) -> Mapping {
        let names = (0..codes).map(|i| format!("f{i}")).collect();
        map_circuit_with(net, &CellLibrary::default(), codes, names, DummyPolicy::default()).unwrap()
    }

    #[test]
    fn inv_nand_becomes_and2() {
        let mut n = Netlist::with_default_names(2, 0);
        let a = n.add_gate(GateKind::Nand, vec![Wire::Data(0), Wire::Data(1)]).unwrap();
        let b = n.add_gate(GateKind::Inv, vec![a]).unwrap();
        n.add_output("y", b).unwrap();
        let m = map1(&n, 1);
        assert_eq!(m.area, Area::from_ge(1.33));
        assert_eq!(m.netlist.instances.len(), 1);
        assert_eq!(m.netlist.instances[0].cell, "AND2");
    }

    #[test]
    fn nand_with_select_is_one_cell() {
        let mut n = Netlist::with_default_names(1, 1);
        let a = n.add_gate(GateKind::Nand, vec![Wire::Data(0), Wire::Select(0)]).unwrap();
        n.add_output("y", a).unwrap();
        // {1, NOT x0} is inside the inverter's closure, which is cheaper
        let m = map1(&n, 2);
        assert_eq!(m.area, Area::from_ge(0.67));
        assert_eq!(m.netlist.instances[0].cell, "INV");

        let lib = CellLibrary::from_text("NAND2 2 7 1.0\n").unwrap();
        let m = map_circuit_with(&n, &lib, 2, vec!["a".into(), "b".into()], DummyPolicy::default()).unwrap();
        assert_eq!(m.area, Area::from_ge(1.0));
        assert_eq!(m.netlist.instances[0].cell, "NAND2");
        assert_eq!(m.netlist.instances[0].fanins, vec![Wire::Data(0), Wire::Data(0)]);
        let nand2 = lib.cell(0);
        // code 0: constant one; code 1: NOT x0 on pin 0
        let f0 = nand2.plausible_bits(m.manifest.certificates[0].config[0]);
        let f1 = nand2.plausible_bits(m.manifest.certificates[1].config[0]);
        assert_eq!(f0 & 0xF, 0xF);
        assert_eq!(f1 & 0xF, 0b0101);
    }

    #[test]
    fn select_only_output_uses_a_constant_cell() {
        let mut n = Netlist::with_default_names(1, 1);
        let a = n.add_gate(GateKind::Inv, vec![Wire::Select(0)]).unwrap();
        n.add_output("y", a).unwrap();
        n.add_output("z", Wire::Data(0)).unwrap();
        let m = map1(&n, 2);
        assert_eq!(m.netlist.instances.len(), 1);
        let t0 = m.netlist.evaluate(&[m.netlist_fn(0)]);
        assert_eq!(t0.output(0).count_ones(), 2);
        let t1 = m.netlist.evaluate(&[m.netlist_fn(1)]);
        assert!(t1.output(0).is_zero());
    }

    impl Mapping {
        fn netlist_fn(&self, code: usize) -> u16 {
            let lib = CellLibrary::default();
            let c = lib.cell(lib.find(&self.netlist.instances[0].cell).unwrap());
            c.plausible_bits(self.manifest.certificates[code].config[0])
        }
    }

    #[test]
    fn absfunc_examples() {
        let mut n = Netlist::with_default_names(1, 2);
        let a = n.add_gate(GateKind::Nand, vec![Wire::Data(0), Wire::Select(0)]).unwrap();
        let b = n.add_gate(GateKind::And, vec![Wire::Select(0), Wire::Select(1)]).unwrap();
        n.add_output("a", a).unwrap();
        n.add_output("b", b).unwrap();
        let is_sel = |w: Wire| matches!(w, Wire::Select(_));
        let r = absfunc(&n, &Subtree { root: 0, gates: vec![0] }, &is_sel).unwrap();
        assert_eq!(r.vars, vec![Wire::Data(0)]);
        assert_eq!(r.table, vec![0b11, 0b01]);
        let r = absfunc(&n, &Subtree { root: 1, gates: vec![1] }, &is_sel).unwrap();
        assert!(r.vars.is_empty());
        assert_eq!(r.table, vec![0, 0, 0, 1]);
        assert_eq!(r.range(), vec![0, 1]);
    }

    #[test]
    fn mapped_text_round_trips() {
        let mut n = Netlist::with_default_names(3, 1);
        let a = n.add_gate(GateKind::Nor, vec![Wire::Data(0), Wire::Select(0)]).unwrap();
        let b = n.add_gate(GateKind::Nand, vec![a, Wire::Data(2)]).unwrap();
        n.add_output("y", b).unwrap();
        n.add_output("w", a).unwrap();
        n.add_output("x1", Wire::Data(1)).unwrap();
        let m = map1(&n, 2);
        let text = m.netlist.emit();
        assert!(!text.contains(".selects"));
        let back = MappedNetlist::parse(&text).unwrap();
        assert_eq!(back.emit(), text);
        let man = m.manifest.emit(&m.netlist);
        assert_eq!(Manifest::parse(&man, &back).unwrap(), m.manifest);
    }
}
