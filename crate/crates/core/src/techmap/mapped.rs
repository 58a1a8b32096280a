//! Mapped netlists and doping manifests.
//!
//! A mapped netlist is written in the `.cnl` format with library cell names
//! as gate kinds and no `.selects` line. Every cell pin is connected; pins
//! the configuration ignores read a dummy wire.
//!
//! The manifest is private to the designer. For each viable function it
//! lists every instance with its configuration:
//!
//! ```text
//! .function 0 G0
//! u3 NAND2 2 0,1
//! y0 INV 1 -
//! .end
//! ```
//!
//! Columns are instance name, cell name, plausible-function index and the
//! pins the instance's active leaves connect to (`-` for none).

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::boolfunc::{Bits, TruthTable};
use crate::celllib::{Area, CellLibrary};
use crate::netlist::{NetlistError, RawCnl, Wire, WireNames};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MappedError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("mapped netlist declares select inputs")]
    HasSelects,
    #[error("unknown cell {0:?}")]
    UnknownCell(String),
    #[error("instance {name:?}: cell {cell} has {arity} pins, {fanins} connected")]
    PinCount {
        name: String,
        cell: String,
        arity: usize,
        fanins: usize,
    },
    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub cell: String,
    /// One driver per cell pin.
    pub fanins: Vec<Wire>,
}

/// A select-free netlist of camouflaged cell instances in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedNetlist {
    pub data_inputs: Vec<String>,
    pub instances: Vec<Instance>,
    /// `Wire::Gate(j)` is instance `j`.
    pub outputs: Vec<(String, Wire)>,
}

impl MappedNetlist {
    pub fn area(&self, lib: &CellLibrary) -> Result<Area, MappedError> {
        self.instances
            .iter()
            .map(|i| {
                lib.find(&i.cell)
                    .map(|c| lib.cell(c).area())
                    .ok_or_else(|| MappedError::UnknownCell(i.cell.clone()))
            })
            .sum()
    }

    pub fn instance_index(&self, name: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.name == name)
    }

    /// Checks that every instance names a library cell with matching pins.
    pub fn check(&self, lib: &CellLibrary) -> Result<(), MappedError> {
        for inst in &self.instances {
            let c = lib.find(&inst.cell).ok_or_else(|| MappedError::UnknownCell(inst.cell.clone()))?;
            let arity = lib.cell(c).arity();
            if arity != inst.fanins.len() {
                return Err(MappedError::PinCount {
                    name: inst.name.clone(),
                    cell: inst.cell.clone(),
                    arity,
                    fanins: inst.fanins.len(),
                });
            }
        }
        Ok(())
    }

    /// Exhaustive simulation with instance `j` computing the packed
    /// pin-level function `funcs[j]`.
    pub fn evaluate(&self, funcs: &[u16]) -> TruthTable {
        let nd = self.data_inputs.len();
        let rows = 1usize << nd;
        let mut values: Vec<Bits> = Vec::with_capacity(self.instances.len());
        let data: Vec<Bits> = (0..nd).map(|i| Bits::var(nd, i)).collect();
        for (j, inst) in self.instances.iter().enumerate() {
            let v = Bits::from_fn(rows, |r| {
                let mut pin_row = 0usize;
                for (p, &w) in inst.fanins.iter().enumerate() {
                    let bit = match w {
                        Wire::Data(i) => data[i].get(r),
                        Wire::Gate(g) => values[g].get(r),
                        Wire::Select(_) => unreachable!("mapped netlists have no selects"),
                    };
                    pin_row |= (bit as usize) << p;
                }
                (funcs[j] >> pin_row) & 1 == 1
            });
            values.push(v);
        }
        let outs = self
            .outputs
            .iter()
            .map(|(_, w)| match *w {
                Wire::Data(i) => data[i].clone(),
                Wire::Gate(g) => values[g].clone(),
                Wire::Select(_) => unreachable!(),
            })
            .collect();
        TruthTable::from_outputs(nd, outs).expect("mapped netlist has outputs")
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, ".inputs {}", self.data_inputs.join(" "));
        let onames: Vec<&str> = self.outputs.iter().map(|(n, _)| n.as_str()).collect();
        let _ = writeln!(out, ".outputs {}", onames.join(" "));
        let wire_name = |w: Wire| -> &str {
            match w {
                Wire::Data(i) => &self.data_inputs[i],
                Wire::Gate(g) => &self.instances[g].name,
                Wire::Select(_) => unreachable!(),
            }
        };
        for inst in &self.instances {
            let ins: Vec<&str> = inst.fanins.iter().map(|&w| wire_name(w)).collect();
            let _ = writeln!(out, ".gate {} {} = {}", inst.cell, inst.name, ins.join(" "));
        }
        for (name, w) in &self.outputs {
            let self_named = match *w {
                Wire::Gate(g) => &self.instances[g].name == name,
                Wire::Data(i) => &self.data_inputs[i] == name,
                Wire::Select(_) => false,
            };
            if !self_named {
                let _ = writeln!(out, ".alias {} = {}", name, wire_name(*w));
            }
        }
        out.push_str(".end\n");
        out
    }

    pub fn parse(text: &str) -> Result<MappedNetlist, MappedError> {
        let raw = RawCnl::parse(text)?;
        if !raw.selects.is_empty() {
            return Err(MappedError::HasSelects);
        }
        Ok(MappedNetlist {
            data_inputs: raw.inputs,
            instances: raw
                .gates
                .into_iter()
                .map(|g| Instance {
                    name: g.name,
                    cell: g.kind,
                    fanins: g.fanins,
                })
                .collect(),
            outputs: raw.outputs,
        })
    }
}

/// Picks instance names: an instance driving an output takes that name,
/// the rest are `u<j>`.
pub(crate) fn name_instances(data_inputs: &[String], count: usize, outputs: &[(String, Wire)]) -> Vec<String> {
    let mut names = WireNames::new(data_inputs);
    let mut out = vec![String::new(); count];
    for (name, w) in outputs {
        names.reserve(name);
        if let Wire::Gate(g) = *w {
            if out[g].is_empty() {
                out[g] = name.clone();
            }
        }
    }
    for (j, n) in out.iter_mut().enumerate() {
        if n.is_empty() {
            *n = names.fresh(&format!("u{j}"));
        }
    }
    out
}

/// Configuration of every instance for one viable function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub function: usize,
    /// Plausible-function index per instance.
    pub config: Vec<usize>,
}

/// The designer-private doping record: pin maps plus one certificate per
/// viable function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub function_names: Vec<String>,
    /// Pins that instance `j`'s active leaves connect to, in leaf order.
    pub pin_maps: Vec<Vec<usize>>,
    pub certificates: Vec<Certificate>,
}

impl Manifest {
    pub fn emit(&self, net: &MappedNetlist) -> String {
        let mut out = String::new();
        for cert in &self.certificates {
            let _ = writeln!(out, ".function {} {}", cert.function, self.function_names[cert.function]);
            for (j, inst) in net.instances.iter().enumerate() {
                let pins = if self.pin_maps[j].is_empty() {
                    "-".to_string()
                } else {
                    self.pin_maps[j].iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
                };
                let _ = writeln!(out, "{} {} {} {}", inst.name, inst.cell, cert.config[j], pins);
            }
            out.push_str(".end\n");
        }
        out
    }

    /// Parses a manifest against the netlist it configures. Every block
    /// must list every instance exactly once, with the netlist's cell.
    pub fn parse(text: &str, net: &MappedNetlist) -> Result<Manifest, MappedError> {
        let index: HashMap<&str, usize> = net
            .instances
            .iter()
            .enumerate()
            .map(|(j, i)| (i.name.as_str(), j))
            .collect();
        let mut function_names: Vec<String> = Vec::new();
        let mut pin_maps: Vec<Option<Vec<usize>>> = vec![None; net.instances.len()];
        let mut certificates: Vec<Certificate> = Vec::new();
        let mut open: Option<Vec<Option<usize>>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| MappedError::Manifest { line, msg };
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks[0] {
                ".function" => {
                    if open.is_some() {
                        return Err(err("nested .function".into()));
                    }
                    if toks.len() != 3 || toks[1].parse() != Ok(certificates.len()) {
                        return Err(err(format!("expected .function {} NAME", certificates.len())));
                    }
                    function_names.push(toks[2].to_string());
                    open = Some(vec![None; net.instances.len()]);
                }
                ".end" => {
                    let cfg = open.take().ok_or_else(|| err(".end outside a block".into()))?;
                    let config = cfg
                        .into_iter()
                        .enumerate()
                        .map(|(j, c)| c.ok_or_else(|| err(format!("instance {} not configured", net.instances[j].name))))
                        .collect::<Result<Vec<_>, _>>()?;
                    certificates.push(Certificate {
                        function: certificates.len(),
                        config,
                    });
                }
                name => {
                    let cfg = open.as_mut().ok_or_else(|| err("line outside a .function block".into()))?;
                    if toks.len() != 4 {
                        return Err(err("expected INSTANCE CELL INDEX PINS".into()));
                    }
                    let &j = index.get(name).ok_or_else(|| err(format!("unknown instance {name:?}")))?;
                    if toks[1] != net.instances[j].cell {
                        return Err(err(format!("{name} is a {}, not {}", net.instances[j].cell, toks[1])));
                    }
                    if cfg[j].is_some() {
                        return Err(err(format!("{name} configured twice")));
                    }
                    cfg[j] = Some(toks[2].parse().map_err(|_| err("bad plausible index".into()))?);
                    let pins: Vec<usize> = if toks[3] == "-" {
                        Vec::new()
                    } else {
                        toks[3]
                            .split(',')
                            .map(|p| p.parse())
                            .collect::<Result<_, _>>()
                            .map_err(|_| err("bad pin map".into()))?
                    };
                    match &pin_maps[j] {
                        Some(p) if *p != pins => return Err(err(format!("{name}: pin map differs between blocks"))),
                        _ => pin_maps[j] = Some(pins),
                    }
                }
            }
        }
        if open.is_some() {
            return Err(MappedError::Manifest {
                line: text.lines().count(),
                msg: "missing .end".into(),
            });
        }
        Ok(Manifest {
            function_names,
            pin_maps: pin_maps.into_iter().map(Option::unwrap_or_default).collect(),
            certificates,
        })
    }
}
