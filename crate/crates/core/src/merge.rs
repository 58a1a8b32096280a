//! Merging several viable functions into one netlist whose select inputs
//! choose which function the data outputs compute.
//!
//! Function `i` is active for select code `i` (select `s0` is the code's
//! LSB). Each function body is a two-level SOP seed; every output then
//! passes through a balanced MUX2 tree. Codes `>= n` alias the last
//! function.

use std::collections::HashMap;

use thiserror::Error;

use crate::boolfunc::{BoolFuncError, TruthTable};
use crate::ga::PinAssignment;
use crate::netlist::{GateKind, Netlist, Wire};
use crate::sop::{self, Cube};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MergeError {
    #[error("need at least 2 functions, got {0}")]
    TooFewFunctions(usize),
    #[error("function {index} is {found_in}x{found_out}, expected {want_in}x{want_out}")]
    ArityMismatch {
        index: usize,
        found_in: usize,
        found_out: usize,
        want_in: usize,
        want_out: usize,
    },
    #[error("assignment covers {found} functions of {expected}")]
    AssignmentSize { found: usize, expected: usize },
    #[error("assignment is for {0}x{1} functions")]
    AssignmentArity(usize, usize),
    #[error(transparent)]
    Table(#[from] BoolFuncError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergedSpec {
    functions: Vec<TruthTable>,
    assignment: PinAssignment,
}

/// Number of select inputs needed for `n` functions.
pub fn select_count(n: usize) -> usize {
    assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

impl MergedSpec {
    pub fn new(functions: Vec<TruthTable>, assignment: PinAssignment) -> Result<MergedSpec, MergeError> {
        if functions.len() < 2 {
            return Err(MergeError::TooFewFunctions(functions.len()));
        }
        let (ni, no) = (functions[0].num_inputs(), functions[0].num_outputs());
        for (index, f) in functions.iter().enumerate() {
            if f.num_inputs() != ni || f.num_outputs() != no {
                return Err(MergeError::ArityMismatch {
                    index,
                    found_in: f.num_inputs(),
                    found_out: f.num_outputs(),
                    want_in: ni,
                    want_out: no,
                });
            }
        }
        if assignment.num_functions() != functions.len() {
            return Err(MergeError::AssignmentSize {
                found: assignment.num_functions(),
                expected: functions.len(),
            });
        }
        if assignment.num_inputs() != ni || assignment.num_outputs() != no {
            return Err(MergeError::AssignmentArity(assignment.num_inputs(), assignment.num_outputs()));
        }
        Ok(MergedSpec {
            functions,
            assignment,
        })
    }

    /// Spec with identity pins for every function.
    pub fn identity(functions: Vec<TruthTable>) -> Result<MergedSpec, MergeError> {
        let (ni, no) = functions
            .first()
            .map(|f| (f.num_inputs(), f.num_outputs()))
            .unwrap_or((0, 0));
        let a = PinAssignment::identity(functions.len(), ni, no);
        MergedSpec::new(functions, a)
    }

    pub fn functions(&self) -> &[TruthTable] {
        &self.functions
    }

    pub fn assignment(&self) -> &PinAssignment {
        &self.assignment
    }

    pub fn num_functions(&self) -> usize {
        self.functions.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.functions[0].num_inputs()
    }

    pub fn num_outputs(&self) -> usize {
        self.functions[0].num_outputs()
    }

    pub fn select_count(&self) -> usize {
        select_count(self.functions.len())
    }

    /// Function `i` as seen on the merged pins.
    pub fn viable(&self, i: usize) -> TruthTable {
        self.assignment
            .apply(i, &self.functions[i])
            .expect("arity checked at construction")
    }
}

struct SeedBuilder {
    net: Netlist,
    inverted: HashMap<usize, Wire>,
    products: HashMap<Cube, Wire>,
    constants: [Option<Wire>; 2],
}

impl SeedBuilder {
    fn literal(&mut self, var: usize, positive: bool) -> Wire {
        if positive {
            return Wire::Data(var);
        }
        if let Some(&w) = self.inverted.get(&var) {
            return w;
        }
        let w = self.net.add_gate(GateKind::Inv, vec![Wire::Data(var)]).unwrap();
        self.inverted.insert(var, w);
        w
    }

    fn constant(&mut self, value: bool) -> Wire {
        if let Some(w) = self.constants[value as usize] {
            return w;
        }
        let kind = if value { GateKind::Const1 } else { GateKind::Const0 };
        let w = self.net.add_gate(kind, vec![]).unwrap();
        self.constants[value as usize] = Some(w);
        w
    }

    fn product(&mut self, c: Cube) -> Wire {
        if c.mask == 0 {
            return self.constant(true);
        }
        if c.num_literals() == 1 {
            let (v, p) = c.literals().next().unwrap();
            return self.literal(v, p);
        }
        if let Some(&w) = self.products.get(&c) {
            return w;
        }
        let ins: Vec<Wire> = c.literals().map(|(v, p)| self.literal(v, p)).collect();
        let w = self.net.add_gate(GateKind::And, ins).unwrap();
        self.products.insert(c, w);
        w
    }

    fn sop(&mut self, on: &[u64], nv: usize) -> Wire {
        let cubes = sop::isop(on, nv);
        match cubes.len() {
            0 => self.constant(false),
            1 => self.product(cubes[0]),
            _ => {
                let ins: Vec<Wire> = cubes.iter().map(|&c| self.product(c)).collect();
                self.net.add_gate(GateKind::Or, ins).unwrap()
            }
        }
    }
}

/// Builds the merged netlist with data inputs `x0..`, selects `s0..` and
/// outputs `y0..`.
pub fn build_merged(spec: &MergedSpec) -> Netlist {
    let n = spec.num_functions();
    let (ni, no) = (spec.num_inputs(), spec.num_outputs());
    let k = spec.select_count();
    let mut b = SeedBuilder {
        net: Netlist::with_default_names(ni, k),
        inverted: HashMap::new(),
        products: HashMap::new(),
        constants: [None, None],
    };
    let bodies: Vec<Vec<Wire>> = (0..n)
        .map(|i| {
            let g = spec.viable(i);
            (0..no)
                .map(|j| b.sop(g.output(j).words(), ni))
                .collect()
        })
        .collect();
    for j in 0..no {
        let mut level: Vec<Wire> = (0..1usize << k).map(|c| bodies[c.min(n - 1)][j]).collect();
        for bit in 0..k {
            level = level
                .chunks(2)
                .map(|pair| {
                    if pair[0] == pair[1] {
                        pair[0]
                    } else {
                        b.net
                            .add_gate(GateKind::Mux2, vec![pair[0], pair[1], Wire::Select(bit)])
                            .unwrap()
                    }
                })
                .collect();
        }
        b.net.add_output(&format!("y{j}"), level[0]).unwrap();
    }
    b.net
}
