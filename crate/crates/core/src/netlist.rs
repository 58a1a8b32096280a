//! Gate-level combinational netlists with first-class select inputs.
//!
//! # `.cnl` text format
//!
//! Line oriented, `#` starts a comment, blank lines are ignored.
//!
//! ```text
//! .inputs  x0 x1 x2 x3        # data inputs (may repeat)
//! .selects s0                 # select inputs (may repeat)
//! .outputs y0 y1              # output names (may repeat)
//! .gate NAND2 n4 = x0 x1      # KIND[arity] OUT = IN...
//! .gate MUX2 y0 = n4 x2 s0    # MUX2 pins: d0 d1 sel
//! .alias y1 = x3              # bind an output to an existing wire
//! .end
//! ```
//!
//! Gate kinds are `INV BUF AND NAND OR NOR MUX2 CONST0 CONST1`; an optional
//! numeric suffix on the kind must equal the number of fanins. Gates may
//! be listed in any order; cycles, undefined wires and multiply-driven
//! wires are rejected. An output is bound either by a gate of the same
//! name or by an `.alias`.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::boolfunc::{Bits, TruthTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("undefined wire {0:?}")]
    UndefinedWire(String),
    #[error("wire {0:?} has more than one driver")]
    DuplicateDriver(String),
    #[error("{0:?} is declared both as a data input and a select")]
    SelectIsData(String),
    #[error("combinational cycle through {0:?}")]
    Cycle(String),
    #[error("output {0:?} is not driven")]
    UnboundOutput(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Inv,
    Buf,
    And,
    Nand,
    Or,
    Nor,
    /// Pins `d0 d1 sel`; output is `d1` when `sel` is high.
    Mux2,
    Const0,
    Const1,
}

impl GateKind {
    pub fn base_name(self) -> &'static str {
        match self {
            GateKind::Inv => "INV",
            GateKind::Buf => "BUF",
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Mux2 => "MUX2",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
        }
    }

    /// Library-style name including arity for the n-ary kinds (`NAND3`).
    pub fn cell_name(self, arity: usize) -> String {
        match self {
            GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor => {
                format!("{}{}", self.base_name(), arity)
            }
            _ => self.base_name().to_string(),
        }
    }

    /// Parses `NAND`, `NAND3`, `INV`, ... returning the kind and the
    /// arity suffix if present.
    pub fn parse(token: &str) -> Option<(GateKind, Option<usize>)> {
        let upper = token.to_ascii_uppercase();
        for kind in [GateKind::Mux2, GateKind::Const0, GateKind::Const1] {
            if upper == kind.base_name() {
                return Some((kind, None));
            }
        }
        let split = upper
            .find(|c: char| c.is_ascii_digit())
            .unwrap_or(upper.len());
        let (base, digits) = upper.split_at(split);
        let kind = match base {
            "INV" => GateKind::Inv,
            "BUF" => GateKind::Buf,
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            _ => return None,
        };
        let arity = if digits.is_empty() {
            None
        } else {
            Some(digits.parse().ok()?)
        };
        Some((kind, arity))
    }

    pub fn arity_ok(self, arity: usize) -> bool {
        match self {
            GateKind::Inv | GateKind::Buf => arity == 1,
            GateKind::And | GateKind::Nand | GateKind::Or | GateKind::Nor => arity >= 2,
            GateKind::Mux2 => arity == 3,
            GateKind::Const0 | GateKind::Const1 => arity == 0,
        }
    }

    pub fn eval(self, ins: &[bool]) -> bool {
        match self {
            GateKind::Inv => !ins[0],
            GateKind::Buf => ins[0],
            GateKind::And => ins.iter().all(|&b| b),
            GateKind::Nand => !ins.iter().all(|&b| b),
            GateKind::Or => ins.iter().any(|&b| b),
            GateKind::Nor => !ins.iter().any(|&b| b),
            GateKind::Mux2 => {
                if ins[2] {
                    ins[1]
                } else {
                    ins[0]
                }
            }
            GateKind::Const0 => false,
            GateKind::Const1 => true,
        }
    }

    /// Bit-parallel evaluation; `len` is only used by the constants.
    pub fn eval_bits(self, ins: &[&Bits], len: usize) -> Bits {
        let fold = |f: fn(&Bits, &Bits) -> Bits| {
            let mut acc = ins[0].clone();
            for b in &ins[1..] {
                acc = f(&acc, b);
            }
            acc
        };
        match self {
            GateKind::Inv => ins[0].not(),
            GateKind::Buf => ins[0].clone(),
            GateKind::And => fold(Bits::and),
            GateKind::Nand => fold(Bits::and).not(),
            GateKind::Or => fold(Bits::or),
            GateKind::Nor => fold(Bits::or).not(),
            GateKind::Mux2 => ins[1].and(ins[2]).or(&ins[0].and_not(ins[2])),
            GateKind::Const0 => Bits::zeros(len),
            GateKind::Const1 => Bits::ones(len),
        }
    }
}

/// A signal: a data input, a select input or a gate output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wire {
    Data(usize),
    Select(usize),
    Gate(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub fanins: Vec<Wire>,
}

/// A combinational netlist whose gates are stored in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    data_inputs: Vec<String>,
    select_inputs: Vec<String>,
    gates: Vec<Gate>,
    outputs: Vec<(String, Wire)>,
}

impl Netlist {
    pub fn new(data_inputs: Vec<String>, select_inputs: Vec<String>) -> Result<Netlist, NetlistError> {
        let mut seen = HashSet::new();
        for name in &data_inputs {
            if !seen.insert(name.as_str()) {
                return Err(NetlistError::DuplicateName(name.clone()));
            }
        }
        for name in &select_inputs {
            if data_inputs.contains(name) {
                return Err(NetlistError::SelectIsData(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(NetlistError::DuplicateName(name.clone()));
            }
        }
        Ok(Netlist {
            data_inputs,
            select_inputs,
            gates: Vec::new(),
            outputs: Vec::new(),
        })
    }

    /// Netlist with inputs `x0..`, selects `s0..`.
    pub fn with_default_names(num_data: usize, num_select: usize) -> Netlist {
        Netlist::new(
            (0..num_data).map(|i| format!("x{i}")).collect(),
            (0..num_select).map(|i| format!("s{i}")).collect(),
        )
        .expect("generated names are distinct")
    }

    fn check_wire(&self, w: Wire) -> Result<(), NetlistError> {
        let ok = match w {
            Wire::Data(i) => i < self.data_inputs.len(),
            Wire::Select(i) => i < self.select_inputs.len(),
            Wire::Gate(i) => i < self.gates.len(),
        };
        if ok {
            Ok(())
        } else {
            Err(NetlistError::UndefinedWire(format!("{w:?}")))
        }
    }

    /// Appends a gate. Fanins must already exist, which keeps the gate
    /// list topologically ordered.
    pub fn add_gate(&mut self, kind: GateKind, fanins: Vec<Wire>) -> Result<Wire, NetlistError> {
        if !kind.arity_ok(fanins.len()) {
            return Err(NetlistError::InvalidGate(format!(
                "{} with {} fanins",
                kind.base_name(),
                fanins.len()
            )));
        }
        for &w in &fanins {
            self.check_wire(w)?;
        }
        self.gates.push(Gate { kind, fanins });
        Ok(Wire::Gate(self.gates.len() - 1))
    }

    pub fn add_output(&mut self, name: &str, wire: Wire) -> Result<(), NetlistError> {
        self.check_wire(wire)?;
        if self.outputs.iter().any(|(n, _)| n == name) || self.select_inputs.iter().any(|n| n == name) {
            return Err(NetlistError::DuplicateName(name.to_string()));
        }
        if self.data_inputs.iter().any(|n| n == name) && wire != Wire::Data(self.data_index(name).unwrap()) {
            return Err(NetlistError::DuplicateDriver(name.to_string()));
        }
        self.outputs.push((name.to_string(), wire));
        Ok(())
    }

    fn data_index(&self, name: &str) -> Option<usize> {
        self.data_inputs.iter().position(|n| n == name)
    }

    pub fn data_inputs(&self) -> &[String] {
        &self.data_inputs
    }

    pub fn select_inputs(&self) -> &[String] {
        &self.select_inputs
    }

    pub fn num_data(&self) -> usize {
        self.data_inputs.len()
    }

    pub fn num_selects(&self) -> usize {
        self.select_inputs.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[id]
    }

    pub fn outputs(&self) -> &[(String, Wire)] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Dense index of a wire: data inputs, then selects, then gates.
    pub fn wire_index(&self, w: Wire) -> usize {
        match w {
            Wire::Data(i) => i,
            Wire::Select(i) => self.data_inputs.len() + i,
            Wire::Gate(i) => self.data_inputs.len() + self.select_inputs.len() + i,
        }
    }

    pub fn num_wires(&self) -> usize {
        self.data_inputs.len() + self.select_inputs.len() + self.gates.len()
    }

    /// Number of gate pins and outputs reading each gate.
    pub fn gate_fanouts(&self) -> Vec<usize> {
        let mut refs = vec![0; self.gates.len()];
        for g in &self.gates {
            for w in &g.fanins {
                if let Wire::Gate(j) = w {
                    refs[*j] += 1;
                }
            }
        }
        for (_, w) in &self.outputs {
            if let Wire::Gate(j) = w {
                refs[*j] += 1;
            }
        }
        refs
    }

    /// Evaluates one pattern; bit `i` of `data` / `sel` drives input `i`.
    /// Returns the output word (bit `j` is output `j`).
    pub fn simulate(&self, data: u64, sel: u64) -> u64 {
        let mut values = vec![false; self.gates.len()];
        let read = |w: Wire, values: &[bool]| match w {
            Wire::Data(i) => (data >> i) & 1 == 1,
            Wire::Select(i) => (sel >> i) & 1 == 1,
            Wire::Gate(i) => values[i],
        };
        let mut ins = Vec::with_capacity(4);
        for (i, g) in self.gates.iter().enumerate() {
            ins.clear();
            ins.extend(g.fanins.iter().map(|&w| read(w, &values)));
            values[i] = g.kind.eval(&ins);
        }
        self.outputs
            .iter()
            .enumerate()
            .fold(0, |acc, (j, (_, w))| acc | ((read(*w, &values) as u64) << j))
    }

    /// Bit-parallel simulation given one pattern per data input and per
    /// select. Returns one pattern per gate.
    pub fn simulate_bits(&self, data: &[Bits], sel: &[Bits]) -> Vec<Bits> {
        let len = data.first().or(sel.first()).map_or(1, Bits::len);
        let mut values: Vec<Bits> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let ins: Vec<&Bits> = g
                .fanins
                .iter()
                .map(|&w| match w {
                    Wire::Data(i) => &data[i],
                    Wire::Select(i) => &sel[i],
                    Wire::Gate(i) => &values[i],
                })
                .collect();
            let v = g.kind.eval_bits(&ins, len);
            values.push(v);
        }
        values
    }

    fn read_bits<'a>(&self, w: Wire, data: &'a [Bits], sel: &'a [Bits], gates: &'a [Bits]) -> &'a Bits {
        match w {
            Wire::Data(i) => &data[i],
            Wire::Select(i) => &sel[i],
            Wire::Gate(i) => &gates[i],
        }
    }

    /// Exhaustive table over all inputs; row = `data | sel << num_data`.
    pub fn truth_table(&self) -> TruthTable {
        let nd = self.num_data();
        let n = nd + self.num_selects();
        let data: Vec<Bits> = (0..nd).map(|i| Bits::var(n, i)).collect();
        let sel: Vec<Bits> = (nd..n).map(|i| Bits::var(n, i)).collect();
        let gates = self.simulate_bits(&data, &sel);
        let outs = self
            .outputs
            .iter()
            .map(|(_, w)| self.read_bits(*w, &data, &sel, &gates).clone())
            .collect();
        TruthTable::from_outputs(n, outs).expect("netlist has outputs")
    }

    /// Exhaustive table over the data inputs with the selects fixed to `code`.
    pub fn table_for_select(&self, code: u64) -> TruthTable {
        let nd = self.num_data();
        let rows = 1usize << nd;
        let data: Vec<Bits> = (0..nd).map(|i| Bits::var(nd, i)).collect();
        let sel: Vec<Bits> = (0..self.num_selects())
            .map(|i| {
                if (code >> i) & 1 == 1 {
                    Bits::ones(rows)
                } else {
                    Bits::zeros(rows)
                }
            })
            .collect();
        let gates = self.simulate_bits(&data, &sel);
        let outs = self
            .outputs
            .iter()
            .map(|(_, w)| self.read_bits(*w, &data, &sel, &gates).clone())
            .collect();
        TruthTable::from_outputs(nd, outs).expect("netlist has outputs")
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Writes the `.cnl` form.
    pub fn emit(&self) -> String {
        let mut names = WireNames::new(self.data_inputs.iter().chain(&self.select_inputs));
        let mut gate_names = vec![String::new(); self.gates.len()];
        let mut aliases = Vec::new();
        let mut named_by_output = vec![false; self.gates.len()];
        for (name, w) in &self.outputs {
            match *w {
                Wire::Gate(i) if !named_by_output[i] => {
                    named_by_output[i] = true;
                    gate_names[i] = name.clone();
                    names.reserve(name);
                }
                Wire::Data(i) if &self.data_inputs[i] == name => {}
                _ => aliases.push((name.clone(), *w)),
            }
        }
        for (name, _) in &aliases {
            names.reserve(name);
        }
        for (i, gn) in gate_names.iter_mut().enumerate() {
            if gn.is_empty() {
                *gn = names.fresh(&format!("n{i}"));
            }
        }
        let wire_name = |w: Wire| -> &str {
            match w {
                Wire::Data(i) => &self.data_inputs[i],
                Wire::Select(i) => &self.select_inputs[i],
                Wire::Gate(i) => &gate_names[i],
            }
        };
        let mut out = String::new();
        write_list(&mut out, ".inputs", &self.data_inputs);
        if !self.select_inputs.is_empty() {
            write_list(&mut out, ".selects", &self.select_inputs);
        }
        let onames: Vec<String> = self.outputs.iter().map(|(n, _)| n.clone()).collect();
        write_list(&mut out, ".outputs", &onames);
        for (i, g) in self.gates.iter().enumerate() {
            let ins: Vec<&str> = g.fanins.iter().map(|&w| wire_name(w)).collect();
            let _ = writeln!(
                out,
                ".gate {} {} ={}{}",
                g.kind.cell_name(g.fanins.len()),
                gate_names[i],
                if ins.is_empty() { "" } else { " " },
                ins.join(" ")
            );
        }
        for (name, w) in &aliases {
            let _ = writeln!(out, ".alias {} = {}", name, wire_name(*w));
        }
        out.push_str(".end\n");
        out
    }

    /// Parses the `.cnl` form.
    pub fn parse(text: &str) -> Result<Netlist, NetlistError> {
        let raw = RawCnl::parse(text)?;
        let mut n = Netlist::new(raw.inputs.clone(), raw.selects.clone())?;
        for g in &raw.gates {
            let (kind, arity) = GateKind::parse(&g.kind).ok_or_else(|| NetlistError::Syntax {
                line: g.line,
                msg: format!("unknown gate kind {:?}", g.kind),
            })?;
            if arity.is_some_and(|a| a != g.fanins.len()) || !kind.arity_ok(g.fanins.len()) {
                return Err(NetlistError::Syntax {
                    line: g.line,
                    msg: format!("{} has {} fanins", g.kind, g.fanins.len()),
                });
            }
            n.add_gate(kind, g.fanins.clone())?;
        }
        for (name, w) in &raw.outputs {
            n.add_output(name, *w)?;
        }
        Ok(n)
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

fn write_list(out: &mut String, directive: &str, names: &[String]) {
    out.push_str(directive);
    for n in names {
        out.push(' ');
        out.push_str(n);
    }
    out.push('\n');
}

/// Allocates internal wire names that never collide with interface names.
pub(crate) struct WireNames {
    used: HashSet<String>,
}

impl WireNames {
    pub(crate) fn new<'a>(reserved: impl IntoIterator<Item = &'a String>) -> Self {
        WireNames {
            used: reserved.into_iter().cloned().collect(),
        }
    }

    pub(crate) fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub(crate) fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        while self.used.contains(&name) {
            name.insert(0, '_');
        }
        self.used.insert(name.clone());
        name
    }
}

/// A `.cnl` gate line with fanins resolved to wires.
#[derive(Clone, Debug)]
pub(crate) struct RawGate {
    pub kind: String,
    pub name: String,
    pub fanins: Vec<Wire>,
    pub line: usize,
}

/// Syntax-level parse of a `.cnl` file: wires resolved, gates sorted
/// topologically, kinds left as strings.
#[derive(Clone, Debug)]
pub(crate) struct RawCnl {
    pub inputs: Vec<String>,
    pub selects: Vec<String>,
    pub gates: Vec<RawGate>,
    pub outputs: Vec<(String, Wire)>,
}

impl RawCnl {
    pub(crate) fn parse(text: &str) -> Result<RawCnl, NetlistError> {
        struct Line<'a> {
            kind: &'a str,
            out: &'a str,
            ins: Vec<&'a str>,
            line: usize,
        }
        let mut inputs: Vec<String> = Vec::new();
        let mut selects: Vec<String> = Vec::new();
        let mut outputs: Vec<String> = Vec::new();
        let mut gate_lines: Vec<Line> = Vec::new();
        let mut alias_lines: Vec<(&str, &str, usize)> = Vec::new();
        let mut ended = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let syntax = |msg: String| NetlistError::Syntax { line, msg };
            if ended {
                return Err(syntax("content after .end".into()));
            }
            let mut toks = body.split_whitespace();
            let directive = toks.next().unwrap();
            let rest: Vec<&str> = toks.collect();
            match directive {
                ".inputs" => inputs.extend(rest.iter().map(|s| s.to_string())),
                ".selects" => selects.extend(rest.iter().map(|s| s.to_string())),
                ".outputs" => outputs.extend(rest.iter().map(|s| s.to_string())),
                ".gate" => {
                    if rest.len() < 3 || rest[2] != "=" {
                        return Err(syntax("expected .gate KIND OUT = IN...".into()));
                    }
                    gate_lines.push(Line {
                        kind: rest[0],
                        out: rest[1],
                        ins: rest[3..].to_vec(),
                        line,
                    });
                }
                ".alias" => {
                    if rest.len() != 3 || rest[1] != "=" {
                        return Err(syntax("expected .alias OUT = WIRE".into()));
                    }
                    alias_lines.push((rest[0], rest[2], line));
                }
                ".end" => ended = true,
                other => return Err(syntax(format!("unknown directive {other:?}"))),
            }
        }
        for s in &selects {
            if inputs.contains(s) {
                return Err(NetlistError::SelectIsData(s.clone()));
            }
        }
        // name -> driver
        #[derive(Clone, Copy)]
        enum Driver {
            Data(usize),
            Select(usize),
            Line(usize),
        }
        let mut drivers: HashMap<&str, Driver> = HashMap::new();
        for (i, n) in inputs.iter().enumerate() {
            if drivers.insert(n, Driver::Data(i)).is_some() {
                return Err(NetlistError::DuplicateDriver(n.clone()));
            }
        }
        for (i, n) in selects.iter().enumerate() {
            if drivers.insert(n, Driver::Select(i)).is_some() {
                return Err(NetlistError::DuplicateDriver(n.clone()));
            }
        }
        for (i, g) in gate_lines.iter().enumerate() {
            if drivers.insert(g.out, Driver::Line(i)).is_some() {
                return Err(NetlistError::DuplicateDriver(g.out.to_string()));
            }
        }
        for &(name, _, _) in &alias_lines {
            if drivers.contains_key(name) || alias_lines.iter().filter(|a| a.0 == name).count() > 1 {
                return Err(NetlistError::DuplicateDriver(name.to_string()));
            }
        }
        for g in &gate_lines {
            for &i in &g.ins {
                if !drivers.contains_key(i) {
                    return Err(NetlistError::UndefinedWire(i.to_string()));
                }
            }
        }
        // Stable topological order: depth-first in file order.
        let mut state = vec![0u8; gate_lines.len()]; // 0 new, 1 on stack, 2 done
        let mut order_of = vec![usize::MAX; gate_lines.len()];
        let mut order: Vec<usize> = Vec::new();
        for start in 0..gate_lines.len() {
            if state[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            state[start] = 1;
            while let Some(&mut (g, ref mut next)) = stack.last_mut() {
                if *next < gate_lines[g].ins.len() {
                    let name = gate_lines[g].ins[*next];
                    *next += 1;
                    if let Driver::Line(d) = drivers[name] {
                        match state[d] {
                            0 => {
                                state[d] = 1;
                                stack.push((d, 0));
                            }
                            1 => return Err(NetlistError::Cycle(name.to_string())),
                            _ => {}
                        }
                    }
                } else {
                    state[g] = 2;
                    order_of[g] = order.len();
                    order.push(g);
                    stack.pop();
                }
            }
        }
        let resolve = |name: &str| match drivers[name] {
            Driver::Data(i) => Wire::Data(i),
            Driver::Select(i) => Wire::Select(i),
            Driver::Line(l) => Wire::Gate(order_of[l]),
        };
        let gates = order
            .iter()
            .map(|&l| RawGate {
                kind: gate_lines[l].kind.to_string(),
                name: gate_lines[l].out.to_string(),
                fanins: gate_lines[l].ins.iter().map(|n| resolve(n)).collect(),
                line: gate_lines[l].line,
            })
            .collect();
        let mut bound: Vec<(String, Wire)> = Vec::new();
        for name in &outputs {
            let wire = if let Some(&(_, target, _)) = alias_lines.iter().find(|a| a.0 == name) {
                if !drivers.contains_key(target) {
                    return Err(NetlistError::UndefinedWire(target.to_string()));
                }
                resolve(target)
            } else {
                match drivers.get(name.as_str()) {
                    Some(Driver::Select(_)) | None => {
                        return Err(NetlistError::UnboundOutput(name.clone()))
                    }
                    Some(_) => resolve(name),
                }
            };
            bound.push((name.clone(), wire));
        }
        for &(name, _, line) in &alias_lines {
            if !outputs.iter().any(|o| o == name) {
                return Err(NetlistError::Syntax {
                    line,
                    msg: format!("alias {name:?} is not an output"),
                });
            }
        }
        Ok(RawCnl {
            inputs,
            selects,
            gates,
            outputs: bound,
        })
    }
}
