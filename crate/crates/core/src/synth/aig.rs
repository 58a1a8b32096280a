use std::fmt;

use rustc_hash::FxHashMap;

use crate::boolfunc::{Bits, TruthTable};
use crate::netlist::{GateKind, Netlist, Wire};

/// An edge: variable index shifted left once, low bit = complement.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn new(var: usize, negated: bool) -> Lit {
        Lit((var as u32) << 1 | negated as u32)
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.0 < 2
    }

    pub fn regular(self) -> Lit {
        Lit(self.0 & !1)
    }

    pub fn negate_if(self, c: bool) -> Lit {
        Lit(self.0 ^ c as u32)
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.is_negated() { "!" } else { "" }, self.var())
    }
}

/// And-inverter graph. Variable 0 is constant false, variables
/// `1..=num_inputs` are the data inputs followed by the selects, the rest
/// are two-input ANDs in topological order.
#[derive(Clone)]
pub struct Aig {
    data_names: Vec<String>,
    select_names: Vec<String>,
    fanins: Vec<[Lit; 2]>,
    outputs: Vec<(String, Lit)>,
    strash: FxHashMap<[Lit; 2], u32>,
}

/// Folds the trivial cases of `a & b`; `Err` holds the ordered key when a
/// real node is needed.
fn simplify(a: Lit, b: Lit) -> Result<Lit, [Lit; 2]> {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a == Lit::FALSE || a == !b {
        Ok(Lit::FALSE)
    } else if a == Lit::TRUE || a == b {
        Ok(b)
    } else {
        Err([a, b])
    }
}

impl Aig {
    pub fn new(data_names: Vec<String>, select_names: Vec<String>) -> Aig {
        let ni = data_names.len() + select_names.len();
        Aig {
            data_names,
            select_names,
            fanins: vec![[Lit::FALSE; 2]; ni + 1],
            outputs: Vec::new(),
            strash: FxHashMap::default(),
        }
    }

    /// Empty graph with the same interface.
    pub fn with_interface_of(other: &Aig) -> Aig {
        Aig::new(other.data_names.clone(), other.select_names.clone())
    }

    pub fn data_names(&self) -> &[String] {
        &self.data_names
    }

    pub fn select_names(&self) -> &[String] {
        &self.select_names
    }

    pub fn num_data(&self) -> usize {
        self.data_names.len()
    }

    pub fn num_selects(&self) -> usize {
        self.select_names.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.data_names.len() + self.select_names.len()
    }

    pub fn num_vars(&self) -> usize {
        self.fanins.len()
    }

    pub fn num_ands(&self) -> usize {
        self.fanins.len() - self.num_inputs() - 1
    }

    /// Literal of input `i` (data inputs first, then selects).
    pub fn input(&self, i: usize) -> Lit {
        assert!(i < self.num_inputs());
        Lit::new(i + 1, false)
    }

    pub fn is_input(&self, var: usize) -> bool {
        var >= 1 && var <= self.num_inputs()
    }

    pub fn is_and(&self, var: usize) -> bool {
        var > self.num_inputs()
    }

    pub fn fanins(&self, var: usize) -> [Lit; 2] {
        debug_assert!(self.is_and(var));
        self.fanins[var]
    }

    pub fn and_vars(&self) -> std::ops::Range<usize> {
        self.num_inputs() + 1..self.fanins.len()
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        match simplify(a, b) {
            Ok(l) => l,
            Err(key) => {
                if let Some(&v) = self.strash.get(&key) {
                    return Lit::new(v as usize, false);
                }
                let v = self.fanins.len();
                self.fanins.push(key);
                self.strash.insert(key, v as u32);
                Lit::new(v, false)
            }
        }
    }

    /// The existing literal for `a & b`, if no new node is needed.
    pub fn lookup(&self, a: Lit, b: Lit) -> Option<Lit> {
        match simplify(a, b) {
            Ok(l) => Some(l),
            Err(key) => self.strash.get(&key).map(|&v| Lit::new(v as usize, false)),
        }
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let p = self.and(a, !b);
        let q = self.and(!a, b);
        self.or(p, q)
    }

    /// `s ? d1 : d0`
    pub fn mux(&mut self, d0: Lit, d1: Lit, s: Lit) -> Lit {
        let p = self.and(s, d1);
        let q = self.and(!s, d0);
        self.or(p, q)
    }

    pub fn add_output(&mut self, name: &str, lit: Lit) {
        self.outputs.push((name.to_string(), lit));
    }

    pub fn outputs(&self) -> &[(String, Lit)] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// References to each variable from AND fanins and outputs.
    pub fn refs(&self) -> Vec<u32> {
        let mut r = vec![0u32; self.num_vars()];
        for v in self.and_vars() {
            for l in self.fanins[v] {
                r[l.var()] += 1;
            }
        }
        for (_, l) in &self.outputs {
            r[l.var()] += 1;
        }
        r
    }

    /// Logic level of each variable (inputs and constant at 0).
    pub fn levels(&self) -> Vec<u32> {
        let mut lv = vec![0u32; self.num_vars()];
        for v in self.and_vars() {
            let [a, b] = self.fanins[v];
            lv[v] = 1 + lv[a.var()].max(lv[b.var()]);
        }
        lv
    }

    pub fn depth(&self) -> u32 {
        let lv = self.levels();
        self.outputs.iter().map(|(_, l)| lv[l.var()]).max().unwrap_or(0)
    }

    /// Bit-parallel simulation over all input rows; row bit `i` drives
    /// input `i`. Returns one table per variable.
    pub fn simulate(&self) -> Vec<Bits> {
        let ni = self.num_inputs();
        let rows = 1usize << ni;
        let mut vals = Vec::with_capacity(self.num_vars());
        vals.push(Bits::zeros(rows));
        for i in 0..ni {
            vals.push(Bits::var(ni, i));
        }
        for v in self.and_vars() {
            let [a, b] = self.fanins[v];
            let x = lit_bits(&vals, a);
            let y = lit_bits(&vals, b);
            vals.push(x.and(&y));
        }
        vals
    }

    /// Exhaustive table; row = `data | sel << num_data`, like
    /// [`Netlist::truth_table`].
    pub fn truth_table(&self) -> TruthTable {
        let vals = self.simulate();
        let outs = self.outputs.iter().map(|(_, l)| lit_bits(&vals, *l)).collect();
        TruthTable::from_outputs(self.num_inputs(), outs).expect("aig has outputs")
    }

    /// Copy keeping only logic reachable from the outputs.
    pub fn cleanup(&self) -> Aig {
        let mut out = Aig::with_interface_of(self);
        let mut map: Vec<Option<Lit>> = vec![None; self.num_vars()];
        map[0] = Some(Lit::FALSE);
        for i in 0..self.num_inputs() {
            map[i + 1] = Some(out.input(i));
        }
        let mut live = vec![false; self.num_vars()];
        for (_, l) in &self.outputs {
            live[l.var()] = true;
        }
        for v in self.and_vars().rev() {
            if live[v] {
                for l in self.fanins[v] {
                    live[l.var()] = true;
                }
            }
        }
        for v in self.and_vars() {
            if live[v] {
                let [a, b] = self.fanins[v];
                let x = map[a.var()].unwrap().negate_if(a.is_negated());
                let y = map[b.var()].unwrap().negate_if(b.is_negated());
                map[v] = Some(out.and(x, y));
            }
        }
        for (name, l) in &self.outputs {
            let m = map[l.var()].unwrap().negate_if(l.is_negated());
            out.add_output(name, m);
        }
        out
    }

    pub fn from_netlist(net: &Netlist) -> Aig {
        let mut aig = Aig::new(net.data_inputs().to_vec(), net.select_inputs().to_vec());
        let nd = net.num_data();
        let read = |w: Wire, gates: &[Lit]| match w {
            Wire::Data(i) => Lit::new(i + 1, false),
            Wire::Select(i) => Lit::new(nd + i + 1, false),
            Wire::Gate(i) => gates[i],
        };
        let mut gates: Vec<Lit> = Vec::with_capacity(net.gates().len());
        for g in net.gates() {
            let ins: Vec<Lit> = g.fanins.iter().map(|&w| read(w, &gates)).collect();
            let fold = |aig: &mut Aig, ins: &[Lit], neg: bool| {
                let mut acc = Lit::TRUE;
                for &l in ins {
                    acc = aig.and(acc, l.negate_if(neg));
                }
                acc
            };
            let lit = match g.kind {
                GateKind::Inv => !ins[0],
                GateKind::Buf => ins[0],
                GateKind::And => fold(&mut aig, &ins, false),
                GateKind::Nand => !fold(&mut aig, &ins, false),
                GateKind::Or => !fold(&mut aig, &ins, true),
                GateKind::Nor => fold(&mut aig, &ins, true),
                GateKind::Mux2 => aig.mux(ins[0], ins[1], ins[2]),
                GateKind::Const0 => Lit::FALSE,
                GateKind::Const1 => Lit::TRUE,
            };
            gates.push(lit);
        }
        for (name, w) in net.outputs() {
            let l = read(*w, &gates);
            aig.add_output(name, l);
        }
        aig
    }
}

pub(crate) fn lit_bits(vals: &[Bits], l: Lit) -> Bits {
    let b = &vals[l.var()];
    if l.is_negated() {
        b.not()
    } else {
        b.clone()
    }
}

impl fmt::Debug for Aig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "aig: {} inputs, {} ands", self.num_inputs(), self.num_ands())?;
        for v in self.and_vars() {
            writeln!(f, "  {v} = {:?} & {:?}", self.fanins[v][0], self.fanins[v][1])?;
        }
        for (n, l) in &self.outputs {
            writeln!(f, "  {n} <- {l:?}")?;
        }
        Ok(())
    }
}
