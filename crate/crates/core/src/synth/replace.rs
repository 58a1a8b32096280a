//! Shared machinery for the local-replacement passes.
//!
//! A pass walks the AND nodes from the outputs down. At each live node it
//! prices candidate structures against the node's maximum fanout-free cone
//! (MFFC): nodes that disappear when the node is re-expressed over a cut.
//! Accepted replacements are recorded as [`Plan`]s and the reference counts
//! are updated so later decisions see the new graph. The result is then
//! rebuilt bottom-up from the outputs.

use super::aig::{Aig, Lit};

/// Literal inside a plan: index 0 is constant false, `1..=inputs.len()` are
/// the plan inputs, then the plan's own nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct PLit(u32);

impl PLit {
    fn new(index: usize, neg: bool) -> PLit {
        PLit((index as u32) << 1 | neg as u32)
    }

    fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn not(self) -> PLit {
        PLit(self.0 ^ 1)
    }
}

/// A replacement structure over existing variables of the old graph.
#[derive(Clone, Debug)]
pub(crate) struct Plan {
    inputs: Vec<usize>,
    nodes: Vec<[PLit; 2]>,
    root: PLit,
}

/// A value during pricing: either an existing literal of the old graph or
/// a node the replacement would add.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Cand {
    Old(Lit),
    New(PLit),
}

impl Cand {
    pub fn not(self) -> Cand {
        match self {
            Cand::Old(l) => Cand::Old(!l),
            Cand::New(p) => Cand::New(p.not()),
        }
    }

    pub fn negate_if(self, c: bool) -> Cand {
        if c {
            self.not()
        } else {
            self
        }
    }

    pub const FALSE: Cand = Cand::Old(Lit::FALSE);
    pub const TRUE: Cand = Cand::Old(Lit::TRUE);
}

/// Reference counts plus MFFC bookkeeping over an immutable graph.
pub(crate) struct Context<'a> {
    pub aig: &'a Aig,
    pub refs: Vec<u32>,
    mark: Vec<u32>,
    leaf_mark: Vec<u32>,
    stamp: u32,
    root: usize,
    pub plans: Vec<Option<Plan>>,
}

impl<'a> Context<'a> {
    pub fn new(aig: &'a Aig) -> Context<'a> {
        Context {
            aig,
            refs: aig.refs(),
            mark: vec![0; aig.num_vars()],
            leaf_mark: vec![0; aig.num_vars()],
            stamp: 0,
            root: 0,
            plans: vec![None; aig.num_vars()],
        }
    }

    pub fn is_live(&self, v: usize) -> bool {
        self.refs[v] > 0
    }

    fn deref(&mut self, v: usize, stamp: u32, out: &mut Vec<usize>) {
        out.push(v);
        self.mark[v] = stamp;
        for l in self.aig.fanins(v) {
            let f = l.var();
            self.refs[f] -= 1;
            if self.refs[f] == 0 && self.aig.is_and(f) && self.leaf_mark[f] != stamp {
                self.deref(f, stamp, out);
            }
        }
    }

    fn reref(&mut self, v: usize, stamp: u32) {
        for l in self.aig.fanins(v) {
            let f = l.var();
            if self.refs[f] == 0 && self.aig.is_and(f) && self.leaf_mark[f] != stamp {
                self.reref(f, stamp);
            }
            self.refs[f] += 1;
        }
    }

    /// Marks the MFFC of `root` bounded by `leaves` and returns its size.
    /// The marking stays valid until the next call.
    pub fn mffc(&mut self, root: usize, leaves: &[usize]) -> usize {
        self.stamp += 1;
        self.root = root;
        let s = self.stamp;
        for &l in leaves {
            self.leaf_mark[l] = s;
        }
        let mut nodes = Vec::new();
        self.deref(root, s, &mut nodes);
        self.reref(root, s);
        nodes.len()
    }

    /// Nodes above the root may already carry plans that read the root;
    /// reusing them could close a cycle, so only lower nodes qualify.
    fn usable(&self, l: Lit) -> bool {
        let v = l.var();
        if v >= self.root {
            return false;
        }
        !self.aig.is_and(v)
            || self.leaf_mark[v] == self.stamp
            || (self.refs[v] > 0 && self.mark[v] != self.stamp)
    }

    pub fn dry_run(&self, budget: usize) -> DryRun<'_, 'a> {
        DryRun {
            ctx: self,
            nodes: Vec::new(),
            budget,
            over: false,
        }
    }

    /// Commits `plan` at `root` (whose MFFC must be the current marking).
    pub fn accept(&mut self, root: usize, leaves: &[usize], plan: Plan) {
        let s = self.stamp;
        debug_assert!(leaves.iter().all(|&l| self.leaf_mark[l] == s));
        let mut dead = Vec::new();
        self.deref(root, s, &mut dead);
        for &v in &plan.inputs {
            self.refs[v] += 1;
        }
        self.plans[root] = Some(plan);
    }

    /// Rebuilds the graph from the outputs, instantiating accepted plans.
    pub fn rebuild(&self) -> Aig {
        let a = self.aig;
        let mut out = Aig::with_interface_of(a);
        let mut memo: Vec<Option<Lit>> = vec![None; a.num_vars()];
        memo[0] = Some(Lit::FALSE);
        for i in 0..a.num_inputs() {
            memo[i + 1] = Some(out.input(i));
        }
        for (name, l) in a.outputs() {
            let m = self.build(l.var(), &mut out, &mut memo);
            out.add_output(name, m.negate_if(l.is_negated()));
        }
        out
    }

    fn build(&self, v: usize, out: &mut Aig, memo: &mut [Option<Lit>]) -> Lit {
        if let Some(l) = memo[v] {
            return l;
        }
        let lit = match &self.plans[v] {
            Some(plan) => {
                let ins: Vec<Lit> = plan.inputs.iter().map(|&i| self.build(i, out, memo)).collect();
                let mut vals: Vec<Lit> = Vec::with_capacity(1 + ins.len() + plan.nodes.len());
                vals.push(Lit::FALSE);
                vals.extend(ins);
                for [p, q] in &plan.nodes {
                    let x = vals[p.index()].negate_if(p.neg());
                    let y = vals[q.index()].negate_if(q.neg());
                    let z = out.and(x, y);
                    vals.push(z);
                }
                vals[plan.root.index()].negate_if(plan.root.neg())
            }
            None => {
                let [x, y] = self.aig.fanins(v);
                let bx = self.build(x.var(), out, memo).negate_if(x.is_negated());
                let by = self.build(y.var(), out, memo).negate_if(y.is_negated());
                out.and(bx, by)
            }
        };
        memo[v] = Some(lit);
        lit
    }
}

/// Prices a candidate structure without touching the graph.
pub(crate) struct DryRun<'c, 'a> {
    ctx: &'c Context<'a>,
    nodes: Vec<[Cand; 2]>,
    budget: usize,
    over: bool,
}

impl DryRun<'_, '_> {
    pub fn new_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// True once more nodes than the budget were requested.
    pub fn over_budget(&self) -> bool {
        self.over
    }

    pub fn and(&mut self, a: Cand, b: Cand) -> Cand {
        if self.over {
            return Cand::FALSE;
        }
        if let (Cand::Old(x), Cand::Old(y)) = (a, b) {
            if let Some(l) = self.ctx.aig.lookup(x, y) {
                if self.ctx.usable(l) {
                    return Cand::Old(l);
                }
            }
        } else {
            if a == b {
                return a;
            }
            if a == b.not() || a == Cand::FALSE || b == Cand::FALSE {
                return Cand::FALSE;
            }
            if a == Cand::TRUE {
                return b;
            }
            if b == Cand::TRUE {
                return a;
            }
        }
        let key = if a <= b { [a, b] } else { [b, a] };
        if let Some(i) = self.nodes.iter().position(|n| *n == key) {
            return Cand::New(PLit::new(i, false));
        }
        if self.nodes.len() >= self.budget {
            self.over = true;
            return Cand::FALSE;
        }
        self.nodes.push(key);
        Cand::New(PLit::new(self.nodes.len() - 1, false))
    }

    pub fn or(&mut self, a: Cand, b: Cand) -> Cand {
        self.and(a.not(), b.not()).not()
    }

    pub fn xor(&mut self, a: Cand, b: Cand) -> Cand {
        let p = self.and(a, b.not());
        let q = self.and(a.not(), b);
        self.or(p, q)
    }

    pub fn finish(self, root: Cand) -> Plan {
        let mut inputs: Vec<usize> = Vec::new();
        let mut note = |c: Cand| {
            if let Cand::Old(l) = c {
                if !l.is_const() && !inputs.contains(&l.var()) {
                    inputs.push(l.var());
                }
            }
        };
        for n in &self.nodes {
            note(n[0]);
            note(n[1]);
        }
        note(root);
        let base = 1 + inputs.len();
        let conv = |c: Cand| match c {
            Cand::Old(l) if l.is_const() => PLit::new(0, l.is_negated()),
            Cand::Old(l) => PLit::new(1 + inputs.iter().position(|&v| v == l.var()).unwrap(), l.is_negated()),
            Cand::New(p) => PLit::new(base + p.index(), p.neg()),
        };
        let nodes = self.nodes.iter().map(|n| [conv(n[0]), conv(n[1])]).collect();
        let root = conv(root);
        Plan {
            inputs,
            nodes,
            root,
        }
    }
}
