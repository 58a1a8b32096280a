use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::aig::{Aig, Lit};

struct Balancer<'a> {
    src: &'a Aig,
    refs: Vec<u32>,
    out: Aig,
    level: Vec<u32>,
    memo: Vec<Option<Lit>>,
}

impl Balancer<'_> {
    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let before = self.out.num_vars();
        let r = self.out.and(a, b);
        if self.out.num_vars() > before {
            self.level.push(1 + self.level[a.var()].max(self.level[b.var()]));
        }
        r
    }

    fn supergate(&self, v: usize) -> Vec<Lit> {
        let mut leaves = Vec::new();
        let mut stack: Vec<Lit> = self.src.fanins(v).to_vec();
        while let Some(l) = stack.pop() {
            let u = l.var();
            if !l.is_negated() && self.src.is_and(u) && self.refs[u] == 1 {
                stack.extend(self.src.fanins(u));
            } else {
                leaves.push(l);
            }
        }
        leaves
    }

    fn build(&mut self, v: usize) -> Lit {
        if let Some(l) = self.memo[v] {
            return l;
        }
        let mut ins: Vec<Lit> = Vec::new();
        for l in self.supergate(v) {
            let b = self.build(l.var()).negate_if(l.is_negated());
            ins.push(b);
        }
        ins.sort_unstable();
        ins.dedup();
        let lit = if ins.windows(2).any(|w| w[0] == !w[1]) || ins.contains(&Lit::FALSE) {
            Lit::FALSE
        } else {
            let mut heap: BinaryHeap<Reverse<(u32, Lit)>> =
                ins.iter().map(|&l| Reverse((self.level[l.var()], l))).collect();
            while heap.len() > 1 {
                let Reverse((_, a)) = heap.pop().unwrap();
                let Reverse((_, b)) = heap.pop().unwrap();
                let c = self.and(a, b);
                heap.push(Reverse((self.level[c.var()], c)));
            }
            heap.pop().map(|Reverse((_, l))| l).unwrap_or(Lit::TRUE)
        };
        self.memo[v] = Some(lit);
        lit
    }
}

/// Rebuilds every single-fanout AND tree with minimum depth.
pub fn balance(aig: &Aig) -> Aig {
    let mut b = Balancer {
        src: aig,
        refs: aig.refs(),
        out: Aig::with_interface_of(aig),
        level: vec![0; aig.num_inputs() + 1],
        memo: vec![None; aig.num_vars()],
    };
    b.memo[0] = Some(Lit::FALSE);
    for i in 0..aig.num_inputs() {
        b.memo[i + 1] = Some(aig.input(i));
    }
    for (name, l) in aig.outputs() {
        let m = b.build(l.var()).negate_if(l.is_negated());
        b.out.add_output(name, m);
    }
    let out = b.out.cleanup();
    if out.num_ands() > aig.num_ands() || out.depth() > aig.depth() {
        return aig.cleanup();
    }
    out
}
