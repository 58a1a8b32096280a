//! Minimum-size AND/XOR formulas for every 4-input function.
//!
//! Cost counts AIG nodes: an AND costs one, an XOR three. The table is
//! filled level by level (all functions of cost 0, then 1, ...), so each
//! entry holds a minimum-cost top-level decomposition.

use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Const(bool),
    Var { var: u8, neg: bool },
    And { a: u16, b: u16, neg: bool },
    Xor { a: u16, b: u16, neg: bool },
}

pub struct FormulaTable {
    /// Formula size per function; only the tests read it back.
    #[cfg_attr(not(test), allow(dead_code))]
    cost: Vec<u8>,
    step: Vec<Step>,
}

pub const VAR_TT: [u16; 4] = [0xAAAA, 0xCCCC, 0xF0F0, 0xFF00];

impl FormulaTable {
    fn build() -> FormulaTable {
        const UNSET: u8 = u8::MAX;
        let mut cost = vec![UNSET; 1 << 16];
        let mut step = vec![Step::Const(false); 1 << 16];
        let mut levels: Vec<Vec<u16>> = Vec::new();
        let mut l0 = Vec::new();
        for (f, v) in [(0u16, false), (0xFFFF, true)] {
            cost[f as usize] = 0;
            step[f as usize] = Step::Const(v);
            l0.push(f);
        }
        for (i, &t) in VAR_TT.iter().enumerate() {
            for neg in [false, true] {
                let f = if neg { !t } else { t };
                cost[f as usize] = 0;
                step[f as usize] = Step::Var { var: i as u8, neg };
                l0.push(f);
            }
        }
        levels.push(l0);
        let mut found = levels[0].len();
        let mut n = 1usize;
        while found < 1 << 16 {
            let mut new = Vec::new();
            let mut visit = |f: u16, s: Step, s_neg: Step, cost: &mut Vec<u8>, new: &mut Vec<u16>| {
                if cost[f as usize] == UNSET {
                    cost[f as usize] = n as u8;
                    cost[!f as usize] = n as u8;
                    step[f as usize] = s;
                    step[!f as usize] = s_neg;
                    new.push(f);
                    new.push(!f);
                }
            };
            for a in 0..=(n - 1) / 2 {
                let b = n - 1 - a;
                for (i, &g) in levels[a].iter().enumerate() {
                    let start = if a == b { i } else { 0 };
                    for &h in &levels[b][start..] {
                        visit(
                            g & h,
                            Step::And { a: g, b: h, neg: false },
                            Step::And { a: g, b: h, neg: true },
                            &mut cost,
                            &mut new,
                        );
                    }
                }
            }
            if n >= 3 {
                for a in 0..=(n - 3) / 2 {
                    let b = n - 3 - a;
                    for (i, &g) in levels[a].iter().enumerate() {
                        let start = if a == b { i } else { 0 };
                        for &h in &levels[b][start..] {
                            visit(
                                g ^ h,
                                Step::Xor { a: g, b: h, neg: false },
                                Step::Xor { a: g, b: h, neg: true },
                                &mut cost,
                                &mut new,
                            );
                        }
                    }
                }
            }
            found += new.len();
            levels.push(new);
            n += 1;
        }
        FormulaTable { cost, step }
    }

    pub fn get() -> &'static FormulaTable {
        static TABLE: OnceLock<FormulaTable> = OnceLock::new();
        TABLE.get_or_init(FormulaTable::build)
    }

    #[cfg(test)]
    pub fn cost(&self, f: u16) -> usize {
        self.cost[f as usize] as usize
    }

    pub fn step(&self, f: u16) -> Step {
        self.step[f as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(t: &FormulaTable, f: u16) -> u16 {
        match t.step(f) {
            Step::Const(v) => {
                if v {
                    0xFFFF
                } else {
                    0
                }
            }
            Step::Var { var, neg } => VAR_TT[var as usize] ^ if neg { 0xFFFF } else { 0 },
            Step::And { a, b, neg } => (eval(t, a) & eval(t, b)) ^ if neg { 0xFFFF } else { 0 },
            Step::Xor { a, b, neg } => (eval(t, a) ^ eval(t, b)) ^ if neg { 0xFFFF } else { 0 },
        }
    }

    fn size(t: &FormulaTable, f: u16) -> usize {
        match t.step(f) {
            Step::Const(_) | Step::Var { .. } => 0,
            Step::And { a, b, .. } => 1 + size(t, a) + size(t, b),
            Step::Xor { a, b, .. } => 3 + size(t, a) + size(t, b),
        }
    }

    #[test]
    fn every_entry_realizes_its_function_at_its_cost() {
        let t = FormulaTable::get();
        for f in 0..=u16::MAX {
            assert_eq!(eval(t, f), f);
            assert_eq!(size(t, f), t.cost(f));
        }
    }

    #[test]
    fn known_costs() {
        let t = FormulaTable::get();
        assert_eq!(t.cost(0xAAAA & 0xCCCC), 1);
        assert_eq!(t.cost(!(0xAAAA & 0xCCCC & 0xF0F0)), 2);
        assert_eq!(t.cost(0xAAAA ^ 0xCCCC), 3);
        assert_eq!(t.cost(0xAAAA ^ 0xCCCC ^ 0xF0F0 ^ 0xFF00), 9);
        // mux x2 ? x1 : x0
        assert_eq!(t.cost((0xF0F0 & 0xCCCC) | (!0xF0F0 & 0xAAAA)), 3);
    }
}
