//! Enumeration of 4-feasible cuts with their local truth tables.

use super::aig::Aig;

pub const CUT_SIZE: usize = 4;
pub const CUTS_PER_NODE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cut {
    leaves: [u32; CUT_SIZE],
    len: u8,
    /// Function of the node over the leaves (leaf `i` is variable `i`).
    pub tt: u16,
}

impl Cut {
    fn unit(v: usize) -> Cut {
        Cut {
            leaves: [v as u32, 0, 0, 0],
            len: 1,
            tt: 0xAAAA,
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.leaves[..self.len as usize].iter().map(|&l| l as usize)
    }

    fn leaf_slice(&self) -> &[u32] {
        &self.leaves[..self.len as usize]
    }

    fn dominates(&self, other: &Cut) -> bool {
        self.len <= other.len && self.leaf_slice().iter().all(|l| other.leaf_slice().contains(l))
    }
}

fn merge_leaves(a: &[u32], b: &[u32]) -> Option<([u32; CUT_SIZE], u8)> {
    let mut out = [0u32; CUT_SIZE];
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            i += 1;
            a[i - 1]
        } else if i >= a.len() || b[j] < a[i] {
            j += 1;
            b[j - 1]
        } else {
            i += 1;
            j += 1;
            a[i - 1]
        };
        if n == CUT_SIZE {
            return None;
        }
        out[n] = next;
        n += 1;
    }
    Some((out, n as u8))
}

/// Re-expresses `tt` over `from` leaves as a table over the superset `to`.
fn stretch(tt: u16, from: &[u32], to: &[u32]) -> u16 {
    let pos: Vec<usize> = from.iter().map(|l| to.iter().position(|x| x == l).unwrap()).collect();
    let mut out = 0u16;
    for r in 0..16usize {
        let mut src = 0usize;
        for (i, &p) in pos.iter().enumerate() {
            src |= ((r >> p) & 1) << i;
        }
        if (tt >> src) & 1 == 1 {
            out |= 1 << r;
        }
    }
    out
}

/// Cuts of every variable; the unit cut comes last for AND nodes.
pub fn enumerate(aig: &Aig) -> Vec<Vec<Cut>> {
    let mut cuts: Vec<Vec<Cut>> = vec![Vec::new(); aig.num_vars()];
    for v in 1..=aig.num_inputs() {
        cuts[v].push(Cut::unit(v));
    }
    for v in aig.and_vars() {
        let [a, b] = aig.fanins(v);
        let mut set: Vec<Cut> = Vec::new();
        for ca in &cuts[a.var()] {
            for cb in &cuts[b.var()] {
                let Some((leaves, len)) = merge_leaves(ca.leaf_slice(), cb.leaf_slice()) else {
                    continue;
                };
                let to = &leaves[..len as usize];
                let mut ta = stretch(ca.tt, ca.leaf_slice(), to);
                let mut tb = stretch(cb.tt, cb.leaf_slice(), to);
                if a.is_negated() {
                    ta = !ta;
                }
                if b.is_negated() {
                    tb = !tb;
                }
                let cut = Cut {
                    leaves,
                    len,
                    tt: ta & tb,
                };
                if set.iter().any(|c| c.dominates(&cut)) {
                    continue;
                }
                set.retain(|c| !cut.dominates(c));
                set.push(cut);
            }
        }
        set.sort_by_key(|c| (c.len, c.leaves));
        set.truncate(CUTS_PER_NODE);
        set.push(Cut::unit(v));
        cuts[v] = set;
    }
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::aig::Lit;

    #[test]
    fn cut_tables_match_simulation() {
        let mut aig = Aig::new((0..5).map(|i| format!("x{i}")).collect(), vec![]);
        let x: Vec<Lit> = (0..5).map(|i| aig.input(i)).collect();
        let a = aig.and(x[0], !x[1]);
        let b = aig.or(a, x[2]);
        let c = aig.xor(b, x[3]);
        let d = aig.and(c, x[4]);
        aig.add_output("y", d);
        let sims = aig.simulate();
        let cuts = enumerate(&aig);
        for v in aig.and_vars() {
            assert!(cuts[v].len() >= 2);
            for cut in &cuts[v] {
                let leaves: Vec<usize> = cut.leaves().collect();
                for row in 0..32 {
                    let mut idx = 0;
                    for (i, &l) in leaves.iter().enumerate() {
                        idx |= (sims[l].get(row) as usize) << i;
                    }
                    assert_eq!((cut.tt >> idx) & 1 == 1, sims[v].get(row), "var {v} cut {leaves:?}");
                }
            }
        }
    }

    #[test]
    fn merge_limits_size() {
        assert_eq!(merge_leaves(&[1, 3], &[2, 3]).unwrap(), ([1, 2, 3, 0], 3));
        assert!(merge_leaves(&[1, 2, 3], &[4, 5]).is_none());
    }
}
