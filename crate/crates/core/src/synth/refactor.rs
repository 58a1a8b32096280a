use rustc_hash::FxHashMap;

use super::aig::{Aig, Lit};
use super::replace::{Cand, Context, DryRun, Plan};
use crate::sop::{self, Factored};

pub const MAX_CUT: usize = 10;

/// Reconvergence-driven cut: grow from the fanins, always expanding the
/// leaf that adds the fewest new leaves.
pub(crate) fn reconvergent_cut(aig: &Aig, root: usize, limit: usize) -> Vec<usize> {
    let mut visited: Vec<usize> = vec![root];
    let mut leaves: Vec<usize> = Vec::new();
    for l in aig.fanins(root) {
        if !visited.contains(&l.var()) {
            visited.push(l.var());
            leaves.push(l.var());
        }
    }
    loop {
        let mut best: Option<(usize, usize)> = None;
        for (i, &l) in leaves.iter().enumerate() {
            if !aig.is_and(l) {
                continue;
            }
            let fresh = aig
                .fanins(l)
                .iter()
                .map(|f| f.var())
                .filter(|f| !visited.contains(f))
                .fold(Vec::<usize>::new(), |mut acc, f| {
                    if !acc.contains(&f) {
                        acc.push(f);
                    }
                    acc
                })
                .len();
            let better = match best {
                None => true,
                Some((bi, bf)) => fresh < bf || (fresh == bf && l > leaves[bi]),
            };
            if better {
                best = Some((i, fresh));
            }
        }
        let Some((i, fresh)) = best else { break };
        if leaves.len() - 1 + fresh > limit {
            break;
        }
        let l = leaves.swap_remove(i);
        for f in aig.fanins(l) {
            if !visited.contains(&f.var()) {
                visited.push(f.var());
                leaves.push(f.var());
            }
        }
    }
    leaves.sort_unstable();
    leaves
}

/// Function of `root` over `leaves` as a word-packed table.
pub(crate) fn cone_table(aig: &Aig, root: usize, leaves: &[usize]) -> Vec<u64> {
    let nv = leaves.len();
    let mut tables: FxHashMap<usize, Vec<u64>> = FxHashMap::default();
    for (i, &l) in leaves.iter().enumerate() {
        tables.insert(l, sop::var(nv, i));
    }
    let mut cone = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if tables.contains_key(&v) || cone.contains(&v) {
            continue;
        }
        cone.push(v);
        for f in aig.fanins(v) {
            stack.push(f.var());
        }
    }
    cone.sort_unstable();
    for &v in &cone {
        let [a, b] = aig.fanins(v);
        let get = |l: Lit| {
            let t = &tables[&l.var()];
            if l.is_negated() {
                sop::not(t, nv)
            } else {
                t.clone()
            }
        };
        let t = sop::and(&get(a), &get(b));
        tables.insert(v, t);
    }
    tables.remove(&root).unwrap()
}

pub(crate) fn instantiate(dry: &mut DryRun<'_, '_>, f: &Factored, leaves: &[Cand]) -> Cand {
    match f {
        Factored::Const(v) => {
            if *v {
                Cand::TRUE
            } else {
                Cand::FALSE
            }
        }
        Factored::Lit { var, positive } => leaves[*var].negate_if(!positive),
        Factored::And(xs) => {
            let mut acc = Cand::TRUE;
            for x in xs {
                let c = instantiate(dry, x, leaves);
                acc = dry.and(acc, c);
            }
            acc
        }
        Factored::Or(xs) => {
            let mut acc = Cand::FALSE;
            for x in xs {
                let c = instantiate(dry, x, leaves);
                acc = dry.or(acc, c);
            }
            acc
        }
    }
}

/// Primary-input support of every node, or `None` once it exceeds `limit`.
fn supports(aig: &Aig, limit: usize) -> Vec<Option<Vec<usize>>> {
    let mut sup: Vec<Option<Vec<usize>>> = vec![None; aig.num_vars()];
    for i in 0..aig.num_inputs() {
        sup[i + 1] = Some(vec![i + 1]);
    }
    for v in aig.and_vars() {
        let [a, b] = aig.fanins(v);
        sup[v] = match (&sup[a.var()], &sup[b.var()]) {
            (Some(x), Some(y)) => {
                let mut u: Vec<usize> = x.iter().chain(y).copied().collect();
                u.sort_unstable();
                u.dedup();
                (u.len() <= limit).then_some(u)
            }
            (Some(x), None) | (None, Some(x)) if a.var() == 0 || b.var() == 0 => Some(x.clone()),
            _ => None,
        };
    }
    sup
}

/// Collapses cones of up to ten leaves into SOP form and re-factors them.
/// Two cuts are tried per node: a reconvergence-driven one and, when it is
/// small enough, the node's whole primary-input support.
pub fn refactor(aig: &Aig) -> Aig {
    let mut ctx = Context::new(aig);
    let sup = supports(aig, MAX_CUT);
    for v in aig.and_vars().rev() {
        if !ctx.is_live(v) {
            continue;
        }
        let mut cuts = vec![reconvergent_cut(aig, v, MAX_CUT)];
        if let Some(s) = &sup[v] {
            if *s != cuts[0] {
                cuts.push(s.clone());
            }
        }
        let mut best: Option<(usize, usize, Plan)> = None;
        for (ci, leaves) in cuts.iter().enumerate() {
            let mffc = ctx.mffc(v, leaves);
            if mffc < 2 {
                continue;
            }
            let nv = leaves.len();
            let on = cone_table(aig, v, leaves);
            let leaf_cands: Vec<Cand> = leaves.iter().map(|&l| Cand::Old(Lit::new(l, false))).collect();
            for negate in [false, true] {
                let target = if negate { sop::not(&on, nv) } else { on.clone() };
                let form = sop::factor(&sop::isop(&target, nv));
                let mut dry = ctx.dry_run(mffc - 1);
                let root = instantiate(&mut dry, &form, &leaf_cands).negate_if(negate);
                if dry.over_budget() {
                    continue;
                }
                let gain = mffc - dry.new_nodes();
                if best.as_ref().is_none_or(|b| gain > b.0) {
                    best = Some((gain, ci, dry.finish(root)));
                }
            }
        }
        if let Some((_, ci, plan)) = best {
            ctx.mffc(v, &cuts[ci]);
            ctx.accept(v, &cuts[ci], plan);
        }
    }
    ctx.rebuild()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_respects_limit_and_covers_cone() {
        let mut aig = Aig::new((0..12).map(|i| format!("x{i}")).collect(), vec![]);
        let mut acc = aig.input(0);
        for i in 1..12 {
            let x = aig.input(i);
            acc = aig.and(acc, x);
        }
        aig.add_output("y", acc);
        let root = acc.var();
        let leaves = reconvergent_cut(&aig, root, 4);
        assert!(leaves.len() <= 4);
        let t = cone_table(&aig, root, &leaves);
        // an AND chain is the AND of its cut leaves
        assert_eq!(sop::isop(&t, leaves.len()).len(), 1);
    }

    #[test]
    fn distributes_common_factor() {
        // ab + ac + ad as an SOP: 5 nodes of the 3-cube OR plus 3 ANDs
        let mut aig = Aig::new((0..4).map(|i| format!("x{i}")).collect(), vec![]);
        let x: Vec<Lit> = (0..4).map(|i| aig.input(i)).collect();
        let p = aig.and(x[0], x[1]);
        let q = aig.and(x[0], x[2]);
        let r = aig.and(x[0], x[3]);
        let pq = aig.or(p, q);
        let y = aig.or(pq, r);
        aig.add_output("y", y);
        let out = refactor(&aig);
        assert_eq!(out.truth_table(), aig.truth_table());
        assert!(out.num_ands() < aig.num_ands(), "{} vs {}", out.num_ands(), aig.num_ands());
        assert_eq!(out.num_ands(), 3);
    }
}
