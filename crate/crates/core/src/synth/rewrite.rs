use super::aig::{Aig, Lit};
use super::cuts;
use super::replace::{Cand, Context, DryRun, Plan};
use super::table::{FormulaTable, Step};

fn instantiate(dry: &mut DryRun<'_, '_>, t: &FormulaTable, f: u16, leaves: &[Cand; 4]) -> Cand {
    match t.step(f) {
        Step::Const(v) => {
            if v {
                Cand::TRUE
            } else {
                Cand::FALSE
            }
        }
        Step::Var { var, neg } => leaves[var as usize].negate_if(neg),
        Step::And { a, b, neg } => {
            let x = instantiate(dry, t, a, leaves);
            let y = instantiate(dry, t, b, leaves);
            dry.and(x, y).negate_if(neg)
        }
        Step::Xor { a, b, neg } => {
            let x = instantiate(dry, t, a, leaves);
            let y = instantiate(dry, t, b, leaves);
            dry.xor(x, y).negate_if(neg)
        }
    }
}

/// Replaces 4-input cuts by minimum-size formulas where that removes nodes.
pub fn rewrite(aig: &Aig) -> Aig {
    let table = FormulaTable::get();
    let all_cuts = cuts::enumerate(aig);
    let mut ctx = Context::new(aig);
    for v in aig.and_vars().rev() {
        if !ctx.is_live(v) {
            continue;
        }
        let mut best: Option<(usize, Vec<usize>, Plan)> = None;
        for cut in &all_cuts[v] {
            let leaves: Vec<usize> = cut.leaves().collect();
            if leaves == [v] {
                continue;
            }
            let mffc = ctx.mffc(v, &leaves);
            let mut leaf_cands = [Cand::FALSE; 4];
            for (i, &l) in leaves.iter().enumerate() {
                leaf_cands[i] = Cand::Old(Lit::new(l, false));
            }
            let mut dry = ctx.dry_run(mffc - 1);
            let root = instantiate(&mut dry, table, cut.tt, &leaf_cands);
            if dry.over_budget() {
                continue;
            }
            let gain = mffc - dry.new_nodes();
            if best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, leaves, dry.finish(root)));
            }
        }
        if let Some((_, leaves, plan)) = best {
            ctx.mffc(v, &leaves);
            ctx.accept(v, &leaves, plan);
        }
    }
    ctx.rebuild()
}
