use rand::Rng;

use super::PinAssignment;
use crate::boolfunc::Permutation;

/// Partially matched crossover on the cut `[a, b)`. The first child keeps
/// `p1`'s segment and takes the rest from `p2`; the second is symmetric.
pub fn pmx(p1: &Permutation, p2: &Permutation, a: usize, b: usize) -> (Permutation, Permutation) {
    assert!(p1.len() == p2.len() && a <= b && b <= p1.len(), "bad PMX cut");
    (pmx_child(p1.as_slice(), p2.as_slice(), a, b), pmx_child(p2.as_slice(), p1.as_slice(), a, b))
}

fn pmx_child(keep: &[usize], other: &[usize], a: usize, b: usize) -> Permutation {
    let n = keep.len();
    let mut pos_in_other = vec![0; n];
    for (i, &v) in other.iter().enumerate() {
        pos_in_other[v] = i;
    }
    let mut child: Vec<Option<usize>> = vec![None; n];
    let mut in_segment = vec![false; n];
    for i in a..b {
        child[i] = Some(keep[i]);
        in_segment[keep[i]] = true;
    }
    for i in a..b {
        let v = other[i];
        if in_segment[v] {
            continue;
        }
        let mut pos = i;
        while (a..b).contains(&pos) {
            pos = pos_in_other[keep[pos]];
        }
        child[pos] = Some(v);
    }
    let map = child
        .iter()
        .zip(other)
        .map(|(c, &o)| c.unwrap_or(o))
        .collect();
    Permutation::new(map).expect("PMX preserves bijectivity")
}

fn random_cut<R: Rng>(len: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.gen_range(0..=len);
    let b = rng.gen_range(0..=len);
    (a.min(b), a.max(b))
}

/// PMX applied independently to every permutation of the two parents.
pub fn crossover<R: Rng>(g1: &PinAssignment, g2: &PinAssignment, rng: &mut R) -> (PinAssignment, PinAssignment) {
    let (mut c1, mut c2) = (g1.clone(), g2.clone());
    for f in 1..g1.num_functions() {
        let (a, b) = random_cut(g1.num_inputs(), rng);
        let (p, q) = pmx(g1.in_perm(f), g2.in_perm(f), a, b);
        *c1.entry_mut(f).0 = p;
        *c2.entry_mut(f).0 = q;
        let (a, b) = random_cut(g1.num_outputs(), rng);
        let (p, q) = pmx(g1.out_perm(f), g2.out_perm(f), a, b);
        *c1.entry_mut(f).1 = p;
        *c2.entry_mut(f).1 = q;
    }
    (c1, c2)
}

/// Swaps two positions of one randomly chosen permutation. Permutations of
/// length one are never chosen; with nothing to swap this is a no-op.
///
/// The reference function's permutations take part too. Since an
/// assignment is only defined up to a common relabelling of the shared
/// pins, a swap there is carried out by relabelling the two pins in every
/// other function instead, which keeps the reference at identity.
pub fn mutate<R: Rng>(g: &mut PinAssignment, rng: &mut R) {
    let mut slots = Vec::new();
    for f in 0..g.num_functions() {
        if g.num_inputs() >= 2 {
            slots.push((f, false));
        }
        if g.num_outputs() >= 2 {
            slots.push((f, true));
        }
    }
    if slots.is_empty() || g.num_functions() < 2 {
        return;
    }
    let (f, output) = slots[rng.gen_range(0..slots.len())];
    let len = if output { g.num_outputs() } else { g.num_inputs() };
    let i = rng.gen_range(0..len);
    let mut j = rng.gen_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    if f == 0 {
        let mut t = Permutation::identity(len);
        t.swap(i, j);
        for k in 1..g.num_functions() {
            let (ip, op) = g.entry_mut(k);
            let perm = if output { op } else { ip };
            *perm = perm.then(&t);
        }
    } else {
        let (ip, op) = g.entry_mut(f);
        let perm = if output { op } else { ip };
        perm.swap(i, j);
    }
}
