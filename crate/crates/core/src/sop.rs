//! Word-packed truth tables of up to 16 variables, irredundant
//! sum-of-products (Minato-Morreale) and algebraic factoring.
//!
//! A table over `nv` variables is a `Vec<u64>` of `max(1, 2^nv / 64)`
//! words; bit `r` is the value at row `r`, variable 0 is the LSB of `r`.
//! Tables over fewer than 6 variables keep the unused high bits zero.

const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

pub fn num_words(nv: usize) -> usize {
    if nv <= 6 {
        1
    } else {
        1 << (nv - 6)
    }
}

fn row_mask(nv: usize) -> u64 {
    if nv >= 6 {
        !0
    } else {
        (1u64 << (1 << nv)) - 1
    }
}

pub fn zeros(nv: usize) -> Vec<u64> {
    vec![0; num_words(nv)]
}

pub fn ones(nv: usize) -> Vec<u64> {
    vec![row_mask(nv); num_words(nv)]
}

pub fn var(nv: usize, v: usize) -> Vec<u64> {
    assert!(v < nv);
    let m = row_mask(nv);
    (0..num_words(nv))
        .map(|w| {
            if v < 6 {
                VAR_MASKS[v] & m
            } else if (w >> (v - 6)) & 1 == 1 {
                !0
            } else {
                0
            }
        })
        .collect()
}

pub fn not(t: &[u64], nv: usize) -> Vec<u64> {
    let m = row_mask(nv);
    t.iter().map(|w| !w & m).collect()
}

pub fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

pub fn or(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

pub fn and_not(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & !y).collect()
}

pub fn is_zero(t: &[u64]) -> bool {
    t.iter().all(|&w| w == 0)
}

pub fn get(t: &[u64], row: usize) -> bool {
    (t[row / 64] >> (row % 64)) & 1 == 1
}

/// The table with `v` fixed to `value`, still expressed over all `nv`
/// variables (it no longer depends on `v`).
pub fn cofactor(t: &[u64], v: usize, value: bool) -> Vec<u64> {
    let mut out = t.to_vec();
    if v < 6 {
        let s = 1 << v;
        let m = VAR_MASKS[v];
        for w in out.iter_mut() {
            *w = if value {
                (*w & m) | ((*w & m) >> s)
            } else {
                (*w & !m) | ((*w & !m) << s)
            };
        }
    } else {
        let stride = 1 << (v - 6);
        for base in (0..out.len()).step_by(2 * stride) {
            for i in base..base + stride {
                if value {
                    out[i] = out[i + stride];
                } else {
                    out[i + stride] = out[i];
                }
            }
        }
    }
    out
}

pub fn depends_on(t: &[u64], v: usize) -> bool {
    cofactor(t, v, false) != cofactor(t, v, true)
}

/// A product term. Bit `i` of `mask` means variable `i` appears; the same
/// bit of `pos` is 1 for the positive literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub mask: u32,
    pub pos: u32,
}

impl Cube {
    pub const TAUTOLOGY: Cube = Cube { mask: 0, pos: 0 };

    pub fn with(self, v: usize, positive: bool) -> Cube {
        Cube {
            mask: self.mask | 1 << v,
            pos: if positive { self.pos | 1 << v } else { self.pos & !(1 << v) },
        }
    }

    pub fn num_literals(self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Literals as (variable, positive) in increasing variable order.
    pub fn literals(self) -> impl Iterator<Item = (usize, bool)> {
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((v, (self.pos >> v) & 1 == 1))
        })
    }

    pub fn eval(self, row: usize) -> bool {
        (row as u32 ^ self.pos) & self.mask == 0
    }

    pub fn table(self, nv: usize) -> Vec<u64> {
        let mut t = ones(nv);
        for (v, p) in self.literals() {
            let x = var(nv, v);
            t = if p { and(&t, &x) } else { and_not(&t, &x) };
        }
        t
    }
}

/// Irredundant SOP cover of `on`.
pub fn isop(on: &[u64], nv: usize) -> Vec<Cube> {
    isop_bounds(on, on, nv)
}

/// Irredundant SOP cover of some function between `lower` and `upper`.
pub fn isop_bounds(lower: &[u64], upper: &[u64], nv: usize) -> Vec<Cube> {
    assert!(nv <= 16);
    debug_assert!(is_zero(&and_not(lower, upper)));
    let mut cubes = Vec::new();
    if nv <= 6 {
        isop_word(lower[0], upper[0], nv, Cube::TAUTOLOGY, &mut cubes);
    } else {
        isop_wide(lower, upper, nv, Cube::TAUTOLOGY, &mut cubes);
    }
    cubes
}

// The recursion splits on the top variable of the current sub-table, so
// each level works on half the words of its parent.

fn isop_word(lower: u64, upper: u64, t: usize, prefix: Cube, cubes: &mut Vec<Cube>) -> u64 {
    if lower == 0 {
        return 0;
    }
    let full = row_mask(t);
    if upper & full == full {
        cubes.push(prefix);
        return full;
    }
    let v = t - 1;
    let h = 1u32 << v;
    let m = row_mask(v);
    let (l0, l1) = (lower & m, (lower >> h) & m);
    let (u0, u1) = (upper & m, (upper >> h) & m);
    if l0 == l1 && u0 == u1 {
        let r = isop_word(l0, u0, v, prefix, cubes);
        return r | r << h;
    }
    let f0 = isop_word(l0 & !u1, u0, v, prefix.with(v, false), cubes);
    let f1 = isop_word(l1 & !u0, u1, v, prefix.with(v, true), cubes);
    let fs = isop_word((l0 & !f0) | (l1 & !f1), u0 & u1, v, prefix, cubes);
    (f0 | fs) | (f1 | fs) << h
}

fn isop_wide(lower: &[u64], upper: &[u64], t: usize, prefix: Cube, cubes: &mut Vec<Cube>) -> Vec<u64> {
    if t <= 6 {
        return vec![isop_word(lower[0], upper[0], t, prefix, cubes)];
    }
    if is_zero(lower) {
        return vec![0; lower.len()];
    }
    if upper.iter().all(|&w| w == !0) {
        cubes.push(prefix);
        return vec![!0; lower.len()];
    }
    let v = t - 1;
    let half = lower.len() / 2;
    let (l0, l1) = lower.split_at(half);
    let (u0, u1) = upper.split_at(half);
    let join = |a: Vec<u64>, b: Vec<u64>| -> Vec<u64> { a.into_iter().chain(b).collect() };
    if l0 == l1 && u0 == u1 {
        let r = isop_wide(l0, u0, v, prefix, cubes);
        return join(r.clone(), r);
    }
    let f0 = isop_wide(&and_not(l0, u1), u0, v, prefix.with(v, false), cubes);
    let f1 = isop_wide(&and_not(l1, u0), u1, v, prefix.with(v, true), cubes);
    let rest = or(&and_not(l0, &f0), &and_not(l1, &f1));
    let fs = isop_wide(&rest, &and(u0, u1), v, prefix, cubes);
    join(or(&f0, &fs), or(&f1, &fs))
}

pub fn cover_table(cubes: &[Cube], nv: usize) -> Vec<u64> {
    cubes.iter().fold(zeros(nv), |acc, c| or(&acc, &c.table(nv)))
}

/// A factored form over variables `0..`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factored {
    Const(bool),
    Lit { var: usize, positive: bool },
    And(Vec<Factored>),
    Or(Vec<Factored>),
}

impl Factored {
    pub fn eval(&self, row: usize) -> bool {
        match self {
            Factored::Const(b) => *b,
            Factored::Lit { var, positive } => ((row >> var) & 1 == 1) == *positive,
            Factored::And(xs) => xs.iter().all(|x| x.eval(row)),
            Factored::Or(xs) => xs.iter().any(|x| x.eval(row)),
        }
    }

    pub fn num_literals(&self) -> usize {
        match self {
            Factored::Const(_) => 0,
            Factored::Lit { .. } => 1,
            Factored::And(xs) | Factored::Or(xs) => xs.iter().map(Factored::num_literals).sum(),
        }
    }

    fn and(mut parts: Vec<Factored>) -> Factored {
        let mut flat = Vec::new();
        for p in parts.drain(..) {
            match p {
                Factored::And(xs) => flat.extend(xs),
                Factored::Const(true) => {}
                Factored::Const(false) => return Factored::Const(false),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Factored::Const(true),
            1 => flat.pop().unwrap(),
            _ => Factored::And(flat),
        }
    }

    fn or(mut parts: Vec<Factored>) -> Factored {
        let mut flat = Vec::new();
        for p in parts.drain(..) {
            match p {
                Factored::Or(xs) => flat.extend(xs),
                Factored::Const(false) => {}
                Factored::Const(true) => return Factored::Const(true),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Factored::Const(false),
            1 => flat.pop().unwrap(),
            _ => Factored::Or(flat),
        }
    }
}

fn cube_form(c: Cube) -> Factored {
    Factored::and(
        c.literals()
            .map(|(var, positive)| Factored::Lit { var, positive })
            .collect(),
    )
}

/// Quick algebraic factoring: pull out the common cube, then divide by the
/// most frequent literal.
pub fn factor(cubes: &[Cube]) -> Factored {
    if cubes.is_empty() {
        return Factored::Const(false);
    }
    if cubes.iter().any(|c| c.mask == 0) {
        return Factored::Const(true);
    }
    if cubes.len() == 1 {
        return cube_form(cubes[0]);
    }
    let common_mask = cubes.iter().fold(!0u32, |m, c| m & c.mask & !(c.pos ^ cubes[0].pos));
    if common_mask != 0 {
        let common = Cube {
            mask: common_mask,
            pos: cubes[0].pos & common_mask,
        };
        let rest: Vec<Cube> = cubes
            .iter()
            .map(|c| Cube {
                mask: c.mask & !common_mask,
                pos: c.pos & !common_mask,
            })
            .collect();
        return Factored::and(vec![cube_form(common), factor(&rest)]);
    }
    // most frequent literal; ties go to the lowest variable, negative first
    let mut freq = [0u32; 64];
    for c in cubes {
        for (v, p) in c.literals() {
            freq[2 * v + p as usize] += 1;
        }
    }
    let (best, &count) = freq
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .unwrap();
    let (v, p) = (best / 2, best % 2 == 1);
    if count < 2 {
        return Factored::or(cubes.iter().map(|&c| cube_form(c)).collect());
    }
    let bit = 1u32 << v;
    let (with, without): (Vec<Cube>, Vec<Cube>) = cubes
        .iter()
        .partition(|c| c.mask & bit != 0 && ((c.pos & bit != 0) == p));
    let quotient: Vec<Cube> = with
        .iter()
        .map(|c| Cube {
            mask: c.mask & !bit,
            pos: c.pos & !bit,
        })
        .collect();
    Factored::or(vec![
        Factored::and(vec![Factored::Lit { var: v, positive: p }, factor(&quotient)]),
        factor(&without),
    ])
}
