//! Small multi-output Boolean functions stored as exhaustive truth tables.
//!
//! Bit order is fixed crate-wide: in row `r`, input `i` takes the value of
//! bit `i` of `r` (input 0 is the least-significant bit). In the hex text
//! form, the digit at string position `r` is the output word of row `r`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Maximum number of inputs of a [`TruthTable`].
pub const MAX_INPUTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoolFuncError {
    #[error("too many inputs: {0} (at most {MAX_INPUTS})")]
    TooManyInputs(usize),
    #[error("invalid number of outputs: {0}")]
    BadOutputCount(usize),
    #[error("hex string has {found} digits, expected {expected}")]
    HexLength { expected: usize, found: usize },
    #[error("invalid hex digit {digit:?} at position {pos}")]
    HexDigit { pos: usize, digit: char },
    #[error("digit {value:#x} at position {pos} does not fit in {outputs} outputs")]
    HexRange { pos: usize, value: u32, outputs: usize },
    #[error("input index {index} out of range for {num_inputs} inputs")]
    InputOutOfRange { index: usize, num_inputs: usize },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
}

/// Fixed-length bit vector with bit-parallel logic operations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64).max(1)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Bits {
            len,
            words: vec![!0; len.div_ceil(64).max(1)],
        };
        b.mask_tail();
        b
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut b = Bits::zeros(len);
        for i in 0..len {
            if f(i) {
                b.words[i / 64] |= 1 << (i % 64);
            }
        }
        b
    }

    /// Truth table of projection variable `var` over `2^num_vars` rows.
    pub fn var(num_vars: usize, var: usize) -> Self {
        let len = 1usize << num_vars;
        if var < 6 {
            const PATTERNS: [u64; 6] = [
                0xAAAA_AAAA_AAAA_AAAA,
                0xCCCC_CCCC_CCCC_CCCC,
                0xF0F0_F0F0_F0F0_F0F0,
                0xFF00_FF00_FF00_FF00,
                0xFFFF_0000_FFFF_0000,
                0xFFFF_FFFF_0000_0000,
            ];
            let mut b = Bits {
                len,
                words: vec![PATTERNS[var]; len.div_ceil(64).max(1)],
            };
            b.mask_tail();
            b
        } else {
            let period = 1usize << (var - 6);
            let words = (0..len / 64)
                .map(|w| if (w / period) % 2 == 1 { !0 } else { 0 })
                .collect();
            Bits { len, words }
        }
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << rem) - 1;
        } else if self.len == 0 {
            self.words[0] = 0;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_ones(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn not(&self) -> Bits {
        let mut b = Bits {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        b.mask_tail();
        b
    }

    fn zip(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        assert_eq!(self.len, other.len, "bit length mismatch");
        Bits {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn and(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn and_not(&self, other: &Bits) -> Bits {
        self.zip(other, |a, b| a & !b)
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits[{}]", self.len)?;
        for i in (0..self.len).rev() {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// A bijection over `0..len`.
///
/// Used both for input pins (`perm[k]` is the merged pin read by the
/// function's input `k`) and for output pins (`perm[j]` is the merged pin
/// driven by the function's output `j`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self, BoolFuncError> {
        let mut seen = vec![false; map.len()];
        for &p in &map {
            if p >= map.len() || seen[p] {
                return Err(BoolFuncError::NotAPermutation(map));
            }
            seen[p] = true;
        }
        Ok(Permutation(map))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self` followed by `next`: `i -> next(self(i))`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        assert_eq!(self.len(), next.len());
        Permutation(self.0.iter().map(|&i| next.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// Exchanges two positions in place. The result stays bijective.
    pub fn swap(&mut self, a: usize, b: usize) {
        self.0.swap(a, b);
    }

    /// All permutations of `0..len` in lexicographic order.
    pub fn all(len: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..len).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..len).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..len).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Exhaustive truth table of a function with `num_inputs` inputs and
/// `num_outputs` outputs, one bit vector per output.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    num_inputs: usize,
    outputs: Vec<Bits>,
}

impl TruthTable {
    pub fn new(num_inputs: usize, num_outputs: usize) -> Result<Self, BoolFuncError> {
        if num_inputs > MAX_INPUTS {
            return Err(BoolFuncError::TooManyInputs(num_inputs));
        }
        if num_outputs == 0 || num_outputs > 64 {
            return Err(BoolFuncError::BadOutputCount(num_outputs));
        }
        Ok(TruthTable {
            num_inputs,
            outputs: vec![Bits::zeros(1 << num_inputs); num_outputs],
        })
    }

    /// Builds a table from a function returning the output word of a row.
    pub fn from_fn(
        num_inputs: usize,
        num_outputs: usize,
        mut f: impl FnMut(usize) -> u64,
    ) -> Result<Self, BoolFuncError> {
        let mut t = TruthTable::new(num_inputs, num_outputs)?;
        for row in 0..t.num_rows() {
            let word = f(row);
            for (j, out) in t.outputs.iter_mut().enumerate() {
                if (word >> j) & 1 == 1 {
                    out.set(row, true);
                }
            }
        }
        Ok(t)
    }

    pub fn from_outputs(num_inputs: usize, outputs: Vec<Bits>) -> Result<Self, BoolFuncError> {
        if num_inputs > MAX_INPUTS {
            return Err(BoolFuncError::TooManyInputs(num_inputs));
        }
        if outputs.is_empty() || outputs.len() > 64 {
            return Err(BoolFuncError::BadOutputCount(outputs.len()));
        }
        if let Some(b) = outputs.iter().find(|b| b.len() != 1 << num_inputs) {
            return Err(BoolFuncError::ArityMismatch(format!(
                "output has {} bits, expected {}",
                b.len(),
                1usize << num_inputs
            )));
        }
        Ok(TruthTable {
            num_inputs,
            outputs,
        })
    }

    /// Single-output table from the low `2^num_inputs` bits of `bits`.
    pub fn from_u64(num_inputs: usize, bits: u64) -> Result<Self, BoolFuncError> {
        if num_inputs > 6 {
            return Err(BoolFuncError::TooManyInputs(num_inputs));
        }
        TruthTable::from_fn(num_inputs, 1, |r| (bits >> r) & 1)
    }

    pub fn constant(num_inputs: usize, value: bool) -> Result<Self, BoolFuncError> {
        TruthTable::from_fn(num_inputs, 1, |_| value as u64)
    }

    /// Single-output projection onto input `var`.
    pub fn projection(num_inputs: usize, var: usize) -> Result<Self, BoolFuncError> {
        if var >= num_inputs {
            return Err(BoolFuncError::InputOutOfRange {
                index: var,
                num_inputs,
            });
        }
        TruthTable::from_outputs(num_inputs, vec![Bits::var(num_inputs, var)])
    }

    /// Parses a hex string with one digit per row (row 0 first).
    pub fn from_hex(hex: &str, num_inputs: usize, num_outputs: usize) -> Result<Self, BoolFuncError> {
        if num_outputs == 0 || num_outputs > 4 {
            return Err(BoolFuncError::BadOutputCount(num_outputs));
        }
        if num_inputs > MAX_INPUTS {
            return Err(BoolFuncError::TooManyInputs(num_inputs));
        }
        let expected = 1usize << num_inputs;
        let digits: Vec<char> = hex.trim().chars().collect();
        if digits.len() != expected {
            return Err(BoolFuncError::HexLength {
                expected,
                found: digits.len(),
            });
        }
        let mut words = Vec::with_capacity(expected);
        for (pos, &c) in digits.iter().enumerate() {
            let value = c
                .to_digit(16)
                .ok_or(BoolFuncError::HexDigit { pos, digit: c })?;
            if value >> num_outputs != 0 {
                return Err(BoolFuncError::HexRange {
                    pos,
                    value,
                    outputs: num_outputs,
                });
            }
            words.push(value as u64);
        }
        TruthTable::from_fn(num_inputs, num_outputs, |r| words[r])
    }

    /// Inverse of [`TruthTable::from_hex`] (upper-case digits).
    pub fn to_hex(&self) -> String {
        assert!(self.num_outputs() <= 4, "hex form holds at most 4 outputs");
        (0..self.num_rows())
            .map(|r| char::from_digit(self.eval(r) as u32, 16).unwrap().to_ascii_uppercase())
            .collect()
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_rows(&self) -> usize {
        1 << self.num_inputs
    }

    pub fn output(&self, j: usize) -> &Bits {
        &self.outputs[j]
    }

    pub fn outputs(&self) -> &[Bits] {
        &self.outputs
    }

    /// Output word of a single row (bit `j` is output `j`).
    pub fn eval(&self, row: usize) -> u64 {
        self.outputs
            .iter()
            .enumerate()
            .fold(0, |acc, (j, b)| acc | ((b.get(row) as u64) << j))
    }

    /// Extracts output `j` as a single-output table.
    pub fn output_table(&self, j: usize) -> TruthTable {
        TruthTable {
            num_inputs: self.num_inputs,
            outputs: vec![self.outputs[j].clone()],
        }
    }

    /// The low 64 bits of a single-output table (exact when `num_inputs <= 6`).
    pub fn as_u64(&self) -> u64 {
        self.outputs[0].words()[0]
    }

    /// Whether output `j` depends on input `i`.
    pub fn depends_on(&self, j: usize, i: usize) -> bool {
        let out = &self.outputs[j];
        (0..self.num_rows()).any(|r| r & (1 << i) == 0 && out.get(r) != out.get(r | (1 << i)))
    }

    /// Fixes input `input` to `value`. The input keeps its slot and becomes a
    /// don't-care of the result.
    pub fn cofactor(&self, input: usize, value: bool) -> Result<TruthTable, BoolFuncError> {
        if input >= self.num_inputs {
            return Err(BoolFuncError::InputOutOfRange {
                index: input,
                num_inputs: self.num_inputs,
            });
        }
        let bit = 1usize << input;
        let outputs = self
            .outputs
            .iter()
            .map(|out| {
                Bits::from_fn(out.len(), |r| {
                    let src = if value { r | bit } else { r & !bit };
                    out.get(src)
                })
            })
            .collect();
        Ok(TruthTable {
            num_inputs: self.num_inputs,
            outputs,
        })
    }

    /// Smallest set containing `self` that is closed under cofactoring with
    /// respect to every input and both polarities. The first element is
    /// `self`; the rest follow in ascending table order.
    pub fn cofactor_closure(&self) -> Vec<TruthTable> {
        let mut seen: HashSet<TruthTable> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.clone());
        queue.push_back(self.clone());
        while let Some(f) = queue.pop_front() {
            for i in 0..self.num_inputs {
                for v in [false, true] {
                    let g = f.cofactor(i, v).expect("input in range");
                    if seen.insert(g.clone()) {
                        queue.push_back(g);
                    }
                }
            }
        }
        seen.remove(self);
        let rest: BTreeSet<TruthTable> = seen.into_iter().collect();
        std::iter::once(self.clone()).chain(rest).collect()
    }

    /// Relabels pins: `g(x)[out_perm(j)] = f(y)[j]` where input `k` of `f`
    /// reads `y_k = x_{in_perm(k)}`.
    ///
    /// Composition: `f.permute(p1, q1).permute(p2, q2) == f.permute(p1.then(p2), q1.then(q2))`.
    pub fn permute(
        &self,
        in_perm: &Permutation,
        out_perm: &Permutation,
    ) -> Result<TruthTable, BoolFuncError> {
        if in_perm.len() != self.num_inputs || out_perm.len() != self.num_outputs() {
            return Err(BoolFuncError::ArityMismatch(format!(
                "permutations of size {}/{} for a {}-input {}-output table",
                in_perm.len(),
                out_perm.len(),
                self.num_inputs,
                self.num_outputs()
            )));
        }
        let mut outputs = vec![Bits::zeros(self.num_rows()); self.num_outputs()];
        for x in 0..self.num_rows() {
            let mut y = 0usize;
            for k in 0..self.num_inputs {
                y |= ((x >> in_perm.apply(k)) & 1) << k;
            }
            for (j, out) in self.outputs.iter().enumerate() {
                if out.get(y) {
                    outputs[out_perm.apply(j)].set(x, true);
                }
            }
        }
        Ok(TruthTable {
            num_inputs: self.num_inputs,
            outputs,
        })
    }

    /// Bit-exact comparison that rejects mismatched arities instead of
    /// answering `false`.
    pub fn equals(&self, other: &TruthTable) -> Result<bool, BoolFuncError> {
        if self.num_inputs != other.num_inputs || self.num_outputs() != other.num_outputs() {
            return Err(BoolFuncError::ArityMismatch(format!(
                "{}x{} vs {}x{}",
                self.num_inputs,
                self.num_outputs(),
                other.num_inputs,
                other.num_outputs()
            )));
        }
        Ok(self == other)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num_outputs() <= 4 && self.num_inputs <= 8 {
            write!(
                f,
                "TruthTable({}->{}: {})",
                self.num_inputs,
                self.num_outputs(),
                self.to_hex()
            )
        } else {
            write!(f, "TruthTable({}->{})", self.num_inputs, self.num_outputs())
        }
    }
}
