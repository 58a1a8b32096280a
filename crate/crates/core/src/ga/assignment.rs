use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::boolfunc::{BoolFuncError, Permutation, TruthTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssignmentError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("function {0} has no entry")]
    Missing(usize),
    #[error("function 0 is the reference and must keep identity pins")]
    ReferenceMoved,
    #[error(transparent)]
    Perm(#[from] BoolFuncError),
}

/// Input and output pin permutations for each viable function. Function 0
/// is the reference and always keeps identity pins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PinAssignment {
    num_inputs: usize,
    num_outputs: usize,
    perms: Vec<(Permutation, Permutation)>,
}

impl PinAssignment {
    pub fn identity(num_functions: usize, num_inputs: usize, num_outputs: usize) -> PinAssignment {
        PinAssignment {
            num_inputs,
            num_outputs,
            perms: vec![
                (Permutation::identity(num_inputs), Permutation::identity(num_outputs));
                num_functions
            ],
        }
    }

    pub fn random<R: Rng>(
        num_functions: usize,
        num_inputs: usize,
        num_outputs: usize,
        rng: &mut R,
    ) -> PinAssignment {
        let mut a = PinAssignment::identity(num_functions, num_inputs, num_outputs);
        for (p, q) in a.perms.iter_mut().skip(1) {
            *p = random_perm(num_inputs, rng);
            *q = random_perm(num_outputs, rng);
        }
        a
    }

    /// Builds an assignment from the entries of functions `1..`.
    pub fn from_entries(
        num_inputs: usize,
        num_outputs: usize,
        rest: Vec<(Permutation, Permutation)>,
    ) -> Result<PinAssignment, AssignmentError> {
        for (p, q) in &rest {
            if p.len() != num_inputs || q.len() != num_outputs {
                return Err(BoolFuncError::ArityMismatch(format!(
                    "permutation sizes {}/{} for {num_inputs} inputs, {num_outputs} outputs",
                    p.len(),
                    q.len()
                ))
                .into());
            }
        }
        let mut perms = vec![(Permutation::identity(num_inputs), Permutation::identity(num_outputs))];
        perms.extend(rest);
        Ok(PinAssignment {
            num_inputs,
            num_outputs,
            perms,
        })
    }

    pub fn num_functions(&self) -> usize {
        self.perms.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    pub fn in_perm(&self, function: usize) -> &Permutation {
        &self.perms[function].0
    }

    pub fn out_perm(&self, function: usize) -> &Permutation {
        &self.perms[function].1
    }

    pub fn entry(&self, function: usize) -> (&Permutation, &Permutation) {
        let (p, q) = &self.perms[function];
        (p, q)
    }

    /// Mutable access for functions `1..`; the reference is not editable.
    pub fn entry_mut(&mut self, function: usize) -> (&mut Permutation, &mut Permutation) {
        assert!(function > 0, "function 0 is the reference");
        let (p, q) = &mut self.perms[function];
        (p, q)
    }

    /// `f` with its pins relabelled for slot `function`.
    pub fn apply(&self, function: usize, f: &TruthTable) -> Result<TruthTable, BoolFuncError> {
        let (p, q) = self.entry(function);
        f.permute(p, q)
    }

    /// Text form: one line per non-reference function,
    /// `INDEX in P0 P1 .. out Q0 Q1 ..`.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# pin assignment: {} functions, {} inputs, {} outputs\n",
            self.num_functions(),
            self.num_inputs,
            self.num_outputs
        );
        for (i, (p, q)) in self.perms.iter().enumerate().skip(1) {
            s.push_str(&format!("{i} in {p} out {q}\n"));
        }
        s
    }

    pub fn parse(
        text: &str,
        num_functions: usize,
        num_inputs: usize,
        num_outputs: usize,
    ) -> Result<PinAssignment, AssignmentError> {
        let mut rest: Vec<Option<(Permutation, Permutation)>> = vec![None; num_functions.saturating_sub(1)];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let syntax = |msg: &str| AssignmentError::Syntax {
                line,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = body.split_whitespace().collect();
            let index: usize = toks[0].parse().map_err(|_| syntax("bad function index"))?;
            let out_at = toks.iter().position(|&t| t == "out").ok_or_else(|| syntax("missing `out`"))?;
            if toks.get(1) != Some(&"in") {
                return Err(syntax("missing `in`"));
            }
            let nums = |ts: &[&str]| -> Result<Vec<usize>, AssignmentError> {
                ts.iter()
                    .map(|t| t.parse().map_err(|_| syntax("bad pin index")))
                    .collect()
            };
            let p = Permutation::new(nums(&toks[2..out_at])?)?;
            let q = Permutation::new(nums(&toks[out_at + 1..])?)?;
            if index == 0 {
                if !(p.is_identity() && q.is_identity()) {
                    return Err(AssignmentError::ReferenceMoved);
                }
                continue;
            }
            if index >= num_functions {
                return Err(syntax("function index out of range"));
            }
            rest[index - 1] = Some((p, q));
        }
        let rest = rest
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or(AssignmentError::Missing(i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        PinAssignment::from_entries(num_inputs, num_outputs, rest)
    }
}

impl fmt::Display for PinAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn random_perm<R: Rng>(len: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (0..len).collect();
    v.shuffle(rng);
    Permutation::new(v).expect("shuffle of identity is a permutation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = PinAssignment::random(4, 6, 4, &mut rng);
        assert!(a.in_perm(0).is_identity());
        let b = PinAssignment::parse(&a.to_text(), 4, 6, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_rejects_missing_and_moved_reference() {
        assert_eq!(
            PinAssignment::parse("1 in 0 1 out 1 0\n", 3, 2, 2),
            Err(AssignmentError::Missing(2))
        );
        assert_eq!(
            PinAssignment::parse("0 in 1 0 out 0 1\n1 in 0 1 out 0 1\n", 2, 2, 2),
            Err(AssignmentError::ReferenceMoved)
        );
        assert!(PinAssignment::parse("1 in 0 0 out 0 1\n", 2, 2, 2).is_err());
    }
}
