//! Exhaustive checks of mapped circuits.
//!
//! [`check_certificate`] configures every instance as a certificate says
//! and compares the whole truth table with the permuted viable function.
//! [`attacker_enumerate`] plays the attacker on tiny circuits: it tries
//! every configuration and every pin interpretation, and refuses outright
//! when the configuration count is over the limit.

use std::collections::HashSet;

use thiserror::Error;

use crate::boolfunc::{BoolFuncError, Permutation, TruthTable};
use crate::celllib::CellLibrary;
use crate::netlist::{GateKind, Netlist, Wire};
use crate::techmap::{Certificate, MappedError, MappedNetlist};

/// Default configuration-count limit of [`attacker_enumerate`].
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Mapped(#[from] MappedError),
    #[error(transparent)]
    Function(#[from] BoolFuncError),
    #[error("certificate configures {got} instances, the netlist has {want}")]
    CertificateLength { got: usize, want: usize },
    #[error("instance {instance}: plausible index {index} out of range ({size} functions)")]
    BadIndex {
        instance: String,
        index: usize,
        size: usize,
    },
    #[error("function is {got_in}x{got_out}, circuit is {want_in}x{want_out}")]
    Shape {
        got_in: usize,
        got_out: usize,
        want_in: usize,
        want_out: usize,
    },
    #[error("{configs} configurations exceed the enumeration limit {limit}")]
    LimitExceeded { configs: u128, limit: u64 },
}

/// Pin-level function of every instance under `cert`.
pub fn configured_functions(m: &MappedNetlist, lib: &CellLibrary, cert: &Certificate) -> Result<Vec<u16>, VerifyError> {
    m.check(lib)?;
    if cert.config.len() != m.instances.len() {
        return Err(VerifyError::CertificateLength {
            got: cert.config.len(),
            want: m.instances.len(),
        });
    }
    m.instances
        .iter()
        .zip(&cert.config)
        .map(|(inst, &index)| {
            let cell = lib.cell(lib.find(&inst.cell).expect("checked"));
            if index >= cell.plausible().len() {
                return Err(VerifyError::BadIndex {
                    instance: inst.name.clone(),
                    index,
                    size: cell.plausible().len(),
                });
            }
            Ok(cell.plausible_bits(index))
        })
        .collect()
}

fn check_shape(m: &MappedNetlist, f: &TruthTable) -> Result<(), VerifyError> {
    if f.num_inputs() != m.data_inputs.len() || f.num_outputs() != m.outputs.len() {
        return Err(VerifyError::Shape {
            got_in: f.num_inputs(),
            got_out: f.num_outputs(),
            want_in: m.data_inputs.len(),
            want_out: m.outputs.len(),
        });
    }
    Ok(())
}

/// True iff the circuit configured by `cert` computes `f` with its pins
/// relabelled by `(in_perm, out_perm)`, over every input row.
pub fn check_certificate(
    m: &MappedNetlist,
    lib: &CellLibrary,
    cert: &Certificate,
    f: &TruthTable,
    in_perm: &Permutation,
    out_perm: &Permutation,
) -> Result<bool, VerifyError> {
    check_shape(m, f)?;
    let funcs = configured_functions(m, lib, cert)?;
    let want = f.permute(in_perm, out_perm)?;
    Ok(m.evaluate(&funcs) == want)
}

/// The configured circuit as a plain gate netlist: each instance becomes a
/// sum of minterms over its pins. Used as an independent evaluator.
pub fn configured_netlist(m: &MappedNetlist, lib: &CellLibrary, cert: &Certificate) -> Result<Netlist, VerifyError> {
    let funcs = configured_functions(m, lib, cert)?;
    let mut net = Netlist::new(m.data_inputs.clone(), Vec::new()).map_err(MappedError::from)?;
    let mut wires: Vec<Wire> = Vec::with_capacity(m.instances.len());
    let add = |net: &mut Netlist, kind: GateKind, ins: Vec<Wire>| net.add_gate(kind, ins).expect("fanins exist");
    for (inst, &f) in m.instances.iter().zip(&funcs) {
        let pins: Vec<Wire> = inst
            .fanins
            .iter()
            .map(|&w| match w {
                Wire::Gate(g) => wires[g],
                other => other,
            })
            .collect();
        let arity = pins.len();
        let mut terms = Vec::new();
        for row in 0..1usize << arity {
            if (f >> row) & 1 == 0 {
                continue;
            }
            let lits: Vec<Wire> = pins
                .iter()
                .enumerate()
                .map(|(p, &w)| if (row >> p) & 1 == 1 { w } else { add(&mut net, GateKind::Inv, vec![w]) })
                .collect();
            terms.push(if lits.len() == 1 { lits[0] } else { add(&mut net, GateKind::And, lits) });
        }
        let out = match terms.len() {
            0 => add(&mut net, GateKind::Const0, vec![]),
            1 => add(&mut net, GateKind::Buf, terms),
            _ => add(&mut net, GateKind::Or, terms),
        };
        wires.push(out);
    }
    for (name, w) in &m.outputs {
        let w = match *w {
            Wire::Gate(g) => wires[g],
            other => other,
        };
        net.add_output(name, w).map_err(MappedError::from)?;
    }
    Ok(net)
}

/// Number of configuration vectors of `m`.
pub fn configuration_count(m: &MappedNetlist, lib: &CellLibrary) -> Result<u128, VerifyError> {
    m.check(lib)?;
    Ok(m.instances
        .iter()
        .map(|i| lib.cell(lib.find(&i.cell).unwrap()).plausible().len() as u128)
        .fold(1u128, |a, b| a.saturating_mul(b)))
}

/// For each candidate, whether some configuration realizes it under some
/// input and output interpretation. Refuses when the configuration count
/// exceeds `limit`.
pub fn attacker_enumerate(
    m: &MappedNetlist,
    lib: &CellLibrary,
    candidates: &[TruthTable],
    limit: u64,
) -> Result<Vec<bool>, VerifyError> {
    let configs = configuration_count(m, lib)?;
    if configs > limit as u128 {
        return Err(VerifyError::LimitExceeded { configs, limit });
    }
    let (ni, no) = (m.data_inputs.len(), m.outputs.len());
    let mut variants: Vec<HashSet<TruthTable>> = Vec::with_capacity(candidates.len());
    for c in candidates {
        check_shape(m, c)?;
        let mut set = HashSet::new();
        for p in Permutation::all(ni) {
            for q in Permutation::all(no) {
                set.insert(c.permute(&p, &q)?);
            }
        }
        variants.push(set);
    }
    let sizes: Vec<usize> = m
        .instances
        .iter()
        .map(|i| lib.cell(lib.find(&i.cell).unwrap()).plausible().len())
        .collect();
    let cells: Vec<usize> = m.instances.iter().map(|i| lib.find(&i.cell).unwrap()).collect();
    let mut digits = vec![0usize; sizes.len()];
    let mut found = vec![false; candidates.len()];
    loop {
        let funcs: Vec<u16> = cells.iter().zip(&digits).map(|(&c, &d)| lib.cell(c).plausible_bits(d)).collect();
        let t = m.evaluate(&funcs);
        for (f, v) in found.iter_mut().zip(&variants) {
            if !*f && v.contains(&t) {
                *f = true;
            }
        }
        if found.iter().all(|&f| f) {
            break;
        }
        // mixed-radix increment
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < sizes[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            break;
        }
    }
    Ok(found)
}
