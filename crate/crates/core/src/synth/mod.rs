//! Logic synthesis: AIG construction, rewrite/refactor/balance passes and
//! covering into library gates. Everything here is deterministic.

mod aig;
mod balance;
mod cuts;
mod mapper;
mod refactor;
mod replace;
mod rewrite;
mod table;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

pub use aig::{Aig, Lit};
pub use balance::balance;
pub use mapper::{aig_to_gates, netlist_area};
pub use refactor::refactor;
pub use rewrite::rewrite;

use crate::boolfunc::TruthTable;
use crate::celllib::{Area, CellLibrary};
use crate::ga::PinAssignment;
use crate::merge::{build_merged, MergeError, MergedSpec};
use crate::netlist::Netlist;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pass {
    Balance,
    Rewrite,
    Refactor,
}

impl Pass {
    pub fn name(self) -> &'static str {
        match self {
            Pass::Balance => "balance",
            Pass::Rewrite => "rewrite",
            Pass::Refactor => "refactor",
        }
    }

    pub fn run(self, aig: &Aig) -> Aig {
        match self {
            Pass::Balance => balance(aig),
            Pass::Rewrite => rewrite(aig),
            Pass::Refactor => refactor(aig),
        }
    }
}

pub const SCRIPT: [Pass; 7] = [
    Pass::Balance,
    Pass::Rewrite,
    Pass::Refactor,
    Pass::Balance,
    Pass::Rewrite,
    Pass::Rewrite,
    Pass::Balance,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassRecord {
    pub pass: Pass,
    pub ands_before: usize,
    pub ands_after: usize,
    pub depth_after: u32,
    /// False when the pass result was discarded for being larger.
    pub kept: bool,
}

/// Runs [`SCRIPT`]. A pass result larger than its input is discarded.
pub fn synth_script(aig: &Aig) -> (Aig, Vec<PassRecord>) {
    let mut cur = aig.cleanup();
    let mut log = Vec::with_capacity(SCRIPT.len());
    for pass in SCRIPT {
        let next = pass.run(&cur);
        let kept = next.num_ands() <= cur.num_ands();
        let before = cur.num_ands();
        if kept {
            cur = next;
        }
        log.push(PassRecord {
            pass,
            ands_before: before,
            ands_after: cur.num_ands(),
            depth_after: cur.depth(),
            kept,
        });
    }
    (cur, log)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthReport {
    pub area: Area,
    pub gate_counts: BTreeMap<String, usize>,
    pub passes: Vec<PassRecord>,
}

impl SynthReport {
    pub fn new(net: &Netlist, lib: &CellLibrary, passes: Vec<PassRecord>) -> SynthReport {
        let mut gate_counts = BTreeMap::new();
        for g in net.gates() {
            *gate_counts.entry(g.kind.cell_name(g.fanins.len())).or_insert(0) += 1;
        }
        SynthReport {
            area: netlist_area(net, lib),
            gate_counts,
            passes,
        }
    }

    pub fn gate_count(&self) -> usize {
        self.gate_counts.values().sum()
    }

    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "area_ge={}", self.area);
        let _ = writeln!(s, "gates={}", self.gate_count());
        for (k, v) in &self.gate_counts {
            let _ = writeln!(s, "gates.{k}={v}");
        }
        for (i, p) in self.passes.iter().enumerate() {
            let _ = writeln!(
                s,
                "pass.{i}={} ands={}->{} depth={} kept={}",
                p.pass.name(),
                p.ands_before,
                p.ands_after,
                p.depth_after,
                p.kept
            );
        }
        s
    }
}

impl fmt::Display for SynthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Synthesizes an arbitrary netlist into library gates.
pub fn synthesize_netlist(net: &Netlist, lib: &CellLibrary) -> (Netlist, SynthReport) {
    let aig = Aig::from_netlist(net);
    let (opt, log) = synth_script(&aig);
    let gates = aig_to_gates(&opt, lib);
    let report = SynthReport::new(&gates, lib, log);
    (gates, report)
}

/// Merges and synthesizes `spec`.
pub fn synthesize(spec: &MergedSpec, lib: &CellLibrary) -> (Netlist, SynthReport) {
    synthesize_netlist(&build_merged(spec), lib)
}

/// The GA fitness: area of the synthesized merged circuit.
pub fn synth_area(
    functions: &[TruthTable],
    assignment: &PinAssignment,
    lib: &CellLibrary,
) -> Result<Area, MergeError> {
    let spec = MergedSpec::new(functions.to_vec(), assignment.clone())?;
    Ok(synthesize(&spec, lib).1.area)
}
