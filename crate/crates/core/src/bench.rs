//! End-to-end pipeline and benchmark rows.

use std::fmt::Write as _;

use thiserror::Error;

use crate::boolfunc::TruthTable;
use crate::celllib::{Area, CellLibrary};
use crate::ga::{random_search, run_ga, GaConfig, GaHistory, PinAssignment, RandomSearch};
use crate::merge::{MergeError, MergedSpec};
use crate::netlist::Netlist;
use crate::sboxes::Suite;
use crate::synth::{synthesize, SynthReport};
use crate::techmap::{map_circuit_with, DummyPolicy, Manifest, MappedNetlist, Mapping, TechmapError};
use crate::verify::{check_certificate, VerifyError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Techmap(#[from] TechmapError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("bad bench CSV: {0}")]
    Csv(String),
}

pub const CSV_HEADER: &str = "suite,random_avg_ge,random_best_ge,ga_ge,ga_tm_ge,improvement_pct";

/// One line of the area comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub suite: String,
    pub random_avg_ge: f64,
    pub random_best_ge: f64,
    pub ga_ge: f64,
    pub ga_tm_ge: f64,
    pub improvement_pct: f64,
}

impl BenchRow {
    pub fn new(suite: &str, random_avg_ge: f64, random_best_ge: f64, ga_ge: f64, ga_tm_ge: f64) -> BenchRow {
        BenchRow {
            suite: suite.to_string(),
            random_avg_ge,
            random_best_ge,
            ga_ge,
            ga_tm_ge,
            improvement_pct: improvement(random_best_ge, ga_tm_ge),
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{:.2},{:.2},{:.2},{:.2},{:.2}",
            self.suite, self.random_avg_ge, self.random_best_ge, self.ga_ge, self.ga_tm_ge, self.improvement_pct
        )
    }

    /// Header plus one line per row.
    pub fn to_csv(rows: &[BenchRow]) -> String {
        let mut s = format!("{CSV_HEADER}\n");
        for r in rows {
            let _ = writeln!(s, "{}", r.csv_line());
        }
        s
    }

    pub fn parse_csv(text: &str) -> Result<Vec<BenchRow>, BenchError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some(CSV_HEADER) {
            return Err(BenchError::Csv("missing header".into()));
        }
        lines
            .map(|l| {
                let f: Vec<&str> = l.trim().split(',').collect();
                if f.len() != 6 {
                    return Err(BenchError::Csv(format!("expected 6 fields in {l:?}")));
                }
                let num = |s: &str| s.parse::<f64>().map_err(|_| BenchError::Csv(format!("bad number {s:?}")));
                Ok(BenchRow {
                    suite: f[0].to_string(),
                    random_avg_ge: num(f[1])?,
                    random_best_ge: num(f[2])?,
                    ga_ge: num(f[3])?,
                    ga_tm_ge: num(f[4])?,
                    improvement_pct: num(f[5])?,
                })
            })
            .collect()
    }

    /// Fixed-width table for terminals.
    pub fn pretty(rows: &[BenchRow]) -> String {
        let mut s = format!(
            "{:<10} {:>11} {:>11} {:>9} {:>9} {:>8}\n",
            "suite", "random avg", "random best", "GA", "GA+TM", "impr %"
        );
        for r in rows {
            let _ = writeln!(
                s,
                "{:<10} {:>11.2} {:>11.2} {:>9.2} {:>9.2} {:>8.2}",
                r.suite, r.random_avg_ge, r.random_best_ge, r.ga_ge, r.ga_tm_ge, r.improvement_pct
            );
        }
        s
    }
}

/// Area saved relative to `baseline`, in percent.
pub fn improvement(baseline: f64, ours: f64) -> f64 {
    (baseline - ours) / baseline * 100.0
}

/// Synthesis and mapping of one assignment.
pub struct Pipeline {
    pub spec: MergedSpec,
    pub synthesized: Netlist,
    pub report: SynthReport,
    pub mapping: Mapping,
}

pub fn run_pipeline(
    functions: &[TruthTable],
    names: &[String],
    assignment: &PinAssignment,
    lib: &CellLibrary,
) -> Result<Pipeline, BenchError> {
    let spec = MergedSpec::new(functions.to_vec(), assignment.clone())?;
    let (synthesized, report) = synthesize(&spec, lib);
    let mapping = map_circuit_with(&synthesized, lib, functions.len(), names.to_vec(), DummyPolicy::default())?;
    Ok(Pipeline {
        spec,
        synthesized,
        report,
        mapping,
    })
}

/// One verdict per viable function.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub area: Area,
}

impl Verdict {
    pub fn line(&self) -> String {
        format!("{} {} {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.area)
    }
}

/// Checks every certificate of `manifest` against the viable functions.
pub fn verify_all(
    net: &MappedNetlist,
    manifest: &Manifest,
    functions: &[TruthTable],
    assignment: &PinAssignment,
    lib: &CellLibrary,
) -> Result<Vec<Verdict>, BenchError> {
    let area = net.area(lib).map_err(VerifyError::from)?;
    let mut out = Vec::with_capacity(functions.len());
    for (i, f) in functions.iter().enumerate() {
        let pass = match manifest.certificates.get(i) {
            Some(cert) => {
                let (p, q) = assignment.entry(i);
                check_certificate(net, lib, cert, f, p, q)?
            }
            None => false,
        };
        let name = manifest.function_names.get(i).cloned().unwrap_or_else(|| format!("f{i}"));
        out.push(Verdict { name, pass, area });
    }
    Ok(out)
}

/// Everything `bench` produces for one suite.
pub struct BenchOutcome {
    pub row: BenchRow,
    pub history: GaHistory,
    pub random: RandomSearch,
    pub best: PinAssignment,
    pub pipeline: Pipeline,
    pub verdicts: Vec<Verdict>,
}

/// GA and an equal-budget random search on `suite`, then mapping of the
/// GA's best assignment and verification of all certificates.
pub fn run_bench(suite: Suite, cfg: &GaConfig, random_count: usize, lib: &CellLibrary) -> Result<BenchOutcome, BenchError> {
    let functions = suite.functions();
    let names: Vec<String> = suite.sboxes().into_iter().map(|s| s.name).collect();
    let (best, history) = run_ga(&functions, cfg, lib)?;
    let random = random_search(&functions, random_count, cfg.seed, lib)?;
    let pipeline = run_pipeline(&functions, &names, &best, lib)?;
    let verdicts = verify_all(
        &pipeline.mapping.netlist,
        &pipeline.mapping.manifest,
        &functions,
        &best,
        lib,
    )?;
    let row = BenchRow::new(
        &suite.to_string(),
        random.mean_ge(),
        random.best_area.ge(),
        history.best_area().map_or(f64::NAN, Area::ge),
        pipeline.mapping.area.ge(),
    );
    Ok(BenchOutcome {
        row,
        history,
        random,
        best,
        pipeline,
        verdicts,
    })
}
