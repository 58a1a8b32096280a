use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use camomap::bench::{run_bench, run_pipeline, verify_all, BenchRow};
use camomap::boolfunc::TruthTable;
use camomap::celllib::CellLibrary;
use camomap::ga::{random_search, run_ga, GaConfig, PinAssignment};
use camomap::merge::{build_merged, MergedSpec};
use camomap::netlist::Netlist;
use camomap::sboxes::{self, Sbox, Suite};
use camomap::techmap::{map_circuit_with, DummyPolicy, Manifest, MappedNetlist};

/// Merge viable S-boxes into one circuit and map it onto camouflaged cells.
#[derive(Parser)]
#[command(name = "camomap", version)]
struct Cli {
    /// Worker threads for fitness evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cell library file (`NAME ARITY HEX AREA` lines); default: built-in.
    #[arg(long, global = true)]
    library: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Selection {
    /// Bundled suite (present2, present4, present8, present16, des2, des4, des8).
    #[arg(long)]
    suite: Option<String>,
    /// S-box file (`NAME HEX NUM_IN NUM_OUT` lines); default: bundled S-boxes.
    #[arg(long)]
    sboxes: Option<PathBuf>,
    /// Comma-separated S-box names to merge, in order.
    #[arg(long, value_delimiter = ',')]
    names: Vec<String>,
}

#[derive(Args, Clone)]
struct GaArgs {
    /// GA configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configuration's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the multiplexed merged netlist.
    Merge {
        #[command(flatten)]
        sel: Selection,
        /// Pin assignment file; default: identity.
        #[arg(long)]
        assignment: Option<PathBuf>,
        /// Output `.cnl` file; default: stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search pin assignments with the GA.
    Optimize {
        #[command(flatten)]
        sel: Selection,
        #[command(flatten)]
        ga: GaArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Also sample N random assignments (default N: the GA's budget).
        #[arg(long, num_args = 0..=1)]
        random_baseline: Option<Option<usize>>,
    },
    /// Synthesize and map onto camouflaged cells.
    Map {
        #[command(flatten)]
        sel: Selection,
        /// Pin assignment file; default: identity.
        #[arg(long)]
        assignment: Option<PathBuf>,
        /// Map this merged gate netlist instead of synthesizing one.
        #[arg(long)]
        netlist: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check every certificate of a doping manifest.
    Verify {
        #[command(flatten)]
        sel: Selection,
        #[arg(long)]
        mapped: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Pin assignment file; default: identity.
        #[arg(long)]
        assignment: Option<PathBuf>,
    },
    /// GA, equal-budget random search, mapping and verification for a suite.
    Bench {
        /// Suite name; `--suite` is accepted too.
        suite_name: Option<String>,
        #[arg(long = "suite")]
        suite_flag: Option<String>,
        #[command(flatten)]
        ga: GaArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Random samples (default: the GA's budget).
        #[arg(long)]
        random_baseline: Option<usize>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

impl Selection {
    fn load(&self) -> Result<Vec<Sbox>> {
        if let Some(s) = &self.suite {
            if self.sboxes.is_some() || !self.names.is_empty() {
                bail!("--suite excludes --sboxes and --names");
            }
            let suite: Suite = s.parse()?;
            return Ok(suite.sboxes());
        }
        let all = match &self.sboxes {
            Some(p) => sboxes::parse_sboxes(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
            None => {
                let mut v = sboxes::bundled_present();
                v.extend(sboxes::bundled_des());
                v
            }
        };
        if self.names.is_empty() {
            if self.sboxes.is_none() {
                bail!("give --suite, or --names (with or without --sboxes)");
            }
            return Ok(all);
        }
        Ok(sboxes::select(&all, &self.names)?)
    }
}

fn split(sboxes: Vec<Sbox>) -> (Vec<TruthTable>, Vec<String>) {
    sboxes.into_iter().map(|s| (s.table, s.name)).unzip()
}

fn assignment(path: &Option<PathBuf>, functions: &[TruthTable]) -> Result<PinAssignment> {
    let (ni, no) = (functions[0].num_inputs(), functions[0].num_outputs());
    match path {
        Some(p) => Ok(PinAssignment::parse(&read(p)?, functions.len(), ni, no)
            .with_context(|| format!("parsing {}", p.display()))?),
        None => Ok(PinAssignment::identity(functions.len(), ni, no)),
    }
}

impl GaArgs {
    fn config(&self) -> Result<GaConfig> {
        let mut cfg = match &self.config {
            Some(p) => GaConfig::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
            None => GaConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool> {
    let lib = match &cli.library {
        Some(p) => CellLibrary::from_text(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => CellLibrary::default_library(),
    };
    match cli.command {
        Command::Merge { sel, assignment: a, out } => {
            let (functions, _) = split(sel.load()?);
            let a = assignment(&a, &functions)?;
            let text = build_merged(&MergedSpec::new(functions, a)?).emit();
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Optimize {
            sel,
            ga,
            out_dir,
            random_baseline,
        } => {
            let (functions, _) = split(sel.load()?);
            let cfg = ga.config()?;
            let (best, history) = run_ga(&functions, &cfg, &lib)?;
            write(&out_dir.join("assignment.txt"), &best.to_text())?;
            write(&out_dir.join("ga_history.csv"), &history.to_csv())?;
            println!("GA best {} GE after {} evaluations", history.best_area().unwrap(), history.evaluations());
            if let Some(count) = random_baseline {
                let count = count.unwrap_or_else(|| cfg.total_evaluations());
                let r = random_search(&functions, count, cfg.seed, &lib)?;
                write(&out_dir.join("random_baseline.csv"), &r.to_csv())?;
                println!("random best {} GE, mean {:.2} GE over {count} samples", r.best_area, r.mean_ge());
            }
        }
        Command::Map {
            sel,
            assignment: a,
            netlist,
            out_dir,
        } => {
            let (functions, names) = split(sel.load()?);
            let a = assignment(&a, &functions)?;
            let mapping = match netlist {
                Some(p) => {
                    let net = Netlist::parse(&read(&p)?).with_context(|| format!("parsing {}", p.display()))?;
                    map_circuit_with(&net, &lib, functions.len(), names, DummyPolicy::default())?
                }
                None => {
                    let p = run_pipeline(&functions, &names, &a, &lib)?;
                    write(&out_dir.join("synthesized.cnl"), &p.synthesized.emit())?;
                    println!("synthesized {} GE", p.report.area);
                    p.mapping
                }
            };
            write(&out_dir.join("mapped.cnl"), &mapping.netlist.emit())?;
            write(&out_dir.join("manifest.txt"), &mapping.manifest.emit(&mapping.netlist))?;
            println!("mapped {} GE, {} instances", mapping.area, mapping.netlist.instances.len());
        }
        Command::Verify {
            sel,
            mapped,
            manifest,
            assignment: a,
        } => {
            let (functions, _) = split(sel.load()?);
            let a = assignment(&a, &functions)?;
            let net = MappedNetlist::parse(&read(&mapped)?).with_context(|| format!("parsing {}", mapped.display()))?;
            let man = Manifest::parse(&read(&manifest)?, &net).with_context(|| format!("parsing {}", manifest.display()))?;
            let verdicts = verify_all(&net, &man, &functions, &a, &lib)?;
            for v in &verdicts {
                println!("{}", v.line());
            }
            return Ok(verdicts.iter().all(|v| v.pass));
        }
        Command::Bench {
            suite_name,
            suite_flag,
            ga,
            out_dir,
            random_baseline,
        } => {
            let name = match (suite_name, suite_flag) {
                (Some(a), Some(b)) if a != b => bail!("two different suites given"),
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => bail!("missing suite name"),
            };
            let suite: Suite = name.parse()?;
            let cfg = ga.config()?;
            let count = random_baseline.unwrap_or_else(|| cfg.total_evaluations());
            let out = run_bench(suite, &cfg, count, &lib)?;
            let rows = [out.row];
            let csv = BenchRow::to_csv(&rows);
            write(&out_dir.join(format!("{suite}.csv")), &csv)?;
            write(&out_dir.join(format!("{suite}_assignment.txt")), &out.best.to_text())?;
            write(&out_dir.join(format!("{suite}_ga_history.csv")), &out.history.to_csv())?;
            write(&out_dir.join(format!("{suite}_random.csv")), &out.random.to_csv())?;
            let m = &out.pipeline.mapping;
            write(&out_dir.join(format!("{suite}_mapped.cnl")), &m.netlist.emit())?;
            write(&out_dir.join(format!("{suite}_manifest.txt")), &m.manifest.emit(&m.netlist))?;
            print!("{}", BenchRow::pretty(&rows));
            for v in &out.verdicts {
                println!("{}", v.line());
            }
            return Ok(out.verdicts.iter().all(|v| v.pass));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
