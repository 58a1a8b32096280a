//! Genetic search over pin assignments, and the random-sampling baseline.
//!
//! Randomness comes from one ChaCha8 stream per generation derived from
//! the master seed (stream 0 seeds the initial population; random search
//! draws from its own last stream, so the baseline shares no samples with
//! the GA). Fitness evaluation runs on the rayon pool
//! but results are consumed in index order, so the outcome does not depend
//! on the number of threads.

mod assignment;
mod operators;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use assignment::{AssignmentError, PinAssignment};
pub use operators::{crossover, mutate, pmx};

use crate::boolfunc::TruthTable;
use crate::celllib::{Area, CellLibrary};
use crate::merge::{MergeError, MergedSpec};
use crate::synth::synth_area;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// Best individuals copied unchanged into the next generation.
    pub elitism: usize,
    pub seed: u64,
    /// Stop once this many individuals have been evaluated, possibly in
    /// the middle of a generation.
    pub budget_individuals: Option<usize>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 100,
            generations: 97,
            tournament_size: 5,
            crossover_prob: 0.8,
            mutation_prob: 0.2,
            elitism: 1,
            seed: 1,
            budget_individuals: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if self.generations < 1 {
            return bad("generations must be at least 1");
        }
        if self.tournament_size < 1 {
            return bad("tournament_size must be at least 1");
        }
        if self.elitism >= self.population {
            return bad("elitism must be smaller than the population");
        }
        for p in [self.crossover_prob, self.mutation_prob] {
            if !(0.0..=1.0).contains(&p) {
                return bad("probabilities must lie in [0, 1]");
            }
        }
        if self.budget_individuals == Some(0) {
            return bad("budget_individuals must be positive");
        }
        Ok(())
    }

    /// Individuals evaluated by a full run.
    pub fn total_evaluations(&self) -> usize {
        let full = self.population * self.generations;
        self.budget_individuals.map_or(full, |b| b.min(full))
    }

    /// `key = value` lines; `#` comments. Missing keys keep defaults.
    pub fn parse(text: &str) -> Result<GaConfig, ConfigError> {
        let mut cfg = GaConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap().trim();
            if body.is_empty() {
                continue;
            }
            let syntax = |msg: String| ConfigError::Syntax { line, msg };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| syntax("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: FromStr>(v: &str, line: usize) -> Result<T, ConfigError> {
                v.parse().map_err(|_| ConfigError::Syntax {
                    line,
                    msg: format!("bad value {v:?}"),
                })
            }
            match key {
                "population" => cfg.population = num(value, line)?,
                "generations" => cfg.generations = num(value, line)?,
                "tournament_size" => cfg.tournament_size = num(value, line)?,
                "crossover_prob" => cfg.crossover_prob = num(value, line)?,
                "mutation_prob" => cfg.mutation_prob = num(value, line)?,
                "elitism" => cfg.elitism = num(value, line)?,
                "seed" => cfg.seed = num(value, line)?,
                "budget_individuals" => {
                    cfg.budget_individuals = match value {
                        "none" | "" => None,
                        v => Some(num(v, line)?),
                    }
                }
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "population = {}", self.population);
        let _ = writeln!(s, "generations = {}", self.generations);
        let _ = writeln!(s, "tournament_size = {}", self.tournament_size);
        let _ = writeln!(s, "crossover_prob = {}", self.crossover_prob);
        let _ = writeln!(s, "mutation_prob = {}", self.mutation_prob);
        let _ = writeln!(s, "elitism = {}", self.elitism);
        let _ = writeln!(s, "seed = {}", self.seed);
        match self.budget_individuals {
            Some(b) => {
                let _ = writeln!(s, "budget_individuals = {b}");
            }
            None => s.push_str("budget_individuals = none\n"),
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best area seen so far.
    pub best: Area,
    /// Mean area of this generation, rounded to hundredths of a GE.
    pub mean: Area,
    /// Individuals evaluated so far, cache hits included.
    pub evals: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GaHistory {
    pub generations: Vec<GenerationStats>,
}

impl GaHistory {
    pub fn best_area(&self) -> Option<Area> {
        self.generations.last().map(|g| g.best)
    }

    pub fn evaluations(&self) -> usize {
        self.generations.last().map_or(0, |g| g.evals)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("generation,best_ge,mean_ge,evals\n");
        for g in &self.generations {
            let _ = writeln!(s, "{},{},{},{}", g.generation, g.best, g.mean, g.evals);
        }
        s
    }
}

/// Outcome of [`random_search`]: the best sample and every sampled area in
/// draw order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSearch {
    pub best: PinAssignment,
    pub best_area: Area,
    pub areas: Vec<Area>,
}

impl RandomSearch {
    pub fn mean_ge(&self) -> f64 {
        self.areas.iter().map(|&a| a.ge()).sum::<f64>() / self.areas.len() as f64
    }

    /// `sample,area_ge` per evaluation.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("sample,area_ge\n");
        for (i, a) in self.areas.iter().enumerate() {
            let _ = writeln!(s, "{i},{a}");
        }
        s
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const RANDOM_STREAM: u64 = u64::MAX;

fn shape(functions: &[TruthTable]) -> Result<(usize, usize, usize), MergeError> {
    // MergedSpec does the arity checks
    let spec = MergedSpec::identity(functions.to_vec())?;
    Ok((spec.num_functions(), spec.num_inputs(), spec.num_outputs()))
}

/// GA with synthesized merged area as fitness.
pub fn run_ga(
    functions: &[TruthTable],
    cfg: &GaConfig,
    lib: &CellLibrary,
) -> Result<(PinAssignment, GaHistory), MergeError> {
    let (n, ni, no) = shape(functions)?;
    let fitness = |g: &PinAssignment| synth_area(functions, g, lib).expect("shape checked");
    Ok(run_ga_with(n, ni, no, cfg, &fitness))
}

/// GA over assignments of the given shape with an arbitrary pure fitness
/// (lower is better).
pub fn run_ga_with(
    num_functions: usize,
    num_inputs: usize,
    num_outputs: usize,
    cfg: &GaConfig,
    fitness: &(dyn Fn(&PinAssignment) -> Area + Sync),
) -> (PinAssignment, GaHistory) {
    cfg.validate().expect("invalid GA configuration");
    let budget = cfg.total_evaluations();
    let mut cache: HashMap<PinAssignment, Area> = HashMap::new();
    let mut history = GaHistory::default();
    let mut evals = 0usize;
    let mut best: Option<(Area, PinAssignment)> = None;

    let mut rng = stream(cfg.seed, 0);
    let mut pop: Vec<PinAssignment> = (0..cfg.population)
        .map(|_| PinAssignment::random(num_functions, num_inputs, num_outputs, &mut rng))
        .collect();

    for generation in 0..cfg.generations {
        pop.truncate(budget - evals);
        let scores = evaluate(&pop, &mut cache, fitness);
        evals += pop.len();
        for (g, &s) in pop.iter().zip(&scores) {
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, g.clone()));
            }
        }
        let mean = scores.iter().map(|a| a.0 as u64).sum::<u64>() as f64 / scores.len() as f64;
        history.generations.push(GenerationStats {
            generation,
            best: best.as_ref().unwrap().0,
            mean: Area(mean.round() as u32),
            evals,
        });
        if evals >= budget || generation + 1 == cfg.generations {
            break;
        }
        let mut rng = stream(cfg.seed, generation as u64 + 1);
        pop = next_generation(&pop, &scores, cfg, &cache, &mut rng);
    }
    let (_, g) = best.expect("at least one evaluation");
    (g, history)
}

fn evaluate(
    pop: &[PinAssignment],
    cache: &mut HashMap<PinAssignment, Area>,
    fitness: &(dyn Fn(&PinAssignment) -> Area + Sync),
) -> Vec<Area> {
    let mut fresh: Vec<&PinAssignment> = Vec::new();
    for g in pop {
        if !cache.contains_key(g) && !fresh.contains(&g) {
            fresh.push(g);
        }
    }
    let scores: Vec<Area> = fresh.par_iter().map(|g| fitness(g)).collect();
    for (g, s) in fresh.into_iter().zip(scores) {
        cache.insert(g.clone(), s);
    }
    pop.iter().map(|g| cache[g]).collect()
}

fn tournament<R: Rng>(scores: &[Area], size: usize, rng: &mut R) -> usize {
    let mut win = rng.gen_range(0..scores.len());
    for _ in 1..size {
        let c = rng.gen_range(0..scores.len());
        if (scores[c], c) < (scores[win], win) {
            win = c;
        }
    }
    win
}

fn next_generation<R: Rng>(
    pop: &[PinAssignment],
    scores: &[Area],
    cfg: &GaConfig,
    seen: &HashMap<PinAssignment, Area>,
    rng: &mut R,
) -> Vec<PinAssignment> {
    let mut ranked: Vec<usize> = (0..pop.len()).collect();
    ranked.sort_by_key(|&i| (scores[i], i));
    let mut next: Vec<PinAssignment> = ranked
        .iter()
        .take(cfg.elitism)
        .map(|&i| pop[i].clone())
        .collect();
    while next.len() < cfg.population {
        let a = &pop[tournament(scores, cfg.tournament_size, rng)];
        let b = &pop[tournament(scores, cfg.tournament_size, rng)];
        let (mut c1, mut c2) = if rng.gen_bool(cfg.crossover_prob) {
            crossover(a, b, rng)
        } else {
            (a.clone(), b.clone())
        };
        for c in [&mut c1, &mut c2] {
            if rng.gen_bool(cfg.mutation_prob) {
                mutate(c, rng);
            }
        }
        for c in [c1, c2] {
            if next.len() < cfg.population {
                let c = diversify(c, &next, seen, rng);
                next.push(c);
            }
        }
    }
    next
}

/// A child that was already evaluated, or already sits in the generation
/// being built, is mutated again (a bounded number of times) so the budget
/// goes to new genotypes.
fn diversify<R: Rng>(
    mut c: PinAssignment,
    next: &[PinAssignment],
    seen: &HashMap<PinAssignment, Area>,
    rng: &mut R,
) -> PinAssignment {
    for _ in 0..8 {
        if !seen.contains_key(&c) && !next.contains(&c) {
            break;
        }
        mutate(&mut c, rng);
    }
    c
}

/// Evaluates `count` uniformly random assignments drawn from a stream of
/// `seed` that the GA never uses.
pub fn random_search(
    functions: &[TruthTable],
    count: usize,
    seed: u64,
    lib: &CellLibrary,
) -> Result<RandomSearch, MergeError> {
    let (n, ni, no) = shape(functions)?;
    let fitness = |g: &PinAssignment| synth_area(functions, g, lib).expect("shape checked");
    Ok(random_search_with(n, ni, no, count, seed, &fitness))
}

pub fn random_search_with(
    num_functions: usize,
    num_inputs: usize,
    num_outputs: usize,
    count: usize,
    seed: u64,
    fitness: &(dyn Fn(&PinAssignment) -> Area + Sync),
) -> RandomSearch {
    assert!(count >= 1, "random search needs at least one sample");
    let mut rng = stream(seed, RANDOM_STREAM);
    let samples: Vec<PinAssignment> = (0..count)
        .map(|_| PinAssignment::random(num_functions, num_inputs, num_outputs, &mut rng))
        .collect();
    let areas: Vec<Area> = samples.par_iter().map(fitness).collect();
    let best_idx = (0..count).min_by_key(|&i| (areas[i], i)).unwrap();
    RandomSearch {
        best: samples[best_idx].clone(),
        best_area: areas[best_idx],
        areas,
    }
}
