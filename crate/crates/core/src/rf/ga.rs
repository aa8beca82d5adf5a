//! Goal-driven genetic search over tunable element values.
//!
//! Genomes are the natural logs of tunable element values, searched inside
//! their bounds: log encoding makes a decade of inductance and a decade of
//! capacitance the same step size. Selection is tournament-of-3, crossover
//! uniform, mutation per-gene Gaussian in log space, elitism 1.
//!
//! Determinism: every child draws from an RNG seeded by (rng_seed,
//! generation, child index), so results are identical whatever the thread
//! count or evaluation order.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rf::elements::{evaluate_chain, NetworkTopology};
use crate::rf::goals::{evaluate_goals, GoalSet};
use crate::rf::network::FrequencySweep;
use crate::seeding::{derive_seed2, rng_from_seed};
use crate::{Error, Result};

/// Mutation scale: 0.1 decades expressed in nats.
const MUTATION_SIGMA_LN: f64 = 0.23025850929940458;
const TOURNAMENT_SIZE: usize = 3;
const TAG_INIT: u64 = 0x6761_0001;
const TAG_CHILD: u64 = 0x6761_0002;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Per-child probability of crossing two parents instead of cloning one.
    pub crossover_rate: f64,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 64,
            generations: 200,
            mutation_rate: 0.3,
            crossover_rate: 0.7,
            rng_seed: 1,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::domain(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        if self.generations == 0 {
            return Err(Error::domain("generations must be at least 1"));
        }
        for (name, rate) in [
            ("mutation_rate", self.mutation_rate),
            ("crossover_rate", self.crossover_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::domain(format!("{name} must be in [0, 1], got {rate}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GaResult {
    /// Input topology with tunable values replaced by the best genome.
    pub topology: NetworkTopology,
    pub best_cost: f64,
    /// Best cost per generation; non-increasing.
    pub trace: Vec<f64>,
}

struct Problem<'a> {
    base: &'a NetworkTopology,
    tunable: Vec<usize>,
    log_bounds: Vec<(f64, f64)>,
    goals: &'a GoalSet,
    sweep: &'a FrequencySweep,
    z_ref: f64,
}

impl Problem<'_> {
    fn realize(&self, genome: &[f64]) -> NetworkTopology {
        let mut topology = self.base.clone();
        for (gene, &idx) in genome.iter().zip(&self.tunable) {
            topology.elements[idx] = topology.elements[idx].with_value(gene.exp());
        }
        topology
    }

    /// Structural failures (which would be seed-independent) rank as
    /// infinitely bad rather than aborting the search.
    fn cost(&self, genome: &[f64]) -> f64 {
        match evaluate_chain(&self.realize(genome), self.sweep, self.z_ref) {
            Ok(net) => evaluate_goals(&net, self.goals),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Searches tunable element values minimizing [`evaluate_goals`] cost.
pub fn optimize_ga(
    topology: &NetworkTopology,
    goals: &GoalSet,
    cfg: &GaConfig,
    sweep: &FrequencySweep,
    z_ref: f64,
) -> Result<GaResult> {
    cfg.validate()?;
    goals.validate_against(sweep)?;
    let tunable = topology.tunable_indices();
    if tunable.is_empty() {
        return Err(Error::domain("no tunable elements to optimize"));
    }
    // Fail fast on structural problems (bad blocks, sweep coverage).
    evaluate_chain(topology, sweep, z_ref)?;

    let log_bounds: Vec<(f64, f64)> = tunable
        .iter()
        .map(|&i| {
            let (lo, hi) = topology.elements[i].bounds().expect("tunable is passive");
            (lo.ln(), hi.ln())
        })
        .collect();
    let problem = Problem { base: topology, tunable, log_bounds, goals, sweep, z_ref };

    // Individual 0 is the incoming topology; the rest sample log-uniform.
    let n_genes = problem.tunable.len();
    let mut population: Vec<Vec<f64>> = Vec::with_capacity(cfg.population);
    let current: Vec<f64> = problem
        .tunable
        .iter()
        .map(|&i| topology.elements[i].value().expect("tunable is passive").ln())
        .collect();
    population.push(current);
    for i in 1..cfg.population {
        let mut rng = rng_from_seed(derive_seed2(cfg.rng_seed, TAG_INIT, i as u64));
        let genome = problem
            .log_bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect();
        population.push(genome);
    }

    let mut trace = Vec::with_capacity(cfg.generations);
    let mut best: (Vec<f64>, f64) = (population[0].clone(), f64::INFINITY);

    for generation in 0..cfg.generations {
        let costs: Vec<f64> = population
            .par_iter()
            .map(|genome| problem.cost(genome))
            .collect();
        let (gen_best_idx, &gen_best_cost) = costs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("costs are not NaN"))
            .expect("population is non-empty");
        if gen_best_cost < best.1 {
            best = (population[gen_best_idx].clone(), gen_best_cost);
        }
        trace.push(best.1);
        if best.1 == 0.0 {
            break;
        }

        let mut next = Vec::with_capacity(cfg.population);
        next.push(best.0.clone());
        for child in 1..cfg.population {
            let mut rng = rng_from_seed(derive_seed2(
                cfg.rng_seed,
                TAG_CHILD,
                (generation as u64) << 32 | child as u64,
            ));
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut winner = rng.gen_range(0..population.len());
                for _ in 1..TOURNAMENT_SIZE {
                    let rival = rng.gen_range(0..population.len());
                    if costs[rival] < costs[winner] {
                        winner = rival;
                    }
                }
                winner
            };
            let a = pick(&mut rng);
            let b = pick(&mut rng);
            let cross = rng.gen::<f64>() < cfg.crossover_rate;
            let mut genome: Vec<f64> = (0..n_genes)
                .map(|g| {
                    if cross && rng.gen::<bool>() {
                        population[b][g]
                    } else {
                        population[a][g]
                    }
                })
                .collect();
            for (g, gene) in genome.iter_mut().enumerate() {
                if rng.gen::<f64>() < cfg.mutation_rate {
                    let step: f64 = rng.sample(StandardNormal);
                    *gene += step * MUTATION_SIGMA_LN;
                }
                let (lo, hi) = problem.log_bounds[g];
                *gene = gene.clamp(lo, hi);
            }
            next.push(genome);
        }
        population = next;
    }

    Ok(GaResult {
        topology: problem.realize(&best.0),
        best_cost: best.1,
        trace,
    })
}
