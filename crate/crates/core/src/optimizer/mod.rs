//! Search for beam-splitter transmittances and phases that realize a target
//! pattern, and reconciliation of the published solutions.
//!
//! The search runs in two stages from each start: first minimize
//! `1 − profile fidelity`, then maximize the success probability for a
//! reference signal while penalizing fidelity below `1 − ε`. Free
//! transmittances are searched as angles, `t² = sin²θ`, and phases modulo
//! 2π, so the simplex never leaves the physical domain.

mod catalog;
mod simplex;

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::Preset;
use crate::conditioning::{
    profile_fidelity, profile_from_matrix, success_probability, DetectionPattern, TargetPattern,
    TruncationProfile,
};
use crate::fock::{Occupation, SingleModeInput};
use crate::{Error, Result};

pub use catalog::{verify_catalog, verify_entries, CatalogReport, CatalogRow, ReproStatus};
pub use simplex::{nelder_mead, SimplexResult};

/// One device parameter: searched or held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Free,
    Fixed(f64),
}

impl Param {
    pub fn is_free(&self) -> bool {
        matches!(self, Param::Free)
    }
}

/// Concrete transmittances and phases for a preset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameters {
    pub t2: Vec<f64>,
    pub xi: Vec<f64>,
}

impl Parameters {
    fn key(&self) -> impl Iterator<Item = f64> + '_ {
        self.t2.iter().chain(&self.xi).copied()
    }

    fn cmp_lex(&self, other: &Parameters) -> Ordering {
        self.key()
            .zip(other.key())
            .map(|(a, b)| a.total_cmp(&b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// Euclidean distance with phases compared on the circle.
    pub fn distance(&self, other: &Parameters) -> f64 {
        let dt: f64 = self
            .t2
            .iter()
            .zip(&other.t2)
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        let dx: f64 = self
            .xi
            .iter()
            .zip(&other.xi)
            .map(|(a, b)| {
                let d = (a - b).rem_euclid(TAU);
                d.min(TAU - d).powi(2)
            })
            .sum();
        (dt + dx).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Feasibility,
    Probability,
}

/// Penalty weight on fidelity shortfall in the probability stage.
pub const PENALTY: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    pub preset: Preset,
    pub t2: Vec<Param>,
    pub xi: Vec<Param>,
    pub ancilla: Occupation,
    pub detection: DetectionPattern,
    pub target: TargetPattern,
    /// Signal whose heralding probability is maximized in the second stage.
    pub reference_signal: SingleModeInput,
    /// Fidelity below `1 − feasibility_eps` counts as infeasible.
    pub feasibility_eps: f64,
}

impl OptimizationProblem {
    /// Every parameter free, coherent α = 1 reference, ε = 1e−9.
    pub fn new(
        preset: Preset,
        ancilla: Occupation,
        detection: DetectionPattern,
        target: TargetPattern,
    ) -> Result<Self> {
        let n = preset.arity();
        let p = OptimizationProblem {
            preset,
            t2: vec![Param::Free; n],
            xi: vec![Param::Free; n],
            ancilla,
            detection,
            target,
            reference_signal: SingleModeInput::Coherent {
                alpha: num_complex::Complex64::new(1.0, 0.0),
                cutoff: Some(20),
            },
            feasibility_eps: 1e-9,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_params(mut self, t2: Vec<Param>, xi: Vec<Param>) -> Result<Self> {
        self.t2 = t2;
        self.xi = xi;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let arity = self.preset.arity();
        for (what, list) in [("t2", &self.t2), ("xi", &self.xi)] {
            if list.len() != arity {
                return Err(Error::Arity {
                    preset: self.preset.name(),
                    what,
                    expected: arity,
                    actual: list.len(),
                });
            }
        }
        for p in &self.t2 {
            if let Param::Fixed(v) = *p {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidTransmittance(v));
                }
            }
        }
        for p in &self.xi {
            if let Param::Fixed(v) = *p {
                if !v.is_finite() {
                    return Err(Error::NonFinite(v));
                }
            }
        }
        let n = self.preset.num_modes();
        if self.ancilla.num_modes() + 1 != n || self.detection.num_modes() != n {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                actual: self.ancilla.num_modes(),
            });
        }
        if self.ancilla.total() != self.detection.total() {
            return Err(Error::SumMismatch {
                detected: self.detection.total(),
                ancilla: self.ancilla.total(),
            });
        }
        if self.target.d() as u32 != self.ancilla.total() + 1 {
            return Err(Error::TargetDimension {
                profile: self.ancilla.total() as usize + 1,
                target: self.target.d(),
            });
        }
        Ok(())
    }

    pub fn num_free(&self) -> usize {
        self.t2
            .iter()
            .chain(&self.xi)
            .filter(|p| p.is_free())
            .count()
    }

    /// Map search coordinates to device parameters.
    pub fn decode(&self, z: &[f64]) -> Parameters {
        let mut it = z.iter();
        let t2 = self
            .t2
            .iter()
            .map(|p| match *p {
                Param::Fixed(v) => v,
                Param::Free => it.next().expect("coordinate count").sin().powi(2),
            })
            .collect();
        let xi = self
            .xi
            .iter()
            .map(|p| match *p {
                Param::Fixed(v) => v,
                Param::Free => it.next().expect("coordinate count").rem_euclid(TAU),
            })
            .collect();
        Parameters { t2, xi }
    }

    /// Inverse of [`decode`](Self::decode) on the free entries.
    pub fn encode(&self, params: &Parameters) -> Vec<f64> {
        let t = self
            .t2
            .iter()
            .zip(&params.t2)
            .filter(|(p, _)| p.is_free())
            .map(|(_, &v)| v.clamp(0.0, 1.0).sqrt().asin());
        let x = self
            .xi
            .iter()
            .zip(&params.xi)
            .filter(|(p, _)| p.is_free())
            .map(|(_, &v)| v.rem_euclid(TAU));
        t.chain(x).collect()
    }

    pub fn profile(&self, params: &Parameters) -> Result<TruncationProfile> {
        let s = self.preset.build(&params.t2, &params.xi)?.compile()?;
        profile_from_matrix(&s, &self.ancilla, &self.detection)
    }

    /// Profile fidelity and reference success probability. A vanishing
    /// profile scores zero fidelity.
    pub fn evaluate(&self, params: &Parameters) -> Result<Evaluation> {
        let profile = self.profile(params)?;
        let fidelity = match profile_fidelity(&profile, &self.target) {
            Ok(f) => f,
            Err(Error::ZeroNorm) => 0.0,
            Err(e) => return Err(e),
        };
        let probability = success_probability(&profile, &self.reference_signal)?;
        Ok(Evaluation {
            fidelity,
            probability,
        })
    }

    pub fn is_feasible(&self, e: &Evaluation) -> bool {
        e.fidelity >= 1.0 - self.feasibility_eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub fidelity: f64,
    pub probability: f64,
}

/// Stage objective at a parameter point (lower is better).
pub fn objective(params: &Parameters, problem: &OptimizationProblem, stage: Stage) -> Result<f64> {
    let e = problem.evaluate(params)?;
    Ok(stage_value(&e, problem, stage))
}

fn stage_value(e: &Evaluation, problem: &OptimizationProblem, stage: Stage) -> f64 {
    match stage {
        Stage::Feasibility => 1.0 - e.fidelity,
        Stage::Probability => {
            let shortfall = ((1.0 - problem.feasibility_eps) - e.fidelity).max(0.0);
            -e.probability + PENALTY * shortfall
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    /// Simplex iterations per start and stage.
    pub max_iters: usize,
    /// Convergence threshold on the objective spread across the simplex.
    pub tol: f64,
    /// Feasible optima closer than this are reported as one cluster.
    pub cluster_radius: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            starts: 20,
            seed: 0,
            max_iters: 2000,
            tol: 1e-12,
            cluster_radius: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
}

/// Outcome of one start.
#[derive(Debug, Clone, Serialize)]
pub struct StartRecord {
    pub index: usize,
    pub initial: Evaluation,
    pub after_feasibility: Evaluation,
    /// Probability-stage optimum after being pulled back onto the constraint.
    pub after_probability: Evaluation,
    pub best: Evaluation,
    pub feasible: bool,
    pub iterations: usize,
    #[serde(skip)]
    pub params: Parameters,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub params: Parameters,
    pub fidelity: f64,
    pub probability: f64,
    pub members: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub status: Status,
    pub params: Parameters,
    pub fidelity: f64,
    pub probability: f64,
    pub seed: u64,
    pub starts: Vec<StartRecord>,
    pub clusters: Vec<Cluster>,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    /// Re-evaluate the stored parameters; returns the largest deviation
    /// from the stored fidelity and probability.
    pub fn recheck(&self, problem: &OptimizationProblem) -> Result<f64> {
        let e = problem.evaluate(&self.params)?;
        Ok((e.fidelity - self.fidelity)
            .abs()
            .max((e.probability - self.probability).abs()))
    }
}

/// Ranking used across starts: feasible beats infeasible; feasible points by
/// probability, infeasible ones by fidelity; ties by parameter order.
fn better(
    problem: &OptimizationProblem,
    a: (&Evaluation, &Parameters),
    b: (&Evaluation, &Parameters),
) -> bool {
    let (fa, fb) = (problem.is_feasible(a.0), problem.is_feasible(b.0));
    let primary = match (fa, fb) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => b.0.probability.total_cmp(&a.0.probability),
        (false, false) => b.0.fidelity.total_cmp(&a.0.fidelity),
    };
    primary.then_with(|| a.1.cmp_lex(b.1)) == Ordering::Less
}

/// Seeded, shifted Halton points over the transformed box.
struct StartSequence {
    shift: Vec<f64>,
    widths: Vec<f64>,
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

impl StartSequence {
    fn new(problem: &OptimizationProblem, seed: u64) -> Self {
        let widths: Vec<f64> = problem
            .t2
            .iter()
            .filter(|p| p.is_free())
            .map(|_| FRAC_PI_2)
            .chain(problem.xi.iter().filter(|p| p.is_free()).map(|_| TAU))
            .collect();
        assert!(widths.len() <= PRIMES.len(), "too many free parameters");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = widths.iter().map(|_| rng.random::<f64>()).collect();
        StartSequence { shift, widths }
    }

    fn point(&self, index: usize) -> Vec<f64> {
        self.widths
            .iter()
            .zip(&self.shift)
            .zip(PRIMES)
            .map(|((w, s), p)| ((radical_inverse(index as u64 + 1, p) + s) % 1.0) * w)
            .collect()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn run_start(
    problem: &OptimizationProblem,
    config: &OptimizerConfig,
    index: usize,
    z0: Vec<f64>,
) -> Result<StartRecord> {
    let eval_z = |z: &[f64]| -> Result<(Evaluation, Parameters)> {
        let p = problem.decode(z);
        Ok((problem.evaluate(&p)?, p))
    };
    let f_stage = |stage: Stage| {
        move |z: &[f64]| match eval_z(z) {
            Ok((e, _)) => stage_value(&e, problem, stage),
            Err(_) => f64::INFINITY,
        }
    };
    let steps: Vec<f64> = problem
        .t2
        .iter()
        .filter(|p| p.is_free())
        .map(|_| 0.15)
        .chain(problem.xi.iter().filter(|p| p.is_free()).map(|_| 0.6))
        .collect();

    let (initial, p0) = eval_z(&z0)?;
    let s1 = nelder_mead(
        f_stage(Stage::Feasibility),
        &z0,
        &steps,
        config.max_iters,
        config.tol,
    );
    let (after_feasibility, p1) = eval_z(&s1.x)?;

    // probability stage starts from whichever point it already rates higher
    let z2_init = if stage_value(&initial, problem, Stage::Probability)
        < stage_value(&after_feasibility, problem, Stage::Probability)
    {
        z0.clone()
    } else {
        s1.x.clone()
    };
    let s2 = nelder_mead(
        f_stage(Stage::Probability),
        &z2_init,
        &steps,
        config.max_iters,
        config.tol,
    );
    // the penalty leaves the optimum slightly outside `1 − ε`; pull it back
    // onto the constraint so only the projected point is ranked
    let small: Vec<f64> = steps.iter().map(|s| s * 1e-2).collect();
    let s3 = nelder_mead(
        f_stage(Stage::Feasibility),
        &s2.x,
        &small,
        config.max_iters / 4,
        config.tol,
    );
    let (after_probability, p2) = eval_z(&s3.x)?;
    let iterations = s1.iterations + s2.iterations + s3.iterations;

    let candidates = vec![
        (initial, p0),
        (after_feasibility, p1),
        (after_probability, p2),
    ];
    let (best, params) = candidates
        .into_iter()
        .reduce(|a, b| {
            if better(problem, (&b.0, &b.1), (&a.0, &a.1)) {
                b
            } else {
                a
            }
        })
        .expect("non-empty");
    Ok(StartRecord {
        index,
        initial,
        after_feasibility,
        after_probability,
        feasible: problem.is_feasible(&best),
        best,
        iterations,
        params,
    })
}

/// Multi-start two-stage search. An infeasible outcome is reported through
/// [`Solution::status`], not as an error.
pub fn optimize(problem: &OptimizationProblem, config: &OptimizerConfig) -> Result<Solution> {
    problem.validate()?;
    if config.starts == 0 {
        return Err(Error::InvalidTarget("at least one start required".into()));
    }
    let starts: Vec<StartRecord> = if problem.num_free() == 0 {
        let params = problem.decode(&[]);
        let e = problem.evaluate(&params)?;
        vec![StartRecord {
            index: 0,
            initial: e,
            after_feasibility: e,
            after_probability: e,
            best: e,
            feasible: problem.is_feasible(&e),
            iterations: 0,
            params,
        }]
    } else {
        let seq = StartSequence::new(problem, config.seed);
        (0..config.starts)
            .into_par_iter()
            .map(|i| run_start(problem, config, i, seq.point(i)))
            .collect::<Result<Vec<_>>>()?
    };

    let best = starts
        .iter()
        .reduce(|a, b| {
            if better(problem, (&b.best, &b.params), (&a.best, &a.params)) {
                b
            } else {
                a
            }
        })
        .expect("non-empty");

    Ok(Solution {
        status: if best.feasible {
            Status::Feasible
        } else {
            Status::Infeasible
        },
        params: best.params.clone(),
        fidelity: best.best.fidelity,
        probability: best.best.probability,
        seed: config.seed,
        clusters: cluster(&starts, config.cluster_radius),
        starts,
    })
}

fn cluster(starts: &[StartRecord], radius: f64) -> Vec<Cluster> {
    let mut feasible: Vec<&StartRecord> = starts.iter().filter(|s| s.feasible).collect();
    feasible.sort_by(|a, b| a.params.cmp_lex(&b.params).then(a.index.cmp(&b.index)));
    let mut clusters: Vec<Cluster> = Vec::new();
    for s in feasible {
        match clusters
            .iter_mut()
            .find(|c| c.params.distance(&s.params) <= radius)
        {
            Some(c) => c.members += 1,
            None => clusters.push(Cluster {
                params: s.params.clone(),
                fidelity: s.best.fidelity,
                probability: s.best.probability,
                members: 1,
            }),
        }
    }
    clusters
}

/// Wrap a phase into `(−π, π]`, for comparisons.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}
