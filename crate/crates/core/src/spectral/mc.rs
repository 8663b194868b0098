//! Monte Carlo occupation estimates over simulated trajectories.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PathFamily;
use crate::shuffle::{rng_from_seed, run_chain, sample_uniform, MarkovPlan};
use crate::spectral::kernel::SpaceTimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
}

impl McEstimate {
    fn from_counts(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        McEstimate {
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            hits,
            trials,
        }
    }
}

/// Per-step lists of `(configuration, t, x)` to test.
struct Probe {
    by_r: Vec<Vec<(usize, usize, i64)>>,
}

impl Probe {
    fn new(plan: &MarkovPlan, configs: &[Vec<SpaceTimePoint>]) -> Result<Self> {
        let mut by_r = vec![Vec::new(); plan.len() + 1];
        for (c, pts) in configs.iter().enumerate() {
            for p in pts {
                if p.r > plan.len() || p.t < 0 || p.t > plan.t() {
                    return Err(Error::Domain(format!(
                        "point (r={}, t={}) outside the plan",
                        p.r, p.t
                    )));
                }
                by_r[p.r].push((c, p.t as usize, p.x));
            }
        }
        Ok(Probe { by_r })
    }

    fn run<R: Rng + ?Sized>(&self, plan: &MarkovPlan, trials: u64, hits: &mut [u64], rng: &mut R) -> Result<()> {
        let start_dims = plan.dims_at(0)?;
        let mut alive = vec![true; hits.len()];
        for _ in 0..trials {
            alive.iter_mut().for_each(|a| *a = true);
            let start = sample_uniform(start_dims, rng)?;
            let mut watch = |r: usize, pf: &PathFamily| -> Result<()> {
                for &(c, t, x) in &self.by_r[r] {
                    if alive[c] && pf.section(t).binary_search(&x).is_err() {
                        alive[c] = false;
                    }
                }
                Ok(())
            };
            run_chain(plan, start, rng, &mut [&mut watch])?;
            for (h, a) in hits.iter_mut().zip(&alive) {
                *h += u64::from(*a);
            }
        }
        Ok(())
    }
}

/// Fraction of trajectories occupying every point of each configuration.
/// All configurations share the same trajectories, started from the
/// uniform measure at `S0`.
pub fn mc_correlations<R: Rng + ?Sized>(
    plan: &MarkovPlan,
    configs: &[Vec<SpaceTimePoint>],
    trials: u64,
    rng: &mut R,
) -> Result<Vec<McEstimate>> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let probe = Probe::new(plan, configs)?;
    let mut hits = vec![0u64; configs.len()];
    probe.run(plan, trials, &mut hits, rng)?;
    Ok(hits.into_iter().map(|h| McEstimate::from_counts(h, trials)).collect())
}

pub fn mc_correlation<R: Rng + ?Sized>(
    plan: &MarkovPlan,
    points: &[SpaceTimePoint],
    trials: u64,
    rng: &mut R,
) -> Result<McEstimate> {
    Ok(mc_correlations(plan, &[points.to_vec()], trials, rng)?[0])
}

/// [`mc_correlations`] split over `jobs` threads; job `j` uses ChaCha
/// stream `j` of `seed`. Results depend on `(seed, jobs)` only.
pub fn mc_correlations_parallel(
    plan: &MarkovPlan,
    configs: &[Vec<SpaceTimePoint>],
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<Vec<McEstimate>> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let jobs = jobs.max(1) as u64;
    let probe = Probe::new(plan, configs)?;
    let parts: Vec<Result<Vec<u64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let probe = &probe;
                let share = trials / jobs + u64::from(j < trials % jobs);
                scope.spawn(move || {
                    let mut rng: ChaCha8Rng = rng_from_seed(seed);
                    rng.set_stream(j);
                    let mut hits = vec![0u64; configs.len()];
                    probe.run(plan, share, &mut hits, &mut rng).map(|_| hits)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("monte carlo worker panicked"))
            .collect()
    });
    let mut hits = vec![0u64; configs.len()];
    for part in parts {
        for (h, p) in hits.iter_mut().zip(part?) {
            *h += p;
        }
    }
    Ok(hits.into_iter().map(|h| McEstimate::from_counts(h, trials)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_corner_is_always_occupied() {
        let plan = MarkovPlan::alternate(3, 6, 3, 2).unwrap();
        let est = mc_correlation(&plan, &[SpaceTimePoint::new(0, 0, 0)], 50, &mut rng_from_seed(1)).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn parallel_split_is_reproducible() {
        let plan = MarkovPlan::alternate(2, 4, 2, 2).unwrap();
        let cfg = vec![vec![SpaceTimePoint::new(1, 2, 2)]];
        let a = mc_correlations_parallel(&plan, &cfg, 1000, 9, 3).unwrap();
        let b = mc_correlations_parallel(&plan, &cfg, 1000, 9, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].trials, 1000);
    }
}
