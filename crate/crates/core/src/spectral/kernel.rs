//! Spectral coefficients, `v` kernels, and the space-time correlation kernel.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::det;
use crate::error::{Error, Result};
use crate::geometry::{section_domain, section_states, BoxDims};
use crate::matrices::{ln_rho, transition_prob, Direction, DENSE_ROW_LIMIT};
use crate::shuffle::MarkovPlan;
use crate::spectral::hahn::HahnBasis;

fn coeff(p: i64, q: i64, i: usize) -> f64 {
    let i = i as f64;
    ((1.0 - i / p as f64) * (1.0 - i / q as f64)).max(0.0).sqrt()
}

/// `c_{t+}` at time `time`; it does not depend on `S`.
fn c_time_up(n: i64, big_t: i64, time: i64, i: usize) -> f64 {
    coeff(time + n, big_t + n - time - 1, i)
}

/// `c_{S+}` at shift `s`; it does not depend on `t`.
fn c_shift_up(n: i64, big_t: i64, s: i64, i: usize) -> f64 {
    coeff(s + n, big_t + n - s - 1, i)
}

/// Eigenvalue `c^{S,t}_{dir}(i)` of the single-particle kernel.
///
/// `c_{t-}^{S,t} = c_{t+}^{S,t-1}` and `c_{S-}^{S,t} = c_{S+}^{S-1,t}`.
pub fn spectral_coeff(dims: BoxDims, time: i64, dir: Direction, i: usize) -> Result<f64> {
    dir.target(dims, time)?;
    let size = section_domain(dims, time)?.len();
    if i >= size {
        return Err(Error::Domain(format!(
            "coefficient index {i} outside a basis of size {size}"
        )));
    }
    let BoxDims { n, t, s } = dims;
    Ok(match dir {
        Direction::TimeUp => c_time_up(n, t, time, i),
        Direction::TimeDown => c_time_up(n, t, time - 1, i),
        Direction::ShiftUp => c_shift_up(n, t, s, i),
        Direction::ShiftDown => c_shift_up(n, t, s - 1, i),
    })
}

/// `v(x, y) = sum_i c(i) Psi_i^{src}(x) Psi_i^{tgt}(y)`.
pub fn v_kernel(coeffs: &[f64], src: &HahnBasis, tgt: &HahnBasis, x: i64, y: i64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * src.psi(i, x) * tgt.psi(i, y))
        .sum()
}

/// Worst gap between `P_{dir}` and
/// `sqrt(rho_tgt(Y) / rho_src(X)) det[v(x_i, y_j)] / prod_{i<N} c(i)`
/// over all pairs of states.
pub fn verify_spectral(dims: BoxDims, time: i64, dir: Direction) -> Result<f64> {
    let (tdims, ttime) = dir.target(dims, time)?;
    let src_states = section_states(dims, time)?;
    let dst_states = section_states(tdims, ttime)?;
    if src_states.len() > DENSE_ROW_LIMIT || dst_states.len() > DENSE_ROW_LIMIT {
        return Err(Error::TooLarge {
            rows: src_states.len().max(dst_states.len()),
            limit: DENSE_ROW_LIMIT,
        });
    }
    let src = HahnBasis::new(dims, time)?;
    let tgt = HahnBasis::new(tdims, ttime)?;
    let rank = src.size().min(tgt.size());
    let coeffs = (0..rank)
        .map(|i| spectral_coeff(dims, time, dir, i))
        .collect::<Result<Vec<f64>>>()?;
    let denom: f64 = coeffs[..dims.n as usize].iter().product();
    let mut worst: f64 = 0.0;
    for xs in &src_states {
        let lrx = ln_rho(dims, time, xs)?;
        for ys in &dst_states {
            let m: Vec<Vec<f64>> = xs
                .iter()
                .map(|&x| ys.iter().map(|&y| v_kernel(&coeffs, &src, &tgt, x, y)).collect())
                .collect();
            let spectral = (0.5 * (ln_rho(tdims, ttime, ys)? - lrx)).exp() * det(&m) / denom;
            let direct = transition_prob(dims, time, dir, xs, ys)?;
            worst = worst.max((spectral - direct).abs());
        }
    }
    Ok(worst)
}

/// A site `(r, t, x)` of the space-time point process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub r: usize,
    pub t: i64,
    pub x: i64,
}

impl SpaceTimePoint {
    pub fn new(r: usize, t: i64, x: i64) -> Self {
        SpaceTimePoint { r, t, x }
    }
}

/// Staircase of `(r, t)` pairs: `r` nondecreasing, `t` nonincreasing, unit steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleSection(Vec<(usize, i64)>);

impl AdmissibleSection {
    pub fn new(steps: Vec<(usize, i64)>) -> Result<Self> {
        for w in steps.windows(2) {
            let ((r0, t0), (r1, t1)) = (w[0], w[1]);
            let ok = (r1 == r0 + 1 && t1 == t0) || (r1 == r0 && t1 + 1 == t0);
            if !ok {
                return Err(Error::Unsupported(format!(
                    "({r0}, {t0}) -> ({r1}, {t1}) is not an admissible step"
                )));
            }
        }
        Ok(AdmissibleSection(steps))
    }

    pub fn steps(&self) -> &[(usize, i64)] {
        &self.0
    }

    /// Whether every `(r, t)` of `points` lies on the staircase.
    pub fn covers(&self, points: &[SpaceTimePoint]) -> bool {
        points.iter().all(|p| self.0.contains(&(p.r, p.t)))
    }
}

/// Evaluates the correlation kernel of the dynamics `plan`, caching bases.
#[derive(Debug, Clone)]
pub struct SpaceTimeKernel {
    plan: MarkovPlan,
    bases: HashMap<(i64, i64), HahnBasis>,
}

impl SpaceTimeKernel {
    pub fn new(plan: MarkovPlan) -> Self {
        SpaceTimeKernel {
            plan,
            bases: HashMap::new(),
        }
    }

    pub fn plan(&self) -> &MarkovPlan {
        &self.plan
    }

    fn check_point(&self, q: SpaceTimePoint) -> Result<BoxDims> {
        if q.r > self.plan.len() || q.t < 0 || q.t > self.plan.t() {
            return Err(Error::Domain(format!(
                "point (r={}, t={}) outside a plan with {} steps and T={}",
                q.r,
                q.t,
                self.plan.len(),
                self.plan.t()
            )));
        }
        self.plan.dims_at(q.r)
    }

    fn ensure_basis(&mut self, s: i64, t: i64) -> Result<()> {
        if !self.bases.contains_key(&(s, t)) {
            let dims = BoxDims::new(self.plan.n(), self.plan.t(), s)?;
            self.bases.insert((s, t), HahnBasis::new(dims, t)?);
        }
        Ok(())
    }

    fn section_len(&self, s: i64, t: i64) -> usize {
        let dims = BoxDims {
            n: self.plan.n(),
            t: self.plan.t(),
            s,
        };
        section_domain(dims, t).map_or(0, |d| d.len())
    }

    /// `c_i^{r,t;r',t'}` for `r <= r'`, `t >= t'`, together with the
    /// smallest section size on the rectangle spanned by the two points.
    fn c_path(&self, from: (usize, i64), to: (usize, i64)) -> (Vec<f64>, usize) {
        let (r, t) = from;
        let (r2, t2) = to;
        let (n, big_t) = (self.plan.n(), self.plan.t());
        let mut rank = usize::MAX;
        for k in t2..=t {
            rank = rank
                .min(self.section_len(self.plan.s_at(r), k))
                .min(self.section_len(self.plan.s_at(r2), k));
        }
        for k in r..=r2 {
            let s = self.plan.s_at(k);
            rank = rank.min(self.section_len(s, t)).min(self.section_len(s, t2));
        }
        let c = (0..rank)
            .map(|i| {
                let mut acc = 1.0;
                for k in t2 + 1..=t {
                    acc *= c_time_up(n, big_t, k - 1, i);
                }
                for k in r..r2 {
                    let s = self.plan.s_at(k);
                    acc *= match self.plan.eps()[k] {
                        1 => c_shift_up(n, big_t, s, i),
                        _ => c_shift_up(n, big_t, s - 1, i),
                    };
                }
                acc
            })
            .collect();
        (c, rank)
    }

    /// `K(q, q')`.
    pub fn kernel(&mut self, q: SpaceTimePoint, q2: SpaceTimePoint) -> Result<f64> {
        let d1 = self.check_point(q)?;
        let d2 = self.check_point(q2)?;
        let n = self.plan.n() as usize;
        self.ensure_basis(d1.s, q.t)?;
        self.ensure_basis(d2.s, q2.t)?;
        let b1 = &self.bases[&(d1.s, q.t)];
        let b2 = &self.bases[&(d2.s, q2.t)];
        if !b1.domain().contains(q.x) || !b2.domain().contains(q2.x) {
            return Ok(0.0);
        }
        if q.r >= q2.r && q.t <= q2.t {
            let (c, _) = self.c_path((q2.r, q2.t), (q.r, q.t));
            let mut acc = 0.0;
            for (i, ci) in c.iter().enumerate().take(n) {
                if *ci == 0.0 {
                    return Err(Error::SingularPair {
                        index: i,
                        from: format!("(r={}, t={})", q2.r, q2.t),
                        to: format!("(r={}, t={})", q.r, q.t),
                    });
                }
                acc += b1.psi(i, q.x) * b2.psi(i, q2.x) / ci;
            }
            Ok(acc)
        } else if (q.r < q2.r && q.t >= q2.t) || (q.r == q2.r && q.t > q2.t) {
            let (c, rank) = self.c_path((q.r, q.t), (q2.r, q2.t));
            let acc: f64 = (n..rank).map(|i| c[i] * b1.psi(i, q.x) * b2.psi(i, q2.x)).sum();
            Ok(-acc)
        } else {
            Err(Error::Unsupported(format!(
                "pair (r={}, t={}) and (r={}, t={}) is not on an admissible section",
                q.r, q.t, q2.r, q2.t
            )))
        }
    }

    /// `R_n` as the determinant of the kernel matrix.
    pub fn correlation(&mut self, points: &[SpaceTimePoint]) -> Result<f64> {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.r.cmp(&b.r).then(b.t.cmp(&a.t)));
        if pts.windows(2).any(|w| w[1].t > w[0].t) {
            return Err(Error::Unsupported(
                "points cannot be ordered with r nondecreasing and t nonincreasing".into(),
            ));
        }
        for &p in &pts {
            let d = self.check_point(p)?;
            if !section_domain(d, p.t)?.contains(p.x) {
                return Ok(0.0);
            }
        }
        let mut m = vec![vec![0.0; pts.len()]; pts.len()];
        for (i, &p) in pts.iter().enumerate() {
            for (j, &q) in pts.iter().enumerate() {
                m[i][j] = self.kernel(p, q)?;
            }
        }
        Ok(det(&m))
    }
}

/// `R_n(points)` for the dynamics `plan`.
pub fn correlation(plan: &MarkovPlan, points: &[SpaceTimePoint]) -> Result<f64> {
    SpaceTimeKernel::new(plan.clone()).correlation(points)
}

/// `K(q, q')` for the dynamics `plan`.
pub fn kernel(plan: &MarkovPlan, q: SpaceTimePoint, q2: SpaceTimePoint) -> Result<f64> {
    SpaceTimeKernel::new(plan.clone()).kernel(q, q2)
}
