//! The `S -> S+1` and `S -> S-1` shuffling steps.
//!
//! A step rewrites the family section by section, `t = 0, ..., T-1`,
//! building `Y(t+1)` from the new `Y(t)` and the old `X(t+1)`. Indices
//! whose move is forced are set directly; the rest fall into blocks of
//! consecutive coordinates, each split by one draw from the split law.
//! Randomness is consumed block by block in increasing `k` within a
//! section, and section by section in increasing `t`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_section_state, BoxDims, PathFamily};
use crate::shuffle::split::SplitDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepDirection {
    Up,
    Down,
}

impl StepDirection {
    pub fn from_sign(eps: i8) -> Result<Self> {
        match eps {
            1 => Ok(StepDirection::Up),
            -1 => Ok(StepDirection::Down),
            other => Err(Error::InvalidPlan(format!("step must be +1 or -1, got {other}"))),
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            StepDirection::Up => 1,
            StepDirection::Down => -1,
        }
    }

    /// Box reached from `dims`, if the step is allowed there.
    pub fn target(self, dims: BoxDims) -> Result<BoxDims> {
        let s = dims.s + self.sign();
        if s < 0 || s > dims.t {
            return Err(Error::Domain(format!(
                "cannot step {self:?} from S={} with T={}",
                dims.s, dims.t
            )));
        }
        dims.with_shift(s)
    }
}

/// One maximal run of indices sharing the undecided case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    /// First index of the run.
    pub start: usize,
    /// Smallest coordinate `x` in the run.
    pub k: i64,
    pub len: usize,
}

/// Split law of a block during an update at time `t` (building `Y(t+1)`)
/// of a step leaving `dims`.
///
/// Up: the outcome is the number of points keeping `z = x`; the rest move to `x + 1`.
/// Down: the outcome is the number of points taking `z = x`; they are the
/// top of the block, the rest take `z = x - 1`.
pub fn block_law(dims: BoxDims, dir: StepDirection, t: i64, k: i64, l: usize) -> Result<SplitDistribution> {
    let BoxDims { n, t: big_t, s } = dims;
    let (a, b) = match dir {
        StepDirection::Up => (k + big_t - t - s - 1, k + 1),
        StepDirection::Down => (n + s - k - l as i64, n + t + 2 - k - l as i64),
    };
    debug_assert!(b >= 1, "split law with b={b} for block k={k}, l={l}");
    SplitDistribution::new(a, b, l)
}

/// Offset `x - y` marking the undecided case.
fn block_offset(dir: StepDirection) -> i64 {
    match dir {
        StepDirection::Up => 0,
        StepDirection::Down => 1,
    }
}

/// Blocks of one update; `Err` if some `x_i - y_i` is impossible.
pub fn blocks(dir: StepDirection, ys: &[i64], xs: &[i64]) -> Result<Vec<Block>> {
    let mut out = Vec::new();
    for_each_block(dir, ys, xs, |b| out.push(b))?;
    Ok(out)
}

fn for_each_block(
    dir: StepDirection,
    ys: &[i64],
    xs: &[i64],
    mut f: impl FnMut(Block),
) -> Result<()> {
    let off = block_offset(dir);
    let n = xs.len();
    let mut i = 0;
    while i < n {
        let d = xs[i] - ys[i];
        if d - off == 0 {
            let mut j = i + 1;
            while j < n && xs[j] - ys[j] == off && xs[j] == xs[j - 1] + 1 {
                j += 1;
            }
            f(Block {
                start: i,
                k: xs[i],
                len: j - i,
            });
            i = j;
        } else if (d - off).abs() == 1 {
            i += 1;
        } else {
            return Err(Error::Inconsistent(format!(
                "x - y = {d} at index {i} during a {dir:?} step"
            )));
        }
    }
    Ok(())
}

/// Buffers reused across updates.
#[derive(Debug, Default, Clone)]
struct Scratch {
    weights: Vec<f64>,
    starts: Vec<usize>,
    ends: Vec<usize>,
    /// Difference array of the block shifts; all zero between updates.
    shift: Vec<i64>,
}

/// Writes `Y(t+1)` over `xs`, given `Y(t) = ys`.
///
/// One branch-free pass applies the forced moves and records block bounds;
/// blocks are then split in increasing order of `k`.
fn update<R: Rng + ?Sized>(
    dims: BoxDims,
    dir: StepDirection,
    t: i64,
    ys: &[i64],
    xs: &mut [i64],
    rng: &mut R,
    scratch: &mut Scratch,
) -> Result<()> {
    let off = block_offset(dir);
    let n = xs.len();
    let Scratch { weights, starts, ends, shift } = scratch;
    if starts.len() <= n {
        starts.resize(n + 1, 0);
        ends.resize(n + 1, 0);
        shift.resize(n + 1, 0);
    }
    let (starts, ends, shift) = (&mut starts[..=n], &mut ends[..=n], &mut shift[..=n]);
    // up: x = y - 1 takes y; down: x = y + 2 takes y + 1
    let (forced, forced_shift) = match dir {
        StepDirection::Up => (-1, 0),
        StepDirection::Down => (1, 1),
    };
    let (mut opened, mut closed) = (0usize, 0usize);
    let (mut prev_x, mut prev_open) = (i64::MIN, false);
    let mut bad = false;
    for i in 0..n {
        let (x, y) = (xs[i], ys[i]);
        let d = x - y - off;
        bad |= (d + 1) as u64 > 2;
        let open = d == 0;
        let cont = open & prev_open & (x == prev_x + 1);
        ends[closed] = i;
        closed += usize::from(prev_open & !cont);
        starts[opened] = i;
        opened += usize::from(open & !cont);
        xs[i] = if d == forced { y + forced_shift } else { x };
        prev_x = x;
        prev_open = open;
    }
    ends[closed] = n;
    closed += usize::from(prev_open);
    if bad {
        let i = (0..n).find(|&i| (xs[i] - ys[i] - off).abs() > 1).unwrap_or(0);
        return Err(Error::Inconsistent(format!(
            "x - y = {} at index {i}, t={}, during a {dir:?} step",
            xs[i] - ys[i],
            t + 1
        )));
    }
    debug_assert_eq!(opened, closed);
    for (&i, &j) in starts[..opened].iter().zip(&ends[..closed]) {
        let m = block_law(dims, dir, t, xs[i], j - i)?.sample_with(rng, weights);
        match dir {
            StepDirection::Up => {
                shift[i + m] += 1;
                shift[j] -= 1;
            }
            StepDirection::Down => {
                shift[i] -= 1;
                shift[j - m] += 1;
            }
        }
    }
    let mut run = 0;
    for (x, d) in xs.iter_mut().zip(shift.iter_mut()) {
        run += *d;
        *d = 0;
        *x += run;
    }
    shift[n] = 0;
    Ok(())
}

/// Reusable buffers for repeated steps.
#[derive(Debug, Default, Clone)]
pub struct Stepper {
    scratch: Scratch,
}

impl Stepper {
    pub fn new() -> Self {
        Self::default()
    }

/// Applies one step to `pf` in place.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        pf: &mut PathFamily,
        dir: StepDirection,
        rng: &mut R,
    ) -> Result<()> {
        let dims = pf.dims();
        let target = dir.target(dims)?;
        for t in 0..dims.t as usize {
            let (ys, xs) = pf.section_pair_mut(t);
            update(dims, dir, t as i64, ys, xs, rng, &mut self.scratch)?;
            if cfg!(debug_assertions) {
                check_section_state(target, t as i64 + 1, xs)
                    .map_err(|e| Error::Inconsistent(format!("update produced {e}")))?;
            }
        }
        pf.set_shift(target.s);
        Ok(())
    }
}

/// `S -> S+1`: a uniform family in `Omega(N, T, S)` becomes uniform in `Omega(N, T, S+1)`.
pub fn step_up<R: Rng + ?Sized>(pf: &PathFamily, rng: &mut R) -> Result<PathFamily> {
    let mut out = pf.clone();
    Stepper::new().step(&mut out, StepDirection::Up, rng)?;
    Ok(out)
}

/// `S -> S-1`, the mirror of [`step_up`].
pub fn step_down<R: Rng + ?Sized>(pf: &PathFamily, rng: &mut R) -> Result<PathFamily> {
    let mut out = pf.clone();
    Stepper::new().step(&mut out, StepDirection::Down, rng)?;
    Ok(out)
}

/// Perfect sample from the uniform measure on `Omega(N, T, S)`.
pub fn sample_uniform<R: Rng + ?Sized>(dims: BoxDims, rng: &mut R) -> Result<PathFamily> {
    let mut pf = PathFamily::flat(dims.n, dims.t)?;
    let mut stepper = Stepper::new();
    for _ in 0..dims.s {
        stepper.step(&mut pf, StepDirection::Up, rng)?;
    }
    Ok(pf)
}
