//! Dynamics driven by a sequence of `+1 / -1` steps.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoxDims, PathFamily};
use crate::shuffle::step::{StepDirection, Stepper};

/// `S(r) = S0 + eps_1 + ... + eps_r`, kept inside `[0, T]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlanJson", into = "PlanJson")]
pub struct MarkovPlan {
    n: i64,
    t: i64,
    s0: i64,
    eps: Vec<i8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlanJson {
    #[serde(rename = "N")]
    n: i64,
    #[serde(rename = "T")]
    t: i64,
    #[serde(rename = "S0")]
    s0: i64,
    eps: Vec<i8>,
    /// Reserved for updating sections from `t = T` down to `0`; not implemented.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    reverse: bool,
}

impl TryFrom<PlanJson> for MarkovPlan {
    type Error = Error;

    fn try_from(p: PlanJson) -> Result<Self> {
        if p.reverse {
            return Err(Error::Unsupported("reverse-order updates are not implemented".into()));
        }
        MarkovPlan::new(p.n, p.t, p.s0, p.eps)
    }
}

impl From<MarkovPlan> for PlanJson {
    fn from(p: MarkovPlan) -> Self {
        PlanJson {
            n: p.n,
            t: p.t,
            s0: p.s0,
            eps: p.eps,
            reverse: false,
        }
    }
}

impl MarkovPlan {
    pub fn new(n: i64, t: i64, s0: i64, eps: Vec<i8>) -> Result<Self> {
        BoxDims::new(n, t, s0).map_err(|e| Error::InvalidPlan(e.to_string()))?;
        let mut s = s0;
        for (r, &e) in eps.iter().enumerate() {
            StepDirection::from_sign(e)?;
            s += i64::from(e);
            if s < 0 || s > t {
                return Err(Error::InvalidPlan(format!(
                    "S({}) = {s} leaves [0, {t}]",
                    r + 1
                )));
            }
        }
        Ok(MarkovPlan { n, t, s0, eps })
    }

    /// `S` steps up from the flat box.
    pub fn grow(n: i64, t: i64, s: i64) -> Result<Self> {
        Self::new(n, t, 0, vec![1; s.max(0) as usize])
    }

    /// `steps` alternating moves returning to `s0` after every pair:
    /// `+1, -1, ...`, or `-1, +1, ...` when `s0 = T`.
    pub fn alternate(n: i64, t: i64, s0: i64, steps: usize) -> Result<Self> {
        let first: i8 = if s0 < t { 1 } else { -1 };
        let eps = (0..steps).map(|r| if r % 2 == 0 { first } else { -first }).collect();
        Self::new(n, t, s0, eps)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn s0(&self) -> i64 {
        self.s0
    }

    pub fn eps(&self) -> &[i8] {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// `S(r)` for `0 <= r <= len`.
    pub fn s_at(&self, r: usize) -> i64 {
        self.s0 + self.eps[..r].iter().map(|&e| i64::from(e)).sum::<i64>()
    }

    pub fn dims_at(&self, r: usize) -> Result<BoxDims> {
        if r > self.len() {
            return Err(Error::Domain(format!("step {r} beyond plan of length {}", self.len())));
        }
        BoxDims::new(self.n, self.t, self.s_at(r))
    }
}

/// Receives each state of a running chain, `r = 0` first.
pub trait Observer {
    fn observe(&mut self, r: usize, pf: &PathFamily) -> Result<()>;
}

/// Runs `plan` from `start` and returns the final state.
pub fn run_chain<R: Rng + ?Sized>(
    plan: &MarkovPlan,
    start: PathFamily,
    rng: &mut R,
    observers: &mut [&mut dyn Observer],
) -> Result<PathFamily> {
    let expected = plan.dims_at(0)?;
    if start.dims() != expected {
        return Err(Error::InvalidPlan(format!(
            "start state lives in {}, plan starts at {expected}",
            start.dims()
        )));
    }
    let mut pf = start;
    let mut stepper = Stepper::new();
    for o in observers.iter_mut() {
        o.observe(0, &pf)?;
    }
    for (r, &e) in plan.eps.iter().enumerate() {
        stepper.step(&mut pf, StepDirection::from_sign(e)?, rng)?;
        for o in observers.iter_mut() {
            o.observe(r + 1, &pf)?;
        }
    }
    Ok(pf)
}

/// Keeps every observed state.
#[derive(Debug, Default, Clone)]
pub struct Recorder {
    pub states: Vec<PathFamily>,
}

impl Observer for Recorder {
    fn observe(&mut self, _r: usize, pf: &PathFamily) -> Result<()> {
        self.states.push(pf.clone());
        Ok(())
    }
}

#[derive(Serialize)]
struct TrajectoryRecord<'a> {
    r: usize,
    #[serde(rename = "S")]
    s: i64,
    #[serde(rename = "X")]
    x: Vec<&'a [i64]>,
}

/// Streams `{"r", "S", "X"}` lines for the selected steps.
pub struct JsonlWriter<W: Write> {
    out: W,
    select: Option<Vec<usize>>,
}

impl<W: Write> JsonlWriter<W> {
    /// Writes every step when `select` is `None`.
    pub fn new(out: W, select: Option<Vec<usize>>) -> Self {
        JsonlWriter { out, select }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> Observer for JsonlWriter<W> {
    fn observe(&mut self, r: usize, pf: &PathFamily) -> Result<()> {
        if self.select.as_ref().is_some_and(|s| !s.contains(&r)) {
            return Ok(());
        }
        let rec = TrajectoryRecord {
            r,
            s: pf.dims().s,
            x: pf.sections().collect(),
        };
        serde_json::to_writer(&mut self.out, &rec).map_err(|e| Error::Io(e.to_string()))?;
        self.out.write_all(b"\n").map_err(|e| Error::Io(e.to_string()))
    }
}

impl<F: FnMut(usize, &PathFamily) -> Result<()>> Observer for F {
    fn observe(&mut self, r: usize, pf: &PathFamily) -> Result<()> {
        self(r, pf)
    }
}
