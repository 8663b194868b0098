//! Exact transition probabilities of the shuffling steps.
//!
//! One update draws `Y(t+1) = Z` with probability proportional to
//! `P_{t+}(Y(t), Z) P(Z, X(t+1))`, where the second factor is `P_{S-}` for an
//! up step and `P_{S+}` for a down step, both taken in the target box. A whole step is the product of its `T` updates.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{check_section_state, BoxDims, PathFamily};
use crate::matrices::{neighbour_states, transition_prob_exact, Direction};
use crate::shuffle::step::{block_law, blocks, StepDirection};

/// The matrix leading from `Y(t+1)` back to the old `X(t+1)`.
fn return_direction(dir: StepDirection) -> Direction {
    match dir {
        StepDirection::Up => Direction::ShiftDown,
        StepDirection::Down => Direction::ShiftUp,
    }
}

/// Law of `Y(t+1)` given `Y(t) = ys` and `X(t+1) = xs` from the matrix
/// conditional; `dims` is the box being left. Zero-probability states are
/// omitted, and the law is empty when no `Z` links the two sections.
pub fn update_law_matrix(
    dims: BoxDims,
    dir: StepDirection,
    t: i64,
    ys: &[i64],
    xs: &[i64],
) -> Result<Vec<(Vec<i64>, BigRational)>> {
    let target = dir.target(dims)?;
    check_section_state(target, t, ys)?;
    check_section_state(dims, t + 1, xs)?;
    let back = return_direction(dir);
    let candidates = neighbour_states(ys, 1, |z| check_section_state(target, t + 1, z).is_ok());
    let mut law = Vec::new();
    let mut total = BigRational::zero();
    for z in candidates {
        let p = transition_prob_exact(target, t, Direction::TimeUp, ys, &z)?
            * transition_prob_exact(target, t + 1, back, &z, xs)?;
        if !p.is_zero() {
            total += &p;
            law.push((z, p));
        }
    }
    if total.is_zero() {
        return Ok(Vec::new());
    }
    for (_, p) in law.iter_mut() {
        *p /= &total;
    }
    Ok(law)
}

/// Law of `Y(t+1)` produced by the block rules, in exact arithmetic.
pub fn update_law_algorithm(
    dims: BoxDims,
    dir: StepDirection,
    t: i64,
    ys: &[i64],
    xs: &[i64],
) -> Result<Vec<(Vec<i64>, BigRational)>> {
    let mut base = xs.to_vec();
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        match (dir, x - y) {
            (StepDirection::Up, -1) => base[i] = y,
            (StepDirection::Down, 2) => base[i] = y + 1,
            _ => {}
        }
    }
    let mut law = vec![(base, BigRational::one())];
    for block in blocks(dir, ys, xs)? {
        let probs = block_law(dims, dir, t, block.k, block.len)?.probabilities_exact();
        let mut next = Vec::with_capacity(law.len() * probs.len());
        for (z, p) in &law {
            for (m, q) in probs.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let mut z = z.clone();
                let range = match dir {
                    StepDirection::Up => block.start + m..block.start + block.len,
                    StepDirection::Down => block.start..block.start + block.len - m,
                };
                let shift = if dir == StepDirection::Up { 1 } else { -1 };
                z[range].iter_mut().for_each(|v| *v += shift);
                next.push((z, p * q));
            }
        }
        law = next;
    }
    law.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(law)
}

/// Probability that one step maps `from` to `to`.
pub fn exact_step_prob(from: &PathFamily, to: &PathFamily, dir: StepDirection) -> Result<BigRational> {
    let dims = from.dims();
    let target = dir.target(dims)?;
    if to.dims() != target {
        return Err(Error::Domain(format!(
            "a {dir:?} step from {dims} cannot reach {}",
            to.dims()
        )));
    }
    let mut acc = BigRational::one();
    for t in 0..dims.t {
        let ys = to.section(t as usize);
        let xs = from.section(t as usize + 1);
        let law = update_law_matrix(dims, dir, t, ys, xs)?;
        let z = to.section(t as usize + 1);
        match law.iter().find(|(s, _)| s.as_slice() == z) {
            Some((_, p)) => acc *= p,
            None => return Ok(BigRational::zero()),
        }
    }
    Ok(acc)
}
