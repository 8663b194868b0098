//! Section measures and the four stochastic matrix families.
//!
//! For fixed `N`, `T` the section `X(t)` of a uniform family in
//! `Omega(N, T, S)` has law `rho_{S,t}`. The families `P_{t+}`, `P_{t-}`,
//! `P_{S+}`, `P_{S-}` move between sections and preserve these laws.
//! Each entry is a ratio of integer products, so the same [`Factors`] list
//! feeds both the exact backend and the log-space float backend.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{det, factorial_big, ln_factorial, ln_pochhammer, pochhammer, rat, Factors, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{check_section_state, section_domain, section_states, BoxDims};

/// Matrices with more rows than this are never materialized.
pub const DENSE_ROW_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "t+")]
    TimeUp,
    #[serde(rename = "t-")]
    TimeDown,
    #[serde(rename = "S+")]
    ShiftUp,
    #[serde(rename = "S-")]
    ShiftDown,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::TimeUp,
        Direction::TimeDown,
        Direction::ShiftUp,
        Direction::ShiftDown,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::TimeUp => "t+",
            Direction::TimeDown => "t-",
            Direction::ShiftUp => "S+",
            Direction::ShiftDown => "S-",
        }
    }

    /// Coordinate change of a single particle: `{0, 1}` or `{-1, 0}`.
    fn raises(self) -> bool {
        matches!(self, Direction::TimeUp | Direction::ShiftUp)
    }

    /// Section reached from `(dims.s, time)`.
    pub fn target(self, dims: BoxDims, time: i64) -> Result<(BoxDims, i64)> {
        dims.check_time(time)?;
        let bad = |why: &str| {
            Err(Error::Domain(format!(
                "direction {} invalid at S={}, t={time}: {why}",
                self.symbol(),
                dims.s
            )))
        };
        match self {
            Direction::TimeUp if time >= dims.t => bad("needs t < T"),
            Direction::TimeDown if time <= 0 => bad("needs t > 0"),
            Direction::ShiftUp if dims.s >= dims.t => bad("needs S < T"),
            Direction::ShiftDown if dims.s <= 0 => bad("needs S > 0"),
            Direction::TimeUp => Ok((dims, time + 1)),
            Direction::TimeDown => Ok((dims, time - 1)),
            Direction::ShiftUp => Ok((dims.with_shift(dims.s + 1)?, time)),
            Direction::ShiftDown => Ok((dims.with_shift(dims.s - 1)?, time)),
        }
    }

    /// Pochhammer base of the normalizing denominator.
    fn pochhammer_base(self, dims: BoxDims, time: i64) -> i64 {
        match self {
            Direction::TimeUp => dims.t - time,
            Direction::ShiftUp => dims.t - dims.s,
            Direction::TimeDown => time,
            Direction::ShiftDown => dims.s,
        }
    }

    /// The `S <-> t` partner direction.
    pub fn swapped(self) -> Direction {
        match self {
            Direction::TimeUp => Direction::ShiftUp,
            Direction::ShiftUp => Direction::TimeUp,
            Direction::TimeDown => Direction::ShiftDown,
            Direction::ShiftDown => Direction::TimeDown,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t+" => Ok(Direction::TimeUp),
            "t-" => Ok(Direction::TimeDown),
            "S+" => Ok(Direction::ShiftUp),
            "S-" => Ok(Direction::ShiftDown),
            other => Err(Error::Domain(format!("unknown direction {other:?}"))),
        }
    }
}

/// `ln w^{S,t}(x)` with `w = 1 / (x! (t+N-1-x)! (S+N-1-x)! (T-t-S+x)!)`.
pub fn ln_weight(dims: BoxDims, time: i64, x: i64) -> f64 {
    let BoxDims { n, t, s } = dims;
    -(ln_factorial(x)
        + ln_factorial(time + n - 1 - x)
        + ln_factorial(s + n - 1 - x)
        + ln_factorial(t - time - s + x))
}

pub fn weight_exact(dims: BoxDims, time: i64, x: i64) -> BigRational {
    let BoxDims { n, t, s } = dims;
    let den = factorial_big(x)
        * factorial_big(time + n - 1 - x)
        * factorial_big(s + n - 1 - x)
        * factorial_big(t - time - s + x);
    BigRational::new(1.into(), den)
}

/// `ln Z_{S,t}` from the closed product.
pub fn ln_normalization(dims: BoxDims, time: i64) -> f64 {
    let BoxDims { n, t, s } = dims;
    let mut acc = 0.0;
    for i in 1..=n {
        acc += ln_pochhammer(time + 1, i - 1) + ln_pochhammer(t - time + 1, i - 1)
            + ln_factorial(s - i + n)
            + ln_factorial(t - s + i - 1)
            - ln_pochhammer(t + 1, i - 1)
            - ln_factorial(i - 1);
    }
    acc + n as f64 * (ln_factorial(time) + ln_factorial(t - time) - ln_factorial(t))
}

pub fn normalization_exact(dims: BoxDims, time: i64) -> BigRational {
    let BoxDims { n, t, s } = dims;
    let mut acc = rat(1);
    for i in 1..=n {
        let num = pochhammer::<BigRational>(time + 1, i - 1)
            * pochhammer::<BigRational>(t - time + 1, i - 1)
            * BigRational::from_integer(factorial_big(s - i + n) * factorial_big(t - s + i - 1));
        let den = pochhammer::<BigRational>(t + 1, i - 1)
            * BigRational::from_integer(factorial_big(i - 1));
        acc = acc * num / den;
    }
    let ratio = BigRational::new(
        factorial_big(time) * factorial_big(t - time),
        factorial_big(t),
    );
    (0..n).fold(acc, |acc, _| acc * ratio.clone())
}

/// `rho_{S,t}(Y)` in exact arithmetic.
pub fn rho_exact(dims: BoxDims, time: i64, ys: &[i64]) -> Result<BigRational> {
    check_section_state(dims, time, ys)?;
    let mut acc = normalization_exact(dims, time);
    for (i, &yi) in ys.iter().enumerate() {
        for &yj in &ys[i + 1..] {
            acc *= rat((yj - yi) * (yj - yi));
        }
        acc *= weight_exact(dims, time, yi);
    }
    Ok(acc)
}

/// `ln rho_{S,t}(Y)`; safe for large parameters.
pub fn ln_rho(dims: BoxDims, time: i64, ys: &[i64]) -> Result<f64> {
    check_section_state(dims, time, ys)?;
    let mut acc = ln_normalization(dims, time);
    for (i, &yi) in ys.iter().enumerate() {
        for &yj in &ys[i + 1..] {
            acc += 2.0 * ((yj - yi) as f64).ln();
        }
        acc += ln_weight(dims, time, yi);
    }
    Ok(acc)
}

pub fn rho(dims: BoxDims, time: i64, ys: &[i64]) -> Result<f64> {
    ln_rho(dims, time, ys).map(f64::exp)
}

fn vandermonde_ratio(f: &mut Factors, xs: &[i64], ys: &[i64]) {
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            f.num.push(ys[j] - ys[i]);
            f.den.push(xs[j] - xs[i]);
        }
    }
}

/// Integer factors of `P^{S,t}_{dir}(X, Y)`; `None` when the entry is zero.
pub fn transition_factors(
    dims: BoxDims,
    time: i64,
    dir: Direction,
    xs: &[i64],
    ys: &[i64],
) -> Result<Option<Factors>> {
    let (tdims, ttime) = dir.target(dims, time)?;
    check_section_state(dims, time, xs)?;
    check_section_state(tdims, ttime, ys)?;
    let BoxDims { n, t, s } = dims;
    let mut f = Factors::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let moved = match (dir.raises(), y - x) {
            (true, 1) | (false, -1) => true,
            (_, 0) => false,
            _ => return Ok(None),
        };
        f.num.push(match (dir, moved) {
            (Direction::TimeUp, true) => n + s - x - 1,
            (Direction::ShiftUp, true) => n + time - x - 1,
            (Direction::TimeUp | Direction::ShiftUp, false) => x + t - time - s,
            (Direction::TimeDown | Direction::ShiftDown, true) => x,
            (Direction::TimeDown, false) => time + n - 1 - x,
            (Direction::ShiftDown, false) => s + n - 1 - x,
        });
    }
    vandermonde_ratio(&mut f, xs, ys);
    f.push_pochhammer_den(dir.pochhammer_base(dims, time), n);
    Ok(if f.is_zero() { None } else { Some(f) })
}

pub fn transition_prob_exact(
    dims: BoxDims,
    time: i64,
    dir: Direction,
    xs: &[i64],
    ys: &[i64],
) -> Result<BigRational> {
    Ok(transition_factors(dims, time, dir, xs, ys)?
        .map_or_else(|| rat(0), |f| f.exact()))
}

/// Float entry evaluated through logs.
pub fn transition_prob(
    dims: BoxDims,
    time: i64,
    dir: Direction,
    xs: &[i64],
    ys: &[i64],
) -> Result<f64> {
    Ok(transition_factors(dims, time, dir, xs, ys)?.map_or(0.0, |f| f.to_f64()))
}

/// Entry of the two-diagonal matrix `U^{S,t}_{dir}`.
pub fn u_entry(dims: BoxDims, time: i64, dir: Direction, x: i64, y: i64) -> Result<i64> {
    let (tdims, ttime) = dir.target(dims, time)?;
    let src = section_domain(dims, time)?;
    let dst = section_domain(tdims, ttime)?;
    if !src.contains(x) || !dst.contains(y) {
        return Err(Error::Domain(format!(
            "U_{dir} entry ({x}, {y}) outside [{}, {}] x [{}, {}]",
            src.lo, src.hi, dst.lo, dst.hi
        )));
    }
    let BoxDims { n, t, s } = dims;
    Ok(match (dir, y - x) {
        (Direction::TimeUp, 1) => n + s - 1 - x,
        (Direction::ShiftUp, 1) => n + time - 1 - x,
        (Direction::TimeUp | Direction::ShiftUp, 0) => t - time - s + x,
        (Direction::TimeDown | Direction::ShiftDown, -1) => x,
        (Direction::TimeDown, 0) => time + n - 1 - x,
        (Direction::ShiftDown, 0) => s + n - 1 - x,
        _ => 0,
    })
}

/// Closed form of `U^{S,t}_{t+} U^{S,t+1}_{S-}`, indexed by
/// `x` in the `(S, t)` section and `y` in the `(S-1, t+1)` section.
pub fn u_time_up_shift_down(dims: BoxDims, time: i64, x: i64, y: i64) -> Result<i64> {
    let (mid, mtime) = Direction::TimeUp.target(dims, time)?;
    let (dst, dtime) = Direction::ShiftDown.target(mid, mtime)?;
    let src_dom = section_domain(dims, time)?;
    let dst_dom = section_domain(dst, dtime)?;
    if !src_dom.contains(x) || !dst_dom.contains(y) {
        return Err(Error::Domain(format!("U_(t+S-) entry ({x}, {y}) out of range")));
    }
    let BoxDims { n, t, s } = dims;
    Ok(match y - x {
        1 => (n + s - 1 - x) * (n + s - 2 - x),
        0 => (n + s - 1 - x) * (t - time - s + 2 * x + 1),
        -1 => x * (t - time - s + x),
        _ => 0,
    })
}

/// `(U_first U_second)(x, y)` summed over the intermediate section.
pub fn u_product(
    dims: BoxDims,
    time: i64,
    first: Direction,
    second: Direction,
    x: i64,
    y: i64,
) -> Result<i64> {
    let (mid, mtime) = first.target(dims, time)?;
    let (dst, dtime) = second.target(mid, mtime)?;
    if !section_domain(dst, dtime)?.contains(y) {
        return Err(Error::Domain(format!("{y} outside target section")));
    }
    let mut acc = 0;
    for z in section_domain(mid, mtime)?.iter() {
        let a = u_entry(dims, time, first, x, z)?;
        if a != 0 {
            acc += a * u_entry(mid, mtime, second, z, y)?;
        }
    }
    Ok(acc)
}

/// `P` via the minor of `U`:
/// `prod (y_j - y_i) det[U(x_i, y_j)] / ((base)_N prod (x_j - x_i))`.
pub fn det_representation<S: Scalar>(
    dims: BoxDims,
    time: i64,
    dir: Direction,
    xs: &[i64],
    ys: &[i64],
) -> Result<S> {
    let (tdims, ttime) = dir.target(dims, time)?;
    check_section_state(dims, time, xs)?;
    check_section_state(tdims, ttime, ys)?;
    let mut minor = Vec::with_capacity(xs.len());
    for &x in xs {
        let row = ys
            .iter()
            .map(|&y| u_entry(dims, time, dir, x, y).map(S::from_int))
            .collect::<Result<Vec<S>>>()?;
        minor.push(row);
    }
    let mut f = Factors::new();
    vandermonde_ratio(&mut f, xs, ys);
    f.push_pochhammer_den(dir.pochhammer_base(dims, time), dims.n);
    Ok(det(&minor) * S::from_factors(&f))
}

/// The states of one section with a reverse index.
#[derive(Debug, Clone)]
pub struct SectionSpace {
    pub dims: BoxDims,
    pub time: i64,
    pub states: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl SectionSpace {
    pub fn new(dims: BoxDims, time: i64) -> Result<Self> {
        let states = section_states(dims, time)?;
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(SectionSpace {
            dims,
            time,
            states,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, xs: &[i64]) -> Option<usize> {
        self.index.get(xs).copied()
    }

    pub fn rho_exact(&self) -> Vec<BigRational> {
        self.states
            .iter()
            .map(|y| rho_exact(self.dims, self.time, y).expect("state of its own section"))
            .collect()
    }
}

/// Row-sparse matrix over a [`Scalar`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<S> {
    pub ncols: usize,
    /// Per row, `(column, value)` with strictly increasing columns, no zeros.
    pub rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> SparseMatrix<S> {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.rows[r]
            .iter()
            .find(|(j, _)| *j == c)
            .map_or_else(S::zero, |(_, v)| v.clone())
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| row.iter().fold(S::zero(), |acc, (_, v)| acc + v.clone()))
            .collect()
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.ncols];
        for (row, vi) in self.rows.iter().zip(v) {
            for (c, p) in row {
                out[*c] = out[*c].clone() + vi.clone() * p.clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix<S>) -> SparseMatrix<S> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: Vec<Option<S>> = vec![None; other.ncols];
                for (k, a) in row {
                    for (c, b) in &other.rows[*k] {
                        let term = a.clone() * b.clone();
                        acc[*c] = Some(match acc[*c].take() {
                            Some(v) => v + term,
                            None => term,
                        });
                    }
                }
                acc.into_iter()
                    .enumerate()
                    .filter_map(|(c, v)| v.filter(|v| !v.is_zero()).map(|v| (c, v)))
                    .collect()
            })
            .collect();
        SparseMatrix {
            ncols: other.ncols,
            rows,
        }
    }
}

/// All states reachable by moving each particle by `0` or `step`.
pub(crate) fn neighbour_states(
    xs: &[i64],
    step: i64,
    keep: impl Fn(&[i64]) -> bool,
) -> Vec<Vec<i64>> {
    let n = xs.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let ys: Vec<i64> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| x + step * ((mask >> (n - 1 - i)) & 1) as i64)
            .collect();
        if ys.windows(2).all(|w| w[0] < w[1]) && keep(&ys) {
            out.push(ys);
        }
    }
    out
}

/// Materialize `P^{S,t}_{dir}` between two [`SectionSpace`]s.
pub fn transition_matrix<S: Scalar>(
    dims: BoxDims,
    time: i64,
    dir: Direction,
) -> Result<(SectionSpace, SectionSpace, SparseMatrix<S>)> {
    let (tdims, ttime) = dir.target(dims, time)?;
    let src = SectionSpace::new(dims, time)?;
    let dst = SectionSpace::new(tdims, ttime)?;
    let limit = DENSE_ROW_LIMIT;
    if src.len() > limit || dst.len() > limit {
        return Err(Error::TooLarge {
            rows: src.len().max(dst.len()),
            limit,
        });
    }
    let step = if dir.raises() { 1 } else { -1 };
    let ncols = dst.len();
    let mut rows = Vec::with_capacity(src.len());
    for xs in &src.states {
        let mut row = Vec::new();
        for ys in neighbour_states(xs, step, |ys| dst.index_of(ys).is_some()) {
            if let Some(f) = transition_factors(dims, time, dir, xs, &ys)? {
                row.push((dst.index_of(&ys).expect("filtered"), S::from_factors(&f)));
            }
        }
        row.sort_by_key(|(c, _)| *c);
        rows.push(row);
    }
    Ok((
        src,
        dst,
        SparseMatrix { ncols, rows },
    ))
}

/// Exact rational serialized as `"num/den"` for golden files.
pub fn rational_to_string(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(n: i64, t: i64, s: i64) -> BoxDims {
        BoxDims::new(n, t, s).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn rho_examples() {
        let d = dims(1, 2, 1);
        assert_eq!(rho_exact(d, 1, &[0]).unwrap(), q(1, 2));
        assert_eq!(rho_exact(d, 1, &[1]).unwrap(), q(1, 2));
        for (n, t, s) in [(3, 5, 2), (2, 4, 4), (1, 3, 0)] {
            let d = dims(n, t, s);
            let ys: Vec<i64> = (0..n).collect();
            assert_eq!(rho_exact(d, 0, &ys).unwrap(), q(1, 1));
            assert!((rho(d, 0, &ys).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(rho_exact(d, 1, &[2]).is_err());
    }

    #[test]
    fn normalization_agrees_with_summation() {
        for (n, t, s) in [(2, 4, 2), (3, 6, 2), (2, 5, 3)] {
            let d = dims(n, t, s);
            for time in 0..=t {
                let space = SectionSpace::new(d, time).unwrap();
                let total = space.rho_exact().into_iter().fold(rat(0), |a, b| a + b);
                assert_eq!(total, rat(1), "{d} t={time}");
                let lnz = ln_normalization(d, time);
                let z = normalization_exact(d, time);
                assert!((lnz - Scalar::to_f64(&z).ln()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rho_symmetric_under_s_t_swap() {
        let (n, t) = (2, 5);
        for s in 0..=t {
            for time in 0..=t {
                let a = SectionSpace::new(dims(n, t, s), time).unwrap();
                let b = SectionSpace::new(dims(n, t, time), s).unwrap();
                assert_eq!(a.states, b.states);
                assert_eq!(a.rho_exact(), b.rho_exact());
            }
        }
    }

    #[test]
    fn transition_examples() {
        let d = dims(1, 2, 1);
        let p = |y| transition_prob_exact(d, 0, Direction::TimeUp, &[0], &[y]).unwrap();
        assert_eq!(p(0), q(1, 2));
        assert_eq!(p(1), q(1, 2));
        let d = dims(2, 4, 2);
        assert!(transition_prob_exact(d, 1, Direction::TimeUp, &[0, 1], &[0, 9]).is_err());
        assert!(matches!(
            transition_prob_exact(d, 0, Direction::TimeDown, &[0, 1], &[0, 1]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn jump_of_two_has_zero_probability() {
        let d = dims(2, 6, 3);
        let p = transition_prob_exact(d, 2, Direction::TimeUp, &[0, 2], &[2, 3]).unwrap();
        assert_eq!(p, rat(0));
    }

    #[test]
    fn u_entry_examples() {
        let d = dims(1, 2, 1);
        assert_eq!(u_entry(d, 0, Direction::TimeUp, 0, 0).unwrap(), 1);
        assert_eq!(u_entry(d, 0, Direction::TimeUp, 0, 1).unwrap(), 1);
        let d = dims(3, 8, 4);
        assert_eq!(u_entry(d, 2, Direction::TimeUp, 1, 3).unwrap(), 0);
        assert!(u_entry(d, 2, Direction::TimeUp, 9, 3).is_err());
    }

    #[test]
    fn composite_u_matches_products() {
        for (n, t) in [(1, 3), (2, 4), (3, 5)] {
            for s in 1..=t {
                let d = dims(n, t, s);
                for time in 0..t {
                    let src = section_domain(d, time).unwrap();
                    let dst = section_domain(d.with_shift(s - 1).unwrap(), time + 1).unwrap();
                    for x in src.iter() {
                        for y in dst.iter() {
                            let closed = u_time_up_shift_down(d, time, x, y).unwrap();
                            let a = u_product(d, time, Direction::TimeUp, Direction::ShiftDown, x, y)
                                .unwrap();
                            let b = u_product(d, time, Direction::ShiftDown, Direction::TimeUp, x, y)
                                .unwrap();
                            assert_eq!((a, b), (closed, closed), "{d} t={time} x={x} y={y}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn single_path_det_is_one_entry() {
        let d = dims(1, 5, 2);
        for time in 0..5 {
            for y in section_domain(d, time + 1).unwrap().iter() {
                for x in section_domain(d, time).unwrap().iter() {
                    let u = u_entry(d, time, Direction::TimeUp, x, y).unwrap();
                    let p: BigRational =
                        det_representation(d, time, Direction::TimeUp, &[x], &[y]).unwrap();
                    assert_eq!(p, q(u, 5 - time));
                }
            }
        }
    }

    #[test]
    fn gapped_minor_factorizes() {
        // Y has a gap between its two particles: the minor is diagonal
        let d = dims(2, 6, 3);
        let (xs, ys) = ([1, 3], [2, 4]);
        let direct = transition_prob_exact(d, 2, Direction::TimeUp, &xs, &ys).unwrap();
        let via_det: BigRational = det_representation(d, 2, Direction::TimeUp, &xs, &ys).unwrap();
        assert_eq!(direct, via_det);
        let u = |x, y| u_entry(d, 2, Direction::TimeUp, x, y).unwrap();
        assert_eq!(u(1, 4), 0);
        assert_eq!(u(3, 2), 0);
        let expected = q((4 - 2) * u(1, 2) * u(3, 4), 4 * 5 * (3 - 1));
        assert_eq!(direct, expected);
    }

    #[test]
    fn direction_round_trip() {
        for d in Direction::ALL {
            assert_eq!(d.symbol().parse::<Direction>().unwrap(), d);
            assert_eq!(d.swapped().swapped(), d);
        }
        assert!("x+".parse::<Direction>().is_err());
    }

    #[test]
    fn dense_limit_is_enforced() {
        let d = dims(8, 30, 15);
        match transition_matrix::<f64>(d, 15, Direction::TimeUp) {
            Err(Error::TooLarge { limit, .. }) => assert_eq!(limit, DENSE_ROW_LIMIT),
            other => panic!("expected TooLarge, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn rational_string_format() {
        assert_eq!(rational_to_string(&q(6, 8)), "3/4");
    }
}
