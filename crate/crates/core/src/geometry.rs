//! Lattice geometry: box dimensions, hexagon sections and path families.
//!
//! A family in `Omega(N, T, S)` is `N` non-intersecting lattice paths with
//! unit steps `(1,0)` ("flat") and `(1,1)` ("rising"); path `i` runs from
//! `(0, i)` to `(T, S + i)`. The corresponding hexagon has sides
//! `a = T - S`, `b = S`, `c = N`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation, ViolationKind};

/// Default ceiling on `|Omega|` for [`enumerate`].
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxDims {
    /// Number of paths (hexagon side `c`).
    pub n: i64,
    /// Horizontal extent.
    pub t: i64,
    /// Vertical shift of the endpoints.
    pub s: i64,
}

impl BoxDims {
    pub fn new(n: i64, t: i64, s: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDims(format!("N must be at least 1, got {n}")));
        }
        if t < 0 {
            return Err(Error::InvalidDims(format!("T must be nonnegative, got {t}")));
        }
        if s < 0 || s > t {
            return Err(Error::InvalidDims(format!(
                "S must satisfy 0 <= S <= T (S={s}, T={t})"
            )));
        }
        Ok(BoxDims { n, t, s })
    }

    /// Same `N`, `T` with a different shift.
    pub fn with_shift(self, s: i64) -> Result<Self> {
        BoxDims::new(self.n, self.t, s)
    }

    /// Hexagon side lengths `(a, b, c) = (T - S, S, N)`.
    pub fn sides(&self) -> (i64, i64, i64) {
        (self.t - self.s, self.s, self.n)
    }

    pub fn check_time(&self, time: i64) -> Result<()> {
        if time < 0 || time > self.t {
            Err(Error::Domain(format!(
                "time index {time} outside [0, {}]",
                self.t
            )))
        } else {
            Ok(())
        }
    }

    /// `ln |Omega(N,T,S)|` from MacMahon's box formula.
    pub fn ln_family_count(&self) -> f64 {
        let (a, b, c) = self.sides();
        let mut acc = 0.0;
        for i in 1..=a {
            for j in 1..=b {
                // prod_k (i+j+k-1)/(i+j+k-2) telescopes to (i+j+c-1)/(i+j-1)
                acc += ((i + j + c - 1) as f64).ln() - ((i + j - 1) as f64).ln();
            }
        }
        acc
    }
}

impl fmt::Display for BoxDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(N={}, T={}, S={})", self.n, self.t, self.s)
    }
}

/// The integer section of the hexagon at horizontal position `time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectionDomain {
    pub lo: i64,
    pub hi: i64,
}

impl SectionDomain {
    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// `[max(0, t+S-T), min(t+N-1, S+N-1)]`.
pub fn section_domain(dims: BoxDims, time: i64) -> Result<SectionDomain> {
    dims.check_time(time)?;
    Ok(section_domain_unchecked(dims, time))
}

#[inline]
pub(crate) fn section_domain_unchecked(dims: BoxDims, time: i64) -> SectionDomain {
    SectionDomain {
        lo: 0.max(time + dims.s - dims.t),
        hi: (time + dims.n - 1).min(dims.s + dims.n - 1),
    }
}

/// Checks that `xs` is a strictly increasing `N`-tuple inside the section.
pub fn check_section_state(dims: BoxDims, time: i64, xs: &[i64]) -> Result<()> {
    let dom = section_domain(dims, time)?;
    if xs.len() != dims.n as usize {
        return Err(Error::Domain(format!(
            "expected {} coordinates at t={time}, got {}",
            dims.n,
            xs.len()
        )));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!(
            "{xs:?} is not strictly increasing"
        )));
    }
    if !xs.iter().all(|&x| dom.contains(x)) {
        return Err(Error::Domain(format!(
            "{xs:?} leaves the section [{}, {}] at t={time} for {dims}",
            dom.lo, dom.hi
        )));
    }
    Ok(())
}

/// All strictly increasing `N`-tuples of the section, in lexicographic order.
pub fn section_states(dims: BoxDims, time: i64) -> Result<Vec<Vec<i64>>> {
    let dom = section_domain(dims, time)?;
    let n = dims.n as usize;
    let mut out = Vec::new();
    if dom.len() < n {
        return Ok(out);
    }
    let mut cur: Vec<i64> = (0..n as i64).map(|i| dom.lo + i).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            let max_here = dom.hi - (n - 1 - i) as i64;
            if cur[i] < max_here {
                cur[i] += 1;
                for j in i + 1..n {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// An element of `Omega(N, T, S)`, stored as a dense `(T+1) x N` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathFamily {
    dims: BoxDims,
    data: Vec<i64>,
}

impl PathFamily {
    /// Builds and validates a family from its sections `X(0..=T)`.
    pub fn new(dims: BoxDims, sections: Vec<Vec<i64>>) -> Result<Self> {
        let n = dims.n as usize;
        if sections.len() != dims.t as usize + 1 {
            return Err(Error::InvalidFamily(Violation {
                kind: ViolationKind::SectionCount,
                time: sections.len(),
                path: None,
            }));
        }
        if let Some(time) = sections.iter().position(|row| row.len() != n) {
            return Err(Error::InvalidFamily(Violation {
                kind: ViolationKind::RowLength,
                time,
                path: None,
            }));
        }
        let pf = PathFamily {
            dims,
            data: sections.into_iter().flatten().collect(),
        };
        pf.validate().map_err(Error::InvalidFamily)?;
        Ok(pf)
    }

    pub(crate) fn from_raw(dims: BoxDims, data: Vec<i64>) -> Self {
        debug_assert_eq!(data.len(), (dims.t as usize + 1) * dims.n as usize);
        PathFamily { dims, data }
    }

    /// The unique element of `Omega(N, T, 0)`.
    pub fn flat(n: i64, t: i64) -> Result<Self> {
        Self::lowest(BoxDims::new(n, t, 0)?)
    }

    /// Every path runs flat first and rises at the end.
    pub fn lowest(dims: BoxDims) -> Result<Self> {
        let a = dims.t - dims.s;
        Ok(Self::from_fn(dims, |time, i| i + (time - a).max(0)))
    }

    /// Every path rises first and runs flat at the end: the "filled box".
    pub fn highest(dims: BoxDims) -> Result<Self> {
        Ok(Self::from_fn(dims, |time, i| i + time.min(dims.s)))
    }

    fn from_fn(dims: BoxDims, f: impl Fn(i64, i64) -> i64) -> Self {
        let data = (0..=dims.t)
            .flat_map(|time| (0..dims.n).map(move |i| (time, i)))
            .map(|(time, i)| f(time, i))
            .collect();
        Self::from_raw(dims, data)
    }

    pub fn dims(&self) -> BoxDims {
        self.dims
    }

    /// `X(time)`.
    pub fn section(&self, time: usize) -> &[i64] {
        let n = self.dims.n as usize;
        &self.data[time * n..(time + 1) * n]
    }

    /// `(X(time), &mut X(time + 1))`.
    pub(crate) fn section_pair_mut(&mut self, time: usize) -> (&[i64], &mut [i64]) {
        let n = self.dims.n as usize;
        let (lo, hi) = self.data[time * n..(time + 2) * n].split_at_mut(n);
        (lo, hi)
    }

    pub(crate) fn set_shift(&mut self, s: i64) {
        self.dims.s = s;
    }

    pub fn sections(&self) -> impl Iterator<Item = &[i64]> {
        self.data.chunks(self.dims.n as usize)
    }

    /// Position of path `i` at time `time`.
    pub fn tau(&self, i: usize, time: usize) -> i64 {
        self.section(time)[i]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.sections().map(<[i64]>::to_vec).collect()
    }

    /// Checks every defining constraint, reporting the first failure.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let dims = self.dims;
        let n = dims.n as usize;
        let fail = |kind, time, path| Err(Violation { kind, time, path });
        if self.data.len() != (dims.t as usize + 1) * n {
            return fail(ViolationKind::SectionCount, 0, None);
        }
        for (time, row) in self.sections().enumerate() {
            if let Some(i) = row.windows(2).position(|w| w[0] >= w[1]) {
                return fail(ViolationKind::NotStrictlyIncreasing, time, Some(i + 1));
            }
            let dom = section_domain_unchecked(dims, time as i64);
            if let Some(i) = row.iter().position(|&x| !dom.contains(x)) {
                return fail(ViolationKind::OutsideSection, time, Some(i));
            }
        }
        if self.section(0).iter().zip(0..).any(|(&x, i)| x != i) {
            return fail(ViolationKind::BadStart, 0, None);
        }
        let last = dims.t as usize;
        if self
            .section(last)
            .iter()
            .zip(dims.s..)
            .any(|(&x, e)| x != e)
        {
            return fail(ViolationKind::BadEnd, last, None);
        }
        for time in 0..last {
            let (a, b) = (self.section(time), self.section(time + 1));
            if let Some(i) = a.iter().zip(b).position(|(x, y)| !(0..=1).contains(&(y - x))) {
                return fail(ViolationKind::BadStep, time, Some(i));
            }
        }
        Ok(())
    }
}

/// Validation as a free function over a family.
pub fn validate(pf: &PathFamily) -> std::result::Result<(), Violation> {
    pf.validate()
}

/// Every element of `Omega(N, T, S)`, lexicographic in the flattened matrix.
pub fn enumerate(dims: BoxDims) -> Result<Vec<PathFamily>> {
    enumerate_with_cap(dims, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_with_cap(dims: BoxDims, cap: usize) -> Result<Vec<PathFamily>> {
    let estimate = dims.ln_family_count().exp();
    if estimate > cap as f64 + 0.5 {
        return Err(Error::CapExceeded { estimate, cap });
    }
    let n = dims.n as usize;
    let mut out = Vec::new();
    let mut data: Vec<i64> = (0..dims.n).collect();
    extend_families(dims, n, 0, &mut data, &mut out);
    Ok(out)
}

fn extend_families(
    dims: BoxDims,
    n: usize,
    time: i64,
    data: &mut Vec<i64>,
    out: &mut Vec<PathFamily>,
) {
    if time == dims.t {
        out.push(PathFamily::from_raw(dims, data.clone()));
        return;
    }
    let dom = section_domain_unchecked(dims, time + 1);
    let base = data.len() - n;
    // bit (n-1-i) of `mask` is the step of path i: increasing mask = lex order
    for mask in 0u64..(1u64 << n) {
        let mut ok = true;
        for i in 0..n {
            let x = data[base + i] + ((mask >> (n - 1 - i)) & 1) as i64;
            if !dom.contains(x) || (i > 0 && x <= data[data.len() - 1]) {
                ok = false;
                break;
            }
            data.push(x);
        }
        if ok {
            extend_families(dims, n, time + 1, data, out);
        }
        data.truncate(base + n);
    }
}

/// Interchange form: `{"N":..,"T":..,"S":..,"X":[[..],..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFamilyJson {
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "T")]
    pub t: i64,
    #[serde(rename = "S")]
    pub s: i64,
    #[serde(rename = "X")]
    pub x: Vec<Vec<i64>>,
}

impl From<&PathFamily> for PathFamilyJson {
    fn from(pf: &PathFamily) -> Self {
        let d = pf.dims();
        PathFamilyJson {
            n: d.n,
            t: d.t,
            s: d.s,
            x: pf.to_rows(),
        }
    }
}

impl TryFrom<PathFamilyJson> for PathFamily {
    type Error = Error;

    fn try_from(j: PathFamilyJson) -> Result<Self> {
        PathFamily::new(BoxDims::new(j.n, j.t, j.s)?, j.x)
    }
}

impl Serialize for PathFamily {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        PathFamilyJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PathFamily {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = PathFamilyJson::deserialize(de)?;
        PathFamily::try_from(j).map_err(serde::de::Error::custom)
    }
}
