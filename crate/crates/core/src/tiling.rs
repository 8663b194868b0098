//! Lozenge tilings of the `a x b x c` hexagon.
//!
//! Coordinates are the path plane: a point `(t, h)` with integer `t` in
//! `[0, T]`. Paths cross the vertical unit edge `{t} x [x, x+1]` when
//! `x` is in `X(t)`. Orientation names:
//!
//! * [`LozengeKind::Flat`]: crossed by a flat path step, the unit square
//!   `[t, t+1] x [x, x+1]`;
//! * [`LozengeKind::Rising`]: crossed by a rising step from row `x` at `t`
//!   to row `x+1` at `t+1`;
//! * [`LozengeKind::Horizontal`]: untouched by paths. It is centred on the
//!   vertical edge `{t} x [x, x+1]` with `x` in the section but not in `X(t)`.
//!
//! Counts are `ab` horizontal, `bc` rising and `ca` flat lozenges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{section_domain_unchecked, BoxDims, PathFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LozengeKind {
    Horizontal,
    Flat,
    Rising,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lozenge {
    pub kind: LozengeKind,
    pub t: i64,
    pub x: i64,
}

impl Lozenge {
    /// The two unit triangles covered, as `(column, row, upper)`.
    ///
    /// Square `(t, h)` is split by its diagonal into the lower triangle
    /// `(t,h),(t+1,h),(t+1,h+1)` and the upper one `(t,h),(t+1,h+1),(t,h+1)`.
    pub fn triangles(&self) -> [(i64, i64, bool); 2] {
        let (t, x) = (self.t, self.x);
        match self.kind {
            LozengeKind::Flat => [(t, x, false), (t, x, true)],
            LozengeKind::Rising => [(t, x, true), (t, x + 1, false)],
            LozengeKind::Horizontal => [(t - 1, x, false), (t, x, true)],
        }
    }

    /// Corner points in the path plane, counter-clockwise.
    pub fn corners(&self) -> [(i64, i64); 4] {
        let (t, x) = (self.t, self.x);
        match self.kind {
            LozengeKind::Flat => [(t, x), (t + 1, x), (t + 1, x + 1), (t, x + 1)],
            LozengeKind::Rising => [(t, x), (t + 1, x + 1), (t + 1, x + 2), (t, x + 1)],
            LozengeKind::Horizontal => [(t - 1, x), (t, x), (t + 1, x + 1), (t, x + 1)],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LozengeCounts {
    pub horizontal: usize,
    pub flat: usize,
    pub rising: usize,
}

impl LozengeCounts {
    /// `(ab, ca, bc)`: what every tiling of the box must contain.
    pub fn expected(dims: BoxDims) -> Self {
        let (a, b, c) = dims.sides();
        LozengeCounts {
            horizontal: (a * b) as usize,
            flat: (c * a) as usize,
            rising: (b * c) as usize,
        }
    }

    pub fn total(&self) -> usize {
        self.horizontal + self.flat + self.rising
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LozengeTiling {
    pub dims: BoxDims,
    /// Sorted by `(kind, t, x)`.
    pub lozenges: Vec<Lozenge>,
}

impl LozengeTiling {
    pub fn counts(&self) -> LozengeCounts {
        let mut c = LozengeCounts::default();
        for l in &self.lozenges {
            match l.kind {
                LozengeKind::Horizontal => c.horizontal += 1,
                LozengeKind::Flat => c.flat += 1,
                LozengeKind::Rising => c.rising += 1,
            }
        }
        c
    }
}

/// Tiling corresponding to a path family.
pub fn to_lozenges(pf: &PathFamily) -> Result<LozengeTiling> {
    pf.validate().map_err(Error::InvalidFamily)?;
    let dims = pf.dims();
    let expected = LozengeCounts::expected(dims);
    let mut lozenges = Vec::with_capacity(expected.total());
    for time in 0..dims.t as usize {
        for (&x, &y) in pf.section(time).iter().zip(pf.section(time + 1)) {
            let kind = if y == x {
                LozengeKind::Flat
            } else {
                LozengeKind::Rising
            };
            lozenges.push(Lozenge {
                kind,
                t: time as i64,
                x,
            });
        }
    }
    for time in 0..=dims.t {
        let row = pf.section(time as usize);
        let mut occupied = row.iter().peekable();
        for x in section_domain_unchecked(dims, time).iter() {
            if occupied.peek() == Some(&&x) {
                occupied.next();
            } else {
                lozenges.push(Lozenge {
                    kind: LozengeKind::Horizontal,
                    t: time,
                    x,
                });
            }
        }
    }
    lozenges.sort_unstable();
    Ok(LozengeTiling { dims, lozenges })
}
