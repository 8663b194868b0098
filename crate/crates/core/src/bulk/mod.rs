//! Bulk scaling limit of the space-time correlation kernel.
//!
//! With `S0, T, N ~ (S0~, T~, N~) / eps` and a site near `(t~, x~) / eps`,
//! correlations of sites at fixed integer offsets converge to determinants
//! of `K^bulk`, a contour integral over an arc of the unit circle between
//! `e^{-i phi}` and `e^{i phi}`.
//!
//! Contours are the unit-circle arcs themselves. Every pole of the
//! integrands lies on the closed negative half-axis or at `0`, never on
//! either arc, so no deformation is needed.

mod quad;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shuffle::MarkovPlan;
use crate::spectral::{SpaceTimeKernel, SpaceTimePoint};

pub use quad::integrate;

/// Absolute tolerance of the contour quadrature.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MAX_PANELS: usize = 4000;

/// Macroscopic coordinates of the limit regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulkRegime {
    #[serde(rename = "S0")]
    pub s0: f64,
    #[serde(rename = "T")]
    pub t_total: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub t: f64,
    pub x: f64,
}

impl BulkRegime {
    pub fn new(s0: f64, t_total: f64, n: f64, t: f64, x: f64) -> Self {
        BulkRegime { s0, t_total, n, t, x }
    }

    /// Value whose arccosine is `phi`; in `(-1, 1)` exactly in the bulk.
    pub fn cos_phi(&self) -> f64 {
        let BulkRegime { s0, t_total, n, t, x } = *self;
        let num = -n * (n + t_total) + (s0 + n - x) * (t + n - x) + x * (t_total + x - s0 - t);
        let den = 2.0 * (x * (s0 + n - x) * (t + n - x) * (x + t_total - s0 - t)).sqrt();
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulkParams {
    pub cos_phi: f64,
    pub phi: f64,
    pub c1: f64,
    pub c2: f64,
}

impl BulkParams {
    /// One-point density `phi / pi`.
    pub fn density(&self) -> f64 {
        self.phi / PI
    }
}

/// `(phi, c1, c2)`; `OutsideBulk` when the point is in a frozen region.
pub fn bulk_params(reg: &BulkRegime) -> Result<BulkParams> {
    let BulkRegime { s0, t_total, n, t, x } = *reg;
    for (name, v) in [("S0", s0), ("T", t_total), ("N", n), ("t", t), ("x", x)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("regime coordinate {name} = {v} must be positive")));
        }
    }
    let cos_phi = reg.cos_phi();
    if cos_phi.is_nan() || cos_phi.abs() >= 1.0 {
        return Err(Error::OutsideBulk { cos_phi });
    }
    let c1 = (x * (s0 + n - x) / ((t_total - t - s0 + x) * (t + n - x))).sqrt();
    let c2 = (x * (t + n - x) / ((t_total - t - s0 + x) * (s0 + n - x))).sqrt();
    Ok(BulkParams {
        cos_phi,
        phi: cos_phi.acos(),
        c1,
        c2,
    })
}

/// A site at integer offsets from the macroscopic point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BulkPoint {
    pub r: usize,
    pub t: i64,
    pub x: i64,
}

impl BulkPoint {
    pub fn new(r: usize, t: i64, x: i64) -> Self {
        BulkPoint { r, t, x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub re: f64,
    pub im: f64,
    pub quadrature_error: f64,
}

fn signs_between(eps: &[i8], lo: usize, hi: usize) -> Result<(i32, i32)> {
    if hi > eps.len() {
        return Err(Error::Domain(format!(
            "step {hi} beyond an eps sequence of length {}",
            eps.len()
        )));
    }
    let plus = eps[lo..hi].iter().filter(|&&e| e == 1).count() as i32;
    Ok((plus, (hi - lo) as i32 - plus))
}

/// Arc of the unit circle from `e^{-i phi}` to `e^{i phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Contour {
    /// Counter-clockwise, through `+1`.
    Plus,
    /// Clockwise, through `-1`.
    Minus,
}

/// Contour on which the kernel for `(q_i, q_j)` is defined.
pub fn branch(qi: BulkPoint, qj: BulkPoint) -> Result<Contour> {
    if qi.r < qj.r || (qi.r == qj.r && qi.t > qj.t) {
        if qi.t < qj.t {
            return Err(Error::Unsupported(format!("pair {qi:?}, {qj:?} is not on an admissible section")));
        }
        Ok(Contour::Minus)
    } else if qi.t <= qj.t {
        Ok(Contour::Plus)
    } else {
        Err(Error::Unsupported(format!("pair {qi:?}, {qj:?} is not on an admissible section")))
    }
}

/// `K^bulk(q_i, q_j)` for the step sequence `eps` (`eps[k-1]` is `eps_k`).
pub fn bulk_kernel(p: &BulkParams, qi: BulkPoint, qj: BulkPoint, eps: &[i8], tol: f64) -> Result<KernelValue> {
    kernel_integral(p, qi, qj, eps, branch(qi, qj)?, tol)
}

/// The kernel integrand of `(q_i, q_j)` integrated over `contour`, which
/// need not be the pair's own branch.
pub fn kernel_integral(
    p: &BulkParams,
    qi: BulkPoint,
    qj: BulkPoint,
    eps: &[i8],
    contour: Contour,
    tol: f64,
) -> Result<KernelValue> {
    let dt = (qi.t - qj.t) as i32;
    let d = (qi.x - qj.x) as i32;
    let (c1, c2, phi) = (p.c1, p.c2, p.phi);
    // exponents of (1 + c2 z^{-1}) and (1 + c2 z)
    let (a, b) = match branch(qi, qj)? {
        Contour::Minus => signs_between(eps, qi.r, qj.r)?,
        Contour::Plus => {
            let (pl, mi) = signs_between(eps, qj.r, qi.r)?;
            (-pl, -mi)
        }
    };
    let (lo, hi) = match contour {
        Contour::Plus => (-phi, phi),
        Contour::Minus => (-phi, phi - 2.0 * PI),
    };
    let one = Complex64::new(1.0, 0.0);
    let f = |theta: f64| {
        let z = Complex64::from_polar(1.0, theta);
        let mut g = (one + z * c1).powi(dt) * z.powi(-d);
        if a != 0 {
            g *= (one + c2 / z).powi(a);
        }
        if b != 0 {
            g *= (one + z * c2).powi(b);
        }
        // dz / (2 pi i z^{d+1}) = z^{-d} d(theta) / (2 pi)
        g / (2.0 * PI)
    };
    let (v, err) = integrate(f, lo, hi, tol, MAX_PANELS);
    if err > tol {
        return Err(Error::Quadrature { tol, err });
    }
    Ok(KernelValue {
        re: v.re,
        im: v.im,
        quadrature_error: err,
    })
}

/// Determinant of the bulk kernel matrix with its entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkCorrelation {
    pub entries: Vec<Vec<f64>>,
    pub determinant: f64,
    pub quadrature_error: f64,
    /// Largest imaginary part seen in any entry.
    pub max_imag: f64,
}

pub fn bulk_correlation(p: &BulkParams, points: &[BulkPoint], eps: &[i8], tol: f64) -> Result<BulkCorrelation> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.r.cmp(&b.r).then(b.t.cmp(&a.t)));
    if pts.windows(2).any(|w| w[1].t > w[0].t) {
        return Err(Error::Unsupported(
            "points cannot be ordered with r nondecreasing and t nonincreasing".into(),
        ));
    }
    let mut entries = vec![vec![0.0; pts.len()]; pts.len()];
    let (mut qerr, mut imag) = (0.0f64, 0.0f64);
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate() {
            let k = bulk_kernel(p, a, b, eps, tol)?;
            entries[i][j] = k.re;
            qerr = qerr.max(k.quadrature_error);
            imag = imag.max(k.im.abs());
        }
    }
    Ok(BulkCorrelation {
        determinant: crate::arith::det(&entries),
        entries,
        quadrature_error: qerr,
        max_imag: imag,
    })
}

/// Integer box and base site for one value of the scaling parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "T")]
    pub t_total: i64,
    #[serde(rename = "S0")]
    pub s0: i64,
    pub t: i64,
    pub x: i64,
}

impl Embedding {
    pub fn new(reg: &BulkRegime, eps: f64) -> Self {
        let r = |v: f64| (v / eps).round() as i64;
        Embedding {
            eps,
            n: r(reg.n),
            t_total: r(reg.t_total),
            s0: r(reg.s0),
            t: r(reg.t),
            x: r(reg.x),
        }
    }

    pub fn site(&self, q: BulkPoint) -> SpaceTimePoint {
        SpaceTimePoint::new(q.r, self.t + q.t, self.x + q.x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub embedding: Embedding,
    pub finite: f64,
    pub bulk: f64,
    pub gap: f64,
}

/// `|finite R_n - bulk R_n|` for each scaling parameter in `eps_list`.
pub fn convergence_check(
    reg: &BulkRegime,
    points: &[BulkPoint],
    steps: &[i8],
    eps_list: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    let params = bulk_params(reg)?;
    let bulk = bulk_correlation(&params, points, steps, DEFAULT_TOLERANCE)?.determinant;
    eps_list
        .iter()
        .map(|&e| {
            let emb = Embedding::new(reg, e);
            let plan = MarkovPlan::new(emb.n, emb.t_total, emb.s0, steps.to_vec())?;
            let sites: Vec<SpaceTimePoint> = points.iter().map(|&q| emb.site(q)).collect();
            let finite = SpaceTimeKernel::new(plan).correlation(&sites)?;
            Ok(ConvergenceRow {
                embedding: emb,
                finite,
                bulk,
                gap: (finite - bulk).abs(),
            })
        })
        .collect()
}
