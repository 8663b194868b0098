//! Orthonormal Hahn functions on a section.
//!
//! On `y = x - lo in {0..M}` the weight `w^{S,t}` is a Hahn weight with
//! negative integer parameters `alpha = -(M + |t-S|) - 1` and
//! `beta = -(M + |T-t-S|) - 1`. The orthonormal three-term recurrence
//! `y p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1}` defines a Jacobi matrix
//! whose eigenvalues are exactly the nodes `0..M`; the eigenvector for node
//! `y` is `(Psi_0(y), ..., Psi_M(y))`. Each eigenvector is computed by a
//! two-sided elimination, which stays accurate where the plain forward
//! recurrence overflows.
//!
//! Sign convention: every `Psi_k` has a positive leading coefficient, so
//! `Psi_0 > 0`.

use crate::error::Result;
use crate::geometry::{section_domain, BoxDims, SectionDomain};

const TINY: f64 = 1e-300;

/// Diagonal `b_k` and squared off-diagonal `a_k^2` (with `a_0^2 = 0`).
pub fn jacobi_coefficients(dims: BoxDims, time: i64) -> Result<(SectionDomain, Vec<f64>, Vec<f64>)> {
    let dom = section_domain(dims, time)?;
    let m = dom.hi - dom.lo;
    let alpha = -((m + (time - dims.s).abs()) as f64) - 1.0;
    let beta = -((m + (dims.t - time - dims.s).abs()) as f64) - 1.0;
    let mf = m as f64;
    let big_a = |n: i64| {
        if n == m {
            return 0.0;
        }
        let n = n as f64;
        (n + alpha + beta + 1.0) * (n + alpha + 1.0) * (mf - n)
            / ((2.0 * n + alpha + beta + 1.0) * (2.0 * n + alpha + beta + 2.0))
    };
    let big_c = |n: i64| {
        if n == 0 {
            return 0.0;
        }
        let n = n as f64;
        n * (n + alpha + beta + mf + 1.0) * (n + beta)
            / ((2.0 * n + alpha + beta) * (2.0 * n + alpha + beta + 1.0))
    };
    let b = (0..=m).map(|n| big_a(n) + big_c(n)).collect();
    let a2 = (0..=m)
        .map(|n| if n == 0 { 0.0 } else { big_a(n - 1) * big_c(n) })
        .collect();
    Ok((dom, b, a2))
}

fn guard(v: f64) -> f64 {
    if v == 0.0 {
        TINY
    } else {
        v
    }
}

/// Normalized eigenvector of the Jacobi matrix for eigenvalue `lambda`,
/// written into `out` with `out[0] >= 0`.
fn twisted_eigenvector(b: &[f64], a2: &[f64], lambda: f64, out: &mut [f64], work: &mut Work) {
    let n = b.len();
    let Work { dp, dm, lv, sg } = work;
    dp[0] = b[0] - lambda;
    for k in 1..n {
        dp[k] = b[k] - lambda - a2[k] / guard(dp[k - 1]);
    }
    dm[n - 1] = b[n - 1] - lambda;
    for k in (0..n - 1).rev() {
        dm[k] = b[k] - lambda - a2[k + 1] / guard(dm[k + 1]);
    }
    let mut best = (f64::INFINITY, 0);
    for k in 0..n {
        let mut g = b[k] - lambda;
        if k > 0 {
            g -= a2[k] / guard(dp[k - 1]);
        }
        if k + 1 < n {
            g -= a2[k + 1] / guard(dm[k + 1]);
        }
        if g.abs() < best.0 {
            best = (g.abs(), k);
        }
    }
    let m = best.1;
    lv[m] = 0.0;
    sg[m] = 1.0;
    for k in (0..m).rev() {
        let r = -a2[k + 1].sqrt() / guard(dp[k]);
        lv[k] = lv[k + 1] + r.abs().ln();
        sg[k] = sg[k + 1] * r.signum();
    }
    for k in m + 1..n {
        let r = -a2[k].sqrt() / guard(dm[k]);
        lv[k] = lv[k - 1] + r.abs().ln();
        sg[k] = sg[k - 1] * r.signum();
    }
    let top = lv[..n].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut norm = 0.0;
    for k in 0..n {
        out[k] = sg[k] * (lv[k] - top).exp();
        norm += out[k] * out[k];
    }
    let flip = if out[0] < 0.0 || (out[0] == 0.0 && sg[0] < 0.0) { -1.0 } else { 1.0 };
    let scale = flip / norm.sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
}

struct Work {
    dp: Vec<f64>,
    dm: Vec<f64>,
    lv: Vec<f64>,
    sg: Vec<f64>,
}

/// The table `Psi_k^{S,t}(x)`, `k = 0..|section|-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HahnBasis {
    dims: BoxDims,
    time: i64,
    domain: SectionDomain,
    /// Row `k`, column `x - lo`.
    table: Vec<f64>,
}

impl HahnBasis {
    pub fn new(dims: BoxDims, time: i64) -> Result<Self> {
        let (domain, b, a2) = jacobi_coefficients(dims, time)?;
        let n = domain.len();
        let mut table = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        let mut work = Work {
            dp: vec![0.0; n],
            dm: vec![0.0; n],
            lv: vec![0.0; n],
            sg: vec![0.0; n],
        };
        for y in 0..n {
            twisted_eigenvector(&b, &a2, y as f64, &mut col, &mut work);
            for (k, v) in col.iter().enumerate() {
                table[k * n + y] = *v;
            }
        }
        Ok(HahnBasis {
            dims,
            time,
            domain,
            table,
        })
    }

    pub fn dims(&self) -> BoxDims {
        self.dims
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    pub fn domain(&self) -> SectionDomain {
        self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    /// `Psi_k(x)`; zero outside the section or beyond the basis.
    pub fn psi(&self, k: usize, x: i64) -> f64 {
        let n = self.size();
        if k >= n || !self.domain.contains(x) {
            return 0.0;
        }
        self.table[k * n + (x - self.domain.lo) as usize]
    }

    /// `Psi_k` over the whole section.
    pub fn row(&self, k: usize) -> &[f64] {
        let n = self.size();
        &self.table[k * n..(k + 1) * n]
    }

    /// `max |sum_x Psi_j Psi_k - delta_jk|`.
    pub fn gram_error(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let dot: f64 = self.row(j).iter().zip(self.row(k)).map(|(a, b)| a * b).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::ln_weight;

    #[test]
    fn two_point_section() {
        let d = BoxDims::new(1, 2, 1).unwrap();
        let h = HahnBasis::new(d, 1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.psi(0, 0) - r).abs() < 1e-15 && (h.psi(0, 1) - r).abs() < 1e-15);
        assert!((h.psi(1, 0) + r).abs() < 1e-15 && (h.psi(1, 1) - r).abs() < 1e-15);
        assert_eq!(h.psi(2, 0), 0.0);
        assert_eq!(h.psi(0, 2), 0.0);
    }

    #[test]
    fn ground_state_is_root_weight() {
        for (n, t, s, time) in [(3, 6, 3, 3), (4, 9, 2, 5), (2, 7, 6, 1)] {
            let d = BoxDims::new(n, t, s).unwrap();
            let h = HahnBasis::new(d, time).unwrap();
            let lw: Vec<f64> = h.domain().iter().map(|x| ln_weight(d, time, x)).collect();
            let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = lw.iter().map(|v| (v - top).exp()).sum();
            for (x, l) in h.domain().iter().zip(&lw) {
                let expected = ((l - top).exp() / total).sqrt();
                assert!((h.psi(0, x) - expected).abs() < 1e-12, "{d} t={time} x={x}");
            }
        }
    }

    #[test]
    fn large_asymmetric_sections_stay_orthonormal() {
        for (n, t, s, time) in [(160, 320, 100, 250), (160, 320, 160, 30), (300, 600, 300, 300)] {
            let h = HahnBasis::new(BoxDims::new(n, t, s).unwrap(), time).unwrap();
            assert!(h.gram_error() < 1e-10, "({n},{t},{s}) t={time}: {}", h.gram_error());
        }
    }
}
