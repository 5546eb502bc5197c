//! Separating polynomials for points outside Gamma~_n, starlike scaling,
//! and explicit non-convexity / non-circularity witnesses.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clinalg::{c, Cplx, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::membership::{in_tilde_g, in_tilde_gamma, MembershipReport, Select};
use crate::mobius::{binomf, CPoint, Pair};
use crate::sampling;

/// Sparse polynomial in the normalized coordinates x_j / C(n, j), with
/// x_n left as is: exponent vector -> coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatingPoly {
    pub n: usize,
    pub exponents: Vec<(Vec<u32>, Cplx)>,
    pub sup_bound: f64,
    pub value_at_target: f64,
    /// Headroom used by the truncation case, 0 for the linear cases.
    pub epsilon: f64,
}

impl SeparatingPoly {
    pub fn eval(&self, x: &CPoint) -> Cplx {
        eval_terms(&self.exponents, x)
    }
}

fn eval_terms(terms: &[(Vec<u32>, Cplx)], x: &CPoint) -> Cplx {
    let n = x.n;
    // power tables of the normalized coordinates
    let tables: Vec<Vec<Cplx>> = (0..n)
        .map(|i| {
            let top = terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0) as usize;
            let u = if i + 1 == n { x.coords[i] } else { x.coords[i] / binomf(n, i + 1) };
            let mut t = Vec::with_capacity(top + 1);
            let mut p = ONE;
            for _ in 0..=top {
                t.push(p);
                p *= u;
            }
            t
        })
        .collect();
    terms
        .iter()
        .map(|(e, a)| e.iter().enumerate().fold(*a, |acc, (i, &p)| acc * tables[i][p as usize]))
        .sum()
}

fn monomial(n: usize, idx: &[(usize, u32)]) -> Vec<u32> {
    let mut e = vec![0; n];
    for &(i, p) in idx {
        e[i] += p;
    }
    e
}

const MAX_ORDER: u32 = 1 << 20;

/// Smallest k with 2 r^(k+1) / (1 - r) < eps, or None past MAX_ORDER.
fn order(r: f64, eps: f64) -> Option<u32> {
    let tail = |k: u32| 2.0 * r.powf(k as f64 + 1.0) / (1.0 - r);
    let guess = ((eps * (1.0 - r) / 2.0).ln() / r.ln() - 1.0).ceil();
    if !(guess < MAX_ORDER as f64) {
        return None;
    }
    let mut k = guess.max(0.0) as u32;
    while k > 0 && tail(k - 1) < eps {
        k -= 1;
    }
    while tail(k) >= eps {
        k += 1;
    }
    Some(k)
}

fn best_angle(p: &Pair) -> Option<(f64, f64)> {
    let grid = 4096;
    let val = |t: f64| p.phi(Cplx::from_polar(1.0, t)).map(|v| v.norm()).unwrap_or(0.0);
    let h = std::f64::consts::TAU / grid as f64;
    let k = (0..grid).max_by(|&a, &b| val(a as f64 * h).total_cmp(&val(b as f64 * h)))?;
    let (mut lo, mut hi) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
    for _ in 0..60 {
        let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if val(m1) < val(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t = 0.5 * (lo + hi);
    Some((t, val(t)))
}

/// (j, z, |Phi_j(z, y)|) with |Phi_j(z, y)| > 1 and |z| < 1, chosen to keep the
/// truncation order small: the best boundary angle of each j, then the radius
/// minimizing the order over a geometric ladder toward the circle.
fn find_escape(y: &CPoint) -> Option<(usize, Cplx, f64)> {
    let mut best: Option<(u32, usize, Cplx, f64)> = None;
    for j in 1..y.n {
        let p = Pair::of(y, j);
        let Some((t, top)) = best_angle(&p) else { continue };
        if !(top > 1.0) {
            continue;
        }
        for s in 1..=200 {
            let r = 1.0 - 0.5f64.powf(s as f64 / 4.0);
            if r >= 1.0 {
                break;
            }
            let z = Cplx::from_polar(r, t);
            let Ok(v) = p.phi(z) else { continue };
            let m = v.norm();
            if m > 1.0 + 1e-12 {
                let Some(k) = order(r, (m - 1.0) / 6.0) else { continue };
                if best.is_none_or(|b| k < b.0) {
                    best = Some((k, j, z, m));
                }
            }
        }
    }
    best.map(|(_, j, z, m)| (j, z, m))
}

pub fn separating_polynomial(y: &CPoint, samples: usize) -> Result<SeparatingPoly> {
    separating_polynomial_seeded(y, samples, 0)
}

pub fn separating_polynomial_seeded(y: &CPoint, samples: usize, seed: u64) -> Result<SeparatingPoly> {
    let rep = in_tilde_gamma(y, Select::All)?;
    if rep.verdict || rep.near_boundary() {
        return Err(Error::Precondition("point is not strictly outside Gamma~_n".into()));
    }
    let n = y.n;
    let mut epsilon = 0.0;
    let terms: Vec<(Vec<u32>, Cplx)> = if let Some(j) = (1..n).find(|&j| y.y(j).norm() > binomf(n, j)) {
        vec![(monomial(n, &[(j - 1, 1)]), ONE)]
    } else if y.q().norm() > 1.0 {
        vec![(monomial(n, &[(n - 1, 1)]), ONE)]
    } else {
        let (j, z, m) = find_escape(y)
            .ok_or_else(|| Error::Construction("no (j, z) with |Phi_j(z, y)| > 1 found on the grid".into()))?;
        let eps = (m - 1.0) / 6.0;
        let k = order(z.norm(), eps).ok_or_else(|| Error::Construction("truncation order too large".into()))?;
        epsilon = eps;
        let scale = ONE / (1.0 + eps);
        // (x_j / C - x_n z) * sum_{i <= k} (z x_{n-j} / C)^i
        let mut table: BTreeMap<Vec<u32>, Cplx> = BTreeMap::new();
        let mut w = scale;
        for i in 0..=k {
            let e1 = monomial(n, &[(j - 1, 1), (n - j - 1, i)]);
            *table.entry(e1).or_insert(ZERO) += w;
            let e2 = monomial(n, &[(n - 1, 1), (n - j - 1, i)]);
            *table.entry(e2).or_insert(ZERO) -= w * z;
            w *= z;
        }
        table.into_iter().collect()
    };
    let value_at_target = eval_terms(&terms, y).norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup_bound = 0.0f64;
    for _ in 0..samples {
        let x = sampling::tilde_gamma(&mut rng, n);
        sup_bound = sup_bound.max(eval_terms(&terms, &x).norm());
    }
    Ok(SeparatingPoly { n, exponents: terms, sup_bound, value_at_target, epsilon })
}

pub fn starlike_scale(y: &CPoint, r: f64) -> Result<MembershipReport> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("scale r = {r} outside [0, 1)")));
    }
    in_tilde_g(&y.scaled(c(r, 0.0)), Select::All)
}

fn point(coords: Vec<Cplx>) -> CPoint {
    CPoint { n: coords.len(), coords }
}

/// (a, b, midpoint) with a, b in Gamma~_n and the midpoint outside.
pub fn nonconvex_witness(n: usize) -> Result<(CPoint, CPoint, CPoint)> {
    if n < 2 {
        return Err(Error::domain("witness needs n >= 2"));
    }
    let nf = n as f64;
    let (a, b) = if n == 2 {
        // pi_2(1, 1) and pi_2(i, i)
        (point(vec![c(2.0, 0.0), ONE]), point(vec![c(0.0, 2.0), -ONE]))
    } else {
        let mut a = vec![ZERO; n];
        let mut b = vec![ZERO; n];
        a[0] = c(nf, 0.0);
        a[n - 2] = c(0.0, nf);
        a[n - 1] = I;
        b[0] = c(0.0, -nf);
        b[n - 2] = c(nf, 0.0);
        b[n - 1] = -I;
        (point(a), point(b))
    };
    let mid = point(a.coords.iter().zip(&b.coords).map(|(x, y)| (x + y) * 0.5).collect());
    let ok = in_tilde_gamma(&a, Select::All)?.verdict
        && in_tilde_gamma(&b, Select::All)?.verdict
        && !in_tilde_gamma(&mid, Select::All)?.verdict;
    if !ok {
        return Err(Error::Construction(format!("non-convexity witness failed for n = {n}")));
    }
    Ok((a, b, mid))
}

/// (y, i y) with y in Gamma~_n and i y outside.
pub fn noncircular_witness(n: usize) -> Result<(CPoint, CPoint)> {
    if n < 2 {
        return Err(Error::domain("witness needs n >= 2"));
    }
    let mut coords: Vec<Cplx> = (1..n).map(|j| c(binomf(n, j), 0.0)).collect();
    coords.push(ONE);
    let y = point(coords);
    let iy = y.scaled(I);
    let ok = in_tilde_gamma(&y, Select::All)?.verdict && !in_tilde_gamma(&iy, Select::All)?.verdict;
    if !ok {
        return Err(Error::Construction(format!("non-circularity witness failed for n = {n}")));
    }
    Ok((y, iy))
}
