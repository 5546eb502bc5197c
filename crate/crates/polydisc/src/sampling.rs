//! Random point generators: forward constructions that land in a known set,
//! plus exterior and near-boundary strata.

use std::f64::consts::TAU;

use rand::Rng;

use crate::clinalg::{Cplx, ZERO};
use crate::membership::symmetrize;
use crate::mobius::{binomf, CPoint};

pub fn unit(rng: &mut impl Rng) -> Cplx {
    Cplx::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// Uniform in the disc of the given radius.
pub fn disc(rng: &mut impl Rng, radius: f64) -> Cplx {
    Cplx::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stratum {
    /// Open polydisc, every |z_i| <= the given radius (< 1).
    Open(f64),
    /// Closed polydisc, about half the entries on the circle.
    Closed,
    /// Torus: every entry on the circle.
    Torus,
}

pub fn polydisc(rng: &mut impl Rng, n: usize, stratum: Stratum) -> Vec<Cplx> {
    (0..n)
        .map(|_| match stratum {
            Stratum::Open(rad) => disc(rng, rad),
            Stratum::Closed => {
                if rng.gen_bool(0.5) {
                    unit(rng)
                } else {
                    disc(rng, 1.0)
                }
            }
            Stratum::Torus => unit(rng),
        })
        .collect()
}

/// A point of G~_n built from (beta, q) with |beta_j| + |beta_{n-j}| < fill * C.
/// Returns the point and its beta vector.
pub fn tilde_g_with_beta(rng: &mut impl Rng, n: usize, fill: f64) -> (CPoint, Vec<Cplx>) {
    let q = disc(rng, fill);
    let beta = betas(rng, n, fill);
    (from_beta(&beta, q), beta)
}

fn betas(rng: &mut impl Rng, n: usize, fill: f64) -> Vec<Cplx> {
    let mut beta = vec![ZERO; n.saturating_sub(1)];
    for j in 1..=n / 2 {
        let c = binomf(n, j);
        let total = c * fill * rng.gen::<f64>().powf(0.3);
        if 2 * j == n {
            beta[j - 1] = Cplx::from_polar(total / 2.0, rng.gen_range(0.0..TAU));
        } else {
            let split = rng.gen::<f64>();
            beta[j - 1] = Cplx::from_polar(total * split, rng.gen_range(0.0..TAU));
            beta[n - j - 1] = Cplx::from_polar(total * (1.0 - split), rng.gen_range(0.0..TAU));
        }
    }
    beta
}

/// y_j = beta_j + conj(beta_{n-j}) q.
pub fn from_beta(beta: &[Cplx], q: Cplx) -> CPoint {
    let n = beta.len() + 1;
    let mut coords: Vec<Cplx> = (1..n).map(|j| beta[j - 1] + beta[n - j - 1].conj() * q).collect();
    coords.push(q);
    CPoint { n, coords }
}

pub fn tilde_g(rng: &mut impl Rng, n: usize, fill: f64) -> CPoint {
    tilde_g_with_beta(rng, n, fill).0
}

/// A point of Gamma~_n; some samples sit exactly on the boundary.
pub fn tilde_gamma(rng: &mut impl Rng, n: usize) -> CPoint {
    let q = if rng.gen_bool(0.1) { unit(rng) } else { disc(rng, 1.0) };
    let mut beta = vec![ZERO; n - 1];
    for j in 1..=n / 2 {
        let c = binomf(n, j);
        let total = if rng.gen_bool(0.3) { c } else { c * rng.gen::<f64>() };
        if 2 * j == n {
            beta[j - 1] = Cplx::from_polar(total / 2.0, rng.gen_range(0.0..TAU));
        } else {
            let split = rng.gen::<f64>();
            beta[j - 1] = Cplx::from_polar(total * split, rng.gen_range(0.0..TAU));
            beta[n - j - 1] = Cplx::from_polar(total * (1.0 - split), rng.gen_range(0.0..TAU));
        }
    }
    from_beta(&beta, q)
}

/// Uniform in the discs |y_k| <= C(n, k), |q| <= 1.
pub fn coordinate_box(rng: &mut impl Rng, n: usize) -> CPoint {
    let mut coords: Vec<Cplx> = (1..n).map(|j| disc(rng, binomf(n, j))).collect();
    coords.push(disc(rng, 1.0));
    CPoint { n, coords }
}

/// Box sample, mostly outside G~_n.
pub fn exterior(rng: &mut impl Rng, n: usize) -> CPoint {
    let mut coords: Vec<Cplx> = (1..n).map(|j| disc(rng, 1.4 * binomf(n, j))).collect();
    coords.push(disc(rng, 1.3));
    CPoint { n, coords }
}

/// An interior point pushed by a small relative factor across or toward the boundary.
pub fn near_boundary(rng: &mut impl Rng, n: usize) -> CPoint {
    let (_, beta) = tilde_g_with_beta(rng, n, 1.0);
    let q = disc(rng, 1.0);
    // rescale beta so that the tightest pair touches the bound, then perturb
    let mut worst: f64 = 0.0;
    for j in 1..=n / 2 {
        let s = beta[j - 1].norm() + beta[n - j - 1].norm();
        worst = worst.max(s / binomf(n, j));
    }
    let delta = 10f64.powf(rng.gen_range(-6.0..-2.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let f = if worst > 0.0 { (1.0 + delta) / worst } else { 1.0 };
    let beta: Vec<Cplx> = beta.iter().map(|b| b * f).collect();
    from_beta(&beta, q)
}

/// Interior, exterior and near-boundary samples in equal thirds.
pub fn stratified(rng: &mut impl Rng, n: usize, count: usize) -> Vec<CPoint> {
    (0..count)
        .map(|k| match k % 3 {
            0 => tilde_g(rng, n, 1.0),
            1 => exterior(rng, n),
            _ => near_boundary(rng, n),
        })
        .collect()
}

/// Candidates for G_n tests: symmetrized polydisc points slightly inside or
/// outside, and G~_n points that may fail the G_n recursion.
pub fn g_candidates(rng: &mut impl Rng, n: usize, count: usize) -> Vec<CPoint> {
    (0..count)
        .map(|k| {
            if k % 2 == 0 {
                let z: Vec<Cplx> = (0..n).map(|_| disc(rng, 1.15)).collect();
                symmetrize(&z).expect("finite input")
            } else {
                tilde_g(rng, n, 1.0)
            }
        })
        .collect()
}

/// The proportional point of J_n with free data (y_1, y_{n-1}, q).
pub fn jn_from(n: usize, y1: Cplx, yn1: Cplx, q: Cplx) -> CPoint {
    let nf = n as f64;
    let mut coords = vec![ZERO; n];
    coords[n - 1] = q;
    for j in 1..=n / 2 {
        let c = binomf(n, j);
        if 2 * j == n {
            coords[j - 1] = (y1 + yn1) * (c / (2.0 * nf));
        } else {
            coords[j - 1] = y1 * (c / nf);
            coords[n - j - 1] = yn1 * (c / nf);
        }
    }
    if n == 2 {
        coords[0] = y1;
    }
    CPoint { n, coords }
}

/// A random point of J_n: the proportional point built on the (y_1, y_{n-1}, q)
/// data of a random G~_n point, resampled until it passes the J_n test.
pub fn jn_point(rng: &mut impl Rng, n: usize) -> CPoint {
    loop {
        let y = tilde_g(rng, n, 1.0);
        let p = jn_from(n, y.y(1), y.y(n - 1), y.q());
        if crate::schwarz::in_j_n(&p).unwrap_or(false) {
            return p;
        }
    }
}
