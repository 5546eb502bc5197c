//! The fractional-linear maps Phi_j(., y), their sup norms D_j and image discs.

use serde::{Deserialize, Serialize};

use crate::clinalg::{Cplx, ZERO};
use crate::error::{Error, Result};

/// A point (y_1, ..., y_{n-1}, q) of C^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct CPoint {
    pub n: usize,
    pub coords: Vec<Cplx>,
}

#[derive(Deserialize)]
struct RawPoint {
    n: usize,
    coords: Vec<Cplx>,
}

impl TryFrom<RawPoint> for CPoint {
    type Error = Error;
    fn try_from(raw: RawPoint) -> Result<Self> {
        CPoint::new(raw.coords).and_then(|p| {
            if p.n == raw.n {
                Ok(p)
            } else {
                Err(Error::input("n", format!("n = {} but coords has {} entries", raw.n, p.n)))
            }
        })
    }
}

impl CPoint {
    pub fn new(coords: Vec<Cplx>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("coords", "empty coordinate list"));
        }
        if let Some(k) = coords.iter().position(|z| !z.is_finite()) {
            return Err(Error::input(format!("coords[{k}]"), "non-finite entry"));
        }
        Ok(CPoint { n: coords.len(), coords })
    }

    pub fn zero(n: usize) -> Self {
        CPoint { n, coords: vec![ZERO; n] }
    }

    /// y_k for 1 <= k <= n - 1, or q for k = n.
    pub fn y(&self, k: usize) -> Cplx {
        self.coords[k - 1]
    }

    pub fn q(&self) -> Cplx {
        self.coords[self.n - 1]
    }

    pub fn scaled(&self, s: Cplx) -> CPoint {
        CPoint { n: self.n, coords: self.coords.iter().map(|z| z * s).collect() }
    }

    /// The point with y_j and y_{n-j} exchanged for every j.
    pub fn swapped(&self) -> CPoint {
        let mut coords: Vec<Cplx> = self.coords[..self.n - 1].iter().rev().copied().collect();
        coords.push(self.q());
        CPoint { n: self.n, coords }
    }

    pub fn max_diff(&self, other: &CPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn binom_u64(n: usize, j: usize) -> u64 {
    if j > n {
        return 0;
    }
    let j = j.min(n - j);
    let mut acc: u64 = 1;
    for i in 0..j {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Binomial coefficient restricted to 1 <= j <= n - 1.
pub fn binom(n: usize, j: usize) -> Result<u64> {
    if j == 0 || j >= n {
        return Err(Error::domain(format!("binom({n}, {j}) needs 1 <= j <= n-1")));
    }
    Ok(binom_u64(n, j))
}

pub(crate) fn binomf(n: usize, j: usize) -> f64 {
    binom_u64(n, j) as f64
}

fn check_j(y: &CPoint, j: usize) -> Result<()> {
    if j == 0 || j >= y.n {
        return Err(Error::domain(format!("index j = {j} outside 1..={}", y.n.saturating_sub(1))));
    }
    Ok(())
}

/// The data (C, a, b, q) = (binom(n,j), y_j, y_{n-j}, q) of one pair.
#[derive(Debug, Clone, Copy)]
pub struct Pair {
    pub c: f64,
    pub a: Cplx,
    pub b: Cplx,
    pub q: Cplx,
}

impl Pair {
    pub fn of(y: &CPoint, j: usize) -> Pair {
        Pair { c: binomf(y.n, j), a: y.y(j), b: y.y(y.n - j), q: y.q() }
    }

    pub fn swap(self) -> Pair {
        Pair { a: self.b, b: self.a, ..self }
    }

    /// |ab - C^2 q|.
    pub fn mix(&self) -> f64 {
        (self.a * self.b - self.q * (self.c * self.c)).norm()
    }

    pub fn degenerate(&self) -> bool {
        self.mix() <= 1e-12 * self.c * self.c * (1.0 + self.q.norm())
    }

    pub fn phi(&self, z: Cplx) -> Result<Cplx> {
        if self.degenerate() {
            return Ok(self.a / self.c);
        }
        let den = self.b * z - self.c;
        if den.norm() < 1e-300 {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
        Ok((self.q * z * self.c - self.a) / den)
    }

    /// sup over the disc of |Phi|, +inf when unbounded.
    pub fn d_norm(&self) -> f64 {
        if self.degenerate() {
            return self.a.norm() / self.c;
        }
        let c2 = self.c * self.c;
        let bb = self.b.norm_sqr();
        if self.b.norm() < self.c {
            (self.c * (self.a - self.b.conj() * self.q).norm() + self.mix()) / (c2 - bb)
        } else {
            f64::INFINITY
        }
    }
}

pub fn phi(j: usize, y: &CPoint, z: Cplx) -> Result<Cplx> {
    check_j(y, j)?;
    Pair::of(y, j).phi(z)
}

pub fn d_norm(j: usize, y: &CPoint) -> Result<f64> {
    check_j(y, j)?;
    Ok(Pair::of(y, j).d_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskImage {
    pub center: Cplx,
    pub radius: f64,
}

pub fn image_disk(j: usize, y: &CPoint) -> Result<DiskImage> {
    check_j(y, j)?;
    let p = Pair::of(y, j);
    if p.degenerate() {
        return Ok(DiskImage { center: p.a / p.c, radius: 0.0 });
    }
    if p.b.norm() >= p.c {
        return Err(Error::Unbounded(j));
    }
    let den = p.c * p.c - p.b.norm_sqr();
    Ok(DiskImage { center: (p.a - p.b.conj() * p.q) * (p.c / den), radius: p.mix() / den })
}

/// Max of |Phi_j| over `grid` equispaced points of the unit circle.
pub fn sup_on_torus(j: usize, y: &CPoint, grid: usize) -> Result<f64> {
    check_j(y, j)?;
    if grid < 8 {
        return Err(Error::domain("grid must be at least 8"));
    }
    let p = Pair::of(y, j);
    if p.b.norm() >= p.c && !p.degenerate() {
        return Err(Error::Unbounded(j));
    }
    let mut best = 0.0f64;
    for k in 0..grid {
        let z = Cplx::from_polar(1.0, std::f64::consts::TAU * k as f64 / grid as f64);
        best = best.max(p.phi(z)?.norm());
    }
    Ok(best)
}
