//! Complex scalars and a small 2x2 complex matrix kernel.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Cplx = Complex64;

pub const ZERO: Cplx = Cplx::new(0.0, 0.0);
pub const ONE: Cplx = Cplx::new(1.0, 0.0);
pub const I: Cplx = Cplx::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Cplx {
    Cplx::new(re, im)
}

pub fn r(re: f64) -> Cplx {
    Cplx::new(re, 0.0)
}

pub type Vec2 = [Cplx; 2];

pub fn vnorm(v: &Vec2) -> f64 {
    v[0].norm().hypot(v[1].norm())
}

/// Inner product <x, y> = y* x.
pub fn vdot(x: &Vec2, y: &Vec2) -> Cplx {
    x[0] * y[0].conj() + x[1] * y[1].conj()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[Cplx; 2]; 2]", into = "[[Cplx; 2]; 2]")]
pub struct Mat2 {
    pub a11: Cplx,
    pub a12: Cplx,
    pub a21: Cplx,
    pub a22: Cplx,
}

impl From<[[Cplx; 2]; 2]> for Mat2 {
    fn from(m: [[Cplx; 2]; 2]) -> Self {
        Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<Mat2> for [[Cplx; 2]; 2] {
    fn from(m: Mat2) -> Self {
        [[m.a11, m.a12], [m.a21, m.a22]]
    }
}

impl Mat2 {
    pub const fn new(a11: Cplx, a12: Cplx, a21: Cplx, a22: Cplx) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(d1: Cplx, d2: Cplx) -> Self {
        Mat2::new(d1, ZERO, ZERO, d2)
    }

    /// Matrix with the given columns.
    pub fn from_cols(c1: Vec2, c2: Vec2) -> Self {
        Mat2::new(c1[0], c2[0], c1[1], c2[1])
    }

    /// Rank-one matrix x y*.
    pub fn outer(x: &Vec2, y: &Vec2) -> Self {
        Mat2::new(
            x[0] * y[0].conj(),
            x[0] * y[1].conj(),
            x[1] * y[0].conj(),
            x[1] * y[1].conj(),
        )
    }

    pub fn col(&self, k: usize) -> Vec2 {
        match k {
            0 => [self.a11, self.a21],
            _ => [self.a12, self.a22],
        }
    }

    pub fn adjoint(&self) -> Self {
        Mat2::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn det(&self) -> Cplx {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> Cplx {
        self.a11 + self.a22
    }

    pub fn scale(&self, s: Cplx) -> Self {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        [self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1]]
    }

    pub fn fro_norm(&self) -> f64 {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22].iter().all(|z| z.is_finite())
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let scale = self.fro_norm().powi(2);
        if d.norm() <= 1e-15 * scale || d.norm() < 1e-300 {
            return Err(Error::Singular(format!("|det| = {:e}", d.norm())));
        }
        let inv = d.inv();
        Ok(Mat2::new(self.a22 * inv, -self.a12 * inv, -self.a21 * inv, self.a11 * inv))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_diff(&self, other: &Mat2) -> f64 {
        let d = *self - *other;
        [d.a11, d.a12, d.a21, d.a22].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

fn check_finite(m: &Mat2) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("non-finite matrix entry"))
    }
}

/// Largest singular value, from the eigenvalues of M*M in closed form.
pub fn op_norm(m: &Mat2) -> Result<f64> {
    check_finite(m)?;
    Ok(op_norm_unchecked(m))
}

pub(crate) fn op_norm_unchecked(m: &Mat2) -> f64 {
    let (s1, _) = singular_values(m);
    s1
}

/// (sigma_max, sigma_min).
pub fn singular_values(m: &Mat2) -> (f64, f64) {
    // M*M = [[p, s], [conj(s), t]]; its eigenvalues are mid +- rad
    let p = m.a11.norm_sqr() + m.a21.norm_sqr();
    let t = m.a12.norm_sqr() + m.a22.norm_sqr();
    let s = m.a11.conj() * m.a12 + m.a21.conj() * m.a22;
    let rad = (0.5 * (p - t)).hypot(s.norm());
    let big = (0.5 * (p + t) + rad).sqrt();
    // sigma_max * sigma_min = |det|
    let small = if big > 0.0 { m.det().norm() / big } else { 0.0 };
    (big, small)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermEig2 {
    pub lam_min: f64,
    pub lam_max: f64,
    pub v_min: Vec2,
    pub v_max: Vec2,
}

impl HermEig2 {
    /// V diag(f(lam_min), f(lam_max)) V*.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat2 {
        let lo = Mat2::outer(&self.v_min, &self.v_min).scale(r(f(self.lam_min)));
        let hi = Mat2::outer(&self.v_max, &self.v_max).scale(r(f(self.lam_max)));
        lo + hi
    }
}

pub fn herm_eig(h: &Mat2) -> Result<HermEig2> {
    check_finite(h)?;
    let defect = h.max_diff(&h.adjoint());
    let size = h.fro_norm();
    if defect > 1e-12 * size {
        return Err(Error::NonHermitian(defect / size.max(f64::MIN_POSITIVE)));
    }
    let a = h.a11.re;
    let d = h.a22.re;
    let b = (h.a12 + h.a21.conj()) * 0.5;
    let mid = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let rad = half.hypot(b.norm());
    let lam_max = mid + rad;
    let lam_min = mid - rad;
    if b.norm() == 0.0 {
        let (v_min, v_max) = if a <= d { ([ONE, ZERO], [ZERO, ONE]) } else { ([ZERO, ONE], [ONE, ZERO]) };
        return Ok(HermEig2 { lam_min: a.min(d), lam_max: a.max(d), v_min, v_max });
    }
    // pick the cancellation-free null vector of H - lam_max
    let v = if a >= d { [r(half + rad), b.conj()] } else { [b, r(rad - half)] };
    let nv = vnorm(&v);
    let v_max = [v[0] / nv, v[1] / nv];
    let v_min = [-v_max[1].conj(), v_max[0].conj()];
    Ok(HermEig2 { lam_min, lam_max, v_min, v_max })
}

pub fn herm_sqrt(h: &Mat2) -> Result<Mat2> {
    let e = herm_eig(h)?;
    let tol = 1e-12 * e.lam_max.abs().max(1.0);
    if e.lam_min < -tol {
        return Err(Error::domain(format!("negative eigenvalue {:e}", e.lam_min)));
    }
    Ok(e.map(|x| x.max(0.0).sqrt()))
}

/// (1 - A A*) for a contraction A; symmetrized to absorb roundoff.
pub(crate) fn defect(a: &Mat2) -> Mat2 {
    let m = Mat2::identity() - *a * a.adjoint();
    (m + m.adjoint()).scale(r(0.5))
}

/// M_Z(X) = (1 - ZZ*)^{-1/2} (X - Z)(1 - Z*X)^{-1} (1 - Z*Z)^{1/2}.
///
/// Evaluated in the equivalent form
/// -Z + (1 - ZZ*)^{1/2} X (1 - Z*X)^{-1} (1 - Z*Z)^{1/2},
/// which needs no inverse square root.
pub fn matricial_mobius(z: &Mat2, x: &Mat2) -> Result<Mat2> {
    check_finite(z)?;
    check_finite(x)?;
    if op_norm_unchecked(z) >= 1.0 {
        return Err(Error::domain("matricial Mobius map needs ||Z|| < 1"));
    }
    let left = herm_sqrt(&defect(z))?;
    let right = herm_sqrt(&defect(&z.adjoint()))?;
    let mid = (Mat2::identity() - z.adjoint() * *x).inverse()?;
    Ok(-*z + left * *x * mid * right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z_y() -> Mat2 {
        let w = r((15.0f64 / 32.0).sqrt());
        Mat2::new(r(-5.0 / 8.0), w, w, r(0.25))
    }

    fn power_norm(m: &Mat2, rng: &mut ChaCha8Rng) -> f64 {
        let g = m.adjoint() * *m;
        let mut v = [c(rng.gen(), rng.gen()), c(rng.gen(), rng.gen())];
        let mut est = 0.0;
        for _ in 0..200 {
            let w = g.apply(&v);
            let nw = vnorm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            est = nw / vnorm(&v);
            v = [w[0] / nw, w[1] / nw];
        }
        est.sqrt()
    }

    fn mat_strategy(scale: f64) -> impl Strategy<Value = Mat2> {
        prop::array::uniform8(-1.0f64..1.0).prop_map(move |a| {
            Mat2::new(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5]), c(a[6], a[7])).scale(r(scale))
        })
    }

    fn contraction(m: Mat2, target: f64) -> Mat2 {
        let n = op_norm(&m).unwrap();
        if n == 0.0 {
            m
        } else {
            m.scale(r(target / n))
        }
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&Mat2::identity()).unwrap() - 1.0).abs() < 1e-15);
        let d = Mat2::diag(r(0.5), r(0.25));
        assert!((op_norm(&d).unwrap() - 0.5).abs() < 1e-15);
        assert!((op_norm(&z_y()).unwrap() - 1.0).abs() < 1e-13);
        let bad = Mat2::diag(r(f64::NAN), ONE);
        assert!(matches!(op_norm(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn herm_eig_examples() {
        let e = herm_eig(&Mat2::zero()).unwrap();
        assert_eq!((e.lam_min, e.lam_max), (0.0, 0.0));
        assert_eq!(e.v_min, [ONE, ZERO]);
        assert_eq!(e.v_max, [ZERO, ONE]);
        let e = herm_eig(&z_y()).unwrap();
        assert!((e.lam_min + 1.0).abs() < 1e-14);
        assert!((e.lam_max - 5.0 / 8.0).abs() < 1e-14);
        let bad = Mat2::new(ONE, I, ZERO, ONE);
        assert!(matches!(herm_eig(&bad), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn herm_sqrt_examples() {
        assert!(herm_sqrt(&Mat2::identity()).unwrap().max_diff(&Mat2::identity()) < 1e-15);
        let s = herm_sqrt(&Mat2::diag(r(4.0), r(9.0))).unwrap();
        assert!(s.max_diff(&Mat2::diag(r(2.0), r(3.0))) < 1e-15);
        assert!(herm_sqrt(&Mat2::diag(r(-1.0), ONE)).is_err());
    }

    #[test]
    fn mobius_fixed_points() {
        let z = Mat2::new(c(0.2, 0.1), c(-0.3, 0.0), c(0.1, 0.4), c(0.0, -0.2));
        assert!(matricial_mobius(&z, &z).unwrap().fro_norm() < 1e-14);
        let x = Mat2::new(c(0.1, 0.3), c(0.2, 0.0), c(-0.4, 0.1), c(0.3, 0.3));
        assert!(matricial_mobius(&Mat2::zero(), &x).unwrap().max_diff(&x) < 1e-15);
        assert!(matricial_mobius(&Mat2::identity(), &x).is_err());
    }

    #[test]
    fn mobius_matches_defining_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut rand_mat = || {
                Mat2::new(
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            };
            let z = contraction(rand_mat(), 0.9);
            let x = contraction(rand_mat(), 0.8);
            let inv_left = herm_eig(&defect(&z)).unwrap().map(|t| 1.0 / t.sqrt());
            let right = herm_sqrt(&defect(&z.adjoint())).unwrap();
            let mid = (Mat2::identity() - z.adjoint() * x).inverse().unwrap();
            let direct = inv_left * (x - z) * mid * right;
            assert!(matricial_mobius(&z, &x).unwrap().max_diff(&direct) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn op_norm_agrees_with_power_iteration(m in mat_strategy(3.0), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let closed = op_norm(&m).unwrap();
            let iter = power_norm(&m, &mut rng);
            prop_assert!((closed - iter).abs() <= 1e-9 * (1.0 + closed));
        }

        #[test]
        fn herm_eig_reconstructs(m in mat_strategy(2.0)) {
            let h = (m + m.adjoint()).scale(r(0.5));
            let e = herm_eig(&h).unwrap();
            prop_assert!(e.lam_min <= e.lam_max);
            let rebuilt = e.map(|x| x);
            prop_assert!(rebuilt.max_diff(&h) <= 1e-11 * h.fro_norm().max(1e-300));
            for (lam, v) in [(e.lam_min, e.v_min), (e.lam_max, e.v_max)] {
                let hv = h.apply(&v);
                let res = [hv[0] - v[0] * lam, hv[1] - v[1] * lam];
                prop_assert!(vnorm(&res) <= 1e-12 * h.fro_norm().max(1e-300) + 1e-300);
            }
        }

        #[test]
        fn herm_sqrt_squares_back(m in mat_strategy(2.0)) {
            let h = m * m.adjoint();
            let s = herm_sqrt(&h).unwrap();
            prop_assert!((s * s).max_diff(&h) <= 1e-11 * (1.0 + h.fro_norm()));
        }

        #[test]
        fn mobius_round_trip_and_contraction(a in mat_strategy(1.0), b in mat_strategy(1.0),
                                             nz in 0.0f64..0.95, nx in 0.0f64..0.95) {
            let z = contraction(a, nz);
            let x = contraction(b, nx);
            let y = matricial_mobius(&z, &x).unwrap();
            prop_assert!(op_norm(&y).unwrap() < 1.0);
            let back = matricial_mobius(&(-z), &y).unwrap();
            prop_assert!(back.max_diff(&x) <= 1e-10);
        }
    }
}
