//! Two-point interpolation: analytic maps psi from the disc into G~_n with
//! psi(0) = 0 and psi(lambda0) = y0. General targets at n = 3, proportional
//! targets (J_n) at any n.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clinalg::{defect, herm_eig, matricial_mobius, op_norm_unchecked, r, vdot, vnorm, Cplx, Mat2, Vec2, ONE, ZERO};
use crate::error::{Error, Result};
use crate::membership::{in_tilde_gamma, Select, DEFAULT_BAND};
use crate::mobius::{binomf, CPoint, Pair};
use crate::sampling;
use crate::schwarz::k_rho;

/// Endpoint tolerance enforced on every constructed function.
pub const ENDPOINT_TOL: f64 = 1e-9;
const SPOT_SAMPLES: usize = 64;

// ---------------------------------------------------------------------------
// scalar Schur functions

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchurStep {
    pub node: Cplx,
    pub value: Cplx,
}

/// g = M_{p_1}(B_{a_1} M_{p_2}(B_{a_2} ... tail)), where M_p(z) = (z + p)/(1 + conj(p) z)
/// and B_a(l) = (l - a)/(1 - conj(a) l). Every value has modulus < 1 and |tail| <= 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarSchur {
    pub steps: Vec<SchurStep>,
    pub tail: Cplx,
}

fn disc_auto(p: Cplx, z: Cplx) -> Cplx {
    (z + p) / (ONE + p.conj() * z)
}

fn factor_at(a: Cplx, lam: Cplx) -> Cplx {
    (lam - a) / (ONE - a.conj() * lam)
}

impl ScalarSchur {
    pub fn constant(c: Cplx) -> Self {
        ScalarSchur { steps: vec![], tail: c }
    }

    /// l -> c l.
    pub fn linear(c: Cplx) -> Self {
        ScalarSchur { steps: vec![SchurStep { node: ZERO, value: ZERO }], tail: c }
    }

    pub fn eval(&self, lam: Cplx) -> Cplx {
        let mut acc = self.tail;
        for s in self.steps.iter().rev() {
            acc = disc_auto(s.value, factor_at(s.node, lam) * acc);
        }
        acc
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail.norm() <= 1.0 + 1e-12) {
            return Err(Error::domain(format!("closing constant has modulus {}", self.tail.norm())));
        }
        for s in &self.steps {
            if !(s.node.norm() < 1.0 && s.value.norm() < 1.0) {
                return Err(Error::domain("Schur step with node or value outside the disc"));
            }
        }
        Ok(())
    }
}

/// Two-point Pick problem g(a) = wa, g(b) = wb, one free parameter t in the closed disc.
pub fn np2(a: Cplx, wa: Cplx, b: Cplx, wb: Cplx, t: Cplx) -> Result<ScalarSchur> {
    for (name, v) in [("a", a), ("b", b), ("wa", wa), ("wb", wb)] {
        if !(v.norm() < 1.0) {
            return Err(Error::domain(format!("{name} must lie in the open disc")));
        }
    }
    if (a - b).norm() < 1e-15 {
        return Err(Error::domain("nodes must be distinct"));
    }
    if !(t.norm() <= 1.0) {
        return Err(Error::domain("parameter t must lie in the closed disc"));
    }
    let gamma = (wb - wa) / (ONE - wa.conj() * wb);
    let eta = gamma / factor_at(a, b);
    let m = eta.norm();
    if m > 1.0 + 1e-12 {
        return Err(Error::Infeasible(format!(
            "d(wa, wb) = {} exceeds d(a, b) = {}",
            gamma.norm(),
            factor_at(a, b).norm()
        )));
    }
    if m >= 1.0 - 1e-12 {
        // unique solution: a single Blaschke factor
        return Ok(ScalarSchur { steps: vec![SchurStep { node: a, value: wa }], tail: eta / m });
    }
    Ok(ScalarSchur { steps: vec![SchurStep { node: a, value: wa }, SchurStep { node: b, value: eta }], tail: t })
}

/// B(l) = (lambda0 - l)/(1 - conj(lambda0) l).
pub fn blaschke(lambda0: Cplx, lam: Cplx) -> Result<Cplx> {
    let den = ONE - lambda0.conj() * lam;
    if den.norm() < 1e-300 {
        return Err(Error::Pole { re: lam.re, im: lam.im });
    }
    Ok((lambda0 - lam) / den)
}

// ---------------------------------------------------------------------------
// the 2x2 problem behind one pair

fn w_of(p: &Pair, lambda0: Cplx) -> Cplx {
    let c2 = p.c * p.c;
    ((p.a * p.b - p.q * c2) / (lambda0 * c2)).sqrt()
}

/// [[a/(C lambda0), nu w], [w/nu, b/C]].
pub fn z_nu_pair(p: &Pair, lambda0: Cplx, nu: f64) -> Mat2 {
    let w = w_of(p, lambda0);
    Mat2::new(p.a / (lambda0 * p.c), w * nu, w / nu, p.b / p.c)
}

fn check_pair(p: &Pair, lambda0: Cplx, band: f64) -> Result<()> {
    if p.degenerate() {
        return Err(Error::Degenerate("y_1 y_2 = C^2 q; use the diagonal construction".into()));
    }
    if p.b.norm() > p.a.norm() {
        return Err(Error::Precondition("needs |y_2| <= |y_1|".into()));
    }
    let l = lambda0.norm();
    let d = p.d_norm();
    if d > l + band {
        return Err(Error::Infeasible(format!("||Phi|| = {d} exceeds |lambda0| = {l}")));
    }
    if d >= l - band {
        return Err(Error::Marginal(format!("||Phi|| = {d} equals |lambda0| = {l} within the band")));
    }
    Ok(())
}

pub fn nu_window_pair(p: &Pair, lambda0: Cplx) -> Result<(f64, f64)> {
    check_pair(p, lambda0, DEFAULT_BAND)?;
    let l = lambda0.norm();
    let c2 = p.c * p.c;
    let x2 = l / p.mix() * (c2 - p.a.norm_sqr() / (l * l) - p.b.norm_sqr() + c2 * p.q.norm_sqr() / (l * l));
    let disc = (x2 * x2 - 4.0).max(0.0).sqrt();
    let theta2 = 0.5 * (x2 + disc);
    Ok((1.0 / theta2, theta2))
}

fn need_three(y0: &CPoint) -> Result<()> {
    if y0.n != 3 {
        return Err(Error::Precondition(format!("needs n = 3, got n = {}", y0.n)));
    }
    Ok(())
}

/// (theta1, theta2): ||Z_nu|| < 1 exactly when theta1 < nu^2 < theta2.
pub fn nu_window(y0: &CPoint, lambda0: Cplx) -> Result<(f64, f64)> {
    need_three(y0)?;
    nu_window_pair(&Pair::of(y0, 1), lambda0)
}

pub fn z_nu(y0: &CPoint, lambda0: Cplx, nu: f64) -> Result<Mat2> {
    need_three(y0)?;
    if !(nu > 0.0) {
        return Err(Error::domain("nu must be positive"));
    }
    let p = Pair::of(y0, 1);
    check_pair(&p, lambda0, DEFAULT_BAND)?;
    Ok(z_nu_pair(&p, lambda0, nu))
}

/// nu = 1 when inside the window, else the log-midpoint.
pub fn default_nu(window: (f64, f64)) -> f64 {
    let (t1, t2) = window;
    if t1 < 1.0 && 1.0 < t2 {
        1.0
    } else {
        (t1 * t2).sqrt().sqrt()
    }
}

fn inv_sqrt_defect(a: &Mat2) -> Result<Mat2> {
    let e = herm_eig(&defect(a))?;
    if !(e.lam_min > 0.0) {
        return Err(Error::domain("needs a strict contraction"));
    }
    Ok(e.map(|t| 1.0 / t.sqrt()))
}

/// u = (1 - ZZ*)^{-1/2}(a1 Z e1 + a2 e2), v = -(1 - Z*Z)^{-1/2}(a1 e1 + a2 Z* e2).
pub fn u_v_vectors(z: &Mat2, alpha: &Vec2) -> Result<(Vec2, Vec2)> {
    if op_norm_unchecked(z) >= 1.0 {
        return Err(Error::domain("u(alpha), v(alpha) need ||Z|| < 1"));
    }
    if vnorm(alpha) == 0.0 {
        return Err(Error::domain("alpha must be nonzero"));
    }
    let left = inv_sqrt_defect(z)?;
    let right = inv_sqrt_defect(&z.adjoint())?;
    let u = left.apply(&[alpha[0] * z.a11, alpha[0] * z.a21 + alpha[1]]);
    let zs = z.adjoint();
    let v = right.apply(&[alpha[0] + alpha[1] * zs.a12, alpha[1] * zs.a22]);
    Ok((u, [-v[0], -v[1]]))
}

/// <K alpha, alpha> read as sum K_ij alpha_i conj(alpha_j); this equals
/// ||v(alpha)||^2 - rho^2 ||u(alpha)||^2 for K = K_Z(rho).
pub fn k_form(k: &Mat2, alpha: &Vec2) -> f64 {
    vdot(&k.transpose().apply(alpha), alpha).re
}

/// A vector minimizing the form above: the conjugated bottom eigenvector of K.
pub fn k_alpha(k: &Mat2) -> Result<Vec2> {
    let v = herm_eig(k)?.v_min;
    Ok([v[0].conj(), v[1].conj()])
}

/// Q0 = u v* / (lambda0 ||u||^2), followed by a few Newton steps on the computed
/// [M_{-Z}(lambda0 Q0)]_22 so that rounding near ||Z|| = 1 does not leave psi(0) off 0.
pub fn default_q(z: &Mat2, alpha: &Vec2, lambda0: Cplx) -> Result<Mat2> {
    let k = k_rho(z, lambda0.norm())?;
    let form = k_form(&k, alpha);
    if form > 1e-12 * k.fro_norm().max(1.0) * vnorm(alpha).powi(2) {
        return Err(Error::Precondition(format!("<K alpha, alpha> = {form:e} is positive")));
    }
    let (u, v) = u_v_vectors(z, alpha)?;
    let nu = vnorm(&u);
    if nu <= 1e-14 * vnorm(alpha) {
        return Err(Error::Degenerate("u(alpha) = 0".into()));
    }
    let q0 = Mat2::outer(&u, &v).scale(ONE / (lambda0 * nu * nu));
    Ok(polish_q(z, lambda0, q0))
}

fn corner(z: &Mat2, lambda0: Cplx, q: &Mat2) -> Option<Cplx> {
    matricial_mobius(&(-*z), &q.scale(lambda0)).ok().map(|g| g.a22)
}

fn polish_q(z: &Mat2, lambda0: Cplx, q0: Mat2) -> Mat2 {
    let Some(mut best_val) = corner(z, lambda0, &q0) else { return q0 };
    let mut best = q0;
    let units = [
        Mat2::new(ONE, ZERO, ZERO, ZERO),
        Mat2::new(ZERO, ONE, ZERO, ZERO),
        Mat2::new(ZERO, ZERO, ONE, ZERO),
        Mat2::new(ZERO, ZERO, ZERO, ONE),
    ];
    for _ in 0..4 {
        if best_val.norm() < 1e-15 {
            break;
        }
        // the map is holomorphic in the entries; pick the most sensitive one
        let h = 1e-7;
        let step = units
            .iter()
            .filter_map(|e| {
                let d = (corner(z, lambda0, &(best + e.scale(r(h))))? - best_val) / h;
                Some((d.norm(), *e, d))
            })
            .max_by(|a, b| a.0.total_cmp(&b.0));
        let Some((dn, e, d)) = step else { break };
        if dn == 0.0 {
            break;
        }
        let cand = best + e.scale(-best_val / d);
        match corner(z, lambda0, &cand) {
            Some(v) if v.norm() < best_val.norm() && op_norm_unchecked(&cand) <= op_norm_unchecked(&q0).max(1.0) => {
                best = cand;
                best_val = v;
            }
            _ => break,
        }
    }
    best
}

// ---------------------------------------------------------------------------
// matrix-valued Schur functions and disc functions

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum MatrixSchur {
    /// F(l) = M_{-Z}(B(l) Q(l)) diag(l, 1), Q(l) = q0 or M_{-q0}(l p).
    MobiusForm { lambda0: Cplx, z: Mat2, q0: Mat2, p: Option<Mat2> },
    /// F(l) = (s1 u1 v1* + g(l) u2 v2*) diag(l, 1).
    RankOne { u1: Vec2, u2: Vec2, v1: Vec2, v2: Vec2, s1: Cplx, g: ScalarSchur },
    /// F(l) = diag(f(l), g(l)).
    Diagonal { f: ScalarSchur, g: ScalarSchur },
}

fn right_diag(g: Mat2, lam: Cplx) -> Mat2 {
    Mat2::new(g.a11 * lam, g.a12, g.a21 * lam, g.a22)
}

impl MatrixSchur {
    pub fn eval(&self, lam: Cplx) -> Result<Mat2> {
        Ok(match self {
            MatrixSchur::MobiusForm { lambda0, z, q0, p } => {
                let b = blaschke(*lambda0, lam)?;
                let q = match p {
                    None => *q0,
                    Some(p) => matricial_mobius(&(-*q0), &p.scale(lam))?,
                };
                right_diag(matricial_mobius(&(-*z), &q.scale(b))?, lam)
            }
            MatrixSchur::RankOne { u1, u2, v1, v2, s1, g } => {
                let m = Mat2::outer(u1, v1).scale(*s1) + Mat2::outer(u2, v2).scale(g.eval(lam));
                right_diag(m, lam)
            }
            MatrixSchur::Diagonal { f, g } => Mat2::diag(f.eval(lam), g.eval(lam)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscKind {
    MatrixMobiusForm,
    ExplicitFamily,
    DiagonalSchwarz,
    RankOneExtremal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscFunction {
    pub kind: DiscKind,
    pub n: usize,
    pub lambda0: Cplx,
    pub target: CPoint,
    /// The construction solved for the reversed point; outputs are reversed back.
    pub swapped: bool,
    pub matrix: MatrixSchur,
    pub nu: Option<f64>,
    pub alpha: Option<Vec2>,
}

/// The point of G~_n with every B_j equal to f.
pub fn pi_of(f: &Mat2, n: usize) -> CPoint {
    let mut coords = vec![ZERO; n];
    coords[n - 1] = f.det();
    for j in 1..=n / 2 {
        let c = binomf(n, j);
        if 2 * j == n {
            coords[j - 1] = (f.a11 + f.a22) * (c / 2.0);
        } else {
            coords[j - 1] = f.a11 * c;
            coords[n - j - 1] = f.a22 * c;
        }
    }
    CPoint { n, coords }
}

impl DiscFunction {
    pub fn matrix_at(&self, lam: Cplx) -> Result<Mat2> {
        if !(lam.norm() <= 1.0) {
            return Err(Error::domain("lambda must lie in the closed disc"));
        }
        self.matrix.eval(lam)
    }

    pub fn eval(&self, lam: Cplx) -> Result<CPoint> {
        let p = pi_of(&self.matrix_at(lam)?, self.n);
        Ok(if self.swapped { p.swapped() } else { p })
    }

    pub fn endpoint_errors(&self) -> Result<(f64, f64)> {
        let e0 = self.eval(ZERO)?.max_abs();
        let e1 = self.eval(self.lambda0)?.max_diff(&self.target);
        Ok((e0, e1))
    }

    /// Endpoint errors and the fraction of `samples` interior points mapped into Gamma~_n.
    pub fn verify(&self, samples: usize, seed: u64) -> Result<Verification> {
        let (e0, e1) = self.endpoint_errors()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut outside = 0;
        let mut max_norm: f64 = 0.0;
        for _ in 0..samples {
            let lam = sampling::disc(&mut rng, 0.999);
            let f = self.matrix_at(lam)?;
            max_norm = max_norm.max(op_norm_unchecked(&f));
            if !in_tilde_gamma(&self.eval(lam)?, Select::All)?.verdict {
                outside += 1;
            }
        }
        Ok(Verification { origin_error: e0, target_error: e1, samples, outside, max_norm })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub origin_error: f64,
    pub target_error: f64,
    pub samples: usize,
    pub outside: usize,
    /// max ||F(l)|| over the samples
    pub max_norm: f64,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.origin_error <= ENDPOINT_TOL && self.target_error <= ENDPOINT_TOL && self.outside == 0
    }
}

fn spot_check(f: DiscFunction) -> Result<DiscFunction> {
    let v = f.verify(SPOT_SAMPLES, 0x5eed)?;
    if !v.passed() {
        return Err(Error::Construction(format!(
            "spot check failed: |psi(0)| = {:e}, |psi(lambda0) - y0| = {:e}, {} of {} samples outside",
            v.origin_error, v.target_error, v.outside, v.samples
        )));
    }
    Ok(f)
}

fn check_lambda(lambda0: Cplx) -> Result<()> {
    let l = lambda0.norm();
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::Precondition(format!("|lambda0| = {l} not in (0, 1)")));
    }
    Ok(())
}

pub fn build_interpolant(y0: &CPoint, lambda0: Cplx, nu: f64, alpha: Vec2, q0: Mat2) -> Result<DiscFunction> {
    build_with_q(y0, lambda0, nu, alpha, q0, None)
}

/// As build_interpolant with Q(l) = M_{-q0}(l p), a non-constant Schur function with Q(0) = q0.
pub fn build_interpolant_perturbed(
    y0: &CPoint,
    lambda0: Cplx,
    nu: f64,
    alpha: Vec2,
    q0: Mat2,
    p: Mat2,
) -> Result<DiscFunction> {
    if op_norm_unchecked(&q0) >= 1.0 || op_norm_unchecked(&p) > 1.0 {
        return Err(Error::Construction("perturbation needs ||q0|| < 1 and ||p|| <= 1".into()));
    }
    build_with_q(y0, lambda0, nu, alpha, q0, Some(p))
}

fn build_with_q(y0: &CPoint, lambda0: Cplx, nu: f64, alpha: Vec2, q0: Mat2, p: Option<Mat2>) -> Result<DiscFunction> {
    need_three(y0)?;
    check_lambda(lambda0)?;
    let pair = Pair::of(y0, 1);
    let (t1, t2) = nu_window_pair(&pair, lambda0)?;
    if !(t1 < nu * nu && nu * nu < t2) {
        return Err(Error::Construction(format!("nu^2 = {} outside the window ({t1}, {t2})", nu * nu)));
    }
    let z = z_nu_pair(&pair, lambda0, nu);
    let k = k_rho(&z, lambda0.norm())?;
    if k_form(&k, &alpha) > 1e-12 * k.fro_norm().max(1.0) * vnorm(&alpha).powi(2) {
        return Err(Error::Construction("alpha violates <K alpha, alpha> <= 0".into()));
    }
    if op_norm_unchecked(&q0) > 1.0 + 1e-11 {
        return Err(Error::Construction("Q(0) is not a contraction".into()));
    }
    if z.a22.norm() > 1e-14 {
        let (u, v) = u_v_vectors(&z, &alpha)?;
        let lhs = q0.adjoint().scale(lambda0.conj()).apply(&u);
        let err = vnorm(&[lhs[0] - v[0], lhs[1] - v[1]]);
        if err > 1e-9 * (1.0 + vnorm(&v)) {
            return Err(Error::Construction(format!("Q(0)* conj(lambda0) u(alpha) = v(alpha) fails by {err:e}")));
        }
    }
    let f = DiscFunction {
        kind: DiscKind::MatrixMobiusForm,
        n: 3,
        lambda0,
        target: y0.clone(),
        swapped: false,
        matrix: MatrixSchur::MobiusForm { lambda0, z, q0, p },
        nu: Some(nu),
        alpha: Some(alpha),
    };
    spot_check(f)
}

fn strict_form(p: &Pair, lambda0: Cplx) -> Result<(MatrixSchur, f64, Vec2)> {
    let nu = default_nu(nu_window_pair(p, lambda0)?);
    let z = z_nu_pair(p, lambda0, nu);
    let k = k_rho(&z, lambda0.norm())?;
    let alpha = k_alpha(&k)?;
    let q0 = if z.a22.norm() <= 1e-14 { Mat2::zero() } else { default_q(&z, &alpha, lambda0)? };
    Ok((MatrixSchur::MobiusForm { lambda0, z, q0, p: None }, nu, alpha))
}

/// ||Z|| = 1: keep the top singular direction fixed and interpolate the other.
fn rank_one_form(p: &Pair, lambda0: Cplx) -> Result<MatrixSchur> {
    let z = z_nu_pair(p, lambda0, 1.0);
    let e = herm_eig(&(z.adjoint() * z))?;
    let (v1, v2) = (e.v_max, e.v_min);
    let s1 = e.lam_max.max(0.0).sqrt();
    let s2 = e.lam_min.max(0.0).sqrt();
    let zv1 = z.apply(&v1);
    let u1 = [zv1[0] / s1, zv1[1] / s1];
    let u2 = if s2 > 1e-12 {
        let zv2 = z.apply(&v2);
        [zv2[0] / s2, zv2[1] / s2]
    } else {
        [-u1[1].conj(), u1[0].conj()]
    };
    let s1c = s1.min(1.0);
    let den = u2[1] * v2[1].conj();
    let g = if den.norm() < 1e-12 || s2 >= 1.0 - 1e-12 {
        ScalarSchur::constant(r(s2))
    } else {
        let target0 = -(u1[1] * v1[1].conj()) * s1c / den;
        np2(lambda0, r(s2), ZERO, target0, ZERO).map_err(|e| Error::Construction(format!("extremal disc: {e}")))?
    };
    Ok(MatrixSchur::RankOne { u1, u2, v1, v2, s1: r(s1c), g })
}

/// Disc through (0, 0) and (lambda0, y) for y in J_n (any y in G~_3 when n = 3):
/// every pi block is the 2x2 solution for the pair (y_1, y_{n-1}, q) with C = n.
pub fn jn_interpolant(y: &CPoint, lambda0: Cplx, allow_marginal: bool) -> Result<DiscFunction> {
    let n = y.n;
    if n < 2 {
        return Err(Error::Precondition("needs n >= 2".into()));
    }
    check_lambda(lambda0)?;
    let swapped = y.y(n - 1).norm() > y.y(1).norm();
    let work = if swapped { y.swapped() } else { y.clone() };
    let pair = Pair { c: n as f64, a: work.y(1), b: work.y(n - 1), q: work.q() };
    let l = lambda0.norm();
    let d = pair.d_norm();
    let base = |kind, matrix, nu, alpha| DiscFunction {
        kind,
        n,
        lambda0,
        target: y.clone(),
        swapped,
        matrix,
        nu,
        alpha,
    };
    let f = if pair.degenerate() {
        if d > l + DEFAULT_BAND {
            return Err(Error::Infeasible(format!("||Phi|| = {d} exceeds |lambda0| = {l}")));
        }
        let s = ONE / (lambda0 * pair.c);
        let fa = ScalarSchur::linear(pair.a * s);
        let fb = ScalarSchur::linear(pair.b * s);
        base(DiscKind::DiagonalSchwarz, MatrixSchur::Diagonal { f: fa, g: fb }, None, None)
    } else if d >= l - DEFAULT_BAND && d <= l + DEFAULT_BAND {
        if !allow_marginal {
            return Err(Error::Marginal(format!("||Phi|| = {d} equals |lambda0| = {l}; not constructed")));
        }
        base(DiscKind::RankOneExtremal, rank_one_form(&pair, lambda0)?, Some(1.0), None)
    } else {
        let (m, nu, alpha) = strict_form(&pair, lambda0)?;
        base(DiscKind::MatrixMobiusForm, m, Some(nu), Some(alpha))
    };
    spot_check(f)
}

/// Default construction for n = 3: swap if |y_2| > |y_1|, diagonal for degenerate
/// targets, nu = 1, alpha the bottom eigenvector of K, default Q. Marginal data is refused.
pub fn interpolate(y0: &CPoint, lambda0: Cplx) -> Result<DiscFunction> {
    need_three(y0)?;
    jn_interpolant(y0, lambda0, false)
}

// ---------------------------------------------------------------------------
// the explicit family at y = (3/2, 3/4, 1/2), lambda0 = -4/5

pub fn family_point() -> CPoint {
    CPoint { n: 3, coords: vec![r(1.5), r(0.75), r(0.5)] }
}

pub const FAMILY_LAMBDA0: f64 = -0.8;

/// Unitary diagonalizing Z_y = U diag(-1, 5/8) U*.
pub fn u_y() -> Mat2 {
    let w = (15.0f64 / 32.0).sqrt();
    let s39 = 39.0f64.sqrt();
    let s65 = (2.0f64 / 65.0).sqrt();
    Mat2::new(r(8.0 * w / s39), r(4.0 * w * s65), r(-3.0 / s39), r(5.0 * s65))
}

/// g with g(0) = 3/10, g(-4/5) = 5/8, parameterized by t in the closed disc.
pub fn family_g(t: Cplx) -> Result<ScalarSchur> {
    np2(ZERO, r(0.3), r(FAMILY_LAMBDA0), r(0.625), t)
}

pub fn family_disc(g: ScalarSchur) -> Result<DiscFunction> {
    g.validate()?;
    let (g0, g1) = (g.eval(ZERO), g.eval(r(FAMILY_LAMBDA0)));
    if (g0 - 0.3).norm() > 1e-10 || (g1 - 0.625).norm() > 1e-10 {
        return Err(Error::domain(format!("needs g(0) = 3/10 and g(-4/5) = 5/8, got {g0} and {g1}")));
    }
    let u = u_y();
    let (c1, c2) = (u.col(0), u.col(1));
    Ok(DiscFunction {
        kind: DiscKind::ExplicitFamily,
        n: 3,
        lambda0: r(FAMILY_LAMBDA0),
        target: family_point(),
        swapped: false,
        matrix: MatrixSchur::RankOne { u1: c1, u2: c2, v1: c1, v2: c2, s1: r(-1.0), g },
        nu: None,
        alpha: None,
    })
}

// ---------------------------------------------------------------------------
// appendix identities

fn adj(m: &Mat2) -> Mat2 {
    Mat2::new(m.a22, -m.a12, -m.a21, m.a11)
}

fn rel(lhs: f64, rhs: f64, scale: f64) -> f64 {
    (lhs - rhs).abs() / scale.max(lhs.abs()).max(rhs.abs()).max(f64::MIN_POSITIVE)
}

/// Relative deviation of the det(1 - Z_j* Z_j) closed form on pair j of y.
pub fn defect_deviation(y: &CPoint, j: usize, lambda0: Cplx) -> Result<f64> {
    let p = Pair::of(y, j);
    if p.degenerate() {
        return Err(Error::Degenerate(format!("pair {j} is degenerate")));
    }
    let z = z_nu_pair(&p, lambda0, 1.0);
    let lhs = (Mat2::identity() - z.adjoint() * z).det().re;
    let (l, c2, m) = (lambda0.norm(), p.c * p.c, p.mix());
    let (aa, bb, qq) = (p.a.norm_sqr() / (l * l), p.b.norm_sqr(), c2 * p.q.norm_sqr() / (l * l));
    let rhs = (c2 - aa - bb - 2.0 * m / l + qq) / c2;
    Ok(rel(lhs, rhs, (c2 + aa + bb + 2.0 * m / l + qq) / c2))
}

/// Relative deviations of the five n = 3 identities in nu, in order.
pub fn nu_identity_deviations(y: &CPoint, lambda0: Cplx, nu: f64) -> Result<[f64; 5]> {
    need_three(y)?;
    let p = Pair::of(y, 1);
    if p.degenerate() {
        return Err(Error::Degenerate("y_1 y_2 = 9 q".into()));
    }
    let l = lambda0.norm();
    let (l2, n2) = (l * l, nu * nu);
    let (aa, bb, qq, m) = (p.a.norm_sqr(), p.b.norm_sqr(), p.q.norm_sqr(), p.mix());
    if (9.0 - bb).abs() < 1e-12 {
        return Err(Error::Degenerate("|y_2| = 3".into()));
    }
    let z = z_nu_pair(&p, lambda0, nu);
    let id = Mat2::identity();
    let zs = z.adjoint();
    let dr = id - zs * z;
    let dl = id - z * zs;
    let det = dr.det().re;

    let kn = n2 + 1.0 / n2;
    let rhs2 = 1.0 - aa / (9.0 * l2) - bb / 9.0 + qq / l2 - m / (9.0 * l) * kn;
    let d2 = rel(det, rhs2, 1.0 + aa / (9.0 * l2) + bb / 9.0 + qq / l2 + m / (9.0 * l) * kn);

    let big_j = l * (9.0 - bb) / m;
    let x1 = l / m * (9.0 - aa - bb / l2 + 9.0 * qq / l2);
    let x2 = l / m * (9.0 - aa / l2 - bb + 9.0 * qq / l2);
    let lhs3 = big_j + 1.0 / big_j - x2;
    let rhs3 = 9.0 * (p.a - p.b.conj() * p.q).norm_sqr() / (l * (9.0 - bb) * m);
    let d3 = rel(lhs3, rhs3, big_j + 1.0 / big_j + x2.abs());

    let k11 = ((id - (zs * z).scale(r(l2))) * adj(&dr)).a11;
    let rhs4 = 1.0 - aa / 9.0 - bb / 9.0 + qq - m / 9.0 * (l / n2 + n2 / l);
    let d4 = rel(k11.re, rhs4, 1.0 + aa / 9.0 + bb / 9.0 + qq + m / 9.0 * (l / n2 + n2 / l)).max(k11.im.abs());

    let k22 = ((z * zs - id.scale(r(l2))) * adj(&dl)).a22;
    let rhs5 = aa / 9.0 + bb / 9.0 - l2 + m / 9.0 * (n2 * l + 1.0 / (n2 * l)) - qq / l2;
    let d5 = rel(k22.re, rhs5, aa / 9.0 + bb / 9.0 + l2 + m / 9.0 * (n2 * l + 1.0 / (n2 * l)) + qq / l2)
        .max(k22.im.abs());

    let k12 = (adj(&dl) * z).a21 * (1.0 - l2);
    let k21 = (zs * adj(&dl)).a12 * (1.0 - l2);
    let lhs6 = (k11 * k22 - k12 * k21).re;
    let s = m / 9.0;
    let rhs6 = -(s * kn - s * x1) * (s * kn - s * x2);
    let d6 = rel(lhs6, rhs6, (k11 * k22).norm() + (k12 * k21).norm());
    let _ = det;
    Ok([d2, d3, d4, d5, d6])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub trials: usize,
    pub checked: usize,
    pub skipped: usize,
    pub skip_reasons: Vec<String>,
    /// max relative deviation of each identity, in order 1..=6
    pub max_rel_dev: [f64; 6],
    /// deviations at y = (3/2, 3/4, 1/2), lambda0 = -4/5, nu = 1
    pub at_family_point: [f64; 6],
}

impl IdentityReport {
    pub fn worst(&self) -> f64 {
        self.max_rel_dev.iter().chain(self.at_family_point.iter()).fold(0.0, |a, &b| a.max(b))
    }
}

/// Random admissible data: y in G~_n oriented so |y_{n-j}| <= |y_j| and |lambda0| > D_j.
fn random_problem(rng: &mut ChaCha8Rng, n: usize, j: usize) -> (CPoint, Cplx) {
    let mut y = sampling::tilde_g(rng, n, 1.0);
    if y.y(n - j).norm() > y.y(j).norm() {
        y = y.swapped();
    }
    let d = Pair::of(&y, j).d_norm().min(0.999);
    let l = rng.gen_range(d..1.0);
    (y, sampling::unit(rng) * l)
}

pub fn identity_regressions(trials: usize, seed: u64) -> Result<IdentityReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max = [0.0f64; 6];
    let mut checked = 0;
    let mut reasons: Vec<String> = Vec::new();
    for _ in 0..trials {
        let n = rng.gen_range(3..=6);
        let j = rng.gen_range(1..=n / 2);
        let (y, lam) = random_problem(&mut rng, n, j);
        let (y3, lam3) = random_problem(&mut rng, 3, 1);
        let nu = rng.gen_range(-0.7f64..0.7).exp();
        let one = defect_deviation(&y, j, lam);
        let rest = nu_identity_deviations(&y3, lam3, nu);
        match (one, rest) {
            (Ok(a), Ok(b)) => {
                checked += 1;
                max[0] = max[0].max(a);
                for (k, v) in b.iter().enumerate() {
                    max[k + 1] = max[k + 1].max(*v);
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                let s = e.to_string();
                if !reasons.contains(&s) {
                    reasons.push(s);
                }
            }
        }
    }
    let y = family_point();
    let lam = r(FAMILY_LAMBDA0);
    let mut at_family_point = [0.0; 6];
    at_family_point[0] = defect_deviation(&y, 1, lam)?;
    at_family_point[1..].copy_from_slice(&nu_identity_deviations(&y, lam, 1.0)?);
    Ok(IdentityReport { trials, checked, skipped: trials - checked, skip_reasons: reasons, max_rel_dev: max, at_family_point })
}
