//! Schwarz lemma conditions for G~_n: maps D -> G~_n with psi(0) = 0 and
//! psi(lambda_0) = y^0.

use serde::{Deserialize, Serialize};

use crate::clinalg::{herm_eig, op_norm_unchecked, Cplx, Mat2, Vec2, ZERO};
use crate::error::{Error, Result};
use crate::membership::{
    beta_recover, costara_sup, in_tilde_g, in_tilde_gamma, pairs, CondId, ConditionMargin, Select,
    DEFAULT_BAND,
};
use crate::mobius::{binomf, CPoint, Pair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzProblem {
    pub n: usize,
    pub lambda0: Cplx,
    pub target: CPoint,
}

impl SchwarzProblem {
    pub fn new(lambda0: Cplx, target: CPoint) -> Result<Self> {
        let l = lambda0.norm();
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::Precondition(format!("|lambda0| = {l} not in (0, 1)")));
        }
        if target.n < 2 {
            return Err(Error::Precondition("target dimension must be at least 2".into()));
        }
        if !in_tilde_g(&target, Select::All)?.verdict {
            return Err(Error::Precondition("target is not in G~_n".into()));
        }
        Ok(SchwarzProblem { n: target.n, lambda0, target })
    }

    pub fn modulus(&self) -> f64 {
        self.lambda0.norm()
    }

    /// Pair j, swapped when |y_{n-j}| > |y_j| so that |b| <= |a| always.
    pub fn oriented(&self, j: usize) -> (Pair, Branch) {
        let p = Pair::of(&self.target, j);
        if p.b.norm() <= p.a.norm() {
            (p, Branch::DivideJ)
        } else {
            (p.swap(), Branch::DivideNJ)
        }
    }

    /// (a / lambda0, b, q / lambda0) for the oriented pair.
    fn lifted_pair(&self, j: usize) -> Pair {
        let (p, _) = self.oriented(j);
        Pair { a: p.a / self.lambda0, q: p.q / self.lambda0, ..p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    DivideJ,
    DivideNJ,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub parent: SchwarzProblem,
    pub point: CPoint,
    pub branch_choices: Vec<Branch>,
}

pub fn lift(p: &SchwarzProblem) -> LiftedPoint {
    let n = p.n;
    let lam = p.lambda0;
    let y = &p.target;
    let branch_choices: Vec<Branch> = pairs(n).map(|j| p.oriented(j).1).collect();
    let point = if n % 2 == 1 {
        let mut coords = y.coords.clone();
        for (j, br) in pairs(n).zip(&branch_choices) {
            match br {
                Branch::DivideJ => coords[j - 1] /= lam,
                Branch::DivideNJ => coords[n - j - 1] /= lam,
            }
        }
        coords[n - 1] /= lam;
        CPoint { n, coords }
    } else {
        let m = n / 2;
        let nf = (n + 1) as f64;
        let mut coords = vec![ZERO; n + 1];
        for (j, br) in (1..m).zip(&branch_choices) {
            let (mut a, mut b) = (y.y(j), y.y(n - j));
            match br {
                Branch::DivideJ => a /= lam,
                Branch::DivideNJ => b /= lam,
            }
            let w = nf / (nf - j as f64);
            coords[j - 1] = a * w;
            coords[n - j] = b * w;
        }
        let w = nf / (m as f64 + 1.0);
        coords[m - 1] = y.y(m) / lam * w;
        coords[m] = y.y(m) * w;
        coords[n] = y.q() / lam;
        CPoint { n: n + 1, coords }
    };
    LiftedPoint { parent: p.clone(), point, branch_choices }
}

fn cond_id(cond: u8) -> Result<CondId> {
    Ok(match cond {
        2 => CondId::C2,
        3 => CondId::C3,
        4 => CondId::C4,
        5 => CondId::C5,
        6 => CondId::C6,
        7 => CondId::C7,
        8 => CondId::C8,
        9 => CondId::C9,
        10 => CondId::C10,
        11 => CondId::C11,
        _ => return Err(Error::domain(format!("condition {cond} is not one of 2..=11"))),
    })
}

fn neg_inf_to(d: f64, l: f64) -> f64 {
    if d.is_finite() {
        l - d
    } else {
        -1.0
    }
}

pub fn check_condition(p: &SchwarzProblem, cond: u8) -> Result<ConditionMargin> {
    check_condition_with(p, cond, DEFAULT_BAND)
}

pub fn check_condition_with(p: &SchwarzProblem, cond: u8, band: f64) -> Result<ConditionMargin> {
    let id = cond_id(cond)?;
    let n = p.n;
    let l = p.modulus();
    let per_pair = |f: &dyn Fn(usize) -> f64| pairs(n).map(f).fold(f64::INFINITY, f64::min);
    let slack = match cond {
        2 => (1..n).map(|j| neg_inf_to(Pair::of(&p.target, j).d_norm(), l)).fold(f64::INFINITY, f64::min),
        3 => per_pair(&|j| neg_inf_to(p.oriented(j).0.d_norm(), l)),
        4 => {
            let rep = in_tilde_gamma(&lift(p).point, Select::One(CondId::C7))?;
            rep.per_condition[0].slack
        }
        5 => {
            let certs = schur_certificates_with(p, band)?;
            let slack = certs.iter().map(|c| l - c.d_norm).fold(f64::INFINITY, f64::min);
            return Ok(ConditionMargin {
                cond: id,
                holds: certs.iter().all(|c| c.feasible),
                slack,
                boundary: certs.iter().any(|c| c.marginal),
            });
        }
        6 => per_pair(&|j| {
            let (q, _) = p.oriented(j);
            let den = q.c * q.c - q.b.norm_sqr();
            if den <= 0.0 {
                -1.0
            } else {
                l - (q.c * (q.a - q.b.conj() * q.q).norm() + q.mix()) / den
            }
        }),
        7 => per_pair(&|j| {
            // C lam - a z - b lam w + C q z w != 0 on D x D, i.e. the lifted
            // pair lies in the closed set; decided by ||Phi_{n-j}(., lift)|| <= 1
            let t = p.lifted_pair(j);
            if t.degenerate() {
                return (1.0 - t.a.norm() / t.c).min(1.0 - t.b.norm() / t.c);
            }
            neg_inf_to(t.swap().d_norm(), 1.0)
        }),
        8 => per_pair(&|j| {
            let (q, _) = p.oriented(j);
            let c2 = q.c * q.c;
            let t = q.a.norm_sqr() - l * l * q.b.norm_sqr() + c2 * q.q.norm_sqr() - c2 * l * l
                + 2.0 * q.c * (q.b * (l * l) - q.a.conj() * q.q).norm();
            -t / c2
        }),
        9 => per_pair(&|j| {
            let (q, _) = p.oriented(j);
            let c2 = q.c * q.c;
            let t = c2 * l * l - q.a.norm_sqr() - l * l * q.b.norm_sqr() + c2 * q.q.norm_sqr()
                - 2.0 * l * q.mix();
            (l - q.q.norm()).min(t / c2)
        }),
        10 => per_pair(&|j| {
            let (q, _) = p.oriented(j);
            let t = q.c * l * l
                - (q.b * (l * l) - q.a.conj() * q.q).norm()
                - l * (q.a - q.b.conj() * q.q).norm()
                - q.c * q.q.norm_sqr();
            t / q.c
        }),
        11 => beta_condition(p),
        _ => unreachable!(),
    };
    Ok(ConditionMargin::closed(id, slack, band))
}

/// C11: beta from the lifted point, |beta_j| + |beta_partner| <= C(n, j).
fn beta_condition(p: &SchwarzProblem) -> f64 {
    let n = p.n;
    let l = p.modulus();
    let head = l - p.target.q().norm();
    let lifted = lift(p);
    let qt = lifted.point.q().norm();
    if qt < 1.0 - 1e-12 {
        let beta = beta_recover(&lifted.point).expect("|q~| < 1").betas;
        let m = lifted.point.n;
        let mut s = head;
        for j in pairs(n) {
            let (bj, bp) = (beta[j - 1], beta[m - j - 1]);
            // undo the (n+1)/(n+1-j) weights of the even lift
            let w = if n.is_multiple_of(2) { (m - j) as f64 / m as f64 } else { 1.0 };
            let c = binomf(n, j);
            s = s.min((c - w * (bj.norm() + bp.norm())) / c);
        }
        return s;
    }
    // |q~| = 1: split beta_j = r a~, beta_partner = (1 - r) b~
    let mut s = head;
    for j in pairs(n) {
        let t = p.lifted_pair(j);
        let r = crate::membership::R_SPLIT;
        let size = (t.c - r * t.a.norm() - (1.0 - r) * t.b.norm()) / t.c;
        let resid = (t.b - t.a.conj() * t.q).norm().max((t.a - t.b.conj() * t.q).norm());
        s = s.min(size).min(-resid / t.c);
    }
    s
}

pub fn check_all(p: &SchwarzProblem) -> Result<Vec<ConditionMargin>> {
    check_all_with(p, DEFAULT_BAND)
}

pub fn check_all_with(p: &SchwarzProblem, band: f64) -> Result<Vec<ConditionMargin>> {
    (2..=11).map(|c| check_condition_with(p, c, band)).collect()
}

/// (X_j, X_{n-j}, J) for pair j.
pub fn xj_quantities(p: &SchwarzProblem, j: usize) -> Result<(f64, f64, f64)> {
    if j == 0 || j >= p.n {
        return Err(Error::domain(format!("index j = {j} out of range")));
    }
    let q = Pair::of(&p.target, j);
    if q.degenerate() {
        return Err(Error::Degenerate(format!("y_j y_(n-j) = C^2 q at j = {j}")));
    }
    let l = p.modulus();
    let l2 = l * l;
    let c2 = q.c * q.c;
    let m = q.mix();
    let (aa, bb, qq) = (q.a.norm_sqr(), q.b.norm_sqr(), q.q.norm_sqr());
    let xj = l / m * (c2 - aa - bb / l2 + c2 * qq / l2);
    let xnj = l / m * (c2 - aa / l2 - bb + c2 * qq / l2);
    let big_j = l * (c2 - bb) / m;
    Ok((xj, xnj, big_j))
}

/// The matrix K_Z(rho) assembled entrywise.
pub fn k_rho(z: &Mat2, rho: f64) -> Result<Mat2> {
    if op_norm_unchecked(z) >= 1.0 {
        return Err(Error::domain("K_Z(rho) needs ||Z|| < 1"));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain("K_Z(rho) needs 0 <= rho < 1"));
    }
    let id = Mat2::identity();
    let r2 = Cplx::new(rho * rho, 0.0);
    let zs = z.adjoint();
    let inv_r = (id - zs * *z).inverse()?;
    let inv_l = (id - *z * zs).inverse()?;
    let k11 = ((id - (zs * *z).scale(r2)) * inv_r).a11;
    let k12 = (inv_l * *z).a21 * (1.0 - rho * rho);
    let k22 = ((*z * zs - id.scale(r2)) * inv_l).a22;
    Ok(Mat2::new(Cplx::new(k11.re, 0.0), k12, k12.conj(), Cplx::new(k22.re, 0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurCertificate {
    pub j: usize,
    pub branch: Branch,
    #[serde(rename = "Z")]
    pub z: Mat2,
    pub w_j: Cplx,
    #[serde(rename = "K")]
    pub k: Option<Mat2>,
    pub alpha: Option<Vec2>,
    pub feasible: bool,
    pub marginal: bool,
    /// ||Phi|| for the branch-selected index.
    pub d_norm: f64,
}

/// Z_j = [[a / (C lambda0), w], [w, b / C]], w^2 = (ab - C^2 q) / (C^2 lambda0),
/// for the oriented pair (a, b).
pub fn z_matrix(pair: &Pair, lambda0: Cplx) -> (Mat2, Cplx) {
    let c2 = pair.c * pair.c;
    let w = ((pair.a * pair.b - pair.q * c2) / (lambda0 * c2)).sqrt();
    (Mat2::new(pair.a / (lambda0 * pair.c), w, w, pair.b / pair.c), w)
}

pub fn schur_certificates(p: &SchwarzProblem) -> Result<Vec<SchurCertificate>> {
    schur_certificates_with(p, DEFAULT_BAND)
}

pub fn schur_certificates_with(p: &SchwarzProblem, band: f64) -> Result<Vec<SchurCertificate>> {
    let l = p.modulus();
    let mut out = Vec::new();
    for j in pairs(p.n) {
        let (pair, branch) = p.oriented(j);
        let d = pair.d_norm();
        if pair.degenerate() {
            let z = Mat2::diag(pair.a / (p.lambda0 * pair.c), pair.b / pair.c);
            out.push(SchurCertificate {
                j,
                branch,
                z,
                w_j: ZERO,
                k: None,
                alpha: None,
                feasible: d <= l + band,
                marginal: (d - l).abs() <= band,
                d_norm: d,
            });
            continue;
        }
        let (z, w) = z_matrix(&pair, p.lambda0);
        let mut cert =
            SchurCertificate { j, branch, z, w_j: w, k: None, alpha: None, feasible: false, marginal: false, d_norm: d };
        if !(d <= l + band) {
            out.push(cert);
            continue;
        }
        if (d - l).abs() <= band {
            cert.feasible = true;
            cert.marginal = true;
            out.push(cert);
            continue;
        }
        let k = k_rho(&z, l)?;
        let e = herm_eig(&k)?;
        cert.k = Some(k);
        cert.alpha = Some([e.v_min[0].conj(), e.v_min[1].conj()]);
        cert.feasible = e.lam_min <= 0.0;
        out.push(cert);
    }
    Ok(out)
}

/// Is y in J_n (the proportional subset of G~_n)?
pub fn in_j_n(y: &CPoint) -> Result<bool> {
    let n = y.n;
    if n < 2 {
        return Err(Error::domain("J_n needs n >= 2"));
    }
    if !in_tilde_g(y, Select::All)?.verdict {
        return Ok(false);
    }
    let nf = n as f64;
    let (y1, yn1) = (y.y(1), y.y(n - 1));
    let tol = 1e-10 * (1.0 + y1.norm() + yn1.norm());
    let close = |a: Cplx, b: Cplx, c: f64| (a - b).norm() <= tol * c;
    for j in 2..=n / 2 {
        let c = binomf(n, j);
        if 2 * j == n {
            if !close(y.y(j), (y1 + yn1) * (c / (2.0 * nf)), c) {
                return Ok(false);
            }
        } else if !close(y.y(j), y1 * (c / nf), c) || !close(y.y(n - j), yn1 * (c / nf), c) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

/// pi_{2k+1} or pi_{2k} of (B_1, ..., B_k).
pub fn assemble_pi(matrices: &[Mat2], parity: Parity) -> Result<CPoint> {
    let k = matrices.len();
    if k == 0 {
        return Err(Error::domain("assemble_pi needs at least one matrix"));
    }
    let q = matrices[0].det();
    for (i, b) in matrices.iter().enumerate() {
        if (b.det() - q).norm() > 1e-11 * (1.0 + q.norm()) {
            return Err(Error::domain(format!("det B_{} differs from det B_1", i + 1)));
        }
        if op_norm_unchecked(b) > 1.0 + 1e-9 {
            return Err(Error::domain(format!("||B_{}|| exceeds 1", i + 1)));
        }
    }
    let n = match parity {
        Parity::Odd => 2 * k + 1,
        Parity::Even => 2 * k,
    };
    let mut coords = vec![ZERO; n];
    coords[n - 1] = q;
    for (idx, b) in matrices.iter().enumerate() {
        let j = idx + 1;
        let c = binomf(n, j);
        if 2 * j == n {
            coords[j - 1] = (b.a11 + b.a22) * (c / 2.0);
        } else {
            coords[j - 1] = b.a11 * c;
            coords[n - j - 1] = b.a22 * c;
        }
    }
    Ok(CPoint { n, coords })
}

/// Necessary condition for maps into G_n: sup |f_{s0}| <= |lambda0|.
pub fn gn_schwarz_bound(s0: &CPoint, lambda0: Cplx, grid: usize) -> Result<ConditionMargin> {
    let l = lambda0.norm();
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::Precondition(format!("|lambda0| = {l} not in (0, 1)")));
    }
    let sup = costara_sup(s0, grid)?;
    let slack = if sup.is_finite() { l - sup } else { -1.0 };
    Ok(ConditionMargin::closed(CondId::C2, slack, DEFAULT_BAND))
}

/// (D_2(y), D_1(y)) for y in G~_3 with |y_2| <= |y_1|.
pub fn d_norm_pair(y: &CPoint) -> Result<(f64, f64)> {
    if y.n != 3 {
        return Err(Error::Precondition("d_norm_pair needs n = 3".into()));
    }
    if y.y(2).norm() > y.y(1).norm() {
        return Err(Error::Precondition("d_norm_pair needs |y_2| <= |y_1|".into()));
    }
    Ok((Pair::of(y, 2).d_norm(), Pair::of(y, 1).d_norm()))
}

/// Convenience used by the distance and interpolation modules.
pub(crate) fn max_d(y: &CPoint) -> f64 {
    (1..y.n).map(|j| Pair::of(y, j).d_norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clinalg::{c, r, ONE};
    use crate::membership::in_tilde_g;
    use crate::sampling;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn family_point() -> CPoint {
        CPoint::new(vec![r(1.5), r(0.75), r(0.5)]).unwrap()
    }

    #[test]
    fn origin_target() {
        let p = SchwarzProblem::new(c(0.3, 0.4), CPoint::zero(4)).unwrap();
        for m in check_all(&p).unwrap() {
            assert!(m.holds, "{m:?}");
        }
        assert!((check_condition(&p, 2).unwrap().slack - 0.5).abs() < 1e-15);
        assert!((check_condition(&p, 3).unwrap().slack - 0.5).abs() < 1e-15);
        assert_eq!(lift(&p).point, CPoint::zero(5));
        for cert in schur_certificates(&p).unwrap() {
            assert!(cert.feasible && cert.z == Mat2::zero());
        }
    }

    #[test]
    fn family_point_data() {
        let p = SchwarzProblem::new(r(-0.8), family_point()).unwrap();
        let m = check_condition(&p, 2).unwrap();
        assert!(m.holds && m.boundary && m.slack.abs() < 1e-12);
        let lifted = lift(&p);
        let want = CPoint::new(vec![r(-15.0 / 8.0), r(0.75), r(-5.0 / 8.0)]).unwrap();
        assert!(lifted.point.max_diff(&want) < 1e-15);
        let rep = in_tilde_gamma(&lifted.point, Select::All).unwrap();
        assert!(rep.verdict);
        let certs = schur_certificates(&p).unwrap();
        assert!(certs[0].marginal && certs[0].feasible);
        assert!((op_norm_unchecked(&certs[0].z) - 1.0).abs() < 1e-12);
        let (_, _, big_j) = xj_quantities(&p, 1).unwrap();
        assert!((big_j - 2.0).abs() < 1e-12);
        let p = SchwarzProblem::new(r(0.5), family_point()).unwrap();
        assert!(!check_condition(&p, 2).unwrap().holds);
        assert!(check_condition(&p, 12).is_err());
    }

    #[test]
    fn shrunk_family_point_is_strict() {
        let p = SchwarzProblem::new(r(-0.8), family_point().scaled(r(0.9))).unwrap();
        let certs = schur_certificates(&p).unwrap();
        let c = &certs[0];
        assert!(c.feasible && !c.marginal);
        assert!(c.k.unwrap().det().re < 0.0);
        let (x1, x2, big_j) = xj_quantities(&p, 1).unwrap();
        assert!(x1 > 2.0 && x2 > 2.0);
        assert!(big_j + 1.0 / big_j > x2);
    }

    #[test]
    fn k_rho_examples() {
        let k = k_rho(&Mat2::zero(), 0.6).unwrap();
        assert!(k.max_diff(&Mat2::diag(ONE, r(-0.36))) < 1e-15);
        let z = Mat2::new(c(0.2, 0.1), c(-0.3, 0.0), c(0.1, 0.4), c(0.0, -0.2));
        let k = k_rho(&z, 0.0).unwrap();
        let id = Mat2::identity();
        let a = (id - z.adjoint() * z).inverse().unwrap();
        let b = (id - z * z.adjoint()).inverse().unwrap() * z;
        assert!((k.a11 - a.a11).norm() < 1e-14);
        assert!((k.a12 - b.a21).norm() < 1e-14);
        assert!(k_rho(&Mat2::identity(), 0.5).is_err());
    }

    #[test]
    fn assemble_examples() {
        assert_eq!(assemble_pi(&[Mat2::zero(); 2], Parity::Odd).unwrap(), CPoint::zero(5));
        let b = Mat2::new(r(0.5), r(0.1), r(0.2), r(0.25));
        let y = assemble_pi(&[b], Parity::Odd).unwrap();
        assert_eq!(y.coords, vec![r(1.5), r(0.75), b.det()]);
        let other = Mat2::new(r(0.1), r(0.0), r(0.0), r(0.1));
        assert!(assemble_pi(&[b, other], Parity::Odd).is_err());
    }

    #[test]
    fn j_n_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert!(in_j_n(&sampling::tilde_g(&mut rng, 3, 1.0)).unwrap());
        }
        let y = sampling::jn_from(5, c(0.5, 0.1), c(-0.3, 0.2), c(0.1, 0.0));
        assert!((y.y(2) - y.y(1) * 2.0).norm() < 1e-15);
        assert!(in_j_n(&y).unwrap());
        let g = sampling::tilde_g(&mut rng, 5, 1.0);
        assert!(!in_j_n(&g).unwrap());
    }

    #[test]
    fn d_norm_pair_examples() {
        assert_eq!(d_norm_pair(&CPoint::zero(3)).unwrap(), (0.0, 0.0));
        let (lhs, rhs) = d_norm_pair(&family_point()).unwrap();
        assert!((lhs - 0.5).abs() < 1e-12 && (rhs - 0.8).abs() < 1e-12);
        assert!(d_norm_pair(&family_point().swapped()).is_err());
    }

    #[test]
    fn gn_bound_examples() {
        let m = gn_schwarz_bound(&CPoint::zero(3), c(0.0, 0.7), 256).unwrap();
        assert!(m.holds && (m.slack - 0.7).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let lam = sampling::disc(&mut rng, 0.95);
            let z = sampling::polydisc(&mut rng, 4, sampling::Stratum::Open(0.99));
            let zl: Vec<Cplx> = z.iter().map(|v| v * lam).collect();
            let s0 = crate::membership::symmetrize(&zl).unwrap();
            assert!(gn_schwarz_bound(&s0, lam, 512).unwrap().holds);
        }
        let s0 = crate::membership::symmetrize(&[r(0.9), r(0.9), r(0.9)]).unwrap();
        assert!(!gn_schwarz_bound(&s0, r(0.3), 512).unwrap().holds);
    }

    fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> SchwarzProblem {
        let y = sampling::tilde_g(rng, n, 1.0);
        let lam = sampling::unit(rng) * rng.gen_range(0.02..0.999);
        SchwarzProblem::new(lam, y).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn schwarz_equivalence(seed in any::<u64>(), n in 3usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_problem(&mut rng, n);
            let ms = check_all(&p).unwrap();
            if ms.iter().all(|m| !m.boundary) {
                let v3 = ms[1].holds;
                for m in &ms {
                    if m.cond != CondId::C2 && m.cond != CondId::C5 {
                        prop_assert_eq!(m.holds, v3, "{:?}", ms);
                    }
                }
                if ms[0].holds {
                    prop_assert!(ms.iter().all(|m| m.holds));
                }
            }
        }

        #[test]
        fn z_norm_dichotomy(seed in any::<u64>(), n in 3usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_problem(&mut rng, n);
            let l = p.modulus();
            for j in pairs(n) {
                let (pair, _) = p.oriented(j);
                if pair.degenerate() { continue; }
                let (z, _) = z_matrix(&pair, p.lambda0);
                let zn = op_norm_unchecked(&z);
                let d = pair.d_norm();
                if (d - l).abs() > 1e-7 {
                    prop_assert_eq!(zn < 1.0, d < l);
                }
            }
        }

        #[test]
        fn x_bounds(seed in any::<u64>(), n in 3usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_problem(&mut rng, n);
            if check_condition(&p, 3).unwrap().slack > 1e-7 {
                for j in pairs(n) {
                    if let Ok((x1, x2, _)) = xj_quantities(&p, j) {
                        prop_assert!(x1 > 2.0 && x2 > 2.0);
                    }
                }
            }
        }

        #[test]
        fn d_norm_pair_sweep(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut y = sampling::tilde_g(&mut rng, 3, 1.0);
            if y.y(2).norm() > y.y(1).norm() { y = y.swapped(); }
            let (lhs, rhs) = d_norm_pair(&y).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn assembled_points_are_inside(seed in any::<u64>(), k in 1usize..4, odd in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // contractions with a common determinant: diag(d, q/d) rotated
            let q = sampling::disc(&mut rng, 0.5);
            let mats: Vec<Mat2> = (0..k).map(|_| {
                let t = rng.gen_range(q.norm().sqrt()..1.0) * 0.99;
                let d = sampling::unit(&mut rng) * t.max(1e-3);
                let u = crate::clinalg::c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let v = crate::clinalg::c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let nrm = (u.norm_sqr() + v.norm_sqr()).sqrt();
                let uu = Mat2::new(u / nrm, -v.conj() / nrm, v / nrm, u.conj() / nrm);
                uu * Mat2::diag(d, q / d) * uu.adjoint()
            }).collect();
            let parity = if odd { Parity::Odd } else { Parity::Even };
            if let Ok(y) = assemble_pi(&mats, parity) {
                prop_assert!(in_tilde_g(&y, Select::All).unwrap().verdict);
            }
        }
    }
}
