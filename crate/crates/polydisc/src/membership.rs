//! Membership tests for G~_n, Gamma~_n, G_n, Gamma_n and b Gamma_n.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::clinalg::{op_norm_unchecked, Cplx, Mat2, ONE, ZERO};
use crate::error::{Error, Result};
use crate::mobius::{CPoint, Pair};

pub const DEFAULT_BAND: f64 = 1e-7;

/// Tolerance deciding |p| = 1 for the distinguished-boundary route.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CondId {
    C2,
    C3,
    C3p,
    C4,
    C4p,
    C5,
    C5p,
    C6,
    C7,
    C8,
    C9,
    C10,
    /// Only used by the Schwarz lemma suite.
    C11,
}

impl CondId {
    /// The membership conditions; C11 belongs to the Schwarz suite only.
    pub const ALL: [CondId; 12] = [
        CondId::C2,
        CondId::C3,
        CondId::C3p,
        CondId::C4,
        CondId::C4p,
        CondId::C5,
        CondId::C5p,
        CondId::C6,
        CondId::C7,
        CondId::C8,
        CondId::C9,
        CondId::C10,
    ];

    pub fn parse(s: &str) -> Result<CondId> {
        let key = s.trim().to_ascii_uppercase().replace('\'', "P");
        CondId::ALL
            .iter()
            .copied()
            .find(|c| format!("{c:?}").to_ascii_uppercase() == key)
            .ok_or_else(|| Error::input("cond", format!("unknown condition `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionMargin {
    pub cond: CondId,
    pub holds: bool,
    pub slack: f64,
    pub boundary: bool,
}

impl ConditionMargin {
    pub fn open(cond: CondId, slack: f64, band: f64) -> Self {
        ConditionMargin { cond, holds: slack > 0.0, slack, boundary: slack.abs() < band }
    }

    pub fn closed(cond: CondId, slack: f64, band: f64) -> Self {
        ConditionMargin { cond, holds: slack >= -band, slack, boundary: slack.abs() < band }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetId {
    TildeG,
    TildeGamma,
    G,
    Gamma,
    BGamma,
}

/// A zero of C - y_j z - y_{n-j} w + C q z w found by the torus scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusZero {
    pub j: usize,
    pub z: Cplx,
    pub w: Cplx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub point: CPoint,
    pub set_id: SetId,
    pub verdict: bool,
    pub per_condition: Vec<ConditionMargin>,
    pub recursion_trace: Vec<CPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_zero: Option<TorusZero>,
}

impl MembershipReport {
    pub fn margin(&self, cond: CondId) -> Option<&ConditionMargin> {
        self.per_condition.iter().find(|m| m.cond == cond)
    }

    /// True when some reported margin sits inside the boundary band.
    pub fn near_boundary(&self) -> bool {
        self.per_condition.iter().any(|m| m.boundary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Select {
    All,
    One(CondId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub band: f64,
    /// Circle samples for the C2 zero search; 0 disables it.
    pub torus_grid: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { band: DEFAULT_BAND, torus_grid: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaVector {
    pub n: usize,
    pub betas: Vec<Cplx>,
}

/// Pair indices 1..=floor(n/2).
pub fn pairs(n: usize) -> std::ops::RangeInclusive<usize> {
    1..=n / 2
}

fn slack_of_inf(d: f64) -> f64 {
    if d.is_finite() {
        1.0 - d
    } else {
        -1.0
    }
}

/// min_j of per-pair slacks for every condition, open reading.
fn open_slacks(p: &Pair) -> [f64; 12] {
    if p.degenerate() {
        let s = (1.0 - p.a.norm() / p.c).min(1.0 - p.b.norm() / p.c);
        return [s; 12];
    }
    let c = p.c;
    let c2 = c * c;
    let (aa, bb) = (p.a.norm_sqr(), p.b.norm_sqr());
    let qq = p.q.norm_sqr();
    let m = p.mix();
    let ra = (p.a - p.b.conj() * p.q).norm();
    let rb = (p.b - p.a.conj() * p.q).norm();
    let c7 = (c * (1.0 - qq) - rb - ra) / c;
    let c3 = slack_of_inf(p.d_norm());
    let c3p = slack_of_inf(p.swap().d_norm());
    let c4 = (c2 - bb - c * ra - m) / c2;
    let c4p = (c2 - aa - c * rb - m) / c2;
    let c5 = ((c2 - aa + bb - c2 * qq - 2.0 * c * rb) / c2).min(1.0 - p.b.norm() / c);
    let c5p = ((c2 - bb + aa - c2 * qq - 2.0 * c * ra) / c2).min(1.0 - p.a.norm() / c);
    let c6 = (1.0 - p.q.norm()).min((c2 - aa - bb + c2 * qq - 2.0 * m) / c2);
    let c8 = 1.0 - min_norm_completion(p);
    let c9 = 1.0 - op_norm_unchecked(&symmetric_b(p));
    let c10 = beta_slack(p);
    [c7, c3, c3p, c4, c4p, c5, c5p, c6, c7, c8, c9, c10]
}

fn closed_slacks(p: &Pair) -> [f64; 12] {
    if p.degenerate() {
        let s = (1.0 - p.a.norm() / p.c).min(1.0 - p.b.norm() / p.c);
        return [s; 12];
    }
    let qn = p.q.norm();
    let mut out = open_slacks(p);
    let c = p.c;
    if qn >= 1.0 - 1e-12 {
        out[8] = out[8].min((c - p.a.norm()) / c);
        out[0] = out[8];
    }
    out[11] = closed_beta_slack(p);
    out
}

/// Diagonal (a/C, b/C) with the off-diagonal product fixed to ab/C^2 - q;
/// smallest operator norm over the free scaling of the off-diagonal pair.
fn min_norm_completion(p: &Pair) -> f64 {
    let prod = p.a * p.b / (p.c * p.c) - p.q;
    let d1 = p.a / p.c;
    let d2 = p.b / p.c;
    if prod.norm() == 0.0 {
        return op_norm_unchecked(&Mat2::diag(d1, d2));
    }
    let s0 = prod.norm().sqrt();
    let f = |t: f64| {
        let k1 = s0 * t.exp();
        op_norm_unchecked(&Mat2::new(d1, Cplx::new(k1, 0.0), prod / k1, d2))
    };
    let (mut lo, mut hi) = (-8.0f64, 8.0f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f(0.0).min(f1).min(f2)
}

fn symmetric_b(p: &Pair) -> Mat2 {
    let k = (p.a * p.b / (p.c * p.c) - p.q).sqrt();
    Mat2::new(p.a / p.c, k, k, p.b / p.c)
}

fn beta_pair(p: &Pair) -> (Cplx, Cplx) {
    let den = 1.0 - p.q.norm_sqr();
    ((p.a - p.b.conj() * p.q) / den, (p.b - p.a.conj() * p.q) / den)
}

fn beta_slack(p: &Pair) -> f64 {
    let qn = p.q.norm();
    if qn >= 1.0 {
        return 1.0 - qn;
    }
    let (b1, b2) = beta_pair(p);
    (1.0 - qn).min((p.c - b1.norm() - b2.norm()) / p.c)
}

/// Free split parameter for the |q| = 1 case of the beta condition.
pub const R_SPLIT: f64 = 0.5;

fn closed_beta_slack(p: &Pair) -> f64 {
    let qn = p.q.norm();
    if qn > 1.0 + 1e-12 {
        return 1.0 - qn;
    }
    if qn >= 1.0 - 1e-12 {
        // beta_j = r y_j, beta_{n-j} = (1 - r) y_{n-j}; reconstruction needs y_j = conj(y_{n-j}) q
        let size = (p.c - R_SPLIT * p.a.norm() - (1.0 - R_SPLIT) * p.b.norm()) / p.c;
        let resid = (p.b - p.a.conj() * p.q).norm().max((p.a - p.b.conj() * p.q).norm());
        return size.min(-resid / p.c);
    }
    let (b1, b2) = beta_pair(p);
    (p.c - b1.norm() - b2.norm()) / p.c
}

fn check_n(y: &CPoint, min: usize) -> Result<()> {
    if y.n < min {
        return Err(Error::domain(format!("dimension n = {} below {min}", y.n)));
    }
    Ok(())
}

fn torus_zero(y: &CPoint, grid: usize) -> Option<TorusZero> {
    for j in pairs(y.n) {
        let p = Pair::of(y, j);
        for k in 0..grid {
            let z = Cplx::from_polar(1.0, std::f64::consts::TAU * k as f64 / grid as f64);
            let den = p.b - p.q * z * p.c;
            if den.norm() < 1e-14 {
                continue;
            }
            let w = (p.a * z - p.c) / -den;
            if w.norm() <= 1.0 {
                return Some(TorusZero { j, z, w });
            }
        }
    }
    None
}

fn build_report(
    y: &CPoint,
    set_id: SetId,
    sel: Select,
    opts: &Options,
    closed: bool,
) -> MembershipReport {
    let mut mins = [f64::INFINITY; 12];
    for j in pairs(y.n) {
        let p = Pair::of(y, j);
        let s = if closed { closed_slacks(&p) } else { open_slacks(&p) };
        for (m, v) in mins.iter_mut().zip(s) {
            *m = m.min(v);
        }
    }
    let make = |cond: CondId, slack: f64| {
        if closed {
            ConditionMargin::closed(cond, slack, opts.band)
        } else {
            ConditionMargin::open(cond, slack, opts.band)
        }
    };
    let per_condition: Vec<ConditionMargin> = CondId::ALL
        .iter()
        .zip(mins)
        .filter(|(c, _)| sel == Select::All || sel == Select::One(**c))
        .map(|(c, s)| make(*c, s))
        .collect();
    let verdict_cond = match sel {
        Select::All => CondId::C7,
        Select::One(c) => c,
    };
    let verdict = per_condition.iter().find(|m| m.cond == verdict_cond).map(|m| m.holds).unwrap_or(false);
    let torus_zero = if opts.torus_grid > 0 && !closed && matches!(sel, Select::All | Select::One(CondId::C2)) {
        torus_zero(y, opts.torus_grid)
    } else {
        None
    };
    MembershipReport {
        point: y.clone(),
        set_id,
        verdict,
        per_condition,
        recursion_trace: Vec::new(),
        torus_zero,
    }
}

pub fn in_tilde_g(y: &CPoint, sel: Select) -> Result<MembershipReport> {
    in_tilde_g_with(y, sel, &Options::default())
}

pub fn in_tilde_g_with(y: &CPoint, sel: Select, opts: &Options) -> Result<MembershipReport> {
    check_n(y, 2)?;
    Ok(build_report(y, SetId::TildeG, sel, opts, false))
}

pub fn in_tilde_gamma(y: &CPoint, sel: Select) -> Result<MembershipReport> {
    in_tilde_gamma_with(y, sel, &Options::default())
}

pub fn in_tilde_gamma_with(y: &CPoint, sel: Select, opts: &Options) -> Result<MembershipReport> {
    check_n(y, 2)?;
    Ok(build_report(y, SetId::TildeGamma, sel, opts, true))
}

pub fn beta_recover(y: &CPoint) -> Result<BetaVector> {
    let q = y.q();
    if q.norm() >= 1.0 {
        return Err(Error::domain("beta recovery needs |q| < 1"));
    }
    let den = 1.0 - q.norm_sqr();
    let n = y.n;
    let betas = (1..n).map(|j| (y.y(j) - y.y(n - j).conj() * q) / den).collect();
    Ok(BetaVector { n, betas })
}

/// Symmetric B_j = [[y_j/C, k], [k, y_{n-j}/C]] with k^2 = y_j y_{n-j}/C^2 - q.
pub fn b_matrices(y: &CPoint) -> Result<Vec<Mat2>> {
    check_n(y, 2)?;
    Ok(pairs(y.n).map(|j| symmetric_b(&Pair::of(y, j))).collect())
}

fn base_disc(s: &CPoint, set_id: SetId, closed: bool, band: f64) -> MembershipReport {
    let m = s.coords[0].norm();
    let verdict = if closed { m <= 1.0 + band } else { m < 1.0 };
    MembershipReport {
        point: s.clone(),
        set_id,
        verdict,
        per_condition: Vec::new(),
        recursion_trace: Vec::new(),
        torus_zero: None,
    }
}

fn q_point(s: &CPoint) -> Result<CPoint> {
    CPoint::new(beta_recover(s)?.betas)
}

pub fn in_g(s: &CPoint) -> Result<MembershipReport> {
    in_g_with(s, &Options::default())
}

pub fn in_g_with(s: &CPoint, opts: &Options) -> Result<MembershipReport> {
    if s.n == 1 {
        return Ok(base_disc(s, SetId::G, false, opts.band));
    }
    let mut report = in_tilde_g_with(s, Select::All, opts)?;
    report.set_id = SetId::G;
    if s.n == 2 || !report.verdict {
        return Ok(report);
    }
    let q = q_point(s)?;
    let inner = in_g_with(&q, opts)?;
    report.verdict = inner.verdict;
    report.recursion_trace.push(q);
    report.recursion_trace.extend(inner.recursion_trace);
    Ok(report)
}

pub fn in_gamma(s: &CPoint) -> Result<MembershipReport> {
    in_gamma_with(s, &Options::default())
}

pub fn in_gamma_with(s: &CPoint, opts: &Options) -> Result<MembershipReport> {
    gamma_rec(s, opts, input_error(s))
}

/// First-order bound on the rounding error already carried by the coordinates.
fn input_error(s: &CPoint) -> f64 {
    s.n as f64 * f64::EPSILON * (1.0 + s.max_abs())
}

/// Error bound for the Q-point of s, given the bound err on s. The division
/// by 1 - |q|^2 makes deep levels ill-conditioned near the distinguished boundary.
fn q_point_error(s: &CPoint, q: &CPoint, err: f64) -> f64 {
    let qn = s.q().norm();
    err * (1.0 + qn + s.max_abs() + 2.0 * qn * q.max_abs()) / (1.0 - qn * qn)
}

fn gamma_rec(s: &CPoint, opts: &Options, err: f64) -> Result<MembershipReport> {
    if s.n == 1 {
        return Ok(base_disc(s, SetId::Gamma, true, opts.band.max(err)));
    }
    let unit_tol = UNIT_TOL.max(err);
    let pn = s.q().norm();
    let mut report = in_tilde_gamma_with(s, Select::All, &Options { band: opts.band.max(err), ..*opts })?;
    report.set_id = SetId::Gamma;
    if pn > 1.0 + unit_tol {
        report.verdict = false;
        return Ok(report);
    }
    if (pn - 1.0).abs() <= unit_tol {
        let (verdict, trace) = b_gamma_trace(s, opts, err)?;
        report.verdict = verdict;
        report.recursion_trace = trace;
        return Ok(report);
    }
    if !report.verdict || s.n == 2 {
        return Ok(report);
    }
    let q = q_point(s)?;
    let inner = gamma_rec(&q, opts, q_point_error(s, &q, err))?;
    report.verdict = inner.verdict;
    report.recursion_trace.push(q);
    report.recursion_trace.extend(inner.recursion_trace);
    Ok(report)
}

pub fn in_b_gamma(s: &CPoint) -> Result<bool> {
    in_b_gamma_with(s, &Options::default())
}

pub fn in_b_gamma_with(s: &CPoint, opts: &Options) -> Result<bool> {
    check_n(s, 2)?;
    Ok(b_gamma_trace(s, opts, input_error(s))?.0)
}

/// Scaled derivative point ((n-1) s_1 / n, ..., s_{n-1} / n).
fn derivative_point(s: &CPoint) -> Result<CPoint> {
    let n = s.n;
    CPoint::new((1..n).map(|j| s.y(j) * ((n - j) as f64 / n as f64)).collect())
}

fn b_gamma_trace(s: &CPoint, opts: &Options, err: f64) -> Result<(bool, Vec<CPoint>)> {
    let n = s.n;
    let p = s.q();
    let unit_tol = UNIT_TOL.max(err);
    if (p.norm() - 1.0).abs() > unit_tol {
        return Ok((false, Vec::new()));
    }
    for j in 1..n {
        let lhs = s.y(j);
        if (lhs - s.y(n - j).conj() * p).norm() > unit_tol * (1.0 + lhs.norm() + s.y(n - j).norm()) {
            return Ok((false, Vec::new()));
        }
    }
    let d = derivative_point(s)?;
    let inner = gamma_rec(&d, opts, err)?;
    let mut trace = vec![d];
    trace.extend(inner.recursion_trace);
    Ok((inner.verdict, trace))
}

/// Elementary symmetric functions (s_1, ..., s_{n-1}, p) of z.
pub fn symmetrize(z: &[Cplx]) -> Result<CPoint> {
    let n = z.len();
    let mut e = vec![ZERO; n + 1];
    e[0] = ONE;
    for (m, zm) in z.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            let prev = e[k - 1];
            e[k] += zm * prev;
        }
    }
    CPoint::new(e[1..].to_vec())
}

/// Coefficients (ascending powers) of the numerator and denominator of f_s.
fn costara_polys(s: &CPoint) -> (Vec<Cplx>, Vec<Cplx>) {
    let n = s.n;
    let sk = |k: usize| if k == 0 { ONE } else { s.y(k) };
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let num = (1..=n).map(|k| sk(k) * (sign(k) * k as f64)).collect();
    let den = (0..n).map(|k| sk(k) * (sign(k) * (n - k) as f64)).collect();
    (num, den)
}

fn horner(coef: &[Cplx], z: Cplx) -> Cplx {
    coef.iter().rev().fold(ZERO, |acc, a| acc * z + a)
}

pub fn costara_f(s: &CPoint, z: Cplx) -> Result<Cplx> {
    let (num, den) = costara_polys(s);
    let d = horner(&den, z);
    if d.norm() < 1e-300 {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    Ok(horner(&num, z) / d)
}

/// Roots of a polynomial given by ascending coefficients, from the
/// eigenvalues of its companion matrix.
pub fn poly_roots(coef: &[Cplx]) -> Vec<Cplx> {
    let scale = coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coef.len() - 1;
    while deg > 0 && coef[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coef[deg];
    let mut m = DMatrix::<Cplx>::zeros(deg, deg);
    for i in 0..deg {
        m[(0, i)] = -coef[deg - 1 - i] / lead;
        if i + 1 < deg {
            m[(i + 1, i)] = ONE;
        }
    }
    balance(&mut m);
    let schur = nalgebra::Schur::new(m);
    let t = schur.unpack().1;
    (0..deg).map(|i| t[(i, i)]).collect()
}

/// Diagonal similarity balancing (Parlett-Reinsch, powers of two).
fn balance(m: &mut DMatrix<Cplx>) {
    let n = m.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut rsum = 0.0;
            let mut csum = 0.0;
            for k in 0..n {
                if k != i {
                    csum += m[(k, i)].norm();
                    rsum += m[(i, k)].norm();
                }
            }
            if csum == 0.0 || rsum == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = csum + rsum;
            let (mut c, mut r) = (csum, rsum);
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * s {
                done = false;
                for k in 0..n {
                    m[(i, k)] /= f;
                    m[(k, i)] *= f;
                }
            }
        }
    }
}

/// sup of |f_s| over the closed disc; +inf when a pole lies in it.
pub fn costara_sup(s: &CPoint, grid: usize) -> Result<f64> {
    if grid < 8 {
        return Err(Error::domain("grid must be at least 8"));
    }
    let (num, den) = costara_polys(s);
    let num_scale = num.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    for root in poly_roots(&den) {
        if root.norm() <= 1.0 + 1e-10 && horner(&num, root).norm() > 1e-8 * num_scale {
            return Ok(f64::INFINITY);
        }
    }
    let den_scale = den.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut best = 0.0f64;
    for k in 0..grid {
        let z = Cplx::from_polar(1.0, std::f64::consts::TAU * k as f64 / grid as f64);
        let d = horner(&den, z);
        if d.norm() <= 1e-14 * den_scale {
            continue;
        }
        best = best.max((horner(&num, z) / d).norm());
    }
    Ok(best)
}

/// (s_1 / lambda, ..., s_{n-1} / lambda^{n-1}, p / lambda^n).
pub fn scale_point(s: &CPoint, lambda: Cplx) -> Result<CPoint> {
    if lambda.norm() == 0.0 {
        return Err(Error::domain("scale_point needs lambda != 0"));
    }
    let inv = lambda.inv();
    let mut f = ONE;
    let coords = s
        .coords
        .iter()
        .map(|z| {
            f *= inv;
            z * f
        })
        .collect();
    CPoint::new(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clinalg::{c, r, I};
    use crate::mobius::binomf;
    use crate::sampling;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(v: &[Cplx]) -> CPoint {
        CPoint::new(v.to_vec()).unwrap()
    }

    fn strict_point() -> CPoint {
        pt(&[r(2.5), r(1.25), r(0.5)])
    }

    #[test]
    fn tilde_g_examples() {
        let rep = in_tilde_g(&CPoint::zero(4), Select::All).unwrap();
        assert!(rep.verdict);
        assert!(rep.per_condition.iter().all(|m| m.holds && m.slack > 0.0));
        assert!(in_tilde_g(&strict_point(), Select::All).unwrap().verdict);
        let rep = in_tilde_g(&pt(&[r(3.0), c(0.0, 3.0), ONE]), Select::All).unwrap();
        assert!(!rep.verdict);
        assert!(!rep.margin(CondId::C6).unwrap().holds);
        let one = in_tilde_g(&strict_point(), Select::One(CondId::C4p)).unwrap();
        assert_eq!(one.per_condition.len(), 1);
    }

    #[test]
    fn tilde_gamma_examples() {
        for n in 2..9 {
            let y = pt(&(1..n).map(|j| r(binomf(n, j))).chain([ONE]).collect::<Vec<_>>());
            assert!(in_tilde_gamma(&y, Select::All).unwrap().verdict, "n = {n}");
            assert!(!in_tilde_gamma(&y.scaled(I), Select::All).unwrap().verdict, "n = {n}");
        }
        let rep = in_tilde_gamma(&CPoint::zero(3), Select::All).unwrap();
        assert!(rep.verdict && rep.per_condition.iter().all(|m| m.slack > 0.0));
    }

    #[test]
    fn beta_examples() {
        assert!(beta_recover(&CPoint::zero(3)).unwrap().betas.iter().all(|b| *b == ZERO));
        let b = beta_recover(&strict_point()).unwrap();
        assert!((b.betas[0] - r(2.5)).norm() < 1e-15 && b.betas[1].norm() < 1e-15);
        assert!(beta_recover(&pt(&[ONE, ONE])).is_err());
    }

    #[test]
    fn b_matrix_examples() {
        for m in b_matrices(&CPoint::zero(5)).unwrap() {
            assert_eq!(m, Mat2::zero());
        }
        let deg = pt(&[r(1.0), r(0.25)]);
        let b = b_matrices(&deg).unwrap()[0];
        assert_eq!(b.a12, ZERO);
        assert!((op_norm_unchecked(&b) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn g_examples() {
        let rep = in_g(&strict_point()).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.recursion_trace.len(), 1);
        assert!(in_g(&pt(&[r(0.5)])).unwrap().verdict);
        assert!(!in_g(&pt(&[r(1.0)])).unwrap().verdict);
        for n in 3..6 {
            let mut coords = vec![ZERO; n];
            coords[0] = r((2 * n - 1) as f64 / 2.0);
            coords[n - 1] = r(0.5);
            // y_j = beta_j + conj(beta_{n-j}) q with beta = ((2n-1)/2, 0, ...)
            coords[n - 2] = r((2 * n - 1) as f64 / 4.0);
            let y = pt(&coords);
            assert!(in_tilde_g(&y, Select::All).unwrap().verdict, "n = {n}");
            assert!(!in_g(&y).unwrap().verdict, "n = {n}");
        }
    }

    #[test]
    fn gamma_examples() {
        assert!(in_gamma(&CPoint::zero(3)).unwrap().verdict);
        assert!(!in_b_gamma(&CPoint::zero(3)).unwrap());
        assert!(!in_gamma(&strict_point()).unwrap().verdict);
        assert!(costara_sup(&strict_point(), 4096).unwrap() > 1.0);
        assert!(in_b_gamma(&pt(&[r(2.0), ONE])).unwrap());
        let s = symmetrize(&[c(0.6, 0.8), r(-1.0), c(0.0, 1.0)]).unwrap();
        assert!(in_b_gamma(&s).unwrap());
        assert!(in_gamma(&s).unwrap().verdict);
    }

    #[test]
    fn symmetrize_examples() {
        assert_eq!(symmetrize(&[ZERO; 3]).unwrap(), CPoint::zero(3));
        assert_eq!(symmetrize(&[ONE, ONE]).unwrap(), pt(&[r(2.0), ONE]));
        let z = [r(0.5), c(0.0, 0.5), r(-0.5)];
        let s = symmetrize(&z).unwrap();
        // expand prod (t + z_i) directly
        let mut poly = vec![ONE];
        for zi in z {
            let mut next = vec![ZERO; poly.len() + 1];
            for (k, a) in poly.iter().enumerate() {
                next[k] += a * zi;
                next[k + 1] += a;
            }
            poly = next;
        }
        for k in 1..=3 {
            assert!((s.y(k) - poly[3 - k]).norm() < 1e-15);
        }
        assert!((s.y(1) - c(0.0, 0.5)).norm() < 1e-15);
        assert!((s.y(2) - r(-0.25)).norm() < 1e-15);
        assert!((s.q() - c(0.0, -0.125)).norm() < 1e-15);
    }

    #[test]
    fn costara_examples() {
        assert_eq!(costara_f(&CPoint::zero(3), c(0.3, 0.1)).unwrap(), ZERO);
        assert_eq!(costara_sup(&CPoint::zero(3), 64).unwrap(), 0.0);
        let s = symmetrize(&[c(0.3, 0.2), c(-0.5, 0.1)]).unwrap();
        assert!((costara_f(&s, ZERO).unwrap() + s.y(1) / 2.0).norm() < 1e-15);
        for n in 2..7 {
            let s = symmetrize(&vec![r(0.9); n]).unwrap();
            assert!(costara_sup(&s, 1024).unwrap() < 1.0);
        }
        // removable pole on the circle: f = -1
        assert!((costara_sup(&pt(&[r(2.0), ONE]), 64).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strict_point_costara_value() {
        let v = costara_sup(&strict_point(), 4096).unwrap();
        assert!(v > 1.0);
        assert!(v.is_infinite() || v > 1.0);
    }

    #[test]
    fn scale_examples() {
        let s = symmetrize(&[c(0.3, 0.2), c(-0.5, 0.1), r(0.7)]).unwrap();
        assert!(scale_point(&s, ONE).unwrap().max_diff(&s) == 0.0);
        assert!(scale_point(&s, ZERO).is_err());
        assert_eq!(scale_point(&CPoint::zero(3), c(0.2, 0.1)).unwrap(), CPoint::zero(3));
        let lam = c(0.3, -0.4);
        let z = [c(0.3, 0.2), c(-0.5, 0.1), r(0.7)];
        let zl: Vec<Cplx> = z.iter().map(|v| v * lam).collect();
        let scaled = scale_point(&symmetrize(&zl).unwrap(), lam).unwrap();
        assert!(scaled.max_diff(&symmetrize(&z).unwrap()) < 1e-14);
    }

    #[test]
    fn cond_parse() {
        assert_eq!(CondId::parse("c4'").unwrap(), CondId::C4p);
        assert_eq!(CondId::parse("C10").unwrap(), CondId::C10);
        assert!(CondId::parse("C11").is_err());
    }

    #[test]
    fn torus_falsifier_finds_zero_outside() {
        let opts = Options { torus_grid: 512, ..Options::default() };
        let rep = in_tilde_g_with(&pt(&[r(3.0), r(3.0), ONE]), Select::All, &opts).unwrap();
        assert!(rep.torus_zero.is_some());
        let rep = in_tilde_g_with(&strict_point(), Select::All, &opts).unwrap();
        assert!(rep.torus_zero.is_none());
    }

    fn agree(rep: &MembershipReport) -> bool {
        rep.near_boundary() || rep.per_condition.iter().all(|m| m.holds == rep.verdict)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conditions_agree(seed in any::<u64>(), n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for y in sampling::stratified(&mut rng, n, 30) {
                let g = in_tilde_g(&y, Select::All).unwrap();
                prop_assert!(agree(&g), "{:?}", g);
                let gm = in_tilde_gamma(&y, Select::All).unwrap();
                prop_assert!(agree(&gm), "{:?}", gm);
            }
        }

        #[test]
        fn swap_closure(seed in any::<u64>(), n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for y in sampling::stratified(&mut rng, n, 10) {
                let a = in_tilde_g(&y, Select::All).unwrap();
                let b = in_tilde_g(&y.swapped(), Select::All).unwrap();
                if !a.near_boundary() && !b.near_boundary() {
                    prop_assert_eq!(a.verdict, b.verdict);
                }
            }
        }

        #[test]
        fn beta_round_trip(seed in any::<u64>(), n in 2usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (y, beta) = sampling::tilde_g_with_beta(&mut rng, n, 0.999);
            let rec = beta_recover(&y).unwrap();
            for (a, b) in rec.betas.iter().zip(&beta) {
                prop_assert!((a - b).norm() <= 1e-11 * (1.0 + b.norm()));
            }
            let q = y.q();
            for j in 1..n {
                let back = rec.betas[j - 1] + rec.betas[n - j - 1].conj() * q;
                prop_assert!((back - y.y(j)).norm() <= 1e-11 * (1.0 + y.y(j).norm()));
            }
            for b in b_matrices(&y).unwrap() {
                prop_assert!((b.det() - q).norm() <= 1e-12 * (1.0 + b.fro_norm().powi(2)));
                prop_assert!(op_norm_unchecked(&b) < 1.0);
            }
        }

        #[test]
        fn g_two_equals_tilde_g(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for y in sampling::stratified(&mut rng, 2, 20) {
                let a = in_g(&y).unwrap();
                let b = in_tilde_g(&y, Select::All).unwrap();
                prop_assert_eq!(a.verdict, b.verdict);
            }
        }

        #[test]
        fn forward_points_in_g(seed in any::<u64>(), n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = sampling::polydisc(&mut rng, n, sampling::Stratum::Open(0.95));
            let s = symmetrize(&z).unwrap();
            prop_assert!(in_g(&s).unwrap().verdict);
            if n >= 2 {
                prop_assert!(costara_sup(&s, 256).unwrap() < 1.0);
            }
        }

        #[test]
        fn costara_agrees_with_g(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in sampling::g_candidates(&mut rng, n, 10) {
                let rep = in_g(&s).unwrap();
                let sup = costara_sup(&s, 2048).unwrap();
                if (sup - 1.0).abs() > 1e-3 && !rep.near_boundary() {
                    prop_assert_eq!(rep.verdict, sup < 1.0, "{:?} sup {}", s, sup);
                }
            }
        }
    }
}
