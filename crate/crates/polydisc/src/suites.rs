//! Seeded sample sweeps cross-checking the characterizations against each
//! other and against forward constructions. Samples are split into fixed
//! shards, each with its own ChaCha stream, so results do not depend on
//! the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clinalg::{op_norm_unchecked, r, Cplx, Mat2};
use crate::distances::distance;
use crate::error::Result;
use crate::geometry::separating_polynomial_seeded;
use crate::interpolation::{build_interpolant, default_nu, default_q, k_alpha, nu_window, z_nu, DiscFunction};
use crate::membership::{
    in_b_gamma, in_g, in_gamma, in_tilde_g, in_tilde_gamma, symmetrize, CondId, MembershipReport, Select,
};
use crate::mobius::{binomf, sup_on_torus, CPoint, Pair};
use crate::sampling::{self, Stratum};
use crate::schwarz::{check_all, k_rho, SchwarzProblem};

const SHARD: usize = 256;
const KEEP: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub n: Option<usize>,
    pub samples: usize,
    pub checked: usize,
    /// samples inside the boundary band, not compared
    pub skipped: usize,
    pub failures: usize,
    /// the first few failures, in sample order
    pub examples: Vec<String>,
    /// suite-specific worst value (max deviation, min margin, ...)
    pub worst: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }
}

enum Outcome {
    Pass(f64),
    Skip,
    Fail(String, f64),
}

#[derive(Default)]
struct Tally {
    checked: usize,
    skipped: usize,
    failures: usize,
    examples: Vec<String>,
    worst: Option<f64>,
}

fn run<F>(name: &str, n: Option<usize>, samples: usize, seed: u64, worse: fn(f64, f64) -> f64, f: F) -> SuiteReport
where
    F: Fn(&mut ChaCha8Rng) -> Outcome + Sync,
{
    let shards = samples.div_ceil(SHARD);
    let tallies: Vec<Tally> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((n.unwrap_or(0) as u64) << 32) | s as u64);
            let count = SHARD.min(samples - s * SHARD);
            let mut t = Tally::default();
            for _ in 0..count {
                let v = match f(&mut rng) {
                    Outcome::Skip => {
                        t.skipped += 1;
                        continue;
                    }
                    Outcome::Pass(v) => v,
                    Outcome::Fail(msg, v) => {
                        t.failures += 1;
                        if t.examples.len() < KEEP {
                            t.examples.push(msg);
                        }
                        v
                    }
                };
                t.checked += 1;
                t.worst = Some(t.worst.map_or(v, |w| worse(w, v)));
            }
            t
        })
        .collect();
    let mut out = SuiteReport {
        name: name.to_string(),
        n,
        samples,
        checked: 0,
        skipped: 0,
        failures: 0,
        examples: Vec::new(),
        worst: f64::NAN,
    };
    let mut worst: Option<f64> = None;
    for t in tallies {
        out.checked += t.checked;
        out.skipped += t.skipped;
        out.failures += t.failures;
        for e in t.examples {
            if out.examples.len() < KEEP {
                out.examples.push(e);
            }
        }
        if let Some(v) = t.worst {
            worst = Some(worst.map_or(v, |w| worse(w, v)));
        }
    }
    out.worst = worst.unwrap_or(f64::NAN);
    out
}

fn compact(p: &CPoint) -> String {
    serde_json::to_string(p).unwrap_or_default()
}

fn disagreement(rep: &MembershipReport) -> Option<String> {
    let bad: Vec<String> = rep
        .per_condition
        .iter()
        .filter(|m| m.holds != rep.verdict)
        .map(|m| format!("{:?}", m.cond))
        .collect();
    (!bad.is_empty()).then(|| format!("{:?} {} verdict {} but {}", rep.set_id, compact(&rep.point), rep.verdict, bad.join(",")))
}

/// Every condition of the open and closed characterizations agrees with the
/// others on stratified samples outside the boundary band.
pub fn membership_equivalence(n: usize, samples: usize, seed: u64) -> SuiteReport {
    run("membership_equivalence", Some(n), samples, seed, f64::max, |rng| {
        let y = match rng.gen_range(0..3) {
            0 => sampling::tilde_g(rng, n, 1.0),
            1 => sampling::exterior(rng, n),
            _ => sampling::near_boundary(rng, n),
        };
        let (g, gm) = match (in_tilde_g(&y, Select::All), in_tilde_gamma(&y, Select::All)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return Outcome::Fail(format!("{}: {e}", compact(&y)), 1.0),
        };
        if g.near_boundary() || gm.near_boundary() {
            return Outcome::Skip;
        }
        match disagreement(&g).or_else(|| disagreement(&gm)) {
            Some(msg) => Outcome::Fail(msg, 1.0),
            None => Outcome::Pass(0.0),
        }
    })
}

/// Schwarz conditions C3, C4, C6-C11 agree, and C2 implies every condition.
pub fn schwarz_equivalence(n: usize, problems: usize, seed: u64) -> SuiteReport {
    run("schwarz_equivalence", Some(n), problems, seed, f64::max, |rng| {
        let y = sampling::tilde_g(rng, n, 1.0);
        let lam = sampling::unit(rng) * rng.gen_range(0.02..0.999);
        let p = match SchwarzProblem::new(lam, y) {
            Ok(p) => p,
            Err(_) => return Outcome::Skip,
        };
        let ms = match check_all(&p) {
            Ok(ms) => ms,
            Err(e) => return Outcome::Fail(e.to_string(), 1.0),
        };
        if ms.iter().any(|m| m.boundary) {
            return Outcome::Skip;
        }
        let v3 = ms[1].holds;
        let odd: Vec<String> = ms
            .iter()
            .filter(|m| m.cond != CondId::C2 && m.cond != CondId::C5 && m.holds != v3)
            .map(|m| format!("{:?}", m.cond))
            .collect();
        let broken = ms[0].holds && ms.iter().any(|m| !m.holds);
        if odd.is_empty() && !broken {
            Outcome::Pass(0.0)
        } else {
            Outcome::Fail(format!("lambda0 {} y {} disagree {}", p.lambda0, compact(&p.target), odd.join(",")), 1.0)
        }
    })
}

/// |D_j - grid sup of |Phi_j|| on random points with bounded images, drawn
/// from G~_n and from the box |y_k| <= C(n, k), |q| <= 1.
pub fn d_oracle(samples: usize, seed: u64, grid: usize, tol: f64) -> SuiteReport {
    run("d_oracle", None, samples, seed, f64::max, |rng| {
        let n = rng.gen_range(2..=6);
        let j = rng.gen_range(1..n);
        let y = loop {
            let y = if rng.gen_bool(0.5) { sampling::tilde_g(rng, n, 1.0) } else { sampling::coordinate_box(rng, n) };
            if y.y(n - j).norm() < 0.9 * binomf(n, j) {
                break y;
            }
        };
        let d = Pair::of(&y, j).d_norm();
        match sup_on_torus(j, &y, grid) {
            Ok(s) => {
                let dev = (d - s).abs();
                if dev <= tol {
                    Outcome::Pass(dev)
                } else {
                    Outcome::Fail(format!("j {j} y {} closed {d} grid {s}", compact(&y)), dev)
                }
            }
            Err(e) => Outcome::Fail(e.to_string(), f64::INFINITY),
        }
    })
}

/// Symmetrized open / closed / torus polydisc points lie in G_n / Gamma_n / b Gamma_n.
pub fn forward_soundness(n: usize, samples: usize, seed: u64) -> SuiteReport {
    run("forward_soundness", Some(n), samples, seed, f64::max, |rng| {
        let k = rng.gen_range(0..3);
        let stratum = [Stratum::Open(0.999), Stratum::Closed, Stratum::Torus][k];
        let z = sampling::polydisc(rng, n, stratum);
        let s = match symmetrize(&z) {
            Ok(s) => s,
            Err(e) => return Outcome::Fail(e.to_string(), 1.0),
        };
        let ok = match k {
            0 => in_g(&s).map(|r| r.verdict),
            1 => in_gamma(&s).map(|r| r.verdict),
            _ => in_b_gamma(&s),
        };
        match ok {
            Ok(true) => Outcome::Pass(0.0),
            Ok(false) => Outcome::Fail(format!("{stratum:?} {}", compact(&s)), 1.0),
            Err(e) => Outcome::Fail(e.to_string(), 1.0),
        }
    })
}

/// A random n = 3 problem with |y_2| <= |y_1| and |lambda0| strictly above D_1.
pub fn strict_problem(rng: &mut impl Rng) -> (CPoint, Cplx) {
    loop {
        let mut y = sampling::tilde_g(rng, 3, 1.0);
        if y.y(2).norm() > y.y(1).norm() {
            y = y.swapped();
        }
        let p = Pair::of(&y, 1);
        if p.degenerate() {
            continue;
        }
        let d = p.d_norm();
        let l = d + (1.0 - d) * rng.gen_range(0.01..0.99);
        return (y, sampling::unit(rng) * l);
    }
}

fn construct(y: &CPoint, lam: Cplx) -> Result<DiscFunction> {
    let (t1, t2) = nu_window(y, lam)?;
    let nu = default_nu((t1, t2));
    let z = z_nu(y, lam, nu)?;
    let alpha = k_alpha(&k_rho(&z, lam.norm())?)?;
    let q0 = if z.a22.norm() <= 1e-14 { Mat2::zero() } else { default_q(&z, &alpha, lam)? };
    build_interpolant(y, lam, nu, alpha, q0)
}

/// build_interpolant on strict problems: endpoints, sampled range, and the
/// nu-window dichotomy at 32 straddling values. worst = max endpoint error.
pub fn interpolation_suite(problems: usize, seed: u64, range_samples: usize) -> SuiteReport {
    run("strict_interpolation", Some(3), problems, seed, f64::max, |rng| {
        let (y, lam) = strict_problem(rng);
        let f = match construct(&y, lam) {
            Ok(f) => f,
            Err(e) => return Outcome::Fail(format!("y {} lambda0 {lam}: {e}", compact(&y)), f64::INFINITY),
        };
        let v = match f.verify(range_samples, rng.gen()) {
            Ok(v) => v,
            Err(e) => return Outcome::Fail(e.to_string(), f64::INFINITY),
        };
        let err = v.origin_error.max(v.target_error);
        if !v.passed() {
            return Outcome::Fail(format!("y {} lambda0 {lam}: {v:?}", compact(&y)), err);
        }
        let (t1, t2) = nu_window(&y, lam).expect("checked above");
        let (a, b) = (t1.ln() - 0.5, t2.ln() + 0.5);
        for k in 0..32 {
            let nu2 = (a + (b - a) * (k as f64 + 0.5) / 32.0).exp();
            if (nu2 / t1 - 1.0).abs() < 1e-6 || (nu2 / t2 - 1.0).abs() < 1e-6 {
                continue;
            }
            let zn = op_norm_unchecked(&z_nu(&y, lam, nu2.sqrt()).expect("checked above"));
            if (zn < 1.0) != (t1 < nu2 && nu2 < t2) {
                return Outcome::Fail(format!("window ({t1}, {t2}) nu^2 {nu2} ||Z|| {zn}"), err);
            }
        }
        Outcome::Pass(err)
    })
}

/// carath_lower <= formula <= lempert_upper with the grid and disc gaps.
/// worst = max(lempert - lower, lempert - formula).
pub fn pinch_suite(n: usize, points: usize, seed: u64, grid: usize) -> SuiteReport {
    run("distance_pinch", Some(n), points, seed, f64::max, |rng| {
        let y = sampling::jn_point(rng, n);
        let d = match distance(&y, grid) {
            Ok(d) => d,
            Err(e) => return Outcome::Fail(format!("{}: {e}", compact(&y)), f64::INFINITY),
        };
        let up_gap = d.lempert_upper - d.closed_form;
        let spread = (d.lempert_upper - d.carath_lower).max(up_gap.abs());
        let ok = d.disc.is_some()
            && d.carath_lower <= d.closed_form + 1e-9
            && d.closed_form <= d.lempert_upper + 1e-9
            && up_gap <= 1e-9
            && d.lempert_upper - d.carath_lower <= 1e-4;
        if ok {
            Outcome::Pass(spread)
        } else {
            Outcome::Fail(
                format!(
                    "{}: lower {} formula {} upper {} {:?}",
                    compact(&y),
                    d.carath_lower,
                    d.closed_form,
                    d.lempert_upper,
                    d.diagnostic
                ),
                spread,
            )
        }
    })
}

/// Separating polynomials for random points strictly outside Gamma~_n.
/// worst = max empirical sup over the interior samples.
pub fn separation_suite(points: usize, seed: u64, interior: usize) -> SuiteReport {
    run("separating_polynomials", None, points, seed, f64::max, |rng| {
        let n = rng.gen_range(2..=6);
        let y = loop {
            let y = sampling::exterior(rng, n).scaled(r(rng.gen_range(0.6..1.0)));
            match in_tilde_gamma(&y, Select::All) {
                Ok(rep) if !rep.verdict && !rep.near_boundary() => break y,
                _ => {}
            }
        };
        match separating_polynomial_seeded(&y, interior, rng.gen()) {
            Ok(f) if f.value_at_target > 1.0 && f.sup_bound <= 1.0 + 1e-9 => Outcome::Pass(f.sup_bound),
            Ok(f) => Outcome::Fail(
                format!("{}: value {} sup {}", compact(&y), f.value_at_target, f.sup_bound),
                f.sup_bound,
            ),
            Err(e) => Outcome::Fail(format!("{}: {e}", compact(&y)), f64::INFINITY),
        }
    })
}

/// psi_g(D) inside Gamma~_3 and det F = -lambda g on random samples, for the
/// family member with parameter t. worst = max |det F + lambda g|.
pub fn family_suite(t: Cplx, samples: usize, seed: u64) -> Result<SuiteReport> {
    let g = crate::interpolation::family_g(t)?;
    let f = crate::interpolation::family_disc(g.clone())?;
    Ok(run("family_range", Some(3), samples, seed, f64::max, |rng| {
        let l = sampling::disc(rng, 1.0);
        let (m, p) = match (f.matrix_at(l), f.eval(l)) {
            (Ok(m), Ok(p)) => (m, p),
            _ => return Outcome::Fail(format!("evaluation failed at {l}"), f64::INFINITY),
        };
        let dev = (m.det() + l * g.eval(l)).norm();
        let inside = in_tilde_gamma(&p, Select::All).map(|r| r.verdict).unwrap_or(false);
        if inside && dev <= 1e-11 {
            Outcome::Pass(dev)
        } else {
            Outcome::Fail(format!("lambda {l}: inside {inside} det dev {dev:e}"), dev)
        }
    }))
}
