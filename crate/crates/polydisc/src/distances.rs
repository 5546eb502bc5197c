//! Caratheodory and Lempert distances from the origin to points of J_n:
//! the closed form, a grid lower bound over the functionals Phi_j(omega, .),
//! and an upper bound from an explicit certified disc.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::clinalg::{c, r, Cplx, ZERO};
use crate::error::{Error, Result};
use crate::interpolation::{jn_interpolant, DiscFunction, DiscKind, MatrixSchur, ScalarSchur};
use crate::membership::{in_tilde_g, Select};
use crate::mobius::{CPoint, Pair};
use crate::schwarz::{in_j_n, max_d};

pub const DEFAULT_GRID: usize = 4096;

/// Pseudo-hyperbolic distance |z - w| / |1 - conj(w) z|.
pub fn mobius_dist(z: Cplx, w: Cplx) -> Result<f64> {
    if !(z.norm() < 1.0 && w.norm() < 1.0) {
        return Err(Error::domain("mobius_dist needs points of the open disc"));
    }
    Ok((z - w).norm() / (Cplx::new(1.0, 0.0) - w.conj() * z).norm())
}

/// tanh^{-1}(max_j D_j(y)) for y in J_n.
pub fn dist_formula(y: &CPoint) -> Result<f64> {
    if !in_j_n(y)? {
        return Err(Error::Precondition("closed form is only established on J_n".into()));
    }
    Ok(max_d(y).atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub j: usize,
    pub omega: Cplx,
}

/// max over j and `grid` points omega of the circle of tanh^{-1}|Phi_j(omega, y)|.
pub fn carath_lower(y: &CPoint, grid: usize) -> Result<(f64, Witness)> {
    if grid == 0 {
        return Err(Error::domain("grid must be positive"));
    }
    if !in_tilde_g(y, Select::All)?.verdict {
        return Err(Error::Precondition("carath_lower needs y in G~_n".into()));
    }
    let best = (1..y.n)
        .into_par_iter()
        .flat_map_iter(|j| {
            let p = Pair::of(y, j);
            (0..grid).filter_map(move |k| {
                let om = Cplx::from_polar(1.0, std::f64::consts::TAU * k as f64 / grid as f64);
                p.phi(om).ok().map(|v| (v.norm(), j, k))
            })
        })
        // ties resolved by (j, k) so the result does not depend on scheduling
        .reduce(|| (0.0, 1, 0), |a, b| if (b.0, std::cmp::Reverse((b.1, b.2))) > (a.0, std::cmp::Reverse((a.1, a.2))) { b } else { a });
    let (m, j, k) = best;
    // golden-section polish between the neighbouring grid nodes
    let h = std::f64::consts::TAU / grid as f64;
    let p = Pair::of(y, j);
    let val = |t: f64| p.phi(Cplx::from_polar(1.0, t)).map(|v| v.norm()).unwrap_or(0.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (k as f64 * h - h, k as f64 * h + h);
    let (mut t1, mut t2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (val(t1), val(t2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = t1;
            (t1, f1) = (t2, f2);
            t2 = lo + g * (hi - lo);
            f2 = val(t2);
        } else {
            hi = t2;
            (t2, f2) = (t1, f1);
            t1 = hi - g * (hi - lo);
            f1 = val(t1);
        }
    }
    let (m, t) = [(m, k as f64 * h), (f1, t1), (f2, t2)].into_iter().fold((m, k as f64 * h), |a, b| if b.0 > a.0 { b } else { a });
    let omega = Cplx::from_polar(1.0, t);
    Ok((m.min(1.0).atanh(), Witness { j, omega }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LempertBound {
    /// tanh^{-1}(lambda0), +inf when no disc could be certified
    pub value: f64,
    pub disc: Option<DiscFunction>,
    pub diagnostic: Option<String>,
}

fn zero_disc(y: &CPoint) -> DiscFunction {
    let z = ScalarSchur::constant(ZERO);
    DiscFunction {
        kind: DiscKind::DiagonalSchwarz,
        n: y.n,
        lambda0: ZERO,
        target: y.clone(),
        swapped: false,
        matrix: MatrixSchur::Diagonal { f: z.clone(), g: z },
        nu: None,
        alpha: None,
    }
}

/// Certified disc through (0, 0) and (lambda0, y), lambda0 = max_j D_j(y).
pub fn lempert_upper(y: &CPoint) -> Result<LempertBound> {
    if !in_j_n(y)? {
        return Err(Error::Precondition("lempert_upper needs y in J_n".into()));
    }
    let l = max_d(y);
    if l == 0.0 {
        return Ok(LempertBound { value: 0.0, disc: Some(zero_disc(y)), diagnostic: None });
    }
    match jn_interpolant(y, r(l), true) {
        Ok(f) => Ok(LempertBound { value: l.atanh(), disc: Some(f), diagnostic: None }),
        Err(e) => Ok(LempertBound { value: f64::INFINITY, disc: None, diagnostic: Some(e.to_string()) }),
    }
}

mod inf_null {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub closed_form: f64,
    pub carath_lower: f64,
    /// null in JSON when no disc was certified
    #[serde(with = "inf_null")]
    pub lempert_upper: f64,
    pub witness: Witness,
    pub disc: Option<DiscFunction>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostic: Option<String>,
}

impl DistanceResult {
    /// The same values on the Mobius scale, tanh of each distance.
    pub fn mobius_scale(&self) -> DistanceResult {
        DistanceResult {
            closed_form: self.closed_form.tanh(),
            carath_lower: self.carath_lower.tanh(),
            lempert_upper: if self.lempert_upper.is_finite() { self.lempert_upper.tanh() } else { f64::INFINITY },
            ..self.clone()
        }
    }

    /// carath_lower <= closed_form <= lempert_upper up to tol.
    pub fn consistent(&self, tol: f64) -> bool {
        self.carath_lower <= self.closed_form + tol && (self.disc.is_none() || self.closed_form <= self.lempert_upper + tol)
    }
}

pub fn distance(y: &CPoint, grid: usize) -> Result<DistanceResult> {
    let closed_form = dist_formula(y)?;
    let (lower, witness) = carath_lower(y, grid)?;
    let up = lempert_upper(y)?;
    Ok(DistanceResult {
        closed_form,
        carath_lower: lower,
        lempert_upper: up.value,
        witness,
        disc: up.disc,
        diagnostic: up.diagnostic,
    })
}

/// The shrunk point used in examples: 0.9 (3/2, 3/4, 1/2) scaled coordinatewise.
pub fn example_point() -> CPoint {
    CPoint { n: 3, coords: vec![c(1.35, 0.0), c(0.675, 0.0), c(0.45, 0.0)] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::family_point;
    use crate::sampling;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_jn(rng: &mut ChaCha8Rng, n: usize) -> CPoint {
        sampling::jn_point(rng, n)
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius_dist(ZERO, c(0.3, 0.4)).unwrap(), 0.5);
        assert!((mobius_dist(r(0.3), r(0.625)).unwrap() - 0.4).abs() < 1e-15);
        assert!(mobius_dist(r(1.0), ZERO).is_err());
    }

    #[test]
    fn formula_examples() {
        assert_eq!(dist_formula(&CPoint::zero(3)).unwrap(), 0.0);
        assert!((dist_formula(&family_point()).unwrap() - 0.8f64.atanh()).abs() < 1e-14);
        let y = example_point();
        assert!((dist_formula(&y).unwrap() - dist_formula(&y.swapped()).unwrap()).abs() < 1e-15);
        // off J_4: middle coordinate not proportional
        let y = CPoint { n: 4, coords: vec![r(0.4), r(0.5), r(0.4), r(0.1)] };
        assert!(matches!(dist_formula(&y), Err(Error::Precondition(_))));
    }

    #[test]
    fn carath_on_family_point() {
        let (v, w) = carath_lower(&family_point(), 4096).unwrap();
        assert!((v - 0.8f64.atanh()).abs() < 1e-5, "{v}");
        let d = distance(&family_point(), 4096).unwrap();
        assert!((d.lempert_upper - d.closed_form).abs() < 1e-12 && d.disc.is_some());
        assert!(w.j == 1 || w.j == 2);
        assert_eq!(carath_lower(&CPoint::zero(3), 64).unwrap().0, 0.0);
    }

    #[test]
    fn pinch_example_point() {
        let y = example_point();
        let d = distance(&y, 4096).unwrap();
        assert!(d.consistent(1e-9));
        assert!((d.lempert_upper - d.closed_form).abs() < 1e-9);
        assert!(d.closed_form - d.carath_lower < 1e-4);
        let v = d.disc.as_ref().unwrap().verify(2000, 3).unwrap();
        assert!(v.passed(), "{v:?}");
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<DistanceResult>(&s).unwrap(), d);
    }

    #[test]
    fn zero_point() {
        let d = distance(&CPoint::zero(4), 16).unwrap();
        assert_eq!((d.closed_form, d.carath_lower, d.lempert_upper), (0.0, 0.0, 0.0));
        assert_eq!(d.disc.unwrap().eval(c(0.2, 0.3)).unwrap(), CPoint::zero(4));
    }

    #[test]
    fn sentinel_serializes_as_null() {
        let mut d = distance(&example_point(), 64).unwrap();
        d.lempert_upper = f64::INFINITY;
        d.disc = None;
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"lempert_upper\":null"));
        assert_eq!(serde_json::from_str::<DistanceResult>(&s).unwrap().lempert_upper, f64::INFINITY);
    }

    #[test]
    fn generic_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let y = random_jn(&mut rng, 5);
            let d = distance(&y, 8192).unwrap();
            assert!(d.disc.is_some(), "{:?}", d.diagnostic);
            assert!((d.lempert_upper - d.closed_form).abs() <= 1e-8);
            assert!(d.consistent(1e-9));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pinch(seed in any::<u64>(), k in 0usize..3) {
            let n = [2, 3, 5][k];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = random_jn(&mut rng, n);
            let d = distance(&y, 8192).unwrap();
            prop_assert!(d.disc.is_some(), "{:?}", d.diagnostic);
            prop_assert!(d.carath_lower <= d.closed_form + 1e-9);
            prop_assert!(d.closed_form <= d.lempert_upper + 1e-9);
            prop_assert!(d.lempert_upper - d.closed_form <= 1e-9);
            prop_assert!(d.lempert_upper - d.carath_lower <= 1e-4);
        }

        #[test]
        fn monotone_in_scale(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = random_jn(&mut rng, n);
            let mut prev = 0.0;
            for i in 0..16 {
                let v = dist_formula(&y.scaled(r(i as f64 / 16.0))).unwrap();
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }

        #[test]
        fn symmetric(z in 0.0f64..0.99, w in 0.0f64..0.99, a in 0.0f64..6.3, b in 0.0f64..6.3) {
            let (z, w) = (Cplx::from_polar(z, a), Cplx::from_polar(w, b));
            prop_assert!((mobius_dist(z, w).unwrap() - mobius_dist(w, z).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn n_two_agrees(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fill = rng.gen_range(0.1..1.0);
            let y = sampling::tilde_g(&mut rng, 2, fill);
            let f = dist_formula(&y).unwrap();
            let (lo, _) = carath_lower(&y, 4096).unwrap();
            prop_assert!(lo <= f + 1e-9 && f - lo < 1e-3 * (1.0 + f));
        }
    }
}
