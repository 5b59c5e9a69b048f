#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ramstab::exactval::Extended;
use ramstab::{ExtendedRational, PLFunction, PolynomialValuationProfile, Rational};

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Exponent of `p` in `n!`.
pub fn legendre(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut pk = p;
    while pk <= n {
        total += n / pk;
        pk *= p;
    }
    total
}

pub fn binom_padic(j: u64, i: u64, p: u64) -> u64 {
    legendre(j, p) - legendre(i, p) - legendre(j - i, p)
}

/// Lower hull by brute force: an interior point is a vertex iff it lies
/// strictly below every chord joining a point on its left to one on its right.
pub fn brute_hull(points: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut pts = points.to_vec();
    pts.sort();
    let n = pts.len();
    (0..n)
        .filter(|&k| {
            k == 0
                || k == n - 1
                || (0..k).all(|a| {
                    (k + 1..n).all(|b| {
                        let (pa, pk, pb) = (&pts[a], &pts[k], &pts[b]);
                        let chord = &pa.1 + (&pb.1 - &pa.1) * (&pk.0 - &pa.0) / (&pb.0 - &pa.0);
                        pk.1 < chord
                    })
                })
        })
        .map(|k| pts[k].clone())
        .collect()
}

pub fn random_rational(rng: &mut StdRng, num: i64, den: i64) -> Rational {
    frac(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

pub fn random_points(rng: &mut StdRng, n: usize) -> Vec<(Rational, Rational)> {
    let mut xs: Vec<i64> = Vec::new();
    while xs.len() < n {
        let x = rng.gen_range(0..40);
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    xs.into_iter()
        .map(|x| (frac(x, rng.gen_range(1..=3)), random_rational(rng, 12, 4)))
        .collect::<BTreeMap<_, _>>()
        .into_iter()
        .collect()
}

/// A random concave increasing function through the origin.
pub fn random_plf(rng: &mut StdRng) -> PLFunction {
    let k = rng.gen_range(0..=5);
    let mut slopes: Vec<Rational> = Vec::new();
    while slopes.len() < k + 1 {
        let s = frac(rng.gen_range(1..=30), rng.gen_range(1..=6));
        if !slopes.contains(&s) {
            slopes.push(s);
        }
    }
    slopes.sort();
    slopes.reverse();
    let mut x = Rational::zero();
    let mut y = Rational::zero();
    let mut vertices = Vec::new();
    for s in &slopes[..k] {
        let dx = frac(rng.gen_range(1..=20), rng.gen_range(1..=4));
        y += s * &dx;
        x += dx;
        vertices.push((x.clone(), y.clone()));
    }
    PLFunction::new(slopes[0].clone(), vertices, slopes[k].clone()).unwrap()
}

pub fn random_nonneg(rng: &mut StdRng) -> Rational {
    frac(rng.gen_range(0..=400), rng.gen_range(1..=7))
}

/// A random valid profile with `p ∈ {2, 3, 5}` and `q <= 125`.
pub fn random_profile(rng: &mut StdRng) -> PolynomialValuationProfile {
    let p = [2u64, 3, 5][rng.gen_range(0..3)];
    let r = rng.gen_range(1..=3);
    let q = p.pow(r);
    let v_p = rng.gen_range(1..=3);
    let mut coeffs = BTreeMap::new();
    for i in 1..q {
        if rng.gen_bool(0.5) {
            coeffs.insert(i, Extended::Finite(rat(rng.gen_range(1..=6))));
        }
    }
    coeffs.insert(q, Extended::Finite(Rational::zero()));
    PolynomialValuationProfile::new(p, r, v_p, &coeffs, 1).unwrap()
}

/// Term-by-term height over `i`: `min_{i <= j <= q} v binom(j, i) + v(P_j) + (j - i) v`,
/// with the number of indices attaining it. Binomial valuations come from
/// Legendre's formula.
pub fn oracle_height(profile: &PolynomialValuationProfile, i: u64, v: &Rational) -> (Rational, usize) {
    let vp = rat(profile.v_p() as i64);
    let mut best: Option<Rational> = None;
    let mut count = 0;
    for j in i..=profile.q() {
        let Extended::Finite(c) = profile.coeff(j) else { continue };
        let term = rat(binom_padic(j, i, profile.p()) as i64) * &vp + c + rat((j - i) as i64) * v;
        match &best {
            Some(b) if term > *b => {}
            Some(b) if term == *b => count += 1,
            _ => {
                best = Some(term);
                count = 1;
            }
        }
    }
    (best.expect("the leading term is finite"), count)
}

pub fn is_power_of(x: &Rational, p: u64) -> bool {
    if !x.is_integer() || !x.is_positive() {
        return false;
    }
    let mut n = x.to_integer().to_u64().unwrap();
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

pub fn ext(v: Rational) -> ExtendedRational {
    Extended::Finite(v)
}

pub fn one() -> Rational {
    Rational::one()
}
