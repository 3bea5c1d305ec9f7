//! Independent oracles and seeded generators shared by the integration tests.
//!
//! The oracles use their own dense map-based polynomials and never call the
//! library's homogeneous or series arithmetic.

#![allow(dead_code)]

use std::collections::BTreeMap;

use firstint::algebra::{rational, GradedSeries, MultiIndex, ParamScalar, Rational, Scalar};
use firstint::reduction::FactoredSystem;
use firstint::system::SystemSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain polynomial: exponent vector to nonzero coefficient.
pub type Poly<S> = BTreeMap<Vec<u32>, S>;

pub fn add_term<S: Scalar>(p: &mut Poly<S>, e: Vec<u32>, c: S) {
    if c.is_zero() {
        return;
    }
    let v = match p.remove(&e) {
        Some(old) => old + c,
        None => c,
    };
    if !v.is_zero() {
        p.insert(e, v);
    }
}

pub fn poly_add<S: Scalar>(a: &Poly<S>, b: &Poly<S>) -> Poly<S> {
    let mut out = a.clone();
    for (e, c) in b {
        add_term(&mut out, e.clone(), c.clone());
    }
    out
}

pub fn poly_scale<S: Scalar>(a: &Poly<S>, k: &S) -> Poly<S> {
    let mut out = Poly::new();
    for (e, c) in a {
        add_term(&mut out, e.clone(), k.clone() * c.clone());
    }
    out
}

/// Product keeping only total degree `<= max_deg`.
pub fn poly_mul<S: Scalar>(a: &Poly<S>, b: &Poly<S>, max_deg: u32) -> Poly<S> {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().sum::<u32>() <= max_deg {
                add_term(&mut out, e, ca.clone() * cb.clone());
            }
        }
    }
    out
}

pub fn poly_diff<S: Scalar>(a: &Poly<S>, var: usize) -> Poly<S> {
    let mut out = Poly::new();
    for (e, c) in a {
        if e[var] > 0 {
            let mut e2 = e.clone();
            e2[var] -= 1;
            add_term(&mut out, e2, S::from_integer(e[var] as i64) * c.clone());
        }
    }
    out
}

pub fn poly_var<S: Scalar>(n: usize, var: usize) -> Poly<S> {
    let mut e = vec![0; n];
    e[var] = 1;
    Poly::from([(e, S::one())])
}

pub fn poly_from_series<S: Scalar>(s: &GradedSeries<S>) -> Poly<S> {
    s.terms()
        .map(|(m, c)| (m.exponents().to_vec(), c.clone()))
        .collect()
}

pub fn poly_degree_part<S: Scalar>(p: &Poly<S>, d: u32) -> Poly<S> {
    p.iter()
        .filter(|(e, _)| e.iter().sum::<u32>() == d)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect()
}

/// Brute-force composition `p(args)` by repeated multiplication.
pub fn poly_compose<S: Scalar>(p: &Poly<S>, args: &[Poly<S>], nvars: usize, max_deg: u32) -> Poly<S> {
    let mut out = Poly::new();
    for (e, c) in p {
        let mut term: Poly<S> = Poly::from([(vec![0; nvars], c.clone())]);
        for (i, &k) in e.iter().enumerate() {
            for _ in 0..k {
                term = poly_mul(&term, &args[i], max_deg);
            }
        }
        out = poly_add(&out, &term);
    }
    out
}

/// All exponent vectors of total degree `d` in `n` variables.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in monomials(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Full vector field of a factored system: `(F1 y2, B y2 + F2 y2)`.
pub fn factored_field<S: Scalar>(fs: &FactoredSystem<S>) -> Vec<Poly<S>> {
    let n = fs.n();
    let deg = fs.truncation();
    let dot = |row: &[GradedSeries<S>]| {
        let mut acc = Poly::new();
        for (j, e) in row.iter().enumerate() {
            acc = poly_add(&acc, &poly_mul(&poly_from_series(e), &poly_var(n, j + 1), deg));
        }
        acc
    };
    let mut field = vec![dot(fs.f1())];
    for (i, row) in fs.f2().iter().enumerate() {
        let mut comp = dot(row);
        for (j, b) in fs.b()[i].iter().enumerate() {
            comp = poly_add(&comp, &poly_scale(&poly_var(n, j + 1), b));
        }
        field.push(comp);
    }
    field
}

/// `X(h) = sum_v field_v dh/dy_v`, all degrees up to `max_deg`.
pub fn lie_dense<S: Scalar>(field: &[Poly<S>], h: &Poly<S>, max_deg: u32) -> Poly<S> {
    let mut out = Poly::new();
    for (v, f) in field.iter().enumerate() {
        out = poly_add(&out, &poly_mul(f, &poly_diff(h, v), max_deg));
    }
    out
}

/// Exact Gaussian elimination for a square system `a x = b` over a field.
/// Returns `None` when singular.
pub fn gauss_solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].try_inverse()?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() * inv.clone();
            for c in col..n {
                let v = a[r][c].clone() - f.clone() * a[col][c].clone();
                a[r][c] = v;
            }
            let v = b[r].clone() - f * b[col].clone();
            b[r] = v;
        }
    }
    Some((0..n).map(|i| b[i].clone() * a[i][i].try_inverse().unwrap()).collect())
}

/// First integral `y1 + sum` with no pure `y1` powers, obtained from one big
/// linear system: every coefficient of `X(H)` in degrees `2..=N` vanishes.
pub fn dense_first_integral<S: Scalar>(fs: &FactoredSystem<S>, big_n: u32) -> Poly<S> {
    let n = fs.n();
    let field = factored_field(fs);
    let unknowns: Vec<Vec<u32>> = (2..=big_n)
        .flat_map(|d| monomials(n, d))
        .filter(|e| e[1..].iter().any(|&k| k > 0))
        .collect();
    let rows: Vec<Vec<u32>> = unknowns.clone();
    let index: BTreeMap<&Vec<u32>, usize> = rows.iter().enumerate().map(|(i, e)| (e, i)).collect();

    let mut a = vec![vec![S::zero(); unknowns.len()]; rows.len()];
    let mut b = vec![S::zero(); rows.len()];
    let base = lie_dense(&field, &poly_var(n, 0), big_n);
    for (e, c) in &base {
        if let Some(&r) = index.get(e) {
            b[r] = b[r].clone() - c.clone();
        } else {
            assert!(e.iter().sum::<u32>() > big_n || c.is_zero(), "unexpected pure y1 residual");
        }
    }
    for (k, u) in unknowns.iter().enumerate() {
        let col = lie_dense(&field, &Poly::from([(u.clone(), S::one())]), big_n);
        for (e, c) in col {
            if let Some(&r) = index.get(&e) {
                a[r][k] = a[r][k].clone() + c;
            }
        }
    }
    let x = gauss_solve(a, b).expect("nonresonant system has a unique normalized integral");
    let mut h = poly_var(n, 0);
    for (u, c) in unknowns.into_iter().zip(x) {
        add_term(&mut h, u, c);
    }
    h
}

/// Matrix of `L = <B y2, d/dy2>` on degree-`d` monomials that are not pure
/// `y1` powers, solved densely.
pub fn dense_homological<S: Scalar>(b: &[Vec<S>], rhs: &Poly<S>, n: usize, d: u32) -> Poly<S> {
    let basis: Vec<Vec<u32>> = monomials(n, d)
        .into_iter()
        .filter(|e| e[1..].iter().any(|&k| k > 0))
        .collect();
    let index: BTreeMap<&Vec<u32>, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut linear: Vec<Poly<S>> = Vec::new();
    for i in 0..n - 1 {
        let mut comp = Poly::new();
        for (j, bij) in b[i].iter().enumerate() {
            comp = poly_add(&comp, &poly_scale(&poly_var(n, j + 1), bij));
        }
        linear.push(comp);
    }
    let mut a = vec![vec![S::zero(); basis.len()]; basis.len()];
    for (k, u) in basis.iter().enumerate() {
        let p: Poly<S> = Poly::from([(u.clone(), S::one())]);
        for (i, li) in linear.iter().enumerate() {
            for (e, c) in poly_mul(li, &poly_diff(&p, i + 1), d) {
                a[index[&e]][k] = a[index[&e]][k].clone() + c;
            }
        }
    }
    let mut rv = vec![S::zero(); basis.len()];
    for (e, c) in rhs {
        rv[index[e]] = c.clone();
    }
    let x = gauss_solve(a, rv).expect("nonresonant operator is invertible");
    basis.into_iter().zip(x).filter(|(_, c)| !c.is_zero()).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational in `[-3, 3]` with denominator up to 3, nonzero.
pub fn small_rational(r: &mut impl Rng) -> Rational {
    loop {
        let num = r.gen_range(-3i64..=3);
        let den = r.gen_range(1i64..=3);
        if num != 0 {
            return rational(num, den);
        }
    }
}

/// Lower-triangular `B` with negative integer diagonal (never resonant) and
/// occasional small off-diagonal entries.
pub fn random_b(r: &mut impl Rng, k: usize) -> Vec<Vec<Rational>> {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i == j {
                        rational(-r.gen_range(1i64..=4), 1)
                    } else if j < i && r.gen_bool(0.5) {
                        small_rational(r)
                    } else {
                        rational(0, 1)
                    }
                })
                .collect()
        })
        .collect()
}

/// Sparse random series in `n` variables with terms of degree `lo..=hi`.
pub fn random_series(r: &mut impl Rng, n: usize, lo: u32, hi: u32, terms: usize, trunc: u32) -> GradedSeries<Rational> {
    let mut out = Vec::new();
    for _ in 0..terms {
        let d = r.gen_range(lo..=hi);
        let mut e = vec![0u32; n];
        for _ in 0..d {
            e[r.gen_range(0..n)] += 1;
        }
        out.push((MultiIndex::new(e), small_rational(r)));
    }
    GradedSeries::from_terms(n, trunc, out).unwrap()
}

/// Random factored system with entries of degree 1..=2.
pub fn random_factored(seed: u64, n: usize, big_n: u32) -> FactoredSystem<Rational> {
    let mut r = rng(seed);
    let k = n - 1;
    let b = random_b(&mut r, k);
    let entry = |r: &mut ChaCha8Rng| {
        if r.gen_bool(0.4) {
            GradedSeries::zero(n, big_n)
        } else {
            let t = r.gen_range(1..=2);
            random_series(r, n, 1, 2, t, big_n)
        }
    };
    let f1 = (0..k).map(|_| entry(&mut r)).collect();
    let f2 = (0..k).map(|_| (0..k).map(|_| entry(&mut r)).collect()).collect();
    FactoredSystem::new(b, f1, f2, big_n).unwrap()
}

/// Random nonisolated system in original coordinates: a random factored
/// field moved off the center curve `x2 = phi(x1)` with polynomial `phi`.
pub fn random_nonisolated(seed: u64, n: usize, big_n: u32) -> SystemSpec<Rational> {
    let fs = random_factored(seed, n, big_n);
    let mut r = rng(seed ^ 0x5eed);
    let phi: Vec<GradedSeries<Rational>> = (0..n - 1)
        .map(|_| {
            if r.gen_bool(0.5) {
                let e = MultiIndex::new({
                    let mut v = vec![0; n];
                    v[0] = r.gen_range(2..=3);
                    v
                });
                GradedSeries::monomial(e, small_rational(&mut r), big_n)
            } else {
                GradedSeries::zero(n, big_n)
            }
        })
        .collect();
    unshift(&fs, &phi)
}

/// Undo the shift: `y1 = x1`, `y2 = x2 - phi(x1)`.
pub fn unshift(fs: &FactoredSystem<Rational>, phi: &[GradedSeries<Rational>]) -> SystemSpec<Rational> {
    let n = fs.n();
    let big_n = fs.truncation();
    let args: Vec<GradedSeries<Rational>> = std::iter::once(GradedSeries::variable(n, 0, big_n))
        .chain(
            phi.iter()
                .enumerate()
                .map(|(i, p)| GradedSeries::variable(n, i + 1, big_n).sub(p)),
        )
        .collect();
    let (g1, g2) = fs.reconstruct();
    let f1 = g1.substitute(&args, big_n).unwrap();
    let f2: Vec<GradedSeries<Rational>> = (0..n - 1)
        .map(|i| {
            // x2' = B (x2 - phi) + G2(shifted) + phi'(x1) x1'; the B x2 part is linear
            let mut r = g2[i].substitute(&args, big_n).unwrap();
            for (j, p) in phi.iter().enumerate() {
                r = r.sub(&p.scale(&fs.b()[i][j]));
            }
            r.add(&phi[i].partial(0).mul(&f1, big_n))
        })
        .collect();
    SystemSpec::new(fs.b().to_vec(), f1, f2, 0, big_n).unwrap()
}

/// Random family whose coefficients are linear in `t` without constant term.
pub fn random_family(seed: u64, n: usize, m: usize, big_n: u32) -> FactoredSystem<ParamScalar> {
    let mut r = rng(seed);
    let k = n - 1;
    let b: Vec<Vec<ParamScalar>> = random_b(&mut r, k)
        .into_iter()
        .map(|row| row.into_iter().map(ParamScalar::from_rational).collect())
        .collect();
    let entry = |r: &mut ChaCha8Rng| -> GradedSeries<ParamScalar> {
        let mut terms = Vec::new();
        for _ in 0..r.gen_range(0..=2) {
            let d = r.gen_range(1..=2);
            let mut e = vec![0u32; n];
            for _ in 0..d {
                e[r.gen_range(0..n)] += 1;
            }
            // linear in t, no constant term
            let mut c = <ParamScalar as num_traits::Zero>::zero();
            for p in 1..=m {
                if r.gen_bool(0.6) {
                    c = c + ParamScalar::parameter(p).unwrap() * ParamScalar::from_rational(small_rational(r));
                }
            }
            terms.push((MultiIndex::new(e), c));
        }
        GradedSeries::from_terms(n, big_n, terms).unwrap()
    };
    let f1 = (0..k).map(|_| entry(&mut r)).collect();
    let f2 = (0..k).map(|_| (0..k).map(|_| entry(&mut r)).collect()).collect();
    FactoredSystem::new(b, f1, f2, big_n).unwrap()
}
