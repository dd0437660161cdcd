//! Riemann, Hurwitz, Dirichlet and Dedekind zeta functions in double precision.

use num_complex::Complex64;

use crate::arith::{kronecker_i64, primes_up_to};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;

/// `B_{2j}/(2j)!` for `j = 1..=15`.
const BERNOULLI_OVER_FACTORIAL: [f64; 15] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -5.2841901386874931849e-10,
    1.3382536530684678833e-11,
    -3.3896802963225828668e-13,
    8.5860620562778445641e-15,
    -2.1748686985580618730e-16,
    5.5090028283602295152e-18,
    -1.3954464685812523341e-19,
    3.5347070396294674717e-21,
    -8.9535174270375468504e-23,
    2.2679524523376830603e-24,
];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(e^w − 1)/w`, accurate near `w = 0`.
fn phi(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut term = c(1.0);
        let mut sum = c(1.0);
        for n in 1..30 {
            term = term * w / (n as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// Euler–Maclaurin evaluation of `ζ(s, a)`, optionally with `1/(s−1)` removed.
fn hurwitz_em(s: Complex64, a: f64, regularized: bool) -> Complex64 {
    let n = 16 + s.norm().ceil() as usize;
    let mut sum = c(0.0);
    for k in 0..n {
        sum += c(k as f64 + a).powc(-s);
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = (-s * lx).exp();
    if regularized {
        // ((x^{1−s}) − 1)/(s − 1) = −ln x · φ((1 − s) ln x)
        sum -= lx * phi((1.0 - s) * lx);
    } else {
        sum += xs * x / (s - 1.0);
    }
    sum += xs * 0.5;
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · x^{−s−2j+1}
    let mut rising = s;
    let mut xp = xs / x;
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = rising * xp * *b;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        let m = 2.0 * j as f64;
        rising = rising * (s + m + 1.0) * (s + m + 2.0);
        xp /= x * x;
    }
    sum
}

/// Hurwitz zeta `ζ(s, a)` for `a > 0`, `s ≠ 1`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-15 {
        return Err(Error::Pole("s = 1".into()));
    }
    Ok(hurwitz_em(s, a, true) + 1.0 / (s - 1.0))
}

/// Riemann zeta `ζ(s)`, `s ≠ 1`.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// `L(s, χ_D)` for the Kronecker character of a discriminant `D ≠ 1`; entire in `s`.
pub fn dirichlet_l(s: Complex64, disc: i64) -> Result<Complex64> {
    let m = disc.unsigned_abs();
    if m <= 1 {
        return Err(Error::UndefinedInput("trivial character".into()));
    }
    let mf = m as f64;
    let mut sum = c(0.0);
    for a in 1..m {
        let chi = kronecker_i64(disc, a as i64);
        if chi != 0 {
            sum += hurwitz_em(s, a as f64 / mf, true) * chi as f64;
        }
    }
    Ok(c(mf).powc(-s) * sum)
}

/// `ζ_K(s) = ζ(s)·L(s, χ_{D_K})`, `s ≠ 1`.
pub fn dedekind_zeta(field: &FieldDescriptor, s: Complex64) -> Result<Complex64> {
    let z = riemann_zeta(s)?;
    if field.is_rational() {
        return Ok(z);
    }
    Ok(z * dirichlet_l(s, field.disc)?)
}

/// Residue of `ζ_K` at `s = 1`.
pub fn zeta_residue(field: &FieldDescriptor) -> Result<f64> {
    if field.is_rational() {
        return Ok(1.0);
    }
    Ok(dirichlet_l(c(1.0), field.disc)?.re)
}

/// `ζ_K(s)` by an Euler product over rational primes up to `bound`, with a bound on
/// the relative error from omitted primes. Requires `Re s > 1`.
pub fn dedekind_zeta_euler(field: &FieldDescriptor, s: Complex64, bound: u64) -> Result<(Complex64, f64)> {
    if s.re <= 1.0 {
        return Err(Error::Nonconvergent(format!("Re s = {} must exceed 1", s.re)));
    }
    let mut prod = c(1.0);
    for p in primes_up_to(bound) {
        let ps = c(p as f64).powc(-s);
        let local = match if field.is_rational() { 2 } else { kronecker_i64(field.disc, p as i64) } {
            1 => (1.0 - ps) * (1.0 - ps),
            -1 => 1.0 - ps * ps,
            0 => 1.0 - ps,
            _ => 1.0 - ps,
        };
        prod /= local;
    }
    Ok((prod, euler_tail_bound(field.degree, bound, s.re)))
}

/// Relative error bound for an Euler product of degree `degree` over `K` truncated at
/// rational primes `≤ bound`, at `Re s = sigma > 1`.
pub fn euler_tail_bound(degree: u32, bound: u64, sigma: f64) -> f64 {
    // |log tail| ≤ Σ_{n > B} d·n^{−σ}/(1 − B^{−σ}) ≤ d·B^{1−σ}/((σ − 1)(1 − B^{−σ})).
    let b = bound as f64;
    (degree as f64 * b.powf(1.0 - sigma) / ((sigma - 1.0) * (1.0 - b.powf(-sigma)))).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_values() {
        let z2 = riemann_zeta(c(2.0)).unwrap();
        assert!((z2.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        let z3 = riemann_zeta(c(3.0)).unwrap();
        assert!((z3.re - 1.2020569031595942854).abs() < 1e-14);
        let z0 = riemann_zeta(c(0.0)).unwrap();
        assert!((z0.re + 0.5).abs() < 1e-14);
        let zm1 = riemann_zeta(c(-1.0)).unwrap();
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-12, "{zm1}");
        let zh = riemann_zeta(c(0.5)).unwrap();
        assert!((zh.re + 1.4603545088095868129).abs() < 1e-13);
        // ζ(1/2 + 14.134725i) ≈ 0 (first nontrivial zero)
        let z = riemann_zeta(Complex64::new(0.5, 14.134725141734693790)).unwrap();
        assert!(z.norm() < 1e-12);
        assert!(riemann_zeta(c(1.0)).is_err());
    }

    #[test]
    fn near_pole() {
        for step in [1e-3, 1e-5, -1e-4] {
            let s = 1.0 + step;
            let h = s - 1.0;
            let z = riemann_zeta(c(s)).unwrap().re;
            // ζ(1+h) = 1/h + γ₀ − γ₁h + γ₂h²/2 − …
            let expect = 1.0 / h + 0.57721566490153286 + 0.0728158454836767 * h - 0.00969036319287232 * h * h / 2.0;
            assert!((z - expect).abs() < 1e-9, "{h}: {z} vs {expect}");
        }
    }

    #[test]
    fn dirichlet_values() {
        // L(1, χ_{-4}) = π/4; L(2, χ_{-4}) = Catalan.
        let l = dirichlet_l(c(1.0), -4).unwrap();
        assert!((l.re - std::f64::consts::FRAC_PI_4).abs() < 1e-14);
        let l = dirichlet_l(c(2.0), -4).unwrap();
        assert!((l.re - 0.91596559417721901505).abs() < 1e-14);
        // L(1, χ_5) = 2 log φ / √5
        let l = dirichlet_l(c(1.0), 5).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((l.re - 2.0 * phi.ln() / 5f64.sqrt()).abs() < 1e-14);
        // L(0, χ_{-4}) = 1/2
        assert!((dirichlet_l(c(0.0), -4).unwrap().re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dedekind_matches_euler_product() {
        let k = FieldDescriptor::real_quadratic(33).unwrap();
        for s in [c(3.0), Complex64::new(2.5, 1.3), c(4.0)] {
            let direct = dedekind_zeta(&k, s).unwrap();
            let (euler, tail) = dedekind_zeta_euler(&k, s, 20_000).unwrap();
            assert!((direct - euler).norm() <= tail * euler.norm() + 1e-13, "{s}: {direct} vs {euler}");
        }
        let kappa = zeta_residue(&k).unwrap();
        let eps = 23.0 + 4.0 * 33f64.sqrt();
        assert!((kappa - 2.0 * eps.ln() / 33f64.sqrt()).abs() < 1e-13);
    }
}
