//! Quadratic L-functions, Zagier zeta functions, the multiplicative formula of
//! Langlands with its completion, and numeric checks of the functional equation
//! and the approximate functional equation.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde_json::json;

use crate::analytic::{cutoff_f_with_error, lr_factor, upper_gamma, ContourSpec, HContour};
use crate::arith::{fundamental_part, is_fundamental_discriminant, kronecker_i64, Symbol};
use crate::elliptic::{EllipticDatum, ExpSum, Rational};
use crate::error::{Error, Result};
use crate::report::{json_f64, Check, VerificationReport};
use crate::symbols::{chi_d, chi_gamma, ramification_vector};
use crate::zeta::{dirichlet_l, euler_tail_bound};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Primitive quadratic Dirichlet character `n ↦ (D/n)` of a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticCharacter {
    pub disc: i64,
}

impl QuadraticCharacter {
    pub fn new(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::UndefinedInput(format!("{disc} is not a fundamental discriminant")));
        }
        Ok(QuadraticCharacter { disc })
    }

    pub fn value(&self, n: i64) -> Symbol {
        kronecker_i64(self.disc, n)
    }

    pub fn conductor(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    /// 1 for odd characters (`D < 0`), which are ramified at the real place.
    pub fn parity(&self) -> u8 {
        u8::from(self.disc < 0)
    }

    /// `L(z, χ_D)`, continued to all of ℂ.
    pub fn l(&self, z: Complex64) -> Result<Complex64> {
        dirichlet_l(z, self.disc)
    }

    /// `Λ(z, χ_D) = |D|^{z/2} L_ℝ(z + δ) L(z, χ_D)` through the Hurwitz continuation.
    pub fn lambda(&self, z: Complex64) -> Result<Complex64> {
        let q = self.conductor() as f64;
        Ok(c(q).powc(z / 2.0) * lr_factor(z + self.parity() as f64)? * self.l(z)?)
    }

    /// `Λ(z, χ_D)` by the incomplete-gamma expansion
    /// `|D|^{−δ/2} Σ χ(n) n^δ [X^{−a}Γ(a, X) + X^{−a′}Γ(a′, X)]`, `X = πn²/|D|`,
    /// `a = (z+δ)/2`, `a′ = (1−z+δ)/2`; symmetric under `z ↦ 1 − z` term by term.
    pub fn lambda_smoothed(&self, z: Complex64) -> Result<Complex64> {
        let q = self.conductor() as f64;
        let d = self.parity() as f64;
        let a = (z + d) / 2.0;
        let b = (1.0 - z + d) / 2.0;
        let mut sum = c(0.0);
        let mut n = 1i64;
        loop {
            let x = PI * (n * n) as f64 / q;
            if x > 60.0 {
                break;
            }
            let chi = self.value(n);
            if chi != 0 {
                let lx = x.ln();
                let term = (-a * lx).exp() * upper_gamma(a, x)? + (-b * lx).exp() * upper_gamma(b, x)?;
                sum += term * (chi as f64 * (n as f64).powf(d));
            }
            n += 1;
        }
        Ok(sum * q.powf(-d / 2.0))
    }
}

/// `L(z, (n/·))` for a nonsquare `n ≡ 0, 1 mod 4`: the primitive L-function with the
/// Euler factors at primes dividing the conductor cofactor removed.
pub fn imprimitive_l(z: Complex64, n: i64) -> Result<Complex64> {
    let (d, f) = fundamental_part(n).ok_or_else(|| Error::UndefinedInput(format!("{n} is not a nonsquare discriminant")))?;
    let chi = QuadraticCharacter::new(d)?;
    let mut value = chi.l(z)?;
    for (p, _) in crate::arith::factorize_u64(f as u64) {
        value *= 1.0 - chi.value(p as i64) as f64 * c(p as f64).powc(-z);
    }
    Ok(value)
}

/// Zagier zeta `L(z, δ) = Σ_{d² | δ, δ/d² ≡ 0,1 mod 4} d^{1−2z} L(z, (δ/d²)/·)`.
pub fn zagier_zeta(z: Complex64, delta: i64) -> Result<Complex64> {
    if fundamental_part(delta).is_none() {
        return Err(Error::UndefinedInput(format!("{delta} is not a nonsquare discriminant")));
    }
    let mut total = c(0.0);
    let mut d = 1i64;
    while d * d <= delta.abs() {
        if delta % (d * d) == 0 && (delta / (d * d)).rem_euclid(4) <= 1 {
            total += c(d as f64).powc(1.0 - 2.0 * z) * imprimitive_l(z, delta / (d * d))?;
        }
        d += 1;
    }
    Ok(total)
}

fn rational_delta(datum: &EllipticDatum) -> Result<i64> {
    if !datum.field.is_rational() {
        return Err(Error::NotApplicable("strip evaluation is available over Q only".into()));
    }
    i64::try_from(datum.delta().x).map_err(|_| Error::Resource("δ exceeds 64 bits".into()))
}

/// The primitive character `χ_γ` of a datum over ℚ.
pub fn character_of(datum: &EllipticDatum) -> Result<QuadraticCharacter> {
    let delta = rational_delta(datum)?;
    let data = datum.s_gamma()?;
    QuadraticCharacter::new(delta.signum() * data.disc.norm as i64)
}

/// `Σ_{𝔡 | S} N(𝔡)^{1−2z} ∏_{𝔮 | S/𝔡} (1 − χ_γ(𝔮)N(𝔮)^{−z})`, exact.
pub fn finite_part(datum: &EllipticDatum) -> Result<ExpSum> {
    let data = datum.s_gamma()?;
    let s_norm = data.s.norm as i128;
    Ok(datum.orbital_polynomial()?.mul(&ExpSum::term(Rational::from_integer(1), Ratio::new(1, s_norm))))
}

/// The same finite part assembled as `Σ_𝔡 N(𝔡)^{1−2z} L(z, χ_𝔡)/L(z, χ_γ)`, where the
/// removed Euler factors are read off the imprimitive characters `χ_𝔡`.
pub fn finite_part_by_characters(datum: &EllipticDatum) -> Result<ExpSum> {
    let data = datum.s_gamma()?;
    let field = &datum.field;
    let mut total = ExpSum::default();
    for d in divisors(field, &data.s) {
        let nd = d.norm as i128;
        let mut term = ExpSum::term(Rational::from_integer(nd), Ratio::new(1, nd * nd));
        for (q, _) in &data.s.factors {
            let qi = field.prime_power(q, 1);
            let full = chi_gamma(datum, q)?;
            if full != 0 && chi_d(datum, &d, &qi)? == 0 {
                let qn = q.norm() as i128;
                term = term.mul(&ExpSum::one().add(&ExpSum::term(Rational::from_integer(-(full as i128)), Ratio::new(1, qn))));
            }
        }
        total = total.add(&term);
    }
    Ok(total)
}

fn divisors(field: &crate::field::FieldDescriptor, i: &crate::field::Ideal) -> Vec<crate::field::Ideal> {
    let mut out = vec![Vec::new()];
    for (q, e) in &i.factors {
        out = out
            .into_iter()
            .flat_map(|v: Vec<(crate::field::PrimeIdeal, u32)>| {
                (0..=*e).map(move |j| {
                    let mut w = v.clone();
                    if j > 0 {
                        w.push((q.clone(), j));
                    }
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(|f| field.ideal_from_factors(&f)).collect()
}

/// A numeric value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LValue {
    pub value: Complex64,
    pub error: f64,
}

/// `L(z, χ_γ)` over `K` by an Euler product over prime ideals of norm `≤ prime_bound`.
/// Requires `Re z > 1`.
pub fn hecke_l_euler(datum: &EllipticDatum, z: Complex64, prime_bound: u64) -> Result<LValue> {
    if z.re <= 1.0 {
        return Err(Error::Nonconvergent(format!("Euler product needs Re z > 1, got {z}")));
    }
    let field = &datum.field;
    let mut prod = c(1.0);
    for q in field.primes_up_to_norm(prime_bound)? {
        let chi = chi_gamma(datum, &q)?;
        if chi != 0 {
            prod /= 1.0 - chi as f64 * c(q.norm() as f64).powc(-z);
        }
    }
    let rel = euler_tail_bound(field.degree, prime_bound, z.re);
    Ok(LValue { value: prod, error: rel * prod.norm() })
}

/// Multiplicative formula of Langlands `L(z, γ) = L(z, χ_γ)·Σ_𝔡 N(𝔡)^{1−2z} ∏ (1 − χ_γ(𝔮)N(𝔮)^{−z})`.
/// Over ℚ every `z ≠ 1` is supported; over a quadratic field only `Re z > 1`.
pub fn l_mult_langlands(datum: &EllipticDatum, z: Complex64, prime_bound: u64) -> Result<LValue> {
    let finite = finite_part(datum)?.eval(z);
    if datum.field.is_rational() {
        let l = character_of(datum)?.l(z)?;
        let value = l * finite;
        return Ok(LValue { value, error: 1e-13 * value.norm().max(1.0) });
    }
    let l = hecke_l_euler(datum, z, prime_bound)?;
    Ok(LValue { value: l.value * finite, error: l.error * finite.norm() })
}

/// `Λ(z, γ) = Λ(z, χ_γ)·𝒪(z, γ)` over ℚ with the primitive factor from the smoothed expansion.
pub fn completed_lambda(datum: &EllipticDatum, z: Complex64) -> Result<Complex64> {
    Ok(character_of(datum)?.lambda_smoothed(z)? * datum.l_value_identity(z)?)
}

/// [`completed_lambda`] with the primitive factor from the Hurwitz continuation.
pub fn completed_lambda_hurwitz(datum: &EllipticDatum, z: Complex64) -> Result<Complex64> {
    Ok(character_of(datum)?.lambda(z)? * datum.l_value_identity(z)?)
}

/// Exact check that `N(𝔯)^{z−1/2} Σ_{𝔡 | 𝔯} N(𝔡)^{1−2z}` is invariant under `z ↦ 1 − z`,
/// for `𝔯 = ∏ q^e` given by norms. The factor `N(𝔯)^{−1/2}` is a constant and is dropped.
pub fn divisor_sum_is_symmetric(support: &[(i128, u32)]) -> bool {
    let mut r = ExpSum::one();
    for &(q, e) in support {
        let mut local = ExpSum::default();
        for j in 0..=e {
            local = local.add(&ExpSum::term(Rational::from_integer(q.pow(j)), Ratio::new(1, q.pow(2 * j))));
        }
        r = r.mul(&local).mul(&ExpSum::term(Rational::from_integer(1), Rational::from_integer(q.pow(e))));
    }
    r.reflect() == r
}

/// Functional-equation report for a datum over ℚ: exact symmetry of `𝒪(z, γ)`, numeric
/// symmetry of `Λ` through the Hurwitz continuation, and agreement of the two `Λ` routes.
pub fn verify_functional_equation(datum: &EllipticDatum, z: f64, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("functional-equation");
    let inputs = json!({ "delta": datum.delta().x.to_string(), "z": z });
    match datum.orbital_polynomial() {
        Ok(p) => report.push(Check::exact("finite-part-symmetry", inputs.clone(), p.reflect(), p)),
        Err(e) => report.push(Check::failed("finite-part-symmetry", inputs.clone(), e.to_string())),
    }
    let zc = c(z);
    match (completed_lambda_hurwitz(datum, zc), completed_lambda_hurwitz(datum, 1.0 - zc)) {
        (Ok(a), Ok(b)) => report.push(Check::numeric("lambda-symmetry", inputs.clone(), a.re, b.re, tol)),
        (Err(e), _) | (_, Err(e)) => report.push(Check::failed("lambda-symmetry", inputs.clone(), e.to_string())),
    }
    match (completed_lambda(datum, zc), completed_lambda_hurwitz(datum, zc)) {
        (Ok(a), Ok(b)) => report.push(Check::numeric("lambda-routes-agree", inputs, a.re, b.re, tol)),
        (Err(e), _) | (_, Err(e)) => report.push(Check::failed("lambda-routes-agree", inputs, e.to_string())),
    }
    report
}

/// Truncation and quadrature settings for [`afe_verify`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfeBudget {
    pub contour: ContourSpec,
    /// Largest `F` argument summed.
    pub f_cut: f64,
    /// Largest `H` argument summed.
    pub h_cut: f64,
}

impl AfeBudget {
    pub fn coarse() -> Self {
        AfeBudget { contour: ContourSpec { abscissa: 1.0, height: 10.0, step: 0.5 }, f_cut: 8.0, h_cut: 30.0 }
    }

    pub fn standard() -> Self {
        AfeBudget { contour: ContourSpec { abscissa: 1.0, height: 30.0, step: 0.2 }, f_cut: 30.0, h_cut: 600.0 }
    }

    pub fn fine() -> Self {
        AfeBudget { contour: ContourSpec { abscissa: 1.0, height: 45.0, step: 0.1 }, f_cut: 40.0, h_cut: 1600.0 }
    }

    /// Budget level 0, 1 or 2.
    pub fn level(n: u32) -> Self {
        match n {
            0 => Self::coarse(),
            1 => Self::standard(),
            _ => Self::fine(),
        }
    }
}

/// Both sides of the approximate functional equation at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfeReport {
    pub z: f64,
    pub a: f64,
    pub alpha: f64,
    pub left: f64,
    pub f_term: f64,
    pub h_term: f64,
    pub right: f64,
    pub abs_defect: f64,
    pub rel_defect: f64,
    pub quadrature_error: f64,
    pub truncation_error: f64,
}

impl AfeReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "z": self.z, "A": json_f64(self.a), "alpha": self.alpha,
            "left": json_f64(self.left), "f_term": json_f64(self.f_term), "h_term": json_f64(self.h_term),
            "right": json_f64(self.right), "abs_defect": json_f64(self.abs_defect), "rel_defect": json_f64(self.rel_defect),
            "quadrature_error": json_f64(self.quadrature_error), "truncation_error": json_f64(self.truncation_error),
        })
    }
}

/// Approximate functional equation over ℚ with `A = |δ|^α`:
/// `L(z, γ) = Σ_{d|S} d^{1−2z} Σ_a χ_d(a) a^{−z} F(d²a/A)
///          + |δ|^{1/2−z} Σ_{d|S} d^{2z−1} Σ_a χ_d(a) a^{z−1} H(z, d²aA/|δ|)`.
pub fn afe_verify(datum: &EllipticDatum, z: f64, alpha: f64, budget: &AfeBudget) -> Result<AfeReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::UndefinedInput(format!("α must lie in (0, 1), got {alpha}")));
    }
    if !(z > 0.0 && z < 2.0) {
        return Err(Error::UndefinedInput(format!("z = {z} outside (0, 2)")));
    }
    let delta = rational_delta(datum)?;
    let data = datum.s_gamma()?;
    let abs_delta = delta.unsigned_abs() as f64;
    let a_param = abs_delta.powf(alpha);
    let left = l_mult_langlands(datum, c(z), 0)?.value.re;
    let h = HContour::new(c(z), &ramification_vector(datum), budget.contour)?;
    let s = data.s.norm as i64;
    let mut f_term = 0.0;
    let mut h_term = 0.0;
    let mut quadrature_error = 0.0;
    let mut truncation_error = 0.0;
    let k0 = crate::analytic::bessel_k0_2();
    for d in (1..=s).filter(|d| s % d == 0) {
        let n = delta / (d * d);
        let df = d as f64;
        // F side.
        let weight = df.powf(1.0 - 2.0 * z);
        let mut a = 1i64;
        loop {
            let x = df * df * a as f64 / a_param;
            if x > budget.f_cut {
                // Σ_{a > a₀} a^{−z} e^{−x}/(2K₀(2)) with x growing linearly in a.
                let step = df * df / a_param;
                truncation_error += weight * (-x).exp() / (2.0 * k0 * (1.0 - (-step).exp())) * (a as f64).powf(-z);
                break;
            }
            let chi = kronecker_i64(n, a);
            if chi != 0 {
                let fv = cutoff_f_with_error(x)?;
                let w = weight * chi as f64 * (a as f64).powf(-z);
                f_term += w * fv.value;
                quadrature_error += w.abs() * fv.error;
            }
            a += 1;
        }
        // H side.
        let weight = abs_delta.powf(0.5 - z) * df.powf(2.0 * z - 1.0);
        let mut a = 1i64;
        loop {
            let y = df * df * a as f64 * a_param / abs_delta;
            if y > budget.h_cut {
                // Tail of |H(z, y)| ≲ e^{−√y}/y summed over a: ∫_Y^∞ e^{−√t}/t dt ≤ 2e^{−√Y}/√Y.
                let step = df * df * a_param / abs_delta;
                truncation_error += weight * 2.0 * (-y.sqrt()).exp() / y.sqrt() / step * (a as f64).powf(z - 1.0).max(1.0);
                break;
            }
            let chi = kronecker_i64(n, a);
            if chi != 0 {
                let hv = h.eval(y)?;
                let w = weight * chi as f64 * (a as f64).powf(z - 1.0);
                h_term += w * hv.value.re;
                quadrature_error += w.abs() * hv.error();
            }
            a += 1;
        }
    }
    let right = f_term + h_term;
    let abs_defect = (left - right).abs();
    Ok(AfeReport {
        z,
        a: a_param,
        alpha,
        left,
        f_term,
        h_term,
        right,
        abs_defect,
        rel_defect: abs_defect / left.abs(),
        quadrature_error,
        truncation_error,
    })
}

/// `L(1, χ_D)` for a positive fundamental discriminant from a partial sum up to a multiple
/// of `D` near `terms`, plus the Abel-summation tail `S̄/(N+1)`, where `S̄` is the mean of the
/// periodic partial sums `Σ_{n ≤ m} χ(n)`.
pub fn l_one_quadratic(disc: i64, terms: u64) -> Result<f64> {
    if disc <= 0 {
        return Err(Error::UndefinedInput(format!("{disc} is not positive")));
    }
    let chi = QuadraticCharacter::new(disc)?;
    let period = disc as u64;
    let n = (terms / period).max(1) * period;
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for m in 1..=n {
        let v = chi.value(m as i64);
        if v != 0 {
            // Kahan summation keeps 10⁶⁺ terms accurate.
            let y = v as f64 / m as f64 - compensation;
            let t = sum + y;
            compensation = (t - sum) - y;
            sum = t;
        }
    }
    let mut partial = 0i64;
    let mut mean = 0.0;
    for m in 1..=period {
        partial += chi.value(m as i64) as i64;
        mean += partial as f64;
    }
    mean /= period as f64;
    Ok(sum + mean / (n + 1) as f64)
}

/// Class-number-formula value `2h log ε/√D` for a real quadratic field of discriminant `D`.
pub fn class_number_formula(disc: i64, class_number: u32) -> Result<f64> {
    let m = if disc % 4 == 0 { disc / 4 } else { disc };
    let field = crate::field::FieldDescriptor::real_quadratic(m)?;
    let eps = field.fundamental_unit()?.fundamental;
    let e = field.embed(eps, 0).abs().max(field.embed(eps, 1).abs());
    Ok(2.0 * class_number as f64 * e.ln() / (disc as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use crate::field::{AlgInt, FieldDescriptor};
    use proptest::prelude::*;

    fn euler_l(disc: i64, z: f64, bound: u64) -> f64 {
        primes_up_to(bound).iter().map(|&p| 1.0 / (1.0 - kronecker_i64(disc, p as i64) as f64 * (p as f64).powf(-z))).product()
    }

    fn datum_with_delta(delta: i128) -> EllipticDatum {
        EllipticDatum::rational_with_delta(delta).unwrap()
    }

    fn direct_sum(z: f64, n: i64, terms: i64) -> f64 {
        (1..=terms).map(|m| kronecker_i64(n, m) as f64 * (m as f64).powf(-z)).sum()
    }

    #[test]
    fn character_handle() {
        assert!(QuadraticCharacter::new(45).is_err());
        assert!(QuadraticCharacter::new(1).is_err());
        let chi = QuadraticCharacter::new(-4).unwrap();
        assert_eq!(chi.parity(), 1);
        assert_eq!((chi.value(3), chi.value(5), chi.value(2)), (-1, 1, 0));
        assert!((chi.l(c(1.0)).unwrap().re - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn zagier_examples() {
        let z5 = zagier_zeta(c(2.0), 5).unwrap().re;
        assert!((z5 - QuadraticCharacter::new(5).unwrap().l(c(2.0)).unwrap().re).abs() < 1e-15);
        // δ = 45: d = 1 gives (45/·), d = 3 gives 3^{−3}(5/·).
        let direct = direct_sum(2.0, 45, 2_000_000) + direct_sum(2.0, 5, 2_000_000) / 27.0;
        let got = zagier_zeta(c(2.0), 45).unwrap().re;
        assert!((got - direct).abs() < 1e-6, "{got} vs {direct}");
        assert!(zagier_zeta(c(2.0), 49).is_err());
        assert!(zagier_zeta(c(2.0), 7).is_err());
    }

    #[test]
    fn euler_products_agree_with_continuation() {
        for d in [5i64, 12, -4, 29, -23] {
            let l = QuadraticCharacter::new(d).unwrap().l(c(2.5)).unwrap().re;
            assert!((l - euler_l(d, 2.5, 100_000)).abs() < 1e-9);
        }
    }

    #[test]
    fn groupings_agree() {
        for delta in [5i128, 12, 29, 45, 48, 60, 1620, -16, -75, 3600 - 4 * 5] {
            let g = datum_with_delta(delta);
            assert_eq!(finite_part(&g).unwrap(), finite_part_by_characters(&g).unwrap(), "δ = {delta}");
            for z in [c(2.0), c(0.7), Complex64::new(0.5, 3.0)] {
                let a = l_mult_langlands(&g, z, 0).unwrap().value;
                let b = zagier_zeta(z, delta as i64).unwrap();
                assert!((a - b).norm() < 1e-12 * a.norm().max(1.0), "δ = {delta}, z = {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn finite_part_matches_orbital_at_one() {
        let g = datum_with_delta(45);
        let at_one = finite_part(&g).unwrap().eval(c(1.0)).re;
        // 𝒪(1, γ) = N(S)·(finite part), and the orbital value is 5 for δ = 45.
        assert!((3.0 * at_one - 5.0).abs() < 1e-13);
        let l = l_mult_langlands(&g, c(1.0), 0).unwrap().value.re;
        let l5 = QuadraticCharacter::new(5).unwrap().l(c(1.0)).unwrap().re;
        assert!((l - l5 * 5.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn lambda_routes_agree() {
        for d in [5i64, 12, 29, -4, -23, 8] {
            let chi = QuadraticCharacter::new(d).unwrap();
            for z in [c(0.3), c(0.5), c(2.0), Complex64::new(0.5, 4.0)] {
                let a = chi.lambda(z).unwrap();
                let b = chi.lambda_smoothed(z).unwrap();
                assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "D = {d}, z = {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn functional_equation_examples() {
        for (delta, z) in [(45, 0.3), (12, 0.7), (29, 0.25), (5, 0.5), (48, 0.4)] {
            let r = verify_functional_equation(&datum_with_delta(delta), z, 1e-6);
            assert!(r.pass, "{}", r.to_json());
        }
    }

    #[test]
    fn afe_examples() {
        for delta in [29, 45] {
            let r = afe_verify(&datum_with_delta(delta), 1.0, 0.5, &AfeBudget::standard()).unwrap();
            assert!(r.abs_defect < 1e-4, "{r:?}");
            assert!(r.abs_defect <= r.quadrature_error + r.truncation_error + 1e-10, "{r:?}");
        }
        assert!(afe_verify(&datum_with_delta(29), 1.0, 1.5, &AfeBudget::standard()).is_err());
    }

    #[test]
    fn afe_converges_with_budget() {
        let g = datum_with_delta(45);
        let defects: Vec<f64> = (0..3).map(|l| afe_verify(&g, 1.0, 0.5, &AfeBudget::level(l)).unwrap().abs_defect).collect();
        assert!(defects[0] > defects[1] && defects[1] >= defects[2] * 0.5, "{defects:?}");
    }

    #[test]
    fn afe_large_alpha_favours_f_term() {
        let g = datum_with_delta(29);
        let low = afe_verify(&g, 1.0, 0.2, &AfeBudget::standard()).unwrap();
        let high = afe_verify(&g, 1.0, 0.9, &AfeBudget::standard()).unwrap();
        assert!(high.h_term.abs() < low.h_term.abs());
        assert!((high.f_term - high.left).abs() < (low.f_term - low.left).abs());
    }

    #[test]
    fn class_number_examples() {
        for (d, expect) in [(5, 0.430409), (8, 0.623225), (12, 0.760346)] {
            let cnf = class_number_formula(d, 1).unwrap();
            assert!((cnf - expect).abs() < 1e-6, "{d}: {cnf}");
            let l = l_one_quadratic(d, 1_000_000).unwrap();
            assert!((l - cnf).abs() < 1e-8, "{d}: {l} vs {cnf}");
        }
        assert!(l_one_quadratic(-4, 1000).is_err());
        assert!(l_one_quadratic(45, 1000).is_err());
    }

    #[test]
    fn hecke_l_over_quadratic_field() {
        // K = ℚ(√33), γ with δ = 5: L_K(z, χ_γ) = L(z, χ₅)·L(z, χ₁₆₅).
        let k = FieldDescriptor::real_quadratic(33).unwrap();
        let q = k.split_prime(2).unwrap().remove(0);
        let rho = k.find_generator(&k.prime_power(&q, 1), 50).unwrap();
        let g = EllipticDatum::new(&k, &q, 1, rho, 0, AlgInt::ONE, AlgInt::int(3)).unwrap();
        assert_eq!(g.delta(), AlgInt::int(5));
        for z in [2.0, 3.0] {
            let l = hecke_l_euler(&g, c(z), 20_000).unwrap();
            let expect =
                QuadraticCharacter::new(5).unwrap().l(c(z)).unwrap() * QuadraticCharacter::new(165).unwrap().l(c(z)).unwrap();
            assert!((l.value - expect).norm() <= l.error + 1e-12, "{z}: {} vs {expect} ± {}", l.value, l.error);
        }
        assert!(hecke_l_euler(&g, c(0.8), 1000).is_err());
        assert!(completed_lambda(&g, c(0.3)).is_err());
    }

    #[test]
    fn h_agrees_across_data_with_equal_signs() {
        let a = HContour::new(c(1.0), &ramification_vector(&datum_with_delta(29)), ContourSpec::default()).unwrap();
        let b = HContour::new(c(1.0), &ramification_vector(&datum_with_delta(45)), ContourSpec::default()).unwrap();
        for y in [0.3, 2.0, 17.0] {
            let (x, w) = (a.eval(y).unwrap(), b.eval(y).unwrap());
            assert!((x.value - w.value).norm() <= x.error() + w.error());
        }
    }

    proptest! {
        #[test]
        fn divisor_sum_symmetry(ps in proptest::sample::subsequence(vec![2i128, 3, 5, 7, 11, 13, 4, 9, 25, 49], 0..=3),
                                es in proptest::collection::vec(1u32..4, 3)) {
            let support: Vec<(i128, u32)> = ps.iter().zip(&es).map(|(&q, &e)| (q, e)).collect();
            prop_assert!(divisor_sum_is_symmetric(&support));
        }
    }
}
