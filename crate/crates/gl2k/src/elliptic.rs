//! Regular elliptic data `(τ, u)`, the discriminant `δ = τ² − 4uε`, the ideal `S_γ`
//! and finite orbital integrals.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{AlgInt, FieldDescriptor, Ideal, PrimeIdeal, SplitType};
use crate::local::Completion;
use crate::symbols::{chi_gamma, completion_for};

/// Exact rational.
pub type Rational = Ratio<i128>;

/// Regular elliptic datum over `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticDatum {
    pub field: FieldDescriptor,
    /// The prime `𝔭` with `(det γ) = 𝔭^k`.
    pub prime: PrimeIdeal,
    pub k: u32,
    /// Order of `𝔭` in the class group, or a multiple of it.
    pub h: u32,
    /// Generator of `𝔭^h`.
    pub rho: AlgInt,
    /// `ρ^{k/h}`.
    pub eps: AlgInt,
    pub u: AlgInt,
    pub tau: AlgInt,
}

impl EllipticDatum {
    /// Validates `(ρ) = 𝔭^h`, `h | k` and that `u` is a unit.
    pub fn new(field: &FieldDescriptor, prime: &PrimeIdeal, h: u32, rho: AlgInt, k: u32, u: AlgInt, tau: AlgInt) -> Result<Self> {
        if !field.validate_hyp_div(prime, h, rho, k) {
            return Err(Error::UndefinedInput(format!("({rho}) is not {prime}^{h}, or {h} does not divide {k}")));
        }
        if !field.is_unit(u) {
            return Err(Error::UndefinedInput(format!("{u} is not a unit")));
        }
        let eps = field.pow(rho, k / h);
        Ok(EllipticDatum { field: field.clone(), prime: prime.clone(), k, h, rho, eps, u, tau })
    }

    /// Convenience constructor over ℚ with `det γ = u·p^k`.
    pub fn rational(p: u64, k: u32, u: i128, tau: i128) -> Result<Self> {
        let q = FieldDescriptor::rational();
        let prime = q.split_prime(p)?.remove(0);
        Self::new(&q, &prime, 1, AlgInt::int(p as i128), k, AlgInt::int(u), AlgInt::int(tau))
    }

    /// The first datum over ℚ with `τ² − 4u·p^k = δ`, searching `0 ≤ τ < 200`,
    /// `p ∈ {2, 3, 5, 7}`, `k < 4`, `u = ±1`.
    pub fn rational_with_delta(delta: i128) -> Result<Self> {
        for tau in 0..200i128 {
            for p in [2u64, 3, 5, 7] {
                for k in 0..4 {
                    for u in [1i128, -1] {
                        if tau * tau - 4 * u * (p as i128).pow(k) == delta {
                            return Self::rational(p, k, u, tau);
                        }
                    }
                }
            }
        }
        Err(Error::UndefinedInput(format!("no datum with δ = {delta} in the search range")))
    }

    /// The exponent `k' = k/h`.
    pub fn k_prime(&self) -> u32 {
        self.k / self.h
    }

    /// `det γ = uε`.
    pub fn det(&self) -> AlgInt {
        self.field.mul(self.u, self.eps)
    }

    /// `δ = τ² − 4uε`.
    pub fn delta(&self) -> AlgInt {
        let f = &self.field;
        f.sub(f.mul(self.tau, self.tau), f.scale(self.det(), 4))
    }

    /// True iff `δ` is not a square in `K`.
    pub fn is_regular_elliptic(&self) -> bool {
        !self.field.is_square(self.delta())
    }

    /// `S_γ`, `Δ_γ` and per-prime valuations.
    pub fn s_gamma(&self) -> Result<DiscriminantData> {
        if !self.is_regular_elliptic() {
            return Err(Error::SquareDiscriminant);
        }
        DiscriminantData::from_delta(&self.field, self.delta())
    }

    /// Whether `𝔡 | S_γ`, decided by the local congruence criterion.
    pub fn divides_s_gamma(&self, d: &Ideal) -> Result<bool> {
        if !self.is_regular_elliptic() {
            return Err(Error::SquareDiscriminant);
        }
        divides_s_gamma_delta(&self.field, self.delta(), d)
    }

    /// Local orbital factor at `𝔮`.
    pub fn local_orbital(&self, q: &PrimeIdeal) -> Result<Rational> {
        let data = self.s_gamma()?;
        let n = data.s_valuation(q);
        if n == 0 {
            return Ok(Rational::one());
        }
        let chi = chi_gamma(self, q)?;
        Ok(local_orbital_value(q.norm() as i128, n, chi))
    }

    /// `p^{-k/2}·Σ_{𝔡 | S_γ} N(𝔡) ∏_{𝔮 | 𝔡} (1 − χ_γ(𝔮)/N(𝔮))`.
    pub fn finite_orbital(&self) -> Result<OrbitalValue> {
        let data = self.s_gamma()?;
        let chis = self.chi_on_support(&data)?;
        let mut total = Rational::zero();
        for exps in divisor_exponents(&data.s.factors) {
            let mut term = Rational::one();
            for ((q, _), (&e, chi)) in data.s.factors.iter().zip(exps.iter().zip(&chis)) {
                if e > 0 {
                    let qn = q.norm() as i128;
                    term *= Rational::from_integer(qn.pow(e)) * (Rational::one() - Rational::new(*chi as i128, qn));
                }
            }
            total += term;
        }
        Ok(OrbitalValue { p: self.prime.norm(), k: self.k, rational: total })
    }

    /// Product of [`EllipticDatum::local_orbital`] over primes dividing `S_γ`.
    pub fn finite_orbital_product(&self) -> Result<OrbitalValue> {
        let data = self.s_gamma()?;
        let mut total = Rational::one();
        for (q, _) in &data.s.factors {
            total *= self.local_orbital(q)?;
        }
        Ok(OrbitalValue { p: self.prime.norm(), k: self.k, rational: total })
    }

    fn chi_on_support(&self, data: &DiscriminantData) -> Result<Vec<i8>> {
        data.s.factors.iter().map(|(q, _)| chi_gamma(self, q)).collect()
    }

    /// `𝒪(z, γ)` as an exact exponential sum `Σ c·b^z`.
    pub fn orbital_polynomial(&self) -> Result<ExpSum> {
        let data = self.s_gamma()?;
        let chis = self.chi_on_support(&data)?;
        let support: Vec<(i128, u32, i8)> =
            data.s.factors.iter().zip(&chis).map(|((q, e), &c)| (q.norm() as i128, *e, c)).collect();
        Ok(orbital_divisor_sum(&support))
    }

    /// `𝒪(z, γ)` evaluated at a complex point.
    pub fn l_value_identity(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.orbital_polynomial()?.eval(z))
    }
}

/// Local orbital value for residue field size `q`, `n = val(S_γ)` and `χ_γ(𝔮)`.
pub fn local_orbital_value(q: i128, n: u32, chi: i8) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    let qn = Rational::from_integer(q.pow(n));
    let qm1 = Rational::from_integer(q - 1);
    match chi {
        1 => qn,
        -1 => qn * Rational::from_integer(q + 1) / qm1 - Rational::from_integer(2) / qm1,
        _ => qn * Rational::from_integer(q) / qm1 - Rational::one() / qm1,
    }
}

/// `N(S)^z Σ_{𝔡 | S} N(𝔡)^{1−2z} ∏_{𝔮 | S/𝔡} (1 − χ(𝔮)N(𝔮)^{−z})` for `S = ∏ 𝔮^{e}`,
/// given as `(N(𝔮), e, χ(𝔮))`.
pub fn orbital_divisor_sum(support: &[(i128, u32, i8)]) -> ExpSum {
    let mut s_norm = 1i128;
    for &(q, e, _) in support {
        s_norm *= q.pow(e);
    }
    let mut total = ExpSum::default();
    let factors: Vec<(i128, u32)> = support.iter().map(|&(q, e, _)| (q, e)).collect();
    for exps in divisor_exponents(&factors) {
        let mut nd = 1i128;
        let mut term = ExpSum::one();
        for (&(q, e, chi), &j) in support.iter().zip(&exps) {
            nd *= q.pow(j);
            if j < e {
                term = term.mul(&ExpSum::one().add(&ExpSum::term(Rational::from_integer(-(chi as i128)), Rational::new(1, q))));
            }
        }
        // N(𝔡)^{1−2z} = N(𝔡)·(N(𝔡)^{-2})^z
        term = term.mul(&ExpSum::term(Rational::from_integer(nd), Rational::new(1, nd * nd)));
        total = total.add(&term);
    }
    total.mul(&ExpSum::term(Rational::one(), Rational::from_integer(s_norm)))
}

/// The same quantity as a product of local factors.
pub fn orbital_local_product(support: &[(i128, u32, i8)]) -> ExpSum {
    let mut total = ExpSum::one();
    for &(q, e, chi) in support {
        total = total.mul(&orbital_divisor_sum(&[(q, e, chi)]));
    }
    total
}

fn divisor_exponents<T>(factors: &[(T, u32)]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for (_, e) in factors {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=*e).map(move |j| {
                    let mut w = v.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
    }
    out
}

/// `p^{-k/2}·rational`, kept exact until reported.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitalValue {
    pub p: u64,
    pub k: u32,
    pub rational: Rational,
}

impl OrbitalValue {
    pub fn to_f64(&self) -> f64 {
        (self.p as f64).powf(-(self.k as f64) / 2.0) * ratio_to_f64(&self.rational)
    }
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

/// Finite exponential sum `Σ coefficient · base^z` with rational data.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExpSum(pub BTreeMap<Rational, Rational>);

impl ExpSum {
    pub fn one() -> Self {
        Self::term(Rational::one(), Rational::one())
    }

    pub fn term(coefficient: Rational, base: Rational) -> Self {
        let mut m = BTreeMap::new();
        if !coefficient.is_zero() {
            m.insert(base, coefficient);
        }
        ExpSum(m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (b, c) in &other.0 {
            let e = m.entry(*b).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                m.remove(b);
            }
        }
        ExpSum(m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ExpSum::default();
        for (b1, c1) in &self.0 {
            for (b2, c2) in &other.0 {
                out = out.add(&ExpSum::term(c1 * c2, b1 * b2));
            }
        }
        out
    }

    /// The sum as a function of `1 − z`.
    pub fn reflect(&self) -> Self {
        let mut out = ExpSum::default();
        for (b, c) in &self.0 {
            out = out.add(&ExpSum::term(c * b, b.recip()));
        }
        out
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().map(|(b, c)| Complex64::new(ratio_to_f64(b), 0.0).powc(z) * ratio_to_f64(c)).sum()
    }
}

impl std::fmt::Display for ExpSum {
    /// Terms as `c·(b)^z` in increasing order of the base; `0` when empty.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·({b})^z")?;
        }
        Ok(())
    }
}

/// `S_γ`, `Δ_γ` and the valuations of `δ` and `S_γ` at each prime dividing `δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantData {
    pub delta: AlgInt,
    pub s: Ideal,
    pub disc: Ideal,
    /// `(𝔮, val_𝔮(δ), val_𝔮(S_γ))`.
    pub valuations: Vec<(PrimeIdeal, u32, u32)>,
}

impl DiscriminantData {
    /// Computes `S_γ` from `δ` prime by prime.
    pub fn from_delta(field: &FieldDescriptor, delta: AlgInt) -> Result<Self> {
        if delta.is_zero() || field.is_square(delta) {
            return Err(Error::SquareDiscriminant);
        }
        let principal = field.principal(delta)?;
        let mut s_factors = Vec::new();
        let mut d_factors = Vec::new();
        let mut valuations = Vec::new();
        // Primes above 2 must be examined even when δ is a unit there.
        let mut primes: Vec<(PrimeIdeal, u32)> = principal.factors.clone();
        for q in field.split_prime(2)? {
            if !primes.iter().any(|(r, _)| *r == q) {
                primes.push((q, 0));
            }
        }
        primes.sort_by(|a, b| a.0.cmp(&b.0));
        for (q, v) in primes {
            let n = if q.p == 2 {
                if q.kind != SplitType::Split {
                    return Err(Error::UnsupportedPrime("S_γ at a non-split prime above 2".into()));
                }
                let c = Completion::new(field, &q, v + 3)?;
                let x = c.from_global(delta);
                (0..=v / 2).rev().find(|&t| matches!(c.two_adic_quotient(x, t, 2), Some(0 | 1))).unwrap_or(0)
            } else {
                v / 2
            };
            if n > 0 {
                s_factors.push((q.clone(), n));
            }
            if v > 2 * n {
                d_factors.push((q.clone(), v - 2 * n));
            }
            if v > 0 {
                valuations.push((q, v, n));
            }
        }
        Ok(DiscriminantData {
            delta,
            s: field.ideal_from_factors(&s_factors),
            disc: field.ideal_from_factors(&d_factors),
            valuations,
        })
    }

    /// `val_𝔮(S_γ)`.
    pub fn s_valuation(&self, q: &PrimeIdeal) -> u32 {
        self.valuations.iter().find(|(r, _, _)| r == q).map_or(0, |(_, _, n)| *n)
    }
}

/// `𝔡 | S_γ` iff `𝔡² | δ` and `δ·π^{-2 val(𝔡)} ≡ 0, 1 mod 4` locally at each prime above 2.
pub fn divides_s_gamma_delta(field: &FieldDescriptor, delta: AlgInt, d: &Ideal) -> Result<bool> {
    let principal = field.principal(delta)?;
    for (q, e) in &d.factors {
        if field.ideal_valuation(&principal, q) < 2 * e {
            return Ok(false);
        }
    }
    for q in field.split_prime(2)? {
        if q.kind != SplitType::Split {
            return Err(Error::UnsupportedPrime("congruence test at a non-split prime above 2".into()));
        }
        let t = field.ideal_valuation(d, &q);
        let c = completion_for(field, &q, 2 * t + 2)?;
        match c.two_adic_quotient(c.from_global(delta), t, 2) {
            Some(0 | 1) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
