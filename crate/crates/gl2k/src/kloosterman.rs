//! Kloosterman-type sums: exact local and global enumeration, the closed-form local
//! tables, and the associated Dirichlet series.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::arith::Symbol;
use crate::elliptic::EllipticDatum;
use crate::error::{Error, Result};
use crate::field::{AlgInt, FieldDescriptor, Ideal, PrimeIdeal, SplitType};
use crate::local::{Completion, Local};
use crate::symbols::{completion_for, modified_hilbert, restricted_hilbert, shifted_hilbert};
use crate::zeta::dedekind_zeta;

/// Default cap on nodes visited by one local enumeration.
pub const DEFAULT_NODE_CAP: u64 = 50_000_000;

/// Parameters of a local sum `K̃_{𝔮^v, 𝔮^r}(u)` with local constant `4uρ^{k'}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSumParams {
    pub prime: PrimeIdeal,
    pub v: u32,
    pub r: u32,
    /// A unit at `𝔮` (a global unit in the global setting).
    pub u: AlgInt,
    pub rho: AlgInt,
    pub k_prime: u32,
}

impl LocalSumParams {
    /// `4uρ^{k'}`.
    pub fn constant(&self, field: &FieldDescriptor) -> AlgInt {
        local_constant(field, self.u, self.rho, self.k_prime)
    }
}

/// `4uρ^{k'}`.
pub fn local_constant(field: &FieldDescriptor, u: AlgInt, rho: AlgInt, k_prime: u32) -> AlgInt {
    field.scale(field.mul(u, field.pow(rho, k_prime)), 4)
}

/// Which closed-form table applies at a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Odd prime not dividing `ρ`.
    OddCoprime,
    /// Odd prime with `𝔮^k ∥ ρ^{k'}`, `k ≥ 1`.
    OddDividing,
    /// Prime above 2 not dividing `ρ`.
    TwoCoprime,
    /// Prime above 2 with `𝔮^k ∥ ρ^{k'}`, `k` odd.
    TwoDividingOdd,
    /// Prime above 2 with `𝔮^k ∥ ρ^{k'}`, `k ≥ 2` even; no table.
    TwoDividingEven,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::OddCoprime => "odd-coprime",
            Regime::OddDividing => "odd-dividing",
            Regime::TwoCoprime => "two-coprime",
            Regime::TwoDividingOdd => "two-dividing-odd",
            Regime::TwoDividingEven => "two-dividing-even",
        }
    }
}

/// Regime data needed by the closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegimeInfo {
    pub regime: Regime,
    /// Residue field size.
    pub q: i128,
    /// `val_𝔮(ρ^{k'})`.
    pub k: u32,
    /// Square class of the unit part of `uρ^{k'}` (±1), or its residue mod 8 above 2.
    pub class: i8,
}

/// Determines the regime of `4uρ^{k'}` at `q`.
pub fn classify(field: &FieldDescriptor, q: &PrimeIdeal, u: AlgInt, rho: AlgInt, k_prime: u32) -> Result<RegimeInfo> {
    if q.p == 2 && q.kind != SplitType::Split {
        return Err(Error::UnsupportedPrime(format!("{:?} prime above 2", q.kind)));
    }
    if field.valuation(u, q)? != 0 {
        return Err(Error::UndefinedInput(format!("{u} is not a unit at {q}")));
    }
    let w = field.mul(u, field.pow(rho, k_prime));
    let k = field.valuation(w, q)?;
    let qn = q.norm() as i128;
    let (regime, class) = if q.p != 2 {
        if k == 0 {
            (Regime::OddCoprime, restricted_hilbert(field, w, q)?)
        } else if k % 2 == 1 {
            (Regime::OddDividing, 0)
        } else {
            (Regime::OddDividing, shifted_hilbert(field, w, q, k / 2)?)
        }
    } else if k == 0 {
        let c = completion_for(field, q, 3)?;
        (Regime::TwoCoprime, c.from_global(w).x.rem_euclid(8) as i8)
    } else if k % 2 == 1 {
        (Regime::TwoDividingOdd, 0)
    } else {
        (Regime::TwoDividingEven, 0)
    };
    Ok(RegimeInfo { regime, q: qn, k, class })
}

/// Closed-form table value for `(v, r)`.
pub fn closed_value(info: &RegimeInfo, v: u32, r: u32) -> Result<i128> {
    let q = info.q;
    let pw = |e: u32| q.pow(e);
    let even = v.is_multiple_of(2);
    Ok(match info.regime {
        Regime::OddCoprime => odd_coprime(q, v, r, info.class as i128),
        Regime::OddDividing => {
            let k0 = info.k / 2;
            if info.k % 2 == 1 {
                match (v, r) {
                    (0, 0) => 1,
                    (0, r) if r <= k0 => pw(r),
                    (0, _) => 0,
                    (v, r) if r <= k0 => pw(r + v) - pw(r + v - 1),
                    _ => 0,
                }
            } else {
                let c = info.class as i128;
                match (v, r) {
                    (0, r) if r <= k0 => pw(r),
                    (0, _) => pw(k0) * (1 + c),
                    (v, r) if r < k0 => pw(r + v) - pw(r + v - 1),
                    (v, r) if r == k0 && even => pw(k0 + v) - pw(k0 + v - 1) * (1 + c),
                    (v, r) if r == k0 => -pw(k0 + v - 1),
                    (v, _) if even => (q - 1) * pw(k0 + v - 1) * (1 + c),
                    _ => 0,
                }
            }
        }
        Regime::TwoCoprime => {
            let c = info.class;
            let two = |e: u32| 1i128 << e;
            match (v, r) {
                (0, 0) | (0, 1) => 4,
                (0, 2) => {
                    if c == 1 || c == 5 {
                        8
                    } else {
                        0
                    }
                }
                (0, _) => {
                    if c == 1 {
                        16
                    } else {
                        0
                    }
                }
                (v, 0) if even => two(v + 1),
                (v, 0) => -two(v + 1),
                (_, _) if !even => 0,
                (v, 1) => {
                    if c == 3 || c == 7 {
                        two(v + 2)
                    } else {
                        0
                    }
                }
                (v, 2) => {
                    if c == 5 {
                        two(v + 3)
                    } else {
                        0
                    }
                }
                (v, _) => {
                    if c == 1 {
                        two(v + 3)
                    } else {
                        0
                    }
                }
            }
        }
        Regime::TwoDividingOdd => {
            let k0 = info.k / 2;
            let two = |e: u32| 1i128 << e;
            match (v, r) {
                (_, r) if r > k0 => 0,
                (0, r) => two(r + 2),
                (v, r) => two(v + r + 1),
            }
        }
        Regime::TwoDividingEven => {
            return Err(Error::UnsupportedRegime("no closed table above 2 when k is even and positive".into()))
        }
    })
}

fn odd_coprime(q: i128, v: u32, r: u32, c: i128) -> i128 {
    match (v, r) {
        (0, 0) => 1,
        (0, _) => 1 + c,
        (v, 0) if v % 2 == 0 => q.pow(v) - q.pow(v - 1) * (1 + c),
        (v, 0) => -q.pow(v - 1),
        (v, _) if v % 2 == 0 => q.pow(v - 1) * (q - 1) * (1 + c),
        _ => 0,
    }
}

/// Closed-form value of the local sum.
pub fn local_sum_closed(field: &FieldDescriptor, params: &LocalSumParams) -> Result<i128> {
    let info = classify(field, &params.prime, params.u, params.rho, params.k_prime)?;
    closed_value(&info, params.v, params.r)
}

/// Counts from one enumeration of `μ` with `μ² ≡ c mod 𝔮^{2r}` (plus the mod-4
/// condition above 2), from which every `K̃_{𝔮^v, 𝔮^r}` follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalProfile {
    pub q: i128,
    pub r: u32,
    /// Admissible `μ` modulo the `v = 0` modulus.
    pub count: i128,
    /// Admissible `μ` modulo the `v > 0` period with symbol +1.
    pub plus: i128,
    /// Same with symbol −1.
    pub minus: i128,
}

impl LocalProfile {
    /// `K̃_{𝔮^v, 𝔮^r}`.
    pub fn value(&self, v: u32) -> i128 {
        if v == 0 {
            return self.count;
        }
        let s = if v.is_multiple_of(2) { self.plus + self.minus } else { self.plus - self.minus };
        self.q.pow(v - 1) * s
    }
}

struct Walk<'a> {
    c: &'a Completion,
    constant: Local,
    digits: Vec<Local>,
    powers: Vec<Local>,
    r: u32,
    two: bool,
    depth: u32,
    nodes: u64,
    cap: u64,
    count: i128,
    plus: i128,
    minus: i128,
}

impl Walk<'_> {
    fn visit(&mut self, mu: Local, j: u32) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::Resource(format!("local enumeration exceeded {} nodes", self.cap)));
        }
        let c = self.c;
        let f = c.sub(c.mul(mu, mu), self.constant);
        if j <= 2 * self.r && !c.in_power(f, j) {
            return Ok(());
        }
        if self.two {
            if j == 2 * self.r + 2 {
                if !matches!(c.two_adic_quotient(f, self.r, 2), Some(0 | 1)) {
                    return Ok(());
                }
                self.count += 1;
            }
            if j == self.depth {
                match c.two_adic_quotient(f, self.r, 3) {
                    Some(1) => self.plus += 1,
                    Some(5) => self.minus += 1,
                    _ => {}
                }
                return Ok(());
            }
        } else {
            if j == 2 * self.r {
                self.count += 1;
            }
            if j == self.depth {
                match c.shifted_symbol(f, self.r)? {
                    1 => self.plus += 1,
                    -1 => self.minus += 1,
                    _ => {}
                }
                return Ok(());
            }
        }
        let step = self.powers[j as usize];
        for i in 0..self.digits.len() {
            let next = c.add(mu, c.mul(self.digits[i], step));
            self.visit(next, j + 1)?;
        }
        Ok(())
    }
}

/// Digits of `μ` enumerated for a given `r`.
fn profile_depth(q: &PrimeIdeal, r: u32) -> u32 {
    if q.p == 2 {
        2 * r + 3
    } else {
        2 * r + 1
    }
}

/// Exact enumeration of `μ` modulo `𝔮^{2r+1}` (odd) or `2^{2r+3}` (above 2), pruning
/// residues that already violate `μ² ≡ c mod 𝔮^j`.
pub fn local_profile(field: &FieldDescriptor, q: &PrimeIdeal, constant: AlgInt, r: u32, cap: u64) -> Result<LocalProfile> {
    if q.p == 2 && q.kind != SplitType::Split {
        return Err(Error::UnsupportedPrime(format!("{:?} prime above 2", q.kind)));
    }
    let two = q.p == 2;
    let depth = profile_depth(q, r);
    let c = completion_for(field, q, depth)?;
    let pi = c.uniformizer();
    let mut powers = vec![c.int(1)];
    for _ in 0..depth {
        let last = *powers.last().unwrap();
        powers.push(c.mul(last, pi));
    }
    let mut walk = Walk {
        c: &c,
        constant: c.from_global(constant),
        digits: c.digits(),
        powers,
        r,
        two,
        depth,
        nodes: 0,
        cap,
        count: 0,
        plus: 0,
        minus: 0,
    };
    walk.visit(c.int(0), 0)?;
    Ok(LocalProfile { q: q.norm() as i128, r, count: walk.count, plus: walk.plus, minus: walk.minus })
}

/// Exact value of `K̃_{𝔮^v, 𝔮^r}(u)` by enumeration.
pub fn local_sum_bruteforce(field: &FieldDescriptor, params: &LocalSumParams) -> Result<i128> {
    let profile = local_profile(field, &params.prime, params.constant(field), params.r, DEFAULT_NODE_CAP)?;
    Ok(profile.value(params.v))
}

/// Direct sum over every residue modulo `𝔮^{v+2r}` (odd) or `𝔮^{2+v+2r}` (above 2),
/// using global arithmetic and the symbol module. Slow; for cross-checks.
pub fn local_sum_naive(field: &FieldDescriptor, params: &LocalSumParams, cap: u64) -> Result<i128> {
    let q = &params.prime;
    let two = q.p == 2;
    let exponent = params.v + 2 * params.r + if two { 2 } else { 0 };
    let modulus = field.prime_power(q, exponent);
    let c = params.constant(field);
    let comp = completion_for(field, q, exponent + 3)?;
    let mut total = 0i128;
    for mu in field.residues_capped(&modulus, cap)? {
        let alpha = field.sub(field.mul(mu, mu), c);
        let a = comp.from_global(alpha);
        if !comp.in_power(a, 2 * params.r) {
            continue;
        }
        if two && !matches!(comp.two_adic_quotient(a, params.r, 2), Some(0 | 1)) {
            continue;
        }
        if params.v == 0 {
            total += 1;
            continue;
        }
        let s = if alpha.is_zero() { 0 } else { shifted_hilbert(field, alpha, q, params.r)? };
        total += pow_symbol(s, params.v) as i128;
    }
    Ok(total)
}

fn pow_symbol(s: Symbol, e: u32) -> Symbol {
    if e == 0 {
        1
    } else if e.is_multiple_of(2) {
        s * s
    } else {
        s
    }
}

/// `K_{𝔞,𝔡}(u)` by enumeration of `μ mod 4𝔞𝔡²`.
pub fn global_sum_bruteforce(datum: &EllipticDatum, a: &Ideal, d: &Ideal, cap: u64) -> Result<i128> {
    let field = &datum.field;
    let four = field.principal(AlgInt::int(4))?;
    let d2 = field.multiply(d, d);
    let modulus = field.multiply(&field.multiply(&four, a), &d2);
    let c = local_constant(field, datum.u, datum.rho, datum.k_prime());
    let twos: Vec<(Completion, u32)> = field
        .split_prime(2)?
        .into_iter()
        .map(|q| {
            if q.kind != SplitType::Split {
                return Err(Error::UnsupportedPrime("2 does not split".into()));
            }
            let t = field.ideal_valuation(d, &q);
            Ok((completion_for(field, &q, 2 * t + 2)?, t))
        })
        .collect::<Result<_>>()?;
    let mut total = 0i128;
    for mu in field.residues_capped(&modulus, cap)? {
        let alpha = field.sub(field.mul(mu, mu), c);
        if !field.hnf_contains(&d2.hnf, alpha) {
            continue;
        }
        let ok = twos.iter().all(|(comp, t)| matches!(comp.two_adic_quotient(comp.from_global(alpha), *t, 2), Some(0 | 1)));
        if !ok {
            continue;
        }
        total += if alpha.is_zero() { i128::from(a.norm == 1) } else { modified_hilbert(field, alpha, d, a)? as i128 };
    }
    Ok(total)
}

/// Product of local enumerations over the primes dividing `2𝔞𝔡`.
pub fn global_sum_factored(datum: &EllipticDatum, a: &Ideal, d: &Ideal) -> Result<i128> {
    let field = &datum.field;
    let c = local_constant(field, datum.u, datum.rho, datum.k_prime());
    let mut primes: Vec<PrimeIdeal> = field.split_prime(2)?;
    for (q, _) in a.factors.iter().chain(&d.factors) {
        if !primes.contains(q) {
            primes.push(q.clone());
        }
    }
    let mut total = 1i128;
    for q in primes {
        let v = field.ideal_valuation(a, &q);
        let r = field.ideal_valuation(d, &q);
        total *= local_profile(field, &q, c, r, DEFAULT_NODE_CAP)?.value(v);
        if total == 0 {
            break;
        }
    }
    Ok(total)
}

/// A truncated Dirichlet series value with a rigorous bound on the omitted terms.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletEval {
    pub z: Complex64,
    pub value: Complex64,
    pub tail_bound: f64,
    /// Truncation parameters: `(v_max, r_max)` locally, `(B, 0)` globally.
    pub truncation: (u64, u64),
}

/// Growth-bound tail factors: `x = q^{1−2σ}` for `r`, `y = q^{−σ}` for `v`.
fn tail_ratios(q: f64, sigma: f64) -> (f64, f64) {
    (q.powf(1.0 - 2.0 * sigma), q.powf(-sigma))
}

/// `c0·[G(x)G(y) − G_R(x)G_V(y)]` with `G` the geometric series.
fn local_tail(c0: f64, x: f64, y: f64, v_max: u32, r_max: u32) -> f64 {
    let g = |t: f64| 1.0 / (1.0 - t);
    let gn = |t: f64, n: u32| (1.0 - t.powi(n as i32 + 1)) / (1.0 - t);
    (c0 * (g(x) * g(y) - gn(x, r_max) * gn(y, v_max))).max(0.0)
}

/// Table of `K̃_{𝔮^v, 𝔮^r}` for `v ≤ v_max`, `r ≤ r_max`.
pub fn local_table(field: &FieldDescriptor, q: &PrimeIdeal, constant: AlgInt, v_max: u32, r_max: u32) -> Result<Vec<Vec<i128>>> {
    (0..=r_max)
        .map(|r| {
            let p = local_profile(field, q, constant, r, DEFAULT_NODE_CAP)?;
            Ok((0..=v_max).map(|v| p.value(v)).collect())
        })
        .collect()
}

/// `Σ_{v ≤ v_max, r ≤ r_max} K̃_{𝔮^v,𝔮^r}·N(𝔮)^{−r(2z+1) − v(z+1)}` from enumerated values.
pub fn local_dirichlet_truncated(
    field: &FieldDescriptor,
    q: &PrimeIdeal,
    z: Complex64,
    constant: AlgInt,
    v_max: u32,
    r_max: u32,
) -> Result<DirichletEval> {
    if z.re <= 1.0 {
        return Err(Error::Nonconvergent(format!("Re z = {} must exceed 1", z.re)));
    }
    let table = local_table(field, q, constant, v_max, r_max)?;
    let qf = q.norm() as f64;
    let xr = Complex64::new(qf, 0.0).powc(-(2.0 * z + 1.0));
    let yv = Complex64::new(qf, 0.0).powc(-(z + 1.0));
    let mut value = Complex64::new(0.0, 0.0);
    let mut rp = Complex64::new(1.0, 0.0);
    for row in &table {
        let mut vp = rp;
        for &k in row {
            value += vp * k as f64;
            vp *= yv;
        }
        rp *= xr;
    }
    let (x, y) = tail_ratios(qf, z.re);
    let c0 = if q.p == 2 { 4.0 } else { 1.0 };
    Ok(DirichletEval { z, value, tail_bound: local_tail(c0, x, y, v_max, r_max), truncation: (v_max as u64, r_max as u64) })
}

/// Smallest depths whose growth-bound tail is below `tol`.
pub fn local_depths(q: u64, sigma: f64, tol: f64) -> (u32, u32) {
    let (x, y) = tail_ratios(q as f64, sigma);
    let c0 = if q == 2 { 4.0 } else { 1.0 };
    let g = |t: f64| 1.0 / (1.0 - t);
    let mut v = 0u32;
    while c0 * g(x) * g(y) * y.powi(v as i32 + 1) > tol / 2.0 {
        v += 1;
    }
    let mut r = 0u32;
    while c0 * g(x) * g(y) * x.powi(r as i32 + 1) > tol / 2.0 {
        r += 1;
    }
    (v, r)
}

/// Local factor truncated at depths chosen to meet `tol`.
pub fn local_dirichlet_auto(
    field: &FieldDescriptor,
    q: &PrimeIdeal,
    z: Complex64,
    constant: AlgInt,
    tol: f64,
) -> Result<DirichletEval> {
    let (v, mut r) = local_depths(q.norm(), z.re, tol);
    // Beyond the completion's precision limit the tail bound absorbs the shortfall.
    while r > 0 && completion_for(field, q, profile_depth(q, r)).is_err() {
        r -= 1;
    }
    local_dirichlet_truncated(field, q, z, constant, v, r)
}

fn checked_ratio(num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() < 1e-14 {
        return Err(Error::Pole("closed-form denominator vanishes".into()));
    }
    Ok(num / den)
}

/// Closed form of the local Dirichlet factor.
pub fn local_dirichlet_closed_info(info: &RegimeInfo, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let q = Complex64::new(info.q as f64, 0.0);
    let qp = |s: Complex64| q.powc(-s);
    let kk = info.k as f64;
    match info.regime {
        Regime::OddCoprime => checked_ratio(one - qp(z + 1.0), one - qp(2.0 * z)),
        Regime::OddDividing => {
            checked_ratio((one - qp(z + 1.0)) * (one - qp(z * (kk + 1.0))), (one - qp(2.0 * z)) * (one - qp(z)))
        }
        Regime::TwoCoprime => checked_ratio(4.0 * (one - qp(z + 1.0)), one - qp(2.0 * z)),
        Regime::TwoDividingOdd | Regime::TwoDividingEven => {
            checked_ratio(4.0 * (one - qp(z * (kk + 1.0))) * (one - qp(z + 1.0)), (one - qp(2.0 * z)) * (one - qp(z)))
        }
    }
}

/// Closed form of the local Dirichlet factor at `q` for the constant `4uρ^{k'}`.
pub fn local_dirichlet_closed(
    field: &FieldDescriptor,
    q: &PrimeIdeal,
    z: Complex64,
    u: AlgInt,
    rho: AlgInt,
    k_prime: u32,
) -> Result<Complex64> {
    local_dirichlet_closed_info(&classify(field, q, u, rho, k_prime)?, z)
}

/// `4ⁿ ζ_K(2z)/ζ_K(z+1) · (1 − p^{−z(k+1)})/(1 − p^{−z})`, `p = N(𝔭)`.
pub fn global_dirichlet_closed(field: &FieldDescriptor, p_norm: u64, k: u32, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let n = field.degree as i32;
    let pz = Complex64::new(p_norm as f64, 0.0);
    let pfac = if k == 0 { one } else { checked_ratio(one - pz.powc(-z * (k as f64 + 1.0)), one - pz.powc(-z))? };
    let num = dedekind_zeta(field, 2.0 * z)?;
    let den = dedekind_zeta(field, z + 1.0)?;
    Ok(4f64.powi(n) * checked_ratio(num, den)? * pfac)
}

/// How the global series is truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Double sum over ideal pairs with both norms at most `bound`.
    IdealBox { bound: u64 },
    /// Product of complete local factors over primes of norm at most `bound`.
    PrimeSupport { bound: u64 },
}

/// Truncated `𝔻(z, u)` with its closed-form reference.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalDirichlet {
    pub eval: DirichletEval,
    pub closed: Complex64,
}

/// Truncated `𝔻(z, u)` for the datum's `u`, `ρ`, `k'`.
pub fn global_dirichlet(datum: &EllipticDatum, z: Complex64, truncation: Truncation) -> Result<GlobalDirichlet> {
    if z.re <= 1.0 {
        return Err(Error::Nonconvergent(format!("Re z = {} must exceed 1", z.re)));
    }
    let field = &datum.field;
    let closed = global_dirichlet_closed(field, datum.prime.norm(), datum.k, z)?;
    let constant = local_constant(field, datum.u, datum.rho, datum.k_prime());
    let eval = match truncation {
        Truncation::IdealBox { bound } => ideal_box(field, z, constant, bound)?,
        Truncation::PrimeSupport { bound } => prime_support(field, z, constant, bound)?,
    };
    Ok(GlobalDirichlet { eval, closed })
}

fn ideal_box(field: &FieldDescriptor, z: Complex64, constant: AlgInt, bound: u64) -> Result<DirichletEval> {
    let ideals = field.enumerate_by_norm(bound)?;
    let primes = field.primes_up_to_norm(bound)?;
    let index: HashMap<(u64, u8), usize> = primes.iter().enumerate().map(|(i, q)| ((q.p, q.index), i)).collect();
    // Per prime: table[r][v] for q^v, q^r ≤ bound.
    let mut tables = Vec::with_capacity(primes.len());
    for q in &primes {
        let qn = q.norm();
        let mut e = 0u32;
        while qn.pow(e + 1) <= bound {
            e += 1;
        }
        tables.push(local_table(field, q, constant, e, e)?);
    }
    let twos: Vec<usize> = primes.iter().enumerate().filter(|(_, q)| q.p == 2).map(|(i, _)| i).collect();
    let encoded: Vec<Vec<(usize, u32)>> = ideals
        .iter()
        .map(|i| {
            let mut f: Vec<(usize, u32)> = i.factors.iter().map(|(q, e)| (index[&(q.p, q.index)], *e)).collect();
            f.sort_unstable();
            f
        })
        .collect();
    let a_weight: Vec<Complex64> = ideals.iter().map(|i| Complex64::new(i.norm as f64, 0.0).powc(-(z + 1.0))).collect();
    let d_weight: Vec<Complex64> = ideals.iter().map(|i| Complex64::new(i.norm as f64, 0.0).powc(-(2.0 * z + 1.0))).collect();
    let mut value = Complex64::new(0.0, 0.0);
    for (di, dfac) in encoded.iter().enumerate() {
        let mut inner = Complex64::new(0.0, 0.0);
        for (ai, afac) in encoded.iter().enumerate() {
            let k = pair_value(afac, dfac, &tables, &twos);
            if k != 0 {
                inner += a_weight[ai] * k as f64;
            }
        }
        value += d_weight[di] * inner;
    }
    // |K| ≤ 4ⁿ N(𝔞)N(𝔡)²: tail ≤ 4ⁿ[ζ_K(σ)ζ_K(2σ−1) − S_B(σ)S_B(2σ−1)].
    let sigma = z.re;
    let partial = |s: f64| ideals.iter().map(|i| (i.norm as f64).powf(-s)).sum::<f64>();
    let full =
        dedekind_zeta(field, Complex64::new(sigma, 0.0))?.re * dedekind_zeta(field, Complex64::new(2.0 * sigma - 1.0, 0.0))?.re;
    let tail = 4f64.powi(field.degree as i32) * (full - partial(sigma) * partial(2.0 * sigma - 1.0)).max(0.0);
    Ok(DirichletEval { z, value, tail_bound: tail, truncation: (bound, 0) })
}

fn pair_value(a: &[(usize, u32)], d: &[(usize, u32)], tables: &[Vec<Vec<i128>>], twos: &[usize]) -> i128 {
    let mut k = 1i128;
    let (mut i, mut j) = (0, 0);
    let mut seen_two = 0usize;
    while i < a.len() || j < d.len() {
        let (p, v, r) = match (a.get(i), d.get(j)) {
            (Some(&(pa, va)), Some(&(pd, rd))) if pa == pd => {
                i += 1;
                j += 1;
                (pa, va, rd)
            }
            (Some(&(pa, va)), Some(&(pd, _))) if pa < pd => {
                i += 1;
                (pa, va, 0)
            }
            (Some(&(pa, va)), None) => {
                i += 1;
                (pa, va, 0)
            }
            (_, Some(&(pd, rd))) => {
                j += 1;
                (pd, 0, rd)
            }
            (None, None) => unreachable!(),
        };
        if twos.contains(&p) {
            seen_two += 1;
        }
        k *= tables[p][r as usize][v as usize];
        if k == 0 {
            return 0;
        }
    }
    k * 4i128.pow((twos.len() - seen_two) as u32)
}

fn prime_support(field: &FieldDescriptor, z: Complex64, constant: AlgInt, bound: u64) -> Result<DirichletEval> {
    let primes = field.primes_up_to_norm(bound)?;
    let mut value = Complex64::new(1.0, 0.0);
    let mut rel_tail = 0.0;
    for q in &primes {
        let local = local_dirichlet_auto(field, q, z, constant, 1e-17)?;
        rel_tail += local.tail_bound / local.value.norm();
        value *= local.value;
    }
    // Omitted primes: at most two prime ideals of each norm n > B, each factor within
    // (x + y)/((1 − x)(1 − y)) of 1 with x = n^{1−2σ}, y = n^{−σ}.
    let s = z.re;
    let b = bound as f64;
    let shrink = 1.0 / ((1.0 - b.powf(1.0 - 2.0 * s)) * (1.0 - b.powf(-s)));
    let omitted = 2.0 * shrink * (b.powf(1.0 - s) / (s - 1.0) + b.powf(2.0 - 2.0 * s) / (2.0 * s - 2.0));
    let tail = value.norm() * (rel_tail + omitted.exp_m1());
    Ok(DirichletEval { z, value, tail_bound: tail, truncation: (bound, 0) })
}

/// Numeric residue of the closed-form `𝔻` at `z = 1/2` by a symmetric limit.
pub fn residue_at_half(field: &FieldDescriptor, p_norm: u64, k: u32) -> Result<f64> {
    let f = |h: f64| -> Result<f64> {
        let z = Complex64::new(0.5 + h, 0.0);
        Ok(global_dirichlet_closed(field, p_norm, k, z)?.re * h)
    };
    // h·𝔻(1/2 + h) is analytic in h; average ±h to cancel the linear term, then
    // Richardson on h² to cancel the quadratic one.
    let g = |h: f64| -> Result<f64> { Ok((f(h)? + f(-h)?) / 2.0) };
    let (h1, h2) = (1e-3, 5e-4);
    let (g1, g2) = (g(h1)?, g(h2)?);
    Ok((4.0 * g2 - g1) / 3.0)
}

/// The displayed residue expression `4ⁿκ/ζ_K(3/2)·(1 − p^{−(k+1)/2})/(1 − p^{−1/2})`.
pub fn residue_expression(field: &FieldDescriptor, kappa: f64, p_norm: u64, k: u32) -> Result<f64> {
    let n = field.degree as i32;
    let p = p_norm as f64;
    let pfac = if k == 0 { 1.0 } else { (1.0 - p.powf(-(k as f64 + 1.0) / 2.0)) / (1.0 - p.powf(-0.5)) };
    let z32 = dedekind_zeta(field, Complex64::new(1.5, 0.0))?.re;
    Ok(4f64.powi(n) * kappa / z32 * pfac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, v: u32, r: u32, u: i128, rho: i128, k_prime: u32) -> LocalSumParams {
        let q = FieldDescriptor::rational();
        LocalSumParams { prime: q.split_prime(p).unwrap().remove(0), v, r, u: AlgInt::int(u), rho: AlgInt::int(rho), k_prime }
    }

    #[test]
    fn local_examples() {
        let q = FieldDescriptor::rational();
        // 4uρ^{k'} ≡ 2 mod 3 with u = 2, ρ = 1
        assert_eq!(local_sum_bruteforce(&q, &params(3, 1, 0, 2, 1, 0)).unwrap(), -1);
        assert_eq!(local_sum_bruteforce(&q, &params(2, 0, 0, 1, 3, 1)).unwrap(), 4);
        assert_eq!(local_sum_bruteforce(&q, &params(3, 0, 1, 1, 1, 0)).unwrap(), 2);
        assert_eq!(local_sum_closed(&q, &params(3, 0, 1, 1, 1, 0)).unwrap(), 2);
        assert_eq!(local_sum_closed(&q, &params(7, 3, 0, 1, 1, 0)).unwrap(), -49);
        assert_eq!(local_sum_closed(&q, &params(7, 3, 2, 1, 1, 0)).unwrap(), 0);
        assert_eq!(local_sum_closed(&q, &params(2, 2, 3, 1, 1, 0)).unwrap(), 32);
        assert_eq!(local_sum_closed(&q, &params(2, 2, 3, 3, 1, 0)).unwrap(), 0);
        assert!(matches!(local_sum_closed(&q, &params(2, 1, 1, 1, 2, 2)), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn profile_matches_naive_enumeration() {
        let q = FieldDescriptor::rational();
        for p in [2u64, 3, 5] {
            for rho in [1i128, p as i128] {
                for kp in 0..3 {
                    for u in 1..(if p == 2 { 8 } else { p as i128 }) {
                        if u % p as i128 == 0 {
                            continue;
                        }
                        for v in 0..3 {
                            for r in 0..3 {
                                let pr = params(p, v, r, u, rho, kp);
                                let fast = local_sum_bruteforce(&q, &pr).unwrap();
                                let slow = local_sum_naive(&q, &pr, 1 << 22).unwrap();
                                assert_eq!(fast, slow, "{pr:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn profile_matches_naive_in_quadratic_field() {
        let k = FieldDescriptor::real_quadratic(33).unwrap();
        let beta = k.fundamental_unit().unwrap().fundamental;
        let mut checked = 0;
        for p in [2u64, 3, 5, 7] {
            for q in k.split_prime(p).unwrap() {
                let g = k.find_generator(&k.prime_power(&q, 1), 50);
                for rho in [Some(AlgInt::new(5, 1)), g].into_iter().flatten() {
                    for u in [AlgInt::ONE, beta, k.neg(beta)] {
                        for (v, r) in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2)] {
                            let pr = LocalSumParams { prime: q.clone(), v, r, u, rho, k_prime: 1 };
                            let fast = local_sum_bruteforce(&k, &pr).unwrap();
                            // Inert primes at higher depth are too large to enumerate naively.
                            let slow = match local_sum_naive(&k, &pr, 1 << 20) {
                                Err(Error::Resource(_)) => continue,
                                other => other.unwrap(),
                            };
                            checked += 1;
                            assert_eq!(fast, slow, "{q} {pr:?}");
                            if let Ok(closed) = local_sum_closed(&k, &pr) {
                                assert_eq!(fast, closed, "{q} {pr:?}");
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 150, "{checked}");
    }

    #[test]
    fn global_examples() {
        let g = EllipticDatum::rational(5, 1, 1, 1).unwrap();
        let q = FieldDescriptor::rational();
        let one = q.unit_ideal();
        assert_eq!(global_sum_bruteforce(&g, &one, &one, 1 << 20).unwrap(), 4);
        let three = q.principal(AlgInt::int(3)).unwrap();
        // uρ^{k'} = 5
        assert_eq!(global_sum_bruteforce(&g, &three, &one, 1 << 20).unwrap(), -4);
        assert_eq!(global_sum_factored(&g, &three, &one).unwrap(), -4);
    }

    #[test]
    fn euler_factorization_over_q() {
        let q = FieldDescriptor::rational();
        let ids = q.enumerate_by_norm(12).unwrap();
        for (p, k, u) in [(5u64, 1u32, 1i128), (3, 2, -1), (2, 1, 1), (2, 3, -1), (7, 0, 1)] {
            let g = EllipticDatum::rational(p, k, u, 1).unwrap();
            for a in &ids {
                for d in ids.iter().take(6) {
                    assert_eq!(
                        global_sum_bruteforce(&g, a, d, 1 << 22).unwrap(),
                        global_sum_factored(&g, a, d).unwrap(),
                        "p={p} k={k} u={u} a={a} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn local_dirichlet_examples() {
        let q = FieldDescriptor::rational();
        let z = Complex64::new(2.0, 0.0);
        let p3 = q.split_prime(3).unwrap().remove(0);
        let v = local_dirichlet_closed(&q, &p3, z, AlgInt::ONE, AlgInt::ONE, 0).unwrap();
        assert!((v.re - (1.0 - 3f64.powi(-3)) / (1.0 - 3f64.powi(-4))).abs() < 1e-15);
        let t = local_dirichlet_truncated(&q, &p3, z, AlgInt::int(4), 6, 6).unwrap();
        assert!((t.value - v).norm() <= t.tail_bound);
        let p2 = q.split_prime(2).unwrap().remove(0);
        let v = local_dirichlet_closed(&q, &p2, z, AlgInt::ONE, AlgInt::ONE, 0).unwrap();
        assert!((v.re - 56.0 / 15.0).abs() < 1e-14);
        let t = local_dirichlet_truncated(&q, &p2, z, AlgInt::int(4), 0, 0).unwrap();
        assert_eq!(t.value.re, 4.0);
        let p5 = q.split_prime(5).unwrap().remove(0);
        let v = local_dirichlet_closed(&q, &p5, z, AlgInt::ONE, AlgInt::int(5), 1).unwrap();
        assert!((v.re - (1.0 - 5f64.powi(-3)) / (1.0 - 5f64.powi(-2))).abs() < 1e-15);
    }

    #[test]
    fn langlands_lemma_small() {
        use crate::arith::{kronecker_i64, primes_up_to};
        for q in primes_up_to(50).into_iter().filter(|&q| q > 2) {
            for m in 1..q as i64 {
                let s: i64 = (0..q as i64).map(|x| kronecker_i64(x * x - m, q as i64) as i64).sum();
                assert_eq!(s, -1);
            }
        }
    }
}
