//! Arithmetic in ℚ and real quadratic fields: elements, prime ideals, ideals in
//! Hermite normal form, units and residue enumeration.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;

use crate::arith::{
    factorize_u64, is_prime_u64, is_square_i128, is_squarefree, isqrt_i128, kronecker_i64, primes_up_to, sqrt_mod_prime,
    valuation_i128,
};
use crate::error::{Error, Result};

/// Default cap on `enumerate_by_norm`.
pub const DEFAULT_NORM_CAP: u64 = 1_000_000;
/// Default cap on the size of a residue enumeration.
pub const DEFAULT_RESIDUE_CAP: u64 = 5_000_000;
const CF_ITERATION_CAP: usize = 10_000;

/// Element `x + y·ω` of the ring of integers; `y = 0` over ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlgInt {
    pub x: i128,
    pub y: i128,
}

impl AlgInt {
    pub const ZERO: AlgInt = AlgInt { x: 0, y: 0 };
    pub const ONE: AlgInt = AlgInt { x: 1, y: 0 };

    pub const fn new(x: i128, y: i128) -> Self {
        AlgInt { x, y }
    }

    /// The rational integer `n`.
    pub const fn int(n: i128) -> Self {
        AlgInt { x: n, y: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }
}

impl fmt::Display for AlgInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y == 0 {
            write!(f, "{}", self.x)
        } else {
            write!(f, "{}{:+}w", self.x, self.y)
        }
    }
}

/// Splitting type of a rational prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

/// A number field of degree at most 2, with integral basis `(1, ω)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDescriptor {
    /// Squarefree `m` with `K = ℚ(√m)`, or `None` for ℚ.
    pub m: Option<i64>,
    /// Field discriminant.
    pub disc: i64,
    /// Degree over ℚ.
    pub degree: u32,
    /// Trace of ω; ω² = t·ω − n.
    pub omega_trace: i128,
    /// Norm of ω.
    pub omega_norm: i128,
}

impl FieldDescriptor {
    /// The rational field.
    pub fn rational() -> Self {
        FieldDescriptor { m: None, disc: 1, degree: 1, omega_trace: 0, omega_norm: 0 }
    }

    /// `ℚ(√m)` for squarefree `m > 1`.
    pub fn real_quadratic(m: i64) -> Result<Self> {
        if m <= 1 {
            return Err(Error::InvalidField(format!("m = {m} must exceed 1")));
        }
        if !is_squarefree(m as u64) {
            return Err(Error::InvalidField(format!("m = {m} is not squarefree")));
        }
        let (disc, t, n) = if m % 4 == 1 { (m, 1, (1 - m as i128) / 4) } else { (4 * m, 0, -(m as i128)) };
        Ok(FieldDescriptor { m: Some(m), disc, degree: 2, omega_trace: t, omega_norm: n })
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    pub fn add(&self, a: AlgInt, b: AlgInt) -> AlgInt {
        AlgInt::new(a.x + b.x, a.y + b.y)
    }

    pub fn sub(&self, a: AlgInt, b: AlgInt) -> AlgInt {
        AlgInt::new(a.x - b.x, a.y - b.y)
    }

    pub fn neg(&self, a: AlgInt) -> AlgInt {
        AlgInt::new(-a.x, -a.y)
    }

    pub fn scale(&self, a: AlgInt, s: i128) -> AlgInt {
        AlgInt::new(a.x * s, a.y * s)
    }

    pub fn mul(&self, a: AlgInt, b: AlgInt) -> AlgInt {
        let bd = a.y * b.y;
        AlgInt::new(a.x * b.x - bd * self.omega_norm, a.x * b.y + a.y * b.x + bd * self.omega_trace)
    }

    pub fn pow(&self, a: AlgInt, mut e: u32) -> AlgInt {
        let mut base = a;
        let mut acc = AlgInt::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// Galois conjugate.
    pub fn conj(&self, a: AlgInt) -> AlgInt {
        if self.is_rational() {
            return a;
        }
        AlgInt::new(a.x + a.y * self.omega_trace, -a.y)
    }

    pub fn norm(&self, a: AlgInt) -> i128 {
        if self.is_rational() {
            return a.x;
        }
        a.x * a.x + a.x * a.y * self.omega_trace + a.y * a.y * self.omega_norm
    }

    pub fn trace(&self, a: AlgInt) -> i128 {
        if self.is_rational() {
            return a.x;
        }
        2 * a.x + a.y * self.omega_trace
    }

    /// `a / b` when the quotient is integral.
    pub fn div_exact(&self, a: AlgInt, b: AlgInt) -> Option<AlgInt> {
        if b.is_zero() {
            return None;
        }
        let n = self.norm(b);
        let num = self.mul(a, self.conj(b));
        if num.x % n == 0 && num.y % n == 0 {
            Some(AlgInt::new(num.x / n, num.y / n))
        } else {
            None
        }
    }

    pub fn is_unit(&self, a: AlgInt) -> bool {
        self.norm(a).abs() == 1
    }

    /// Value of ω under the real embedding `index` (0 uses +√m).
    pub fn omega_embedding(&self, index: usize) -> f64 {
        match self.m {
            None => 0.0,
            Some(m) => {
                let s = (m as f64).sqrt();
                let t = self.omega_trace as f64;
                if self.omega_trace == 0 {
                    if index == 0 {
                        s
                    } else {
                        -s
                    }
                } else if index == 0 {
                    (t + s) / 2.0
                } else {
                    (t - s) / 2.0
                }
            }
        }
    }

    /// Real embedding `index` of `a`.
    pub fn embed(&self, a: AlgInt, index: usize) -> f64 {
        a.x as f64 + a.y as f64 * self.omega_embedding(index)
    }

    /// Exact sign of embedding `index`.
    pub fn embedding_sign(&self, a: AlgInt, index: usize) -> i32 {
        if self.is_rational() {
            return a.x.signum() as i32;
        }
        // a = (2x + y t + y √m·s)/2 with s = ±1; compare squares exactly.
        let m = self.m.unwrap() as i128;
        let u = 2 * a.x + a.y * self.omega_trace;
        let v = if self.omega_trace == 0 { 2 * a.y } else { a.y };
        let v = if index == 0 { v } else { -v };
        // sign of u + v√m
        match (u.signum(), v.signum()) {
            (0, s) | (s, 0) => s as i32,
            (su, sv) if su == sv => su as i32,
            (su, _) => {
                let lhs = u * u;
                let rhs = v * v * m;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => su as i32,
                    Ordering::Less => -su as i32,
                    Ordering::Equal => 0,
                }
            }
        }
    }

    /// Whether `a` is a square in the field.
    pub fn is_square(&self, a: AlgInt) -> bool {
        self.sqrt(a).is_some()
    }

    /// An integral square root of `a`, if one exists.
    pub fn sqrt(&self, a: AlgInt) -> Option<AlgInt> {
        if a.is_zero() {
            return Some(AlgInt::ZERO);
        }
        if self.is_rational() {
            return (a.x >= 0 && is_square_i128(a.x)).then(|| AlgInt::int(isqrt_i128(a.x)));
        }
        let n = self.norm(a);
        if n < 0 || !is_square_i128(n) {
            return None;
        }
        let r = isqrt_i128(n);
        let tr = self.trace(a);
        // If b² = a then N(b) = ±r and Tr(b)² = Tr(a) + 2N(b).
        for nb in [r, -r] {
            let s2 = tr + 2 * nb;
            if s2 < 0 || !is_square_i128(s2) {
                continue;
            }
            let s = isqrt_i128(s2);
            if s == 0 {
                // b = y·(ω − ω̄)/… has zero trace; a is then rational.
                if a.y != 0 {
                    continue;
                }
                let m = self.m.unwrap() as i128;
                if a.x % m == 0 && is_square_i128(a.x / m) {
                    let c = isqrt_i128(a.x / m);
                    // √m = 2ω − t when t = 1, ω otherwise.
                    let root = if self.omega_trace == 0 { AlgInt::new(0, c) } else { AlgInt::new(-c, 2 * c) };
                    if self.mul(root, root) == a {
                        return Some(root);
                    }
                }
                continue;
            }
            // b satisfies b² − s·b + N(b) = 0, so b = (a + N(b)) / s.
            let num = AlgInt::new(a.x + nb, a.y);
            if num.x % s == 0 && num.y % s == 0 {
                let b = AlgInt::new(num.x / s, num.y / s);
                if self.mul(b, b) == a {
                    return Some(b);
                }
            }
        }
        None
    }

    /// Prime ideals above the rational prime `p`, split primes ordered by their root of
    /// the minimal polynomial of ω modulo `p`.
    pub fn split_prime(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        if !is_prime_u64(p) {
            return Err(Error::UndefinedInput(format!("{p} is not prime")));
        }
        if self.is_rational() {
            return Ok(vec![PrimeIdeal {
                p,
                kind: SplitType::Split,
                index: 0,
                root: 0,
                hnf: Hnf { a: p as i128, b: 0, c: 1 },
                uniformizer: AlgInt::int(p as i128),
            }]);
        }
        let pi = p as i128;
        let roots = self.omega_roots_mod(pi);
        let kind = match kronecker_i64(self.disc, p as i64) {
            1 => SplitType::Split,
            -1 => SplitType::Inert,
            _ => SplitType::Ramified,
        };
        Ok(match kind {
            SplitType::Inert => {
                vec![PrimeIdeal { p, kind, index: 0, root: 0, hnf: Hnf { a: pi, b: 0, c: pi }, uniformizer: AlgInt::int(pi) }]
            }
            SplitType::Split => roots
                .iter()
                .enumerate()
                .map(|(i, &r)| PrimeIdeal {
                    p,
                    kind,
                    index: i as u8,
                    root: r,
                    hnf: Hnf { a: pi, b: (-r).rem_euclid(pi), c: 1 },
                    uniformizer: AlgInt::int(pi),
                })
                .collect(),
            SplitType::Ramified => {
                let r = roots[0];
                // ω − r or ω − r − p has norm exactly divisible by p.
                let cand = AlgInt::new(-r, 1);
                let unif = if valuation_i128(self.norm(cand), pi) == 1 { cand } else { AlgInt::new(-r - pi, 1) };
                vec![PrimeIdeal {
                    p,
                    kind,
                    index: 0,
                    root: r,
                    hnf: Hnf { a: pi, b: (-r).rem_euclid(pi), c: 1 },
                    uniformizer: unif,
                }]
            }
        })
    }

    /// Roots of the minimal polynomial of ω modulo the prime `p`, in increasing order.
    fn omega_roots_mod(&self, p: i128) -> Vec<i128> {
        let (t, n) = (self.omega_trace, self.omega_norm);
        let f = |r: i128| (r * r - t * r + n).rem_euclid(p) == 0;
        if p == 2 {
            return (0..2).filter(|&r| f(r)).collect();
        }
        let disc = (t * t - 4 * n).rem_euclid(p) as u64;
        let Some(s) = sqrt_mod_prime(disc, p as u64) else { return Vec::new() };
        let half = (p + 1) / 2;
        let mut roots: Vec<i128> = [t + s as i128, t - s as i128].iter().map(|&x| mulmod(x.rem_euclid(p), half, p)).collect();
        roots.sort();
        roots.dedup();
        debug_assert!(roots.iter().all(|&r| f(r)));
        roots
    }

    /// Principal ideal generated by `a`.
    pub fn principal(&self, a: AlgInt) -> Result<Ideal> {
        if a.is_zero() {
            return Err(Error::UndefinedInput("zero ideal".into()));
        }
        let h = if self.is_rational() {
            Hnf { a: a.x.abs(), b: 0, c: 1 }
        } else {
            Hnf::from_generators(&[(a.x, a.y), self.coords(self.mul(a, AlgInt::new(0, 1)))])
        };
        self.ideal_from_hnf(h)
    }

    fn coords(&self, a: AlgInt) -> (i128, i128) {
        (a.x, a.y)
    }

    /// Builds an ideal and its factorization from a normal form.
    pub fn ideal_from_hnf(&self, hnf: Hnf) -> Result<Ideal> {
        let norm = hnf.a * hnf.c;
        let mut factors = Vec::new();
        for (p, _) in factorize_u64(norm as u64) {
            for q in self.split_prime(p)? {
                let e = self.ideal_valuation_hnf(&hnf, &q);
                if e > 0 {
                    factors.push((q, e));
                }
            }
        }
        Ok(Ideal { hnf, norm: norm as u128, factors })
    }

    /// The unit ideal.
    pub fn unit_ideal(&self) -> Ideal {
        Ideal { hnf: Hnf { a: 1, b: 0, c: 1 }, norm: 1, factors: Vec::new() }
    }

    /// The ideal `𝔮^e`.
    pub fn prime_power(&self, q: &PrimeIdeal, e: u32) -> Ideal {
        let mut h = Hnf { a: 1, b: 0, c: 1 };
        for _ in 0..e {
            h = self.hnf_mul(&h, &q.hnf);
        }
        let factors = if e == 0 { Vec::new() } else { vec![(q.clone(), e)] };
        Ideal { norm: (h.a * h.c) as u128, hnf: h, factors }
    }

    /// Builds an ideal from its factorization.
    pub fn ideal_from_factors(&self, factors: &[(PrimeIdeal, u32)]) -> Ideal {
        let mut out = self.unit_ideal();
        for (q, e) in factors {
            out = self.multiply(&out, &self.prime_power(q, *e));
        }
        out
    }

    fn hnf_mul(&self, i: &Hnf, j: &Hnf) -> Hnf {
        if self.is_rational() {
            return Hnf { a: i.a * j.a, b: 0, c: 1 };
        }
        let bi = [AlgInt::int(i.a), AlgInt::new(i.b, i.c)];
        let bj = [AlgInt::int(j.a), AlgInt::new(j.b, j.c)];
        let mut gens = Vec::with_capacity(4);
        for x in bi {
            for y in bj {
                gens.push(self.coords(self.mul(x, y)));
            }
        }
        Hnf::from_generators(&gens)
    }

    /// Product of two ideals.
    pub fn multiply(&self, i: &Ideal, j: &Ideal) -> Ideal {
        let hnf = self.hnf_mul(&i.hnf, &j.hnf);
        let mut factors: Vec<(PrimeIdeal, u32)> = i.factors.clone();
        for (q, e) in &j.factors {
            match factors.iter_mut().find(|(r, _)| r == q) {
                Some(entry) => entry.1 += e,
                None => factors.push((q.clone(), *e)),
            }
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        Ideal { norm: i.norm * j.norm, hnf, factors }
    }

    /// `I ⊆ J`, i.e. `J` divides `I`.
    pub fn divides(&self, j: &Ideal, i: &Ideal) -> bool {
        j.factors.iter().all(|(q, e)| i.factors.iter().any(|(r, f)| r == q && f >= e))
    }

    /// Membership test for the lattice with normal form `h`.
    pub fn hnf_contains(&self, h: &Hnf, a: AlgInt) -> bool {
        if a.y % h.c != 0 {
            return false;
        }
        (a.x - (a.y / h.c) * h.b) % h.a == 0
    }

    /// Reduces `a` into the fundamental domain `{x + yω : 0 ≤ x < a, 0 ≤ y < c}`.
    pub fn reduce(&self, h: &Hnf, a: AlgInt) -> AlgInt {
        let qy = Integer::div_floor(&a.y, &h.c);
        let y = a.y - qy * h.c;
        let x = (a.x - qy * h.b).rem_euclid(h.a);
        AlgInt::new(x, y)
    }

    /// Valuation of a nonzero element at a prime ideal.
    pub fn valuation(&self, a: AlgInt, q: &PrimeIdeal) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::UndefinedInput("valuation of zero".into()));
        }
        let p = q.p as i128;
        Ok(match q.kind {
            SplitType::Inert => match (a.x, a.y) {
                (0, y) => valuation_i128(y, p),
                (x, 0) => valuation_i128(x, p),
                (x, y) => valuation_i128(x, p).min(valuation_i128(y, p)),
            },
            SplitType::Ramified => valuation_i128(self.norm(a), p),
            SplitType::Split => {
                if self.is_rational() {
                    return Ok(valuation_i128(a.x, p));
                }
                // Strip common factors of p; what remains lies in at most one of the
                // two primes above p, which then carries all of its norm's p-part.
                let mut b = a;
                let mut m = 0;
                while b.x % p == 0 && b.y % p == 0 {
                    b = AlgInt::new(b.x / p, b.y / p);
                    m += 1;
                }
                let root = self.hensel_root(q, 1)?;
                let image = (b.x + mulmod(b.y.rem_euclid(p), root, p)).rem_euclid(p);
                if image == 0 {
                    m + valuation_i128(self.norm(b), p)
                } else {
                    m
                }
            }
        })
    }

    fn ideal_valuation_hnf(&self, h: &Hnf, q: &PrimeIdeal) -> u32 {
        let va = self.valuation(AlgInt::int(h.a), q).expect("nonzero");
        if self.is_rational() {
            return va;
        }
        let vb = self.valuation(AlgInt::new(h.b, h.c), q).expect("nonzero");
        va.min(vb)
    }

    /// Valuation of an ideal at a prime ideal.
    pub fn ideal_valuation(&self, i: &Ideal, q: &PrimeIdeal) -> u32 {
        i.factors.iter().find(|(r, _)| r == q).map_or(0, |(_, e)| *e)
    }

    /// Root of the minimal polynomial of ω modulo `p^b` lifting the root attached to `q`.
    pub fn hensel_root(&self, q: &PrimeIdeal, b: u32) -> Result<i128> {
        if q.kind != SplitType::Split || self.is_rational() {
            return Err(Error::UndefinedInput("Hensel projection needs a split prime of a quadratic field".into()));
        }
        let p = q.p as i128;
        let modulus = checked_pow(p, b)?;
        let (t, n) = (self.omega_trace, self.omega_norm);
        let mut r = q.root;
        let mut m = p;
        while m < modulus {
            m = (m * m).min(modulus);
            let f = (mulmod(r, r, m) - t * r + n).rem_euclid(m);
            let df = (2 * r - t).rem_euclid(m);
            let inv = crate::arith::inv_mod(df, m).expect("simple root");
            r = (r - mulmod(f, inv, m)).rem_euclid(m);
        }
        Ok(r.rem_euclid(modulus))
    }

    /// Projection `O_K → ℤ/p^b` at a split prime.
    pub fn project(&self, a: AlgInt, q: &PrimeIdeal, b: u32) -> Result<i128> {
        let modulus = checked_pow(q.p as i128, b)?;
        if self.is_rational() {
            return Ok(a.x.rem_euclid(modulus));
        }
        let r = self.hensel_root(q, b)?;
        Ok((a.x.rem_euclid(modulus) + mulmod(a.y.rem_euclid(modulus), r, modulus)).rem_euclid(modulus))
    }

    /// Prime ideals of norm at most `bound`, ordered by norm.
    pub fn primes_up_to_norm(&self, bound: u64) -> Result<Vec<PrimeIdeal>> {
        let mut out = Vec::new();
        for p in primes_up_to(bound) {
            for q in self.split_prime(p)? {
                if q.norm() <= bound {
                    out.push(q);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Every nonzero integral ideal of norm at most `bound`, ordered by norm then normal form.
    pub fn enumerate_by_norm(&self, bound: u64) -> Result<Vec<Ideal>> {
        self.enumerate_by_norm_capped(bound, DEFAULT_NORM_CAP)
    }

    pub fn enumerate_by_norm_capped(&self, bound: u64, cap: u64) -> Result<Vec<Ideal>> {
        if bound > cap {
            return Err(Error::Resource(format!("norm bound {bound} exceeds cap {cap}")));
        }
        let primes = self.primes_up_to_norm(bound)?;
        let mut out = vec![self.unit_ideal()];
        extend_ideals(self, &primes, 0, &self.unit_ideal(), bound, &mut out);
        out.sort_by(|a, b| a.norm.cmp(&b.norm).then(a.hnf.cmp(&b.hnf)));
        Ok(out)
    }

    /// Representatives of `O_K / I`.
    pub fn residues(&self, i: &Ideal) -> Result<Residues> {
        self.residues_capped(i, DEFAULT_RESIDUE_CAP)
    }

    pub fn residues_capped(&self, i: &Ideal, cap: u64) -> Result<Residues> {
        if i.norm > cap as u128 {
            return Err(Error::Resource(format!("{} residues exceed cap {cap}", i.norm)));
        }
        Ok(Residues { a: i.hnf.a, next: 0, total: i.norm as i128 })
    }

    /// Whether `(ρ) = 𝔭^h` and `h | k`.
    pub fn validate_hyp_div(&self, p: &PrimeIdeal, h: u32, rho: AlgInt, k: u32) -> bool {
        if h == 0 || !k.is_multiple_of(h) || rho.is_zero() {
            return false;
        }
        match self.principal(rho) {
            Ok(ideal) => ideal.hnf == self.prime_power(p, h).hnf,
            Err(_) => false,
        }
    }

    /// A generator of `I` with small coordinates, if `I` is principal and one is found
    /// within the search box.
    pub fn find_generator(&self, i: &Ideal, search: i128) -> Option<AlgInt> {
        let n = i.norm as i128;
        for y in 0..=search {
            for x in -search..=search {
                let a = AlgInt::new(x, y);
                if self.norm(a).abs() == n && self.hnf_contains(&i.hnf, a) {
                    return Some(a);
                }
            }
        }
        None
    }

    /// Torsion and fundamental unit.
    pub fn fundamental_unit(&self) -> Result<UnitSystem> {
        if self.is_rational() {
            return Err(Error::NotApplicable("ℚ has unit rank 0".into()));
        }
        // Continued fraction of ω = (P + √D)/Q; the first convergent p/q with
        // N(p − qω) = ±1 gives the fundamental unit as the conjugate.
        let d = self.disc as i128;
        let sd = isqrt_i128(d);
        let (mut pp, mut qq) = (self.omega_trace, 2i128);
        let (mut h1, mut h0) = (1i128, 0i128);
        let (mut k1, mut k0) = (0i128, 1i128);
        for _ in 0..CF_ITERATION_CAP {
            let a = if qq > 0 { Integer::div_floor(&(pp + sd), &qq) } else { -(Integer::div_floor(&(pp + sd), &(-qq)) + 1) };
            let h = a.checked_mul(h1).and_then(|v| v.checked_add(h0));
            let k = a.checked_mul(k1).and_then(|v| v.checked_add(k0));
            let (h, k) = match (h, k) {
                (Some(h), Some(k)) => (h, k),
                _ => return Err(Error::Resource("fundamental unit exceeds 128-bit coordinates".into())),
            };
            (h0, h1, k0, k1) = (h1, h, k1, k);
            let eta = AlgInt::new(h, -k);
            if k > 0 {
                if let Some(nv) = checked_norm(self, eta) {
                    if nv.abs() == 1 {
                        let mut e = self.conj(eta);
                        if self.embed(e, 0) < 0.0 {
                            e = self.neg(e);
                        }
                        if self.embed(e, 0) < 1.0 {
                            e = self.div_exact(AlgInt::ONE, e).expect("unit");
                        }
                        let totally_positive = self.embedding_sign(e, 0) > 0 && self.embedding_sign(e, 1) > 0;
                        return Ok(UnitSystem { fundamental: e, totally_positive });
                    }
                }
            }
            pp = a * qq - pp;
            qq = (d - pp * pp) / qq;
        }
        Err(Error::Resource("continued fraction iteration cap reached".into()))
    }
}

fn checked_norm(k: &FieldDescriptor, a: AlgInt) -> Option<i128> {
    let xx = a.x.checked_mul(a.x)?;
    let xy = a.x.checked_mul(a.y)?.checked_mul(k.omega_trace)?;
    let yy = a.y.checked_mul(a.y)?.checked_mul(k.omega_norm)?;
    xx.checked_add(xy)?.checked_add(yy)
}

fn extend_ideals(k: &FieldDescriptor, primes: &[PrimeIdeal], start: usize, base: &Ideal, bound: u64, out: &mut Vec<Ideal>) {
    for (i, q) in primes.iter().enumerate().skip(start) {
        let qn = q.norm() as u128;
        if base.norm * qn > bound as u128 {
            break;
        }
        let mut cur = base.clone();
        while cur.norm * qn <= bound as u128 {
            cur = k.multiply(&cur, &k.prime_power(q, 1));
            out.push(cur.clone());
            extend_ideals(k, primes, i + 1, &cur, bound, out);
        }
    }
}

/// `base^e`, or a resource error on overflow.
pub fn checked_pow(base: i128, e: u32) -> Result<i128> {
    base.checked_pow(e)
        .filter(|v| *v < (1i128 << 62))
        .ok_or_else(|| Error::Resource(format!("{base}^{e} exceeds the local precision limit")))
}

/// `a·b mod m` for `0 ≤ a, b < m < 2^62`.
pub fn mulmod(a: i128, b: i128, m: i128) -> i128 {
    (a * b).rem_euclid(m)
}

/// A prime ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    /// Rational prime below.
    pub p: u64,
    pub kind: SplitType,
    /// 0 or 1 for the two split primes.
    pub index: u8,
    /// Root of the minimal polynomial of ω mod p (split and ramified).
    pub root: i128,
    pub hnf: Hnf,
    /// Fixed uniformizer: `p` unless ramified.
    pub uniformizer: AlgInt,
}

impl PrimeIdeal {
    /// Size of the residue field.
    pub fn norm(&self) -> u64 {
        match self.kind {
            SplitType::Inert => self.p * self.p,
            _ => self.p,
        }
    }

    pub fn residue_degree(&self) -> u32 {
        if self.kind == SplitType::Inert {
            2
        } else {
            1
        }
    }

    pub fn ramification_index(&self) -> u32 {
        if self.kind == SplitType::Ramified {
            2
        } else {
            1
        }
    }

    pub fn is_above_two(&self) -> bool {
        self.p == 2
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.norm(), self.p, self.index).cmp(&(other.norm(), other.p, other.index))
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SplitType::Split if self.hnf.c == 1 && self.hnf.b == 0 && self.index == 0 => write!(f, "({})", self.p),
            SplitType::Inert => write!(f, "({})", self.p),
            _ => write!(f, "({}, w{:+})", self.p, self.hnf.b),
        }
    }
}

/// Hermite normal form `{a, b + c·ω}` of a full-rank sublattice of `O_K`,
/// with `a, c > 0` and `0 ≤ b < a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hnf {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Hnf {
    /// Normal form of the lattice spanned by the given coordinate vectors.
    pub fn from_generators(gens: &[(i128, i128)]) -> Hnf {
        let mut pivot: Option<(i128, i128)> = None;
        let mut a = 0i128;
        for &(x, y) in gens {
            if y == 0 {
                a = a.gcd(&x);
                continue;
            }
            match pivot {
                None => pivot = Some((x, y)),
                Some((px, py)) => {
                    let e = py.extended_gcd(&y);
                    let g = e.gcd;
                    let nx = e.x * px + e.y * x;
                    let rest = (y / g) * px - (py / g) * x;
                    a = a.gcd(&rest);
                    pivot = Some((nx, g));
                }
            }
        }
        let (mut px, mut py) = pivot.expect("full-rank lattice");
        if py < 0 {
            px = -px;
            py = -py;
        }
        assert!(a != 0, "full-rank lattice");
        Hnf { a, b: px.rem_euclid(a), c: py }
    }
}

/// A nonzero integral ideal with cached norm and factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    pub hnf: Hnf,
    pub norm: u128,
    /// Prime factorization sorted by prime.
    pub factors: Vec<(PrimeIdeal, u32)>,
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "(1)");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|(q, e)| if *e == 1 { q.to_string() } else { format!("{q}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Iterator over residue representatives of an ideal.
pub struct Residues {
    a: i128,
    next: i128,
    total: i128,
}

impl Iterator for Residues {
    type Item = AlgInt;

    fn next(&mut self) -> Option<AlgInt> {
        if self.next >= self.total {
            return None;
        }
        let i = self.next;
        self.next += 1;
        Some(AlgInt::new(i % self.a, i / self.a))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.total - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Residues {}

/// Torsion generator −1 and a fundamental unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitSystem {
    /// Smallest unit greater than 1 under the first embedding.
    pub fundamental: AlgInt,
    pub totally_positive: bool,
}
