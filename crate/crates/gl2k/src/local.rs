//! Completions of the ring of integers at a prime, truncated to a fixed number of
//! p-adic digits.
//!
//! Elements are pairs `x + y·θ` modulo `p^prec` where `θ` is `ω` at inert primes and
//! the fixed uniformizer at ramified primes. At split primes the completion is `ℤ_p`
//! and only `x` is used.

use crate::arith::{inv_mod, legendre, valuation_i128, Symbol};
use crate::error::{Error, Result};
use crate::field::{checked_pow, mulmod, AlgInt, FieldDescriptor, PrimeIdeal, SplitType};

/// Element of a truncated completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Local {
    pub x: i128,
    pub y: i128,
}

/// `O_𝔮 / p^prec` with a fixed basis.
#[derive(Clone, Debug)]
pub struct Completion {
    pub prime: PrimeIdeal,
    prec: u32,
    modulus: i128,
    theta_trace: i128,
    theta_norm: i128,
    /// Image of ω (split) or the shift with θ = ω − shift (ramified).
    root: i128,
    /// Symbol of the unit `p/θ²` (ramified only).
    twist: Symbol,
}

impl Completion {
    /// Completion at `prime` keeping `prec` p-adic digits.
    pub fn new(field: &FieldDescriptor, prime: &PrimeIdeal, prec: u32) -> Result<Self> {
        let p = prime.p as i128;
        let prec = prec.max(1);
        let modulus = checked_pow(p, prec)?;
        let (mut tt, mut tn, mut root, mut twist) = (0, 0, 0, 1);
        match prime.kind {
            SplitType::Split => {
                if !field.is_rational() {
                    root = field.hensel_root(prime, prec)?;
                }
            }
            SplitType::Inert => {
                tt = field.omega_trace.rem_euclid(modulus);
                tn = field.omega_norm.rem_euclid(modulus);
            }
            SplitType::Ramified => {
                let u = prime.uniformizer;
                root = -u.x;
                let n = field.norm(u);
                tt = (field.omega_trace - 2 * root).rem_euclid(modulus);
                tn = n.rem_euclid(modulus);
                if p != 2 {
                    twist = legendre(-(n / p), prime.p);
                }
            }
        }
        Ok(Completion { prime: prime.clone(), prec, modulus, theta_trace: tt, theta_norm: tn, root, twist })
    }

    /// p-adic digits kept.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Precision in powers of the prime ideal.
    pub fn ideal_precision(&self) -> u32 {
        self.prec * self.prime.ramification_index()
    }

    pub fn modulus(&self) -> i128 {
        self.modulus
    }

    fn red(&self, x: i128, y: i128) -> Local {
        Local { x: x.rem_euclid(self.modulus), y: y.rem_euclid(self.modulus) }
    }

    /// Image of a global integer.
    pub fn from_global(&self, a: AlgInt) -> Local {
        let m = self.modulus;
        match self.prime.kind {
            SplitType::Split => {
                let y = a.y.rem_euclid(m);
                Local { x: (a.x.rem_euclid(m) + mulmod(y, self.root, m)).rem_euclid(m), y: 0 }
            }
            SplitType::Inert => self.red(a.x, a.y),
            SplitType::Ramified => {
                let y = a.y.rem_euclid(m);
                self.red(a.x.rem_euclid(m) + mulmod(y, self.root.rem_euclid(m), m), y)
            }
        }
    }

    pub fn int(&self, n: i128) -> Local {
        self.red(n, 0)
    }

    pub fn add(&self, a: Local, b: Local) -> Local {
        self.red(a.x + b.x, a.y + b.y)
    }

    pub fn sub(&self, a: Local, b: Local) -> Local {
        self.red(a.x - b.x, a.y - b.y)
    }

    pub fn mul(&self, a: Local, b: Local) -> Local {
        let m = self.modulus;
        if self.prime.kind == SplitType::Split {
            return Local { x: mulmod(a.x, b.x, m), y: 0 };
        }
        let bd = mulmod(a.y, b.y, m);
        let x = mulmod(a.x, b.x, m) - mulmod(bd, self.theta_norm, m);
        let y = mulmod(a.x, b.y, m) + mulmod(a.y, b.x, m) + mulmod(bd, self.theta_trace, m);
        self.red(x, y)
    }

    pub fn pow(&self, a: Local, mut e: u64) -> Local {
        let mut base = a;
        let mut acc = self.int(1);
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

    /// Inverse of a unit.
    pub fn inv(&self, a: Local) -> Option<Local> {
        let m = self.modulus;
        if self.prime.kind == SplitType::Split {
            return inv_mod(a.x, m).map(|x| Local { x, y: 0 });
        }
        let conj = self.red(a.x + mulmod(a.y, self.theta_trace, m), -a.y);
        let n = self.mul(a, conj).x;
        let ni = inv_mod(n, m)?;
        Some(self.mul(conj, Local { x: ni, y: 0 }))
    }

    /// The fixed uniformizer.
    pub fn uniformizer(&self) -> Local {
        match self.prime.kind {
            SplitType::Ramified => Local { x: 0, y: 1 },
            _ => self.int(self.prime.p as i128),
        }
    }

    /// Representatives of the residue field, as digits.
    pub fn digits(&self) -> Vec<Local> {
        let p = self.prime.p as i128;
        match self.prime.kind {
            SplitType::Inert => (0..p).flat_map(|y| (0..p).map(move |x| Local { x, y })).collect(),
            _ => (0..p).map(|x| Local { x, y: 0 }).collect(),
        }
    }

    /// Valuation in powers of the prime ideal, or `None` if the element vanishes to
    /// the available precision.
    pub fn val(&self, a: Local) -> Option<u32> {
        let p = self.prime.p as i128;
        let vp = |n: i128| if n == 0 { self.prec } else { valuation_i128(n, p).min(self.prec) };
        let v = match self.prime.kind {
            SplitType::Split => vp(a.x),
            SplitType::Inert => vp(a.x).min(vp(a.y)),
            SplitType::Ramified => (2 * vp(a.x)).min(2 * vp(a.y) + 1),
        };
        (v < self.ideal_precision()).then_some(v)
    }

    /// Whether `a` lies in the `j`-th power of the prime; `j` must not exceed the precision.
    pub fn in_power(&self, a: Local, j: u32) -> bool {
        debug_assert!(j <= self.ideal_precision());
        self.val(a).is_none_or(|v| v >= j)
    }

    /// Divides both coordinates by `p^s`; they must be divisible.
    fn div_p_pow(&self, a: Local, s: u32) -> Local {
        let d = (self.prime.p as i128).pow(s);
        debug_assert!(a.x % d == 0 && a.y % d == 0);
        Local { x: a.x / d, y: a.y / d }
    }

    /// Restricted symbol of a unit: quadratic character of its residue, or the
    /// ±1 mod 8 rule above 2.
    pub fn unit_symbol(&self, a: Local) -> Result<Symbol> {
        let p = self.prime.p;
        if p == 2 {
            if self.prime.kind != SplitType::Split {
                return Err(Error::UnsupportedPrime(format!("{} prime above 2", kind_name(self.prime.kind))));
            }
            return Ok(match a.x.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            });
        }
        Ok(match self.prime.kind {
            SplitType::Split | SplitType::Ramified => legendre(a.x, p),
            SplitType::Inert => {
                let pi = p as i128;
                let (x, y) = (a.x.rem_euclid(pi), a.y.rem_euclid(pi));
                if x == 0 && y == 0 {
                    return Ok(0);
                }
                let base = Completion {
                    prime: self.prime.clone(),
                    prec: 1,
                    modulus: pi,
                    theta_trace: self.theta_trace.rem_euclid(pi),
                    theta_norm: self.theta_norm.rem_euclid(pi),
                    root: 0,
                    twist: 1,
                };
                let r = base.pow(Local { x, y }, (p * p - 1) / 2);
                if r == (Local { x: 1, y: 0 }) {
                    1
                } else {
                    -1
                }
            }
        })
    }

    /// Symbol of `a·π^{-2t}`: zero unless `val(a) = 2t`.
    pub fn shifted_symbol(&self, a: Local, t: u32) -> Result<Symbol> {
        self.shifted_symbol_with(a, t, None)
    }

    /// As [`Completion::shifted_symbol`] with the uniformizer replaced by `π·w` for a unit `w`.
    pub fn shifted_symbol_with(&self, a: Local, t: u32, w: Option<Local>) -> Result<Symbol> {
        if self.prime.p == 2 && self.prime.kind != SplitType::Split {
            return Err(Error::UnsupportedPrime(format!("{} prime above 2", kind_name(self.prime.kind))));
        }
        if self.val(a) != Some(2 * t) {
            return Ok(0);
        }
        let (mut unit, twist) = match self.prime.kind {
            SplitType::Ramified => (self.div_p_pow(a, t), if t % 2 == 1 { self.twist } else { 1 }),
            _ => (self.div_p_pow(a, 2 * t), 1),
        };
        if let Some(w) = w {
            let wi = self.inv(w).ok_or_else(|| Error::UndefinedInput("uniformizer twist is not a unit".into()))?;
            let wi2 = self.mul(wi, wi);
            unit = self.mul(unit, self.pow(wi2, t as u64));
        }
        Ok(self.unit_symbol(unit)? * twist)
    }

    /// At a split prime above 2: `a / 4^t mod 2^bits`, if `4^t` divides `a`.
    pub fn two_adic_quotient(&self, a: Local, t: u32, bits: u32) -> Option<i128> {
        debug_assert!(self.prime.p == 2 && self.prime.kind == SplitType::Split);
        debug_assert!(2 * t + bits <= self.prec);
        let d = 1i128 << (2 * t);
        (a.x % d == 0).then(|| (a.x / d).rem_euclid(1 << bits))
    }
}

fn kind_name(k: SplitType) -> &'static str {
    match k {
        SplitType::Split => "split",
        SplitType::Inert => "inert",
        SplitType::Ramified => "ramified",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q33() -> FieldDescriptor {
        FieldDescriptor::real_quadratic(33).unwrap()
    }

    #[test]
    fn valuations_match_global() {
        for k in [q33(), FieldDescriptor::real_quadratic(5).unwrap(), FieldDescriptor::real_quadratic(7).unwrap()] {
            for p in [2u64, 3, 5, 7, 11] {
                for q in k.split_prime(p).unwrap() {
                    if p == 2 && q.kind != SplitType::Split {
                        continue;
                    }
                    let c = Completion::new(&k, &q, 12).unwrap();
                    for x in -40..40 {
                        for y in -40..40 {
                            let a = AlgInt::new(x, y);
                            if a.is_zero() {
                                continue;
                            }
                            assert_eq!(c.val(c.from_global(a)), Some(k.valuation(a, &q).unwrap()), "{a} at {q}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unit_inverse() {
        let k = q33();
        for q in k.split_prime(3).unwrap().into_iter().chain(k.split_prime(5).unwrap()) {
            let c = Completion::new(&k, &q, 5).unwrap();
            for x in 1..20 {
                let a = c.from_global(AlgInt::new(x, 3));
                if c.val(a) == Some(0) {
                    let b = c.inv(a).unwrap();
                    assert_eq!(c.mul(a, b), c.int(1));
                }
            }
        }
    }

    #[test]
    fn inert_symbol_counts_half_squares() {
        let k = FieldDescriptor::real_quadratic(5).unwrap();
        let q = &k.split_prime(3).unwrap()[0];
        let c = Completion::new(&k, q, 2).unwrap();
        let mut plus = 0;
        for d in c.digits() {
            if d != Local::default() && c.unit_symbol(d).unwrap() == 1 {
                plus += 1;
            }
        }
        assert_eq!(plus, 4);
    }

    proptest! {
        #[test]
        fn split_projection_is_a_ring_homomorphism(ax in -1000i128..1000, ay in -1000i128..1000,
                                                   bx in -1000i128..1000, by in -1000i128..1000,
                                                   pi in 0usize..4, idx in 0usize..2) {
            let k = q33();
            let p = [2u64, 17, 37, 67][pi];
            let q = &k.split_prime(p).unwrap()[idx];
            let c = Completion::new(&k, q, 4).unwrap();
            let (a, b) = (AlgInt::new(ax, ay), AlgInt::new(bx, by));
            prop_assert_eq!(c.from_global(k.add(a, b)), c.add(c.from_global(a), c.from_global(b)));
            prop_assert_eq!(c.from_global(k.mul(a, b)), c.mul(c.from_global(a), c.from_global(b)));
        }

        #[test]
        fn squares_have_symbol_one(x in -500i128..500, y in -500i128..500, pi in 0usize..5) {
            let k = q33();
            let p = [2u64, 3, 5, 7, 17][pi];
            for q in k.split_prime(p).unwrap() {
                let c = Completion::new(&k, &q, 6).unwrap();
                let a = AlgInt::new(x, y);
                let s = c.from_global(k.mul(a, a));
                if c.val(s) == Some(0) {
                    prop_assert_eq!(c.unit_symbol(s).unwrap(), 1);
                }
            }
        }
    }
}
