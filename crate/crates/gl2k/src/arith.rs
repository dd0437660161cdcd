//! Integer utilities: the Kronecker symbol, factorization and valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A quadratic symbol value in {-1, 0, 1}.
pub type Symbol = i8;

/// Prime factorization with strictly increasing primes and positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn value(&self) -> BigInt {
        self.factors.iter().fold(BigInt::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Factors as machine integers; panics if a prime exceeds `u64`.
    pub fn to_u64(&self) -> Vec<(u64, u32)> {
        self.factors.iter().map(|(p, e)| (p.to_u64().expect("prime fits in u64"), *e)).collect()
    }
}

/// Limits for [`factorize_with`].
#[derive(Debug, Clone, Copy)]
pub struct FactorBudget {
    /// Trial division bound.
    pub trial_limit: u64,
    /// Maximum number of rho iterations per split attempt.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { trial_limit: 1_000_000, rho_iterations: 2_000_000 }
    }
}

const KRONECKER_TWO: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// Kronecker symbol `(a / n)` for machine integers, including `n <= 0` and even `n`.
pub fn kronecker_i64(a: i64, n: i64) -> Symbol {
    kronecker_i128(a as i128, n as i128)
}

/// Kronecker symbol for 128-bit integers.
pub fn kronecker_i128(a: i128, n: i128) -> Symbol {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut b = n;
    let v = b.trailing_zeros();
    b >>= v;
    let mut k: i8 = if v.is_multiple_of(2) { 1 } else { KRONECKER_TWO[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    let mut a = a.rem_euclid(b);
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= KRONECKER_TWO[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = b % a;
        b = a;
        a = r;
    }
    if b == 1 {
        k
    } else {
        0
    }
}

/// Kronecker symbol `(a / n)` for arbitrary-precision integers.
pub fn kronecker(a: &BigInt, n: &BigInt) -> Symbol {
    if let (Some(x), Some(y)) = (a.to_i128(), n.to_i128()) {
        return kronecker_i128(x, y);
    }
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let two = BigInt::from(2);
    if a.is_even() && n.is_even() {
        return 0;
    }
    let mut b = n.clone();
    let mut v = 0u32;
    while b.is_even() {
        b /= &two;
        v += 1;
    }
    let a_mod8 = a.mod_floor(&BigInt::from(8)).to_usize().unwrap();
    let mut k: i8 = if v.is_multiple_of(2) { 1 } else { KRONECKER_TWO[a_mod8] };
    if b.is_negative() {
        b = -b;
        if a.is_negative() {
            k = -k;
        }
    }
    let mut a = a.mod_floor(&b);
    while !a.is_zero() {
        let mut v = 0u32;
        while a.is_even() {
            a /= &two;
            v += 1;
        }
        let b8 = (&b % 8u32).to_usize().unwrap();
        if v % 2 == 1 {
            k *= KRONECKER_TWO[b8];
        }
        let a4 = (&a % 4u32).to_u32().unwrap();
        if a4 == 3 && b8 % 4 == 3 {
            k = -k;
        }
        let r = &b % &a;
        b = a;
        a = r;
    }
    if b.is_one() {
        k
    } else {
        0
    }
}

/// Largest `e` with `p^e | n`.
pub fn valuation(n: &BigInt, p: &BigInt) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::UndefinedInput("valuation of zero".into()));
    }
    if p.abs() <= BigInt::one() {
        return Err(Error::UndefinedInput("valuation base must be a prime".into()));
    }
    let mut m = n.abs();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Ok(e);
        }
        m = q;
        e += 1;
    }
}

/// Valuation of a machine integer; `n` must be nonzero.
pub fn valuation_i128(n: i128, p: i128) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    e
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` for machine integers.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A square root of `a` modulo an odd prime `p` (Tonelli-Shanks), if one exists.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1).expect("non-residue exists");
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_probable_prime_big(n: &BigInt) -> bool {
    if let Some(x) = n.to_u64() {
        return is_prime_u64(x);
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with Floyd cycle detection, retrying over a fixed sequence of constants.
fn rho_split(n: &BigInt, budget: u64) -> Option<BigInt> {
    let one = BigInt::one();
    for c in 1u32..20 {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut steps = 0u64;
        while d.is_one() && steps < budget {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
            steps += 1;
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}

/// Exact factorization with the default budget.
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    factorize_with(n, FactorBudget::default())
}

/// Exact factorization: trial division then Pollard rho.
pub fn factorize_with(n: &BigInt, budget: FactorBudget) -> Result<Factorization> {
    if !n.is_positive() {
        return Err(Error::UndefinedInput("factorize requires n >= 1".into()));
    }
    let mut m = n.clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= budget.trial_limit {
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        let mut stack = vec![m];
        let mut large: Vec<BigInt> = Vec::new();
        while let Some(x) = stack.pop() {
            if is_probable_prime_big(&x) {
                large.push(x);
                continue;
            }
            let r = x.sqrt();
            if &r * &r == x {
                stack.push(r.clone());
                stack.push(r);
                continue;
            }
            match rho_split(&x, budget.rho_iterations) {
                Some(d) => {
                    let q = &x / &d;
                    stack.push(d);
                    stack.push(q);
                }
                None => {
                    return Err(Error::Resource(format!("could not factor {x} within budget")));
                }
            }
        }
        large.sort();
        for q in large {
            match out.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Factorization { factors: out })
}

/// Factorization of a positive machine integer.
pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    factorize(&BigInt::from(n)).expect("u64 inputs factor within budget").to_u64()
}

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter_map(|(i, &b)| if b { Some(i as u64) } else { None }).collect()
}

/// Integer square root of a nonnegative 128-bit integer.
pub fn isqrt_i128(n: i128) -> i128 {
    assert!(n >= 0, "isqrt of a negative number");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// True iff `n` is a perfect square (negative numbers are not).
pub fn is_square_i128(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt_i128(n);
        r * r == n
    }
}

/// True iff `n` has no repeated prime factor.
pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Modular inverse of `a` modulo `m` (`m > 1`), if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 == 1 {
        Some(s0.rem_euclid(m))
    } else {
        None
    }
}

/// Legendre symbol of `a` modulo an odd prime `p`.
pub fn legendre(a: i128, p: u64) -> Symbol {
    kronecker_i128(a, p as i128)
}

/// Splits a discriminant `n ≡ 0, 1 mod 4` (not a square) as `n = D·f²` with `D` fundamental.
pub fn fundamental_part(n: i64) -> Option<(i64, i64)> {
    if n == 0 || n.rem_euclid(4) > 1 || (n > 0 && is_square_i128(n as i128)) {
        return None;
    }
    let mut f = 1i64;
    for (p, e) in factorize_u64(n.unsigned_abs()) {
        f *= (p as i64).pow(e / 2);
    }
    let mut d = n / (f * f);
    if d.rem_euclid(4) != 1 {
        d *= 4;
        f /= 2;
    }
    Some((d, f))
}

/// True iff `d` is the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    d != 1 && fundamental_part(d).is_some_and(|(_, f)| f == 1)
}
