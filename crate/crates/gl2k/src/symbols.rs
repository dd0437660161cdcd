//! Restricted and modified Hilbert symbols and the quadratic characters attached
//! to an elliptic datum.

use crate::arith::Symbol;
use crate::elliptic::EllipticDatum;
use crate::error::{Error, Result};
use crate::field::{AlgInt, FieldDescriptor, Ideal, PrimeIdeal, SplitType};
use crate::local::Completion;

/// Completion at `q` accurate to `digits` powers of the prime ideal.
pub fn completion_for(field: &FieldDescriptor, q: &PrimeIdeal, digits: u32) -> Result<Completion> {
    let e = q.ramification_index();
    Completion::new(field, q, digits.div_ceil(e) + 1)
}

fn check_prime(q: &PrimeIdeal) -> Result<()> {
    if q.p == 2 && q.kind != SplitType::Split {
        return Err(Error::UnsupportedPrime(format!("prime above 2 of type {:?}", q.kind)));
    }
    Ok(())
}

/// Precision in prime-ideal powers needed to read `α·π^{-2t}` modulo 8 or modulo 𝔮.
fn digits_for_shift(q: &PrimeIdeal, t: u32) -> u32 {
    if q.p == 2 {
        2 * t + 3
    } else {
        2 * t + 1
    }
}

/// `(α)_rH` at `q`: zero off units, otherwise the residue character (±1 mod 8 above 2).
pub fn restricted_hilbert(field: &FieldDescriptor, alpha: AlgInt, q: &PrimeIdeal) -> Result<Symbol> {
    shifted_hilbert(field, alpha, q, 0)
}

/// `(α·π^{-2t})_rH` at `q` with the fixed uniformizer.
pub fn shifted_hilbert(field: &FieldDescriptor, alpha: AlgInt, q: &PrimeIdeal, t: u32) -> Result<Symbol> {
    check_prime(q)?;
    if alpha.is_zero() {
        return Ok(0);
    }
    let c = completion_for(field, q, digits_for_shift(q, t))?;
    c.shifted_symbol(c.from_global(alpha), t)
}

/// Modified Hilbert symbol `∏_{𝔮 | 𝔟} (α·π_𝔮^{-2 val_𝔮(𝔞)})_rH^{val_𝔮(𝔟)}`.
pub fn modified_hilbert(field: &FieldDescriptor, alpha: AlgInt, a: &Ideal, b: &Ideal) -> Result<Symbol> {
    modified_hilbert_twisted(field, alpha, a, b, |_| None)
}

/// [`modified_hilbert`] with the uniformizer at `𝔮` replaced by `π_𝔮·w(𝔮)` whenever
/// `w` returns a unit at `𝔮`.
pub fn modified_hilbert_twisted<F>(field: &FieldDescriptor, alpha: AlgInt, a: &Ideal, b: &Ideal, w: F) -> Result<Symbol>
where
    F: Fn(&PrimeIdeal) -> Option<AlgInt>,
{
    if alpha.is_zero() {
        return Err(Error::UndefinedInput("modified symbol of zero".into()));
    }
    let mut acc: Symbol = 1;
    for (q, e) in &b.factors {
        check_prime(q)?;
        let t = field.ideal_valuation(a, q);
        let c = completion_for(field, q, digits_for_shift(q, t))?;
        let twist = w(q).map(|x| c.from_global(x));
        let s = c.shifted_symbol_with(c.from_global(alpha), t, twist)?;
        if s == 0 {
            return Ok(0);
        }
        if e % 2 == 1 {
            acc *= s;
        }
    }
    Ok(acc)
}

/// `χ_γ(𝔮)`: +1, −1 or 0 as `K(√δ)/K` splits, is inert or ramifies at `𝔮`.
pub fn chi_gamma(datum: &EllipticDatum, q: &PrimeIdeal) -> Result<Symbol> {
    let data = datum.s_gamma()?;
    let n = data.s_valuation(q);
    shifted_hilbert(&datum.field, data.delta, q, n)
}

/// `χ_γ(𝔞)` extended multiplicatively.
pub fn chi_gamma_ideal(datum: &EllipticDatum, a: &Ideal) -> Result<Symbol> {
    let mut acc = 1;
    for (q, e) in &a.factors {
        let s = chi_gamma(datum, q)?;
        if s == 0 {
            return Ok(0);
        }
        if e % 2 == 1 {
            acc *= s;
        }
    }
    Ok(acc)
}

/// Imprimitive character `χ_𝔡(𝔞)`: `χ_γ(𝔞)` if `𝔞` is coprime to `S_γ/𝔡`, else 0.
pub fn chi_d(datum: &EllipticDatum, d: &Ideal, a: &Ideal) -> Result<Symbol> {
    let data = datum.s_gamma()?;
    if !datum.field.divides(d, &data.s) {
        return Err(Error::InvalidDivisor(format!("{d} does not divide S = {}", data.s)));
    }
    for (q, _) in &a.factors {
        if data.s_valuation(q) > datum.field.ideal_valuation(d, q) {
            return Ok(0);
        }
    }
    chi_gamma_ideal(datum, a)
}

/// One entry per real place: 1 where the embedding of δ is negative.
pub fn ramification_vector(datum: &EllipticDatum) -> Vec<u8> {
    let delta = datum.delta();
    (0..datum.field.degree as usize).map(|i| u8::from(datum.field.embedding_sign(delta, i) < 0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker_i64;

    fn q() -> FieldDescriptor {
        FieldDescriptor::rational()
    }

    fn prime(k: &FieldDescriptor, p: u64) -> PrimeIdeal {
        k.split_prime(p).unwrap()[0].clone()
    }

    #[test]
    fn restricted_examples() {
        let k = q();
        assert_eq!(restricted_hilbert(&k, AlgInt::int(2), &prime(&k, 3)).unwrap(), -1);
        assert_eq!(restricted_hilbert(&k, AlgInt::int(7), &prime(&k, 2)).unwrap(), 1);
        assert_eq!(restricted_hilbert(&k, AlgInt::int(3), &prime(&k, 2)).unwrap(), -1);
        assert_eq!(restricted_hilbert(&k, AlgInt::int(1), &prime(&k, 2)).unwrap(), 1);
        assert_eq!(restricted_hilbert(&k, AlgInt::int(5), &prime(&k, 2)).unwrap(), -1);
        assert_eq!(restricted_hilbert(&k, AlgInt::int(6), &prime(&k, 2)).unwrap(), 0);
        let k5 = FieldDescriptor::real_quadratic(5).unwrap();
        let two = k5.split_prime(2).unwrap()[0].clone();
        assert!(matches!(restricted_hilbert(&k5, AlgInt::int(3), &two), Err(Error::UnsupportedPrime(_))));
    }

    #[test]
    fn modified_examples() {
        let k = q();
        let i = |n| k.principal(AlgInt::int(n)).unwrap();
        assert_eq!(modified_hilbert(&k, AlgInt::int(5), &i(1), &i(3)).unwrap(), -1);
        assert_eq!(modified_hilbert(&k, AlgInt::int(12345), &i(9), &i(1)).unwrap(), 1);
        assert_eq!(modified_hilbert(&k, AlgInt::int(45), &i(3), &i(7)).unwrap(), kronecker_i64(5, 7));
        assert_eq!(modified_hilbert(&k, AlgInt::int(45), &i(3), &i(7)).unwrap(), -1);
    }

    #[test]
    fn hensel_stability() {
        // Odd primes: depends only on α mod 𝔮; above 2: only on α mod 8.
        let k = FieldDescriptor::real_quadratic(33).unwrap();
        for p in [2u64, 3, 5, 7, 13] {
            for q in k.split_prime(p).unwrap() {
                let modulus = if p == 2 { 8 } else { p as i128 };
                let c = completion_for(&k, &q, 1).unwrap();
                for x in 0..modulus {
                    for y in 0..modulus {
                        let a = AlgInt::new(x, y);
                        let base = restricted_hilbert(&k, a, &q).unwrap();
                        for s in 1..4 {
                            let b = AlgInt::new(x + s * modulus * 5, y - s * modulus);
                            assert_eq!(restricted_hilbert(&k, b, &q).unwrap(), base);
                        }
                        if p != 2 && q.kind != SplitType::Inert {
                            let v = c.val(c.from_global(a));
                            assert_eq!(base == 0, v != Some(0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn alternate_uniformizer_agrees() {
        let k = FieldDescriptor::real_quadratic(33).unwrap();
        let ids = k.enumerate_by_norm(40).unwrap();
        let twist = |q: &PrimeIdeal| -> Option<AlgInt> {
            // A unit at q that is a non-square residue where possible.
            (1..40).map(|x| AlgInt::new(x, 1)).find(|&w| restricted_hilbert(&k, w, q).ok() == Some(-1))
        };
        for x in -6..6 {
            for y in -6..6 {
                let alpha = AlgInt::new(4 * x + 1, 3 * y);
                if alpha.is_zero() {
                    continue;
                }
                for a in &ids {
                    for b in ids.iter().take(12) {
                        let lhs = modified_hilbert(&k, alpha, a, b).unwrap();
                        let rhs = modified_hilbert_twisted(&k, alpha, a, b, twist).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}
