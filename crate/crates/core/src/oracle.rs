//! Classical reference arithmetic used as ground truth by the verifiers.
//!
//! Everything here is plain big-integer arithmetic and shares no code with
//! the circuit builders.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::OracleError;

pub fn school_product(x: &BigUint, y: &BigUint) -> BigUint {
    x * y
}

pub fn mod2n_product(x: &BigUint, y: &BigUint, n: u32) -> BigUint {
    let mask = (BigUint::one() << n) - 1u32;
    (x * y) & mask
}

/// Montgomery parameters for an odd modulus with `R = 2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MontgomeryContext {
    p: BigUint,
    n: u32,
    r_mod_p: BigUint,
    r_inv: BigUint,
}

impl MontgomeryContext {
    pub fn new(p: BigUint, n: u32) -> Result<Self, OracleError> {
        if p.is_even() || p <= BigUint::one() {
            return Err(OracleError::EvenModulus);
        }
        if p.bits() > n as u64 {
            return Err(OracleError::ModulusTooWide { p: p.to_string(), n });
        }
        let r_mod_p = (BigUint::one() << n) % &p;
        let r_inv = r_mod_p.modinv(&p).expect("2^n is invertible modulo an odd modulus");
        Ok(Self { p, n, r_mod_p, r_inv })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn width(&self) -> u32 {
        self.n
    }

    /// `R mod p`, the Montgomery form of one.
    pub fn r_mod_p(&self) -> &BigUint {
        &self.r_mod_p
    }

    pub fn r_inv(&self) -> &BigUint {
        &self.r_inv
    }

    fn reduced(&self, v: &BigUint) -> Result<(), OracleError> {
        if v >= &self.p {
            Err(OracleError::NotReduced(v.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn to_montgomery(&self, x: &BigUint) -> Result<BigUint, OracleError> {
        self.reduced(x)?;
        Ok((x << self.n) % &self.p)
    }

    pub fn from_montgomery(&self, x: &BigUint) -> Result<BigUint, OracleError> {
        self.reduced(x)?;
        Ok(x * &self.r_inv % &self.p)
    }

    /// Entry `t` is `((-t) * p^-1 mod 2^w) * p`, so `t + entry[t] = 0 mod 2^w`.
    pub fn lookup_entries(&self, w: u32) -> Result<Vec<BigUint>, OracleError> {
        if w == 0 || w > self.n {
            return Err(OracleError::WindowOutOfRange { w, n: self.n });
        }
        let modulus = BigUint::one() << w;
        let p_inv = (&self.p % &modulus).modinv(&modulus).expect("odd modulus");
        Ok((0u64..1 << w)
            .map(|t| {
                let neg_t = (&modulus - (BigUint::from(t) % &modulus)) % &modulus;
                (neg_t * &p_inv % &modulus) * &self.p
            })
            .collect())
    }

    /// `x * y * R^-1 mod p` by direct modular arithmetic.
    pub fn product_direct(&self, x: &BigUint, y: &BigUint) -> Result<BigUint, OracleError> {
        self.reduced(x)?;
        self.reduced(y)?;
        Ok(x * y % &self.p * &self.r_inv % &self.p)
    }

    /// `x * y * R^-1 mod p` by word-serial reduction over `w`-bit windows of
    /// `x` (the last window truncated), then one conditional subtraction.
    pub fn product_windowed(&self, x: &BigUint, y: &BigUint, w: u32) -> Result<BigUint, OracleError> {
        self.reduced(x)?;
        self.reduced(y)?;
        if w == 0 || w > self.n {
            return Err(OracleError::WindowOutOfRange { w, n: self.n });
        }
        let mut z = BigUint::zero();
        let mut offset = 0;
        while offset < self.n {
            let width = w.min(self.n - offset);
            let mask = (BigUint::one() << width) - 1u32;
            let window = (x >> offset) & &mask;
            z += window * y;
            let low = &z & &mask;
            // smallest m with z + m p = 0 mod 2^width, found by search
            let m = (0u64..1 << width)
                .map(BigUint::from)
                .find(|m| ((&low + m * &self.p) & &mask).is_zero())
                .expect("p is odd");
            z = (z + m * &self.p) >> width;
            offset += width;
        }
        if z >= self.p {
            z -= &self.p;
        }
        Ok(z)
    }

    /// Montgomery product, computed by both routes and cross-checked.
    pub fn product(&self, x: &BigUint, y: &BigUint) -> Result<BigUint, OracleError> {
        let direct = self.product_direct(x, y)?;
        let windowed = self.product_windowed(x, y, self.n.min(4))?;
        if direct != windowed {
            return Err(OracleError::Disagreement { direct: direct.to_string(), windowed: windowed.to_string() });
        }
        Ok(direct)
    }
}

const WITNESSES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin over the first twelve primes. Deterministic below `2^64`;
/// a strong probable-prime test above.
pub fn is_prime(p: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if p < &two {
        return false;
    }
    for &w in &WITNESSES {
        if *p == BigUint::from(w) {
            return true;
        }
        if (p % w).is_zero() {
            return false;
        }
    }
    let p_minus_1 = p - 1u32;
    let s = p_minus_1.trailing_zeros().unwrap_or(0);
    let d = &p_minus_1 >> s;
    'witness: for &w in &WITNESSES {
        let mut x = BigUint::from(w).modpow(&d, p);
        if x.is_one() || x == p_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, p);
            if x == p_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Odd primes strictly between `2^(n-1)` and `2^n`.
pub fn primes_of_width(n: u32) -> Vec<u64> {
    assert!((2..64).contains(&n));
    ((1u64 << (n - 1)) + 1..1u64 << n)
        .step_by(2)
        .filter(|&p| is_prime(&BigUint::from(p)))
        .collect()
}

/// Largest prime below `2^n`.
pub fn largest_prime_of_width(n: u32) -> BigUint {
    assert!(n >= 2);
    let mut p = (BigUint::one() << n) - 1u32;
    while !is_prime(&p) {
        p -= 2u32;
    }
    p
}
