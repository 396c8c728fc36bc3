//! p-adic integers with eventually periodic digit expansions (exactly the rationals in `Z_p`).

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Base-`p` digits `prefix ++ cycle ++ cycle ++ ...`, least significant first.
/// An empty cycle means the tail is zero, i.e. a non-negative integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZpInt {
    p: u32,
    prefix: Vec<u32>,
    cycle: Vec<u32>,
}

impl ZpInt {
    /// A finite digit sequence; digits past the end are zero.
    pub fn from_digits(p: u32, digits: Vec<u32>) -> Result<Self> {
        if digits.iter().any(|&d| d >= p) {
            return Err(Error::Input(format!("p-adic digits must lie in [0, {p})")));
        }
        Ok(Self { p, prefix: digits, cycle: Vec::new() })
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        Self::from_rational(p, n, 1).expect("denominator 1 is a p-adic unit")
    }

    /// Expansion of `num / den`; `den` must be prime to `p`.
    pub fn from_rational(p: u32, num: i64, den: i64) -> Result<Self> {
        let pi = p as i128;
        let (mut n, mut d) = (num as i128, den as i128);
        if d == 0 || d.rem_euclid(pi) == 0 {
            return Err(Error::Input(format!("{num}/{den} is not a p-adic integer for p = {p}")));
        }
        if d < 0 {
            n = -n;
            d = -d;
        }
        let d_inv = inv_mod(d.rem_euclid(pi), pi);
        let mut seen: HashMap<i128, usize> = HashMap::new();
        let mut digits = Vec::new();
        loop {
            if let Some(&start) = seen.get(&n) {
                let cycle = digits.split_off(start);
                let cycle = if cycle.iter().all(|&c| c == 0) { Vec::new() } else { cycle };
                let mut out = Self { p, prefix: digits, cycle };
                out.normalize();
                return Ok(out);
            }
            seen.insert(n, digits.len());
            let digit = (n.rem_euclid(pi) * d_inv).rem_euclid(pi);
            digits.push(digit as u32);
            n = (n - digit * d) / pi;
        }
    }

    fn normalize(&mut self) {
        if self.cycle.is_empty() {
            while self.prefix.last() == Some(&0) {
                self.prefix.pop();
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn digit(&self, i: usize) -> u32 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else if self.cycle.is_empty() {
            0
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `len` digits.
    pub fn digits(&self, len: usize) -> Vec<u32> {
        (0..len).map(|i| self.digit(i)).collect()
    }

    /// Whether the expansion terminates (a non-negative integer).
    pub fn is_natural(&self) -> bool {
        self.cycle.is_empty()
    }

    /// The value as an integer, if natural and small enough.
    pub fn to_natural(&self) -> Option<u128> {
        if !self.is_natural() {
            return None;
        }
        let p = self.p as u128;
        self.prefix.iter().rev().try_fold(0u128, |acc, &d| acc.checked_mul(p)?.checked_add(d as u128))
    }

    /// `binom(self, k) mod p`, via Lucas' theorem on the digits.
    pub fn binomial_mod_p(&self, mut k: u64) -> u32 {
        let p = self.p as u64;
        let mut acc = 1u64;
        let mut i = 0;
        while k > 0 {
            let ki = k % p;
            let ai = self.digit(i) as u64;
            if ki > ai {
                return 0;
            }
            acc = acc * small_binomial(ai, ki, p) % p;
            k /= p;
            i += 1;
        }
        acc as u32
    }
}

fn inv_mod(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m)
}

fn small_binomial(n: u64, k: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * inv_mod(den as i128, p as i128) as u64 % p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansions_of_small_rationals() {
        let five = ZpInt::from_int(5, 5);
        assert_eq!(five.digits(3), vec![0, 1, 0]);
        assert!(five.is_natural());
        let minus_one = ZpInt::from_int(5, -1);
        assert_eq!(minus_one.digits(4), vec![4, 4, 4, 4]);
        assert!(!minus_one.is_natural());
        // 1/(p - 1) = -(1 + p + p^2 + ...) = 1 + 3p + 3p^2 + ... for p = 5
        let quarter = ZpInt::from_rational(5, 1, 4).unwrap();
        assert_eq!(quarter.digits(4), vec![4, 3, 3, 3]);
        assert!(ZpInt::from_rational(5, 1, 10).is_err());
    }

    #[test]
    fn lucas_binomials() {
        let a = ZpInt::from_int(5, 7);
        for k in 0..10u64 {
            let exact = if k > 7 { 0 } else { (1..=k).fold(1u64, |acc, i| acc * (8 - i) / i) };
            assert_eq!(a.binomial_mod_p(k) as u64, exact % 5, "k = {k}");
        }
    }

    #[test]
    fn expansion_reconstructs_the_rational() {
        // sum of digits * p^i agrees with num/den mod p^8
        let p = 7i128;
        for (num, den) in [(3, 2), (-5, 3), (7, 6), (49, 1), (-1, 1)] {
            let z = ZpInt::from_rational(7, num, den).unwrap();
            let m = p.pow(8);
            let v = z.digits(8).iter().rev().fold(0i128, |acc, &d| acc * p + d as i128);
            assert_eq!((v * den as i128 - num as i128).rem_euclid(m), 0, "{num}/{den}");
        }
    }
}
