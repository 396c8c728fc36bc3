//! Forced zeros by valuations alone, following the induction on `d`: peel the first
//! row and the last column, then settle the corner by the scalar equation
//! `m·τ(φ(u^b)) = φ(u^a)·φ(m)`.

use std::collections::{BTreeSet, HashMap};

use num_rational::Rational64;

use super::{Engine, VanishingReport};
use crate::algebra::{Mat, PolySeries};
use crate::error::{Error, Result};

/// The only finite valuation compatible with `m·τ(φ(u^b)) = φ(u^a)·φ(m)`:
/// `v + p·b/e = p·a/e + p·v`, i.e. `v = p(b − a) / (e(p − 1))`.
pub fn zerosolution_valuation(a: u32, b: u32, p: u32, e: u32) -> Rational64 {
    Rational64::new(p as i64 * (b as i64 - a as i64), e as i64 * (p as i64 - 1))
}

/// Forced zeros of `M` given the weights and the above-diagonal support of `F`.
pub fn tropical_forced_zeros(t: &[u32], support: &BTreeSet<(usize, usize)>, p: u32, e: u32) -> Result<VanishingReport> {
    let d = t.len();
    for (k, x) in t.iter().enumerate() {
        if t[..k].contains(x) {
            return Err(Error::BadWeights(format!("weight {x} repeated")));
        }
    }
    for &(i, j) in support {
        if i < j && j < d && t[i] > t[j] {
            return Err(Error::HypothesisViolated(i + 1, j + 1));
        }
    }
    let mut memo = HashMap::new();
    let forced = peel(0, d.saturating_sub(1), t, support, p, e, &mut memo);
    Ok(VanishingReport { engine: Engine::Tropical, forced_zero_positions: forced, precision_used: None })
}

/// Support of `F` read off a matrix, then [`tropical_forced_zeros`] with `e = 1`.
pub fn tropical_from_matrix(a_phi: &Mat<PolySeries>, p: u32) -> Result<VanishingReport> {
    let d = a_phi.dim();
    let mut t = Vec::with_capacity(d);
    for i in 0..d {
        let entry = a_phi.get(i, i);
        let deg = entry.degree().ok_or(Error::BadDiagonal(i + 1))?;
        if entry.coeffs()[..deg].iter().any(|c| !c.is_zero()) {
            return Err(Error::BadDiagonal(i + 1));
        }
        t.push(deg as u32);
    }
    let support = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).filter(|&(i, j)| !a_phi.get(i, j).is_zero()).collect();
    tropical_forced_zeros(&t, &support, p, 1)
}

fn peel(
    lo: usize,
    hi: usize,
    t: &[u32],
    support: &BTreeSet<(usize, usize)>,
    p: u32,
    e: u32,
    memo: &mut HashMap<(usize, usize), BTreeSet<(usize, usize)>>,
) -> BTreeSet<(usize, usize)> {
    if hi <= lo {
        return BTreeSet::new();
    }
    if let Some(done) = memo.get(&(lo, hi)) {
        return done.clone();
    }
    // induction hypothesis on the co-matrices without the first row/column and without the last
    let mut forced = peel(lo + 1, hi, t, support, p, e, memo);
    forced.extend(peel(lo, hi - 1, t, support, p, e, memo));

    let others_vanish = (lo + 1..hi).all(|k| {
        if t[k] > t[lo] {
            // Case 1: f_{k,hi} = 0 and m_{k,hi} = 0
            t[lo] > t[hi] && !support.contains(&(k, hi)) && forced.contains(&(k, hi))
        } else {
            // Case 2: f_{lo,k} = 0 and m_{lo,k} = 0
            !support.contains(&(lo, k)) && forced.contains(&(lo, k))
        }
    });
    if t[lo] > t[hi] && others_vanish {
        let v = zerosolution_valuation(t[lo], t[hi], p, e);
        // a nonzero corner would need v > 0
        if v <= Rational64::from_integer(0) {
            forced.insert((lo, hi));
        }
    }
    memo.insert((lo, hi), forced.clone());
    forced
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forced(t: &[u32]) -> BTreeSet<(usize, usize)> {
        tropical_forced_zeros(t, &BTreeSet::new(), 5, 1).unwrap().forced_zero_positions
    }

    #[test]
    fn valuation_law() {
        assert_eq!(zerosolution_valuation(0, 2, 5, 1), Rational64::new(10, 4));
        assert!(zerosolution_valuation(2, 0, 5, 1) < Rational64::from_integer(0));
        assert_eq!(zerosolution_valuation(1, 3, 3, 2), Rational64::new(3, 2));
    }

    #[test]
    fn small_templates() {
        assert_eq!(forced(&[2, 0]), [(0, 1)].into());
        assert!(forced(&[0, 2]).is_empty());
        assert_eq!(forced(&[2, 0, 4]), [(0, 1)].into());
        assert_eq!(forced(&[4, 2, 0]), [(0, 1), (0, 2), (1, 2)].into());
    }

    #[test]
    fn hypothesis_is_checked() {
        let support = [(0, 1)].into();
        assert_eq!(tropical_forced_zeros(&[2, 0], &support, 5, 1), Err(Error::HypothesisViolated(1, 2)));
        assert!(tropical_forced_zeros(&[0, 2], &support, 5, 1).unwrap().forced_zero_positions.is_empty());
    }
}
