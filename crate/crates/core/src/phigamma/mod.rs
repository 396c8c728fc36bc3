//! The `τ` side: rank-1 `τ`-matrices, the consistency identity
//! `A_τ·τ(φ(A_φ)) = φ(A_φ)·φ(A_τ)`, and the forced-vanishing pattern of `A_τ`.

mod kernel;
mod tropical;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{Mat, PolySeries, RamRing, RamSeries, ZpInt};
use crate::error::{Error, Result};
use crate::kisin::UTKisinModule;
use crate::rootsys::ClosedSet;
use crate::shape::closed_set_from_weights;

pub use kernel::{kernel_oracle, kernel_solve, KernelConfig, KernelSystem};
pub use tropical::{tropical_forced_zeros, tropical_from_matrix, zerosolution_valuation};

/// Default series precision `4p²·max(r, 1)`.
pub fn default_tau_precision(p: u32, r_max: u32) -> usize {
    4 * (p as usize).pow(2) * r_max.max(1) as usize
}

/// Matrix of `τ` with entries in the truncated series ring.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMatrix {
    entries: Mat<RamSeries>,
}

impl TauMatrix {
    pub fn new(entries: Mat<RamSeries>) -> Self {
        Self { entries }
    }

    pub fn identity(ring: &RamRing, d: usize) -> Self {
        Self { entries: ring.mat_identity(d) }
    }

    /// `diag(rank1_tau(t_1), …, rank1_tau(t_d))`.
    pub fn block_diagonal(ring: &RamRing, weights: &[u32]) -> Result<Self> {
        let diag = weights.iter().map(|&t| rank1_tau(ring, t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { entries: Mat::from_fn(weights.len(), |i, j| if i == j { diag[i].clone() } else { ring.zero() }) })
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &Mat<RamSeries> {
        &self.entries
    }

    /// Smallest precision among the entries.
    pub fn precision(&self) -> usize {
        self.entries.entries().iter().map(|e| e.precision()).min().unwrap_or(0)
    }
}

/// `ε^{p·t/(p-1)}`, the `τ`-matrix of `𝔪̄(t; a)` in the model ring.
pub fn rank1_tau(ring: &RamRing, t: u32) -> Result<RamSeries> {
    let p = ring.p() as i64;
    let alpha = ZpInt::from_rational(p as u32, p * t as i64, p - 1)?;
    ring.unit_pow_zp(&ring.eps_minus_one(), &alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Consistency {
    /// Both sides agree below `x^up_to`; never a claim of exact equality.
    VerifiedUpToPrecision { up_to: usize },
    /// First disagreement, 0-based position and `x`-exponent.
    Violated { row: usize, col: usize, exponent: usize },
}

impl Consistency {
    pub fn is_verified(&self) -> bool {
        matches!(self, Consistency::VerifiedUpToPrecision { .. })
    }
}

/// Check `A_τ·τ(φ(A_φ)) = φ(A_φ)·φ(A_τ)` coefficientwise below the common precision.
pub fn check_consistency(ring: &RamRing, a_phi: &Mat<PolySeries>, a_tau: &TauMatrix) -> Result<Consistency> {
    let d = a_phi.dim();
    if a_tau.dim() != d {
        return Err(Error::DimensionMismatch(format!("A_phi is {d}x{d}, A_tau is {0}x{0}", a_tau.dim())));
    }
    let phi_f = a_phi.map(|f| ring.phi(&ring.from_poly(f)));
    let tau_phi_f = ring.mat_tau(&phi_f);
    let lhs = ring.mat_mul(a_tau.entries(), &tau_phi_f);
    let rhs = ring.mat_mul(&phi_f, &ring.mat_phi(a_tau.entries()));

    let p = ring.p();
    let s_max = (0..d).filter_map(|i| a_phi.get(i, i).degree()).max().unwrap_or(0) * p * (p - 1);
    let mut window = ring.n();
    let mut first: Option<(usize, usize, usize)> = None;
    for i in 0..d {
        for j in 0..d {
            let (l, r) = (lhs.get(i, j), rhs.get(i, j));
            window = window.min(l.precision()).min(r.precision());
            if let crate::algebra::Comparison::DifferAt(k) = ring.compare(l, r) {
                if first.is_none_or(|(_, _, e)| k < e) {
                    first = Some((i, j, k));
                }
            }
        }
    }
    if window <= s_max {
        return Err(Error::InsufficientPrecision { needed: s_max + 1, have: window });
    }
    Ok(match first {
        Some((row, col, exponent)) => Consistency::Violated { row, col, exponent },
        None => Consistency::VerifiedUpToPrecision { up_to: window },
    })
}

/// Whether every entry of `A_τ − Id` has positive valuation.
pub fn check_iplus(ring: &RamRing, a_tau: &TauMatrix) -> Result<bool> {
    let d = a_tau.dim();
    for i in 0..d {
        for j in 0..d {
            let mut entry = a_tau.entries().get(i, j).clone();
            if i == j {
                entry = ring.sub(&entry, &ring.one());
            }
            if entry.precision() == 0 {
                return Err(Error::IndeterminateValuation(0));
            }
            if !entry.coeff(0).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Which engine produced a [`VanishingReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Tropical,
    Kernel,
}

/// Above-diagonal positions (0-based) where every admissible `A_τ` vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingReport {
    pub engine: Engine,
    pub forced_zero_positions: BTreeSet<(usize, usize)>,
    pub precision_used: Option<usize>,
}

/// Outcome of [`tau_shape_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauShapeVerdict {
    pub closed_set: ClosedSet,
    /// Positions where `A_τ` fails to vanish although `B_C` requires it.
    pub violations: Vec<(usize, usize)>,
}

impl TauShapeVerdict {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Membership of `A_τ` in `B_C` for `C` built from the weights of `m`.
///
/// Entry `(i, j)` only determines its coefficients below `N − p(p−1)t_j` through the
/// consistency identity, so the zero test looks at that window.
pub fn tau_shape_check(ring: &RamRing, m: &UTKisinModule, a_tau: &TauMatrix) -> Result<TauShapeVerdict> {
    if !check_iplus(ring, a_tau)? {
        return Err(Error::PreconditionFailed("A_tau - Id has an entry of non-positive valuation".into()));
    }
    match check_consistency(ring, m.a_phi(), a_tau)? {
        Consistency::VerifiedUpToPrecision { .. } => {}
        Consistency::Violated { row, col, exponent } => {
            return Err(Error::PreconditionFailed(format!(
                "consistency identity fails at ({}, {}) in degree {exponent}",
                row + 1,
                col + 1
            )))
        }
    }
    let t = m.weights();
    let c = closed_set_from_weights(&t)?;
    let p = ring.p();
    let d = m.dim();
    let mut violations = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i == j || (i < j && c.contains(i, j)) {
                continue;
            }
            let entry = a_tau.entries().get(i, j);
            let window = ring.n().saturating_sub(p * (p - 1) * t[j] as usize).min(entry.precision());
            if entry.coeffs().iter().take(window).any(|x| !x.is_zero()) {
                violations.push((i, j));
            }
        }
    }
    Ok(TauShapeVerdict { closed_set: c, violations })
}
