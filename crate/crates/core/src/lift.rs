//! Mod-`p` characters, the genericity hypothesis, and the ordinary crystalline lift
//! certificate obtained by reordering along `σ`.

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, FieldElem, RamRing, WittRing, WittScalar};
use crate::error::{Error, Result};
use crate::kisin::{RankOneKisin, UTKisinModule};
use crate::phigamma::{tau_shape_check, TauMatrix};
use crate::rootsys::Perm;
use crate::shape::{analyze, find_sigma};

pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;

/// `μ_unr · ε̄_p^s`: unramified part (value at Frobenius) and cyclotomic exponent mod `p − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModPChar {
    pub mu: FieldElem,
    pub s: u32,
}

impl ModPChar {
    pub fn identity() -> Self {
        Self { mu: FieldElem::ONE, s: 0 }
    }

    pub fn cyclotomic() -> Self {
        Self { mu: FieldElem::ONE, s: 1 }
    }

    pub fn mul(&self, k: &Field, other: &Self) -> Self {
        let order = k.p() - 1;
        Self { mu: k.mul(self.mu, other.mu), s: (self.s + other.s) % order }
    }

    pub fn inv(&self, k: &Field) -> Result<Self> {
        let order = k.p() - 1;
        Ok(Self { mu: k.inv(self.mu)?, s: (order - self.s % order) % order })
    }
}

/// Reduction of `ψ`: `ε̄_p` times the unramified character sending Frobenius to `twist`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsiModel {
    pub twist: FieldElem,
}

impl Default for PsiModel {
    fn default() -> Self {
        Self { twist: FieldElem::ONE }
    }
}

/// `λ_a · ψ̄^t`.
pub fn char_of_rank1(k: &Field, n: &RankOneKisin, psi: PsiModel) -> ModPChar {
    ModPChar { mu: k.mul(n.a, k.pow(psi.twist, n.t as u64)), s: n.t % (k.p() - 1) }
}

/// `λ_â · ψ^t`, recorded by its unit and weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrysCharData {
    pub a_hat: WittScalar,
    pub t: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Genericity {
    pub generic: bool,
    /// First 0-based pair with `χ̄_i·χ̄_j^{-1} = ε̄_p`.
    pub witness: Option<(usize, usize)>,
}

pub fn genericity_check(k: &Field, chars: &[ModPChar]) -> Genericity {
    let eps = ModPChar::cyclotomic();
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate() {
            if i != j && b.inv(k).is_ok_and(|binv| a.mul(k, &binv) == eps) {
                return Genericity { generic: false, witness: Some((i, j)) };
            }
        }
    }
    Genericity { generic: true, witness: None }
}

/// Characters of the graded pieces of `m`, in module order.
pub fn module_chars(m: &UTKisinModule, psi: PsiModel) -> Vec<ModPChar> {
    m.diagonal().iter().map(|n| char_of_rank1(m.field(), n, psi)).collect()
}

/// A twist of `ψ̄` that changes the genericity verdict of `rank1s`, if any.
pub fn psi_twist_counterexample(k: &Field, rank1s: &[RankOneKisin]) -> Option<FieldElem> {
    let chars = |psi| rank1s.iter().map(|n| char_of_rank1(k, n, psi)).collect::<Vec<_>>();
    let base = genericity_check(k, &chars(PsiModel::default())).generic;
    k.elements().filter(|w| !w.is_zero()).find(|&twist| genericity_check(k, &chars(PsiModel { twist })).generic != base)
}

/// Multiplying every character by the same unramified `λ` leaves the verdict unchanged.
pub fn global_twist_invariant(k: &Field, chars: &[ModPChar]) -> bool {
    let base = genericity_check(k, chars);
    k.elements().filter(|w| !w.is_zero()).all(|w| {
        let twisted: Vec<_> = chars.iter().map(|c| c.mul(k, &ModPChar { mu: w, s: 0 })).collect();
        genericity_check(k, &twisted).generic == base.generic
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharDoc {
    /// Coordinates of `μ` in the power basis of `k_E`.
    pub mu: Vec<u32>,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrysCharDoc {
    /// Coordinates of `â` modulo `p^M`.
    pub a_hat: Vec<u64>,
    pub t: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftCertificate {
    pub schema_version: u32,
    pub p: u32,
    pub f: usize,
    pub witt_precision: u32,
    pub psi_twist: Vec<u32>,
    pub input_chars: Vec<CharDoc>,
    pub sigma: Perm,
    pub output_chars: Vec<CrysCharDoc>,
    pub ht_multiset: Vec<u32>,
    pub generic: bool,
    pub ordinary: bool,
}

#[derive(Debug, Clone)]
pub struct LiftConfig {
    pub witt_precision: u32,
    pub psi: PsiModel,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self { witt_precision: 2, psi: PsiModel::default() }
    }
}

fn char_doc(k: &Field, c: &ModPChar) -> CharDoc {
    CharDoc { mu: k.coords(c.mu), s: c.s }
}

/// Build the certificate for `m`, optionally checking a `τ`-matrix first.
pub fn ordinary_lift(m: &UTKisinModule, tau: Option<(&RamRing, &TauMatrix)>, config: &LiftConfig) -> Result<LiftCertificate> {
    let report = analyze(m);
    if !report.is_clean() {
        return Err(Error::ShapeViolations(report.diagnostics.len()));
    }
    let k = m.field();
    let chars = module_chars(m, config.psi);
    if let Some((i, j)) = genericity_check(k, &chars).witness {
        return Err(Error::NotGeneric(i + 1, j + 1));
    }
    if let Some((ring, a_tau)) = tau {
        let verdict = tau_shape_check(ring, m, a_tau)?;
        if let Some(&(i, j)) = verdict.violations.first() {
            return Err(Error::Invariant(format!("A_tau is nonzero at ({}, {}) outside B_C", i + 1, j + 1)));
        }
    }
    let t = m.weights();
    let sigma = find_sigma(&t)?;
    let witt = WittRing::new(k.clone(), config.witt_precision)?;
    let units = m.units();
    let output_chars = (0..m.dim())
        .map(|i| {
            let s = sigma.apply(i);
            CrysCharData { a_hat: witt.teichmuller(units[s]), t: t[s] }
        })
        .collect::<Vec<_>>();
    let ordinary = output_chars.windows(2).all(|w| w[0].t < w[1].t);
    let mut ht = t.clone();
    ht.sort_unstable();
    Ok(LiftCertificate {
        schema_version: CERTIFICATE_SCHEMA_VERSION,
        p: k.p(),
        f: k.degree(),
        witt_precision: config.witt_precision,
        psi_twist: k.coords(config.psi.twist),
        input_chars: chars.iter().map(|c| char_doc(k, c)).collect(),
        sigma,
        output_chars: output_chars.into_iter().map(|c| CrysCharDoc { a_hat: c.a_hat.coeffs().to_vec(), t: c.t }).collect(),
        ht_multiset: ht,
        generic: true,
        ordinary,
    })
}

/// Recompute everything the certificate claims about `m`.
pub fn verify_certificate(cert: &LiftCertificate, m: &UTKisinModule) -> bool {
    let k = m.field();
    let d = m.dim();
    if cert.schema_version != CERTIFICATE_SCHEMA_VERSION || cert.p != k.p() || cert.f != k.degree() {
        return false;
    }
    let Ok(twist) = k.from_coords(&cert.psi_twist) else { return false };
    if twist.is_zero() {
        return false;
    }
    let psi = PsiModel { twist };
    let chars = module_chars(m, psi);
    let t = m.weights();
    let Ok(sigma) = find_sigma(&t) else { return false };
    let Ok(witt) = WittRing::new(k.clone(), cert.witt_precision) else { return false };

    let mut ht = t.clone();
    ht.sort_unstable();
    // multiset of the output weights, not just the recorded summary
    let mut out_weights: Vec<u32> = cert.output_chars.iter().map(|c| c.t).collect();
    out_weights.sort_unstable();

    let slots_ok = cert.output_chars.len() == d
        && (0..d).all(|i| {
            let c = &cert.output_chars[i];
            let Ok(a_hat) = witt.from_coords(&c.a_hat) else { return false };
            if !witt.is_unit(&a_hat) {
                return false;
            }
            let reduced = RankOneKisin { t: c.t, a: witt.reduce_mod_p(&a_hat) };
            char_of_rank1(k, &reduced, psi) == chars[sigma.apply(i)]
        });
    let ordered = cert.output_chars.windows(2).all(|w| w[0].t < w[1].t);
    let generic = genericity_check(k, &chars).generic;

    cert.sigma == sigma
        && cert.input_chars == chars.iter().map(|c| char_doc(k, c)).collect::<Vec<_>>()
        && cert.ht_multiset == ht
        && out_weights == ht
        && slots_ok
        && ordered
        && cert.ordinary == ordered
        && cert.generic == generic
        && generic
}
