//! Kisin-module data: rank-1 modules and lifts, upper-triangular Frobenius matrices,
//! the height condition, and a generator of well-shaped modules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CoeffRing, Field, FieldElem, Mat, PolyRing, PolySeries, Polynomial, WittPoly, WittRing, WittScalar};
use crate::error::{Error, Result};
use crate::rootsys::first_below_diagonal;

/// `𝔪̄(t; a)`: `φ(e) = a·u^t·e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankOneKisin {
    pub t: u32,
    pub a: FieldElem,
}

impl RankOneKisin {
    pub fn new(t: u32, a: FieldElem) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Input("rank-1 Kisin module needs a nonzero unit".into()));
        }
        Ok(Self { t, a })
    }
}

/// `𝔪(t; â)`: `φ(ẽ) = â·(u - p)^t·ẽ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneLift {
    pub t: u32,
    pub a_hat: WittScalar,
}

impl RankOneLift {
    pub fn new(witt: &WittRing, t: u32, a_hat: WittScalar) -> Result<Self> {
        if !witt.is_unit(&a_hat) {
            return Err(Error::Input("lift of a rank-1 module needs a unit".into()));
        }
        Ok(Self { t, a_hat })
    }

    pub fn reduce(&self, witt: &WittRing) -> RankOneKisin {
        RankOneKisin { t: self.t, a: witt.reduce_mod_p(&self.a_hat) }
    }

    pub fn frobenius_entry(&self, witt: &WittRing) -> WittPoly {
        let polys = witt.polys();
        polys.scale(&polys.pow(&witt.eisenstein(), self.t), &self.a_hat)
    }
}

/// Nonzero `𝔪̄(t_j; a_j) → 𝔪̄(t_i; a_i)` exists iff `a_i = a_j` and `t_j - t_i` is a
/// non-negative multiple of `p - 1`; returns `s` with `e_j ↦ c·u^s·e_i`.
pub fn hom_exists(p: u32, source: &RankOneKisin, target: &RankOneKisin) -> Option<u32> {
    if source.a != target.a || source.t < target.t {
        return None;
    }
    let gap = source.t - target.t;
    gap.is_multiple_of(p - 1).then_some(gap / (p - 1))
}

/// Degree `t_j + (t_j - t_i)/(p-1)` of the extra term at a Hom position.
pub fn extra_term_degree(p: u32, t_i: u32, t_j: u32) -> Result<u32> {
    if t_j < t_i || !(t_j - t_i).is_multiple_of(p - 1) {
        return Err(Error::NoHom);
    }
    let deg = t_j + (t_j - t_i) / (p - 1);
    if t_j <= p && t_j - t_i == p - 1 && deg < p {
        return Err(Error::Invariant(format!("extra term degree {deg} below p")));
    }
    Ok(deg)
}

/// Height condition `A·B = E(u)^r·Id`: returns the witness `B` when it exists.
pub fn height_check<R: CoeffRing>(
    polys: &PolyRing<R>,
    a: &Mat<Polynomial<R::Elem>>,
    e: &Polynomial<R::Elem>,
    r: u32,
) -> Result<Option<Mat<Polynomial<R::Elem>>>> {
    let det = polys.det(a);
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let er = polys.pow(e, r);
    let adj = polys.adjugate(a);
    let d = a.dim();
    let mut b = Vec::with_capacity(d * d);
    for entry in adj.entries() {
        match polys.exact_div(&polys.mul(&er, entry), &det) {
            Ok(q) => b.push(q),
            Err(Error::NotDivisible) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    let b = Mat::from_flat(d, b)?;
    let prod = polys.mat_mul(a, &b);
    for i in 0..d {
        for j in 0..d {
            let expected = if i == j { er.clone() } else { polys.zero() };
            if prod.get(i, j) != &expected {
                return Err(Error::Invariant(format!("height witness fails at ({}, {})", i + 1, j + 1)));
            }
        }
    }
    Ok(Some(b))
}

/// Upper-triangular mod-p Kisin module given by its Frobenius matrix over `k_E[u]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UTKisinModule {
    field: Field,
    a_phi: Mat<PolySeries>,
    r: u32,
}

impl UTKisinModule {
    /// Validates upper triangularity, monomial diagonal and the height condition.
    pub fn new(field: Field, a_phi: Mat<PolySeries>, r: u32) -> Result<Self> {
        if let Some((i, j)) = first_below_diagonal(&a_phi, |x| x.is_zero()) {
            return Err(Error::NotUpperTriangular(i + 1, j + 1));
        }
        let polys = PolyRing::new(field.clone());
        for i in 0..a_phi.dim() {
            if polys.as_monomial(a_phi.get(i, i)).is_none() {
                return Err(Error::BadDiagonal(i + 1));
            }
        }
        let e = polys.monomial(field.one(), 1);
        if height_check(&polys, &a_phi, &e, r)?.is_none() {
            return Err(Error::HeightFailed(r));
        }
        Ok(Self { field, a_phi, r })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn polys(&self) -> PolyRing<Field> {
        PolyRing::new(self.field.clone())
    }

    pub fn dim(&self) -> usize {
        self.a_phi.dim()
    }

    pub fn a_phi(&self) -> &Mat<PolySeries> {
        &self.a_phi
    }

    pub fn height(&self) -> u32 {
        self.r
    }

    /// The rank-1 graded pieces `𝔪̄(t_i; a_i)` read off the diagonal.
    pub fn diagonal(&self) -> Vec<RankOneKisin> {
        let polys = self.polys();
        (0..self.dim())
            .map(|i| {
                let (a, t) = polys.as_monomial(self.a_phi.get(i, i)).expect("validated diagonal");
                RankOneKisin { t: t as u32, a }
            })
            .collect()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.diagonal().iter().map(|m| m.t).collect()
    }

    pub fn units(&self) -> Vec<FieldElem> {
        self.diagonal().iter().map(|m| m.a).collect()
    }

    /// Lift by `u ↦ u - p` with Teichmüller coefficients.
    pub fn teichmuller_lift(&self, witt: &WittRing) -> Result<UTKisinLift> {
        let a = self.a_phi.map(|entry| substitute_eisenstein(witt, entry, |c| witt.teichmuller(c)));
        UTKisinLift::new(witt.clone(), a, self.r)
    }
}

/// `Σ c_k u^k ↦ Σ lift(c_k)·(u - p)^k`.
fn substitute_eisenstein(witt: &WittRing, a: &PolySeries, mut lift: impl FnMut(FieldElem) -> WittScalar) -> WittPoly {
    let polys = witt.polys();
    let e = witt.eisenstein();
    let mut acc = polys.zero();
    let mut e_pow = polys.one();
    for &c in a.coeffs() {
        if !c.is_zero() {
            acc = polys.add(&acc, &polys.scale(&e_pow, &lift(c)));
        }
        e_pow = polys.mul(&e_pow, &e);
    }
    acc
}

/// Upper-triangular Kisin module over `O_E[u] / p^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct UTKisinLift {
    witt: WittRing,
    a_phi: Mat<WittPoly>,
    r: u32,
}

impl UTKisinLift {
    pub fn new(witt: WittRing, a_phi: Mat<WittPoly>, r: u32) -> Result<Self> {
        if let Some((i, j)) = first_below_diagonal(&a_phi, |x| x.is_zero()) {
            return Err(Error::NotUpperTriangular(i + 1, j + 1));
        }
        let polys = witt.polys();
        let e = witt.eisenstein();
        for i in 0..a_phi.dim() {
            let entry = a_phi.get(i, i);
            let ok = entry.degree().is_some_and(|t| {
                let lead = entry.leading().expect("nonzero");
                witt.is_unit(lead) && polys.scale(&polys.pow(&e, t as u32), lead) == *entry
            });
            if !ok {
                return Err(Error::BadDiagonal(i + 1));
            }
        }
        if height_check(&polys, &a_phi, &e, r)?.is_none() {
            return Err(Error::HeightFailed(r));
        }
        Ok(Self { witt, a_phi, r })
    }

    pub fn witt(&self) -> &WittRing {
        &self.witt
    }

    pub fn dim(&self) -> usize {
        self.a_phi.dim()
    }

    pub fn a_phi(&self) -> &Mat<WittPoly> {
        &self.a_phi
    }

    pub fn height(&self) -> u32 {
        self.r
    }

    pub fn diagonal(&self) -> Vec<RankOneLift> {
        (0..self.dim())
            .map(|i| {
                let entry = self.a_phi.get(i, i);
                RankOneLift { t: entry.degree().expect("validated") as u32, a_hat: entry.leading().expect("validated").clone() }
            })
            .collect()
    }
}

/// Entrywise reduction mod `p`; the height condition is re-verified over `k_E`.
pub fn reduce_lift(m: &UTKisinLift) -> Result<UTKisinModule> {
    let a = m.a_phi.map(|x| m.witt.reduce_poly(x));
    UTKisinModule::new(m.witt.field().clone(), a, m.r)
}

/// A random lift of `m`: each term `c·u^k` becomes `(ĉ + p·w)(u - p)^k` with `ĉ` a
/// random lift of `c`, plus `p`-divisible noise in the degrees `[t_i, deg]` of row `i`.
pub fn random_lift<R: Rng + ?Sized>(m: &UTKisinModule, witt: &WittRing, rng: &mut R) -> Result<UTKisinLift> {
    let polys = witt.polys();
    let e = witt.eisenstein();
    let p_scalar = witt.from_int(witt.field().p() as i64);
    let weights = m.weights();
    let d = m.dim();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let entry = m.a_phi().get(i, j);
            if i == j {
                let a_hat = witt.random_lift(entry.leading().copied().expect("diagonal"), rng);
                entries.push(polys.scale(&polys.pow(&e, weights[i]), &a_hat));
            } else if i > j || entry.is_zero() {
                entries.push(polys.zero());
            } else {
                let deg = entry.degree().expect("nonzero");
                let mut acc = polys.zero();
                for k in weights[i] as usize..=deg {
                    let c = entry.coeff_or(k, &FieldElem::ZERO);
                    let lifted = if c.is_zero() {
                        witt.mul(&p_scalar, &witt.random(rng))
                    } else {
                        witt.random_lift(c, rng)
                    };
                    acc = polys.add(&acc, &polys.scale(&polys.pow(&e, k as u32), &lifted));
                }
                entries.push(acc);
            }
        }
    }
    UTKisinLift::new(witt.clone(), Mat::from_flat(d, entries)?, m.height())
}

/// Weights for well-shaped modules: distinct, at most `p`, minimum `0`.
pub fn validate_weights(p: u32, t: &[u32]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::BadWeights("no weights".into()));
    }
    for (k, &x) in t.iter().enumerate() {
        if x > p {
            return Err(Error::BadWeights(format!("weight {x} exceeds p = {p}")));
        }
        if t[..k].contains(&x) {
            return Err(Error::BadWeights(format!("weight {x} repeated")));
        }
    }
    if !t.contains(&0) {
        return Err(Error::BadWeights("smallest weight must be 0".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    /// Upper bound on `deg(u^p·N_ij)`; `None` means `p + 1`.
    pub n_degree_bound: Option<usize>,
    /// Probability of copying `a_i` to `a_j` when `t_j - t_i = p - 1`.
    pub hom_bias: f64,
    /// Probability that an allowed `y_ij` is nonzero.
    pub y_density: f64,
    /// Probability that an allowed `N_ij` is nonzero.
    pub n_density: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { n_degree_bound: None, hom_bias: 0.6, y_density: 0.7, n_density: 0.8 }
    }
}

/// A module `A_φ = Ã_φ + u^p·N` in the shape forced on upper-triangular reductions:
/// `(Ã_φ)_ij = u^{t_i}·y_ij` with `y_ij = 0` when `t_j < t_i`, and `N` supported on Hom positions.
pub fn random_shaped_module(field: &Field, weights: &[u32], seed: u64, config: &GeneratorConfig) -> Result<UTKisinModule> {
    let p = field.p();
    validate_weights(p, weights)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = weights.len();
    let polys = PolyRing::new(field.clone());
    let bound = config.n_degree_bound.unwrap_or(p as usize + 1);

    let mut units: Vec<FieldElem> = (0..d).map(|_| field.random_nonzero(&mut rng)).collect();
    for j in 0..d {
        for i in 0..j {
            if weights[j] >= weights[i] && weights[j] - weights[i] == p - 1 && rng.gen_bool(config.hom_bias) {
                units[j] = units[i];
            }
        }
    }
    let diag: Vec<RankOneKisin> = weights.iter().zip(&units).map(|(&t, &a)| RankOneKisin { t, a }).collect();

    let mut a = polys.mat_identity(d);
    for i in 0..d {
        a.set(i, i, polys.monomial(units[i], weights[i] as usize));
        for j in i + 1..d {
            let mut entry = polys.zero();
            if weights[j] > weights[i] && rng.gen_bool(config.y_density) {
                entry = polys.monomial(field.random_nonzero(&mut rng), weights[i] as usize);
            }
            if hom_exists(p, &diag[j], &diag[i]).is_some() && rng.gen_bool(config.n_density) && bound >= p as usize {
                let top = rng.gen_range(p as usize..=bound);
                let mut n_coeffs: Vec<FieldElem> = (p as usize..=top).map(|_| field.random(&mut rng)).collect();
                *n_coeffs.last_mut().expect("nonempty") = field.random_nonzero(&mut rng);
                let n = polys.from_coeffs(n_coeffs);
                entry = polys.add(&entry, &polys.shift(&n, p as usize));
            }
            a.set(i, j, entry);
        }
    }
    let r = *weights.iter().max().expect("nonempty");
    UTKisinModule::new(field.clone(), a, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldParams;

    fn k5() -> Field {
        Field::prime(5).unwrap()
    }

    #[test]
    fn rank_one_height() {
        let k = k5();
        let polys = PolyRing::new(k.clone());
        let u = polys.monomial(k.one(), 1);
        let a = Mat::from_flat(1, vec![polys.monomial(k.from_int(3), 2)]).unwrap();
        let b = height_check(&polys, &a, &u, 4).unwrap().unwrap();
        assert_eq!(b.get(0, 0), &polys.monomial(k.from_int(2), 2));
        assert!(height_check(&polys, &a, &u, 1).unwrap().is_none());
    }

    #[test]
    fn two_by_two_height() {
        let k = k5();
        let polys = PolyRing::new(k.clone());
        let u = polys.monomial(k.one(), 1);
        let m = |e| polys.monomial(k.one(), e);
        let a = Mat::from_rows(vec![vec![m(2), m(2)], vec![polys.zero(), m(4)]]).unwrap();
        assert!(height_check(&polys, &a, &u, 5).unwrap().is_some());
        let singular = Mat::from_rows(vec![vec![m(2), m(2)], vec![polys.zero(), polys.zero()]]).unwrap();
        assert_eq!(height_check(&polys, &singular, &u, 5), Err(Error::SingularMatrix));
    }

    #[test]
    fn hom_criterion() {
        let k = k5();
        let a = k.from_int(2);
        let b = k.from_int(3);
        let m = |t, a| RankOneKisin::new(t, a).unwrap();
        assert_eq!(hom_exists(5, &m(4, a), &m(0, a)), Some(1));
        assert_eq!(hom_exists(5, &m(2, a), &m(2, a)), Some(0));
        assert_eq!(hom_exists(5, &m(4, a), &m(0, b)), None);
        assert_eq!(hom_exists(5, &m(0, a), &m(4, a)), None);
    }

    #[test]
    fn extra_term_degrees() {
        assert_eq!(extra_term_degree(5, 0, 4), Ok(5));
        assert_eq!(extra_term_degree(5, 1, 5), Ok(6));
        assert_eq!(extra_term_degree(3, 0, 2), Ok(3));
        assert_eq!(extra_term_degree(5, 0, 3), Err(Error::NoHom));
    }

    #[test]
    fn generator_respects_weights() {
        let k = k5();
        assert!(random_shaped_module(&k, &[1, 2], 0, &GeneratorConfig::default()).is_err());
        assert!(random_shaped_module(&k, &[0, 0], 0, &GeneratorConfig::default()).is_err());
        let m = random_shaped_module(&k, &[0], 7, &GeneratorConfig::default()).unwrap();
        assert_eq!(m.weights(), vec![0]);
        for seed in 0..20 {
            let m = random_shaped_module(&k, &[2, 0, 4], seed, &GeneratorConfig::default()).unwrap();
            assert!(m.a_phi().get(0, 1).is_zero());
            assert_eq!(m.height(), 4);
        }
    }

    #[test]
    fn lifts_reduce_back() {
        let k = Field::new(FieldParams::new(3, 2, vec![1, 0, 1]).unwrap());
        let witt = WittRing::new(k.clone(), 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..5 {
            let m = random_shaped_module(&k, &[0, 2, 3], seed, &GeneratorConfig::default()).unwrap();
            let lift = random_lift(&m, &witt, &mut rng).unwrap();
            assert_eq!(reduce_lift(&lift).unwrap(), m);
            let t = m.teichmuller_lift(&witt).unwrap();
            assert_eq!(reduce_lift(&t).unwrap(), m);
        }
    }
}
