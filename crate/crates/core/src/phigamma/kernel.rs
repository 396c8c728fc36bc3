//! Brute-force oracle: solve `M·τ(φ(F)) = φ(F)·φ(M)` for `M ∈ Id + x·Mat(k_E[x]/x^N)`
//! coefficient by coefficient, as an affine system over `k_E`.
//!
//! Entries are handled in order of increasing `j − i`. For a fixed entry the unknown
//! `m_ij` only enters through `m_ij·τφ(f_jj) − φ(f_ii)·φ(m_ij)`; everything else is already
//! an affine form in the free parameters introduced so far.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;

use super::{Engine, TauMatrix, VanishingReport};
use crate::algebra::{Field, FieldElem, Mat, PolySeries, RamRing};
use crate::error::{Error, Result};

/// `2p(p−1)·t_max + 2p(t_max + 1)`.
pub fn default_kernel_precision(p: u32, t_max: u32) -> usize {
    let (p, t) = (p as usize, t_max as usize);
    2 * p * (p - 1) * t + 2 * p * (t + 1)
}

#[derive(Debug, Clone)]
pub struct KernelConfig {
    /// Starting precision; the default comes from [`default_kernel_precision`].
    pub precision: Option<usize>,
    /// Cap on the number of scalar unknowns `d(d+1)/2·(N−1)`.
    pub max_unknowns: usize,
    /// How many doublings of `N` to try before giving up on stability.
    pub max_doublings: u32,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { precision: None, max_unknowns: 60_000, max_doublings: 2 }
    }
}

/// Affine form `c_0 + Σ c_i λ_i`; missing trailing entries are zero.
type Aff = Vec<FieldElem>;

fn axpy(k: &Field, dst: &mut Aff, c: FieldElem, src: &[FieldElem]) {
    if c.is_zero() {
        return;
    }
    if dst.len() < src.len() {
        dst.resize(src.len(), FieldElem::ZERO);
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = k.add(*d, k.mul(c, *s));
        }
    }
}

fn highest(a: &[FieldElem]) -> Option<usize> {
    a.iter().rposition(|x| !x.is_zero())
}

/// Echelon basis of the parameter constraints, keyed by highest nonzero index.
#[derive(Debug, Clone, Default)]
struct Constraints {
    rows: BTreeMap<usize, Aff>,
    inconsistent: bool,
}

impl Constraints {
    fn reduce(&self, k: &Field, mut v: Aff) -> Aff {
        while let Some(h) = highest(&v) {
            match self.rows.get(&h) {
                Some(row) => {
                    let c = k.neg(v[h]);
                    axpy(k, &mut v, c, row);
                }
                None => break,
            }
        }
        v
    }

    fn insert(&mut self, k: &Field, v: Aff) {
        let v = self.reduce(k, v);
        if let Some(h) = highest(&v) {
            let inv = k.inv(v[h]).expect("leading coefficient is nonzero");
            let v = v.iter().map(|&x| k.mul(inv, x)).collect();
            if h == 0 {
                self.inconsistent = true;
            }
            self.rows.insert(h, v);
        }
    }
}

/// One scalar equation `Σ c·m_col = rhs`, columns ascending.
#[derive(Debug, Clone)]
struct Row {
    cols: Vec<(usize, FieldElem)>,
    rhs: Aff,
}

impl Row {
    /// `self − c·other`.
    fn sub_scaled(&self, k: &Field, c: FieldElem, other: &Row) -> Row {
        let mut cols = Vec::with_capacity(self.cols.len() + other.cols.len());
        let (mut a, mut b) = (self.cols.iter().peekable(), other.cols.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(&&x), None) => {
                    a.next();
                    x
                }
                (None, Some(&&(col, y))) => {
                    b.next();
                    (col, k.neg(k.mul(c, y)))
                }
                (Some(&&(ca, x)), Some(&&(cb, y))) => {
                    if ca < cb {
                        a.next();
                        (ca, x)
                    } else if cb < ca {
                        b.next();
                        (cb, k.neg(k.mul(c, y)))
                    } else {
                        a.next();
                        b.next();
                        (ca, k.sub(x, k.mul(c, y)))
                    }
                }
            };
            if !next.1.is_zero() {
                cols.push(next);
            }
        }
        let mut rhs = self.rhs.clone();
        axpy(k, &mut rhs, k.neg(c), &other.rhs);
        Row { cols, rhs }
    }
}

/// The solved system: every coefficient of `M` as an affine form in free parameters.
#[derive(Debug, Clone)]
pub struct KernelSystem {
    ring: RamRing,
    d: usize,
    values: Vec<Vec<Aff>>,
    relevant: Vec<Vec<bool>>,
    constraints: Constraints,
    params: usize,
}

impl KernelSystem {
    pub fn precision(&self) -> usize {
        self.ring.n()
    }

    pub fn parameter_count(&self) -> usize {
        self.params
    }

    pub fn is_consistent(&self) -> bool {
        !self.constraints.inconsistent
    }

    /// Above-diagonal positions whose determined coefficients vanish on every solution.
    pub fn forced_zero_positions(&self) -> BTreeSet<(usize, usize)> {
        let k = self.ring.field();
        let d = self.d;
        let mut out = BTreeSet::new();
        for i in 0..d {
            for j in i + 1..d {
                let idx = i * d + j;
                let vanishes = self.values[idx]
                    .iter()
                    .zip(&self.relevant[idx])
                    .filter(|(_, &rel)| rel)
                    .all(|(v, _)| highest(&self.constraints.reduce(k, v.clone())).is_none());
                if vanishes {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    /// A random solution, entries truncated at `N`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TauMatrix> {
        if !self.is_consistent() {
            return Err(Error::NoSolution);
        }
        let k = self.ring.field();
        let mut lambda = vec![k.one()];
        for h in 1..=self.params {
            let value = match self.constraints.rows.get(&h) {
                Some(row) => {
                    let s = (0..h).fold(k.zero(), |acc, idx| {
                        k.add(acc, k.mul(row.get(idx).copied().unwrap_or(FieldElem::ZERO), lambda[idx]))
                    });
                    k.neg(s)
                }
                // the system is F_p-linear, not k_E-linear, once f > 1
                None => k.from_int(rng.gen_range(0..k.p()) as i64),
            };
            lambda.push(value);
        }
        let n = self.ring.n();
        let d = self.d;
        let entries = Mat::from_fn(d, |i, j| {
            if i > j {
                return self.ring.zero();
            }
            let coeffs = self.values[i * d + j]
                .iter()
                .map(|aff| aff.iter().zip(&lambda).fold(k.zero(), |acc, (&c, &l)| k.add(acc, k.mul(c, l))))
                .collect();
            self.ring.truncated(coeffs, n)
        });
        Ok(TauMatrix::new(entries))
    }
}

fn diagonal_weights(f: &Mat<PolySeries>) -> Result<Vec<u32>> {
    (0..f.dim())
        .map(|i| {
            let e = f.get(i, i);
            let deg = e.degree().ok_or(Error::BadDiagonal(i + 1))?;
            if e.coeffs()[..deg].iter().any(|c| !c.is_zero()) {
                return Err(Error::BadDiagonal(i + 1));
            }
            Ok(deg as u32)
        })
        .collect()
}

/// Solve at the precision of `ring`.
pub fn kernel_solve(ring: &RamRing, f: &Mat<PolySeries>, config: &KernelConfig) -> Result<KernelSystem> {
    let d = f.dim();
    if d > 3 {
        return Err(Error::DimensionTooLarge(d, 3));
    }
    let k = ring.field().clone();
    let n = ring.n();
    let p = ring.p();
    let t = diagonal_weights(f)?;
    let t_max = t.iter().copied().max().unwrap_or(0) as usize;
    let s_max = p * (p - 1) * t_max;
    if n <= s_max + p * t_max + 1 {
        return Err(Error::InsufficientPrecision { needed: s_max + p * t_max + 2, have: n });
    }
    if k.degree() > 1 && f.entries().iter().any(|e| e.coeffs().iter().any(|&c| !k.in_prime_field(c))) {
        return Err(Error::PreconditionFailed("kernel oracle over k_E != F_p needs F_p coefficients".into()));
    }
    let unknowns = d * (d + 1) / 2 * (n - 1);
    if unknowns > config.max_unknowns {
        return Err(Error::BudgetExceeded(unknowns, config.max_unknowns));
    }

    // P = φ(f), T = τ(φ(f)) as sparse term lists below N
    let mut phi_terms = vec![Vec::new(); d * d];
    let mut tau_terms = vec![Vec::new(); d * d];
    for i in 0..d {
        for j in i..d {
            let entry = f.get(i, j);
            if entry.is_zero() {
                continue;
            }
            let phi = ring.phi(&ring.from_poly(entry));
            tau_terms[i * d + j] = ring.tau(&phi).terms().filter(|&(e, _)| e < n).collect::<Vec<_>>();
            phi_terms[i * d + j] = phi.terms().filter(|&(e, _)| e < n).collect::<Vec<_>>();
        }
    }
    let lowest = |terms: &Vec<(usize, FieldElem)>| terms.first().map_or(usize::MAX, |&(e, _)| e);

    let mut values: Vec<Vec<Aff>> = vec![Vec::new(); d * d];
    let mut relevant: Vec<Vec<bool>> = vec![Vec::new(); d * d];
    let mut constraints = Constraints::default();
    let mut params = 0usize;

    for gap in 0..d {
        for i in 0..d - gap {
            let j = i + gap;
            let mut rhs: Vec<Aff> = vec![Vec::new(); n];
            for mid in i + 1..=j {
                for &(e, c) in &phi_terms[i * d + mid] {
                    for (q, aff) in values[mid * d + j].iter().enumerate() {
                        let at = e + p * q;
                        if at >= n {
                            break;
                        }
                        axpy(&k, &mut rhs[at], c, aff);
                    }
                }
            }
            for mid in i..j {
                for &(e, c) in &tau_terms[mid * d + j] {
                    let c = k.neg(c);
                    for (q, aff) in values[i * d + mid].iter().enumerate().take(n.saturating_sub(e)) {
                        axpy(&k, &mut rhs[e + q], c, aff);
                    }
                }
            }
            let t_jj = &tau_terms[j * d + j];
            let p_ii = &phi_terms[i * d + i];
            if i == j {
                // the constant coefficient of m_ii is 1
                for &(e, c) in t_jj {
                    axpy(&k, &mut rhs[e], k.neg(c), &[k.one()]);
                }
                for &(e, c) in p_ii {
                    axpy(&k, &mut rhs[e], c, &[k.one()]);
                }
            }

            let mut pivots: HashMap<usize, Row> = HashMap::new();
            for (q, r) in rhs.into_iter().enumerate() {
                let mut cols: BTreeMap<usize, FieldElem> = BTreeMap::new();
                for &(e, c) in t_jj {
                    if q > e {
                        let slot = cols.entry(q - e).or_insert(FieldElem::ZERO);
                        *slot = k.add(*slot, c);
                    }
                }
                for &(e, c) in p_ii {
                    if q > e && (q - e) % p == 0 {
                        let slot = cols.entry((q - e) / p).or_insert(FieldElem::ZERO);
                        *slot = k.sub(*slot, c);
                    }
                }
                let mut row = Row { cols: cols.into_iter().filter(|(_, c)| !c.is_zero()).collect(), rhs: r };
                loop {
                    let Some(&(h, c)) = row.cols.last() else {
                        // 0 = rhs
                        constraints.insert(&k, row.rhs);
                        break;
                    };
                    match pivots.get(&h) {
                        Some(piv) => row = row.sub_scaled(&k, c, piv),
                        None => {
                            let inv = k.inv(c)?;
                            row.cols.iter_mut().for_each(|(_, x)| *x = k.mul(*x, inv));
                            row.rhs.iter_mut().for_each(|x| *x = k.mul(*x, inv));
                            pivots.insert(h, row);
                            break;
                        }
                    }
                }
            }

            // a coefficient is relevant when it reaches some equation below N
            let reach_left = (j..d).map(|jj| lowest(&tau_terms[j * d + jj])).min().unwrap_or(usize::MAX);
            let reach_right = (0..=i).map(|ii| lowest(&phi_terms[ii * d + i])).min().unwrap_or(usize::MAX);
            let mut vals: Vec<Aff> = Vec::with_capacity(n);
            let mut rel = Vec::with_capacity(n);
            vals.push(if i == j { vec![k.one()] } else { Vec::new() });
            rel.push(false);
            for col in 1..n {
                let is_rel = col.saturating_add(reach_left) < n || (p * col).saturating_add(reach_right) < n;
                let v = match pivots.get(&col) {
                    Some(row) => {
                        let mut v = row.rhs.clone();
                        for &(c2, coef) in &row.cols {
                            if c2 != col {
                                axpy(&k, &mut v, k.neg(coef), &vals[c2]);
                            }
                        }
                        v
                    }
                    None if is_rel => {
                        params += 1;
                        let mut v = vec![FieldElem::ZERO; params + 1];
                        v[params] = k.one();
                        v
                    }
                    None => Vec::new(),
                };
                vals.push(v);
                rel.push(is_rel);
            }
            values[i * d + j] = vals;
            relevant[i * d + j] = rel;
        }
    }
    Ok(KernelSystem { ring: ring.clone(), d, values, relevant, constraints, params })
}

/// Forced zeros of every solution `M`, stable under doubling `N`.
pub fn kernel_oracle(ring: &RamRing, f: &Mat<PolySeries>, config: &KernelConfig) -> Result<VanishingReport> {
    let t = diagonal_weights(f)?;
    let t_max = t.iter().copied().max().unwrap_or(0);
    let mut n = config.precision.unwrap_or_else(|| default_kernel_precision(ring.p() as u32, t_max));
    let mut previous: Option<BTreeSet<(usize, usize)>> = None;
    for _ in 0..=config.max_doublings + 1 {
        let system = kernel_solve(&ring.with_precision(n)?, f, config)?;
        if !system.is_consistent() {
            return Err(Error::NoSolution);
        }
        let forced = system.forced_zero_positions();
        if previous.as_ref() == Some(&forced) {
            return Ok(VanishingReport { engine: Engine::Kernel, forced_zero_positions: forced, precision_used: Some(n) });
        }
        previous = Some(forced);
        n *= 2;
    }
    Err(Error::InsufficientPrecision { needed: n, have: n / 2 })
}
