//! Shape analysis of upper-triangular Frobenius matrices: the split `A_φ = Ã_φ + u^p·N`,
//! the closed set `C` of the weights, the sorting permutation `σ ∈ W_C`, and conjugation.
//!
//! Violations are collected as [`Diagnostic`]s rather than raised, so the same code
//! serves as generator self-check and as mutation-testing validator.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Field, FieldElem, Mat, PolyRing, PolySeries};
use crate::error::{Error, Result};
use crate::kisin::{height_check, UTKisinModule};
use crate::rootsys::{b_c_violations, conjugate_by_perm, first_below_diagonal, w_c_combinatorial, ClosedSet, Perm, Root};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagCode {
    NotUpperTriangular,
    BadDiagonal,
    HeightFailed,
    WeightsTied,
    WeightsOutOfRange,
    YNonzeroForbidden,
    YNotConstant,
    ResidueUnclassified,
    ExtraTermsExceed,
    PhiNotInBc,
    SigmaNotInWc,
    ConjugateNotUpper,
    ConjugateDiagMismatch,
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().expect("string"))
    }
}

/// One violation; `position` is 0-based internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl Diagnostic {
    fn at(code: DiagCode, i: usize, j: usize, message: String) -> Self {
        Self { code, position: Some((i, j)), message }
    }

    fn global(code: DiagCode, message: String) -> Self {
        Self { code, position: None, message }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((i, j)) => write!(f, "{} at ({}, {}): {}", self.code, i + 1, j + 1, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

/// How to split a term `c·u^{t_i}` of degree `≥ p` at a position where `y_ij` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitPolicy {
    /// The pattern coefficient `u^{t_i}·y_ij` takes it.
    #[default]
    PatternPriority,
    /// Refuse with [`Error::AmbiguousSplit`].
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub tilde_a_phi: Mat<PolySeries>,
    pub n_matrix: Mat<PolySeries>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Split `A_φ` into `Ã_φ + u^p·N` and check the pattern of `Ã_φ`.
pub fn decompose_phi(m: &UTKisinModule, policy: SplitPolicy) -> Result<Decomposition> {
    decompose_matrix(m.field(), m.a_phi(), &m.weights(), policy)
}

fn decompose_matrix(field: &Field, a: &Mat<PolySeries>, t: &[u32], policy: SplitPolicy) -> Result<Decomposition> {
    let polys = PolyRing::new(field.clone());
    let p = field.p() as usize;
    let d = a.dim();
    let mut tilde = a.clone();
    let mut n = polys.mat_identity(d).map(|_| polys.zero());
    let mut diagnostics = Vec::new();
    for i in 0..d {
        let ti = t[i] as usize;
        for j in i + 1..d {
            let tj = t[j] as usize;
            let entry = a.get(i, j);
            let mut keep = vec![FieldElem::ZERO; entry.len()];
            let mut extra = Vec::new();
            let mut flagged: Option<DiagCode> = None;
            for (m, &c) in entry.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if m == ti && tj > ti {
                    if m >= p && policy == SplitPolicy::Strict {
                        return Err(Error::AmbiguousSplit { row: i + 1, col: j + 1, degree: m });
                    }
                    keep[m] = c;
                } else if m >= p {
                    if extra.len() <= m - p {
                        extra.resize(m - p + 1, FieldElem::ZERO);
                    }
                    extra[m - p] = c;
                } else {
                    keep[m] = c;
                    let code = if tj == ti {
                        continue;
                    } else if m < ti {
                        DiagCode::ResidueUnclassified
                    } else if tj < ti {
                        DiagCode::YNonzeroForbidden
                    } else {
                        DiagCode::YNotConstant
                    };
                    flagged = Some(flagged.map_or(code, |f| f.min(code)));
                }
            }
            if let Some(code) = flagged {
                let message = match code {
                    DiagCode::YNonzeroForbidden => format!("y must vanish since t_j = {tj} < t_i = {ti}"),
                    DiagCode::YNotConstant => format!("y must be a constant times u^{ti}"),
                    _ => format!("term of degree below t_i = {ti} and below p"),
                };
                diagnostics.push(Diagnostic::at(code, i, j, message));
            }
            tilde.set(i, j, polys.from_coeffs(keep));
            n.set(i, j, polys.from_coeffs(extra));
        }
    }
    // at most two extra terms when the weights are distinct and lie in [0, p]
    let distinct = t.iter().collect::<HashSet<_>>().len() == d;
    if distinct && t.iter().all(|&x| x as usize <= p) {
        let count = n.entries().iter().filter(|e| !e.is_zero()).count();
        if count > 2 {
            diagnostics.push(Diagnostic::global(
                DiagCode::ExtraTermsExceed,
                format!("{count} nonzero entries in N, at most 2 expected"),
            ));
        }
    }
    Ok(Decomposition { tilde_a_phi: tilde, n_matrix: n, diagnostics })
}

/// `C = {ε_i − ε_j : i < j, t_i < t_j}`.
pub fn closed_set_from_weights(t: &[u32]) -> Result<ClosedSet> {
    check_distinct(t)?;
    let d = t.len();
    let mut roots = BTreeSet::new();
    for i in 0..d {
        for j in i + 1..d {
            if t[i] < t[j] {
                roots.insert(Root { i, j });
            }
        }
    }
    ClosedSet::new(d, roots).map_err(|e| Error::Invariant(format!("weight set not closed: {e}")))
}

fn check_distinct(t: &[u32]) -> Result<()> {
    for (k, x) in t.iter().enumerate() {
        if t[..k].contains(x) {
            return Err(Error::BadWeights(format!("weight {x} repeated")));
        }
    }
    Ok(())
}

/// The sorting permutation: `t_{σ(1)} < … < t_{σ(d)}`.
pub fn sorting_permutation(t: &[u32]) -> Result<Perm> {
    check_distinct(t)?;
    let mut idx: Vec<usize> = (0..t.len()).collect();
    idx.sort_by_key(|&k| t[k]);
    Perm::new(idx)
}

/// The unique `σ ∈ W_C` making `σ^{-1} A_φ σ` upper triangular with sorted diagonal.
pub fn find_sigma(t: &[u32]) -> Result<Perm> {
    let sigma = sorting_permutation(t)?;
    let c = closed_set_from_weights(t)?;
    let inv = sigma.inverse();
    if c.roots().iter().any(|r| inv.apply(r.i) >= inv.apply(r.j)) {
        return Err(Error::Invariant(format!("sorting permutation {sigma} not in W_C")));
    }
    Ok(sigma)
}

/// `σ^{-1} A_φ σ`, checked to be upper triangular with diagonal `a_{σ(k)}·u^{r_k}`.
pub fn conjugate_module(m: &UTKisinModule, sigma: &Perm) -> Result<Mat<PolySeries>> {
    let b = conjugate_by_perm(m.a_phi(), sigma);
    if let Some((i, j)) = first_below_diagonal(&b, |x| x.is_zero()) {
        return Err(Error::Invariant(format!("conjugated matrix has a nonzero entry at ({}, {})", i + 1, j + 1)));
    }
    if let Some(k) = diagonal_mismatch(m, sigma, &b) {
        return Err(Error::Invariant(format!("conjugated diagonal wrong at position {}", k + 1)));
    }
    Ok(b)
}

fn diagonal_mismatch(m: &UTKisinModule, sigma: &Perm, b: &Mat<PolySeries>) -> Option<usize> {
    let polys = m.polys();
    let diag = m.diagonal();
    let mut sorted: Vec<u32> = diag.iter().map(|x| x.t).collect();
    sorted.sort_unstable();
    (0..m.dim()).find(|&k| {
        let expected = polys.monomial(diag[sigma.apply(k)].a, sorted[k] as usize);
        b.get(k, k) != &expected
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub weights: Vec<u32>,
    pub units: Vec<FieldElem>,
    pub tilde_a_phi: Option<Mat<PolySeries>>,
    pub n_matrix: Option<Mat<PolySeries>>,
    pub closed_set: Option<ClosedSet>,
    pub sigma: Option<Perm>,
    pub conjugated_a_phi: Option<Mat<PolySeries>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ShapeReport {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn codes(&self) -> BTreeSet<DiagCode> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }
}

/// Run the whole pipeline on a validated module.
pub fn analyze(m: &UTKisinModule) -> ShapeReport {
    analyze_with(m, SplitPolicy::PatternPriority).expect("pattern priority never refuses a split")
}

pub fn analyze_with(m: &UTKisinModule, policy: SplitPolicy) -> Result<ShapeReport> {
    let t = m.weights();
    let p = m.field().p();
    let mut report = ShapeReport {
        weights: t.clone(),
        units: m.units(),
        tilde_a_phi: None,
        n_matrix: None,
        closed_set: None,
        sigma: None,
        conjugated_a_phi: None,
        diagnostics: Vec::new(),
    };
    if check_distinct(&t).is_err() {
        report.diagnostics.push(Diagnostic::global(DiagCode::WeightsTied, format!("weights {t:?} are not distinct")));
    }
    if t.iter().any(|&x| x > p) || t.iter().min() != Some(&0) {
        report
            .diagnostics
            .push(Diagnostic::global(DiagCode::WeightsOutOfRange, format!("weights {t:?} must lie in [0, {p}] with minimum 0")));
    }
    let dec = decompose_phi(m, policy)?;
    report.diagnostics.extend(dec.diagnostics.iter().cloned());
    report.tilde_a_phi = Some(dec.tilde_a_phi.clone());
    report.n_matrix = Some(dec.n_matrix);
    let (Ok(c), Ok(sigma)) = (closed_set_from_weights(&t), sorting_permutation(&t)) else {
        return Ok(report);
    };

    let flagged: HashSet<(usize, usize)> = report.diagnostics.iter().filter_map(|d| d.position).collect();
    for (i, j) in b_c_violations(&dec.tilde_a_phi, &c, |x| x.is_zero()) {
        if !flagged.contains(&(i, j)) {
            report.diagnostics.push(Diagnostic::at(DiagCode::PhiNotInBc, i, j, "entry outside B_C".into()));
        }
    }
    if !w_c_combinatorial(&c).contains(&sigma) {
        report.diagnostics.push(Diagnostic::global(DiagCode::SigmaNotInWc, format!("{sigma} not in W_C")));
    }
    let b = conjugate_by_perm(m.a_phi(), &sigma);
    if let Some((i, j)) = first_below_diagonal(&b, |x| x.is_zero()) {
        report.diagnostics.push(Diagnostic::at(
            DiagCode::ConjugateNotUpper,
            i,
            j,
            "conjugated Frobenius matrix is not upper triangular".into(),
        ));
    }
    if let Some(k) = diagonal_mismatch(m, &sigma, &b) {
        report
            .diagnostics
            .push(Diagnostic::at(DiagCode::ConjugateDiagMismatch, k, k, "diagonal is not the sorted diagonal".into()));
    }
    report.closed_set = Some(c);
    report.sigma = Some(sigma);
    report.conjugated_a_phi = Some(b);
    Ok(report)
}

/// Like [`analyze`], but starting from an unvalidated matrix so that structural
/// failures become diagnostics too.
pub fn analyze_raw(field: &Field, a: &Mat<PolySeries>, r: u32) -> ShapeReport {
    let polys = PolyRing::new(field.clone());
    let empty = |diagnostics| ShapeReport {
        weights: Vec::new(),
        units: Vec::new(),
        tilde_a_phi: None,
        n_matrix: None,
        closed_set: None,
        sigma: None,
        conjugated_a_phi: None,
        diagnostics,
    };
    let d = a.dim();
    let mut structural = Vec::new();
    for i in 0..d {
        for j in 0..i {
            if !a.get(i, j).is_zero() {
                structural.push(Diagnostic::at(DiagCode::NotUpperTriangular, i, j, "nonzero entry below the diagonal".into()));
            }
        }
        if polys.as_monomial(a.get(i, i)).is_none() {
            structural.push(Diagnostic::at(DiagCode::BadDiagonal, i, i, "diagonal entry is not a nonzero monomial".into()));
        }
    }
    if !structural.is_empty() {
        return empty(structural);
    }
    let e = polys.monomial(field.one(), 1);
    match height_check(&polys, a, &e, r) {
        Ok(Some(_)) => {}
        Ok(None) => return empty(vec![Diagnostic::global(DiagCode::HeightFailed, format!("no B with A·B = u^{r}·Id"))]),
        Err(err) => return empty(vec![Diagnostic::global(DiagCode::HeightFailed, err.to_string())]),
    }
    match UTKisinModule::new(field.clone(), a.clone(), r) {
        Ok(m) => analyze(&m),
        Err(err) => empty(vec![Diagnostic::global(DiagCode::HeightFailed, err.to_string())]),
    }
}

/// Ways to break a well-shaped module, for mutation testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Nonzero `y_ij` where `t_j < t_i`.
    ForbiddenY,
    /// A term `u^m` with `t_i < m < p` where `y_ij` must be constant.
    NonConstantY,
    /// A term `u^m` with `m < t_i` above the diagonal.
    Residue,
    /// Extra `u^p` terms on every above-diagonal position.
    ExtraTerms,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [Mutation::ForbiddenY, Mutation::NonConstantY, Mutation::Residue, Mutation::ExtraTerms];

    /// The diagnostic this mutation must trigger.
    pub fn expected_code(self) -> DiagCode {
        match self {
            Mutation::ForbiddenY => DiagCode::YNonzeroForbidden,
            Mutation::NonConstantY => DiagCode::YNotConstant,
            Mutation::Residue => DiagCode::ResidueUnclassified,
            Mutation::ExtraTerms => DiagCode::ExtraTermsExceed,
        }
    }
}

/// Apply `mutation` at a random eligible position; `None` if no position qualifies.
/// The height is raised to `Σ t_i`, which every upper-triangular matrix with this
/// diagonal satisfies, so the result stays a valid module.
pub fn mutate(m: &UTKisinModule, mutation: Mutation, seed: u64) -> Option<UTKisinModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = m.weights();
    let p = m.field().p() as usize;
    let d = m.dim();
    let polys = m.polys();
    let field = m.field();
    let mut a = m.a_phi().clone();
    let above: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let pick = |cands: Vec<(usize, usize, usize)>, rng: &mut ChaCha8Rng| -> Option<(usize, usize, usize)> {
        (!cands.is_empty()).then(|| cands[rng.gen_range(0..cands.len())])
    };
    match mutation {
        Mutation::ForbiddenY => {
            let cands = above.iter().filter(|&&(i, j)| t[j] < t[i] && (t[i] as usize) < p).map(|&(i, j)| (i, j, t[i] as usize)).collect();
            let (i, j, deg) = pick(cands, &mut rng)?;
            add_term(&polys, &mut a, i, j, field.random_nonzero(&mut rng), deg);
        }
        Mutation::NonConstantY => {
            let cands: Vec<_> = above
                .iter()
                .filter(|&&(i, j)| t[j] > t[i] && (t[i] as usize) + 1 < p)
                .map(|&(i, j)| (i, j, rng.gen_range(t[i] as usize + 1..p)))
                .collect();
            let (i, j, deg) = pick(cands, &mut rng)?;
            add_term(&polys, &mut a, i, j, field.random_nonzero(&mut rng), deg);
        }
        Mutation::Residue => {
            let cands: Vec<_> =
                above.iter().filter(|&&(i, _)| t[i] > 0).map(|&(i, j)| (i, j, rng.gen_range(0..t[i] as usize))).collect();
            let (i, j, deg) = pick(cands, &mut rng)?;
            add_term(&polys, &mut a, i, j, field.random_nonzero(&mut rng), deg);
        }
        Mutation::ExtraTerms => {
            if above.len() < 3 {
                return None;
            }
            for &(i, j) in &above {
                if a.get(i, j).coeffs().get(p).is_none_or(|c| c.is_zero()) {
                    add_term(&polys, &mut a, i, j, field.random_nonzero(&mut rng), p);
                }
            }
        }
    }
    let r = t.iter().sum::<u32>().max(m.height());
    UTKisinModule::new(field.clone(), a, r).ok()
}

fn add_term(polys: &PolyRing<Field>, a: &mut Mat<PolySeries>, i: usize, j: usize, c: FieldElem, deg: usize) {
    let entry = polys.add(a.get(i, j), &polys.monomial(c, deg));
    a.set(i, j, entry);
}
