//! Positive roots of `GL_d`, closed subsets, and the Weyl group as `S_d`.
//!
//! Indices are 0-based internally and 1-based in serialized form and messages.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Mat;
use crate::error::{Error, Result};

/// Largest `d` for exhaustive enumeration.
pub const MAX_ENUM_DIM: usize = 5;

/// The positive root `ε_i − ε_j`, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i >= j {
            return Err(Error::Input(format!("({}, {}) is not a positive root", i + 1, j + 1)));
        }
        Ok(Self { i, j })
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}-e{}", self.i + 1, self.j + 1)
    }
}

/// All positive roots of `GL_d` in lexicographic order.
pub fn positive_roots(d: usize) -> Vec<Root> {
    let mut out = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            out.push(Root { i, j });
        }
    }
    out
}

/// Whether `α, β ∈ C` and `α + β ∈ R^+` imply `α + β ∈ C`.
pub fn is_closed(d: usize, roots: &BTreeSet<Root>) -> bool {
    roots.iter().all(|r| r.j < d)
        && roots.iter().all(|a| {
            roots.iter().filter(|b| b.i == a.j).all(|b| roots.contains(&Root { i: a.i, j: b.j }))
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ClosedSetDoc", into = "ClosedSetDoc")]
pub struct ClosedSet {
    d: usize,
    roots: BTreeSet<Root>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClosedSetDoc {
    d: usize,
    roots: Vec<[usize; 2]>,
}

impl TryFrom<ClosedSetDoc> for ClosedSet {
    type Error = Error;

    fn try_from(doc: ClosedSetDoc) -> Result<Self> {
        let roots = doc
            .roots
            .iter()
            .map(|&[i, j]| {
                if i == 0 || j == 0 {
                    return Err(Error::Input("root indices are 1-based".into()));
                }
                Root::new(i - 1, j - 1)
            })
            .collect::<Result<BTreeSet<_>>>()?;
        ClosedSet::new(doc.d, roots)
    }
}

impl From<ClosedSet> for ClosedSetDoc {
    fn from(c: ClosedSet) -> Self {
        ClosedSetDoc { d: c.d, roots: c.roots.iter().map(|r| [r.i + 1, r.j + 1]).collect() }
    }
}

impl ClosedSet {
    pub fn new(d: usize, roots: BTreeSet<Root>) -> Result<Self> {
        if let Some(r) = roots.iter().find(|r| r.j >= d) {
            return Err(Error::Input(format!("root {r} out of range for d = {d}")));
        }
        if !is_closed(d, &roots) {
            return Err(Error::PreconditionFailed("root set is not closed".into()));
        }
        Ok(Self { d, roots })
    }

    pub fn empty(d: usize) -> Self {
        Self { d, roots: BTreeSet::new() }
    }

    /// All of `R^+`.
    pub fn full(d: usize) -> Self {
        Self { d, roots: positive_roots(d).into_iter().collect() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn roots(&self) -> &BTreeSet<Root> {
        &self.roots
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.roots.contains(&Root { i, j })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Above-diagonal positions outside `C`.
    pub fn complement(&self) -> BTreeSet<(usize, usize)> {
        positive_roots(self.d).into_iter().filter(|r| !self.roots.contains(r)).map(|r| (r.i, r.j)).collect()
    }
}

/// Every closed subset of `R^+`, ordered by the bitmask over [`positive_roots`].
pub fn enumerate_closed_sets(d: usize) -> Result<Vec<ClosedSet>> {
    if d > MAX_ENUM_DIM {
        return Err(Error::DimensionTooLarge(d, MAX_ENUM_DIM));
    }
    let all = positive_roots(d);
    let mut out = Vec::new();
    for mask in 0u32..(1 << all.len()) {
        let roots: BTreeSet<Root> =
            all.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &r)| r).collect();
        if is_closed(d, &roots) {
            out.push(ClosedSet { d, roots });
        }
    }
    Ok(out)
}

/// A permutation `σ` of `{0, …, d-1}` stored as its images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;

    fn try_from(one_based: Vec<usize>) -> Result<Self> {
        Perm::from_one_based(&one_based)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Self {
        p.to_one_based()
    }
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            if x >= d || seen[x] {
                return Err(Error::Input(format!("{:?} is not a permutation", images)));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Input("permutation images are 1-based".into()));
        }
        Self::new(images.iter().map(|&x| x - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x + 1).collect()
    }

    pub fn identity(d: usize) -> Self {
        Self { images: (0..d).collect() }
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `σ(i)`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Self {
        Self { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// All of `S_d` in lexicographic order of the image tuple.
    pub fn all(d: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..d).collect();
        loop {
            out.push(Perm { images: cur.clone() });
            // next lexicographic permutation
            let Some(k) = (0..d.saturating_sub(1)).rev().find(|&k| cur[k] < cur[k + 1]) else {
                return out;
            };
            let l = (k + 1..d).rev().find(|&l| cur[k] < cur[l]).expect("successor exists");
            cur.swap(k, l);
            cur[k + 1..].reverse();
        }
    }

    /// The permutation matrix `w_σ = (δ_{i,σ(j)})` with entries `0` and `1`.
    pub fn matrix(&self) -> Mat<u32> {
        Mat::from_fn(self.dim(), |i, j| u32::from(i == self.images[j]))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_one_based().iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `w_σ^{-1} A w_σ`, i.e. `result[i][j] = A[σ(i)][σ(j)]`, by index remapping.
pub fn conjugate_by_perm<T: Clone>(a: &Mat<T>, sigma: &Perm) -> Mat<T> {
    Mat::from_fn(a.dim(), |i, j| a.get(sigma.apply(i), sigma.apply(j)).clone())
}

/// First nonzero entry strictly below the diagonal.
pub fn first_below_diagonal<T>(a: &Mat<T>, is_zero: impl Fn(&T) -> bool) -> Option<(usize, usize)> {
    let d = a.dim();
    (0..d).flat_map(|i| (0..i).map(move |j| (i, j))).find(|&(i, j)| !is_zero(a.get(i, j)))
}

pub fn is_upper_triangular<T>(a: &Mat<T>, is_zero: impl Fn(&T) -> bool) -> bool {
    first_below_diagonal(a, is_zero).is_none()
}

/// Membership in `B_C`: upper triangular, with nonzero above-diagonal entries only on `C`.
pub fn b_c_member<T>(a: &Mat<T>, c: &ClosedSet, is_zero: impl Fn(&T) -> bool) -> bool {
    b_c_violations(a, c, is_zero).is_empty()
}

/// Nonzero positions (off the diagonal) that `B_C` forbids.
pub fn b_c_violations<T>(a: &Mat<T>, c: &ClosedSet, is_zero: impl Fn(&T) -> bool) -> Vec<(usize, usize)> {
    let d = a.dim();
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i == j || is_zero(a.get(i, j)) {
                continue;
            }
            if i > j || !c.contains(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// `W_C = {σ : σ^{-1}(C) ⊆ R^+}`.
pub fn w_c_combinatorial(c: &ClosedSet) -> Vec<Perm> {
    Perm::all(c.dim())
        .into_iter()
        .filter(|sigma| {
            let inv = sigma.inverse();
            c.roots().iter().all(|r| inv.apply(r.i) < inv.apply(r.j))
        })
        .collect()
}

/// `{σ : w_σ^{-1} B_C w_σ ⊆ B}`, by conjugating a marker matrix whose support is
/// the diagonal plus `C` and testing upper triangularity.
pub fn w_c_conjugation(c: &ClosedSet) -> Result<Vec<Perm>> {
    let d = c.dim();
    if d > MAX_ENUM_DIM {
        return Err(Error::DimensionTooLarge(d, MAX_ENUM_DIM));
    }
    let marker = Mat::from_fn(d, |i, j| i == j || c.contains(i, j));
    Ok(Perm::all(d)
        .into_iter()
        .filter(|sigma| is_upper_triangular(&conjugate_by_perm(&marker, sigma), |&m| !m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(usize, usize)]) -> BTreeSet<Root> {
        pairs.iter().map(|&(i, j)| Root::new(i - 1, j - 1).unwrap()).collect()
    }

    #[test]
    fn closedness() {
        assert!(is_closed(3, &set(&[(1, 2), (2, 3), (1, 3)])));
        assert!(!is_closed(3, &set(&[(1, 2), (2, 3)])));
        assert!(is_closed(3, &set(&[(1, 3), (2, 3)])));
    }

    #[test]
    fn closed_set_counts() {
        assert_eq!(enumerate_closed_sets(2).unwrap().len(), 2);
        assert_eq!(enumerate_closed_sets(3).unwrap().len(), 7);
        assert_eq!(enumerate_closed_sets(6), Err(Error::DimensionTooLarge(6, 5)));
    }

    #[test]
    fn permutations_enumerate_s_d() {
        assert_eq!(Perm::all(1).len(), 1);
        assert_eq!(Perm::all(4).len(), 24);
        let s = Perm::from_one_based(&[2, 3, 1]).unwrap();
        assert!(s.compose(&s.inverse()).is_identity());
        assert_eq!(s.to_string(), "(2,3,1)");
    }

    #[test]
    fn weyl_subgroup_examples() {
        let c = ClosedSet::new(3, set(&[(1, 3), (2, 3)])).unwrap();
        let w = w_c_combinatorial(&c);
        assert!(w.contains(&Perm::from_one_based(&[2, 1, 3]).unwrap()));
        assert_eq!(w, w_c_conjugation(&c).unwrap());
        let full2 = ClosedSet::full(2);
        assert_eq!(w_c_combinatorial(&full2), vec![Perm::identity(2)]);
        assert_eq!(w_c_combinatorial(&ClosedSet::empty(3)).len(), 6);
    }

    #[test]
    fn conjugation_by_transposition() {
        let a = Mat::from_rows(vec![vec![1, 2], vec![3, 4]]).unwrap();
        let s = Perm::from_one_based(&[2, 1]).unwrap();
        let b = conjugate_by_perm(&a, &s);
        assert_eq!(*b.get(0, 0), 4);
        assert_eq!(*b.get(0, 1), 3);
    }

    #[test]
    fn b_c_membership() {
        let c = ClosedSet::new(3, set(&[(1, 3), (2, 3)])).unwrap();
        let mut a = Mat::from_fn(3, |i, j| u32::from(i == j));
        assert!(b_c_member(&a, &c, |&x| x == 0));
        a.set(0, 2, 5);
        assert!(b_c_member(&a, &c, |&x| x == 0));
        a.set(0, 1, 1);
        assert!(!b_c_member(&a, &c, |&x| x == 0));
    }

    #[test]
    fn serde_is_one_based() {
        let c = ClosedSet::new(3, set(&[(1, 3)])).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"d":3,"roots":[[1,3]]}"#);
        let back: ClosedSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<ClosedSet>(r#"{"d":3,"roots":[[1,2],[2,3]]}"#).is_err());
        let p: Perm = serde_json::from_str("[2,1,3]").unwrap();
        assert_eq!(p.images(), &[1, 0, 2]);
    }
}
