use std::fmt::Debug;

use super::field::{Field, FieldElem};

/// Commutative coefficient ring with a zero test and partial inversion.
pub trait CoeffRing: Clone + Debug {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Inverse if `a` is a unit.
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// The image of `p` (the characteristic of the residue field).
    fn from_int(&self, n: i64) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

impl CoeffRing for Field {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Field::add(self, *a, *b)
    }

    fn neg(&self, a: &FieldElem) -> FieldElem {
        Field::neg(self, *a)
    }

    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Field::mul(self, *a, *b)
    }

    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }

    fn unit_inverse(&self, a: &FieldElem) -> Option<FieldElem> {
        self.inv(*a).ok()
    }

    fn from_int(&self, n: i64) -> FieldElem {
        Field::from_int(self, n)
    }

    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Field::sub(self, *a, *b)
    }
}
