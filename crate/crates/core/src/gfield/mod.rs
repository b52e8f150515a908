//! Finite-field tower arithmetic `F_p ⊂ F_q ⊂ F_{q^n}` and polynomials over
//! any field of the tower.

mod base;
pub mod poly;
mod tower;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::Result;

pub use base::BaseField;
pub use tower::{make_tower, FieldModel, FieldTower, GFElement};

/// Operations shared by every field in the tower.
pub trait Field: Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `DivisionByZero` for zero.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    /// Number of elements.
    fn order(&self) -> BigUint;
    fn characteristic(&self) -> u64;
    /// Uniformly random element.
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// The element with the given index; a bijection from `0..order` onto the
    /// field with index 0 the zero element.
    fn element(&self, index: &BigUint) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Square-and-multiply exponentiation.
    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    fn pow_u64(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        self.pow(a, &BigUint::from(e))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// All elements in index order; only sensible for small fields.
    fn elements(&self) -> Vec<Self::Elem> {
        let size: u64 = self.order().try_into().expect("field too large to enumerate");
        (0..size).map(|i| self.element(&BigUint::from(i))).collect()
    }
}
