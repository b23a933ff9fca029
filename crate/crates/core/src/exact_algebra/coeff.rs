//! The coefficient rings used by the series types: ℚ and ℚ(ζ_n).

use super::cyclotomic::Cyclotomic;
use super::rational::Q;
use num_traits::{One, Zero};
use std::fmt::Debug;

pub trait Coeff: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_q(x: Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, x: &Q) -> Self;
    fn inverse(&self) -> Option<Self>;
    /// Rational value if the element lies in ℚ.
    fn rational(&self) -> Option<Q>;
    fn to_cyclotomic(&self) -> Cyclotomic;

    fn add_assign(&mut self, o: &Self) {
        *self = self.add(o);
    }
}

impl Coeff for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_q(x: Q) -> Self {
        x
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, x: &Q) -> Self {
        self * x
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn rational(&self) -> Option<Q> {
        Some(self.clone())
    }
    fn to_cyclotomic(&self) -> Cyclotomic {
        Cyclotomic::from_q(self.clone())
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
}

impl Coeff for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn from_q(x: Q) -> Self {
        Cyclotomic::from_q(x)
    }
    fn add(&self, o: &Self) -> Self {
        Cyclotomic::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Cyclotomic::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Cyclotomic::mul(self, o)
    }
    fn neg(&self) -> Self {
        Cyclotomic::neg(self)
    }
    fn scale(&self, x: &Q) -> Self {
        Cyclotomic::scale(self, x)
    }
    fn inverse(&self) -> Option<Self> {
        Cyclotomic::inverse(self)
    }
    fn rational(&self) -> Option<Q> {
        self.to_rational()
    }
    fn to_cyclotomic(&self) -> Cyclotomic {
        self.clone()
    }
}
