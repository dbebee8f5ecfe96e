//! Exact arithmetic in the cyclotomic field `Q(ζ_L)`.
//!
//! Elements are stored as `Σ_k c_k ζ^k` for `k < L` with rational `c_k`,
//! i.e. in the group ring `Q[x]/(x^L - 1)`. That representation is not
//! unique (`1 + ζ + … + ζ^(L-1) = 0` for prime `L`), so equality and zero
//! tests reduce modulo the cyclotomic polynomial `Φ_L` first.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: usize,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(v: i64) -> Self {
        Self {
            order: 1,
            coeffs: vec![BigRational::from_integer(BigInt::from(v))],
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self {
            order: 1,
            coeffs: vec![BigRational::new(BigInt::from(num), BigInt::from(den))],
        }
    }

    /// `ζ_order^power`, with the exponent taken modulo `order`.
    pub fn root_of_unity(order: usize, power: i64) -> Self {
        assert!(order > 0, "root of unity of order zero");
        let mut coeffs = vec![BigRational::zero(); order];
        coeffs[power.rem_euclid(order as i64) as usize] = BigRational::one();
        Self { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Re-expresses the element over `ζ_target`; `target` must be a multiple
    /// of the current order.
    fn lifted(&self, target: usize) -> Self {
        debug_assert_eq!(target % self.order, 0);
        if target == self.order {
            return self.clone();
        }
        let step = target / self.order;
        let mut coeffs = vec![BigRational::zero(); target];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * step] = c.clone();
        }
        Self {
            order: target,
            coeffs,
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let l = lcm(a.order, b.order);
        (a.lifted(l), b.lifted(l))
    }

    /// Canonical coordinates: remainder modulo `Φ_order`.
    pub fn canonical(&self) -> Vec<BigRational> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for top in (deg..rem.len()).rev() {
            let lead = rem[top].clone();
            if lead.is_zero() {
                continue;
            }
            // Φ is monic: subtract lead · x^(top-deg) · Φ
            for (i, p) in phi.iter().enumerate() {
                if *p != 0 {
                    let idx = top - deg + i;
                    rem[idx] = &rem[idx] - &lead * BigRational::from_integer(BigInt::from(*p));
                }
            }
        }
        rem.truncate(deg);
        rem
    }

    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(Zero::is_zero) {
            return true;
        }
        self.canonical().iter().all(Zero::is_zero)
    }

    pub fn to_complex(&self) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let x = c.to_f64().expect("finite rational");
                C64::from_polar(x, TAU * k as f64 / self.order as f64)
            })
            .sum()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .canonical()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})ζ{}", self.order),
                _ => format!("({c})ζ{}^{k}", self.order),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Add<&Cyclotomic> for &Cyclotomic {
    type Output = Cyclotomic;

    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = Cyclotomic::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        *self = &*self + rhs;
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub<&Cyclotomic> for &Cyclotomic {
    type Output = Cyclotomic;

    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Mul<&Cyclotomic> for &Cyclotomic {
    type Output = Cyclotomic;

    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(self, rhs);
        let l = a.order;
        let mut coeffs = vec![BigRational::zero(); l];
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                coeffs[(i + j) % l] += x * y;
            }
        }
        Cyclotomic { order: l, coeffs }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: usize) -> Vec<i64> {
    // x^n - 1 = Π_{d | n} Φ_d
    let mut poly = vec![0i64; n + 1];
    poly[0] = -1;
    poly[n] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        poly = exact_divide(&poly, &cyclotomic_polynomial(d));
    }
    poly
}

/// Quotient of integer polynomials by a monic divisor (remainder must be 0).
fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for top in (dn..num.len()).rev() {
        let q = rem[top];
        quot[top - dn] = q;
        for (i, &c) in den.iter().enumerate() {
            rem[top - dn + i] -= q * c;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(5), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for n in 2..=12 {
            let mut s = Cyclotomic::zero();
            for k in 0..n {
                s += &Cyclotomic::root_of_unity(n, k as i64);
            }
            assert!(s.is_zero(), "n = {n}: {s}");
        }
    }

    #[test]
    fn power_wraps_around() {
        let w = Cyclotomic::root_of_unity(3, 1);
        let cube = &(&w * &w) * &w;
        assert_eq!(cube, Cyclotomic::one());
        assert_eq!(Cyclotomic::root_of_unity(4, 2), Cyclotomic::from_integer(-1));
        assert_eq!(Cyclotomic::root_of_unity(6, 2), Cyclotomic::root_of_unity(3, 1));
    }

    #[test]
    fn mixed_orders_combine() {
        let i = Cyclotomic::root_of_unity(4, 1);
        let w = Cyclotomic::root_of_unity(3, 1);
        let prod = &i * &w;
        assert_eq!(prod.order(), 12);
        let expected = C64::from_polar(1.0, TAU / 4.0 + TAU / 3.0);
        assert!((prod.to_complex() - expected).norm() < 1e-14);
    }

    #[test]
    fn nonzero_detected() {
        let x = &Cyclotomic::root_of_unity(5, 1) - &Cyclotomic::root_of_unity(5, 2);
        assert!(!x.is_zero());
        assert!(!Cyclotomic::from_ratio(1, 3).is_zero());
    }
}
