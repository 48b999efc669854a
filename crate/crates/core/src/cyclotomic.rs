//! Exact arithmetic in Z[ζ_M].
//!
//! A [`CycloValue`] of order M stores the coordinates of an element of
//! Z[x]/(Φ_M(x)) in the power basis 1, ζ, …, ζ^{φ(M)−1}. Values of different
//! orders are lifted to the lcm before they are combined, so equality is exact
//! and independent of the order a value happens to be stored at.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{divisors, euler_phi, gcd, lcm, mobius};
use crate::error::{Error, Result};

static PHI_CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Φ_M as coefficients (constant term first), by exact division of x^M − 1.
pub fn cyclotomic_modulus(m: u64) -> Vec<i64> {
    phi(m).as_ref().clone()
}

pub(crate) fn phi(m: u64) -> Arc<Vec<i64>> {
    assert!(m >= 1, "cyclotomic order must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m) {
        if d == m {
            continue;
        }
        num = exact_div_monic(&num, &phi(d));
    }
    let arc = Arc::new(num);
    phi_cache().lock().unwrap().insert(m, arc.clone());
    arc
}

fn exact_div_monic(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    let dq = a.len() - 1 - db;
    let mut quo = vec![0i64; dq + 1];
    for i in (0..=dq).rev() {
        let c = rem[i + db];
        quo[i] = c;
        if c != 0 {
            for j in 0..=db {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(b[j]).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quo
}

/// Fold exponents modulo m and divide by Φ_m, in i128 with overflow detection.
fn reduce_i128(m: u64, mut v: Vec<i128>) -> Option<Vec<i128>> {
    let m_us = m as usize;
    if v.len() > m_us {
        for i in m_us..v.len() {
            let c = v[i];
            if c != 0 {
                v[i % m_us] = v[i % m_us].checked_add(c)?;
            }
        }
        v.truncate(m_us);
    }
    let ph = phi(m);
    let deg = ph.len() - 1;
    if v.len() < deg {
        v.resize(deg, 0);
    }
    for i in (deg..v.len()).rev() {
        let c = v[i];
        if c != 0 {
            let base = i - deg;
            for (j, &pj) in ph[..deg].iter().enumerate() {
                if pj != 0 {
                    v[base + j] = v[base + j].checked_sub(c.checked_mul(pj as i128)?)?;
                }
            }
        }
    }
    v.truncate(deg);
    Some(v)
}

fn reduce_big(m: u64, mut v: Vec<BigInt>) -> Vec<BigInt> {
    let m_us = m as usize;
    if v.len() > m_us {
        let tail: Vec<BigInt> = v.drain(m_us..).collect();
        for (i, c) in tail.into_iter().enumerate() {
            v[(m_us + i) % m_us] += c;
        }
    }
    let ph = phi(m);
    let deg = ph.len() - 1;
    if v.len() < deg {
        v.resize(deg, BigInt::zero());
    }
    for i in (deg..v.len()).rev() {
        if !v[i].is_zero() {
            let c = std::mem::take(&mut v[i]);
            let base = i - deg;
            for (j, &pj) in ph[..deg].iter().enumerate() {
                if pj != 0 {
                    v[base + j] -= &c * pj;
                }
            }
        }
    }
    v.truncate(deg);
    v
}

fn reduce_dense(m: u64, v: Vec<BigInt>) -> Vec<BigInt> {
    let small: Option<Vec<i128>> = v.iter().map(|c| c.to_i64().map(|x| x as i128)).collect();
    if let Some(s) = small {
        if let Some(r) = reduce_i128(m, s) {
            return r.into_iter().map(BigInt::from).collect();
        }
    }
    reduce_big(m, v)
}

/// An exact element of Z[ζ_M].
#[derive(Clone, Debug)]
pub struct CycloValue {
    order: u64,
    coeffs: Vec<BigInt>,
}

impl CycloValue {
    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        CycloValue { order: 1, coeffs: vec![n.into()] }
    }

    /// ζ_M^k.
    pub fn root(m: u64, k: i64) -> Self {
        assert!(m >= 1);
        let k = k.rem_euclid(m as i64) as usize;
        let mut dense = vec![0i128; k + 1];
        dense[k] = 1;
        let c = reduce_i128(m, dense).expect("root reduction cannot overflow");
        CycloValue { order: m, coeffs: c.into_iter().map(BigInt::from).collect() }
    }

    /// Σ_k counts[k]·ζ_M^k for a dense count vector (any length; exponents taken mod M).
    pub fn from_counts(m: u64, counts: &[i64]) -> Self {
        let v: Vec<i128> = counts.iter().map(|&c| c as i128).collect();
        match reduce_i128(m, v) {
            Some(r) => CycloValue { order: m, coeffs: r.into_iter().map(BigInt::from).collect() },
            None => CycloValue { order: m, coeffs: reduce_big(m, counts.iter().map(|&c| BigInt::from(c)).collect()) },
        }
    }

    pub fn from_dense(m: u64, dense: Vec<BigInt>) -> Self {
        CycloValue { order: m, coeffs: reduce_dense(m, dense) }
    }

    /// Build from reduced coordinates; fails if the length does not match φ(M).
    pub fn from_coeffs(m: u64, coeffs: Vec<BigInt>) -> Result<Self> {
        if m == 0 || coeffs.len() as u64 != euler_phi(m) {
            return Err(Error::InvalidInput(format!(
                "order {m} needs {} coefficients, got {}",
                if m == 0 { 0 } else { euler_phi(m) },
                coeffs.len()
            )));
        }
        Ok(CycloValue { order: m, coeffs })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational integer this value equals, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Same value expressed at order `m`, which must be a multiple of the current order.
    pub fn lift(&self, m: u64) -> Result<Self> {
        if !m.is_multiple_of(self.order) {
            return Err(Error::NotDivisible { from: m, to: self.order });
        }
        if m == self.order {
            return Ok(self.clone());
        }
        Ok(CycloValue { order: m, coeffs: reduce_dense(m, self.spread(m)) })
    }

    fn lift_unchecked(&self, m: u64) -> Self {
        self.lift(m).expect("lift to a multiple")
    }

    /// Unreduced representative at order `m` (a multiple of the current order).
    fn spread(&self, m: u64) -> Vec<BigInt> {
        let step = (m / self.order) as usize;
        let mut dense = vec![BigInt::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[i * step] = c.clone();
        }
        dense
    }

    /// Unreduced i64 representative in Z[x]/(x^m − 1); `m` must be a multiple of the order.
    pub(crate) fn dense_i64(&self, m: u64) -> Option<Vec<i64>> {
        debug_assert_eq!(m % self.order, 0);
        let step = (m / self.order) as usize;
        let mut dense = vec![0i64; m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[(i * step) % m as usize] += c.to_i64()?;
        }
        Some(dense)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let m = lcm(a.order, b.order);
        (a.lift_unchecked(m), b.lift_unchecked(m))
    }

    /// Multiply by ζ_M^k where M is the current order.
    pub fn mul_root(&self, k: i64) -> Self {
        let m = self.order;
        let k = k.rem_euclid(m as i64) as usize;
        if k == 0 {
            return self.clone();
        }
        let mut dense = vec![BigInt::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[(i + k) % m as usize] += c;
        }
        CycloValue { order: m, coeffs: reduce_dense(m, dense) }
    }

    /// Complex conjugation ζ ↦ ζ^{−1}.
    pub fn conjugate(&self) -> Self {
        let m = self.order as usize;
        let mut dense = vec![BigInt::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[(m - i) % m] += c;
        }
        CycloValue { order: self.order, coeffs: reduce_dense(self.order, dense) }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CycloValue { order: self.order, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = CycloValue::one().lift_unchecked(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Absolute trace Tr_{Q(ζ_M)/Q}, via Ramanujan sums.
    pub fn trace(&self) -> BigInt {
        let m = self.order;
        let phm = euler_phi(m) as i64;
        let mut t = BigInt::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let g = gcd(i as u64, m);
            let mg = m / g;
            let r = mobius(mg) * (phm / euler_phi(mg) as i64);
            t += c * r;
        }
        t
    }

    /// |v|² as an integer; errors if v·v̄ is not rational (a misuse, not a numeric issue).
    pub fn abs_squared(&self) -> Result<BigInt> {
        let prod = self * &self.conjugate();
        prod.to_integer().ok_or_else(|| Error::InvalidInput("v·conj(v) is not a rational integer".to_string()))
    }

    /// Returns m with v = q^m·w exactly, if such an integer exists.
    ///
    /// m is located from the positive-definite trace form Tr(v·v̄)/Tr(w·w̄) = q^{2m},
    /// then confirmed by exact equality.
    pub fn q_power_ratio(v: &Self, w: &Self, q: u64) -> Option<i64> {
        if w.is_zero() || v.is_zero() || q < 2 {
            return if v.is_zero() && w.is_zero() { Some(0) } else { None };
        }
        let (v, w) = Self::common(v, w);
        let tv = (&v * &v.conjugate()).trace();
        let tw = (&w * &w.conjugate()).trace();
        let q2 = BigInt::from(q) * BigInt::from(q);
        let (big, small, sign) = if tv >= tw { (tv, tw, 1i64) } else { (tw, tv, -1i64) };
        let (ratio, rem) = big.div_rem(&small);
        if !rem.is_zero() {
            return None;
        }
        let mut m = 0i64;
        let mut r = ratio;
        while r > BigInt::one() {
            let (quo, rem) = r.div_rem(&q2);
            if !rem.is_zero() {
                return None;
            }
            r = quo;
            m += 1;
        }
        let qm = BigInt::from(q).pow(m as u32);
        let ok = if sign > 0 { v == w.scale(&qm) } else { v.scale(&qm) == w };
        ok.then_some(sign * m)
    }
}

impl PartialEq for CycloValue {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloValue {}

impl<'a> Add<&'a CycloValue> for &'a CycloValue {
    type Output = CycloValue;
    fn add(self, rhs: &CycloValue) -> CycloValue {
        let (a, b) = CycloValue::common(self, rhs);
        CycloValue { order: a.order, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
}

impl<'a> Sub<&'a CycloValue> for &'a CycloValue {
    type Output = CycloValue;
    fn sub(self, rhs: &CycloValue) -> CycloValue {
        self + &(-rhs)
    }
}

impl Neg for &CycloValue {
    type Output = CycloValue;
    fn neg(self) -> CycloValue {
        CycloValue { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<'a> Mul<&'a CycloValue> for &'a CycloValue {
    type Output = CycloValue;
    fn mul(self, rhs: &CycloValue) -> CycloValue {
        let (a, b) = CycloValue::common(self, rhs);
        let m = a.order;
        let n = a.coeffs.len();
        let small = |v: &[BigInt]| -> Option<Vec<i128>> {
            v.iter().map(|c| c.to_i64().filter(|x| x.unsigned_abs() < (1u64 << 40)).map(|x| x as i128)).collect()
        };
        if let (Some(x), Some(y)) = (small(&a.coeffs), small(&b.coeffs)) {
            let mut dense = vec![0i128; 2 * n - 1];
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0 {
                    continue;
                }
                for (j, &yj) in y.iter().enumerate() {
                    dense[i + j] += xi * yj;
                }
            }
            if let Some(r) = reduce_i128(m, dense) {
                return CycloValue { order: m, coeffs: r.into_iter().map(BigInt::from).collect() };
            }
        }
        let mut dense = vec![BigInt::zero(); 2 * n - 1];
        for (i, xi) in a.coeffs.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in b.coeffs.iter().enumerate() {
                dense[i + j] += xi * yj;
            }
        }
        CycloValue { order: m, coeffs: reduce_big(m, dense) }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<CycloValue> for CycloValue {
            type Output = CycloValue;
            fn $f(self, rhs: CycloValue) -> CycloValue {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for CycloValue {
    type Output = CycloValue;
    fn neg(self) -> CycloValue {
        -&self
    }
}

impl std::iter::Sum for CycloValue {
    fn sum<I: Iterator<Item = CycloValue>>(iter: I) -> CycloValue {
        iter.fold(CycloValue::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for CycloValue {
    fn product<I: Iterator<Item = CycloValue>>(iter: I) -> CycloValue {
        iter.fold(CycloValue::one(), |a, b| &a * &b)
    }
}

impl fmt::Display for CycloValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{i}", self.order)?,
                _ => write!(f, "{mag}*z{}^{i}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Dense accumulator in Z[x]/(x^M − 1) for hot summation loops; reduced once at the end.
#[derive(Clone, Debug)]
pub struct RootAccumulator {
    m: u64,
    counts: Vec<i64>,
}

impl RootAccumulator {
    pub fn new(m: u64) -> Self {
        RootAccumulator { m, counts: vec![0; m as usize] }
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn add_root(&mut self, k: u64, mult: i64) {
        self.counts[(k % self.m) as usize] += mult;
    }

    /// Add ζ_M^shift · v, where v is an unreduced dense representative at order M.
    pub fn add_shifted(&mut self, dense: &[i64], shift: u64) {
        let m = self.m as usize;
        let s = (shift % self.m) as usize;
        for (i, &c) in dense.iter().enumerate() {
            if c != 0 {
                let j = i + s;
                self.counts[if j >= m { j - m } else { j }] += c;
            }
        }
    }

    pub fn finish(&self) -> CycloValue {
        CycloValue::from_counts(self.m, &self.counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64, k: i64) -> CycloValue {
        CycloValue::root(m, k)
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(cyclotomic_modulus(1), vec![-1, 1]);
        assert_eq!(cyclotomic_modulus(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_modulus(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_modulus(105).iter().map(|c| c.abs()).max(), Some(2));
    }

    #[test]
    fn root_examples() {
        assert_eq!(z(4, 2), CycloValue::from_int(-1));
        assert_eq!(&z(3, 1) + &z(3, 2), CycloValue::from_int(-1));
        assert_eq!(z(3, 1).lift(6).unwrap(), z(6, 2));
        assert!(z(3, 1).lift(4).is_err());
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(z(3, 1).conjugate(), z(3, 2));
        assert_eq!(CycloValue::from_int(5).conjugate(), CycloValue::from_int(5));
        assert_eq!((&z(8, 1) + &z(8, 3)).conjugate(), &z(8, 7) + &z(8, 5));
    }

    #[test]
    fn abs_squared_examples() {
        assert_eq!((&z(3, 1) - &z(3, 2)).abs_squared().unwrap(), BigInt::from(3));
        assert_eq!(CycloValue::from_int(-1).abs_squared().unwrap(), BigInt::from(1));
        assert_eq!((&CycloValue::one() + &z(4, 1)).abs_squared().unwrap(), BigInt::from(2));
        // 1 + ζ_5 + ζ_5^2 has non-rational norm square
        assert!((&(&CycloValue::one() + &z(5, 1)) + &z(5, 2)).abs_squared().is_err());
    }

    #[test]
    fn q_power_ratio_examples() {
        let w = &z(5, 1) - &CycloValue::one();
        let v = w.scale(&BigInt::from(9));
        assert_eq!(CycloValue::q_power_ratio(&v, &w, 3), Some(2));
        assert_eq!(CycloValue::q_power_ratio(&w, &v, 3), Some(-2));
        assert_eq!(CycloValue::q_power_ratio(&w, &w, 3), Some(0));
        assert_eq!(CycloValue::q_power_ratio(&z(3, 1), &(&CycloValue::one() + &z(3, 1)), 7), None);
        // q-power ratio with a non-rational |w|^2
        let u = &(&CycloValue::one() + &z(5, 1)) + &z(5, 2);
        assert_eq!(CycloValue::q_power_ratio(&u.scale(&BigInt::from(7)), &u, 7), Some(1));
    }

    #[test]
    fn mixed_orders_and_roots() {
        let a = &z(3, 1) * &z(4, 1);
        assert_eq!(a, z(12, 7));
        assert_eq!(z(12, 5).mul_root(7), CycloValue::one().lift(12).unwrap());
        assert_eq!(z(7, 3).pow(7), CycloValue::one());
        assert_eq!(CycloValue::from_int(3).trace(), BigInt::from(3));
        assert_eq!(z(5, 1).trace(), BigInt::from(-1));
        assert_eq!(z(5, 0).lift(5).unwrap().trace(), BigInt::from(4));
    }

    #[test]
    fn accumulator_matches_direct_sum() {
        let mut acc = RootAccumulator::new(15);
        let mut direct = CycloValue::zero();
        for k in 0..40u64 {
            acc.add_root(k * 7, (k % 3) as i64 - 1);
            direct = &direct + &z(15, (k * 7) as i64).scale(&BigInt::from((k % 3) as i64 - 1));
        }
        assert_eq!(acc.finish(), direct);
    }

    #[test]
    fn big_coefficients_fall_back() {
        let big = CycloValue::from_int(BigInt::from(1u64 << 62));
        let v = &big.lift(7).unwrap() * &(&z(7, 1) + &big);
        let expect = &z(7, 1).scale(&BigInt::from(1u64 << 62)) + &CycloValue::from_int(BigInt::from(1u128 << 124));
        assert_eq!(v, expect);
    }
}
