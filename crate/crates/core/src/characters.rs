//! Additive and multiplicative characters on a [`FieldTower`], Gauss and
//! Kloosterman sums, and the two Hasse–Davenport identities.
//!
//! A multiplicative character of degree d is an index s mod q^d − 1 with
//! χ(g_d^k) = ζ_{q^d−1}^{sk}. The additive character is ψ_c(x) = ζ_p^{Tr(c·x)}
//! for a twist c ∈ F_q^*; every sum is evaluated in index land using the
//! tower's trace tables.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::arith::{gcd, lcm, mod_mul};
use crate::cyclotomic::{CycloValue, RootAccumulator};
use crate::divisor::XPoint;
use crate::error::{Error, Result};
use crate::field_tower::{FieldElement, FieldTower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultCharacter {
    degree: u32,
    index: u64,
    /// q^d − 1
    modulus: u64,
}

impl MultCharacter {
    pub fn new(tower: &FieldTower, degree: u32, index: i64) -> Result<Self> {
        let modulus = tower.unit_order(degree)?;
        Ok(MultCharacter { degree, index: index.rem_euclid(modulus as i64) as u64, modulus })
    }

    pub fn trivial(tower: &FieldTower, degree: u32) -> Result<Self> {
        Self::new(tower, degree, 0)
    }

    /// ε_n: the character of index (q^d − 1)/n.
    pub fn eps(tower: &FieldTower, degree: u32, n: u64) -> Result<Self> {
        let m = tower.unit_order(degree)?;
        if n == 0 || m % n != 0 {
            return Err(Error::InvalidInput(format!("{n} does not divide q^{degree} - 1 = {m}")));
        }
        Self::new(tower, degree, (m / n) as i64)
    }

    /// All characters of F_{q^d}^*, by index.
    pub fn all(tower: &FieldTower, degree: u32) -> Result<Vec<Self>> {
        let m = tower.unit_order(degree)?;
        Ok((0..m).map(|i| MultCharacter { degree, index: i, modulus: m }).collect())
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// q^d − 1 for the character's degree.
    pub fn group_order(&self) -> u64 {
        self.modulus
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    /// Multiplicative order of χ.
    pub fn order(&self) -> u64 {
        self.modulus / gcd(self.index, self.modulus)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::InvalidInput(format!(
                "characters of degrees {} and {} cannot be multiplied",
                self.degree, other.degree
            )));
        }
        Ok(MultCharacter { index: (self.index + other.index) % self.modulus, ..*self })
    }

    pub fn pow(&self, e: i64) -> Self {
        let idx = (self.index as i128 * e as i128).rem_euclid(self.modulus as i128) as u64;
        MultCharacter { index: idx, ..*self }
    }

    /// The character of the same group with the given index.
    pub(crate) fn with_index(&self, index: u64) -> Self {
        MultCharacter { index: index % self.modulus, ..*self }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    /// χ∘Nm_{e→d}, a character of degree e.
    pub fn lift(&self, tower: &FieldTower, e: u32) -> Result<Self> {
        if !e.is_multiple_of(self.degree) {
            return Err(Error::NotDivisible { from: e as u64, to: self.degree as u64 });
        }
        let me = tower.unit_order(e)?;
        let idx = (self.index as u128 * (me / self.modulus) as u128 % me as u128) as u64;
        Ok(MultCharacter { degree: e, index: idx, modulus: me })
    }

    /// The point s/(q^d − 1) of Q/Z.
    pub fn x_point(&self) -> XPoint {
        XPoint::new(self.index as i64, self.modulus)
    }

    /// Minimal-degree character realising an X-point.
    pub fn from_x_point(r: XPoint, tower: &FieldTower) -> Result<Self> {
        if gcd(r.den(), tower.p()) != 1 {
            return Err(Error::InvalidInput(format!("denominator {} is not prime to p = {}", r.den(), tower.p())));
        }
        for d in tower.degrees() {
            let m = tower.unit_order(d)?;
            if m % r.den() == 0 {
                return Self::new(tower, d, (r.num() * (m / r.den())) as i64);
            }
        }
        Err(Error::InvalidInput(format!("no tower degree realises {r}")))
    }

    /// χ(g^k) as an exponent e of ζ_{ord χ}.
    pub(crate) fn exponent_at(&self, k: u64) -> u64 {
        let ord = self.order();
        let step = self.index / (self.modulus / ord);
        mod_mul(step, k % ord, ord)
    }

    /// χ(g^k).
    pub fn eval_index(&self, k: u64) -> CycloValue {
        CycloValue::root(self.order(), self.exponent_at(k) as i64)
    }
}

impl std::fmt::Display for MultCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "chi[d={}, s={}/{}]", self.degree, self.index, self.modulus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AddCharacter {
    twist: FieldElement,
}

impl AddCharacter {
    pub fn new(twist: FieldElement) -> Result<Self> {
        if twist.degree() != 1 || twist.is_zero() {
            return Err(Error::InvalidInput("twist must be a unit of F_q".into()));
        }
        Ok(AddCharacter { twist })
    }

    pub fn twist(&self) -> FieldElement {
        self.twist
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub pass: bool,
    pub lhs: CycloValue,
    pub rhs: CycloValue,
}

/// A tower together with a fixed additive character and a Gauss-sum cache.
pub struct CharContext {
    tower: FieldTower,
    psi: AddCharacter,
    gauss_cache: Mutex<HashMap<(u32, u64), CycloValue>>,
}

impl std::fmt::Debug for CharContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CharContext").field("tower", &self.tower).field("psi", &self.psi).finish()
    }
}

impl CharContext {
    pub fn new(tower: FieldTower) -> Self {
        let one = tower.one(1);
        Self::with_twist(tower, one).expect("1 is a unit")
    }

    pub fn with_twist(tower: FieldTower, twist: FieldElement) -> Result<Self> {
        let psi = AddCharacter::new(twist)?;
        Ok(CharContext { tower, psi, gauss_cache: Mutex::new(HashMap::new()) })
    }

    /// Convenience: a context over the divisor closure of `degrees`.
    pub fn build(p: u64, s: u32, degrees: &[u32]) -> Result<Self> {
        Ok(Self::new(FieldTower::closure(p, s, degrees, &Default::default())?))
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn psi(&self) -> AddCharacter {
        self.psi
    }

    pub fn p(&self) -> u64 {
        self.tower.p()
    }

    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    pub fn character(&self, degree: u32, index: i64) -> Result<MultCharacter> {
        MultCharacter::new(&self.tower, degree, index)
    }

    pub fn trivial(&self, degree: u32) -> Result<MultCharacter> {
        MultCharacter::trivial(&self.tower, degree)
    }

    pub fn eps(&self, degree: u32, n: u64) -> Result<MultCharacter> {
        MultCharacter::eps(&self.tower, degree, n)
    }

    /// χ(x) for x ≠ 0.
    pub fn eval_mult(&self, chi: &MultCharacter, x: FieldElement) -> Result<CycloValue> {
        if x.degree() != chi.degree {
            return Err(Error::InvalidInput("character and element degrees differ".into()));
        }
        Ok(chi.eval_index(self.tower.discrete_log(x)?))
    }

    /// χ(x) with the convention χ(0) = 0.
    pub fn eval_mult0(&self, chi: &MultCharacter, x: FieldElement) -> Result<CycloValue> {
        if x.is_zero() {
            return Ok(CycloValue::zero());
        }
        self.eval_mult(chi, x)
    }

    /// Exponent t with ψ(Tr_d x) = ζ_p^t.
    pub fn psi_exponent(&self, x: FieldElement) -> Result<u64> {
        let c = self.tower.embed(self.psi.twist, x.degree())?;
        Ok(self.tower.abs_trace(self.tower.mul(c, x)?))
    }

    /// ψ(Tr_d x).
    pub fn eval_add(&self, x: FieldElement) -> Result<CycloValue> {
        Ok(CycloValue::root(self.p(), self.psi_exponent(x)? as i64))
    }

    /// t[k] with ψ(Tr_d g_d^k) = ζ_p^{t[k]}.
    pub fn trace_table(&self, degree: u32) -> Result<std::sync::Arc<Vec<u32>>> {
        self.tower.trace_table(degree, self.psi.twist)
    }

    /// g(χ, ψ∘Tr_d) = Σ_{x ≠ 0} χ(x)ψ(Tr_d x).
    pub fn gauss_sum(&self, chi: &MultCharacter) -> Result<CycloValue> {
        let key = (chi.degree, chi.index);
        if let Some(v) = self.gauss_cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let p = self.p();
        let ord = chi.order();
        let m = lcm(p, ord);
        let tr = self.trace_table(chi.degree)?;
        let (cs, ps) = (m / ord, m / p);
        let mut acc = RootAccumulator::new(m);
        for (k, &t) in tr.iter().enumerate() {
            acc.add_root(chi.exponent_at(k as u64) * cs + t as u64 * ps, 1);
        }
        let v = acc.finish();
        self.gauss_cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Σ_{x_1⋯x_k = t} ψ(x_1 + … + x_k) χ_1(x_1)⋯χ_k(x_k).
    pub fn kloosterman(&self, chis: &[MultCharacter], t: FieldElement) -> Result<CycloValue> {
        if t.is_zero() {
            return Err(Error::ZeroElement);
        }
        if chis.is_empty() {
            return Err(Error::InvalidInput("Kloosterman sum needs at least one character".into()));
        }
        let d = t.degree();
        if chis.iter().any(|c| c.degree != d) {
            return Err(Error::InvalidInput("characters and point must share a degree".into()));
        }
        let o = self.tower.unit_order(d)?;
        let kt = self.tower.discrete_log(t)?;
        let p = self.p();
        let m = chis.iter().fold(p, |acc, c| lcm(acc, c.order()));
        let tr = self.trace_table(d)?;
        let term =
            |c: &MultCharacter, k: u64| -> u64 { c.exponent_at(k) * (m / c.order()) + tr[k as usize] as u64 * (m / p) };
        // distribution of (Σ k_i mod o) → count vector over Z/m, one factor at a time
        let mut dist: Vec<Vec<i64>> = vec![vec![0; m as usize]; o as usize];
        dist[0][0] = 1;
        for c in &chis[..chis.len() - 1] {
            let mut next = vec![vec![0i64; m as usize]; o as usize];
            for (r, counts) in dist.iter().enumerate() {
                if counts.iter().all(|&x| x == 0) {
                    continue;
                }
                for k in 0..o {
                    let e = term(c, k);
                    let tgt = &mut next[((r as u64 + k) % o) as usize];
                    for (j, &cnt) in counts.iter().enumerate() {
                        if cnt != 0 {
                            tgt[((j as u64 + e) % m) as usize] += cnt;
                        }
                    }
                }
            }
            dist = next;
        }
        let last = chis.last().unwrap();
        let mut acc = RootAccumulator::new(m);
        for (r, counts) in dist.iter().enumerate() {
            let k = (kt + o - r as u64) % o;
            let e = term(last, k);
            for (j, &cnt) in counts.iter().enumerate() {
                if cnt != 0 {
                    acc.add_root(j as u64 + e, cnt);
                }
            }
        }
        Ok(acc.finish())
    }

    /// −g(χ∘Nm_d, ψ∘Tr_d) = (−g(χ, ψ))^d.
    pub fn check_hd_lift(&self, chi: &MultCharacter, d: u32) -> Result<IdentityReport> {
        let e = chi.degree * d;
        let lifted = chi.lift(&self.tower, e)?;
        let lhs = -self.gauss_sum(&lifted)?;
        let rhs = (-self.gauss_sum(chi)?).pow(d as u64);
        Ok(IdentityReport { pass: lhs == rhs, lhs, rhs })
    }

    /// g(λ^n)·∏_i g(ε_n^i) = λ(n^n)·g(1)·∏_i g(λ ε_n^i), i = 0..n−1.
    pub fn check_hd_product(&self, lambda: &MultCharacter, n: u64) -> Result<IdentityReport> {
        let d = lambda.degree;
        let eps = self.eps(d, n)?;
        let mut lhs = self.gauss_sum(&lambda.pow(n as i64))?;
        let one = self.trivial(d)?;
        let mut rhs = &self.eval_mult(lambda, self.tower.pow(self.tower.from_int(d, n as i64), n as i64)?)?
            * &self.gauss_sum(&one)?;
        for i in 0..n {
            let ei = eps.pow(i as i64);
            lhs = &lhs * &self.gauss_sum(&ei)?;
            rhs = &rhs * &self.gauss_sum(&lambda.mul(&ei)?)?;
        }
        Ok(IdentityReport { pass: lhs == rhs, lhs, rhs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn ctx(p: u64, s: u32, degs: &[u32]) -> CharContext {
        CharContext::build(p, s, degs).unwrap()
    }

    fn z(m: u64, k: i64) -> CycloValue {
        CycloValue::root(m, k)
    }

    /// Direct evaluation through field elements — independent of the trace tables.
    fn gauss_oracle(c: &CharContext, chi: &MultCharacter) -> CycloValue {
        c.tower()
            .elements(chi.degree())
            .unwrap()
            .skip(1)
            .map(|x| &c.eval_mult(chi, x).unwrap() * &c.eval_add(x).unwrap())
            .sum()
    }

    #[test]
    fn eval_examples() {
        let c = ctx(5, 1, &[1]);
        let e2 = c.eps(1, 2).unwrap();
        assert_eq!(e2.index(), 2);
        assert_eq!(c.eval_mult(&e2, c.tower().from_int(1, 4)).unwrap(), CycloValue::one());
        for chi in MultCharacter::all(c.tower(), 1).unwrap() {
            assert_eq!(c.eval_mult(&chi, c.tower().one(1)).unwrap(), CycloValue::one());
        }
        assert!(c.eval_mult(&e2, c.tower().zero(1)).is_err());
        let c3 = ctx(3, 1, &[1]);
        assert_eq!(c3.eval_add(c3.tower().from_int(1, 2)).unwrap(), z(3, 2));
    }

    #[test]
    fn gauss_examples() {
        let c = ctx(3, 1, &[1]);
        assert_eq!(c.gauss_sum(&c.trivial(1).unwrap()).unwrap(), CycloValue::from_int(-1));
        let e2 = c.eps(1, 2).unwrap();
        let g = c.gauss_sum(&e2).unwrap();
        assert_eq!(g, &z(3, 1) - &z(3, 2));
        let prod = &g * &c.gauss_sum(&e2.inv()).unwrap();
        assert_eq!(prod, CycloValue::from_int(-3));
    }

    #[test]
    fn gauss_matches_oracle() {
        for (p, s, d) in [(3u64, 1u32, 2u32), (2, 2, 1), (2, 3, 1), (5, 1, 1), (7, 1, 1), (3, 2, 1)] {
            let c = ctx(p, s, &[d]);
            for chi in MultCharacter::all(c.tower(), d).unwrap() {
                assert_eq!(c.gauss_sum(&chi).unwrap(), gauss_oracle(&c, &chi), "p={p} s={s} {chi}");
            }
        }
    }

    #[test]
    fn twisted_gauss_sum() {
        // g(χ, ψ_c) = χ̄(c) g(χ, ψ_1)
        let t = FieldTower::new(7, 1, &[1]).unwrap();
        let c3 = t.from_int(1, 3);
        let twisted = CharContext::with_twist(t, c3).unwrap();
        let plain = ctx(7, 1, &[1]);
        for chi in MultCharacter::all(plain.tower(), 1).unwrap() {
            let expect = &plain.eval_mult(&chi.inv(), c3).unwrap() * &plain.gauss_sum(&chi).unwrap();
            assert_eq!(twisted.gauss_sum(&chi).unwrap(), expect);
        }
    }

    #[test]
    fn kloosterman_examples() {
        let c = ctx(3, 1, &[1]);
        let one = c.trivial(1).unwrap();
        let t = c.tower();
        assert_eq!(c.kloosterman(&[one], t.from_int(1, 2)).unwrap(), z(3, 2));
        assert_eq!(c.kloosterman(&[one, one], t.one(1)).unwrap(), &z(3, 2) + &z(3, 1));
        assert!(c.kloosterman(&[one], t.zero(1)).is_err());
    }

    #[test]
    fn kloosterman_multiplicative_fourier() {
        let c = ctx(5, 1, &[1]);
        let t = c.tower();
        let chars = MultCharacter::all(t, 1).unwrap();
        for a in &chars {
            for b in &chars {
                let ks: Vec<(FieldElement, CycloValue)> =
                    t.elements(1).unwrap().skip(1).map(|x| (x, c.kloosterman(&[*a, *b], x).unwrap())).collect();
                for lam in &chars {
                    let lhs: CycloValue = ks.iter().map(|(x, k)| k * &c.eval_mult(lam, *x).unwrap()).sum();
                    let rhs = &c.gauss_sum(&lam.mul(a).unwrap()).unwrap() * &c.gauss_sum(&lam.mul(b).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                    // inversion on the cyclic group F_q^*
                    let x0 = t.from_int(1, 3);
                    let inv: CycloValue = chars
                        .iter()
                        .map(|mu| {
                            &(&c.gauss_sum(&mu.mul(a).unwrap()).unwrap() * &c.gauss_sum(&mu.mul(b).unwrap()).unwrap())
                                * &c.eval_mult(&mu.inv(), x0).unwrap()
                        })
                        .sum();
                    assert_eq!(inv, c.kloosterman(&[*a, *b], x0).unwrap().scale(&BigInt::from(4)));
                }
            }
        }
    }

    #[test]
    fn hd_examples() {
        let c = ctx(3, 1, &[1, 2, 3]);
        assert!(c.check_hd_lift(&c.eps(1, 2).unwrap(), 2).unwrap().pass);
        assert!(c.check_hd_lift(&c.trivial(1).unwrap(), 3).unwrap().pass);
        let c5 = ctx(5, 1, &[1, 2]);
        assert!(c5.check_hd_lift(&c5.eps(1, 4).unwrap(), 2).unwrap().pass);

        let c7 = ctx(7, 1, &[1]);
        assert!(c7.check_hd_product(&c7.eps(1, 3).unwrap(), 2).unwrap().pass);
        assert!(c7.check_hd_product(&c7.trivial(1).unwrap(), 3).unwrap().pass);
        assert!(c7.check_hd_product(&c7.trivial(1).unwrap(), 4).is_err());
    }

    #[test]
    fn hd_exhaustive_small() {
        for (p, s) in [(3u64, 1u32), (5, 1), (7, 1), (2, 2), (3, 2)] {
            let c = ctx(p, s, &[1, 2]);
            let q = c.q();
            for chi in MultCharacter::all(c.tower(), 1).unwrap() {
                if q * q <= 81 {
                    assert!(c.check_hd_lift(&chi, 2).unwrap().pass);
                }
                for n in crate::arith::divisors(q - 1) {
                    assert!(c.check_hd_product(&chi, n).unwrap().pass, "q={q} n={n} {chi}");
                }
            }
        }
    }

    #[test]
    fn x_point_examples() {
        let c = ctx(3, 1, &[1, 2]);
        assert_eq!(c.eps(1, 2).unwrap().x_point(), XPoint::new(1, 2));
        let chi = MultCharacter::from_x_point(XPoint::new(1, 8), c.tower()).unwrap();
        assert_eq!((chi.degree(), chi.order()), (2, 8));
        assert!(MultCharacter::from_x_point(XPoint::new(1, 3), c.tower()).is_err());
        // norm compatibility
        let e2 = c.eps(1, 2).unwrap();
        assert_eq!(e2.lift(c.tower(), 2).unwrap().x_point(), e2.x_point());
        let back = MultCharacter::from_x_point(XPoint::new(1, 2), c.tower()).unwrap();
        assert_eq!(back, e2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn gauss_laws(qi in 0usize..6, idx in 0i64..200) {
            let (p, s) = [(3u64, 1u32), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)][qi];
            let c = ctx(p, s, &[1]);
            let q = c.q();
            let lam = c.character(1, idx).unwrap();
            let g = c.gauss_sum(&lam).unwrap();
            let minus_one = c.tower().from_int(1, -1);
            let sign = c.eval_mult(&lam, minus_one).unwrap();
            if lam.is_trivial() {
                prop_assert_eq!(g.clone(), CycloValue::from_int(-1));
            } else {
                prop_assert_eq!(g.abs_squared().unwrap(), BigInt::from(q));
                let prod = &g * &c.gauss_sum(&lam.inv()).unwrap();
                prop_assert_eq!(prod, sign.scale(&BigInt::from(q)));
            }
            prop_assert_eq!(g.conjugate(), &sign * &c.gauss_sum(&lam.inv()).unwrap());
        }
    }
}
