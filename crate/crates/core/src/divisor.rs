//! Divisors on X ≅ (p-prime part of Q/Z), the groups A_N and the map α_N.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{gcd, lcm, modu};
use crate::characters::MultCharacter;
use crate::error::{Error, Result};

/// A reduced rational num/den in [0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct XPoint {
    num: u64,
    den: u64,
}

impl XPoint {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "XPoint denominator must be positive");
        let n = modu(num, den);
        let g = gcd(n, den);
        XPoint { num: n / g, den: den / g }
    }

    /// Construct and require the denominator to be prime to p.
    pub fn checked(num: i64, den: u64, p: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let x = Self::new(num, den);
        if gcd(x.den, p) != 1 {
            return Err(Error::InvalidInput(format!("denominator {} not prime to {p}", x.den)));
        }
        Ok(x)
    }

    pub fn zero() -> Self {
        XPoint { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = lcm(self.den, other.den);
        let n = (self.num as u128 * (l / self.den) as u128 + other.num as u128 * (l / other.den) as u128) % l as u128;
        Self::new(n as i64, l)
    }

    pub fn neg(&self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    /// k·r mod 1.
    pub fn scale(&self, k: i64) -> Self {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        Self::new(n as i64, self.den)
    }
}

impl Ord for XPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128)
            .cmp(&(other.num as u128 * self.den as u128))
            .then(self.den.cmp(&other.den))
    }
}

impl PartialOrd for XPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for XPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A finite integer combination of points of X.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Divisor {
    points: BTreeMap<XPoint, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn point(x: XPoint) -> Self {
        let mut d = Self::zero();
        d.add_point(x, 1);
        d
    }

    pub fn add_point(&mut self, x: XPoint, mult: i64) {
        if mult == 0 {
            return;
        }
        let e = self.points.entry(x).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.points.remove(&x);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&XPoint, &i64)> {
        self.points.iter()
    }

    pub fn multiplicity(&self, x: &XPoint) -> i64 {
        self.points.get(x).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut d = self.clone();
        for (x, m) in &other.points {
            d.add_point(*x, *m);
        }
        d
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut d = Self::zero();
        for (x, m) in &self.points {
            d.add_point(*x, m * k);
        }
        d
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// D_{r,n} = (r) + (r + 1/n) + … + (r + (n−1)/n).
    pub fn d_rn(r: XPoint, n: u64) -> Self {
        let mut d = Self::zero();
        let step = XPoint::new(1, n);
        let mut x = r;
        for _ in 0..n {
            d.add_point(x, 1);
            x = x.add(&step);
        }
        d
    }

    /// Σ_{ξ : nξ = x} (ξ) for n > 0; −D_{−x, −n} for n < 0.
    pub fn of_point_power(x: XPoint, n: i64) -> Result<Self> {
        match n.cmp(&0) {
            Ordering::Equal => Err(Error::InvalidInput("exponent must be nonzero".into())),
            Ordering::Greater => {
                let n = n as u64;
                // ξ_0 = x/n
                let r = XPoint::new(x.num as i64, x.den * n);
                Ok(Self::d_rn(r, n))
            }
            Ordering::Less => Ok(Self::of_point_power(x.neg(), -n)?.neg()),
        }
    }

    /// Sum multiplicities over orbits of r ↦ q·r; each orbit is represented by its smallest point.
    pub fn frobenius_quotient(&self, q: u64) -> Self {
        let mut d = Self::zero();
        for (x, m) in &self.points {
            let mut rep = *x;
            let mut y = x.scale(q as i64);
            while y != *x {
                rep = rep.min(y);
                y = y.scale(q as i64);
            }
            d.add_point(rep, *m);
        }
        d
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (x, m)) in self.points.iter().enumerate() {
            let sign = if *m < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            if i > 0 {
                write!(f, " ")?;
            }
            let a = m.unsigned_abs();
            if a == 1 {
                write!(f, "{sign}({x})")?;
            } else {
                write!(f, "{sign}{a}({x})")?;
            }
        }
        Ok(())
    }
}

/// D_{χ,n}; requires p ∤ n.
pub fn divisor_of_char_power(chi: &MultCharacter, n: i64, p: u64) -> Result<Divisor> {
    if n == 0 {
        return Err(Error::InvalidInput("exponent must be nonzero".into()));
    }
    if n.unsigned_abs().is_multiple_of(p) {
        return Err(Error::InvalidInput(format!("p = {p} divides the exponent {n}")));
    }
    Divisor::of_point_power(chi.x_point(), n)
}

/// An element of A_N (or A_N^{(p)}): an integer combination of symbols [s, n]_N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ANElement {
    modulus: u64,
    p: Option<u64>,
    terms: BTreeMap<(u64, u64), i64>,
}

impl ANElement {
    pub fn new(modulus: u64, p: Option<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput("A_N needs N ≥ 1".into()));
        }
        Ok(ANElement { modulus, p, terms: BTreeMap::new() })
    }

    pub fn symbol(modulus: u64, s: i64, n: u64) -> Result<Self> {
        let mut x = Self::new(modulus, None)?;
        x.add_term(s, n, 1)?;
        Ok(x)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, u64, i64)> + '_ {
        self.terms.iter().map(|(&(s, n), &c)| (s, n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, s: i64, n: u64, coef: i64) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidInput("symbol [s, n] needs n > 0".into()));
        }
        if let Some(p) = self.p {
            if n.is_multiple_of(p) {
                return Err(Error::InvalidInput(format!("A_N^({p}) symbols need p ∤ n, got n = {n}")));
            }
        }
        if coef == 0 {
            return Ok(());
        }
        let key = (modu(s, self.modulus), n);
        let e = self.terms.entry(key).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::InvalidInput("A_N elements with different N".into()));
        }
        let mut x = self.clone();
        for (s, n, c) in other.terms() {
            x.add_term(s as i64, n, c)?;
        }
        Ok(x)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut x = ANElement { terms: BTreeMap::new(), ..self.clone() };
        for (s, n, c) in self.terms() {
            x.add_term(s as i64, n, c * k).expect("existing symbols are valid");
        }
        x
    }

    /// φ_{M,N}: [s, n]_N ↦ [Ms, n]_{MN}.
    pub fn push_forward(&self, m: u64) -> Self {
        let mut x = ANElement { modulus: self.modulus * m, p: self.p, terms: BTreeMap::new() };
        for (s, n, c) in self.terms() {
            x.add_term((s * m) as i64, n, c).expect("existing symbols are valid");
        }
        x
    }

    /// Every symbol rewritten until gcd(s, n, N) = 1.
    pub fn reduce_to_basis(&self) -> Self {
        let mut out = ANElement { terms: BTreeMap::new(), ..self.clone() };
        let mut work: Vec<(u64, u64, i64)> = self.terms().collect();
        while let Some((s, n, c)) = work.pop() {
            let g = gcd(gcd(s, n), self.modulus);
            if g == 1 {
                out.add_term(s as i64, n, c).expect("valid symbol");
                continue;
            }
            let rhs = expand_relation(s / g, n / g, self.modulus, g).expect("g divides N");
            for (s2, n2, c2) in rhs.terms() {
                work.push((s2, n2, c2 * c));
            }
        }
        out
    }

    pub fn is_basis_form(&self) -> bool {
        self.terms().all(|(s, n, _)| gcd(gcd(s, n), self.modulus) == 1)
    }

    /// α_N([s, n]_N) = D_{s/(nN), n}.
    pub fn alpha(&self) -> Divisor {
        let mut d = Divisor::zero();
        for (s, n, c) in self.terms() {
            let r = XPoint::new(s as i64, n * self.modulus);
            d = d.add(&Divisor::d_rn(r, n).scale(c));
        }
        d
    }
}

impl fmt::Display for ANElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(s, n, c)| format!("{c}[{s},{n}]")).collect();
        write!(f, "{}_{}", parts.join(" + "), self.modulus)
    }
}

/// Right-hand side of [ds, dn]_N = Σ_{i<d} [s + iN/d, n]_N.
pub fn expand_relation(s: u64, n: u64, modulus: u64, d: u64) -> Result<ANElement> {
    if d == 0 || !modulus.is_multiple_of(d) {
        return Err(Error::InvalidInput(format!("{d} does not divide N = {modulus}")));
    }
    let mut x = ANElement::new(modulus, None)?;
    for i in 0..d {
        x.add_term((s + i * (modulus / d)) as i64, n, 1)?;
    }
    Ok(x)
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub modulus: u64,
    pub checked: usize,
    pub zero_images: usize,
    pub counterexample: Option<ANElement>,
}

impl ProbeReport {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn probe_one(x: &ANElement) -> bool {
    let r = x.reduce_to_basis();
    let a = x.alpha();
    r.is_basis_form() && r.alpha() == a && r.reduce_to_basis() == r && (a.is_zero() == r.is_zero())
}

/// For random x: α(x) = 0 ⇔ reduce_to_basis(x) = 0 (plus idempotence and α-invariance).
///
/// Half of the samples are built from relation instances so that the α = 0 branch is exercised.
pub fn injectivity_probe(modulus: u64, trials: usize, seed: u64) -> ProbeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ modulus.wrapping_mul(0x9e3779b97f4a7c15));
    let mut report = ProbeReport { modulus, checked: 0, zero_images: 0, counterexample: None };
    let divs = crate::arith::divisors(modulus);
    for t in 0..trials {
        let mut x = ANElement::new(modulus, None).unwrap();
        let nterms = rng.gen_range(1..=4);
        for _ in 0..nterms {
            if t % 2 == 0 {
                let s = rng.gen_range(0..modulus) as i64;
                let n = rng.gen_range(1..=6);
                x.add_term(s, n, rng.gen_range(-2..=2)).unwrap();
            } else {
                // c·([ds, dn] − Σ expansion) is in the kernel by definition
                let d = divs[rng.gen_range(0..divs.len())];
                let s = rng.gen_range(0..modulus);
                let n = rng.gen_range(1..=3);
                let c = rng.gen_range(-2..=2);
                x.add_term((d * s) as i64, d * n, c).unwrap();
                x = x.add(&expand_relation(s, n, modulus, d).unwrap().scale(-c)).unwrap();
                if rng.gen_bool(0.3) {
                    x.add_term(rng.gen_range(0..modulus) as i64, rng.gen_range(1..=4), 1).unwrap();
                }
            }
        }
        report.checked += 1;
        if x.alpha().is_zero() {
            report.zero_images += 1;
        }
        if !probe_one(&x) {
            report.counterexample = Some(x);
            return report;
        }
    }
    report
}

/// Every element with at most two terms, coefficients ±1 and n ≤ max_n.
pub fn injectivity_exhaustive(modulus: u64, max_n: u64) -> ProbeReport {
    let mut report = ProbeReport { modulus, checked: 0, zero_images: 0, counterexample: None };
    let symbols: Vec<(u64, u64)> = (1..=max_n).flat_map(|n| (0..modulus).map(move |s| (s, n))).collect();
    for (i, &(s1, n1)) in symbols.iter().enumerate() {
        for &(s2, n2) in &symbols[i..] {
            for c2 in [-1i64, 0, 1] {
                let mut x = ANElement::new(modulus, None).unwrap();
                x.add_term(s1 as i64, n1, 1).unwrap();
                x.add_term(s2 as i64, n2, c2).unwrap();
                report.checked += 1;
                if x.alpha().is_zero() {
                    report.zero_images += 1;
                }
                if !probe_one(&x) {
                    report.counterexample = Some(x);
                    return report;
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharContext;
    use proptest::prelude::*;

    fn x(n: i64, d: u64) -> XPoint {
        XPoint::new(n, d)
    }

    fn div(pts: &[(i64, u64, i64)]) -> Divisor {
        let mut d = Divisor::zero();
        for &(n, den, m) in pts {
            d.add_point(x(n, den), m);
        }
        d
    }

    fn sym(n_mod: u64, terms: &[(i64, u64, i64)]) -> ANElement {
        let mut e = ANElement::new(n_mod, None).unwrap();
        for &(s, n, c) in terms {
            e.add_term(s, n, c).unwrap();
        }
        e
    }

    #[test]
    fn expand_examples() {
        assert_eq!(expand_relation(1, 1, 4, 2).unwrap(), sym(4, &[(1, 1, 1), (3, 1, 1)]));
        assert_eq!(expand_relation(3, 2, 4, 1).unwrap(), sym(4, &[(3, 2, 1)]));
        assert_eq!(expand_relation(0, 1, 6, 3).unwrap(), sym(6, &[(0, 1, 1), (2, 1, 1), (4, 1, 1)]));
        assert!(expand_relation(0, 1, 6, 4).is_err());
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(sym(4, &[(2, 2, 1)]).reduce_to_basis(), sym(4, &[(1, 1, 1), (3, 1, 1)]));
        assert_eq!(sym(4, &[(1, 3, 1)]).reduce_to_basis(), sym(4, &[(1, 3, 1)]));
        assert_eq!(sym(4, &[(2, 4, 1)]).reduce_to_basis(), sym(4, &[(1, 2, 1), (3, 2, 1)]));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(sym(4, &[(1, 1, 1)]).alpha(), div(&[(1, 4, 1)]));
        assert_eq!(sym(4, &[(0, 2, 1)]).alpha(), div(&[(0, 1, 1), (1, 2, 1)]));
        let e = sym(4, &[(2, 2, 1)]);
        assert_eq!(e.alpha(), div(&[(1, 4, 1), (3, 4, 1)]));
        assert_eq!(e.reduce_to_basis().alpha(), e.alpha());
    }

    #[test]
    fn char_power_examples() {
        let c = CharContext::build(7, 1, &[1]).unwrap();
        let one = c.trivial(1).unwrap();
        assert_eq!(divisor_of_char_power(&one, 3, 7).unwrap(), div(&[(0, 1, 1), (1, 3, 1), (2, 3, 1)]));
        let e3 = c.eps(1, 3).unwrap();
        assert_eq!(divisor_of_char_power(&e3, 1, 7).unwrap(), Divisor::point(e3.x_point()));
        // D_{χ,−1} = −D_{χ^{-1},1} = −(x(χ^{-1}))
        assert_eq!(divisor_of_char_power(&e3, -1, 7).unwrap(), div(&[(2, 3, -1)]));
        assert!(divisor_of_char_power(&e3, 7, 7).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert!(div(&[(1, 8, 1), (3, 8, -1)]).frobenius_quotient(3).is_zero());
        assert!(Divisor::zero().frobenius_quotient(3).is_zero());
        assert_eq!(div(&[(1, 2, 1)]).frobenius_quotient(3), div(&[(1, 2, 1)]));
        assert_eq!(div(&[(3, 8, 2)]).frobenius_quotient(3), div(&[(1, 8, 2)]));
    }

    #[test]
    fn probe_examples() {
        assert!(injectivity_probe(12, 200, 7).pass());
        let e = sym(4, &[(2, 2, 1), (1, 1, -1), (3, 1, -1)]);
        assert!(e.alpha().is_zero() && e.reduce_to_basis().is_zero());
        let e = sym(4, &[(1, 1, 1)]);
        assert!(!e.alpha().is_zero() && !e.reduce_to_basis().is_zero());
        assert!(injectivity_exhaustive(6, 3).pass());
    }

    #[test]
    fn p_variant_guard() {
        let mut e = ANElement::new(4, Some(3)).unwrap();
        assert!(e.add_term(1, 3, 1).is_err());
        assert!(e.add_term(1, 2, 1).is_ok());
    }

    #[test]
    fn display() {
        assert_eq!(div(&[(1, 2, 1), (0, 1, -2)]).to_string(), "-2(0) +(1/2)");
        assert_eq!(Divisor::zero().to_string(), "0");
    }

    fn arb_element(max_n: u64) -> impl Strategy<Value = ANElement> {
        (1u64..=24, prop::collection::vec((0i64..48, 1u64..=max_n, -3i64..=3), 0..6)).prop_map(|(n_mod, terms)| {
            let mut e = ANElement::new(n_mod, None).unwrap();
            for (s, n, c) in terms {
                e.add_term(s, n, c).unwrap();
            }
            e
        })
    }

    proptest! {
        #[test]
        fn reduce_idempotent_and_alpha_preserving(e in arb_element(8)) {
            let r = e.reduce_to_basis();
            prop_assert!(r.is_basis_form());
            prop_assert_eq!(r.reduce_to_basis(), r.clone());
            prop_assert_eq!(r.alpha(), e.alpha());
            prop_assert_eq!(e.alpha().is_zero(), r.is_zero());
        }

        #[test]
        fn push_forward_compatible(e in arb_element(6), m in 1u64..5) {
            prop_assert_eq!(e.push_forward(m).alpha(), e.alpha());
        }

        #[test]
        fn d_of_multiple_is_sum_of_translates(num in 0i64..30, den in 1u64..30, n in 1i64..5, d in 1i64..5) {
            // D_{x,dn} = Σ_{dξ' = x} D_{ξ',n}
            let xp = XPoint::new(num, den);
            let lhs = Divisor::of_point_power(xp, d * n).unwrap();
            let mut rhs = Divisor::zero();
            for (y, m) in Divisor::of_point_power(xp, d).unwrap().iter() {
                rhs = rhs.add(&Divisor::of_point_power(*y, n).unwrap().scale(*m));
            }
            prop_assert_eq!(lhs.clone(), rhs);
            prop_assert_eq!(Divisor::of_point_power(xp, -d * n).unwrap(), Divisor::of_point_power(xp.neg(), d * n).unwrap().neg());
        }
    }
}
