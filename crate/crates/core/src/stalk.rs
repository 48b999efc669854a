//! Traces of Frobenius on stalks of middle extensions of ψ(a∏x_i^{n_i})∏χ_i(x_i).
//!
//! The origin value T_0 is computed by the blow-up recursion on
//! (positive exponents | absolute values of negative exponents), with the
//! two-variable value as the base case. Boundary values are products of
//! character factors at the nonzero coordinates and the origin value of the
//! sub-datum on the vanishing coordinates.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{binomial, gcd, lcm, solve_system};
use crate::characters::{CharContext, MultCharacter};
use crate::cyclotomic::{CycloValue, RootAccumulator};
use crate::error::{Error, Result};
use crate::field_tower::FieldElement;
use crate::fourier::GridFunction;

/// Integer polynomial in the formal variable q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPolynomial {
    coeffs: Vec<BigInt>,
}

impl QPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = QPolynomial { coeffs };
        while p.coeffs.last().is_some_and(|c| c.is_zero()) {
            p.coeffs.pop();
        }
        p
    }

    pub fn zero() -> Self {
        QPolynomial { coeffs: vec![] }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The variable q.
    pub fn q() -> Self {
        Self::new(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c.into();
        Self::new(v)
    }

    /// 1 + q + … + q^{n−1}.
    pub fn geometric(n: usize) -> Self {
        Self::new(vec![BigInt::one(); n])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[BigInt], i: usize| v.get(i).cloned().unwrap_or_default();
        Self::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        Self::new(self.coeffs.iter().map(|c| c * &k).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, q: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * q + c)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "q")?
                    } else {
                        write!(f, "q^{i}")?
                    }
                }
            }
        }
        Ok(())
    }
}

fn c(n: i64, k: i64) -> BigInt {
    BigInt::from(binomial(n, k))
}

/// a(n, m) = Σ_{i<m} C(m−1, i) C(n−1, i+1) q^{i+1}, a(n, 0) = 1.
pub fn a_poly(n: u64, m: u64) -> QPolynomial {
    if m == 0 {
        return QPolynomial::one();
    }
    let (n, m) = (n as i64, m as i64);
    (0..m).fold(QPolynomial::zero(), |acc, i| {
        acc.add(&QPolynomial::monomial(c(m - 1, i) * c(n - 1, i + 1), (i + 1) as usize))
    })
}

/// b(n, m) = Σ_{i<m} C(m−1, i) C(n−1, i) q^i.
pub fn b_poly(n: u64, m: u64) -> QPolynomial {
    let (n, m) = (n as i64, m as i64);
    (0..m).fold(QPolynomial::zero(), |acc, i| acc.add(&QPolynomial::monomial(c(m - 1, i) * c(n - 1, i), i as usize)))
}

/// (n_1..n_k, χ_1..χ_k, a) over F_{q^d}: the function ψ(a∏x_i^{n_i})∏χ_i(x_i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialDatum {
    pub degree: u32,
    pub exponents: Vec<i64>,
    pub chars: Vec<MultCharacter>,
    pub a: FieldElement,
}

impl MonomialDatum {
    pub fn new(ctx: &CharContext, exponents: Vec<i64>, chars: Vec<MultCharacter>, a: FieldElement) -> Result<Self> {
        let d = MonomialDatum { degree: a.degree(), exponents, chars, a };
        d.validate(ctx)?;
        Ok(d)
    }

    pub fn validate(&self, ctx: &CharContext) -> Result<()> {
        if self.exponents.is_empty() || self.exponents.len() != self.chars.len() {
            return Err(Error::InvalidInput("need k ≥ 1 exponents and as many characters".into()));
        }
        if self.a.is_zero() {
            return Err(Error::InvalidInput("coefficient a must be nonzero".into()));
        }
        if !ctx.tower().has_degree(self.degree) {
            return Err(Error::MissingDegree(self.degree));
        }
        for (&n, chi) in self.exponents.iter().zip(&self.chars) {
            if n == 0 || n.unsigned_abs() % ctx.p() == 0 {
                return Err(Error::InvalidInput(format!("exponent {n} must be nonzero and prime to p")));
            }
            if chi.degree() != self.degree {
                return Err(Error::InvalidInput("characters must live on the datum's field".into()));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.exponents.len()
    }

    /// The same datum over F_{q^{de}} (characters composed with the norm, a embedded).
    pub fn lift(&self, ctx: &CharContext, e: u32) -> Result<Self> {
        let t = ctx.tower();
        let deg = self.degree * e;
        Ok(MonomialDatum {
            degree: deg,
            exponents: self.exponents.clone(),
            chars: self.chars.iter().map(|c| c.lift(t, deg)).collect::<Result<_>>()?,
            a: t.embed(self.a, deg)?,
        })
    }
}

impl fmt::Display for MonomialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chars: Vec<u64> = self.chars.iter().map(|c| c.index()).collect();
        write!(f, "n={:?} chi={:?} a={} (deg {})", self.exponents, chars, self.a.code(), self.degree)
    }
}

/// d = gcd|n_i|, χ_i = η^{n_i/d}; positive and negative reduced exponents split.
struct Normalized {
    d: u64,
    eta: MultCharacter,
    xs: Vec<u64>,
    ys: Vec<u64>,
}

fn normalize(exps: &[i64], chars: &[MultCharacter]) -> Option<Normalized> {
    let d = exps.iter().fold(0u64, |g, &n| gcd(g, n.unsigned_abs()));
    let o = chars[0].group_order();
    let eqs: Vec<(i64, u64)> = exps.iter().zip(chars).map(|(&n, c)| (n / d as i64, c.index())).collect();
    let (u, _) = solve_system(&eqs, o)?;
    let eta = chars[0].with_index(u);
    let xs = exps.iter().filter(|&&n| n > 0).map(|&n| n as u64 / d).collect();
    let ys = exps.iter().filter(|&&n| n < 0).map(|&n| n.unsigned_abs() / d).collect();
    Some(Normalized { d, eta, xs, ys })
}

struct StalkEval<'a> {
    ctx: &'a CharContext,
    norm: Normalized,
    a: FieldElement,
    q: u64,
    memo: HashMap<(Vec<u64>, Vec<u64>), CycloValue>,
}

impl StalkEval<'_> {
    /// Σ_{t ∈ F^*} ψ(a t^{d·g}) η^g(t) + [η^g = 1].
    fn base2(&self, g: u64) -> Result<CycloValue> {
        let t = self.ctx.tower();
        let deg = self.a.degree();
        let o = t.unit_order(deg)?;
        let tr = self.ctx.trace_table(deg)?;
        let la = t.discrete_log(self.a)?;
        let eta = self.norm.eta.pow(g as i64);
        let p = self.ctx.p();
        let ord = eta.order();
        let m = lcm(p, ord);
        let mut acc = RootAccumulator::new(m);
        let step = (self.norm.d * g) % o;
        for k in 0..o {
            let e = (la + (k as u128 * step as u128 % o as u128) as u64) % o;
            let ce = eta.exponent_at(k);
            acc.add_root(tr[e as usize] as u64 * (m / p) + ce * (m / ord), 1);
        }
        if eta.is_trivial() {
            acc.add_root(0, 1);
        }
        Ok(acc.finish())
    }

    fn value(&mut self, xs: &[u64], ys: &[u64]) -> Result<CycloValue> {
        let mut xs = xs.to_vec();
        let mut ys = ys.to_vec();
        xs.sort_unstable();
        ys.sort_unstable();
        let key = (xs.clone(), ys.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = if ys.is_empty() {
            let smooth = xs.iter().all(|&n| self.norm.eta.pow(n as i64).is_trivial());
            CycloValue::from_int(smooth as i64)
        } else if xs.is_empty() {
            CycloValue::zero()
        } else if xs.len() == 1 && ys.len() == 1 {
            self.base2(gcd(xs[0], ys[0]))?
        } else {
            let first = self.recurse(&xs, &ys, 0, 0, false)?;
            let alt = self.recurse(&xs, &ys, xs.len() - 1, ys.len() - 1, true)?;
            if first != alt {
                return Err(Error::InvariantBreach(format!(
                    "stalk recursion depends on the pivot for exponents {xs:?} / {ys:?}"
                )));
            }
            first
        };
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn recurse(&mut self, xs: &[u64], ys: &[u64], i: usize, j: usize, absorb_last: bool) -> Result<CycloValue> {
        let (n1, m1) = (xs[i], ys[j]);
        let n = lcm(n1, m1);
        let mut rx: Vec<u64> = xs.to_vec();
        rx.remove(i);
        let mut ry: Vec<u64> = ys.to_vec();
        ry.remove(j);
        let pick = |v: &Vec<u64>| if absorb_last { v.len() - 1 } else { 0 };
        let torus = if !rx.is_empty() {
            let mut ax = rx.clone();
            let t = pick(&ax);
            ax[t] = lcm(n, ax[t]);
            self.value(&ax, &ry)?
        } else {
            let mut ay = ry.clone();
            let t = pick(&ay);
            ay[t] = lcm(n, ay[t]);
            self.value(&rx, &ay)?
        };
        let torus = torus.scale(&BigInt::from(self.q - 1));
        let mut px = rx.clone();
        px.push(n);
        let left = self.value(&px, &ry)?;
        let mut py = ry.clone();
        py.push(n);
        let right = self.value(&rx, &py)?;
        Ok(&(&torus + &left) + &right)
    }
}

/// T_0 for raw parts (exponents, characters, coefficient a ≠ 0).
fn stalk_parts(ctx: &CharContext, exps: &[i64], chars: &[MultCharacter], a: FieldElement) -> Result<CycloValue> {
    let Some(norm) = normalize(exps, chars) else {
        return Ok(CycloValue::zero());
    };
    let q = ctx.tower().size(a.degree())?;
    let (xs, ys) = (norm.xs.clone(), norm.ys.clone());
    let mut ev = StalkEval { ctx, norm, a, q, memo: HashMap::new() };
    ev.value(&xs, &ys)
}

/// Trace of Frobenius on the stalk at the origin.
pub fn stalk_trace_at_zero(ctx: &CharContext, datum: &MonomialDatum) -> Result<CycloValue> {
    datum.validate(ctx)?;
    stalk_parts(ctx, &datum.exponents, &datum.chars, datum.a)
}

/// Whether the boundary product rule is trusted for this datum.
pub fn trace_function_supported(datum: &MonomialDatum) -> bool {
    let k = datum.k();
    k <= 2 || datum.exponents.iter().all(|n| n.unsigned_abs() == datum.exponents[0].unsigned_abs())
}

/// The full trace function on F_{q^d}^k.
pub fn gm_trace_function(ctx: &CharContext, datum: &MonomialDatum) -> Result<GridFunction> {
    datum.validate(ctx)?;
    if !trace_function_supported(datum) {
        return Err(Error::Unsupported(format!("trace function of {datum}: mixed exponents with k ≥ 3")));
    }
    let t = ctx.tower();
    let deg = datum.degree;
    let o = t.unit_order(deg)?;
    let k = datum.k();
    let tr = ctx.trace_table(deg)?;
    let la = t.discrete_log(datum.a)?;
    let p = ctx.p();
    let mut stalks: HashMap<(Vec<usize>, u64), CycloValue> = HashMap::new();
    GridFunction::try_from_coords(ctx, deg, k, |coords| {
        // coordinate 0 is the zero element, e + 1 is g^e
        let zero_set: Vec<usize> = (0..k).filter(|&i| coords[i] == 0).collect();
        let mut chi_part = CycloValue::one();
        let mut mono = la as i128;
        for (i, &c) in coords.iter().enumerate() {
            if c != 0 {
                let e = c - 1;
                chi_part = &chi_part * &datum.chars[i].eval_index(e);
                mono += datum.exponents[i] as i128 * e as i128;
            }
        }
        let mono = mono.rem_euclid(o as i128) as u64;
        if zero_set.is_empty() {
            return Ok(&chi_part * &CycloValue::root(p, tr[mono as usize] as i64));
        }
        let key = (zero_set.clone(), mono);
        let t0 = match stalks.get(&key) {
            Some(v) => v.clone(),
            None => {
                let exps: Vec<i64> = zero_set.iter().map(|&i| datum.exponents[i]).collect();
                let chars: Vec<MultCharacter> = zero_set.iter().map(|&i| datum.chars[i]).collect();
                let v = stalk_parts(ctx, &exps, &chars, t.gen_pow(deg, mono)?)?;
                stalks.insert(key, v.clone());
                v
            }
        };
        Ok(&chi_part * &t0)
    })
}

/// The ±d-shaped datum x_1^d⋯x_n^d / y_1^d⋯y_m^d with χ(x_1⋯x_n / y_1⋯y_m).
pub fn gmtr_datum(
    ctx: &CharContext,
    n: usize,
    m: usize,
    d: u64,
    chi: &MultCharacter,
    a: FieldElement,
) -> Result<MonomialDatum> {
    let mut exps = vec![d as i64; n];
    exps.extend(std::iter::repeat_n(-(d as i64), m));
    let mut chars = vec![*chi; n];
    chars.extend(std::iter::repeat_n(chi.inv(), m));
    MonomialDatum::new(ctx, exps, chars, a)
}

/// a(n,m) + b(n,m)·Σ_{t∈F} ψ(a t^d) for χ = 1, b(n,m)·Σ_{t∈F^*} ψ(a t^d)χ(t) otherwise.
pub fn gmtr_closed_form(
    ctx: &CharContext,
    n: u64,
    m: u64,
    d: u64,
    chi: &MultCharacter,
    a: FieldElement,
) -> Result<CycloValue> {
    let t = ctx.tower();
    let deg = a.degree();
    let q = BigInt::from(t.size(deg)?);
    let mut sum = CycloValue::zero();
    for x in t.elements(deg)?.skip(1) {
        let v = &ctx.eval_add(t.mul(a, t.pow(x, d as i64)?)?)? * &ctx.eval_mult(chi, x)?;
        sum = &sum + &v;
    }
    let bv = CycloValue::from_int(b_poly(n, m).eval(&q));
    if chi.is_trivial() {
        let full = &sum + &CycloValue::one();
        Ok(&CycloValue::from_int(a_poly(n, m).eval(&q)) + &(&bv * &full))
    } else {
        Ok(&bv * &sum)
    }
}

#[derive(Clone, Debug)]
pub struct BinomialCheck {
    pub name: &'static str,
    pub n: u64,
    pub r: u64,
    pub s: u64,
    pub lhs: QPolynomial,
    pub rhs: QPolynomial,
}

impl BinomialCheck {
    pub fn pass(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn binomial_lhs(n: u64, r: u64, s: u64, f: fn(u64, u64) -> QPolynomial) -> QPolynomial {
    let qm1 = QPolynomial::q().sub(&QPolynomial::one());
    let (ni, ri, si) = (n as i64, r as i64, s as i64);
    let mut acc = QPolynomial::zero();
    for i in 0..=ri {
        for j in 0..=ni - ri {
            for k in 0..=si {
                for l in 0..=ni - si {
                    if (i, j, k, l) == (0, 0, 0, 0) {
                        continue;
                    }
                    let coef = c(ri, i) * c(ni - ri, j) * c(si, k) * c(ni - si, l);
                    let sign = if (ri + si + j + l) % 2 == 0 { 1 } else { -1 };
                    let term =
                        qm1.pow((ri + si - i - k) as u32).scale(coef * sign).mul(&f((i + j) as u64, (k + l) as u64));
                    acc = acc.add(&term);
                }
            }
        }
    }
    acc
}

/// The four binomial identities for the given (n, r, s); two of them apply per point.
pub fn verify_binomial_identities(n: u64, r: u64, s: u64) -> Result<Vec<BinomialCheck>> {
    if n == 0 || r > n || s > n {
        return Err(Error::InvalidInput(format!("need n ≥ 1 and 0 ≤ r, s ≤ n, got ({n}, {r}, {s})")));
    }
    let qn = QPolynomial::monomial(1, n as usize);
    if (r, s) == (0, 0) {
        let sum = |f: fn(u64, u64) -> QPolynomial| {
            let mut acc = QPolynomial::zero();
            for j in 0..=n as i64 {
                for l in 0..=n as i64 {
                    if (j, l) == (0, 0) {
                        continue;
                    }
                    let sign = if (j + l) % 2 == 0 { 1 } else { -1 };
                    acc = acc.add(&f(j as u64, l as u64).scale(c(n as i64, j) * c(n as i64, l) * sign));
                }
            }
            acc
        };
        let g = QPolynomial::geometric(n as usize);
        return Ok(vec![
            BinomialCheck { name: "binom2", n, r, s, lhs: sum(a_poly), rhs: g.neg() },
            BinomialCheck { name: "binom4", n, r, s, lhs: sum(b_poly), rhs: g },
        ]);
    }
    let qm1 = QPolynomial::q().sub(&QPolynomial::one());
    let e = qm1.pow((r + s - 1) as u32);
    let e = if (r + s).is_multiple_of(2) { e } else { e.neg() };
    Ok(vec![
        // the a-identity pairs a(s, r) with the point (r, s): x̂-zeros count towards y-exponents
        BinomialCheck {
            name: "binom1",
            n,
            r,
            s,
            lhs: binomial_lhs(n, r, s, a_poly),
            rhs: qn.mul(&a_poly(s, r)).add(&e),
        },
        BinomialCheck {
            name: "binom3",
            n,
            r,
            s,
            lhs: binomial_lhs(n, r, s, b_poly),
            rhs: qn.mul(&b_poly(r, s)).sub(&e),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, degs: &[u32]) -> CharContext {
        CharContext::build(p, 1, degs).unwrap()
    }

    fn qp(v: &[i64]) -> QPolynomial {
        QPolynomial::new(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(a_poly(1, 1), QPolynomial::zero());
        assert_eq!(b_poly(1, 1), QPolynomial::one());
        assert_eq!(a_poly(2, 1), QPolynomial::q());
        assert_eq!(b_poly(2, 2), qp(&[1, 1]));
        assert_eq!(a_poly(5, 0), QPolynomial::one());
        assert_eq!(b_poly(5, 0), QPolynomial::zero());
        assert_eq!(qp(&[-1, 0, 3]).to_string(), "3*q^2 - 1");
    }

    #[test]
    fn recurrences() {
        let q = QPolynomial::q();
        let qm1 = q.sub(&QPolynomial::one());
        for n in 1..=8u64 {
            for m in 1..=8u64 {
                assert_eq!(b_poly(n, m).sub(&b_poly(n, m - 1)), a_poly(n, m - 1), "b rec {n} {m}");
                if n >= 2 {
                    assert_eq!(a_poly(n, m).sub(&a_poly(n - 1, m)), q.mul(&b_poly(n - 1, m)), "a rec {n} {m}");
                }
                if n >= 2 {
                    for f in [a_poly, b_poly] {
                        let rhs = qm1.mul(&f(n - 1, m - 1)).add(&f(n - 1, m)).add(&f(n, m - 1));
                        assert_eq!(f(n, m), rhs, "three-term {n} {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn origin_examples() {
        let c = ctx(7, &[1]);
        let t = c.tower();
        let e3 = c.eps(1, 3).unwrap();
        let d = MonomialDatum::new(&c, vec![3, -1], vec![c.trivial(1).unwrap(), e3], t.one(1)).unwrap();
        assert_eq!(stalk_trace_at_zero(&c, &d).unwrap(), c.gauss_sum(&e3.inv()).unwrap());

        let c5 = ctx(5, &[1]);
        let t5 = c5.tower();
        let e4 = c5.eps(1, 4).unwrap();
        for a in t5.elements(1).unwrap().skip(1) {
            let d =
                MonomialDatum::new(&c5, vec![4, -2], vec![c5.trivial(1).unwrap(), c5.eps(1, 2).unwrap()], a).unwrap();
            let ai = t5.inv(a).unwrap();
            let expect = &(&c5.gauss_sum(&e4).unwrap() * &c5.eval_mult(&e4, ai).unwrap())
                + &(&c5.gauss_sum(&e4.inv()).unwrap() * &c5.eval_mult(&e4, a).unwrap());
            assert_eq!(stalk_trace_at_zero(&c5, &d).unwrap(), expect);
        }

        let c3 = ctx(3, &[1]);
        let one = c3.trivial(1).unwrap();
        let d = MonomialDatum::new(&c3, vec![1, -1], vec![one, one], c3.tower().one(1)).unwrap();
        assert!(stalk_trace_at_zero(&c3, &d).unwrap().is_zero());
    }

    #[test]
    fn vanishing_rules() {
        let c = ctx(7, &[1]);
        let t = c.tower();
        let one = c.trivial(1).unwrap();
        let e2 = c.eps(1, 2).unwrap();
        let all_neg = MonomialDatum::new(&c, vec![-1, -2], vec![one, e2], t.one(1)).unwrap();
        assert!(stalk_trace_at_zero(&c, &all_neg).unwrap().is_zero());
        // reduced exponents (1, −1) need η = ε_2 and η^{-1} = 1
        let no_eta = MonomialDatum::new(&c, vec![2, -2], vec![e2, one], t.one(1)).unwrap();
        assert!(stalk_trace_at_zero(&c, &no_eta).unwrap().is_zero());
        let single = MonomialDatum::new(&c, vec![3], vec![one], t.one(1)).unwrap();
        assert_eq!(stalk_trace_at_zero(&c, &single).unwrap(), CycloValue::one());
        let single = MonomialDatum::new(&c, vec![1], vec![e2], t.one(1)).unwrap();
        assert!(stalk_trace_at_zero(&c, &single).unwrap().is_zero());
    }

    #[test]
    fn gmtr_consistency_small() {
        for p in [3u64, 5] {
            let c = ctx(p, &[1]);
            let t = c.tower();
            let o = p - 1;
            for (n, m) in [(1usize, 1usize), (2, 1), (1, 2), (2, 2), (3, 1)] {
                for d in crate::arith::divisors(o).into_iter().filter(|d| d % p != 0) {
                    for chi in MultCharacter::all(t, 1).unwrap() {
                        for a in t.elements(1).unwrap().skip(1) {
                            let datum = gmtr_datum(&c, n, m, d, &chi, a).unwrap();
                            let got = stalk_trace_at_zero(&c, &datum).unwrap();
                            let want = gmtr_closed_form(&c, n as u64, m as u64, d, &chi, a).unwrap();
                            assert_eq!(got, want, "p={p} n={n} m={m} d={d} chi={chi}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn example_two_trace_function() {
        let c = ctx(7, &[1]);
        let t = c.tower();
        let e3 = c.eps(1, 3).unwrap();
        let d = MonomialDatum::new(&c, vec![3, -1], vec![c.trivial(1).unwrap(), e3], t.one(1)).unwrap();
        let f = gm_trace_function(&c, &d).unwrap();
        let z = t.zero(1);
        assert_eq!(f.at(&c, &[z, z]).unwrap(), &c.gauss_sum(&e3.inv()).unwrap());
        for x in t.elements(1).unwrap().skip(1) {
            assert!(f.at(&c, &[x, z]).unwrap().is_zero());
            for y in t.elements(1).unwrap().skip(1) {
                let v = t.mul(t.pow(x, 3).unwrap(), t.inv(y).unwrap()).unwrap();
                let want = &c.eval_add(v).unwrap() * &c.eval_mult(&e3, y).unwrap();
                assert_eq!(f.at(&c, &[x, y]).unwrap(), &want);
            }
        }
    }

    #[test]
    fn smooth_extension_is_one() {
        let c = ctx(3, &[1]);
        let t = c.tower();
        let one = c.trivial(1).unwrap();
        let d = MonomialDatum::new(&c, vec![1, 1], vec![one, one], t.one(1)).unwrap();
        let f = gm_trace_function(&c, &d).unwrap();
        let z = t.zero(1);
        for x in t.elements(1).unwrap() {
            assert_eq!(f.at(&c, &[x, z]).unwrap(), &CycloValue::one());
            assert_eq!(f.at(&c, &[z, x]).unwrap(), &CycloValue::one());
        }
    }

    #[test]
    fn unsupported_and_invalid() {
        let c = ctx(7, &[1]);
        let t = c.tower();
        let one = c.trivial(1).unwrap();
        let d = MonomialDatum::new(&c, vec![1, 2, -1], vec![one; 3], t.one(1)).unwrap();
        assert!(matches!(gm_trace_function(&c, &d), Err(Error::Unsupported(_))));
        assert!(MonomialDatum::new(&c, vec![7], vec![one], t.one(1)).is_err());
        assert!(MonomialDatum::new(&c, vec![1], vec![one], t.zero(1)).is_err());
        assert!(verify_binomial_identities(2, 3, 0).is_err());
    }

    #[test]
    fn binomial_identities() {
        for n in 1..=5 {
            for r in 0..=n {
                for s in 0..=n {
                    for chk in verify_binomial_identities(n, r, s).unwrap() {
                        assert!(chk.pass(), "{} at ({n},{r},{s}): {} vs {}", chk.name, chk.lhs, chk.rhs);
                    }
                }
            }
        }
    }
}
