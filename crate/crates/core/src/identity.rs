//! Gauss-sum monomials ∏ g(λ^{n_i} χ_i): prediction from divisors,
//! exact verification, and falsification when the divisor is nonzero.

use std::fmt;

use crate::characters::{CharContext, MultCharacter};
use crate::cyclotomic::CycloValue;
use crate::divisor::{divisor_of_char_power, Divisor};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaMonomial {
    terms: Vec<(MultCharacter, i64)>,
}

impl GammaMonomial {
    pub fn new(terms: Vec<(MultCharacter, i64)>) -> Self {
        GammaMonomial { terms }
    }

    pub fn terms(&self) -> &[(MultCharacter, i64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The Hasse–Davenport product {(1, n), (ε_n^i, −1) : i < n} over the given degree.
    pub fn hd_product(ctx: &CharContext, degree: u32, n: u64) -> Result<Self> {
        let eps = ctx.eps(degree, n)?;
        let mut terms = vec![(ctx.trivial(degree)?, n as i64)];
        terms.extend((0..n).map(|i| (eps.pow(i as i64), -1)));
        Ok(GammaMonomial { terms })
    }

    /// Σ_i D_{χ_i, n_i}.
    pub fn predicted_divisor(&self, p: u64) -> Result<Divisor> {
        self.terms.iter().try_fold(Divisor::zero(), |acc, (chi, n)| Ok(acc.add(&divisor_of_char_power(chi, *n, p)?)))
    }

    fn lifted(&self, ctx: &CharContext, d: u32) -> Result<Vec<(MultCharacter, i64)>> {
        self.terms.iter().map(|(c, n)| Ok((c.lift(ctx.tower(), d)?, *n))).collect()
    }
}

impl fmt::Display for GammaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(c, n)| format!("({c}, {n})")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaincorOutcome {
    /// Exponent of q^d with ∏ g(λ^{n_i}χ_i) = (q^d)^m ∏ λ(n_i^{n_i}) g(χ_i).
    pub m: i64,
    /// Whether every λ^{n_i}χ_i was nontrivial, so that 2m = #{χ_i = 1} was checked.
    pub parity_checked: bool,
}

/// Verify the monomial identity at the degree of λ; the characters χ_i are lifted by the norm.
pub fn verify_maincor(ctx: &CharContext, mono: &GammaMonomial, lambda: &MultCharacter) -> Result<MaincorOutcome> {
    let div = mono.predicted_divisor(ctx.p())?;
    if !div.is_zero() {
        return Err(Error::Inapplicable(format!("monomial divisor is {div}, not 0")));
    }
    let d = lambda.degree();
    let t = ctx.tower();
    let qd = t.size(d)?;
    let mut lhs = CycloValue::one();
    let mut rhs = CycloValue::one();
    let mut all_nontrivial = true;
    let mut trivial_count = 0i64;
    for (chi, n) in mono.lifted(ctx, d)? {
        let shifted = lambda.pow(n).mul(&chi)?;
        all_nontrivial &= !shifted.is_trivial();
        trivial_count += chi.is_trivial() as i64;
        lhs = &lhs * &ctx.gauss_sum(&shifted)?;
        let nn = t.pow(t.from_int(d, n), n)?;
        rhs = &(&rhs * &ctx.eval_mult(lambda, nn)?) * &ctx.gauss_sum(&chi)?;
    }
    let m = CycloValue::q_power_ratio(&lhs, &rhs, qd).ok_or_else(|| {
        Error::InvariantBreach(format!("no power of {qd} relates the two sides of {mono} at {lambda}"))
    })?;
    if all_nontrivial && 2 * m != trivial_count {
        return Err(Error::InvariantBreach(format!(
            "parity: 2m = {} but {trivial_count} trivial characters in {mono} at {lambda}",
            2 * m
        )));
    }
    Ok(MaincorOutcome { m, parity_checked: all_nontrivial })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationSearch {
    /// The divisor vanishes; the identity holds and no search is made.
    ZeroDivisor,
    Witness {
        degree: u32,
        lambda: MultCharacter,
    },
    Inconclusive {
        depth: u32,
    },
}

/// |N(λ)|², |D(λ)|² with N = ∏_{n_i>0} g(λ^{n_i}χ_i), D = ∏_{n_i<0} g(λ^{|n_i|}χ_i^{-1}).
fn divided_magnitudes(
    ctx: &CharContext,
    lifted: &[(MultCharacter, i64)],
    lambda: &MultCharacter,
) -> Result<(num_bigint::BigInt, num_bigint::BigInt)> {
    let mut num = num_bigint::BigInt::from(1);
    let mut den = num_bigint::BigInt::from(1);
    for (chi, n) in lifted {
        if *n > 0 {
            num *= ctx.gauss_sum(&lambda.pow(*n).mul(chi)?)?.abs_squared()?;
        } else {
            den *= ctx.gauss_sum(&lambda.pow(-n).mul(&chi.inv())?)?.abs_squared()?;
        }
    }
    Ok((num, den))
}

/// First (d, λ), degrees ascending then index ascending, at which N(λ)/D(λ) cannot be of
/// the form c^d·λ(a)·N(1)/D(1): the magnitudes |N|²|D(1)|² and |N(1)|²|D|² differ.
pub fn scan_for_violation(
    ctx: &CharContext,
    mono: &GammaMonomial,
    max_degree: u32,
) -> Result<Option<(u32, MultCharacter)>> {
    for d in 1..=max_degree {
        if !ctx.tower().has_degree(d) || mono.terms.iter().any(|(c, _)| d % c.degree() != 0) {
            continue;
        }
        let lifted = mono.lifted(ctx, d)?;
        let (n0, d0) = divided_magnitudes(ctx, &lifted, &ctx.trivial(d)?)?;
        for lambda in MultCharacter::all(ctx.tower(), d)? {
            let (n1, d1) = divided_magnitudes(ctx, &lifted, &lambda)?;
            if &n1 * &d0 != &n0 * &d1 {
                return Ok(Some((d, lambda)));
            }
        }
    }
    Ok(None)
}

pub fn find_violation(ctx: &CharContext, mono: &GammaMonomial, max_degree: u32) -> Result<ViolationSearch> {
    if mono.predicted_divisor(ctx.p())?.is_zero() {
        return Ok(ViolationSearch::ZeroDivisor);
    }
    Ok(match scan_for_violation(ctx, mono, max_degree)? {
        Some((degree, lambda)) => ViolationSearch::Witness { degree, lambda },
        None => ViolationSearch::Inconclusive { depth: max_degree },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::XPoint;

    fn ctx(p: u64, degs: &[u32]) -> CharContext {
        CharContext::build(p, 1, degs).unwrap()
    }

    #[test]
    fn predicted_examples() {
        let c = ctx(7, &[1]);
        let one = c.trivial(1).unwrap();
        let e2 = c.eps(1, 2).unwrap();
        let e3 = c.eps(1, 3).unwrap();
        let m = GammaMonomial::new(vec![(one, 2), (one, -1), (e2, -1)]);
        assert!(m.predicted_divisor(7).unwrap().is_zero());
        assert!(GammaMonomial::new(vec![]).predicted_divisor(7).unwrap().is_zero());
        let m = GammaMonomial::new(vec![(one, 3), (e3, -1)]);
        let mut expect = Divisor::point(XPoint::zero());
        expect.add_point(XPoint::new(1, 3), 1);
        assert_eq!(m.predicted_divisor(7).unwrap(), expect);
    }

    #[test]
    fn maincor_examples() {
        let c = ctx(7, &[1, 2]);
        let one = c.trivial(1).unwrap();
        let e2 = c.eps(1, 2).unwrap();
        let m = GammaMonomial::new(vec![(one, 2), (one, -1), (e2, -1)]);
        let out = verify_maincor(&c, &m, &c.eps(1, 3).unwrap()).unwrap();
        assert_eq!(out, MaincorOutcome { m: 1, parity_checked: true });
        let out = verify_maincor(&c, &m, &one).unwrap();
        assert!(!out.parity_checked);
        for lam in MultCharacter::all(c.tower(), 2).unwrap() {
            verify_maincor(&c, &m, &lam).unwrap();
        }
        let bad = GammaMonomial::new(vec![(one, 3), (c.eps(1, 3).unwrap(), -1)]);
        assert!(matches!(verify_maincor(&c, &bad, &one), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn hd_products_in_maincor_form() {
        let c = ctx(13, &[1]);
        for n in [2u64, 3, 4, 6, 12] {
            let m = GammaMonomial::hd_product(&c, 1, n).unwrap();
            for lam in MultCharacter::all(c.tower(), 1).unwrap() {
                verify_maincor(&c, &m, &lam).unwrap();
            }
        }
    }

    #[test]
    fn stability_under_extension() {
        // at λ∘Nm the exponent over F_{q^2} equals the exponent over F_q
        let c = ctx(5, &[1, 2]);
        let m = GammaMonomial::hd_product(&c, 1, 4).unwrap();
        for lam in MultCharacter::all(c.tower(), 1).unwrap() {
            let m1 = verify_maincor(&c, &m, &lam).unwrap().m;
            let m2 = verify_maincor(&c, &m, &lam.lift(c.tower(), 2).unwrap()).unwrap().m;
            assert_eq!(m1, m2);
        }
    }

    #[test]
    fn violation_examples() {
        let c = ctx(3, &[1, 2]);
        let one = c.trivial(1).unwrap();
        let e2 = c.eps(1, 2).unwrap();
        let zero = GammaMonomial::new(vec![(one, 2), (one, -1), (e2, -1)]);
        assert_eq!(find_violation(&c, &zero, 2).unwrap(), ViolationSearch::ZeroDivisor);
        assert_eq!(scan_for_violation(&c, &zero, 2).unwrap(), None);
        let broken = GammaMonomial::new(vec![(one, 1), (e2, -1)]);
        assert_eq!(find_violation(&c, &broken, 1).unwrap(), ViolationSearch::Witness { degree: 1, lambda: e2 });
        let c7 = ctx(7, &[1, 2]);
        let broken = GammaMonomial::new(vec![(c7.trivial(1).unwrap(), 3), (c7.eps(1, 3).unwrap(), -1)]);
        assert!(matches!(find_violation(&c7, &broken, 2).unwrap(), ViolationSearch::Witness { .. }));
    }
}
