//! Functions on F_{q^d}^k, their exact Fourier transforms, the I-sums, and
//! the monomial transform solver with its two verifiers.
//!
//! Grid coordinates: 0 is the zero element, e + 1 is g_d^e; points are stored row-major.

use num_bigint::BigInt;

use crate::arith::{gcd, lcm, solve_system};
use crate::characters::{CharContext, MultCharacter};
use crate::cyclotomic::{CycloValue, RootAccumulator};
use crate::divisor::{divisor_of_char_power, Divisor, XPoint};
use crate::error::{Error, Result};
use crate::field_tower::FieldElement;
use crate::stalk::{gm_trace_function, MonomialDatum};

/// Default bound on the number of terms q^{2dk} of a naive transform.
pub const DEFAULT_MAX_TERMS: u128 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridFunction {
    degree: u32,
    k: usize,
    side: u64,
    values: Vec<CycloValue>,
}

impl GridFunction {
    pub fn new(ctx: &CharContext, degree: u32, k: usize, values: Vec<CycloValue>) -> Result<Self> {
        let side = ctx.tower().size(degree)?;
        let len = grid_len(side, k)?;
        if values.len() as u128 != len {
            return Err(Error::InvalidInput(format!("grid needs {len} values, got {}", values.len())));
        }
        Ok(GridFunction { degree, k, side, values })
    }

    /// Build from a closure on coordinate vectors.
    pub fn try_from_coords(
        ctx: &CharContext,
        degree: u32,
        k: usize,
        mut f: impl FnMut(&[u64]) -> Result<CycloValue>,
    ) -> Result<Self> {
        let side = ctx.tower().size(degree)?;
        let len = grid_len(side, k)? as usize;
        let mut values = Vec::with_capacity(len);
        let mut coords = vec![0u64; k];
        for _ in 0..len {
            values.push(f(&coords)?);
            bump(&mut coords, side);
        }
        Ok(GridFunction { degree, k, side, values })
    }

    /// Build from a closure on field points.
    pub fn try_from_points(
        ctx: &CharContext,
        degree: u32,
        k: usize,
        mut f: impl FnMut(&[FieldElement]) -> Result<CycloValue>,
    ) -> Result<Self> {
        let t = ctx.tower();
        Self::try_from_coords(ctx, degree, k, |c| {
            let pts = c.iter().map(|&x| coord_element(t, degree, x)).collect::<Result<Vec<_>>>()?;
            f(&pts)
        })
    }

    /// The indicator of the origin.
    pub fn delta(ctx: &CharContext, degree: u32, k: usize) -> Result<Self> {
        Self::try_from_coords(ctx, degree, k, |c| Ok(CycloValue::from_int(c.iter().all(|&x| x == 0) as i64)))
    }

    /// λ_1 ⊗ … ⊗ λ_k, extended by zero.
    pub fn character_product(ctx: &CharContext, chars: &[MultCharacter]) -> Result<Self> {
        let degree = chars.first().ok_or_else(|| Error::InvalidInput("no characters".into()))?.degree();
        Self::try_from_coords(ctx, degree, chars.len(), |c| {
            if c.contains(&0) {
                return Ok(CycloValue::zero());
            }
            Ok(chars.iter().zip(c).map(|(l, &x)| l.eval_index(x - 1)).product())
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// q^d.
    pub fn side(&self) -> u64 {
        self.side
    }

    pub fn values(&self) -> &[CycloValue] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, coords: &[u64]) -> usize {
        coords.iter().fold(0usize, |acc, &c| acc * self.side as usize + c as usize)
    }

    pub fn coords_of(&self, mut idx: usize) -> Vec<u64> {
        let mut c = vec![0u64; self.k];
        for slot in c.iter_mut().rev() {
            *slot = (idx % self.side as usize) as u64;
            idx /= self.side as usize;
        }
        c
    }

    pub fn at_coords(&self, coords: &[u64]) -> &CycloValue {
        &self.values[self.index_of(coords)]
    }

    pub fn at(&self, ctx: &CharContext, point: &[FieldElement]) -> Result<&CycloValue> {
        let c = point.iter().map(|&x| element_coord(ctx, x)).collect::<Result<Vec<_>>>()?;
        Ok(self.at_coords(&c))
    }

    fn same_grid(&self, o: &Self) -> Result<()> {
        if (self.degree, self.k) != (o.degree, o.k) {
            return Err(Error::InvalidInput(format!(
                "grid mismatch: (deg {}, k {}) vs (deg {}, k {})",
                self.degree, self.k, o.degree, o.k
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &CycloValue) -> Self {
        GridFunction { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    /// x ↦ f(s_1 x_1, …, s_k x_k) for units s_i.
    pub fn rescaled(&self, ctx: &CharContext, factors: &[FieldElement]) -> Result<Self> {
        let o = self.side - 1;
        let logs = factors.iter().map(|&s| ctx.tower().discrete_log(s)).collect::<Result<Vec<_>>>()?;
        let values = (0..self.len())
            .map(|i| {
                let c: Vec<u64> = self
                    .coords_of(i)
                    .iter()
                    .zip(&logs)
                    .map(|(&x, &l)| if x == 0 { 0 } else { (x - 1 + l) % o + 1 })
                    .collect();
                self.at_coords(&c).clone()
            })
            .collect();
        Ok(GridFunction { values, ..self.clone() })
    }

    /// x ↦ f(−x).
    pub fn reflected(&self, ctx: &CharContext) -> Result<Self> {
        let m1 = ctx.tower().from_int(self.degree, -1);
        self.rescaled(ctx, &vec![m1; self.k])
    }
}

fn grid_len(side: u64, k: usize) -> Result<u128> {
    (side as u128).checked_pow(k as u32).ok_or_else(|| Error::SizeBound {
        what: "grid".into(),
        size: u128::MAX,
        limit: u64::MAX as u128,
    })
}

fn bump(c: &mut [u64], side: u64) {
    for slot in c.iter_mut().rev() {
        *slot += 1;
        if *slot < side {
            return;
        }
        *slot = 0;
    }
}

/// Field element at a grid coordinate.
pub fn coord_element(t: &crate::field_tower::FieldTower, degree: u32, c: u64) -> Result<FieldElement> {
    if c == 0 {
        Ok(t.zero(degree))
    } else {
        t.gen_pow(degree, c - 1)
    }
}

/// Grid coordinate of a field element.
pub fn element_coord(ctx: &CharContext, x: FieldElement) -> Result<u64> {
    if x.is_zero() {
        Ok(0)
    } else {
        Ok(ctx.tower().discrete_log(x)? + 1)
    }
}

/// f̂(x*) = Σ_x f(x) ψ(⟨x*, x⟩), naive and exact.
pub fn fourier_transform(ctx: &CharContext, f: &GridFunction, max_terms: u128) -> Result<GridFunction> {
    let n = f.len() as u128;
    if n * n > max_terms {
        return Err(Error::SizeBound { what: "fourier transform terms".into(), size: n * n, limit: max_terms });
    }
    let p = ctx.p();
    let side = f.side as usize;
    let o = f.side - 1;
    let tr = ctx.trace_table(f.degree)?;
    // pair[c* · side + c] = exponent of ψ(x* x) for one coordinate
    let mut pair = vec![0u32; side * side];
    for a in 1..side {
        for b in 1..side {
            pair[a * side + b] = tr[((a - 1 + b - 1) as u64 % o) as usize];
        }
    }
    let m = f.values.iter().fold(p, |acc, v| lcm(acc, v.order()));
    let dense: Option<Vec<Vec<i64>>> = f.values.iter().map(|v| v.dense_i64(m)).collect();
    let coords: Vec<Vec<u64>> = (0..f.len()).map(|i| f.coords_of(i)).collect();
    let step = m / p;
    let mut out = Vec::with_capacity(f.len());
    for xs in &coords {
        let shift = |x: &Vec<u64>| -> u64 {
            xs.iter().zip(x).map(|(&a, &b)| pair[a as usize * side + b as usize] as u64).sum::<u64>() % p
        };
        match &dense {
            Some(dense) => {
                let mut acc = RootAccumulator::new(m);
                for (x, dv) in coords.iter().zip(dense) {
                    acc.add_shifted(dv, shift(x) * step);
                }
                out.push(acc.finish());
            }
            None => {
                let mut acc = CycloValue::zero();
                for (x, v) in coords.iter().zip(&f.values) {
                    if !v.is_zero() {
                        acc = &acc + &v.lift(m)?.mul_root((shift(x) * step) as i64);
                    }
                }
                out.push(acc);
            }
        }
    }
    Ok(GridFunction { values: out, ..f.clone() })
}

/// (f, g) = Σ f(x) conj(g(x)).
pub fn inner(f: &GridFunction, g: &GridFunction) -> Result<CycloValue> {
    f.same_grid(g)?;
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * &b.conjugate()).sum())
}

/// Characters of F_{q^d}^* seen as the group Z/(q^d − 1): index of ψ(c·g^e).
fn psi_at(tr: &[u32], o: u64, log_c: u64, e: u64) -> u64 {
    tr[((log_c + e % o) % o) as usize] as u64
}

/// I^{n}_{λ}(a) = Σ_{x ∈ (F^*)^k} ψ(a∏x_i^{n_i}) ∏λ_i(x_i), by brute force.
pub fn i_sum_direct(ctx: &CharContext, exps: &[i64], lambdas: &[MultCharacter], a: FieldElement) -> Result<CycloValue> {
    check_isum(ctx, exps, lambdas, a)?;
    let deg = a.degree();
    let t = ctx.tower();
    let o = t.unit_order(deg)?;
    let tr = ctx.trace_table(deg)?;
    let la = t.discrete_log(a)?;
    let p = ctx.p();
    let m = lambdas.iter().fold(p, |acc, l| lcm(acc, l.order()));
    let mut acc = RootAccumulator::new(m);
    let k = exps.len();
    let mut e = vec![0u64; k];
    loop {
        let mono = exps
            .iter()
            .zip(&e)
            .map(|(&n, &x)| (n as i128 * x as i128).rem_euclid(o as i128) as u64)
            .fold(0u64, |s, v| (s + v) % o);
        let mut r = psi_at(&tr, o, la, mono) * (m / p);
        for (l, &x) in lambdas.iter().zip(&e) {
            r += l.exponent_at(x) * (m / l.order());
        }
        acc.add_root(r, 1);
        // odometer over (Z/o)^k
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(acc.finish());
            }
            i -= 1;
            e[i] += 1;
            if e[i] < o {
                break;
            }
            e[i] = 0;
        }
    }
}

fn check_isum(ctx: &CharContext, exps: &[i64], lambdas: &[MultCharacter], a: FieldElement) -> Result<()> {
    if exps.is_empty() || exps.len() != lambdas.len() {
        return Err(Error::InvalidInput("need k ≥ 1 exponents and as many characters".into()));
    }
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    if exps.iter().any(|&n| n == 0 || n.unsigned_abs() % ctx.p() == 0) {
        return Err(Error::InvalidInput(format!("exponents {exps:?} must be nonzero and prime to p")));
    }
    if lambdas.iter().any(|l| l.degree() != a.degree()) {
        return Err(Error::InvalidInput("characters must live on the field of a".into()));
    }
    Ok(())
}

/// Some λ with λ_i = λ^{n_i} for all i, if one exists.
fn common_root(exps: &[i64], lambdas: &[MultCharacter]) -> Option<MultCharacter> {
    let o = lambdas[0].group_order();
    let eqs: Vec<(i64, u64)> = exps.iter().zip(lambdas).map(|(&n, l)| (n, l.index())).collect();
    solve_system(&eqs, o).map(|(u, _)| lambdas[0].with_index(u))
}

/// Closed form: 0 unless λ_i = λ^{n_i}; then (q−1)^{k−1} Σ_{χ^d=1} g(λχ)(λχ)(a^{−1}), d = gcd n_i.
pub fn i_sum_closed(ctx: &CharContext, exps: &[i64], lambdas: &[MultCharacter], a: FieldElement) -> Result<CycloValue> {
    check_isum(ctx, exps, lambdas, a)?;
    let Some(lam) = common_root(exps, lambdas) else {
        return Ok(CycloValue::zero());
    };
    let t = ctx.tower();
    let deg = a.degree();
    let o = t.unit_order(deg)?;
    let d = exps.iter().fold(0u64, |g, &n| gcd(g, n.unsigned_abs()));
    let dd = gcd(d, o);
    let ainv = t.inv(a)?;
    let mut sum = CycloValue::zero();
    for j in 0..dd {
        let mu = lam.mul(&lam.with_index(j * (o / dd)))?;
        sum = &sum + &(&ctx.gauss_sum(&mu)? * &ctx.eval_mult(&mu, ainv)?);
    }
    Ok(sum.scale(&BigInt::from(o).pow(exps.len() as u32 - 1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformCase {
    /// Σn_i = 2, m_i = n_i.
    Gaussian,
    /// Σn_i = 0, m_i = −n_i.
    Balanced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformSolution {
    pub case: TransformCase,
    pub exponents: Vec<i64>,
    pub chars: Vec<MultCharacter>,
    pub chi: MultCharacter,
    pub b: FieldElement,
    /// Frobenius trace on the one-dimensional multiplicity space.
    pub c: CycloValue,
    /// The Tate-twist exponent m, with 2m + 1 trivial characters among χ, χ_i.
    pub m: i64,
}

impl TransformSolution {
    pub fn output_datum(&self, ctx: &CharContext) -> Result<MonomialDatum> {
        MonomialDatum::new(ctx, self.exponents.clone(), self.chars.clone(), self.b)
    }
}

/// ∏ n_i^{n_i} in F_{q^d}.
fn power_product(ctx: &CharContext, degree: u32, exps: &[i64]) -> Result<FieldElement> {
    let t = ctx.tower();
    exps.iter().try_fold(t.one(degree), |acc, &n| t.mul(acc, t.pow(t.from_int(degree, n), n)?))
}

/// Solve for χ in the divisor equation, then b and the constant c.
pub fn solve_monomial_transform(ctx: &CharContext, datum: &MonomialDatum) -> Result<TransformSolution> {
    datum.validate(ctx)?;
    let total: i64 = datum.exponents.iter().sum();
    let case = match total {
        2 => TransformCase::Gaussian,
        0 => TransformCase::Balanced,
        _ => return Err(Error::Inapplicable(format!("Σn_i = {total}, need 0 or 2"))),
    };
    let p = ctx.p();
    let t = ctx.tower();
    let deg = datum.degree;
    let rhs =
        datum.exponents.iter().zip(&datum.chars).try_fold(Divisor::zero(), |acc, (&n, c)| {
            Ok::<_, Error>(acc.add(&divisor_of_char_power(&c.inv(), n, p)?))
        })?;
    // D_{χ^{-1},1} = ±(R − (0))
    let mut rest = rhs.sub(&Divisor::point(XPoint::zero()));
    if case == TransformCase::Balanced {
        rest = rest.neg();
    }
    let pts: Vec<(XPoint, i64)> = rest.iter().map(|(x, n)| (*x, *n)).collect();
    let chi_inv_point = match (case, pts.as_slice()) {
        (_, [(x, 1)]) => *x,
        (TransformCase::Balanced, []) => XPoint::zero(),
        _ => return Err(Error::NoSolution(format!("no χ solves the divisor equation for {datum}"))),
    };
    let o = t.unit_order(deg)?;
    if o % chi_inv_point.den() != 0 {
        return Err(Error::NoSolution(format!("χ^{{-1}} = {chi_inv_point} is not defined over degree {deg}")));
    }
    let chi = MultCharacter::new(t, deg, (chi_inv_point.num() * (o / chi_inv_point.den())) as i64)?.inv();
    let g = datum.exponents.iter().fold(0u64, |g, &n| gcd(g, n.unsigned_abs()));
    match case {
        TransformCase::Gaussian if g == 2 => {
            if p == 2 || chi != ctx.eps(deg, 2)? {
                return Err(Error::NoSolution("gcd 2 requires χ to be the quadratic character".into()));
            }
        }
        TransformCase::Balanced if g > 1 && !chi.is_trivial() => {
            return Err(Error::NoSolution(format!("gcd {g} > 1 requires χ = 1, found {chi}")));
        }
        _ => {}
    }
    let pp = power_product(ctx, deg, &datum.exponents)?;
    let (exponents, b) = match case {
        // ab = −∏n_i^{−n_i}
        TransformCase::Gaussian => (datum.exponents.clone(), t.neg(t.inv(t.mul(datum.a, pp)?)?)),
        // a/b = ∏n_i^{−n_i}
        TransformCase::Balanced => (datum.exponents.iter().map(|n| -n).collect(), t.mul(datum.a, pp)?),
    };
    let chars =
        datum.exponents.iter().zip(&datum.chars).map(|(&n, c)| chi.pow(n).mul(&c.inv())).collect::<Result<Vec<_>>>()?;
    let trivial = chi.is_trivial() as i64 + datum.chars.iter().filter(|c| c.is_trivial()).count() as i64;
    if trivial % 2 == 0 {
        return Err(Error::InvariantBreach(format!("{trivial} trivial characters: 2m + 1 must be odd")));
    }
    let m = (trivial - 1) / 2;
    let minus_b = t.neg(b);
    let (lead, twist) = match case {
        TransformCase::Gaussian => (ctx.gauss_sum(&chi.inv())?, ctx.eval_mult(&chi, minus_b)?),
        TransformCase::Balanced => (ctx.gauss_sum(&chi)?, ctx.eval_mult(&chi.inv(), minus_b)?),
    };
    let mut c = -&lead;
    for ch in &datum.chars {
        c = &c * &(-&ctx.gauss_sum(ch)?);
    }
    let qd = BigInt::from(t.size(deg)?);
    let c = (&c * &twist).scale(&qd.pow(m as u32));
    Ok(TransformSolution { case, exponents, chars, chi, b, c, m })
}

/// (−q)^k I^{n}_{χ_i/λ_i}(a) = c·∏conj(g(λ_i))·I^{m}_{η_iλ_i}(b).
pub fn verify_auxid(
    ctx: &CharContext,
    datum: &MonomialDatum,
    sol: &TransformSolution,
    lambdas: &[MultCharacter],
) -> Result<AuxidReport> {
    if lambdas.len() != datum.k() || lambdas.iter().any(|l| l.is_trivial()) {
        return Err(Error::InvalidInput("need k nontrivial characters".into()));
    }
    let qd = ctx.tower().size(datum.degree)? as i64;
    let left_chars = datum.chars.iter().zip(lambdas).map(|(c, l)| c.mul(&l.inv())).collect::<Result<Vec<_>>>()?;
    let right_chars = sol.chars.iter().zip(lambdas).map(|(c, l)| c.mul(l)).collect::<Result<Vec<_>>>()?;
    let left_zero = common_root(&datum.exponents, &left_chars).is_none();
    let right_zero = common_root(&sol.exponents, &right_chars).is_none();
    if left_zero && right_zero {
        return Ok(AuxidReport { pass: true, nonvanishing: false });
    }
    let lhs =
        i_sum_closed(ctx, &datum.exponents, &left_chars, datum.a)?.scale(&BigInt::from(-qd).pow(datum.k() as u32));
    let mut rhs = &sol.c * &i_sum_closed(ctx, &sol.exponents, &right_chars, sol.b)?;
    for l in lambdas {
        rhs = &rhs * &ctx.gauss_sum(l)?.conjugate();
    }
    Ok(AuxidReport { pass: lhs == rhs, nonvanishing: !lhs.is_zero() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxidReport {
    pub pass: bool,
    pub nonvanishing: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub tuples: u64,
    pub failures: u64,
    pub nonvanishing: u64,
}

impl SweepReport {
    /// No failing tuple; nonvanishing is judged across levels by the caller.
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// verify_auxid over every nontrivial λ-tuple at the datum's degree.
pub fn auxid_sweep(ctx: &CharContext, datum: &MonomialDatum, sol: &TransformSolution) -> Result<SweepReport> {
    let chars: Vec<MultCharacter> = MultCharacter::all(ctx.tower(), datum.degree)?.into_iter().skip(1).collect();
    let k = datum.k();
    let mut rep = SweepReport::default();
    let mut idx = vec![0usize; k];
    loop {
        let lambdas: Vec<MultCharacter> = idx.iter().map(|&i| chars[i]).collect();
        let r = verify_auxid(ctx, datum, sol, &lambdas)?;
        rep.tuples += 1;
        rep.failures += !r.pass as u64;
        rep.nonvanishing += r.nonvanishing as u64;
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(rep);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < chars.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointwiseReport {
    pub points: usize,
    pub mismatches: Vec<Vec<u64>>,
}

impl PointwiseReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn compare(lhs: &GridFunction, rhs: &GridFunction) -> PointwiseReport {
    let mismatches = (0..lhs.len()).filter(|&i| lhs.values[i] != rhs.values[i]).map(|i| lhs.coords_of(i)).collect();
    PointwiseReport { points: lhs.len(), mismatches }
}

/// f̂ = (−1)^k c f′ at every point, f and f′ the trace functions of input and output data.
pub fn verify_transform_pointwise(
    ctx: &CharContext,
    datum: &MonomialDatum,
    sol: &TransformSolution,
    max_terms: u128,
) -> Result<PointwiseReport> {
    let f = gm_trace_function(ctx, datum)?;
    let fhat = fourier_transform(ctx, &f, max_terms)?;
    let f2 = gm_trace_function(ctx, &sol.output_datum(ctx)?)?;
    let sign = if datum.k().is_multiple_of(2) { sol.c.clone() } else { -&sol.c };
    Ok(compare(&fhat, &f2.scale(&sign)))
}

/// f̂(x, y) = C·f(x, s·y)-type fixtures: the transform equals C times f rescaled by the given factors.
pub fn verify_rescaled_fixture(
    ctx: &CharContext,
    datum: &MonomialDatum,
    constant: &CycloValue,
    factors: &[FieldElement],
    max_terms: u128,
) -> Result<PointwiseReport> {
    let f = gm_trace_function(ctx, datum)?;
    let fhat = fourier_transform(ctx, &f, max_terms)?;
    Ok(compare(&fhat, &f.rescaled(ctx, factors)?.scale(constant)))
}

/// Σ_{x,y ∈ F^*} ψ(a x/y + x x̂ + y ŷ) χ(x/y) against qψ(−aŷ/x̂)χ(−ŷ/x̂) − g(χ)χ^{−1}(a).
pub fn verify_psixy(
    ctx: &CharContext,
    a: FieldElement,
    xh: FieldElement,
    yh: FieldElement,
    chi: &MultCharacter,
) -> Result<bool> {
    let t = ctx.tower();
    let deg = a.degree();
    let o = t.unit_order(deg)?;
    let tr = ctx.trace_table(deg)?;
    let (la, lx, ly) = (t.discrete_log(a)?, t.discrete_log(xh)?, t.discrete_log(yh)?);
    let p = ctx.p();
    let m = lcm(p, chi.order());
    let mut acc = RootAccumulator::new(m);
    for ex in 0..o {
        for ey in 0..o {
            let r = (ex + o - ey) % o;
            let s = psi_at(&tr, o, la, r) + psi_at(&tr, o, lx, ex) + psi_at(&tr, o, ly, ey);
            acc.add_root((s % p) * (m / p) + chi.exponent_at(r) * (m / chi.order()), 1);
        }
    }
    let lhs = acc.finish();
    let ratio = t.neg(t.mul(yh, t.inv(xh)?)?);
    let q = BigInt::from(t.size(deg)?);
    let rhs = &(&ctx.eval_add(t.mul(a, ratio)?)? * &ctx.eval_mult(chi, ratio)?).scale(&q)
        - &(&ctx.gauss_sum(chi)? * &ctx.eval_mult(&chi.inv(), a)?);
    Ok(lhs == rhs)
}

/// The n-fold version: brute force over (F^*)^{2n} against
/// q^n ψ(s)χ(s) − ((q^n − 1)/(q − 1)) g(χ), s = (−1)^n ∏ŷ/∏x̂.
pub fn verify_rs(ctx: &CharContext, chi: &MultCharacter, xh: &[FieldElement], yh: &[FieldElement]) -> Result<bool> {
    let n = xh.len();
    if n == 0 || yh.len() != n {
        return Err(Error::InvalidInput("need n ≥ 1 and matching x̂, ŷ".into()));
    }
    let t = ctx.tower();
    let deg = chi.degree();
    let o = t.unit_order(deg)?;
    let tr = ctx.trace_table(deg)?;
    let lx = xh.iter().map(|&v| t.discrete_log(v)).collect::<Result<Vec<_>>>()?;
    let ly = yh.iter().map(|&v| t.discrete_log(v)).collect::<Result<Vec<_>>>()?;
    let p = ctx.p();
    let m = lcm(p, chi.order());
    let mut acc = RootAccumulator::new(m);
    let mut e = vec![0u64; 2 * n];
    'outer: loop {
        let (xs, ys) = e.split_at(n);
        let r = (xs.iter().sum::<u64>() + o * n as u64 - ys.iter().sum::<u64>()) % o;
        let mut s = psi_at(&tr, o, 0, r);
        for i in 0..n {
            s += psi_at(&tr, o, lx[i], xs[i]) + psi_at(&tr, o, ly[i], ys[i]);
        }
        acc.add_root((s % p) * (m / p) + chi.exponent_at(r) * (m / chi.order()), 1);
        let mut i = 2 * n;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            e[i] += 1;
            if e[i] < o {
                break;
            }
            e[i] = 0;
        }
    }
    let lhs = acc.finish();
    let mut s = t.from_int(deg, if n.is_multiple_of(2) { 1 } else { -1 });
    for i in 0..n {
        s = t.mul(s, t.mul(yh[i], t.inv(xh[i])?)?)?;
    }
    let q = t.size(deg)?;
    let qn = BigInt::from(q).pow(n as u32);
    let geo: BigInt = (0..n as u32).map(|i| BigInt::from(q).pow(i)).sum();
    let rhs = &(&ctx.eval_add(s)? * &ctx.eval_mult(chi, s)?).scale(&qn) - &ctx.gauss_sum(chi)?.scale(&geo);
    Ok(lhs == rhs)
}
