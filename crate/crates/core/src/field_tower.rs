//! Compatible models of F_{q^d}, q = p^s, for a divisor-closed set of degrees.
//!
//! Each layer is F_p[x]/(f_d) with f_d the first monic irreducible of degree s·d
//! in enumeration order. Elements are stored as base-p codes of their
//! coefficient vectors. Generators are chosen so that every
//! `g_d ↦ g_e^{(q^e−1)/(q^d−1)}` (d | e) is a field embedding; equivalently
//! Nm_{e→d}(g_e) = g_d under those embeddings. Everything multiplicative is done
//! in "index land" through discrete logs.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::{divisors, gcd, is_prime, mod_inv, prime_divisors};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TowerOptions {
    /// Layers with at most this many elements get full exp/log tables; larger ones use BSGS.
    pub table_limit: u64,
    /// Refuse to build layers larger than this.
    pub size_limit: u64,
    /// Optional directory for persisted dlog tables.
    pub cache_dir: Option<PathBuf>,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions { table_limit: 1 << 16, size_limit: 1 << 22, cache_dir: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    degree: u32,
    code: u64,
}

impl FieldElement {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Base-p code Σ c_i p^i of the coefficient vector.
    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }
}

// ---- polynomials over F_p (coefficients low → high) ----

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let n = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(prod, f, p, n)
}

fn poly_rem(mut a: Vec<u64>, f: &[u64], p: u64, n: usize) -> Vec<u64> {
    // f is monic of degree n
    for i in (n..a.len()).rev() {
        let c = a[i];
        if c == 0 {
            continue;
        }
        for j in 0..=n {
            let t = c * f[j] % p;
            a[i - n + j] = (a[i - n + j] + p - t) % p;
        }
    }
    a.truncate(n.max(1));
    a
}

fn poly_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let n = f.len() - 1;
    let mut r = vec![1u64];
    let mut b = poly_rem(base.to_vec(), f, p, n);
    while e > 0 {
        if e & 1 == 1 {
            r = poly_mulmod(&r, &b, f, p);
        }
        e >>= 1;
        if e > 0 {
            b = poly_mulmod(&b, &b, f, p);
        }
    }
    r
}

fn poly_gcd(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !(b.len() == 1 && b[0] == 0) {
        let db = b.len() - 1;
        let inv = mod_inv(b[db], p).unwrap();
        let mut r = a.clone();
        while r.len() > db && !(r.len() == 1 && r[0] == 0) {
            let dr = r.len() - 1;
            let c = r[dr] * inv % p;
            for j in 0..=db {
                let t = c * b[j] % p;
                r[dr - db + j] = (r[dr - db + j] + p - t) % p;
            }
            r = trim(r);
            if dr == 0 {
                break;
            }
        }
        a = b;
        b = r;
    }
    a
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    let xpow = |k: u32| -> Vec<u64> {
        let mut r = x.clone();
        for _ in 0..k {
            r = poly_powmod(&r, p, f, p);
        }
        r
    };
    let sub_x = |mut v: Vec<u64>| {
        v.resize(v.len().max(2), 0);
        v[1] = (v[1] + p - 1) % p;
        trim(v)
    };
    if trim(xpow(n)) != vec![0, 1] {
        return false;
    }
    for r in prime_divisors(n as u64) {
        let g = poly_gcd(f.to_vec(), sub_x(xpow(n / r as u32)), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn digits(mut code: u64, p: u64, n: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    for d in v.iter_mut() {
        *d = code % p;
        code /= p;
    }
    v
}

fn undigits(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0u64, |acc, &c| acc * p + c)
}

/// A bare model F_p[x]/(f); arithmetic on codes.
#[derive(Clone, Debug)]
struct Model {
    p: u64,
    n: usize,
    size: u64,
    modulus: Vec<u64>,
}

impl Model {
    fn first_irreducible(p: u64, n: usize) -> Model {
        let size = p.pow(n as u32);
        for t in 0..size {
            let mut f = digits(t, p, n);
            f.push(1);
            if is_irreducible(&f, p) {
                return Model { p, n, size, modulus: f };
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (digits(a, self.p, self.n), digits(b, self.p, self.n));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        undigits(&s, self.p)
    }

    fn neg(&self, a: u64) -> u64 {
        let s: Vec<u64> = digits(a, self.p, self.n).iter().map(|u| (self.p - u) % self.p).collect();
        undigits(&s, self.p)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let r = poly_mulmod(&digits(a, self.p, self.n), &digits(b, self.p, self.n), &self.modulus, self.p);
        undigits(&r, self.p)
    }

    fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(b, b);
            }
        }
        r
    }

    fn is_primitive(&self, a: u64, order_primes: &[u64]) -> bool {
        a != 0 && order_primes.iter().all(|&r| self.pow(a, (self.size - 1) / r) != 1)
    }

    /// Minimal polynomial over F_p as coefficients (low → high), monic.
    fn minpoly(&self, a: u64) -> Vec<u64> {
        let mut conj = vec![a];
        loop {
            let nxt = self.pow(*conj.last().unwrap(), self.p);
            if nxt == a {
                break;
            }
            conj.push(nxt);
        }
        // ∏ (X − c) with coefficients in the model
        let mut poly: Vec<u64> = vec![1];
        for &c in &conj {
            let negc = self.neg(c);
            let mut next = vec![0u64; poly.len() + 1];
            for (i, &coef) in poly.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], coef);
                next[i] = self.add(next[i], self.mul(coef, negc));
            }
            poly = next;
        }
        debug_assert!(poly.iter().all(|&c| c < self.p));
        poly
    }

    fn eval_fp_poly(&self, poly: &[u64], z: u64) -> u64 {
        poly.iter().rev().fold(0u64, |acc, &c| self.add(self.mul(acc, z), c))
    }

    /// Tr_{F_{p^n}/F_p}(x^i) for the basis monomials.
    fn basis_traces(&self) -> Vec<u64> {
        (0..self.n)
            .map(|i| {
                let y = self.p.pow(i as u32);
                let mut acc = 0u64;
                let mut z = y;
                for _ in 0..self.n {
                    acc = self.add(acc, z);
                    z = self.pow(z, self.p);
                }
                debug_assert!(acc < self.p);
                acc
            })
            .collect()
    }
}

struct Layer {
    model: Model,
    gen: u64,
    /// exp[k] = code of g^k, log[code] = k; present when size ≤ table_limit.
    tables: Option<(Vec<u32>, Vec<u32>)>,
    bsgs: OnceLock<(u64, HashMap<u64, u64>, u64)>,
    basis_tr: Vec<u64>,
}

impl Layer {
    fn order(&self) -> u64 {
        self.model.size - 1
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some((exp, log)) => {
                let o = self.order();
                exp[((log[a as usize] as u64 + log[b as usize] as u64) % o) as usize] as u64
            }
            None => self.model.mul(a, b),
        }
    }

    fn gen_pow(&self, k: u64) -> u64 {
        let k = k % self.order();
        match &self.tables {
            Some((exp, _)) => exp[k as usize] as u64,
            None => self.model.pow(self.gen, k),
        }
    }

    fn dlog(&self, a: u64) -> u64 {
        debug_assert_ne!(a, 0);
        if let Some((_, log)) = &self.tables {
            return log[a as usize] as u64;
        }
        let (m, baby, giant) = self.bsgs.get_or_init(|| {
            let o = self.order();
            let m = (o as f64).sqrt().ceil() as u64 + 1;
            let mut baby = HashMap::with_capacity(m as usize);
            let mut z = 1u64;
            for j in 0..m {
                baby.entry(z).or_insert(j);
                z = self.model.mul(z, self.gen);
            }
            // g^{-m}
            let giant = self.model.pow(self.gen, (o - m % o) % o);
            (m, baby, giant)
        });
        let mut gamma = a;
        for i in 0..=*m {
            if let Some(&j) = baby.get(&gamma) {
                return (i * m + j) % self.order();
            }
            gamma = self.model.mul(gamma, *giant);
        }
        unreachable!("generator is primitive, so every unit has a discrete log")
    }

    fn abs_trace(&self, a: u64) -> u64 {
        let p = self.model.p;
        let mut code = a;
        let mut acc = 0u64;
        for &t in &self.basis_tr {
            acc = (acc + (code % p) * t) % p;
            code /= p;
        }
        acc
    }
}

/// A compatible system of finite fields F_{q^d}, d in a divisor-closed set.
pub struct FieldTower {
    p: u64,
    s: u32,
    q: u64,
    layers: BTreeMap<u32, Layer>,
    trace_tables: Mutex<TraceTables>,
}

/// (degree, twist code) → absolute traces of twist·g_d^k.
type TraceTables = HashMap<(u32, u64), Arc<Vec<u32>>>;

impl std::fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTower").field("p", &self.p).field("s", &self.s).field("degrees", &self.degrees()).finish()
    }
}

impl FieldTower {
    pub fn new(p: u64, s: u32, degrees: &[u32]) -> Result<Self> {
        Self::with_options(p, s, degrees, &TowerOptions::default())
    }

    /// Tower containing every divisor of the given degrees.
    pub fn closure(p: u64, s: u32, degrees: &[u32], opts: &TowerOptions) -> Result<Self> {
        let mut all: Vec<u32> =
            degrees.iter().flat_map(|&d| divisors(d as u64).into_iter().map(|x| x as u32)).collect();
        all.sort_unstable();
        all.dedup();
        Self::with_options(p, s, &all, opts)
    }

    pub fn with_options(p: u64, s: u32, degrees: &[u32], opts: &TowerOptions) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s == 0 || degrees.is_empty() || degrees.contains(&0) {
            return Err(Error::InvalidInput("degrees and s must be positive".into()));
        }
        let mut degs: Vec<u32> = degrees.to_vec();
        degs.sort_unstable();
        degs.dedup();
        for &d in &degs {
            for e in divisors(d as u64) {
                if !degs.contains(&(e as u32)) {
                    return Err(Error::NotDivisorClosed(d, e as u32));
                }
            }
        }
        let q = p.checked_pow(s).ok_or(Error::SizeBound {
            what: "q".into(),
            size: u128::MAX,
            limit: opts.size_limit as u128,
        })?;
        let top = *degs.last().unwrap();
        let top_size = (p as u128).checked_pow(s * top).unwrap_or(u128::MAX);
        if top_size > opts.size_limit as u128 {
            return Err(Error::SizeBound {
                what: format!("F_{{{p}^{}}}", s * top),
                size: top_size,
                limit: opts.size_limit as u128,
            });
        }

        let models: BTreeMap<u32, Model> =
            degs.iter().map(|&d| (d, Model::first_irreducible(p, (s * d) as usize))).collect();
        let gens = choose_generators(&degs, &models, q)?;

        let mut layers = BTreeMap::new();
        for &d in &degs {
            let model = models[&d].clone();
            let gen = gens[&d];
            let tables = if model.size <= opts.table_limit {
                Some(build_tables(&model, gen, d, opts.cache_dir.as_deref()))
            } else {
                None
            };
            let basis_tr = model.basis_traces();
            layers.insert(d, Layer { model, gen, tables, bsgs: OnceLock::new(), basis_tr });
        }
        let tower = FieldTower { p, s, q, layers, trace_tables: Mutex::new(HashMap::new()) };
        tower.check_norm_compatibility()?;
        Ok(tower)
    }

    fn check_norm_compatibility(&self) -> Result<()> {
        for (&d, ld) in &self.layers {
            for (&e, le) in &self.layers {
                if e % d != 0 || e == d {
                    continue;
                }
                let y = le.gen_pow(le.order() / ld.order());
                if le.model.minpoly(y) != ld.model.minpoly(ld.gen) {
                    return Err(Error::InvariantBreach(format!(
                        "generators of degrees {d} and {e} are not norm-compatible"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.layers.keys().copied().collect()
    }

    pub fn has_degree(&self, d: u32) -> bool {
        self.layers.contains_key(&d)
    }

    fn layer(&self, d: u32) -> Result<&Layer> {
        self.layers.get(&d).ok_or(Error::MissingDegree(d))
    }

    /// q^d.
    pub fn size(&self, d: u32) -> Result<u64> {
        Ok(self.layer(d)?.model.size)
    }

    /// q^d − 1.
    pub fn unit_order(&self, d: u32) -> Result<u64> {
        Ok(self.layer(d)?.order())
    }

    pub fn modulus(&self, d: u32) -> Result<Vec<u64>> {
        Ok(self.layer(d)?.model.modulus.clone())
    }

    pub fn generator(&self, d: u32) -> Result<FieldElement> {
        Ok(FieldElement { degree: d, code: self.layer(d)?.gen })
    }

    pub fn zero(&self, d: u32) -> FieldElement {
        FieldElement { degree: d, code: 0 }
    }

    pub fn one(&self, d: u32) -> FieldElement {
        FieldElement { degree: d, code: 1 }
    }

    /// The image of an integer in F_{q^d}.
    pub fn from_int(&self, d: u32, n: i64) -> FieldElement {
        FieldElement { degree: d, code: n.rem_euclid(self.p as i64) as u64 }
    }

    pub fn element(&self, d: u32, code: u64) -> Result<FieldElement> {
        let l = self.layer(d)?;
        if code >= l.model.size {
            return Err(Error::InvalidInput(format!("code {code} out of range for degree {d}")));
        }
        Ok(FieldElement { degree: d, code })
    }

    pub fn from_coeffs(&self, d: u32, coeffs: &[u64]) -> Result<FieldElement> {
        let l = self.layer(d)?;
        if coeffs.len() != l.model.n || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidInput(format!(
                "degree {d} elements need {} coefficients in [0, {})",
                l.model.n, self.p
            )));
        }
        Ok(FieldElement { degree: d, code: undigits(coeffs, self.p) })
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u64> {
        digits(x.code, self.p, (self.s * x.degree) as usize)
    }

    /// All elements of F_{q^d} in code order.
    pub fn elements(&self, d: u32) -> Result<impl Iterator<Item = FieldElement>> {
        let size = self.size(d)?;
        Ok((0..size).map(move |code| FieldElement { degree: d, code }))
    }

    fn same(&self, a: FieldElement, b: FieldElement) -> Result<&Layer> {
        if a.degree != b.degree {
            return Err(Error::InvalidInput(format!("degree mismatch: {} vs {}", a.degree, b.degree)));
        }
        self.layer(a.degree)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let l = self.same(a, b)?;
        Ok(FieldElement { degree: a.degree, code: l.model.add(a.code, b.code) })
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let l = &self.layers[&a.degree];
        FieldElement { degree: a.degree, code: l.model.neg(a.code) }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let l = self.same(a, b)?;
        Ok(FieldElement { degree: a.degree, code: l.mul(a.code, b.code) })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let l = self.layer(a.degree)?;
        let k = l.dlog(a.code);
        Ok(FieldElement { degree: a.degree, code: l.gen_pow((l.order() - k) % l.order()) })
    }

    /// a^e for any integer e (negative exponents need a ≠ 0).
    pub fn pow(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        let l = self.layer(a.degree)?;
        if a.is_zero() {
            return match e.cmp(&0) {
                std::cmp::Ordering::Less => Err(Error::ZeroElement),
                std::cmp::Ordering::Equal => Ok(self.one(a.degree)),
                std::cmp::Ordering::Greater => Ok(a),
            };
        }
        let k = l.dlog(a.code) as i128 * e as i128;
        let k = k.rem_euclid(l.order() as i128) as u64;
        Ok(FieldElement { degree: a.degree, code: l.gen_pow(k) })
    }

    /// g_d^k.
    pub fn gen_pow(&self, d: u32, k: u64) -> Result<FieldElement> {
        Ok(FieldElement { degree: d, code: self.layer(d)?.gen_pow(k) })
    }

    /// k in [0, q^d − 2] with g_d^k = x.
    pub fn discrete_log(&self, x: FieldElement) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.layer(x.degree)?.dlog(x.code))
    }

    /// The embedding F_{q^d} → F_{q^e} fixed by the generators.
    pub fn embed(&self, x: FieldElement, e: u32) -> Result<FieldElement> {
        let d = x.degree;
        if !e.is_multiple_of(d) {
            return Err(Error::NotDivisible { from: e as u64, to: d as u64 });
        }
        let le = self.layer(e)?;
        if x.is_zero() {
            return Ok(self.zero(e));
        }
        let ld = self.layer(d)?;
        let n = le.order() / ld.order();
        let k = ld.dlog(x.code) as u128 * n as u128 % le.order() as u128;
        Ok(FieldElement { degree: e, code: le.gen_pow(k as u64) })
    }

    pub fn norm_to(&self, x: FieldElement, to: u32) -> Result<FieldElement> {
        let from = x.degree;
        if !from.is_multiple_of(to) {
            return Err(Error::NotDivisible { from: from as u64, to: to as u64 });
        }
        let lt = self.layer(to)?;
        let lf = self.layer(from)?;
        if x.is_zero() {
            return Ok(self.zero(to));
        }
        Ok(FieldElement { degree: to, code: lt.gen_pow(lf.dlog(x.code) % lt.order()) })
    }

    pub fn trace_to(&self, x: FieldElement, to: u32) -> Result<FieldElement> {
        let from = x.degree;
        if !from.is_multiple_of(to) {
            return Err(Error::NotDivisible { from: from as u64, to: to as u64 });
        }
        let lt = self.layer(to)?;
        let lf = self.layer(from)?;
        let qt = lt.model.size;
        let mut acc = 0u64;
        let mut z = x.code;
        for _ in 0..(from / to) {
            acc = lf.model.add(acc, z);
            z = lf.model.pow(z, qt);
        }
        if acc == 0 {
            return Ok(self.zero(to));
        }
        let n = lf.order() / lt.order();
        let k = lf.dlog(acc);
        if k % n != 0 {
            return Err(Error::InvariantBreach("trace left the subfield".into()));
        }
        Ok(FieldElement { degree: to, code: lt.gen_pow(k / n) })
    }

    /// Tr_{F_{q^d}/F_p}(x) as an integer in [0, p).
    pub fn abs_trace(&self, x: FieldElement) -> u64 {
        self.layers[&x.degree].abs_trace(x.code)
    }

    /// Table t[k] = Tr_{F_{q^d}/F_p}(c·g_d^k), k in [0, q^d − 1), where c ∈ F_q^* is the twist.
    pub fn trace_table(&self, d: u32, twist: FieldElement) -> Result<Arc<Vec<u32>>> {
        if twist.degree != 1 || twist.is_zero() {
            return Err(Error::InvalidInput("additive twist must be a unit of F_q".into()));
        }
        let key = (d, twist.code);
        if let Some(t) = self.trace_tables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let l = self.layer(d)?;
        let c = self.embed(twist, d)?;
        let o = l.order();
        let table: Vec<u32> = match &l.tables {
            Some((exp, log)) => {
                let k0 = log[c.code as usize] as u64;
                (0..o).map(|k| l.abs_trace(exp[((k0 + k) % o) as usize] as u64) as u32).collect()
            }
            None => {
                let mut z = c.code;
                (0..o)
                    .map(|_| {
                        let t = l.abs_trace(z) as u32;
                        z = l.model.mul(z, l.gen);
                        t
                    })
                    .collect()
            }
        };
        let arc = Arc::new(table);
        self.trace_tables.lock().unwrap().insert(key, arc.clone());
        Ok(arc)
    }
}

fn choose_generators(degs: &[u32], models: &BTreeMap<u32, Model>, q: u64) -> Result<BTreeMap<u32, u64>> {
    let mut gens: BTreeMap<u32, u64> = BTreeMap::new();
    let unit = |d: u32| models[&d].size - 1;
    for &d in degs.iter().rev() {
        let model = &models[&d];
        let superset = gens.keys().copied().filter(|&e| e % d == 0).max();
        if let Some(e) = superset {
            let me = &models[&e];
            let y = me.pow(gens[&e], unit(e) / unit(d));
            let mp = me.minpoly(y);
            let root = (1..model.size)
                .find(|&z| model.eval_fp_poly(&mp, z) == 0)
                .ok_or_else(|| Error::InvariantBreach(format!("no root for degree {d} generator")))?;
            gens.insert(d, root);
            continue;
        }
        // maximal degree: compatible with every already-fixed layer through their gcd
        let targets: Vec<(u64, Vec<u64>)> = gens
            .iter()
            .map(|(&f, &gf)| {
                let g = gcd(d as u64, f as u64) as u32;
                let mf = &models[&f];
                let nf = mf.pow(gf, unit(f) / unit(g));
                (unit(d) / unit(g), mf.minpoly(nf))
            })
            .collect();
        let primes = prime_divisors(model.size - 1);
        let g = (1..model.size)
            .find(|&c| {
                model.is_primitive(c, &primes) && targets.iter().all(|(e, mp)| model.minpoly(model.pow(c, *e)) == *mp)
            })
            .ok_or_else(|| Error::InvariantBreach(format!("no compatible generator in degree {d}")))?;
        gens.insert(d, g);
    }
    let _ = q;
    Ok(gens)
}

const CACHE_MAGIC: &[u8; 8] = b"CSDLOG\0\0";
const CACHE_VERSION: u32 = 1;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn cache_path(dir: &Path, model: &Model, d: u32, gen: u64) -> PathBuf {
    let mods: Vec<String> = model.modulus.iter().map(|c| c.to_string()).collect();
    dir.join(format!("dlog_p{}_n{}_d{}_f{}_g{}.bin", model.p, model.n, d, mods.join("-"), gen))
}

fn cache_header(model: &Model, d: u32, gen: u64) -> Vec<u8> {
    let mut h = Vec::new();
    h.extend_from_slice(CACHE_MAGIC);
    h.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    h.extend_from_slice(&model.p.to_le_bytes());
    h.extend_from_slice(&(model.n as u32).to_le_bytes());
    h.extend_from_slice(&d.to_le_bytes());
    for &c in &model.modulus {
        h.extend_from_slice(&c.to_le_bytes());
    }
    h.extend_from_slice(&gen.to_le_bytes());
    h
}

fn load_cached_log(path: &Path, header: &[u8], size: u64) -> Option<Vec<u32>> {
    let mut buf = Vec::new();
    std::fs::File::open(path).ok()?.read_to_end(&mut buf).ok()?;
    let body_len = size as usize * 4;
    if buf.len() != header.len() + body_len + 8 || &buf[..header.len()] != header {
        return None;
    }
    let body = &buf[header.len()..header.len() + body_len];
    let sum = u64::from_le_bytes(buf[header.len() + body_len..].try_into().ok()?);
    if fnv1a(body) != sum {
        return None;
    }
    Some(body.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect())
}

fn store_cached_log(path: &Path, header: &[u8], log: &[u32]) -> std::io::Result<()> {
    let body: Vec<u8> = log.iter().flat_map(|x| x.to_le_bytes()).collect();
    let tmp = path.with_extension("tmp");
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(header)?;
    f.write_all(&body)?;
    f.write_all(&fnv1a(&body).to_le_bytes())?;
    drop(f);
    std::fs::rename(tmp, path)
}

fn build_tables(model: &Model, gen: u64, d: u32, cache_dir: Option<&Path>) -> (Vec<u32>, Vec<u32>) {
    let o = model.size - 1;
    let header = cache_header(model, d, gen);
    if let Some(dir) = cache_dir {
        let path = cache_path(dir, model, d, gen);
        if let Some(log) = load_cached_log(&path, &header, model.size) {
            let mut exp = vec![u32::MAX; o as usize];
            let mut ok = log[0] == 0;
            for (code, &k) in log.iter().enumerate().skip(1) {
                if (k as u64) >= o || exp[k as usize] != u32::MAX {
                    ok = false;
                    break;
                }
                exp[k as usize] = code as u32;
            }
            // spot-check the table against the generator
            ok = ok && (0..o.min(64)).all(|k| model.pow(gen, k) == exp[k as usize] as u64);
            if ok {
                return (exp, log);
            }
        }
    }
    let mut exp = Vec::with_capacity(o as usize);
    let mut log = vec![0u32; model.size as usize];
    let mut z = 1u64;
    for k in 0..o {
        exp.push(z as u32);
        log[z as usize] = k as u32;
        z = model.mul(z, gen);
    }
    if let Some(dir) = cache_dir {
        let _ = std::fs::create_dir_all(dir);
        let _ = store_cached_log(&cache_path(dir, model, d, gen), &header, &log);
    }
    (exp, log)
}
