//! Finite fields `F_{p^m}` with table-driven arithmetic.
//!
//! An element is stored as a packed index `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`
//! of its coefficient vector over `F_p` with respect to the power basis of
//! the canonical modulus. All arithmetic goes through a shared [`Field`]
//! object; elements are plain `Copy` handles.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Default bound on the number of elements of any field we build tables for.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 20;

/// Element of a finite field, meaningful only together with its [`Field`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(pub(crate) u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The field `F_{p^m}` presented as `F_p[x]/(modulus)`.
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    /// Low-degree-first, monic, length `m + 1`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
    gen: FqElem,
    /// Minimal polynomial of the table base `zeta` over `F_p`.
    zeta_min_poly: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (modulus {:?})", self.p, self.m, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}

impl Eq for Field {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `F_p`, low degree first; only used while
/// constructing fields.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let inv_lead = inv_mod(b[db], p);
        while r.len() > db {
            let lead = r.len() - 1;
            let c = (r[lead] as u64 * inv_lead as u64 % p as u64) as u32;
            if c != 0 {
                for (i, &bi) in b.iter().enumerate() {
                    let idx = lead - db + i;
                    r[idx] = ((r[idx] as u64 + (p - c) as u64 * bi as u64) % p as u64) as u32;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai as u64 * bj as u64) % p as u64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut v);
        v
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut base = rem(a, m, p);
        let mut acc = vec![1u32];
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }
}

/// Irreducibility over `F_p`: no common factor with `x^{p^i} - x` for `i <= m/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    let x = vec![0u32, 1];
    let mut h = x.clone();
    for _ in 1..=m / 2 {
        h = fp_poly::powmod(&h, p as u64, f, p);
        let diff = fp_poly::sub(&h, &x, p);
        let g = fp_poly::gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Monic polynomials of degree `m` in lexicographic order of their
/// low-degree-first coefficient vectors.
fn lex_smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    let total = (p as u64).pow(m);
    for n in 0..total {
        let mut f: Vec<u32> = (0..m)
            .map(|i| ((n / (p as u64).pow(m - 1 - i)) % p as u64) as u32)
            .collect();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

static FIELD_CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<Field>>>> = OnceLock::new();

/// The field of size `p^m` with the canonical (lexicographically smallest
/// irreducible) modulus. Fields are cached, so repeated calls are cheap and
/// share tables.
pub fn fq_make(p: u64, m: u32) -> Result<Arc<Field>> {
    let cache = FIELD_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().expect("field cache poisoned").get(&(p, m)) {
        return Ok(f.clone());
    }
    let field = Arc::new(Field::new(p, m, DEFAULT_FIELD_CAP)?);
    Ok(cache
        .lock()
        .expect("field cache poisoned")
        .entry((p, m))
        .or_insert(field)
        .clone())
}

/// Minimal polynomial over `F_p` of an element of `field` lying in the
/// subfield of degree `d`, low degree first.
fn min_poly_in(field: &Field, y: FqElem, d: u32) -> Vec<u32> {
    let mut poly = vec![FqElem::ONE];
    for i in 0..d {
        let root = field.frobenius(y, i as i64);
        let mut next = vec![FqElem::ZERO; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j + 1] = field.add(next[j + 1], c);
            next[j] = field.sub(next[j], field.mul(c, root));
        }
        poly = next;
    }
    poly.into_iter().map(|c| c.0).collect()
}

impl Field {
    /// Builds `F_{p^m}`. The log/exp tables are taken with respect to a
    /// distinguished primitive element `zeta_m`, chosen as the
    /// lexicographically smallest primitive element such that
    /// `zeta_m^((p^m-1)/(p^d-1))` has the same minimal polynomial as `zeta_d`
    /// for every proper divisor `d` of `m`. Embeddings send
    /// `zeta_d -> zeta_m^((p^m-1)/(p^d-1))` and therefore commute in towers.
    pub fn new(p: u64, m: u32, cap: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m < 1 {
            return Err(Error::ZeroDegree);
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q <= cap && q <= u32::MAX as u64)
            .ok_or_else(|| Error::CapExceeded(format!("field of size {p}^{m} exceeds cap {cap}")))?;
        let p32 = p as u32;
        let modulus = lex_smallest_irreducible(p32, m);
        let q32 = q as u32;

        let to_vec = |idx: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(m as usize);
            let mut n = idx;
            for _ in 0..m {
                v.push(n % p32);
                n /= p32;
            }
            fp_poly::trim(&mut v);
            v
        };
        let from_vec = |v: &[u32]| -> u32 {
            v.iter().rev().fold(0u32, |acc, &c| acc * p32 + c)
        };
        let slow_mul =
            |a: u32, b: u32| -> u32 { from_vec(&fp_poly::mulmod(&to_vec(a), &to_vec(b), &modulus, p32)) };
        let slow_pow = |a: u32, e: u64| -> u32 {
            from_vec(&fp_poly::powmod(&to_vec(a), e, &modulus, p32))
        };

        let order = q - 1;
        let factors = prime_factors(order);
        let mut alpha = 1u32;
        if order > 1 {
            let mut candidates: Vec<u32> = Vec::new();
            if m > 1 {
                candidates.push(p32);
            }
            candidates.extend(2..q32);
            alpha = candidates
                .into_iter()
                .find(|&a| factors.iter().all(|&r| slow_pow(a, order / r) != 1))
                .expect("multiplicative group is cyclic");
        }

        let n = (q32 - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q32 as usize];
        let mut cur = 1u32;
        for i in 0..n.max(1) {
            exp[i] = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, alpha);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }

        let add_table = if p32 != 2 && q32 <= 1024 {
            let mut t = vec![0u32; (q32 * q32) as usize];
            for a in 0..q32 {
                let va = to_vec(a);
                for b in 0..q32 {
                    let vb = to_vec(b);
                    let len = va.len().max(vb.len());
                    let s: Vec<u32> = (0..len)
                        .map(|i| (va.get(i).unwrap_or(&0) + vb.get(i).unwrap_or(&0)) % p32)
                        .collect();
                    t[(a * q32 + b) as usize] = from_vec(&s);
                }
            }
            Some(t)
        } else {
            None
        };

        let mut field = Field {
            p: p32,
            m,
            q: q32,
            modulus,
            exp,
            log,
            add_table,
            gen: FqElem::ONE,
            zeta_min_poly: Vec::new(),
        };

        let divisors: Vec<u32> = (1..m).filter(|d| m.is_multiple_of(*d)).collect();
        let sub_min_polys: Vec<(u32, Vec<u32>)> = divisors
            .iter()
            .map(|&d| Ok((d, fq_make(p, d)?.zeta_min_poly.clone())))
            .collect::<Result<_>>()?;
        let mut candidates: Vec<FqElem> = (1..q32)
            .map(FqElem)
            .filter(|&a| num_integer::gcd(field.log[a.0 as usize] as u64, order.max(1)) == 1)
            .collect();
        candidates.sort_by_key(|&a| field.coeffs(a));
        let zeta = candidates
            .into_iter()
            .find(|&z| {
                sub_min_polys.iter().all(|(d, poly)| {
                    let r = order / (p.pow(*d) - 1);
                    &min_poly_in(&field, field.pow(z, r), *d) == poly
                })
            })
            .expect("norm-compatible primitive elements exist");

        // re-base the tables on zeta
        let shift = field.log[zeta.0 as usize] as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; q32 as usize];
        for i in 0..n.max(1) {
            let v = field.exp[(i * shift) % n.max(1)];
            exp[i] = v;
            log[v as usize] = i as u32;
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        field.exp = exp;
        field.log = log;
        field.zeta_min_poly = min_poly_in(&field, zeta, m);
        field.gen = if m > 1 { FqElem(p32) } else { zeta };
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The class of `x` for `m > 1`; the least primitive root for prime fields.
    pub fn generator(&self) -> FqElem {
        self.gen
    }

    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    pub fn one(&self) -> FqElem {
        FqElem::ONE
    }

    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    /// Coefficient vector over `F_p`, length `m`.
    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.m as usize);
        let mut n = a.0;
        for _ in 0..self.m {
            v.push(n % self.p);
            n /= self.p;
        }
        v
    }

    pub fn from_coeffs(&self, v: &[i64]) -> Result<FqElem> {
        if v.len() > self.m as usize {
            return Err(Error::Invalid(format!(
                "coefficient vector of length {} for a degree-{} field",
                v.len(),
                self.m
            )));
        }
        let p = self.p as i64;
        let idx = v
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p as u64 + c.rem_euclid(p) as u64);
        Ok(FqElem(idx as u32))
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        if let Some(t) = &self.add_table {
            return FqElem(t[(a.0 * self.q + b.0) as usize]);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place = place.wrapping_mul(self.p);
            x /= self.p;
            y /= self.p;
        }
        FqElem(out)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 {
            let d = (self.p - x % self.p) % self.p;
            out += d * place;
            place = place.wrapping_mul(self.p);
            x /= self.p;
        }
        FqElem(out)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FqElem(self.exp[s as usize])
    }

    /// `a * b + c`.
    pub fn mul_add(&self, a: FqElem, b: FqElem, c: FqElem) -> FqElem {
        self.add(self.mul(a, b), c)
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FqElem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.0 == 0 {
            return FqElem::ZERO;
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        let r = ((l as u128 * (e % n) as u128) % n as u128) as usize;
        FqElem(self.exp[r])
    }

    /// Discrete logarithm base the primitive element used for the tables.
    pub(crate) fn log_of(&self, a: FqElem) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    pub(crate) fn primitive_power(&self, e: u64) -> FqElem {
        let n = (self.q - 1) as u64;
        FqElem(self.exp[(e % n) as usize])
    }

    /// `a^(p^i)`, with `i` taken modulo `m`.
    pub fn frobenius(&self, a: FqElem, i: i64) -> FqElem {
        let i = i.rem_euclid(self.m as i64) as u32;
        if a.0 == 0 || i == 0 {
            return a;
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        let e = (self.p as u64).pow(i) % n;
        FqElem(self.exp[((l * e) % n) as usize])
    }

    /// Whether `a` lies in the subfield `F_{p^d}`; `d` must divide `m`.
    pub fn in_subfield(&self, a: FqElem, d: u32) -> bool {
        self.m.is_multiple_of(d) && self.frobenius(a, d as i64) == a
    }

    /// A primitive `n`-th root of unity, if `n` divides `q - 1`.
    pub fn root_of_unity(&self, n: u64) -> Option<FqElem> {
        let order = (self.q - 1) as u64;
        (n > 0 && order.is_multiple_of(n)).then(|| self.primitive_power(order / n))
    }

    /// Evaluate a polynomial with coefficients in this field, low degree first.
    pub fn eval_poly(&self, coeffs: &[FqElem], x: FqElem) -> FqElem {
        coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| self.mul_add(acc, x, c))
    }

    /// Vector form `[c0,c1,...]`.
    pub fn format_vec(&self, a: FqElem) -> String {
        let v: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
        format!("[{}]", v.join(","))
    }

    /// Power-of-generator form `g^i`, when `a` is a power of the generator.
    pub fn format_power(&self, a: FqElem) -> Option<String> {
        if a.is_zero() {
            return None;
        }
        let mut cur = FqElem::ONE;
        for i in 0..self.q {
            if cur == a {
                return Some(format!("g^{i}"));
            }
            cur = self.mul(cur, self.gen);
            if cur == FqElem::ONE {
                break;
            }
        }
        None
    }

    /// Accepts `[c0,...]`, `g`, `g^i`, or an integer (reduced mod `p`).
    pub fn parse_elem(&self, s: &str) -> Result<FqElem> {
        let s = s.trim();
        let bad = || Error::parse(1, 1, format!("cannot read field element {s:?}"));
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let v: Vec<i64> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
                    .collect::<Result<_>>()?
            };
            return self.from_coeffs(&v);
        }
        if let Some(rest) = s.strip_prefix('g') {
            let rest = rest.trim();
            if rest.is_empty() {
                return Ok(self.gen);
            }
            let e = rest
                .strip_prefix('^')
                .and_then(|t| t.trim().parse::<u64>().ok())
                .ok_or_else(bad)?;
            return Ok(self.pow(self.gen, e));
        }
        s.parse::<i64>().map(|n| self.from_int(n)).map_err(|_| bad())
    }
}

/// The fixed embedding `F_{p^a} -> F_{p^b}` for `a | b`, sending the
/// distinguished primitive element of the source to the matching power of
/// the distinguished primitive element of the target.
#[derive(Debug)]
pub struct Embedding {
    from: Arc<Field>,
    to: Arc<Field>,
    images: Vec<FqElem>,
    preimages: HashMap<FqElem, FqElem>,
}

impl Embedding {
    pub fn new(from: &Arc<Field>, to: &Arc<Field>) -> Result<Embedding> {
        if from.p != to.p || !to.m.is_multiple_of(from.m) {
            return Err(Error::NoEmbedding {
                from: from.m,
                to: to.m,
            });
        }
        let r = (to.q as u64 - 1) / (from.q as u64 - 1).max(1);
        let images: Vec<FqElem> = from
            .elements()
            .map(|a| match from.log_of(a) {
                None => FqElem::ZERO,
                Some(l) => to.primitive_power(l as u64 * r),
            })
            .collect();
        let preimages = images
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, FqElem(i as u32)))
            .collect();
        Ok(Embedding {
            from: from.clone(),
            to: to.clone(),
            images,
            preimages,
        })
    }

    pub fn source(&self) -> &Arc<Field> {
        &self.from
    }

    pub fn target(&self) -> &Arc<Field> {
        &self.to
    }

    pub fn apply(&self, a: FqElem) -> FqElem {
        self.images[a.0 as usize]
    }

    /// Inverse image of `b`, if `b` lies in the embedded subfield.
    pub fn preimage(&self, b: FqElem) -> Option<FqElem> {
        self.preimages.get(&b).copied()
    }
}

/// One-shot form of [`Embedding::apply`].
pub fn embed(from: &Arc<Field>, a: FqElem, to: &Arc<Field>) -> Result<FqElem> {
    Ok(Embedding::new(from, to)?.apply(a))
}

/// All roots of a polynomial (coefficients low degree first) in its
/// coefficient field, with multiplicities, by exhaustive evaluation followed
/// by deflation.
pub fn poly_roots_ff(field: &Field, coeffs: &[FqElem]) -> Result<Vec<(FqElem, u32)>> {
    let mut f = coeffs.to_vec();
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    if f.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    let zero_mult = f.iter().take_while(|c| c.is_zero()).count();
    if zero_mult > 0 {
        out.push((FqElem::ZERO, zero_mult as u32));
    }
    let f = &f[zero_mult..];
    if f.len() == 1 {
        return Ok(out);
    }
    for a in field.elements().skip(1) {
        if !field.eval_poly(f, a).is_zero() {
            continue;
        }
        let mut g = f.to_vec();
        let mut mult = 0u32;
        loop {
            // synthetic division by (x - a)
            let n = g.len();
            if n < 2 {
                break;
            }
            let mut quot = vec![FqElem::ZERO; n - 1];
            let mut carry = FqElem::ZERO;
            for i in (0..n).rev() {
                let cur = field.add(g[i], field.mul(carry, a));
                if i == 0 {
                    carry = cur;
                } else {
                    quot[i - 1] = cur;
                    carry = cur;
                }
            }
            if !carry.is_zero() {
                break;
            }
            mult += 1;
            g = quot;
        }
        out.push((a, mult));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_monic_irreducible_quadratics(p: u32) -> Vec<Vec<u32>> {
        // brute force: x^2 + b x + c has no root in F_p
        let mut out = Vec::new();
        for c in 0..p {
            for b in 0..p {
                let has_root = (0..p).any(|x| (x * x + b * x + c) % p == 0);
                if !has_root {
                    out.push(vec![c, b, 1]);
                }
            }
        }
        out
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(fq_make(2, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(fq_make(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // oracle: enumerate quadratics over F_3 in (c0, c1) lexicographic order
        let expected = all_monic_irreducible_quadratics(3).into_iter().next().unwrap();
        assert_eq!(fq_make(3, 2).unwrap().modulus(), expected.as_slice());
        assert_eq!(expected, vec![1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(fq_make(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(fq_make(2, 0).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(fq_make(2, 21), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn frobenius_examples() {
        let f2 = fq_make(2, 1).unwrap();
        for a in f2.elements() {
            assert_eq!(f2.frobenius(a, 1), a);
        }
        let f4 = fq_make(2, 2).unwrap();
        let g = f4.generator();
        // direct squaring of x modulo x^2+x+1 gives x+1
        assert_eq!(f4.frobenius(g, 1), f4.mul(g, g));
        assert_eq!(f4.coeffs(f4.frobenius(g, 1)), vec![1, 1]);
        for a in f4.elements() {
            assert_eq!(f4.frobenius(a, 2), a);
        }
    }

    #[test]
    fn embedding_examples() {
        let f2 = fq_make(2, 1).unwrap();
        let f4 = fq_make(2, 2).unwrap();
        let f16 = fq_make(2, 4).unwrap();
        let e = Embedding::new(&f2, &f4).unwrap();
        assert_eq!(e.apply(FqElem::ONE), FqElem::ONE);
        assert_eq!(e.apply(FqElem::ZERO), FqElem::ZERO);
        // the generator of F_4 must land on a root of x^2+x+1 in F_16
        let roots: Vec<FqElem> = f16
            .elements()
            .filter(|&z| f16.add(f16.add(f16.mul(z, z), z), FqElem::ONE).is_zero())
            .collect();
        assert_eq!(roots.len(), 2);
        let e = Embedding::new(&f4, &f16).unwrap();
        assert!(roots.contains(&e.apply(f4.generator())));
        assert!(matches!(
            Embedding::new(&f4, &fq_make(2, 3).unwrap()),
            Err(Error::NoEmbedding { .. })
        ));
    }

    #[test]
    fn embeddings_commute_in_towers() {
        for (p, a, b, c) in [(2u64, 2u32, 4u32, 8u32), (2, 2, 4, 12), (2, 3, 6, 12), (2, 1, 2, 6), (3, 2, 4, 8), (3, 1, 2, 4)] {
            let fa = fq_make(p, a).unwrap();
            let fb = fq_make(p, b).unwrap();
            let fc = fq_make(p, c).unwrap();
            let ab = Embedding::new(&fa, &fb).unwrap();
            let bc = Embedding::new(&fb, &fc).unwrap();
            let ac = Embedding::new(&fa, &fc).unwrap();
            for x in fa.elements() {
                assert_eq!(ac.apply(x), bc.apply(ab.apply(x)), "p={p} {a}|{b}|{c}");
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let f4 = fq_make(2, 2).unwrap();
        let f64_ = fq_make(2, 6).unwrap();
        let e = Embedding::new(&f4, &f64_).unwrap();
        for x in f4.elements() {
            for y in f4.elements() {
                assert_eq!(e.apply(f4.add(x, y)), f64_.add(e.apply(x), e.apply(y)));
                assert_eq!(e.apply(f4.mul(x, y)), f64_.mul(e.apply(x), e.apply(y)));
            }
            assert_eq!(e.preimage(e.apply(x)), Some(x));
        }
    }

    #[test]
    fn roots_over_small_fields() {
        let f2 = fq_make(2, 1).unwrap();
        let r = poly_roots_ff(&f2, &[FqElem(0), FqElem(1), FqElem(1)]).unwrap();
        assert_eq!(r, vec![(FqElem(0), 1), (FqElem(1), 1)]);
        let r = poly_roots_ff(&f2, &[FqElem(1), FqElem(0), FqElem(1)]).unwrap();
        assert_eq!(r, vec![(FqElem(1), 2)]);
        let f4 = fq_make(2, 2).unwrap();
        let g = f4.generator();
        let r = poly_roots_ff(&f4, &[FqElem(1), FqElem(1), FqElem(1)]).unwrap();
        let mut found: Vec<FqElem> = r.iter().map(|&(a, _)| a).collect();
        let mut expected = vec![g, f4.mul(g, g)];
        found.sort();
        expected.sort();
        assert_eq!(found, expected);
        assert_eq!(poly_roots_ff(&f4, &[FqElem(0)]), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn element_text_forms() {
        let f9 = fq_make(3, 2).unwrap();
        let a = f9.parse_elem("[2,1]").unwrap();
        assert_eq!(f9.coeffs(a), vec![2, 1]);
        assert_eq!(f9.parse_elem(&f9.format_vec(a)).unwrap(), a);
        assert_eq!(f9.parse_elem("g").unwrap(), f9.generator());
        let g3 = f9.parse_elem("g^3").unwrap();
        assert_eq!(g3, f9.pow(f9.generator(), 3));
        assert_eq!(f9.parse_elem(&f9.format_power(g3).unwrap()).unwrap(), g3);
        assert_eq!(f9.parse_elem("-1").unwrap(), f9.from_int(2));
    }
}

