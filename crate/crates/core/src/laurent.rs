//! Laurent series over finite fields, known exactly or modulo a power of the
//! uniformizer.
//!
//! A [`SeriesField`] describes `F_{q^j}((S))` with `S^e = T`, where `F_q` is
//! the residue field of the base `K = F_q((T))`. Series store exponents of
//! `S`; valuations are reported in units of `v(T) = 1`.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{fq_make, Embedding, Field, FqElem};

/// Relative precision used when inverting an exact non-monomial.
pub const DEFAULT_WINDOW: i64 = 32;

pub type Rational = Ratio<i64>;

#[derive(Clone)]
pub struct SeriesField {
    residue: Arc<Field>,
    j: u32,
    e: u32,
}

impl fmt::Debug for SeriesField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}^{}((T^(1/{}))) [j={}]",
            self.residue.p(),
            self.residue.m(),
            self.e,
            self.j
        )
    }
}

impl PartialEq for SeriesField {
    fn eq(&self, other: &Self) -> bool {
        *self.residue == *other.residue && self.j == other.j && self.e == other.e
    }
}

impl Eq for SeriesField {}

/// Absolute precision of a series: exact, or known modulo `S^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    Exact,
    Abs(i64),
}

impl Precision {
    pub fn min(self, other: Precision) -> Precision {
        match (self, other) {
            (Precision::Exact, o) | (o, Precision::Exact) => o,
            (Precision::Abs(a), Precision::Abs(b)) => Precision::Abs(a.min(b)),
        }
    }

    pub fn shift(self, k: i64) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Abs(a) => Precision::Abs(a + k),
        }
    }

    fn bound(self) -> i64 {
        match self {
            Precision::Exact => i64::MAX,
            Precision::Abs(a) => a,
        }
    }
}

/// Valuation in units of `v(T) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(Rational),
    /// Indistinguishable from zero: the valuation is at least this value.
    Above(Rational),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<Rational> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Above(v) => write!(f, ">={v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// `sum coeffs[i] S^(lead + i)`, exact or modulo `S^prec`.
///
/// Invariants: `coeffs` has no leading or trailing zeros (so the zero series
/// has no coefficients), and every stored exponent is below `prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    lead: i64,
    coeffs: Vec<FqElem>,
    prec: Precision,
}

impl LaurentSeries {
    fn normalized(mut lead: i64, mut coeffs: Vec<FqElem>, prec: Precision) -> LaurentSeries {
        let limit = prec.bound();
        if lead < limit {
            let keep = limit.saturating_sub(lead).min(coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
        } else {
            coeffs.clear();
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let skip = coeffs.iter().take_while(|c| c.is_zero()).count();
        if skip == coeffs.len() {
            return LaurentSeries {
                lead: 0,
                coeffs: Vec::new(),
                prec,
            };
        }
        coeffs.drain(..skip);
        lead += skip as i64;
        LaurentSeries { lead, coeffs, prec }
    }

    pub fn zero() -> LaurentSeries {
        LaurentSeries {
            lead: 0,
            coeffs: Vec::new(),
            prec: Precision::Exact,
        }
    }

    /// Zero known modulo `S^prec`.
    pub fn zero_to(prec: i64) -> LaurentSeries {
        LaurentSeries {
            lead: 0,
            coeffs: Vec::new(),
            prec: Precision::Abs(prec),
        }
    }

    pub fn one() -> LaurentSeries {
        LaurentSeries::monomial(FqElem::ONE, 0)
    }

    /// `c S^exp`, exact.
    pub fn monomial(c: FqElem, exp: i64) -> LaurentSeries {
        LaurentSeries::normalized(exp, vec![c], Precision::Exact)
    }

    /// Builds a series from dense coefficients starting at `S^lead`. Callers
    /// combining repeated exponents should use [`SeriesField::from_terms`].
    pub fn from_dense(lead: i64, coeffs: Vec<FqElem>, prec: Precision) -> LaurentSeries {
        LaurentSeries::normalized(lead, coeffs, prec)
    }

    /// Exponent of `S` of the lowest nonzero term.
    pub fn ord(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.lead)
    }

    /// True when no nonzero coefficient is known (exact zero or apparent zero).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec == Precision::Exact
    }

    pub fn is_exact(&self) -> bool {
        self.prec == Precision::Exact
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Leading coefficient (zero for the zero series).
    pub fn lead_coeff(&self) -> FqElem {
        self.coeffs.first().copied().unwrap_or(FqElem::ZERO)
    }

    /// One past the highest stored exponent.
    pub fn end(&self) -> i64 {
        self.lead + self.coeffs.len() as i64
    }

    /// Coefficient of `S^i`; zero outside the stored range.
    pub fn coeff(&self, i: i64) -> FqElem {
        if i < self.lead || i >= self.end() {
            FqElem::ZERO
        } else {
            self.coeffs[(i - self.lead) as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.lead + i as i64, c))
    }

    /// Reduce modulo `S^n` (never raises the precision).
    pub fn truncate(&self, n: i64) -> LaurentSeries {
        let prec = self.prec.min(Precision::Abs(n));
        LaurentSeries::normalized(self.lead, self.coeffs.clone(), prec)
    }

    /// Drop every term of exponent `>= n` and declare the result exact.
    pub fn exact_part_below(&self, n: i64) -> LaurentSeries {
        let t = self.truncate(n);
        LaurentSeries::normalized(t.lead, t.coeffs, Precision::Exact)
    }

    /// Keep `rel` coefficients past the leading term.
    pub fn truncate_rel(&self, rel: i64) -> LaurentSeries {
        match self.ord() {
            Some(v) => self.truncate(v + rel),
            None => self.clone(),
        }
    }

    /// Same series with precision forgotten beyond `S^n` only if it was exact;
    /// used to view an exact value as a truncated one.
    pub fn with_prec(&self, prec: Precision) -> LaurentSeries {
        LaurentSeries::normalized(self.lead, self.coeffs.clone(), prec)
    }

    /// Multiply by `S^k`.
    pub fn shift(&self, k: i64) -> LaurentSeries {
        LaurentSeries {
            lead: if self.coeffs.is_empty() { 0 } else { self.lead + k },
            coeffs: self.coeffs.clone(),
            prec: self.prec.shift(k),
        }
    }

    /// Agreement modulo the smaller of the two precisions.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        let p = self.prec.min(other.prec).bound();
        let a = self.truncate(p);
        let b = other.truncate(p);
        a.lead == b.lead && a.coeffs == b.coeffs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub j: u32,
    pub e: u32,
    pub lead: i64,
    pub coeffs: Vec<Vec<u32>>,
    /// `None` for an exact series.
    pub prec: Option<i64>,
}

impl SeriesField {
    pub fn new(residue: Arc<Field>, j: u32, e: u32) -> Result<SeriesField> {
        if j == 0 || e == 0 || !residue.m().is_multiple_of(j) {
            return Err(Error::Invalid(format!(
                "series field needs j | m and e >= 1 (m={}, j={j}, e={e})",
                residue.m()
            )));
        }
        Ok(SeriesField { residue, j, e })
    }

    /// `K = F_{p^m}((T))`.
    pub fn base(p: u64, m: u32) -> Result<SeriesField> {
        SeriesField::new(fq_make(p, m)?, 1, 1)
    }

    /// `F_{q^j}((T^(1/e)))` over the same base `K`.
    pub fn extension(&self, j: u32, e: u32) -> Result<SeriesField> {
        let m = self.base_m() * j;
        SeriesField::new(fq_make(self.residue.p() as u64, m)?, j, e)
    }

    /// The base field `K` this field extends.
    pub fn base_field(&self) -> Result<SeriesField> {
        self.extension(1, 1)
    }

    pub fn residue(&self) -> &Arc<Field> {
        &self.residue
    }

    pub fn p(&self) -> u32 {
        self.residue.p()
    }

    /// `q`, the size of the residue field of the base `K`.
    pub fn base_q(&self) -> u64 {
        (self.residue.p() as u64).pow(self.base_m())
    }

    /// Degree of `F_q` over `F_p`.
    pub fn base_m(&self) -> u32 {
        self.residue.m() / self.j
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Exponent of `S` as a valuation in units of `v(T)`.
    pub fn to_val(&self, s_exp: i64) -> Rational {
        Rational::new(s_exp, self.e as i64)
    }

    pub fn val(&self, x: &LaurentSeries) -> Valuation {
        match (x.ord(), x.prec) {
            (Some(v), _) => Valuation::Finite(self.to_val(v)),
            (None, Precision::Exact) => Valuation::Infinite,
            (None, Precision::Abs(n)) => Valuation::Above(self.to_val(n)),
        }
    }

    pub fn from_elem(&self, c: FqElem) -> LaurentSeries {
        LaurentSeries::monomial(c, 0)
    }

    /// Sum of `(exponent of S, coefficient)` pairs, merging repeats.
    pub fn from_terms(
        &self,
        terms: impl IntoIterator<Item = (i64, FqElem)>,
        prec: Precision,
    ) -> LaurentSeries {
        let mut terms: Vec<(i64, FqElem)> = terms.into_iter().collect();
        if terms.is_empty() {
            return LaurentSeries::normalized(0, Vec::new(), prec);
        }
        terms.sort_by_key(|t| t.0);
        let lo = terms[0].0;
        let hi = terms[terms.len() - 1].0;
        let mut coeffs = vec![FqElem::ZERO; (hi - lo + 1) as usize];
        for (i, c) in terms {
            let slot = &mut coeffs[(i - lo) as usize];
            *slot = self.residue.add(*slot, c);
        }
        LaurentSeries::normalized(lo, coeffs, prec)
    }

    pub fn add(&self, x: &LaurentSeries, y: &LaurentSeries) -> LaurentSeries {
        let prec = x.prec.min(y.prec);
        if x.is_zero() {
            return y.truncate(prec.bound()).with_prec(prec);
        }
        if y.is_zero() {
            return x.truncate(prec.bound()).with_prec(prec);
        }
        let lo = x.lead.min(y.lead);
        let hi = x.end().max(y.end()).min(prec.bound());
        if hi <= lo {
            return LaurentSeries::normalized(0, Vec::new(), prec);
        }
        let f = &self.residue;
        let coeffs = (lo..hi).map(|i| f.add(x.coeff(i), y.coeff(i))).collect();
        LaurentSeries::normalized(lo, coeffs, prec)
    }

    pub fn neg(&self, x: &LaurentSeries) -> LaurentSeries {
        let f = &self.residue;
        LaurentSeries {
            lead: x.lead,
            coeffs: x.coeffs.iter().map(|&c| f.neg(c)).collect(),
            prec: x.prec,
        }
    }

    pub fn sub(&self, x: &LaurentSeries, y: &LaurentSeries) -> LaurentSeries {
        self.add(x, &self.neg(y))
    }

    /// Multiply by a residue-field constant.
    pub fn scale(&self, c: FqElem, x: &LaurentSeries) -> LaurentSeries {
        if c.is_zero() {
            return LaurentSeries::normalized(0, Vec::new(), Precision::Exact)
                .with_prec(Precision::Exact);
        }
        let f = &self.residue;
        LaurentSeries {
            lead: x.lead,
            coeffs: x.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
            prec: x.prec,
        }
    }

    /// Valuation of `x` used for precision bookkeeping: apparent zeros count
    /// as their precision.
    fn ord_or_prec(x: &LaurentSeries) -> i64 {
        x.ord().unwrap_or(x.prec.bound())
    }

    pub fn mul(&self, x: &LaurentSeries, y: &LaurentSeries) -> LaurentSeries {
        if x.is_exact_zero() || y.is_exact_zero() {
            return LaurentSeries::zero();
        }
        let vx = Self::ord_or_prec(x);
        let vy = Self::ord_or_prec(y);
        let prec = match (x.prec, y.prec) {
            (Precision::Exact, Precision::Exact) => Precision::Exact,
            (Precision::Exact, Precision::Abs(py)) => Precision::Abs(vx + py),
            (Precision::Abs(px), Precision::Exact) => Precision::Abs(vy + px),
            (Precision::Abs(px), Precision::Abs(py)) => Precision::Abs((vx + py).min(vy + px)),
        };
        if x.is_zero() || y.is_zero() {
            return LaurentSeries::normalized(0, Vec::new(), prec);
        }
        let lead = x.lead + y.lead;
        let full = x.coeffs.len() + y.coeffs.len() - 1;
        let len = match prec {
            Precision::Exact => full,
            Precision::Abs(n) => (n - lead).clamp(0, full as i64) as usize,
        };
        let f = &self.residue;
        let nnz = |s: &LaurentSeries| s.coeffs.iter().filter(|c| !c.is_zero()).count();
        let (x, y) = if nnz(y) < nnz(x) { (y, x) } else { (x, y) };
        let mut out = vec![FqElem::ZERO; len];
        for (i, &a) in x.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (k, &b) in y.coeffs.iter().take(len - i).enumerate() {
                out[i + k] = f.mul_add(a, b, out[i + k]);
            }
        }
        LaurentSeries::normalized(lead, out, prec)
    }

    /// Inverse; exact non-monomials get [`DEFAULT_WINDOW`] digits.
    pub fn inv(&self, x: &LaurentSeries) -> Result<LaurentSeries> {
        self.inv_window(x, DEFAULT_WINDOW)
    }

    pub fn inv_window(&self, x: &LaurentSeries, window: i64) -> Result<LaurentSeries> {
        let v = x.ord().ok_or(Error::DivisionByZero)?;
        let f = &self.residue;
        let u0_inv = f.inv(x.coeffs[0])?;
        if x.prec == Precision::Exact && x.coeffs.len() == 1 {
            return Ok(LaurentSeries::monomial(u0_inv, -v));
        }
        let rel = match x.prec {
            Precision::Exact => window,
            Precision::Abs(n) => n - v,
        };
        let rel = rel.max(0) as usize;
        let mut w = vec![FqElem::ZERO; rel];
        for n in 0..rel {
            let mut acc = if n == 0 { FqElem::ONE } else { FqElem::ZERO };
            for i in 1..=n.min(x.coeffs.len() - 1) {
                acc = f.sub(acc, f.mul(x.coeffs[i], w[n - i]));
            }
            w[n] = f.mul(acc, u0_inv);
        }
        Ok(LaurentSeries::normalized(
            -v,
            w,
            Precision::Abs(-v + rel as i64),
        ))
    }

    pub fn div(&self, x: &LaurentSeries, y: &LaurentSeries) -> Result<LaurentSeries> {
        if y.is_exact() && y.coeffs.len() == 1 {
            return Ok(self.mul(x, &self.inv(y)?));
        }
        // give the quotient as much relative precision as the numerator has
        let window = match x.prec {
            Precision::Exact => DEFAULT_WINDOW,
            Precision::Abs(n) => (n - Self::ord_or_prec(x)).max(1),
        };
        let window = match y.prec {
            Precision::Exact => window,
            Precision::Abs(n) => window.min(n - y.ord().unwrap_or(n)),
        };
        Ok(self.mul(x, &self.inv_window(y, window)?))
    }

    /// `x^n` by square-and-multiply; negative `n` inverts first.
    pub fn pow(&self, x: &LaurentSeries, n: i64) -> Result<LaurentSeries> {
        if n < 0 {
            let inv = self.inv(x)?;
            return Ok(self.pow_u(&inv, n.unsigned_abs()));
        }
        Ok(self.pow_u(x, n as u64))
    }

    /// `x^n`, walking the base-`p` digits of `n` so that `p`-th powers are
    /// taken by [`SeriesField::pth_power`].
    pub fn pow_u(&self, x: &LaurentSeries, mut n: u64) -> LaurentSeries {
        let p = self.p() as u64;
        let mut acc = LaurentSeries::one();
        let mut base = x.clone();
        while n > 0 {
            let r = n % p;
            if r > 0 {
                acc = self.mul(&acc, &self.pow_small(&base, r));
            }
            n /= p;
            if n > 0 {
                base = self.pth_power(&base);
            }
        }
        acc
    }

    fn pow_small(&self, x: &LaurentSeries, mut n: u64) -> LaurentSeries {
        let mut acc = LaurentSeries::one();
        let mut base = x.clone();
        loop {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n == 0 {
                return acc;
            }
            base = self.mul(&base, &base);
        }
    }

    /// `x^p`; in characteristic `p` this is coefficientwise, and a series
    /// known modulo `S^n` has its `p`-th power known modulo `S^(pn)`.
    pub fn pth_power(&self, x: &LaurentSeries) -> LaurentSeries {
        let p = self.p();
        let f = &self.residue;
        let terms = x.terms().map(|(i, c)| (i * p as i64, f.frobenius(c, 1)));
        self.from_terms(terms, x.prec.scale(p))
    }

    /// `x^n` known modulo `S^target`, for an exact `x`.
    pub fn pow_to(&self, x: &LaurentSeries, n: u64, target: i64) -> LaurentSeries {
        if n == 0 {
            return LaurentSeries::one().truncate(target);
        }
        let Some(v) = x.ord() else {
            return if x.is_exact() {
                LaurentSeries::zero()
            } else {
                LaurentSeries::zero_to(target)
            };
        };
        let total = v.saturating_mul(n as i64);
        let rel = target.saturating_sub(total);
        if rel <= 0 {
            return LaurentSeries::zero_to(target);
        }
        let unit = x.shift(-v).truncate(rel);
        self.pow_u(&unit, n).shift(total).truncate(target)
    }

    /// Coefficient of `T^g`, i.e. of `S^(g e)`.
    pub fn coefficient_at(&self, x: &LaurentSeries, g: Rational) -> Result<FqElem> {
        let scaled = g * Rational::from_integer(self.e as i64);
        if !scaled.is_integer() {
            return Err(Error::Invalid(format!(
                "exponent {g} is not a multiple of 1/{}",
                self.e
            )));
        }
        let i = scaled.to_integer();
        if i >= x.prec.bound() {
            return Err(Error::Precision(format!(
                "coefficient of T^{g} requested but series known only below T^{}",
                self.to_val(x.prec.bound())
            )));
        }
        Ok(x.coeff(i))
    }

    /// Re-express in the uniformizer `S'` with `S'^e_new = S`.
    pub fn rescale(&self, x: &LaurentSeries, e_new: u32) -> Result<(SeriesField, LaurentSeries)> {
        let target = SeriesField::new(self.residue.clone(), self.j, self.e * e_new)?;
        Ok((target, rescale_series(x, e_new)))
    }

    /// Apply `a -> a^(p^i)` to every coefficient.
    pub fn frobenius(&self, x: &LaurentSeries, i: i64) -> LaurentSeries {
        let f = &self.residue;
        LaurentSeries {
            lead: x.lead,
            coeffs: x.coeffs.iter().map(|&c| f.frobenius(c, i)).collect(),
            prec: x.prec,
        }
    }

    /// `S -> zeta S`.
    pub fn twist(&self, x: &LaurentSeries, zeta: FqElem) -> LaurentSeries {
        let f = &self.residue;
        let terms: Vec<FqElem> = x
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f.mul(c, f.pow(zeta, (x.lead + i as i64).rem_euclid(f.q() as i64 - 1) as u64)))
            .collect();
        LaurentSeries::normalized(x.lead, terms, x.prec)
    }

    /// Image of a series over `src` under a coefficient embedding, with
    /// exponents scaled from `src.e` to `self.e`.
    pub fn embed_series(
        &self,
        src: &SeriesField,
        emb: &Embedding,
        x: &LaurentSeries,
    ) -> Result<LaurentSeries> {
        if !self.e.is_multiple_of(src.e) || **emb.target() != *self.residue || **emb.source() != *src.residue
        {
            return Err(Error::FieldMismatch(format!("cannot embed {src:?} into {self:?}")));
        }
        let mapped = LaurentSeries {
            lead: x.lead,
            coeffs: x.coeffs.iter().map(|&c| emb.apply(c)).collect(),
            prec: x.prec,
        };
        Ok(rescale_series(&mapped, self.e / src.e))
    }

    /// Inverse of [`SeriesField::embed_series`], when the series lies in the
    /// image.
    pub fn restrict_series(
        &self,
        dst: &SeriesField,
        emb: &Embedding,
        x: &LaurentSeries,
    ) -> Option<LaurentSeries> {
        if !self.e.is_multiple_of(dst.e) {
            return None;
        }
        let r = (self.e / dst.e) as i64;
        let mut terms = Vec::new();
        for (i, c) in x.terms() {
            if i % r != 0 {
                return None;
            }
            terms.push((i / r, emb.preimage(c)?));
        }
        let prec = match x.prec {
            Precision::Exact => Precision::Exact,
            Precision::Abs(n) => Precision::Abs(n.div_euclid(r) + (n.rem_euclid(r) != 0) as i64),
        };
        Some(dst.from_terms(terms, prec))
    }

    /// Text form: `c*T^i` terms joined by `+`, extension coefficients written
    /// as repeated `g^i` atoms, `O(T^n)` for the precision of an inexact
    /// series.
    pub fn format(&self, x: &LaurentSeries) -> String {
        let f = &self.residue;
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in x.terms() {
            let tpow = self.format_tpow(i);
            if f.m() == 1 {
                let n = c.index();
                parts.push(match (n, tpow.as_deref()) {
                    (n, None) => n.to_string(),
                    (1, Some(t)) => t.to_string(),
                    (n, Some(t)) => format!("{n}*{t}"),
                });
            } else {
                for (k, &ck) in f.coeffs(c).iter().enumerate() {
                    let atom = match k {
                        0 => "1".to_string(),
                        1 => "g".to_string(),
                        _ => format!("g^{k}"),
                    };
                    for _ in 0..ck {
                        parts.push(match (atom.as_str(), tpow.as_deref()) {
                            (a, None) => a.to_string(),
                            ("1", Some(t)) => t.to_string(),
                            (a, Some(t)) => format!("{a}*{t}"),
                        });
                    }
                }
            }
        }
        let mut s = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        if let Precision::Abs(n) = x.prec {
            let t = self.format_tpow(n).unwrap_or_else(|| "1".to_string());
            s = format!("{s} + O({t})");
        }
        s
    }

    fn format_tpow(&self, i: i64) -> Option<String> {
        if i == 0 {
            return None;
        }
        let v = self.to_val(i);
        Some(if v.is_integer() {
            match v.to_integer() {
                1 => "T".to_string(),
                n => format!("T^{n}"),
            }
        } else {
            format!("T^({}/{})", v.numer(), v.denom())
        })
    }

    pub fn to_json(&self, x: &LaurentSeries) -> SeriesJson {
        SeriesJson {
            j: self.j,
            e: self.e,
            lead: x.lead,
            coeffs: x.coeffs.iter().map(|&c| self.residue.coeffs(c)).collect(),
            prec: match x.prec {
                Precision::Exact => None,
                Precision::Abs(n) => Some(n),
            },
        }
    }

    pub fn from_json(&self, js: &SeriesJson) -> Result<LaurentSeries> {
        if js.j != self.j || js.e != self.e {
            return Err(Error::FieldMismatch(format!(
                "series for (j={}, e={}) read into (j={}, e={})",
                js.j, js.e, self.j, self.e
            )));
        }
        let coeffs = js
            .coeffs
            .iter()
            .map(|v| {
                let v: Vec<i64> = v.iter().map(|&c| c as i64).collect();
                self.residue.from_coeffs(&v)
            })
            .collect::<Result<Vec<_>>>()?;
        let prec = js.prec.map_or(Precision::Exact, Precision::Abs);
        Ok(LaurentSeries::normalized(js.lead, coeffs, prec))
    }
}

fn rescale_series(x: &LaurentSeries, r: u32) -> LaurentSeries {
    if r == 1 || x.coeffs.is_empty() {
        return LaurentSeries {
            lead: x.lead * r as i64,
            coeffs: x.coeffs.clone(),
            prec: x.prec.shift(0).scale(r),
        };
    }
    let r = r as usize;
    let mut coeffs = vec![FqElem::ZERO; (x.coeffs.len() - 1) * r + 1];
    for (i, &c) in x.coeffs.iter().enumerate() {
        coeffs[i * r] = c;
    }
    LaurentSeries::normalized(x.lead * r as i64, coeffs, x.prec.scale(r as u32))
}

impl Precision {
    fn scale(self, r: u32) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Abs(n) => Precision::Abs(n * r as i64),
        }
    }
}

/// Rational to `f64`, for reports only.
pub fn rational_to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `"num/den"` or `"num"`.
pub fn rational_text(r: Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
