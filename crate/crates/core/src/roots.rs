//! Zeros of sparse polynomials in `F_{q^j}((T^(1/e)))`.
//!
//! Roots are located segment by segment on the Newton polygon. Each root of
//! a residual polynomial over the residue field marks a disk; a disk holding
//! one root (with multiplicity) is refined by Newton iteration, and a disk
//! holding several is re-expanded around its center with exact Hasse
//! derivatives until the roots separate, an exact root turns up, or the
//! requested precision runs out.

use std::collections::BTreeSet;
use std::env;

use num_integer::Integer;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::{Field, FqElem};
use crate::laurent::{rational_text, LaurentSeries, Precision, SeriesField};
use crate::newton::{binom_mod_p, lower_hull, polygon};
use crate::poly::SparsePoly;

/// Default cap on the number of candidates the brute-force oracle visits.
pub const DEFAULT_MAX_ENUM: u64 = 1 << 22;

/// Largest `deg f * len(x)` for which a candidate root is evaluated exactly.
const EXACT_EVAL_CAP: u64 = 1 << 22;

/// Enumeration cap, overridable through `SPARSEZEROS_MAX_ENUM`.
pub fn max_enum() -> u64 {
    env::var("SPARSEZEROS_MAX_ENUM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ENUM)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Exact(u32),
    UpperBound(u32),
}

impl Degree {
    pub fn value(self) -> u32 {
        match self {
            Degree::Exact(n) | Degree::UpperBound(n) => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootRecord {
    /// Exact for exact roots, otherwise known modulo `S^certified_prec`.
    pub value: LaurentSeries,
    pub multiplicity: u64,
    /// Simple root certified by Newton iteration, or exact root.
    pub resolved: bool,
    pub exact: bool,
    /// `(j, e)` of the field searched.
    pub field: (u32, u32),
    /// Smallest `(j', e')` whose field contains the root (as far as the known
    /// digits show).
    pub home: (u32, u32),
    pub degree: Degree,
    /// Absolute `S`-precision to which `value` is a root; `None` if exact.
    pub certified_prec: Option<i64>,
}

impl RootRecord {
    /// Lowest `S`-exponent, `None` for the root 0.
    pub fn ord(&self) -> Option<i64> {
        self.value.ord()
    }

    pub fn to_json(&self, sf: &SeriesField) -> Value {
        let degree = match self.degree {
            Degree::Exact(n) => json!({ "exact": n }),
            Degree::UpperBound(n) => json!({ "upper_bound": n }),
        };
        json!({
            "value": sf.format(&self.value),
            "series": sf.to_json(&self.value),
            "field": [self.field.0, self.field.1],
            "home": [self.home.0, self.home.1],
            "multiplicity": self.multiplicity,
            "resolved": self.resolved,
            "exact": self.exact,
            "degree": degree,
            "certified_prec": self.certified_prec.map(|n| rational_text(sf.to_val(n))),
        })
    }
}

/// Nonzero roots in `field` of `sum c y^d`, with multiplicities.
pub fn sparse_residual_roots(field: &Field, terms: &[(u64, FqElem)]) -> Vec<(FqElem, u64)> {
    let p = field.p() as u64;
    let deg = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let hasse = |t: u64, y: FqElem| {
        terms
            .iter()
            .filter(|(d, _)| *d >= t)
            .fold(FqElem::ZERO, |acc, &(d, c)| {
                let b = binom_mod_p(d, t, p);
                if b == 0 {
                    acc
                } else {
                    let term = field.mul(field.from_int(b as i64), field.pow(y, d - t));
                    field.mul_add(c, term, acc)
                }
            })
    };
    field
        .elements()
        .filter(|y| !y.is_zero())
        .filter_map(|y| {
            (0..=deg)
                .find(|&t| !hasse(t, y).is_zero())
                .filter(|&t| t > 0)
                .map(|t| (y, t))
        })
        .collect()
}

struct Finder<'a> {
    f: &'a SparsePoly,
    df: Option<SparsePoly>,
    sf: &'a SeriesField,
    /// Relative `S`-digits requested per root.
    prec: i64,
    scale: u64,
    out: Vec<RootRecord>,
}

impl Finder<'_> {
    fn record(&mut self, value: LaurentSeries, mult: u64, resolved: bool, certified: Option<i64>) {
        let exact = certified.is_none() && resolved;
        self.out.push(RootRecord {
            home: home_of(self.sf, &value),
            degree: Degree::Exact(1),
            field: (self.sf.j(), self.sf.e()),
            value,
            multiplicity: mult * self.scale,
            resolved,
            exact,
            certified_prec: certified,
        });
    }

    fn top(&mut self) -> Result<()> {
        let f = self.f;
        let n0 = f.terms()[0].0;
        if n0 > 0 {
            self.record(LaurentSeries::zero(), n0, true, None);
        }
        let np = polygon(f)?;
        let mut segs = np.segments.clone();
        segs.sort_by_key(|s| s.hull_pos);
        let e = self.sf.e() as i64;
        for seg in segs {
            let gs = seg.g * e;
            if !gs.is_integer() {
                continue;
            }
            let gamma = gs.to_integer();
            let lo = seg.exponents[0];
            let residual: Vec<(u64, FqElem)> = seg
                .exponents
                .iter()
                .map(|n| {
                    let a = &f.terms().iter().find(|t| t.0 == *n).unwrap().1;
                    (n - lo, a.lead_coeff())
                })
                .collect();
            for (c, m) in sparse_residual_roots(self.sf.residue(), &residual) {
                self.cluster(LaurentSeries::monomial(c, gamma), gamma, m, gamma)?;
            }
        }
        Ok(())
    }

    /// The roots `x` with `v(x - base) > w`, `m` of them with multiplicity.
    fn cluster(&mut self, base: LaurentSeries, w: i64, m: u64, lead: i64) -> Result<()> {
        let limit = lead + self.prec;
        if m == 1 {
            return self.newton(base, w, lead);
        }
        let b: Vec<LaurentSeries> = (0..=m).map(|j| self.f.hasse_at(j, &base)).collect();
        let t0 = b.iter().position(|x| !x.is_zero()).ok_or_else(|| {
            Error::CheckFailed("cluster expansion vanished identically".into())
        })? as u64;
        if t0 == m {
            self.record(base, m, true, None);
            return Ok(());
        }
        if w >= limit - 1 {
            self.record(base.with_prec(Precision::Abs(limit)), m, false, Some(limit));
            return Ok(());
        }
        let idx: Vec<u64> = (t0..=m).filter(|&j| !b[j as usize].is_zero()).collect();
        let pts: Vec<(i128, i128)> = idx
            .iter()
            .map(|&j| (j as i128, b[j as usize].lead() as i128))
            .collect();
        let hull = lower_hull(&pts);
        if *idx.last().unwrap() != m {
            return Err(Error::CheckFailed(format!(
                "cluster of multiplicity {m} lost its last vertex"
            )));
        }
        let mut subs: Vec<(i64, FqElem, u64)> = Vec::new();
        for win in hull.windows(2) {
            let (a, z) = (pts[win[0]], pts[win[1]]);
            let dv = (a.1 - z.1) as i64;
            let dn = (z.0 - a.0) as i64;
            if dv % dn != 0 {
                continue;
            }
            let g = dv / dn;
            if g <= w {
                return Err(Error::CheckFailed(format!(
                    "cluster at radius {w} produced slope {g}"
                )));
            }
            let residual: Vec<(u64, FqElem)> = (win[0]..=win[1])
                .filter(|&i| {
                    let (x, y) = pts[i];
                    (z.0 - a.0) * (y - a.1) == (z.1 - a.1) * (x - a.0)
                })
                .map(|i| ((pts[i].0 - a.0) as u64, b[pts[i].0 as usize].lead_coeff()))
                .collect();
            for (c, mc) in sparse_residual_roots(self.sf.residue(), &residual) {
                subs.push((g, c, mc));
            }
        }
        let far: Vec<&(i64, FqElem, u64)> = subs.iter().filter(|s| s.0 >= limit).collect();
        let far_items = far.len() + usize::from(t0 > 0);
        if far_items >= 2 {
            let total = t0 + far.iter().map(|s| s.2).sum::<u64>();
            self.record(base.with_prec(Precision::Abs(limit)), total, false, Some(limit));
        } else if t0 > 0 {
            self.record(base.clone(), t0, true, None);
        }
        let sf = self.sf.clone();
        for &(g, c, mc) in &subs {
            if g >= limit && far_items >= 2 {
                continue;
            }
            let next = sf.add(&base, &LaurentSeries::monomial(c, g));
            self.cluster(next, g, mc, lead)?;
        }
        Ok(())
    }

    /// Newton iteration for the unique root in `v(x - base) > w`.
    fn newton(&mut self, base: LaurentSeries, w: i64, lead: i64) -> Result<()> {
        let sf = self.sf.clone();
        let target = lead + self.prec;
        let df = self
            .df
            .as_ref()
            .ok_or_else(|| Error::CheckFailed("simple root of a polynomial with f' = 0".into()))?;
        let mu = df.evaluate(&base).ord().ok_or_else(|| {
            Error::CheckFailed("derivative vanishes at a simple root".into())
        })?;
        let mut x = base;
        let mut steps = 0;
        loop {
            let fx = self.f.eval_to(&x, target + mu);
            let Some(vf) = fx.ord() else { break };
            steps += 1;
            if vf - mu <= w || steps > 4 * (target - w).max(1) + 64 {
                return Err(Error::CheckFailed(format!(
                    "Newton iteration left the disk of radius {w}"
                )));
            }
            let rel = target + mu - vf;
            let dfx = df.eval_to(&x, mu + rel);
            let delta = sf.div(&fx, &dfx)?;
            x = sf.sub(&x, &delta).exact_part_below(target);
        }
        let len = x.end() - x.lead();
        let exact = len as u64 * self.f.degree().max(1) <= EXACT_EVAL_CAP
            && self.f.evaluate(&x).is_exact_zero();
        if exact {
            self.record(x, 1, true, None);
        } else {
            self.record(x.with_prec(Precision::Abs(target)), 1, true, Some(target));
        }
        Ok(())
    }
}

/// The smallest `(j', e')` consistent with the known digits of `x`.
pub fn home_of(sf: &SeriesField, x: &LaurentSeries) -> (u32, u32) {
    let f = sf.residue();
    let bm = sf.base_m();
    let j = (1..=sf.j())
        .filter(|d| sf.j().is_multiple_of(*d))
        .find(|d| x.terms().all(|(_, c)| f.in_subfield(c, bm * d)))
        .unwrap_or(sf.j());
    let gcd = x
        .terms()
        .fold(sf.e() as i64, |g, (i, _)| g.gcd(&i));
    let e = sf.e() / gcd.max(1) as u32;
    (j, e)
}

fn sort_records(sf: &SeriesField, recs: &mut [RootRecord]) {
    let key = |r: &RootRecord| {
        let coeffs: Vec<Vec<u32>> = r.value.coeffs().iter().map(|&c| sf.residue().coeffs(c)).collect();
        (r.value.ord().map_or(i64::MIN, |v| v), r.value.lead(), coeffs)
    };
    recs.sort_by_key(key);
}

/// Distinct zeros of `f` in `target`, each known to `prec` `S`-digits past
/// its leading term.
pub fn roots_in(f: &SparsePoly, target: &SeriesField, prec: i64) -> Result<Vec<RootRecord>> {
    if !f.is_exact() {
        return Err(Error::Invalid("root finding needs exact coefficients".into()));
    }
    if prec < 1 {
        return Err(Error::Invalid("precision must be at least 1".into()));
    }
    let g = if f.field() == target {
        f.clone()
    } else {
        f.base_change(target)?
    };
    let (reduced, s) = g.pth_power_reduce()?;
    let scale = (target.p() as u64).pow(s);
    let mut finder = Finder {
        f: &reduced,
        df: reduced.derivative(),
        sf: target,
        prec,
        scale,
        out: Vec::new(),
    };
    finder.top()?;
    let mut out = finder.out;
    sort_records(target, &mut out);
    Ok(out)
}

fn lcm_upto(d: u32) -> u32 {
    (1..=d).fold(1u32, |acc, i| acc.lcm(&i))
}

/// Zeros of degree at most `d` over `K` in the tame lattice
/// `F_{q^L}((T^(1/e)))`, `L = lcm(1..d)`, `e <= d`, `p` not dividing `e`.
pub fn roots_deg_le_d(f: &SparsePoly, d: u32, prec: i64) -> Result<Vec<(SeriesField, RootRecord)>> {
    let base = f.field();
    if base.j() != 1 || base.e() != 1 {
        return Err(Error::Invalid("roots_deg_le_d needs a polynomial over K".into()));
    }
    if d == 0 {
        return Err(Error::Invalid("degree bound must be at least 1".into()));
    }
    let l = lcm_upto(d);
    let p = base.p();
    let mut out = Vec::new();
    for e in (1..=d).filter(|e| *e == 1 || e % p != 0) {
        let target = base.extension(l, e)?;
        let field_q = (target.residue().q() - 1) as u64;
        if !field_q.is_multiple_of(e as u64) {
            continue;
        }
        let zeta = target.residue().root_of_unity(e as u64).ok_or_else(|| {
            Error::CheckFailed(format!("no primitive {e}-th root of unity"))
        })?;
        let recs = roots_in(f, &target, prec * e as i64)?;
        let m = target.base_m() as i64;
        for mut r in recs {
            let (hj, he) = home_of(&target, &r.value);
            if he != e {
                continue;
            }
            let degree = if r.resolved {
                let mut orbit: BTreeSet<(i64, Vec<FqElem>)> = BTreeSet::new();
                for i in 0..l as i64 {
                    let s = target.frobenius(&r.value, i * m);
                    for k in 0..e {
                        let z = target.residue().pow(zeta, k as u64);
                        let t = target.twist(&s, z);
                        orbit.insert((t.lead(), t.coeffs().to_vec()));
                    }
                }
                Degree::Exact(orbit.len() as u32)
            } else {
                Degree::UpperBound(hj * e)
            };
            if degree.value() > d && matches!(degree, Degree::Exact(_)) {
                continue;
            }
            r.home = (hj, he);
            r.degree = degree;
            out.push((target.clone(), r));
        }
    }
    Ok(out)
}

/// Number of zeros, with multiplicity, of `f` in the closed disk
/// `v(x - center) >= rho`, read off the valuations of `D^j f(center)`.
pub fn roots_in_closed_disk(f: &SparsePoly, center: &LaurentSeries, rho: i64) -> u64 {
    let mut best: Option<(i128, u64)> = None;
    for j in 0..=f.degree() {
        let Some(v) = f.hasse_at(j, center).ord() else { continue };
        let val = v as i128 + j as i128 * rho as i128;
        match best {
            Some((b, _)) if val > b => {}
            _ => best = Some((val, j)),
        }
    }
    best.map_or(0, |b| b.1)
}

/// Brute-force search: every `x = S^w (c_0 + ... + c_{prec-1} S^{prec-1})`,
/// `c_0 != 0`, `w` in the window, whose residue disk holds a zero of `f`
/// that stays separated from the other zeros through `prec` further digits.
/// Returns the zeros modulo `S^{w+prec}`, plus `0` when `f(0) = 0`.
pub fn oracle_roots(f: &SparsePoly, prec: i64, window: (i64, i64)) -> Result<Vec<LaurentSeries>> {
    if !f.is_exact() {
        return Err(Error::Invalid("the oracle needs exact coefficients".into()));
    }
    if prec < 1 || window.0 > window.1 {
        return Err(Error::Invalid("oracle needs prec >= 1 and lo <= hi".into()));
    }
    let sf = f.field();
    let field = sf.residue();
    let q = field.q() as u64;
    let per_w = (q - 1).saturating_mul(q.checked_pow(prec as u32 - 1).unwrap_or(u64::MAX));
    let width = (window.1 - window.0 + 1) as u64;
    let total = per_w.saturating_mul(width);
    let cap = max_enum();
    if total > cap {
        return Err(Error::CapExceeded(format!(
            "oracle would visit {total} candidates (cap {cap})"
        )));
    }
    let mins: Vec<(i64, i64)> = f
        .terms()
        .iter()
        .map(|(n, a)| (a.ord().unwrap(), *n as i64))
        .collect();
    let candidates: Vec<(i64, u64)> = (window.0..=window.1)
        .flat_map(|w| (0..per_w).map(move |i| (w, i)))
        .collect();
    let mut found: Vec<LaurentSeries> = candidates
        .par_iter()
        .filter_map(|&(w, idx)| {
            let mut digits = Vec::with_capacity(prec as usize);
            digits.push(FqElem((1 + idx % (q - 1)) as u32));
            let mut rest = idx / (q - 1);
            for _ in 1..prec {
                digits.push(FqElem((rest % q) as u32));
                rest /= q;
            }
            let x = LaurentSeries::from_dense(w, digits, Precision::Exact);
            let theta = mins.iter().map(|(v, n)| v + n * w).min().unwrap() + prec;
            if !f.eval_to(&x, theta).is_zero() {
                return None;
            }
            let rho = w + prec;
            if roots_in_closed_disk(f, &x, rho) == 0 {
                return None;
            }
            let mut level = vec![x.clone()];
            for depth in 0..prec {
                let pos = rho + depth;
                let mut next = Vec::new();
                for c in &level {
                    for digit in field.elements() {
                        let y = sf.add(c, &LaurentSeries::monomial(digit, pos));
                        if roots_in_closed_disk(f, &y, pos + 1) > 0 {
                            next.push(y);
                        }
                    }
                }
                if next.is_empty() {
                    return None;
                }
                level = next;
            }
            Some(x.with_prec(Precision::Abs(rho)))
        })
        .collect();
    if f.terms()[0].0 > 0 {
        found.push(LaurentSeries::zero());
    }
    found.sort_by_key(|x| (x.ord(), x.coeffs().to_vec()));
    Ok(found)
}

/// Records truncated the way [`oracle_roots`] reports them.
pub fn truncate_for_oracle(records: &[RootRecord], prec: i64) -> Vec<LaurentSeries> {
    let mut out: Vec<LaurentSeries> = records
        .iter()
        .map(|r| match r.value.ord() {
            None if r.value.is_exact_zero() => LaurentSeries::zero(),
            None => r.value.clone(),
            Some(v) => r.value.truncate(v + prec),
        })
        .collect();
    out.sort_by_key(|x| (x.ord(), x.coeffs().to_vec()));
    out.dedup();
    out
}

/// JSON report with the count compared to `q^k`.
pub fn roots_report(f: &SparsePoly, sf: &SeriesField, records: &[RootRecord]) -> Value {
    let bound = num_bigint::BigUint::from(f.field().base_q()).pow(f.k() as u32);
    let count = records.len();
    let as_json = |x: &num_bigint::BigInt| {
        i64::try_from(x).map_or_else(|_| json!(x.to_string()), |v| json!(v))
    };
    let bound_i = num_bigint::BigInt::from(bound);
    let slack = &bound_i - num_bigint::BigInt::from(count);
    json!({
        "schema": "v1",
        "polynomial": f.format(),
        "k": f.k(),
        "field": { "p": sf.p(), "q": f.field().base_q(), "j": sf.j(), "e": sf.e() },
        "roots": records.iter().map(|r| r.to_json(sf)).collect::<Vec<_>>(),
        "count": count,
        "unresolved": records.iter().filter(|r| !r.resolved).count(),
        "bound": as_json(&bound_i),
        "slack": as_json(&slack),
        "equality": slack == num_bigint::BigInt::from(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_poly, parse_series};

    fn k(p: u64, m: u32) -> SeriesField {
        SeriesField::base(p, m).unwrap()
    }

    #[test]
    fn residual_roots_examples() {
        let f2 = crate::fields::fq_make(2, 1).unwrap();
        // u^2 + 1 = (u + 1)^2
        assert_eq!(
            sparse_residual_roots(&f2, &[(0, FqElem::ONE), (2, FqElem::ONE)]),
            vec![(FqElem::ONE, 2)]
        );
        let f4 = crate::fields::fq_make(2, 2).unwrap();
        let r = sparse_residual_roots(&f4, &[(0, FqElem::ONE), (1, FqElem::ONE), (2, FqElem::ONE)]);
        assert_eq!(r.len(), 2);
        for (y, m) in r {
            assert_eq!(m, 1);
            assert_eq!(f4.eval_poly(&[FqElem::ONE, FqElem::ONE, FqElem::ONE], y), FqElem::ZERO);
        }
    }

    #[test]
    fn artin_schreier_roots_field_elements() {
        for (p, m) in [(2, 1), (3, 1), (2, 2)] {
            let sf = k(p, m);
            let q = sf.base_q();
            let f = parse_poly(&format!("x^{q} - x"), &sf).unwrap();
            let recs = roots_in(&f, &sf, 8).unwrap();
            assert_eq!(recs.len() as u64, q);
            assert!(recs.iter().all(|r| r.exact && r.resolved && r.multiplicity == 1));
            let values: BTreeSet<_> = recs.iter().map(|r| r.value.coeff(0)).collect();
            assert_eq!(values.len() as u64, q);
        }
    }

    #[test]
    fn e1_roots() {
        let sf = k(2, 1);
        let f = parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &sf).unwrap();
        let recs = roots_in(&f, &sf, 8).unwrap();
        let expected: Vec<LaurentSeries> = ["0", "1", "T", "1+T"]
            .iter()
            .map(|s| parse_series(s, &sf).unwrap())
            .collect();
        let mut got: Vec<LaurentSeries> = recs.iter().map(|r| r.value.clone()).collect();
        got.sort_by_key(|x| (x.ord(), x.coeffs().to_vec()));
        let mut want = expected.clone();
        want.sort_by_key(|x| (x.ord(), x.coeffs().to_vec()));
        assert_eq!(got, want);
        assert!(recs.iter().all(|r| r.exact));
    }

    #[test]
    fn hensel_example() {
        let sf = k(2, 1);
        let f = parse_poly("x^2 + x + T", &sf).unwrap();
        let recs = roots_in(&f, &sf, 8).unwrap();
        assert_eq!(recs.len(), 2);
        // order-by-order oracle: solve a_n from the coefficient of T^n
        let mut a = [0u32; 9];
        for n in 1..9 {
            let mut sq = 0u32;
            for i in 0..=n {
                if 2 * i == n {
                    sq ^= a[i];
                }
            }
            // a_n + (a^2)_n + [n == 1] = 0 with a_0 = 0
            a[n] = sq ^ u32::from(n == 1);
        }
        let small = sf.from_terms(
            a.iter().enumerate().map(|(i, &c)| (i as i64, FqElem(c))),
            Precision::Abs(8),
        );
        assert_eq!(
            parse_series("T + T^2 + T^4", &sf).unwrap().truncate(8),
            small.truncate(8)
        );
        let low = recs.iter().find(|r| r.value.ord() == Some(1)).unwrap();
        assert_eq!(low.value.truncate(8), small);
        let high = recs.iter().find(|r| r.value.ord() == Some(0)).unwrap();
        assert_eq!(high.value.truncate(8), sf.add(&small, &LaurentSeries::one()).truncate(8));
        for r in &recs {
            assert!(!r.exact && r.resolved);
            let v = f.evaluate(&r.value);
            assert!(v.is_zero() || v.lead() >= r.certified_prec.unwrap());
        }
    }

    #[test]
    fn no_root_when_slope_is_fractional() {
        let sf = k(2, 1);
        let f = parse_poly("x^2 + T", &sf).unwrap();
        assert!(roots_in(&f, &sf, 8).unwrap().is_empty());
        let ramified = sf.extension(1, 2).unwrap();
        let recs = roots_in(&f, &ramified, 8).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].multiplicity, 2);
        assert!(recs[0].exact);
        assert_eq!(recs[0].home, (1, 2));
    }

    #[test]
    fn unresolved_cluster_is_reported() {
        // double root 1/(1+T) over F_3, not a Laurent polynomial
        let sf = k(3, 1);
        let f = parse_poly("(1+2*T+T^2)*x^2 - (2+2*T)*x + 1", &sf).unwrap();
        let recs = roots_in(&f, &sf, 6).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(!recs[0].resolved);
        assert_eq!(recs[0].multiplicity, 2);
        let expect = sf.inv(&parse_series("1+T", &sf).unwrap()).unwrap().truncate(6);
        assert_eq!(recs[0].value, expect);
    }

    #[test]
    fn degree_two_search() {
        let sf = k(2, 1);
        let f = parse_poly("x^4 + x", &sf).unwrap();
        let recs = roots_deg_le_d(&f, 2, 6).unwrap();
        let mut degrees: Vec<u32> = recs.iter().map(|(_, r)| r.degree.value()).collect();
        degrees.sort();
        assert_eq!(degrees, vec![1, 1, 2, 2]);
        let e1 = parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &sf).unwrap();
        assert_eq!(roots_deg_le_d(&e1, 1, 6).unwrap().len(), 4);
    }

    #[test]
    fn tame_ramified_degree() {
        // x^2 - T over F_3((T)): roots +-T^(1/2), one orbit of size 2
        let sf = k(3, 1);
        let f = parse_poly("x^2 - T", &sf).unwrap();
        let recs = roots_deg_le_d(&f, 2, 4).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs.iter().all(|(_, r)| r.degree == Degree::Exact(2) && r.home == (1, 2)));
    }

    #[test]
    fn oracle_examples() {
        let sf = k(2, 1);
        let e1 = parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &sf).unwrap();
        let got = oracle_roots(&e1, 6, (0, 2)).unwrap();
        let want: Vec<LaurentSeries> = ["0", "1", "T", "1+T"]
            .iter()
            .map(|s| {
                let x = parse_series(s, &sf).unwrap();
                match x.ord() {
                    None => x,
                    Some(v) => x.truncate(v + 6),
                }
            })
            .collect();
        assert_eq!(got.len(), 4);
        for w in &want {
            assert!(got.contains(w), "{}", sf.format(w));
        }
        let lin = parse_poly("x + 1", &sf).unwrap();
        assert_eq!(oracle_roots(&lin, 4, (-2, 2)).unwrap(), vec![LaurentSeries::one().truncate(4)]);
        let none = parse_poly("x^2 + T", &sf).unwrap();
        assert!(oracle_roots(&none, 5, (-3, 3)).unwrap().is_empty());
    }
}
