//! Subspace polynomials and the families that attain the root bounds.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::census::bound_table;
use crate::error::{Error, Result};
use crate::fields::{Embedding, FqElem};
use crate::laurent::{LaurentSeries, SeriesField};
use crate::poly::SparsePoly;
use crate::roots::{roots_deg_le_d, roots_in, RootRecord};

pub const DEGREE_CAP: u64 = 1 << 16;

/// `V` is the `F`-span of `basis`, with `F = F_{q^label_degree}`.
#[derive(Clone, Debug)]
pub struct SubspaceSpec {
    pub base: SeriesField,
    pub label_degree: u32,
    pub basis: Vec<LaurentSeries>,
    pub scale: LaurentSeries,
}

impl SubspaceSpec {
    pub fn new(base: SeriesField, label_degree: u32, basis: Vec<LaurentSeries>) -> SubspaceSpec {
        SubspaceSpec {
            base,
            label_degree,
            basis,
            scale: LaurentSeries::one(),
        }
    }

    /// `|F|`.
    pub fn label_size(&self) -> u64 {
        self.base.base_q().pow(self.label_degree)
    }

    /// The series field `F((T))` in which `V` lives.
    pub fn label_series_field(&self) -> Result<SeriesField> {
        self.base.extension(self.label_degree, 1)
    }

    fn check(&self) -> Result<()> {
        if self.base.j() != 1 || self.base.e() != 1 {
            return Err(Error::Invalid("subspace specs live over the base field".into()));
        }
        if self.label_degree == 0 {
            return Err(Error::Invalid("label field degree must be positive".into()));
        }
        if self.basis.iter().any(|b| !b.is_exact()) || !self.scale.is_exact() {
            return Err(Error::Invalid("basis and scale must be exact".into()));
        }
        if self.scale.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let q = self.label_size();
        let deg = (0..self.basis.len()).try_fold(1u64, |acc, _| acc.checked_mul(q));
        match deg {
            Some(d) if d <= DEGREE_CAP => Ok(()),
            _ => Err(Error::CapExceeded(format!(
                "|F|^k exceeds the degree cap {DEGREE_CAP}"
            ))),
        }
    }

    /// Every element of `V`, over `F((T))`.
    pub fn enumerate(&self) -> Result<Vec<LaurentSeries>> {
        self.check()?;
        let ext = self.label_series_field()?;
        let emb = Embedding::new(self.base.residue(), ext.residue())?;
        let basis: Vec<LaurentSeries> = self
            .basis
            .iter()
            .map(|b| ext.embed_series(&self.base, &emb, b))
            .collect::<Result<_>>()?;
        let scalars: Vec<FqElem> = ext.residue().elements().collect();
        let mut out = vec![LaurentSeries::zero()];
        for b in &basis {
            let mut next = Vec::with_capacity(out.len() * scalars.len());
            for v in &out {
                for &l in &scalars {
                    next.push(ext.add(v, &ext.scale(l, b)));
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// `c * prod_{a in V} (x - a)`, built one basis vector at a time from
/// `f_{V + Fw} = f_V^{|F|} - f_V(w)^{|F| - 1} f_V`. The result is over the
/// base field when its coefficients descend, otherwise over `F((T))`.
pub fn subspace_poly(spec: &SubspaceSpec) -> Result<SparsePoly> {
    spec.check()?;
    let base = &spec.base;
    let ext = spec.label_series_field()?;
    let emb = Embedding::new(base.residue(), ext.residue())?;
    let q = spec.label_size();
    let mut c: Vec<LaurentSeries> = vec![LaurentSeries::one()];
    for b in &spec.basis {
        let w = ext.embed_series(base, &emb, b)?;
        let mut val = LaurentSeries::zero();
        let mut wp = w.clone();
        for ci in &c {
            val = ext.add(&val, &ext.mul(ci, &wp));
            wp = ext.pow_u(&wp, q);
        }
        if val.is_exact_zero() {
            return Err(Error::Invalid("basis is linearly dependent over F".into()));
        }
        let lam = ext.pow_u(&val, q - 1);
        let mut next = Vec::with_capacity(c.len() + 1);
        next.push(ext.neg(&ext.mul(&lam, &c[0])));
        for i in 1..c.len() {
            let up = ext.pow_u(&c[i - 1], q);
            next.push(ext.sub(&up, &ext.mul(&lam, &c[i])));
        }
        next.push(ext.pow_u(c.last().unwrap(), q));
        c = next;
    }
    let k = c.len() - 1;
    if c[0].is_zero() || c[k].is_zero() {
        return Err(Error::CheckFailed("subspace polynomial lost an end coefficient".into()));
    }
    let descended: Option<Vec<LaurentSeries>> =
        c.iter().map(|x| ext.restrict_series(base, &emb, x)).collect();
    let (field, coeffs, scale) = match descended {
        Some(d) => (base.clone(), d, spec.scale.clone()),
        None => (ext.clone(), c, ext.embed_series(base, &emb, &spec.scale)?),
    };
    let terms: Vec<(u64, LaurentSeries)> = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, a)| !a.is_exact_zero())
        .map(|(i, a)| (q.pow(i as u32), field.mul(&scale, &a)))
        .collect();
    SparsePoly::new(field, terms)
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpnessReport {
    pub schema: &'static str,
    pub polynomial: String,
    pub k: usize,
    pub count: usize,
    pub bound: String,
    pub equality: bool,
    pub all_exact: bool,
    pub matches_subspace: bool,
    pub roots: Vec<String>,
    pub passed: bool,
}

fn sorted_values(mut v: Vec<LaurentSeries>) -> Vec<LaurentSeries> {
    v.sort_by_key(|x| (x.ord(), x.coeffs().to_vec()));
    v
}

/// Roots in `K` of the subspace polynomial of an `F_q`-span: exactly `V`.
pub fn verify_sharpness_thm1(spec: &SubspaceSpec, prec: i64) -> Result<SharpnessReport> {
    if spec.label_degree != 1 {
        return Err(Error::Invalid("this check takes F = F_q".into()));
    }
    let f = subspace_poly(spec)?;
    let recs = roots_in(&f, &spec.base, prec)?;
    let want = sorted_values(spec.enumerate()?);
    let got = sorted_values(recs.iter().map(|r| r.value.clone()).collect());
    let k = spec.basis.len();
    let bound = BigUint::from(spec.base.base_q()).pow(k as u32);
    let count = recs.len();
    let all_exact = recs.iter().all(|r| r.exact && r.multiplicity == 1);
    let matches_subspace = got == want;
    let equality = BigUint::from(count) == bound;
    Ok(SharpnessReport {
        schema: "v1",
        polynomial: f.format(),
        k,
        count,
        bound: bound.to_string(),
        equality,
        all_exact,
        matches_subspace,
        roots: got.iter().map(|x| spec.base.format(x)).collect(),
        passed: equality && all_exact && matches_subspace,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub schema: &'static str,
    pub polynomial: String,
    pub d: u32,
    /// Count of roots of exact degree `j`, for `j = 1..=d`.
    pub per_degree: Vec<u64>,
    pub expected_per_degree: Vec<String>,
    pub total: u64,
    pub bound: String,
    pub unresolved: usize,
    pub passed: bool,
}

/// Zeros of degree at most `d` of a Galois-stable subspace polynomial,
/// grouped by exact degree and compared with the bound term by term.
pub fn verify_sharpness_thm2(
    spec: &SubspaceSpec,
    d: u32,
    prec: i64,
) -> Result<(DegreeReport, Vec<(SeriesField, RootRecord)>)> {
    let l = (1..=d).fold(1u32, num_integer::lcm);
    if !spec.label_degree.is_multiple_of(l) {
        return Err(Error::Invalid(format!(
            "F must contain F_(q^i) for all i <= {d}"
        )));
    }
    let f = subspace_poly(spec)?;
    if f.field() != &spec.base {
        return Err(Error::Invalid("basis does not span a Galois-stable space".into()));
    }
    let k = f.k() as u32;
    let roots = roots_deg_le_d(&f, d, prec)?;
    let mut per: BTreeMap<u32, u64> = BTreeMap::new();
    let mut unresolved = 0;
    for (_, r) in &roots {
        if !r.resolved {
            unresolved += 1;
        }
        *per.entry(r.degree.value()).or_default() += 1;
    }
    let table = bound_table(spec.base.base_q(), k, d)?;
    let per_degree: Vec<u64> = (1..=d).map(|j| per.get(&j).copied().unwrap_or(0)).collect();
    let total: u64 = per_degree.iter().sum();
    let per_ok = per_degree
        .iter()
        .zip(&table.per_degree)
        .all(|(got, want)| want.to_u64() == Some(*got));
    let passed = per_ok
        && unresolved == 0
        && table.total.to_u64() == Some(total)
        && per.keys().all(|j| *j <= d);
    let report = DegreeReport {
        schema: "v1",
        polynomial: f.format(),
        d,
        per_degree,
        expected_per_degree: table.per_degree.iter().map(|c| c.to_string()).collect(),
        total,
        bound: table.total.to_string(),
        unresolved,
        passed,
    };
    Ok((report, roots))
}

#[derive(Clone, Debug, Serialize)]
pub struct XeReport {
    pub schema: &'static str,
    pub polynomial: String,
    pub e: u64,
    /// Basis valuations distinct and divisible by `e`.
    pub applicable: bool,
    pub count: usize,
    pub bound: String,
    pub equality: bool,
}

/// Distinct roots in `K` of `f(x^e)` for the subspace polynomial `f`.
pub fn verify_xe_variant(spec: &SubspaceSpec, e: u64, prec: i64) -> Result<XeReport> {
    if e == 0 {
        return Err(Error::Invalid("e must be positive".into()));
    }
    let vals: Vec<Option<i64>> = spec.basis.iter().map(|b| b.ord()).collect();
    let distinct = vals.iter().collect::<BTreeSet<_>>().len() == vals.len();
    let applicable = distinct
        && vals
            .iter()
            .all(|v| v.is_some_and(|v| v.rem_euclid(e as i64) == 0));
    let f = subspace_poly(spec)?;
    let g = f.transform_xe(e)?;
    let recs = roots_in(&g, g.field(), prec)?;
    let bound = BigUint::from(spec.label_size()).pow(spec.basis.len() as u32);
    Ok(XeReport {
        schema: "v1",
        polynomial: g.format(),
        e,
        applicable,
        count: recs.len(),
        equality: BigUint::from(recs.len()) == bound,
        bound: bound.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_poly, parse_series, parse_series_list};

    fn spec(p: u64, m: u32, a: u32, basis: &str) -> SubspaceSpec {
        let sf = SeriesField::base(p, m).unwrap();
        let b = parse_series_list(basis, &sf).unwrap();
        SubspaceSpec::new(sf, a, b)
    }

    // dense coefficients of prod (x - a), lowest degree first
    fn product_oracle(sf: &SeriesField, roots: &[LaurentSeries]) -> Vec<LaurentSeries> {
        let mut acc = vec![LaurentSeries::one()];
        for a in roots {
            let mut next = vec![LaurentSeries::zero(); acc.len() + 1];
            for (i, c) in acc.iter().enumerate() {
                next[i + 1] = sf.add(&next[i + 1], c);
                next[i] = sf.sub(&next[i], &sf.mul(c, a));
            }
            acc = next;
        }
        acc
    }

    fn dense(f: &SparsePoly) -> Vec<LaurentSeries> {
        let mut v = vec![LaurentSeries::zero(); f.degree() as usize + 1];
        for (n, a) in f.terms() {
            v[*n as usize] = a.clone();
        }
        v
    }

    #[test]
    fn small_subspaces() {
        let s = spec(2, 1, 1, "1");
        let f = subspace_poly(&s).unwrap();
        assert_eq!(f, parse_poly("x^2 + x", &s.base).unwrap());
        let s = spec(2, 1, 1, "1, T");
        let f = subspace_poly(&s).unwrap();
        assert_eq!(f, parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &s.base).unwrap());
    }

    #[test]
    fn recursion_matches_product() {
        for (p, m, a, basis) in [
            (2, 1, 1, "1, T"),
            (2, 1, 1, "1, T, T^2"),
            (3, 1, 1, "1, T^-1"),
            (2, 1, 2, "1, T"),
            (2, 2, 1, "1, g*T + T^3"),
            (3, 1, 2, "1"),
        ] {
            let s = spec(p, m, a, basis);
            let f = subspace_poly(&s).unwrap();
            let ext = s.label_series_field().unwrap();
            let emb = Embedding::new(s.base.residue(), ext.residue()).unwrap();
            let v = s.enumerate().unwrap();
            let want = product_oracle(&ext, &v);
            let got: Vec<LaurentSeries> = dense(&f)
                .iter()
                .map(|c| ext.embed_series(f.field(), &emb, c).unwrap())
                .collect();
            assert_eq!(got, want, "{basis} over F_{p}^{m}, |F| = q^{a}");
            let q = s.label_size();
            for n in f.exponents() {
                assert!((0..=s.basis.len() as u32).any(|i| q.pow(i) == n));
            }
        }
    }

    #[test]
    fn f4_span_has_sparse_support() {
        let s = spec(2, 1, 2, "1, T");
        let f = subspace_poly(&s).unwrap();
        assert_eq!(f.field(), &s.base);
        assert_eq!(f.exponents(), vec![1, 4, 16]);
    }

    #[test]
    fn dependent_basis_rejected() {
        assert!(subspace_poly(&spec(2, 1, 1, "T, T")).is_err());
        assert!(subspace_poly(&spec(2, 1, 1, "1, T, 1+T")).is_err());
    }

    #[test]
    fn additive_identities() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = spec(3, 1, 1, "1, T + T^2");
        let f = subspace_poly(&s).unwrap();
        let sf = &s.base;
        for _ in 0..20 {
            let mut rnd = || {
                sf.from_terms(
                    (-2..5).map(|i| (i, FqElem(rng.random_range(0..3)))),
                    crate::laurent::Precision::Exact,
                )
            };
            let (x, y) = (rnd(), rnd());
            let lhs = f.evaluate(&sf.add(&x, &y));
            let rhs = sf.add(&f.evaluate(&x), &f.evaluate(&y));
            assert_eq!(lhs, rhs);
            for l in sf.residue().elements() {
                let fx = f.evaluate(&sf.scale(l, &x));
                assert_eq!(fx, sf.scale(l, &f.evaluate(&x)));
            }
        }
        for v in s.enumerate().unwrap() {
            assert!(f.evaluate(&v).is_exact_zero());
        }
    }

    #[test]
    fn fq_spans_are_sharp() {
        for (p, basis) in [(2, "1"), (2, "1, T"), (2, "1, T, T^2"), (3, "1, T")] {
            let r = verify_sharpness_thm1(&spec(p, 1, 1, basis), 8).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn galois_stable_spans_are_sharp() {
        let (r, _) = verify_sharpness_thm2(&spec(2, 1, 2, "1, T"), 2, 6).unwrap();
        assert_eq!(r.per_degree, vec![4, 12]);
        assert!(r.passed, "{r:?}");
        let (r, _) = verify_sharpness_thm2(&spec(3, 1, 2, "1"), 2, 6).unwrap();
        assert_eq!(r.total, 9);
        assert!(r.passed, "{r:?}");
        let (r, _) = verify_sharpness_thm2(&spec(2, 1, 1, "1, T"), 1, 6).unwrap();
        assert_eq!(r.total, 4);
    }

    #[test]
    fn xe_variant() {
        let r = verify_xe_variant(&spec(2, 1, 1, "1"), 1, 8).unwrap();
        assert_eq!(r.count, 2);
        let s = spec(2, 1, 1, "1, T^2");
        let r = verify_xe_variant(&s, 2, 8).unwrap();
        assert!(r.applicable);
        assert_eq!(r.count, 4);
        assert!(r.equality);
        let g = subspace_poly(&s).unwrap().transform_xe(2).unwrap();
        let oracle = crate::roots::oracle_roots(&g, 6, (-3, 4)).unwrap();
        assert_eq!(oracle.len(), 4);
        let t = parse_series("T", &s.base).unwrap();
        assert!(oracle.contains(&t.with_prec(crate::laurent::Precision::Abs(7))));
    }
}
