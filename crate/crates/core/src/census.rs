//! Bound formulas, random corpora and the verification campaign.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{fq_make, prime_factors, FqElem};
use crate::laurent::{LaurentSeries, Precision, Rational, SeriesField};
use crate::newton::{polygon, NewtonPolygon};
use crate::parser::parse_poly;
use crate::poly::SparsePoly;
use crate::roots::{max_enum, oracle_roots, roots_in, truncate_for_oracle, RootRecord};
use crate::trees::{build_tree, phi_map};

/// Support window (in `T`-exponents) of random coefficients.
pub const COEFF_SUPPORT: (i64, i64) = (-3, 6);

/// A random Laurent polynomial with support in [`COEFF_SUPPORT`] and a
/// uniformly random nonzero leading coefficient.
pub fn random_coeff<R: Rng>(sf: &SeriesField, rng: &mut R) -> LaurentSeries {
    let e = sf.e() as i64;
    let q = sf.residue().q();
    let (lo, hi) = (COEFF_SUPPORT.0 * e, COEFF_SUPPORT.1 * e);
    let lead = rng.random_range(lo..=hi);
    let end = rng.random_range(lead..=hi.min(lead + 3));
    let mut terms = vec![(lead, FqElem(rng.random_range(1..q)))];
    for i in lead + 1..=end {
        terms.push((i, FqElem(rng.random_range(0..q))));
    }
    sf.from_terms(terms, Precision::Exact)
}

/// A random polynomial with exactly `k + 1` terms and exponents at most
/// `exp_cap`.
pub fn random_poly<R: Rng>(sf: &SeriesField, k: usize, exp_cap: u64, rng: &mut R) -> SparsePoly {
    let exps = sample(rng, exp_cap as usize + 1, k + 1);
    let terms = exps
        .into_iter()
        .map(|n| (n as u64, random_coeff(sf, rng)))
        .collect();
    SparsePoly::new(sf.clone(), terms).expect("random coefficients are nonzero")
}

pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::Invalid("mobius needs n >= 1".into()));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return Ok(0);
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// `c_j = sum_{i | j} q^{ik} mu(j/i)` for `j <= d` and their sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundTable {
    pub q: u64,
    pub k: u32,
    pub d: u32,
    #[serde(serialize_with = "ser_big_vec")]
    pub per_degree: Vec<BigUint>,
    #[serde(serialize_with = "ser_big")]
    pub total: BigUint,
    /// `Some(true)` when a direct enumeration was run and agreed.
    pub enumerated: Option<bool>,
}

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_big_vec<S: serde::Serializer>(
    x: &[BigUint],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|v| v.to_string()))
}

/// `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = prime_factors(q);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut m = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    Some((p, m))
}

pub fn bound_table(q: u64, k: u32, d: u32) -> Result<BoundTable> {
    if d == 0 {
        return Err(Error::Invalid("d must be at least 1".into()));
    }
    let (p, m) = prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
    let mut per_degree = Vec::with_capacity(d as usize);
    for j in 1..=d {
        let mut c = BigInt::zero();
        for i in (1..=j).filter(|i| j % i == 0) {
            let mu = mobius((j / i) as u64)?;
            if mu != 0 {
                let term = BigInt::from(q).pow(i * k);
                if mu > 0 {
                    c += term;
                } else {
                    c -= term;
                }
            }
        }
        if c.is_negative() {
            return Err(Error::CheckFailed(format!("c_{j} came out negative")));
        }
        per_degree.push(c.to_biguint().unwrap());
    }
    let total: BigUint = per_degree.iter().sum();
    let mut table = BoundTable {
        q,
        k,
        d,
        per_degree,
        total,
        enumerated: None,
    };
    if let Some(counts) = enumerate_by_degree(p, m, k, d)? {
        let agree = counts
            .iter()
            .zip(&table.per_degree)
            .all(|(a, b)| BigUint::from(*a) == *b);
        if !agree {
            return Err(Error::CheckFailed(format!(
                "bound formula {:?} disagrees with enumeration {counts:?}",
                table.per_degree
            )));
        }
        table.enumerated = Some(true);
    }
    Ok(table)
}

/// Polynomials in `F_{q^L}[X]_{<k}`, `L = lcm(1..d)`, counted by the degree
/// over `F_q` of the field their coefficients generate; `None` past the
/// enumeration cap.
fn enumerate_by_degree(p: u64, m: u32, k: u32, d: u32) -> Result<Option<Vec<u64>>> {
    let l = (1..=d).fold(1u32, num_integer::lcm);
    let size = (p as f64).powf((m * l) as f64 * k as f64);
    let field_size = (p as f64).powf((m * l) as f64);
    if size > max_enum() as f64 || field_size > crate::fields::DEFAULT_FIELD_CAP as f64 {
        return Ok(None);
    }
    let field = fq_make(p, m * l)?;
    let elem_deg: Vec<u32> = field
        .elements()
        .map(|a| {
            (1..=l)
                .filter(|j| l % j == 0)
                .find(|j| field.in_subfield(a, m * j))
                .unwrap()
        })
        .collect();
    let n = elem_deg.len() as u64;
    let mut counts = vec![0u64; d as usize];
    let total = n.pow(k);
    for idx in 0..total {
        let mut rest = idx;
        let mut deg = 1u32;
        for _ in 0..k {
            deg = num_integer::lcm(deg, elem_deg[(rest % n) as usize]);
            rest /= n;
        }
        if deg <= d {
            counts[deg as usize - 1] += 1;
        }
    }
    Ok(Some(counts))
}

/// Distinct roots and recorded multiplicity of `(1 + x)^{q^m}` over
/// `F_q((T))`.
pub fn multiplicity_demo(q: u64, m: u32) -> Result<(usize, u64)> {
    let (p, e) = prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
    let sf = SeriesField::base(p, e)?;
    let n = q
        .checked_pow(m)
        .ok_or_else(|| Error::CapExceeded("q^m overflows".into()))?;
    let f = SparsePoly::new(sf.clone(), vec![(0, LaurentSeries::one()), (n, LaurentSeries::one())])?;
    let recs = roots_in(&f, &sf, 4)?;
    let mult = recs.iter().map(|r| r.multiplicity).max().unwrap_or(0);
    Ok((recs.len(), mult))
}

fn default_samples() -> usize {
    100
}
fn default_exp_cap() -> u64 {
    24
}
fn default_prec() -> i64 {
    16
}
fn default_centers() -> usize {
    10
}
fn default_oracle_prec() -> i64 {
    6
}
fn default_window() -> (i64, i64) {
    (-3, 4)
}

/// Which instances to draw and which checks to run on them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub q: Vec<u64>,
    pub k: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_exp_cap")]
    pub exp_cap: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_prec")]
    pub prec: i64,
    #[serde(default = "default_centers")]
    pub centers_per_segment: usize,
    /// Run the oracle on every `n`-th instance; 0 turns it off.
    #[serde(default)]
    pub oracle_every: usize,
    #[serde(default = "default_oracle_prec")]
    pub oracle_prec: i64,
    #[serde(default = "default_window")]
    pub oracle_window: (i64, i64),
    /// Also compare against `f^p` and the reversed polynomial.
    #[serde(default)]
    pub transforms: bool,
    /// Extra polynomials (parser syntax) checked over every `q`.
    #[serde(default)]
    pub extra: Vec<String>,
}

impl CorpusSpec {
    pub fn new(q: Vec<u64>, k: Vec<usize>, samples: usize, seed: u64) -> CorpusSpec {
        CorpusSpec {
            q,
            k,
            samples,
            exp_cap: default_exp_cap(),
            seed,
            prec: default_prec(),
            centers_per_segment: default_centers(),
            oracle_every: 0,
            oracle_prec: default_oracle_prec(),
            oracle_window: default_window(),
            transforms: false,
            extra: Vec::new(),
        }
    }

    fn checks(&self) -> CheckConfig {
        CheckConfig {
            prec: self.prec,
            centers_per_segment: self.centers_per_segment,
            oracle: None,
            transforms: self.transforms,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub prec: i64,
    pub centers_per_segment: usize,
    /// `(prec, window)` for the brute-force comparison.
    pub oracle: Option<(i64, (i64, i64))>,
    pub transforms: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            prec: default_prec(),
            centers_per_segment: default_centers(),
            oracle: None,
            transforms: false,
        }
    }
}

/// Verdicts for one polynomial. `failures` is empty exactly when every
/// check passed.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceReport {
    pub index: usize,
    pub q: u64,
    pub k: usize,
    pub polynomial: String,
    pub prec: i64,
    pub count: usize,
    pub unresolved: usize,
    pub bound: u64,
    pub slack: i64,
    pub equality: bool,
    pub zu: Vec<(usize, usize, u64)>,
    pub polygon_ok: bool,
    pub distance_checks: usize,
    pub distance_skipped: usize,
    pub recenter_checks: usize,
    pub tree_max_length: usize,
    pub tree_max_children: usize,
    pub trees_ok: bool,
    pub phi_ok: Option<bool>,
    pub oracle_ok: Option<bool>,
    pub transforms_ok: Option<bool>,
    pub failures: Vec<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn integer_g(g: Rational) -> Option<i64> {
    g.is_integer().then(|| g.to_integer())
}

/// Everything the campaign checks, for one exact polynomial over `K`.
pub fn verify_instance<R: Rng>(
    f: &SparsePoly,
    cfg: &CheckConfig,
    index: usize,
    rng: &mut R,
) -> Result<InstanceReport> {
    let sf = f.field().clone();
    if sf.j() != 1 || sf.e() != 1 {
        return Err(Error::Invalid("instances live over the base field".into()));
    }
    let q = sf.base_q();
    let k = f.k();
    let mut fails: Vec<String> = Vec::new();
    let np = polygon(f)?;
    let recs = roots_in(f, &sf, cfg.prec)?;
    let count = recs.len();
    let bound = q.checked_pow(k as u32).unwrap_or(u64::MAX);
    if count as u64 > bound {
        fails.push(format!("{count} roots exceed q^k = {bound}"));
    }
    let unresolved = recs.iter().filter(|r| !r.resolved).count();

    // polygon consistency and the per-segment counts
    let mut polygon_ok = true;
    let zero_mult = recs
        .iter()
        .find(|r| r.value.is_exact_zero())
        .map_or(0, |r| r.multiplicity);
    if zero_mult != np.zero_root_mult {
        polygon_ok = false;
        fails.push(format!("root 0 has multiplicity {zero_mult}, polygon says {}", np.zero_root_mult));
    }
    let mut zu = Vec::new();
    for seg in &np.segments {
        let on: Vec<&RootRecord> = recs
            .iter()
            .filter(|r| r.ord().map(|v| sf.to_val(v)) == Some(seg.g))
            .collect();
        let with_mult: u64 = on.iter().map(|r| r.multiplicity).sum();
        if with_mult > seg.h_len {
            polygon_ok = false;
            fails.push(format!("slope {} carries {with_mult} > {} roots", seg.slope, seg.h_len));
        }
        let u = seg.order_pos;
        let cap = (q - 1) * q.pow((k - u) as u32);
        if on.len() as u64 > cap {
            fails.push(format!("Z_{u} = {} exceeds (q-1)q^(k-u) = {cap}", on.len()));
        }
        zu.push((u, on.len(), cap));
    }
    for r in &recs {
        if let Some(v) = r.ord() {
            if np.segment_for(sf.to_val(v)).is_none() {
                polygon_ok = false;
                fails.push(format!("root {} has no segment", sf.format(&r.value)));
            }
        }
    }

    let resolved: Vec<&RootRecord> = recs.iter().filter(|r| r.resolved).collect();

    // distinct distances from random centers, and the recentered coefficients
    let mut distance_checks = 0;
    let mut distance_skipped = 0;
    let mut recenter_checks = 0;
    for seg in &np.segments {
        let Some(g) = integer_g(seg.g) else { continue };
        let u = seg.order_pos;
        let near: Vec<&RootRecord> = resolved
            .iter()
            .copied()
            .filter(|r| r.ord() == Some(g))
            .collect();
        let mut done = 0;
        let mut attempts = 0;
        while done < cfg.centers_per_segment && attempts < 20 * cfg.centers_per_segment {
            attempts += 1;
            let r = random_center(&sf, g, &near, rng);
            if f.evaluate(&r).is_exact_zero() {
                continue;
            }
            done += 1;
            let mut vals = BTreeSet::new();
            let mut ambiguous = false;
            for a in &near {
                let d = sf.sub(&a.value, &r);
                match d.ord() {
                    Some(v) if v > g => {
                        vals.insert(v);
                    }
                    Some(_) => {}
                    None => ambiguous = true,
                }
            }
            if ambiguous {
                distance_skipped += 1;
            } else {
                distance_checks += 1;
                if vals.len() > k + 1 - u {
                    fails.push(format!(
                        "{} distinct distances from {} exceed k+1-u = {}",
                        vals.len(),
                        sf.format(&r),
                        k + 1 - u
                    ));
                }
            }
            if f.degree() <= crate::poly::RECENTER_CAP {
                let rc = f.scale_var(&r)?.recenter(&LaurentSeries::one())?;
                recenter_checks += 1;
                let min = rc.b[rc.m_index].ord().unwrap();
                if rc.m_index as u64 > seg.n_index {
                    fails.push(format!(
                        "first unit index {} exceeds N_{u} = {} at {}",
                        rc.m_index,
                        seg.n_index,
                        sf.format(&r)
                    ));
                }
                let below: BTreeSet<i64> = rc.b[..rc.m_index]
                    .iter()
                    .filter_map(|b| b.ord())
                    .map(|v| v - min)
                    .collect();
                if below.len() > k + 1 - u {
                    fails.push(format!(
                        "{} distinct valuations below index {} exceed k+1-u",
                        below.len(),
                        rc.m_index
                    ));
                }
            }
        }
    }

    // trees on each residue coset of each segment
    let mut tree_max_length = 0;
    let mut tree_max_children = 0;
    let mut trees_ok = true;
    for seg in &np.segments {
        let Some(g) = integer_g(seg.g) else { continue };
        let u = seg.order_pos;
        let mut cosets: BTreeMap<FqElem, Vec<LaurentSeries>> = BTreeMap::new();
        for r in resolved.iter().filter(|r| r.ord() == Some(g)) {
            cosets.entry(r.value.coeff(g)).or_default().push(r.value.clone());
        }
        for pts in cosets.values() {
            let t = build_tree(&sf, pts)?;
            tree_max_length = tree_max_length.max(t.length());
            tree_max_children = tree_max_children.max(t.max_children());
            if t.length() > k - u {
                trees_ok = false;
                fails.push(format!("tree length {} exceeds k-u = {}", t.length(), k - u));
            }
            if t.max_children() as u64 > q {
                trees_ok = false;
                fails.push(format!("tree node with {} > q children", t.max_children()));
            }
        }
    }

    // Phi on the resolved roots
    let phi_ok = if unresolved == 0 && count > 0 {
        let values: Vec<LaurentSeries> = recs.iter().map(|r| r.value.clone()).collect();
        match phi_check(&sf, &values, &np, k, 1) {
            Ok(()) => Some(true),
            Err(e) => {
                fails.push(format!("Phi: {e}"));
                Some(false)
            }
        }
    } else {
        None
    };

    let oracle_ok = match cfg.oracle {
        Some((oprec, window)) if unresolved == 0 => {
            let got = oracle_roots(f, oprec, window)?;
            let want: Vec<LaurentSeries> = truncate_for_oracle(&recs, oprec)
                .into_iter()
                .filter(|x| x.ord().is_none_or(|v| v >= window.0 && v <= window.1))
                .collect();
            let ok = got == want;
            if !ok {
                fails.push(format!(
                    "oracle found {} roots, root finder {}",
                    got.len(),
                    want.len()
                ));
            }
            Some(ok)
        }
        _ => None,
    };

    let transforms_ok = if cfg.transforms {
        let ok = transform_check(f, &recs, cfg.prec)?;
        if !ok {
            fails.push("root set not preserved by f^p or by reversal".into());
        }
        Some(ok)
    } else {
        None
    };

    Ok(InstanceReport {
        index,
        q,
        k,
        polynomial: f.format(),
        prec: cfg.prec,
        count,
        unresolved,
        bound,
        slack: bound as i64 - count as i64,
        equality: count as u64 == bound,
        zu,
        polygon_ok,
        distance_checks,
        distance_skipped,
        recenter_checks,
        tree_max_length,
        tree_max_children,
        trees_ok,
        phi_ok,
        oracle_ok,
        transforms_ok,
        failures: fails,
    })
}

/// A center of valuation `g`: half the time a root perturbed at a random
/// depth, otherwise random digits.
fn random_center<R: Rng>(sf: &SeriesField, g: i64, near: &[&RootRecord], rng: &mut R) -> LaurentSeries {
    let q = sf.residue().q();
    let depth = rng.random_range(1..8i64);
    if !near.is_empty() && rng.random_bool(0.5) {
        let a = &near[rng.random_range(0..near.len())].value;
        let cut = a.exact_part_below(g + depth);
        let bump = FqElem(rng.random_range(1..q));
        return sf.add(&cut, &LaurentSeries::monomial(bump, g + depth));
    }
    let mut terms = vec![(g, FqElem(rng.random_range(1..q)))];
    for i in 1..=depth {
        terms.push((g + i, FqElem(rng.random_range(0..q))));
    }
    sf.from_terms(terms, Precision::Exact)
}

/// Injectivity of `Phi` and rationality of its images: a root of degree `j`
/// over `K` must map into `F_{q^j}[X]`. `degrees[i]` may be left at 1 for
/// roots in `K`.
pub fn phi_check(
    sf: &SeriesField,
    roots: &[LaurentSeries],
    np: &NewtonPolygon,
    k: usize,
    default_degree: u32,
) -> Result<()> {
    phi_check_with_degrees(sf, roots, &vec![default_degree; roots.len()], np, k).map(|_| ())
}

/// As [`phi_check`], with the degree of each root given; returns the images.
pub fn phi_check_with_degrees(
    sf: &SeriesField,
    roots: &[LaurentSeries],
    degrees: &[u32],
    np: &NewtonPolygon,
    k: usize,
) -> Result<Vec<crate::trees::PhiImage>> {
    let images = phi_map(sf, roots, np, k)?;
    let distinct: BTreeSet<&crate::trees::PhiImage> = images.iter().collect();
    if distinct.len() != images.len() {
        return Err(Error::CheckFailed(format!(
            "{} roots share {} images",
            images.len(),
            distinct.len()
        )));
    }
    let field = sf.residue();
    let bm = sf.base_m();
    for ((img, z), &j) in images.iter().zip(roots).zip(degrees) {
        if !img.coeffs.iter().all(|&c| field.in_subfield(c, bm * j)) {
            return Err(Error::CheckFailed(format!(
                "image of {} leaves F_(q^{j})",
                sf.format(z)
            )));
        }
    }
    Ok(images)
}

/// Roots of `f^p` are those of `f`; nonzero roots of the reversal are the
/// inverses of those of `f`.
pub fn transform_check(f: &SparsePoly, recs: &[RootRecord], prec: i64) -> Result<bool> {
    let sf = f.field();
    let powered = roots_in(&f.pth_power(), sf, prec)?;
    if powered.len() != recs.len() {
        return Ok(false);
    }
    let m = f.degree() + 1;
    let rev = roots_in(&f.transform_reverse(m)?, sf, prec)?;
    let nonzero: Vec<&RootRecord> = recs.iter().filter(|r| !r.value.is_exact_zero()).collect();
    // the reversal x^m f(1/x) has 0 as a root of multiplicity m - deg f
    let rev_nonzero: Vec<&RootRecord> = rev.iter().filter(|r| !r.value.is_exact_zero()).collect();
    if rev_nonzero.len() != nonzero.len() {
        return Ok(false);
    }
    for r in &nonzero {
        if !r.resolved {
            continue;
        }
        let inv = sf.inv(&r.value)?;
        let hit = rev_nonzero.iter().any(|s| {
            let d = sf.sub(&s.value, &inv);
            d.is_zero() || d.ord().is_some_and(|v| v >= inv.ord().unwrap() + prec)
        });
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One `(q, k)` row of the summary.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CellSummary {
    pub q: u64,
    pub k: usize,
    pub samples: usize,
    pub max_count: usize,
    pub bound: u64,
    pub equality_hits: usize,
    pub unresolved: usize,
    pub failures: usize,
    pub oracle_runs: usize,
    pub distance_checks: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub spec: CorpusSpec,
    pub instances: Vec<InstanceReport>,
    pub cells: Vec<CellSummary>,
    /// `(q, index, polynomial, failures)` for every failed instance.
    pub reproducers: Vec<Reproducer>,
    /// Errors raised while checking an instance.
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Reproducer {
    pub q: u64,
    pub k: usize,
    pub seed: u64,
    pub index: usize,
    pub polynomial: String,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.reproducers.is_empty() && self.errors.is_empty()
    }

    pub fn jsonl(&self) -> String {
        let mut s = String::new();
        for inst in &self.instances {
            s.push_str(&serde_json::to_string(inst).expect("reports serialize"));
            s.push('\n');
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "v1",
            "passed": self.passed(),
            "instances": self.instances.len(),
            "cells": self.cells,
            "reproducers": self.reproducers,
            "errors": self.errors,
        })
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("q,k,samples,max_count,bound,equality_hits\n");
        for c in &self.cells {
            let _ = writeln!(s, "{},{},{},{},{},{}", c.q, c.k, c.samples, c.max_count, c.bound, c.equality_hits);
        }
        s
    }
}

fn instance_rng(seed: u64, q: u64, k: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((q << 40) ^ ((k as u64) << 32) ^ index as u64);
    rng
}

/// Draw and check the corpus. Instances run in parallel; the report is
/// assembled in instance order, so a seed fixes it completely.
pub fn run_campaign(spec: &CorpusSpec) -> Result<VerifyReport> {
    let mut instances = Vec::new();
    let mut cells = Vec::new();
    let mut reproducers = Vec::new();
    let mut errors = Vec::new();
    for &q in &spec.q {
        let (p, m) = prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
        let sf = SeriesField::base(p, m)?;
        let extra: Vec<SparsePoly> = spec
            .extra
            .iter()
            .map(|s| parse_poly(s, &sf))
            .collect::<Result<_>>()?;
        for &k in &spec.k {
            if k == 0 || k as u64 > spec.exp_cap {
                return Err(Error::Invalid(format!("k = {k} does not fit under exp_cap")));
            }
            let started = std::time::Instant::now();
            let results: Vec<(usize, Result<InstanceReport>)> = (0..spec.samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = instance_rng(spec.seed, q, k, i);
                    let f = random_poly(&sf, k, spec.exp_cap, &mut rng);
                    let mut cfg = spec.checks();
                    if spec.oracle_every > 0 && i % spec.oracle_every == 0 {
                        cfg.oracle = Some((spec.oracle_prec, spec.oracle_window));
                    }
                    (i, verify_instance(&f, &cfg, i, &mut rng).map_err(|e| {
                        Error::CheckFailed(format!("{} : {e}", f.format()))
                    }))
                })
                .collect();
            let mut cell = CellSummary {
                q,
                k,
                samples: spec.samples,
                max_count: 0,
                bound: q.pow(k as u32),
                equality_hits: 0,
                unresolved: 0,
                failures: 0,
                oracle_runs: 0,
                distance_checks: 0,
                seconds: 0.0,
            };
            for (i, res) in results {
                match res {
                    Ok(rep) => {
                        cell.max_count = cell.max_count.max(rep.count);
                        cell.equality_hits += rep.equality as usize;
                        cell.unresolved += rep.unresolved;
                        cell.oracle_runs += rep.oracle_ok.is_some() as usize;
                        cell.distance_checks += rep.distance_checks;
                        if !rep.passed() {
                            cell.failures += 1;
                            reproducers.push(Reproducer {
                                q,
                                k,
                                seed: spec.seed,
                                index: i,
                                polynomial: rep.polynomial.clone(),
                                failures: rep.failures.clone(),
                            });
                        }
                        instances.push(rep);
                    }
                    Err(e) => {
                        cell.failures += 1;
                        errors.push(format!("q={q} k={k} seed={} index={i}: {e}", spec.seed));
                    }
                }
            }
            cell.seconds = started.elapsed().as_secs_f64();
            cells.push(cell);
        }
        for (i, f) in extra.iter().enumerate() {
            let mut rng = instance_rng(spec.seed, q, 0, i);
            let cfg = spec.checks();
            match verify_instance(f, &cfg, spec.samples + i, &mut rng) {
                Ok(rep) => {
                    if !rep.passed() {
                        reproducers.push(Reproducer {
                            q,
                            k: rep.k,
                            seed: spec.seed,
                            index: rep.index,
                            polynomial: rep.polynomial.clone(),
                            failures: rep.failures.clone(),
                        });
                    }
                    instances.push(rep);
                }
                Err(e) => errors.push(format!("extra {}: {e}", f.format())),
            }
        }
    }
    Ok(VerifyReport {
        schema: "v1",
        spec: spec.clone(),
        instances,
        cells,
        reproducers,
        errors,
    })
}

/// `sum_{i | n} c_i` for the table's `c`, which must give back `q^{nk}`.
pub fn mobius_reconstruct(q: u64, k: u32, n: u32) -> Result<BigUint> {
    let t = bound_table(q, k, n)?;
    Ok((1..=n)
        .filter(|i| n.is_multiple_of(*i))
        .map(|i| t.per_degree[i as usize - 1].clone())
        .fold(BigUint::zero(), |a, b| a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn bound_examples() {
        let t = bound_table(2, 2, 2).unwrap();
        assert_eq!(t.per_degree, vec![BigUint::from(4u32), BigUint::from(12u32)]);
        assert_eq!(t.total, BigUint::from(16u32));
        assert_eq!(t.enumerated, Some(true));
        assert_eq!(bound_table(2, 1, 2).unwrap().total, BigUint::from(4u32));
        assert_eq!(bound_table(3, 1, 2).unwrap().total, BigUint::from(9u32));
        assert_eq!(bound_table(5, 3, 1).unwrap().total, BigUint::from(125u32));
        // far past the enumeration cap, still exact
        let big = bound_table(4, 30, 6).unwrap();
        assert!(big.enumerated.is_none());
        assert!(big.total > BigUint::from(u64::MAX));
    }

    #[test]
    fn enumeration_agrees_on_small_cases() {
        for (q, k, d) in [(2, 1, 3), (2, 2, 3), (3, 2, 2), (4, 1, 2), (2, 3, 2), (2, 1, 4)] {
            let t = bound_table(q, k, d).unwrap();
            assert_eq!(t.enumerated, Some(true), "q={q} k={k} d={d}");
        }
    }

    fn mobius_oracle(n: u64) -> i8 {
        // sum of mu over divisors is [n == 1]; solve for mu(n)
        if n == 1 {
            return 1;
        }
        -(1..n).filter(|d| n.is_multiple_of(*d)).map(mobius_oracle).sum::<i8>()
    }

    proptest! {
        #[test]
        fn mobius_matches_divisor_sum(n in 1u64..200) {
            prop_assert_eq!(mobius(n).unwrap(), mobius_oracle(n));
        }

        #[test]
        fn inversion_reconstructs(q in prop::sample::select(vec![2u64, 3, 4, 5, 8, 9]), k in 0u32..4, n in 1u32..9) {
            prop_assert_eq!(mobius_reconstruct(q, k, n).unwrap(), BigUint::from(q).pow(n * k));
        }
    }

    #[test]
    fn multiplicity_family() {
        for q in [2, 4] {
            for m in 1..=3 {
                assert_eq!(multiplicity_demo(q, m).unwrap(), (1, q.pow(m)));
            }
        }
    }

    #[test]
    fn e1_instance_passes_with_equality() {
        let sf = SeriesField::base(2, 1).unwrap();
        let f = parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &sf).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = CheckConfig {
            oracle: Some((6, (-3, 4))),
            transforms: true,
            ..CheckConfig::default()
        };
        let rep = verify_instance(&f, &cfg, 0, &mut rng).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.count, 4);
        assert!(rep.equality);
        assert_eq!(rep.phi_ok, Some(true));
        assert_eq!(rep.oracle_ok, Some(true));
        assert!(rep.distance_checks >= 10);
    }

    #[test]
    fn small_campaign_is_deterministic() {
        let mut spec = CorpusSpec::new(vec![2, 3], vec![1, 2, 3], 20, 1);
        spec.oracle_every = 5;
        spec.extra = vec!["x^4 + (1+T+T^2)*x^2 + (T+T^2)*x".into()];
        let a = run_campaign(&spec).unwrap();
        assert!(a.passed(), "{:?} {:?}", a.reproducers, a.errors);
        let b = run_campaign(&spec).unwrap();
        assert_eq!(a.instances, b.instances);
        assert_eq!(a.csv().lines().count(), 7);
    }

    #[test]
    fn one_is_prime_power_of_nothing() {
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(27), Some((3, 3)));
    }
}
