//! Sparse polynomials with Laurent series coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Embedding, FqElem};
use crate::laurent::{LaurentSeries, Precision, SeriesField, SeriesJson};
use crate::newton::binom_mod_p;

/// Largest `n_k` accepted by [`SparsePoly::recenter`].
pub const RECENTER_CAP: u64 = 4096;

/// `sum a_i x^{n_i}` with strictly increasing exponents and nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    field: SeriesField,
    terms: Vec<(u64, LaurentSeries)>,
}

/// Coefficients of `f(r + x)` and the first index attaining the minimum
/// valuation.
#[derive(Clone, Debug)]
pub struct Recentered {
    pub b: Vec<LaurentSeries>,
    pub m_index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub n: u64,
    pub coeff: SeriesJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub schema: String,
    pub p: u32,
    pub m: u32,
    pub j: u32,
    pub e: u32,
    pub terms: Vec<TermJson>,
}

impl SparsePoly {
    /// Exact zero coefficients are dropped; repeated exponents are an error.
    pub fn new(field: SeriesField, terms: Vec<(u64, LaurentSeries)>) -> Result<SparsePoly> {
        let mut terms: Vec<(u64, LaurentSeries)> =
            terms.into_iter().filter(|(_, a)| !a.is_exact_zero()).collect();
        terms.sort_by_key(|t| t.0);
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateExponent(w[0].0));
        }
        if let Some((n, _)) = terms.iter().find(|(_, a)| a.is_zero()) {
            return Err(Error::Precision(format!(
                "coefficient of x^{n} is indistinguishable from 0"
            )));
        }
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(SparsePoly { field, terms })
    }

    /// Like [`SparsePoly::new`] but adds coefficients of repeated exponents.
    pub fn from_merged(field: SeriesField, terms: Vec<(u64, LaurentSeries)>) -> Result<SparsePoly> {
        let mut terms = terms;
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(u64, LaurentSeries)> = Vec::new();
        for (n, a) in terms {
            match merged.last_mut() {
                Some((m, b)) if *m == n => *b = field.add(b, &a),
                _ => merged.push((n, a)),
            }
        }
        SparsePoly::new(field, merged)
    }

    pub fn field(&self) -> &SeriesField {
        &self.field
    }

    pub fn terms(&self) -> &[(u64, LaurentSeries)] {
        &self.terms
    }

    /// Number of terms minus one.
    pub fn k(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn degree(&self) -> u64 {
        self.terms[self.terms.len() - 1].0
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|(_, a)| a.is_exact())
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    /// `sum a_i x^{n_i}` with precision propagation.
    pub fn evaluate(&self, x: &LaurentSeries) -> LaurentSeries {
        let sf = &self.field;
        let mut acc = LaurentSeries::zero();
        for (n, a) in &self.terms {
            let xp = sf.pow_u(x, *n);
            acc = sf.add(&acc, &sf.mul(a, &xp));
        }
        acc
    }

    /// `f(x) mod S^target` for exact coefficients and `x`, computing each
    /// power only to the precision needed.
    pub fn eval_to(&self, x: &LaurentSeries, target: i64) -> LaurentSeries {
        let sf = &self.field;
        let mut acc = LaurentSeries::zero_to(target);
        for (n, a) in &self.terms {
            let va = a.ord().unwrap_or(0);
            let xp = sf.pow_to(x, *n, target - va);
            acc = sf.add(&acc, &sf.mul(a, &xp));
        }
        acc.truncate(target)
    }

    /// The `j`-th Hasse derivative, `None` when it vanishes.
    pub fn hasse_derivative(&self, j: u64) -> Option<SparsePoly> {
        let sf = &self.field;
        let p = sf.p() as u64;
        let terms: Vec<(u64, LaurentSeries)> = self
            .terms
            .iter()
            .filter(|(n, _)| *n >= j)
            .filter_map(|(n, a)| {
                let c = binom_mod_p(*n, j, p);
                (c != 0).then(|| (n - j, sf.scale(sf.residue().from_int(c as i64), a)))
            })
            .collect();
        SparsePoly::new(sf.clone(), terms).ok()
    }

    pub fn derivative(&self) -> Option<SparsePoly> {
        self.hasse_derivative(1)
    }

    /// `D^j f (r)`, exact zero when the derivative vanishes.
    pub fn hasse_at(&self, j: u64, r: &LaurentSeries) -> LaurentSeries {
        self.hasse_derivative(j)
            .map_or_else(LaurentSeries::zero, |d| d.evaluate(r))
    }

    /// Coefficients `b_0..b_{n_k}` of `f(r + x)`.
    pub fn recenter(&self, r: &LaurentSeries) -> Result<Recentered> {
        let nk = self.degree();
        if nk > RECENTER_CAP {
            return Err(Error::CapExceeded(format!(
                "recenter of degree {nk} exceeds {RECENTER_CAP}"
            )));
        }
        let b: Vec<LaurentSeries> = (0..=nk).map(|j| self.hasse_at(j, r)).collect();
        if b.iter().all(|x| x.is_zero()) {
            return Err(Error::Precision("all recentered coefficients vanish".into()));
        }
        let min = b.iter().filter_map(|x| x.ord()).min().unwrap();
        let m_index = b.iter().position(|x| x.ord() == Some(min)).unwrap();
        Ok(Recentered { b, m_index })
    }

    /// `f(x^e)`.
    pub fn transform_xe(&self, e: u64) -> Result<SparsePoly> {
        if e == 0 {
            return Err(Error::Invalid("transform_xe needs e >= 1".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|(n, a)| {
                n.checked_mul(e)
                    .map(|ne| (ne, a.clone()))
                    .ok_or_else(|| Error::Invalid(format!("exponent {n}*{e} overflows")))
            })
            .collect::<Result<Vec<_>>>()?;
        SparsePoly::new(self.field.clone(), terms)
    }

    /// `x^m f(1/x)` for `m > deg f`.
    pub fn transform_reverse(&self, m: u64) -> Result<SparsePoly> {
        if m <= self.degree() {
            return Err(Error::Invalid(format!(
                "reversal needs m > deg f = {}, got {m}",
                self.degree()
            )));
        }
        let terms = self.terms.iter().map(|(n, a)| (m - n, a.clone())).collect();
        SparsePoly::new(self.field.clone(), terms)
    }

    /// `(g, s)` with `s` maximal such that `f = g^{p^s}`.
    pub fn pth_power_reduce(&self) -> Result<(SparsePoly, u32)> {
        if !self.is_exact() {
            return Err(Error::Invalid("pth_power_reduce needs exact coefficients".into()));
        }
        let sf = &self.field;
        let p = sf.p() as u64;
        let m = sf.residue().m() as i64;
        let mut g = self.clone();
        let mut s = 0;
        loop {
            let divisible = g.terms.iter().all(|(n, a)| {
                n % p == 0 && a.terms().all(|(i, _)| i.rem_euclid(p as i64) == 0)
            });
            if !divisible || g.degree() == 0 {
                return Ok((g, s));
            }
            let terms = g
                .terms
                .iter()
                .map(|(n, a)| {
                    let root = sf.from_terms(
                        a.terms()
                            .map(|(i, c)| (i / p as i64, sf.residue().frobenius(c, m - 1))),
                        Precision::Exact,
                    );
                    (n / p, root)
                })
                .collect();
            g = SparsePoly::new(sf.clone(), terms)?;
            s += 1;
        }
    }

    /// `f^p`, computed termwise since the cross terms vanish.
    pub fn pth_power(&self) -> SparsePoly {
        let sf = &self.field;
        let p = sf.p() as i64;
        let terms = self
            .terms
            .iter()
            .map(|(n, a)| {
                let prec = match a.prec() {
                    Precision::Exact => Precision::Exact,
                    Precision::Abs(k) => Precision::Abs(k * p),
                };
                let c = sf.from_terms(
                    a.terms().map(|(i, c)| (i * p, sf.residue().frobenius(c, 1))),
                    prec,
                );
                (n * p as u64, c)
            })
            .collect();
        SparsePoly { field: sf.clone(), terms }
    }

    /// `f(r x)`.
    pub fn scale_var(&self, r: &LaurentSeries) -> Result<SparsePoly> {
        let sf = &self.field;
        let terms = self
            .terms
            .iter()
            .map(|(n, a)| (*n, sf.mul(a, &sf.pow_u(r, *n))))
            .collect();
        SparsePoly::new(sf.clone(), terms)
    }

    /// The same polynomial with coefficients viewed in `target`.
    pub fn base_change(&self, target: &SeriesField) -> Result<SparsePoly> {
        let emb = Embedding::new(self.field.residue(), target.residue())?;
        let terms = self
            .terms
            .iter()
            .map(|(n, a)| Ok((*n, target.embed_series(&self.field, &emb, a)?)))
            .collect::<Result<Vec<_>>>()?;
        SparsePoly::new(target.clone(), terms)
    }

    /// Apply `a -> a^(p^i)` to every coefficient of every coefficient.
    pub fn frobenius(&self, i: i64) -> SparsePoly {
        let sf = &self.field;
        SparsePoly {
            field: sf.clone(),
            terms: self.terms.iter().map(|(n, a)| (*n, sf.frobenius(a, i))).collect(),
        }
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &LaurentSeries) -> Result<SparsePoly> {
        let sf = &self.field;
        let terms = self.terms.iter().map(|(n, a)| (*n, sf.mul(a, c))).collect();
        SparsePoly::new(sf.clone(), terms)
    }

    /// Text form accepted by the parser.
    pub fn format(&self) -> String {
        let sf = &self.field;
        let mut parts = Vec::new();
        for (n, a) in self.terms.iter().rev() {
            let xpow = match n {
                0 => None,
                1 => Some("x".to_string()),
                _ => Some(format!("x^{n}")),
            };
            let is_one = a.is_exact() && a.coeffs().len() == 1 && a.lead() == 0 && a.lead_coeff() == FqElem::ONE;
            parts.push(match (is_one, xpow) {
                (true, Some(x)) => x,
                (_, None) => format!("({})", sf.format(a)),
                (false, Some(x)) => format!("({})*{x}", sf.format(a)),
            });
        }
        parts.join(" + ")
    }

    pub fn to_json(&self) -> PolyJson {
        let sf = &self.field;
        PolyJson {
            schema: "v1".into(),
            p: sf.p(),
            m: sf.base_m(),
            j: sf.j(),
            e: sf.e(),
            terms: self
                .terms
                .iter()
                .map(|(n, a)| TermJson { n: *n, coeff: sf.to_json(a) })
                .collect(),
        }
    }

    pub fn from_json(js: &PolyJson) -> Result<SparsePoly> {
        let base = SeriesField::base(js.p as u64, js.m)?;
        let sf = base.extension(js.j, js.e)?;
        let terms = js
            .terms
            .iter()
            .map(|t| Ok((t.n, sf.from_json(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        SparsePoly::new(sf, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::random_poly;
    use crate::parser::parse_poly;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k2() -> SeriesField {
        SeriesField::base(2, 1).unwrap()
    }

    fn ser(sf: &SeriesField, terms: &[(i64, u32)]) -> LaurentSeries {
        sf.from_terms(terms.iter().map(|&(i, c)| (i, FqElem(c))), Precision::Exact)
    }

    // (x - a)(x - b)... expanded densely over F_2((T)) as an independent check
    fn product_of_linears(sf: &SeriesField, roots: &[LaurentSeries]) -> Vec<LaurentSeries> {
        let mut poly = vec![LaurentSeries::one()];
        for r in roots {
            let mut next = vec![LaurentSeries::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = sf.add(&next[i + 1], c);
                next[i] = sf.sub(&next[i], &sf.mul(c, r));
            }
            poly = next;
        }
        poly
    }

    fn e1() -> SparsePoly {
        parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &k2()).unwrap()
    }

    #[test]
    fn e1_matches_product_oracle() {
        let k = k2();
        let roots = [ser(&k, &[]), ser(&k, &[(0, 1)]), ser(&k, &[(1, 1)]), ser(&k, &[(0, 1), (1, 1)])];
        let dense = product_of_linears(&k, &roots);
        let f = e1();
        for (n, c) in dense.iter().enumerate() {
            let from_f = f
                .terms()
                .iter()
                .find(|t| t.0 == n as u64)
                .map_or_else(LaurentSeries::zero, |t| t.1.clone());
            assert_eq!(*c, from_f, "x^{n}");
        }
        for r in &roots {
            assert!(f.evaluate(r).is_exact_zero());
        }
        assert!(f.evaluate(&LaurentSeries::zero()).is_exact_zero());
        let g = parse_poly("x + 1", &k).unwrap();
        assert_eq!(g.evaluate(&LaurentSeries::zero()), LaurentSeries::one());
    }

    #[test]
    fn recenter_examples() {
        let k = k2();
        let f = e1();
        let rc = f.recenter(&ser(&k, &[(0, 1)])).unwrap();
        assert!(rc.b[0].is_exact_zero());
        let sq = parse_poly("x^2", &k).unwrap();
        let rc = sq.recenter(&LaurentSeries::one()).unwrap();
        assert_eq!(rc.b, vec![LaurentSeries::one(), LaurentSeries::zero(), LaurentSeries::one()]);
        let r = ser(&k, &[(0, 1), (1, 1), (2, 1)]);
        let rc = f.recenter(&r).unwrap();
        // independent route: f(r) via the product form
        let roots = [ser(&k, &[]), ser(&k, &[(0, 1)]), ser(&k, &[(1, 1)]), ser(&k, &[(0, 1), (1, 1)])];
        let direct = roots.iter().fold(LaurentSeries::one(), |acc, a| k.mul(&acc, &k.sub(&r, a)));
        assert_eq!(rc.b[0], direct);
        assert_eq!(k.val(&rc.b[0]).finite(), Some(3.into()));
    }

    #[test]
    fn transform_examples() {
        let k = k2();
        let f = parse_poly("x + T", &k).unwrap();
        assert_eq!(f.transform_xe(1).unwrap(), f);
        assert_eq!(f.transform_xe(3).unwrap(), parse_poly("x^3 + T", &k).unwrap());
        let rev = f.transform_reverse(2).unwrap();
        assert_eq!(rev, parse_poly("x + T*x^2", &k).unwrap());
        assert!(f.transform_reverse(1).is_err());
        let h = parse_poly("x^2 + T*x", &k).unwrap();
        assert_eq!(h.transform_reverse(3).unwrap().transform_reverse(3).unwrap(), h);
        // nonzero roots of E1 invert to roots of its reversal
        let r = e1().transform_reverse(5).unwrap();
        for z in [ser(&k, &[(0, 1)]), ser(&k, &[(1, 1)])] {
            let inv = k.inv(&z).unwrap();
            assert!(r.evaluate(&inv).is_exact_zero());
        }
        let z = ser(&k, &[(0, 1), (1, 1)]);
        let w = k.inv(&z).unwrap();
        assert!(r.evaluate(&w).is_zero());
    }

    #[test]
    fn pth_power_examples() {
        let k = k2();
        let (g, s) = parse_poly("1 + x^8", &k).unwrap().pth_power_reduce().unwrap();
        assert_eq!((g, s), (parse_poly("1 + x", &k).unwrap(), 3));
        let (_, s) = parse_poly("x^2 + T", &k).unwrap().pth_power_reduce().unwrap();
        assert_eq!(s, 0);
        let f = parse_poly("x^4 + T^2*x^2", &k).unwrap();
        let (g, s) = f.pth_power_reduce().unwrap();
        assert_eq!((g.clone(), s), (parse_poly("x^2 + T*x", &k).unwrap(), 1));
        assert_eq!(g.pth_power(), f);
    }

    #[test]
    fn json_round_trip() {
        let f = e1();
        assert_eq!(SparsePoly::from_json(&f.to_json()).unwrap(), f);
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back: PolyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(SparsePoly::from_json(&back).unwrap(), f);
    }

    fn random_series(sf: &SeriesField, rng: &mut ChaCha8Rng) -> LaurentSeries {
        use rand::Rng;
        let len = rng.random_range(1..4);
        let lo = rng.random_range(-2..3);
        let q = sf.residue().q();
        sf.from_terms(
            (0..len).map(|i| (lo + i, FqElem(rng.random_range(0..q)))),
            Precision::Exact,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn xe_composes_with_evaluation(seed: u64, e in 1u64..4, m in 1u32..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sf = SeriesField::base(2, m).unwrap();
            let f = random_poly(&sf, 2, 12, &mut rng);
            let x = random_series(&sf, &mut rng);
            let lhs = f.transform_xe(e).unwrap().evaluate(&x);
            let rhs = f.evaluate(&sf.pow_u(&x, e));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn recenter_reassembles(seed: u64, p in prop::sample::select(vec![2u64, 3])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sf = SeriesField::base(p, 1).unwrap();
            let f = random_poly(&sf, 2, 9, &mut rng);
            let r = random_series(&sf, &mut rng);
            let d = random_series(&sf, &mut rng);
            let rc = f.recenter(&r).unwrap();
            let mut acc = LaurentSeries::zero();
            for (j, b) in rc.b.iter().enumerate() {
                acc = sf.add(&acc, &sf.mul(b, &sf.pow_u(&d, j as u64)));
            }
            prop_assert_eq!(acc, f.evaluate(&sf.add(&r, &d)));
        }

        #[test]
        fn pth_root_powers_back(seed: u64, p in prop::sample::select(vec![2u64, 3]), m in 1u32..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sf = SeriesField::base(p, m).unwrap();
            let f = random_poly(&sf, 2, 10, &mut rng).pth_power().pth_power();
            let (g, s) = f.pth_power_reduce().unwrap();
            prop_assert!(s >= 2);
            let x = random_series(&sf, &mut rng);
            let gx = sf.pow_u(&g.evaluate(&x), p.pow(s));
            prop_assert_eq!(gx, f.evaluate(&x));
        }

        #[test]
        fn eval_to_agrees_with_exact(seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sf = SeriesField::base(3, 1).unwrap();
            let f = random_poly(&sf, 3, 15, &mut rng);
            let x = random_series(&sf, &mut rng);
            let exact = f.evaluate(&x);
            prop_assert!(f.eval_to(&x, 7).agrees_with(&exact));
            prop_assert_eq!(f.eval_to(&x, 7), exact.truncate(7));
        }
    }
}
