use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sparsezeros::census::{random_poly, verify_instance, CheckConfig};
use sparsezeros::extremal::{subspace_poly, verify_sharpness_thm2, SubspaceSpec};
use sparsezeros::laurent::{LaurentSeries, SeriesField};
use sparsezeros::newton::polygon;
use sparsezeros::parser::{parse_poly, parse_series_list};
use sparsezeros::poly::SparsePoly;
use sparsezeros::roots::{oracle_roots, roots_deg_le_d, roots_in, truncate_for_oracle, Degree};
use sparsezeros::trees::phi_map;

#[test]
fn root_finder_matches_oracle_over_f3_and_f4() {
    for (p, m, prec) in [(3, 1, 5), (2, 2, 4)] {
        let sf = SeriesField::base(p, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..30 {
            let f = random_poly(&sf, 1 + i % 3, 12, &mut rng);
            let recs = roots_in(&f, &sf, 12).unwrap();
            let got: Vec<LaurentSeries> = truncate_for_oracle(&recs, prec)
                .into_iter()
                .filter(|x| x.ord().is_none_or(|v| (-3..=4).contains(&v)))
                .collect();
            assert_eq!(got, oracle_roots(&f, prec, (-3, 4)).unwrap(), "{}", f.format());
        }
    }
}

#[test]
fn eight_roots_of_the_cubic_span_match_brute_force() {
    let sf = SeriesField::base(2, 1).unwrap();
    let basis = parse_series_list("1, T, T^2", &sf).unwrap();
    let f = subspace_poly(&SubspaceSpec::new(sf.clone(), 1, basis)).unwrap();
    assert_eq!(f.exponents(), vec![1, 2, 4, 8]);
    let recs = roots_in(&f, &sf, 8).unwrap();
    assert_eq!(recs.len(), 8);
    assert_eq!(truncate_for_oracle(&recs, 6), oracle_roots(&f, 6, (-3, 4)).unwrap());
}

#[test]
fn phi_commutes_with_frobenius_on_the_extremal() {
    let sf = SeriesField::base(2, 1).unwrap();
    let spec = SubspaceSpec::new(sf.clone(), 2, parse_series_list("1, T", &sf).unwrap());
    let f = subspace_poly(&spec).unwrap();
    let (_, recs) = verify_sharpness_thm2(&spec, 2, 6).unwrap();
    let target = recs[0].0.clone();
    let roots: Vec<LaurentSeries> = recs.iter().map(|(_, r)| r.value.clone()).collect();
    let np = polygon(&f).unwrap();
    let images = phi_map(&target, &roots, &np, 2).unwrap();
    let field = target.residue();
    for (z, img) in roots.iter().zip(&images) {
        let conj = target.frobenius(z, 1);
        let at = roots.iter().position(|r| *r == conj).expect("roots are Galois stable");
        let want: Vec<_> = img.coeffs.iter().map(|&c| field.frobenius(c, 1)).collect();
        assert_eq!(images[at].coeffs, want);
    }
    let distinct: BTreeSet<_> = images.iter().collect();
    assert_eq!(distinct.len(), 16);
}

#[test]
fn ramified_root_has_orbit_two() {
    let sf = SeriesField::base(3, 1).unwrap();
    let f = parse_poly("x^2 - T", &sf).unwrap();
    assert!(roots_in(&f, &sf, 8).unwrap().is_empty());
    let recs = roots_deg_le_d(&f, 2, 8).unwrap();
    assert_eq!(recs.len(), 2);
    for (t, r) in &recs {
        assert_eq!(t.e(), 2);
        assert_eq!(r.degree, Degree::Exact(2));
        assert!(f.base_change(t).unwrap().evaluate(&r.value).is_exact_zero());
    }
}

#[test]
fn json_round_trips() {
    let sf = SeriesField::base(2, 2).unwrap();
    let f = parse_poly("g*x^7 + (T^-2 + g^2*T)*x^3 + 1", &sf).unwrap();
    let back = SparsePoly::from_json(&f.to_json()).unwrap();
    assert_eq!(back, f);
    let text = serde_json::to_string(&f.to_json()).unwrap();
    let again: sparsezeros::poly::PolyJson = serde_json::from_str(&text).unwrap();
    assert_eq!(SparsePoly::from_json(&again).unwrap(), f);
    assert_eq!(parse_poly(&f.format(), &sf).unwrap(), f);
}

#[test]
fn verify_instance_is_deterministic() {
    let sf = SeriesField::base(3, 1).unwrap();
    let f = parse_poly("x^9 + T*x^3 + (1 + T^2)*x", &sf).unwrap();
    let cfg = CheckConfig::default();
    let a = verify_instance(&f, &cfg, 0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = verify_instance(&f, &cfg, 0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a, b);
    assert!(a.passed(), "{:?}", a.failures);
}
