//! Newton polygons, dependence indices and the proper order of segments.

use num_rational::Ratio;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::{rational_text, Rational};
use crate::poly::SparsePoly;

/// Column budget for [`dependence_index`].
pub const MAX_DEPENDENCE_COLUMNS: u64 = 1 << 24;

/// `C(n, t) mod p` by Lucas' theorem.
pub fn binom_mod_p(mut n: u64, mut t: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while t > 0 {
        let (nd, td) = (n % p, t % p);
        if td > nd {
            return 0;
        }
        acc = acc * small_binom(nd, td, p) % p;
        n /= p;
        t /= p;
    }
    acc
}

fn small_binom(n: u64, t: u64, p: u64) -> u64 {
    let t = t.min(n - t);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..t {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// The largest `N` such that the truncations mod `x^N` of `(1+x)^e_i` are
/// linearly dependent over `F_p`.
pub fn dependence_index(exponents: &[u64], p: u64) -> Result<u64> {
    let r = exponents.len();
    if r == 0 {
        return Err(Error::Invalid("dependence index of an empty set".into()));
    }
    let mut sorted = exponents.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateExponent(w[0]));
    }
    // echelon basis of the column space, keyed by pivot row
    let mut basis: Vec<Option<Vec<u64>>> = vec![None; r];
    let mut rank = 0;
    let e_max = sorted[r - 1];
    let mut t = 0u64;
    loop {
        if t > e_max || t >= MAX_DEPENDENCE_COLUMNS {
            return Err(Error::CapExceeded(format!(
                "dependence index did not resolve within {t} columns"
            )));
        }
        let mut col: Vec<u64> = exponents.iter().map(|&e| binom_mod_p(e, t, p)).collect();
        for row in 0..r {
            if col[row] == 0 {
                continue;
            }
            match &basis[row] {
                Some(b) => {
                    let f = col[row];
                    for (c, &bv) in col.iter_mut().zip(b) {
                        *c = (*c + p - f * bv % p) % p;
                    }
                }
                None => {
                    let inv = pow_mod(col[row], p - 2, p);
                    for c in col.iter_mut() {
                        *c = *c * inv % p;
                    }
                    basis[row] = Some(col);
                    rank += 1;
                    break;
                }
            }
        }
        t += 1;
        if rank == r {
            return Ok(t - 1);
        }
    }
}

/// `p^{v_p(n)}` for `n > 0`.
pub fn p_part(mut n: u64, p: u64) -> u64 {
    let mut acc = 1;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        acc *= p;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Endpoints `(n, v)` with `v` in units of `v(T)`.
    pub lo: (u64, Rational),
    pub hi: (u64, Rational),
    pub slope: Rational,
    /// Valuation of the roots this segment accounts for (`-slope`).
    pub g: Rational,
    pub exponents: Vec<u64>,
    pub h_len: u64,
    /// Dependence index `N_j`.
    pub n_index: u64,
    /// 1-based position in the proper order.
    pub order_pos: usize,
    /// 0-based position along the hull, left to right.
    pub hull_pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Segments in proper order.
    pub segments: Vec<Segment>,
    pub zero_root_mult: u64,
}

/// Lower convex hull of points with distinct, increasing `x`; returns the
/// indices of the vertices.
pub fn lower_hull(points: &[(i128, i128)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        while hull.len() >= 2 {
            let (ax, ay) = points[hull[hull.len() - 2]];
            let (bx, by) = points[hull[hull.len() - 1]];
            // drop b unless it lies strictly below segment a-(x,y)
            let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// The Newton polygon of `f`, segments in proper order.
pub fn polygon(f: &SparsePoly) -> Result<NewtonPolygon> {
    let sf = f.field();
    let e = sf.e() as i64;
    let p = sf.p() as u64;
    let mut points = Vec::with_capacity(f.terms().len());
    for (n, a) in f.terms() {
        let v = a.ord().ok_or_else(|| {
            Error::Precision(format!("coefficient of x^{n} is indistinguishable from 0"))
        })?;
        points.push((*n as i128, v as i128));
    }
    let hull = lower_hull(&points);
    let mut segments = Vec::new();
    for (hull_pos, w) in hull.windows(2).enumerate() {
        let (a, b) = (points[w[0]], points[w[1]]);
        let exponents: Vec<u64> = (w[0]..=w[1])
            .filter(|&i| {
                let (x, y) = points[i];
                (b.0 - a.0) * (y - a.1) == (b.1 - a.1) * (x - a.0)
            })
            .map(|i| points[i].0 as u64)
            .collect();
        let dn = (b.0 - a.0) as i64;
        let slope = Ratio::new((b.1 - a.1) as i64, dn * e);
        segments.push(Segment {
            lo: (a.0 as u64, Rational::new(a.1 as i64, e)),
            hi: (b.0 as u64, Rational::new(b.1 as i64, e)),
            slope,
            g: -slope,
            n_index: dependence_index(&exponents, p)?,
            exponents,
            h_len: dn as u64,
            order_pos: 0,
            hull_pos,
        });
    }
    let mut poly = NewtonPolygon {
        segments,
        zero_root_mult: f.terms()[0].0,
    };
    proper_order(&mut poly);
    Ok(poly)
}

/// Stable sort by `N` descending and assign positions `1..=t`.
pub fn proper_order(poly: &mut NewtonPolygon) {
    poly.segments.sort_by(|a, b| b.n_index.cmp(&a.n_index));
    for (i, s) in poly.segments.iter_mut().enumerate() {
        s.order_pos = i + 1;
    }
}

impl NewtonPolygon {
    /// The segment whose root valuation is `g`.
    pub fn segment_for(&self, g: Rational) -> Option<&Segment> {
        self.segments.iter().find(|s| s.g == g)
    }

    pub fn to_json(&self) -> Value {
        let mut hull: Vec<&Segment> = self.segments.iter().collect();
        hull.sort_by_key(|s| s.hull_pos);
        let mut vertices: Vec<Value> = hull
            .iter()
            .map(|s| json!([s.lo.0, rational_text(s.lo.1)]))
            .collect();
        if let Some(last) = hull.last() {
            vertices.push(json!([last.hi.0, rational_text(last.hi.1)]));
        }
        let segments: Vec<Value> = self
            .segments
            .iter()
            .map(|s| {
                json!({
                    "order_pos": s.order_pos,
                    "hull_pos": s.hull_pos,
                    "slope": rational_text(s.slope),
                    "g": rational_text(s.g),
                    "exponents": s.exponents,
                    "h_len": s.h_len,
                    "N": s.n_index,
                })
            })
            .collect();
        json!({
            "schema": "v1",
            "vertices": vertices,
            "segments": segments,
            "zero_root_mult": self.zero_root_mult,
        })
    }
}
