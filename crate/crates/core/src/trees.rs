//! Disk trees of finite sets of series, their labelling and the map `Phi`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::FqElem;
use crate::laurent::{rational_text, LaurentSeries, Rational, SeriesField};
use crate::newton::NewtonPolygon;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiskKind {
    Open,
    Closed,
}

/// `v(x - center) > g` (open) or `>= g` (closed); `g` in units of `v(T)`.
#[derive(Clone, Debug)]
pub struct Disk {
    pub center: LaurentSeries,
    pub radius: Rational,
    pub kind: DiskKind,
}

impl Disk {
    pub fn contains(&self, sf: &SeriesField, x: &LaurentSeries) -> Result<bool> {
        let d = sf.sub(x, &self.center);
        let v = match d.ord() {
            Some(v) => sf.to_val(v),
            None if d.is_exact() => return Ok(true),
            None => {
                let bound = sf.to_val(match d.prec() {
                    crate::laurent::Precision::Abs(n) => n,
                    crate::laurent::Precision::Exact => unreachable!(),
                });
                let decided = match self.kind {
                    DiskKind::Open => bound > self.radius,
                    DiskKind::Closed => bound >= self.radius,
                };
                if decided {
                    return Ok(true);
                }
                return Err(Error::Precision("membership undecided at this precision".into()));
            }
        };
        Ok(match self.kind {
            DiskKind::Open => v > self.radius,
            DiskKind::Closed => v >= self.radius,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    /// Indices into the point list, increasing.
    pub members: Vec<usize>,
    /// `S`-exponent of the smallest closed disk holding the members; `None`
    /// for a leaf.
    pub radius: Option<i64>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    pub label: Option<FqElem>,
}

#[derive(Clone, Debug)]
pub struct DiskTree {
    pub points: Vec<LaurentSeries>,
    pub nodes: Vec<Node>,
    pub root: usize,
}

/// `v(x - y)` as an `S`-exponent; errors when the two cannot be told apart.
pub fn distance(sf: &SeriesField, x: &LaurentSeries, y: &LaurentSeries) -> Result<i64> {
    let d = sf.sub(x, y);
    d.ord().ok_or_else(|| {
        Error::Precision(format!(
            "{} and {} agree to the available precision",
            sf.format(x),
            sf.format(y)
        ))
    })
}

/// The tree of `S cap D` over all disks `D`: each node splits into the
/// residue classes at its radius.
pub fn build_tree(sf: &SeriesField, points: &[LaurentSeries]) -> Result<DiskTree> {
    if points.is_empty() {
        return Err(Error::Invalid("tree of an empty set".into()));
    }
    let mut tree = DiskTree {
        points: points.to_vec(),
        nodes: Vec::new(),
        root: 0,
    };
    let all: Vec<usize> = (0..points.len()).collect();
    tree.root = grow(sf, &mut tree, all, None)?;
    Ok(tree)
}

fn grow(sf: &SeriesField, tree: &mut DiskTree, members: Vec<usize>, parent: Option<usize>) -> Result<usize> {
    let id = tree.nodes.len();
    tree.nodes.push(Node {
        members: members.clone(),
        radius: None,
        children: Vec::new(),
        parent,
        label: None,
    });
    if members.len() == 1 {
        return Ok(id);
    }
    let first = &tree.points[members[0]];
    let mut g = i64::MAX;
    for &i in &members[1..] {
        g = g.min(distance(sf, first, &tree.points[i])?);
    }
    let mut classes: BTreeMap<FqElem, Vec<usize>> = BTreeMap::new();
    for &i in &members {
        let x = &tree.points[i];
        if let crate::laurent::Precision::Abs(n) = x.prec() {
            if n <= g {
                return Err(Error::Precision(format!(
                    "digit at S^{g} of {} is unknown",
                    sf.format(x)
                )));
            }
        }
        classes.entry(x.coeff(g)).or_default().push(i);
    }
    tree.nodes[id].radius = Some(g);
    for (_, cls) in classes {
        let child = grow(sf, tree, cls, Some(id))?;
        tree.nodes[id].children.push(child);
    }
    Ok(id)
}

impl DiskTree {
    /// Longest root-to-leaf chain, in edges.
    pub fn length(&self) -> usize {
        fn depth(t: &DiskTree, n: usize) -> usize {
            t.nodes[n]
                .children
                .iter()
                .map(|&c| 1 + depth(t, c))
                .max()
                .unwrap_or(0)
        }
        depth(self, self.root)
    }

    pub fn max_children(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).max().unwrap_or(0)
    }

    pub fn leaf_of(&self, point: usize) -> usize {
        self.nodes
            .iter()
            .position(|n| n.members == [point])
            .expect("every point has a leaf")
    }

    /// Nodes from the root down to the leaf of `point`.
    pub fn chain_to(&self, point: usize) -> Vec<usize> {
        let mut chain = vec![self.leaf_of(point)];
        while let Some(p) = self.nodes[*chain.last().unwrap()].parent {
            chain.push(p);
        }
        chain.reverse();
        chain
    }

    /// Labels every node: the root gets the digit at `S^root_g`, every other
    /// node the digit of its members at its parent's radius.
    pub fn label(&mut self, root_g: i64) -> Result<()> {
        for id in 0..self.nodes.len() {
            let pos = match self.nodes[id].parent {
                None => root_g,
                Some(p) => self.nodes[p].radius.unwrap(),
            };
            let x = &self.points[self.nodes[id].members[0]];
            if let crate::laurent::Precision::Abs(n) = x.prec() {
                if n <= pos {
                    return Err(Error::Precision(format!("label at S^{pos} needs more digits")));
                }
            }
            self.nodes[id].label = Some(x.coeff(pos));
        }
        Ok(())
    }

    pub fn to_json(&self, sf: &SeriesField) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "members": n.members.iter().map(|&i| sf.format(&self.points[i])).collect::<Vec<_>>(),
                    "radius": n.radius.map(|g| rational_text(sf.to_val(g))),
                    "children": n.children,
                    "label": n.label.map(|l| sf.residue().format_vec(l)),
                })
            })
            .collect();
        json!({ "schema": "v1", "root": self.root, "length": self.length(), "nodes": nodes })
    }

    pub fn to_dot(&self, sf: &SeriesField) -> String {
        let mut s = String::from("digraph disks {\n  node [shape=box];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let members: Vec<String> = n.members.iter().map(|&m| sf.format(&self.points[m])).collect();
            let radius = n
                .radius
                .map_or("leaf".to_string(), |g| format!("r={}", rational_text(sf.to_val(g))));
            let label = n
                .label
                .map_or(String::new(), |l| format!(" label={}", sf.residue().format_vec(l)));
            let _ = writeln!(s, "  n{i} [label=\"{{{}}}\\n{radius}{label}\"];", members.join(", "));
            for c in &n.children {
                let _ = writeln!(s, "  n{i} -> n{c};");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// `Phi(z)` as a coefficient vector of length `k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhiImage {
    pub coeffs: Vec<FqElem>,
}

/// `Phi` on a set of roots in `F((T))`, using the polygon's proper order.
/// Returns the images in the order of `roots`.
pub fn phi_map(
    sf: &SeriesField,
    roots: &[LaurentSeries],
    polygon: &NewtonPolygon,
    k: usize,
) -> Result<Vec<PhiImage>> {
    if sf.e() != 1 {
        return Err(Error::Invalid("Phi is defined here for unramified roots only".into()));
    }
    let mut out = Vec::with_capacity(roots.len());
    for z in roots {
        let mut coeffs = vec![FqElem::ZERO; k];
        let Some(v) = z.ord() else {
            out.push(PhiImage { coeffs });
            continue;
        };
        let seg = polygon
            .segment_for(Rational::from_integer(v))
            .ok_or_else(|| Error::CheckFailed(format!("no segment of slope {}", -v)))?;
        let u = seg.order_pos;
        let mut members = Vec::new();
        let mut me = 0;
        for y in roots {
            if y.ord().is_some() && (y == z || distance(sf, y, z)? > v) {
                if y == z {
                    me = members.len();
                }
                members.push(y.clone());
            }
        }
        let mut tree = build_tree(sf, &members)?;
        tree.label(v)?;
        let chain = tree.chain_to(me);
        let n = chain.len() - 1;
        if u - 1 + n > k.saturating_sub(1) {
            return Err(Error::CheckFailed(format!(
                "Phi degree {} does not fit below k = {k} (u = {u}, chain {n})",
                u - 1 + n
            )));
        }
        for (i, node) in chain.iter().enumerate() {
            coeffs[u - 1 + i] = tree.nodes[*node].label.unwrap();
        }
        out.push(PhiImage { coeffs });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::polygon;
    use crate::parser::{parse_poly, parse_series};
    use std::collections::BTreeSet;

    fn k2() -> SeriesField {
        SeriesField::base(2, 1).unwrap()
    }

    fn pts(sf: &SeriesField, xs: &[&str]) -> Vec<LaurentSeries> {
        xs.iter().map(|s| parse_series(s, sf).unwrap()).collect()
    }

    // Hasse diagram of { S cap D(x, d) } built straight from the definition
    fn hasse_oracle(sf: &SeriesField, s: &[LaurentSeries]) -> BTreeSet<(Vec<usize>, Option<Vec<usize>>)> {
        let mut radii: BTreeSet<i64> = BTreeSet::new();
        for a in s {
            for b in s {
                if a != b {
                    radii.insert(distance(sf, a, b).unwrap());
                }
            }
        }
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for x in s {
            for &d in &radii {
                let set: Vec<usize> = (0..s.len())
                    .filter(|&i| s[i] == *x || distance(sf, &s[i], x).unwrap() >= d)
                    .collect();
                sets.insert(set);
            }
        }
        for i in 0..s.len() {
            sets.insert(vec![i]);
        }
        sets.insert((0..s.len()).collect());
        let subset = |a: &Vec<usize>, b: &Vec<usize>| a.len() < b.len() && a.iter().all(|x| b.contains(x));
        sets.iter()
            .map(|a| {
                let parent = sets
                    .iter()
                    .filter(|b| subset(a, b))
                    .filter(|b| !sets.iter().any(|c| subset(a, c) && subset(c, b)))
                    .next().cloned();
                (a.clone(), parent)
            })
            .collect()
    }

    fn as_edges(t: &DiskTree) -> BTreeSet<(Vec<usize>, Option<Vec<usize>>)> {
        t.nodes
            .iter()
            .map(|n| (n.members.clone(), n.parent.map(|p| t.nodes[p].members.clone())))
            .collect()
    }

    #[test]
    fn small_tree() {
        let sf = k2();
        let s = pts(&sf, &["1", "T", "1+T"]);
        let t = build_tree(&sf, &s).unwrap();
        assert_eq!(t.nodes[t.root].radius, Some(0));
        assert_eq!(t.length(), 2);
        let kids: BTreeSet<Vec<usize>> = t.nodes[t.root]
            .children
            .iter()
            .map(|&c| t.nodes[c].members.clone())
            .collect();
        assert_eq!(kids, BTreeSet::from([vec![1], vec![0, 2]]));
        assert_eq!(as_edges(&t), hasse_oracle(&sf, &s));
        let single = build_tree(&sf, &pts(&sf, &["T"])).unwrap();
        assert_eq!(single.length(), 0);
        assert!(build_tree(&sf, &pts(&sf, &["1", "1"])).is_err());
    }

    #[test]
    fn child_labels() {
        let sf = k2();
        let s = pts(&sf, &["1", "1+T"]);
        let mut t = build_tree(&sf, &s).unwrap();
        t.label(0).unwrap();
        let labels: BTreeSet<FqElem> = t.nodes[t.root]
            .children
            .iter()
            .map(|&c| t.nodes[c].label.unwrap())
            .collect();
        assert_eq!(labels, BTreeSet::from([FqElem::ZERO, FqElem::ONE]));
    }

    #[test]
    fn phi_on_e1() {
        let sf = k2();
        let f = parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &sf).unwrap();
        let np = polygon(&f).unwrap();
        let roots = pts(&sf, &["0", "T", "1", "1+T"]);
        let img = phi_map(&sf, &roots, &np, 2).unwrap();
        let o = FqElem::ZERO;
        let l = FqElem::ONE;
        assert_eq!(img[0].coeffs, vec![o, o]);
        assert_eq!(img[1].coeffs, vec![o, l]);
        assert_eq!(img[2].coeffs, vec![l, o]);
        assert_eq!(img[3].coeffs, vec![l, l]);
    }

    #[test]
    fn disk_membership() {
        let sf = k2();
        let d = Disk {
            center: LaurentSeries::one(),
            radius: Rational::from_integer(0),
            kind: DiskKind::Open,
        };
        assert!(d.contains(&sf, &parse_series("1+T", &sf).unwrap()).unwrap());
        assert!(!d.contains(&sf, &parse_series("T", &sf).unwrap()).unwrap());
        let c = Disk { kind: DiskKind::Closed, ..d };
        assert!(c.contains(&sf, &parse_series("T", &sf).unwrap()).unwrap());
    }

    #[test]
    fn random_trees_match_hasse_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (p, m) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let sf = SeriesField::base(p, m).unwrap();
            let q = sf.residue().q();
            for _ in 0..40 {
                let n = rng.random_range(1..9);
                let mut set: Vec<LaurentSeries> = Vec::new();
                while set.len() < n {
                    let x = sf.from_terms(
                        (0..4).map(|i| (i, FqElem(rng.random_range(0..q)))),
                        crate::laurent::Precision::Exact,
                    );
                    if !set.contains(&x) {
                        set.push(x);
                    }
                }
                let t = build_tree(&sf, &set).unwrap();
                assert_eq!(as_edges(&t), hasse_oracle(&sf, &set));
                assert!(t.max_children() <= q as usize);
                let leaves = t.nodes.iter().filter(|n| n.children.is_empty()).count();
                assert_eq!(leaves, set.len());
            }
        }
    }
}
