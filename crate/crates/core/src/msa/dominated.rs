//! Dominated functions on finite graphs and their center-to-boundary decay.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LatticeBox;

/// Undirected graph by adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) out of range")));
            }
            if a != b && !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        Ok(Self { adj })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).unwrap()
    }

    /// `w × h` grid with nearest-neighbour edges; vertex `i + w j`.
    pub fn grid(w: usize, h: usize) -> Self {
        let mut edges = Vec::new();
        for j in 0..h {
            for i in 0..w {
                let v = i + w * j;
                if i + 1 < w {
                    edges.push((v, v + 1));
                }
                if j + 1 < h {
                    edges.push((v, v + w));
                }
            }
        }
        Self::new(w * h, &edges).unwrap()
    }

    /// Points of a lattice box joined when their max-norm distance is 1,
    /// so graph balls are max-norm cubes. Vertex order is the box order.
    pub fn king_lattice(domain: &LatticeBox) -> Self {
        let pts: Vec<_> = domain.points().collect();
        let k = pts.first().map(|p| p.coords().len()).unwrap_or(0);
        let mut adj = vec![Vec::new(); pts.len()];
        for (i, p) in pts.iter().enumerate() {
            let mut offset = vec![-1i64; k];
            loop {
                if offset.iter().any(|&o| o != 0) {
                    let q: Vec<i64> = p.coords().iter().zip(&offset).map(|(a, b)| a + b).collect();
                    let cfg = crate::geometry::Configuration::from_flat(domain.n_particles(), domain.dim(), q).unwrap();
                    if let Some(j) = domain.index_of(&cfg) {
                        adj[i].push(j);
                    }
                }
                let mut c = 0;
                while c < k && offset[c] == 1 {
                    offset[c] = -1;
                    c += 1;
                }
                if c == k {
                    break;
                }
                offset[c] += 1;
            }
        }
        Self { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Graph distances from `src`, `usize::MAX` when unreachable.
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within distance `r` of `x`.
    pub fn ball(&self, x: usize, r: usize) -> Vec<usize> {
        let mut seen = BTreeSet::from([x]);
        let mut frontier = vec![x];
        for _ in 0..r {
            let mut next = Vec::new();
            for v in frontier {
                for &w in &self.adj[v] {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen.into_iter().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.distances_from(0).iter().all(|&d| d != usize::MAX)
    }
}

/// Nonnegative function on a graph with a center, radius, regularity scale
/// `ℓ`, contraction `q` and exempt set `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFunction {
    pub graph: Graph,
    pub center: usize,
    pub radius: usize,
    pub values: Vec<f64>,
    pub ell: usize,
    pub q: f64,
    pub singular: BTreeSet<usize>,
}

/// Outcome of a point-by-point domination check.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DominationCheck {
    pub dominated: bool,
    /// Points of `B_{L-ℓ}(u) \ S` that are not regular.
    pub irregular: Vec<usize>,
    /// Points with `R_f(x) < ∞` and `f(x) > q M(f, B_{R_f(x)}(u))`.
    pub layer_failures: Vec<usize>,
}

impl GraphFunction {
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.len();
        if self.values.len() != n || self.center >= n {
            return Err(Error::InvalidArgument("values/center do not match the graph".into()));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("f must be finite and nonnegative".into()));
        }
        if self.ell < 1 || self.ell > self.radius {
            return Err(Error::InvalidArgument(format!("need 1 <= l <= L, got l = {}, L = {}", self.ell, self.radius)));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::InvalidArgument(format!("q = {} outside (0, 1)", self.q)));
        }
        let dist = self.center_distances();
        let reach = self.radius as i64 - self.ell as i64 - 1;
        if self.singular.iter().any(|&s| s >= n || (dist[s] as i64) > reach) {
            return Err(Error::InvalidArgument("S must lie in B_{L-l-1}(u)".into()));
        }
        Ok(())
    }

    pub fn center_distances(&self) -> Vec<usize> {
        self.graph.distances_from(self.center)
    }

    /// `M(f, A)`.
    pub fn max_over(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.values[v]).fold(0.0, f64::max)
    }

    /// `M(f, B_r(u))`.
    pub fn center_max(&self, r: usize) -> f64 {
        let dist = self.center_distances();
        (0..self.graph.len()).filter(|&v| dist[v] <= r).map(|v| self.values[v]).fold(0.0, f64::max)
    }

    /// `(ℓ, q)`-regularity of `x ∈ B_{L-ℓ}(u)`.
    pub fn is_regular(&self, x: usize, dist: &[usize]) -> bool {
        dist[x] <= self.radius - self.ell && self.values[x] <= self.q * self.max_over(&self.graph.ball(x, self.ell))
    }

    pub fn regular_set(&self) -> BTreeSet<usize> {
        let dist = self.center_distances();
        (0..self.graph.len()).filter(|&x| self.is_regular(x, &dist)).collect()
    }

    /// Radii `r <= L - ℓ` whose layer `{|y - u| = r}` is entirely regular.
    fn regular_layers(&self, dist: &[usize], regular: &BTreeSet<usize>) -> Vec<bool> {
        let top = self.radius - self.ell;
        let mut ok = vec![true; top + 1];
        for v in 0..self.graph.len() {
            if dist[v] <= top && !regular.contains(&v) {
                ok[dist[v]] = false;
            }
        }
        ok
    }

    /// Brute-force check of `(ℓ, q, S)`-domination in `B_L(u)`. Regularity
    /// is only defined on `B_{L-ℓ}(u)`, so that is where `S` exempts points.
    pub fn check_domination(&self) -> Result<DominationCheck> {
        self.validate()?;
        let dist = self.center_distances();
        let regular = self.regular_set();
        let top = self.radius - self.ell;
        let irregular: Vec<usize> = (0..self.graph.len())
            .filter(|&x| dist[x] <= top && !self.singular.contains(&x) && !regular.contains(&x))
            .collect();
        let layers = self.regular_layers(&dist, &regular);
        let mut layer_failures = Vec::new();
        for x in 0..self.graph.len() {
            if dist[x] > top {
                continue;
            }
            // r(x): smallest regular layer at or beyond |x - u|
            if let Some(r) = (dist[x]..=top).find(|&r| layers[r]) {
                let big = r + self.ell;
                let m = (0..self.graph.len()).filter(|&v| dist[v] <= big).map(|v| self.values[v]).fold(0.0, f64::max);
                if self.values[x] > self.q * m {
                    layer_failures.push(x);
                }
            }
        }
        Ok(DominationCheck { dominated: irregular.is_empty() && layer_failures.is_empty(), irregular, layer_failures })
    }
}

/// Concentric annuli `{a_j <= |x - u| <= b_j}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnuliCover {
    pub annuli: Vec<(usize, usize)>,
}

impl AnnuliCover {
    /// `w = Σ (b_j - a_j + 1)`.
    pub fn width(&self) -> usize {
        self.annuli.iter().map(|(a, b)| b + 1 - a).sum()
    }

    pub fn covers_radius(&self, r: usize) -> bool {
        self.annuli.iter().any(|&(a, b)| a <= r && r <= b)
    }

    /// Narrowest cover: one annulus per maximal run of occupied radii.
    pub fn minimal(gf: &GraphFunction) -> Self {
        let dist = gf.center_distances();
        let radii: BTreeSet<usize> = gf.singular.iter().map(|&s| dist[s]).collect();
        let mut annuli: Vec<(usize, usize)> = Vec::new();
        for r in radii {
            match annuli.last_mut() {
                Some((_, b)) if *b + 1 == r => *b = r,
                _ => annuli.push((r, r)),
            }
        }
        Self { annuli }
    }
}

/// Evaluated decay bound together with the layer certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominatedBound {
    pub f_center: f64,
    /// `q^{(L - ℓ - w)/ℓ} M(f, B_{L+1}(u))`.
    pub bound: f64,
    /// `q^{n+1} M(f, B_L(u))`, the sharper value the recursion yields.
    pub layer_bound: f64,
    pub exponent: f64,
    pub width: usize,
    /// Regular layers `r_0 < … < r_n`.
    pub layers: Vec<usize>,
}

impl DominatedBound {
    pub fn holds(&self) -> bool {
        self.f_center <= self.bound
    }
}

/// Evaluates the decay bound for a dominated function and runs the layer
/// recursion `r_n = max[r <= L - ℓ : L_r ∩ S = ∅]`,
/// `r_j = max[r <= r_{j+1} - ℓ : L_r ∩ S = ∅]`.
pub fn dominated_bound(gf: &GraphFunction, cover: &AnnuliCover) -> Result<DominatedBound> {
    gf.validate()?;
    let (l, ell) = (gf.radius, gf.ell);
    if cover.annuli.iter().any(|(a, b)| a > b) {
        return Err(Error::InvalidArgument("annulus with a > b".into()));
    }
    let dist = gf.center_distances();
    if gf.singular.iter().any(|&s| !cover.covers_radius(dist[s])) {
        return Err(Error::InvalidArgument("annuli do not cover S".into()));
    }
    let width = cover.width();
    if width > l - ell {
        return Err(Error::CoverTooWide { width, limit: l - ell });
    }
    let blocked: BTreeSet<usize> = gf.singular.iter().map(|&s| dist[s]).collect();
    let steps = (l - width) / ell;
    let mut layers = Vec::with_capacity(steps);
    let mut ceiling = Some(l - ell);
    for _ in 0..steps {
        let top = ceiling.ok_or_else(|| Error::Precondition("layer recursion ran below zero".into()))?;
        let r = (0..=top)
            .rev()
            .find(|r| !blocked.contains(r))
            .ok_or_else(|| Error::Precondition("no free layer".into()))?;
        layers.push(r);
        ceiling = r.checked_sub(ell);
    }
    layers.reverse();
    let exponent = (l - ell - width) as f64 / ell as f64;
    let bound = gf.q.powf(exponent) * gf.center_max(l + 1);
    let layer_bound = gf.q.powi(steps as i32) * gf.center_max(l);
    Ok(DominatedBound { f_center: gf.values[gf.center], bound, layer_bound, exponent, width, layers })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    Path,
    Grid,
    Random,
}

fn random_graph<R: Rng>(r: &mut R, kind: GraphKind) -> Graph {
    match kind {
        GraphKind::Path => Graph::path(r.random_range(6..=40)),
        GraphKind::Grid => Graph::grid(r.random_range(3..=8), r.random_range(3..=8)),
        GraphKind::Random => {
            let n = r.random_range(8..=40);
            let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (r.random_range(0..v), v)).collect();
            for _ in 0..r.random_range(0..n) {
                edges.push((r.random_range(0..n), r.random_range(0..n)));
            }
            Graph::new(n, &edges).unwrap()
        }
    }
}

/// Random instance built to be dominated most of the time: values are
/// assigned from the outside in, regular candidates get
/// `f(x) = q U M(f, B_ℓ(x))` over already assigned points, points of `S`
/// get arbitrary values, and a few instances are perturbed so that the
/// predicate fails.
pub fn random_instance<R: Rng>(r: &mut R) -> GraphFunction {
    loop {
        let kind = [GraphKind::Path, GraphKind::Grid, GraphKind::Random][r.random_range(0..3)];
        let graph = random_graph(r, kind);
        let center = r.random_range(0..graph.len());
        let dist = graph.distances_from(center);
        let ecc = dist.iter().copied().max().unwrap_or(0);
        let ell = r.random_range(1..=3usize);
        if ecc < ell + 2 {
            continue;
        }
        let radius = r.random_range(ell + 1..=ecc);
        let q = r.random_range(0.05..0.95);

        let mut singular = BTreeSet::new();
        if radius > ell {
            let p_s = r.random_range(0.0..0.3);
            for v in 0..graph.len() {
                if dist[v] + ell < radius && r.random_bool(p_s) {
                    singular.insert(v);
                }
            }
        }
        let mut gf = GraphFunction { graph, center, radius, values: vec![0.0; dist.len()], ell, q, singular };
        while AnnuliCover::minimal(&gf).width() > radius - ell {
            let victim = *gf.singular.iter().nth(r.random_range(0..gf.singular.len())).unwrap();
            gf.singular.remove(&victim);
        }

        let mut order: Vec<usize> = (0..dist.len()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(dist[v]));
        let mut assigned = vec![false; dist.len()];
        let mut running_max: f64 = 0.0;
        for &x in &order {
            let v = if dist[x] > radius - ell {
                r.random_range(0.0..1.0)
            } else if gf.singular.contains(&x) {
                r.random_range(0.0..2.0) * running_max
            } else {
                let m = gf.graph.ball(x, ell).into_iter().filter(|&y| assigned[y]).map(|y| gf.values[y]).fold(0.0, f64::max);
                q * r.random_range(0.0..1.0) * m
            };
            gf.values[x] = v;
            assigned[x] = true;
            running_max = running_max.max(v);
        }
        if r.random_bool(0.1) {
            let x = r.random_range(0..dist.len());
            gf.values[x] = (gf.values[x] / (q * q)).max(1e-3);
        }
        return gf;
    }
}
