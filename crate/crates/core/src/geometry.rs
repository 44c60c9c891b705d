//! Multi-particle configuration-space geometry.
//!
//! Everything lives on the integer lattice: a configuration of `N`
//! particles in `Z^d` is a point of `Z^{Nd}`, a cube of radius `L` is the
//! max-norm lattice ball `B_L(u)` with `(2L+1)^{Nd}` points.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single-particle lattice site in `Z^d`.
pub type Site = Vec<i64>;

/// Positions of `N` particles in `Z^d`, stored flat (particle-major).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct Configuration {
    n: usize,
    d: usize,
    coords: Vec<i64>,
}

impl Configuration {
    pub fn new(points: Vec<Vec<i64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidArgument("configuration needs at least one particle".into()));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::DimensionMismatch("particles have different dimensions".into()));
        }
        Ok(Self { n, d, coords: points.into_iter().flatten().collect() })
    }

    pub fn from_flat(n: usize, d: usize, coords: Vec<i64>) -> Result<Self> {
        if n == 0 || d == 0 || coords.len() != n * d {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for N={n}, d={d}",
                coords.len()
            )));
        }
        Ok(Self { n, d, coords })
    }

    /// One-dimensional configuration, one coordinate per particle.
    pub fn line(xs: &[i64]) -> Self {
        assert!(!xs.is_empty(), "configuration needs at least one particle");
        Self { n: xs.len(), d: 1, coords: xs.to_vec() }
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn particle(&self, i: usize) -> &[i64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn particles(&self) -> impl Iterator<Item = &[i64]> {
        self.coords.chunks(self.d)
    }

    /// `(πx)_i = x_{perm[i]}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let coords = perm.iter().flat_map(|&j| self.particle(j).iter().copied()).collect();
        Self { n: self.n, d: self.d, coords }
    }

    /// Sub-configuration of the particles listed in `indices`.
    pub fn select(&self, indices: &[usize]) -> Self {
        let coords = indices.iter().flat_map(|&j| self.particle(j).iter().copied()).collect();
        Self { n: indices.len(), d: self.d, coords }
    }

    /// The coordinate set `Πx`, duplicates removed.
    pub fn projection(&self) -> BTreeSet<Site> {
        self.particles().map(|p| p.to_vec()).collect()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "(N={}, d={}) vs (N={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.particles()).finish()
    }
}

impl TryFrom<Vec<Vec<i64>>> for Configuration {
    type Error = Error;
    fn try_from(points: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<Configuration> for Vec<Vec<i64>> {
    fn from(c: Configuration) -> Self {
        c.particles().map(|p| p.to_vec()).collect()
    }
}

fn site_distance(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0)
}

/// Axis-aligned lattice box in `Z^{Nd}` (inclusive bounds). Points are
/// enumerated in row-major order, last coordinate fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    n: usize,
    d: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl LatticeBox {
    pub fn new(n: usize, d: usize, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if n == 0 || d == 0 || lo.len() != n * d || hi.len() != n * d {
            return Err(Error::DimensionMismatch("box bounds do not match N*d".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidArgument("empty lattice box".into()));
        }
        Ok(Self { n, d, lo, hi })
    }

    /// Smallest box containing every configuration, padded by `pad`.
    pub fn enclosing(configs: &[&Configuration], pad: i64) -> Result<Self> {
        let first = configs
            .first()
            .ok_or_else(|| Error::InvalidArgument("no configurations".into()))?;
        for c in configs {
            first.same_shape(c)?;
        }
        let m = first.n * first.d;
        let lo = (0..m).map(|k| configs.iter().map(|c| c.coords[k]).min().unwrap() - pad).collect();
        let hi = (0..m).map(|k| configs.iter().map(|c| c.coords[k]).max().unwrap() + pad).collect();
        Self::new(first.n, first.d, lo, hi)
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    fn extents(&self) -> impl Iterator<Item = usize> + '_ {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a + 1) as usize)
    }

    pub fn len(&self) -> usize {
        self.extents().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: &Configuration) -> bool {
        x.n == self.n
            && x.d == self.d
            && x.coords.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (a, b))| a <= c && c <= b)
    }

    pub fn contains_box(&self, other: &LatticeBox) -> bool {
        self.n == other.n
            && self.d == other.d
            && (0..self.lo.len()).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    /// Row-major index of a configuration inside the box.
    pub fn index_of(&self, x: &Configuration) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let mut idx = 0usize;
        for (k, ext) in self.extents().enumerate() {
            idx = idx * ext + (x.coords[k] - self.lo[k]) as usize;
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Configuration {
        let m = self.lo.len();
        let mut coords = vec![0i64; m];
        let ext: Vec<usize> = self.extents().collect();
        for k in (0..m).rev() {
            coords[k] = self.lo[k] + (idx % ext[k]) as i64;
            idx /= ext[k];
        }
        Configuration { n: self.n, d: self.d, coords }
    }

    pub fn points(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Single-particle sites visited by any particle of any configuration in
    /// the box (union of the per-particle coordinate boxes).
    pub fn site_region(&self) -> BTreeSet<Site> {
        let mut out = BTreeSet::new();
        for j in 0..self.n {
            let lo = &self.lo[j * self.d..(j + 1) * self.d];
            let hi = &self.hi[j * self.d..(j + 1) * self.d];
            let single = LatticeBox { n: 1, d: self.d, lo: lo.to_vec(), hi: hi.to_vec() };
            out.extend(single.points().map(|p| p.coords));
        }
        out
    }

    /// Restrict the box to the particles in `indices`.
    pub fn select(&self, indices: &[usize]) -> Self {
        let pick = |v: &[i64]| -> Vec<i64> {
            indices.iter().flat_map(|&j| v[j * self.d..(j + 1) * self.d].iter().copied()).collect()
        };
        Self { n: indices.len(), d: self.d, lo: pick(&self.lo), hi: pick(&self.hi) }
    }
}

/// Max-norm lattice ball `B_L(u)`; also stands for the open continuum cube
/// of radius `L + 1/2` around `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Configuration,
    pub radius: usize,
}

impl Cube {
    pub fn new(center: Configuration, radius: usize) -> Self {
        Self { center, radius }
    }

    pub fn n_particles(&self) -> usize {
        self.center.n
    }

    pub fn dim(&self) -> usize {
        self.center.d
    }

    pub fn lattice_box(&self) -> LatticeBox {
        let l = self.radius as i64;
        LatticeBox {
            n: self.center.n,
            d: self.center.d,
            lo: self.center.coords.iter().map(|c| c - l).collect(),
            hi: self.center.coords.iter().map(|c| c + l).collect(),
        }
    }

    /// `(2L+1)^{Nd}`.
    pub fn len(&self) -> usize {
        (2 * self.radius + 1).pow((self.center.n * self.center.d) as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: &Configuration) -> bool {
        self.center.same_shape(x).is_ok() && site_distance(&self.center.coords, &x.coords) <= self.radius as i64
    }

    /// Boundary layer `∂B_L(u) = { y in B_L(u) : |u - y| = L }`.
    pub fn boundary(&self) -> Vec<Configuration> {
        let l = self.radius as i64;
        self.lattice_box()
            .points()
            .filter(|y| site_distance(&self.center.coords, &y.coords) == l)
            .collect()
    }

    /// Box of single-particle sites covered by particle `j`'s projection.
    pub fn particle_box(&self, j: usize) -> SiteBox {
        let l = self.radius as i64;
        let p = self.center.particle(j);
        SiteBox { lo: p.iter().map(|c| c - l).collect(), hi: p.iter().map(|c| c + l).collect() }
    }
}

/// Axis-aligned box of single-particle sites in `Z^d` (inclusive bounds).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl SiteBox {
    pub fn contains_site(&self, s: &[i64]) -> bool {
        s.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (a, b))| a <= c && c <= b)
    }

    pub fn contains_box(&self, other: &SiteBox) -> bool {
        (0..self.lo.len()).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    pub fn intersects(&self, other: &SiteBox) -> bool {
        (0..self.lo.len()).all(|k| self.lo[k] <= other.hi[k] && other.lo[k] <= self.hi[k])
    }

    pub fn hull(&self, other: &SiteBox) -> SiteBox {
        SiteBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| *a.min(b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    /// Lattice max-norm diameter.
    pub fn diameter(&self) -> i64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).max().unwrap_or(0)
    }

    pub fn sites(&self) -> Vec<Site> {
        let b = LatticeBox { n: 1, d: self.lo.len(), lo: self.lo.clone(), hi: self.hi.clone() };
        b.points().map(|p| p.coords).collect()
    }
}

/// `|x - y|`: max over all `Nd` coordinate differences.
pub fn max_norm(x: &Configuration, y: &Configuration) -> Result<i64> {
    x.same_shape(y)?;
    Ok(site_distance(&x.coords, &y.coords))
}

/// Optimal particle relabelling for the symmetrized distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatch {
    pub distance: i64,
    /// Lexicographically smallest optimal `π`, with `(πx)_i = x_{π[i]}`.
    pub permutation: Vec<usize>,
}

/// Largest particle count handled by permutation enumeration.
pub const ENUMERATION_LIMIT: usize = 6;

/// `d_S(x, y) = min_π |πx - y|`. Enumerates permutations for `N <= 6`,
/// otherwise solves the bottleneck assignment.
pub fn sym_distance(x: &Configuration, y: &Configuration) -> Result<i64> {
    Ok(sym_match(x, y)?.distance)
}

pub fn sym_match(x: &Configuration, y: &Configuration) -> Result<SymMatch> {
    if x.n <= ENUMERATION_LIMIT {
        sym_match_enumerate(x, y)
    } else {
        sym_match_bottleneck(x, y)
    }
}

fn pair_costs(x: &Configuration, y: &Configuration) -> Vec<Vec<i64>> {
    // cost[i][j] = |x_j - y_i|: cost of putting particle j of x in slot i
    (0..y.n)
        .map(|i| (0..x.n).map(|j| site_distance(x.particle(j), y.particle(i))).collect())
        .collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exhaustive search over all `N!` permutations in lexicographic order.
pub fn sym_match_enumerate(x: &Configuration, y: &Configuration) -> Result<SymMatch> {
    x.same_shape(y)?;
    let cost = pair_costs(x, y);
    let mut perm: Vec<usize> = (0..x.n).collect();
    let mut best = SymMatch { distance: i64::MAX, permutation: perm.clone() };
    loop {
        let d = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).max().unwrap_or(0);
        if d < best.distance {
            best = SymMatch { distance: d, permutation: perm.clone() };
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best)
}

/// Kuhn augmenting-path matching restricted to `rows`/`free_cols`.
fn has_perfect_matching(allowed: &[Vec<bool>], rows: &[usize], free_cols: &[bool]) -> bool {
    let n_cols = free_cols.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n_cols];

    fn augment(
        r: usize,
        allowed: &[Vec<bool>],
        free_cols: &[bool],
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for c in 0..free_cols.len() {
            if free_cols[c] && allowed[r][c] && !seen[c] {
                seen[c] = true;
                if match_col[c].is_none_or(|r2| augment(r2, allowed, free_cols, seen, match_col)) {
                    match_col[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }

    rows.iter().all(|&r| {
        let mut seen = vec![false; n_cols];
        augment(r, allowed, free_cols, &mut seen, &mut match_col)
    })
}

/// Bottleneck assignment: binary search over the sorted pairwise distances
/// with a bipartite perfect-matching feasibility test.
pub fn sym_match_bottleneck(x: &Configuration, y: &Configuration) -> Result<SymMatch> {
    x.same_shape(y)?;
    let n = x.n;
    let cost = pair_costs(x, y);
    let mut levels: Vec<i64> = cost.iter().flatten().copied().collect();
    levels.sort_unstable();
    levels.dedup();

    let feasible = |t: i64| {
        let allowed: Vec<Vec<bool>> = cost.iter().map(|row| row.iter().map(|&c| c <= t).collect()).collect();
        let rows: Vec<usize> = (0..n).collect();
        has_perfect_matching(&allowed, &rows, &vec![true; n])
    };
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let t = levels[lo];

    // lexicographically smallest assignment achieving the bottleneck value
    let allowed: Vec<Vec<bool>> = cost.iter().map(|row| row.iter().map(|&c| c <= t).collect()).collect();
    let mut free = vec![true; n];
    let mut perm = Vec::with_capacity(n);
    for i in 0..n {
        let rest: Vec<usize> = (i + 1..n).collect();
        let j = (0..n)
            .find(|&j| {
                if !free[j] || !allowed[i][j] {
                    return false;
                }
                free[j] = false;
                let ok = has_perfect_matching(&allowed, &rest, &free);
                free[j] = true;
                ok
            })
            .expect("threshold admits a perfect matching");
        free[j] = false;
        perm.push(j);
    }
    Ok(SymMatch { distance: t, permutation: perm })
}

/// Hausdorff distance between the coordinate sets `Πx` and `Πy`.
pub fn hausdorff_distance(x: &Configuration, y: &Configuration) -> Result<i64> {
    if x.d != y.d {
        return Err(Error::DimensionMismatch(format!("d={} vs d={}", x.d, y.d)));
    }
    let directed = |a: &Configuration, b: &Configuration| {
        a.particles()
            .map(|p| b.particles().map(|q| site_distance(p, q)).min().unwrap())
            .max()
            .unwrap()
    };
    Ok(directed(x, y).max(directed(y, x)))
}

/// `diam Πu = max_{i != j} |u_i - u_j|`, zero for a single particle.
pub fn diam_projection(u: &Configuration) -> i64 {
    let mut best = 0;
    for i in 0..u.n {
        for j in i + 1..u.n {
            best = best.max(site_distance(u.particle(i), u.particle(j)));
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interaction {
    /// Weakly interactive: particle clusters far apart.
    Weak,
    /// Strongly interactive.
    Strong,
}

/// WI iff `diam Πu >= 3 N L`; single-particle cubes are SI.
pub fn classify_wi_si(cube: &Cube) -> Interaction {
    let n = cube.n_particles();
    if n < 2 {
        return Interaction::Strong;
    }
    if diam_projection(&cube.center) >= 3 * (n * cube.radius) as i64 {
        Interaction::Weak
    } else {
        Interaction::Strong
    }
}

/// Partition of particle indices of a weakly interactive cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WiSplit {
    /// Cluster containing particle 0 (0-based indices).
    pub cluster: Vec<usize>,
    pub rest: Vec<usize>,
    /// `min_{i in J, j not in J} |u_i - u_j|`.
    pub center_gap: i64,
}

impl WiSplit {
    /// Smallest inter-cluster particle distance over all configurations of the cube.
    pub fn min_gap_in_cube(&self, radius: usize) -> i64 {
        self.center_gap - 2 * radius as i64
    }
}

/// Splits the particles of a WI cube into the connected component of
/// particle 0 in the proximity graph `|u_i - u_j| <= 3L` and the rest.
pub fn wi_decompose(cube: &Cube) -> Result<WiSplit> {
    if classify_wi_si(cube) != Interaction::Weak {
        return Err(Error::NotWeaklyInteractive);
    }
    let u = &cube.center;
    let reach = 3 * cube.radius as i64;
    let mut in_cluster = vec![false; u.n];
    in_cluster[0] = true;
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        for j in 0..u.n {
            if !in_cluster[j] && site_distance(u.particle(i), u.particle(j)) <= reach {
                in_cluster[j] = true;
                stack.push(j);
            }
        }
    }
    let cluster: Vec<usize> = (0..u.n).filter(|&i| in_cluster[i]).collect();
    let rest: Vec<usize> = (0..u.n).filter(|&i| !in_cluster[i]).collect();
    debug_assert!(!rest.is_empty());
    let center_gap = cluster
        .iter()
        .flat_map(|&i| rest.iter().map(move |&j| (i, j)))
        .map(|(i, j)| site_distance(u.particle(i), u.particle(j)))
        .min()
        .unwrap();
    Ok(WiSplit { cluster, rest, center_gap })
}

/// Which cube of a pair carries the majority inside `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

/// Weak-separation certificate: the `majority` cube has the particles
/// `j1` inside `q`, the other cube has `j2`, `|j1| > |j2|`, and every other
/// particle projection misses `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub q: SiteBox,
    pub majority: Side,
    pub j1: Vec<usize>,
    pub j2: Vec<usize>,
}

impl Separation {
    pub fn diameter(&self) -> i64 {
        self.q.diameter()
    }

    /// Number of particles of the first/second cube that sit in `Q`.
    pub fn counts(&self) -> (usize, usize) {
        match self.majority {
            Side::First => (self.j1.len(), self.j2.len()),
            Side::Second => (self.j2.len(), self.j1.len()),
        }
    }
}

/// Indices of the particles whose projected ball lies in `q`, or `None` if
/// some projected ball straddles `q`.
fn inside_indices(cube: &Cube, q: &SiteBox) -> Option<Vec<usize>> {
    let mut inside = Vec::new();
    for j in 0..cube.n_particles() {
        let b = cube.particle_box(j);
        if q.contains_box(&b) {
            inside.push(j);
        } else if q.intersects(&b) {
            return None;
        }
    }
    Some(inside)
}

fn certify(cx: &Cube, cy: &Cube, q: &SiteBox) -> Option<Separation> {
    let jx = inside_indices(cx, q)?;
    let jy = inside_indices(cy, q)?;
    if jx.len() > jy.len() {
        Some(Separation { q: q.clone(), majority: Side::First, j1: jx, j2: jy })
    } else if jy.len() > jx.len() {
        Some(Separation { q: q.clone(), majority: Side::Second, j1: jy, j2: jx })
    } else {
        None
    }
}

fn subset_hull(cube: &Cube, mask: u64) -> SiteBox {
    let mut hull: Option<SiteBox> = None;
    for j in 0..cube.n_particles() {
        if mask >> j & 1 == 1 {
            let b = cube.particle_box(j);
            hull = Some(match hull {
                None => b,
                Some(h) => h.hull(&b),
            });
        }
    }
    hull.expect("nonempty subset")
}

/// Bounding boxes of the connected components of the overlap graph on all
/// `2N` projected balls.
fn component_hulls(cx: &Cube, cy: &Cube) -> Vec<SiteBox> {
    let boxes: Vec<SiteBox> = (0..cx.n_particles())
        .map(|j| cx.particle_box(j))
        .chain((0..cy.n_particles()).map(|j| cy.particle_box(j)))
        .collect();
    let m = boxes.len();
    let mut comp = vec![usize::MAX; m];
    let mut hulls = Vec::new();
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = hulls.len();
        comp[s] = id;
        let mut hull = boxes[s].clone();
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for b in 0..m {
                if comp[b] == usize::MAX && boxes[a].intersects(&boxes[b]) {
                    comp[b] = id;
                    hull = hull.hull(&boxes[b]);
                    stack.push(b);
                }
            }
        }
        hulls.push(hull);
    }
    hulls
}

/// Searches for a weak-separation certificate. Candidate boxes are the
/// bounding boxes of every nonempty subset of either cube's projected balls
/// and of the connected components of the joint overlap graph; the
/// candidate with the smallest diameter wins.
pub fn weakly_separated(cx: &Cube, cy: &Cube) -> Result<Option<Separation>> {
    if cx.radius != cy.radius {
        return Err(Error::InvalidArgument(format!("radii differ: {} vs {}", cx.radius, cy.radius)));
    }
    cx.center.same_shape(&cy.center)?;
    let n = cx.n_particles();
    if n > 20 {
        return Err(Error::InvalidArgument("subset search limited to N <= 20".into()));
    }
    let mut candidates = Vec::new();
    for cube in [cx, cy] {
        for mask in 1..(1u64 << n) {
            candidates.push(subset_hull(cube, mask));
        }
    }
    candidates.extend(component_hulls(cx, cy));

    let mut best: Option<Separation> = None;
    for q in &candidates {
        if let Some(sep) = certify(cx, cy, q) {
            if best.as_ref().is_none_or(|b| sep.diameter() < b.diameter()) {
                best = Some(sep);
            }
        }
    }
    Ok(best)
}

/// Re-checks a certificate against the cubes by interval arithmetic.
pub fn verify_separation(cx: &Cube, cy: &Cube, sep: &Separation) -> bool {
    let (maj, min) = match sep.majority {
        Side::First => (cx, cy),
        Side::Second => (cy, cx),
    };
    if sep.j1.len() <= sep.j2.len() {
        return false;
    }
    let ok = |cube: &Cube, inside: &[usize]| {
        (0..cube.n_particles()).all(|j| {
            let b = cube.particle_box(j);
            if inside.contains(&j) {
                sep.q.contains_box(&b)
            } else {
                !sep.q.intersects(&b)
            }
        })
    };
    ok(maj, &sep.j1) && ok(min, &sep.j2)
}

/// `Π Λ_{L+r0}(x) ∩ Π Λ_{L+r0}(y) = ∅` for two strongly interactive cubes.
pub fn scatterer_supports_disjoint(cx: &Cube, cy: &Cube, r0: usize) -> Result<bool> {
    cx.center.same_shape(&cy.center)?;
    if classify_wi_si(cx) == Interaction::Weak || classify_wi_si(cy) == Interaction::Weak {
        return Err(Error::NotStronglyInteractive);
    }
    let reach_x = (cx.radius + r0) as i64;
    let reach_y = (cy.radius + r0) as i64;
    let disjoint = cx.center.particles().all(|p| {
        cy.center
            .particles()
            .all(|q| site_distance(p, q) > reach_x + reach_y)
    });
    Ok(disjoint)
}
