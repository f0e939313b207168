//! Supported points in finite metric spaces: isolation radii, the
//! (delta, s)-supported predicate under two center-restricted modes, and
//! supported-point counting.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite metric space: either a point cloud in R^d or an explicit
/// distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FiniteMetric {
    Points { dim: usize, pts: Vec<Vec<f64>> },
    Matrix { dist: Vec<Vec<f64>> },
}

impl FiniteMetric {
    pub fn from_points(dim: usize, pts: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        for p in &pts {
            if p.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "point has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coordinate".into()));
            }
        }
        Ok(FiniteMetric::Points { dim, pts })
    }

    /// Validates symmetry and zero diagonal exactly; the triangle inequality
    /// is spot-checked on sampled triples.
    pub fn from_matrix(dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter("distance matrix must be square".into()));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidParameter("diagonal must be zero".into()));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidParameter("distances must be finite and >= 0".into()));
                }
                if d != dist[j][i] {
                    return Err(Error::InvalidParameter("distance matrix must be symmetric".into()));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x7f1e);
        let triples = if n <= 12 { n * n * n } else { 500 };
        for _ in 0..triples {
            let (i, j, k) = if n <= 12 {
                (rng.gen_range(0..n.max(1)), rng.gen_range(0..n.max(1)), rng.gen_range(0..n.max(1)))
            } else {
                (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))
            };
            if dist[i][k] > dist[i][j] + dist[j][k] + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "triangle inequality fails on ({i},{j},{k})"
                )));
            }
        }
        Ok(FiniteMetric::Matrix { dist })
    }

    pub fn len(&self) -> usize {
        match self {
            FiniteMetric::Points { pts, .. } => pts.len(),
            FiniteMetric::Matrix { dist } => dist.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self {
            FiniteMetric::Points { pts, .. } => euclidean(&pts[i], &pts[j]),
            FiniteMetric::Matrix { dist } => dist[i][j],
        }
    }

    /// Rescales every distance by t > 0.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter("scale must be positive and finite".into()));
        }
        Ok(match self {
            FiniteMetric::Points { dim, pts } => FiniteMetric::Points {
                dim: *dim,
                pts: pts.iter().map(|p| p.iter().map(|x| x * t).collect()).collect(),
            },
            FiniteMetric::Matrix { dist } => FiniteMetric::Matrix {
                dist: dist.iter().map(|row| row.iter().map(|x| x * t).collect()).collect(),
            },
        })
    }

    /// Point-cloud text format: "d n" header then n coordinate lines.
    pub fn to_point_cloud_text(&self) -> Result<String> {
        let FiniteMetric::Points { dim, pts } = self else {
            return Err(Error::InvalidParameter("not a point cloud".into()));
        };
        let mut out = String::new();
        let _ = writeln!(out, "{dim} {}", pts.len());
        for p in pts {
            let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        Ok(out)
    }

    pub fn from_point_cloud_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty point cloud".into()))?;
        let mut it = header.split_whitespace();
        let dim: usize = parse(it.next(), "dimension")?;
        let n: usize = parse(it.next(), "point count")?;
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated point cloud".into()))?;
            let p: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse("invalid coordinate".into())))
                .collect::<Result<_>>()?;
            pts.push(p);
        }
        FiniteMetric::from_points(dim, pts)
    }

    /// Distance-matrix text format: "n" then lower-triangle rows
    /// (row i lists d(i,0) .. d(i,i-1)).
    pub fn to_matrix_text(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        let _ = writeln!(out, "{n}");
        for i in 0..n {
            let line: Vec<String> = (0..i).map(|j| self.distance(i, j).to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_matrix_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix".into()))?;
        let n: usize = parse(Some(header.trim()), "size")?;
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated matrix".into()))?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse("invalid distance".into())))
                .collect::<Result<_>>()?;
            if row.len() != i {
                return Err(Error::Parse(format!("row {i} must have {i} entries")));
            }
            for (j, &d) in row.iter().enumerate() {
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        FiniteMetric::from_matrix(dist)
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what}")))
}

/// Distance to the nearest other point of the set.
pub fn isolation_radius(c: &FiniteMetric, w: usize) -> Result<f64> {
    let n = c.len();
    if w >= n {
        return Err(Error::VertexOutOfRange { vertex: w, count: n });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("isolation radius needs at least 2 points".into()));
    }
    Ok((0..n).filter(|&z| z != w).map(|z| c.distance(w, z)).fold(f64::INFINITY, f64::min))
}

/// The min over ambient centers p is bracketed by restricting p to the point
/// set: `Necessary` deletes balls of radius delta*rho (its failure proves
/// not-supported), `Sufficient` deletes balls of radius 2*delta*rho (its
/// success proves supported).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CenterMode {
    Necessary,
    Sufficient,
}

impl CenterMode {
    fn radius_factor(self) -> f64 {
        match self {
            CenterMode::Necessary => 1.0,
            CenterMode::Sufficient => 2.0,
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("delta must lie in (0,1)".into()));
    }
    Ok(())
}

/// Largest s for which w is (delta, s)-supported in the given mode:
/// min over centers p of |C intersect (B(w, rho/delta) minus B(p, r))|.
pub fn support_number(c: &FiniteMetric, w: usize, delta: f64, mode: CenterMode) -> Result<usize> {
    check_delta(delta)?;
    let rho = isolation_radius(c, w)?;
    let outer_r = rho / delta;
    let del_r = mode.radius_factor() * delta * rho;
    let n = c.len();
    match c {
        FiniteMetric::Points { pts, .. } => {
            let index = GridIndex::build(pts);
            let outer = index.within(pts, &pts[w], outer_r);
            // centers farther than outer_r + del_r from w delete nothing
            let centers = index.within(pts, &pts[w], outer_r + del_r);
            Ok(min_survivors_points(pts, &outer, &centers, del_r))
        }
        FiniteMetric::Matrix { .. } => {
            let outer: Vec<usize> = (0..n).filter(|&z| c.distance(w, z) <= outer_r).collect();
            let mut min_surv = usize::MAX;
            for p in 0..n {
                let surv = outer.iter().filter(|&&z| c.distance(p, z) > del_r).count();
                min_surv = min_surv.min(surv);
            }
            Ok(min_surv)
        }
    }
}

fn min_survivors_points(
    pts: &[Vec<f64>],
    outer: &[usize],
    centers: &[usize],
    del_r: f64,
) -> usize {
    let mut min_surv = outer.len();
    for &p in centers {
        let surv =
            outer.iter().filter(|&&z| euclidean(&pts[p], &pts[z]) > del_r).count();
        min_surv = min_surv.min(surv);
    }
    min_surv
}

pub fn is_supported(
    c: &FiniteMetric,
    w: usize,
    delta: f64,
    s: usize,
    mode: CenterMode,
) -> Result<bool> {
    if s < 1 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    Ok(support_number(c, w, delta, mode)? >= s)
}

/// Number of points of C that are (delta, s)-supported.
pub fn count_supported(
    c: &FiniteMetric,
    delta: f64,
    s: usize,
    mode: CenterMode,
) -> Result<usize> {
    let profile = support_profile(c, delta, mode)?;
    Ok(profile.iter().filter(|&&x| x >= s).count())
}

/// support_number of every point, so that counts for many s come cheap.
pub fn support_profile(c: &FiniteMetric, delta: f64, mode: CenterMode) -> Result<Vec<usize>> {
    (0..c.len()).map(|w| support_number(c, w, delta, mode)).collect()
}

/// The paradigmatic supported point: w with nearest neighbor at distance 1
/// and two well-separated clusters of s points each, all inside the outer
/// ball of w. Supported at level s even in the conservative sufficient mode.
/// Returns the point set and the index of w.
pub fn two_cluster_example(delta: f64, s: usize, dim: usize) -> Result<(FiniteMetric, usize)> {
    check_delta(delta)?;
    if s < 1 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    if dim < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    // clusters at distances la, lb on opposite sides of w along one axis,
    // each of radius delta/4; geometry works out only when the outermost
    // point still fits inside B(w, 1/delta) and no deletion ball of radius
    // 2*delta can touch both clusters
    let la = 1.0 + delta / 4.0;
    let lb = 1.0 + 3.0 * delta / 4.0;
    let outermost = lb + delta / 4.0;
    let inter_cluster = (la - delta / 4.0) + (lb - delta / 4.0);
    if outermost > 1.0 / delta || inter_cluster <= 4.0 * delta {
        return Err(Error::InvalidParameter(format!(
            "two-cluster geometry infeasible at delta = {delta}"
        )));
    }
    let axis = |x: f64| {
        let mut p = vec![0.0; dim];
        p[0] = x;
        p
    };
    let mut pts = vec![axis(0.0), axis(-1.0)];
    let spread = |center: f64, i: usize| {
        if s == 1 {
            center
        } else {
            center - delta / 4.0 + (i as f64) * (delta / 2.0) / (s as f64 - 1.0)
        }
    };
    for i in 0..s {
        pts.push(axis(spread(la, i)));
    }
    for i in 0..s {
        pts.push(axis(-spread(lb, i)));
    }
    Ok((FiniteMetric::from_points(dim, pts)?, 0))
}

/// Uniform grid over the bounding box for fixed-radius neighbor queries;
/// falls back to a full scan when the query radius spans too many cells.
struct GridIndex {
    dim: usize,
    cell: f64,
    origin: Vec<f64>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    size: usize,
}

impl GridIndex {
    fn build(pts: &[Vec<f64>]) -> Self {
        let dim = pts.first().map_or(1, |p| p.len());
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in pts {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let extent = (0..dim).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max).max(1e-9);
        let per_axis = (pts.len() as f64).powf(1.0 / dim as f64).ceil().max(1.0);
        let cell = extent / per_axis;
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            let key: Vec<i64> =
                (0..dim).map(|k| ((p[k] - lo[k]) / cell).floor() as i64).collect();
            cells.entry(key).or_default().push(i);
        }
        GridIndex { dim, cell, origin: lo, cells, size: pts.len() }
    }

    fn within(&self, pts: &[Vec<f64>], center: &[f64], r: f64) -> Vec<usize> {
        let span = (r / self.cell).ceil() as i64 + 1;
        let cell_budget = (2 * span + 1).pow(self.dim as u32);
        if cell_budget as usize > self.size {
            return (0..pts.len()).filter(|&i| euclidean(&pts[i], center) <= r).collect();
        }
        let base: Vec<i64> =
            (0..self.dim).map(|k| ((center[k] - self.origin[k]) / self.cell).floor() as i64).collect();
        let mut out = Vec::new();
        let mut offset = vec![-span; self.dim];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(members) = self.cells.get(&key) {
                for &i in members {
                    if euclidean(&pts[i], center) <= r {
                        out.push(i);
                    }
                }
            }
            // odometer over the offset hypercube
            let mut k = 0;
            loop {
                if k == self.dim {
                    return out;
                }
                offset[k] += 1;
                if offset[k] <= span {
                    break;
                }
                offset[k] = -span;
                k += 1;
            }
        }
    }
}
