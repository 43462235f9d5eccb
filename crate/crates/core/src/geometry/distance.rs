//! Obstacle descriptions and a first-order fast-marching distance field on `M`.
//!
//! The field lives on a Cartesian grid over a two-dimensional plane: either the slice
//! of a quotient with `n = 2` (anisotropic metric `g`), or the `(σ, ζ)` half-plane of an
//! axially symmetric reduction, where the metric is Euclidean. Marching uses the
//! 8-neighbour triangle stencil; a few Gauss–Seidel sweeps with the same local solver
//! repair causality violations that strong anisotropy introduces far from the axis.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use super::GroupSpec;
use crate::error::{Error, Result};

/// The removed set `M − Λ`, drawn in the plane of the reduction.
#[derive(Clone, Debug, PartialEq)]
pub enum Obstacle {
    /// Closed ball `|q − center| ≤ radius`.
    Ball { center: [f64; 2], radius: f64 },
    /// Closed polygon, counter-clockwise or clockwise.
    Polygon(Vec<[f64; 2]>),
}

/// An exterior domain together with the radii the existence results refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub obstacle: Obstacle,
    /// Radius of the smallest origin-centred ball containing the obstacle boundary.
    pub varrho: f64,
    /// Radius of the interior sphere condition, when known.
    pub inner_sphere_radius: Option<f64>,
}

impl DomainSpec {
    pub fn exterior_ball(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius {radius} must be positive")));
        }
        let varrho = center[0].hypot(center[1]) + radius;
        Ok(Self { obstacle: Obstacle::Ball { center, radius }, varrho, inner_sphere_radius: Some(radius) })
    }

    /// Origin-centred ball; its radius is both `ϱ` and the interior sphere radius.
    pub fn origin_ball(radius: f64) -> Result<Self> {
        Self::exterior_ball([0.0, 0.0], radius)
    }

    /// The unit circle at distance 5 from the axis: the projection of the helicoidal
    /// tube `Ψ(t, z)` for `λ = a = 1`.
    pub fn figure1() -> Self {
        Self {
            obstacle: Obstacle::Ball { center: [0.0, 5.0], radius: 1.0 },
            varrho: 6.0,
            inner_sphere_radius: None,
        }
    }

    pub fn custom(polygon: Vec<[f64; 2]>, inner_sphere_radius: Option<f64>) -> Result<Self> {
        if polygon.len() < 3 {
            return Err(Error::InvalidArgument("polygon needs at least 3 vertices".into()));
        }
        let varrho = polygon.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        Ok(Self { obstacle: Obstacle::Polygon(polygon), varrho, inner_sphere_radius })
    }

    /// Circle description `(center, radius)` when the obstacle is a ball.
    pub fn as_ball(&self) -> Option<([f64; 2], f64)> {
        match &self.obstacle {
            Obstacle::Ball { center, radius } => Some((*center, *radius)),
            Obstacle::Polygon(_) => None,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match &self.obstacle {
            Obstacle::Ball { center, radius } => (p[0] - center[0]).hypot(p[1] - center[1]) <= *radius,
            Obstacle::Polygon(poly) => winding_inside(poly, p),
        }
    }

    /// Boundary points spaced no more than `spacing` apart.
    pub fn boundary_samples(&self, spacing: f64) -> Vec<[f64; 2]> {
        match &self.obstacle {
            Obstacle::Ball { center, radius } => {
                let m = ((TAU * radius / spacing).ceil() as usize).max(256);
                (0..m)
                    .map(|l| {
                        let (s, c) = (TAU * l as f64 / m as f64).sin_cos();
                        [center[0] + radius * c, center[1] + radius * s]
                    })
                    .collect()
            }
            Obstacle::Polygon(poly) => {
                let mut out = Vec::new();
                for (idx, a) in poly.iter().enumerate() {
                    let b = poly[(idx + 1) % poly.len()];
                    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                    let m = ((len / spacing).ceil() as usize).max(1);
                    for l in 0..m {
                        let t = l as f64 / m as f64;
                        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                    }
                }
                out
            }
        }
    }

    /// Smallest feature size relevant for grid resolution checks.
    fn feature_size(&self) -> f64 {
        match &self.obstacle {
            Obstacle::Ball { radius, .. } => *radius,
            Obstacle::Polygon(poly) => (0..poly.len())
                .map(|l| {
                    let (a, b) = (poly[l], poly[(l + 1) % poly.len()]);
                    (b[0] - a[0]).hypot(b[1] - a[1])
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

fn winding_inside(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut inside = false;
    let m = poly.len();
    for l in 0..m {
        let (a, b) = (poly[l], poly[(l + m - 1) % m]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Which metric the plane carries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaneMetric {
    /// Slice of a quotient with `n = 2`.
    Quotient(GroupSpec),
    /// `(σ, ζ)` plane of an axially symmetric reduction.
    Euclidean,
}

impl PlaneMetric {
    /// Metric tensor `[g11, g12, g22]` at `p`.
    pub fn tensor(&self, p: [f64; 2]) -> [f64; 3] {
        match self {
            PlaneMetric::Euclidean => [1.0, 0.0, 1.0],
            PlaneMetric::Quotient(gs) => {
                let t = [gs.lambda * p[1], -gs.lambda * p[0]];
                let speed_sq = t[0] * t[0] + t[1] * t[1] + gs.a * gs.a;
                [1.0 - t[0] * t[0] / speed_sq, -t[0] * t[1] / speed_sq, 1.0 - t[1] * t[1] / speed_sq]
            }
        }
    }

    /// Inverse tensor `[g^11, g^12, g^22]`.
    pub fn inverse(&self, p: [f64; 2]) -> [f64; 3] {
        match self {
            PlaneMetric::Euclidean => [1.0, 0.0, 1.0],
            PlaneMetric::Quotient(gs) => {
                let t = [gs.lambda * p[1], -gs.lambda * p[0]];
                let a2 = gs.a * gs.a;
                [1.0 + t[0] * t[0] / a2, t[0] * t[1] / a2, 1.0 + t[1] * t[1] / a2]
            }
        }
    }

    fn length(&self, at: [f64; 2], v: [f64; 2]) -> f64 {
        let g = self.tensor(at);
        (g[0] * v[0] * v[0] + 2.0 * g[1] * v[0] * v[1] + g[2] * v[1] * v[1]).max(0.0).sqrt()
    }
}

/// A square Cartesian grid `x0 + h·ix`, `y0 + h·iy`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceGrid {
    pub metric: PlaneMetric,
    pub origin: [f64; 2],
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
}

impl DistanceGrid {
    /// Grid covering `[-half_width, half_width]²` with `nodes` nodes per axis.
    pub fn centered(metric: PlaneMetric, half_width: f64, nodes: usize) -> Self {
        let spacing = 2.0 * half_width / (nodes - 1) as f64;
        Self { metric, origin: [-half_width, -half_width], spacing, nx: nodes, ny: nodes }
    }

    pub fn point(&self, ix: usize, iy: usize) -> [f64; 2] {
        [self.origin[0] + self.spacing * ix as f64, self.origin[1] + self.spacing * iy as f64]
    }

    fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }
}

/// Discrete `d_M(·, ∂Λ)`; nodes inside the obstacle hold `NaN`.
#[derive(Clone, Debug)]
pub struct DistanceField {
    pub grid: DistanceGrid,
    pub values: Vec<f64>,
}

impl DistanceField {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(ix, iy)]
    }

    /// Bilinear interpolation; `None` when a corner lies inside the obstacle or off-grid.
    pub fn sample(&self, p: [f64; 2]) -> Option<f64> {
        let g = &self.grid;
        let snap = |x: f64| if (x - x.round()).abs() < 1e-9 { x.round() } else { x };
        let fx = snap((p[0] - g.origin[0]) / g.spacing);
        let fy = snap((p[1] - g.origin[1]) / g.spacing);
        if fx < 0.0 || fy < 0.0 || fx > (g.nx - 1) as f64 || fy > (g.ny - 1) as f64 {
            return None;
        }
        let (ix, iy) = ((fx.floor() as usize).min(g.nx - 2), (fy.floor() as usize).min(g.ny - 2));
        let (tx, ty) = (fx - ix as f64, fy - iy as f64);
        let mut v = 0.0;
        for (dx, dy, w) in [
            (0, 0, (1.0 - tx) * (1.0 - ty)),
            (1, 0, tx * (1.0 - ty)),
            (0, 1, (1.0 - tx) * ty),
            (1, 1, tx * ty),
        ] {
            if w > 0.0 {
                v += w * self.at(ix + dx, iy + dy);
            }
        }
        v.is_finite().then_some(v)
    }

    /// Central-difference gradient `(∂_x d, ∂_y d)` at an interior node, when the whole
    /// stencil lies in `Λ`.
    pub fn gradient(&self, ix: usize, iy: usize) -> Option<[f64; 2]> {
        let g = &self.grid;
        if ix == 0 || iy == 0 || ix + 1 >= g.nx || iy + 1 >= g.ny {
            return None;
        }
        let (e, w, n, s) = (self.at(ix + 1, iy), self.at(ix - 1, iy), self.at(ix, iy + 1), self.at(ix, iy - 1));
        if ![e, w, n, s, self.at(ix, iy)].iter().all(|v| v.is_finite()) {
            return None;
        }
        Some([(e - w) / (2.0 * g.spacing), (n - s) / (2.0 * g.spacing)])
    }

    /// `|∇d|_g` at an interior node.
    pub fn gradient_norm(&self, ix: usize, iy: usize) -> Option<f64> {
        let d = self.gradient(ix, iy)?;
        let gi = self.grid.metric.inverse(self.grid.point(ix, iy));
        Some((gi[0] * d[0] * d[0] + 2.0 * gi[1] * d[0] * d[1] + gi[2] * d[1] * d[1]).sqrt())
    }

    /// Largest value of `−H − ⟨∇d, J⟩_g` over interior nodes with `d ≥ min_distance`.
    ///
    /// Nonpositive up to discretisation error when the field is a distance function.
    pub fn drift_alignment_violation(&self, gs: &GroupSpec, min_distance: f64) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for iy in 1..self.grid.ny - 1 {
            for ix in 1..self.grid.nx - 1 {
                if !(self.at(ix, iy) >= min_distance) {
                    continue;
                }
                let Some(dd) = self.gradient(ix, iy) else { continue };
                let p = self.grid.point(ix, iy);
                let sigma = p[0].hypot(p[1]);
                let a2 = gs.a_coefficient(sigma).powi(2);
                let drift = [-a2 * p[0], -a2 * p[1]];
                let pairing = dd[0] * drift[0] + dd[1] * drift[1];
                worst = worst.max(-gs.orbit_curvature(sigma) - pairing);
            }
        }
        worst
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Far,
    Trial,
    Known,
    Excluded,
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on the tentative distance
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

const RING: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];

/// Fast-marching approximation of `d_M(·, ∂Λ)` on `grid`.
pub fn distance_field(domain: &DomainSpec, grid: &DistanceGrid) -> Result<DistanceField> {
    let h = grid.spacing;
    if grid.nx < 3 || grid.ny < 3 {
        return Err(Error::GridTooCoarse("need at least 3 nodes per axis".into()));
    }
    if domain.feature_size() < 2.0 * h {
        return Err(Error::GridTooCoarse(format!(
            "obstacle feature size {} is below two grid spacings ({h})",
            domain.feature_size()
        )));
    }
    let samples = domain.boundary_samples(h / 8.0);
    let lo = grid.origin;
    let hi = grid.point(grid.nx - 1, grid.ny - 1);
    if samples.iter().any(|b| b[0] <= lo[0] || b[1] <= lo[1] || b[0] >= hi[0] || b[1] >= hi[1]) {
        return Err(Error::InvalidArgument("obstacle boundary leaves the grid extent".into()));
    }

    let total = grid.nx * grid.ny;
    let mut values = vec![f64::INFINITY; total];
    let mut status = vec![Status::Far; total];
    let mut seeded = vec![false; total];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if domain.contains(grid.point(ix, iy)) {
                status[grid.index(ix, iy)] = Status::Excluded;
            }
        }
    }
    // nodes of Λ touching an excluded node get a direct metric distance to the samples
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let idx = grid.index(ix, iy);
            if status[idx] == Status::Excluded {
                continue;
            }
            let touches = RING.iter().any(|(dx, dy)| {
                neighbor(grid, ix, iy, *dx, *dy).is_some_and(|nb| status[nb] == Status::Excluded)
            });
            if touches {
                let p = grid.point(ix, iy);
                let d = samples
                    .iter()
                    .map(|b| {
                        let mid = [(p[0] + b[0]) / 2.0, (p[1] + b[1]) / 2.0];
                        grid.metric.length(mid, [p[0] - b[0], p[1] - b[1]])
                    })
                    .fold(f64::INFINITY, f64::min);
                values[idx] = d;
                status[idx] = Status::Known;
                seeded[idx] = true;
            }
        }
    }

    let mut heap = BinaryHeap::new();
    let push_neighbors = |ix: usize,
                          iy: usize,
                          values: &mut Vec<f64>,
                          status: &mut Vec<Status>,
                          heap: &mut BinaryHeap<HeapEntry>| {
        for (dx, dy) in RING {
            let Some(nb) = neighbor(grid, ix, iy, dx, dy) else { continue };
            if matches!(status[nb], Status::Known | Status::Excluded) {
                continue;
            }
            let (nx, ny) = (nb % grid.nx, nb / grid.nx);
            let cand = local_update(grid, values, status, nx, ny, false);
            if cand < values[nb] {
                values[nb] = cand;
                status[nb] = Status::Trial;
                heap.push(HeapEntry(cand, nb));
            }
        }
    };
    for idx in (0..total).filter(|&idx| seeded[idx]) {
        push_neighbors(idx % grid.nx, idx / grid.nx, &mut values, &mut status, &mut heap);
    }
    while let Some(HeapEntry(d, idx)) = heap.pop() {
        if status[idx] == Status::Known || d > values[idx] {
            continue;
        }
        status[idx] = Status::Known;
        push_neighbors(idx % grid.nx, idx / grid.nx, &mut values, &mut status, &mut heap);
    }

    // Gauss–Seidel sweeps in the four diagonal orders
    for _ in 0..50 {
        let mut change: f64 = 0.0;
        for order in 0..4 {
            for a in 0..grid.ny {
                let iy = if order & 1 == 0 { a } else { grid.ny - 1 - a };
                for b in 0..grid.nx {
                    let ix = if order & 2 == 0 { b } else { grid.nx - 1 - b };
                    let idx = grid.index(ix, iy);
                    if seeded[idx] || status[idx] == Status::Excluded {
                        continue;
                    }
                    let cand = local_update(grid, &values, &status, ix, iy, true);
                    if cand < values[idx] {
                        change = change.max(values[idx] - cand);
                        values[idx] = cand;
                    }
                }
            }
        }
        if change < 1e-13 {
            break;
        }
    }

    for (v, s) in values.iter_mut().zip(&status) {
        if *s == Status::Excluded {
            *v = f64::NAN;
        }
    }
    Ok(DistanceField { grid: grid.clone(), values })
}

fn neighbor(grid: &DistanceGrid, ix: usize, iy: usize, dx: i64, dy: i64) -> Option<usize> {
    let x = ix as i64 + dx;
    let y = iy as i64 + dy;
    (x >= 0 && y >= 0 && (x as usize) < grid.nx && (y as usize) < grid.ny).then(|| grid.index(x as usize, y as usize))
}

/// Smallest triangle-stencil update at `(ix, iy)`. During marching only known
/// neighbours contribute; during sweeps any finite neighbour does.
fn local_update(grid: &DistanceGrid, values: &[f64], status: &[Status], ix: usize, iy: usize, any_finite: bool) -> f64 {
    let usable = |nb: usize| -> Option<f64> {
        let ok = if any_finite { status[nb] != Status::Excluded } else { status[nb] == Status::Known };
        (ok && values[nb].is_finite()).then_some(values[nb])
    };
    let p = grid.point(ix, iy);
    let g = grid.metric.tensor(p);
    let h = grid.spacing;
    let quad = |v: [f64; 2]| g[0] * v[0] * v[0] + 2.0 * g[1] * v[0] * v[1] + g[2] * v[1] * v[1];
    let mut best = f64::INFINITY;
    for slot in 0..8 {
        let (da, db) = (RING[slot], RING[(slot + 1) % 8]);
        let ua = neighbor(grid, ix, iy, da.0, da.1).and_then(usable);
        let ub = neighbor(grid, ix, iy, db.0, db.1).and_then(usable);
        // offsets from the neighbour to the node
        let ea = [-(da.0 as f64) * h, -(da.1 as f64) * h];
        let eb = [-(db.0 as f64) * h, -(db.1 as f64) * h];
        match (ua, ub) {
            (Some(ua), Some(ub)) => best = best.min(triangle_update(ua, ub, ea, eb, &quad)),
            (Some(ua), None) => best = best.min(ua + quad(ea).sqrt()),
            (None, Some(ub)) => best = best.min(ub + quad(eb).sqrt()),
            (None, None) => {}
        }
    }
    best
}

/// `min_{μ∈[0,1]} (1−μ)u_a + μ u_b + |e_a + μ(e_b − e_a)|_g`, where `e_a`, `e_b` point
/// from the two neighbours to the node.
fn triangle_update(ua: f64, ub: f64, ea: [f64; 2], eb: [f64; 2], quad: &dyn Fn([f64; 2]) -> f64) -> f64 {
    let delta = [eb[0] - ea[0], eb[1] - ea[1]];
    let du = ub - ua;
    let value = |mu: f64| {
        let e = [ea[0] + mu * delta[0], ea[1] + mu * delta[1]];
        ua + mu * du + quad(e).max(0.0).sqrt()
    };
    let mut best = value(0.0).min(value(1.0));
    // stationary points of the convex objective
    let a = quad(ea);
    let c = quad(delta);
    let b = {
        let s = [ea[0] + delta[0], ea[1] + delta[1]];
        (quad(s) - a - c) / 2.0
    };
    // d/dμ: du + (b + cμ)/sqrt(a + 2bμ + cμ²) = 0
    let qa = c * (c - du * du);
    let qb = 2.0 * b * (c - du * du);
    let qc = b * b - du * du * a;
    let mut roots = Vec::with_capacity(2);
    if qa.abs() > 1e-300 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            roots.push((-qb + sq) / (2.0 * qa));
            roots.push((-qb - sq) / (2.0 * qa));
        }
    } else if qb.abs() > 1e-300 {
        roots.push(-qc / qb);
    }
    for mu in roots {
        if (0.0..=1.0).contains(&mu) {
            best = best.min(value(mu));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_ball_distance_is_radial() {
        let gs = GroupSpec::standard(1.0, 1.0, 2).unwrap();
        let grid = DistanceGrid::centered(PlaneMetric::Quotient(gs), 4.0, 161);
        let dom = DomainSpec::origin_ball(1.0).unwrap();
        let field = distance_field(&dom, &grid).unwrap();
        let d = field.sample([3.0, 0.0]).unwrap();
        assert!((d - 2.0).abs() < 5.0 * grid.spacing, "d = {d}");
        let d2 = field.sample([0.0, -2.5]).unwrap();
        assert!((d2 - 1.5).abs() < 5.0 * grid.spacing, "d = {d2}");
    }

    #[test]
    fn distance_vanishes_on_boundary() {
        let grid = DistanceGrid::centered(PlaneMetric::Euclidean, 3.0, 121);
        let dom = DomainSpec::origin_ball(1.0).unwrap();
        let field = distance_field(&dom, &grid).unwrap();
        // boundary crossing along the x axis lies between two nodes; interpolate to it
        let d = field.sample([1.0 + grid.spacing, 0.0]).unwrap();
        assert!(d.abs() < 2.0 * grid.spacing);
    }

    #[test]
    fn coarse_grid_is_diagnosed() {
        let grid = DistanceGrid::centered(PlaneMetric::Euclidean, 10.0, 11);
        let dom = DomainSpec::origin_ball(1.0).unwrap();
        assert!(matches!(distance_field(&dom, &grid), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn polygon_inside_test() {
        let dom = DomainSpec::custom(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]], None).unwrap();
        assert!(dom.contains([0.2, 0.3]));
        assert!(!dom.contains([1.2, 0.3]));
        assert!((dom.varrho - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn figure1_through_center_ray() {
        let gs = GroupSpec::standard(1.0, 1.0, 2).unwrap();
        let grid = DistanceGrid::centered(PlaneMetric::Quotient(gs), 9.0, 181);
        let field = distance_field(&DomainSpec::figure1(), &grid).unwrap();
        let d = field.sample([0.0, 7.0]).unwrap();
        assert!(d <= 1.0 + 2.0 * grid.spacing && d > 0.5, "d = {d}");
    }
}
