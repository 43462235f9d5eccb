//! Flux-form finite-volume discretisation of the reduced operator
//!
//! `𝔐(v) = ω⁻¹ ∂_α(ω G^{αβ} ∂_β v / W) − ⟨∇v, J⟩ / W`,  `W = sqrt(1 + G^{αβ} ∂_α v ∂_β v)`,
//!
//! in the logical coordinates of a [`Grid`]. Rows are integrated over node-centred
//! control volumes; the two `s`-boundary rows carry Dirichlet data.

use super::grid::{Grid, LogicalGeometry, Reduction};

/// Up to six nodes with the coefficients of `(p_s, p_θ)` in each.
#[derive(Clone, Copy, Default)]
struct Stencil {
    len: usize,
    idx: [usize; 6],
    cs: [f64; 6],
    ct: [f64; 6],
}

impl Stencil {
    fn push(&mut self, idx: usize, cs: f64, ct: f64) {
        self.idx[self.len] = idx;
        self.cs[self.len] = cs;
        self.ct[self.len] = ct;
        self.len += 1;
    }

    fn gradient(&self, v: &[f64]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for l in 0..self.len {
            p[0] += self.cs[l] * v[self.idx[l]];
            p[1] += self.ct[l] * v[self.idx[l]];
        }
        p
    }
}

struct Face {
    geo: LogicalGeometry,
    /// Which flux component crosses the face: 0 for `s`, 1 for `θ`.
    dir: usize,
    /// Face measure (logical length times orientation is applied by the caller).
    length: f64,
    stencil: Stencil,
}

struct Cell {
    geo: LogicalGeometry,
    volume: f64,
    stencil: Stencil,
}

/// Precomputed discretisation of `𝔐` on a grid.
pub struct ReducedOperator {
    pub grid: Grid,
    /// `s`-faces indexed by `k * (ns − 1) + i`, between nodes `i` and `i + 1`.
    s_faces: Vec<Face>,
    /// `θ`-faces indexed by `k * ns + i`, between columns `k` and `k + 1`.
    t_faces: Vec<Option<Face>>,
    cells: Vec<Cell>,
}

/// The linearisation of the discrete operator as `(row, col, value)` triplets with
/// duplicates already summed; the pattern depends only on the grid.
pub struct Linearisation {
    pub residual: Vec<f64>,
    pub entries: Vec<(usize, usize, f64)>,
}

fn metric_apply(g: &[f64; 3], p: [f64; 2]) -> [f64; 2] {
    [g[0] * p[0] + g[1] * p[1], g[1] * p[0] + g[2] * p[1]]
}

impl ReducedOperator {
    pub fn new(grid: &Grid) -> Self {
        let grid = grid.clone();
        let (ns, nt, ds, dt) = (grid.ns, grid.nt, grid.ds, grid.dtheta);
        let radial = grid.spec.reduction == Reduction::Radial;

        let mut s_faces = Vec::with_capacity((ns - 1) * nt);
        for k in 0..nt {
            let (lo, hi) = grid.theta_cell(k);
            let theta = grid.theta_at(k) + 0.5 * (lo + hi);
            let (km, kp) = (neighbour(&grid, k, -1), neighbour(&grid, k, 1));
            for i in 0..ns - 1 {
                let mut st = Stencil::default();
                st.push(grid.index(i + 1, k), 1.0 / ds, 0.0);
                st.push(grid.index(i, k), -1.0 / ds, 0.0);
                if !radial && km != kp {
                    let c = 1.0 / (4.0 * dt);
                    for ii in [i, i + 1] {
                        st.push(grid.index(ii, kp), 0.0, c);
                        st.push(grid.index(ii, km), 0.0, -c);
                    }
                }
                s_faces.push(Face {
                    geo: grid.geometry((i as f64 + 0.5) * ds, theta),
                    dir: 0,
                    length: if radial { 1.0 } else { hi - lo },
                    stencil: st,
                });
            }
        }

        let mut t_faces = Vec::with_capacity(ns * nt);
        for k in 0..nt {
            let has_face = !radial && (grid.periodic() || k + 1 < nt);
            let kn = (k + 1) % nt;
            for i in 0..ns {
                if !has_face || i == 0 || i + 1 == ns {
                    t_faces.push(None);
                    continue;
                }
                let mut st = Stencil::default();
                st.push(grid.index(i, kn), 0.0, 1.0 / dt);
                st.push(grid.index(i, k), 0.0, -1.0 / dt);
                let c = 1.0 / (4.0 * ds);
                for kk in [k, kn] {
                    st.push(grid.index(i + 1, kk), c, 0.0);
                    st.push(grid.index(i - 1, kk), -c, 0.0);
                }
                t_faces.push(Some(Face {
                    geo: grid.geometry(grid.s_at(i), (k as f64 + 0.5) * dt),
                    dir: 1,
                    length: ds,
                    stencil: st,
                }));
            }
        }

        let mut cells = Vec::with_capacity(ns * nt);
        for k in 0..nt {
            let (lo, hi) = grid.theta_cell(k);
            let theta = grid.theta_at(k) + 0.5 * (lo + hi);
            let (km, kp) = (neighbour(&grid, k, -1), neighbour(&grid, k, 1));
            for i in 0..ns {
                let mut st = Stencil::default();
                if i > 0 && i + 1 < ns {
                    st.push(grid.index(i + 1, k), 1.0 / (2.0 * ds), 0.0);
                    st.push(grid.index(i - 1, k), -1.0 / (2.0 * ds), 0.0);
                    if !radial && km != kp {
                        st.push(grid.index(i, kp), 0.0, 1.0 / (2.0 * dt));
                        st.push(grid.index(i, km), 0.0, -1.0 / (2.0 * dt));
                    }
                }
                let geo = grid.geometry(grid.s_at(i), theta);
                let width = if radial { 1.0 } else { hi - lo };
                cells.push(Cell { volume: geo.omega * ds * width, geo, stencil: st });
            }
        }
        Self { grid, s_faces, t_faces, cells }
    }

    fn is_dirichlet(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.grid.ns
    }

    /// Control-volume measure `∫ ω_L` of node `(i, k)`.
    pub fn cell_volume(&self, i: usize, k: usize) -> f64 {
        self.cells[self.grid.index(i, k)].volume
    }

    fn flux(face: &Face, v: &[f64]) -> (f64, [f64; 2]) {
        let g = &face.geo.inv_metric;
        let p = face.stencil.gradient(v);
        let q = metric_apply(g, p);
        let w = (1.0 + p[0] * q[0] + p[1] * q[1]).sqrt();
        let d = face.dir;
        let omega = face.geo.omega * face.length;
        let flux = omega * q[d] / w;
        let w3 = w * w * w;
        let gd = if d == 0 { [g[0], g[1]] } else { [g[1], g[2]] };
        let dfdp = [omega * (gd[0] / w - q[d] * q[0] / w3), omega * (gd[1] / w - q[d] * q[1] / w3)];
        (flux, dfdp)
    }

    fn drift(cell: &Cell, v: &[f64]) -> (f64, [f64; 2]) {
        if cell.stencil.len == 0 {
            return (0.0, [0.0; 2]);
        }
        let g = &cell.geo.inv_metric;
        let d = cell.geo.drift;
        let p = cell.stencil.gradient(v);
        let q = metric_apply(g, p);
        let w = (1.0 + p[0] * q[0] + p[1] * q[1]).sqrt();
        let pd = p[0] * d[0] + p[1] * d[1];
        let vol = cell.volume;
        let w3 = w * w * w;
        (-vol * pd / w, [vol * (-d[0] / w + pd * q[0] / w3), vol * (-d[1] / w + pd * q[1] / w3)])
    }

    /// Integrated residual with Dirichlet rows `v − data`.
    pub fn residual(&self, v: &[f64], inner: f64, outer: f64) -> Vec<f64> {
        self.assemble(v, inner, outer, false).residual
    }

    /// Residual and Jacobian.
    pub fn linearise(&self, v: &[f64], inner: f64, outer: f64) -> Linearisation {
        self.assemble(v, inner, outer, true)
    }

    fn assemble(&self, v: &[f64], inner: f64, outer: f64, jac: bool) -> Linearisation {
        let g = &self.grid;
        let (ns, nt) = (g.ns, g.nt);
        let mut res = vec![0.0; g.len()];
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();

        // outward flux: + on the node behind the face, − on the node ahead
        let mut add_face = |face: &Face, behind: Option<usize>, ahead: Option<usize>, res: &mut Vec<f64>| {
            let (f, dfdp) = Self::flux(face, v);
            if let Some(r) = behind {
                res[r] += f;
            }
            if let Some(r) = ahead {
                res[r] -= f;
            }
            if jac {
                let st = &face.stencil;
                for l in 0..st.len {
                    let dv = dfdp[0] * st.cs[l] + dfdp[1] * st.ct[l];
                    if let Some(r) = behind {
                        entries.push((r, st.idx[l], dv));
                    }
                    if let Some(r) = ahead {
                        entries.push((r, st.idx[l], -dv));
                    }
                }
            }
        };

        for k in 0..nt {
            for i in 0..ns - 1 {
                let face = &self.s_faces[k * (ns - 1) + i];
                let behind = (!self.is_dirichlet(i)).then(|| g.index(i, k));
                let ahead = (!self.is_dirichlet(i + 1)).then(|| g.index(i + 1, k));
                add_face(face, behind, ahead, &mut res);
            }
        }
        for k in 0..nt {
            let kn = (k + 1) % nt;
            for i in 1..ns - 1 {
                if let Some(face) = &self.t_faces[k * ns + i] {
                    add_face(face, Some(g.index(i, k)), Some(g.index(i, kn)), &mut res);
                }
            }
        }

        for k in 0..nt {
            for i in 1..ns - 1 {
                let row = g.index(i, k);
                let cell = &self.cells[row];
                let (d, dddp) = Self::drift(cell, v);
                res[row] += d;
                if jac {
                    let st = &cell.stencil;
                    for l in 0..st.len {
                        entries.push((row, st.idx[l], dddp[0] * st.cs[l] + dddp[1] * st.ct[l]));
                    }
                }
            }
            for (i, data) in [(0, inner), (ns - 1, outer)] {
                let row = g.index(i, k);
                res[row] = v[row] - data;
                if jac {
                    entries.push((row, row, 1.0));
                }
            }
        }

        if jac {
            entries.sort_unstable_by_key(|e| (e.1, e.0));
            let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len() / 2);
            for e in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == e.0 && last.1 == e.1 => last.2 += e.2,
                    _ => merged.push(e),
                }
            }
            entries = merged;
        }
        Linearisation { residual: res, entries }
    }

    /// Pointwise residual `R / |cell|` at interior nodes, zero on Dirichlet rows.
    pub fn pointwise_residual(&self, v: &[f64]) -> Vec<f64> {
        let r = self.residual(v, 0.0, 0.0);
        let g = &self.grid;
        let mut out = vec![0.0; g.len()];
        for k in 0..g.nt {
            for i in 1..g.ns - 1 {
                let row = g.index(i, k);
                out[row] = r[row] / self.cells[row].volume;
            }
        }
        out
    }

    /// For radial grids, the discrete flux `τ^{n−1} v'/W` through the first face; at a
    /// converged solution it is the same through every face.
    pub fn radial_flux(&self, v: &[f64]) -> Option<f64> {
        (self.grid.spec.reduction == Reduction::Radial).then(|| Self::flux(&self.s_faces[0], v).0)
    }

    /// Sum of the interior residuals, equal to the net boundary flux plus the integrated
    /// drift term (discrete divergence theorem).
    pub fn conservation_defect(&self, v: &[f64]) -> f64 {
        let g = &self.grid;
        let r = self.residual(v, 0.0, 0.0);
        let mut interior = 0.0;
        let mut drift = 0.0;
        for k in 0..g.nt {
            for i in 1..g.ns - 1 {
                let row = g.index(i, k);
                interior += r[row];
                drift += Self::drift(&self.cells[row], v).0;
            }
        }
        // boundary fluxes through the first and last s-faces
        let mut boundary = 0.0;
        for k in 0..g.nt {
            boundary += Self::flux(&self.s_faces[k * (g.ns - 1) + g.ns - 2], v).0;
            boundary -= Self::flux(&self.s_faces[k * (g.ns - 1)], v).0;
        }
        interior - boundary - drift
    }
}

/// Column index `k + offset`, wrapped for periodic grids and reflected at symmetry ends.
pub(crate) fn neighbour(grid: &Grid, k: usize, offset: isize) -> usize {
    let nt = grid.nt as isize;
    let kk = k as isize + offset;
    if nt == 1 {
        return 0;
    }
    if grid.periodic() {
        kk.rem_euclid(nt) as usize
    } else if kk < 0 {
        (-kk) as usize
    } else if kk >= nt {
        (2 * (nt - 1) - kk) as usize
    } else {
        kk as usize
    }
}
