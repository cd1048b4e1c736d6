//! Numerical checks of the curvature identities behind the forms.
//!
//! Tensors live on a finite frame and are stored densely. Conventions:
//! `Rm(X, Y, Z, W) = ⟨R(X, Y)Z, W⟩` with `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`,
//! so the sectional curvature of an orthonormal pair is `Rm(e₁, e₂, e₂, e₁)`
//! and `Ric(e₁, e₁) = Σⱼ Rm(e₁, eⱼ, eⱼ, e₁)`.
//!
//! The conformal metric is `Ḡ = r⁻²G` on `ℝᴺ \ {0}`; a `Ḡ`-orthonormal frame
//! is `ēₐ = r·eₐ` for a Euclidean orthonormal frame `eₐ`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric bilinear form on a `dim`-dimensional frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SymBilinear {
    dim: usize,
    m: Vec<f64>,
}

impl SymBilinear {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let m: Vec<f64> = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        let s = SymBilinear { dim, m };
        for i in 0..dim {
            for j in i + 1..dim {
                if s.get(i, j) != s.get(j, i) {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(s)
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let m = (0..dim * dim).map(|k| if k / dim == k % dim { c } else { 0.0 }).collect();
        SymBilinear { dim, m }
    }

    /// `v ⊗ v`.
    pub fn outer(v: &[f64]) -> Self {
        let dim = v.len();
        let m = (0..dim * dim).map(|k| v[k / dim] * v[k % dim]).collect();
        SymBilinear { dim, m }
    }

    /// Entries uniform in `[−scale, scale]`, mirrored across the diagonal.
    pub fn random(dim: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = rng.random_range(-scale..=scale);
                m[i * dim + j] = v;
                m[j * dim + i] = v;
            }
        }
        SymBilinear { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.m.iter().map(|x| x * x).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymBilinear { dim: self.dim, m: self.m.iter().map(|x| c * x).collect() }
    }

    fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

/// `(0,4)` tensor on a `dim`-dimensional frame.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvTensor {
    dim: usize,
    data: Vec<f64>,
}

impl CurvTensor {
    pub fn zeros(dim: usize) -> Self {
        CurvTensor { dim, data: vec![0.0; dim.pow(4)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let ix = self.idx(i, j, k, l);
        self.data[ix] = v;
    }

    pub fn add_scaled(&mut self, other: &CurvTensor, s: f64) -> Result<()> {
        check_dims(self.dim, other.dim)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        CurvTensor { dim: self.dim, data: self.data.iter().map(|x| s * x).collect() }
    }

    pub fn max_abs_diff(&self, other: &CurvTensor) -> Result<f64> {
        check_dims(self.dim, other.dim)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn ricci(&self, i: usize, j: usize) -> f64 {
        (0..self.dim).map(|k| self.get(i, k, k, j)).sum()
    }

    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        self.get(i, j, j, i)
    }

    /// `Ric(e₁, e₁) + Ric(e₂, e₂) − R(e₁, e₂, e₂, e₁)`.
    pub fn bi_ricci(&self, i: usize, j: usize) -> f64 {
        self.ricci(i, i) + self.ricci(j, j) - self.sectional(i, j)
    }

    /// Largest violation of the pair symmetries
    /// `R(i,j,k,l) = −R(j,i,k,l) = −R(i,j,l,k) = R(k,l,i,j)`.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest violation of `R(i,j,k,l) + R(j,k,i,l) + R(k,i,j,l) = 0`.
    pub fn bianchi_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let s = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Components `R(f_a, f_b, f_c, f_d)` for frame vectors `f` given in the
    /// current coordinates.
    pub fn in_frame(&self, frame: &[Vec<f64>]) -> Result<CurvTensor> {
        let d = self.dim;
        let m = frame.len();
        for f in frame {
            check_dims(d, f.len())?;
        }
        // Contract one slot at a time: the slot being replaced moves to the
        // front, so four passes restore the original slot order.
        let mut cur = self.data.clone();
        let mut dims = [d, d, d, d];
        for _ in 0..4 {
            let rest: usize = dims[1..].iter().product();
            let mut next = vec![0.0; rest * m];
            for (a, f) in frame.iter().enumerate() {
                for (i, fi) in f.iter().enumerate() {
                    if *fi == 0.0 {
                        continue;
                    }
                    for r in 0..rest {
                        // New layout: remaining slots first, new slot last.
                        next[r * m + a] += fi * cur[i * rest + r];
                    }
                }
            }
            cur = next;
            dims = [dims[1], dims[2], dims[3], m];
        }
        Ok(CurvTensor { dim: m, data: cur })
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Kulkarni–Nomizu product
/// `(S∧T)(X,Y,Z,W) = S(X,W)T(Y,Z) + S(Y,Z)T(X,W) − S(X,Z)T(Y,W) − S(Y,W)T(X,Z)`.
pub fn kn_product(s: &SymBilinear, t: &SymBilinear) -> Result<CurvTensor> {
    check_dims(s.dim, t.dim)?;
    let d = s.dim;
    let mut out = CurvTensor::zeros(d);
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    let v = s.get(x, w) * t.get(y, z) + s.get(y, z) * t.get(x, w)
                        - s.get(x, z) * t.get(y, w)
                        - s.get(y, w) * t.get(x, z);
                    out.set(x, y, z, w, v);
                }
            }
        }
    }
    Ok(out)
}

/// Sum of `terms` Kulkarni–Nomizu products of random symmetric forms; has
/// every algebraic curvature symmetry by construction.
pub fn random_curvature(dim: usize, terms: usize, rng: &mut impl Rng) -> CurvTensor {
    let mut out = CurvTensor::zeros(dim);
    for _ in 0..terms {
        let s = SymBilinear::random(dim, 1.0, rng);
        let t = SymBilinear::random(dim, 1.0, rng);
        let kn = kn_product(&s, &t).expect("equal dimensions");
        out.add_scaled(&kn, 1.0).expect("equal dimensions");
    }
    out
}

// ---------------------------------------------------------------------------
// Vectors and frames

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

fn scale(u: &[f64], c: f64) -> Vec<f64> {
    u.iter().map(|x| c * x).collect()
}

/// Gram–Schmidt on `seeds`, skipping nearly dependent vectors, until `count`
/// vectors orthogonal to `against` (already orthonormal) are collected.
fn orthonormal_completion(against: &[Vec<f64>], seeds: impl IntoIterator<Item = Vec<f64>>, count: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = against.to_vec();
    let mut out = Vec::with_capacity(count);
    for mut v in seeds {
        if out.len() == count {
            break;
        }
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv < 1e-6 {
            continue;
        }
        let v = scale(&v, 1.0 / nv);
        basis.push(v.clone());
        out.push(v);
    }
    out
}

fn standard_basis(dim: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..dim).map(move |i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
}

fn random_vector(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Euclidean orthonormal frame whose first vector is `p/|p|`.
pub fn radial_frame(p: &[f64]) -> Vec<Vec<f64>> {
    let first = scale(p, 1.0 / norm(p));
    let mut frame = vec![first.clone()];
    frame.extend(orthonormal_completion(&[first], standard_basis(p.len()), p.len() - 1));
    frame
}

/// Random Euclidean orthonormal frame.
pub fn random_frame(dim: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let seeds: Vec<Vec<f64>> = (0..4 * dim).map(|_| random_vector(dim, rng)).collect();
    orthonormal_completion(&[], seeds, dim)
}

/// `count` seeded points with coordinates in `[−2, 2]` and `|p| ≥ 1/2`.
pub fn random_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        if norm(&p) >= 0.5 {
            out.push(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Conformal curvature

/// Default relative finite-difference step, as a fraction of `|p|`.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Largest accepted relative step; nested central differences reach `2h`
/// from the point.
pub const MAX_FD_STEP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Step as a fraction of `|p|`.
    pub step_rel: f64,
    /// Combine steps `h` and `h/2` as `(4R(h/2) − R(h))/3`.
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { step_rel: DEFAULT_FD_STEP, richardson: true }
    }
}

/// Coordinate components of `Ḡ = r⁻²G`.
pub fn conformal_metric(p: &[f64]) -> DMatrix<f64> {
    let r2 = dot(p, p);
    DMatrix::identity(p.len(), p.len()) / r2
}

type Christoffel = Vec<f64>; // gamma[(k * d + i) * d + j] = Γᵏᵢⱼ

fn shifted(p: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[axis] += delta;
    q
}

fn fd_christoffel(metric: &impl Fn(&[f64]) -> DMatrix<f64>, p: &[f64], h: f64) -> Christoffel {
    let d = p.len();
    let g = metric(p);
    let g_inv = g.clone().try_inverse().expect("metric is invertible away from the origin");
    // dg[l] = ∂_l g
    let dg: Vec<DMatrix<f64>> = (0..d)
        .map(|l| (metric(&shifted(p, l, h)) - metric(&shifted(p, l, -h))) / (2.0 * h))
        .collect();
    let mut gamma = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma[(k * d + i) * d + j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Coordinate curvature tensor by central differences: metric → Christoffel
/// symbols → curvature.
pub fn fd_curvature(metric: &impl Fn(&[f64]) -> DMatrix<f64>, p: &[f64], h: f64) -> CurvTensor {
    let d = p.len();
    let g = metric(p);
    let gamma = fd_christoffel(metric, p, h);
    let gm = |k: usize, i: usize, j: usize| gamma[(k * d + i) * d + j];
    // dgamma[m] = ∂_m Γ
    let dgamma: Vec<Christoffel> = (0..d)
        .map(|m| {
            let plus = fd_christoffel(metric, &shifted(p, m, h), h);
            let minus = fd_christoffel(metric, &shifted(p, m, -h), h);
            plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect();
    let dgm = |m: usize, k: usize, i: usize, j: usize| dgamma[m][(k * d + i) * d + j];

    let mut out = CurvTensor::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                // R_{ijk}^l
                let upper: Vec<f64> = (0..d)
                    .map(|l| {
                        let mut v = dgm(i, l, j, k) - dgm(j, l, i, k);
                        for m in 0..d {
                            v += gm(m, j, k) * gm(l, i, m) - gm(m, i, k) * gm(l, j, m);
                        }
                        v
                    })
                    .collect();
                for l in 0..d {
                    let lowered: f64 = (0..d).map(|m| g[(l, m)] * upper[m]).sum();
                    out.set(i, j, k, l, lowered);
                }
            }
        }
    }
    out
}

/// `½Ḡ∧Ḡ − (ds⊗ds)∧Ḡ` in coordinates, `s = log r`.
pub fn conformal_curvature_closed_form(p: &[f64]) -> Result<CurvTensor> {
    let r2 = dot(p, p);
    let gbar = SymBilinear::scalar(p.len(), 1.0 / r2);
    let ds = SymBilinear::outer(&scale(p, 1.0 / r2));
    let mut out = kn_product(&gbar, &gbar)?.scaled(0.5);
    out.add_scaled(&kn_product(&ds, &gbar)?, -1.0)?;
    Ok(out)
}

/// Curvature of `e^{2f}g` from that of `g`:
/// `e^{2f}[Rm − ∇²f∧g + (df⊗df)∧g − ½|df|²_g g∧g]`.
pub fn conformal_change(
    base: &CurvTensor,
    g: &SymBilinear,
    f: f64,
    df: &[f64],
    hess_f: &SymBilinear,
) -> Result<CurvTensor> {
    check_dims(g.dim, df.len())?;
    let g_inv = g
        .to_dmatrix()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("metric is singular".into()))?;
    let mut df_sq = 0.0;
    for i in 0..df.len() {
        for j in 0..df.len() {
            df_sq += g_inv[(i, j)] * df[i] * df[j];
        }
    }
    let mut inner = base.clone();
    inner.add_scaled(&kn_product(hess_f, g)?, -1.0)?;
    inner.add_scaled(&kn_product(&SymBilinear::outer(df), g)?, 1.0)?;
    inner.add_scaled(&kn_product(g, g)?, -0.5 * df_sq)?;
    Ok(inner.scaled((2.0 * f).exp()))
}

/// The general conformal-change formula specialised to `G` Euclidean and
/// `f = −log r`, with the Hessian of `log r` written out by hand.
pub fn conformal_curvature_via_general_formula(p: &[f64]) -> Result<CurvTensor> {
    let d = p.len();
    let r2 = dot(p, p);
    let g = SymBilinear::identity(d);
    let f = -0.5 * r2.ln();
    let df = scale(p, -1.0 / r2);
    // ∂ᵢ∂ⱼ log r = δᵢⱼ/r² − 2pᵢpⱼ/r⁴, and f = −log r.
    let hess_f = SymBilinear::from_fn(d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        -(delta / r2 - 2.0 * p[i] * p[j] / (r2 * r2))
    })?;
    conformal_change(&CurvTensor::zeros(d), &g, f, &df, &hess_f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalReport {
    pub dim: usize,
    pub points: usize,
    pub fd: FdConfig,
    /// Max componentwise |finite differences − closed form| in `Ḡ`-orthonormal frames.
    pub max_fd_error: f64,
    /// Max |general conformal formula − closed form|, same frames.
    pub max_formula_error: f64,
    /// Max |R̄(ēᵢ,ēⱼ,ēⱼ,ēᵢ) − (1 − ēᵢ(s)² − ēⱼ(s)²)| over random frames.
    pub max_frame_identity_error: f64,
    /// Max |sectional − 0| (finite differences) for planes containing the radial direction.
    pub radial_sectional_error: f64,
    /// Max |sectional − 1| (finite differences) for planes orthogonal to it.
    pub tangential_sectional_error: f64,
}

impl ConformalReport {
    pub fn max_error(&self) -> f64 {
        self.max_fd_error
            .max(self.radial_sectional_error)
            .max(self.tangential_sectional_error)
    }
}

/// Curvature of `Ḡ = r⁻²G` at each point computed by finite differences of
/// the metric and by the closed form, compared in `Ḡ`-orthonormal frames.
pub fn conformal_curvature_check(dim: usize, points: &[Vec<f64>], fd: FdConfig) -> Result<ConformalReport> {
    if !(3..=5).contains(&dim) {
        return Err(Error::InvalidInput(format!("dim = {dim} outside 3..=5")));
    }
    if !(fd.step_rel > 0.0 && fd.step_rel <= MAX_FD_STEP) {
        return Err(Error::InvalidInput(format!(
            "finite-difference step {} outside (0, {MAX_FD_STEP}]; too large to converge",
            fd.step_rel
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d75_6275);
    let mut report = ConformalReport {
        dim,
        points: points.len(),
        fd,
        max_fd_error: 0.0,
        max_formula_error: 0.0,
        max_frame_identity_error: 0.0,
        radial_sectional_error: 0.0,
        tangential_sectional_error: 0.0,
    };
    for p in points {
        check_dims(dim, p.len())?;
        let r = norm(p);
        if r < 1e-9 {
            return Err(Error::InvalidInput("point at the origin".into()));
        }
        let h = fd.step_rel * r;
        let fd_coords = if fd.richardson {
            let coarse = fd_curvature(&conformal_metric, p, h);
            let fine = fd_curvature(&conformal_metric, p, h / 2.0);
            let mut combined = fine.scaled(4.0 / 3.0);
            combined.add_scaled(&coarse, -1.0 / 3.0)?;
            combined
        } else {
            fd_curvature(&conformal_metric, p, h)
        };
        let closed = conformal_curvature_closed_form(p)?;
        let general = conformal_curvature_via_general_formula(p)?;

        let gbar_frame = |frame: &[Vec<f64>]| -> Vec<Vec<f64>> { frame.iter().map(|e| scale(e, r)).collect() };

        let radial = gbar_frame(&radial_frame(p));
        let fd_r = fd_coords.in_frame(&radial)?;
        let closed_r = closed.in_frame(&radial)?;
        report.max_fd_error = report.max_fd_error.max(fd_r.max_abs_diff(&closed_r)?);
        report.max_formula_error = report.max_formula_error.max(general.in_frame(&radial)?.max_abs_diff(&closed_r)?);
        for j in 1..dim {
            report.radial_sectional_error = report.radial_sectional_error.max(fd_r.sectional(0, j).abs());
            for k in j + 1..dim {
                report.tangential_sectional_error =
                    report.tangential_sectional_error.max((fd_r.sectional(j, k) - 1.0).abs());
            }
        }

        let euclid = random_frame(dim, &mut rng);
        let generic = gbar_frame(&euclid);
        let fd_g = fd_coords.in_frame(&generic)?;
        let closed_g = closed.in_frame(&generic)?;
        report.max_fd_error = report.max_fd_error.max(fd_g.max_abs_diff(&closed_g)?);
        // ēₐ(s) = r·⟨eₐ, p/r²⟩ = ⟨eₐ, p⟩/r
        let es: Vec<f64> = euclid.iter().map(|e| dot(e, p) / r).collect();
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let expected = 1.0 - es[i] * es[i] - es[j] * es[j];
                report.max_frame_identity_error =
                    report.max_frame_identity_error.max((closed_g.sectional(i, j) - expected).abs());
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Hypersurfaces under the conformal change

/// A point of a hypersurface `Mⁿ ⊂ ℝⁿ⁺¹` with Euclidean data.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfacePoint {
    p: Vec<f64>,
    normal: Vec<f64>,
    frame: Vec<Vec<f64>>,
    /// Second fundamental form `K(eᵢ, eⱼ) = ⟨D_{eᵢ} n, eⱼ⟩` in the frame.
    k: SymBilinear,
}

impl HypersurfacePoint {
    pub fn new(p: Vec<f64>, normal: Vec<f64>, frame: Vec<Vec<f64>>, k: SymBilinear) -> Result<Self> {
        let ambient = p.len();
        check_dims(ambient, normal.len())?;
        check_dims(ambient - 1, frame.len())?;
        check_dims(ambient - 1, k.dim())?;
        if norm(&p) < 1e-12 {
            return Err(Error::InvalidInput("point at the origin".into()));
        }
        if (norm(&normal) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("normal is not a unit vector".into()));
        }
        for (i, e) in frame.iter().enumerate() {
            check_dims(ambient, e.len())?;
            if dot(e, &normal).abs() > 1e-12 {
                return Err(Error::InvalidInput("frame vector not tangent".into()));
            }
            for (j, f) in frame.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot(e, f) - expected).abs() > 1e-12 {
                    return Err(Error::InvalidInput("frame is not orthonormal".into()));
                }
            }
        }
        Ok(HypersurfacePoint { p, normal, frame, k })
    }

    pub fn n(&self) -> usize {
        self.frame.len()
    }

    pub fn r(&self) -> f64 {
        norm(&self.p)
    }

    pub fn s(&self) -> f64 {
        self.r().ln()
    }

    pub fn mean_curvature(&self) -> f64 {
        self.k.trace()
    }

    /// `ω = n̄(s)` with `n̄ = e^s n`.
    pub fn omega(&self) -> f64 {
        dot(&self.normal, &self.p) / self.r()
    }

    /// `K̄` in the `ḡ`-orthonormal frame `ēᵢ = r·eᵢ`, from `K = e^s(K̄ + ω ḡ)`.
    pub fn kbar(&self) -> SymBilinear {
        let r = self.r();
        let omega = self.omega();
        SymBilinear::from_fn(self.n(), |i, j| {
            r * self.k.get(i, j) - if i == j { omega } else { 0.0 }
        })
        .expect("K is symmetric")
    }

    pub fn hbar(&self) -> f64 {
        self.kbar().trace()
    }

    /// Tangential components `ēᵢ(s)` of the `ḡ`-gradient of `s`.
    pub fn grad_s(&self) -> Vec<f64> {
        let r = self.r();
        self.frame.iter().map(|e| dot(e, &self.p) / r).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum HypersurfaceCase {
    /// Round sphere of the given radius centred at the origin.
    Sphere { radius: f64 },
    PlaneThroughOrigin,
    PlaneAtDistance { distance: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedResidual {
    pub name: String,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub case: HypersurfaceCase,
    pub n: usize,
    pub samples: usize,
    pub residuals: Vec<NamedResidual>,
    pub max_residual: f64,
}

fn sample_hypersurface(case: HypersurfaceCase, n: usize, rng: &mut impl Rng) -> Result<HypersurfacePoint> {
    let ambient = n + 1;
    match case {
        HypersurfaceCase::Sphere { radius } => {
            let dir = loop {
                let v = random_vector(ambient, rng);
                if norm(&v) > 0.1 {
                    break scale(&v, 1.0 / norm(&v));
                }
            };
            let p = scale(&dir, radius);
            let frame = orthonormal_completion(std::slice::from_ref(&dir), standard_basis(ambient), n);
            HypersurfacePoint::new(p, dir, frame, SymBilinear::scalar(n, 1.0 / radius))
        }
        HypersurfaceCase::PlaneThroughOrigin | HypersurfaceCase::PlaneAtDistance { .. } => {
            let distance = match case {
                HypersurfaceCase::PlaneAtDistance { distance } => distance,
                _ => 0.0,
            };
            let normal = {
                let v = random_vector(ambient, rng);
                scale(&v, 1.0 / norm(&v))
            };
            let frame = orthonormal_completion(std::slice::from_ref(&normal), standard_basis(ambient), n);
            let mut p = scale(&normal, distance);
            for e in &frame {
                let c = rng.random_range(-2.0..2.0);
                for (pi, ei) in p.iter_mut().zip(e) {
                    *pi += c * ei;
                }
            }
            HypersurfacePoint::new(p, normal, frame, SymBilinear::scalar(n, 0.0))
        }
    }
}

/// Transforms the Euclidean second fundamental form of a model hypersurface
/// into the conformal one and compares against the known closed forms.
pub fn hypersurface_transform_check(
    case: HypersurfaceCase,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<TransformReport> {
    match case {
        HypersurfaceCase::Sphere { radius } if !(radius > 0.0) => {
            return Err(Error::InvalidInput(format!("radius {radius} must be positive")))
        }
        HypersurfaceCase::PlaneAtDistance { distance } if !(distance >= 0.0) => {
            return Err(Error::InvalidInput(format!("distance {distance} must be nonnegative")))
        }
        _ => {}
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("n = {n} < 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = n as f64;
    let names = [
        "omega",
        "kbar",
        "hbar",
        "mean_curvature_recovered",
        "gradient_split",
        "grad_s_norm",
        "norm_identity",
        "minimal_relation",
    ];
    let mut worst = [0.0f64; 8];
    for _ in 0..samples {
        let pt = sample_hypersurface(case, n, &mut rng)?;
        let r = pt.r();
        let (omega_exp, kbar_exp, grad_exp) = match case {
            HypersurfaceCase::Sphere { .. } => (1.0, 0.0, 0.0),
            HypersurfaceCase::PlaneThroughOrigin => (0.0, 0.0, 1.0),
            HypersurfaceCase::PlaneAtDistance { distance } => {
                let w = distance / r;
                (w, -w, 1.0 - w * w)
            }
        };
        let omega = pt.omega();
        let kbar = pt.kbar();
        let hbar = pt.hbar();
        let grad: f64 = pt.grad_s().iter().map(|x| x * x).sum();
        let h = pt.mean_curvature();

        let kbar_err = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (kbar.get(i, j) - if i == j { kbar_exp } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        let res = [
            (omega - omega_exp).abs(),
            kbar_err,
            (hbar - nf * kbar_exp).abs(),
            // H = e^{−s}(H̄ + nω)
            ((hbar + nf * omega) / r - h).abs(),
            (grad + omega * omega - 1.0).abs(),
            (grad - grad_exp).abs(),
            // |K̄|² = r²|K|² − 2rωH + nω²
            (kbar.norm_sq() - (r * r * pt.k.norm_sq() - 2.0 * r * omega * h + nf * omega * omega)).abs(),
            // H̄ = −nω whenever M is minimal
            if h == 0.0 { (hbar + nf * omega).abs() } else { 0.0 },
        ];
        for (w, v) in worst.iter_mut().zip(res) {
            *w = w.max(v);
        }
    }
    let residuals: Vec<NamedResidual> = names
        .iter()
        .zip(worst)
        .map(|(name, max)| NamedResidual { name: name.to_string(), max })
        .collect();
    let max_residual = worst.iter().copied().fold(0.0, f64::max);
    Ok(TransformReport { case, n, samples, residuals, max_residual })
}

// ---------------------------------------------------------------------------
// Bi-Ricci decomposition

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiricciCase {
    /// Random algebraic curvature tensor and random second fundamental form.
    Random,
    /// Random curvature tensor, `A = 0`.
    TotallyGeodesic,
    /// `R = ½g∧g`, `A = 0`.
    RoundSphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiricciReport {
    pub case: BiricciCase,
    pub n: usize,
    pub trials: usize,
    pub max_residual: f64,
    /// `Ric^M(ν, ν)` of the last trial.
    pub last_lhs: f64,
}

/// Evaluates both sides of
/// `Ric^M(ν,ν) = BiRic^M(ν,e₁) − Ric^Σ(e₁,e₁) + Σⱼ₌₂ⁿ⁻¹(A₁₁Aⱼⱼ − A₁ⱼ²)`
/// where `R^Σ` comes from the Gauss equation. Frame of `M`: `e₁ … eₙ₋₁`
/// tangent to `Σ` (indices `0..n−1`), `ν` last.
pub fn biricci_decomposition_check(trials: usize, n: usize, case: BiricciCase, seed: u64) -> Result<BiricciReport> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("n = {n} < 3")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nu = n - 1;
    let m = n - 1;
    let mut max_residual: f64 = 0.0;
    let mut last_lhs = 0.0;
    for _ in 0..trials {
        let (rm, a) = match case {
            BiricciCase::Random => (random_curvature(n, 3, &mut rng), SymBilinear::random(m, 1.0, &mut rng)),
            BiricciCase::TotallyGeodesic => (random_curvature(n, 3, &mut rng), SymBilinear::scalar(m, 0.0)),
            BiricciCase::RoundSphere => {
                let g = SymBilinear::identity(n);
                (kn_product(&g, &g)?.scaled(0.5), SymBilinear::scalar(m, 0.0))
            }
        };
        // Gauss equation.
        let mut r_sigma = CurvTensor::zeros(m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = rm.get(i, j, k, l) + a.get(i, l) * a.get(j, k) - a.get(i, k) * a.get(j, l);
                        r_sigma.set(i, j, k, l, v);
                    }
                }
            }
        }
        let lhs = rm.ricci(nu, nu);
        let extrinsic: f64 = (1..m).map(|j| a.get(0, 0) * a.get(j, j) - a.get(0, j).powi(2)).sum();
        let rhs = rm.bi_ricci(nu, 0) - r_sigma.ricci(0, 0) + extrinsic;
        max_residual = max_residual.max((lhs - rhs).abs());
        last_lhs = lhs;
    }
    Ok(BiricciReport { case, n, trials, max_residual, last_lhs })
}

// ---------------------------------------------------------------------------
// Inequality steps

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub name: String,
    /// Smallest slack (left minus right) seen; equalities report `−|residual|`.
    pub min_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepWitness {
    pub step: String,
    pub trial: usize,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub n: usize,
    pub trials: usize,
    pub pass: bool,
    pub steps: Vec<StepSummary>,
    pub witness: Option<StepWitness>,
}

/// `Σ_{i≥3} Σⱼ K̄ᵢⱼ² − (H̄ − x − y)²/(n−2)` with `x = K̄₁₁`, `y = K̄₂₂`.
pub fn trace_step_slack(kbar: &SymBilinear) -> f64 {
    let n = kbar.dim();
    let tail: f64 = (2..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| kbar.get(i, j).powi(2)).sum();
    let rest = kbar.trace() - kbar.get(0, 0) - kbar.get(1, 1);
    tail - rest * rest / (n as f64 - 2.0)
}

const STEP_NAMES: [&str; 6] = [
    "trace_cauchy_schwarz",
    "gradient_bound",
    "gauss_sum_identity",
    "drop_off_diagonal",
    "diagonal_cauchy_schwarz",
    "expansion_identity",
];

/// Random-instance confirmation of each inequality used to assemble `P`
/// and `Q`. Slack below `−1e-12·scale` counts as a violation.
pub fn inequality_step_check(trials: usize, n: usize, seed: u64) -> Result<InequalityReport> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("n = {n} < 3")));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = n as f64;
    let mut min_slack = [f64::INFINITY; 6];
    let mut witness: Option<StepWitness> = None;
    for trial in 0..trials {
        let alpha: f64 = rng.random_range(0.0..=1.0);
        let kbar = SymBilinear::random(n, 2.0, &mut rng);

        // |∇̄s|² = Σuᵢ² ≤ 1 with u₁, u₂ the first two frame components.
        let u = {
            let v = random_vector(n, &mut rng);
            let t: f64 = rng.random_range(0.0..=1.0);
            scale(&v, t / norm(&v).max(1e-300))
        };
        let grad_sq: f64 = u.iter().map(|x| x * x).sum();
        let gradient_lhs = -alpha * (nf - 3.0) * (u[0] * u[0] + u[1] * u[1])
            - (1.0 - alpha) * (nf - 2.0) * u[0] * u[0]
            - (1.0 + alpha) * grad_sq;

        // Σ has dimension n − 1; its frame indices are 0..n−1.
        let m = n - 1;
        let a = SymBilinear::random(m, 2.0, &mut rng);
        let h = a.trace();
        let z = a.get(0, 0);
        let row_sq: f64 = (0..m).map(|j| a.get(0, j).powi(2)).sum();
        let diag_tail_sq: f64 = (1..m).map(|j| a.get(j, j).powi(2)).sum();
        let gauss_sum: f64 = (1..m).map(|j| z * a.get(j, j) - a.get(0, j).powi(2)).sum();
        let inv = 1.0 / (nf - 2.0);

        let after_drop = alpha * z * h + diag_tail_sq + (1.0 - alpha) * z * z;
        let after_cs = alpha * z * h + inv * (h - z).powi(2) + (1.0 - alpha) * z * z;
        let expanded = inv * h * h + (1.0 - alpha + inv) * z * z + (alpha - 2.0 * inv) * z * h;

        let slacks = [
            trace_step_slack(&kbar),
            gradient_lhs + (nf - 1.0) * grad_sq,
            -(alpha * gauss_sum - alpha * (z * h - row_sq)).abs(),
            alpha * (z * h - row_sq) + a.norm_sq() - after_drop,
            after_drop - after_cs,
            -(after_cs - expanded).abs(),
        ];
        let scale_ref = 1.0 + kbar.norm_sq() + a.norm_sq() * nf;
        for (k, s) in slacks.into_iter().enumerate() {
            min_slack[k] = min_slack[k].min(s);
            if s < -1e-12 * scale_ref && witness.is_none() {
                witness = Some(StepWitness { step: STEP_NAMES[k].to_string(), trial, slack: s });
            }
        }
    }
    let steps = STEP_NAMES
        .iter()
        .zip(min_slack)
        .map(|(name, s)| StepSummary { name: name.to_string(), min_slack: s })
        .collect();
    Ok(InequalityReport { n, trials, pass: witness.is_none(), steps, witness })
}
