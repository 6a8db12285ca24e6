//! Right-hand sides `f: R^N -> R^N` with closed-form Jacobians and explicit
//! polynomial growth certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{param, Error, Result};
use crate::funcrep::euclid;

/// Certificate `|g(x)| <= c1 |x|^alpha + c2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Growth {
    pub fn new(alpha: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(alpha >= 1.0) || !(c1 >= 0.0) || !(c2 >= 0.0) {
            return Err(param(format!(
                "growth certificate needs alpha >= 1 and nonnegative constants, got ({alpha}, {c1}, {c2})"
            )));
        }
        Ok(Growth { alpha, c1, c2 })
    }

    pub fn bound(&self, radius: f64) -> f64 {
        self.c1 * radius.powf(self.alpha) + self.c2
    }
}

/// Norm used for Jacobian matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixNorm {
    #[default]
    Spectral,
    /// Upper bound for the spectral norm; cheaper and never smaller.
    Frobenius,
}

/// Closed-form map families.
#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// `x -> A x + b`, `A` row-major `N x N`.
    Affine { a: Vec<f64>, b: Vec<f64> },
    /// `x_i -> c x_i^3` componentwise.
    Cubic { c: f64 },
    /// `x_i -> c x_i^2` componentwise.
    Quadratic { c: f64 },
    /// `x -> x / (1 + |x|^2)^(1/2)`.
    Saturating,
    /// Scalar `y -> beta y / (1 + y^(2k))`.
    MackeyGlass { beta: f64, k: u32 },
}

/// A nonlinearity with its growth and Lipschitz data.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    pub name: String,
    pub dim: usize,
    pub kind: MapKind,
    pub f_growth: Growth,
    pub df_growth: Option<Growth>,
    /// Global Lipschitz constant of `f`, when one exists.
    pub lip_f: Option<f64>,
    /// Global Lipschitz constant of `Df` (spectral norm), when one exists.
    pub lip_df: Option<f64>,
    pub matrix_norm: MatrixNorm,
}

/// Registry parameters; unused fields are ignored by each family.
#[derive(Debug, Clone, PartialEq)]
pub struct RegistryParams {
    pub dim: usize,
    /// Coefficient `c` for `cubic` / `quadratic`, diagonal value for `linear`.
    pub scale: f64,
    /// Row-major matrix for `affine` / `linear` (overrides `scale`).
    pub matrix: Option<Vec<f64>>,
    pub offset: Option<Vec<f64>>,
    pub beta: f64,
    pub k: u32,
}

impl Default for RegistryParams {
    fn default() -> Self {
        RegistryParams {
            dim: 1,
            scale: 1.0,
            matrix: None,
            offset: None,
            beta: 2.0,
            k: 5,
        }
    }
}

/// Names accepted by [`Nonlinearity::from_registry`].
pub const REGISTRY: &[&str] = &[
    "zero",
    "constant",
    "linear",
    "affine",
    "cubic",
    "quadratic",
    "saturating",
    "mackey-glass",
];

impl Nonlinearity {
    pub fn affine(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = b.len();
        if n == 0 || a.len() != n * n {
            return Err(param(format!(
                "affine map needs an {n}x{n} matrix, got {} entries",
                a.len()
            )));
        }
        let norm_a = matrix_norm(&a, n, n, MatrixNorm::Spectral);
        let norm_b = euclid(&b);
        Ok(Nonlinearity {
            name: "affine".into(),
            dim: n,
            kind: MapKind::Affine { a, b },
            f_growth: Growth::new(1.0, norm_a, norm_b)?,
            df_growth: Some(Growth::new(1.0, 0.0, norm_a)?),
            lip_f: Some(norm_a),
            lip_df: Some(0.0),
            matrix_norm: MatrixNorm::Spectral,
        })
    }

    /// `x -> A x`.
    pub fn linear(a: Vec<f64>) -> Result<Self> {
        let n = (a.len() as f64).sqrt().round() as usize;
        let mut nl = Self::affine(a, vec![0.0; n])?;
        nl.name = "linear".into();
        Ok(nl)
    }

    /// `x -> c x`.
    pub fn scalar_linear(dim: usize, c: f64) -> Result<Self> {
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            a[i * dim + i] = c;
        }
        Self::linear(a)
    }

    pub fn zero(dim: usize) -> Result<Self> {
        let mut nl = Self::affine(vec![0.0; dim * dim], vec![0.0; dim])?;
        nl.name = "zero".into();
        Ok(nl)
    }

    pub fn constant(value: Vec<f64>) -> Result<Self> {
        let n = value.len();
        let mut nl = Self::affine(vec![0.0; n * n], value)?;
        nl.name = "constant".into();
        Ok(nl)
    }

    /// Componentwise `c x_i^3`: `|f(x)| <= |c| |x|^3`, `||Df(x)|| <= 3|c| |x|^2`.
    pub fn cubic(dim: usize, c: f64) -> Result<Self> {
        check_dim(dim)?;
        Ok(Nonlinearity {
            name: "cubic".into(),
            dim,
            kind: MapKind::Cubic { c },
            f_growth: Growth::new(3.0, c.abs(), 0.0)?,
            df_growth: Some(Growth::new(2.0, 3.0 * c.abs(), 0.0)?),
            lip_f: None,
            lip_df: None,
            matrix_norm: MatrixNorm::Spectral,
        })
    }

    /// Componentwise `c x_i^2`: `||Df(x)|| <= 2|c| |x|`, `Df` is `2|c|`-Lipschitz.
    pub fn quadratic(dim: usize, c: f64) -> Result<Self> {
        check_dim(dim)?;
        Ok(Nonlinearity {
            name: "quadratic".into(),
            dim,
            kind: MapKind::Quadratic { c },
            f_growth: Growth::new(2.0, c.abs(), 0.0)?,
            df_growth: Some(Growth::new(1.0, 2.0 * c.abs(), 0.0)?),
            lip_f: None,
            lip_df: Some(2.0 * c.abs()),
            matrix_norm: MatrixNorm::Spectral,
        })
    }

    /// `x / (1 + |x|^2)^(1/2)`. The Jacobian has singular values
    /// `(1+u^2)^(-1/2)` and `(1+u^2)^(-3/2)` with `u = |x|`, so `||Df|| <= 1`.
    pub fn saturating(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Nonlinearity {
            name: "saturating".into(),
            dim,
            kind: MapKind::Saturating,
            f_growth: Growth::new(1.0, 1.0, 0.0)?,
            df_growth: Some(Growth::new(1.0, 0.0, 1.0)?),
            lip_f: Some(1.0),
            lip_df: Some(1.7),
            matrix_norm: MatrixNorm::Spectral,
        })
    }

    /// Scalar `beta y / (1 + y^(2k))`, `k >= 1`.
    ///
    /// With `s = y^(2k)`, `f'(y) = beta (1 - (2k-1) s) / (1 + s)^2`, whose
    /// modulus is at most `beta max(1, (2k-1)^2 / (8k)) <= beta max(1, (2k-1)/4)`.
    pub fn mackey_glass(beta: f64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(param("Mackey-Glass exponent k must be at least 1"));
        }
        let lip = beta.abs() * 1f64.max((2.0 * k as f64 - 1.0) / 4.0);
        Ok(Nonlinearity {
            name: "mackey-glass".into(),
            dim: 1,
            kind: MapKind::MackeyGlass { beta, k },
            f_growth: Growth::new(1.0, beta.abs(), 0.0)?,
            df_growth: Some(Growth::new(1.0, 0.0, lip)?),
            lip_f: Some(lip),
            lip_df: None,
            matrix_norm: MatrixNorm::Spectral,
        })
    }

    pub fn from_registry(name: &str, params: &RegistryParams) -> Result<Self> {
        let n = params.dim;
        match name {
            "zero" => Self::zero(n),
            "constant" => Self::constant(params.offset.clone().unwrap_or_else(|| vec![params.scale; n])),
            "linear" => match &params.matrix {
                Some(a) => Self::linear(a.clone()),
                None => Self::scalar_linear(n, params.scale),
            },
            "affine" => {
                let a = params.matrix.clone().unwrap_or_else(|| {
                    let mut a = vec![0.0; n * n];
                    for i in 0..n {
                        a[i * n + i] = params.scale;
                    }
                    a
                });
                Self::affine(a, params.offset.clone().unwrap_or_else(|| vec![0.0; n]))
            }
            "cubic" => Self::cubic(n, params.scale),
            "quadratic" => Self::quadratic(n, params.scale),
            "saturating" => Self::saturating(n),
            "mackey-glass" => {
                if n != 1 {
                    return Err(param("mackey-glass is scalar"));
                }
                Self::mackey_glass(params.beta, params.k)
            }
            other => Err(param(format!(
                "unknown nonlinearity `{other}`; known: {}",
                REGISTRY.join(", ")
            ))),
        }
    }

    /// Replace the growth certificates (for experiments with hand-supplied data).
    pub fn with_growth(mut self, f_growth: Growth, df_growth: Option<Growth>) -> Self {
        self.f_growth = f_growth;
        self.df_growth = df_growth;
        self
    }

    pub fn with_matrix_norm(mut self, norm: MatrixNorm) -> Self {
        self.matrix_norm = norm;
        self
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.kind {
            MapKind::Affine { a, b } => {
                let n = self.dim;
                for i in 0..n {
                    out[i] = b[i] + (0..n).map(|j| a[i * n + j] * x[j]).sum::<f64>();
                }
            }
            MapKind::Cubic { c } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = c * v * v * v;
                }
            }
            MapKind::Quadratic { c } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = c * v * v;
                }
            }
            MapKind::Saturating => {
                let s = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
                for (o, v) in out.iter_mut().zip(x) {
                    *o = v / s;
                }
            }
            MapKind::MackeyGlass { beta, k } => {
                let y = x[0];
                out[0] = beta * y / (1.0 + y.powi(2 * *k as i32));
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    /// Row-major `N x N` Jacobian at `x`.
    pub fn jacobian_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        match &self.kind {
            MapKind::Affine { a, .. } => out.copy_from_slice(a),
            MapKind::Cubic { c } => {
                out.fill(0.0);
                for i in 0..n {
                    out[i * n + i] = 3.0 * c * x[i] * x[i];
                }
            }
            MapKind::Quadratic { c } => {
                out.fill(0.0);
                for i in 0..n {
                    out[i * n + i] = 2.0 * c * x[i];
                }
            }
            MapKind::Saturating => {
                let u2: f64 = x.iter().map(|v| v * v).sum();
                let s = (1.0 + u2).sqrt();
                let s3 = s * s * s;
                for i in 0..n {
                    for j in 0..n {
                        let delta = if i == j { 1.0 / s } else { 0.0 };
                        out[i * n + j] = delta - x[i] * x[j] / s3;
                    }
                }
            }
            MapKind::MackeyGlass { beta, k } => {
                let s = x[0].powi(2 * *k as i32);
                let d = 1.0 + s;
                out[0] = beta * (1.0 - (2.0 * *k as f64 - 1.0) * s) / (d * d);
            }
        }
    }

    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        self.jacobian_into(x, &mut out);
        out
    }

    /// `Df(x) h`.
    pub fn jvp_into(&self, x: &[f64], h: &[f64], out: &mut [f64]) {
        match &self.kind {
            MapKind::Cubic { c } => {
                for i in 0..self.dim {
                    out[i] = 3.0 * c * x[i] * x[i] * h[i];
                }
            }
            MapKind::Quadratic { c } => {
                for i in 0..self.dim {
                    out[i] = 2.0 * c * x[i] * h[i];
                }
            }
            MapKind::Saturating => {
                let u2: f64 = x.iter().map(|v| v * v).sum();
                let s = (1.0 + u2).sqrt();
                let xh: f64 = x.iter().zip(h).map(|(a, b)| a * b).sum();
                for i in 0..self.dim {
                    out[i] = h[i] / s - x[i] * xh / (s * s * s);
                }
            }
            _ => {
                let n = self.dim;
                let mut jac = vec![0.0; n * n];
                self.jacobian_into(x, &mut jac);
                for i in 0..n {
                    out[i] = (0..n).map(|j| jac[i * n + j] * h[j]).sum();
                }
            }
        }
    }

    /// `||Df(x)||` in the configured matrix norm.
    pub fn jacobian_norm(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let mut jac = vec![0.0; n * n];
        self.jacobian_into(x, &mut jac);
        matrix_norm(&jac, n, n, self.matrix_norm)
    }

    /// `||Df(x) - Df(y)||` in the configured matrix norm.
    pub fn jacobian_gap_norm(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        let mut jx = vec![0.0; n * n];
        let mut jy = vec![0.0; n * n];
        self.jacobian_into(x, &mut jx);
        self.jacobian_into(y, &mut jy);
        for (a, b) in jx.iter_mut().zip(&jy) {
            *a -= b;
        }
        matrix_norm(&jx, n, n, self.matrix_norm)
    }

    fn df_growth_or_err(&self) -> Result<Growth> {
        self.df_growth
            .ok_or_else(|| Error::MissingDerivativeGrowth(self.name.clone()))
    }

    /// `L(M) = C1 M^alpha + C2`, a Lipschitz constant of `f` on the closed ball of radius `M`.
    pub fn lipschitz_on_ball(&self, radius: f64) -> Result<f64> {
        let g = self.df_growth_or_err()?;
        if !(radius > 0.0) {
            return Err(param(format!("ball radius must be positive, got {radius}")));
        }
        Ok(g.bound(radius))
    }

    /// Largest violation of the growth certificates over `samples` points
    /// drawn uniformly from the ball of radius `radius`.
    ///
    /// Each bound is inflated by a relative `1e-14` to absorb rounding, so
    /// exact equality cases (`|x| = |x|`) are not reported as violations.
    pub fn growth_verify(&self, radius: f64, samples: usize, seed: u64) -> GrowthReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; self.dim];
        let mut fx = vec![0.0; self.dim];
        let mut f_defect = f64::NEG_INFINITY;
        let mut df_defect: Option<f64> = self.df_growth.map(|_| f64::NEG_INFINITY);
        for _ in 0..samples.max(1) {
            uniform_in_ball(&mut rng, radius, &mut x);
            let u = euclid(&x);
            self.eval_into(&x, &mut fx);
            let bound = self.f_growth.bound(u);
            f_defect = f_defect.max(euclid(&fx) - bound * (1.0 + ROUNDING_SLACK));
            if let (Some(g), Some(d)) = (self.df_growth, df_defect.as_mut()) {
                let bound = g.bound(u);
                *d = d.max(self.jacobian_norm(&x) - bound * (1.0 + ROUNDING_SLACK));
            }
        }
        let max_defect = df_defect.map_or(f_defect, |d| d.max(f_defect));
        GrowthReport {
            f_defect,
            df_defect,
            max_defect,
            passed: max_defect <= 0.0,
        }
    }
}

const ROUNDING_SLACK: f64 = 1e-14;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(param("dimension must be at least 1"));
    }
    Ok(())
}

/// Outcome of [`Nonlinearity::growth_verify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    pub f_defect: f64,
    pub df_defect: Option<f64>,
    pub max_defect: f64,
    pub passed: bool,
}

/// Uniform sample from the closed ball: Gaussian direction, radius `R U^(1/N)`.
pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64, out: &mut [f64]) {
    let n = out.len();
    loop {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = euclid(out);
        if norm > 0.0 {
            let rho = radius * rng.random::<f64>().powf(1.0 / n as f64);
            for v in out.iter_mut() {
                *v *= rho / norm;
            }
            return;
        }
    }
}

/// `s / (s - 1)`.
pub fn holder_conjugate(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(param(format!("Holder conjugate needs s > 1, got {s}")));
    }
    if s.is_infinite() {
        return Ok(1.0);
    }
    Ok(s / (s - 1.0))
}

/// Norm of a row-major `rows x cols` matrix.
///
/// Spectral norms use the closed form for matrices with at most two rows and
/// columns, the largest entry modulus for diagonal matrices, and otherwise 50
/// power iterations on `M^T M` from a fixed start.
pub fn matrix_norm(m: &[f64], rows: usize, cols: usize, kind: MatrixNorm) -> f64 {
    debug_assert_eq!(m.len(), rows * cols);
    let frob = euclid(m);
    if kind == MatrixNorm::Frobenius || frob == 0.0 {
        return frob;
    }
    if rows == 1 || cols == 1 {
        return frob;
    }
    if rows == cols {
        let diagonal = (0..rows).all(|i| (0..cols).all(|j| i == j || m[i * cols + j] == 0.0));
        if diagonal {
            return (0..rows).map(|i| m[i * cols + i].abs()).fold(0.0, f64::max);
        }
    }
    if rows == 2 && cols == 2 {
        let det = m[0] * m[3] - m[1] * m[2];
        let f2 = frob * frob;
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
        return (0.5 * (f2 + disc)).sqrt();
    }
    power_iteration(m, rows, cols)
}

fn power_iteration(m: &[f64], rows: usize, cols: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..cols).map(|_| rng.sample(StandardNormal)).collect();
    let mut w = vec![0.0; rows];
    let mut sigma = 0.0;
    for _ in 0..50 {
        let nv = euclid(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        for i in 0..rows {
            w[i] = (0..cols).map(|j| m[i * cols + j] * v[j]).sum();
        }
        sigma = euclid(&w);
        for j in 0..cols {
            v[j] = (0..rows).map(|i| m[i * cols + j] * w[i]).sum();
        }
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lipschitz_on_ball_examples() {
        let nl = Nonlinearity::scalar_linear(1, 1.0).unwrap().with_growth(
            Growth::new(1.0, 1.0, 1.0).unwrap(),
            Some(Growth::new(1.0, 1.0, 0.0).unwrap()),
        );
        assert_eq!(nl.lipschitz_on_ball(5.0).unwrap(), 5.0);

        let a = Nonlinearity::linear(vec![2.0, 1.0, 0.0, -1.0]).unwrap();
        let norm_a = a.df_growth.unwrap().c2;
        for m in [0.1, 1.0, 100.0] {
            assert_eq!(a.lipschitz_on_ball(m).unwrap(), norm_a);
        }

        let cubic = Nonlinearity::cubic(1, 1.0).unwrap();
        let l = cubic.lipschitz_on_ball(2.0).unwrap();
        assert_eq!(l, 12.0);
        let gap = (cubic.eval(&[2.0])[0] - cubic.eval(&[1.9])[0]).abs();
        assert_abs_diff_eq!(gap, 1.141, epsilon = 1e-12);
        assert!(gap <= l * 0.1);

        let bare = Nonlinearity::cubic(1, 1.0)
            .unwrap()
            .with_growth(Growth::new(3.0, 1.0, 0.0).unwrap(), None);
        assert!(matches!(
            bare.lipschitz_on_ball(1.0),
            Err(Error::MissingDerivativeGrowth(_))
        ));
        assert!(cubic.lipschitz_on_ball(0.0).is_err());
    }

    #[test]
    fn growth_verify_examples() {
        let id = Nonlinearity::scalar_linear(3, 1.0).unwrap();
        let rep = id.growth_verify(10.0, 1000, 1);
        assert!(rep.passed, "{rep:?}");
        assert!(rep.max_defect <= 0.0);

        let cubic = Nonlinearity::cubic(1, 1.0).unwrap();
        assert!(cubic.growth_verify(10.0, 1000, 2).passed);

        let mislabeled = cubic.with_growth(Growth::new(2.0, 1.0, 0.0).unwrap(), None);
        let rep = mislabeled.growth_verify(10.0, 1000, 3);
        assert!(!rep.passed);
        assert!(rep.max_defect > 0.0);
    }

    #[test]
    fn holder_examples() {
        assert_eq!(holder_conjugate(2.0).unwrap(), 2.0);
        assert_eq!(holder_conjugate(3.0).unwrap(), 1.5);
        assert!(holder_conjugate(1.0).is_err());
        assert!(holder_conjugate(0.5).is_err());
    }

    #[test]
    fn spectral_norms() {
        // diag(3, -4)
        assert_eq!(matrix_norm(&[3.0, 0.0, 0.0, -4.0], 2, 2, MatrixNorm::Spectral), 4.0);
        // [[1, 1], [0, 1]] has sigma_max = golden ratio
        let phi = 0.5 * (1.0 + 5f64.sqrt());
        assert_abs_diff_eq!(
            matrix_norm(&[1.0, 1.0, 0.0, 1.0], 2, 2, MatrixNorm::Spectral),
            phi,
            epsilon = 1e-14
        );
        // rank one 3x3: u v^T with |u| = 3, |v| = sqrt(2)
        let u = [1.0, 2.0, 2.0];
        let v = [1.0, -1.0, 0.0];
        let m: Vec<f64> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        assert_abs_diff_eq!(
            matrix_norm(&m, 3, 3, MatrixNorm::Spectral),
            3.0 * 2f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(matrix_norm(&m, 3, 3, MatrixNorm::Frobenius) >= matrix_norm(&m, 3, 3, MatrixNorm::Spectral) - 1e-12);
    }

    #[test]
    fn registry_lookup() {
        for name in REGISTRY {
            let nl = Nonlinearity::from_registry(name, &RegistryParams::default()).unwrap();
            assert_eq!(nl.dim, 1);
        }
        assert!(Nonlinearity::from_registry("nope", &RegistryParams::default()).is_err());
        let p = RegistryParams {
            dim: 2,
            ..Default::default()
        };
        assert!(Nonlinearity::from_registry("mackey-glass", &p).is_err());
    }
}
