//! Declarative model descriptions, read from JSON.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use thiserror::Error;

use crate::grid::{FieldGrid, GridError, Torus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("model kind {0:?} needs field `{1}`")]
    Missing(ModelKind, &'static str),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Built-in closed-form fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// Periodised normal density with total mass `mass`.
    Gaussian { mass: f64, center: Vec<f64>, sigma: f64 },
    /// `base + amplitude·exp(−|x−c|²/2σ²)` with minimum-image distance.
    Bump { base: f64, amplitude: f64, center: Vec<f64>, sigma: f64 },
    /// `base + amplitude·cos(2π m·x/L + phase)` for integer modes `m`.
    Cosine { base: f64, amplitude: f64, modes: Vec<i32>, #[serde(default)] phase: f64 },
    /// `scale·sin²(t)·g(x)`.
    Sin2Time { #[serde(default = "one")] scale: f64, spatial: Box<FieldSpec> },
    /// `(a + b·t)·g(x)`.
    Ramp { a: f64, b: f64, spatial: Box<FieldSpec> },
}

fn one() -> f64 {
    1.0
}

/// A scalar field `f(x, t)` on the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSpec {
    Const(f64),
    /// Samples at the model's grid points; constant on each grid cell.
    Table(Vec<f64>),
    Expr(Builtin),
}

/// 1-D periodised normal density on `[0, l)`.
fn wrapped_normal(x: f64, c: f64, sigma: f64, l: f64) -> f64 {
    let mut d = (x - c).rem_euclid(l);
    if d > 0.5 * l {
        d -= l;
    }
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let mut s = 0.0;
    let mut k = 0i64;
    loop {
        let mut add = 0.0;
        for img in if k == 0 { vec![0.0] } else { vec![k as f64, -k as f64] } {
            let y = d + img * l;
            add += (-0.5 * y * y / (sigma * sigma)).exp();
        }
        s += add;
        k += 1;
        if add <= 1e-17 * s || k > 10_000 {
            break;
        }
    }
    norm * s
}

fn table_index(torus: &Torus, x: &[f64]) -> usize {
    let multi: Vec<usize> = x
        .iter()
        .enumerate()
        .map(|(a, xi)| {
            let n = torus.shape[a];
            ((xi / torus.spacing(a)).round() as i64).rem_euclid(n as i64) as usize
        })
        .collect();
    torus.ravel(&multi)
}

impl FieldSpec {
    pub fn constant(c: f64) -> Self {
        FieldSpec::Const(c)
    }

    pub fn gaussian(mass: f64, center: Vec<f64>, sigma: f64) -> Self {
        FieldSpec::Expr(Builtin::Gaussian { mass, center, sigma })
    }

    pub fn bump(base: f64, amplitude: f64, center: Vec<f64>, sigma: f64) -> Self {
        FieldSpec::Expr(Builtin::Bump { base, amplitude, center, sigma })
    }

    pub fn eval(&self, torus: &Torus, x: &[f64], t: f64) -> f64 {
        match self {
            FieldSpec::Const(c) => *c,
            FieldSpec::Table(v) => v[table_index(torus, x)],
            FieldSpec::Expr(b) => match b {
                Builtin::Gaussian { mass, center, sigma } => {
                    mass * x
                        .iter()
                        .enumerate()
                        .map(|(a, xi)| wrapped_normal(*xi, center[a], *sigma, torus.lengths[a]))
                        .product::<f64>()
                }
                Builtin::Bump { base, amplitude, center, sigma } => {
                    let d = torus.min_image(x, center);
                    let r2: f64 = d.iter().map(|v| v * v).sum();
                    base + amplitude * (-0.5 * r2 / (sigma * sigma)).exp()
                }
                Builtin::Cosine { base, amplitude, modes, phase } => {
                    let arg: f64 = x
                        .iter()
                        .enumerate()
                        .map(|(a, xi)| 2.0 * PI * modes[a] as f64 * xi / torus.lengths[a])
                        .sum();
                    base + amplitude * (arg + phase).cos()
                }
                Builtin::Sin2Time { scale, spatial } => scale * t.sin().powi(2) * spatial.eval(torus, x, t),
                Builtin::Ramp { a, b, spatial } => (a + b * t) * spatial.eval(torus, x, t),
            },
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        match self {
            FieldSpec::Expr(Builtin::Sin2Time { .. } | Builtin::Ramp { .. }) => true,
            FieldSpec::Expr(_) | FieldSpec::Const(_) | FieldSpec::Table(_) => false,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, FieldSpec::Const(_))
    }

    /// Samples at the grid points at time `t`.
    pub fn sample(&self, torus: &Torus, t: f64) -> FieldGrid {
        FieldGrid::from_fn(torus, |x| self.eval(torus, x, t))
    }

    /// Upper bound of the field over space, for `t` in `[t0, t1]`.
    pub fn upper_bound(&self, torus: &Torus, t0: f64, t1: f64) -> f64 {
        match self {
            FieldSpec::Const(c) => *c,
            FieldSpec::Table(v) => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            FieldSpec::Expr(b) => match b {
                Builtin::Gaussian { center, .. } => self.eval(torus, center, t0),
                Builtin::Bump { base, amplitude, .. } => base + amplitude.max(0.0),
                Builtin::Cosine { base, amplitude, .. } => base + amplitude.abs(),
                Builtin::Sin2Time { scale, spatial } => scale.abs() * spatial.upper_bound(torus, t0, t1).max(0.0),
                Builtin::Ramp { a, b, spatial } => {
                    (a + b * t0).max(a + b * t1).max(0.0) * spatial.upper_bound(torus, t0, t1).max(0.0)
                }
            },
        }
    }

    /// `∫_a^b f(x, s) ds`, in closed form for every builtin.
    pub fn time_integral(&self, torus: &Torus, x: &[f64], a: f64, b: f64) -> f64 {
        match self {
            FieldSpec::Expr(Builtin::Sin2Time { scale, spatial }) => {
                let prim = |s: f64| 0.5 * s - 0.25 * (2.0 * s).sin();
                scale * (prim(b) - prim(a)) * spatial.eval(torus, x, a)
            }
            FieldSpec::Expr(Builtin::Ramp { a: c0, b: c1, spatial }) => {
                (c0 * (b - a) + 0.5 * c1 * (b * b - a * a)) * spatial.eval(torus, x, a)
            }
            _ => self.eval(torus, x, a) * (b - a),
        }
    }

    /// `∫_a^b ∫ f(x, s) dx ds`.
    pub fn space_time_integral(&self, torus: &Torus, a: f64, b: f64) -> f64 {
        match self {
            FieldSpec::Expr(Builtin::Sin2Time { scale, spatial }) => {
                let prim = |s: f64| 0.5 * s - 0.25 * (2.0 * s).sin();
                scale * (prim(b) - prim(a)) * spatial.integral(torus, a)
            }
            FieldSpec::Expr(Builtin::Ramp { a: c0, b: c1, spatial }) => {
                (c0 * (b - a) + 0.5 * c1 * (b * b - a * a)) * spatial.integral(torus, a)
            }
            _ => self.integral(torus, a) * (b - a),
        }
    }

    /// The time-independent factor of a separable field, used for placing
    /// points with density proportional to the field.
    pub fn spatial_part(&self) -> &FieldSpec {
        match self {
            FieldSpec::Expr(Builtin::Sin2Time { spatial, .. } | Builtin::Ramp { spatial, .. }) => spatial.spatial_part(),
            _ => self,
        }
    }

    /// `∫ f(x, t) dx` over the torus.
    pub fn integral(&self, torus: &Torus, t: f64) -> f64 {
        match self {
            FieldSpec::Const(c) => c * torus.volume(),
            FieldSpec::Table(v) => v.iter().sum::<f64>() * torus.cell_volume(),
            FieldSpec::Expr(b) => match b {
                Builtin::Gaussian { mass, .. } => *mass,
                Builtin::Bump { base, amplitude, sigma, .. } => {
                    let per_axis = |l: f64| sigma * (2.0 * PI).sqrt() * erf(l / (2.0 * 2f64.sqrt() * sigma));
                    base * torus.volume() + amplitude * torus.lengths.iter().map(|l| per_axis(*l)).product::<f64>()
                }
                Builtin::Cosine { base, amplitude, modes, phase } => {
                    let zero_mode = modes.iter().all(|m| *m == 0);
                    torus.volume() * (base + if zero_mode { amplitude * phase.cos() } else { 0.0 })
                }
                Builtin::Sin2Time { scale, spatial } => scale * t.sin().powi(2) * spatial.integral(torus, t),
                Builtin::Ramp { a, b, spatial } => (a + b * t) * spatial.integral(torus, t),
            },
        }
    }

    fn check(&self, torus: &Torus, name: &str) -> Result<(), SpecError> {
        let bad = |m: String| Err(SpecError::Invalid(format!("{name}: {m}")));
        match self {
            FieldSpec::Table(v) if v.len() != torus.len() => {
                bad(format!("table has {} samples, grid has {}", v.len(), torus.len()))
            }
            FieldSpec::Expr(Builtin::Gaussian { center, sigma, .. } | Builtin::Bump { center, sigma, .. })
                if center.len() != torus.dim() || *sigma <= 0.0 =>
            {
                bad("center must match the dimension and sigma must be positive".into())
            }
            FieldSpec::Expr(Builtin::Cosine { modes, .. }) if modes.len() != torus.dim() => {
                bad("one mode per axis".into())
            }
            FieldSpec::Expr(Builtin::Sin2Time { spatial, .. } | Builtin::Ramp { spatial, .. }) => {
                spatial.check(torus, name)
            }
            _ => Ok(()),
        }
    }
}

/// Radial reaction kernel `R(|x|)` for pairwise annihilation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSpec {
    /// Gaussian profile with total integral `integral` over space, cut at `cutoff`.
    Gaussian { integral: f64, sigma: f64, cutoff: f64 },
    /// Constant `rate` within `radius`.
    Tophat { rate: f64, radius: f64 },
    /// Linear interpolation of `values` at radii `r`, zero beyond `cutoff`.
    Table { r: Vec<f64>, values: Vec<f64>, cutoff: f64 },
    /// Contact interaction `integral·δ(x)`, the diffusion-limited case. It
    /// only has a momentum-space meaning; particle simulation rejects it.
    Delta { integral: f64 },
}

impl KernelSpec {
    pub fn cutoff(&self) -> f64 {
        match self {
            KernelSpec::Gaussian { cutoff, .. } | KernelSpec::Table { cutoff, .. } => *cutoff,
            KernelSpec::Tophat { radius, .. } => *radius,
            KernelSpec::Delta { .. } => 0.0,
        }
    }

    pub fn eval(&self, dim: usize, r: f64) -> f64 {
        if r > self.cutoff() {
            return 0.0;
        }
        match self {
            KernelSpec::Gaussian { integral, sigma, .. } => {
                integral * (-0.5 * r * r / (sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt()).powi(dim as i32)
            }
            KernelSpec::Tophat { rate, .. } => *rate,
            KernelSpec::Delta { .. } => f64::INFINITY,
            KernelSpec::Table { r: rs, values, .. } => {
                match rs.iter().position(|x| *x >= r) {
                    Some(0) => values[0],
                    Some(i) => {
                        let w = (r - rs[i - 1]) / (rs[i] - rs[i - 1]);
                        values[i - 1] * (1.0 - w) + values[i] * w
                    }
                    None => *values.last().unwrap_or(&0.0),
                }
            }
        }
    }

    pub fn max_value(&self, dim: usize) -> f64 {
        match self {
            KernelSpec::Table { values, .. } => values.iter().copied().fold(0.0, f64::max),
            _ => self.eval(dim, 0.0),
        }
    }

    /// Kernel sampled on the torus by minimum-image distance from the origin.
    /// A delta kernel becomes a single cell of mass `integral`.
    pub fn sample(&self, torus: &Torus) -> FieldGrid {
        if let KernelSpec::Delta { integral } = self {
            let mut values = vec![0.0; torus.len()];
            values[0] = integral / torus.cell_volume();
            return FieldGrid::from_real(torus, &values);
        }
        let origin = vec![0.0; torus.dim()];
        FieldGrid::from_fn(torus, |x| {
            let d = torus.min_image(x, &origin);
            self.eval(torus.dim(), d.iter().map(|v| v * v).sum::<f64>().sqrt())
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    DeathDiffusion,
    BrownianTree,
    ConvertAb,
    SpontBirth,
    BirthDeathTimedep,
    DiscreteDeath,
    Annihilation,
}

/// A reaction-diffusion model on a periodic box.
///
/// Rate meanings by kind: `mu` is the death rate (death-diffusion, discrete
/// death), the branching rate (Brownian tree), the conversion rate (A→B) or
/// the spontaneous birth intensity (spontaneous and time-dependent birth);
/// `nu` is the death rate of the time-dependent birth-death model. `v` is the
/// initial intensity (for species A where two species exist) and `v_b` the
/// initial intensity of species B.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(alias = "d")]
    pub dim: usize,
    #[serde(rename = "box")]
    pub box_lengths: Vec<f64>,
    pub shape: Vec<usize>,
    #[serde(rename = "D", default)]
    pub diffusion: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<FieldSpec>,
    pub v: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_b: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, torus: &Torus, v: FieldSpec) -> Self {
        ModelSpec {
            kind,
            dim: torus.dim(),
            box_lengths: torus.lengths.clone(),
            shape: torus.shape.clone(),
            diffusion: 0.0,
            mu: None,
            nu: None,
            v,
            v_b: None,
            kernel: None,
        }
    }

    pub fn with_diffusion(mut self, d: f64) -> Self {
        self.diffusion = d;
        self
    }

    pub fn with_mu(mut self, mu: FieldSpec) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn with_nu(mut self, nu: FieldSpec) -> Self {
        self.nu = Some(nu);
        self
    }

    pub fn with_v_b(mut self, v_b: FieldSpec) -> Self {
        self.v_b = Some(v_b);
        self
    }

    pub fn with_kernel(mut self, k: KernelSpec) -> Self {
        self.kernel = Some(k);
        self
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn torus(&self) -> Result<Torus, SpecError> {
        if self.dim != self.shape.len() {
            return Err(SpecError::Invalid(format!("d = {} but shape has {} axes", self.dim, self.shape.len())));
        }
        Ok(Torus::new(self.shape.clone(), self.box_lengths.clone())?)
    }

    pub fn mu(&self) -> Result<&FieldSpec, SpecError> {
        self.mu.as_ref().ok_or(SpecError::Missing(self.kind, "mu"))
    }

    pub fn nu(&self) -> Result<&FieldSpec, SpecError> {
        self.nu.as_ref().ok_or(SpecError::Missing(self.kind, "nu"))
    }

    pub fn kernel(&self) -> Result<&KernelSpec, SpecError> {
        self.kernel.as_ref().ok_or(SpecError::Missing(self.kind, "kernel"))
    }

    /// Structural checks: sizes, `D ≥ 0`, and nonnegative rates and
    /// intensities on the grid.
    pub fn validate(&self) -> Result<Torus, SpecError> {
        let torus = self.torus()?;
        if !(self.diffusion >= 0.0) {
            return Err(SpecError::Invalid("D must be nonnegative".into()));
        }
        let mut fields = vec![("v", &self.v)];
        fields.extend(self.mu.as_ref().map(|f| ("mu", f)));
        fields.extend(self.nu.as_ref().map(|f| ("nu", f)));
        fields.extend(self.v_b.as_ref().map(|f| ("v_b", f)));
        for (name, f) in fields {
            f.check(&torus, name)?;
            let min = f.sample(&torus, 0.0).real().into_iter().fold(f64::INFINITY, f64::min);
            if min < 0.0 {
                return Err(SpecError::Invalid(format!("{name} takes negative values")));
            }
        }
        match self.kind {
            ModelKind::DeathDiffusion | ModelKind::BrownianTree | ModelKind::ConvertAb | ModelKind::DiscreteDeath => {
                self.mu()?;
            }
            ModelKind::SpontBirth => {
                self.mu()?;
            }
            ModelKind::BirthDeathTimedep => {
                self.mu()?;
                self.nu()?;
            }
            ModelKind::Annihilation => {
                let k = self.kernel()?;
                if k.cutoff() > 0.5 * torus.lengths.iter().copied().fold(f64::INFINITY, f64::min) {
                    return Err(SpecError::Invalid("kernel cutoff exceeds half the box".into()));
                }
            }
        }
        Ok(torus)
    }
}
