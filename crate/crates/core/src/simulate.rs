//! Particle Monte Carlo for every model: continuum Brownian motion plus
//! reaction events, averaged over independent replicas.
//!
//! Per-particle events fire with the exact probability `1 − exp(−∫rate)`
//! over each step, so pure reaction models carry no time-step bias; the only
//! splitting error comes from interleaving motion and reaction.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{FieldGrid, Torus};
use crate::spec::{Builtin, FieldSpec, KernelSpec, ModelKind, ModelSpec, SpecError};

/// Largest per-step event probability accepted by [`step`].
pub const MAX_STEP_PROBABILITY: f64 = 0.1;

/// Replicas handled by one work item; fixes the reduction order so results
/// do not depend on the thread count.
const BLOCK: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("event probability {probability:.3} per step exceeds {MAX_STEP_PROBABILITY}; reduce dt (now {dt})")]
    StepTooLarge { probability: f64, dt: f64 },
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Positions and species of one realisation.
#[derive(Clone, Debug)]
pub struct ParticleEnsemble {
    pub dim: usize,
    /// Flattened `dim`-vectors, wrapped into the box.
    pub positions: Vec<f64>,
    pub species: Vec<u8>,
    pub time: f64,
    pub rng: ChaCha8Rng,
}

impl ParticleEnsemble {
    pub fn empty(dim: usize, rng: ChaCha8Rng) -> Self {
        ParticleEnsemble { dim, positions: Vec::new(), species: Vec::new(), time: 0.0, rng }
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn count(&self, species: u8) -> usize {
        self.species.iter().filter(|s| **s == species).count()
    }

    pub fn push(&mut self, x: &[f64], species: u8) {
        self.positions.extend_from_slice(x);
        self.species.push(species);
    }

    fn retain(&mut self, keep: &[bool]) {
        let d = self.dim;
        let mut w = 0;
        for r in 0..self.species.len() {
            if keep[r] {
                self.species[w] = self.species[r];
                self.positions.copy_within(r * d..(r + 1) * d, w * d);
                w += 1;
            }
        }
        self.species.truncate(w);
        self.positions.truncate(w * d);
    }
}

/// Draws points with density proportional to a nonnegative field.
enum PointSampler {
    Uniform,
    Gaussian { center: Vec<f64>, sigma: f64 },
    Cells(WeightedIndex<f64>),
    Reject { field: FieldSpec, bound: f64, t: f64 },
}

impl PointSampler {
    fn new(field: &FieldSpec, torus: &Torus, t: f64) -> Self {
        match field.spatial_part() {
            FieldSpec::Const(_) => PointSampler::Uniform,
            FieldSpec::Expr(Builtin::Gaussian { center, sigma, .. }) => {
                PointSampler::Gaussian { center: center.clone(), sigma: *sigma }
            }
            FieldSpec::Table(v) => match WeightedIndex::new(v.iter().map(|x| x.max(0.0))) {
                Ok(w) => PointSampler::Cells(w),
                Err(_) => PointSampler::Uniform,
            },
            other => PointSampler::Reject {
                field: other.clone(),
                bound: other.upper_bound(torus, t, t),
                t,
            },
        }
    }

    fn sample(&self, torus: &Torus, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let uniform = |rng: &mut ChaCha8Rng, out: &mut [f64]| {
            for (x, l) in out.iter_mut().zip(&torus.lengths) {
                *x = rng.random::<f64>() * l;
            }
        };
        match self {
            PointSampler::Uniform => uniform(rng, out),
            PointSampler::Gaussian { center, sigma } => {
                for (a, x) in out.iter_mut().enumerate() {
                    let z: f64 = rng.sample(StandardNormal);
                    *x = center[a] + sigma * z;
                }
                torus.wrap(out);
            }
            PointSampler::Cells(w) => {
                let multi = torus.unravel(w.sample(rng));
                for (a, x) in out.iter_mut().enumerate() {
                    let h = torus.spacing(a);
                    *x = (multi[a] as f64 + rng.random::<f64>() - 0.5) * h;
                }
                torus.wrap(out);
            }
            PointSampler::Reject { field, bound, t } => loop {
                uniform(rng, out);
                if rng.random::<f64>() * bound <= field.eval(torus, out, *t) {
                    break;
                }
            },
        }
    }
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
}

fn add_poisson_points(ens: &mut ParticleEnsemble, field: &FieldSpec, mean: f64, torus: &Torus, t: f64, species: u8) {
    let n = poisson(&mut ens.rng, mean);
    if n == 0 {
        return;
    }
    let sampler = PointSampler::new(field, torus, t);
    let mut x = vec![0.0; torus.dim()];
    for _ in 0..n {
        sampler.sample(torus, &mut ens.rng, &mut x);
        ens.push(&x, species);
    }
}

/// Coherent initial state: a Poisson point process with intensity `v`
/// (and `v_b` for species 1). For discrete death `v` is the mean count and
/// positions are uniform.
pub fn sample_initial(spec: &ModelSpec, rng: ChaCha8Rng) -> Result<ParticleEnsemble> {
    let torus = spec.torus()?;
    let mut ens = ParticleEnsemble::empty(torus.dim(), rng);
    if spec.kind == ModelKind::DiscreteDeath {
        let mean = match spec.v {
            FieldSpec::Const(c) => c,
            _ => return Err(SimError::Config("discrete death needs a constant mean v".into())),
        };
        add_poisson_points(&mut ens, &FieldSpec::Const(1.0), mean, &torus, 0.0, 0);
        return Ok(ens);
    }
    add_poisson_points(&mut ens, &spec.v, spec.v.integral(&torus, 0.0), &torus, 0.0, 0);
    if let Some(vb) = &spec.v_b {
        add_poisson_points(&mut ens, vb, vb.integral(&torus, 0.0), &torus, 0.0, 1);
    }
    Ok(ens)
}

fn check_probability(p: f64, dt: f64) -> Result<()> {
    if p > MAX_STEP_PROBABILITY {
        Err(SimError::StepTooLarge { probability: p, dt })
    } else {
        Ok(())
    }
}

/// Largest one-step event probability for a rate field over `[t, t + dt]`.
fn rate_probability(field: &FieldSpec, torus: &Torus, t: f64, dt: f64) -> f64 {
    -(-field.upper_bound(torus, t, t + dt) * dt).exp_m1()
}

/// Kills each particle of `species` independently with probability
/// `1 − exp(−∫ rate ds)` over the step.
fn unary_kill(ens: &mut ParticleEnsemble, rate: &FieldSpec, torus: &Torus, dt: f64, species: u8, convert: bool) {
    let t = ens.time;
    let n = ens.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        if ens.species[i] != species {
            continue;
        }
        let p = -(-rate.time_integral(torus, ens.position(i), t, t + dt)).exp_m1();
        if ens.rng.random::<f64>() < p {
            if convert {
                ens.species[i] = 1;
            } else {
                keep[i] = false;
            }
        }
    }
    if !convert {
        ens.retain(&keep);
    }
}

fn torus_dist2(torus: &Torus, a: &[f64], b: &[f64]) -> f64 {
    let mut r2 = 0.0;
    for ((x, y), l) in a.iter().zip(b).zip(&torus.lengths) {
        let d = x - y;
        let d = d - l * (d / l).round();
        r2 += d * d;
    }
    r2
}

/// Unordered pairs closer than the cutoff, found with a cell list
/// (all pairs for small ensembles).
fn close_pairs(ens: &ParticleEnsemble, torus: &Torus, cutoff: f64) -> Vec<(usize, usize, f64)> {
    let n = ens.len();
    let d = torus.dim();
    let cells: Vec<usize> = torus.lengths.iter().map(|l| ((l / cutoff).floor() as usize).max(1)).collect();
    let mut out = Vec::new();
    let consider = |i: usize, j: usize, out: &mut Vec<(usize, usize, f64)>| {
        let r2 = torus_dist2(torus, ens.position(i), ens.position(j));
        if r2 <= cutoff * cutoff {
            out.push((i.min(j), i.max(j), r2.sqrt()));
        }
    };
    if n < 64 || cells.iter().any(|c| *c < 3) {
        for i in 0..n {
            for j in i + 1..n {
                consider(i, j, &mut out);
            }
        }
        return out;
    }
    let cell_of = |x: &[f64]| -> Vec<usize> {
        x.iter()
            .enumerate()
            .map(|(a, xa)| (((xa / torus.lengths[a]) * cells[a] as f64) as usize).min(cells[a] - 1))
            .collect()
    };
    let ravel = |m: &[usize]| m.iter().zip(&cells).fold(0, |acc, (i, n)| acc * n + i);
    let total: usize = cells.iter().product();
    let mut buckets = vec![Vec::new(); total];
    for i in 0..n {
        buckets[ravel(&cell_of(ens.position(i)))].push(i);
    }
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut o| {
            (0..d)
                .map(|_| {
                    let v = (o % 3) as i64 - 1;
                    o /= 3;
                    v
                })
                .collect()
        })
        .collect();
    for c in 0..total {
        if buckets[c].is_empty() {
            continue;
        }
        let mut multi = vec![0; d];
        let mut rest = c;
        for a in (0..d).rev() {
            multi[a] = rest % cells[a];
            rest /= cells[a];
        }
        for off in &offsets {
            let nb: Vec<usize> = multi
                .iter()
                .zip(off)
                .zip(&cells)
                .map(|((m, o), n)| (*m as i64 + o).rem_euclid(*n as i64) as usize)
                .collect();
            let c2 = ravel(&nb);
            if c2 < c {
                continue;
            }
            for &i in &buckets[c] {
                for &j in &buckets[c2] {
                    if c2 > c || j > i {
                        consider(i, j, &mut out);
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    out
}

fn annihilate(ens: &mut ParticleEnsemble, kernel: &KernelSpec, torus: &Torus, dt: f64) {
    let pairs = close_pairs(ens, torus, kernel.cutoff());
    let mut keep = vec![true; ens.len()];
    for (i, j, r) in pairs {
        if !(keep[i] && keep[j]) {
            continue;
        }
        let p = -(-kernel.eval(torus.dim(), r) * dt).exp_m1();
        if ens.rng.random::<f64>() < p {
            keep[i] = false;
            keep[j] = false;
        }
    }
    ens.retain(&keep);
}

fn branch(ens: &mut ParticleEnsemble, rate: &FieldSpec, torus: &Torus, dt: f64) {
    let t = ens.time;
    let n = ens.len();
    for i in 0..n {
        let lam = rate.time_integral(torus, ens.position(i), t, t + dt);
        if lam <= 0.0 {
            continue;
        }
        // A Yule process started from one particle holds a geometric number
        // of particles after time dt.
        let extra = Geometric::new((-lam).exp()).expect("probability in (0, 1]").sample(&mut ens.rng) as usize;
        let x = ens.position(i).to_vec();
        for _ in 0..extra {
            ens.push(&x, 0);
        }
    }
}

fn diffuse(ens: &mut ParticleEnsemble, torus: &Torus, diffusion: f64, dt: f64) {
    if diffusion == 0.0 {
        return;
    }
    let s = (2.0 * diffusion * dt).sqrt();
    let d = ens.dim;
    for i in 0..ens.len() {
        for a in 0..d {
            let z: f64 = ens.rng.sample(StandardNormal);
            ens.positions[i * d + a] += s * z;
        }
        torus.wrap(&mut ens.positions[i * d..(i + 1) * d]);
    }
}

/// Advances one replica by `dt`: reactions over `[t, t + dt]` from the
/// current positions, then Brownian displacement with variance `2D·dt` per axis.
pub fn step(ens: &mut ParticleEnsemble, spec: &ModelSpec, dt: f64) -> Result<()> {
    step_on(ens, spec, &spec.torus()?, dt)
}

fn step_on(ens: &mut ParticleEnsemble, spec: &ModelSpec, torus: &Torus, dt: f64) -> Result<()> {
    let t = ens.time;
    match spec.kind {
        ModelKind::DeathDiffusion | ModelKind::DiscreteDeath => {
            let mu = spec.mu()?;
            check_probability(rate_probability(mu, torus, t, dt), dt)?;
            unary_kill(ens, mu, torus, dt, 0, false);
        }
        ModelKind::BrownianTree => {
            let mu = spec.mu()?;
            check_probability(rate_probability(mu, torus, t, dt), dt)?;
            branch(ens, mu, torus, dt);
        }
        ModelKind::ConvertAb => {
            let mu = spec.mu()?;
            check_probability(rate_probability(mu, torus, t, dt), dt)?;
            unary_kill(ens, mu, torus, dt, 0, true);
        }
        ModelKind::SpontBirth | ModelKind::BirthDeathTimedep => {
            if spec.kind == ModelKind::BirthDeathTimedep {
                let nu = spec.nu()?;
                check_probability(rate_probability(nu, torus, t, dt), dt)?;
                unary_kill(ens, nu, torus, dt, 0, false);
            }
            let mu = spec.mu()?;
            let mean = mu.space_time_integral(torus, t, t + dt);
            add_poisson_points(ens, mu, mean, torus, t + 0.5 * dt, 0);
        }
        ModelKind::Annihilation => {
            let k = spec.kernel()?;
            if matches!(k, KernelSpec::Delta { .. }) {
                return Err(SimError::Config("a delta kernel cannot be simulated with particles".into()));
            }
            check_probability(-(-k.max_value(torus.dim()) * dt).exp_m1(), dt)?;
            annihilate(ens, k, torus, dt);
        }
    }
    diffuse(ens, torus, spec.diffusion, dt);
    ens.time = t + dt;
    Ok(())
}

/// Monte Carlo settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    /// Histogram bins per axis; defaults to the model grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<usize>>,
    /// Test functions `u` for the estimator `E[∏ u(x_i)]` over species-0 particles.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gf: Vec<FieldSpec>,
    /// Worker threads; falls back to `RD_THREADS`, then to all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn new(dt: f64, replicas: usize, seed: u64) -> Self {
        SimConfig { dt, replicas, seed, histogram: None, gf: Vec::new(), threads: None }
    }
}

/// Mean and standard error across replicas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    fn from_sums(s: f64, s2: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = s / nf;
        let var = if n > 1 { ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
        Estimate { mean, se: (var / nf).sqrt() }
    }

    /// `(x − mean)/se`, infinite when the estimate has no spread but misses `x`.
    pub fn z_score(&self, x: f64) -> f64 {
        let d = x - self.mean;
        if self.se > 0.0 {
            d / self.se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Replica averages at the final time.
#[derive(Clone, Debug)]
pub struct EstimatorReport {
    pub t: f64,
    pub replicas: usize,
    /// Histogram density per species (count per bin divided by bin volume).
    pub density: Vec<FieldGrid>,
    pub density_se: Vec<FieldGrid>,
    pub count: Estimate,
    pub count_sq: Estimate,
    pub void_probability: Estimate,
    pub gf: Vec<Estimate>,
}

/// Scalar part of a report, for JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarSummary {
    pub t: f64,
    pub replicas: usize,
    pub count: Estimate,
    pub count_sq: Estimate,
    pub void_probability: Estimate,
    pub gf: Vec<Estimate>,
}

impl EstimatorReport {
    pub fn scalars(&self) -> ScalarSummary {
        ScalarSummary {
            t: self.t,
            replicas: self.replicas,
            count: self.count,
            count_sq: self.count_sq,
            void_probability: self.void_probability,
            gf: self.gf.clone(),
        }
    }

    /// Estimate of the log generating functional for the `i`-th test function,
    /// with the delta-method standard error.
    pub fn log_gf(&self, i: usize) -> Estimate {
        let g = self.gf[i];
        Estimate { mean: g.mean.ln(), se: g.se / g.mean }
    }
}

/// Running sums of every observable over a block of replicas.
#[derive(Clone)]
struct Sums {
    hist: Vec<f64>,
    hist2: Vec<f64>,
    n: f64,
    n2: f64,
    n_sq: f64,
    n_sq2: f64,
    void: f64,
    gf: Vec<f64>,
    gf2: Vec<f64>,
}

impl Sums {
    fn new(bins: usize, gfs: usize) -> Self {
        Sums {
            hist: vec![0.0; bins],
            hist2: vec![0.0; bins],
            n: 0.0,
            n2: 0.0,
            n_sq: 0.0,
            n_sq2: 0.0,
            void: 0.0,
            gf: vec![0.0; gfs],
            gf2: vec![0.0; gfs],
        }
    }

    fn merge(mut self, o: &Sums) -> Sums {
        let add = |a: &mut Vec<f64>, b: &Vec<f64>| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.hist, &o.hist);
        add(&mut self.hist2, &o.hist2);
        add(&mut self.gf, &o.gf);
        add(&mut self.gf2, &o.gf2);
        self.n += o.n;
        self.n2 += o.n2;
        self.n_sq += o.n_sq;
        self.n_sq2 += o.n_sq2;
        self.void += o.void;
        self
    }
}

fn thread_count(cfg: &SimConfig) -> Option<usize> {
    cfg.threads.or_else(|| std::env::var("RD_THREADS").ok().and_then(|s| s.parse().ok())).filter(|n| *n > 0)
}

/// Runs `cfg.replicas` independent realisations to `t_end`. Replica `r`
/// uses ChaCha stream `r` of `cfg.seed`, and partial sums are reduced in
/// replica order, so the report is bit-identical for any thread count.
pub fn run(spec: &ModelSpec, cfg: &SimConfig, t_end: f64) -> Result<EstimatorReport> {
    let torus = spec.validate()?;
    if !(cfg.dt > 0.0) || cfg.replicas == 0 || !(t_end >= 0.0) {
        return Err(SimError::Config("need dt > 0, replicas > 0 and t_end ≥ 0".into()));
    }
    if let Some(k) = &spec.kernel {
        if spec.kind == ModelKind::Annihilation
            && k.cutoff() > 0.5 * torus.lengths.iter().copied().fold(f64::INFINITY, f64::min)
        {
            return Err(SimError::Config("kernel cutoff exceeds half the box".into()));
        }
    }
    let hist_shape = cfg.histogram.clone().unwrap_or_else(|| torus.shape.clone());
    let hist_torus = Torus::new(hist_shape, torus.lengths.clone()).map_err(SpecError::from)?;
    let n_species = if matches!(spec.kind, ModelKind::ConvertAb) { 2 } else { 1 };
    let bins = hist_torus.len();
    let n_steps = (t_end / cfg.dt - 1e-9).ceil().max(0.0) as usize;

    let replica = |r: usize, sums: &mut Sums| -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        let mut ens = sample_initial(spec, rng)?;
        for s in 0..n_steps {
            let dt = (t_end - s as f64 * cfg.dt).min(cfg.dt);
            step_on(&mut ens, spec, &torus, dt)?;
        }
        let mut counts = vec![0.0; bins * n_species];
        for i in 0..ens.len() {
            let x = ens.position(i);
            let multi: Vec<usize> = x
                .iter()
                .enumerate()
                .map(|(a, xa)| {
                    let n = hist_torus.shape[a] as i64;
                    ((xa / hist_torus.spacing(a)).round() as i64).rem_euclid(n) as usize
                })
                .collect();
            counts[ens.species[i] as usize * bins + hist_torus.ravel(&multi)] += 1.0;
        }
        for (k, c) in counts.iter().enumerate() {
            sums.hist[k] += c;
            sums.hist2[k] += c * c;
        }
        let n = ens.len() as f64;
        sums.n += n;
        sums.n2 += n * n;
        sums.n_sq += n * n;
        sums.n_sq2 += n * n * n * n;
        sums.void += if ens.is_empty() { 1.0 } else { 0.0 };
        for (g, u) in cfg.gf.iter().enumerate() {
            let prod: f64 = (0..ens.len())
                .filter(|i| ens.species[*i] == 0)
                .map(|i| u.eval(&torus, ens.position(i), t_end))
                .product();
            sums.gf[g] += prod;
            sums.gf2[g] += prod * prod;
        }
        Ok(())
    };

    let blocks: Vec<(usize, usize)> =
        (0..cfg.replicas).step_by(BLOCK).map(|s| (s, (s + BLOCK).min(cfg.replicas))).collect();
    let work = || -> Result<Vec<Sums>> {
        blocks
            .par_iter()
            .map(|(a, b)| {
                let mut sums = Sums::new(bins * n_species, cfg.gf.len());
                for r in *a..*b {
                    replica(r, &mut sums)?;
                }
                Ok(sums)
            })
            .collect()
    };
    let partials = match thread_count(cfg) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let total = partials.iter().fold(Sums::new(bins * n_species, cfg.gf.len()), |acc, s| acc.merge(s));

    let r = cfg.replicas;
    let vol = hist_torus.cell_volume();
    let mut density = Vec::new();
    let mut density_se = Vec::new();
    for s in 0..n_species {
        let est: Vec<Estimate> =
            (0..bins).map(|k| Estimate::from_sums(total.hist[s * bins + k], total.hist2[s * bins + k], r)).collect();
        density.push(FieldGrid::from_real(&hist_torus, &est.iter().map(|e| e.mean / vol).collect::<Vec<_>>()));
        density_se.push(FieldGrid::from_real(&hist_torus, &est.iter().map(|e| e.se / vol).collect::<Vec<_>>()));
    }
    Ok(EstimatorReport {
        t: t_end,
        replicas: r,
        density,
        density_se,
        count: Estimate::from_sums(total.n, total.n2, r),
        count_sq: Estimate::from_sums(total.n_sq, total.n_sq2, r),
        void_probability: Estimate::from_sums(total.void, total.void, r),
        gf: (0..cfg.gf.len()).map(|g| Estimate::from_sums(total.gf[g], total.gf2[g], r)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn cell_list_matches_all_pairs() {
        let t = Torus::cube(2, 4, 10.0);
        let mut ens = ParticleEnsemble::empty(2, rng(3));
        for _ in 0..300 {
            let x = [ens.rng.random::<f64>() * 10.0, ens.rng.random::<f64>() * 10.0];
            ens.push(&x, 0);
        }
        let fast = close_pairs(&ens, &t, 1.1);
        let mut slow = Vec::new();
        for i in 0..ens.len() {
            for j in i + 1..ens.len() {
                let r: f64 = t.min_image(ens.position(i), ens.position(j)).iter().map(|x| x * x).sum::<f64>().sqrt();
                if r <= 1.1 {
                    slow.push((i, j, r));
                }
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn retain_keeps_order() {
        let mut ens = ParticleEnsemble::empty(1, rng(0));
        for i in 0..5 {
            ens.push(&[i as f64], (i % 2) as u8);
        }
        ens.retain(&[true, false, true, false, true]);
        assert_eq!(ens.positions, vec![0.0, 2.0, 4.0]);
        assert_eq!(ens.species, vec![0, 0, 0]);
    }
}
