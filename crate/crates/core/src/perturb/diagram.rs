use std::f64::consts::PI;

use num_complex::Complex64;

use super::{simplex_time_factor, ExpProduct, MomentumGrid, PerturbError, Result};

/// Relative size of the boundary contributions above which the lattice is
/// declared too coarse.
const TAIL_TOL: f64 = 1e-6;

/// Lattice of integer frequencies `⌊−N/2⌋+1 ..= ⌊N/2⌋` on each axis,
/// matching the grid's FFT ordering.
struct Lattice {
    shape: Vec<usize>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    step: Vec<f64>,
}

impl Lattice {
    fn new(grid: &MomentumGrid) -> Self {
        let shape = grid.torus.shape.clone();
        let hi: Vec<i64> = shape.iter().map(|n| (*n / 2) as i64).collect();
        let lo: Vec<i64> = shape.iter().zip(&hi).map(|(n, h)| h + 1 - *n as i64).collect();
        let step = grid.torus.lengths.iter().map(|l| 2.0 * PI / l).collect();
        Lattice { shape, lo, hi, step }
    }

    /// Flat grid index of frequency vector `f`, if it lies on the lattice.
    fn index(&self, f: &[i64]) -> Option<usize> {
        let mut idx = 0;
        for a in 0..f.len() {
            if f[a] < self.lo[a] || f[a] > self.hi[a] {
                return None;
            }
            idx = idx * self.shape[a] + f[a].rem_euclid(self.shape[a] as i64) as usize;
        }
        Some(idx)
    }

    fn on_boundary(&self, f: &[i64]) -> bool {
        f.iter().enumerate().any(|(a, x)| *x == self.lo[a] || *x == self.hi[a])
    }

    fn frequencies(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for a in 0..self.shape.len() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (self.lo[a]..=self.hi[a]).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn norm2(&self, f: &[i64]) -> f64 {
        f.iter().zip(&self.step).map(|(x, s)| (*x as f64 * s).powi(2)).sum()
    }
}

fn combine(terms: &[(i64, &[i64])]) -> Vec<i64> {
    let d = terms[0].1.len();
    (0..d).map(|a| terms.iter().map(|(c, v)| c * v[a]).sum()).collect()
}

/// The third-order sample diagram contributing to the density at momentum
/// `k` (an integer frequency vector):
///
/// `−1/(2(2π)^d) Σ_{l,m,n} dl dm dn R_l R_m R_n T(k,l,m,n;t) v_{k−m−n} v_m v_n`
///
/// where `T` is the simplex time factor whose interval rates are the total
/// squared momenta carried across each interval, latest first:
/// `D k²`, `D[(k−m−n+l)² + (m+n−l)²]`, `D[(k−m−n+l)² + (m−l)² + n²]`,
/// `D[(k−m−n)² + m² + n²]`. Momenta outside the grid's frequency range
/// contribute nothing.
pub fn third_order_term(grid: &MomentumGrid, k: &[i64], t: f64) -> Result<Complex64> {
    let lat = Lattice::new(grid);
    let d = grid.torus.dim();
    let dk = grid.torus.dk_volume();
    let diff = grid.diffusion;
    let freqs = lat.frequencies();
    let r = &grid.r_hat.values;
    let v = &grid.v_hat.values;
    let rate0 = diff * lat.norm2(k);

    let mut total = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for m in &freqs {
        let im = lat.index(m).expect("lattice point");
        if r[im] == Complex64::new(0.0, 0.0) || v[im] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for n in &freqs {
            let inn = lat.index(n).expect("lattice point");
            let q = combine(&[(1, k), (-1, m), (-1, n)]);
            let Some(iq) = lat.index(&q) else { continue };
            let outer = r[im] * r[inn] * v[iq] * v[im] * v[inn];
            if outer == Complex64::new(0.0, 0.0) {
                continue;
            }
            let rate3 = diff * (lat.norm2(&q) + lat.norm2(m) + lat.norm2(n));
            let edge_mn = lat.on_boundary(m) || lat.on_boundary(n) || lat.on_boundary(&q);
            for l in &freqs {
                let il = lat.index(l).expect("lattice point");
                if r[il] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let a = combine(&[(1, k), (-1, m), (-1, n), (1, l)]);
                let b = combine(&[(1, m), (1, n), (-1, l)]);
                let c = combine(&[(1, m), (-1, l)]);
                let rates = vec![
                    rate0,
                    diff * (lat.norm2(&a) + lat.norm2(&b)),
                    diff * (lat.norm2(&a) + lat.norm2(&c) + lat.norm2(n)),
                    rate3,
                ];
                let term = outer * r[il] * simplex_time_factor(&ExpProduct::new(rates), t);
                total += term;
                if edge_mn || lat.on_boundary(l) {
                    tail += term.norm();
                }
            }
        }
    }
    let scale = -dk.powi(3) / (2.0 * (2.0 * PI).powi(d as i32));
    if tail > TAIL_TOL * total.norm() {
        return Err(PerturbError::GridTooCoarse { tail: tail * scale.abs(), total: total.norm() * scale.abs() });
    }
    Ok(total * scale)
}
