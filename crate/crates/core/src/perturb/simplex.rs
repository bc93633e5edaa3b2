/// Exponential decay rates on consecutive time intervals of an ordered
/// simplex `t > τ_{n−1} > … > τ₁ > 0`, latest interval first.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpProduct {
    pub rates: Vec<f64>,
}

impl ExpProduct {
    pub fn new(rates: Vec<f64>) -> Self {
        ExpProduct { rates }
    }

    pub fn value(&self, t: f64) -> f64 {
        simplex_time_factor(self, t)
    }
}

/// Rates closer than this (in units of `1/t`) are treated as a cluster.
const CLUSTER: f64 = 0.5;

/// `∫ e^{−a₁(t−τ_{n−1})} e^{−a₂(τ_{n−1}−τ_{n−2})} ⋯ e^{−a_n τ₁}` over the
/// ordered simplex, i.e. the convolution `e^{−a₁t} ∗ ⋯ ∗ e^{−a_n t}`.
///
/// Distinct, well separated rates use partial fractions
/// `Σᵢ e^{−aᵢt} / Πⱼ≠ᵢ (aⱼ − aᵢ)`. When rates coincide or nearly do, the
/// same quantity is the divided difference `(−1)^{n−1} f[a₁,…,a_n]` of
/// `f(x) = e^{−xt}`, evaluated with Taylor series on clusters so that
/// confluent limits come out without cancellation.
pub fn simplex_time_factor(ep: &ExpProduct, t: f64) -> f64 {
    let n = ep.rates.len();
    match n {
        0 => return 1.0,
        1 => return (-ep.rates[0] * t).exp(),
        _ => {}
    }
    let mut a = ep.rates.clone();
    a.sort_by(f64::total_cmp);
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    let separated = a.windows(2).all(|w| (w[1] - w[0]) * t > CLUSTER);
    if separated {
        partial_fractions(&a, t)
    } else {
        sign * divided_difference(&a, t)
    }
}

fn partial_fractions(a: &[f64], t: f64) -> f64 {
    (0..a.len())
        .map(|i| {
            let den: f64 = (0..a.len()).filter(|j| *j != i).map(|j| a[j] - a[i]).product();
            (-a[i] * t).exp() / den
        })
        .sum()
}

/// `f[x₀,…,x_{n−1}]` for `f(x) = e^{−tx}` with sorted nodes.
fn divided_difference(x: &[f64], t: f64) -> f64 {
    let n = x.len();
    // dd[i] holds f[x_i .. x_{i+w}] for the current width w
    let mut dd: Vec<f64> = x.iter().map(|xi| (-t * xi).exp()).collect();
    for w in 1..n {
        for i in 0..n - w {
            let j = i + w;
            dd[i] = if (x[j] - x[i]) * t <= 2.0 * CLUSTER {
                taylor_dd(&x[i..=j], t)
            } else {
                (dd[i + 1] - dd[i]) / (x[j] - x[i])
            };
        }
    }
    dd[0]
}

/// Divided difference of `e^{−tx}` over closely spaced nodes:
/// `e^{−tc} Σ_{m≥k} (−t)^m/m! · h_{m−k}(x − c)`, with `h_j` the complete
/// homogeneous symmetric polynomials and `k + 1` nodes.
fn taylor_dd(x: &[f64], t: f64) -> f64 {
    let k = x.len() - 1;
    let c = x.iter().sum::<f64>() / x.len() as f64;
    const TERMS: usize = 60;
    let mut h = vec![0.0; TERMS];
    h[0] = 1.0;
    for xi in x {
        let d = xi - c;
        for j in 1..TERMS {
            h[j] += d * h[j - 1];
        }
    }
    // coefficient (−t)^m / m! starting at m = k
    let mut coeff = (1..=k).fold(1.0, |acc, i| acc * -t / i as f64);
    let mut sum = 0.0;
    // all terms are kept: symmetric nodes make odd h_j vanish exactly
    for (j, hj) in h.iter().enumerate() {
        sum += coeff * hj;
        coeff *= -t / (k + j + 1) as f64;
    }
    (-t * c).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rates_closed_form() {
        let (a, b, t): (f64, f64, f64) = (1.3, 0.4, 2.0);
        let exact = ((-b * t).exp() - (-a * t).exp()) / (a - b);
        assert!((simplex_time_factor(&ExpProduct::new(vec![a, b]), t) - exact).abs() < 1e-15);
    }

    #[test]
    fn repeated_rates_give_polynomial_times_exponential() {
        let (a, t): (f64, f64) = (0.8, 1.7);
        for n in 1..6 {
            let ep = ExpProduct::new(vec![a; n]);
            let fact: f64 = (1..n).map(|i| i as f64).product();
            let exact = t.powi(n as i32 - 1) / fact * (-a * t).exp();
            let got = simplex_time_factor(&ep, t);
            assert!((got - exact).abs() < 1e-14 * exact, "n = {n}: {got} vs {exact}");
        }
    }

    #[test]
    fn branches_agree_near_the_switch() {
        let t = 1.0;
        for gap in [0.49, 0.51, 1.5] {
            let a = [1.0, 1.0 + gap, 2.2 + gap];
            let pf = partial_fractions(&a, t);
            let dd = divided_difference(&a, t);
            assert!((pf - dd).abs() < 1e-14, "{pf} vs {dd}");
        }
        let a = simplex_time_factor(&ExpProduct::new(vec![0.3, 0.3 + 1e-7, 4.0, 9.0]), t);
        let b = simplex_time_factor(&ExpProduct::new(vec![0.3, 0.3, 4.0, 9.0]), t);
        assert!((a - b).abs() < 1e-7 * b.abs());
    }
}
