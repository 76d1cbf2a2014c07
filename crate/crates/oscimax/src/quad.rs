//! Gauss-Legendre panel quadrature shared by every integrating module.

use once_cell::sync::Lazy;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Newton iteration on the Legendre polynomial, seeded with the
    /// Chebyshev-angle approximation of the roots.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_eval(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        nodes.reverse();
        weights.reverse();
        GaussRule { nodes, weights }
    }

    /// Integrate `f` over [a, b] with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Legendre P_n(x) and its derivative via the three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The fixed panel rule; phase variation <= pi/2 per panel keeps the
/// integrand comfortably within its resolving power.
pub static GL16: Lazy<GaussRule> = Lazy::new(|| GaussRule::legendre(16));

/// Adaptive refinement of a smooth (non-oscillatory) integrand on [a, b]:
/// composite GL16, doubling the panel count until the sum settles.
pub fn adaptive_smooth<F: Fn(f64) -> f64>(a: f64, b: f64, rel_tol: f64, f: F) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut n = 1usize;
    let mut prev = GL16.integrate(a, b, &f);
    loop {
        n *= 2;
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let lo = a + i as f64 * h;
            acc += GL16.integrate(lo, lo + h, &f);
        }
        let scale = acc.abs().max(f64::MIN_POSITIVE);
        if (acc - prev).abs() <= rel_tol * scale || n >= 1 << 16 {
            return acc;
        }
        prev = acc;
    }
}

/// Ordinary least squares on (x, y): slope, intercept and the slope's
/// standard error.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (xs.len().max(3) - 2) as f64;
    let stderr = (ss_res / dof / sxx).sqrt();
    (slope, intercept, stderr)
}
