//! Small numerical helpers shared by the engines.

/// `sin(x)/x`, with the removable singularity at 0 handled by its series.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

pub fn sech(x: f64) -> f64 {
    // 1/cosh overflows gracefully to 0 for large |x|
    1.0 / x.cosh()
}

/// Inverse of [`sech`] on (0, 1].
pub fn arcsech(y: f64) -> f64 {
    debug_assert!(y > 0.0 && y <= 1.0);
    ((1.0 + (1.0 - y * y).sqrt()) / y).ln()
}

/// Composite Simpson rule on `[a, b]` with `n` intervals (`n` rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol`; returns `(x_min, f_min)`.
pub fn golden_section_minimize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }

    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Linear interpolation on a strictly increasing grid. `None` outside the grid.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    let j = xs.partition_point(|&v| v <= x);
    if j == 0 {
        return Some(ys[0]);
    }
    if j >= n {
        return Some(ys[n - 1]);
    }
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    Some(ys[j - 1] + t * (ys[j] - ys[j - 1]))
}

/// Vertex of the parabola through three samples `(xs[i], ys[i])`.
///
/// The vertex abscissa is clamped to `[xs[0], xs[2]]`; collinear samples
/// return the middle sample.
pub fn parabola_vertex(xs: [f64; 3], ys: [f64; 3]) -> (f64, f64) {
    // work in units of the bracket width, centred on the middle node
    let scale = xs[2] - xs[0];
    let u0 = (xs[0] - xs[1]) / scale;
    let u2 = (xs[2] - xs[1]) / scale;
    let (y0, y1, y2) = (ys[0], ys[1], ys[2]);
    // y = y1 + b u + c u²
    let denom = u0 * u2 * (u0 - u2);
    if denom == 0.0 {
        return (xs[1], y1);
    }
    let c = (u2 * (y0 - y1) - u0 * (y2 - y1)) / denom;
    let b = (u0 * u0 * (y2 - y1) - u2 * u2 * (y0 - y1)) / denom;
    if c == 0.0 {
        return (xs[1], y1);
    }
    let u = (-b / (2.0 * c)).clamp(u0, u2);
    (xs[1] + u * scale, y1 + b * u + c * u * u)
}

/// High-order integration of uniformly sampled data.
///
/// Full cells use the integral of the 6-point Lagrange interpolant; partial
/// cells evaluate the same interpolant at 3-point Gauss-Legendre nodes, which
/// is exact for quintics.
#[derive(Debug, Clone)]
pub struct SampledIntegrator<'a> {
    x0: f64,
    h: f64,
    ys: &'a [f64],
    cumulative: Vec<f64>,
}

impl<'a> SampledIntegrator<'a> {
    /// Needs at least six samples.
    pub fn new(x0: f64, h: f64, ys: &'a [f64]) -> Self {
        assert!(ys.len() >= 6, "need at least six samples");
        let cells = ys.len() - 1;
        let mut cumulative = Vec::with_capacity(ys.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for cell in 0..cells {
            acc += Self::cell_integral(ys, cell) * h;
            cumulative.push(acc);
        }
        Self { x0, h, ys, cumulative }
    }

    fn stencil_start(len: usize, cell: usize) -> usize {
        cell.saturating_sub(2).min(len - 6)
    }

    // Integral over cell [cell, cell+1] in units of h.
    fn cell_integral(ys: &[f64], cell: usize) -> f64 {
        let start = Self::stencil_start(ys.len(), cell);
        if start + 2 == cell {
            let y = &ys[start..start + 6];
            (11.0 * y[0] - 93.0 * y[1] + 802.0 * y[2] + 802.0 * y[3] - 93.0 * y[4] + 11.0 * y[5]) / 1440.0
        } else {
            Self::partial(ys, cell, 1.0)
        }
    }

    fn lagrange(ys: &[f64], start: usize, s: f64) -> f64 {
        // s measured in cells from node `start`
        let mut total = 0.0;
        for i in 0..6 {
            let mut basis = 1.0;
            for j in 0..6 {
                if i != j {
                    basis *= (s - j as f64) / (i as f64 - j as f64);
                }
            }
            total += basis * ys[start + i];
        }
        total
    }

    // Integral from node `cell` to `cell + frac`, in units of h.
    fn partial(ys: &[f64], cell: usize, frac: f64) -> f64 {
        const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
        const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let start = Self::stencil_start(ys.len(), cell);
        let base = (cell - start) as f64;
        let mut acc = 0.0;
        for (node, weight) in NODES.iter().zip(WEIGHTS) {
            let s = base + 0.5 * frac * (node + 1.0);
            acc += weight * Self::lagrange(ys, start, s);
        }
        0.5 * frac * acc
    }

    /// Antiderivative from the first sample to `x` (clamped to the sampled range).
    pub fn antiderivative(&self, x: f64) -> f64 {
        let cells = self.ys.len() - 1;
        let pos = ((x - self.x0) / self.h).clamp(0.0, cells as f64);
        let mut cell = pos.floor() as usize;
        if cell >= cells {
            cell = cells - 1;
        }
        let frac = pos - cell as f64;
        let mut value = self.cumulative[cell];
        if frac > 1e-12 {
            value += Self::partial(self.ys, cell, frac) * self.h;
        }
        value
    }

    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        self.antiderivative(b) - self.antiderivative(a)
    }
}
