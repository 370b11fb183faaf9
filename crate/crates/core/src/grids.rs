//! Sampling grids on the unit circle and the unit disk.
//!
//! The disk grid is organized as dyadic annuli `1 - 2^-k <= |z| < 1 - 2^-(k+1)`
//! each carrying a small Gauss-Legendre radial rule, plus a rim sliver
//! `1 - 2^-K <= |z| < 1` so the ring weights sum to the exact normalized
//! area of the disk. Carleson-box machinery built on top of this grid can
//! then use whole annuli as exact radial layers.

use num_complex::Complex64;

/// A uniform grid on the circle `|z| = radius`.
#[derive(Debug, Clone)]
pub struct CircleGrid {
    pub radius: f64,
    pub m: usize,
    /// Offset in grid-step units; sample `j` sits at angle
    /// `2*pi*(j + offset)/m`.
    pub offset: f64,
}

impl CircleGrid {
    pub fn new(radius: f64, m: usize, offset: f64) -> Self {
        assert!(radius > 0.0 && radius <= 1.0, "radius must be in (0, 1]");
        assert!(m > 0);
        Self { radius, m, offset }
    }

    /// Angle of sample `j`.
    pub fn theta(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * (j as f64 + self.offset) / self.m as f64
    }

    /// Sample point `j`.
    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius, self.theta(j))
    }
}

/// One radial quadrature layer of the disk grid.
#[derive(Debug, Clone)]
pub struct Ring {
    /// Index of the dyadic annulus this ring belongs to (the sliver gets
    /// index `annuli_count`).
    pub annulus: usize,
    /// Radius of the layer.
    pub radius: f64,
    /// Total normalized-area weight of the layer (all angular samples
    /// together).
    pub weight: f64,
    /// True for layers inside the rim sliver `1 - 2^-K <= |z| < 1`.
    pub is_sliver: bool,
}

/// Disk quadrature grid: dyadic annuli with Gauss-Legendre radial layers
/// and uniform angular sampling (half-step offset, so no sample ever lands
/// on the positive real axis where typical symbols are singular).
#[derive(Debug, Clone)]
pub struct DiskGrid {
    pub rings: Vec<Ring>,
    /// Angular samples per ring.
    pub m: usize,
    /// Number of dyadic annuli (the sliver is extra).
    pub annuli: usize,
}

pub const DISK_ANGULAR_OFFSET: f64 = 0.5;

impl DiskGrid {
    /// Builds `annuli` dyadic annuli plus the rim sliver, with `nodes`
    /// Gauss-Legendre layers per annulus and `m` angular samples per layer.
    ///
    /// Annulus `k` covers `t = 1 - |z|` in `(2^-(k+1), 2^-k]`; the sliver
    /// covers `(0, 2^-annuli]`. The area element in `t` is `2(1 - t) dt`
    /// (normalized so the whole disk has area 1), a degree-1 polynomial,
    /// so the ring weights reproduce every annulus area exactly.
    pub fn dyadic_annuli(annuli: usize, nodes: usize, m: usize) -> Self {
        assert!(annuli >= 1 && nodes >= 1 && m >= 1);
        let rule = gauss_legendre(nodes);
        let mut rings = Vec::with_capacity((annuli + 1) * nodes);
        for k in 0..=annuli {
            let (lo, hi, sliver) = if k < annuli {
                (0.5f64.powi(k as i32 + 1), 0.5f64.powi(k as i32), false)
            } else {
                (0.0, 0.5f64.powi(annuli as i32), true)
            };
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for &(x, w) in &rule {
                let t = mid + half * x;
                rings.push(Ring {
                    annulus: k,
                    radius: 1.0 - t,
                    weight: half * w * 2.0 * (1.0 - t),
                    is_sliver: sliver,
                });
            }
        }
        Self { rings, m, annuli }
    }

    /// Angle of angular sample `j` (shared by every ring).
    pub fn theta(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * (j as f64 + DISK_ANGULAR_OFFSET) / self.m as f64
    }

    /// Exact normalized area of the annulus stack `k0..=k1` (no sliver).
    pub fn annulus_stack_area(k0: usize, k1: usize) -> f64 {
        // t in (2^-(k1+1), 2^-k0]; area of {t <= d} is d(2 - d).
        let hi = 0.5f64.powi(k0 as i32);
        let lo = 0.5f64.powi(k1 as i32 + 1);
        hi * (2.0 - hi) - lo * (2.0 - lo)
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Standard initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n - 1.
        for n in 1..=6 {
            let rule = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let num: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!(
                    (num - exact).abs() < 1e-13,
                    "n={n} deg={deg}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn disk_grid_ring_weights_sum_to_one() {
        let grid = DiskGrid::dyadic_annuli(12, 3, 64);
        let total: f64 = grid.rings.iter().map(|r| r.weight).sum();
        assert!((total - 1.0).abs() < 1e-12, "total area {total}");
    }

    #[test]
    fn disk_grid_annulus_areas_are_exact() {
        let grid = DiskGrid::dyadic_annuli(8, 3, 16);
        for k in 0..8 {
            let num: f64 = grid
                .rings
                .iter()
                .filter(|r| r.annulus == k)
                .map(|r| r.weight)
                .sum();
            let exact = DiskGrid::annulus_stack_area(k, k);
            assert!((num - exact).abs() < 1e-14, "annulus {k}: {num} vs {exact}");
        }
    }

    #[test]
    fn disk_grid_quadrature_integrates_smooth_functions() {
        // Normalized integral of |z|^2 over the disk is 1/2.
        let grid = DiskGrid::dyadic_annuli(12, 3, 32);
        let num: f64 = grid.rings.iter().map(|r| r.weight * r.radius.powi(2)).sum();
        assert!((num - 0.5).abs() < 1e-10, "got {num}");
    }

    #[test]
    fn circle_grid_points_lie_on_circle() {
        let g = CircleGrid::new(0.75, 16, 0.5);
        for j in 0..16 {
            assert!((g.point(j).norm() - 0.75).abs() < 1e-15);
        }
        // Half-step offset means no sample at angle zero.
        assert!(g.theta(0) > 0.0);
    }
}
