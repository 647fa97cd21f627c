//! Gauss–Legendre rules and composite momentum grids.

use crate::error::{invalid, BackflowError, Result};
use crate::scalar::Real;

/// Reference Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Gauss-Legendre rule needs at least one node"));
        }
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::from_usize_lossy(n);
        let half = T::lit(0.5);
        let eps = T::epsilon() * T::lit(4.0);
        // Roots come in symmetric pairs; refine the positive half by Newton.
        for i in 0..n.div_ceil(2) {
            let k = T::from_usize_lossy(i + 1);
            let mut x = (T::PI() * (k - T::lit(0.25)) / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= eps {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Appends the rule mapped onto `[a, b]` to the output buffers.
    pub fn map_into(&self, a: T, b: T, nodes: &mut Vec<T>, weights: &mut Vec<T>) {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + w * f(mid + half * x);
        }
        acc * half
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<T: Real>(n: usize, a: T, b: T) -> Result<(Vec<T>, Vec<T>)> {
    if !(a < b) {
        return Err(invalid(format!("interval [{a}, {b}] is empty")));
    }
    let rule = GaussLegendre::new(n)?;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    rule.map_into(a, b, &mut nodes, &mut weights);
    Ok((nodes, weights))
}

/// Builds a composite rule over consecutive panel edges.
pub fn composite_rule<T: Real>(edges: &[T], points_per_panel: usize) -> Result<(Vec<T>, Vec<T>)> {
    if edges.len() < 2 {
        return Err(invalid("composite rule needs at least one panel"));
    }
    let rule = GaussLegendre::new(points_per_panel)?;
    let mut nodes = Vec::with_capacity((edges.len() - 1) * points_per_panel);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in edges.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(invalid("panel edges must be strictly increasing"));
        }
        rule.map_into(pair[0], pair[1], &mut nodes, &mut weights);
    }
    Ok((nodes, weights))
}

/// How a [`MomentumGrid`] was laid out, kept so it can be refined later.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelLayout {
    Uniform {
        panels: usize,
        points_per_panel: usize,
    },
    Oscillatory {
        low_panels: usize,
        high_panels: usize,
        points_per_panel: usize,
    },
}

/// Quadrature nodes and weights on the truncated half-line `(0, u_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    u_max: T,
    layout: Option<PanelLayout>,
}

/// Momentum above which panels are uniform in `u²`.
pub const OSCILLATORY_KNEE: f64 = 2.0;

impl<T: Real> MomentumGrid<T> {
    pub fn from_parts(nodes: Vec<T>, weights: Vec<T>, u_max: T) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(invalid("grid needs equally many nodes and weights, at least one"));
        }
        if !(u_max > T::zero()) {
            return Err(invalid("u_max must be positive"));
        }
        if nodes.iter().any(|&u| !(u > T::zero() && u < u_max)) {
            return Err(invalid("grid nodes must lie in (0, u_max)"));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("grid nodes must be strictly increasing"));
        }
        if weights.iter().any(|&w| !(w > T::zero())) {
            return Err(invalid("grid weights must be positive"));
        }
        Ok(Self {
            nodes,
            weights,
            u_max,
            layout: None,
        })
    }

    /// Equal-width panels on `(0, u_max]`.
    pub fn composite(panels: usize, points_per_panel: usize, u_max: T) -> Result<Self> {
        if panels == 0 || points_per_panel == 0 {
            return Err(invalid("panel and point counts must be at least 1"));
        }
        if !(u_max > T::zero()) {
            return Err(invalid("u_max must be positive"));
        }
        let step = u_max / T::from_usize_lossy(panels);
        let edges: Vec<T> = (0..=panels)
            .map(|k| {
                if k == panels {
                    u_max
                } else {
                    step * T::from_usize_lossy(k)
                }
            })
            .collect();
        let (nodes, weights) = composite_rule(&edges, points_per_panel)?;
        let mut grid = Self::from_parts(nodes, weights, u_max)?;
        grid.layout = Some(PanelLayout::Uniform {
            panels,
            points_per_panel,
        });
        Ok(grid)
    }

    /// Equal-width panels on `[0, 2]` followed by panels of constant width in
    /// `u²` up to `u_max`, so each panel spans a similar number of `cos(u²)`
    /// oscillations.
    pub fn oscillatory(
        low_panels: usize,
        high_panels: usize,
        points_per_panel: usize,
        u_max: T,
    ) -> Result<Self> {
        if low_panels == 0 || points_per_panel == 0 {
            return Err(invalid("panel and point counts must be at least 1"));
        }
        if !(u_max > T::zero()) {
            return Err(invalid("u_max must be positive"));
        }
        let knee = T::lit(OSCILLATORY_KNEE);
        if u_max <= knee {
            return Self::composite(low_panels, points_per_panel, u_max);
        }
        if high_panels == 0 {
            return Err(invalid("u_max above the knee needs at least one high panel"));
        }
        let mut edges = Vec::with_capacity(low_panels + high_panels + 1);
        let low_step = knee / T::from_usize_lossy(low_panels);
        for k in 0..low_panels {
            edges.push(low_step * T::from_usize_lossy(k));
        }
        let (lo2, hi2) = (knee * knee, u_max * u_max);
        let step2 = (hi2 - lo2) / T::from_usize_lossy(high_panels);
        for k in 0..high_panels {
            edges.push((lo2 + step2 * T::from_usize_lossy(k)).sqrt());
        }
        edges.push(u_max);
        let (nodes, weights) = composite_rule(&edges, points_per_panel)?;
        let mut grid = Self::from_parts(nodes, weights, u_max)?;
        grid.layout = Some(PanelLayout::Oscillatory {
            low_panels,
            high_panels,
            points_per_panel,
        });
        Ok(grid)
    }

    pub fn layout(&self) -> Option<PanelLayout> {
        self.layout
    }

    /// Same layout with `factor` times as many panels in every section.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(invalid("refinement factor must be at least 1"));
        }
        match self.layout {
            Some(PanelLayout::Uniform {
                panels,
                points_per_panel,
            }) => Self::composite(panels * factor, points_per_panel, self.u_max),
            Some(PanelLayout::Oscillatory {
                low_panels,
                high_panels,
                points_per_panel,
            }) => Self::oscillatory(
                low_panels * factor,
                high_panels * factor,
                points_per_panel,
                self.u_max,
            ),
            None => Err(invalid("grid built from raw parts cannot be refined")),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn u_max(&self) -> T {
        self.u_max
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

/// Equal-width composite Gauss–Legendre grid on `(0, u_max]`.
pub fn composite_grid<T: Real>(panels: usize, points_per_panel: usize, u_max: T) -> Result<MomentumGrid<T>> {
    MomentumGrid::composite(panels, points_per_panel, u_max)
}

impl<T: Real> TryFrom<(Vec<T>, Vec<T>, T)> for MomentumGrid<T> {
    type Error = BackflowError;

    fn try_from((nodes, weights, u_max): (Vec<T>, Vec<T>, T)) -> Result<Self> {
        Self::from_parts(nodes, weights, u_max)
    }
}

/// Settings for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions<T> {
    pub initial_panels: usize,
    pub points_per_panel: usize,
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_doublings: usize,
    /// Geometrically graded panels towards the left/right end, for integrable
    /// endpoint singularities.
    pub grade_left: bool,
    pub grade_right: bool,
}

impl<T: Real> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self {
            initial_panels: 8,
            points_per_panel: 16,
            abs_tol: T::lit(1e-11),
            rel_tol: T::lit(1e-10),
            max_doublings: 8,
            grade_left: false,
            grade_right: false,
        }
    }
}

const GRADING_RATIO: f64 = 0.2;
const GRADING_LEVELS: usize = 14;

fn panel_edges<T: Real>(a: T, b: T, panels: usize, grade_left: bool, grade_right: bool) -> Vec<T> {
    let h = (b - a) / T::from_usize_lossy(panels);
    let mut edges = vec![a];
    let ratio = T::lit(GRADING_RATIO);
    if grade_left {
        let mut widths = Vec::with_capacity(GRADING_LEVELS);
        let mut w = h;
        for _ in 0..GRADING_LEVELS {
            w = w * ratio;
            widths.push(w);
        }
        for &w in widths.iter().rev() {
            edges.push(a + w);
        }
    }
    for k in 1..panels {
        edges.push(a + h * T::from_usize_lossy(k));
    }
    if grade_right {
        let mut w = h;
        for _ in 0..GRADING_LEVELS {
            w = w * ratio;
            edges.push(b - w);
        }
    }
    edges.push(b);
    edges
}

/// Composite Gauss–Legendre quadrature that doubles its panel count until two
/// successive estimates agree. Returns `(value, error_estimate)`.
///
/// Integrand evaluations at one refinement level run in parallel; the sum is
/// accumulated in node order so results are reproducible.
pub fn integrate_adaptive<T, F>(f: F, a: T, b: T, opts: &AdaptiveOptions<T>) -> Result<(T, T)>
where
    T: Real,
    F: Fn(T) -> Result<T> + Sync,
{
    use rayon::prelude::*;

    if a == b {
        return Ok((T::zero(), T::zero()));
    }
    if !(a < b) {
        return Err(invalid(format!("integration limits [{a}, {b}] are reversed")));
    }
    if opts.initial_panels == 0 {
        return Err(invalid("adaptive quadrature needs at least one panel"));
    }
    let rule = GaussLegendre::<T>::new(opts.points_per_panel)?;
    let estimate = |panels: usize| -> Result<T> {
        let edges = panel_edges(a, b, panels, opts.grade_left, opts.grade_right);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for pair in edges.windows(2) {
            rule.map_into(pair[0], pair[1], &mut nodes, &mut weights);
        }
        let values: Vec<T> = nodes.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
        Ok(values.iter().zip(&weights).map(|(&v, &w)| v * w).sum())
    };
    let mut panels = opts.initial_panels;
    let mut previous = estimate(panels)?;
    let mut error = T::infinity();
    for _ in 0..opts.max_doublings {
        panels *= 2;
        let current = estimate(panels)?;
        error = (current - previous).abs();
        previous = current;
        if error <= opts.abs_tol.max(opts.rel_tol * current.abs()) {
            return Ok((current, error));
        }
    }
    log::debug!("adaptive quadrature stopped at {panels} panels, error estimate {error:e}");
    Ok((previous, error))
}
