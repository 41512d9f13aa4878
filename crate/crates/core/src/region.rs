//! Target sets `Q` sampled on axis-aligned lattices.
//!
//! A [`GridRegion`] pairs a shape with a lattice and an interior margin
//! `ε`. Grid elements are the lattice points in the closed set; the
//! spanning requirement asks trajectories to stay in `Q` shrunk by `ε`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// Slack for closed-set membership of lattice points.
const CLOSED_TOL: f64 = 1e-12;

/// Interior tests demand this much clearance beyond the margin, so that a
/// trajectory landing on the margin boundary in exact arithmetic is
/// rejected whichever way it rounds.
pub const INTERIOR_TOL: f64 = 1e-9;

/// One lattice axis: `origin + step·k` for `k < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub origin: f64,
    pub step: f64,
    pub count: usize,
    /// Coordinates are taken modulo 1 (circle axes).
    pub periodic: bool,
}

impl Axis {
    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        self.origin + self.step * k as f64
    }

    /// Nearest lattice index, or `None` beyond the ends of a bounded axis.
    #[inline]
    pub fn snap(&self, x: f64) -> Option<usize> {
        let t = libm::round((x - self.origin) / self.step);
        if self.periodic {
            let n = self.count as f64;
            let k = t - n * libm::floor(t / n);
            Some(k as usize % self.count)
        } else if t < 0.0 || t > (self.count - 1) as f64 {
            None
        } else {
            Some(t as usize)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// Box intersected with `|x_a − x_b| ≤ width`.
    DiagonalBand { lower: Vec<f64>, upper: Vec<f64>, axes: (usize, usize), width: f64 },
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Image of another region under `y_k = scale_k · x_{perm[k]}`.
    ///
    /// Membership and the interior test are evaluated on the preimage with
    /// the base region's margin, so the lattice and the spanning problem are
    /// carried over exactly when the scales are powers of two.
    LinearImage { base: Box<GridRegion>, perm: Vec<usize>, scale: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{(x¹, x²) ∈ T² : d(x¹, x²) ≤ δ}` with the torus distance `d`.
    CircleBand { delta: f64 },
    /// The whole torus of the lattice's dimension.
    Torus,
    Predicate(Predicate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRegion {
    shape: Shape,
    axes: Vec<Axis>,
    margin: f64,
}

/// Distance on ℝ/ℤ.
#[inline]
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = libm::fabs(a - b);
    let d = d - libm::floor(d);
    if d > 0.5 { 1.0 - d } else { d }
}

fn bounded_axes(lower: &[f64], upper: &[f64], resolution: &[usize]) -> Result<Vec<Axis>> {
    if lower.len() != upper.len() || lower.is_empty() {
        return Err(Error::InvalidRegion("box bounds must be nonempty and of equal length".into()));
    }
    let res = expand_resolution(resolution, lower.len())?;
    lower
        .iter()
        .zip(upper)
        .zip(res)
        .map(|((&lo, &hi), r)| {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidRegion(format!("box needs lower < upper, got [{lo}, {hi}]")));
            }
            Ok(Axis { origin: lo, step: (hi - lo) / (r - 1) as f64, count: r, periodic: false })
        })
        .collect()
}

fn expand_resolution(resolution: &[usize], dim: usize) -> Result<Vec<usize>> {
    let res = match resolution.len() {
        1 => vec![resolution[0]; dim],
        n if n == dim => resolution.to_vec(),
        n => return Err(Error::Dimension { expected: dim, got: n }),
    };
    if let Some(&r) = res.iter().find(|&&r| r < 2) {
        return Err(Error::InvalidRegion(format!("resolution must be at least 2 per axis, got {r}")));
    }
    Ok(res)
}

fn circle_axes(dim: usize, resolution: &[usize]) -> Result<Vec<Axis>> {
    let res = expand_resolution(resolution, dim)?;
    Ok(res.into_iter().map(|r| Axis { origin: 0.0, step: 1.0 / r as f64, count: r, periodic: true }).collect())
}

impl GridRegion {
    /// `margin = None` picks one cell: the largest lattice step.
    fn assemble(shape: Shape, axes: Vec<Axis>, margin: Option<f64>) -> Result<Self> {
        let margin = margin.unwrap_or_else(|| axes.iter().map(|a| a.step).fold(0.0, f64::max));
        if !(margin >= 0.0) || !margin.is_finite() {
            return Err(Error::InvalidRegion(format!("margin must be a nonnegative number, got {margin}")));
        }
        Ok(GridRegion { shape, axes, margin })
    }

    /// `resolution` gives points per axis (one entry applies to all axes).
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>, resolution: &[usize], margin: Option<f64>) -> Result<Self> {
        let axes = bounded_axes(&lower, &upper, resolution)?;
        Self::assemble(Shape::Box { lower, upper }, axes, margin)
    }

    pub fn circle_band(delta: f64, resolution: &[usize], margin: Option<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.25) {
            return Err(Error::InvalidRegion(format!("band width must lie in (0, 0.25), got {delta}")));
        }
        Self::assemble(Shape::CircleBand { delta }, circle_axes(2, resolution)?, margin)
    }

    pub fn torus(dim: usize, resolution: &[usize], margin: Option<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidRegion("torus needs at least one axis".into()));
        }
        Self::assemble(Shape::Torus, circle_axes(dim, resolution)?, margin)
    }

    /// The lattice spans the bounding box `[lower, upper]`.
    pub fn diagonal_band(
        lower: Vec<f64>,
        upper: Vec<f64>,
        axes: (usize, usize),
        width: f64,
        resolution: &[usize],
        margin: Option<f64>,
    ) -> Result<Self> {
        let lattice = bounded_axes(&lower, &upper, resolution)?;
        if axes.0 >= lower.len() || axes.1 >= lower.len() || axes.0 == axes.1 {
            return Err(Error::InvalidRegion("diagonal band needs two distinct axes".into()));
        }
        if !(width > 0.0) {
            return Err(Error::InvalidRegion("diagonal band width must be positive".into()));
        }
        Self::assemble(Shape::Predicate(Predicate::DiagonalBand { lower, upper, axes, width }), lattice, margin)
    }

    /// The lattice spans the bounding cube of the ball.
    pub fn ball(center: Vec<f64>, radius: f64, resolution: &[usize], margin: Option<f64>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidRegion("ball radius must be positive".into()));
        }
        let lower: Vec<f64> = center.iter().map(|c| c - radius).collect();
        let upper: Vec<f64> = center.iter().map(|c| c + radius).collect();
        let lattice = bounded_axes(&lower, &upper, resolution)?;
        Self::assemble(Shape::Predicate(Predicate::Ball { center, radius }), lattice, margin)
    }

    /// Image under the monomial map `y_k = scale_k · x_{perm[k]}`.
    pub fn linear_image(base: GridRegion, perm: Vec<usize>, scale: Vec<f64>) -> Result<Self> {
        let d = base.dim();
        if perm.len() != d || scale.len() != d {
            return Err(Error::Dimension { expected: d, got: perm.len().min(scale.len()) });
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || core::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidRegion("image map must permute the axes".into()));
            }
        }
        let mut axes = Vec::with_capacity(d);
        for (k, (&p, &s)) in perm.iter().zip(&scale).enumerate() {
            let a = base.axes[p];
            if !(s != 0.0 && s.is_finite()) {
                return Err(Error::InvalidRegion(format!("axis {k}: scale must be finite and nonzero")));
            }
            if a.periodic && s != 1.0 {
                return Err(Error::Unsupported("scaling a circle axis".into()));
            }
            let origin = if s > 0.0 { s * a.origin } else { s * a.coord(a.count - 1) };
            axes.push(Axis { origin, step: libm::fabs(s) * a.step, count: a.count, periodic: a.periodic });
        }
        let margin = base.margin;
        Ok(GridRegion { shape: Shape::Predicate(Predicate::LinearImage { base: Box::new(base), perm, scale }), axes, margin })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Interior margin ε. For images this is the base region's margin,
    /// measured in base coordinates.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn with_margin(mut self, margin: f64) -> Result<Self> {
        if !(margin >= 0.0) || !margin.is_finite() {
            return Err(Error::InvalidRegion(format!("margin must be a nonnegative number, got {margin}")));
        }
        if let Shape::Predicate(Predicate::LinearImage { base, .. }) = &mut self.shape {
            base.margin = margin;
        }
        self.margin = margin;
        Ok(self)
    }

    /// Half the diagonal of a lattice cell restricted to `dims`: the largest
    /// error nearest-cell snapping can introduce on those coordinates.
    pub fn half_cell_diagonal(&self, dims: Range<usize>) -> f64 {
        0.5 * libm::sqrt(self.axes[dims].iter().map(|a| a.step * a.step).sum())
    }

    /// Interior test with margin ε.
    #[inline]
    pub fn in_interior(&self, x: &[f64]) -> bool {
        self.in_interior_with(x, self.margin)
    }

    /// Strict interior (ε = 0).
    pub fn in_strict_interior(&self, x: &[f64]) -> bool {
        self.in_interior_with(x, 0.0)
    }

    pub fn in_interior_with(&self, x: &[f64], eps: f64) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        self.clear_of(x, eps + INTERIOR_TOL)
    }

    fn clear_of(&self, x: &[f64], eps: f64) -> bool {
        match &self.shape {
            Shape::Box { lower, upper } => in_box(x, lower, upper, eps),
            Shape::CircleBand { delta } => circle_distance(x[0], x[1]) < delta - eps,
            Shape::Torus => true,
            Shape::Predicate(Predicate::DiagonalBand { lower, upper, axes, width }) => {
                in_box(x, lower, upper, eps)
                    && (width - libm::fabs(x[axes.0] - x[axes.1])) / core::f64::consts::SQRT_2 > eps
            }
            Shape::Predicate(Predicate::Ball { center, radius }) => dist(x, center) < radius - eps,
            Shape::Predicate(Predicate::LinearImage { base, perm, scale }) => {
                let pre = preimage(x, perm, scale);
                base.clear_of(&pre, eps)
            }
        }
    }

    /// Closed membership, with a tiny tolerance for lattice round-off.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { lower, upper } => in_box(x, lower, upper, -CLOSED_TOL),
            Shape::CircleBand { delta } => circle_distance(x[0], x[1]) <= delta + CLOSED_TOL,
            Shape::Torus => true,
            Shape::Predicate(Predicate::DiagonalBand { lower, upper, axes, width }) => {
                in_box(x, lower, upper, -CLOSED_TOL) && libm::fabs(x[axes.0] - x[axes.1]) <= width + CLOSED_TOL
            }
            Shape::Predicate(Predicate::Ball { center, radius }) => dist(x, center) <= radius + CLOSED_TOL,
            Shape::Predicate(Predicate::LinearImage { base, perm, scale }) => base.contains(&preimage(x, perm, scale)),
        }
    }

    /// All lattice points of the closed set, lexicographic in the axis
    /// indices (axis 0 most significant).
    pub fn discretize(&self) -> Result<GridElements> {
        let d = self.dim();
        let total = self.axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.count));
        let total = total.filter(|&t| t <= 1 << 28).ok_or_else(|| Error::Config("lattice has too many points".into()))?;
        let mut out = GridElements { dim: d, coords: Vec::new(), cells: Vec::new(), lattice: Vec::new() };
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        for flat in 0..total {
            for (k, a) in self.axes.iter().enumerate() {
                x[k] = self.axis_coord(k, a, idx[k]);
            }
            if self.contains(&x) {
                out.coords.extend_from_slice(&x);
                out.cells.extend(idx.iter().map(|&i| i as u32));
                out.lattice.push(flat);
            }
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < self.axes[k].count {
                    break;
                }
                idx[k] = 0;
            }
        }
        if out.lattice.is_empty() {
            return Err(Error::Config("region has no grid points at this resolution".into()));
        }
        Ok(out)
    }

    /// Lattice coordinate, pinning the last point of a box axis to the bound
    /// so that round-off never pushes it outside.
    fn axis_coord(&self, k: usize, a: &Axis, i: usize) -> f64 {
        if let Shape::Box { upper, .. } = &self.shape {
            if i + 1 == a.count {
                return upper[k];
            }
        }
        a.coord(i)
    }

    pub fn lattice_index(&self, cells: &[usize]) -> usize {
        cells.iter().zip(&self.axes).fold(0, |acc, (&c, a)| acc * a.count + c)
    }

    /// Grid element nearest to `x`: the snapped lattice point when it lies
    /// in the set, otherwise the closest element by (torus-aware) distance.
    pub fn nearest_element(&self, elements: &GridElements, x: &[f64]) -> usize {
        let mut flat = Some(0usize);
        for (a, &xi) in self.axes.iter().zip(x) {
            flat = match (flat, a.snap(xi)) {
                (Some(f), Some(c)) => Some(f * a.count + c),
                _ => None,
            };
        }
        if let Some(i) = flat.and_then(|f| elements.find_lattice(f)) {
            return i;
        }
        let mut best = (f64::INFINITY, 0);
        for i in 0..elements.len() {
            let p = elements.point(i);
            let d2: f64 = self
                .axes
                .iter()
                .zip(p.iter().zip(x))
                .map(|(a, (&pi, &xi))| {
                    let d = if a.periodic { circle_distance(pi, xi) } else { pi - xi };
                    d * d
                })
                .sum();
            if d2 < best.0 {
                best = (d2, i);
            }
        }
        best.1
    }

    /// Region seen by the coordinates in `dims`.
    ///
    /// Boxes project exactly. A circle band projects onto the whole torus.
    /// Predicate regions give the bounding box of the projected grid points
    /// on the same lattice, an over-approximation of the projection.
    pub fn project(&self, dims: Range<usize>) -> Result<GridRegion> {
        if dims.start >= dims.end || dims.end > self.dim() {
            return Err(Error::InvalidRegion(format!("projection range {dims:?} outside 0..{}", self.dim())));
        }
        if dims.len() == self.dim() {
            return Ok(self.clone());
        }
        let axes = self.axes[dims.clone()].to_vec();
        let shape = match &self.shape {
            Shape::Box { lower, upper } => Shape::Box { lower: lower[dims.clone()].to_vec(), upper: upper[dims].to_vec() },
            Shape::CircleBand { .. } | Shape::Torus => Shape::Torus,
            Shape::Predicate(_) => return self.bounding_projection(dims),
        };
        Ok(GridRegion { shape, axes, margin: self.margin })
    }

    fn bounding_projection(&self, dims: Range<usize>) -> Result<GridRegion> {
        let elements = self.discretize()?;
        let k = dims.len();
        let mut lo = vec![usize::MAX; k];
        let mut hi = vec![0usize; k];
        for i in 0..elements.len() {
            for (j, &c) in elements.cell(i)[dims.clone()].iter().enumerate() {
                lo[j] = lo[j].min(c as usize);
                hi[j] = hi[j].max(c as usize);
            }
        }
        let mut axes = Vec::with_capacity(k);
        let (mut lower, mut upper) = (Vec::with_capacity(k), Vec::with_capacity(k));
        for (j, a) in self.axes[dims].iter().enumerate() {
            if a.periodic {
                return Err(Error::Unsupported("bounding projection of a predicate on circle axes".into()));
            }
            // keep the lattice even when all points share one coordinate
            let (l, h) = if lo[j] == hi[j] {
                if hi[j] + 1 < a.count { (lo[j], hi[j] + 1) } else { (lo[j] - 1, hi[j]) }
            } else {
                (lo[j], hi[j])
            };
            lower.push(a.coord(l));
            upper.push(a.coord(h));
            axes.push(Axis { origin: a.coord(l), step: a.step, count: h - l + 1, periodic: false });
        }
        let margin = match &self.shape {
            Shape::Predicate(Predicate::LinearImage { scale, .. }) => {
                self.margin * scale.iter().map(|s| libm::fabs(*s)).fold(f64::INFINITY, f64::min)
            }
            _ => self.margin,
        };
        Ok(GridRegion { shape: Shape::Box { lower, upper }, axes, margin })
    }

    /// Map of a state into the coordinates of an image region.
    pub fn image_of(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.shape {
            Shape::Predicate(Predicate::LinearImage { perm, scale, .. }) => {
                Some(perm.iter().zip(scale).map(|(&p, &s)| s * x[p]).collect())
            }
            _ => None,
        }
    }
}

#[inline]
fn in_box(x: &[f64], lower: &[f64], upper: &[f64], eps: f64) -> bool {
    x.iter().zip(lower.iter().zip(upper)).all(|(&v, (&lo, &hi))| v - lo > eps && hi - v > eps)
}

#[inline]
fn dist(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn preimage(y: &[f64], perm: &[usize], scale: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; y.len()];
    for (k, (&p, &s)) in perm.iter().zip(scale).enumerate() {
        x[p] = y[k] / s;
    }
    x
}

/// Grid points of a region, in lexicographic lattice order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridElements {
    dim: usize,
    coords: Vec<f64>,
    cells: Vec<u32>,
    lattice: Vec<usize>,
}

impl GridElements {
    #[inline]
    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Per-axis lattice indices of element `i`.
    #[inline]
    pub fn cell(&self, i: usize) -> &[u32] {
        &self.cells[i * self.dim..(i + 1) * self.dim]
    }

    /// Flat lattice index of element `i`; strictly increasing in `i`.
    #[inline]
    pub fn lattice(&self, i: usize) -> usize {
        self.lattice[i]
    }

    pub fn find_lattice(&self, flat: usize) -> Option<usize> {
        self.lattice.binary_search(&flat).ok()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}
