//! Linear systems: spectra, the unstable-eigenvalue entropy formula,
//! controllability, the Brunovsky normal form, and state/feedback
//! transformations of systems and regions.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::linalg::Schur;
use serde::{Deserialize, Serialize};

use crate::system::FeedbackLaw;
use crate::{Error, GridRegion, Matrix, Result, SystemDef, SystemKind};

/// Half-width of the band around the unit circle treated as neutral.
pub const UNIT_CIRCLE_BAND: f64 = 1e-9;

/// Transformations with a worse condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Eigenvalues closer than this are reported as one with multiplicity.
const GROUP_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl Eigenvalue {
    pub fn modulus(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

fn check_square(a: &Matrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Linear(format!("expected a nonempty square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    Ok(a.nrows())
}

/// Eigenvalues one by one, in the order the Schur form yields them.
fn raw_eigenvalues(a: &Matrix) -> Result<Vec<(f64, f64)>> {
    let d = check_square(a)?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Linear("matrix has non-finite entries".into()));
    }
    let schur = Schur::try_new(a.clone(), 1e-14, 10_000 * d.max(1))
        .ok_or_else(|| Error::Linear("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect())
}

/// Eigenvalues grouped with multiplicities, sorted by real then imaginary
/// part.
pub fn spectrum(a: &Matrix) -> Result<Vec<Eigenvalue>> {
    let mut raw = raw_eigenvalues(a)?;
    raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut out: Vec<Eigenvalue> = Vec::new();
    for (re, im) in raw {
        let scale = 1.0 + libm::hypot(re, im);
        if let Some(e) = out
            .iter_mut()
            .find(|e| libm::hypot(e.re - re, e.im - im) <= GROUP_TOL * scale)
        {
            let m = e.multiplicity as f64;
            e.re = (e.re * m + re) / (m + 1.0);
            e.im = (e.im * m + im) / (m + 1.0);
            e.multiplicity += 1;
        } else {
            out.push(Eigenvalue { re, im, multiplicity: 1 });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// `Σ max(0, n_λ log₂|λ|)` in bits per step.
    pub value: f64,
    /// Eigenvalues within the neutral band of the unit circle.
    pub boundary: Vec<(f64, f64)>,
}

/// Sum of `log₂|λ|` over eigenvalues (with multiplicity) outside the
/// closed unit disk.
pub fn unstable_entropy(a: &Matrix) -> Result<f64> {
    unstable_entropy_report(a).map(|r| r.value)
}

pub fn unstable_entropy_report(a: &Matrix) -> Result<EntropyReport> {
    let mut value = 0.0;
    let mut boundary = Vec::new();
    for (re, im) in raw_eigenvalues(a)? {
        let m = libm::hypot(re, im);
        if libm::fabs(m - 1.0) <= UNIT_CIRCLE_BAND {
            boundary.push((re, im));
        } else if m > 1.0 {
            value += libm::log2(m);
        }
    }
    Ok(EntropyReport { value, boundary })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Controllability {
    pub rank: usize,
    pub dim: usize,
    /// Controllability index per input column (0 for inputs that add
    /// nothing).
    pub indices: Vec<usize>,
}

impl Controllability {
    pub fn controllable(&self) -> bool {
        self.rank == self.dim
    }
}

fn check_pair(a: &Matrix, b: &Matrix) -> Result<(usize, usize)> {
    let d = check_square(a)?;
    if b.nrows() != d || b.ncols() == 0 {
        return Err(Error::Linear(format!("B must be {d}xm with m >= 1, got {}x{}", b.nrows(), b.ncols())));
    }
    Ok((d, b.ncols()))
}

/// Selected columns `A^k b_j` of the controllability matrix, scanned in
/// the order `b_1..b_m, Ab_1..Ab_m, …`, keeping each column independent of
/// those kept before it.
fn select_columns(a: &Matrix, b: &Matrix) -> Result<(Controllability, Vec<Vec<bool>>)> {
    let (d, m) = check_pair(a, b)?;
    let mut blocks = vec![b.clone()];
    for _ in 1..d {
        let next = a * blocks.last().unwrap();
        blocks.push(next);
    }
    let scale = blocks.iter().map(|k| k.amax()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-10 * scale * d as f64;
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut alive = vec![true; m];
    let mut kept = vec![vec![false; d]; m];
    for (k, blk) in blocks.iter().enumerate() {
        for j in 0..m {
            if !alive[j] {
                continue;
            }
            let mut v = blk.column(j).into_owned();
            for q in &basis {
                let c = q.dot(&v);
                v -= q * c;
            }
            // second pass for numerical orthogonality
            for q in &basis {
                let c = q.dot(&v);
                v -= q * c;
            }
            let n = v.norm();
            if n > tol && basis.len() < d {
                basis.push(v / n);
                kept[j][k] = true;
            } else {
                alive[j] = false;
            }
        }
    }
    let indices: Vec<usize> = kept.iter().map(|k| k.iter().filter(|&&x| x).count()).collect();
    let rank = indices.iter().sum();
    Ok((Controllability { rank, dim: d, indices }, kept))
}

pub fn controllability(a: &Matrix, b: &Matrix) -> Result<Controllability> {
    select_columns(a, b).map(|(c, _)| c)
}

/// Rank of the full controllability matrix `[B, AB, …, A^{d−1}B]` via SVD.
pub fn controllability_rank(a: &Matrix, b: &Matrix) -> Result<usize> {
    let (d, m) = check_pair(a, b)?;
    let mut c = Matrix::zeros(d, d * m);
    let mut blk = b.clone();
    for k in 0..d {
        c.view_mut((0, k * m), (d, m)).copy_from(&blk);
        blk = a * blk;
    }
    let sv = c.singular_values();
    let tol = sv.max() * 1e-10 * (d * m) as f64;
    Ok(sv.iter().filter(|&&s| s > tol).count())
}

/// Linear state or feedback transformation.
///
/// `State { t, v }` maps `(x, u) ↦ (Tx, Vu)`. `Feedback { t, v, f }` maps
/// `(x, u) ↦ (Tx, Vu − VFx)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Transformation {
    State { t: Matrix, v: Matrix },
    Feedback { t: Matrix, v: Matrix, f: Matrix },
}

impl Transformation {
    pub fn t(&self) -> &Matrix {
        match self {
            Transformation::State { t, .. } | Transformation::Feedback { t, .. } => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrunovskyForm {
    pub t: Matrix,
    pub v: Matrix,
    pub f: Matrix,
    /// Controllability index per input; chains appear in this order.
    pub indices: Vec<usize>,
    /// `T(A + BF)T⁻¹`: nilpotent shift blocks.
    pub a_c: Matrix,
    /// `TBV⁻¹`: unit columns at the chain ends, then zero columns.
    pub b_c: Matrix,
}

impl BrunovskyForm {
    pub fn transformation(&self) -> Transformation {
        Transformation::Feedback { t: self.t.clone(), v: self.v.clone(), f: self.f.clone() }
    }
}

/// 2-norm condition number.
pub fn condition_number(m: &Matrix) -> f64 {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sv = m.singular_values();
    let min = sv.min();
    if min <= 0.0 { f64::INFINITY } else { sv.max() / min }
}

fn checked_inverse(m: &Matrix, what: &str) -> Result<Matrix> {
    let c = condition_number(m);
    if !(c <= MAX_CONDITION) {
        return Err(Error::Linear(format!("{what} is singular or ill-conditioned (condition number {c:e})")));
    }
    m.clone().try_inverse().ok_or_else(|| Error::Linear(format!("{what} is singular")))
}

/// Feedback transformation into Brunovsky normal form.
pub fn brunovsky(a: &Matrix, b: &Matrix) -> Result<BrunovskyForm> {
    let (cont, kept) = select_columns(a, b)?;
    if !cont.controllable() {
        return Err(Error::Uncontrollable { rank: cont.rank, dim: cont.dim });
    }
    let (d, m) = (cont.dim, b.ncols());
    let chains: Vec<usize> = (0..m).filter(|&j| cont.indices[j] > 0).collect();

    // C̄ = [b_j, A b_j, …, A^{κ_j−1} b_j] over the chain inputs
    let mut cbar = Matrix::zeros(d, d);
    let mut col = 0;
    for &j in &chains {
        let mut v = b.column(j).into_owned();
        for k in 0..d {
            if !kept[j][k] {
                break;
            }
            cbar.set_column(col, &v);
            col += 1;
            v = a * v;
        }
    }
    let cinv = checked_inverse(&cbar, "selected controllability matrix")?;

    let mut t = Matrix::zeros(d, d);
    let r = chains.len();
    let mut mm = Matrix::zeros(r, m);
    let mut nn = Matrix::zeros(r, d);
    let mut row = 0;
    let mut sigma = 0;
    for (c, &j) in chains.iter().enumerate() {
        let kj = cont.indices[j];
        sigma += kj;
        let mut q = cinv.row(sigma - 1).into_owned();
        for k in 0..kj {
            t.set_row(row, &q);
            row += 1;
            if k + 1 == kj {
                mm.set_row(c, &(&q * b).row(0));
            }
            q = &q * a;
        }
        nn.set_row(c, &q);
    }

    // complete V = [M; W] with identity rows
    let mut v = Matrix::zeros(m, m);
    v.view_mut((0, 0), (r, m)).copy_from(&mm);
    let mut filled = r;
    for e in 0..m {
        if filled == m {
            break;
        }
        let mut trial = v.clone();
        trial[(filled, e)] = 1.0;
        let rank = trial.rows(0, filled + 1).into_owned().rank(1e-10);
        if rank == filled + 1 {
            v = trial;
            filled += 1;
        }
    }
    let vinv = checked_inverse(&v, "input transformation V")?;
    let tinv = checked_inverse(&t, "state transformation T")?;
    let mut rhs = Matrix::zeros(m, d);
    rhs.view_mut((0, 0), (r, d)).copy_from(&nn);
    let f = -(&vinv * rhs);
    let a_c = &t * (a + b * &f) * &tinv;
    let b_c = &t * b * &vinv;
    Ok(BrunovskyForm { t, v, f, indices: cont.indices, a_c, b_c })
}

/// The Brunovsky pair for the given chain lengths (in order) and `m`
/// inputs; inputs past the chains get zero columns.
pub fn canonical_pair(lengths: &[usize], m: usize) -> (Matrix, Matrix) {
    let d: usize = lengths.iter().sum();
    let mut a = Matrix::zeros(d, d);
    let mut b = Matrix::zeros(d, m);
    let mut start = 0;
    for (c, &k) in lengths.iter().filter(|&&k| k > 0).enumerate() {
        for i in 0..k - 1 {
            a[(start + i, start + i + 1)] = 1.0;
        }
        b[(start + k - 1, c)] = 1.0;
        start += k;
    }
    (a, b)
}

/// The system in transformed coordinates.
///
/// For a state transformation the alphabet becomes `{V u}` and the
/// dynamics `(TAT⁻¹, TBV⁻¹)`. For a feedback transformation control index
/// `j` applies `V u_j − VFT⁻¹ y` to `(T(A+BF)T⁻¹, TBV⁻¹)`, so that
/// trajectories are mapped by `T` index for index. Products take one
/// transformation per component (`None` for the identity).
pub fn apply_transformation(system: &SystemDef, t: &Transformation) -> Result<SystemDef> {
    let (a, b) = match system.kind() {
        SystemKind::Linear { a, b } => (a, b),
        _ => return Err(Error::Unsupported("transformations of non-linear or composite systems".into())),
    };
    let (d, m) = (a.nrows(), b.ncols());
    let (tm, vm) = match t {
        Transformation::State { t, v } | Transformation::Feedback { t, v, .. } => (t, v),
    };
    if tm.shape() != (d, d) || vm.shape() != (m, m) {
        return Err(Error::Linear(format!("transformation shapes {:?}, {:?} do not fit d={d}, m={m}", tm.shape(), vm.shape())));
    }
    let tinv = checked_inverse(tm, "T")?;
    let vinv = checked_inverse(vm, "V")?;
    let alphabet: Vec<Vec<f64>> = system
        .alphabet()
        .iter()
        .map(|u| (vm * nalgebra::DVector::from_column_slice(u)).iter().copied().collect())
        .collect();
    match t {
        Transformation::State { .. } => SystemDef::linear(tm * a * &tinv, tm * b * &vinv, alphabet),
        Transformation::Feedback { f, .. } => {
            if f.shape() != (m, d) {
                return Err(Error::Linear(format!("F must be {m}x{d}")));
            }
            let law = FeedbackLaw { a: tm * (a + b * f) * &tinv, b: tm * b * &vinv, gain: vm * f * &tinv };
            SystemDef::feedback(law, alphabet)
        }
    }
}

pub fn apply_to_components(system: &SystemDef, ts: &[Option<Transformation>]) -> Result<SystemDef> {
    let comps = system.components();
    if ts.len() != comps.len() {
        return Err(Error::Dimension { expected: comps.len(), got: ts.len() });
    }
    let out: Result<Vec<SystemDef>> = comps
        .iter()
        .zip(ts)
        .map(|(c, t)| match t {
            Some(t) => apply_transformation(c, t),
            None => Ok(c.clone()),
        })
        .collect();
    let out = out?;
    if out.len() == 1 { Ok(out.into_iter().next().unwrap()) } else { SystemDef::product(out) }
}

/// `(perm, scale)` with `(Mx)_k = scale_k · x_{perm[k]}`, if `M` has
/// exactly one nonzero per row and column.
pub fn monomial_parts(m: &Matrix) -> Result<(Vec<usize>, Vec<f64>)> {
    let d = check_square(m)?;
    let mut perm = Vec::with_capacity(d);
    let mut scale = Vec::with_capacity(d);
    for k in 0..d {
        let nz: Vec<usize> = (0..d).filter(|&p| m[(k, p)] != 0.0).collect();
        if nz.len() != 1 {
            return Err(Error::Unsupported(String::from("grid images need a monomial (scaled permutation) matrix")));
        }
        perm.push(nz[0]);
        scale.push(m[(k, nz[0])]);
    }
    Ok((perm, scale))
}

/// Block-diagonal matrix from per-component blocks.
pub fn block_diag(blocks: &[Matrix]) -> Matrix {
    let d: usize = blocks.iter().map(Matrix::nrows).sum();
    let c: usize = blocks.iter().map(Matrix::ncols).sum();
    let mut out = Matrix::zeros(d, c);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), b.shape()).copy_from(b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Image of a region under per-component state maps (`None` = identity).
pub fn transform_region(system: &SystemDef, region: &GridRegion, ts: &[Option<Transformation>]) -> Result<GridRegion> {
    let comps = system.components();
    if ts.len() != comps.len() {
        return Err(Error::Dimension { expected: comps.len(), got: ts.len() });
    }
    let blocks: Vec<Matrix> = comps
        .iter()
        .zip(ts)
        .map(|(c, t)| t.as_ref().map_or_else(|| Matrix::identity(c.state_dim(), c.state_dim()), |t| t.t().clone()))
        .collect();
    let (perm, scale) = monomial_parts(&block_diag(&blocks))?;
    GridRegion::linear_image(region.clone(), perm, scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub controllable: bool,
    pub warnings: Vec<String>,
}

/// Per-component lower thresholds `Σ max(0, n_λ log₂|λ|)`; the network
/// entropy set of a linear network is the product of `[threshold_i, ∞)`.
pub fn rectangular_entropy_set(pairs: &[(Matrix, Matrix)]) -> Result<Vec<Threshold>> {
    pairs
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let rep = unstable_entropy_report(a)?;
            let cont = controllability(a, b)?;
            let mut warnings = Vec::new();
            if !cont.controllable() {
                warnings.push(format!(
                    "component {i}: pair not controllable (rank {} < {}); the formula's hypothesis fails",
                    cont.rank, cont.dim
                ));
            }
            for (re, im) in &rep.boundary {
                warnings.push(format!("component {i}: eigenvalue {re}{im:+}i lies on the unit circle within {UNIT_CIRCLE_BAND:e}"));
            }
            Ok(Threshold { value: rep.value, controllable: cont.controllable(), warnings })
        })
        .collect()
}

/// Grid points of `q` that no control sends into the margin interior of
/// `k` in one step. Empty means the one-step absorption certificate holds.
pub fn strong_invariance_failures(system: &SystemDef, q: &GridRegion, k: &GridRegion) -> Result<Vec<usize>> {
    if q.dim() != system.state_dim() || k.dim() != system.state_dim() {
        return Err(Error::Dimension { expected: system.state_dim(), got: q.dim() });
    }
    let elements = q.discretize()?;
    let mut out = vec![0.0; system.state_dim()];
    Ok((0..elements.len())
        .filter(|&e| {
            !(0..system.alphabet_size()).any(|u| {
                system.step_into(elements.point(e), u, &mut out);
                k.in_interior(&out)
            })
        })
        .collect())
}

/// Growth rate `(1/τ) log₂(N_τ / N_0)` of the number of lattice cells
/// (spacing `1/cells_per_unit`) whose centers lie in `A^τ [0,1]^u`, where
/// `u` runs over the unstable coordinates of a diagonal `A`.
pub fn volume_growth_rate(a: &Matrix, tau: usize, cells_per_unit: usize) -> Result<f64> {
    let d = check_square(a)?;
    if (0..d).any(|i| (0..d).any(|j| i != j && a[(i, j)] != 0.0)) {
        return Err(Error::Unsupported("volume growth check is implemented for diagonal matrices".into()));
    }
    let h = 1.0 / cells_per_unit as f64;
    let count_axis = |lambda: f64, k: usize| -> u64 {
        // image of [0,1] is the interval between 0 and λ^k
        let p = libm::pow(lambda, k as f64);
        let (lo, hi) = if p >= 0.0 { (0.0, p) } else { (p, 0.0) };
        let first = libm::ceil(lo / h - 0.5);
        let last = libm::floor(hi / h - 0.5);
        if last < first { 0 } else { (last - first + 1.0) as u64 }
    };
    let unstable: Vec<f64> = (0..d).map(|i| a[(i, i)]).filter(|l| libm::fabs(*l) > 1.0 + UNIT_CIRCLE_BAND).collect();
    if unstable.is_empty() {
        return Ok(0.0);
    }
    let n0: f64 = unstable.iter().map(|&l| count_axis(l, 0) as f64).product();
    let nt: f64 = unstable.iter().map(|&l| count_axis(l, tau) as f64).product();
    Ok(libm::log2(nt / n0) / tau as f64)
}
