//! Discrete-time control systems over finite control alphabets.
//!
//! A [`SystemDef`] is one of: a linear plant `x⁺ = Ax + Bu`, a circle
//! multiplier `x⁺ = (αx + u) mod 1`, a linear plant driven through a state
//! feedback (the result of a feedback transformation), or a direct product
//! of such systems. Controls are referred to by their index in the
//! alphabet. Product alphabets are the Cartesian product of the component
//! alphabets and are addressed by a mixed-radix flat index with component
//! 0 as the most significant digit; they are never materialized.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Linear dynamics acting through an affine state feedback.
///
/// Control index `j` applied at state `y` feeds the value
/// `v_j(y) = c_j − G y` into `y⁺ = A y + B v`, where `c_j` is the j-th
/// alphabet entry. This is what a feedback transformation
/// `(x, u) ↦ (Tx, Vu − VFx)` does to an alphabet of constant controls.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackLaw {
    pub a: Matrix,
    pub b: Matrix,
    pub gain: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    Linear { a: Matrix, b: Matrix },
    CircleMultiplier { alpha: i64 },
    Feedback(FeedbackLaw),
    Product(Vec<SystemDef>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDef {
    state_dim: usize,
    /// Empty for products; see [`SystemDef::control_value`].
    alphabet: Vec<Vec<f64>>,
    alphabet_size: usize,
    kind: SystemKind,
}

/// `count` evenly spaced scalar control values on `[lo, hi]`.
pub fn uniform_levels(lo: f64, hi: f64, count: usize) -> Vec<Vec<f64>> {
    match count {
        0 => Vec::new(),
        1 => vec![vec![0.5 * (lo + hi)]],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|k| vec![lo + step * k as f64]).collect()
        }
    }
}

fn check_alphabet(alphabet: &[Vec<f64>], m: usize) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::InvalidSystem("control alphabet is empty".into()));
    }
    if alphabet.len() > u32::MAX as usize {
        return Err(Error::InvalidSystem("control alphabet too large".into()));
    }
    for u in alphabet {
        if u.len() != m {
            return Err(Error::Dimension { expected: m, got: u.len() });
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("control values must be finite".into()));
        }
    }
    Ok(())
}

impl SystemDef {
    pub fn linear(a: Matrix, b: Matrix, alphabet: Vec<Vec<f64>>) -> Result<Self> {
        let d = a.nrows();
        if d == 0 || a.ncols() != d {
            return Err(Error::InvalidSystem(format!("A must be square and nonempty, got {}x{}", a.nrows(), a.ncols())));
        }
        if b.nrows() != d {
            return Err(Error::Dimension { expected: d, got: b.nrows() });
        }
        check_alphabet(&alphabet, b.ncols())?;
        Ok(SystemDef { state_dim: d, alphabet_size: alphabet.len(), alphabet, kind: SystemKind::Linear { a, b } })
    }

    pub fn circle(alpha: i64, alphabet: Vec<Vec<f64>>) -> Result<Self> {
        if alpha.unsigned_abs() < 2 {
            return Err(Error::InvalidSystem(format!("circle multiplier needs |alpha| >= 2, got {alpha}")));
        }
        check_alphabet(&alphabet, 1)?;
        Ok(SystemDef {
            state_dim: 1,
            alphabet_size: alphabet.len(),
            alphabet,
            kind: SystemKind::CircleMultiplier { alpha },
        })
    }

    /// `alphabet` holds the constant parts `c_j` of the feedback controls.
    pub fn feedback(law: FeedbackLaw, alphabet: Vec<Vec<f64>>) -> Result<Self> {
        let d = law.a.nrows();
        let m = law.b.ncols();
        if d == 0 || law.a.ncols() != d || law.b.nrows() != d {
            return Err(Error::InvalidSystem("feedback law dimensions are inconsistent".into()));
        }
        if law.gain.nrows() != m || law.gain.ncols() != d {
            return Err(Error::Dimension { expected: m * d, got: law.gain.nrows() * law.gain.ncols() });
        }
        check_alphabet(&alphabet, m)?;
        Ok(SystemDef { state_dim: d, alphabet_size: alphabet.len(), alphabet, kind: SystemKind::Feedback(law) })
    }

    pub fn product(components: Vec<SystemDef>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidSystem("product of zero systems".into()));
        }
        let state_dim = components.iter().map(|c| c.state_dim).sum();
        let mut size: u64 = 1;
        for c in &components {
            size = size
                .checked_mul(c.alphabet_size as u64)
                .filter(|&s| s <= u32::MAX as u64)
                .ok_or_else(|| Error::InvalidSystem("product alphabet exceeds 2^32 controls".into()))?;
        }
        Ok(SystemDef { state_dim, alphabet: Vec::new(), alphabet_size: size as usize, kind: SystemKind::Product(components) })
    }

    #[inline]
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    #[inline]
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    /// Components of a product, or the system itself as a single component.
    pub fn components(&self) -> &[SystemDef] {
        match &self.kind {
            SystemKind::Product(c) => c,
            _ => core::slice::from_ref(self),
        }
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// State coordinate range owned by component `i`.
    pub fn component_range(&self, i: usize) -> core::ops::Range<usize> {
        let comps = self.components();
        let start: usize = comps[..i].iter().map(|c| c.state_dim).sum();
        start..start + comps[i].state_dim
    }

    /// Per state coordinate: whether it lives on the circle.
    pub fn periodic_axes(&self) -> Vec<bool> {
        match &self.kind {
            SystemKind::CircleMultiplier { .. } => vec![true],
            SystemKind::Product(c) => c.iter().flat_map(|s| s.periodic_axes()).collect(),
            _ => vec![false; self.state_dim],
        }
    }

    /// The control vector for index `idx`. For feedback systems this is the
    /// constant part; the applied value also depends on the state.
    pub fn control_value(&self, idx: usize) -> Result<Vec<f64>> {
        self.check_control(idx)?;
        Ok(match &self.kind {
            SystemKind::Product(comps) => {
                let parts = self.split_control(idx);
                comps.iter().zip(parts).flat_map(|(c, j)| c.control_value(j).unwrap()).collect()
            }
            _ => self.alphabet[idx].clone(),
        })
    }

    /// Alphabet of a non-product system.
    pub fn alphabet(&self) -> &[Vec<f64>] {
        &self.alphabet
    }

    /// Decompose a product control index into component indices.
    pub fn split_control(&self, mut idx: usize) -> Vec<usize> {
        let comps = self.components();
        let mut out = vec![0; comps.len()];
        if comps.len() == 1 {
            out[0] = idx;
            return out;
        }
        for (slot, c) in out.iter_mut().zip(comps).rev() {
            *slot = idx % c.alphabet_size;
            idx /= c.alphabet_size;
        }
        out
    }

    pub fn join_control(&self, parts: &[usize]) -> Result<usize> {
        let comps = self.components();
        if parts.len() != comps.len() {
            return Err(Error::Dimension { expected: comps.len(), got: parts.len() });
        }
        let mut idx = 0;
        for (&p, c) in parts.iter().zip(comps) {
            if p >= c.alphabet_size {
                return Err(Error::ControlIndex { index: p, size: c.alphabet_size });
            }
            idx = idx * c.alphabet_size + p;
        }
        Ok(idx)
    }

    fn check_control(&self, idx: usize) -> Result<()> {
        if idx >= self.alphabet_size {
            Err(Error::ControlIndex { index: idx, size: self.alphabet_size })
        } else {
            Ok(())
        }
    }

    pub fn step(&self, state: &[f64], control: usize) -> Result<Vec<f64>> {
        if state.len() != self.state_dim {
            return Err(Error::Dimension { expected: self.state_dim, got: state.len() });
        }
        self.check_control(control)?;
        let mut out = vec![0.0; self.state_dim];
        self.step_into(state, control, &mut out);
        Ok(out)
    }

    /// Unchecked, allocation-free step. `state` and `out` must have length
    /// `state_dim` and `control` must be a valid index.
    pub fn step_into(&self, state: &[f64], control: usize, out: &mut [f64]) {
        debug_assert_eq!(state.len(), self.state_dim);
        debug_assert_eq!(out.len(), self.state_dim);
        match &self.kind {
            SystemKind::Linear { a, b } => {
                let u = &self.alphabet[control];
                affine(a, b, state, u, out);
            }
            SystemKind::CircleMultiplier { alpha } => {
                out[0] = wrap_unit(*alpha as f64 * state[0] + self.alphabet[control][0]);
            }
            SystemKind::Feedback(law) => {
                let c = &self.alphabet[control];
                let m = law.b.ncols();
                // v = c - G y; at most a handful of inputs, so a small
                // stack buffer avoids allocating.
                let mut buf = [0.0f64; 16];
                let mut heap;
                let v: &mut [f64] = if m <= buf.len() {
                    &mut buf[..m]
                } else {
                    heap = vec![0.0; m];
                    &mut heap
                };
                for (r, vr) in v.iter_mut().enumerate() {
                    let mut s = c[r];
                    for (k, y) in state.iter().enumerate() {
                        s -= law.gain[(r, k)] * y;
                    }
                    *vr = s;
                }
                affine(&law.a, &law.b, state, v, out);
            }
            SystemKind::Product(comps) => {
                let mut idx = control;
                let mut end = self.state_dim;
                for c in comps.iter().rev() {
                    let j = idx % c.alphabet_size;
                    idx /= c.alphabet_size;
                    let start = end - c.state_dim;
                    c.step_into(&state[start..end], j, &mut out[start..end]);
                    end = start;
                }
            }
        }
    }

    /// States `x0, φ(1, x0, ω), …, φ(τ, x0, ω)`.
    pub fn trajectory(&self, x0: &[f64], word: &ControlWord) -> Result<Vec<Vec<f64>>> {
        if x0.len() != self.state_dim {
            return Err(Error::Dimension { expected: self.state_dim, got: x0.len() });
        }
        let mut traj = Vec::with_capacity(word.len() + 1);
        traj.push(x0.to_vec());
        for &u in &word.entries {
            self.check_control(u as usize)?;
            let mut next = vec![0.0; self.state_dim];
            self.step_into(traj.last().unwrap(), u as usize, &mut next);
            traj.push(next);
        }
        Ok(traj)
    }
}

#[inline]
fn affine(a: &Matrix, b: &Matrix, x: &[f64], u: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (k, xk) in x.iter().enumerate() {
            s += a[(i, k)] * xk;
        }
        for (k, uk) in u.iter().enumerate() {
            s += b[(i, k)] * uk;
        }
        *o = s;
    }
}

/// Reduce into `[0, 1)`.
#[inline]
pub fn wrap_unit(y: f64) -> f64 {
    let r = y - libm::floor(y);
    // y slightly below an integer can round up to exactly 1.0
    if r >= 1.0 { 0.0 } else { r }
}

/// A finite control word: one alphabet index per time step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControlWord {
    pub entries: Vec<u32>,
}

impl ControlWord {
    pub fn new(entries: Vec<u32>) -> Self {
        ControlWord { entries }
    }

    pub fn constant(index: u32, tau: usize) -> Self {
        ControlWord { entries: vec![index; tau] }
    }

    /// Horizon τ.
    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The word seen by component `i` of a product.
    pub fn project(&self, system: &SystemDef, i: usize) -> ControlWord {
        ControlWord { entries: self.entries.iter().map(|&u| system.split_control(u as usize)[i] as u32).collect() }
    }

    /// Joint word from one word per component; all must share a horizon.
    pub fn from_components(system: &SystemDef, parts: &[ControlWord]) -> Result<ControlWord> {
        let tau = parts.first().map_or(0, |w| w.len());
        if parts.iter().any(|w| w.len() != tau) {
            return Err(Error::Config("component words have different horizons".into()));
        }
        let mut entries = Vec::with_capacity(tau);
        let mut digits = vec![0usize; parts.len()];
        for k in 0..tau {
            for (d, w) in digits.iter_mut().zip(parts) {
                *d = w.entries[k] as usize;
            }
            entries.push(system.join_control(&digits)? as u32);
        }
        Ok(ControlWord { entries })
    }

    pub fn concat(&self, other: &ControlWord) -> ControlWord {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        ControlWord { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64) -> SystemDef {
        SystemDef::linear(Matrix::from_element(1, 1, a), Matrix::from_element(1, 1, 1.0), vec![vec![0.0], vec![1.0]])
            .unwrap()
    }

    fn doubling() -> SystemDef {
        SystemDef::circle(2, vec![vec![0.0]]).unwrap()
    }

    #[test]
    fn linear_step() {
        assert_eq!(scalar(2.0).step(&[0.25], 0).unwrap(), [0.5]);
    }

    #[test]
    fn circle_step_wraps() {
        assert_eq!(doubling().step(&[0.75], 0).unwrap(), [0.5]);
    }

    #[test]
    fn product_step_componentwise() {
        let p = SystemDef::product(vec![doubling(), doubling()]).unwrap();
        assert_eq!(p.step(&[0.75, 0.75], 0).unwrap(), [0.5, 0.5]);
        assert_eq!(p.state_dim(), 2);
    }

    #[test]
    fn doubling_trajectory() {
        let t = doubling().trajectory(&[0.3], &ControlWord::constant(0, 2)).unwrap();
        assert_eq!(t.len(), 3);
        assert!((t[1][0] - 0.6).abs() < 1e-12);
        assert!((t[2][0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn integrator_trajectory() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let b = Matrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let s = SystemDef::linear(a, b, vec![vec![1.0]]).unwrap();
        let t = s.trajectory(&[1.0, 0.0], &ControlWord::constant(0, 1)).unwrap();
        // x1 = 1 + 0, x2 = 0 + 1
        assert_eq!(t, vec![vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn fixed_point_trajectory() {
        let s = SystemDef::linear(Matrix::from_element(1, 1, 2.0), Matrix::from_element(1, 1, 1.0), vec![vec![0.0]])
            .unwrap();
        let t = s.trajectory(&[0.0], &ControlWord::constant(0, 3)).unwrap();
        assert_eq!(t, vec![vec![0.0]; 4]);
    }

    #[test]
    fn product_index_roundtrip() {
        let a = SystemDef::circle(3, uniform_levels(-1.0, 1.0, 5)).unwrap();
        let b = scalar(2.0);
        let p = SystemDef::product(vec![a, b]).unwrap();
        assert_eq!(p.alphabet_size(), 10);
        for idx in 0..10 {
            let parts = p.split_control(idx);
            assert_eq!(p.join_control(&parts).unwrap(), idx);
        }
        // component 0 is the most significant digit
        assert_eq!(p.split_control(7), [3, 1]);
        assert_eq!(p.control_value(7).unwrap(), [0.5, 1.0]);
    }

    #[test]
    fn single_component_product_matches() {
        let s = scalar(2.0);
        let p = SystemDef::product(vec![s.clone()]).unwrap();
        let w = ControlWord::new(vec![1, 0, 1]);
        assert_eq!(p.trajectory(&[0.1], &w).unwrap(), s.trajectory(&[0.1], &w).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(scalar(2.0).step(&[0.0, 1.0], 0), Err(Error::Dimension { .. })));
        assert!(matches!(scalar(2.0).step(&[0.0], 2), Err(Error::ControlIndex { .. })));
        assert!(SystemDef::circle(1, vec![vec![0.0]]).is_err());
        assert!(SystemDef::product(Vec::new()).is_err());
    }

    #[test]
    fn wrap_stays_below_one() {
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert_eq!(wrap_unit(3.25), 0.25);
        assert_eq!(wrap_unit(-0.25), 0.75);
    }

    #[test]
    fn levels() {
        let l = uniform_levels(-1.0, 1.0, 33);
        assert_eq!(l.len(), 33);
        assert_eq!(l[0], [-1.0]);
        assert_eq!(l[16], [0.0]);
        assert_eq!(l[32], [1.0]);
    }
}
