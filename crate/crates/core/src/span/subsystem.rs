//! Feasibility of a single component's word with the other components free.
//!
//! The other components are abstracted on their lattice: a cell's
//! successors are the snapped images of its lattice point under every
//! control of the other components. For a word of component `i` and a
//! starting element, the word is feasible iff some path of other cells
//! keeps the joint state in the interior of `Q` at steps `1..τ`.
//!
//! [`SubsystemAbstraction::feasible`] runs the reachable-set recursion
//! forward from one element. [`SubsystemAbstraction::coverage`] runs the
//! equivalent backward recursion (`W_τ = slice_τ`, `W_k = slice_k ∩
//! pre(W_{k+1})`) once per component-`i` cell, which settles every element
//! sharing that cell at once.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::pool::CandidatePool;
use crate::exec::{CoverageChunk, Executor};
use crate::region::{Axis, GridElements};
use crate::{BitSet, ControlWord, Error, GridRegion, Result, SystemDef};

const CHUNK: usize = 64;

/// Elements sharing one component-`i` lattice cell.
struct Group {
    state: Vec<f64>,
    /// `(element index, other-cell index)`.
    members: Vec<(usize, usize)>,
}

pub struct SubsystemAbstraction<'a> {
    region: &'a GridRegion,
    component: &'a SystemDef,
    dims: Range<usize>,
    other_dims: Vec<usize>,
    other_coords: Vec<f64>,
    n_other: usize,
    succ: Vec<BitSet>,
    groups: Vec<Group>,
    n_elements: usize,
}

impl<'a> SubsystemAbstraction<'a> {
    pub fn new(system: &'a SystemDef, region: &'a GridRegion, elements: &GridElements, i: usize) -> Result<Self> {
        let comps = system.components();
        if i >= comps.len() {
            return Err(Error::Config(alloc::format!("component {i} out of range for {} components", comps.len())));
        }
        if comps.len() < 2 {
            return Err(Error::Config("subsystem entropy needs at least two components".into()));
        }
        if region.dim() != system.state_dim() {
            return Err(Error::Dimension { expected: system.state_dim(), got: region.dim() });
        }
        let dims = system.component_range(i);
        let other_dims: Vec<usize> = (0..system.state_dim()).filter(|k| !dims.contains(k)).collect();
        let others: Vec<SystemDef> = comps.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| c.clone()).collect();
        let other_sys = if others.len() == 1 { others.into_iter().next().unwrap() } else { SystemDef::product(others)? };
        let axes: Vec<Axis> = other_dims.iter().map(|&k| region.axes()[k]).collect();
        let n_other = axes.iter().try_fold(1usize, |a, ax| a.checked_mul(ax.count)).filter(|&n| n <= 1 << 20);
        let n_other = n_other.ok_or_else(|| Error::Config("other-component lattice is too large".into()))?;

        let od = axes.len();
        let mut other_coords = Vec::with_capacity(n_other * od);
        let mut idx = vec![0usize; od];
        for _ in 0..n_other {
            other_coords.extend(idx.iter().zip(&axes).map(|(&c, a)| a.coord(c)));
            for k in (0..od).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].count {
                    break;
                }
                idx[k] = 0;
            }
        }

        let mut succ = Vec::with_capacity(n_other);
        let mut buf = vec![0.0; od];
        for c in 0..n_other {
            let mut s = BitSet::new(n_other);
            let x = &other_coords[c * od..(c + 1) * od];
            for u in 0..other_sys.alphabet_size() {
                other_sys.step_into(x, u, &mut buf);
                if let Some(t) = snap(&axes, &buf) {
                    s.insert(t);
                }
            }
            succ.push(s);
        }

        // group by component-i cell; elements are lexicographic, so equal
        // cells are not necessarily adjacent
        let mut keyed: Vec<(Vec<u32>, usize, usize)> = (0..elements.len())
            .map(|e| {
                let cell = elements.cell(e);
                let key = cell[dims.clone()].to_vec();
                let other = other_dims.iter().zip(&axes).fold(0, |acc, (&k, a)| acc * a.count + cell[k] as usize);
                (key, e, other)
            })
            .collect();
        keyed.sort();
        let mut groups: Vec<Group> = Vec::new();
        let mut last: Option<Vec<u32>> = None;
        for (key, e, other) in keyed {
            if last.as_ref() != Some(&key) {
                let state = elements.point(e)[dims.clone()].to_vec();
                groups.push(Group { state, members: Vec::new() });
                last = Some(key);
            }
            groups.last_mut().unwrap().members.push((e, other));
        }

        Ok(SubsystemAbstraction {
            region,
            component: &comps[i],
            dims,
            other_dims,
            other_coords,
            n_other,
            succ,
            groups,
            n_elements: elements.len(),
        })
    }

    pub fn component(&self) -> &SystemDef {
        self.component
    }

    pub fn n_other_cells(&self) -> usize {
        self.n_other
    }

    /// Other cells `c` whose joint state with component state `xi` is in
    /// the margin interior.
    fn slice(&self, xi: &[f64], joint: &mut [f64]) -> BitSet {
        let od = self.other_dims.len();
        for (k, d) in self.dims.clone().enumerate() {
            joint[d] = xi[k];
        }
        let mut s = BitSet::new(self.n_other);
        for c in 0..self.n_other {
            for (k, &d) in self.other_dims.iter().enumerate() {
                joint[d] = self.other_coords[c * od + k];
            }
            if self.region.in_interior(joint) {
                s.insert(c);
            }
        }
        s
    }

    fn image(&self, set: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.n_other);
        for c in set.iter() {
            out.union_with(&self.succ[c]);
        }
        out
    }

    fn preimage(&self, set: &BitSet) -> BitSet {
        BitSet::from_indices(self.n_other, (0..self.n_other).filter(|&c| self.succ[c].intersects(set)))
    }

    fn component_trajectory(&self, x: &[f64], word: &[u32]) -> Vec<Vec<f64>> {
        let mut traj = Vec::with_capacity(word.len());
        let mut cur = x.to_vec();
        let mut next = vec![0.0; cur.len()];
        for &u in word {
            self.component.step_into(&cur, u as usize, &mut next);
            traj.push(next.clone());
            core::mem::swap(&mut cur, &mut next);
        }
        traj
    }

    /// Forward reachable-set recursion from element `e`.
    pub fn feasible(&self, elements: &GridElements, e: usize, word: &ControlWord) -> bool {
        let x = elements.point(e);
        let xi = &x[self.dims.clone()];
        let axes: Vec<Axis> = self.other_dims.iter().map(|&k| self.region.axes()[k]).collect();
        let start = self.other_dims.iter().zip(&axes).fold(0, |acc, (&k, a)| acc * a.count + elements.cell(e)[k] as usize);
        let mut joint = vec![0.0; self.region.dim()];
        let mut reach = BitSet::from_indices(self.n_other, [start]);
        for state in self.component_trajectory(xi, &word.entries) {
            reach = self.image(&reach);
            reach.intersect_with(&self.slice(&state, &mut joint));
            if reach.is_empty() {
                return false;
            }
        }
        true
    }

    /// Elements for which `word` is feasible.
    pub fn coverage(&self, word: &[u32]) -> BitSet {
        let mut out = BitSet::new(self.n_elements);
        let mut joint = vec![0.0; self.region.dim()];
        'groups: for g in &self.groups {
            let traj = self.component_trajectory(&g.state, word);
            let mut w: Option<BitSet> = None;
            for state in traj.iter().rev() {
                let mut s = self.slice(state, &mut joint);
                if let Some(next) = &w {
                    s.intersect_with(&self.preimage(next));
                }
                if s.is_empty() {
                    continue 'groups;
                }
                w = Some(s);
            }
            let w0 = self.preimage(&w.expect("horizon is at least 1"));
            for &(e, c) in &g.members {
                if w0.contains(c) {
                    out.insert(e);
                }
            }
        }
        out
    }

    /// Nonempty coverages of all pool words, in pool order.
    pub fn pool_coverage(&self, pool: &CandidatePool, exec: &dyn Executor) -> Vec<(u32, BitSet)> {
        let jobs = pool.len().div_ceil(CHUNK);
        let run = |job: usize| -> CoverageChunk {
            let lo = job * CHUNK;
            let hi = (lo + CHUNK).min(pool.len());
            (lo..hi)
                .filter_map(|w| {
                    let c = self.coverage(pool.entries(w));
                    (!c.is_empty()).then_some((w as u32, c))
                })
                .collect()
        };
        exec.run(jobs, &run).into_iter().flatten().collect()
    }
}

fn snap(axes: &[Axis], x: &[f64]) -> Option<usize> {
    let mut flat = 0;
    for (a, &v) in axes.iter().zip(x) {
        flat = flat * a.count + a.snap(v)?;
    }
    Some(flat)
}
