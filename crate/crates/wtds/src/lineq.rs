//! Exact row-basis peeling for linear equation systems.
//!
//! The pruning engine behind the kernel's algebraic step: given a system of
//! equations and a budget `k`, [`reduce_equations`] keeps at most
//! `width·(k+1)` of them such that any assignment violating at most `k`
//! kept equations is guaranteed to satisfy every dropped one. The trick is
//! peeling `k+1` successive row bases: a dropped row lies in the span of
//! each layer, and with at most `k` violations some layer is fully
//! satisfied, forcing the dropped row to evaluate to zero as well.
//!
//! Everything runs over arbitrary-precision rationals. Span membership over
//! the rationals is what the guarantee needs; floats or a fixed modulus
//! could misclassify dependence, so no tolerance parameter exists anywhere.

use num::{BigInt, BigRational, Zero};

use crate::graph::VertexId;

/// Exact scalar used throughout the module.
pub type Coeff = BigRational;

/// Integer-valued coefficient.
pub fn coeff(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// A list of equation rows of uniform width. By convention the last column
/// holds the equation's constant term, so a row `(a₁,…,aₙ,b)` encodes
/// `a₁x₁ + … + aₙxₙ + b = 0` and is evaluated against homogenized
/// assignment vectors `(x₁,…,xₙ,1)`. Nothing in the algebra depends on that
/// convention; it only matters to callers building assignments.
///
/// Each row can carry a provenance tag naming the vertex whose neighborhood
/// produced it, so a reduced system still knows which vertices survived.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    width: usize,
    rows: Vec<Vec<Coeff>>,
    tags: Vec<Option<VertexId>>,
}

impl LinearSystem {
    pub fn new(width: usize) -> Self {
        LinearSystem {
            width,
            rows: Vec::new(),
            tags: Vec::new(),
        }
    }

    /// Builds an untagged system from integer rows (test convenience).
    /// Width is taken from the first row; all rows must agree.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        let width = rows.first().map_or(0, |r| r.len());
        let mut sys = LinearSystem::new(width);
        for r in rows {
            sys.push_int_row(r, None);
        }
        sys
    }

    pub fn push_row(&mut self, row: Vec<Coeff>, tag: Option<VertexId>) {
        assert_eq!(row.len(), self.width, "row width mismatch");
        self.rows.push(row);
        self.tags.push(tag);
    }

    pub fn push_int_row(&mut self, row: &[i64], tag: Option<VertexId>) {
        self.push_row(row.iter().map(|&c| coeff(c)).collect(), tag);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[Coeff] {
        &self.rows[i]
    }

    pub fn tag(&self, i: usize) -> Option<VertexId> {
        self.tags[i]
    }

    pub fn rows(&self) -> &[Vec<Coeff>] {
        &self.rows
    }

    /// The sub-system consisting of the given rows, tags included.
    pub fn subset(&self, indices: &[usize]) -> LinearSystem {
        let mut out = LinearSystem::new(self.width);
        for &i in indices {
            out.push_row(self.rows[i].clone(), self.tags[i]);
        }
        out
    }

    /// Indices of rows that evaluate to nonzero against `z` (violated
    /// equations). `z` must already carry the homogenizing 1 if the system
    /// uses the constant-term convention.
    pub fn violated(&self, z: &[Coeff]) -> Vec<usize> {
        assert_eq!(z.len(), self.width, "assignment width mismatch");
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| !dot(row, z).is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}

fn dot(a: &[Coeff], b: &[Coeff]) -> Coeff {
    let mut acc = Coeff::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Greedy row basis: scan rows in input order, keep a row iff it increases
/// the rank. Returns the kept indices (ascending). The kept rows are
/// linearly independent and span every input row.
pub fn row_basis(rows: &[Vec<Coeff>]) -> Vec<usize> {
    // `pivots` holds reduced kept rows together with their pivot column.
    let mut pivots: Vec<(usize, Vec<Coeff>)> = Vec::new();
    let mut kept = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut cur = row.clone();
        for (pc, prow) in &pivots {
            if !cur[*pc].is_zero() {
                let f = cur[*pc].clone();
                for (c, p) in cur.iter_mut().zip(prow) {
                    *c = &*c - &(&f * p);
                }
            }
        }
        if let Some(pc) = cur.iter().position(|c| !c.is_zero()) {
            let lead = cur[pc].clone();
            for c in cur.iter_mut() {
                *c = &*c / &lead;
            }
            pivots.push((pc, cur));
            kept.push(i);
        }
    }
    kept
}

/// Rank of a row list (size of any row basis).
pub fn rank(rows: &[Vec<Coeff>]) -> usize {
    row_basis(rows).len()
}

/// Output of [`peel`]: the extracted layers (row indices into the input
/// system) and their union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelResult {
    /// Layers in extraction order; each is a basis of what remained before
    /// it was taken, listed in ascending row order.
    pub layers: Vec<Vec<usize>>,
    /// Union of the layers, ascending. Rows outside this set are spanned by
    /// every layer.
    pub kept_row_indices: Vec<usize>,
}

/// Peels up to `k+1` successive row bases off the system.
///
/// Layer 0 is a basis of all rows; layer `i` is a basis of what the first
/// `i` layers left behind. Peeling stops when the rows are exhausted (then
/// everything is kept and the guarantee is trivial) or after `k+1` layers.
/// Rows that are identically zero are never picked into a layer; they are
/// satisfied by every assignment, so dropping them is harmless, and once
/// only zero rows remain the peeling stops.
pub fn peel(m: &LinearSystem, k: u32) -> PeelResult {
    let mut remaining: Vec<usize> = (0..m.len()).collect();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    while layers.len() < (k as usize) + 1 && !remaining.is_empty() {
        let rows: Vec<Vec<Coeff>> = remaining.iter().map(|&i| m.row(i).to_vec()).collect();
        let local = row_basis(&rows);
        if local.is_empty() {
            break; // only zero rows left
        }
        let layer: Vec<usize> = local.iter().map(|&j| remaining[j]).collect();
        let mut li = 0;
        remaining.retain(|i| {
            if li < layer.len() && *i == layer[li] {
                li += 1;
                false
            } else {
                true
            }
        });
        layers.push(layer);
    }
    let mut kept: Vec<usize> = layers.iter().flatten().copied().collect();
    kept.sort_unstable();
    PeelResult {
        layers,
        kept_row_indices: kept,
    }
}

/// Keeps at most `width·(k+1)` equations of `s` such that any assignment
/// violating at most `k` kept equations satisfies every dropped equation
/// (and therefore has identical violation sets on `s` and the subset).
///
/// Returns the kept sub-system (tags preserved) and the kept row indices.
pub fn reduce_equations(s: &LinearSystem, k: u32) -> (LinearSystem, Vec<usize>) {
    let peeled = peel(s, k);
    let kept = peeled.kept_row_indices;
    (s.subset(&kept), kept)
}
