//! Total unimodularity checks for small matrices.
//!
//! Uses the Ghouila-Houri characterization: a matrix is TU iff every subset
//! of its rows can be signed so that the signed row sum has all entries in
//! {-1, 0, 1}. Transposition preserves TU, so the check runs over the smaller
//! dimension. Cost is exponential in that dimension; it is capped at
//! [`TU_SIZE_CAP`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GameInstance, StrategySpace};
use crate::numeric::IntMatrix;

/// Largest admissible `min(rows, cols)`.
pub const TU_SIZE_CAP: usize = 20;

/// A square submatrix whose determinant lies outside {-1, 0, 1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub determinant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TuVerdict {
    Unimodular,
    NotUnimodular(Violation),
}

impl TuVerdict {
    pub fn is_unimodular(&self) -> bool {
        matches!(self, TuVerdict::Unimodular)
    }
}

fn check_cap(a: &IntMatrix) -> Result<()> {
    let side = a.rows().min(a.cols());
    if side > TU_SIZE_CAP {
        return Err(Error::SizeCap(format!(
            "TU check needs min(rows, cols) <= {TU_SIZE_CAP}, got {side}"
        )));
    }
    Ok(())
}

/// True iff every square submatrix has determinant in {-1, 0, 1}.
pub fn is_totally_unimodular(a: &IntMatrix) -> Result<bool> {
    check_cap(a)?;
    Ok(failing_row_subset(a).is_none())
}

/// Like [`is_totally_unimodular`] but returns a violating submatrix on failure.
pub fn tu_verdict(a: &IntMatrix) -> Result<TuVerdict> {
    check_cap(a)?;
    match failing_row_subset(a) {
        None => Ok(TuVerdict::Unimodular),
        Some((transposed, subset)) => {
            let m = if transposed { a.transpose() } else { a.clone() };
            let v = violating_submatrix(&m, &subset)
                .ok_or_else(|| Error::Invariant("Ghouila-Houri failure without a witness".into()))?;
            Ok(TuVerdict::NotUnimodular(if transposed {
                Violation {
                    rows: v.cols,
                    cols: v.rows,
                    determinant: v.determinant,
                }
            } else {
                v
            }))
        }
    }
}

/// Finds a row subset (of `a` or of its transpose) with no equitable
/// signing. Entries outside {-1,0,1} are reported as a singleton subset.
fn failing_row_subset(a: &IntMatrix) -> Option<(bool, Vec<usize>)> {
    for r in 0..a.rows() {
        if a.row(r).iter().any(|v| v.abs() > 1) {
            return Some((false, vec![r]));
        }
    }
    let transposed = a.rows() > a.cols();
    let t;
    let m = if transposed {
        t = a.transpose();
        &t
    } else {
        a
    };
    let mut search = Signing::new(m);
    let mut subset = Vec::with_capacity(m.rows());
    for mask in 1u64..(1u64 << m.rows()) {
        subset.clear();
        subset.extend((0..m.rows()).filter(|&r| mask >> r & 1 == 1));
        if !search.equitable(&subset) {
            return Some((transposed, subset));
        }
    }
    None
}

/// Scratch space for the equitable-signing search, reused across subsets.
struct Signing<'a> {
    m: &'a IntMatrix,
    // reach[i * cols + c]: total |entries| of column c in subset[i..].
    reach: Vec<i64>,
    sums: Vec<i64>,
}

impl<'a> Signing<'a> {
    fn new(m: &'a IntMatrix) -> Self {
        Signing {
            m,
            reach: vec![0; (m.rows() + 1) * m.cols()],
            sums: vec![0; m.cols()],
        }
    }

    fn equitable(&mut self, subset: &[usize]) -> bool {
        let cols = self.m.cols();
        let k = subset.len();
        self.reach[k * cols..(k + 1) * cols].fill(0);
        for i in (0..k).rev() {
            let row = self.m.row(subset[i]);
            for c in 0..cols {
                self.reach[i * cols + c] = self.reach[(i + 1) * cols + c] + row[c].abs();
            }
        }
        // The first row's sign is fixed by symmetry.
        self.sums.copy_from_slice(self.m.row(subset[0]));
        self.rest(subset, 1)
    }

    fn rest(&mut self, subset: &[usize], i: usize) -> bool {
        let cols = self.m.cols();
        let reach = &self.reach[i * cols..(i + 1) * cols];
        if self.sums.iter().zip(reach).any(|(s, r)| s.abs() - r > 1) {
            return false;
        }
        if i == subset.len() {
            return true;
        }
        let m = self.m;
        let row = m.row(subset[i]);
        for sign in [1i64, -1] {
            for (s, v) in self.sums.iter_mut().zip(row) {
                *s += sign * v;
            }
            let ok = self.rest(subset, i + 1);
            for (s, v) in self.sums.iter_mut().zip(row) {
                *s -= sign * v;
            }
            if ok {
                return true;
            }
        }
        false
    }
}

/// Smallest square submatrix within the given rows whose determinant is
/// outside {-1,0,1}.
fn violating_submatrix(a: &IntMatrix, rows: &[usize]) -> Option<Violation> {
    for size in 1..=rows.len().min(a.cols()) {
        for rsel in combinations(rows, size) {
            for csel in combinations(&(0..a.cols()).collect::<Vec<_>>(), size) {
                let det = a.submatrix(&rsel, &csel).determinant();
                if det > 1.into() || det < (-1).into() {
                    return Some(Violation {
                        rows: rsel,
                        cols: csel,
                        determinant: det.to_string(),
                    });
                }
            }
        }
    }
    None
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Per-player TU verdicts for an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlayerTuReport {
    pub player: usize,
    /// `None` for polymatroid players, which carry no constraint matrix.
    pub totally_unimodular: Option<bool>,
    pub integral_bounds: bool,
    pub violation: Option<Violation>,
}

/// Checks every player's constraint system.
pub fn check_instance_tu(inst: &GameInstance) -> Result<Vec<PlayerTuReport>> {
    let mut report = Vec::with_capacity(inst.players());
    for (player, space) in inst.strategies().iter().enumerate() {
        let entry = match space {
            StrategySpace::Tu(sys) => {
                let verdict = tu_verdict(sys.matrix())?;
                PlayerTuReport {
                    player,
                    totally_unimodular: Some(verdict.is_unimodular()),
                    // Bounds are typed as integers, so integrality holds by construction.
                    integral_bounds: true,
                    violation: match verdict {
                        TuVerdict::Unimodular => None,
                        TuVerdict::NotUnimodular(v) => Some(v),
                    },
                }
            }
            StrategySpace::Polymatroid { .. } => PlayerTuReport {
                player,
                totally_unimodular: None,
                integral_bounds: true,
                violation: None,
            },
        };
        report.push(entry);
    }
    Ok(report)
}
