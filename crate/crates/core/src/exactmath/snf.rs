use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{Int, IntMatrix};

/// Smith normal form `U·A·V = D` with unimodular `U`, `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries `d₁ | d₂ | …`, all positive.
    pub fn invariant_factors(&self) -> Vec<Int> {
        let n = self.d.rows().min(self.d.cols());
        (0..n)
            .map(|i| self.d[(i, i)].clone())
            .take_while(|v| !v.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Position of a nonzero entry of minimal absolute value in the lower-right
/// block starting at `(t, t)`.
fn min_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in t..d.rows() {
        for c in t..d.cols() {
            let v = &d[(r, c)];
            if v.is_zero() {
                continue;
            }
            match best {
                Some(b) if d[b].abs() <= v.abs() => {}
                _ => best = Some((r, c)),
            }
        }
    }
    best
}

/// Pivot-and-reduce Smith normal form, always pivoting on a nonzero entry of
/// minimal absolute value.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pr, pc)) = min_pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);

        loop {
            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for r in t + 1..rows {
                if d[(r, t)].is_zero() {
                    continue;
                }
                let q = -d[(r, t)].div_floor(&pivot);
                d.add_row_multiple(r, t, &q);
                u.add_row_multiple(r, t, &q);
                clean &= d[(r, t)].is_zero();
            }
            for c in t + 1..cols {
                if d[(t, c)].is_zero() {
                    continue;
                }
                let q = -d[(t, c)].div_floor(&pivot);
                d.add_col_multiple(c, t, &q);
                v.add_col_multiple(c, t, &q);
                clean &= d[(t, c)].is_zero();
            }
            if clean {
                // the pivot must divide the whole remaining block
                let bad = (t + 1..rows)
                    .find(|&r| (t + 1..cols).any(|c| !d[(r, c)].is_multiple_of(&pivot)));
                match bad {
                    None => break,
                    Some(r) => {
                        let one = Int::from(1);
                        d.add_row_multiple(t, r, &one);
                        u.add_row_multiple(t, r, &one);
                        continue;
                    }
                }
            }
            // a smaller remainder appeared somewhere: re-pivot
            let (pr, pc) = min_pivot(&d, t).expect("block still has a nonzero entry");
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { d, u, v }
}
