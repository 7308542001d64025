//! Dense linear algebra over `Q(x, y)`.

use crate::ratfield::RatFunc;

/// Row-reduced echelon form computed in place. Returns the pivot column of
/// each nonzero row. Within a column the pivot is the smallest entry by
/// expression size, ties going to the lowest row.
pub fn rref(m: &mut Vec<Vec<RatFunc>>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| (m[i][c].size(), i))
        else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for v in m[r].iter_mut().skip(c) {
            *v = &*v * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for k in c..cols {
                if !pivot_row[k].is_zero() {
                    row[k] = &row[k] - &(&f * &pivot_row[k]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank(m: &[Vec<RatFunc>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of `{v : m v = 0}`, one vector per free column.
pub fn nullspace(m: &[Vec<RatFunc>], cols: usize) -> Vec<Vec<RatFunc>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![RatFunc::zero(); cols];
        v[free] = RatFunc::one();
        for (row, &pc) in a.iter().zip(&pivots) {
            v[pc] = -&row[free];
        }
        out.push(v);
    }
    out
}

/// A solution of `m v = b` with free unknowns set to zero.
pub fn solve(m: &[Vec<RatFunc>], b: &[RatFunc]) -> Option<Vec<RatFunc>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<RatFunc>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.contains(&cols) {
        return None;
    }
    let mut v = vec![RatFunc::zero(); cols];
    for (row, &pc) in a.iter().zip(&pivots) {
        v[pc] = row[cols].clone();
    }
    Some(v)
}
