//! Dense linear algebra over a prime field `Z/mZ`, small dimensions only.
//!
//! Used for Artin–Schreier solving, Lang-map lifting (both over `F_p`) and
//! the eigenspace splitting in the Dixon character table (over `F_ell`).

pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a % m, m - 2, m)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    result
}

/// Row-reduces `rows` in place to reduced echelon form and returns the
/// pivot column of each nonzero row.
pub(crate) fn rref(rows: &mut [Vec<u64>], m: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pivot_row) = (r..rows.len()).find(|&i| !rows[i][col].is_multiple_of(m)) else {
            continue;
        };
        rows.swap(r, pivot_row);
        let inv = inv_mod(rows[r][col], m);
        for v in rows[r].iter_mut() {
            *v = *v * inv % m;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let factor = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot) {
                    *v = (*v + m - factor * pv % m) % m;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Basis of the right null space `{x : A x = 0}` of a matrix given by rows
/// with `ncols` columns.
pub(crate) fn nullspace(a: &[Vec<u64>], ncols: usize, m: u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|v| v % m).collect()).collect();
    let pivots = rref(&mut rows, m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = (m - rows[row][f] % m) % m;
            }
            v
        })
        .collect()
}

/// Solves `A x = b`. Returns a particular solution and a basis of the
/// kernel, or `None` when the system is inconsistent.
pub(crate) fn solve(a: &[Vec<u64>], b: &[u64], ncols: usize, m: u64) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let mut aug: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r: Vec<u64> = row.iter().map(|v| v % m).collect();
            r.push(bi % m);
            r
        })
        .collect();
    let pivots = rref(&mut aug, m);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![0u64; ncols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][ncols];
    }
    Some((x, nullspace(a, ncols, m)))
}
