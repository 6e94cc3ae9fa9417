//! Small exact linear algebra over `i64` and `Ratio<i64>`.
//!
//! Everything here is sized for rank <= 4; matrices are stored as flat
//! fixed arrays and all arithmetic is exact.

use num_rational::Ratio;
use num_traits::{One, Zero};

pub const MAXN: usize = 4;

pub type Rat = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

/// Integer matrix acting on pairing coordinates; `a[i*MAXN+j]` is row i,
/// column j. Only the leading `n x n` block is meaningful, the rest is zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub n: u8,
    pub a: [i16; MAXN * MAXN],
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.n as usize;
        write!(f, "Mat{:?}", (0..n).map(|i| &self.a[i * MAXN..i * MAXN + n]).collect::<Vec<_>>())
    }
}

impl Mat {
    pub fn identity(n: usize) -> Self {
        let mut a = [0i16; MAXN * MAXN];
        for i in 0..n {
            a[i * MAXN + i] = 1;
        }
        Mat { n: n as u8, a }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * MAXN + j] as i64
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[i * MAXN + j] = i16::try_from(v).expect("matrix entry overflow");
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.n as usize;
        debug_assert_eq!(self.n, other.n);
        let mut out = Mat { n: self.n, a: [0; MAXN * MAXN] };
        for i in 0..n {
            for k in 0..n {
                let v = self.get(i, k);
                if v == 0 {
                    continue;
                }
                for j in 0..n {
                    let cur = out.get(i, j) + v * other.get(k, j);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i64; MAXN]) -> [i64; MAXN] {
        let n = self.n as usize;
        let mut out = [0i64; MAXN];
        for i in 0..n {
            let mut acc = 0i64;
            for j in 0..n {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn apply_rat(&self, v: &[Rat; MAXN]) -> [Rat; MAXN] {
        let n = self.n as usize;
        let mut out = [Rat::zero(); MAXN];
        for i in 0..n {
            let mut acc = Rat::zero();
            for j in 0..n {
                acc += Rat::from_integer(self.get(i, j)) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n as usize;
        let mut out = Mat { n: self.n, a: [0; MAXN * MAXN] };
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i));
            }
        }
        out
    }

    /// Inverse of a unimodular integer matrix (det = +-1), via the adjugate.
    pub fn inverse_unimodular(&self) -> Mat {
        let n = self.n as usize;
        let det = self.det();
        assert!(det == 1 || det == -1, "matrix is not unimodular");
        let mut out = Mat { n: self.n, a: [0; MAXN * MAXN] };
        for i in 0..n {
            for j in 0..n {
                let c = self.cofactor(j, i);
                out.set(i, j, c * det);
            }
        }
        out
    }

    pub fn det(&self) -> i64 {
        let n = self.n as usize;
        match n {
            0 => 1,
            1 => self.get(0, 0),
            _ => (0..n).map(|j| self.get(0, j) * self.cofactor(0, j)).sum(),
        }
    }

    fn cofactor(&self, row: usize, col: usize) -> i64 {
        let n = self.n as usize;
        let mut sub = Mat { n: (n - 1) as u8, a: [0; MAXN * MAXN] };
        let mut si = 0;
        for i in 0..n {
            if i == row {
                continue;
            }
            let mut sj = 0;
            for j in 0..n {
                if j == col {
                    continue;
                }
                sub.set(si, sj, self.get(i, j));
                sj += 1;
            }
            si += 1;
        }
        let sign = if (row + col) % 2 == 0 { 1 } else { -1 };
        sign * sub.det()
    }
}

/// Rational matrix, used for precomputed inverse coordinate transforms.
#[derive(Clone, Debug)]
pub struct RatMat {
    pub n: usize,
    pub a: [Rat; MAXN * MAXN],
}

impl RatMat {
    pub fn from_int(n: usize, rows: &[[i64; MAXN]]) -> Self {
        let mut a = [Rat::zero(); MAXN * MAXN];
        for i in 0..n {
            for j in 0..n {
                a[i * MAXN + j] = Rat::from_integer(rows[i][j]);
            }
        }
        RatMat { n, a }
    }

    pub fn apply(&self, v: &[Rat; MAXN]) -> [Rat; MAXN] {
        let mut out = [Rat::zero(); MAXN];
        for i in 0..self.n {
            let mut acc = Rat::zero();
            for j in 0..self.n {
                acc += self.a[i * MAXN + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Exact inverse by Gauss-Jordan elimination. Panics on singular input;
    /// callers only invert Cartan-derived matrices, which are nonsingular.
    pub fn inverse(&self) -> RatMat {
        let n = self.n;
        let mut m = self.a;
        let mut inv = [Rat::zero(); MAXN * MAXN];
        for i in 0..n {
            inv[i * MAXN + i] = Rat::one();
        }
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !m[r * MAXN + col].is_zero())
                .expect("singular matrix");
            if pivot != col {
                for j in 0..n {
                    m.swap(col * MAXN + j, pivot * MAXN + j);
                    inv.swap(col * MAXN + j, pivot * MAXN + j);
                }
            }
            let p = m[col * MAXN + col];
            for j in 0..n {
                m[col * MAXN + j] /= p;
                inv[col * MAXN + j] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = m[r * MAXN + col];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let mcj = m[col * MAXN + j];
                    let icj = inv[col * MAXN + j];
                    m[r * MAXN + j] -= f * mcj;
                    inv[r * MAXN + j] -= f * icj;
                }
            }
        }
        RatMat { n, a: inv }
    }
}

/// Dimension of the fixed space of a linear map given by an integer matrix,
/// i.e. `n - rank(M - I)`, computed exactly.
pub fn fixed_space_dim(m: &Mat) -> usize {
    let n = m.n as usize;
    let mut rows: Vec<[Rat; MAXN]> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = [Rat::zero(); MAXN];
        for j in 0..n {
            let mut v = Rat::from_integer(m.get(i, j));
            if i == j {
                v -= Rat::one();
            }
            row[j] = v;
        }
        rows.push(row);
    }
    n - row_rank(&mut rows, n)
}

fn row_rank(rows: &mut [[Rat; MAXN]], n: usize) -> usize {
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pv = rows[rank][col];
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col] / pv;
            for j in col..n {
                let v = rows[rank][j];
                rows[r][j] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Diagonalization `U * R * V = D` of an integer matrix with `U`, `V`
/// unimodular; returns `U` and the diagonal of `D`. Divisibility of the
/// diagonal entries is not normalized; any unimodular diagonalization
/// identifies the quotient group, which is all the callers need.
pub struct Diagonalization {
    pub u: Vec<Vec<i64>>,
    pub diag: Vec<i64>,
}

pub fn diagonalize(rel: &[Vec<i64>]) -> Diagonalization {
    let rows = rel.len();
    let cols = if rows == 0 { 0 } else { rel[0].len() };
    let mut m: Vec<Vec<i64>> = rel.to_vec();
    let mut u: Vec<Vec<i64>> = (0..rows)
        .map(|i| (0..rows).map(|j| i64::from(i == j)).collect())
        .collect();

    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            // Find the entry of smallest nonzero absolute value in the
            // remaining block and move it to the pivot position.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0
                        && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            m.swap(t, bi);
            u.swap(t, bi);
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            let mut dirty = false;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                if q != 0 {
                    for j in 0..cols {
                        m[i][j] -= q * m[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                if m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                if q != 0 {
                    for i in 0..rows {
                        m[i][j] -= q * m[i][t];
                    }
                }
                if m[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
    }

    let mut diag = Vec::with_capacity(rows);
    for (i, drow) in m.iter().enumerate().take(rows) {
        let d = if i < cols { drow[i].abs() } else { 0 };
        diag.push(d);
    }
    Diagonalization { u, diag }
}

pub fn format_rat(r: Rat) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    debug_assert!(d > 0);
    format!("{n}/{d}")
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Ratio::new(n, d))
        }
        None => {
            let n: i64 = s.trim().parse().ok()?;
            Some(Ratio::from_integer(n))
        }
    }
}
