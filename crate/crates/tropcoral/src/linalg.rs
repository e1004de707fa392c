// Gauss–Jordan elimination over Q with several right-hand sides at once.

use num::{One, Zero};

use crate::lattice::Q;

pub(crate) struct Reduced {
    pub ncols: usize,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
    /// Reduced right-hand sides, `rhs[row][k]`.
    pub rhs: Vec<Vec<Q>>,
}

impl Reduced {
    pub fn full_rank(&self) -> bool {
        self.rank == self.ncols
    }

    /// Right-hand side entries of the zero rows for column `k`.
    pub fn residuals(&self, k: usize) -> impl Iterator<Item = &Q> {
        self.rhs[self.rank..].iter().map(move |r| &r[k])
    }

    pub fn consistent(&self, k: usize) -> bool {
        self.residuals(k).all(Zero::is_zero)
    }

    /// The solution for right-hand side `k` when the system is square-solvable.
    pub fn solution(&self, k: usize) -> Option<Vec<Q>> {
        if !self.full_rank() || !self.consistent(k) {
            return None;
        }
        let mut x = vec![Q::zero(); self.ncols];
        for (r, &c) in self.pivots.iter().enumerate() {
            x[c] = self.rhs[r][k].clone();
        }
        Some(x)
    }
}

pub(crate) fn reduce(mut a: Vec<Vec<Q>>, mut rhs: Vec<Vec<Q>>, ncols: usize) -> Reduced {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        rhs.swap(row, p);
        let inv = Q::one() / &a[row][col];
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for x in rhs[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..nrows {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..ncols {
                let v = &f * &a[row][c];
                a[r][c] -= v;
            }
            for k in 0..rhs[r].len() {
                let v = &f * &rhs[row][k];
                rhs[r][k] -= v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    Reduced { ncols, rank: row, pivots, rhs }
}

pub(crate) fn rank(a: &[Vec<Q>], ncols: usize) -> usize {
    reduce(a.to_vec(), vec![Vec::new(); a.len()], ncols).rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::q;

    #[test]
    fn solves_square_system() {
        // x + y = 3, x − y = 1
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let b = vec![vec![q(3)], vec![q(1)]];
        let r = reduce(a, b, 2);
        assert_eq!(r.solution(0).unwrap(), vec![q(2), q(1)]);
    }

    #[test]
    fn detects_inconsistency_and_rank() {
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        let b = vec![vec![q(1), q(1)], vec![q(3), q(2)]];
        let r = reduce(a.clone(), b, 2);
        assert_eq!(r.rank, 1);
        assert!(!r.consistent(0));
        assert!(r.consistent(1));
        assert!(r.solution(1).is_none());
        assert_eq!(rank(&a, 2), 1);
    }
}
