use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::SemicocycleError;
use crate::odometer::{OdometerHead, Scale};

/// Rows `l^n_i`, `n = 1..=levels`. Row `n + 1` keeps every entry of row `n`
/// from index `i_n = 2^(n-1)` on and inserts the midpoint between
/// neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelFamily {
    rows: Vec<Vec<u64>>,
}

impl LevelFamily {
    pub fn with_base_row(row1: Vec<u64>, levels: usize) -> Result<Self, SemicocycleError> {
        let mut rows = vec![row1];
        for n in 1..levels {
            let prev = &rows[n - 1];
            let offset = 1usize << (n - 1);
            if prev.len() < offset + 2 {
                return Err(SemicocycleError::LevelsTooShort(*prev.last().unwrap_or(&0)));
            }
            let mut next = Vec::with_capacity(2 * (prev.len() - offset));
            for i in offset..prev.len() {
                next.push(prev[i]);
                if let Some(&b) = prev.get(i + 1) {
                    let s = prev[i] + b;
                    if s % 2 != 0 {
                        return Err(SemicocycleError::Integrality { n: n + 1, i: 2 * (i - offset) + 1 });
                    }
                    next.push(s / 2);
                }
            }
            rows.push(next);
        }
        Ok(LevelFamily { rows })
    }

    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    /// `l^n_i`, `n >= 1`.
    pub fn get(&self, n: usize, i: usize) -> Option<u64> {
        self.rows.get(n - 1)?.get(i).copied()
    }

    pub fn row(&self, n: usize) -> &[u64] {
        &self.rows[n - 1]
    }

    pub fn offset(n: usize) -> usize {
        1 << (n - 1)
    }

    /// Largest value reached by every row.
    pub fn reach(&self) -> u64 {
        self.rows.iter().filter_map(|r| r.last().copied()).min().unwrap_or(0)
    }

    /// Index `i` with `l^n_i <= x < l^n_(i+1)`.
    pub fn interval_of(&self, n: usize, x: u64) -> Option<usize> {
        let row = self.row(n);
        let i = row.partition_point(|&v| v <= x);
        (i > 0 && i < row.len()).then(|| i - 1)
    }

    /// `t_n = 2^(l^n_0)`.
    pub fn time(&self, n: usize) -> BigUint {
        BigUint::one() << self.row(n)[0]
    }

    /// Cylinder of `t_n`: its head through the first nonzero digit.
    pub fn support_head(&self, n: usize) -> OdometerHead {
        let l = self.row(n)[0] as usize;
        let mut digits = vec![0u64; l + 1];
        digits[l] = 1;
        OdometerHead::from_u64(Scale::constant(2), &digits).unwrap()
    }

    /// The `n` whose time starts at bit `p`.
    pub fn level_at_bit(&self, p: u64) -> Option<usize> {
        self.rows.iter().position(|r| r[0] == p).map(|k| k + 1)
    }
}

/// Standard family with `l^1_i = 2^i - 1`, rows covering `[0, reach]`.
pub fn build_level_family(levels: usize, reach: u64) -> Result<LevelFamily, SemicocycleError> {
    // row n+1 has 2 (len_n - 2^(n-1)) - 1 entries; the last row needs two
    let mut need = 2usize;
    for n in (1..levels).rev() {
        need = need.div_ceil(2) + (1 << (n - 1));
    }
    let mut row1 = Vec::new();
    let mut i = 0u32;
    loop {
        let v = (1u64 << i) - 1;
        row1.push(v);
        if v >= reach && row1.len() >= need {
            break;
        }
        i += 1;
        if i > 62 {
            return Err(SemicocycleError::LevelsTooShort(reach));
        }
    }
    LevelFamily::with_base_row(row1, levels)
}

/// Pairs of levels `n < n' <= max_n` whose supports overlap.
pub fn check_disjoint_supports(lf: &LevelFamily, max_n: usize) -> Vec<(usize, usize)> {
    let heads: Vec<OdometerHead> = (1..=max_n).map(|n| lf.support_head(n)).collect();
    let mut bad = Vec::new();
    for a in 0..heads.len() {
        for b in a + 1..heads.len() {
            let agree = heads[a].common_head_length(&heads[b]).unwrap();
            if agree.saturated {
                bad.push((a + 1, b + 1));
            }
        }
    }
    bad
}
