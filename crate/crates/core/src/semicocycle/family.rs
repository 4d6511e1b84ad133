use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;

use super::language::LanguageHandle;
use super::levels::LevelFamily;
use super::SemicocycleError;
use crate::odometer::{OdometerHead, Scale};

/// Tables `f^n(x)` for `1 <= n <= n_max`, `0 <= x < horizon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FFamily {
    pub n_max: usize,
    pub horizon: u64,
    tables: Vec<Vec<u8>>,
}

impl FFamily {
    pub fn value(&self, n: usize, x: u64) -> Option<char> {
        let t = self.tables.get(n.checked_sub(1)?)?;
        t.get(x as usize).map(|&c| c as char)
    }

    /// `f^1(x) ... f^n(x)`.
    pub fn word_at(&self, n: usize, x: u64) -> Option<String> {
        (1..=n).map(|k| self.value(k, x)).collect()
    }

    /// The word on `[l^n_i, l^n_(i+1))`, when the interval fits the
    /// horizon and the word is constant on it.
    pub fn interval_word(&self, lf: &LevelFamily, n: usize, i: usize) -> Option<String> {
        let (a, b) = (lf.get(n, i)?, lf.get(n, i + 1)?);
        if b > self.horizon {
            return None;
        }
        let w = self.word_at(n, a)?;
        (a + 1..b).all(|x| self.word_at(n, x).as_deref() == Some(&w)).then_some(w)
    }

    /// Interval words that are not constant, fall outside the language, or
    /// words of the language that never occur at an index `i >= 1`.
    pub fn check_invariants(&self, lf: &LevelFamily, lang: &LanguageHandle) -> Result<(), String> {
        for n in 1..=self.n_max {
            let words = lang.words(n).map_err(|e| e.to_string())?;
            let mut seen = BTreeSet::new();
            let mut i = 0;
            while let (Some(a), Some(b)) = (lf.get(n, i), lf.get(n, i + 1)) {
                if b > self.horizon {
                    break;
                }
                let w = self
                    .interval_word(lf, n, i)
                    .ok_or_else(|| format!("level {n}: interval {i} = [{a}, {b}) is not constant"))?;
                if !words.contains(&w) {
                    return Err(format!("level {n}: interval {i} carries {w:?} outside the language"));
                }
                if i >= 1 {
                    seen.insert(w);
                }
                i += 1;
            }
            if let Some(missing) = words.difference(&seen).next() {
                return Err(format!("level {n}: {missing:?} never occurs within the horizon"));
            }
        }
        Ok(())
    }
}

pub fn build_f_family(
    lang: &LanguageHandle,
    lf: &LevelFamily,
    n_max: usize,
    horizon: u64,
) -> Result<FFamily, SemicocycleError> {
    if n_max == 0 || lf.levels() < n_max {
        return Err(SemicocycleError::LevelsTooShort(horizon));
    }
    let needed = lf.row(n_max)[0];
    if horizon <= needed {
        return Err(SemicocycleError::HorizonTooSmall { horizon, needed });
    }
    if lf.reach() < horizon {
        return Err(SemicocycleError::LevelsTooShort(horizon));
    }
    let h = horizon as usize;
    let first: Vec<u8> = (0..horizon)
        .map(|x| match lf.interval_of(1, x) {
            Some(i) if i % 2 == 1 => b'b',
            _ => b'a',
        })
        .collect();
    let mut tables = vec![first];
    for n in 1..n_max {
        let mut next = vec![b'a'; h];
        let offset = LevelFamily::offset(n);
        let mut i = offset;
        while let (Some(a), Some(b)) = (lf.get(n, i), lf.get(n, i + 1)) {
            if a >= horizon {
                break;
            }
            let w: String = tables.iter().map(|t| t[a as usize] as char).collect();
            let ext = lang.right_extensions(&w)?;
            let j = i - offset;
            let fill = |next: &mut Vec<u8>, from: u64, to: u64, c: u8| {
                for x in from..to.min(horizon) {
                    next[x as usize] = c;
                }
            };
            match ext.as_slice() {
                [] => return Err(SemicocycleError::NotRightExtendable(w)),
                [c] => fill(&mut next, a, b, *c as u8),
                _ => {
                    let mid = lf.get(n + 1, 2 * j + 1).expect("midpoint row entry");
                    fill(&mut next, a, mid, b'a');
                    fill(&mut next, mid, b, b'b');
                }
            }
            i += 1;
        }
        tables.push(next);
    }
    Ok(FFamily { n_max, horizon, tables })
}

fn binary_digits(z: &OdometerHead) -> Result<Vec<u64>, SemicocycleError> {
    if z.scale() != &Scale::constant(2) {
        return Err(SemicocycleError::ScaleMismatch("constant 2"));
    }
    Ok(z.digits_u64().expect("binary digits fit"))
}

/// `f(z)`: on the support of `t_n` the value is `f^n(L(z, t_n))`,
/// elsewhere `a`.
pub fn eval_semicocycle(z: &OdometerHead, fam: &FFamily, lf: &LevelFamily) -> Result<char, SemicocycleError> {
    let bits = binary_digits(z)?;
    let p = bits.iter().position(|&b| b == 1).ok_or(SemicocycleError::Undetermined)?;
    let Some(n) = lf.level_at_bit(p as u64) else {
        return Ok('a');
    };
    let q = bits[p + 1..]
        .iter()
        .position(|&b| b == 1)
        .map(|k| k + p + 1)
        .ok_or(SemicocycleError::Undetermined)?;
    fam.value(n, q as u64).ok_or(SemicocycleError::Undetermined)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub word: String,
    pub interval: usize,
    pub level: u64,
    pub t_w: String,
    /// `t_w + t_n`, `n = 1..=|word|`.
    pub positions: Vec<String>,
    pub letters: String,
    pub realized: bool,
}

/// Alternating `0, 1, 0, 1, ...`.
pub fn default_zhat(depth: usize) -> OdometerHead {
    let digits: Vec<u64> = (0..depth).map(|k| (k % 2) as u64).collect();
    OdometerHead::from_u64(Scale::constant(2), &digits).unwrap()
}

/// Finds an interval `i >= 1` of level `|y|` carrying `y`, shifts `zhat`
/// so that its first nonzero digit sits at `l = l^N_i`, and reads `f` at
/// the times `t_1, ..., t_N` from there.
pub fn realize_prefix(
    y: &str,
    fam: &FFamily,
    lf: &LevelFamily,
    lang: &LanguageHandle,
    zhat: &OdometerHead,
) -> Result<Realization, SemicocycleError> {
    let n = y.len();
    if n == 0 || n > fam.n_max || !lang.contains(y)? {
        return Err(SemicocycleError::NotInLanguage(y.to_string()));
    }
    let bits = binary_digits(zhat)?;
    let interval = (1..)
        .map_while(|i| lf.get(n, i + 1).filter(|&b| b <= fam.horizon).map(|_| i))
        .find(|&i| fam.interval_word(lf, n, i).as_deref() == Some(y))
        .ok_or_else(|| SemicocycleError::HorizonExhausted(y.to_string()))?;
    let l = lf.get(n, interval).unwrap();
    let end = lf.get(n, interval + 1).unwrap();
    if zhat.depth() as u64 <= end {
        return Err(SemicocycleError::InsufficientDepth { n: end as i64 });
    }
    let upper = &bits[bits.len() / 2..];
    if !(upper.contains(&0) && upper.contains(&1)) {
        return Err(SemicocycleError::IntegerHead);
    }
    let low = zhat.truncate(l as usize + 1).index();
    let m = BigUint::one() << (l + 1);
    let target = BigUint::one() << l;
    let mut t_w = (&m + &target - &low) % &m;
    if t_w == BigUint::ZERO {
        t_w = m;
    }
    let mut positions = Vec::with_capacity(n);
    let mut letters = String::with_capacity(n);
    for k in 1..=n {
        let pos = &t_w + lf.time(k);
        letters.push(eval_semicocycle(&zhat.add_integer(&BigInt::from(pos.clone())), fam, lf)?);
        positions.push(pos.to_string());
    }
    Ok(Realization {
        word: y.to_string(),
        interval,
        level: l,
        t_w: t_w.to_string(),
        positions,
        realized: letters == y,
        letters,
    })
}
