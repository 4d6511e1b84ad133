//! Arithmetic-progression schemes for non-tame substitutions, the induced
//! independence times, and verification of all choice patterns on fibre
//! windows.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gtheta::{fiber_window, power_letter, tameness_verdict, LetterSet};
use crate::odometer::{OdometerHead, Scale};
use crate::substitution::{Letter, Substitution, Verdict, Word};
use crate::Error;

/// Windows longer than this are read letter by letter instead of being
/// materialised.
const MATERIALISE_LIMIT: usize = 1 << 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndependenceError {
    #[error("scheme synthesis needs a non-tame substitution, verdict was {0}")]
    PreconditionViolated(String),
    #[error("time t_{n} falls outside the window of depth {depth}")]
    WindowTooShallow { n: usize, depth: usize },
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
}

impl IndependenceError {
    pub fn kind(&self) -> &'static str {
        match self {
            IndependenceError::PreconditionViolated(_) => "precondition_violated",
            IndependenceError::WindowTooShallow { .. } => "window_too_shallow",
            IndependenceError::InvalidScheme(_) => "invalid_scheme",
        }
    }
}

/// Columns `j0 < j1 < j2` of `theta^m` in arithmetic progression with `j1`
/// and `j2` restricting to the same bijection of `A`, `theta^m_{j0}` mapping
/// everything into `B`, and `theta^m_i` mapping everything into the letters
/// of `A` that `theta^m_{j1}` sends outside `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceScheme {
    pub power: usize,
    pub base: Substitution,
    pub theta_m: Substitution,
    pub a_set: LetterSet,
    pub b_set: LetterSet,
    pub j0: usize,
    pub j1: usize,
    pub j2: usize,
    pub delta: usize,
    pub i: usize,
}

impl IndependenceScheme {
    /// `L = l^m`.
    pub fn big_l(&self) -> usize {
        self.theta_m.length()
    }

    fn column(&self, j: usize) -> Vec<Letter> {
        // compose the base columns named by the m base-l digits of j
        let p = BigUint::from(j);
        (0..self.base.size() as Letter)
            .map(|v| power_letter(&self.base, v, self.power, &p))
            .collect()
    }

    /// Re-checks every invariant by composing base columns.
    pub fn check(&self) -> Result<(), IndependenceError> {
        let bad = |s: &str| Err(IndependenceError::InvalidScheme(s.to_string()));
        let (c0, c1, c2, ci) = (self.column(self.j0), self.column(self.j1), self.column(self.j2), self.column(self.i));
        let full = self.base.full_set();
        let a = self.a_set;
        if !(self.j0 < self.j1 && self.j1 < self.j2) || self.j1 - self.j0 != self.delta || self.j2 - self.j1 != self.delta {
            return bad("indices not in arithmetic progression");
        }
        if a.image(&c1) != a || !a.injective_under(&c1) {
            return bad("j1 is not a bijection of A");
        }
        if a.iter().any(|x| c1[x as usize] != c2[x as usize]) {
            return bad("j1 and j2 disagree on A");
        }
        if full.image(&c0) != self.b_set || !self.b_set.is_subset(a) || self.b_set == a {
            return bad("image of j0 is not a proper subset of A");
        }
        let target = LetterSet::from_letters(&a.iter().filter(|&x| !self.b_set.contains(c1[x as usize])).collect::<Vec<_>>());
        if !full.image(&ci).is_subset(target) {
            return bad("image of i leaves the target set");
        }
        Ok(())
    }
}

/// Searches powers `m <= max_power`, then `|A|`, then `(j0, j1, j2, i)`.
pub fn synthesize_scheme(theta: &Substitution, max_power: usize) -> Result<Option<IndependenceScheme>, Error> {
    let report = tameness_verdict(theta)?;
    if !matches!(report.verdict, Verdict::NonTame { .. }) {
        return Err(IndependenceError::PreconditionViolated(report.verdict.label().to_string()).into());
    }
    let base = report.pure_base.expect("non-tame verdict carries a pure base");
    let n = base.size();
    let full = base.full_set();
    for m in 1..=max_power {
        let theta_m = base.power(m);
        let cols: Vec<Vec<Letter>> = theta_m.columns().into_iter().map(|c| c.map).collect();
        let images: Vec<LetterSet> = cols.iter().map(|c| full.image(c)).collect();
        for k in 2..=n {
            let mut best: Option<(usize, usize, usize, usize, LetterSet, LetterSet)> = None;
            for a in (1u64..(1 << n)).map(LetterSet::from_bits).filter(|s| s.len() == k) {
                let mut groups: HashMap<Vec<Letter>, Vec<usize>> = HashMap::new();
                for (j, c) in cols.iter().enumerate() {
                    if a.image(c) == a {
                        groups.entry(a.iter().map(|x| c[x as usize]).collect()).or_default().push(j);
                    }
                }
                for (f, js) in &groups {
                    for (x, &j1) in js.iter().enumerate() {
                        for &j2 in &js[x + 1..] {
                            let delta = j2 - j1;
                            if delta > j1 {
                                continue;
                            }
                            let j0 = j1 - delta;
                            let b = images[j0];
                            if !b.is_subset(a) || b == a {
                                continue;
                            }
                            let target: Vec<Letter> = a
                                .iter()
                                .zip(f)
                                .filter(|&(_, &y)| !b.contains(y))
                                .map(|(x, _)| x)
                                .collect();
                            let target = LetterSet::from_letters(&target);
                            if target.is_empty() {
                                continue;
                            }
                            let Some(i) = images.iter().position(|s| s.is_subset(target)) else {
                                continue;
                            };
                            let cand = (j0, j1, j2, i, a, b);
                            let key = |c: &(usize, usize, usize, usize, LetterSet, LetterSet)| (c.0, c.1, c.2, c.3, c.4);
                            if best.as_ref().is_none_or(|bst| key(&cand) < key(bst)) {
                                best = Some(cand);
                            }
                        }
                    }
                }
            }
            if let Some((j0, j1, j2, i, a, b)) = best {
                let s = IndependenceScheme {
                    power: m,
                    base: base.clone(),
                    theta_m,
                    a_set: a,
                    b_set: b,
                    j0,
                    j1,
                    j2,
                    delta: j1 - j0,
                    i,
                };
                s.check()?;
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// `t_0 = 0`, `t_n = t_{n-1} + (j1 - i) L^{2n-1} + delta L^{2n-2}`.
pub fn independence_times(s: &IndependenceScheme, n: usize) -> Vec<BigInt> {
    let l = BigInt::from(s.big_l());
    let step = BigInt::from(s.j1 as i64 - s.i as i64);
    let delta = BigInt::from(s.delta);
    let mut out = vec![BigInt::zero()];
    for k in 1..=n {
        let prev = out[k - 1].clone();
        let e = 2 * k as u32;
        out.push(prev + &step * l.pow(e - 1) + &delta * l.pow(e - 2));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternRecord {
    /// Choice function `phi_0..phi_N`.
    pub phi: Vec<u8>,
    /// `z^(2N+2)` of the head built from `phi`.
    pub head_index: String,
    /// Window index of each time.
    pub positions: Vec<String>,
    /// For every vertex `v`, the letters at `t_0..t_N` in its fibre word.
    pub letters: Vec<(Letter, Word)>,
    pub realized: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub depth: usize,
    pub times: Vec<String>,
    /// Expected letter classes at each time for choice 0 and choice 1.
    pub classes: Vec<(LetterSet, LetterSet)>,
    pub patterns: Vec<PatternRecord>,
    pub all_realized: bool,
    pub first_failure: Option<Vec<u8>>,
}

/// Head digits `j_{phi_0}, i, j_{phi_1}, i, ...` in base `L`.
pub fn pattern_head(s: &IndependenceScheme, phi: &[u8]) -> OdometerHead {
    let js = [s.j0, s.j1];
    let digits: Vec<u64> = phi
        .iter()
        .flat_map(|&p| [js[p as usize] as u64, s.i as u64])
        .collect();
    OdometerHead::from_u64(Scale::constant(s.big_l() as u64), &digits).expect("digits below L")
}

/// Checks all `2^(N+1)` choice functions on the fibre words of depth
/// `2N+2`.
pub fn verify_patterns(s: &IndependenceScheme, n: usize) -> Result<IndependenceReport, Error> {
    s.check()?;
    let depth = 2 * n + 2;
    let times = independence_times(s, n);
    let a = s.a_set;
    let f1 = s.column(s.j1);
    let mut classes = Vec::with_capacity(n + 1);
    let mut c0 = s.b_set;
    for _ in 0..=n {
        classes.push((c0, a.minus(c0)));
        c0 = c0.image(&f1).image(&f1);
    }
    let window_len = (s.big_l() as u128).checked_pow(depth as u32);
    let materialise = window_len.is_some_and(|w| w <= MATERIALISE_LIMIT as u128);
    let phis: Vec<Vec<u8>> = (0..1u32 << (n + 1))
        .map(|bits| (0..=n).map(|k| (bits >> k & 1) as u8).collect())
        .collect();
    let words = if materialise {
        Some(fiber_window(&pattern_head(s, &phis[0]), &s.theta_m)?)
    } else {
        None
    };
    let vertices: Vec<Letter> = (0..s.theta_m.size() as Letter).collect();
    let limit = BigInt::from(s.big_l()).pow(depth as u32);
    let patterns: Result<Vec<PatternRecord>, IndependenceError> = phis
        .par_iter()
        .map(|phi| {
            let head = pattern_head(s, phi);
            let z = BigInt::from(head.index());
            let mut positions = Vec::with_capacity(n + 1);
            for (k, t) in times.iter().enumerate() {
                let p = &z + t;
                if p < BigInt::zero() || p >= limit {
                    return Err(IndependenceError::WindowTooShallow { n: k, depth });
                }
                positions.push(p);
            }
            let letters: Vec<(Letter, Word)> = vertices
                .iter()
                .map(|&v| {
                    let row = positions
                        .iter()
                        .map(|p| match &words {
                            Some(w) => w.words[v as usize].1[p.to_usize().unwrap()],
                            None => power_letter(&s.theta_m, v, depth, &p.to_biguint().unwrap()),
                        })
                        .collect();
                    (v, row)
                })
                .collect();
            let realized = letters.iter().all(|(_, row)| {
                row.iter().zip(phi).zip(&classes).all(|((&x, &p), &(c0, c1))| {
                    if p == 0 {
                        c0.contains(x)
                    } else {
                        c1.contains(x)
                    }
                })
            });
            Ok(PatternRecord {
                phi: phi.clone(),
                head_index: z.to_string(),
                positions: positions.iter().map(|p| p.to_string()).collect(),
                letters,
                realized,
            })
        })
        .collect();
    let patterns = patterns?;
    let first_failure = patterns.iter().find(|p| !p.realized).map(|p| p.phi.clone());
    Ok(IndependenceReport {
        depth,
        times: times.iter().map(|t| t.to_string()).collect(),
        classes,
        all_realized: first_failure.is_none(),
        first_failure,
        patterns,
    })
}

/// For every letter pattern of the report, a position `p` of a two-sided
/// fixed point of `theta^m` reading that pattern at `p + t_0, ..., p + t_N`.
pub fn scan_fixed_point(s: &IndependenceScheme, report: &IndependenceReport) -> Result<Vec<(Word, Option<i64>)>, Error> {
    let times: Vec<i64> = report.times.iter().map(|t| t.parse().expect("small times")).collect();
    let radius = s.big_l().pow(report.depth as u32);
    let w = s.theta_m.fixed_point_window(radius)?;
    let mut wanted: HashMap<Word, Option<i64>> = HashMap::new();
    for p in &report.patterns {
        for (_, row) in &p.letters {
            wanted.insert(row.clone(), None);
        }
    }
    let lo = -(radius as i64) - times.iter().min().copied().unwrap_or(0).min(0);
    let hi = radius as i64 - times.iter().max().copied().unwrap_or(0).max(0);
    let mut missing = wanted.len();
    let mut buf = vec![0; times.len()];
    for p in lo..hi {
        for (b, t) in buf.iter_mut().zip(&times) {
            *b = w.at(p + t);
        }
        if let Some(slot) = wanted.get_mut(&buf) {
            if slot.is_none() {
                *slot = Some(p);
                missing -= 1;
                if missing == 0 {
                    break;
                }
            }
        }
    }
    let mut out: Vec<(Word, Option<i64>)> = wanted.into_iter().collect();
    out.sort();
    Ok(out)
}
