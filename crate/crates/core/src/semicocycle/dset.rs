use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SemicocycleError;
use crate::odometer::{OdometerHead, OdometerPoint, Scale};

pub const MAX_STAGE: usize = 12;

/// A point of `D`: digit `3^head[n-1]` at levels `n <= head.len()`, then
/// `3^tail` forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DPoint {
    pub head: Vec<u32>,
    pub tail: u32,
}

impl DPoint {
    /// Exponent of digit `z_n`, `n >= 1`.
    pub fn exponent(&self, n: usize) -> u32 {
        self.head.get(n - 1).copied().unwrap_or(self.tail)
    }

    pub fn exponents(&self, depth: usize) -> Vec<u32> {
        (1..=depth).map(|n| self.exponent(n)).collect()
    }

    pub fn head(&self, depth: usize) -> OdometerHead {
        let digits = (1..=depth).map(|n| BigUint::from(3u32).pow(self.exponent(n))).collect();
        OdometerHead::new(Scale::powers(4), digits).expect("3^p < 4^n for p < n")
    }

    pub fn to_point(&self) -> OdometerPoint {
        OdometerPoint::new(self.head(self.head.len()), BigUint::from(3u32).pow(self.tail))
            .expect("tail exponent equals the head length")
    }

    /// `3̄^t 3^p_k ... 3^p_1`.
    pub fn notation(&self) -> String {
        let mut s = format!("3bar^{}", self.tail);
        for p in self.head.iter().rev() {
            s.push_str(&format!(" 3^{p}"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DStage {
    pub stage: usize,
    pub points: Vec<DPoint>,
}

impl DStage {
    /// A stage with arbitrary points, used to exercise the checkers.
    pub fn from_points(stage: usize, points: Vec<DPoint>) -> Self {
        DStage { stage, points }
    }

    /// Distinct heads of length `m`, least significant exponent first.
    pub fn heads(&self, m: usize) -> BTreeSet<Vec<u32>> {
        self.points.iter().map(|p| p.exponents(m)).collect()
    }

    pub fn max_head_len(&self) -> usize {
        self.points.iter().map(|p| p.head.len()).max().unwrap_or(0)
    }
}

pub fn build_d_stage(i: usize) -> Result<DStage, SemicocycleError> {
    if i > MAX_STAGE {
        return Err(SemicocycleError::StageTooLarge(i));
    }
    let mut points = vec![DPoint { head: vec![], tail: 0 }];
    for k in 0..i {
        let m = 1usize << k;
        let fresh: Vec<DPoint> = (0..m)
            .map(|l| DPoint {
                head: points[l].exponents(m + l),
                tail: (m + l) as u32,
            })
            .collect();
        points.extend(fresh);
    }
    Ok(DStage { stage: i, points })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeadsReport {
    pub m: usize,
    pub heads: Vec<Vec<u32>>,
    pub special: Vec<u32>,
}

/// `Head_m` and its unique word with other than one extension in
/// `Head_{m+1}`.
pub fn heads_and_special(m: usize, stage: &DStage) -> Result<HeadsReport, SemicocycleError> {
    if m + 1 > 1 << stage.stage {
        return Err(SemicocycleError::Unstable { m, stage: stage.stage });
    }
    let heads = stage.heads(m);
    let mut preimages: BTreeMap<Vec<u32>, usize> = heads.iter().map(|h| (h.clone(), 0)).collect();
    for h in stage.heads(m + 1) {
        *preimages.get_mut(&h[..m]).expect("prefix of a longer head") += 1;
    }
    let special: Vec<Vec<u32>> = preimages.into_iter().filter(|&(_, c)| c != 1).map(|(h, _)| h).collect();
    if special.len() != 1 {
        return Err(SemicocycleError::NoUniqueSpecial {
            m,
            count: special.len(),
        });
    }
    Ok(HeadsReport {
        m,
        heads: heads.into_iter().collect(),
        special: special.into_iter().next().unwrap(),
    })
}

/// Exponents of the digits of `h` that are powers of 3.
fn digit_exponents(h: &OdometerHead) -> Vec<Option<u32>> {
    let mut pow = BigUint::one();
    let mut table: HashMap<BigUint, u32> = HashMap::new();
    for p in 0..h.depth() as u32 {
        table.insert(pow.clone(), p);
        pow *= 3u32;
    }
    h.digits().iter().map(|d| table.get(d).copied()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct F5Value {
    pub letter: char,
    pub l: usize,
    pub confident: bool,
}

/// `a` when the longest head overlap with the stage is odd. The value is
/// certified when the overlap is shorter than the head and short enough
/// for `Head_{L+1}` to be stable at this stage.
pub fn f5_eval(h: &OdometerHead, stage: &DStage) -> Result<F5Value, SemicocycleError> {
    if h.scale() != &Scale::powers(4) {
        return Err(SemicocycleError::ScaleMismatch("powers of 4"));
    }
    let exps = digit_exponents(h);
    let l = stage
        .points
        .iter()
        .map(|p| {
            exps.iter()
                .enumerate()
                .take_while(|&(n, e)| *e == Some(p.exponent(n + 1)))
                .count()
        })
        .max()
        .unwrap_or(0);
    Ok(F5Value {
        letter: if l % 2 == 1 { 'a' } else { 'b' },
        l,
        confident: l < h.depth() && l < 1 << stage.stage,
    })
}

fn stage_for_depth(depth: usize) -> usize {
    let mut i = 0;
    while (1usize << i) < depth {
        i += 1;
    }
    i
}

/// `f(zhat + n)` for `n` in `n0..=n1`, deepening the stage until
/// `2^i >= depth(zhat)`.
pub fn toeplitz5_window(zhat: &OdometerHead, n0: i64, n1: i64, stage: &DStage) -> Result<String, SemicocycleError> {
    let need = stage_for_depth(zhat.depth());
    let deeper;
    let stage = if need > stage.stage {
        deeper = build_d_stage(need)?;
        &deeper
    } else {
        stage
    };
    let mut out = String::new();
    for n in n0..=n1 {
        let v = f5_eval(&zhat.add_i64(n), stage)?;
        if !v.confident {
            return Err(SemicocycleError::InsufficientDepth { n });
        }
        out.push(v.letter);
    }
    Ok(out)
}

/// First pair of points violating "equal digit at level n implies equal
/// head of length n", checked up to one level past the longest head.
pub fn check_p1(stage: &DStage) -> Option<(usize, usize, usize)> {
    let depth = stage.max_head_len() + 1;
    let exps: Vec<Vec<u32>> = stage.points.iter().map(|p| p.exponents(depth)).collect();
    for (a, x) in exps.iter().enumerate() {
        for (b, y) in exps.iter().enumerate().skip(a + 1) {
            for n in 0..depth {
                if x[n] == y[n] && x[..n] != y[..n] {
                    return Some((a, b, n + 1));
                }
            }
        }
    }
    None
}

/// Digit bounds (never 0 or `4^n - 1`, exponent at most `n - 1`) and the
/// absence of integer translates `|t| <= t_bound` between distinct points,
/// compared at the given depth or deep enough to separate the points.
pub fn check_p2(stage: &DStage, t_bound: u64, depth: usize) -> Result<(), String> {
    let levels = stage.max_head_len() + 1;
    for (k, p) in stage.points.iter().enumerate() {
        for n in 1..=levels {
            let e = p.exponent(n);
            if e as usize > n - 1 {
                return Err(format!("point {k}: exponent {e} at level {n}"));
            }
            let d = BigUint::from(3u32).pow(e);
            let top = BigUint::from(4u32).pow(n as u32) - 1u32;
            if d.is_zero() || d == top {
                return Err(format!("point {k}: extreme digit at level {n}"));
            }
        }
    }
    let depth = depth.max(levels);
    let modulus = Scale::powers(4).cumulative(depth).pop().unwrap();
    let res: Vec<BigUint> = stage.points.iter().map(|p| p.head(depth).index()).collect();
    let bound = BigUint::from(t_bound);
    for a in 0..res.len() {
        for b in a + 1..res.len() {
            let diff = if res[b] >= res[a] {
                &res[b] - &res[a]
            } else {
                &modulus - (&res[a] - &res[b])
            };
            if diff <= bound || &modulus - &diff <= bound {
                return Err(format!("points {a} and {b} are integer translates at depth {depth}"));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub sample: usize,
    /// `(point index, t)` with `d + t + z` in `D` at the working depth.
    pub hits: Vec<(usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisjointnessReport {
    /// Requested depth raised until distinct stage points have distinct
    /// heads.
    pub depth: usize,
    pub samples: usize,
    pub excluded: usize,
    pub with_hits: usize,
    pub violations: Vec<Violation>,
}

fn working_depth(stage: &DStage, depth: usize) -> usize {
    depth.max(stage.max_head_len() + 1)
}

struct TranslateTable {
    modulus: BigUint,
    members: HashSet<BigUint>,
    /// `(point, t, residue of d + t)`.
    shifted: Vec<(usize, i64, BigUint)>,
}

impl TranslateTable {
    fn new(stage: &DStage, t_range: i64, depth: usize) -> Result<Self, SemicocycleError> {
        let depth = working_depth(stage, depth);
        let modulus = Scale::powers(4).cumulative(depth).pop().unwrap();
        let canonical = build_d_stage(stage_for_depth(depth))?;
        let members: HashSet<BigUint> = canonical
            .points
            .iter()
            .chain(&stage.points)
            .map(|p| p.head(depth).index())
            .collect();
        let m = BigInt::from(modulus.clone());
        let mut shifted = Vec::new();
        for (k, p) in stage.points.iter().enumerate() {
            let r = BigInt::from(p.head(depth).index());
            for t in -t_range..=t_range {
                let v = (&r + t) % &m;
                let v = if v < BigInt::zero() { v + &m } else { v };
                shifted.push((k, t, v.to_biguint().unwrap()));
            }
        }
        Ok(TranslateTable {
            modulus,
            members,
            shifted,
        })
    }

    fn hits(&self, z: &BigUint) -> Vec<(usize, i64)> {
        self.shifted
            .iter()
            .filter_map(|(k, t, r)| {
                let mut v = r + z;
                if v >= self.modulus {
                    v -= &self.modulus;
                }
                self.members.contains(&v).then_some((*k, *t))
            })
            .collect()
    }
}

/// Pairs `(d, t)` with `d + t + z` in `D` at the given depth.
pub fn translate_hits(
    stage: &DStage,
    t_range: i64,
    depth: usize,
    z: &OdometerHead,
) -> Result<Vec<(usize, i64)>, SemicocycleError> {
    if z.scale() != &Scale::powers(4) {
        return Err(SemicocycleError::ScaleMismatch("powers of 4"));
    }
    let table = TranslateTable::new(stage, t_range, depth)?;
    let depth = working_depth(stage, depth);
    if z.depth() < depth {
        return Err(SemicocycleError::InsufficientDepth { n: depth as i64 });
    }
    Ok(table.hits(&z.truncate(depth).index()))
}

/// Samples non-integer `z`, half uniformly and half of the form
/// `e - d - t` for stage points `e != d`, and reports every `z` with two
/// distinct pairs `(d, t)` landing in `D`.
pub fn check_translate_disjointness(
    stage: &DStage,
    t_range: i64,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<DisjointnessReport, SemicocycleError> {
    let table = TranslateTable::new(stage, t_range, depth)?;
    let depth = working_depth(stage, depth);
    let moduli = Scale::powers(4).moduli(depth);
    let residues: Vec<BigUint> = stage.points.iter().map(|p| p.head(depth).index()).collect();
    let near = BigUint::from(1_000_000u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DisjointnessReport {
        depth,
        samples,
        excluded: 0,
        with_hits: 0,
        violations: Vec::new(),
    };
    for sample in 0..samples {
        let z = if sample % 2 == 1 && residues.len() > 1 {
            let e = rng.random_range(0..residues.len());
            let mut d = rng.random_range(0..residues.len() - 1);
            if d >= e {
                d += 1;
            }
            let t = rng.random_range(-t_range..=t_range);
            let m = BigInt::from(table.modulus.clone());
            let v = (BigInt::from(residues[e].clone()) - BigInt::from(residues[d].clone()) - t) % &m;
            let v = if v < BigInt::zero() { v + m } else { v };
            v.to_biguint().unwrap()
        } else {
            let digits: Vec<BigUint> = moduli.iter().map(|m| rng.random_biguint_below(m)).collect();
            OdometerHead::new(Scale::powers(4), digits).unwrap().index()
        };
        if z <= near || &table.modulus - &z <= near {
            report.excluded += 1;
            continue;
        }
        let hits = table.hits(&z);
        if !hits.is_empty() {
            report.with_hits += 1;
        }
        if hits.len() > 1 {
            report.violations.push(Violation { sample, hits });
        }
    }
    Ok(report)
}

trait RandomBig {
    fn random_biguint_below(&mut self, bound: &BigUint) -> BigUint;
}

impl<R: Rng> RandomBig for R {
    fn random_biguint_below(&mut self, bound: &BigUint) -> BigUint {
        // rejection sampling on the bit length of the bound
        let bits = bound.bits();
        loop {
            let words = bits.div_ceil(32) as usize;
            let mut v: Vec<u32> = (0..words).map(|_| self.random()).collect();
            let extra = (words as u64 * 32 - bits) as u32;
            if let Some(top) = v.last_mut() {
                *top >>= extra;
            }
            let x = BigUint::new(v);
            if &x < bound {
                return x;
            }
        }
    }
}
