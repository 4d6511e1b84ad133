//! Ordered Bratteli diagrams in column form, telescoping, the extended
//! diagram on subsets, thickness and double paths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtheta::{infinite_path_vertices, LetterSet};
use crate::multigraph::Multigraph;
use crate::substitution::{Letter, RawSubstitution, Substitution};

/// Subsets are enumerated exhaustively, so ranks stay small.
pub const MAX_RANK: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("rank {0} exceeds the supported maximum of 16")]
    RankTooLarge(usize),
    #[error("explicit diagram has no levels")]
    EmptyLevels,
    #[error("level {level}: alphabets of consecutive morphisms do not match")]
    AlphabetMismatch { level: usize },
    #[error("level {level}: column {column} is not a map from the upper to the lower alphabet")]
    BadColumn { level: usize, column: usize },
    #[error("last morphism must map an alphabet to itself to be repeated")]
    NotSquareTail,
    #[error("telescoping groups must be positive")]
    BadGroups,
    #[error("invalid diagram: {0}")]
    Json(String),
}

impl DiagramError {
    pub fn kind(&self) -> &'static str {
        match self {
            DiagramError::RankTooLarge(_) => "rank_too_large",
            DiagramError::EmptyLevels => "empty_levels",
            DiagramError::AlphabetMismatch { .. } => "alphabet_mismatch",
            DiagramError::BadColumn { .. } => "bad_column",
            DiagramError::NotSquareTail => "not_square_tail",
            DiagramError::BadGroups => "bad_groups",
            DiagramError::Json(_) => "json",
        }
    }
}

/// `theta^(n)`: the `l_n` column maps `V_{n+1} -> V_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelMorphism {
    pub upper: Vec<String>,
    pub lower: Vec<String>,
    pub columns: Vec<Vec<Letter>>,
}

impl LevelMorphism {
    pub fn from_substitution(theta: &Substitution) -> Self {
        LevelMorphism {
            upper: theta.alphabet().to_vec(),
            lower: theta.alphabet().to_vec(),
            columns: theta.columns().into_iter().map(|c| c.map).collect(),
        }
    }

    pub fn length(&self) -> usize {
        self.columns.len()
    }

    pub fn is_square(&self) -> bool {
        self.upper == self.lower
    }

    /// `self` after `next`: column `i + j l` is `self_i o next_j`.
    pub fn compose(&self, next: &LevelMorphism) -> LevelMorphism {
        assert_eq!(self.upper, next.lower, "morphisms do not compose");
        let mut columns = Vec::with_capacity(self.length() * next.length());
        for j in &next.columns {
            for i in &self.columns {
                columns.push(j.iter().map(|&b| i[b as usize]).collect());
            }
        }
        LevelMorphism {
            upper: next.upper.clone(),
            lower: self.lower.clone(),
            columns,
        }
    }

    fn power(&self, m: usize) -> LevelMorphism {
        let mut out = self.clone();
        for _ in 1..m {
            out = out.compose(self);
        }
        out
    }

    fn validate(&self, level: usize) -> Result<(), DiagramError> {
        for (c, col) in self.columns.iter().enumerate() {
            if col.len() != self.upper.len() || col.iter().any(|&x| x as usize >= self.lower.len()) {
                return Err(DiagramError::BadColumn { level, column: c });
            }
        }
        if self.columns.is_empty() {
            return Err(DiagramError::BadColumn { level, column: 0 });
        }
        Ok(())
    }
}

pub fn extended_image(m: &LevelMorphism, i: usize, s: LetterSet) -> LetterSet {
    s.image(&m.columns[i])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagramSpec {
    Stationary(Substitution),
    /// Morphisms `theta^(0), theta^(1), ...`; the last one repeats forever.
    Explicit(Vec<LevelMorphism>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecJson {
    Stationary { stationary: StationaryJson },
    Explicit { levels: Vec<LevelJson> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StationaryJson {
    Rules(RawSubstitution),
    Text(String),
}

#[derive(Deserialize)]
struct LevelJson {
    l: Option<usize>,
    upper: Option<String>,
    lower: Option<String>,
    columns: Vec<String>,
}

fn letters_of(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

impl DiagramSpec {
    pub fn explicit(levels: Vec<LevelMorphism>) -> Result<Self, DiagramError> {
        let s = DiagramSpec::Explicit(levels);
        s.validate()?;
        Ok(s)
    }

    /// `{"stationary": ...}` or `{"levels": [{"l":2,"upper":"ab","lower":"ab","columns":["ab","ba"]}]}`.
    /// A column string lists the images of the upper letters in order.
    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let raw: SpecJson = serde_json::from_str(text).map_err(|e| DiagramError::Json(e.to_string()))?;
        match raw {
            SpecJson::Stationary { stationary } => {
                let theta = match stationary {
                    StationaryJson::Rules(r) => crate::substitution::validate(&r),
                    StationaryJson::Text(t) => crate::substitution::parse(&t),
                }
                .map_err(|e| DiagramError::Json(e.to_string()))?;
                Ok(DiagramSpec::Stationary(theta))
            }
            SpecJson::Explicit { levels } => {
                let mut out: Vec<LevelMorphism> = Vec::new();
                for (n, lv) in levels.into_iter().enumerate() {
                    let lower = match (&lv.lower, out.last()) {
                        (Some(s), _) => letters_of(s),
                        (None, Some(prev)) => prev.upper.clone(),
                        (None, None) => return Err(DiagramError::Json("first level needs `lower`".into())),
                    };
                    let upper = lv.upper.as_deref().map(letters_of).unwrap_or_else(|| lower.clone());
                    if lv.l.is_some_and(|l| l != lv.columns.len()) {
                        return Err(DiagramError::BadColumn {
                            level: n,
                            column: lv.columns.len(),
                        });
                    }
                    let mut columns = Vec::new();
                    for (c, col) in lv.columns.iter().enumerate() {
                        let mapped: Option<Vec<Letter>> = col
                            .chars()
                            .map(|ch| lower.iter().position(|x| *x == ch.to_string()).map(|p| p as Letter))
                            .collect();
                        columns.push(mapped.ok_or(DiagramError::BadColumn { level: n, column: c })?);
                    }
                    out.push(LevelMorphism { upper, lower, columns });
                }
                DiagramSpec::explicit(out)
            }
        }
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        match self {
            DiagramSpec::Stationary(t) => {
                if t.size() > MAX_RANK {
                    return Err(DiagramError::RankTooLarge(t.size()));
                }
                Ok(())
            }
            DiagramSpec::Explicit(levels) => {
                let last = levels.last().ok_or(DiagramError::EmptyLevels)?;
                for (n, m) in levels.iter().enumerate() {
                    m.validate(n)?;
                    if m.upper.len() > MAX_RANK || m.lower.len() > MAX_RANK {
                        return Err(DiagramError::RankTooLarge(m.upper.len().max(m.lower.len())));
                    }
                }
                for (n, w) in levels.windows(2).enumerate() {
                    if w[0].upper != w[1].lower {
                        return Err(DiagramError::AlphabetMismatch { level: n + 1 });
                    }
                }
                if !last.is_square() {
                    return Err(DiagramError::NotSquareTail);
                }
                Ok(())
            }
        }
    }

    /// Morphism `theta^(n)`, `n >= 0`.
    pub fn level(&self, n: usize) -> LevelMorphism {
        match self {
            DiagramSpec::Stationary(t) => LevelMorphism::from_substitution(t),
            DiagramSpec::Explicit(levels) => levels[n.min(levels.len() - 1)].clone(),
        }
    }

    /// Index from which every morphism equals the repeated one.
    fn tail_start(&self) -> usize {
        match self {
            DiagramSpec::Stationary(_) => 0,
            DiagramSpec::Explicit(levels) => levels.len() - 1,
        }
    }

    /// The repeated morphism.
    pub fn tail(&self) -> LevelMorphism {
        self.level(self.tail_start())
    }

    /// Largest alphabet over all levels.
    pub fn rank(&self) -> usize {
        match self {
            DiagramSpec::Stationary(t) => t.size(),
            DiagramSpec::Explicit(levels) => levels
                .iter()
                .map(|m| m.upper.len().max(m.lower.len()))
                .max()
                .unwrap_or(0),
        }
    }

    /// Naive first/last-letter criterion for the stationary order to be
    /// proper.
    pub fn has_proper_order(&self) -> bool {
        match self {
            DiagramSpec::Stationary(t) => t.has_proper_naive_order(),
            DiagramSpec::Explicit(_) => true,
        }
    }
}

/// Composes consecutive levels in blocks of the given sizes; the last group
/// size repeats forever.
pub fn telescope(spec: &DiagramSpec, groups: &[usize]) -> Result<DiagramSpec, DiagramError> {
    if groups.is_empty() || groups.contains(&0) {
        return Err(DiagramError::BadGroups);
    }
    let g_tail = *groups.last().unwrap();
    if let DiagramSpec::Stationary(t) = spec {
        if groups.iter().all(|&g| g == g_tail) {
            return Ok(DiagramSpec::Stationary(if g_tail == 1 { t.clone() } else { t.power(g_tail) }));
        }
    }
    let tail_start = spec.tail_start();
    let mut out = Vec::new();
    let mut n = 0;
    let mut gi = 0;
    // compose explicit groups until both the groups and the prefix levels
    // are used up; beyond that every block is the tail power
    loop {
        let g = groups[gi.min(groups.len() - 1)];
        if n >= tail_start && gi + 1 >= groups.len() {
            break;
        }
        let mut m = spec.level(n);
        for k in 1..g {
            m = m.compose(&spec.level(n + k));
        }
        out.push(m);
        n += g;
        gi += 1;
    }
    out.push(spec.tail().power(g_tail));
    DiagramSpec::explicit(out)
}

fn all_subsets(n: usize) -> impl Iterator<Item = LetterSet> {
    (1u64..(1u64 << n)).map(LetterSet::from_bits)
}

/// For a square morphism: subsets `S` with an infinite chain of extended
/// edges below them.
fn stationary_extendable(m: &LevelMorphism) -> BTreeSet<LetterSet> {
    let n = m.lower.len();
    let count = (1usize << n) - 1;
    let mut edges = Vec::new();
    for b in all_subsets(n) {
        for c in &m.columns {
            let a = b.image(c);
            edges.push((a.bits() as usize - 1, b.bits() as usize - 1));
        }
    }
    let alive = infinite_path_vertices(count, &edges);
    (0..count)
        .filter(|&i| alive[i])
        .map(|i| LetterSet::from_bits(i as u64 + 1))
        .collect()
}

/// Subsets of `V_level` traversed by a path of the extended diagram. The
/// upward direction is always available; downward chains are exact on the
/// repeated tail and truncated at `horizon` levels on the explicit prefix.
pub fn extendable_vertices(
    spec: &DiagramSpec,
    level: usize,
    horizon: usize,
) -> Result<BTreeSet<LetterSet>, DiagramError> {
    spec.validate()?;
    let tail_start = spec.tail_start();
    let tail_ext = stationary_extendable(&spec.tail());
    let mut memo: HashMap<(usize, LetterSet, usize), bool> = HashMap::new();
    fn ext(
        spec: &DiagramSpec,
        n: usize,
        a: LetterSet,
        h: usize,
        tail_start: usize,
        tail_ext: &BTreeSet<LetterSet>,
        memo: &mut HashMap<(usize, LetterSet, usize), bool>,
    ) -> bool {
        if n >= tail_start {
            return tail_ext.contains(&a);
        }
        if h == 0 {
            return true;
        }
        if let Some(&v) = memo.get(&(n, a, h)) {
            return v;
        }
        let m = spec.level(n);
        let mut found = false;
        'outer: for b in all_subsets(m.upper.len()) {
            for c in &m.columns {
                if b.image(c) == a && ext(spec, n + 1, b, h - 1, tail_start, tail_ext, memo) {
                    found = true;
                    break 'outer;
                }
            }
        }
        memo.insert((n, a, h), found);
        found
    }
    let size = spec.level(level).lower.len();
    Ok(all_subsets(size)
        .filter(|&a| ext(spec, level, a, horizon, tail_start, &tail_ext, &mut memo))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathClass {
    None,
    AtMostCountable,
    Uncountable,
}

/// Cardinality-`k` stratum of the repeated morphism: edges `theta_i(B) -> B`
/// with `|theta_i(B)| = |B| = k`.
struct Stratum {
    vertices: Vec<LetterSet>,
    edges: Vec<(usize, usize, usize)>,
}

fn stratum(m: &LevelMorphism, k: usize) -> Stratum {
    let vertices: Vec<LetterSet> = all_subsets(m.lower.len()).filter(|s| s.len() == k).collect();
    let index: HashMap<LetterSet, usize> = vertices.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut edges = Vec::new();
    for (bi, &b) in vertices.iter().enumerate() {
        for (i, c) in m.columns.iter().enumerate() {
            let a = b.image(c);
            if a.len() == k {
                edges.push((index[&a], bi, i));
            }
        }
    }
    Stratum { vertices, edges }
}

impl Stratum {
    fn multigraph(&self) -> Multigraph {
        Multigraph::new(self.vertices.len(), self.edges.iter().map(|&(s, t, _)| (s, t)).collect())
    }

    fn classify(&self) -> (PathClass, usize) {
        let c = self.multigraph().census();
        let cyclic = c.cyclic_components();
        let class = if c.shared_vertex.is_some() {
            PathClass::Uncountable
        } else if cyclic > 0 {
            PathClass::AtMostCountable
        } else {
            PathClass::None
        };
        (class, cyclic)
    }

    /// Distinct label words of length `1..=depth` read along paths that
    /// continue forever inside the stratum.
    fn head_counts(&self, depth: usize) -> Vec<usize> {
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|&(s, t, _)| (s, t)).collect();
        let alive = infinite_path_vertices(self.vertices.len(), &pairs);
        let start: BTreeSet<usize> = (0..self.vertices.len()).filter(|&v| alive[v]).collect();
        let mut level: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        if !start.is_empty() {
            level.insert(start, 1);
        }
        let mut out = Vec::with_capacity(depth);
        for _ in 0..depth {
            let mut next: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
            for (states, count) in &level {
                let mut by_label: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
                for &(s, t, l) in &self.edges {
                    if states.contains(&s) && alive[t] {
                        by_label.entry(l).or_default().insert(t);
                    }
                }
                for (_, targets) in by_label {
                    *next.entry(targets).or_default() += count;
                }
            }
            out.push(next.values().sum());
            level = next;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumCensus {
    pub k: usize,
    pub class: PathClass,
    pub cyclic_components: usize,
    /// Number of distinct heads of length `1..=depth`.
    pub head_counts: Vec<usize>,
    /// Growth of `head_counts` reads as exponential.
    pub oracle_exponential: bool,
}

impl StratumCensus {
    /// Oracle and classification agree: exponential growth exactly for
    /// uncountable strata, no heads exactly for empty ones.
    pub fn oracle_agrees(&self) -> bool {
        let empty = self.head_counts.last().is_none_or(|&c| c == 0);
        match self.class {
            PathClass::None => empty,
            PathClass::AtMostCountable => !empty && !self.oracle_exponential,
            PathClass::Uncountable => self.oracle_exponential,
        }
    }
}

/// Classification of every cardinality `k = 1..=rank` on the repeated
/// morphism, with the head-counting oracle at the given depth.
pub fn thickness_census(spec: &DiagramSpec, depth: usize) -> Result<Vec<StratumCensus>, DiagramError> {
    spec.validate()?;
    let tail = spec.tail();
    let depth = depth.max(2);
    let mut out = Vec::new();
    for k in 1..=tail.lower.len() {
        let s = stratum(&tail, k);
        let (class, cyclic) = s.classify();
        let head_counts = s.head_counts(depth);
        let (last, prev) = (head_counts[depth - 1], head_counts[depth - 2]);
        // polynomial growth of degree below the number of cycles keeps the
        // ratio under 1 + cycles/depth
        let oracle_exponential = prev > 0 && (last as f64 / prev as f64) > 1.0 + cyclic.max(1) as f64 / depth as f64;
        out.push(StratumCensus {
            k,
            class,
            cyclic_components: cyclic,
            head_counts,
            oracle_exponential,
        });
    }
    Ok(out)
}

/// Largest `k` whose stratum carries uncountably many paths, or 1.
pub fn essential_thickness(spec: &DiagramSpec) -> Result<usize, DiagramError> {
    spec.validate()?;
    let tail = spec.tail();
    for k in (2..=tail.lower.len()).rev() {
        if stratum(&tail, k).classify().0 == PathClass::Uncountable {
            return Ok(k);
        }
    }
    Ok(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelEdgeWitness {
    pub power: usize,
    pub upper: LetterSet,
    pub lower: LetterSet,
    pub labels: (usize, usize),
    pub cardinality: usize,
}

impl ParallelEdgeWitness {
    /// Re-derives the witness property by composing the columns of the
    /// repeated morphism digit by digit.
    pub fn check(&self, spec: &DiagramSpec) -> bool {
        let m = spec.tail();
        let l = m.length();
        let compose = |mut label: usize| -> Vec<Letter> {
            let mut digits = Vec::with_capacity(self.power);
            for _ in 0..self.power {
                digits.push(label % l);
                label /= l;
            }
            (0..m.upper.len() as Letter)
                .map(|a| digits.iter().rev().fold(a, |x, &d| m.columns[d][x as usize]))
                .collect()
        };
        let (f, g) = (compose(self.labels.0), compose(self.labels.1));
        let a = self.upper;
        self.labels.0 != self.labels.1
            && a.len() == self.cardinality
            && a.image(&f) == self.lower
            && a.image(&g) == self.lower
            && a.injective_under(&f)
            && a.iter().all(|x| f[x as usize] == g[x as usize])
    }
}

/// First `(m, j1, j2)` such that columns `j1 < j2` of `theta^m` restrict to
/// the same bijection of a `k`-set `A` onto itself.
pub fn find_double_path(
    spec: &DiagramSpec,
    k: usize,
    max_power: usize,
) -> Result<Option<ParallelEdgeWitness>, DiagramError> {
    spec.validate()?;
    let base = spec.tail();
    let n = base.lower.len();
    if k < 2 || k > n {
        return Ok(None);
    }
    let sets: Vec<LetterSet> = all_subsets(n).filter(|s| s.len() == k).collect();
    let mut m_cols = base.clone();
    for m in 1..=max_power {
        if m > 1 {
            m_cols = m_cols.compose(&base);
        }
        let mut best: Option<(usize, usize, LetterSet)> = None;
        for &a in &sets {
            // restricted bijection -> earliest column and the next one
            let mut first: HashMap<Vec<Letter>, usize> = HashMap::new();
            let mut pair: Option<(usize, usize)> = None;
            for (j, c) in m_cols.columns.iter().enumerate() {
                if a.image(c) != a {
                    continue;
                }
                let restricted: Vec<Letter> = a.iter().map(|x| c[x as usize]).collect();
                match first.get(&restricted) {
                    Some(&j1) => {
                        if pair.is_none_or(|(p1, _)| j1 < p1) {
                            pair = Some((j1, j));
                        }
                    }
                    None => {
                        first.insert(restricted, j);
                    }
                }
            }
            if let Some((j1, j2)) = pair {
                if best.is_none_or(|(b1, b2, _)| (j1, j2) < (b1, b2)) {
                    best = Some((j1, j2, a));
                }
            }
        }
        if let Some((j1, j2, a)) = best {
            return Ok(Some(ParallelEdgeWitness {
                power: m,
                upper: a,
                lower: a,
                labels: (j1, j2),
                cardinality: k,
            }));
        }
    }
    Ok(None)
}
