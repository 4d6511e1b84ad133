//! The subset graph `G_theta`, the two-cycle criterion for tameness, fibre
//! windows and the canonical semicocycle.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::multigraph::Multigraph;
pub use crate::multigraph::{CycleCensus, SccSummary};
use crate::odometer::{OdometerHead, Scale};
use crate::substitution::{AnalysisReport, Letter, Substitution, SubstitutionError, Verdict, Word};
use crate::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("head scale must be constant {expected}")]
    ScaleMismatch { expected: usize },
    #[error("head must have depth at least 1")]
    EmptyHead,
    #[error("two cycles share vertex {0}; cycle count is infinite")]
    SharedVertex(String),
}

impl GraphError {
    pub fn kind(&self) -> &'static str {
        match self {
            GraphError::ScaleMismatch { .. } => "scale_mismatch",
            GraphError::EmptyHead => "empty_head",
            GraphError::SharedVertex(_) => "shared_vertex",
        }
    }
}

/// Subset of the alphabet as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct LetterSet(u64);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);

    pub fn full(n: usize) -> LetterSet {
        if n == 64 {
            LetterSet(u64::MAX)
        } else {
            LetterSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> LetterSet {
        LetterSet(bits)
    }

    pub fn singleton(a: Letter) -> LetterSet {
        LetterSet(1 << a)
    }

    pub fn from_letters(letters: &[Letter]) -> LetterSet {
        LetterSet(letters.iter().fold(0, |m, &a| m | (1 << a)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, a: Letter) -> bool {
        self.0 >> a & 1 == 1
    }

    pub fn insert(&mut self, a: Letter) {
        self.0 |= 1 << a;
    }

    pub fn is_subset(self, other: LetterSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: LetterSet) -> LetterSet {
        LetterSet(self.0 | other.0)
    }

    pub fn minus(self, other: LetterSet) -> LetterSet {
        LetterSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Letter> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let a = bits.trailing_zeros() as Letter;
            bits &= bits - 1;
            Some(a)
        })
    }

    pub fn first(self) -> Option<Letter> {
        self.iter().next()
    }

    /// Image under a letter map.
    pub fn image(self, map: &[Letter]) -> LetterSet {
        let mut out = 0u64;
        for a in self.iter() {
            out |= 1 << map[a as usize];
        }
        LetterSet(out)
    }

    /// Restricting `map` to `self` is injective.
    pub fn injective_under(self, map: &[Letter]) -> bool {
        self.image(map).len() == self.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub source: usize,
    pub target: usize,
    pub label: usize,
}

/// `G_theta`: vertices are the full alphabet and every image of it under a
/// composition of columns with more than one letter; an edge `B -> A`
/// labelled `i` whenever `theta_i(A) = B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetGraph {
    pub alphabet_size: usize,
    pub vertices: Vec<LetterSet>,
    pub edges: Vec<GraphEdge>,
    /// Vertex starts an infinite path.
    pub extendable: Vec<bool>,
}

impl SubsetGraph {
    pub fn index_of(&self, s: LetterSet) -> Option<usize> {
        self.vertices.iter().position(|&v| v == s)
    }

    pub fn multigraph(&self) -> Multigraph {
        Multigraph::new(
            self.vertices.len(),
            self.edges.iter().map(|e| (e.source, e.target)).collect(),
        )
    }

    /// Edges as `(source set, target set, label)` triples.
    pub fn edge_sets(&self) -> Vec<(LetterSet, LetterSet, usize)> {
        self.edges
            .iter()
            .map(|e| (self.vertices[e.source], self.vertices[e.target], e.label))
            .collect()
    }

    pub fn to_dot(&self, theta: &Substitution) -> String {
        let mut s = String::from("digraph G {\n");
        for (v, &ext) in self.vertices.iter().zip(&self.extendable) {
            let name = theta.set_name(*v);
            if ext {
                let _ = writeln!(s, "  \"{name}\";");
            } else {
                let _ = writeln!(s, "  \"{name}\" [color=grey, fontcolor=grey];");
            }
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                theta.set_name(self.vertices[e.source]),
                theta.set_name(self.vertices[e.target]),
                e.label
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Vertices from which an infinite path leaves, found by repeatedly
/// discarding vertices without a surviving successor.
pub(crate) fn infinite_path_vertices(n: usize, edges: &[(usize, usize)]) -> Vec<bool> {
    let mut alive = vec![true; n];
    let mut out = vec![0usize; n];
    let mut preds = vec![Vec::new(); n];
    for &(s, t) in edges {
        out[s] += 1;
        preds[t].push(s);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| out[v] == 0).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &p in &preds[v] {
            out[p] -= 1;
            if out[p] == 0 && alive[p] {
                stack.push(p);
            }
        }
    }
    alive
}

pub fn build_gtheta(theta: &Substitution) -> SubsetGraph {
    let columns = theta.columns();
    let full = theta.full_set();
    let mut vertices = vec![full];
    let mut index: HashMap<LetterSet, usize> = HashMap::from([(full, 0)]);
    let mut edges = Vec::new();
    let mut next = 0;
    while next < vertices.len() {
        let a = vertices[next];
        for c in &columns {
            let b = c.image(a);
            if b.len() < 2 {
                continue;
            }
            let src = *index.entry(b).or_insert_with(|| {
                vertices.push(b);
                vertices.len() - 1
            });
            edges.push(GraphEdge {
                source: src,
                target: next,
                label: c.index,
            });
        }
        next += 1;
    }
    let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.source, e.target)).collect();
    let extendable = infinite_path_vertices(vertices.len(), &pairs);
    SubsetGraph {
        alphabet_size: theta.size(),
        vertices,
        edges,
        extendable,
    }
}

/// Decides whether two distinct cycles share a vertex: some component has
/// more internal edges than vertices.
pub fn two_cycles_share_vertex(g: &SubsetGraph) -> CycleCensus {
    g.multigraph().census()
}

/// Number of simple cycles of a graph without shared vertices, an upper
/// bound for the number of singular orbits.
pub fn cycle_count_upper_bound(g: &SubsetGraph) -> Result<usize, GraphError> {
    let c = two_cycles_share_vertex(g);
    if let Some(v) = c.shared_vertex {
        return Err(GraphError::SharedVertex(format!("{:#x}", g.vertices[v].bits())));
    }
    Ok(c.cyclic_components())
}

fn small_digits(h: &OdometerHead, l: usize) -> Result<Vec<usize>, GraphError> {
    if h.scale() != &Scale::constant(l as u64) {
        return Err(GraphError::ScaleMismatch { expected: l });
    }
    Ok(h.digits().iter().map(|d| d.to_usize().expect("digit below l")).collect())
}

/// `G_theta'` has a path whose labels read `z_1, ..., z_n`.
pub fn discontinuity_membership(h: &OdometerHead, base: &Substitution) -> Result<bool, GraphError> {
    let z = small_digits(h, base.length())?;
    if z.is_empty() {
        return Err(GraphError::EmptyHead);
    }
    let g = build_gtheta(base);
    let mut current = vec![true; g.vertices.len()];
    for &label in &z {
        let mut next = vec![false; g.vertices.len()];
        for e in g.edges.iter().filter(|e| e.label == label && current[e.source]) {
            next[e.target] = true;
        }
        if !next.iter().any(|&x| x) {
            return Ok(false);
        }
        current = next;
    }
    Ok(true)
}

/// The words `theta^n(v)` for each letter `v`, placed on
/// `[-z^(n), l^n - z^(n))`.
#[derive(Clone, Debug)]
pub struct FiberWindow {
    pub depth: usize,
    pub offset: BigInt,
    pub words: Vec<(Letter, Word)>,
}

impl FiberWindow {
    /// Letter of the word of `v` at absolute position `p`.
    pub fn letter_at(&self, v: Letter, p: &BigInt) -> Option<Letter> {
        let idx = (p - &self.offset).to_usize()?;
        self.words[v as usize].1.get(idx).copied()
    }

    /// Length of each fibre word.
    pub fn len(&self) -> usize {
        self.words.first().map_or(0, |w| w.1.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn fiber_window(h: &OdometerHead, theta: &Substitution) -> Result<FiberWindow, GraphError> {
    small_digits(h, theta.length())?;
    let n = h.depth();
    let words = (0..theta.size() as Letter)
        .map(|v| (v, theta.iterate(&[v], n)))
        .collect();
    Ok(FiberWindow {
        depth: n,
        offset: -BigInt::from(h.index()),
        words,
    })
}

/// Letter at index `p` of `theta^n(v)`, by composing the columns named by
/// the base-`l` digits of `p`.
pub fn power_letter(theta: &Substitution, v: Letter, n: usize, p: &BigUint) -> Letter {
    let l = theta.length() as u32;
    let mut digits = p.to_radix_le(l);
    digits.resize(n, 0);
    assert!(digits.len() == n, "index beyond theta^n(v)");
    let mut a = v;
    for &d in digits.iter().rev() {
        a = theta.rule(a)[d as usize];
    }
    a
}

/// `f_can` at depth `n`: the common letter of all fibre words at position 0.
pub fn canonical_semicocycle_eval(h: &OdometerHead, theta: &Substitution) -> Result<Option<Letter>, GraphError> {
    let z = small_digits(h, theta.length())?;
    let mut s = theta.full_set();
    for &d in z.iter().rev() {
        s = theta.column(d).image(s);
    }
    Ok(if s.len() == 1 { s.first() } else { None })
}

/// Full pipeline: primitivity, aperiodicity, pure base, coincidence, graph,
/// cycle census.
pub fn tameness_verdict(theta: &Substitution) -> Result<AnalysisReport, Error> {
    if !theta.is_primitive() {
        return Err(SubstitutionError::NotPrimitive.into());
    }
    let aperiodic = theta.is_aperiodic();
    if let Some((n, count)) = aperiodic.witness {
        return Err(SubstitutionError::Periodic { n, count }.into());
    }
    let mut report = AnalysisReport {
        substitution: theta.clone(),
        primitive: true,
        aperiodic,
        height: None,
        pure_base: None,
        coincidence: None,
        graph: None,
        census: None,
        verdict: Verdict::Inconclusive {
            reason: String::new(),
        },
    };
    let (h, base) = match theta.height_and_pure_base() {
        Ok(x) => x,
        Err(e @ (SubstitutionError::HeightUnstable { .. } | SubstitutionError::PureBaseInvalid(_))) => {
            report.verdict = Verdict::Inconclusive { reason: e.to_string() };
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.height = Some(h);
    report.coincidence = base.coincidence_witness();
    let graph = build_gtheta(&base);
    let census = two_cycles_share_vertex(&graph);
    report.verdict = match (&report.coincidence, census.shared_vertex) {
        (None, _) => Verdict::NotAlmostAutomorphic,
        (Some(_), Some(v)) => Verdict::NonTame {
            shared_vertex: graph.vertices[v],
        },
        (Some(_), None) => Verdict::Tame,
    };
    report.pure_base = Some(base);
    report.graph = Some(graph);
    report.census = Some(census);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::parse;

    fn set(t: &Substitution, s: &str) -> LetterSet {
        let letters: Vec<Letter> = s.chars().map(|c| t.letter(&c.to_string()).unwrap()).collect();
        LetterSet::from_letters(&letters)
    }

    fn named_edges(t: &Substitution, g: &SubsetGraph) -> Vec<(String, String, usize)> {
        g.edge_sets()
            .into_iter()
            .map(|(s, d, l)| (t.set_name(s), t.set_name(d), l))
            .collect()
    }

    fn e(s: &str, d: &str, l: usize) -> (String, String, usize) {
        (s.into(), d.into(), l)
    }

    #[test]
    fn figure_one_graphs() {
        let t = parse("a -> aaca\nb -> abba\nc -> aaba").unwrap();
        let g = build_gtheta(&t);
        let names: Vec<String> = g.vertices.iter().map(|&v| t.set_name(v)).collect();
        assert_eq!(names, ["abc", "ab", "bc"]);
        assert_eq!(
            named_edges(&t, &g),
            vec![e("ab", "abc", 1), e("bc", "abc", 2), e("ab", "ab", 1), e("bc", "ab", 2), e("ab", "bc", 1)]
        );
        let c = two_cycles_share_vertex(&g);
        assert_eq!(c.shared_vertex.map(|v| g.vertices[v]), Some(set(&t, "ab")));
        assert_eq!(g.extendable, vec![false, true, true]);

        let t = parse("a -> aaca\nb -> abba\nc -> acba").unwrap();
        let g = build_gtheta(&t);
        let names: Vec<String> = g.vertices.iter().map(|&v| t.set_name(v)).collect();
        assert_eq!(names, ["abc", "bc"]);
        let mut edges = named_edges(&t, &g);
        edges.sort();
        assert_eq!(edges, vec![e("abc", "abc", 1), e("bc", "abc", 2), e("bc", "bc", 1)]);
        assert_eq!(two_cycles_share_vertex(&g).shared_vertex, None);
        assert_eq!(cycle_count_upper_bound(&g).unwrap(), 2);
    }

    #[test]
    fn small_graphs() {
        let t = parse("a -> ab\nb -> aa").unwrap();
        let g = build_gtheta(&t);
        assert_eq!(g.vertices, vec![LetterSet::full(2)]);
        assert_eq!(named_edges(&t, &g), vec![e("ab", "ab", 1)]);
        let t = parse("a -> aabaa\nb -> abbaa").unwrap();
        assert_eq!(cycle_count_upper_bound(&build_gtheta(&t)).unwrap(), 1);
        let t = parse("a -> aaaba\nb -> abbaa").unwrap();
        assert!(cycle_count_upper_bound(&build_gtheta(&t)).is_err());
    }

    #[test]
    fn verdicts() {
        let v = |s: &str| tameness_verdict(&parse(s).unwrap()).unwrap().verdict.label();
        assert_eq!(v("a -> aaca\nb -> abba\nc -> aaba"), "non-tame");
        assert_eq!(v("a -> aaca\nb -> abba\nc -> acba"), "tame");
        assert_eq!(v("a -> aabaa\nb -> abbaa"), "tame");
        assert_eq!(v("a -> aaaba\nb -> abbaa"), "non-tame");
        assert_eq!(v("a -> ab\nb -> ba"), "not-almost-automorphic");
        assert_eq!(v("a -> ab\nb -> aa"), "tame");
        let err = tameness_verdict(&parse("a -> ab\nb -> ab").unwrap()).unwrap_err();
        assert_eq!(err.code(), "substitution.periodic");
        let err = tameness_verdict(&parse("a -> aa\nb -> bb").unwrap()).unwrap_err();
        assert_eq!(err.code(), "substitution.not_primitive");
    }

    #[test]
    fn discontinuities() {
        let t = parse("a -> aaca\nb -> abba\nc -> aaba").unwrap();
        let s = Scale::constant(4);
        for depth in 1..8 {
            let h = OdometerHead::from_u64(s.clone(), &vec![1; depth]).unwrap();
            assert!(discontinuity_membership(&h, &t).unwrap());
        }
        let h = OdometerHead::from_u64(s.clone(), &[0, 1]).unwrap();
        assert!(!discontinuity_membership(&h, &t).unwrap());
        let t3 = parse("a -> aaca\nb -> abba\nc -> acba").unwrap();
        let h = OdometerHead::from_u64(s, &[2, 2]).unwrap();
        assert!(!discontinuity_membership(&h, &t3).unwrap());
    }

    #[test]
    fn fibre_windows() {
        let t = parse("a -> aaca\nb -> abba\nc -> aaba").unwrap();
        let s = Scale::constant(4);
        let h = OdometerHead::from_u64(s.clone(), &[1]).unwrap();
        let w = fiber_window(&h, &t).unwrap();
        let b = t.letter("b").unwrap();
        assert_eq!(w.offset, BigInt::from(-1));
        assert_eq!(t.render(&w.words[b as usize].1), "abba");
        assert_eq!(w.letter_at(b, &BigInt::from(0)), Some(b));
        assert_eq!(canonical_semicocycle_eval(&h, &t).unwrap(), None);

        let h = OdometerHead::zero(s.clone(), 0);
        let w = fiber_window(&h, &t).unwrap();
        assert!(w.words.iter().all(|(v, word)| word == &vec![*v]));

        let h = OdometerHead::from_u64(s.clone(), &[0]).unwrap();
        let w = fiber_window(&h, &t).unwrap();
        let zero = BigInt::from(0);
        assert!(w.words.iter().all(|(v, _)| w.letter_at(*v, &zero) == Some(0)));
        assert_eq!(canonical_semicocycle_eval(&h, &t).unwrap(), Some(0));

        let h = OdometerHead::from_u64(s, &[1, 2]).unwrap();
        let w = fiber_window(&h, &t).unwrap();
        let letters: Vec<Letter> = (0..3).map(|v| w.letter_at(v, &zero).unwrap()).collect();
        let agree = letters.iter().all(|&x| x == letters[0]);
        let f = canonical_semicocycle_eval(&h, &t).unwrap();
        assert_eq!(f, if agree { Some(letters[0]) } else { None });
    }

    #[test]
    fn dot_export() {
        let t = parse("a -> aaca\nb -> abba\nc -> acba").unwrap();
        let dot = build_gtheta(&t).to_dot(&t);
        assert_eq!(dot.matches("->").count(), 3);
        assert!(dot.contains("\"bc\" -> \"abc\" [label=\"2\"]"));
    }
}
