//! Constant-length substitutions: parsing, primitivity, aperiodicity,
//! height and pure base, coincidences, fixed points and languages.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gtheta::{CycleCensus, LetterSet, SubsetGraph};

/// Letters are indices into the alphabet.
pub type Letter = u8;
pub type Word = Vec<Letter>;

pub const MAX_ALPHABET: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstitutionError {
    #[error("line {line}: cannot parse rule {text:?}")]
    Parse { line: usize, text: String },
    #[error("invalid JSON substitution: {0}")]
    Json(String),
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("rule for {0:?} given twice")]
    DuplicateRule(String),
    #[error("letter {letter:?} in the image of {rule:?} is not in the alphabet")]
    BadLetter { rule: String, letter: String },
    #[error("unequal lengths: {rule:?} has length {found}, expected {expected}")]
    UnequalLengths {
        rule: String,
        expected: usize,
        found: usize,
    },
    #[error("substitution length must be at least 2, got {0}")]
    TooShort(usize),
    #[error("alphabet has {0} letters, at most 64 are supported")]
    AlphabetTooLarge(usize),
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("substitution is periodic: p({n}) = {count}")]
    Periodic { n: usize, count: usize },
    #[error("height gcd did not stabilise ({short} vs {long})")]
    HeightUnstable { short: u64, long: u64 },
    #[error("pure base construction failed: {0}")]
    PureBaseInvalid(String),
    #[error("no admissible two-sided fixed point seed")]
    NoAdmissibleSeed,
}

impl SubstitutionError {
    pub fn kind(&self) -> &'static str {
        match self {
            SubstitutionError::Parse { .. } => "parse",
            SubstitutionError::Json(_) => "json",
            SubstitutionError::EmptyAlphabet => "empty_alphabet",
            SubstitutionError::DuplicateRule(_) => "duplicate_rule",
            SubstitutionError::BadLetter { .. } => "bad_letter",
            SubstitutionError::UnequalLengths { .. } => "unequal_lengths",
            SubstitutionError::TooShort(_) => "too_short",
            SubstitutionError::AlphabetTooLarge(_) => "alphabet_too_large",
            SubstitutionError::NotPrimitive => "not_primitive",
            SubstitutionError::Periodic { .. } => "periodic",
            SubstitutionError::HeightUnstable { .. } => "height_unstable",
            SubstitutionError::PureBaseInvalid(_) => "pure_base_invalid",
            SubstitutionError::NoAdmissibleSeed => "no_admissible_seed",
        }
    }
}

/// Rules as read from input, before validation. Images are split into
/// single-character letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
pub struct RawSubstitution {
    pub rules: BTreeMap<String, String>,
}

impl RawSubstitution {
    /// Accepts either `a -> aaca` lines or `{"rules": {...}}`.
    pub fn parse(text: &str) -> Result<RawSubstitution, SubstitutionError> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| SubstitutionError::Json(e.to_string()));
        }
        let mut rules = BTreeMap::new();
        let items = text.lines().enumerate().flat_map(|(i, line)| {
            line.split(';').map(move |part| (i + 1, part))
        });
        for (line, part) in items {
            let part = part.split('#').next().unwrap_or("").trim();
            if part.is_empty() {
                continue;
            }
            let (lhs, rhs) = part
                .split_once("->")
                .ok_or_else(|| SubstitutionError::Parse {
                    line,
                    text: part.to_string(),
                })?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if lhs.is_empty() || lhs.chars().any(char::is_whitespace) || rhs.chars().any(char::is_whitespace) {
                return Err(SubstitutionError::Parse {
                    line,
                    text: part.to_string(),
                });
            }
            if rules.insert(lhs.to_string(), rhs.to_string()).is_some() {
                return Err(SubstitutionError::DuplicateRule(lhs.to_string()));
            }
        }
        Ok(RawSubstitution { rules })
    }
}

pub fn validate(raw: &RawSubstitution) -> Result<Substitution, SubstitutionError> {
    let alphabet: Vec<String> = raw.rules.keys().cloned().collect();
    let index: HashMap<&str, Letter> = alphabet
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i as Letter))
        .collect();
    if alphabet.len() > MAX_ALPHABET {
        return Err(SubstitutionError::AlphabetTooLarge(alphabet.len()));
    }
    let mut rules = Vec::with_capacity(alphabet.len());
    for (name, image) in &raw.rules {
        let mut word = Vec::new();
        for c in image.chars() {
            let mut buf = [0u8; 4];
            let s: &str = c.encode_utf8(&mut buf);
            match index.get(s) {
                Some(&l) => word.push(l),
                None => {
                    return Err(SubstitutionError::BadLetter {
                        rule: name.clone(),
                        letter: s.to_string(),
                    })
                }
            }
        }
        rules.push(word);
    }
    Substitution::new(alphabet, rules)
}

pub fn parse(text: &str) -> Result<Substitution, SubstitutionError> {
    validate(&RawSubstitution::parse(text)?)
}

/// A substitution `theta: A -> A^l` of constant length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    alphabet: Vec<String>,
    rules: Vec<Word>,
}

/// Column `theta_i`: the letter map `a -> theta(a)_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColumnMap {
    pub index: usize,
    pub map: Vec<Letter>,
}

impl ColumnMap {
    pub fn apply(&self, a: Letter) -> Letter {
        self.map[a as usize]
    }

    pub fn image(&self, s: LetterSet) -> LetterSet {
        s.image(&self.map)
    }
}

impl Substitution {
    pub fn new(alphabet: Vec<String>, rules: Vec<Word>) -> Result<Self, SubstitutionError> {
        if alphabet.is_empty() {
            return Err(SubstitutionError::EmptyAlphabet);
        }
        if alphabet.len() > MAX_ALPHABET {
            return Err(SubstitutionError::AlphabetTooLarge(alphabet.len()));
        }
        let distinct: BTreeSet<&String> = alphabet.iter().collect();
        if distinct.len() != alphabet.len() {
            let dup = alphabet
                .iter()
                .find(|a| alphabet.iter().filter(|b| b == a).count() > 1)
                .cloned()
                .unwrap_or_default();
            return Err(SubstitutionError::DuplicateRule(dup));
        }
        assert_eq!(alphabet.len(), rules.len(), "one rule per letter");
        let expected = rules[0].len();
        for (name, w) in alphabet.iter().zip(&rules) {
            if w.len() != expected {
                return Err(SubstitutionError::UnequalLengths {
                    rule: name.clone(),
                    expected,
                    found: w.len(),
                });
            }
            if let Some(&bad) = w.iter().find(|&&l| l as usize >= alphabet.len()) {
                return Err(SubstitutionError::BadLetter {
                    rule: name.clone(),
                    letter: bad.to_string(),
                });
            }
        }
        if expected < 2 {
            return Err(SubstitutionError::TooShort(expected));
        }
        Ok(Substitution { alphabet, rules })
    }

    /// Builds a substitution on `0..n` from its column maps.
    pub fn from_columns(alphabet: Vec<String>, columns: &[Vec<Letter>]) -> Result<Self, SubstitutionError> {
        let n = alphabet.len();
        let rules = (0..n)
            .map(|a| columns.iter().map(|c| c[a]).collect())
            .collect();
        Substitution::new(alphabet, rules)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn length(&self) -> usize {
        self.rules[0].len()
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.alphabet[a as usize]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.alphabet.iter().position(|a| a == name).map(|i| i as Letter)
    }

    pub fn rule(&self, a: Letter) -> &[Letter] {
        &self.rules[a as usize]
    }

    pub fn rules(&self) -> &[Word] {
        &self.rules
    }

    pub fn full_set(&self) -> LetterSet {
        LetterSet::full(self.size())
    }

    pub fn column(&self, i: usize) -> ColumnMap {
        ColumnMap {
            index: i,
            map: self.rules.iter().map(|w| w[i]).collect(),
        }
    }

    pub fn columns(&self) -> Vec<ColumnMap> {
        (0..self.length()).map(|i| self.column(i)).collect()
    }

    pub fn apply(&self, word: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(word.len() * self.length());
        for &a in word {
            out.extend_from_slice(self.rule(a));
        }
        out
    }

    pub fn iterate(&self, word: &[Letter], k: usize) -> Word {
        let mut w = word.to_vec();
        for _ in 0..k {
            w = self.apply(&w);
        }
        w
    }

    /// `theta^k` as a substitution of length `l^k`.
    pub fn power(&self, k: usize) -> Substitution {
        assert!(k >= 1);
        let rules = (0..self.size())
            .map(|a| self.iterate(&[a as Letter], k))
            .collect();
        Substitution {
            alphabet: self.alphabet.clone(),
            rules,
        }
    }

    /// Renders a word by concatenating letter names.
    pub fn render(&self, word: &[Letter]) -> String {
        word.iter().map(|&a| self.name(a)).collect()
    }

    /// Renders a word, separating letters when some name is longer than one
    /// character.
    pub fn render_list(&self, word: &[Letter]) -> Vec<String> {
        word.iter().map(|&a| self.name(a).to_string()).collect()
    }

    pub fn render_set(&self, s: LetterSet) -> Vec<String> {
        s.iter().map(|a| self.name(a).to_string()).collect()
    }

    /// Name of a subset: concatenated letter names.
    /// Letter names run together, or comma separated when some name is
    /// longer than one character.
    pub fn set_name(&self, s: LetterSet) -> String {
        let sep = if self.alphabet.iter().any(|a| a.chars().count() > 1) { "," } else { "" };
        s.iter().map(|a| self.name(a)).collect::<Vec<_>>().join(sep)
    }

    fn incidence(&self) -> Vec<Vec<bool>> {
        let n = self.size();
        let mut m = vec![vec![false; n]; n];
        for (a, w) in self.rules.iter().enumerate() {
            for &b in w {
                m[a][b as usize] = true;
            }
        }
        m
    }

    /// Some power of the incidence matrix is positive, checked up to the
    /// Wielandt exponent `(n-1)^2 + 1`.
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
        let m = self.incidence();
        let mut p = m.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for _ in 0..bound {
            if p.iter().all(|row| row.iter().all(|&x| x)) {
                return true;
            }
            p = bool_product(&p, &m);
        }
        false
    }

    /// The allowed two-letter words: the closure of the two-letter factors
    /// of the images of letters under taking two-letter factors of images.
    pub fn allowed_pairs(&self) -> BTreeSet<(Letter, Letter)> {
        let mut set = BTreeSet::new();
        let mut queue = VecDeque::new();
        let push = |set: &mut BTreeSet<(Letter, Letter)>, q: &mut VecDeque<(Letter, Letter)>, w: &[Letter]| {
            for p in w.windows(2) {
                if set.insert((p[0], p[1])) {
                    q.push_back((p[0], p[1]));
                }
            }
        };
        for a in 0..self.size() {
            push(&mut set, &mut queue, self.rule(a as Letter));
        }
        while let Some((x, y)) = queue.pop_front() {
            let w = self.apply(&[x, y]);
            push(&mut set, &mut queue, &w);
        }
        set
    }

    /// Words `theta^K(w)` for allowed pairs `w`, with `l^K >= n - 1`. Every
    /// allowed word of length `<= n` of a primitive substitution occurs in
    /// one of them.
    fn language_texts(&self, n: usize) -> Vec<Word> {
        let l = self.length();
        let mut k = 1;
        let mut reach = l;
        while reach + 1 < n {
            k += 1;
            reach *= l;
        }
        self.allowed_pairs()
            .into_iter()
            .map(|(x, y)| self.iterate(&[x, y], k))
            .collect()
    }

    /// All allowed words of length `n`.
    pub fn language(&self, n: usize) -> BTreeSet<Word> {
        if n == 0 {
            return BTreeSet::from([Vec::new()]);
        }
        let mut out = BTreeSet::new();
        for t in self.language_texts(n) {
            for w in t.windows(n) {
                out.insert(w.to_vec());
            }
        }
        out
    }

    /// Factor complexity `p(1..=max_n)`; index 0 holds `p(0) = 1`.
    pub fn complexity(&self, max_n: usize) -> Vec<usize> {
        let texts = self.language_texts(max_n.max(1));
        let mut out = vec![1];
        for n in 1..=max_n {
            let mut set: HashSet<&[Letter]> = HashSet::new();
            for t in &texts {
                set.extend(t.windows(n));
            }
            out.push(set.len());
        }
        out
    }

    /// Morse–Hedlund test with bound `n* = 2 l |A|^2`.
    pub fn is_aperiodic(&self) -> AperiodicityCheck {
        let bound = 2 * self.length() * self.size() * self.size();
        let texts = self.language_texts(bound);
        for n in 1..=bound {
            let mut set: HashSet<&[Letter]> = HashSet::new();
            for t in &texts {
                set.extend(t.windows(n));
            }
            let count = set.len();
            if count <= n {
                return AperiodicityCheck {
                    aperiodic: false,
                    bound,
                    checked_up_to: n,
                    witness: Some((n, count)),
                };
            }
            // p is non-decreasing, so p(m) > bound >= m for every later m
            if count > bound {
                return AperiodicityCheck {
                    aperiodic: true,
                    bound,
                    checked_up_to: n,
                    witness: None,
                };
            }
        }
        AperiodicityCheck {
            aperiodic: true,
            bound,
            checked_up_to: bound,
            witness: None,
        }
    }

    fn first_map(&self) -> Vec<Letter> {
        self.rules.iter().map(|w| w[0]).collect()
    }

    fn last_map(&self) -> Vec<Letter> {
        self.rules.iter().map(|w| *w.last().unwrap()).collect()
    }

    /// Prefix of length `len` of `theta^steps(a)`.
    pub fn power_prefix(&self, a: Letter, steps: usize, len: usize) -> Word {
        if steps == 0 {
            return vec![a; len.min(1)];
        }
        let l = self.length();
        let inner = self.power_prefix(a, steps - 1, len.div_ceil(l));
        let mut w = self.apply(&inner);
        w.truncate(len);
        w
    }

    /// Suffix of length `len` of `theta^steps(a)`.
    pub fn power_suffix(&self, a: Letter, steps: usize, len: usize) -> Word {
        if steps == 0 {
            return vec![a; len.min(1)];
        }
        let l = self.length();
        let inner = self.power_suffix(a, steps - 1, len.div_ceil(l));
        let w = self.apply(&inner);
        w[w.len() - len.min(w.len())..].to_vec()
    }

    /// Smallest `q` and seed `p.s` with `ps` allowed, `p` the last letter of
    /// `theta^q(p)` and `s` the first letter of `theta^q(s)`.
    pub fn fixed_point_seed(&self) -> Result<FixedPointSeed, SubstitutionError> {
        let first = self.first_map();
        let last = self.last_map();
        let pairs = self.allowed_pairs();
        let n = self.size();
        // the pair map permutes a subset of the allowed pairs, so some
        // period is at most their number
        let max_q = pairs.len().max(1);
        let mut state: Vec<((Letter, Letter), (Letter, Letter))> =
            pairs.iter().map(|&p| (p, p)).collect();
        for q in 1..=max_q.max(n) {
            for s in state.iter_mut() {
                s.1 = (last[s.1 .0 as usize], first[s.1 .1 as usize]);
            }
            if let Some(&(seed, _)) = state.iter().find(|(orig, cur)| orig == cur) {
                return Ok(FixedPointSeed {
                    power: q,
                    left: seed.0,
                    right: seed.1,
                });
            }
        }
        Err(SubstitutionError::NoAdmissibleSeed)
    }

    /// Window `W[-radius, radius)` of a two-sided fixed point of `theta^q`.
    pub fn fixed_point_window(&self, radius: usize) -> Result<TwoSidedWord, SubstitutionError> {
        let seed = self.fixed_point_seed()?;
        let l = self.length();
        let mut steps = 0;
        let mut reach = 1usize;
        while reach < radius {
            steps += seed.power;
            reach = reach.saturating_mul(l.pow(seed.power as u32));
        }
        let mut data = self.power_suffix(seed.left, steps, radius);
        data.extend(self.power_prefix(seed.right, steps, radius));
        if radius == 0 {
            data.clear();
        }
        Ok(TwoSidedWord { radius, seed, data })
    }

    /// Height and pure base, computed on a one-sided fixed point of some
    /// power of `theta`.
    pub fn height_and_pure_base(&self) -> Result<(u64, Substitution), SubstitutionError> {
        if !self.is_primitive() {
            return Err(SubstitutionError::NotPrimitive);
        }
        let h = self.height()?;
        if h == 1 {
            return Ok((1, self.clone()));
        }
        let base = self.pure_base(h)?;
        if base.length() != self.length() {
            return Err(SubstitutionError::PureBaseInvalid("length changed".into()));
        }
        if !base.is_primitive() {
            return Err(SubstitutionError::PureBaseInvalid("not primitive".into()));
        }
        let inner = base.height()?;
        if inner != 1 {
            return Err(SubstitutionError::PureBaseInvalid(format!("height {inner} after reduction")));
        }
        Ok((h, base))
    }

    /// Seed `s` with `s` the first letter of `theta^q(s)`, `q` minimal.
    fn one_sided_seed(&self) -> (usize, Letter) {
        let first = self.first_map();
        for q in 1..=self.size() {
            for s in 0..self.size() as Letter {
                let mut x = s;
                for _ in 0..q {
                    x = first[x as usize];
                }
                if x == s {
                    return (q, s);
                }
            }
        }
        unreachable!("a self map of a finite set has a periodic point")
    }

    fn fixed_prefix_exponent(&self) -> usize {
        let l = self.length();
        let mut e = 4;
        while l.pow(e as u32) < 64 {
            e += 1;
        }
        e
    }

    fn return_gcd(u: &[Letter]) -> u64 {
        u.iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &x)| x == u[0])
            .fold(0u64, |g, (n, _)| g.gcd(&(n as u64)))
    }

    fn height(&self) -> Result<u64, SubstitutionError> {
        let (q, s) = self.one_sided_seed();
        let l = self.length();
        let len = l.pow(self.fixed_prefix_exponent() as u32);
        let steps = |len: usize| {
            let mut k = q;
            while l.pow(k as u32) < len {
                k += q;
            }
            k
        };
        let short = self.power_prefix(s, steps(len), len);
        let long = self.power_prefix(s, steps(len * l), len * l);
        let (g1, g2) = (Self::return_gcd(&short), Self::return_gcd(&long));
        if g1 != g2 || g1 == 0 {
            return Err(SubstitutionError::HeightUnstable { short: g1, long: g2 });
        }
        let mut h = g1;
        loop {
            let d = h.gcd(&(l as u64));
            if d == 1 {
                break;
            }
            h /= d;
        }
        Ok(h)
    }

    fn pure_base(&self, h: u64) -> Result<Substitution, SubstitutionError> {
        let h = h as usize;
        let (q, s) = self.one_sided_seed();
        let l = self.length();
        let len = l.pow(self.fixed_prefix_exponent() as u32 + 1);
        let mut k = q;
        while l.pow(k as u32) < len {
            k += q;
        }
        let mut blocks: BTreeSet<Word> = BTreeSet::new();
        let mut u = self.power_prefix(s, k, len);
        for _ in 0..q {
            for c in u.chunks_exact(h) {
                blocks.insert(c.to_vec());
            }
            u = self.apply(&u);
            u.truncate(len);
        }
        if blocks.len() > MAX_ALPHABET {
            return Err(SubstitutionError::PureBaseInvalid(format!("{} blocks", blocks.len())));
        }
        let blocks: Vec<Word> = blocks.into_iter().collect();
        let index: HashMap<&Word, Letter> = blocks.iter().enumerate().map(|(i, b)| (b, i as Letter)).collect();
        let mut names: Vec<String> = blocks.iter().map(|b| self.render(b)).collect();
        if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
            names = blocks.iter().map(|b| self.render_list(b).join(".")).collect();
        }
        let mut rules = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let image = self.apply(b);
            let mut rule = Vec::with_capacity(l);
            for c in image.chunks_exact(h) {
                match index.get(&c.to_vec()) {
                    Some(&x) => rule.push(x),
                    None => {
                        return Err(SubstitutionError::PureBaseInvalid(format!(
                            "image block {} of {} is not a block",
                            self.render(c),
                            self.render(b)
                        )))
                    }
                }
            }
            rules.push(rule);
        }
        // names sorted the same way the blocks are, keep them paired with
        // their rules
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut rank = vec![0 as Letter; order.len()];
        for (r, &o) in order.iter().enumerate() {
            rank[o] = r as Letter;
        }
        let alphabet = order.iter().map(|&o| names[o].clone()).collect();
        let rules = order
            .iter()
            .map(|&o| rules[o].iter().map(|&x| rank[x as usize]).collect())
            .collect();
        Substitution::new(alphabet, rules)
    }

    /// Breadth-first search from the full alphabet under the column maps;
    /// returns the shortest index word `i_1..i_k` with
    /// `|theta_{i_1} ... theta_{i_k}(A)| = 1`.
    pub fn coincidence_witness(&self) -> Option<Vec<usize>> {
        let columns = self.columns();
        let start = self.full_set();
        if start.len() == 1 {
            return Some(Vec::new());
        }
        let mut parent: HashMap<LetterSet, (LetterSet, usize)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        let mut seen = HashSet::from([start]);
        while let Some(s) = queue.pop_front() {
            for c in &columns {
                let t = c.image(s);
                if !seen.insert(t) {
                    continue;
                }
                parent.insert(t, (s, c.index));
                if t.len() == 1 {
                    // path from A applies columns in order, so the index word
                    // is the reversed path
                    let mut path = Vec::new();
                    let mut cur = t;
                    while cur != start {
                        let (p, i) = parent[&cur];
                        path.push(i);
                        cur = p;
                    }
                    return Some(path);
                }
                queue.push_back(t);
            }
        }
        None
    }

    /// Coincidence of the pure base.
    pub fn has_coincidence(&self) -> Result<Option<Vec<usize>>, SubstitutionError> {
        let (_, base) = self.height_and_pure_base()?;
        Ok(base.coincidence_witness())
    }

    /// Every rule word starts with the same letter and ends with the same
    /// letter.
    pub fn has_proper_naive_order(&self) -> bool {
        let f = self.first_map();
        let l = self.last_map();
        f.iter().all(|&x| x == f[0]) && l.iter().all(|&x| x == l[0])
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, w)) in self.alphabet.iter().zip(&self.rules).enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{a} -> {}", self.render(w))?;
        }
        Ok(())
    }
}

fn bool_product(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    out[i][j] |= b[k][j];
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AperiodicityCheck {
    pub aperiodic: bool,
    /// The bound `n*` up to which complexity is inspected.
    pub bound: usize,
    pub checked_up_to: usize,
    /// `(n, p(n))` with `p(n) <= n` when periodic.
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointSeed {
    pub power: usize,
    pub left: Letter,
    pub right: Letter,
}

/// Finite window `W[-radius, radius)` of a two-sided sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSidedWord {
    pub radius: usize,
    pub seed: FixedPointSeed,
    data: Vec<Letter>,
}

impl TwoSidedWord {
    pub fn at(&self, i: i64) -> Letter {
        self.data[(i + self.radius as i64) as usize]
    }

    pub fn get(&self, i: i64) -> Option<Letter> {
        let j = i + self.radius as i64;
        if j < 0 {
            return None;
        }
        self.data.get(j as usize).copied()
    }

    pub fn slice(&self, from: i64, to: i64) -> &[Letter] {
        let r = self.radius as i64;
        &self.data[(from + r) as usize..(to + r) as usize]
    }

    pub fn as_slice(&self) -> &[Letter] {
        &self.data
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Tame,
    NonTame { shared_vertex: LetterSet },
    NotAlmostAutomorphic,
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Tame => "tame",
            Verdict::NonTame { .. } => "non-tame",
            Verdict::NotAlmostAutomorphic => "not-almost-automorphic",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub substitution: Substitution,
    pub primitive: bool,
    pub aperiodic: AperiodicityCheck,
    pub height: Option<u64>,
    pub pure_base: Option<Substitution>,
    pub coincidence: Option<Vec<usize>>,
    pub graph: Option<SubsetGraph>,
    pub census: Option<CycleCensus>,
    pub verdict: Verdict,
}
