use std::collections::BTreeSet;

use serde::Serialize;

use super::SemicocycleError;

/// A right-extendable binary language with both letters as factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "words")]
pub enum LanguageHandle {
    FullShift,
    /// Factors of the Fibonacci word.
    Sturmian,
    /// Prefixes of the given words.
    UserWordList(Vec<String>),
}

impl LanguageHandle {
    pub fn user(words: Vec<String>) -> Result<Self, SemicocycleError> {
        if words.is_empty() {
            return Err(SemicocycleError::BadLanguage("no words".into()));
        }
        if let Some(w) = words.iter().find(|w| w.is_empty() || w.chars().any(|c| c != 'a' && c != 'b')) {
            return Err(SemicocycleError::BadLanguage(format!("{w:?} is not a nonempty word over a, b")));
        }
        let firsts: BTreeSet<char> = words.iter().filter_map(|w| w.chars().next()).collect();
        if firsts.len() != 2 {
            return Err(SemicocycleError::BadLanguage("both letters must occur as first letters".into()));
        }
        Ok(LanguageHandle::UserWordList(words))
    }

    pub fn parse(name: &str) -> Result<Self, SemicocycleError> {
        match name {
            "full" | "full-shift" => Ok(LanguageHandle::FullShift),
            "sturmian" | "fibonacci" => Ok(LanguageHandle::Sturmian),
            other => Self::user(other.split(',').map(|w| w.trim().to_string()).collect()),
        }
    }

    /// Longest length for which `words` is defined.
    pub fn max_len(&self) -> Option<usize> {
        match self {
            LanguageHandle::UserWordList(ws) => ws.iter().map(|w| w.len()).min(),
            _ => None,
        }
    }

    pub fn words(&self, n: usize) -> Result<BTreeSet<String>, SemicocycleError> {
        match self {
            LanguageHandle::FullShift => {
                if n > 24 {
                    return Err(SemicocycleError::LanguageDepth(24));
                }
                Ok((0..1u64 << n)
                    .map(|x| (0..n).map(|k| if x >> (n - 1 - k) & 1 == 0 { 'a' } else { 'b' }).collect())
                    .collect())
            }
            LanguageHandle::Sturmian => {
                let w = fibonacci_prefix(16 * n + 64);
                let set: BTreeSet<String> = (0..=w.len() - n).map(|k| w[k..k + n].to_string()).collect();
                debug_assert_eq!(set.len(), n + 1);
                Ok(set)
            }
            LanguageHandle::UserWordList(ws) => {
                let max = self.max_len().unwrap_or(0);
                if n > max {
                    return Err(SemicocycleError::LanguageDepth(max));
                }
                Ok(ws.iter().map(|w| w[..n].to_string()).collect())
            }
        }
    }

    pub fn contains(&self, w: &str) -> Result<bool, SemicocycleError> {
        Ok(self.words(w.len())?.contains(w))
    }

    pub fn right_extensions(&self, w: &str) -> Result<Vec<char>, SemicocycleError> {
        let next = self.words(w.len() + 1)?;
        Ok(['a', 'b']
            .into_iter()
            .filter(|c| next.contains(&format!("{w}{c}")))
            .collect())
    }

    pub fn is_right_special(&self, w: &str) -> Result<bool, SemicocycleError> {
        Ok(self.right_extensions(w)?.len() == 2)
    }
}

/// Prefix of the fixed point of `a -> ab, b -> a`.
fn fibonacci_prefix(len: usize) -> String {
    let mut w = String::from("a");
    while w.len() < len {
        w = w.chars().map(|c| if c == 'a' { "ab" } else { "a" }).collect();
    }
    w.truncate(len);
    w
}
