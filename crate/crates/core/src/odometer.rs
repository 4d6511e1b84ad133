//! Exact digit arithmetic in odometer groups `Z_(l_n)`.
//!
//! A point of the odometer is a sequence of digits `z_1, z_2, ...` with
//! `0 <= z_n < l_n`. Only finite heads are ever stored. Digit `n` of a sum
//! depends on digits `<= n` alone, so every operation on a head of depth `m`
//! is exact up to depth `m`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OdometerError {
    #[error("level modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("explicit scale tail must be constant or powers")]
    NestedExplicit,
    #[error("digit {digit} at level {level} is not below the modulus {modulus}")]
    DigitOutOfRange {
        level: usize,
        digit: BigUint,
        modulus: BigUint,
    },
    #[error("tail digit {0} exceeds some level modulus")]
    TailOutOfRange(BigUint),
    #[error("heads live on different scales")]
    ScaleMismatch,
}

impl OdometerError {
    pub fn kind(&self) -> &'static str {
        match self {
            OdometerError::BadModulus(_) => "bad_modulus",
            OdometerError::NestedExplicit => "nested_explicit",
            OdometerError::DigitOutOfRange { .. } => "digit_out_of_range",
            OdometerError::TailOutOfRange(_) => "tail_out_of_range",
            OdometerError::ScaleMismatch => "scale_mismatch",
        }
    }
}

/// The sequence of level moduli `l_1, l_2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scale {
    Constant { l: u64 },
    /// `l_n = b^n`.
    Powers { b: u64 },
    /// Levels `1..=prefix.len()` read off `prefix`, later levels from `tail`
    /// evaluated at the absolute level.
    Explicit { prefix: Vec<u64>, tail: Box<Scale> },
}

impl Scale {
    pub fn constant(l: u64) -> Scale {
        Scale::Constant { l }
    }

    pub fn powers(b: u64) -> Scale {
        Scale::Powers { b }
    }

    pub fn explicit(prefix: Vec<u64>, tail: Scale) -> Result<Scale, OdometerError> {
        let s = Scale::Explicit {
            prefix,
            tail: Box::new(tail),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), OdometerError> {
        match self {
            Scale::Constant { l } | Scale::Powers { b: l } => {
                if *l < 2 {
                    return Err(OdometerError::BadModulus(*l));
                }
                Ok(())
            }
            Scale::Explicit { prefix, tail } => {
                if let Some(&bad) = prefix.iter().find(|&&p| p < 2) {
                    return Err(OdometerError::BadModulus(bad));
                }
                match **tail {
                    Scale::Explicit { .. } => Err(OdometerError::NestedExplicit),
                    _ => tail.validate(),
                }
            }
        }
    }

    /// Modulus `l_n` of level `n >= 1`.
    pub fn modulus(&self, n: usize) -> BigUint {
        assert!(n >= 1, "levels start at 1");
        match self {
            Scale::Constant { l } => BigUint::from(*l),
            Scale::Powers { b } => BigUint::from(*b).pow(n as u32),
            Scale::Explicit { prefix, tail } => match prefix.get(n - 1) {
                Some(&p) => BigUint::from(p),
                None => tail.modulus(n),
            },
        }
    }

    /// Moduli of levels `1..=depth`.
    pub fn moduli(&self, depth: usize) -> Vec<BigUint> {
        match self {
            Scale::Powers { b } => {
                let b = BigUint::from(*b);
                let mut out = Vec::with_capacity(depth);
                let mut cur = BigUint::one();
                for _ in 0..depth {
                    cur *= &b;
                    out.push(cur.clone());
                }
                out
            }
            _ => (1..=depth).map(|n| self.modulus(n)).collect(),
        }
    }

    /// `l^(k) = l_1 * ... * l_k` for `k = 0..=depth`.
    pub fn cumulative(&self, depth: usize) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(depth + 1);
        let mut acc = BigUint::one();
        out.push(acc.clone());
        for m in self.moduli(depth) {
            acc *= m;
            out.push(acc.clone());
        }
        out
    }

    /// Small constant modulus, when the scale is `Constant`.
    pub fn constant_modulus(&self) -> Option<u64> {
        match self {
            Scale::Constant { l } => Some(*l),
            _ => None,
        }
    }
}

/// Digits `z_1..z_m` of an odometer point, least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OdometerHead {
    scale: Scale,
    digits: Vec<BigUint>,
}

impl OdometerHead {
    pub fn new(scale: Scale, digits: Vec<BigUint>) -> Result<Self, OdometerError> {
        scale.validate()?;
        for (i, (d, m)) in digits.iter().zip(scale.moduli(digits.len())).enumerate() {
            if *d >= m {
                return Err(OdometerError::DigitOutOfRange {
                    level: i + 1,
                    digit: d.clone(),
                    modulus: m,
                });
            }
        }
        Ok(OdometerHead { scale, digits })
    }

    pub fn from_u64(scale: Scale, digits: &[u64]) -> Result<Self, OdometerError> {
        Self::new(scale, digits.iter().map(|&d| BigUint::from(d)).collect())
    }

    /// Caller guarantees the digit bounds.
    pub(crate) fn new_unchecked(scale: Scale, digits: Vec<BigUint>) -> Self {
        OdometerHead { scale, digits }
    }

    pub fn zero(scale: Scale, depth: usize) -> Self {
        OdometerHead {
            scale,
            digits: vec![BigUint::zero(); depth],
        }
    }

    /// Head of the canonical image of the integer `t`.
    pub fn from_integer(t: &BigInt, scale: Scale, depth: usize) -> Self {
        Self::zero(scale, depth).add_integer(t)
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    /// Digit `z_n`, `n >= 1`.
    pub fn digit(&self, n: usize) -> &BigUint {
        &self.digits[n - 1]
    }

    pub fn digits_u64(&self) -> Option<Vec<u64>> {
        self.digits.iter().map(|d| d.to_u64()).collect()
    }

    pub fn truncate(&self, depth: usize) -> OdometerHead {
        let depth = depth.min(self.depth());
        OdometerHead {
            scale: self.scale.clone(),
            digits: self.digits[..depth].to_vec(),
        }
    }

    pub fn add_integer(&self, t: &BigInt) -> OdometerHead {
        let mut carry = t.clone();
        let mut digits = Vec::with_capacity(self.depth());
        for (d, m) in self.digits.iter().zip(self.scale.moduli(self.depth())) {
            if carry.is_zero() {
                digits.push(d.clone());
                continue;
            }
            let m = BigInt::from(m);
            let v = BigInt::from(d.clone()) + &carry;
            let (q, r) = v.div_mod_floor(&m);
            digits.push(r.to_biguint().expect("floor remainder is non-negative"));
            carry = q;
        }
        OdometerHead {
            scale: self.scale.clone(),
            digits,
        }
    }

    pub fn add_i64(&self, t: i64) -> OdometerHead {
        self.add_integer(&BigInt::from(t))
    }

    /// Digitwise sum with carry, truncated to the smaller depth.
    pub fn add(&self, other: &OdometerHead) -> Result<OdometerHead, OdometerError> {
        if self.scale != other.scale {
            return Err(OdometerError::ScaleMismatch);
        }
        let depth = self.depth().min(other.depth());
        let mut carry = false;
        let mut digits = Vec::with_capacity(depth);
        for ((a, b), m) in self.digits.iter().zip(&other.digits).zip(self.scale.moduli(depth)) {
            let mut v = a + b;
            if carry {
                v += 1u32;
            }
            carry = v >= m;
            if carry {
                v -= m;
            }
            digits.push(v);
        }
        Ok(OdometerHead {
            scale: self.scale.clone(),
            digits,
        })
    }

    pub fn neg(&self) -> OdometerHead {
        let mut borrow = false;
        let mut digits = Vec::with_capacity(self.depth());
        for (d, m) in self.digits.iter().zip(self.scale.moduli(self.depth())) {
            let sub = if borrow { d + 1u32 } else { d.clone() };
            if sub.is_zero() {
                digits.push(BigUint::zero());
                borrow = false;
            } else {
                digits.push(m - sub);
                borrow = true;
            }
        }
        OdometerHead {
            scale: self.scale.clone(),
            digits,
        }
    }

    pub fn sub(&self, other: &OdometerHead) -> Result<OdometerHead, OdometerError> {
        self.add(&other.neg())
    }

    /// Number of leading agreeing digits, and whether agreement reached the
    /// common depth.
    pub fn common_head_length(&self, other: &OdometerHead) -> Result<HeadAgreement, OdometerError> {
        if self.scale != other.scale {
            return Err(OdometerError::ScaleMismatch);
        }
        let depth = self.depth().min(other.depth());
        let length = self
            .digits
            .iter()
            .zip(&other.digits)
            .take_while(|(a, b)| a == b)
            .count();
        Ok(HeadAgreement {
            length,
            saturated: length == depth,
        })
    }

    /// `z^(m) = sum z_k l^(k-1)`, the residue of the point modulo `l^(m)`.
    pub fn index(&self) -> BigUint {
        let mut acc = BigUint::zero();
        let mut weight = BigUint::one();
        for (d, m) in self.digits.iter().zip(self.scale.moduli(self.depth())) {
            acc += d * &weight;
            weight *= m;
        }
        acc
    }

    /// Rebuilds a head from its residue modulo `l^(depth)`.
    pub fn from_index(index: &BigUint, scale: Scale, depth: usize) -> OdometerHead {
        let mut rest = index.clone();
        let mut digits = Vec::with_capacity(depth);
        for m in scale.moduli(depth) {
            let (q, r) = rest.div_rem(&m);
            digits.push(r);
            rest = q;
        }
        OdometerHead { scale, digits }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HeadAgreement {
    pub length: usize,
    pub saturated: bool,
}

/// Eventually constant odometer point: a finite head followed by a digit
/// repeated at every deeper level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OdometerPoint {
    head: OdometerHead,
    tail_digit: BigUint,
}

impl OdometerPoint {
    pub fn new(head: OdometerHead, tail_digit: BigUint) -> Result<Self, OdometerError> {
        let depth = head.depth();
        let ok = match head.scale() {
            Scale::Constant { l } => tail_digit < BigUint::from(*l),
            // b^n grows, so the first level past the head is the binding one
            Scale::Powers { .. } => tail_digit < head.scale().modulus(depth + 1),
            Scale::Explicit { prefix, tail } => {
                let beyond = (depth + 1..=prefix.len()).all(|n| tail_digit < BigUint::from(prefix[n - 1]));
                let first_tail = depth.max(prefix.len()) + 1;
                beyond && tail_digit < tail.modulus(first_tail)
            }
        };
        if !ok {
            return Err(OdometerError::TailOutOfRange(tail_digit));
        }
        Ok(OdometerPoint { head, tail_digit })
    }

    pub fn scale(&self) -> &Scale {
        self.head.scale()
    }

    pub fn explicit_head(&self) -> &OdometerHead {
        &self.head
    }

    pub fn tail_digit(&self) -> &BigUint {
        &self.tail_digit
    }

    /// `head_depth` of the point.
    pub fn head(&self, depth: usize) -> OdometerHead {
        let mut digits: Vec<BigUint> = self.head.digits().iter().take(depth).cloned().collect();
        while digits.len() < depth {
            digits.push(self.tail_digit.clone());
        }
        OdometerHead::new_unchecked(self.head.scale().clone(), digits)
    }
}

pub fn big(t: i64) -> BigInt {
    BigInt::from(t)
}
