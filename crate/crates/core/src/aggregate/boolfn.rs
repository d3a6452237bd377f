use std::fmt;

use crate::error::{Error, Result};

pub const MAX_FN_ARITY: usize = 6;

/// A k-ary Boolean function stored as a truth table. Bit `r` of `table` is
/// the value on the row whose binary expansion (first argument most
/// significant) is `r`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolFn {
    arity: u8,
    table: u64,
}

fn rows(k: usize) -> usize {
    1 << k
}

fn table_mask(k: usize) -> u64 {
    if rows(k) == 64 {
        u64::MAX
    } else {
        (1u64 << rows(k)) - 1
    }
}

impl BoolFn {
    pub fn from_table(arity: usize, table: u64) -> Result<Self> {
        if arity == 0 || arity > MAX_FN_ARITY {
            return Err(Error::CapExceeded {
                what: "function arity",
                requested: arity as u128,
                limit: MAX_FN_ARITY as u128,
            });
        }
        Ok(BoolFn {
            arity: arity as u8,
            table: table & table_mask(arity),
        })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        let mut table = 0u64;
        let mut args = vec![false; arity];
        for r in 0..rows(arity.min(MAX_FN_ARITY)) {
            for (i, a) in args.iter_mut().enumerate() {
                *a = r >> (arity - 1 - i) & 1 == 1;
            }
            if f(&args) {
                table |= 1 << r;
            }
        }
        Self::from_table(arity, table)
    }

    /// Parses `2^k` characters over `{0,1}`, row 0 first.
    pub fn from_bit_string(bits: &str) -> Result<Self> {
        let len = bits.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::ShapeMismatch(format!(
                "truth table length {len} is not 2^k for k ≥ 1"
            )));
        }
        let arity = len.trailing_zeros() as usize;
        let mut table = 0u64;
        for (r, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => table |= 1 << r,
                _ => {
                    return Err(Error::ShapeMismatch(format!(
                        "truth table character `{ch}` is not 0 or 1"
                    )))
                }
            }
        }
        Self::from_table(arity, table)
    }

    pub fn to_bit_string(&self) -> String {
        (0..rows(self.arity()))
            .map(|r| if self.value(r) { '1' } else { '0' })
            .collect()
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn table(&self) -> u64 {
        self.table
    }

    pub fn value(&self, row: usize) -> bool {
        self.table >> row & 1 == 1
    }

    pub fn eval(&self, args: &[bool]) -> bool {
        assert_eq!(args.len(), self.arity(), "argument count");
        self.value(args.iter().fold(0, |r, &b| (r << 1) | usize::from(b)))
    }

    pub fn and(k: usize) -> Self {
        Self::from_fn(k, |a| a.iter().all(|&b| b)).expect("arity in range")
    }

    pub fn or(k: usize) -> Self {
        Self::from_fn(k, |a| a.iter().any(|&b| b)).expect("arity in range")
    }

    /// `pr_d^k`, 1-based `d`.
    pub fn projection(d: usize, k: usize) -> Result<Self> {
        if d == 0 || d > k {
            return Err(Error::UnknownFunction {
                name: format!("pr{d}"),
                arity: k,
            });
        }
        Self::from_fn(k, |a| a[d - 1])
    }

    pub fn identity() -> Self {
        Self::from_table(1, 0b10).expect("unary")
    }

    pub fn maj() -> Self {
        Self::from_fn(3, |a| a.iter().filter(|&&b| b).count() >= 2).expect("ternary")
    }

    /// 1 iff exactly one or all three arguments are 1.
    pub fn xor3() -> Self {
        Self::parity(3)
    }

    pub fn parity(k: usize) -> Self {
        Self::from_fn(k, |a| a.iter().filter(|&&b| b).count() % 2 == 1).expect("arity in range")
    }

    /// `c0 ⊕ c1·x1 ⊕ … ⊕ ck·xk`.
    pub fn linear(c0: bool, coeffs: &[bool]) -> Result<Self> {
        Self::from_fn(coeffs.len(), |a| {
            a.iter().zip(coeffs).filter(|(&x, &c)| x && c).count() % 2 == 1
        })
        .map(|f| if c0 { f.negation() } else { f })
    }

    pub fn negation(&self) -> Self {
        BoolFn {
            arity: self.arity,
            table: !self.table & table_mask(self.arity()),
        }
    }

    /// `x ↦ ¬f(¬x)`. Swaps ∧ and ∨, fixes projections, maj and ⊕.
    pub fn dual(&self) -> Self {
        let full = rows(self.arity()) - 1;
        let mut table = 0u64;
        for r in 0..=full {
            if !self.value(full - r) {
                table |= 1 << r;
            }
        }
        BoolFn {
            arity: self.arity,
            table,
        }
    }

    /// `g(x1,…,xk) = f(x_{p(1)},…,x_{p(k)})` for a 0-based permutation `p`.
    pub fn permute(&self, p: &[usize]) -> Result<Self> {
        if p.len() != self.arity() {
            return Err(Error::ShapeMismatch("permutation length".into()));
        }
        let f = *self;
        Self::from_fn(self.arity(), |a| {
            let permuted: Vec<bool> = p.iter().map(|&i| a[i]).collect();
            f.eval(&permuted)
        })
    }

    /// Named constructors: `and`, `or`, `andK`, `orK`, `maj`, `xor`, `xor3`,
    /// `prD`, `id`.
    pub fn named(name: &str, k: usize) -> Result<Self> {
        let unknown = || Error::UnknownFunction {
            name: name.to_string(),
            arity: k,
        };
        if k == 0 || k > MAX_FN_ARITY {
            return Err(unknown());
        }
        let with_arity = |base: &str| {
            name == base
                || name
                    .strip_prefix(base)
                    .and_then(|s| s.parse::<usize>().ok())
                    == Some(k)
        };
        if with_arity("and") {
            Ok(Self::and(k))
        } else if with_arity("or") {
            Ok(Self::or(k))
        } else if name == "maj" && k == 3 {
            Ok(Self::maj())
        } else if (name == "xor" || name == "xor3") && k == 3 {
            Ok(Self::xor3())
        } else if name == "id" && k == 1 {
            Ok(Self::identity())
        } else if let Some(d) = name
            .strip_prefix("pr")
            .and_then(|s| s.parse::<usize>().ok())
        {
            Self::projection(d, k).map_err(|_| unknown())
        } else {
            Err(unknown())
        }
    }

    /// Canonical name if the function is one of the named ones.
    pub fn name(&self) -> Option<String> {
        let k = self.arity();
        if let Some(d) = self.projection_index() {
            return Some(format!("pr{d}"));
        }
        let suffix = if k == 2 { String::new() } else { k.to_string() };
        if *self == Self::and(k) {
            Some(format!("and{suffix}"))
        } else if *self == Self::or(k) {
            Some(format!("or{suffix}"))
        } else if k == 3 && *self == Self::maj() {
            Some("maj".into())
        } else if k == 3 && *self == Self::xor3() {
            Some("xor3".into())
        } else {
            None
        }
    }

    pub fn is_unanimous(&self) -> bool {
        !self.value(0) && self.value(rows(self.arity()) - 1)
    }

    /// `Some(d)` if the function is `pr_d^k`.
    pub fn projection_index(&self) -> Option<usize> {
        (1..=self.arity()).find(|&d| Self::projection(d, self.arity()).ok() == Some(*self))
    }

    pub fn is_projection(&self) -> bool {
        self.projection_index().is_some()
    }

    /// Invariant under every permutation of the arguments, i.e. the value
    /// depends only on the number of ones.
    pub fn is_anonymous(&self) -> bool {
        let mut by_weight: [Option<bool>; MAX_FN_ARITY + 1] = [None; MAX_FN_ARITY + 1];
        (0..rows(self.arity())).all(|r| {
            let w = r.count_ones() as usize;
            let v = self.value(r);
            *by_weight[w].get_or_insert(v) == v
        })
    }

    /// Flipping any argument from 0 to 1 never turns the value from 1 to 0.
    pub fn is_monotone(&self) -> bool {
        (0..rows(self.arity())).all(|r| {
            (0..self.arity()).all(|i| {
                let b = 1 << i;
                r & b != 0 || !self.value(r) || self.value(r | b)
            })
        })
    }

    /// For every position some setting of the other arguments makes the
    /// value independent of that position.
    pub fn is_one_immune(&self) -> bool {
        (0..self.arity()).all(|i| {
            let b = 1 << i;
            (0..rows(self.arity())).any(|r| r & b == 0 && self.value(r) == self.value(r | b))
        })
    }

    /// Binary function with `f(a,b) = f(b,a)`.
    pub fn is_symmetric(&self) -> bool {
        self.arity() == 2 && self.value(0b01) == self.value(0b10)
    }

    /// Positions (1-based) on which the function actually depends.
    pub fn essential_arguments(&self) -> Vec<usize> {
        let k = self.arity();
        (0..k)
            .filter(|&i| {
                let b = 1 << (k - 1 - i);
                (0..rows(k)).any(|r| r & b == 0 && self.value(r) != self.value(r | b))
            })
            .map(|i| i + 1)
            .collect()
    }
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(name) => f.write_str(&name),
            None => write!(f, "t {}", self.to_bit_string()),
        }
    }
}
