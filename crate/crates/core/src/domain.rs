//! Explicit Boolean domains: finite sets of judgment vectors.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::aggregate::{BoolFn, RowMasks};
use crate::error::{Error, Result};
use crate::formula::{bit_string, full_mask, Assignment};
use crate::{DEFAULT_TUPLE_CAP, MAX_ARITY};

/// A non-empty set of points of `{0,1}^n`, packed as in [`Assignment`].
#[derive(Clone)]
pub struct Domain {
    n: usize,
    members: Vec<u64>,
    index: HashSet<u64>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members == other.members
    }
}

impl Eq for Domain {}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .members
            .iter()
            .map(|&m| bit_string(m, self.n))
            .collect();
        write!(f, "Domain(n={}, {{{}}})", self.n, rows.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub non_degenerate: bool,
    /// 1-based coordinate and the bit every member carries there.
    pub fixed_coordinates: Vec<(usize, bool)>,
}

/// How operations treat degenerate domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    #[default]
    Strict,
    Permissive,
}

impl Domain {
    /// Builds a domain from packed members; duplicates collapse.
    pub fn from_bits(n: usize, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        if n == 0 || n > MAX_ARITY {
            return Err(Error::CapExceeded {
                what: "domain arity",
                requested: n as u128,
                limit: MAX_ARITY as u128,
            });
        }
        let mask = full_mask(n);
        let mut members: Vec<u64> = members.into_iter().map(|m| m & mask).collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let index = members.iter().copied().collect();
        Ok(Domain { n, members, index })
    }

    /// Builds a domain from rows like `"0110"`.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let text: String = match rows.first() {
            None => return Err(Error::EmptyDomain),
            Some(r) => {
                let mut t = format!("d {}\n", r.as_ref().len());
                for r in rows {
                    t.push_str(r.as_ref());
                    t.push('\n');
                }
                t
            }
        };
        parse_domain(&text)
    }

    pub fn full(n: usize) -> Result<Self> {
        if n > 24 {
            return Err(Error::CapExceeded {
                what: "full cube arity",
                requested: n as u128,
                limit: 24,
            });
        }
        Self::from_bits(n, 0..1u64 << n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Sorted packed members.
    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn contains_bits(&self, bits: u64) -> bool {
        self.index.contains(&bits)
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        a.n() == self.n && self.contains_bits(a.bits())
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.members
            .iter()
            .map(move |&m| Assignment::new(self.n, m).expect("arity checked"))
    }

    /// Bit of coordinate `j` (1-based) in packed member `m`.
    pub(crate) fn coord(&self, m: u64, j: usize) -> bool {
        m >> (self.n - j) & 1 == 1
    }

    pub fn degeneracy(&self) -> DegeneracyReport {
        let all_and = self
            .members
            .iter()
            .fold(full_mask(self.n), |acc, &m| acc & m);
        let all_or = self.members.iter().fold(0, |acc, &m| acc | m);
        let fixed_coordinates: Vec<(usize, bool)> = (1..=self.n)
            .filter_map(|j| {
                if self.coord(all_and, j) {
                    Some((j, true))
                } else if !self.coord(all_or, j) {
                    Some((j, false))
                } else {
                    None
                }
            })
            .collect();
        DegeneracyReport {
            non_degenerate: fixed_coordinates.is_empty(),
            fixed_coordinates,
        }
    }

    pub fn is_non_degenerate(&self) -> bool {
        self.degeneracy().non_degenerate
    }

    /// Errors on a degenerate domain under [`Policy::Strict`].
    pub fn check_policy(&self, policy: Policy) -> Result<DegeneracyReport> {
        let report = self.degeneracy();
        if policy == Policy::Strict && !report.non_degenerate {
            return Err(Error::DegenerateDomain {
                fixed: report.fixed_coordinates,
            });
        }
        Ok(report)
    }

    /// Restriction to the coordinates in `idx` (1-based, order and duplicates
    /// ignored).
    pub fn project(&self, idx: &[usize]) -> Result<Domain> {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::BadIndex {
                index: 0,
                n: self.n,
            });
        }
        for &j in &idx {
            if j == 0 || j > self.n {
                return Err(Error::BadIndex {
                    index: j,
                    n: self.n,
                });
            }
        }
        let projected = self.members.iter().map(|&m| {
            idx.iter()
                .fold(0u64, |acc, &j| (acc << 1) | u64::from(self.coord(m, j)))
        });
        Domain::from_bits(idx.len(), projected)
    }

    /// Complements every member on the coordinates in `vars`.
    pub fn rename(&self, vars: &[usize]) -> Result<Domain> {
        let mut mask = 0u64;
        for &j in vars {
            if j == 0 || j > self.n {
                return Err(Error::BadIndex {
                    index: j,
                    n: self.n,
                });
            }
            mask |= 1 << (self.n - j);
        }
        Domain::from_bits(self.n, self.members.iter().map(|&m| m ^ mask))
    }

    /// Whether applying `f` coordinate-wise to every k-tuple of members stays
    /// inside the domain.
    pub fn is_closed_under(&self, f: &BoolFn) -> Result<bool> {
        let masks = RowMasks::uniform(f, self.n);
        Ok(self
            .closure_counterexample(&masks, DEFAULT_TUPLE_CAP)?
            .is_none())
    }

    /// Closure under the ternary parity function.
    pub fn is_affine(&self) -> Result<bool> {
        self.is_closed_under(&BoolFn::xor3())
    }

    /// First k-tuple of members (in lexicographic index order) whose image is
    /// outside the domain.
    pub(crate) fn closure_counterexample(
        &self,
        masks: &RowMasks,
        cap: u128,
    ) -> Result<Option<Vec<u64>>> {
        let k = masks.arity();
        let total = (self.len() as u128)
            .checked_pow(k as u32)
            .unwrap_or(u128::MAX);
        if total > cap {
            return Err(Error::CapExceeded {
                what: "closure tuples",
                requested: total,
                limit: cap,
            });
        }
        let mut idx = vec![0usize; k];
        let mut rows = vec![0u64; k];
        loop {
            for (r, &i) in rows.iter_mut().zip(&idx) {
                *r = self.members[i];
            }
            if !self.contains_bits(masks.apply(&rows)) {
                return Ok(Some(rows));
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Ok(None);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < self.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// Drops the fixed coordinates. Returns the reduced domain (if any
    /// coordinate is free) together with the kept coordinates.
    pub fn reduce(&self) -> (Option<Domain>, Vec<usize>, Vec<(usize, bool)>) {
        let report = self.degeneracy();
        let free: Vec<usize> = (1..=self.n)
            .filter(|j| !report.fixed_coordinates.iter().any(|(f, _)| f == j))
            .collect();
        let reduced = if free.is_empty() {
            None
        } else {
            Some(self.project(&free).expect("free coordinates are in range"))
        };
        (reduced, free, report.fixed_coordinates)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_domain(self))
    }
}

/// Parses `d <n>` followed by one `0`/`1` row per member.
pub fn parse_domain(text: &str) -> Result<Domain> {
    let mut n: Option<usize> = None;
    let mut members = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            continue;
        }
        let Some(n) = n else {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("d") {
                return Err(Error::syntax(line_no, 1, "expected `d <n>` header"));
            }
            let value = parts
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::syntax(line_no, 3, "header needs a positive arity"))?;
            if parts.next().is_some() {
                return Err(Error::syntax(line_no, 1, "trailing tokens after header"));
            }
            if value > MAX_ARITY {
                return Err(Error::CapExceeded {
                    what: "domain arity",
                    requested: value as u128,
                    limit: MAX_ARITY as u128,
                });
            }
            n = Some(value);
            continue;
        };
        let offset = raw.len() - raw.trim_start().len();
        let mut bits = 0u64;
        let mut len = 0;
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '0' | '1' => {
                    bits = (bits << 1) | u64::from(ch == '1');
                    len += 1;
                }
                _ => {
                    return Err(Error::NonBinary {
                        line: line_no,
                        column: offset + col + 1,
                    })
                }
            }
        }
        if len != n {
            return Err(Error::RaggedRow {
                line: line_no,
                expected: n,
                found: len,
            });
        }
        if !seen.insert(bits) {
            return Err(Error::DuplicateRow {
                line: line_no,
                row: line.to_string(),
            });
        }
        members.push(bits);
    }
    let n = n.ok_or_else(|| Error::syntax(1, 1, "missing `d <n>` header"))?;
    Domain::from_bits(n, members)
}

pub fn render_domain(d: &Domain) -> String {
    let mut out = format!("d {}\n", d.n);
    for &m in &d.members {
        out.push_str(&bit_string(m, d.n));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(rows: &[&str]) -> Domain {
        Domain::from_rows(rows).unwrap()
    }

    #[test]
    fn parse_and_render() {
        let d = parse_domain("d 2\n00\n11").unwrap();
        assert_eq!(d, dom(&["00", "11"]));
        assert_eq!(render_domain(&d), "d 2\n00\n11\n");
        assert_eq!(parse_domain(&render_domain(&d)).unwrap(), d);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_domain("d 1\n0\n0"),
            Err(Error::DuplicateRow { line: 3, .. })
        ));
        assert!(matches!(
            parse_domain("d 2\n0"),
            Err(Error::RaggedRow {
                line: 2,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_domain("d 2\n02"),
            Err(Error::NonBinary { line: 2, column: 2 })
        ));
        assert!(matches!(
            parse_domain("d 2\nc nothing"),
            Err(Error::EmptyDomain)
        ));
        assert!(matches!(parse_domain("00\n"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn degeneracy_reports_fixed_coordinates() {
        assert!(dom(&["00", "11"]).degeneracy().non_degenerate);
        let r = dom(&["00", "01"]).degeneracy();
        assert_eq!(r.fixed_coordinates, vec![(1, false)]);
        assert!(dom(&["00", "01"]).check_policy(Policy::Strict).is_err());
        assert!(dom(&["00", "01"]).check_policy(Policy::Permissive).is_ok());
    }

    #[test]
    fn projection_and_rename() {
        assert_eq!(dom(&["01", "11"]).project(&[2]).unwrap(), dom(&["1"]));
        let d = dom(&["011", "101", "000"]);
        assert_eq!(d.project(&[1, 2, 3]).unwrap(), d);
        assert!(d.project(&[4]).is_err());
        assert!(d.project(&[]).is_err());
        assert_eq!(dom(&["01"]).rename(&[1]).unwrap(), dom(&["11"]));
        assert_eq!(d.rename(&[2, 3]).unwrap().rename(&[2, 3]).unwrap(), d);
    }

    #[test]
    fn closure_checks() {
        let phi14 = dom(&["001", "010", "100", "111"]);
        assert!(phi14.is_affine().unwrap());
        let phi11 = dom(&["000", "001", "010", "100"]);
        assert!(!phi11.is_affine().unwrap());
        assert!(phi11.is_closed_under(&BoolFn::and(2)).unwrap());
        assert!(phi11
            .is_closed_under(&BoolFn::projection(2, 3).unwrap())
            .unwrap());
        assert!(dom(&["0110"]).is_affine().unwrap());
    }

    #[test]
    fn reduce_drops_fixed() {
        let d = dom(&["010", "011"]);
        let (r, free, fixed) = d.reduce();
        assert_eq!(free, vec![3]);
        assert_eq!(fixed, vec![(1, false), (2, true)]);
        assert_eq!(r.unwrap(), dom(&["0", "1"]));
    }
}
