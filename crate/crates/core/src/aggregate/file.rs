//! Aggregator files: `a <n> <k>` followed by one component per line, either
//! a name or `t <2^k bits>`.

use super::{Aggregator, BoolFn};
use crate::error::{Error, Result};

pub fn parse_aggregator(text: &str) -> Result<Aggregator> {
    let mut header: Option<(usize, usize)> = None;
    let mut components = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let Some((n, k)) = header else {
            let parsed = match words.as_slice() {
                ["a", n, k] => n.parse::<usize>().ok().zip(k.parse::<usize>().ok()),
                _ => None,
            };
            match parsed {
                Some((n, k)) if n > 0 && k > 0 => header = Some((n, k)),
                _ => return Err(Error::syntax(line_no, 1, "expected `a <n> <k>` header")),
            }
            continue;
        };
        let f = match words.as_slice() {
            ["t", bits] => BoolFn::from_bit_string(bits)
                .map_err(|e| Error::syntax(line_no, 3, e.to_string()))?,
            [name] => {
                BoolFn::named(name, k).map_err(|e| Error::syntax(line_no, 1, e.to_string()))?
            }
            _ => {
                return Err(Error::syntax(
                    line_no,
                    1,
                    "expected a function name or `t <bits>`",
                ))
            }
        };
        if f.arity() != k {
            return Err(Error::ArityMismatch {
                expected: k,
                found: f.arity(),
            });
        }
        components.push(f);
        if components.len() > n {
            return Err(Error::ShapeMismatch(format!("more than {n} components")));
        }
    }
    let (n, _) = header.ok_or_else(|| Error::syntax(1, 1, "missing `a <n> <k>` header"))?;
    if components.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "header declares {n} components but {} were given",
            components.len()
        )));
    }
    Aggregator::new(components)
}

pub fn render_aggregator(f: &Aggregator) -> String {
    let mut out = format!("a {} {}\n", f.n(), f.arity());
    for c in f.components() {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "c example\na 3 3\nand3\nmaj\nt 00101011\n";
        let f = parse_aggregator(text).unwrap();
        assert_eq!(f.components()[1], BoolFn::maj());
        assert_eq!(parse_aggregator(&render_aggregator(&f)).unwrap(), f);
    }

    #[test]
    fn errors() {
        assert!(parse_aggregator("a 2 2\nand\n").is_err());
        assert!(parse_aggregator("a 1 2\nmaj\n").is_err());
        assert!(matches!(
            parse_aggregator("a 1 2\nt 00010111\n"),
            Err(Error::ArityMismatch {
                expected: 2,
                found: 3
            })
        ));
        assert!(parse_aggregator("and\n").is_err());
    }
}
