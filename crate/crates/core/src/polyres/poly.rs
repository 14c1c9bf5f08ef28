use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monic polynomial of degree at least two with non-negative integer
/// coefficients, stored lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PolynomialSpec {
    coefficients: Vec<u64>,
}

impl PolynomialSpec {
    pub fn new(mut coefficients: Vec<u64>) -> Result<Self> {
        while coefficients.len() > 1 && coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        if coefficients.len() < 3 {
            return Err(Error::Precondition(format!(
                "polynomial must have degree > 1, got coefficients {coefficients:?}"
            )));
        }
        if coefficients.last() != Some(&1) {
            return Err(Error::Precondition("polynomial must be monic".into()));
        }
        Ok(PolynomialSpec { coefficients })
    }

    /// `m^2`
    pub fn square() -> Self {
        PolynomialSpec {
            coefficients: vec![0, 0, 1],
        }
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn degree(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    pub fn is_square(&self) -> bool {
        self.coefficients == [0, 0, 1]
    }

    /// P(m), or `None` on overflow.
    pub fn eval(&self, m: u64) -> Option<u64> {
        let mut acc: u64 = 0;
        for &c in self.coefficients.iter().rev() {
            acc = acc.checked_mul(m)?.checked_add(c)?;
        }
        Some(acc)
    }

    /// P(m) mod n.
    pub fn eval_mod(&self, m: u64, n: u64) -> u64 {
        let n128 = n as u128;
        let mm = (m % n) as u128;
        let mut acc: u128 = 0;
        for &c in self.coefficients.iter().rev() {
            acc = (acc * mm + (c as u128 % n128)) % n128;
        }
        acc as u64
    }

    /// Integer part of the inverse: the largest `m >= 0` with `P(m) <= n`.
    /// Binary search on exact values; no floating point.
    pub fn inverse_floor(&self, n: u64) -> Result<u64> {
        if self.coefficients[0] > n {
            return Err(Error::Precondition(format!(
                "P^-1({n}) undefined: P(0) = {} > {n}",
                self.coefficients[0]
            )));
        }
        let fits = |m: u64| self.eval(m).is_some_and(|v| v <= n);
        let (mut lo, mut hi) = (0u64, 1u64);
        while fits(hi) {
            lo = hi;
            hi *= 2;
        }
        // fits(lo), !fits(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

impl TryFrom<Vec<u64>> for PolynomialSpec {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        PolynomialSpec::new(v)
    }
}

impl From<PolynomialSpec> for Vec<u64> {
    fn from(p: PolynomialSpec) -> Vec<u64> {
        p.coefficients
    }
}

impl fmt::Display for PolynomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("m")?,
                (1, c) => write!(f, "{c}m")?,
                (e, 1) => write!(f, "m^{e}")?,
                (e, c) => write!(f, "{c}m^{e}")?,
            }
        }
        Ok(())
    }
}

/// Accepts `m^3+2m+1` style expressions in the variable `m` (or `n`/`x`), or
/// a comma-separated coefficient list, lowest degree first.
impl FromStr for PolynomialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: format!("polynomial {s:?}: {msg}"),
        };
        if s.contains(',') {
            let coeffs = s
                .split(',')
                .map(|t| t.parse::<u64>().map_err(|_| bad("bad coefficient")))
                .collect::<Result<Vec<_>>>()?;
            return PolynomialSpec::new(coeffs);
        }
        let mut coeffs: Vec<u64> = Vec::new();
        for term in s.split('+') {
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let var = term.find(['m', 'n', 'x']);
            let (c, e) = match var {
                None => (
                    term.parse::<u64>().map_err(|_| bad("bad constant"))?,
                    0usize,
                ),
                Some(i) => {
                    let head = term[..i].trim_end_matches('*');
                    let c = if head.is_empty() {
                        1
                    } else {
                        head.parse::<u64>().map_err(|_| bad("bad coefficient"))?
                    };
                    let tail = &term[i + 1..];
                    let e = if tail.is_empty() {
                        1
                    } else {
                        tail.strip_prefix('^')
                            .and_then(|t| t.parse::<usize>().ok())
                            .ok_or_else(|| bad("bad exponent"))?
                    };
                    (c, e)
                }
            };
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0);
            }
            coeffs[e] += c;
        }
        PolynomialSpec::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> PolynomialSpec {
        PolynomialSpec::new(vec![1, 2, 0, 1]).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let p: PolynomialSpec = "m^3+2m+1".parse().unwrap();
        assert_eq!(p, cubic());
        assert_eq!(p.to_string(), "m^3+2m+1");
        assert_eq!(
            "m^2".parse::<PolynomialSpec>().unwrap(),
            PolynomialSpec::square()
        );
        assert_eq!(
            "m^2+m".parse::<PolynomialSpec>().unwrap().coefficients(),
            &[0, 1, 1]
        );
        assert_eq!(
            "0,0,1".parse::<PolynomialSpec>().unwrap(),
            PolynomialSpec::square()
        );
        assert!("2m^2".parse::<PolynomialSpec>().is_err());
        assert!("m+1".parse::<PolynomialSpec>().is_err());
    }

    #[test]
    fn strictly_increasing() {
        for p in [PolynomialSpec::square(), cubic(), "m^2+m".parse().unwrap()] {
            for m in 0..2000 {
                assert!(p.eval(m).unwrap() < p.eval(m + 1).unwrap());
            }
        }
    }

    #[test]
    fn inverse_floor_brackets() {
        for p in [PolynomialSpec::square(), cubic()] {
            let p0 = p.eval(0).unwrap();
            for n in p0..5000 {
                let m = p.inverse_floor(n).unwrap();
                assert!(
                    p.eval(m).unwrap() <= n && n < p.eval(m + 1).unwrap(),
                    "n={n}"
                );
            }
            assert!(p.inverse_floor(u64::MAX).is_ok());
        }
        assert!(cubic().inverse_floor(0).is_err());
        assert_eq!(PolynomialSpec::square().inverse_floor(100).unwrap(), 10);
        assert_eq!(PolynomialSpec::square().inverse_floor(99).unwrap(), 9);
    }

    #[test]
    fn eval_mod_matches_eval() {
        let p = cubic();
        for m in 0..300 {
            for n in 1..40 {
                assert_eq!(p.eval_mod(m, n), p.eval(m).unwrap() % n);
            }
        }
    }
}
