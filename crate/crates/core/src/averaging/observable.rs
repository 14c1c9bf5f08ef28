use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toeplitz::{window_alphabet_size, window_code, ToeplitzSkeleton};

/// A function of the window `y(-m) .. y(m)`, tabulated over all words of
/// length `2m+1`; the index is the window code with `y(-m)` most significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservable")]
pub struct ObservableSpec {
    alphabet_size: u32,
    radius: u32,
    table: Vec<f64>,
}

#[derive(Deserialize)]
struct RawObservable {
    alphabet_size: u32,
    radius: u32,
    table: Vec<f64>,
}

impl TryFrom<RawObservable> for ObservableSpec {
    type Error = Error;
    fn try_from(r: RawObservable) -> Result<Self> {
        ObservableSpec::new(r.alphabet_size, r.radius, r.table)
    }
}

impl ObservableSpec {
    pub fn new(alphabet_size: u32, radius: u32, table: Vec<f64>) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::Config(
                "observable alphabet must be non-empty".into(),
            ));
        }
        let size = window_alphabet_size(alphabet_size, radius)?;
        if table.len() != size as usize {
            return Err(Error::Config(format!(
                "observable table has {} entries, expected {size}",
                table.len()
            )));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("observable table must be finite".into()));
        }
        Ok(ObservableSpec {
            alphabet_size,
            radius,
            table,
        })
    }

    /// Tabulates `f` on every window, passed as symbols `y(-m) .. y(m)`.
    pub fn from_fn(alphabet_size: u32, radius: u32, f: impl Fn(&[u32]) -> f64) -> Result<Self> {
        let size = window_alphabet_size(alphabet_size, radius)?;
        let len = 2 * radius as usize + 1;
        let mut word = vec![0u32; len];
        let table = (0..size)
            .map(|mut code| {
                for i in (0..len).rev() {
                    word[i] = code % alphabet_size;
                    code /= alphabet_size;
                }
                f(&word)
            })
            .collect();
        Self::new(alphabet_size, radius, table)
    }

    /// `F(y) = (-1)^y(0)`.
    pub fn parity(alphabet_size: u32) -> Self {
        Self::from_fn(alphabet_size, 0, |w| if w[0] % 2 == 0 { 1.0 } else { -1.0 }).unwrap()
    }

    pub fn constant(alphabet_size: u32, c: f64) -> Result<Self> {
        Self::from_fn(alphabet_size, 0, |_| c)
    }

    /// Indicator of the cylinder `y(-m) .. y(m) = word`, `word.len() = 2m+1`.
    pub fn cylinder(alphabet_size: u32, word: &[u32]) -> Result<Self> {
        if word.len() % 2 == 0 {
            return Err(Error::Config("cylinder word must have odd length".into()));
        }
        if word.iter().any(|&s| s >= alphabet_size) {
            return Err(Error::Config("cylinder symbol outside alphabet".into()));
        }
        Self::from_fn(alphabet_size, (word.len() / 2) as u32, |w| {
            (w == word) as u8 as f64
        })
    }

    /// `parity`, `constant:<c>` or `cylinder:<s,s,...>` (centred word).
    pub fn parse(text: &str, alphabet_size: u32) -> Result<Self> {
        let text = text.trim();
        if text == "parity" {
            return Ok(Self::parity(alphabet_size));
        }
        if let Some(c) = text.strip_prefix("constant:") {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad constant in observable {text:?}")))?;
            return Self::constant(alphabet_size, c);
        }
        if let Some(w) = text.strip_prefix("cylinder:") {
            let word = w
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Config(format!("bad cylinder word in {text:?}")))?;
            return Self::cylinder(alphabet_size, &word);
        }
        Err(Error::Config(format!(
            "unknown observable {text:?} (expected parity, constant:<c> or cylinder:<s,..>)"
        )))
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn sup_norm(&self) -> f64 {
        self.table.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// The same function as a radius-0 observable on window codes.
    pub fn flattened(&self) -> Result<Self> {
        let size = window_alphabet_size(self.alphabet_size, self.radius)?;
        Self::new(size, 0, self.table.clone())
    }

    pub(crate) fn check_skeleton(&self, sk: &ToeplitzSkeleton) -> Result<()> {
        if sk.alphabet_size() != self.alphabet_size {
            return Err(Error::Config(format!(
                "observable alphabet size {} does not match skeleton alphabet size {}",
                self.alphabet_size,
                sk.alphabet_size()
            )));
        }
        Ok(())
    }

    /// Window code of `S^j x` for one period `j = 0 .. L` of the completed
    /// skeleton.
    pub(crate) fn codes(&self, sk: &ToeplitzSkeleton) -> Result<Vec<u32>> {
        self.check_skeleton(sk)?;
        let word = sk.resolved();
        let m = self.radius as usize;
        Ok((0..word.len())
            .map(|j| {
                window_code(word, j, m, self.alphabet_size).expect("resolved word has no holes")
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables() {
        assert_eq!(ObservableSpec::parity(2).table(), &[1.0, -1.0]);
        let c = ObservableSpec::cylinder(2, &[0, 1, 0]).unwrap();
        assert_eq!(c.table().len(), 8);
        assert_eq!(c.table()[0b010], 1.0);
        assert_eq!(c.table().iter().sum::<f64>(), 1.0);
        assert_eq!(
            ObservableSpec::parse("constant:2.5", 3).unwrap().sup_norm(),
            2.5
        );
        assert!(ObservableSpec::parse("nope", 2).is_err());
        assert!(ObservableSpec::new(2, 1, vec![0.0; 7]).is_err());
    }

    #[test]
    fn serde_validates() {
        let p = ObservableSpec::parity(2);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<ObservableSpec>(&text).unwrap(), p);
        assert!(serde_json::from_str::<ObservableSpec>(
            r#"{"alphabet_size":2,"radius":0,"table":[1]}"#
        )
        .is_err());
    }
}
