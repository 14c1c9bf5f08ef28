use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symbol code marking an undefined position.
pub const HOLE: u32 = u32::MAX;
/// Glyph used for holes in the text format.
pub const HOLE_GLYPH: char = '?';

/// One approximant: a word of length `period` over symbol codes or [`HOLE`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub period: u64,
    pub word: Vec<u32>,
}

impl Stage {
    pub fn new(word: Vec<u32>) -> Self {
        Stage {
            period: word.len() as u64,
            word,
        }
    }

    /// Fully undefined word of the given period.
    pub fn holes(period: u64) -> Self {
        Stage::new(vec![HOLE; period as usize])
    }

    pub fn get(&self, j: i64) -> Option<u32> {
        let s = self.word[j.rem_euclid(self.period as i64) as usize];
        (s != HOLE).then_some(s)
    }

    pub fn hole_count(&self) -> u64 {
        self.word.iter().filter(|&&s| s == HOLE).count() as u64
    }

    pub fn hole_positions(&self) -> impl Iterator<Item = u64> + '_ {
        self.word
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == HOLE)
            .map(|(j, _)| j as u64)
    }

    /// The word repeated `k` times: the starting point of the next stage.
    pub fn lift(&self, k: u64) -> Stage {
        let mut word = Vec::with_capacity((self.period * k) as usize);
        for _ in 0..k {
            word.extend_from_slice(&self.word);
        }
        Stage::new(word)
    }
}

/// How positions still undefined at the last stage are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completion {
    /// The first alphabet letter (code 0).
    #[default]
    FirstSymbol,
    /// Window codes of the completed base sequence (set by `window`).
    Windowed,
}

impl Completion {
    pub fn name(self) -> &'static str {
        match self {
            Completion::FirstSymbol => "first-symbol",
            Completion::Windowed => "windowed",
        }
    }
}

/// Staged periodic words with holes over nested periods `n_0 | n_1 | ...`.
///
/// Consistency (a symbol defined at stage `t` stays defined with the same
/// value at every later stage) is checked on construction. Evaluation uses the
/// last stage with holes completed, which agrees with the first defining stage
/// by consistency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzSkeleton {
    alphabet_size: u32,
    glyphs: Option<Vec<char>>,
    stages: Vec<Stage>,
    completion: Completion,
    metadata: BTreeMap<String, String>,
    resolved: Vec<u32>,
}

impl ToeplitzSkeleton {
    /// Skeleton over single-character glyphs.
    pub fn new(glyphs: &str, stages: Vec<Stage>) -> Result<Self> {
        let glyphs: Vec<char> = glyphs.chars().collect();
        if glyphs.is_empty() {
            return Err(Error::Config("empty alphabet".into()));
        }
        for (i, g) in glyphs.iter().enumerate() {
            if *g == HOLE_GLYPH || *g == ':' || g.is_whitespace() || glyphs[..i].contains(g) {
                return Err(Error::Config(format!("invalid alphabet glyph {g:?}")));
            }
        }
        Self::build(
            glyphs.len() as u32,
            Some(glyphs),
            stages,
            Completion::FirstSymbol,
            None,
        )
    }

    /// Skeleton over symbol codes `0..alphabet_size`, without glyphs.
    pub fn with_alphabet_size(alphabet_size: u32, stages: Vec<Stage>) -> Result<Self> {
        Self::build(alphabet_size, None, stages, Completion::FirstSymbol, None)
    }

    pub(crate) fn build(
        alphabet_size: u32,
        glyphs: Option<Vec<char>>,
        stages: Vec<Stage>,
        completion: Completion,
        resolved: Option<Vec<u32>>,
    ) -> Result<Self> {
        if alphabet_size == 0 || alphabet_size == HOLE {
            return Err(Error::Config(format!(
                "alphabet size {alphabet_size} out of range"
            )));
        }
        if stages.is_empty() {
            return Err(Error::Config("skeleton needs at least one stage".into()));
        }
        for (t, s) in stages.iter().enumerate() {
            if s.period == 0 || s.word.len() as u64 != s.period {
                return Err(Error::Invariant(format!(
                    "stage {t}: word length {} does not match period {}",
                    s.word.len(),
                    s.period
                )));
            }
            if let Some(bad) = s.word.iter().find(|&&c| c != HOLE && c >= alphabet_size) {
                return Err(Error::Invariant(format!(
                    "stage {t}: symbol {bad} outside alphabet"
                )));
            }
        }
        for t in 1..stages.len() {
            check_consistent(&stages[t - 1], &stages[t], t)?;
        }
        let last = stages.last().unwrap();
        let resolved = match resolved {
            Some(r) => r,
            None => last
                .word
                .iter()
                .map(|&c| if c == HOLE { 0 } else { c })
                .collect(),
        };
        let mut metadata = BTreeMap::new();
        metadata.insert("completion".into(), completion.name().into());
        Ok(ToeplitzSkeleton {
            alphabet_size,
            glyphs,
            stages,
            completion,
            metadata,
            resolved,
        })
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn glyphs(&self) -> Option<&[char]> {
        self.glyphs.as_deref()
    }

    pub fn completion(&self) -> Completion {
        self.completion
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage(&self, t: usize) -> Result<&Stage> {
        self.stages.get(t).ok_or_else(|| {
            Error::Precondition(format!(
                "stage {t} does not exist ({} stages built)",
                self.stages.len()
            ))
        })
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn period(&self, t: usize) -> u64 {
        self.stages[t].period
    }

    /// Period of the last stage, n_T.
    pub fn last_period(&self) -> u64 {
        self.stages.last().unwrap().period
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    /// Appends a stage after checking divisibility and consistency.
    pub fn push_stage(&mut self, stage: Stage) -> Result<()> {
        if let Some(bad) = stage
            .word
            .iter()
            .find(|&&c| c != HOLE && c >= self.alphabet_size)
        {
            return Err(Error::Invariant(format!("symbol {bad} outside alphabet")));
        }
        check_consistent(self.stages.last().unwrap(), &stage, self.stages.len())?;
        self.resolved = stage
            .word
            .iter()
            .map(|&c| if c == HOLE { 0 } else { c })
            .collect();
        self.completion = Completion::FirstSymbol;
        self.metadata
            .insert("completion".into(), self.completion.name().into());
        self.stages.push(stage);
        Ok(())
    }

    /// x(j): the symbol at the first stage defining `j`, else the completion.
    #[inline]
    pub fn eval(&self, j: i64) -> u32 {
        self.resolved[j.rem_euclid(self.resolved.len() as i64) as usize]
    }

    /// One period of the completed sequence.
    pub fn resolved(&self) -> &[u32] {
        &self.resolved
    }

    /// First stage defining `j`, if any.
    pub fn defining_stage(&self, j: i64) -> Option<usize> {
        self.stages.iter().position(|s| s.get(j).is_some())
    }

    pub fn glyph(&self, symbol: u32) -> Option<char> {
        self.glyphs
            .as_ref()
            .and_then(|g| g.get(symbol as usize).copied())
    }

    /// Text form: `alphabet <glyphs>`, `# key=value` metadata lines, then one
    /// `n:word` line per stage with `?` for holes.
    pub fn to_text(&self) -> Result<String> {
        let glyphs = self
            .glyphs
            .as_ref()
            .ok_or_else(|| Error::Config("skeleton without glyphs has no text form".into()))?;
        let mut out = String::new();
        out.push_str("alphabet ");
        out.extend(glyphs.iter());
        out.push('\n');
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        for s in &self.stages {
            let _ = write!(out, "{}:", s.period);
            out.extend(s.word.iter().map(|&c| {
                if c == HOLE {
                    HOLE_GLYPH
                } else {
                    glyphs[c as usize]
                }
            }));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty skeleton file".into(),
        })?;
        let glyphs = head
            .strip_prefix("alphabet ")
            .ok_or(Error::Parse {
                line: 1,
                msg: "expected `alphabet <glyphs>` header".into(),
            })?
            .trim();
        let table: Vec<char> = glyphs.chars().collect();
        let mut metadata = BTreeMap::new();
        let mut stages = Vec::new();
        for (i, line) in lines {
            let line = line.trim_end();
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let (n, word) = line
                .split_once(':')
                .ok_or_else(|| bad("expected `n:word`".into()))?;
            let period: u64 = n
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad period {n:?}")))?;
            let word = word
                .chars()
                .map(|c| {
                    if c == HOLE_GLYPH {
                        Ok(HOLE)
                    } else {
                        table
                            .iter()
                            .position(|&g| g == c)
                            .map(|p| p as u32)
                            .ok_or_else(|| bad(format!("glyph {c:?} not in alphabet")))
                    }
                })
                .collect::<Result<Vec<u32>>>()?;
            if word.len() as u64 != period {
                return Err(bad(format!(
                    "word length {} does not match period {period}",
                    word.len()
                )));
            }
            stages.push(Stage { period, word });
        }
        let mut sk = ToeplitzSkeleton::new(glyphs, stages)?;
        for (k, v) in metadata {
            if k != "completion" {
                sk.metadata.insert(k, v);
            }
        }
        Ok(sk)
    }
}

fn check_consistent(prev: &Stage, next: &Stage, t: usize) -> Result<()> {
    if next.period % prev.period != 0 {
        return Err(Error::Invariant(format!(
            "period {} of stage {t} is not a multiple of {}",
            next.period, prev.period
        )));
    }
    let n = prev.period as usize;
    for (j, &s) in next.word.iter().enumerate() {
        let old = prev.word[j % n];
        if old != HOLE && old != s {
            return Err(Error::Invariant(format!(
                "stage {t} changes position {j} defined at the previous stage"
            )));
        }
    }
    Ok(())
}

/// Parses a word over `glyphs` with `?` for holes.
pub fn parse_word(glyphs: &str, word: &str) -> Result<Stage> {
    let table: Vec<char> = glyphs.chars().collect();
    let codes = word
        .chars()
        .map(|c| {
            if c == HOLE_GLYPH {
                Ok(HOLE)
            } else {
                table
                    .iter()
                    .position(|&g| g == c)
                    .map(|p| p as u32)
                    .ok_or(Error::Parse {
                        line: 1,
                        msg: format!("glyph {c:?} not in alphabet {glyphs:?}"),
                    })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Stage::new(codes))
}
