use super::skeleton::{Completion, Stage, ToeplitzSkeleton, HOLE};
use crate::error::{Error, Result};

/// Alphabet size of the radius-`m` window code, `|A|^(2m+1)`.
pub fn window_alphabet_size(alphabet_size: u32, m: u32) -> Result<u32> {
    (alphabet_size as u64)
        .checked_pow(2 * m + 1)
        .filter(|&s| s < HOLE as u64)
        .map(|s| s as u32)
        .ok_or(Error::Overflow("window alphabet size"))
}

/// Code of `x(j-m) .. x(j+m)` in base `|A|`, `x(j-m)` most significant.
#[inline]
pub fn window_code(word: &[u32], j: usize, m: usize, base: u32) -> Option<u32> {
    let n = word.len();
    let mut code = 0u32;
    for i in 0..=2 * m {
        let s = word[(j + n * (m / n + 1) + i - m) % n];
        if s == HOLE {
            return None;
        }
        code = code * base + s;
    }
    Some(code)
}

/// x^(m): same periods, position `j` defined at stage `t` iff all of
/// `j-m..=j+m` are, with the window code as symbol.
pub fn window(sk: &ToeplitzSkeleton, m: u32) -> Result<ToeplitzSkeleton> {
    let size = window_alphabet_size(sk.alphabet_size(), m)?;
    let (mu, base) = (m as usize, sk.alphabet_size());
    let stages = sk
        .stages()
        .iter()
        .map(|s| {
            Stage::new(
                (0..s.word.len())
                    .map(|j| window_code(&s.word, j, mu, base).unwrap_or(HOLE))
                    .collect(),
            )
        })
        .collect();
    let resolved = (0..sk.resolved().len())
        .map(|j| window_code(sk.resolved(), j, mu, base).unwrap())
        .collect();
    let glyphs = if m == 0 {
        sk.glyphs().map(|g| g.to_vec())
    } else {
        None
    };
    let completion = if m == 0 {
        sk.completion()
    } else {
        Completion::Windowed
    };
    let mut out = ToeplitzSkeleton::build(size, glyphs, stages, completion, Some(resolved))?;
    for (k, v) in sk.metadata() {
        if k != "completion" {
            out.set_meta(k, v);
        }
    }
    out.set_meta("window_radius", m);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{parse_word, random_skeleton, RandomSkeletonConfig};

    #[test]
    fn radius_zero_keeps_holes() {
        let sk = ToeplitzSkeleton::new("ab", vec![parse_word("ab", "ab?").unwrap()]).unwrap();
        let w = window(&sk, 0).unwrap();
        assert_eq!(w.stages()[0].word, sk.stages()[0].word);
        assert_eq!(w.resolved(), sk.resolved());
    }

    #[test]
    fn radius_one_hand_trace() {
        let sk = ToeplitzSkeleton::new("ab", vec![parse_word("ab", "ab?").unwrap()]).unwrap();
        let w = window(&sk, 1).unwrap();
        // every position sees the hole at 2 within distance 1 (cyclically)
        assert_eq!(w.stages()[0].hole_count(), 3);
        assert_eq!(w.alphabet_size(), 8);
        // completed x = "aba": window at 0 is (x(-1), x(0), x(1)) = (a, a, b)
        assert_eq!(w.eval(0), 0b001);
    }

    #[test]
    fn hole_inequality_and_eval_agree() {
        for seed in 0..40 {
            let sk = random_skeleton(seed, &RandomSkeletonConfig::default());
            for m in 0..=8u32 {
                let Ok(w) = window(&sk, m) else { continue };
                for (a, b) in sk.stages().iter().zip(w.stages()) {
                    assert!(b.hole_count() <= (2 * m as u64 + 1) * a.hole_count());
                }
                let base = sk.alphabet_size() as u64;
                for j in -30..30i64 {
                    let mut code = 0u64;
                    for i in -(m as i64)..=m as i64 {
                        code = code * base + sk.eval(j + i) as u64;
                    }
                    assert_eq!(w.eval(j) as u64, code);
                }
            }
        }
    }
}
