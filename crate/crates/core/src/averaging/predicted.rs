use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::observable::ObservableSpec;
use crate::arith::{euler_phi, gcd};
use crate::error::Result;
use crate::numeric::compensated_sum;
use crate::polyres::{residue_profile, PolynomialSpec};
use crate::toeplitz::{window, ToeplitzSkeleton, HOLE};

/// Limit predicted from the defined positions of one stage.
///
/// `hole_radius` is the guarantee contributed by the holes of that stage
/// (not sharp); the finite-`N` terms are added by the `*_error_bound`
/// methods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub stage: usize,
    pub period: u64,
    pub value: f64,
    pub holes: u64,
    pub hole_radius: f64,
    pub sup_norm: f64,
}

impl Prediction {
    /// `hole_radius + ||F|| log(n_k) / pi(N)`: primes dividing `n_k` sit
    /// outside the coprime classes.
    pub fn prime_error_bound(&self, pi_n: u64) -> f64 {
        self.hole_radius + self.sup_norm * (self.period as f64).ln().max(0.0) / pi_n.max(1) as f64
    }

    /// `hole_radius + ||F|| n_k / N`: incomplete periods of `m`.
    pub fn poly_error_bound(&self, n: u64) -> f64 {
        self.hole_radius + self.sup_norm * self.period as f64 / n.max(1) as f64
    }
}

/// The skeleton and observable on which the stage sums run: the window
/// recoding when `F` looks beyond the zero coordinate.
fn reduce<'a>(
    sk: &'a ToeplitzSkeleton,
    f: &'a ObservableSpec,
) -> Result<(Cow<'a, ToeplitzSkeleton>, Cow<'a, ObservableSpec>)> {
    f.check_skeleton(sk)?;
    if f.radius() == 0 {
        Ok((Cow::Borrowed(sk), Cow::Borrowed(f)))
    } else {
        Ok((
            Cow::Owned(window(sk, f.radius())?),
            Cow::Owned(f.flattened()?),
        ))
    }
}

/// `(1/phi(n_k)) sum_{(a-r, n_k)=1, x_k(a) != ?} F(S^a x)`.
pub fn predicted_prime_limit(
    sk: &ToeplitzSkeleton,
    k: usize,
    f: &ObservableSpec,
    r: i64,
) -> Result<Prediction> {
    let (w, g) = reduce(sk, f)?;
    let stage = w.stage(k)?;
    let n = stage.period;
    let shift = r.rem_euclid(n as i64) as u64;
    let value = compensated_sum(
        stage
            .word
            .iter()
            .enumerate()
            .filter(|&(a, &s)| s != HOLE && gcd((a as u64 + n - shift) % n, n) == 1)
            .map(|(_, &s)| g.table()[s as usize]),
    );
    let phi = euler_phi(n);
    let holes = stage.hole_count();
    let sup = f.sup_norm();
    Ok(Prediction {
        stage: k,
        period: n,
        value: value / phi as f64,
        holes,
        hole_radius: 8.0 * holes as f64 / phi as f64 * sup,
        sup_norm: sup,
    })
}

/// `(1/n_k) sum_{a-r in R_{n_k}, x_k(a) != ?} rho(n_k, a-r) F(S^a x)`.
pub fn predicted_poly_limit(
    sk: &ToeplitzSkeleton,
    p: &PolynomialSpec,
    k: usize,
    f: &ObservableSpec,
    r: i64,
) -> Result<Prediction> {
    let (w, g) = reduce(sk, f)?;
    let stage = w.stage(k)?;
    let n = stage.period;
    let profile = residue_profile(p, n);
    let value = compensated_sum(
        stage
            .word
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s != HOLE)
            .map(|(a, &s)| profile.rho(a as i64 - r) as f64 * g.table()[s as usize]),
    );
    let holes = stage.hole_count();
    let sup = f.sup_norm();
    Ok(Prediction {
        stage: k,
        period: n,
        value: value / n as f64,
        holes,
        hole_radius: 8.0 * holes as f64 * profile.rho_max() as f64 / n as f64 * sup,
        sup_norm: sup,
    })
}
