use rand::Rng;

use crate::error::{Error, Result};
use crate::ged::{check_finite, chunk_rng, GedParams};

use super::series::ReturnSeries;

/// Stream used for the alpha draws; sample chunks use streams from 0 up.
const ALPHA_STREAM: usize = 1 << 40;

/// `n` i.i.d. draws from `p`, indexed `0..n`.
pub fn simulate_iid(p: &GedParams, n: usize, seed: u64) -> Result<ReturnSeries> {
    ReturnSeries::from_returns(p.sample(n, seed)?)
}

/// A series with known conditional moments.
///
/// `alpha_t = μ + spread · s · u_t` with `u_t ~ U(-1, 1)`, and
/// `r_{t+1} = alpha_t + ε_{t+1}` where `ε` are the draws of
/// `GED(0, σ, κ)` for `seed` and `s` is their standard deviation. The
/// series carries `alpha_t` and `s` as supplied moments; `r_0 = μ + ε_0`.
pub fn simulate_conditional(
    p: &GedParams,
    alpha_spread: f64,
    n: usize,
    seed: u64,
) -> Result<ReturnSeries> {
    check_finite("alpha spread", alpha_spread)?;
    if alpha_spread < 0.0 {
        return Err(Error::domain("alpha spread must be non-negative"));
    }
    let noise = p.with_mu(0.0)?.sample(n, seed)?;
    let s = p.std_dev();
    let mut rng = chunk_rng(seed, ALPHA_STREAM);
    let alpha: Vec<f64> = (0..n)
        .map(|_| p.mu() + alpha_spread * s * rng.random_range(-1.0..1.0))
        .collect();
    let returns = (0..n)
        .map(|t| if t == 0 { p.mu() } else { alpha[t - 1] } + noise[t])
        .collect();
    ReturnSeries::from_returns(returns)?.with_moments(alpha, vec![s; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditional_structure() {
        let p = GedParams::new(0.0, 0.01, 0.75).unwrap();
        let s = simulate_conditional(&p, 1.0, 1000, 5).unwrap();
        let (alpha, sd) = s.supplied_moments().unwrap();
        assert!(sd.iter().all(|&v| v == p.std_dev()));
        assert!(alpha.iter().all(|a| a.abs() < p.std_dev()));
        let noise = p.sample(1000, 5).unwrap();
        for t in 1..1000 {
            assert_eq!(s.returns()[t], alpha[t - 1] + noise[t]);
        }
        assert_eq!(s, simulate_conditional(&p, 1.0, 1000, 5).unwrap());
        assert!(simulate_conditional(&p, -1.0, 10, 5).is_err());
    }
}
