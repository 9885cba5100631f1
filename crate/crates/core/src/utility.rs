//! Budget-threshold utility `U(W, β) = min(W, β)` and two estimators of its
//! expectation under GED returns.
//!
//! With zero initial wealth, holding `h` and return `r`, wealth is `W = h·r`
//! and the budget is the expected wealth `β = h·α`, where `α` is the location
//! of the return distribution.

use crate::error::{Error, Result};
use crate::exec::{stream_chunks, Execution, STREAM_CHUNK};
use crate::ged::{check_finite, chunk_rng, GedParams};
use crate::quadrature::QuadratureSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetUtility {
    pub budget: f64,
}

impl BudgetUtility {
    pub fn new(budget: f64) -> Result<Self> {
        check_finite("budget", budget)?;
        Ok(BudgetUtility { budget })
    }

    pub fn eval(&self, wealth: f64) -> f64 {
        utility(self.budget, wealth)
    }
}

/// `β` if `W ≥ β`, else `W`.
#[inline]
pub fn utility(budget: f64, wealth: f64) -> f64 {
    if wealth >= budget {
        budget
    } else {
        wealth
    }
}

/// A position `holding` in an asset with expected return `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WealthModel {
    pub holding: f64,
    pub alpha: f64,
}

impl WealthModel {
    pub fn wealth(&self, r: f64) -> f64 {
        self.holding * r
    }

    pub fn budget(&self) -> f64 {
        self.holding * self.alpha
    }

    pub fn utility(&self, r: f64) -> f64 {
        utility(self.budget(), self.wealth(r))
    }
}

/// `∫ U(h r, h α) f(r | α, σ, κ) dr` by adaptive quadrature, with `α = p.mu()`.
pub fn expected_utility_quadrature(h: f64, p: &GedParams, spec: &QuadratureSpec) -> Result<f64> {
    check_finite("holding", h)?;
    let m = WealthModel {
        holding: h,
        alpha: p.mu(),
    };
    p.expect(|r| m.utility(r), spec)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0.0 {
            return other;
        }
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * other.n / n,
            m2: self.m2 + other.m2 + d * d * self.n * other.n / n,
        }
    }
}

/// Sample mean and standard error of `U(h r_i, h α)` over `n` seeded draws.
pub fn expected_utility_monte_carlo(
    h: f64,
    p: &GedParams,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    expected_utility_monte_carlo_with(h, p, n, seed, Execution::default())
}

/// Draws are identical to [`GedParams::sample_with`] for the same seed.
pub fn expected_utility_monte_carlo_with(
    h: f64,
    p: &GedParams,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    check_finite("holding", h)?;
    if n < 2 {
        return Err(Error::domain("Monte Carlo needs at least two draws"));
    }
    let m = WealthModel {
        holding: h,
        alpha: p.mu(),
    };
    let gamma = p.gamma_sampler();
    let parts = exec.map_slice(&stream_chunks(n), |&(chunk, len)| {
        let mut rng = chunk_rng(seed, chunk);
        let mut acc = Moments::default();
        for _ in 0..len {
            acc.push(m.utility(p.draw(&gamma, &mut rng)));
        }
        acc
    });
    debug_assert!(parts.len() == n.div_ceil(STREAM_CHUNK));
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = total.m2 / (total.n - 1.0);
    Ok(MonteCarloEstimate {
        estimate: total.mean,
        std_error: (var / total.n).sqrt(),
        n,
    })
}

/// Lower partial moment of order 1 and upper partial moment of order 0 of
/// wealth `W = h r` about the budget `h α`, both as partial expectations.
///
/// `E[U] = h α + lpm1` holds exactly; `upm0` is the probability that wealth
/// exceeds the budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialMoments {
    pub lpm1: f64,
    pub upm0: f64,
}

pub fn partial_moment_decomposition(
    h: f64,
    p: &GedParams,
    spec: &QuadratureSpec,
) -> Result<PartialMoments> {
    check_finite("holding", h)?;
    if h == 0.0 {
        return Err(Error::domain("decomposition needs a non-zero holding"));
    }
    let budget = h * p.mu();
    let wealth = GedParams::new(budget, h.abs() * p.sigma(), p.kappa())?;
    Ok(PartialMoments {
        lpm1: wealth.lower_partial_moment_1(budget, spec)?,
        upm0: wealth.upper_partial_moment_0(budget, spec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn p(mu: f64, sigma: f64, kappa: f64) -> GedParams {
        GedParams::new(mu, sigma, kappa).unwrap()
    }

    #[test]
    fn utility_branches() {
        assert_eq!(utility(1.0, 5.0), 1.0);
        assert_eq!(utility(1.0, -2.0), -2.0);
        assert_eq!(utility(0.0, 0.0), 0.0);
        assert_eq!(utility(1.0, 1.0), 1.0);
        let u = BudgetUtility::new(-0.5).unwrap();
        assert_eq!(u.eval(0.0), -0.5);
        assert!(BudgetUtility::new(f64::NAN).is_err());
    }

    #[test]
    fn utility_is_monotone_and_capped() {
        let mut prev = f64::NEG_INFINITY;
        for i in -100..=100 {
            let w = i as f64 * 0.05;
            let u = utility(1.0, w);
            assert!(u >= prev);
            assert!(u <= 1.0);
            assert_eq!(u, w.min(1.0));
            prev = u;
        }
    }

    #[test]
    fn quadrature_examples() {
        let spec = QuadratureSpec::tight();
        let g = p(0.1, 0.2, 0.5);
        assert_eq!(expected_utility_quadrature(0.0, &g, &spec).unwrap(), 0.0);
        let v = expected_utility_quadrature(1.0, &g, &spec).unwrap();
        assert!((v - (0.1 - 0.2 / (2.0 * PI).sqrt())).abs() < 1e-12, "{v}");
        let v = expected_utility_quadrature(-1.0, &g, &spec).unwrap();
        assert!((v - (-0.1 - 0.2 / (2.0 * PI).sqrt())).abs() < 1e-12, "{v}");
    }

    #[test]
    fn positive_homogeneity() {
        let spec = QuadratureSpec::tight();
        let g = p(0.03, 0.2, 0.75);
        for h in [-2.0, 0.5, 3.0] {
            let base = expected_utility_quadrature(h, &g, &spec).unwrap();
            for lambda in [0.1, 2.0, 7.5] {
                let scaled = expected_utility_quadrature(lambda * h, &g, &spec).unwrap();
                assert!((scaled - lambda * base).abs() < 1e-11 * (1.0 + scaled.abs()));
            }
        }
    }

    #[test]
    fn monte_carlo_zero_holding() {
        let e = expected_utility_monte_carlo(0.0, &p(0.1, 0.2, 0.5), 1000, 3).unwrap();
        assert_eq!((e.estimate, e.std_error), (0.0, 0.0));
    }

    #[test]
    fn monte_carlo_modes_agree() {
        let g = p(0.1, 0.2, 0.75);
        let n = 3 * STREAM_CHUNK + 17;
        let a = expected_utility_monte_carlo_with(1.0, &g, n, 9, Execution::Sequential).unwrap();
        let b = expected_utility_monte_carlo_with(1.0, &g, n, 9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(expected_utility_monte_carlo(1.0, &g, 1, 9).is_err());
    }

    #[test]
    fn monte_carlo_matches_sample_stream() {
        let g = p(0.1, 0.2, 0.75);
        let n = 5000;
        let xs = g.sample(n, 11).unwrap();
        let us: Vec<f64> = xs.iter().map(|&r| utility(0.1, r)).collect();
        let mean = us.iter().sum::<f64>() / n as f64;
        let e = expected_utility_monte_carlo(1.0, &g, n, 11).unwrap();
        assert!((e.estimate - mean).abs() < 1e-14);
    }

    #[test]
    fn decomposition() {
        let spec = QuadratureSpec::tight();
        let d = partial_moment_decomposition(1.0, &p(0.0, 1.0, 0.5), &spec).unwrap();
        assert_relative_eq!(d.lpm1, -1.0 / (2.0 * PI).sqrt(), max_relative = 1e-10);
        assert_eq!(d.upm0, 0.5);
        for (h, a, kappa) in [(2.0, 0.05, 0.75), (-3.0, 0.02, 1.0), (0.5, -0.1, 0.6)] {
            let g = p(a, 0.2, kappa);
            let d = partial_moment_decomposition(h, &g, &spec).unwrap();
            let eu = expected_utility_quadrature(h, &g, &spec).unwrap();
            assert!((d.lpm1 + h * a - eu).abs() < 1e-9);
            assert_eq!(d.upm0, 0.5);
        }
        assert!(partial_moment_decomposition(0.0, &p(0.0, 1.0, 0.5), &spec).is_err());
    }
}
