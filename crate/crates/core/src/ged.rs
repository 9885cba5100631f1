//! The Generalized Error distribution in the location/scale/kurtosis
//! parameterisation
//!
//! ```text
//! f(r | μ, σ, κ) = exp(-½ |(r - μ)/σ|^(1/κ)) / (2^(κ+1) σ Γ(κ+1))
//! ```
//!
//! `κ = ½` is the Normal distribution with standard deviation `σ` and
//! `κ = 1` is the Laplace distribution with scale `2σ`. Larger `κ` means
//! fatter tails.
//!
//! Integrals against the density run on the finite support
//! `|r - μ| ≤ σ (2 t_max)^κ`, where `e^(-t_max) = 10^-18`; outside it the
//! density is negligible at double precision.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::exec::{Execution, STREAM_CHUNK};
use crate::quadrature::{integrate_points, QuadratureSpec};
use crate::special::{ln_gamma, log_gamma_ratio};

/// Accepted kurtosis-parameter domain.
pub const KAPPA_MIN: f64 = 0.1;
pub const KAPPA_MAX: f64 = 2.0;

/// Range of `κ` in which the model is usually applied. Values outside are
/// accepted with a warning.
pub const KAPPA_REGION: (f64, f64) = (0.5, 1.0);

/// `t_max` such that `exp(-t_max) = 1e-18`.
const T_MAX: f64 = 18.0 * std::f64::consts::LN_10;

/// Panel edges in `t = ½|z|^(1/κ)` units used to seed adaptive integration.
const T_BREAKS: [f64; 6] = [0.0, 0.5, 2.0, 8.0, 20.0, T_MAX];

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if !(KAPPA_MIN..=KAPPA_MAX).contains(&kappa) {
        return Err(Error::domain(format!(
            "kappa must lie in [{KAPPA_MIN}, {KAPPA_MAX}], got {kappa}"
        )));
    }
    if !(KAPPA_REGION.0..=KAPPA_REGION.1).contains(&kappa) {
        warn!("kappa = {kappa} is outside the usual region [0.5, 1]");
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

pub(crate) fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

/// Variance of a unit-scale GED: `2^(2κ) Γ(3κ)/Γ(κ)`.
pub fn unit_variance(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok((2.0 * kappa * std::f64::consts::LN_2 + log_gamma_ratio(&[3.0 * kappa], &[kappa])).exp())
}

/// Location `mu`, scale `sigma` and kurtosis parameter `kappa`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GedParams {
    mu: f64,
    sigma: f64,
    kappa: f64,
    log_norm: f64,
}

impl GedParams {
    pub fn new(mu: f64, sigma: f64, kappa: f64) -> Result<Self> {
        check_finite("mu", mu)?;
        check_positive("sigma", sigma)?;
        check_kappa(kappa)?;
        let log_norm = (kappa + 1.0) * std::f64::consts::LN_2 + sigma.ln() + ln_gamma(kappa + 1.0);
        Ok(GedParams {
            mu,
            sigma,
            kappa,
            log_norm,
        })
    }

    /// Parameters whose standard deviation (rather than scale) is `s`.
    pub fn from_std_dev(mu: f64, s: f64, kappa: f64) -> Result<Self> {
        check_positive("s", s)?;
        let sigma = s / unit_variance(kappa)?.sqrt();
        GedParams::new(mu, sigma, kappa)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        GedParams::new(mu, self.sigma, self.kappa)
    }

    pub fn log_pdf(&self, r: f64) -> f64 {
        let z = ((r - self.mu) / self.sigma).abs();
        -0.5 * z.powf(1.0 / self.kappa) - self.log_norm
    }

    pub fn pdf(&self, r: f64) -> f64 {
        self.log_pdf(r).exp()
    }

    pub fn variance(&self) -> f64 {
        let unit = (2.0 * self.kappa * std::f64::consts::LN_2
            + log_gamma_ratio(&[3.0 * self.kappa], &[self.kappa]))
        .exp();
        self.sigma * self.sigma * unit
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Half-width of the integration support around `mu`.
    pub fn tail_cutoff(&self) -> f64 {
        self.sigma * (2.0 * T_MAX).powf(self.kappa)
    }

    /// Sorted panel edges covering `[lo, hi]` (clipped to the support),
    /// with `mu` and the standard breakpoints included where they fall inside.
    fn panels(&self, lo: f64, hi: f64) -> Vec<f64> {
        let c = self.tail_cutoff();
        let lo = lo.max(self.mu - c);
        let hi = hi.min(self.mu + c);
        if hi <= lo {
            return Vec::new();
        }
        let mut pts = vec![lo, hi];
        for t in T_BREAKS {
            let d = self.sigma * (2.0 * t).powf(self.kappa);
            for x in [self.mu - d, self.mu + d] {
                if x > lo && x < hi {
                    pts.push(x);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫_lo^hi g(r) f(r) dr`, with the limits clipped to the support.
    pub fn integrate_weighted<G: Fn(f64) -> f64>(
        &self,
        g: G,
        lo: f64,
        hi: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        let pts = self.panels(lo, hi);
        if pts.len() < 2 {
            return Ok(0.0);
        }
        Ok(integrate_points(|r| g(r) * self.pdf(r), &pts, spec)?.value)
    }

    /// `E[g(r)]` by quadrature over the whole support.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, spec: &QuadratureSpec) -> Result<f64> {
        self.integrate_weighted(g, f64::NEG_INFINITY, f64::INFINITY, spec)
    }

    /// `E|r - μ|`, evaluated by quadrature on `[μ, ∞)` and doubled.
    pub fn mean_abs_dev(&self, spec: &QuadratureSpec) -> Result<f64> {
        let mu = self.mu;
        Ok(2.0 * self.integrate_weighted(|r| r - mu, mu, f64::INFINITY, spec)?)
    }

    /// Partial expectation `∫_{-∞}^{a} (r - a) f(r) dr` (not divided by `P(r ≤ a)`).
    pub fn lower_partial_moment_1(&self, a: f64, spec: &QuadratureSpec) -> Result<f64> {
        check_finite("reference point", a)?;
        self.integrate_weighted(|r| r - a, f64::NEG_INFINITY, a, spec)
    }

    /// Partial expectation `∫_a^∞ (r - a) f(r) dr`.
    pub fn upper_partial_moment_1(&self, a: f64, spec: &QuadratureSpec) -> Result<f64> {
        check_finite("reference point", a)?;
        self.integrate_weighted(|r| r - a, a, f64::INFINITY, spec)
    }

    /// `P(r > a)`.
    pub fn upper_partial_moment_0(&self, a: f64, spec: &QuadratureSpec) -> Result<f64> {
        check_finite("reference point", a)?;
        if a == self.mu {
            return Ok(0.5);
        }
        if a > self.mu {
            Ok(0.5 - self.integrate_weighted(|_| 1.0, self.mu, a, spec)?)
        } else {
            Ok(0.5 + self.integrate_weighted(|_| 1.0, a, self.mu, spec)?)
        }
    }

    /// Distribution function by quadrature of the density from `mu`.
    pub fn cdf(&self, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        Ok(1.0 - self.upper_partial_moment_0(x, spec)?)
    }

    /// Distribution function at each point of the non-decreasing `xs`,
    /// accumulated panel by panel so each increment is a short integral.
    pub fn cdf_sorted(&self, xs: &[f64], spec: &QuadratureSpec) -> Result<Vec<f64>> {
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("cdf_sorted needs non-decreasing points"));
        }
        let mut out = Vec::with_capacity(xs.len());
        let Some(&first) = xs.first() else {
            return Ok(out);
        };
        let mut acc = self.cdf(first, spec)?;
        out.push(acc);
        for w in xs.windows(2) {
            if w[1] > w[0] {
                acc += self.integrate_weighted(|_| 1.0, w[0], w[1], spec)?;
            }
            out.push(acc.min(1.0));
        }
        Ok(out)
    }

    /// `n` seeded draws. See [`GedParams::sample_with`].
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.sample_with(n, seed, Execution::default())
    }

    /// `n` draws determined entirely by `seed`.
    ///
    /// Draw `i` belongs to chunk `i / 65536`; each chunk uses a ChaCha8
    /// generator seeded with `seed` and switched to stream `chunk`. A draw
    /// takes `G ~ Gamma(κ, 1)`, then a sign bit, and returns
    /// `μ ± σ (2G)^κ`. The output does not depend on `exec`.
    pub fn sample_with(&self, n: usize, seed: u64, exec: Execution) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::domain("sample size must be at least 1"));
        }
        let gamma = Gamma::new(self.kappa, 1.0).map_err(|e| Error::domain(e.to_string()))?;
        let mut out = vec![0.0; n];
        exec.fill_chunks(&mut out, STREAM_CHUNK, |chunk, slot| {
            let mut rng = chunk_rng(seed, chunk);
            for x in slot.iter_mut() {
                *x = self.draw(&gamma, &mut rng);
            }
        });
        Ok(out)
    }

    #[inline]
    pub(crate) fn draw<R: Rng>(&self, gamma: &Gamma<f64>, rng: &mut R) -> f64 {
        let g: f64 = gamma.sample(rng);
        let z = (2.0 * g).powf(self.kappa);
        if rng.random::<bool>() {
            self.mu + self.sigma * z
        } else {
            self.mu - self.sigma * z
        }
    }

    pub(crate) fn gamma_sampler(&self) -> Gamma<f64> {
        Gamma::new(self.kappa, 1.0).expect("kappa validated at construction")
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}
