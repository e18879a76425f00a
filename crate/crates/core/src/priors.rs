//! Expected utilities and non-informative utility factors.
//!
//! For a set of lotteries with all-nonnegative expected utilities the utility
//! factor is `f_n ∝ U_n^α`; for all-negative utilities it is `f_n ∝ |U_n|^-γ`.
//! These are the minimizers of the corresponding information functionals on
//! the probability simplex. With `α = γ = 1` they reduce to Luce-form ratios.

use serde::{Deserialize, Serialize};

use crate::error::{QdtError, Result};

/// Tolerance on `Σ probs = 1` for a lottery.
pub const LOTTERY_SUM_TOL: f64 = 1e-9;

/// Payoffs `x_i` with probabilities `p(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    payoffs: Vec<f64>,
    probs: Vec<f64>,
}

impl Lottery {
    pub fn new(payoffs: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if payoffs.is_empty() {
            return Err(QdtError::Domain("a lottery needs at least one payoff".into()));
        }
        if payoffs.len() != probs.len() {
            return Err(QdtError::Domain(format!(
                "{} payoffs but {} probabilities",
                payoffs.len(),
                probs.len()
            )));
        }
        if payoffs.iter().chain(&probs).any(|x| !x.is_finite()) {
            return Err(QdtError::Domain("lottery has non-finite entries".into()));
        }
        if probs.iter().any(|&p| p < 0.0) {
            return Err(QdtError::Validation("lottery probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > LOTTERY_SUM_TOL {
            return Err(QdtError::Validation(format!(
                "lottery probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { payoffs, probs })
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum UtilityFunction {
    /// `u(x) = x`.
    #[default]
    Linear,
    /// `u(x) = sign(x) |x|^exponent`, `exponent > 0`.
    Power { exponent: f64 },
}

impl UtilityFunction {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(QdtError::Domain(format!(
                "power utility exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self::Power { exponent })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Linear => x,
            Self::Power { exponent } => x.signum() * x.abs().powf(exponent),
        }
    }
}

/// `U(L) = Σ_i u(x_i) p(x_i)`.
pub fn expected_utility(lottery: &Lottery, u: &UtilityFunction) -> f64 {
    lottery
        .payoffs
        .iter()
        .zip(&lottery.probs)
        .map(|(&x, &p)| u.eval(x) * p)
        .sum()
}

/// Exponents of the gain and loss utility factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityFactorConfig {
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for UtilityFactorConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            gamma: 1.0,
        }
    }
}

impl UtilityFactorConfig {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        check_exponent("alpha", alpha)?;
        check_exponent("gamma", gamma)?;
        Ok(Self { alpha, gamma })
    }
}

fn check_exponent(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(QdtError::Domain(format!("{name} must be positive, got {value}")))
    }
}

/// Normalized utility factors, one per prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFactors(Vec<f64>);

impl UtilityFactors {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Normalized `base_n^exponent`.
///
/// Evaluated directly so that `exponent = 1` gives exactly `base_n / Σ base_m`;
/// falls back to log space when the powers overflow or all underflow.
fn power_weights(bases: &[f64], exponent: f64) -> Vec<f64> {
    let weights: Vec<f64> = bases
        .iter()
        .map(|&b| if exponent == 1.0 { b } else { b.powf(exponent) })
        .collect();
    let total: f64 = weights.iter().sum();
    if total.is_finite() && total > 0.0 {
        return weights.into_iter().map(|w| w / total).collect();
    }
    let logs: Vec<f64> = bases.iter().map(|&b| exponent * b.ln()).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|&lw| (lw - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

fn check_utilities(utilities: &[f64]) -> Result<()> {
    if utilities.is_empty() {
        return Err(QdtError::Degenerate("no utilities given".into()));
    }
    if utilities.iter().any(|u| !u.is_finite()) {
        return Err(QdtError::Domain("utilities must be finite".into()));
    }
    Ok(())
}

/// `f_n = U_n^α / Σ_m U_m^α` for nonnegative utilities.
///
/// A zero utility gets a zero factor and stays in the set.
pub fn utility_factors_gains(utilities: &[f64], alpha: f64) -> Result<UtilityFactors> {
    check_utilities(utilities)?;
    check_exponent("alpha", alpha)?;
    if let Some(u) = utilities.iter().find(|&&u| u < 0.0) {
        return Err(QdtError::SignDomain(format!(
            "gain factors need nonnegative utilities, got {u}"
        )));
    }
    if utilities.iter().all(|&u| u == 0.0) {
        return Err(QdtError::Degenerate("all utilities are zero".into()));
    }
    Ok(UtilityFactors(power_weights(utilities, alpha)))
}

/// `f_n = |U_n|^-γ / Σ_m |U_m|^-γ` for strictly negative utilities.
pub fn utility_factors_losses(utilities: &[f64], gamma: f64) -> Result<UtilityFactors> {
    check_utilities(utilities)?;
    check_exponent("gamma", gamma)?;
    if let Some(u) = utilities.iter().find(|&&u| u >= 0.0) {
        return Err(QdtError::SignDomain(format!(
            "loss factors need strictly negative utilities, got {u}"
        )));
    }
    let inverse: Vec<f64> = utilities.iter().map(|&u| 1.0 / u.abs()).collect();
    Ok(UtilityFactors(power_weights(&inverse, gamma)))
}

/// Picks the gain or loss rule from the signs of `utilities`; mixed sets are rejected.
pub fn utility_factors(utilities: &[f64], config: &UtilityFactorConfig) -> Result<UtilityFactors> {
    check_utilities(utilities)?;
    let all_gains = utilities.iter().all(|&u| u >= 0.0);
    let all_losses = utilities.iter().all(|&u| u < 0.0);
    match (all_gains, all_losses) {
        (true, _) => utility_factors_gains(utilities, config.alpha),
        (_, true) => utility_factors_losses(utilities, config.gamma),
        _ => Err(QdtError::MixedSign),
    }
}

fn entropy_and_constraint(f: &[f64], lambda: f64) -> f64 {
    let neg_entropy: f64 = f
        .iter()
        .map(|&x| if x == 0.0 { 0.0 } else { x * x.ln() })
        .sum();
    let total: f64 = f.iter().sum();
    neg_entropy + lambda * (total - 1.0)
}

fn check_functional_args(f: &[f64], utilities: &[f64]) -> Result<()> {
    if f.len() != utilities.len() {
        return Err(QdtError::Domain(format!(
            "{} factors but {} utilities",
            f.len(),
            utilities.len()
        )));
    }
    check_utilities(utilities)?;
    if f.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(QdtError::Domain("factors must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Information functional for gains:
/// `Σ f ln f + λ(Σf - 1) + α Σ f Λ_n` with `Λ_n = -ln U_n`.
///
/// The expected log-likelihood constant is taken as zero; it shifts the value
/// without moving the minimizer. Returns `+∞` when a zero-utility prospect
/// carries positive weight.
pub fn information_functional_gains(f: &[f64], utilities: &[f64], lambda: f64, alpha: f64) -> Result<f64> {
    check_functional_args(f, utilities)?;
    if let Some(u) = utilities.iter().find(|&&u| u < 0.0) {
        return Err(QdtError::SignDomain(format!("negative utility {u} in gain functional")));
    }
    if utilities.iter().all(|&u| u == 0.0) {
        return Err(QdtError::Degenerate("all utilities are zero".into()));
    }
    let mut likelihood = 0.0;
    for (&x, &u) in f.iter().zip(utilities) {
        if x == 0.0 {
            continue;
        }
        if u == 0.0 {
            return Ok(f64::INFINITY);
        }
        likelihood += x * -u.ln();
    }
    Ok(entropy_and_constraint(f, lambda) + alpha * likelihood)
}

/// Information functional for losses:
/// `Σ f ln f + λ(Σf - 1) + γ(0 - Σ f Λ_n)` with `Λ_n = -ln|U_n|`.
pub fn information_functional_losses(f: &[f64], utilities: &[f64], lambda: f64, gamma: f64) -> Result<f64> {
    check_functional_args(f, utilities)?;
    if let Some(u) = utilities.iter().find(|&&u| u >= 0.0) {
        return Err(QdtError::SignDomain(format!("nonnegative utility {u} in loss functional")));
    }
    let likelihood: f64 = f.iter().zip(utilities).map(|(&x, &u)| x * -u.abs().ln()).sum();
    Ok(entropy_and_constraint(f, lambda) - gamma * likelihood)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn expected_utility_examples() {
        let lin = UtilityFunction::Linear;
        assert_eq!(expected_utility(&Lottery::new(vec![10.0], vec![1.0]).unwrap(), &lin), 10.0);
        assert_eq!(
            expected_utility(&Lottery::new(vec![0.0, 100.0], vec![0.5, 0.5]).unwrap(), &lin),
            50.0
        );
        // -2*0.2 + 4*0.3 + 1*0.5 = 1.3
        let l = Lottery::new(vec![-2.0, 4.0, 1.0], vec![0.2, 0.3, 0.5]).unwrap();
        assert!((expected_utility(&l, &lin) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn power_utility_keeps_sign() {
        let u = UtilityFunction::power(0.5).unwrap();
        assert_eq!(u.eval(4.0), 2.0);
        assert_eq!(u.eval(-9.0), -3.0);
        assert!(UtilityFunction::power(0.0).is_err());
    }

    #[test]
    fn lottery_validation() {
        assert!(Lottery::new(vec![], vec![]).is_err());
        assert!(matches!(Lottery::new(vec![1.0], vec![0.5, 0.5]), Err(QdtError::Domain(_))));
        assert!(Lottery::new(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(Lottery::new(vec![1.0, 2.0], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn gain_factor_examples() {
        assert_close(utility_factors_gains(&[1.0, 1.0, 1.0], 1.0).unwrap().values(), &[1.0 / 3.0; 3], 1e-15);
        assert_close(utility_factors_gains(&[1.0, 3.0], 1.0).unwrap().values(), &[0.25, 0.75], 1e-15);
        assert_close(
            utility_factors_gains(&[1.0, 2.0, 4.0], 2.0).unwrap().values(),
            &[1.0 / 21.0, 4.0 / 21.0, 16.0 / 21.0],
            1e-15,
        );
    }

    #[test]
    fn loss_factor_examples() {
        assert_close(utility_factors_losses(&[-2.0, -2.0], 1.0).unwrap().values(), &[0.5, 0.5], 1e-15);
        assert_close(utility_factors_losses(&[-1.0, -3.0], 1.0).unwrap().values(), &[0.75, 0.25], 1e-15);
        assert_close(
            utility_factors_losses(&[-1.0, -2.0, -4.0], 2.0).unwrap().values(),
            &[16.0 / 21.0, 4.0 / 21.0, 1.0 / 21.0],
            1e-15,
        );
    }

    #[test]
    fn zero_utility_gets_zero_factor() {
        let f = utility_factors_gains(&[0.0, 2.0, 6.0], 1.0).unwrap();
        assert_eq!(f.values()[0], 0.0);
        assert_close(f.values(), &[0.0, 0.25, 0.75], 1e-15);
    }

    #[test]
    fn sign_errors() {
        assert!(matches!(utility_factors_gains(&[1.0, -1.0], 1.0), Err(QdtError::SignDomain(_))));
        assert!(matches!(utility_factors_gains(&[0.0, 0.0], 1.0), Err(QdtError::Degenerate(_))));
        assert!(matches!(utility_factors_losses(&[-1.0, 0.0], 1.0), Err(QdtError::SignDomain(_))));
        assert!(matches!(
            utility_factors(&[-1.0, 2.0], &UtilityFactorConfig::default()),
            Err(QdtError::MixedSign)
        ));
        assert!(utility_factors_gains(&[1.0], 0.0).is_err());
        assert!(utility_factors_losses(&[-1.0], -1.0).is_err());
        assert!(UtilityFactorConfig::new(1.0, 0.0).is_err());
    }

    #[test]
    fn regime_dispatch() {
        let cfg = UtilityFactorConfig::default();
        assert_close(utility_factors(&[1.0, 3.0], &cfg).unwrap().values(), &[0.25, 0.75], 1e-15);
        assert_close(utility_factors(&[-1.0, -3.0], &cfg).unwrap().values(), &[0.75, 0.25], 1e-15);
    }

    #[test]
    fn unit_exponents_reduce_to_ratio_forms() {
        let u = [0.3, 7.0, 2.5, 11.0];
        let total: f64 = u.iter().sum();
        let ratio: Vec<f64> = u.iter().map(|x| x / total).collect();
        assert_eq!(utility_factors_gains(&u, 1.0).unwrap().values(), ratio.as_slice());
        let neg = [-0.3, -7.0, -2.5, -11.0];
        let inv: Vec<f64> = neg.iter().map(|x: &f64| 1.0 / x.abs()).collect();
        let total: f64 = inv.iter().sum();
        let ratio: Vec<f64> = inv.iter().map(|x| x / total).collect();
        assert_eq!(utility_factors_losses(&neg, 1.0).unwrap().values(), ratio.as_slice());
    }

    #[test]
    fn extreme_exponents_stay_finite() {
        let f = utility_factors_gains(&[1e200, 2e200], 5.0).unwrap();
        assert!((f.values()[1] - 32.0 / 33.0).abs() < 1e-12);
        let f = utility_factors_losses(&[-1e-200, -2e-200], 5.0).unwrap();
        assert!((f.values()[0] - 32.0 / 33.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_loss_drives_factor_to_zero() {
        let f = utility_factors_losses(&[-1.0, -1e300], 1.0).unwrap();
        assert!(f.values()[1] < 1e-299);
    }

    #[test]
    fn functional_on_uniform_equal_utilities() {
        let u = [3.0; 4];
        let f = [0.25; 4];
        let v = information_functional_gains(&f, &u, 0.7, 2.0).unwrap();
        let expected = -(4.0f64).ln() + 2.0 * -(3.0f64).ln();
        assert!((v - expected).abs() < 1e-14);
    }

    #[test]
    fn functional_single_prospect() {
        let v = information_functional_gains(&[1.0], &[5.0], 1.0, 1.0).unwrap();
        assert!((v + 5.0f64.ln()).abs() < 1e-15);
        let v = information_functional_losses(&[1.0], &[-5.0], 1.0, 1.0).unwrap();
        assert!((v - 5.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn functional_penalizes_weight_on_zero_utility() {
        let v = information_functional_gains(&[0.5, 0.5], &[0.0, 1.0], 0.0, 1.0).unwrap();
        assert_eq!(v, f64::INFINITY);
        let v = information_functional_gains(&[0.0, 1.0], &[0.0, 1.0], 0.0, 1.0).unwrap();
        assert!(v.is_finite());
        assert!(information_functional_gains(&[0.5], &[1.0, 2.0], 0.0, 1.0).is_err());
        assert!(information_functional_losses(&[0.5, 0.5], &[1.0, -2.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn vanishing_gamma_gives_uniform() {
        let u = [-1.0, -40.0, -0.2, -7.5];
        let f = utility_factors_losses(&u, 1e-6).unwrap();
        for x in f.values() {
            assert!((x - 0.25).abs() < 1e-5);
        }
        let at = information_functional_losses(f.values(), &u, 0.0, 1e-6).unwrap();
        let uniform = information_functional_losses(&[0.25; 4], &u, 0.0, 1e-6).unwrap();
        assert!(at <= uniform + 1e-15);
    }

    #[test]
    fn symmetric_losses_are_minimized_by_uniform() {
        let u = [-2.0; 3];
        let best = information_functional_losses(&[1.0 / 3.0; 3], &u, 0.0, 1.5).unwrap();
        for f in [[0.5, 0.25, 0.25], [0.2, 0.3, 0.5], [0.34, 0.33, 0.33]] {
            assert!(information_functional_losses(&f, &u, 0.0, 1.5).unwrap() >= best);
        }
    }

    proptest::proptest! {
        #[test]
        fn gain_factors_are_scale_invariant(u in proptest::collection::vec(0.01f64..100.0, 1..8), c in 1e-3f64..1e3, alpha in 0.1f64..4.0) {
            let scaled: Vec<f64> = u.iter().map(|x| x * c).collect();
            let a = utility_factors_gains(&u, alpha).unwrap();
            let b = utility_factors_gains(&scaled, alpha).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                proptest::prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn factors_are_monotone(u in proptest::collection::vec(0.01f64..100.0, 2..8), exponent in 0.1f64..4.0) {
            let gains = utility_factors_gains(&u, exponent).unwrap();
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            let losses = utility_factors_losses(&neg, exponent).unwrap();
            for i in 0..u.len() {
                for j in 0..u.len() {
                    if u[i] > u[j] {
                        proptest::prop_assert!(gains.values()[i] > gains.values()[j]);
                        proptest::prop_assert!(losses.values()[i] < losses.values()[j]);
                    }
                }
            }
        }

        #[test]
        fn factors_are_normalized(u in proptest::collection::vec(0.0f64..100.0, 1..10), alpha in 0.1f64..4.0) {
            proptest::prop_assume!(u.iter().any(|&x| x > 0.0));
            let f = utility_factors_gains(&u, alpha).unwrap();
            let s: f64 = f.values().iter().sum();
            proptest::prop_assert!((s - 1.0).abs() < 1e-12);
            proptest::prop_assert!(f.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }
}
