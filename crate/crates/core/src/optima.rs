//! Closed-form operating points: the max-min point, the single-user point and the
//! critical power separating the regimes where each one is preferable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{secrecy_rates, symmetric_rate, ChannelParams, PowerConstraint, RatePair, Strategy, User};

/// Absolute tolerance (bits) under which the two operating modes are a tie.
pub const MODE_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointLabel {
    MaxMin,
    SingleUser1,
    SingleUser2,
    MaxSum,
}

/// A strategy together with the rates it achieves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub label: PointLabel,
    pub strategy: Strategy,
    pub rates: RatePair,
}

impl OperatingPoint {
    pub fn evaluate(ch: &ChannelParams, label: PointLabel, strategy: Strategy) -> Self {
        Self { label, strategy, rates: secrecy_rates(ch, &strategy) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxMinSolution {
    pub r_min_star: f64,
    /// Admissible splits are `[0, lambda_max]`; `lambda_max = 0` when power limited.
    pub lambda_max: f64,
    pub chosen_lambda: f64,
    pub p_star: f64,
    /// `P < p_min_star`: the stationary family is out of reach and both users
    /// transmit at full power without artificial noise.
    pub power_limited: bool,
    pub p_min_star: f64,
}

impl MaxMinSolution {
    pub fn strategy(&self) -> Strategy {
        Strategy::symmetric(self.p_star, self.chosen_lambda).expect("closed-form max-min strategy is valid")
    }

    pub fn operating_point(&self, ch: &ChannelParams) -> OperatingPoint {
        OperatingPoint::evaluate(ch, PointLabel::MaxMin, self.strategy())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleUserSolution {
    pub user: User,
    pub r_su_star: f64,
    pub strategy: Strategy,
    /// `sqrt(N^2 + (a + a_c) N P)`.
    pub delta: f64,
}

impl SingleUserSolution {
    pub fn operating_point(&self, ch: &ChannelParams) -> OperatingPoint {
        let label = match self.user {
            User::One => PointLabel::SingleUser1,
            User::Two => PointLabel::SingleUser2,
        };
        OperatingPoint::evaluate(ch, label, self.strategy)
    }
}

/// Minimum common power reaching the unconstrained max-min rate (split 0).
pub fn p_min_star(ch: &ChannelParams) -> Result<f64> {
    ch.require_secrecy()?;
    let (a, ac, n) = (ch.a(), ch.a_c(), ch.noise());
    Ok(n * (a - ac) / (ac * (a + ac)))
}

/// Unconstrained max-min rate `log2((a + a_c)^2 / (4 a a_c))`.
pub fn maxmin_rate_unconstrained(ch: &ChannelParams) -> Result<f64> {
    ch.require_secrecy()?;
    let (a, ac) = (ch.a(), ch.a_c());
    Ok(((a + ac) * (a + ac) / (4.0 * a * ac)).log2())
}

/// Stationary power for split `lambda`: `N(a - a_c) / ((a + a_c)(a_c - a lambda))`.
///
/// Every `(lambda, p_of_lambda(lambda))` zeroes both partials of the symmetric rate.
pub fn p_of_lambda(ch: &ChannelParams, lambda: f64) -> Result<f64> {
    ch.require_secrecy()?;
    let (a, ac, n) = (ch.a(), ch.a_c(), ch.noise());
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let limit = ac / a;
    if lambda >= limit {
        return Err(Error::Singular { lambda, limit });
    }
    Ok(n * (a - ac) / ((a + ac) * (ac - a * lambda)))
}

/// Symmetric max-min point. `lambda_choice` picks a member of the admissible
/// family; `None` selects `lambda = 0`, the minimum-power member.
pub fn maxmin_point(ch: &ChannelParams, power: PowerConstraint, lambda_choice: Option<f64>) -> Result<MaxMinSolution> {
    ch.require_secrecy()?;
    let (a, ac, n) = (ch.a(), ch.a_c(), ch.noise());
    let peak = power.peak();
    let p_min = p_min_star(ch)?;

    if peak < p_min {
        if let Some(l) = lambda_choice {
            if l != 0.0 {
                return Err(Error::domain(format!(
                    "lambda {l} is not admissible: P = {peak} < p_min* = {p_min} forces lambda = 0"
                )));
            }
        }
        return Ok(MaxMinSolution {
            r_min_star: symmetric_rate(ch, peak, 0.0)?,
            lambda_max: 0.0,
            chosen_lambda: 0.0,
            p_star: peak,
            power_limited: true,
            p_min_star: p_min,
        });
    }

    let lambda_max = (ac / a - n * (a - ac) / (peak * a * (a + ac))).max(0.0);
    let lambda = lambda_choice.unwrap_or(0.0);
    if !(0.0..=lambda_max).contains(&lambda) {
        return Err(Error::domain(format!("lambda {lambda} is outside the admissible interval [0, {lambda_max}]")));
    }
    let p_star = p_of_lambda(ch, lambda)?.min(peak);
    Ok(MaxMinSolution {
        r_min_star: maxmin_rate_unconstrained(ch)?,
        lambda_max,
        chosen_lambda: lambda,
        p_star,
        power_limited: false,
        p_min_star: p_min,
    })
}

/// Point maximizing one user's rate while the other transmits pure artificial noise.
pub fn single_user_point(ch: &ChannelParams, power: PowerConstraint, user: User) -> Result<SingleUserSolution> {
    ch.require_secrecy()?;
    let (a, ac, n) = (ch.a(), ch.a_c(), ch.noise());
    let peak = power.peak();
    let delta = (n * n + (a + ac) * n * peak).sqrt();
    let helper_power = (delta - n) / (a + ac);

    let common = (a * n + ac * delta) * (ac * n + a * delta);
    let num = common + a * (a + ac) * (ac * n + a * delta) * peak;
    let den = common + ac * (a + ac) * (a * n + ac * delta) * peak;
    let r_su_star = num.log2() - den.log2();

    let strategy = Strategy::new(peak, helper_power, 0.0, 1.0)?;
    let strategy = match user {
        User::One => strategy,
        User::Two => strategy.swapped(),
    };
    Ok(SingleUserSolution { user, r_su_star, strategy, delta })
}

/// Power at which equal time-sharing of the single-user points matches the max-min rate.
pub fn critical_power(ch: &ChannelParams) -> Result<f64> {
    ch.require_secrecy()?;
    let (a, ac, n) = (ch.a(), ch.a_c(), ch.noise());
    let d = ac * ac + 3.0 * a * ac;
    Ok(n * (a - ac) * (a * a + ac * ac + 6.0 * a * ac) / (d * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatingMode {
    MaxMin,
    TimeSharing,
    Tie,
}

impl OperatingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OperatingMode::MaxMin => "maxmin",
            OperatingMode::TimeSharing => "timeshare",
            OperatingMode::Tie => "tie",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub mode: OperatingMode,
    /// Per-user rate at the max-min point.
    pub maxmin_rate: f64,
    /// Per-user rate under equal time-sharing of the two single-user points.
    pub timeshare_rate: f64,
}

pub fn compare_operating_modes(ch: &ChannelParams, power: PowerConstraint) -> Result<ModeComparison> {
    let maxmin_rate = maxmin_point(ch, power, None)?.r_min_star;
    let timeshare_rate = single_user_point(ch, power, User::One)?.r_su_star / 2.0;
    let diff = maxmin_rate - timeshare_rate;
    let mode = if diff.abs() <= MODE_TIE_TOLERANCE {
        OperatingMode::Tie
    } else if diff > 0.0 {
        OperatingMode::MaxMin
    } else {
        OperatingMode::TimeSharing
    };
    Ok(ModeComparison { mode, maxmin_rate, timeshare_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::symmetric_gradient;

    fn reference_channel() -> ChannelParams {
        ChannelParams::new(1.0, 0.05, 1.0).unwrap()
    }

    fn power(p: f64) -> PowerConstraint {
        PowerConstraint::new(p).unwrap()
    }

    #[test]
    fn maxmin_reference_channel() {
        let sol = maxmin_point(&reference_channel(), power(100.0), None).unwrap();
        assert!(!sol.power_limited);
        assert!((sol.p_min_star - 18.0952380952).abs() < 1e-9);
        assert!((sol.r_min_star - (1.1025f64 / 0.2).log2()).abs() < 1e-15);
        assert_eq!(sol.chosen_lambda, 0.0);
        assert_eq!(sol.p_star, sol.p_min_star);
        // 0.05 - 0.95 / 105
        assert!((sol.lambda_max - (0.05 - 0.95 / 105.0)).abs() < 1e-15);
        assert!((sol.lambda_max - 0.04095).abs() < 5e-6);
    }

    #[test]
    fn maxmin_power_limited() {
        let ch = reference_channel();
        let sol = maxmin_point(&ch, power(10.0), None).unwrap();
        assert!(sol.power_limited);
        assert_eq!(sol.chosen_lambda, 0.0);
        assert_eq!(sol.p_star, 10.0);
        assert_eq!(sol.r_min_star, symmetric_rate(&ch, 10.0, 0.0).unwrap());
        assert!(maxmin_point(&ch, power(10.0), Some(0.01)).is_err());
        assert!(maxmin_point(&ch, power(10.0), Some(0.0)).is_ok());
    }

    #[test]
    fn maxmin_lambda_choice() {
        let ch = reference_channel();
        let sol = maxmin_point(&ch, power(100.0), Some(0.02)).unwrap();
        assert!((sol.p_star - 0.95 / (1.05 * 0.03)).abs() < 1e-9);
        assert!(maxmin_point(&ch, power(100.0), Some(0.045)).is_err());
        assert!(maxmin_point(&ch, power(100.0), Some(-0.01)).is_err());
        // the far end of the interval needs exactly the peak power
        let end = maxmin_point(&ch, power(100.0), Some(sol.lambda_max)).unwrap();
        assert!((end.p_star - 100.0).abs() < 1e-9);
    }

    #[test]
    fn maxmin_at_exact_p_min() {
        let ch = reference_channel();
        let p_min = p_min_star(&ch).unwrap();
        let sol = maxmin_point(&ch, power(p_min), None).unwrap();
        assert!(!sol.power_limited);
        assert!(sol.lambda_max.abs() < 1e-15);
    }

    #[test]
    fn degenerate_channel_rejected() {
        let ch = ChannelParams::new(0.5, 0.6, 1.0).unwrap();
        let err = maxmin_point(&ch, power(10.0), None).unwrap_err();
        assert!(err.to_string().contains("direct gain must exceed cross gain"));
        assert!(single_user_point(&ch, power(10.0), User::One).is_err());
        assert!(critical_power(&ch).is_err());
        assert!(p_of_lambda(&ch, 0.0).is_err());
        assert!(compare_operating_modes(&ch, power(10.0)).is_err());
    }

    #[test]
    fn p_of_lambda_values() {
        let ch = reference_channel();
        assert!((p_of_lambda(&ch, 0.0).unwrap() - 18.0952380952).abs() < 1e-9);
        assert!(matches!(p_of_lambda(&ch, 0.05), Err(Error::Singular { .. })));
        assert!(matches!(p_of_lambda(&ch, 0.5), Err(Error::Singular { .. })));
        for k in 0..20 {
            let lambda = 0.049 * k as f64 / 19.0;
            let p = p_of_lambda(&ch, lambda).unwrap();
            let g = symmetric_gradient(&ch, p, lambda).unwrap();
            assert!(g.norm() < 1e-9, "lambda {lambda}: {g:?}");
        }
    }

    #[test]
    fn single_user_reference_channel() {
        let ch = reference_channel();
        let su = single_user_point(&ch, power(100.0), User::One).unwrap();
        assert!((su.delta - 106f64.sqrt()).abs() < 1e-12);
        assert!((su.strategy.p2() - (106f64.sqrt() - 1.0) / 1.05).abs() < 1e-12);
        assert!((su.strategy.p2() - 8.853).abs() < 5e-4);
        assert!((su.r_su_star - 5.544).abs() < 5e-4);
        let r = secrecy_rates(&ch, &su.strategy);
        assert!((r.r1_raw() - su.r_su_star).abs() < 1e-12);
        assert_eq!(r.r2_raw(), 0.0);

        let su2 = single_user_point(&ch, power(100.0), User::Two).unwrap();
        assert_eq!(su2.r_su_star, su.r_su_star);
        assert_eq!(su2.strategy, su.strategy.swapped());
    }

    #[test]
    fn critical_power_reference_channel() {
        let ch = reference_channel();
        let pc = critical_power(&ch).unwrap();
        assert!((pc - 53.2).abs() < 0.05);
        let su = single_user_point(&ch, power(pc), User::One).unwrap().r_su_star;
        let mm = maxmin_point(&ch, power(pc), None).unwrap().r_min_star;
        assert!((su - 2.0 * mm).abs() < 1e-9);
    }

    #[test]
    fn critical_power_vanishes_with_gain_gap() {
        let mut last = f64::INFINITY;
        for ac in [0.9, 0.99, 0.999, 0.999999] {
            let pc = critical_power(&ChannelParams::new(1.0, ac, 1.0).unwrap()).unwrap();
            assert!(pc < last);
            last = pc;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn mode_comparison() {
        let ch = reference_channel();
        assert_eq!(compare_operating_modes(&ch, power(100.0)).unwrap().mode, OperatingMode::TimeSharing);
        assert_eq!(compare_operating_modes(&ch, power(30.0)).unwrap().mode, OperatingMode::MaxMin);
        let pc = critical_power(&ch).unwrap();
        assert_eq!(compare_operating_modes(&ch, power(pc)).unwrap().mode, OperatingMode::Tie);
    }

    #[test]
    fn zero_power_points() {
        let ch = reference_channel();
        let mm = maxmin_point(&ch, power(0.0), None).unwrap();
        assert!(mm.power_limited);
        assert_eq!(mm.r_min_star, 0.0);
        let su = single_user_point(&ch, power(0.0), User::One).unwrap();
        assert_eq!(su.r_su_star, 0.0);
        assert_eq!(su.strategy.p2(), 0.0);
    }
}
