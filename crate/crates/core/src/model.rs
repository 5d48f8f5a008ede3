//! Channel and strategy data model, secrecy-rate evaluation and analytic gradients.
//!
//! The symmetric two-user Gaussian interference channel is
//!
//! ```text
//! y1 = sqrt(a)   x1 + sqrt(a_c) x2 + n1
//! y2 = sqrt(a_c) x1 + sqrt(a)   x2 + n2
//! ```
//!
//! with noise variance `N`. Transmitter `i` spends a fraction `lambda_i` of its
//! power `p_i` on Gaussian artificial noise and the rest on its message. All
//! quantities are linear-scale and rates are in bits per channel use.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Direct gain `a`, cross gain `a_c` and noise variance `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    a: f64,
    a_c: f64,
    noise: f64,
}

impl ChannelParams {
    /// Validates positivity. A channel with `a <= a_c` is accepted (every secrecy
    /// rate it produces is non-positive) but logged as a warning.
    pub fn new(a: f64, a_c: f64, noise: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("a_c", a_c), ("N", noise)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if a <= a_c {
            log::warn!("a = {a} <= a_c = {a_c}: no positive secrecy rate is achievable");
        }
        Ok(Self { a, a_c, noise })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a_c(&self) -> f64 {
        self.a_c
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn has_secrecy(&self) -> bool {
        self.a > self.a_c
    }

    /// Errors with [`Error::NoPositiveSecrecy`] unless `a > a_c`.
    pub fn require_secrecy(&self) -> Result<()> {
        if self.has_secrecy() {
            Ok(())
        } else {
            Err(Error::NoPositiveSecrecy { a: self.a, a_c: self.a_c })
        }
    }
}

/// Peak transmit power `P` shared by both users.
///
/// `P = 0` is admitted: every strategy collapses to silence and the rate
/// region degenerates to the origin.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerConstraint(f64);

impl PowerConstraint {
    pub fn new(peak: f64) -> Result<Self> {
        if !(peak.is_finite() && peak >= 0.0) {
            return Err(Error::domain(format!("power constraint must be finite and >= 0, got {peak}")));
        }
        Ok(Self(peak))
    }

    pub fn peak(self) -> f64 {
        self.0
    }
}

/// One of the two transmitter/receiver pairs. Serializes as `1` or `2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn index(self) -> u8 {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }

    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }
}

impl From<User> for u8 {
    fn from(user: User) -> u8 {
        user.index()
    }
}

impl TryFrom<u8> for User {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(User::One),
            2 => Ok(User::Two),
            _ => Err(Error::domain(format!("user index must be 1 or 2, got {v}"))),
        }
    }
}

/// Transmit powers and artificial-noise fractions of both users.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    p1: f64,
    p2: f64,
    lambda1: f64,
    lambda2: f64,
}

impl Strategy {
    pub fn new(p1: f64, p2: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {p}")));
            }
        }
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::domain(format!("{name} must lie in [0, 1], got {l}")));
            }
        }
        Ok(Self { p1, p2, lambda1, lambda2 })
    }

    /// Both users transmit `p` with noise fraction `lambda`.
    pub fn symmetric(p: f64, lambda: f64) -> Result<Self> {
        Self::new(p, p, lambda, lambda)
    }

    /// Coordinates in the order `(p1, p2, lambda1, lambda2)`.
    pub fn from_array(x: [f64; 4]) -> Result<Self> {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.p1, self.p2, self.lambda1, self.lambda2]
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Exchanges the roles of the two users.
    pub fn swapped(self) -> Self {
        Self { p1: self.p2, p2: self.p1, lambda1: self.lambda2, lambda2: self.lambda1 }
    }

    pub fn within(&self, power: PowerConstraint) -> bool {
        self.p1 <= power.peak() && self.p2 <= power.peak()
    }

    pub fn check_power(&self, power: PowerConstraint) -> Result<()> {
        if self.within(power) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "strategy powers ({}, {}) exceed the peak power {}",
                self.p1,
                self.p2,
                power.peak()
            )))
        }
    }
}

/// Secrecy-rate bounds of both users: raw (possibly negative) and clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    r1_raw: f64,
    r2_raw: f64,
    r1: f64,
    r2: f64,
}

impl RatePair {
    pub fn from_raw(r1_raw: f64, r2_raw: f64) -> Self {
        Self { r1_raw, r2_raw, r1: r1_raw.max(0.0), r2: r2_raw.max(0.0) }
    }

    pub fn r1_raw(&self) -> f64 {
        self.r1_raw
    }

    pub fn r2_raw(&self) -> f64 {
        self.r2_raw
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn raw(&self, user: User) -> f64 {
        match user {
            User::One => self.r1_raw,
            User::Two => self.r2_raw,
        }
    }

    pub fn clamped(&self, user: User) -> f64 {
        match user {
            User::One => self.r1,
            User::Two => self.r2,
        }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

/// Partial derivatives of one user's raw secrecy rate (bits per unit coordinate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateGradient {
    pub d_p1: f64,
    pub d_p2: f64,
    pub d_lambda1: f64,
    pub d_lambda2: f64,
}

impl RateGradient {
    pub fn to_array(self) -> [f64; 4] {
        [self.d_p1, self.d_p2, self.d_lambda1, self.d_lambda2]
    }

    pub fn dot(&self, direction: &[f64; 4]) -> f64 {
        self.to_array().iter().zip(direction).map(|(g, d)| g * d).sum()
    }
}

/// Derivatives of the symmetric rate with respect to the common power and split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricGradient {
    pub d_p: f64,
    pub d_lambda: f64,
}

impl SymmetricGradient {
    pub fn norm(&self) -> f64 {
        self.d_p.hypot(self.d_lambda)
    }
}

fn user_rate(ch: &ChannelParams, own_p: f64, own_l: f64, other_p: f64, other_l: f64) -> f64 {
    let (a, ac, n) = (ch.a, ch.a_c, ch.noise);
    let message = (1.0 - own_l) * own_p;
    // own receiver decodes against the other user's full power plus own noise
    let legit = 1.0 + a * message / (n + ac * other_p + a * own_l * own_p);
    // the other receiver sees this message after cancelling the other user's message
    let leak = 1.0 + ac * message / (n + ac * own_l * own_p + a * other_l * other_p);
    legit.log2() - leak.log2()
}

/// Evaluates both users' secrecy-rate bounds for a strategy.
pub fn secrecy_rates(ch: &ChannelParams, s: &Strategy) -> RatePair {
    RatePair::from_raw(user_rate(ch, s.p1, s.lambda1, s.p2, s.lambda2), user_rate(ch, s.p2, s.lambda2, s.p1, s.lambda1))
}

/// Common rate of both users when they transmit `p` with split `lambda`.
pub fn symmetric_rate(ch: &ChannelParams, p: f64, lambda: f64) -> Result<f64> {
    check_symmetric(p, lambda)?;
    let (a, ac, n) = (ch.a, ch.a_c, ch.noise);
    let num = (n + ac * p + a * p) * (n + ac * lambda * p + a * lambda * p);
    let den = (n + ac * p + a * lambda * p) * (n + a * lambda * p + ac * p);
    Ok(num.log2() - den.log2())
}

pub fn symmetric_gradient(ch: &ChannelParams, p: f64, lambda: f64) -> Result<SymmetricGradient> {
    check_symmetric(p, lambda)?;
    let (a, ac, n) = (ch.a, ch.a_c, ch.noise);
    let s = a + ac;
    let total = n + s * p;
    let noise_only = n + s * lambda * p;
    let mixed = n + ac * p + a * lambda * p;
    let d_p = s / total + s * lambda / noise_only - 2.0 * (ac + a * lambda) / mixed;
    let d_lambda = s * p / noise_only - 2.0 * a * p / mixed;
    Ok(SymmetricGradient { d_p: d_p / std::f64::consts::LN_2, d_lambda: d_lambda / std::f64::consts::LN_2 })
}

fn check_symmetric(p: f64, lambda: f64) -> Result<()> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::domain(format!("power must be finite and >= 0, got {p}")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

/// Analytic gradient of `user`'s raw secrecy rate.
///
/// Writing user 1's rate as `log2(A D / (B C))` with
///
/// ```text
/// A = N + a p1 + a_c p2             B = N + a l1 p1 + a_c p2
/// C = N + a_c p1 + a l2 p2          D = N + a_c l1 p1 + a l2 p2
/// ```
///
/// each partial is `(A'/A - B'/B - C'/C + D'/D) / ln 2`. User 2 follows by
/// exchanging indices. Boundary points use the same formula.
pub fn rate_gradient(ch: &ChannelParams, s: &Strategy, user: User) -> RateGradient {
    match user {
        User::One => {
            let [dp_own, dp_other, dl_own, dl_other] = own_gradient(ch, s.p1, s.lambda1, s.p2, s.lambda2);
            RateGradient { d_p1: dp_own, d_p2: dp_other, d_lambda1: dl_own, d_lambda2: dl_other }
        }
        User::Two => {
            let [dp_own, dp_other, dl_own, dl_other] = own_gradient(ch, s.p2, s.lambda2, s.p1, s.lambda1);
            RateGradient { d_p1: dp_other, d_p2: dp_own, d_lambda1: dl_other, d_lambda2: dl_own }
        }
    }
}

/// Returns `[d/d own_p, d/d other_p, d/d own_l, d/d other_l]`.
fn own_gradient(ch: &ChannelParams, p: f64, l: f64, q: f64, m: f64) -> [f64; 4] {
    let (a, ac, n) = (ch.a, ch.a_c, ch.noise);
    let big_a = n + a * p + ac * q;
    let big_b = n + a * l * p + ac * q;
    let big_c = n + ac * p + a * m * q;
    let big_d = n + ac * l * p + a * m * q;
    let d_p = a / big_a - a * l / big_b - ac / big_c + ac * l / big_d;
    let d_q = ac / big_a - ac / big_b - a * m / big_c + a * m / big_d;
    let d_l = -a * p / big_b + ac * p / big_d;
    let d_m = -a * q / big_c + a * q / big_d;
    [d_p, d_q, d_l, d_m].map(|g| g / std::f64::consts::LN_2)
}

/// `(grad R1 . d)(grad R2 . d)`, i.e. `d^T A d` with `A = grad R1 grad R2^T`.
///
/// At a symmetric stationary max-min point the two gradients are antiparallel,
/// so the product is non-positive and strictly negative off the hyperplane
/// orthogonal to them.
pub fn perturbation_product(ch: &ChannelParams, base: &Strategy, direction: &[f64; 4]) -> Result<f64> {
    if direction.iter().any(|d| !d.is_finite()) {
        return Err(Error::domain("perturbation direction must be finite"));
    }
    if direction.iter().all(|&d| d == 0.0) {
        return Err(Error::domain("perturbation direction must be nonzero"));
    }
    let g1 = rate_gradient(ch, base, User::One);
    let g2 = rate_gradient(ch, base, User::Two);
    Ok(g1.dot(direction) * g2.dot(direction))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_channel() -> ChannelParams {
        ChannelParams::new(1.0, 0.05, 1.0).unwrap()
    }

    // N(a - a_c) / (a_c (a + a_c)) at the reference channel.
    const P_MIN: f64 = 0.95 / (0.05 * 1.05);

    #[test]
    fn channel_rejects_nonpositive() {
        assert!(ChannelParams::new(0.0, 0.1, 1.0).is_err());
        assert!(ChannelParams::new(1.0, -0.1, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 0.1, 0.0).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.1, 1.0).is_err());
        // accepted but flagged
        let ch = ChannelParams::new(0.5, 0.6, 1.0).unwrap();
        assert!(!ch.has_secrecy());
        assert_eq!(ch.require_secrecy(), Err(Error::NoPositiveSecrecy { a: 0.5, a_c: 0.6 }));
    }

    #[test]
    fn strategy_bounds() {
        assert!(Strategy::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(Strategy::new(1.0, 1.0, 1.5, 0.0).is_err());
        assert!(Strategy::new(1.0, 1.0, 0.0, -0.1).is_err());
        assert!(Strategy::new(1.0, f64::INFINITY, 0.0, 0.0).is_err());
        let s = Strategy::new(10.0, 20.0, 0.0, 1.0).unwrap();
        assert!(!s.within(PowerConstraint::new(15.0).unwrap()));
        assert!(s.check_power(PowerConstraint::new(20.0).unwrap()).is_ok());
    }

    #[test]
    fn user_index_conversion() {
        assert_eq!(User::try_from(1).unwrap(), User::One);
        assert_eq!(User::try_from(2).unwrap(), User::Two);
        assert!(User::try_from(0).is_err());
        assert!(User::try_from(3).is_err());
    }

    #[test]
    fn zero_power_sends_nothing() {
        let s = Strategy::new(0.0, 37.0, 0.0, 0.0).unwrap();
        assert_eq!(secrecy_rates(&reference_channel(), &s).r1_raw(), 0.0);
    }

    #[test]
    fn all_noise_sends_nothing() {
        let s = Strategy::new(12.0, 3.0, 1.0, 0.4).unwrap();
        assert_eq!(secrecy_rates(&reference_channel(), &s).r1_raw(), 0.0);
    }

    #[test]
    fn maxmin_point_rate() {
        let s = Strategy::symmetric(P_MIN, 0.0).unwrap();
        let r = secrecy_rates(&reference_channel(), &s);
        let expected = (1.05f64 * 1.05 / 0.2).log2();
        assert!((r.r1_raw() - expected).abs() < 1e-12);
        assert!((r.r2_raw() - expected).abs() < 1e-12);
        assert!((expected - 2.4627).abs() < 5e-5);
        assert!((symmetric_rate(&reference_channel(), P_MIN, 0.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn equal_gains_kill_secrecy() {
        let ch = ChannelParams::new(1.0, 1.0, 1.0).unwrap();
        let s = Strategy::new(5.0, 2.0, 0.3, 0.9).unwrap();
        let r = secrecy_rates(&ch, &s);
        assert!(r.r1_raw() <= 0.0);
        assert_eq!(r.r1(), 0.0);
    }

    #[test]
    fn clamping_keeps_raw() {
        let r = RatePair::from_raw(-0.5, 1.25);
        assert_eq!(r.r1(), 0.0);
        assert_eq!(r.r1_raw(), -0.5);
        assert_eq!(r.r2(), 1.25);
    }

    #[test]
    fn symmetric_rate_zero_power() {
        for l in [0.0, 0.3, 1.0] {
            assert_eq!(symmetric_rate(&reference_channel(), 0.0, l).unwrap(), 0.0);
        }
        assert!(symmetric_rate(&reference_channel(), 1.0, 1.1).is_err());
        assert!(symmetric_rate(&reference_channel(), -1.0, 0.1).is_err());
    }

    #[test]
    fn gradient_signs_at_interior_maxmin() {
        // interior member of the stationary family: lambda = 0.02, p from the curve
        let ch = reference_channel();
        let lambda = 0.02;
        let p = 0.95 / (1.05 * (0.05 - lambda));
        let s = Strategy::symmetric(p, lambda).unwrap();
        let g = rate_gradient(&ch, &s, User::One);
        assert!(g.d_p1 > 0.0);
        assert!(g.d_p2 < 0.0);
        assert!(g.d_lambda1 < 0.0);
        assert!(g.d_lambda2 > 0.0);
        let sg = symmetric_gradient(&ch, p, lambda).unwrap();
        assert!(sg.norm() < 1e-12, "{sg:?}");
    }

    #[test]
    fn user_two_gradient_is_mirror() {
        let ch = ChannelParams::new(1.3, 0.4, 0.7).unwrap();
        let s = Strategy::new(3.0, 8.0, 0.2, 0.6).unwrap();
        let g2 = rate_gradient(&ch, &s, User::Two);
        let g1m = rate_gradient(&ch, &s.swapped(), User::One);
        assert_eq!(g2.d_p1, g1m.d_p2);
        assert_eq!(g2.d_p2, g1m.d_p1);
        assert_eq!(g2.d_lambda1, g1m.d_lambda2);
        assert_eq!(g2.d_lambda2, g1m.d_lambda1);
    }

    #[test]
    fn perturbation_errors_and_scaling() {
        let ch = reference_channel();
        let lambda = 0.02;
        let p = 0.95 / (1.05 * (0.05 - lambda));
        let s = Strategy::symmetric(p, lambda).unwrap();
        assert!(perturbation_product(&ch, &s, &[0.0; 4]).is_err());
        let d = [0.3, -0.1, 0.7, 0.2];
        let base = perturbation_product(&ch, &s, &d).unwrap();
        let scaled = perturbation_product(&ch, &s, &d.map(|x| 2.5 * x)).unwrap();
        assert!((scaled - 6.25 * base).abs() <= 1e-12 * base.abs());
        // along grad R1 the product is |g1|^2 (g1 . g2) / |g1|^2 scaled, negative here
        let g1 = rate_gradient(&ch, &s, User::One).to_array();
        let g2 = rate_gradient(&ch, &s, User::Two).to_array();
        let cross: f64 = g1.iter().zip(&g2).map(|(x, y)| x * y).sum();
        let along = perturbation_product(&ch, &s, &g1).unwrap();
        assert!(cross < 0.0 && along < 0.0);
    }
}
