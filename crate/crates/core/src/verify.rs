//! Closed-form versus oracle cross-validation, plus the analytic property checks.
//!
//! The closed forms under test are injected through [`ClosedForms`], so the
//! harness can be pointed at a deliberately wrong formula to prove it fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::model::{
    perturbation_product, rate_gradient, secrecy_rates, symmetric_gradient, symmetric_rate, ChannelParams,
    PowerConstraint, Strategy, User,
};
use crate::optima::{self, p_min_star, p_of_lambda};
use crate::oracle::{oracle_maxmin, oracle_single_user, GridSpec};

pub const MAXMIN_RESOLUTION_LIMIT: f64 = 1e-3;
pub const SINGLE_USER_RESOLUTION_LIMIT: f64 = 1e-4;
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
pub const FAMILY_TOLERANCE: f64 = 1e-9;
pub const STATIONARITY_TOLERANCE: f64 = 1e-7;
pub const GRADIENT_RELATIVE_TOLERANCE: f64 = 1e-5;
/// Finite-difference step relative to each coordinate's range.
pub const FD_RELATIVE_STEP: f64 = 1e-4;

const FAMILY_SAMPLES: usize = 20;
const GRADIENT_SAMPLES: usize = 200;
const PERTURBATION_DIRECTIONS: usize = 100;

/// The closed forms checked against the oracle.
#[derive(Clone, Copy)]
pub struct ClosedForms {
    pub maxmin_rate: fn(&ChannelParams, PowerConstraint) -> Result<f64>,
    pub single_user_rate: fn(&ChannelParams, PowerConstraint) -> Result<f64>,
    pub critical_power: fn(&ChannelParams) -> Result<f64>,
}

impl Default for ClosedForms {
    fn default() -> Self {
        Self {
            maxmin_rate: |ch, p| Ok(optima::maxmin_point(ch, p, None)?.r_min_star),
            single_user_rate: |ch, p| Ok(optima::single_user_point(ch, p, User::One)?.r_su_star),
            critical_power: optima::critical_power,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    fn at_most(name: String, measured: f64, threshold: f64) -> Self {
        Self { name, passed: measured <= threshold, measured, threshold }
    }

    fn failed(name: String, measured: f64, threshold: f64) -> Self {
        Self { name, passed: false, measured, threshold }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Symmetric relative error `|x - y| / max(|x| + |y|, 1e-8)`.
pub fn relative_error(x: f64, y: f64) -> f64 {
    (x - y).abs() / (x.abs() + y.abs()).max(1e-8)
}

/// Fourth-order (five-point) central difference of `user`'s raw rate along
/// each strategy coordinate. Power steps scale with `power`, split steps with 1.
/// Probes reach `2h` from `s`, so `s` must sit that far inside the box.
pub fn central_difference(ch: &ChannelParams, s: &Strategy, user: User, power: f64) -> [f64; 4] {
    let x = s.to_array();
    let mut out = [0.0; 4];
    for i in 0..4 {
        let h = FD_RELATIVE_STEP * if i < 2 { power.max(1.0) } else { 1.0 };
        let f = |offset: f64| {
            let mut y = x;
            y[i] += offset * h;
            secrecy_rates(ch, &Strategy::from_array(y).expect("interior probe")).raw(user)
        };
        out[i] = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
    }
    out
}

/// Channel with `a > a_c` and a power in `[p_min*/2, 4 p_min*]`.
pub fn random_instance(rng: &mut impl Rng) -> (ChannelParams, PowerConstraint) {
    let a = rng.gen_range(0.5..2.0);
    let a_c = a * rng.gen_range(0.05..0.9);
    let noise = rng.gen_range(0.5..2.0);
    let ch = ChannelParams::new(a, a_c, noise).expect("positive draw");
    let p_min = p_min_star(&ch).expect("a > a_c");
    let power = PowerConstraint::new(rng.gen_range(p_min / 2.0..4.0 * p_min)).expect("positive power");
    (ch, power)
}

/// Strategy strictly inside the box, away from the edges.
pub fn random_interior_strategy(rng: &mut impl Rng, power: f64) -> Strategy {
    Strategy::new(
        rng.gen_range(0.01..0.99) * power,
        rng.gen_range(0.01..0.99) * power,
        rng.gen_range(0.01..0.99),
        rng.gen_range(0.01..0.99),
    )
    .expect("interior strategy")
}

/// Closed form vs oracle for the max-min and user-1 single-user points.
pub fn oracle_checks(
    prefix: &str,
    ch: &ChannelParams,
    power: PowerConstraint,
    grid: &GridSpec,
    forms: &ClosedForms,
) -> Vec<Check> {
    let mut checks = Vec::new();
    let peak = power.peak();

    let mm = oracle_maxmin(ch, power, grid);
    match (forms.maxmin_rate)(ch, power) {
        Ok(cf) => checks.push(Check::at_most(
            format!("{prefix}maxmin_vs_oracle"),
            (cf - mm.best_value).abs(),
            mm.resolution_bound,
        )),
        Err(_) => checks.push(Check::failed(format!("{prefix}maxmin_vs_oracle"), f64::NAN, mm.resolution_bound)),
    }
    checks.push(Check::at_most(format!("{prefix}maxmin_resolution"), mm.resolution_bound, MAXMIN_RESOLUTION_LIMIT));

    let su = oracle_single_user(ch, power, User::One, grid);
    match (forms.single_user_rate)(ch, power) {
        Ok(cf) => checks.push(Check::at_most(
            format!("{prefix}single_user_vs_oracle"),
            (cf - su.best_value).abs(),
            su.resolution_bound,
        )),
        Err(_) => checks.push(Check::failed(format!("{prefix}single_user_vs_oracle"), f64::NAN, su.resolution_bound)),
    }
    checks.push(Check::at_most(
        format!("{prefix}single_user_resolution"),
        su.resolution_bound,
        SINGLE_USER_RESOLUTION_LIMIT,
    ));

    // argmax structure (lambda1, lambda2, p1) = (0, 1, P), in units of final grid spacing
    if peak > 0.0 {
        let [p1, _, l1, l2] = su.best_strategy.to_array();
        let [hp, _, hl, _] = su.spacing;
        let offset = ((peak - p1) / hp).max(l1 / hl).max((1.0 - l2) / hl);
        checks.push(Check::at_most(format!("{prefix}single_user_argmax"), offset, 1.0));
    }
    checks
}

/// Analytic identities and derivative checks that need no oracle.
pub fn analytic_checks(
    prefix: &str,
    ch: &ChannelParams,
    power: PowerConstraint,
    forms: &ClosedForms,
    rng: &mut impl Rng,
) -> Vec<Check> {
    let mut checks = Vec::new();

    let identity = (|| -> Result<f64> {
        let pc = PowerConstraint::new((forms.critical_power)(ch)?)?;
        Ok(((forms.single_user_rate)(ch, pc)? - 2.0 * (forms.maxmin_rate)(ch, pc)?).abs())
    })();
    checks.push(match identity {
        Ok(v) => Check::at_most(format!("{prefix}critical_identity"), v, IDENTITY_TOLERANCE),
        Err(_) => Check::failed(format!("{prefix}critical_identity"), f64::NAN, IDENTITY_TOLERANCE),
    });

    let family = (|| -> Result<(f64, f64)> {
        let limit = ch.a_c() / ch.a();
        let (mut worst_rate, mut worst_grad) = (0.0f64, 0.0f64);
        for k in 0..FAMILY_SAMPLES {
            let lambda = 0.9 * limit * k as f64 / (FAMILY_SAMPLES - 1) as f64;
            let p = p_of_lambda(ch, lambda)?;
            let expected = (forms.maxmin_rate)(ch, PowerConstraint::new(p)?)?;
            worst_rate = worst_rate.max((symmetric_rate(ch, p, lambda)? - expected).abs());
            worst_grad = worst_grad.max(symmetric_gradient(ch, p, lambda)?.norm());
        }
        Ok((worst_rate, worst_grad))
    })();
    match family {
        Ok((rate, grad)) => {
            checks.push(Check::at_most(format!("{prefix}lambda_family_rate"), rate, FAMILY_TOLERANCE));
            checks.push(Check::at_most(format!("{prefix}lambda_family_stationarity"), grad, STATIONARITY_TOLERANCE));
        }
        Err(_) => {
            checks.push(Check::failed(format!("{prefix}lambda_family_rate"), f64::NAN, FAMILY_TOLERANCE));
            checks.push(Check::failed(format!("{prefix}lambda_family_stationarity"), f64::NAN, STATIONARITY_TOLERANCE));
        }
    }

    let scale = power.peak().max(1.0);
    let mut worst = 0.0f64;
    for _ in 0..GRADIENT_SAMPLES {
        let s = random_interior_strategy(rng, scale);
        for user in [User::One, User::Two] {
            let analytic = rate_gradient(ch, &s, user).to_array();
            let numeric = central_difference(ch, &s, user, scale);
            for (x, y) in analytic.iter().zip(&numeric) {
                worst = worst.max(relative_error(*x, *y));
            }
        }
    }
    checks.push(Check::at_most(format!("{prefix}gradient_vs_finite_difference"), worst, GRADIENT_RELATIVE_TOLERANCE));

    // interior member of the stationary family, midway to the pole
    let lambda = ch.a_c() / (2.0 * ch.a());
    if let Ok(p) = p_of_lambda(ch, lambda) {
        let base = Strategy::symmetric(p, lambda).expect("stationary strategy");
        let mut largest = f64::NEG_INFINITY;
        for _ in 0..PERTURBATION_DIRECTIONS {
            let d: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            if let Ok(v) = perturbation_product(ch, &base, &d) {
                largest = largest.max(v);
            }
        }
        checks.push(Check {
            name: format!("{prefix}perturbation_negative"),
            passed: largest < 0.0,
            measured: largest,
            threshold: 0.0,
        });
    }
    checks
}

/// Full suite: every check on each base instance, then oracle checks on
/// `draws` seeded random instances.
pub fn run_suite(
    base: &[(ChannelParams, PowerConstraint)],
    grid: &GridSpec,
    draws: usize,
    seed: u64,
    forms: &ClosedForms,
) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::default();
    for (k, (ch, power)) in base.iter().enumerate() {
        let prefix = if base.len() == 1 { String::new() } else { format!("case{k}.") };
        report.checks.extend(oracle_checks(&prefix, ch, *power, grid, forms));
        report.checks.extend(analytic_checks(&prefix, ch, *power, forms, &mut rng));
    }
    for k in 0..draws {
        let (ch, power) = random_instance(&mut rng);
        report.checks.extend(oracle_checks(&format!("draw{k:02}."), &ch, power, grid, forms));
    }
    report
}
