//! Self-checks against closed forms, exactly solvable levels and the
//! numerical solver.

use std::fmt;
use std::time::{Duration, Instant};

use crate::engine::{raw_energy, EnergySeries};
use crate::error::Result;
use crate::numerov::{solve_eigenvalue, GridConfig};
use crate::potential::{Param, PotentialSpec, QuantumState};
use crate::reference::{eq101_corrections, eq17_corrections, quasi_exact_energy, ClosedFormInputs};
use crate::renorm::{partial_sum_function, renorm_corrections};
use crate::scalar::{BigFloat, Precision, Rational, Scalar};

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn fail(name: impl Into<String>, detail: String) -> Self {
        Self::new(name, false, detail)
    }

    /// Passes when `|ours - expected| <= tolerance`.
    pub fn within(name: impl Into<String>, ours: f64, expected: f64, tolerance: f64) -> Self {
        let delta = (ours - expected).abs();
        Self::new(
            name,
            delta <= tolerance,
            format!(
                "got {ours:.9}, expected {expected:.9}, |delta| {delta:.2e} (tol {tolerance:.0e})"
            ),
        )
    }

    fn from_result(name: &str, result: Result<Check>) -> Self {
        result.unwrap_or_else(|err| Check::fail(name, err.to_string()))
    }

    fn timed(mut self, start: Instant) -> Self {
        self.elapsed = start.elapsed();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)?;
        if !self.elapsed.is_zero() {
            write!(f, " [{:.2?}]", self.elapsed)?;
        }
        Ok(())
    }
}

pub type ClosedForm = fn(&ClosedFormInputs<Rational>, &()) -> [Rational; 5];

/// The check suite. The closed form is a field so a broken one can be
/// swapped in.
#[derive(Clone, Debug)]
pub struct Suite {
    pub quick: bool,
    pub closed_form: ClosedForm,
}

impl Default for Suite {
    fn default() -> Self {
        Self {
            quick: false,
            closed_form: eq17_corrections::<Rational>,
        }
    }
}

fn rational(text: &str) -> Rational {
    crate::scalar::parse_rational(text).expect("rational literal")
}

fn harmonic_levels(omega: i64, states: &[QuantumState]) -> Result<f64> {
    let p = PotentialSpec::harmonic(Param::int(omega))?;
    let mut worst = 0.0f64;
    for &state in states {
        let grid = GridConfig::auto(&p, state)?;
        let energy = solve_eigenvalue(&p, state, &grid)?.energy;
        let exact = omega as f64 * (2.0 * state.n as f64 + state.l as f64 + 1.5);
        worst = worst.max((energy - exact).abs());
    }
    Ok(worst)
}

impl Suite {
    pub fn quick() -> Self {
        Self {
            quick: true,
            ..Self::default()
        }
    }

    /// Recursion against the five-term closed form, exactly.
    pub fn closed_form_check(&self) -> Check {
        let start = Instant::now();
        let name = "closed-form corrections E1..E5";
        let run = || -> Result<Check> {
            let points = [("1", "1/10", "1/100"), ("1", "2", "3"), ("2", "1", "1")];
            let limit = if self.quick { 1 } else { 3 };
            let mut compared = 0;
            for (omega, lambda, mu) in points {
                let p = PotentialSpec::sextic(
                    Param::Exact(rational(omega)),
                    Param::Exact(rational(lambda)),
                    Param::Exact(rational(mu)),
                )?;
                for n in 0..=limit {
                    for l in 0..=limit {
                        let state = QuantumState::new(n, l);
                        let series: EnergySeries<Rational> = raw_energy(&p, state, 5, &())?;
                        let inputs = ClosedFormInputs {
                            omega: rational(omega),
                            lambda: rational(lambda),
                            mu: rational(mu),
                            state,
                        };
                        let expected = (self.closed_form)(&inputs, &());
                        if let Some(k) = (0..5).find(|&k| series.corrections()[k] != expected[k]) {
                            return Ok(Check::fail(
                                name,
                                format!(
                                    "E{} differs at {state}, (omega, lambda, mu) = ({omega}, {lambda}, {mu}): {} vs {}",
                                    k + 1,
                                    series.corrections()[k],
                                    expected[k]
                                ),
                            ));
                        }
                        compared += 1;
                    }
                }
            }
            Ok(Check::new(
                name,
                true,
                format!("{compared} states agree exactly"),
            ))
        };
        Check::from_result(name, run()).timed(start)
    }

    /// Recursion against the six-term series of the quasi-exact family.
    pub fn quasi_exact_series_check(&self) -> Check {
        let start = Instant::now();
        let name = "quasi-exact family corrections E1..E6";
        let run = || -> Result<Check> {
            let couplings = [("1/3", "2/5"), ("7/4", "1/9"), ("-2", "5")];
            let mut compared = 0;
            for a in ["1/2", "2", "9/2"] {
                for (b, c) in couplings {
                    let p = PotentialSpec::quasi_exact_family(
                        &Param::Exact(rational(a)),
                        &Param::Exact(rational(b)),
                        &Param::Exact(rational(c)),
                    )?;
                    let series: EnergySeries<Rational> =
                        raw_energy(&p, QuantumState::new(0, 1), 6, &())?;
                    let expected =
                        eq101_corrections(&rational(a), &rational(b), &rational(c), &())?;
                    if let Some(k) = (0..6).find(|&k| series.corrections()[k] != expected[k]) {
                        return Ok(Check::fail(
                            name,
                            format!("E{} differs at (a, b, c) = ({a}, {b}, {c})", k + 1),
                        ));
                    }
                    compared += 1;
                }
            }
            Ok(Check::new(
                name,
                true,
                format!("{compared} parameter sets agree exactly"),
            ))
        };
        Check::from_result(name, run()).timed(start)
    }

    /// Numerical solver against the exactly known `(0, 1)` level.
    pub fn quasi_exact_level_check(&self) -> Check {
        let start = Instant::now();
        let name = "numerical quasi-exact (0,1) level";
        let run = || -> Result<Check> {
            let mut worst = 0.0f64;
            for (a, c) in [(1.0 / 3.0, 0.5), (0.5, 0.5)] {
                let (b, exact) = quasi_exact_energy::<f64>(&a, &c, &())?;
                let p = PotentialSpec::quasi_exact_family(
                    &Param::Approx(a),
                    &Param::Approx(b),
                    &Param::Approx(c),
                )?;
                let state = QuantumState::new(0, 1);
                let grid = GridConfig::auto(&p, state)?;
                let energy = solve_eigenvalue(&p, state, &grid)?.energy;
                worst = worst.max((energy - exact).abs());
            }
            Ok(Check::new(
                name,
                worst <= 1e-6,
                format!("2 parameter sets, worst |delta| {worst:.2e} (tol 1e-6)"),
            ))
        };
        Check::from_result(name, run()).timed(start)
    }

    /// Numerical solver on harmonic levels with `n, l <= 3`.
    pub fn harmonic_spectrum_check(&self) -> Check {
        let start = Instant::now();
        let name = "numerical harmonic spectrum";
        let limit = if self.quick { 1 } else { 3 };
        let states: Vec<QuantumState> = (0..=limit)
            .flat_map(|n| (0..=limit).map(move |l| QuantumState::new(n, l)))
            .collect();
        let result = harmonic_levels(1, &states).map(|worst| {
            let mut check = Check::within(name, worst, 0.0, 1e-8);
            check.detail = format!(
                "{} states, worst |delta| {worst:.2e} (tol 1e-8)",
                states.len()
            );
            check
        });
        Check::from_result(name, result).timed(start)
    }

    /// Observed order of the step-size error of the numerical solver.
    pub fn convergence_order_check(&self) -> Check {
        let start = Instant::now();
        let name = "numerical convergence order";
        let run = || -> Result<Check> {
            let order = observed_order()?;
            Ok(Check::new(
                name,
                (3.5..=4.5).contains(&order),
                format!("observed order {order:.3} (expected 3.5..4.5)"),
            ))
        };
        Check::from_result(name, run()).timed(start)
    }

    /// The unrenormalized series grows at high order.
    pub fn divergence_check(&self) -> Check {
        let start = Instant::now();
        let name = "raw series diverges";
        let run = || -> Result<Check> {
            let p = PotentialSpec::sextic(Param::int(1), Param::int(1), Param::int(1))?;
            let series: EnergySeries<Rational> = raw_energy(&p, QuantumState::GROUND, 20, &())?;
            let e10 = Scalar::to_f64(&series.corrections()[9]).abs();
            let e20 = Scalar::to_f64(&series.corrections()[19]).abs();
            Ok(Check::new(
                name,
                e20 > e10,
                format!("|E20| = {e20:.3e}, |E10| = {e10:.3e}"),
            ))
        };
        Check::from_result(name, run()).timed(start)
    }

    /// Dual-number derivatives of the renormalized partial sums against
    /// high-precision finite differences.
    pub fn derivative_check(&self) -> Check {
        let start = Instant::now();
        let name = "dual-number derivatives";
        let samples = if self.quick { 3 } else { 10 };
        let run = || -> Result<Check> {
            let (first, second) = derivative_errors(samples, 20)?;
            Ok(Check::new(
                name,
                first <= 1e-6 && second <= 1e-4,
                format!(
                    "{samples} points, N <= 20: worst relative error {first:.2e} (first, tol 1e-6), {second:.2e} (second, tol 1e-4)"
                ),
            ))
        };
        Check::from_result(name, run()).timed(start)
    }

    pub fn run(&self) -> Vec<Check> {
        vec![
            self.closed_form_check(),
            self.quasi_exact_series_check(),
            self.quasi_exact_level_check(),
            self.harmonic_spectrum_check(),
            self.convergence_order_check(),
            self.divergence_check(),
            self.derivative_check(),
        ]
    }
}

/// `log2` of successive error ratios on halving the step, for the `(1, 1)`
/// harmonic level; the finest pair is returned.
pub fn observed_order() -> Result<f64> {
    let p = PotentialSpec::harmonic(Param::int(1))?;
    let state = QuantumState::new(1, 1);
    let error = |steps: usize| -> Result<f64> {
        let grid = GridConfig::new(10.0, steps)?;
        Ok((solve_eigenvalue(&p, state, &grid)?.energy - 4.5).abs())
    };
    let (coarse, fine) = (error(300)?, error(600)?);
    Ok((coarse / fine).log2())
}

/// Worst relative errors of the first and second ω₀-derivatives of
/// `S_1..S_order` at `samples` points.
pub fn derivative_errors(samples: usize, order: usize) -> Result<(f64, f64)> {
    let ctx = Precision::from_digits(30);
    let p = PotentialSpec::sextic(Param::int(1), Param::int(1), Param::int(1))?;
    let state = QuantumState::GROUND;
    let function = partial_sum_function::<BigFloat>(&p, state, order, &ctx)?;
    let sums = |w: &BigFloat| -> Result<Vec<BigFloat>> {
        Ok(renorm_corrections(&p, state, order, w, &ctx)?
            .partial_sums()
            .to_vec())
    };
    let k = |v: i64| BigFloat::from_i64(&ctx, v);
    let (mut worst_first, mut worst_second) = (0.0f64, 0.0f64);
    for i in 0..samples {
        let w = 0.5 + 4.5 * i as f64 / (samples.max(2) - 1) as f64;
        let x = BigFloat::from_f64(&ctx, w).expect("finite sample");
        let h = BigFloat::from_f64(&ctx, 1e-6 * w).expect("finite step");
        let at = |m: i64| sums(&(x.clone() + &(k(m) * &h)));
        let (m1, c0, p1) = (at(-1)?, at(0)?, at(1)?);
        let jets = function.series(&x)?;
        for n in 0..order {
            let fd1 = (p1[n].clone() - &m1[n]) / (k(2) * &h);
            let fd2 = (p1[n].clone() - &(k(2) * &c0[n]) + &m1[n]) / (h.clone() * &h);
            let jet = &jets.partial_sums()[n];
            let relative = |exact: &BigFloat, approx: &BigFloat| {
                let e = Scalar::to_f64(exact);
                ((e - Scalar::to_f64(approx)) / e).abs()
            };
            worst_first = worst_first.max(relative(&jet.first, &fd1));
            worst_second = worst_second.max(relative(&jet.second, &fd2));
        }
    }
    Ok((worst_first, worst_second))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = Suite::quick().run();
        assert_eq!(checks.len(), 7);
        for check in &checks {
            assert!(check.passed, "{check}");
        }
    }

    #[test]
    fn broken_closed_form_is_caught() {
        fn off_by_one(inputs: &ClosedFormInputs<Rational>, ctx: &()) -> [Rational; 5] {
            let mut e = eq17_corrections(inputs, ctx);
            e[3] = e[3].clone() + Rational::from(1);
            e
        }
        let suite = Suite {
            closed_form: off_by_one,
            ..Suite::quick()
        };
        let check = suite.closed_form_check();
        assert!(!check.passed);
        assert!(check.detail.contains("E4"), "{}", check.detail);
    }

    #[test]
    fn check_rendering() {
        let check = Check::within("x", 1.0, 1.0 + 1e-9, 1e-6);
        assert!(check.passed);
        assert!(check.to_string().starts_with("PASS x:"));
        assert!(!Check::within("y", 1.0, 2.0, 1e-6).passed);
    }
}
