//! Frequency-renormalized series and optimization of the trial frequency.
//!
//! The harmonic frequency is split as `ω² = ω₀² + (ω² - ω₀²)ℏ`, so the
//! partial sums `E_N(ω₀)` depend on the trial frequency. The optimizer picks
//! ω₀ order by order, either where `E_N` is stationary (minimal sensitivity,
//! choosing the flattest of the extrema) or where the last correction
//! vanishes (minimal difference).
//!
//! Derivatives in ω₀ come from [`Dual2`] arithmetic threaded through the
//! whole recursion. The grid scan runs on hardware doubles; the selected
//! root is then polished and evaluated at the configured precision.

use crate::engine::{check_order, EnergySeries, Inputs};
use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::potential::{PotentialSpec, QuantumState, ScalarConfig};
use crate::scalar::{BigFloat, Dual2, Precision, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `dE_N/dω₀ = 0`, flattest extremum.
    MinimalSensitivity,
    /// The quantity chosen by [`DifferenceTarget`] vanishes.
    MinimalDifference,
}

/// What "E_N(ω₀) = 0" refers to under the minimal-difference scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DifferenceTarget {
    /// The N-th correction term.
    #[default]
    LastCorrection,
    /// The N-th partial sum.
    PartialSum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenormConfig {
    pub scheme: Scheme,
    /// Search interval for ω₀; `None` picks one from the potential.
    pub search: Option<(f64, f64)>,
    pub grid_points: usize,
    /// Relative tolerance on ω₀ for the double-precision refinement.
    pub root_tolerance: f64,
    /// Power of ℏ carrying the frequency remainder. Only 1 is supported.
    pub truncation: u32,
    pub difference_target: DifferenceTarget,
    /// Decimal digits for the final polish and evaluation.
    pub digits: u32,
    pub execution: Execution,
}

impl Default for RenormConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::MinimalSensitivity,
            search: None,
            grid_points: 2000,
            root_tolerance: 1e-12,
            truncation: 1,
            difference_target: DifferenceTarget::LastCorrection,
            digits: ScalarConfig::DEFAULT_DIGITS,
            execution: Execution::default(),
        }
    }
}

impl RenormConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some((a, b)) = self.search {
            if !(a > 0.0 && a < b && b.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "search interval must satisfy 0 < a < b, got [{a}, {b}]"
                )));
            }
        }
        if self.grid_points < 10 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 10 points, got {}",
                self.grid_points
            )));
        }
        if !(self.root_tolerance > 0.0 && self.root_tolerance < 1.0) {
            return Err(Error::InvalidArgument(
                "root tolerance must lie in (0, 1)".into(),
            ));
        }
        if self.truncation != 1 {
            return Err(Error::InvalidArgument(format!(
                "frequency remainder must enter at first order in hbar, got {}",
                self.truncation
            )));
        }
        ScalarConfig::float(self.digits)?;
        Ok(())
    }

    /// The configured interval, or `[ω/10, 10·max(ω, v_i^(1/(2i+2)), 1)]`.
    pub fn interval_for(&self, potential: &PotentialSpec) -> (f64, f64) {
        self.search.unwrap_or_else(|| default_interval(potential))
    }
}

pub fn default_interval(potential: &PotentialSpec) -> (f64, f64) {
    let omega = potential.omega().to_f64();
    let scale = potential
        .anharmonic()
        .iter()
        .enumerate()
        .map(|(idx, v)| v.to_f64().abs().powf(1.0 / (2.0 * idx as f64 + 4.0)))
        .fold(omega.max(1.0), f64::max);
    let lower = if omega > 0.0 { omega } else { scale } / 10.0;
    (lower, 10.0 * scale)
}

/// One stationary point (or zero) of the scheme's target.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCandidate {
    pub omega0: f64,
    pub partial_sum: f64,
    /// `|E_N''|` (minimal sensitivity) or `|E_N'|` (minimal difference).
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenormResult {
    pub order: usize,
    pub omega0: f64,
    pub partial_sum: f64,
    /// `partial_sum` at the working precision.
    pub partial_sum_text: String,
    pub derivative: f64,
    pub curvature: f64,
    /// Candidates sorted by ω₀; the selected one is among them.
    pub all_roots: Vec<RootCandidate>,
    pub interval: (f64, f64),
    /// The potential has no harmonic term; the scheme is applied beyond the
    /// potentials it was designed for.
    pub extension: bool,
}

/// Renormalized corrections `E_1..E_order` at trial frequency `omega0`.
pub fn renorm_corrections<S: Scalar>(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    omega0: &S,
    ctx: &S::Context,
) -> Result<EnergySeries<S>> {
    check_order(order)?;
    let inputs = Inputs::renormalized(potential, state, omega0.clone(), ctx)?;
    let (_, energies) = inputs.run(order, ctx);
    Ok(EnergySeries::from_corrections(energies))
}

/// `E_N(ω₀)` with first and second ω₀-derivatives.
#[derive(Clone, Debug)]
pub struct PartialSumFn<S: Scalar> {
    potential: PotentialSpec,
    state: QuantumState,
    order: usize,
    ctx: S::Context,
}

impl<S: Scalar> PartialSumFn<S> {
    pub fn order(&self) -> usize {
        self.order
    }

    /// All corrections and partial sums up to the order, as jets.
    pub fn series(&self, omega0: &S) -> Result<EnergySeries<Dual2<S>>> {
        let variable = Dual2::variable(omega0.clone(), &self.ctx);
        renorm_corrections(
            &self.potential,
            self.state,
            self.order,
            &variable,
            &self.ctx,
        )
    }

    /// `E_N(ω₀)` and its derivatives.
    pub fn eval(&self, omega0: &S) -> Result<Dual2<S>> {
        let series = self.series(omega0)?;
        Ok(series.partial_sums()[self.order - 1].clone())
    }
}

pub fn partial_sum_function<S: Scalar>(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    ctx: &S::Context,
) -> Result<PartialSumFn<S>> {
    check_order(order)?;
    Ok(PartialSumFn {
        potential: potential.clone(),
        state,
        order,
        ctx: ctx.clone(),
    })
}

/// Target value and its derivative for a scheme at one order.
fn target<S: Scalar>(
    series: &EnergySeries<Dual2<S>>,
    order: usize,
    scheme: Scheme,
    difference: DifferenceTarget,
) -> (S, S) {
    let sum = &series.partial_sums()[order - 1];
    match (scheme, difference) {
        (Scheme::MinimalSensitivity, _) => (sum.first.clone(), sum.second.clone()),
        (Scheme::MinimalDifference, DifferenceTarget::PartialSum) => {
            (sum.value.clone(), sum.first.clone())
        }
        (Scheme::MinimalDifference, DifferenceTarget::LastCorrection) => {
            let term = &series.corrections()[order - 1];
            (term.value.clone(), term.first.clone())
        }
    }
}

fn score(series: &EnergySeries<Dual2<f64>>, order: usize, scheme: Scheme) -> f64 {
    let sum = &series.partial_sums()[order - 1];
    match scheme {
        Scheme::MinimalSensitivity => sum.second.abs(),
        Scheme::MinimalDifference => sum.first.abs(),
    }
}

fn target_name(scheme: Scheme, difference: DifferenceTarget) -> &'static str {
    match (scheme, difference) {
        (Scheme::MinimalSensitivity, _) => "partial-sum derivative",
        (Scheme::MinimalDifference, DifferenceTarget::LastCorrection) => "last correction",
        (Scheme::MinimalDifference, DifferenceTarget::PartialSum) => "partial sum",
    }
}

/// Double-precision samples of all orders on a log-spaced ω₀ grid.
#[derive(Clone, Debug)]
pub struct Scan {
    grid: Vec<f64>,
    samples: Vec<Option<EnergySeries<Dual2<f64>>>>,
    max_order: usize,
}

impl Scan {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Series at grid point `idx`; `None` where double precision overflowed.
    pub fn sample(&self, idx: usize) -> Option<&EnergySeries<Dual2<f64>>> {
        self.samples[idx].as_ref()
    }
}

pub fn log_grid(interval: (f64, f64), points: usize) -> Vec<f64> {
    let (a, b) = interval;
    let ratio = (b / a).ln();
    (0..points)
        .map(|i| {
            if i + 1 == points {
                b
            } else {
                a * (ratio * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

fn all_finite(series: &EnergySeries<Dual2<f64>>) -> bool {
    series
        .partial_sums()
        .iter()
        .chain(series.corrections())
        .all(|d| d.value.is_finite() && d.first.is_finite() && d.second.is_finite())
}

/// Evaluates every order up to `max_order` at each grid point.
pub fn scan(
    potential: &PotentialSpec,
    state: QuantumState,
    max_order: usize,
    interval: (f64, f64),
    points: usize,
    execution: Execution,
) -> Result<Scan> {
    check_order(max_order)?;
    let grid = log_grid(interval, points);
    let function = partial_sum_function::<f64>(potential, state, max_order, &())?;
    let samples = parallel::map(execution, &grid, |w| {
        function.series(w).ok().filter(all_finite)
    });
    Ok(Scan {
        grid,
        samples,
        max_order,
    })
}

/// Safeguarded Newton iteration on a sign-changing bracket.
fn refine_root<S, F>(
    f: F,
    (mut lo, mut hi): (S, S),
    start: S,
    tol: f64,
    max_iter: usize,
    ctx: &S::Context,
) -> Result<S>
where
    S: Scalar,
    F: Fn(&S) -> Result<(S, S)>,
{
    let lo_negative = f(&lo)?.0.is_negative();
    let mut x = start;
    for _ in 0..max_iter {
        let (value, slope) = f(&x)?;
        if value.is_zero() {
            return Ok(x);
        }
        if value.is_negative() == lo_negative {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let two = S::from_i64(ctx, 2);
        let mid = (lo.clone() + &hi) / two;
        let newton = (!slope.is_zero())
            .then(|| x.clone() - value / slope)
            .filter(|candidate| {
                candidate.to_f64().is_finite()
                    && (candidate.clone() - &lo).is_negative()
                        != (candidate.clone() - &hi).is_negative()
            });
        let next = newton.unwrap_or(mid);
        let step = (next.clone() - &x).to_f64().abs();
        let width = (hi.clone() - &lo).to_f64().abs();
        let scale = next.to_f64().abs();
        x = next;
        if step <= tol * scale || width <= tol * scale {
            return Ok(x);
        }
    }
    Ok(x)
}

struct Bracket {
    lo: f64,
    hi: f64,
    start: f64,
}

/// Sign changes of the target at `order` along the scan.
fn brackets(scan: &Scan, order: usize, config: &RenormConfig) -> (Vec<Bracket>, f64, f64) {
    let values: Vec<Option<f64>> = scan
        .samples
        .iter()
        .map(|s| {
            s.as_ref()
                .map(|series| target(series, order, config.scheme, config.difference_target).0)
                .filter(|v| v.is_finite())
        })
        .collect();
    let mut out = Vec::new();
    let mut exact_hits = Vec::new();
    for (idx, value) in values.iter().enumerate() {
        if *value == Some(0.0) {
            exact_hits.push(idx);
        }
    }
    for idx in 0..values.len().saturating_sub(1) {
        if let (Some(a), Some(b)) = (values[idx], values[idx + 1]) {
            if a != 0.0 && b != 0.0 && (a < 0.0) != (b < 0.0) {
                let (lo, hi) = (scan.grid[idx], scan.grid[idx + 1]);
                // secant guess inside the cell
                let start = lo + (hi - lo) * a / (a - b);
                out.push(Bracket { lo, hi, start });
            }
        }
    }
    for idx in exact_hits {
        let lo = scan.grid[idx.saturating_sub(1)];
        let hi = scan.grid[(idx + 1).min(scan.grid.len() - 1)];
        out.push(Bracket {
            lo,
            hi,
            start: scan.grid[idx],
        });
    }
    let first = values.iter().flatten().next().copied().unwrap_or(f64::NAN);
    let last = values.iter().flatten().last().copied().unwrap_or(f64::NAN);
    (out, first, last)
}

/// Picks the flattest candidate; near-ties (within 1%) go to the one nearest
/// `hint`, or the smallest ω₀ without a hint.
fn select(candidates: &[RootCandidate], hint: Option<f64>) -> usize {
    let best = candidates
        .iter()
        .map(|c| c.score)
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..candidates.len())
        .filter(|&i| candidates[i].score <= best * 1.01 || candidates[i].score == best)
        .collect();
    match hint {
        Some(h) if tied.len() > 1 => *tied
            .iter()
            .min_by(|&&a, &&b| {
                let da = (candidates[a].omega0 - h).abs();
                let db = (candidates[b].omega0 - h).abs();
                da.total_cmp(&db)
            })
            .expect("non-empty"),
        _ => tied[0],
    }
}

/// Finds every root of the target at `order` from a scan and returns the
/// refined candidates (sorted by ω₀) plus the bracket of each.
fn candidates(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    scan: &Scan,
    config: &RenormConfig,
) -> Result<Vec<(RootCandidate, (f64, f64))>> {
    let (cells, f_lo, f_hi) = brackets(scan, order, config);
    if cells.is_empty() {
        return Err(Error::NoRoot {
            target: target_name(config.scheme, config.difference_target).into(),
            lo: scan.grid[0],
            hi: *scan.grid.last().expect("non-empty grid"),
            f_lo,
            f_hi,
        });
    }
    let function = partial_sum_function::<f64>(potential, state, order, &())?;
    let eval = |w: &f64| -> Result<(f64, f64)> {
        let series = function.series(w)?;
        Ok(target(
            &series,
            order,
            config.scheme,
            config.difference_target,
        ))
    };
    let mut found = Vec::with_capacity(cells.len());
    for cell in cells {
        let root = refine_root(
            eval,
            (cell.lo, cell.hi),
            cell.start,
            config.root_tolerance,
            200,
            &(),
        )?;
        let series = function.series(&root)?;
        found.push((
            RootCandidate {
                omega0: root,
                partial_sum: series.partial_sums()[order - 1].value,
                score: score(&series, order, config.scheme),
            },
            (cell.lo, cell.hi),
        ));
    }
    found.sort_by(|a, b| a.0.omega0.total_cmp(&b.0.omega0));
    found.dedup_by(|a, b| {
        (a.0.omega0 - b.0.omega0).abs() <= config.root_tolerance * b.0.omega0.abs()
    });
    Ok(found)
}

/// Newton polish of the selected root and evaluation at `digits`.
fn finish(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    chosen: &RootCandidate,
    bracket: (f64, f64),
    config: &RenormConfig,
) -> Result<(f64, f64, String, f64, f64)> {
    if config.digits <= ScalarConfig::MIN_DIGITS {
        let function = partial_sum_function::<f64>(potential, state, order, &())?;
        let jet = function.eval(&chosen.omega0)?;
        return Ok((
            chosen.omega0,
            jet.value,
            jet.value.render(),
            jet.first,
            jet.second,
        ));
    }
    let ctx = Precision::from_digits(config.digits);
    let function = partial_sum_function::<BigFloat>(potential, state, order, &ctx)?;
    let to_big = |x: f64| {
        BigFloat::from_f64(&ctx, x)
            .ok_or_else(|| Error::Numerical(format!("cannot represent {x} at working precision")))
    };
    let (lo, hi) = (to_big(bracket.0)?, to_big(bracket.1)?);
    // a stationary value is insensitive to first-order errors in the root
    let exponent = match config.scheme {
        Scheme::MinimalSensitivity => config.digits as i32 / 2 + 2,
        Scheme::MinimalDifference => config.digits as i32 - 2,
    };
    let tol = 10f64.powi(-exponent);
    let mut root = to_big(chosen.omega0)?;
    let mut series = function.series(&root)?;
    for _ in 0..POLISH_STEPS {
        let (value, slope) = target(&series, order, config.scheme, config.difference_target);
        if slope.is_zero() {
            break;
        }
        let step = value / slope;
        let next = root.clone() - &step;
        if (next.clone() - &lo).is_negative() || (hi.clone() - &next).is_negative() {
            break;
        }
        if Scalar::to_f64(&step).abs() <= tol * Scalar::to_f64(&root).abs() {
            break;
        }
        root = next;
        series = function.series(&root)?;
    }
    let jet = &series.partial_sums()[order - 1];
    Ok((
        Scalar::to_f64(&root),
        Scalar::to_f64(&jet.value),
        jet.value.render(),
        Scalar::to_f64(&jet.first),
        Scalar::to_f64(&jet.second),
    ))
}

/// Newton steps allowed at working precision; simple roots need two.
const POLISH_STEPS: usize = 40;

fn assemble(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    scan: &Scan,
    config: &RenormConfig,
    found: Vec<(RootCandidate, (f64, f64))>,
    hint: Option<f64>,
) -> Result<RenormResult> {
    let roots: Vec<RootCandidate> = found.iter().map(|(c, _)| c.clone()).collect();
    let pick = select(&roots, hint);
    let (omega0, partial_sum, text, derivative, curvature) =
        finish(potential, state, order, &roots[pick], found[pick].1, config)?;
    let mut all_roots = roots;
    all_roots[pick].omega0 = omega0;
    all_roots[pick].partial_sum = partial_sum;
    Ok(RenormResult {
        order,
        omega0,
        partial_sum,
        partial_sum_text: text,
        derivative,
        curvature,
        all_roots,
        interval: (scan.grid[0], *scan.grid.last().expect("non-empty grid")),
        extension: potential.omega().is_zero(),
    })
}

/// Optimizes ω₀ for a single order.
pub fn optimize_omega0(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    config: &RenormConfig,
) -> Result<RenormResult> {
    config.validate()?;
    check_order(order)?;
    let interval = config.interval_for(potential);
    let scan = scan(
        potential,
        state,
        order,
        interval,
        config.grid_points,
        config.execution,
    )?;
    let found = candidates(potential, state, order, &scan, config)?;
    assemble(potential, state, order, &scan, config, found, None)
}

/// Optimizes ω₀ for each of `orders` from one shared scan, following the
/// selected root through every intermediate order to break near-ties.
pub fn optimize_sequence(
    potential: &PotentialSpec,
    state: QuantumState,
    orders: &[usize],
    config: &RenormConfig,
) -> Result<Vec<Result<RenormResult>>> {
    config.validate()?;
    let max_order = orders.iter().copied().max().unwrap_or(0);
    check_order(max_order)?;
    let interval = config.interval_for(potential);
    let scan = scan(
        potential,
        state,
        max_order,
        interval,
        config.grid_points,
        config.execution,
    )?;
    optimize_from_scan(potential, state, orders, &scan, config)
}

pub fn optimize_from_scan(
    potential: &PotentialSpec,
    state: QuantumState,
    orders: &[usize],
    scan: &Scan,
    config: &RenormConfig,
) -> Result<Vec<Result<RenormResult>>> {
    let max_order = orders.iter().copied().max().unwrap_or(0);
    if max_order > scan.max_order {
        return Err(Error::InvalidArgument(format!(
            "scan covers {} orders, {max_order} requested",
            scan.max_order
        )));
    }
    let mut hint = None;
    let mut results = Vec::with_capacity(orders.len());
    for order in 1..=max_order {
        let wanted = orders.contains(&order);
        match candidates(potential, state, order, scan, config) {
            Ok(found) => {
                let roots: Vec<RootCandidate> = found.iter().map(|(c, _)| c.clone()).collect();
                let pick = select(&roots, hint);
                if wanted {
                    let result = assemble(potential, state, order, scan, config, found, hint)?;
                    hint = Some(result.omega0);
                    results.push((order, Ok(result)));
                } else {
                    hint = Some(roots[pick].omega0);
                }
            }
            Err(err) if wanted => results.push((order, Err(err))),
            Err(_) => {}
        }
    }
    Ok(orders
        .iter()
        .map(|order| {
            results
                .iter()
                .find(|(o, _)| o == order)
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| {
                    Err(Error::InvalidArgument(format!(
                        "order {order} not computed"
                    )))
                })
        })
        .collect())
}
