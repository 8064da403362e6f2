//! Shooting solver for the reduced radial equation
//! `-u''/(2m) + (V + l(l+1)/(2m r²)) u = E u` with `u(0) = u(r_max) = 0`.
//!
//! The state is located by node counting of the outward solution, then the
//! energy is refined on a Wronskian mismatch between outward and inward
//! Numerov solutions joined near the classical turning point.

use crate::error::{Error, Result};
use crate::potential::{PotentialSpec, QuantumState};

/// Integration box and energy search settings.
#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub r_max: f64,
    pub steps: usize,
    /// Energy window holding exactly the wanted state; found automatically
    /// when absent.
    pub bracket: Option<(f64, f64)>,
    /// Relative tolerance on the energy.
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    pub energy: f64,
    pub nodes: u32,
    pub r_max: f64,
    pub step: f64,
}

/// WKB attenuation beyond the turning point that fixes the box size.
const TAIL_EXPONENT: f64 = 25.0;
const RESCALE: f64 = 1e150;

impl GridConfig {
    pub const DEFAULT_STEPS: usize = 20000;
    pub const DEFAULT_TOLERANCE: f64 = 1e-12;

    pub fn new(r_max: f64, steps: usize) -> Result<Self> {
        let config = Self {
            r_max,
            steps,
            bracket: None,
            tolerance: Self::DEFAULT_TOLERANCE,
        };
        config.validate()?;
        Ok(config)
    }

    /// A box large enough for the requested state.
    pub fn auto(potential: &PotentialSpec, state: QuantumState) -> Result<Self> {
        let mass = potential.mass().to_f64();
        let mut energy = well_bottom(potential, state).1.max(0.0) + 1.0;
        for _ in 0..200 {
            let r_max = box_size(potential, state, energy);
            let config = Self::new(r_max, Self::DEFAULT_STEPS)?;
            let grid = Grid::new(potential, state, &config);
            if grid.nodes(2.0 * mass * energy) > state.n {
                return Ok(config);
            }
            energy *= 2.0;
        }
        Err(Error::Numerical(
            "could not size the integration box".into(),
        ))
    }

    pub fn step(&self) -> f64 {
        self.r_max / self.steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "box radius must be positive, got {}",
                self.r_max
            )));
        }
        if self.steps < 16 {
            return Err(Error::InvalidArgument(format!(
                "need at least 16 steps, got {}",
                self.steps
            )));
        }
        if let Some((a, b)) = self.bracket {
            if !(a < b && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "bad energy bracket [{a}, {b}]"
                )));
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1e-2) {
            return Err(Error::InvalidArgument(
                "energy tolerance must lie in (0, 0.01)".into(),
            ));
        }
        Ok(())
    }
}

fn effective(potential: &PotentialSpec, state: QuantumState, r: f64) -> f64 {
    let mass = potential.mass().to_f64();
    potential.eval(r) + state.centrifugal() as f64 / (2.0 * mass * r * r)
}

/// Location and value of the minimum of the effective potential.
fn well_bottom(potential: &PotentialSpec, state: QuantumState) -> (f64, f64) {
    let mut r_end = 1.0;
    while potential.eval(r_end) < potential.eval(r_end / 2.0) {
        r_end *= 2.0;
    }
    let (lo, hi) = (r_end * 1e-6, r_end * 4.0);
    let ratio = (hi / lo).ln();
    (0..=4000)
        .map(|i| lo * (ratio * i as f64 / 4000.0).exp())
        .map(|r| (r, effective(potential, state, r)))
        .fold(
            (lo, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
}

/// Outermost classical turning point at `energy`.
fn turning_point(potential: &PotentialSpec, state: QuantumState, energy: f64) -> f64 {
    let (bottom, depth) = well_bottom(potential, state);
    if energy <= depth {
        return bottom;
    }
    let mut lo = bottom;
    let mut hi = 2.0 * bottom;
    while effective(potential, state, hi) <= energy {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if effective(potential, state, mid) > energy {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Radius where the WKB tail beyond the turning point has decayed by
/// `exp(-TAIL_EXPONENT)`.
fn box_size(potential: &PotentialSpec, state: QuantumState, energy: f64) -> f64 {
    let mass = potential.mass().to_f64();
    let start = turning_point(potential, state, energy);
    let dr = start / 1000.0;
    let mut r = start;
    let mut action = 0.0;
    while action < TAIL_EXPONENT {
        let excess = (effective(potential, state, r + 0.5 * dr) - energy).max(0.0);
        action += (2.0 * mass * excess).sqrt() * dr;
        r += dr;
    }
    r
}

/// `2m(V + l(l+1)/(2m r²))` sampled on the grid.
struct Grid {
    step: f64,
    q: Vec<f64>,
    l: u32,
}

impl Grid {
    fn new(potential: &PotentialSpec, state: QuantumState, config: &GridConfig) -> Self {
        let mass = potential.mass().to_f64();
        let step = config.step();
        let q = (0..=config.steps)
            .map(|i| {
                let r = i as f64 * step;
                if i == 0 {
                    f64::NAN
                } else {
                    2.0 * mass * effective(potential, state, r)
                }
            })
            .collect();
        Self {
            step,
            q,
            l: state.l,
        }
    }

    fn last(&self) -> usize {
        self.q.len() - 1
    }

    fn weight(&self, i: usize, e2m: f64) -> f64 {
        1.0 - self.step * self.step * (self.q[i] - e2m) / 12.0
    }

    /// Outward solution on `0..=upto`, seeded with
    /// `u = (r/h)^(l+1) (1 - 2mE r²/(2(2l+3)))`.
    fn outward(&self, e2m: f64, upto: usize) -> Vec<f64> {
        let h2 = self.step * self.step;
        let mut u = Vec::with_capacity(upto + 1);
        u.push(0.0);
        u.push(1.0 - e2m * h2 / (2.0 * (2 * self.l + 3) as f64));
        // weighted value at the origin: only l = 1 leaves a finite limit
        let mut prev = if self.l == 1 { -1.0 / 6.0 } else { 0.0 };
        for i in 1..upto {
            let here = self.weight(i, e2m);
            let next = (2.0 * (6.0 - 5.0 * here) * u[i] - prev) / self.weight(i + 1, e2m);
            prev = here * u[i];
            u.push(next);
            if next.abs() > RESCALE {
                for value in &mut u {
                    *value /= RESCALE;
                }
                prev /= RESCALE;
            }
        }
        u
    }

    /// Inward solution on `from..=last`, indexed from `from`.
    fn inward(&self, e2m: f64, from: usize) -> Vec<f64> {
        let last = self.last();
        let mut u = vec![0.0; last + 1];
        u[last - 1] = 1.0;
        for i in (from + 1..last).rev() {
            let next = (2.0 * (6.0 - 5.0 * self.weight(i, e2m)) * u[i]
                - self.weight(i + 1, e2m) * u[i + 1])
                / self.weight(i - 1, e2m);
            u[i - 1] = next;
            if next.abs() > RESCALE {
                for value in &mut u[i - 1..] {
                    *value /= RESCALE;
                }
            }
        }
        u.split_off(from)
    }

    fn nodes(&self, e2m: f64) -> u32 {
        let u = self.outward(e2m, self.last());
        u[1..]
            .windows(2)
            .filter(|w| (w[0] < 0.0) != (w[1] < 0.0) && w[1] != 0.0)
            .count() as u32
    }

    /// Wronskian of max-normalized outward and inward solutions at `m`.
    fn mismatch(&self, e2m: f64, m: usize) -> f64 {
        let out = self.outward(e2m, m + 1);
        let inn = self.inward(e2m, m);
        let norm = |u: &[f64]| u.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let (a, b) = (norm(&out), norm(&inn));
        (out[m] * inn[1] - out[m + 1] * inn[0]) / (a * b)
    }
}

/// Energy of `state` in the box described by `config`.
pub fn solve_eigenvalue(
    potential: &PotentialSpec,
    state: QuantumState,
    config: &GridConfig,
) -> Result<Eigenvalue> {
    config.validate()?;
    let mass = potential.mass().to_f64();
    let grid = Grid::new(potential, state, config);
    let nodes_at = |e: f64| grid.nodes(2.0 * mass * e);
    let target = state.n;

    let (mut lo, mut hi) = match config.bracket {
        Some(bracket) => bracket,
        None => {
            let floor = grid.q[1..].iter().fold(f64::INFINITY, |acc, &q| acc.min(q)) / (2.0 * mass);
            let lo = floor - 1.0;
            let mut hi = floor.abs().max(1.0);
            let mut doublings = 0;
            while nodes_at(hi) <= target {
                hi = hi.abs() * 2.0 + 1.0;
                doublings += 1;
                if doublings > 200 {
                    return Err(Error::Numerical("energy search diverged".into()));
                }
            }
            (lo, hi)
        }
    };
    let (mut nodes_lo, mut nodes_hi) = (nodes_at(lo), nodes_at(hi));
    if nodes_lo > target || nodes_hi <= target {
        return Err(Error::NoEigenvalue {
            nodes: target,
            e_lo: lo,
            e_hi: hi,
            nodes_lo,
            nodes_hi,
        });
    }

    // narrow until the window holds only the wanted state
    for _ in 0..200 {
        if nodes_lo == target && nodes_hi == target + 1 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let nodes = nodes_at(mid);
        if nodes <= target {
            lo = mid;
            nodes_lo = nodes;
        } else {
            hi = mid;
            nodes_hi = nodes;
        }
    }
    if nodes_lo != target || nodes_hi != target + 1 {
        return Err(Error::NoEigenvalue {
            nodes: target,
            e_lo: lo,
            e_hi: hi,
            nodes_lo,
            nodes_hi,
        });
    }

    let turning = turning_point(potential, state, 0.5 * (lo + hi));
    let last = grid.last();
    let m = ((turning / grid.step) as usize).clamp(last / 10, last - last / 10);
    let f = |e: f64| grid.mismatch(2.0 * mass * e, m);
    let energy = illinois(f, lo, hi, config.tolerance)?;
    Ok(Eigenvalue {
        energy,
        nodes: target,
        r_max: config.r_max,
        step: grid.step,
    })
}

/// Regula falsi with the Illinois modification.
fn illinois<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tolerance: f64) -> Result<f64> {
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(Error::Numerical(format!(
            "matching function has no sign change on [{a}, {b}]"
        )));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if (b - a).abs() <= tolerance * c.abs().max(1.0) || fc == 0.0 {
            return Ok(c);
        }
        if (fc < 0.0) == (fb < 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= tolerance * c.abs().max(1.0) {
            return Ok(c);
        }
    }
    Err(Error::Numerical(
        "energy refinement did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Param;
    use approx::assert_abs_diff_eq;

    fn solve(potential: &PotentialSpec, state: QuantumState) -> f64 {
        let config = GridConfig::auto(potential, state).unwrap();
        solve_eigenvalue(potential, state, &config).unwrap().energy
    }

    #[test]
    fn harmonic_levels() {
        for omega in [1, 2] {
            let p = PotentialSpec::harmonic(Param::int(omega)).unwrap();
            for n in 0..4 {
                for l in 0..4 {
                    let state = QuantumState::new(n, l);
                    let exact = omega as f64 * (2 * n + l) as f64 + 1.5 * omega as f64;
                    assert_abs_diff_eq!(solve(&p, state), exact, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn sextic_ground_state() {
        let p = PotentialSpec::sextic(Param::int(1), Param::ratio(1, 100), Param::ratio(1, 100))
            .unwrap();
        assert_abs_diff_eq!(solve(&p, QuantumState::GROUND), 1.621690, epsilon = 5e-6);
    }

    #[test]
    fn quasi_exact_level() {
        let (a, c) = (Param::ratio(1, 3), Param::ratio(1, 2));
        let b = Param::Approx(3f64.sqrt());
        let p = PotentialSpec::quasi_exact_family(&a, &b, &c).unwrap();
        let energy = solve(&p, QuantumState::new(0, 1));
        assert_abs_diff_eq!(energy, 2.5 * 3f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn levels_increase_with_nodes() {
        let p = PotentialSpec::sextic(Param::int(1), Param::int(10), Param::int(10)).unwrap();
        let levels: Vec<f64> = (0..4).map(|n| solve(&p, QuantumState::new(n, 0))).collect();
        assert!(levels.windows(2).all(|w| w[0] < w[1]), "{levels:?}");
    }

    #[test]
    fn fourth_order_convergence() {
        let p = PotentialSpec::harmonic(Param::int(1)).unwrap();
        let state = QuantumState::new(1, 1);
        let error = |steps: usize| {
            let config = GridConfig::new(10.0, steps).unwrap();
            (solve_eigenvalue(&p, state, &config).unwrap().energy - 4.5).abs()
        };
        let (coarse, fine) = (error(250), error(500));
        let order = (coarse / fine).log2();
        assert!((3.5..4.5).contains(&order), "observed order {order}");
    }

    #[test]
    fn empty_bracket_is_reported() {
        let p = PotentialSpec::harmonic(Param::int(1)).unwrap();
        let config = GridConfig {
            bracket: Some((4.0, 5.0)),
            ..GridConfig::new(10.0, 4000).unwrap()
        };
        match solve_eigenvalue(&p, QuantumState::GROUND, &config) {
            Err(Error::NoEigenvalue {
                nodes_lo, nodes_hi, ..
            }) => {
                assert_eq!((nodes_lo, nodes_hi), (2, 2));
            }
            other => panic!("expected NoEigenvalue, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridConfig::new(0.0, 100).is_err());
        assert!(GridConfig::new(5.0, 4).is_err());
    }
}
