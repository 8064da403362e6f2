//! The ℏ-expansion recursion of logarithmic perturbation theory.
//!
//! With `C(r) = U'(r)/U(r)` the radial equation becomes a Riccati equation.
//! Expanding `C = Σ C_k ℏ^k` and `E = Σ_{k≥1} E_k ℏ^k`, each `C_k` (k ≥ 1) is a
//! Laurent series `r^(1-2k) Σ_i C[k][i] r^(2i)` and `C_0 = r Σ_i C[0][i] r^(2i)`.
//! Counting the `2n + l + 1` zeros enclosed at the origin fixes the residue
//! slot `C[k][k-1] = (2n+l+1) δ_{k,1}`; every other slot follows from the
//! order-by-order Riccati hierarchy, and the energies from the `i = k-1`
//! component of the same hierarchy.
//!
//! The frequency-renormalized variant shares this code: the harmonic term is
//! built on a trial frequency ω₀ and the remainder `ω² - ω₀²` enters at first
//! order in ℏ as an extra `-m²(ω² - ω₀²)` in the `(k, i) = (1, 1)` slot.

use crate::error::{Error, Result};
use crate::potential::{PotentialSpec, QuantumState};
use crate::scalar::Scalar;

/// Energy corrections `E_1..E_K` and their partial sums.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergySeries<S> {
    corrections: Vec<S>,
    partial_sums: Vec<S>,
}

impl<S: Scalar> EnergySeries<S> {
    pub fn from_corrections(corrections: Vec<S>) -> Self {
        let mut partial_sums = Vec::with_capacity(corrections.len());
        let mut running: Option<S> = None;
        for e in &corrections {
            let next = match running.take() {
                None => e.clone(),
                Some(acc) => acc + e,
            };
            partial_sums.push(next.clone());
            running = Some(next);
        }
        Self {
            corrections,
            partial_sums,
        }
    }

    /// `E_1..E_K` (index 0 holds `E_1`).
    pub fn corrections(&self) -> &[S] {
        &self.corrections
    }

    /// `S_N = E_1 + ... + E_N` (index 0 holds `S_1`).
    pub fn partial_sums(&self) -> &[S] {
        &self.partial_sums
    }

    pub fn order(&self) -> usize {
        self.corrections.len()
    }

    /// `E_k`, 1-based.
    pub fn correction(&self, k: usize) -> Option<&S> {
        k.checked_sub(1).and_then(|i| self.corrections.get(i))
    }

    /// `S_N`, 1-based.
    pub fn partial_sum(&self, n: usize) -> Option<&S> {
        n.checked_sub(1).and_then(|i| self.partial_sums.get(i))
    }
}

/// The coefficient array `C[k][i]`, `k = 0..=K`, `i = 0..K`.
#[derive(Clone, Debug)]
pub struct LaurentTable<S> {
    levels: Vec<Vec<S>>,
    state: QuantumState,
    potential: PotentialSpec,
    omega0: S,
}

impl<S: Scalar> LaurentTable<S> {
    pub fn max_order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn width(&self) -> usize {
        self.levels[0].len()
    }

    pub fn get(&self, k: usize, i: usize) -> Option<&S> {
        self.levels.get(k).and_then(|level| level.get(i))
    }

    pub fn level(&self, k: usize) -> &[S] {
        &self.levels[k]
    }

    pub fn state(&self) -> QuantumState {
        self.state
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    /// Frequency the harmonic part was built on (ω itself when unrenormalized).
    pub fn omega0(&self) -> &S {
        &self.omega0
    }
}

/// Potential parameters converted to one backend.
#[derive(Clone, Debug)]
pub(crate) struct Inputs<S: Scalar> {
    pub mass: S,
    pub omega0: S,
    /// `ω² - ω₀²`; `None` for the unrenormalized recursion.
    pub shift: Option<S>,
    pub anharmonic: Vec<S>,
    pub state: QuantumState,
}

impl<S: Scalar> Inputs<S> {
    pub fn raw(potential: &PotentialSpec, state: QuantumState, ctx: &S::Context) -> Result<Self> {
        if !potential.omega().is_positive() {
            return Err(Error::SingularFrequency);
        }
        Ok(Self {
            mass: potential.mass().to_scalar(ctx)?,
            omega0: potential.omega().to_scalar(ctx)?,
            shift: None,
            anharmonic: potential
                .anharmonic()
                .iter()
                .map(|v| v.to_scalar(ctx))
                .collect::<Result<_>>()?,
            state,
        })
    }

    pub fn renormalized(
        potential: &PotentialSpec,
        state: QuantumState,
        omega0: S,
        ctx: &S::Context,
    ) -> Result<Self> {
        if omega0.is_zero() || omega0.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "trial frequency must be positive, got {}",
                omega0.render()
            )));
        }
        let omega: S = potential.omega().to_scalar(ctx)?;
        let shift = omega.mul_ref(&omega) - omega0.mul_ref(&omega0);
        Ok(Self {
            mass: potential.mass().to_scalar(ctx)?,
            omega0,
            shift: Some(shift),
            anharmonic: potential
                .anharmonic()
                .iter()
                .map(|v| v.to_scalar(ctx))
                .collect::<Result<_>>()?,
            state,
        })
    }

    /// `C[0][0..count]` from the square-root expansion of `-(2mV)^(1/2)/r`.
    pub fn c0(&self, count: usize, ctx: &S::Context) -> Vec<S> {
        let mut c0 = Vec::with_capacity(count);
        if count == 0 {
            return c0;
        }
        c0.push(-self.mass.mul_ref(&self.omega0));
        let two = S::from_i64(ctx, 2);
        let inv = S::one(ctx) / (two.clone() * &self.mass * &self.omega0);
        let two_m = two * &self.mass;
        for i in 1..count {
            let mut acc = S::zero(ctx);
            for p in 1..i {
                acc += c0[p].mul_ref(&c0[i - p]);
            }
            if let Some(v) = self.anharmonic.get(i - 1) {
                acc = acc - two_m.mul_ref(v);
            }
            c0.push(acc * &inv);
        }
        c0
    }

    /// Fills the table to `order` levels and returns it together with
    /// `E_1..E_order`.
    pub fn run(&self, order: usize, ctx: &S::Context) -> (Vec<Vec<S>>, Vec<S>) {
        let width = order;
        let c0 = self.c0(width, ctx);
        // -1/(2 C[0][0])
        let scale = S::one(ctx) / (S::from_i64(ctx, 2) * &self.mass * &self.omega0);
        let half_inv_mass = S::one(ctx) / (S::from_i64(ctx, 2) * &self.mass);
        let zero_count = S::from_i64(ctx, self.state.zero_count() as i64);
        let centrifugal = S::from_i64(ctx, self.state.centrifugal() as i64);
        let shift_term = self
            .shift
            .as_ref()
            .filter(|s| !s.is_zero())
            .map(|s| self.mass.mul_ref(&self.mass) * s);

        let mut levels: Vec<Vec<S>> = Vec::with_capacity(order + 1);
        levels.push(c0);
        let mut energies = Vec::with_capacity(order);

        for k in 1..=order {
            let mut row: Vec<S> = Vec::with_capacity(width);
            for i in 0..width {
                if i + 1 == k {
                    row.push(if k == 1 {
                        zero_count.clone()
                    } else {
                        S::zero(ctx)
                    });
                    continue;
                }
                // (3 - 2k + 2i) C[k-1][i]
                let factor = 3 - 2 * k as i64 + 2 * i as i64;
                let mut acc = S::from_i64(ctx, factor) * &levels[k - 1][i];
                acc += convolution(&levels, k, i, ctx);
                let c0 = &levels[0];
                let mut tail = S::zero(ctx);
                for p in 1..=i {
                    tail += c0[p].mul_ref(&row[i - p]);
                }
                acc += tail.clone() + &tail;
                if k == 2 && i == 0 {
                    acc = acc - &centrifugal;
                }
                if k == 1 && i == 1 {
                    if let Some(term) = &shift_term {
                        acc = acc - term;
                    }
                }
                row.push(acc * &scale);
            }
            levels.push(row);

            // 2m E_k = -C[k-1][k-1] - Σ_{j=0..k} Σ_{p=0..k-1} C[j][p] C[k-j][k-1-p]
            let mut acc = levels[k - 1][k - 1].clone();
            for j in 0..=k {
                let (a, b) = (&levels[j], &levels[k - j]);
                for p in 0..k {
                    acc += a[p].mul_ref(&b[k - 1 - p]);
                }
            }
            energies.push(-(acc * &half_inv_mass));
        }
        (levels, energies)
    }
}

/// `Σ_{j=1}^{k-1} Σ_{p=0}^{i} C[j][p] C[k-j][i-p]`, pairing `j` with `k - j`.
fn convolution<S: Scalar>(levels: &[Vec<S>], k: usize, i: usize, ctx: &S::Context) -> S {
    let mut paired = S::zero(ctx);
    let mut middle = S::zero(ctx);
    for j in 1..k {
        let partner = k - j;
        if j > partner {
            break;
        }
        let (a, b) = (&levels[j], &levels[partner]);
        let mut s = S::zero(ctx);
        for p in 0..=i {
            s += a[p].mul_ref(&b[i - p]);
        }
        if j == partner {
            middle = s;
        } else {
            paired += s;
        }
    }
    paired.clone() + &paired + &middle
}

/// `C[0][0..count]`: `C[0][0] = -mω`, then the square-root recursion.
pub fn c0_coefficients<S: Scalar>(
    potential: &PotentialSpec,
    count: usize,
    ctx: &S::Context,
) -> Result<Vec<S>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let inputs = Inputs::<S>::raw(potential, QuantumState::GROUND, ctx)?;
    Ok(inputs.c0(count, ctx))
}

/// Builds the Laurent table up to order `order` (levels `0..=order`, each
/// of width `order`).
pub fn build_table<S: Scalar>(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    ctx: &S::Context,
) -> Result<LaurentTable<S>> {
    check_order(order)?;
    let inputs = Inputs::<S>::raw(potential, state, ctx)?;
    let (levels, _) = inputs.run(order, ctx);
    Ok(LaurentTable {
        levels,
        state,
        potential: potential.clone(),
        omega0: inputs.omega0,
    })
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidArgument("order must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Energy corrections `E_1..E_order` read off a completed table.
pub fn energy_corrections<S: Scalar>(
    table: &LaurentTable<S>,
    order: usize,
    ctx: &S::Context,
) -> Result<EnergySeries<S>> {
    check_order(order)?;
    if order > table.max_order() {
        return Err(Error::InvalidArgument(format!(
            "table holds {} orders, {order} requested",
            table.max_order()
        )));
    }
    let levels = &table.levels;
    let mass: S = table.potential.mass().to_scalar(ctx)?;
    let half_inv_mass = S::one(ctx) / (S::from_i64(ctx, 2) * mass);
    let corrections = (1..=order)
        .map(|k| {
            let mut acc = levels[k - 1][k - 1].clone();
            for j in 0..=k {
                for p in 0..k {
                    acc += levels[j][p].mul_ref(&levels[k - j][k - 1 - p]);
                }
            }
            -(acc * &half_inv_mass)
        })
        .collect();
    Ok(EnergySeries::from_corrections(corrections))
}

/// `E_1..E_order` of the unrenormalized series.
pub fn raw_energy<S: Scalar>(
    potential: &PotentialSpec,
    state: QuantumState,
    order: usize,
    ctx: &S::Context,
) -> Result<EnergySeries<S>> {
    check_order(order)?;
    let inputs = Inputs::<S>::raw(potential, state, ctx)?;
    let (_, energies) = inputs.run(order, ctx);
    Ok(EnergySeries::from_corrections(energies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Param;
    use crate::scalar::{BigFloat, Precision, Rational};

    fn rat(num: i64, den: i64) -> Rational {
        Rational::from(num) / Rational::from(den)
    }

    fn sextic(lambda: Param, mu: Param) -> PotentialSpec {
        PotentialSpec::sextic(Param::int(1), lambda, mu).unwrap()
    }

    /// Coefficients of `-sqrt(1 + x)` as a power series, computed by the
    /// generalized binomial theorem; independent of the recursion.
    fn neg_sqrt_series(terms: usize) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut binom = rat(1, 1);
        for k in 0..terms {
            out.push(-binom.clone());
            // binom(1/2, k+1) = binom(1/2, k) * (1/2 - k) / (k + 1)
            binom = binom * (rat(1, 2) - rat(k as i64, 1)) / rat(k as i64 + 1, 1);
        }
        out
    }

    #[test]
    fn harmonic_c0_is_exact() {
        let p = PotentialSpec::harmonic(Param::int(1)).unwrap();
        let c0: Vec<Rational> = c0_coefficients(&p, 5, &()).unwrap();
        assert_eq!(c0[0], rat(-1, 1));
        assert!(c0[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn c0_matches_square_root_expansion() {
        // -(1 + 2λ r²)^(1/2) with x = 2λ r²: coefficient of r^(2i) is
        // s_i (2λ)^i.
        let lambda = rat(3, 7);
        let p = PotentialSpec::new(
            Param::int(1),
            Param::int(1),
            vec![Param::Exact(lambda.clone())],
        )
        .unwrap();
        let c0: Vec<Rational> = c0_coefficients(&p, 6, &()).unwrap();
        let series = neg_sqrt_series(6);
        let mut power = rat(1, 1);
        for (i, s) in series.iter().enumerate() {
            assert_eq!(c0[i], s.clone() * power.clone(), "i = {i}");
            power = power * rat(2, 1) * lambda.clone();
        }
        assert_eq!(c0[1], -lambda);
    }

    #[test]
    fn c0_second_coefficient_with_sextic_term() {
        let (lambda, mu) = (rat(2, 5), rat(3, 11));
        let p = sextic(Param::Exact(lambda.clone()), Param::Exact(mu.clone()));
        let c0: Vec<Rational> = c0_coefficients(&p, 3, &()).unwrap();
        // -(1 + 2λx + 2μx²)^(1/2), coefficient of x²: -(2μ)/2 + (2λ)²/8
        let expected = lambda.clone() * lambda / rat(2, 1) - mu;
        assert_eq!(c0[2], expected);
    }

    #[test]
    fn zero_frequency_is_singular_here() {
        let p = PotentialSpec::new(Param::int(1), Param::int(0), vec![Param::int(1)]).unwrap();
        assert_eq!(
            raw_energy::<f64>(&p, QuantumState::GROUND, 3, &()).unwrap_err(),
            Error::SingularFrequency
        );
        assert!(c0_coefficients::<f64>(&p, 3, &()).is_err());
    }

    #[test]
    fn quantization_slots() {
        let p = sextic(Param::ratio(1, 10), Param::ratio(1, 100));
        for state in [QuantumState::new(0, 0), QuantumState::new(2, 3)] {
            let table: LaurentTable<Rational> = build_table(&p, state, 8, &()).unwrap();
            assert_eq!(table.get(1, 0), Some(&rat(state.zero_count() as i64, 1)));
            for k in 2..=8 {
                assert!(table.get(k, k - 1).unwrap().is_zero(), "k = {k}");
            }
            assert_eq!(table.get(0, 0), Some(&rat(-1, 1)));
        }
    }

    #[test]
    fn harmonic_ground_state_has_no_higher_levels() {
        // C(r) = (l+1)/r - ωr exactly for the ground state of each l.
        let p = PotentialSpec::harmonic(Param::int(1)).unwrap();
        for l in 0..3 {
            let table: LaurentTable<Rational> =
                build_table(&p, QuantumState::new(0, l), 6, &()).unwrap();
            assert_eq!(table.get(1, 0), Some(&rat(l as i64 + 1, 1)));
            for k in 2..=6 {
                assert!(
                    table.level(k).iter().all(|c| c.is_zero()),
                    "l = {l}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn harmonic_spectrum_and_nullity() {
        let p = PotentialSpec::harmonic(Param::ratio(3, 2)).unwrap();
        for n in 0..3 {
            for l in 0..3 {
                let state = QuantumState::new(n, l);
                let series: EnergySeries<Rational> = raw_energy(&p, state, 8, &()).unwrap();
                let level = rat(2 * (2 * n as i64 + l as i64) + 3, 2) * rat(3, 2);
                assert_eq!(series.correction(1), Some(&level));
                assert!(series.corrections()[1..].iter().all(|e| e.is_zero()));
                assert_eq!(series.partial_sum(8), Some(&level));
            }
        }
    }

    #[test]
    fn first_order_corrections_for_ground_state() {
        let (lambda, mu) = (rat(1, 10), rat(1, 100));
        let p = sextic(Param::Exact(lambda.clone()), Param::Exact(mu.clone()));
        let series: EnergySeries<Rational> = raw_energy(&p, QuantumState::GROUND, 3, &()).unwrap();
        assert_eq!(series.corrections()[1], rat(15, 4) * lambda.clone());
        let e3 = rat(3, 8) * (rat(-55, 1) * lambda.clone() * lambda + rat(35, 1) * mu);
        assert_eq!(series.corrections()[2], e3);
    }

    #[test]
    fn table_energies_agree_with_fused_run() {
        let p = sextic(Param::ratio(1, 3), Param::ratio(1, 5));
        let state = QuantumState::new(1, 2);
        let table: LaurentTable<Rational> = build_table(&p, state, 7, &()).unwrap();
        let from_table = energy_corrections(&table, 7, &()).unwrap();
        let fused: EnergySeries<Rational> = raw_energy(&p, state, 7, &()).unwrap();
        assert_eq!(from_table, fused);
        assert!(energy_corrections(&table, 8, &()).is_err());
    }

    #[test]
    fn partial_sums_telescope() {
        let p = sextic(Param::ratio(1, 2), Param::ratio(1, 3));
        let series: EnergySeries<Rational> =
            raw_energy(&p, QuantumState::new(1, 0), 10, &()).unwrap();
        for n in 2..=10 {
            let diff = series.partial_sum(n).unwrap().clone() - series.partial_sum(n - 1).unwrap();
            assert_eq!(&diff, series.correction(n).unwrap());
        }
    }

    #[test]
    fn big_float_tracks_rational() {
        let p = sextic(Param::ratio(1, 1), Param::ratio(1, 1));
        let ctx = Precision::from_digits(40);
        let exact: EnergySeries<Rational> = raw_energy(&p, QuantumState::GROUND, 12, &()).unwrap();
        let approx: EnergySeries<BigFloat> =
            raw_energy(&p, QuantumState::GROUND, 12, &ctx).unwrap();
        for (e, a) in exact.corrections().iter().zip(approx.corrections()) {
            let e_f = BigFloat::from_ratio(&ctx, e);
            let rel = Scalar::to_f64(&((a.clone() - &e_f) / e_f)).abs();
            assert!(rel < 1e-35, "relative deviation {rel}");
        }
    }

    #[test]
    fn order_zero_is_rejected() {
        let p = PotentialSpec::harmonic(Param::int(1)).unwrap();
        assert!(raw_energy::<f64>(&p, QuantumState::GROUND, 0, &()).is_err());
        assert!(build_table::<f64>(&p, QuantumState::GROUND, 0, &()).is_err());
    }
}
