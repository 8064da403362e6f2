//! Closed-form energy corrections used as fixed points for testing.
//!
//! These are transcriptions, kept independent of the recursion: the general
//! first five corrections for `ω²r²/2 + λr⁴ + μr⁶` (unit mass), the six
//! corrections of the `(n, l) = (0, 1)` level of `a r² + (b/3) r⁴ + (c/9) r⁶`,
//! and that family's quasi-exact eigenvalue.

use crate::error::{Error, Result};
use crate::potential::QuantumState;
use crate::scalar::Scalar;

/// Inputs to the general closed forms; the mass is fixed to one.
#[derive(Clone, Debug)]
pub struct ClosedFormInputs<S> {
    pub omega: S,
    pub lambda: S,
    pub mu: S,
    pub state: QuantumState,
}

fn int<S: Scalar>(ctx: &S::Context, v: i64) -> S {
    S::from_i64(ctx, v)
}

fn pow<S: Scalar>(x: &S, e: u32, ctx: &S::Context) -> S {
    (0..e).fold(S::one(ctx), |acc, _| acc * x)
}

/// `E_1..E_5` with `N = 2n+l+1`, `η = N(N+1)`, `L = l(l+1)`.
pub fn eq17_corrections<S: Scalar>(inputs: &ClosedFormInputs<S>, ctx: &S::Context) -> [S; 5] {
    let w = &inputs.omega;
    let lam = &inputs.lambda;
    let mu = &inputs.mu;
    let n = int::<S>(ctx, inputs.state.zero_count() as i64);
    let eta = int::<S>(ctx, inputs.state.eta() as i64);
    let l = int::<S>(ctx, inputs.state.centrifugal() as i64);
    let c = |v: i64| int::<S>(ctx, v);
    let w2 = pow(w, 2, ctx);
    let w4 = pow(w, 4, ctx);
    let one_plus_2n = c(1) + c(2) * &n;

    let e1 = one_plus_2n.clone() / c(2) * w;

    let e2 = (c(3) - c(2) * &l + c(6) * &eta) * lam / (c(4) * &w2);

    let e3 = one_plus_2n.clone() / (c(8) * pow(w, 5, ctx))
        * ((c(-21) + c(9) * &l - c(17) * &eta) * pow(lam, 2, ctx)
            + (c(15) - c(6) * &l + c(10) * &eta) * &w2 * mu);

    let e4 = (c(1) / (c(16) * pow(w, 8, ctx)))
        * ((c(333) + c(11) * pow(&l, 2, ctx) - c(3) * &l * (c(67) + c(86) * &eta)
            + c(3) * &eta * (c(347) + c(125) * &eta))
            * pow(lam, 3, ctx)
            - c(6)
                * (c(60) + c(3) * (c(-13) + l.clone()) * &l + c(175) * &eta - c(42) * &l * &eta
                    + c(55) * pow(&eta, 2, ctx))
                * &w2
                * lam
                * mu);

    let e5 = -(one_plus_2n / (c(128) * pow(w, 11, ctx)))
        * ((c(30885) + c(909) * pow(&l, 2, ctx) - c(27) * &l * (c(613) + c(330) * &eta)
            + eta.clone() * (c(49927) + c(10689) * &eta))
            * pow(lam, 4, ctx)
            - c(4)
                * (c(11220) + c(393) * pow(&l, 2, ctx) - c(6) * &l * (c(1011) + c(475) * &eta)
                    + eta.clone() * (c(16342) + c(3129) * &eta))
                * &w2
                * pow(lam, 2, ctx)
                * mu
            + c(2)
                * (c(3495)
                    + c(138) * pow(&l, 2, ctx)
                    + c(4538) * &eta
                    + c(786) * pow(&eta, 2, ctx)
                    - c(30) * &l * (c(63) + c(26) * &eta))
                * &w4
                * pow(mu, 2, ctx));

    [e1, e2, e3, e4, e5]
}

/// `(2n + l + 3/2) ω`.
pub fn oscillator_approximation<S: Scalar>(omega: &S, state: QuantumState, ctx: &S::Context) -> S {
    let twice = 2 * (2 * state.n as i64 + state.l as i64) + 3;
    S::from_i64(ctx, twice) / S::from_i64(ctx, 2) * omega
}

fn root<S: Scalar>(x: &S, what: &str) -> Result<S> {
    x.sqrt().ok_or_else(|| {
        Error::Backend(format!(
            "square root of {what} = {} is not representable on this backend",
            x.render()
        ))
    })
}

/// Corrections `E_1..E_6` of the `(n, l) = (0, 1)` level of
/// `a r² + (b/3) r⁴ + (c/9) r⁶`.
pub fn eq101_corrections<S: Scalar>(a: &S, b: &S, c: &S, ctx: &S::Context) -> Result<[S; 6]> {
    if a.is_zero() || a.is_negative() {
        return Err(Error::InvalidArgument("a must be positive".into()));
    }
    let k = |v: i64| int::<S>(ctx, v);
    // √a/√2 is evaluated as √(a/2) so that exact backends can take it.
    let sqrt_a_over_2 = root(&(a.clone() / k(2)), "a/2")?;
    let sqrt_2a5 = root(&(k(2) * pow(a, 5, ctx)), "2a^5")?;
    let sqrt_2a11 = root(&(k(2) * pow(a, 11, ctx)), "2a^11")?;
    let b2 = pow(b, 2, ctx);

    let e1 = k(5) * sqrt_a_over_2;
    let e2 = k(35) * b / (k(24) * a);
    let e3 = k(35) * (k(-5) * &b2 + k(6) * a * c) / (k(96) * sqrt_2a5);
    let e4 = k(35) * (k(475) * pow(b, 3, ctx) - k(864) * a * b * c) / (k(6912) * pow(a, 4, ctx));
    let e5 = k(-35)
        * (k(27565) * pow(b, 4, ctx) - k(67488) * a * &b2 * c
            + k(17688) * pow(a, 2, ctx) * pow(c, 2, ctx))
        / (k(110592) * sqrt_2a11);
    let e6 = k(35)
        * (k(1451815) * pow(b, 5, ctx) - k(4482360) * a * pow(b, 3, ctx) * c
            + k(2489328) * pow(a, 2, ctx) * b * pow(c, 2, ctx))
        / (k(2654208) * pow(a, 7, ctx));
    Ok([e1, e2, e3, e4, e5, e6])
}

/// The constrained `b` and the exact `(0, 1)` eigenvalue of the
/// quasi-exactly solvable family.
pub fn quasi_exact_energy<S: Scalar>(a: &S, c: &S, ctx: &S::Context) -> Result<(S, S)> {
    if a.is_zero() || a.is_negative() || c.is_negative() {
        return Err(Error::InvalidArgument("need a > 0 and c >= 0".into()));
    }
    let k = |v: i64| int::<S>(ctx, v);
    let sqrt_2c = root(&(k(2) * c), "2c")?;
    let inner = root(&(k(2) * a + k(7) / k(3) * &sqrt_2c), "2a + 7/3 sqrt(2c)")?;
    let b = sqrt_2c * &inner;
    let energy = k(5) / k(2) * inner;
    Ok((b, energy))
}
