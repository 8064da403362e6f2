use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("harmonic frequency is zero; the unrenormalized recursion divides by m*omega (use the renormalized engine)")]
    SingularFrequency,

    #[error("backend cannot represent input: {0}")]
    Backend(String),

    #[error(
        "no root of the {target} bracketed in [{lo}, {hi}] (target at endpoints: {f_lo:e}, {f_hi:e})"
    )]
    NoRoot {
        target: String,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error(
        "no eigenvalue with {nodes} nodes in [{e_lo}, {e_hi}] (node counts at ends: {nodes_lo}, {nodes_hi})"
    )]
    NoEigenvalue {
        nodes: u32,
        e_lo: f64,
        e_hi: f64,
        nodes_lo: u32,
        nodes_hi: u32,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
