use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PinError {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    Input(String),
    /// The network has more than one connected component.
    #[error("network is disconnected ({components} components); every criterion assumes a connected network")]
    Disconnected { components: usize },
    /// An iterative solver failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A request exceeds a hard capacity guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The security game has no successful attack to price.
    #[error("no successful attack exists; game degenerate")]
    DegenerateGame,
    /// A linear program has no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, PinError>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(PinError::Input(msg.into()))
}
