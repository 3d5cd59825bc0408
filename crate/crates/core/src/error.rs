use thiserror::Error;

/// Errors surfaced by the simulation and verification layers.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("band edge {requested} reaches below the inner cutoff {cutoff}; the jump measure below the cutoff is not simulated")]
    CutoffViolation { requested: f64, cutoff: f64 },

    #[error("time step underflow at t = {time} (h-norm {h_norm:.6e}, dt {dt:.3e}): drift too stiff for explicit stepping")]
    Stiffness { time: f64, h_norm: f64, dt: f64 },

    #[error("tail moment of order {order} diverges for stability index {alpha}; orders must stay below the index")]
    InfiniteTailMoment { order: f64, alpha: f64 },

    #[error("empty sample set: {context}")]
    EmptySamples { context: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidParameter(msg.into())
    }
}
