use thiserror::Error;

/// Errors raised by the transform pipelines.
#[derive(Debug, Error)]
pub enum NlftError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid of size {grid} aliases a Laurent polynomial of bandwidth {bandwidth}")]
    Alias { grid: usize, bandwidth: usize },

    #[error("grid size {0} is not a power of two >= 2")]
    InvalidGrid(usize),

    #[error("supports overlap: first ends at {first_end}, shifted second starts at {second_start}")]
    SupportOverlap { first_end: i64, second_start: i64 },

    #[error("extremal Schur function: |f(0)| = {0} >= 1")]
    Extremal(f64),

    #[error("grid of size {grid} too coarse for {nu} arcs (need >= {required})")]
    GridTooCoarse { grid: usize, nu: usize, required: usize },

    #[error("daisy certification failed at petal {petal}: {reason}")]
    DaisyCertification { petal: usize, reason: String },

    #[error("degenerate Schur data: |f| = {0} >= 1 on the grid")]
    Degenerate(f64),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, NlftError>;
