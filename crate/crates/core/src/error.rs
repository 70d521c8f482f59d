use crate::conditions::ConditionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("no data: {0}")]
    NoData(&'static str),

    #[error("condition ({}) not satisfied on the checked range", .0.condition)]
    ConditionFailed(Box<ConditionReport>),

    #[error(
        "infeasible run: needs about {required_jumps} jumps (~{required_bytes} bytes), budget is {budget_jumps} jumps"
    )]
    Infeasible {
        required_jumps: u64,
        required_bytes: u64,
        budget_jumps: u64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
