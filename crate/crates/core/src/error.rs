use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("disks {0} and {1} have coincident centers")]
    CoincidentCenters(usize, usize),

    #[error("point is not on the bisector of disks {0} and {1} (gap {2:e})")]
    NotOnBisector(usize, usize, f64),

    #[error("no tangent disk for triple ({0}, {1}, {2})")]
    NoSolution(usize, usize, usize),

    #[error("disks are not in strongly convex position")]
    NotStronglyConvex,

    #[error("disks are not in convex position")]
    NotConvexPosition,

    #[error("need at least 3 disks, got {0}")]
    TooFewDisks(usize),

    #[error("k = {k} is infeasible for {n} disks")]
    InfeasibleK { k: usize, n: usize },

    #[error("instance of {n} disks exceeds the budget of {max}")]
    BudgetExceeded { n: usize, max: usize },

    #[error("enumeration exceeded its time budget")]
    Timeout,

    #[error("instance of {n} disks exceeds the solver cap of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid disk {id}: {reason}")]
    InvalidDisk { id: usize, reason: String },

    #[error("hull arc of disk {0} is adjacent to another arc of the same disk")]
    SelfAdjacentArc(usize),

    #[error("could not place an auxiliary point: {0}")]
    AuxiliaryPlacement(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("instance generation failed after {0} attempts")]
    GenerationFailed(usize),
}
