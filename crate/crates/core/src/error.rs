use thiserror::Error;

/// Errors surfaced by the library. Variants are grouped by the stage that
/// raises them so the CLI can map them onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed numeral {0:?}")]
    Numeral(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("orientation: expected {expected} ({orientation}) for {what}")]
    Orientation {
        what: String,
        expected: &'static str,
        orientation: &'static str,
    },
    #[error("chain {0} has fewer than 3 points")]
    ShortChain(String),
    #[error("chain {0} repeats a point on consecutive vertices")]
    RepeatedPoint(String),
    #[error("chain {0} is self-intersecting")]
    SelfIntersecting(String),
    #[error("chain {0} has zero area")]
    ZeroArea(String),
    #[error("hole {hole} of polygon {polygon} is not strictly inside its solid chain or overlaps another hole")]
    HoleOutside { polygon: usize, hole: usize },
    #[error("weight must be positive, got {0}")]
    NonPositiveWeight(String),
    #[error("color {0} has no mass")]
    EmptyColor(usize),
    #[error("instance has no colors")]
    NoColors,
    #[error("instance has zero extent")]
    ZeroExtent,
    #[error("instance is not normalized into the unit square")]
    NotNormalized,
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("obtuse triangle passed to the axis-aligned decomposition")]
    ObtuseTriangle,
    #[error("degenerate triangle")]
    DegenerateTriangle,
    #[error("invalid strip [{lo}, {hi}]")]
    InvertedStrip { lo: String, hi: String },
    #[error("sphere point: {0}")]
    SpherePoint(String),
    #[error("all slice variables are zero")]
    AllZeroSlices,
    #[error("solver configuration: {0}")]
    Config(String),
    #[error("grid search would visit {points} points, above the budget of {budget}")]
    GridTooLarge { points: u128, budget: u128 },
    #[error("consensus-halving instance: {0}")]
    ChInstance(String),
    #[error("reduction: {0}")]
    Reduction(String),
    #[error("map-back: {0}")]
    MapBack(String),
    #[error("degenerate line (a = b = 0)")]
    DegenerateLine,
    #[error("cut {0} lies outside the valuation domain")]
    CutOutside(String),
    #[error("etr: {0}")]
    Etr(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
