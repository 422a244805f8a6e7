use thiserror::Error;

/// Errors raised by model construction, engine steps and estimators.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar field violates its domain constraint.
    #[error("invalid {field}: {reason}")]
    InvalidField { field: &'static str, reason: String },

    /// Markets with fewer than two brands are outside the model.
    #[error("a competitive market needs at least two brands, got {0}")]
    Monopoly(usize),

    /// Total sales are zero, so sales-weighted means are undefined.
    #[error("degenerate market: total sales are zero")]
    DegenerateMarket,

    /// No preference-weighted inventory mass; nothing can transact.
    #[error("zero preference-inventory mass: the market cannot transact")]
    NoInventoryMass,

    /// The demand quadratic is clamped at zero here; its slope is undefined.
    #[error("demand slope undefined at mean price {mean_price}: outside the quadratic region")]
    ClampedDemand { mean_price: f64 },

    /// Reproduction coefficients below -1 would make supply negative.
    #[error("reproduction coefficient {0} below -1")]
    GammaBelowFloor(f64),

    /// Demand rate is zero; the mean reproduction coefficient is undefined.
    #[error("zero demand rate: mean reproduction coefficient undefined")]
    ZeroDemand,

    /// An explicit Euler step would cross a sales sign boundary.
    #[error("replicator step too large: dt * max|r| = {0} >= 1, reduce dt")]
    StepTooLarge(f64),

    /// Zero noise amplitude collapses the stationary law to a point mass.
    #[error("zero noise amplitude: stationary price density degenerates to a point mass")]
    DegenerateNoise,

    /// A stabilizing jump was requested in an already stable market.
    #[error("market is already stable: no price jump applies")]
    AlreadyStable,

    /// No jump inside the demand region can restore excess supply.
    #[error("shortage unresolved: no price jump inside the demand region restores excess supply")]
    ShortageUnresolved,

    /// Bernoulli thinning of jump arrivals needs f * dt <= 0.1.
    #[error("jump arrival rate f * dt = {0} exceeds 0.1, refine dt")]
    JumpRateTooHigh(f64),

    /// Too few samples or snapshots for the requested analysis.
    #[error("series too short: need at least {need}, got {got}")]
    SeriesTooShort { need: usize, got: usize },

    /// A constant series carries no information for calibration.
    #[error("degenerate series: sample variance is zero")]
    DegenerateSeries,

    /// All samples identical: scale parameters are undefined.
    #[error("all samples identical: scale undefined")]
    IdenticalSamples,

    /// Log-size fits need strictly positive sizes.
    #[error("non-positive size in sample set")]
    NonPositiveSize,

    /// Zero sales inside a substitution-analysis window.
    #[error("zero sales inside the analysis window for brand {brand}")]
    ZeroSalesInWindow { brand: usize },

    /// An engine step failed; carries the long-step index for context.
    #[error("long step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidField {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
