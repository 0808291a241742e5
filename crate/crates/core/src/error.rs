use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex at vertex {0}")]
    NotStrictlyConvex(usize),
    #[error("non-finite vertex coordinate")]
    NonFinite,
    #[error("rectangle must have positive size, got {width} x {height}")]
    DegenerateRectangle { width: f64, height: f64 },
    #[error("point ({x}, {y}) lies strictly inside an obstacle")]
    InsideObstacle { x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("distance {distance} is below the singular band {s_min}")]
    SingularProximity { distance: f64, s_min: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("direction undefined: {0}")]
    DegenerateDirection(&'static str),
}

impl From<GeometryError> for ControlError {
    fn from(e: GeometryError) -> Self {
        ControlError::Field(FieldError::Geometry(e))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("no path between the requested cells")]
    NoPath,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("override `{text}`: {message}")]
    Override { text: String, message: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("scenario rejected:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("physics violation at t={time}: {message}")]
    PhysicsViolation { time: f64, message: String },
    #[error("scenario generation failed: {0}")]
    Generator(String),
    #[error(transparent)]
    Control(#[from] ControlError),
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema mismatch: {0}")]
    Schema(String),
}
