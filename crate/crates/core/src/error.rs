use thiserror::Error;

use crate::expr::{Expr, Var};

/// Reasons a symbol is rejected by a [`Scope`](crate::expr::Scope).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("derivative order {order} exceeds the allowed maximum {max}")]
    OrderExceeded { order: u32, max: u32 },
    #[error("derivatives are not allowed in stencil expressions; use u[k] slots")]
    DerivativesNotAllowed,
    #[error("stencil slots u[k] are only allowed in discrete problems")]
    SlotsNotAllowed,
    #[error("slot {shift} lies outside the stencil window ±{window}")]
    WindowExceeded { shift: i32, window: i32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared symbol '{0}'")]
    UndeclaredSymbol(String),
    #[error("division is not supported; only rational literals like 1/2 may contain '/'")]
    Division,
    #[error("function '{0}' is not supported; expressions must be polynomial")]
    Function(String),
    #[error("{0}")]
    Scope(#[from] ScopeError),
}

/// Problem-language error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }

    pub fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        ParseError::new(line, column, ParseErrorKind::Syntax(msg.into()))
    }

    /// Shifts a position relative to an embedded snippet into file coordinates.
    pub fn offset(mut self, line: usize, column: usize) -> Self {
        if self.line == 1 {
            self.column += column - 1;
        }
        self.line += line - 1;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid declaration: {0}")]
    Space(String),
    #[error("derivative order {order} exceeds the prolongation headroom {max}")]
    OrderOverflow { order: u32, max: u32 },
    #[error("Lagrangian has order {order}, above the declared order {max}")]
    LagrangianOrder { order: u32, max: u32 },
    #[error("slot {shift} lies outside the stencil window ±{window}")]
    WindowOverflow { shift: i32, window: i32 },
    #[error("{what}: expected {expected} components, found {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid symmetry candidate: {0}")]
    InvalidCandidate(String),
    #[error("gauge operator for '{0}' is not linear and homogeneous in the arbitrary function")]
    NonLinearGauge(String),
    #[error("candidate is not a divergence symmetry")]
    NotASymmetry { residual: Expr },
    #[error("characteristic is not a discrete symmetry")]
    NotADiscreteSymmetry { residual: Expr },
    #[error("current is not a conservation law: its divergence does not vanish on-shell")]
    NotConserved { residual: Expr },
    #[error("on-shell reduction did not terminate within the derivative headroom")]
    NonTerminating,
    #[error("no value for symbol {0:?}")]
    MissingSymbol(Var),
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Stable CLI exit code: 2 parse, 3 math domain, 4 non-symmetry.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) | Error::Unknown { .. } => 2,
            Error::NotASymmetry { .. } | Error::NotADiscreteSymmetry { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
