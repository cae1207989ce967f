//! Scalar expressions of one variable, evaluated as derivative jets.

mod ast;
mod eval;
mod jet;
mod parser;

pub use ast::{BinaryOp, Expr, NamedConst, UnaryOp};
pub use eval::{curve_jet, eval_jet, eval_value};
pub use jet::{Jet, VecJet, MAX_ORDER};
pub use parser::{parse_curve, parse_expression, VARIABLE_NAMES};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at offset {offset} depends on the variable")]
    NonConstantExponent { offset: usize },
    #[error("expected 3 comma-separated components, found {found}")]
    ComponentCount { found: usize },
    #[error("domain error in '{node}' at t = {t}: {reason}")]
    Domain { node: String, t: f64, reason: String },
    #[error("jet order {requested} exceeds the maximum of {max}")]
    OrderTooHigh { requested: usize, max: usize },
    #[error("component {component}: {source}")]
    Component {
        /// 1-based component index (1 = x).
        component: usize,
        #[source]
        source: Box<ExprError>,
    },
}

impl ExprError {
    /// Byte offset of a parse error in the text that was parsed.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { offset, .. }
            | ExprError::UnknownIdentifier { offset, .. }
            | ExprError::NonConstantExponent { offset } => Some(*offset),
            ExprError::Component { source, .. } => source.offset(),
            _ => None,
        }
    }

    /// Moves a parse position by `by` bytes, for errors inside a larger text.
    pub(crate) fn shifted(self, by: usize) -> Self {
        match self {
            ExprError::Syntax { offset, message } => ExprError::Syntax {
                offset: offset + by,
                message,
            },
            ExprError::UnknownIdentifier { offset, name } => ExprError::UnknownIdentifier {
                offset: offset + by,
                name,
            },
            ExprError::NonConstantExponent { offset } => ExprError::NonConstantExponent { offset: offset + by },
            other => other,
        }
    }
}
