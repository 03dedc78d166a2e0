pub mod expression;

pub use expression::{parse_expression, MomentExpression};
