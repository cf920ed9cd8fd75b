use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use regex_automata::meta::Regex;
use regex_automata::util::syntax;

use super::{CmpOp, PathPredicate, Pattern, QueryExpr, Test};
use crate::document::{from_json_text, DocValue, JsonSyntaxError, Object, Path, PathError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error(transparent)]
    Json(#[from] JsonSyntaxError),
    #[error("a query must be a JSON object, found {0}")]
    NotAnObject(&'static str),
    #[error("unsupported operator {0}")]
    UnsupportedOperator(String),
    #[error("invalid operand for {operator}: {reason}")]
    InvalidOperand { operator: String, reason: String },
    #[error("invalid path: {0}")]
    InvalidPath(#[from] PathError),
    #[error("invalid regular expression {pattern:?}: {message}")]
    InvalidRegex { pattern: String, message: String },
}

/// Parse query text into a [`QueryExpr`].
pub fn parse_query(text: &str) -> Result<QueryExpr, QueryError> {
    match from_json_text(text)? {
        DocValue::Object(obj) => query_from_object(&obj),
        other => Err(QueryError::NotAnObject(other.type_name())),
    }
}

/// Build a query from an already parsed filter object.
pub fn query_from_object(filter: &Object) -> Result<QueryExpr, QueryError> {
    let mut predicates = Vec::new();
    for (key, value) in filter.iter() {
        if key.starts_with('$') {
            return Err(QueryError::UnsupportedOperator(String::from(key)));
        }
        let path = Path::parse(key)?;
        match value {
            DocValue::Object(ops) if ops.keys().any(|k| k.starts_with('$')) => {
                operator_predicates(&path, ops, &mut predicates)?;
            }
            other => predicates.push(PathPredicate { path, test: Test::Eq(other.clone()) }),
        }
    }
    Ok(QueryExpr { predicates })
}

fn operator_predicates(path: &Path, ops: &Object, out: &mut Vec<PathPredicate>) -> Result<(), QueryError> {
    let options = match ops.get("$options") {
        None => "",
        Some(DocValue::String(s)) => s.as_str(),
        Some(_) => return Err(invalid("$options", "expected a string")),
    };
    if !options.is_empty() && !ops.contains_key("$regex") {
        return Err(invalid("$options", "only valid together with $regex"));
    }
    for (op, operand) in ops.iter() {
        let test = match op {
            "$regex" => {
                let source = operand.as_str().ok_or_else(|| invalid(op, "expected a string"))?;
                Test::Regex(compile(source, options)?)
            }
            "$options" => continue,
            "$lt" | "$lte" | "$gt" | "$gte" => {
                let bound = operand.as_f64().ok_or_else(|| invalid(op, "expected a number"))?;
                let cmp = match op {
                    "$lt" => CmpOp::Lt,
                    "$lte" => CmpOp::Lte,
                    "$gt" => CmpOp::Gt,
                    _ => CmpOp::Gte,
                };
                Test::Cmp(cmp, bound)
            }
            "$exists" => match operand {
                DocValue::Bool(b) => Test::Exists(*b),
                DocValue::Number(n) => Test::Exists(*n != 0.0),
                _ => return Err(invalid(op, "expected a boolean")),
            },
            other if other.starts_with('$') => return Err(QueryError::UnsupportedOperator(String::from(other))),
            other => return Err(invalid(other, "operators cannot be mixed with plain fields")),
        };
        out.push(PathPredicate { path: path.clone(), test });
    }
    Ok(())
}

fn invalid(operator: &str, reason: &str) -> QueryError {
    QueryError::InvalidOperand { operator: String::from(operator), reason: String::from(reason) }
}

fn compile(source: &str, options: &str) -> Result<Pattern, QueryError> {
    let mut config = syntax::Config::new();
    for flag in options.chars() {
        config = match flag {
            'i' => config.case_insensitive(true),
            'm' => config.multi_line(true),
            's' => config.dot_matches_new_line(true),
            'x' => config.ignore_whitespace(true),
            other => return Err(invalid("$options", &format!("unknown flag {other:?}"))),
        };
    }
    let regex = Regex::builder()
        .syntax(config)
        .build(source)
        .map_err(|e| QueryError::InvalidRegex { pattern: String::from(source), message: format!("{e}") })?;
    Ok(Pattern { source: String::from(source), options: String::from(options), regex })
}
