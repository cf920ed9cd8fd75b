use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{DocValue, Object};

/// A dotted access path such as `BIB.REACTION` or `SUBENT.0.ID`.
///
/// An all-digit segment indexes into arrays; on objects it is an ordinary
/// key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    segments: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("empty path")]
    Empty,
    #[error("path {0:?} has an empty segment")]
    EmptySegment(String),
    #[error("segment {segment:?} addresses into a {found}")]
    PathThroughScalar { segment: String, found: &'static str },
    #[error("segment {segment:?} is not a valid index for an array of length {len}")]
    BadIndex { segment: String, len: usize },
}

impl Path {
    pub fn parse(text: &str) -> Result<Path, PathError> {
        if text.is_empty() {
            return Err(PathError::Empty);
        }
        let segments: Vec<String> = text.split('.').map(String::from).collect();
        if segments.iter().any(String::is_empty) {
            return Err(PathError::EmptySegment(String::from(text)));
        }
        Ok(Path { segments })
    }

    pub fn from_segments<I, S>(segments: I) -> Result<Path, PathError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(PathError::Empty);
        }
        if segments.iter().any(String::is_empty) {
            return Err(PathError::EmptySegment(segments.join(".")));
        }
        Ok(Path { segments })
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    /// True for the single-segment path `key`.
    pub fn is_key(&self, key: &str) -> bool {
        self.segments.len() == 1 && self.segments[0] == key
    }
}

impl FromStr for Path {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Path::parse(s)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

fn as_index(segment: &str) -> Option<usize> {
    if segment.bytes().all(|b| b.is_ascii_digit()) {
        segment.parse().ok()
    } else {
        None
    }
}

/// Follow `path` from `value`. Missing keys, out-of-range indices and
/// descent into scalars all give `None`.
pub fn get_path<'a>(value: &'a DocValue, path: &Path) -> Option<&'a DocValue> {
    lookup(value, path.segments())
}

pub(crate) fn lookup<'a>(value: &'a DocValue, segments: &[String]) -> Option<&'a DocValue> {
    segments.iter().try_fold(value, |current, segment| step(current, segment))
}

pub(crate) fn lookup_in_object<'a>(object: &'a Object, segments: &[String]) -> Option<&'a DocValue> {
    let (first, rest) = segments.split_first()?;
    lookup(object.get(first)?, rest)
}

fn step<'a>(value: &'a DocValue, segment: &str) -> Option<&'a DocValue> {
    match value {
        DocValue::Object(o) => o.get(segment),
        DocValue::Array(a) => a.get(as_index(segment)?),
        _ => None,
    }
}

/// A copy of `value` with `path` set to `new`. Missing intermediate
/// objects are created.
pub fn set_path(value: &DocValue, path: &Path, new: DocValue) -> Result<DocValue, PathError> {
    let mut copy = value.clone();
    set_path_mut(&mut copy, path, new)?;
    Ok(copy)
}

/// In-place variant of [`set_path`]. On error `value` is left unchanged.
pub fn set_path_mut(value: &mut DocValue, path: &Path, new: DocValue) -> Result<(), PathError> {
    check_settable(value, path.segments())?;
    assign(value, path.segments(), new);
    Ok(())
}

fn check_settable(value: &DocValue, segments: &[String]) -> Result<(), PathError> {
    let Some((segment, rest)) = segments.split_first() else {
        return Ok(());
    };
    match value {
        DocValue::Object(o) => match o.get(segment) {
            Some(child) => check_settable(child, rest),
            None => Ok(()),
        },
        DocValue::Array(a) => match as_index(segment) {
            Some(i) if i < a.len() => check_settable(&a[i], rest),
            Some(i) if i == a.len() && rest.is_empty() => Ok(()),
            _ => Err(PathError::BadIndex { segment: segment.to_string(), len: a.len() }),
        },
        other => Err(PathError::PathThroughScalar {
            segment: segment.to_string(),
            found: other.type_name(),
        }),
    }
}

fn assign(value: &mut DocValue, segments: &[String], new: DocValue) {
    let Some((segment, rest)) = segments.split_first() else {
        *value = new;
        return;
    };
    match value {
        DocValue::Object(o) => {
            let child = o.get_or_insert_with(segment, || DocValue::Object(Object::new()));
            assign(child, rest, new);
        }
        DocValue::Array(a) => {
            let i = as_index(segment).expect("checked by check_settable");
            if i == a.len() {
                a.push(new);
            } else {
                assign(&mut a[i], rest, new);
            }
        }
        _ => unreachable!("checked by check_settable"),
    }
}
