//! Property values, owned and borrowed.

use std::cmp::Ordering;
use std::fmt;

use chrono::{Days, NaiveDate};

use crate::ids::VertexId;

const EPOCH: NaiveDate = match NaiveDate::from_ymd_opt(1970, 1, 1) {
    Some(d) => d,
    None => panic!(),
};

/// Parses `YYYY-MM-DD` into days since 1970-01-01.
pub fn parse_date(s: &str) -> Option<i32> {
    let d = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()?;
    i32::try_from(d.signed_duration_since(EPOCH).num_days()).ok()
}

pub fn format_date(days: i32) -> String {
    let d = if days >= 0 {
        EPOCH.checked_add_days(Days::new(days as u64))
    } else {
        EPOCH.checked_sub_days(Days::new(days.unsigned_abs() as u64))
    };
    match d {
        Some(d) => d.format("%Y-%m-%d").to_string(),
        None => days.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Int64(i64),
    Double(f64),
    Bool(bool),
    Date(i32),
    String(String),
    Vertex(VertexId),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_ref(&self) -> ScalarRef<'_> {
        match self {
            Value::Null | Value::Vertex(_) => ScalarRef::Null,
            Value::Int64(v) => ScalarRef::Int(*v),
            Value::Double(v) => ScalarRef::Double(*v),
            Value::Bool(v) => ScalarRef::Bool(*v),
            Value::Date(v) => ScalarRef::Date(*v),
            Value::String(s) => ScalarRef::Str(s),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int64(_) | Value::Double(_) => 2,
            Value::Date(_) => 3,
            Value::String(_) => 4,
            Value::Vertex(_) => 5,
        }
    }

    /// A total order used to sort result sets; numbers compare by value.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Int64(a), Value::Int64(b)) => a.cmp(b),
            (Value::Int64(a), Value::Double(b)) => (*a as f64).total_cmp(b),
            (Value::Double(a), Value::Int64(b)) => a.total_cmp(&(*b as f64)),
            (Value::Double(a), Value::Double(b)) => a.total_cmp(b),
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Date(a), Value::Date(b)) => a.cmp(b),
            (Value::String(a), Value::String(b)) => a.cmp(b),
            (Value::Vertex(a), Value::Vertex(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Value {
    /// TSV rendering: NULL is the empty string, dates are ISO formatted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Int64(v) => write!(f, "{v}"),
            Value::Double(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Date(v) => f.write_str(&format_date(*v)),
            Value::String(s) => f.write_str(s),
            Value::Vertex(v) => write!(f, "{v}"),
        }
    }
}

/// A borrowed scalar read from storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarRef<'a> {
    Null,
    Int(i64),
    Double(f64),
    Bool(bool),
    Date(i32),
    Str(&'a str),
}

impl<'a> ScalarRef<'a> {
    pub fn is_null(&self) -> bool {
        matches!(self, ScalarRef::Null)
    }

    pub fn to_value(self) -> Value {
        match self {
            ScalarRef::Null => Value::Null,
            ScalarRef::Int(v) => Value::Int64(v),
            ScalarRef::Double(v) => Value::Double(v),
            ScalarRef::Bool(v) => Value::Bool(v),
            ScalarRef::Date(v) => Value::Date(v),
            ScalarRef::Str(s) => Value::String(s.to_owned()),
        }
    }

    /// SQL-style comparison: `None` when either side is NULL or the types are
    /// incomparable.
    #[inline]
    pub fn compare(self, other: ScalarRef<'_>) -> Option<Ordering> {
        match (self, other) {
            (ScalarRef::Int(a), ScalarRef::Int(b)) => Some(a.cmp(&b)),
            (ScalarRef::Int(a), ScalarRef::Double(b)) => (a as f64).partial_cmp(&b),
            (ScalarRef::Double(a), ScalarRef::Int(b)) => a.partial_cmp(&(b as f64)),
            (ScalarRef::Double(a), ScalarRef::Double(b)) => a.partial_cmp(&b),
            (ScalarRef::Date(a), ScalarRef::Date(b)) => Some(a.cmp(&b)),
            (ScalarRef::Bool(a), ScalarRef::Bool(b)) => Some(a.cmp(&b)),
            (ScalarRef::Str(a), ScalarRef::Str(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    /// Numeric view used by SUM/MIN.
    pub fn as_f64(self) -> Option<f64> {
        match self {
            ScalarRef::Int(v) => Some(v as f64),
            ScalarRef::Double(v) => Some(v),
            ScalarRef::Date(v) => Some(v as f64),
            _ => None,
        }
    }
}
