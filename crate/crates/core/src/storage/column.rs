use crate::catalog::DataType;
use crate::compression::{BitVec, CompressionError, Dictionary, NullCompression, NullMap, PackedUints};
use crate::value::{ScalarRef, Value};

use super::StorageError;

/// Typed value array. Strings live in one arena addressed by (offset, length).
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Int64(Vec<i64>),
    Double(Vec<f64>),
    Bool(Vec<bool>),
    Date(Vec<i32>),
    Text { spans: Vec<(u32, u32)>, arena: String },
    Categorical { dict: Dictionary, codes: PackedUints },
}

impl ColumnValues {
    pub fn datatype(&self) -> DataType {
        match self {
            ColumnValues::Int64(_) => DataType::Int64,
            ColumnValues::Double(_) => DataType::Double,
            ColumnValues::Bool(_) => DataType::Boolean,
            ColumnValues::Date(_) => DataType::Date,
            ColumnValues::Text { .. } => DataType::String,
            ColumnValues::Categorical { .. } => DataType::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Int64(v) => v.len(),
            ColumnValues::Double(v) => v.len(),
            ColumnValues::Bool(v) => v.len(),
            ColumnValues::Date(v) => v.len(),
            ColumnValues::Text { spans, .. } => spans.len(),
            ColumnValues::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, slot: usize) -> ScalarRef<'_> {
        match self {
            ColumnValues::Int64(v) => ScalarRef::Int(v[slot]),
            ColumnValues::Double(v) => ScalarRef::Double(v[slot]),
            ColumnValues::Bool(v) => ScalarRef::Bool(v[slot]),
            ColumnValues::Date(v) => ScalarRef::Date(v[slot]),
            ColumnValues::Text { spans, arena } => {
                let (off, len) = spans[slot];
                ScalarRef::Str(&arena[off as usize..(off + len) as usize])
            }
            ColumnValues::Categorical { dict, codes } => ScalarRef::Str(dict.decode_unchecked(codes.get(slot) as u32)),
        }
    }

    /// Builds a typed array from values that must all match `datatype`; `Null`
    /// entries become a type default (used for validity-bitmap slots).
    pub fn from_values<'a, I>(datatype: DataType, values: I) -> Result<Self, StorageError>
    where
        I: IntoIterator<Item = &'a Value>,
        I::IntoIter: Clone,
    {
        let iter = values.into_iter();
        let mismatch = |v: &Value| StorageError::TypeMismatch {
            expected: datatype,
            found: format!("{v:?}"),
        };
        Ok(match datatype {
            DataType::Int64 => ColumnValues::Int64(
                iter.map(|v| match v {
                    Value::Int64(x) => Ok(*x),
                    Value::Null => Ok(0),
                    other => Err(mismatch(other)),
                })
                .collect::<Result<_, _>>()?,
            ),
            DataType::Double => ColumnValues::Double(
                iter.map(|v| match v {
                    Value::Double(x) => Ok(*x),
                    Value::Int64(x) => Ok(*x as f64),
                    Value::Null => Ok(0.0),
                    other => Err(mismatch(other)),
                })
                .collect::<Result<_, _>>()?,
            ),
            DataType::Boolean => ColumnValues::Bool(
                iter.map(|v| match v {
                    Value::Bool(x) => Ok(*x),
                    Value::Null => Ok(false),
                    other => Err(mismatch(other)),
                })
                .collect::<Result<_, _>>()?,
            ),
            DataType::Date => ColumnValues::Date(
                iter.map(|v| match v {
                    Value::Date(x) => Ok(*x),
                    Value::Null => Ok(0),
                    other => Err(mismatch(other)),
                })
                .collect::<Result<_, _>>()?,
            ),
            DataType::String => {
                let mut spans = Vec::new();
                let mut arena = String::new();
                for v in iter {
                    let s = match v {
                        Value::String(s) => s.as_str(),
                        Value::Null => "",
                        other => return Err(mismatch(other)),
                    };
                    let off = u32::try_from(arena.len()).map_err(|_| StorageError::TooLarge)?;
                    let len = u32::try_from(s.len()).map_err(|_| StorageError::TooLarge)?;
                    off.checked_add(len).ok_or(StorageError::TooLarge)?;
                    spans.push((off, len));
                    arena.push_str(s);
                }
                ColumnValues::Text { spans, arena }
            }
            DataType::Categorical => {
                let mut strs = Vec::new();
                for v in iter.clone() {
                    match v {
                        Value::String(s) => strs.push(s.as_str()),
                        Value::Null => {}
                        other => return Err(mismatch(other)),
                    }
                }
                let dict = Dictionary::build(strs.iter().copied())?;
                let mut codes = PackedUints::new(dict.code_width());
                for v in iter {
                    let code = match v {
                        Value::String(s) => dict.encode(s)?,
                        _ => 0,
                    };
                    codes.push(code as u64)?;
                }
                ColumnValues::Categorical { dict, codes }
            }
        })
    }

    /// Bytes of value payload; dictionaries are reported by [`Self::dictionary_bytes`].
    pub fn value_bytes(&self) -> usize {
        match self {
            ColumnValues::Int64(v) => v.len() * 8,
            ColumnValues::Double(v) => v.len() * 8,
            ColumnValues::Bool(v) => v.len(),
            ColumnValues::Date(v) => v.len() * 4,
            ColumnValues::Text { spans, arena } => spans.len() * 8 + arena.len(),
            ColumnValues::Categorical { codes, .. } => codes.heap_bytes(),
        }
    }

    pub fn dictionary_bytes(&self) -> usize {
        match self {
            ColumnValues::Categorical { dict, .. } => dict.heap_bytes(),
            _ => 0,
        }
    }

    pub(crate) fn validate_text(&self) -> Result<(), StorageError> {
        if let ColumnValues::Text { spans, arena } = self {
            for &(off, len) in spans {
                let end = off as usize + len as usize;
                if end > arena.len() || !arena.is_char_boundary(off as usize) || !arena.is_char_boundary(end) {
                    return Err(StorageError::Corrupt("string span out of range".into()));
                }
            }
        }
        if let ColumnValues::Categorical { dict, codes } = self {
            if codes.iter().any(|c| c >= dict.len().max(1) as u64) {
                return Err(StorageError::Corrupt("dictionary code out of range".into()));
            }
        }
        Ok(())
    }
}

impl From<CompressionError> for StorageError {
    fn from(e: CompressionError) -> Self {
        StorageError::Compression(e)
    }
}

/// A column over `len` positions with NULL handling delegated to a [`NullMap`].
///
/// Used for vertex properties, single-cardinality edge properties, and the
/// value arrays behind property pages and edge columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyColumn {
    nulls: NullMap,
    values: ColumnValues,
}

impl PropertyColumn {
    pub fn build(datatype: DataType, values: &[Value], mode: NullCompression) -> Result<Self, StorageError> {
        let presence = BitVec::from_bools(values.iter().map(|v| !v.is_null()));
        let nulls = NullMap::build(presence, mode);
        let values = if nulls.stores_dense_values() {
            ColumnValues::from_values(datatype, values.iter().filter(|v| !v.is_null()))?
        } else {
            ColumnValues::from_values(datatype, values.iter())?
        };
        Ok(Self { nulls, values })
    }

    pub(crate) fn from_parts(nulls: NullMap, values: ColumnValues) -> Result<Self, StorageError> {
        if nulls.value_slots() != values.len() {
            return Err(StorageError::Corrupt("column value count mismatch".into()));
        }
        values.validate_text()?;
        Ok(Self { nulls, values })
    }

    pub fn len(&self) -> usize {
        self.nulls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn datatype(&self) -> DataType {
        self.values.datatype()
    }

    #[inline]
    pub fn get(&self, pos: usize) -> ScalarRef<'_> {
        match self.nulls.slot(pos) {
            Some(slot) => self.values.get(slot),
            None => ScalarRef::Null,
        }
    }

    pub fn checked_get(&self, pos: usize) -> Result<ScalarRef<'_>, StorageError> {
        if pos >= self.len() {
            return Err(StorageError::OutOfBounds {
                index: pos as u64,
                len: self.len() as u64,
            });
        }
        Ok(self.get(pos))
    }

    /// The raw `i64` array when the column has no NULLs.
    pub fn dense_i64(&self) -> Option<&[i64]> {
        match (&self.nulls, &self.values) {
            (NullMap::Dense { .. }, ColumnValues::Int64(v)) => Some(v),
            _ => None,
        }
    }

    pub fn nulls(&self) -> &NullMap {
        &self.nulls
    }

    pub fn values(&self) -> &ColumnValues {
        &self.values
    }

    pub fn value_bytes(&self) -> usize {
        self.values.value_bytes()
    }

    pub fn aux_bytes(&self) -> usize {
        self.nulls.heap_bytes() + self.values.dictionary_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::JacobsonParams;

    #[test]
    fn nullable_column_modes_agree() {
        let vals: Vec<Value> = (0..100)
            .map(|i| if i % 3 == 0 { Value::Null } else { Value::Int64(i) })
            .collect();
        for mode in [
            NullCompression::Jacobson(JacobsonParams::default()),
            NullCompression::Vanilla,
            NullCompression::Off,
        ] {
            let col = PropertyColumn::build(DataType::Int64, &vals, mode).unwrap();
            for (i, v) in vals.iter().enumerate() {
                assert_eq!(col.get(i).to_value(), *v);
            }
        }
    }

    #[test]
    fn strings_and_categoricals() {
        let vals = vec![
            Value::String("héllo".into()),
            Value::Null,
            Value::String("".into()),
            Value::String("x".into()),
        ];
        let col = PropertyColumn::build(DataType::String, &vals, NullCompression::default()).unwrap();
        assert_eq!(col.get(0), ScalarRef::Str("héllo"));
        assert_eq!(col.get(1), ScalarRef::Null);
        assert_eq!(col.get(2), ScalarRef::Str(""));
        let cat = PropertyColumn::build(DataType::Categorical, &vals, NullCompression::Off).unwrap();
        assert_eq!(cat.get(3), ScalarRef::Str("x"));
        assert_eq!(cat.get(1), ScalarRef::Null);
        match cat.values() {
            ColumnValues::Categorical { dict, .. } => assert_eq!(dict.len(), 3),
            _ => panic!(),
        }
    }

    #[test]
    fn type_mismatch() {
        let err = PropertyColumn::build(DataType::Int64, &[Value::String("a".into())], NullCompression::Off);
        assert!(matches!(err, Err(StorageError::TypeMismatch { .. })));
    }
}
