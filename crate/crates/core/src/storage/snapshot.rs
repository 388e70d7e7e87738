//! Versioned little-endian snapshot of a [`GraphStore`].
//!
//! Layout: 8-byte magic, `u32` version, then sections of
//! `u32 tag | u64 length | payload` in a fixed order: catalog, config, one
//! vertex section per vertex label, one edge section per edge label, end.
//! Derived indexes (rank directories, codec widths) are rebuilt on load and
//! every structure is checked against the catalog before the store is
//! returned.

use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::catalog::{Catalog, DataType, Direction, EdgeLabelDef, Layout, SchemaDoc, StorageDecision, VertexLabelId};
use crate::compression::{
    BitVec, Dictionary, JacobsonIndex, JacobsonParams, NullCompression, NullMap, PackedUints, VanillaNullIndex,
};
use crate::ids::AdjEntryCodec;

use super::{
    AdjacencyCsr, ColumnValues, CsrOffsets, DirStorage, EdgeColumnAlt, EdgePropLayout, EdgeProps, EdgeStorage,
    GraphStore, NbrColumn, PropertyColumn, PropertyPages, StorageConfig, StorageError,
};

pub const MAGIC: [u8; 8] = *b"COLGRAPH";
pub const VERSION: u32 = 1;

const TAG_CATALOG: u32 = 1;
const TAG_CONFIG: u32 = 2;
const TAG_VERTEX: u32 = 3;
const TAG_EDGE: u32 = 4;
const TAG_END: u32 = 0xFFFF_FFFF;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a snapshot (bad magic)")]
    BadMagic,
    #[error("unsupported snapshot version {0} (this build reads version {VERSION})")]
    UnsupportedVersion(u32),
    #[error("snapshot truncated")]
    Truncated,
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn corrupt(what: impl Into<String>) -> SnapshotError {
    SnapshotError::Corrupt(what.into())
}

impl From<crate::compression::CompressionError> for SnapshotError {
    fn from(e: crate::compression::CompressionError) -> Self {
        SnapshotError::Storage(e.into())
    }
}

type Result<T> = std::result::Result<T, SnapshotError>;

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }

    fn bytes(&mut self, b: &[u8]) {
        self.len(b.len());
        self.buf.extend_from_slice(b);
    }

    fn str(&mut self, s: &str) {
        self.bytes(s.as_bytes());
    }

    fn section(&mut self, tag: u32, body: impl FnOnce(&mut Writer)) {
        self.u32(tag);
        let at = self.buf.len();
        self.u64(0);
        body(self);
        let n = (self.buf.len() - at - 8) as u64;
        self.buf[at..at + 8].copy_from_slice(&n.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(SnapshotError::Truncated);
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.array().map(u64::from_le_bytes)
    }

    fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(corrupt(format!("boolean byte {b}"))),
        }
    }

    /// A count of items that each occupy at least `min_size` bytes.
    fn len(&mut self, min_size: usize) -> Result<usize> {
        let n = self.u64()?;
        match usize::try_from(n).ok().and_then(|n| n.checked_mul(min_size.max(1))) {
            Some(total) if total <= self.remaining() || (min_size == 0 && n <= u32::MAX as u64) => Ok(n as usize),
            _ => Err(SnapshotError::Truncated),
        }
    }

    fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.len(1)?;
        self.take(n)
    }

    fn str(&mut self) -> Result<String> {
        String::from_utf8(self.bytes()?.to_vec()).map_err(|_| corrupt("invalid UTF-8"))
    }

    fn section(&mut self, tag: u32) -> Result<Reader<'a>> {
        let got = self.u32()?;
        if got != tag {
            return Err(corrupt(format!("expected section {tag:#x}, found {got:#x}")));
        }
        let n = usize::try_from(self.u64()?).map_err(|_| SnapshotError::Truncated)?;
        Ok(Reader {
            buf: self.take(n)?,
            pos: 0,
        })
    }

    fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(corrupt("trailing bytes in section"));
        }
        Ok(())
    }
}

fn put_dir(w: &mut Writer, d: Direction) {
    w.u8(d.index() as u8);
}

fn get_dir(r: &mut Reader<'_>) -> Result<Direction> {
    match r.u8()? {
        0 => Ok(Direction::Fwd),
        1 => Ok(Direction::Bwd),
        b => Err(corrupt(format!("direction {b}"))),
    }
}

fn put_params(w: &mut Writer, p: JacobsonParams) {
    w.u8(p.c() as u8);
    w.u8(p.m() as u8);
}

fn get_params(r: &mut Reader<'_>) -> Result<JacobsonParams> {
    let c = r.u8()? as u32;
    let m = r.u8()? as u32;
    Ok(JacobsonParams::new(c, m)?)
}

fn put_bits(w: &mut Writer, b: &BitVec) {
    w.len(b.len());
    for &word in b.words() {
        w.u64(word);
    }
}

fn get_bits(r: &mut Reader<'_>) -> Result<BitVec> {
    let len = r.u64()?;
    let len = usize::try_from(len).map_err(|_| SnapshotError::Truncated)?;
    let words = len.div_ceil(64);
    if words.checked_mul(8).is_none_or(|n| n > r.remaining()) {
        return Err(SnapshotError::Truncated);
    }
    let words = (0..words).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    BitVec::from_words(words, len).ok_or_else(|| corrupt("bit vector padding"))
}

fn put_packed(w: &mut Writer, p: &PackedUints) {
    w.u8(p.width());
    w.len(p.len());
    w.buf.extend_from_slice(p.payload());
}

fn get_packed(r: &mut Reader<'_>) -> Result<PackedUints> {
    let width = r.u8()?;
    if !(1..=8).contains(&width) {
        return Err(corrupt(format!("packed width {width}")));
    }
    let len = r.len(width as usize)?;
    let payload = r.take(len * width as usize)?.to_vec();
    Ok(PackedUints::from_raw(width, len, payload)?)
}

fn put_nulls(w: &mut Writer, n: &NullMap) {
    match n {
        NullMap::Dense { len } => {
            w.u8(0);
            w.len(*len);
        }
        NullMap::Jacobson(j) => {
            w.u8(1);
            put_params(w, j.params());
            put_bits(w, j.bits());
        }
        NullMap::Vanilla(v) => {
            w.u8(2);
            put_bits(w, v.bits());
        }
        NullMap::Validity(b) => {
            w.u8(3);
            put_bits(w, b);
        }
    }
}

fn get_nulls(r: &mut Reader<'_>) -> Result<NullMap> {
    Ok(match r.u8()? {
        0 => NullMap::Dense { len: r.len(0)? },
        1 => {
            let params = get_params(r)?;
            NullMap::Jacobson(JacobsonIndex::build(get_bits(r)?, params))
        }
        2 => NullMap::Vanilla(VanillaNullIndex::new(get_bits(r)?)),
        3 => NullMap::Validity(get_bits(r)?),
        t => return Err(corrupt(format!("null map kind {t}"))),
    })
}

const DATATYPES: [DataType; 6] = [
    DataType::Int64,
    DataType::Double,
    DataType::Boolean,
    DataType::Date,
    DataType::String,
    DataType::Categorical,
];

fn put_values(w: &mut Writer, v: &ColumnValues) {
    let tag = DATATYPES.iter().position(|&d| d == v.datatype()).expect("known type");
    w.u8(tag as u8);
    match v {
        ColumnValues::Int64(xs) => {
            w.len(xs.len());
            xs.iter().for_each(|&x| w.u64(x as u64));
        }
        ColumnValues::Double(xs) => {
            w.len(xs.len());
            xs.iter().for_each(|&x| w.u64(x.to_bits()));
        }
        ColumnValues::Bool(xs) => {
            w.len(xs.len());
            xs.iter().for_each(|&x| w.u8(x as u8));
        }
        ColumnValues::Date(xs) => {
            w.len(xs.len());
            xs.iter().for_each(|&x| w.u32(x as u32));
        }
        ColumnValues::Text { spans, arena } => {
            w.len(spans.len());
            for &(off, len) in spans {
                w.u32(off);
                w.u32(len);
            }
            w.str(arena);
        }
        ColumnValues::Categorical { dict, codes } => {
            w.len(dict.len());
            dict.domain().iter().for_each(|s| w.str(s));
            put_packed(w, codes);
        }
    }
}

fn get_values(r: &mut Reader<'_>) -> Result<ColumnValues> {
    let tag = r.u8()? as usize;
    let datatype = *DATATYPES.get(tag).ok_or_else(|| corrupt(format!("datatype {tag}")))?;
    Ok(match datatype {
        DataType::Int64 => {
            let n = r.len(8)?;
            ColumnValues::Int64((0..n).map(|_| r.u64().map(|x| x as i64)).collect::<Result<_>>()?)
        }
        DataType::Double => {
            let n = r.len(8)?;
            ColumnValues::Double((0..n).map(|_| r.u64().map(f64::from_bits)).collect::<Result<_>>()?)
        }
        DataType::Boolean => {
            let n = r.len(1)?;
            ColumnValues::Bool((0..n).map(|_| r.bool()).collect::<Result<_>>()?)
        }
        DataType::Date => {
            let n = r.len(4)?;
            ColumnValues::Date((0..n).map(|_| r.u32().map(|x| x as i32)).collect::<Result<_>>()?)
        }
        DataType::String => {
            let n = r.len(8)?;
            let spans = (0..n).map(|_| Ok((r.u32()?, r.u32()?))).collect::<Result<_>>()?;
            ColumnValues::Text { spans, arena: r.str()? }
        }
        DataType::Categorical => {
            let n = r.len(8)?;
            let domain = (0..n).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
            let dict = Dictionary::from_sorted_domain(domain)?;
            let codes = get_packed(r)?;
            ColumnValues::Categorical { dict, codes }
        }
    })
}

fn put_column(w: &mut Writer, c: &PropertyColumn) {
    put_nulls(w, c.nulls());
    put_values(w, c.values());
}

fn get_column(r: &mut Reader<'_>) -> Result<PropertyColumn> {
    let nulls = get_nulls(r)?;
    let values = get_values(r)?;
    Ok(PropertyColumn::from_parts(nulls, values)?)
}

fn put_columns(w: &mut Writer, cols: &[PropertyColumn]) {
    w.len(cols.len());
    cols.iter().for_each(|c| put_column(w, c));
}

fn get_columns(r: &mut Reader<'_>) -> Result<Vec<PropertyColumn>> {
    let n = r.len(2)?;
    (0..n).map(|_| get_column(r)).collect()
}

fn put_opt<T>(w: &mut Writer, items: &[Option<T>], mut put: impl FnMut(&mut Writer, &T)) {
    w.len(items.len());
    for item in items {
        match item {
            None => w.u8(0),
            Some(x) => {
                w.u8(1);
                put(w, x);
            }
        }
    }
}

fn get_opt<'a, T>(r: &mut Reader<'a>, mut get: impl FnMut(&mut Reader<'a>) -> Result<T>) -> Result<Vec<Option<T>>> {
    let n = r.len(1)?;
    (0..n)
        .map(|_| if r.bool()? { get(r).map(Some) } else { Ok(None) })
        .collect()
}

fn put_labels(w: &mut Writer, labels: &[VertexLabelId]) {
    w.len(labels.len());
    labels.iter().for_each(|l| w.u8(l.0));
}

fn get_labels(r: &mut Reader<'_>) -> Result<Vec<VertexLabelId>> {
    let n = r.len(1)?;
    (0..n).map(|_| r.u8().map(VertexLabelId)).collect()
}

fn put_decision(w: &mut Writer, d: &StorageDecision) {
    w.u8(d.store_page_offset as u8);
    w.u8(d.store_nbr_label as u8);
    w.u8(matches!(d.layout, Layout::CsrLayout) as u8);
    w.u8(d.nbr_offset_bytes);
    w.u8(d.page_offset_bytes);
}

fn get_decision(r: &mut Reader<'_>) -> Result<StorageDecision> {
    Ok(StorageDecision {
        store_page_offset: r.bool()?,
        store_nbr_label: r.bool()?,
        layout: if r.bool()? {
            Layout::CsrLayout
        } else {
            Layout::VertexColumnLayout
        },
        nbr_offset_bytes: r.u8()?,
        page_offset_bytes: r.u8()?,
    })
}

fn put_offsets(w: &mut Writer, o: &CsrOffsets) {
    match o {
        CsrOffsets::Plain(p) => {
            w.u8(0);
            put_packed(w, p);
        }
        CsrOffsets::EmptyListCompressed { presence, offsets } => {
            w.u8(1);
            put_params(w, presence.params());
            put_bits(w, presence.bits());
            put_packed(w, offsets);
        }
    }
}

fn get_offsets(r: &mut Reader<'_>) -> Result<CsrOffsets> {
    Ok(match r.u8()? {
        0 => CsrOffsets::Plain(get_packed(r)?),
        1 => {
            let params = get_params(r)?;
            let presence = JacobsonIndex::build(get_bits(r)?, params);
            CsrOffsets::EmptyListCompressed {
                presence,
                offsets: get_packed(r)?,
            }
        }
        t => return Err(corrupt(format!("csr offsets kind {t}"))),
    })
}

fn put_config(w: &mut Writer, c: &StorageConfig) {
    w.u8(matches!(c.edge_prop_layout, EdgePropLayout::EdgeCols) as u8);
    put_dir(w, c.pages_direction);
    w.u64(c.k);
    match c.null_compression {
        NullCompression::Off => w.u8(0),
        NullCompression::Vanilla => w.u8(1),
        NullCompression::Jacobson(p) => {
            w.u8(2);
            put_params(w, p);
        }
    }
    w.u64(c.seed);
}

fn get_config(r: &mut Reader<'_>) -> Result<StorageConfig> {
    let edge_prop_layout = if r.bool()? {
        EdgePropLayout::EdgeCols
    } else {
        EdgePropLayout::PropPages
    };
    let pages_direction = get_dir(r)?;
    let k = r.u64()?;
    if k == 0 {
        return Err(corrupt("k must be positive"));
    }
    let null_compression = match r.u8()? {
        0 => NullCompression::Off,
        1 => NullCompression::Vanilla,
        2 => NullCompression::Jacobson(get_params(r)?),
        t => return Err(corrupt(format!("null compression {t}"))),
    };
    Ok(StorageConfig {
        edge_prop_layout,
        pages_direction,
        k,
        null_compression,
        seed: r.u64()?,
    })
}

fn put_edge(w: &mut Writer, e: &EdgeStorage) {
    w.u64(e.num_edges);
    for d in &e.dirs {
        match d {
            DirStorage::Csr { codec, csrs } => {
                w.u8(0);
                put_decision(w, codec.decision());
                put_labels(w, codec.nbr_labels());
                put_opt(w, csrs, |w, c| {
                    put_offsets(w, c.offsets());
                    w.bytes(c.entries());
                });
            }
            DirStorage::Column(cols) => {
                w.u8(1);
                put_opt(w, cols, |w, c| {
                    put_labels(w, c.nbr_labels());
                    put_nulls(w, c.nulls());
                    put_packed(w, c.offsets());
                    match c.tags() {
                        None => w.u8(0),
                        Some(t) => {
                            w.u8(1);
                            w.bytes(t);
                        }
                    }
                });
            }
        }
    }
    match &e.props {
        EdgeProps::None => w.u8(0),
        EdgeProps::VertexColumns { owner, columns } => {
            w.u8(1);
            put_dir(w, *owner);
            put_opt(w, columns, |w, c| put_columns(w, c));
        }
        EdgeProps::Pages { dir, pages } => {
            w.u8(2);
            put_dir(w, *dir);
            put_opt(w, pages, |w, p| {
                w.u64(p.k());
                w.len(p.page_starts().len());
                p.page_starts().iter().for_each(|&s| w.u64(s));
                put_columns(w, p.properties());
            });
        }
        EdgeProps::EdgeCols(alt) => {
            w.u8(3);
            w.u64(alt.num_edges());
            put_columns(w, alt.properties());
        }
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(corrupt(what()))
    }
}

/// `Some` exactly at the label ids in `labels`.
fn check_present<T>(items: &[Option<T>], labels: &[VertexLabelId], num_labels: usize, what: &str) -> Result<()> {
    check(items.len() == num_labels, || {
        format!("{what}: one slot per vertex label")
    })?;
    for (i, item) in items.iter().enumerate() {
        check(item.is_some() == labels.contains(&VertexLabelId(i as u8)), || {
            format!("{what}: unexpected presence at label {i}")
        })?;
    }
    Ok(())
}

/// `sparse` columns hold NULL wherever the owning vertex has no edge.
fn check_columns(
    cols: &[PropertyColumn],
    def_props: &[crate::catalog::PropertyDef],
    len: u64,
    sparse: bool,
    what: &str,
) -> Result<()> {
    check(cols.len() == def_props.len(), || format!("{what}: property count"))?;
    for (c, p) in cols.iter().zip(def_props) {
        check(c.datatype() == p.datatype, || format!("{what}.{}: datatype", p.name))?;
        check(c.len() as u64 == len, || format!("{what}.{}: length", p.name))?;
        check(
            sparse || p.nullable || c.nulls().value_slots() == c.len() && (0..c.len()).all(|i| !c.nulls().is_null(i)),
            || format!("{what}.{}: NULL in a non-nullable property", p.name),
        )?;
    }
    Ok(())
}

fn get_edge(r: &mut Reader<'_>, catalog: &Catalog, def: &EdgeLabelDef, config: &StorageConfig) -> Result<EdgeStorage> {
    let counts: Vec<u64> = catalog.vertex_labels().iter().map(|v| v.vertex_count).collect();
    let nv = counts.len();
    let num_edges = r.u64()?;
    let name = &def.name;
    let mut dirs = Vec::with_capacity(2);
    for dir in Direction::BOTH {
        let expected = catalog
            .storage_decision(def.id, dir)
            .map_err(|e| corrupt(e.to_string()))?;
        let nbr_labels = def.nbr_labels(dir);
        let anchors = def.anchor_labels(dir);
        let storage = match r.u8()? {
            0 => {
                check(!def.cardinality.is_single(dir), || {
                    format!("{name} {dir}: expected a neighbour column")
                })?;
                let decision = get_decision(r)?;
                let mut want = expected;
                want.page_offset_bytes = decision.page_offset_bytes;
                check(decision == want, || format!("{name} {dir}: storage decision"))?;
                check(
                    !decision.store_page_offset || (1..=8).contains(&decision.page_offset_bytes),
                    || format!("{name} {dir}: page offset width"),
                )?;
                check(get_labels(r)? == nbr_labels, || {
                    format!("{name} {dir}: neighbour labels")
                })?;
                let codec = AdjEntryCodec::new(decision, nbr_labels.to_vec());
                let csrs = get_opt(r, |r| {
                    let offsets = get_offsets(r)?;
                    let arena = r.bytes()?.to_vec();
                    Ok(AdjacencyCsr::from_parts(codec.clone(), offsets, arena, &counts)?)
                })?;
                check_present(&csrs, anchors, nv, &format!("{name} {dir}"))?;
                let mut total = 0u64;
                for (l, c) in csrs.iter().enumerate() {
                    if let Some(c) = c {
                        check(c.num_vertices() as u64 == counts[l], || {
                            format!("{name} {dir}: csr vertex count")
                        })?;
                        total += c.num_entries() as u64;
                    }
                }
                check(total == num_edges, || format!("{name} {dir}: edge count"))?;
                DirStorage::Csr { codec, csrs }
            }
            1 => {
                check(def.cardinality.is_single(dir), || {
                    format!("{name} {dir}: expected a csr")
                })?;
                let cols = get_opt(r, |r| {
                    let labels = get_labels(r)?;
                    let nulls = get_nulls(r)?;
                    let offsets = get_packed(r)?;
                    let tags = if r.bool()? { Some(r.bytes()?.to_vec()) } else { None };
                    Ok(NbrColumn::from_parts(labels, nulls, offsets, tags, &counts)?)
                })?;
                check_present(&cols, anchors, nv, &format!("{name} {dir}"))?;
                let mut total = 0u64;
                for (l, c) in cols.iter().enumerate() {
                    if let Some(c) = c {
                        check(c.nbr_labels() == nbr_labels, || {
                            format!("{name} {dir}: neighbour labels")
                        })?;
                        check(c.len() as u64 == counts[l], || format!("{name} {dir}: column length"))?;
                        total += (0..c.len()).filter(|&i| c.get(i).is_some()).count() as u64;
                    }
                }
                check(total == num_edges, || format!("{name} {dir}: edge count"))?;
                DirStorage::Column(cols)
            }
            t => return Err(corrupt(format!("{name} {dir}: storage kind {t}"))),
        };
        dirs.push(storage);
    }
    let props = match r.u8()? {
        0 => {
            check(def.properties.is_empty(), || format!("{name}: missing properties"))?;
            EdgeProps::None
        }
        1 => {
            let owner = get_dir(r)?;
            let want = def.property_owner().map(|o| match o {
                crate::catalog::PropertyOwner::Src => Direction::Fwd,
                crate::catalog::PropertyOwner::Dst => Direction::Bwd,
            });
            check(!def.properties.is_empty() && want == Some(owner), || {
                format!("{name}: property owner")
            })?;
            let columns = get_opt(r, get_columns)?;
            check_present(&columns, def.anchor_labels(owner), nv, name)?;
            for (l, c) in columns.iter().enumerate() {
                if let Some(c) = c {
                    check_columns(c, &def.properties, counts[l], true, name)?;
                }
            }
            EdgeProps::VertexColumns { owner, columns }
        }
        2 => {
            let dir = get_dir(r)?;
            check(
                !def.properties.is_empty()
                    && def.property_owner().is_none()
                    && config.edge_prop_layout == EdgePropLayout::PropPages
                    && config.pages_direction == dir,
                || format!("{name}: unexpected property pages"),
            )?;
            let DirStorage::Csr { csrs, .. } = &dirs[dir.index()] else {
                return Err(corrupt(format!("{name}: pages need a csr")));
            };
            let pages = get_opt(r, |r| {
                let k = r.u64()?;
                let n = r.len(8)?;
                let starts = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
                let props = get_columns(r)?;
                Ok((k, starts, props))
            })?;
            check_present(&pages, def.anchor_labels(dir), nv, name)?;
            let mut built = Vec::with_capacity(nv);
            for (l, p) in pages.into_iter().enumerate() {
                let Some((k, starts, props)) = p else {
                    built.push(None);
                    continue;
                };
                check(k == config.k, || format!("{name}: page size"))?;
                let csr = csrs[l].as_ref().expect("checked presence");
                let lengths: Vec<u64> = (0..csr.num_vertices())
                    .map(|v| {
                        let (s, e) = csr.offsets().range(v);
                        e - s
                    })
                    .collect();
                check_columns(&props, &def.properties, csr.num_entries() as u64, false, name)?;
                let expected = PropertyPages::build(k, &lengths, Vec::new())?;
                check(expected.page_starts() == starts.as_slice(), || {
                    format!("{name}: page directory")
                })?;
                built.push(Some(PropertyPages::from_parts(k, starts, props)?));
            }
            EdgeProps::Pages { dir, pages: built }
        }
        3 => {
            check(
                !def.properties.is_empty()
                    && def.property_owner().is_none()
                    && config.edge_prop_layout == EdgePropLayout::EdgeCols,
                || format!("{name}: unexpected edge columns"),
            )?;
            let n = r.u64()?;
            check(n == num_edges, || format!("{name}: edge column length"))?;
            let props = get_columns(r)?;
            check_columns(&props, &def.properties, n, false, name)?;
            EdgeProps::EdgeCols(EdgeColumnAlt::new(n, props)?)
        }
        t => return Err(corrupt(format!("{name}: property kind {t}"))),
    };
    check(!matches!(props, EdgeProps::None) || def.properties.is_empty(), || {
        format!("{name}: properties missing")
    })?;
    let edge = EdgeStorage {
        dirs: dirs.try_into().expect("two directions"),
        props,
        num_edges,
    };
    check_page_offsets(&edge, name)?;
    Ok(edge)
}

/// Every page offset carried by an entry must resolve to a value slot.
fn check_page_offsets(e: &EdgeStorage, name: &str) -> Result<()> {
    for dir in Direction::BOTH {
        let DirStorage::Csr { codec, csrs } = e.dir(dir) else {
            continue;
        };
        if !codec.stores_page_offset() {
            continue;
        }
        for csr in csrs.iter().flatten() {
            for v in 0..csr.num_vertices() {
                let list = csr.list(v);
                for i in 0..list.len() {
                    let off = list.page_offset(i).expect("codec stores page offsets");
                    let ok = match &e.props {
                        EdgeProps::Pages { dir: pd, .. } if *pd == dir => true,
                        EdgeProps::Pages { pages, .. } => {
                            let nbr = list.nbr(i);
                            pages
                                .get(nbr.label.index())
                                .and_then(Option::as_ref)
                                .is_some_and(|p| p.slot(nbr.offset, off).is_ok())
                        }
                        EdgeProps::EdgeCols(alt) => off < alt.num_edges(),
                        _ => false,
                    };
                    check(ok, || format!("{name} {dir}: dangling page offset"))?;
                }
            }
        }
    }
    Ok(())
}

impl GraphStore {
    /// Serializes the store into snapshot bytes.
    pub fn to_snapshot(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.buf.extend_from_slice(&MAGIC);
        w.u32(VERSION);
        w.section(TAG_CATALOG, |w| {
            w.str(&self.catalog.to_doc().to_json());
            w.len(self.catalog.vertex_labels().len());
            for v in self.catalog.vertex_labels() {
                w.u64(v.vertex_count);
            }
        });
        w.section(TAG_CONFIG, |w| put_config(w, &self.config));
        for cols in &self.vertex_props {
            w.section(TAG_VERTEX, |w| put_columns(w, cols));
        }
        for e in &self.edges {
            w.section(TAG_EDGE, |w| put_edge(w, e));
        }
        w.section(TAG_END, |_| {});
        w.buf
    }

    /// Decodes and validates snapshot bytes.
    pub fn from_snapshot(bytes: &[u8]) -> Result<GraphStore> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(MAGIC.len()).map_err(|_| SnapshotError::BadMagic)? != MAGIC {
            return Err(SnapshotError::BadMagic);
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(SnapshotError::UnsupportedVersion(version));
        }
        let mut s = r.section(TAG_CATALOG)?;
        let doc = SchemaDoc::from_json(&s.str()?).map_err(|e| corrupt(e.to_string()))?;
        let n = s.len(8)?;
        let counts = (0..n).map(|_| s.u64()).collect::<Result<Vec<_>>>()?;
        s.finish()?;
        let catalog = Catalog::define_schema(&doc).map_err(|e| corrupt(e.to_string()))?;
        check(counts.len() == catalog.vertex_labels().len(), || {
            "vertex count per label".into()
        })?;
        let catalog = catalog.with_vertex_counts(&counts);

        let mut s = r.section(TAG_CONFIG)?;
        let config = get_config(&mut s)?;
        s.finish()?;

        let mut vertex_props = Vec::with_capacity(counts.len());
        for def in catalog.vertex_labels() {
            let mut s = r.section(TAG_VERTEX)?;
            let cols = get_columns(&mut s)?;
            s.finish()?;
            check_columns(&cols, &def.properties, def.vertex_count, false, &def.name)?;
            vertex_props.push(cols);
        }
        let mut edges = Vec::with_capacity(catalog.edge_labels().len());
        for def in catalog.edge_labels() {
            let mut s = r.section(TAG_EDGE)?;
            edges.push(get_edge(&mut s, &catalog, def, &config)?);
            s.finish()?;
        }
        r.section(TAG_END)?.finish()?;
        if r.remaining() != 0 {
            return Err(corrupt("trailing bytes after end section"));
        }
        Ok(GraphStore {
            catalog,
            config,
            vertex_props,
            edges,
        })
    }

    pub fn write_snapshot(&self, mut out: impl Write) -> Result<()> {
        out.write_all(&self.to_snapshot())?;
        out.flush()?;
        Ok(())
    }

    pub fn read_snapshot(mut input: impl Read) -> Result<GraphStore> {
        let mut buf = Vec::new();
        input.read_to_end(&mut buf)?;
        Self::from_snapshot(&buf)
    }

    /// Writes the snapshot to `path` through a temporary file in the same
    /// directory.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_snapshot())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<GraphStore> {
        Self::from_snapshot(&std::fs::read(path)?)
    }
}
