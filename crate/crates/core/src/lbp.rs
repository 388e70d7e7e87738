//! List-based processor. Operators pull factorized chunks through a pipeline
//! that shares one chunk. A chunk is a list of groups; each group holds
//! equal-length blocks and is either flat (a single current position) or
//! unflat (every selected position). The tuples a chunk denotes are the
//! Cartesian product of its groups.
//!
//! Operators that change a group they did not create (setting its current
//! position or narrowing its selection) undo the change before pulling the
//! next input, so upstream operators always see the state they produced.

use std::mem;

use crate::catalog::{Direction, EdgeLabelId, VertexLabelId};
use crate::exec::{Accumulator, Binding, ExecOptions, QueryResult};
use crate::ids::VertexId;
use crate::query::{
    eval_cmp, BoundOperand, BoundProp, CmpOp, PhysicalPlan, PlanOp, Projection, QueryError, Sink, VarKind,
};
use crate::storage::{AdjList, AdjacencyCsr, EdgePropReader, GraphStore, NbrColumn, PropertyColumn};
use crate::value::{ScalarRef, Value};

/// Counters collected while a pipeline runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LbpStats {
    pub chunks: u64,
    /// neighbour blocks checked to lie inside their CSR arena
    pub extends_checked: u64,
    /// neighbour blocks found outside the arena
    pub copies_detected: u64,
}

/// A column of a list group.
#[derive(Debug, Clone)]
pub enum Block<'a> {
    /// owned vertex ids, as produced by a scan or a column extension
    Vertices(Vec<VertexId>),
    /// zero-copy view of `src`'s adjacency list
    Adj { src: VertexId, list: AdjList<'a> },
}

impl Default for Block<'_> {
    fn default() -> Self {
        Block::Vertices(Vec::new())
    }
}

impl Block<'_> {
    #[inline]
    pub fn vertex(&self, i: usize) -> VertexId {
        match self {
            Block::Vertices(v) => v[i],
            Block::Adj { list, .. } => list.nbr(i),
        }
    }

    #[inline]
    fn offset(&self, i: usize) -> u64 {
        match self {
            Block::Vertices(v) => v[i].offset,
            Block::Adj { list, .. } => list.nbr_offset(i),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ListGroup<'a> {
    len: usize,
    cur: Option<usize>,
    sel: Vec<u32>,
    has_sel: bool,
    /// changes whenever the blocks are replaced
    gen: u64,
    blocks: Vec<Block<'a>>,
}

impl<'a> ListGroup<'a> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The flattened position, if the group is flat.
    pub fn cur(&self) -> Option<usize> {
        self.cur
    }

    pub fn selection(&self) -> Option<&[u32]> {
        self.has_sel.then_some(&self.sel[..])
    }

    pub fn blocks(&self) -> &[Block<'a>] {
        &self.blocks
    }

    /// Number of selected positions.
    #[inline]
    pub fn selected_len(&self) -> usize {
        if self.has_sel {
            self.sel.len()
        } else {
            self.len
        }
    }

    /// The `k`-th selected position.
    #[inline]
    fn pos(&self, k: usize) -> usize {
        if self.has_sel {
            self.sel[k] as usize
        } else {
            k
        }
    }

    /// Tuples this group contributes to the chunk's product.
    #[inline]
    pub fn tuple_count(&self) -> u64 {
        if self.cur.is_some() {
            1
        } else {
            self.selected_len() as u64
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Chunk<'a> {
    groups: Vec<ListGroup<'a>>,
    next_gen: u64,
}

impl<'a> Chunk<'a> {
    pub fn groups(&self) -> &[ListGroup<'a>] {
        &self.groups
    }

    /// Number of flat tuples the chunk denotes, without enumerating them.
    pub fn count_star(&self) -> u64 {
        self.groups.iter().map(ListGroup::tuple_count).product()
    }

    fn new_gen(&mut self) -> u64 {
        self.next_gen += 1;
        self.next_gen
    }

    /// Calls `f` with one position per group for every denoted tuple, the
    /// first group outermost.
    pub fn for_each_tuple(&self, mut f: impl FnMut(&[usize])) {
        let n = self.groups.len();
        let mut pos = vec![0usize; n];
        let mut k = vec![0usize; n];
        for (i, g) in self.groups.iter().enumerate() {
            match g.cur {
                Some(c) => pos[i] = c,
                None if g.selected_len() == 0 => return,
                None => pos[i] = g.pos(0),
            }
        }
        loop {
            f(&pos);
            let mut i = n;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                let g = &self.groups[i];
                if g.cur.is_some() {
                    continue;
                }
                k[i] += 1;
                if k[i] < g.selected_len() {
                    pos[i] = g.pos(k[i]);
                    break;
                }
                k[i] = 0;
                pos[i] = g.pos(0);
            }
        }
    }
}

/// Where a plan variable lives in the chunk.
#[derive(Debug, Clone, Copy)]
enum VarLoc {
    Unbound,
    Node {
        group: usize,
        block: usize,
    },
    ListEdge {
        group: usize,
        block: usize,
        label: EdgeLabelId,
        dir: Direction,
    },
    ColumnEdge {
        group: usize,
        src_block: usize,
        nbr_block: usize,
        label: EdgeLabelId,
        dir: Direction,
    },
}

/// Reads one operand at a position of its group.
#[derive(Debug, Clone)]
enum Access<'a> {
    Lit(ScalarRef<'a>),
    Vertex {
        group: usize,
        block: usize,
        col: &'a PropertyColumn,
    },
    ListEdge {
        group: usize,
        block: usize,
        reader: EdgePropReader<'a>,
    },
    ColumnEdge {
        group: usize,
        src_block: usize,
        nbr_block: usize,
        reader: EdgePropReader<'a>,
    },
}

impl<'a> Access<'a> {
    fn group(&self) -> Option<usize> {
        match *self {
            Access::Lit(_) => None,
            Access::Vertex { group, .. } | Access::ListEdge { group, .. } | Access::ColumnEdge { group, .. } => {
                Some(group)
            }
        }
    }

    #[inline]
    fn get(&self, chunk: &Chunk<'a>, pos: usize) -> ScalarRef<'a> {
        match self {
            Access::Lit(v) => *v,
            Access::Vertex { group, block, col } => col.get(chunk.groups[*group].blocks[*block].offset(pos) as usize),
            Access::ListEdge { group, block, reader } => match &chunk.groups[*group].blocks[*block] {
                Block::Adj { src, list } => reader.read(*src, list, pos),
                Block::Vertices(_) => ScalarRef::Null,
            },
            Access::ColumnEdge {
                group,
                src_block,
                nbr_block,
                reader,
            } => {
                let g = &chunk.groups[*group];
                reader.read_single(g.blocks[*src_block].vertex(pos), g.blocks[*nbr_block].vertex(pos))
            }
        }
    }

    /// Value at the current position of a flat group (or the literal).
    #[inline]
    fn at_cur(&self, chunk: &Chunk<'a>) -> ScalarRef<'a> {
        match self.group() {
            None => self.get(chunk, 0),
            Some(g) => self.get(chunk, chunk.groups[g].cur.expect("operand group is flat")),
        }
    }
}

struct Scan {
    label: VertexLabelId,
    count: u64,
    next: u64,
    morsel: u64,
}

/// Shared by operators that walk a group's selected positions one by one.
#[derive(Default)]
struct Cursor {
    active: bool,
    pos: usize,
}

impl Cursor {
    /// Sets the group's next current position; `false` once exhausted, with
    /// the group left unflat again.
    #[inline]
    fn advance(&mut self, g: &mut ListGroup<'_>) -> bool {
        if self.pos >= g.selected_len() {
            self.active = false;
            g.cur = None;
            return false;
        }
        g.cur = Some(g.pos(self.pos));
        self.pos += 1;
        true
    }
}

struct ListExtend<'a> {
    src_group: usize,
    src_block: usize,
    dst_group: usize,
    /// false when the source group is already flat at this point
    flattens: bool,
    csr: Option<&'a AdjacencyCsr>,
    /// set when neighbours may carry other labels than the bound variable's
    label_filter: Option<VertexLabelId>,
    cursor: Cursor,
}

struct ColumnExtend<'a> {
    group: usize,
    src_block: usize,
    dst_block: usize,
    col: Option<&'a NbrColumn>,
    /// unselected positions of a mixed-label list may hold other labels
    src_label: VertexLabelId,
    dst_label: VertexLabelId,
    flat: bool,
    cached_gen: u64,
    valid: Vec<bool>,
    narrow: Narrowing,
}

struct Filter<'a> {
    lhs: Access<'a>,
    op: CmpOp,
    rhs: Access<'a>,
    /// the one unflat group the predicate reads, if any
    target: Option<usize>,
    /// `lhs` is a NULL-free INT64 vertex column and `rhs` an integer literal
    dense: Option<DenseI64Cmp<'a>>,
    narrow: Narrowing,
}

#[derive(Clone, Copy)]
struct DenseI64Cmp<'a> {
    block: usize,
    values: &'a [i64],
    lit: i64,
}

impl DenseI64Cmp<'_> {
    fn new<'a>(lhs: &Access<'a>, rhs: &Access<'a>, target: Option<usize>) -> Option<DenseI64Cmp<'a>> {
        match (lhs, rhs) {
            (&Access::Vertex { group, block, col }, &Access::Lit(ScalarRef::Int(lit))) if Some(group) == target => {
                Some(DenseI64Cmp {
                    block,
                    values: col.dense_i64()?,
                    lit,
                })
            }
            _ => None,
        }
    }

    /// Pushes the selected positions of `g` that pass `op` onto `out`.
    fn select(&self, op: CmpOp, g: &ListGroup<'_>, out: &mut Vec<u32>) {
        let block = &g.blocks[self.block];
        let lit = self.lit;
        let test = |v: i64| match op {
            CmpOp::Lt => v < lit,
            CmpOp::Le => v <= lit,
            CmpOp::Eq => v == lit,
            CmpOp::Ne => v != lit,
            CmpOp::Ge => v >= lit,
            CmpOp::Gt => v > lit,
            CmpOp::Contains | CmpOp::StartsWith => false,
        };
        for k in 0..g.selected_len() {
            let p = g.pos(k);
            if test(self.values[block.offset(p) as usize]) {
                out.push(p as u32);
            }
        }
    }
}

struct Flatten {
    group: usize,
    cursor: Cursor,
}

/// An undoable narrowing of one group's selection.
#[derive(Default)]
struct Narrowing {
    buf: Vec<u32>,
    saved_has: bool,
    applied: bool,
}

impl Narrowing {
    /// Installs `buf` as the selection of `g` if it selects fewer positions.
    /// Returns `false` if nothing is selected.
    fn apply(&mut self, g: &mut ListGroup<'_>) -> bool {
        if self.buf.is_empty() {
            return false;
        }
        if self.buf.len() < g.selected_len() {
            mem::swap(&mut g.sel, &mut self.buf);
            self.saved_has = g.has_sel;
            g.has_sel = true;
            self.applied = true;
        }
        true
    }

    fn undo(&mut self, g: &mut ListGroup<'_>) {
        if self.applied {
            mem::swap(&mut g.sel, &mut self.buf);
            g.has_sel = self.saved_has;
            self.applied = false;
        }
    }
}

enum Op<'a> {
    Scan(Scan),
    ListExtend(ListExtend<'a>),
    ColumnExtend(ColumnExtend<'a>),
    Filter(Filter<'a>),
    Flatten(Flatten),
}

/// Produces the next chunk from the last operator of `ops`.
fn pull<'a>(ops: &mut [Op<'a>], chunk: &mut Chunk<'a>, stats: &mut LbpStats) -> bool {
    let Some((last, rest)) = ops.split_last_mut() else {
        return false;
    };
    match last {
        Op::Scan(s) => {
            if s.next >= s.count {
                return false;
            }
            let end = (s.next + s.morsel).min(s.count);
            let gen = chunk.new_gen();
            let g = &mut chunk.groups[0];
            let mut ids = match mem::take(&mut g.blocks[0]) {
                Block::Vertices(v) => v,
                Block::Adj { .. } => Vec::new(),
            };
            ids.clear();
            ids.extend((s.next..end).map(|o| VertexId::new(s.label, o)));
            g.blocks[0] = Block::Vertices(ids);
            g.len = (end - s.next) as usize;
            g.cur = None;
            g.has_sel = false;
            g.gen = gen;
            s.next = end;
            true
        }
        Op::ListExtend(x) => loop {
            if !x.cursor.active {
                if !pull(rest, chunk, stats) {
                    return false;
                }
                x.cursor = Cursor { active: true, pos: 0 };
            }
            let g = &mut chunk.groups[x.src_group];
            let idx = if x.flattens {
                if !x.cursor.advance(g) {
                    continue;
                }
                g.cur.expect("just set")
            } else {
                x.cursor.active = false;
                g.cur.expect("source group is flat")
            };
            let src = g.blocks[x.src_block].vertex(idx);
            let Some(csr) = x.csr else { continue };
            let list = csr.list(src.offset as usize);
            if list.is_empty() {
                continue;
            }
            stats.extends_checked += 1;
            let bytes = list.bytes();
            let arena = csr.arena_range();
            let p = bytes.as_ptr() as usize;
            if !(arena.contains(&p) && p + bytes.len() <= arena.end) {
                stats.copies_detected += 1;
                debug_assert!(false, "neighbour block is not a view into the CSR arena");
            }
            let gen = chunk.new_gen();
            let d = &mut chunk.groups[x.dst_group];
            d.len = list.len();
            d.cur = None;
            d.has_sel = false;
            d.gen = gen;
            d.blocks[0] = Block::Adj { src, list };
            if let Some(label) = x.label_filter {
                d.sel.clear();
                d.sel.extend(
                    (0..list.len())
                        .filter(|&i| list.nbr_label(i) == label)
                        .map(|i| i as u32),
                );
                if d.sel.is_empty() {
                    continue;
                }
                d.has_sel = true;
            }
            return true;
        },
        Op::ColumnExtend(x) => loop {
            x.narrow.undo(&mut chunk.groups[x.group]);
            if !pull(rest, chunk, stats) {
                return false;
            }
            let g = &mut chunk.groups[x.group];
            if g.gen != x.cached_gen {
                x.cached_gen = g.gen;
                let mut out = match mem::take(&mut g.blocks[x.dst_block]) {
                    Block::Vertices(v) => v,
                    Block::Adj { .. } => Vec::new(),
                };
                out.clear();
                x.valid.clear();
                for i in 0..g.len {
                    let v = g.blocks[x.src_block].vertex(i);
                    let nbr = x
                        .col
                        .filter(|_| v.label == x.src_label)
                        .and_then(|c| c.get(v.offset as usize));
                    match nbr {
                        Some(n) if n.label == x.dst_label => {
                            out.push(n);
                            x.valid.push(true);
                        }
                        _ => {
                            out.push(v);
                            x.valid.push(false);
                        }
                    }
                }
                g.blocks[x.dst_block] = Block::Vertices(out);
            }
            if x.flat {
                if x.valid[g.cur.expect("group is flat")] {
                    return true;
                }
                continue;
            }
            x.narrow.buf.clear();
            for k in 0..g.selected_len() {
                let p = g.pos(k);
                if x.valid[p] {
                    x.narrow.buf.push(p as u32);
                }
            }
            if x.narrow.apply(g) {
                return true;
            }
        },
        Op::Filter(f) => loop {
            if let Some(t) = f.target {
                f.narrow.undo(&mut chunk.groups[t]);
            }
            if !pull(rest, chunk, stats) {
                return false;
            }
            let Some(t) = f.target else {
                if eval_cmp(f.op, f.lhs.at_cur(chunk), f.rhs.at_cur(chunk)) {
                    return true;
                }
                continue;
            };
            if let Some(d) = f.dense {
                f.narrow.buf.clear();
                d.select(f.op, &chunk.groups[t], &mut f.narrow.buf);
                if f.narrow.apply(&mut chunk.groups[t]) {
                    return true;
                }
                continue;
            }
            let lfix = (f.lhs.group() != Some(t)).then(|| f.lhs.at_cur(chunk));
            let rfix = (f.rhs.group() != Some(t)).then(|| f.rhs.at_cur(chunk));
            let g = &chunk.groups[t];
            f.narrow.buf.clear();
            for k in 0..g.selected_len() {
                let p = g.pos(k);
                let l = match lfix {
                    Some(v) => v,
                    None => f.lhs.get(chunk, p),
                };
                let r = match rfix {
                    Some(v) => v,
                    None => f.rhs.get(chunk, p),
                };
                if eval_cmp(f.op, l, r) {
                    f.narrow.buf.push(p as u32);
                }
            }
            if f.narrow.apply(&mut chunk.groups[t]) {
                return true;
            }
        },
        Op::Flatten(x) => loop {
            if !x.cursor.active {
                if !pull(rest, chunk, stats) {
                    return false;
                }
                x.cursor = Cursor { active: true, pos: 0 };
            }
            if x.cursor.advance(&mut chunk.groups[x.group]) {
                return true;
            }
        },
    }
}

fn node_label(plan: &PhysicalPlan, var: usize) -> VertexLabelId {
    match plan.vars[var].kind {
        VarKind::Node(l) => l,
        VarKind::Edge(_) => panic!("variable {var} is not a node"),
    }
}

/// A compiled plan with its shared chunk.
pub struct Pipeline<'a> {
    store: &'a GraphStore,
    ops: Vec<Op<'a>>,
    locs: Vec<VarLoc>,
    chunk: Chunk<'a>,
    stats: LbpStats,
}

impl<'a> Pipeline<'a> {
    pub fn new(store: &'a GraphStore, plan: &'a PhysicalPlan, opts: &ExecOptions) -> Result<Self, QueryError> {
        let mut locs = vec![VarLoc::Unbound; plan.vars.len()];
        let mut flat: Vec<bool> = Vec::new();
        let mut nblocks: Vec<usize> = Vec::new();
        let mut ops = Vec::with_capacity(plan.ops.len() + 2);
        let catalog = store.catalog();
        let src_loc = |locs: &[VarLoc], var: usize| match locs[var] {
            VarLoc::Node { group, block } => Ok((group, block)),
            _ => Err(QueryError::Unsupported {
                pos: Default::default(),
                message: format!("plan extends from unbound variable {}", plan.var_names[var]),
            }),
        };
        for op in &plan.ops {
            match op {
                PlanOp::Scan { var, label } => {
                    if !ops.is_empty() {
                        return Err(QueryError::Unsupported {
                            pos: Default::default(),
                            message: "scan must be the first operator".into(),
                        });
                    }
                    flat.push(false);
                    nblocks.push(1);
                    locs[*var] = VarLoc::Node { group: 0, block: 0 };
                    ops.push(Op::Scan(Scan {
                        label: *label,
                        count: store.vertex_count(*label),
                        next: 0,
                        morsel: opts.morsel.max(1) as u64,
                    }));
                }
                PlanOp::ListExtend(e) => {
                    let (gs, bs) = src_loc(&locs, e.src)?;
                    let csr = store.csr(e.label, e.dir, node_label(plan, e.src))?;
                    let flattens = !flat[gs];
                    flat[gs] = true;
                    let gn = flat.len();
                    flat.push(false);
                    nblocks.push(1);
                    locs[e.dst] = VarLoc::Node { group: gn, block: 0 };
                    locs[e.edge] = VarLoc::ListEdge {
                        group: gn,
                        block: 0,
                        label: e.label,
                        dir: e.dir,
                    };
                    let mixed = catalog.edge_label(e.label).nbr_labels(e.dir).len() > 1;
                    ops.push(Op::ListExtend(ListExtend {
                        src_group: gs,
                        src_block: bs,
                        dst_group: gn,
                        flattens,
                        csr,
                        label_filter: mixed.then_some(e.dst_label),
                        cursor: Cursor::default(),
                    }));
                }
                PlanOp::ColumnExtend(e) => {
                    let (gs, bs) = src_loc(&locs, e.src)?;
                    let col = store.nbr_column(e.label, e.dir, node_label(plan, e.src))?;
                    let bn = nblocks[gs];
                    nblocks[gs] += 1;
                    locs[e.dst] = VarLoc::Node { group: gs, block: bn };
                    locs[e.edge] = VarLoc::ColumnEdge {
                        group: gs,
                        src_block: bs,
                        nbr_block: bn,
                        label: e.label,
                        dir: e.dir,
                    };
                    ops.push(Op::ColumnExtend(ColumnExtend {
                        group: gs,
                        src_block: bs,
                        dst_block: bn,
                        col,
                        src_label: node_label(plan, e.src),
                        dst_label: e.dst_label,
                        flat: flat[gs],
                        cached_gen: u64::MAX,
                        valid: Vec::new(),
                        narrow: Narrowing::default(),
                    }));
                }
                PlanOp::Filter(p) => {
                    let lhs = access(store, plan, &locs, &p.lhs)?;
                    let rhs = match &p.rhs {
                        BoundOperand::Lit(v) => Access::Lit(v.as_ref()),
                        BoundOperand::Prop(q) => access(store, plan, &locs, q)?,
                    };
                    let mut unflat: Vec<usize> = [lhs.group(), rhs.group()]
                        .into_iter()
                        .flatten()
                        .filter(|&g| !flat[g])
                        .collect();
                    unflat.sort_unstable();
                    unflat.dedup();
                    // a comparison across two unflat groups walks one of them
                    while unflat.len() > 1 {
                        let g = unflat.remove(0);
                        flat[g] = true;
                        ops.push(Op::Flatten(Flatten {
                            group: g,
                            cursor: Cursor::default(),
                        }));
                    }
                    let target = unflat.first().copied();
                    ops.push(Op::Filter(Filter {
                        dense: DenseI64Cmp::new(&lhs, &rhs, target),
                        lhs,
                        op: p.op,
                        rhs,
                        target,
                        narrow: Narrowing::default(),
                    }));
                }
            }
        }
        if !matches!(ops.first(), Some(Op::Scan(_))) {
            return Err(QueryError::Unsupported {
                pos: Default::default(),
                message: "plan has no scan".into(),
            });
        }
        let chunk = Chunk {
            groups: nblocks
                .iter()
                .map(|&n| ListGroup {
                    blocks: vec![Block::default(); n],
                    ..ListGroup::default()
                })
                .collect(),
            next_gen: 0,
        };
        Ok(Self {
            store,
            ops,
            locs,
            chunk,
            stats: LbpStats::default(),
        })
    }

    /// Runs the pipeline to its next output chunk; `false` when exhausted.
    pub fn next_chunk(&mut self) -> bool {
        let ok = pull(&mut self.ops, &mut self.chunk, &mut self.stats);
        if ok {
            self.stats.chunks += 1;
        }
        ok
    }

    pub fn chunk(&self) -> &Chunk<'a> {
        &self.chunk
    }

    pub fn count_star(&self) -> u64 {
        self.chunk.count_star()
    }

    pub fn stats(&self) -> LbpStats {
        self.stats
    }

    fn vertex(&self, group: usize, block: usize, pos: &[usize]) -> VertexId {
        self.chunk.groups[group].blocks[block].vertex(pos[group])
    }

    fn binding(&self, loc: VarLoc, pos: &[usize]) -> Binding {
        match loc {
            VarLoc::Unbound => unreachable!("every plan variable is bound before the sink"),
            VarLoc::Node { group, block } => Binding::Vertex(self.vertex(group, block, pos)),
            VarLoc::ListEdge {
                group,
                block,
                label,
                dir,
            } => match &self.chunk.groups[group].blocks[block] {
                Block::Adj { src, list } => Binding::Edge(self.store.edge_id(label, dir, *src, list, pos[group])),
                Block::Vertices(_) => unreachable!("list edges live in adjacency blocks"),
            },
            VarLoc::ColumnEdge {
                group,
                src_block,
                nbr_block,
                label,
                dir,
            } => {
                let src = self.vertex(group, src_block, pos);
                let nbr = self.vertex(group, nbr_block, pos);
                Binding::Edge(self.store.edge_id_parts(label, dir, src, nbr, 0, None))
            }
        }
    }

    /// All flat tuples of the current chunk, one binding per plan variable.
    pub fn materialize_flat(&self) -> Vec<Vec<Binding>> {
        let mut out = Vec::new();
        self.for_each_flat(|b| out.push(b.to_vec()));
        out
    }

    /// Streams the flat tuples of the current chunk to `f`.
    pub fn for_each_flat(&self, mut f: impl FnMut(&[Binding])) {
        let mut buf = Vec::with_capacity(self.locs.len());
        self.chunk.for_each_tuple(|pos| {
            buf.clear();
            buf.extend(self.locs.iter().map(|&l| self.binding(l, pos)));
            f(&buf);
        });
    }
}

fn access<'a>(
    store: &'a GraphStore,
    plan: &PhysicalPlan,
    locs: &[VarLoc],
    p: &BoundProp,
) -> Result<Access<'a>, QueryError> {
    Ok(match locs[p.var] {
        VarLoc::Unbound => {
            return Err(QueryError::Unsupported {
                pos: Default::default(),
                message: format!("{} read before it is bound", p.text),
            })
        }
        VarLoc::Node { group, block } => Access::Vertex {
            group,
            block,
            col: store.vertex_property(node_label(plan, p.var), p.prop),
        },
        VarLoc::ListEdge {
            group,
            block,
            label,
            dir,
        } => Access::ListEdge {
            group,
            block,
            reader: store.edge_prop_reader(label, dir, p.prop)?,
        },
        VarLoc::ColumnEdge {
            group,
            src_block,
            nbr_block,
            label,
            dir,
        } => Access::ColumnEdge {
            group,
            src_block,
            nbr_block,
            reader: store.edge_prop_reader(label, dir, p.prop)?,
        },
    })
}

/// Runs `plan` and computes its sink.
pub fn execute(
    store: &GraphStore,
    plan: &PhysicalPlan,
    opts: &ExecOptions,
) -> Result<(QueryResult, LbpStats), QueryError> {
    let mut p = Pipeline::new(store, plan, opts)?;
    let result = match &plan.sink {
        Sink::Count => {
            let mut n = 0u64;
            while p.next_chunk() {
                n += p.count_star();
            }
            QueryResult::Count(n)
        }
        Sink::Sum(prop) | Sink::Min(prop) => {
            let mut acc = Accumulator::for_sink(&plan.sink).expect("aggregate sink");
            let a = access(store, plan, &p.locs, prop)?;
            let g = a.group().expect("aggregates read a variable");
            while p.next_chunk() {
                let chunk = &p.chunk;
                let grp = &chunk.groups[g];
                match grp.cur {
                    Some(c) => acc.add(a.get(chunk, c), chunk.count_star()),
                    None => {
                        let others: u64 = chunk
                            .groups
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != g)
                            .map(|(_, x)| x.tuple_count())
                            .product();
                        for k in 0..grp.selected_len() {
                            acc.add(a.get(chunk, grp.pos(k)), others);
                        }
                    }
                }
            }
            QueryResult::Scalar {
                column: plan.columns[0].clone(),
                value: acc.finish()?,
            }
        }
        Sink::Rows(proj) => {
            enum Col<'a> {
                Vertex(usize, usize),
                Prop(Access<'a>),
            }
            let cols = proj
                .iter()
                .map(|pr| match pr {
                    Projection::Vertex(v) => match p.locs[*v] {
                        VarLoc::Node { group, block } => Ok(Col::Vertex(group, block)),
                        _ => unreachable!("vertex projections name node variables"),
                    },
                    Projection::Prop(bp) => access(store, plan, &p.locs, bp).map(Col::Prop),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut rows = Vec::new();
            while p.next_chunk() {
                let chunk = &p.chunk;
                chunk.for_each_tuple(|pos| {
                    rows.push(
                        cols.iter()
                            .map(|c| match c {
                                Col::Vertex(g, b) => Value::Vertex(chunk.groups[*g].blocks[*b].vertex(pos[*g])),
                                Col::Prop(a) => a
                                    .get(chunk, pos[a.group().expect("projection reads a variable")])
                                    .to_value(),
                            })
                            .collect(),
                    )
                });
            }
            QueryResult::Rows {
                columns: plan.columns.clone(),
                rows,
            }
        }
    };
    Ok((result, p.stats()))
}

/// Flat enumeration of every chunk the pipeline emits.
pub fn bindings(store: &GraphStore, plan: &PhysicalPlan, opts: &ExecOptions) -> Result<Vec<Vec<Binding>>, QueryError> {
    let mut out = Vec::new();
    for_each_binding(store, plan, opts, |b| out.push(b.to_vec()))?;
    Ok(out)
}

/// Streams the flat enumeration of every chunk to `f`.
pub fn for_each_binding(
    store: &GraphStore,
    plan: &PhysicalPlan,
    opts: &ExecOptions,
    mut f: impl FnMut(&[Binding]),
) -> Result<(), QueryError> {
    let mut p = Pipeline::new(store, plan, opts)?;
    while p.next_chunk() {
        p.for_each_flat(&mut f);
    }
    Ok(())
}
