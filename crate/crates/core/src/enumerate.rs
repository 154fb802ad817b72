//! Exhaustive generation of all shapes of a given size.
//!
//! Level `n` is produced by split-and-combine over the smaller levels: for
//! every split `a <= n - a` each size-`a` shape is paired with every
//! size-`(n - a)` shape that is not smaller than it. Within one split the
//! pairs come out in canonical order already (all first children of a split
//! have codes of the same length), so the whole level is a k-way merge of the
//! per-split runs and can be streamed without materializing it.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::shape::TreeShape;

type Level = Arc<[TreeShape]>;

fn level_cache() -> &'static RwLock<Vec<Level>> {
    static CACHE: OnceLock<RwLock<Vec<Level>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Arc::from(Vec::new()), Arc::from(vec![TreeShape::leaf()])]))
}

/// All shapes of size `n`, materialized and cached. Levels below the
/// requested one are cached as a side effect.
pub fn shapes_of_size(n: usize) -> Level {
    assert!(n >= 1, "shape sizes start at 1");
    if let Some(level) = level_cache().read().expect("level cache poisoned").get(n) {
        return level.clone();
    }
    let mut next = level_cache().read().expect("level cache poisoned").len();
    while next <= n {
        let lower = cached_levels_below(next);
        let built: Vec<TreeShape> = SplitMerge::new(next, lower).collect();
        let mut cache = level_cache().write().expect("level cache poisoned");
        if cache.len() == next {
            cache.push(Arc::from(built));
        }
        next = cache.len();
    }
    level_cache().read().expect("level cache poisoned")[n].clone()
}

fn cached_levels_below(n: usize) -> Vec<Level> {
    let cache = level_cache().read().expect("level cache poisoned");
    cache[..n].to_vec()
}

/// Lazily yields every size-`n` shape exactly once, in strictly increasing
/// canonical order.
pub struct ShapeStream {
    size_class: usize,
    inner: StreamInner,
}

enum StreamInner {
    Single(Option<TreeShape>),
    Merge(SplitMerge),
}

impl ShapeStream {
    pub fn size_class(&self) -> usize {
        self.size_class
    }
}

impl Iterator for ShapeStream {
    type Item = TreeShape;

    fn next(&mut self) -> Option<TreeShape> {
        match &mut self.inner {
            StreamInner::Single(s) => s.take(),
            StreamInner::Merge(m) => m.next(),
        }
    }
}

/// Streams all size-`n` shapes in canonical order. Only the levels below `n`
/// are materialized.
pub fn all_shapes(n: usize) -> ShapeStream {
    assert!(n >= 1, "shape sizes start at 1");
    let inner = if n == 1 {
        StreamInner::Single(Some(TreeShape::leaf()))
    } else {
        shapes_of_size(n - 1);
        StreamInner::Merge(SplitMerge::new(n, cached_levels_below(n)))
    };
    ShapeStream {
        size_class: n,
        inner,
    }
}

/// One run of pairs `(x, y)` with `|x| = a`, `|y| = n - a`, `x <= y`.
struct SplitRun {
    first: Level,
    second: Level,
    equal_sizes: bool,
    i: usize,
    j: usize,
}

impl SplitRun {
    fn current(&self) -> Option<TreeShape> {
        (self.i < self.first.len() && self.j < self.second.len())
            .then(|| TreeShape::join(&self.first[self.i], &self.second[self.j]))
    }

    fn advance(&mut self) {
        self.j += 1;
        if self.j == self.second.len() {
            self.i += 1;
            self.j = if self.equal_sizes { self.i } else { 0 };
        }
    }
}

struct Head(TreeShape, usize);

impl PartialEq for Head {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl Eq for Head {}
impl PartialOrd for Head {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Head {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

struct SplitMerge {
    runs: Vec<SplitRun>,
    heap: BinaryHeap<Reverse<Head>>,
}

impl SplitMerge {
    fn new(n: usize, lower: Vec<Level>) -> SplitMerge {
        let mut runs = Vec::new();
        for a in 1..=n / 2 {
            let b = n - a;
            runs.push(SplitRun {
                first: lower[a].clone(),
                second: lower[b].clone(),
                equal_sizes: a == b,
                i: 0,
                j: 0,
            });
        }
        let mut heap = BinaryHeap::new();
        for (idx, run) in runs.iter().enumerate() {
            if let Some(t) = run.current() {
                heap.push(Reverse(Head(t, idx)));
            }
        }
        SplitMerge { runs, heap }
    }
}

impl Iterator for SplitMerge {
    type Item = TreeShape;

    fn next(&mut self) -> Option<TreeShape> {
        let Reverse(Head(shape, idx)) = self.heap.pop()?;
        let run = &mut self.runs[idx];
        run.advance();
        if let Some(t) = run.current() {
            self.heap.push(Reverse(Head(t, idx)));
        }
        Some(shape)
    }
}

/// Wedderburn–Etherington number `W_n`, the number of size-`n` shapes, by the
/// convolution recurrence. Panics on `u128` overflow (beyond `n ≈ 95`).
pub fn wedderburn(n: usize) -> u128 {
    assert!(n >= 1, "shape sizes start at 1");
    let mut w: Vec<u128> = vec![0, 1];
    for m in 2..=n {
        let mut total: u128 = 0;
        for i in 1..=(m - 1) / 2 {
            total = total
                .checked_add(w[i].checked_mul(w[m - i]).expect("W_n overflows u128"))
                .expect("W_n overflows u128");
        }
        if m % 2 == 0 {
            let h = w[m / 2];
            total = total
                .checked_add(h.checked_mul(h + 1).expect("W_n overflows u128") / 2)
                .expect("W_n overflows u128");
        }
        w.push(total);
    }
    w[n]
}

/// Compact enumeration of all shapes up to a fixed size.
///
/// Every shape is a `u64` canonical code (bit `1` for an internal node, `0` for
/// a leaf, pre-order, most significant symbol first), so sizes are limited to
/// 32 leaves. Within a level codes have equal length and numeric order is
/// canonical order; the position in the sorted level is the shape's id.
#[derive(Debug)]
pub struct PackedLevels {
    levels: Vec<PackedLevel>,
}

#[derive(Debug, Default)]
pub struct PackedLevel {
    pub codes: Vec<u64>,
    /// Ids of the two children; the first lives in level `first_size[i]`,
    /// the second in level `n - first_size[i]`.
    pub children: Vec<(u32, u32)>,
    pub first_size: Vec<u8>,
}

pub const PACKED_MAX_SIZE: usize = 32;

impl PackedLevels {
    /// Builds levels `1..=max_size`. `max_size` must not exceed
    /// [`PACKED_MAX_SIZE`].
    pub fn build(max_size: usize) -> PackedLevels {
        let mut packed = PackedLevels {
            levels: vec![
                PackedLevel::default(),
                PackedLevel {
                    codes: vec![0],
                    children: vec![(0, 0)],
                    first_size: vec![0],
                },
            ],
        };
        packed.extend_to(max_size);
        packed
    }

    /// Adds levels up to `max_size`; a no-op when they already exist.
    pub fn extend_to(&mut self, max_size: usize) {
        assert!(
            (1..=PACKED_MAX_SIZE).contains(&max_size),
            "packed levels support sizes 1..={PACKED_MAX_SIZE}"
        );
        let levels = &mut self.levels;
        for n in levels.len()..=max_size {
            let mut entries: Vec<(u64, u32, u32, u8)> = Vec::with_capacity(
                usize::try_from(wedderburn(n)).unwrap_or(0),
            );
            for a in 1..=n / 2 {
                let b = n - a;
                let la = &levels[a];
                let lb = &levels[b];
                let shift = (2 * b - 1) as u32;
                let top = 1u64 << (2 * n - 2);
                for (i, &ca) in la.codes.iter().enumerate() {
                    let start = if a == b { i } else { 0 };
                    for (j, &cb) in lb.codes.iter().enumerate().skip(start) {
                        entries.push((top | (ca << shift) | cb, i as u32, j as u32, a as u8));
                    }
                }
            }
            entries.sort_unstable_by_key(|e| e.0);
            let mut level = PackedLevel {
                codes: Vec::with_capacity(entries.len()),
                children: Vec::with_capacity(entries.len()),
                first_size: Vec::with_capacity(entries.len()),
            };
            for (code, i, j, a) in entries {
                level.codes.push(code);
                level.children.push((i, j));
                level.first_size.push(a);
            }
            levels.push(level);
        }
    }

    pub fn max_size(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &PackedLevel {
        &self.levels[n]
    }

    pub fn count(&self, n: usize) -> usize {
        self.levels[n].codes.len()
    }

    /// Id of the shape with packed code `code` in level `n`.
    pub fn index_of(&self, n: usize, code: u64) -> Option<usize> {
        self.levels.get(n)?.codes.binary_search(&code).ok()
    }

    pub fn shape(&self, n: usize, id: usize) -> TreeShape {
        let level = &self.levels[n];
        if n == 1 {
            return TreeShape::leaf();
        }
        let (i, j) = level.children[id];
        let a = level.first_size[id] as usize;
        TreeShape::join(&self.shape(a, i as usize), &self.shape(n - a, j as usize))
    }

    /// Packed code of an arbitrary shape of size at most 32.
    pub fn pack(shape: &TreeShape) -> u64 {
        assert!(shape.size() <= PACKED_MAX_SIZE);
        shape
            .code()
            .as_bytes()
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b == b'1'))
    }

    /// Id of `shape` within its level.
    pub fn id_of(&self, shape: &TreeShape) -> Option<usize> {
        if shape.size() > self.max_size() {
            return None;
        }
        self.index_of(shape.size(), Self::pack(shape))
    }
}
