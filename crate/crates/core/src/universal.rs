//! `k`-universal trees: shapes whose size-`k` deck holds every `k`-leaf shape.
//!
//! [`min_universal_size`] sweeps sizes `n = k, k + 1, ..` and tests every
//! `n`-leaf shape. Decks are bitsets over the canonical enumeration of each
//! size class, computed bottom-up from the children:
//! `deck_j(A ⊕ B) = deck_j(A) ∪ deck_j(B) ∪ {x ⊕ y : x ∈ deck_a(A), y ∈ deck_b(B), a + b = j}`.

use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::deck::SetEngine;
use crate::enumerate::{shapes_of_size, wedderburn, PackedLevels, PACKED_MAX_SIZE};
use crate::error::{Error, Result};
use crate::shape::TreeShape;

/// Environment variable naming the default resume cache file.
pub const CACHE_ENV: &str = "TREEDECK_CACHE";

/// Largest level (by shape count) the search will enumerate by default.
pub const DEFAULT_LEVEL_CEILING: u128 = 4_000_000;

/// Largest `k` searched exhaustively without an explicit budget.
pub const DEFAULT_EXHAUSTIVE_K: usize = 11;

const CACHE_HEADER: &str = "# treedeck universal-search cache v1\n\
# R<TAB>k<TAB>n<TAB>start<TAB>end<TAB>explored<TAB>pruned<TAB>witness ids (comma separated, - for none)\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniversalityCheck {
    pub k: usize,
    pub size: usize,
    pub covered: usize,
    pub required: u128,
    /// `k` exceeds the tree size, so the tree is not `k`-universal by convention.
    pub k_exceeds_size: bool,
}

impl UniversalityCheck {
    pub fn universal(&self) -> bool {
        !self.k_exceeds_size && self.covered as u128 == self.required
    }
}

pub fn universality(t: &TreeShape, k: usize) -> UniversalityCheck {
    let required = wedderburn(k);
    if k == 0 || k > t.size() {
        return UniversalityCheck {
            k,
            size: t.size(),
            covered: 0,
            required,
            k_exceeds_size: k > t.size(),
        };
    }
    let covered = SetEngine::new()
        .deck_size(t, k)
        .expect("1 <= k <= size");
    UniversalityCheck {
        k,
        size: t.size(),
        covered,
        required,
        k_exceeds_size: false,
    }
}

pub fn is_universal(t: &TreeShape, k: usize) -> bool {
    universality(t, k).universal()
}

#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub deadline: Option<Duration>,
    /// Largest size scanned. `None` scans up to the best known upper bound.
    pub max_size: Option<usize>,
    pub cache: Option<PathBuf>,
    /// Shapes per work unit; also the granularity of cache records.
    pub chunk: usize,
    pub level_ceiling: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            deadline: None,
            max_size: None,
            cache: std::env::var_os(CACHE_ENV).map(PathBuf::from),
            chunk: 1 << 14,
            level_ceiling: DEFAULT_LEVEL_CEILING,
        }
    }
}

impl SearchBudget {
    /// Unlimited for `k <= 11`; for larger `k` no sizes are scanned and only
    /// the known upper bound is reported.
    pub fn default_for(k: usize) -> SearchBudget {
        let mut b = SearchBudget::default();
        if k > DEFAULT_EXHAUSTIVE_K {
            b.max_size = Some(k.saturating_sub(1));
        }
        b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchCertificate {
    pub k: usize,
    /// `u(k)` when `exhaustive`, otherwise an upper bound.
    pub u_value: usize,
    /// Every size below `u_value` was refuted.
    pub exhaustive: bool,
    /// `witnesses` lists every `k`-universal shape of size `u_value`.
    pub witnesses_complete: bool,
    /// Every size below this was refuted.
    pub lower_bound: usize,
    /// Shapes tested at the scanned sizes.
    pub explored: u64,
    /// Shapes rejected by the counting bound alone.
    pub pruned: u64,
    pub witnesses: Vec<TreeShape>,
}

impl SearchCertificate {
    /// `u(k)` as text: the exact value, or `<=bound` when not exhaustive.
    pub fn u_text(&self) -> String {
        if self.exhaustive {
            self.u_value.to_string()
        } else {
            format!("<={}", self.u_value)
        }
    }

    pub fn to_records(&self) -> String {
        let mut out = format!(
            "u({})={}\texhaustive={}\twitnesses_complete={}\tlower_bound={}\texplored={}\tpruned={}\twitnesses={}\n",
            self.k,
            self.u_text(),
            self.exhaustive,
            self.witnesses_complete,
            self.lower_bound,
            self.explored,
            self.pruned,
            self.witnesses.len()
        );
        for w in &self.witnesses {
            out.push_str(&format!("witness\t{w}\n"));
        }
        out
    }
}

fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}

fn popcount(words: &[u64]) -> u64 {
    words.iter().map(|w| u64::from(w.count_ones())).sum()
}

/// Per-size deck bitsets for every shape below the scanned size.
struct Workspace {
    k: usize,
    levels: PackedLevels,
    /// `counts[j] = W_j` for `j <= k`.
    counts: Vec<usize>,
    words: Vec<usize>,
    /// Start of the size-`j` bitset within a row; `offset[k + 1]` is the full row.
    offset: Vec<usize>,
    /// `joins[a * (k + 1) + b]` for `a <= b`: id of `x ⊕ y` at index `x * W_b + y`.
    joins: Vec<Vec<u32>>,
    /// `tables[s]`: rows of `stride(s)` words, one per size-`s` shape.
    tables: Vec<Vec<u64>>,
}

impl Workspace {
    fn new(k: usize) -> Workspace {
        let levels = PackedLevels::build(k.max(1));
        let counts: Vec<usize> = (0..=k).map(|j| levels.count(j.max(1)) * usize::from(j > 0)).collect();
        let words: Vec<usize> = counts.iter().map(|c| c.div_ceil(64)).collect();
        let mut offset = vec![0; k + 2];
        for j in 1..=k {
            offset[j + 1] = offset[j] + words[j];
        }
        let mut joins = vec![Vec::new(); (k + 1) * (k + 1)];
        for j in 2..=k {
            let top = 1u64 << (2 * j - 2);
            for a in 1..=j / 2 {
                let b = j - a;
                let (la, lb) = (levels.level(a), levels.level(b));
                let shift = (2 * b - 1) as u32;
                let mut table = vec![0u32; counts[a] * counts[b]];
                for x in 0..counts[a] {
                    for y in 0..counts[b] {
                        let (f, s) = if a == b && y < x { (y, x) } else { (x, y) };
                        let code = top | (la.codes[f] << shift) | lb.codes[s];
                        let id = levels.index_of(j, code).expect("joins of enumerated shapes are enumerated");
                        table[x * counts[b] + y] = id as u32;
                    }
                }
                joins[a * (k + 1) + b] = table;
            }
        }
        let mut ws = Workspace {
            k,
            levels,
            counts,
            words,
            offset,
            joins,
            tables: vec![Vec::new(), Vec::new()],
        };
        if k >= 1 {
            ws.tables[1] = vec![1];
        }
        ws
    }

    fn stride(&self, s: usize) -> usize {
        self.offset[s.min(self.k) + 1]
    }

    fn bits(&self, s: usize, id: usize, j: usize) -> &[u64] {
        let start = id * self.stride(s) + self.offset[j];
        &self.tables[s][start..start + self.words[j]]
    }

    fn join_id(&self, a: usize, x: usize, b: usize, y: usize) -> usize {
        if a <= b {
            self.joins[a * (self.k + 1) + b][x * self.counts[b] + y] as usize
        } else {
            self.joins[b * (self.k + 1) + a][y * self.counts[a] + x] as usize
        }
    }

    fn split_range(a: usize, b: usize, j: usize) -> std::ops::RangeInclusive<usize> {
        j.saturating_sub(b).max(1)..=a.min(j - 1)
    }

    /// Size-`j` deck of the shape `A ⊕ B` into `out` (zeroed by the caller).
    fn fill_deck(&self, a: usize, ia: usize, b: usize, ib: usize, j: usize, out: &mut [u64]) {
        if j <= a {
            for (o, w) in out.iter_mut().zip(self.bits(a, ia, j)) {
                *o |= w;
            }
        }
        if j <= b {
            for (o, w) in out.iter_mut().zip(self.bits(b, ib, j)) {
                *o |= w;
            }
        }
        for ap in Self::split_range(a, b, j) {
            let bp = j - ap;
            let db = self.bits(b, ib, bp);
            for x in ones(self.bits(a, ia, ap)) {
                for y in ones(db) {
                    let id = self.join_id(ap, x, bp, y);
                    out[id / 64] |= 1 << (id % 64);
                }
            }
        }
    }

    /// Upper bound on the size-`j` deck of `A ⊕ B`.
    fn deck_bound(&self, a: usize, ia: usize, b: usize, ib: usize, j: usize) -> u64 {
        let mut ub = 0;
        if j <= a {
            ub += popcount(self.bits(a, ia, j));
        }
        if j <= b {
            ub += popcount(self.bits(b, ib, j));
        }
        for ap in Self::split_range(a, b, j) {
            ub += popcount(self.bits(a, ia, ap)) * popcount(self.bits(b, ib, j - ap));
        }
        ub
    }

    fn children(&self, s: usize, id: usize) -> (usize, usize, usize, usize) {
        let level = self.levels.level(s);
        let (ia, ib) = level.children[id];
        let a = level.first_size[id] as usize;
        (a, ia as usize, s - a, ib as usize)
    }

    fn extend_tables_to(&mut self, s_max: usize) {
        self.levels.extend_to(s_max.max(1));
        for s in self.tables.len()..=s_max {
            let stride = self.stride(s);
            let mut data = vec![0u64; stride * self.levels.count(s)];
            let this = &*self;
            data.par_chunks_mut(stride).enumerate().for_each(|(id, row)| {
                let (a, ia, b, ib) = this.children(s, id);
                for j in 1..=s.min(this.k) {
                    let out = &mut row[this.offset[j]..this.offset[j] + this.words[j]];
                    this.fill_deck(a, ia, b, ib, j, out);
                }
            });
            self.tables.push(data);
        }
    }

    /// Tests ids `range` of level `n`; tables must cover sizes below `n`.
    fn scan(&self, n: usize, start: usize, end: usize) -> RangeResult {
        let k = self.k;
        let target = self.counts[k] as u64;
        let mut out = vec![0u64; self.words[k]];
        let mut res = RangeResult::default();
        for id in start..end {
            res.explored += 1;
            if n == 1 {
                if k == 1 {
                    res.witnesses.push(id as u32);
                }
                continue;
            }
            let (a, ia, b, ib) = self.children(n, id);
            if self.deck_bound(a, ia, b, ib, k) < target {
                res.pruned += 1;
                continue;
            }
            out.iter_mut().for_each(|w| *w = 0);
            self.fill_deck(a, ia, b, ib, k, &mut out);
            if popcount(&out) == target {
                res.witnesses.push(id as u32);
            }
        }
        res
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct RangeResult {
    explored: u64,
    pruned: u64,
    witnesses: Vec<u32>,
}

type CacheKey = (usize, usize, usize, usize);

/// Append-only log of finished ranges. Each record is a single write, so
/// concurrent writers interleave whole lines.
struct RangeCache {
    path: PathBuf,
    records: HashMap<CacheKey, RangeResult>,
    writer: Mutex<File>,
}

impl RangeCache {
    fn open(path: &Path) -> Result<RangeCache> {
        let records = if path.exists() {
            Self::load(path)?
        } else {
            HashMap::new()
        };
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if file.metadata()?.len() == 0 {
            file.write_all(CACHE_HEADER.as_bytes())?;
        }
        Ok(RangeCache {
            path: path.to_path_buf(),
            records,
            writer: Mutex::new(file),
        })
    }

    fn load(path: &Path) -> Result<HashMap<CacheKey, RangeResult>> {
        let mut records = HashMap::new();
        let reader = BufReader::new(File::open(path)?);
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| Error::CacheFormat {
                path: path.display().to_string(),
                line: idx + 1,
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 8 || fields[0] != "R" {
                return Err(bad("expected 8 tab-separated fields starting with R"));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad("expected an unsigned integer"));
            let key = (
                num(fields[1])? as usize,
                num(fields[2])? as usize,
                num(fields[3])? as usize,
                num(fields[4])? as usize,
            );
            let witnesses = if fields[7] == "-" {
                Vec::new()
            } else {
                fields[7]
                    .split(',')
                    .map(|s| s.parse::<u32>().map_err(|_| bad("bad witness id")))
                    .collect::<Result<Vec<_>>>()?
            };
            records.insert(
                key,
                RangeResult {
                    explored: num(fields[5])?,
                    pruned: num(fields[6])?,
                    witnesses,
                },
            );
        }
        Ok(records)
    }

    fn get(&self, key: &CacheKey) -> Option<&RangeResult> {
        self.records.get(key)
    }

    fn append(&self, key: CacheKey, r: &RangeResult) -> Result<()> {
        let ids = if r.witnesses.is_empty() {
            "-".to_string()
        } else {
            r.witnesses
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        let line = format!(
            "R\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            key.0, key.1, key.2, key.3, r.explored, r.pruned, ids
        );
        let mut w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        w.write_all(line.as_bytes()).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", self.path.display()),
            ))
        })
    }
}

/// Smallest known `k`-universal tree: the catalog entry for `k <= 12`, else
/// every `k`-leaf shape hung off a caterpillar spine.
pub fn known_universal(k: usize) -> TreeShape {
    catalog()
        .into_iter()
        .filter(|e| e.k == k)
        .min_by(|x, y| x.tree.cmp(&y.tree))
        .map(|e| e.tree)
        .unwrap_or_else(|| spine_universal(k))
}

/// `S_1 ⊕ (S_2 ⊕ (.. ⊕ S_W))` over all `k`-leaf shapes `S_i`; size `k * W_k`.
pub fn spine_universal(k: usize) -> TreeShape {
    assert!(k >= 1, "k must be positive");
    let shapes = shapes_of_size(k);
    let mut iter = shapes.iter().rev();
    let mut t = iter.next().expect("every size has a shape").clone();
    for s in iter {
        t = TreeShape::join(s, &t);
    }
    t
}

/// Smallest size `n` such that some `n`-leaf shape is `k`-universal, with the
/// full list of such shapes when the sweep completes.
pub fn min_universal_size(k: usize, budget: &SearchBudget) -> Result<SearchCertificate> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            what: "min_universal_size",
            detail: "k must be positive".into(),
        });
    }
    let started = Instant::now();
    let known = known_universal(k);
    let mut max_n = budget.max_size.unwrap_or(known.size()).min(known.size());
    max_n = max_n.min(PACKED_MAX_SIZE);
    while max_n >= k && wedderburn(max_n) > budget.level_ceiling {
        max_n -= 1;
    }
    let chunk = budget.chunk.max(1);
    let cache = budget.cache.as_deref().map(RangeCache::open).transpose()?;

    let mut lower_bound = k;
    let mut explored = 0u64;
    let mut pruned = 0u64;
    if max_n >= k {
        let mut ws = Workspace::new(k);
        for n in k..=max_n {
            if budget.deadline.is_some_and(|d| started.elapsed() >= d) {
                break;
            }
            ws.extend_tables_to(n - 1);
            ws.levels.extend_to(n);
            let total = ws.levels.count(n);
            let ranges: Vec<(usize, usize)> = (0..total)
                .step_by(chunk)
                .map(|s| (s, (s + chunk).min(total)))
                .collect();
            let results: Vec<Option<RangeResult>> = ranges
                .par_iter()
                .map(|&(s, e)| -> Result<Option<RangeResult>> {
                    let key = (k, n, s, e);
                    if let Some(hit) = cache.as_ref().and_then(|c| c.get(&key)) {
                        return Ok(Some(hit.clone()));
                    }
                    if budget.deadline.is_some_and(|d| started.elapsed() >= d) {
                        return Ok(None);
                    }
                    let r = ws.scan(n, s, e);
                    if let Some(c) = &cache {
                        c.append(key, &r)?;
                    }
                    Ok(Some(r))
                })
                .collect::<Result<_>>()?;
            let complete = results.iter().all(Option::is_some);
            let mut ids = Vec::new();
            for r in results.into_iter().flatten() {
                explored += r.explored;
                pruned += r.pruned;
                ids.extend(r.witnesses);
            }
            if !ids.is_empty() {
                return Ok(SearchCertificate {
                    k,
                    u_value: n,
                    exhaustive: true,
                    witnesses_complete: complete,
                    lower_bound: n,
                    explored,
                    pruned,
                    witnesses: ids.iter().map(|&id| ws.levels.shape(n, id as usize)).collect(),
                });
            }
            if !complete {
                break;
            }
            lower_bound = n + 1;
        }
    }
    Ok(SearchCertificate {
        k,
        u_value: known.size(),
        exhaustive: false,
        witnesses_complete: false,
        lower_bound,
        explored,
        pruned,
        witnesses: vec![known],
    })
}

/// Every minimum-size `k`-universal shape, in canonical order.
pub fn all_min_universal(k: usize) -> Result<Vec<TreeShape>> {
    let cert = min_universal_size(k, &SearchBudget::default_for(k))?;
    if !cert.exhaustive || !cert.witnesses_complete {
        return Err(Error::NotExhaustive { k });
    }
    Ok(cert.witnesses)
}

/// `a(1) = 1`, `a(n) = Σ a(d)` over proper divisors `d` of `n`, and the
/// partial sums `K(n) = a(1) + .. + a(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KalmarSequence {
    pub factorizations: Vec<u128>,
    pub partial_sums: Vec<u128>,
}

impl KalmarSequence {
    pub fn new(upto: usize) -> KalmarSequence {
        let mut a = vec![0u128; upto + 1];
        if upto >= 1 {
            a[1] = 1;
        }
        for d in 1..=upto {
            for m in (2 * d..=upto).step_by(d) {
                a[m] += a[d];
            }
        }
        let partial_sums = a[1..]
            .iter()
            .scan(0u128, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        KalmarSequence {
            factorizations: a[1..].to_vec(),
            partial_sums,
        }
    }

    /// `K(n)` for `1 <= n <= upto`.
    pub fn term(&self, n: usize) -> u128 {
        self.partial_sums[n - 1]
    }
}

pub fn kalmar_terms(upto: usize) -> Vec<u128> {
    KalmarSequence::new(upto).partial_sums
}

/// Named trees whose universality is known, one or more per `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub label: String,
    pub k: usize,
    pub tree: TreeShape,
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}", self.label, self.k, self.tree.size(), self.tree)
    }
}

/// The minimum `k`-universal trees for `k <= 11`, and a 28-leaf 12-universal tree.
pub fn catalog() -> Vec<CatalogEntry> {
    let c = |n: usize| TreeShape::caterpillar(n).expect("positive");
    let j = |a: &TreeShape, b: &TreeShape| TreeShape::join(a, b);
    let b2 = TreeShape::complete(2);
    // Left-deep chain: ((t ⊕ s1) ⊕ s2) ⊕ ..
    let chain = |t: TreeShape, rest: &[&TreeShape]| rest.iter().fold(t, |acc, s| j(&acc, s));
    let (c1, c2, c3, c4) = (c(1), c(2), c(3), c(4));

    let u4_1 = j(&c3, &c2);
    let u4_2 = j(&b2, &c1);
    let u5 = j(&u4_1, &c1);
    let u7 = chain(u5.clone(), &[&c3, &c1]);
    let p = chain(u4_2.clone(), &[&c1, &u4_1]);
    let q = j(&u5, &u4_1);
    let r = j(&u5, &u4_2);
    let s = chain(c4.clone(), &[&c2, &u4_2]);
    let v = j(&u7, &u5);
    let u8_1 = chain(p.clone(), &[&c2, &c1]);
    let u6_1 = chain(c3.clone(), &[&c3, &c2, &c1]);

    let mut out = Vec::new();
    let mut push = |label: &str, k: usize, tree: TreeShape| {
        out.push(CatalogEntry {
            label: label.to_string(),
            k,
            tree,
        })
    };
    push("U1", 1, c1.clone());
    push("U2", 2, c2.clone());
    push("U3", 3, c3.clone());
    push("U4.1", 4, u4_1.clone());
    push("U4.2", 4, u4_2.clone());
    push("U5", 5, u5.clone());
    push("U6.1", 6, u6_1.clone());
    push("U6.2", 6, chain(c3.clone(), &[&c3, &c1, &c2]));
    push("U6.3", 6, chain(u4_1.clone(), &[&c3, &c1]));
    push("U6.4", 6, chain(u4_2.clone(), &[&c3, &c1]));
    push("U6.5", 6, chain(c4.clone(), &[&b2, &c1]));
    push("U6.6", 6, j(&u5, &c3));
    push("U7", 7, u7.clone());
    push("U8.1", 8, u8_1.clone());
    push("U8.2", 8, chain(p.clone(), &[&c1, &c2]));
    push("U8.3", 8, chain(q.clone(), &[&c2, &c1]));
    push("U8.4", 8, chain(q.clone(), &[&c1, &c2]));
    push("U8.5", 8, chain(r.clone(), &[&c2, &c1]));
    push("U8.6", 8, chain(r.clone(), &[&c1, &c2]));
    push("U8.7", 8, chain(s.clone(), &[&c2, &c1]));
    push("U8.8", 8, chain(s.clone(), &[&c1, &c2]));
    push("U9.1", 9, chain(p, &[&c1, &c3, &c1]));
    push("U9.2", 9, chain(q, &[&c1, &c3, &c1]));
    push("U9.3", 9, chain(r, &[&c1, &c3, &c1]));
    push("U9.4", 9, chain(s, &[&c1, &c3, &c1]));
    push("U9.5", 9, chain(u5.clone(), &[&c4, &c1, &b2, &c1]));
    push("U9.6", 9, chain(u5, &[&b2, &c1, &c4, &c1]));
    push("U9.7", 9, chain(u7.clone(), &[&u4_1, &c1]));
    push("U9.8", 9, chain(u7, &[&u4_2, &c1]));
    push("U10.1", 10, chain(v.clone(), &[&c1, &c2]));
    push("U10.2", 10, chain(v.clone(), &[&c2, &c1]));
    push("U11", 11, chain(v, &[&c1, &c3, &c1]));
    push("U12", 12, chain(j(&u8_1, &u6_1), &[&c1, &c3, &c1]));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub k: usize,
    pub kalmar: u128,
    pub certificate: SearchCertificate,
}

/// Kalmár terms beside `u(k)` for `k = 1..=max_k`, each searched under
/// `budget(k)`.
pub fn table1<F>(max_k: usize, budget: F) -> Result<Vec<Table1Row>>
where
    F: Fn(usize) -> SearchBudget,
{
    let kalmar = KalmarSequence::new(max_k);
    (1..=max_k)
        .map(|k| {
            Ok(Table1Row {
                k,
                kalmar: kalmar.term(k),
                certificate: min_universal_size(k, &budget(k))?,
            })
        })
        .collect()
}

/// Header row of `k`, then one row each for the Kalmár terms and `u(k)`.
pub fn table1_records(rows: &[Table1Row]) -> String {
    let row = |name: &str, cell: &dyn Fn(&Table1Row) -> String| {
        std::iter::once(name.to_string())
            .chain(rows.iter().map(cell))
            .collect::<Vec<_>>()
            .join("\t")
            + "\n"
    };
    row("k", &|r| r.k.to_string())
        + &row("kalmar", &|r| r.kalmar.to_string())
        + &row("u", &|r| r.certificate.u_text())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_cache(k: usize) -> SearchBudget {
        let mut b = SearchBudget::default_for(k);
        b.cache = None;
        b
    }

    #[test]
    fn kalmar_prefix() {
        assert_eq!(
            kalmar_terms(12),
            vec![1, 2, 3, 5, 6, 9, 10, 14, 16, 19, 20, 28]
        );
        assert_eq!(KalmarSequence::new(12).factorizations[11], 8);
    }

    #[test]
    fn small_u_values() {
        let expected = [1, 2, 3, 5, 6, 9, 10];
        for (k, &u) in (1..=7).zip(&expected) {
            let cert = min_universal_size(k, &no_cache(k)).unwrap();
            assert!(cert.exhaustive && cert.witnesses_complete, "k = {k}");
            assert_eq!(cert.u_value, u, "k = {k}");
            for w in &cert.witnesses {
                assert!(is_universal(w, k));
                assert_eq!(w.size(), u);
            }
        }
    }

    #[test]
    fn bitset_decks_match_engine() {
        let k = 6;
        let mut ws = Workspace::new(k);
        ws.extend_tables_to(10);
        let mut engine = SetEngine::new();
        for s in 1..=10 {
            for id in 0..ws.levels.count(s) {
                let t = ws.levels.shape(s, id);
                for j in 1..=s.min(k) {
                    let from_bits: Vec<TreeShape> = ones(ws.bits(s, id, j))
                        .map(|x| ws.levels.shape(j, x))
                        .collect();
                    let expected: Vec<TreeShape> =
                        engine.deck(&t, j).unwrap().iter().cloned().collect();
                    assert_eq!(from_bits, expected, "{t} j = {j}");
                }
            }
        }
    }

    #[test]
    fn catalog_trees_are_universal() {
        for e in catalog() {
            assert!(is_universal(&e.tree, e.k), "{e}");
        }
    }

    #[test]
    fn catalog_sizes() {
        let sizes: Vec<(String, usize)> = catalog()
            .into_iter()
            .map(|e| (e.label, e.tree.size()))
            .collect();
        for (label, size) in &sizes {
            let expected = match label.as_str() {
                "U4.1" | "U4.2" => 5,
                "U12" => 28,
                _ => continue,
            };
            assert_eq!(*size, expected, "{label}");
        }
    }

    #[test]
    fn spine_is_universal() {
        for k in 1..=6 {
            let t = spine_universal(k);
            assert_eq!(t.size() as u128, k as u128 * wedderburn(k));
            assert!(is_universal(&t, k));
        }
    }

    #[test]
    fn table_rows() {
        let rows = table1(1, no_cache).unwrap();
        assert_eq!(table1_records(&rows), "k\t1\nkalmar\t1\nu\t1\n");
    }

    #[test]
    fn k_above_size_is_flagged() {
        let c = universality(&TreeShape::caterpillar(3).unwrap(), 5);
        assert!(c.k_exceeds_size && !c.universal());
    }

    #[test]
    fn default_budget_for_twelve_reports_known_bound() {
        let cert = min_universal_size(12, &no_cache(12)).unwrap();
        assert!(!cert.exhaustive);
        assert_eq!(cert.u_value, 28);
        assert_eq!(cert.u_text(), "<=28");
        assert_eq!(cert.explored, 0);
    }

    #[test]
    fn cache_roundtrip_reuses_ranges() {
        let dir = std::env::temp_dir().join(format!("treedeck-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("u6.log");
        let _ = std::fs::remove_file(&path);
        let mut budget = no_cache(6);
        budget.cache = Some(path.clone());
        budget.chunk = 2;
        let first = min_universal_size(6, &budget).unwrap();
        let lines = std::fs::read_to_string(&path).unwrap();
        assert!(lines.starts_with("# treedeck"));
        let second = min_universal_size(6, &budget).unwrap();
        assert_eq!(first, second);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), lines);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn corrupt_cache_is_reported() {
        let dir = std::env::temp_dir().join(format!("treedeck-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.log");
        std::fs::write(&path, "# header\nR\t1\t2\n").unwrap();
        let mut budget = no_cache(4);
        budget.cache = Some(path);
        match min_universal_size(4, &budget) {
            Err(Error::CacheFormat { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn expired_deadline_is_not_exhaustive() {
        let mut budget = no_cache(8);
        budget.deadline = Some(Duration::ZERO);
        let cert = min_universal_size(8, &budget).unwrap();
        assert!(!cert.exhaustive);
        assert_eq!(cert.lower_bound, 8);
        assert!(is_universal(&cert.witnesses[0], 8));
    }
}
