use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;

use super::oracle::OracleMachine;
use super::NeighborhoodError;
use crate::encodings::{
    height as enc_height, pair, rect_code, rect_decode, unpair, Interval, Nat, Rational, Rect,
};
use crate::model_core::Budget;

/// The rationals `p/q` with `|p| <= H` and `1 <= q <= H`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pool {
    height: u64,
    points: Vec<Rational>,
}

impl Pool {
    pub fn new(height: u64) -> Self {
        let h = height as i64;
        let mut points: Vec<Rational> = (1..=h)
            .flat_map(|q| (-h..=h).map(move |p| Rational::new(p.into(), q.into())))
            .collect();
        points.sort();
        points.dedup();
        Pool { height, points }
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn interval(&self, i: usize, j: usize) -> Interval {
        Interval::new(self.points[i].clone(), self.points[j].clone()).expect("i < j")
    }

    /// All `(i, j)` with `i < j`, lexicographically.
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }

    pub fn index_of(&self, x: &Rational) -> Option<usize> {
        self.points.binary_search(x).ok()
    }

    /// Largest index with `points[i] <= x`.
    pub fn floor_index(&self, x: &Rational) -> Option<usize> {
        match self.points.binary_search(x) {
            Ok(i) => Some(i),
            Err(0) => None,
            Err(i) => Some(i - 1),
        }
    }

    /// Smallest index with `points[j] >= x`.
    pub fn ceil_index(&self, x: &Rational) -> Option<usize> {
        let i = self.points.partition_point(|p| p < x);
        (i < self.len()).then_some(i)
    }
}

/// Points of height at most `h` inside `[lo, hi]`, sorted; `None` past `cap` points.
pub(crate) fn pool_points_in(
    h: u64,
    lo: &Rational,
    hi: &Rational,
    cap: u64,
) -> Option<Vec<Rational>> {
    let hb = BigInt::from(h);
    let mut out = Vec::new();
    for q in 1..=h {
        let qb = BigInt::from(q);
        let first = (lo * Rational::from_integer(qb.clone()))
            .ceil()
            .to_integer()
            .max(-&hb);
        let last = (hi * Rational::from_integer(qb.clone()))
            .floor()
            .to_integer()
            .min(hb.clone());
        let mut p = first;
        while p <= last {
            if p.gcd(&qb) == BigInt::from(1) {
                out.push(Rational::new(p.clone(), qb.clone()));
                if out.len() as u64 > cap {
                    return None;
                }
            }
            p += 1;
        }
    }
    out.sort();
    Some(out)
}

#[derive(Debug, Clone)]
pub struct GraphRangeRequest {
    pub machine: OracleMachine,
    /// Coefficient height bound `H` of the code pool.
    pub height: u64,
    /// Maximum chain length `L`.
    pub chain: u64,
    /// `max_states` caps the (cell, depth) nodes visited.
    pub budget: Budget,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphDiagnostics {
    pub nodes: u64,
    /// Nodes whose machine step exceeded the step cap.
    pub undefined: u64,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone)]
pub struct GraphRange {
    pub request: GraphRangeRequest,
    /// Codes `J(c_a, h(c_a))` produced by the machine.
    pub emitted: BTreeSet<Nat>,
    /// Bounded product codes containing some emitted rectangle.
    pub saturated: BTreeSet<Nat>,
    pub diagnostics: GraphDiagnostics,
}

impl GraphRange {
    pub fn inputs(&self) -> usize {
        self.request.machine.f.inputs()
    }

    pub fn outputs(&self) -> usize {
        self.request.machine.f.outputs()
    }

    pub fn contains(&self, code: &Nat) -> bool {
        self.emitted.contains(code) || self.saturated.contains(code)
    }

    pub fn codes(&self) -> BTreeSet<Nat> {
        self.emitted.union(&self.saturated).cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.emitted.len()
            + self
                .saturated
                .iter()
                .filter(|c| !self.emitted.contains(c))
                .count()
    }

    pub fn is_empty(&self) -> bool {
        self.emitted.is_empty() && self.saturated.is_empty()
    }

    pub fn decode(&self, code: &Nat) -> Result<(Rect, Rect), NeighborhoodError> {
        decode_graph_code(code, self.inputs(), self.outputs())
    }
}

/// Product code `J(enc(r1), enc(r2))` of an input and an output rectangle.
pub fn encode_graph_code(input: &Rect, output: &Rect) -> Nat {
    pair(&rect_code(input), &rect_code(output))
}

pub fn decode_graph_code(
    code: &Nat,
    inputs: usize,
    outputs: usize,
) -> Result<(Rect, Rect), NeighborhoodError> {
    let (a, b) = unpair(code);
    Ok((rect_decode(&a, inputs)?, rect_decode(&b, outputs)?))
}

/// The least code in exactly one of the two ranges, if any.
pub fn range_difference(a: &GraphRange, b: &GraphRange) -> Option<Nat> {
    let (ca, cb) = (a.codes(), b.codes());
    ca.symmetric_difference(&cb).next().cloned()
}

type Cell = Vec<(usize, usize)>;

fn cell_rect(pool: &Pool, cell: &[(usize, usize)]) -> Rect {
    Rect::new(cell.iter().map(|&(i, j)| pool.interval(i, j)).collect()).expect("nonempty cell")
}

/// Mixed-radix walk over the product of per-dimension choices.
fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Enumerate the graph range at bounds: every node `(c, a)` of a nested chain
/// of pool rectangles emits `J(c, h(c, a))`, and the result is closed upward
/// over bounded product codes.
///
/// The emitted code depends only on the chain element and its depth, so each
/// node is expanded once.
pub fn enumerate_graph_range(req: &GraphRangeRequest) -> Result<GraphRange, NeighborhoodError> {
    if req.height == 0 || req.chain == 0 {
        return Err(NeighborhoodError::ZeroBound);
    }
    let mach = &req.machine;
    let (c, d) = (mach.f.inputs(), mach.f.outputs());
    let pool = Pool::new(req.height);
    let ivs = pool.intervals();
    let n = pool.len();
    let mut index = vec![vec![usize::MAX; n]; n];
    for (k, &(i, j)) in ivs.iter().enumerate() {
        index[i][j] = k;
    }
    // sub-intervals of each pool interval, in lexicographic order
    let subs: Vec<Vec<usize>> = ivs
        .iter()
        .map(|&(i, j)| {
            ivs.iter()
                .enumerate()
                .filter(|(_, &(a, b))| i <= a && b <= j)
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let all: Vec<usize> = (0..ivs.len()).collect();
    let roots = product(&vec![all; c]);

    let mut diag = GraphDiagnostics::default();
    let mut emitted = BTreeSet::new();
    let mut seeds: Vec<Cell> = Vec::new();
    let mut visited: HashSet<(Vec<usize>, u64)> = HashSet::new();
    let undefined = mach.f.cost() > mach.max_steps;
    'outer: for root in roots {
        let mut stack = vec![(root, 0u64)];
        while let Some((cell, depth)) = stack.pop() {
            if visited.contains(&(cell.clone(), depth)) {
                continue;
            }
            if diag.nodes >= req.budget.max_states {
                diag.budget_exhausted = true;
                break 'outer;
            }
            visited.insert((cell.clone(), depth));
            diag.nodes += 1;
            let in_cell: Cell = cell.iter().map(|&k| ivs[k]).collect();
            let rect = cell_rect(&pool, &in_cell);
            if undefined {
                diag.undefined += 1;
            } else {
                let out = mach.output(&rect, depth)?;
                emitted.insert(encode_graph_code(&rect, &out));
                let tight: Option<Cell> = out
                    .dims()
                    .iter()
                    .map(|iv| Some((pool.floor_index(iv.lo())?, pool.ceil_index(iv.hi())?)))
                    .collect();
                if let Some(t) = tight {
                    seeds.push(in_cell.into_iter().chain(t).collect());
                }
            }
            if depth + 1 < req.chain {
                let children = product(&cell.iter().map(|&k| subs[k].clone()).collect::<Vec<_>>());
                for child in children.into_iter().rev() {
                    if !visited.contains(&(child.clone(), depth + 1)) {
                        stack.push((child, depth + 1));
                    }
                }
            }
        }
    }

    // upward closure by single-step widening in each dimension
    let mut marked: HashSet<Cell> = HashSet::new();
    let mut queue: VecDeque<Cell> = VecDeque::new();
    for s in seeds {
        if marked.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(cell) = queue.pop_front() {
        for k in 0..c + d {
            let (i, j) = cell[k];
            let mut grow = Vec::with_capacity(2);
            if i > 0 {
                grow.push((i - 1, j));
            }
            if j + 1 < n {
                grow.push((i, j + 1));
            }
            for g in grow {
                let mut next = cell.clone();
                next[k] = g;
                if marked.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    let saturated = marked
        .iter()
        .map(|cell| encode_graph_code(&cell_rect(&pool, &cell[..c]), &cell_rect(&pool, &cell[c..])))
        .collect();
    Ok(GraphRange {
        request: req.clone(),
        emitted,
        saturated,
        diagnostics: diag,
    })
}

/// Membership of `d_in x d_out` in the range at bounds `(height, chain)`,
/// decided without enumerating it.
///
/// A bounded product is in the saturation iff some elementary pool cell inside
/// `d_in` maps into `d_out` at the deepest level, since outputs shrink with the
/// input box and with depth. Returns `None` when more than `cap` cells would
/// have to be checked.
pub fn fast_member(
    mach: &OracleMachine,
    height: u64,
    chain: u64,
    d_in: &Rect,
    d_out: &Rect,
    cap: u64,
) -> Result<Option<bool>, NeighborhoodError> {
    if height == 0 || chain == 0 {
        return Err(NeighborhoodError::ZeroBound);
    }
    if d_in.dim() != mach.f.inputs() || d_out.dim() != mach.f.outputs() {
        return Err(NeighborhoodError::Dimension {
            expected: mach.f.inputs() + mach.f.outputs(),
            got: d_in.dim() + d_out.dim(),
        });
    }
    if mach.f.cost() > mach.max_steps {
        return Ok(Some(false));
    }
    let h = Nat::from(height);
    let in_pool = |r: &Rect| {
        r.dims()
            .iter()
            .all(|iv| enc_height(iv.lo()) <= h && enc_height(iv.hi()) <= h)
    };
    if !in_pool(d_in) {
        return Ok(Some(false));
    }
    for a in 0..chain {
        if &mach.output(d_in, a)? == d_out {
            return Ok(Some(true));
        }
    }
    if !in_pool(d_out) {
        return Ok(Some(false));
    }
    let mut per_dim = Vec::new();
    let mut total: u64 = 1;
    for iv in d_in.dims() {
        let Some(pts) = pool_points_in(height, iv.lo(), iv.hi(), cap) else {
            return Ok(None);
        };
        let cells: Vec<Interval> = pts
            .windows(2)
            .map(|w| Interval::new(w[0].clone(), w[1].clone()).expect("sorted distinct"))
            .collect();
        total = total.saturating_mul(cells.len() as u64);
        if total > cap {
            return Ok(None);
        }
        per_dim.push(cells);
    }
    for cell in product(&per_dim) {
        let e = Rect::new(cell).expect("nonempty");
        if mach.output(&e, chain - 1)?.is_subset_of(d_out) {
            return Ok(Some(true));
        }
    }
    Ok(Some(false))
}
