//! Dynamic argmax over a sum of weighted closed intervals.
//!
//! Interval `i` contributes `w_i` on `[s_i, b_i]`. Every left endpoint
//! `s_i` is a candidate point; the index reports the candidate with the
//! largest value, ties to the smallest insertion index. Values are exact
//! (`GainUnits`), so the answer never depends on insertion order.
//!
//! Implementation: a treap keyed by `(coordinate, kind, index)` holding
//! both left endpoints (candidates) and right endpoints. Candidate values
//! carry a lazy additive tag; left and right endpoint weights are kept as
//! subtree sums so that the value at a fresh point can be computed from
//! two prefix sums.

use crate::exact::GainUnits;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    // Left endpoints sort before right endpoints at equal coordinates, so
    // a closed interval `[x, x]` covers its own candidate.
    Left = 0,
    Right = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    coord: u64,
    kind: Kind,
    idx: u32,
}

/// Best candidate in a subtree: `(value, index)`.
type Best = Option<(GainUnits, u32)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((va, ia)), Some((vb, ib))) => {
            if va > vb || (va == vb && ia < ib) {
                a
            } else {
                b
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    key: Key,
    prio: u64,
    left: u32,
    right: u32,
    /// Own candidate value; `None` for right endpoints.
    value: Option<GainUnits>,
    left_weight: GainUnits,
    right_weight: GainUnits,
    sum_left: GainUnits,
    sum_right: GainUnits,
    best: Best,
    lazy: GainUnits,
}

/// Counts of elementary tree steps, for complexity checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub node_visits: u64,
}

#[derive(Debug, Clone)]
pub struct IntervalIndex {
    nodes: Vec<Node>,
    root: u32,
    next_index: u32,
    prio_state: u64,
    ops: OpCounter,
}

impl Default for IntervalIndex {
    fn default() -> Self {
        Self::new()
    }
}

/// Order-preserving map of a non-negative finite `f64` to `u64`.
fn coord_bits(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    (x + 0.0).to_bits()
}

impl IntervalIndex {
    pub fn new() -> Self {
        IntervalIndex {
            nodes: Vec::new(),
            root: NIL,
            next_index: 0,
            prio_state: 0x9E37_79B9_7F4A_7C15,
            ops: OpCounter::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.next_index as usize
    }

    pub fn is_empty(&self) -> bool {
        self.next_index == 0
    }

    pub fn ops(&self) -> OpCounter {
        self.ops
    }

    fn next_prio(&mut self) -> u64 {
        // splitmix64
        self.prio_state = self.prio_state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.prio_state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn apply(&mut self, n: u32, add: GainUnits) {
        if n == NIL || add == GainUnits::ZERO {
            return;
        }
        let node = &mut self.nodes[n as usize];
        if let Some(v) = node.value.as_mut() {
            *v += add;
        }
        if let Some((v, _)) = node.best.as_mut() {
            *v += add;
        }
        node.lazy += add;
    }

    fn push(&mut self, n: u32) {
        let (l, r, lazy) = {
            let node = &self.nodes[n as usize];
            (node.left, node.right, node.lazy)
        };
        if lazy != GainUnits::ZERO {
            self.apply(l, lazy);
            self.apply(r, lazy);
            self.nodes[n as usize].lazy = GainUnits::ZERO;
        }
    }

    fn pull(&mut self, n: u32) {
        let (l, r) = (self.nodes[n as usize].left, self.nodes[n as usize].right);
        let (mut sl, mut sr, mut best) = {
            let node = &self.nodes[n as usize];
            (node.left_weight, node.right_weight, node.value.map(|v| (v, node.key.idx)))
        };
        for c in [l, r] {
            if c != NIL {
                let child = &self.nodes[c as usize];
                sl += child.sum_left;
                sr += child.sum_right;
                best = better(best, child.best);
            }
        }
        let node = &mut self.nodes[n as usize];
        node.sum_left = sl;
        node.sum_right = sr;
        node.best = best;
    }

    /// Splits into keys `< key` and keys `>= key`.
    fn split(&mut self, n: u32, key: Key) -> (u32, u32) {
        if n == NIL {
            return (NIL, NIL);
        }
        self.ops.node_visits += 1;
        self.push(n);
        if self.nodes[n as usize].key < key {
            let (a, b) = self.split(self.nodes[n as usize].right, key);
            self.nodes[n as usize].right = a;
            self.pull(n);
            (n, b)
        } else {
            let (a, b) = self.split(self.nodes[n as usize].left, key);
            self.nodes[n as usize].left = b;
            self.pull(n);
            (a, n)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        self.ops.node_visits += 1;
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            self.push(a);
            let m = self.merge(self.nodes[a as usize].right, b);
            self.nodes[a as usize].right = m;
            self.pull(a);
            a
        } else {
            self.push(b);
            let m = self.merge(a, self.nodes[b as usize].left);
            self.nodes[b as usize].left = m;
            self.pull(b);
            b
        }
    }

    fn new_node(&mut self, key: Key, value: Option<GainUnits>, lw: GainUnits, rw: GainUnits) -> u32 {
        let prio = self.next_prio();
        self.nodes.push(Node {
            key,
            prio,
            left: NIL,
            right: NIL,
            value,
            left_weight: lw,
            right_weight: rw,
            sum_left: lw,
            sum_right: rw,
            best: value.map(|v| (v, key.idx)),
            lazy: GainUnits::ZERO,
        });
        (self.nodes.len() - 1) as u32
    }

    fn insert(&mut self, node: u32) {
        let key = self.nodes[node as usize].key;
        let (a, b) = self.split(self.root, key);
        let ab = self.merge(a, node);
        self.root = self.merge(ab, b);
    }

    fn sums(&self, n: u32) -> (GainUnits, GainUnits) {
        if n == NIL {
            (GainUnits::ZERO, GainUnits::ZERO)
        } else {
            (self.nodes[n as usize].sum_left, self.nodes[n as usize].sum_right)
        }
    }

    /// Adds interval `[lo, hi]` with weight `w` and registers `lo` as a
    /// candidate. Returns the candidate's index. `w <= 0` or `hi < lo`
    /// registers the candidate without adding weight.
    pub fn push_interval(&mut self, lo: f64, hi: f64, w: GainUnits) -> u32 {
        let idx = self.next_index;
        self.next_index += 1;
        let lo_bits = coord_bits(lo);
        let active = w > GainUnits::ZERO && hi >= lo;
        let w = if active { w } else { GainUnits::ZERO };

        // Value at lo before this interval: left endpoints <= lo minus
        // right endpoints < lo.
        let cand_key = Key { coord: lo_bits, kind: Kind::Left, idx };
        let (a, b) = self.split(self.root, cand_key);
        let (sl, _) = self.sums(a);
        let (a1, a2) = self.split(a, Key { coord: lo_bits, kind: Kind::Left, idx: 0 });
        let (_, sr_lt) = self.sums(a1);
        let (_, sr_eq) = self.sums(a2);
        debug_assert_eq!(sr_eq, GainUnits::ZERO);
        let a = self.merge(a1, a2);
        self.root = self.merge(a, b);
        let value = sl - sr_lt;

        let cand = self.new_node(cand_key, Some(value), w, GainUnits::ZERO);
        self.insert(cand);
        if !active {
            return idx;
        }
        let hi_bits = coord_bits(hi);
        let rnode = self.new_node(Key { coord: hi_bits, kind: Kind::Right, idx }, None, GainUnits::ZERO, w);
        self.insert(rnode);

        // Range add over keys in [(lo, Left, 0), (hi, Right, 0)).
        let (left, rest) = self.split(self.root, Key { coord: lo_bits, kind: Kind::Left, idx: 0 });
        let (mid, right) = self.split(rest, Key { coord: hi_bits, kind: Kind::Right, idx: 0 });
        self.apply(mid, w);
        let lm = self.merge(left, mid);
        self.root = self.merge(lm, right);
        idx
    }

    /// Best candidate `(index, value)`, ties to the smallest index.
    pub fn argmax(&self) -> Option<(u32, GainUnits)> {
        if self.root == NIL {
            return None;
        }
        self.nodes[self.root as usize].best.map(|(v, i)| (i, v))
    }
}

/// Quadratic reference implementation with the same contract.
#[derive(Debug, Clone, Default)]
pub struct NaiveIntervalIndex {
    intervals: Vec<(f64, f64, GainUnits)>,
    values: Vec<GainUnits>,
    ops: OpCounter,
}

impl NaiveIntervalIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ops(&self) -> OpCounter {
        self.ops
    }

    pub fn push_interval(&mut self, lo: f64, hi: f64, w: GainUnits) -> u32 {
        let active = w > GainUnits::ZERO && hi >= lo;
        let w = if active { w } else { GainUnits::ZERO };
        let own: GainUnits = self
            .intervals
            .iter()
            .filter(|&&(l, h, _)| l <= lo && lo <= h)
            .map(|&(_, _, wj)| wj)
            .sum();
        self.ops.node_visits += self.intervals.len() as u64;
        self.intervals.push((lo, hi, w));
        self.values.push(own);
        if active {
            for (k, v) in self.values.iter_mut().enumerate() {
                let x = self.intervals[k].0;
                if lo <= x && x <= hi {
                    *v += w;
                }
            }
            self.ops.node_visits += self.values.len() as u64;
        }
        (self.values.len() - 1) as u32
    }

    pub fn argmax(&self) -> Option<(u32, GainUnits)> {
        let mut best: Option<(u32, GainUnits)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((i as u32, v));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(x: f64) -> GainUnits {
        GainUnits::from_f64(x)
    }

    #[test]
    fn two_interval_example() {
        let mut t = IntervalIndex::new();
        t.push_interval(0.2, 0.8, g(0.6));
        t.push_interval(0.5, 0.6, g(0.1));
        let (i, v) = t.argmax().unwrap();
        assert_eq!(i, 1);
        assert_eq!(v, g(0.6) + g(0.1));
    }

    #[test]
    fn zero_gain_keeps_first_candidate() {
        let mut t = IntervalIndex::new();
        t.push_interval(0.3, 0.3, GainUnits::ZERO);
        assert_eq!(t.argmax(), Some((0, GainUnits::ZERO)));
    }

    #[test]
    fn degenerate_point_interval_covers_itself() {
        let mut t = IntervalIndex::new();
        t.push_interval(0.4, 0.4, g(0.25));
        assert_eq!(t.argmax(), Some((0, g(0.25))));
    }

    #[test]
    fn matches_naive_on_random_streams() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let mut t = IntervalIndex::new();
            let mut n = NaiveIntervalIndex::new();
            for _ in 0..500 {
                // coarse grid makes coordinate ties common
                let s = (rng.gen_range(0..20) as f64) / 19.0;
                let b = (rng.gen_range(0..20) as f64) / 19.0;
                let w = GainUnits::of_pair(s, b);
                t.push_interval(s, b, w);
                n.push_interval(s, b, w);
                assert_eq!(t.argmax(), n.argmax());
            }
        }
    }
}
