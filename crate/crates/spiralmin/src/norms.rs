//! Discrete weighted Hölder norms.
//!
//! The solution space carries the norm `‖f‖_{X,k} = sup_s ‖f‖_{k,α}(s) / |s|^k`
//! built from the local Hölder function `‖f‖_{k,α}(s)` measured on unit
//! windows `B_1(s) ∩ Ω`. Two discrete proxies live here:
//!
//! - [`weighted_norm`]: derivative magnitudes at each node plus the window
//!   Hölder quotient of the top derivative, weighted by `max(|s|, 1)^k`
//!   (the `|s|^{-k}` weight is singular at the origin while the window there
//!   still has unit size; `max(|s|, 1)` is equivalent up to constants for
//!   functions vanishing to second order, and computable).
//! - [`local_holder_norms`]: the per-node local Hölder function with full
//!   window sups of all derivatives, used by the empirical lemma probes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::grid::GridFunction;

#[derive(PartialEq)]
struct HeapEntry {
    value: f64,
    end: usize,
}

impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value)
    }
}

/// Window radius in nodes for unit balls `B_1(s)`.
fn window_radius(h: f64, n: usize) -> usize {
    ((1.0 / h).floor() as usize).min(n - 1)
}

/// Per-node maximum of `|v_j − v_i| / (|s_j − s_i|)^α` over node pairs lying
/// inside the unit window around each node.
///
/// Every pair `(i, j)` is valid for centers `m` with `|m−i| ≤ r` and
/// `|m−j| ≤ r`; the per-center maxima are assembled by an interval-stabbing
/// sweep with a lazily pruned max-heap.
fn window_pair_max(values: &[f64], h: f64, alpha: f64, radius: usize) -> Vec<f64> {
    let n = values.len();
    let mut buckets: Vec<Vec<HeapEntry>> = (0..n).map(|_| Vec::new()).collect();
    let mut dist_pow = vec![0.0; 2 * radius + 1];
    for (k, slot) in dist_pow.iter_mut().enumerate().skip(1) {
        *slot = (k as f64 * h).powf(alpha);
    }
    for i in 0..n {
        let jmax = (i + 2 * radius).min(n - 1);
        for j in i + 1..=jmax {
            let q = (values[j] - values[i]).abs() / dist_pow[j - i];
            let start = j.saturating_sub(radius);
            let end = (i + radius).min(n - 1);
            if start <= end {
                buckets[start].push(HeapEntry { value: q, end });
            }
        }
    }
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut out = vec![0.0; n];
    for (m, bucket) in buckets.into_iter().enumerate() {
        for entry in bucket {
            heap.push(entry);
        }
        while let Some(top) = heap.peek() {
            if top.end < m {
                heap.pop();
            } else {
                break;
            }
        }
        out[m] = heap.peek().map_or(0.0, |e| e.value);
    }
    out
}

/// Sliding-window maxima of `|values|` with the given node radius.
fn window_sup_abs(values: &[f64], radius: usize) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    // monotone deque of indices with decreasing |value|
    let mut deque: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut right = 0usize;
    for m in 0..n {
        let hi = (m + radius).min(n - 1);
        while right <= hi {
            let v = values[right].abs();
            while let Some(&back) = deque.back() {
                if values[back].abs() <= v {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(right);
            right += 1;
        }
        let lo = m.saturating_sub(radius);
        while let Some(&front) = deque.front() {
            if front < lo {
                deque.pop_front();
            } else {
                break;
            }
        }
        out[m] = values[*deque.front().unwrap()].abs();
    }
    out
}

fn derivative_tables(f: &GridFunction, k: usize) -> Vec<Vec<f64>> {
    let mut tables = vec![f.values().to_vec()];
    if k >= 1 {
        tables.push(f.d1());
    }
    if k >= 2 {
        tables.push(f.d2());
    }
    tables
}

/// The weighted norm proxy
/// `sup_i [ Σ_{j≤k} |f^{(j)}(s_i)| + Höl_α(f^{(k)}; B_1(s_i) ∩ Ω) ] / max(|s_i|, 1)^k`.
///
/// `k` must be 0 or 2. Homogeneous: `weighted_norm(c·f) = |c| weighted_norm(f)`.
pub fn weighted_norm(f: &GridFunction, k: usize, alpha: f64) -> f64 {
    assert!(k == 0 || k == 2, "k must be 0 or 2");
    let n = f.n();
    let h = f.h();
    let r = window_radius(h, n);
    let tables = derivative_tables(f, k);
    let hol = window_pair_max(&tables[k], h, alpha, r);
    let mut sup = 0.0f64;
    for i in 0..n {
        let mut local = hol[i];
        for t in &tables {
            local += t[i].abs();
        }
        let weight = f.s(i).abs().max(1.0).powi(k as i32);
        sup = sup.max(local / weight);
    }
    sup
}

/// The per-node local Hölder function
/// `‖f‖_{k,α}(s_i) = Σ_{j≤k} sup_{B_1(s_i)} |f^{(j)}| + Höl_α(f^{(k)}; B_1(s_i) ∩ Ω)`.
pub fn local_holder_norms(f: &GridFunction, k: usize, alpha: f64) -> Vec<f64> {
    assert!(k <= 2, "k must be at most 2");
    let n = f.n();
    let h = f.h();
    let r = window_radius(h, n);
    let tables = derivative_tables(f, k);
    let hol = window_pair_max(&tables[k], h, alpha, r);
    let mut out = hol;
    for t in &tables {
        let sups = window_sup_abs(t, r);
        for i in 0..n {
            out[i] += sups[i];
        }
    }
    out
}
