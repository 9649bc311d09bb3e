//! Exact local and parity-constrained bounds of the Bell expression.
//!
//! For fixed Alice responses `a` the expression is linear in Bob's answers,
//! `B = Σ_y b_y (S − 2a_y)` with `S = Σ_x a_x`, so the best `b` is read off
//! coordinate-wise. The outer search enumerates every `a` (all sign vectors
//! for the local bound, all polytope vertices for the constrained one), which
//! makes both maxima exact.
//!
//! Vectors are compared lexicographically with `−1 < 0 < +1`; the witness
//! returned is the smallest maximizer in that order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::Behavior;
use crate::observables::check_odd;

pub const MIN_N: usize = 3;
pub const MAX_N: usize = 13;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterministicStrategy {
    pub a: Vec<i8>,
    pub b: Vec<i8>,
}

/// Vertex of `{a : Σa = 0, |a_x| ≤ 1} × {±1}ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PncVertex {
    pub a: Vec<i8>,
    pub b: Vec<i8>,
}

impl DeterministicStrategy {
    pub fn behavior(&self) -> Result<Behavior> {
        Behavior::deterministic(&to_f64(&self.a), &self.b)
    }
}

impl PncVertex {
    /// Behavior with Alice's fuzzy expectations `a` and Bob's signs `b`.
    /// Bob's entries must be `±1`.
    pub fn behavior(&self) -> Result<Behavior> {
        if self.b.iter().any(|v| v.abs() != 1) {
            return Err(Error::InvalidParams("Bob responses must be ±1 for a behavior".into()));
        }
        Behavior::deterministic(&to_f64(&self.a), &self.b)
    }
}

fn to_f64(v: &[i8]) -> Vec<f64> {
    v.iter().map(|&x| f64::from(x)).collect()
}

/// `Σ_{x,y} α^{x,y} a_x b_y` in integer arithmetic.
pub fn strategy_value(a: &[i8], b: &[i8]) -> i64 {
    let s: i64 = a.iter().map(|&v| i64::from(v)).sum();
    b.iter()
        .zip(a)
        .map(|(&by, &ay)| i64::from(by) * (s - 2 * i64::from(ay)))
        .sum()
}

fn check_range(n: usize) -> Result<()> {
    check_odd(n)?;
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(Error::InputsOutOfRange {
            n,
            min: MIN_N,
            max: MAX_N,
        });
    }
    Ok(())
}

/// Lexicographically first best `b ∈ {±1}ⁿ` for fixed `a`.
fn best_bob(a: &[i8]) -> Vec<i8> {
    let s: i64 = a.iter().map(|&v| i64::from(v)).sum();
    a.iter()
        .map(|&ay| if s - 2 * i64::from(ay) > 0 { 1 } else { -1 })
        .collect()
}

/// Lexicographically first best `b` with `Σb = 0`, `|b_y| ≤ 1`, for fixed `a`.
fn best_bob_constrained(a: &[i8]) -> Vec<i8> {
    let n = a.len();
    let s: i64 = a.iter().map(|&v| i64::from(v)).sum();
    let c: Vec<i64> = a.iter().map(|&ay| s - 2 * i64::from(ay)).collect();
    // Sorting by coefficient (ties: later index first for +1, earlier index
    // first for −1) keeps the lexicographically smallest optimum.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (c[i], std::cmp::Reverse(i)));
    let half = n / 2;
    let mut b = vec![0i8; n];
    for &i in &order[..half] {
        b[i] = -1;
    }
    for &i in &order[n - half..] {
        b[i] = 1;
    }
    // Among equal coefficients, the lexicographic minimum puts −1 first, then 0,
    // then +1; re-sort values inside each tie group.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && c[order[end]] == c[order[start]] {
            end += 1;
        }
        let mut idx: Vec<usize> = order[start..end].to_vec();
        let mut vals: Vec<i8> = idx.iter().map(|&i| b[i]).collect();
        idx.sort_unstable();
        vals.sort_unstable();
        for (i, v) in idx.into_iter().zip(vals) {
            b[i] = v;
        }
        start = end;
    }
    b
}

/// Exact maximum over deterministic strategies with the lexicographically
/// first witness.
pub fn local_bound(n: usize) -> Result<(i64, DeterministicStrategy)> {
    check_range(n)?;
    let mut best: Option<(i64, DeterministicStrategy)> = None;
    // Bit i of `mask` set means a_i = +1; iterating masks with the first
    // coordinate as most significant bit walks sign vectors in lex order.
    for mask in 0u32..(1 << n) {
        let a: Vec<i8> = (0..n)
            .map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
            .collect();
        let b = best_bob(&a);
        let v = strategy_value(&a, &b);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, DeterministicStrategy { a, b }));
        }
    }
    Ok(best.expect("non-empty strategy space"))
}

/// Closed form `max_k k|2k−n−2| + (n−k)|2k−n+2|`, `k` counting `+1` entries of `a`.
pub fn local_bound_closed_form(n: usize) -> i64 {
    let n = n as i64;
    (0..=n)
        .map(|k| k * (2 * k - n - 2).abs() + (n - k) * (2 * k - n + 2).abs())
        .max()
        .unwrap_or(0)
}

/// Vertices of the constrained polytope in lexicographic order.
pub fn pnc_vertices(n: usize) -> Vec<Vec<i8>> {
    fn rec(n: usize, plus: usize, minus: usize, zero: usize, cur: &mut Vec<i8>, out: &mut Vec<Vec<i8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for (v, left) in [(-1i8, minus), (0, zero), (1, plus)] {
            if left > 0 {
                cur.push(v);
                match v {
                    -1 => rec(n, plus, minus - 1, zero, cur, out),
                    0 => rec(n, plus, minus, zero - 1, cur, out),
                    _ => rec(n, plus - 1, minus, zero, cur, out),
                }
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, n / 2, n / 2, n % 2, &mut Vec::with_capacity(n), &mut out);
    out
}

fn pnc_search(n: usize, bob: fn(&[i8]) -> Vec<i8>) -> Result<(i64, PncVertex)> {
    check_range(n)?;
    let mut best: Option<(i64, PncVertex)> = None;
    for a in pnc_vertices(n) {
        let b = bob(&a);
        let v = strategy_value(&a, &b);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, PncVertex { a, b }));
        }
    }
    Ok(best.expect("non-empty vertex set"))
}

/// Exact maximum with Alice's responses constrained to `Σa = 0`; Bob is free.
pub fn pnc_bound(n: usize) -> Result<(i64, PncVertex)> {
    pnc_search(n, best_bob)
}

/// Same maximum when Bob obeys the identical constraint.
pub fn pnc_bound_symmetric(n: usize) -> Result<(i64, PncVertex)> {
    pnc_search(n, best_bob_constrained)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub local: i64,
    pub pnc: i64,
    pub pnc_symmetric: i64,
    /// Quantum optimum over parity-obeying qubit strategies, `2n`.
    pub quantum: f64,
}

impl GapReport {
    pub fn pnc_violated(&self) -> bool {
        (self.pnc as f64) < self.quantum
    }

    /// `pnc < local < quantum`; only the case `n = 3` satisfies this.
    pub fn strict_ordering(&self) -> bool {
        self.pnc < self.local && (self.local as f64) < self.quantum
    }
}

pub fn quantum_gap_report(n: usize) -> Result<GapReport> {
    let (local, _) = local_bound(n)?;
    let (pnc, _) = pnc_bound(n)?;
    let (pnc_symmetric, _) = pnc_bound_symmetric(n)?;
    Ok(GapReport {
        n,
        local,
        pnc,
        pnc_symmetric,
        quantum: 2.0 * n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{bell_value, BellExpression};

    fn sign_vectors(n: usize) -> Vec<Vec<i8>> {
        (0u32..(1 << n))
            .map(|m| (0..n).map(|i| if m >> (n - 1 - i) & 1 == 1 { 1 } else { -1 }).collect())
            .collect()
    }

    // Direct double sum, no algebraic shortcut.
    fn naive_value(a: &[i8], b: &[i8]) -> i64 {
        let mut v = 0;
        for (x, &ax) in a.iter().enumerate() {
            for (y, &by) in b.iter().enumerate() {
                let alpha = if x == y { -1 } else { 1 };
                v += alpha * i64::from(ax) * i64::from(by);
            }
        }
        v
    }

    fn brute_local(n: usize) -> (i64, DeterministicStrategy) {
        let vs = sign_vectors(n);
        let mut best: Option<(i64, DeterministicStrategy)> = None;
        for a in &vs {
            for b in &vs {
                let v = naive_value(a, b);
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v, DeterministicStrategy { a: a.clone(), b: b.clone() }));
                }
            }
        }
        best.unwrap()
    }

    // All vectors in {−1,0,1}ⁿ with zero sum, paired with every b of the given kind.
    fn brute_pnc(n: usize, constrained_bob: bool) -> (i64, PncVertex) {
        let ternary: Vec<Vec<i8>> = (0..3u32.pow(n as u32))
            .map(|mut m| {
                let mut v = vec![0i8; n];
                for i in (0..n).rev() {
                    v[i] = (m % 3) as i8 - 1;
                    m /= 3;
                }
                v
            })
            .filter(|v| v.iter().map(|&x| i32::from(x)).sum::<i32>() == 0)
            .collect();
        let bobs = if constrained_bob { ternary.clone() } else { sign_vectors(n) };
        let mut best: Option<(i64, PncVertex)> = None;
        for a in &ternary {
            for b in &bobs {
                let v = naive_value(a, b);
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v, PncVertex { a: a.clone(), b: b.clone() }));
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn local_bound_values() {
        assert_eq!(local_bound(3).unwrap().0, 5);
        for n in [3, 5, 7] {
            let fast = local_bound(n).unwrap();
            assert_eq!(fast, brute_local(n), "n = {n}");
            assert_eq!(fast.0, local_bound_closed_form(n));
        }
        for n in (9..=13).step_by(2) {
            assert_eq!(local_bound(n).unwrap().0, local_bound_closed_form(n));
        }
        assert_eq!(local_bound(5).unwrap().0, 15);
    }

    #[test]
    fn pnc_bound_values() {
        for (n, want) in [(3, 4), (5, 8), (7, 12)] {
            let (v, w) = pnc_bound(n).unwrap();
            assert_eq!(v, want);
            assert_eq!(w.a.iter().map(|&x| i32::from(x)).sum::<i32>(), 0);
            assert_eq!(w.a.iter().filter(|&&x| x == 0).count(), 1);
        }
        for n in (9..=13).step_by(2) {
            assert_eq!(pnc_bound(n).unwrap().0, 2 * (n as i64 - 1));
        }
    }

    #[test]
    fn pnc_matches_extended_search() {
        for n in [3, 5, 7] {
            assert_eq!(pnc_bound(n).unwrap(), brute_pnc(n, false), "n = {n}");
            assert_eq!(pnc_bound_symmetric(n).unwrap(), brute_pnc(n, true), "n = {n}");
        }
    }

    #[test]
    fn pnc_matches_reduction() {
        // Under Σa = 0 the value is −2Σ a_y b_y, maximized by 2Σ|a_y| = 2(n−1).
        for n in [3, 5, 7] {
            let reduced = pnc_vertices(n)
                .iter()
                .map(|a| 2 * a.iter().map(|&x| i64::from(x.abs())).sum::<i64>())
                .max()
                .unwrap();
            assert_eq!(pnc_bound(n).unwrap().0, reduced);
        }
    }

    #[test]
    fn constraining_bob_does_not_raise_the_bound() {
        for n in (3..=13).step_by(2) {
            assert!(pnc_bound_symmetric(n).unwrap().0 <= pnc_bound(n).unwrap().0);
        }
    }

    #[test]
    fn witnesses_reproduce_bounds() {
        for n in [3, 5, 7] {
            let expr = BellExpression::new(n).unwrap();
            let (v, w) = local_bound(n).unwrap();
            assert_eq!(bell_value(&expr, &w.behavior().unwrap()).unwrap(), v as f64);
            let (v, w) = pnc_bound(n).unwrap();
            assert_eq!(bell_value(&expr, &w.behavior().unwrap()).unwrap(), v as f64);
        }
    }

    #[test]
    fn local_dominates_pnc() {
        for n in [3, 5, 7] {
            assert!(local_bound(n).unwrap().0 >= pnc_bound(n).unwrap().0);
        }
    }

    #[test]
    fn gap_reports() {
        let r = quantum_gap_report(3).unwrap();
        assert_eq!((r.local, r.pnc, r.quantum), (5, 4, 6.0));
        assert!(r.strict_ordering());
        let r5 = quantum_gap_report(5).unwrap();
        assert_eq!((r5.pnc, r5.quantum), (8, 10.0));
        assert!(r5.pnc_violated());
        assert!(!r5.strict_ordering());
        let r7 = quantum_gap_report(7).unwrap();
        assert_eq!((r7.local, r7.pnc, r7.quantum), (35, 12, 14.0));
        for n in (3..=13).step_by(2) {
            assert!(quantum_gap_report(n).unwrap().pnc_violated());
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(local_bound(4), Err(Error::InvalidInputCount(4))));
        assert!(matches!(local_bound(15), Err(Error::InputsOutOfRange { .. })));
        assert!(pnc_bound(1).is_err());
    }
}
