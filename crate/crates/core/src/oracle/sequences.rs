//! Exact, unscaled subtraction sequences in application order (first entry
//! acts first). Mode indices are 0-based; the docs use 1-based labels.

use super::{Cyclotomic, ExactStep};

fn blank(modes: usize) -> ExactStep {
    vec![Cyclotomic::zero(); modes]
}

fn int(v: i64) -> Cyclotomic {
    Cyclotomic::from_integer(v)
}

/// Two-boson maximal correlation on `2n` modes: for `j = 1..n-1`, apply
/// `(a_{2j-1}+a_{2j}-a_{2j+1}-a_{2j+2})` then `(a_{2j-1}+a_{2j}+a_{2j+1}+a_{2j+2})`.
pub fn bipartite(n: usize) -> Vec<ExactStep> {
    let modes = 2 * n;
    let mut steps = Vec::with_capacity(2 * (n - 1));
    for j in 0..n - 1 {
        let base = 2 * j;
        for sign in [-1, 1] {
            let mut s = blank(modes);
            s[base] = int(1);
            s[base + 1] = int(1);
            s[base + 2] = int(sign);
            s[base + 3] = int(sign);
            steps.push(s);
        }
    }
    steps
}

/// GHZ on `2n` modes. Step `k` (applied for `k = n, n-1, …, 1`) carries 1 on
/// every odd mode and `ζ_n^(j-k)` on even mode `2j`.
pub fn ghz(n: usize) -> Vec<ExactStep> {
    (1..=n)
        .rev()
        .map(|k| {
            let mut s = blank(2 * n);
            for j in 1..=n {
                s[2 * j - 2] = int(1);
                s[2 * j - 1] = Cyclotomic::root_of_unity(n, j as i64 - k as i64);
            }
            s
        })
        .collect()
}

/// First W stage on `4n` modes: for each qubit `k` (last first) apply the
/// alternating-sign operator on modes `2k-1, 2k, 2n+2k-1, 2n+2k`, then the
/// all-plus one.
pub fn w_stage1(n: usize) -> Vec<ExactStep> {
    let modes = 4 * n;
    let mut steps = Vec::with_capacity(2 * n);
    for k in (1..=n).rev() {
        let idx = [2 * k - 2, 2 * k - 1, 2 * n + 2 * k - 2, 2 * n + 2 * k - 1];
        for signs in [[1, -1, 1, -1], [1, 1, 1, 1]] {
            let mut s = blank(modes);
            for (&i, &v) in idx.iter().zip(&signs) {
                s[i] = int(v);
            }
            steps.push(s);
        }
    }
    steps
}

/// Second stage on `4n` modes: `n - m` subtractions of the sum over the even
/// copy modes, then `m` of the sum over the odd copy modes.
pub fn w_stage2(n: usize, m: usize) -> Vec<ExactStep> {
    let modes = 4 * n;
    let mut even = blank(modes);
    let mut odd = blank(modes);
    for i in n + 1..=2 * n {
        even[2 * i - 1] = int(1);
        odd[2 * i - 2] = int(1);
    }
    let mut steps = vec![even; n - m];
    steps.extend(std::iter::repeat_n(odd, m));
    steps
}

/// Both stages; `m = 1` is the W case.
pub fn dicke(n: usize, m: usize) -> Vec<ExactStep> {
    let mut steps = w_stage1(n);
    steps.extend(w_stage2(n, m));
    steps
}
