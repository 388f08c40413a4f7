//! Series and binomial forms of the WRM vacuum potential on cliques.
//!
//! For a clique with `k` plus and `l` minus points the binomial form is
//! `B(k,l) = -Σ_{i≤k, j≤l} C(k,i) C(l,j) (-1)^{k-i+l-j} κ(i,j)`, with
//! `κ(i,j) = log(1 + a^i b^j)` including the `i = j = 0` term `log 2`.
//! Expanding the logarithm gives `B(k,l) = (-1)^{k+l} S`, where
//! `S = Σ_{j≥1} (-1)^j g_j / j` and `g_j = (1-a^j)^k (1-b^j)^l`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::TimeEvolvedWrm;
use crate::numeric::NeumaierSum;

/// A truncated series with a rigorous bound on the discarded tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

const MAX_TERMS: usize = 50_000_000;

fn check_ratio(x: f64, uses: bool) -> Result<()> {
    if uses && !(x.is_finite() && (0.0..1.0).contains(&x)) {
        return Err(Error::InvalidParameter(format!(
            "series needs ratios in [0, 1), got {x}"
        )));
    }
    Ok(())
}

/// Bound on `|Σ_{j>J} (-1)^j (g_j - 1)/j|` from `1 - g_j <= k a^j + l b^j`.
fn tail(k: usize, l: usize, a: f64, b: f64, terms: usize) -> f64 {
    let j = terms as f64 + 1.0;
    let mut t = 0.0;
    if k > 0 {
        t += k as f64 * a.powf(j) / (1.0 - a);
    }
    if l > 0 {
        t += l as f64 * b.powf(j) / (1.0 - b);
    }
    t / j
}

/// `S` truncated after `terms` terms, with its tail bound.
fn series_sum(k: usize, l: usize, a: f64, b: f64, terms: usize) -> SeriesValue {
    let mut acc = NeumaierSum::new();
    acc.add(-std::f64::consts::LN_2);
    let (mut aj, mut bj) = (1.0, 1.0);
    for j in 1..=terms {
        aj *= a;
        bj *= b;
        let mut e = 0.0;
        if k > 0 {
            e += k as f64 * (-aj).ln_1p();
        }
        if l > 0 {
            e += l as f64 * (-bj).ln_1p();
        }
        let g_minus_one = e.exp_m1();
        let term = g_minus_one / j as f64;
        acc.add(if j % 2 == 0 { term } else { -term });
    }
    SeriesValue {
        value: acc.value(),
        tail_bound: tail(k, l, a, b, terms),
        terms,
    }
}

fn terms_for(k: usize, l: usize, a: f64, b: f64, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    // grow geometrically, then bisect down to the smallest sufficient J
    let mut hi = 1usize;
    while tail(k, l, a, b, hi) > tol {
        hi *= 2;
        if hi > MAX_TERMS {
            return Err(Error::InvalidParameter(
                "series converges too slowly for the tolerance".into(),
            ));
        }
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if tail(k, l, a, b, mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `B(k,l)` by the series, summed until the tail bound is below `tol`.
pub fn wrm_phi_series(k: usize, l: usize, a: f64, b: f64, tol: f64) -> Result<SeriesValue> {
    check_ratio(a, k > 0)?;
    check_ratio(b, l > 0)?;
    let terms = terms_for(k, l, a, b, tol)?;
    let mut s = series_sum(k, l, a, b, terms);
    if (k + l) % 2 == 1 {
        s.value = -s.value;
    }
    Ok(s)
}

/// `B(k,l)` by the series truncated after `terms` terms.
pub fn wrm_phi_series_truncated(k: usize, l: usize, a: f64, b: f64, terms: usize) -> Result<SeriesValue> {
    check_ratio(a, k > 0)?;
    check_ratio(b, l > 0)?;
    if terms == 0 {
        return Err(Error::InvalidParameter("need at least one term".into()));
    }
    let mut s = series_sum(k, l, a, b, terms);
    if (k + l) % 2 == 1 {
        s.value = -s.value;
    }
    Ok(s)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
}

/// `B(k,l)` by the finite binomial sum. Loses accuracy like `2^{k+l} ε`.
pub fn wrm_phi_binomial(model: &TimeEvolvedWrm, k: usize, l: usize) -> f64 {
    let mut acc = NeumaierSum::new();
    for i in 0..=k {
        for j in 0..=l {
            let sign = if (k - i + l - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc.add(sign * binomial(k, i) * binomial(l, j) * model.kappa(i, j));
        }
    }
    -acc.value()
}

/// The vacuum potential of a clique with `k` plus and `l` minus points,
/// absorbed convention, from the binomial form.
///
/// The binomial form keeps the `log 2` of the empty set, which the vacuum
/// potential subtracts through `h(∅)`; hence the correction.
pub fn clique_potential_from_binomial(model: &TimeEvolvedWrm, k: usize, l: usize) -> f64 {
    let b = wrm_phi_binomial(model, k, l);
    let ln2 = std::f64::consts::LN_2;
    if (k + l).is_multiple_of(2) {
        b + ln2
    } else {
        b - ln2
    }
}

/// The decay function `φ(n) = (-1)^{n+1} Σ_{j≥1} (-1)^j (1-α^j)^n / j`,
/// summed until the tail bound is below `1e-12`.
pub fn decay_phi(n: usize, alpha: f64) -> Result<SeriesValue> {
    check_ratio(alpha, true)?;
    let terms = terms_for(n, 0, alpha, 0.0, 1e-12)?;
    Ok(decay_phi_truncated(n, alpha, terms))
}

/// `φ(n)` truncated after `terms` terms.
pub fn decay_phi_truncated(n: usize, alpha: f64, terms: usize) -> SeriesValue {
    let mut s = series_sum(n, 0, alpha, 0.0, terms);
    if n.is_multiple_of(2) {
        s.value = -s.value;
    }
    s
}
