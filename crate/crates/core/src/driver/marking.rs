//! Dörfler marking and empirical convergence orders.

use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest set of elements, taken greedily by decreasing `η_E²` (ties by
/// element id), whose squared indicators sum to at least `theta` times the
/// total. Returned in ascending id order.
pub fn doerfler_mark(element_eta: &[f64], theta: f64) -> Result<Vec<usize>> {
    if element_eta.is_empty() {
        return Err(Error::Config("no element indicators to mark".into()));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Config(format!("bulk parameter {theta} outside (0, 1]")));
    }
    let mut order: Vec<usize> = (0..element_eta.len()).collect();
    order.sort_by(|&a, &b| {
        element_eta[b]
            .powi(2)
            .total_cmp(&element_eta[a].powi(2))
            .then(a.cmp(&b))
    });
    // summed in the same order as the greedy loop so that θ = 1 stops exactly
    let total: f64 = order.iter().map(|&k| element_eta[k].powi(2)).sum();
    let mut marked = Vec::new();
    let mut acc = 0.0;
    for &k in &order {
        if acc >= theta * total {
            break;
        }
        acc += element_eta[k].powi(2);
        marked.push(k);
    }
    marked.sort_unstable();
    Ok(marked)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub r2: f64,
}

/// Least-squares slope of `log y` against `log x`. For errors against `h`
/// the slope is the convergence order; against dofs it is negative.
pub fn fit_order(x: &[f64], y: &[f64]) -> Result<OrderFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Config(format!(
            "need at least 3 levels to fit an order, got {}",
            x.len().min(y.len())
        )));
    }
    if x.iter().chain(y).any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::Config("order fit needs positive values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(OrderFit { slope, r2 })
}
