//! Online network resource allocation.
//!
//! `J` mapping nodes forward requests to `K` data centers; each data center also has a
//! virtual outgoing edge carrying its scheduled workload. The decision stacks the edge
//! flows `z^{jk}` (mapping node index fastest) followed by the workloads `y^k`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use petgraph::algo::ford_fulkerson;
use petgraph::graph::DiGraph;
use rand::Rng;

use super::{substream, uniform_vector, ProblemInstance, ProblemParams, Structure};
use crate::error::{OcoError, Result};
use crate::oracle::{ProblemConstants, RoundOracle};
use crate::sets::FeasibleSet;

const CAPACITY_STREAM: u64 = 1;
const PRICE_STREAM: u64 = 2;
const REQUEST_STREAM: u64 = 3;

/// Largest request any round can produce: `50 + 101`.
const WORST_REQUEST: f64 = 151.0;
/// Capacity draws are repeated until the worst-case requests can be served with this margin.
const MIN_SLATER_MARGIN: f64 = 1.0;
const MAX_CAPACITY_DRAWS: usize = 10_000;
/// Fixed-point scale of the integer max-flow used for the Slater point.
const FLOW_SCALE: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct NraData {
    pub mapping_nodes: usize,
    pub data_centers: usize,
    /// Node-edge incidence matrix, `(J + K) x (JK + K)`.
    pub incidence: DMatrix<f64>,
    /// Upper bounds of the box: bandwidth limits then data-center capacities.
    pub upper: DVector<f64>,
    /// Bandwidth costs `40 / zbar`.
    pub bandwidth_cost: DVector<f64>,
    /// Energy prices per round, length `K` each.
    pub prices: Vec<DVector<f64>>,
    /// Constraint offsets per round: requests for mapping rows, zero for data-center rows.
    pub offsets: Vec<DVector<f64>>,
}

impl NraData {
    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn num_edges(&self) -> usize {
        self.mapping_nodes * self.data_centers
    }

    /// Componentwise maximum of the constraint offsets over all rounds.
    pub fn max_offsets(&self) -> DVector<f64> {
        let mut out = self.offsets[0].clone();
        for b in &self.offsets[1..] {
            out.zip_apply(b, |o, v| *o = o.max(v));
        }
        out
    }

    /// Per-coordinate weights `w` with `f_t(x) = sum_e w_e x_e^2` at round `t`.
    pub fn loss_weights(&self, t: usize) -> DVector<f64> {
        let e = self.num_edges();
        DVector::from_fn(self.dim(), |i, _| {
            if i < e {
                self.bandwidth_cost[i]
            } else {
                self.prices[t][i - e]
            }
        })
    }
}

/// Incidence matrix: `+1` where edge `e` enters node `i`, `-1` where it leaves, else `0`.
/// Rows are mapping nodes then data centers; columns are `(j, k)` edges with `j` fastest,
/// then the virtual edges `(k, *)`.
pub fn incidence_matrix(mapping_nodes: usize, data_centers: usize) -> DMatrix<f64> {
    let (j_count, k_count) = (mapping_nodes, data_centers);
    let e = j_count * k_count;
    let mut a = DMatrix::zeros(j_count + k_count, e + k_count);
    for k in 0..k_count {
        for j in 0..j_count {
            let edge = k * j_count + j;
            a[(j, edge)] = -1.0;
            a[(j_count + k, edge)] = 1.0;
        }
        a[(j_count + k, e + k)] = -1.0;
    }
    a
}

#[derive(Debug, Clone)]
pub struct NraRound {
    pub data: Arc<NraData>,
    pub t: usize,
}

impl RoundOracle for NraRound {
    fn round(&self) -> usize {
        self.t
    }
    fn dim(&self) -> usize {
        self.data.dim()
    }
    fn num_constraints(&self) -> usize {
        self.data.incidence.nrows()
    }
    fn loss(&self, x: &DVector<f64>) -> f64 {
        let w = self.data.loss_weights(self.t);
        x.iter().zip(w.iter()).map(|(v, w)| w * v * v).sum()
    }
    fn loss_subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.data.loss_weights(self.t).component_mul(x) * 2.0
    }
    fn constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.data.incidence * x + &self.data.offsets[self.t]
    }
    fn constraint_subgradient(&self, _x: &DVector<f64>, i: usize) -> DVector<f64> {
        self.data.incidence.row(i).transpose()
    }
    fn constraint_jacobian_mul(&self, _x: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        self.data.incidence.tr_mul(w)
    }
    fn constraints_affine(&self) -> bool {
        true
    }
    fn strong_convexity(&self) -> f64 {
        2.0 * self.data.loss_weights(self.t).min().max(0.0)
    }
    fn loss_curvature(&self) -> Option<f64> {
        Some(2.0 * self.data.loss_weights(self.t).max())
    }
}

/// Maximum flow with source supplies, edge capacities and sink capacities, on a fixed-point grid.
/// Returns the edge flows when every supply can be shipped.
fn ship_all(supply: &[f64], edge_cap: &DMatrix<f64>, sink_cap: &[f64]) -> Option<DMatrix<f64>> {
    let (j_count, k_count) = edge_cap.shape();
    let to_units = |v: f64| (v.max(0.0) * FLOW_SCALE).floor() as u64;
    let mut graph = DiGraph::<(), u64>::new();
    let source = graph.add_node(());
    let sink = graph.add_node(());
    let sources: Vec<_> = (0..j_count).map(|_| graph.add_node(())).collect();
    let centers: Vec<_> = (0..k_count).map(|_| graph.add_node(())).collect();
    let mut demand = 0u64;
    for (j, &node) in sources.iter().enumerate() {
        let units = (supply[j] * FLOW_SCALE).ceil() as u64;
        demand += units;
        graph.add_edge(source, node, units);
    }
    let mut flow_edges = Vec::with_capacity(j_count * k_count);
    for (j, &from) in sources.iter().enumerate() {
        for (k, &to) in centers.iter().enumerate() {
            flow_edges.push((j, k, graph.add_edge(from, to, to_units(edge_cap[(j, k)]))));
        }
    }
    for (k, &node) in centers.iter().enumerate() {
        graph.add_edge(node, sink, to_units(sink_cap[k]));
    }
    let (total, flows) = ford_fulkerson(&graph, source, sink);
    if total < demand {
        return None;
    }
    let mut out = DMatrix::zeros(j_count, k_count);
    for (j, k, e) in flow_edges {
        out[(j, k)] = flows[e.index()] as f64 / FLOW_SCALE;
    }
    Some(out)
}

/// Largest margin `eps` (up to bisection resolution) for which requests `demand + eps` can be
/// routed within bandwidth limits while every data center keeps `eps` spare capacity.
fn max_slater_margin(demand: &[f64], zbar: &DMatrix<f64>, ybar: &[f64]) -> Option<(f64, DMatrix<f64>)> {
    let feasible = |eps: f64| {
        let supply: Vec<f64> = demand.iter().map(|d| d + eps).collect();
        let sink: Vec<f64> = ybar.iter().map(|y| y - eps).collect();
        if sink.iter().any(|&s| s < 0.0) {
            return None;
        }
        ship_all(&supply, zbar, &sink)
    };
    let mut best = (0.0, feasible(0.0)?);
    let mut hi = ybar.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut lo = 0.0;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        match feasible(mid) {
            Some(flows) => {
                lo = mid;
                best = (mid, flows);
            }
            None => hi = mid,
        }
    }
    Some(best)
}

/// Generates the allocation problem on `J` mapping nodes and `K` data centers.
///
/// Bandwidth limits `~ U[10, 100]`, capacities `~ U[100, 200]`, costs `40 / zbar`, prices
/// `sin(pi t / 12) + U[1, 3]`, requests `50 sin(pi t / 12) + U[99, 101]`. Capacity draws are
/// rejected until the worst possible request can be served with a positive margin, so every
/// instance satisfies Slater's condition.
pub fn generate_nra(mapping_nodes: usize, data_centers: usize, horizon: usize, seed: u64) -> Result<ProblemInstance> {
    if mapping_nodes == 0 || data_centers == 0 || horizon == 0 {
        return Err(OcoError::InvalidArgument("nra needs J, K, T >= 1".into()));
    }
    let (j_count, k_count) = (mapping_nodes, data_centers);
    let e = j_count * k_count;
    let n = e + k_count;

    let mut cap_rng = substream(seed, CAPACITY_STREAM);
    let worst = vec![WORST_REQUEST; j_count];
    let mut draw = None;
    for _ in 0..MAX_CAPACITY_DRAWS {
        let zbar = uniform_vector(&mut cap_rng, e, 10.0, 100.0);
        let ybar = uniform_vector(&mut cap_rng, k_count, 100.0, 200.0);
        let zmat = DMatrix::from_fn(j_count, k_count, |j, k| zbar[k * j_count + j]);
        if let Some((eps, _)) = max_slater_margin(&worst, &zmat, ybar.as_slice()) {
            if eps >= MIN_SLATER_MARGIN {
                draw = Some((zbar, ybar, zmat));
                break;
            }
        }
    }
    let (zbar, ybar, zmat) = draw.ok_or_else(|| {
        OcoError::Infeasible(format!(
            "no capacity draw serves the worst-case requests for J={j_count}, K={k_count}"
        ))
    })?;

    let mut upper = DVector::zeros(n);
    upper.rows_mut(0, e).copy_from(&zbar);
    upper.rows_mut(e, k_count).copy_from(&ybar);
    let bandwidth_cost = zbar.map(|z| 40.0 / z);

    let mut price_rng = substream(seed, PRICE_STREAM);
    let mut request_rng = substream(seed, REQUEST_STREAM);
    let mut prices = Vec::with_capacity(horizon);
    let mut offsets = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let wave = (PI * t as f64 / 12.0).sin();
        prices.push(DVector::from_fn(k_count, |_, _| wave + price_rng.random_range(1.0..3.0)));
        let mut b = DVector::zeros(j_count + k_count);
        for j in 0..j_count {
            b[j] = 50.0 * wave + request_rng.random_range(99.0..101.0);
        }
        offsets.push(b);
    }

    let data = Arc::new(NraData {
        mapping_nodes: j_count,
        data_centers: k_count,
        incidence: incidence_matrix(j_count, k_count),
        upper,
        bandwidth_cost,
        prices,
        offsets,
    });

    // Slater point from the actual worst requests
    let bmax = data.max_offsets();
    let demand: Vec<f64> = (0..j_count).map(|j| bmax[j]).collect();
    let (_, flows) = max_slater_margin(&demand, &zmat, ybar.as_slice())
        .ok_or_else(|| OcoError::Infeasible("generated requests cannot be served".into()))?;
    let mut slater = DVector::zeros(n);
    for k in 0..k_count {
        for j in 0..j_count {
            slater[k * j_count + j] = flows[(j, k)].min(zmat[(j, k)]);
        }
        slater[e + k] = ybar[k];
    }
    let worst_value = (&data.incidence * &slater + &bmax).max();
    let eps0 = -worst_value;
    if !(eps0 > 0.0) {
        return Err(OcoError::Infeasible(format!("no strictly feasible point (margin {eps0})")));
    }

    let constants = nra_constants(&data, slater, eps0);
    let set = FeasibleSet::new_box(DVector::zeros(n), data.upper.clone())?;
    let rounds = (0..horizon)
        .map(|t| Arc::new(NraRound { data: data.clone(), t }) as _)
        .collect();
    Ok(ProblemInstance {
        params: ProblemParams::Nra { mapping_nodes, data_centers },
        seed,
        set,
        rounds,
        constants,
        structure: Structure::Nra(data),
    })
}

fn nra_constants(data: &NraData, slater_point: DVector<f64>, eps0: f64) -> ProblemConstants {
    let upper = &data.upper;
    let mut kappa_f: f64 = 0.0;
    for t in 0..data.prices.len() {
        let g = data.loss_weights(t).component_mul(upper) * 2.0;
        kappa_f = kappa_f.max(g.norm());
    }
    let a = &data.incidence;
    let kappa_g = (0..a.nrows()).map(|i| a.row(i).norm()).fold(0.0, f64::max);
    // interval bounds of A_i y over the box, then the worst offset in either direction
    let mut nu_sq = 0.0;
    let bmax = data.max_offsets();
    let bmin = data
        .offsets
        .iter()
        .skip(1)
        .fold(data.offsets[0].clone(), |acc, b| acc.zip_map(b, f64::min));
    for i in 0..a.nrows() {
        let (mut lo, mut hi) = (0.0, 0.0);
        for (c, &u) in a.row(i).iter().zip(upper.iter()) {
            lo += (c * u).min(0.0);
            hi += (c * u).max(0.0);
        }
        let bound = (hi + bmax[i]).abs().max((lo + bmin[i]).abs());
        nu_sq += bound * bound;
    }
    // affine constraints: the tangent model coincides with the plain one
    let nu = nu_sq.sqrt();
    ProblemConstants {
        diameter: upper.norm(),
        kappa_f,
        kappa_g,
        nu_g_plain: nu,
        nu_g_linearized: nu,
        eps0,
        slater_point,
    }
}
