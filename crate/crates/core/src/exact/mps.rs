//! Fixed-format MPS export of the linearized integer program.
//!
//! Columns are named `C0000001, C0000002, …` and rows `R0000001, …` in the
//! order below; [`IlpModel::name_map`] lists the symbolic name of each.
//! The objective row is `OBJ` and minimizes `−Σσ`, so the optimum of
//! Θ is the negated objective value.
//!
//! Columns, each block in lexicographic index order:
//!
//! | block | index | kind | count |
//! |---|---|---|---|
//! | `lambda` | d,k,l | binary | D·K·L |
//! | `omega` | d,k,p | binary | D·K·P |
//! | `deliver` | d,k,p | binary | D·K·P |
//! | `tau` | d,k | binary | D·K |
//! | `mu` | d,k,m | [0,1] | D·K·M |
//! | `beta` | d,k | [0,E] | D·K |
//! | `sigma` | k,m,l | [0,1] | K·M·L |
//! | `served` | d,k,m,l | [0,1], μ·λ | D·K·M·L |
//! | `flow` | k,d,d′ (d≠d′) | ≥ 0 | K·D·(D−1) |
//! | `uplink` | k,d | ≥ 0 | K·D |
//!
//! Rows, in emission order:
//!
//! | block | index | count |
//! |---|---|---|
//! | `one_location` | d,k | D·K |
//! | `anchor` | d, start/end | 2·D |
//! | `step` | d,k≥1,l | D·(K−1)·L |
//! | `weight` | d,k | D·K |
//! | `manifest` | d,k≥1,p, up/down | 2·D·(K−1)·P |
//! | `energy` | d,k≥1,l′,l | D·(K−1)·L² |
//! | `deliver_carried`, `deliver_at` | d,k,p | 2·D·K·P |
//! | `delivered` | p | P |
//! | `equipment` | d,k,m,p | D·K·M·P |
//! | `served_*` (three McCormick rows) | d,k,m,l | 3·D·K·M·L |
//! | `demand_cap` | k,m,l | K·M·L |
//! | `satisfaction` | k,m,l | K·M·L |
//! | `radio` | d,k | D·K |
//! | `relay_balance` | k,d | K·D |
//! | `relay_link` | k,d,d′ (d≠d′),l | K·D·(D−1)·L |
//! | `relay_uplink` | k,d | K·D |
//!
//! A UAV with τ = 1 injects one unit of flow which must reach the network
//! through uplinks, passing only between UAVs whose current locations are
//! linked; this admits exactly the multi-hop relay closure.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub sense: RowSense,
    pub rhs: f64,
    pub terms: Vec<(usize, f64)>,
}

/// The linearized program.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IlpModel {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

/// Expected `(columns, rows)` for the given dimensions.
pub fn expected_counts(d: usize, k: usize, l: usize, p: usize, m: usize) -> (usize, usize) {
    let k1 = k.saturating_sub(1);
    let dd = d * d.saturating_sub(1);
    let cols = d * k * l + 2 * d * k * p + 2 * d * k + d * k * m + k * m * l + d * k * m * l + k * dd + k * d;
    let rows = d * k
        + 2 * d
        + d * k1 * l
        + d * k
        + 2 * d * k1 * p
        + d * k1 * l * l
        + 2 * d * k * p
        + p
        + d * k * m * p
        + 3 * d * k * m * l
        + 2 * k * m * l
        + d * k
        + k * d
        + k * dd * l
        + k * d;
    (cols, rows)
}

struct Index {
    d: usize,
    k: usize,
    l: usize,
    p: usize,
    m: usize,
}

impl Index {
    fn lambda(&self, d: usize, k: usize, l: usize) -> usize {
        (d * self.k + k) * self.l + l
    }
    fn omega(&self, d: usize, k: usize, p: usize) -> usize {
        self.d * self.k * self.l + (d * self.k + k) * self.p + p
    }
    fn deliver(&self, d: usize, k: usize, p: usize) -> usize {
        self.omega(0, 0, 0) + self.d * self.k * self.p + (d * self.k + k) * self.p + p
    }
    fn tau(&self, d: usize, k: usize) -> usize {
        self.deliver(0, 0, 0) + self.d * self.k * self.p + d * self.k + k
    }
    fn mu(&self, d: usize, k: usize, m: usize) -> usize {
        self.tau(0, 0) + self.d * self.k + (d * self.k + k) * self.m + m
    }
    fn beta(&self, d: usize, k: usize) -> usize {
        self.mu(0, 0, 0) + self.d * self.k * self.m + d * self.k + k
    }
    fn sigma(&self, k: usize, m: usize, l: usize) -> usize {
        self.beta(0, 0) + self.d * self.k + (k * self.m + m) * self.l + l
    }
    fn served(&self, d: usize, k: usize, m: usize, l: usize) -> usize {
        self.sigma(0, 0, 0) + self.k * self.m * self.l + ((d * self.k + k) * self.m + m) * self.l + l
    }
    fn flow(&self, k: usize, a: usize, b: usize) -> usize {
        let b_rank = if b > a { b - 1 } else { b };
        self.served(0, 0, 0, 0)
            + self.d * self.k * self.m * self.l
            + (k * self.d + a) * self.d.saturating_sub(1)
            + b_rank
    }
    fn uplink(&self, k: usize, d: usize) -> usize {
        self.flow(0, 0, 0) + self.k * self.d * self.d.saturating_sub(1) + k * self.d + d
    }
}

impl IlpModel {
    fn col(&mut self, label: String, lower: f64, upper: f64, integer: bool, objective: f64) {
        self.columns.push(Column { label, lower, upper, integer, objective });
    }

    fn row(&mut self, label: String, sense: RowSense, rhs: f64, terms: Vec<(usize, f64)>) {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        let mut terms = terms;
        terms.sort_by_key(|t| t.0);
        for (c, v) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        self.rows.push(Row { label, sense, rhs, terms: merged });
    }

    /// `C0000001 lambda[0,0,0]` lines followed by `R0000001 one_location[0,0]` lines.
    pub fn name_map(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.columns.iter().enumerate() {
            let _ = writeln!(out, "{} {}", col_name(i), c.label);
        }
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(out, "{} {}", row_name(i), r.label);
        }
        out
    }

    /// Fixed-format MPS text.
    pub fn to_mps(&self, name: &str) -> String {
        let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.columns.len()];
        for (ri, r) in self.rows.iter().enumerate() {
            for &(c, v) in &r.terms {
                per_col[c].push((ri, v));
            }
        }
        let mut out = String::new();
        let title: String = name.chars().filter(|c| !c.is_whitespace()).take(8).collect();
        let _ = writeln!(out, "NAME          {}", if title.is_empty() { "UAVSCHED" } else { &title });
        out.push_str("ROWS\n N  OBJ\n");
        for (i, r) in self.rows.iter().enumerate() {
            let t = match r.sense {
                RowSense::Le => "L",
                RowSense::Ge => "G",
                RowSense::Eq => "E",
            };
            let _ = writeln!(out, " {:<2} {}", t, row_name(i));
        }
        out.push_str("COLUMNS\n");
        let mut in_int = false;
        let mut marker = 0;
        for (ci, c) in self.columns.iter().enumerate() {
            if c.integer != in_int {
                let kind = if c.integer { "'INTORG'" } else { "'INTEND'" };
                let _ = writeln!(out, "    M{:07}  'MARKER'                 {}", marker, kind);
                marker += 1;
                in_int = c.integer;
            }
            let name = col_name(ci);
            if c.objective != 0.0 {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", name, "OBJ", num(c.objective));
            }
            for &(ri, v) in &per_col[ci] {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", name, row_name(ri), num(v));
            }
            if c.objective == 0.0 && per_col[ci].is_empty() {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", name, "OBJ", "0");
            }
        }
        if in_int {
            let _ = writeln!(out, "    M{:07}  'MARKER'                 'INTEND'", marker);
        }
        out.push_str("RHS\n");
        for (i, r) in self.rows.iter().enumerate() {
            if r.rhs != 0.0 {
                let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", row_name(i), num(r.rhs));
            }
        }
        out.push_str("BOUNDS\n");
        for (i, c) in self.columns.iter().enumerate() {
            let name = col_name(i);
            if c.integer && c.lower == 0.0 && c.upper == 1.0 {
                let _ = writeln!(out, " BV BND       {}", name);
                continue;
            }
            if c.lower != 0.0 {
                let _ = writeln!(out, " LO BND       {:<8}  {:>12}", name, num(c.lower));
            }
            if c.upper.is_finite() {
                let _ = writeln!(out, " UP BND       {:<8}  {:>12}", name, num(c.upper));
            }
        }
        out.push_str("ENDATA\n");
        out
    }

    /// Objective of a point, `Σ objective·x`.
    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.columns.iter().zip(x).map(|(c, v)| c.objective * v).sum()
    }

    /// Rows and bounds violated by a point beyond `tol`, as labels.
    pub fn violations(&self, x: &[f64], tol: f64) -> Vec<String> {
        let mut bad = Vec::new();
        for (c, &v) in self.columns.iter().zip(x) {
            if v < c.lower - tol || v > c.upper + tol || (c.integer && (v - libm::round(v)).abs() > tol) {
                bad.push(c.label.clone());
            }
        }
        for r in &self.rows {
            let lhs: f64 = r.terms.iter().map(|&(c, v)| v * x[c]).sum();
            let ok = match r.sense {
                RowSense::Le => lhs <= r.rhs + tol,
                RowSense::Ge => lhs >= r.rhs - tol,
                RowSense::Eq => (lhs - r.rhs).abs() <= tol,
            };
            if !ok {
                bad.push(r.label.clone());
            }
        }
        bad
    }
}

pub fn col_name(i: usize) -> String {
    format!("C{:07}", i + 1)
}

pub fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

/// Most accurate representation that fits the 12-character numeric field.
fn num(v: f64) -> String {
    let s = format!("{}", v);
    if s.len() <= 12 {
        return s;
    }
    let mut best: Option<(f64, String)> = None;
    let candidates = (0..=11)
        .map(|p| format!("{:.*}", p, v))
        .chain((0..=10).map(|p| format!("{:.*e}", p, v)));
    for c in candidates.filter(|c| c.len() <= 12) {
        let err = c.parse::<f64>().map_or(f64::INFINITY, |x| (x - v).abs());
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, c));
        }
    }
    best.map_or(s, |b| b.1)
}

/// Build the linearized program for `s`.
pub fn build_ilp(s: &Scenario) -> IlpModel {
    let (nd, nk, nl, np, nm) = (s.n_uavs(), s.epochs(), s.n_locations(), s.n_payloads(), s.n_missions());
    let ix = Index { d: nd, k: nk, l: nl, p: np, m: nm };
    let mut lp = IlpModel::default();
    let depots = s.depots();

    for d in 0..nd {
        for k in 0..nk {
            for l in 0..nl {
                lp.col(format!("lambda[{d},{k},{l}]"), 0.0, 1.0, true, 0.0);
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            for p in 0..np {
                lp.col(format!("omega[{d},{k},{p}]"), 0.0, 1.0, true, 0.0);
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            for p in 0..np {
                let open = s.payloads[p].delivery.is_some_and(|w| w.contains(k));
                lp.col(format!("deliver[{d},{k},{p}]"), 0.0, if open { 1.0 } else { 0.0 }, true, 0.0);
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            lp.col(format!("tau[{d},{k}]"), 0.0, 1.0, true, 0.0);
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            for m in 0..nm {
                lp.col(format!("mu[{d},{k},{m}]"), 0.0, 1.0, false, 0.0);
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            lp.col(format!("beta[{d},{k}]"), 0.0, s.uavs[d].battery_capacity, false, 0.0);
        }
    }
    for k in 0..nk {
        for m in 0..nm {
            for l in 0..nl {
                let live = s.n(k, m, l) > 0.0;
                lp.col(
                    format!("sigma[{k},{m},{l}]"),
                    0.0,
                    if live { 1.0 } else { 0.0 },
                    false,
                    if live { -1.0 } else { 0.0 },
                );
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            for m in 0..nm {
                for l in 0..nl {
                    lp.col(format!("served[{d},{k},{m},{l}]"), 0.0, 1.0, false, 0.0);
                }
            }
        }
    }
    for k in 0..nk {
        for a in 0..nd {
            for b in (0..nd).filter(|&b| b != a) {
                lp.col(format!("flow[{k},{a},{b}]"), 0.0, f64::INFINITY, false, 0.0);
            }
        }
    }
    for k in 0..nk {
        for d in 0..nd {
            lp.col(format!("uplink[{k},{d}]"), 0.0, f64::INFINITY, false, 0.0);
        }
    }

    use RowSense::*;
    let at_depot = |d: usize, k: usize, coef: f64| -> Vec<(usize, f64)> {
        depots.iter().map(|&l| (ix.lambda(d, k, l), coef)).collect()
    };

    for d in 0..nd {
        for k in 0..nk {
            let t = (0..nl).map(|l| (ix.lambda(d, k, l), 1.0)).collect();
            lp.row(format!("one_location[{d},{k}]"), Eq, 1.0, t);
        }
    }
    for d in 0..nd {
        lp.row(format!("anchor[{d},start]"), Eq, 1.0, at_depot(d, 0, 1.0));
        lp.row(format!("anchor[{d},end]"), Eq, 1.0, at_depot(d, nk - 1, 1.0));
    }
    for d in 0..nd {
        let step = s.uavs[d].max_step_distance;
        for k in 1..nk {
            for l in 0..nl {
                let mut t = vec![(ix.lambda(d, k, l), 1.0)];
                for lp_ in (0..nl).filter(|&a| crate::fmath::le(s.v(a, l), step)) {
                    t.push((ix.lambda(d, k - 1, lp_), -1.0));
                }
                lp.row(format!("step[{d},{k},{l}]"), Le, 0.0, t);
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            let t = (0..np).map(|p| (ix.omega(d, k, p), s.payloads[p].weight)).collect();
            lp.row(format!("weight[{d},{k}]"), Le, s.uavs[d].payload_capacity, t);
        }
    }
    for d in 0..nd {
        for k in 1..nk {
            for p in 0..np {
                let mut up = vec![(ix.omega(d, k, p), 1.0), (ix.omega(d, k - 1, p), -1.0)];
                up.extend(at_depot(d, k, -1.0));
                lp.row(format!("manifest[{d},{k},{p},up]"), Le, 0.0, up);
                let mut down = vec![(ix.omega(d, k - 1, p), 1.0), (ix.omega(d, k, p), -1.0)];
                down.extend(at_depot(d, k, -1.0));
                lp.row(format!("manifest[{d},{k},{p},down]"), Le, 0.0, down);
            }
        }
    }
    let ev = s.physics.vertical_delivery_energy;
    let total_weight: f64 = s.payloads.iter().map(|p| p.weight).sum();
    let e_max = (0..nl)
        .flat_map(|a| (0..nl).map(move |b| (a, b)))
        .map(|(a, b)| s.e(a, b))
        .fold(0.0, f64::max);
    for d in 0..nd {
        let u = &s.uavs[d];
        let big = 2.0 * (u.battery_capacity + e_max * (u.empty_weight + total_weight) + ev * np as f64) + 1.0;
        for k in 1..nk {
            for from in 0..nl {
                for to in 0..nl {
                    let e = s.e(from, to);
                    let mut t = vec![(ix.beta(d, k), 1.0), (ix.beta(d, k - 1), -1.0)];
                    for p in 0..np {
                        t.push((ix.omega(d, k, p), e * s.payloads[p].weight));
                        if s.payloads[p].is_deliverable() {
                            t.push((ix.deliver(d, k, p), ev));
                        }
                    }
                    t.push((ix.lambda(d, k - 1, from), big));
                    t.push((ix.lambda(d, k, to), big));
                    t.extend(at_depot(d, k, -big));
                    lp.row(format!("energy[{d},{k},{from},{to}]"), Le, 2.0 * big - e * u.empty_weight, t);
                }
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            for p in 0..np {
                lp.row(
                    format!("deliver_carried[{d},{k},{p}]"),
                    Le,
                    0.0,
                    vec![(ix.deliver(d, k, p), 1.0), (ix.omega(d, k, p), -1.0)],
                );
                let mut t = vec![(ix.deliver(d, k, p), 1.0)];
                if let Some(w) = s.payloads[p].delivery {
                    t.push((ix.lambda(d, k, w.target), -1.0));
                }
                lp.row(format!("deliver_at[{d},{k},{p}]"), Le, 0.0, t);
            }
        }
    }
    for p in 0..np {
        let t = (0..nd)
            .flat_map(|d| (0..nk).map(move |k| (d, k)))
            .map(|(d, k)| (ix.deliver(d, k, p), 1.0))
            .collect();
        let need = if s.payloads[p].is_deliverable() { 1.0 } else { 0.0 };
        lp.row(format!("delivered[{p}]"), Ge, need, t);
    }
    for d in 0..nd {
        for k in 0..nk {
            for m in 0..nm {
                for p in 0..np {
                    let required = s.payloads[p].equipment_for.contains(&m);
                    lp.row(
                        format!("equipment[{d},{k},{m},{p}]"),
                        Le,
                        if required { 0.0 } else { 1.0 },
                        vec![(ix.mu(d, k, m), 1.0), (ix.omega(d, k, p), -1.0)],
                    );
                }
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            for m in 0..nm {
                for l in 0..nl {
                    let z = ix.served(d, k, m, l);
                    lp.row(
                        format!("served_le_lambda[{d},{k},{m},{l}]"),
                        Le,
                        0.0,
                        vec![(z, 1.0), (ix.lambda(d, k, l), -1.0)],
                    );
                    lp.row(
                        format!("served_le_mu[{d},{k},{m},{l}]"),
                        Le,
                        0.0,
                        vec![(z, 1.0), (ix.mu(d, k, m), -1.0)],
                    );
                    lp.row(
                        format!("served_ge[{d},{k},{m},{l}]"),
                        Ge,
                        -1.0,
                        vec![(z, 1.0), (ix.mu(d, k, m), -1.0), (ix.lambda(d, k, l), -1.0)],
                    );
                }
            }
        }
    }
    for k in 0..nk {
        for m in 0..nm {
            for l in 0..nl {
                let t = (0..nd).map(|d| (ix.served(d, k, m, l), s.q(l, m))).collect();
                lp.row(format!("demand_cap[{k},{m},{l}]"), Le, s.n(k, m, l), t);
            }
        }
    }
    for k in 0..nk {
        for m in 0..nm {
            for l in 0..nl {
                let mut t = vec![(ix.sigma(k, m, l), s.n(k, m, l))];
                t.extend((0..nd).map(|d| (ix.served(d, k, m, l), -s.q(l, m))));
                lp.row(format!("satisfaction[{k},{m},{l}]"), Le, 0.0, t);
            }
        }
    }
    for d in 0..nd {
        for k in 0..nk {
            let mut t: Vec<(usize, f64)> = (0..nm).map(|m| (ix.mu(d, k, m), s.s(m))).collect();
            t.push((ix.tau(d, k), -s.uavs[d].radio_capacity));
            lp.row(format!("radio[{d},{k}]"), Le, 0.0, t);
        }
    }
    for k in 0..nk {
        for d in 0..nd {
            let mut t = vec![(ix.uplink(k, d), 1.0), (ix.tau(d, k), -1.0)];
            for o in (0..nd).filter(|&o| o != d) {
                t.push((ix.flow(k, d, o), 1.0));
                t.push((ix.flow(k, o, d), -1.0));
            }
            lp.row(format!("relay_balance[{k},{d}]"), Eq, 0.0, t);
        }
    }
    let cap = nd as f64;
    for k in 0..nk {
        for a in 0..nd {
            for b in (0..nd).filter(|&b| b != a) {
                for l in 0..nl {
                    let mut t = vec![(ix.flow(k, a, b), 1.0), (ix.lambda(a, k, l), cap)];
                    for l2 in (0..nl).filter(|&l2| s.t(l, l2)) {
                        t.push((ix.lambda(b, k, l2), -cap));
                    }
                    lp.row(format!("relay_link[{k},{a},{b},{l}]"), Le, cap, t);
                }
            }
        }
    }
    for k in 0..nk {
        for d in 0..nd {
            let mut t = vec![(ix.uplink(k, d), 1.0)];
            for l in (0..nl).filter(|&l| s.t_network(l)) {
                t.push((ix.lambda(d, k, l), -cap));
            }
            lp.row(format!("relay_uplink[{k},{d}]"), Le, 0.0, t);
        }
    }
    lp
}

/// MPS text for `s`.
pub fn export_mps(s: &Scenario) -> String {
    build_ilp(s).to_mps(&s.name)
}

/// Column values encoding `plan`, including a relay flow routed along
/// shortest link paths.
pub fn point_from_plan(s: &Scenario, plan: &crate::MissionPlan) -> Vec<f64> {
    let (nd, nk, nl, np, nm) = (s.n_uavs(), s.epochs(), s.n_locations(), s.n_payloads(), s.n_missions());
    let ix = Index { d: nd, k: nk, l: nl, p: np, m: nm };
    let (ncols, _) = expected_counts(nd, nk, nl, np, nm);
    let mut x = vec![0.0; ncols];
    for (d, t) in plan.tracks.iter().enumerate() {
        for k in 0..nk {
            x[ix.lambda(d, k, t.location[k])] = 1.0;
            for &p in &t.carried[k] {
                x[ix.omega(d, k, p)] = 1.0;
            }
            x[ix.tau(d, k)] = if t.relay[k] { 1.0 } else { 0.0 };
            for m in 0..nm {
                x[ix.mu(d, k, m)] = t.effort[k][m];
                for l in 0..nl {
                    x[ix.served(d, k, m, l)] = if t.location[k] == l { t.effort[k][m] } else { 0.0 };
                }
            }
            x[ix.beta(d, k)] = t.battery[k];
        }
    }
    for e in &plan.deliveries {
        x[ix.deliver(e.uav, e.epoch, e.payload)] = 1.0;
    }
    for k in 0..nk {
        for m in 0..nm {
            for l in 0..nl {
                x[ix.sigma(k, m, l)] = crate::satisfaction(s, plan, k, m, l).unwrap_or(0.0);
            }
        }
    }
    for k in 0..nk {
        let locs: Vec<usize> = plan.tracks.iter().map(|t| t.location[k]).collect();
        // BFS from uplinked UAVs over the link graph gives each UAV a parent.
        let mut parent: Vec<Option<usize>> = vec![None; nd];
        let mut root = vec![false; nd];
        let mut queue = alloc::collections::VecDeque::new();
        for d in 0..nd {
            if s.t_network(locs[d]) {
                root[d] = true;
                queue.push_back(d);
            }
        }
        let mut seen = root.clone();
        while let Some(a) = queue.pop_front() {
            for b in 0..nd {
                if !seen[b] && s.t(locs[b], locs[a]) {
                    seen[b] = true;
                    parent[b] = Some(a);
                    queue.push_back(b);
                }
            }
        }
        for d in 0..nd {
            if !plan.tracks[d].relay[k] || !seen[d] {
                continue;
            }
            let mut cur = d;
            while let Some(p) = parent[cur] {
                x[ix.flow(k, cur, p)] += 1.0;
                cur = p;
            }
            x[ix.uplink(k, cur)] += 1.0;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_exact, SolverLimits};
    use crate::testkit::{line, line3};
    use crate::UavSpec;

    #[test]
    fn counts_match_formulas() {
        for (nl, nk, nd, nm) in [(3, 6, 1, 1), (4, 5, 3, 2), (2, 1, 2, 0)] {
            let mut s = line(nl, nk, nd, &vec![1.0; nm]);
            if nm > 0 {
                s.payloads.push(crate::Payload { id: 0, weight: 1.0, delivery: None, equipment_for: vec![0] });
            }
            let lp = build_ilp(&s);
            let want = expected_counts(nd, nk, nl, s.n_payloads(), nm);
            assert_eq!((lp.columns.len(), lp.rows.len()), want);
        }
        let lp = build_ilp(&line3());
        assert_eq!((lp.columns.len(), lp.rows.len()), expected_counts(1, 6, 3, 2, 1));
    }

    #[test]
    fn exact_plan_is_a_feasible_point_with_matching_objective() {
        let mut s = line3();
        s.uavs.push(UavSpec { id: 1, ..s.uavs[0].clone() });
        s.demand[3][0][2] = 1.0;
        let sol = solve_exact(&s, SolverLimits::default()).unwrap();
        let lp = build_ilp(&s);
        let x = point_from_plan(&s, &sol.plan);
        assert_eq!(lp.violations(&x, 1e-9), Vec::<String>::new());
        assert!((-lp.objective_at(&x) - sol.theta).abs() < 1e-12);
    }

    #[test]
    fn invalid_relay_claim_is_infeasible() {
        let s = line3();
        let sol = solve_exact(&s, SolverLimits::default()).unwrap();
        let mut plan = sol.plan.clone();
        let k = plan.tracks[0].location.iter().position(|&l| l == 2).unwrap();
        plan.tracks[0].relay[k] = true;
        let lp = build_ilp(&s);
        let bad = lp.violations(&point_from_plan(&s, &plan), 1e-9);
        assert!(bad.iter().any(|r| r.starts_with("relay_balance")), "{bad:?}");
    }

    #[test]
    fn fixed_format_fields() {
        let text = export_mps(&line3());
        assert!(text.starts_with("NAME          line\nROWS\n N  OBJ\n"));
        assert!(text.ends_with("ENDATA\n"));
        for line in text.lines().skip_while(|l| *l != "COLUMNS").skip(1).take_while(|l| *l != "RHS") {
            if line.contains("MARKER") {
                continue;
            }
            assert_eq!(&line[4..5], "C");
            assert!(matches!(&line[14..15], "R" | "O"), "{line}");
            assert!(line.len() <= 36, "{line}");
        }
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1.0 / 3.0), "0.3333333333");
        assert!(num(1e300).len() <= 12);
    }
}
