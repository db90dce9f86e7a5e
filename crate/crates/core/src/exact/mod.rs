//! Exact optimum for tiny instances, and MPS export of the full program.
//!
//! Every UAV gets a list of *options*: a depot-anchored trajectory together
//! with one payload manifest per sortie (a maximal run of off-depot epochs)
//! and equipment for the depot epochs in between. Options that are dominated
//! (same trajectory, no more equipment anywhere and no more deliveries) are
//! dropped. The joint search picks one option per UAV so that every parcel
//! is delivered, and scores a combination by solving each epoch's effort
//! allocation exactly with relay flags from the closure.

pub mod alloc;
pub mod mps;

use ::alloc::vec;
use ::alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use self::alloc::allocate_epoch;
use crate::fmath::le;
use crate::{
    energy_profile, relay_closure_at, DeliveryEvent, Epoch, LocationId, MissionPlan, PayloadId,
    Scenario, ScenarioError, UavId, UavTrack,
};

/// Hard caps on instance size and search effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    pub max_locations: usize,
    pub max_uavs: usize,
    pub max_epochs: usize,
    pub max_deliveries: usize,
    /// Search nodes before giving up.
    pub node_budget: u64,
}

impl Default for SolverLimits {
    fn default() -> Self {
        Self {
            max_locations: 8,
            max_uavs: 3,
            max_epochs: 8,
            max_deliveries: 3,
            node_budget: 200_000_000,
        }
    }
}

/// Search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Bounding, coverage pruning and symmetry breaking over identical UAVs.
    #[default]
    BranchAndBound,
    /// Plain enumeration of every option combination.
    Exhaustive,
}

/// Evidence that no plan delivers every parcel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    /// Parcels no single UAV can deliver on any trajectory.
    pub undeliverable: Vec<PayloadId>,
    /// Option combinations examined before concluding.
    pub combinations: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExactError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("instance exceeds solver limits: {what} = {value} > {limit}")]
    Limits {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("no plan delivers every parcel (undeliverable by any single UAV: {:?})", .0.undeliverable)]
    Infeasible(InfeasibilityCertificate),
    #[error("node budget of {0} exhausted")]
    NodeBudget(u64),
    #[error("search interrupted")]
    Interrupted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub plan: MissionPlan,
    pub theta: f64,
    /// Search nodes visited.
    pub nodes: u64,
    /// Options per UAV after dominance filtering.
    pub options: Vec<usize>,
}

/// Best objective seen by any branch (non-negative, stored as f64 bits).
#[derive(Debug, Default)]
pub struct Incumbent(AtomicU64);

impl Incumbent {
    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    pub fn offer(&self, v: f64) {
        // Non-negative floats order like their bit patterns.
        self.0.fetch_max(v.max(0.0).to_bits(), Ordering::Relaxed);
    }
}

/// One UAV's schedule candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Opt {
    traj: usize,
    /// ω per epoch as a payload bitmask.
    carried: Vec<u64>,
    /// Missions with equipment on board, per epoch.
    equipped: Vec<u64>,
    /// Payloads delivered somewhere on this schedule.
    delivered: u64,
    /// Delivery epoch per delivered payload.
    events: Vec<(PayloadId, Epoch)>,
}

/// Prepared search space for one scenario.
pub struct Problem<'a> {
    s: &'a Scenario,
    mode: SearchMode,
    limits: SolverLimits,
    trajs: Vec<Vec<Vec<LocationId>>>,
    options: Vec<Vec<Opt>>,
    all_parcels: u64,
    /// Union of deliveries over options of UAVs `d..`.
    suffix_cover: Vec<u64>,
    /// Σ over UAVs `d..` of the best lone-UAV value per epoch.
    suffix_single: Vec<Vec<f64>>,
    /// Fleet-wide ceiling per epoch.
    ceiling: Vec<f64>,
    /// UAV `d` shares the airframe of UAV `d − 1`.
    same_as_prev: Vec<bool>,
}

/// Outcome of one root branch: best value and option indices.
pub type BranchResult = Option<(f64, Vec<usize>)>;

impl<'a> Problem<'a> {
    pub fn prepare(s: &'a Scenario, limits: SolverLimits, mode: SearchMode) -> Result<Self, ExactError> {
        s.check()?;
        let check = |what, value: usize, limit: usize| {
            if value > limit {
                Err(ExactError::Limits { what, value, limit })
            } else {
                Ok(())
            }
        };
        check("locations", s.n_locations(), limits.max_locations)?;
        check("UAVs", s.n_uavs(), limits.max_uavs)?;
        check("epochs", s.epochs(), limits.max_epochs)?;
        check("deliveries", s.deliverables().count(), limits.max_deliveries)?;
        check("payloads", s.n_payloads(), 64)?;
        check("missions", s.n_missions(), 64)?;
        for (p, d) in s.deliverables() {
            if s.is_depot(d.target) {
                return Err(ScenarioError::DeliveryAtDepot { payload: p }.into());
            }
        }
        let all_parcels = s.deliverables().fold(0u64, |acc, (p, _)| acc | 1 << p);
        let nd = s.n_uavs();
        let nk = s.epochs();

        let mut trajs: Vec<Vec<Vec<LocationId>>> = Vec::with_capacity(nd);
        let mut options: Vec<Vec<Opt>> = Vec::with_capacity(nd);
        for d in 0..nd {
            let reuse = (0..d).find(|&o| s.uavs[o].same_airframe(&s.uavs[d]));
            match reuse {
                Some(o) => {
                    trajs.push(trajs[o].clone());
                    options.push(options[o].clone());
                }
                None => {
                    let t = trajectories(s, d);
                    let o = uav_options(s, d, &t);
                    trajs.push(t);
                    options.push(o);
                }
            }
        }

        let mut suffix_cover = vec![0u64; nd + 1];
        for d in (0..nd).rev() {
            let u = options[d].iter().fold(0u64, |acc, o| acc | o.delivered);
            suffix_cover[d] = suffix_cover[d + 1] | u;
        }

        let mut single_best: Vec<Vec<f64>> = vec![vec![0.0; nk]; nd];
        for d in 0..nd {
            for o in &options[d] {
                for k in 0..nk {
                    let l = trajs[d][o.traj][k];
                    let v = single_value(s, d, k, l, o.equipped[k]);
                    if v > single_best[d][k] {
                        single_best[d][k] = v;
                    }
                }
            }
        }
        let mut suffix_single = vec![vec![0.0; nk]; nd + 1];
        for d in (0..nd).rev() {
            for k in 0..nk {
                suffix_single[d][k] = suffix_single[d + 1][k] + single_best[d][k];
            }
        }
        let ceiling = crate::bounds::epoch_ceilings(s);
        let same_as_prev = (0..nd)
            .map(|d| d > 0 && s.uavs[d].same_airframe(&s.uavs[d - 1]))
            .collect();
        Ok(Self {
            s,
            mode,
            limits,
            trajs,
            options,
            all_parcels,
            suffix_cover,
            suffix_single,
            ceiling,
            same_as_prev,
        })
    }

    pub fn option_counts(&self) -> Vec<usize> {
        self.options.iter().map(Vec::len).collect()
    }

    /// Number of root branches (options of the first UAV).
    pub fn root_branches(&self) -> usize {
        self.options.first().map_or(1, Vec::len)
    }

    /// Search one root branch. `nodes` is the node counter shared across
    /// branches; `stop` is polled periodically.
    pub fn solve_branch(
        &self,
        branch: usize,
        incumbent: &Incumbent,
        nodes: &AtomicU64,
        stop: &(dyn Fn() -> bool + Sync),
    ) -> Result<BranchResult, ExactError> {
        let mut st = Search {
            p: self,
            incumbent,
            nodes,
            stop,
            chosen: Vec::with_capacity(self.s.n_uavs()),
            best: None,
        };
        if self.s.n_uavs() == 0 {
            st.leaf()?;
        } else {
            st.chosen.push(branch);
            if st.admissible()? {
                st.dfs(1)?;
            }
        }
        Ok(st.best)
    }

    /// Combine branch results (lowest branch wins ties) into a solution.
    pub fn finish(&self, results: &[BranchResult], nodes: u64) -> Result<ExactSolution, ExactError> {
        let mut best: Option<&(f64, Vec<usize>)> = None;
        for r in results.iter().flatten() {
            if best.is_none_or(|b| r.0 > b.0) {
                best = Some(r);
            }
        }
        let Some((_, chosen)) = best else {
            let mut undeliverable = Vec::new();
            for (p, _) in self.s.deliverables() {
                if self.suffix_cover[0] & (1 << p) == 0 {
                    undeliverable.push(p);
                }
            }
            return Err(ExactError::Infeasible(InfeasibilityCertificate {
                undeliverable,
                combinations: nodes,
            }));
        };
        let plan = self.build_plan(chosen);
        let theta = crate::objective(self.s, &plan);
        Ok(ExactSolution {
            plan,
            theta,
            nodes,
            options: self.option_counts(),
        })
    }

    /// Objective of a full combination.
    fn value(&self, chosen: &[usize]) -> f64 {
        let s = self.s;
        let mut total = 0.0;
        let mut locs = vec![0; chosen.len()];
        for k in 0..s.epochs() {
            for (d, &o) in chosen.iter().enumerate() {
                locs[d] = self.trajs[d][self.options[d][o].traj][k];
            }
            let tau = relay_closure_at(s, &locs);
            total += self.epoch_value(chosen, k, &locs, &tau).0;
        }
        total
    }

    fn epoch_value(
        &self,
        chosen: &[usize],
        k: Epoch,
        locs: &[LocationId],
        tau: &[bool],
    ) -> (f64, Vec<Vec<f64>>) {
        let s = self.s;
        let caps: Vec<f64> = (0..chosen.len())
            .map(|d| if tau[d] { s.uavs[d].radio_capacity } else { 0.0 })
            .collect();
        let eq: Vec<Vec<bool>> = chosen
            .iter()
            .enumerate()
            .map(|(d, &o)| mask_to_bools(self.options[d][o].equipped[k], s.n_missions()))
            .collect();
        allocate_epoch(s, k, locs, &caps, &eq)
    }

    /// Upper bound on any completion of the prefix `chosen`.
    pub fn prefix_bound(&self, chosen: &[usize]) -> f64 {
        let s = self.s;
        let i = chosen.len();
        let mut total = 0.0;
        let mut locs = vec![0; i];
        let tau = vec![true; i];
        for k in 0..s.epochs() {
            for (d, &o) in chosen.iter().enumerate() {
                locs[d] = self.trajs[d][self.options[d][o].traj][k];
            }
            let prefix = if i == 0 { 0.0 } else { self.epoch_value(chosen, k, &locs, &tau).0 };
            total += self.ceiling[k].min(prefix + self.suffix_single[i][k]);
        }
        total
    }

    fn build_plan(&self, chosen: &[usize]) -> MissionPlan {
        let s = self.s;
        let nk = s.epochs();
        let nm = s.n_missions();
        let mut plan = MissionPlan {
            tracks: Vec::with_capacity(chosen.len()),
            deliveries: Vec::new(),
        };
        let mut done = 0u64;
        for (d, &o) in chosen.iter().enumerate() {
            let opt = &self.options[d][o];
            let mut t = UavTrack::parked(0, nk, nm, s.uavs[d].battery_capacity);
            t.location = self.trajs[d][opt.traj].clone();
            t.carried = opt.carried.iter().map(|&m| mask_ids(m)).collect();
            plan.tracks.push(t);
            for &(p, k) in &opt.events {
                if done & (1 << p) == 0 {
                    done |= 1 << p;
                    plan.deliveries.push(DeliveryEvent { uav: d, payload: p, epoch: k });
                }
            }
        }
        let mut locs = vec![0; chosen.len()];
        for k in 0..nk {
            for d in 0..chosen.len() {
                locs[d] = plan.tracks[d].location[k];
            }
            let tau = relay_closure_at(s, &locs);
            let (_, mu) = self.epoch_value(chosen, k, &locs, &tau);
            for d in 0..chosen.len() {
                plan.tracks[d].relay[k] = tau[d];
                plan.tracks[d].effort[k] = mu[d].clone();
            }
        }
        for d in 0..chosen.len() {
            plan.tracks[d].battery = energy_profile(s, &plan, d).battery;
        }
        plan.normalize();
        plan
    }
}

struct Search<'p, 'a> {
    p: &'p Problem<'a>,
    incumbent: &'p Incumbent,
    nodes: &'p AtomicU64,
    stop: &'p (dyn Fn() -> bool + Sync),
    chosen: Vec<usize>,
    best: BranchResult,
}

impl Search<'_, '_> {
    fn tick(&self) -> Result<(), ExactError> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.p.limits.node_budget {
            return Err(ExactError::NodeBudget(self.p.limits.node_budget));
        }
        if n.is_multiple_of(4096) && (self.stop)() {
            return Err(ExactError::Interrupted);
        }
        Ok(())
    }

    /// Whether the current prefix may still beat the incumbent.
    fn admissible(&self) -> Result<bool, ExactError> {
        self.tick()?;
        if self.p.mode == SearchMode::Exhaustive {
            return Ok(true);
        }
        let i = self.chosen.len();
        let covered = self
            .chosen
            .iter()
            .enumerate()
            .fold(0u64, |acc, (d, &o)| acc | self.p.options[d][o].delivered);
        if (covered | self.p.suffix_cover[i]) & self.p.all_parcels != self.p.all_parcels {
            return Ok(false);
        }
        Ok(self.p.prefix_bound(&self.chosen) + 1e-9 >= self.incumbent.get())
    }

    fn leaf(&mut self) -> Result<(), ExactError> {
        let covered = self
            .chosen
            .iter()
            .enumerate()
            .fold(0u64, |acc, (d, &o)| acc | self.p.options[d][o].delivered);
        if covered & self.p.all_parcels != self.p.all_parcels {
            return Ok(());
        }
        let v = self.p.value(&self.chosen);
        if self.best.as_ref().is_none_or(|b| v > b.0) {
            self.best = Some((v, self.chosen.clone()));
            self.incumbent.offer(v);
        }
        Ok(())
    }

    fn dfs(&mut self, i: usize) -> Result<(), ExactError> {
        if i == self.p.s.n_uavs() {
            return self.leaf();
        }
        let start = if self.p.mode == SearchMode::BranchAndBound && self.p.same_as_prev[i] {
            self.chosen[i - 1]
        } else {
            0
        };
        for o in start..self.p.options[i].len() {
            self.chosen.push(o);
            if self.admissible()? {
                self.dfs(i + 1)?;
            }
            self.chosen.pop();
        }
        Ok(())
    }
}

/// Solve sequentially with branch and bound.
pub fn solve_exact(s: &Scenario, limits: SolverLimits) -> Result<ExactSolution, ExactError> {
    solve_exact_with(s, limits, SearchMode::BranchAndBound, &|| false)
}

/// Solve sequentially with the given mode and interruption hook.
pub fn solve_exact_with(
    s: &Scenario,
    limits: SolverLimits,
    mode: SearchMode,
    stop: &(dyn Fn() -> bool + Sync),
) -> Result<ExactSolution, ExactError> {
    let p = Problem::prepare(s, limits, mode)?;
    let inc = Incumbent::default();
    let nodes = AtomicU64::new(0);
    let mut results = Vec::with_capacity(p.root_branches());
    for b in 0..p.root_branches() {
        results.push(p.solve_branch(b, &inc, &nodes, stop)?);
    }
    p.finish(&results, nodes.load(Ordering::Relaxed))
}

fn mask_to_bools(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask & (1 << i) != 0).collect()
}

fn mask_ids(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

/// Missions enabled by a carried payload mask.
fn missions_enabled(s: &Scenario, carried: u64) -> u64 {
    let ids = mask_ids(carried);
    (0..s.n_missions())
        .filter(|&m| s.equipped_for(m, &ids))
        .fold(0u64, |acc, m| acc | 1 << m)
}

/// Value a lone, connected UAV could collect at `(k, l)`.
fn single_value(s: &Scenario, d: UavId, k: Epoch, l: LocationId, equipped: u64) -> f64 {
    let eq = vec![mask_to_bools(equipped, s.n_missions())];
    allocate_epoch(s, k, &[l], &[s.uavs[d].radio_capacity], &eq).0
}

/// All depot-anchored trajectories of UAV `d`, in lexicographic order.
fn trajectories(s: &Scenario, d: UavId) -> Vec<Vec<LocationId>> {
    let nk = s.epochs();
    let step = s.uavs[d].max_step_distance;
    let adj = s.movement_graph(step);
    let home = s.hop_distances_from(&s.depots(), step);
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(nk);
    fn rec(
        adj: &[Vec<LocationId>],
        home: &[Option<usize>],
        nk: usize,
        path: &mut Vec<LocationId>,
        out: &mut Vec<Vec<LocationId>>,
    ) {
        if path.len() == nk {
            out.push(path.clone());
            return;
        }
        let cur = path[path.len() - 1];
        let left = nk - 1 - path.len();
        for &n in &adj[cur] {
            if home[n].is_some_and(|h| h <= left) {
                path.push(n);
                rec(adj, home, nk, path, out);
                path.pop();
            }
        }
    }
    for l0 in s.depots() {
        path.push(l0);
        if nk == 1 {
            out.push(path.clone());
        } else {
            rec(&adj, &home, nk, &mut path, &mut out);
        }
        path.pop();
    }
    out
}

/// Subsets of `items` (bitmask over payload ids) that are maximal under
/// inclusion among those accepted by `ok`.
fn maximal_subsets(items: &[PayloadId], mut ok: impl FnMut(u64) -> bool) -> Vec<u64> {
    let n = items.len();
    let mut feasible: Vec<u64> = Vec::new();
    for bits in 0u64..(1 << n) {
        let mask = (0..n)
            .filter(|i| bits & (1 << i) != 0)
            .fold(0u64, |acc, i| acc | 1 << items[i]);
        if ok(mask) {
            feasible.push(mask);
        }
    }
    let mut out: Vec<u64> = feasible
        .iter()
        .copied()
        .filter(|&a| !feasible.iter().any(|&b| b != a && a & b == a))
        .collect();
    out.sort_unstable();
    out
}

fn uav_options(s: &Scenario, d: UavId, trajs: &[Vec<LocationId>]) -> Vec<Opt> {
    let u = &s.uavs[d];
    let nk = s.epochs();
    let equipment = s.equipment_ids();
    let weight = |mask: u64| -> f64 {
        mask_ids(mask).iter().map(|&p| s.payloads[p].weight).sum()
    };
    let idle_sets = maximal_subsets(&equipment, |m| le(weight(m), u.payload_capacity));
    let ev = s.physics.vertical_delivery_energy;
    let mut all = Vec::new();
    for (ti, traj) in trajs.iter().enumerate() {
        // Sorties: maximal off-depot runs [k1, k2].
        let mut sorties = Vec::new();
        let mut k = 0;
        while k < nk {
            if s.is_depot(traj[k]) {
                k += 1;
                continue;
            }
            let k1 = k;
            while k + 1 < nk && !s.is_depot(traj[k + 1]) {
                k += 1;
            }
            sorties.push((k1, k));
            k += 1;
        }
        // Manifest choices per sortie, each with its delivery events.
        let mut choices: Vec<Vec<(u64, Vec<(PayloadId, Epoch)>)>> = Vec::new();
        let mut feasible = true;
        for &(k1, k2) in &sorties {
            let per_kg: f64 = (k1..=k2).map(|k| s.e(traj[k - 1], traj[k])).sum();
            let mut first_visit = Vec::new();
            for (p, win) in s.deliverables() {
                if let Some(k) = (k1..=k2).find(|&k| traj[k] == win.target && win.contains(k)) {
                    first_visit.push((p, k));
                }
            }
            let items: Vec<PayloadId> = equipment
                .iter()
                .copied()
                .chain(first_visit.iter().map(|&(p, _)| p))
                .collect();
            let parcels = first_visit.iter().fold(0u64, |acc, &(p, _)| acc | 1 << p);
            let sets = maximal_subsets(&items, |m| {
                let w = weight(m);
                let n_parcels = (m & parcels).count_ones() as f64;
                le(w, u.payload_capacity)
                    && le(per_kg * (u.empty_weight + w) + ev * n_parcels, u.battery_capacity)
            });
            if sets.is_empty() {
                feasible = false;
                break;
            }
            choices.push(
                sets.into_iter()
                    .map(|m| {
                        let ev: Vec<(PayloadId, Epoch)> = first_visit
                            .iter()
                            .copied()
                            .filter(|&(p, _)| m & (1 << p) != 0)
                            .collect();
                        (m, ev)
                    })
                    .collect(),
            );
        }
        if !feasible {
            continue;
        }
        // Depot epochs that are not a departure choose among the idle sets.
        let free_depots: Vec<Epoch> = (0..nk)
            .filter(|&k| s.is_depot(traj[k]) && !(k + 1 < nk && !s.is_depot(traj[k + 1])))
            .collect();
        let idle_choices = if idle_sets.is_empty() { vec![0] } else { idle_sets.clone() };

        let mut local: Vec<Opt> = Vec::new();
        let n_sortie = choices.len();
        let n_free = free_depots.len();
        let mut idx = vec![0usize; n_sortie + n_free];
        loop {
            let mut carried = vec![0u64; nk];
            let mut delivered = 0u64;
            let mut events = Vec::new();
            for (si, &(k1, k2)) in sorties.iter().enumerate() {
                let (m, ev) = &choices[si][idx[si]];
                for c in carried.iter_mut().take(k2 + 1).skip(k1 - 1) {
                    *c = *m;
                }
                delivered |= ev.iter().fold(0u64, |acc, &(p, _)| acc | 1 << p);
                events.extend(ev.iter().copied());
            }
            for (fi, &k) in free_depots.iter().enumerate() {
                carried[k] = idle_choices[idx[n_sortie + fi]];
            }
            events.sort_unstable();
            let equipped = carried.iter().map(|&c| missions_enabled(s, c)).collect();
            local.push(Opt {
                traj: ti,
                carried,
                equipped,
                delivered,
                events,
            });
            // advance the mixed-radix counter
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    break;
                }
                let radix = if pos < n_sortie { choices[pos].len() } else { idle_choices.len() };
                idx[pos] += 1;
                if idx[pos] < radix {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == idx.len() {
                break;
            }
        }
        // Drop dominated options of this trajectory.
        let dominated = |a: &Opt, b: &Opt| {
            a.delivered & b.delivered == a.delivered
                && a.equipped.iter().zip(&b.equipped).all(|(x, y)| x & y == *x)
        };
        let mut keep: Vec<Opt> = Vec::new();
        for (i, a) in local.iter().enumerate() {
            let beaten = local.iter().enumerate().any(|(j, b)| {
                j != i && dominated(a, b) && (!dominated(b, a) || j < i)
            });
            if !beaten {
                keep.push(a.clone());
            }
        }
        all.extend(keep);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{line, line3};
    use crate::{objective, validate_plan, Delivery, Payload};

    /// Independent brute force for a single UAV: every trajectory, every
    /// per-epoch manifest choice that passes the validator, effort from the
    /// allocation subroutine. Branching order is reversed relative to the
    /// solver.
    fn brute_force_single(s: &Scenario) -> f64 {
        let nk = s.epochs();
        let nl = s.n_locations();
        let mut best = f64::NEG_INFINITY;
        let mut traj = vec![0usize; nk];
        let equipment = s.equipment_ids();
        let parcels = s.deliverable_ids();
        fn each_traj(s: &Scenario, k: usize, traj: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            let nk = s.epochs();
            if k == nk {
                if s.is_depot(traj[nk - 1]) {
                    f(traj);
                }
                return;
            }
            for l in (0..s.n_locations()).rev() {
                if k == 0 && !s.is_depot(l) {
                    continue;
                }
                if k > 0 && s.v(traj[k - 1], l) > s.uavs[0].max_step_distance {
                    continue;
                }
                traj[k] = l;
                each_traj(s, k + 1, traj, f);
            }
        }
        let _ = nl;
        let n_items = equipment.len() + parcels.len();
        each_traj(s, 0, &mut traj, &mut |t: &[usize]| {
            // one constant manifest for the whole horizon, plus delivery epochs
            for bits in (0u64..(1 << n_items)).rev() {
                let mut carried: Vec<usize> = Vec::new();
                for (i, &p) in equipment.iter().chain(parcels.iter()).enumerate() {
                    if bits & (1 << i) != 0 {
                        carried.push(p);
                    }
                }
                carried.sort_unstable();
                let mut plan = MissionPlan::idle(s);
                plan.tracks[0].location = t.to_vec();
                plan.tracks[0].carried = vec![carried.clone(); nk];
                for &p in &parcels {
                    let w = s.payloads[p].delivery.unwrap();
                    if let Some(k) = (0..nk).find(|&k| t[k] == w.target && w.contains(k)) {
                        plan.deliveries.push(DeliveryEvent { uav: 0, payload: p, epoch: k });
                    }
                }
                let eq: Vec<bool> = (0..s.n_missions()).map(|m| s.equipped_for(m, &carried)).collect();
                for k in 0..nk {
                    let tau = relay_closure_at(s, &[t[k]]);
                    let cap = if tau[0] { s.uavs[0].radio_capacity } else { 0.0 };
                    let (_, mu) = allocate_epoch(s, k, &[t[k]], &[cap], core::slice::from_ref(&eq));
                    plan.tracks[0].effort[k] = mu[0].clone();
                    plan.tracks[0].relay[k] = tau[0];
                }
                plan.tracks[0].battery = energy_profile(s, &plan, 0).battery;
                if validate_plan(s, &plan).unwrap().is_valid() {
                    best = best.max(objective(s, &plan));
                }
            }
        });
        best
    }

    #[test]
    fn line_instance_optimum_is_three() {
        let s = line3();
        let sol = solve_exact(&s, SolverLimits::default()).unwrap();
        assert_eq!(sol.theta, 3.0);
        assert!(validate_plan(&s, &sol.plan).unwrap().is_valid());
        assert_eq!(brute_force_single(&s), 3.0);
        let ex = solve_exact_with(&s, SolverLimits::default(), SearchMode::Exhaustive, &|| false).unwrap();
        assert_eq!(ex.theta, 3.0);
        assert_eq!(ex.plan, sol.plan);
    }

    #[test]
    fn no_demand_still_delivers() {
        let mut s = line3();
        for k in 0..6 {
            s.demand[k][0][1] = 0.0;
        }
        let sol = solve_exact(&s, SolverLimits::default()).unwrap();
        assert_eq!(sol.theta, 0.0);
        assert!(validate_plan(&s, &sol.plan).unwrap().is_valid());
        assert_eq!(sol.plan.deliveries.len(), 1);
    }

    #[test]
    fn single_cell_closed_form() {
        // Demand n=2 at L1, q=1: each servable epoch contributes 1/2.
        let mut s = line(2, 5, 1, &[1.0]);
        s.payloads.push(Payload { id: 0, weight: 1.0, delivery: None, equipment_for: vec![0] });
        for k in 0..5 {
            s.demand[k][0][1] = 2.0;
        }
        let sol = solve_exact(&s, SolverLimits::default()).unwrap();
        assert_eq!(sol.theta, 3.0 * 0.5);
    }

    #[test]
    fn impossible_delivery_has_certificate() {
        let mut s = line3();
        s.payloads[1].delivery = Some(Delivery { target: 2, earliest: 1, latest: 1 });
        match solve_exact(&s, SolverLimits::default()) {
            Err(ExactError::Infeasible(c)) => assert_eq!(c.undeliverable, vec![1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn limits_are_enforced() {
        let s = line(9, 4, 1, &[]);
        assert!(matches!(
            solve_exact(&s, SolverLimits::default()),
            Err(ExactError::Limits { what: "locations", .. })
        ));
        let s = line3();
        let tight = SolverLimits { node_budget: 2, ..SolverLimits::default() };
        assert!(matches!(solve_exact(&s, tight), Err(ExactError::NodeBudget(2))));
    }

    #[test]
    fn prefix_bound_is_admissible() {
        let mut s = line3();
        s.uavs.push(crate::UavSpec { id: 1, ..s.uavs[0].clone() });
        s.demand[3][0][2] = 1.0;
        s.connectivity.uav_to_network[2] = false;
        let p = Problem::prepare(&s, SolverLimits::default(), SearchMode::Exhaustive).unwrap();
        let n = p.options[0].len();
        for a in 0..n {
            let mut best = 0.0f64;
            for b in 0..n {
                let c = p.options[0][a].delivered | p.options[1][b].delivered;
                if c & p.all_parcels == p.all_parcels {
                    best = best.max(p.value(&[a, b]));
                }
                assert!(p.prefix_bound(&[a, b]) + 1e-9 >= p.value(&[a, b]));
            }
            assert!(p.prefix_bound(&[a]) + 1e-9 >= best);
        }
        assert!(p.prefix_bound(&[]) + 1e-9 >= solve_exact(&s, SolverLimits::default()).unwrap().theta);
    }

    #[test]
    fn relabelled_uavs_give_same_optimum() {
        let mut s = line3();
        s.uavs.push(crate::UavSpec { id: 1, battery_capacity: 3.0, ..s.uavs[0].clone() });
        let a = solve_exact(&s, SolverLimits::default()).unwrap().theta;
        s.uavs.swap(0, 1);
        s.uavs[0].id = 0;
        s.uavs[1].id = 1;
        let b = solve_exact(&s, SolverLimits::default()).unwrap().theta;
        assert_eq!(a, b);
    }
}
