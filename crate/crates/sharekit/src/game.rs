//! Finite welfare-sharing games: utilities, exhaustive pure-Nash-equilibrium
//! enumeration, and best-response cycle certificates.
//!
//! A game is a set of players, a set of resources (each with a welfare
//! function, a distribution rule, and a positive multiplicity counting
//! identical copies), and per-player action sets, where an action is a subset
//! of resources. Player `i`'s utility at a profile is the sum over the
//! resources they chose of `multiplicity * f_r(i, users of r)`.

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::model::{PlayerSet, Subset, WelfareFunction};
use crate::rational::Rational;
use crate::rules::{DistributionRule, RuleSpec};
use crate::Error;

/// Default cap on the number of profiles enumerated by the solvers.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A resource: welfare/rule references (indices into the game's tables) and
/// the number of identical copies.
#[derive(Clone, Debug)]
pub struct Resource {
    pub id: String,
    pub welfare: usize,
    pub rule: usize,
    pub multiplicity: u64,
}

/// One action index per player.
pub type ActionProfile = Vec<usize>;

/// A single strictly improving move: at `profile`, `player` switches to
/// `action`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrStep {
    pub profile: ActionProfile,
    pub player: usize,
    pub action: usize,
}

#[derive(Clone, Debug)]
pub struct Game {
    players: PlayerSet,
    welfares: Vec<(String, WelfareFunction)>,
    rules: Vec<(String, RuleSpec)>,
    resources: Vec<Resource>,
    /// Per player, per action, sorted resource indices.
    actions: Vec<Vec<Vec<usize>>>,
    /// Realized rule per resource (rules are realized against the resource's
    /// welfare, so one named rule can yield several tables).
    realized: Vec<DistributionRule>,
    resource_rule: Vec<usize>,
}

impl Game {
    /// Assembles and validates a game. `resources` entries are
    /// `(id, welfare name, rule name, multiplicity)`; `actions` maps player
    /// labels to lists of actions given as resource-id lists.
    pub fn new(
        players: PlayerSet,
        welfares: Vec<(String, WelfareFunction)>,
        rules: Vec<(String, RuleSpec)>,
        resources: Vec<(String, String, String, u64)>,
        actions: &BTreeMap<String, Vec<Vec<String>>>,
    ) -> Result<Self, Error> {
        for (_, w) in &welfares {
            if w.players() != &players {
                return Err(Error::input("welfare over a different player set"));
            }
        }
        for (name, _) in &welfares {
            if welfares.iter().filter(|(n, _)| n == name).count() > 1 {
                return Err(Error::input(format!("duplicate welfare name {name:?}")));
            }
        }
        for (name, _) in &rules {
            if rules.iter().filter(|(n, _)| n == name).count() > 1 {
                return Err(Error::input(format!("duplicate rule name {name:?}")));
            }
        }

        let mut res = Vec::new();
        let mut realized: Vec<DistributionRule> = Vec::new();
        let mut resource_rule = Vec::new();
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        for (id, wname, rname, mult) in resources {
            if res.iter().any(|r: &Resource| r.id == id) {
                return Err(Error::input(format!("duplicate resource id {id:?}")));
            }
            if mult == 0 {
                return Err(Error::input(format!(
                    "resource {id:?} must have multiplicity >= 1"
                )));
            }
            let wi = welfares
                .iter()
                .position(|(n, _)| *n == wname)
                .ok_or_else(|| Error::input(format!("unknown welfare {wname:?}")))?;
            let ri = rules
                .iter()
                .position(|(n, _)| *n == rname)
                .ok_or_else(|| Error::input(format!("unknown rule {rname:?}")))?;
            let slot = match cache.get(&(ri, wi)) {
                Some(&k) => k,
                None => {
                    let table =
                        DistributionRule::realize(rules[ri].1.clone(), &players, &welfares[wi].1)?;
                    realized.push(table);
                    cache.insert((ri, wi), realized.len() - 1);
                    realized.len() - 1
                }
            };
            res.push(Resource {
                id,
                welfare: wi,
                rule: ri,
                multiplicity: mult,
            });
            resource_rule.push(slot);
        }

        // identical local welfare functions must carry identical rules
        for a in 0..res.len() {
            for b in (a + 1)..res.len() {
                if welfares[res[a].welfare].1 == welfares[res[b].welfare].1
                    && !realized[resource_rule[a]].same_shares(&realized[resource_rule[b]])
                {
                    return Err(Error::input(format!(
                        "resources {:?} and {:?} share a welfare function but not a rule",
                        res[a].id, res[b].id
                    )));
                }
            }
        }

        let mut acts = Vec::new();
        for i in 0..players.n() {
            let list = actions.get(players.label(i)).ok_or_else(|| {
                Error::input(format!("player {:?} has no action set", players.label(i)))
            })?;
            if list.is_empty() {
                return Err(Error::input(format!(
                    "player {:?} needs at least one action",
                    players.label(i)
                )));
            }
            let mut per_player = Vec::new();
            for action in list {
                let mut indices = Vec::new();
                for rid in action {
                    let k = res
                        .iter()
                        .position(|r| &r.id == rid)
                        .ok_or_else(|| Error::input(format!("unknown resource {rid:?}")))?;
                    if !indices.contains(&k) {
                        indices.push(k);
                    }
                }
                indices.sort_unstable();
                per_player.push(indices);
            }
            acts.push(per_player);
        }

        Ok(Game {
            players,
            welfares,
            rules,
            resources: res,
            actions: acts,
            realized,
            resource_rule,
        })
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn welfares(&self) -> &[(String, WelfareFunction)] {
        &self.welfares
    }

    pub fn rules(&self) -> &[(String, RuleSpec)] {
        &self.rules
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn actions(&self) -> &[Vec<Vec<usize>>] {
        &self.actions
    }

    pub fn realized_rule(&self, resource: usize) -> &DistributionRule {
        &self.realized[self.resource_rule[resource]]
    }

    pub fn resource_welfare(&self, resource: usize) -> &WelfareFunction {
        &self.welfares[self.resources[resource].welfare].1
    }

    /// Number of profiles, or an error if it exceeds `budget`.
    pub fn profile_count(&self, budget: u64) -> Result<u128, Error> {
        let mut count: u128 = 1;
        for acts in &self.actions {
            count = count.saturating_mul(acts.len() as u128);
            if count > budget as u128 {
                return Err(Error::BudgetExceeded {
                    profiles: count,
                    budget,
                });
            }
        }
        Ok(count)
    }

    /// Players on resource `r` under `profile`.
    pub fn occupancy(&self, profile: &ActionProfile, r: usize) -> Subset {
        let mut s = Subset::EMPTY;
        for i in 0..self.players.n() {
            if self.actions[i][profile[i]].binary_search(&r).is_ok() {
                s = s.with(i);
            }
        }
        s
    }

    /// `U_i = sum over chosen resources of multiplicity * f_r(i, users)`.
    pub fn utility(&self, profile: &ActionProfile, i: usize) -> Rational {
        let mut total = Rational::from_integer(0.into());
        for &r in &self.actions[i][profile[i]] {
            let occ = self.occupancy(profile, r);
            let share = self.realized_rule(r).eval(i, occ);
            total += share * crate::rational::int(self.resources[r].multiplicity as i64);
        }
        total
    }

    /// Total welfare generated at `profile` (with multiplicities).
    pub fn profile_welfare(&self, profile: &ActionProfile) -> Rational {
        let mut total = Rational::from_integer(0.into());
        for (r, res) in self.resources.iter().enumerate() {
            let occ = self.occupancy(profile, r);
            total +=
                self.resource_welfare(r).value(occ) * crate::rational::int(res.multiplicity as i64);
        }
        total
    }

    fn first_profile(&self) -> ActionProfile {
        vec![0; self.players.n()]
    }

    /// Advances `profile` in lexicographic order (last player fastest);
    /// false once exhausted.
    fn next_profile(&self, profile: &mut ActionProfile) -> bool {
        for i in (0..profile.len()).rev() {
            profile[i] += 1;
            if profile[i] < self.actions[i].len() {
                return true;
            }
            profile[i] = 0;
        }
        false
    }

    /// All profiles in lexicographic order.
    pub fn profiles(&self, budget: u64) -> Result<Vec<ActionProfile>, Error> {
        let count = self.profile_count(budget)?;
        let mut out = Vec::with_capacity(count as usize);
        let mut p = self.first_profile();
        loop {
            out.push(p.clone());
            if !self.next_profile(&mut p) {
                break;
            }
        }
        Ok(out)
    }

    /// Strictly improving alternative for `i` at `profile`, if any: the best
    /// response (lowest action index among maximizers).
    fn best_improvement(&self, profile: &ActionProfile, i: usize) -> Option<usize> {
        let current = self.utility(profile, i);
        let mut best: Option<(usize, Rational)> = None;
        let mut alt = profile.clone();
        for c in 0..self.actions[i].len() {
            if c == profile[i] {
                continue;
            }
            alt[i] = c;
            let u = self.utility(&alt, i);
            if u > current {
                match &best {
                    Some((_, ub)) if *ub >= u => {}
                    _ => best = Some((c, u)),
                }
            }
        }
        best.map(|(c, _)| c)
    }

    /// All pure Nash equilibria, in profile enumeration order. Empty means
    /// the game has none.
    pub fn find_pne(&self, budget: u64) -> Result<Vec<ActionProfile>, Error> {
        self.profile_count(budget)?;
        let mut out = Vec::new();
        let mut p = self.first_profile();
        loop {
            let mut stable = true;
            for i in 0..self.players.n() {
                if self.best_improvement(&p, i).is_some() {
                    stable = false;
                    break;
                }
            }
            if stable {
                out.push(p.clone());
            }
            if !self.next_profile(&mut p) {
                break;
            }
        }
        Ok(out)
    }

    /// Runs deterministic best-response dynamics (lowest-index improving
    /// player moves to their best response) from every profile. Returns a
    /// closed cycle of strictly improving moves if any walk revisits a
    /// profile, `None` if every walk reaches an equilibrium.
    pub fn best_response_cycle(&self, budget: u64) -> Result<Option<Vec<BrStep>>, Error> {
        self.profile_count(budget)?;

        let successor = |p: &ActionProfile| -> Option<(usize, usize)> {
            (0..self.players.n()).find_map(|i| self.best_improvement(p, i).map(|c| (i, c)))
        };

        // Functional graph walk with memoized "known to converge" states.
        let mut settled: HashMap<ActionProfile, bool> = HashMap::new();
        let mut start = self.first_profile();
        loop {
            if !settled.contains_key(&start) {
                let mut path: Vec<(ActionProfile, Option<(usize, usize)>)> = Vec::new();
                let mut seen: HashMap<ActionProfile, usize> = HashMap::new();
                let mut cur = start.clone();
                loop {
                    if let Some(&k) = seen.get(&cur) {
                        // cycle found: steps k..end
                        let cycle = path[k..]
                            .iter()
                            .map(|(p, step)| {
                                let (player, action) = step.expect("cycle steps all move");
                                BrStep {
                                    profile: p.clone(),
                                    player,
                                    action,
                                }
                            })
                            .collect();
                        return Ok(Some(cycle));
                    }
                    if settled.contains_key(&cur) {
                        break;
                    }
                    match successor(&cur) {
                        None => break, // equilibrium
                        Some((player, action)) => {
                            seen.insert(cur.clone(), path.len());
                            let mut next = cur.clone();
                            next[player] = action;
                            path.push((cur, Some((player, action))));
                            cur = next;
                        }
                    }
                }
                for (p, _) in path {
                    settled.insert(p, true);
                }
                settled.insert(cur, true);
            }
            if !self.next_profile(&mut start) {
                break;
            }
        }
        Ok(None)
    }
}
