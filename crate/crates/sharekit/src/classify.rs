//! Decides whether a set of distribution rules guarantees equilibrium
//! existence in every game built from them.
//!
//! The pipeline reduces each rule to a budget-balanced one (pairing it with
//! the welfare it actually distributes), then runs a sequence of necessary
//! conditions: the rule must depend only on contributing players, decompose
//! over the contributing coalitions into locally budget-balanced basis rules,
//! have nonnegative basis shares, and have basis shares that are globally and
//! cyclically consistent across coalitions and welfare functions. Rules that
//! survive are certified as generalized weighted Shapley values by an
//! explicitly constructed universal weight system; the first failed condition
//! instead yields a witness and a concrete game with no pure Nash equilibrium
//! (built in [`crate::counterexamples`] and machine-verified).

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::counterexamples;
use crate::game::Game;
use crate::model::{
    min_partition, minimal_elements, BasisForm, PlayerSet, Subset, WelfareFunction,
};
use crate::rational::Rational;
use crate::rules::{DistributionRule, RuleSpec, WeightSystem};
use crate::Error;

/// Pairs of a welfare function and the rule meant to distribute it, all over
/// one player set.
#[derive(Clone, Debug)]
pub struct ClassifierInput {
    players: PlayerSet,
    pairs: Vec<(WelfareFunction, DistributionRule)>,
}

impl ClassifierInput {
    pub fn new(
        players: PlayerSet,
        pairs: Vec<(WelfareFunction, DistributionRule)>,
    ) -> Result<Self, Error> {
        if pairs.is_empty() {
            return Err(Error::input("classifier input needs at least one pair"));
        }
        for (w, f) in &pairs {
            if w.players() != &players || f.players() != &players {
                return Err(Error::input("all pairs must share one player set"));
            }
        }
        // the model requires identical welfare functions to carry identical rules
        for a in 0..pairs.len() {
            for b in (a + 1)..pairs.len() {
                if pairs[a].0 == pairs[b].0 && !pairs[a].1.same_shares(&pairs[b].1) {
                    return Err(Error::input(format!(
                        "pairs {a} and {b} share a welfare function but disagree on the rule"
                    )));
                }
            }
        }
        Ok(ClassifierInput { players, pairs })
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn pairs(&self) -> &[(WelfareFunction, DistributionRule)] {
        &self.pairs
    }
}

/// Replaces every welfare function by the welfare its rule actually
/// distributes, making each rule budget-balanced without changing any
/// strategic behavior.
pub fn reduce_to_budget_balanced(input: &ClassifierInput) -> ClassifierInput {
    ClassifierInput {
        players: input.players.clone(),
        pairs: input
            .pairs
            .iter()
            .map(|(_, f)| (f.actual_welfare(), f.clone()))
            .collect(),
    }
}

/// Basis distribution rules: per support coalition `T`, the shares
/// `f^T(i, T)` for `i` in `T` (aligned with `T.members()`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisRules {
    shares: BTreeMap<Subset, Vec<Rational>>,
}

impl BasisRules {
    pub fn coalitions(&self) -> impl Iterator<Item = Subset> + '_ {
        self.shares.keys().copied()
    }

    pub fn row(&self, t: Subset) -> &[Rational] {
        &self.shares[&t]
    }

    /// `f^T(i, T)`; zero when `i` is not in `T`.
    pub fn share(&self, t: Subset, i: usize) -> Rational {
        match t.position_of(i) {
            Some(pos) => self.shares[&t][pos].clone(),
            None => Rational::zero(),
        }
    }
}

/// First violation of `f(i, S) = f(i, contributing players of S)`, scanning
/// subsets by (size, lex) and players by index. `None` means the rule
/// distributes only among contributing players, as if the others were absent.
pub fn check_contributing_conditions(
    ground: &BasisForm,
    rule: &DistributionRule,
) -> Option<(Subset, usize)> {
    let players = ground.players();
    for s in players.subsets_ordered() {
        if s.is_empty() {
            continue;
        }
        let ns = ground.contributing_players(s);
        if ns == s {
            continue;
        }
        for i in s.members() {
            if rule.eval(i, s) != rule.eval(i, ns) {
                return Some((s, i));
            }
        }
    }
    None
}

/// Computes the basis distribution rules by peeling coalitions in
/// min-partition order: `f^T(i, T)` is what is left of `f(i, T)` after
/// subtracting the contributions of the strictly smaller coalitions inside
/// `T`, divided by `q_T`.
pub fn construct_basis_rules(ground: &BasisForm, rule: &DistributionRule) -> BasisRules {
    let support: Vec<Subset> = ground.support().collect();
    let mut shares: BTreeMap<Subset, Vec<Rational>> = BTreeMap::new();
    for block in min_partition(&support) {
        for t in block {
            let q = ground.coefficient(t);
            let row = t
                .members()
                .map(|i| {
                    let mut v = rule.eval(i, t);
                    for inner in ground.coalitions_in(t) {
                        if inner != t && inner.contains(i) {
                            v -= ground.coefficient(inner)
                                * &shares[&inner][inner.position_of(i).unwrap()];
                        }
                    }
                    v / &q
                })
                .collect();
            shares.insert(t, row);
        }
    }
    BasisRules { shares }
}

/// First violation of `f(i, S) = sum over coalitions T in S containing i of
/// q_T * f^T(i, T)`, in (size, lex) subset order then player order.
pub fn check_decomposition(
    ground: &BasisForm,
    rule: &DistributionRule,
    basis_rules: &BasisRules,
) -> Option<(Subset, usize)> {
    let players = ground.players();
    for s in players.subsets_ordered() {
        if s.is_empty() {
            continue;
        }
        for i in s.members() {
            if rule.eval(i, s) != reconstructed_share(ground, basis_rules, i, s) {
                return Some((s, i));
            }
        }
    }
    None
}

fn reconstructed_share(
    ground: &BasisForm,
    basis_rules: &BasisRules,
    i: usize,
    s: Subset,
) -> Rational {
    let mut total = Rational::zero();
    for t in ground.coalitions_in(s) {
        if t.contains(i) {
            total += ground.coefficient(t) * basis_rules.share(t, i);
        }
    }
    total
}

/// Checks `f^T >= 0` coalition by coalition (in (size, lex) order, players by
/// index) and, on success, packages each coalition's weight system: positive
/// shares become the top priority block with the shares as weights, zero
/// shares the second block, everyone else trails.
pub fn check_nonnegativity_and_build_local_weights(
    players: &PlayerSet,
    basis_rules: &BasisRules,
) -> Result<Vec<(Subset, WeightSystem)>, (Subset, usize)> {
    for t in basis_rules.coalitions() {
        for i in t.members() {
            if basis_rules.share(t, i).is_negative() {
                return Err((t, i));
            }
        }
    }
    let mut out = Vec::new();
    for t in basis_rules.coalitions() {
        let positive: Subset = t
            .members()
            .filter(|&i| basis_rules.share(t, i).is_positive())
            .fold(Subset::EMPTY, |acc, i| acc.with(i));
        let zeroed = t.minus(positive);
        let rest = players.full().minus(t);
        let lambda: Vec<Rational> = (0..players.n())
            .map(|i| {
                if positive.contains(i) {
                    basis_rules.share(t, i)
                } else {
                    Rational::from_integer(1.into())
                }
            })
            .collect();
        let mut sigma = vec![positive];
        if !zeroed.is_empty() {
            sigma.push(zeroed);
        }
        if !rest.is_empty() {
            sigma.push(rest);
        }
        let omega = WeightSystem::new(players.clone(), lambda, sigma)
            .expect("local blocks partition the players");
        out.push((t, omega));
    }
    Ok(out)
}

/// Integer coefficients expressing a basis rule in terms of the original
/// rule: `q_T f^T(i, T) = sum over support T' inside T of n_T(T') f(i, T')`,
/// obtained by unravelling the construction recursion.
pub fn inclusion_exclusion_coeffs(ground: &BasisForm, t: Subset) -> BTreeMap<Subset, i128> {
    assert!(
        ground.coeffs().contains_key(&t),
        "coalition must be in the support"
    );
    let inside: Vec<Subset> = ground.coalitions_in(t);
    let mut memo: BTreeMap<Subset, BTreeMap<Subset, i128>> = BTreeMap::new();
    for block in min_partition(&inside) {
        for u in block {
            let mut coeffs: BTreeMap<Subset, i128> = BTreeMap::new();
            coeffs.insert(u, 1);
            for inner in ground.coalitions_in(u) {
                if inner == u {
                    continue;
                }
                for (k, c) in &memo[&inner] {
                    *coeffs.entry(*k).or_insert(0) -= c;
                }
            }
            coeffs.retain(|_, c| *c != 0);
            memo.insert(u, coeffs);
        }
    }
    memo.remove(&t).expect("t processed with its subsets")
}

/// Aggregated coefficients for a union `S` of coalitions:
/// `ntilde_S(T) = sum over support T' inside S containing T of n_{T'}(T)`.
pub fn aggregated_coeffs(ground: &BasisForm, s: Subset) -> BTreeMap<Subset, i128> {
    let mut acc: BTreeMap<Subset, i128> = BTreeMap::new();
    for t_outer in ground.coalitions_in(s) {
        for (t, c) in inclusion_exclusion_coeffs(ground, t_outer) {
            *acc.entry(t).or_insert(0) += c;
        }
    }
    acc.retain(|_, c| *c != 0);
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalWitness {
    pub i: usize,
    pub j: usize,
    pub first: (usize, Subset),
    pub second: (usize, Subset),
}

/// Cross-coalition consistency of the basis shares: for every player pair
/// and every two coalitions containing both (possibly from different welfare
/// functions), `f^{T1}(i)f^{T2}(j) = f^{T2}(i)f^{T1}(j)`. First violation in
/// (player pair, pair index, coalition (size, lex)) scan order.
pub fn check_global_consistency(
    players: &PlayerSet,
    analyses: &[(BasisForm, BasisRules)],
) -> Option<GlobalWitness> {
    let n = players.n();
    for i in 0..n {
        for j in (i + 1)..n {
            let fams: Vec<Vec<Subset>> = analyses
                .iter()
                .map(|(g, _)| g.coalitions_with_pair(i, j))
                .collect();
            for p in 0..analyses.len() {
                for q in p..analyses.len() {
                    for (a_idx, &t1) in fams[p].iter().enumerate() {
                        for (b_idx, &t2) in fams[q].iter().enumerate() {
                            if p == q && b_idx <= a_idx {
                                continue;
                            }
                            let f1 = &analyses[p].1;
                            let f2 = &analyses[q].1;
                            if f1.share(t1, i) * f2.share(t2, j)
                                != f2.share(t2, i) * f1.share(t1, j)
                            {
                                return Some(GlobalWitness {
                                    i,
                                    j,
                                    first: (p, t1),
                                    second: (q, t2),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicWitness {
    /// Distinct players `i_1, ..., i_z`; edge `t` joins players `t` and `t+1`
    /// (cyclically) through `edges[t] = (pair index, coalition)`.
    pub cycle: Vec<usize>,
    pub edges: Vec<(usize, Subset)>,
}

/// One share-ratio edge of the [`ShareGraph`]: a minimal coalition containing
/// both endpoints in which at least one of them is paid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareEdge {
    pub i: usize,
    pub j: usize,
    pub share_i: Rational,
    pub share_j: Rational,
    pub pair: usize,
    pub coalition: Subset,
}

/// Graph on contributing players whose edges carry exact share ratios; cycle
/// products over it encode the consistency a universal weight system needs.
#[derive(Clone, Debug)]
pub struct ShareGraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<ShareEdge>,
    /// Players appearing in some coalition but never with a positive share.
    pub zero_class: Vec<usize>,
}

impl ShareGraph {
    pub fn build(players: &PlayerSet, analyses: &[(BasisForm, BasisRules)]) -> ShareGraph {
        let n = players.n();
        let mut appears = vec![false; n];
        let mut positive = vec![false; n];
        for (ground, rules) in analyses {
            for t in ground.support() {
                for i in t.members() {
                    appears[i] = true;
                    if rules.share(t, i).is_positive() {
                        positive[i] = true;
                    }
                }
            }
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for (p, (ground, rules)) in analyses.iter().enumerate() {
                    let family: Vec<Subset> = ground
                        .coalitions_with_pair(i, j)
                        .into_iter()
                        .filter(|&t| {
                            rules.share(t, i).is_positive() || rules.share(t, j).is_positive()
                        })
                        .collect();
                    for t in minimal_elements(&family) {
                        edges.push(ShareEdge {
                            i,
                            j,
                            share_i: rules.share(t, i),
                            share_j: rules.share(t, j),
                            pair: p,
                            coalition: t,
                        });
                    }
                }
            }
        }
        ShareGraph {
            nodes: (0..n).filter(|&i| appears[i]).collect(),
            edges,
            zero_class: (0..n).filter(|&i| appears[i] && !positive[i]).collect(),
        }
    }

    /// One edge per unordered player pair, the first in (pair index,
    /// coalition) order. After global consistency all parallel edges agree,
    /// so this loses nothing.
    fn canonical_edges(&self) -> BTreeMap<(usize, usize), ShareEdge> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            out.entry((e.i, e.j)).or_insert_with(|| e.clone());
        }
        out
    }
}

/// Spanning forest of the positive-ratio subgraph with multiplicative node
/// potentials, used both to check cycle products and to read off weights.
struct EqForest {
    comp: Vec<Option<usize>>,
    potential: Vec<Option<Rational>>,
    parent: Vec<Option<(usize, ShareEdge)>>,
    members: Vec<Vec<usize>>,
}

fn build_eq_forest(n: usize, canon: &BTreeMap<(usize, usize), ShareEdge>) -> EqForest {
    let mut adj: Vec<Vec<(usize, &ShareEdge)>> = vec![Vec::new(); n];
    for e in canon.values() {
        if e.share_i.is_positive() && e.share_j.is_positive() {
            adj[e.i].push((e.j, e));
            adj[e.j].push((e.i, e));
        }
    }
    for list in &mut adj {
        list.sort_by_key(|(x, _)| *x);
    }
    let mut forest = EqForest {
        comp: vec![None; n],
        potential: vec![None; n],
        parent: vec![None; n],
        members: Vec::new(),
    };
    for root in 0..n {
        if forest.comp[root].is_some() || adj[root].is_empty() {
            continue;
        }
        let id = forest.members.len();
        forest.members.push(Vec::new());
        let mut queue = std::collections::VecDeque::new();
        forest.comp[root] = Some(id);
        forest.potential[root] = Some(Rational::from_integer(1.into()));
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            forest.members[id].push(u);
            for &(v, e) in &adj[u] {
                if forest.comp[v].is_none() {
                    forest.comp[v] = Some(id);
                    // lambda_u / lambda_v = share_u / share_v along the edge
                    let (su, sv) = if e.i == u {
                        (&e.share_i, &e.share_j)
                    } else {
                        (&e.share_j, &e.share_i)
                    };
                    let pu = forest.potential[u].clone().unwrap();
                    forest.potential[v] = Some(pu * sv / su);
                    forest.parent[v] = Some((u, e.clone()));
                    queue.push_back(v);
                }
            }
        }
        forest.members[id].sort_unstable();
    }
    forest
}

impl EqForest {
    fn path_to_root(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![x];
        while let Some((p, _)) = &self.parent[x] {
            out.push(*p);
            x = *p;
        }
        out
    }

    /// Tree path from `u` to `v` (same component): node list plus the edge
    /// joining each consecutive pair.
    fn tree_path(&self, u: usize, v: usize) -> (Vec<usize>, Vec<ShareEdge>) {
        let pu = self.path_to_root(u);
        let pv = self.path_to_root(v);
        let lca_pos_v = pv
            .iter()
            .position(|x| pu.contains(x))
            .expect("same component");
        let lca = pv[lca_pos_v];
        let lca_pos_u = pu.iter().position(|&x| x == lca).unwrap();
        let mut nodes: Vec<usize> = pu[..=lca_pos_u].to_vec();
        for &x in pv[..lca_pos_v].iter().rev() {
            nodes.push(x);
        }
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        for k in 0..nodes.len() - 1 {
            let (a, b) = (nodes[k], nodes[k + 1]);
            // one of the two endpoints holds the parent edge joining them
            let e = match &self.parent[a] {
                Some((p, e)) if *p == b => e.clone(),
                _ => match &self.parent[b] {
                    Some((p, e)) if *p == a => e.clone(),
                    _ => unreachable!("consecutive path nodes share a tree edge"),
                },
            };
            edges.push(e);
        }
        (nodes, edges)
    }
}

/// Rotates and orients a player cycle so the smallest player comes first and
/// its smaller neighbor second; edges follow their endpoints.
fn canonical_cycle(
    cycle: Vec<usize>,
    edges: Vec<(usize, Subset)>,
) -> (Vec<usize>, Vec<(usize, Subset)>) {
    let z = cycle.len();
    let start = (0..z).min_by_key(|&t| cycle[t]).unwrap();
    let fwd_players: Vec<usize> = (0..z).map(|t| cycle[(start + t) % z]).collect();
    let fwd_edges: Vec<_> = (0..z).map(|t| edges[(start + t) % z]).collect();
    let bwd_players: Vec<usize> = (0..z).map(|t| cycle[(start + z - t) % z]).collect();
    let bwd_edges: Vec<_> = (0..z).map(|t| edges[(start + z - t - 1) % z]).collect();
    if bwd_players[1] < fwd_players[1] {
        (bwd_players, bwd_edges)
    } else {
        (fwd_players, fwd_edges)
    }
}

/// Checks that every cycle of share ratios multiplies out consistently:
/// node potentials are propagated over a spanning forest of the
/// positive-ratio subgraph and every non-tree edge is compared against them,
/// and the strict-domination arcs between potential components must form no
/// directed cycle. Either failure is expanded back into an explicit
/// player/coalition cycle.
pub fn check_cyclic_consistency(
    players: &PlayerSet,
    analyses: &[(BasisForm, BasisRules)],
) -> Option<CyclicWitness> {
    let graph = ShareGraph::build(players, analyses);
    let canon = graph.canonical_edges();
    let forest = build_eq_forest(players.n(), &canon);

    // ratio check on non-tree positive edges
    for e in canon.values() {
        if !(e.share_i.is_positive() && e.share_j.is_positive()) {
            continue;
        }
        let is_tree_edge = matches!(&forest.parent[e.i], Some((p, _)) if *p == e.j)
            || matches!(&forest.parent[e.j], Some((p, _)) if *p == e.i);
        if is_tree_edge {
            continue;
        }
        let pi = forest.potential[e.i].as_ref().expect("positive edge node");
        let pj = forest.potential[e.j].as_ref().expect("positive edge node");
        if pi * &e.share_j != pj * &e.share_i {
            let (nodes, path_edges) = forest.tree_path(e.i, e.j);
            let mut cyc_edges: Vec<(usize, Subset)> = path_edges
                .iter()
                .map(|pe| (pe.pair, pe.coalition))
                .collect();
            // closing edge joins the last node (e.j) back to the first (e.i)
            cyc_edges.push((e.pair, e.coalition));
            let (c, ce) = canonical_cycle(nodes, cyc_edges);
            return Some(CyclicWitness {
                cycle: c,
                edges: ce,
            });
        }
    }

    // strict arcs between components (singletons included)
    let mut comp_of = forest.comp.clone();
    let mut comp_count = forest.members.len();
    for &i in &graph.nodes {
        if comp_of[i].is_none() {
            comp_of[i] = Some(comp_count);
            comp_count += 1;
        }
    }
    struct Arc {
        to: usize,
        from_player: usize,
        to_player: usize,
        edge: ShareEdge,
    }
    let mut arcs_by_src: Vec<Vec<Arc>> = (0..comp_count).map(|_| Vec::new()).collect();
    for e in canon.values() {
        let (dominant, dominated) = if e.share_i.is_positive() && e.share_j.is_zero() {
            (e.i, e.j)
        } else if e.share_j.is_positive() && e.share_i.is_zero() {
            (e.j, e.i)
        } else {
            continue;
        };
        arcs_by_src[comp_of[dominant].unwrap()].push(Arc {
            to: comp_of[dominated].unwrap(),
            from_player: dominant,
            to_player: dominated,
            edge: e.clone(),
        });
    }

    // iterative DFS for a directed cycle over components
    let mut color = vec![0u8; comp_count];
    for start in 0..comp_count {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut path_arcs: Vec<&Arc> = Vec::new();
        color[start] = 1;
        while let Some(&(c, k)) = stack.last() {
            if k < arcs_by_src[c].len() {
                stack.last_mut().unwrap().1 += 1;
                let arc = &arcs_by_src[c][k];
                if color[arc.to] == 1 {
                    let pos = stack.iter().position(|&(x, _)| x == arc.to).unwrap();
                    let mut cycle_arcs: Vec<&Arc> = path_arcs[pos..].to_vec();
                    cycle_arcs.push(arc);
                    // expand the component cycle into a player cycle, filling
                    // gaps inside components with tree paths
                    let z = cycle_arcs.len();
                    let mut cyc_players = Vec::new();
                    let mut cyc_edges = Vec::new();
                    for t in 0..z {
                        let a = cycle_arcs[t];
                        let next_from = cycle_arcs[(t + 1) % z].from_player;
                        cyc_players.push(a.from_player);
                        cyc_edges.push((a.edge.pair, a.edge.coalition));
                        if a.to_player != next_from {
                            let (nodes, path_edges) = forest.tree_path(a.to_player, next_from);
                            for idx in 0..nodes.len() - 1 {
                                cyc_players.push(nodes[idx]);
                                cyc_edges.push((path_edges[idx].pair, path_edges[idx].coalition));
                            }
                        }
                    }
                    let (c, ce) = canonical_cycle(cyc_players, cyc_edges);
                    return Some(CyclicWitness {
                        cycle: c,
                        edges: ce,
                    });
                } else if color[arc.to] == 0 {
                    color[arc.to] = 1;
                    path_arcs.push(arc);
                    stack.push((arc.to, 0));
                }
            } else {
                color[c] = 2;
                stack.pop();
                if !stack.is_empty() {
                    path_arcs.pop();
                }
            }
        }
    }
    None
}

/// Builds the universal weight system once every consistency check has
/// passed: priority blocks are the components of the positive-ratio
/// subgraph, topologically ordered by strict domination (ties broken by
/// smallest member), with zero-share players in trailing singleton blocks
/// and never-contributing players in one final block; weights are the
/// propagated node potentials (1 for free players).
pub fn build_universal_weight_system(
    players: &PlayerSet,
    analyses: &[(BasisForm, BasisRules)],
) -> Result<WeightSystem, Error> {
    let graph = ShareGraph::build(players, analyses);
    let canon = graph.canonical_edges();
    let forest = build_eq_forest(players.n(), &canon);

    let mut comp_of = forest.comp.clone();
    let mut comps: Vec<Vec<usize>> = forest.members.clone();
    for &i in &graph.nodes {
        if comp_of[i].is_none() {
            comp_of[i] = Some(comps.len());
            comps.push(vec![i]);
        }
    }

    let is_zero_class = |c: usize| comps[c].len() == 1 && graph.zero_class.contains(&comps[c][0]);

    let mut indegree = vec![0usize; comps.len()];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for e in canon.values() {
        let (dominant, dominated) = if e.share_i.is_positive() && e.share_j.is_zero() {
            (e.i, e.j)
        } else if e.share_j.is_positive() && e.share_i.is_zero() {
            (e.j, e.i)
        } else {
            continue;
        };
        let (a, b) = (comp_of[dominant].unwrap(), comp_of[dominated].unwrap());
        if a == b {
            return Err(Error::internal(
                "strict domination inside a ratio component survived the cyclic check",
            ));
        }
        outgoing[a].push(b);
        indegree[b] += 1;
    }

    // positive components first in topological order, then zero-share
    // players, then never-contributing players
    let mut order: Vec<usize> = Vec::new();
    let mut emitted = vec![false; comps.len()];
    loop {
        let ready = (0..comps.len())
            .filter(|&c| !emitted[c] && !is_zero_class(c) && indegree[c] == 0)
            .min_by_key(|&c| comps[c][0]);
        match ready {
            None => break,
            Some(c) => {
                emitted[c] = true;
                order.push(c);
                for &d in &outgoing[c] {
                    indegree[d] -= 1;
                }
            }
        }
    }
    if (0..comps.len()).any(|c| !emitted[c] && !is_zero_class(c)) {
        return Err(Error::internal(
            "domination order has a cycle that survived the cyclic check",
        ));
    }
    let mut zero_comps: Vec<usize> = (0..comps.len()).filter(|&c| is_zero_class(c)).collect();
    zero_comps.sort_by_key(|&c| comps[c][0]);
    order.extend(zero_comps);

    let mut sigma: Vec<Subset> = order
        .iter()
        .map(|&c| comps[c].iter().fold(Subset::EMPTY, |acc, &i| acc.with(i)))
        .collect();
    let covered = sigma.iter().fold(Subset::EMPTY, |acc, b| acc.union(*b));
    let free = players.full().minus(covered);
    if !free.is_empty() {
        sigma.push(free);
    }

    let lambda: Vec<Rational> = (0..players.n())
        .map(|i| {
            forest.potential[i]
                .clone()
                .unwrap_or_else(|| Rational::from_integer(1.into()))
        })
        .collect();
    WeightSystem::new(players.clone(), lambda, sigma)
}

/// Which necessary condition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Contributing,
    Decomposition,
    Nonnegativity,
    GlobalConsistency,
    CyclicConsistency,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Contributing => "contributing",
            Stage::Decomposition => "decomposition",
            Stage::Nonnegativity => "nonnegativity",
            Stage::GlobalConsistency => "global_consistency",
            Stage::CyclicConsistency => "cyclic_consistency",
        }
    }
}

/// Stage-specific failure data. `i`/`j` are the two movers the counterexample
/// game is built around.
#[derive(Clone, Debug)]
pub enum FailWitness {
    Contributing {
        pair: usize,
        subset: Subset,
        player: usize,
        i: usize,
        j: usize,
    },
    Decomposition {
        pair: usize,
        subset: Subset,
        player: usize,
        i: usize,
        j: usize,
    },
    Nonnegativity {
        pair: usize,
        coalition: Subset,
        player: usize,
        i: usize,
        j: usize,
    },
    GlobalConsistency(GlobalWitness),
    CyclicConsistency(CyclicWitness),
}

/// Outcome of [`classify`]: either a certificate (universal weight system
/// plus the per-pair ground welfares it applies to) or the first failed
/// condition with a verified equilibrium-free game.
#[derive(Clone, Debug)]
pub enum Verdict {
    Pass(Certificate),
    Fail(Failure),
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub omega_star: WeightSystem,
    /// Basis of the actual welfare each rule distributes, in pair order.
    pub grounds: Vec<BasisForm>,
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub stage: Stage,
    pub witness: FailWitness,
    pub counterexample: Game,
}

/// Runs the full pipeline. `budget` bounds the verification of generated
/// counterexample games.
pub fn classify(input: &ClassifierInput, budget: u64) -> Result<Verdict, Error> {
    let players = input.players().clone();
    let reduced = reduce_to_budget_balanced(input);
    let grounds: Vec<BasisForm> = reduced.pairs().iter().map(|(w, _)| w.decompose()).collect();

    // contributing conditions, pair by pair
    for (p, (_, rule)) in reduced.pairs().iter().enumerate() {
        if let Some((s, player)) = check_contributing_conditions(&grounds[p], rule) {
            let ns = grounds[p].contributing_players(s);
            let violator = s.minus(ns).members().find(|&m| !rule.eval(m, s).is_zero());
            let (i, j, game) = match violator {
                Some(i) => {
                    // a noncontributing player is paid: two-resource game on
                    // opposed share movements
                    let fi = rule.eval(i, s);
                    let j = s
                        .members()
                        .find(|&m| {
                            m != i
                                && (&fi * (rule.eval(m, s.without(i)) - rule.eval(m, s)))
                                    .is_positive()
                        })
                        .ok_or_else(|| {
                            Error::internal("budget balance guarantees an opposed partner")
                        })?;
                    let game = counterexamples::sign_conflict_game(
                        &input.pairs()[p].0,
                        rule,
                        s,
                        i,
                        j,
                        budget,
                    )?;
                    (i, j, game)
                }
                None => {
                    // shares shift between contributing players when
                    // bystanders are present
                    let i = s
                        .members()
                        .find(|&m| rule.eval(m, s) < rule.eval(m, ns))
                        .ok_or_else(|| Error::internal("some share must drop"))?;
                    let j = s
                        .members()
                        .find(|&m| rule.eval(m, s) > rule.eval(m, ns))
                        .ok_or_else(|| Error::internal("some share must rise"))?;
                    let game = counterexamples::contributing_game(
                        &input.pairs()[p].0,
                        rule,
                        s,
                        i,
                        j,
                        budget,
                    )?;
                    (i, j, game)
                }
            };
            return Ok(Verdict::Fail(Failure {
                stage: Stage::Contributing,
                witness: FailWitness::Contributing {
                    pair: p,
                    subset: s,
                    player,
                    i,
                    j,
                },
                counterexample: game,
            }));
        }
    }

    let analyses: Vec<(BasisForm, BasisRules)> = reduced
        .pairs()
        .iter()
        .zip(&grounds)
        .map(|((_, rule), g)| (g.clone(), construct_basis_rules(g, rule)))
        .collect();

    // decomposition, pair by pair
    for (p, (_, rule)) in reduced.pairs().iter().enumerate() {
        if let Some((s, player)) = check_decomposition(&grounds[p], rule, &analyses[p].1) {
            let over =
                |m: usize| rule.eval(m, s) > reconstructed_share(&grounds[p], &analyses[p].1, m, s);
            let under =
                |m: usize| rule.eval(m, s) < reconstructed_share(&grounds[p], &analyses[p].1, m, s);
            let i = s.members().find(|&m| over(m)).ok_or_else(|| {
                Error::internal("local budget balance guarantees an overpaid player")
            })?;
            let j = s.members().find(|&m| under(m)).ok_or_else(|| {
                Error::internal("local budget balance guarantees an underpaid player")
            })?;
            let ntilde = aggregated_coeffs(&grounds[p], s);
            let game = counterexamples::decomposition_game(
                &input.pairs()[p].0,
                rule,
                s,
                i,
                j,
                &ntilde,
                budget,
            )?;
            return Ok(Verdict::Fail(Failure {
                stage: Stage::Decomposition,
                witness: FailWitness::Decomposition {
                    pair: p,
                    subset: s,
                    player,
                    i,
                    j,
                },
                counterexample: game,
            }));
        }
    }

    // nonnegativity, pair by pair
    for (p, (_, rule)) in reduced.pairs().iter().enumerate() {
        if let Err((t, player)) =
            check_nonnegativity_and_build_local_weights(&players, &analyses[p].1)
        {
            let q = grounds[p].coefficient(t);
            let positive = t
                .members()
                .find(|&m| analyses[p].1.share(t, m).is_positive())
                .ok_or_else(|| Error::internal("basis shares sum to one"))?;
            // movers oriented so q_T f^T(i) < 0 < q_T f^T(j)
            let (i, j) = if q.is_positive() {
                (player, positive)
            } else {
                (positive, player)
            };
            let coeffs = inclusion_exclusion_coeffs(&grounds[p], t);
            let game = counterexamples::nonnegativity_game(
                &input.pairs()[p].0,
                rule,
                t,
                i,
                j,
                &coeffs,
                budget,
            )?;
            return Ok(Verdict::Fail(Failure {
                stage: Stage::Nonnegativity,
                witness: FailWitness::Nonnegativity {
                    pair: p,
                    coalition: t,
                    player,
                    i,
                    j,
                },
                counterexample: game,
            }));
        }
    }

    // cross-pair consistency
    if let Some(witness) = check_global_consistency(&players, &analyses) {
        let (i, j) = (witness.i, witness.j);
        // premise for the generator: a minimal paid coalition versus one that
        // disagrees with it; the reported witness stays the first violation
        let (ps, s_min) = (0..analyses.len())
            .flat_map(|p| {
                let fam: Vec<Subset> = analyses[p]
                    .0
                    .coalitions_with_pair(i, j)
                    .into_iter()
                    .filter(|&t| {
                        analyses[p].1.share(t, i).is_positive()
                            || analyses[p].1.share(t, j).is_positive()
                    })
                    .collect();
                minimal_elements(&fam).into_iter().map(move |t| (p, t))
            })
            .next()
            .ok_or_else(|| Error::internal("a violated pair has paid coalitions"))?;
        let disagrees = |p: usize, t: Subset| {
            analyses[ps].1.share(s_min, i) * analyses[p].1.share(t, j)
                != analyses[p].1.share(t, i) * analyses[ps].1.share(s_min, j)
        };
        let (pt, t_other) = [witness.first, witness.second]
            .into_iter()
            .find(|&(p, t)| (p, t) != (ps, s_min) && disagrees(p, t))
            .ok_or_else(|| Error::internal("one side of a violation disagrees with the minimum"))?;
        // orient so the minimal coalition pays the first mover
        let (mi, mj) = if analyses[ps].1.share(s_min, i).is_positive() {
            (i, j)
        } else {
            (j, i)
        };
        let game = counterexamples::global_consistency_game(
            &input.pairs()[ps].0,
            &reduced.pairs()[ps].1,
            &input.pairs()[pt].0,
            &reduced.pairs()[pt].1,
            mi,
            mj,
            s_min,
            t_other,
            budget,
        )?;
        return Ok(Verdict::Fail(Failure {
            stage: Stage::GlobalConsistency,
            witness: FailWitness::GlobalConsistency(witness),
            counterexample: game,
        }));
    }

    if let Some(witness) = check_cyclic_consistency(&players, &analyses) {
        let pair_refs: Vec<(&WelfareFunction, &DistributionRule)> =
            input.pairs().iter().map(|(w, f)| (w, f)).collect();
        let game = counterexamples::cyclic_consistency_game(
            &pair_refs,
            &witness.cycle,
            &witness.edges,
            budget,
        )?;
        return Ok(Verdict::Fail(Failure {
            stage: Stage::CyclicConsistency,
            witness: FailWitness::CyclicConsistency(witness),
            counterexample: game,
        }));
    }

    let omega_star = build_universal_weight_system(&players, &analyses)?;

    // the certificate must reproduce every rule exactly
    for (p, (w_prime, rule)) in reduced.pairs().iter().enumerate() {
        let certified = DistributionRule::realize(
            RuleSpec::Gwsv {
                omega: omega_star.clone(),
                ground: Some(grounds[p].clone()),
            },
            &players,
            w_prime,
        )?;
        if !certified.same_shares(rule) {
            return Err(Error::internal(format!(
                "certificate fails to reproduce rule {p} pointwise"
            )));
        }
    }

    Ok(Verdict::Pass(Certificate {
        omega_star,
        grounds,
    }))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{frac, int};

    pub(crate) fn example_players() -> PlayerSet {
        PlayerSet::from_labels(&["i", "j", "k", "l"]).unwrap()
    }

    fn sub(ids: &[usize]) -> Subset {
        example_players().subset_of_indices(ids)
    }

    /// The five distribution rules studied alongside the running example
    /// welfare: equal share, two budget-balanced hand-built rules (one
    /// consistent, one with a ratio defect), a third with a cyclic defect,
    /// and marginal contribution.
    pub(crate) fn example_rule(which: usize) -> DistributionRule {
        let p = example_players();
        let w = crate::model::tests::example_welfare();
        let spec = match which {
            1 => RuleSpec::EqualShare,
            5 => RuleSpec::MarginalContribution,
            _ => {
                let rows: &[(&[usize], &[(i64, i64)])] = match which {
                    2 => &[
                        (&[0], &[(5, 1)]),
                        (&[1], &[(3, 1)]),
                        (&[2], &[(0, 1)]),
                        (&[3], &[(3, 1)]),
                        (&[0, 1], &[(4, 1), (2, 1)]),
                        (&[0, 2], &[(4, 1), (-2, 1)]),
                        (&[0, 3], &[(5, 1), (3, 1)]),
                        (&[1, 2], &[(2, 1), (-2, 1)]),
                        (&[1, 3], &[(3, 1), (3, 1)]),
                        (&[2, 3], &[(0, 1), (3, 1)]),
                        (&[0, 1, 2], &[(3, 1), (1, 1), (-4, 1)]),
                        (&[0, 1, 3], &[(3, 1), (1, 1), (3, 1)]),
                        (&[0, 2, 3], &[(4, 1), (-2, 1), (3, 1)]),
                        (&[1, 2, 3], &[(2, 1), (-2, 1), (3, 1)]),
                        (&[0, 1, 2, 3], &[(2, 1), (0, 1), (-4, 1), (3, 1)]),
                    ],
                    3 => &[
                        (&[0], &[(5, 1)]),
                        (&[1], &[(3, 1)]),
                        (&[2], &[(0, 1)]),
                        (&[3], &[(3, 1)]),
                        (&[0, 1], &[(4, 1), (2, 1)]),
                        (&[0, 2], &[(4, 1), (-2, 1)]),
                        (&[0, 3], &[(5, 1), (3, 1)]),
                        (&[1, 2], &[(2, 1), (-2, 1)]),
                        (&[1, 3], &[(3, 1), (3, 1)]),
                        (&[2, 3], &[(0, 1), (3, 1)]),
                        (&[0, 1, 2], &[(3, 1), (1, 1), (-4, 1)]),
                        (&[0, 1, 3], &[(10, 3), (2, 3), (3, 1)]),
                        (&[0, 2, 3], &[(4, 1), (-2, 1), (3, 1)]),
                        (&[1, 2, 3], &[(2, 1), (-2, 1), (3, 1)]),
                        (&[0, 1, 2, 3], &[(7, 3), (-1, 3), (-4, 1), (3, 1)]),
                    ],
                    4 => &[
                        (&[0], &[(5, 1)]),
                        (&[1], &[(3, 1)]),
                        (&[2], &[(0, 1)]),
                        (&[3], &[(3, 1)]),
                        (&[0, 1], &[(4, 1), (2, 1)]),
                        (&[0, 2], &[(4, 1), (-2, 1)]),
                        (&[0, 3], &[(5, 1), (3, 1)]),
                        (&[1, 2], &[(1, 1), (-1, 1)]),
                        (&[1, 3], &[(3, 1), (3, 1)]),
                        (&[2, 3], &[(0, 1), (3, 1)]),
                        (&[0, 1, 2], &[(3, 1), (0, 1), (-3, 1)]),
                        (&[0, 1, 3], &[(3, 1), (1, 1), (3, 1)]),
                        (&[0, 2, 3], &[(4, 1), (-2, 1), (3, 1)]),
                        (&[1, 2, 3], &[(1, 1), (-1, 1), (3, 1)]),
                        (&[0, 1, 2, 3], &[(2, 1), (-1, 1), (-3, 1), (3, 1)]),
                    ],
                    _ => unreachable!(),
                };
                let mut table = BTreeMap::new();
                for (ids, shares) in rows {
                    table.insert(
                        p.subset_of_indices(ids),
                        shares.iter().map(|&(n, d)| frac(n, d)).collect(),
                    );
                }
                RuleSpec::Table(table)
            }
        };
        DistributionRule::realize(spec, &p, &w).unwrap()
    }

    pub(crate) fn example_input(which: usize) -> ClassifierInput {
        let w = crate::model::tests::example_welfare();
        let rule = example_rule(which);
        let pair_welfare = if which == 5 { rule.actual_welfare() } else { w };
        ClassifierInput::new(example_players(), vec![(pair_welfare, rule)]).unwrap()
    }

    #[test]
    fn example_rules_are_budget_balanced_as_stated() {
        let w = crate::model::tests::example_welfare();
        for which in 1..=4 {
            assert!(example_rule(which).is_budget_balanced(&w), "rule {which}");
        }
        assert!(!example_rule(5).is_budget_balanced(&w));
    }

    #[test]
    fn contributing_witness_for_equal_share() {
        let rule = example_rule(1);
        let ground = rule.actual_welfare().decompose();
        let witness = check_contributing_conditions(&ground, &rule);
        assert_eq!(witness, Some((sub(&[2, 3]), 2)));
        assert_eq!(rule.eval(2, sub(&[2, 3])), frac(3, 2));

        for which in [2, 3, 4] {
            let rule = example_rule(which);
            let ground = rule.actual_welfare().decompose();
            assert_eq!(check_contributing_conditions(&ground, &rule), None);
        }
    }

    #[test]
    fn basis_rule_recursion_reproduces_known_rows() {
        let expect_rows: &[(usize, &[usize], &[(i64, i64)])] = &[
            (1, &[0, 1], &[(1, 1), (0, 1)]),
            (1, &[0, 2], &[(4, 3), (-1, 3)]),
            (1, &[1, 2], &[(1, 1), (0, 1)]),
            (1, &[0, 1, 3], &[(1, 3), (1, 3), (1, 3)]),
            (2, &[0, 1], &[(1, 2), (1, 2)]),
            (2, &[0, 2], &[(1, 3), (2, 3)]),
            (2, &[1, 2], &[(1, 3), (2, 3)]),
            (2, &[0, 1, 3], &[(1, 2), (1, 2), (0, 1)]),
            (3, &[0, 1, 3], &[(1, 3), (2, 3), (0, 1)]),
            (4, &[1, 2], &[(2, 3), (1, 3)]),
            (4, &[0, 1, 3], &[(1, 2), (1, 2), (0, 1)]),
            (5, &[0, 1], &[(1, 1), (1, 1)]),
            (5, &[0, 1, 3], &[(1, 1), (1, 1), (1, 1)]),
        ];
        let w = crate::model::tests::example_welfare();
        let ground = w.decompose();
        for which in 1..=5 {
            let rule = example_rule(which);
            let rules = construct_basis_rules(&ground, &rule);
            // singletons always resolve to a unit share
            for ids in [&[0][..], &[1], &[3]] {
                assert_eq!(rules.row(sub(ids)), &[int(1)][..]);
            }
            for (wh, ids, shares) in expect_rows {
                if *wh == which {
                    let row: Vec<Rational> = shares.iter().map(|&(n, d)| frac(n, d)).collect();
                    assert_eq!(rules.row(sub(ids)), &row[..], "rule {which} at {ids:?}");
                }
            }
        }
    }

    #[test]
    fn decomposition_witness_for_equal_share() {
        let rule = example_rule(1);
        let ground = rule.actual_welfare().decompose();
        let rules = construct_basis_rules(&ground, &rule);
        assert_eq!(
            check_decomposition(&ground, &rule, &rules),
            Some((sub(&[0, 3]), 0))
        );
        assert_eq!(rule.eval(0, sub(&[0, 3])), int(4));
        assert_eq!(
            reconstructed_share(&ground, &rules, 0, sub(&[0, 3])),
            int(5)
        );

        for which in [2, 3, 4, 5] {
            let rule = example_rule(which);
            let ground = rule.actual_welfare().decompose();
            let rules = construct_basis_rules(&ground, &rule);
            assert_eq!(check_decomposition(&ground, &rule, &rules), None, "{which}");
        }
    }

    #[test]
    fn nonnegativity_witness_and_local_weights() {
        let p = example_players();
        let w = crate::model::tests::example_welfare();
        let ground = w.decompose();

        let rules1 = construct_basis_rules(&ground, &example_rule(1));
        assert_eq!(
            check_nonnegativity_and_build_local_weights(&p, &rules1),
            Err((sub(&[0, 2]), 2))
        );

        let rules2 = construct_basis_rules(&ground, &example_rule(2));
        let locals = check_nonnegativity_and_build_local_weights(&p, &rules2).unwrap();
        let (_, omega_ijl) = locals.iter().find(|(t, _)| *t == sub(&[0, 1, 3])).unwrap();
        // zero-share player l forms the second block
        assert_eq!(omega_ijl.sigma()[0], sub(&[0, 1]));
        assert_eq!(omega_ijl.sigma()[1], sub(&[3]));
        assert_eq!(omega_ijl.lambda(0), &frac(1, 2));

        // a uniform rule yields uniform local weights
        let shapley = DistributionRule::realize(RuleSpec::Shapley, &p, &w).unwrap();
        let rules_sv = construct_basis_rules(&ground, &shapley);
        for (t, omega) in check_nonnegativity_and_build_local_weights(&p, &rules_sv).unwrap() {
            assert_eq!(omega.sigma()[0], t);
            let first = t.members().next().unwrap();
            for m in t.members() {
                assert_eq!(omega.lambda(m), omega.lambda(first));
            }
        }
    }

    #[test]
    fn inclusion_exclusion_golden() {
        let p = example_players();
        let mut coeffs = BTreeMap::new();
        for ids in [&[0][..], &[0, 1], &[0, 2], &[0, 3], &[0, 1, 2, 3]] {
            coeffs.insert(p.subset_of_indices(ids), int(1));
        }
        let ground = BasisForm::new(p.clone(), coeffs).unwrap();
        let n = inclusion_exclusion_coeffs(&ground, p.full());
        let mut expect = BTreeMap::new();
        expect.insert(p.full(), 1);
        expect.insert(sub(&[0, 1]), -1);
        expect.insert(sub(&[0, 2]), -1);
        expect.insert(sub(&[0, 3]), -1);
        expect.insert(sub(&[0]), 2);
        assert_eq!(n, expect);

        // a minimal coalition isolates itself
        let n_min = inclusion_exclusion_coeffs(&ground, sub(&[0]));
        assert_eq!(n_min, BTreeMap::from([(sub(&[0]), 1)]));
    }

    #[test]
    fn inclusion_exclusion_identity_on_decomposable_rules() {
        // substitute rules that satisfy the decomposition and check the
        // isolation identity q_T f^T(i,T) = sum n_T(T') f(i,T')
        let w = crate::model::tests::example_welfare();
        let ground = w.decompose();
        for which in [2, 4] {
            let rule = example_rule(which);
            let rules = construct_basis_rules(&ground, &rule);
            for t in ground.support() {
                let n = inclusion_exclusion_coeffs(&ground, t);
                for i in t.members() {
                    let mut rhs = Rational::zero();
                    for (tp, c) in &n {
                        rhs += rule.eval(i, *tp) * int(*c as i64);
                    }
                    assert_eq!(ground.coefficient(t) * rules.share(t, i), rhs);
                }
            }
        }
    }

    fn analyses_for(which: usize) -> Vec<(BasisForm, BasisRules)> {
        let rule = example_rule(which);
        let ground = rule.actual_welfare().decompose();
        let rules = construct_basis_rules(&ground, &rule);
        vec![(ground, rules)]
    }

    #[test]
    fn global_consistency_witness() {
        let p = example_players();
        let witness = check_global_consistency(&p, &analyses_for(3)).unwrap();
        assert_eq!(
            witness,
            GlobalWitness {
                i: 0,
                j: 1,
                first: (0, sub(&[0, 1])),
                second: (0, sub(&[0, 1, 3])),
            }
        );
        assert_eq!(check_global_consistency(&p, &analyses_for(2)), None);
        assert_eq!(check_global_consistency(&p, &analyses_for(4)), None);
    }

    #[test]
    fn cyclic_consistency_witness() {
        let p = example_players();
        let witness = check_cyclic_consistency(&p, &analyses_for(4)).unwrap();
        assert_eq!(witness.cycle, vec![0, 1, 2]);
        assert_eq!(
            witness.edges,
            vec![(0, sub(&[0, 1])), (0, sub(&[1, 2])), (0, sub(&[0, 2]))]
        );
        assert_eq!(check_cyclic_consistency(&p, &analyses_for(2)), None);
    }

    #[test]
    fn universal_weight_system_for_the_surviving_rule() {
        let p = example_players();
        let omega = build_universal_weight_system(&p, &analyses_for(2)).unwrap();
        assert_eq!(omega.sigma(), &[sub(&[0, 1, 2]), sub(&[3])]);
        // lambda ratios within the first block: 1 : 1 : 2
        assert_eq!(omega.lambda(1), omega.lambda(0));
        assert_eq!(omega.lambda(2), &(omega.lambda(0) * int(2)));
    }

    #[test]
    fn pipeline_splits_the_example_rules() {
        for (which, expect) in [
            (1, Some(Stage::Contributing)),
            (3, Some(Stage::GlobalConsistency)),
            (4, Some(Stage::CyclicConsistency)),
            (2, None),
            (5, None),
        ] {
            match (classify(&example_input(which), 100_000).unwrap(), expect) {
                (Verdict::Fail(f), Some(stage)) => {
                    assert_eq!(f.stage, stage, "rule {which}");
                    assert!(f.counterexample.find_pne(100_000).unwrap().is_empty());
                }
                (Verdict::Pass(_), None) => {}
                (Verdict::Pass(_), Some(stage)) => {
                    panic!("rule {which} passed but should fail at {stage:?}")
                }
                (Verdict::Fail(f), None) => {
                    panic!("rule {which} failed at {:?} but should pass", f.stage)
                }
            }
        }
    }
}
