//! Distribution rules: who gets how much of a resource's welfare.
//!
//! A rule `f(i, S)` gives player `i`'s share when the players in `S` use the
//! resource; `f(i, S) = 0` whenever `i` is not in `S`. The named families are
//! evaluated through the basis representation of their ground welfare: each
//! support coalition `T` contributes `q_T` times a per-family basis share
//! ([`gwsv_basis_share`], [`gwmc_basis_share`] and their specializations).
//! The closed-form definitions are kept in [`direct`] as an independent
//! cross-check path.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::model::{submasks, BasisForm, PlayerSet, Subset, WelfareFunction};
use crate::rational::Rational;
use crate::Error;

/// Weight system `(lambda, sigma)`: strictly positive player weights plus an
/// ordered partition of the players into priority blocks (earlier blocks have
/// higher priority).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightSystem {
    players: PlayerSet,
    lambda: Vec<Rational>,
    sigma: Vec<Subset>,
}

impl WeightSystem {
    pub fn new(
        players: PlayerSet,
        lambda: Vec<Rational>,
        sigma: Vec<Subset>,
    ) -> Result<Self, Error> {
        if lambda.len() != players.n() {
            return Err(Error::input("weight system needs one lambda per player"));
        }
        if lambda.iter().any(|l| !l.is_positive()) {
            return Err(Error::input("weights must be strictly positive"));
        }
        let mut seen = Subset::EMPTY;
        for block in &sigma {
            if block.is_empty() {
                return Err(Error::input("sigma blocks must be nonempty"));
            }
            if !block.intersect(seen).is_empty() {
                return Err(Error::input("sigma blocks must be disjoint"));
            }
            seen = seen.union(*block);
        }
        if seen != players.full() {
            return Err(Error::input("sigma blocks must cover the player set"));
        }
        Ok(WeightSystem {
            players,
            lambda,
            sigma,
        })
    }

    /// All weights 1, a single priority block.
    pub fn uniform(players: &PlayerSet) -> Self {
        let full = players.full();
        WeightSystem {
            players: players.clone(),
            lambda: vec![Rational::one(); players.n()],
            sigma: vec![full],
        }
    }

    /// Given weights, a single priority block (the weighted-Shapley case).
    pub fn single_block(players: &PlayerSet, lambda: Vec<Rational>) -> Result<Self, Error> {
        let full = players.full();
        Self::new(players.clone(), lambda, vec![full])
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn lambda(&self, i: usize) -> &Rational {
        &self.lambda[i]
    }

    pub fn lambdas(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn sigma(&self) -> &[Subset] {
        &self.sigma
    }

    pub fn block_count(&self) -> usize {
        self.sigma.len()
    }

    /// 0-based index of the block containing player `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.sigma
            .iter()
            .position(|b| b.contains(i))
            .expect("sigma covers all players")
    }

    /// Highest-priority part of `T`: `T` intersected with the first sigma
    /// block it meets. Empty iff `T` is empty.
    pub fn priority_part(&self, t: Subset) -> Subset {
        for block in &self.sigma {
            let cap = t.intersect(*block);
            if !cap.is_empty() {
                return cap;
            }
        }
        Subset::EMPTY
    }

    pub fn lambda_sum(&self, s: Subset) -> Rational {
        s.members().map(|i| self.lambda[i].clone()).sum()
    }

    /// Residual after dropping the first `k - 1` blocks (`k` is 1-based).
    pub fn suffix_set(&self, s: Subset, k: usize) -> Subset {
        let mut out = s;
        for block in &self.sigma[..k - 1] {
            out = out.minus(*block);
        }
        out
    }
}

/// A distribution rule, as a named family with parameters or an explicit
/// table. Named families default their ground welfare to the welfare the rule
/// is attached to.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RuleSpec {
    EqualShare,
    Proportional(Vec<Rational>),
    Shapley,
    WeightedShapley(Vec<Rational>),
    Gwsv {
        omega: WeightSystem,
        ground: Option<BasisForm>,
    },
    MarginalContribution,
    Wmc(Vec<Rational>),
    Gwmc {
        omega: WeightSystem,
        ground: Option<BasisForm>,
    },
    /// Explicit shares per nonempty subset, aligned with the subset's members
    /// in index order. Must be total over `{(i, S) : i in S}`.
    Table(BTreeMap<Subset, Vec<Rational>>),
}

impl RuleSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            RuleSpec::EqualShare => "equal_share",
            RuleSpec::Proportional(_) => "proportional",
            RuleSpec::Shapley => "shapley",
            RuleSpec::WeightedShapley(_) => "weighted_shapley",
            RuleSpec::Gwsv { .. } => "gwsv",
            RuleSpec::MarginalContribution => "mc",
            RuleSpec::Wmc(_) => "wmc",
            RuleSpec::Gwmc { .. } => "gwmc",
            RuleSpec::Table(_) => "table",
        }
    }

    pub fn validate(&self, players: &PlayerSet) -> Result<(), Error> {
        let check_weights = |w: &Vec<Rational>| -> Result<(), Error> {
            if w.len() != players.n() {
                return Err(Error::input("rule weights need one entry per player"));
            }
            if w.iter().any(|x| !x.is_positive()) {
                return Err(Error::input("rule weights must be strictly positive"));
            }
            Ok(())
        };
        match self {
            RuleSpec::EqualShare | RuleSpec::Shapley | RuleSpec::MarginalContribution => Ok(()),
            RuleSpec::Proportional(w) | RuleSpec::WeightedShapley(w) | RuleSpec::Wmc(w) => {
                check_weights(w)
            }
            RuleSpec::Gwsv { omega, ground } | RuleSpec::Gwmc { omega, ground } => {
                if omega.players() != players {
                    return Err(Error::input("weight system is over a different player set"));
                }
                if let Some(g) = ground {
                    if g.players() != players {
                        return Err(Error::input(
                            "ground welfare is over a different player set",
                        ));
                    }
                }
                Ok(())
            }
            RuleSpec::Table(table) => {
                for s in players.subsets() {
                    if s.is_empty() {
                        continue;
                    }
                    match table.get(&s) {
                        Some(row) if row.len() == s.len() => {}
                        Some(_) => {
                            return Err(Error::input(format!(
                                "rule table row for a {}-player subset has the wrong arity",
                                s.len()
                            )))
                        }
                        None => {
                            return Err(Error::input(
                                "rule table must define f(i, S) for every i in S",
                            ))
                        }
                    }
                }
                for t in table.keys() {
                    if t.is_empty() || !t.is_subset_of(players.full()) {
                        return Err(Error::input("rule table key outside the player set"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Basis share of the generalized weighted Shapley value on the unanimity
/// game of `t`: players in the highest-priority part of `t` split the unit in
/// proportion to their weights once all of `t` is present.
pub fn gwsv_basis_share(t: Subset, omega: &WeightSystem, i: usize, s: Subset) -> Rational {
    debug_assert!(!t.is_empty());
    if !t.is_subset_of(s) {
        return Rational::zero();
    }
    let top = omega.priority_part(t);
    if !top.contains(i) {
        return Rational::zero();
    }
    omega.lambda(i) / omega.lambda_sum(top)
}

/// Basis share of the generalized weighted marginal contribution: `lambda_i`
/// for every highest-priority member of `t` once all of `t` is present.
pub fn gwmc_basis_share(t: Subset, omega: &WeightSystem, i: usize, s: Subset) -> Rational {
    debug_assert!(!t.is_empty());
    if !t.is_subset_of(s) {
        return Rational::zero();
    }
    let top = omega.priority_part(t);
    if !top.contains(i) {
        return Rational::zero();
    }
    omega.lambda(i).clone()
}

/// The ground-welfare transform between the two generalized families: `GWSV`
/// on `W'` and `GWMC` on `W''` coincide exactly when the supports match and
/// `q'_T = (sum of lambda over the priority part of T) * q''_T`. This maps
/// `W'` to `W''`; [`gwmc_to_gwsv_ground`] inverts it.
pub fn gwsv_to_gwmc_ground(ground: &BasisForm, omega: &WeightSystem) -> BasisForm {
    let coeffs = ground
        .coeffs()
        .iter()
        .map(|(t, q)| (*t, q / omega.lambda_sum(omega.priority_part(*t))))
        .collect();
    BasisForm::new(ground.players().clone(), coeffs).expect("support unchanged")
}

/// Inverse of [`gwsv_to_gwmc_ground`].
pub fn gwmc_to_gwsv_ground(ground: &BasisForm, omega: &WeightSystem) -> BasisForm {
    let coeffs = ground
        .coeffs()
        .iter()
        .map(|(t, q)| (*t, q * omega.lambda_sum(omega.priority_part(*t))))
        .collect();
    BasisForm::new(ground.players().clone(), coeffs).expect("support unchanged")
}

/// A rule realized as a total share table, ready for exact lookup.
#[derive(Clone, PartialEq, Eq)]
pub struct DistributionRule {
    players: PlayerSet,
    spec: RuleSpec,
    /// Indexed by subset mask; row aligned with the subset's members.
    table: Vec<Vec<Rational>>,
}

impl DistributionRule {
    /// Evaluates the spec against `welfare` (the welfare attached to the
    /// resource; named families without an explicit ground use it) into a
    /// full table.
    pub fn realize(
        spec: RuleSpec,
        players: &PlayerSet,
        welfare: &WelfareFunction,
    ) -> Result<Self, Error> {
        spec.validate(players)?;
        if welfare.players() != players {
            return Err(Error::input("rule and welfare use different player sets"));
        }
        let mut table: Vec<Vec<Rational>> = players
            .subsets()
            .map(|s| vec![Rational::zero(); s.len()])
            .collect();

        // Scatter one coalition's contribution onto every superset row.
        let mut scatter = |t: Subset, shares: &[(usize, Rational)]| {
            let outside = players.full().minus(t).mask();
            for u in submasks(outside) {
                let s = Subset::from_mask(u | t.mask());
                let row = &mut table[s.mask() as usize];
                for (i, v) in shares {
                    row[s.position_of(*i).unwrap()] += v;
                }
            }
        };

        match &spec {
            RuleSpec::EqualShare => {
                for s in players.subsets() {
                    if s.is_empty() {
                        continue;
                    }
                    let share = welfare.value(s) / crate::rational::int(s.len() as i64);
                    table[s.mask() as usize] = vec![share; s.len()];
                }
            }
            RuleSpec::Proportional(w) => {
                for s in players.subsets() {
                    if s.is_empty() {
                        continue;
                    }
                    let denom: Rational = s.members().map(|i| w[i].clone()).sum();
                    table[s.mask() as usize] = s
                        .members()
                        .map(|i| &w[i] / &denom * welfare.value(s))
                        .collect();
                }
            }
            RuleSpec::Shapley => {
                let basis = welfare.decompose();
                for (t, q) in basis.coeffs() {
                    let share = q / crate::rational::int(t.len() as i64);
                    let shares: Vec<(usize, Rational)> =
                        t.members().map(|i| (i, share.clone())).collect();
                    scatter(*t, &shares);
                }
            }
            RuleSpec::WeightedShapley(w) => {
                let basis = welfare.decompose();
                for (t, q) in basis.coeffs() {
                    let denom: Rational = t.members().map(|i| w[i].clone()).sum();
                    let shares: Vec<(usize, Rational)> =
                        t.members().map(|i| (i, q * &w[i] / &denom)).collect();
                    scatter(*t, &shares);
                }
            }
            RuleSpec::Gwsv { omega, ground } => {
                let basis = ground.clone().unwrap_or_else(|| welfare.decompose());
                for (t, q) in basis.coeffs() {
                    let top = omega.priority_part(*t);
                    let denom = omega.lambda_sum(top);
                    let shares: Vec<(usize, Rational)> = top
                        .members()
                        .map(|i| (i, q * omega.lambda(i) / &denom))
                        .collect();
                    scatter(*t, &shares);
                }
            }
            RuleSpec::MarginalContribution => {
                let basis = welfare.decompose();
                for (t, q) in basis.coeffs() {
                    let shares: Vec<(usize, Rational)> =
                        t.members().map(|i| (i, q.clone())).collect();
                    scatter(*t, &shares);
                }
            }
            RuleSpec::Wmc(w) => {
                let basis = welfare.decompose();
                for (t, q) in basis.coeffs() {
                    let shares: Vec<(usize, Rational)> =
                        t.members().map(|i| (i, q * &w[i])).collect();
                    scatter(*t, &shares);
                }
            }
            RuleSpec::Gwmc { omega, ground } => {
                let basis = ground.clone().unwrap_or_else(|| welfare.decompose());
                for (t, q) in basis.coeffs() {
                    let top = omega.priority_part(*t);
                    let shares: Vec<(usize, Rational)> =
                        top.members().map(|i| (i, q * omega.lambda(i))).collect();
                    scatter(*t, &shares);
                }
            }
            RuleSpec::Table(rows) => {
                for (s, row) in rows {
                    table[s.mask() as usize] = row.clone();
                }
            }
        }

        Ok(DistributionRule {
            players: players.clone(),
            spec,
            table,
        })
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn spec(&self) -> &RuleSpec {
        &self.spec
    }

    /// `f(i, S)`; zero whenever `i` is not in `S`.
    pub fn eval(&self, i: usize, s: Subset) -> Rational {
        match s.position_of(i) {
            Some(pos) => self.table[s.mask() as usize][pos].clone(),
            None => Rational::zero(),
        }
    }

    /// Row of shares for `S`, aligned with `S.members()`.
    pub fn row(&self, s: Subset) -> &[Rational] {
        &self.table[s.mask() as usize]
    }

    /// The welfare this rule actually hands out: `W'(S) = sum_{i in S} f(i, S)`.
    pub fn actual_welfare(&self) -> WelfareFunction {
        let values: Vec<Rational> = self.table.iter().map(|row| row.iter().sum()).collect();
        WelfareFunction::from_values(self.players.clone(), values)
            .expect("row sum over the empty set is zero")
    }

    /// True iff shares sum to `W(S)` on every subset.
    pub fn is_budget_balanced(&self, welfare: &WelfareFunction) -> bool {
        self.players
            .subsets()
            .all(|s| &self.table[s.mask() as usize].iter().sum::<Rational>() == welfare.value(s))
    }

    /// Behavioral equality: identical share tables.
    pub fn same_shares(&self, other: &DistributionRule) -> bool {
        self.players == other.players && self.table == other.table
    }
}

impl fmt::Debug for DistributionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DistributionRule({})", self.spec.family_name())
    }
}

/// One-off evaluation of a rule spec at `(i, S)`.
pub fn eval_rule(
    spec: &RuleSpec,
    welfare: &WelfareFunction,
    i: usize,
    s: Subset,
) -> Result<Rational, Error> {
    Ok(DistributionRule::realize(spec.clone(), welfare.players(), welfare)?.eval(i, s))
}

/// Closed-form definitions of the rule families, kept as an independent
/// cross-check of the basis evaluation path.
pub mod direct {
    use super::*;

    pub fn equal_share(w: &WelfareFunction, i: usize, s: Subset) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        w.value(s) / crate::rational::int(s.len() as i64)
    }

    pub fn proportional(
        w: &WelfareFunction,
        weights: &[Rational],
        i: usize,
        s: Subset,
    ) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        let denom: Rational = s.members().map(|j| weights[j].clone()).sum();
        &weights[i] / &denom * w.value(s)
    }

    /// Average marginal contribution over all arrival orders, via the
    /// `|T|! (|S|-|T|-1)! / |S|!` coefficients.
    pub fn shapley(w: &WelfareFunction, i: usize, s: Subset) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        let fact = |k: usize| -> Rational {
            let mut f = Rational::one();
            for x in 1..=k {
                f *= crate::rational::int(x as i64);
            }
            f
        };
        let total_orders = fact(s.len());
        let mut out = Rational::zero();
        for m in submasks(s.without(i).mask()) {
            let t = Subset::from_mask(m);
            let coeff = fact(t.len()) * fact(s.len() - t.len() - 1) / &total_orders;
            out += coeff * (w.value(t.with(i)) - w.value(t));
        }
        out
    }

    pub fn weighted_shapley(
        w: &WelfareFunction,
        weights: &[Rational],
        i: usize,
        s: Subset,
    ) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        let basis = w.decompose();
        let mut out = Rational::zero();
        for (t, q) in basis.coeffs() {
            if t.contains(i) && t.is_subset_of(s) {
                let denom: Rational = t.members().map(|j| weights[j].clone()).sum();
                out += q * &weights[i] / denom;
            }
        }
        out
    }

    pub fn gwsv(w: &WelfareFunction, omega: &WeightSystem, i: usize, s: Subset) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        let basis = w.decompose();
        let mut out = Rational::zero();
        for (t, q) in basis.coeffs() {
            if t.is_subset_of(s) {
                let top = omega.priority_part(*t);
                if top.contains(i) {
                    out += q * omega.lambda(i) / omega.lambda_sum(top);
                }
            }
        }
        out
    }

    pub fn marginal_contribution(w: &WelfareFunction, i: usize, s: Subset) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        w.value(s) - w.value(s.without(i))
    }

    pub fn wmc(w: &WelfareFunction, weights: &[Rational], i: usize, s: Subset) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        &weights[i] * (w.value(s) - w.value(s.without(i)))
    }

    pub fn gwmc(w: &WelfareFunction, omega: &WeightSystem, i: usize, s: Subset) -> Rational {
        if !s.contains(i) {
            return Rational::zero();
        }
        let k = omega.block_of(i) + 1;
        let residual = omega.suffix_set(s, k);
        omega.lambda(i) * (w.value(residual) - w.value(residual.without(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn players(labels: &[&str]) -> PlayerSet {
        PlayerSet::from_labels(labels).unwrap()
    }

    fn sub(p: &PlayerSet, ids: &[usize]) -> Subset {
        p.subset_of_indices(ids)
    }

    /// 3-player welfare used for the Shapley goldens.
    fn three_player_welfare() -> WelfareFunction {
        let p = players(&["i", "j", "k"]);
        let mut map = BTreeMap::new();
        for (ids, v) in [
            (vec![0], 1),
            (vec![1], 2),
            (vec![2], 3),
            (vec![0, 1], 3),
            (vec![1, 2], 3),
            (vec![0, 2], 3),
            (vec![0, 1, 2], 4),
        ] {
            map.insert(p.subset_of_indices(&ids), int(v));
        }
        WelfareFunction::from_map(p, &map).unwrap()
    }

    fn random_welfare(rng: &mut StdRng, n: usize) -> WelfareFunction {
        let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let p = PlayerSet::new(labels).unwrap();
        let mut values = vec![int(0)];
        for _ in 1..p.subset_count() {
            values.push(int(rng.gen_range(-9..=9)));
        }
        WelfareFunction::from_values(p, values).unwrap()
    }

    fn random_omega(rng: &mut StdRng, p: &PlayerSet) -> WeightSystem {
        let lambda: Vec<Rational> = (0..p.n())
            .map(|_| frac(rng.gen_range(1..=6), rng.gen_range(1..=3)))
            .collect();
        let blocks = rng.gen_range(1..=p.n().min(3));
        let mut sigma = vec![Subset::EMPTY; blocks];
        for i in 0..p.n() {
            let b = rng.gen_range(0..blocks);
            sigma[b] = sigma[b].with(i);
        }
        sigma.retain(|b| !b.is_empty());
        WeightSystem::new(p.clone(), lambda, sigma).unwrap()
    }

    fn random_basis(rng: &mut StdRng, p: &PlayerSet) -> BasisForm {
        let mut coeffs = BTreeMap::new();
        for s in p.subsets() {
            if s.is_empty() {
                continue;
            }
            if rng.gen_bool(0.4) {
                let mut v = 0;
                while v == 0 {
                    v = rng.gen_range(-6..=6);
                }
                coeffs.insert(s, int(v));
            }
        }
        if coeffs.is_empty() {
            coeffs.insert(Subset::singleton(0), int(1));
        }
        BasisForm::new(p.clone(), coeffs).unwrap()
    }

    #[test]
    fn shapley_golden_three_players() {
        let w = three_player_welfare();
        let p = w.players().clone();
        let rule = DistributionRule::realize(RuleSpec::Shapley, &p, &w).unwrap();
        let grand = p.full();
        assert_eq!(rule.eval(0, grand), frac(5, 6));
        assert_eq!(rule.eval(1, grand), frac(4, 3));
        assert_eq!(rule.eval(2, grand), frac(11, 6));
        // singleton budget balance
        assert_eq!(rule.eval(0, sub(&p, &[0])), int(1));
    }

    #[test]
    fn marginal_contribution_golden() {
        let w = crate::model::tests::example_welfare();
        let p = w.players().clone();
        let rule = DistributionRule::realize(RuleSpec::MarginalContribution, &p, &w).unwrap();
        let s = sub(&p, &[0, 1, 2]);
        assert_eq!(rule.eval(0, s), int(0));
        assert_eq!(rule.eval(1, s), int(-2));
        assert_eq!(rule.eval(2, s), int(-6));
    }

    /// Independent oracle: average marginal contribution over every arrival
    /// order of `S`.
    pub(crate) fn permutation_shapley(w: &WelfareFunction, i: usize, s: Subset) -> Rational {
        fn orders(members: &[usize]) -> Vec<Vec<usize>> {
            if members.is_empty() {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for (k, &m) in members.iter().enumerate() {
                let mut rest = members.to_vec();
                rest.remove(k);
                for mut tail in orders(&rest) {
                    tail.insert(0, m);
                    out.push(tail);
                }
            }
            out
        }
        if !s.contains(i) {
            return Rational::zero();
        }
        let members: Vec<usize> = s.members().collect();
        let all = orders(&members);
        let mut total = Rational::zero();
        for order in &all {
            let mut before = Subset::EMPTY;
            for &m in order {
                if m == i {
                    break;
                }
                before = before.with(m);
            }
            total += w.value(before.with(i)) - w.value(before);
        }
        total / int(all.len() as i64)
    }

    #[test]
    fn shapley_matches_permutation_oracle() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..20 {
            let w = random_welfare(&mut rng, 4);
            let p = w.players().clone();
            let rule = DistributionRule::realize(RuleSpec::Shapley, &p, &w).unwrap();
            for s in p.subsets() {
                for i in s.members() {
                    assert_eq!(rule.eval(i, s), permutation_shapley(&w, i, s));
                }
            }
        }
    }

    #[test]
    fn gwsv_basis_share_examples() {
        let p = players(&["i", "j", "k", "l"]);
        let uniform = WeightSystem::uniform(&p);
        let t = sub(&p, &[0, 1]);
        assert_eq!(gwsv_basis_share(t, &uniform, 0, t), frac(1, 2));
        assert_eq!(gwsv_basis_share(t, &uniform, 0, sub(&p, &[0])), int(0));

        // two priority blocks: only the top part of T is paid
        let omega = WeightSystem::new(
            p.clone(),
            vec![frac(1, 2), frac(1, 2), int(1), int(1)],
            vec![sub(&p, &[0, 1, 2]), sub(&p, &[3])],
        )
        .unwrap();
        let t = sub(&p, &[0, 1, 3]);
        let s = p.full();
        assert_eq!(gwsv_basis_share(t, &omega, 0, s), frac(1, 2));
        assert_eq!(gwsv_basis_share(t, &omega, 3, s), int(0));
    }

    #[test]
    fn gwmc_basis_share_examples() {
        let p = players(&["i", "j", "k"]);
        let uniform = WeightSystem::uniform(&p);
        let t = sub(&p, &[0, 2]);
        assert_eq!(gwmc_basis_share(t, &uniform, 0, p.full()), int(1));

        let omega = WeightSystem::new(
            p.clone(),
            vec![int(2), int(1), int(1)],
            vec![sub(&p, &[0]), sub(&p, &[1, 2])],
        )
        .unwrap();
        // k is in T but below the top priority part {i}
        assert_eq!(gwmc_basis_share(t, &omega, 2, p.full()), int(0));
        assert_eq!(gwmc_basis_share(t, &omega, 0, p.full()), int(2));
    }

    #[test]
    fn gwmc_is_lambda_scaled_gwsv() {
        let mut rng = StdRng::seed_from_u64(22);
        for _ in 0..10 {
            let p = players(&["a", "b", "c", "d"]);
            let omega = random_omega(&mut rng, &p);
            for t in p.subsets() {
                if t.is_empty() {
                    continue;
                }
                let scale = omega.lambda_sum(omega.priority_part(t));
                for s in p.subsets() {
                    for i in 0..p.n() {
                        assert_eq!(
                            gwmc_basis_share(t, &omega, i, s),
                            &scale * gwsv_basis_share(t, &omega, i, s)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gwsv_basis_shares_are_budget_balanced_and_nonnegative() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..10 {
            let p = players(&["a", "b", "c", "d"]);
            let omega = random_omega(&mut rng, &p);
            for t in p.subsets() {
                if t.is_empty() {
                    continue;
                }
                let total: Rational = t.members().map(|i| gwsv_basis_share(t, &omega, i, t)).sum();
                assert_eq!(total, int(1));
                for s in p.subsets() {
                    for i in 0..p.n() {
                        assert!(!gwsv_basis_share(t, &omega, i, s).is_negative());
                    }
                }
            }
        }
    }

    #[test]
    fn actual_welfare_of_marginal_contribution() {
        let w = crate::model::tests::example_welfare();
        let p = w.players().clone();
        let rule = DistributionRule::realize(RuleSpec::MarginalContribution, &p, &w).unwrap();
        let wp = rule.actual_welfare();
        assert_eq!(wp.value(p.full()), &int(-11));
        assert_eq!(wp.value(sub(&p, &[0, 2])), &int(-1));
    }

    #[test]
    fn budget_balance_checks() {
        let w = crate::model::tests::example_welfare();
        let p = w.players().clone();
        let eq = DistributionRule::realize(RuleSpec::EqualShare, &p, &w).unwrap();
        assert!(eq.is_budget_balanced(&w));
        let mc = DistributionRule::realize(RuleSpec::MarginalContribution, &p, &w).unwrap();
        assert!(!mc.is_budget_balanced(&w));
        assert!(mc.is_budget_balanced(&mc.actual_welfare()));

        let mut rng = StdRng::seed_from_u64(24);
        for _ in 0..10 {
            let p = players(&["a", "b", "c", "d"]);
            let ground = random_basis(&mut rng, &p);
            let omega = random_omega(&mut rng, &p);
            let w = ground.to_welfare();
            let rule = DistributionRule::realize(
                RuleSpec::Gwsv {
                    omega,
                    ground: Some(ground),
                },
                &p,
                &w,
            )
            .unwrap();
            assert!(rule.is_budget_balanced(&w));
        }
    }

    #[test]
    fn actual_welfare_matches_row_sums_on_random_tables() {
        let mut rng = StdRng::seed_from_u64(25);
        let p = players(&["a", "b", "c"]);
        let mut table = BTreeMap::new();
        for s in p.subsets() {
            if s.is_empty() {
                continue;
            }
            table.insert(
                s,
                (0..s.len()).map(|_| int(rng.gen_range(-5..=5))).collect(),
            );
        }
        let zero = WelfareFunction::from_map(p.clone(), &BTreeMap::new()).unwrap();
        let rule = DistributionRule::realize(RuleSpec::Table(table.clone()), &p, &zero).unwrap();
        let wp = rule.actual_welfare();
        for (s, row) in &table {
            let total: Rational = row.iter().sum();
            assert_eq!(wp.value(*s), &total);
        }
    }

    #[test]
    fn ground_transform_uniform_divides_by_coalition_size() {
        let p = players(&["a", "b", "c"]);
        let mut rng = StdRng::seed_from_u64(26);
        let b = random_basis(&mut rng, &p);
        let uniform = WeightSystem::uniform(&p);
        let mapped = gwsv_to_gwmc_ground(&b, &uniform);
        for (t, q) in b.coeffs() {
            assert_eq!(mapped.coefficient(*t), q / int(t.len() as i64));
        }
        assert_eq!(gwmc_to_gwsv_ground(&mapped, &uniform), b);
    }

    #[test]
    fn mc_ground_recovers_actual_welfare_under_inverse_transform() {
        // mc on W is the Shapley value on W' = actual welfare; equivalently
        // applying the inverse transform (uniform weights) to W recovers W'.
        let w = crate::model::tests::example_welfare();
        let p = w.players().clone();
        let uniform = WeightSystem::uniform(&p);
        let mc = DistributionRule::realize(RuleSpec::MarginalContribution, &p, &w).unwrap();
        let w_prime = mc.actual_welfare();
        assert_eq!(
            gwmc_to_gwsv_ground(&w.decompose(), &uniform),
            w_prime.decompose()
        );
        let sv_on_prime = DistributionRule::realize(RuleSpec::Shapley, &p, &w_prime).unwrap();
        assert!(mc.same_shares(&sv_on_prime));
    }

    #[test]
    fn gwsv_equals_gwmc_on_transformed_ground() {
        let mut rng = StdRng::seed_from_u64(27);
        for _ in 0..20 {
            let p = players(&["a", "b", "c", "d"]);
            let ground = random_basis(&mut rng, &p);
            let omega = random_omega(&mut rng, &p);
            let w = ground.to_welfare();
            let sv = DistributionRule::realize(
                RuleSpec::Gwsv {
                    omega: omega.clone(),
                    ground: Some(ground.clone()),
                },
                &p,
                &w,
            )
            .unwrap();
            let mc = DistributionRule::realize(
                RuleSpec::Gwmc {
                    omega: omega.clone(),
                    ground: Some(gwsv_to_gwmc_ground(&ground, &omega)),
                },
                &p,
                &w,
            )
            .unwrap();
            assert!(sv.same_shares(&mc));
        }
    }

    #[test]
    fn family_coherence_with_trivial_partitions() {
        let mut rng = StdRng::seed_from_u64(28);
        for n in 1..=5usize {
            let w = random_welfare(&mut rng, n);
            let p = w.players().clone();
            let shapley = DistributionRule::realize(RuleSpec::Shapley, &p, &w).unwrap();
            let gwsv_uniform = DistributionRule::realize(
                RuleSpec::Gwsv {
                    omega: WeightSystem::uniform(&p),
                    ground: None,
                },
                &p,
                &w,
            )
            .unwrap();
            assert!(shapley.same_shares(&gwsv_uniform));

            let mc = DistributionRule::realize(RuleSpec::MarginalContribution, &p, &w).unwrap();
            let gwmc_uniform = DistributionRule::realize(
                RuleSpec::Gwmc {
                    omega: WeightSystem::uniform(&p),
                    ground: None,
                },
                &p,
                &w,
            )
            .unwrap();
            assert!(mc.same_shares(&gwmc_uniform));

            let weights: Vec<Rational> = (0..n).map(|_| frac(rng.gen_range(1..=5), 2)).collect();
            let wsv = DistributionRule::realize(RuleSpec::WeightedShapley(weights.clone()), &p, &w)
                .unwrap();
            let gwsv_single = DistributionRule::realize(
                RuleSpec::Gwsv {
                    omega: WeightSystem::single_block(&p, weights).unwrap(),
                    ground: None,
                },
                &p,
                &w,
            )
            .unwrap();
            assert!(wsv.same_shares(&gwsv_single));
        }
    }

    #[test]
    fn direct_formulas_agree_with_basis_path() {
        let mut rng = StdRng::seed_from_u64(29);
        for n in 2..=5usize {
            let w = random_welfare(&mut rng, n);
            let p = w.players().clone();
            let omega = random_omega(&mut rng, &p);
            let weights: Vec<Rational> = (0..n).map(|_| frac(rng.gen_range(1..=5), 3)).collect();

            let realized = [
                (
                    DistributionRule::realize(RuleSpec::EqualShare, &p, &w).unwrap(),
                    0,
                ),
                (
                    DistributionRule::realize(RuleSpec::Proportional(weights.clone()), &p, &w)
                        .unwrap(),
                    1,
                ),
                (
                    DistributionRule::realize(RuleSpec::Shapley, &p, &w).unwrap(),
                    2,
                ),
                (
                    DistributionRule::realize(RuleSpec::WeightedShapley(weights.clone()), &p, &w)
                        .unwrap(),
                    3,
                ),
                (
                    DistributionRule::realize(
                        RuleSpec::Gwsv {
                            omega: omega.clone(),
                            ground: None,
                        },
                        &p,
                        &w,
                    )
                    .unwrap(),
                    4,
                ),
                (
                    DistributionRule::realize(RuleSpec::MarginalContribution, &p, &w).unwrap(),
                    5,
                ),
                (
                    DistributionRule::realize(RuleSpec::Wmc(weights.clone()), &p, &w).unwrap(),
                    6,
                ),
                (
                    DistributionRule::realize(
                        RuleSpec::Gwmc {
                            omega: omega.clone(),
                            ground: None,
                        },
                        &p,
                        &w,
                    )
                    .unwrap(),
                    7,
                ),
            ];
            for s in p.subsets() {
                for i in 0..n {
                    for (rule, which) in &realized {
                        let expect = match which {
                            0 => direct::equal_share(&w, i, s),
                            1 => direct::proportional(&w, &weights, i, s),
                            2 => direct::shapley(&w, i, s),
                            3 => direct::weighted_shapley(&w, &weights, i, s),
                            4 => direct::gwsv(&w, &omega, i, s),
                            5 => direct::marginal_contribution(&w, i, s),
                            6 => direct::wmc(&w, &weights, i, s),
                            _ => direct::gwmc(&w, &omega, i, s),
                        };
                        assert_eq!(rule.eval(i, s), expect, "family {which} at {s:?}/{i}");
                    }
                }
            }
        }
    }

    #[test]
    fn weight_system_validation() {
        let p = players(&["a", "b"]);
        assert!(WeightSystem::new(p.clone(), vec![int(1)], vec![p.full()]).is_err());
        assert!(WeightSystem::new(p.clone(), vec![int(1), int(0)], vec![p.full()]).is_err());
        assert!(WeightSystem::new(
            p.clone(),
            vec![int(1), int(1)],
            vec![sub(&p, &[0]), sub(&p, &[0, 1])]
        )
        .is_err());
        assert!(WeightSystem::new(p.clone(), vec![int(1), int(1)], vec![sub(&p, &[0])]).is_err());
        assert!(WeightSystem::new(
            p,
            vec![int(1), int(1)],
            vec![Subset::EMPTY, Subset::from_mask(3)]
        )
        .is_err());
    }

    #[test]
    fn rule_table_must_be_total() {
        let p = players(&["a", "b"]);
        let zero = WelfareFunction::from_map(p.clone(), &BTreeMap::new()).unwrap();
        let mut table = BTreeMap::new();
        table.insert(sub(&p, &[0]), vec![int(1)]);
        assert!(DistributionRule::realize(RuleSpec::Table(table), &p, &zero).is_err());
    }

    #[test]
    fn eval_rule_is_zero_off_subset() {
        let w = three_player_welfare();
        assert_eq!(
            eval_rule(&RuleSpec::EqualShare, &w, 0, Subset::EMPTY).unwrap(),
            int(0)
        );
        assert_eq!(
            eval_rule(&RuleSpec::Shapley, &w, 2, Subset::singleton(0)).unwrap(),
            int(0)
        );
    }
}
