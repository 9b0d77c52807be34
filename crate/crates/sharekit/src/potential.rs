//! Vector-valued potential functions for games built from the generalized
//! weighted Shapley / marginal-contribution families.
//!
//! With a weight system of `m` priority blocks, each resource has a local
//! potential `phi(S)` in `Q^m`. Writing `residual_k(S)` for `S` minus the
//! first `k - 1` blocks, component `k` of `phi(S)` is the GWMC-ground welfare
//! evaluated at `residual_{m-k+1}(S)`; so component 1 is the deepest residual
//! and is the most significant one when profiles are ranked by potential. The
//! same vector satisfies a recursion in terms of the GWSV ground, which
//! [`local_potential_recursive`] implements as an independent route.
//!
//! The global potential sums local potentials (times multiplicities) over
//! resources; it tracks every unilateral utility change through the
//! deviator's weight, which [`verify_potential_property`] checks exhaustively.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::Zero;

use crate::game::{ActionProfile, Game};
use crate::model::{BasisForm, Subset};
use crate::rational::Rational;
use crate::rules::{gwsv_to_gwmc_ground, RuleSpec, WeightSystem};
use crate::Error;

/// Local or global potential value; fixed length `m` per weight system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialVector(pub Vec<Rational>);

impl PotentialVector {
    pub fn zero(m: usize) -> Self {
        PotentialVector(vec![Rational::zero(); m])
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    /// Ranking used for potential maximization: component 1 first.
    pub fn lex_cmp(&self, other: &PotentialVector) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Index of the first nonzero component of `self - other`, with the
    /// difference at that index.
    pub fn first_difference(&self, other: &PotentialVector) -> Option<(usize, Rational)> {
        for (k, (a, b)) in self.0.iter().zip(&other.0).enumerate() {
            if a != b {
                return Some((k, a - b));
            }
        }
        None
    }
}

/// Closed form: component `k` (1-based) is `ground_mc(residual_{m-k+1}(S))`.
pub fn local_potential_closed(
    ground_mc: &BasisForm,
    omega: &WeightSystem,
    s: Subset,
) -> PotentialVector {
    let m = omega.block_count();
    let mut out = Vec::with_capacity(m);
    for k in 1..=m {
        out.push(ground_mc.evaluate(omega.suffix_set(s, m - k + 1)));
    }
    PotentialVector(out)
}

/// Recursive form in terms of the GWSV ground: with `L = sum of lambda over
/// S` and `N_k` the ground evaluated at `residual_{m-k+1}(S)` with each
/// coalition's coefficient rescaled by `lambda(T) / lambda(priority part of
/// T)`, component `k` of `phi(S)` is `(N_k + sum_i lambda_i * phi_k(S - i)) /
/// L`, anchored at `phi(empty) = 0`.
///
/// With a single priority block the rescaling factor is 1 and `N_k` is just
/// the ground welfare of the residual (the weighted-Shapley recursion); the
/// rescaling is what keeps the recursion consistent with
/// [`local_potential_closed`] when a contributing coalition spans blocks.
pub fn local_potential_recursive(
    ground_sv: &BasisForm,
    omega: &WeightSystem,
    s: Subset,
) -> PotentialVector {
    let m = omega.block_count();

    // ground with q_T scaled by lambda(T) / lambda(priority part of T)
    let adjusted = {
        let coeffs = ground_sv
            .coeffs()
            .iter()
            .map(|(t, q)| {
                let scale = omega.lambda_sum(*t) / omega.lambda_sum(omega.priority_part(*t));
                (*t, q * scale)
            })
            .collect();
        BasisForm::new(ground_sv.players().clone(), coeffs).expect("support unchanged")
    };

    let mut memo: HashMap<u32, Vec<Rational>> = HashMap::new();
    memo.insert(0, vec![Rational::zero(); m]);

    // subsets of s by ascending size so predecessors are always ready
    let mut order: Vec<Subset> = crate::model::submasks(s.mask())
        .map(Subset::from_mask)
        .collect();
    order.sort();

    for r in order {
        if r.is_empty() {
            continue;
        }
        let total_lambda = omega.lambda_sum(r);
        let mut vec_k = Vec::with_capacity(m);
        for k in 1..=m {
            let mut acc = adjusted.evaluate(omega.suffix_set(r, m - k + 1));
            for i in r.members() {
                acc += omega.lambda(i) * &memo[&r.without(i).mask()][k - 1];
            }
            vec_k.push(acc / &total_lambda);
        }
        memo.insert(r.mask(), vec_k);
    }
    PotentialVector(memo.remove(&s.mask()).expect("s is in its own submask set"))
}

/// Per-resource potential data for a game under one weight system.
pub struct GamePotential<'g> {
    game: &'g Game,
    omega: WeightSystem,
    /// GWMC ground per resource, derived from the welfare the rule actually
    /// distributes.
    grounds: Vec<BasisForm>,
}

impl<'g> GamePotential<'g> {
    /// Derives each resource's ground from its realized rule. No restriction
    /// on rule families: for GWSV/GWMC-family rules under `omega` this is
    /// exactly their declared ground, and the potential property holds; for
    /// anything else the property check will fail on some deviation.
    pub fn prepare(game: &'g Game, omega: &WeightSystem) -> Result<Self, Error> {
        if omega.players() != game.players() {
            return Err(Error::input("weight system over a different player set"));
        }
        let mut grounds = Vec::with_capacity(game.resources().len());
        for r in 0..game.resources().len() {
            let w_prime = game.realized_rule(r).actual_welfare().decompose();
            grounds.push(gwsv_to_gwmc_ground(&w_prime, omega));
        }
        Ok(GamePotential {
            game,
            omega: omega.clone(),
            grounds,
        })
    }

    pub fn value(&self, profile: &ActionProfile) -> PotentialVector {
        let m = self.omega.block_count();
        let mut total = PotentialVector::zero(m);
        for (r, res) in self.game.resources().iter().enumerate() {
            let occ = self.game.occupancy(profile, r);
            let local = local_potential_closed(&self.grounds[r], &self.omega, occ);
            let v = crate::rational::int(res.multiplicity as i64);
            for k in 0..m {
                total.0[k] += &local.0[k] * &v;
            }
        }
        total
    }
}

/// Checks that every resource rule is a GWSV/GWMC-family member whose
/// effective weight system matches `omega`: same priority blocks, weights
/// proportional within each block.
fn omega_compatible(spec: &RuleSpec, omega: &WeightSystem) -> bool {
    let single_uniform =
        || omega.block_count() == 1 && omega.lambdas().iter().all(|l| l == omega.lambda(0));
    let single_proportional = |w: &[Rational]| {
        omega.block_count() == 1 && {
            let r0 = omega.lambda(0) / &w[0];
            (1..w.len()).all(|i| omega.lambda(i) / &w[i] == r0)
        }
    };
    match spec {
        RuleSpec::Shapley | RuleSpec::MarginalContribution => single_uniform(),
        RuleSpec::WeightedShapley(w) | RuleSpec::Wmc(w) => single_proportional(w),
        RuleSpec::Gwsv { omega: o, .. } | RuleSpec::Gwmc { omega: o, .. } => {
            o.sigma() == omega.sigma()
                && omega.sigma().iter().all(|block| {
                    let mut members = block.members();
                    let first = members.next().expect("blocks nonempty");
                    let r0 = omega.lambda(first) / o.lambda(first);
                    members.all(|i| omega.lambda(i) / o.lambda(i) == r0)
                })
        }
        _ => false,
    }
}

/// Global potential of a profile. Rejects games whose rules are not
/// GWSV/GWMC-family members compatible with `omega`.
pub fn global_potential(
    game: &Game,
    omega: &WeightSystem,
    profile: &ActionProfile,
) -> Result<PotentialVector, Error> {
    for (r, res) in game.resources().iter().enumerate() {
        let spec = &game.rules()[res.rule].1;
        if !omega_compatible(spec, omega) {
            return Err(Error::input(format!(
                "resource {:?} has a rule ({}) incompatible with the given weight system",
                game.resources()[r].id,
                spec.family_name()
            )));
        }
    }
    Ok(GamePotential::prepare(game, omega)?.value(profile))
}

/// A deviation where the potential property fails.
#[derive(Clone, Debug)]
pub struct PropertyViolation {
    pub profile: ActionProfile,
    pub player: usize,
    pub alternative: usize,
    pub utility_diff: Rational,
    pub expected: Rational,
}

/// Exhaustively checks the defining property of a generalized weighted
/// potential. A deviation by a player in priority block `k` can only register
/// at component `m - k + 1` (its deeper components are out of the player's
/// reach and must stay fixed); the check is that those unreachable components
/// are indeed unchanged and that the utility change equals the deviator's
/// weight times the potential change at the player's own component. In
/// particular a zero utility change must pair with a zero potential change on
/// every component the player can reach.
///
/// Returns `None` when the property holds, else the first violation in scan
/// order (profiles lexicographic, players ascending, alternatives ascending).
pub fn verify_potential_property(
    game: &Game,
    omega: &WeightSystem,
    budget: u64,
) -> Result<Option<PropertyViolation>, Error> {
    let ctx = GamePotential::prepare(game, omega)?;
    let profiles = game.profiles(budget)?;
    let mut phi: HashMap<ActionProfile, PotentialVector> = HashMap::new();
    for p in &profiles {
        phi.insert(p.clone(), ctx.value(p));
    }
    let m = omega.block_count();
    for p in &profiles {
        for i in 0..game.players().n() {
            let own = m - omega.block_of(i) - 1; // 0-based component m - k + 1
            let u_here = game.utility(p, i);
            for alt in 0..game.actions()[i].len() {
                if alt == p[i] {
                    continue;
                }
                let mut q = p.clone();
                q[i] = alt;
                let du = game.utility(&q, i) - &u_here;
                let before = &phi[p].0;
                let after = &phi[&q].0;
                let untouched = (0..own).all(|c| before[c] == after[c]);
                let expected = omega.lambda(i) * (&after[own] - &before[own]);
                if !untouched || du != expected {
                    return Ok(Some(PropertyViolation {
                        profile: p.clone(),
                        player: i,
                        alternative: alt,
                        utility_diff: du,
                        expected,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Profile maximizing the potential in [`PotentialVector::lex_cmp`] order;
/// ties broken by enumeration order.
pub fn potential_argmax(
    game: &Game,
    omega: &WeightSystem,
    budget: u64,
) -> Result<ActionProfile, Error> {
    let ctx = GamePotential::prepare(game, omega)?;
    let mut best: Option<(ActionProfile, PotentialVector)> = None;
    for p in game.profiles(budget)? {
        let v = ctx.value(&p);
        match &best {
            Some((_, vb)) if v.lex_cmp(vb) != Ordering::Greater => {}
            _ => best = Some((p, v)),
        }
    }
    Ok(best.expect("games have at least one profile").0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PlayerSet, WelfareFunction};
    use crate::rational::{frac, int};
    use crate::rules::gwmc_to_gwsv_ground;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeMap;

    fn players(labels: &[&str]) -> PlayerSet {
        PlayerSet::from_labels(labels).unwrap()
    }

    fn random_basis(rng: &mut StdRng, p: &PlayerSet) -> BasisForm {
        let mut coeffs = BTreeMap::new();
        for s in p.subsets() {
            if !s.is_empty() && rng.gen_bool(0.45) {
                let mut v = 0;
                while v == 0 {
                    v = rng.gen_range(-5..=5);
                }
                coeffs.insert(s, int(v));
            }
        }
        if coeffs.is_empty() {
            coeffs.insert(Subset::singleton(0), int(2));
        }
        BasisForm::new(p.clone(), coeffs).unwrap()
    }

    fn random_omega(rng: &mut StdRng, p: &PlayerSet) -> WeightSystem {
        let lambda: Vec<Rational> = (0..p.n())
            .map(|_| frac(rng.gen_range(1..=5), rng.gen_range(1..=2)))
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

    #[test]
    fn closed_form_single_block_is_ground_value() {
        let p = players(&["a", "b"]);
        let mut rng = StdRng::seed_from_u64(31);
        let ground = random_basis(&mut rng, &p);
        let omega = WeightSystem::uniform(&p);
        for s in p.subsets() {
            let phi = local_potential_closed(&ground, &omega, s);
            assert_eq!(phi.components(), &[ground.evaluate(s)]);
        }
    }

    #[test]
    fn closed_form_components_follow_residuals() {
        let p = players(&["i", "j", "k", "l"]);
        let omega = WeightSystem::new(
            p.clone(),
            vec![int(1), int(1), int(1), int(1)],
            vec![p.subset_of_indices(&[0, 1, 2]), p.subset_of_indices(&[3])],
        )
        .unwrap();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(p.subset_of_indices(&[0]), int(4));
        coeffs.insert(p.subset_of_indices(&[3]), int(7));
        coeffs.insert(p.subset_of_indices(&[0, 3]), int(-1));
        let ground = BasisForm::new(p.clone(), coeffs).unwrap();
        let s = p.subset_of_indices(&[0, 3]);
        let phi = local_potential_closed(&ground, &omega, s);
        // components: (ground({l}), ground({i,l}))
        assert_eq!(
            phi.components(),
            &[
                ground.evaluate(p.subset_of_indices(&[3])),
                ground.evaluate(s)
            ]
        );
        assert_eq!(phi.components(), &[int(7), int(10)]);
    }

    #[test]
    fn recursion_matches_closed_form_on_random_instances() {
        let mut rng = StdRng::seed_from_u64(32);
        for _ in 0..25 {
            let n = rng.gen_range(2..=4);
            let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let p = PlayerSet::new(labels).unwrap();
            let ground_sv = random_basis(&mut rng, &p);
            let omega = random_omega(&mut rng, &p);
            let ground_mc = gwsv_to_gwmc_ground(&ground_sv, &omega);
            for s in p.subsets() {
                assert_eq!(
                    local_potential_recursive(&ground_sv, &omega, s),
                    local_potential_closed(&ground_mc, &omega, s)
                );
            }
        }
    }

    #[test]
    fn recursion_on_unanimity_ground() {
        // GWSV ground = unanimity game of T with uniform single-block omega:
        // the potential is the closed form on ground/|T|.
        let p = players(&["a", "b", "c"]);
        let t = p.subset_of_indices(&[0, 1]);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(t, int(1));
        let ground = BasisForm::new(p.clone(), coeffs).unwrap();
        let omega = WeightSystem::uniform(&p);
        let transformed = gwsv_to_gwmc_ground(&ground, &omega);
        for s in p.subsets() {
            let rec = local_potential_recursive(&ground, &omega, s);
            assert_eq!(rec, local_potential_closed(&transformed, &omega, s));
            let expect = if t.is_subset_of(s) {
                frac(1, 2)
            } else {
                int(0)
            };
            assert_eq!(rec.components(), &[expect]);
        }
        assert_eq!(
            local_potential_recursive(&ground, &omega, Subset::EMPTY),
            PotentialVector::zero(1)
        );
    }

    #[test]
    fn mc_game_potential_equals_welfare() {
        let w = crate::model::tests::example_welfare();
        let g = crate::game::tests::opt_in_game(w, RuleSpec::MarginalContribution, 2);
        let omega = WeightSystem::uniform(g.players());
        for p in g.profiles(1000).unwrap() {
            let phi = global_potential(&g, &omega, &p).unwrap();
            assert_eq!(phi.components(), &[g.profile_welfare(&p)]);
        }
    }

    #[test]
    fn global_potential_rejects_incompatible_rules() {
        let w = crate::model::tests::example_welfare();
        let g = crate::game::tests::opt_in_game(w, RuleSpec::EqualShare, 1);
        let omega = WeightSystem::uniform(g.players());
        assert!(global_potential(&g, &omega, &vec![0, 0, 0, 0]).is_err());
    }

    #[test]
    fn property_holds_for_gwsv_games_and_argmax_is_pne() {
        let mut rng = StdRng::seed_from_u64(33);
        for _ in 0..10 {
            let p = players(&["a", "b", "c"]);
            let ground = random_basis(&mut rng, &p);
            let omega = random_omega(&mut rng, &p);
            let w = ground.to_welfare();
            let g = crate::game::tests::opt_in_game(
                w,
                RuleSpec::Gwsv {
                    omega: omega.clone(),
                    ground: Some(ground),
                },
                1,
            );
            assert!(verify_potential_property(&g, &omega, 1000)
                .unwrap()
                .is_none());
            let argmax = potential_argmax(&g, &omega, 1000).unwrap();
            let pne = g.find_pne(1000).unwrap();
            assert!(pne.contains(&argmax));
            assert!(!pne.is_empty());
        }
    }

    #[test]
    fn single_player_games_trivially_satisfy_the_property() {
        let p = players(&["a"]);
        let mut map = BTreeMap::new();
        map.insert(p.full(), int(3));
        let w = WelfareFunction::from_map(p.clone(), &map).unwrap();
        let g = crate::game::tests::opt_in_game(w, RuleSpec::Shapley, 1);
        let omega = WeightSystem::uniform(&p);
        assert!(verify_potential_property(&g, &omega, 100)
            .unwrap()
            .is_none());
    }

    #[test]
    fn ground_round_trip_through_transform() {
        let mut rng = StdRng::seed_from_u64(34);
        let p = players(&["a", "b", "c", "d"]);
        for _ in 0..20 {
            let b = random_basis(&mut rng, &p);
            let omega = random_omega(&mut rng, &p);
            assert_eq!(
                gwmc_to_gwsv_ground(&gwsv_to_gwmc_ground(&b, &omega), &omega),
                b
            );
        }
    }
}
