//! Constructive game generators: each failed classifier condition is turned
//! into a concrete game with no pure Nash equilibrium.
//!
//! All generators validate their premise, assemble the game, and then verify
//! by exhaustive enumeration that no equilibrium exists before returning; a
//! game is never handed back unverified. The moving players always have
//! exactly two actions and everyone else exactly one (their fixture
//! placements).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::classify::{construct_basis_rules, BasisRules};
use crate::game::Game;
use crate::model::{minimal_elements, BasisForm, PlayerSet, Subset, WelfareFunction};
use crate::rational::Rational;
use crate::rules::DistributionRule;
use crate::Error;

fn verified(game: Game, budget: u64) -> Result<Game, Error> {
    let pne = game.find_pne(budget)?;
    if pne.is_empty() {
        Ok(game)
    } else {
        Err(Error::internal(format!(
            "generated game admits {} equilibria",
            pne.len()
        )))
    }
}

fn subset_key(players: &PlayerSet, t: Subset) -> String {
    t.members()
        .map(|i| players.label(i).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Assembles a game from per-pair welfare/rule entries, resources pinned to
/// one pair each, and explicit mover action sets. Every non-mover gets the
/// single action consisting of the resources whose fixture set contains it.
fn assemble(
    players: &PlayerSet,
    pairs: &[(&WelfareFunction, &DistributionRule)],
    resources: &[(String, usize, u64, Subset)],
    movers: &[(usize, [Vec<String>; 2])],
) -> Result<Game, Error> {
    let welfares: Vec<(String, WelfareFunction)> = pairs
        .iter()
        .enumerate()
        .map(|(k, (w, _))| (format!("w{k}"), (*w).clone()))
        .collect();
    let rules: Vec<(String, crate::rules::RuleSpec)> = pairs
        .iter()
        .enumerate()
        .map(|(k, (_, f))| (format!("f{k}"), f.spec().clone()))
        .collect();
    let resource_rows: Vec<(String, String, String, u64)> = resources
        .iter()
        .map(|(id, p, v, _)| (id.clone(), format!("w{p}"), format!("f{p}"), *v))
        .collect();

    let mut actions: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for i in 0..players.n() {
        if let Some((_, acts)) = movers.iter().find(|(m, _)| *m == i) {
            actions.insert(players.label(i).to_string(), acts.to_vec());
            continue;
        }
        let pinned: Vec<String> = resources
            .iter()
            .filter(|(_, _, _, fixed)| fixed.contains(i))
            .map(|(id, _, _, _)| id.clone())
            .collect();
        actions.insert(players.label(i).to_string(), vec![pinned]);
    }
    Game::new(players.clone(), welfares, rules, resource_rows, &actions)
}

/// Scales positive rationals to positive integers by a common factor,
/// reduced so the result stays small.
fn scale_to_multiplicities(values: &[Rational]) -> Result<Vec<u64>, Error> {
    let mut lcm = BigInt::one();
    for v in values {
        if !v.is_positive() {
            return Err(Error::internal("multiplicities must be positive"));
        }
        lcm = lcm.lcm(v.denom());
    }
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = gcd.gcd(x);
    }
    ints.into_iter()
        .map(|x| {
            u64::try_from(x / &gcd)
                .map_err(|_| Error::internal("multiplicity exceeds the supported range"))
        })
        .collect()
}

/// A point strictly inside the open interval (`lo`, `hi`); `None` bounds are
/// unbounded sides.
fn open_point(lo: Option<&Rational>, hi: Option<&Rational>) -> Option<Rational> {
    match (lo, hi) {
        (Some(l), Some(h)) => {
            if l < h {
                Some((l + h) / crate::rational::int(2))
            } else {
                None
            }
        }
        (Some(l), None) => Some(l + Rational::one()),
        (None, Some(h)) => Some(h - Rational::one()),
        (None, None) => Some(Rational::one()),
    }
}

/// A nonzero point strictly inside (`lo`, `hi`), which must be nonempty.
fn nonzero_open_point(lo: &Rational, hi: &Rational) -> Rational {
    let mid = (lo + hi) / crate::rational::int(2);
    if !mid.is_zero() {
        mid
    } else {
        // midpoint at zero means hi > 0
        hi / crate::rational::int(2)
    }
}

/// Solves for `t > 0` with `a1 > t*b1` and `t*b2 > a2`.
fn solve_ratio(a1: &Rational, b1: &Rational, a2: &Rational, b2: &Rational) -> Option<Rational> {
    fn raise(lo: &mut Option<Rational>, x: Rational) {
        match lo {
            Some(cur) if *cur >= x => {}
            _ => *lo = Some(x),
        }
    }
    fn drop(hi: &mut Option<Rational>, x: Rational) {
        match hi {
            Some(cur) if *cur <= x => {}
            _ => *hi = Some(x),
        }
    }
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    // a1 > t*b1
    if b1.is_positive() {
        drop(&mut hi, a1 / b1);
    } else if b1.is_zero() {
        if !a1.is_positive() {
            return None;
        }
    } else {
        raise(&mut lo, a1 / b1);
    }
    // t*b2 > a2
    if b2.is_positive() {
        raise(&mut lo, a2 / b2);
    } else if b2.is_zero() {
        if !a2.is_negative() {
            return None;
        }
    } else {
        drop(&mut hi, a2 / b2);
    }
    raise(&mut lo, Rational::zero());
    let t = open_point(lo.as_ref(), hi.as_ref())?;
    t.is_positive().then_some(t)
}

/// Two resources, both with the full fixture `S - {i, j}`; players `i` and
/// `j` each pick one of them. No equilibrium exists when the share movements
/// `f(i, S) - f(i, S-j)` and `f(j, S) - f(j, S-i)` have opposite signs: one
/// player chases the other, who flees.
pub fn sign_conflict_game(
    welfare: &WelfareFunction,
    rule: &DistributionRule,
    s: Subset,
    i: usize,
    j: usize,
    budget: u64,
) -> Result<Game, Error> {
    let players = welfare.players();
    if i == j || !s.contains(i) || !s.contains(j) {
        return Err(Error::premise("movers must be two distinct members of S"));
    }
    let di = rule.eval(i, s) - rule.eval(i, s.without(j));
    let dj = rule.eval(j, s) - rule.eval(j, s.without(i));
    if !(di * dj).is_negative() {
        return Err(Error::premise(
            "share movements of the movers must have opposite signs",
        ));
    }
    let fixed = s.without(i).without(j);
    let game = assemble(
        players,
        &[(welfare, rule)],
        &[("r1".into(), 0, 1, fixed), ("r2".into(), 0, 1, fixed)],
        &[
            (i, [vec!["r1".into()], vec!["r2".into()]]),
            (j, [vec!["r1".into()], vec!["r2".into()]]),
        ],
    )?;
    verified(game, budget)
}

/// Four resources in a 2x2 layout. Contributing players other than the
/// movers sit on all four; noncontributing players sit on the two
/// off-diagonal resources. No equilibrium exists when `i`'s share drops and
/// `j`'s rises as the noncontributing players come and go. When a mover is
/// itself noncontributing the two-resource sign-conflict layout applies
/// instead.
pub fn contributing_game(
    welfare: &WelfareFunction,
    rule: &DistributionRule,
    s: Subset,
    i: usize,
    j: usize,
    budget: u64,
) -> Result<Game, Error> {
    let players = welfare.players();
    if i == j || !s.contains(i) || !s.contains(j) {
        return Err(Error::premise("movers must be two distinct members of S"));
    }
    let ground = rule.actual_welfare().decompose();
    let ns = ground.contributing_players(s);
    if !(ns.contains(i) && ns.contains(j)) {
        // a noncontributing mover reduces to the two-resource layout
        return sign_conflict_game(welfare, rule, s, i, j, budget);
    }
    if rule.eval(i, s) >= rule.eval(i, ns) || rule.eval(j, s) <= rule.eval(j, ns) {
        return Err(Error::premise(
            "need f(i,S) < f(i,N(S)) and f(j,S) > f(j,N(S))",
        ));
    }
    let core_fixed = ns.without(i).without(j);
    let bystanders = s.minus(ns);
    let game = assemble(
        players,
        &[(welfare, rule)],
        &[
            ("r11".into(), 0, 1, core_fixed),
            ("r12".into(), 0, 1, core_fixed.union(bystanders)),
            ("r21".into(), 0, 1, core_fixed.union(bystanders)),
            ("r22".into(), 0, 1, core_fixed),
        ],
        &[
            (
                i,
                [
                    vec!["r11".into(), "r12".into()],
                    vec!["r21".into(), "r22".into()],
                ],
            ),
            (
                j,
                [
                    vec!["r11".into(), "r21".into()],
                    vec!["r12".into(), "r22".into()],
                ],
            ),
        ],
    )?;
    verified(game, budget)
}

/// Two rows of per-coalition resources with signed routing: coalitions with
/// positive coefficient sit across from the anchor in each row, negative
/// ones next to it.
struct CoeffRows {
    /// (row-1 id, row-2 id, coalition, coefficient), in coalition order.
    rows: Vec<(String, String, Subset, i128)>,
}

impl CoeffRows {
    fn new(players: &PlayerSet, prefix: &str, coeffs: &BTreeMap<Subset, i128>) -> CoeffRows {
        let rows = coeffs
            .iter()
            .filter(|(_, c)| **c != 0)
            .map(|(t, c)| {
                let key = subset_key(players, *t);
                (
                    format!("{prefix}1:{key}"),
                    format!("{prefix}2:{key}"),
                    *t,
                    *c,
                )
            })
            .collect();
        CoeffRows { rows }
    }

    /// Emits both rows' resources with multiplicity `scale * |coefficient|`
    /// and fixture `coalition - movers`.
    fn resources(
        &self,
        pair: usize,
        scale: &Rational,
        movers: Subset,
        out: &mut Vec<(String, usize, Rational, Subset)>,
    ) {
        for (id1, id2, t, c) in &self.rows {
            let v = scale * Rational::from_integer(BigInt::from(c.unsigned_abs()));
            let fixed = t.minus(movers);
            out.push((id1.clone(), pair, v.clone(), fixed));
            out.push((id2.clone(), pair, v, fixed));
        }
    }

    /// Row-1 ids whose coalition contains `m`, filtered by coefficient sign
    /// (`None` keeps both signs).
    fn row1(&self, m: usize, sign: Option<bool>) -> Vec<String> {
        self.rows
            .iter()
            .filter(|(_, _, t, c)| t.contains(m) && sign.is_none_or(|pos| (*c > 0) == pos))
            .map(|(id1, _, _, _)| id1.clone())
            .collect()
    }

    fn row2(&self, m: usize, sign: Option<bool>) -> Vec<String> {
        self.rows
            .iter()
            .filter(|(_, _, t, c)| t.contains(m) && sign.is_none_or(|pos| (*c > 0) == pos))
            .map(|(_, id2, _, _)| id2.clone())
            .collect()
    }
}

fn finalize_resources(
    raw: Vec<(String, usize, Rational, Subset)>,
) -> Result<Vec<(String, usize, u64, Subset)>, Error> {
    let values: Vec<Rational> = raw.iter().map(|(_, _, v, _)| v.clone()).collect();
    let scaled = scale_to_multiplicities(&values)?;
    Ok(raw
        .into_iter()
        .zip(scaled)
        .map(|((id, p, _, fixed), v)| (id, p, v, fixed))
        .collect())
}

/// The 2x2 layout of [`contributing_game`] enriched with two rows of
/// coalition resources whose multiplicities are the aggregated
/// inclusion-exclusion coefficients of `S`; they cancel everything except
/// the gap between `f(i, S)` and the basis reconstruction, which drives the
/// movers in opposite directions.
pub fn decomposition_game(
    welfare: &WelfareFunction,
    rule: &DistributionRule,
    s: Subset,
    i: usize,
    j: usize,
    ntilde: &BTreeMap<Subset, i128>,
    budget: u64,
) -> Result<Game, Error> {
    let players = welfare.players();
    if i == j || !s.contains(i) || !s.contains(j) {
        return Err(Error::premise("movers must be two distinct members of S"));
    }
    let ground = rule.actual_welfare().decompose();
    if ground.contributing_players(s) != s {
        return Err(Error::premise(
            "S must be a union of contributing coalitions",
        ));
    }
    let basis_rules = construct_basis_rules(&ground, rule);
    let reconstruct = |m: usize| -> Rational {
        ground
            .coalitions_in(s)
            .into_iter()
            .filter(|t| t.contains(m))
            .map(|t| ground.coefficient(t) * basis_rules.share(t, m))
            .sum()
    };
    if rule.eval(i, s) <= reconstruct(i) || rule.eval(j, s) >= reconstruct(j) {
        return Err(Error::premise(
            "need f(i,S) above and f(j,S) below the basis reconstruction",
        ));
    }

    let movers = Subset::EMPTY.with(i).with(j);
    let coeff_rows = CoeffRows::new(players, "r", ntilde);
    let mut raw = vec![
        ("r1".to_string(), 0usize, Rational::one(), s.minus(movers)),
        ("r2".to_string(), 0usize, Rational::one(), s.minus(movers)),
    ];
    coeff_rows.resources(0, &Rational::one(), movers, &mut raw);
    let resources = finalize_resources(raw)?;

    let mut top = vec!["r1".to_string()];
    top.extend(coeff_rows.row1(i, None));
    let mut bottom = vec!["r2".to_string()];
    bottom.extend(coeff_rows.row2(i, None));
    let mut left = vec!["r1".to_string()];
    left.extend(coeff_rows.row1(j, Some(false)));
    left.extend(coeff_rows.row2(j, Some(true)));
    let mut right = vec!["r2".to_string()];
    right.extend(coeff_rows.row1(j, Some(true)));
    right.extend(coeff_rows.row2(j, Some(false)));

    let game = assemble(
        players,
        &[(welfare, rule)],
        &resources,
        &[(i, [top, bottom]), (j, [left, right])],
    )?;
    verified(game, budget)
}

/// The same two-row layout without the plain anchors: the
/// inclusion-exclusion coefficients of a single coalition `T` isolate the
/// basis shares, so a negative one lets `i` flee while `j` chases.
pub fn nonnegativity_game(
    welfare: &WelfareFunction,
    rule: &DistributionRule,
    t: Subset,
    i: usize,
    j: usize,
    coeffs: &BTreeMap<Subset, i128>,
    budget: u64,
) -> Result<Game, Error> {
    let players = welfare.players();
    if i == j || !t.contains(i) || !t.contains(j) {
        return Err(Error::premise("movers must be two distinct members of T"));
    }
    let ground = rule.actual_welfare().decompose();
    let basis_rules = construct_basis_rules(&ground, rule);
    let q = ground.coefficient(t);
    if q.is_zero() {
        return Err(Error::premise("T must be a contributing coalition"));
    }
    let qi = &q * basis_rules.share(t, i);
    let qj = &q * basis_rules.share(t, j);
    if !qi.is_negative() || !qj.is_positive() {
        return Err(Error::premise("need q_T f^T(i,T) < 0 < q_T f^T(j,T)"));
    }

    let movers = Subset::EMPTY.with(i).with(j);
    let coeff_rows = CoeffRows::new(players, "r", coeffs);
    let mut raw = Vec::new();
    coeff_rows.resources(0, &Rational::one(), movers, &mut raw);
    let resources = finalize_resources(raw)?;

    let top = coeff_rows.row1(i, None);
    let bottom = coeff_rows.row2(i, None);
    let mut left = coeff_rows.row1(j, Some(false));
    left.extend(coeff_rows.row2(j, Some(true)));
    let mut right = coeff_rows.row1(j, Some(true));
    right.extend(coeff_rows.row2(j, Some(false)));

    let game = assemble(
        players,
        &[(welfare, rule)],
        &resources,
        &[(i, [top, bottom]), (j, [left, right])],
    )?;
    verified(game, budget)
}

/// Inconsistent share ratios between a minimal paid coalition `s` (under the
/// first welfare) and a coalition `t` (under the second): builds the
/// matching two-mover game, a symmetric one when the coalition coefficients
/// have equal signs and an asymmetric four-group one otherwise.
#[allow(clippy::too_many_arguments)]
pub fn global_consistency_game(
    welfare1: &WelfareFunction,
    rule1: &DistributionRule,
    welfare2: &WelfareFunction,
    rule2: &DistributionRule,
    i: usize,
    j: usize,
    s: Subset,
    t: Subset,
    budget: u64,
) -> Result<Game, Error> {
    let players = welfare1.players();
    if i == j || !s.contains(i) || !s.contains(j) || !t.contains(i) || !t.contains(j) {
        return Err(Error::premise("movers must belong to both coalitions"));
    }
    let ground1 = rule1.actual_welfare().decompose();
    let ground2 = rule2.actual_welfare().decompose();
    let rules1 = construct_basis_rules(&ground1, rule1);
    let rules2 = construct_basis_rules(&ground2, rule2);
    let q1 = ground1.coefficient(s);
    let q2 = ground2.coefficient(t);
    if q1.is_zero() || q2.is_zero() {
        return Err(Error::premise("both coalitions must be contributing"));
    }
    // s must be minimal among the paid coalitions of the pair under rule 1
    let paid: Vec<Subset> = ground1
        .coalitions_with_pair(i, j)
        .into_iter()
        .filter(|&c| rules1.share(c, i).is_positive() || rules1.share(c, j).is_positive())
        .collect();
    if !minimal_elements(&paid).contains(&s) {
        return Err(Error::premise(
            "S must be minimal among the paid coalitions containing the movers",
        ));
    }
    if rules2.share(t, i) * rules1.share(s, j) == rules1.share(s, i) * rules2.share(t, j) {
        return Err(Error::premise("the two coalitions' share ratios agree"));
    }

    let same_pair = welfare1 == welfare2 && rule1.same_shares(rule2);
    let pairs: Vec<(&WelfareFunction, &DistributionRule)> = if same_pair {
        vec![(welfare1, rule1)]
    } else {
        vec![(welfare1, rule1), (welfare2, rule2)]
    };
    let pair2 = if same_pair { 0 } else { 1 };

    if (&q1 * &q2).is_positive() {
        global_variant_same_signs(
            players, &pairs, pair2, &ground1, &rules1, &ground2, &rules2, i, j, s, t, budget,
        )
    } else {
        global_variant_mixed_signs(
            players, &pairs, pair2, rule1, rule2, &ground1, &rules1, &ground2, &rules2, i, j, s, t,
            budget,
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn global_variant_same_signs(
    players: &PlayerSet,
    pairs: &[(&WelfareFunction, &DistributionRule)],
    pair2: usize,
    ground1: &BasisForm,
    rules1: &BasisRules,
    ground2: &BasisForm,
    rules2: &BasisRules,
    i: usize,
    j: usize,
    s: Subset,
    t: Subset,
    budget: u64,
) -> Result<Game, Error> {
    let q1 = ground1.coefficient(s);
    let q2 = ground2.coefficient(t);
    let a = |m: usize| &q2 * rules2.share(t, m);
    let b = |m: usize| &q1 * rules1.share(s, m);

    // nonexistence needs v1*a(j) > v2*b(j) and v2*b(i) > v1*a(i); the mover
    // roles swap when only the reversed cycle is solvable
    let (i, j, ratio) = match solve_ratio(&a(j), &b(j), &a(i), &b(i)) {
        Some(r) => (i, j, r),
        None => {
            let r = solve_ratio(&a(i), &b(i), &a(j), &b(j)).ok_or_else(|| {
                Error::internal("a genuine ratio violation admits one orientation")
            })?;
            (j, i, r)
        }
    };
    let (v1, v2) = (Rational::one(), ratio);
    let movers = Subset::EMPTY.with(i).with(j);

    let coeffs = crate::classify::inclusion_exclusion_coeffs(ground2, t);
    let coeff_rows = CoeffRows::new(players, "r", &coeffs);
    let mut raw = vec![
        ("r1".to_string(), 0usize, v2.clone(), s.minus(movers)),
        ("r2".to_string(), 0usize, v2, s.minus(movers)),
    ];
    coeff_rows.resources(pair2, &v1, movers, &mut raw);
    let resources = finalize_resources(raw)?;

    let mut top = vec!["r1".to_string()];
    top.extend(coeff_rows.row1(i, None));
    let mut bottom = vec!["r2".to_string()];
    bottom.extend(coeff_rows.row2(i, None));
    let mut left = vec!["r1".to_string()];
    left.extend(coeff_rows.row1(j, Some(false)));
    left.extend(coeff_rows.row2(j, Some(true)));
    let mut right = vec!["r2".to_string()];
    right.extend(coeff_rows.row1(j, Some(true)));
    right.extend(coeff_rows.row2(j, Some(false)));

    let game = assemble(
        players,
        pairs,
        &resources,
        &[(i, [top, bottom]), (j, [left, right])],
    )?;
    verified(game, budget)
}

#[allow(clippy::too_many_arguments)]
fn global_variant_mixed_signs(
    players: &PlayerSet,
    pairs: &[(&WelfareFunction, &DistributionRule)],
    pair2: usize,
    rule1: &DistributionRule,
    rule2: &DistributionRule,
    ground1: &BasisForm,
    rules1: &BasisRules,
    ground2: &BasisForm,
    rules2: &BasisRules,
    i: usize,
    j: usize,
    s: Subset,
    t: Subset,
    budget: u64,
) -> Result<Game, Error> {
    let q1 = ground1.coefficient(s);
    let q2 = ground2.coefficient(t);
    let a = |m: usize| &q2 * rules2.share(t, m);
    let b = |m: usize| &q1 * rules1.share(s, m);

    // nonexistence needs v1*a(i) + v2*b(i) < 0 and v1*a(j) + v2*b(j) > 0;
    // the movers swap if only the reversed orientation is solvable
    let (i, j, ratio) = match solve_ratio(&-a(i), &b(i), &-a(j), &b(j)) {
        Some(r) => (i, j, r),
        None => {
            let r = solve_ratio(&-a(j), &b(j), &-a(i), &b(i)).ok_or_else(|| {
                Error::internal("a genuine ratio violation admits one orientation")
            })?;
            (j, i, r)
        }
    };
    let (v1, v2) = (Rational::one(), ratio);
    let movers = Subset::EMPTY.with(i).with(j);

    let n2 = crate::classify::inclusion_exclusion_coeffs(ground2, t);
    // signed sums of the full rule over the coefficient rows
    let sum2 = |m: usize, positive: bool, dropped: Option<usize>| -> Rational {
        n2.iter()
            .filter(|(_, c)| (**c > 0) == positive)
            .map(|(tp, c)| {
                let occ = match dropped {
                    Some(d) => tp.without(d),
                    None => *tp,
                };
                rule2.eval(m, occ) * Rational::from_integer(BigInt::from(*c))
            })
            .sum()
    };

    // j's side group: a nonzero target strictly between the deviation bounds
    let rhs_j = &v2 * rule1.eval(j, s) - &v1 * (sum2(j, true, Some(i)) - sum2(j, false, None));
    let lhs_j =
        &v2 * rule1.eval(j, s.without(i)) - &v1 * (sum2(j, true, None) - sum2(j, false, Some(i)));
    if lhs_j >= rhs_j {
        return Err(Error::internal("side-group interval for j must be open"));
    }
    let target_j = nonzero_open_point(&lhs_j, &rhs_j);
    let (ground_j, tj, pair_j, c_j) = if rules2.share(t, j).is_positive() {
        (ground2, t, pair2, &q2 * rules2.share(t, j))
    } else {
        (ground1, s, 0, &q1 * rules1.share(s, j))
    };
    if c_j.is_zero() {
        return Err(Error::internal("some coalition pays j"));
    }
    let alter_j = target_j.is_positive() != c_j.is_positive();
    let v3 = (&target_j / &c_j).abs();

    // i's side group
    let lhs_i = &v2 * rule1.eval(i, s);
    let rhs_i = &v2 * rule1.eval(i, s.without(j)) - &v1 * a(i);
    if lhs_i >= rhs_i {
        return Err(Error::internal("side-group interval for i must be open"));
    }
    let target_i = nonzero_open_point(&lhs_i, &rhs_i);
    let (ground_i, ti, pair_i, c_i) = if rules2.share(t, i).is_positive() {
        (ground2, t, pair2, &q2 * rules2.share(t, i))
    } else {
        (ground1, s, 0, &q1 * rules1.share(s, i))
    };
    if c_i.is_zero() {
        return Err(Error::internal("some coalition pays i"));
    }
    let alter_i = target_i.is_positive() != c_i.is_positive();
    let v4 = (&target_i / &c_i).abs();

    let n_j = crate::classify::inclusion_exclusion_coeffs(ground_j, tj);
    let n_i = crate::classify::inclusion_exclusion_coeffs(ground_i, ti);

    let group1 = CoeffRows::new(players, "ra", &n2);
    let group_j = CoeffRows::new(players, "rb", &n_j);
    let group_i = CoeffRows::new(players, "rc", &n_i);

    let mut raw = vec![("r2".to_string(), 0usize, v2, s.minus(movers))];
    group1.resources(pair2, &v1, movers, &mut raw);
    // j's isolating group fixes everyone but j (it may pin i); i's fixes
    // everyone but i; only their first rows exist
    group_j.resources(pair_j, &v3, Subset::singleton(j), &mut raw);
    group_i.resources(pair_i, &v4, Subset::singleton(i), &mut raw);
    let raw: Vec<(String, usize, Rational, Subset)> = raw
        .into_iter()
        .filter(|(id, _, _, _)| !id.starts_with("rb2:") && !id.starts_with("rc2:"))
        .collect();
    let resources = finalize_resources(raw)?;

    let mandatory_i: Vec<String> = group_j
        .rows
        .iter()
        .filter(|(_, _, tp, _)| tp.contains(i))
        .map(|(id1, _, _, _)| id1.clone())
        .collect();
    let mandatory_j: Vec<String> = group_i
        .rows
        .iter()
        .filter(|(_, _, tp, _)| tp.contains(j))
        .map(|(id1, _, _, _)| id1.clone())
        .collect();

    let (i_up_sign, i_down_sign) = if alter_i {
        (true, false)
    } else {
        (false, true)
    };
    let mut act_i_top = group_i.row1(i, Some(i_up_sign));
    act_i_top.push("r2".to_string());
    act_i_top.extend(group1.row1(i, Some(false)));
    act_i_top.extend(mandatory_i.clone());
    let mut act_i_bottom = group1.row1(i, Some(true));
    act_i_bottom.extend(group_i.row1(i, Some(i_down_sign)));
    act_i_bottom.extend(mandatory_i);

    let (j_up_sign, j_down_sign) = if alter_j {
        (true, false)
    } else {
        (false, true)
    };
    let mut act_j_up = group_j.row1(j, Some(j_up_sign));
    act_j_up.push("r2".to_string());
    act_j_up.extend(mandatory_j.clone());
    let mut act_j_down = group1.row1(j, Some(false));
    act_j_down.extend(group_j.row1(j, Some(j_down_sign)));
    act_j_down.extend(group1.row1(j, Some(true)));
    act_j_down.extend(mandatory_j);

    let game = assemble(
        players,
        pairs,
        &resources,
        &[(i, [act_i_top, act_i_bottom]), (j, [act_j_up, act_j_down])],
    )?;
    verified(game, budget)
}

/// Sign of a coalition coefficient along a consistency cycle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

/// Kind of a maximal segment of the cyclic sign profile.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SegmentKind {
    Plus,
    Minus,
    Alternating,
}

/// Maximal segment covering columns `start..=end` (0-based). Alternating
/// segments may share their first/last column with a neighboring minus/plus
/// segment.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub end: usize,
}

/// Rotation offset that normalizes a cyclic sign profile: prefer starting at
/// a minus preceded by two pluses, then at any minus preceded by a plus,
/// else no rotation. Returns the offset and the rotated profile.
pub fn normalize_sign_profile(signs: &[Sign]) -> (usize, Vec<Sign>) {
    let z = signs.len();
    let at = |t: isize| signs[t.rem_euclid(z as isize) as usize];
    let boundary: Vec<usize> = (0..z)
        .filter(|&t| at(t as isize - 1) == Sign::Plus && signs[t] == Sign::Minus)
        .collect();
    let preferred: Vec<usize> = boundary
        .iter()
        .copied()
        .filter(|&t| at(t as isize - 2) == Sign::Plus)
        .collect();
    let start = preferred
        .first()
        .or_else(|| boundary.first())
        .copied()
        .unwrap_or(0);
    let rotated = (0..z).map(|t| signs[(start + t) % z]).collect();
    (start, rotated)
}

/// Unique segment decomposition of a normalized sign profile: runs of two or
/// more equal signs become plus/minus segments; leftover single columns are
/// absorbed into even-length alternating segments, sharing one column with a
/// preceding minus run or a following plus run when needed.
pub fn decompose_segments(signs: &[Sign]) -> Vec<Segment> {
    let z = signs.len();
    let mut segments = Vec::new();
    let mut runs: Vec<(Sign, usize, usize)> = Vec::new();
    for (t, &s) in signs.iter().enumerate() {
        match runs.last_mut() {
            Some((sign, _, end)) if *sign == s && *end + 1 == t => *end = t,
            _ => runs.push((s, t, t)),
        }
    }
    for &(sign, start, end) in &runs {
        if end > start {
            segments.push(Segment {
                kind: if sign == Sign::Plus {
                    SegmentKind::Plus
                } else {
                    SegmentKind::Minus
                },
                start,
                end,
            });
        }
    }
    // stretches of single-column runs become alternating segments
    let mut t = 0;
    while t < runs.len() {
        if runs[t].1 != runs[t].2 {
            t += 1;
            continue;
        }
        let first = t;
        while t + 1 < runs.len() && runs[t + 1].1 == runs[t + 1].2 {
            t += 1;
        }
        let mut start = runs[first].1;
        let mut end = runs[t].2;
        if signs[start] == Sign::Plus {
            assert!(start > 0, "normalized profiles start alternations on minus");
            start -= 1;
        }
        if signs[end] == Sign::Minus {
            assert!(end + 1 < z, "normalized profiles end alternations on plus");
            end += 1;
        }
        segments.push(Segment {
            kind: SegmentKind::Alternating,
            start,
            end,
        });
        t += 1;
    }
    segments.sort_by_key(|seg| (seg.start, seg.end));
    segments
}

/// Which cycle players move straight (same row in both actions) rather than
/// diagonally, per column of the normalized profile.
pub fn straight_players(signs: &[Sign], segments: &[Segment]) -> Vec<bool> {
    let z = signs.len();
    let minus = |t: usize| signs[t] == Sign::Minus;
    (0..z)
        .map(|t| {
            if t == 0 {
                return !minus(0)
                    || (segments
                        .iter()
                        .any(|s| s.kind == SegmentKind::Minus && s.start == 0)
                        && segments
                            .iter()
                            .any(|s| s.kind == SegmentKind::Plus && s.end == z - 1));
            }
            let ends_here = segments.iter().any(|s| {
                s.end == t
                    && match s.kind {
                        SegmentKind::Minus | SegmentKind::Alternating => true,
                        SegmentKind::Plus => (s.end - s.start + 1) % 2 == 1,
                    }
            });
            let alternating_minus = minus(t)
                && segments
                    .iter()
                    .any(|s| s.kind == SegmentKind::Alternating && s.start <= t && t <= s.end);
            let plus_segment_start = !minus(t)
                && minus(t - 1)
                && segments
                    .iter()
                    .any(|s| s.kind == SegmentKind::Plus && s.start == t);
            let minus_segment_start = minus(t)
                && !minus(t - 1)
                && t >= 2
                && minus(t - 2)
                && segments
                    .iter()
                    .any(|s| s.kind == SegmentKind::Minus && s.start == t);
            ends_here || alternating_minus || plus_segment_start || minus_segment_start
        })
        .collect()
}

/// Solves the cyclic multiplicity chain `v_t |q_t| b_t > v_{t+1} |q_{t+1}|
/// a_{t+1}` in positive rationals, given that the product of the `a`s is
/// strictly below the product of the `b`s (all `b` positive).
fn solve_cycle_multiplicities(
    a: &[Rational],
    b: &[Rational],
    q: &[Rational],
) -> Result<Vec<Rational>, Error> {
    let z = a.len();
    let mut scaled = vec![Rational::zero(); z];
    if let Some(z0) = (0..z).find(|&t| a[t].is_zero()) {
        // anchor at a zero numerator and peel the chain forwards from it
        scaled[z0] = Rational::one();
        for off in 1..z {
            let t = (z0 + off) % z;
            let prev = (z0 + off - 1) % z;
            scaled[t] = if a[t].is_zero() {
                Rational::one()
            } else {
                &scaled[prev] * &b[prev] / (crate::rational::int(2) * &a[t])
            };
        }
    } else {
        let prod = |xs: &[Rational], range: std::ops::Range<usize>| -> Rational {
            range.fold(Rational::one(), |acc, t| acc * &xs[t % z])
        };
        scaled[0] = Rational::one();
        // bounds follow from multiplying prefixes/suffixes of the chain
        let lower = prod(a, 2..z + 1) / prod(b, 1..z);
        let upper = &b[0] / &a[1];
        if lower >= upper {
            return Err(Error::premise("cycle products must differ strictly"));
        }
        scaled[1] = nonzero_open_point(&lower, &upper);
        for t in 2..z {
            let lower = prod(a, t..z + 1) / (prod(b, t..z) * &a[t]);
            let upper = &b[t - 1] * &scaled[t - 1] / &a[t];
            if lower >= upper {
                return Err(Error::internal("multiplicity intervals stay feasible"));
            }
            scaled[t] = nonzero_open_point(&lower, &upper);
        }
    }
    // strict chain check before dividing out the coefficients
    for t in 0..z {
        let next = (t + 1) % z;
        if &scaled[t] * &b[t] <= &scaled[next] * &a[next] {
            return Err(Error::internal("solved multiplicities violate the chain"));
        }
    }
    Ok((0..z).map(|t| &scaled[t] / q[t].abs()).collect())
}

/// Inconsistent share products around a player cycle: two circular rows of
/// resources, one column per cycle edge, with straight/diagonal action sets
/// determined by the sign profile of the coalition coefficients and
/// multiplicities solved from the chain of strict inequalities.
pub fn cyclic_consistency_game(
    pairs: &[(&WelfareFunction, &DistributionRule)],
    cycle: &[usize],
    edges: &[(usize, Subset)],
    budget: u64,
) -> Result<Game, Error> {
    let z = cycle.len();
    if z < 3 || edges.len() != z {
        return Err(Error::premise(
            "a consistency cycle needs at least three players and one edge per adjacent pair",
        ));
    }
    let players = pairs
        .first()
        .map(|(w, _)| w.players().clone())
        .ok_or_else(|| Error::premise("at least one welfare/rule pair is required"))?;
    for x in 0..z {
        for y in (x + 1)..z {
            if cycle[x] == cycle[y] {
                return Err(Error::premise("cycle players must be distinct"));
            }
        }
    }

    let analyses: Vec<(BasisForm, BasisRules)> = pairs
        .iter()
        .map(|(_, f)| {
            let g = f.actual_welfare().decompose();
            let r = construct_basis_rules(&g, f);
            (g, r)
        })
        .collect();

    let mut a = Vec::with_capacity(z);
    let mut b = Vec::with_capacity(z);
    let mut q = Vec::with_capacity(z);
    for t in 0..z {
        let (p, coalition) = edges[t];
        let (ground, rules) = analyses
            .get(p)
            .ok_or_else(|| Error::premise("edge references a missing pair"))?;
        let (x, y) = (cycle[t], cycle[(t + 1) % z]);
        if !coalition.contains(x) || !coalition.contains(y) {
            return Err(Error::premise("edge coalition must contain its players"));
        }
        let paid: Vec<Subset> = ground
            .coalitions_with_pair(x, y)
            .into_iter()
            .filter(|&c| rules.share(c, x).is_positive() || rules.share(c, y).is_positive())
            .collect();
        if !minimal_elements(&paid).contains(&coalition) {
            return Err(Error::premise(
                "edge coalition must be minimal among the paid coalitions of its players",
            ));
        }
        a.push(rules.share(coalition, x));
        b.push(rules.share(coalition, y));
        q.push(ground.coefficient(coalition));
    }

    let prod = |xs: &[Rational]| xs.iter().fold(Rational::one(), |acc, x| acc * x);
    let (mut cycle, mut edges, mut a, mut b, mut q) = (cycle.to_vec(), edges.to_vec(), a, b, q);
    if prod(&a) == prod(&b) {
        return Err(Error::premise("cycle share products agree"));
    }
    if prod(&a) > prod(&b) {
        // reverse the cycle orientation, which swaps the two products
        cycle = (0..z).map(|t| cycle[(z - t) % z]).collect();
        edges = (0..z).map(|t| edges[(z - t - 1) % z]).collect();
        let a_old = a.clone();
        a = (0..z).map(|t| b[(z - t - 1) % z].clone()).collect();
        b = (0..z).map(|t| a_old[(z - t - 1) % z].clone()).collect();
        q = (0..z).map(|t| q[(z - t - 1) % z].clone()).collect();
    }

    let signs: Vec<Sign> = q
        .iter()
        .map(|x| {
            if x.is_positive() {
                Sign::Plus
            } else {
                Sign::Minus
            }
        })
        .collect();
    let (shift, signs) = normalize_sign_profile(&signs);
    let rot = |t: usize| (shift + t) % z;
    let cycle: Vec<usize> = (0..z).map(|t| cycle[rot(t)]).collect();
    let edges: Vec<(usize, Subset)> = (0..z).map(|t| edges[rot(t)]).collect();
    let a: Vec<Rational> = (0..z).map(|t| a[rot(t)].clone()).collect();
    let b: Vec<Rational> = (0..z).map(|t| b[rot(t)].clone()).collect();
    let q: Vec<Rational> = (0..z).map(|t| q[rot(t)].clone()).collect();

    let segments = decompose_segments(&signs);
    let straight = straight_players(&signs, &segments);
    let multiplicities = scale_to_multiplicities(&solve_cycle_multiplicities(&a, &b, &q)?)?;

    let cycle_mask = cycle.iter().fold(Subset::EMPTY, |acc, &i| acc.with(i));
    let mut resources = Vec::with_capacity(2 * z);
    for t in 0..z {
        let (p, coalition) = edges[t];
        let fixed = coalition.minus(cycle_mask);
        resources.push((format!("u{}", t + 1), p, multiplicities[t], fixed));
        resources.push((format!("d{}", t + 1), p, multiplicities[t], fixed));
    }

    let mut movers = Vec::with_capacity(z);
    for t in 0..z {
        let player = cycle[t];
        let prev = (t + z - 1) % z;
        // cycle players may appear as fixtures in remote columns
        let mandatory: Vec<String> = (0..z)
            .filter(|&c| c != t && c != prev && edges[c].1.contains(player))
            .flat_map(|c| [format!("u{}", c + 1), format!("d{}", c + 1)])
            .collect();
        let up_up = vec![format!("u{}", prev + 1), format!("u{}", t + 1)];
        let down_down = vec![format!("d{}", prev + 1), format!("d{}", t + 1)];
        let up_down = vec![format!("u{}", prev + 1), format!("d{}", t + 1)];
        let down_up = vec![format!("d{}", prev + 1), format!("u{}", t + 1)];
        let (mut one, mut two) = if straight[t] {
            (up_up, down_down)
        } else {
            (up_down, down_up)
        };
        one.extend(mandatory.clone());
        two.extend(mandatory);
        movers.push((player, [one, two]));
    }

    let game = assemble(&players, pairs, &resources, &movers)?;
    verified(game, budget)
}
