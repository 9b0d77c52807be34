//! Shared generators and independent oracles for the integration suites.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::Rng;

use sharekit::model::{BasisForm, PlayerSet, Subset, WelfareFunction};
use sharekit::rational::{frac, int, Rational};
use sharekit::rules::{DistributionRule, RuleSpec, WeightSystem};
use sharekit::Error;

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {path}: {e}"))
}

pub fn players(n: usize) -> PlayerSet {
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    PlayerSet::new(labels).unwrap()
}

pub fn random_welfare(rng: &mut StdRng, n: usize) -> WelfareFunction {
    let p = players(n);
    let mut values = vec![int(0)];
    for _ in 1..p.subset_count() {
        values.push(int(rng.gen_range(-9..=9)));
    }
    WelfareFunction::from_values(p, values).unwrap()
}

pub fn random_basis(rng: &mut StdRng, p: &PlayerSet) -> BasisForm {
    let mut coeffs = BTreeMap::new();
    for s in p.subsets() {
        if !s.is_empty() && rng.gen_bool(0.45) {
            let mut v = 0;
            while v == 0 {
                v = rng.gen_range(-6..=6);
            }
            coeffs.insert(s, int(v));
        }
    }
    if coeffs.is_empty() {
        coeffs.insert(Subset::singleton(0), int(1 + rng.gen_range(0..3)));
    }
    BasisForm::new(p.clone(), coeffs).unwrap()
}

pub fn random_omega(rng: &mut StdRng, p: &PlayerSet) -> WeightSystem {
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

/// A generalized-weighted-Shapley rule paired with the welfare it
/// distributes (its own ground), so the pair is budget-balanced.
pub fn random_gwsv_pair(
    rng: &mut StdRng,
    p: &PlayerSet,
) -> (WelfareFunction, DistributionRule, WeightSystem, BasisForm) {
    let ground = random_basis(rng, p);
    let omega = random_omega(rng, p);
    let welfare = ground.to_welfare();
    let rule = DistributionRule::realize(
        RuleSpec::Gwsv {
            omega: omega.clone(),
            ground: Some(ground.clone()),
        },
        p,
        &welfare,
    )
    .unwrap();
    (welfare, rule, omega, ground)
}

/// Average marginal contribution over every arrival order of `s`; the
/// factorial-enumeration oracle for the Shapley value.
#[allow(dead_code)]
pub fn permutation_shapley(w: &WelfareFunction, i: usize, s: Subset) -> Rational {
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
        return int(0);
    }
    let members: Vec<usize> = s.members().collect();
    let all = orders(&members);
    let mut total = int(0);
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

/// Random game whose resources all use generalized-weighted-Shapley rules
/// under one common weight system.
pub fn random_gwsv_game(rng: &mut StdRng) -> Result<(sharekit::game::Game, WeightSystem), Error> {
    let n = rng.gen_range(2..=4);
    let p = players(n);
    let omega = random_omega(rng, &p);
    let ground_count = rng.gen_range(1..=2);
    let mut grounds: Vec<BasisForm> = Vec::new();
    while grounds.len() < ground_count {
        let g = random_basis(rng, &p);
        if !grounds.contains(&g) {
            grounds.push(g);
        }
    }
    let mut welfares = Vec::new();
    let mut rules = Vec::new();
    for (k, g) in grounds.iter().enumerate() {
        welfares.push((format!("w{k}"), g.to_welfare()));
        rules.push((
            format!("f{k}"),
            RuleSpec::Gwsv {
                omega: omega.clone(),
                ground: Some(g.clone()),
            },
        ));
    }
    let resource_count = rng.gen_range(1..=6);
    let mut resources = Vec::new();
    for r in 0..resource_count {
        let k = rng.gen_range(0..ground_count);
        resources.push((
            format!("r{r}"),
            format!("w{k}"),
            format!("f{k}"),
            rng.gen_range(1..=3u64),
        ));
    }
    let mut actions = BTreeMap::new();
    for i in 0..n {
        let acts = rng.gen_range(2..=3);
        let mut list = Vec::new();
        for _ in 0..acts {
            let mut choice = Vec::new();
            for r in 0..resource_count {
                if rng.gen_bool(0.5) {
                    choice.push(format!("r{r}"));
                }
            }
            list.push(choice);
        }
        actions.insert(p.label(i).to_string(), list);
    }
    let game = sharekit::game::Game::new(p, welfares, rules, resources, &actions)?;
    Ok((game, omega))
}
