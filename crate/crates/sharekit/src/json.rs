//! Stable JSON formats for welfare functions, rules, weight systems, games,
//! classifier witnesses, and verdicts.
//!
//! Rationals are strings (`"5"`, `"-2/3"`); subsets are comma-joined player
//! labels in canonical order, with `""` for the empty set; rule-table keys
//! pair a player and a subset as `"player|subset"`. Every file carries a
//! top-level `"schema": "sharekit/1"`. Parse errors point into the document
//! with a JSON-pointer-style path.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::classify::{ClassifierInput, FailWitness, Verdict};
use crate::game::{ActionProfile, BrStep, Game};
use crate::model::{BasisForm, PlayerSet, Subset, WelfareFunction};
use crate::potential::PotentialVector;
use crate::rational::Rational;
use crate::rules::{DistributionRule, RuleSpec, WeightSystem};
use crate::Error;

pub const SCHEMA: &str = "sharekit/1";

fn jerr(path: &str, msg: impl Into<String>) -> Error {
    Error::Json {
        path: if path.is_empty() {
            "/".into()
        } else {
            path.into()
        },
        message: msg.into(),
    }
}

fn as_obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object()
        .ok_or_else(|| jerr(path, "expected an object"))
}

fn as_arr<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array().ok_or_else(|| jerr(path, "expected an array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, Error> {
    v.as_str().ok_or_else(|| jerr(path, "expected a string"))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, Error> {
    m.get(key)
        .ok_or_else(|| jerr(path, format!("missing field {key:?}")))
}

/// Requires `"schema": "sharekit/1"` at the top level.
pub fn check_schema(v: &Value) -> Result<(), Error> {
    let m = as_obj(v, "")?;
    match m.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => Ok(()),
        Some(other) => Err(jerr("/schema", format!("unsupported schema {other:?}"))),
        None => Err(jerr("/schema", format!("missing; expected {SCHEMA:?}"))),
    }
}

pub fn parse_rational(v: &Value, path: &str) -> Result<Rational, Error> {
    let s = as_str(v, path)?;
    crate::rational::parse(s).map_err(|_| jerr(path, format!("invalid rational {s:?}")))
}

pub fn parse_players(v: &Value, path: &str) -> Result<PlayerSet, Error> {
    let arr = as_arr(v, path)?;
    let mut labels = Vec::with_capacity(arr.len());
    for (k, item) in arr.iter().enumerate() {
        labels.push(as_str(item, &format!("{path}/{k}"))?.to_string());
    }
    PlayerSet::new(labels).map_err(|e| jerr(path, e.to_string()))
}

/// Subset from a comma-joined label key; `""` is the empty set.
pub fn parse_subset(players: &PlayerSet, key: &str, path: &str) -> Result<Subset, Error> {
    let mut s = Subset::EMPTY;
    if key.is_empty() {
        return Ok(s);
    }
    for label in key.split(',') {
        let i = players
            .index_of(label)
            .ok_or_else(|| jerr(path, format!("unknown player {label:?}")))?;
        if s.contains(i) {
            return Err(jerr(
                path,
                format!("duplicate player {label:?} in subset key"),
            ));
        }
        s = s.with(i);
    }
    Ok(s)
}

pub fn subset_key(players: &PlayerSet, s: Subset) -> String {
    s.members()
        .map(|i| players.label(i).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn rational_str(r: &Rational) -> Value {
    Value::String(crate::rational::format(r))
}

/// Welfare payload: `{"table": {...}}` (missing subsets are 0) or
/// `{"basis": {...}}`.
pub fn parse_welfare_payload(
    players: &PlayerSet,
    v: &Value,
    path: &str,
) -> Result<WelfareFunction, Error> {
    let m = as_obj(v, path)?;
    if let Some(table) = m.get("table") {
        let tpath = format!("{path}/table");
        let tm = as_obj(table, &tpath)?;
        let mut map = BTreeMap::new();
        for (key, val) in tm {
            let epath = format!("{tpath}/{key}");
            let s = parse_subset(players, key, &epath)?;
            map.insert(s, parse_rational(val, &epath)?);
        }
        WelfareFunction::from_map(players.clone(), &map).map_err(|e| jerr(&tpath, e.to_string()))
    } else if let Some(basis) = m.get("basis") {
        Ok(parse_basis_payload(players, basis, &format!("{path}/basis"))?.to_welfare())
    } else {
        Err(jerr(path, "welfare needs a \"table\" or \"basis\" field"))
    }
}

fn parse_basis_payload(players: &PlayerSet, v: &Value, path: &str) -> Result<BasisForm, Error> {
    let m = as_obj(v, path)?;
    let mut coeffs = BTreeMap::new();
    for (key, val) in m {
        let epath = format!("{path}/{key}");
        let s = parse_subset(players, key, &epath)?;
        coeffs.insert(s, parse_rational(val, &epath)?);
    }
    BasisForm::new(players.clone(), coeffs).map_err(|e| jerr(path, e.to_string()))
}

/// Dense welfare as a `{"table": {...}}` payload, zero values omitted.
pub fn welfare_payload(w: &WelfareFunction) -> Value {
    let players = w.players();
    let mut table = Map::new();
    for s in players.subsets_ordered() {
        if s.is_empty() || num_traits::Zero::is_zero(w.value(s)) {
            continue;
        }
        table.insert(subset_key(players, s), rational_str(w.value(s)));
    }
    json!({ "table": table })
}

pub fn basis_payload(b: &BasisForm) -> Value {
    let mut map = Map::new();
    for (t, q) in b.coeffs() {
        map.insert(subset_key(b.players(), *t), rational_str(q));
    }
    json!({ "basis": map })
}

/// Weight system `{"lambda": {...}, "sigma": [["i","j"], ...]}`.
pub fn parse_weight_system(
    players: &PlayerSet,
    v: &Value,
    path: &str,
) -> Result<WeightSystem, Error> {
    let m = as_obj(v, path)?;
    let lpath = format!("{path}/lambda");
    let lm = as_obj(field(m, "lambda", path)?, &lpath)?;
    let mut lambda = Vec::with_capacity(players.n());
    for i in 0..players.n() {
        let label = players.label(i);
        let val = lm
            .get(label)
            .ok_or_else(|| jerr(&lpath, format!("missing weight for player {label:?}")))?;
        lambda.push(parse_rational(val, &format!("{lpath}/{label}"))?);
    }
    let spath = format!("{path}/sigma");
    let sm = as_arr(field(m, "sigma", path)?, &spath)?;
    let mut sigma = Vec::with_capacity(sm.len());
    for (k, block) in sm.iter().enumerate() {
        let bpath = format!("{spath}/{k}");
        let labels = as_arr(block, &bpath)?;
        let mut s = Subset::EMPTY;
        for (x, label) in labels.iter().enumerate() {
            let lp = format!("{bpath}/{x}");
            let name = as_str(label, &lp)?;
            let i = players
                .index_of(name)
                .ok_or_else(|| jerr(&lp, format!("unknown player {name:?}")))?;
            s = s.with(i);
        }
        sigma.push(s);
    }
    WeightSystem::new(players.clone(), lambda, sigma).map_err(|e| jerr(path, e.to_string()))
}

pub fn weight_system_value(omega: &WeightSystem) -> Value {
    let players = omega.players();
    let mut lambda = Map::new();
    for i in 0..players.n() {
        lambda.insert(players.label(i).to_string(), rational_str(omega.lambda(i)));
    }
    let sigma: Vec<Value> = omega
        .sigma()
        .iter()
        .map(|block| {
            Value::Array(
                block
                    .members()
                    .map(|i| Value::String(players.label(i).to_string()))
                    .collect(),
            )
        })
        .collect();
    json!({ "lambda": lambda, "sigma": sigma })
}

/// Rule spec: `{"family": ...}` with family-specific parameters, or
/// `{"table": {"player|subset": share, ...}}`.
pub fn parse_rule_spec(players: &PlayerSet, v: &Value, path: &str) -> Result<RuleSpec, Error> {
    let m = as_obj(v, path)?;
    if let Some(table) = m.get("table") {
        let tpath = format!("{path}/table");
        let tm = as_obj(table, &tpath)?;
        let mut rows: BTreeMap<Subset, Vec<Option<Rational>>> = BTreeMap::new();
        for (key, val) in tm {
            let epath = format!("{tpath}/{key}");
            let (player, subset) = key
                .split_once('|')
                .ok_or_else(|| jerr(&epath, "expected a \"player|subset\" key"))?;
            let i = players
                .index_of(player)
                .ok_or_else(|| jerr(&epath, format!("unknown player {player:?}")))?;
            let s = parse_subset(players, subset, &epath)?;
            let pos = s
                .position_of(i)
                .ok_or_else(|| jerr(&epath, "player is not in the subset"))?;
            let row = rows.entry(s).or_insert_with(|| vec![None; s.len()]);
            if row[pos].replace(parse_rational(val, &epath)?).is_some() {
                return Err(jerr(&epath, "duplicate table entry"));
            }
        }
        let mut table = BTreeMap::new();
        for (s, row) in rows {
            let complete: Option<Vec<Rational>> = row.into_iter().collect();
            match complete {
                Some(r) => {
                    table.insert(s, r);
                }
                None => {
                    return Err(jerr(
                        &tpath,
                        format!("incomplete row for subset {:?}", subset_key(players, s)),
                    ))
                }
            }
        }
        let spec = RuleSpec::Table(table);
        spec.validate(players)
            .map_err(|e| jerr(&tpath, e.to_string()))?;
        return Ok(spec);
    }

    let family = as_str(field(m, "family", path)?, &format!("{path}/family"))?;
    let weights = |key: &str| -> Result<Vec<Rational>, Error> {
        let wpath = format!("{path}/{key}");
        let wm = as_obj(field(m, key, path)?, &wpath)?;
        let mut out = Vec::with_capacity(players.n());
        for i in 0..players.n() {
            let label = players.label(i);
            let val = wm
                .get(label)
                .ok_or_else(|| jerr(&wpath, format!("missing weight for player {label:?}")))?;
            out.push(parse_rational(val, &format!("{wpath}/{label}"))?);
        }
        Ok(out)
    };
    let ground = |m: &Map<String, Value>| -> Result<Option<BasisForm>, Error> {
        match m.get("ground") {
            None => Ok(None),
            Some(g) => {
                let gpath = format!("{path}/ground");
                let gm = as_obj(g, &gpath)?;
                if let Some(basis) = gm.get("basis") {
                    Ok(Some(parse_basis_payload(
                        players,
                        basis,
                        &format!("{gpath}/basis"),
                    )?))
                } else {
                    Ok(Some(parse_welfare_payload(players, g, &gpath)?.decompose()))
                }
            }
        }
    };
    let spec = match family {
        "equal_share" => RuleSpec::EqualShare,
        "proportional" => RuleSpec::Proportional(weights("weights")?),
        "shapley" => RuleSpec::Shapley,
        "weighted_shapley" => RuleSpec::WeightedShapley(weights("weights")?),
        "mc" => RuleSpec::MarginalContribution,
        "wmc" => RuleSpec::Wmc(weights("weights")?),
        "gwsv" | "gwmc" => {
            let omega = parse_weight_system(players, v, path)?;
            let g = ground(m)?;
            if family == "gwsv" {
                RuleSpec::Gwsv { omega, ground: g }
            } else {
                RuleSpec::Gwmc { omega, ground: g }
            }
        }
        other => {
            return Err(jerr(
                &format!("{path}/family"),
                format!("unknown family {other:?}"),
            ))
        }
    };
    spec.validate(players)
        .map_err(|e| jerr(path, e.to_string()))?;
    Ok(spec)
}

pub fn rule_spec_value(players: &PlayerSet, spec: &RuleSpec) -> Value {
    let weights_obj = |w: &[Rational]| -> Value {
        let mut m = Map::new();
        for i in 0..players.n() {
            m.insert(players.label(i).to_string(), rational_str(&w[i]));
        }
        Value::Object(m)
    };
    match spec {
        RuleSpec::EqualShare => json!({ "family": "equal_share" }),
        RuleSpec::Proportional(w) => {
            json!({ "family": "proportional", "weights": weights_obj(w) })
        }
        RuleSpec::Shapley => json!({ "family": "shapley" }),
        RuleSpec::WeightedShapley(w) => {
            json!({ "family": "weighted_shapley", "weights": weights_obj(w) })
        }
        RuleSpec::MarginalContribution => json!({ "family": "mc" }),
        RuleSpec::Wmc(w) => json!({ "family": "wmc", "weights": weights_obj(w) }),
        RuleSpec::Gwsv { omega, ground } | RuleSpec::Gwmc { omega, ground } => {
            let mut obj = as_obj(&weight_system_value(omega), "")
                .expect("weight system serializes to an object")
                .clone();
            obj.insert(
                "family".into(),
                Value::String(
                    if matches!(spec, RuleSpec::Gwsv { .. }) {
                        "gwsv"
                    } else {
                        "gwmc"
                    }
                    .into(),
                ),
            );
            if let Some(g) = ground {
                obj.insert("ground".into(), basis_payload(g));
            }
            Value::Object(obj)
        }
        RuleSpec::Table(rows) => {
            let mut table = Map::new();
            for (s, row) in rows {
                for (pos, i) in s.members().enumerate() {
                    table.insert(
                        format!("{}|{}", players.label(i), subset_key(players, *s)),
                        rational_str(&row[pos]),
                    );
                }
            }
            json!({ "table": table })
        }
    }
}

/// Game object: players, named welfares and rules, resources, action sets.
pub fn parse_game(v: &Value, path: &str) -> Result<Game, Error> {
    let m = as_obj(v, path)?;
    let players = parse_players(field(m, "players", path)?, &format!("{path}/players"))?;

    let wpath = format!("{path}/welfares");
    let wm = as_obj(field(m, "welfares", path)?, &wpath)?;
    let mut welfares = Vec::new();
    for (name, val) in wm {
        welfares.push((
            name.clone(),
            parse_welfare_payload(&players, val, &format!("{wpath}/{name}"))?,
        ));
    }

    let rpath = format!("{path}/rules");
    let rm = as_obj(field(m, "rules", path)?, &rpath)?;
    let mut rules = Vec::new();
    for (name, val) in rm {
        rules.push((
            name.clone(),
            parse_rule_spec(&players, val, &format!("{rpath}/{name}"))?,
        ));
    }

    let respath = format!("{path}/resources");
    let resarr = as_arr(field(m, "resources", path)?, &respath)?;
    let mut resources = Vec::new();
    for (k, r) in resarr.iter().enumerate() {
        let rp = format!("{respath}/{k}");
        let rm = as_obj(r, &rp)?;
        let id = as_str(field(rm, "id", &rp)?, &format!("{rp}/id"))?.to_string();
        let w = as_str(field(rm, "welfare", &rp)?, &format!("{rp}/welfare"))?.to_string();
        let f = as_str(field(rm, "rule", &rp)?, &format!("{rp}/rule"))?.to_string();
        let v = match rm.get("v") {
            None => 1,
            Some(x) => x
                .as_u64()
                .filter(|&n| n >= 1)
                .ok_or_else(|| jerr(&format!("{rp}/v"), "expected a positive integer"))?,
        };
        resources.push((id, w, f, v));
    }

    let apath = format!("{path}/actions");
    let am = as_obj(field(m, "actions", path)?, &apath)?;
    let mut actions = BTreeMap::new();
    for (player, list) in am {
        let pp = format!("{apath}/{player}");
        if players.index_of(player).is_none() {
            return Err(jerr(&pp, "unknown player"));
        }
        let la = as_arr(list, &pp)?;
        let mut acts = Vec::new();
        for (k, action) in la.iter().enumerate() {
            let ap = format!("{pp}/{k}");
            let ids = as_arr(action, &ap)?;
            let mut out = Vec::new();
            for (x, id) in ids.iter().enumerate() {
                out.push(as_str(id, &format!("{ap}/{x}"))?.to_string());
            }
            acts.push(out);
        }
        actions.insert(player.clone(), acts);
    }

    Game::new(players, welfares, rules, resources, &actions).map_err(|e| jerr(path, e.to_string()))
}

pub fn game_value(game: &Game) -> Value {
    let players = game.players();
    let mut welfares = Map::new();
    for (name, w) in game.welfares() {
        welfares.insert(name.clone(), welfare_payload(w));
    }
    let mut rules = Map::new();
    for (name, spec) in game.rules() {
        rules.insert(name.clone(), rule_spec_value(players, spec));
    }
    let resources: Vec<Value> = game
        .resources()
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "welfare": game.welfares()[r.welfare].0,
                "rule": game.rules()[r.rule].0,
                "v": r.multiplicity,
            })
        })
        .collect();
    let mut actions = Map::new();
    for i in 0..players.n() {
        let acts: Vec<Value> = game.actions()[i]
            .iter()
            .map(|action| {
                Value::Array(
                    action
                        .iter()
                        .map(|&r| Value::String(game.resources()[r].id.clone()))
                        .collect(),
                )
            })
            .collect();
        actions.insert(players.label(i).to_string(), Value::Array(acts));
    }
    json!({
        "players": players.labels(),
        "welfares": welfares,
        "rules": rules,
        "resources": resources,
        "actions": actions,
    })
}

/// Profile as `{"player": "comma,joined,resource,ids"}`.
pub fn profile_value(game: &Game, profile: &ActionProfile) -> Value {
    let players = game.players();
    let mut m = Map::new();
    for i in 0..players.n() {
        let ids: Vec<String> = game.actions()[i][profile[i]]
            .iter()
            .map(|&r| game.resources()[r].id.clone())
            .collect();
        m.insert(players.label(i).to_string(), Value::String(ids.join(",")));
    }
    Value::Object(m)
}

pub fn cycle_value(game: &Game, steps: &[BrStep]) -> Value {
    let players = game.players();
    let steps: Vec<Value> = steps
        .iter()
        .map(|s| {
            let ids: Vec<String> = game.actions()[s.player][s.action]
                .iter()
                .map(|&r| game.resources()[r].id.clone())
                .collect();
            json!({
                "profile": profile_value(game, &s.profile),
                "player": players.label(s.player),
                "action": ids.join(","),
            })
        })
        .collect();
    json!({ "steps": steps })
}

pub fn potential_value(phi: &PotentialVector) -> Value {
    Value::Array(phi.components().iter().map(rational_str).collect())
}

/// Classifier pairs file: `{"schema", "players", "pairs": [{"welfare",
/// "rule"}, ...]}`.
pub fn parse_pairs_file(text: &str) -> Result<ClassifierInput, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| jerr("", e.to_string()))?;
    check_schema(&v)?;
    let m = as_obj(&v, "")?;
    let players = parse_players(field(m, "players", "")?, "/players")?;
    let parr = as_arr(field(m, "pairs", "")?, "/pairs")?;
    let mut pairs = Vec::new();
    for (k, entry) in parr.iter().enumerate() {
        let ppath = format!("/pairs/{k}");
        let em = as_obj(entry, &ppath)?;
        let welfare = parse_welfare_payload(
            &players,
            field(em, "welfare", &ppath)?,
            &format!("{ppath}/welfare"),
        )?;
        let spec = parse_rule_spec(
            &players,
            field(em, "rule", &ppath)?,
            &format!("{ppath}/rule"),
        )?;
        let rule = DistributionRule::realize(spec, &players, &welfare)
            .map_err(|e| jerr(&format!("{ppath}/rule"), e.to_string()))?;
        pairs.push((welfare, rule));
    }
    ClassifierInput::new(players, pairs).map_err(|e| jerr("/pairs", e.to_string()))
}

pub fn parse_welfare_file(text: &str) -> Result<(PlayerSet, WelfareFunction), Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| jerr("", e.to_string()))?;
    check_schema(&v)?;
    let m = as_obj(&v, "")?;
    let players = parse_players(field(m, "players", "")?, "/players")?;
    let welfare = parse_welfare_payload(&players, field(m, "welfare", "")?, "/welfare")?;
    Ok((players, welfare))
}

pub fn welfare_file_value(players: &PlayerSet, payload: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "players": players.labels(),
        "welfare": payload,
    })
}

/// Rule file: `{"schema", "rule": {...}}`, labels resolved against the
/// companion welfare file's players.
pub fn parse_rule_file(text: &str, players: &PlayerSet) -> Result<RuleSpec, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| jerr("", e.to_string()))?;
    check_schema(&v)?;
    let m = as_obj(&v, "")?;
    parse_rule_spec(players, field(m, "rule", "")?, "/rule")
}

/// Weight-system file: `{"schema", "lambda", "sigma"}`.
pub fn parse_omega_file(text: &str, players: &PlayerSet) -> Result<WeightSystem, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| jerr("", e.to_string()))?;
    check_schema(&v)?;
    parse_weight_system(players, &v, "")
}

pub fn parse_game_file(text: &str) -> Result<Game, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| jerr("", e.to_string()))?;
    check_schema(&v)?;
    parse_game(&v, "")
}

/// Stage-specific witness payload for the counterexample generators.
#[derive(Clone, Debug)]
pub enum WitnessPayload {
    SignConflict {
        pair: usize,
        subset: Subset,
        i: usize,
        j: usize,
    },
    Contributing {
        pair: usize,
        subset: Subset,
        i: usize,
        j: usize,
    },
    Decomposition {
        pair: usize,
        subset: Subset,
        i: usize,
        j: usize,
    },
    Nonnegativity {
        pair: usize,
        coalition: Subset,
        i: usize,
        j: usize,
    },
    GlobalConsistency {
        i: usize,
        j: usize,
        first: (usize, Subset),
        second: (usize, Subset),
    },
    CyclicConsistency {
        cycle: Vec<usize>,
        edges: Vec<(usize, Subset)>,
    },
}

/// Witness file: `{"schema", "players", "pairs", "witness": {...}}` with a
/// stage-dependent witness object.
pub fn parse_witness_file(
    text: &str,
    stage: &str,
) -> Result<(ClassifierInput, WitnessPayload), Error> {
    let input = parse_pairs_file(text)?;
    let players = input.players().clone();
    let v: Value = serde_json::from_str(text).map_err(|e| jerr("", e.to_string()))?;
    let m = as_obj(&v, "")?;
    let w = field(m, "witness", "")?;
    let wpath = "/witness";
    let wm = as_obj(w, wpath)?;

    let pair_count = input.pairs().len();
    let pair_index = |m: &Map<String, Value>, path: &str| -> Result<usize, Error> {
        let k = match m.get("pair") {
            None => 0,
            Some(x) => x
                .as_u64()
                .ok_or_else(|| jerr(&format!("{path}/pair"), "expected an index"))?
                as usize,
        };
        if k >= pair_count {
            return Err(jerr(&format!("{path}/pair"), "pair index out of range"));
        }
        Ok(k)
    };
    let player = |m: &Map<String, Value>, key: &str, path: &str| -> Result<usize, Error> {
        let p = format!("{path}/{key}");
        let label = as_str(field(m, key, path)?, &p)?;
        players
            .index_of(label)
            .ok_or_else(|| jerr(&p, format!("unknown player {label:?}")))
    };
    let subset = |m: &Map<String, Value>, key: &str, path: &str| -> Result<Subset, Error> {
        let p = format!("{path}/{key}");
        parse_subset(&players, as_str(field(m, key, path)?, &p)?, &p)
    };
    let pair_coalition = |v: &Value, path: &str| -> Result<(usize, Subset), Error> {
        let m = as_obj(v, path)?;
        Ok((pair_index(m, path)?, subset(m, "coalition", path)?))
    };

    let payload = match stage {
        "sign_conflict" => WitnessPayload::SignConflict {
            pair: pair_index(wm, wpath)?,
            subset: subset(wm, "subset", wpath)?,
            i: player(wm, "i", wpath)?,
            j: player(wm, "j", wpath)?,
        },
        "contributing" => WitnessPayload::Contributing {
            pair: pair_index(wm, wpath)?,
            subset: subset(wm, "subset", wpath)?,
            i: player(wm, "i", wpath)?,
            j: player(wm, "j", wpath)?,
        },
        "decomposition" => WitnessPayload::Decomposition {
            pair: pair_index(wm, wpath)?,
            subset: subset(wm, "subset", wpath)?,
            i: player(wm, "i", wpath)?,
            j: player(wm, "j", wpath)?,
        },
        "nonnegativity" => WitnessPayload::Nonnegativity {
            pair: pair_index(wm, wpath)?,
            coalition: subset(wm, "coalition", wpath)?,
            i: player(wm, "i", wpath)?,
            j: player(wm, "j", wpath)?,
        },
        "global_consistency" => WitnessPayload::GlobalConsistency {
            i: player(wm, "i", wpath)?,
            j: player(wm, "j", wpath)?,
            first: pair_coalition(field(wm, "first", wpath)?, &format!("{wpath}/first"))?,
            second: pair_coalition(field(wm, "second", wpath)?, &format!("{wpath}/second"))?,
        },
        "cyclic_consistency" => {
            let cpath = format!("{wpath}/cycle");
            let carr = as_arr(field(wm, "cycle", wpath)?, &cpath)?;
            let mut cycle = Vec::new();
            for (k, label) in carr.iter().enumerate() {
                let lp = format!("{cpath}/{k}");
                let name = as_str(label, &lp)?;
                cycle.push(
                    players
                        .index_of(name)
                        .ok_or_else(|| jerr(&lp, format!("unknown player {name:?}")))?,
                );
            }
            let epath = format!("{wpath}/edges");
            let earr = as_arr(field(wm, "edges", wpath)?, &epath)?;
            let mut edges = Vec::new();
            for (k, e) in earr.iter().enumerate() {
                edges.push(pair_coalition(e, &format!("{epath}/{k}"))?);
            }
            WitnessPayload::CyclicConsistency { cycle, edges }
        }
        other => {
            return Err(jerr(
                "/witness",
                format!(
                    "unknown stage {other:?}; expected one of sign_conflict, contributing, \
                     decomposition, nonnegativity, global_consistency, cyclic_consistency"
                ),
            ))
        }
    };
    Ok((input, payload))
}

fn witness_value(players: &PlayerSet, witness: &FailWitness) -> Value {
    let label = |i: &usize| Value::String(players.label(*i).to_string());
    match witness {
        FailWitness::Contributing {
            pair,
            subset,
            player,
            i,
            j,
        }
        | FailWitness::Decomposition {
            pair,
            subset,
            player,
            i,
            j,
        } => json!({
            "pair": pair,
            "subset": subset_key(players, *subset),
            "player": label(player),
            "i": label(i),
            "j": label(j),
        }),
        FailWitness::Nonnegativity {
            pair,
            coalition,
            player,
            i,
            j,
        } => json!({
            "pair": pair,
            "coalition": subset_key(players, *coalition),
            "player": label(player),
            "i": label(i),
            "j": label(j),
        }),
        FailWitness::GlobalConsistency(w) => json!({
            "i": label(&w.i),
            "j": label(&w.j),
            "first": { "pair": w.first.0, "coalition": subset_key(players, w.first.1) },
            "second": { "pair": w.second.0, "coalition": subset_key(players, w.second.1) },
        }),
        FailWitness::CyclicConsistency(w) => json!({
            "cycle": w.cycle.iter().map(label).collect::<Vec<_>>(),
            "edges": w.edges.iter().map(|(p, t)| json!({
                "pair": p,
                "coalition": subset_key(players, *t),
            })).collect::<Vec<_>>(),
        }),
    }
}

pub fn verdict_value(players: &PlayerSet, verdict: &Verdict) -> Value {
    match verdict {
        Verdict::Pass(cert) => {
            let mut grounds = Map::new();
            for (k, g) in cert.grounds.iter().enumerate() {
                grounds.insert(k.to_string(), basis_payload(g));
            }
            json!({
                "schema": SCHEMA,
                "outcome": "pass",
                "omega": weight_system_value(&cert.omega_star),
                "grounds": grounds,
            })
        }
        Verdict::Fail(f) => json!({
            "schema": SCHEMA,
            "outcome": "fail",
            "stage": f.stage.as_str(),
            "witness": witness_value(players, &f.witness),
            "counterexample_game": game_value(&f.counterexample),
            "pne_count": 0,
        }),
    }
}
