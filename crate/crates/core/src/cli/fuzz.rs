//! Seeded random corpora pushed through the whole pipeline.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::doc::InputDocument;
use crate::algebra::{EpsilonModel, Field, FieldParams, Mat, PolyRing, RamRing};
use crate::error::{Error, Result};
use crate::kisin::{random_shaped_module, GeneratorConfig, UTKisinModule};
use crate::lift::{ordinary_lift, verify_certificate, LiftConfig};
use crate::phigamma::{kernel_oracle, tropical_forced_zeros, KernelConfig};
use crate::shape::{analyze, closed_set_from_weights, mutate, Mutation};

pub const MAX_FUZZ_DIM: usize = 5;
pub const MAX_FUZZ_COUNT: usize = 100_000;
/// Engine cross-checks are only run where the kernel oracle is affordable.
pub const MAX_ENGINE_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzParams {
    pub p: u32,
    pub f: usize,
    pub d: usize,
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRef {
    pub index: usize,
    pub invariant: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub schema_version: u32,
    pub p: u32,
    pub f: usize,
    pub d: usize,
    pub count: usize,
    pub seed: u64,
    pub non_generic: usize,
    pub invariants: BTreeMap<String, Tally>,
    pub failures: Vec<FailureRef>,
}

impl FuzzSummary {
    pub fn failed(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// One generated input and what happened to it.
#[derive(Debug, Clone)]
pub struct FuzzItem {
    pub index: usize,
    pub document: InputDocument,
    pub outcomes: Vec<(&'static str, Option<bool>)>,
    pub generic: bool,
}

pub fn validate(params: &FuzzParams) -> Result<Field> {
    if params.d == 0 || params.d > MAX_FUZZ_DIM {
        return Err(Error::Input(format!("d must lie in [1, {MAX_FUZZ_DIM}], got {}", params.d)));
    }
    if params.count > MAX_FUZZ_COUNT {
        return Err(Error::Input(format!("count must be at most {MAX_FUZZ_COUNT}, got {}", params.count)));
    }
    if params.d > params.p as usize + 1 {
        return Err(Error::Input(format!("{} distinct weights do not fit in [0, {}]", params.d, params.p)));
    }
    Ok(Field::new(FieldParams::first_irreducible(params.p, params.f)?))
}

fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Distinct weights in `[0, p]` containing 0, in random order.
fn random_weights<R: Rng>(p: u32, d: usize, rng: &mut R) -> Vec<u32> {
    let mut pool: Vec<u32> = (1..=p).collect();
    pool.shuffle(rng);
    let mut t = vec![0];
    t.extend_from_slice(&pool[..d - 1]);
    t.shuffle(rng);
    t
}

/// Tropical and kernel forced zeros on the diagonal template, compared with `C`.
pub fn engines_agree(field: &Field, t: &[u32]) -> Result<bool> {
    let p = field.p();
    let polys = PolyRing::new(field.clone());
    let template = Mat::from_fn(t.len(), |i, j| if i == j { polys.monomial(field.one(), t[i] as usize) } else { polys.zero() });
    let expected = closed_set_from_weights(t)?.complement();
    let trop = tropical_forced_zeros(t, &BTreeSet::new(), p, 1)?;
    let ring = RamRing::new(field.clone(), 1, EpsilonModel::standard())?;
    let kern = kernel_oracle(&ring, &template, &KernelConfig::default())?;
    Ok(trop.forced_zero_positions == expected && kern.forced_zero_positions == expected)
}

fn run_item(field: &Field, params: &FuzzParams, index: usize, weights: &[u32], engines: &HashMap<Vec<u32>, bool>) -> Result<FuzzItem> {
    let mut rng = item_rng(params.seed, index);
    let _ = random_weights(params.p, params.d, &mut rng);
    let module_seed: u64 = rng.gen();
    let m = random_shaped_module(field, weights, module_seed, &GeneratorConfig::default())?;
    let mut outcomes = Vec::new();

    outcomes.push(("analyze_clean", Some(analyze(&m).is_clean())));

    let mutation = Mutation::ALL[index % Mutation::ALL.len()];
    let flagged = mutate(&m, mutation, module_seed).map(|bad| analyze(&bad).codes().contains(&mutation.expected_code()));
    outcomes.push(("mutation_flagged", flagged));

    let (generic, lifted) = match ordinary_lift(&m, None, &LiftConfig::default()) {
        Ok(cert) => (true, Some(verify_certificate(&cert, &m) && cert.ht_multiset == sorted(weights))),
        Err(Error::NotGeneric(..)) => (false, None),
        Err(_) => (true, Some(false)),
    };
    outcomes.push(("lift_certificate", lifted));

    outcomes.push(("engine_agreement", engines.get(weights).copied()));
    Ok(FuzzItem { index, document: InputDocument::from_module(&m), outcomes, generic })
}

fn sorted(t: &[u32]) -> Vec<u32> {
    let mut v = t.to_vec();
    v.sort_unstable();
    v
}

/// Generate and check `count` items; results are ordered by index.
pub fn run_fuzz(params: &FuzzParams) -> Result<(FuzzSummary, Vec<FuzzItem>)> {
    let field = validate(params)?;
    let weights: Vec<Vec<u32>> = (0..params.count)
        .map(|i| random_weights(params.p, params.d, &mut item_rng(params.seed, i)))
        .collect();

    let mut distinct: Vec<Vec<u32>> = weights.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if params.d > MAX_ENGINE_DIM {
        distinct.clear();
    }
    let engines: HashMap<Vec<u32>, bool> = distinct
        .par_iter()
        .map(|t| (t.clone(), engines_agree(&field, t).unwrap_or(false)))
        .collect();

    let items = (0..params.count)
        .into_par_iter()
        .map(|i| run_item(&field, params, i, &weights[i], &engines))
        .collect::<Result<Vec<_>>>()?;

    let mut invariants: BTreeMap<String, Tally> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut non_generic = 0;
    for item in &items {
        non_generic += usize::from(!item.generic);
        for &(name, outcome) in &item.outcomes {
            let tally = invariants.entry(name.to_string()).or_default();
            match outcome {
                Some(true) => tally.pass += 1,
                Some(false) => {
                    tally.fail += 1;
                    failures.push(FailureRef { index: item.index, invariant: name.to_string() });
                }
                None => tally.skipped += 1,
            }
        }
    }
    let summary = FuzzSummary {
        schema_version: super::doc::SCHEMA_VERSION,
        p: params.p,
        f: params.f,
        d: params.d,
        count: params.count,
        seed: params.seed,
        non_generic,
        invariants,
        failures,
    };
    Ok((summary, items))
}

/// Look up an item's module again from its parameters.
pub fn replay(params: &FuzzParams, index: usize) -> Result<UTKisinModule> {
    let field = validate(params)?;
    let mut rng = item_rng(params.seed, index);
    let weights = random_weights(params.p, params.d, &mut rng);
    let module_seed: u64 = rng.gen();
    random_shaped_module(&field, &weights, module_seed, &GeneratorConfig::default())
}
