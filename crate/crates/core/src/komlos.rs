//! The subsequence / forward-convex-combination extraction engine:
//! Kadec–Pełczyński splitting, order-bounded subsequence selection,
//! recombination with order-bound certificates, and the non-Δ2
//! obstruction builder.
//!
//! All norms here are Luxemburg norms of the conjugate Φ*, so the
//! modular E[Φ*(·)] ≤ 1 characterizes the unit ball the proofs
//! normalize into.

use serde::Serialize;
use thiserror::Error;

use crate::estimates::EstimateError;
use crate::norms::luxemburg_norm;
use crate::space::{l0_metric, ui_modulus, DyadicSpace, RandomVariable, SpaceError};
use crate::young::{delta2_index, Delta2Config, YoungFunction};

#[derive(Debug, Error)]
pub enum KomlosError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("term {n} has norm {norm}, above the declared bound {bound}")]
    NormBoundViolated { n: usize, norm: f64, bound: f64 },
    #[error("hypothesis not verifiable on the prefix: {0}")]
    PreconditionUnmet(String),
    #[error("prefix exhausted during {stage}: got {achieved} of {wanted}")]
    ExtractionIncomplete {
        stage: &'static str,
        achieved: usize,
        wanted: usize,
    },
}

/// A realized prefix of a sequence in L_{Φ*}: explicit terms on a
/// common space, a declared norm bound, and (when the generator knows
/// it) the analytic limit.
#[derive(Debug, Clone)]
pub struct RvSequence {
    terms: Vec<RandomVariable>,
    norm_bound: f64,
    declared_limit: Option<RandomVariable>,
}

impl RvSequence {
    pub fn new(terms: Vec<RandomVariable>, norm_bound: f64) -> Result<Self, KomlosError> {
        let first = terms
            .first()
            .ok_or(KomlosError::PreconditionUnmet("empty prefix".into()))?;
        if terms.iter().any(|t| !t.same_space(first)) {
            return Err(SpaceError::ShapeMismatch.into());
        }
        Ok(RvSequence {
            terms,
            norm_bound,
            declared_limit: None,
        })
    }

    pub fn with_limit(mut self, limit: RandomVariable) -> Self {
        self.declared_limit = Some(limit);
        self
    }

    pub fn terms(&self) -> &[RandomVariable] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn declared_limit(&self) -> Option<&RandomVariable> {
        self.declared_limit.as_ref()
    }

    /// Checks ‖ξ_n‖_{Φ*} ≤ norm_bound on the realized prefix.
    pub fn verify_norm_bound(&self, phistar: &YoungFunction, tol: f64) -> Result<(), KomlosError> {
        for (n, t) in self.terms.iter().enumerate() {
            let norm = luxemburg_norm(t, phistar).value;
            if norm > self.norm_bound + tol {
                return Err(KomlosError::NormBoundViolated {
                    n,
                    norm,
                    bound: self.norm_bound,
                });
            }
        }
        Ok(())
    }
}

/// Kadec–Pełczyński splitting of a modular-bounded sequence: per term,
/// a threshold M_k and the spike set A_k = {Φ*(ξ_k) > M_k} with
/// P(A_k) ≤ 2^{-k}, sets disjointified left to right. The part off the
/// spikes is "regular" (uniformly integrable), the part on them
/// "singular" (disjointly supported).
#[derive(Debug, Clone)]
pub struct KpSplit {
    pub indices: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub disjoint_sets: Vec<Vec<usize>>,
    pub regular: Vec<RandomVariable>,
    pub singular: Vec<RandomVariable>,
    /// (N, sup_n E[Φ*(ζ^r_n)·1_{Φ*(ζ^r_n) > N}]) for doubling N.
    pub ui_profile: Vec<(f64, f64)>,
}

/// Smallest threshold M with P(v > M) ≤ budget, for v ≥ 0.
fn threshold_for_budget(v: &RandomVariable, budget: f64) -> f64 {
    // P(v > M) is right-continuous nonincreasing in M and jumps only
    // at realized levels, so the smallest admissible M is a level.
    let mut pairs: Vec<(f64, f64)> = v
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, v.space().weight(i)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // walk levels ascending, tracking the mass strictly above each
    let mut above: f64 = pairs.iter().map(|&(_, w)| w).sum();
    let mut i = 0;
    while i < pairs.len() {
        let m = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == m {
            above -= pairs[i].1;
            i += 1;
        }
        if above <= budget {
            return m;
        }
    }
    pairs.last().unwrap().0
}

pub fn kp_split(seq: &RvSequence, phistar: &YoungFunction) -> Result<KpSplit, KomlosError> {
    for (n, t) in seq.terms().iter().enumerate() {
        let modular = t.expect(|v| phistar.eval(v));
        if modular > 1.0 + 1e-9 {
            return Err(KomlosError::PreconditionUnmet(format!(
                "term {n} has E[Phi*(xi)] = {modular} > 1; normalize first"
            )));
        }
    }
    let space = seq.terms()[0].space().clone();
    let mut taken = vec![false; space.atoms()];
    let mut thresholds = Vec::new();
    let mut disjoint_sets = Vec::new();
    let mut regular = Vec::new();
    let mut singular = Vec::new();
    let mut prev_m = 0.0f64;
    for (k, t) in seq.terms().iter().enumerate() {
        let image = t.map(|v| phistar.eval(v));
        let budget = 2f64.powi(-(k as i32 + 1));
        let m = threshold_for_budget(&image, budget).max(prev_m);
        prev_m = m;
        let spike: Vec<usize> = image
            .values()
            .iter()
            .enumerate()
            .filter(|(i, &x)| x > m && !taken[*i])
            .map(|(i, _)| i)
            .collect();
        for &i in &spike {
            taken[i] = true;
        }
        // atoms above the threshold but claimed by an earlier set stay
        // in the regular part of this term
        let raw_spike: Vec<usize> = image
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > m)
            .map(|(i, _)| i)
            .collect();
        let own: Vec<usize> = raw_spike.iter().copied().filter(|&i| spike.contains(&i)).collect();
        singular.push(t.restrict(&own));
        regular.push(t.zero_on(&own));
        thresholds.push(m);
        disjoint_sets.push(own);
    }
    // UI modulus of the Φ*-images of the regular parts, against η ≡ 1
    let images: Vec<RandomVariable> = regular.iter().map(|r| r.map(|v| phistar.eval(v))).collect();
    let one = RandomVariable::constant(space, 1.0);
    let top = thresholds.last().copied().unwrap_or(1.0).max(1.0);
    let mut ui_profile = Vec::new();
    let mut n_cut = top / 16.0;
    while n_cut <= top * 4.0 {
        ui_profile.push((n_cut, ui_modulus(&images, &one, n_cut)?));
        n_cut *= 2.0;
    }
    Ok(KpSplit {
        indices: (0..seq.len()).collect(),
        thresholds,
        disjoint_sets,
        regular,
        singular,
        ui_profile,
    })
}

/// Output of an extraction: which terms were kept (or how they were
/// convexly combined), the limit, the order bound η with its Φ*-norm,
/// and the metric trace of the combinations against the limit.
#[derive(Debug, Clone)]
pub struct KomlosCertificate {
    pub indices: Vec<usize>,
    /// Sparse rows (combination n ↦ [(term index, weight)]); present
    /// for forward-convex extractions, absent for plain subsequences.
    pub weights: Option<Vec<Vec<(usize, f64)>>>,
    pub limit: RandomVariable,
    pub order_bound: RandomVariable,
    pub order_bound_norm: f64,
    pub as_convergence: Vec<f64>,
    /// Σ_k E[Φ*(ξ_{n_k})] for subsequence certificates (the geometric
    /// budget of the selection).
    pub modular_sum: f64,
    pub stage_log: Vec<String>,
}

impl KomlosCertificate {
    /// Row-stochastic, forward-supported weight validity: row n lives
    /// on columns ≥ n with nonnegative weights summing to 1.
    pub fn weights_are_forward(&self) -> bool {
        match &self.weights {
            None => true,
            Some(rows) => rows.iter().enumerate().all(|(n, row)| {
                let sum: f64 = row.iter().map(|(_, w)| w).sum();
                row.iter().all(|&(col, w)| w >= 0.0 && col >= n)
                    && (sum - 1.0).abs() < 1e-12
            }),
        }
    }
}

/// Selects n_k with E[Φ*(ξ_{n_k})] ≤ 2^{-k}, so the modular of the
/// pointwise sup is summably controlled:
/// E[Φ*(sup_k|ξ_{n_k}|)] ≤ Σ_k E[Φ*(ξ_{n_k})] ≤ 1.
pub fn order_bounded_subsequence(
    seq: &RvSequence,
    phistar: &YoungFunction,
) -> Result<KomlosCertificate, KomlosError> {
    let modulars: Vec<f64> = seq
        .terms()
        .iter()
        .map(|t| t.expect(|v| phistar.eval(v)))
        .collect();
    let zero = RandomVariable::zero(seq.terms()[0].space().clone());
    let mut indices = Vec::new();
    let mut cursor = 0usize;
    let mut k = 1i32;
    // every selection keeps shrinking the budget; stop when the prefix
    // cannot honor the next one
    loop {
        let budget = 2f64.powi(-k);
        // relative slack absorbs round-off at exact-boundary fixtures
        match (cursor..seq.len()).find(|&n| modulars[n] <= budget * (1.0 + 1e-9)) {
            Some(n) => {
                indices.push(n);
                cursor = n + 1;
                k += 1;
            }
            None => break,
        }
        if cursor >= seq.len() {
            break;
        }
    }
    if indices.len() < 2 {
        return Err(KomlosError::ExtractionIncomplete {
            stage: "subsequence selection",
            achieved: indices.len(),
            wanted: 2,
        });
    }
    let selected: Vec<RandomVariable> = indices.iter().map(|&n| seq.terms()[n].abs()).collect();
    let order_bound = RandomVariable::sup_of(&selected)?;
    let modular_sum: f64 = indices.iter().map(|&n| modulars[n]).sum();
    let as_convergence = indices
        .iter()
        .map(|&n| l0_metric(&seq.terms()[n], &zero))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KomlosCertificate {
        indices: indices.clone(),
        weights: None,
        limit: zero,
        order_bound_norm: luxemburg_norm(&order_bound, phistar).value,
        order_bound,
        as_convergence,
        modular_sum,
        stage_log: vec![format!(
            "selected {} indices with geometric modular budget {modular_sum:.3e}",
            indices.len()
        )],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractMode {
    Cesaro,
    ForwardConvex,
}

/// End-to-end extraction: center at the declared limit, split off the
/// disjoint spikes, select a modular-summable subsequence of the
/// centered terms, and recombine. `Cesaro` takes plain Cesàro means of
/// the selected subsequence; `ForwardConvex` first forms tail block
/// means so the composed weights stay supported in {k ≥ n}.
pub fn komlos_extract(
    seq: &RvSequence,
    phistar: &YoungFunction,
    mode: ExtractMode,
) -> Result<KomlosCertificate, KomlosError> {
    let space = seq.terms()[0].space().clone();
    let limit = seq
        .declared_limit()
        .cloned()
        .unwrap_or_else(|| RandomVariable::zero(space.clone()));
    let mut stage_log = Vec::new();

    type WeightRows = Vec<Vec<(usize, f64)>>;
    let (stage_a, a_rows): (Vec<RandomVariable>, Option<WeightRows>) = match mode {
        ExtractMode::Cesaro => (seq.terms().to_vec(), None),
        ExtractMode::ForwardConvex => {
            // block means η_n = (ξ_n + ⋯ + ξ_{2n-1})/n, forward by
            // construction (0-indexed rows: row n on columns [n, 2n])
            let count = seq.len() / 2;
            if count < 2 {
                return Err(KomlosError::ExtractionIncomplete {
                    stage: "forward block means",
                    achieved: seq.len(),
                    wanted: 4,
                });
            }
            let mut blocks = Vec::with_capacity(count);
            let mut rows = Vec::with_capacity(count);
            for n in 0..count {
                let len = n + 1;
                let mut acc = RandomVariable::zero(space.clone());
                let mut row = Vec::with_capacity(len);
                for j in n..n + len {
                    acc = acc.add(&seq.terms()[j])?;
                    row.push((j, 1.0 / len as f64));
                }
                blocks.push(acc.scale(1.0 / len as f64));
                rows.push(row);
            }
            stage_log.push(format!("formed {count} forward block means"));
            (blocks, Some(rows))
        }
    };

    // center at the limit and normalize into the modular unit ball
    let centered: Vec<RandomVariable> = stage_a
        .iter()
        .map(|t| t.sub(&limit))
        .collect::<Result<Vec<_>, _>>()?;
    // sanity guard: the centered sequence must trend toward 0 in l0,
    // otherwise the declared limit cannot be the extraction target
    if centered.len() >= 4 {
        let zero = RandomVariable::zero(space.clone());
        let l0_first = l0_metric(&centered[0], &zero)?;
        let l0_last = l0_metric(centered.last().unwrap(), &zero)?;
        if l0_last > l0_first + 1e-9 && l0_last > 1e-6 {
            return Err(KomlosError::PreconditionUnmet(format!(
                "l0 distance to the declared limit grows along the prefix ({l0_first} -> {l0_last})"
            )));
        }
    }
    let scale = centered
        .iter()
        .map(|t| luxemburg_norm(t, phistar).value)
        .fold(0.0f64, f64::max)
        .max(1.0);
    let scaled: Vec<RandomVariable> = centered.iter().map(|t| t.scale(1.0 / scale)).collect();
    stage_log.push(format!("centered at limit, normalized by {scale:.6}"));

    let split = kp_split(&RvSequence::new(scaled, 1.0)?, phistar)?;
    stage_log.push(format!(
        "split: max threshold {:.3e}, {} spike atoms",
        split.thresholds.last().copied().unwrap_or(0.0),
        split.disjoint_sets.iter().map(Vec::len).sum::<usize>()
    ));

    // subsequence selection on the regular (uniformly integrable) part
    let reg_seq = RvSequence::new(split.regular.clone(), 1.0)?;
    let sub = order_bounded_subsequence(&reg_seq, phistar)?;
    stage_log.extend(sub.stage_log.iter().cloned());
    let picked = &sub.indices;

    // recombine the original (uncentered) stage-A terms over the
    // selected indices; forward mode uses shifted blocks so that
    // combination n only touches selection slots in [n, 2n), keeping
    // the composed weights in the forward hull
    let slot_sets: Vec<Vec<usize>> = match mode {
        ExtractMode::Cesaro => (1..=picked.len()).map(|n| (0..n).collect()).collect(),
        ExtractMode::ForwardConvex => (1..=picked.len() / 2)
            .map(|n| (n..2 * n).collect())
            .collect(),
    };
    let combos: Vec<RandomVariable> = slot_sets
        .iter()
        .map(|slots| {
            let mut acc = RandomVariable::zero(space.clone());
            for &s in slots {
                acc = acc.add(&stage_a[picked[s]])?;
            }
            Ok(acc.scale(1.0 / slots.len() as f64))
        })
        .collect::<Result<Vec<_>, KomlosError>>()?;

    // order bound: |ξ̄_n| ≤ |limit| + sup_k|ζ^r_{n_k}| + 2Σ_k (1/k)|ζ^s_{n_k}|
    // (regular parts are sup-bounded; singular parts are disjoint, so
    // a length-n tail mean touches each atom through at most one term
    // of index k ≤ 2n, costing at most 2/k of its height), scaled back.
    let reg_sup = RandomVariable::sup_of(
        &picked.iter().map(|&i| split.regular[i].abs()).collect::<Vec<_>>(),
    )?;
    let mut sing_sum = RandomVariable::zero(space.clone());
    for (k, &i) in picked.iter().enumerate() {
        sing_sum = sing_sum.add(&split.singular[i].map(|v| v.abs() / (k + 1) as f64))?;
    }
    let order_bound = limit
        .abs()
        .add(&reg_sup.scale(scale))?
        .add(&sing_sum.scale(2.0 * scale))?;

    let as_convergence = combos
        .iter()
        .map(|c| l0_metric(c, &limit))
        .collect::<Result<Vec<_>, _>>()?;

    // compose weights when stage A was itself a combination
    let weights = match (&a_rows, mode) {
        (Some(rows), ExtractMode::ForwardConvex) => Some(
            slot_sets
                .iter()
                .map(|slots| {
                    let mut acc: std::collections::BTreeMap<usize, f64> =
                        std::collections::BTreeMap::new();
                    for &s in slots {
                        for &(col, w) in &rows[picked[s]] {
                            *acc.entry(col).or_insert(0.0) += w / slots.len() as f64;
                        }
                    }
                    acc.into_iter().collect()
                })
                .collect(),
        ),
        _ => None,
    };

    for (n, c) in combos.iter().enumerate() {
        if !c.abs().le(&order_bound, 1e-9)? {
            return Err(KomlosError::PreconditionUnmet(format!(
                "order bound violated at combination {n}"
            )));
        }
    }

    Ok(KomlosCertificate {
        indices: picked.clone(),
        weights,
        limit,
        order_bound_norm: luxemburg_norm(&order_bound, phistar).value,
        order_bound,
        as_convergence,
        modular_sum: sub.modular_sum,
        stage_log,
    })
}

/// One ladder level of the obstruction construction: the witness
/// pairing floor and the l0 size of the last tested spike.
#[derive(Debug, Clone, Serialize)]
pub struct LevelObstruction {
    pub resolution: u32,
    pub n_blocks: usize,
    pub eps_floor: f64,
    pub l0_last: f64,
}

/// Outcome of the obstruction search: when Φ fails Δ2, a single
/// ζ_0 ∈ B_Φ keeps a positive pairing ε against a whole l0-null
/// sequence of unit-ball spikes — blocking any l0-limit other than
/// the (impossible) pairing limit.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub levels: Vec<LevelObstruction>,
    pub eps_first: f64,
    pub eps_last: f64,
    pub obstruction_found: bool,
    pub convex_floor_ok: bool,
}

/// Per ladder level: blocks B_n = [2^{-n}, 2^{-n+1}), a budget split
/// s_n ∝ 2^{-n/2} with Σs_n = 1, ζ_0 = Σ Φ⁻¹(s_n 2^n)·1_{B_n} (so
/// E[Φ(ζ_0)] = 1), spikes η_n = (Φ*)⁻¹(2^n)·1_{B_n} (so
/// E[Φ*(η_n)] = 1), and ε_n = E[ζ_0 η_n]. The report records whether
/// min_n ε_n stays bounded below across levels.
pub fn non_delta2_counterexample(
    phi: &YoungFunction,
    ladder: &[u32],
) -> Result<ObstructionReport, KomlosError> {
    if ladder.len() < 2 {
        return Err(KomlosError::PreconditionUnmet(
            "need at least two ladder levels".into(),
        ));
    }
    let phistar = phi.conjugate();
    let mut levels = Vec::new();
    let mut convex_floor_ok = true;
    for &res in ladder {
        let space = DyadicSpace::uniform(res);
        let n_blocks = res as usize;
        let norm: f64 = (1..=n_blocks).map(|n| 2f64.powf(-(n as f64) / 2.0)).sum();
        let mut zeta0 = RandomVariable::zero(space.clone());
        let mut spikes = Vec::with_capacity(n_blocks);
        let mut eps = Vec::with_capacity(n_blocks);
        for n in 1..=n_blocks {
            let block = space.atoms_in(2f64.powi(-(n as i32)), 2f64.powi(-(n as i32) + 1));
            let p_block = 2f64.powi(-(n as i32));
            let s_n = 2f64.powf(-(n as f64) / 2.0) / norm;
            let v_n = phi.inverse(s_n / p_block);
            let t_n = phistar.inverse(1.0 / p_block);
            zeta0 = zeta0.add(&RandomVariable::indicator(space.clone(), &block, v_n))?;
            let eta = RandomVariable::indicator(space.clone(), &block, t_n);
            eps.push(v_n * t_n * p_block);
            spikes.push(eta);
        }
        let eps_floor = eps.iter().cloned().fold(f64::INFINITY, f64::min);
        // convexity floor: tail block means of the spikes cannot drop
        // the pairing with ζ_0 below min_n ε_n
        for n in 1..=n_blocks / 2 {
            let mut combo = RandomVariable::zero(space.clone());
            for s in &spikes[n - 1..2 * n - 1] {
                combo = combo.add(s)?;
            }
            combo = combo.scale(1.0 / n as f64);
            if zeta0.pair(&combo)? < eps_floor - 1e-9 {
                convex_floor_ok = false;
            }
        }
        let zero = RandomVariable::zero(space);
        let l0_last = l0_metric(spikes.last().unwrap(), &zero)?;
        levels.push(LevelObstruction {
            resolution: res,
            n_blocks,
            eps_floor,
            l0_last,
        });
    }
    let eps_first = levels.first().unwrap().eps_floor;
    let eps_last = levels.last().unwrap().eps_floor;
    let delta2 = delta2_index(phi, &Delta2Config::default())
        .map(|r| r.is_delta2)
        .unwrap_or(false);
    // ε persisting across refinement is the obstruction; a Δ2 Φ must
    // instead show decay (the expected negative control)
    let obstruction_found = !delta2 && eps_last >= 0.5 * eps_first && eps_last > 1e-3;
    Ok(ObstructionReport {
        levels,
        eps_first,
        eps_last,
        obstruction_found,
        convex_floor_ok,
    })
}
