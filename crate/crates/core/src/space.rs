//! Finite dyadic probability spaces and random variables.
//!
//! A [`DyadicSpace`] at resolution `k` is the 2^k dyadic intervals of
//! [0,1) with exact rational weights (uniform 2^-k by default). A
//! [`RandomVariable`] is a vector of atom values; refinement embeds
//! resolution `k` into `k+1` by duplicating values and halving weights.
//! Refinement ladders are the desk-scale stand-in for an atomless space.

use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub type Weight = Ratio<u128>;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("weights must be nonnegative and sum to 1 exactly (got {0})")]
    BadWeights(String),
    #[error("value vector has {got} entries, space has {want} atoms")]
    BadLength { got: usize, want: usize },
    #[error("operands live on different spaces")]
    ShapeMismatch,
    #[error("family must be non-empty")]
    EmptyFamily,
}

/// The 2^k dyadic intervals of [0,1) with per-atom probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSpace {
    resolution: u32,
    weights: Vec<Weight>,
    weights_f64: Vec<f64>,
}

impl DyadicSpace {
    /// Uniform space at resolution `k`: 2^k atoms of weight 2^-k.
    pub fn uniform(k: u32) -> Arc<Self> {
        let n = 1usize << k;
        let w = Ratio::new(1u128, n as u128);
        let weights = vec![w; n];
        let weights_f64 = vec![1.0 / n as f64; n];
        Arc::new(DyadicSpace {
            resolution: k,
            weights,
            weights_f64,
        })
    }

    /// Custom weights at resolution `k`; they must sum to exactly 1.
    pub fn with_weights(k: u32, weights: Vec<Weight>) -> Result<Arc<Self>, SpaceError> {
        let n = 1usize << k;
        if weights.len() != n {
            return Err(SpaceError::BadLength {
                got: weights.len(),
                want: n,
            });
        }
        let total: Weight = weights.iter().fold(Weight::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(SpaceError::BadWeights(total.to_string()));
        }
        let weights_f64 = weights.iter().map(|w| w.to_f64().unwrap()).collect();
        Ok(Arc::new(DyadicSpace {
            resolution: k,
            weights,
            weights_f64,
        }))
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn atoms(&self) -> usize {
        self.weights.len()
    }

    /// Probability of atom `i` as f64.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights_f64[i]
    }

    pub fn weight_exact(&self, i: usize) -> Weight {
        self.weights[i]
    }

    /// The dyadic interval [i/2^k, (i+1)/2^k) of atom `i`.
    pub fn atom_interval(&self, i: usize) -> (f64, f64) {
        let n = self.atoms() as f64;
        (i as f64 / n, (i + 1) as f64 / n)
    }

    /// One refinement step: each atom splits into two, weight halved.
    pub fn refine(&self) -> Arc<Self> {
        let mut weights = Vec::with_capacity(2 * self.atoms());
        let mut weights_f64 = Vec::with_capacity(2 * self.atoms());
        let half = Ratio::new(1u128, 2u128);
        for (w, wf) in self.weights.iter().zip(&self.weights_f64) {
            let split = w * half;
            weights.push(split);
            weights.push(split);
            weights_f64.push(wf * 0.5);
            weights_f64.push(wf * 0.5);
        }
        Arc::new(DyadicSpace {
            resolution: self.resolution + 1,
            weights,
            weights_f64,
        })
    }

    /// Atom indices at this resolution covering `[lo, hi)` for dyadic
    /// endpoints; used by scenario builders to place disjoint sets.
    pub fn atoms_in(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.atoms())
            .filter(|&i| {
                let (a, b) = self.atom_interval(i);
                a >= lo - 1e-12 && b <= hi + 1e-12
            })
            .collect()
    }
}

/// One real value per atom of a [`DyadicSpace`].
#[derive(Debug, Clone)]
pub struct RandomVariable {
    space: Arc<DyadicSpace>,
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(space: Arc<DyadicSpace>, values: Vec<f64>) -> Result<Self, SpaceError> {
        if values.len() != space.atoms() {
            return Err(SpaceError::BadLength {
                got: values.len(),
                want: space.atoms(),
            });
        }
        Ok(RandomVariable { space, values })
    }

    pub fn constant(space: Arc<DyadicSpace>, c: f64) -> Self {
        let n = space.atoms();
        RandomVariable {
            space,
            values: vec![c; n],
        }
    }

    pub fn zero(space: Arc<DyadicSpace>) -> Self {
        Self::constant(space, 0.0)
    }

    /// Indicator of a set of atoms, scaled by `height`.
    pub fn indicator(space: Arc<DyadicSpace>, atoms: &[usize], height: f64) -> Self {
        let mut values = vec![0.0; space.atoms()];
        for &i in atoms {
            values[i] = height;
        }
        RandomVariable { space, values }
    }

    pub fn space(&self) -> &Arc<DyadicSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_space(&self, other: &RandomVariable) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    /// E[f(ξ)] by exact quadrature over atoms.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| self.space.weight(i) * f(v))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|v| v)
    }

    /// E[ξη]; the duality pairing.
    pub fn pair(&self, other: &RandomVariable) -> Result<f64, SpaceError> {
        if !self.same_space(other) {
            return Err(SpaceError::ShapeMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (&a, &b))| self.space.weight(i) * a * b)
            .sum())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RandomVariable {
        RandomVariable {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &RandomVariable,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<RandomVariable, SpaceError> {
        if !self.same_space(other) {
            return Err(SpaceError::ShapeMismatch);
        }
        Ok(RandomVariable {
            space: Arc::clone(&self.space),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn abs(&self) -> RandomVariable {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> RandomVariable {
        self.map(|v| c * v)
    }

    pub fn shift(&self, a: f64) -> RandomVariable {
        self.map(|v| v + a)
    }

    pub fn add(&self, other: &RandomVariable) -> Result<RandomVariable, SpaceError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RandomVariable) -> Result<RandomVariable, SpaceError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Lattice join ξ∨η (atomwise max).
    pub fn sup(&self, other: &RandomVariable) -> Result<RandomVariable, SpaceError> {
        self.zip_with(other, f64::max)
    }

    /// Lattice meet ξ∧η (atomwise min).
    pub fn inf(&self, other: &RandomVariable) -> Result<RandomVariable, SpaceError> {
        self.zip_with(other, f64::min)
    }

    /// Atomwise supremum of finitely many variables.
    pub fn sup_of(vars: &[RandomVariable]) -> Result<RandomVariable, SpaceError> {
        let first = vars.first().ok_or(SpaceError::EmptyFamily)?;
        let mut acc = first.clone();
        for v in &vars[1..] {
            acc = acc.sup(v)?;
        }
        Ok(acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Atomwise ξ ≤ η (up to `tol`).
    pub fn le(&self, other: &RandomVariable, tol: f64) -> Result<bool, SpaceError> {
        if !self.same_space(other) {
            return Err(SpaceError::ShapeMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| a <= b + tol))
    }

    /// Atom indices where the value is nonzero.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Restrict to a set of atoms (zero elsewhere).
    pub fn restrict(&self, atoms: &[usize]) -> RandomVariable {
        let mut values = vec![0.0; self.values.len()];
        for &i in atoms {
            values[i] = self.values[i];
        }
        RandomVariable {
            space: Arc::clone(&self.space),
            values,
        }
    }

    /// Zero out a set of atoms (complement restriction).
    pub fn zero_on(&self, atoms: &[usize]) -> RandomVariable {
        let mut values = self.values.clone();
        for &i in atoms {
            values[i] = 0.0;
        }
        RandomVariable {
            space: Arc::clone(&self.space),
            values,
        }
    }

    /// Re-express at resolution `k + levels`. Moments are preserved
    /// exactly: each atom value is duplicated, each weight halved.
    pub fn refine(&self, levels: u32) -> RandomVariable {
        let mut space = Arc::clone(&self.space);
        let mut values = self.values.clone();
        for _ in 0..levels {
            space = space.refine();
            values = values.iter().flat_map(|&v| [v, v]).collect();
        }
        RandomVariable { space, values }
    }
}

/// The order interval [-ζ, ζ]; membership is atomwise |ξ| ≤ ζ.
#[derive(Debug, Clone)]
pub struct OrderInterval {
    zeta: RandomVariable,
}

impl OrderInterval {
    /// `zeta` must be nonnegative.
    pub fn new(zeta: RandomVariable) -> Result<Self, SpaceError> {
        if zeta.values().iter().any(|&v| v < 0.0) {
            return Err(SpaceError::BadWeights("order bound must be >= 0".into()));
        }
        Ok(OrderInterval { zeta })
    }

    pub fn zeta(&self) -> &RandomVariable {
        &self.zeta
    }

    pub fn contains(&self, xi: &RandomVariable, tol: f64) -> Result<bool, SpaceError> {
        xi.abs().le(&self.zeta, tol)
    }
}

/// E[|ξ-η| ∧ 1]: a metric for convergence in probability.
pub fn l0_metric(xi: &RandomVariable, eta: &RandomVariable) -> Result<f64, SpaceError> {
    let diff = xi.sub(eta)?;
    Ok(diff.expect(|v| v.abs().min(1.0)))
}

/// sup over η in `family` of E[|ηξ| 1_{|ηξ|>N}]: the uniform
/// integrability modulus of the family paired against `xi`.
pub fn ui_modulus(
    family: &[RandomVariable],
    xi: &RandomVariable,
    n_cut: f64,
) -> Result<f64, SpaceError> {
    if family.is_empty() {
        return Err(SpaceError::EmptyFamily);
    }
    let mut worst: f64 = 0.0;
    for eta in family {
        let prod = eta.zip_with(xi, |a, b| (a * b).abs())?;
        let tail = prod.expect(|v| if v > n_cut { v } else { 0.0 });
        worst = worst.max(tail);
    }
    Ok(worst)
}

/// Bring two variables to a common resolution by refining the coarser
/// one. Fails if neither space refines into the other.
pub fn common_refinement(
    a: &RandomVariable,
    b: &RandomVariable,
) -> Result<(RandomVariable, RandomVariable), SpaceError> {
    let (ka, kb) = (a.space().resolution(), b.space().resolution());
    let (ra, rb) = if ka < kb {
        (a.refine(kb - ka), b.clone())
    } else {
        (a.clone(), b.refine(ka - kb))
    };
    if !ra.same_space(&rb) {
        return Err(SpaceError::ShapeMismatch);
    }
    Ok((ra, rb))
}
