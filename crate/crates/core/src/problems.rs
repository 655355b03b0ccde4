//! Benchmark problems with seeded instance transformations and expert-assigned
//! landscape property labels.
//!
//! A problem is identified by `(function_id, dim, instance_id)`. Instance 0 is
//! the identity transformation (optimum at the origin with value zero); any
//! other instance id deterministically seeds a shift of the optimum, an offset
//! of the optimal value and, for the functions that use one, an orthogonal
//! rotation of the decision space.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

/// Stream tag separating instance-transform seeds from sampling seeds.
const INSTANCE_SEED_STREAM: u64 = 0x7072_6f62_6c65_6d73;

/// Default box constraint, `[-5, 5]` in every coordinate.
pub const DEFAULT_BOUND: f64 = 5.0;

/// Optimum shifts are drawn uniformly from `[-4, 4]` per coordinate.
const SHIFT_RANGE: f64 = 4.0;

/// Optimal values are drawn uniformly from `[-100, 100]`.
const F_OPT_RANGE: f64 = 100.0;

/// Location of the single-coordinate optimum of `w * sin(sqrt(|w|))`.
const SCHWEFEL_OPT: f64 = 420.968_746_227_503_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionId {
    F1,
    F3,
    F8,
    F16,
    F20,
    F24,
}

impl FunctionId {
    pub const ALL: [FunctionId; 6] = [
        FunctionId::F1,
        FunctionId::F3,
        FunctionId::F8,
        FunctionId::F16,
        FunctionId::F20,
        FunctionId::F24,
    ];

    /// Numeric id used in seeds and file names.
    pub fn code(self) -> u64 {
        match self {
            FunctionId::F1 => 1,
            FunctionId::F3 => 3,
            FunctionId::F8 => 8,
            FunctionId::F16 => 16,
            FunctionId::F20 => 20,
            FunctionId::F24 => 24,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::F1 => "sphere",
            FunctionId::F3 => "rastrigin",
            FunctionId::F8 => "rosenbrock",
            FunctionId::F16 => "weierstrass",
            FunctionId::F20 => "schwefel",
            FunctionId::F24 => "bi_rastrigin",
        }
    }

    /// Whether the instance transformation includes a seeded rotation.
    fn uses_rotation(self) -> bool {
        matches!(self, FunctionId::F16 | FunctionId::F20 | FunctionId::F24)
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.code())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches(['f', 'F']);
        match trimmed {
            "1" => Ok(FunctionId::F1),
            "3" => Ok(FunctionId::F3),
            "8" => Ok(FunctionId::F8),
            "16" => Ok(FunctionId::F16),
            "20" => Ok(FunctionId::F20),
            "24" => Ok(FunctionId::F24),
            _ => Err(Error::UnsupportedFunction(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multimodality {
    None,
    Low,
    Med,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalStructure {
    None,
    Weak,
    Med,
    Strong,
    Deceptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Funnel {
    Yes,
    None,
}

/// The three categorical high-level landscape properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Multimodality,
    GlobalStructure,
    Funnel,
}

impl Property {
    pub const ALL: [Property; 3] = [
        Property::Multimodality,
        Property::GlobalStructure,
        Property::Funnel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Multimodality => "multimodality",
            Property::GlobalStructure => "global_structure",
            Property::Funnel => "funnel",
        }
    }

    /// Size of the closed label alphabet of this property.
    pub fn class_count(self) -> usize {
        match self {
            Property::Multimodality => 4,
            Property::GlobalStructure => 5,
            Property::Funnel => 2,
        }
    }

    /// Name of a class in the fixed alphabet ordering.
    pub fn class_name(self, index: usize) -> &'static str {
        match self {
            Property::Multimodality => ["none", "low", "med", "high"][index],
            Property::GlobalStructure => ["none", "weak", "med", "strong", "deceptive"][index],
            Property::Funnel => ["yes", "none"][index],
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expert-assigned label triple. Constant per function id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PropertyLabels {
    pub multimodality: Multimodality,
    pub global_structure: GlobalStructure,
    pub funnel: Funnel,
}

impl PropertyLabels {
    /// Index of this labelling within `property`'s fixed alphabet ordering.
    pub fn class_index(&self, property: Property) -> usize {
        match property {
            Property::Multimodality => self.multimodality as usize,
            Property::GlobalStructure => self.global_structure as usize,
            Property::Funnel => self.funnel as usize,
        }
    }

    /// Builds a labelling from per-property class indices.
    pub fn from_indices(multimodality: usize, global_structure: usize, funnel: usize) -> Self {
        let m = [
            Multimodality::None,
            Multimodality::Low,
            Multimodality::Med,
            Multimodality::High,
        ][multimodality];
        let g = [
            GlobalStructure::None,
            GlobalStructure::Weak,
            GlobalStructure::Med,
            GlobalStructure::Strong,
            GlobalStructure::Deceptive,
        ][global_structure];
        let f = [Funnel::Yes, Funnel::None][funnel];
        PropertyLabels {
            multimodality: m,
            global_structure: g,
            funnel: f,
        }
    }
}

/// High-level property labels of the supported benchmark functions.
pub fn labels(function_id: FunctionId) -> PropertyLabels {
    use Funnel as Fu;
    use GlobalStructure as G;
    use Multimodality as M;
    let (multimodality, global_structure, funnel) = match function_id {
        FunctionId::F1 => (M::None, G::None, Fu::Yes),
        FunctionId::F3 => (M::High, G::Strong, Fu::Yes),
        FunctionId::F8 => (M::Low, G::None, Fu::Yes),
        FunctionId::F16 => (M::High, G::Med, Fu::None),
        FunctionId::F20 => (M::Med, G::Deceptive, Fu::Yes),
        FunctionId::F24 => (M::High, G::Weak, Fu::Yes),
    };
    PropertyLabels {
        multimodality,
        global_structure,
        funnel,
    }
}

/// Component-wise box constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Array1<f64>,
    pub upper: Array1<f64>,
}

impl Bounds {
    pub fn new(lower: Array1<f64>, upper: Array1<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (index, (&l, &u)) in lower.iter().zip(upper.iter()).enumerate() {
            if !(l < u) {
                return Err(Error::InvalidBounds {
                    index,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// `[-half_width, half_width]` in every coordinate.
    pub fn symmetric(dim: usize, half_width: f64) -> Self {
        Bounds {
            lower: Array1::from_elem(dim, -half_width),
            upper: Array1::from_elem(dim, half_width),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(&v, (&l, &u))| v >= l && v <= u)
    }

    /// Scalar envelope `(min lower, max upper)`, used to normalize projected
    /// coordinates that no longer align with the original axes.
    pub fn scalar_span(&self) -> (f64, f64) {
        let lo = self.lower.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.upper.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// A concrete, evaluatable benchmark instance.
///
/// Immutable after construction; `evaluate` is pure and thread-safe.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub function_id: FunctionId,
    pub dim: usize,
    pub instance_id: u64,
    pub bounds: Bounds,
    pub x_opt: Array1<f64>,
    pub f_opt: f64,
    /// Orthogonal decision-space rotation; identity when the function does not
    /// use one or for instance 0.
    pub rotation: Array2<f64>,
}

/// Constructs a problem instance. Deterministic in all arguments.
pub fn make_problem(
    function_id: FunctionId,
    dim: usize,
    instance_id: u64,
) -> Result<ProblemInstance> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    let bounds = Bounds::symmetric(dim, DEFAULT_BOUND);
    let (x_opt, f_opt, rotation) = if instance_id == 0 {
        (Array1::zeros(dim), 0.0, Array2::eye(dim))
    } else {
        let seed = seeds::derive_seed(
            INSTANCE_SEED_STREAM,
            &[function_id.code(), dim as u64, instance_id],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x_opt = Array1::from_iter(
            (0..dim).map(|_| rng.random_range(-SHIFT_RANGE..=SHIFT_RANGE)),
        );
        let f_opt = rng.random_range(-F_OPT_RANGE..=F_OPT_RANGE);
        let rotation = if function_id.uses_rotation() {
            seeded_rotation(dim, &mut rng)
        } else {
            Array2::eye(dim)
        };
        (x_opt, f_opt, rotation)
    };
    Ok(ProblemInstance {
        function_id,
        dim,
        instance_id,
        bounds,
        x_opt,
        f_opt,
        rotation,
    })
}

impl ProblemInstance {
    /// Evaluates the fitness at `x`. Points outside the box constraints are
    /// permitted; enforcing bounds is the caller's responsibility.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        let value = match self.function_id {
            FunctionId::F1 => self.sphere(x),
            FunctionId::F3 => self.rastrigin(x),
            FunctionId::F8 => self.rosenbrock(x),
            FunctionId::F16 => self.weierstrass(x),
            FunctionId::F20 => self.schwefel(x),
            FunctionId::F24 => self.bi_rastrigin(x),
        };
        Ok(value)
    }

    fn shifted(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.x_opt.iter())
            .map(|(&v, &o)| v - o)
            .collect()
    }

    /// `rotation * (x - x_opt)`.
    fn rotated_shift(&self, x: &[f64]) -> Vec<f64> {
        let z = self.shifted(x);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.rotation[[i, j]] * z[j]).sum())
            .collect()
    }

    /// Quadratic penalty for leaving the box constraints.
    fn boundary_penalty(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.bounds.upper.iter())
            .map(|(&v, &u)| {
                let excess = v.abs() - u;
                if excess > 0.0 {
                    excess * excess
                } else {
                    0.0
                }
            })
            .sum()
    }

    fn sphere(&self, x: &[f64]) -> f64 {
        let z = self.shifted(x);
        z.iter().map(|v| v * v).sum::<f64>() + self.f_opt
    }

    fn rastrigin(&self, x: &[f64]) -> f64 {
        let mut z = self.shifted(x);
        for v in z.iter_mut() {
            *v = oscillate(*v);
        }
        asymmetric(&mut z, 0.2);
        ill_condition(&mut z, 10.0);
        let d = self.dim as f64;
        let cos_sum: f64 = z.iter().map(|v| (2.0 * std::f64::consts::PI * v).cos()).sum();
        let square_sum: f64 = z.iter().map(|v| v * v).sum();
        10.0 * (d - cos_sum) + square_sum + self.f_opt
    }

    fn rosenbrock(&self, x: &[f64]) -> f64 {
        let scale = ((self.dim as f64).sqrt() / 8.0).max(1.0);
        let z: Vec<f64> = self
            .shifted(x)
            .into_iter()
            .map(|v| scale * v + 1.0)
            .collect();
        let mut total = 0.0;
        for w in z.windows(2) {
            let a = w[0] * w[0] - w[1];
            let b = w[0] - 1.0;
            total += 100.0 * a * a + b * b;
        }
        total + self.f_opt
    }

    fn weierstrass(&self, x: &[f64]) -> f64 {
        let mut z = self.rotated_shift(x);
        for v in z.iter_mut() {
            *v = oscillate(*v);
        }
        ill_condition(&mut z, 0.01);
        let d = self.dim as f64;
        let baseline = weierstrass_series(0.0);
        let mean: f64 = z.iter().map(|&v| weierstrass_series(v)).sum::<f64>() / d;
        let bracket = mean - baseline;
        10.0 * bracket * bracket * bracket + 10.0 / d * self.boundary_penalty(x) + self.f_opt
    }

    fn schwefel(&self, x: &[f64]) -> f64 {
        let v = self.rotated_shift(x);
        let d = self.dim as f64;
        let peak = SCHWEFEL_OPT * SCHWEFEL_OPT.sqrt().sin() / 100.0;
        let mut sum = 0.0;
        let mut penalty = 0.0;
        for &vi in &v {
            let z = SCHWEFEL_OPT + 100.0 * vi;
            sum += z * z.abs().sqrt().sin();
            let excess = z.abs() / 100.0 - 5.0;
            if excess > 0.0 {
                penalty += excess * excess;
            }
        }
        peak - sum / (100.0 * d) + 100.0 * penalty + self.f_opt
    }

    fn bi_rastrigin(&self, x: &[f64]) -> f64 {
        let v = self.rotated_shift(x);
        let d = self.dim as f64;
        let mu0 = 2.5;
        let s = 1.0 - 1.0 / (2.0 * (d + 20.0).sqrt() - 8.2);
        let mu1 = -((mu0 * mu0 - 1.0) / s).sqrt();
        let near: f64 = v.iter().map(|&vi| vi * vi).sum();
        let far: f64 = d + s
            * v.iter()
                .map(|&vi| {
                    let t = vi + mu0 - mu1;
                    t * t
                })
                .sum::<f64>();
        let cos_sum: f64 = v
            .iter()
            .map(|&vi| (2.0 * std::f64::consts::PI * vi).cos())
            .sum();
        near.min(far) + 10.0 * (d - cos_sum) + self.f_opt
    }
}

/// Irregular oscillation transform; strictly monotone, fixes the origin.
fn oscillate(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let log_abs = v.abs().ln();
    let (c1, c2) = if v > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    v.signum() * (log_abs + 0.049 * ((c1 * log_abs).sin() + (c2 * log_abs).sin())).exp()
}

/// Asymmetry transform; identity at and below zero.
fn asymmetric(z: &mut [f64], beta: f64) {
    let d = z.len();
    for (i, v) in z.iter_mut().enumerate() {
        if *v > 0.0 {
            let exponent = 1.0 + beta * (i as f64 / (d - 1) as f64) * v.sqrt();
            *v = v.powf(exponent);
        }
    }
}

/// Diagonal conditioning with per-coordinate factors `alpha^(i / (2(d-1)))`.
fn ill_condition(z: &mut [f64], alpha: f64) {
    let d = z.len();
    for (i, v) in z.iter_mut().enumerate() {
        *v *= alpha.powf(0.5 * i as f64 / (d - 1) as f64);
    }
}

/// Truncated Weierstrass series with 12 terms.
fn weierstrass_series(t: f64) -> f64 {
    let mut total = 0.0;
    let mut a = 1.0;
    let mut b = 1.0;
    for _ in 0..12 {
        total += a * (2.0 * std::f64::consts::PI * b * (t + 0.5)).cos();
        a *= 0.5;
        b *= 3.0;
    }
    total
}

/// Orthonormal matrix from Gram-Schmidt on a seeded Gaussian matrix. The
/// result has determinant +1 and satisfies `R^T R = I` to machine precision.
fn seeded_rotation(dim: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    loop {
        let mut m = Array2::from_shape_fn((dim, dim), |_| rng.sample::<f64, _>(StandardNormal));
        if !orthonormalize_columns(&mut m) {
            continue;
        }
        if determinant(&m) < 0.0 {
            for v in m.column_mut(0).iter_mut() {
                *v = -*v;
            }
        }
        return m;
    }
}

/// Modified Gram-Schmidt with a re-orthogonalization pass. Returns false when
/// a column degenerates, which for Gaussian input is vanishingly rare.
fn orthonormalize_columns(m: &mut Array2<f64>) -> bool {
    let d = m.ncols();
    for j in 0..d {
        for _ in 0..2 {
            for i in 0..j {
                let proj: f64 = m.column(j).dot(&m.column(i));
                for r in 0..d {
                    m[[r, j]] -= proj * m[[r, i]];
                }
            }
        }
        let norm = m.column(j).dot(&m.column(j)).sqrt();
        if norm < 1e-8 {
            return false;
        }
        for r in 0..d {
            m[[r, j]] /= norm;
        }
    }
    true
}

fn determinant(m: &Array2<f64>) -> f64 {
    let d = m.nrows();
    let dm = nalgebra::DMatrix::from_fn(d, d, |r, c| m[[r, c]]);
    dm.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn uniform_point(rng: &mut ChaCha8Rng, bounds: &Bounds) -> Vec<f64> {
        bounds
            .lower
            .iter()
            .zip(bounds.upper.iter())
            .map(|(&l, &u)| rng.random_range(l..=u))
            .collect()
    }

    #[test]
    fn instance_zero_is_identity() {
        let p = make_problem(FunctionId::F1, 2, 0).unwrap();
        assert_eq!(p.x_opt.as_slice().unwrap(), &[0.0, 0.0]);
        assert_eq!(p.f_opt, 0.0);
        assert_eq!(p.rotation, Array2::<f64>::eye(2));
        assert_eq!(p.evaluate(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn rastrigin_identity_instance_is_zero_at_origin() {
        let p = make_problem(FunctionId::F3, 3, 0).unwrap();
        assert!(p.evaluate(&[0.0, 0.0, 0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = make_problem(FunctionId::F3, 5, 7).unwrap();
        let b = make_problem(FunctionId::F3, 5, 7).unwrap();
        assert_eq!(a.x_opt, b.x_opt);
        assert_eq!(a.f_opt, b.f_opt);
        assert_eq!(a.rotation, b.rotation);
    }

    #[test]
    fn shifts_stay_in_range() {
        let p = make_problem(FunctionId::F1, 3, 42).unwrap();
        for &v in p.x_opt.iter() {
            assert!((-4.0..=4.0).contains(&v), "shift component {v}");
        }
        assert!((-100.0..=100.0).contains(&p.f_opt));
    }

    #[test]
    fn optimum_evaluates_to_f_opt() {
        for fid in FunctionId::ALL {
            for dim in [2, 3, 5, 10] {
                for instance in [0, 1, 5, 23] {
                    let p = make_problem(fid, dim, instance).unwrap();
                    let x: Vec<f64> = p.x_opt.to_vec();
                    let got = p.evaluate(&x).unwrap();
                    let tol = 1e-9 * p.f_opt.abs().max(1.0);
                    assert!(
                        (got - p.f_opt).abs() <= tol,
                        "{fid} d={dim} i={instance}: f(x_opt)={got}, f_opt={}",
                        p.f_opt
                    );
                }
            }
        }
    }

    #[test]
    fn rotations_are_orthogonal() {
        for fid in [FunctionId::F16, FunctionId::F20, FunctionId::F24] {
            for dim in [2, 5, 10] {
                let p = make_problem(fid, dim, 9).unwrap();
                let gram = p.rotation.t().dot(&p.rotation);
                for r in 0..dim {
                    for c in 0..dim {
                        let expected = if r == c { 1.0 } else { 0.0 };
                        assert!(
                            (gram[[r, c]] - expected).abs() < 1e-10,
                            "{fid} d={dim} gram[{r},{c}]={}",
                            gram[[r, c]]
                        );
                    }
                }
                assert!((determinant(&p.rotation) - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn shift_only_functions_keep_identity_rotation() {
        for fid in [FunctionId::F1, FunctionId::F3, FunctionId::F8] {
            let p = make_problem(fid, 4, 11).unwrap();
            assert_eq!(p.rotation, Array2::<f64>::eye(4));
        }
    }

    #[test]
    fn optimum_is_no_worse_than_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for fid in FunctionId::ALL {
            for dim in [2, 5] {
                for instance in [0, 3] {
                    let p = make_problem(fid, dim, instance).unwrap();
                    let f_star = p.evaluate(p.x_opt.as_slice().unwrap()).unwrap();
                    let tol = 1e-9 * f_star.abs().max(1.0);
                    for _ in 0..10_000 {
                        let x = uniform_point(&mut rng, &p.bounds);
                        let f = p.evaluate(&x).unwrap();
                        assert!(
                            f_star <= f + tol,
                            "{fid} d={dim} i={instance}: f(x_opt)={f_star} > f({x:?})={f}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn evaluate_rejects_bad_input() {
        let p = make_problem(FunctionId::F1, 3, 0).unwrap();
        assert!(matches!(
            p.evaluate(&[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            p.evaluate(&[0.0, f64::NAN, 0.0]),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn make_problem_rejects_dim_one() {
        assert!(matches!(
            make_problem(FunctionId::F1, 1, 0),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn table_rows_match() {
        use Funnel as Fu;
        use GlobalStructure as G;
        use Multimodality as M;
        let l3 = labels(FunctionId::F3);
        assert_eq!((l3.multimodality, l3.global_structure, l3.funnel), (M::High, G::Strong, Fu::Yes));
        let l16 = labels(FunctionId::F16);
        assert_eq!((l16.multimodality, l16.global_structure, l16.funnel), (M::High, G::Med, Fu::None));
        let l20 = labels(FunctionId::F20);
        assert_eq!((l20.multimodality, l20.global_structure, l20.funnel), (M::Med, G::Deceptive, Fu::Yes));
    }

    #[test]
    fn subset_covers_every_class_value() {
        let mut multim = [false; 4];
        let mut global = [false; 5];
        let mut funnel = [false; 2];
        for fid in FunctionId::ALL {
            let l = labels(fid);
            multim[l.class_index(Property::Multimodality)] = true;
            global[l.class_index(Property::GlobalStructure)] = true;
            funnel[l.class_index(Property::Funnel)] = true;
        }
        assert!(multim.iter().all(|&b| b), "multimodality classes uncovered");
        assert!(global.iter().all(|&b| b), "global structure classes uncovered");
        assert!(funnel.iter().all(|&b| b), "funnel classes uncovered");
    }

    #[test]
    fn function_id_round_trips_through_strings() {
        for fid in FunctionId::ALL {
            let parsed: FunctionId = fid.to_string().parse().unwrap();
            assert_eq!(parsed, fid);
        }
        assert!("F2".parse::<FunctionId>().is_err());
    }

    #[test]
    fn rotation_consumes_rng_after_shift_draws() {
        // The rotation draw must not disturb x_opt/f_opt reproducibility.
        let a = make_problem(FunctionId::F16, 3, 4).unwrap();
        let b = make_problem(FunctionId::F16, 3, 4).unwrap();
        assert_eq!(a.rotation, b.rotation);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let _ = rng.next_u64();
    }
}
