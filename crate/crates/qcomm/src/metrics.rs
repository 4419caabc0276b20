//! Distance measures, entropies, and the inequality checks that relate them.
//!
//! Conventions (crate-wide):
//!
//! * trace distance is the **unhalved** trace norm of the difference,
//!   `‖ρ₁ − ρ₂‖_t ∈ [0, 2]`;
//! * fidelity is the **squared** overlap convention,
//!   `F = ‖√ρ₁ √ρ₂‖_t² ∈ [0, 1]`;
//! * Hellinger distance is `h = √(1 − √F)`;
//! * all entropies are in bits (base-2 logarithms);
//! * eigenvalues at or below [`crate::ENTROPY_EIG_FLOOR`] are treated as
//!   exactly 0 in entropy sums (`0·log 0 = 0`).
//!
//! Relative entropy is infinite precisely when the second state lacks
//! support where the first carries weight; that support condition is
//! semantic, so the result is the tagged [`ExtendedReal::Infinite`] rather
//! than a large float.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::linalg::{eigh, singular_values, CMatrix};
use crate::quantum::{
    hermitian_fn, partial_trace, permute_factors, tensor, DensityMatrix, MatrixFn, PureState,
    TensorLayout,
};
use crate::{Error, Result, Tolerances, ENTROPY_EIG_FLOOR, INEQ_SLACK, LN_2, SUPPORT_WEIGHT_FLOOR};

/// A validated probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validate a probability vector: entries ≥ −1e-12 (tiny negatives are
    /// clamped to 0) and sum within 1e-9 of 1.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidArgument`] naming the violated condition.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument { reason: "distribution must be nonempty".into() });
        }
        if let Some(&bad) = probs.iter().find(|&&p| p < -1e-12 || !p.is_finite()) {
            return Err(Error::InvalidArgument {
                reason: format!("distribution entry {bad} is negative beyond tolerance"),
            });
        }
        let probs: Vec<f64> = probs.into_iter().map(|p| p.max(0.0)).collect();
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument {
                reason: format!("distribution sums to {sum}, not 1"),
            });
        }
        Ok(Distribution { probs })
    }

    /// The uniform distribution on `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        Distribution { probs: vec![1.0 / n as f64; n] }
    }

    /// Borrow the entries.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Whether the distribution has no outcomes (never true after `new`).
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// A real value that may be positive infinity (relative entropy and KL
/// divergence on support mismatch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    /// An ordinary finite value.
    Finite(f64),
    /// Positive infinity from a support mismatch.
    Infinite,
}

impl ExtendedReal {
    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }

    /// Whether the value is finite.
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// Collapse to `f64`, mapping the infinite tag to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtendedReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or the string \"infinity\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedReal, E> {
                if v == "infinity" {
                    Ok(ExtendedReal::Infinite)
                } else {
                    Err(E::custom(format!("unexpected string {v:?}")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Value of one metric together with its named intermediate quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Primary value of the computed metric.
    pub value: ExtendedReal,
    /// Named intermediates (e.g. the fidelity inside a Hellinger distance)
    /// and slack values of the bound checks that apply.
    pub components: BTreeMap<String, ExtendedReal>,
}

/// Trace norm: sum of singular values.
///
/// # Errors
///
/// [`Error::NotSquare`] for non-square input.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(singular_values(m).iter().sum())
}

/// Trace distance `‖ρ₁ − ρ₂‖_t` (unhalved, in `[0, 2]`).
///
/// # Errors
///
/// [`Error::DimMismatch`] when dimensions differ.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimMismatch { expected: r1.dim(), got: r2.dim() });
    }
    trace_norm(&(r1.matrix() - r2.matrix()))
}

/// Trace distance between pure states via the closed form
/// `2·√(1 − |⟨φ₁|φ₂⟩|²)`.
///
/// # Errors
///
/// [`Error::DimMismatch`] when dimensions differ.
pub fn trace_distance_pure(p1: &PureState, p2: &PureState) -> Result<f64> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimMismatch { expected: p1.dim(), got: p2.dim() });
    }
    let overlap_sq = p1.overlap(p2).norm_sqr().min(1.0);
    Ok(2.0 * (1.0 - overlap_sq).sqrt())
}

/// Fidelity `F = ‖√ρ₁ √ρ₂‖_t²` (squared convention, in `[0, 1]`).
///
/// # Errors
///
/// [`Error::DimMismatch`] when dimensions differ.
pub fn fidelity(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimMismatch { expected: r1.dim(), got: r2.dim() });
    }
    let tol = Tolerances::default();
    let s1 = hermitian_fn(r1.matrix(), MatrixFn::Sqrt, &tol)?;
    let s2 = hermitian_fn(r2.matrix(), MatrixFn::Sqrt, &tol)?;
    let t = trace_norm(&(s1 * s2))?;
    Ok((t * t).clamp(0.0, 1.0))
}

/// Hellinger distance `h = √(1 − √F)` (in `[0, 1]`).
///
/// # Errors
///
/// [`Error::DimMismatch`] when dimensions differ.
pub fn hellinger(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    let f = fidelity(r1, r2)?;
    Ok((1.0 - f.sqrt()).max(0.0).sqrt())
}

/// Entropy of an eigenvalue/probability slice in bits, with the
/// [`ENTROPY_EIG_FLOOR`] cutoff for `0·log 0`.
fn entropy_of(values: &[f64]) -> f64 {
    -values.iter().filter(|&&v| v > ENTROPY_EIG_FLOOR).map(|&v| v * v.log2()).sum::<f64>()
}

/// Von Neumann entropy `S(ρ) = −Tr ρ log₂ ρ` in bits, in `[0, log₂ d]`.
pub fn von_neumann_entropy(r: &DensityMatrix) -> f64 {
    entropy_of(r.eigenvalues()).max(0.0)
}

/// Binary entropy `H(p) = −p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

/// Relative entropy `S(ρ₁‖ρ₂) = Tr ρ₁ log₂ ρ₁ − Tr ρ₁ log₂ ρ₂` in bits.
///
/// Returns [`ExtendedReal::Infinite`] exactly when some eigenvector of `ρ₂`
/// with eigenvalue below [`ENTROPY_EIG_FLOOR`] carries `ρ₁`-weight above
/// [`SUPPORT_WEIGHT_FLOOR`] (support mismatch); eigendirections below both
/// floors contribute 0.
///
/// # Errors
///
/// [`Error::DimMismatch`] when dimensions differ.
pub fn relative_entropy(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<ExtendedReal> {
    if r1.dim() != r2.dim() {
        return Err(Error::DimMismatch { expected: r1.dim(), got: r2.dim() });
    }
    let term1 = -von_neumann_entropy(r1);
    let (mu, v) = eigh(r2.matrix())?;
    let mut term2 = 0.0;
    for (j, &mu_j) in mu.iter().enumerate() {
        let v_j = v.column(j);
        // ρ₁-weight on this eigendirection of ρ₂.
        let w_j = (v_j.adjoint() * r1.matrix() * v_j)[(0, 0)].re.max(0.0);
        if mu_j <= ENTROPY_EIG_FLOOR {
            if w_j > SUPPORT_WEIGHT_FLOOR {
                return Ok(ExtendedReal::Infinite);
            }
        } else {
            term2 += w_j * mu_j.log2();
        }
    }
    Ok(ExtendedReal::Finite((term1 - term2).max(0.0)))
}

/// Tensor `ρ_A ⊗ ρ_B` of two reductions of `rho`, permuted so its factor
/// order matches `partial_trace(rho, layout, group_a ∪ group_b)`.
fn product_of_reductions(
    rho: &DensityMatrix,
    layout: &TensorLayout,
    group_a: &[usize],
    group_b: &[usize],
) -> Result<(DensityMatrix, DensityMatrix)> {
    let ka = layout.checked_subset(group_a)?;
    let kb = layout.checked_subset(group_b)?;
    if ka.iter().any(|f| kb.contains(f)) {
        return Err(Error::BadFactors {
            reason: format!("groups {group_a:?} and {group_b:?} overlap"),
        });
    }
    let rho_a = partial_trace(rho, layout, &ka)?;
    let rho_b = partial_trace(rho, layout, &kb)?;
    let mut union: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
    union.sort_unstable();
    let rho_ab = partial_trace(rho, layout, &union)?;
    let product = tensor(&rho_a, &rho_b);
    // Factors of `product` are ka ++ kb; permute into the sorted union order
    // that partial_trace produced.
    let concat: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
    let order: Vec<usize> =
        union.iter().map(|f| concat.iter().position(|g| g == f).expect("disjoint union")).collect();
    let concat_layout = TensorLayout::new(concat.iter().map(|&f| layout.dim(f)).collect())?;
    let (product, _) = permute_factors(&product, &concat_layout, &order)?;
    Ok((rho_ab, product))
}

/// Mutual information `I(A:B) = S(A) + S(B) − S(AB)` in bits between two
/// disjoint factor groups; factors in neither group are traced out first.
///
/// Equals the relative entropy `S(ρ_AB ‖ ρ_A⊗ρ_B)` within 1e-8 (checked by
/// the property suites).
///
/// # Errors
///
/// Layout mismatch or overlapping/invalid factor groups.
pub fn mutual_information(
    rho: &DensityMatrix,
    layout: &TensorLayout,
    group_a: &[usize],
    group_b: &[usize],
) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    let ka = layout.checked_subset(group_a)?;
    let kb = layout.checked_subset(group_b)?;
    if ka.iter().any(|f| kb.contains(f)) {
        return Err(Error::BadFactors {
            reason: format!("groups {group_a:?} and {group_b:?} overlap"),
        });
    }
    let mut union: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
    union.sort_unstable();
    let s_a = von_neumann_entropy(&partial_trace(rho, layout, &ka)?);
    let s_b = von_neumann_entropy(&partial_trace(rho, layout, &kb)?);
    let s_ab = von_neumann_entropy(&partial_trace(rho, layout, &union)?);
    Ok(s_a + s_b - s_ab)
}

/// Mutual information of a two-factor state (groups `[0]` and `[1]`).
pub fn mutual_information_bipartite(rho: &DensityMatrix, layout: &TensorLayout) -> Result<f64> {
    if layout.factors() != 2 {
        return Err(Error::BadFactors {
            reason: format!("expected 2 factors, layout has {}", layout.factors()),
        });
    }
    mutual_information(rho, layout, &[0], &[1])
}

/// Informational distance `D(A:B) = h(ρ_AB, ρ_A ⊗ ρ_B)` between two disjoint
/// factor groups; factors in neither group are traced out first.
///
/// Lies in `[0, 1]`, is symmetric in the groups, shrinks under discarding
/// factors, and satisfies `D ≤ √I(A:B)` (all checked by the property
/// suites).
///
/// # Errors
///
/// Layout mismatch or overlapping/invalid factor groups.
pub fn informational_distance(
    rho: &DensityMatrix,
    layout: &TensorLayout,
    group_a: &[usize],
    group_b: &[usize],
) -> Result<f64> {
    layout.check_dim(rho.dim())?;
    let (rho_ab, product) = product_of_reductions(rho, layout, group_a, group_b)?;
    hellinger(&rho_ab, &product)
}

/// Informational distance of a two-factor state (groups `[0]` and `[1]`).
pub fn informational_distance_bipartite(rho: &DensityMatrix, layout: &TensorLayout) -> Result<f64> {
    if layout.factors() != 2 {
        return Err(Error::BadFactors {
            reason: format!("expected 2 factors, layout has {}", layout.factors()),
        });
    }
    informational_distance(rho, layout, &[0], &[1])
}

/// Classical fidelity `F(p, q) = (Σᵢ √(pᵢ qᵢ))²`.
pub fn classical_fidelity(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimMismatch { expected: p.len(), got: q.len() });
    }
    let s: f64 = p.probs().iter().zip(q.probs()).map(|(&a, &b)| (a * b).sqrt()).sum();
    Ok((s * s).clamp(0.0, 1.0))
}

/// Classical Hellinger distance `√(1 − √F(p, q))`.
pub fn classical_hellinger(p: &Distribution, q: &Distribution) -> Result<f64> {
    Ok((1.0 - classical_fidelity(p, q)?.sqrt()).max(0.0).sqrt())
}

/// Classical KL divergence in bits; infinite on support mismatch.
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<ExtendedReal> {
    if p.len() != q.len() {
        return Err(Error::DimMismatch { expected: p.len(), got: q.len() });
    }
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi <= ENTROPY_EIG_FLOOR {
            continue;
        }
        if qi <= ENTROPY_EIG_FLOOR {
            if pi > SUPPORT_WEIGHT_FLOOR {
                return Ok(ExtendedReal::Infinite);
            }
            continue;
        }
        sum += pi * (pi / qi).log2();
    }
    Ok(ExtendedReal::Finite(sum.max(0.0)))
}

/// Classical ℓ₁ distance `Σᵢ |pᵢ − qᵢ|` (unhalved, in `[0, 2]`).
pub fn l1_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimMismatch { expected: p.len(), got: q.len() });
    }
    Ok(p.probs().iter().zip(q.probs()).map(|(&a, &b)| (a - b).abs()).sum())
}

/// All classical distance measures between two distributions, plus the slack
/// of each classical analogue of the quantum bounds (nonnegative slack means
/// the bound holds).
///
/// Components: `fidelity`, `hellinger`, `kl`, `l1`, and the bound slacks
/// `sandwich_lower_slack` (`½ℓ₁ − h²`), `sandwich_upper_slack`
/// (`√2·h − ½ℓ₁`), `fuchs_vdg_lower_slack` (`½ℓ₁ − (1−√F)`),
/// `fuchs_vdg_upper_slack` (`√(1−F) − ½ℓ₁`), `kl_vs_l1_slack`
/// (`KL − ℓ₁²/(2 ln 2)`), `kl_vs_hellinger_slack` (`KL − 2h²/ln 2`).
/// The primary `value` is the fidelity.
///
/// # Errors
///
/// [`Error::DimMismatch`] when lengths differ.
pub fn classical_metrics(p: &Distribution, q: &Distribution) -> Result<MetricReport> {
    let f = classical_fidelity(p, q)?;
    let h = classical_hellinger(p, q)?;
    let kl = kl_divergence(p, q)?;
    let l1 = l1_distance(p, q)?;
    let mut components = BTreeMap::new();
    let fin = ExtendedReal::Finite;
    components.insert("fidelity".into(), fin(f));
    components.insert("hellinger".into(), fin(h));
    components.insert("kl".into(), kl);
    components.insert("l1".into(), fin(l1));
    components.insert("sandwich_lower_slack".into(), fin(0.5 * l1 - h * h));
    components.insert("sandwich_upper_slack".into(), fin(2f64.sqrt() * h - 0.5 * l1));
    components.insert("fuchs_vdg_lower_slack".into(), fin(0.5 * l1 - (1.0 - f.sqrt())));
    components.insert("fuchs_vdg_upper_slack".into(), fin((1.0 - f).max(0.0).sqrt() - 0.5 * l1));
    let (kl_l1, kl_h) = match kl {
        ExtendedReal::Infinite => (ExtendedReal::Infinite, ExtendedReal::Infinite),
        ExtendedReal::Finite(k) => (fin(k - l1 * l1 / (2.0 * LN_2)), fin(k - 2.0 * h * h / LN_2)),
    };
    components.insert("kl_vs_l1_slack".into(), kl_l1);
    components.insert("kl_vs_hellinger_slack".into(), kl_h);
    Ok(MetricReport { value: fin(f), components })
}

/// Information lower bound from a success probability: `1 − H(p_correct)`.
///
/// For a uniformly distributed bit guessed correctly with probability
/// `p_correct`, the mutual information between the bit and the guess is at
/// least this many bits.
///
/// # Errors
///
/// [`Error::InvalidArgument`] when `p_correct ∉ [0, 1]`.
pub fn fano_bound(p_correct: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_correct) {
        return Err(Error::InvalidArgument {
            reason: format!("p_correct = {p_correct} outside [0, 1]"),
        });
    }
    Ok(1.0 - binary_entropy(p_correct))
}

/// The named inequalities evaluated by [`check_inequality`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityTag {
    /// `S(ρ₁‖ρ₂) ≥ ‖ρ₁−ρ₂‖_t² / (2 ln 2)` — two states.
    RelativeVsTrace,
    /// `S(ρ₁‖ρ₂) ≥ 2 h²(ρ₁,ρ₂) / ln 2` — two states.
    RelativeVsHellinger,
    /// `1 − √F ≤ ½‖ρ₁−ρ₂‖_t ≤ √(1−F)` — two states, chain.
    FuchsVanDeGraaf,
    /// `h² ≤ ½‖ρ₁−ρ₂‖_t ≤ √2·h` — two states, chain.
    Sandwich,
    /// `h²(ρ₁,ρ₂) ≤ 2h²(ρ₁,ρ₃) + 2h²(ρ₃,ρ₂)` — three states.
    QuasiTriangle,
}

impl InequalityTag {
    /// Stable kebab-case name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            InequalityTag::RelativeVsTrace => "relative-vs-trace",
            InequalityTag::RelativeVsHellinger => "relative-vs-hellinger",
            InequalityTag::FuchsVanDeGraaf => "fuchs-vdg",
            InequalityTag::Sandwich => "sandwich",
            InequalityTag::QuasiTriangle => "quasi-triangle",
        }
    }

    /// Number of states the inequality relates.
    pub fn arity(self) -> usize {
        match self {
            InequalityTag::QuasiTriangle => 3,
            _ => 2,
        }
    }

    /// All tags, for enumeration in help text and suites.
    pub fn all() -> [InequalityTag; 5] {
        [
            InequalityTag::RelativeVsTrace,
            InequalityTag::RelativeVsHellinger,
            InequalityTag::FuchsVanDeGraaf,
            InequalityTag::Sandwich,
            InequalityTag::QuasiTriangle,
        ]
    }
}

impl FromStr for InequalityTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        InequalityTag::all().into_iter().find(|t| t.name() == s).ok_or_else(|| Error::UnknownId {
            name: s.into(),
            known: InequalityTag::all().map(|t| t.name()).join(", "),
        })
    }
}

impl fmt::Display for InequalityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluated sides of one inequality instance.
///
/// `slack` is the margin by which the inequality holds: for one-sided bounds
/// it is the oriented difference (lower-bounded side minus bound); for chain
/// inequalities it is the smaller of the two margins. `holds` is
/// `slack ≥ −1e-8`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    /// Which inequality was evaluated.
    pub tag: InequalityTag,
    /// Left side (the bounded-below quantity for one-sided bounds; the chain
    /// lower end otherwise). Infinite for relative entropy on support
    /// mismatch, in which case the bound holds trivially.
    pub lhs: ExtendedReal,
    /// Middle term of a chain inequality, absent for one-sided bounds.
    pub mid: Option<f64>,
    /// Right side.
    pub rhs: f64,
    /// Margin by which the inequality holds (≥ 0 means satisfied exactly).
    pub slack: ExtendedReal,
    /// `slack ≥ −1e-8`.
    pub holds: bool,
}

fn one_sided(tag: InequalityTag, lhs: ExtendedReal, rhs: f64) -> InequalityCheck {
    let slack = match lhs {
        ExtendedReal::Infinite => ExtendedReal::Infinite,
        ExtendedReal::Finite(l) => ExtendedReal::Finite(l - rhs),
    };
    let holds = match slack {
        ExtendedReal::Infinite => true,
        ExtendedReal::Finite(s) => s >= -INEQ_SLACK,
    };
    InequalityCheck { tag, lhs, mid: None, rhs, slack, holds }
}

fn chain(tag: InequalityTag, lhs: f64, mid: f64, rhs: f64) -> InequalityCheck {
    let slack = (mid - lhs).min(rhs - mid);
    InequalityCheck {
        tag,
        lhs: ExtendedReal::Finite(lhs),
        mid: Some(mid),
        rhs,
        slack: ExtendedReal::Finite(slack),
        holds: slack >= -INEQ_SLACK,
    }
}

/// Evaluate one of the named inequalities on concrete states.
///
/// `states` must contain exactly [`InequalityTag::arity`] density matrices
/// of equal dimension.
///
/// # Errors
///
/// [`Error::InvalidArgument`] on wrong arity, [`Error::DimMismatch`] on
/// unequal dimensions.
pub fn check_inequality(tag: InequalityTag, states: &[DensityMatrix]) -> Result<InequalityCheck> {
    if states.len() != tag.arity() {
        return Err(Error::InvalidArgument {
            reason: format!("{} takes {} states, got {}", tag.name(), tag.arity(), states.len()),
        });
    }
    if states.iter().any(|s| s.dim() != states[0].dim()) {
        return Err(Error::DimMismatch {
            expected: states[0].dim(),
            got: states.iter().map(DensityMatrix::dim).find(|&d| d != states[0].dim()).unwrap(),
        });
    }
    match tag {
        InequalityTag::RelativeVsTrace => {
            let lhs = relative_entropy(&states[0], &states[1])?;
            let t = trace_distance(&states[0], &states[1])?;
            Ok(one_sided(tag, lhs, t * t / (2.0 * LN_2)))
        }
        InequalityTag::RelativeVsHellinger => {
            let lhs = relative_entropy(&states[0], &states[1])?;
            let h = hellinger(&states[0], &states[1])?;
            Ok(one_sided(tag, lhs, 2.0 * h * h / LN_2))
        }
        InequalityTag::FuchsVanDeGraaf => {
            let f = fidelity(&states[0], &states[1])?;
            let t = trace_distance(&states[0], &states[1])?;
            Ok(chain(tag, 1.0 - f.sqrt(), 0.5 * t, (1.0 - f).max(0.0).sqrt()))
        }
        InequalityTag::Sandwich => {
            let h = hellinger(&states[0], &states[1])?;
            let t = trace_distance(&states[0], &states[1])?;
            Ok(chain(tag, h * h, 0.5 * t, 2f64.sqrt() * h))
        }
        InequalityTag::QuasiTriangle => {
            let h12 = hellinger(&states[0], &states[1])?;
            let h13 = hellinger(&states[0], &states[2])?;
            let h32 = hellinger(&states[2], &states[1])?;
            let lhs = 2.0 * h13 * h13 + 2.0 * h32 * h32;
            Ok(one_sided(tag, ExtendedReal::Finite(lhs), h12 * h12))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, identity, CVector};
    use crate::quantum::{random_density, rng_from_seed};
    use approx::assert_abs_diff_eq;

    fn pure(amps: Vec<num_complex::Complex64>) -> DensityMatrix {
        DensityMatrix::from_pure(
            &PureState::new(CVector::from_vec(amps), &Tolerances::default()).unwrap(),
        )
    }

    fn basis_state(dim: usize, i: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(dim, i).unwrap())
    }

    fn bell() -> DensityMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        pure(vec![c64(r, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(r, 0.0)])
    }

    #[test]
    fn trace_norm_examples() {
        assert_abs_diff_eq!(trace_norm(&identity(2)).unwrap(), 2.0, epsilon = 1e-12);
        let signed =
            CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0)]));
        assert_abs_diff_eq!(trace_norm(&signed).unwrap(), 2.0, epsilon = 1e-12);
        let rho = random_density(5, 3, &mut rng_from_seed(3)).unwrap();
        assert_abs_diff_eq!(trace_norm(rho.matrix()).unwrap(), 1.0, epsilon = 1e-9);
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(trace_norm(&rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn trace_distance_examples() {
        let z0 = basis_state(2, 0);
        let z1 = basis_state(2, 1);
        assert_abs_diff_eq!(trace_distance(&z0, &z0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&z0, &z1).unwrap(), 2.0, epsilon = 1e-12);
        // |⟨φ₁|φ₂⟩|² = 0.64 → distance 2√0.36 = 1.2.
        let p1 = PureState::basis(2, 0).unwrap();
        let p2 = PureState::new(
            CVector::from_vec(vec![c64(0.8, 0.0), c64(0.6, 0.0)]),
            &Tolerances::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(trace_distance_pure(&p1, &p2).unwrap(), 1.2, epsilon = 1e-9);
        assert_abs_diff_eq!(
            trace_distance(&DensityMatrix::from_pure(&p1), &DensityMatrix::from_pure(&p2)).unwrap(),
            1.2,
            epsilon = 1e-9
        );
    }

    #[test]
    fn fidelity_examples() {
        let rho = random_density(3, 2, &mut rng_from_seed(5)).unwrap();
        assert_abs_diff_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-9);
        let z0 = basis_state(2, 0);
        let z1 = basis_state(2, 1);
        assert_abs_diff_eq!(fidelity(&z0, &z1).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(fidelity(&mixed, &z0).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn hellinger_examples() {
        let rho = random_density(4, 4, &mut rng_from_seed(7)).unwrap();
        assert_abs_diff_eq!(hellinger(&rho, &rho).unwrap(), 0.0, epsilon = 1e-7);
        let z0 = basis_state(2, 0);
        let z1 = basis_state(2, 1);
        assert_abs_diff_eq!(hellinger(&z0, &z1).unwrap(), 1.0, epsilon = 1e-9);
        let mixed = DensityMatrix::maximally_mixed(2);
        let expect = (1.0 - 0.5f64.sqrt()).sqrt();
        assert_abs_diff_eq!(hellinger(&mixed, &z0).unwrap(), expect, epsilon = 1e-6);
        assert_abs_diff_eq!(expect, 0.541196, epsilon = 1e-6);
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&basis_state(2, 0)), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(2)),
            1.0,
            epsilon = 1e-12
        );
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), 0.811278, epsilon = 1e-6);
    }

    #[test]
    fn relative_entropy_matches_classical_kl_on_diagonals() {
        let p = [0.2, 0.3, 0.5];
        let q = [0.4, 0.4, 0.2];
        let rp = DensityMatrix::diagonal(&p).unwrap();
        let rq = DensityMatrix::diagonal(&q).unwrap();
        // Independent classical KL oracle.
        let expect: f64 = p.iter().zip(&q).map(|(&a, &b)| a * (a / b).log2()).sum();
        let got = relative_entropy(&rp, &rq).unwrap().finite().unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-9);
        assert_abs_diff_eq!(
            relative_entropy(&rp, &rp).unwrap().finite().unwrap(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn relative_entropy_flags_support_mismatch() {
        let z0 = basis_state(2, 0);
        let z1 = basis_state(2, 1);
        assert_eq!(relative_entropy(&z0, &z1).unwrap(), ExtendedReal::Infinite);
        // Reverse containment is fine: S(|0⟩⟨0| ‖ I/2) = 1.
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(
            relative_entropy(&z0, &mixed).unwrap().finite().unwrap(),
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn mutual_information_examples() {
        let layout = TensorLayout::bipartite(2, 2);
        let mut rng = rng_from_seed(11);
        let a = random_density(2, 2, &mut rng).unwrap();
        let b = random_density(2, 1, &mut rng).unwrap();
        let product = tensor(&a, &b);
        assert_abs_diff_eq!(
            mutual_information_bipartite(&product, &layout).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            mutual_information_bipartite(&bell(), &layout).unwrap(),
            2.0,
            epsilon = 1e-9
        );
        // Perfectly correlated classical bits carry 1 bit.
        let corr = DensityMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_abs_diff_eq!(
            mutual_information_bipartite(&corr, &layout).unwrap(),
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn mutual_information_cross_checks_against_relative_entropy() {
        let mut rng = rng_from_seed(13);
        let layout = TensorLayout::bipartite(2, 3);
        for _ in 0..10 {
            let rho = random_density(6, 6, &mut rng).unwrap();
            let i = mutual_information_bipartite(&rho, &layout).unwrap();
            let (rho_ab, product) = product_of_reductions(&rho, &layout, &[0], &[1]).unwrap();
            let s = relative_entropy(&rho_ab, &product).unwrap().finite().unwrap();
            assert_abs_diff_eq!(i, s, epsilon = 1e-8);
        }
    }

    #[test]
    fn informational_distance_examples() {
        let layout = TensorLayout::bipartite(2, 2);
        let mut rng = rng_from_seed(17);
        let a = random_density(2, 2, &mut rng).unwrap();
        let b = random_density(2, 2, &mut rng).unwrap();
        let product = tensor(&a, &b);
        assert_abs_diff_eq!(
            informational_distance_bipartite(&product, &layout).unwrap(),
            0.0,
            epsilon = 1e-6
        );
        // Bell state: F(|Φ⁺⟩⟨Φ⁺|, I/4) = 0.25, so D = √(1−√0.25) = √0.5.
        let d = informational_distance_bipartite(&bell(), &layout).unwrap();
        assert_abs_diff_eq!(d, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-6);
        // Symmetry under swapping the groups.
        let rho = random_density(4, 4, &mut rng).unwrap();
        let d_ab = informational_distance(&rho, &layout, &[0], &[1]).unwrap();
        let d_ba = informational_distance(&rho, &layout, &[1], &[0]).unwrap();
        assert_abs_diff_eq!(d_ab, d_ba, epsilon = 1e-9);
    }

    #[test]
    fn classical_metrics_examples() {
        let p = Distribution::new(vec![0.5, 0.5]).unwrap();
        let r = classical_metrics(&p, &p).unwrap();
        assert_eq!(r.value, ExtendedReal::Finite(1.0));
        assert_eq!(r.components["hellinger"], ExtendedReal::Finite(0.0));
        assert_eq!(r.components["kl"], ExtendedReal::Finite(0.0));
        assert_eq!(r.components["l1"], ExtendedReal::Finite(0.0));

        let e0 = Distribution::new(vec![1.0, 0.0]).unwrap();
        let e1 = Distribution::new(vec![0.0, 1.0]).unwrap();
        let r = classical_metrics(&e0, &e1).unwrap();
        assert_eq!(r.value, ExtendedReal::Finite(0.0));
        assert_eq!(r.components["hellinger"], ExtendedReal::Finite(1.0));
        assert_eq!(r.components["l1"], ExtendedReal::Finite(2.0));
        assert_eq!(r.components["kl"], ExtendedReal::Infinite);

        let q = Distribution::new(vec![0.25, 0.75]).unwrap();
        let r = classical_metrics(&p, &q).unwrap();
        let f = r.value.finite().unwrap();
        assert_abs_diff_eq!(f, 0.933013, epsilon = 1e-6);
        // All classical bound slacks must be nonnegative.
        for (name, slack) in &r.components {
            if name.ends_with("_slack") {
                if let ExtendedReal::Finite(s) = slack {
                    assert!(*s >= -1e-12, "{name} = {s}");
                }
            }
        }
    }

    #[test]
    fn fano_bound_examples() {
        assert_abs_diff_eq!(fano_bound(1.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fano_bound(0.5).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fano_bound(0.9).unwrap(), 0.531004, epsilon = 1e-6);
        assert!(fano_bound(1.5).is_err());
    }

    #[test]
    fn inequality_checks_on_known_cases() {
        let rho = random_density(3, 3, &mut rng_from_seed(19)).unwrap();
        let c =
            check_inequality(InequalityTag::RelativeVsTrace, &[rho.clone(), rho.clone()]).unwrap();
        assert!(c.holds);
        assert_abs_diff_eq!(c.slack.finite().unwrap(), 0.0, epsilon = 1e-9);

        let z0 = basis_state(2, 0);
        let z1 = basis_state(2, 1);
        let c =
            check_inequality(InequalityTag::FuchsVanDeGraaf, &[z0.clone(), z1.clone()]).unwrap();
        assert!(c.holds);
        assert_abs_diff_eq!(c.lhs.finite().unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.mid.unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.rhs, 1.0, epsilon = 1e-9);

        // Disjoint support makes the relative-entropy bounds trivially true.
        let c = check_inequality(InequalityTag::RelativeVsHellinger, &[z0, z1]).unwrap();
        assert_eq!(c.lhs, ExtendedReal::Infinite);
        assert!(c.holds);

        assert!(matches!(
            "no-such-inequality".parse::<InequalityTag>(),
            Err(Error::UnknownId { .. })
        ));
        assert_eq!("sandwich".parse::<InequalityTag>().unwrap(), InequalityTag::Sandwich);
    }

    #[test]
    fn mutual_information_chain_rule_small_case() {
        let mut rng = rng_from_seed(23);
        let layout = TensorLayout::new(vec![2, 2, 2]).unwrap();
        for _ in 0..5 {
            let rho = random_density(8, 8, &mut rng).unwrap();
            let i_x_yz = mutual_information(&rho, &layout, &[0], &[1, 2]).unwrap();
            let i_x_y = mutual_information(&rho, &layout, &[0], &[1]).unwrap();
            let i_xy_z = mutual_information(&rho, &layout, &[0, 1], &[2]).unwrap();
            let i_y_z = mutual_information(&rho, &layout, &[1], &[2]).unwrap();
            assert_abs_diff_eq!(i_x_yz, i_x_y + i_xy_z - i_y_z, epsilon = 1e-8);
            assert!(i_x_yz >= i_x_y - 1e-8, "strong sub-additivity violated");
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![0.5, -0.5, 1.0]).is_err());
        let d = Distribution::new(vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert!(d.probs()[1] >= 0.0);
        let u = Distribution::uniform(4);
        assert_abs_diff_eq!(u.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn extended_real_serde_round_trip() {
        let f = ExtendedReal::Finite(1.5);
        let i = ExtendedReal::Infinite;
        assert_eq!(serde_json::to_string(&f).unwrap(), "1.5");
        assert_eq!(serde_json::to_string(&i).unwrap(), "\"infinity\"");
        assert_eq!(serde_json::from_str::<ExtendedReal>("1.5").unwrap(), f);
        assert_eq!(serde_json::from_str::<ExtendedReal>("\"infinity\"").unwrap(), i);
    }
}
