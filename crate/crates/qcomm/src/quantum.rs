//! Validated quantum states, tensor-factor bookkeeping, channels, POVMs, and
//! seeded random sampling.
//!
//! The state types enforce their defining invariants at construction:
//!
//! | Type | Invariants |
//! |------|------------|
//! | [`DensityMatrix`] | Hermitian, eigenvalues ≥ −tol (clamped to 0), trace 1 |
//! | [`PureState`] | unit norm |
//! | [`KrausChannel`] | Σ K†K = I (trace preserving, completely positive by construction) |
//! | [`Povm`] | each element PSD, elements sum to I |
//!
//! [`TensorLayout`] records how a composite Hilbert space factors, enabling
//! [`partial_trace`], [`permute_factors`], and the grouped information
//! quantities in [`crate::metrics`]. Factor 0 is the most significant axis of
//! the composite index.
//!
//! Random objects (states, unitaries, channels, POVMs) are sampled from the
//! standard invariant ensembles — Ginibre for states, Haar via QR for
//! unitaries and isometries — and are reproducible from an explicit seed.

use nalgebra::linalg::QR;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::linalg::{
    c64, eigh, hermitian_map, hermiticity_deviation, kron, kron_vec, outer, trace_re, CMatrix,
    CVector,
};
use crate::{Error, Result, Tolerances};

/// Construct the crate's standard RNG from a bare seed.
///
/// Every randomized routine in the crate is reproducible from one `u64` seed
/// through this function.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Derive an independent child seed from a parent seed and an index.
///
/// Used by the experiment harness and property suites to give each trial its
/// own seed so that trials are order-independent and individually
/// reproducible. SplitMix64 finalizer over the combined words.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A validated density matrix: Hermitian, positive semidefinite, trace 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    /// Eigenvalues after clamping and renormalization (unordered).
    eigs: Vec<f64>,
}

impl DensityMatrix {
    /// Validate a candidate matrix and construct a density matrix.
    ///
    /// Checks, in order: squareness, Hermiticity within `tol.herm`,
    /// eigenvalues ≥ `-tol.psd`, `|Tr − 1| ≤ tol.trace`. Eigenvalues in
    /// `[-tol.psd, 0]` are clamped to 0 and the spectrum is renormalized to
    /// sum to exactly 1 (the matrix is rebuilt from its eigensystem when any
    /// clamping occurred).
    ///
    /// # Errors
    ///
    /// [`Error::NotSquare`], [`Error::NotHermitian`], [`Error::NotPositive`],
    /// or [`Error::TraceNotOne`] describing the violated invariant.
    pub fn new(mat: CMatrix, tol: &Tolerances) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        let dev = hermiticity_deviation(&mat)?;
        if dev > tol.herm {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let (vals, vecs) = eigh(&mat)?;
        let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -tol.psd {
            return Err(Error::NotPositive { min_eigenvalue: min_eig });
        }
        let trace: f64 = vals.iter().sum();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::TraceNotOne { trace });
        }
        let needs_clamp = vals.iter().any(|&v| v < 0.0);
        let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let eigs: Vec<f64> = clamped.iter().map(|&v| v / total).collect();
        let mat = if needs_clamp {
            // Rebuild from the clamped, renormalized spectrum.
            let d = CMatrix::from_diagonal(&CVector::from_iterator(
                eigs.len(),
                eigs.iter().map(|&v| c64(v, 0.0)),
            ));
            let m = &vecs * d * vecs.adjoint();
            (&m + m.adjoint()).scale(0.5)
        } else {
            (&mat + mat.adjoint()).scale(0.5 / trace)
        };
        Ok(DensityMatrix { mat, eigs })
    }

    /// Density matrix of a pure state, `|φ⟩⟨φ|`.
    pub fn from_pure(phi: &PureState) -> Self {
        let mat = outer(phi.amplitudes(), phi.amplitudes());
        let mut eigs = vec![0.0; phi.dim()];
        eigs[0] = 1.0;
        DensityMatrix { mat, eigs }
    }

    /// Diagonal density matrix from a probability vector.
    ///
    /// # Errors
    ///
    /// [`Error::NotPositive`] / [`Error::TraceNotOne`] when `probs` is not a
    /// distribution within default tolerances.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let mat = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| c64(p, 0.0)),
        ));
        Self::new(mat, &Tolerances::default())
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
            eigs: vec![1.0 / dim as f64; dim],
        }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Borrow the underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Eigenvalues (clamped nonnegative, summing to 1; unordered).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigs
    }

    /// Number of eigenvalues above the entropy floor.
    pub fn rank(&self) -> usize {
        self.eigs.iter().filter(|&&v| v > crate::ENTROPY_EIG_FLOOR).count()
    }

    /// Purity `Tr ρ² = Σ λ²` (1 for pure states, 1/d for maximally mixed).
    pub fn purity(&self) -> f64 {
        self.eigs.iter().map(|&v| v * v).sum()
    }

    /// Internal constructor for matrices that are valid by construction.
    ///
    /// `eigs` must be the exact spectrum of `mat`.
    pub(crate) fn from_parts_unchecked(mat: CMatrix, eigs: Vec<f64>) -> Self {
        DensityMatrix { mat, eigs }
    }
}

/// A validated pure state vector with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    /// Validate and normalize an amplitude vector.
    ///
    /// The squared norm must be within `tol.trace` of 1; the stored vector is
    /// renormalized exactly.
    ///
    /// # Errors
    ///
    /// [`Error::NormNotOne`] when the squared norm is out of tolerance.
    pub fn new(amps: CVector, tol: &Tolerances) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol.trace {
            return Err(Error::NormNotOne { norm_sq });
        }
        Ok(PureState { amps: amps.scale(1.0 / norm_sq.sqrt()) })
    }

    /// Computational basis state `|index⟩` in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument {
                reason: format!("basis index {index} out of range for dim {dim}"),
            });
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = c64(1.0, 0.0);
        Ok(PureState { amps })
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Borrow the amplitude vector.
    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// Overlap `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        crate::linalg::inner(&self.amps, &other.amps)
    }

    /// Tensor product `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState { amps: kron_vec(&self.amps, &other.amps) }
    }

    pub(crate) fn from_amps_unchecked(amps: CVector) -> Self {
        PureState { amps }
    }
}

/// Dimension list of a tensor-factored Hilbert space.
///
/// Factor 0 is the most significant axis: a composite basis index decomposes
/// as `i = ((c_0 · d_1 + c_1) · d_2 + c_2) …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorLayout {
    dims: Vec<usize>,
}

impl TensorLayout {
    /// Build a layout from per-factor dimensions (each ≥ 1).
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::BadFactors {
                reason: "factor dims must be ≥ 1 and nonempty".into(),
            });
        }
        Ok(TensorLayout { dims })
    }

    /// Convenience constructor for a two-factor layout.
    pub fn bipartite(d0: usize, d1: usize) -> Self {
        TensorLayout { dims: vec![d0, d1] }
    }

    /// Number of factors.
    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of one factor.
    pub fn dim(&self, factor: usize) -> usize {
        self.dims[factor]
    }

    /// All factor dimensions in order.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Product of all factor dimensions.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Layout of the factors in `keep`, in their original order.
    pub fn sublayout(&self, keep: &[usize]) -> Result<TensorLayout> {
        let kept = self.checked_subset(keep)?;
        TensorLayout::new(kept.iter().map(|&f| self.dims[f]).collect())
    }

    /// Validate a factor subset: in-range, no duplicates; returns it sorted.
    pub fn checked_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        let mut s = subset.to_vec();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadFactors { reason: format!("duplicate factor in {subset:?}") });
        }
        if s.iter().any(|&f| f >= self.dims.len()) {
            return Err(Error::BadFactors {
                reason: format!(
                    "factor out of range in {subset:?} for {} factors",
                    self.dims.len()
                ),
            });
        }
        if s.is_empty() {
            return Err(Error::BadFactors { reason: "factor subset must be nonempty".into() });
        }
        Ok(s)
    }

    /// Check that this layout matches a state of the given dimension.
    pub fn check_dim(&self, state_dim: usize) -> Result<()> {
        if self.total_dim() != state_dim {
            return Err(Error::LayoutMismatch { layout_dim: self.total_dim(), state_dim });
        }
        Ok(())
    }

    /// Decompose a composite index into per-factor coordinates.
    fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for f in (0..self.dims.len()).rev() {
            out[f] = index % self.dims[f];
            index /= self.dims[f];
        }
        out
    }

    /// Compose per-factor coordinates into a composite index.
    fn index(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        for (f, &c) in coords.iter().enumerate() {
            idx = idx * self.dims[f] + c;
        }
        idx
    }
}

/// Tensor product of two density matrices (Kronecker product of matrices).
///
/// The left operand becomes the more significant factor group.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let mat = kron(a.matrix(), b.matrix());
    let mut eigs = Vec::with_capacity(a.eigenvalues().len() * b.eigenvalues().len());
    for &x in a.eigenvalues() {
        for &y in b.eigenvalues() {
            eigs.push(x * y);
        }
    }
    DensityMatrix::from_parts_unchecked(mat, eigs)
}

/// Partial trace of `rho` over every factor *not* in `keep`.
///
/// Kept factors retain their original relative order. The output is
/// revalidated as a [`DensityMatrix`] (tracing preserves all invariants up to
/// floating-point noise, which revalidation clamps).
///
/// # Errors
///
/// Layout/state mismatch or an invalid factor subset.
pub fn partial_trace(
    rho: &DensityMatrix,
    layout: &TensorLayout,
    keep: &[usize],
) -> Result<DensityMatrix> {
    layout.check_dim(rho.dim())?;
    let keep = layout.checked_subset(keep)?;
    let mat = partial_trace_matrix(rho.matrix(), layout, &keep);
    DensityMatrix::new(mat, &Tolerances::default())
}

/// Partial trace on a raw matrix; `keep` must be sorted and validated.
pub(crate) fn partial_trace_matrix(m: &CMatrix, layout: &TensorLayout, keep: &[usize]) -> CMatrix {
    let rest: Vec<usize> = (0..layout.factors()).filter(|f| !keep.contains(f)).collect();
    let keep_layout =
        TensorLayout::new(keep.iter().map(|&f| layout.dim(f)).collect()).expect("nonempty");
    let rest_dim: usize = rest.iter().map(|&f| layout.dim(f)).product();
    let rest_layout = if rest.is_empty() {
        None
    } else {
        Some(TensorLayout::new(rest.iter().map(|&f| layout.dim(f)).collect()).expect("nonempty"))
    };
    let kd = keep_layout.total_dim();
    let mut out = CMatrix::zeros(kd, kd);
    let mut full_row = vec![0usize; layout.factors()];
    let mut full_col = vec![0usize; layout.factors()];
    for a in 0..kd {
        let ca = keep_layout.coords(a);
        for b in 0..kd {
            let cb = keep_layout.coords(b);
            let mut acc = c64(0.0, 0.0);
            for r in 0..rest_dim.max(1) {
                let cr = rest_layout.as_ref().map(|l| l.coords(r)).unwrap_or_default();
                for (pos, &f) in keep.iter().enumerate() {
                    full_row[f] = ca[pos];
                    full_col[f] = cb[pos];
                }
                for (pos, &f) in rest.iter().enumerate() {
                    full_row[f] = cr[pos];
                    full_col[f] = cr[pos];
                }
                acc += m[(layout.index(&full_row), layout.index(&full_col))];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Reduced density matrix of a pure state over the kept factors.
///
/// Equivalent to `partial_trace(|ψ⟩⟨ψ|)` but never materializes the full
/// outer product: with the state reshaped as a (keep × rest) coefficient
/// matrix `M`, the reduction is `M M†`.
pub fn pure_reduced(psi: &CVector, layout: &TensorLayout, keep: &[usize]) -> Result<CMatrix> {
    layout.check_dim(psi.len())?;
    let keep = layout.checked_subset(keep)?;
    let rest: Vec<usize> = (0..layout.factors()).filter(|f| !keep.contains(f)).collect();
    let keep_layout = TensorLayout::new(keep.iter().map(|&f| layout.dim(f)).collect())?;
    let kd = keep_layout.total_dim();
    let rd: usize = rest.iter().map(|&f| layout.dim(f)).product::<usize>().max(1);
    let rest_layout = TensorLayout::new(if rest.is_empty() {
        vec![1]
    } else {
        rest.iter().map(|&f| layout.dim(f)).collect()
    })?;
    // M[a, r] = ψ[compose(a on keep, r on rest)]
    let mut coeff = CMatrix::zeros(kd, rd);
    let mut full = vec![0usize; layout.factors()];
    for a in 0..kd {
        let ca = keep_layout.coords(a);
        for r in 0..rd {
            let cr = rest_layout.coords(r);
            for (pos, &f) in keep.iter().enumerate() {
                full[f] = ca[pos];
            }
            for (pos, &f) in rest.iter().enumerate() {
                full[f] = cr[pos];
            }
            coeff[(a, r)] = psi[layout.index(&full)];
        }
    }
    Ok(&coeff * coeff.adjoint())
}

/// Reorder tensor factors.
///
/// `order` lists old factor indices in their new positions (a permutation):
/// `order = [2, 0, 1]` makes old factor 2 the new most significant factor.
/// Returns the permuted state together with its layout.
pub fn permute_factors(
    rho: &DensityMatrix,
    layout: &TensorLayout,
    order: &[usize],
) -> Result<(DensityMatrix, TensorLayout)> {
    layout.check_dim(rho.dim())?;
    let sorted = layout.checked_subset(order)?;
    if sorted.len() != layout.factors() {
        return Err(Error::BadFactors {
            reason: format!("{order:?} is not a permutation of all factors"),
        });
    }
    let new_layout = TensorLayout::new(order.iter().map(|&f| layout.dim(f)).collect())?;
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    // new coords c' at position p correspond to old factor order[p]
    for i in 0..d {
        let ci = new_layout.coords(i);
        let mut old_i = vec![0usize; layout.factors()];
        for (p, &f) in order.iter().enumerate() {
            old_i[f] = ci[p];
        }
        let oi = layout.index(&old_i);
        for j in 0..d {
            let cj = new_layout.coords(j);
            let mut old_j = vec![0usize; layout.factors()];
            for (p, &f) in order.iter().enumerate() {
                old_j[f] = cj[p];
            }
            out[(i, j)] = rho.matrix()[(oi, layout.index(&old_j))];
        }
    }
    // Permutation conjugation preserves the spectrum exactly.
    let eigs = rho.eigenvalues().to_vec();
    Ok((DensityMatrix::from_parts_unchecked(out, eigs), new_layout))
}

/// Hermitian matrix function by eigendecomposition: `f(m) = V diag(f(λ)) V†`.
///
/// `sqrt` clamps eigenvalues in `[-tol.psd, 0]` to 0 first; values below the
/// entropy floor contribute 0 to `log2` (the support convention).
///
/// # Errors
///
/// [`Error::NotHermitian`] when the input fails the Hermiticity check, or
/// [`Error::NotPositive`] for `sqrt` of a matrix with a genuinely negative
/// eigenvalue.
pub fn hermitian_fn(m: &CMatrix, f: MatrixFn, tol: &Tolerances) -> Result<CMatrix> {
    let dev = hermiticity_deviation(m)?;
    if dev > tol.herm {
        return Err(Error::NotHermitian { deviation: dev });
    }
    match f {
        MatrixFn::Sqrt => {
            let (vals, _) = eigh(m)?;
            let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
            if min_eig < -tol.psd {
                return Err(Error::NotPositive { min_eigenvalue: min_eig });
            }
            // Eigenvalues that are zero up to solver noise must map to an
            // exact zero: √ is infinitely steep at 0, so √(±1e-16 noise)
            // would inject ~1e-8 spurious singular values into the root.
            let max_eig = vals.iter().copied().fold(0.0, f64::max);
            let floor = max_eig * crate::ENTROPY_EIG_FLOOR;
            hermitian_map(m, move |v| if v <= floor { 0.0 } else { v.sqrt() })
        }
        MatrixFn::Log2 => {
            hermitian_map(m, |v| if v <= crate::ENTROPY_EIG_FLOOR { 0.0 } else { v.log2() })
        }
    }
}

/// Scalar functions supported by [`hermitian_fn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFn {
    /// Principal square root on the PSD cone.
    Sqrt,
    /// Base-2 logarithm on the support (0 off-support).
    Log2,
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validate Kraus operators: equal shapes `out_dim × in_dim` and
    /// Σ K†K = I within `tol.cptp`.
    ///
    /// # Errors
    ///
    /// [`Error::NotTracePreserving`] with the measured deviation, or
    /// [`Error::InvalidArgument`] for shape problems.
    pub fn new(ops: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument {
                reason: "channel needs ≥ 1 Kraus operator".into(),
            });
        }
        let (out_dim, in_dim) = (ops[0].nrows(), ops[0].ncols());
        if ops.iter().any(|k| k.nrows() != out_dim || k.ncols() != in_dim) {
            return Err(Error::InvalidArgument {
                reason: "Kraus operators must share one shape".into(),
            });
        }
        let mut gram = CMatrix::zeros(in_dim, in_dim);
        for k in &ops {
            gram += k.adjoint() * k;
        }
        let mut dev: f64 = 0.0;
        for i in 0..in_dim {
            for j in 0..in_dim {
                let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
                dev = dev.max((gram[(i, j)] - target).norm());
            }
        }
        if dev > tol.cptp {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        Ok(KrausChannel { ops })
    }

    /// The identity channel in dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        KrausChannel { ops: vec![CMatrix::identity(dim, dim)] }
    }

    /// Full dephasing in the computational basis of dimension `dim`.
    pub fn dephasing(dim: usize) -> Self {
        let ops = (0..dim)
            .map(|i| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(i, i)] = c64(1.0, 0.0);
                p
            })
            .collect();
        KrausChannel { ops }
    }

    /// Input dimension.
    pub fn in_dim(&self) -> usize {
        self.ops[0].ncols()
    }

    /// Output dimension.
    pub fn out_dim(&self) -> usize {
        self.ops[0].nrows()
    }

    /// Borrow the Kraus operators.
    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Apply the channel: `ρ ↦ Σ K ρ K†`, revalidated on output.
    ///
    /// # Errors
    ///
    /// [`Error::DimMismatch`] when the state does not match `in_dim`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim() {
            return Err(Error::DimMismatch { expected: self.in_dim(), got: rho.dim() });
        }
        let mut out = CMatrix::zeros(self.out_dim(), self.out_dim());
        for k in &self.ops {
            out += k * rho.matrix() * k.adjoint();
        }
        DensityMatrix::new(out, &Tolerances::default())
    }
}

/// A positive operator-valued measure.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    /// Validate POVM elements: each Hermitian and PSD within `tol`, summing
    /// to the identity within `tol.cptp`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidPovm`] naming the failed condition.
    pub fn new(elements: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm { reason: "needs ≥ 1 element".into() });
        }
        let dim = elements[0].nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for (m, e) in elements.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::InvalidPovm { reason: format!("element {m} has wrong shape") });
            }
            let dev = hermiticity_deviation(e)?;
            if dev > tol.herm {
                return Err(Error::InvalidPovm {
                    reason: format!("element {m} not Hermitian (dev {dev:.3e})"),
                });
            }
            let (vals, _) = eigh(e)?;
            let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
            if min_eig < -tol.psd {
                return Err(Error::InvalidPovm {
                    reason: format!("element {m} not PSD (min eigenvalue {min_eig:.3e})"),
                });
            }
            sum += e;
        }
        let mut dev: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
                dev = dev.max((sum[(i, j)] - target).norm());
            }
        }
        if dev > tol.cptp {
            return Err(Error::InvalidPovm {
                reason: format!("elements sum to I only within {dev:.3e}"),
            });
        }
        Ok(Povm { elements })
    }

    /// The computational-basis projective measurement.
    pub fn computational(dim: usize) -> Self {
        Povm {
            elements: (0..dim)
                .map(|i| {
                    let mut p = CMatrix::zeros(dim, dim);
                    p[(i, i)] = c64(1.0, 0.0);
                    p
                })
                .collect(),
        }
    }

    /// Number of outcomes.
    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    /// Borrow the elements.
    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Outcome distribution `p_m = Tr(ρ E_m)`.
    ///
    /// Entries are clamped at 0 (eigensolver noise can produce ~-1e-16) and
    /// the vector sums to 1 within validation tolerance.
    ///
    /// # Errors
    ///
    /// [`Error::DimMismatch`] when dimensions differ.
    pub fn measure(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.elements[0].nrows() {
            return Err(Error::DimMismatch { expected: self.elements[0].nrows(), got: rho.dim() });
        }
        Ok(self.elements.iter().map(|e| trace_re(&(e * rho.matrix())).max(0.0)).collect())
    }
}

/// One standard complex Gaussian sample (mean 0, E|z|² = 1).
fn standard_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im).scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Ginibre matrix: independent standard complex Gaussian entries.
pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| standard_complex(rng))
}

/// Haar-random pure state of the given dimension.
pub fn random_pure<R: Rng>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| standard_complex(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return PureState::from_amps_unchecked(v.scale(1.0 / norm));
        }
    }
}

/// Haar-random unitary via QR of a Ginibre matrix with phase fixing.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    let qr = QR::new(g);
    let q = qr.q();
    let r = qr.r();
    // Fix the phase ambiguity so the distribution is exactly Haar.
    let phases = CVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() < 1e-300 {
            c64(1.0, 0.0)
        } else {
            d / d.norm()
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

/// Random density matrix of the given rank: partial trace over a
/// rank-dimensional ancilla of a Haar-random pure state, computed in its
/// equivalent Ginibre form `ρ = GG†/Tr(GG†)` with `G` of shape `dim × rank`.
///
/// # Errors
///
/// [`Error::InvalidArgument`] unless `1 ≤ rank ≤ dim`.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument { reason: format!("rank {rank} not in 1..={dim}") });
    }
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = trace_re(&m);
    DensityMatrix::new(m.scale(1.0 / tr), &Tolerances::default())
}

/// Random CPTP channel on `dim` with the given Kraus count: Kraus blocks of a
/// Haar-random isometry from `dim` to `dim · kraus_count` (Stinespring form).
pub fn random_channel<R: Rng>(dim: usize, kraus_count: usize, rng: &mut R) -> Result<KrausChannel> {
    if kraus_count == 0 {
        return Err(Error::InvalidArgument { reason: "kraus_count must be ≥ 1".into() });
    }
    let tall = kraus_count * dim;
    let g = ginibre(tall, dim, rng);
    let qr = QR::new(g);
    let q = qr.q(); // tall × dim, orthonormal columns
    let r = qr.r();
    let phases = CVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() < 1e-300 {
            c64(1.0, 0.0)
        } else {
            d / d.norm()
        }
    });
    let iso = q * CMatrix::from_diagonal(&phases);
    let ops = (0..kraus_count)
        .map(|m| CMatrix::from_fn(dim, dim, |i, j| iso[(m * dim + i, j)]))
        .collect();
    KrausChannel::new(ops, &Tolerances::default())
}

/// Random POVM with `outcomes` elements: `E_m = S^{-1/2} A_m S^{-1/2}` with
/// `A_m = G_m G_m†` Wishart-positive and `S = Σ A_m`.
pub fn random_povm<R: Rng>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Povm> {
    if outcomes == 0 {
        return Err(Error::InvalidArgument { reason: "POVM needs ≥ 1 outcome".into() });
    }
    let parts: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(dim, dim, rng);
            &g * g.adjoint()
        })
        .collect();
    let mut s = CMatrix::zeros(dim, dim);
    for a in &parts {
        s += a;
    }
    let s_inv_sqrt = hermitian_map(&s, |v| 1.0 / v.max(1e-300).sqrt())?;
    let elements = parts.iter().map(|a| &s_inv_sqrt * a * &s_inv_sqrt).collect();
    Povm::new(elements, &Tolerances::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn density_validation_rejects_bad_inputs() {
        let tol = Tolerances::default();
        // Non-Hermitian.
        let mut m = CMatrix::identity(2, 2).scale(0.5);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m, &tol), Err(Error::NotHermitian { .. })));
        // Negative eigenvalue.
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.2, 0.0), c64(-0.2, 0.0)]));
        assert!(matches!(DensityMatrix::new(m, &tol), Err(Error::NotPositive { .. })));
        // Wrong trace.
        let m = CMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(m, &tol), Err(Error::TraceNotOne { .. })));
    }

    #[test]
    fn density_validation_clamps_eigensolver_noise() {
        // A state with a -5e-10 eigenvalue (inside tolerance) gets clamped
        // to 0 and renormalized.
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c64(1.0 + 5e-10, 0.0),
            c64(-5e-10, 0.0),
        ]));
        let rho = DensityMatrix::new(m, &Tolerances::default()).unwrap();
        let eigs = rho.eigenvalues();
        assert!(eigs.iter().all(|&v| v >= 0.0));
        assert_abs_diff_eq!(eigs.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tensor_trace_is_product_of_traces() {
        let mut rng = rng_from_seed(7);
        let a = random_density(2, 2, &mut rng).unwrap();
        let b = random_density(3, 3, &mut rng).unwrap();
        let ab = tensor(&a, &b);
        assert_eq!(ab.dim(), 6);
        assert_abs_diff_eq!(trace_re(ab.matrix()), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let a = random_density(3, 2, &mut rng).unwrap();
            let b = random_density(4, 4, &mut rng).unwrap();
            let ab = tensor(&a, &b);
            let layout = TensorLayout::bipartite(3, 4);
            let got = partial_trace(&ab, &layout, &[0]).unwrap();
            assert!((got.matrix() - a.matrix()).norm() < 1e-10, "Tr_B(ρ_A⊗ρ_B) ≠ ρ_A");
            let got_b = partial_trace(&ab, &layout, &[1]).unwrap();
            assert!((got_b.matrix() - b.matrix()).norm() < 1e-10, "Tr_A(ρ_A⊗ρ_B) ≠ ρ_B");
        }
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let bell = PureState::new(
            CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)])
                .scale(std::f64::consts::FRAC_1_SQRT_2),
            &Tolerances::default(),
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&bell);
        let layout = TensorLayout::bipartite(2, 2);
        let reduced = partial_trace(&rho, &layout, &[1]).unwrap();
        assert!((reduced.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-12);
    }

    #[test]
    fn pure_reduced_matches_partial_trace() {
        let mut rng = rng_from_seed(13);
        let layout = TensorLayout::new(vec![2, 3, 2]).unwrap();
        let psi = random_pure(12, &mut rng);
        let rho = DensityMatrix::from_pure(&psi);
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let via_matrix = partial_trace(&rho, &layout, &keep).unwrap();
            let via_vector = pure_reduced(psi.amplitudes(), &layout, &keep).unwrap();
            assert!((via_matrix.matrix() - via_vector).norm() < 1e-10, "keep = {keep:?}");
        }
    }

    #[test]
    fn permute_factors_round_trips() {
        let mut rng = rng_from_seed(17);
        let layout = TensorLayout::new(vec![2, 3, 2]).unwrap();
        let rho = random_density(12, 6, &mut rng).unwrap();
        let (p, pl) = permute_factors(&rho, &layout, &[2, 0, 1]).unwrap();
        assert_eq!(pl.dims(), &[2, 2, 3]);
        // Applying the inverse permutation restores the original.
        let (back, _) = permute_factors(&p, &pl, &[1, 2, 0]).unwrap();
        assert!((back.matrix() - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn permute_then_trace_matches_direct_trace() {
        let mut rng = rng_from_seed(19);
        let layout = TensorLayout::new(vec![2, 2, 3]).unwrap();
        let rho = random_density(12, 12, &mut rng).unwrap();
        // Tracing out factor 1 directly …
        let direct = partial_trace(&rho, &layout, &[0, 2]).unwrap();
        // … equals permuting (0,2) to the front and tracing the tail factor.
        let (p, pl) = permute_factors(&rho, &layout, &[0, 2, 1]).unwrap();
        let via_perm = partial_trace(&p, &pl, &[0, 1]).unwrap();
        assert!((direct.matrix() - via_perm.matrix()).norm() < 1e-10);
    }

    #[test]
    fn hermitian_fn_sqrt_squares_back() {
        let mut rng = rng_from_seed(23);
        for dim in [2usize, 4, 8] {
            let rho = random_density(dim, dim, &mut rng).unwrap();
            let s = hermitian_fn(rho.matrix(), MatrixFn::Sqrt, &Tolerances::default()).unwrap();
            assert!((&s * &s - rho.matrix()).norm() < 1e-9, "sqrt² ≠ ρ at dim {dim}");
        }
    }

    #[test]
    fn identity_channel_preserves_state() {
        let mut rng = rng_from_seed(29);
        let rho = random_density(3, 2, &mut rng).unwrap();
        let id = KrausChannel::identity(3);
        let out = id.apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn dephasing_channel_kills_coherences() {
        let plus = PureState::new(
            CVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)])
                .scale(std::f64::consts::FRAC_1_SQRT_2),
            &Tolerances::default(),
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&plus);
        let out = KrausChannel::dephasing(2).apply(&rho).unwrap();
        assert!((out.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-12);
    }

    #[test]
    fn random_channel_preserves_trace_and_positivity() {
        let mut rng = rng_from_seed(31);
        for _ in 0..20 {
            let t = random_channel(4, 2, &mut rng).unwrap();
            let rho = random_density(4, 3, &mut rng).unwrap();
            let out = t.apply(&rho).unwrap();
            assert_abs_diff_eq!(trace_re(out.matrix()), 1.0, epsilon = 1e-10);
            assert!(out.eigenvalues().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn computational_povm_reads_diagonal() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let p = Povm::computational(2).measure(&rho).unwrap();
        assert_abs_diff_eq!(p[0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.7, epsilon = 1e-12);
    }

    #[test]
    fn plus_minus_povm_on_zero_state() {
        let h = 0.5;
        let plus =
            CMatrix::from_row_slice(2, 2, &[c64(h, 0.0), c64(h, 0.0), c64(h, 0.0), c64(h, 0.0)]);
        let minus =
            CMatrix::from_row_slice(2, 2, &[c64(h, 0.0), c64(-h, 0.0), c64(-h, 0.0), c64(h, 0.0)]);
        let povm = Povm::new(vec![plus, minus], &Tolerances::default()).unwrap();
        let rho = DensityMatrix::from_pure(&PureState::basis(2, 0).unwrap());
        let p = povm.measure(&rho).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn random_povm_is_valid_and_normalizes() {
        let mut rng = rng_from_seed(37);
        for _ in 0..10 {
            let povm = random_povm(3, 4, &mut rng).unwrap();
            let rho = random_density(3, 3, &mut rng).unwrap();
            let p = povm.measure(&rho).unwrap();
            assert!(p.iter().all(|&x| (-1e-10..=1.0 + 1e-10).contains(&x)));
            assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn random_density_reproducible_and_shaped() {
        let a = random_density(4, 1, &mut rng_from_seed(42)).unwrap();
        let b = random_density(4, 1, &mut rng_from_seed(42)).unwrap();
        assert_eq!(a.matrix(), b.matrix(), "same seed must give identical matrices");
        assert_abs_diff_eq!(a.purity(), 1.0, epsilon = 1e-9);
        let full = random_density(8, 8, &mut rng_from_seed(43)).unwrap();
        assert!(full.rank() == 8, "full-rank Ginibre sample should have full rank");
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rng_from_seed(47);
        for dim in [2usize, 3, 5] {
            let u = random_unitary(dim, &mut rng);
            assert!(crate::linalg::is_unitary(&u, 1e-10), "dim {dim}");
        }
    }

    #[test]
    fn derive_seed_changes_with_index() {
        let s = 12345;
        assert_ne!(derive_seed(s, 0), derive_seed(s, 1));
        assert_eq!(derive_seed(s, 5), derive_seed(s, 5));
    }
}
