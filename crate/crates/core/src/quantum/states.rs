use serde::{Deserialize, Serialize};

use super::linalg::{hermitian_eig_unchecked, min_eigenvalue};
use super::matrix::{vec_norm, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Algebraic-identity tolerance (norms, traces, Hermiticity).
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance on the smallest eigenvalue of a PSD operator.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance for projector idempotency and POVM completeness.
pub const OPERATOR_TOL: f64 = 1e-10;

/// Unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct PureState {
    amplitudes: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    dim: usize,
    amplitudes: Vec<C64>,
}

impl TryFrom<RawState> for PureState {
    type Error = Error;
    fn try_from(raw: RawState) -> Result<Self> {
        if raw.dim != raw.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                got: raw.amplitudes.len(),
            });
        }
        PureState::new(raw.amplitudes)
    }
}

impl From<PureState> for RawState {
    fn from(s: PureState) -> Self {
        RawState {
            dim: s.amplitudes.len(),
            amplitudes: s.amplitudes,
        }
    }
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > IDENTITY_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(PureState { amplitudes })
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        PureState { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                out.push(a * b);
            }
        }
        PureState { amplitudes: out }
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> C64 {
        super::matrix::inner(&self.amplitudes, &other.amplitudes)
    }

    /// Applies an operator assumed to preserve the norm (e.g. a unitary).
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<PureState> {
        if u.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.cols(),
            });
        }
        PureState::normalized(u.apply(&self.amplitudes))
    }

    /// `||M|psi>||^2`.
    pub fn weight(&self, m: &ComplexMatrix) -> f64 {
        vec_norm(&m.apply(&self.amplitudes)).powi(2)
    }

    /// Phase-insensitive distance `min_theta || |a> - e^{i theta}|b> ||`.
    pub fn phase_distance(&self, other: &PureState) -> f64 {
        let ov = self.overlap(other).norm();
        (2.0 * (1.0 - ov).max(0.0)).sqrt()
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensity", into = "RawDensity")]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawDensity {
    Mixed { dim: usize, matrix: ComplexMatrix },
    Pure { dim: usize, amplitudes: Vec<C64> },
}

impl TryFrom<RawDensity> for DensityOperator {
    type Error = Error;
    fn try_from(raw: RawDensity) -> Result<Self> {
        match raw {
            RawDensity::Mixed { dim, matrix } => {
                if matrix.rows() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: matrix.rows(),
                    });
                }
                DensityOperator::new(matrix)
            }
            RawDensity::Pure { dim, amplitudes } => {
                Ok(PureState::try_from(RawState { dim, amplitudes })?.density())
            }
        }
    }
}

impl From<DensityOperator> for RawDensity {
    fn from(d: DensityOperator) -> Self {
        RawDensity::Mixed {
            dim: d.dim(),
            matrix: d.matrix,
        }
    }
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.rows(), matrix.cols()));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        let dev = matrix.hermitian_deviation();
        if dev > IDENTITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > IDENTITY_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = min_eigenvalue(&matrix);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(DensityOperator {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Wraps a matrix that is valid by construction, symmetrising and
    /// renormalising away rounding drift.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let mut m = matrix.hermitian_part();
        let tr = m.trace().re;
        if tr > 0.0 && (tr - 1.0).abs() > 0.0 {
            m = m.scale_real(1.0 / tr);
        }
        DensityOperator { matrix: m }
    }

    /// Normalises a nonzero PSD matrix to unit trace.
    pub fn from_unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(matrix.hermitian_part().scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// `Tr(M rho)` for Hermitian `M`.
    pub fn expectation(&self, m: &ComplexMatrix) -> f64 {
        m.trace_product(&self.matrix).re
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> DensityOperator {
        DensityOperator::from_trusted(u.matmul(&self.matrix).matmul(&u.adjoint()))
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }
}

/// Orthogonal projector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProjector", into = "RawProjector")]
pub struct Projector {
    matrix: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawProjector {
    dim: usize,
    matrix: ComplexMatrix,
}

impl TryFrom<RawProjector> for Projector {
    type Error = Error;
    fn try_from(raw: RawProjector) -> Result<Self> {
        if raw.matrix.rows() != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                got: raw.matrix.rows(),
            });
        }
        Projector::new(raw.matrix)
    }
}

impl From<Projector> for RawProjector {
    fn from(p: Projector) -> Self {
        RawProjector {
            dim: p.dim(),
            matrix: p.matrix,
        }
    }
}

impl Projector {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.rows(), matrix.cols()));
        }
        let dev = matrix.hermitian_deviation();
        if dev > OPERATOR_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let idem = (&matrix.matmul(&matrix) - &matrix).frobenius_norm();
        if idem > OPERATOR_TOL {
            return Err(Error::NotProjector(idem));
        }
        Ok(Projector {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Projector onto the span of orthonormal vectors.
    pub fn onto(dim: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for v in vectors {
            m.add_scaled_real(1.0, &ComplexMatrix::outer(v, v));
        }
        Projector::new(m)
    }

    /// Rank-one projector `|psi><psi|`.
    pub fn from_state(psi: &PureState) -> Self {
        Projector {
            matrix: ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `1 - P`.
    pub fn complement(&self) -> Projector {
        Projector {
            matrix: &ComplexMatrix::identity(self.dim()) - &self.matrix,
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round() as usize
    }
}

/// Positive operator-valued measure with labelled outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPovm", into = "RawPovm")]
pub struct Povm {
    labels: Vec<String>,
    elements: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct RawPovmElement {
    outcome: String,
    matrix: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawPovm {
    dim: usize,
    elements: Vec<RawPovmElement>,
}

impl TryFrom<RawPovm> for Povm {
    type Error = Error;
    fn try_from(raw: RawPovm) -> Result<Self> {
        let (labels, elements): (Vec<_>, Vec<_>) = raw
            .elements
            .into_iter()
            .map(|e| (e.outcome, e.matrix))
            .unzip();
        if let Some(e) = elements.iter().find(|e| e.rows() != raw.dim) {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                got: e.rows(),
            });
        }
        Povm::new(labels, elements)
    }
}

impl From<Povm> for RawPovm {
    fn from(p: Povm) -> Self {
        RawPovm {
            dim: p.dim(),
            elements: p
                .labels
                .into_iter()
                .zip(p.elements)
                .map(|(outcome, matrix)| RawPovmElement { outcome, matrix })
                .collect(),
        }
    }
}

impl Povm {
    pub fn new(labels: Vec<String>, elements: Vec<ComplexMatrix>) -> Result<Self> {
        if labels.len() != elements.len() || elements.is_empty() {
            return Err(Error::LabelMismatch(format!(
                "{} labels for {} elements",
                labels.len(),
                elements.len()
            )));
        }
        let dim = elements[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &elements {
            if !e.is_square() || e.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.rows(),
                });
            }
            let dev = e.hermitian_deviation();
            if dev > OPERATOR_TOL {
                return Err(Error::NotHermitian(dev));
            }
            let min = min_eigenvalue(e);
            if min < -PSD_TOL {
                return Err(Error::NotPsd(min));
            }
            sum.add_scaled_real(1.0, e);
        }
        let dev = (&sum - &ComplexMatrix::identity(dim)).frobenius_norm();
        if dev > OPERATOR_TOL {
            return Err(Error::IncompletePovm(dev));
        }
        Ok(Povm {
            labels,
            elements: elements.iter().map(|e| e.hermitian_part()).collect(),
        })
    }

    /// POVM with outcomes labelled by `bits`-wide binary strings of their index.
    pub fn with_bit_labels(bits: usize, elements: Vec<ComplexMatrix>) -> Result<Self> {
        let labels = (0..elements.len()).map(|i| bit_string(i, bits)).collect();
        Povm::new(labels, elements)
    }

    /// Two-outcome projective measurement `{P, 1-P}` labelled "0", "1".
    pub fn binary(p: &Projector) -> Self {
        Povm {
            labels: vec!["0".into(), "1".into()],
            elements: vec![p.matrix().clone(), p.complement().matrix().clone()],
        }
    }

    /// Measurement in the given orthonormal basis (columns of `u`), with
    /// basis vector `k` assigned to outcome `assignment[k]`.
    pub fn from_basis(
        u: &ComplexMatrix,
        assignment: &[usize],
        outcomes: usize,
        bits: usize,
    ) -> Povm {
        let d = u.rows();
        let mut elements = vec![ComplexMatrix::zeros(d, d); outcomes];
        for (k, &label) in assignment.iter().enumerate() {
            let v = u.column(k);
            elements[label].add_scaled_real(1.0, &ComplexMatrix::outer(&v, &v));
        }
        Povm {
            labels: (0..outcomes).map(|i| bit_string(i, bits)).collect(),
            elements,
        }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &ComplexMatrix {
        &self.elements[k]
    }

    /// Outcome distribution on `rho`.
    pub fn probabilities(&self, rho: &DensityOperator) -> Vec<f64> {
        self.elements.iter().map(|e| rho.expectation(e)).collect()
    }

    /// `U^dagger E U` for every element.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Povm {
        let ud = u.adjoint();
        Povm {
            labels: self.labels.clone(),
            elements: self
                .elements
                .iter()
                .map(|e| ud.matmul(e).matmul(u).hermitian_part())
                .collect(),
        }
    }

    /// `E_a (x) F_b` with outcome index `a * |F| + b`.
    pub fn tensor(&self, other: &Povm) -> Povm {
        let mut labels = Vec::new();
        let mut elements = Vec::new();
        for (la, ea) in self.labels.iter().zip(&self.elements) {
            for (lb, eb) in other.labels.iter().zip(&other.elements) {
                labels.push(format!("{la}{lb}"));
                elements.push(ea.kron(eb));
            }
        }
        Povm { labels, elements }
    }

    /// Returns the basis and label assignment when every element is a
    /// projector and they are mutually orthogonal.
    pub fn projective_basis(&self) -> Option<(ComplexMatrix, Vec<usize>)> {
        let d = self.dim();
        let mut columns: Vec<Vec<C64>> = Vec::with_capacity(d);
        let mut assignment = Vec::with_capacity(d);
        for (label, e) in self.elements.iter().enumerate() {
            let idem = (&e.matmul(e) - e).frobenius_norm();
            if idem > 1e-8 {
                return None;
            }
            let eig = hermitian_eig_unchecked(e);
            for (k, &v) in eig.values.iter().enumerate() {
                if v > 0.5 {
                    columns.push(eig.vector(k));
                    assignment.push(label);
                }
            }
        }
        if columns.len() != d {
            return None;
        }
        let u = ComplexMatrix::from_fn(d, d, |i, j| columns[j][i]);
        Some((u, assignment))
    }
}

/// Register layout of a multipartite Hilbert space and its Alice/Bob split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSystem {
    pub dims: Vec<usize>,
    /// Register indices held by Alice; the rest belong to Bob.
    pub alice: Vec<usize>,
}

impl SplitSystem {
    pub fn new(dims: Vec<usize>, alice: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::BadSubsystems("zero-dimensional register".into()));
        }
        let mut seen = vec![false; dims.len()];
        for &a in &alice {
            if a >= dims.len() || seen[a] {
                return Err(Error::BadSubsystems(format!("register {a}")));
            }
            seen[a] = true;
        }
        Ok(SplitSystem { dims, alice })
    }

    /// Two registers: Alice holds register 0, Bob register 1.
    pub fn bipartite(alice_dim: usize, bob_dim: usize) -> Self {
        SplitSystem {
            dims: vec![alice_dim, bob_dim],
            alice: vec![0],
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn bob(&self) -> Vec<usize> {
        (0..self.dims.len())
            .filter(|i| !self.alice.contains(i))
            .collect()
    }

    pub fn dim_of(&self, registers: &[usize]) -> usize {
        registers.iter().map(|&r| self.dims[r]).product()
    }

    pub fn alice_dim(&self) -> usize {
        self.dim_of(&self.alice)
    }

    pub fn bob_dim(&self) -> usize {
        self.dim_of(&self.bob())
    }

    /// True when Alice's registers form a prefix `0..k`.
    pub fn alice_is_prefix(&self) -> bool {
        let mut a = self.alice.clone();
        a.sort_unstable();
        a.iter().enumerate().all(|(i, &r)| i == r)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.total_dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

/// `bits`-wide binary string of `value`, most significant bit first.
pub fn bit_string(value: usize, bits: usize) -> String {
    (0..bits)
        .rev()
        .map(|i| if (value >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bit_string(s: &str) -> Result<usize> {
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::Schema(format!("invalid bit string {s:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_norm_invariant() {
        assert!(PureState::from_real(&[1.0, 1.0]).is_err());
        let s = PureState::from_real(&[0.6, 0.8]).unwrap();
        assert_eq!(s.dim(), 2);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"dim":2,"amplitudes":[[0.6,0.0],[0.8,0.0]]}"#);
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityOperator::new(ComplexMatrix::identity(2)),
            Err(Error::InvalidTrace(_))
        ));
        let bad = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
        assert!(matches!(DensityOperator::new(bad), Err(Error::NotPsd(_))));
        assert!(DensityOperator::new(DensityOperator::maximally_mixed(3).into_matrix()).is_ok());
    }

    #[test]
    fn density_json_accepts_pure_form() {
        let rho: DensityOperator =
            serde_json::from_str(r#"{"dim":2,"amplitudes":[[0.0,0.0],[1.0,0.0]]}"#).unwrap();
        assert!((rho.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projector_and_povm_checks() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(matches!(
            Projector::new(half.clone()),
            Err(Error::NotProjector(_))
        ));
        assert!(Povm::with_bit_labels(1, vec![half.clone(), half.clone()]).is_ok());
        assert!(matches!(
            Povm::with_bit_labels(1, vec![half.clone(), half.scale_real(0.5)]),
            Err(Error::IncompletePovm(_))
        ));
        let p = Projector::from_state(&PureState::basis(2, 0));
        let m = Povm::binary(&p);
        let (_, assignment) = m.projective_basis().unwrap();
        assert_eq!(assignment, vec![0, 1]);
    }

    #[test]
    fn bit_strings() {
        assert_eq!(bit_string(2, 3), "010");
        assert_eq!(parse_bit_string("110").unwrap(), 6);
        assert!(parse_bit_string("12").is_err());
    }
}
