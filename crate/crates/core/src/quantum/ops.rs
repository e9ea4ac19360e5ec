use super::linalg::{hermitian_eig_unchecked, svd_square, unitary_polar_factor};
use super::matrix::{ComplexMatrix, C64, ZERO};
use super::states::{DensityOperator, PureState, SplitSystem};
use crate::error::{Error, Result};

/// Kronecker product `a (x) b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    Ok(a.kron(b))
}

/// Row-major strides of a register layout.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every joint value of `registers`, enumerated in
/// row-major order over those registers.
fn offsets(dims: &[usize], registers: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &r in registers {
        let mut next = Vec::with_capacity(out.len() * dims[r]);
        for &base in &out {
            for v in 0..dims[r] {
                next.push(base + v * st[r]);
            }
        }
        out = next;
    }
    out
}

fn check_registers(sys: &SplitSystem, regs: &[usize]) -> Result<()> {
    let mut seen = vec![false; sys.dims.len()];
    for &r in regs {
        if r >= sys.dims.len() || seen[r] {
            return Err(Error::BadSubsystems(format!("register {r}")));
        }
        seen[r] = true;
    }
    Ok(())
}

fn complement(sys: &SplitSystem, regs: &[usize]) -> Vec<usize> {
    (0..sys.dims.len()).filter(|r| !regs.contains(r)).collect()
}

/// Traces out every register not listed in `keep`. The kept registers appear
/// in the order given by `keep`.
pub fn partial_trace(
    rho: &DensityOperator,
    sys: &SplitSystem,
    keep: &[usize],
) -> Result<DensityOperator> {
    Ok(DensityOperator::from_trusted(partial_trace_matrix(
        rho.matrix(),
        sys,
        keep,
    )?))
}

/// Partial trace of an arbitrary square operator.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    sys: &SplitSystem,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    sys.check_dim(m.rows())?;
    check_registers(sys, keep)?;
    let traced = complement(sys, keep);
    let ko = offsets(&sys.dims, keep);
    let to = offsets(&sys.dims, &traced);
    let n = ko.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &oi) in ko.iter().enumerate() {
        for (j, &oj) in ko.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &to {
                acc += m[(oi + t, oj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Reshapes a pure state as a `dim(first) x dim(rest)` matrix after
/// reordering registers so that `first` comes first.
pub fn state_matrix(psi: &[C64], sys: &SplitSystem, first: &[usize]) -> Result<ComplexMatrix> {
    sys.check_dim(psi.len())?;
    check_registers(sys, first)?;
    let rest = complement(sys, first);
    let fo = offsets(&sys.dims, first);
    let ro = offsets(&sys.dims, &rest);
    Ok(ComplexMatrix::from_fn(fo.len(), ro.len(), |i, j| {
        psi[fo[i] + ro[j]]
    }))
}

/// Inverse of [`state_matrix`].
pub fn state_from_matrix(
    m: &ComplexMatrix,
    sys: &SplitSystem,
    first: &[usize],
) -> Result<Vec<C64>> {
    check_registers(sys, first)?;
    let rest = complement(sys, first);
    let fo = offsets(&sys.dims, first);
    let ro = offsets(&sys.dims, &rest);
    if m.rows() != fo.len() || m.cols() != ro.len() {
        return Err(Error::DimensionMismatch {
            expected: fo.len() * ro.len(),
            got: m.rows() * m.cols(),
        });
    }
    let mut out = vec![ZERO; sys.total_dim()];
    for (i, &a) in fo.iter().enumerate() {
        for (j, &b) in ro.iter().enumerate() {
            out[a + b] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reduced state of a pure state on `keep`, computed without forming the
/// full density matrix.
pub fn reduced_density(
    psi: &PureState,
    sys: &SplitSystem,
    keep: &[usize],
) -> Result<DensityOperator> {
    let m = state_matrix(psi.amplitudes(), sys, keep)?;
    Ok(DensityOperator::from_trusted(m.matmul(&m.adjoint())))
}

/// Reorders the registers of a state vector: output register `k` is input
/// register `order[k]`.
pub fn permute_registers(psi: &[C64], dims: &[usize], order: &[usize]) -> Result<Vec<C64>> {
    let sys = SplitSystem::new(dims.to_vec(), vec![])?;
    sys.check_dim(psi.len())?;
    if order.len() != dims.len() {
        return Err(Error::BadSubsystems("permutation length".into()));
    }
    check_registers(&sys, order)?;
    let src = offsets(dims, order);
    Ok(src.iter().map(|&o| psi[o]).collect())
}

/// Applies `op` to the registers `act_on` (in that order) of `psi`, identity
/// elsewhere.
pub fn apply_local(
    op: &ComplexMatrix,
    psi: &[C64],
    sys: &SplitSystem,
    act_on: &[usize],
) -> Result<Vec<C64>> {
    let m = state_matrix(psi, sys, act_on)?;
    if op.cols() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: op.cols(),
        });
    }
    state_from_matrix(&op.matmul(&m), sys, act_on)
}

/// Canonical purification: register 0 is the ancilla, register 1 the system.
/// `|psi> = sum_k sqrt(l_k) |conj v_k> |v_k>`.
pub fn purify(rho: &DensityOperator) -> PureState {
    let d = rho.dim();
    let eig = hermitian_eig_unchecked(rho.matrix());
    let mut amps = vec![ZERO; d * d];
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let w = lam.sqrt();
        let v = eig.vector(k);
        for a in 0..d {
            let anc = v[a].conj() * w;
            for s in 0..d {
                amps[a * d + s] += anc * v[s];
            }
        }
    }
    PureState::normalized(amps).expect("purification of a unit-trace operator is nonzero")
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho) sigma sqrt(rho))`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let a = sqrt_thresholded(rho.matrix());
    let b = sqrt_thresholded(sigma.matrix());
    let svd = svd_square(&a.matmul(&b))?;
    Ok(svd.singular.iter().sum::<f64>().clamp(0.0, 1.0))
}

// Eigenvalues below 1e-14 are rounding noise; their square roots would
// otherwise contribute ~1e-7 to the fidelity.
fn sqrt_thresholded(m: &ComplexMatrix) -> ComplexMatrix {
    hermitian_eig_unchecked(m).map(|v| if v > 1e-14 { v.sqrt() } else { 0.0 })
}

/// Tolerance on the reduced-state mismatch accepted by [`uhlmann_unitary`].
pub const UHLMANN_TOL: f64 = 1e-8;

/// Unitary `U` on `act_on` with `(U (x) I)|phi> = |psi>` up to phase, built
/// as the polar factor of the overlap `Psi Phi^dagger` of the two states
/// reshaped across the `act_on` cut.
pub fn uhlmann_unitary(
    phi: &PureState,
    psi: &PureState,
    sys: &SplitSystem,
    act_on: &[usize],
) -> Result<ComplexMatrix> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            got: psi.dim(),
        });
    }
    let a = state_matrix(phi.amplitudes(), sys, act_on)?;
    let b = state_matrix(psi.amplitudes(), sys, act_on)?;
    // Reduced states on the complement (up to transposition).
    let mismatch = (&a.adjoint().matmul(&a) - &b.adjoint().matmul(&b)).frobenius_norm();
    if mismatch > UHLMANN_TOL {
        return Err(Error::ReducedStateMismatch(mismatch));
    }
    unitary_polar_factor(&b.matmul(&a.adjoint()))
}

/// Phase-insensitive transport error `min_theta ||(U (x) I)|phi> - e^{i theta}|psi>||`.
pub fn transport_error(
    u: &ComplexMatrix,
    phi: &PureState,
    psi: &PureState,
    sys: &SplitSystem,
    act_on: &[usize],
) -> Result<f64> {
    let moved = apply_local(u, phi.amplitudes(), sys, act_on)?;
    let ov: C64 = moved
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| b.conj() * a)
        .sum();
    let phase = if ov.norm() > 0.0 {
        ov / ov.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    Ok(moved
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| (a - b * phase).norm_sqr())
        .sum::<f64>()
        .sqrt())
}
