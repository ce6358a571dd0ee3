//! Truncated Fock-space states and brute-force oracles.
//!
//! A space is a tensor product of factors, each a truncated bosonic mode
//! (dimension cutoff+1) or a qubit (dimension 2, basis g = 0, e = 1).
//! Index layout is row-major: the first factor is the most significant.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    c, check_hermitian, components, expm_antihermitian_sparse, golden_section, hermitize, CMat, CVec,
    trace_norm, Spectrum, EigenBlock, I, ONE, ZERO,
};

pub const TAIL_TOL: f64 = 1e-10;
pub const DEFAULT_CUTOFF_CAP: usize = 256;
/// Eigenvalues below this are treated as exact zeros in matrix powers.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Pairs with λm+λn below this are dropped from the QFI sum.
pub const QFI_FLOOR: f64 = 1e-12;
pub const QFI_STEP: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    dims: Vec<usize>,
}

impl FockSpace {
    /// `modes` bosonic modes sharing one cutoff.
    pub fn new(cutoff: usize, modes: usize) -> Result<Self> {
        if cutoff < 1 || modes < 1 {
            return invalid("cutoff and modes must be >= 1");
        }
        Ok(Self { dims: vec![cutoff + 1; modes] })
    }

    /// Arbitrary factor dimensions (qubits are factors of dimension 2).
    pub fn with_dims(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return invalid("every factor needs dimension >= 2");
        }
        Ok(Self { dims: dims.to_vec() })
    }

    pub fn single(cutoff: usize) -> Self {
        Self::new(cutoff.max(1), 1).unwrap()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn modes(&self) -> usize {
        self.dims.len()
    }
    pub fn cutoff(&self, mode: usize) -> usize {
        self.dims[mode] - 1
    }
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    pub fn tensor(&self, other: &FockSpace) -> FockSpace {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        FockSpace { dims }
    }

    fn check_mode(&self, m: usize) -> Result<()> {
        if m >= self.dims.len() {
            return invalid(format!("mode {m} out of range ({} factors)", self.dims.len()));
        }
        Ok(())
    }

    /// Offsets of every configuration of `modes` (row-major in the given order).
    fn offsets(&self, modes: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &m in modes {
            let mut next = Vec::with_capacity(out.len() * self.dims[m]);
            for &o in &out {
                for k in 0..self.dims[m] {
                    next.push(o + k * strides[m]);
                }
            }
            out = next;
        }
        out
    }

    fn complement(&self, modes: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|m| !modes.contains(m)).collect()
    }
}

/// Smallest cutoff whose discarded thermal tail c^(d+1) is below `tol`.
pub fn thermal_cutoff(n: f64, tol: f64, cap: usize) -> Result<usize> {
    if n < 0.0 {
        return invalid("occupation must be >= 0");
    }
    if n == 0.0 {
        return Ok(1);
    }
    let cb = n / (1.0 + n);
    let d = ((tol.ln() / cb.ln()).ceil() as usize).saturating_sub(1).max(1);
    if d > cap {
        return Err(Error::TruncationOverflow(format!(
            "thermal occupation {n} needs cutoff {d} > cap {cap}"
        )));
    }
    Ok(d)
}

/// Smallest cutoff whose Poisson tail beyond it is below `tol`.
pub fn coherent_cutoff(mean: f64, tol: f64, cap: usize) -> Result<usize> {
    let mut p = (-mean).exp();
    let mut cum = p;
    let mut k = 0usize;
    while 1.0 - cum >= tol {
        k += 1;
        p *= mean / k as f64;
        cum += p;
        if k > cap {
            return Err(Error::TruncationOverflow(format!("coherent mean {mean} exceeds cap {cap}")));
        }
    }
    Ok(k.max(1))
}

#[derive(Clone, Debug)]
pub struct PureState {
    pub space: FockSpace,
    pub amplitudes: CVec,
}

#[derive(Clone, Debug)]
pub struct DensityOperator {
    pub space: FockSpace,
    pub matrix: CMat,
}

pub fn fock_state(n: usize, space: &FockSpace) -> Result<PureState> {
    if space.modes() != 1 || n > space.cutoff(0) {
        return invalid("fock_state needs a single mode with n <= cutoff");
    }
    let mut v = CVec::zeros(space.dim());
    v[n] = ONE;
    Ok(PureState { space: space.clone(), amplitudes: v })
}

pub fn coherent_state(alpha: C64, space: &FockSpace) -> Result<PureState> {
    if space.modes() != 1 {
        return invalid("coherent_state is single-mode");
    }
    let d = space.cutoff(0);
    let mean = alpha.norm_sqr();
    if mean > d as f64 / 4.0 {
        return Err(Error::TruncationOverflow(format!("|alpha|^2 = {mean} > cutoff/4")));
    }
    let mut v = CVec::zeros(d + 1);
    v[0] = c((-mean / 2.0).exp());
    for k in 1..=d {
        v[k] = v[k - 1] * alpha / (k as f64).sqrt();
    }
    let norm = v.norm();
    if 1.0 - norm * norm > TAIL_TOL {
        return Err(Error::TruncationOverflow(format!("coherent tail {:e}", 1.0 - norm * norm)));
    }
    v /= c(norm);
    Ok(PureState { space: space.clone(), amplitudes: v })
}

fn thermal_weights(n: f64, dim: usize) -> Result<Vec<f64>> {
    thermal_weights_tol(n, dim, TAIL_TOL)
}

fn thermal_weights_tol(n: f64, dim: usize, tol: f64) -> Result<Vec<f64>> {
    if n < 0.0 {
        return invalid("occupation must be >= 0");
    }
    let cb = n / (1.0 + n);
    let w: Vec<f64> = (0..dim).map(|k| cb.powi(k as i32) / (1.0 + n)).collect();
    let tail = cb.powi(dim as i32);
    if tail > tol {
        return Err(Error::TruncationOverflow(format!(
            "thermal tail {tail:e} at occupation {n} and cutoff {}",
            dim - 1
        )));
    }
    let s: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / s).collect())
}

pub fn thermal_state(nb: f64, space: &FockSpace) -> Result<DensityOperator> {
    if space.modes() != 1 {
        return invalid("thermal_state is single-mode");
    }
    let w = thermal_weights(nb, space.dim())?;
    let m = CMat::from_diagonal(&CVec::from_iterator(w.len(), w.iter().map(|&x| c(x))));
    Ok(DensityOperator { space: space.clone(), matrix: m })
}

/// Two-mode squeezed vacuum Σ √p_k |k⟩|k⟩ on (idler, signal).
pub fn tmsv_state(ns: f64, space: &FockSpace) -> Result<PureState> {
    if space.modes() != 2 {
        return invalid("tmsv_state needs two modes");
    }
    let d = space.dims()[0].min(space.dims()[1]);
    let w = thermal_weights(ns, d)?;
    let mut v = CVec::zeros(space.dim());
    let stride = space.dims()[1];
    for (k, p) in w.iter().enumerate() {
        v[k * stride + k] = c(p.sqrt());
    }
    Ok(PureState { space: space.clone(), amplitudes: v })
}

impl PureState {
    pub fn new(space: FockSpace, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch("amplitude length".into()));
        }
        let n = amplitudes.norm();
        if (n - 1.0).abs() > 1e-12 {
            return invalid(format!("state norm {n} is not 1"));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let v = self.amplitudes.kronecker(&other.amplitudes);
        PureState { space: self.space.tensor(&other.space), amplitudes: v }
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator { space: self.space.clone(), matrix: &self.amplitudes * self.amplitudes.adjoint() }
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn apply(&self, op: &LocalOp) -> Result<PureState> {
        let v = op.apply_vec(&self.space, &self.amplitudes)?;
        Ok(PureState { space: self.space.clone(), amplitudes: v })
    }

    pub fn apply_gaussian(&self, kind: &GaussianUnitary) -> Result<PureState> {
        self.apply(&kind.local_op(&self.space)?)
    }

    /// Reduced state on `keep`, factors ordered as listed.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityOperator> {
        let (x, space) = self.reshape(keep)?;
        Ok(DensityOperator { space, matrix: &x * x.adjoint() })
    }

    /// Matrix X with rows over `keep` (in order) and columns over the rest.
    fn reshape(&self, keep: &[usize]) -> Result<(CMat, FockSpace)> {
        validate_keep(&self.space, keep)?;
        let rest = self.space.complement(keep);
        let ko = self.space.offsets(keep);
        let ro = self.space.offsets(&rest);
        let x = CMat::from_fn(ko.len(), ro.len(), |i, j| self.amplitudes[ko[i] + ro[j]]);
        let dims: Vec<usize> = keep.iter().map(|&m| self.space.dims[m]).collect();
        Ok((x, FockSpace { dims }))
    }

    /// Squared Schmidt coefficients across the split (first `k` factors | rest).
    pub fn schmidt_probabilities(&self, k: usize) -> Result<Vec<f64>> {
        let keep: Vec<usize> = (0..k).collect();
        let (x, _) = self.reshape(&keep)?;
        let svd = x.svd(false, false);
        let mut p: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
        p.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(p)
    }

    /// Zero-pad factor `mode` to dimension `dim`.
    pub fn embed(&self, mode: usize, dim: usize) -> Result<PureState> {
        self.space.check_mode(mode)?;
        let old = self.space.dims[mode];
        if dim < old {
            return invalid("embed cannot shrink a factor");
        }
        let mut dims = self.space.dims.clone();
        dims[mode] = dim;
        let new_space = FockSpace { dims };
        let ns = new_space.strides();
        let os = self.space.strides();
        let mut v = CVec::zeros(new_space.dim());
        for (idx, a) in self.amplitudes.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            let mut rem = idx;
            let mut t = 0;
            for m in 0..self.space.dims.len() {
                let q = rem / os[m];
                rem %= os[m];
                t += q * ns[m];
            }
            v[t] = *a;
        }
        Ok(PureState { space: new_space, amplitudes: v })
    }

    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        self.reduce(&[mode])?.mean_photons(0)
    }
}

fn validate_keep(space: &FockSpace, keep: &[usize]) -> Result<()> {
    if keep.is_empty() {
        return invalid("keep set is empty");
    }
    for (i, &m) in keep.iter().enumerate() {
        space.check_mode(m)?;
        if keep[..i].contains(&m) {
            return invalid("keep set has duplicates");
        }
    }
    Ok(())
}

impl DensityOperator {
    pub fn new(space: FockSpace, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::DimensionMismatch("matrix shape".into()));
        }
        check_hermitian(&matrix, 1e-12)?;
        Ok(Self { space, matrix })
    }

    pub fn trace(&self) -> f64 {
        crate::linalg::trace(&self.matrix).re
    }

    pub fn renormalized(mut self) -> Self {
        let t = self.trace();
        self.matrix /= c(t);
        self
    }

    pub fn min_eigenvalue(&self) -> f64 {
        Spectrum::of(&hermitize(&self.matrix)).min_eigenvalue()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator { space: self.space.tensor(&other.space), matrix: self.matrix.kronecker(&other.matrix) }
    }

    pub fn expect(&self, op: &CMat) -> C64 {
        // Tr(ρ A) without forming the product
        let n = self.matrix.nrows();
        let mut acc = ZERO;
        for j in 0..n {
            for i in 0..n {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    pub fn fidelity_with_pure(&self, psi: &PureState) -> f64 {
        let v = &self.matrix * &psi.amplitudes;
        psi.amplitudes.dotc(&v).re
    }

    pub fn apply(&self, op: &LocalOp) -> Result<DensityOperator> {
        let left = op.apply_columns(&self.space, &self.matrix)?;
        let both = op.apply_columns(&self.space, &left.adjoint())?;
        Ok(DensityOperator { space: self.space.clone(), matrix: both.adjoint() })
    }

    pub fn apply_gaussian(&self, kind: &GaussianUnitary) -> Result<DensityOperator> {
        self.apply(&kind.local_op(&self.space)?)
    }

    /// Partial trace keeping `keep`, factors ordered as listed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        validate_keep(&self.space, keep)?;
        let rest = self.space.complement(keep);
        let ko = self.space.offsets(keep);
        let ro = self.space.offsets(&rest);
        let m = CMat::from_fn(ko.len(), ko.len(), |i, j| {
            ro.iter().map(|&r| self.matrix[(ko[i] + r, ko[j] + r)]).sum()
        });
        let dims: Vec<usize> = keep.iter().map(|&k| self.space.dims[k]).collect();
        Ok(DensityOperator { space: FockSpace { dims }, matrix: m })
    }

    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        let r = if self.space.modes() == 1 { self.clone() } else { self.partial_trace(&[mode])? };
        Ok((0..r.space.dim()).map(|k| k as f64 * r.matrix[(k, k)].re).sum())
    }

    /// Spectral decomposition into weighted pure states (weights > floor).
    pub fn pure_components(&self, floor: f64) -> Vec<(f64, CVec)> {
        let sp = Spectrum::of(&hermitize(&self.matrix));
        let mut out = Vec::new();
        for b in &sp.blocks {
            for (k, &w) in b.values.iter().enumerate() {
                if w > floor {
                    let mut v = CVec::zeros(sp.dim);
                    for (r, &row) in b.indices.iter().enumerate() {
                        v[row] = b.vectors[(r, k)];
                    }
                    out.push((w, v));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        check_hermitian(&self.matrix, 1e-12)?;
        let t = self.trace();
        if (t - 1.0).abs() > 1e-9 {
            return invalid(format!("trace {t}"));
        }
        let m = self.min_eigenvalue();
        if m < -1e-10 {
            return invalid(format!("negative eigenvalue {m:e}"));
        }
        Ok(())
    }
}

/// Sparse operator acting on a subset of factors.
#[derive(Clone, Debug)]
pub struct LocalOp {
    pub targets: Vec<usize>,
    pub local_dims: Vec<usize>,
    pub entries: Vec<(usize, usize, C64)>,
}

impl LocalOp {
    pub fn dense(targets: &[usize], local_dims: &[usize], m: &CMat) -> LocalOp {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != ZERO {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        LocalOp { targets: targets.to_vec(), local_dims: local_dims.to_vec(), entries }
    }

    pub fn to_dense(&self) -> CMat {
        let n: usize = self.local_dims.iter().product();
        let mut m = CMat::zeros(n, n);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    fn check(&self, space: &FockSpace) -> Result<()> {
        for (t, &m) in self.targets.iter().enumerate() {
            space.check_mode(m)?;
            if space.dims[m] != self.local_dims[t] {
                return Err(Error::DimensionMismatch(format!(
                    "operator expects dim {} on factor {m}, state has {}",
                    self.local_dims[t], space.dims[m]
                )));
            }
        }
        Ok(())
    }

    pub fn apply_vec(&self, space: &FockSpace, v: &CVec) -> Result<CVec> {
        self.check(space)?;
        let lo = space.offsets(&self.targets);
        let ro = space.offsets(&space.complement(&self.targets));
        let mut out = CVec::zeros(v.len());
        for &r in &ro {
            for &(o, i, a) in &self.entries {
                let x = v[r + lo[i]];
                if x != ZERO {
                    out[r + lo[o]] += a * x;
                }
            }
        }
        Ok(out)
    }

    pub fn apply_columns(&self, space: &FockSpace, m: &CMat) -> Result<CMat> {
        self.check(space)?;
        let lo = space.offsets(&self.targets);
        let ro = space.offsets(&space.complement(&self.targets));
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        for col in 0..m.ncols() {
            let src = m.column(col);
            let mut dst = out.column_mut(col);
            for &r in &ro {
                for &(o, i, a) in &self.entries {
                    let x = src[r + lo[i]];
                    if x != ZERO {
                        dst[r + lo[o]] += a * x;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Ladder operators on a truncated mode.
pub fn annihilation(dim: usize) -> CMat {
    let mut a = CMat::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = c((k as f64).sqrt());
    }
    a
}

pub fn number_op(dim: usize) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(dim, (0..dim).map(|k| c(k as f64))))
}

#[derive(Clone, Debug, PartialEq)]
pub enum GaussianUnitary {
    /// exp(β a† − β* a)
    Displacement { beta: C64, mode: usize },
    /// exp(½ r (a² − a†²)), so that S†aS = a cosh r − a† sinh r
    Squeeze { r: f64, mode: usize },
    /// exp(iθ n)
    Phase { theta: f64, mode: usize },
    /// exp(θ (a_i† a_j − a_i a_j†)) with cos θ = √transmissivity
    Beamsplitter { transmissivity: f64, modes: (usize, usize) },
    /// Same generator with an explicit (signed) angle.
    BeamsplitterAngle { theta: f64, modes: (usize, usize) },
}

fn padded_single_mode(dim: usize, gen: impl Fn(&CMat) -> CMat) -> CMat {
    let pad = dim + 24;
    let big = dim + pad;
    let a = annihilation(big);
    let g = gen(&a);
    let mut entries = Vec::new();
    for j in 0..big {
        for i in 0..big {
            if g[(i, j)] != ZERO {
                entries.push((i, j, g[(i, j)]));
            }
        }
    }
    let mut u = CMat::zeros(dim, dim);
    for (i, j, v) in expm_antihermitian_sparse(big, &entries) {
        if i < dim && j < dim {
            u[(i, j)] = v;
        }
    }
    u
}

pub fn beamsplitter_entries(theta: f64, d1: usize, d2: usize) -> Vec<(usize, usize, C64)> {
    // generator θ(a1† a2 − a1 a2†) on local index n1*d2 + n2
    let mut gen = Vec::new();
    for n1 in 0..d1 {
        for n2 in 0..d2 {
            let col = n1 * d2 + n2;
            // a1† a2 : (n1, n2) -> (n1+1, n2-1)
            if n2 >= 1 && n1 + 1 < d1 {
                let v = ((n1 + 1) as f64 * n2 as f64).sqrt() * theta;
                gen.push(((n1 + 1) * d2 + n2 - 1, col, c(v)));
            }
            // −a1 a2† : (n1, n2) -> (n1-1, n2+1)
            if n1 >= 1 && n2 + 1 < d2 {
                let v = (n1 as f64 * (n2 + 1) as f64).sqrt() * theta;
                gen.push(((n1 - 1) * d2 + n2 + 1, col, c(-v)));
            }
        }
    }
    if theta == 0.0 {
        return (0..d1 * d2).map(|k| (k, k, ONE)).collect();
    }
    expm_antihermitian_sparse(d1 * d2, &gen)
}

impl GaussianUnitary {
    pub fn local_op(&self, space: &FockSpace) -> Result<LocalOp> {
        match *self {
            GaussianUnitary::Displacement { beta, mode } => {
                space.check_mode(mode)?;
                let d = space.dims[mode];
                let u = padded_single_mode(d, |a| a.adjoint() * beta - a * beta.conj());
                Ok(LocalOp::dense(&[mode], &[d], &u))
            }
            GaussianUnitary::Squeeze { r, mode } => {
                space.check_mode(mode)?;
                let d = space.dims[mode];
                let u = padded_single_mode(d, |a| {
                    let a2 = a * a;
                    (&a2 - a2.adjoint()) * c(0.5 * r)
                });
                Ok(LocalOp::dense(&[mode], &[d], &u))
            }
            GaussianUnitary::Phase { theta, mode } => {
                space.check_mode(mode)?;
                let d = space.dims[mode];
                let entries = (0..d).map(|k| (k, k, (I * theta * k as f64).exp())).collect();
                Ok(LocalOp { targets: vec![mode], local_dims: vec![d], entries })
            }
            GaussianUnitary::Beamsplitter { transmissivity, modes } => {
                if !(0.0..=1.0).contains(&transmissivity) || transmissivity.is_nan() {
                    return invalid(format!("transmissivity {transmissivity} outside [0,1]"));
                }
                GaussianUnitary::BeamsplitterAngle { theta: transmissivity.sqrt().acos(), modes }.local_op(space)
            }
            GaussianUnitary::BeamsplitterAngle { theta, modes: (i, j) } => {
                space.check_mode(i)?;
                space.check_mode(j)?;
                if i == j {
                    return invalid("beamsplitter needs two distinct modes");
                }
                let (d1, d2) = (space.dims[i], space.dims[j]);
                Ok(LocalOp { targets: vec![i, j], local_dims: vec![d1, d2], entries: beamsplitter_entries(theta, d1, d2) })
            }
        }
    }
}

pub fn apply_gaussian_unitary(state: &DensityOperator, kind: &GaussianUnitary) -> Result<DensityOperator> {
    state.apply_gaussian(kind)
}

pub fn partial_trace(state: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    state.partial_trace(keep)
}

/// Thermal-loss channel. The output mode is κ a + √(1−κ²) h with h thermal
/// (`n_env`) truncated to `env_dim` levels; the output factor replaces the
/// input mode and has dimension `env_dim`. A negative κ encodes a π phase
/// on the signal. `port_dim` is the working dimension of the discarded port.
#[derive(Clone, Debug)]
pub struct ThermalLoss {
    pub kappa: f64,
    pub n_env: f64,
    pub env_dim: usize,
    pub port_dim: usize,
    pub tail_tol: f64,
}

impl ThermalLoss {
    /// Environment cutoff chosen automatically at `TAIL_TOL`.
    pub fn new(kappa: f64, n_env: f64) -> Result<Self> {
        let d = thermal_cutoff(n_env, TAIL_TOL, DEFAULT_CUTOFF_CAP)?;
        Ok(Self { kappa, n_env, env_dim: d + 1, port_dim: 0, tail_tol: TAIL_TOL })
    }

    pub fn with_env_cutoff(mut self, cutoff: usize, tail_tol: f64) -> Self {
        self.env_dim = cutoff + 1;
        self.tail_tol = tail_tol;
        self
    }

    pub fn with_port_dim(mut self, dim: usize) -> Self {
        self.port_dim = dim;
        self
    }

    pub fn apply(&self, state: &DensityOperator, mode: usize) -> Result<DensityOperator> {
        let kappa = self.kappa;
        if !(-1.0..=1.0).contains(&kappa) {
            return invalid(format!("amplitude transmissivity {kappa} outside [-1,1]"));
        }
        state.space.check_mode(mode)?;
        let env_dim = self.env_dim;
        let weights = thermal_weights_tol(self.n_env, env_dim, self.tail_tol)?;
        let comps = state.pure_components(1e-15);
        let k = state.space.modes();
        let port_dim = self.port_dim.max(state.space.dims[mode]);
        // keep order: original factors with the environment sitting at `mode`
        let keep: Vec<usize> = (0..k).map(|m| if m == mode { k } else { m }).collect();
        let theta = -kappa.asin();
        let mut out_dims = state.space.dims.clone();
        out_dims[mode] = env_dim;
        let out_space = FockSpace { dims: out_dims };
        let mut acc = CMat::zeros(out_space.dim(), out_space.dim());
        let mut bs: Option<LocalOp> = None;
        for (w, v) in comps {
            let psi = PureState { space: state.space.clone(), amplitudes: v }.embed(mode, port_dim)?;
            for (n, &tn) in weights.iter().enumerate() {
                if tn * w < 1e-18 {
                    continue;
                }
                let mut e = CVec::zeros(env_dim);
                e[n] = ONE;
                let env = PureState { space: FockSpace::single(env_dim - 1), amplitudes: e };
                let joint = psi.tensor(&env);
                if bs.is_none() {
                    bs = Some(GaussianUnitary::BeamsplitterAngle { theta, modes: (mode, k) }.local_op(&joint.space)?);
                }
                let out = joint.apply(bs.as_ref().unwrap())?;
                let (x, _) = out.reshape(&keep)?;
                acc += (&x * x.adjoint()) * c(w * tn);
            }
        }
        Ok(DensityOperator { space: out_space, matrix: hermitize(&acc) })
    }
}

/// Trace norm of (ρ_η − ρ_{−η}) − (ρ_{2η} − ρ_0): how far BPSK at amplitude
/// η is from on-off keying at 2η, for `state` with `mode` sent through `loss`
/// (whose κ is overwritten).
pub fn bpsk_ook_residual(state: &DensityOperator, mode: usize, loss: &ThermalLoss, eta: f64) -> Result<f64> {
    let at = |k: f64| {
        let mut l = loss.clone();
        l.kappa = k;
        l.apply(state, mode).map(|r| r.matrix)
    };
    let d = (at(eta)? - at(-eta)?) - (at(2.0 * eta)? - at(0.0)?);
    Ok(trace_norm(&hermitize(&d)))
}

/// Result of the quantum Chernoff minimisation.
#[derive(Clone, Copy, Debug)]
pub struct Chernoff {
    pub s_star: f64,
    pub exponent: f64,
}

fn same_space(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.space != b.space {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.space.dims, b.space.dims)));
    }
    Ok(())
}

/// Paired per-block spectra of two operators over a shared block structure.
struct PairSpectrum {
    blocks: Vec<(EigenBlock, EigenBlock, DMatrix<f64>)>,
}

impl PairSpectrum {
    fn new(a: &CMat, b: &CMat) -> PairSpectrum {
        let comps = components(&[a, b]);
        let sa = Spectrum::with_components(a, &comps);
        let sb = Spectrum::with_components(b, &comps);
        let blocks = sa
            .blocks
            .into_iter()
            .zip(sb.blocks)
            .map(|(x, y)| {
                let ov = x.vectors.adjoint() * &y.vectors;
                let o = ov.map(|z| z.norm_sqr());
                (x, y, o)
            })
            .collect();
        PairSpectrum { blocks }
    }
}

fn floored(x: f64) -> f64 {
    if x < EIGEN_FLOOR {
        0.0
    } else {
        x
    }
}

pub fn chernoff_exponent(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<Chernoff> {
    same_space(rho0, rho1)?;
    check_hermitian(&rho0.matrix, 1e-10)?;
    check_hermitian(&rho1.matrix, 1e-10)?;
    let ps = PairSpectrum::new(&hermitize(&rho0.matrix), &hermitize(&rho1.matrix));
    let q = |s: f64| -> f64 {
        let mut acc = 0.0;
        for (x, y, o) in &ps.blocks {
            for (i, &l) in x.values.iter().enumerate() {
                let l = floored(l);
                if l == 0.0 {
                    continue;
                }
                let ls = l.powf(s);
                for (j, &m) in y.values.iter().enumerate() {
                    let m = floored(m);
                    if m == 0.0 {
                        continue;
                    }
                    acc += ls * m.powf(1.0 - s) * o[(i, j)];
                }
            }
        }
        acc
    };
    let (s, qmin) = golden_section(q, 1e-4, 1.0 - 1e-4, 1e-10)?;
    Ok(Chernoff { s_star: s, exponent: (-qmin.ln()).max(0.0) })
}

pub fn trace_distance(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    same_space(rho0, rho1)?;
    Ok(0.5 * crate::linalg::trace_norm(&hermitize(&(&rho0.matrix - &rho1.matrix))))
}

pub fn helstrom_error(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    Ok((0.5 * (1.0 - trace_distance(rho0, rho1)?)).clamp(0.0, 0.5))
}

/// D(ρ‖σ) in nats; infinite when ρ has weight outside the support of σ.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_space(rho, sigma)?;
    let ps = PairSpectrum::new(&hermitize(&rho.matrix), &hermitize(&sigma.matrix));
    let mut acc = 0.0;
    for (x, y, o) in &ps.blocks {
        for (i, &l) in x.values.iter().enumerate() {
            let l = floored(l);
            if l == 0.0 {
                continue;
            }
            acc += l * l.ln();
            for (j, &m) in y.values.iter().enumerate() {
                let w = l * o[(i, j)];
                let m = floored(m);
                if m == 0.0 {
                    if w > 1e-12 {
                        return Ok(f64::INFINITY);
                    }
                    continue;
                }
                acc -= w * m.ln();
            }
        }
    }
    Ok(acc.max(0.0))
}

/// Von Neumann entropy in nats.
pub fn entropy(rho: &DensityOperator) -> f64 {
    Spectrum::of(&hermitize(&rho.matrix))
        .eigenvalues()
        .into_iter()
        .map(floored)
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum()
}

#[derive(Clone, Debug)]
pub struct Qfi {
    pub fisher: f64,
    /// Symmetric logarithmic derivative L with dρ = ½{ρ, L}.
    pub sld: CMat,
}

/// Quantum Fisher information of a one-parameter family at κ = 0 using
/// central differences; F = 2 Σ |dρ_mn|²/(λm+λn) over the eigenbasis of ρ(0).
pub fn qfi_numeric<F>(family: F, step: f64) -> Result<Qfi>
where
    F: Fn(f64) -> Result<DensityOperator>,
{
    let r0 = family(0.0)?;
    let rp = family(step)?;
    let rm = family(-step)?;
    same_space(&r0, &rp)?;
    same_space(&r0, &rm)?;
    let d = (&rp.matrix - &rm.matrix) / c(2.0 * step);
    let scale = d.norm().max(1e-300);
    let defect = crate::linalg::hermiticity_defect(&d);
    if defect > 1e-7 * scale.max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    let d = hermitize(&d);
    let sp = Spectrum::of(&hermitize(&r0.matrix));
    let lam = sp.eigenvalues();
    let u = sp.full_vectors();
    let de = u.adjoint() * &d * &u;
    let n = lam.len();
    let mut f = 0.0;
    let mut l_eig = CMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let s = lam[i] + lam[j];
            if s < QFI_FLOOR {
                continue;
            }
            f += 2.0 * de[(i, j)].norm_sqr() / s;
            l_eig[(i, j)] = de[(i, j)] * (2.0 / s);
        }
    }
    let sld = &u * l_eig * u.adjoint();
    Ok(Qfi { fisher: f, sld })
}

/// Qubit single-factor operators, basis g = 0, e = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitOp {
    Identity,
    SigmaX,
    SigmaY,
    SigmaZ,
    /// |e⟩⟨g|
    Raise,
    /// |g⟩⟨e|
    Lower,
    ProjG,
    ProjE,
}

pub fn qubit_matrix(op: QubitOp) -> CMat {
    let z = ZERO;
    let o = ONE;
    let v = match op {
        QubitOp::Identity => [o, z, z, o],
        QubitOp::SigmaX => [z, o, o, z],
        QubitOp::SigmaY => [z, -I, I, z],
        QubitOp::SigmaZ => [-o, z, z, o],
        QubitOp::Raise => [z, z, o, z],
        QubitOp::Lower => [z, o, z, z],
        QubitOp::ProjG => [o, z, z, z],
        QubitOp::ProjE => [z, z, z, o],
    };
    CMat::from_row_slice(2, 2, &v)
}

fn parse_qubit(tok: &str) -> Option<QubitOp> {
    Some(match tok {
        "I" | "1" => QubitOp::Identity,
        "sx" => QubitOp::SigmaX,
        "sy" => QubitOp::SigmaY,
        "sz" => QubitOp::SigmaZ,
        "sp" => QubitOp::Raise,
        "sm" => QubitOp::Lower,
        "pg" => QubitOp::ProjG,
        "pe" => QubitOp::ProjE,
        _ => return None,
    })
}

fn parse_mode(tok: &str, dim: usize) -> Option<CMat> {
    let a = annihilation(dim);
    let mut m = CMat::identity(dim, dim);
    for f in tok.split('*') {
        let f = f.trim();
        let g = match f {
            "I" | "1" => CMat::identity(dim, dim),
            "a" => a.clone(),
            "ad" => a.adjoint(),
            "n" => number_op(dim),
            _ => return None,
        };
        m *= g;
    }
    Some(m)
}

/// Builds a qubit ⊗ mode operator from a small expression language:
/// terms joined by `+`, each `[coef*]Q@M` with Q in {I,sx,sy,sz,sp,sm,pg,pe}
/// and M a `*`-product of {I,a,ad,n}. Example: `sm@a + sp@ad`.
pub fn qubit_fock_operator(spec: &str, mode_dim: usize) -> Result<CMat> {
    let mut total = CMat::zeros(2 * mode_dim, 2 * mode_dim);
    let mut any = false;
    for term in spec.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return invalid(format!("malformed operator spec '{spec}'"));
        }
        let (q, m) = term
            .split_once('@')
            .ok_or_else(|| Error::InvalidParameter(format!("term '{term}' lacks '@'")))?;
        let (coef, q) = match q.split_once('*') {
            Some((c0, rest)) => {
                let v: f64 = c0.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad coefficient in '{term}'")))?;
                (v, rest.trim())
            }
            None => (1.0, q.trim()),
        };
        let qm = parse_qubit(q).ok_or_else(|| Error::InvalidParameter(format!("unknown qubit op '{q}'")))?;
        let mm = parse_mode(m, mode_dim).ok_or_else(|| Error::InvalidParameter(format!("unknown mode op '{m}'")))?;
        total += qubit_matrix(qm).kronecker(&mm) * c(coef);
        any = true;
    }
    if !any {
        return invalid("empty operator spec");
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_on_cutoff_two() {
        let a = qubit_fock_operator("I@a", 3).unwrap();
        assert!((a[(0, 1)].re - 1.0).abs() < 1e-15);
        assert!((a[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        let plain = annihilation(3);
        assert_eq!(plain[(1, 2)], c(2f64.sqrt()));
    }

    #[test]
    fn spec_errors() {
        assert!(qubit_fock_operator("sq@a", 3).is_err());
        assert!(qubit_fock_operator("sz", 3).is_err());
        assert!(qubit_fock_operator("sz@a +", 3).is_err());
    }

    #[test]
    fn cutoffs() {
        assert_eq!(thermal_cutoff(0.0, TAIL_TOL, 256).unwrap(), 1);
        let d = thermal_cutoff(1.0, TAIL_TOL, 256).unwrap();
        assert!(0.5f64.powi(d as i32 + 1) < TAIL_TOL);
        assert!(0.5f64.powi(d as i32) >= TAIL_TOL);
        assert!(thermal_cutoff(100.0, TAIL_TOL, 256).is_err());
    }
}
