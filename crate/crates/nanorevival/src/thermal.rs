//! Thermal orientation-state preparation.
//!
//! The trap Hamiltonian H = J²/2I - V₀ cos²β conserves the angular-momentum
//! projection m and the parity of j, so it splits into independent symmetric
//! tridiagonal blocks over the reindexed basis j = j₀ + 2k. The initial state
//! ρ₀ = exp(-H/k_BT)/Z is prepared either by exact block diagonalization, by a
//! Chebyshev evaluation of the same Boltzmann operator restricted to the
//! |Δj| ≤ 2 band (identical result, much faster when only the band is needed),
//! or from the semiclassical closed form valid when many j are occupied.
//!
//! Everything here works in dimensionless rotor units: energies in B = ħ²/2I,
//! temperature as k_BT/B, depth as V₀/B. SI wrappers convert at the boundary.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::K_BOLTZMANN;
use crate::error::{Error, Result};
use crate::linalg::{eigh_tridiagonal, pairwise_sum, smallest_eigenvalue, KahanSum};
use crate::rotor::{rotational_constant, trap_depth, RotorSpec, TrapSpec};
use crate::specfun::{cos2_diag, cos2_off, log_bessel_i_scaled};

/// Parity of the total angular momentum quantum number j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// First basis j of the (m, parity) chain, or None when empty.
fn chain_start(m: u32, parity: Parity, j_max: u32) -> Option<u32> {
    let j0 = if m % 2 == parity.bit() { m } else { m + 1 };
    (j0 <= j_max).then_some(j0)
}

/// Basis truncation policy. Without an override, j_max is sized from the
/// thermal scale s = sqrt(2 I k_B T)/ħ so that the neglected Boltzmann weight
/// stays below `tail_epsilon`; the estimate is verified after assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisTruncation {
    pub j_max_override: Option<u32>,
    pub tail_epsilon: f64,
}

impl Default for BasisTruncation {
    fn default() -> Self {
        Self {
            j_max_override: None,
            tail_epsilon: 1e-8,
        }
    }
}

impl BasisTruncation {
    pub fn with_epsilon(tail_epsilon: f64) -> Self {
        Self {
            j_max_override: None,
            tail_epsilon,
        }
    }

    pub fn with_j_max(j_max: u32, tail_epsilon: f64) -> Self {
        Self {
            j_max_override: Some(j_max),
            tail_epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_epsilon must be > 0, got {}",
                self.tail_epsilon
            )));
        }
        if let Some(j) = self.j_max_override {
            if j < 2 {
                return Err(Error::InvalidParameter("j_max override must be >= 2".into()));
            }
        }
        Ok(())
    }

    /// Post-hoc tail verification is skipped when tail_epsilon >= 1
    /// (explicitly truncated comparisons opt out this way).
    fn tail_check_enabled(&self) -> bool {
        self.tail_epsilon < 1.0
    }

    /// Gaussian-tail sizing: weight beyond j is ~ exp(-(j/s)²).
    pub fn resolve_j_max(&self, kt_over_b: f64) -> u32 {
        if let Some(j) = self.j_max_override {
            return j.max(2);
        }
        let s = kt_over_b.max(0.0).sqrt();
        let c = (1.0 / self.tail_epsilon).ln().sqrt() + 0.5;
        ((s * c).ceil() as u32).saturating_add(4).max(16)
    }
}

/// How a state or band was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrepMethod {
    /// Per-block eigendecomposition with stored eigenvectors.
    ExactDiag,
    /// Chebyshev evaluation of the Boltzmann operator band (same state).
    ExactBand,
    /// Semiclassical closed form for the banded matrix elements.
    Semiclassical,
}

/// Metadata carried by prepared states and bands (dimensionless units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    pub kt_over_b: f64,
    pub v0_over_b: f64,
    pub j_max: u32,
    pub tail_estimate: f64,
    pub method: PrepMethod,
    /// ln Σ exp(-(E - E_min)/k_BT) over all included states (with m degeneracy).
    pub ln_z_rel: f64,
    /// Lowest included energy in units of B.
    pub e_min_over_b: f64,
    /// False when the semiclassical validity condition k_BT >> B is violated.
    pub semiclassical_valid: bool,
}

impl StateMeta {
    /// ln Z with absolute energy reference (units of B inside the exponents).
    pub fn ln_partition(&self) -> f64 {
        self.ln_z_rel - self.e_min_over_b / self.kt_over_b
    }
}

/// The |Δj| ≤ 2, Δm = 0 band of the density operator in the |jm> basis — all
/// the alignment observable ever reads. Stored for m ≥ 0; the ±m blocks are
/// identical because the Hamiltonian depends only on m².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandedDensity {
    pub j_max: u32,
    /// diag[m][i] = ρ[j, j, m] with j = m + i.
    pub(crate) diag: Vec<Vec<f64>>,
    /// off[m][i] = ρ[j, j+2, m] with j = m + i.
    pub(crate) off: Vec<Vec<f64>>,
    pub meta: StateMeta,
}

impl BandedDensity {
    pub(crate) fn zeroed(j_max: u32, meta: StateMeta) -> Self {
        let diag = (0..=j_max)
            .map(|m| vec![0.0; (j_max - m + 1) as usize])
            .collect();
        let off = (0..=j_max)
            .map(|m| {
                let n = (j_max - m + 1).saturating_sub(2) as usize;
                vec![0.0; n]
            })
            .collect();
        Self { j_max, diag, off, meta }
    }

    /// ρ[j, j', m]; zero outside the stored band. Symmetric in (j, j') and in ±m.
    pub fn rho(&self, j: u32, j_prime: u32, m: i32) -> f64 {
        let ma = m.unsigned_abs();
        if ma > j.min(j_prime) || j.max(j_prime) > self.j_max {
            return 0.0;
        }
        let (lo, hi) = if j <= j_prime { (j, j_prime) } else { (j_prime, j) };
        let i = (lo - ma) as usize;
        match hi - lo {
            0 => self.diag[ma as usize][i],
            2 => self.off[ma as usize][i],
            _ => 0.0,
        }
    }

    /// Degeneracy-weighted trace Σ_{j,m} ρ[j,j,m].
    pub fn trace(&self) -> f64 {
        let per_m: Vec<f64> = self
            .diag
            .iter()
            .enumerate()
            .map(|(m, col)| {
                let deg = if m == 0 { 1.0 } else { 2.0 };
                let mut acc = KahanSum::new();
                for &v in col {
                    acc.add(v);
                }
                deg * acc.value()
            })
            .collect();
        pairwise_sum(&per_m)
    }

    /// Structural and physical invariants: unit trace, nonnegative diagonal,
    /// Cauchy-Schwarz on the coherences.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "banded density trace {tr} deviates from 1 beyond 1e-10"
            )));
        }
        for (m, col) in self.diag.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                if v < -1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "negative diagonal rho[{j},{j},{m}] = {v}",
                        j = m + i
                    )));
                }
            }
        }
        for (m, col) in self.off.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                let bound = (self.diag[m][i] * self.diag[m][i + 2]).sqrt() + 1e-12;
                if v.abs() > bound {
                    return Err(Error::InvalidParameter(format!(
                        "Cauchy-Schwarz violated at rho[{j},{jp},{m}]",
                        j = m + i,
                        jp = m + i + 2
                    )));
                }
            }
        }
        Ok(())
    }

    /// Normalize the trace to exactly one (applied once during assembly).
    fn normalize(&mut self) {
        let tr = self.trace();
        for col in self.diag.iter_mut().chain(self.off.iter_mut()) {
            for v in col.iter_mut() {
                *v /= tr;
            }
        }
    }

    /// Estimated relative Boltzmann weight beyond j_max, from the top two
    /// j-shells continued geometrically with the free-rotor level spacing.
    fn estimate_tail(&self) -> f64 {
        let jm = self.j_max;
        let mut top = KahanSum::new();
        for j in [jm.saturating_sub(1), jm] {
            for m in 0..=j {
                let deg = if m == 0 { 1.0 } else { 2.0 };
                top.add(deg * self.diag[m as usize][(j - m) as usize]);
            }
        }
        let ratio = (-((4 * jm + 6) as f64) / self.meta.kt_over_b).exp();
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        top.value() * ratio / (1.0 - ratio)
    }

    /// Serialize to pretty JSON (state cache format).
    pub fn save_json(&self, path: &std::path::Path) -> Result<()> {
        let data = serde_json::to_vec(self).map_err(|e| Error::Cache(e.to_string()))?;
        std::fs::write(path, data).map_err(|e| Error::Cache(e.to_string()))
    }

    pub fn load_json(path: &std::path::Path) -> Result<Self> {
        let data = std::fs::read(path).map_err(|e| Error::Cache(e.to_string()))?;
        serde_json::from_slice(&data).map_err(|e| Error::Cache(e.to_string()))
    }
}

/// One (m, parity) eigenblock of the prepared thermal state.
#[derive(Debug, Clone)]
pub struct StateBlock {
    pub m: u32,
    pub parity: Parity,
    /// First j of the chain; basis is j0, j0+2, ...
    pub j0: u32,
    /// Eigenvalues in units of B.
    pub energies_over_b: Vec<f64>,
    /// Normalized Boltzmann weight of each eigenstate (per state, excluding
    /// the ±m degeneracy factor).
    pub weights: Vec<f64>,
    /// Column-major eigenvector coefficients over the chain basis.
    pub coeffs: Vec<f64>,
    /// 1 for m = 0, else 2.
    pub degeneracy: f64,
}

impl StateBlock {
    pub fn len(&self) -> usize {
        self.energies_over_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies_over_b.is_empty()
    }

    /// j value of chain index i.
    pub fn j_of(&self, i: usize) -> u32 {
        self.j0 + 2 * i as u32
    }

    /// Eigenvector k as a slice over the chain basis.
    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.len();
        &self.coeffs[k * n..(k + 1) * n]
    }
}

/// Eigendecomposed thermal state with its banded density.
#[derive(Debug, Clone)]
pub struct ThermalRotorState {
    pub blocks: Vec<StateBlock>,
    band: BandedDensity,
    pub meta: StateMeta,
}

impl ThermalRotorState {
    pub fn banded_density(&self) -> &BandedDensity {
        &self.band
    }

    /// Σ_k p_k over all states including degeneracy (should be 1).
    pub fn total_weight(&self) -> f64 {
        let per_block: Vec<f64> = self
            .blocks
            .iter()
            .map(|b| {
                let mut acc = KahanSum::new();
                for &w in &b.weights {
                    acc.add(w);
                }
                b.degeneracy * acc.value()
            })
            .collect();
        pairwise_sum(&per_block)
    }

    /// Thermal expectation of the total angular momentum quantum number.
    pub fn mean_j(&self) -> f64 {
        let per_block: Vec<f64> = self
            .blocks
            .iter()
            .map(|b| {
                let n = b.len();
                let mut acc = KahanSum::new();
                for k in 0..n {
                    let v = b.vector(k);
                    let mut jk = 0.0;
                    for (i, &c) in v.iter().enumerate() {
                        jk += c * c * b.j_of(i) as f64;
                    }
                    acc.add(b.weights[k] * jk);
                }
                b.degeneracy * acc.value()
            })
            .collect();
        pairwise_sum(&per_block)
    }
}

/// Matrix of H/B on the (m, parity) chain {|jm> : j ≡ parity, |m| ≤ j ≤ j_max}
/// as (diagonal, off-diagonal) of a symmetric tridiagonal matrix.
///
/// Diagonal: j(j+1) - (V₀/B) <jm|cos²β|jm>; off-diagonal couples j <-> j+2
/// with -(V₀/B) <jm|cos²β|j+2,m>.
pub fn hamiltonian_block(
    m: u32,
    parity: Parity,
    j_max: u32,
    v0_over_b: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if j_max < m + 2 {
        return Err(Error::InvalidParameter(format!(
            "hamiltonian_block requires j_max >= |m| + 2 (got j_max = {j_max}, m = {m})"
        )));
    }
    if !(v0_over_b >= 0.0) || !v0_over_b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "V0/B must be >= 0, got {v0_over_b}"
        )));
    }
    let j0 = chain_start(m, parity, j_max)
        .ok_or_else(|| Error::InvalidParameter("empty block".into()))?;
    Ok(build_chain(m, j0, j_max, v0_over_b))
}

fn build_chain(m: u32, j0: u32, j_max: u32, v0_over_b: f64) -> (Vec<f64>, Vec<f64>) {
    let n = ((j_max - j0) / 2 + 1) as usize;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let j = j0 + 2 * i as u32;
        let jf = j as f64;
        diag.push(jf * (jf + 1.0) - v0_over_b * cos2_diag(j, m as i32));
        if i + 1 < n {
            off.push(-v0_over_b * cos2_off(j, m as i32));
        }
    }
    (diag, off)
}

fn check_state_params(v0_over_b: f64, kt_over_b: f64) -> Result<()> {
    if !(kt_over_b > 0.0) || !kt_over_b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "k_BT/B must be > 0, got {kt_over_b}"
        )));
    }
    if !(v0_over_b >= 0.0) || !v0_over_b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "V0/B must be >= 0, got {v0_over_b}"
        )));
    }
    Ok(())
}

/// Maximum total eigenvector storage (entries) for `prepare_exact`.
pub const VECTOR_STORAGE_CAP: u64 = 200_000_000;

struct RawBlock {
    m: u32,
    parity: Parity,
    j0: u32,
    energies: Vec<f64>,
    coeffs: Vec<f64>,
    e_min: f64,
}

/// Exact diagonalization of every (m, parity) block, dimensionless version.
/// Stores all eigenvectors; use `prepare_banded_exact` when only the band is
/// needed at large j_max.
pub fn prepare_exact_dimensionless(
    v0_over_b: f64,
    kt_over_b: f64,
    trunc: &BasisTruncation,
) -> Result<ThermalRotorState> {
    check_state_params(v0_over_b, kt_over_b)?;
    trunc.validate()?;
    let j_max = trunc.resolve_j_max(kt_over_b);

    let layout = block_layout(j_max);
    let storage: u64 = layout.iter().map(|&(_, _, n)| (n * n) as u64).sum();
    if storage > VECTOR_STORAGE_CAP {
        return Err(Error::MemoryCap {
            required: storage,
            cap: VECTOR_STORAGE_CAP,
        });
    }

    let raw: Vec<Result<RawBlock>> = layout
        .par_iter()
        .map(|&(m, parity, _)| {
            let j0 = chain_start(m, parity, j_max).expect("layout guarantees nonempty");
            let (d, e) = build_chain(m, j0, j_max, v0_over_b);
            let eig = eigh_tridiagonal(&d, &e, true)?;
            let e_min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(RawBlock {
                m,
                parity,
                j0,
                energies: eig.values,
                coeffs: eig.vectors,
                e_min,
            })
        })
        .collect();
    let raw: Vec<RawBlock> = raw.into_iter().collect::<Result<_>>()?;

    // Global ground energy, then one deterministic normalization pass.
    let e_min = raw.iter().map(|b| b.e_min).fold(f64::INFINITY, f64::min);
    let z_terms: Vec<f64> = raw
        .iter()
        .map(|b| {
            let deg = if b.m == 0 { 1.0 } else { 2.0 };
            let mut acc = KahanSum::new();
            for &e in &b.energies {
                acc.add((-(e - e_min) / kt_over_b).exp());
            }
            deg * acc.value()
        })
        .collect();
    let z = pairwise_sum(&z_terms);

    let meta = StateMeta {
        kt_over_b,
        v0_over_b,
        j_max,
        tail_estimate: 0.0,
        method: PrepMethod::ExactDiag,
        ln_z_rel: z.ln(),
        e_min_over_b: e_min,
        semiclassical_valid: true,
    };
    let mut band = BandedDensity::zeroed(j_max, meta.clone());

    let mut blocks = Vec::with_capacity(raw.len());
    for rb in raw {
        let n = rb.energies.len();
        let weights: Vec<f64> = rb
            .energies
            .iter()
            .map(|&e| (-(e - e_min) / kt_over_b).exp() / z)
            .collect();
        // Band contribution: Σ_k w_k c_ki c_ki'.
        let mcol = rb.m as usize;
        for i in 0..n {
            let j = rb.j0 + 2 * i as u32;
            let idx = (j - rb.m) as usize;
            let mut dsum = KahanSum::new();
            let mut osum = KahanSum::new();
            for k in 0..n {
                let ci = rb.coeffs[k * n + i];
                dsum.add(weights[k] * ci * ci);
                if i + 1 < n {
                    osum.add(weights[k] * ci * rb.coeffs[k * n + i + 1]);
                }
            }
            band.diag[mcol][idx] += dsum.value();
            if i + 1 < n {
                band.off[mcol][idx] += osum.value();
            }
        }
        blocks.push(StateBlock {
            m: rb.m,
            parity: rb.parity,
            j0: rb.j0,
            energies_over_b: rb.energies,
            weights,
            coeffs: rb.coeffs,
            degeneracy: if rb.m == 0 { 1.0 } else { 2.0 },
        });
    }

    band.normalize();
    let tail = band.estimate_tail();
    band.meta.tail_estimate = tail;
    if trunc.tail_check_enabled() && tail > trunc.tail_epsilon {
        return Err(Error::Truncation {
            j_max,
            tail_estimate: tail,
            tail_epsilon: trunc.tail_epsilon,
        });
    }
    let meta = band.meta.clone();
    Ok(ThermalRotorState { blocks, band, meta })
}

fn block_layout(j_max: u32) -> Vec<(u32, Parity, usize)> {
    let mut layout = Vec::new();
    for m in 0..=j_max {
        for parity in Parity::BOTH {
            if let Some(j0) = chain_start(m, parity, j_max) {
                let n = ((j_max - j0) / 2 + 1) as usize;
                layout.push((m, parity, n));
            }
        }
    }
    layout
}

/// Exact Boltzmann band by Chebyshev expansion of exp(-(H - E₀)/k_BT) per
/// block: identical to the eigendecomposition route to machine precision, but
/// O(deg·n²) per block instead of O(n³).
pub fn prepare_banded_exact_dimensionless(
    v0_over_b: f64,
    kt_over_b: f64,
    trunc: &BasisTruncation,
) -> Result<BandedDensity> {
    check_state_params(v0_over_b, kt_over_b)?;
    trunc.validate()?;
    let j_max = trunc.resolve_j_max(kt_over_b);
    let layout = block_layout(j_max);

    struct BandBlock {
        m: u32,
        j0: u32,
        diag: Vec<f64>,
        off: Vec<f64>,
        e_min: f64,
        z_rel: f64,
    }

    let parts: Vec<BandBlock> = layout
        .par_iter()
        .map(|&(m, parity, n)| {
            let j0 = chain_start(m, parity, j_max).expect("nonempty");
            let (d, e) = build_chain(m, j0, j_max, v0_over_b);
            let e0 = smallest_eigenvalue(&d, &e);
            let (bd, bo) = boltzmann_band_chebyshev(&d, &e, e0, kt_over_b);
            let z_rel = {
                let mut acc = KahanSum::new();
                for &v in &bd {
                    acc.add(v);
                }
                acc.value()
            };
            let _ = n;
            BandBlock {
                m,
                j0,
                diag: bd,
                off: bo,
                e_min: e0,
                z_rel,
            }
        })
        .collect();

    let e_min = parts.iter().map(|p| p.e_min).fold(f64::INFINITY, f64::min);
    let z_terms: Vec<f64> = parts
        .iter()
        .map(|p| {
            let deg = if p.m == 0 { 1.0 } else { 2.0 };
            deg * (-(p.e_min - e_min) / kt_over_b).exp() * p.z_rel
        })
        .collect();
    let z = pairwise_sum(&z_terms);

    let meta = StateMeta {
        kt_over_b,
        v0_over_b,
        j_max,
        tail_estimate: 0.0,
        method: PrepMethod::ExactBand,
        ln_z_rel: z.ln(),
        e_min_over_b: e_min,
        semiclassical_valid: true,
    };
    let mut band = BandedDensity::zeroed(j_max, meta);
    for p in &parts {
        let scale = (-(p.e_min - e_min) / kt_over_b).exp();
        let mcol = p.m as usize;
        for (i, &v) in p.diag.iter().enumerate() {
            let idx = (p.j0 + 2 * i as u32 - p.m) as usize;
            band.diag[mcol][idx] += scale * v;
        }
        for (i, &v) in p.off.iter().enumerate() {
            let idx = (p.j0 + 2 * i as u32 - p.m) as usize;
            band.off[mcol][idx] += scale * v;
        }
    }
    band.normalize();
    let tail = band.estimate_tail();
    band.meta.tail_estimate = tail;
    if trunc.tail_check_enabled() && tail > trunc.tail_epsilon {
        return Err(Error::Truncation {
            j_max,
            tail_estimate: tail,
            tail_epsilon: trunc.tail_epsilon,
        });
    }
    Ok(band)
}

/// Tridiagonal band of exp(-(H - e_ref)/kt) via the Chebyshev series of the
/// exponential on the Gershgorin interval of H.
fn boltzmann_band_chebyshev(
    d: &[f64],
    e: &[f64],
    e_ref: f64,
    kt: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = d.len();
    if n == 1 {
        return (vec![(-(d[0] - e_ref) / kt).exp()], Vec::new());
    }

    // Spectral interval [lo, hi] from Gershgorin discs, floored at e_ref.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = (if i > 0 { e[i - 1].abs() } else { 0.0 })
            + (if i < n - 1 { e[i].abs() } else { 0.0 });
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    lo = lo.min(e_ref);
    let pad = 1e-8 * (hi - lo).max(1.0);
    lo -= pad;
    hi += pad;
    let center = 0.5 * (hi + lo);
    let half = 0.5 * (hi - lo);

    // exp(-(H - e_ref)/kt) = exp(-(center - e_ref)/kt) exp(-a y),
    // y = (H - center)/half in [-1, 1], a = half/kt;
    // exp(-a y) = Σ_k (2 - δ_k0) (-1)^k I_k(a) T_k(y).
    let a = half / kt;
    let log_front = -(center - e_ref) / kt;
    let mut coefs: Vec<f64> = Vec::new();
    for k in 0..4000u32 {
        let c = (log_bessel_i_scaled(k, a) + a + log_front).exp();
        let signed = if k % 2 == 0 { c } else { -c };
        coefs.push(if k == 0 { signed } else { 2.0 * signed });
        if k > 4 && c < 1e-18 {
            break;
        }
    }

    let mut band_diag = vec![0.0; n];
    let mut band_off = vec![0.0; n - 1];
    let mut t_prev = vec![0.0; n];
    let mut t_cur = vec![0.0; n];
    let mut t_next = vec![0.0; n];

    // y * v for the scaled matrix.
    let apply = |v: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let mut acc = (d[i] - center) * v[i];
            if i > 0 {
                acc += e[i - 1] * v[i - 1];
            }
            if i < n - 1 {
                acc += e[i] * v[i + 1];
            }
            out[i] = acc / half;
        }
    };

    for col in 0..n {
        // T_0 e_col, T_1 e_col.
        for x in t_prev.iter_mut() {
            *x = 0.0;
        }
        t_prev[col] = 1.0;
        apply(&t_prev, &mut t_cur);

        let mut acc_d = coefs[0] * t_prev[col] + coefs.get(1).map_or(0.0, |c| c * t_cur[col]);
        let mut acc_o = if col + 1 < n {
            coefs[0] * t_prev[col + 1] + coefs.get(1).map_or(0.0, |c| c * t_cur[col + 1])
        } else {
            0.0
        };

        for ck in coefs.iter().skip(2) {
            apply(&t_cur, &mut t_next);
            for i in 0..n {
                t_next[i] = 2.0 * t_next[i] - t_prev[i];
            }
            acc_d += ck * t_next[col];
            if col + 1 < n {
                acc_o += ck * t_next[col + 1];
            }
            std::mem::swap(&mut t_prev, &mut t_cur);
            std::mem::swap(&mut t_cur, &mut t_next);
        }
        band_diag[col] = acc_d;
        if col + 1 < n {
            band_off[col] = acc_o;
        }
    }
    (band_diag, band_off)
}

/// Semiclassical banded state from the closed-form matrix elements; valid when
/// k_BT >> B (many occupied j). The band is trace-normalized numerically.
pub fn prepare_semiclassical_dimensionless(
    v0_over_b: f64,
    kt_over_b: f64,
    trunc: &BasisTruncation,
) -> Result<BandedDensity> {
    check_state_params(v0_over_b, kt_over_b)?;
    trunc.validate()?;
    let j_max = trunc.resolve_j_max(kt_over_b);

    let meta = StateMeta {
        kt_over_b,
        v0_over_b,
        j_max,
        tail_estimate: 0.0,
        method: PrepMethod::Semiclassical,
        ln_z_rel: 0.0,
        e_min_over_b: 0.0,
        semiclassical_valid: kt_over_b >= 10.0,
    };
    let mut band = BandedDensity::zeroed(j_max, meta);

    // Log-domain fill, then a single exp/normalize pass against the maximum.
    let mut log_max = f64::NEG_INFINITY;
    for m in 0..=j_max {
        for j in m..=j_max {
            let v = semiclassical_log_element(v0_over_b, kt_over_b, j, j, m as i32);
            band.diag[m as usize][(j - m) as usize] = v;
            log_max = log_max.max(v);
            if j + 2 <= j_max {
                band.off[m as usize][(j - m) as usize] =
                    semiclassical_log_element(v0_over_b, kt_over_b, j, j + 2, m as i32);
            }
        }
    }
    for col in band.diag.iter_mut().chain(band.off.iter_mut()) {
        for v in col.iter_mut() {
            *v = (*v - log_max).exp();
        }
    }
    band.normalize();
    // Peak log element, recorded so wider-band queries can be normalized
    // consistently with the stored band.
    band.meta.ln_z_rel = log_max;
    let tail = band.estimate_tail();
    band.meta.tail_estimate = tail;
    if trunc.tail_check_enabled() && tail > trunc.tail_epsilon {
        return Err(Error::Truncation {
            j_max,
            tail_estimate: tail,
            tail_epsilon: trunc.tail_epsilon,
        });
    }
    Ok(band)
}

/// ln of the unnormalized semiclassical matrix element <jm|ρ₀|j'm> for even
/// j - j'. The Δj-odd elements vanish identically.
pub fn semiclassical_log_element(
    v0_over_b: f64,
    kt_over_b: f64,
    j: u32,
    j_prime: u32,
    m: i32,
) -> f64 {
    let dj = j.abs_diff(j_prime);
    if dj % 2 == 1 || m.unsigned_abs() > j.min(j_prime) {
        return f64::NEG_INFINITY;
    }
    let order = dj / 2;
    let jsum = (j + j_prime + 1) as f64;
    let mf = m as f64;
    let zb = (v0_over_b / (2.0 * kt_over_b)) * (1.0 - 4.0 * mf * mf / (jsum * jsum));
    log_bessel_i_scaled(order, zb) + 2.0 * zb - jsum * jsum / (4.0 * kt_over_b)
}

/// Deep-trap estimate of the initial alignment, 1 - k_BT/V₀.
pub fn alignment_estimate_deep_trap(kt_over_v0: f64) -> f64 {
    1.0 - kt_over_v0
}

/// ln Z from the semiclassical asymptotic closed form,
/// Z ≈ I (k_BT)² exp(V₀/k_BT) / (ħ² V₀), valid for k_BT/V₀ ≤ 0.2.
pub fn partition_function_asymptotic_dimensionless(
    v0_over_b: f64,
    kt_over_b: f64,
) -> Result<f64> {
    check_state_params(v0_over_b, kt_over_b)?;
    if v0_over_b == 0.0 || kt_over_b / v0_over_b > 0.2 {
        return Err(Error::InvalidParameter(format!(
            "asymptotic partition function requires k_BT/V0 <= 0.2, got {}",
            if v0_over_b == 0.0 { f64::INFINITY } else { kt_over_b / v0_over_b }
        )));
    }
    Ok(2.0 * kt_over_b.ln() - (2.0 * v0_over_b).ln() + v0_over_b / kt_over_b)
}

/// Dimensionless trap/temperature parameters for a rotor in SI units.
pub fn reduced_parameters(
    spec: &RotorSpec,
    trap: &TrapSpec,
    temperature_k: f64,
) -> Result<(f64, f64)> {
    if !(temperature_k > 0.0) || !temperature_k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "temperature must be > 0, got {temperature_k}"
        )));
    }
    let b = rotational_constant(spec);
    let v0 = trap_depth(spec, trap)?;
    Ok((v0 / b, K_BOLTZMANN * temperature_k / b))
}

/// SI wrapper: exact diagonalization of the thermal state.
pub fn prepare_exact(
    spec: &RotorSpec,
    trap: &TrapSpec,
    temperature_k: f64,
    trunc: &BasisTruncation,
) -> Result<ThermalRotorState> {
    let (v0b, ktb) = reduced_parameters(spec, trap, temperature_k)?;
    prepare_exact_dimensionless(v0b, ktb, trunc)
}

/// SI wrapper: exact Boltzmann band.
pub fn prepare_banded_exact(
    spec: &RotorSpec,
    trap: &TrapSpec,
    temperature_k: f64,
    trunc: &BasisTruncation,
) -> Result<BandedDensity> {
    let (v0b, ktb) = reduced_parameters(spec, trap, temperature_k)?;
    prepare_banded_exact_dimensionless(v0b, ktb, trunc)
}

/// SI wrapper: semiclassical band.
pub fn prepare_semiclassical(
    spec: &RotorSpec,
    trap: &TrapSpec,
    temperature_k: f64,
    trunc: &BasisTruncation,
) -> Result<BandedDensity> {
    let (v0b, ktb) = reduced_parameters(spec, trap, temperature_k)?;
    prepare_semiclassical_dimensionless(v0b, ktb, trunc)
}

/// SI wrapper: asymptotic ln Z.
pub fn partition_function_asymptotic(
    spec: &RotorSpec,
    trap: &TrapSpec,
    temperature_k: f64,
) -> Result<f64> {
    let (v0b, ktb) = reduced_parameters(spec, trap, temperature_k)?;
    partition_function_asymptotic_dimensionless(v0b, ktb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_block_free_rotor_is_diagonal() {
        let (d, e) = hamiltonian_block(0, Parity::Even, 8, 0.0).unwrap();
        assert_eq!(d, vec![0.0, 6.0, 20.0, 42.0, 72.0]);
        assert!(e.iter().all(|&x| x == 0.0));
        let (d, _) = hamiltonian_block(1, Parity::Odd, 7, 0.0).unwrap();
        assert_eq!(d, vec![2.0, 12.0, 30.0, 56.0]);
    }

    #[test]
    fn hamiltonian_block_two_by_two_reference() {
        // m = 0, even parity, j_max = 2, V0/B = 1:
        // [[-1/3, -2/(3 sqrt 5)], [-2/(3 sqrt 5), 6 - 11/21]]
        let (d, e) = hamiltonian_block(0, Parity::Even, 2, 1.0).unwrap();
        assert!((d[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((d[1] - (6.0 - 11.0 / 21.0)).abs() < 1e-14);
        assert!((e[0] + 2.0 / (3.0 * 5.0f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_block_rejects_bad_ranges() {
        assert!(hamiltonian_block(5, Parity::Even, 6, 1.0).is_err());
        assert!(hamiltonian_block(0, Parity::Even, 4, -1.0).is_err());
    }

    #[test]
    fn free_rotor_state_structure() {
        // V0 = 0: eigenstates are |jm>, alignment bookkeeping handled upstream;
        // here check weights against the analytic Boltzmann distribution.
        let state =
            prepare_exact_dimensionless(0.0, 40.0, &BasisTruncation::default()).unwrap();
        assert!((state.total_weight() - 1.0).abs() < 1e-12);
        let band = state.banded_density();
        band.validate().unwrap();
        // Off-diagonal coherences vanish for the free rotor.
        for col in &band.off {
            for &v in col {
                assert!(v.abs() < 1e-14);
            }
        }
        // rho[j,j,m] proportional to exp(-j(j+1)/ktb).
        let r = band.rho(4, 4, 0) / band.rho(2, 2, 0);
        assert!((r - (-(20.0 - 6.0) / 40.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn ground_state_dominates_at_low_temperature() {
        let state =
            prepare_exact_dimensionless(0.0, 0.1, &BasisTruncation::default()).unwrap();
        // k_BT = B/10: p(j=0) = 1/Z with Z ≈ 1 + 3 e^{-20} + ... ~ 1.
        let band = state.banded_density();
        assert!((band.rho(0, 0, 0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn banded_chebyshev_matches_eigensolve() {
        for (v0, ktb) in [(0.0, 60.0), (300.0, 40.0), (2000.0, 120.0), (50.0, 7.0)] {
            let trunc = BasisTruncation::default();
            let exact = prepare_exact_dimensionless(v0, ktb, &trunc).unwrap();
            let fast = prepare_banded_exact_dimensionless(v0, ktb, &trunc).unwrap();
            let eb = exact.banded_density();
            assert_eq!(eb.j_max, fast.j_max);
            let mut worst = 0.0f64;
            for m in 0..=fast.j_max {
                for j in m..=fast.j_max {
                    let a = eb.rho(j, j, m as i32);
                    let b = fast.rho(j, j, m as i32);
                    worst = worst.max((a - b).abs());
                    let a = eb.rho(j, j + 2, m as i32);
                    let b = fast.rho(j, j + 2, m as i32);
                    worst = worst.max((a - b).abs());
                }
            }
            assert!(worst < 1e-12, "v0={v0}, ktb={ktb}: worst band deviation {worst}");
        }
    }

    #[test]
    fn truncation_failure_reported() {
        let trunc = BasisTruncation::with_j_max(8, 1e-8);
        let err = prepare_exact_dimensionless(0.0, 500.0, &trunc).unwrap_err();
        match err {
            Error::Truncation { j_max, tail_estimate, .. } => {
                assert_eq!(j_max, 8);
                assert!(tail_estimate > 1e-8);
            }
            other => panic!("expected truncation error, got {other}"),
        }
        // Same basis accepted when the tolerance is explicitly loose.
        let trunc = BasisTruncation::with_j_max(8, 1.0);
        assert!(prepare_exact_dimensionless(0.0, 500.0, &trunc).is_ok());
    }

    #[test]
    fn semiclassical_diag_formula() {
        // Against a direct evaluation of the closed form at a few points.
        let (v0, ktb) = (800.0, 200.0);
        let band =
            prepare_semiclassical_dimensionless(v0, ktb, &BasisTruncation::default()).unwrap();
        band.validate().unwrap();
        // Ratio of two diagonal elements removes the normalization.
        let lhs = band.rho(10, 10, 3) / band.rho(6, 6, 1);
        let rhs = (semiclassical_log_element(v0, ktb, 10, 10, 3)
            - semiclassical_log_element(v0, ktb, 6, 6, 1))
        .exp();
        assert!((lhs - rhs).abs() < 1e-12 * rhs.abs());
        // Odd Δj elements are identically zero.
        assert_eq!(band.rho(3, 4, 0), 0.0);
        assert_eq!(
            semiclassical_log_element(v0, ktb, 3, 4, 0),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn semiclassical_close_to_exact_at_moderate_scale() {
        // Desk-scale configuration: ktb >> 1 so the closed form applies. The
        // semiclassical elements are a fixed-order approximation in 1/j and
        // deviate at j of order unity no matter how large ktb is (46% at
        // j = 0, ~7% at j = 2, ~2% at j = 4 for V0 = 2 k_BT); the bulk of the
        // band agrees far better.
        let (v0, ktb) = (1800.0, 900.0);
        let trunc = BasisTruncation::default();
        let sc = prepare_semiclassical_dimensionless(v0, ktb, &trunc).unwrap();
        let ex = prepare_banded_exact_dimensionless(v0, ktb, &trunc).unwrap();
        let max_diag = ex
            .diag
            .iter()
            .flatten()
            .copied()
            .fold(0.0f64, f64::max);
        let mut checked = 0usize;
        for m in 0..=ex.j_max {
            for j in m.max(10)..=ex.j_max {
                for jp in [j, j + 2] {
                    let a = ex.rho(j, jp, m as i32);
                    if a.abs() < 1e-6 * max_diag {
                        continue;
                    }
                    let b = sc.rho(j, jp, m as i32);
                    let rel = (a - b).abs() / a.abs();
                    assert!(
                        rel < 0.02,
                        "element ({j},{jp},{m}): exact {a}, semiclassical {b}, rel {rel}"
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 1000, "comparison covered {checked} elements");
        // Deep-quantum corner: the deviation decreases with j as expected.
        let dev = |j: u32| {
            let a = ex.rho(j, j, 0);
            (sc.rho(j, j, 0) - a).abs() / a
        };
        assert!(dev(0) > dev(2) && dev(2) > dev(4));
        assert!(dev(0) > 0.1, "j = 0 element is genuinely non-semiclassical");
        assert!(dev(6) < 0.02);
    }

    #[test]
    fn partition_function_asymptotic_properties() {
        // Monotone increasing in V0 and the analytic derivative identity
        // kT dlnZ/dV0 = 1 - kT/V0 (checked by central finite differences).
        let ktb = 50.0;
        let v0 = 1000.0;
        let f = |v: f64| partition_function_asymptotic_dimensionless(v, ktb).unwrap();
        assert!(f(v0 * 1.2) > f(v0));
        let h = 1e-3 * v0;
        let deriv = (f(v0 + h) - f(v0 - h)) / (2.0 * h);
        let expect = (1.0 - ktb / v0) / ktb;
        assert!((deriv - expect).abs() < 1e-9);
        // Validity guard.
        assert!(partition_function_asymptotic_dimensionless(100.0, 50.0).is_err());
    }

    #[test]
    fn mean_j_matches_closed_form_for_free_rotor() {
        let ktb = 400.0;
        let state =
            prepare_exact_dimensionless(0.0, ktb, &BasisTruncation::default()).unwrap();
        let expect = (std::f64::consts::PI * ktb / 4.0).sqrt();
        let got = state.mean_j();
        assert!(
            (got - expect).abs() < 0.03 * expect,
            "mean j {got} vs semiclassical {expect}"
        );
    }

    #[test]
    fn band_cache_round_trip() {
        let band =
            prepare_banded_exact_dimensionless(30.0, 20.0, &BasisTruncation::default()).unwrap();
        let dir = std::env::temp_dir().join("nanorevival-test-cache");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("band.json");
        band.save_json(&path).unwrap();
        let loaded = BandedDensity::load_json(&path).unwrap();
        assert_eq!(loaded.j_max, band.j_max);
        assert_eq!(loaded.meta, band.meta);
        for m in 0..=band.j_max {
            for j in m..=band.j_max {
                assert_eq!(loaded.rho(j, j, m as i32).to_bits(), band.rho(j, j, m as i32).to_bits());
            }
        }
        std::fs::remove_file(&path).ok();
    }
}
