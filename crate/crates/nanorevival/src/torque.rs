//! Torque sensing: j-conserving perturbative propagators under the potential
//! V_ext = -N_ext sin²β cos²α, alignment traces and revival-decay sweeps.
//!
//! Within each j shell the potential couples m <-> m ± 2 only, so every shell
//! splits into two m-parity chains with symmetric tridiagonal Hamiltonians
//! H_j = j(j+1) 1 + V_j (units of B). The initial thermal state is diagonal in
//! m with elements given by its |Δj| ≤ 2 band, and the observable is diagonal
//! in m as well, so the trace over the propagated state contracts exactly to
//! per-shell eigenbasis sums with phase factors cos(πτ Δλ): O(Σ_j j²) per time
//! point after an O(Σ_j j³) setup.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::unitary_alignment;
use crate::linalg::{eigh_tridiagonal, pairwise_sum, KahanSum};
use crate::specfun::{cos2_diag, cos2_off, sin2cos2_element};
use crate::thermal::{BandedDensity, ThermalRotorState};

/// Maximum total stored matrix entries (eigenvectors plus contraction
/// matrices) before a torque evaluation refuses to run.
pub const TORQUE_MEMORY_CAP: u64 = 200_000_000;

/// Torque sweep / trace setup.
#[derive(Debug, Clone)]
pub struct TorqueScenario {
    /// External torque in units of B.
    pub n_ext_over_b: f64,
    /// Revival index probed by sweeps.
    pub revival_index: u32,
    /// Evaluation times in units of T_rev.
    pub taus: Vec<f64>,
}

impl TorqueScenario {
    /// The perturbative propagators require N_ext well below the thermal
    /// kinetic energy; false when N_ext > 0.1 k_BT.
    pub fn perturbative_ok(&self, kt_over_b: f64) -> bool {
        self.n_ext_over_b <= 0.1 * kt_over_b
    }
}

/// Dense matrix of V_ext/B on the j shell: entries -(N_ext/B) <jm|sin²β cos²α|jm'>,
/// row-major over m, m' = -j..j. Zero unless m' ∈ {m, m±2}.
pub fn vj_block(j: u32, n_ext_over_b: f64) -> Vec<f64> {
    let dim = (2 * j + 1) as usize;
    let mut v = vec![0.0; dim * dim];
    for (row, m) in (-(j as i32)..=j as i32).enumerate() {
        for (col, mp) in (-(j as i32)..=j as i32).enumerate() {
            v[row * dim + col] = -n_ext_over_b * sin2cos2_element(j, m, mp);
        }
    }
    v
}

/// Eigendecomposition of one m-parity chain of a shell Hamiltonian.
struct ChainEig {
    /// m values in ascending order.
    ms: Vec<i32>,
    /// Eigenvalues of V_j restricted to the chain (free part j(j+1) kept
    /// separate).
    lambda: Vec<f64>,
    /// Column-major eigenvectors.
    q: Vec<f64>,
}

struct ShellEig {
    j: u32,
    /// Chains indexed by m parity (m mod 2).
    chains: [Option<ChainEig>; 2],
}

fn chain_ms(j: u32, parity: u32) -> Vec<i32> {
    let mut start = -(j as i32);
    if start.rem_euclid(2) != parity as i32 {
        start += 1;
    }
    (start..=j as i32).step_by(2).collect()
}

fn shell_eig(j: u32, n_ext_over_b: f64) -> Result<ShellEig> {
    let mut chains: [Option<ChainEig>; 2] = [None, None];
    for parity in 0..2u32 {
        let ms = chain_ms(j, parity);
        if ms.is_empty() {
            continue;
        }
        let n = ms.len();
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        for (i, &m) in ms.iter().enumerate() {
            diag.push(-n_ext_over_b * sin2cos2_element(j, m, m));
            if i + 1 < n {
                off.push(-n_ext_over_b * sin2cos2_element(j, m, m + 2));
            }
        }
        let eig = eigh_tridiagonal(&diag, &off, true)?;
        chains[parity as usize] = Some(ChainEig {
            ms,
            lambda: eig.values,
            q: eig.vectors,
        });
    }
    Ok(ShellEig { j, chains })
}

/// U_j(τ) = exp(-iπτ H_j/B) as a dense (2j+1)×(2j+1) matrix, row-major over
/// m = -j..j. The phase convention matches the free evolution
/// exp(-iπτ j(j+1)) at N_ext = 0.
pub fn propagator_j(j: u32, n_ext_over_b: f64, tau: f64) -> Result<Vec<Complex64>> {
    let dim = (2 * j + 1) as usize;
    let shell = shell_eig(j, n_ext_over_b)?;
    let free = (j as f64) * (j as f64 + 1.0);
    let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
    for chain in shell.chains.iter().flatten() {
        let n = chain.ms.len();
        for s in 0..n {
            let phase = -std::f64::consts::PI * tau * (free + chain.lambda[s]);
            let rot = Complex64::new(phase.cos(), phase.sin());
            for (ia, &ma) in chain.ms.iter().enumerate() {
                let row = (ma + j as i32) as usize;
                let qa = chain.q[s * n + ia];
                for (ib, &mb) in chain.ms.iter().enumerate() {
                    let col = (mb + j as i32) as usize;
                    u[row * dim + col] += rot * (qa * chain.q[s * n + ib]);
                }
            }
        }
    }
    Ok(u)
}

/// Per-shell contraction data: the observable and state diagonals rotated
/// into the shell eigenbasis.
struct ShellContraction {
    /// Within-shell term: (M1, M2, lambda) per chain with
    /// M1 = Qᵀ diag(ρ_j) Q, M2 = Qᵀ diag(C_j) Q.
    within: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
    /// Cross term to shell j+2 (same m parity): (A1, A2, lambda_j, lambda_j2)
    /// with A1[s,t] = (Q_jᵀ diag(C_x) Q_{j+2})[s,t] and
    /// A2[s,t] = (Q_{j+2}ᵀ diag(ρ_x) Q_j)[t,s], both stored n1 x n2 row-major.
    cross: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)>,
    j: u32,
}

fn build_contractions(
    band: &BandedDensity,
    shells: &[ShellEig],
) -> Vec<ShellContraction> {
    let j_max = band.j_max;
    shells
        .par_iter()
        .map(|shell| {
            let j = shell.j;
            let mut within = Vec::new();
            let mut cross = Vec::new();
            for parity in 0..2usize {
                let Some(chain) = &shell.chains[parity] else { continue };
                let n = chain.ms.len();
                // diag(rho) and diag(C) over the chain's m values.
                let rho_d: Vec<f64> =
                    chain.ms.iter().map(|&m| band.rho(j, j, m)).collect();
                let c_d: Vec<f64> = chain.ms.iter().map(|&m| cos2_diag(j, m)).collect();
                let m1 = congruence(&chain.q, &rho_d, n);
                let m2 = congruence(&chain.q, &c_d, n);
                within.push((m1, m2, chain.lambda.clone()));

                if j + 2 <= j_max {
                    if let Some(next) = shells
                        .get((j + 2) as usize)
                        .and_then(|s| s.chains[parity].as_ref())
                    {
                        let n2 = next.ms.len();
                        // Shared m values are exactly this chain's ms; they sit
                        // at offset +1 in the j+2 chain.
                        let rho_x: Vec<f64> =
                            chain.ms.iter().map(|&m| band.rho(j, j + 2, m)).collect();
                        let c_x: Vec<f64> =
                            chain.ms.iter().map(|&m| cos2_off(j, m)).collect();
                        let a1 = rect_congruence(&chain.q, n, &c_x, &next.q, n2);
                        let a2t = rect_congruence(&chain.q, n, &rho_x, &next.q, n2);
                        cross.push((a1, a2t, chain.lambda.clone(), next.lambda.clone()));
                    }
                }
            }
            ShellContraction { within, cross, j }
        })
        .collect()
}

/// M = Qᵀ diag(d) Q for an n×n column-major Q.
fn congruence(q: &[f64], d: &[f64], n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for s in 0..n {
        let qs = &q[s * n..(s + 1) * n];
        for t in s..n {
            let qt = &q[t * n..(t + 1) * n];
            let mut acc = 0.0;
            for i in 0..n {
                acc += qs[i] * d[i] * qt[i];
            }
            m[s * n + t] = acc;
            m[t * n + s] = acc;
        }
    }
    m
}

/// A = Q1ᵀ diag_rect(d) Q2: d lives on the shared m values (all of chain 1),
/// which sit at row offset 1 of chain 2. Returns n1×n2 row-major.
fn rect_congruence(q1: &[f64], n1: usize, d: &[f64], q2: &[f64], n2: usize) -> Vec<f64> {
    let mut a = vec![0.0; n1 * n2];
    for s in 0..n1 {
        let q1s = &q1[s * n1..(s + 1) * n1];
        for t in 0..n2 {
            let q2t = &q2[t * n2..(t + 1) * n2];
            let mut acc = 0.0;
            for i in 0..n1 {
                acc += q1s[i] * d[i] * q2t[i + 1];
            }
            a[s * n2 + t] = acc;
        }
    }
    a
}

/// Alignment under the j-conserving torque evolution on the given τ grid.
///
/// The initial state enters only through its |Δj| ≤ 2, Δm = 0 band: the
/// eigenvector sum Σ_k p_k Ψ*_kj ... Ψ_kj' of the trace formula contracts to
/// the banded elements because every thermal eigenstate carries a single m.
/// Reduces to the free evolution exactly at N_ext = 0.
pub fn torque_alignment(
    state: &ThermalRotorState,
    n_ext_over_b: f64,
    taus: &[f64],
) -> Result<Vec<f64>> {
    torque_alignment_banded(state.banded_density(), n_ext_over_b, taus)
}

/// Band-level implementation of `torque_alignment`.
pub fn torque_alignment_banded(
    band: &BandedDensity,
    n_ext_over_b: f64,
    taus: &[f64],
) -> Result<Vec<f64>> {
    if !(n_ext_over_b >= 0.0) || !n_ext_over_b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "N_ext/B must be >= 0, got {n_ext_over_b}"
        )));
    }
    let j_max = band.j_max;
    let required: u64 = (0..=j_max as u64)
        .map(|j| {
            let d = 2 * j + 1;
            3 * d * d // eigenvectors + two contraction matrices
        })
        .sum();
    if required > TORQUE_MEMORY_CAP {
        return Err(Error::MemoryCap {
            required,
            cap: TORQUE_MEMORY_CAP,
        });
    }

    let shells: Vec<ShellEig> = (0..=j_max)
        .into_par_iter()
        .map(|j| shell_eig(j, n_ext_over_b))
        .collect::<Result<_>>()?;
    let contractions = build_contractions(band, &shells);

    let values: Vec<f64> = taus
        .par_iter()
        .map(|&tau| {
            let theta = std::f64::consts::PI * tau;
            let per_shell: Vec<f64> = contractions
                .iter()
                .map(|sc| {
                    let mut acc = KahanSum::new();
                    for (m1, m2, lambda) in &sc.within {
                        let n = lambda.len();
                        for s in 0..n {
                            // Diagonal (s == t) first, then symmetric pairs.
                            acc.add(m1[s * n + s] * m2[s * n + s]);
                            for t in (s + 1)..n {
                                let c = (theta * (lambda[s] - lambda[t])).cos();
                                acc.add(2.0 * m1[s * n + t] * m2[t * n + s] * c);
                            }
                        }
                    }
                    let free_gap = (4 * sc.j + 6) as f64;
                    for (a1, a2, lam, mu) in &sc.cross {
                        let (n1, n2) = (lam.len(), mu.len());
                        for s in 0..n1 {
                            for t in 0..n2 {
                                let d = theta * (lam[s] - mu[t]) - std::f64::consts::PI * (tau * free_gap);
                                acc.add(2.0 * a1[s * n2 + t] * a2[s * n2 + t] * d.cos());
                            }
                        }
                    }
                    acc.value()
                })
                .collect();
            pairwise_sum(&per_shell)
        })
        .collect();
    Ok(values)
}

/// One row of a revival-decay sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub n_ext_over_b: f64,
    pub revival_alignment: f64,
}

/// Revival alignment at τ = n for each torque in the (ascending) list.
/// The resulting table must be monotone non-increasing within 1e-6.
pub fn revival_decay_sweep(
    state: &ThermalRotorState,
    revival_index: u32,
    torques_over_b: &[f64],
) -> Result<Vec<SweepRow>> {
    if revival_index < 1 {
        return Err(Error::InvalidParameter("revival index must be >= 1".into()));
    }
    if torques_over_b.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "torque list must be strictly ascending".into(),
        ));
    }
    let tau = [revival_index as f64];
    let mut rows = Vec::with_capacity(torques_over_b.len());
    for &nb in torques_over_b {
        let a = torque_alignment(state, nb, &tau)?[0];
        rows.push(SweepRow {
            n_ext_over_b: nb,
            revival_alignment: a,
        });
    }
    const SWEEP_NOISE: f64 = 1e-6;
    for i in 1..rows.len() {
        let delta = rows[i].revival_alignment - rows[i - 1].revival_alignment;
        if delta > SWEEP_NOISE {
            return Err(Error::NonMonotoneSweep { index: i, delta });
        }
    }
    Ok(rows)
}

/// Free-evolution consistency residual max_τ |torque(0) - unitary| — exposed
/// for diagnostics and tests.
pub fn zero_torque_residual(band: &BandedDensity, taus: &[f64]) -> Result<f64> {
    let with_torque = torque_alignment_banded(band, 0.0, taus)?;
    let mut worst = 0.0f64;
    for (i, &tau) in taus.iter().enumerate() {
        worst = worst.max((with_torque[i] - unitary_alignment(band, tau)).abs());
    }
    Ok(worst)
}
