//! Hypothesis-pair construction: ρ0/ρ1 for n signal and m idler qudits.
//!
//! Each signal reflects independently with probability η. A lost signal's
//! tensor slot is replaced in place by the environment state, keeping ρ0 and
//! ρ1 on one labeled space. ρ1 is the binomially weighted sum over all loss
//! subsets of the signal modes.

use crate::states::PureState;
use crate::tensor::{ComplexMatrix, TensorError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("probe has no signal modes; nothing to illuminate")]
    NoSignals,
    #[error("parameter {name} = {value} outside [0, 1]")]
    BadParameter { name: &'static str, value: f64 },
    #[error("noise spectrum invalid: {0}")]
    BadNoise(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Environment state seen in a lost signal slot. White noise is I/d; a
/// general diagonal spectrum is used only by the two-qudit benchmark.
#[derive(Debug, Clone)]
pub enum NoiseKind {
    White,
    Diagonal(Vec<f64>),
}

impl NoiseKind {
    fn weights(&self, d: usize) -> Result<Vec<f64>, ScenarioError> {
        match self {
            NoiseKind::White => Ok(vec![1.0 / d as f64; d]),
            NoiseKind::Diagonal(l) => {
                if l.len() != d {
                    return Err(ScenarioError::BadNoise(format!(
                        "{} eigenvalues for dimension {d}",
                        l.len()
                    )));
                }
                let sum: f64 = l.iter().sum();
                if l.iter().any(|&x| x <= 0.0) || (sum - 1.0).abs() > 1e-10 {
                    return Err(ScenarioError::BadNoise(format!(
                        "eigenvalues must be positive and sum to 1 (sum = {sum})"
                    )));
                }
                Ok(l.clone())
            }
        }
    }
}

/// White-noise environment state I_d/d.
pub fn white_noise(d: usize) -> ComplexMatrix {
    ComplexMatrix::diag(&vec![1.0 / d as f64; d])
}

/// A probe plus channel parameters; the recipe for one (ρ0, ρ1) pair.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub probe: PureState,
    pub eta: f64,
    pub p0: f64,
    pub noise: NoiseKind,
}

impl Scenario {
    pub fn new(probe: PureState, eta: f64, p0: f64) -> Result<Self, ScenarioError> {
        Self::with_noise(probe, eta, p0, NoiseKind::White)
    }

    pub fn with_noise(
        probe: PureState,
        eta: f64,
        p0: f64,
        noise: NoiseKind,
    ) -> Result<Self, ScenarioError> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(ScenarioError::BadParameter {
                name: "eta",
                value: eta,
            });
        }
        if !(0.0..=1.0).contains(&p0) {
            return Err(ScenarioError::BadParameter {
                name: "p0",
                value: p0,
            });
        }
        Ok(Self {
            probe,
            eta,
            p0,
            noise,
        })
    }

    pub fn p1(&self) -> f64 {
        1.0 - self.p0
    }

    pub fn build_hypotheses(&self) -> Result<HypothesisPair, ScenarioError> {
        let exp = LossExpansion::new(&self.probe, &self.noise)?;
        Ok(HypothesisPair {
            rho0: exp.rho0().clone(),
            rho1: exp.rho1(self.eta),
        })
    }
}

/// The two output hypotheses on one labeled space.
#[derive(Debug, Clone)]
pub struct HypothesisPair {
    pub rho0: ComplexMatrix,
    pub rho1: ComplexMatrix,
}

/// Probe state with modes in `lost` replaced in place by the (diagonal)
/// environment state and traced out of |ψ⟩⟨ψ|.
pub fn loss_term(
    probe: &PureState,
    lost: &[usize],
    noise: &NoiseKind,
) -> Result<ComplexMatrix, ScenarioError> {
    let dims = &probe.dims;
    let nmodes = dims.len();
    let proj = probe.projector();
    if lost.is_empty() {
        return Ok(proj);
    }
    let kept: Vec<usize> = (0..nmodes).filter(|m| !lost.contains(m)).collect();
    let reduced = proj.partial_trace(&kept)?;

    let mut strides = vec![1usize; nmodes];
    for i in (0..nmodes - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let lost_dims: Vec<usize> = lost.iter().map(|&m| dims[m]).collect();
    let lost_weights: Vec<Vec<f64>> = lost
        .iter()
        .map(|&m| noise.weights(dims[m]))
        .collect::<Result<_, _>>()?;
    let kept_dims: Vec<usize> = kept.iter().map(|&m| dims[m]).collect();
    let nk: usize = kept_dims.iter().product();
    let nt: usize = lost_dims.iter().product();

    let unrank = |mut x: usize, ds: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize; ds.len()];
        for i in (0..ds.len()).rev() {
            out[i] = x % ds[i];
            x /= ds[i];
        }
        out
    };
    let offset = |modes: &[usize], digits: &[usize]| -> usize {
        modes
            .iter()
            .zip(digits)
            .map(|(&m, &dg)| dg * strides[m])
            .sum()
    };

    let mut out = ComplexMatrix::zeros(dims.clone());
    for t in 0..nt {
        let tdg = unrank(t, &lost_dims);
        let toff = offset(lost, &tdg);
        let mut w = 1.0;
        for (i, &dg) in tdg.iter().enumerate() {
            w *= lost_weights[i][dg];
        }
        for rk in 0..nk {
            let roff = offset(&kept, &unrank(rk, &kept_dims));
            for ck in 0..nk {
                let coff = offset(&kept, &unrank(ck, &kept_dims));
                let v = reduced.get(rk, ck) * Complex64::new(w, 0.0);
                if v != Complex64::ZERO {
                    out.set(roff + toff, coff + toff, out.get(roff + toff, coff + toff) + v);
                }
            }
        }
    }
    Ok(out)
}

/// Binomial expansion of ρ1 over loss subsets, grouped by loss count:
/// ρ1(η) = Σ_j η^(k−j) (1−η)^j A_j with A_j = Σ_{|U|=j} T_U, and ρ0 = A_k.
#[derive(Debug, Clone)]
pub struct LossExpansion {
    pub dims: Vec<usize>,
    pub signal_count: usize,
    /// A_j indexed by loss count j = 0..=k.
    pub terms: Vec<ComplexMatrix>,
}

impl LossExpansion {
    pub fn new(probe: &PureState, noise: &NoiseKind) -> Result<Self, ScenarioError> {
        let signals = probe.signal_modes();
        let k = signals.len();
        if k == 0 {
            return Err(ScenarioError::NoSignals);
        }
        let mut terms: Vec<ComplexMatrix> =
            (0..=k).map(|_| ComplexMatrix::zeros(probe.dims.clone())).collect();
        for mask in 0u32..(1 << k) {
            let lost: Vec<usize> = (0..k)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| signals[i])
                .collect();
            let j = lost.len();
            let t = loss_term(probe, &lost, noise)?;
            terms[j].axpy(1.0, &t);
        }
        Ok(Self {
            dims: probe.dims.clone(),
            signal_count: k,
            terms,
        })
    }

    pub fn rho0(&self) -> &ComplexMatrix {
        &self.terms[self.signal_count]
    }

    pub fn rho1(&self, eta: f64) -> ComplexMatrix {
        let k = self.signal_count;
        let mut out = ComplexMatrix::zeros(self.dims.clone());
        for (j, a) in self.terms.iter().enumerate() {
            let w = eta.powi((k - j) as i32) * (1.0 - eta).powi(j as i32);
            if w != 0.0 {
                out.axpy(w, a);
            }
        }
        out
    }

    /// p1·ρ1(η) − p0·ρ0, the operator whose positive support is Π1.
    pub fn decision_operator(&self, p0: f64, eta: f64) -> ComplexMatrix {
        let mut m = self.rho1(eta).scale(crate::tensor::cr(1.0 - p0));
        m.axpy(-p0, self.rho0());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_blocks, build_ghz_theta, build_theta_family, Role};
    use crate::tensor::cr;

    const S: Role = Role::Signal;
    const I: Role = Role::Idler;

    fn bell_1s1i() -> PureState {
        build_blocks(&[2, 2], &[S, I], &[vec![0, 1]]).unwrap()
    }

    #[test]
    fn white_noise_diagonals() {
        for d in 2..=4usize {
            let e = white_noise(d);
            for i in 0..d {
                assert!((e.get(i, i) - cr(1.0 / d as f64)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn eta_zero_collapses_to_rho0() {
        let s = Scenario::new(bell_1s1i(), 0.0, 0.5).unwrap();
        let h = s.build_hypotheses().unwrap();
        assert!(h.rho1.sub(&h.rho0).frobenius_norm() < 1e-14);
        // and rho0 = I/2 ⊗ I/2 for the Bell probe
        for i in 0..4 {
            assert!((h.rho0.get(i, i) - cr(0.25)).norm() < 1e-14);
        }
    }

    #[test]
    fn eta_one_is_pure_probe() {
        let probe = build_theta_family(&[2, 2, 2], &[S, S, I], Some((1, 2)), 1.3).unwrap();
        let s = Scenario::new(probe.clone(), 1.0, 0.3).unwrap();
        let h = s.build_hypotheses().unwrap();
        assert!(h.rho1.sub(&probe.projector()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn three_signal_product_expansion() {
        // |000⟩ probe at η = 1/2: ρ1 = ⊗ (η|0⟩⟨0| + (1−η)I/2) per mode
        let probe = build_theta_family(&[2, 2, 2], &[S, S, S], None, 0.0).unwrap();
        let s = Scenario::new(probe, 0.5, 0.5).unwrap();
        let h = s.build_hypotheses().unwrap();
        let single = ComplexMatrix::diag(&[0.75, 0.25]);
        let want = single.kron(&single).kron(&single);
        assert!(h.rho1.sub(&want).frobenius_norm() < 1e-13);
    }

    #[test]
    fn trace_one_for_random_draws() {
        let probe = build_ghz_theta(&[2, 2, 2], &[S, S, I], 0.77).unwrap();
        let exp = LossExpansion::new(&probe, &NoiseKind::White).unwrap();
        for i in 0..100 {
            let eta = (i as f64 + 0.5) / 100.0;
            let r1 = exp.rho1(eta);
            assert!((r1.trace() - cr(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn hypotheses_share_dims_and_are_density_operators() {
        let probe = build_blocks(&[3, 3, 3], &[S, S, I], &[vec![0, 1, 2]]).unwrap();
        let s = Scenario::new(probe, 0.4, 0.6).unwrap();
        let h = s.build_hypotheses().unwrap();
        assert_eq!(h.rho0.dims(), h.rho1.dims());
        for rho in [&h.rho0, &h.rho1] {
            assert!((rho.trace() - cr(1.0)).norm() < 1e-10);
            let eigs = rho.eigvalsh().unwrap();
            assert!(eigs.iter().all(|&l| l > -1e-10));
            let sum: f64 = eigs.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_signals_is_error() {
        let probe = build_blocks(&[2, 2], &[I, I], &[vec![0, 1]]).unwrap();
        assert!(matches!(
            Scenario::new(probe, 0.5, 0.5).unwrap().build_hypotheses(),
            Err(ScenarioError::NoSignals)
        ));
    }

    #[test]
    fn diagonal_noise_slot_replacement() {
        // 1S, single-mode probe |0⟩ under diagonal noise: ρ1 = η|0⟩⟨0| + (1−η)diag(λ)
        let probe = PureState::new(vec![3], vec![S], vec![cr(1.0), cr(0.0), cr(0.0)]).unwrap();
        let lambda = vec![0.5, 0.3, 0.2];
        let s =
            Scenario::with_noise(probe, 0.4, 0.5, NoiseKind::Diagonal(lambda.clone())).unwrap();
        let h = s.build_hypotheses().unwrap();
        for i in 0..3 {
            let want = if i == 0 { 0.4 + 0.6 * lambda[i] } else { 0.6 * lambda[i] };
            assert!((h.rho1.get(i, i) - cr(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn bad_noise_is_rejected() {
        let probe = bell_1s1i();
        let s = Scenario::with_noise(probe, 0.5, 0.5, NoiseKind::Diagonal(vec![0.9, 0.2]))
            .unwrap();
        assert!(s.build_hypotheses().is_err());
    }
}
