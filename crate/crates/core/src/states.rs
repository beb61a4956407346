//! Probe-state constructors: θ-parameterized product/GHZ/bipartite families,
//! the three-qubit W family, d-dimensional maximal block superpositions, and
//! the d-partite cyclic state.

use crate::tensor::{cr, ComplexMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("weights are not normalized: |x|² sums to {0}")]
    BadWeights(f64),
    #[error("mode pair ({0}, {1}) invalid for {2} modes")]
    BadPair(usize, usize, usize),
    #[error("dimension {0} out of supported range 2..=4")]
    BadDimension(usize),
    #[error("mode count {0} unsupported ({1})")]
    BadModeCount(usize, &'static str),
    #[error("blocks must partition the modes exactly: {0}")]
    BadBlocks(String),
    #[error("state vector has wrong length {got}, expected {want}")]
    BadLength { got: usize, want: usize },
}

/// Signal modes are sent to the target; idler modes stay at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Signal,
    Idler,
}

/// Normalized pure state on labeled modes.
#[derive(Debug, Clone)]
pub struct PureState {
    pub dims: Vec<usize>,
    pub roles: Vec<Role>,
    pub amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, roles: Vec<Role>, amps: Vec<Complex64>) -> Result<Self, StateError> {
        let n: usize = dims.iter().product();
        if amps.len() != n {
            return Err(StateError::BadLength {
                got: amps.len(),
                want: n,
            });
        }
        assert_eq!(dims.len(), roles.len(), "one role per mode");
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(StateError::BadWeights(norm));
        }
        Ok(Self { dims, roles, amps })
    }

    pub fn mode_count(&self) -> usize {
        self.dims.len()
    }

    pub fn signal_modes(&self) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&i| self.roles[i] == Role::Signal)
            .collect()
    }

    pub fn idler_modes(&self) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&i| self.roles[i] == Role::Idler)
            .collect()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(self.dims.clone(), &self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Probe-state family selector, as read from scenario configuration files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// |0…0⟩ with no entanglement.
    Separable,
    /// cos(θ/2)|0…0⟩ + sin(θ/2)|…1ᵢ…1ⱼ…⟩ for qubits; maximal superposition
    /// (1/√d)Σₖ|kᵢkⱼ⟩ for qudits.
    BipartitePair { pair: (usize, usize) },
    /// cos(θ/2)|0…0⟩ + sin(θ/2)|1…1⟩ for qubits; (1/√d)Σₖ|k…k⟩ for qudits.
    Ghz,
    /// x₁|001⟩ + x₂|010⟩ + x₃|100⟩ on three qubits.
    W,
    /// d-partite, d-dimensional uniform superposition over all d! permutations.
    Cyclic,
    /// Partition of the modes into maximally entangled blocks.
    Blocks { blocks: Vec<Vec<usize>> },
    /// Explicit amplitudes (interleaved re/im pairs in config files).
    Custom { amps: Vec<f64> },
}

/// Full probe specification: family plus mode layout and free parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeSpec {
    #[serde(flatten)]
    pub family: Family,
    pub dims: Vec<usize>,
    pub roles: Vec<Role>,
    /// Superposition angle for the θ-families; ignored elsewhere. Defaults to π/2.
    pub theta: Option<f64>,
    /// (x₁, x₂, x₃) for the W family. Defaults to the symmetric point.
    pub weights: Option<(f64, f64, f64)>,
}

impl ProbeSpec {
    pub fn build(&self) -> Result<PureState, StateError> {
        let theta = self.theta.unwrap_or(std::f64::consts::FRAC_PI_2);
        match &self.family {
            Family::Separable => {
                build_theta_family(&self.dims, &self.roles, None, theta)
            }
            Family::BipartitePair { pair } => {
                if all_qubits(&self.dims) {
                    build_theta_family(&self.dims, &self.roles, Some(*pair), theta)
                } else {
                    build_blocks(&self.dims, &self.roles, &pair_blocks(self.dims.len(), *pair)?)
                }
            }
            Family::Ghz => {
                if all_qubits(&self.dims) {
                    build_ghz_theta(&self.dims, &self.roles, theta)
                } else {
                    let all: Vec<usize> = (0..self.dims.len()).collect();
                    build_blocks(&self.dims, &self.roles, &[all])
                }
            }
            Family::W => {
                let w = self.weights.unwrap_or_else(|| {
                    let x = 1.0 / 3f64.sqrt();
                    (x, x, x)
                });
                build_w(&self.roles, w)
            }
            Family::Cyclic => build_cyclic(self.dims[0], &self.roles),
            Family::Blocks { blocks } => build_blocks(&self.dims, &self.roles, blocks),
            Family::Custom { amps } => {
                let camps: Vec<Complex64> = amps
                    .chunks(2)
                    .map(|p| Complex64::new(p[0], *p.get(1).unwrap_or(&0.0)))
                    .collect();
                PureState::new(self.dims.clone(), self.roles.clone(), camps)
            }
        }
    }
}

fn all_qubits(dims: &[usize]) -> bool {
    dims.iter().all(|&d| d == 2)
}

fn pair_blocks(n: usize, pair: (usize, usize)) -> Result<Vec<Vec<usize>>, StateError> {
    if pair.0 == pair.1 || pair.0 >= n || pair.1 >= n {
        return Err(StateError::BadPair(pair.0, pair.1, n));
    }
    let mut blocks = vec![vec![pair.0, pair.1]];
    for m in 0..n {
        if m != pair.0 && m != pair.1 {
            blocks.push(vec![m]);
        }
    }
    Ok(blocks)
}

fn flat_index(dims: &[usize], digits: &[usize]) -> usize {
    digits
        .iter()
        .zip(dims)
        .fold(0, |acc, (&dg, &d)| acc * d + dg)
}

/// θ-parameterized qubit families: Separable |0…0⟩, GHZ, or BipartitePair(i,j)
/// with cos(θ/2)|0…0⟩ + sin(θ/2)|…1ᵢ…1ⱼ…⟩.
pub fn build_theta_family(
    dims: &[usize],
    roles: &[Role],
    pair: Option<(usize, usize)>,
    theta: f64,
) -> Result<PureState, StateError> {
    let n: usize = dims.iter().product();
    let mut amps = vec![Complex64::ZERO; n];
    match pair {
        None => {
            amps[0] = Complex64::ONE;
        }
        Some((i, j)) => {
            if i == j || i >= dims.len() || j >= dims.len() {
                return Err(StateError::BadPair(i, j, dims.len()));
            }
            let mut digits = vec![0usize; dims.len()];
            digits[i] = 1;
            digits[j] = 1;
            amps[0] = cr((theta / 2.0).cos());
            amps[flat_index(dims, &digits)] = cr((theta / 2.0).sin());
        }
    }
    PureState::new(dims.to_vec(), roles.to_vec(), amps)
}

/// GHZ θ-family on qubits: cos(θ/2)|0…0⟩ + sin(θ/2)|1…1⟩.
pub fn build_ghz_theta(dims: &[usize], roles: &[Role], theta: f64) -> Result<PureState, StateError> {
    let n: usize = dims.iter().product();
    let mut amps = vec![Complex64::ZERO; n];
    amps[0] = cr((theta / 2.0).cos());
    amps[n - 1] = cr((theta / 2.0).sin());
    PureState::new(dims.to_vec(), roles.to_vec(), amps)
}

/// W family x₁|001⟩ + x₂|010⟩ + x₃|100⟩ on three qubits.
pub fn build_w(roles: &[Role], weights: (f64, f64, f64)) -> Result<PureState, StateError> {
    if roles.len() != 3 {
        return Err(StateError::BadModeCount(roles.len(), "W is three-qubit"));
    }
    let (x1, x2, x3) = weights;
    let norm = x1 * x1 + x2 * x2 + x3 * x3;
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(StateError::BadWeights(norm));
    }
    let mut amps = vec![Complex64::ZERO; 8];
    amps[0b001] = cr(x1);
    amps[0b010] = cr(x2);
    amps[0b100] = cr(x3);
    PureState::new(vec![2, 2, 2], roles.to_vec(), amps)
}

/// Maximally entangled block partition: every multi-mode block carries
/// (1/√d)Σₖ|k…k⟩ across its modes, singletons carry |0⟩.
pub fn build_blocks(
    dims: &[usize],
    roles: &[Role],
    blocks: &[Vec<usize>],
) -> Result<PureState, StateError> {
    let nmodes = dims.len();
    for &d in dims {
        if !(2..=4).contains(&d) {
            return Err(StateError::BadDimension(d));
        }
    }
    let mut seen = vec![false; nmodes];
    for b in blocks {
        for &m in b {
            if m >= nmodes || seen[m] {
                return Err(StateError::BadBlocks(format!("{blocks:?}")));
            }
            seen[m] = true;
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(StateError::BadBlocks(format!("{blocks:?}")));
    }
    let n: usize = dims.iter().product();
    let mut amps = vec![Complex64::ZERO; n];
    // per multi-mode block, one uniform superposition index k in 0..d
    let entangled: Vec<&Vec<usize>> = blocks.iter().filter(|b| b.len() > 1).collect();
    let mut weight = 1.0;
    for b in &entangled {
        weight /= (dims[b[0]] as f64).sqrt();
    }
    let mut choice = vec![0usize; entangled.len()];
    loop {
        let mut digits = vec![0usize; nmodes];
        for (b, &k) in entangled.iter().zip(&choice) {
            for &m in b.iter() {
                digits[m] = k;
            }
        }
        amps[flat_index(dims, &digits)] = cr(weight);
        // odometer over block choices
        let mut carry = true;
        for (i, b) in entangled.iter().enumerate() {
            if carry {
                choice[i] += 1;
                if choice[i] == dims[b[0]] {
                    choice[i] = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    PureState::new(dims.to_vec(), roles.to_vec(), amps)
}

/// Cyclic state: uniform superposition over all d! permutation kets
/// |σ(0) σ(1) … σ(d−1)⟩ of a d-partite, d-dimensional system.
pub fn build_cyclic(d: usize, roles: &[Role]) -> Result<PureState, StateError> {
    if !(2..=4).contains(&d) {
        return Err(StateError::BadDimension(d));
    }
    if roles.len() != d {
        return Err(StateError::BadModeCount(roles.len(), "cyclic needs d modes"));
    }
    let dims = vec![d; d];
    let n: usize = dims.iter().product();
    let mut amps = vec![Complex64::ZERO; n];
    let mut perm: Vec<usize> = (0..d).collect();
    let fact: usize = (1..=d).product();
    let weight = cr(1.0 / (fact as f64).sqrt());
    // Heap's algorithm
    let mut ctr = vec![0usize; d];
    amps[flat_index(&dims, &perm)] = weight;
    let mut i = 0;
    while i < d {
        if ctr[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(ctr[i], i);
            }
            amps[flat_index(&dims, &perm)] = weight;
            ctr[i] += 1;
            i = 0;
        } else {
            ctr[i] = 0;
            i += 1;
        }
    }
    PureState::new(dims, roles.to_vec(), amps)
}
