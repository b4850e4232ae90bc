//! Dense exact diagonalization of `H = −J Σ σˣᵢσˣᵢ₊₁ + B Σ σᶻᵢ` with periodic
//! boundaries, in the `σᶻ` product basis.
//!
//! `H` commutes with the parity `Π σᶻᵢ`, so the two parity blocks
//! (`2^{L−1}` states each) are diagonalized separately. Every eigenvalue is
//! kept; nothing else about the spectrum is assumed.

use faer::{Mat, Side};

use crate::error::{Error, Result};

pub const MIN_CHAIN_SITES: usize = 4;
pub const MAX_CHAIN_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub l: usize,
    pub j: f64,
    /// Any real `B`; the spectrum is even in `B`.
    pub b: f64,
    pub beta: f64,
}

impl ChainSpec {
    pub fn new(l: usize, j: f64, b: f64, beta: f64) -> Result<Self> {
        let spec = ChainSpec { l, j, b, beta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l > MAX_CHAIN_SITES {
            return Err(Error::DimensionCap {
                requested: self.l,
                max: MAX_CHAIN_SITES,
            });
        }
        if self.l < MIN_CHAIN_SITES {
            return Err(Error::invalid(format!("chain needs at least {MIN_CHAIN_SITES} sites")));
        }
        if !self.j.is_finite() || !self.b.is_finite() {
            return Err(Error::invalid("J and B must be finite"));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::invalid("beta must be positive and finite"));
        }
        Ok(())
    }
}

struct Block {
    states: Vec<usize>,
    index: Vec<usize>,
}

fn parity_blocks(l: usize) -> [Block; 2] {
    let dim = 1usize << l;
    let mut blocks = [
        Block {
            states: Vec::with_capacity(dim / 2),
            index: vec![usize::MAX; dim],
        },
        Block {
            states: Vec::with_capacity(dim / 2),
            index: vec![usize::MAX; dim],
        },
    ];
    for s in 0..dim {
        let p = (s.count_ones() & 1) as usize;
        let b = &mut blocks[p];
        b.index[s] = b.states.len();
        b.states.push(s);
    }
    blocks
}

fn block_hamiltonian(spec: &ChainSpec, block: &Block) -> Mat<f64> {
    let l = spec.l;
    let n = block.states.len();
    let mut h = Mat::<f64>::zeros(n, n);
    for (col, &s) in block.states.iter().enumerate() {
        // bit set = spin down, σᶻ = −1
        let magnetization = l as f64 - 2.0 * s.count_ones() as f64;
        h[(col, col)] += spec.b * magnetization;
        for i in 0..l {
            let flipped = s ^ (1 << i) ^ (1 << ((i + 1) % l));
            let row = block.index[flipped];
            h[(row, col)] -= spec.j;
        }
    }
    h
}

/// All eigenvalues of the chain Hamiltonian, ascending.
pub fn ed_spectrum(spec: &ChainSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut all = Vec::with_capacity(1 << spec.l);
    for block in parity_blocks(spec.l).iter() {
        let h = block_hamiltonian(spec, block);
        let ev = h
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::NonConvergence {
                iterations: 0,
                err_est: f64::NAN,
            })?;
        all.extend(ev);
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(all)
}

/// `−(1/βL) log Σ e^{−βE}` over the full spectrum.
pub fn ed_free_energy(spec: &ChainSpec) -> Result<f64> {
    let energies = ed_spectrum(spec)?;
    let e0 = energies[0];
    let sum: f64 = energies.iter().map(|e| (-spec.beta * (e - e0)).exp()).sum();
    Ok((e0 - sum.ln() / spec.beta) / spec.l as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdCorrelation {
    /// Thermal `⟨σˣᵢσˣⱼ⟩`, symmetric over any (quasi-)degenerate ground space.
    pub value: f64,
    /// `β (E₁ − E₀)`; below 20 the state is not ground-dominated.
    pub beta_gap: f64,
}

impl EdCorrelation {
    pub fn ground_dominated(&self) -> bool {
        self.beta_gap > 20.0
    }
}

/// Thermal `⟨σˣᵢσˣⱼ⟩` by full spectral decomposition.
pub fn ed_correlation(spec: &ChainSpec, i: usize, j: usize) -> Result<EdCorrelation> {
    spec.validate()?;
    if !(i < j && j < spec.l) {
        return Err(Error::invalid(format!("need 0 <= i < j < L, got i = {i}, j = {j}")));
    }
    let mask = (1usize << i) | (1usize << j);
    let blocks = parity_blocks(spec.l);
    let mut levels: Vec<(f64, f64)> = Vec::with_capacity(1 << spec.l);
    for block in blocks.iter() {
        let h = block_hamiltonian(spec, block);
        let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NonConvergence {
            iterations: 0,
            err_est: f64::NAN,
        })?;
        let u = evd.U();
        let s = evd.S().column_vector();
        for k in 0..block.states.len() {
            // ⟨n|σˣᵢσˣⱼ|n⟩ = Σ_s v_s v_{s ⊕ mask}
            let expectation: f64 = block
                .states
                .iter()
                .enumerate()
                .map(|(r, &st)| u[(r, k)] * u[(block.index[st ^ mask], k)])
                .sum();
            levels.push((s[k], expectation));
        }
    }
    levels.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let e0 = levels[0].0;
    let (mut z, mut acc) = (0.0, 0.0);
    for &(e, c) in &levels {
        let w = (-spec.beta * (e - e0)).exp();
        if w < 1e-300 {
            break;
        }
        z += w;
        acc += w * c;
    }
    Ok(EdCorrelation {
        value: acc / z,
        beta_gap: spec.beta * (levels[1].0 - e0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_spins() {
        let f = ed_free_energy(&ChainSpec::new(4, 0.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((f + (2.0 * 1f64.cosh()).ln()).abs() < 1e-13);
    }

    #[test]
    fn classical_ferromagnet_ground_energy() {
        for l in [4, 6, 9] {
            let e = ed_spectrum(&ChainSpec::new(l, 1.0, 0.0, 1.0).unwrap()).unwrap();
            assert!((e[0] / l as f64 + 1.0).abs() < 1e-12);
            let f = ed_free_energy(&ChainSpec::new(l, 1.0, 0.0, 60.0).unwrap()).unwrap();
            // two degenerate ground states: f = −1 − log 2 /(βL)
            assert!((f + 1.0 + 2f64.ln() / (60.0 * l as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_is_even_in_transverse_field() {
        let a = ed_spectrum(&ChainSpec::new(6, 1.0, 0.7, 1.0).unwrap()).unwrap();
        let b = ed_spectrum(&ChainSpec::new(6, 1.0, -0.7, 1.0).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let fa = ed_free_energy(&ChainSpec::new(6, 1.0, 0.7, 0.9).unwrap()).unwrap();
        let fb = ed_free_energy(&ChainSpec::new(6, 1.0, -0.7, 0.9).unwrap()).unwrap();
        assert!((fa - fb).abs() < 1e-13);
    }

    #[test]
    fn spectrum_trace_identities() {
        // tr H = 0 and tr H² = 2^L · L (J² + B²)
        let (l, j, b) = (6, 0.8, 1.3);
        let e = ed_spectrum(&ChainSpec::new(l, j, b, 1.0).unwrap()).unwrap();
        let dim = (1 << l) as f64;
        assert!(e.iter().sum::<f64>().abs() < 1e-10);
        let tr2: f64 = e.iter().map(|x| x * x).sum();
        assert!((tr2 - dim * l as f64 * (j * j + b * b)).abs() < 1e-8);
    }

    #[test]
    fn correlation_limits() {
        let c = ed_correlation(&ChainSpec::new(6, 1.0, 0.0, 50.0).unwrap(), 0, 3).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
        // the two ferromagnetic states are exactly degenerate
        assert!(!c.ground_dominated());
        let c = ed_correlation(&ChainSpec::new(6, 0.0, 1.0, 50.0).unwrap(), 0, 1).unwrap();
        assert!(c.value.abs() < 1e-12);
        assert!(c.ground_dominated());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            ChainSpec::new(13, 1.0, 0.5, 1.0),
            Err(Error::DimensionCap { requested: 13, max: 12 })
        ));
        assert!(ChainSpec::new(3, 1.0, 0.5, 1.0).is_err());
        assert!(ChainSpec::new(6, 1.0, 0.5, 0.0).is_err());
        let spec = ChainSpec::new(6, 1.0, 0.5, 1.0).unwrap();
        assert!(ed_correlation(&spec, 3, 3).is_err());
        assert!(ed_correlation(&spec, 2, 6).is_err());
    }
}
