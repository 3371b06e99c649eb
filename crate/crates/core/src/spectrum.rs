//! Quantum energy levels `E = hbar * sum_i sqrt(lambda_i) (n_i + 1/2)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::diagonalize::ModeDecomposition;
use crate::error::{Error, Result};

/// Largest number of levels [`lowest_levels`] will enumerate.
pub const MAX_LEVELS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLevel {
    pub occupations: Vec<u32>,
    pub energy: f64,
}

fn mode_frequencies(lambdas: &[f64]) -> Result<Vec<f64>> {
    lambdas
        .iter()
        .enumerate()
        .map(|(index, &lambda)| {
            if lambda > 0.0 {
                Ok(lambda.sqrt())
            } else {
                Err(Error::UnboundSystem { index, lambda })
            }
        })
        .collect()
}

/// `hbar * sum_i freq_i (n_i + 1/2)`, summed in mode order.
pub fn level_energy(freqs: &[f64], hbar: f64, occupations: &[u32]) -> f64 {
    hbar * freqs
        .iter()
        .zip(occupations)
        .map(|(w, &n)| w * (n as f64 + 0.5))
        .sum::<f64>()
}

pub fn ground_state_energy(dec: &ModeDecomposition, hbar: f64) -> Result<f64> {
    let freqs = mode_frequencies(&dec.lambdas)?;
    Ok(0.5 * hbar * freqs.iter().sum::<f64>())
}

/// Ascending by energy, then lexicographically by occupations; reversed for
/// the max-heap.
struct Frontier(EnergyLevel);

impl Frontier {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.0
            .energy
            .total_cmp(&other.0.energy)
            .then_with(|| self.0.occupations.cmp(&other.0.occupations))
    }
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// The `k` lowest levels, ascending, ties in lexicographic occupation order.
///
/// Best-first expansion over the occupation lattice. A popped tuple only
/// spawns successors that increment an index at or after its last non-zero
/// occupation, so every tuple has exactly one parent and is generated once.
pub fn lowest_levels(dec: &ModeDecomposition, hbar: f64, k: usize) -> Result<Vec<EnergyLevel>> {
    if !(1..=MAX_LEVELS).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "level count must be in 1..={MAX_LEVELS}, got {k}"
        )));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be > 0, got {hbar}")));
    }
    let freqs = mode_frequencies(&dec.lambdas)?;
    let n = freqs.len();

    let mut heap = BinaryHeap::new();
    let ground = vec![0u32; n];
    heap.push(Frontier(EnergyLevel {
        energy: level_energy(&freqs, hbar, &ground),
        occupations: ground,
    }));

    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let Some(Frontier(level)) = heap.pop() else {
            break;
        };
        let first = level.occupations.iter().rposition(|&x| x > 0).unwrap_or(0);
        for i in first..n {
            let mut occ = level.occupations.clone();
            occ[i] += 1;
            heap.push(Frontier(EnergyLevel {
                energy: level_energy(&freqs, hbar, &occ),
                occupations: occ,
            }));
        }
        out.push(level);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonalize::decompose;
    use crate::linalg::GenMatrix;
    use crate::model::OscillatorModel;

    fn fake(lambdas: Vec<f64>) -> ModeDecomposition {
        let n = lambdas.len();
        ModeDecomposition {
            lambdas,
            u: GenMatrix::identity(n).unwrap(),
            c: GenMatrix::identity(n).unwrap(),
            residual_orth: 0.0,
            residual_kinetic: 0.0,
            residual_potential: 0.0,
        }
    }

    #[test]
    fn ground_state() {
        let dec = decompose(&OscillatorModel::identical(3, 1.0, 1.0, 1.0)).unwrap();
        let e0 = ground_state_energy(&dec, 1.0).unwrap();
        // (sqrt(1/2) + sqrt(1/2) + sqrt(2)) / 2 = sqrt(2)
        assert!((e0 - 2.0_f64.sqrt()).abs() < 1e-12);

        let dec = decompose(&OscillatorModel::from_omegas(vec![1.0, 1.0], &[1.0, 1.0])).unwrap();
        assert_eq!(ground_state_energy(&dec, 1.0).unwrap(), 1.0);

        assert_eq!(
            ground_state_energy(&fake(vec![-0.1, 1.0]), 1.0),
            Err(Error::UnboundSystem { index: 0, lambda: -0.1 })
        );
    }

    #[test]
    fn degenerate_ladder() {
        let levels = lowest_levels(&fake(vec![1.0, 1.0]), 1.0, 4).unwrap();
        let e: Vec<f64> = levels.iter().map(|l| l.energy).collect();
        assert_eq!(e, vec![1.0, 2.0, 2.0, 3.0]);
        let occ: Vec<Vec<u32>> = levels.into_iter().map(|l| l.occupations).collect();
        assert_eq!(occ, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn identical_oscillator_levels() {
        let dec = decompose(&OscillatorModel::identical(3, 1.0, 1.0, 1.0)).unwrap();
        let levels = lowest_levels(&dec, 1.0, 3).unwrap();
        let e0 = 2.0_f64.sqrt();
        let step = 0.5_f64.sqrt();
        assert!((levels[0].energy - e0).abs() < 1e-12);
        assert!((levels[1].energy - e0 - step).abs() < 1e-12);
        assert!((levels[2].energy - e0 - step).abs() < 1e-12);
        let mut excited: Vec<Vec<u32>> = levels[1..].iter().map(|l| l.occupations.clone()).collect();
        excited.sort();
        assert_eq!(excited, vec![vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn matches_grid_enumeration() {
        let lambdas = vec![0.37, 1.0, 2.3];
        let freqs: Vec<f64> = lambdas.iter().map(|l: &f64| l.sqrt()).collect();
        let mut grid = Vec::new();
        for a in 0..=6u32 {
            for b in 0..=6u32 {
                for c in 0..=6u32 {
                    let occ = vec![a, b, c];
                    grid.push((level_energy(&freqs, 1.0, &occ), occ));
                }
            }
        }
        grid.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        // every level below 7 * min frequency is complete in the grid
        let cutoff = 0.5 * freqs.iter().sum::<f64>() + 7.0 * freqs[0];
        let k = grid.iter().filter(|g| g.0 < cutoff).count();
        let levels = lowest_levels(&fake(lambdas), 1.0, k).unwrap();
        for (l, g) in levels.iter().zip(&grid) {
            assert_eq!(l.energy, g.0);
            assert_eq!(l.occupations, g.1);
        }
    }

    #[test]
    fn output_invariants() {
        let levels = lowest_levels(&fake(vec![0.5, 0.8, 1.7, 3.0]), 0.7, 500).unwrap();
        assert_eq!(levels.len(), 500);
        assert!(levels.windows(2).all(|w| w[0].energy <= w[1].energy));
        let mut occ: Vec<&Vec<u32>> = levels.iter().map(|l| &l.occupations).collect();
        occ.sort();
        occ.dedup();
        assert_eq!(occ.len(), 500);
        let e0 = levels[0].energy;
        let freqs = [0.5_f64.sqrt(), 0.8_f64.sqrt(), 1.7_f64.sqrt(), 3.0_f64.sqrt()];
        for l in &levels {
            let gap: f64 = 0.7 * l.occupations.iter().zip(freqs).map(|(&n, w)| n as f64 * w).sum::<f64>();
            assert!((l.energy - e0 - gap).abs() <= 1e-12 * l.energy);
        }
    }

    #[test]
    fn argument_errors() {
        let dec = fake(vec![1.0]);
        assert!(matches!(lowest_levels(&dec, 1.0, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            lowest_levels(&dec, 1.0, MAX_LEVELS + 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            lowest_levels(&fake(vec![1.0, 0.0]), 1.0, 3),
            Err(Error::UnboundSystem { index: 1, .. })
        ));
    }
}
