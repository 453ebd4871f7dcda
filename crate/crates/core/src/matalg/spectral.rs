use super::{HermitianOperator, TraceState};
use crate::error::Result;

/// Atomic distribution `{(λ, w)}` with atoms sorted by position.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    /// Sorts the atoms and merges exact duplicates.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        SpectralMeasure { atoms: merged }
    }

    pub fn point_mass(x: f64) -> Self {
        SpectralMeasure { atoms: vec![(x, 1.0)] }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// `∫ x^p dμ`.
    pub fn moment(&self, p: i32) -> f64 {
        self.atoms.iter().map(|(x, w)| w * x.powi(p)).sum()
    }

    /// Right-continuous CDF `μ((−∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|a| a.0 <= x);
        self.atoms[..idx].iter().map(|a| a.1).sum()
    }

    /// Weight of the atom at `x` within `tol`.
    pub fn weight_at(&self, x: f64, tol: f64) -> f64 {
        self.atoms.iter().filter(|a| (a.0 - x).abs() <= tol).map(|a| a.1).sum()
    }

    /// `∫ e^{itx} dμ`.
    pub fn characteristic(&self, t: f64) -> num_complex::Complex64 {
        self.atoms.iter().map(|(x, w)| num_complex::Complex64::from_polar(*w, t * x)).sum()
    }
}

/// Clustering tolerance for merging eigenvalues: `1e-8 · (1 + ‖A‖_op)`.
pub fn cluster_tolerance(op_norm: f64) -> f64 {
    1e-8 * (1.0 + op_norm)
}

/// Distribution of `A` under `ρ`: atoms at clustered eigenvalues weighted by
/// `ρ` of the eigenprojection.
pub fn spectral_measure(rho: &TraceState, a: &HermitianOperator) -> Result<SpectralMeasure> {
    super::check_square(a.matrix(), rho.dim())?;
    let tracial = rho.is_tracial();
    let values: Vec<f64> = if tracial { a.eigenvalues()?.to_vec() } else { a.eigen()?.values.clone() };
    let norm = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = cluster_tolerance(norm);
    let k = values.len() as f64;

    let weight_of = |j: usize| -> Result<f64> {
        match rho.density() {
            Some(d) if !tracial => Ok(a.eigen()?.vectors.quadratic_form(d, j).re),
            _ => Ok(1.0 / k),
        }
    };

    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mut w = 0.0;
        for j in start..end {
            w += weight_of(j)?;
        }
        atoms.push((mean, w));
        start = end;
    }
    Ok(SpectralMeasure { atoms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::{from_real_rows, identity, presets};

    #[test]
    fn pauli_z_is_fair_coin() {
        let z = HermitianOperator::new(presets::pauli_z()).unwrap();
        let mu = spectral_measure(&TraceState::tracial(2), &z).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        assert!((mu.atoms()[0].0 + 1.0).abs() < 1e-12 && (mu.atoms()[0].1 - 0.5).abs() < 1e-12);
        assert!((mu.atoms()[1].0 - 1.0).abs() < 1e-12 && (mu.atoms()[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_is_point_mass_for_any_state() {
        let i = HermitianOperator::new(identity(2)).unwrap();
        let pure = TraceState::with_density(from_real_rows(&[&[0.3, 0.0], &[0.0, 0.7]])).unwrap();
        for rho in [TraceState::tracial(2), pure] {
            let mu = spectral_measure(&rho, &i).unwrap();
            assert_eq!(mu.atoms().len(), 1);
            assert!((mu.atoms()[0].0 - 1.0).abs() < 1e-12 && (mu.atoms()[0].1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplicities_become_weights() {
        let d = HermitianOperator::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 3.0, 0.0], &[0.0, 0.0, 7.0]]).unwrap();
        let mu = spectral_measure(&TraceState::tracial(3), &d).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        assert!((mu.atoms()[0].0 - 3.0).abs() < 1e-12 && (mu.atoms()[0].1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((mu.atoms()[1].0 - 7.0).abs() < 1e-12 && (mu.atoms()[1].1 - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(mu.cdf(3.0), mu.atoms()[0].1);
        assert_eq!(mu.cdf(2.9), 0.0);
    }

    #[test]
    fn density_weights_use_eigenprojections() {
        let rho = TraceState::with_density(from_real_rows(&[&[0.25, 0.0], &[0.0, 0.75]])).unwrap();
        let z = HermitianOperator::new(presets::pauli_z()).unwrap();
        let mu = spectral_measure(&rho, &z).unwrap();
        assert!((mu.weight_at(1.0, 1e-9) - 0.25).abs() < 1e-12);
        assert!((mu.weight_at(-1.0, 1e-9) - 0.75).abs() < 1e-12);
    }
}
