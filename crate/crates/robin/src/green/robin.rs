use super::solver::{CField, GreenSystem};
use super::{GreenError, GridDomain};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

/// Complex-Hessian step as a fraction of the pole-to-boundary distance.
pub const HESSIAN_STEP_FRACTION: f64 = 0.05;

/// Robin function `Λ` sampled on a pole lattice.
#[derive(Clone, Debug)]
pub struct RobinFunctionField {
    pub n: usize,
    pub poles: Vec<Vec<f64>>,
    pub lambda: Vec<f64>,
    /// Complex Hessian of `−Λ` where requested.
    pub hessian: Vec<Option<DMatrix<C64>>>,
    pub eigen: Vec<Option<Vec<f64>>>,
    /// Finite-difference step used for each Hessian.
    pub step: Vec<Option<f64>>,
}

#[derive(Clone, Debug)]
pub struct FlatDirection {
    pub eigenvalue: f64,
    pub vector: DVector<C64>,
}

/// `H_{ab̄} = ∂²f/∂z_a∂z̄_b` at `x` (real layout `(Re z₁, Im z₁, …)`), by
/// polarization of `∂²/∂s∂s̄ f(z + sv) = ¼(∂²_{s₁} + ∂²_{s₂})` with 5-point
/// stencils of step `h`.
pub fn complex_hessian<E>(
    mut f: impl FnMut(&[f64]) -> Result<f64, E>,
    x: &[f64],
    h: f64,
) -> Result<DMatrix<C64>, E> {
    let n = x.len() / 2;
    let f0 = f(x)?;
    let mut levi = |v: &[C64]| -> Result<f64, E> {
        let mut lap = 0.0;
        for rot in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let mut vals = [0.0; 4];
            for (k, s) in [-2.0, -1.0, 1.0, 2.0].into_iter().enumerate() {
                let y: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(i, &xi)| {
                        let w = v[i / 2] * rot * s * h;
                        xi + if i % 2 == 0 { w.re } else { w.im }
                    })
                    .collect();
                vals[k] = f(&y)?;
            }
            lap += (-vals[0] + 16.0 * vals[1] - 30.0 * f0 + 16.0 * vals[2] - vals[3]) / (12.0 * h * h);
        }
        Ok(0.25 * lap)
    };
    let unit = |a: usize, c: C64| {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[a] = c;
        v
    };
    let mut hm = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for a in 0..n {
        hm[(a, a)] = C64::new(levi(&unit(a, C64::new(1.0, 0.0)))?, 0.0);
    }
    for a in 0..n {
        for b in a + 1..n {
            let base = hm[(a, a)].re + hm[(b, b)].re;
            let mut v = unit(a, C64::new(1.0, 0.0));
            v[b] = C64::new(1.0, 0.0);
            let re = 0.5 * (levi(&v)? - base);
            v[b] = C64::new(0.0, 1.0);
            let im = 0.5 * (levi(&v)? - base);
            hm[(a, b)] = C64::new(re, im);
            hm[(b, a)] = C64::new(re, -im);
        }
    }
    Ok(hm)
}

/// Eigenpairs of a Hermitian matrix with eigenvalue below `tol`, ascending.
pub fn flat_directions(h: &DMatrix<C64>, tol: f64) -> Vec<FlatDirection> {
    let (vals, vecs) = eigen(h);
    vals.into_iter()
        .zip(vecs)
        .filter(|(e, _)| *e < tol)
        .map(|(eigenvalue, vector)| FlatDirection { eigenvalue, vector })
        .collect()
}

fn eigen(h: &DMatrix<C64>) -> (Vec<f64>, Vec<DVector<C64>>) {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let e = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = idx.iter().map(|&i| e.eigenvectors.column(i).into_owned()).collect();
    (vals, vecs)
}

/// `Λ` at every pole on one assembled system, with warm starts. Hessians of
/// `−Λ` are computed at the sample indices in `hessian_at`.
pub fn robin_function(
    domain: &GridDomain,
    poles: &[Vec<f64>],
    c: &CField,
    hessian_at: &[usize],
) -> Result<RobinFunctionField, GreenError> {
    let sys = GreenSystem::assemble(domain, c)?;
    let mut warm: Option<Vec<f64>> = None;
    let mut lambda = Vec::with_capacity(poles.len());
    for p in poles {
        let f = sys.solve(p, warm.as_deref())?;
        lambda.push(f.lambda);
        warm = Some(sys.restrict(&f));
    }
    let mut hessian = vec![None; poles.len()];
    let mut eig = vec![None; poles.len()];
    let mut step = vec![None; poles.len()];
    for &i in hessian_at {
        let p = poles.get(i).ok_or(GreenError::StencilOutOfRange)?;
        let h = HESSIAN_STEP_FRACTION * sys.boundary_distance(p);
        let hm = complex_hessian(
            |x| match sys.solve(x, warm.as_deref()) {
                Ok(f) => {
                    warm = Some(sys.restrict(&f));
                    Ok(-f.lambda)
                }
                Err(GreenError::PoleTooCloseToBoundary) => Err(GreenError::StencilOutOfRange),
                Err(e) => Err(e),
            },
            p,
            h,
        )?;
        eig[i] = Some(eigen(&hm).0);
        hessian[i] = Some(hm);
        step[i] = Some(h);
    }
    Ok(RobinFunctionField { n: domain.n, poles: poles.to_vec(), lambda, hessian, eigen: eig, step })
}

/// Eigenpairs of the Hessian of `−Λ` at a sample, flagged flat below `tol`.
pub fn hessian_flat_directions(
    field: &RobinFunctionField,
    sample: usize,
    tol: f64,
) -> Result<Vec<FlatDirection>, GreenError> {
    let h = field.hessian.get(sample).and_then(Option::as_ref).ok_or(GreenError::StencilOutOfRange)?;
    Ok(flat_directions(h, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_degenerate_field() {
        // −Λ = 1 + |z₁|²: Hessian diag(1, 0).
        let f = |x: &[f64]| -> Result<f64, ()> { Ok(1.0 + x[0] * x[0] + x[1] * x[1]) };
        let h = complex_hessian(f, &[0.1, -0.2, 0.3, 0.05], 0.05).unwrap();
        assert!((h[(0, 0)].re - 1.0).abs() < 1e-9);
        assert!(h[(1, 1)].norm() < 1e-9 && h[(0, 1)].norm() < 1e-9);
        let flat = flat_directions(&h, 0.1);
        assert_eq!(flat.len(), 1);
        assert!((flat[0].vector[1].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn off_diagonal_polarization() {
        // f = |z₁ + i z₂|² has H = [[1, −i], [i, 1]].
        let f = |x: &[f64]| -> Result<f64, ()> {
            let re = x[0] - x[3];
            let im = x[1] + x[2];
            Ok(re * re + im * im)
        };
        let h = complex_hessian(f, &[0.0; 4], 0.1).unwrap();
        assert!((h[(0, 1)] - C64::new(0.0, -1.0)).norm() < 1e-9, "{h}");
        assert!((h[(1, 0)] - C64::new(0.0, 1.0)).norm() < 1e-9);
        let flat = flat_directions(&h, 0.1);
        assert_eq!(flat.len(), 1);
        assert!(flat[0].eigenvalue.abs() < 1e-9);
    }
}
