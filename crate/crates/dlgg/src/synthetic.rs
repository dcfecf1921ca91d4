//! Ground-truth generators: sparse positive definite precision matrices and
//! Gaussian data drawn from them.

use crate::edge::{edge_count, EdgeIndex};
use crate::error::{Error, Result};
use crate::mat::{Matrix, PrecisionMatrix, SymMatrix};
use crate::rng::RngStream;
use crate::scalar::{c, Scalar};
use crate::select::EdgeSet;

#[derive(Debug, Clone, PartialEq)]
pub enum Structure<T> {
    /// Off-diagonal value `value` on bands 1..=bandwidth, unit diagonal.
    Banded { bandwidth: usize, value: T },
    /// `s_p` uniformly chosen edges with magnitudes uniform on
    /// +/- [mag_lo, mag_hi]; diagonal set by row-wise dominance.
    Random { s_p: usize, mag_lo: T, mag_hi: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthSpec<T> {
    pub p: usize,
    pub structure: Structure<T>,
    pub diag_boost: T,
}

impl<T: Scalar> TruthSpec<T> {
    pub fn banded(p: usize, bandwidth: usize, value: T) -> Self {
        TruthSpec {
            p,
            structure: Structure::Banded { bandwidth, value },
            diag_boost: T::zero(),
        }
    }

    pub fn random(p: usize, s_p: usize) -> Self {
        TruthSpec {
            p,
            structure: Structure::Random {
                s_p,
                mag_lo: c(0.3),
                mag_hi: c(0.7),
            },
            diag_boost: c(0.5),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidArgument("p must be >= 2".into()));
        }
        if !(self.diag_boost >= T::zero()) {
            return Err(Error::InvalidArgument("diag_boost must be >= 0".into()));
        }
        match &self.structure {
            Structure::Banded { bandwidth, .. } => {
                if *bandwidth >= self.p {
                    return Err(Error::InvalidArgument(
                        "bandwidth must be < p".into(),
                    ));
                }
            }
            Structure::Random { s_p, mag_lo, mag_hi } => {
                if *s_p > edge_count(self.p) {
                    return Err(Error::InvalidArgument(format!(
                        "s_p = {s_p} exceeds the {} candidate edges",
                        edge_count(self.p)
                    )));
                }
                if !(*mag_lo > T::zero()) || mag_hi < mag_lo {
                    return Err(Error::InvalidArgument(
                        "need 0 < mag_lo <= mag_hi".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Generate a sparse PD precision matrix together with its exact support.
///
/// Random structures are PD by construction (diagonal dominance); banded
/// ones may need the diagonal boosted, doubling the boost up to 50 times
/// before giving up.
pub fn gen_precision<T: Scalar>(
    spec: &TruthSpec<T>,
    rng: &mut RngStream,
) -> Result<(PrecisionMatrix<T>, EdgeSet)> {
    spec.validate()?;
    let p = spec.p;
    let mut m = SymMatrix::zeros(p)?;
    let mut support = EdgeSet::empty(p);
    match &spec.structure {
        Structure::Banded { bandwidth, value } => {
            for i in 0..p {
                m.set(i, i, T::one() + spec.diag_boost);
                for j in (i + 1)..p.min(i + bandwidth + 1) {
                    m.set(i, j, *value);
                    if value.abs() > T::zero() {
                        support.insert(EdgeIndex::new(i, j, p)?)?;
                    }
                }
            }
        }
        Structure::Random { s_p, mag_lo, mag_hi } => {
            // partial Fisher-Yates over flat edge indices
            let nu = edge_count(p);
            let mut pool: Vec<usize> = (0..nu).collect();
            for k in 0..*s_p {
                let r = k + (((rng.next_u64() as u128) * ((nu - k) as u128)) >> 64) as usize;
                pool.swap(k, r);
                let e = EdgeIndex::from_flat(pool[k], p)?;
                let mag = *mag_lo + rng.uniform::<T>() * (*mag_hi - *mag_lo);
                let sign = if rng.next_u64() & 1 == 0 { T::one() } else { -T::one() };
                m.set(e.i(), e.j(), sign * mag);
                support.insert(e)?;
            }
            for i in 0..p {
                let mut row_sum = T::zero();
                for j in 0..p {
                    if j != i {
                        row_sum = row_sum + m.get(i, j).abs();
                    }
                }
                m.set(i, i, row_sum + spec.diag_boost);
            }
        }
    }
    let mut add = c::<T>(0.5);
    for _ in 0..50 {
        match PrecisionMatrix::new(m.clone()) {
            Ok(pm) => return Ok((pm, support)),
            Err(_) => {
                for i in 0..p {
                    m.set(i, i, m.get(i, i) + add);
                }
                add = add + add;
            }
        }
    }
    Err(Error::InvalidArgument(
        "could not reach positive definiteness within 50 diagonal boosts".into(),
    ))
}

/// n iid rows from N(0, omega^{-1}), generated through the Cholesky factor
/// of the covariance.
pub fn gen_data<T: Scalar>(
    omega: &PrecisionMatrix<T>,
    n: usize,
    rng: &mut RngStream,
) -> Result<Matrix<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument("need n >= 2 rows".into()));
    }
    let p = omega.dim();
    let sigma = omega.inverse()?;
    let l = sigma.cholesky()?;
    let mut data = Matrix::zeros(n, p);
    let mut z = vec![T::zero(); p];
    for r in 0..n {
        for zk in z.iter_mut() {
            *zk = rng.standard_normal();
        }
        for i in 0..p {
            let mut acc = T::zero();
            for k in 0..=i {
                acc = acc + l.get(i, k) * z[k];
            }
            data.set(r, i, acc);
        }
    }
    Ok(data)
}
