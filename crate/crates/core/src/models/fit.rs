//! Scanning log₂GSD over lattice sizes and fitting it to a symmetric
//! polynomial in the linear sizes.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::{build_model, log2_gsd, ModelSpec};
use crate::error::{domain, Error, Result};
use crate::lattice::LatticeSpec;
use crate::Limits;

type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GsdPoint {
    pub dims: Vec<usize>,
    pub n_qubits: usize,
    pub rank: usize,
    pub log2_gsd: usize,
}

/// Exact fit of `log₂GSD = c2·Σ_{i<j} L_i L_j + c1·Σ_i L_i + c0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsdFit {
    pub spec: ModelSpec,
    pub points: Vec<GsdPoint>,
    pub c2: Ratio<i128>,
    pub c1: Ratio<i128>,
    pub c0: Ratio<i128>,
    /// `observed − fitted` per point, in the order of `points`.
    pub residuals: Vec<Ratio<i128>>,
}

impl GsdFit {
    pub fn exact(&self) -> bool {
        self.residuals.iter().all(|r| *r == Q::from_integer(0))
    }

    pub fn predict(&self, dims: &[usize]) -> Ratio<i128> {
        let [e2, e1] = symmetric_features(dims);
        self.c2 * Q::from_integer(e2) + self.c1 * Q::from_integer(e1) + self.c0
    }
}

/// Elementary symmetric polynomials e₂ and e₁ of the sizes.
fn symmetric_features(dims: &[usize]) -> [i128; 2] {
    let l: Vec<i128> = dims.iter().map(|&x| x as i128).collect();
    let e1 = l.iter().sum();
    let e2 = (0..l.len()).flat_map(|i| (i + 1..l.len()).map(move |j| (i, j))).map(|(i, j)| l[i] * l[j]).sum();
    [e2, e1]
}

pub fn gsd_point(spec: ModelSpec, dims: &[usize], limits: &Limits) -> Result<GsdPoint> {
    limits.check_qubits(spec.qubit_count(dims))?;
    let lat = LatticeSpec::periodic(dims)?;
    let m = build_model(spec, &lat)?;
    let rank = m.rank();
    Ok(GsdPoint { dims: dims.to_vec(), n_qubits: m.n_qubits(), rank, log2_gsd: log2_gsd(&m) })
}

/// Evaluates every size tuple (in parallel), sorts the points by tuple, and
/// solves the normal equations over the rationals.
pub fn gsd_scan_and_fit(spec: ModelSpec, sizes: &[Vec<usize>], limits: &Limits) -> Result<GsdFit> {
    if let Some(bad) = sizes.iter().find(|d| d.len() != spec.dim) {
        return domain(format!("size tuple {bad:?} does not match {spec}"));
    }
    let mut tuples = sizes.to_vec();
    tuples.sort();
    tuples.dedup();
    let features: Vec<[i128; 3]> = tuples
        .iter()
        .map(|d| {
            let [e2, e1] = symmetric_features(d);
            [e2, e1, 1]
        })
        .collect();
    let mut distinct = features.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 3 {
        return domain(format!("{} distinct feature rows cannot determine 3 coefficients", distinct.len()));
    }
    let points: Vec<GsdPoint> = tuples.par_iter().map(|d| gsd_point(spec, d, limits)).collect::<Result<_>>()?;

    let mut ata = [[Q::from_integer(0); 3]; 3];
    let mut aty = [Q::from_integer(0); 3];
    for (f, p) in features.iter().zip(&points) {
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += Q::from_integer(f[i] * f[j]);
            }
            aty[i] += Q::from_integer(f[i] * p.log2_gsd as i128);
        }
    }
    let c = solve3(ata, aty).ok_or_else(|| Error::Domain("size tuples leave the fit underdetermined".into()))?;
    let residuals = features
        .iter()
        .zip(&points)
        .map(|(f, p)| {
            let fitted = (0..3).map(|i| c[i] * Q::from_integer(f[i])).fold(Q::from_integer(0), |a, b| a + b);
            Q::from_integer(p.log2_gsd as i128) - fitted
        })
        .collect();
    Ok(GsdFit { spec, points, c2: c[0], c1: c[1], c0: c[2], residuals })
}

/// Gauss–Jordan on a 3×3 rational system; `None` when singular.
fn solve3(mut a: [[Q; 3]; 3], mut b: [Q; 3]) -> Option<[Q; 3]> {
    let zero = Q::from_integer(0);
    for col in 0..3 {
        let p = (col..3).find(|&r| a[r][col] != zero)?;
        a.swap(col, p);
        b.swap(col, p);
        let pivot = a[col][col];
        a[col].iter_mut().for_each(|x| *x /= pivot);
        b[col] /= pivot;
        let (prow, pb) = (a[col], b[col]);
        for r in (0..3).filter(|&r| r != col) {
            let f = a[r][col];
            if f != zero {
                a[r].iter_mut().zip(prow).for_each(|(x, y)| *x -= f * y);
                b[r] -= f * pb;
            }
        }
    }
    Some(b)
}
