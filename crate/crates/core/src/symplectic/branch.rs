use std::f64::consts::PI;

use num_complex::Complex64;

use super::block::SymplecticBlock;
use super::siegel::{cz_plus_d, RealLagrangian, SiegelMatrix};
use crate::error::{Error, Result};
use crate::linalg::RMat;

/// Largest admissible change of arg det(CZ+D) between consecutive samples.
/// A principal-value step can only approach this bound, so steps within
/// `BRANCH_GUARD` of it are treated as ambiguous.
pub const BRANCH_STEP_LIMIT: f64 = PI;
pub const BRANCH_GUARD: f64 = 1e-6;

/// Step bound used by the refiner when it is free to choose sample times.
pub const REFINED_STEP: f64 = PI / 2.0;

pub const DEFAULT_EPS_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Readings farther than this from an integer are rejected.
pub const MASLOV_INTEGER_TOL: f64 = 0.05;

/// Sign convention: the index is the accumulated argument of det(C Z + D)
/// divided by pi, with Z approaching the real graph from the upper
/// half-plane. Half a period of the unit harmonic oscillator from the graph
/// Z = 0 gives `HALF_PERIOD_INDEX`.
pub const HALF_PERIOD_INDEX: i64 = 1;

/// A sampled path of symplectic blocks together with a continuous branch of
/// sqrt det(C Z0 + D).
#[derive(Debug, Clone)]
pub struct MetaplecticPath {
    samples: Vec<(f64, SymplecticBlock)>,
    ref_z: SiegelMatrix,
    dets: Vec<Complex64>,
    args: Vec<f64>,
}

impl MetaplecticPath {
    pub fn samples(&self) -> &[(f64, SymplecticBlock)] {
        &self.samples
    }

    pub fn ref_z(&self) -> &SiegelMatrix {
        &self.ref_z
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Continuously tracked argument at the final sample.
    pub fn accumulated_arg(&self) -> f64 {
        *self.args.last().unwrap()
    }

    pub fn arg_at(&self, i: usize) -> f64 {
        self.args[i]
    }

    pub fn det_at(&self, i: usize) -> Complex64 {
        self.dets[i]
    }

    pub fn sqrt_at(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.dets[i].norm().sqrt(), self.args[i] / 2.0)
    }

    /// Current branch value of sqrt det(C Z0 + D).
    pub fn sqrt_value(&self) -> Complex64 {
        self.sqrt_at(self.len() - 1)
    }
}

fn det_of(block: &SymplecticBlock, z0: &SiegelMatrix) -> Result<Complex64> {
    if block.n() != z0.n() {
        return Err(Error::Dimension { expected: z0.n(), got: block.n() });
    }
    let det = cz_plus_d(block, &z0.matrix()).determinant();
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::Caustic { detail: format!("det(CZ0+D) = {det}") });
    }
    Ok(det)
}

/// Track the argument of det(C(t) Z0 + D(t)) along a sampled path.
///
/// The initial sample uses the principal branch. Each subsequent step takes
/// the principal argument of the ratio of determinants; a step whose size
/// reaches `BRANCH_STEP_LIMIT - BRANCH_GUARD` is ambiguous and rejected.
pub fn branch_track(path: &[(f64, SymplecticBlock)], z0: &SiegelMatrix) -> Result<MetaplecticPath> {
    if path.is_empty() {
        return Err(Error::InvalidArgument("empty path".into()));
    }
    let mut dets: Vec<Complex64> = Vec::with_capacity(path.len());
    let mut args: Vec<f64> = Vec::with_capacity(path.len());
    for (i, (t, block)) in path.iter().enumerate() {
        let det = det_of(block, z0)?;
        if i == 0 {
            args.push(det.arg());
        } else {
            let step = (det / dets[i - 1]).arg();
            if step.abs() >= BRANCH_STEP_LIMIT - BRANCH_GUARD {
                return Err(Error::BranchJump { t0: path[i - 1].0, t1: *t, jump: step });
            }
            args.push(args[i - 1] + step);
        }
        dets.push(det);
    }
    Ok(MetaplecticPath { samples: path.to_vec(), ref_z: z0.clone(), dets, args })
}

/// Like [`branch_track`], but the path is given as a function of time and the
/// sample times are refined by bisection. A step is accepted once its
/// argument change is at most `REFINED_STEP` and agrees with the sum of the
/// two half steps through the midpoint; `times` should still resolve the
/// coarse shape of the path.
pub fn branch_track_fn<F>(block_at: F, times: &[f64], z0: &SiegelMatrix) -> Result<MetaplecticPath>
where
    F: Fn(f64) -> Result<SymplecticBlock>,
{
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time list".into()));
    }
    let mut samples: Vec<(f64, SymplecticBlock)> = Vec::new();
    let mut dets: Vec<Complex64> = Vec::new();
    let first = block_at(times[0])?;
    dets.push(det_of(&first, z0)?);
    samples.push((times[0], first));
    for &t_next in &times[1..] {
        let mut stack = vec![(t_next, block_at(t_next)?)];
        while let Some((t, block)) = stack.pop() {
            let det = det_of(&block, z0)?;
            let t_prev: f64 = samples.last().unwrap().0;
            let det_prev: Complex64 = *dets.last().unwrap();
            let mid = 0.5 * (t_prev + t);
            let mid_block = block_at(mid)?;
            let det_mid = det_of(&mid_block, z0)?;
            let full = (det / det_prev).arg();
            let h1 = (det_mid / det_prev).arg();
            let h2 = (det / det_mid).arg();
            let ok = full.abs() <= REFINED_STEP
                && h1.abs() <= REFINED_STEP
                && h2.abs() <= REFINED_STEP
                && (h1 + h2 - full).abs() < 1e-9;
            if ok {
                samples.push((t, block));
                dets.push(det);
            } else {
                if (t - t_prev).abs() < 1e-13 * (1.0 + t.abs()) {
                    return Err(Error::BranchJump { t0: t_prev, t1: t, jump: full });
                }
                stack.push((t, block));
                stack.push((mid, mid_block));
            }
        }
    }
    branch_track(&samples, z0)
}

/// Result of the real-limit index computation.
#[derive(Debug, Clone, PartialEq)]
pub struct MaslovIndex {
    /// Integer winding read off at the smallest epsilon (not reduced).
    pub k: i64,
    /// (epsilon, accumulated_arg / pi) for every epsilon of the schedule.
    pub readings: Vec<(f64, f64)>,
}

impl MaslovIndex {
    /// k reduced to {0, 1, 2, 3}.
    pub fn mod4(&self) -> i64 {
        self.k.rem_euclid(4)
    }
}

fn check_schedule(eps_schedule: &[f64]) -> Result<()> {
    if eps_schedule.len() < 2 {
        return Err(Error::InvalidArgument("epsilon schedule needs at least two values".into()));
    }
    if eps_schedule.iter().any(|e| !(*e > 0.0)) || eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("epsilon schedule must be positive and strictly decreasing".into()));
    }
    Ok(())
}

fn final_real_det(block: &SymplecticBlock, z_real: &RealLagrangian) -> Result<f64> {
    let m: RMat = block.c() * z_real.matrix() + block.d();
    let det = m.determinant();
    let scale = m.amax().max(1.0).powi(m.nrows() as i32);
    if det.abs() <= 1e-10 * scale {
        return Err(Error::Caustic { detail: format!("det(C Z_real + D) = {det:e} at the endpoint") });
    }
    Ok(det)
}

fn read_index<T>(mut track: T, z_real: &RealLagrangian, eps_schedule: &[f64]) -> Result<MaslovIndex>
where
    T: FnMut(&SiegelMatrix) -> Result<MetaplecticPath>,
{
    check_schedule(eps_schedule)?;
    let mut readings = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let path = track(&z_real.with_epsilon(eps)?)?;
        readings.push((eps, path.accumulated_arg() / PI));
    }
    let tail = &readings[readings.len() - 2..];
    let ks: Vec<i64> = tail.iter().map(|(_, r)| r.round() as i64).collect();
    for (eps, r) in tail {
        if (r - r.round()).abs() > MASLOV_INTEGER_TOL {
            return Err(Error::Inconclusive(format!("reading {r:.4} at eps={eps:e} is not near an integer")));
        }
    }
    if ks[0] != ks[1] {
        return Err(Error::Inconclusive(format!("index changed from {} to {} between the last two eps values", ks[0], ks[1])));
    }
    Ok(MaslovIndex { k: ks[1], readings })
}

/// Maslov index of a sampled path for the real Lagrangian graph `z_real`.
pub fn maslov_index(
    path: &[(f64, SymplecticBlock)],
    z_real: &RealLagrangian,
    eps_schedule: &[f64],
) -> Result<MaslovIndex> {
    let last = &path.last().ok_or_else(|| Error::InvalidArgument("empty path".into()))?.1;
    final_real_det(last, z_real)?;
    read_index(|z0| branch_track(path, z0), z_real, eps_schedule)
}

/// Maslov index of a path given as a function of time, with automatic refinement.
pub fn maslov_index_fn<F>(block_at: F, times: &[f64], z_real: &RealLagrangian, eps_schedule: &[f64]) -> Result<MaslovIndex>
where
    F: Fn(f64) -> Result<SymplecticBlock>,
{
    let t_end = *times.last().ok_or_else(|| Error::InvalidArgument("empty time list".into()))?;
    final_real_det(&block_at(t_end)?, z_real)?;
    read_index(|z0| branch_track_fn(&block_at, times, z0), z_real, eps_schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::siegel::moebius_act;

    fn rotation_path(t_end: f64, steps: usize) -> Vec<(f64, SymplecticBlock)> {
        (0..=steps)
            .map(|k| {
                let t = t_end * k as f64 / steps as f64;
                (t, SymplecticBlock::rotation(1, t))
            })
            .collect()
    }

    #[test]
    fn identity_path() {
        let path: Vec<_> = (0..5).map(|k| (k as f64, SymplecticBlock::identity(2))).collect();
        let mp = branch_track(&path, &SiegelMatrix::i_identity(2)).unwrap();
        for i in 0..mp.len() {
            assert_eq!(mp.arg_at(i), 0.0);
            assert!((mp.sqrt_at(i) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let k = maslov_index(&path, &RealLagrangian::zero(2), &DEFAULT_EPS_SCHEDULE).unwrap();
        assert_eq!(k.k, 0);
    }

    #[test]
    fn rotation_sqrt_values() {
        let z = SiegelMatrix::i_identity(1);
        let full = branch_track(&rotation_path(2.0 * PI, 64), &z).unwrap();
        assert!((full.sqrt_value() + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let quarter = branch_track(&rotation_path(PI / 2.0, 16), &z).unwrap();
        assert!((quarter.sqrt_value() - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-12);
        for i in 0..full.len() {
            let s = full.sqrt_at(i);
            assert!(((s * s) - full.det_at(i)).norm() <= 1e-10 * full.det_at(i).norm());
        }
    }

    #[test]
    fn coarse_path_is_rejected() {
        let z = SiegelMatrix::i_identity(1);
        let err = branch_track(&rotation_path(2.0 * PI, 2), &z).unwrap_err();
        assert!(matches!(err, Error::BranchJump { .. }));
        let fine = branch_track_fn(|t| Ok(SymplecticBlock::rotation(1, t)), &[0.0, 2.0 * PI], &z).unwrap();
        assert!((fine.sqrt_value() + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rotation_maslov_indices() {
        let zero = RealLagrangian::zero(1);
        let full = maslov_index_fn(|t| Ok(SymplecticBlock::rotation(1, t)), &[0.0, 2.0 * PI], &zero, &DEFAULT_EPS_SCHEDULE)
            .unwrap();
        assert_eq!(full.mod4(), 2);
        let half = maslov_index_fn(|t| Ok(SymplecticBlock::rotation(1, t)), &[0.0, PI], &zero, &DEFAULT_EPS_SCHEDULE)
            .unwrap();
        assert_eq!(half.k, HALF_PERIOD_INDEX);
        let sampled = maslov_index(&rotation_path(PI, 1000), &zero, &DEFAULT_EPS_SCHEDULE).unwrap();
        assert_eq!(sampled.k, HALF_PERIOD_INDEX);
    }

    #[test]
    fn endpoint_caustic_and_bad_schedule() {
        let zero = RealLagrangian::zero(1);
        let err = maslov_index(&rotation_path(PI / 2.0, 100), &zero, &DEFAULT_EPS_SCHEDULE).unwrap_err();
        assert!(matches!(err, Error::Caustic { .. }));
        assert!(maslov_index(&rotation_path(PI, 100), &zero, &[1e-3, 1e-2]).is_err());
    }

    #[test]
    fn cocycle_split() {
        let k = SymplecticBlock::quadratic_generator(
            &RMat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]),
            &RMat::from_row_slice(2, 2, &[0.2, 0.0, -0.1, 0.4]),
            &RMat::from_row_slice(2, 2, &[1.5, -0.2, -0.2, 0.8]),
        )
        .unwrap();
        let times: Vec<f64> = (0..=400).map(|i| i as f64 * 0.02).collect();
        let path: Vec<_> = times.iter().map(|&t| (t, SymplecticBlock::exp_generator(&k, t).unwrap())).collect();
        let z0 = SiegelMatrix::new(&crate::linalg::CMat::from_row_slice(2, 2, &[
            Complex64::new(0.1, 1.0), Complex64::new(0.2, 0.1),
            Complex64::new(0.2, 0.1), Complex64::new(-0.3, 0.5),
        ]))
        .unwrap();
        let whole = branch_track(&path, &z0).unwrap();
        let split = 137;
        let m_s = path[split].1.clone();
        let first = branch_track(&path[..=split], &z0).unwrap();
        let inv = m_s.symplectic_inverse();
        let second_path: Vec<_> = path[split..].iter().map(|(t, b)| (*t, b.compose(&inv))).collect();
        let z_s = moebius_act(&m_s, &z0).unwrap();
        let second = branch_track(&second_path, &z_s).unwrap();
        let prod = first.sqrt_value() * second.sqrt_value();
        assert!((prod - whole.sqrt_value()).norm() < 1e-9 * whole.sqrt_value().norm());
    }
}
