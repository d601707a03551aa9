use alloc::vec::Vec;

use super::geometry::{solve3, sym_eigenvalues};
use super::{LocError, Vec3};
use crate::math::sqrt;

/// Anchor sets whose smallest-to-largest covariance eigenvalue ratio falls
/// below this are rejected as coplanar.
pub const DEGENERACY_LIMIT: f64 = 1e-9;

const MAX_ITERATIONS: u32 = 100;
const STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    pub position: Vec3,
    /// RMS of `|p - a_i| - d_i` at the returned position.
    pub residual_rms: f64,
    pub iterations: u32,
    /// The last accepted step was shorter than 1e-9 m.
    pub converged: bool,
}

fn cost(p: Vec3, m: &[(Vec3, f64)]) -> f64 {
    m.iter().map(|(a, d)| (p.distance(*a) - d) * (p.distance(*a) - d)).sum()
}

fn geometry_condition(m: &[(Vec3, f64)]) -> f64 {
    let n = m.len() as f64;
    let c = m.iter().fold(Vec3::default(), |s, (a, _)| s + *a) * (1.0 / n);
    let mut cov = [[0.0; 3]; 3];
    for (a, _) in m {
        let v = (*a - c).as_array();
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += v[i] * v[j] / n;
            }
        }
    }
    let e = sym_eigenvalues(cov);
    if e[2] <= 0.0 {
        0.0
    } else {
        e[0].max(0.0) / e[2]
    }
}

/// Closed-form start from the sphere equations minus the first one:
/// `2 (a_i - a_0) . p = |a_i|^2 - |a_0|^2 - d_i^2 + d_0^2`, solved in the
/// least-squares sense.
fn linear_start(m: &[(Vec3, f64)]) -> Option<Vec3> {
    let (a0, d0) = m[0];
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (a, d) in &m[1..] {
        let row = ((*a - a0) * 2.0).as_array();
        let b = a.dot(*a) - a0.dot(a0) - d * d + d0 * d0;
        for i in 0..3 {
            atb[i] += row[i] * b;
            for k in 0..3 {
                ata[i][k] += row[i] * row[k];
            }
        }
    }
    solve3(ata, atb).map(Vec3::from_array)
}

struct Refined {
    p: Vec3,
    cost: f64,
    iterations: u32,
    converged: bool,
}

fn refine(m: &[(Vec3, f64)], start: Vec3) -> Refined {
    let mut p = start;
    let mut c = cost(p, m);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS && c > 0.0 {
        iterations += 1;
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (a, d) in m {
            let diff = p - *a;
            let r = diff.norm();
            if r == 0.0 {
                continue;
            }
            let j = (diff * (1.0 / r)).as_array();
            let res = r - d;
            for i in 0..3 {
                jtr[i] += j[i] * res;
                for k in 0..3 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }
        let mut accepted = false;
        while lambda < 1e12 {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let Some(step) = solve3(a, [-jtr[0], -jtr[1], -jtr[2]]) else {
                lambda *= 10.0;
                continue;
            };
            let step = Vec3::from_array(step);
            let cand = p + step;
            let cc = cost(cand, m);
            if cc <= c {
                p = cand;
                c = cc;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if step.norm() < STEP_TOL {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No descent direction left at working precision.
            converged = true;
        }
        if converged {
            break;
        }
    }
    if c == 0.0 {
        converged = true;
    }
    Refined {
        p,
        cost: c,
        iterations,
        converged,
    }
}

/// Nonlinear least squares on `sum (|p - a_i| - d_i)^2` by Gauss-Newton
/// with Levenberg-Marquardt damping. Without `initial` the solver starts
/// from the anchor centroid and, since that start can settle in a local
/// minimum, also from the linearized solution; the lower cost wins.
pub fn trilaterate(m: &[(Vec3, f64)], initial: Option<Vec3>) -> Result<PositionEstimate, LocError> {
    if m.len() < 4 {
        return Err(LocError::TooFewMeasurements(m.len()));
    }
    let condition = geometry_condition(m);
    if !(condition >= DEGENERACY_LIMIT) {
        return Err(LocError::DegenerateGeometry { condition });
    }
    let best = match initial {
        Some(p) => refine(m, p),
        None => {
            let centroid = m.iter().fold(Vec3::default(), |s, (a, _)| s + *a) * (1.0 / m.len() as f64);
            let a = refine(m, centroid);
            match linear_start(m).map(|p| refine(m, p)) {
                Some(b) if b.cost < a.cost => b,
                _ => a,
            }
        }
    };
    Ok(PositionEstimate {
        position: best.p,
        residual_rms: sqrt(best.cost / m.len() as f64),
        iterations: best.iterations,
        converged: best.converged,
    })
}

/// Pairs anchor positions with exact distances to `p`.
pub fn exact_measurements(anchors: &[Vec3], p: Vec3) -> Vec<(Vec3, f64)> {
    anchors.iter().map(|a| (*a, a.distance(p))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    const ROOM: [Vec3; 4] = [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(10.0, 0.0, 0.0),
        Vec3::new(0.0, 10.0, 0.0),
        Vec3::new(0.0, 0.0, 3.0),
    ];

    #[test]
    fn recovers_exact_point() {
        let p = Vec3::new(3.0, 4.0, 1.0);
        let m = exact_measurements(&ROOM, p);
        assert!((m[0].1 - sqrt(26.0)).abs() < 1e-12);
        assert!((m[1].1 - sqrt(66.0)).abs() < 1e-12);
        let e = trilaterate(&m, None).unwrap();
        assert!(e.position.distance(p) < 1e-6);
        assert!(e.converged);
        assert!(e.residual_rms < 1e-9);
    }

    #[test]
    fn mobile_on_an_anchor() {
        let m = exact_measurements(&ROOM, ROOM[1]);
        assert_eq!(m[1].1, 0.0);
        let e = trilaterate(&m, None).unwrap();
        assert!(e.position.distance(ROOM[1]) < 1e-6);
    }

    #[test]
    fn coplanar_rejected() {
        let flat = [ROOM[0], ROOM[1], ROOM[2], Vec3::new(10.0, 10.0, 0.0)];
        let m = exact_measurements(&flat, Vec3::new(1.0, 1.0, 1.0));
        assert!(matches!(trilaterate(&m, None), Err(LocError::DegenerateGeometry { .. })));
        let dup = [ROOM[0], ROOM[1], ROOM[2], ROOM[2]];
        let m = exact_measurements(&dup, Vec3::new(1.0, 1.0, 1.0));
        assert!(matches!(trilaterate(&m, None), Err(LocError::DegenerateGeometry { .. })));
    }

    #[test]
    fn three_anchors_rejected() {
        let m = exact_measurements(&ROOM[..3], Vec3::new(1.0, 1.0, 1.0));
        assert_eq!(trilaterate(&m, None), Err(LocError::TooFewMeasurements(3)));
    }

    #[test]
    fn bias_leaves_residual() {
        let mut r = SimRng::new(4);
        for _ in 0..20 {
            let p = Vec3::new(r.uniform() * 10.0, r.uniform() * 10.0, r.uniform() * 3.0);
            let m: Vec<_> = exact_measurements(&ROOM, p).into_iter().map(|(a, d)| (a, d + 0.5)).collect();
            let e = trilaterate(&m, None).unwrap();
            assert!(e.residual_rms > 0.0);
        }
    }
}
