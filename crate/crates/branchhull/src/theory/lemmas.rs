//! Sampled validation of the two sphere statements used by the noisy
//! analysis: the joint indicator count over the product of spheres and the
//! per-direction sign conditions. Minima over continuous spheres cannot be
//! certified exactly, so these report sampled values refined by local
//! descent; they are upper bounds on the true minima.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::rng::{derive_seed, SeededStream};
use crate::theory::hemisphere_coverage;

/// The 10-Lipschitz ramp relaxing the indicator `1_{z <= 0}`:
/// 1 for `z < -0.1`, `-z / 0.1` on `[-0.1, 0]`, 0 for `z > 0`.
pub fn ramp(z: f64) -> f64 {
    if z < -0.1 {
        1.0
    } else if z <= 0.0 {
        -z / 0.1
    } else {
        0.0
    }
}

fn indicator_count(b: &DMatrix<f64>, c: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let bx = b * x;
    let cy = c * y;
    (0..b.nrows())
        .filter(|&l| bx[l] <= 0.0 && cy[l] <= 0.0)
        .count() as f64
}

fn relaxed_count(b: &DMatrix<f64>, c: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let bx = b * x;
    let cy = c * y;
    (0..b.nrows()).map(|l| ramp(bx[l]) * ramp(cy[l])).sum()
}

fn unit_normal(dim: usize, stream: &mut SeededStream) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| stream.normal());
        let n = v.norm();
        if n > 0.0 {
            return v / n;
        }
    }
}

/// Shrinking random-perturbation descent on the product of spheres; a fixed
/// evaluation budget per scale keeps the refinement deterministic and cheap.
fn local_descent<F>(
    f: &F,
    mut x: DVector<f64>,
    mut y: DVector<f64>,
    stream: &mut SeededStream,
) -> f64
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    let mut best = f(&x, &y);
    let mut scale = 0.2;
    for _ in 0..12 {
        for _ in 0..120 {
            let xp = {
                let v = &x + scale * unit_normal(x.len(), stream);
                let n = v.norm();
                v / n
            };
            let yp = {
                let v = &y + scale * unit_normal(y.len(), stream);
                let n = v.norm();
                v / n
            };
            let val = f(&xp, &yp);
            if val < best {
                best = val;
                x = xp;
                y = yp;
            }
        }
        scale *= 0.5;
    }
    best
}

/// Sampled minimum of the indicator count and of its continuous relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma6Report {
    /// Smallest sampled (and locally refined) value of the indicator count.
    pub min_sampled_count: f64,
    /// Smallest sampled (and locally refined) value of the ramp relaxation.
    pub relaxed_min: f64,
}

/// Samples `samples` pairs of unit vectors and reports empirical minima of
/// the indicator count `f` and its relaxation `g`, each refined by local
/// descent from the best sampled pair. Both are upper-bound estimates of the
/// true minima over the product of spheres.
pub fn lemma6_count(
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    samples: usize,
    seed: u64,
) -> Lemma6Report {
    assert!(samples >= 1000, "need at least 1000 samples");
    let k = b.ncols();
    let n = c.ncols();
    let mut stream = SeededStream::new(seed);

    let mut best_f = f64::INFINITY;
    let mut best_g = f64::INFINITY;
    let mut arg_f = (DVector::zeros(k), DVector::zeros(n));
    let mut arg_g = (DVector::zeros(k), DVector::zeros(n));
    for _ in 0..samples {
        let x = unit_normal(k, &mut stream);
        let y = unit_normal(n, &mut stream);
        let fv = indicator_count(b, c, &x, &y);
        let gv = relaxed_count(b, c, &x, &y);
        if fv < best_f {
            best_f = fv;
            arg_f = (x.clone(), y.clone());
        }
        if gv < best_g {
            best_g = gv;
            arg_g = (x, y);
        }
    }

    let mut descent_stream = SeededStream::new(derive_seed(&format!("bh-lemma6|seed={seed}")));
    let min_sampled_count = local_descent(
        &|x, y| indicator_count(b, c, x, y),
        arg_f.0,
        arg_f.1,
        &mut descent_stream,
    );
    let relaxed_min = local_descent(
        &|x, y| relaxed_count(b, c, x, y),
        arg_g.0,
        arg_g.1,
        &mut descent_stream,
    );
    Lemma6Report {
        min_sampled_count,
        relaxed_min,
    }
}

/// Sampled check of the two per-direction sign conditions behind the
/// one-sided noise bound: for each random `(dh, dm)` there must exist rows
/// `l` and `k` with
///
/// ```text
/// sign(b_l1) <b_l_tail, dh> <= 0  and  sign(c_l1) <c_l_tail, dm> <= 0
/// sign(b_k1) <b_k_tail, dh> >= 0  and  sign(c_k1) <c_k_tail, dm> <= 0
/// ```
///
/// The summed single-inequality form is certified exactly through
/// [`hemisphere_coverage`] on the vectors
/// `-(sign(b_l1) b_l_tail, sign(c_l1) c_l_tail)`; the two-index statement
/// itself is validated on `directions` sampled pairs. Requires `K, N >= 2`.
pub fn lemma5_conditions(
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    directions: usize,
    seed: u64,
) -> Result<bool> {
    let k = b.ncols();
    let n = c.ncols();
    assert!(k >= 2 && n >= 2, "tail conditions need K, N >= 2");
    let l = b.nrows();

    // Tail rows scaled by the sign of the leading coordinate.
    let mut tb = DMatrix::zeros(l, k - 1);
    let mut tc = DMatrix::zeros(l, n - 1);
    for i in 0..l {
        let sb = b[(i, 0)].signum();
        let sc = c[(i, 0)].signum();
        for j in 1..k {
            tb[(i, j - 1)] = sb * b[(i, j)];
        }
        for j in 1..n {
            tc[(i, j - 1)] = sc * c[(i, j)];
        }
    }

    let mut stream = SeededStream::new(seed);
    for _ in 0..directions {
        let dh = unit_normal(k - 1, &mut stream);
        let dm = unit_normal(n - 1, &mut stream);
        let u = &tb * &dh;
        let v = &tc * &dm;
        let first = (0..l).any(|i| u[i] <= 0.0 && v[i] <= 0.0);
        let second = (0..l).any(|i| u[i] >= 0.0 && v[i] <= 0.0);
        if !(first && second) {
            return Ok(false);
        }
    }

    let centers: Vec<DVector<f64>> = (0..l)
        .map(|i| {
            let mut v = DVector::zeros((k - 1) + (n - 1));
            for j in 0..k - 1 {
                v[j] = -tb[(i, j)];
            }
            for j in 0..n - 1 {
                v[k - 1 + j] = -tc[(i, j)];
            }
            let norm = v.norm();
            v / norm
        })
        .collect();
    hemisphere_coverage(&centers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn ramp_is_below_indicator() {
        for z in [-5.0, -0.2, -0.1, -0.05, 0.0, 0.05, 2.0] {
            let ind = if z <= 0.0 { 1.0 } else { 0.0 };
            assert!(ramp(z) <= ind + 1e-15, "z = {z}");
        }
        assert_eq!(ramp(-0.2), 1.0);
        assert_eq!(ramp(-0.05), 0.5);
        assert_eq!(ramp(0.01), 0.0);
    }

    #[test]
    fn single_row_count_is_binary() {
        let b = dmatrix![1.0, 0.5, -0.2];
        let c = dmatrix![0.3, 0.3, 0.3];
        let report = lemma6_count(&b, &c, 1000, 3);
        assert!(report.min_sampled_count == 0.0 || report.min_sampled_count == 1.0);
        // One indicator can always be driven to zero by pointing x along b_1.
        assert_eq!(report.min_sampled_count, 0.0);
        assert!(report.relaxed_min <= report.min_sampled_count + 1e-12);
    }

    #[test]
    fn single_row_cannot_satisfy_both_conditions() {
        let b = dmatrix![1.0, 0.5];
        let c = dmatrix![0.3, -0.4];
        assert!(!lemma5_conditions(&b, &c, 64, 5).unwrap());
    }
}
