//! Problem data for the bilinear recovery task: two vectors observed through
//! their entrywise product `y = (B h) o (C m) o (1 + xi)` with known signs
//! `s = sign(B h)` and known subspace matrices `B`, `C`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::SeededStream;

/// Observable data of one recovery problem.
///
/// `b` is `L x K`, `c` is `L x N`, `y` and `s` have length `L`. Entries of
/// `s` are in `{-1, 0, +1}`; instances produced by [`generate_instance`]
/// never contain a zero sign.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    y: DVector<f64>,
    s: Vec<i8>,
}

impl ProblemInstance {
    /// Builds an instance from raw parts, validating dimensions and sign
    /// entries.
    pub fn new(b: DMatrix<f64>, c: DMatrix<f64>, y: DVector<f64>, s: Vec<i8>) -> Result<Self> {
        let l = b.nrows();
        if l == 0 || b.ncols() == 0 || c.ncols() == 0 {
            return Err(Error::InvalidDimension(
                "L, K and N must all be at least 1".into(),
            ));
        }
        if c.nrows() != l || y.len() != l || s.len() != l {
            return Err(Error::InvalidDimension(format!(
                "row counts disagree: B has {l}, C has {}, y has {}, s has {}",
                c.nrows(),
                y.len(),
                s.len()
            )));
        }
        if let Some(i) = s.iter().position(|v| !matches!(v, -1 | 0 | 1)) {
            return Err(Error::InvalidArgument(format!(
                "sign entry {i} is {}, expected -1, 0 or +1",
                s[i]
            )));
        }
        Ok(ProblemInstance { b, c, y, s })
    }

    pub fn k(&self) -> usize {
        self.b.ncols()
    }

    pub fn n(&self) -> usize {
        self.c.ncols()
    }

    pub fn l(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn s(&self) -> &[i8] {
        &self.s
    }
}

/// Hidden signals behind an instance, kept for error reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub h_nat: DVector<f64>,
    pub m_nat: DVector<f64>,
    /// Multiplicative noise; `y = y_hat o (1 + xi)` entrywise.
    pub xi: DVector<f64>,
    /// Clean products `y_hat[l] = (b_l . h_nat) * (c_l . m_nat)`.
    pub y_hat: DVector<f64>,
}

impl GroundTruth {
    /// Realized noise level `epsilon = ||xi||_inf`.
    pub fn noise_level(&self) -> f64 {
        self.xi.amax()
    }

    /// The balanced representative targeted by the convex program.
    pub fn balanced(&self) -> BalancedSignal {
        balance(&self.h_nat, &self.m_nat).expect("ground truth vectors are nonzero")
    }
}

/// Multiplicative noise configuration. `epsilon`, the realized noise level
/// `||xi||_inf`, is a property of the draw and is read off the
/// [`GroundTruth`]; it never exceeds `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// `xi_l` i.i.d. uniform on `[-alpha, alpha]`.
    UniformSymmetric { alpha: f64 },
    /// `xi_l` i.i.d. uniform on `[-alpha, 0]`.
    OneSidedUniform { alpha: f64 },
}

impl NoiseModel {
    pub fn alpha(&self) -> f64 {
        match self {
            NoiseModel::None => 0.0,
            NoiseModel::UniformSymmetric { alpha } | NoiseModel::OneSidedUniform { alpha } => {
                *alpha
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let alpha = self.alpha();
        if alpha < 0.0 {
            return Err(Error::NegativeAlpha(alpha));
        }
        Ok(())
    }

    fn draw(&self, l: usize, stream: &mut SeededStream) -> DVector<f64> {
        match self {
            NoiseModel::None => DVector::zeros(l),
            NoiseModel::UniformSymmetric { alpha } => {
                DVector::from_fn(l, |_, _| stream.uniform_in(-alpha, *alpha))
            }
            NoiseModel::OneSidedUniform { alpha } => {
                DVector::from_fn(l, |_, _| -alpha * stream.uniform())
            }
        }
    }
}

/// Choice of hidden signal in the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `h_nat = e1`, `m_nat = e1` (the phase-transition study).
    StandardBasis,
    /// i.i.d. standard normal entries (the noise study).
    Gaussian,
}

/// A pair with equal norms and the same outer product as its source.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedSignal {
    pub h_bal: DVector<f64>,
    pub m_bal: DVector<f64>,
}

impl BalancedSignal {
    /// `sqrt(||h_bal||^2 + ||m_bal||^2)`, the joint norm used as the
    /// denominator of relative errors.
    pub fn joint_norm(&self) -> f64 {
        (self.h_bal.norm_squared() + self.m_bal.norm_squared()).sqrt()
    }
}

/// Sign with `sign(0) = 0`.
pub fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Rescales `(h, m)` to the equal-norm representative of its scaling class:
/// `(h sqrt(||m||/||h||), m sqrt(||h||/||m||))`. The outer product is
/// unchanged.
pub fn balance(h: &DVector<f64>, m: &DVector<f64>) -> Result<BalancedSignal> {
    let (nh, nm) = (h.norm(), m.norm());
    if nh == 0.0 || nm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let r = (nm / nh).sqrt();
    Ok(BalancedSignal {
        h_bal: h * r,
        m_bal: m / r,
    })
}

/// Draws a problem instance from the Gaussian subspace model.
///
/// For a fixed seed the output is bit-identical across calls. The draw order
/// against the ChaCha20 stream of [`SeededStream`] is: `B` column-major, then
/// `C` column-major, then (for [`Target::Gaussian`]) `h_nat` and `m_nat`, then
/// one row-redraw pass, then `xi`. A row `l` is redrawn (fresh normals for row
/// `l` of `B` then of `C`, repeated until clean) whenever `b_l . h_nat` or
/// `c_l . m_nat` is exactly zero, so emitted instances never carry a zero sign
/// or a vanishing clean product.
pub fn generate_instance(
    k: usize,
    n: usize,
    l: usize,
    noise: NoiseModel,
    target: Target,
    seed: u64,
) -> Result<(ProblemInstance, GroundTruth)> {
    if k < 1 || n < 1 || l < 1 {
        return Err(Error::InvalidDimension(format!(
            "K, N, L must be at least 1, got ({k}, {n}, {l})"
        )));
    }
    noise.validate()?;

    let mut stream = SeededStream::new(seed);
    let mut b = DMatrix::zeros(l, k);
    for j in 0..k {
        for i in 0..l {
            b[(i, j)] = stream.normal();
        }
    }
    let mut c = DMatrix::zeros(l, n);
    for j in 0..n {
        for i in 0..l {
            c[(i, j)] = stream.normal();
        }
    }

    let (h_nat, m_nat) = match target {
        Target::StandardBasis => {
            let mut h = DVector::zeros(k);
            h[0] = 1.0;
            let mut m = DVector::zeros(n);
            m[0] = 1.0;
            (h, m)
        }
        Target::Gaussian => {
            let mut h = DVector::zeros(k);
            loop {
                stream.fill_normal(h.as_mut_slice());
                if h.norm() > 0.0 {
                    break;
                }
            }
            let mut m = DVector::zeros(n);
            loop {
                stream.fill_normal(m.as_mut_slice());
                if m.norm() > 0.0 {
                    break;
                }
            }
            (h, m)
        }
    };

    let mut w = &b * &h_nat;
    let mut x = &c * &m_nat;
    for i in 0..l {
        // Probability-zero event, but seeds must never emit a degenerate row.
        while w[i] == 0.0 || x[i] == 0.0 {
            for j in 0..k {
                b[(i, j)] = stream.normal();
            }
            for j in 0..n {
                c[(i, j)] = stream.normal();
            }
            w[i] = b.row(i).transpose().dot(&h_nat);
            x[i] = c.row(i).transpose().dot(&m_nat);
        }
    }

    let xi = noise.draw(l, &mut stream);
    let y_hat = w.component_mul(&x);
    let y = DVector::from_fn(l, |i, _| y_hat[i] * (1.0 + xi[i]));
    let s: Vec<i8> = (0..l).map(|i| sign(w[i])).collect();

    let instance = ProblemInstance { b, c, y, s };
    let truth = GroundTruth {
        h_nat,
        m_nat,
        xi,
        y_hat,
    };
    Ok((instance, truth))
}

/// Assembles an instance from explicit subspaces, signals and noise; the
/// measurement and sign vectors are derived exactly as in the generator.
pub fn assemble_instance(
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    h_nat: DVector<f64>,
    m_nat: DVector<f64>,
    xi: DVector<f64>,
) -> Result<(ProblemInstance, GroundTruth)> {
    if h_nat.norm() == 0.0 || m_nat.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let l = b.nrows();
    if c.nrows() != l || xi.len() != l || b.ncols() != h_nat.len() || c.ncols() != m_nat.len() {
        return Err(Error::InvalidDimension(
            "subspace, signal and noise dimensions disagree".into(),
        ));
    }
    let w = &b * &h_nat;
    let x = &c * &m_nat;
    let y_hat = w.component_mul(&x);
    let y = DVector::from_fn(l, |i, _| y_hat[i] * (1.0 + xi[i]));
    let s: Vec<i8> = (0..l).map(|i| sign(w[i])).collect();
    let instance = ProblemInstance::new(b, c, y, s)?;
    Ok((
        instance,
        GroundTruth {
            h_nat,
            m_nat,
            xi,
            y_hat,
        },
    ))
}

/// Recovery error of a candidate pair against the balanced ground truth,
/// together with the noise-driven error bound `4 sqrt(eps) sqrt(||h|| ||m||)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryError {
    /// `sqrt(||h - h_bal||^2 + ||m - m_bal||^2)`.
    pub absolute: f64,
    /// `absolute` divided by the balanced truth's joint norm.
    pub relative: f64,
    /// `4 sqrt(||xi||_inf) sqrt(||h_nat|| ||m_nat||)`.
    pub theorem_bound: f64,
}

pub fn recovery_error(h: &DVector<f64>, m: &DVector<f64>, truth: &GroundTruth) -> RecoveryError {
    let bal = truth.balanced();
    let absolute = ((h - &bal.h_bal).norm_squared() + (m - &bal.m_bal).norm_squared()).sqrt();
    let relative = absolute / bal.joint_norm();
    let eps = truth.noise_level();
    let theorem_bound = 4.0 * eps.sqrt() * (truth.h_nat.norm() * truth.m_nat.norm()).sqrt();
    RecoveryError {
        absolute,
        relative,
        theorem_bound,
    }
}

/// Whether `(h, m)` satisfies every constraint of the convex program within
/// `tol`: `sign(y_l) (b_l.h)(c_l.m) >= |y_l| - tol` and `s_l (b_l.h) >= -tol`.
pub fn check_feasible(instance: &ProblemInstance, h: &DVector<f64>, m: &DVector<f64>, tol: f64) -> bool {
    let p = instance.b() * h;
    let q = instance.c() * m;
    for i in 0..instance.l() {
        let yi = instance.y()[i];
        if sign(yi) as f64 * p[i] * q[i] < yi.abs() - tol {
            return false;
        }
        if (instance.s()[i] as f64) * p[i] < -tol {
            return false;
        }
    }
    true
}
