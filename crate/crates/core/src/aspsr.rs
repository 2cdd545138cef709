//! Approximate stochastic parameter-shift baseline (ASPSR).
//!
//! `U±(s) = e^{2πis(xA+B)} e^{2πi(±A/8 + εB)} e^{2πi(1-s)(xA+B)}` and
//! `D(x) = 2π ∫_0^1 [f₊(s) - f₋(s)] ds`.

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::estimators::{bernoulli_pm1, run_chunked, ChunkStats, EstimateReport, ShotOracle};
use crate::linalg::{eig_unchecked, exp_i_from_eig, CMatrix};
use crate::model::ModelInstance;
use crate::quadrature::GaussLegendre;

const PM1_TOL: f64 = 1e-9;
pub const DEFAULT_QUADRATURE_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspsrConfig {
    pub epsilon: f64,
    pub quadrature_nodes: usize,
    pub mc_samples: u64,
}

impl AspsrConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
            mc_samples: 0,
        })
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.quadrature_nodes = nodes;
        self
    }

    pub fn with_mc_samples(mut self, samples: u64) -> Self {
        self.mc_samples = samples;
        self
    }

    /// Parameter cut-off `T = 1/(8ε)`; also the A-coefficient of the inserted pulse.
    pub fn cutoff(&self) -> f64 {
        1.0 / (8.0 * self.epsilon)
    }
}

/// Inserted pulses `e^{2πi(±A/8 + εB)}` for one model and `ε`.
#[derive(Debug, Clone)]
pub struct AspsrModel<'a> {
    model: &'a ModelInstance,
    epsilon: f64,
    w_plus: CMatrix,
    w_minus: CMatrix,
}

impl<'a> AspsrModel<'a> {
    pub fn new(model: &'a ModelInstance, epsilon: f64) -> Result<Self> {
        let deviation = model.a_pm1_deviation();
        if deviation > PM1_TOL {
            return Err(Error::SpectrumError {
                which: "A",
                deviation,
            });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let pulse = |sign: f64| -> Result<CMatrix> {
            let g = model.a().matrix().map(|z| z * (sign / 8.0))
                + model.b().matrix().map(|z| z * epsilon);
            Ok(exp_i_from_eig(&eig_unchecked(&g)?, 2.0 * PI))
        };
        Ok(Self {
            model,
            epsilon,
            w_plus: pulse(1.0)?,
            w_minus: pulse(-1.0)?,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Precompute everything that depends on `x` only.
    pub fn at(&self, x: f64) -> Result<AspsrPoint> {
        let h = self.model.a().matrix().map(|z| z * x) + self.model.b().matrix();
        let e = eig_unchecked(&h)?;
        let v = &e.vectors;
        let vh = v.adjoint();
        Ok(AspsrPoint {
            lambdas: e.values.clone(),
            m_t: &vh * self.model.m().matrix() * v,
            rho_t: &vh * self.model.rho() * v,
            w_plus_t: &vh * &self.w_plus * v,
            w_minus_t: &vh * &self.w_minus * v,
        })
    }
}

/// ASPSR evaluator at a fixed `x`, working in the eigenbasis of `xA + B`.
#[derive(Debug, Clone)]
pub struct AspsrPoint {
    lambdas: Vec<f64>,
    m_t: CMatrix,
    rho_t: CMatrix,
    w_plus_t: CMatrix,
    w_minus_t: CMatrix,
}

impl AspsrPoint {
    fn phases(&self, t: f64) -> DVector<Complex64> {
        DVector::from_iterator(
            self.lambdas.len(),
            self.lambdas
                .iter()
                .map(|&l| Complex64::from_polar(1.0, 2.0 * PI * t * l)),
        )
    }

    /// `tr(M U±(s) ρ U±(s)^dag)`.
    pub fn expectation(&self, s: f64, sign: Sign) -> f64 {
        let n = self.lambdas.len();
        let d2 = self.phases(1.0 - s);
        let d1 = self.phases(s);
        let mut r = self.rho_t.clone();
        for j in 0..n {
            for k in 0..n {
                r[(j, k)] *= d2[j] * d2[k].conj();
            }
        }
        let w = match sign {
            Sign::Plus => &self.w_plus_t,
            Sign::Minus => &self.w_minus_t,
        };
        let sigma = w * r * w.adjoint();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += self.m_t[(k, j)] * sigma[(j, k)] * d1[j] * d1[k].conj();
            }
        }
        acc.re
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s must lie in [0, 1], got {s}")));
    }
    Ok(())
}

/// `tr(M U±(s, x, ε) ρ U±(s, x, ε)^dag)`.
pub fn aspsr_expectation(
    model: &ModelInstance,
    s: f64,
    x: f64,
    epsilon: f64,
    sign: Sign,
) -> Result<f64> {
    check_s(s)?;
    let am = AspsrModel::new(model, epsilon)?;
    let point = am.at(x)?;
    Ok(point.expectation(s, sign))
}

/// Deterministic ASPSR derivative via Gauss-Legendre in `s`.
pub fn aspsr_derivative(model: &ModelInstance, x: f64, cfg: &AspsrConfig) -> Result<f64> {
    let am = AspsrModel::new(model, cfg.epsilon)?;
    let q = GaussLegendre::new(cfg.quadrature_nodes)?;
    aspsr_derivative_with(&am, &q, x)
}

/// As [`aspsr_derivative`] with precomputed pulses and quadrature.
pub fn aspsr_derivative_with(am: &AspsrModel<'_>, q: &GaussLegendre, x: f64) -> Result<f64> {
    let point = am.at(x)?;
    Ok(2.0
        * PI
        * q.integrate(|s| point.expectation(s, Sign::Plus) - point.expectation(s, Sign::Minus)))
}

/// Monte-Carlo ASPSR: `s ~ U[0,1]`, uniform sign, value `±4π·shot`.
pub fn aspsr_mc_estimate(
    oracle: &mut ShotOracle<'_>,
    x: f64,
    cfg: &AspsrConfig,
) -> Result<EstimateReport> {
    let am = AspsrModel::new(oracle.model(), cfg.epsilon)?;
    let point = am.at(x)?;
    let mopv = x.abs().max(cfg.cutoff());
    let scale = 4.0 * PI;
    run_chunked(oracle.rng_mut(), cfg.mc_samples, |len, rng| {
        let mut out = ChunkStats::default();
        for _ in 0..len {
            let s = rng.uniform();
            let sign = if rng.uniform() < 0.5 {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let f = point.expectation(s, sign);
            let shot = bernoulli_pm1(f, rng) as f64;
            out.push(sign.value() * scale * shot, mopv);
        }
        Ok(out)
    })
}
