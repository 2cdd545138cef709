//! Finite signed atomic measures and the Nyquist shift-rule family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};

/// `Σ_j u_j δ_{s_j}` with strictly increasing shifts and nonzero weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct AtomicMeasure {
    shifts: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<MeasureRepr> for AtomicMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        AtomicMeasure::new(r.atoms)
    }
}

impl From<AtomicMeasure> for MeasureRepr {
    fn from(m: AtomicMeasure) -> Self {
        MeasureRepr {
            atoms: m.atoms().collect(),
        }
    }
}

impl AtomicMeasure {
    /// Canonicalize: sort by shift, merge equal shifts, drop zero weights.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|(s, w)| !s.is_finite() || !w.is_finite()) {
            return Err(Error::InvalidArgument("non-finite atom".into()));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::from_sorted_with(atoms, |a, b| a == b)
    }

    /// Merge runs of sorted atoms whose shifts satisfy `same(run_start, s)`.
    fn from_sorted_with(atoms: Vec<(f64, f64)>, same: impl Fn(f64, f64) -> bool) -> Result<Self> {
        let mut shifts = Vec::with_capacity(atoms.len());
        let mut weights = Vec::with_capacity(atoms.len());
        let mut i = 0;
        while i < atoms.len() {
            let s0 = atoms[i].0;
            let mut acc = CompensatedSum::new();
            let mut j = i;
            while j < atoms.len() && same(s0, atoms[j].0) {
                acc.add(atoms[j].1);
                j += 1;
            }
            let w = acc.value();
            if w != 0.0 {
                shifts.push(if s0 == 0.0 { 0.0 } else { s0 });
                weights.push(w);
            }
            i = j;
        }
        if shifts.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        Ok(Self { shifts, weights })
    }

    /// Sort and merge atoms whose shifts lie within `tol` of a run's first shift.
    pub fn new_snapped(mut atoms: Vec<(f64, f64)>, tol: f64) -> Result<Self> {
        if atoms.iter().any(|(s, w)| !s.is_finite() || !w.is_finite()) {
            return Err(Error::InvalidArgument("non-finite atom".into()));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::from_sorted_with(atoms, |a, b| b - a <= tol)
    }

    pub fn dirac(shift: f64, weight: f64) -> Result<Self> {
        Self::new(vec![(shift, weight)])
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl DoubleEndedIterator<Item = (f64, f64)> + ExactSizeIterator + '_ {
        self.shifts.iter().copied().zip(self.weights.iter().copied())
    }

    /// Total-variation norm `Σ |u_j|`.
    pub fn norm(&self) -> f64 {
        compensated_sum(self.weights.iter().map(|w| w.abs()))
    }

    /// Total mass `Σ u_j`.
    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    pub fn max_abs_shift(&self) -> f64 {
        self.shifts.iter().fold(0.0, |a, s| a.max(s.abs()))
    }

    /// `Σ_j u_j exp(-2πi ξ s_j)`.
    pub fn fourier_stieltjes(&self, xi: f64) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (s, u) in self.atoms() {
            let (sin, cos) = (-2.0 * PI * xi * s).sin_cos();
            re.add(u * cos);
            im.add(u * sin);
        }
        Complex64::new(re.value(), im.value())
    }

    /// Image under `s -> 1/2 - s`.
    pub fn reflect_at_half(&self) -> Self {
        let atoms: Vec<(f64, f64)> = self.atoms().rev().map(|(s, u)| (0.5 - s, u)).collect();
        Self::new(atoms).expect("reflection preserves nonempty finite atoms")
    }

    /// `(s, u) -> (K1 s / K2, (K2 / K1) u)`.
    pub fn dilate(&self, k1: f64, k2: f64) -> Result<Self> {
        if !(k1 > 0.0 && k2 > 0.0 && k1.is_finite() && k2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation factors must be positive, got {k1}, {k2}"
            )));
        }
        if k1 == k2 {
            return Ok(self.clone());
        }
        let ratio = k1 / k2;
        let inv = k2 / k1;
        Self::new(self.atoms().map(|(s, u)| (s * ratio, u * inv)).collect())
    }

    /// Pointwise difference `self - other`, `None` if it is the zero measure.
    pub fn difference(&self, other: &AtomicMeasure) -> Option<Self> {
        let mut atoms: Vec<(f64, f64)> = self.atoms().collect();
        atoms.extend(other.atoms().map(|(s, u)| (s, -u)));
        Self::new(atoms).ok()
    }

    /// `(f * m)(x) = Σ_j u_j f(x - s_j)`.
    pub fn convolve(&self, mut f: impl FnMut(f64) -> f64, x: f64) -> f64 {
        compensated_sum(self.atoms().map(|(s, u)| u * f(x - s)))
    }

    /// Fallible variant of [`AtomicMeasure::convolve`].
    pub fn try_convolve<E>(
        &self,
        mut f: impl FnMut(f64) -> std::result::Result<f64, E>,
        x: f64,
    ) -> std::result::Result<f64, E> {
        let mut acc = CompensatedSum::new();
        for (s, u) in self.atoms() {
            acc.add(u * f(x - s)?);
        }
        Ok(acc.value())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidK(k));
    }
    Ok(())
}

/// Truncated Nyquist rule: `2N` atoms at `a/2K`, `a ∈ {±1/2, …, ±(N-1/2)}`.
pub fn nyquist(k: f64, n: usize) -> Result<AtomicMeasure> {
    check_k(k)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut shifts = Vec::with_capacity(2 * n);
    let mut weights = Vec::with_capacity(2 * n);
    for i in (0..n).rev() {
        let a = i as f64 + 0.5;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        shifts.push(-a / (2.0 * k));
        weights.push(2.0 * k * sign / (PI * a * a));
    }
    for i in 0..n {
        let a = i as f64 + 0.5;
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        shifts.push(a / (2.0 * k));
        weights.push(2.0 * k * sign / (PI * a * a));
    }
    Ok(AtomicMeasure { shifts, weights })
}

/// Smallest `N` whose truncated Nyquist rule reaches shift `reach`.
pub fn nyquist_n_covering(k: f64, reach: f64) -> usize {
    ((2.0 * k * reach + 0.5).ceil().max(1.0)) as usize
}

/// Trigamma function for positive arguments.
pub fn trigamma(mut z: f64) -> f64 {
    assert!(z > 0.0, "trigamma needs a positive argument");
    let mut acc = 0.0;
    while z < 12.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let z2 = 1.0 / (z * z);
    let series = 1.0 / z
        + z2 / 2.0
        + z2 / z
            * (1.0 / 6.0
                + z2 * (-1.0 / 30.0 + z2 * (1.0 / 42.0 + z2 * (-1.0 / 30.0 + z2 * 5.0 / 66.0))));
    acc + series
}

/// Exact norm of `φ_K - φ_K^(N)`: `(4K/π) Σ_{n≥N} (n+1/2)^-2`.
pub fn nyquist_tail_norm(k: f64, n: usize) -> f64 {
    4.0 * k / PI * trigamma(n as f64 + 0.5)
}

/// Upper bound `4K / (π(N - 1/2))` on the tail norm.
pub fn nyquist_tail_bound(k: f64, n: usize) -> f64 {
    4.0 * k / (PI * (n as f64 - 0.5))
}

/// Dirichlet-kernel rule with `L = K/ξ₁` atoms per side.
pub fn dirichlet_rule(k: f64, xi1: f64) -> Result<AtomicMeasure> {
    check_k(k)?;
    if !(xi1 > 0.0 && xi1.is_finite()) {
        return Err(Error::InvalidArgument(format!("xi1 must be positive, got {xi1}")));
    }
    let ratio = k / xi1;
    let l = ratio.round();
    if l < 1.0 || (ratio - l).abs() > 1e-9 {
        return Err(Error::NotInteger {
            what: "K/xi1",
            value: ratio,
        });
    }
    let li = l as i64;
    let mut atoms = Vec::with_capacity(2 * li as usize);
    let c = 2.0 * k * PI / (4.0 * l * l);
    for j in -li..li {
        let a = j as f64 + 0.5;
        let sign = if (j + 1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let sn = (PI * a / (2.0 * l)).sin();
        atoms.push((a / (2.0 * k), c * sign / (sn * sn)));
    }
    AtomicMeasure::new(atoms)
}
