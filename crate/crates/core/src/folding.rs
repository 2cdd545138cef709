//! Mod-p folding maps, shift folding and parameter folding of shift rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::numeric::CompensatedSum;

/// Half-open interval convention for `x mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModKind {
    /// `[-p/2, p/2)`
    Centered,
    /// `[0, p)`
    Positive,
    /// `(-p, 0]`
    Negative,
}

fn fold_positive(x: f64, p: f64) -> f64 {
    let r = x % p;
    if r >= 0.0 {
        // fmod is exact, so r < p already; normalize -0.0.
        r + 0.0
    } else {
        let y = r + p;
        if y >= p {
            p.next_down()
        } else {
            y
        }
    }
}

fn fold_negative(x: f64, p: f64) -> f64 {
    let r = x % p;
    if r <= 0.0 {
        r + 0.0
    } else {
        let y = r - p;
        if y <= -p {
            (-p).next_up()
        } else {
            y
        }
    }
}

/// The unique `y ≡ x (mod pℤ)` in the interval selected by `kind`.
pub fn fold_mod(x: f64, p: f64, kind: ModKind) -> f64 {
    debug_assert!(p > 0.0);
    match kind {
        ModKind::Positive => fold_positive(x, p),
        ModKind::Negative => fold_negative(x, p),
        ModKind::Centered => {
            let r = fold_positive(x, p);
            if r >= 0.5 * p {
                r - p
            } else {
                r
            }
        }
    }
}

fn check_period(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("period must be positive, got {p}")));
    }
    Ok(())
}

fn check_multiple(p: f64, c: f64) -> Result<()> {
    check_period(p)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
    }
    let ratio = c / p;
    if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-9 {
        return Err(Error::NotMultiple { ratio });
    }
    Ok(())
}

fn tau_unchecked(s: f64, p: f64, c: f64) -> f64 {
    let edge = c + p;
    if s <= -edge {
        let y = -c + fold_negative(s, p);
        if y <= -edge {
            (-edge).next_up()
        } else {
            y
        }
    } else if s >= edge {
        let y = c + fold_positive(s, p);
        if y >= edge {
            edge.next_down()
        } else {
            y
        }
    } else {
        s
    }
}

/// The p-folding `τ_{p,c}`: identity on `(-c-p, c+p)`, wrapping the tails
/// into `(-c-p, -c]` and `[c, c+p)`.
pub fn tau_pc(s: f64, p: f64, c: f64) -> Result<f64> {
    check_multiple(p, c)?;
    Ok(tau_unchecked(s, p, c))
}

/// A map that is the identity modulo `pℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FoldingMap {
    ModCentered { p: f64 },
    ModPositive { p: f64 },
    ModNegative { p: f64 },
    TauPC { p: f64, c: f64 },
}

impl FoldingMap {
    pub fn modulo(p: f64, kind: ModKind) -> Result<Self> {
        check_period(p)?;
        Ok(match kind {
            ModKind::Centered => FoldingMap::ModCentered { p },
            ModKind::Positive => FoldingMap::ModPositive { p },
            ModKind::Negative => FoldingMap::ModNegative { p },
        })
    }

    pub fn tau(p: f64, c: f64) -> Result<Self> {
        check_multiple(p, c)?;
        Ok(FoldingMap::TauPC { p, c })
    }

    pub fn period(&self) -> f64 {
        match *self {
            FoldingMap::ModCentered { p }
            | FoldingMap::ModPositive { p }
            | FoldingMap::ModNegative { p }
            | FoldingMap::TauPC { p, .. } => p,
        }
    }

    pub fn apply(&self, s: f64) -> f64 {
        match *self {
            FoldingMap::ModCentered { p } => fold_mod(s, p, ModKind::Centered),
            FoldingMap::ModPositive { p } => fold_mod(s, p, ModKind::Positive),
            FoldingMap::ModNegative { p } => fold_mod(s, p, ModKind::Negative),
            FoldingMap::TauPC { p, c } => tau_unchecked(s, p, c),
        }
    }

    /// Open interval `(lo, hi)` or half-open interval containing the image.
    pub fn image(&self) -> (f64, f64) {
        match *self {
            FoldingMap::ModCentered { p } => (-0.5 * p, 0.5 * p),
            FoldingMap::ModPositive { p } => (0.0, p),
            FoldingMap::ModNegative { p } => (-p, 0.0),
            FoldingMap::TauPC { p, c } => (-c - p, c + p),
        }
    }

    /// Radius outside of which every input is wrapped; `0` for mod maps.
    fn identity_radius(&self) -> f64 {
        match *self {
            FoldingMap::TauPC { p, c } => c + p,
            _ => 0.0,
        }
    }
}

/// Image of `m` under `s -> s % p` (centered), merging coincident shifts.
pub fn shift_fold(m: &AtomicMeasure, p: f64) -> Result<AtomicMeasure> {
    check_period(p)?;
    let atoms: Vec<(f64, f64)> = m
        .atoms()
        .map(|(s, u)| (fold_mod(s, p, ModKind::Centered), u))
        .collect();
    AtomicMeasure::new_snapped(atoms, 1e-12)
}

/// How a folded entry maps the evaluation point `x` to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Query {
    /// `τ(x - s)` for a single atom.
    Atom(f64),
    /// `base + fold(x + r)` for a residue class of far atoms.
    Wrapped { base: f64, r: f64, kind: ModKind },
}

/// One sampling entry of a folded rule: all atoms sharing a query point.
#[derive(Debug, Clone, Copy)]
pub struct FoldedEntry {
    query: Query,
    /// Signed total weight.
    pub weight: f64,
    /// Total positive and negative mass of the merged atoms.
    pub pos_mass: f64,
    pub neg_mass: f64,
}

/// A shift rule combined with a parameter-folding map, precompiled for
/// evaluation points `|x| ≤ radius`.
///
/// Atoms far enough out that `x - s` always falls in the wrapped region are
/// merged by residue class modulo `p`, so rules with millions of atoms
/// evaluate with a handful of queries.
#[derive(Debug, Clone)]
pub struct FoldedRule {
    fold: Option<FoldingMap>,
    radius: f64,
    entries: Vec<FoldedEntry>,
    norm: f64,
}

const RESIDUE_SNAP: f64 = 1e-12;

impl FoldedRule {
    /// Rule without folding: one entry per atom.
    pub fn identity(m: &AtomicMeasure) -> Self {
        let entries = m
            .atoms()
            .map(|(s, u)| FoldedEntry {
                query: Query::Atom(s),
                weight: u,
                pos_mass: u.max(0.0),
                neg_mass: (-u).max(0.0),
            })
            .collect();
        Self {
            fold: None,
            radius: f64::INFINITY,
            entries,
            norm: m.norm(),
        }
    }

    pub fn compile(m: &AtomicMeasure, fold: FoldingMap, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be finite and >= 0, got {radius}")));
        }
        let p = fold.period();
        let mut entries = Vec::new();
        // (side, residue, weight)
        let mut far: Vec<(i8, f64, f64)> = Vec::new();
        let cut = fold.identity_radius() + radius;
        let is_mod = !matches!(fold, FoldingMap::TauPC { .. });
        for (s, u) in m.atoms() {
            if !is_mod && s.abs() <= cut {
                entries.push(FoldedEntry {
                    query: Query::Atom(s),
                    weight: u,
                    pos_mass: u.max(0.0),
                    neg_mass: (-u).max(0.0),
                });
                continue;
            }
            let mut r = fold_positive(-s, p);
            if p - r <= RESIDUE_SNAP * p.max(1.0) {
                r = 0.0;
            }
            let side = if is_mod { 0 } else if s < 0.0 { 1 } else { -1 };
            far.push((side, r, u));
        }
        far.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut i = 0;
        while i < far.len() {
            let (side, r0, _) = far[i];
            let mut w = CompensatedSum::new();
            let mut pos = CompensatedSum::new();
            let mut neg = CompensatedSum::new();
            let mut j = i;
            while j < far.len() && far[j].0 == side && far[j].1 - r0 <= RESIDUE_SNAP * p.max(1.0) {
                let u = far[j].2;
                w.add(u);
                if u > 0.0 {
                    pos.add(u);
                } else {
                    neg.add(-u);
                }
                j += 1;
            }
            let query = match (fold, side) {
                (FoldingMap::TauPC { c, .. }, 1) => Query::Wrapped {
                    base: c,
                    r: r0,
                    kind: ModKind::Positive,
                },
                (FoldingMap::TauPC { c, .. }, _) => Query::Wrapped {
                    base: -c,
                    r: r0,
                    kind: ModKind::Negative,
                },
                (FoldingMap::ModCentered { .. }, _) => Query::Wrapped {
                    base: 0.0,
                    r: r0,
                    kind: ModKind::Centered,
                },
                (FoldingMap::ModPositive { .. }, _) => Query::Wrapped {
                    base: 0.0,
                    r: r0,
                    kind: ModKind::Positive,
                },
                (FoldingMap::ModNegative { .. }, _) => Query::Wrapped {
                    base: 0.0,
                    r: r0,
                    kind: ModKind::Negative,
                },
            };
            entries.push(FoldedEntry {
                query,
                weight: w.value(),
                pos_mass: pos.value(),
                neg_mass: neg.value(),
            });
            i = j;
        }
        Ok(Self {
            fold: Some(fold),
            radius,
            entries,
            norm: m.norm(),
        })
    }

    pub fn fold(&self) -> Option<FoldingMap> {
        self.fold
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn entries(&self) -> &[FoldedEntry] {
        &self.entries
    }

    /// Norm of the underlying (unfolded) measure.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if x.abs() > self.radius * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside compiled radius {}",
                self.radius
            )));
        }
        Ok(())
    }

    /// Query point of entry `i` at evaluation point `x`.
    pub fn query(&self, i: usize, x: f64) -> f64 {
        match self.entries[i].query {
            Query::Atom(s) => match self.fold {
                Some(f) => f.apply(x - s),
                None => x - s,
            },
            Query::Wrapped { base, r, kind } => {
                let p = self.fold.expect("wrapped entries need a fold").period();
                let y = base + fold_mod(x + r, p, kind);
                // Rounding in `base + …` must not leave the image.
                match self.fold {
                    Some(FoldingMap::TauPC { p, c }) => {
                        let edge = c + p;
                        y.clamp((-edge).next_up(), edge.next_down())
                    }
                    _ => y,
                }
            }
        }
    }

    /// `Σ_j u_j f(τ(x - s_j))`.
    pub fn evaluate<E>(
        &self,
        mut f: impl FnMut(f64) -> std::result::Result<f64, E>,
        x: f64,
    ) -> std::result::Result<f64, E>
    where
        E: From<Error>,
    {
        self.check_x(x)?;
        let mut acc = CompensatedSum::new();
        for (i, e) in self.entries.iter().enumerate() {
            acc.add(e.weight * f(self.query(i, x))?);
        }
        Ok(acc.value())
    }

    /// `E|τ(x - S)|` for `S ~ |m|/‖m‖`, and `max |τ(x - s)|` over atoms.
    pub fn magnitude_stats(&self, x: f64) -> Result<(f64, f64)> {
        self.check_x(x)?;
        let mut mean = CompensatedSum::new();
        let mut max: f64 = 0.0;
        for (i, e) in self.entries.iter().enumerate() {
            let q = self.query(i, x).abs();
            mean.add((e.pos_mass + e.neg_mass) * q);
            max = max.max(q);
        }
        Ok((mean.value() / self.norm, max))
    }
}

/// `Σ_j u_j f(τ(x - s_j))` for a single evaluation point.
pub fn convolve_folded<E>(
    m: &AtomicMeasure,
    fold: FoldingMap,
    f: impl FnMut(f64) -> std::result::Result<f64, E>,
    x: f64,
) -> std::result::Result<f64, E>
where
    E: From<Error>,
{
    FoldedRule::compile(m, fold, x.abs())?.evaluate(f, x)
}

/// Bound `8KC / (πc(2Kc - 1))` on the parameter-folding error for `|x| ≤ p`.
pub fn folding_error_bound(k: f64, c: f64, decay_constant: f64) -> f64 {
    8.0 * k * decay_constant / (std::f64::consts::PI * c * (2.0 * k * c - 1.0))
}

/// Bound `|x| + (ln(K(c + 2p)) + 6 + ln 2) / (π²K)` on the mean queried magnitude.
pub fn mean_magnitude_bound(k: f64, p: f64, c: f64, x: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    x.abs() + ((k * (c + 2.0 * p)).ln() + 6.0 + std::f64::consts::LN_2) / (pi2 * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{dirichlet_rule, nyquist};

    #[test]
    fn fold_examples() {
        assert!((fold_mod(3.7, 1.0, ModKind::Positive) - 0.7).abs() < 1e-12);
        assert!((fold_mod(3.7, 1.0, ModKind::Negative) + 0.3).abs() < 1e-12);
        assert_eq!(fold_mod(-0.5, 1.0, ModKind::Centered), -0.5);
        assert_eq!(fold_mod(0.5, 1.0, ModKind::Centered), -0.5);
        assert_eq!(fold_mod(1.0, 1.0, ModKind::Positive), 0.0);
        assert_eq!(fold_mod(-1.0, 1.0, ModKind::Negative), 0.0);
        assert_eq!(fold_mod(1.0, 1.0, ModKind::Negative), 0.0);
    }

    #[test]
    fn fold_rounding_stays_inside() {
        let tiny = -1e-20;
        let y = fold_mod(tiny, 1.0, ModKind::Positive);
        assert!((0.0..1.0).contains(&y));
        let y = fold_mod(1e-20, 1.0, ModKind::Negative);
        assert!(y > -1.0 && y <= 0.0);
    }

    #[test]
    fn tau_examples() {
        assert!((tau_pc(3.7, 1.0, 2.0).unwrap() - 2.7).abs() < 1e-12);
        assert!((tau_pc(-3.2, 1.0, 2.0).unwrap() + 2.2).abs() < 1e-12);
        assert_eq!(tau_pc(1.4, 1.0, 2.0).unwrap(), 1.4);
        assert!(matches!(
            tau_pc(1.0, 1.0, 2.5),
            Err(Error::NotMultiple { .. })
        ));
    }

    #[test]
    fn shift_fold_matches_dirichlet() {
        let folded = shift_fold(&nyquist(1.0, 1_000_000).unwrap(), 2.0).unwrap();
        let want = dirichlet_rule(1.0, 0.5).unwrap();
        assert_eq!(folded.len(), want.len());
        for ((s, u), (t, v)) in folded.atoms().zip(want.atoms()) {
            assert_eq!(s, t);
            assert!((u - v).abs() < 3e-6, "{u} vs {v}");
        }
    }

    #[test]
    fn shift_fold_trivial_cases() {
        let m = nyquist(2.0, 2).unwrap();
        assert_eq!(shift_fold(&m, 2.0).unwrap(), m);
        let d = AtomicMeasure::dirac(1.5, 2.0).unwrap();
        let f = shift_fold(&d, 1.5).unwrap();
        assert_eq!(f.shifts(), &[0.0]);
    }

    #[test]
    fn folded_rule_matches_direct_sum() {
        let m = nyquist(2.0, 5000).unwrap();
        let fold = FoldingMap::tau(0.5, 4.0).unwrap();
        let g = |t: f64| -> Result<f64> { Ok((1.3 * t).sin() / (1.0 + t * t) + (4.0 * t).cos()) };
        for x in [-0.5, -0.21, 0.0, 0.33, 0.5] {
            let rule = FoldedRule::compile(&m, fold, 0.5).unwrap();
            let fast = rule.evaluate(g, x).unwrap();
            let slow = m.try_convolve(|t| g(fold.apply(t)), x).unwrap();
            assert!((fast - slow).abs() < 1e-10, "x={x}: {fast} vs {slow}");
            let (_, max) = rule.magnitude_stats(x).unwrap();
            assert!(max < 4.5);
        }
    }

    #[test]
    fn folded_periodic_function_unchanged() {
        let m = nyquist(2.0, 2000).unwrap();
        let fold = FoldingMap::tau(0.5, 4.0).unwrap();
        let f = |t: f64| -> Result<f64> { Ok((4.0 * std::f64::consts::PI * t).cos() + 0.2) };
        for x in [-0.4, 0.1, 0.45] {
            let a = convolve_folded(&m, fold, f, x).unwrap();
            let b = m.try_convolve(f, x).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn bound_ratio_when_c_doubles() {
        let r = folding_error_bound(2.0, 8.0, 1.0) / folding_error_bound(2.0, 4.0, 1.0);
        assert!((0.2..=0.35).contains(&r), "{r}");
    }
}
