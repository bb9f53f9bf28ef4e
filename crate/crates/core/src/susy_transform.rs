//! Transformed potential `V_n = V_0 - 2 (ln W_{u_0..u_{n-1}})''` and its
//! solutions `Φ_n` (energy `E`), `χ_n` and `χ_n⊥` (energy `λ`).

use crate::error::{Result, SusyError};
use crate::jordan_chain::JordanChain;
use crate::schrodinger::{
    regularized_product, schrodinger_residual, second_log_derivative, simpson, PotentialSpec,
    Residual, SampledFunction,
};
use crate::wronskian::{direct_wronskian, quotient, wronskian_with_solution, WronskianTower};

/// Endpoint decay required by [`normalize`], relative to `max|f|`.
pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub is_regular: bool,
    /// Refined intervals containing a zero of `W`.
    pub zero_brackets: Vec<(f64, f64)>,
    pub min_abs_w: f64,
    pub condition_notes: Vec<String>,
}

/// What the scan knows about the transformation, for the advisory notes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegularityContext {
    /// Transformation order `n` (the scanned Wronskian is `W_{u_0..u_{n-1}}`).
    pub order: usize,
    pub lambda: f64,
    /// Lowest bound-state energy of the initial potential, if known.
    pub ground_energy: Option<f64>,
    /// Constant of the scanned level.
    pub top_constant: Option<f64>,
}

fn refine(w: &SampledFunction, a: f64, b: f64) -> (f64, f64) {
    let f = |x: f64| w.interpolate(x).unwrap_or(0.0);
    let (mut lo, mut hi) = (a, b);
    let flo = f(lo);
    while hi - lo >= 1e-10 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return (mid, mid);
        }
        if fm * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Sign changes and exact zeros of `W`, each refined by bisection on the
/// cubic interpolant to width below `1e-10`.
pub fn regularity_scan(w: &SampledFunction) -> RegularityReport {
    let g = *w.grid();
    let v = w.values();
    let mut brackets = Vec::new();
    for i in 0..v.len() {
        if v[i] == 0.0 {
            brackets.push((g.x(i), g.x(i)));
        } else if i + 1 < v.len() && v[i] * v[i + 1] < 0.0 {
            brackets.push(refine(w, g.x(i), g.x(i + 1)));
        }
    }
    RegularityReport {
        is_regular: brackets.is_empty(),
        zero_brackets: brackets,
        min_abs_w: v.iter().fold(f64::INFINITY, |m, x| m.min(x.abs())),
        condition_notes: Vec::new(),
    }
}

/// [`regularity_scan`] plus notes on the sufficient conditions that apply.
/// The notes are advisory; the verdict is the scan's.
pub fn regularity_scan_with_context(
    w: &SampledFunction,
    ctx: &RegularityContext,
) -> RegularityReport {
    let mut r = regularity_scan(w);
    let n = ctx.order;
    if n.is_multiple_of(2) {
        match ctx.top_constant {
            Some(c) if c > 0.0 => r.condition_notes.push(format!(
                "even order {n}: top constant {c} > 0, sufficient condition for a zero-free Wronskian met"
            )),
            Some(c) => r.condition_notes.push(format!(
                "even order {n}: top constant {c} ≤ 0, sufficient condition not met"
            )),
            None => r
                .condition_notes
                .push(format!("even order {n}: no top constant, condition not checked")),
        }
    } else {
        let c_ok = ctx.top_constant.map(|c| c >= 0.0);
        let l_ok = ctx.ground_energy.map(|e| ctx.lambda <= e);
        match (c_ok, l_ok) {
            (Some(true), Some(true)) => r.condition_notes.push(format!(
                "odd order {n}: top constant ≥ 0 and λ = {} below the ground energy, sufficient conditions met",
                ctx.lambda
            )),
            _ => r.condition_notes.push(format!(
                "odd order {n}: sufficient conditions (top constant ≥ 0, λ ≤ ground energy) not established"
            )),
        }
    }
    if r.is_regular {
        r.condition_notes
            .push("scan: no sign change on the grid".into());
    } else {
        r.condition_notes
            .push(format!("scan: {} zero bracket(s)", r.zero_brackets.len()));
    }
    r
}

fn level_checked(tower: &WronskianTower, k: usize) -> Result<&SampledFunction> {
    tower.level(k).ok_or_else(|| {
        SusyError::InvalidInput(format!("tower of depth {} has no level {k}", tower.depth()))
    })
}

fn unit(like: &SampledFunction) -> SampledFunction {
    SampledFunction::with_derivatives(*like.grid(), vec![1.0; like.len()], vec![0.0; like.len()])
        .expect("constant function")
}

fn require_regular(w: &SampledFunction, what: &str) -> Result<()> {
    let r = regularity_scan(w);
    if r.is_regular {
        Ok(())
    } else {
        Err(SusyError::Singularity {
            what: what.into(),
            brackets: r.zero_brackets,
        })
    }
}

/// `V_n = V_0 - 2 (ln W_{u_0..u_{n-1}})''`.
pub fn transformed_potential(
    tower: &WronskianTower,
    base: &PotentialSpec,
    order: usize,
) -> Result<SampledFunction> {
    if order == 0 {
        return Err(SusyError::InvalidInput(
            "transformation order must be ≥ 1".into(),
        ));
    }
    let w = level_checked(tower, order - 1)?;
    require_regular(w, &format!("W_{{u_0..u_{}}}", order - 1))?;
    let v0 = base.sample(tower.grid())?;
    let d2 = second_log_derivative(w)?;
    let values = v0
        .values()
        .iter()
        .zip(d2.values())
        .map(|(v, l)| v - 2.0 * l)
        .collect();
    SampledFunction::new(*tower.grid(), values)
}

/// `χ_n = W_{u_0..u_n} / W_{u_0..u_{n-1}}`.
pub fn chi(tower: &WronskianTower, order: usize) -> Result<SampledFunction> {
    let top = level_checked(tower, order)?;
    if order == 0 {
        return Ok(top.clone());
    }
    quotient(top, level_checked(tower, order - 1)?, "χ_n")
}

/// `χ_n⊥ = W_{u_0..u_{n-2}} / W_{u_0..u_{n-1}}` (with `W_{-1} = 1`).
pub fn chi_perp(tower: &WronskianTower, order: usize) -> Result<SampledFunction> {
    if order == 0 {
        return Err(SusyError::InvalidInput("χ⊥ needs order ≥ 1".into()));
    }
    let den = level_checked(tower, order - 1)?;
    let num = if order >= 2 {
        level_checked(tower, order - 2)?.clone()
    } else {
        unit(den)
    };
    quotient(&num, den, "χ_n⊥")
}

fn check_energies(energy: f64, lambda: f64) -> Result<()> {
    if (energy - lambda).abs() <= 1e-12 * lambda.abs().max(1.0) {
        return Err(SusyError::InvalidInput(format!(
            "E = {energy} coincides with the factorization energy λ = {lambda}"
        )));
    }
    Ok(())
}

/// `Φ_n = W_{u_0..u_{n-1},Ψ} / W_{u_0..u_{n-1}}` from direct determinants
/// of the chain (`n = chain order + 1`), and `χ_n` from the tower.
pub fn transform_ratio(
    tower: &WronskianTower,
    chain: &JordanChain,
    psi: &SampledFunction,
    energy: f64,
) -> Result<(SampledFunction, SampledFunction)> {
    check_energies(energy, chain.lambda())?;
    let m = chain.order();
    let num = wronskian_with_solution(chain, m, psi, energy)?;
    let den = direct_wronskian(chain, m)?;
    require_regular(&den, &format!("W_{{u_0..u_{m}}}"))?;
    let phi = quotient(&num, &den, "Φ_n")?;
    let chi_n = chi(tower, m + 1)?;
    Ok((phi, chi_n))
}

/// Free constant of the outermost integral in [`transform_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralConstant {
    Value(f64),
    /// Chosen so that `Φ_n` agrees with the ratio form at `x_min`.
    MatchAtAnchor,
}

impl Default for IntegralConstant {
    fn default() -> Self {
        Self::Value(0.0)
    }
}

/// `(a N' - a' N) / b²` at `x_min`, i.e. `W_{χ_{k-1}, Φ_{k-1}}` written in
/// terms of tower levels `a = W_{k-1}`, `b = W_{k-2}` and `N = Φ_{k-1} b`.
fn anchor_pair_wronskian(a: &SampledFunction, b: &SampledFunction, n: &SampledFunction) -> f64 {
    let (a0, da) = (a.values()[0], a.derivative_or_fd()[0]);
    let (n0, dn) = (n.values()[0], n.derivative_or_fd()[0]);
    let b0 = b.values()[0];
    (a0 * dn - da * n0) / (b0 * b0)
}

/// `Φ_n = (λ - E) χ_n⊥ [c + ∫ χ_{n-1} Φ_{n-1}]`, applied level by level
/// from `Φ_0 = Ψ`. Intermediate constants reproduce the ratio forms; the
/// outermost one is `constant`.
pub fn transform_integral(
    tower: &WronskianTower,
    psi: &SampledFunction,
    energy: f64,
    order: usize,
    constant: IntegralConstant,
) -> Result<SampledFunction> {
    let lambda = tower.lambda();
    check_energies(energy, lambda)?;
    if order == 0 {
        return Ok(psi.clone());
    }
    level_checked(tower, order - 1)?;
    if psi.grid() != tower.grid() {
        return Err(SusyError::InvalidInput(
            "Ψ is sampled on a different grid".into(),
        ));
    }
    let one = unit(psi);
    let level = |k: isize| -> &SampledFunction {
        if k < 0 {
            &one
        } else {
            &tower.levels()[k as usize]
        }
    };
    let factor = lambda - energy;
    // numerator of Φ_k over W_{k-1}
    let mut numer = psi.clone();
    for k in 1..=order {
        let a = level(k as isize - 1);
        let b = level(k as isize - 2);
        let c = match constant {
            IntegralConstant::Value(c) if k == order => c,
            _ => anchor_pair_wronskian(a, b, &numer) / factor,
        };
        let q: Vec<f64> = a
            .values()
            .iter()
            .zip(numer.values())
            .map(|(x, y)| x * y)
            .collect();
        let p = regularized_product(b, &q, c)?;
        numer = p.product.scaled(factor);
    }
    quotient(&numer, level(order as isize - 1), "Φ_n")
}

/// `f / sqrt(∫ f²)` after checking that `|f|` at both ends is below
/// [`DEFAULT_DECAY_THRESHOLD`] of its maximum.
pub fn normalize(f: &SampledFunction) -> Result<SampledFunction> {
    normalize_with_threshold(f, DEFAULT_DECAY_THRESHOLD)
}

pub fn normalize_with_threshold(f: &SampledFunction, threshold: f64) -> Result<SampledFunction> {
    let v = f.values();
    let max = f.max_abs();
    if max == 0.0 {
        return Err(SusyError::NotSquareIntegrable(
            "function vanishes identically".into(),
        ));
    }
    let ends = v[0].abs().max(v[v.len() - 1].abs());
    if ends >= threshold * max {
        return Err(SusyError::NotSquareIntegrable(format!(
            "endpoint magnitude {:.3e} of max {max:.3e} exceeds the decay threshold {threshold:.1e}",
            ends
        )));
    }
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let norm = simpson(&sq, f.grid().spacing()).sqrt();
    Ok(f.scaled(1.0 / norm))
}

/// `∫ f g` by Simpson's rule.
pub fn overlap(f: &SampledFunction, g: &SampledFunction) -> f64 {
    let p: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b)
        .collect();
    simpson(&p, f.grid().spacing())
}

/// `χ⊥ χ' - χ⊥' χ` pointwise.
pub fn pair_wronskian(perp: &SampledFunction, chi: &SampledFunction) -> Vec<f64> {
    let (p, dp) = (perp.values(), perp.derivative_or_fd());
    let (c, dc) = (chi.values(), chi.derivative_or_fd());
    (0..p.len()).map(|i| p[i] * dc[i] - dp[i] * c[i]).collect()
}

/// Positions of local minima of `v` whose depth below the neighbouring
/// maxima on both sides exceeds `prominence`; ripples smaller than that are
/// ignored.
pub fn prominent_minima(v: &SampledFunction, prominence: f64) -> Vec<f64> {
    let vals = v.values();
    let mut minima = Vec::new();
    // hysteresis walk over the samples
    let mut descending = true;
    let mut extreme = (0usize, vals[0]);
    let mut last_max = f64::INFINITY;
    for (i, &y) in vals.iter().enumerate().skip(1) {
        if descending {
            if y < extreme.1 {
                extreme = (i, y);
            } else if y - extreme.1 > prominence {
                if last_max - extreme.1 > prominence {
                    minima.push(extreme);
                }
                descending = false;
                extreme = (i, y);
            }
        } else if y > extreme.1 {
            extreme = (i, y);
        } else if extreme.1 - y > prominence {
            last_max = extreme.1;
            descending = true;
            extreme = (i, y);
        }
    }
    minima.into_iter().map(|(i, _)| v.grid().x(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformResiduals {
    pub phi: Residual,
    pub chi: Residual,
    pub chi_perp: Residual,
}

impl TransformResiduals {
    pub fn worst(&self) -> f64 {
        self.phi
            .relative
            .max(self.chi.relative)
            .max(self.chi_perp.relative)
    }
}

#[derive(Debug, Clone)]
pub struct TransformResult {
    pub order: usize,
    pub potential: SampledFunction,
    pub phi: SampledFunction,
    /// `χ_n` after rescaling by `chi_scale`.
    pub chi: SampledFunction,
    pub chi_perp: SampledFunction,
    pub regularity: RegularityReport,
    pub energy: f64,
    pub lambda: f64,
    /// Factor applied to `χ_n` so that `W_{χ_n⊥, χ_n} = 1`.
    pub chi_scale: f64,
    /// `max |W_{χ_n⊥, χ_n} - 1|` after rescaling.
    pub pair_wronskian_deviation: f64,
    pub residuals: TransformResiduals,
    pub tower: WronskianTower,
}

/// Order-`n` transformation of `base` from a tower of depth `≥ n`, with
/// `Ψ` a solution at `energy` of the initial problem.
pub fn transform(
    tower: &WronskianTower,
    base: &PotentialSpec,
    psi: &SampledFunction,
    energy: f64,
    order: usize,
    constant: IntegralConstant,
) -> Result<TransformResult> {
    if order == 0 {
        return Err(SusyError::InvalidInput(
            "transformation order must be ≥ 1".into(),
        ));
    }
    level_checked(tower, order)?;
    let w = level_checked(tower, order - 1)?;
    let ctx = RegularityContext {
        order,
        lambda: tower.lambda(),
        ground_energy: Some(energy),
        top_constant: (order >= 2).then(|| tower.level_info()[order - 2].constant),
    };
    let regularity = regularity_scan_with_context(w, &ctx);
    if !regularity.is_regular {
        return Err(SusyError::Singularity {
            what: format!("W_{{u_0..u_{}}}", order - 1),
            brackets: regularity.zero_brackets,
        });
    }
    let potential = transformed_potential(tower, base, order)?;
    let phi = transform_integral(tower, psi, energy, order, constant)?;
    let chi_raw = chi(tower, order)?;
    let perp = chi_perp(tower, order)?;
    let mut pw = pair_wronskian(&perp, &chi_raw);
    pw.sort_by(f64::total_cmp);
    let median = pw[pw.len() / 2];
    if median == 0.0 || !median.is_finite() {
        return Err(SusyError::Accuracy {
            what: "Wronskian of χ_n⊥ and χ_n".into(),
            residual: median.abs(),
            tolerance: 0.0,
        });
    }
    let chi_scale = 1.0 / median;
    let chi_n = chi_raw.scaled(chi_scale);
    let pair_wronskian_deviation = pair_wronskian(&perp, &chi_n)
        .iter()
        .fold(0.0_f64, |m, v| m.max((v - 1.0).abs()));
    let v = potential.values();
    let residuals = TransformResiduals {
        phi: schrodinger_residual(&phi, v, energy, None),
        chi: schrodinger_residual(&chi_n, v, tower.lambda(), None),
        chi_perp: schrodinger_residual(&perp, v, tower.lambda(), None),
    };
    Ok(TransformResult {
        order,
        potential,
        phi,
        chi: chi_n,
        chi_perp: perp,
        regularity,
        energy,
        lambda: tower.lambda(),
        chi_scale,
        pair_wronskian_deviation,
        residuals,
        tower: tower.clone(),
    })
}
