//! The stress p-bienergy tensor of a map and its divergence identity.

use crate::error::Result;
use crate::jet::Jet;
use crate::linalg::Matrix;
use crate::mapcalc::{check_p, MapJets, SmoothMap};

#[derive(Debug, Clone, PartialEq)]
pub struct StressTensorValue {
    pub point: Vec<f64>,
    pub p: f64,
    /// `S_{2,p}(∂_i, ∂_j)`
    pub matrix: Matrix<f64>,
    /// `|τ_p|²`
    pub tau_p_norm2: f64,
    /// `⟨dφ, ∇^φ τ_p⟩ = g^{ij} h(dφ(∂_i), ∇^φ_{∂_j} τ_p)`
    pub pairing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaForm {
    pub point: Vec<f64>,
    /// `θ(∂_i) = |dφ|^{p-2} h(dφ(∂_i), τ_p)`
    pub components: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceCheck {
    /// `(div S)(∂_k)`
    pub divergence: Vec<f64>,
    /// `−h(τ_{2,p}, dφ(∂_k))`
    pub rhs: Vec<f64>,
    pub gap: f64,
    /// Largest magnitude on either side.
    pub scale: f64,
}

/// Jets of the stress tensor together with the scalars it is built from.
struct StressJets {
    s: Matrix<Jet>,
    tau_p_norm2: Jet,
    pairing: Jet,
}

fn stress_jets(local: &MapJets<'_>, p: f64) -> Result<StressJets> {
    let m = local.m();
    let (tau_p, nabla) = local.nabla_p_tension(p)?;
    let tau2 = local.h_inner(&tau_p, &tau_p);
    let pairing = local.pairing_with_dphi(&nabla);
    let w = local.dphi_norm_pow(p - 2.0)?;
    let w4 = if p == 2.0 {
        None
    } else {
        Some(local.dphi_norm_pow(p - 4.0)? * (p - 2.0) * &pairing)
    };
    let g = &local.source.g;
    let diag = &tau2 * -0.5 - &w * &pairing;
    let mut s = vec![Vec::with_capacity(m); m];
    for i in 0..m {
        for j in 0..m {
            let mut v = &diag * &g[i][j]
                + &w * &(local.h_inner(&local.dphi[i], &nabla[j])
                    + local.h_inner(&local.dphi[j], &nabla[i]));
            if let Some(w4) = &w4 {
                v = v + w4 * &local.h_inner(&local.dphi[i], &local.dphi[j]);
            }
            s[i].push(v);
        }
    }
    Ok(StressJets {
        s,
        tau_p_norm2: tau2,
        pairing,
    })
}

fn values(m: &[Vec<Jet>]) -> Matrix<f64> {
    m.iter()
        .map(|r| r.iter().map(Jet::value).collect())
        .collect()
}

pub fn stress_tensor(map: &SmoothMap, x: &[f64], p: f64) -> Result<StressTensorValue> {
    check_p(p)?;
    let local = map.local(x, 3)?;
    let sj = stress_jets(&local, p)?;
    Ok(StressTensorValue {
        point: x.to_vec(),
        p,
        matrix: values(&sj.s),
        tau_p_norm2: sj.tau_p_norm2.value(),
        pairing: sj.pairing.value(),
    })
}

/// `trace_g S_{2,p}`.
pub fn stress_trace(map: &SmoothMap, x: &[f64], p: f64) -> Result<f64> {
    let s = stress_tensor(map, x, p)?;
    let local = map.local(x, 1)?;
    let m = local.m();
    let mut t = 0.0;
    for i in 0..m {
        for j in 0..m {
            t += local.source.g_inv[i][j].value() * s.matrix[i][j];
        }
    }
    Ok(t)
}

/// Both closed forms of the trace:
/// `−(m/2)|τ_p|² + (p−m)|dφ|^{p-2}⟨dφ, ∇^φτ_p⟩` and
/// `(m/2 − p)|τ_p|² + (p−m) div θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceForms {
    pub direct: f64,
    pub pairing_form: f64,
    pub theta_form: f64,
}

pub fn stress_trace_forms(map: &SmoothMap, x: &[f64], p: f64) -> Result<TraceForms> {
    check_p(p)?;
    let local = map.local(x, 3)?;
    let m = local.m() as f64;
    let s = stress_tensor(map, x, p)?;
    let direct = stress_trace(map, x, p)?;
    let w = local.dphi_norm_pow(p - 2.0)?.value();
    let pairing_form = -0.5 * m * s.tau_p_norm2 + (p - m) * w * s.pairing;
    let div_theta = theta_divergence(map, x, p)?;
    let theta_form = (0.5 * m - p) * s.tau_p_norm2 + (p - m) * div_theta;
    Ok(TraceForms {
        direct,
        pairing_form,
        theta_form,
    })
}

fn theta_jets(local: &MapJets<'_>, p: f64) -> Result<Vec<Jet>> {
    let tau_p = local.p_tension(p)?;
    let w = local.dphi_norm_pow(p - 2.0)?;
    Ok(local
        .dphi
        .iter()
        .map(|d| &w * &local.h_inner(d, &tau_p))
        .collect())
}

pub fn theta(map: &SmoothMap, x: &[f64], p: f64) -> Result<ThetaForm> {
    check_p(p)?;
    let local = map.local(x, 2)?;
    Ok(ThetaForm {
        point: x.to_vec(),
        components: theta_jets(&local, p)?.iter().map(Jet::value).collect(),
    })
}

/// `div θ`, by differentiating the jets of `θ`.
pub fn theta_divergence(map: &SmoothMap, x: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    let local = map.local(x, 3)?;
    let th = theta_jets(&local, p)?;
    Ok(local.source.divergence(&local.source.raise(&th)).value())
}

/// Compares `div S_{2,p}` with `−h(τ_{2,p}, dφ)` at `x`.
pub fn stress_divergence_check(map: &SmoothMap, x: &[f64], p: f64) -> Result<DivergenceCheck> {
    check_p(p)?;
    let local = map.local(x, 4)?;
    let sj = stress_jets(&local, p)?;
    let divergence: Vec<f64> = local
        .source
        .divergence_2tensor(&sj.s)
        .iter()
        .map(Jet::value)
        .collect();
    let bi = local.p_bitension(p)?.total;
    let h0 = values(&local.h);
    let rhs: Vec<f64> = local
        .dphi
        .iter()
        .map(|d| {
            let d0: Vec<f64> = d.iter().map(Jet::value).collect();
            -crate::linalg::inner(&h0, &bi, &d0)
        })
        .collect();
    let gap = divergence
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = divergence
        .iter()
        .chain(&rhs)
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    Ok(DivergenceCheck {
        divergence,
        rhs,
        gap,
        scale,
    })
}
