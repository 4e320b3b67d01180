use crate::error::Result;
use crate::spectral_core::{
    to_physical_many, to_spectral_many, Grid3, ModeMask, SpaceTimeSeries, SpectralField4, C64, ZERO,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// G̃ at one mode from q̂₀ = −Σ ξ_iξ_j (v^iv^j)^:
/// (iξ₁ξ₃²q̂/(|ξ_h|²|ξ|²), iξ₂ξ₃²q̂/(|ξ_h|²|ξ|²), −iξ₃q̂/|ξ|², 0).
#[inline]
pub fn gtilde_mode(xi: [f64; 3], q: C64) -> [C64; 4] {
    let h2 = xi[0] * xi[0] + xi[1] * xi[1];
    if h2 == 0.0 {
        return [ZERO; 4];
    }
    let k2 = h2 + xi[2] * xi[2];
    let hor = I * q * (xi[2] * xi[2] / (h2 * k2));
    [hor * xi[0], hor * xi[1], -I * q * (xi[2] / k2), ZERO]
}

/// Spectra of ṽ¹ṽ¹, ṽ¹ṽ², ṽ²ṽ² (not masked).
fn horizontal_products(v: &SpectralField4) -> [Vec<C64>; 3] {
    let g = v.grid();
    let phys = to_physical_many(g, &[&v.comps[0], &v.comps[1]]);
    let prods: Vec<Vec<f64>> = vec![
        phys[0].iter().map(|a| a * a).collect(),
        phys[0].iter().zip(&phys[1]).map(|(a, b)| a * b).collect(),
        phys[1].iter().map(|b| b * b).collect(),
    ];
    let mut spec = to_spectral_many(g, &prods).into_iter();
    std::array::from_fn(|_| spec.next().unwrap())
}

/// q̃₀ = Σ ∂_i∂_j(ṽ^iṽ^j) from dealiased products; zero outside `mask`.
pub fn q0_spectrum(v: &SpectralField4, mask: &ModeMask) -> Vec<C64> {
    let g = v.grid();
    let [p11, p12, p22] = horizontal_products(v);
    (0..g.len())
        .map(|idx| {
            if !mask.keeps(idx) {
                return ZERO;
            }
            let xi = g.xi(idx);
            -(xi[0] * xi[0] * p11[idx] + 2.0 * xi[0] * xi[1] * p12[idx] + xi[1] * xi[1] * p22[idx])
        })
        .collect()
}

pub fn gtilde_field(v: &SpectralField4, mask: &ModeMask) -> SpectralField4 {
    let g = *v.grid();
    let q = q0_spectrum(v, mask);
    let mut out = SpectralField4::zeros(g);
    for idx in 0..g.len() {
        out.set(idx, gtilde_mode(g.xi(idx), q[idx]));
    }
    out
}

/// G̃ along a velocity series, with the 2/3 rule on q̃₀.
pub fn compute_gtilde(v_series: &SpaceTimeSeries) -> Result<SpaceTimeSeries> {
    let Some(first) = v_series.fields.first() else {
        return Ok(SpaceTimeSeries::default());
    };
    let grid: Grid3 = *first.grid();
    let mask = ModeMask::new(&grid, f64::INFINITY, true);
    let fields = v_series
        .fields
        .iter()
        .map(|v| gtilde_field(v, &mask))
        .collect();
    SpaceTimeSeries::new(v_series.times.clone(), fields)
}

/// Splits the advection A = (ṽ^h·∇_hṽ^h, 0, 0) of a limit state into its
/// ℙ₂ part and the remainder: returns (−mask·ℙ₂A, mask·G̃) with G̃ = −(ℙA)_osc.
pub fn limit_forcing(w: &SpectralField4, mask: &ModeMask) -> (SpectralField4, SpectralField4) {
    let g = *w.grid();
    let [p11, p12, p22] = horizontal_products(w);
    let mut ns = SpectralField4::zeros(g);
    let mut gt = SpectralField4::zeros(g);
    for idx in 0..g.len() {
        if !mask.keeps(idx) {
            continue;
        }
        let xi = g.xi(idx);
        let h2 = xi[0] * xi[0] + xi[1] * xi[1];
        if h2 == 0.0 {
            continue;
        }
        let a1 = I * (xi[0] * p11[idx] + xi[1] * p12[idx]);
        let a2 = I * (xi[0] * p12[idx] + xi[1] * p22[idx]);
        // ℙ₂A = (V₂·A)V₂ with V₂ = (−ξ₂, ξ₁)/|ξ_h|
        let c = (xi[0] * a2 - xi[1] * a1) / h2;
        ns.comps[0][idx] = xi[1] * c;
        ns.comps[1][idx] = -xi[0] * c;
        let q = I * (xi[0] * a1 + xi[1] * a2);
        gt.set(idx, gtilde_mode(xi, q));
    }
    (ns, gt)
}
