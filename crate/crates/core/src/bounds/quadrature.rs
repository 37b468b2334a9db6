//! Adaptive Gauss–Kronrod (7/15-point) quadrature on finite intervals.

/// Kronrod abscissae on [0, 1); odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 48;

/// `(kronrod, |kronrod - gauss|)` on one panel.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// `∫_a^b f` to relative tolerance `rel_tol` (absolute floor `1e-300`).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _) = gk15(&f, a, b);
    let abs_tol = (rel_tol * whole.abs()).max(1e-300);
    refine(&f, a, b, abs_tol, b - a, 0)
}

fn refine(f: &impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, total_len: f64, depth: u32) -> f64 {
    let (value, err) = gk15(f, a, b);
    let budget = abs_tol * (b - a) / total_len;
    if err <= budget || depth >= MAX_DEPTH {
        return value;
    }
    let mid = 0.5 * (a + b);
    refine(f, a, mid, abs_tol, total_len, depth + 1) + refine(f, mid, b, abs_tol, total_len, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_constants() {
        let (k, e) = gk15(&|_| 1.0, -1.0, 1.0);
        assert!((k - 2.0).abs() < 1e-15);
        assert!(e < 1e-15);
    }

    #[test]
    fn kronrod_exact_for_degree_22_and_gauss_for_13() {
        // ∫_{-1}^{1} x^k = 2/(k+1) for even k.
        for k in (0..=22).step_by(2) {
            let (kr, _) = gk15(&|x: f64| x.powi(k), -1.0, 1.0);
            assert!((kr - 2.0 / (k as f64 + 1.0)).abs() < 1e-14, "kronrod degree {k}");
        }
        for k in (0..=12).step_by(2) {
            let (kr, err) = gk15(&|x: f64| x.powi(k), -1.0, 1.0);
            // gauss = kronrod - ±err; both exact here
            assert!(err < 1e-14, "gauss degree {k}: {err} ({kr})");
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrands() {
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12);
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!(((v - exact) / exact).abs() < 1e-10);
        assert!((integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-13) - 2.0).abs() < 1e-12);
    }
}
