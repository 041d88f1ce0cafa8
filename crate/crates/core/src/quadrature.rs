//! Adaptive Gauss–Kronrod quadrature, plus a wrapper for integrands with
//! algebraic endpoint behaviour `(x - lo)^p` / `(hi - x)^q`.
//!
//! Used to check density normalization and to cross-check CDFs; nothing on
//! the exact moment path depends on it.

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
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
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
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

/// Globally adaptive bisection: the interval with the largest error estimate
/// is split until the summed estimate drops below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Integral {
    let (v, e) = kronrod15(&f, lo, hi);
    let mut pieces = vec![(lo, hi, v, e)];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol || pieces.len() >= MAX_INTERVALS {
            break;
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .expect("non-empty");
        let (a, b, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval can no longer be split in double precision.
            pieces.push((a, b, 0.0, 0.0));
            continue;
        }
        let (v1, e1) = kronrod15(&f, a, mid);
        let (v2, e2) = kronrod15(&f, mid, b);
        pieces.push((a, mid, v1, e1));
        pieces.push((mid, b, v2, e2));
    }
    // Sum small contributions first.
    pieces.sort_by(|x, y| x.2.abs().total_cmp(&y.2.abs()));
    Integral {
        value: pieces.iter().map(|p| p.2).sum(),
        abs_error: pieces.iter().map(|p| p.3).sum(),
        intervals: pieces.len(),
    }
}

/// Integrates `f` over `[lo, hi]` where `f(x) ~ (x - lo)^left_exp` near `lo`
/// and `f(x) ~ (hi - x)^right_exp` near `hi`, with both exponents `> -1`.
///
/// Each half is mapped by `u = L s^{1/(p+1)}` (u the distance to the
/// endpoint), which absorbs the power law into the Jacobian. Distances are
/// recomputed from the rounded abscissa so the integrand is always evaluated
/// at the point it is weighted for.
pub fn integrate_algebraic_endpoints<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    left_exp: f64,
    right_exp: f64,
    tol: f64,
) -> Integral {
    assert!(
        left_exp > -1.0 && right_exp > -1.0,
        "non-integrable endpoint"
    );
    assert!(lo < hi);
    let mid = 0.5 * (lo + hi);
    let left = endpoint_half(&f, lo, mid - lo, 1.0, left_exp, tol * 0.5);
    let right = endpoint_half(&f, hi, hi - mid, -1.0, right_exp, tol * 0.5);
    Integral {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
        intervals: left.intervals + right.intervals,
    }
}

// ∫_0^len f(end + dir·u) du, with f ~ u^p near u = 0.
fn endpoint_half<F: Fn(f64) -> f64>(
    f: &F,
    end: f64,
    len: f64,
    dir: f64,
    p: f64,
    tol: f64,
) -> Integral {
    let q = p + 1.0;
    let scale = len.powf(q) / q;
    let g = |s: f64| {
        let nominal = len * s.powf(1.0 / q);
        let mut x = end + dir * nominal;
        if x == end {
            x = if dir > 0.0 {
                end.next_up()
            } else {
                end.next_down()
            };
        }
        let u = (x - end).abs();
        f(x) * u.powf(-p)
    };
    let inner = integrate(g, 0.0, 1.0, tol / scale.max(f64::MIN_POSITIVE));
    Integral {
        value: inner.value * scale,
        abs_error: inner.abs_error * scale,
        intervals: inner.intervals,
    }
}
