//! Special functions: complex gamma, adaptive quadrature, `K_ν(2)`, the cut-off
//! `F`, its Mellin transform, the contour weight `H` and the gamma-ratio limit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::zeta::dedekind_zeta;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `ln Γ(z)` for `Re z ≥ 1/2` (Lanczos, g = 7).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = c(LANCZOS[0]);
    for (i, p) in LANCZOS.iter().enumerate().skip(1) {
        x += *p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `Γ(z)`; errors at the poles `z ∈ {0, −1, −2, …}`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("Γ at {z}")));
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z).exp())
    } else {
        // Γ(z)Γ(1−z) = π / sin(πz)
        Ok(PI / ((PI * z).sin() * ln_gamma_right(1.0 - z).exp()))
    }
}

/// `1/Γ(z)`, entire.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return c(0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        (PI * z).sin() * ln_gamma_right(1.0 - z).exp() / PI
    }
}

/// Archimedean factor `L_ℝ(z) = π^{−z/2} Γ(z/2)`.
pub fn lr_factor(z: Complex64) -> Result<Complex64> {
    Ok(c(PI).powc(-z / 2.0) * gamma(z / 2.0)?)
}

/// `L_ℝ(a)/L_ℝ(b)`, finite wherever `L_ℝ(a)` is.
pub fn lr_ratio(a: Complex64, b: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(a / 2.0) {
        return Err(Error::Pole(format!("L_R at {a}")));
    }
    Ok(c(PI).powc((b - a) / 2.0) * gamma(a / 2.0)? * rgamma(b / 2.0))
}

/// Upper incomplete gamma `Γ(a, x)` for complex `a` and `x > 0`.
pub fn upper_gamma(a: Complex64, x: f64) -> Result<Complex64> {
    if x <= 0.0 {
        return Err(Error::UndefinedInput(format!("Γ(a, x) needs x > 0, got {x}")));
    }
    let prefactor = (a * x.ln() - x).exp();
    if x < a.re + 1.5 && !is_nonpositive_integer(a) {
        // Γ(a) − x^a e^{−x} Σ x^k / (a)_{k+1}
        let mut term = 1.0 / a;
        let mut sum = term;
        for k in 1..500 {
            term *= x / (a + k as f64);
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                return Ok(gamma(a)? - prefactor * sum);
            }
        }
        return Err(Error::Nonconvergent(format!("Γ({a}, {x}) series")));
    }
    // Modified Lentz on the Legendre continued fraction.
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut cc = c(1.0 / tiny);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..20_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.norm() < tiny {
            d = c(tiny);
        }
        cc = b + an / cc;
        if cc.norm() < tiny {
            cc = c(tiny);
        }
        d = 1.0 / d;
        let delta = d * cc;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Ok(prefactor * h);
        }
    }
    Err(Error::Nonconvergent(format!("Γ({a}, {x}) continued fraction")))
}

/// Targets for adaptive Gauss–Kronrod quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-12, max_segments: 2000 }
    }
}

/// Integral value and error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
}

/// Values that can be integrated: `f64` and `Complex64`.
pub trait Integrand:
    Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        c(0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: Integrand, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Segment<T> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let s = f(mid - x) + f(mid + x);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let value = k * half;
    let error = ((k - g) * half).magnitude();
    Segment { a, b, value, error }
}

/// Adaptive 7–15 Gauss–Kronrod quadrature on `[a, b]`; the reported error is the
/// sum of per-segment `|K15 − G7|`.
pub fn integrate<T: Integrand, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature<T>> {
    let mut heap = BinaryHeap::new();
    heap.push(kronrod(&mut f, a, b));
    loop {
        let (value, error) = heap.iter().fold((T::zero(), 0.0), |(v, e), s| (v + s.value, e + s.error));
        if error <= spec.abs_tol.max(spec.rel_tol * value.magnitude()) {
            return Ok(Quadrature { value, error });
        }
        if heap.len() >= spec.max_segments {
            return Err(Error::Quadrature(format!("[{a}, {b}]: error {error:e} after {} segments", heap.len())));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod(&mut f, worst.a, mid));
        heap.push(kronrod(&mut f, mid, worst.b));
    }
}

/// [`integrate`] over `[a, ∞)` through `x = a + t/(1 − t)`.
pub fn integrate_to_infinity<T: Integrand, F: FnMut(f64) -> T>(mut f: F, a: f64, spec: &QuadratureSpec) -> Result<Quadrature<T>> {
    integrate(
        |t| {
            let s = 1.0 - t;
            f(a + t / s) * (1.0 / (s * s))
        },
        0.0,
        1.0,
        spec,
    )
}

/// `K_ν(2) = ∫₀^∞ e^{−2 cosh t} cosh(νt) dt` by the trapezoidal rule, which converges
/// geometrically for this analytic, doubly-exponentially decaying integrand.
pub fn bessel_k_at_2(nu: Complex64) -> Result<Complex64> {
    if nu.re.abs() > 100.0 || nu.im.abs() > 150.0 {
        return Err(Error::Quadrature(format!("K_ν(2) outside supported range: ν = {nu}")));
    }
    let h = 1.0 / 64.0;
    let steps = 7 * 64;
    let mut sum = c(0.5 * (-2.0f64).exp());
    for j in 1..=steps {
        let t = j as f64 * h;
        sum += (nu * t).cosh() * (-2.0 * t.cosh()).exp();
    }
    Ok(sum * h)
}

/// `K₀(2)` from the self-normalizing integral `∫₀^∞ e^{−y−1/y} dy/y = 2K₀(2)`.
pub fn bessel_k0_2() -> f64 {
    static K0: OnceLock<f64> = OnceLock::new();
    *K0.get_or_init(|| {
        // y = e^s turns the integral into ∫ e^{−2 cosh s} ds over ℝ.
        let spec = QuadratureSpec { abs_tol: 1e-17, rel_tol: 1e-15, max_segments: 200 };
        let q = integrate(|s: f64| (-2.0 * s.cosh()).exp(), 0.0, 8.0, &spec).expect("K0(2) quadrature");
        q.value
    })
}

/// Cut-off `F(x) = (1/2K₀(2)) ∫_x^∞ e^{−y−1/y} dy/y` for `x > 0`.
pub fn cutoff_f(x: f64) -> Result<f64> {
    Ok(cutoff_f_with_error(x)?.value)
}

/// [`cutoff_f`] with its quadrature error estimate.
pub fn cutoff_f_with_error(x: f64) -> Result<Quadrature<f64>> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::UndefinedInput(format!("F needs x > 0, got {x}")));
    }
    // y = x + t: F(x) = e^{−x}/(2K₀(2)) ∫₀^∞ e^{−t} e^{−1/(x+t)}/(x+t) dt
    let spec = QuadratureSpec { abs_tol: 1e-16, rel_tol: 1e-13, max_segments: 400 };
    let q = integrate_to_infinity(
        |t: f64| {
            let y = x + t;
            (-t - 1.0 / y).exp() / y
        },
        0.0,
        &spec,
    )?;
    let scale = (-x).exp() / (2.0 * bessel_k0_2());
    Ok(Quadrature { value: scale * q.value, error: scale * q.error })
}

/// Mellin transform `F̃(z) = ∫₀^∞ F(x) x^z dx/x = K_z(2)/(z K₀(2))`, which is odd in `z`.
pub fn mellin_f(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Pole("F̃ at 0".into()));
    }
    if z.re < 0.0 {
        return Ok(-mellin_f(-z)?);
    }
    Ok(bessel_k_at_2(z)? / (z * bessel_k0_2()))
}

/// `F̃(z)` for `Re z > 0` by direct quadrature of `∫ F(e^s) e^{zs} ds`.
pub fn mellin_f_direct(z: Complex64) -> Result<Quadrature<Complex64>> {
    if z.re <= 0.0 {
        return Err(Error::Nonconvergent(format!("direct Mellin integral needs Re z > 0, got {z}")));
    }
    let lower = -40.0 / z.re;
    let spec = QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-11, max_segments: 400 };
    let mut failure = None;
    let q = integrate(
        |s: f64| match cutoff_f((s).exp()) {
            Ok(f) => (z * s).exp() * f,
            Err(e) => {
                failure.get_or_insert(e);
                c(0.0)
            }
        },
        lower,
        5.0,
        &spec,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(q),
    }
}

/// Vertical contour `Re u = abscissa`, truncated at `|Im u| ≤ height`, trapezoidal step `step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    pub abscissa: f64,
    pub height: f64,
    pub step: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { abscissa: 1.0, height: 40.0, step: 0.1 }
    }
}

/// Value of a contour integral with discretization and truncation error estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourValue {
    pub value: Complex64,
    pub discretization: f64,
    pub truncation: f64,
}

impl ContourValue {
    pub fn error(&self) -> f64 {
        self.discretization + self.truncation
    }
}

/// `H(z, y) = (1/2πi) ∫_{Re u = c} y^{−u} F̃(u) ∏_ν L_ℝ(1 − z + u + δ_ν)/L_ℝ(z − u + δ_ν) du`
/// with the kernel tabulated once for fixed `z` and ramification vector.
#[derive(Clone, Debug)]
pub struct HContour {
    spec: ContourSpec,
    /// `(t, kernel(c + it))` for `t = −T, …, T`.
    nodes: Vec<(f64, Complex64)>,
    edge: f64,
}

impl HContour {
    pub fn new(z: Complex64, ramification: &[u8], spec: ContourSpec) -> Result<Self> {
        if !(spec.step > 0.0 && spec.height > 0.0 && spec.abscissa > 0.0) {
            return Err(Error::UndefinedInput(format!("bad contour {spec:?}")));
        }
        let n = (spec.height / spec.step).round() as i64;
        let mut nodes = Vec::with_capacity(2 * n as usize + 1);
        for j in -n..=n {
            let t = j as f64 * spec.step;
            let u = Complex64::new(spec.abscissa, t);
            let mut k = mellin_f(u)?;
            for &d in ramification {
                let d = d as f64;
                k *= lr_ratio(1.0 - z + u + d, z - u + d)?;
            }
            nodes.push((t, k));
        }
        let edge = nodes.first().map_or(0.0, |n| n.1.norm()).max(nodes.last().map_or(0.0, |n| n.1.norm()));
        Ok(HContour { spec, nodes, edge })
    }

    /// `H(z, y)` for `y > 0`.
    pub fn eval(&self, y: f64) -> Result<ContourValue> {
        if y.is_nan() || y <= 0.0 {
            return Err(Error::UndefinedInput(format!("H needs y > 0, got {y}")));
        }
        let ly = y.ln();
        let mut fine = c(0.0);
        let mut coarse = c(0.0);
        let last = self.nodes.len() - 1;
        for (j, &(t, k)) in self.nodes.iter().enumerate() {
            let term = Complex64::new(0.0, -t * ly).exp() * k;
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            fine += term * w;
            if j % 2 == 0 {
                coarse += term * w;
            }
        }
        // du = i dt; the 1/(2πi) leaves 1/(2π).
        let scale = (-self.spec.abscissa * ly).exp() * self.spec.step / (2.0 * PI);
        let fine = fine * scale;
        let coarse = coarse * scale * 2.0;
        // |kernel| decays at least like e^{−|t|} beyond the edge on both sides.
        let truncation = 2.0 * self.edge * (-self.spec.abscissa * ly).exp() / (2.0 * PI);
        Ok(ContourValue { value: fine, discretization: (fine - coarse).norm(), truncation })
    }
}

/// `H(z, y)` with the default contour.
pub fn h_function(z: Complex64, y: f64, ramification: &[u8]) -> Result<ContourValue> {
    HContour::new(z, ramification, ContourSpec::default())?.eval(y)
}

/// `(1/2πi) ∫_{Re u = c} a^{−u} F̃(u) du`, which should reproduce `F(a)`.
pub fn mellin_inverse_f(a: f64, spec: ContourSpec) -> Result<ContourValue> {
    HContour::new(c(0.5), &[], spec)?.eval(a)
}

/// `lim_{z→0} ∏_ν L_ℝ(z+δ_ν)/L_ℝ(1−z+δ_ν) · ζ_K(2z)/ζ_K(z+1)` by polynomial extrapolation
/// to 0 of evaluations at `z = 10⁻³, 10⁻⁴, 10⁻⁵`.
pub fn gamma_ratio_limit(n: u32, ramification: &[u8], field: &FieldDescriptor) -> Result<f64> {
    if n != field.degree || ramification.len() != n as usize {
        return Err(Error::UndefinedInput(format!(
            "degree {n} and {} archimedean signs for a field of degree {}",
            ramification.len(),
            field.degree
        )));
    }
    let f = |z: f64| -> Result<f64> {
        let z = c(z);
        let mut v = dedekind_zeta(field, 2.0 * z)? / dedekind_zeta(field, z + 1.0)?;
        for &d in ramification {
            let d = d as f64;
            v *= lr_ratio(z + d, 1.0 - z + d)?;
        }
        Ok(v.re)
    };
    let nodes = [1e-3, 1e-4, 1e-5];
    let mut limit = 0.0;
    for (i, &zi) in nodes.iter().enumerate() {
        let weight: f64 = nodes.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &zj)| zj / (zj - zi)).product();
        limit += weight * f(zi)?;
    }
    Ok(limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(c(0.5)).unwrap().re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(5.0)).unwrap().re - 24.0).abs() < 1e-12);
        assert!((gamma(c(-0.5)).unwrap().re + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(gamma(c(-2.0)).is_err());
        assert_eq!(rgamma(c(0.0)), c(0.0));
        // |Γ(1/2 + it)|² = π / cosh(πt)
        let t = 7.3;
        let g = gamma(Complex64::new(0.5, t)).unwrap();
        assert!((g.norm_sqr() / (PI / (PI * t).cosh()) - 1.0).abs() < 1e-12);
        // Γ(1+i) reference value.
        let g = gamma(Complex64::new(1.0, 1.0)).unwrap();
        assert!((g - Complex64::new(0.498_015_668_118_356_04, -0.154_949_828_301_810_68)).norm() < 1e-14);
    }

    #[test]
    fn lr_examples() {
        assert!((lr_factor(c(1.0)).unwrap().re - 1.0).abs() < 1e-14);
        assert!((lr_factor(c(2.0)).unwrap().re - 1.0 / PI).abs() < 1e-14);
        let r = lr_factor(c(4.0)).unwrap() / lr_factor(c(2.0)).unwrap();
        assert!((r.re - 1.0 / PI).abs() < 1e-14);
        assert!(lr_factor(c(0.0)).is_err());
        assert!(lr_factor(c(-4.0)).is_err());
        assert_eq!(lr_ratio(c(1.0), c(0.0)).unwrap(), c(0.0));
    }

    #[test]
    fn incomplete_gamma() {
        // Γ(1, x) = e^{−x}; Γ(1/2, x) = √π erfc(√x).
        for x in [0.1, 1.0, 3.0, 20.0] {
            assert!((upper_gamma(c(1.0), x).unwrap().re - (-x).exp()).abs() < 1e-15);
        }
        let v = upper_gamma(c(0.5), 2.0).unwrap().re;
        assert!((v - PI.sqrt() * 0.045_500_263_896_358_42).abs() < 1e-15);
        // Γ(a, x) + γ(a, x) = Γ(a) on both branches.
        let a = Complex64::new(0.3, 0.4);
        let x = 1.7;
        let cf = upper_gamma(a, x).unwrap();
        let series = {
            let mut term = 1.0 / a;
            let mut sum = term;
            for k in 1..200 {
                term *= x / (a + k as f64);
                sum += term;
            }
            gamma(a).unwrap() - (a * x.ln() - x).exp() * sum
        };
        assert!((cf - series).norm() < 1e-13);
    }

    #[test]
    fn quadrature_error_is_honest() {
        let spec = QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-10, max_segments: 500 };
        type Integrand = Box<dyn Fn(f64) -> f64>;
        let cases: Vec<(Integrand, f64, f64, f64)> = vec![
            (Box::new(|x: f64| x.sin()), 0.0, PI, 2.0),
            (Box::new(|x: f64| x.sqrt()), 0.0, 1.0, 2.0 / 3.0),
            (Box::new(|x: f64| 1.0 / (1.0 + x * x)), -10.0, 10.0, 2.0 * 10f64.atan()),
            (Box::new(|x: f64| (-x * x).exp()), -6.0, 6.0, PI.sqrt() * 0.999_999_999_999_999_98),
        ];
        for (f, a, b, exact) in cases {
            let q = integrate(f, a, b, &spec).unwrap();
            assert!((q.value - exact).abs() <= q.error.max(1e-15), "{} vs {exact} ± {}", q.value, q.error);
        }
        let q = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, &spec).unwrap();
        assert!((q.value - 1.0).abs() <= q.error.max(1e-15));
        let tight = QuadratureSpec { abs_tol: 0.0, rel_tol: 1e-16, max_segments: 4 };
        assert!(matches!(integrate(|x: f64| x.sqrt(), 0.0, 1.0, &tight), Err(Error::Quadrature(_))));
    }

    #[test]
    fn k0_two_rules_agree() {
        let gk = bessel_k0_2();
        let trap = bessel_k_at_2(c(0.0)).unwrap().re;
        assert!((gk - trap).abs() < 1e-10);
        assert!((gk - 0.113_893_872_749_533_44).abs() < 1e-13);
        // K_{1/2}(2) = √(π/4) e^{−2}; K_1(2) reference.
        assert!((bessel_k_at_2(c(0.5)).unwrap().re - (PI / 4.0).sqrt() * (-2.0f64).exp()).abs() < 1e-14);
        assert!((bessel_k_at_2(c(1.0)).unwrap().re - 0.139_865_881_816_522_43).abs() < 1e-14);
    }

    #[test]
    fn cutoff_properties() {
        assert!((cutoff_f(1e-12).unwrap() - 1.0).abs() < 1e-8);
        assert!(cutoff_f(0.0).is_err());
        assert!(cutoff_f(-1.0).is_err());
        let bound = |x: f64| (-x).exp() / (2.0 * bessel_k0_2());
        let mut prev = 1.0;
        for i in 1..=100 {
            let x = i as f64 * 0.3;
            let f = cutoff_f(x).unwrap();
            assert!(f > 0.0 && f < bound(x), "x = {x}");
            assert!(f < prev);
            prev = f;
        }
        let f10 = cutoff_f(10.0).unwrap();
        assert!(f10 < bound(10.0));
    }

    #[test]
    fn mellin_properties() {
        assert!(mellin_f(c(0.0)).is_err());
        for z in [c(0.7), Complex64::new(1.0, 1.0)] {
            let s = mellin_f(z).unwrap() + mellin_f(-z).unwrap();
            assert!(s.norm() < 1e-8);
            let direct = mellin_f_direct(z).unwrap();
            assert!((direct.value - mellin_f(z).unwrap()).norm() < 1e-9, "{z}");
        }
        let h = 1e-6;
        let res = (c(h) * mellin_f(c(h)).unwrap()).re;
        assert!((res - 1.0).abs() < 1e-6);
        // Decay along Re z = 1 tracks e^{−π|t|/2}.
        let m5 = mellin_f(Complex64::new(1.0, 5.0)).unwrap().norm();
        let m10 = mellin_f(Complex64::new(1.0, 10.0)).unwrap().norm();
        let slope = (m10 / m5).ln() / 5.0;
        assert!((slope + PI / 2.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn mellin_inversion() {
        for a in [0.5, 1.0, 2.0] {
            let v = mellin_inverse_f(a, ContourSpec::default()).unwrap();
            assert!((v.value.re - cutoff_f(a).unwrap()).abs() < 1e-6);
            assert!(v.value.im.abs() < 1e-12);
        }
    }

    #[test]
    fn h_decay_and_stability() {
        let h = HContour::new(c(1.0), &[0], ContourSpec::default()).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=99 {
            let x = 1.0 + i as f64;
            let v = h.eval(x).unwrap();
            worst = worst.max(v.value.norm() * x / (-x.sqrt()).exp());
        }
        assert!(worst.is_finite() && worst < 10.0, "fitted constant {worst}");
        let fine = HContour::new(c(1.0), &[0], ContourSpec { abscissa: 1.0, height: 80.0, step: 0.05 }).unwrap();
        for y in [0.5, 3.0, 40.0] {
            let a = h.eval(y).unwrap();
            let b = fine.eval(y).unwrap();
            assert!((a.value - b.value).norm() <= a.error() + 1e-15, "y = {y}");
        }
    }

    #[test]
    fn gamma_ratio_examples() {
        let q = FieldDescriptor::rational();
        assert!((gamma_ratio_limit(1, &[0], &q).unwrap() + 1.0).abs() < 1e-5);
        assert!(gamma_ratio_limit(1, &[1], &q).unwrap().abs() < 1e-5);
        let k = FieldDescriptor::real_quadratic(33).unwrap();
        let v = gamma_ratio_limit(2, &[0, 0], &k).unwrap();
        assert!((v + 2.0 * 33f64.sqrt()).abs() < 1e-5, "{v}");
        assert!(gamma_ratio_limit(2, &[1, 0], &k).unwrap().abs() < 1e-5);
        assert!(gamma_ratio_limit(1, &[0], &k).is_err());
    }
}
