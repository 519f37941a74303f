//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Intervals are kept in a max-heap keyed by their error estimate; the worst
//! interval is bisected until the summed error meets the tolerance. Each call
//! owns its own workspace, so integrators can run concurrently.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const ROUNDOFF_FLOOR: f64 = 60.0 * f64::EPSILON;

/// Stopping criteria for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 2000,
        }
    }

    pub const fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-12)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    mass: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 21-point Gauss–Kronrod panel on `[a, b]`: `(value, error)`.
pub fn gauss_kronrod_21<F>(f: &F, a: f64, b: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let (value, error, _) = kronrod_panel(f, a, b);
    (value, error)
}

/// Value, error and `∫|f|` estimate on one panel.
fn kronrod_panel<F>(f: &F, a: f64, b: f64) -> (f64, f64, f64)
where
    F: Fn(f64) -> f64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = f_center.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_kronrod * half;
    let abs_half = half.abs();
    let err = (res_kronrod - res_gauss) * half;
    (
        value,
        rescale_error(err, res_abs * abs_half, res_asc * abs_half),
        res_abs * abs_half,
    )
}

/// Integrate `f` over `[a, b]` with global adaptive bisection.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }

    let (value, error, mass) = kronrod_panel(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value,
        error,
        mass,
    });
    let mut total = value;
    let mut total_err = error;
    let mut total_mass = mass;

    loop {
        // below ~50 ulp of ∫|f| the error estimate is pure roundoff
        let target = tol.abs.max(tol.rel * total.abs()).max(ROUNDOFF_FLOOR * total_mass);
        if total_err <= target {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::QuadratureFailure {
                value: total,
                error: total_err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // the panel can no longer be split in floating point
            heap.push(worst);
            return Err(Error::QuadratureFailure {
                value: total,
                error: total_err,
                intervals: heap.len(),
            });
        }
        let (v1, e1, m1) = kronrod_panel(&f, worst.a, mid);
        let (v2, e2, m2) = kronrod_panel(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_mass += m1 + m2 - worst.mass;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            mass: m1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            mass: m2,
        });
        // resum occasionally so incremental updates do not drift
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
            total_mass = heap.iter().map(|p| p.mass).sum();
        }
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(Estimate {
        value: panels.iter().map(|p| p.value).sum(),
        error: panels.iter().map(|p| p.error).sum(),
        intervals: panels.len(),
    })
}

/// [`integrate`] for integrands that can fail; the first error is returned.
pub fn try_integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = RefCell::new(None);
    let est = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        tol,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => est,
    }
}

/// Integrate `f` over `[a, b]`, splitting at the supplied interior breakpoints first.
pub fn integrate_with_breaks<F>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let mut out = Estimate {
        value: 0.0,
        error: 0.0,
        intervals: 0,
    };
    for w in breaks.windows(2) {
        let est = integrate(&f, w[0], w[1], tol)?;
        out.value += est.value;
        out.error += est.error;
        out.intervals += est.intervals;
    }
    Ok(out)
}
