//! Image enclosures of one-dimensional maps and the chain `I, f(I), f²(I), …`.
//!
//! Enclosures are sampled estimates, not certified bounds: the map is
//! evaluated on an even grid plus the endpoints, local extrema are located
//! by bisecting sign changes of a central-difference derivative, and the
//! largest jump between neighbouring samples is reported as `slack` so the
//! caller can judge how far the estimate may be from the true range.

use serde::{Deserialize, Serialize, Serializer};

use crate::equation::{restriction_classify, EquationError, RestrictionLabel};
use crate::expr::EvalError;
use crate::map::MapSpec;

/// Interval `|lo, hi|` with endpoint flags. Infinite endpoints are open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval1 {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntervalError {
    #[error("interval endpoints out of order or NaN: [{lo}, {hi}]")]
    Invalid { lo: f64, hi: f64 },
    #[error("expected a one-dimensional map, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("unbounded interval and the map declares no window to clip it to")]
    Unbounded,
    #[error("evaluation failed at x = {x}: {source}")]
    Eval { x: f64, source: EvalError },
    #[error("image left the ambient interval at step {step}")]
    EmptyStep { step: usize },
    #[error("need n > k >= 1, got n = {n}, k = {k}")]
    Order { n: usize, k: usize },
    #[error(transparent)]
    Restriction(#[from] EquationError),
}

impl Interval1 {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(IntervalError::Invalid { lo, hi });
        }
        Ok(Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        Self::new(lo, hi, true, true)
    }

    pub fn point(x: f64) -> Self {
        Self {
            lo: x,
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Membership ignoring the closedness flags.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_within(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    /// `self ⊆ other` up to `tol` on each endpoint.
    pub fn subset_of(&self, other: &Interval1, tol: f64) -> bool {
        other.lo - tol <= self.lo && self.hi <= other.hi + tol
    }

    pub fn intersect(&self, other: &Interval1) -> Option<Interval1> {
        let (lo, lo_closed) = match self.lo.partial_cmp(&other.lo)? {
            std::cmp::Ordering::Greater => (self.lo, self.lo_closed),
            std::cmp::Ordering::Less => (other.lo, other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&other.hi)? {
            std::cmp::Ordering::Less => (self.hi, self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi, other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi, self.hi_closed && other.hi_closed),
        };
        (lo <= hi).then_some(Interval1 {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    /// Endpoint-wise comparison; closedness is deliberately ignored.
    pub fn approx_eq(&self, other: &Interval1, tol: f64) -> bool {
        (self.lo - other.lo).abs() <= tol && (self.hi - other.hi).abs() <= tol
    }

    /// `n ≥ 2` evenly spaced points including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        if self.lo == self.hi {
            return vec![self.lo];
        }
        let n = n.max(2);
        let step = self.width() / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }
}

impl std::fmt::Display for Interval1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// One enclosure with its reported slack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enclosure {
    pub interval: Interval1,
    pub slack: f64,
}

/// Chain `I_0 = I, I_1 ⊇ f(I_0), …` of enclosures. Each step is intersected
/// with the ambient interval and with the previous step.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageChain {
    pub steps: Vec<Enclosure>,
    /// Set when the input interval had to be clipped to the map's window.
    pub clipped_to: Option<Interval1>,
}

impl ImageChain {
    pub fn intervals(&self) -> Vec<Interval1> {
        self.steps.iter().map(|s| s.interval).collect()
    }

    pub fn last(&self) -> &Interval1 {
        &self
            .steps
            .last()
            .expect("chain holds at least I_0")
            .interval
    }

    /// `[lo, hi, lo_closed, hi_closed, slack]` per step.
    pub fn rows(&self) -> Vec<(f64, f64, bool, bool, f64)> {
        self.steps
            .iter()
            .map(|s| {
                (
                    s.interval.lo,
                    s.interval.hi,
                    s.interval.lo_closed,
                    s.interval.hi_closed,
                    s.slack,
                )
            })
            .collect()
    }
}

impl Serialize for ImageChain {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

const DERIVATIVE_STEP: f64 = 1e-7;
const BISECTION_WIDTH: f64 = 1e-12;

fn require_1d(f: &MapSpec) -> Result<(), IntervalError> {
    match f.dim() {
        1 => Ok(()),
        d => Err(IntervalError::NotOneDimensional(d)),
    }
}

fn eval(f: &MapSpec, x: f64) -> Result<f64, IntervalError> {
    f.components()[0]
        .eval(&[x])
        .map_err(|source| IntervalError::Eval { x, source })
}

/// Clips unbounded intervals to the map's window. Returns the interval to
/// use and whether clipping happened.
fn bounded(f: &MapSpec, i: &Interval1) -> Result<(Interval1, bool), IntervalError> {
    if i.is_bounded() {
        return Ok((*i, false));
    }
    let [lo, hi] = f.window().ok_or(IntervalError::Unbounded)?.axes()[0];
    let clip = i
        .intersect(&Interval1::closed(lo, hi)?)
        .ok_or(IntervalError::Invalid { lo, hi })?;
    Ok((clip, true))
}

/// Sampled enclosure of `f(I)`.
pub fn enclose_image(
    f: &MapSpec,
    i: &Interval1,
    resolution: usize,
) -> Result<Enclosure, IntervalError> {
    require_1d(f)?;
    let (i, _) = bounded(f, i)?;
    let xs = i.linspace(resolution);
    let ys = xs
        .iter()
        .map(|&x| eval(f, x))
        .collect::<Result<Vec<_>, _>>()?;

    let mut lo = (ys[0], xs[0]);
    let mut hi = (ys[0], xs[0]);
    let mut note = |y: f64, x: f64| {
        if y < lo.0 {
            lo = (y, x);
        }
        if y > hi.0 {
            hi = (y, x);
        }
    };
    for (&x, &y) in xs.iter().zip(&ys) {
        note(y, x);
    }
    let slack = ys
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);

    // A turn in the sampled values brackets a critical point.
    for j in 1..xs.len().saturating_sub(1) {
        let (left, right) = (ys[j] - ys[j - 1], ys[j + 1] - ys[j]);
        if left * right <= 0.0 && (left != 0.0 || right != 0.0) {
            let x = refine_critical(f, xs[j - 1], xs[j + 1])?;
            note(eval(f, x)?, x);
        }
    }

    let lo_closed = !(lo.1 == i.lo && !i.lo_closed);
    let hi_closed = !(hi.1 == i.hi && !i.hi_closed);
    Ok(Enclosure {
        interval: Interval1::new(lo.0, hi.0, lo_closed, hi_closed)?,
        slack,
    })
}

/// Central difference with a step no wider than a quarter of `width`, so
/// the bisection below can close in on kinks as well as smooth extrema.
fn derivative(f: &MapSpec, x: f64, width: f64) -> Result<f64, IntervalError> {
    let scale = x.abs().max(1.0);
    let h = (0.25 * width)
        .min(DERIVATIVE_STEP * scale)
        .max(16.0 * f64::EPSILON * scale);
    Ok((eval(f, x + h)? - eval(f, x - h)?) / (2.0 * h))
}

/// Locates a critical point in `[a, b]`: bisection on the derivative sign
/// when it changes across the bracket, golden-section search otherwise.
fn refine_critical(f: &MapSpec, mut a: f64, mut b: f64) -> Result<f64, IntervalError> {
    let (da, db) = (derivative(f, a, b - a)?, derivative(f, b, b - a)?);
    if da * db < 0.0 {
        let sa = da.signum();
        while b - a > BISECTION_WIDTH {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if derivative(f, m, b - a)?.signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        return Ok(0.5 * (a + b));
    }
    // no clean sign change: search for the extremum of whichever kind the
    // middle sample suggests
    let mid = 0.5 * (a + b);
    let sign = if eval(f, mid)? >= 0.5 * (eval(f, a)? + eval(f, b)?) {
        1.0
    } else {
        -1.0
    };
    let g = |x: f64| eval(f, x).map(|y| sign * y);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    while b - a > BISECTION_WIDTH {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d)?;
        }
        if c <= a || d >= b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// `I, f(I), …, f^k(I)` as sampled enclosures.
pub fn image_chain(
    f: &MapSpec,
    i: &Interval1,
    k: usize,
    resolution: usize,
) -> Result<ImageChain, IntervalError> {
    require_1d(f)?;
    let (ambient, clipped) = bounded(f, i)?;
    let mut steps = vec![Enclosure {
        interval: ambient,
        slack: 0.0,
    }];
    for step in 1..=k {
        let prev = steps[step - 1].interval;
        let next = enclose_image(f, &prev, resolution)?;
        let interval = next
            .interval
            .intersect(&ambient)
            .and_then(|j| j.intersect(&prev))
            .ok_or(IntervalError::EmptyStep { step })?;
        steps.push(Enclosure {
            interval,
            slack: next.slack,
        });
    }
    Ok(ImageChain {
        steps,
        clipped_to: clipped.then_some(ambient),
    })
}

/// Which identity the parity reduction leaves to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// `n − k` odd: `f^{k+1} = f^k`.
    StepOne,
    /// `n − k` even: `f^{k+2} = f^k`.
    StepTwo,
}

impl Reduction {
    pub fn for_pair(n: usize, k: usize) -> Self {
        if (n - k) % 2 == 1 {
            Reduction::StepOne
        } else {
            Reduction::StepTwo
        }
    }

    pub fn step(self) -> usize {
        match self {
            Reduction::StepOne => 1,
            Reduction::StepTwo => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verify1dReport {
    pub n: usize,
    pub k: usize,
    pub reduction: Reduction,
    pub chain: ImageChain,
    pub restriction: RestrictionLabel,
    pub verified: bool,
    /// `sup |f^{k+s}(x) − f^k(x)|` over the sampled interval (`s` the step).
    pub deviation: f64,
    pub witness: f64,
    /// One-sided difference quotients of `f` just inside the ends of the last
    /// chain interval; reported for the caller, not judged.
    pub endpoint_slopes: [f64; 2],
}

/// Parity reduction of `f^n = f^k` on `I` to a statement about `f` on the
/// `k`-th image.
pub fn verify_1d_equation(
    f: &MapSpec,
    i: &Interval1,
    n: usize,
    k: usize,
    resolution: usize,
    tol: f64,
) -> Result<Verify1dReport, IntervalError> {
    if n <= k || k == 0 {
        return Err(IntervalError::Order { n, k });
    }
    let reduction = Reduction::for_pair(n, k);
    let chain = image_chain(f, i, k, resolution)?;
    let image = *chain.last();
    let restriction = restriction_classify(f, &image, resolution, tol)?;
    let label_ok = match reduction {
        Reduction::StepOne => restriction == RestrictionLabel::Identity,
        Reduction::StepTwo => restriction != RestrictionLabel::Other,
    };

    let mut deviation = 0.0;
    let mut witness = chain.steps[0].interval.lo;
    for x in chain.steps[0].interval.linspace(resolution) {
        let mut orbit = vec![x];
        for _ in 0..k + reduction.step() {
            let next = eval(f, *orbit.last().unwrap())?;
            orbit.push(next);
        }
        let d = (orbit[k + reduction.step()] - orbit[k]).abs();
        if d > deviation {
            deviation = d;
            witness = x;
        }
    }

    let h = (image.width() * 1e-6).max(1e-9);
    let slope = |a: f64, b: f64| -> Result<f64, IntervalError> {
        Ok((eval(f, b)? - eval(f, a)?) / (b - a))
    };
    let endpoint_slopes = [
        slope(image.lo, image.lo + h)?,
        slope(image.hi - h, image.hi)?,
    ];

    Ok(Verify1dReport {
        n,
        k,
        reduction,
        verified: label_ok && deviation <= tol,
        chain,
        restriction,
        deviation,
        witness,
        endpoint_slopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_map;

    fn map(text: &str) -> MapSpec {
        MapSpec::parse(&["x"], &[text]).unwrap()
    }

    fn closed(lo: f64, hi: f64) -> Interval1 {
        Interval1::closed(lo, hi).unwrap()
    }

    #[test]
    fn square_on_asymmetric_interval() {
        let e = enclose_image(&map("x^2"), &closed(-1.0, 2.0), 1000).unwrap();
        assert!(
            e.interval.approx_eq(&closed(0.0, 4.0), 1e-9),
            "{}",
            e.interval
        );
    }

    #[test]
    fn interior_extremum_between_samples() {
        // maximum at x = 1/3, never sampled on a grid of 10
        let e = enclose_image(&map("-(x - 1/3)^2"), &closed(0.0, 1.0), 10).unwrap();
        assert!(e.interval.hi.abs() < 1e-18);
        assert!(e.slack > 0.0);
    }

    #[test]
    fn identity_chain_is_constant() {
        let c = image_chain(&map("x"), &closed(-2.0, 3.0), 3, 64).unwrap();
        assert_eq!(c.steps.len(), 4);
        assert!(c
            .intervals()
            .iter()
            .all(|j| j.approx_eq(&closed(-2.0, 3.0), 0.0)));
    }

    #[test]
    fn smooth_family_chain() {
        let f = builtin_map(&"builtin:f_lambda_smooth?bits=1".parse().unwrap()).unwrap();
        let c = image_chain(&f, &closed(-10.0, 10.0), 2, 4096).unwrap();
        assert!(
            c.steps[1].interval.approx_eq(&closed(-1.0, 0.0), 1e-6),
            "{}",
            c.steps[1].interval
        );
        assert!(c.steps[2].interval.approx_eq(&Interval1::point(0.0), 1e-6));
    }

    #[test]
    fn unbounded_input_clipped_to_window() {
        let f = builtin_map(&"builtin:f_lambda_cont?bits=10".parse().unwrap()).unwrap();
        let c = image_chain(&f, &Interval1::real_line(), 1, 512).unwrap();
        assert_eq!(c.clipped_to, Some(closed(-1.0, 4.0)));
        assert!(
            c.steps[1].interval.approx_eq(&closed(0.0, 1.0), 1e-9),
            "{}",
            c.steps[1].interval
        );
        assert!(matches!(
            image_chain(&map("x"), &Interval1::real_line(), 1, 8),
            Err(IntervalError::Unbounded)
        ));
    }

    #[test]
    fn parity_reduction_examples() {
        let abs = map("piece(x < 0 : -x ; else : x)");
        let r = verify_1d_equation(&abs, &closed(-5.0, 5.0), 2, 1, 1001, 1e-9).unwrap();
        assert!(r.verified);
        assert_eq!(
            (r.reduction, r.restriction),
            (Reduction::StepOne, RestrictionLabel::Identity)
        );

        let flip = map("1 - x");
        let r = verify_1d_equation(&flip, &closed(-5.0, 5.0), 3, 1, 1001, 1e-9).unwrap();
        assert!(r.verified);
        assert_eq!(
            (r.reduction, r.restriction),
            (Reduction::StepTwo, RestrictionLabel::Involution)
        );

        let sq = map("x^2");
        let r = verify_1d_equation(&sq, &closed(0.0, 0.5), 2, 1, 1001, 1e-9).unwrap();
        assert!(!r.verified);
        assert!(r.deviation >= 3.0 / 16.0 - 1e-15);
        assert_eq!(r.witness, 0.5);
    }

    #[test]
    fn intersection_tracks_closedness() {
        let a = Interval1::new(0.0, 2.0, false, true).unwrap();
        let b = closed(0.0, 1.0);
        let c = a.intersect(&b).unwrap();
        assert!(!c.lo_closed && c.hi_closed);
        assert!(closed(3.0, 4.0).intersect(&b).is_none());
        assert!(Interval1::new(1.0, 0.0, true, true).is_err());
    }
}
