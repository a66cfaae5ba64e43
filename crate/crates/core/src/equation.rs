//! Deciding `f^n = f^k`: exact comparison of canonical polynomials where
//! possible, sup-deviation over a deterministic sample otherwise.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::expr::{EvalError, Polynomial};
use crate::interval::Interval1;
use crate::map::{CompiledMap, MapSpec};
use crate::sampling::Window;

/// Composed degree above which exact powers are abandoned.
pub const MAX_EXACT_DEGREE: u32 = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquationError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("exact mode needs polynomial components")]
    NotPolynomial,
    #[error("evaluation failed at {point:?}: {source}")]
    Eval { point: Vec<f64>, source: EvalError },
    #[error("map is not linear: {0}")]
    NonLinear(String),
    #[error("expected a one-dimensional map, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("interval is unbounded")]
    Unbounded,
    #[error("interval is not invariant: f({x}) = {value} lies outside {image}")]
    NotInvariant {
        x: f64,
        value: f64,
        image: Interval1,
    },
    #[error("need n > k, got n = {n}, k = {k}")]
    Order { n: usize, k: usize },
    #[error("window has {got} axes, map has dimension {dim}")]
    WindowDimension { dim: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Sampled,
}

/// Sampling parameters shared by every sampled check.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampling {
    /// Overrides the map's declared window.
    pub window: Option<Window>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            window: None,
            samples: 4096,
            seed: 0,
            tol: 1e-9,
        }
    }
}

impl Sampling {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = Some(window);
        self
    }

    /// The window to sample for `f`: the override, the map's own window, or
    /// `[−1, 1]^m` (with a warning).
    pub(crate) fn resolve(
        &self,
        f: &MapSpec,
        warnings: &mut Vec<String>,
    ) -> Result<Window, EquationError> {
        let w = match (&self.window, f.window()) {
            (Some(w), _) | (None, Some(w)) => w.clone(),
            (None, None) => {
                warnings.push("no window declared; sampling [-1, 1] on every axis".into());
                Window::cube(f.dim(), -1.0, 1.0).expect("valid cube")
            }
        };
        if w.dim() != f.dim() {
            return Err(EquationError::WindowDimension {
                dim: f.dim(),
                got: w.dim(),
            });
        }
        Ok(w)
    }
}

/// What was sampled, echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleDescription {
    pub window: Vec<[f64; 2]>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceResult {
    pub equal: bool,
    pub mode: Mode,
    /// Sup-norm deviation over the sample; 0 for exact equality.
    pub deviation: f64,
    pub argmax: Option<Vec<f64>>,
}

fn sup_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| if x == y { 0.0 } else { (x - y).abs() })
        .fold(0.0, f64::max)
}

pub(crate) fn eval_at(c: &CompiledMap, x: &[f64]) -> Result<Vec<f64>, EquationError> {
    c.eval(x).map_err(|source| EquationError::Eval {
        point: x.to_vec(),
        source,
    })
}

/// `f^0, f^1, …, f^top` either as exact polynomials or as sampled orbits.
enum PowerTable {
    Exact {
        powers: Vec<Vec<Polynomial>>,
        floats: Vec<CompiledMap>,
        points: Vec<Vec<f64>>,
    },
    Sampled {
        points: Vec<Vec<f64>>,
        /// `orbits[i][p] = f^p(points[i])`
        orbits: Vec<Vec<Vec<f64>>>,
    },
}

impl PowerTable {
    fn build(
        f: &MapSpec,
        top: usize,
        opts: &Sampling,
        mode: Option<Mode>,
        warnings: &mut Vec<String>,
    ) -> Result<Self, EquationError> {
        let window = opts.resolve(f, warnings)?;
        let points = window.sample(opts.samples, opts.seed);
        if mode != Some(Mode::Sampled) {
            match (f.polynomials(), mode) {
                (Some(polys), _) => {
                    if let Some(powers) = exact_powers(f, &polys, top, warnings) {
                        let floats = powers.iter().map(|p| compile_polys(f, p)).collect();
                        return Ok(PowerTable::Exact {
                            powers,
                            floats,
                            points,
                        });
                    }
                }
                (None, Some(Mode::Exact)) => return Err(EquationError::NotPolynomial),
                (None, _) => {}
            }
        }
        let c = f.compile();
        let orbits = points
            .iter()
            .map(|x| {
                let mut orbit = vec![x.clone()];
                for _ in 0..top {
                    let next = eval_at(&c, orbit.last().unwrap())?;
                    orbit.push(next);
                }
                Ok(orbit)
            })
            .collect::<Result<_, EquationError>>()?;
        Ok(PowerTable::Sampled { points, orbits })
    }

    fn mode(&self) -> Mode {
        match self {
            PowerTable::Exact { .. } => Mode::Exact,
            PowerTable::Sampled { .. } => Mode::Sampled,
        }
    }

    fn compare(&self, a: usize, b: usize, tol: f64) -> Result<EquivalenceResult, EquationError> {
        match self {
            PowerTable::Exact {
                powers,
                floats,
                points,
            } => {
                if powers[a] == powers[b] {
                    return Ok(EquivalenceResult {
                        equal: true,
                        mode: Mode::Exact,
                        deviation: 0.0,
                        argmax: None,
                    });
                }
                let (deviation, argmax) = sampled_gap(points, |x| {
                    Ok((eval_at(&floats[a], x)?, eval_at(&floats[b], x)?))
                })?;
                Ok(EquivalenceResult {
                    equal: false,
                    mode: Mode::Exact,
                    deviation,
                    argmax,
                })
            }
            PowerTable::Sampled { points, orbits } => {
                let mut deviation = 0.0;
                let mut argmax = None;
                for (x, orbit) in points.iter().zip(orbits) {
                    let d = sup_deviation(&orbit[a], &orbit[b]);
                    if d > deviation || argmax.is_none() {
                        deviation = d;
                        argmax = Some(x.clone());
                    }
                }
                Ok(EquivalenceResult {
                    equal: deviation <= tol,
                    mode: Mode::Sampled,
                    deviation,
                    argmax,
                })
            }
        }
    }

    /// Whether `f^p` is constant (on the sample, in sampled mode).
    fn is_constant(&self, p: usize, tol: f64) -> bool {
        match self {
            PowerTable::Exact { powers, .. } => powers[p].iter().all(|q| q.total_degree() == 0),
            PowerTable::Sampled { orbits, .. } => {
                let first = &orbits[0][p];
                orbits.iter().all(|o| sup_deviation(&o[p], first) <= tol)
            }
        }
    }
}

fn compile_polys(f: &MapSpec, polys: &[Polynomial]) -> CompiledMap {
    let comps = polys.iter().map(Polynomial::to_expression).collect();
    MapSpec::new(f.vars().clone(), comps)
        .expect("same variables")
        .compile()
}

fn exact_powers(
    f: &MapSpec,
    polys: &[Polynomial],
    top: usize,
    warnings: &mut Vec<String>,
) -> Option<Vec<Vec<Polynomial>>> {
    let identity: Vec<Polynomial> = (0..f.dim())
        .map(|i| Polynomial::var(i, f.vars().clone()))
        .collect();
    let degree = |p: &[Polynomial]| p.iter().map(Polynomial::total_degree).max().unwrap_or(0);
    let d = degree(polys);
    let mut powers = vec![identity];
    for p in 1..=top {
        let prev = powers.last().unwrap();
        if degree(prev).max(1).saturating_mul(d) > MAX_EXACT_DEGREE {
            warnings.push(format!(
                "composed degree exceeds {MAX_EXACT_DEGREE} at power {p}; falling back to sampled mode"
            ));
            return None;
        }
        let next = polys.iter().map(|q| q.compose(prev)).collect();
        powers.push(next);
    }
    Some(powers)
}

type Pair = (Vec<f64>, Vec<f64>);

fn sampled_gap(
    points: &[Vec<f64>],
    mut eval: impl FnMut(&[f64]) -> Result<Pair, EquationError>,
) -> Result<(f64, Option<Vec<f64>>), EquationError> {
    let mut deviation = 0.0;
    let mut argmax = None;
    for x in points {
        let (u, v) = eval(x)?;
        let d = sup_deviation(&u, &v);
        if d > deviation || argmax.is_none() {
            deviation = d;
            argmax = Some(x.clone());
        }
    }
    Ok((deviation, argmax))
}

/// Compares two maps of the same dimension. `mode = None` picks exact
/// comparison whenever both maps are polynomial.
pub fn maps_equal(
    a: &MapSpec,
    b: &MapSpec,
    opts: &Sampling,
    mode: Option<Mode>,
) -> Result<EquivalenceResult, EquationError> {
    if a.dim() != b.dim() {
        return Err(EquationError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let window = opts.resolve(a, &mut Vec::new())?;
    let points = window.sample(opts.samples, opts.seed);
    let exact = match mode {
        Some(Mode::Sampled) => None,
        _ => a.polynomials().zip(b.polynomials()),
    };
    if mode == Some(Mode::Exact) && exact.is_none() {
        return Err(EquationError::NotPolynomial);
    }
    let (ca, cb) = (a.compile(), b.compile());
    let (deviation, argmax) = sampled_gap(&points, |x| Ok((eval_at(&ca, x)?, eval_at(&cb, x)?)))?;
    Ok(match exact {
        Some((pa, pb)) if pa == pb => EquivalenceResult {
            equal: true,
            mode: Mode::Exact,
            deviation: 0.0,
            argmax: None,
        },
        Some(_) => EquivalenceResult {
            equal: false,
            mode: Mode::Exact,
            deviation,
            argmax,
        },
        None => EquivalenceResult {
            equal: deviation <= opts.tol,
            mode: Mode::Sampled,
            deviation,
            argmax,
        },
    })
}

/// `f^a = f^b`?
pub fn powers_equal(
    f: &MapSpec,
    a: usize,
    b: usize,
    opts: &Sampling,
    mode: Option<Mode>,
) -> Result<EquivalenceResult, EquationError> {
    let table = PowerTable::build(f, a.max(b), opts, mode, &mut Vec::new())?;
    table.compare(a, b, opts.tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    /// `f^n = Id`.
    Periodic,
    /// `f² = f`.
    Idempotent,
    /// `f^n = f^k` with `k ≥ 1`, other than `(2, 1)`.
    EventuallyPeriodic,
    None,
}

impl Label {
    pub fn for_pair(n: usize, k: usize) -> Self {
        match (n, k) {
            (_, 0) => Label::Periodic,
            (2, 1) => Label::Idempotent,
            _ => Label::EventuallyPeriodic,
        }
    }
}

/// A pair that was checked and failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refutation {
    pub n: usize,
    pub k: usize,
    pub deviation: f64,
    pub witness: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquationReport {
    pub pair: Option<(usize, usize)>,
    pub label: Label,
    /// Whether `f^k` is constant for the reported pair (`k ≥ 1` only).
    pub constant_power: Option<bool>,
    pub mode: Mode,
    /// Sampled mode only.
    pub residual: Option<f64>,
    pub sample: SampleDescription,
    pub refuted: Vec<Refutation>,
    pub warnings: Vec<String>,
}

fn describe(f: &MapSpec, opts: &Sampling) -> SampleDescription {
    let window = opts
        .resolve(f, &mut Vec::new())
        .map(|w| w.axes().to_vec())
        .unwrap_or_default();
    SampleDescription {
        window,
        samples: opts.samples,
        seed: opts.seed,
        tol: opts.tol,
    }
}

fn run_pairs(
    f: &MapSpec,
    pairs: &[(usize, usize)],
    opts: &Sampling,
    mode: Option<Mode>,
) -> Result<EquationReport, EquationError> {
    let top = pairs.iter().map(|p| p.0).max().unwrap_or(1);
    let mut warnings = Vec::new();
    let table = PowerTable::build(f, top, opts, mode, &mut warnings)?;
    let mut refuted = Vec::new();
    for &(n, k) in pairs {
        let r = table.compare(n, k, opts.tol)?;
        if r.equal {
            return Ok(EquationReport {
                pair: Some((n, k)),
                label: Label::for_pair(n, k),
                constant_power: (k >= 1).then(|| table.is_constant(k, opts.tol)),
                mode: table.mode(),
                residual: (table.mode() == Mode::Sampled).then_some(r.deviation),
                sample: describe(f, opts),
                refuted,
                warnings,
            });
        }
        refuted.push(Refutation {
            n,
            k,
            deviation: r.deviation,
            witness: r.argmax,
        });
    }
    Ok(EquationReport {
        pair: None,
        label: Label::None,
        constant_power: None,
        mode: table.mode(),
        residual: None,
        sample: describe(f, opts),
        refuted,
        warnings,
    })
}

/// First pair `k < n ≤ n_max` in lexicographic `(n, k)` order with `f^n = f^k`.
pub fn detect_minimal_pair(
    f: &MapSpec,
    n_max: usize,
    opts: &Sampling,
    mode: Option<Mode>,
) -> Result<EquationReport, EquationError> {
    let pairs: Vec<_> = (1..=n_max)
        .flat_map(|n| (0..n).map(move |k| (n, k)))
        .collect();
    run_pairs(f, &pairs, opts, mode)
}

/// Checks the single pair `(n, k)`. A failure is reported, not an error.
pub fn check_pair(
    f: &MapSpec,
    n: usize,
    k: usize,
    opts: &Sampling,
    mode: Option<Mode>,
) -> Result<EquationReport, EquationError> {
    if n <= k {
        return Err(EquationError::Order { n, k });
    }
    run_pairs(f, &[(n, k)], opts, mode)
}

/// One identity `f^{l1(n−k)+k} = f^{l2(n−k)+k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryRow {
    pub l1: usize,
    pub l2: usize,
    pub result: EquivalenceResult,
}

/// The identities `f^{l1(n−k)+k} = f^{l2(n−k)+k}` for `l1 < l2 ≤ l_max`.
pub fn corollary_identities(
    f: &MapSpec,
    n: usize,
    k: usize,
    l_max: usize,
    opts: &Sampling,
    mode: Option<Mode>,
) -> Result<Vec<CorollaryRow>, EquationError> {
    if n <= k {
        return Err(EquationError::Order { n, k });
    }
    let p = n - k;
    let table = PowerTable::build(f, l_max * p + k, opts, mode, &mut Vec::new())?;
    let mut rows = Vec::new();
    for l1 in 0..=l_max {
        for l2 in l1 + 1..=l_max {
            rows.push(CorollaryRow {
                l1,
                l2,
                result: table.compare(l1 * p + k, l2 * p + k, opts.tol)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdempotentPower {
    /// `k(n − k)`.
    pub exponent: usize,
    pub h: MapSpec,
    /// `f^n = f^k` on the sample.
    pub precondition: EquivalenceResult,
    /// `h ∘ h = h`.
    pub idempotent: EquivalenceResult,
}

impl IdempotentPower {
    pub fn verified(&self) -> bool {
        self.precondition.equal && self.idempotent.equal
    }
}

/// `h = f^{k(n−k)}` and the check that it is idempotent.
pub fn idempotent_power(
    f: &MapSpec,
    n: usize,
    k: usize,
    opts: &Sampling,
    mode: Option<Mode>,
) -> Result<IdempotentPower, EquationError> {
    if n <= k {
        return Err(EquationError::Order { n, k });
    }
    let e = k * (n - k);
    let table = PowerTable::build(f, n.max(2 * e), opts, mode, &mut Vec::new())?;
    Ok(IdempotentPower {
        exponent: e,
        h: f.power(e),
        precondition: table.compare(n, k, opts.tol)?,
        idempotent: table.compare(2 * e, e, opts.tol)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictionLabel {
    Identity,
    Involution,
    Other,
}

/// Classifies `f` restricted to an `f`-invariant interval.
pub fn restriction_classify(
    f: &MapSpec,
    image: &Interval1,
    samples: usize,
    tol: f64,
) -> Result<RestrictionLabel, EquationError> {
    if f.dim() != 1 {
        return Err(EquationError::NotOneDimensional(f.dim()));
    }
    if !image.is_bounded() {
        return Err(EquationError::Unbounded);
    }
    let c = f.compile();
    let xs = image.linspace(samples);
    let mut ys = Vec::with_capacity(xs.len());
    for &x in &xs {
        let y = eval_at(&c, &[x])?[0];
        if !image.contains_within(y, tol) {
            return Err(EquationError::NotInvariant {
                x,
                value: y,
                image: *image,
            });
        }
        ys.push(y);
    }
    let moved = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if moved <= tol {
        return Ok(RestrictionLabel::Identity);
    }
    let decreasing = ys.len() > 1 && ys.windows(2).all(|w| w[1] < w[0]);
    if decreasing {
        let mut back = 0.0f64;
        for (&x, &y) in xs.iter().zip(&ys) {
            back = back.max((eval_at(&c, &[y])?[0] - x).abs());
        }
        if back <= tol {
            return Ok(RestrictionLabel::Involution);
        }
    }
    Ok(RestrictionLabel::Other)
}

/// Matrix of a linear map, exact when every coefficient is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearMatrix {
    Exact(Vec<Vec<BigRational>>),
    Float(DMatrix<f64>),
}

impl LinearMatrix {
    pub fn to_float(&self) -> DMatrix<f64> {
        match self {
            LinearMatrix::Float(m) => m.clone(),
            LinearMatrix::Exact(rows) => {
                let n = rows.len();
                DMatrix::from_fn(n, n, |i, j| crate::expr::rational_to_f64(&rows[i][j]))
            }
        }
    }
}

/// Reads off the matrix of a linear map. Polynomial maps must be exactly
/// homogeneous of degree 1; others are probed at the basis vectors and then
/// checked for linearity at sampled points.
pub fn extract_matrix(f: &MapSpec) -> Result<LinearMatrix, EquationError> {
    let m = f.dim();
    if let Some(polys) = f.polynomials() {
        if let Some(bad) = polys
            .iter()
            .position(|p| !p.is_zero() && !p.is_linear_homogeneous())
        {
            return Err(EquationError::NonLinear(format!(
                "component {bad} is not homogeneous linear"
            )));
        }
        let rows = polys
            .iter()
            .map(|p| {
                (0..m)
                    .map(|j| {
                        let mut e = vec![0u32; m];
                        e[j] = 1;
                        p.coefficient(&e)
                    })
                    .collect()
            })
            .collect();
        return Ok(LinearMatrix::Exact(rows));
    }
    let c = f.compile();
    let mut a = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        let col = eval_at(&c, &e)?;
        for i in 0..m {
            a[(i, j)] = col[i];
        }
    }
    let probe = Window::cube(m, -1.0, 1.0).expect("valid cube");
    for x in probe.sample(32, 7) {
        let y = eval_at(&c, &x)?;
        let ax = &a * nalgebra::DVector::from_column_slice(&x);
        let scale = 1.0 + x.iter().map(|v| v.abs()).sum::<f64>();
        if y.iter()
            .zip(ax.iter())
            .any(|(u, v)| (u - v).abs() > 1e-9 * scale)
        {
            return Err(EquationError::NonLinear(format!(
                "f({x:?}) differs from its linear part"
            )));
        }
    }
    Ok(LinearMatrix::Float(a))
}

const SPECTRAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralDiagnosis {
    /// `(re, im)` pairs.
    pub eigenvalues: Vec<[f64; 2]>,
    /// Every nonzero eigenvalue is an `(n−k)`-th root of unity.
    pub roots_of_unity: bool,
    /// Geometric equals algebraic multiplicity for every nonzero eigenvalue.
    pub semisimple: bool,
    /// Size of the largest nilpotent Jordan block (0 when invertible).
    pub nilpotent_index: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearReport {
    pub n: usize,
    pub k: usize,
    pub exact_matrix: bool,
    /// Verdict from comparing `M^n` and `M^k`.
    pub matrix_power: bool,
    pub spectral: SpectralDiagnosis,
    pub satisfies: bool,
    pub agree: bool,
}

fn rank<T: nalgebra::ComplexField<RealField = f64>>(m: DMatrix<T>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max).max(1.0);
    sv.iter().filter(|&&s| s > SPECTRAL_TOL * top).count()
}

fn exact_mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

fn exact_mat_pow(a: &[Vec<BigRational>], e: usize) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut out: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for _ in 0..e {
        out = exact_mat_mul(&out, a);
    }
    out
}

fn float_mat_pow(a: &DMatrix<f64>, e: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..e {
        out = &out * a;
    }
    out
}

/// The spectral test for `M^n = M^k`.
pub fn spectral_diagnosis(a: &DMatrix<f64>, n: usize, k: usize) -> SpectralDiagnosis {
    let m = a.nrows();
    let eig: Vec<Complex64> = a.clone().complex_eigenvalues().iter().cloned().collect();
    let p = (n - k) as i32;
    let nonzero: Vec<Complex64> = eig
        .iter()
        .cloned()
        .filter(|l| l.norm() > SPECTRAL_TOL)
        .collect();
    let roots_of_unity = nonzero
        .iter()
        .all(|l| (l.powi(p) - 1.0).norm() <= SPECTRAL_TOL);

    // cluster the nonzero eigenvalues and compare multiplicities
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for l in &nonzero {
        match clusters.iter_mut().find(|(c, _)| (c - l).norm() <= 1e-6) {
            Some(c) => c.1 += 1,
            None => clusters.push((*l, 1)),
        }
    }
    let ac: DMatrix<Complex64> = a.map(|v| Complex64::new(v, 0.0));
    let semisimple = clusters.iter().all(|&(l, alg)| {
        let shifted = &ac - DMatrix::<Complex64>::identity(m, m) * l;
        m - rank(shifted) == alg
    });

    let mut nilpotent_index = 0;
    let mut power = DMatrix::<f64>::identity(m, m);
    let mut r = m;
    for j in 0..=m {
        let next = &power * a;
        let rn = rank(next.clone());
        if rn == r {
            nilpotent_index = j;
            break;
        }
        power = next;
        r = rn;
    }

    SpectralDiagnosis {
        eigenvalues: eig.iter().map(|l| [l.re, l.im]).collect(),
        roots_of_unity,
        semisimple,
        nilpotent_index,
        holds: roots_of_unity && semisimple && nilpotent_index <= k,
    }
}

/// Two independent verdicts on `M^n = M^k` for a linear map.
pub fn linear_solution_check(
    f: &MapSpec,
    n: usize,
    k: usize,
) -> Result<LinearReport, EquationError> {
    if n <= k {
        return Err(EquationError::Order { n, k });
    }
    let matrix = extract_matrix(f)?;
    let float = matrix.to_float();
    let matrix_power = match &matrix {
        LinearMatrix::Exact(rows) => exact_mat_pow(rows, n) == exact_mat_pow(rows, k),
        LinearMatrix::Float(a) => {
            let (mn, mk) = (float_mat_pow(a, n), float_mat_pow(a, k));
            let scale = mn.amax().max(mk.amax()).max(1.0);
            (mn - mk).amax() <= 1e-9 * scale
        }
    };
    let spectral = spectral_diagnosis(&float, n, k);
    Ok(LinearReport {
        n,
        k,
        exact_matrix: matches!(matrix, LinearMatrix::Exact(_)),
        matrix_power,
        satisfies: matrix_power && spectral.holds,
        agree: matrix_power == spectral.holds,
        spectral,
    })
}

/// Classes of `z ↦ a·z + b` on ℂ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum AffineClass {
    Constant {
        value: [f64; 2],
    },
    Identity,
    TranslationNoSolution,
    Rotation {
        angle: f64,
        center: [f64; 2],
    },
    /// `a` is not an `(n−k)`-th root of unity.
    NoSolution {
        center: [f64; 2],
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineReport {
    pub class: AffineClass,
    pub satisfies: bool,
}

const AFFINE_TOL: f64 = 1e-12;

/// Decides `f^n = f^k` for `f(z) = a·z + b`.
pub fn affine_complex_classify(
    a: Complex64,
    b: Complex64,
    n: usize,
    k: usize,
) -> Result<AffineReport, EquationError> {
    if n <= k {
        return Err(EquationError::Order { n, k });
    }
    let pair = |z: Complex64| [z.re, z.im];
    let report = if a.norm() <= AFFINE_TOL {
        AffineReport {
            class: AffineClass::Constant { value: pair(b) },
            satisfies: k >= 1,
        }
    } else if (a - 1.0).norm() <= AFFINE_TOL {
        if b.norm() <= AFFINE_TOL {
            AffineReport {
                class: AffineClass::Identity,
                satisfies: true,
            }
        } else {
            AffineReport {
                class: AffineClass::TranslationNoSolution,
                satisfies: false,
            }
        }
    } else {
        let center = b / (1.0 - a);
        if (a.powi((n - k) as i32) - 1.0).norm() <= AFFINE_TOL {
            AffineReport {
                class: AffineClass::Rotation {
                    angle: a.arg(),
                    center: pair(center),
                },
                satisfies: true,
            }
        } else {
            AffineReport {
                class: AffineClass::NoSolution {
                    center: pair(center),
                },
                satisfies: false,
            }
        }
    };
    Ok(report)
}
