//! Built-in map families, addressable as `builtin:<family>?<key>=<value>&…`.
//!
//! | family            | keys                | map                                              |
//! |-------------------|---------------------|--------------------------------------------------|
//! | `f_lambda_cont`   | `bits`              | continuous idempotent map of the line            |
//! | `f_lambda_smooth` | `bits`              | smooth map of the line with f³ = f², f² ≠ f      |
//! | `poly_family`     | `i`                 | `(x·∏_{j≤i}(j−y)/j, 0)`                          |
//! | `exp_collapse`    |                     | `(piece(x ≤ 0 : 0 ; else : −exp(−1/x)), 0)`      |
//! | `hw_simple`       | `k`                 | Hardy-Weinberg offspring map, `k` alleles        |
//! | `hw_sexed`        | `k`                 | offspring map of a population split in two sexes |
//! | `jordan`          | `blocks`            | block-diagonal linear map                        |
//! | `rot_refl`        | `angle` / `reflect` | rotation by `2π·angle`, or `(x, −y)`             |
//!
//! Jordan blocks are written `1`, `-1`, `R<p>/<q>` (rotation by `2πp/q`) and
//! `N<l>` (nilpotent `l×l` shift), comma separated.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;

use crate::expr::{vars_from, Constant, Expression, Vars};
use crate::map::{MapError, MapSpec};
use crate::sampling::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanBlock {
    One,
    MinusOne,
    /// Rotation by `2π·num/den`.
    Rotation {
        num: i64,
        den: i64,
    },
    /// `l×l` block with ones on the superdiagonal.
    Nilpotent(usize),
}

impl JordanBlock {
    pub fn size(self) -> usize {
        match self {
            JordanBlock::One | JordanBlock::MinusOne => 1,
            JordanBlock::Rotation { .. } => 2,
            JordanBlock::Nilpotent(l) => l,
        }
    }
}

impl fmt::Display for JordanBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JordanBlock::One => write!(f, "1"),
            JordanBlock::MinusOne => write!(f, "-1"),
            JordanBlock::Rotation { num, den } => write!(f, "R{num}/{den}"),
            JordanBlock::Nilpotent(l) => write!(f, "N{l}"),
        }
    }
}

impl FromStr for JordanBlock {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "1" => return Ok(JordanBlock::One),
            "-1" => return Ok(JordanBlock::MinusOne),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('N') {
            let l: usize = rest
                .parse()
                .map_err(|_| format!("bad nilpotent block `{s}`"))?;
            if l == 0 {
                return Err("nilpotent block size must be positive".into());
            }
            return Ok(JordanBlock::Nilpotent(l));
        }
        if let Some(rest) = s.strip_prefix('R') {
            let (n, d) = rest.split_once('/').unwrap_or((rest, "1"));
            let num: i64 = n.parse().map_err(|_| format!("bad rotation block `{s}`"))?;
            let den: i64 = d.parse().map_err(|_| format!("bad rotation block `{s}`"))?;
            if den <= 0 {
                return Err("rotation denominator must be positive".into());
            }
            return Ok(JordanBlock::Rotation { num, den });
        }
        Err(format!("unknown block `{s}`"))
    }
}

/// 2D linear normal forms of periodic plane maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotRefl {
    /// Rotation by `2π·num/den` about the origin.
    Rotation { num: i64, den: i64 },
    /// `(x, y) ↦ (x, −y)`.
    Reflection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinParams {
    FLambdaCont { bits: String },
    FLambdaSmooth { bits: String },
    PolyFamily { i: u32 },
    ExpCollapse,
    HwSimple { k: usize },
    HwSexed { k: usize },
    Jordan { blocks: Vec<JordanBlock> },
    RotRefl(RotRefl),
}

impl BuiltinParams {
    pub fn family_name(&self) -> &'static str {
        match self {
            BuiltinParams::FLambdaCont { .. } => "f_lambda_cont",
            BuiltinParams::FLambdaSmooth { .. } => "f_lambda_smooth",
            BuiltinParams::PolyFamily { .. } => "poly_family",
            BuiltinParams::ExpCollapse => "exp_collapse",
            BuiltinParams::HwSimple { .. } => "hw_simple",
            BuiltinParams::HwSexed { .. } => "hw_sexed",
            BuiltinParams::Jordan { .. } => "jordan",
            BuiltinParams::RotRefl(_) => "rot_refl",
        }
    }

    fn invalid(&self, reason: impl Into<String>) -> MapError {
        MapError::InvalidParameter {
            family: self.family_name().to_string(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self) -> Result<(), MapError> {
        match self {
            BuiltinParams::FLambdaCont { bits } | BuiltinParams::FLambdaSmooth { bits } => {
                if bits.is_empty() {
                    return Err(self.invalid("digit string must be nonempty"));
                }
                if !bits.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(self.invalid("digit string must be binary"));
                }
            }
            BuiltinParams::PolyFamily { i } if *i < 1 => {
                return Err(self.invalid("i must be at least 1"))
            }
            BuiltinParams::HwSimple { k } | BuiltinParams::HwSexed { k } if *k < 2 => {
                return Err(self.invalid("k must be at least 2"))
            }
            BuiltinParams::Jordan { blocks } if blocks.is_empty() => {
                return Err(self.invalid("block list must be nonempty"))
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for BuiltinParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "builtin:{}", self.family_name())?;
        match self {
            BuiltinParams::FLambdaCont { bits } | BuiltinParams::FLambdaSmooth { bits } => {
                write!(f, "?bits={bits}")
            }
            BuiltinParams::PolyFamily { i } => write!(f, "?i={i}"),
            BuiltinParams::ExpCollapse => Ok(()),
            BuiltinParams::HwSimple { k } | BuiltinParams::HwSexed { k } => write!(f, "?k={k}"),
            BuiltinParams::Jordan { blocks } => {
                let list: Vec<String> = blocks.iter().map(ToString::to_string).collect();
                write!(f, "?blocks={}", list.join(","))
            }
            BuiltinParams::RotRefl(RotRefl::Rotation { num, den }) => {
                write!(f, "?angle={num}/{den}")
            }
            BuiltinParams::RotRefl(RotRefl::Reflection) => write!(f, "?reflect=1"),
        }
    }
}

impl FromStr for BuiltinParams {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, MapError> {
        let body = s.trim().strip_prefix("builtin:").unwrap_or(s.trim());
        let (family, query) = body.split_once('?').unwrap_or((body, ""));
        let mut params: Vec<(&str, &str)> = Vec::new();
        for pair in query.split('&').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| MapError::InvalidParameter {
                    family: family.to_string(),
                    reason: format!("expected key=value, got `{pair}`"),
                })?;
            params.push((k, v));
        }
        let invalid = |reason: String| MapError::InvalidParameter {
            family: family.to_string(),
            reason,
        };
        let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let need = |key: &str| get(key).ok_or_else(|| invalid(format!("missing `{key}`")));
        let int = |key: &str| -> Result<usize, MapError> {
            need(key)?
                .parse()
                .map_err(|_| invalid(format!("`{key}` must be a non-negative integer")))
        };
        let out = match family {
            "f_lambda_cont" => BuiltinParams::FLambdaCont {
                bits: need("bits")?.to_string(),
            },
            "f_lambda_smooth" => BuiltinParams::FLambdaSmooth {
                bits: need("bits")?.to_string(),
            },
            "poly_family" => BuiltinParams::PolyFamily {
                i: u32::try_from(int("i")?).map_err(|_| invalid("i too large".into()))?,
            },
            "exp_collapse" => BuiltinParams::ExpCollapse,
            "hw_simple" => BuiltinParams::HwSimple { k: int("k")? },
            "hw_sexed" => BuiltinParams::HwSexed { k: int("k")? },
            "jordan" => BuiltinParams::Jordan {
                blocks: need("blocks")?
                    .split(',')
                    .map(JordanBlock::from_str)
                    .collect::<Result<_, _>>()
                    .map_err(invalid)?,
            },
            "rot_refl" => match (get("angle"), get("reflect")) {
                (Some(a), None) => {
                    let (n, d) = a.split_once('/').unwrap_or((a, "1"));
                    let num = n.parse().map_err(|_| invalid(format!("bad angle `{a}`")))?;
                    let den: i64 = d.parse().map_err(|_| invalid(format!("bad angle `{a}`")))?;
                    if den <= 0 {
                        return Err(invalid("angle denominator must be positive".into()));
                    }
                    BuiltinParams::RotRefl(RotRefl::Rotation { num, den })
                }
                (None, Some(_)) => BuiltinParams::RotRefl(RotRefl::Reflection),
                _ => return Err(invalid("give exactly one of `angle` or `reflect`".into())),
            },
            other => return Err(MapError::UnknownFamily(other.to_string())),
        };
        out.validate()?;
        Ok(out)
    }
}

/// Instantiates a built-in family member.
pub fn builtin_map(params: &BuiltinParams) -> Result<MapSpec, MapError> {
    params.validate()?;
    let (map, window) = match params {
        BuiltinParams::FLambdaCont { bits } => {
            let n = bits.len() as f64;
            (
                MapSpec::parse(&["x"], &[f_lambda_cont_text(bits)])?,
                Window::new(vec![[-1.0, n + 2.0]])?,
            )
        }
        BuiltinParams::FLambdaSmooth { bits } => {
            let hi = (bits.len() as f64 + 1.0).max(10.0);
            (
                MapSpec::parse(&["x"], &[f_lambda_smooth_text(bits)])?,
                Window::new(vec![[-10.0, hi]])?,
            )
        }
        BuiltinParams::PolyFamily { i } => {
            let mut text = String::from("x");
            for j in 1..=*i {
                text.push_str(&format!("*(({j} - y)/{j})"));
            }
            let r = f64::from(*i) + 2.0;
            (
                MapSpec::parse(&["x", "y"], &[text.as_str(), "0"])?,
                Window::cube(2, -r, r)?,
            )
        }
        BuiltinParams::ExpCollapse => (
            MapSpec::parse(&["x", "y"], &["piece(x <= 0 : 0 ; else : -exp(-1/x))", "0"])?,
            Window::cube(2, -5.0, 5.0)?,
        ),
        BuiltinParams::HwSimple { k } => {
            let (vars, comps) = hardy_weinberg::simple_texts(*k);
            let d = vars.len();
            (MapSpec::parse(&vars, &comps)?, Window::cube(d, 0.0, 1.0)?)
        }
        BuiltinParams::HwSexed { k } => {
            let (vars, comps) = hardy_weinberg::sexed_texts(*k);
            let d = vars.len();
            (MapSpec::parse(&vars, &comps)?, Window::cube(d, 0.0, 1.0)?)
        }
        BuiltinParams::Jordan { blocks } => {
            let m: usize = blocks.iter().map(|b| b.size()).sum();
            let matrix = jordan_matrix(blocks);
            (
                linear_map(&matrix, axis_names(m))?,
                Window::cube(m, -1.0, 1.0)?,
            )
        }
        BuiltinParams::RotRefl(kind) => {
            let matrix = match kind {
                RotRefl::Rotation { num, den } => {
                    let (c, s) = exact_trig(*num, *den);
                    vec![vec![c.clone(), neg(&s)], vec![s, c]]
                }
                RotRefl::Reflection => vec![
                    vec![Constant::integer(1), Constant::integer(0)],
                    vec![Constant::integer(0), Constant::integer(-1)],
                ],
            };
            (
                linear_map(&matrix, axis_names(2))?,
                Window::cube(2, -1.0, 1.0)?,
            )
        }
    };
    Ok(map.with_window(window)?.with_family(params.clone()))
}

fn f_lambda_cont_text(bits: &str) -> String {
    // node values: v(1) = 1, v(m+1) = m-th digit
    let mut values = vec![1u8];
    values.extend(bits.bytes().map(|b| b - b'0'));
    let last = *values.last().unwrap();
    let mut text = format!("{last}");
    for m in (1..=bits.len()).rev() {
        let (a, b) = (values[m - 1], values[m]);
        let seg = match (a, b) {
            (0, 0) => format!("2*(x - {m})*({} - x)", m + 1),
            (1, 1) => format!("1 - 2*(x - {m})*({} - x)", m + 1),
            (a, b) => format!("{a} + {}*(x - {m})", i32::from(b) - i32::from(a)),
        };
        text = format!("piece(x <= {} : {seg} ; else : {text})", m + 1);
    }
    format!("piece(x <= 0 : 0 ; else : piece(x <= 1 : x ; else : {text}))")
}

fn f_lambda_smooth_text(bits: &str) -> String {
    // node values: u(0) = 0, u(m) = -(m-th digit)
    let mut values = vec![0i32];
    values.extend(bits.bytes().map(|b| -i32::from(b - b'0')));
    let n = bits.len();
    let mut text = format!("{}", values[n]);
    for m in (0..n).rev() {
        let t = if m == 0 {
            "x".to_string()
        } else {
            format!("x - {m}")
        };
        let step = format!("(exp(-1/({t}))/(exp(-1/({t})) + exp(-1/({} - x))))", m + 1);
        let (a, b) = (values[m], values[m + 1]);
        let interior = match (a, b) {
            (0, 0) => format!("-2*{step}*(1 - {step})"),
            (-1, -1) => format!("-1 + 2*{step}*(1 - {step})"),
            (a, b) => format!("{a} + {}*{step}", b - a),
        };
        text = format!(
            "piece(x < {m1} : {interior} ; else : piece(x <= {m1} : {v} ; else : {text}))",
            m1 = m + 1,
            v = values[m + 1]
        );
    }
    format!("piece(x < -1 : -exp(1/(x + 1)) ; else : piece(x <= 0 : 0 ; else : {text}))")
}

pub(crate) fn axis_names(m: usize) -> Vars {
    match m {
        1 => vars_from(&["x"]),
        2 => vars_from(&["x", "y"]),
        3 => vars_from(&["x", "y", "z"]),
        _ => (1..=m).map(|i| format!("x{i}")).collect(),
    }
}

fn neg(c: &Constant) -> Constant {
    match c.exact() {
        Some(q) => Constant::rational(-q),
        None => Constant::float(-c.value()),
    }
}

/// `(cos, sin)` of `2π·num/den`, exact where the value is rational.
pub(crate) fn exact_trig(num: i64, den: i64) -> (Constant, Constant) {
    let r = num.rem_euclid(den);
    let q = |n: i64, d: i64| Constant::rational(BigRational::new(n.into(), d.into()));
    let angle = 2.0 * std::f64::consts::PI * r as f64 / den as f64;
    let float_sin = Constant::float(angle.sin());
    // reduce r/den to lowest terms
    let g = gcd(r, den);
    match (r / g, den / g) {
        (0, _) => (q(1, 1), q(0, 1)),
        (1, 4) => (q(0, 1), q(1, 1)),
        (1, 2) => (q(-1, 1), q(0, 1)),
        (3, 4) => (q(0, 1), q(-1, 1)),
        (1, 6) | (5, 6) => (q(1, 2), float_sin),
        (1, 3) | (2, 3) => (q(-1, 2), float_sin),
        _ => (Constant::float(angle.cos()), float_sin),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs().max(1)
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn jordan_matrix(blocks: &[JordanBlock]) -> Vec<Vec<Constant>> {
    let m: usize = blocks.iter().map(|b| b.size()).sum();
    let mut a = vec![vec![Constant::integer(0); m]; m];
    let mut at = 0;
    for block in blocks {
        match *block {
            JordanBlock::One => a[at][at] = Constant::integer(1),
            JordanBlock::MinusOne => a[at][at] = Constant::integer(-1),
            JordanBlock::Rotation { num, den } => {
                let (c, s) = exact_trig(num, den);
                a[at][at] = c.clone();
                a[at][at + 1] = neg(&s);
                a[at + 1][at] = s;
                a[at + 1][at + 1] = c;
            }
            JordanBlock::Nilpotent(l) => {
                for i in 0..l - 1 {
                    a[at + i][at + i + 1] = Constant::integer(1);
                }
            }
        }
        at += block.size();
    }
    a
}

/// The linear map `x ↦ A·x`.
pub fn linear_map(matrix: &[Vec<Constant>], vars: Vars) -> Result<MapSpec, MapError> {
    let m = vars.len();
    let comps = matrix
        .iter()
        .map(|row| {
            let mut acc = Expression::zero(Arc::clone(&vars));
            for (j, a) in row.iter().enumerate().take(m) {
                if a.is_zero() {
                    continue;
                }
                let x = Expression::var(j, Arc::clone(&vars)).expect("in range");
                let term = &Expression::constant(a.clone(), Arc::clone(&vars)) * &x;
                acc = &acc + &term;
            }
            acc
        })
        .collect();
    MapSpec::new(vars, comps)
}

/// Coordinates and allele frequencies of the Hardy-Weinberg models.
///
/// Genotype proportions `x_{i,j}` (i ≤ j, i < k) are ordered
/// `x1_1, x1_2, …, x1_k, x2_2, …, x(k-1)_k`; `x_{k,k}` is implied by the
/// affine constraint and never stored.
pub mod hardy_weinberg {
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    /// Index pairs `(i, j)`, 1-based, in coordinate order.
    pub fn pairs(k: usize) -> Vec<(usize, usize)> {
        (1..k).flat_map(|i| (i..=k).map(move |j| (i, j))).collect()
    }

    pub fn dimension(k: usize) -> usize {
        k * (k + 1) / 2 - 1
    }

    pub(crate) fn var_name(prefix: &str, i: usize, j: usize) -> String {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        format!("{prefix}{a}_{b}")
    }

    /// Text of `p_i` in the variables with the given prefix.
    pub(crate) fn allele_text(k: usize, i: usize, prefix: &str) -> String {
        if i == k {
            let rest: Vec<String> = (1..k)
                .map(|l| format!("({})", allele_text(k, l, prefix)))
                .collect();
            return format!("1 - {}", rest.join(" - "));
        }
        let mut parts = vec![var_name(prefix, i, i)];
        for j in (1..=k).filter(|&j| j != i) {
            parts.push(format!("{}/2", var_name(prefix, i, j)));
        }
        parts.join(" + ")
    }

    pub(crate) fn simple_texts(k: usize) -> (Vec<String>, Vec<String>) {
        let vars = pairs(k).iter().map(|&(i, j)| var_name("x", i, j)).collect();
        let comps = pairs(k)
            .iter()
            .map(|&(i, j)| {
                let (pi, pj) = (allele_text(k, i, "x"), allele_text(k, j, "x"));
                if i == j {
                    format!("({pi})^2")
                } else {
                    format!("2*({pi})*({pj})")
                }
            })
            .collect();
        (vars, comps)
    }

    pub(crate) fn sexed_texts(k: usize) -> (Vec<String>, Vec<String>) {
        let mut vars: Vec<String> = pairs(k)
            .iter()
            .map(|&(i, j)| var_name("xm", i, j))
            .collect();
        vars.extend(pairs(k).iter().map(|&(i, j)| var_name("xf", i, j)));
        let group: Vec<String> = pairs(k)
            .iter()
            .map(|&(i, j)| {
                let (mi, fi) = (allele_text(k, i, "xm"), allele_text(k, i, "xf"));
                if i == j {
                    format!("({mi})*({fi})")
                } else {
                    let (mj, fj) = (allele_text(k, j, "xm"), allele_text(k, j, "xf"));
                    format!("({mi})*({fj}) + ({mj})*({fi})")
                }
            })
            .collect();
        let mut comps = group.clone();
        comps.extend(group);
        (vars, comps)
    }

    /// Allele frequencies `(p_1, …, p_k)` of one group's coordinates.
    pub fn allele_frequencies(k: usize, x: &[f64]) -> Vec<f64> {
        let idx = |i: usize, j: usize| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            pairs(k).iter().position(|&p| p == (a, b))
        };
        let mut p: Vec<f64> = (1..k)
            .map(|i| {
                let mut s = x[idx(i, i).unwrap()];
                for j in (1..=k).filter(|&j| j != i) {
                    s += 0.5 * x[idx(i, j).unwrap()];
                }
                s
            })
            .collect();
        p.push(1.0 - p.iter().sum::<f64>());
        p
    }

    /// Exact version of [`allele_frequencies`].
    pub fn allele_frequencies_exact(k: usize, x: &[BigRational]) -> Vec<BigRational> {
        let pr = pairs(k);
        let half = BigRational::new(1.into(), 2.into());
        let idx = |i: usize, j: usize| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            pr.iter().position(|&p| p == (a, b)).unwrap()
        };
        let mut p: Vec<BigRational> = (1..k)
            .map(|i| {
                let mut s = x[idx(i, i)].clone();
                for j in (1..=k).filter(|&j| j != i) {
                    s += &half * &x[idx(i, j)];
                }
                s
            })
            .collect();
        let total = p.iter().fold(BigRational::zero(), |a, b| a + b);
        p.push(BigRational::one() - total);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::poly_canonical;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn build(s: &str) -> MapSpec {
        builtin_map(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn two_allele_map_matches_closed_form() {
        let f = build("builtin:hw_simple?k=2");
        let expected = MapSpec::parse(
            &["x1_1", "x1_2"],
            &["(x1_1 + x1_2/2)^2", "2*(x1_1 + x1_2/2)*(1 - x1_1 - x1_2/2)"],
        )
        .unwrap();
        for (a, b) in f.components().iter().zip(expected.components()) {
            assert_eq!(poly_canonical(a).unwrap(), poly_canonical(b).unwrap());
        }
        assert_eq!(f.apply(&[0.25, 0.5]).unwrap(), vec![0.25, 0.5]);
    }

    #[test]
    fn normalized_polynomial_family() {
        let f = build("builtin:poly_family?i=1");
        let expected = MapSpec::parse(&["x", "y"], &["x*(1-y)", "0"]).unwrap();
        assert_eq!(f.polynomials().unwrap(), expected.polynomials().unwrap());
        assert_eq!(f.apply(&[2.0, 3.0]).unwrap(), vec![-4.0, 0.0]);
        // p~_i(x, 0) = x for every i
        for i in 1..=4 {
            let g = build(&format!("builtin:poly_family?i={i}"));
            assert!((g.apply(&[1.7, 0.0]).unwrap()[0] - 1.7).abs() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_block_is_shift() {
        let f = build("builtin:jordan?blocks=N2");
        assert_eq!(f.apply(&[3.0, 5.0]).unwrap(), vec![5.0, 0.0]);
        assert_eq!(f.components()[1].to_string(), "0");
    }

    #[test]
    fn exp_collapse_values() {
        let f = build("builtin:exp_collapse");
        let v = f.apply(&[1.0, 7.0]).unwrap();
        assert!((v[0] + (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn sexed_counterexample_one_step() {
        let f = build("builtin:hw_sexed?k=2");
        let x = [q(1, 2), q(1, 2), q(1, 3), q(2, 3)];
        let once = f.iterate_exact(&x, 1).unwrap();
        assert_eq!(once, vec![q(1, 2), q(5, 12), q(1, 2), q(5, 12)]);
        let twice = f.iterate_exact(&x, 2).unwrap();
        assert_eq!(
            twice,
            vec![q(289, 576), q(238, 576), q(289, 576), q(238, 576)]
        );
    }

    #[test]
    fn continuous_family_nodes() {
        let f = build("builtin:f_lambda_cont?bits=1100");
        let at = |x: f64| f.apply(&[x]).unwrap()[0];
        assert_eq!(at(-3.0), 0.0);
        assert_eq!(at(0.5), 0.5);
        assert_eq!(at(1.0), 1.0);
        assert_eq!(at(2.0), 1.0);
        assert_eq!(at(3.0), 1.0);
        assert_eq!(at(4.0), 0.0);
        assert_eq!(at(5.0), 0.0);
        assert_eq!(at(2.5), 0.5); // 1,1 bump dips to 1/2
        assert_eq!(at(4.5), 0.5); // 0,0 bump rises to 1/2
        assert_eq!(at(3.5), 0.5); // line from 1 to 0
        assert_eq!(f.window().unwrap().axes(), &[[-1.0, 6.0]]);
    }

    #[test]
    fn smooth_family_nodes() {
        let f = build("builtin:f_lambda_smooth?bits=101");
        let at = |x: f64| f.apply(&[x]).unwrap()[0];
        assert_eq!(at(-0.5), 0.0);
        assert_eq!(at(-1.0), 0.0);
        assert_eq!(at(1.0), -1.0);
        assert_eq!(at(2.0), 0.0);
        assert_eq!(at(3.0), -1.0);
        assert!((at(-2.0) + (-1.0f64).exp()).abs() < 1e-15);
        assert!(at(-1e6) > -1.0 && at(-1e6) < -0.99);
        assert!((at(0.5) + 0.5).abs() < 1e-12);
        assert!(at(1.5) > -1.0 && at(1.5) < 0.0);
        // flat joins
        assert!((at(1.0 + 1e-3) + 1.0).abs() < 1e-100);
        assert!(at(-1.0 - 1e-3).abs() < 1e-100);
    }

    #[test]
    fn params_round_trip_through_strings() {
        for s in [
            "builtin:f_lambda_cont?bits=1101",
            "builtin:hw_simple?k=3",
            "builtin:jordan?blocks=N2,R1/3,-1,1",
            "builtin:rot_refl?angle=1/3",
            "builtin:rot_refl?reflect=1",
            "builtin:exp_collapse",
        ] {
            let p: BuiltinParams = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(matches!(
            "builtin:nope".parse::<BuiltinParams>(),
            Err(MapError::UnknownFamily(_))
        ));
        for bad in [
            "builtin:hw_simple?k=1",
            "builtin:f_lambda_cont?bits=",
            "builtin:f_lambda_cont?bits=102",
            "builtin:poly_family?i=0",
            "builtin:jordan?blocks=Q3",
            "builtin:rot_refl",
        ] {
            assert!(
                matches!(
                    bad.parse::<BuiltinParams>(),
                    Err(MapError::InvalidParameter { .. })
                ),
                "{bad}"
            );
        }
    }

    #[test]
    fn hardy_weinberg_dimensions() {
        for k in 2..=4 {
            let f = build(&format!("builtin:hw_simple?k={k}"));
            assert_eq!(f.dim(), hardy_weinberg::dimension(k));
            let g = build(&format!("builtin:hw_sexed?k={k}"));
            assert_eq!(g.dim(), 2 * hardy_weinberg::dimension(k));
        }
    }

    #[test]
    fn rotation_entries_exact_where_rational() {
        let (c, s) = exact_trig(1, 4);
        assert_eq!(
            (c.exact().cloned(), s.exact().cloned()),
            (Some(q(0, 1)), Some(q(1, 1)))
        );
        let (c, s) = exact_trig(1, 3);
        assert_eq!(c.exact().cloned(), Some(q(-1, 2)));
        assert!((s.value() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let f = build("builtin:rot_refl?reflect=1");
        assert_eq!(f.apply(&[2.0, 3.0]).unwrap(), vec![2.0, -3.0]);
    }
}
