//! Serde-facing configuration and result types: the JSON surface shared by
//! the command-line tool and any other embedding.
//!
//! A configuration is a single document holding a module, an optional place
//! model, an optional start element, and engine overrides:
//!
//! ```json
//! {
//!   "module": { "q": 2, "coeffs": ["0", "1/t", "1"] },
//!   "place": {
//!     "kind": { "finite": "t" },
//!     "e": 3, "f": 1, "ext": 3,
//!     "t_image": { "pi_rational": {
//!       "num": { "v_min": 3, "coeffs": [1] },
//!       "den": { "v_min": 0, "coeffs": [1, 0, 1] } } }
//!   },
//!   "element": { "pi_rational": {
//!     "num": { "v_min": 2, "coeffs": [1] },
//!     "den": { "v_min": 0, "coeffs": [1, 0, 1] } } },
//!   "prec": 64
//! }
//! ```
//!
//! Polynomials and rational functions are written in the variable t with
//! integer coefficients ("t^3 + 2*t + 1", "(t + 1)/(t^2 + t + 1)"); over a
//! non-prime base field a coefficient can also be a bracketed coordinate
//! vector over the prime field ("[1,1]*t + [0,1]"). Series coefficients are
//! residue-field elements, written as integers or coordinate vectors.
//!
//! Results serialize with every rational rendered as a "numer/denom"
//! string, trajectories as arrays of {n, v, ac} with the angular component
//! in residue-field coordinates, and the L2' certificate named "L2-prime".

use std::sync::Arc;

use num::{BigRational, One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{prime_power, FFElem, FiniteField};
use crate::heights::{
    check_assembled_bound, check_experimental_bound, check_floor_bound, check_unramified_bound,
    default_budget, BoundCheck, Certificate, ElementSpec, EngineOptions, ExceptionSets,
    GlobalHeightReport, LocalHeightReport, MultiplierReport, PlaceLabel, Thresholds,
    TrajectoryStep,
};
use crate::lab::{E1Report, E2Report, TrialSummary};
use crate::local::{LocalElement, PlaceKind, PlaceModel, TImageSpec};
use crate::poly::{FqPoly, RationalFun};
use crate::twisted::{DrinfeldModule, LocalizedModule};

/// Top-level configuration document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub module: ModuleConfig,
    #[serde(default)]
    pub place: Option<PlaceConfig>,
    #[serde(default)]
    pub element: Option<ElementConfig>,
    /// Starting absolute precision of the engine.
    #[serde(default)]
    pub prec: Option<i64>,
    /// Ceiling for precision escalation.
    #[serde(default)]
    pub max_prec: Option<i64>,
    /// Step-budget override.
    #[serde(default)]
    pub budget: Option<u32>,
}

impl RunConfig {
    /// Engine options with the configured overrides applied over the
    /// defaults.
    pub fn engine_options(&self) -> EngineOptions {
        let mut opts = EngineOptions::default();
        if let Some(p) = self.prec {
            opts.start_prec = p;
        }
        if let Some(m) = self.max_prec {
            opts.max_prec = m;
        }
        if let Some(b) = self.budget {
            opts.budget = Some(b);
        }
        opts
    }
}

/// The Drinfeld module: base field size and the coefficients a_0 ... a_r of
/// phi_t as rational functions in t.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleConfig {
    /// Base field size, a prime power.
    pub q: u64,
    pub coeffs: Vec<String>,
}

impl ModuleConfig {
    /// Build the module, parsing each coefficient.
    pub fn build(&self) -> Result<DrinfeldModule> {
        let (p, e) = prime_power(self.q)?;
        let base = FiniteField::extension(p, e)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| parse_rational(&base, s))
            .collect::<Result<Vec<RationalFun>>>()?;
        DrinfeldModule::new(base, coeffs)
    }
}

/// The underlying place of F_q(t): a monic irreducible polynomial in t, or
/// the place at infinity.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PlaceKindConfig {
    Infinity,
    Finite(String),
}

/// How the image of t in the completion is written.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TImageConfig {
    /// Derive the image: pi^(-e) at infinity, a Newton lift at an
    /// unramified finite place.
    Auto,
    /// t = num/den for exact Laurent polynomials in pi.
    PiRational { num: SeriesConfig, den: SeriesConfig },
    /// A literal truncated series.
    Literal(SeriesConfig),
}

/// A place model of an extension L of K = F_q(t): the underlying place, the
/// ramification index e, the residue degree f, the global degree [L:K]
/// (defaulting to e f), and the image of t.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceConfig {
    pub kind: PlaceKindConfig,
    #[serde(default = "default_degree_one")]
    pub e: u32,
    #[serde(default = "default_degree_one")]
    pub f: u32,
    #[serde(default)]
    pub ext: Option<u32>,
    #[serde(default)]
    pub t_image: Option<TImageConfig>,
}

fn default_degree_one() -> u32 {
    1
}

impl PlaceConfig {
    /// Build the model over the given base field. The residue field is the
    /// canonical extension of degree deg(v_0) f over the base, and the
    /// series of a pi_rational or literal t-image live in it.
    pub fn build(&self, base: &Arc<FiniteField>) -> Result<PlaceModel> {
        let kind = match &self.kind {
            PlaceKindConfig::Infinity => PlaceKind::Infinity,
            PlaceKindConfig::Finite(s) => PlaceKind::Finite(parse_poly(base, s)?),
        };
        let deg = match &kind {
            PlaceKind::Finite(rho) => rho.degree().ok_or_else(|| {
                Error::Invalid("the place polynomial must be nonzero".into())
            })? as u32,
            PlaceKind::Infinity => 1,
        };
        let ext = self.ext.unwrap_or(self.e * self.f);
        let kv = FiniteField::extension(base.p(), base.e() * deg * self.f)?;
        let t_spec = match &self.t_image {
            None | Some(TImageConfig::Auto) => TImageSpec::Auto,
            Some(TImageConfig::PiRational { num, den }) => TImageSpec::PiRational {
                num: num.build(&kv)?,
                den: den.build(&kv)?,
            },
            Some(TImageConfig::Literal(series)) => TImageSpec::Literal(series.build(&kv)?),
        };
        PlaceModel::new(base.clone(), kind, self.e, self.f, ext, t_spec)
    }
}

/// A Laurent series in the uniformizer: coefficients from v_min upward,
/// exact unless a finite precision is given.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub v_min: i64,
    pub coeffs: Vec<CoeffConfig>,
    #[serde(default)]
    pub prec: Option<i64>,
}

impl SeriesConfig {
    /// Build the series over the given residue field.
    pub fn build(&self, kv: &Arc<FiniteField>) -> Result<LocalElement> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.build(kv))
            .collect::<Result<Vec<FFElem>>>()?;
        let x = LocalElement::exact(kv.clone(), self.v_min, coeffs);
        Ok(match self.prec {
            Some(n) => x.truncated(n),
            None => x,
        })
    }
}

/// A residue-field element: an integer (mapped through the prime subfield)
/// or a coordinate vector over the prime field.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CoeffConfig {
    Int(i64),
    Coords(Vec<u64>),
}

impl CoeffConfig {
    /// Build the element in the given field.
    pub fn build(&self, kv: &Arc<FiniteField>) -> Result<FFElem> {
        match self {
            CoeffConfig::Int(n) => Ok(kv.from_int(*n)),
            CoeffConfig::Coords(c) => kv.from_coords(c),
        }
    }
}

/// The start element of a height computation.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementConfig {
    /// A rational function of t over the base field.
    Rational(String),
    /// An exact ratio of Laurent polynomials in the uniformizer.
    PiRational { num: SeriesConfig, den: SeriesConfig },
    /// A literal truncated series in the uniformizer.
    Series(SeriesConfig),
}

impl ElementConfig {
    /// Build the element; series forms live in the residue field of the
    /// model.
    pub fn build(&self, base: &Arc<FiniteField>, model: &PlaceModel) -> Result<ElementSpec> {
        match self {
            ElementConfig::Rational(s) => Ok(ElementSpec::Rational(parse_rational(base, s)?)),
            ElementConfig::PiRational { num, den } => Ok(ElementSpec::PiRational {
                num: num.build(model.residue())?,
                den: den.build(model.residue())?,
            }),
            ElementConfig::Series(series) => {
                Ok(ElementSpec::Literal(series.build(model.residue())?))
            }
        }
    }

    /// The rational-function form, required by global heights.
    pub fn build_rational(&self, base: &Arc<FiniteField>) -> Result<RationalFun> {
        match self {
            ElementConfig::Rational(s) => parse_rational(base, s),
            _ => Err(Error::Invalid(
                "a global height needs the element as a rational function in t".into(),
            )),
        }
    }
}

/// Split at top-level occurrences of sep, ignoring separators inside
/// brackets or parentheses.
fn split_top_level(s: &str, sep: char) -> Result<Vec<String>> {
    let mut parts = vec![String::new()];
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Invalid(format!("unbalanced brackets in \"{s}\"")));
        }
        if ch == sep && depth == 0 {
            parts.push(String::new());
        } else {
            parts.last_mut().expect("nonempty").push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Invalid(format!("unbalanced brackets in \"{s}\"")));
    }
    Ok(parts)
}

/// Strip parentheses that enclose the whole expression.
fn strip_outer_parens(s: &str) -> &str {
    let mut s = s;
    'outer: while s.len() >= 2 && s.starts_with('(') && s.ends_with(')') {
        let mut depth = 0i32;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth == 0 && i + 1 < s.len() {
                break 'outer;
            }
        }
        s = &s[1..s.len() - 1];
    }
    s
}

/// Parse a polynomial in t over the given field: a sum of terms, each an
/// integer or bracketed coordinate-vector coefficient, a power of t, or a
/// product of the two ("t^3 + 2*t + 1", "[1,1]*t^2 + [0,1]").
pub fn parse_poly(field: &Arc<FiniteField>, input: &str) -> Result<FqPoly> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    parse_poly_compact(field, &compact)
}

fn parse_poly_compact(field: &Arc<FiniteField>, compact: &str) -> Result<FqPoly> {
    let s = strip_outer_parens(compact);
    if s.is_empty() {
        return Err(Error::Invalid("empty polynomial".into()));
    }
    let mut acc = FqPoly::zero(field.clone());
    let mut term = String::new();
    let mut negative = false;
    let mut depth = 0i32;
    let flush = |term: &mut String, negative: bool, acc: &mut FqPoly| -> Result<()> {
        let parsed = parse_term(field, term)?;
        *acc = acc.add(&if negative { parsed.neg() } else { parsed });
        term.clear();
        Ok(())
    };
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 {
            if i == 0 {
                negative = ch == '-';
                continue;
            }
            if term.is_empty() {
                return Err(Error::Invalid(format!(
                    "misplaced sign in polynomial \"{s}\""
                )));
            }
            flush(&mut term, negative, &mut acc)?;
            negative = ch == '-';
        } else {
            term.push(ch);
        }
    }
    if term.is_empty() {
        return Err(Error::Invalid(format!(
            "polynomial \"{s}\" ends in an operator"
        )));
    }
    flush(&mut term, negative, &mut acc)?;
    Ok(acc)
}

fn parse_term(field: &Arc<FiniteField>, term: &str) -> Result<FqPoly> {
    let (coeff_str, power) = match term.find('t') {
        None => (term, 0usize),
        Some(pos) => {
            let before = &term[..pos];
            let after = &term[pos + 1..];
            let power = if after.is_empty() {
                1usize
            } else {
                let exp = after.strip_prefix('^').ok_or_else(|| {
                    Error::Invalid(format!("malformed term \"{term}\""))
                })?;
                let k: usize = exp
                    .parse()
                    .map_err(|_| Error::Invalid(format!("malformed exponent in \"{term}\"")))?;
                if k > 1 << 14 {
                    return Err(Error::Invalid(format!(
                        "exponent {k} in \"{term}\" is out of range"
                    )));
                }
                k
            };
            let coeff_str = match before.strip_suffix('*') {
                Some(rest) if rest.is_empty() => {
                    return Err(Error::Invalid(format!("malformed term \"{term}\"")));
                }
                Some(rest) => rest,
                None => before,
            };
            (coeff_str, power)
        }
    };
    let c = if coeff_str.is_empty() {
        field.one()
    } else {
        parse_coeff(field, coeff_str)?
    };
    let mut coeffs = vec![field.zero(); power];
    coeffs.push(c);
    Ok(FqPoly::from_coeffs(field.clone(), coeffs))
}

fn parse_coeff(field: &Arc<FiniteField>, s: &str) -> Result<FFElem> {
    if let Some(inner) = s.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::Invalid(format!("malformed coefficient \"{s}\"")))?;
        let coords = inner
            .split(',')
            .map(|part| {
                part.parse::<u64>()
                    .map_err(|_| Error::Invalid(format!("malformed coefficient \"{s}\"")))
            })
            .collect::<Result<Vec<u64>>>()?;
        return field.from_coords(&coords);
    }
    let n: i64 = s
        .parse()
        .map_err(|_| Error::Invalid(format!("malformed coefficient \"{s}\"")))?;
    Ok(field.from_int(n))
}

/// Parse a rational function in t: a polynomial, or two polynomials
/// separated by a single top-level "/".
pub fn parse_rational(field: &Arc<FiniteField>, input: &str) -> Result<RationalFun> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Invalid("empty rational function".into()));
    }
    let parts = split_top_level(&compact, '/')?;
    match parts.as_slice() {
        [num] => Ok(RationalFun::from_poly(parse_poly_compact(field, num)?)),
        [num, den] => RationalFun::new(
            parse_poly_compact(field, num)?,
            parse_poly_compact(field, den)?,
        ),
        _ => Err(Error::Invalid(format!(
            "\"{input}\" has more than one top-level \"/\""
        ))),
    }
}

/// Exact rational rendered as "numer/denom", or just the numerator for
/// integers.
pub fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Structured-output name of a certificate kind; the L2' certificate prints
/// as "L2-prime".
pub fn certificate_name(c: &Certificate) -> String {
    match c.kind() {
        "L2'" => "L2-prime".to_string(),
        other => other.to_string(),
    }
}

fn place_string(kind: &PlaceKind) -> String {
    match kind {
        PlaceKind::Finite(rho) => format!("({rho})"),
        PlaceKind::Infinity => "infinity".to_string(),
    }
}

/// One trajectory step: the valuation (null once the orbit is exactly
/// zero) and the angular component in residue-field coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct StepOut {
    pub n: u32,
    pub v: Option<i64>,
    pub ac: Option<Vec<u64>>,
}

impl StepOut {
    fn from_step(step: &TrajectoryStep) -> StepOut {
        StepOut {
            n: step.n,
            v: step.v,
            ac: step.ac.as_ref().map(|a| a.coords().to_vec()),
        }
    }
}

/// A checked lower bound, with both sides of the powered inequality.
#[derive(Clone, Debug, Serialize)]
pub struct BoundOut {
    pub label: String,
    pub holds: bool,
    pub lhs: String,
    pub rhs: String,
    /// The plain bound value when no root extraction is needed.
    pub bound: Option<String>,
}

impl BoundOut {
    fn from_check(check: &BoundCheck) -> BoundOut {
        BoundOut {
            label: check.label.clone(),
            holds: check.holds,
            lhs: rational_string(&check.lhs),
            rhs: rational_string(&check.rhs),
            bound: check.bound_value.as_ref().map(rational_string),
        }
    }
}

/// The modeled place in an output report.
#[derive(Clone, Debug, Serialize)]
pub struct PlaceOut {
    pub place: String,
    pub deg: u32,
    pub e: u32,
    pub f: u32,
    pub ext: u32,
}

impl PlaceOut {
    fn from_model(model: &PlaceModel) -> PlaceOut {
        PlaceOut {
            place: place_string(model.kind()),
            deg: model.deg_v0(),
            e: model.e_ram(),
            f: model.f_res(),
            ext: model.ext_degree(),
        }
    }
}

/// The lower-bound checks that apply to a certified positive value:
/// the assembled bound under tame ramification, its unramified form when
/// e = 1, the prompt-certificate bound, and the 1/d floor outside S.
pub fn applicable_bounds(report: &LocalHeightReport, model: &PlaceModel, p: u64) -> Vec<BoundOut> {
    let Some(h) = &report.value else {
        return Vec::new();
    };
    if !h.is_positive() {
        return Vec::new();
    }
    let thr = &report.thresholds;
    let exc = &report.exceptions;
    let q = thr.q;
    let e = model.e_ram();
    let d = model.ext_degree();
    let tame = e as u64 % p != 0;
    let mut out = Vec::new();
    if tame {
        out.push(BoundOut::from_check(&check_assembled_bound(
            h,
            q,
            thr.r,
            thr.r0,
            exc.z as u32,
            exc.f_cap,
            thr.c_v0,
            e,
            d,
        )));
    }
    if e == 1 {
        out.push(BoundOut::from_check(&check_unramified_bound(
            h,
            q,
            thr.r,
            thr.r0,
            exc.z as u32,
            exc.f_cap,
            thr.c_v0,
            d,
        )));
    }
    if tame && thr.r0 >= 1 {
        if let Some(Certificate::L2Prime { step }) = &report.certificate {
            if *step <= thr.m_steps + 1 {
                out.push(BoundOut::from_check(&check_experimental_bound(
                    h, q, thr.r, thr.r0, thr.c_v0, e, d,
                )));
            }
        }
    }
    if !thr.in_s {
        out.push(BoundOut::from_check(&check_floor_bound(h, d)));
    }
    out
}

/// Result of a local height computation.
#[derive(Clone, Debug, Serialize)]
pub struct LocalHeightOut {
    /// Exact value as "numer/denom"; null when undecided.
    pub value: Option<String>,
    pub certificate: Option<String>,
    pub certificate_detail: Option<String>,
    pub undecided_reason: Option<String>,
    pub place: PlaceOut,
    pub in_s: bool,
    pub trajectory: Vec<StepOut>,
    pub bounds: Vec<BoundOut>,
    pub budget: u32,
    pub precision_used: i64,
    pub escalations: u32,
}

impl LocalHeightOut {
    /// Assemble the output report; p is the base characteristic, used to
    /// decide which lower bounds apply.
    pub fn from_report(report: &LocalHeightReport, model: &PlaceModel, p: u64) -> LocalHeightOut {
        LocalHeightOut {
            value: report.value.as_ref().map(rational_string),
            certificate: report.certificate.as_ref().map(certificate_name),
            certificate_detail: report.certificate.as_ref().map(|c| c.to_string()),
            undecided_reason: report.undecided_reason.clone(),
            place: PlaceOut::from_model(model),
            in_s: report.thresholds.in_s,
            trajectory: report.trajectory.iter().map(StepOut::from_step).collect(),
            bounds: applicable_bounds(report, model, p),
            budget: report.budget,
            precision_used: report.precision_used,
            escalations: report.escalations,
        }
    }
}

/// One place of a global breakdown.
#[derive(Clone, Debug, Serialize)]
pub struct GlobalPlaceOut {
    pub place: String,
    pub deg: u32,
    pub e: u32,
    pub f: u32,
    pub value: Option<String>,
    pub certificate: Option<String>,
    pub undecided_reason: Option<String>,
}

/// Scaling cross-check attached to a global report.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingOut {
    /// Global height of phi_t(x).
    pub image_height: String,
    /// q^r times the global height of x.
    pub scaled_height: String,
    pub holds: bool,
}

/// Result of a global height computation: the per-place breakdown over the
/// candidate support and the total.
#[derive(Clone, Debug, Serialize)]
pub struct GlobalHeightOut {
    pub total: Option<String>,
    pub places: Vec<GlobalPlaceOut>,
    pub scaling: Option<ScalingOut>,
}

impl GlobalHeightOut {
    /// Assemble the output report; global models are unramified of degree
    /// one, so e = f = 1 at every listed place.
    pub fn from_report(report: &GlobalHeightReport) -> GlobalHeightOut {
        let places = report
            .locals
            .iter()
            .map(|(label, local)| GlobalPlaceOut {
                place: label.to_string(),
                deg: match label {
                    PlaceLabel::Finite(rho) => rho.degree().unwrap_or(0) as u32,
                    PlaceLabel::Infinity => 1,
                },
                e: 1,
                f: 1,
                value: local.value.as_ref().map(rational_string),
                certificate: local.certificate.as_ref().map(certificate_name),
                undecided_reason: local.undecided_reason.clone(),
            })
            .collect();
        GlobalHeightOut {
            total: report.total.as_ref().map(rational_string),
            places,
            scaling: None,
        }
    }
}

/// Result of a verification suite.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyOut {
    pub suite: String,
    pub trials: u32,
    pub passes: u32,
    /// First few failure descriptions.
    pub failures: Vec<String>,
}

impl VerifyOut {
    /// Copy a trial summary into its output form.
    pub fn from_summary(summary: &TrialSummary) -> VerifyOut {
        VerifyOut {
            suite: summary.suite.clone(),
            trials: summary.trials,
            passes: summary.passes,
            failures: summary.failures.clone(),
        }
    }
}

/// One cell of the deep ramified example grid.
#[derive(Clone, Debug, Serialize)]
pub struct E1Out {
    pub q: u64,
    pub r: u32,
    pub r0: u32,
    pub m: u32,
    pub d: u32,
    pub value: String,
    pub closed_form: Option<String>,
    /// value * d^(r/r0) when r0 divides r.
    pub ratio: Option<String>,
    pub in_s: bool,
    pub certificate: String,
    pub trajectory: Vec<Option<i64>>,
    pub newton_agrees: Option<bool>,
}

impl E1Out {
    /// Copy a report into its output form.
    pub fn from_report(rep: &E1Report) -> E1Out {
        E1Out {
            q: rep.q,
            r: rep.r,
            r0: rep.r0,
            m: rep.m,
            d: rep.d,
            value: rational_string(&rep.value),
            closed_form: rep.closed_form.as_ref().map(rational_string),
            ratio: rep.ratio.as_ref().map(rational_string),
            in_s: rep.in_s,
            certificate: rep.certificate.clone(),
            trajectory: rep.trajectory.clone(),
            newton_agrees: rep.newton_agrees,
        }
    }
}

/// One cell of the Carlitz tail example grid.
#[derive(Clone, Debug, Serialize)]
pub struct E2Out {
    pub p: u64,
    pub d: u32,
    pub n: u32,
    pub value: String,
    pub formula: String,
    pub trajectory: Vec<Option<i64>>,
}

impl E2Out {
    /// Copy a report into its output form.
    pub fn from_report(rep: &E2Report) -> E2Out {
        E2Out {
            p: rep.p,
            d: rep.d,
            n: rep.n,
            value: rational_string(&rep.value),
            formula: rational_string(&rep.formula),
            trajectory: rep.trajectory.clone(),
        }
    }
}

/// Result of an escape-multiplier search.
#[derive(Clone, Debug, Serialize)]
pub struct EscapeOut {
    /// The multiplier polynomial.
    pub b: String,
    /// Valuation of phi_b(x).
    pub v: i64,
    /// Angular component of phi_b(x) in residue coordinates.
    pub ac: Vec<u64>,
    pub degree_cap: u32,
    pub z: usize,
    pub f_cap: u32,
}

impl EscapeOut {
    /// Copy a report into its output form.
    pub fn from_report(rep: &MultiplierReport) -> EscapeOut {
        EscapeOut {
            b: rep.b.to_string(),
            v: rep.v,
            ac: rep.ac.coords().to_vec(),
            degree_cap: rep.degree_cap,
            z: rep.exceptions.z,
            f_cap: rep.exceptions.f_cap,
        }
    }
}

/// Valuation thresholds and exception sets of a module at a place.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdsOut {
    pub q: u64,
    pub r: u32,
    pub r0: u32,
    /// Valuations of the local coefficients; null entries are zero
    /// coefficients.
    pub v_coeffs: Vec<Option<i64>>,
    /// M_v; null is +infinity.
    pub m_v: Option<String>,
    pub n_v: String,
    pub in_s: bool,
    pub c_v0: i64,
    pub m_steps: u32,
    pub l_lcm: u64,
    /// All exceptional valuations, sorted.
    pub p_all: Vec<String>,
    pub z: usize,
    pub f_cap: u32,
    /// Derived step budget.
    pub budget: u32,
}

impl ThresholdsOut {
    /// Assemble the output report from the localized data.
    pub fn from_parts(
        loc: &LocalizedModule,
        thr: &Thresholds,
        exc: &ExceptionSets,
    ) -> ThresholdsOut {
        ThresholdsOut {
            q: thr.q,
            r: thr.r,
            r0: thr.r0,
            v_coeffs: loc.v_coeffs().to_vec(),
            m_v: thr.m_v.as_ref().map(rational_string),
            n_v: rational_string(&thr.n_v),
            in_s: thr.in_s,
            c_v0: thr.c_v0,
            m_steps: thr.m_steps,
            l_lcm: thr.l_lcm,
            p_all: exc.p_all.iter().map(rational_string).collect(),
            z: exc.z,
            f_cap: exc.f_cap,
            budget: default_budget(thr, exc),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::local_height;
    use num::BigInt;

    fn f2() -> Arc<FiniteField> {
        FiniteField::prime(2).unwrap()
    }

    fn f3() -> Arc<FiniteField> {
        FiniteField::prime(3).unwrap()
    }

    #[test]
    fn polynomials_parse_back_to_their_display_form() {
        let base = f3();
        for s in ["0", "1", "t", "t^2 + 2*t + 1", "2*t^5 + t^3 + 2"] {
            let p = parse_poly(&base, s).unwrap();
            assert_eq!(format!("{p}"), s, "round trip of {s}");
        }
    }

    #[test]
    fn term_signs_fold_into_the_field() {
        let base = f3();
        let p = parse_poly(&base, "-t + 1").unwrap();
        assert_eq!(format!("{p}"), "2*t + 1", "minus t is 2t over F_3");
        let q = parse_poly(&base, "t - t").unwrap();
        assert!(q.is_zero(), "t - t must cancel");
    }

    #[test]
    fn coordinate_coefficients_parse_over_extension_fields() {
        let base = FiniteField::extension(2, 2).unwrap();
        let p = parse_poly(&base, "[1,1]*t^2 + [0,1]").unwrap();
        assert_eq!(p.degree(), Some(2), "degree of the parsed polynomial");
        assert_eq!(p.coeff(2).coords(), &[1, 1], "leading coordinates");
        assert_eq!(p.coeff(0).coords(), &[0, 1], "constant coordinates");
    }

    #[test]
    fn rational_functions_parse_and_reduce() {
        let base = f2();
        let x = parse_rational(&base, "1/t").unwrap();
        assert_eq!(format!("{x}"), "(1) / (t)", "simple pole at t");
        let y = parse_rational(&base, "(t^2 + t) / (t)").unwrap();
        assert!(y.is_polynomial(), "common factor t must cancel");
        assert_eq!(format!("{}", y.num()), "t + 1", "reduced numerator");
    }

    #[test]
    fn malformed_expressions_are_rejected() {
        let base = f2();
        for s in ["", "t^", "1 + + t", "t + ", "1/0", "1/t/t", "[1,2", "t^-1", "(t"] {
            assert!(
                parse_rational(&base, s).is_err(),
                "\"{s}\" must not parse"
            );
        }
    }

    #[test]
    fn rationals_render_without_unit_denominators() {
        let five = BigRational::new(BigInt::from(5), BigInt::from(192));
        assert_eq!(rational_string(&five), "5/192");
        let one = BigRational::from_integer(BigInt::from(1));
        assert_eq!(rational_string(&one), "1");
        let zero = BigRational::from_integer(BigInt::from(0));
        assert_eq!(rational_string(&zero), "0");
    }

    #[test]
    fn the_prime_certificate_renames_cleanly() {
        assert_eq!(
            certificate_name(&Certificate::L2Prime { step: 3 }),
            "L2-prime"
        );
        assert_eq!(certificate_name(&Certificate::L11 { step: 1 }), "L11");
    }

    #[test]
    fn a_carlitz_document_runs_end_to_end() {
        let doc = r#"{
            "module": { "q": 3, "coeffs": ["t", "1"] },
            "place": { "kind": "infinity" },
            "element": { "rational": "1/t" }
        }"#;
        let config: RunConfig = serde_json::from_str(doc).unwrap();
        let module = config.module.build().unwrap();
        let model = config.place.as_ref().unwrap().build(module.base()).unwrap();
        let x = config
            .element
            .as_ref()
            .unwrap()
            .build(module.base(), &model)
            .unwrap();
        let report = local_height(&module, &model, &x, &config.engine_options()).unwrap();
        let out = LocalHeightOut::from_report(&report, &model, module.base().p());
        assert_eq!(out.value.as_deref(), Some("1/9"), "Carlitz tail value");
        assert_eq!(
            out.certificate.as_deref(),
            Some("L2-prime"),
            "certificate name"
        );
        assert_eq!(out.place.place, "infinity", "place label");
    }

    #[test]
    fn a_ramified_series_document_builds_the_exact_model() {
        let doc = r#"{
            "module": { "q": 2, "coeffs": ["0", "1/t", "1"] },
            "place": {
                "kind": { "finite": "t" },
                "e": 3, "f": 1, "ext": 3,
                "t_image": { "pi_rational": {
                    "num": { "v_min": 3, "coeffs": [1] },
                    "den": { "v_min": 0, "coeffs": [1, 0, 1] } } }
            },
            "element": { "pi_rational": {
                "num": { "v_min": 2, "coeffs": [1] },
                "den": { "v_min": 0, "coeffs": [1, 0, 1] } } }
        }"#;
        let config: RunConfig = serde_json::from_str(doc).unwrap();
        let module = config.module.build().unwrap();
        let model = config.place.as_ref().unwrap().build(module.base()).unwrap();
        assert_eq!(model.e_ram(), 3, "total ramification");
        let x = config
            .element
            .as_ref()
            .unwrap()
            .build(module.base(), &model)
            .unwrap();
        let report = local_height(&module, &model, &x, &config.engine_options()).unwrap();
        let out = LocalHeightOut::from_report(&report, &model, module.base().p());
        assert_eq!(out.value.as_deref(), Some("5/192"), "deep point value");
        assert!(
            !out.bounds.is_empty(),
            "a certified positive value carries bound checks"
        );
        assert!(
            out.bounds.iter().all(|b| b.holds),
            "every applicable bound holds"
        );
    }

    #[test]
    fn unknown_configuration_keys_are_rejected() {
        let doc = r#"{ "module": { "q": 3, "coeffs": ["t", "1"], "rank": 1 } }"#;
        assert!(
            serde_json::from_str::<RunConfig>(doc).is_err(),
            "unknown keys must fail loudly"
        );
    }
}
