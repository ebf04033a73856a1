//! Canonical local and global heights of Drinfeld modules, with termination
//! certificates.
//!
//! The local height at a place v is computed by iterating the monic local
//! model y -> sum C_i y^(q^i) and watching the valuation trajectory. Exact
//! integer thresholds computed from the coefficient valuations decide
//! termination:
//!
//! - once the valuation falls strictly below min(0, M_v), the leading term
//!   dominates forever and the limit is read off in closed form;
//! - once the valuation climbs to N_v (finite characteristic) or to
//!   max(N_v, 0) at a finite place (generic characteristic), the orbit stays
//!   integral and the height is zero;
//! - if neither happens within the step budget, the starting point is
//!   exception-trapped and a multiplier b is sought with phi_b(x) outside
//!   the trap; the height is recovered from the rescaling law
//!   h(phi_b(x)) = q^(r deg b) h(x).
//!
//! Every reported value is an exact rational; every nonzero value carries a
//! certificate naming the step at which the closed form took over.

use std::fmt;
use std::sync::Arc;

use num::traits::Pow;
use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::field::FFElem;
use crate::local::{LocalElement, PlaceKind, PlaceModel, TImageSpec, Val};
use crate::poly::{FqPoly, RationalFun};
use crate::twisted::{
    nonzero_additive_solutions, CharKind, DrinfeldModule, LocalizedModule,
};

/// Largest admitted product z * f_cap; beyond this the escape search space
/// q^(z f_cap + 1) stops being enumerable at a desk.
const ESCAPE_SPAN_CAP: u64 = 24;

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn qpow(q: u64, e: u64) -> BigInt {
    BigInt::from(q).pow(e)
}

/// A point of the completion, in a form that can be realized at any
/// precision.
#[derive(Clone, Debug)]
pub enum ElementSpec {
    /// An element of K = F_q(t) itself.
    Rational(RationalFun),
    /// An exact ratio of Laurent polynomials in the uniformizer.
    PiRational {
        num: LocalElement,
        den: LocalElement,
    },
    /// A literal series; computations cannot exceed its precision.
    Literal(LocalElement),
}

impl ElementSpec {
    /// Hypothesis check: the height of 0 is trivially 0 and the iteration
    /// hypotheses assume a nonzero start.
    pub fn is_zero(&self) -> bool {
        match self {
            ElementSpec::Rational(h) => h.is_zero(),
            ElementSpec::PiRational { num, .. } => num.is_exact_zero(),
            ElementSpec::Literal(x) => x.is_exact_zero(),
        }
    }

    /// Realize in the completion at absolute precision prec.
    pub fn realize(&self, model: &PlaceModel, prec: i64) -> Result<LocalElement> {
        match self {
            ElementSpec::Rational(h) => model.embed_rational(h, prec),
            ElementSpec::PiRational { num, den } => {
                if num.residue_field() != model.residue()
                    || den.residue_field() != model.residue()
                {
                    return Err(Error::FieldMismatch(
                        "element lives in the wrong residue field".into(),
                    ));
                }
                let vn = num.valuation()?.finite().unwrap_or(0);
                let vd = match den.valuation()? {
                    Val::Finite(v) => v,
                    Val::Infinite => return Err(Error::DivisionByZero),
                };
                let inv = den.inv(prec + vn.abs() + 2 * vd.abs() + 2)?;
                Ok(num.mul(&inv).capped(prec))
            }
            ElementSpec::Literal(x) => {
                if x.residue_field() != model.residue() {
                    return Err(Error::FieldMismatch(
                        "element lives in the wrong residue field".into(),
                    ));
                }
                Ok(x.capped(prec))
            }
        }
    }
}

/// Exact valuation thresholds of a localized module.
#[derive(Clone, Debug)]
pub struct Thresholds {
    pub q: u64,
    pub r: u32,
    pub r0: u32,
    /// min over r0 <= i < r (nonzero a_i) of V_i / (q^r - q^i); None is
    /// +infinity (only the leading coefficient is nonzero).
    pub m_v: Option<BigRational>,
    /// Whether the place can carry a positive local height from an
    /// exceptional direction: M_v < 0.
    pub in_s: bool,
    /// max over 1 <= i <= r (nonzero a_i) of -V_i / (q^i - 1); integral
    /// points at or above N_v stay integral.
    pub n_v: BigRational,
    /// max(1, -ord_(v_0)(a_i)) over the module coefficients: the pole bound
    /// of the model at the underlying place.
    pub c_v0: i64,
    /// Minimal m with q^(r0_eff m) >= c_v0 e(v|v_0).
    pub m_steps: u32,
    /// lcm of q^i - 1 for 1 <= i <= r - r0.
    pub l_lcm: u64,
}

impl Thresholds {
    pub fn compute(loc: &LocalizedModule) -> Result<Thresholds> {
        let module = loc.module();
        let model = loc.model();
        let q = module.q();
        let r = loc.rank();
        let r0 = loc.r0();
        let vs = loc.v_coeffs();

        let mut m_v: Option<BigRational> = None;
        for (i, vi) in vs.iter().enumerate().take(r).skip(r0) {
            let Some(vi) = vi else { continue };
            let denom = BigInt::from(q.pow(r as u32) - q.pow(i as u32));
            let cand = BigRational::new(BigInt::from(*vi), denom);
            m_v = Some(match m_v {
                None => cand,
                Some(cur) => cur.min(cand),
            });
        }
        let in_s = m_v.as_ref().is_some_and(|m| *m < BigRational::zero());

        let mut n_v: Option<BigRational> = None;
        for (i, vi) in vs.iter().enumerate().take(r + 1).skip(1) {
            let Some(vi) = vi else { continue };
            let denom = BigInt::from(q.pow(i as u32) - 1);
            let cand = BigRational::new(BigInt::from(-*vi), denom);
            n_v = Some(match n_v {
                None => cand,
                Some(cur) => cur.max(cand),
            });
        }
        let n_v = n_v.expect("a monic module has a nonzero leading coefficient");

        let mut c_v0: i64 = 1;
        for a in module.phi_t().coeffs() {
            if a.is_zero() {
                continue;
            }
            let ord = match model.kind() {
                PlaceKind::Finite(rho) => a.ord_at(rho)?,
                PlaceKind::Infinity => a.ord_at_infinity()?,
            };
            c_v0 = c_v0.max(-ord);
        }

        let r0_eff = module.r0_eff() as u32;
        let target = c_v0 as u128 * model.e_ram() as u128;
        let step = (q as u128).pow(r0_eff);
        let mut m_steps = 0u32;
        let mut pw: u128 = 1;
        while pw < target {
            pw = pw.saturating_mul(step);
            m_steps += 1;
            if m_steps > 64 {
                return Err(Error::Invalid(
                    "step-budget exponent overflows; the model is out of desk range".into(),
                ));
            }
        }

        let mut l_lcm = 1u64;
        for i in 1..=(r - r0) as u32 {
            l_lcm = num::integer::lcm(l_lcm, q.pow(i) - 1);
        }

        Ok(Thresholds {
            q,
            r: r as u32,
            r0: r0 as u32,
            m_v,
            in_s,
            n_v,
            c_v0,
            m_steps,
            l_lcm,
        })
    }

    /// min(0, M_v), the escape threshold of the iteration.
    pub fn min_zero_m(&self) -> BigRational {
        match &self.m_v {
            None => BigRational::zero(),
            Some(m) => m.clone().min(BigRational::zero()),
        }
    }
}

/// The exception sets of a localized module: the valuations P at which an
/// orbit can stall, and for each the residue directions R that realize the
/// stall.
#[derive(Clone, Debug)]
pub struct ExceptionSets {
    /// levels[n] is P_v(n); level 0 holds the crossover valuations, level
    /// n >= 1 the integer valuations that reach level 0 in exactly n steps.
    pub levels: Vec<Vec<BigRational>>,
    /// Sorted union of all levels.
    pub p_all: Vec<BigRational>,
    /// For each member of p_all, the exceptional residue directions, sorted
    /// by canonical index.
    pub r_sets: Vec<Vec<FFElem>>,
    pub z: usize,
    pub f_cap: u32,
}

impl ExceptionSets {
    pub fn compute(loc: &LocalizedModule, thr: &Thresholds) -> Result<ExceptionSets> {
        let q = thr.q;
        let r = loc.rank();
        let kv = loc.model().residue().clone();
        let vs = loc.v_coeffs();
        let acs = loc.ac_coeffs();
        let nonzero: Vec<(usize, i64, FFElem)> = vs
            .iter()
            .enumerate()
            .filter_map(|(i, v)| {
                v.map(|v| (i, v, acs[i].clone().expect("ac present for nonzero coefficient")))
            })
            .collect();

        // Level 0: pairwise crossover valuations, plus 0.
        let mut level0: Vec<BigRational> = vec![BigRational::zero()];
        for (a, &(i, vi, _)) in nonzero.iter().enumerate() {
            for &(j, vj, _) in nonzero.iter().skip(a + 1) {
                let denom = BigInt::from(q.pow(j as u32) - q.pow(i as u32));
                level0.push(BigRational::new(BigInt::from(vi - vj), denom));
            }
        }
        level0.sort();
        level0.dedup();

        let fwd = |alpha: &BigRational| -> BigRational {
            nonzero
                .iter()
                .map(|&(i, vi, _)| big(vi) + big(q.pow(i as u32) as i64) * alpha)
                .min()
                .expect("nonzero coefficient list is never empty")
        };
        let argmin = |alpha: &BigRational| -> Vec<usize> {
            let m = fwd(alpha);
            nonzero
                .iter()
                .filter(|&&(i, vi, _)| big(vi) + big(q.pow(i as u32) as i64) * alpha == m)
                .map(|&(i, _, _)| i)
                .collect()
        };

        let mut levels = vec![level0];
        for n in 1..=thr.m_steps as usize {
            let prev = &levels[n - 1];
            let mut next: Vec<BigRational> = Vec::new();
            for beta in prev {
                for &(i, vi, _) in &nonzero {
                    let cand = (beta - big(vi)) / big(q.pow(i as u32) as i64);
                    if !cand.is_integer() {
                        continue;
                    }
                    if &fwd(&cand) == beta {
                        next.push(cand);
                    }
                }
            }
            next.sort();
            next.dedup();
            levels.push(next);
        }

        let mut p_all: Vec<BigRational> = levels.iter().flatten().cloned().collect();
        p_all.sort();
        p_all.dedup();
        let z = p_all.len();

        // Residue directions at a level-0 valuation: ties of the argmin give
        // a kernel of an additive polynomial; otherwise only the direction 1.
        let r0_set = |alpha: &BigRational| -> Result<Vec<FFElem>> {
            let ties = argmin(alpha);
            let mut out = vec![kv.one()];
            if ties.len() >= 2 {
                let terms: Vec<(FFElem, u32)> = ties
                    .iter()
                    .map(|&i| {
                        (
                            acs[i].clone().expect("ac present for nonzero coefficient"),
                            i as u32,
                        )
                    })
                    .collect();
                let ker = nonzero_additive_solutions(&kv, q, &terms, &kv.zero())?;
                out.extend(ker);
            }
            out.sort_by_key(|x| kv.index_of(x));
            out.dedup();
            Ok(out)
        };

        let per_level_cap: u128 = {
            let rr = r as u32;
            let exp = (rr.pow(3) - rr.pow(2) + 2 * rr) / 2;
            (q as u128).saturating_pow(exp)
        };

        let mut r_sets: Vec<Vec<FFElem>> = Vec::with_capacity(z);
        let mut max_r = 1usize;
        for alpha in &p_all {
            let mut union: Vec<FFElem> = Vec::new();
            for (n, level) in levels.iter().enumerate() {
                if !level.contains(alpha) {
                    continue;
                }
                // Forward chain alpha = alpha_0 -> ... -> alpha_n in level 0.
                let mut chain = vec![alpha.clone()];
                for _ in 0..n {
                    let last = chain.last().unwrap().clone();
                    chain.push(fwd(&last));
                }
                let mut set = r0_set(chain.last().unwrap())?;
                for k in (0..n).rev() {
                    let ties = argmin(&chain[k]);
                    let terms: Vec<(FFElem, u32)> = ties
                        .iter()
                        .map(|&i| {
                            (
                                acs[i].clone().expect("ac present for nonzero coefficient"),
                                i as u32,
                            )
                        })
                        .collect();
                    let mut pulled: Vec<FFElem> = Vec::new();
                    for gamma in &set {
                        pulled.extend(nonzero_additive_solutions(&kv, q, &terms, gamma)?);
                    }
                    pulled.sort_by_key(|x| kv.index_of(x));
                    pulled.dedup();
                    set = pulled;
                }
                if set.len() as u128 > per_level_cap {
                    return Err(Error::HypothesisViolated(format!(
                        "exception directions at one level exceed q^((r^3 - r^2 + 2r)/2) = {per_level_cap}"
                    )));
                }
                union.extend(set);
            }
            union.sort_by_key(|x| kv.index_of(x));
            union.dedup();
            max_r = max_r.max(union.len());
            r_sets.push(union);
        }

        // f_cap: residue degree needed to span the largest direction set.
        let mut f_cap = 1u32;
        while (q as u128).pow(f_cap) < max_r as u128 {
            f_cap += 1;
        }

        if z as u64 * f_cap as u64 > ESCAPE_SPAN_CAP {
            return Err(Error::Invalid(format!(
                "escape search span z * f_cap = {} exceeds the enumeration cap {ESCAPE_SPAN_CAP}",
                z as u64 * f_cap as u64
            )));
        }

        Ok(ExceptionSets {
            levels,
            p_all,
            r_sets,
            z,
            f_cap,
        })
    }

    /// Whether the pair (valuation, direction) is exception-trapped.
    pub fn is_trapped(&self, kv: &Arc<crate::field::FiniteField>, v: i64, ac: &FFElem) -> bool {
        let target = big(v);
        match self.p_all.iter().position(|alpha| *alpha == target) {
            None => false,
            Some(idx) => self.r_sets[idx]
                .iter()
                .any(|x| kv.index_of(x) == kv.index_of(ac)),
        }
    }
}

/// Default step budget: m_steps + z f_cap + r + 1.
pub fn default_budget(thr: &Thresholds, exc: &ExceptionSets) -> u32 {
    thr.m_steps + (exc.z as u32) * exc.f_cap + thr.r + 1
}

/// Why a local height value is what it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Finite characteristic: the orbit reached valuation at least N_v and
    /// stays integral; the height is 0.
    L11 { step: u32 },
    /// Generic characteristic at a finite place: the orbit reached
    /// valuation at least max(N_v, 0); the height is 0.
    T3Integrality { step: u32 },
    /// The orbit fell strictly below min(0, M_v) at the given step; from
    /// there the leading term dominates and the value is exact.
    L2Prime { step: u32 },
    /// The start was exception-trapped; phi_b moved it out, and the inner
    /// certificate covers phi_b(x). Only positive values are wrapped.
    EscapeMultiplier { b: FqPoly, inner: Box<Certificate> },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::L11 { step } => write!(f, "L11 at step {step}"),
            Certificate::T3Integrality { step } => write!(f, "T3 integrality at step {step}"),
            Certificate::L2Prime { step } => write!(f, "L2' at step {step}"),
            Certificate::EscapeMultiplier { b, inner } => {
                write!(f, "escape multiplier b = {b}, then {inner}")
            }
        }
    }
}

impl Certificate {
    /// Name used in structured output.
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::L11 { .. } => "L11",
            Certificate::T3Integrality { .. } => "T3",
            Certificate::L2Prime { .. } => "L2'",
            Certificate::EscapeMultiplier { .. } => "escape",
        }
    }
}

/// One recorded step of the valuation trajectory. v is None when the orbit
/// hit exactly zero; ac is the residue direction for finite valuations.
#[derive(Clone, Debug)]
pub struct TrajectoryStep {
    pub n: u32,
    pub v: Option<i64>,
    pub ac: Option<FFElem>,
}

/// The full outcome of a local height computation.
#[derive(Clone, Debug)]
pub struct LocalHeightReport {
    /// Exact value; None when undecided.
    pub value: Option<BigRational>,
    pub certificate: Option<Certificate>,
    pub undecided_reason: Option<String>,
    pub trajectory: Vec<TrajectoryStep>,
    pub thresholds: Thresholds,
    pub exceptions: ExceptionSets,
    pub budget: u32,
    pub precision_used: i64,
    pub escalations: u32,
}

/// Tunables of the engine.
#[derive(Clone, Debug)]
pub struct EngineOptions {
    pub start_prec: i64,
    pub max_prec: i64,
    /// Override the derived step budget.
    pub budget: Option<u32>,
    /// Allow the internal escape search when the budget runs out.
    pub allow_escape: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            start_prec: 64,
            max_prec: 4096,
            budget: None,
            allow_escape: true,
        }
    }
}

struct RunOutput {
    value: Option<BigRational>,
    certificate: Option<Certificate>,
    reason: Option<String>,
    trajectory: Vec<TrajectoryStep>,
}

struct EngineCtx<'a> {
    loc: &'a LocalizedModule,
    thr: &'a Thresholds,
    exc: &'a ExceptionSets,
    budget: u32,
    allow_escape: bool,
}

/// The canonical local height of x at the modeled place.
pub fn local_height(
    module: &DrinfeldModule,
    model: &PlaceModel,
    x: &ElementSpec,
    opts: &EngineOptions,
) -> Result<LocalHeightReport> {
    if x.is_zero() {
        return Err(Error::HypothesisViolated(
            "the local height iteration needs a nonzero start".into(),
        ));
    }
    let loc = LocalizedModule::new(module, model)?;
    let thr = Thresholds::compute(&loc)?;
    let exc = ExceptionSets::compute(&loc, &thr)?;
    let budget = opts.budget.unwrap_or_else(|| default_budget(&thr, &exc));
    let ctx = EngineCtx {
        loc: &loc,
        thr: &thr,
        exc: &exc,
        budget,
        allow_escape: opts.allow_escape,
    };
    let mut prec = opts.start_prec.min(opts.max_prec);
    let mut escalations = 0u32;
    loop {
        match run(&ctx, x, None, 0, prec) {
            Ok(out) => {
                return Ok(LocalHeightReport {
                    value: out.value,
                    certificate: out.certificate,
                    undecided_reason: out.reason,
                    trajectory: out.trajectory,
                    thresholds: thr,
                    exceptions: exc,
                    budget,
                    precision_used: prec,
                    escalations,
                });
            }
            Err(Error::PrecisionExhausted { .. }) if prec < opts.max_prec => {
                prec = (prec * 2).min(opts.max_prec);
                escalations += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Realize the start in the conjugated monic frame: y0 = delta^(-1) x, or
/// the b-multiple sum c_k y_k when restarting after an escape.
fn realize_y0(
    ctx: &EngineCtx,
    spec: &ElementSpec,
    b: Option<&FqPoly>,
    prec: i64,
) -> Result<LocalElement> {
    let model = ctx.loc.model();
    let x = spec.realize(model, prec)?;
    let y0 = if ctx.loc.is_conjugated() {
        let delta = ctx.loc.realize_delta(prec)?;
        delta.inv(prec)?.mul(&x).truncated(prec)
    } else {
        x
    };
    match b {
        None => Ok(y0),
        Some(b) => {
            let coeffs = ctx.loc.realize_coeffs(prec)?;
            let kv = model.residue().clone();
            let deg = b.degree().expect("escape multiplier is nonzero");
            let mut iterates = Vec::with_capacity(deg + 1);
            let mut y = y0;
            for k in 0..=deg {
                iterates.push(y.clone());
                if k < deg {
                    y = ctx.loc.apply(&coeffs, &y);
                }
            }
            let mut z = LocalElement::zero(kv.clone());
            for (k, c) in b.coeffs().iter().enumerate() {
                if model.base().is_zero(c) {
                    continue;
                }
                let cv =
                    LocalElement::from_residue(kv.clone(), model.embed_base().apply(c));
                z = z.add(&cv.mul(&iterates[k]));
            }
            Ok(z)
        }
    }
}

fn run(
    ctx: &EngineCtx,
    spec: &ElementSpec,
    b: Option<&FqPoly>,
    depth: u32,
    prec: i64,
) -> Result<RunOutput> {
    let model = ctx.loc.model();
    let char_kind = ctx.loc.module().char_kind();
    let at_finite_place = matches!(model.kind(), PlaceKind::Finite(_));
    let weight_num = model.deg_v0() as i64 * model.f_res() as i64;
    let q = ctx.thr.q;
    let r = ctx.thr.r;
    let min0m = ctx.thr.min_zero_m();

    let coeffs = ctx.loc.realize_coeffs(prec)?;
    let mut y = realize_y0(ctx, spec, b, prec)?;
    let mut trajectory: Vec<TrajectoryStep> = Vec::new();
    let mut iterates: Vec<LocalElement> = Vec::new();

    for n in 0..=ctx.budget {
        let val = y.valuation()?;
        match val {
            Val::Infinite => {
                trajectory.push(TrajectoryStep { n, v: None, ac: None });
                // The orbit is exactly zero from here on; the height is 0.
                let certificate = match char_kind {
                    CharKind::Finite => Certificate::L11 { step: n },
                    CharKind::Generic => Certificate::T3Integrality { step: n },
                };
                return Ok(RunOutput {
                    value: Some(BigRational::zero()),
                    certificate: Some(certificate),
                    reason: None,
                    trajectory,
                });
            }
            Val::Finite(v) => {
                let ac = y.leading_coeff()?;
                trajectory.push(TrajectoryStep {
                    n,
                    v: Some(v),
                    ac: Some(ac),
                });
                let vr = big(v);
                // Integrality terminations.
                let integral_stop = match char_kind {
                    CharKind::Finite => vr >= ctx.thr.n_v,
                    CharKind::Generic => at_finite_place && v >= 0 && vr >= ctx.thr.n_v,
                };
                if integral_stop {
                    let certificate = match char_kind {
                        CharKind::Finite => Certificate::L11 { step: n },
                        CharKind::Generic => Certificate::T3Integrality { step: n },
                    };
                    return Ok(RunOutput {
                        value: Some(BigRational::zero()),
                        certificate: Some(certificate),
                        reason: None,
                        trajectory,
                    });
                }
                // Dominated escape: the closed form takes over.
                if vr < min0m {
                    let numer = BigInt::from(weight_num) * BigInt::from(-v);
                    let denom =
                        BigInt::from(model.ext_degree()) * qpow(q, r as u64 * n as u64);
                    return Ok(RunOutput {
                        value: Some(BigRational::new(numer, denom)),
                        certificate: Some(Certificate::L2Prime { step: n }),
                        reason: None,
                        trajectory,
                    });
                }
            }
        }
        iterates.push(y.clone());
        if n < ctx.budget {
            y = ctx.loc.apply(&coeffs, &y);
        }
    }

    // Budget exhausted: the start is exception-trapped (or the budget was
    // too small). Look for an escaping multiplier.
    if !ctx.allow_escape || depth >= 1 {
        return Ok(RunOutput {
            value: None,
            certificate: None,
            reason: Some(if depth >= 1 {
                "the escape multiplier did not lead to a decision within the inner budget"
                    .into()
            } else {
                "step budget exhausted and the escape search is disabled".into()
            }),
            trajectory,
        });
    }

    let cap = (ctx.exc.z as u32) * ctx.exc.f_cap;
    match search_multiplier(ctx, &iterates, cap, true)? {
        SearchResult::Found { b: found, .. } => {
            let deg = found.degree().unwrap() as u64;
            if deg == 0 {
                return Ok(RunOutput {
                    value: None,
                    certificate: None,
                    reason: Some(
                        "step budget exhausted while a degree-zero multiplier already \
                         escapes the exception set; more steps, not a multiplier, would \
                         decide this point"
                            .into(),
                    ),
                    trajectory,
                });
            }
            let inner = run(ctx, spec, Some(&found), depth + 1, prec)?;
            match inner.value {
                None => Ok(RunOutput {
                    value: None,
                    certificate: None,
                    reason: inner.reason,
                    trajectory,
                }),
                Some(v) if v.is_zero() => Ok(RunOutput {
                    value: Some(BigRational::zero()),
                    certificate: inner.certificate,
                    reason: None,
                    trajectory: inner.trajectory,
                }),
                Some(v) => {
                    let scaled = v / BigRational::from_integer(qpow(q, r as u64 * deg));
                    let inner_cert =
                        inner.certificate.expect("a defined value carries a certificate");
                    Ok(RunOutput {
                        value: Some(scaled),
                        certificate: Some(Certificate::EscapeMultiplier {
                            b: found,
                            inner: Box::new(inner_cert),
                        }),
                        reason: None,
                        trajectory,
                    })
                }
            }
        }
        SearchResult::NoneFound { examined } => Ok(RunOutput {
            value: None,
            certificate: None,
            reason: Some(format!(
                "no escaping multiplier of degree at most {cap} exists \
                 ({examined} candidates examined); every multiple stays \
                 exception-trapped"
            )),
            trajectory,
        }),
    }
}

enum SearchResult {
    Found { b: FqPoly, v: Option<i64>, ac: Option<FFElem> },
    NoneFound { examined: u64 },
}

/// Enumerate multipliers b in F_q[t] by degree, then lexicographically on
/// the coefficient tuple (b_0, ..., b_k), and test phi_b(x) = sum c_k y_k
/// against the acceptance rule.
fn search_multiplier(
    ctx: &EngineCtx,
    iterates: &[LocalElement],
    degree_cap: u32,
    engine_rule: bool,
) -> Result<SearchResult> {
    let mut examined = 0u64;
    for deg in 0..=degree_cap as usize {
        if deg >= iterates.len() {
            break;
        }
        match search_multiplier_at(ctx, iterates, deg, engine_rule)? {
            found @ SearchResult::Found { .. } => return Ok(found),
            SearchResult::NoneFound { examined: n } => examined += n,
        }
    }
    Ok(SearchResult::NoneFound { examined })
}

/// Test every multiplier of one exact degree against the acceptance rule.
fn search_multiplier_at(
    ctx: &EngineCtx,
    iterates: &[LocalElement],
    deg: usize,
    engine_rule: bool,
) -> Result<SearchResult> {
    let model = ctx.loc.model();
    let kv = model.residue().clone();
    let base = model.base().clone();
    let q = base.q();
    let char_kind = ctx.loc.module().char_kind();
    let mut examined = 0u64;

    let tuple_count = (q as u128).pow(deg as u32 + 1);
    for idx in 0..tuple_count {
        // b_0 is the most significant digit, so ascending idx is
        // ascending lex order on the tuple (b_0, ..., b_deg).
        let mut digs = vec![0u64; deg + 1];
        let mut rem = idx;
        for j in (0..=deg).rev() {
            digs[j] = (rem % q as u128) as u64;
            rem /= q as u128;
        }
        if digs[deg] == 0 {
            continue;
        }
        let coeffs: Vec<FFElem> = digs.iter().map(|&d| base.elem_from_index(d)).collect();
        let b = FqPoly::from_coeffs(base.clone(), coeffs);
        examined += 1;

        let mut z = LocalElement::zero(kv.clone());
        for (k, c) in b.coeffs().iter().enumerate() {
            if base.is_zero(c) {
                continue;
            }
            let cv = LocalElement::from_residue(kv.clone(), model.embed_base().apply(c));
            z = z.add(&cv.mul(&iterates[k]));
        }
        match z.valuation()? {
            Val::Infinite => {
                if engine_rule {
                    // Torsion multiple: the height of 0 is 0, which
                    // decides the original point too.
                    return Ok(SearchResult::Found {
                        b,
                        v: None,
                        ac: None,
                    });
                }
                // Post-condition rule: the zero element is trapped.
                continue;
            }
            Val::Finite(v) => {
                let ac = z.leading_coeff()?;
                let escaped = !ctx.exc.is_trapped(&kv, v, &ac);
                let integral_enough = engine_rule
                    && char_kind == CharKind::Finite
                    && big(v) >= ctx.thr.n_v;
                if escaped || integral_enough {
                    return Ok(SearchResult::Found {
                        b,
                        v: Some(v),
                        ac: Some(ac),
                    });
                }
            }
        }
    }
    Ok(SearchResult::NoneFound { examined })
}

/// Report of a successful escape-multiplier search.
#[derive(Clone, Debug)]
pub struct MultiplierReport {
    pub b: FqPoly,
    /// Valuation of phi_b(x) in the conjugated local frame (None for the
    /// exact zero, which never occurs in a returned report).
    pub v: i64,
    pub ac: FFElem,
    pub degree_cap: u32,
    pub thresholds: Thresholds,
    pub exceptions: ExceptionSets,
}

/// Find the first multiplier b (by degree, then lex) with
/// (v(phi_b(x)), ac(phi_b(x))) outside the exception trap P x R. Torsion
/// multiples (phi_b(x) = 0) are trapped. Errors with NoEscapeFound when the
/// degree cap is exhausted.
pub fn find_escaping_multiplier(
    module: &DrinfeldModule,
    model: &PlaceModel,
    x: &ElementSpec,
    degree_cap: Option<u32>,
    opts: &EngineOptions,
) -> Result<MultiplierReport> {
    if x.is_zero() {
        return Err(Error::HypothesisViolated(
            "the escape search needs a nonzero start".into(),
        ));
    }
    let loc = LocalizedModule::new(module, model)?;
    let thr = Thresholds::compute(&loc)?;
    let exc = ExceptionSets::compute(&loc, &thr)?;
    let cap = degree_cap.unwrap_or((exc.z as u32) * exc.f_cap);
    let ctx = EngineCtx {
        loc: &loc,
        thr: &thr,
        exc: &exc,
        budget: 0,
        allow_escape: false,
    };
    let mut prec = opts.start_prec.min(opts.max_prec);
    loop {
        // Iterates are extended lazily, degree by degree: an escape at a low
        // degree never pays for the deep iterates, whose coefficient spans
        // grow like q^(r k).
        let attempt = (|| -> Result<SearchResult> {
            let coeffs = loc.realize_coeffs(prec)?;
            let y0 = realize_y0(&ctx, x, None, prec)?;
            let mut iterates = vec![y0];
            let mut examined = 0u64;
            for deg in 0..=cap as usize {
                while iterates.len() <= deg {
                    let next = loc.apply(&coeffs, iterates.last().expect("nonempty"));
                    iterates.push(next);
                }
                match search_multiplier_at(&ctx, &iterates, deg, false)? {
                    found @ SearchResult::Found { .. } => return Ok(found),
                    SearchResult::NoneFound { examined: n } => examined += n,
                }
            }
            Ok(SearchResult::NoneFound { examined })
        })();
        match attempt {
            Ok(SearchResult::Found { b, v, ac }) => {
                return Ok(MultiplierReport {
                    b,
                    v: v.expect("post-condition rule never accepts the zero element"),
                    ac: ac.expect("post-condition rule never accepts the zero element"),
                    degree_cap: cap,
                    thresholds: thr,
                    exceptions: exc,
                });
            }
            Ok(SearchResult::NoneFound { .. }) => {
                return Err(Error::NoEscapeFound { degree_bound: cap });
            }
            Err(Error::PrecisionExhausted { .. }) if prec < opts.max_prec => {
                prec = (prec * 2).min(opts.max_prec);
            }
            Err(e) => return Err(e),
        }
    }
}

/// A place of K = F_q(t) in a global support list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceLabel {
    Finite(FqPoly),
    Infinity,
}

impl fmt::Display for PlaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceLabel::Finite(rho) => write!(f, "({rho})"),
            PlaceLabel::Infinity => write!(f, "infinity"),
        }
    }
}

/// Global height report: per-place local values over the candidate support
/// and their sum.
#[derive(Clone, Debug)]
pub struct GlobalHeightReport {
    pub total: Option<BigRational>,
    pub locals: Vec<(PlaceLabel, LocalHeightReport)>,
}

/// The global canonical height of a nonzero x in K = F_q(t): the sum of
/// local heights over the candidate support (poles of x, poles of the
/// module coefficients, and infinity; every other place contributes 0).
pub fn global_height(
    module: &DrinfeldModule,
    x: &RationalFun,
    opts: &EngineOptions,
    parallel: bool,
) -> Result<GlobalHeightReport> {
    if x.is_zero() {
        return Err(Error::HypothesisViolated(
            "the global height needs a nonzero argument".into(),
        ));
    }
    if module.coeff_field() != module.base() {
        return Err(Error::Invalid(
            "global heights are computed for modules with coefficients in F_q(t)".into(),
        ));
    }
    if x.field() != module.base() {
        return Err(Error::FieldMismatch(
            "the point and the module live over different base fields".into(),
        ));
    }
    let base = module.base().clone();
    let mut keys: Vec<(usize, u64)> = Vec::new();
    let mut add_factors = |den: &FqPoly| -> Result<()> {
        if den.degree().unwrap_or(0) == 0 {
            return Ok(());
        }
        let (_, factors) = den.factor()?;
        for (rho, _) in factors {
            keys.push((rho.degree().unwrap(), rho.monic_index().unwrap()));
        }
        Ok(())
    };
    add_factors(x.den())?;
    for a in module.phi_t().coeffs() {
        if !a.is_zero() {
            add_factors(a.den())?;
        }
    }
    keys.sort();
    keys.dedup();
    let mut labels: Vec<PlaceLabel> = keys
        .into_iter()
        .map(|(d, idx)| PlaceLabel::Finite(FqPoly::monic_from_index(base.clone(), d, idx)))
        .collect();
    labels.push(PlaceLabel::Infinity);

    let eval_one = |label: &PlaceLabel| -> Result<LocalHeightReport> {
        let kind = match label {
            PlaceLabel::Finite(rho) => PlaceKind::Finite(rho.clone()),
            PlaceLabel::Infinity => PlaceKind::Infinity,
        };
        let model = PlaceModel::new(base.clone(), kind, 1, 1, 1, TImageSpec::Auto)?;
        local_height(module, &model, &ElementSpec::Rational(x.clone()), opts)
    };

    let reports: Vec<Result<LocalHeightReport>> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = labels
                .iter()
                .map(|label| scope.spawn(move || eval_one(label)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    } else {
        labels.iter().map(eval_one).collect()
    };

    let mut locals = Vec::with_capacity(labels.len());
    let mut total = Some(BigRational::zero());
    for (label, report) in labels.drain(..).zip(reports) {
        let report = report?;
        total = match (&total, &report.value) {
            (Some(t), Some(v)) => Some(t + v),
            _ => None,
        };
        locals.push((label, report));
    }
    Ok(GlobalHeightReport { total, locals })
}

/// An exact powered-inequality check of a lower-bound statement, avoiding
/// fractional exponents by raising both sides to the r0-th power.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub label: String,
    pub holds: bool,
    pub lhs: BigRational,
    pub rhs: BigRational,
    /// The bound as a plain rational when r0 = 1 (no root extraction).
    pub bound_value: Option<BigRational>,
}

fn powered_check(
    label: &str,
    h: &BigRational,
    amplifier: BigInt,
    d: u32,
    r: u32,
    r0: u32,
    c: i64,
    e: u32,
    strict: bool,
) -> BoundCheck {
    // (h * amplifier * d)^r0 * (c e)^r  vs  e^r0
    let lhs = (h * BigRational::from_integer(amplifier.clone())
        * BigRational::from_integer(BigInt::from(d)))
    .pow(r0 as i32)
        * BigRational::from_integer(BigInt::from(c) * BigInt::from(e)).pow(r as i32);
    let rhs = BigRational::from_integer(BigInt::from(e)).pow(r0 as i32);
    let holds = if strict { lhs > rhs } else { lhs >= rhs };
    let bound_value = if r0 == 1 {
        // h >= e / ((c e)^r * amplifier * d)
        Some(
            BigRational::from_integer(BigInt::from(e))
                / (BigRational::from_integer(BigInt::from(c) * BigInt::from(e)).pow(r as i32)
                    * BigRational::from_integer(amplifier)
                    * BigRational::from_integer(BigInt::from(d))),
        )
    } else {
        None
    };
    BoundCheck {
        label: label.to_string(),
        holds,
        lhs,
        rhs,
        bound_value,
    }
}

/// Experimental-path bound: (h q^(3r) d)^r0 (c e)^r > e^r0, valid for a
/// tame L2' certificate reached within m_steps + 1 steps without an escape
/// multiplier.
pub fn check_experimental_bound(
    h: &BigRational,
    q: u64,
    r: u32,
    r0: u32,
    c: i64,
    e: u32,
    d: u32,
) -> BoundCheck {
    powered_check(
        "experimental",
        h,
        qpow(q, 3 * r as u64),
        d,
        r,
        r0,
        c,
        e,
        true,
    )
}

/// Assembled general bound: (h q^(3r + r z f) d)^r0 (c e)^r >= e^r0.
pub fn check_assembled_bound(
    h: &BigRational,
    q: u64,
    r: u32,
    r0: u32,
    z: u32,
    f_cap: u32,
    c: i64,
    e: u32,
    d: u32,
) -> BoundCheck {
    powered_check(
        "assembled",
        h,
        qpow(q, (3 * r + r * z * f_cap) as u64),
        d,
        r,
        r0,
        c,
        e,
        false,
    )
}

/// Unramified form of the assembled bound (e = 1).
pub fn check_unramified_bound(
    h: &BigRational,
    q: u64,
    r: u32,
    r0: u32,
    z: u32,
    f_cap: u32,
    c: i64,
    d: u32,
) -> BoundCheck {
    powered_check(
        "unramified",
        h,
        qpow(q, (3 * r + r * z * f_cap) as u64),
        d,
        r,
        r0,
        c,
        1,
        false,
    )
}

/// Coarse bound outside the exceptional set: a positive local value over a
/// degree-d extension is at least 1/d.
pub fn check_floor_bound(h: &BigRational, d: u32) -> BoundCheck {
    let rhs = BigRational::new(BigInt::one(), BigInt::from(d));
    BoundCheck {
        label: "floor".to_string(),
        holds: h >= &rhs,
        lhs: h.clone(),
        rhs: rhs.clone(),
        bound_value: Some(rhs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use crate::local::TImageSpec;

    fn f3() -> Arc<FiniteField> {
        FiniteField::prime(3).unwrap()
    }

    /// phi_t = tau^r - t^(1 - q^(r0)) tau^(r0) over F_q, totally ramified
    /// place over (t) of degree d = q^(r0 m) - 1, with
    /// t = pi^d / (1 - pi^(d-1)) and x = pi^(d-1) / (1 - pi^(d-1)).
    fn deep_point_instance(
        q_p: u64,
        r: usize,
        r0: usize,
        m: u32,
    ) -> (DrinfeldModule, PlaceModel, ElementSpec, u32) {
        let base = FiniteField::prime(q_p).unwrap();
        let q = base.q();
        let d = q.pow(r0 as u32 * m) as u32 - 1;
        let mut coeffs = vec![RationalFun::zero(base.clone()); r + 1];
        coeffs[r] = RationalFun::one(base.clone());
        coeffs[r0] = RationalFun::t_pow(base.clone(), 1 - q.pow(r0 as u32) as i64).neg();
        let module = DrinfeldModule::new(base.clone(), coeffs).unwrap();
        let kv = FiniteField::prime(q_p).unwrap();
        let num = LocalElement::monomial(kv.clone(), d as i64, kv.one());
        let mut den_coeffs = vec![kv.zero(); d as usize];
        den_coeffs[0] = kv.one();
        den_coeffs[d as usize - 1] = kv.neg(&kv.one());
        let den = LocalElement::exact(kv.clone(), 0, den_coeffs);
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base.clone())),
            d,
            1,
            d,
            TImageSpec::PiRational {
                num,
                den: den.clone(),
            },
        )
        .unwrap();
        let x_num = LocalElement::monomial(kv.clone(), d as i64 - 1, kv.one());
        let x = ElementSpec::PiRational { num: x_num, den };
        (module, model, x, d)
    }

    #[test]
    fn deep_point_thresholds_match_hand_computation() {
        let (module, model, _, _) = deep_point_instance(2, 2, 1, 2);
        let loc = LocalizedModule::new(&module, &model).unwrap();
        let thr = Thresholds::compute(&loc).unwrap();
        assert_eq!(thr.m_v, Some(BigRational::new(BigInt::from(-3), BigInt::from(2))));
        assert!(thr.in_s);
        assert_eq!(thr.n_v, big(3));
        assert_eq!(thr.c_v0, 1);
        assert_eq!(thr.m_steps, 2);
        assert_eq!(thr.l_lcm, 1);
        let exc = ExceptionSets::compute(&loc, &thr).unwrap();
        assert_eq!(exc.z, 2);
        assert_eq!(
            exc.p_all,
            vec![BigRational::new(BigInt::from(-3), BigInt::from(2)), big(0)]
        );
        assert_eq!(exc.f_cap, 1);
        assert_eq!(default_budget(&thr, &exc), 7);
    }

    #[test]
    fn deep_point_value_and_trajectory() {
        let (module, model, x, _) = deep_point_instance(2, 2, 1, 2);
        let report = local_height(&module, &model, &x, &EngineOptions::default()).unwrap();
        let expect = BigRational::new(BigInt::from(5), BigInt::from(192));
        assert_eq!(report.value, Some(expect));
        assert_eq!(report.certificate, Some(Certificate::L2Prime { step: 3 }));
        let vs: Vec<Option<i64>> = report.trajectory.iter().map(|s| s.v).collect();
        assert_eq!(vs, vec![Some(2), Some(1), Some(-1), Some(-5)]);
    }

    #[test]
    fn deep_point_family_closed_form() {
        // h = (q^(m+1) - q^m + 1) / (q^(r(m+1)) d) for r0 = 1.
        for m in 2..=4u32 {
            let (module, model, x, d) = deep_point_instance(2, 2, 1, m);
            let report =
                local_height(&module, &model, &x, &EngineOptions::default()).unwrap();
            let q: i64 = 2;
            let numer = q.pow(m + 1) - q.pow(m) + 1;
            let denom = BigInt::from(2u64).pow(2 * (m as u64 + 1)) * BigInt::from(d);
            let expect = BigRational::new(BigInt::from(numer), denom);
            assert_eq!(report.value, Some(expect), "m = {m}");
        }
    }

    #[test]
    fn carlitz_tail_at_infinity() {
        // phi_t = t + tau over F_p; at the degree-d totally ramified place
        // over infinity, x = t^(-n) has height exactly 1/p^(n+1).
        for (p, d, n) in [(3u64, 1u32, 1i64), (3, 2, 2), (5, 1, 3), (5, 2, 1)] {
            let base = FiniteField::prime(p).unwrap();
            let module = DrinfeldModule::new(
                base.clone(),
                vec![RationalFun::t_pow(base.clone(), 1), RationalFun::one(base.clone())],
            )
            .unwrap();
            let model = PlaceModel::new(
                base.clone(),
                PlaceKind::Infinity,
                d,
                1,
                d,
                TImageSpec::Auto,
            )
            .unwrap();
            let x = ElementSpec::Rational(RationalFun::t_pow(base.clone(), -n));
            let mut opts = EngineOptions::default();
            opts.budget = Some(n as u32 + 2);
            let report = local_height(&module, &model, &x, &opts).unwrap();
            let expect = BigRational::new(
                BigInt::one(),
                BigInt::from(p).pow(n as u64 + 1),
            );
            assert_eq!(report.value, Some(expect), "p={p} d={d} n={n}");
            assert_eq!(
                report.certificate,
                Some(Certificate::L2Prime { step: n as u32 + 1 })
            );
        }
    }

    #[test]
    fn carlitz_global_height_of_inverse_t() {
        let base = f3();
        let module = DrinfeldModule::new(
            base.clone(),
            vec![RationalFun::t_pow(base.clone(), 1), RationalFun::one(base.clone())],
        )
        .unwrap();
        let x = RationalFun::t_pow(base.clone(), -1);
        let report = global_height(&module, &x, &EngineOptions::default(), false).unwrap();
        let expect = BigRational::new(BigInt::from(10), BigInt::from(9));
        assert_eq!(report.total, Some(expect));
        assert_eq!(report.locals.len(), 2);
        assert_eq!(
            report.locals[0].0,
            PlaceLabel::Finite(FqPoly::t(base.clone()))
        );
        assert_eq!(report.locals[0].1.value, Some(big(1)));
        assert_eq!(report.locals[1].0, PlaceLabel::Infinity);
        assert_eq!(
            report.locals[1].1.value,
            Some(BigRational::new(BigInt::one(), BigInt::from(9)))
        );
    }

    #[test]
    fn global_parallel_agrees_with_sequential() {
        let base = f3();
        let module = DrinfeldModule::new(
            base.clone(),
            vec![RationalFun::t_pow(base.clone(), 1), RationalFun::one(base.clone())],
        )
        .unwrap();
        let x = RationalFun::new(
            FqPoly::from_coeffs(base.clone(), vec![base.one(), base.one()]),
            FqPoly::t_pow(base.clone(), 2),
        )
        .unwrap();
        let seq = global_height(&module, &x, &EngineOptions::default(), false).unwrap();
        let par = global_height(&module, &x, &EngineOptions::default(), true).unwrap();
        assert_eq!(seq.total, par.total);
        assert!(seq.total.is_some());
    }

    #[test]
    fn torsion_point_has_zero_height_and_no_escape() {
        // phi_t = -t^(-6) tau + tau^2 over F_3 kills x = 1/t exactly.
        let base = f3();
        let module = DrinfeldModule::new(
            base.clone(),
            vec![
                RationalFun::zero(base.clone()),
                RationalFun::t_pow(base.clone(), -6).neg(),
                RationalFun::one(base.clone()),
            ],
        )
        .unwrap();
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base.clone())),
            1,
            1,
            1,
            TImageSpec::Auto,
        )
        .unwrap();
        let x = ElementSpec::Rational(RationalFun::t_pow(base.clone(), -1));
        let report = local_height(&module, &model, &x, &EngineOptions::default()).unwrap();
        assert_eq!(report.value, Some(BigRational::zero()));
        assert_eq!(report.certificate, Some(Certificate::L11 { step: 1 }));
        assert_eq!(report.trajectory.len(), 2);
        assert_eq!(report.trajectory[1].v, None, "phi_t(x) is exactly zero");

        // Exception sets match the hand computation.
        let loc = LocalizedModule::new(&module, &model).unwrap();
        let thr = Thresholds::compute(&loc).unwrap();
        let exc = ExceptionSets::compute(&loc, &thr).unwrap();
        assert_eq!(exc.p_all, vec![big(-1), big(0), big(2)]);
        let kv = model.residue().clone();
        assert_eq!(exc.r_sets[0].len(), 2, "R(-1) = F_3^*");
        assert_eq!(exc.r_sets[1], vec![kv.one()]);
        assert_eq!(exc.r_sets[2], vec![kv.from_int(2)]);

        // Every multiple of x is trapped: phi_b(x) = b_0 x with direction
        // in R(-1), or exactly zero.
        let err = find_escaping_multiplier(&module, &model, &x, None, &EngineOptions::default());
        match err {
            Err(Error::NoEscapeFound { degree_bound }) => assert_eq!(degree_bound, 3),
            other => panic!("expected NoEscapeFound, got {other:?}"),
        }
    }

    #[test]
    fn good_reduction_pole_certifies_at_step_zero() {
        // phi_t = t tau + tau^2 over F_3 at (t): M_v >= 0, so x = 1/t
        // escapes immediately with value deg * f * (-v) / ext = 1.
        let base = f3();
        let module = DrinfeldModule::new(
            base.clone(),
            vec![
                RationalFun::zero(base.clone()),
                RationalFun::t_pow(base.clone(), 1),
                RationalFun::one(base.clone()),
            ],
        )
        .unwrap();
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base.clone())),
            1,
            1,
            1,
            TImageSpec::Auto,
        )
        .unwrap();
        let x = ElementSpec::Rational(RationalFun::t_pow(base.clone(), -1));
        let report = local_height(&module, &model, &x, &EngineOptions::default()).unwrap();
        assert_eq!(report.value, Some(big(1)));
        assert_eq!(report.certificate, Some(Certificate::L2Prime { step: 0 }));
        assert!(!report.thresholds.in_s);
    }

    #[test]
    fn deep_point_accepts_trivial_multiplier() {
        // The deep point's own valuation pair is not exception-trapped, so
        // the first multiplier found is b = 1.
        let (module, model, x, _) = deep_point_instance(2, 2, 1, 2);
        let rep =
            find_escaping_multiplier(&module, &model, &x, None, &EngineOptions::default())
                .unwrap();
        assert!(rep.b.is_one());
        assert_eq!(rep.v, 2);
    }

    #[test]
    fn scaling_law_under_phi_t() {
        // h(phi_t(x)) = q^r h(x) on a rational instance.
        let base = f3();
        let module = DrinfeldModule::new(
            base.clone(),
            vec![
                RationalFun::zero(base.clone()),
                RationalFun::t_pow(base.clone(), 1),
                RationalFun::one(base.clone()),
            ],
        )
        .unwrap();
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base.clone())),
            1,
            1,
            1,
            TImageSpec::Auto,
        )
        .unwrap();
        let x = RationalFun::t_pow(base.clone(), -2);
        let phi_t_x = module
            .phi_t()
            .apply_rational(&x)
            .unwrap();
        let h_x = local_height(
            &module,
            &model,
            &ElementSpec::Rational(x),
            &EngineOptions::default(),
        )
        .unwrap();
        let h_tx = local_height(
            &module,
            &model,
            &ElementSpec::Rational(phi_t_x),
            &EngineOptions::default(),
        )
        .unwrap();
        let scale = BigRational::from_integer(BigInt::from(9));
        assert_eq!(
            h_tx.value.unwrap(),
            h_x.value.clone().unwrap() * scale,
            "q^r scaling"
        );
        assert!(h_x.value.unwrap() > BigRational::zero());
    }

    #[test]
    fn bound_checks_on_the_deep_point() {
        let (module, model, x, d) = deep_point_instance(2, 2, 1, 2);
        let report = local_height(&module, &model, &x, &EngineOptions::default()).unwrap();
        let h = report.value.unwrap();
        let thr = &report.thresholds;
        let exc = &report.exceptions;
        let e = model.e_ram();
        let exp = check_experimental_bound(&h, thr.q, thr.r, thr.r0, thr.c_v0, e, d);
        assert!(exp.holds, "experimental bound: {} > {}", exp.lhs, exp.rhs);
        assert_eq!(exp.lhs, big(45));
        assert_eq!(exp.rhs, big(3));
        let asm = check_assembled_bound(
            &h,
            thr.q,
            thr.r,
            thr.r0,
            exc.z as u32,
            exc.f_cap,
            thr.c_v0,
            e,
            d,
        );
        assert!(asm.holds);
        assert_eq!(
            asm.bound_value,
            Some(BigRational::new(BigInt::one(), BigInt::from(9216)))
        );
        assert!(asm.bound_value.unwrap() < h);
    }

    #[test]
    fn exception_levels_of_the_torsion_module_are_filtered() {
        let base = f3();
        let module = DrinfeldModule::new(
            base.clone(),
            vec![
                RationalFun::zero(base.clone()),
                RationalFun::t_pow(base.clone(), -6).neg(),
                RationalFun::one(base.clone()),
            ],
        )
        .unwrap();
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base.clone())),
            1,
            1,
            1,
            TImageSpec::Auto,
        )
        .unwrap();
        let loc = LocalizedModule::new(&module, &model).unwrap();
        let thr = Thresholds::compute(&loc).unwrap();
        let exc = ExceptionSets::compute(&loc, &thr).unwrap();
        assert_eq!(thr.m_steps, 2);
        assert_eq!(exc.levels[0], vec![big(-1), big(0)]);
        assert_eq!(exc.levels[1], vec![big(2)], "only the realizable pullback");
        assert!(exc.levels[2].is_empty());
    }
}
