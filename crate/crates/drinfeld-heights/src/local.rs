//! Local fields as Laurent series in a uniformizer pi over a finite residue
//! field, with explicit precision tracking.
//!
//! An element is either exact (a Laurent polynomial, finitely many known
//! coefficients and nothing hidden) or known modulo pi^N for an absolute
//! precision N. The arithmetic tracks the sharpest precision each operation
//! can guarantee; in particular the p-th power map multiplies absolute
//! precision by p, which is what lets the height iteration outrun its own
//! precision loss.
//!
//! A [`PlaceModel`] realizes a completion of F_q(t) (or of a finite extension
//! L) at a place: it fixes the residue field, the ramification and residue
//! indices, and the image of t as a series in pi, either exactly or by
//! Newton lifting a defining relation.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Embedding, FFElem, FiniteField};
use crate::poly::{FqPoly, RationalFun};

/// Hard cap on stored coefficient vectors, to fail loudly instead of
/// exhausting memory if an exact computation grows out of control.
const COEFF_CAP: usize = 1 << 20;

/// Absolute precision of a local element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Prec {
    /// Every coefficient is known; the element is a Laurent polynomial.
    Exact,
    /// Coefficients of pi^n are known exactly for n < N.
    Finite(i64),
}

impl Prec {
    pub fn min(self, other: Prec) -> Prec {
        match (self, other) {
            (Prec::Exact, p) | (p, Prec::Exact) => p,
            (Prec::Finite(a), Prec::Finite(b)) => Prec::Finite(a.min(b)),
        }
    }

    fn shift(self, d: i64) -> Prec {
        match self {
            Prec::Exact => Prec::Exact,
            Prec::Finite(n) => Prec::Finite(n + d),
        }
    }
}

/// Result of a valuation query on an element that is not hidden below its
/// precision.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Val {
    Finite(i64),
    /// The element is exactly zero.
    Infinite,
}

impl Val {
    /// The finite value, or None for the exact zero.
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Finite(v) => Some(v),
            Val::Infinite => None,
        }
    }
}

/// A Laurent series truncation over a finite residue field: the coefficient
/// of pi^(v_min + j) is coeffs[j]. The first coefficient is nonzero, all
/// stored exponents are below the precision, and an empty vector means
/// either the exact zero (precision Exact) or an element of O(pi^N).
#[derive(Clone, PartialEq, Eq)]
pub struct LocalElement {
    k: Arc<FiniteField>,
    v_min: i64,
    coeffs: Vec<FFElem>,
    prec: Prec,
}

impl fmt::Debug for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if self.k.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let n = self.v_min + j as i64;
            let cs = if self.k.e() == 1 {
                format!("{}", c.coords()[0])
            } else {
                format!("{:?}", c.coords())
            };
            match n {
                0 => write!(f, "{cs}")?,
                1 if *c == self.k.one() => write!(f, "pi")?,
                1 => write!(f, "{cs}*pi")?,
                _ if *c == self.k.one() => write!(f, "pi^{n}")?,
                _ => write!(f, "{cs}*pi^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        match self.prec {
            Prec::Exact => Ok(()),
            Prec::Finite(n) => {
                if first {
                    write!(f, " (mod pi^{n})")
                } else {
                    write!(f, " + O(pi^{n})")
                }
            }
        }
    }
}

impl LocalElement {
    /// Exact element from a coefficient window starting at pi^v_min.
    pub fn exact(k: Arc<FiniteField>, v_min: i64, coeffs: Vec<FFElem>) -> LocalElement {
        let mut x = LocalElement {
            k,
            v_min,
            coeffs,
            prec: Prec::Exact,
        };
        x.normalize();
        x
    }

    /// Element known modulo pi^prec.
    pub fn with_prec(
        k: Arc<FiniteField>,
        v_min: i64,
        coeffs: Vec<FFElem>,
        prec: i64,
    ) -> LocalElement {
        let mut x = LocalElement {
            k,
            v_min,
            coeffs,
            prec: Prec::Finite(prec),
        };
        x.normalize();
        x
    }

    pub fn zero(k: Arc<FiniteField>) -> LocalElement {
        LocalElement {
            k,
            v_min: 0,
            coeffs: vec![],
            prec: Prec::Exact,
        }
    }

    pub fn one(k: Arc<FiniteField>) -> LocalElement {
        let c = k.one();
        LocalElement {
            k,
            v_min: 0,
            coeffs: vec![c],
            prec: Prec::Exact,
        }
    }

    /// c * pi^v as an exact element.
    pub fn monomial(k: Arc<FiniteField>, v: i64, c: FFElem) -> LocalElement {
        let coeffs = if k.is_zero(&c) { vec![] } else { vec![c] };
        LocalElement {
            k,
            v_min: v,
            coeffs,
            prec: Prec::Exact,
        }
    }

    pub fn pi(k: Arc<FiniteField>) -> LocalElement {
        let c = k.one();
        LocalElement::monomial(k, 1, c)
    }

    /// A residue-field constant.
    pub fn from_residue(k: Arc<FiniteField>, c: FFElem) -> LocalElement {
        LocalElement::monomial(k, 0, c)
    }

    pub fn residue_field(&self) -> &Arc<FiniteField> {
        &self.k
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    fn normalize(&mut self) {
        // Drop coefficients at or above the precision bound.
        if let Prec::Finite(n) = self.prec {
            let keep = (n - self.v_min).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        // Strip leading zeros, advancing v_min.
        let lead = self
            .coeffs
            .iter()
            .position(|c| !self.k.is_zero(c));
        match lead {
            Some(0) => {}
            Some(j) => {
                self.coeffs.drain(..j);
                self.v_min += j as i64;
            }
            None => {
                self.coeffs.clear();
            }
        }
        // Strip trailing zeros (they carry no information).
        while self.coeffs.last().is_some_and(|c| self.k.is_zero(c)) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.v_min = 0;
        }
        assert!(
            self.coeffs.len() <= COEFF_CAP,
            "local element grew past the coefficient cap"
        );
    }

    /// True when the element is the exact zero.
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec == Prec::Exact
    }

    /// Lower bound on the valuation: the valuation itself when a nonzero
    /// coefficient is visible, otherwise the precision bound.
    fn v_lower(&self) -> Option<i64> {
        if !self.coeffs.is_empty() {
            return Some(self.v_min);
        }
        match self.prec {
            Prec::Exact => None, // exact zero: valuation +infinity
            Prec::Finite(n) => Some(n),
        }
    }

    /// The pi-adic valuation. Errors with [`Error::PrecisionExhausted`] when
    /// the element vanishes to its full precision without being exactly zero.
    pub fn valuation(&self) -> Result<Val> {
        if !self.coeffs.is_empty() {
            return Ok(Val::Finite(self.v_min));
        }
        match self.prec {
            Prec::Exact => Ok(Val::Infinite),
            Prec::Finite(n) => Err(Error::PrecisionExhausted { prec: n }),
        }
    }

    /// Leading (angular) coefficient: the residue of x * pi^(-v(x)).
    pub fn leading_coeff(&self) -> Result<FFElem> {
        match self.valuation()? {
            Val::Finite(_) => Ok(self.coeffs[0].clone()),
            Val::Infinite => Err(Error::DivisionByZero),
        }
    }

    /// The coefficient of pi^n, zero outside the stored range. The caller is
    /// responsible for staying below the known precision.
    pub fn coeff_at(&self, n: i64) -> FFElem {
        let j = n - self.v_min;
        if j < 0 || j >= self.coeffs.len() as i64 {
            self.k.zero()
        } else {
            self.coeffs[j as usize].clone()
        }
    }

    pub fn add(&self, other: &LocalElement) -> LocalElement {
        debug_assert_eq!(self.k, other.k, "residue field mismatch");
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let prec = self.prec.min(other.prec);
        let lo = match (self.coeffs.is_empty(), other.coeffs.is_empty()) {
            (true, true) => {
                return LocalElement {
                    k: self.k.clone(),
                    v_min: 0,
                    coeffs: vec![],
                    prec,
                }
            }
            (true, false) => other.v_min,
            (false, true) => self.v_min,
            (false, false) => self.v_min.min(other.v_min),
        };
        let hi_self = self.v_min + self.coeffs.len() as i64;
        let hi_other = other.v_min + other.coeffs.len() as i64;
        let mut hi = hi_self.max(hi_other);
        if let Prec::Finite(n) = prec {
            hi = hi.min(n);
        }
        let mut coeffs = Vec::with_capacity((hi - lo).max(0) as usize);
        for n in lo..hi {
            coeffs.push(self.k.add(&self.coeff_at(n), &other.coeff_at(n)));
        }
        let mut out = LocalElement {
            k: self.k.clone(),
            v_min: lo,
            coeffs,
            prec,
        };
        out.normalize();
        out
    }

    pub fn neg(&self) -> LocalElement {
        let coeffs = self.coeffs.iter().map(|c| self.k.neg(c)).collect();
        LocalElement {
            k: self.k.clone(),
            v_min: self.v_min,
            coeffs,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &LocalElement) -> LocalElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LocalElement) -> LocalElement {
        debug_assert_eq!(self.k, other.k, "residue field mismatch");
        if self.is_exact_zero() || other.is_exact_zero() {
            return LocalElement::zero(self.k.clone());
        }
        // Precision of the product: each factor's uncertainty is scaled by
        // the other factor's valuation lower bound.
        let prec = match (self.prec, other.prec) {
            (Prec::Exact, Prec::Exact) => Prec::Exact,
            (Prec::Exact, Prec::Finite(nb)) => Prec::Finite(self.v_lower().unwrap() + nb),
            (Prec::Finite(na), Prec::Exact) => Prec::Finite(other.v_lower().unwrap() + na),
            (Prec::Finite(na), Prec::Finite(nb)) => Prec::Finite(
                (self.v_lower().unwrap() + nb).min(other.v_lower().unwrap() + na),
            ),
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return LocalElement {
                k: self.k.clone(),
                v_min: 0,
                coeffs: vec![],
                prec,
            };
        }
        let v = self.v_min + other.v_min;
        let full_len = self.coeffs.len() + other.coeffs.len() - 1;
        let keep = match prec {
            Prec::Exact => full_len,
            Prec::Finite(n) => ((n - v).max(0) as usize).min(full_len),
        };
        let mut coeffs = vec![self.k.zero(); keep];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= keep {
                break;
            }
            if self.k.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= keep {
                    break;
                }
                let t = self.k.mul(a, b);
                coeffs[i + j] = self.k.add(&coeffs[i + j], &t);
            }
        }
        let mut out = LocalElement {
            k: self.k.clone(),
            v_min: v,
            coeffs,
            prec,
        };
        out.normalize();
        out
    }

    /// Multiply by an exact monomial c * pi^d.
    pub fn scale_monomial(&self, d: i64, c: &FFElem) -> LocalElement {
        if self.k.is_zero(c) {
            return LocalElement::zero(self.k.clone());
        }
        let coeffs = self.coeffs.iter().map(|a| self.k.mul(a, c)).collect();
        LocalElement {
            k: self.k.clone(),
            v_min: self.v_min + d,
            coeffs,
            prec: self.prec.shift(d),
        }
    }

    /// The p-th power. In characteristic p this maps the coefficient at
    /// pi^n to its p-th power at pi^(np), and multiplies absolute precision
    /// by p.
    pub fn frobenius(&self) -> LocalElement {
        let p = self.k.p() as i64;
        let prec = match self.prec {
            Prec::Exact => Prec::Exact,
            Prec::Finite(n) => Prec::Finite(n * p),
        };
        if self.coeffs.is_empty() {
            return LocalElement {
                k: self.k.clone(),
                v_min: 0,
                coeffs: vec![],
                prec,
            };
        }
        let len = (self.coeffs.len() - 1) * p as usize + 1;
        let mut coeffs = vec![self.k.zero(); len];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !self.k.is_zero(c) {
                coeffs[j * p as usize] = self.k.pow(c, self.k.p());
            }
        }
        let mut out = LocalElement {
            k: self.k.clone(),
            v_min: self.v_min * p,
            coeffs,
            prec,
        };
        out.normalize();
        out
    }

    /// x^(q^i) where q = p^e_base, via e_base * i Frobenius applications.
    pub fn pow_q(&self, e_base: u32, i: u32) -> LocalElement {
        let mut x = self.clone();
        for _ in 0..(e_base as u64 * i as u64) {
            x = x.frobenius();
        }
        x
    }

    /// Small integer power by repeated squaring.
    pub fn pow(&self, mut exp: u64) -> LocalElement {
        let mut result = LocalElement::one(self.k.clone());
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        result
    }

    /// Multiplicative inverse. A nonzero exact monomial inverts exactly;
    /// anything else is computed to absolute precision
    /// min(target, N - 2 v(x)) by Newton iteration.
    pub fn inv(&self, target: i64) -> Result<LocalElement> {
        match self.valuation()? {
            Val::Infinite => Err(Error::DivisionByZero),
            Val::Finite(v) => {
                let c_inv = self.k.inv(&self.coeffs[0])?;
                if self.coeffs.len() == 1 && self.prec == Prec::Exact {
                    return Ok(LocalElement::monomial(self.k.clone(), -v, c_inv));
                }
                let out_prec = match self.prec {
                    Prec::Exact => target,
                    Prec::Finite(n) => target.min(n - 2 * v),
                };
                if out_prec <= -v {
                    return Err(Error::PrecisionExhausted { prec: out_prec });
                }
                // Work at a precision that bounds every intermediate.
                let work = out_prec + 2 * v.abs() + 2;
                let x = self.truncated(work + 2 * v.abs());
                let mut w = LocalElement::with_prec(
                    self.k.clone(),
                    -v,
                    vec![c_inv],
                    -v + 1,
                );
                loop {
                    // e = 1 - x w has positive valuation; w <- w (1 + e)
                    // squares the error each pass.
                    let cur_prec = match w.prec {
                        Prec::Finite(n) => n,
                        Prec::Exact => break,
                    };
                    if cur_prec >= out_prec {
                        break;
                    }
                    let new_prec = (2 * (cur_prec + v) - v).min(out_prec);
                    w = LocalElement {
                        prec: Prec::Finite(new_prec),
                        ..w.clone()
                    };
                    let e = LocalElement::one(self.k.clone()).sub(&x.mul(&w));
                    let corr = w.mul(&e);
                    w = w.add(&corr);
                    w = w.truncated(new_prec);
                }
                let mut out = w.truncated(out_prec);
                out.prec = Prec::Finite(out_prec);
                out.normalize();
                Ok(out)
            }
        }
    }

    /// Restrict a finitely known element to absolute precision at most n;
    /// exact elements pass through untouched.
    pub fn capped(&self, n: i64) -> LocalElement {
        match self.prec {
            Prec::Exact => self.clone(),
            Prec::Finite(_) => self.truncated(n),
        }
    }

    /// Restrict to absolute precision at most n (never raises precision).
    pub fn truncated(&self, n: i64) -> LocalElement {
        let prec = self.prec.min(Prec::Finite(n));
        let mut out = LocalElement {
            k: self.k.clone(),
            v_min: self.v_min,
            coeffs: self.coeffs.clone(),
            prec,
        };
        out.normalize();
        out
    }

    /// Reinterpret an exact element as only known to precision n.
    pub fn as_known_to(&self, n: i64) -> LocalElement {
        self.truncated(n)
    }
}

/// Root of a polynomial with local coefficients by Newton iteration, started
/// from an initial approximation satisfying the Hensel condition
/// v(F(x0)) > 2 v(F'(x0)). The result is exact-zero-tested against nothing:
/// it is returned at absolute precision target.
pub fn newton_lift(
    poly: &[LocalElement],
    x0: &LocalElement,
    target: i64,
) -> Result<LocalElement> {
    let k = x0.residue_field().clone();
    let eval = |x: &LocalElement, coeffs: &[LocalElement]| -> LocalElement {
        let mut acc = LocalElement::zero(k.clone());
        for c in coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    let deriv: Vec<LocalElement> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| {
            let jf = LocalElement::from_residue(k.clone(), k.from_int(j as i64));
            c.mul(&jf)
        })
        .collect();
    let f0 = eval(x0, poly);
    let fp0 = eval(x0, &deriv);
    let vf0 = match f0.valuation()? {
        Val::Infinite => return Ok(x0.clone()),
        Val::Finite(v) => v,
    };
    let vfp0 = match fp0.valuation() {
        Ok(Val::Finite(v)) => v,
        _ => {
            return Err(Error::HenselConditionFailed(
                "derivative vanishes at the initial approximation".into(),
            ))
        }
    };
    if vf0 <= 2 * vfp0 {
        return Err(Error::HenselConditionFailed(format!(
            "v(F(x0)) = {vf0} is not greater than 2 v(F'(x0)) = {}",
            2 * vfp0
        )));
    }
    let work = target + 2 * vfp0.abs() + 4;
    let mut x = x0.truncated(work);
    // Each pass at least doubles v(F(x)) - 2 v(F'(x)); stop when the
    // correction falls below the target precision.
    for _ in 0..128 {
        let fx = eval(&x, poly);
        let fpx = eval(&x, &deriv);
        let vfx = match fx.valuation() {
            Ok(Val::Finite(v)) => v,
            Ok(Val::Infinite) => break,
            Err(_) => break,
        };
        if vfx - vfp0 >= target {
            break;
        }
        let corr = fx.mul(&fpx.inv(work)?);
        x = x.sub(&corr);
        x = x.truncated(work);
    }
    Ok(x.truncated(target))
}

/// Solve y^n = w for a unit w with a known residue root y0 (so y0^n equals
/// the leading coefficient of w), requiring gcd(n, p) = 1.
pub fn unit_root(w: &LocalElement, n: u64, y0: &FFElem, target: i64) -> Result<LocalElement> {
    let k = w.residue_field().clone();
    if n % k.p() == 0 {
        return Err(Error::HenselConditionFailed(format!(
            "root exponent {n} is divisible by the characteristic {}",
            k.p()
        )));
    }
    match w.valuation()? {
        Val::Finite(0) => {}
        _ => {
            return Err(Error::Invalid(
                "unit root requires a unit argument".into(),
            ))
        }
    }
    if k.pow(y0, n) != w.leading_coeff()? {
        return Err(Error::Invalid(
            "initial approximation does not match the leading coefficient".into(),
        ));
    }
    // F(Y) = Y^n - w as a polynomial with local coefficients.
    let mut poly = vec![LocalElement::zero(k.clone()); n as usize + 1];
    poly[0] = w.neg();
    poly[n as usize] = LocalElement::one(k.clone());
    let x0 = LocalElement::from_residue(k.clone(), y0.clone());
    newton_lift(&poly, &x0, target)
}

/// The underlying place of F_q(t): a monic irreducible of F_q[t], or the
/// place at infinity.
#[derive(Clone, PartialEq, Eq)]
pub enum PlaceKind {
    Finite(FqPoly),
    Infinity,
}

impl fmt::Debug for PlaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceKind::Finite(rho) => write!(f, "({rho})"),
            PlaceKind::Infinity => write!(f, "infinity"),
        }
    }
}

/// How the image of t in the completion is specified.
#[derive(Clone, Debug)]
pub enum TImageSpec {
    /// Derive the image: pi^(-e) at infinity, or a Newton lift of the
    /// defining irreducible at an unramified finite place.
    Auto,
    /// t = num/den for exact Laurent polynomials in pi.
    PiRational {
        num: LocalElement,
        den: LocalElement,
    },
    /// A literal truncated series; computations cannot exceed its precision.
    Literal(LocalElement),
}

#[derive(Clone)]
enum TImage {
    /// Exact rational expression num/den in pi.
    PiRational {
        num: LocalElement,
        den: LocalElement,
    },
    /// Newton lift z of rho(z) = pi from the residue root with the smallest
    /// canonical index.
    Lifted {
        rho_in_kv: Vec<FFElem>,
        root0: FFElem,
    },
    Literal(LocalElement),
}

/// A model of the completion of an extension L of K = F_q(t) at a place v
/// lying over a place v_0 of K: residue field k_v, ramification index
/// e(v|v_0), residue degree f(v|v_0), the global degree [L:K], and the image
/// of t as a series in the uniformizer pi of L_v.
#[derive(Clone)]
pub struct PlaceModel {
    base: Arc<FiniteField>,
    kind: PlaceKind,
    deg_v0: u32,
    e_ram: u32,
    f_res: u32,
    ext_degree: u32,
    residue: Arc<FiniteField>,
    embed_base: Embedding,
    t_image: TImage,
}

impl fmt::Debug for PlaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "place {:?} with e = {}, f = {}, [L:K] = {}",
            self.kind, self.e_ram, self.f_res, self.ext_degree
        )
    }
}

impl PlaceModel {
    /// Build a model. The residue field is F_{p^(e_base deg(v_0) f)} with the
    /// canonical modulus, and the image of t is validated to have the correct
    /// valuation behavior: v(rho(t)) = e at a finite place, v(t) = -e at
    /// infinity.
    pub fn new(
        base: Arc<FiniteField>,
        kind: PlaceKind,
        e_ram: u32,
        f_res: u32,
        ext_degree: u32,
        t_spec: TImageSpec,
    ) -> Result<PlaceModel> {
        if e_ram == 0 || f_res == 0 || ext_degree == 0 {
            return Err(Error::Invalid(
                "ramification, residue, and extension degrees must be positive".into(),
            ));
        }
        if e_ram * f_res > ext_degree {
            return Err(Error::Invalid(format!(
                "e * f = {} exceeds [L:K] = {}",
                e_ram * f_res,
                ext_degree
            )));
        }
        let deg_v0 = match &kind {
            PlaceKind::Finite(rho) => {
                if !rho.is_monic() || !rho.is_irreducible()? {
                    return Err(Error::NotIrreducible(format!("{rho}")));
                }
                if rho.field() != &base {
                    return Err(Error::FieldMismatch(
                        "place polynomial lives over a different base field".into(),
                    ));
                }
                rho.degree().unwrap() as u32
            }
            PlaceKind::Infinity => 1,
        };
        let residue = FiniteField::extension(base.p(), base.e() * deg_v0 * f_res)?;
        let embed_base = Embedding::new(base.clone(), residue.clone())?;
        let t_image = match t_spec {
            TImageSpec::Auto => match &kind {
                PlaceKind::Infinity => TImage::PiRational {
                    num: LocalElement::monomial(residue.clone(), -(e_ram as i64), residue.one()),
                    den: LocalElement::one(residue.clone()),
                },
                PlaceKind::Finite(rho) => {
                    if e_ram != 1 {
                        return Err(Error::Invalid(
                            "a ramified finite place needs an explicit image of t".into(),
                        ));
                    }
                    let rho_in_kv: Vec<FFElem> =
                        rho.coeffs().iter().map(|c| embed_base.apply(c)).collect();
                    let root0 = find_smallest_root(&residue, &rho_in_kv).ok_or_else(|| {
                        Error::Invalid("place polynomial has no root in the residue field".into())
                    })?;
                    if rho.degree() == Some(1) {
                        // rho = t - c: the image is c + pi on the nose.
                        let num = LocalElement::exact(
                            residue.clone(),
                            0,
                            vec![root0, residue.one()],
                        );
                        TImage::PiRational {
                            num,
                            den: LocalElement::one(residue.clone()),
                        }
                    } else {
                        TImage::Lifted { rho_in_kv, root0 }
                    }
                }
            },
            TImageSpec::PiRational { num, den } => {
                if num.prec() != Prec::Exact || den.prec() != Prec::Exact {
                    return Err(Error::Invalid(
                        "a rational image of t needs exact numerator and denominator".into(),
                    ));
                }
                if num.residue_field() != &residue || den.residue_field() != &residue {
                    return Err(Error::FieldMismatch(
                        "image of t lives in the wrong residue field".into(),
                    ));
                }
                TImage::PiRational { num, den }
            }
            TImageSpec::Literal(x) => {
                if x.residue_field() != &residue {
                    return Err(Error::FieldMismatch(
                        "image of t lives in the wrong residue field".into(),
                    ));
                }
                TImage::Literal(x)
            }
        };
        let model = PlaceModel {
            base,
            kind,
            deg_v0,
            e_ram,
            f_res,
            ext_degree,
            residue,
            embed_base,
            t_image,
        };
        model.validate()?;
        Ok(model)
    }

    /// Check that the image of t produces the declared valuations.
    fn validate(&self) -> Result<()> {
        let e = self.e_ram as i64;
        match (&self.kind, &self.t_image) {
            (PlaceKind::Infinity, TImage::PiRational { num, den }) => {
                let vn = num.valuation()?.finite().ok_or_else(zero_t_image)?;
                let vd = den.valuation()?.finite().ok_or(Error::DivisionByZero)?;
                if vn - vd != -e {
                    return Err(Error::Invalid(format!(
                        "image of t has valuation {} at infinity; expected {}",
                        vn - vd,
                        -e
                    )));
                }
            }
            (PlaceKind::Infinity, TImage::Literal(x)) => {
                let v = x.valuation()?.finite().ok_or_else(zero_t_image)?;
                if v != -e {
                    return Err(Error::Invalid(format!(
                        "image of t has valuation {v} at infinity; expected {}",
                        -e
                    )));
                }
            }
            (PlaceKind::Finite(rho), TImage::PiRational { num, den }) => {
                // rho(num/den) = (sum c_k num^k den^(d-k)) / den^d; the
                // numerator is exact, so the valuation check is exact.
                let d = rho.degree().unwrap();
                let mut acc = LocalElement::zero(self.residue.clone());
                let mut den_pow = LocalElement::one(self.residue.clone());
                let mut den_pows = vec![den_pow.clone()];
                for _ in 0..d {
                    den_pow = den_pow.mul(den);
                    den_pows.push(den_pow.clone());
                }
                for (kk, c) in rho.coeffs().iter().enumerate() {
                    let ck = LocalElement::from_residue(
                        self.residue.clone(),
                        self.embed_base.apply(c),
                    );
                    let term = ck.mul(&num.pow(kk as u64)).mul(&den_pows[d - kk]);
                    acc = acc.add(&term);
                }
                let v_num = acc.valuation()?.finite().ok_or_else(|| {
                    Error::Invalid("rho(t) vanishes identically in the model".into())
                })?;
                let v_den = den_pows[d].valuation()?.finite().ok_or(Error::DivisionByZero)?;
                if v_num - v_den != e {
                    return Err(Error::Invalid(format!(
                        "rho(t) has valuation {}; expected e = {e}",
                        v_num - v_den
                    )));
                }
            }
            (PlaceKind::Finite(rho), TImage::Literal(x)) => {
                let rho_in_kv: Vec<FFElem> = rho
                    .coeffs()
                    .iter()
                    .map(|c| self.embed_base.apply(c))
                    .collect();
                let val = eval_fp_coeffs(&rho_in_kv, x);
                let v = val.valuation()?.finite().ok_or_else(|| {
                    Error::Invalid("rho(t) vanishes identically in the model".into())
                })?;
                if v != e {
                    return Err(Error::Invalid(format!(
                        "rho(t) has valuation {v}; expected e = {e}"
                    )));
                }
            }
            (PlaceKind::Finite(_), TImage::Lifted { .. }) => {
                // Construction guarantees rho(z) = pi.
            }
            (PlaceKind::Infinity, TImage::Lifted { .. }) => unreachable!(),
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FiniteField> {
        &self.base
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    /// Degree of the underlying place of F_q(t).
    pub fn deg_v0(&self) -> u32 {
        self.deg_v0
    }

    pub fn e_ram(&self) -> u32 {
        self.e_ram
    }

    pub fn f_res(&self) -> u32 {
        self.f_res
    }

    /// The global degree [L : K].
    pub fn ext_degree(&self) -> u32 {
        self.ext_degree
    }

    pub fn residue(&self) -> &Arc<FiniteField> {
        &self.residue
    }

    pub fn embed_base(&self) -> &Embedding {
        &self.embed_base
    }

    /// Exact valuation of a nonzero rational function pulled into this
    /// place's value group: e(v|v_0) times the order at v_0.
    pub fn v_of_rational(&self, h: &RationalFun) -> Result<i64> {
        let ord = match &self.kind {
            PlaceKind::Finite(rho) => h.ord_at(rho)?,
            PlaceKind::Infinity => h.ord_at_infinity()?,
        };
        Ok(self.e_ram as i64 * ord)
    }

    /// Realize the image of t at the given absolute precision.
    pub fn realize_t(&self, prec: i64) -> Result<LocalElement> {
        match &self.t_image {
            TImage::PiRational { num, den } => {
                if den.coeffs.len() == 1 {
                    Ok(num.mul(&den.inv(prec)?))
                } else {
                    let vn = match num.valuation()? {
                        Val::Finite(v) => v,
                        Val::Infinite => return Err(zero_t_image()),
                    };
                    // Never ask for less than the leading term of t itself.
                    let prec = prec.max(vn + 2);
                    Ok(num.mul(&den.inv(prec - vn + 2)?).truncated(prec))
                }
            }
            TImage::Lifted { rho_in_kv, root0 } => {
                // Solve rho(z) = pi starting at the residue root.
                let k = &self.residue;
                let mut poly: Vec<LocalElement> = rho_in_kv
                    .iter()
                    .map(|c| LocalElement::from_residue(k.clone(), c.clone()))
                    .collect();
                poly[0] = poly[0].sub(&LocalElement::pi(k.clone()));
                let x0 = LocalElement::from_residue(k.clone(), root0.clone());
                newton_lift(&poly, &x0, prec.max(2))
            }
            TImage::Literal(x) => Ok(x.truncated(prec)),
        }
    }

    /// Whether the model can realize t exactly (no truncation needed).
    pub fn t_is_exact(&self) -> bool {
        match &self.t_image {
            TImage::PiRational { den, .. } => den.coeffs.len() == 1,
            _ => false,
        }
    }

    /// Evaluate a polynomial over F_q at the image of t.
    pub fn eval_poly(&self, p: &FqPoly, prec: i64) -> Result<LocalElement> {
        if p.degree().unwrap_or(0) == 0 {
            // Constants never touch the image of t and stay exact.
            return Ok(match p.coeffs().first() {
                None => LocalElement::zero(self.residue.clone()),
                Some(c) => {
                    LocalElement::from_residue(self.residue.clone(), self.embed_base.apply(c))
                }
            });
        }
        let t = self.realize_t(prec + slack_for(p, self))?;
        let k = self.residue.clone();
        let mut acc = LocalElement::zero(k.clone());
        for c in p.coeffs().iter().rev() {
            let cv = LocalElement::from_residue(k.clone(), self.embed_base.apply(c));
            acc = acc.mul(&t).add(&cv);
        }
        if self.t_is_exact() {
            Ok(acc)
        } else {
            Ok(acc.truncated(prec))
        }
    }

    /// Exact valuation of a nonzero polynomial in t pulled into this
    /// place's value group.
    fn v_of_poly(&self, p: &FqPoly) -> Result<i64> {
        let ord = match &self.kind {
            PlaceKind::Finite(rho) => p.multiplicity_of(rho)? as i64,
            PlaceKind::Infinity => -(p.degree().unwrap_or(0) as i64),
        };
        Ok(self.e_ram as i64 * ord)
    }

    /// Realize a rational function of t in the completion at the given
    /// absolute precision. Exact models of t with polynomial input and
    /// monomial denominators stay exact.
    pub fn embed_rational(&self, h: &RationalFun, prec: i64) -> Result<LocalElement> {
        if h.is_zero() {
            return Ok(LocalElement::zero(self.residue.clone()));
        }
        // Absolute targets that survive the division: an error of O(pi^s)
        // in the numerator surfaces as O(pi^(s - vd)) in the quotient, and
        // one in the denominator as O(pi^(s - 2 vd + vn)).
        let vn = self.v_of_poly(h.num())?;
        let vd = self.v_of_poly(h.den())?;
        let num = self.eval_poly(h.num(), prec + vd + 2)?;
        let den = self.eval_poly(h.den(), prec - vn + 2 * vd + 2)?;
        let den_inv = den.inv(prec - vn + vd + 2)?;
        Ok(num.mul(&den_inv).capped(prec))
    }

    /// The uniformizer as an element.
    pub fn pi(&self) -> LocalElement {
        LocalElement::pi(self.residue.clone())
    }
}

fn zero_t_image() -> Error {
    Error::Invalid("image of t is zero".into())
}

fn slack_for(p: &FqPoly, model: &PlaceModel) -> i64 {
    // Horner evaluation multiplies t at most deg(p) times; when t has
    // negative valuation the truncation window must open by that much.
    let d = p.degree().unwrap_or(0) as i64;
    match model.kind {
        PlaceKind::Infinity => d * model.e_ram as i64 + 2,
        _ => 2,
    }
}

fn find_smallest_root(k: &Arc<FiniteField>, poly: &[FFElem]) -> Option<FFElem> {
    k.all_elements().find(|cand| {
        let mut acc = k.zero();
        for c in poly.iter().rev() {
            acc = k.mul(&acc, cand);
            acc = k.add(&acc, c);
        }
        k.is_zero(&acc)
    })
}

fn eval_fp_coeffs(poly: &[FFElem], x: &LocalElement) -> LocalElement {
    let k = x.residue_field().clone();
    let mut acc = LocalElement::zero(k.clone());
    for c in poly.iter().rev() {
        let cv = LocalElement::from_residue(k.clone(), c.clone());
        acc = acc.mul(x).add(&cv);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<FiniteField> {
        FiniteField::prime(3).unwrap()
    }

    fn f2() -> Arc<FiniteField> {
        FiniteField::prime(2).unwrap()
    }

    #[test]
    fn exact_square_of_one_plus_pi_cubed() {
        let k = f3();
        let x = LocalElement::exact(k.clone(), 0, vec![k.one(), k.zero(), k.zero(), k.one()]);
        let sq = x.mul(&x);
        // (1 + pi^3)^2 = 1 + 2 pi^3 + pi^6, exactly.
        assert_eq!(sq.prec(), Prec::Exact);
        assert_eq!(sq.valuation().unwrap(), Val::Finite(0));
        assert_eq!(sq.coeff_at(0), k.one());
        assert_eq!(sq.coeff_at(3), k.from_int(2));
        assert_eq!(sq.coeff_at(6), k.one());
        assert_eq!(sq.coeff_at(1), k.zero());
    }

    #[test]
    fn frobenius_multiplies_precision() {
        let k = f3();
        let x = LocalElement::with_prec(k.clone(), 0, vec![k.one(), k.one()], 4);
        let cube = x.frobenius();
        // (1 + pi)^3 = 1 + pi^3 in characteristic 3, known mod pi^12.
        assert_eq!(cube.prec(), Prec::Finite(12));
        assert_eq!(cube.coeff_at(0), k.one());
        assert_eq!(cube.coeff_at(3), k.one());
        assert_eq!(cube.coeff_at(1), k.zero());
        assert_eq!(cube.coeff_at(2), k.zero());
    }

    #[test]
    fn geometric_series_inverse() {
        let k = f3();
        // x = 1 - pi; 1/x = 1 + pi + pi^2 + ... mod pi^5.
        let x = LocalElement::exact(k.clone(), 0, vec![k.one(), k.from_int(-1)]);
        let inv = x.inv(5).unwrap();
        assert_eq!(inv.prec(), Prec::Finite(5));
        for n in 0..5 {
            assert_eq!(inv.coeff_at(n), k.one(), "coefficient of pi^{n}");
        }
        let prod = x.mul(&inv);
        assert_eq!(prod.valuation().unwrap(), Val::Finite(0));
        assert_eq!(prod.coeff_at(0), k.one());
    }

    #[test]
    fn exact_monomial_inverse_stays_exact() {
        let k = f3();
        let x = LocalElement::monomial(k.clone(), 3, k.from_int(2));
        let inv = x.inv(50).unwrap();
        assert_eq!(inv.prec(), Prec::Exact);
        assert_eq!(inv.valuation().unwrap(), Val::Finite(-3));
        assert_eq!(inv.leading_coeff().unwrap(), k.from_int(2), "2 * 2 = 4 = 1 in F_3");
        assert!(x.mul(&inv) == LocalElement::one(k));
    }

    #[test]
    fn inverse_precision_follows_the_rule() {
        let k = f3();
        // x = pi^2 + pi^3 + O(pi^7): relative precision 5, so the inverse is
        // known mod pi^(7 - 4) = pi^3.
        let x = LocalElement::with_prec(k.clone(), 2, vec![k.one(), k.one()], 7);
        let inv = x.inv(100).unwrap();
        assert_eq!(inv.prec(), Prec::Finite(3));
        assert_eq!(inv.valuation().unwrap(), Val::Finite(-2));
        // 1/x = pi^-2 (1 + pi)^-1 = pi^-2 - pi^-1 + 1 - ...
        assert_eq!(inv.coeff_at(-2), k.one());
        assert_eq!(inv.coeff_at(-1), k.from_int(2));
        assert_eq!(inv.coeff_at(0), k.one());
    }

    #[test]
    fn valuation_distinguishes_exact_zero_from_hidden() {
        let k = f3();
        let zero = LocalElement::zero(k.clone());
        assert_eq!(zero.valuation().unwrap(), Val::Infinite);
        let hidden = LocalElement::with_prec(k.clone(), 0, vec![], 6);
        match hidden.valuation() {
            Err(Error::PrecisionExhausted { prec }) => assert_eq!(prec, 6),
            other => panic!("expected precision exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn cancellation_loses_exactness_only_in_the_hidden_tail() {
        let k = f3();
        let a = LocalElement::with_prec(k.clone(), 0, vec![k.one(), k.one()], 9);
        let b = LocalElement::with_prec(k.clone(), 0, vec![k.one()], 9);
        let d = a.sub(&b);
        assert_eq!(d.valuation().unwrap(), Val::Finite(1));
        let z = a.sub(&a);
        assert!(matches!(z.valuation(), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn unit_root_square_root_in_odd_characteristic() {
        let k = f3();
        let w = LocalElement::exact(k.clone(), 0, vec![k.one(), k.one()]); // 1 + pi
        let y = unit_root(&w, 2, &k.one(), 12).unwrap();
        let y2 = y.mul(&y);
        let diff = y2.sub(&w);
        match diff.valuation() {
            Err(Error::PrecisionExhausted { prec }) => assert!(prec >= 12),
            Ok(Val::Finite(v)) => assert!(v >= 12, "y^2 - w has valuation {v}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unit_square_root_fails_in_characteristic_two() {
        let k = f2();
        let w = LocalElement::exact(k.clone(), 0, vec![k.one(), k.one()]);
        let r = unit_root(&w, 2, &k.one(), 8);
        assert!(matches!(r, Err(Error::HenselConditionFailed(_))));
    }

    #[test]
    fn auto_model_at_infinity_realizes_t_exactly() {
        let base = f3();
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Infinity,
            1,
            1,
            1,
            TImageSpec::Auto,
        )
        .unwrap();
        let t = model.realize_t(40).unwrap();
        assert_eq!(t.prec(), Prec::Exact);
        assert_eq!(t.valuation().unwrap(), Val::Finite(-1));
        // 1/t realizes as pi exactly.
        let h = RationalFun::t_pow(base, -1);
        let x = model.embed_rational(&h, 40).unwrap();
        assert_eq!(x.prec(), Prec::Exact);
        assert_eq!(x.valuation().unwrap(), Val::Finite(1));
    }

    #[test]
    fn auto_model_at_a_quadratic_place() {
        let base = f3();
        let rho = FqPoly::from_coeffs(base.clone(), vec![base.one(), base.zero(), base.one()]);
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(rho.clone()),
            1,
            1,
            1,
            TImageSpec::Auto,
        )
        .unwrap();
        assert_eq!(model.deg_v0(), 2);
        assert_eq!(model.residue().q(), 9);
        // rho(t) must come out with valuation exactly 1.
        let t = model.realize_t(20).unwrap();
        let t2 = t.mul(&t);
        let val = t2.add(&LocalElement::one(model.residue().clone()));
        assert_eq!(val.valuation().unwrap(), Val::Finite(1));
        // Exact valuations of rational functions at the place.
        let h = RationalFun::new(
            FqPoly::from_coeffs(base.clone(), vec![base.one(), base.zero(), base.one()]),
            FqPoly::t(base.clone()),
        )
        .unwrap();
        assert_eq!(model.v_of_rational(&h).unwrap(), 1);
        let g = RationalFun::t_pow(base, 3);
        assert_eq!(model.v_of_rational(&g).unwrap(), 0);
    }

    #[test]
    fn ramified_model_with_rational_t_image() {
        // Base F_2, place (t), e = 3, t = pi^3 / (1 - pi^2).
        let base = f2();
        let k = FiniteField::prime(2).unwrap();
        let num = LocalElement::monomial(k.clone(), 3, k.one());
        let den = LocalElement::exact(k.clone(), 0, vec![k.one(), k.zero(), k.one()]);
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base.clone())),
            3,
            1,
            3,
            TImageSpec::PiRational { num, den },
        )
        .unwrap();
        let t = model.realize_t(8).unwrap();
        // pi^3 (1 + pi^2 + pi^4 + ...) = pi^3 + pi^5 + pi^7 + O(pi^8).
        assert_eq!(t.valuation().unwrap(), Val::Finite(3));
        assert_eq!(t.coeff_at(3), k.one());
        assert_eq!(t.coeff_at(4), k.zero());
        assert_eq!(t.coeff_at(5), k.one());
        assert_eq!(t.coeff_at(7), k.one());
        assert_eq!(model.v_of_rational(&RationalFun::t_pow(base, 1)).unwrap(), 3);
    }

    #[test]
    fn ramified_model_rejects_wrong_valuation() {
        let base = f2();
        let k = FiniteField::prime(2).unwrap();
        let num = LocalElement::monomial(k.clone(), 2, k.one());
        let den = LocalElement::one(k.clone());
        let r = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base)),
            3,
            1,
            3,
            TImageSpec::PiRational { num, den },
        );
        assert!(r.is_err(), "t = pi^2 cannot model e = 3");
    }

    #[test]
    fn embed_rational_matches_hand_expansion_at_t_place() {
        let base = f3();
        let model = PlaceModel::new(
            base.clone(),
            PlaceKind::Finite(FqPoly::t(base.clone())),
            1,
            1,
            1,
            TImageSpec::Auto,
        )
        .unwrap();
        // h = (t + 1)/(t - 1) = (pi + 1)/(pi - 1) =
        // -(1 + pi)(1 + pi + pi^2 + ...) = 2 + pi + 2 pi^2 + pi^3 + ...
        // over F_3: (1+pi)/(pi+2) with 1/(pi+2) = 2/(1+2pi) = 2(1+pi+pi^2..).
        let t = FqPoly::t(base.clone());
        let one = FqPoly::one(base.clone());
        let h = RationalFun::new(t.add(&one), t.sub(&one)).unwrap();
        let x = model.embed_rational(&h, 6).unwrap();
        assert_eq!(x.valuation().unwrap(), Val::Finite(0));
        // Check against direct series arithmetic.
        let k = model.residue().clone();
        let pi = LocalElement::pi(k.clone());
        let numd = pi.add(&LocalElement::one(k.clone()));
        let dend = pi.sub(&LocalElement::one(k.clone()));
        let expect = numd.mul(&dend.inv(6).unwrap());
        let diff = x.sub(&expect);
        match diff.valuation() {
            Err(Error::PrecisionExhausted { prec }) => assert!(prec >= 5),
            Ok(Val::Finite(v)) => assert!(v >= 5),
            Ok(Val::Infinite) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
