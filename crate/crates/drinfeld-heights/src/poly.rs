//! Polynomials and rational functions over a finite field in the variable t.
//!
//! These represent elements of F_q[t] and F_q(t) exactly. Rational functions
//! are kept reduced with monic denominator, so equality is structural.
//! Factorization is trial division against the canonical enumeration of monic
//! irreducibles, which is plenty at the degrees this crate works with.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FFElem, FiniteField};

/// A polynomial in t over F_q, little-endian coefficients with no trailing
/// zeros (the zero polynomial has an empty coefficient vector).
#[derive(Clone, PartialEq, Eq)]
pub struct FqPoly {
    field: Arc<FiniteField>,
    coeffs: Vec<FFElem>,
}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if self.field.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff_str = if self.field.e() == 1 {
                format!("{}", c.coords()[0])
            } else {
                format!("{:?}", c.coords())
            };
            let is_one = *c == self.field.one();
            match (k, is_one) {
                (0, _) => write!(f, "{coeff_str}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{coeff_str}*t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{coeff_str}*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl FqPoly {
    pub fn zero(field: Arc<FiniteField>) -> FqPoly {
        FqPoly {
            field,
            coeffs: vec![],
        }
    }

    pub fn one(field: Arc<FiniteField>) -> FqPoly {
        let one = field.one();
        FqPoly {
            field,
            coeffs: vec![one],
        }
    }

    /// The variable t.
    pub fn t(field: Arc<FiniteField>) -> FqPoly {
        let coeffs = vec![field.zero(), field.one()];
        FqPoly { field, coeffs }
    }

    pub fn constant(field: Arc<FiniteField>, c: FFElem) -> FqPoly {
        let coeffs = if field.is_zero(&c) { vec![] } else { vec![c] };
        FqPoly { field, coeffs }
    }

    /// From little-endian coefficients; trailing zeros are trimmed.
    pub fn from_coeffs(field: Arc<FiniteField>, coeffs: Vec<FFElem>) -> FqPoly {
        let mut p = FqPoly { field, coeffs };
        p.trim();
        p
    }

    /// t^k for k >= 0.
    pub fn t_pow(field: Arc<FiniteField>, k: usize) -> FqPoly {
        let mut coeffs = vec![field.zero(); k + 1];
        coeffs[k] = field.one();
        FqPoly { field, coeffs }
    }

    fn trim(&mut self) {
        while self
            .coeffs
            .last()
            .is_some_and(|c| self.field.is_zero(c))
        {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Leading coefficient; error on zero.
    pub fn leading(&self) -> Result<FFElem> {
        self.coeffs
            .last()
            .cloned()
            .ok_or(Error::DivisionByZero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&self.field.one())
    }

    /// Coefficient of t^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> FFElem {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, other: &FqPoly) -> FqPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let f = &self.field;
        let coeffs = (0..n)
            .map(|k| f.add(&self.coeff(k), &other.coeff(k)))
            .collect();
        FqPoly::from_coeffs(f.clone(), coeffs)
    }

    pub fn sub(&self, other: &FqPoly) -> FqPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let f = &self.field;
        let coeffs = (0..n)
            .map(|k| f.sub(&self.coeff(k), &other.coeff(k)))
            .collect();
        FqPoly::from_coeffs(f.clone(), coeffs)
    }

    pub fn neg(&self) -> FqPoly {
        let f = &self.field;
        let coeffs = self.coeffs.iter().map(|c| f.neg(c)).collect();
        FqPoly {
            field: f.clone(),
            coeffs,
        }
    }

    pub fn mul(&self, other: &FqPoly) -> FqPoly {
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut coeffs = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = f.mul(a, b);
                coeffs[i + j] = f.add(&coeffs[i + j], &prod);
            }
        }
        FqPoly::from_coeffs(f.clone(), coeffs)
    }

    pub fn scale(&self, c: &FFElem) -> FqPoly {
        let f = &self.field;
        let coeffs = self.coeffs.iter().map(|a| f.mul(a, c)).collect();
        FqPoly::from_coeffs(f.clone(), coeffs)
    }

    pub fn pow(&self, mut exp: u64) -> FqPoly {
        let mut result = FqPoly::one(self.field.clone());
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

    /// Quotient and remainder; error if the divisor is zero.
    pub fn divrem(&self, divisor: &FqPoly) -> Result<(FqPoly, FqPoly)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let db = divisor.coeffs.len() - 1;
        let lead_inv = f.inv(divisor.coeffs.last().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![f.zero(); self.coeffs.len().saturating_sub(db)];
        while rem.len() > db || (rem.len() == db + 1 && db == 0 && !rem.is_empty()) {
            if rem.len() <= db {
                break;
            }
            let dr = rem.len() - 1;
            let c = f.mul(&rem[dr], &lead_inv);
            quo[dr - db] = c.clone();
            for k in 0..=db {
                let sub = f.mul(&c, &divisor.coeffs[k]);
                let idx = dr - db + k;
                rem[idx] = f.sub(&rem[idx], &sub);
            }
            while rem.last().is_some_and(|x| f.is_zero(x)) {
                rem.pop();
            }
            if rem.is_empty() {
                break;
            }
        }
        Ok((
            FqPoly::from_coeffs(f.clone(), quo),
            FqPoly::from_coeffs(f.clone(), rem),
        ))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &FqPoly) -> Result<FqPoly> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        let lead_inv = self.field.inv(a.coeffs.last().unwrap())?;
        Ok(a.scale(&lead_inv))
    }

    /// Evaluate at a point of an extension field, mapping coefficients
    /// through the given images of the base field basis (use
    /// [`crate::field::Embedding::apply`] per coefficient). Here the point
    /// and coefficients live in the same field.
    pub fn eval(&self, x: &FFElem) -> FFElem {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.mul(&acc, x);
            acc = f.add(&acc, c);
        }
        acc
    }

    pub fn derivative(&self) -> FqPoly {
        let f = &self.field;
        if self.coeffs.len() <= 1 {
            return FqPoly::zero(f.clone());
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| f.mul(c, &f.from_int(k as i64)))
            .collect();
        FqPoly::from_coeffs(f.clone(), coeffs)
    }

    /// The P-th power for P a power of the characteristic, via additivity of
    /// Frobenius: (sum c_k t^k)^P = sum c_k^P t^(kP).
    pub fn frob_pow(&self, big_p: u64) -> Result<FqPoly> {
        let f = &self.field;
        let mut chk = big_p;
        while chk % f.p() == 0 {
            chk /= f.p();
        }
        if chk != 1 {
            return Err(Error::Invalid(format!(
                "{big_p} is not a power of the characteristic {}",
                f.p()
            )));
        }
        if self.is_zero() || big_p == 1 {
            return Ok(self.clone());
        }
        let step = big_p as usize;
        let mut coeffs = vec![f.zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * step] = f.pow(c, big_p);
        }
        Ok(FqPoly::from_coeffs(f.clone(), coeffs))
    }

    /// Push coefficients through a constant-field embedding.
    pub fn map_field(&self, emb: &crate::field::Embedding) -> FqPoly {
        let coeffs = self.coeffs.iter().map(|c| emb.apply(c)).collect();
        FqPoly::from_coeffs(emb.target().clone(), coeffs)
    }

    /// Multiplicity of the monic irreducible rho as a factor.
    pub fn multiplicity_of(&self, rho: &FqPoly) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::Invalid(
                "valuation of the zero polynomial is infinite".into(),
            ));
        }
        let mut f = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = f.divrem(rho)?;
            if !r.is_zero() {
                return Ok(m);
            }
            m += 1;
            f = q;
        }
    }

    /// Canonical index of a polynomial of known degree d among monic
    /// degree-d polynomials: lower coefficients read as base-q digits.
    pub fn monic_index(&self) -> Option<u64> {
        if !self.is_monic() {
            return None;
        }
        let q = self.field.q();
        let mut idx = 0u64;
        for c in self.coeffs[..self.coeffs.len() - 1].iter().rev() {
            idx = idx * q + self.field.index_of(c);
        }
        Some(idx)
    }

    /// The monic degree-d polynomial with the given canonical index.
    pub fn monic_from_index(field: Arc<FiniteField>, d: usize, mut idx: u64) -> FqPoly {
        let q = field.q();
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(field.elem_from_index(idx % q));
            idx /= q;
        }
        coeffs.push(field.one());
        FqPoly { field, coeffs }
    }

    /// Irreducibility test over F_q by the Frobenius gcd criterion.
    pub fn is_irreducible(&self) -> Result<bool> {
        let Some(d) = self.degree() else {
            return Ok(false);
        };
        if d == 0 {
            return Ok(false);
        }
        if d == 1 {
            return Ok(true);
        }
        let f = &self.field;
        let q = f.q();
        let t = FqPoly::t(f.clone());
        let mut xq = t.clone();
        for k in 1..=(d / 2) {
            // Advance X^(q^(k-1)) to X^(q^k) mod self.
            xq = xq.powmod(q, self)?;
            let diff = xq.sub(&t);
            let (_, diff_mod) = diff.divrem(self)?;
            if diff_mod.is_zero() {
                return Ok(false);
            }
            let g = diff_mod.gcd(self)?;
            if g.degree() != Some(0) {
                return Ok(false);
            }
            let _ = k;
        }
        Ok(true)
    }

    /// self^exp mod m.
    pub fn powmod(&self, mut exp: u64, m: &FqPoly) -> Result<FqPoly> {
        let mut result = FqPoly::one(self.field.clone());
        let (_, mut base) = self.divrem(m)?;
        while exp > 0 {
            if exp & 1 == 1 {
                let (_, r) = result.mul(&base).divrem(m)?;
                result = r;
            }
            let (_, r) = base.mul(&base).divrem(m)?;
            base = r;
            exp >>= 1;
        }
        Ok(result)
    }

    /// All monic irreducibles of the given degree, in canonical index order.
    pub fn irreducibles(field: Arc<FiniteField>, d: usize) -> Result<Vec<FqPoly>> {
        let count = (field.q() as u128).checked_pow(d as u32);
        let count = count
            .filter(|&c| c <= 1 << 22)
            .ok_or_else(|| Error::Invalid(format!("too many degree-{d} polynomials")))?;
        let mut out = Vec::new();
        for idx in 0..count as u64 {
            let f = FqPoly::monic_from_index(field.clone(), d, idx);
            if f.is_irreducible()? {
                out.push(f);
            }
        }
        Ok(out)
    }

    /// Factor into monic irreducibles with multiplicities, sorted by degree
    /// then canonical index; the leading unit is returned separately.
    pub fn factor(&self) -> Result<(FFElem, Vec<(FqPoly, u32)>)> {
        if self.is_zero() {
            return Err(Error::Invalid("cannot factor the zero polynomial".into()));
        }
        let f = &self.field;
        let unit = self.leading()?;
        let mut rest = self.scale(&f.inv(&unit)?);
        let mut factors = Vec::new();
        let mut d = 1;
        while rest.degree().unwrap_or(0) >= 1 {
            let deg_rest = rest.degree().unwrap();
            if d > deg_rest / 2 {
                // What remains is irreducible.
                factors.push((rest.clone(), 1));
                break;
            }
            for rho in FqPoly::irreducibles(f.clone(), d)? {
                if rest.degree().unwrap_or(0) < d {
                    break;
                }
                let mut mult = 0;
                loop {
                    let (q, r) = rest.divrem(&rho)?;
                    if r.is_zero() {
                        mult += 1;
                        rest = q;
                    } else {
                        break;
                    }
                }
                if mult > 0 {
                    factors.push((rho, mult));
                }
            }
            d += 1;
        }
        factors.sort_by_key(|(rho, _)| (rho.degree(), rho.monic_index()));
        Ok((unit, factors))
    }
}

/// A rational function in F_q(t), stored reduced with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFun {
    num: FqPoly,
    den: FqPoly,
}

impl fmt::Debug for RationalFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl RationalFun {
    pub fn zero(field: Arc<FiniteField>) -> RationalFun {
        RationalFun {
            num: FqPoly::zero(field.clone()),
            den: FqPoly::one(field),
        }
    }

    pub fn one(field: Arc<FiniteField>) -> RationalFun {
        RationalFun {
            num: FqPoly::one(field.clone()),
            den: FqPoly::one(field),
        }
    }

    pub fn from_poly(p: FqPoly) -> RationalFun {
        let den = FqPoly::one(p.field().clone());
        RationalFun { num: p, den }
    }

    pub fn constant(field: Arc<FiniteField>, c: FFElem) -> RationalFun {
        RationalFun::from_poly(FqPoly::constant(field, c))
    }

    /// Build and reduce num/den; error if den is zero.
    pub fn new(num: FqPoly, den: FqPoly) -> Result<RationalFun> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalFun::zero(num.field().clone()));
        }
        let g = num.gcd(&den)?;
        let (mut num, _) = num.divrem(&g)?;
        let (mut den, _) = den.divrem(&g)?;
        let f = num.field().clone();
        let lead_inv = f.inv(&den.leading()?)?;
        num = num.scale(&lead_inv);
        den = den.scale(&lead_inv);
        Ok(RationalFun { num, den })
    }

    /// t^k for any integer k (negative powers allowed).
    pub fn t_pow(field: Arc<FiniteField>, k: i64) -> RationalFun {
        if k >= 0 {
            RationalFun::from_poly(FqPoly::t_pow(field, k as usize))
        } else {
            RationalFun {
                num: FqPoly::one(field.clone()),
                den: FqPoly::t_pow(field, (-k) as usize),
            }
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.num.field()
    }

    pub fn num(&self) -> &FqPoly {
        &self.num
    }

    pub fn den(&self) -> &FqPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &RationalFun) -> Result<RationalFun> {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        RationalFun::new(num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RationalFun) -> Result<RationalFun> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFun {
        RationalFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalFun) -> Result<RationalFun> {
        RationalFun::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<RationalFun> {
        RationalFun::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RationalFun) -> Result<RationalFun> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, exp: u64) -> Result<RationalFun> {
        Ok(RationalFun {
            num: self.num.pow(exp),
            den: self.den.pow(exp),
        })
    }

    /// The P-th power for P a power of the characteristic.
    pub fn frob_pow(&self, big_p: u64) -> Result<RationalFun> {
        Ok(RationalFun {
            num: self.num.frob_pow(big_p)?,
            den: self.den.frob_pow(big_p)?,
        })
    }

    /// Order of vanishing at the finite place given by a monic irreducible.
    pub fn ord_at(&self, rho: &FqPoly) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::Invalid(
                "order of the zero function is infinite".into(),
            ));
        }
        let m_num = self.num.multiplicity_of(rho)? as i64;
        let m_den = self.den.multiplicity_of(rho)? as i64;
        Ok(m_num - m_den)
    }

    /// Order at the place at infinity: deg(den) - deg(num).
    pub fn ord_at_infinity(&self) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::Invalid(
                "order of the zero function is infinite".into(),
            ));
        }
        Ok(self.den.degree().unwrap() as i64 - self.num.degree().unwrap() as i64)
    }

    /// Push coefficients through a constant-field embedding.
    pub fn map_field(&self, emb: &crate::field::Embedding) -> RationalFun {
        RationalFun {
            num: self.num.map_field(emb),
            den: self.den.map_field(emb),
        }
    }

    /// The height-relevant degree max(deg num, deg den).
    pub fn max_degree(&self) -> usize {
        self.num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0))
    }
}
