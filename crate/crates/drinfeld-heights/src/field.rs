//! Finite fields F_{p^e} with explicit moduli, subfield embeddings, and the
//! small F_p linear algebra used to solve additive (Frobenius-linearized)
//! equations.
//!
//! Elements are coordinate vectors over F_p in the power basis of the
//! extension generator; the field object owns all arithmetic. Everything is
//! desk scale: fields stay small enough to enumerate, which the exception-set
//! and subspace machinery rely on.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Upper bound on field size for operations that enumerate all elements
/// (root search for embeddings, additive kernels, residue enumerations).
const ENUMERATION_CAP: u64 = 1 << 20;

/// A finite field F_{p^e}, e >= 1, as F_p[X]/(modulus).
///
/// For e = 1 the modulus is X and elements are single coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    e: u32,
    /// Monic modulus of degree e over F_p, coefficients little-endian,
    /// length e + 1.
    modulus: Vec<u64>,
}

/// An element of a [`FiniteField`]: `coords[k]` is the coefficient of the
/// generator power omega^k, reduced mod p, with length equal to the
/// extension degree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FFElem {
    coords: Vec<u64>,
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FFElem{:?}", self.coords)
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.e)
    }
}

impl FFElem {
    /// Coordinate vector over F_p (little-endian in the generator power basis).
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomial helpers over F_p, little-endian coefficient vectors with no
// trailing zeros.

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_scale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
    fp_trim(a.iter().map(|&x| x * c % p).collect())
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_inv_scalar(c: u64, p: u64) -> u64 {
    // Fermat inverse; p is prime and c nonzero mod p.
    let mut result = 1u64;
    let mut base = c % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// Remainder of a by b (b nonzero), over F_p.
fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = fp_trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = fp_trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = fp_inv_scalar(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for k in 0..=db {
            let idx = dr - db + k;
            let sub = c * b[k] % p;
            r[idx] = (r[idx] + p - sub % p) % p;
        }
        r = fp_trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = fp_trim(a.to_vec());
    let mut b = fp_trim(b.to_vec());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        if lead != 1 {
            let inv = fp_inv_scalar(lead, p);
            a = fp_scale(&a, inv, p);
        }
    }
    a
}

fn fp_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    fp_rem(&fp_mul(a, b, p), m, p)
}

/// X^(p^k) mod m via k successive p-th powers.
fn fp_x_pow_pk_mod(m: &[u64], k: u32, p: u64) -> Vec<u64> {
    let mut cur = vec![0, 1]; // X
    for _ in 0..k {
        cur = fp_powmod(&cur, p, m, p);
    }
    cur
}

fn fp_powmod(a: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = fp_rem(a, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            result = fp_mulmod(&result, &base, m, p);
        }
        base = fp_mulmod(&base, &base, m, p);
        exp >>= 1;
    }
    result
}

/// Irreducibility of a monic degree-e polynomial over F_p: it is reducible
/// exactly when it shares a factor with X^(p^k) - X for some k <= e/2.
fn fp_is_irreducible(m: &[u64], p: u64) -> bool {
    let m = fp_trim(m.to_vec());
    let e = m.len() - 1;
    if e == 0 {
        return false;
    }
    if e == 1 {
        return true;
    }
    for k in 1..=(e as u32 / 2) {
        let xpk = fp_x_pow_pk_mod(&m, k, p);
        // X^(p^k) - X mod m
        let mut diff = xpk;
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        let diff = fp_trim(diff);
        if diff.is_empty() {
            return false;
        }
        let g = fp_gcd(&diff, &m, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl FiniteField {
    /// Prime field F_p.
    pub fn prime(p: u64) -> Result<Arc<FiniteField>> {
        if !is_prime_u64(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(Arc::new(FiniteField {
            p,
            e: 1,
            modulus: vec![0, 1],
        }))
    }

    /// F_{p^e} with the canonical modulus: monic degree-e polynomials are
    /// scanned in base-p coefficient order (constant coefficient fastest)
    /// and the first irreducible one is taken.
    pub fn extension(p: u64, e: u32) -> Result<Arc<FiniteField>> {
        if e == 0 {
            return Err(Error::Invalid("extension degree must be >= 1".into()));
        }
        if e == 1 {
            return Self::prime(p);
        }
        if !is_prime_u64(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        let count = p.checked_pow(e).filter(|&c| c <= ENUMERATION_CAP).ok_or_else(|| {
            Error::Invalid(format!("field size {p}^{e} exceeds enumeration cap"))
        })?;
        for idx in 0..count {
            let mut coeffs = index_to_digits(idx, p, e as usize);
            coeffs.push(1); // monic
            if fp_is_irreducible(&coeffs, p) {
                return Ok(Arc::new(FiniteField { p, e, modulus: coeffs }));
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over F_p")
    }

    /// F_{p^e} with an explicit monic modulus (little-endian, length e + 1),
    /// verified irreducible.
    pub fn with_modulus(p: u64, e: u32, modulus: Vec<u64>) -> Result<Arc<FiniteField>> {
        if !is_prime_u64(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if e == 0 || modulus.len() != e as usize + 1 {
            return Err(Error::Invalid(
                "modulus length must equal extension degree + 1".into(),
            ));
        }
        let modulus: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        if *modulus.last().unwrap() != 1 {
            return Err(Error::Invalid("modulus must be monic".into()));
        }
        if e > 1 && !fp_is_irreducible(&modulus, p) {
            return Err(Error::NotIrreducible(format!(
                "modulus {modulus:?} over F_{p}"
            )));
        }
        Ok(Arc::new(FiniteField { p, e, modulus }))
    }

    /// Characteristic p.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree over F_p.
    pub fn e(&self) -> u32 {
        self.e
    }

    /// Field size p^e.
    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// The defining modulus (little-endian over F_p).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Additive zero.
    pub fn zero(&self) -> FFElem {
        FFElem {
            coords: vec![0; self.e as usize],
        }
    }

    /// Multiplicative one.
    pub fn one(&self) -> FFElem {
        let mut coords = vec![0; self.e as usize];
        coords[0] = 1;
        FFElem { coords }
    }

    /// The extension generator omega (the class of X); in a prime field this
    /// is the residue 1.
    pub fn generator(&self) -> FFElem {
        if self.e == 1 {
            return self.one();
        }
        let mut coords = vec![0; self.e as usize];
        coords[1] = 1;
        FFElem { coords }
    }

    /// Element from an integer residue (lands in the prime subfield).
    pub fn from_int(&self, n: i64) -> FFElem {
        let r = n.rem_euclid(self.p as i64) as u64;
        let mut coords = vec![0; self.e as usize];
        coords[0] = r;
        FFElem { coords }
    }

    /// Element from explicit coordinates (little-endian over F_p); shorter
    /// vectors are zero-padded.
    pub fn from_coords(&self, coords: &[u64]) -> Result<FFElem> {
        if coords.len() > self.e as usize {
            return Err(Error::Invalid(format!(
                "coordinate vector of length {} in a degree-{} extension",
                coords.len(),
                self.e
            )));
        }
        let mut c: Vec<u64> = coords.iter().map(|&x| x % self.p).collect();
        c.resize(self.e as usize, 0);
        Ok(FFElem { coords: c })
    }

    /// Canonical index of an element: its coordinate vector read as a base-p
    /// number (coords[0] least significant). Used for deterministic
    /// enumeration and tie-breaking.
    pub fn index_of(&self, x: &FFElem) -> u64 {
        let mut idx = 0u64;
        for &c in x.coords.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    /// Element with the given canonical index.
    pub fn elem_from_index(&self, idx: u64) -> FFElem {
        FFElem {
            coords: index_to_digits(idx, self.p, self.e as usize),
        }
    }

    /// Iterator over all q elements in canonical index order.
    pub fn all_elements(&self) -> impl Iterator<Item = FFElem> + '_ {
        (0..self.q()).map(move |i| self.elem_from_index(i))
    }

    /// True if x is the additive zero.
    pub fn is_zero(&self, x: &FFElem) -> bool {
        x.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        FFElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        FFElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FFElem) -> FFElem {
        FFElem {
            coords: a.coords.iter().map(|&x| (self.p - x) % self.p).collect(),
        }
    }

    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        if self.e == 1 {
            return FFElem {
                coords: vec![a.coords[0] * b.coords[0] % self.p],
            };
        }
        let prod = fp_mulmod(&a.coords, &b.coords, &self.modulus, self.p);
        let mut coords = prod;
        coords.resize(self.e as usize, 0);
        FFElem { coords }
    }

    /// Multiplicative inverse; error on zero.
    pub fn inv(&self, a: &FFElem) -> Result<FFElem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        // x^(q-2) = x^{-1} in F_q*.
        Ok(self.pow(a, self.q() - 2))
    }

    /// Power with a u64 exponent by square-and-multiply.
    pub fn pow(&self, a: &FFElem, mut exp: u64) -> FFElem {
        let mut result = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        result
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: &FFElem) -> FFElem {
        self.pow(a, self.p)
    }

    /// x -> x^(s^i) where s = p^es is the size of a subfield whose Frobenius
    /// we iterate. Callers pass es = e of the acting subfield.
    pub fn pow_frobenius(&self, a: &FFElem, es: u32, i: u32) -> FFElem {
        let mut x = a.clone();
        for _ in 0..(es as u64 * i as u64) {
            x = self.frobenius(&x);
        }
        x
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: &FFElem) -> Result<u64> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        let mut n = 1u64;
        let mut x = a.clone();
        while x != self.one() {
            x = self.mul(&x, a);
            n += 1;
        }
        Ok(n)
    }
}

fn index_to_digits(mut idx: u64, p: u64, len: usize) -> Vec<u64> {
    let mut digits = vec![0u64; len];
    for d in digits.iter_mut() {
        *d = idx % p;
        idx /= p;
    }
    digits
}

/// An F_p-algebra embedding F_{p^a} -> F_{p^b} (a | b), determined by the
/// image of the source generator: the root of the source modulus in the
/// target with the smallest canonical index.
#[derive(Clone, Debug)]
pub struct Embedding {
    from: Arc<FiniteField>,
    to: Arc<FiniteField>,
    /// Images of the source basis powers omega^0 .. omega^(a-1).
    basis_images: Vec<FFElem>,
}

impl Embedding {
    /// Build the canonical embedding; errors if the degrees are incompatible
    /// or the characteristics differ.
    pub fn new(from: Arc<FiniteField>, to: Arc<FiniteField>) -> Result<Embedding> {
        if from.p() != to.p() {
            return Err(Error::FieldMismatch(format!(
                "characteristics {} and {}",
                from.p(),
                to.p()
            )));
        }
        if to.e() % from.e() != 0 {
            return Err(Error::FieldMismatch(format!(
                "degree {} does not divide {}",
                from.e(),
                to.e()
            )));
        }
        if to.q() > ENUMERATION_CAP {
            return Err(Error::Invalid(
                "target field exceeds enumeration cap for embedding search".into(),
            ));
        }
        let gen_image = if from.e() == 1 {
            to.one()
        } else {
            let mut found = None;
            for cand in to.all_elements() {
                // Evaluate the source modulus (coeffs in F_p) at cand.
                let mut acc = to.zero();
                for &c in from.modulus().iter().rev() {
                    acc = to.mul(&acc, &cand);
                    acc = to.add(&acc, &to.from_int(c as i64));
                }
                if to.is_zero(&acc) {
                    found = Some(cand);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::FieldMismatch("source modulus has no root in target".into())
            })?
        };
        let mut basis_images = Vec::with_capacity(from.e() as usize);
        let mut pw = to.one();
        for _ in 0..from.e() {
            basis_images.push(pw.clone());
            pw = to.mul(&pw, &gen_image);
        }
        Ok(Embedding {
            from,
            to,
            basis_images,
        })
    }

    /// The identity embedding of a field into itself.
    pub fn identity(field: Arc<FiniteField>) -> Embedding {
        let mut basis_images = Vec::with_capacity(field.e() as usize);
        let mut pw = field.one();
        for k in 0..field.e() {
            basis_images.push(pw.clone());
            if k + 1 < field.e() {
                pw = field.mul(&pw, &field.generator());
            }
        }
        Embedding {
            from: field.clone(),
            to: field,
            basis_images,
        }
    }

    pub fn source(&self) -> &Arc<FiniteField> {
        &self.from
    }

    pub fn target(&self) -> &Arc<FiniteField> {
        &self.to
    }

    /// Apply the embedding to an element of the source field.
    pub fn apply(&self, x: &FFElem) -> FFElem {
        let mut acc = self.to.zero();
        for (k, img) in self.basis_images.iter().enumerate() {
            let c = x.coords()[k];
            if c != 0 {
                let scaled = self.to.mul(img, &self.to.from_int(c as i64));
                acc = self.to.add(&acc, &scaled);
            }
        }
        acc
    }
}

/// Write q as p^e for a prime p.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::Invalid(format!("{q} is not a prime power")));
    }
    let mut p = q;
    for cand in 2..=q {
        if cand * cand > q {
            break;
        }
        if q % cand == 0 {
            p = cand;
            break;
        }
    }
    let mut e = 0u32;
    let mut pw = 1u64;
    while pw < q {
        pw = pw.checked_mul(p).ok_or_else(|| {
            Error::Invalid(format!("{q} is not a prime power"))
        })?;
        e += 1;
    }
    if pw != q {
        return Err(Error::Invalid(format!("{q} is not a prime power")));
    }
    Ok((p, e))
}

/// Rank of a matrix over F_p (rows of equal length).
pub fn fp_rank(p: u64, rows: &[Vec<u64>]) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x % p).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..m.len()).find(|&i| m[i][col] != 0);
        let Some(pivot) = pivot else { continue };
        m.swap(rank, pivot);
        let inv = fp_inv_scalar(m[rank][col], p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != rank && m[i][col] != 0 {
                let c = m[i][col];
                for j in 0..ncols {
                    let sub = c * m[rank][j] % p;
                    m[i][j] = (m[i][j] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Solutions of a linear system over F_p: all x with Ax = b, returned as
/// (particular, nullspace basis); None if inconsistent.
fn fp_solve(
    p: u64,
    a: &[Vec<u64>],
    b: &[u64],
) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r: Vec<u64> = row.iter().map(|&x| x % p).collect();
            r.push(rhs % p);
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..nrows).find(|&i| m[i][col] != 0);
        let Some(pivot) = pivot else { continue };
        m.swap(rank, pivot);
        let inv = fp_inv_scalar(m[rank][col], p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..nrows {
            if i != rank && m[i][col] != 0 {
                let c = m[i][col];
                for j in 0..=ncols {
                    let sub = c * m[rank][j] % p;
                    m[i][j] = (m[i][j] + p - sub) % p;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    for row in m.iter().skip(rank) {
        if row[ncols] != 0 {
            return None;
        }
    }
    let mut particular = vec![0u64; ncols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        particular[col] = m[r][ncols];
    }
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut null_basis = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![0u64; ncols];
        v[fc] = 1;
        for (r, &col) in pivot_cols.iter().enumerate() {
            v[col] = (p - m[r][fc] % p) % p;
        }
        null_basis.push(v);
    }
    Some((particular, null_basis))
}

/// All solutions x in k of sum_j c_j x^(E_j) = rhs, where each E_j is a power
/// of the characteristic (so the left side is F_p-linear). Returned in
/// canonical index order. The solution count is p^nullity and is capped.
pub fn additive_solve(
    k: &FiniteField,
    terms: &[(FFElem, u64)],
    rhs: &FFElem,
) -> Result<Vec<FFElem>> {
    for &(_, exp) in terms {
        let mut e = exp;
        while e % k.p() == 0 {
            e /= k.p();
        }
        if e != 1 {
            return Err(Error::Invalid(format!(
                "exponent {exp} is not a power of the characteristic {}",
                k.p()
            )));
        }
    }
    let n = k.e() as usize;
    // Matrix columns: images of the basis omega^j under the additive map.
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n);
    let mut basis = k.one();
    for j in 0..n {
        let mut img = k.zero();
        for (c, exp) in terms {
            let t = k.mul(c, &k.pow(&basis, *exp));
            img = k.add(&img, &t);
        }
        cols.push(img.coords().to_vec());
        if j + 1 < n {
            basis = k.mul(&basis, &k.generator());
        }
    }
    // Row-major matrix with rows = F_p coordinates.
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect();
    let Some((particular, null_basis)) = fp_solve(k.p(), &rows, rhs.coords()) else {
        return Ok(vec![]);
    };
    let count = k.p().checked_pow(null_basis.len() as u32).filter(|&c| c <= ENUMERATION_CAP);
    let count = count.ok_or_else(|| Error::Invalid("additive solution space too large".into()))?;
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let digits = index_to_digits(idx, k.p(), null_basis.len());
        let mut v = particular.clone();
        for (d, nb) in digits.iter().zip(&null_basis) {
            for (vi, nbi) in v.iter_mut().zip(nb) {
                *vi = (*vi + d * nbi) % k.p();
            }
        }
        out.push(k.from_coords(&v)?);
    }
    out.sort_by_key(|x| k.index_of(x));
    Ok(out)
}

/// Kernel of the additive map sum_j c_j x^(E_j) on k, in canonical index
/// order (always contains zero).
pub fn additive_kernel(k: &FiniteField, terms: &[(FFElem, u64)]) -> Result<Vec<FFElem>> {
    additive_solve(k, terms, &k.zero())
}
