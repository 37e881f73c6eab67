//! Finite fields GF(p^d) with elements encoded as integer codes.
//!
//! An element code is the integer whose base-p digits (least significant
//! first) are the coefficients of 1, x, ..., x^(d-1) in the polynomial basis
//! modulo the field's modulus. Code 0 is zero and code 1 is one.

use std::fmt;
use std::str::FromStr;

use super::AlgebraError;

/// Largest field order accepted by [`FieldContext::new`].
pub const MAX_ORDER: u64 = 1 << 32;

/// Orders up to this bound multiply through log/antilog tables.
pub const TABLE_ORDER_LIMIT: u64 = 1 << 16;

/// Identity of a field: characteristic, degree and modulus code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldId {
    pub p: u32,
    pub d: u32,
    pub modulus_code: u64,
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}/{}", self.p, self.d, self.modulus_code)
    }
}

/// Parsed form of a field spec string `p^d` or `p^d/modulusCode`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub d: u32,
    pub modulus_code: Option<u64>,
}

impl FromStr for FieldSpec {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::Parse {
            input: s.to_string(),
            position: 0,
            reason: "expected field spec of the form p^d or p^d/modulus".into(),
        };
        let s = s.trim();
        let (base, modulus) = match s.split_once('/') {
            Some((b, m)) => (b, Some(m.trim().parse::<u64>().map_err(|_| bad())?)),
            None => (s, None),
        };
        let (p, d) = match base.split_once('^') {
            Some((p, d)) => (p, d),
            None => (base, "1"),
        };
        Ok(FieldSpec {
            p: p.trim().parse().map_err(|_| bad())?,
            d: d.trim().parse().map_err(|_| bad())?,
            modulus_code: modulus,
        })
    }
}

/// Arithmetic request for [`FieldContext::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arith {
    Add(FieldElement, FieldElement),
    Sub(FieldElement, FieldElement),
    Mul(FieldElement, FieldElement),
    Div(FieldElement, FieldElement),
    Inv(FieldElement),
    Pow(FieldElement, u64),
}

/// A field element tagged with the field it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    code: u32,
    field: FieldId,
}

impl FieldElement {
    pub fn code(self) -> u32 {
        self.code
    }

    pub fn field(self) -> FieldId {
        self.field
    }
}

#[derive(Debug, Clone)]
enum Multiplier {
    Tables { log: Vec<u32>, exp: Vec<u32> },
    Polynomial,
}

/// A concrete finite field GF(p^d).
#[derive(Clone)]
pub struct FieldContext {
    p: u32,
    d: u32,
    order: u64,
    /// Monic modulus, coefficients low to high (length d + 1).
    modulus: Vec<u32>,
    /// Base-p place values p^0 .. p^(d-1).
    place: Vec<u64>,
    multiplier: Multiplier,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.d, self.modulus)
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}

impl Eq for FieldContext {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut i = 2u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Conway polynomials for p = 2 (as modulus codes), indexed by degree.
const CONWAY_2: [u64; 9] = [0, 0b11, 0b111, 0b1011, 0b1_0011, 0b10_0101, 0b101_1011, 0b1000_0011, 0b1_0001_1101];

/// Modulus code used when none is given: the Conway polynomial for p = 2 and
/// d <= 8, otherwise the smallest primitive monic polynomial in code order.
pub fn default_modulus_code(p: u32, d: u32) -> Result<u64, AlgebraError> {
    if !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    if d == 0 {
        return Err(AlgebraError::ZeroDegree);
    }
    order_of(p, d)?;
    if p == 2 && (d as usize) < CONWAY_2.len() {
        return Ok(CONWAY_2[d as usize]);
    }
    let lead = (p as u64).pow(d);
    for low in 0..lead {
        let coeffs = digits_of(lead + low, p, d as usize + 1);
        if low % p as u64 == 0 && d > 1 {
            // x divides it
            continue;
        }
        if poly_is_irreducible(&coeffs, p) && poly_is_primitive(&coeffs, p) {
            return Ok(lead + low);
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}

fn order_of(p: u32, d: u32) -> Result<u64, AlgebraError> {
    let mut order: u64 = 1;
    for _ in 0..d {
        order = order.saturating_mul(p as u64);
        if order > MAX_ORDER {
            return Err(AlgebraError::OrderTooLarge { p, d });
        }
    }
    Ok(order)
}

fn digits_of(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

fn trim(poly: &mut Vec<u32>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2) is the inverse
    pow_mod_p(a, p as u64 - 2, p)
}

fn pow_mod_p(a: u32, mut e: u64, p: u32) -> u32 {
    let (mut base, mut acc, p) = (a as u64 % p as u64, 1u64, p as u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc as u32
}

/// Remainder of `a` modulo `b` over GF(p); `b` must have a nonzero leading coefficient.
pub(crate) fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p) as u64;
    let p64 = p as u64;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - db;
        let factor = r[r.len() - 1] as u64 * lead_inv % p64;
        if factor != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = ((r[idx] as u64 + p64 - factor * bc as u64 % p64) % p64) as u32;
            }
        }
        r.pop();
        trim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    r
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub(crate) fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for dd in 1..=deg / 2 {
        let count = (p as u64).pow(dd as u32);
        for low in 0..count {
            let mut g = digits_of(low, p, dd);
            g.push(1);
            let r = poly_rem(f, &g, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_mul_mod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    poly_rem(&prod, f, p)
}

/// True when x generates the multiplicative group of GF(p)[x]/(f).
fn poly_is_primitive(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    let group = (p as u64).pow(d as u32) - 1;
    let x: Vec<u32> = if d == 1 {
        // x reduces to -f0
        vec![(p - f[0] % p) % p]
    } else {
        vec![0, 1]
    };
    let pow = |e: u64| {
        let mut acc = vec![1u32];
        let mut base = x.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, f, p);
            }
            base = poly_mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    };
    let is_one = |v: &[u32]| v[0] == 1 && v[1..].iter().all(|&c| c == 0);
    if x.iter().all(|&c| c == 0) {
        return false;
    }
    if !is_one(&pow(group)) {
        return false;
    }
    prime_factors(group).into_iter().all(|r| !is_one(&pow(group / r)))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldContext {
    /// Builds GF(p^d). With `modulus` omitted the default table is used.
    ///
    /// `modulus` is given as coefficients low to high and must be monic of
    /// degree `d` and irreducible over GF(p).
    pub fn new(p: u32, d: u32, modulus: Option<&[u32]>) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if d == 0 {
            return Err(AlgebraError::ZeroDegree);
        }
        let order = order_of(p, d)?;
        let modulus: Vec<u32> = match modulus {
            Some(m) => m.to_vec(),
            None => digits_of(default_modulus_code(p, d)?, p, d as usize + 1),
        };
        if modulus.len() != d as usize + 1 || modulus.iter().any(|&c| c >= p) {
            return Err(AlgebraError::BadModulus(format!(
                "expected {} coefficients in [0,{p})",
                d + 1
            )));
        }
        if modulus[d as usize] != 1 {
            return Err(AlgebraError::NotMonic);
        }
        if !poly_is_irreducible(&modulus, p) {
            return Err(AlgebraError::Reducible(modulus));
        }
        let place = (0..d).map(|i| (p as u64).pow(i)).collect();
        let mut field = FieldContext {
            p,
            d,
            order,
            modulus,
            place,
            multiplier: Multiplier::Polynomial,
        };
        if order <= TABLE_ORDER_LIMIT && order > 2 {
            field.multiplier = field.build_tables();
        }
        Ok(field)
    }

    /// Builds a field from a modulus code (base-p digits are the coefficients).
    pub fn with_modulus_code(p: u32, d: u32, code: u64) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let top = (p as u64).checked_pow(d + 1);
        if top.is_some_and(|t| code >= t) {
            return Err(AlgebraError::BadModulus(format!("code {code} has degree above {d}")));
        }
        let coeffs = digits_of(code, p, d as usize + 1);
        Self::new(p, d, Some(&coeffs))
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self, AlgebraError> {
        match spec.modulus_code {
            Some(code) => Self::with_modulus_code(spec.p, spec.d, code),
            None => Self::new(spec.p, spec.d, None),
        }
    }

    /// Parses and builds a field from `p^d` or `p^d/modulusCode`.
    pub fn parse(spec: &str) -> Result<Self, AlgebraError> {
        Self::from_spec(&spec.parse()?)
    }

    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self, AlgebraError> {
        Self::new(p, 1, None)
    }

    fn build_tables(&self) -> Multiplier {
        let group = self.order - 1;
        let factors = prime_factors(group);
        let generator = (2..self.order as u32)
            .find(|&g| {
                self.pow_poly(g, group) == 1
                    && factors.iter().all(|&r| self.pow_poly(g, group / r) != 1)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * group as usize];
        let mut log = vec![0u32; self.order as usize];
        let mut x = 1u32;
        for i in 0..group as usize {
            exp[i] = x;
            exp[i + group as usize] = x;
            log[x as usize] = i as u32;
            x = self.mul_poly(x, generator);
        }
        Multiplier::Tables { log, exp }
    }

    pub fn id(&self) -> FieldId {
        FieldId {
            p: self.p,
            d: self.d,
            modulus_code: self.modulus_code(),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_code(&self) -> u64 {
        self.modulus
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    /// Spec string `p^d/modulusCode`.
    pub fn spec_string(&self) -> String {
        self.id().to_string()
    }

    pub fn uses_tables(&self) -> bool {
        matches!(self.multiplier, Multiplier::Tables { .. })
    }

    pub fn is_valid(&self, code: u32) -> bool {
        (code as u64) < self.order
    }

    /// Tags a raw code with this field.
    pub fn element(&self, code: u32) -> Result<FieldElement, AlgebraError> {
        if !self.is_valid(code) {
            return Err(AlgebraError::InvalidElement {
                code,
                order: self.order,
            });
        }
        Ok(FieldElement {
            code,
            field: self.id(),
        })
    }

    /// Checked arithmetic on tagged elements.
    pub fn eval(&self, op: Arith) -> Result<FieldElement, AlgebraError> {
        let id = self.id();
        let check = |e: FieldElement| {
            if e.field != id {
                Err(AlgebraError::FieldMismatch {
                    left: id,
                    right: e.field,
                })
            } else {
                Ok(e.code)
            }
        };
        let code = match op {
            Arith::Add(a, b) => self.add(check(a)?, check(b)?),
            Arith::Sub(a, b) => self.sub(check(a)?, check(b)?),
            Arith::Mul(a, b) => self.mul(check(a)?, check(b)?),
            Arith::Div(a, b) => {
                let (a, b) = (check(a)?, check(b)?);
                self.div(a, b).ok_or(AlgebraError::DivisionByZero)?
            }
            Arith::Inv(a) => self.inv(check(a)?).ok_or(AlgebraError::DivisionByZero)?,
            Arith::Pow(a, e) => self.pow(check(a)?, e),
        };
        Ok(FieldElement { code, field: id })
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.d == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as u32;
        }
        let p = self.p as u64;
        let (mut a, mut b, mut out) = (a as u64, b as u64, 0u64);
        for &w in &self.place {
            out += ((a % p + b % p) % p) * w;
            a /= p;
            b /= p;
        }
        out as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let p = self.p as u64;
        let (mut a, mut out) = (a as u64, 0u64);
        for &w in &self.place {
            out += ((p - a % p) % p) * w;
            a /= p;
        }
        out as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.multiplier {
            Multiplier::Tables { log, exp } => exp[log[a as usize] as usize + log[b as usize] as usize],
            Multiplier::Polynomial => self.mul_poly(a, b),
        }
    }

    /// Multiplication by polynomial product and reduction, independent of
    /// the tables.
    pub fn mul_poly(&self, a: u32, b: u32) -> u32 {
        if self.d == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        if self.p == 2 {
            let (a, b) = (a as u64, b as u64);
            let mut prod = 0u64;
            for i in 0..self.d {
                if (b >> i) & 1 == 1 {
                    prod ^= a << i;
                }
            }
            let modulus = self.modulus_code();
            for i in (self.d as u64..2 * self.d as u64 - 1).rev() {
                if (prod >> i) & 1 == 1 {
                    prod ^= modulus << (i - self.d as u64);
                }
            }
            return prod as u32;
        }
        let r = poly_mul_mod(&self.coords(a), &self.coords(b), &self.modulus, self.p);
        self.from_coords(&r)
    }

    fn pow_poly(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Multiplier::Tables { log, exp } = &self.multiplier {
            let group = self.order - 1;
            let l = (log[a as usize] as u128 * (e % group) as u128 % group as u128) as usize;
            return exp[l];
        }
        let (mut base, mut acc, mut e) = (a, 1u32, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        match &self.multiplier {
            Multiplier::Tables { log, exp } => {
                let group = (self.order - 1) as usize;
                Some(exp[(group - log[a as usize] as usize) % group])
            }
            Multiplier::Polynomial => Some(self.pow(a, self.order - 2)),
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// The Frobenius map a -> a^p.
    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    /// Coordinates over GF(p) in the basis 1, x, ..., x^(d-1).
    pub fn coords(&self, a: u32) -> Vec<u32> {
        digits_of(a as u64, self.p, self.d as usize)
    }

    pub fn from_coords(&self, coords: &[u32]) -> u32 {
        coords
            .iter()
            .zip(&self.place)
            .map(|(&c, &w)| c as u64 * w)
            .sum::<u64>() as u32
    }

    /// Whether `a` lies in the prime subfield GF(p).
    pub fn in_prime_field(&self, a: u32) -> bool {
        a < self.p
    }

    /// Product of a prime-field scalar with an element.
    pub fn scale_prime(&self, s: u32, a: u32) -> u32 {
        match s {
            0 => 0,
            1 => a,
            _ => self.mul(s, a),
        }
    }

    /// Iterator over all element codes.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order as u32
    }

    /// Minimal polynomial degree of `a` over GF(p), i.e. the size of its
    /// Frobenius orbit.
    pub fn element_degree(&self, a: u32) -> u32 {
        let mut x = self.frobenius(a);
        let mut deg = 1;
        while x != a {
            x = self.frobenius(x);
            deg += 1;
        }
        deg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_defaults_to_x2_x_1() {
        let f = FieldContext::new(2, 2, None).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.modulus_code(), 7);
        assert_eq!(f.spec_string(), "2^2/7");
        // omega * omega = omega + 1
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.inv(2), Some(3));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over GF(2)
        assert!(matches!(
            FieldContext::new(2, 2, Some(&[1, 0, 1])),
            Err(AlgebraError::Reducible(_))
        ));
        assert!(matches!(
            FieldContext::new(2, 2, Some(&[1, 1, 0])),
            Err(AlgebraError::NotMonic)
        ));
        assert!(matches!(FieldContext::new(4, 1, None), Err(AlgebraError::NotPrime(4))));
        assert!(matches!(
            FieldContext::new(2, 33, None),
            Err(AlgebraError::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn conway_table_entries_are_primitive() {
        for d in 1..CONWAY_2.len() as u32 {
            let coeffs = digits_of(CONWAY_2[d as usize], 2, d as usize + 1);
            assert_eq!(coeffs[d as usize], 1);
            assert!(poly_is_irreducible(&coeffs, 2), "degree {d}");
            assert!(poly_is_primitive(&coeffs, 2), "degree {d}");
        }
    }

    #[test]
    fn spec_strings() {
        let s: FieldSpec = "2^2/7".parse().unwrap();
        assert_eq!(s, FieldSpec { p: 2, d: 2, modulus_code: Some(7) });
        let s: FieldSpec = "3".parse().unwrap();
        assert_eq!(s, FieldSpec { p: 3, d: 1, modulus_code: None });
        assert!("x^2".parse::<FieldSpec>().is_err());
        let f = FieldContext::parse("2^4").unwrap();
        assert_eq!(f.modulus_code(), 19);
        assert!(FieldContext::parse("2^2/5").is_err());
    }

    #[test]
    fn coords_digit_expansion() {
        let f4 = FieldContext::new(2, 2, None).unwrap();
        assert_eq!(f4.coords(2), vec![0, 1]);
        assert_eq!(f4.coords(3), vec![1, 1]);
        let f16 = FieldContext::new(2, 4, None).unwrap();
        assert_eq!(f16.coords(5), vec![1, 0, 1, 0]);
        let f9 = FieldContext::new(3, 2, None).unwrap();
        assert_eq!(f9.coords(7), vec![1, 2]);
        assert_eq!(f9.from_coords(&[1, 2]), 7);
    }

    #[test]
    fn mixed_field_operands_rejected() {
        let f4 = FieldContext::new(2, 2, None).unwrap();
        let f8 = FieldContext::new(2, 3, None).unwrap();
        let a = f4.element(2).unwrap();
        let b = f8.element(2).unwrap();
        assert!(matches!(
            f4.eval(Arith::Add(a, b)),
            Err(AlgebraError::FieldMismatch { .. })
        ));
        assert!(matches!(
            f4.eval(Arith::Div(a, f4.element(0).unwrap())),
            Err(AlgebraError::DivisionByZero)
        ));
        assert!(f4.element(4).is_err());
        assert_eq!(f4.eval(Arith::Pow(a, 3)).unwrap().code(), 1);
    }

    #[test]
    fn element_degree_over_prime_field() {
        let f16 = FieldContext::new(2, 4, None).unwrap();
        assert_eq!(f16.element_degree(1), 1);
        assert_eq!(f16.element_degree(2), 4);
        // GF(4) inside GF(16) is {0, 1, z^5, z^10}
        let w = f16.pow(2, 5);
        assert_eq!(f16.element_degree(w), 2);
    }
}
