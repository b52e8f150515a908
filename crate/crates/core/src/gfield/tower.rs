//! The extension `F_{q^n} = F_q[z]/(v)` over a [`BaseField`].

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{poly, BaseField, Field};
use crate::error::{Error, Result};

/// Element of `F_{q^n}`: exactly `n` packed F_q coefficients of `1, z, ..., z^{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GFElement(pub Vec<u64>);

impl GFElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

/// Serializable description of both moduli; sufficient to rebuild a tower.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldModel {
    pub p: u64,
    pub s: usize,
    pub n: usize,
    /// Monic modulus of F_q over F_p as base-p digits, constant term first.
    pub base_modulus: Vec<u64>,
    /// Monic modulus of F_{q^n} over F_q; each coefficient as `s` base-p digits.
    pub ext_modulus: Vec<Vec<u64>>,
}

#[derive(Debug, Clone)]
pub struct FieldTower {
    base: BaseField,
    n: usize,
    modulus: Vec<u64>,
    /// `z^{q i} mod v` for `i < n`: the Frobenius map as a matrix.
    frob: Vec<Vec<u64>>,
    q: BigUint,
    big_q: BigUint,
}

impl FieldTower {
    /// Builds the tower, verifying that `modulus` (packed F_q coefficients,
    /// constant term first) is monic and irreducible of degree `n >= 1`.
    pub fn new(base: BaseField, modulus: Vec<u64>) -> Result<Self> {
        let n = modulus.len().checked_sub(1).filter(|&n| n >= 1).ok_or(Error::NotMonic)?;
        if modulus[n] != 1 || modulus.iter().any(|&c| c >= base.q()) {
            return Err(Error::NotMonic);
        }
        if !poly::is_irreducible(&base, &modulus)? {
            return Err(Error::PreconditionFailed("extension modulus is reducible".into()));
        }
        let q = BigUint::from(base.q());
        let big_q = q.pow(n as u32);
        let z = poly::monomial(&base, 1);
        let zq = poly::powmod(&base, &z, &q, &modulus)?;
        let mut frob = Vec::with_capacity(n);
        let mut cur = poly::rem(&base, &poly::one(&base), &modulus)?;
        for _ in 0..n {
            let mut padded = cur.clone();
            padded.resize(n, 0);
            frob.push(padded);
            cur = poly::mulmod(&base, &cur, &zq, &modulus)?;
        }
        Ok(FieldTower { base, n, modulus, frob, q, big_q })
    }

    pub fn from_model(m: &FieldModel) -> Result<Self> {
        let base = if m.s == 1 && m.base_modulus == [0, 1] {
            BaseField::prime(m.p)?
        } else {
            BaseField::new(m.p, m.base_modulus.clone())?
        };
        if base.s() != m.s || m.ext_modulus.len() != m.n + 1 {
            return Err(Error::ShapeMismatch);
        }
        let modulus = m
            .ext_modulus
            .iter()
            .map(|d| if d.len() == m.s { base.from_digits(d) } else { None })
            .collect::<Option<Vec<u64>>>()
            .ok_or(Error::ShapeMismatch)?;
        Self::new(base, modulus)
    }

    pub fn model(&self) -> FieldModel {
        FieldModel {
            p: self.base.p(),
            s: self.base.s(),
            n: self.n,
            base_modulus: self.base.modulus().to_vec(),
            ext_modulus: self.modulus.iter().map(|&c| self.base.digits(c)).collect(),
        }
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn s(&self) -> usize {
        self.base.s()
    }

    /// `q = p^s`.
    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// `Q = q^n`.
    pub fn big_q(&self) -> &BigUint {
        &self.big_q
    }

    /// Extension modulus as packed F_q coefficients.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The constant `c` of F_q viewed in F_{q^n}.
    pub fn embed(&self, c: u64) -> GFElement {
        let mut v = vec![0; self.n];
        v[0] = c;
        GFElement(v)
    }

    /// The class of `z`.
    pub fn z(&self) -> GFElement {
        let zpoly = poly::rem(&self.base, &poly::monomial(&self.base, 1), &self.modulus).unwrap();
        self.of_poly(&zpoly)
    }

    fn of_poly(&self, a: &[u64]) -> GFElement {
        let mut v = a.to_vec();
        v.resize(self.n, 0);
        GFElement(v)
    }

    /// Element from an `n x s` matrix of base-p digits.
    pub fn from_matrix(&self, rows: &[Vec<u64>]) -> Result<GFElement> {
        if rows.len() != self.n {
            return Err(Error::ShapeMismatch);
        }
        rows.iter()
            .map(|d| if d.len() == self.s() { self.base.from_digits(d) } else { None })
            .collect::<Option<Vec<u64>>>()
            .map(GFElement)
            .ok_or(Error::ShapeMismatch)
    }

    pub fn to_matrix(&self, a: &GFElement) -> Vec<Vec<u64>> {
        a.0.iter().map(|&c| self.base.digits(c)).collect()
    }

    /// Checks that `a` has the shape and digit range of this tower.
    pub fn check(&self, a: &GFElement) -> Result<()> {
        if a.0.len() == self.n && a.0.iter().all(|&c| c < self.base.q()) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch)
        }
    }

    /// `a^q`, linear over F_q.
    pub fn frobenius_once(&self, a: &GFElement) -> GFElement {
        let b = &self.base;
        let mut out = vec![0u64; self.n];
        for (c, row) in a.0.iter().zip(&self.frob) {
            if *c == 0 {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o = b.add(o, &b.mul(c, r));
            }
        }
        GFElement(out)
    }

    /// `a^{q^i}` with `i` reduced mod n.
    pub fn frobenius(&self, a: &GFElement, i: i64) -> GFElement {
        let k = i.rem_euclid(self.n as i64);
        let mut x = a.clone();
        for _ in 0..k {
            x = self.frobenius_once(&x);
        }
        x
    }

    /// `[a, a^q, ..., a^{q^{n-1}}]`.
    pub fn frobenius_orbit(&self, a: &GFElement) -> Vec<GFElement> {
        let mut out = Vec::with_capacity(self.n);
        let mut x = a.clone();
        for _ in 0..self.n {
            let next = self.frobenius_once(&x);
            out.push(x);
            x = next;
        }
        out
    }
}

impl Field for FieldTower {
    type Elem = GFElement;

    fn zero(&self) -> GFElement {
        GFElement(vec![0; self.n])
    }

    fn one(&self) -> GFElement {
        self.embed(1)
    }

    fn is_zero(&self, a: &GFElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &GFElement, b: &GFElement) -> GFElement {
        GFElement(a.0.iter().zip(&b.0).map(|(x, y)| self.base.add(x, y)).collect())
    }

    fn sub(&self, a: &GFElement, b: &GFElement) -> GFElement {
        GFElement(a.0.iter().zip(&b.0).map(|(x, y)| self.base.sub(x, y)).collect())
    }

    fn neg(&self, a: &GFElement) -> GFElement {
        GFElement(a.0.iter().map(|x| self.base.neg(x)).collect())
    }

    fn mul(&self, a: &GFElement, b: &GFElement) -> GFElement {
        let (f, n) = (&self.base, self.n);
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, x) in a.0.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                prod[i + j] = f.add(&prod[i + j], &f.mul(x, y));
            }
        }
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                prod[i - n + j] = f.sub(&prod[i - n + j], &f.mul(&c, &self.modulus[j]));
            }
        }
        prod.truncate(n);
        GFElement(prod)
    }

    fn inv(&self, a: &GFElement) -> Result<GFElement> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        let t = poly::trim(&self.base, a.0.clone());
        Ok(self.of_poly(&poly::inv_mod(&self.base, &t, &self.modulus)?))
    }

    fn order(&self) -> BigUint {
        self.big_q.clone()
    }

    fn characteristic(&self) -> u64 {
        self.base.p()
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> GFElement {
        GFElement((0..self.n).map(|_| self.base.random(rng)).collect())
    }

    fn element(&self, index: &BigUint) -> GFElement {
        assert!(index < &self.big_q, "index below q^n");
        let mut rest = index.clone();
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let (d, r) = rest.div_rem(&self.q);
            out.push(r.to_u64().unwrap());
            rest = d;
        }
        debug_assert!(rest.is_zero());
        GFElement(out)
    }
}

fn random_monic<F: Field, R: Rng>(f: &F, deg: usize, rng: &mut R) -> Vec<F::Elem> {
    let mut v: Vec<F::Elem> = (0..deg).map(|_| f.random(rng)).collect();
    v.push(f.one());
    v
}

/// Builds `F_p ⊂ F_{p^s} ⊂ F_{p^{sn}}` with moduli found by a seeded random
/// search; the same `(p, s, n, seed)` always gives the same tower.
pub fn make_tower(p: u64, s: usize, n: usize, seed: u64) -> Result<FieldTower> {
    if s == 0 || n == 0 {
        return Err(Error::PreconditionFailed("s >= 1 and n >= 1".into()));
    }
    let fp = BaseField::prime(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = if s == 1 {
        fp
    } else {
        loop {
            let u = random_monic(&fp, s, &mut rng);
            if poly::is_irreducible(&fp, &u)? {
                break BaseField::new(p, u)?;
            }
        }
    };
    let modulus = if n == 1 {
        vec![0, 1]
    } else {
        loop {
            let v = random_monic(&base, n, &mut rng);
            if poly::is_irreducible(&base, &v)? {
                break v;
            }
        }
    };
    FieldTower::new(base, modulus)
}
