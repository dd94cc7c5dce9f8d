//! A family of extensions of one base field sharing a single unramified level
//! `R_M`, with the subfield embeddings between them.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use num_integer::Integer;

use super::field::{Field, FieldSpec};
use super::galois::{self, AutGroup, Automorphism};
use super::lnr::{LnrElem, LnrRing};
use crate::error::{Error, Result};
use crate::padic::{BaseField, BaseRing, Precision, Rm, UnramRing};

/// One extension E/K: its `E^nr` ring and `Aut_K(E)`.
#[derive(Debug)]
pub struct Ext {
    pub field: Field,
    pub ring: LnrRing,
    pub group: AutGroup,
}

impl Ext {
    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn is_galois(&self) -> bool {
        self.group.order() == self.degree()
    }

    pub fn auto(&self, s: usize) -> &Automorphism {
        &self.group.autos[s]
    }
}

#[derive(Debug)]
pub struct Context {
    pub base_field: BaseField,
    pub precision: Precision,
    pub unr: Arc<UnramRing>,
    /// `fields[0]` is the base field itself.
    pub fields: Vec<Ext>,
    /// `(small, big)` -> image of `pi_small` in `big`.
    embeddings: BTreeMap<(usize, usize), LnrElem>,
    /// Regrown copies by level, with the image of the old generator.
    grown: Mutex<BTreeMap<usize, (Arc<Context>, Rm)>>,
}

/// Smallest level carrying every field of the family: lcm of the degrees.
pub fn default_level(fields: &[Field]) -> usize {
    fields.iter().fold(1usize, |acc, f| acc.lcm(&f.degree()))
}

impl Context {
    pub fn new(base_field: BaseField, precision: Precision, specs: &[FieldSpec]) -> Result<Self> {
        precision.validate()?;
        let base = BaseRing::new(&base_field, precision.working_digits())?;
        let mut fields = vec![Field::build(&FieldSpec::base("K"), &base)?];
        for s in specs {
            fields.push(Field::build(s, &base)?);
        }
        let m = default_level(&fields);
        Self::at_level(base_field, precision, fields, m, None)
    }

    fn at_level(
        base_field: BaseField,
        precision: Precision,
        fields: Vec<Field>,
        m: usize,
        unr: Option<Arc<UnramRing>>,
    ) -> Result<Self> {
        if m > precision.residue_degree_cap {
            return Err(Error::ResidueBudgetExceeded { needed: m, cap: precision.residue_degree_cap });
        }
        for f in &fields {
            if f.e > 6 || f.f > 6 || f.degree() > 8 {
                return Err(Error::UnsupportedDegree(format!(
                    "{}: e = {}, f = {} exceeds the caps e, f <= 6, d <= 8",
                    f.name, f.e, f.f
                )));
            }
        }
        let unr = match unr {
            Some(u) => u,
            None => {
                let base = BaseRing::new(&base_field, precision.working_digits())?;
                Arc::new(UnramRing::new(&base, m)?)
            }
        };
        let mut exts = vec![];
        for field in fields {
            let ring = LnrRing::new(&field, &unr)?;
            let group = AutGroup::compute(&ring)?;
            exts.push(Ext { field, ring, group });
        }
        let mut ctx = Context { base_field, precision, unr, fields: exts, embeddings: BTreeMap::new(), grown: Mutex::default() };
        ctx.find_embeddings()?;
        Ok(ctx)
    }

    /// Rebuilds the family at level `m2` (a multiple of the current level);
    /// also returns the image of the old generator for transporting elements.
    pub fn regrow(&self, m2: usize) -> Result<(Context, Rm)> {
        if m2 > self.precision.residue_degree_cap {
            return Err(Error::ResidueBudgetExceeded { needed: m2, cap: self.precision.residue_degree_cap });
        }
        let (unr, emb) = self.unr.grow(m2)?;
        let fields = self.fields.iter().map(|e| e.field.clone()).collect();
        let ctx = Self::at_level(self.base_field, self.precision, fields, m2, Some(unr))?;
        Ok((ctx, emb))
    }

    /// [`Context::regrow`], cached per level.
    pub fn grown(&self, m2: usize) -> Result<(Arc<Context>, Rm)> {
        if let Some(hit) = self.grown.lock().expect("cache lock").get(&m2) {
            return Ok(hit.clone());
        }
        let (ctx, emb) = self.regrow(m2)?;
        let entry = (Arc::new(ctx), emb);
        self.grown.lock().expect("cache lock").insert(m2, entry.clone());
        Ok(entry)
    }

    /// Transports an element of `E^nr` from the old level into `into`.
    pub fn transport(&self, into: &Context, gen_image: &Rm, field: usize, x: &LnrElem) -> LnrElem {
        let dst = &into.fields[field].ring;
        let c = x.c.iter().map(|c| into.unr.apply_embedding(&self.unr, gen_image, c)).collect();
        dst.from_poly_prec(x.shift, c, x.prec)
    }

    pub fn m(&self) -> usize {
        self.unr.m
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|e| e.field.name == name)
    }

    pub fn field(&self, i: usize) -> &Ext {
        &self.fields[i]
    }

    pub fn k(&self) -> &LnrRing {
        &self.fields[0].ring
    }

    fn find_embeddings(&mut self) -> Result<()> {
        let n = self.fields.len();
        for small in 0..n {
            for big in 0..n {
                let (a, b) = (&self.fields[small].field, &self.fields[big].field);
                if small == big {
                    self.embeddings.insert((small, big), self.fields[big].ring.pi_l());
                    continue;
                }
                if b.f % a.f != 0 || b.e % a.e != 0 || a.degree() > b.degree() {
                    continue;
                }
                let ring = &self.fields[big].ring;
                let poly: Vec<LnrElem> = a.eis.iter().map(|&c| ring.scalar(&ring.unr.scalar(super::field::literal(&ring.unr.base, c)))).collect();
                let roots = galois::roots_with_valuation(ring, &poly, (b.e / a.e) as i64, b.f)?;
                if let Some(r) = roots.into_iter().next() {
                    self.embeddings.insert((small, big), r.value);
                }
            }
        }
        Ok(())
    }

    /// Image of `pi_small` in `big`, if `small` is a subfield of `big`.
    pub fn embedding(&self, small: usize, big: usize) -> Option<&LnrElem> {
        self.embeddings.get(&(small, big))
    }

    pub fn is_subfield(&self, small: usize, big: usize) -> bool {
        self.embeddings.contains_key(&(small, big))
    }

    fn require(&self, small: usize, big: usize) -> Result<&LnrElem> {
        self.embedding(small, big).ok_or_else(|| {
            Error::IncompatibleTower(format!(
                "{} is not a subfield of {}",
                self.fields[small].field.name, self.fields[big].field.name
            ))
        })
    }

    /// `L^nr -> E^nr`: identity on `R_M`, `pi_L ->` its image.
    pub fn embed(&self, small: usize, big: usize, x: &LnrElem) -> Result<LnrElem> {
        let img = self.require(small, big)?;
        let src = &self.fields[small].ring;
        let dst = &self.fields[big].ring;
        let ratio = (dst.e / src.e) as i64;
        if src.is_zero(x) {
            return Ok(dst.zero_with_prec(x.prec * ratio));
        }
        let mut acc = dst.zero();
        for c in x.c.iter().rev() {
            acc = dst.add(&dst.mul(&acc, img), &dst.scalar(c));
        }
        let out = dst.mul(&acc, &dst.pow(img, x.shift)?);
        Ok(dst.with_prec(&out, x.prec * ratio))
    }

    /// Inverse of [`Context::embed`] on its image.
    pub fn descend(&self, small: usize, big: usize, y: &LnrElem) -> Result<LnrElem> {
        let img = self.require(small, big)?.clone();
        let src = &self.fields[small].ring;
        let dst = &self.fields[big].ring;
        let ratio = (dst.e / src.e) as i64;
        let el = src.e as i64;
        let kf = &self.unr.residue;
        let prec = y.prec.div_euclid(ratio);
        let mut rest = y.clone();
        let mut acc = src.zero_with_prec(prec);
        // precomputed img^j and their unit residues
        let mut pows = vec![dst.one()];
        for j in 1..src.e {
            pows.push(dst.mul(&pows[j - 1], &img));
        }
        let mut guard = 0;
        while let Some(v) = dst.val(&rest) {
            if v >= rest.prec {
                break;
            }
            if v % ratio != 0 {
                return Err(Error::IncompatibleTower(format!(
                    "element of valuation {v} does not come from {}",
                    self.fields[small].field.name
                )));
            }
            let vl = v / ratio;
            let (a, j) = (vl.div_euclid(el), vl.rem_euclid(el) as usize);
            let pia = dst.pow(&dst.pi(), a)?;
            let basis = dst.mul(&pia, &pows[j]);
            let c = kf.mul(&dst.unit_residue(&rest), &kf.inv(&dst.unit_residue(&basis)).ok_or(Error::NotInvertible)?);
            let cl = self.unr.lift(&c);
            rest = dst.sub(&rest, &dst.mul(&basis, &dst.scalar(&cl)));
            let term = src.mul(&src.mul(&src.pow(&src.pi(), a)?, &src.pi_l_pow(j as i64)), &src.scalar(&cl));
            acc = src.add(&acc, &term);
            guard += 1;
            if guard > 4 * dst.capacity() + 16 {
                return Err(Error::PrecisionLoss("descent did not terminate".into()));
            }
        }
        Ok(src.with_prec(&acc, prec))
    }

    /// Restriction of `s in Aut(E)` to a Galois subfield L.
    pub fn restrict(&self, big: usize, small: usize, s: usize) -> Result<usize> {
        let img = self.require(small, big)?;
        let e = &self.fields[big];
        let l = &self.fields[small];
        let sa = e.auto(s);
        let image = galois::apply(&e.ring, sa, img)?;
        for (t, ta) in l.group.autos.iter().enumerate() {
            if ta.k != sa.k % l.field.f {
                continue;
            }
            if e.ring.agrees(&self.embed(small, big, &ta.root)?, &image) {
                return Ok(t);
            }
        }
        Err(Error::NotGalois { found: l.group.order(), degree: l.degree() })
    }

    /// Automorphisms of `big` fixing `small` pointwise (indices into `Aut(big)`).
    pub fn fixing(&self, big: usize, small: usize) -> Result<Vec<usize>> {
        let img = self.require(small, big)?;
        let e = &self.fields[big];
        let fs = self.fields[small].field.f;
        let mut out = vec![];
        for (s, sa) in e.group.autos.iter().enumerate() {
            if sa.k % fs == 0 && e.ring.agrees(&galois::apply(&e.ring, sa, img)?, img) {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// `v_K` of an element of `E^nr` as a fraction `(num, den)` with den = e_E.
    pub fn v_k(&self, field: usize, x: &LnrElem) -> Option<(i64, i64)> {
        let r = &self.fields[field].ring;
        r.val(x).map(|v| (v, r.e as i64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclo_tower() -> Context {
        Context::new(
            BaseField::padic(3),
            Precision::default(),
            &[FieldSpec::cyclotomic("z3", 3), FieldSpec::cyclotomic("z9", 9)],
        )
        .unwrap()
    }

    #[test]
    fn embeddings_and_descent() {
        let ctx = cyclo_tower();
        assert_eq!(ctx.m(), 6);
        assert!(ctx.is_subfield(1, 2));
        assert!(ctx.is_subfield(0, 2));
        assert!(!ctx.is_subfield(2, 1));
        let l = &ctx.field(1).ring;
        let x = l.add(&l.pi_l_pow(-1), &l.from_i64(7));
        let y = ctx.embed(1, 2, &x).unwrap();
        let back = ctx.descend(1, 2, &y).unwrap();
        assert!(l.agrees(&back, &x));
        assert!(back.prec - back.shift >= 40);
        // the image of zeta_3 - 1 satisfies its Eisenstein polynomial
        let e = &ctx.field(2).ring;
        let img = ctx.embedding(1, 2).unwrap();
        let v = e.add(&e.add(&e.mul(img, img), &e.mul(&e.from_i64(3), img)), &e.from_i64(3));
        assert!(e.is_zero(&v));
    }

    #[test]
    fn restriction_is_a_homomorphism() {
        let ctx = cyclo_tower();
        let g = &ctx.field(2).group;
        let res: Vec<usize> = (0..6).map(|s| ctx.restrict(2, 1, s).unwrap()).collect();
        let h = &ctx.field(1).group;
        for s in 0..6 {
            for t in 0..6 {
                assert_eq!(res[g.table[s][t]], h.table[res[s]][res[t]]);
            }
        }
        assert_eq!(ctx.fixing(2, 1).unwrap().len(), 3);
        assert_eq!(ctx.fixing(2, 0).unwrap().len(), 6);
    }

    #[test]
    fn compositum_has_both_quadratic_subfields() {
        let spec = FieldSpec { name: "c".into(), unramified: Some(2), cyclotomic: Some(3), ..Default::default() };
        let ctx = Context::new(
            BaseField::padic(3),
            Precision::default(),
            &[FieldSpec::unramified("u2", 2), FieldSpec::cyclotomic("z3", 3), spec],
        )
        .unwrap();
        assert_eq!(ctx.m(), 4);
        assert!(ctx.is_subfield(1, 3) && ctx.is_subfield(2, 3));
        assert_eq!(ctx.fixing(3, 1).unwrap().len(), 2);
        assert_eq!(ctx.fixing(3, 2).unwrap().len(), 2);
    }
}
