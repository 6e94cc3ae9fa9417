//! The extended affine Weyl group: semidirect product of the cocharacter
//! lattice with the finite Weyl group.
//!
//! Conventions, pinned by internal anchors and cross-validated in tests:
//! an element w = t^lam * u acts on the coweight space by v -> lam + u(v);
//! the length is computed by the Iwahori-Matsumoto sum
//! `sum_{a>0, u^{-1}a>0} |<lam,a>| + sum_{a>0, u^{-1}a<0} |<lam,a>-1|`,
//! so `len(t^lam) = <lam, 2rho>` for dominant lam and the affine simple
//! reflection is t^{theta^vee} s_theta. The geometric tests use the
//! fundamental alcove of this action, the one whose walls the affine
//! simple reflections fix: its interior pairs into (0, 1) with every
//! positive root, and the critical strips are the unit strips
//! 0 < <v, a> < 1 around those walls.

use crate::error::{AdlvError, Result};
use crate::linalg::{diagonalize, Mat, Rat, MAXN};
use crate::root_system::{Coweight, FiniteWeylElement, LatticeMode, RootDatum};
use crate::sigma_classes::ClassInvariant;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use std::sync::RwLock;

/// Element w = t^lam * u of the Iwahori-Weyl group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElement {
    pub lam: Coweight,
    pub fin: FiniteWeylElement,
}

impl AffineElement {
    pub fn translation(lam: Coweight, datum: &RootDatum) -> Self {
        AffineElement { lam, fin: datum.identity_w0() }
    }

    pub fn from_finite(u: FiniteWeylElement) -> Self {
        AffineElement { lam: Coweight::zero(), fin: u }
    }
}

/// Image of the Kottwitz map: an element of the sigma-coinvariants of
/// X_* / (coroot lattice), in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KappaClass(pub Vec<i64>);

/// Unique decomposition w = x * t^lam * y with lam dominant and
/// t^lam * y of minimal length in its W0-coset.
#[derive(Debug, Clone)]
pub struct CosetDecomposition {
    pub x: FiniteWeylElement,
    pub lam: Coweight,
    pub y: FiniteWeylElement,
}

/// Finite-abelian-quotient map: lambda |-> (U lambda) mod diag, keeping
/// the coordinates with modulus > 1.
pub(crate) struct QuotientMap {
    u: Vec<Vec<i64>>,
    diag: Vec<i64>,
    keep: Vec<usize>,
}

impl QuotientMap {
    fn build(columns: Vec<Vec<i64>>, n: usize) -> QuotientMap {
        // `columns` are generators of the sublattice; assemble the n x m
        // relation matrix and diagonalize.
        let m = columns.len();
        let mut rel = vec![vec![0i64; m]; n];
        for (j, col) in columns.iter().enumerate() {
            for i in 0..n {
                rel[i][j] = col[i];
            }
        }
        let d = diagonalize(&rel);
        let keep = (0..n).filter(|&i| d.diag[i] != 1).collect();
        QuotientMap { u: d.u, diag: d.diag, keep }
    }

    pub fn map(&self, lam: &Coweight) -> Vec<i64> {
        let n = self.u.len();
        let mut out = Vec::with_capacity(self.keep.len());
        for &i in &self.keep {
            let mut acc = 0i64;
            for j in 0..n {
                acc += self.u[i][j] * lam.c[j];
            }
            out.push(acc.rem_euclid(self.diag[i]));
        }
        out
    }

    pub fn order(&self) -> i64 {
        self.keep.iter().map(|&i| self.diag[i]).product()
    }
}

pub(crate) struct StraightRegistry {
    pub done_radius: i64,
    pub map: FxHashMap<ClassInvariant, u32>,
}

pub(crate) struct AffineCache {
    /// Affine simple reflections, ordered s0, s1, ..., sn.
    pub stilde: Vec<AffineElement>,
    /// Length-zero elements, sorted canonically; omega[0] is the identity.
    pub omega: Vec<AffineElement>,
    pub quot_plain: QuotientMap,
    pub quot_sigma: QuotientMap,
    pub omega_by_component: FxHashMap<Vec<i64>, u16>,
    pub spheres: RwLock<Vec<Vec<AffineElement>>>,
    pub straight: RwLock<StraightRegistry>,
}

impl AffineCache {
    pub fn empty() -> Self {
        AffineCache {
            stilde: Vec::new(),
            omega: Vec::new(),
            quot_plain: QuotientMap { u: Vec::new(), diag: Vec::new(), keep: Vec::new() },
            quot_sigma: QuotientMap { u: Vec::new(), diag: Vec::new(), keep: Vec::new() },
            omega_by_component: FxHashMap::default(),
            spheres: RwLock::new(Vec::new()),
            straight: RwLock::new(StraightRegistry { done_radius: -1, map: FxHashMap::default() }),
        }
    }

    pub fn build(d: &RootDatum) -> Result<Self> {
        let n = d.rank;

        let coroot_cols: Vec<Vec<i64>> = (0..n)
            .map(|i| d.cartan[i][..n].to_vec())
            .collect();
        let quot_plain = QuotientMap::build(coroot_cols.clone(), n);

        let mut sigma_cols = coroot_cols;
        for j in 0..n {
            if d.sigma.apply(j) != j {
                let mut col = vec![0i64; n];
                col[j] += 1;
                col[d.sigma.apply(j)] -= 1;
                sigma_cols.push(col);
            }
        }
        let quot_sigma = QuotientMap::build(sigma_cols, n);

        // Affine simple reflections: s_0 = t^{theta^vee} s_theta first.
        let theta = &d.positive_roots[d.highest_root];
        let theta_coeffs = theta.coeffs;
        let theta_coroot = theta.coroot;
        let mut s_theta_mat = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                let cur = s_theta_mat.get(i, j) - theta_coeffs[j] * theta_coroot.c[i];
                s_theta_mat.set(i, j, cur);
            }
        }
        let s_theta = FiniteWeylElement { mat: s_theta_mat };
        d.w0_idx(&s_theta)?;
        let mut stilde = vec![AffineElement { lam: theta_coroot, fin: s_theta }];
        for i in 0..n {
            stilde.push(AffineElement::from_finite(d.simple_reflection_w0(i)));
        }

        // Length-zero elements: for each finite part u the candidate
        // translation is forced by the simple-root walls; keep those of
        // genuine length zero inside the lattice.
        let mut omega = Vec::new();
        for u in d.w0_elements() {
            let uinv_idx = {
                let ui = d.w0_idx(&u)?;
                d.w0_inv_idx(ui)
            };
            let mut lam = Coweight::zero();
            for (i, root) in d.positive_roots.iter().enumerate() {
                if root.height == 1 {
                    let simple = root.coeffs.iter().position(|&c| c == 1).unwrap();
                    if d.root_image(uinv_idx, i).is_err() {
                        lam.c[simple] = 1;
                    }
                }
            }
            let cand = AffineElement { lam, fin: u };
            if d.lattice_contains(&lam) && d.aff_len_unchecked(&cand) == 0 {
                omega.push(cand);
            }
        }
        omega.sort();
        let expected = match d.mode {
            LatticeMode::Adjoint => quot_plain.order(),
            LatticeMode::SimplyConnected => 1,
        };
        if omega.len() as i64 != expected {
            return Err(AdlvError::InvariantViolation(format!(
                "found {} length-zero elements, expected {expected}",
                omega.len()
            )));
        }

        let mut omega_by_component = FxHashMap::default();
        for (k, tau) in omega.iter().enumerate() {
            let comp = quot_plain.map(&tau.lam);
            if omega_by_component.insert(comp, k as u16).is_some() {
                return Err(AdlvError::InvariantViolation(
                    "two length-zero elements share a component".into(),
                ));
            }
        }

        Ok(AffineCache {
            stilde,
            omega,
            quot_plain,
            quot_sigma,
            omega_by_component,
            spheres: RwLock::new(Vec::new()),
            straight: RwLock::new(StraightRegistry { done_radius: -1, map: FxHashMap::default() }),
        })
    }
}

impl RootDatum {
    pub(crate) fn w0_inv_idx(&self, idx: u16) -> u16 {
        self.w0.elems[idx as usize].inv
    }

    pub fn identity_aff(&self) -> AffineElement {
        AffineElement::from_finite(self.identity_w0())
    }

    /// The n+1 affine simple reflections, ordered s0, s1, ..., sn.
    pub fn simple_reflections(&self) -> &[AffineElement] {
        &self.affine.stilde
    }

    /// The length-zero elements; index 0 is the identity.
    pub fn omega_elements(&self) -> &[AffineElement] {
        &self.affine.omega
    }

    pub fn multiply(&self, a: &AffineElement, b: &AffineElement) -> Result<AffineElement> {
        self.w0_idx(&a.fin)?;
        self.w0_idx(&b.fin)?;
        Ok(AffineElement {
            lam: a.lam.add(&self.w0_apply(&a.fin, &b.lam)),
            fin: self.w0_mul(&a.fin, &b.fin)?,
        })
    }

    pub fn invert(&self, a: &AffineElement) -> Result<AffineElement> {
        let fin_inv = self.w0_inv(&a.fin)?;
        Ok(AffineElement {
            lam: self.w0_apply(&fin_inv, &a.lam).neg(),
            fin: fin_inv,
        })
    }

    pub fn apply_sigma(&self, a: &AffineElement) -> AffineElement {
        AffineElement {
            lam: self.sigma.apply_coweight(&a.lam),
            fin: self.sigma_of_w0(&a.fin),
        }
    }

    /// Image of a rational point under the affine action v -> lam + u(v).
    pub fn act_on_point(&self, a: &AffineElement, p: &[Rat; MAXN]) -> [Rat; MAXN] {
        let mut out = a.fin.mat.apply_rat(p);
        for i in 0..self.rank {
            out[i] += Rat::from_integer(a.lam.c[i]);
        }
        out
    }

    pub(crate) fn aff_len_unchecked(&self, w: &AffineElement) -> u32 {
        let ui = self.w0.index[&w.fin.mat];
        let inv = self.w0_inv_idx(ui);
        let mut total = 0i64;
        for t in 0..self.positive_roots.len() {
            let c = self.pair_root_int(&w.lam, t);
            total += match self.root_image(inv, t) {
                Ok(_) => c.abs(),
                Err(_) => (c - 1).abs(),
            };
        }
        total as u32
    }

    /// Iwahori-Matsumoto length.
    pub fn length(&self, w: &AffineElement) -> Result<u32> {
        self.w0_idx(&w.fin)?;
        Ok(self.aff_len_unchecked(w))
    }

    /// Kottwitz map, valued in the sigma-coinvariants of X_*/Q^vee.
    pub fn kappa(&self, w: &AffineElement) -> KappaClass {
        KappaClass(self.affine.quot_sigma.map(&w.lam))
    }

    /// Component of w in W~/W_a, i.e. the plain quotient X_*/Q^vee.
    pub fn component(&self, w: &AffineElement) -> Vec<i64> {
        self.affine.quot_plain.map(&w.lam)
    }

    /// The length-zero element in the same component as w.
    pub fn omega_of_component(&self, w: &AffineElement) -> AffineElement {
        let comp = self.component(w);
        let idx = self.affine.omega_by_component[&comp];
        self.affine.omega[idx as usize]
    }

    /// First left descent in the fixed ordering of the simple reflections,
    /// if any.
    pub fn left_descent(&self, w: &AffineElement) -> Result<Option<usize>> {
        let l = self.length(w)?;
        for (k, s) in self.affine.stilde.iter().enumerate() {
            let sw = self.multiply(s, w)?;
            if self.aff_len_unchecked(&sw) < l {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Reduced word over the affine simple reflections for the W_a-part;
    /// the remaining length-zero factor is returned alongside.
    pub fn reduced_word(&self, w: &AffineElement) -> Result<(Vec<u8>, AffineElement)> {
        let mut letters = Vec::new();
        let mut cur = *w;
        while let Some(k) = self.left_descent(&cur)? {
            letters.push(k as u8);
            cur = self.multiply(&self.affine.stilde[k], &cur)?;
        }
        Ok((letters, cur))
    }

    /// w = x * t^lam * y with lam dominant and t^lam y in its coset's
    /// minimal position; unique.
    pub fn coset_decompose(&self, w: &AffineElement) -> Result<CosetDecomposition> {
        let mut v = *w;
        let mut x = self.identity_w0();
        let mut len = self.length(w)?;
        loop {
            let mut moved = false;
            for i in 0..self.rank {
                let s = self.simple_reflection_w0(i);
                let sv = self.multiply(&AffineElement::from_finite(s), &v)?;
                let slen = self.aff_len_unchecked(&sv);
                if slen < len {
                    v = sv;
                    len = slen;
                    x = self.w0_mul(&x, &s)?;
                    moved = true;
                    break;
                }
            }
            if !moved {
                break;
            }
        }
        if !self.is_dominant_int(&v.lam) {
            return Err(AdlvError::InvariantViolation(
                "minimal coset representative has non-dominant translation part".into(),
            ));
        }
        let dec = CosetDecomposition { x, lam: v.lam, y: v.fin };
        debug_assert_eq!(
            self.length(w)?,
            self.w0_len(&dec.x)? + len,
            "length must be additive across the coset decomposition"
        );
        Ok(dec)
    }

    /// eta_sigma(w) = sigma^{-1}(y) x for the coset decomposition above.
    pub fn eta_sigma(&self, w: &AffineElement) -> Result<FiniteWeylElement> {
        let dec = self.coset_decompose(w)?;
        self.w0_mul(&self.sigma_inv_of_w0(&dec.y), &dec.x)
    }

    /// The unique dominant coweight with w in W0 t^{lambda_w} W0.
    pub fn lambda_w(&self, w: &AffineElement) -> Result<Coweight> {
        Ok(self.coset_decompose(w)?.lam)
    }

    /// Whether w translates the base alcove into a shrunken Weyl chamber:
    /// the image of the base barycenter avoids every critical strip.
    pub fn is_shrunken(&self, w: &AffineElement) -> Result<bool> {
        self.w0_idx(&w.fin)?;
        let p = self.act_on_point(w, &self.base_barycenter);
        for t in 0..self.positive_roots.len() {
            let mut s = Rat::zero();
            for i in 0..self.rank {
                s += Rat::from_integer(self.positive_roots[t].coeffs[i]) * p[i];
            }
            if s > Rat::zero() && s < Rat::one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Interval-arithmetic form of the shrunken test; used to cross-check
    /// the barycenter computation.
    pub fn is_shrunken_combinatorial(&self, w: &AffineElement) -> Result<bool> {
        let ui = self.w0_idx(&w.fin)?;
        let inv = self.w0_inv_idx(ui);
        for t in 0..self.positive_roots.len() {
            let c = self.pair_root_int(&w.lam, t);
            let bad = match self.root_image(inv, t) {
                Ok(_) => c == 0,
                Err(_) => c == 1,
            };
            if bad {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Bruhat order on the extended group: comparable only within the same
    /// length-zero component, by the subword criterion there.
    pub fn bruhat_leq(&self, a: &AffineElement, b: &AffineElement) -> Result<bool> {
        if self.component(a) != self.component(b) {
            return Ok(false);
        }
        let tau = self.omega_of_component(a);
        let tau_inv = self.invert(&tau)?;
        let ua = self.multiply(a, &tau_inv)?;
        let ub = self.multiply(b, &tau_inv)?;
        self.bruhat_leq_wa(&ua, &ub)
    }

    fn bruhat_leq_wa(&self, a: &AffineElement, b: &AffineElement) -> Result<bool> {
        let la = self.aff_len_unchecked(a);
        let lb = self.aff_len_unchecked(b);
        if la > lb {
            return Ok(false);
        }
        if la == 0 {
            // identity is the unique length-zero element of W_a
            return Ok(true);
        }
        let k = self
            .left_descent(b)?
            .expect("positive-length element has a descent");
        let s = self.affine.stilde[k];
        let sb = self.multiply(&s, b)?;
        let sa = self.multiply(&s, a)?;
        if self.aff_len_unchecked(&sa) < la {
            self.bruhat_leq_wa(&sa, &sb)
        } else {
            self.bruhat_leq_wa(a, &sb)
        }
    }

    /// Demazure (0-Hecke) product.
    pub fn demazure(&self, a: &AffineElement, b: &AffineElement) -> Result<AffineElement> {
        let (letters, tau) = self.reduced_word(b)?;
        let mut acc = *a;
        let mut acc_len = self.length(a)?;
        for k in letters {
            let s = self.affine.stilde[k as usize];
            let cand = self.multiply(&acc, &s)?;
            let cl = self.aff_len_unchecked(&cand);
            if cl > acc_len {
                acc = cand;
                acc_len = cl;
            }
        }
        self.multiply(&acc, &tau)
    }

    /// Ball of the length function, one sphere per length. Grown lazily
    /// and shared; spheres are returned by clone of the slice reference.
    pub fn sphere(&self, radius: u32) -> Vec<AffineElement> {
        self.grow_spheres(radius);
        self.affine.spheres.read().unwrap()[radius as usize].clone()
    }

    pub fn ball(&self, radius: u32) -> Vec<AffineElement> {
        self.grow_spheres(radius);
        let spheres = self.affine.spheres.read().unwrap();
        spheres[..=radius as usize].iter().flatten().copied().collect()
    }

    fn grow_spheres(&self, radius: u32) {
        let mut spheres = self.affine.spheres.write().unwrap();
        if spheres.is_empty() {
            spheres.push(self.affine.omega.clone());
        }
        while spheres.len() <= radius as usize {
            let last = spheres.last().unwrap();
            let target = spheres.len() as u32;
            let mut next: Vec<AffineElement> = Vec::new();
            let mut seen = rustc_hash::FxHashSet::default();
            for x in last {
                for s in &self.affine.stilde {
                    let sx = self.multiply(s, x).expect("same datum");
                    if self.aff_len_unchecked(&sx) == target && seen.insert(sx) {
                        next.push(sx);
                    }
                }
            }
            next.sort();
            spheres.push(next);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::{CartanType, SigmaPerm};

    fn adjoint(t: CartanType, rank: usize) -> RootDatum {
        RootDatum::new(t, rank, LatticeMode::Adjoint, SigmaPerm::identity(rank)).unwrap()
    }

    fn a1() -> RootDatum {
        adjoint(CartanType::A, 1)
    }

    fn a2() -> RootDatum {
        adjoint(CartanType::A, 2)
    }

    #[test]
    fn group_axioms_spot_checks() {
        let d = a2();
        let s0 = d.simple_reflections()[0];
        let s1 = d.simple_reflections()[1];
        let w = d.multiply(&s0, &s1).unwrap();
        let winv = d.invert(&w).unwrap();
        assert_eq!(d.multiply(&w, &winv).unwrap(), d.identity_aff());
        // s0^2 = 1
        assert_eq!(d.multiply(&s0, &s0).unwrap(), d.identity_aff());
        // sigma = id acts trivially
        assert_eq!(d.apply_sigma(&w), w);
    }

    #[test]
    fn length_examples() {
        let d = a1();
        // l(t^{2 omega}) = <2 omega, 2 rho> = 2
        let t2 = AffineElement::translation(Coweight::from_slice(&[2]), &d);
        assert_eq!(d.length(&t2).unwrap(), 2);
        // the nontrivial length-zero element is t^omega s1
        let tau = AffineElement {
            lam: Coweight::from_slice(&[1]),
            fin: d.simple_reflection_w0(0),
        };
        assert_eq!(d.length(&tau).unwrap(), 0);
        assert_eq!(d.length(&d.identity_aff()).unwrap(), 0);
        // l(w) = l(w^{-1}) on a sample
        let s0 = d.simple_reflections()[0];
        let w = d.multiply(&s0, &tau).unwrap();
        assert_eq!(d.length(&w).unwrap(), d.length(&d.invert(&w).unwrap()).unwrap());
    }

    #[test]
    fn stilde_and_omega_a1() {
        let d = a1();
        let s = d.simple_reflections();
        assert_eq!(s.len(), 2);
        // s0 = t^{theta^vee} s_theta = t^{2 omega} s1
        assert_eq!(s[0].lam, Coweight::from_slice(&[2]));
        assert_eq!(s[0].fin, d.simple_reflection_w0(0));
        assert_eq!(s[1], AffineElement::from_finite(d.simple_reflection_w0(0)));

        let omega = d.omega_elements();
        assert_eq!(omega.len(), 2);
        assert_eq!(omega[0], d.identity_aff());
        assert_eq!(omega[1].lam, Coweight::from_slice(&[1]));
        for tau in omega {
            assert_eq!(d.length(tau).unwrap(), 0);
        }
        // conjugation by tau permutes the simple reflections
        let tau = omega[1];
        let tau_inv = d.invert(&tau).unwrap();
        for si in s {
            let conj = d
                .multiply(&d.multiply(&tau, si).unwrap(), &tau_inv)
                .unwrap();
            assert!(s.contains(&conj), "tau s tau^-1 must be a simple reflection");
        }
    }

    #[test]
    fn omega_sizes() {
        assert_eq!(a2().omega_elements().len(), 3);
        assert_eq!(adjoint(CartanType::B, 2).omega_elements().len(), 2);
        assert_eq!(adjoint(CartanType::G, 2).omega_elements().len(), 1);
        assert_eq!(adjoint(CartanType::A, 3).omega_elements().len(), 4);
        assert_eq!(adjoint(CartanType::D, 4).omega_elements().len(), 4);
        let sc = RootDatum::new(CartanType::A, 2, LatticeMode::SimplyConnected, SigmaPerm::identity(2)).unwrap();
        assert_eq!(sc.omega_elements().len(), 1, "simply connected mode has trivial Omega");
    }

    #[test]
    fn kappa_examples() {
        let d = a1();
        for s in d.simple_reflections() {
            assert_eq!(d.kappa(s), KappaClass(vec![0]), "W_a lies in the kernel");
        }
        let tau = d.omega_elements()[1];
        assert_eq!(d.kappa(&tau), KappaClass(vec![1]));

        // A2 with flip: the coinvariants of Z/3 under inversion vanish.
        let flip = SigmaPerm::from_images(&[1, 0]).unwrap();
        let df = RootDatum::new(CartanType::A, 2, LatticeMode::Adjoint, flip).unwrap();
        let t_omega1 = AffineElement::translation(Coweight::from_slice(&[1, 0]), &df);
        assert_eq!(df.kappa(&t_omega1), KappaClass(vec![]));

        // A3 with flip: coinvariants of Z/4 under inversion are Z/2.
        let flip3 = SigmaPerm::from_images(&[2, 1, 0]).unwrap();
        let df3 = RootDatum::new(CartanType::A, 3, LatticeMode::Adjoint, flip3).unwrap();
        let t1 = AffineElement::translation(Coweight::from_slice(&[1, 0, 0]), &df3);
        let t2 = AffineElement::translation(Coweight::from_slice(&[0, 1, 0]), &df3);
        assert_eq!(df3.kappa(&t1).0.len(), 1);
        assert_ne!(df3.kappa(&t1), df3.kappa(&d_zero(&df3)));
        assert_eq!(df3.kappa(&t2), df3.kappa(&d_zero(&df3)), "omega2 maps to 2 = 0 in Z/2");
    }

    fn d_zero(d: &RootDatum) -> AffineElement {
        d.identity_aff()
    }

    #[test]
    fn kappa_invariant_under_sigma_conjugation() {
        let d = a2();
        for w in d.ball(4) {
            for g in d.ball(2) {
                let c = d
                    .multiply(&d.multiply(&g, &w).unwrap(), &d.invert(&d.apply_sigma(&g)).unwrap())
                    .unwrap();
                assert_eq!(d.kappa(&w), d.kappa(&c));
            }
        }
    }

    #[test]
    fn coset_decomposition_examples() {
        let d = a1();
        // w = s0 = t^{2 omega} s1: x = 1, lam = 2 omega, y = s1
        let s0 = d.simple_reflections()[0];
        let dec = d.coset_decompose(&s0).unwrap();
        assert_eq!(dec.x, d.identity_w0());
        assert_eq!(dec.lam, Coweight::from_slice(&[2]));
        assert_eq!(dec.y, d.simple_reflection_w0(0));
        assert_eq!(d.eta_sigma(&s0).unwrap(), d.simple_reflection_w0(0));

        let id = d.identity_aff();
        let dec0 = d.coset_decompose(&id).unwrap();
        assert_eq!(dec0.x, d.identity_w0());
        assert_eq!(dec0.lam, Coweight::zero());
        assert_eq!(dec0.y, d.identity_w0());

        // recomposition reproduces w for a sweep of elements
        let d2 = a2();
        for w in d2.ball(6) {
            let dec = d2.coset_decompose(&w).unwrap();
            let rebuilt = d2
                .multiply(
                    &AffineElement::from_finite(dec.x),
                    &d2.multiply(
                        &AffineElement::translation(dec.lam, &d2),
                        &AffineElement::from_finite(dec.y),
                    )
                    .unwrap(),
                )
                .unwrap();
            assert_eq!(rebuilt, w);
            // minimality of the coset representative, brute force
            let v = d2
                .multiply(
                    &AffineElement::translation(dec.lam, &d2),
                    &AffineElement::from_finite(dec.y),
                )
                .unwrap();
            let vlen = d2.length(&v).unwrap();
            for u in d2.w0_elements() {
                let uw = d2.multiply(&AffineElement::from_finite(u), &w).unwrap();
                assert!(d2.length(&uw).unwrap() >= vlen);
            }
        }
    }

    #[test]
    fn length_additivity_for_dominant_translations() {
        let d = a2();
        let lam = Coweight::from_slice(&[2, 1]);
        let t = AffineElement::translation(lam, &d);
        for x in d.w0_elements() {
            let xt = d.multiply(&AffineElement::from_finite(x), &t).unwrap();
            assert_eq!(
                d.length(&xt).unwrap(),
                d.w0_len(&x).unwrap() + d.length(&t).unwrap()
            );
        }
    }

    #[test]
    fn shrunken_examples() {
        let d = a1();
        assert!(!d.is_shrunken(&d.identity_aff()).unwrap(), "the base alcove is inside its strip");
        let s1 = AffineElement::from_finite(d.simple_reflection_w0(0));
        assert!(d.is_shrunken(&s1).unwrap());
        let tm2 = AffineElement::translation(Coweight::from_slice(&[-2]), &d);
        assert!(d.is_shrunken(&tm2).unwrap());
        let tm1 = AffineElement::translation(Coweight::from_slice(&[-1]), &d);
        assert!(d.is_shrunken(&tm1).unwrap());
        // the nontrivial length-zero element maps the barycenter to 1/2:
        // inside the strip
        let tau = d.omega_elements()[1];
        assert!(!d.is_shrunken(&tau).unwrap());
        // in A2 the affine reflection s0 keeps the alcove inside the
        // strips of the finite walls
        let d2 = a2();
        assert!(!d2.is_shrunken(&d2.simple_reflections()[0]).unwrap());
    }

    #[test]
    fn shrunken_matches_combinatorial_form() {
        for d in [a2(), adjoint(CartanType::B, 2)] {
            for w in d.ball(8) {
                assert_eq!(
                    d.is_shrunken(&w).unwrap(),
                    d.is_shrunken_combinatorial(&w).unwrap(),
                    "{w:?}"
                );
            }
        }
    }

    #[test]
    fn bruhat_examples() {
        let d = a1();
        let lam = Coweight::from_slice(&[2]);
        let t = AffineElement::translation(lam, &d);
        let s1t = d
            .multiply(&AffineElement::from_finite(d.simple_reflection_w0(0)), &t)
            .unwrap();
        assert!(d.bruhat_leq(&t, &t).unwrap());
        assert!(d.bruhat_leq(&t, &s1t).unwrap(), "t^lam <= x t^lam");
        // different components are incomparable
        let tau = d.omega_elements()[1];
        assert!(!d.bruhat_leq(&tau, &t).unwrap());
        assert!(!d.bruhat_leq(&t, &tau).unwrap());
    }

    #[test]
    fn bruhat_translation_chain() {
        // t^lam <= x t^lam <= w_S t^lam for dominant lam
        let d = a2();
        let lam = Coweight::from_slice(&[1, 1]);
        let t = AffineElement::translation(lam, &d);
        let top = d
            .multiply(&AffineElement::from_finite(d.longest_w0()), &t)
            .unwrap();
        for x in d.w0_elements() {
            let xt = d.multiply(&AffineElement::from_finite(x), &t).unwrap();
            assert!(d.bruhat_leq(&t, &xt).unwrap());
            assert!(d.bruhat_leq(&xt, &top).unwrap());
        }
    }

    #[test]
    fn bruhat_matches_subword_enumeration() {
        // Independent oracle: the lower interval of b is the closure of
        // subwords of one reduced word of b.
        let d = a2();
        for b in d.ball(5) {
            let (letters, tau) = d.reduced_word(&b).unwrap();
            let mut lower: rustc_hash::FxHashSet<AffineElement> = Default::default();
            lower.insert(d.identity_aff());
            for k in &letters {
                let s = d.simple_reflections()[*k as usize];
                let mut next = lower.clone();
                for u in &lower {
                    next.insert(d.multiply(u, &s).unwrap());
                }
                lower = next;
            }
            let lower: rustc_hash::FxHashSet<AffineElement> =
                lower.iter().map(|u| d.multiply(u, &tau).unwrap()).collect();
            for a in d.ball(5) {
                assert_eq!(
                    d.bruhat_leq(&a, &b).unwrap(),
                    lower.contains(&a),
                    "a={a:?} b={b:?}"
                );
            }
        }
    }

    #[test]
    fn demazure_examples() {
        let d = a2();
        for s in d.simple_reflections() {
            assert_eq!(d.demazure(s, s).unwrap(), *s, "s * s = s");
            assert_eq!(d.demazure(&d.identity_aff(), s).unwrap(), *s);
        }
        let s1 = AffineElement::from_finite(d.simple_reflection_w0(0));
        let s1s2 = d
            .multiply(&s1, &AffineElement::from_finite(d.simple_reflection_w0(1)))
            .unwrap();
        assert_eq!(d.demazure(&s1, &s1s2).unwrap(), s1s2);
    }

    #[test]
    fn demazure_matches_bruhat_interval_maximum() {
        // all pairs with len(a) + len(b) <= 8
        for d in [a2(), adjoint(CartanType::B, 2)] {
            let ball = d.ball(8);
            let interval = |w: &AffineElement| -> Vec<AffineElement> {
                ball.iter()
                    .filter(|u| d.bruhat_leq(u, w).unwrap())
                    .copied()
                    .collect()
            };
            let intervals: Vec<Vec<AffineElement>> = ball.iter().map(interval).collect();
            for (ai, a) in ball.iter().enumerate() {
                for (bi, b) in ball.iter().enumerate() {
                    if d.length(a).unwrap() + d.length(b).unwrap() > 8 {
                        continue;
                    }
                    let m = d.demazure(a, b).unwrap();
                    // brute force over {uv : u <= a, v <= b}: the product
                    // set must contain m and sit below it in Bruhat order
                    let mut seen_m = false;
                    let mut products: rustc_hash::FxHashSet<AffineElement> = Default::default();
                    for u in &intervals[ai] {
                        for v in &intervals[bi] {
                            let uv = d.multiply(u, v).unwrap();
                            if uv == m {
                                seen_m = true;
                            } else {
                                products.insert(uv);
                            }
                        }
                    }
                    assert!(seen_m, "a={a:?} b={b:?}: maximum not attained");
                    for uv in &products {
                        assert!(
                            d.bruhat_leq(uv, &m).unwrap(),
                            "a={a:?} b={b:?} uv={uv:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn length_parity_and_step() {
        let d = a2();
        for w in d.ball(5) {
            let lw = d.length(&w).unwrap();
            for s in d.simple_reflections() {
                let sw = d.multiply(s, &w).unwrap();
                let lsw = d.length(&sw).unwrap();
                assert_eq!((lw as i64 - lsw as i64).abs(), 1);
            }
        }
    }

    #[test]
    fn im_length_equals_word_length() {
        for d in [a1(), a2(), adjoint(CartanType::B, 2), adjoint(CartanType::G, 2)] {
            for w in d.ball(12) {
                let (letters, tau) = d.reduced_word(&w).unwrap();
                assert_eq!(d.length(&tau).unwrap(), 0);
                assert_eq!(letters.len() as u32, d.length(&w).unwrap());
            }
        }
    }

    #[test]
    fn sigma_preserves_stilde_and_length() {
        let flip = SigmaPerm::from_images(&[2, 1, 0]).unwrap();
        let d = RootDatum::new(CartanType::A, 3, LatticeMode::Adjoint, flip).unwrap();
        for s in d.simple_reflections() {
            let ss = d.apply_sigma(s);
            assert!(d.simple_reflections().contains(&ss));
        }
        for w in d.ball(5) {
            assert_eq!(d.length(&w).unwrap(), d.length(&d.apply_sigma(&w)).unwrap());
        }
    }

    #[test]
    fn sphere_sizes_are_consistent() {
        let d = a2();
        let ball = d.ball(6);
        for w in &ball {
            assert!(d.length(w).unwrap() <= 6);
        }
        // every element of length exactly k is in sphere k
        let mut total = 0;
        for k in 0..=6 {
            let s = d.sphere(k);
            for w in &s {
                assert_eq!(d.length(w).unwrap(), k);
            }
            total += s.len();
        }
        assert_eq!(total, ball.len());
    }
}
