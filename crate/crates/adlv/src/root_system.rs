//! Exact root-system and finite-Weyl-group arithmetic.
//!
//! Coweights are stored in pairing coordinates throughout: the i-th
//! coordinate of `v` is the pairing of `v` with the i-th simple root. In
//! that basis the fundamental coweights are the unit vectors, the simple
//! coroots are the rows of the Cartan matrix, and roots act as covectors
//! given by their simple-root coordinates.

use crate::error::{AdlvError, Result};
use crate::linalg::{fixed_space_dim, rat, Mat, Rat, RatMat, MAXN};
use num_traits::{Signed, Zero};
use rustc_hash::FxHashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            CartanType::A => 'A',
            CartanType::B => 'B',
            CartanType::C => 'C',
            CartanType::D => 'D',
            CartanType::E => 'E',
            CartanType::F => 'F',
            CartanType::G => 'G',
        };
        write!(f, "{c}")
    }
}

/// Choice of cocharacter lattice: the full coweight lattice (adjoint mode)
/// or the coroot lattice (simply connected mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeMode {
    Adjoint,
    SimplyConnected,
}

/// Integral coweight in pairing coordinates. Unused trailing coordinates
/// are kept at zero so that equality and hashing are rank-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coweight {
    pub c: [i64; MAXN],
}

impl Coweight {
    pub fn zero() -> Self {
        Coweight { c: [0; MAXN] }
    }

    pub fn from_slice(v: &[i64]) -> Self {
        let mut c = [0i64; MAXN];
        c[..v.len()].copy_from_slice(v);
        Coweight { c }
    }

    pub fn add(&self, o: &Coweight) -> Coweight {
        let mut c = self.c;
        for i in 0..MAXN {
            c[i] += o.c[i];
        }
        Coweight { c }
    }

    pub fn sub(&self, o: &Coweight) -> Coweight {
        let mut c = self.c;
        for i in 0..MAXN {
            c[i] -= o.c[i];
        }
        Coweight { c }
    }

    pub fn neg(&self) -> Coweight {
        let mut c = self.c;
        for x in &mut c {
            *x = -*x;
        }
        Coweight { c }
    }

    pub fn to_rational(&self) -> RationalCoweight {
        let mut c = [Rat::zero(); MAXN];
        for i in 0..MAXN {
            c[i] = Rat::from_integer(self.c[i]);
        }
        RationalCoweight { c }
    }
}

/// Rational coweight in pairing coordinates; exact arithmetic only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalCoweight {
    pub c: [Rat; MAXN],
}

impl RationalCoweight {
    pub fn zero() -> Self {
        RationalCoweight { c: [Rat::zero(); MAXN] }
    }

    pub fn add(&self, o: &RationalCoweight) -> RationalCoweight {
        let mut c = self.c;
        for i in 0..MAXN {
            c[i] += o.c[i];
        }
        RationalCoweight { c }
    }

    pub fn sub(&self, o: &RationalCoweight) -> RationalCoweight {
        let mut c = self.c;
        for i in 0..MAXN {
            c[i] -= o.c[i];
        }
        RationalCoweight { c }
    }

    pub fn scale(&self, f: Rat) -> RationalCoweight {
        let mut c = self.c;
        for x in &mut c {
            *x *= f;
        }
        RationalCoweight { c }
    }

    /// Exact integral part, if every coordinate is an integer.
    pub fn to_integral(&self) -> Option<Coweight> {
        let mut c = [0i64; MAXN];
        for i in 0..MAXN {
            if !self.c[i].is_integer() {
                return None;
            }
            c[i] = self.c[i].to_integer();
        }
        Some(Coweight { c })
    }
}

/// Element of the finite Weyl group in canonical form: the matrix of its
/// action on the coweight space in the fundamental-coweight basis (the
/// tuple of images of the basis). Equal group elements are structurally
/// equal; all arithmetic goes through the owning `RootDatum`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWeylElement {
    pub(crate) mat: Mat,
}

/// Diagram automorphism, as a permutation of simple-root indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SigmaPerm {
    n: usize,
    /// perm[i] = sigma(i), 0-based.
    perm: [u8; MAXN],
}

impl SigmaPerm {
    pub fn identity(n: usize) -> Self {
        let mut perm = [0u8; MAXN];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        SigmaPerm { n, perm }
    }

    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n > MAXN {
            return Err(AdlvError::Unsupported(format!("rank {n} exceeds 4")));
        }
        let mut seen = [false; MAXN];
        let mut perm = [0u8; MAXN];
        for (i, &img) in images.iter().enumerate() {
            if img >= n || seen[img] {
                return Err(AdlvError::Parse {
                    token: format!("{}", img + 1),
                    msg: "sigma is not a permutation of the simple roots".into(),
                });
            }
            seen[img] = true;
            perm[i] = img as u8;
        }
        Ok(SigmaPerm { n, perm })
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.perm[i] as usize
    }

    pub fn inverse(&self) -> SigmaPerm {
        let mut perm = [0u8; MAXN];
        for i in 0..self.n {
            perm[self.perm[i] as usize] = i as u8;
        }
        SigmaPerm { n: self.n, perm }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| self.perm[i] as usize == i)
    }

    pub fn order(&self) -> usize {
        let mut ord = 1;
        let mut cur = *self;
        while !cur.is_identity() {
            cur = cur.compose(self);
            ord += 1;
        }
        ord
    }

    fn compose(&self, other: &SigmaPerm) -> SigmaPerm {
        let mut perm = [0u8; MAXN];
        for i in 0..self.n {
            perm[i] = self.perm[other.perm[i] as usize];
        }
        SigmaPerm { n: self.n, perm }
    }

    /// Action on pairing coordinates: (sigma v)_i = v_{sigma^{-1}(i)}.
    pub fn apply_coweight(&self, v: &Coweight) -> Coweight {
        let inv = self.inverse();
        let mut c = [0i64; MAXN];
        for i in 0..self.n {
            c[i] = v.c[inv.perm[i] as usize];
        }
        Coweight { c }
    }

    pub fn apply_rational(&self, v: &RationalCoweight) -> RationalCoweight {
        let inv = self.inverse();
        let mut c = [Rat::zero(); MAXN];
        for i in 0..self.n {
            c[i] = v.c[inv.perm[i] as usize];
        }
        RationalCoweight { c }
    }

    pub(crate) fn matrix(&self) -> Mat {
        let mut m = Mat { n: self.n as u8, a: [0; MAXN * MAXN] };
        for j in 0..self.n {
            m.set(self.perm[j] as usize, j, 1);
        }
        m
    }
}

/// A root, stored both as a covector (simple-root coordinates, which pair
/// directly against pairing coordinates) and with its coroot as a coweight.
#[derive(Debug, Clone)]
pub struct Root {
    pub coeffs: [i64; MAXN],
    pub coroot: Coweight,
    pub height: i64,
}

pub(crate) struct W0Info {
    pub mat: Mat,
    /// Action on the root lattice (contragredient matrix).
    pub root_mat: Mat,
    pub len: u32,
    pub inv: u16,
    /// Right products with the finite simple reflections.
    pub rmul: [u16; MAXN],
    /// Left products with the finite simple reflections.
    pub lmul: [u16; MAXN],
    /// Signed image of each positive root under the element: stored as
    /// index+1, negative if the image is a negative root.
    pub root_image: Vec<i16>,
    /// Support of the element as a bitmask of simple-root indices.
    pub supp: u8,
    /// Lexicographically smallest reduced word (1-based generator indices
    /// are recovered on output; stored 0-based).
    pub word: Vec<u8>,
}

pub(crate) struct W0Table {
    pub elems: Vec<W0Info>,
    pub index: FxHashMap<Mat, u16>,
    pub longest: u16,
}

/// The ambient combinatorial universe: Cartan data, lattice mode, diagram
/// automorphism, the full positive root system with coroots, and the
/// enumerated finite Weyl group.
pub struct RootDatum {
    pub cartan_type: CartanType,
    pub rank: usize,
    pub mode: LatticeMode,
    pub sigma: SigmaPerm,
    /// `cartan[i][j]` is the pairing of the i-th simple coroot with the
    /// j-th simple root.
    pub cartan: [[i64; MAXN]; MAXN],
    pub positive_roots: Vec<Root>,
    pub highest_root: usize,
    /// Rational inverse of the transposed Cartan matrix; converts pairing
    /// coordinates to simple-coroot coordinates.
    pub(crate) coroot_coords: RatMat,
    /// Simple-root coordinates of the Weyl vector (pairs to 1 with every
    /// simple coroot).
    pub(crate) rho_weight: [Rat; MAXN],
    /// Barycenter of the fundamental alcove of the affine action, in
    /// pairing coordinates.
    pub(crate) base_barycenter: [Rat; MAXN],
    pub(crate) w0: W0Table,
    pub(crate) affine: crate::affine_weyl::AffineCache,
}

impl fmt::Debug for RootDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootDatum({}{}, {:?})", self.cartan_type, self.rank, self.mode)
    }
}

fn cartan_matrix(ctype: CartanType, rank: usize) -> Result<[[i64; MAXN]; MAXN]> {
    let mut c = [[0i64; MAXN]; MAXN];
    for (i, row) in c.iter_mut().enumerate().take(rank) {
        row[i] = 2;
    }
    let chain = |c: &mut [[i64; MAXN]; MAXN]| {
        for i in 0..rank - 1 {
            c[i][i + 1] = -1;
            c[i + 1][i] = -1;
        }
    };
    let bad = || AdlvError::Unsupported(format!("{ctype}{rank} is not in the supported table"));
    match (ctype, rank) {
        (CartanType::A, 1..=4) => {
            if rank > 1 {
                chain(&mut c);
            }
        }
        (CartanType::B, 2..=4) => {
            chain(&mut c);
            // Last simple root short: its coroot pairs to -2 with the
            // neighbouring long root.
            c[rank - 1][rank - 2] = -2;
        }
        (CartanType::C, 2..=4) => {
            chain(&mut c);
            c[rank - 2][rank - 1] = -2;
        }
        (CartanType::D, 4) => {
            // Node 2 is the branch point; nodes 1, 3, 4 hang off it.
            for i in [0usize, 2, 3] {
                c[i][1] = -1;
                c[1][i] = -1;
            }
        }
        (CartanType::F, 4) => {
            chain(&mut c);
            c[1][2] = -2;
            c[2][1] = -1;
        }
        (CartanType::G, 2) => {
            c[0][1] = -1;
            c[1][0] = -3;
        }
        _ => return Err(bad()),
    }
    Ok(c)
}

impl RootDatum {
    pub fn new(
        ctype: CartanType,
        rank: usize,
        mode: LatticeMode,
        sigma: SigmaPerm,
    ) -> Result<Self> {
        let cartan = cartan_matrix(ctype, rank)?;
        // sigma must preserve the Cartan matrix.
        for i in 0..rank {
            for j in 0..rank {
                if cartan[sigma.apply(i)][sigma.apply(j)] != cartan[i][j] {
                    return Err(AdlvError::Unsupported(
                        "sigma does not preserve the Cartan matrix".into(),
                    ));
                }
            }
        }

        let positive_roots = generate_roots(&cartan, rank);
        let highest_root = positive_roots
            .iter()
            .enumerate()
            .max_by_key(|(_, r)| r.height)
            .map(|(i, _)| i)
            .expect("nonempty root system");
        {
            let hmax = positive_roots[highest_root].height;
            let count = positive_roots.iter().filter(|r| r.height == hmax).count();
            assert_eq!(count, 1, "highest root must be unique");
        }

        let mut root_index = FxHashMap::default();
        for (t, r) in positive_roots.iter().enumerate() {
            root_index.insert(r.coeffs, t as u16);
        }
        let cartan_t = {
            let mut rows = [[0i64; MAXN]; MAXN];
            for i in 0..rank {
                for j in 0..rank {
                    rows[i][j] = cartan[j][i];
                }
            }
            rows
        };
        let coroot_coords = RatMat::from_int(rank, &cartan_t[..rank]).inverse();

        // rho as a covector: solve cartan * m = (1,...,1).
        let cartan_mat = RatMat::from_int(rank, &{
            let mut rows = [[0i64; MAXN]; MAXN];
            for i in 0..rank {
                rows[i][..rank].copy_from_slice(&cartan[i][..rank]);
            }
            rows
        }[..rank]);
        let ones = {
            let mut v = [Rat::zero(); MAXN];
            for x in v.iter_mut().take(rank) {
                *x = Rat::from_integer(1);
            }
            v
        };
        let rho_weight = cartan_mat.inverse().apply(&ones);

        // Barycenter of the fundamental alcove of the affine action: the
        // alcove whose walls are fixed by the affine simple reflections,
        // with vertices 0 and omega_i / c_i for c_i the coefficient of
        // alpha_i in the highest root. Every positive root pairs into
        // (0, 1) on its interior.
        let theta = &positive_roots[highest_root];
        let mut base_barycenter = [Rat::zero(); MAXN];
        for i in 0..rank {
            base_barycenter[i] = rat(1, theta.coeffs[i] * (rank as i64 + 1));
        }

        let w0 = build_w0(&cartan, rank, &positive_roots, &root_index);

        let mut datum = RootDatum {
            cartan_type: ctype,
            rank,
            mode,
            sigma,
            cartan,
            positive_roots,
            highest_root,
            coroot_coords,
            rho_weight,
            base_barycenter,
            w0,
            affine: crate::affine_weyl::AffineCache::empty(),
        };
        datum.affine = crate::affine_weyl::AffineCache::build(&datum)?;
        Ok(datum)
    }

    pub fn identity_w0(&self) -> FiniteWeylElement {
        FiniteWeylElement { mat: Mat::identity(self.rank) }
    }

    pub fn simple_reflection_w0(&self, i: usize) -> FiniteWeylElement {
        FiniteWeylElement { mat: simple_reflection_mat(&self.cartan, self.rank, i) }
    }

    pub fn longest_w0(&self) -> FiniteWeylElement {
        FiniteWeylElement { mat: self.w0.elems[self.w0.longest as usize].mat }
    }

    pub fn w0_order(&self) -> usize {
        self.w0.elems.len()
    }

    pub fn w0_elements(&self) -> impl Iterator<Item = FiniteWeylElement> + '_ {
        self.w0.elems.iter().map(|e| FiniteWeylElement { mat: e.mat })
    }

    pub(crate) fn w0_idx(&self, u: &FiniteWeylElement) -> Result<u16> {
        self.w0
            .index
            .get(&u.mat)
            .copied()
            .ok_or(AdlvError::DatumMismatch)
    }

    pub fn w0_len(&self, u: &FiniteWeylElement) -> Result<u32> {
        Ok(self.w0.elems[self.w0_idx(u)? as usize].len)
    }

    pub fn w0_mul(&self, a: &FiniteWeylElement, b: &FiniteWeylElement) -> Result<FiniteWeylElement> {
        self.w0_idx(a)?;
        self.w0_idx(b)?;
        Ok(FiniteWeylElement { mat: a.mat.mul(&b.mat) })
    }

    pub fn w0_inv(&self, a: &FiniteWeylElement) -> Result<FiniteWeylElement> {
        let i = self.w0_idx(a)?;
        let inv = self.w0.elems[i as usize].inv;
        Ok(FiniteWeylElement { mat: self.w0.elems[inv as usize].mat })
    }

    pub fn w0_apply(&self, u: &FiniteWeylElement, v: &Coweight) -> Coweight {
        Coweight { c: u.mat.apply(&v.c) }
    }

    pub fn w0_apply_rational(&self, u: &FiniteWeylElement, v: &RationalCoweight) -> RationalCoweight {
        RationalCoweight { c: u.mat.apply_rat(&v.c) }
    }

    /// Signed image of the t-th positive root under u: Ok(index) if the
    /// image is positive, Err(index) if negative.
    pub(crate) fn root_image(&self, uidx: u16, t: usize) -> std::result::Result<usize, usize> {
        let s = self.w0.elems[uidx as usize].root_image[t];
        if s > 0 {
            Ok((s - 1) as usize)
        } else {
            Err((-s - 1) as usize)
        }
    }

    pub fn sigma_of_w0(&self, u: &FiniteWeylElement) -> FiniteWeylElement {
        let p = self.sigma.matrix();
        let pinv = self.sigma.inverse().matrix();
        FiniteWeylElement { mat: p.mul(&u.mat).mul(&pinv) }
    }

    pub fn sigma_inv_of_w0(&self, u: &FiniteWeylElement) -> FiniteWeylElement {
        let p = self.sigma.inverse().matrix();
        let pinv = self.sigma.matrix();
        FiniteWeylElement { mat: p.mul(&u.mat).mul(&pinv) }
    }

    /// Whether the coweight lies in the chosen cocharacter lattice.
    pub fn lattice_contains(&self, v: &Coweight) -> bool {
        match self.mode {
            LatticeMode::Adjoint => true,
            LatticeMode::SimplyConnected => {
                let coords = self.coroot_coords.apply(&v.to_rational().c);
                coords[..self.rank].iter().all(|r| r.is_integer())
            }
        }
    }

    /// Pairing of a rational coweight with a root given by index into the
    /// positive-root table.
    pub fn pair_root(&self, v: &RationalCoweight, t: usize) -> Rat {
        let r = &self.positive_roots[t];
        let mut acc = Rat::zero();
        for i in 0..self.rank {
            acc += Rat::from_integer(r.coeffs[i]) * v.c[i];
        }
        acc
    }

    pub fn pair_root_int(&self, v: &Coweight, t: usize) -> i64 {
        let r = &self.positive_roots[t];
        let mut acc = 0;
        for i in 0..self.rank {
            acc += r.coeffs[i] * v.c[i];
        }
        acc
    }

    /// Pairing against an arbitrary root written in simple-root coordinates.
    pub fn pairing(&self, v: &RationalCoweight, root: &[i64]) -> Result<Rat> {
        if root.len() != self.rank {
            return Err(AdlvError::DimensionMismatch { expected: self.rank, got: root.len() });
        }
        let mut acc = Rat::zero();
        for (i, &r) in root.iter().enumerate() {
            acc += Rat::from_integer(r) * v.c[i];
        }
        Ok(acc)
    }

    /// Pairing with the Weyl vector rho.
    pub fn pair_rho(&self, v: &RationalCoweight) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.rank {
            acc += self.rho_weight[i] * v.c[i];
        }
        acc
    }

    pub fn is_dominant(&self, v: &RationalCoweight) -> bool {
        v.c[..self.rank].iter().all(|x| !x.is_negative())
    }

    pub fn is_dominant_int(&self, v: &Coweight) -> bool {
        v.c[..self.rank].iter().all(|&x| x >= 0)
    }

    /// The unique dominant representative of the W0-orbit, together with
    /// the minimal-length x such that x(dom) = v.
    pub fn dominant_rep(&self, v: &RationalCoweight) -> (RationalCoweight, FiniteWeylElement) {
        let mut cur = *v;
        let mut x = self.identity_w0();
        loop {
            let Some(i) = (0..self.rank).find(|&i| cur.c[i].is_negative()) else {
                return (cur, x);
            };
            let s = self.simple_reflection_w0(i);
            cur = self.w0_apply_rational(&s, &cur);
            x = self.w0_mul(&x, &s).expect("same datum");
        }
    }

    pub fn dominant_rep_int(&self, v: &Coweight) -> (Coweight, FiniteWeylElement) {
        let (dom, x) = self.dominant_rep(&v.to_rational());
        (dom.to_integral().expect("integral orbit"), x)
    }

    /// Simple-coroot coordinates of a rational coweight.
    pub fn coroot_coordinates(&self, v: &RationalCoweight) -> [Rat; MAXN] {
        self.coroot_coords.apply(&v.c)
    }

    /// Dominance order over Q: a >= b iff a - b is a nonnegative rational
    /// combination of simple coroots.
    pub fn geq_q(&self, a: &RationalCoweight, b: &RationalCoweight) -> bool {
        let d = a.sub(b);
        let coords = self.coroot_coordinates(&d);
        coords[..self.rank].iter().all(|x| !x.is_negative())
    }

    /// Dominance order over Z: a >= b iff a - b is a nonnegative integral
    /// combination of simple coroots.
    pub fn geq_z(&self, a: &RationalCoweight, b: &RationalCoweight) -> bool {
        let d = a.sub(b);
        let coords = self.coroot_coordinates(&d);
        coords[..self.rank]
            .iter()
            .all(|x| x.is_integer() && !x.is_negative())
    }

    /// Strict positivity: a - b is a rational combination of the simple
    /// coroots with every coefficient > 0.
    pub fn strictly_positive_combination(&self, a: &RationalCoweight, b: &RationalCoweight) -> bool {
        let d = a.sub(b);
        let coords = self.coroot_coordinates(&d);
        coords[..self.rank].iter().all(|x| x.is_positive())
    }

    /// sigma-average of a coweight.
    pub fn diamond(&self, v: &RationalCoweight) -> RationalCoweight {
        let ord = self.sigma.order();
        let mut acc = *v;
        let mut cur = *v;
        for _ in 1..ord {
            cur = self.sigma.apply_rational(&cur);
            acc = acc.add(&cur);
        }
        acc.scale(rat(1, ord as i64))
    }

    /// The dominant coweight pairing to 1 with the simple roots in J and 0
    /// with the rest.
    pub fn rho_check_j(&self, j: u8) -> Coweight {
        let mut c = [0i64; MAXN];
        for i in 0..self.rank {
            if j & (1 << i) != 0 {
                c[i] = 1;
            }
        }
        Coweight { c }
    }

    /// The unique dominant coweight in the W0-orbit of -sigma^{-1}(rho_J).
    pub fn eta_check_j(&self, j: u8) -> Coweight {
        let rho_j = self.rho_check_j(j);
        let v = self.sigma.inverse().apply_coweight(&rho_j).neg();
        self.dominant_rep_int(&v).0
    }

    /// Support of a finite Weyl element, as a bitmask of simple indices.
    pub fn supp(&self, u: &FiniteWeylElement) -> Result<u8> {
        let i = self.w0_idx(u)?;
        Ok(self.w0.elems[i as usize].supp)
    }

    /// sigma-closure of the support.
    pub fn supp_sigma(&self, u: &FiniteWeylElement) -> Result<u8> {
        let mut s = self.supp(u)?;
        loop {
            let mut next = s;
            for i in 0..self.rank {
                if s & (1 << i) != 0 {
                    next |= 1 << self.sigma.apply(i);
                }
            }
            if next == s {
                return Ok(s);
            }
            s = next;
        }
    }

    pub fn full_support(&self) -> u8 {
        ((1u16 << self.rank) - 1) as u8
    }

    /// Lexicographically smallest reduced word of a finite Weyl element,
    /// 0-based simple-reflection indices.
    pub fn w0_word(&self, u: &FiniteWeylElement) -> Result<Vec<u8>> {
        let i = self.w0_idx(u)?;
        Ok(self.w0.elems[i as usize].word.clone())
    }

    /// Left descent set of a finite element, as a bitmask.
    pub fn w0_left_descents(&self, u: &FiniteWeylElement) -> Result<u8> {
        let i = self.w0_idx(u)? as usize;
        let mut mask = 0u8;
        for k in 0..self.rank {
            let li = self.w0.elems[i].lmul[k] as usize;
            if self.w0.elems[li].len < self.w0.elems[i].len {
                mask |= 1 << k;
            }
        }
        Ok(mask)
    }

    /// Minimal-length representative of the right coset u * W_J.
    pub fn min_coset_rep_right(&self, u: &FiniteWeylElement, j: u8) -> Result<FiniteWeylElement> {
        let mut idx = self.w0_idx(u)? as usize;
        loop {
            let mut moved = false;
            for k in 0..self.rank {
                if j & (1 << k) == 0 {
                    continue;
                }
                let r = self.w0.elems[idx].rmul[k] as usize;
                if self.w0.elems[r].len < self.w0.elems[idx].len {
                    idx = r;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Ok(FiniteWeylElement { mat: self.w0.elems[idx].mat });
            }
        }
    }

    /// Stabilizer generators of a rational coweight: simple reflections
    /// fixing it, as a bitmask.
    pub fn stabilizer_simples(&self, v: &RationalCoweight) -> u8 {
        let mut mask = 0u8;
        for i in 0..self.rank {
            if v.c[i].is_zero() {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// dim of the fixed space of u . sigma acting on the coweight space.
    pub fn twisted_fixed_dim(&self, u: &FiniteWeylElement) -> usize {
        let m = u.mat.mul(&self.sigma.matrix());
        fixed_space_dim(&m)
    }

    pub fn sigma_fixed_dim(&self) -> usize {
        fixed_space_dim(&self.sigma.matrix())
    }
}

fn simple_reflection_mat(cartan: &[[i64; MAXN]; MAXN], rank: usize, k: usize) -> Mat {
    // s_k(v)_i = v_i - v_k * cartan[k][i]
    let mut m = Mat::identity(rank);
    for i in 0..rank {
        let cur = m.get(i, k) - cartan[k][i];
        m.set(i, k, cur);
    }
    m
}

fn generate_roots(
    cartan: &[[i64; MAXN]; MAXN],
    rank: usize,
) -> Vec<Root> {
    // Closure of the simple roots under simple reflections, keeping the
    // positives. Coroots transform as coweights alongside.
    let mut all: Vec<([i64; MAXN], Coweight)> = Vec::new();
    let mut seen: FxHashMap<[i64; MAXN], ()> = FxHashMap::default();
    let mut queue: Vec<([i64; MAXN], Coweight)> = Vec::new();
    for i in 0..rank {
        let mut coeffs = [0i64; MAXN];
        coeffs[i] = 1;
        let coroot = Coweight::from_slice(&cartan[i][..rank]);
        queue.push((coeffs, coroot));
    }
    let smats: Vec<Mat> = (0..rank).map(|k| simple_reflection_mat(cartan, rank, k)).collect();
    while let Some((coeffs, coroot)) = queue.pop() {
        if seen.insert(coeffs, ()).is_some() {
            continue;
        }
        all.push((coeffs, coroot));
        for k in 0..rank {
            // s_k on the root side: coefficient k moves by the pairing
            // with the k-th simple coroot.
            let mut pair = 0i64;
            for j in 0..rank {
                pair += cartan[k][j] * coeffs[j];
            }
            let mut nc = coeffs;
            nc[k] -= pair;
            let ncoroot = Coweight { c: smats[k].apply(&coroot.c) };
            if !seen.contains_key(&nc) {
                queue.push((nc, ncoroot));
            }
        }
    }
    let mut roots: Vec<Root> = all
        .into_iter()
        .filter(|(c, _)| c[..rank].iter().all(|&x| x >= 0))
        .map(|(coeffs, coroot)| Root { coeffs, coroot, height: coeffs[..rank].iter().sum() })
        .collect();
    roots.sort_by_key(|r| (r.height, r.coeffs));
    roots
}

fn build_w0(
    cartan: &[[i64; MAXN]; MAXN],
    rank: usize,
    roots: &[Root],
    root_index: &FxHashMap<[i64; MAXN], u16>,
) -> W0Table {
    let smats: Vec<Mat> = (0..rank).map(|k| simple_reflection_mat(cartan, rank, k)).collect();
    // Contragredient generators act on root coordinates.
    let root_smats: Vec<Mat> = smats.iter().map(|m| m.transpose()).collect();

    let mut elems: Vec<W0Info> = Vec::new();
    let mut index: FxHashMap<Mat, u16> = FxHashMap::default();

    let id = Mat::identity(rank);
    index.insert(id, 0);
    elems.push(W0Info {
        mat: id,
        root_mat: id,
        len: 0,
        inv: 0,
        rmul: [u16::MAX; MAXN],
        lmul: [u16::MAX; MAXN],
        root_image: Vec::new(),
        supp: 0,
        word: Vec::new(),
    });

    // BFS by right multiplication; BFS depth equals Coxeter length.
    let mut head = 0usize;
    while head < elems.len() {
        for k in 0..rank {
            if elems[head].rmul[k] != u16::MAX {
                continue;
            }
            let nm = elems[head].mat.mul(&smats[k]);
            let nrm = elems[head].root_mat.mul(&root_smats[k]);
            let ni = match index.get(&nm) {
                Some(&i) => i,
                None => {
                    let i = elems.len() as u16;
                    index.insert(nm, i);
                    let mut word = elems[head].word.clone();
                    word.push(k as u8);
                    elems.push(W0Info {
                        mat: nm,
                        root_mat: nrm,
                        len: elems[head].len + 1,
                        inv: u16::MAX,
                        rmul: [u16::MAX; MAXN],
                        lmul: [u16::MAX; MAXN],
                        root_image: Vec::new(),
                        supp: elems[head].supp | (1 << k),
                        word,
                    });
                    i
                }
            };
            elems[head].rmul[k] = ni;
            elems[ni as usize].rmul[k] = head as u16;
        }
        head += 1;
    }

    // Choose the lexicographically smallest reduced word per element.
    // BFS above already visits in word-lex order among same lengths when
    // generators are tried in index order, so the first recorded word is
    // lex-minimal within its length class.

    for i in 0..elems.len() {
        let inv = elems[i].mat.inverse_unimodular();
        let ii = *index.get(&inv).expect("group closed under inverse");
        elems[i].inv = ii;
        for k in 0..rank {
            let lm = smats[k].mul(&elems[i].mat);
            elems[i].lmul[k] = *index.get(&lm).expect("closed under left mult");
        }
        let mut images = Vec::with_capacity(roots.len());
        for r in roots {
            let mut img = [0i64; MAXN];
            // root_mat acts on root coordinates.
            let m = &elems[i].root_mat;
            for a in 0..rank {
                let mut acc = 0;
                for b in 0..rank {
                    acc += m.get(a, b) * r.coeffs[b];
                }
                img[a] = acc;
            }
            let signed = if img[..rank].iter().all(|&x| x >= 0) {
                (root_index[&img] + 1) as i16
            } else {
                let mut neg = [0i64; MAXN];
                for a in 0..rank {
                    neg[a] = -img[a];
                }
                -((root_index[&neg] + 1) as i16)
            };
            images.push(signed);
        }
        elems[i].root_image = images;
    }

    let longest = elems
        .iter()
        .enumerate()
        .max_by_key(|(_, e)| e.len)
        .map(|(i, _)| i as u16)
        .unwrap();

    W0Table { elems, index, longest }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(t: CartanType, rank: usize) -> RootDatum {
        RootDatum::new(t, rank, LatticeMode::Adjoint, SigmaPerm::identity(rank)).unwrap()
    }

    #[test]
    fn positive_root_counts() {
        let expect = [
            (CartanType::A, 1, 1),
            (CartanType::A, 2, 3),
            (CartanType::B, 2, 4),
            (CartanType::G, 2, 6),
            (CartanType::A, 3, 6),
            (CartanType::B, 3, 9),
            (CartanType::C, 3, 9),
            (CartanType::D, 4, 12),
            (CartanType::F, 4, 24),
        ];
        for (t, n, count) in expect {
            let d = datum(t, n);
            assert_eq!(d.positive_roots.len(), count, "{t}{n}");
            // The longest element has length equal to the number of
            // positive roots.
            assert_eq!(d.w0_len(&d.longest_w0()).unwrap(), count as u32, "{t}{n}");
        }
    }

    #[test]
    fn w0_orders() {
        assert_eq!(datum(CartanType::A, 2).w0_order(), 6);
        assert_eq!(datum(CartanType::B, 2).w0_order(), 8);
        assert_eq!(datum(CartanType::G, 2).w0_order(), 12);
        assert_eq!(datum(CartanType::A, 3).w0_order(), 24);
        assert_eq!(datum(CartanType::B, 3).w0_order(), 48);
        assert_eq!(datum(CartanType::D, 4).w0_order(), 192);
        assert_eq!(datum(CartanType::F, 4).w0_order(), 1152);
    }

    #[test]
    fn pairing_examples() {
        let d = datum(CartanType::A, 2);
        // fundamental coweight against its simple root
        let omega1 = Coweight::from_slice(&[1, 0]).to_rational();
        assert_eq!(d.pairing(&omega1, &[1, 0]).unwrap(), rat(1, 1));
        // <alpha^vee, alpha> = 2
        let a1v = Coweight::from_slice(&d.cartan[0][..2]).to_rational();
        assert_eq!(d.pairing(&a1v, &[1, 0]).unwrap(), rat(2, 1));
        // Cartan entry
        assert_eq!(d.pairing(&a1v, &[0, 1]).unwrap(), rat(-1, 1));
        // dimension mismatch is an error
        assert!(d.pairing(&a1v, &[1, 0, 0]).is_err());
    }

    #[test]
    fn dominant_rep_basics() {
        let d = datum(CartanType::A, 1);
        let momega = Coweight::from_slice(&[-1]).to_rational();
        let (dom, x) = d.dominant_rep(&momega);
        assert_eq!(dom, Coweight::from_slice(&[1]).to_rational());
        assert_eq!(x, d.simple_reflection_w0(0));
        // already dominant: identity
        let (dom2, x2) = d.dominant_rep(&dom);
        assert_eq!(dom2, dom);
        assert_eq!(x2, d.identity_w0());
    }

    #[test]
    fn dominant_rep_matches_orbit_enumeration() {
        // Independent oracle: enumerate the whole W0-orbit and find the
        // dominant member and a shortest element reaching the input.
        for (t, n) in [(CartanType::A, 2), (CartanType::B, 2), (CartanType::A, 3)] {
            let d = datum(t, n);
            let samples: Vec<Coweight> = match n {
                2 => vec![
                    Coweight::from_slice(&[1, -1]),
                    Coweight::from_slice(&[-2, 1]),
                    Coweight::from_slice(&[0, -3]),
                ],
                _ => vec![
                    Coweight::from_slice(&[1, -1, 2]),
                    Coweight::from_slice(&[-1, 0, 1]),
                ],
            };
            for mu in samples {
                let (dom, x) = d.dominant_rep(&mu.to_rational());
                assert_eq!(
                    d.w0_apply_rational(&x, &dom),
                    mu.to_rational(),
                    "x(dom) must reproduce mu"
                );
                let mut best: Option<(u32, RationalCoweight)> = None;
                for u in d.w0_elements() {
                    let img = d.w0_apply_rational(&u, &mu.to_rational());
                    if d.is_dominant(&img) {
                        let l = d.w0_len(&u).unwrap();
                        if best.as_ref().is_none_or(|(bl, _)| l < *bl) {
                            best = Some((l, img));
                        }
                    }
                }
                let (_, dom_oracle) = best.expect("orbit contains a dominant member");
                assert_eq!(dom, dom_oracle);
                // minimality of x
                let min_len = d
                    .w0_elements()
                    .filter(|u| d.w0_apply_rational(u, &dom) == mu.to_rational())
                    .map(|u| d.w0_len(&u).unwrap())
                    .min()
                    .unwrap();
                assert_eq!(d.w0_len(&x).unwrap(), min_len);
            }
        }
    }

    #[test]
    fn dominant_rep_is_w0_equivariant() {
        for (t, n, mu) in [
            (CartanType::A, 2, Coweight::from_slice(&[1, -2])),
            (CartanType::B, 2, Coweight::from_slice(&[-1, 3])),
            (CartanType::A, 3, Coweight::from_slice(&[1, -2, 1])),
            (CartanType::B, 3, Coweight::from_slice(&[0, 2, -1])),
        ] {
            let d = datum(t, n);
            let mu = mu.to_rational();
            let (dom, _) = d.dominant_rep(&mu);
            for u in d.w0_elements() {
                let img = d.w0_apply_rational(&u, &mu);
                assert_eq!(d.dominant_rep(&img).0, dom, "{t}{n}");
            }
        }
    }

    #[test]
    fn rho_family() {
        let d = datum(CartanType::A, 1);
        assert_eq!(d.rho_check_j(0), Coweight::zero());
        assert_eq!(d.eta_check_j(0), Coweight::zero());
        let j = 1u8;
        assert_eq!(d.rho_check_j(j), Coweight::from_slice(&[1]));
        assert_eq!(d.eta_check_j(j), Coweight::from_slice(&[1]));

        let d2 = datum(CartanType::A, 2);
        let full = d2.full_support();
        // rho^vee pairs to 1 with every simple root
        assert_eq!(d2.rho_check_j(full), Coweight::from_slice(&[1, 1]));
        // -rho^vee is antidominant; its dominant representative is rho^vee
        assert_eq!(d2.eta_check_j(full), Coweight::from_slice(&[1, 1]));
        // verify via explicit orbit enumeration
        let target = Coweight::from_slice(&[1, 1]).neg().to_rational();
        let dom = d2
            .w0_elements()
            .map(|u| d2.w0_apply_rational(&u, &target))
            .find(|v| d2.is_dominant(v))
            .unwrap();
        assert_eq!(dom.to_integral().unwrap(), d2.eta_check_j(full));
    }

    #[test]
    fn rho_check_is_half_sum_of_positive_coroots() {
        for (t, n) in [(CartanType::A, 2), (CartanType::B, 2), (CartanType::G, 2), (CartanType::B, 3)] {
            let d = datum(t, n);
            let mut sum = Coweight::zero();
            for r in &d.positive_roots {
                sum = sum.add(&r.coroot);
            }
            let rho_check = d.rho_check_j(d.full_support());
            for i in 0..n {
                assert_eq!(sum.c[i], 2 * rho_check.c[i], "{t}{n}");
            }
        }
    }

    #[test]
    fn rho_weight_pairs_to_one() {
        for (t, n) in [(CartanType::A, 2), (CartanType::B, 2), (CartanType::G, 2), (CartanType::B, 3)] {
            let d = datum(t, n);
            for i in 0..n {
                let coroot = Coweight::from_slice(&d.cartan[i][..n]).to_rational();
                assert_eq!(d.pair_rho(&coroot), rat(1, 1), "{t}{n} coroot {i}");
            }
            // <v, 2 rho> equals the sum of pairings with all positive roots
            let v = Coweight::from_slice(&[1, 1, 1, 1][..n]).to_rational();
            let two_rho: Rat = (0..d.positive_roots.len()).map(|t| d.pair_root(&v, t)).sum();
            assert_eq!(d.pair_rho(&v) * rat(2, 1), two_rho);
        }
    }

    #[test]
    fn diamond_examples() {
        let d = datum(CartanType::A, 2);
        let v = Coweight::from_slice(&[2, -1]).to_rational();
        assert_eq!(d.diamond(&v), v, "sigma = id fixes everything");

        let flip = SigmaPerm::from_images(&[2, 1, 0]).unwrap();
        let d3 = RootDatum::new(CartanType::A, 3, LatticeMode::Adjoint, flip).unwrap();
        let omega1 = Coweight::from_slice(&[1, 0, 0]).to_rational();
        let mut expect = RationalCoweight::zero();
        expect.c[0] = rat(1, 2);
        expect.c[2] = rat(1, 2);
        assert_eq!(d3.diamond(&omega1), expect);
        // sigma-fixed coweights are fixed by diamond
        let fixed = Coweight::from_slice(&[1, 0, 1]).to_rational();
        assert_eq!(d3.diamond(&fixed), fixed);
    }

    #[test]
    fn dominance_orders() {
        let d = datum(CartanType::A, 2);
        let rho = Coweight::from_slice(&[1, 1]).to_rational();
        let zero = RationalCoweight::zero();
        assert!(d.geq_z(&rho, &zero), "rho^vee = a1^vee + a2^vee >= 0");
        assert!(d.geq_q(&rho, &zero));
        // omega1 = (2 a1^vee + a2^vee)/3: Q-positive but not Z-integral
        let omega1 = Coweight::from_slice(&[1, 0]).to_rational();
        assert!(d.geq_q(&omega1, &zero));
        assert!(!d.geq_z(&omega1, &zero));
        // reflexivity
        assert!(d.geq_q(&omega1, &omega1) && d.geq_z(&omega1, &omega1));
    }

    #[test]
    fn supp_sigma_examples() {
        let d = datum(CartanType::A, 2);
        assert_eq!(d.supp_sigma(&d.identity_w0()).unwrap(), 0);
        assert_eq!(d.supp_sigma(&d.simple_reflection_w0(0)).unwrap(), 0b01);

        let flip = SigmaPerm::from_images(&[1, 0]).unwrap();
        let df = RootDatum::new(CartanType::A, 2, LatticeMode::Adjoint, flip).unwrap();
        assert_eq!(df.supp_sigma(&df.simple_reflection_w0(0)).unwrap(), 0b11);
    }

    #[test]
    fn sigma_acts_by_length_preserving_automorphism() {
        let flip = SigmaPerm::from_images(&[2, 1, 0]).unwrap();
        let d = RootDatum::new(CartanType::A, 3, LatticeMode::Adjoint, flip).unwrap();
        for u in d.w0_elements() {
            let su = d.sigma_of_w0(&u);
            assert_eq!(d.w0_len(&u).unwrap(), d.w0_len(&su).unwrap());
        }
        for a in [d.simple_reflection_w0(0), d.simple_reflection_w0(1)] {
            for b in [d.simple_reflection_w0(2), d.longest_w0()] {
                let lhs = d.sigma_of_w0(&d.w0_mul(&a, &b).unwrap());
                let rhs = d.w0_mul(&d.sigma_of_w0(&a), &d.sigma_of_w0(&b)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn foreign_matrix_is_rejected() {
        let d = datum(CartanType::A, 2);
        let mut m = Mat::identity(2);
        m.set(0, 1, 7);
        let bogus = FiniteWeylElement { mat: m };
        assert!(matches!(d.w0_len(&bogus), Err(AdlvError::DatumMismatch)));
    }

    #[test]
    fn sc_lattice_membership() {
        let d = RootDatum::new(CartanType::A, 2, LatticeMode::SimplyConnected, SigmaPerm::identity(2)).unwrap();
        let rho = Coweight::from_slice(&[1, 1]);
        assert!(d.lattice_contains(&rho), "rho^vee lies in the coroot lattice of A2");
        let omega1 = Coweight::from_slice(&[1, 0]);
        assert!(!d.lattice_contains(&omega1));
    }
}
