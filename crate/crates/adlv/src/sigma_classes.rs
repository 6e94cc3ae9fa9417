//! sigma-conjugacy class invariants: Newton points, the classifying
//! (kappa, nu) pair, the partial order on classes, straightness, and the
//! defect.

use crate::affine_weyl::{AffineElement, KappaClass};
use crate::error::{AdlvError, Result};
use crate::linalg::{format_rat, rat, Rat};
use crate::reduction_oracle::Oracle;
use crate::root_system::{RationalCoweight, RootDatum};
use num_traits::Zero;
use serde_json::{json, Value};

/// Classifying invariant of a sigma-conjugacy class: the Kottwitz point
/// and the dominant Newton point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassInvariant {
    pub kappa: KappaClass,
    pub nu: RationalCoweight,
}

impl ClassInvariant {
    pub fn to_json(&self, d: &RootDatum) -> Value {
        json!({
            "kappa": self.kappa.0,
            "nu": (0..d.rank).map(|i| format_rat(self.nu.c[i])).collect::<Vec<_>>(),
        })
    }
}

/// Newton point: dominant representative of the average translation of
/// the sigma-twisted power of w.
pub fn newton_point(d: &RootDatum, w: &AffineElement) -> Result<RationalCoweight> {
    d.w0_idx(&w.fin)?;
    // phi = u o sigma as a linear map; find its order by matrix powers.
    let step = w.fin.mat.mul(&d.sigma.matrix());
    let identity = crate::linalg::Mat::identity(d.rank);
    let mut order = 1usize;
    let mut acc = step;
    while acc != identity {
        acc = acc.mul(&step);
        order += 1;
        if order > 64 * d.w0_order() {
            return Err(AdlvError::InvariantViolation(
                "twisted finite part does not have finite order".into(),
            ));
        }
    }
    let phi = |v: &RationalCoweight| d.w0_apply_rational(&w.fin, &d.sigma.apply_rational(v));
    let lam = w.lam.to_rational();
    let mut total = lam;
    let mut cur = lam;
    for _ in 1..order {
        cur = phi(&cur);
        total = total.add(&cur);
    }
    let avg = total.scale(rat(1, order as i64));
    Ok(d.dominant_rep(&avg).0)
}

/// (kappa, nu) of an element, with no minimality requirement. Only
/// meaningful as a class label for minimal-length elements; the oracle
/// calls this at leaves, everyone else should go through
/// [`class_of_element`].
pub fn invariants_of(d: &RootDatum, w: &AffineElement) -> Result<ClassInvariant> {
    Ok(ClassInvariant { kappa: d.kappa(w), nu: newton_point(d, w)? })
}

/// Class of the element generated by a minimal-length w; the minimality
/// precondition is checked via the reduction oracle.
pub fn class_of_element(oracle: &Oracle<'_>, w: &AffineElement) -> Result<ClassInvariant> {
    if !oracle.is_minimal(w)? {
        return Err(AdlvError::Precondition(
            "class_of_element requires a minimal-length element of its sigma-conjugacy class"
                .into(),
        ));
    }
    invariants_of(oracle.datum, w)
}

/// sigma-straight elements: length equals <nu, 2 rho>.
pub fn is_sigma_straight(d: &RootDatum, w: &AffineElement) -> Result<bool> {
    let nu = newton_point(d, w)?;
    let two_rho_pairing = d.pair_rho(&nu) * rat(2, 1);
    Ok(Rat::from_integer(d.length(w)? as i64) == two_rho_pairing)
}

/// Partial order on classes: equal kappa and dominance-comparable Newton
/// points.
pub fn class_leq(d: &RootDatum, a: &ClassInvariant, b: &ClassInvariant) -> bool {
    a.kappa == b.kappa && d.geq_q(&b.nu, &a.nu)
}

/// Defect of a class: the F-rank drop of its sigma-centralizer, computed
/// from any sigma-straight representative x = t^mu u as
/// `dim V^sigma - dim V^{u sigma}`. Straight representatives are found by
/// scanning the length sphere of radius <nu, 2 rho>; conjugate straight
/// representatives give conjugate twisted actions, so the value is well
/// defined.
pub fn defect(d: &RootDatum, b: &ClassInvariant) -> Result<u32> {
    let two_rho_nu = d.pair_rho(&b.nu) * rat(2, 1);
    if !two_rho_nu.is_integer() || two_rho_nu < Rat::zero() {
        return Err(AdlvError::InvariantViolation(format!(
            "<nu, 2rho> = {} is not a natural number; not a Newton point of this group",
            format_rat(two_rho_nu)
        )));
    }
    let radius = two_rho_nu.to_integer() as u32;
    ensure_straight_registry(d, radius)?;
    let reg = d.affine.straight.read().unwrap();
    reg.map.get(b).copied().ok_or_else(|| {
        AdlvError::InvariantViolation(
            "no sigma-straight representative found for the class; invalid class label".into(),
        )
    })
}

/// All classes with a straight representative of length <= radius: a
/// complete list of the classes whose Newton point pairs with 2 rho to at
/// most `radius`.
pub fn classes_up_to(d: &RootDatum, radius: u32) -> Result<Vec<ClassInvariant>> {
    ensure_straight_registry(d, radius)?;
    let reg = d.affine.straight.read().unwrap();
    Ok(reg.map.keys().cloned().collect())
}

fn ensure_straight_registry(d: &RootDatum, radius: u32) -> Result<()> {
    {
        let reg = d.affine.straight.read().unwrap();
        if reg.done_radius >= radius as i64 {
            return Ok(());
        }
    }
    // Grow the sphere cache before taking the registry lock.
    let _ = d.ball(radius);
    let mut reg = d.affine.straight.write().unwrap();
    let start = (reg.done_radius + 1).max(0) as u32;
    for k in start..=radius {
        for x in d.sphere(k) {
            let nu = newton_point(d, &x)?;
            let two_rho_nu = d.pair_rho(&nu) * rat(2, 1);
            if two_rho_nu != Rat::from_integer(k as i64) {
                continue;
            }
            let inv = ClassInvariant { kappa: d.kappa(&x), nu };
            let def = d.sigma_fixed_dim() as i64 - d.twisted_fixed_dim(&x.fin) as i64;
            debug_assert!(def >= 0);
            reg.map.entry(inv).or_insert(def as u32);
        }
    }
    reg.done_radius = radius as i64;
    Ok(())
}
