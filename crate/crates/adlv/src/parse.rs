//! Input grammars and canonical serialization.
//!
//! Group spec: `A2:adjoint:sigma=id`, `A3:simply_connected:sigma=flip`,
//! or an explicit permutation `D4:adjoint:sigma=3,2,1,4` (1-based images
//! of the simple roots). Lattice and sigma default to `adjoint` and `id`.
//!
//! Elements: either a word over `s0..sn` and `tau1..tauk` (whitespace
//! separated, `*` tokens ignored), or the triple form
//! `x=[word];lam=[c1,...,cn];y=[word]` meaning x t^lam y, or the pair
//! form `lam=[c1,...,cn];u=[word]` meaning t^lam u, which is also the
//! canonical output form. Translation coordinates are given in the basis
//! of the chosen lattice: fundamental coweights in adjoint mode, simple
//! coroots in simply connected mode.
//!
//! Classes: `k1,k2:n1,n2` with kappa coordinates before the colon (empty
//! for the trivial coinvariant group) and the Newton point after it, in
//! pairing coordinates, each entry an integer or `p/q`.

use crate::affine_weyl::{AffineElement, KappaClass};
use crate::error::{AdlvError, Result};
use crate::linalg::{format_rat, parse_rat, Rat};
use crate::root_system::{
    CartanType, Coweight, LatticeMode, RationalCoweight, RootDatum, SigmaPerm,
};

fn perr(token: &str, msg: &str) -> AdlvError {
    AdlvError::Parse { token: token.to_string(), msg: msg.to_string() }
}

pub fn parse_group(spec: &str) -> Result<RootDatum> {
    // accept whitespace as an alternative separator
    let normalized = spec.split_whitespace().collect::<Vec<_>>().join(":");
    let mut parts = normalized.split(':');
    let head = parts.next().unwrap_or("").trim().to_string();
    if head.len() < 2 {
        return Err(perr(&head, "expected a type letter followed by a rank"));
    }
    let (tch, rch) = head.split_at(1);
    let ctype = match tch {
        "A" | "a" => CartanType::A,
        "B" | "b" => CartanType::B,
        "C" | "c" => CartanType::C,
        "D" | "d" => CartanType::D,
        "E" | "e" => CartanType::E,
        "F" | "f" => CartanType::F,
        "G" | "g" => CartanType::G,
        _ => return Err(perr(tch, "unknown Cartan type")),
    };
    let rank: usize = rch.parse().map_err(|_| perr(rch, "rank must be a positive integer"))?;

    let mut mode = LatticeMode::Adjoint;
    let mut sigma_spec: Option<String> = None;
    for part in parts {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(rest) = part.strip_prefix("sigma=") {
            sigma_spec = Some(rest.to_string());
        } else {
            mode = match part {
                "adjoint" => LatticeMode::Adjoint,
                "simply_connected" | "sc" => LatticeMode::SimplyConnected,
                _ => return Err(perr(part, "expected `adjoint`, `simply_connected`, or `sigma=...`")),
            };
        }
    }

    let sigma = match sigma_spec.as_deref() {
        None | Some("id") => SigmaPerm::identity(rank),
        Some("flip") => {
            let images: Vec<usize> = match (ctype, rank) {
                (CartanType::A, n) => (0..n).rev().collect(),
                (CartanType::D, 4) => vec![0, 1, 3, 2],
                _ => {
                    return Err(perr(
                        "flip",
                        "this type has no standard order-two diagram flip; give the permutation explicitly",
                    ))
                }
            };
            SigmaPerm::from_images(&images)?
        }
        Some(images) => {
            let parsed: Vec<usize> = images
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .ok()
                        .and_then(|v| v.checked_sub(1))
                        .ok_or_else(|| perr(t, "sigma images must be 1-based indices"))
                })
                .collect::<Result<_>>()?;
            if parsed.len() != rank {
                return Err(perr(images, "sigma must list one image per simple root"));
            }
            SigmaPerm::from_images(&parsed)?
        }
    };

    RootDatum::new(ctype, rank, mode, sigma)
}

/// Canonical group spec string for a datum.
pub fn group_string(d: &RootDatum) -> String {
    let mode = match d.mode {
        LatticeMode::Adjoint => "adjoint",
        LatticeMode::SimplyConnected => "simply_connected",
    };
    let sigma = if d.sigma.is_identity() {
        "id".to_string()
    } else {
        (0..d.rank)
            .map(|i| (d.sigma.apply(i) + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{}{}:{}:sigma={}", d.cartan_type, d.rank, mode, sigma)
}

/// Lattice-basis coordinates of an integral coweight.
pub fn lattice_coords(d: &RootDatum, v: &Coweight) -> Result<Vec<i64>> {
    match d.mode {
        LatticeMode::Adjoint => Ok(v.c[..d.rank].to_vec()),
        LatticeMode::SimplyConnected => {
            let coords = d.coroot_coordinates(&v.to_rational());
            coords[..d.rank]
                .iter()
                .map(|r| {
                    if r.is_integer() {
                        Ok(r.to_integer())
                    } else {
                        Err(AdlvError::InvariantViolation(
                            "coweight is not in the coroot lattice".into(),
                        ))
                    }
                })
                .collect()
        }
    }
}

/// Coweight from lattice-basis coordinates.
pub fn coweight_from_lattice(d: &RootDatum, coords: &[i64]) -> Result<Coweight> {
    if coords.len() != d.rank {
        return Err(AdlvError::DimensionMismatch { expected: d.rank, got: coords.len() });
    }
    match d.mode {
        LatticeMode::Adjoint => Ok(Coweight::from_slice(coords)),
        LatticeMode::SimplyConnected => {
            let mut acc = Coweight::zero();
            for (i, &c) in coords.iter().enumerate() {
                let mut coroot = Coweight::from_slice(&d.cartan[i][..d.rank]);
                for x in &mut coroot.c {
                    *x *= c;
                }
                acc = acc.add(&coroot);
            }
            Ok(acc)
        }
    }
}

fn parse_word(d: &RootDatum, word: &str) -> Result<AffineElement> {
    let mut acc = d.identity_aff();
    for token in word.split_whitespace() {
        if token == "*" {
            continue;
        }
        let factor = if let Some(rest) = token.strip_prefix('s') {
            let i: usize = rest
                .parse()
                .map_err(|_| perr(token, "expected s<idx> with a numeric index"))?;
            if i > d.rank {
                return Err(perr(token, &format!("generator index out of range 0..{}", d.rank)));
            }
            d.simple_reflections()[i]
        } else if let Some(rest) = token.strip_prefix("tau") {
            let k: usize = rest
                .parse()
                .map_err(|_| perr(token, "expected tau<idx> with a numeric index"))?;
            if k == 0 || k >= d.omega_elements().len() {
                return Err(perr(
                    token,
                    &format!("tau index out of range 1..{}", d.omega_elements().len() - 1),
                ));
            }
            d.omega_elements()[k]
        } else {
            return Err(perr(token, "unknown token; expected s<idx>, tau<idx>, or *"));
        };
        acc = d.multiply(&acc, &factor)?;
    }
    Ok(acc)
}

fn parse_finite_word(d: &RootDatum, word: &str) -> Result<AffineElement> {
    let mut acc = d.identity_w0();
    for token in word.split_whitespace() {
        if token == "*" {
            continue;
        }
        let idx = token
            .strip_prefix('s')
            .and_then(|rest| rest.parse::<usize>().ok())
            .filter(|&i| i >= 1 && i <= d.rank)
            .ok_or_else(|| perr(token, "finite factor must use s1..sn"))?;
        acc = d.w0_mul(&acc, &d.simple_reflection_w0(idx - 1))?;
    }
    Ok(AffineElement::from_finite(acc))
}

fn parse_coords(d: &RootDatum, list: &str) -> Result<Coweight> {
    let coords: Vec<i64> = if list.trim().is_empty() {
        Vec::new()
    } else {
        list.split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| perr(t, "expected an integer")))
            .collect::<Result<_>>()?
    };
    let v = coweight_from_lattice(d, &coords)?;
    if !d.lattice_contains(&v) {
        return Err(perr(list, "coweight is not in the chosen lattice"));
    }
    Ok(v)
}

fn bracket_value<'a>(part: &'a str, key: &str) -> Option<&'a str> {
    let rest = part.trim().strip_prefix(key)?.trim_start().strip_prefix('=')?;
    let rest = rest.trim().strip_prefix('[')?;
    rest.trim_end().strip_suffix(']')
}

/// Parse an element in any of the accepted forms.
pub fn parse_element(d: &RootDatum, input: &str) -> Result<AffineElement> {
    let input = input.trim();
    if !input.contains('=') {
        return parse_word(d, input);
    }
    let mut x: Option<AffineElement> = None;
    let mut lam: Option<Coweight> = None;
    let mut y: Option<AffineElement> = None;
    let mut u: Option<AffineElement> = None;
    for part in input.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(v) = bracket_value(part, "x") {
            x = Some(parse_finite_word(d, v)?);
        } else if let Some(v) = bracket_value(part, "lam") {
            lam = Some(parse_coords(d, v)?);
        } else if let Some(v) = bracket_value(part, "y") {
            y = Some(parse_finite_word(d, v)?);
        } else if let Some(v) = bracket_value(part, "u") {
            u = Some(parse_finite_word(d, v)?);
        } else {
            return Err(perr(part, "expected x=[...], lam=[...], y=[...], or u=[...]"));
        }
    }
    let lam = lam.ok_or_else(|| perr(input, "triple form requires lam=[...]"))?;
    let t = AffineElement::translation(lam, d);
    match (x, y, u) {
        (x, y, None) => {
            let x = x.unwrap_or_else(|| d.identity_aff());
            let y = y.unwrap_or_else(|| d.identity_aff());
            d.multiply(&d.multiply(&x, &t)?, &y)
        }
        (None, None, Some(u)) => d.multiply(&t, &u),
        _ => Err(perr(input, "use either x/lam/y or lam/u, not both")),
    }
}

/// Canonical serialization: `lam=[...];u=[...]` with the finite part as
/// its lexicographically smallest reduced word. Parses back to an equal
/// element.
pub fn serialize_element(d: &RootDatum, w: &AffineElement) -> String {
    let coords = lattice_coords(d, &w.lam).expect("element of the datum");
    let word = d
        .w0_word(&w.fin)
        .expect("element of the datum")
        .iter()
        .map(|k| format!("s{}", k + 1))
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "lam=[{}];u=[{}]",
        coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
        word
    )
}

/// Parse `kappa:nu` into a class invariant; validates dominance.
pub fn parse_class(d: &RootDatum, input: &str) -> Result<crate::sigma_classes::ClassInvariant> {
    let (kpart, npart) = input
        .split_once(':')
        .ok_or_else(|| perr(input, "expected kappa:nu"))?;
    let kappa: Vec<i64> = if kpart.trim().is_empty() {
        Vec::new()
    } else {
        kpart
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| perr(t, "expected an integer")))
            .collect::<Result<_>>()?
    };
    let nu_list: Vec<Rat> = if npart.trim().is_empty() {
        Vec::new()
    } else {
        npart
            .split(',')
            .map(|t| parse_rat(t.trim()).ok_or_else(|| perr(t, "expected an integer or p/q")))
            .collect::<Result<_>>()?
    };
    if nu_list.len() != d.rank {
        return Err(perr(npart, &format!("nu must have {} coordinates", d.rank)));
    }
    let mut nu = RationalCoweight::zero();
    nu.c[..d.rank].copy_from_slice(&nu_list);
    if !d.is_dominant(&nu) {
        return Err(perr(npart, "nu must be dominant"));
    }
    // canonical kappa length check against the actual coinvariant group
    let probe = d.kappa(&d.identity_aff());
    if kappa.len() != probe.0.len() {
        return Err(perr(
            kpart,
            &format!("kappa must have {} coordinates for this group", probe.0.len()),
        ));
    }
    Ok(crate::sigma_classes::ClassInvariant { kappa: KappaClass(kappa), nu })
}

pub fn serialize_class(d: &RootDatum, b: &crate::sigma_classes::ClassInvariant) -> String {
    let kappa = b.kappa.0.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
    let nu = (0..d.rank)
        .map(|i| format_rat(b.nu.c[i]))
        .collect::<Vec<_>>()
        .join(",");
    format!("{kappa}:{nu}")
}

/// Serialization used for byte-stable sort keys.
pub fn sort_key(d: &RootDatum, w: &AffineElement) -> (u32, String) {
    (d.length(w).expect("element of the datum"), serialize_element(d, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> RootDatum {
        parse_group("A2:adjoint:sigma=id").unwrap()
    }

    #[test]
    fn group_specs() {
        let d = a2();
        assert_eq!(d.rank, 2);
        assert_eq!(group_string(&d), "A2:adjoint:sigma=id");
        let d3 = parse_group("A3:adjoint:sigma=flip").unwrap();
        assert_eq!(d3.sigma.apply(0), 2);
        assert_eq!(group_string(&d3), "A3:adjoint:sigma=3,2,1");
        assert!(parse_group("E6:adjoint").is_err());
        assert!(parse_group("A2:adjoint:sigma=2,2").is_err());
        let sc = parse_group("B2:sc").unwrap();
        assert_eq!(sc.mode, LatticeMode::SimplyConnected);
    }

    #[test]
    fn word_and_triple_forms() {
        let d = a2();
        let w1 = parse_element(&d, "s0 s1 s2").unwrap();
        let s0 = d.simple_reflections()[0];
        let s1 = d.simple_reflections()[1];
        let s2 = d.simple_reflections()[2];
        let expect = d.multiply(&d.multiply(&s0, &s1).unwrap(), &s2).unwrap();
        assert_eq!(w1, expect);

        let w2 = parse_element(&d, "s0 s1 * tau1").unwrap();
        let tau1 = d.omega_elements()[1];
        let expect2 = d
            .multiply(&d.multiply(&s0, &s1).unwrap(), &tau1)
            .unwrap();
        assert_eq!(w2, expect2);

        let w3 = parse_element(&d, "x=[s1]; lam=[2,1]; y=[s2]").unwrap();
        let t = AffineElement::translation(Coweight::from_slice(&[2, 1]), &d);
        let expect3 = d
            .multiply(
                &d.multiply(&AffineElement::from_finite(d.simple_reflection_w0(0)), &t)
                    .unwrap(),
                &AffineElement::from_finite(d.simple_reflection_w0(1)),
            )
            .unwrap();
        assert_eq!(w3, expect3);
    }

    #[test]
    fn bad_tokens_are_named() {
        let d = a2();
        match parse_element(&d, "s9") {
            Err(AdlvError::Parse { token, .. }) => assert_eq!(token, "s9"),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_element(&d, "tau5").is_err());
        assert!(parse_element(&d, "qq").is_err());
    }

    #[test]
    fn roundtrip_ball() {
        let d = a2();
        for w in d.ball(6) {
            let s = serialize_element(&d, &w);
            let back = parse_element(&d, &s).unwrap();
            assert_eq!(back, w, "{s}");
        }
    }

    #[test]
    fn roundtrip_sc_mode() {
        let d = parse_group("A2:simply_connected").unwrap();
        for w in d.ball(5) {
            let s = serialize_element(&d, &w);
            assert_eq!(parse_element(&d, &s).unwrap(), w, "{s}");
        }
    }

    #[test]
    fn class_strings() {
        let d = a2();
        let b = parse_class(&d, "0:1,1").unwrap();
        assert_eq!(serialize_class(&d, &b), "0:1/1,1/1");
        assert!(parse_class(&d, "0:1,-1").is_err(), "nu must be dominant");
        assert!(parse_class(&d, "0,0:1,1").is_err(), "kappa has one coordinate here");
        let b2 = parse_class(&d, "0:3/2,0").unwrap();
        assert_eq!(parse_class(&d, &serialize_class(&d, &b2)).unwrap(), b2);
    }

    #[test]
    fn sc_lattice_coords_in_elements() {
        let d = parse_group("A2:sc").unwrap();
        // lam=[1,0] means one copy of the first simple coroot
        let w = parse_element(&d, "lam=[1,0];u=[]").unwrap();
        assert_eq!(w.lam, Coweight::from_slice(&[2, -1]));
        // pairing-coordinate vectors outside the lattice are rejected
        assert!(parse_element(&d, "lam=[1];u=[]").is_err());
    }
}
