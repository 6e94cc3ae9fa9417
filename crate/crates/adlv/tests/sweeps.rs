use adlv::parse::parse_group;
use adlv::sweep::{run_sweep, SweepConfig};

fn smoke(group: &str, max_len: u32) {
    let d = parse_group(group).unwrap();
    let cfg = SweepConfig { max_len, ..Default::default() };
    let out = run_sweep(&d, &cfg).unwrap();
    for v in out.summary.violations.iter().take(8) {
        eprintln!("violation [{group}]: {v}");
    }
    assert!(
        out.ok(),
        "{group} L={max_len}: {} violations, {}/{} agreements",
        out.summary.violations.len(),
        out.summary.agreements,
        out.summary.applicable
    );
    eprintln!(
        "{group} L={max_len}: {} elements, {} pairs, {} applicable, all agree",
        out.summary.w_examined, out.summary.pairs, out.summary.applicable
    );
}

#[test]
fn sweep_a1() {
    smoke("A1:adjoint", 10);
}

#[test]
fn sweep_a2() {
    smoke("A2:adjoint", 9);
}

#[test]
fn sweep_b2() {
    smoke("B2:adjoint", 8);
}

#[test]
fn sweep_g2() {
    smoke("G2:adjoint", 8);
}

#[test]
fn sweep_a3_flip() {
    smoke("A3:adjoint:sigma=flip", 6);
}

#[test]
fn sweep_a2_sc() {
    smoke("A2:simply_connected", 6);
}

#[test]
fn ball_sizes_are_nontrivial() {
    let d = parse_group("A3:adjoint:sigma=flip").unwrap();
    let n = d.ball(10).len();
    eprintln!("A3 ball(10) = {n}");
    assert!(n > 2000, "A3 ball must be substantial, got {n}");
}

#[test]
fn sweep_d4_rotation() {
    // triality rotation of the three outer nodes
    smoke("D4:adjoint:sigma=3,2,4,1", 3);
}

#[test]
fn sweep_c3() {
    smoke("C3:adjoint", 5);
}

// Deep elements: the main criterion's hypotheses only engage at lengths
// beyond full-ball reach in ranks 3 and 4; spot-verify exact agreement
// there on the x t^{rho_check} family, every class in the table plus the
// basic one.
#[test]
fn deep_elements_agree_in_higher_rank() {
    use adlv::formulas::{main_criterion, Verdict};
    use adlv::reduction_oracle::Oracle;
    use adlv::sweep::classes_for;
    use adlv::{AffineElement, Coweight};

    for (spec, x_words) in [
        ("B3:adjoint", vec![vec![0usize, 1, 2], vec![2, 1, 0], vec![1, 0, 2, 1]]),
        ("C3:adjoint", vec![vec![0, 1, 2], vec![2, 1, 0]]),
        ("D4:adjoint:sigma=3,2,4,1", vec![vec![0, 1, 2], vec![0, 1, 3]]),
        ("A4:adjoint", vec![vec![0, 1, 2, 3]]),
    ] {
        let d = parse_group(spec).unwrap();
        let oracle = Oracle::new(&d);
        let rho_check = Coweight::from_slice(&[1, 1, 1, 1][..d.rank]);
        let t = AffineElement::translation(rho_check, &d);
        let mut applicable = 0;
        for word in x_words {
            let mut x = d.identity_w0();
            for k in word {
                x = d.w0_mul(&x, &d.simple_reflection_w0(k)).unwrap();
            }
            let w = d.multiply(&AffineElement::from_finite(x), &t).unwrap();
            let table = oracle.dim_table(&w).unwrap();
            for b in classes_for(&d, &w, &oracle).unwrap() {
                match main_criterion(&d, &w, &b).unwrap() {
                    Verdict::NotApplicable(_) => {}
                    Verdict::Empty(_) => {
                        applicable += 1;
                        assert_eq!(table.dim(&b), None, "{spec}");
                    }
                    Verdict::Nonempty(dim) => {
                        applicable += 1;
                        assert_eq!(table.dim(&b), Some(dim), "{spec}");
                    }
                }
            }
        }
        assert!(applicable > 0, "{spec}: no applicable deep pairs");
        eprintln!("{spec}: {applicable} applicable deep pairs agree");
    }
}
