use driftless::linalg::{pinv, Mat};
use driftless::schedule::harmonic_schedule;
use driftless::synthesis::{solve_tbar, vbar_value, BoundSequence};
use driftless::Error;
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Mat> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5.0f64..5.0, r * c).prop_map(move |d| Mat::new(r, c, d))
    })
}

/// Rank-deficient products `U V` with inner dimension 1.
fn rank_one() -> impl Strategy<Value = Mat> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        (prop::collection::vec(-3.0f64..3.0, r), prop::collection::vec(-3.0f64..3.0, c)).prop_map(
            move |(u, v)| {
                let data = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
                Mat::new(r, c, data)
            },
        )
    })
}

fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.sub(b).inf_norm() <= tol * (1.0 + b.inf_norm())
}

fn penrose(a: &Mat) -> Result<(), TestCaseError> {
    let p = pinv(a, 0.0).unwrap();
    prop_assert_eq!((p.rows(), p.cols()), (a.cols(), a.rows()));
    let ap = a.matmul(&p);
    let pa = p.matmul(a);
    prop_assert!(close(&ap.matmul(a), a, 1e-9));
    prop_assert!(close(&pa.matmul(&p), &p, 1e-9));
    prop_assert!(close(&ap.transpose(), &ap, 1e-9));
    prop_assert!(close(&pa.transpose(), &pa, 1e-9));
    Ok(())
}

proptest! {
    #[test]
    fn pinv_penrose_identities(a in matrix()) {
        penrose(&a)?;
    }

    #[test]
    fn pinv_penrose_rank_deficient(a in rank_one()) {
        penrose(&a)?;
    }

    #[test]
    fn bound_sequence_contracts(c in 1e-3f64..50.0, d_s in 1e-3f64..10.0, t_star in 1e-2f64..20.0) {
        let s = harmonic_schedule(t_star, 300).unwrap();
        let b = BoundSequence::new(c, d_s, &s);
        let v1 = b.vbar(1).unwrap();
        let mut prev = v1;
        for n in 1..300 {
            let next = b.vbar(n + 1).unwrap();
            let k = n as f64;
            prop_assert!(next <= prev * k / (k + 1.0) * (1.0 + 1e-12));
            prop_assert!(next <= v1 / (k + 1.0) * (1.0 + 1e-12));
            prev = next;
        }
    }

    #[test]
    fn tbar_is_a_root(c1 in 1e-6f64..0.999_999, d_s in 1e-3f64..10.0) {
        let t = solve_tbar(c1, d_s).unwrap();
        let y = t * d_s;
        prop_assert!(y > 0.0);
        // e^y − y/c1 − 1, written with expm1 to avoid cancellation near 0
        let residual = y.exp_m1() - y / c1;
        let scale = y.exp().max(y / c1 + 1.0);
        prop_assert!(residual.abs() <= 1e-12 * scale);
    }

    #[test]
    fn no_root_above_one(c1 in 1.0f64..1e3, d_s in 1e-3f64..10.0) {
        let no_root = matches!(solve_tbar(c1, d_s), Err(Error::NoRoot { .. }));
        prop_assert!(no_root);
    }
}

#[test]
fn vbar_matches_closed_form() {
    let s = harmonic_schedule(4.0, 10).unwrap();
    let b = BoundSequence::new(2.0, 0.5, &s);
    for n in 1..=10 {
        let dt = 4.0 / n as f64;
        let oracle = 2.0 / 0.5 * ((0.5 * dt).exp() - 1.0);
        assert!((b.vbar(n).unwrap() - oracle).abs() < 1e-14 * oracle);
        assert_eq!(b.vbar(n).unwrap(), vbar_value(2.0, 0.5, dt));
    }
}
