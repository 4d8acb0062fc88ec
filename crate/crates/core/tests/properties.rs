use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use qakns::coeff::Coeff;
use qakns::difference::Difference;
use qakns::matrix::Matrix;
use qakns::qop::QDOp;
use qakns::scalar::{int, ratio, QParam, Scalar};
use qakns::suite::random_operator;
use qakns::xseries::XSeries;
use qakns::zseries::MZSeries;

const NX: usize = 6;

fn q_values() -> impl Strategy<Value = Scalar> {
    prop_oneof![Just(int(2)), Just(ratio(1, 2)), Just(ratio(3, 5))]
}

fn poly() -> impl Strategy<Value = XSeries> {
    prop::collection::vec(-4i64..=4, 1..=NX + 1)
        .prop_map(|c| XSeries::polynomial(NX, &c.into_iter().map(int).collect::<Vec<_>>()).unwrap())
}

fn matrix() -> impl Strategy<Value = Matrix<XSeries>> {
    prop::collection::vec(poly(), 4).prop_map(|v| Matrix::from_fn(2, |i, j| v[2 * i + j].clone()))
}

/// `sum_{d=lo}^{hi} m_d z^d` stored down to degree -6.
fn series(lo: i64, hi: i64) -> impl Strategy<Value = MZSeries> {
    prop::collection::vec(matrix(), (hi - lo + 1) as usize).prop_map(move |ms| {
        MZSeries::from_terms(&XSeries::zero(NX), 2, (lo..=hi).zip(ms), -6, None)
    })
}

fn diff(q: &Scalar) -> Difference {
    Difference::Q(QParam::new(q.clone(), NX).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn x_product_commutes(f in poly(), g in poly()) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
    }

    #[test]
    fn q_leibniz_both_forms(q in q_values(), f in poly(), g in poly()) {
        let s = diff(&q);
        let lhs = s.derive(&f.mul(&g));
        let first = s.derive(&f).mul(&s.shift(&g)).add(&f.mul(&s.derive(&g)));
        let second = s.derive(&f).mul(&g).add(&s.shift(&f).mul(&s.derive(&g)));
        prop_assert!(lhs.sub(&first).is_zero_known());
        prop_assert!(lhs.sub(&second).is_zero_known());
    }

    #[test]
    fn z_product_associates(a in series(-2, 1), b in series(-2, 0), c in series(-1, 1)) {
        let l = a.mul(&b).mul(&c);
        let r = a.mul(&b.mul(&c));
        prop_assert!(l.sub(&r).is_zero_known());
    }

    #[test]
    fn z_inverse_round_trips(tail in series(-4, -1)) {
        let one = MZSeries::identity(&XSeries::zero(NX), 2, -6);
        let w = one.add(&tail);
        let inv = w.invert().unwrap();
        prop_assert!(w.mul(&inv).sub(&one).is_zero_known());
        prop_assert!(inv.mul(&w).sub(&one).is_zero_known());
    }

    #[test]
    fn composition_associates(q in q_values(), seed in any::<u64>()) {
        let s = diff(&q);
        let mut rng = StdRng::seed_from_u64(seed);
        let x = random_operator(&mut rng, &s, 2, NX, 4);
        let y = random_operator(&mut rng, &s, 2, NX, 4);
        let z = random_operator(&mut rng, &s, 2, NX, 4);
        let l = x.compose(&y).unwrap().compose(&z).unwrap();
        let r = x.compose(&y.compose(&z).unwrap()).unwrap();
        prop_assert!(l.try_sub(&r).unwrap().is_zero_known());
    }

    #[test]
    fn adjoint_reverses_products(q in q_values(), seed in any::<u64>()) {
        let s = diff(&q);
        let mut rng = StdRng::seed_from_u64(seed);
        let x = random_operator(&mut rng, &s, 2, NX, 4);
        let y = random_operator(&mut rng, &s, 2, NX, 4);
        let l = x.compose(&y).unwrap().adjoint().unwrap();
        let r = y.adjoint().unwrap().compose(&x.adjoint().unwrap()).unwrap();
        prop_assert!(l.try_sub(&r).unwrap().is_zero_known());
    }

    #[test]
    fn multiplication_adjoint_round_trips(q in q_values(), m in matrix()) {
        let s = diff(&q);
        let op = QDOp::multiplication(s, &MZSeries::constant(m.clone(), -1), 4);
        let back = op.adjoint().unwrap().adjoint().unwrap();
        prop_assert_eq!(back.coeff(0).unwrap().coeff(0).unwrap(), m);
    }

    #[test]
    fn pairing_is_stable_under_deeper_truncation(q in q_values(), seed in any::<u64>()) {
        let s = diff(&q);
        let a = [int(1), int(-1)];
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_operator(&mut rng, &s, 2, NX, 2);
        let g = random_operator(&mut rng, &s, 2, NX, 2);
        let shallow = QDOp::residue_pairing(&p, &g, &a).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let p = random_operator(&mut rng, &s, 2, NX, 3);
        let g = random_operator(&mut rng, &s, 2, NX, 3);
        let deep = QDOp::residue_pairing(&p, &g, &a).unwrap();
        prop_assert_eq!(shallow.lhs, deep.lhs);
    }

    #[test]
    fn nonnegative_bands_pair_to_zero(q in q_values(), m0 in matrix(), m1 in matrix(), m2 in matrix()) {
        let s = diff(&q);
        let zero = MZSeries::zero(&XSeries::zero(NX), 2, -1);
        let c = |m: &Matrix<XSeries>| MZSeries::constant(m.clone(), -1);
        let p = QDOp::from_terms(s.clone(), &zero, 4, [(0, c(&m0)), (1, c(&m1))]);
        let g = QDOp::from_terms(s, &zero, 4, [(0, c(&m2)), (2, c(&m1))]);
        let pr = QDOp::residue_pairing(&p, &g, &[int(1), int(-1)]).unwrap();
        prop_assert!(pr.lhs.is_zero_known() && pr.rhs_naive.is_zero_known() && pr.rhs_conv.is_zero_known());
    }
}
