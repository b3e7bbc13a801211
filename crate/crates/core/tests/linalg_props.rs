use kh_core::linalg::{invariant_factors, mod2, rref_f2, smith_normal_form, BitRow, MatrixF2, MatrixZ};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn f2_matrix() -> impl Strategy<Value = MatrixF2> {
    (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0u8..2, c), r).prop_map(|rows| MatrixF2::from_dense(&rows))
    })
}

fn z_matrix(max: usize, range: i64) -> impl Strategy<Value = MatrixZ> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-range..=range, c), r).prop_map(|rows| MatrixZ::from_dense(&rows))
    })
}

/// Inverse of a unimodular matrix by Gauss-Jordan over the rationals,
/// which stays integral here.
fn inverse_unimodular(m: &MatrixZ) -> MatrixZ {
    let n = m.rows();
    let snf = smith_normal_form(m);
    // m = L^-1 I R^-1, so m^-1 = R L when all factors are 1
    assert!(snf.factors.iter().all(One::is_one) && snf.factors.len() == n);
    snf.right.mul(&snf.left)
}

proptest! {
    #[test]
    fn kernel_is_annihilated(m in f2_matrix()) {
        let r = rref_f2(&m);
        prop_assert_eq!(r.rank + r.kernel_basis.cols(), m.cols());
        prop_assert!(m.mul(&r.kernel_basis).is_zero());
        prop_assert_eq!(r.kernel_basis.rank(), r.kernel_basis.cols());
    }

    #[test]
    fn image_basis_spans_column_space(m in f2_matrix()) {
        let r = rref_f2(&m);
        prop_assert_eq!(r.image_basis.cols(), r.rank);
        prop_assert_eq!(r.image_basis.rank(), r.rank);
        // adjoining all original columns adds nothing
        let mut cols: Vec<BitRow> = (0..r.image_basis.cols()).map(|c| r.image_basis.column(c)).collect();
        cols.extend((0..m.cols()).map(|c| m.column(c)));
        prop_assert_eq!(MatrixF2::from_columns(m.rows(), &cols).rank(), r.rank);
    }

    #[test]
    fn snf_transforms_are_unimodular(m in z_matrix(8, 6)) {
        let s = smith_normal_form(&m);
        prop_assert!(s.left.det().abs().is_one());
        prop_assert!(s.right.det().abs().is_one());
        let d = s.left.mul(&m).mul(&s.right);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let want = if i == j && i < s.factors.len() { s.factors[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(d.get(i, j), want);
            }
        }
        for w in s.factors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        // reconstruction
        let back = inverse_unimodular(&s.left).mul(&d).mul(&inverse_unimodular(&s.right));
        prop_assert_eq!(back, m.clone());
        prop_assert_eq!(invariant_factors(&m), s.factors);
    }

    #[test]
    fn mod2_is_multiplicative(a in z_matrix(6, 9), seed in prop::collection::vec(-9i64..=9, 36)) {
        let k = a.cols();
        let rows: Vec<Vec<i64>> = (0..k).map(|i| seed[i * 6..i * 6 + 6].to_vec()).collect();
        let b = MatrixZ::from_dense(&rows);
        prop_assert_eq!(mod2(&a.mul(&b)), mod2(&a).mul(&mod2(&b)));
    }
}
