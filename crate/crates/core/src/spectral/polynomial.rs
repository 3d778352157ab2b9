use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::params::IntersectionArray;

/// Coefficients (constant term first) of `det(xI - T)` for the
/// intersection matrix `T`, built from the leading principal minors.
pub fn characteristic_polynomial(arr: &IntersectionArray) -> Vec<BigInt> {
    let d = arr.diameter();
    // p_{-1} = 1, p_0 = x - a_0
    let mut prev: Vec<BigInt> = vec![BigInt::from(1)];
    let mut cur: Vec<BigInt> = vec![BigInt::from(-arr.a(0)), BigInt::from(1)];
    for i in 1..=d {
        let beta = BigInt::from(arr.b(i - 1)) * BigInt::from(arr.c(i));
        let ai = BigInt::from(arr.a(i));
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (e, coef) in cur.iter().enumerate() {
            next[e + 1] += coef;
            next[e] -= &ai * coef;
        }
        for (e, coef) in prev.iter().enumerate() {
            next[e] -= &beta * coef;
        }
        prev = cur;
        cur = next;
    }
    cur
}

pub fn evaluate_at_integer(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Number of eigenvalues of the intersection matrix strictly greater than
/// `x`, from the sign changes of the principal-minor sequence at `x`.
pub fn count_eigenvalues_above(arr: &IntersectionArray, x: &BigRational) -> usize {
    let n = x.numer();
    let den = x.denom();
    let den2 = den * den;
    // q_i = den^{i+1} p_i(x) keeps everything integral with the same signs.
    let mut prev = BigInt::from(1);
    let mut cur = n - BigInt::from(arr.a(0)) * den;
    let mut last_sign = 1i8;
    let mut changes = 0usize;
    let record = |value: &BigInt, last: &mut i8, changes: &mut usize| {
        if value.is_zero() {
            return;
        }
        let s = if value.is_positive() { 1 } else { -1 };
        if s != *last {
            *changes += 1;
        }
        *last = s;
    };
    record(&cur, &mut last_sign, &mut changes);
    for i in 1..=arr.diameter() {
        let beta = BigInt::from(arr.b(i - 1)) * BigInt::from(arr.c(i));
        let next = (n - BigInt::from(arr.a(i)) * den) * &cur - beta * &den2 * &prev;
        record(&next, &mut last_sign, &mut changes);
        prev = cur;
        cur = next;
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::complete_array;
    use crate::scalar::{int, rat};

    #[test]
    fn sporadic_polynomial_factors() {
        // (x - 8)(x - 2)(x + 1)(x + 4)
        let arr = complete_array(&[8, 6, 1], &[1, 3, 8]).unwrap();
        let p = characteristic_polynomial(&arr);
        let expected: Vec<BigInt> = [64, 40, -30, -5, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(p, expected);
        for root in [8, 2, -1, -4] {
            assert!(evaluate_at_integer(&p, &BigInt::from(root)).is_zero());
        }
    }

    #[test]
    fn sturm_counts() {
        let arr = complete_array(&[8, 6, 1], &[1, 3, 8]).unwrap();
        assert_eq!(count_eigenvalues_above(&arr, &int(9)), 0);
        assert_eq!(count_eigenvalues_above(&arr, &int(8)), 0);
        assert_eq!(count_eigenvalues_above(&arr, &rat(15, 2)), 1);
        assert_eq!(count_eigenvalues_above(&arr, &int(2)), 1);
        assert_eq!(count_eigenvalues_above(&arr, &int(0)), 2);
        assert_eq!(count_eigenvalues_above(&arr, &int(-4)), 3);
        assert_eq!(count_eigenvalues_above(&arr, &rat(-9, 2)), 4);
    }
}
