//! Arbitrary-precision integers and exact rationals, Sylvester's sequence,
//! and small helpers shared by every other module.
//!
//! The integer type is GMP-backed (`rug`). That is not a luxury: the
//! dimension-30 faithfulness sweep takes gcds of operands with hundreds of
//! millions of digits, which needs subquadratic multiplication and gcd.
//! Rationals normalize to lowest terms on every operation, so denominator
//! queries ("the degree is the denominator of the first charge") are
//! always canonical.

use std::sync::{Mutex, OnceLock};

pub use rug::{Integer, Rational};

/// Largest index `sylvester` will compute.
///
/// `s_n` has about `2^(n-1)` bits, so the cap keeps a stray index from
/// trying to allocate terabytes. The dimension-30 loop-family verification
/// consumes `s_0..=s_16`.
pub const SYLVESTER_CAP: usize = 34;

fn sylvester_table() -> &'static Mutex<Vec<Integer>> {
    static TABLE: OnceLock<Mutex<Vec<Integer>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Integer::from(2)]))
}

/// `s_n` of Sylvester's sequence: `s_0 = 2`, `s_n = s_{n-1}(s_{n-1} - 1) + 1`.
///
/// Memoized; the first few values are 2, 3, 7, 43, 1807.
pub fn sylvester(n: usize) -> Integer {
    assert!(
        n <= SYLVESTER_CAP,
        "sylvester index {n} exceeds cap {SYLVESTER_CAP}"
    );
    let mut table = sylvester_table().lock().unwrap();
    while table.len() <= n {
        let last = table.last().unwrap();
        let next = Integer::from(last * last) - last + 1u32;
        table.push(next);
    }
    table[n].clone()
}

/// `1 - (1/s_0 + ... + 1/s_{n-1})`, which equals `1/(s_n - 1)`.
pub fn sylvester_deficit(n: usize) -> Rational {
    let mut acc = Rational::from(1);
    for i in 0..n {
        acc -= Rational::from((Integer::from(1), sylvester(i)));
    }
    acc
}

/// Shorthand constructor.
pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

/// Product of a slice, combining halves so operands meet peers of
/// comparable size (matters once factors reach millions of digits).
pub fn product(xs: &[Integer]) -> Integer {
    match xs.len() {
        0 => Integer::from(1),
        1 => xs[0].clone(),
        _ => {
            let mid = xs.len() / 2;
            product(&xs[..mid]) * product(&xs[mid..])
        }
    }
}

/// lcm of the denominators of a list of rationals; the order of the tuple
/// in `(Q/Z)^n`. Empty input gives 1.
pub fn denominator_lcm(qs: &[Rational]) -> Integer {
    let mut acc = Integer::from(1);
    for q in qs {
        acc.lcm_mut(q.denom());
    }
    acc
}

/// True if every pair in `xs` is coprime. Duplicates of a value greater
/// than 1 count as a common factor.
pub fn pairwise_coprime(xs: &[Integer]) -> bool {
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            if Integer::from(a.gcd_ref(b)) != 1 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sylvester_first_terms() {
        let want = [2i64, 3, 7, 43, 1807];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(sylvester(n), *w);
        }
        // one step past the listed terms, by the recurrence
        assert_eq!(sylvester(5), 1807i64 * 1806 + 1);
        assert_eq!(sylvester(5), 3263443);
    }

    #[test]
    fn deficit_examples() {
        assert_eq!(sylvester_deficit(0), Rational::from(1));
        assert_eq!(sylvester_deficit(2), Rational::from((1, 6)));
        assert_eq!(sylvester_deficit(3), Rational::from((1, 42)));
    }

    #[test]
    fn deficit_reciprocal_identity() {
        for n in 0..13 {
            let lhs = sylvester_deficit(n) * Rational::from(sylvester(n) - 1u32);
            assert_eq!(lhs, 1, "deficit identity fails at n={n}");
        }
    }

    #[test]
    fn product_identity() {
        for n in 0..13 {
            let p: Integer = (0..n).map(sylvester).product();
            assert_eq!(sylvester(n), p + 1u32, "product identity fails at n={n}");
        }
    }

    #[test]
    fn pairwise_coprimality() {
        for i in 0..13 {
            for j in 0..i {
                assert_eq!(sylvester(i).gcd(&sylvester(j)), 1);
            }
        }
    }

    #[test]
    fn doubly_exponential_growth() {
        for n in 1..9 {
            let bound = Integer::from(Integer::u_pow_u(2, 1u32 << (n - 1)));
            assert!(sylvester(n) > bound, "growth bound fails at n={n}");
        }
    }

    #[test]
    fn product_tree_matches_fold() {
        let xs: Vec<Integer> = (1..20).map(Integer::from).collect();
        let direct: Integer = xs.iter().product();
        assert_eq!(product(&xs), direct);
        assert_eq!(product(&[]), 1);
    }

    #[test]
    fn denominator_lcm_basic() {
        let qs = [
            Rational::from((1, 6)),
            Rational::from((2, 15)),
            Rational::from(3),
        ];
        assert_eq!(denominator_lcm(&qs), 30);
        assert_eq!(denominator_lcm(&[]), 1);
    }
}
