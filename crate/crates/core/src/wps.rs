//! Weight systems for weighted projective hypersurfaces: validity
//! predicates, the fractional-part machinery behind the Hodge formula, and
//! diagonal group actions on hypersurface equations.

use crate::arith::{Integer, Rational};
use crate::error::Error;
use crate::Result;

/// The datum `(a_0, ..., a_{n+1}; d)`: ambient weights plus the degree of
/// the hypersurface. Weights are stored in the order given (they are never
/// sorted, so charges and diamonds line up with the source coordinates);
/// every predicate is permutation-safe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    weights: Vec<Integer>,
    degree: Integer,
}

impl WeightSystem {
    /// Validates: at least 3 weights, all positive, degree at least the
    /// largest weight.
    pub fn new(weights: Vec<Integer>, degree: Integer) -> Result<Self> {
        if weights.len() < 3 {
            return Err(Error::Input(format!(
                "need at least 3 weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| *w < 1) {
            return Err(Error::Input("weights must be positive".into()));
        }
        if weights.iter().any(|w| *w > degree) {
            return Err(Error::Input(format!(
                "degree {degree} is smaller than some weight"
            )));
        }
        Ok(WeightSystem { weights, degree })
    }

    /// Convenience constructor from machine integers.
    pub fn from_u64(weights: &[u64], degree: u64) -> Result<Self> {
        Self::new(
            weights.iter().map(|&w| Integer::from(w)).collect(),
            Integer::from(degree),
        )
    }

    pub fn weights(&self) -> &[Integer] {
        &self.weights
    }

    pub fn degree(&self) -> &Integer {
        &self.degree
    }

    /// Dimension of the hypersurface: number of weights minus 2.
    pub fn dimension(&self) -> usize {
        self.weights.len() - 2
    }

    /// True iff for every index `i` the remaining weights have gcd 1.
    pub fn well_formed(&self) -> bool {
        for skip in 0..self.weights.len() {
            let mut g = Integer::from(0);
            for (i, w) in self.weights.iter().enumerate() {
                if i != skip {
                    g.gcd_mut(w);
                }
            }
            if g != 1 {
                return false;
            }
        }
        true
    }

    /// True iff the weights sum to the degree.
    pub fn is_calabi_yau(&self) -> bool {
        let sum: Integer = self.weights.iter().sum();
        sum == self.degree
    }

    /// Fractional part of `ell * a_i / d`, as an exact rational with
    /// denominator dividing `d`.
    pub fn theta(&self, i: usize, ell: &Integer) -> Rational {
        let r = Integer::from(ell * &self.weights[i]).rem_euc(&self.degree);
        Rational::from((r, self.degree.clone()))
    }

    /// Weights and degree as machine integers, when they fit.
    pub(crate) fn to_u64(&self) -> Option<(Vec<u64>, u64)> {
        let d = self.degree.to_u64()?;
        let ws = self
            .weights
            .iter()
            .map(|w| w.to_u64())
            .collect::<Option<Vec<_>>>()?;
        Some((ws, d))
    }
}

impl std::fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "X_{} in P({})", self.degree, ws.join(","))
    }
}

/// A diagonal action of the cyclic group of the given order: coordinate `i`
/// scales by `zeta^(exponents[i])`. Exponents are stored reduced mod the
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalAction {
    order: Integer,
    exponents: Vec<Integer>,
}

impl DiagonalAction {
    pub fn new(order: Integer, exponents: Vec<Integer>) -> Result<Self> {
        if order < 1 {
            return Err(Error::Input("action order must be positive".into()));
        }
        let exponents = exponents
            .into_iter()
            .map(|e| e.rem_euc(&order))
            .collect();
        Ok(DiagonalAction { order, exponents })
    }

    pub fn order(&self) -> &Integer {
        &self.order
    }

    pub fn exponents(&self) -> &[Integer] {
        &self.exponents
    }

    /// The identity action on `n` coordinates.
    pub fn identity(n: usize) -> Self {
        DiagonalAction {
            order: Integer::from(1),
            exponents: vec![Integer::from(0); n],
        }
    }
}

/// True iff the whole polynomial scales by a single character: every
/// monomial's exponent vector pairs with the action exponents to the same
/// residue mod the order.
///
/// `monomials` lists exponent vectors, one per monomial.
pub fn action_preserves(monomials: &[Vec<Integer>], action: &DiagonalAction) -> Result<bool> {
    if monomials.is_empty() {
        return Err(Error::Input("empty polynomial".into()));
    }
    let nvars = action.exponents.len();
    let mut character: Option<Integer> = None;
    for mon in monomials {
        if mon.len() != nvars {
            return Err(Error::Input(format!(
                "monomial arity {} does not match action arity {nvars}",
                mon.len()
            )));
        }
        let mut residue = Integer::from(0);
        for (e, c) in mon.iter().zip(&action.exponents) {
            residue += Integer::from(e * c);
        }
        let residue = residue.rem_euc(&action.order);
        match &character {
            None => character = Some(residue),
            Some(ch) => {
                if *ch != residue {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Parses the weight-system text format: one record per line,
/// `d : a_0,a_1,...,a_{n+1}`, ASCII decimal; `#`-prefixed comment lines and
/// blank lines are ignored. Returns `(line_number, parse result)` pairs so
/// batch consumers can report per-line failures.
pub fn parse_weight_systems(text: &str) -> Vec<(usize, Result<WeightSystem>)> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((line_no, parse_weight_line(trimmed)));
    }
    out
}

fn parse_weight_line(line: &str) -> Result<WeightSystem> {
    let (d_part, w_part) = line
        .split_once(':')
        .ok_or_else(|| Error::Input(format!("expected `d : a_0,a_1,...`, got `{line}`")))?;
    let degree: Integer = d_part
        .trim()
        .parse()
        .map_err(|_| Error::Input(format!("bad degree `{}`", d_part.trim())))?;
    let weights = w_part
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Integer>()
                .map_err(|_| Error::Input(format!("bad weight `{}`", t.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    WeightSystem::new(weights, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn ws(weights: &[u64], d: u64) -> WeightSystem {
        WeightSystem::from_u64(weights, d).unwrap()
    }

    #[test]
    fn well_formedness_examples() {
        assert!(ws(&[5, 3, 1, 1], 10).well_formed());
        assert!(!ws(&[2, 2, 1], 5).well_formed());
        assert!(ws(&[42, 28, 12, 1, 1], 84).well_formed());
    }

    #[test]
    fn calabi_yau_examples() {
        assert!(ws(&[42, 28, 12, 1, 1], 84).is_calabi_yau());
        assert!(!ws(&[1, 1, 1], 2).is_calabi_yau());
        assert!(ws(&[1743, 1162, 498, 42, 41], 3486).is_calabi_yau());
    }

    #[test]
    fn theta_examples() {
        let w = ws(&[5, 3, 1, 1], 10);
        assert_eq!(w.theta(0, &int(0)), 0);
        let w = ws(&[3, 3, 3, 1], 10);
        assert_eq!(w.theta(0, &int(1)), Rational::from((3, 10)));
        let w = ws(&[42, 28, 12, 1, 1], 84);
        assert_eq!(w.theta(1, &int(2)), Rational::from((2, 3)));
    }

    #[test]
    fn theta_complement_sums_to_zero_or_one() {
        let w = ws(&[5, 3, 1, 1], 10);
        for i in 0..4 {
            for ell in 1..10i64 {
                let s = w.theta(i, &int(ell)) + w.theta(i, &int(10 - ell));
                assert!(s == 0 || s == 1, "theta sum {s} out of range");
            }
        }
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(WeightSystem::from_u64(&[1, 1], 2).is_err());
        assert!(WeightSystem::from_u64(&[0, 1, 1], 2).is_err());
        assert!(WeightSystem::from_u64(&[3, 1, 1], 2).is_err());
    }

    #[test]
    fn kondo_y10_invariance() {
        // x_0^2 + x_1^3 x_3 + x_3^9 x_2 + x_2^7 x_1 under the order-19
        // action (1, 7, 2, 0)
        let mons = vec![
            vec![int(2), int(0), int(0), int(0)],
            vec![int(0), int(3), int(0), int(1)],
            vec![int(0), int(0), int(1), int(9)],
            vec![int(0), int(1), int(7), int(0)],
        ];
        let act = DiagonalAction::new(int(19), vec![int(1), int(7), int(2), int(0)]).unwrap();
        assert!(action_preserves(&mons, &act).unwrap());
        let id = DiagonalAction::identity(4);
        assert!(action_preserves(&mons, &id).unwrap());
    }

    #[test]
    fn s11_invariance() {
        // x_0^2 x_3 + x_1^3 x_2 + x_2^3 x_0 + x_3^8 x_1 under the order-13
        // action (1, 2, -4, 0)
        let mons = vec![
            vec![int(2), int(0), int(0), int(1)],
            vec![int(0), int(3), int(1), int(0)],
            vec![int(1), int(0), int(3), int(0)],
            vec![int(0), int(1), int(0), int(8)],
        ];
        let act = DiagonalAction::new(int(13), vec![int(1), int(2), int(-4), int(0)]).unwrap();
        assert!(action_preserves(&mons, &act).unwrap());
        // a wrong action breaks invariance
        let bad = DiagonalAction::new(int(13), vec![int(1), int(2), int(-4), int(1)]).unwrap();
        assert!(!action_preserves(&mons, &bad).unwrap());
    }

    #[test]
    fn action_arity_mismatch_is_an_error() {
        let mons = vec![vec![int(2), int(0)]];
        let act = DiagonalAction::new(int(5), vec![int(1), int(2), int(3)]).unwrap();
        assert!(action_preserves(&mons, &act).is_err());
    }

    #[test]
    fn parse_format() {
        let text = "# comment\n84 : 42,28,12,1,1\n\n12 : 3,3,3,1,1,1\nbogus\n";
        let rows = parse_weight_systems(text);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].0, 2);
        assert!(rows[0].1.is_ok());
        assert_eq!(rows[1].0, 4);
        assert!(rows[1].1.as_ref().unwrap().is_calabi_yau());
        assert_eq!(rows[2].0, 5);
        assert!(rows[2].1.is_err());
    }
}
