//! Exact rational linear feasibility.
//!
//! [`solve_feasibility`] runs a dense phase-one simplex over rationals with
//! Bland's rule, so it always terminates and never rounds. Variables are
//! free unless bounded by explicit constraints. An infeasible answer comes
//! with a Farkas certificate read off the final phase-one duals.
//!
//! Certificate convention: every constraint is viewed in `<=` orientation
//! (a `>=` row is negated, an `=` row is kept). The certificate holds one
//! multiplier per constraint, nonnegative for inequality rows and of either
//! sign for equality rows, such that the combined left-hand side is the zero
//! vector while the combined right-hand side is negative: `0 <= negative`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(x), &self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearSystem {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                context: "constraint coefficients".into(),
                expected: self.num_vars,
                found: coeffs.len(),
            });
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(())
    }

    /// Adds a constraint given as `(variable, coefficient)` pairs. Repeated
    /// variables accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        for (var, c) in terms {
            coeffs[*var] += c;
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn lower_bound(&mut self, var: usize, value: Rational) {
        self.add_sparse(&[(var, Rational::one())], Relation::Ge, value);
    }

    pub fn upper_bound(&mut self, var: usize, value: Rational) {
        self.add_sparse(&[(var, Rational::one())], Relation::Le, value);
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars && self.constraints.iter().all(|c| c.is_satisfied(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    /// Checks the certificate against `sys` with exact arithmetic.
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        if self.multipliers.len() != sys.constraints.len() {
            return false;
        }
        let mut combined = vec![Rational::zero(); sys.num_vars];
        let mut rhs = Rational::zero();
        for (m, c) in self.multipliers.iter().zip(&sys.constraints) {
            if c.relation != Relation::Eq && m.is_negative() {
                return false;
            }
            let sign = if c.relation == Relation::Ge {
                -Rational::one()
            } else {
                Rational::one()
            };
            let factor = m * sign;
            for (acc, a) in combined.iter_mut().zip(&c.coeffs) {
                *acc += &factor * a;
            }
            rhs += &factor * &c.rhs;
        }
        combined.iter().all(Zero::is_zero) && rhs.is_negative()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityResult {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityResult::Feasible(x) => Some(x),
            FeasibilityResult::Infeasible(_) => None,
        }
    }
}

/// Decides feasibility of `sys` exactly.
pub fn solve_feasibility(sys: &LinearSystem) -> FeasibilityResult {
    Tableau::phase_one(sys).solve(sys)
}

/// Dense phase-one tableau.
///
/// Columns: `x+` (n), `x-` (n), one slack or surplus per inequality row,
/// one artificial per `>=` / `=` row (after normalizing to nonnegative
/// right-hand sides). Each row starts with an identity column (its slack or
/// its artificial), which is where the final duals are read from.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    cost: Vec<Rational>,
    reduced: Vec<Rational>,
    initial_basis: Vec<usize>,
    row_sign: Vec<bool>,
}

impl Tableau {
    fn phase_one(sys: &LinearSystem) -> Tableau {
        let n = sys.num_vars;
        let m = sys.constraints.len();

        // normalized relation and sign flip per row
        let mut relations = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for c in &sys.constraints {
            let negate = c.rhs.is_negative();
            row_sign.push(negate);
            relations.push(if negate { c.relation.flipped() } else { c.relation });
        }
        let num_slack = relations.iter().filter(|r| **r != Relation::Eq).count();
        let num_art = relations.iter().filter(|r| **r != Relation::Le).count();
        let width = 2 * n + num_slack + num_art;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut cost = vec![Rational::zero(); width];
        let mut next_slack = 2 * n;
        let mut next_art = 2 * n + num_slack;
        for (r, c) in sys.constraints.iter().enumerate() {
            let sign = if row_sign[r] { -Rational::one() } else { Rational::one() };
            let mut row = vec![Rational::zero(); width];
            for (j, a) in c.coeffs.iter().enumerate() {
                if !a.is_zero() {
                    row[j] = a * &sign;
                    row[n + j] = -(a * &sign);
                }
            }
            match relations[r] {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    cost[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    cost[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
            rhs.push(&c.rhs * &sign);
        }

        // reduced costs d_j = c_j - sum over artificial rows of a_rj
        let mut reduced = cost.clone();
        for (r, row) in rows.iter().enumerate() {
            if cost[basis[r]].is_one() {
                for (d, a) in reduced.iter_mut().zip(row) {
                    *d -= a;
                }
            }
        }
        let initial_basis = basis.clone();
        Tableau {
            rows,
            rhs,
            basis,
            cost,
            reduced,
            initial_basis,
            row_sign,
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for a in self.rows[pr].iter_mut() {
            if !a.is_zero() {
                *a *= &inv;
            }
        }
        self.rhs[pr] *= &inv;
        let pivot_row = self.rows[pr].clone();
        let pivot_rhs = self.rhs[pr].clone();
        for r in 0..self.rows.len() {
            if r == pr || self.rows[r][pc].is_zero() {
                continue;
            }
            let factor = self.rows[r][pc].clone();
            for (a, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *a -= &factor * p;
                }
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        if !self.reduced[pc].is_zero() {
            let factor = self.reduced[pc].clone();
            for (d, p) in self.reduced.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *d -= &factor * p;
                }
            }
        }
        self.basis[pr] = pc;
    }

    fn solve(mut self, sys: &LinearSystem) -> FeasibilityResult {
        // Bland: lowest-index column with negative reduced cost enters.
        while let Some(enter) = self.reduced.iter().position(Signed::is_negative) {
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let replace = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if replace {
                    leave = Some((r, ratio));
                }
            }
            let (pr, _) = leave.expect("phase-one objective is bounded below");
            self.pivot(pr, enter);
        }

        let infeasibility: Rational = self
            .basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, v)| &self.cost[b] * v)
            .sum();
        let n = sys.num_vars;
        if infeasibility.is_zero() {
            let mut x = vec![Rational::zero(); n];
            for (r, &b) in self.basis.iter().enumerate() {
                if b < n {
                    x[b] += &self.rhs[r];
                } else if b < 2 * n {
                    x[b - n] -= &self.rhs[r];
                }
            }
            return FeasibilityResult::Feasible(x);
        }

        // Phase-one duals u_r = c_j - d_j at the row's initial identity
        // column. They satisfy A'^T u <= 0 on structural and slack columns and
        // b'^T u > 0; undo the row normalization and orient to <= form.
        let multipliers = sys
            .constraints
            .iter()
            .enumerate()
            .map(|(r, c)| {
                let j = self.initial_basis[r];
                let u = &self.cost[j] - &self.reduced[j];
                let w = if self.row_sign[r] { -u } else { u };
                let y = -w;
                if c.relation == Relation::Ge {
                    -y
                } else {
                    y
                }
            })
            .collect();
        FeasibilityResult::Infeasible(FarkasCertificate { multipliers })
    }
}
