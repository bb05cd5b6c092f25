//! Simple random variables on Ω = [0,1): labeled partitions of Ω with one
//! (possibly empty) block per point of the space.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metric::{
    ensure_same_space, kyfan_functional, prokhorov_coupling, CouplingMatrix, FiniteMetricSpace,
    Measure,
};
use crate::omega::IntervalSet;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleRandomVariable {
    space: Arc<FiniteMetricSpace>,
    blocks: Vec<IntervalSet>,
}

impl SimpleRandomVariable {
    /// `blocks[i]` is the preimage of the `i`-th point. The blocks must
    /// partition `[0,1)`.
    pub fn new(space: Arc<FiniteMetricSpace>, blocks: Vec<IntervalSet>) -> Result<Self> {
        if blocks.len() != space.len() {
            return Err(Error::Domain(format!(
                "{} blocks for a {}-point space",
                blocks.len(),
                space.len()
            )));
        }
        let mut covered = IntervalSet::empty();
        for (i, b) in blocks.iter().enumerate() {
            if !covered.is_disjoint(b) {
                return Err(Error::Domain(format!(
                    "block of {} overlaps an earlier block",
                    space.points()[i]
                )));
            }
            covered = covered.union(b);
        }
        if covered != IntervalSet::full() {
            return Err(Error::Domain(format!(
                "blocks cover {covered:?}, not [0,1)"
            )));
        }
        Ok(SimpleRandomVariable { space, blocks })
    }

    pub(crate) fn from_blocks_unchecked(
        space: Arc<FiniteMetricSpace>,
        blocks: Vec<IntervalSet>,
    ) -> Self {
        debug_assert_eq!(
            blocks.iter().map(IntervalSet::measure).sum::<Rational>(),
            Rational::one()
        );
        SimpleRandomVariable { space, blocks }
    }

    /// The variable equal to point `i` everywhere.
    pub fn constant(space: Arc<FiniteMetricSpace>, i: usize) -> Self {
        let mut blocks = vec![IntervalSet::empty(); space.len()];
        blocks[i] = IntervalSet::full();
        SimpleRandomVariable { space, blocks }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn blocks(&self) -> &[IntervalSet] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &IntervalSet {
        &self.blocks[i]
    }

    /// Index of the point taken at `omega`.
    pub fn value_at(&self, omega: &Rational) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(omega))
    }

    pub fn law(&self) -> Measure {
        let w = self.blocks.iter().map(IntervalSet::measure).collect();
        Measure::from_parts_unchecked(self.space.clone(), w)
    }

    /// Joint law of `(self, other)`: `mass[i][j] = P(A_i ∩ B_j)`.
    pub fn joint(&self, other: &SimpleRandomVariable) -> Result<CouplingMatrix> {
        ensure_same_space(&self.space, &other.space, "joint law")?;
        let mass = self
            .blocks
            .iter()
            .map(|a| {
                other
                    .blocks
                    .iter()
                    .map(|b| a.intersect(b).measure())
                    .collect()
            })
            .collect();
        CouplingMatrix::new(self.space.clone(), mass)
    }
}

/// Ky Fan distance `inf{eps : P(d(X,Y) >= eps) <= eps}`.
pub fn kyfan_rho(x: &SimpleRandomVariable, y: &SimpleRandomVariable) -> Result<Rational> {
    Ok(kyfan_functional(&x.joint(y)?))
}

/// A variable `Y` with `P(A_i ∩ B_j) = pi[i][j]`, where `A_i` are the blocks
/// of `x`. Each `A_i` is split leftmost into the masses of row `i`, and `B_j`
/// collects the `j`-th piece of every row.
pub fn realize_coupling(
    x: &SimpleRandomVariable,
    pi: &CouplingMatrix,
) -> Result<SimpleRandomVariable> {
    ensure_same_space(&x.space, pi.space(), "coupling realization")?;
    let m = x.space.len();
    let mut blocks = vec![IntervalSet::empty(); m];
    for (i, a) in x.blocks.iter().enumerate() {
        let row = &pi.mass()[i];
        if a.measure() != row.iter().sum::<Rational>() {
            return Err(Error::Domain(format!(
                "coupling row {} has mass {} but the block has measure {}",
                x.space.points()[i],
                row.iter().sum::<Rational>(),
                a.measure()
            )));
        }
        for (j, piece) in a.split(row)?.into_iter().enumerate() {
            if !piece.is_empty() {
                blocks[j] = blocks[j].union(&piece);
            }
        }
    }
    Ok(SimpleRandomVariable {
        space: x.space.clone(),
        blocks,
    })
}

/// A variable with law `nu` at Ky Fan distance exactly `q(law(x), nu)` from `x`.
pub fn match_to_law(x: &SimpleRandomVariable, nu: &Measure) -> Result<SimpleRandomVariable> {
    ensure_same_space(&x.space, nu.space(), "match to law")?;
    let (_, pi) = prokhorov_coupling(&x.law(), nu)?;
    realize_coupling(x, &pi)
}

/// Consecutive slabs of `[0,1)` with lengths `nu`'s weights, in point order.
pub fn canonical_rv(nu: &Measure) -> SimpleRandomVariable {
    let blocks = IntervalSet::full()
        .split(nu.weights())
        .expect("measure weights sum to one");
    SimpleRandomVariable {
        space: nu.space().clone(),
        blocks,
    }
}
