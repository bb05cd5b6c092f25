use crate::error::{Error, Result};
use crate::metric::ensure_same_space;
use crate::omega::IntervalSet;
use crate::rational::Rational;
use crate::srv::SimpleRandomVariable;

/// Continuous path of random variables on `[start, end]` from `x` to `y`.
///
/// With `E_ij = A_i ∩ B_j` (blocks of `x` and `y`) and `s = (t - start) /
/// (end - start)`, the value at `t` is `a_j` on the leftmost part of `E_ij`
/// of mass `s * e_ij` and `a_i` on the rest of `E_ij`. Diagonal cells never
/// move. The law at `t` is the mixture `(1 - s) law(x) + s law(y)`, and the
/// Ky Fan distance between times `s < t` is at most `(t - s) / (end - start)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLift {
    start: Rational,
    end: Rational,
    x: SimpleRandomVariable,
    y: SimpleRandomVariable,
    cells: Vec<Vec<IntervalSet>>,
    masses: Vec<Vec<Rational>>,
}

impl SegmentLift {
    pub fn new(
        x: SimpleRandomVariable,
        y: SimpleRandomVariable,
        start: Rational,
        end: Rational,
    ) -> Result<Self> {
        if start >= end {
            return Err(Error::Domain(format!(
                "segment interval [{start}, {end}] is empty"
            )));
        }
        ensure_same_space(x.space(), y.space(), "segment endpoints")?;
        let cells: Vec<Vec<IntervalSet>> = x
            .blocks()
            .iter()
            .map(|a| y.blocks().iter().map(|b| a.intersect(b)).collect())
            .collect();
        let masses = cells
            .iter()
            .map(|row| row.iter().map(IntervalSet::measure).collect())
            .collect();
        Ok(SegmentLift {
            start,
            end,
            x,
            y,
            cells,
            masses,
        })
    }

    pub fn start(&self) -> &Rational {
        &self.start
    }

    pub fn end(&self) -> &Rational {
        &self.end
    }

    pub fn length(&self) -> Rational {
        &self.end - &self.start
    }

    pub fn x(&self) -> &SimpleRandomVariable {
        &self.x
    }

    pub fn y(&self) -> &SimpleRandomVariable {
        &self.y
    }

    /// `E_ij`.
    pub fn cell(&self, i: usize, j: usize) -> &IntervalSet {
        &self.cells[i][j]
    }

    /// `e_ij = P(E_ij)`.
    pub fn cell_mass(&self, i: usize, j: usize) -> &Rational {
        &self.masses[i][j]
    }

    pub fn eval(&self, t: &Rational) -> Result<SimpleRandomVariable> {
        if t < &self.start || t > &self.end {
            return Err(Error::Domain(format!(
                "time {t} outside segment [{}, {}]",
                self.start, self.end
            )));
        }
        Ok(self.eval_fraction(&((t - &self.start) / self.length())))
    }

    /// Evaluation at relative position `s` in `[0,1]`.
    pub fn eval_fraction(&self, s: &Rational) -> SimpleRandomVariable {
        if s.is_zero() {
            return self.x.clone();
        }
        if s == &Rational::one() {
            return self.y.clone();
        }
        let m = self.cells.len();
        let mut blocks = vec![IntervalSet::empty(); m];
        for i in 0..m {
            for j in 0..m {
                let cell = &self.cells[i][j];
                if cell.is_empty() {
                    continue;
                }
                if i == j {
                    blocks[i] = blocks[i].union(cell);
                    continue;
                }
                let moved = cell
                    .prefix(&(s * &self.masses[i][j]))
                    .expect("s * e_ij <= e_ij");
                let stayed = cell.difference(&moved);
                blocks[j] = blocks[j].union(&moved);
                blocks[i] = blocks[i].union(&stayed);
            }
        }
        SimpleRandomVariable::from_blocks_unchecked(self.x.space().clone(), blocks)
    }
}

/// Free-function form of [`SegmentLift::new`].
pub fn segment_lift(
    x: &SimpleRandomVariable,
    y: &SimpleRandomVariable,
    a: &Rational,
    b: &Rational,
) -> Result<SegmentLift> {
    SegmentLift::new(x.clone(), y.clone(), a.clone(), b.clone())
}

/// Free-function form of [`SegmentLift::eval`].
pub fn segment_eval(seg: &SegmentLift, t: &Rational) -> Result<SimpleRandomVariable> {
    seg.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteMetricSpace;
    use crate::rational::q;
    use crate::srv::kyfan_rho;
    use std::sync::Arc;

    fn two_point() -> Arc<FiniteMetricSpace> {
        let z = Rational::zero();
        let o = Rational::one();
        Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![z.clone(), o.clone()], vec![o, z]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn constant_endpoints() {
        let s = two_point();
        let x = SimpleRandomVariable::constant(s.clone(), 0);
        let y = SimpleRandomVariable::constant(s.clone(), 1);
        let seg = segment_lift(&x, &y, &q(0, 1), &q(1, 1)).unwrap();
        let t = q(1, 3);
        let v = seg.eval(&t).unwrap();
        assert_eq!(
            v.block(1),
            &IntervalSet::interval(q(0, 1), t.clone()).unwrap()
        );
        assert_eq!(v.block(0), &IntervalSet::interval(t, q(1, 1)).unwrap());
        assert_eq!(seg.eval(&q(0, 1)).unwrap(), x);
        assert_eq!(seg.eval(&q(1, 1)).unwrap(), y);
    }

    #[test]
    fn identical_endpoints_stay_put() {
        let s = two_point();
        let x = SimpleRandomVariable::new(
            s,
            vec![
                IntervalSet::interval(q(0, 1), q(2, 5)).unwrap(),
                IntervalSet::interval(q(2, 5), q(1, 1)).unwrap(),
            ],
        )
        .unwrap();
        let seg = segment_lift(&x, &x, &q(1, 4), &q(3, 4)).unwrap();
        for k in 0..=8 {
            assert_eq!(seg.eval(&(q(1, 4) + q(k, 16))).unwrap(), x);
        }
    }

    #[test]
    fn law_and_regularity_on_a_shifted_interval() {
        let s = two_point();
        let x = SimpleRandomVariable::new(
            s.clone(),
            vec![
                IntervalSet::interval(q(0, 1), q(3, 4)).unwrap(),
                IntervalSet::interval(q(3, 4), q(1, 1)).unwrap(),
            ],
        )
        .unwrap();
        let y = SimpleRandomVariable::new(
            s,
            vec![
                IntervalSet::interval(q(1, 2), q(1, 1)).unwrap(),
                IntervalSet::interval(q(0, 1), q(1, 2)).unwrap(),
            ],
        )
        .unwrap();
        let (a, b) = (q(1, 5), q(3, 5));
        let seg = segment_lift(&x, &y, &a, &b).unwrap();
        let mid = seg.eval(&q(2, 5)).unwrap();
        let expected = x.law().mixture(&y.law(), &q(1, 2)).unwrap();
        assert_eq!(mid.law(), expected);
        let early = seg.eval(&q(1, 4)).unwrap();
        assert!(kyfan_rho(&early, &mid).unwrap() <= (q(2, 5) - q(1, 4)) / (&b - &a));
        assert!(matches!(seg.eval(&q(4, 5)), Err(Error::Domain(_))));
        assert!(segment_lift(&x, &y, &b, &a).is_err());
    }
}
