//! Dense joint probability tables over finite categorical variables.
//!
//! Layout is row-major over the variable list with the LAST variable fastest,
//! matching the mixed-radix row order of CPT files.

use crate::error::{Error, Result};
use crate::Base;

#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    variables: Vec<String>,
    cards: Vec<usize>,
    strides: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    /// Build a table, validating that entries are nonnegative and sum to 1
    /// within 1e-9. Tiny negative rounding noise (>= -1e-12) is clamped to 0.
    pub fn new(variables: Vec<String>, cards: Vec<usize>, mut probs: Vec<f64>) -> Result<Self> {
        if variables.len() != cards.len() {
            return Err(Error::Usage("variable/cardinality length mismatch".into()));
        }
        if cards.iter().any(|&c| c == 0) {
            return Err(Error::Usage("zero cardinality".into()));
        }
        let total: usize = cards.iter().product();
        if probs.len() != total {
            return Err(Error::Usage(format!(
                "expected {total} probabilities, got {}",
                probs.len()
            )));
        }
        let mut sum = 0.0;
        for p in probs.iter_mut() {
            if *p < -1e-12 {
                return Err(Error::ModelInvalid(format!("negative probability {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
            sum += *p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::ModelInvalid(format!("joint table sums to {sum}, not 1")));
        }
        let strides = strides_of(&cards);
        Ok(JointTable { variables, cards, strides, probs })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of a full state assignment (one state per variable,
    /// in table order).
    pub fn prob(&self, states: &[usize]) -> f64 {
        self.probs[self.flat_index(states)]
    }

    fn flat_index(&self, states: &[usize]) -> usize {
        debug_assert_eq!(states.len(), self.cards.len());
        states.iter().zip(&self.strides).map(|(s, st)| s * st).sum()
    }

    pub(crate) fn decode(&self, flat: usize, out: &mut [usize]) {
        for i in 0..self.cards.len() {
            out[i] = (flat / self.strides[i]) % self.cards[i];
        }
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut seen = std::collections::HashSet::new();
        names
            .iter()
            .map(|n| {
                let pos = self
                    .variables
                    .iter()
                    .position(|v| v == n)
                    .ok_or_else(|| Error::Usage(format!("unknown variable {n:?}")))?;
                if !seen.insert(pos) {
                    return Err(Error::Usage(format!("variable {n:?} selected twice")));
                }
                Ok(pos)
            })
            .collect()
    }

    /// Marginal distribution over `keep`, in the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<JointTable> {
        let pos = self.positions(keep)?;
        let kept_cards: Vec<usize> = pos.iter().map(|&p| self.cards[p]).collect();
        let kept_strides = strides_of(&kept_cards);
        let mut out = vec![0.0; kept_cards.iter().product()];
        let mut state = vec![0usize; self.cards.len()];
        for flat in 0..self.probs.len() {
            let p = self.probs[flat];
            if p == 0.0 {
                continue;
            }
            self.decode(flat, &mut state);
            let idx: usize = pos.iter().zip(&kept_strides).map(|(&p_, st)| state[p_] * st).sum();
            out[idx] += p;
        }
        JointTable::new(keep.iter().map(|s| s.to_string()).collect(), kept_cards, out)
    }

    fn entropy_nats(&self, sel: &[&str]) -> Result<f64> {
        let m = self.marginal(sel)?;
        Ok(-m.probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>())
    }

    /// Shannon entropy H(sel).
    pub fn entropy(&self, sel: &[&str], base: Base) -> Result<f64> {
        Ok(base.from_nats(self.entropy_nats(sel)?))
    }

    /// H(of | given) = H(of, given) - H(given).
    pub fn conditional_entropy(&self, of: &[&str], given: &[&str], base: Base) -> Result<f64> {
        let joint_sel: Vec<&str> = of.iter().chain(given.iter()).copied().collect();
        self.positions(&joint_sel)?; // rejects overlap between `of` and `given`
        let h = self.entropy_nats(&joint_sel)? - self.entropy_nats(given)?;
        Ok(base.from_nats(h))
    }

    /// I(a; b) = H(a) + H(b) - H(a, b); clamped at 0.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], base: Base) -> Result<f64> {
        self.conditional_mutual_information(a, b, &[], base)
    }

    /// I(a; b | c) = H(a,c) + H(b,c) - H(a,b,c) - H(c); clamped at 0.
    ///
    /// The three selections must be disjoint.
    pub fn conditional_mutual_information(
        &self,
        a: &[&str],
        b: &[&str],
        c: &[&str],
        base: Base,
    ) -> Result<f64> {
        let all: Vec<&str> = a.iter().chain(b.iter()).chain(c.iter()).copied().collect();
        self.positions(&all)?; // rejects overlapping selections
        let ac: Vec<&str> = a.iter().chain(c.iter()).copied().collect();
        let bc: Vec<&str> = b.iter().chain(c.iter()).copied().collect();
        let v = self.entropy_nats(&ac)? + self.entropy_nats(&bc)?
            - self.entropy_nats(&all)?
            - self.entropy_nats(c)?;
        Ok(base.from_nats(v.max(0.0)))
    }
}

fn strides_of(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    strides
}

/// Kullback-Leibler divergence sum_w p(w) log(p(w)/q(w)) with 0 log(0/.) = 0.
///
/// `q` may list the same variables in a different order; axes are aligned by
/// name. A support violation (q = 0 where p > 0) yields an explicit
/// `f64::INFINITY` rather than an error.
pub fn kl_divergence(p: &JointTable, q: &JointTable, base: Base) -> Result<f64> {
    if p.variables.len() != q.variables.len() {
        return Err(Error::Usage("KL over different variable sets".into()));
    }
    let qpos: Vec<usize> =
        q.positions(&p.variables.iter().map(String::as_str).collect::<Vec<_>>())?;
    for (i, &qp) in qpos.iter().enumerate() {
        if p.cards[i] != q.cards[qp] {
            return Err(Error::Usage(format!(
                "cardinality mismatch on variable {:?}",
                p.variables[i]
            )));
        }
    }
    let mut total = 0.0;
    let mut state = vec![0usize; p.cards.len()];
    let mut qstate = vec![0usize; p.cards.len()];
    for flat in 0..p.probs.len() {
        let pv = p.probs[flat];
        if pv == 0.0 {
            continue;
        }
        p.decode(flat, &mut state);
        for (i, &qp) in qpos.iter().enumerate() {
            qstate[qp] = state[i];
        }
        let qv = q.prob(&qstate);
        if qv == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pv * (pv / qv).ln();
    }
    Ok(base.from_nats(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn coin(p0: f64) -> JointTable {
        JointTable::new(vec!["X".into()], vec![2], vec![p0, 1.0 - p0]).unwrap()
    }

    #[test]
    fn kl_identical_is_zero() {
        let p = coin(0.3);
        assert_eq!(kl_divergence(&p, &p, Base::Bits).unwrap(), 0.0);
    }

    #[test]
    fn kl_point_mass_vs_fair_coin_is_one_bit() {
        let p = coin(1.0);
        let q = coin(0.5);
        assert_abs_diff_eq!(kl_divergence(&p, &q, Base::Bits).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kl_half_half_vs_quarter_three_quarters() {
        let p = coin(0.5);
        let q = coin(0.25);
        // 0.5*log2(2) + 0.5*log2(2/3)
        let expected = 0.5 + 0.5 * (2.0f64 / 3.0).log2();
        assert_abs_diff_eq!(
            kl_divergence(&p, &q, Base::Bits).unwrap(),
            expected,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(expected, 0.20751874963942196, epsilon = 1e-12);
    }

    #[test]
    fn kl_support_violation_is_infinite() {
        let p = coin(0.5);
        let q = coin(1.0);
        assert_eq!(kl_divergence(&p, &q, Base::Bits).unwrap(), f64::INFINITY);
    }

    #[test]
    fn kl_aligns_axes_by_name() {
        // P(X,Y) with X fastest vs Y fastest.
        let p = JointTable::new(
            vec!["X".into(), "Y".into()],
            vec![2, 2],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        let q = JointTable::new(
            vec!["Y".into(), "X".into()],
            vec![2, 2],
            vec![0.1, 0.3, 0.2, 0.4],
        )
        .unwrap();
        assert_abs_diff_eq!(kl_divergence(&p, &q, Base::Nats).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn marginal_orders_and_sums() {
        let t = JointTable::new(
            vec!["A".into(), "B".into()],
            vec![2, 3],
            vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.25],
        )
        .unwrap();
        let m = t.marginal(&["B"]).unwrap();
        assert_eq!(m.variables(), ["B".to_owned()]);
        assert_abs_diff_eq!(m.prob(&[0]), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(m.prob(&[2]), 0.40, epsilon = 1e-12);
        let m2 = t.marginal(&["B", "A"]).unwrap();
        assert_abs_diff_eq!(m2.prob(&[1, 0]), 0.10, epsilon = 1e-12);
    }

    #[test]
    fn overlapping_selection_is_rejected() {
        let t = coin(0.5);
        assert!(matches!(
            t.conditional_mutual_information(&["X"], &["X"], &[], Base::Bits),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn fair_coin_copy_has_one_bit_mi() {
        let t = JointTable::new(
            vec!["X".into(), "Y".into()],
            vec![2, 2],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        assert_abs_diff_eq!(
            t.mutual_information(&["X"], &["Y"], Base::Bits).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(t.entropy(&["X"], Base::Bits).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            t.conditional_entropy(&["Y"], &["X"], Base::Bits).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    fn arb_dist(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(1e-3f64..1.0, len).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn kl_nonnegative_zero_iff_equal(p in arb_dist(6), q in arb_dist(6)) {
            let vars = vec!["A".to_owned(), "B".to_owned()];
            let cards = vec![2, 3];
            let tp = JointTable::new(vars.clone(), cards.clone(), p.clone()).unwrap();
            let tq = JointTable::new(vars, cards, q.clone()).unwrap();
            let d = kl_divergence(&tp, &tq, Base::Nats).unwrap();
            prop_assert!(d >= 0.0);
            let max_gap = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if d < 1e-12 {
                prop_assert!(max_gap < 1e-5);
            }
            if max_gap == 0.0 {
                prop_assert!(d.abs() < 1e-12);
            }
        }

        #[test]
        fn cmi_nonnegative(p in arb_dist(8)) {
            let t = JointTable::new(
                vec!["A".into(), "B".into(), "C".into()],
                vec![2, 2, 2],
                p,
            ).unwrap();
            let v = t.conditional_mutual_information(&["A"], &["B"], &["C"], Base::Nats).unwrap();
            prop_assert!(v >= 0.0);
        }
    }
}
